/** Event-sourced view state.  The store never invents session facts:
 * every field is a fold over the server's event stream, so replaying
 * the same events always yields the same view. */

import type { SessionEvent, SessionStatus } from "./types.js";

export interface TurnCard {
  role: "prompt" | "reply";
  text: string;
  evicted: boolean;
}

export interface KeyBadge {
  key: string;
  version: number;
  unlabeled: boolean;
  /** index of the event that last wrote or refreshed this key; higher
   * means fresher.  Used only for ordering, the numeric staleness shown
   * to the user comes from GET /keys. */
  lastTouched: number;
}

export interface ViewState {
  status: SessionStatus;
  transcript: TurnCard[];
  keys: Map<string, KeyBadge>;
  appliedEvents: number;
  awaitingIntervention: boolean;
  failure: string | null;
  evictedTurns: number;
}

export function initialState(): ViewState {
  return {
    status: "running",
    transcript: [],
    keys: new Map(),
    appliedEvents: 0,
    awaitingIntervention: false,
    failure: null,
    evictedTurns: 0,
  };
}

export function applyEvent(state: ViewState, event: SessionEvent): ViewState {
  const next: ViewState = {
    ...state,
    transcript: [...state.transcript],
    keys: new Map(state.keys),
    appliedEvents: state.appliedEvents + 1,
  };
  switch (event.event) {
    case "chain_sent":
      next.transcript.push({
        role: "prompt",
        text: String(event.text ?? ""),
        evicted: false,
      });
      break;
    case "reply_received":
      next.transcript.push({
        role: "reply",
        text: String(event.text ?? ""),
        evicted: false,
      });
      break;
    case "key_memorised":
    case "key_refreshed":
      next.keys.set(String(event.key), {
        key: String(event.key),
        version: Number(event.version ?? 1),
        unlabeled: Boolean(event.unlabeled ?? false),
        lastTouched: state.appliedEvents,
      });
      break;
    case "evicted": {
      const index = Number(event.turn_index);
      if (next.transcript[index]) {
        next.transcript[index] = { ...next.transcript[index], evicted: true };
      }
      next.evictedTurns += 1;
      break;
    }
    case "status_change": {
      const status = String(event.status) as SessionStatus;
      next.status = status;
      next.awaitingIntervention = status === "awaiting_intervention";
      if (status === "failed") next.failure = "session failed";
      break;
    }
    case "chain_skipped":
    case "intervention":
      break; // audit-only events; nothing to render beyond the log itself
    default:
      break; // forward compatibility: unknown events are ignored
  }
  return next;
}

export function applyEvents(
  state: ViewState,
  events: SessionEvent[],
): ViewState {
  return events.reduce(applyEvent, state);
}

/** Keys ordered freshest-first; a refresh moves a key to the top. */
export function keysByRecency(state: ViewState): KeyBadge[] {
  return [...state.keys.values()].sort(
    (a, b) => b.lastTouched - a.lastTouched || a.key.localeCompare(b.key),
  );
}
