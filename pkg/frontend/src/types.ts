/** Wire types mirrored from the session service's HTTP/JSON API. */

export type SessionStatus =
  | "running"
  | "awaiting_intervention"
  | "awaiting_ack"
  | "failed"
  | "complete";

export interface SessionSnapshot {
  id: string;
  created_at: number;
  status: SessionStatus;
  cursor: [number, number];
  turn_count: number;
  event_count: number;
  failure: string | null;
  pending_chain: string | null;
}

export interface SessionEvent {
  index: number;
  event: string;
  [field: string]: unknown;
}

export interface KeyRecord {
  key: string;
  value: string;
  version: number;
  unlabeled: boolean;
  created_turn: number;
  last_refreshed_turn: number;
  staleness: number;
}

export interface DiagramEmbed {
  kind: string;
  text: string;
  valid: boolean;
  diagnostics: string[];
}

export type RefinementKind =
  | "remove"
  | "add"
  | "increase_complexity"
  | "reflect";

export type InterventionBody =
  | { action: "approve" }
  | { action: "skip" }
  | { action: "refine"; refinement_kind: RefinementKind; target: string; key: string }
  | { action: "redirect"; prompt: string };

export interface ApiErrorBody {
  code: string;
  message: string;
}
