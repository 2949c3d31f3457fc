/** HTML renderers for the dashboard panels.  Pure string-in/string-out
 * so the views are testable without a DOM. */

import { escapeHtml } from "./diagram.js";
import { REFINEMENT_KINDS, REFINEMENT_LABELS } from "./interventions.js";
import { keysByRecency, type ViewState } from "./store.js";
import type { KeyRecord } from "./types.js";

export function renderStatus(state: ViewState): string {
  return `<span class="status status-${state.status}">${state.status}</span>`;
}

export function renderTranscript(state: ViewState): string {
  const cards = state.transcript
    .map((turn, i) => {
      const classes = ["turn", turn.role, turn.evicted ? "evicted" : "retained"]
        .join(" ");
      return `<article class="${classes}" data-turn="${i}"><p>${escapeHtml(turn.text)}</p></article>`;
    })
    .join("");
  return `<section class="transcript">${cards}</section>`;
}

/** Key inspector: freshest first, numeric staleness from GET /keys,
 * warning badge on unlabeled captures, one refresh button per key. */
export function renderKeyPanel(
  state: ViewState,
  records: KeyRecord[],
): string {
  const byName = new Map(records.map((r) => [r.key, r]));
  const rows = keysByRecency(state)
    .map((badge) => {
      const record = byName.get(badge.key);
      const staleness = record ? record.staleness : 0;
      const warn = badge.unlabeled
        ? '<span class="badge badge-unlabeled" title="reply carried no key label">unlabeled</span>'
        : "";
      return (
        `<li class="key" data-key="${escapeHtml(badge.key)}">` +
        `<code>${escapeHtml(badge.key)}</code>` +
        `<span class="badge badge-version">v${badge.version}</span>${warn}` +
        `<span class="staleness">${staleness} turns ago</span>` +
        `<button class="refresh" data-key="${escapeHtml(badge.key)}">refresh</button></li>`
      );
    })
    .join("");
  return `<ul class="key-panel">${rows}</ul>`;
}

export function renderInterventionPanel(state: ViewState): string {
  const disabled = state.awaitingIntervention ? "" : " disabled";
  const refinements = REFINEMENT_KINDS.map(
    (kind) =>
      `<button class="refine" data-kind="${kind}"${disabled}>${REFINEMENT_LABELS[kind]}</button>`,
  ).join("");
  return (
    `<div class="intervention-panel">` +
    `<button class="approve"${disabled}>Approve</button>` +
    `<button class="skip"${disabled}>Skip</button>` +
    refinements +
    `<input class="redirect-prompt" placeholder="free-text prompt"${disabled}>` +
    `<button class="redirect"${disabled}>Send</button></div>`
  );
}

export function renderReportLinks(base: string, sessionId: string): string {
  return (
    `<nav class="report-links">` +
    `<a href="${base}/sessions/${sessionId}/report?format=md">report.md</a> ` +
    `<a href="${base}/sessions/${sessionId}/report?format=json">report.json</a></nav>`
  );
}
