/** Diagram preview decision logic.  Given a server-side diagram embed,
 * decide between rendering the script and showing the diagnostics view.
 * The result is never blank: invalid or unrenderable scripts fall back
 * to the raw text with the server's diagnostics alongside. */

import type { DiagramEmbed } from "./types.js";

export interface RenderView {
  mode: "render";
  kind: string;
  text: string;
}

export interface DiagnosticsView {
  mode: "diagnostics";
  kind: string;
  text: string;
  diagnostics: string[];
}

export type PreviewView = RenderView | DiagnosticsView;

export function previewFor(embed: DiagramEmbed): PreviewView {
  if (embed.valid && embed.text.trim()) {
    return { mode: "render", kind: embed.kind, text: embed.text };
  }
  const diagnostics = embed.diagnostics.length
    ? embed.diagnostics
    : ["diagram could not be validated"];
  return {
    mode: "diagnostics",
    kind: embed.kind,
    text: embed.text,
    diagnostics,
  };
}

/** Render failures reported by the mermaid runtime demote an embed the
 * server thought valid; the fallback still shows the raw script. */
export function demoteOnRenderFailure(
  view: PreviewView,
  error: unknown,
): DiagnosticsView {
  if (view.mode === "diagnostics") return view;
  return {
    mode: "diagnostics",
    kind: view.kind,
    text: view.text,
    diagnostics: [`renderer error: ${String(error)}`],
  };
}

export function previewHtml(view: PreviewView): string {
  if (view.mode === "render") {
    return `<div class="diagram" data-kind="${view.kind}"><pre class="mermaid">${escapeHtml(view.text)}</pre></div>`;
  }
  const items = view.diagnostics
    .map((d) => `<li>${escapeHtml(d)}</li>`)
    .join("");
  return (
    `<div class="diagram diagram-broken" data-kind="${view.kind}">` +
    `<pre class="raw">${escapeHtml(view.text)}</pre>` +
    `<ul class="diagnostics">${items}</ul></div>`
  );
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
