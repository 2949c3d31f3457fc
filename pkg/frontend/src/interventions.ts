/** Builders for the intervention panel: four refinement buttons plus a
 * free-text escape hatch.  Only POST bodies are built here; the prompt
 * text itself is composed server-side by the engine. */

import type { InterventionBody, RefinementKind } from "./types.js";

export const REFINEMENT_KINDS: readonly RefinementKind[] = [
  "remove",
  "add",
  "increase_complexity",
  "reflect",
] as const;

export const REFINEMENT_LABELS: Record<RefinementKind, string> = {
  remove: "Remove…",
  add: "Add…",
  increase_complexity: "Increase complexity",
  reflect: "Reflect & improve",
};

export function approveBody(): InterventionBody {
  return { action: "approve" };
}

export function skipBody(): InterventionBody {
  return { action: "skip" };
}

export function refineBody(
  kind: RefinementKind,
  target: string,
  key: string,
): InterventionBody {
  if (!REFINEMENT_KINDS.includes(kind)) {
    throw new Error(`unknown refinement kind: ${kind}`);
  }
  if (kind !== "increase_complexity" && !target.trim()) {
    throw new Error(`refinement '${kind}' needs a target`);
  }
  if (!key.startsWith("key-")) {
    throw new Error(`not a memorised key name: ${key}`);
  }
  return { action: "refine", refinement_kind: kind, target, key };
}

export function redirectBody(prompt: string): InterventionBody {
  if (!prompt.trim()) throw new Error("redirect needs a prompt");
  return { action: "redirect", prompt };
}
