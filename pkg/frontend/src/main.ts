/** Browser entry point: wires the API client, the event-sourced store
 * and the render functions into the page.  No business rules live here;
 * every state change is confirmed by a server event before rendering. */

import { ApiClient } from "./api.js";
import { demoteOnRenderFailure, previewFor, previewHtml } from "./diagram.js";
import {
  approveBody,
  redirectBody,
  refineBody,
  skipBody,
} from "./interventions.js";
import {
  renderInterventionPanel,
  renderKeyPanel,
  renderReportLinks,
  renderStatus,
  renderTranscript,
} from "./render.js";
import { applyEvent, initialState, type ViewState } from "./store.js";
import type { DiagramEmbed, RefinementKind } from "./types.js";

const API_BASE = (window as any).EABSS_API ?? "";

export async function mount(root: HTMLElement, sessionId: string) {
  const api = new ApiClient(API_BASE);
  let state: ViewState = initialState();

  const draw = async () => {
    const keys = await api.getKeys(sessionId).catch(() => []);
    root.innerHTML = [
      renderStatus(state),
      renderInterventionPanel(state),
      renderTranscript(state),
      renderKeyPanel(state, keys),
      renderReportLinks(API_BASE, sessionId),
    ].join("\n");
  };

  root.addEventListener("click", async (ev) => {
    const el = ev.target as HTMLElement;
    try {
      if (el.matches("button.approve")) {
        await api.intervene(sessionId, approveBody());
      } else if (el.matches("button.skip")) {
        await api.intervene(sessionId, skipBody());
      } else if (el.matches("button.refine")) {
        const kind = el.dataset.kind as RefinementKind;
        const key = prompt("memorised key to update?") ?? "";
        const target =
          kind === "increase_complexity" ? "" : prompt("target?") ?? "";
        await api.intervene(sessionId, refineBody(kind, target, key));
      } else if (el.matches("button.redirect")) {
        const input = root.querySelector<HTMLInputElement>(".redirect-prompt");
        await api.intervene(sessionId, redirectBody(input?.value ?? ""));
      }
    } catch (err) {
      console.warn("intervention rejected", err); // 409 -> state-conflict toast
    }
  });

  await api.followEvents(sessionId, (event) => {
    state = applyEvent(state, event);
    void draw();
  });
  await draw();
}

export function diagramPanel(embeds: DiagramEmbed[]): string {
  return embeds
    .map((embed) => {
      let view = previewFor(embed);
      try {
        return previewHtml(view);
      } catch (err) {
        return previewHtml(demoteOnRenderFailure(view, err));
      }
    })
    .join("\n");
}
