/** App shell: poll the API, render the queue and progress panel, submit answers. */

import { ApiClient, ApiError, SubmitGuard, type Answer } from "./api.js";
import { renderError, renderQueue, renderState } from "./render.js";

const POLL_INTERVAL_MS = 2000;

export function startApp(root: Document, client: ApiClient = new ApiClient()): void {
  const queueEl = root.getElementById("queue");
  const progressEl = root.getElementById("progress");
  const bannerEl = root.getElementById("banner");
  if (!queueEl || !progressEl || !bannerEl) {
    throw new Error("missing #queue, #progress or #banner containers");
  }
  const guard = new SubmitGuard();

  async function refresh(): Promise<void> {
    try {
      const [pending, state] = await Promise.all([client.fetchPending(), client.fetchState()]);
      bannerEl!.innerHTML = "";
      queueEl!.innerHTML = renderQueue(pending);
      progressEl!.innerHTML = renderState(state);
    } catch (err) {
      bannerEl!.innerHTML = renderError(err instanceof Error ? err.message : String(err));
    }
  }

  queueEl.addEventListener("click", (event) => {
    const target = event.target as HTMLElement | null;
    const button = target?.closest("button.answer") as HTMLButtonElement | null;
    if (!button) {
      return;
    }
    const id = button.dataset.id ?? "";
    const answer = (button.dataset.answer ?? "dont_know") as Answer;
    if (!guard.begin(id)) {
      return; // an answer for this card is already on its way
    }
    const card = button.closest("article.card");
    card?.querySelectorAll("button").forEach((b) => ((b as HTMLButtonElement).disabled = true));
    client
      .submitAnswer(id, answer)
      .then(() => {
        card?.remove();
      })
      .catch((err) => {
        if (err instanceof ApiError && err.status === 404) {
          // answered elsewhere; drop the stale card
          card?.remove();
        } else {
          card?.querySelectorAll("button").forEach(
            (b) => ((b as HTMLButtonElement).disabled = false),
          );
        }
      })
      .finally(() => {
        guard.end(id);
        void refresh();
      });
  });

  void refresh();
  setInterval(() => void refresh(), POLL_INTERVAL_MS);
}

if (typeof document !== "undefined") {
  startApp(document);
}
