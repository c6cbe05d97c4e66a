// Pinned drill-down overlays. Each pin fetches /api/detail independently;
// a failed fetch keeps the overlay with a retry button instead of
// dropping it.

import type { ApiClient } from "./api.js";
import { formatValue } from "./color.js";
import type { PinnedDetail, Store } from "./state.js";
import type { DetailPayload } from "./types.js";

export class DetailOverlays {
  constructor(
    private readonly root: HTMLElement,
    private readonly store: Store,
    private readonly api: ApiClient,
  ) {
    store.subscribe((state, previous) => {
      if (state.pinned !== previous.pinned) this.sync(state.pinned);
    });
  }

  private sync(pinned: PinnedDetail[]): void {
    const wanted = new Set(pinned.map((p) => String(p.id)));
    for (const el of Array.from(this.root.children) as HTMLElement[]) {
      if (!wanted.has(el.dataset.pinId ?? "")) el.remove();
    }
    const present = new Set(
      (Array.from(this.root.children) as HTMLElement[]).map((el) => el.dataset.pinId),
    );
    for (const pin of pinned) {
      if (!present.has(String(pin.id))) this.root.appendChild(this.createOverlay(pin));
    }
  }

  private createOverlay(pin: PinnedDetail): HTMLElement {
    const overlay = document.createElement("section");
    overlay.className = "detail-overlay";
    overlay.dataset.pinId = String(pin.id);
    overlay.dataset.topicId = pin.topic;

    const header = document.createElement("header");
    const title = document.createElement("span");
    title.className = "detail-title";
    title.textContent = `${pin.entity} · ${pin.topic}`;
    const close = document.createElement("button");
    close.className = "detail-close";
    close.type = "button";
    close.textContent = "×";
    close.setAttribute("aria-label", `close ${pin.topic} detail`);
    close.addEventListener("click", () => this.store.unpinDetail(pin.id));
    header.append(title, close);
    overlay.appendChild(header);

    const body = document.createElement("div");
    body.className = "detail-body";
    body.textContent = "loading…";
    overlay.appendChild(body);

    void this.load(pin, body);
    return overlay;
  }

  private async load(pin: PinnedDetail, body: HTMLElement): Promise<void> {
    try {
      const detail = await this.api.detail(pin.entity, pin.window, pin.topic);
      this.renderDetail(detail, body);
    } catch (error) {
      body.innerHTML = "";
      const message = document.createElement("div");
      message.className = "detail-error";
      message.textContent = `failed to load detail: ${(error as Error).message}`;
      const retry = document.createElement("button");
      retry.type = "button";
      retry.className = "detail-retry";
      retry.textContent = "retry";
      retry.addEventListener("click", () => {
        body.textContent = "loading…";
        void this.load(pin, body);
      });
      body.append(message, retry);
    }
  }

  private renderDetail(detail: DetailPayload, body: HTMLElement): void {
    body.innerHTML = "";
    const keywords = document.createElement("div");
    keywords.className = "detail-keywords";
    keywords.textContent = detail.keywords.join(", ");
    body.appendChild(keywords);

    const total = detail.windows.reduce((sum, w) => sum + w.count, 0);
    if (total === 0) {
      const empty = document.createElement("div");
      empty.className = "detail-empty";
      empty.textContent = "no recorded activity for this topic";
      body.appendChild(empty);
      return;
    }

    const maxWeight = Math.max(...detail.windows.map((w) => w.weight));
    const list = document.createElement("div");
    list.className = "detail-breakdown";
    for (const w of detail.windows) {
      const row = document.createElement("div");
      row.className = "detail-row";
      row.dataset.windowIndex = String(w.index);
      const label = document.createElement("span");
      label.className = "detail-window";
      label.textContent = `w${w.index}`;
      const bar = document.createElement("span");
      bar.className = "detail-bar";
      bar.style.width = maxWeight > 0 ? `${(w.weight / maxWeight) * 100}%` : "0%";
      const count = document.createElement("span");
      count.className = "detail-count";
      count.textContent = `${w.count} events (${formatValue(w.weight)})`;
      row.append(label, bar, count);
      list.appendChild(row);
    }
    body.appendChild(list);
  }
}
