// Time views: the curtain (topics on their 1-D ranks x time) and the
// shower (small-multiple 2-D grids per window). Both share one color
// scale across all windows so hot cells are comparable over time, and
// both act as a scrubber: picking a window steers the main grid view.

import { renderLegend, riskScale, sequentialScale } from "./color.js";
import { renderErrorBanner } from "./grid.js";
import { isRiskMetric, SCHEMA_VERSION } from "./types.js";
import type { TimelinePayload } from "./types.js";

export interface TimelineCallbacks {
  onScrub?: (windowIndex: number) => void;
}

function stackScale(payload: TimelinePayload) {
  const values: number[] = [];
  for (const layer of payload.values) values.push(...Object.values(layer));
  return isRiskMetric(payload.metric) ? riskScale(values) : sequentialScale(values);
}

function renderCurtain(payload: TimelinePayload, scale: ReturnType<typeof stackScale>): HTMLElement {
  const topics = Object.keys(payload.placement).sort(
    (a, b) => (payload.placement[a] as number) - (payload.placement[b] as number),
  );
  const curtain = document.createElement("div");
  curtain.className = "curtain";
  curtain.style.gridTemplateColumns = `auto repeat(${payload.windows.length}, 1fr)`;
  for (const topic of topics) {
    const label = document.createElement("span");
    label.className = "curtain-topic";
    label.textContent = topic;
    curtain.appendChild(label);
    payload.values.forEach((layer, w) => {
      const cell = document.createElement("div");
      cell.className = "cell curtain-cell";
      cell.dataset.topicId = topic;
      cell.dataset.windowIndex = String(w);
      const value = layer[topic] ?? 0;
      cell.dataset.value = String(value);
      cell.style.backgroundColor = scale.color(value);
      curtain.appendChild(cell);
    });
  }
  return curtain;
}

function renderShower(
  payload: TimelinePayload,
  scale: ReturnType<typeof stackScale>,
  callbacks: TimelineCallbacks,
  activeWindow: number | null,
): HTMLElement {
  const width = payload.shape[0] ?? 1;
  const height = payload.shape[1] ?? 1;
  const strip = document.createElement("div");
  strip.className = "shower";
  payload.windows.forEach((window, w) => {
    const multiple = document.createElement("figure");
    multiple.className = "shower-multiple";
    multiple.dataset.windowIndex = String(window.index);
    if (activeWindow === window.index) multiple.classList.add("active");
    multiple.addEventListener("click", () => callbacks.onScrub?.(window.index));

    const mini = document.createElement("div");
    mini.className = "grid mini-grid";
    mini.style.gridTemplateColumns = `repeat(${width}, 1fr)`;
    mini.style.gridTemplateRows = `repeat(${height}, 1fr)`;
    const layer = payload.values[w] ?? {};
    for (const [topic, pos] of Object.entries(payload.placement)) {
      const [x, y] = pos as number[];
      const cell = document.createElement("div");
      cell.className = "cell mini-cell";
      cell.dataset.topicId = topic;
      cell.style.gridColumnStart = String((x ?? 0) + 1);
      cell.style.gridRowStart = String(height - (y ?? 0));
      cell.style.backgroundColor = scale.color(layer[topic] ?? 0);
      mini.appendChild(cell);
    }
    const caption = document.createElement("figcaption");
    caption.textContent = `w${window.index}`;
    multiple.append(mini, caption);
    strip.appendChild(multiple);
  });
  return strip;
}

export function renderTimeline(
  container: HTMLElement,
  payload: TimelinePayload,
  callbacks: TimelineCallbacks = {},
  activeWindow: number | null = null,
): void {
  if (payload.schema_version !== SCHEMA_VERSION) {
    renderErrorBanner(
      container,
      `incompatible server schema ${payload.schema_version} (expected ${SCHEMA_VERSION})`,
    );
    return;
  }
  container.innerHTML = "";
  const scale = stackScale(payload);
  container.appendChild(
    payload.format === "curtain"
      ? renderCurtain(payload, scale)
      : renderShower(payload, scale, callbacks, activeWindow),
  );

  const scrubber = document.createElement("input");
  scrubber.type = "range";
  scrubber.className = "scrubber";
  scrubber.min = "0";
  scrubber.max = String(Math.max(payload.windows.length - 1, 0));
  scrubber.step = "1";
  if (activeWindow !== null) scrubber.value = String(activeWindow);
  scrubber.setAttribute("aria-label", "window scrubber");
  scrubber.addEventListener("input", () => callbacks.onScrub?.(Number(scrubber.value)));
  container.appendChild(scrubber);
  container.appendChild(renderLegend(scale, isRiskMetric(payload.metric) ? "risk" : "activity"));
}
