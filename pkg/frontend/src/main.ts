// App composition: selector controls, the main grid (optionally a
// side-by-side compare grid), the timeline with its scrubber, hover
// tooltips, and pinned drill-down overlays. All data arrives via GETs to
// the gridscope service; stale responses are discarded by token.

import { ApiClient, LatestGate } from "./api.js";
import { DetailOverlays } from "./detail.js";
import { gridPositions, renderErrorBanner, renderGrid } from "./grid.js";
import { Store } from "./state.js";
import { renderTimeline } from "./timeline.js";
import { Tooltip } from "./tooltip.js";
import { METRIC_LABELS, METRICS, TIME_FORMATS } from "./types.js";
import type { GridCellPayload, Metric, TimeFormat, TimelinePayload, WindowInfo } from "./types.js";

export interface App {
  store: Store;
  ready: Promise<void>;
}

const SKELETON = `
  <header class="controls">
    <label>entity <select data-role="entity"></select></label>
    <label>window <select data-role="window"></select></label>
    <label>metric <select data-role="metric"></select></label>
    <label>time view <select data-role="format"></select></label>
    <label class="compare-toggle">
      <input type="checkbox" data-role="compare-toggle"> compare
    </label>
    <span data-role="compare-controls" hidden>
      <label>vs entity <select data-role="compare-entity"></select></label>
      <label>vs window <select data-role="compare-window"></select></label>
    </span>
  </header>
  <main>
    <div class="panels">
      <section class="grid-panel">
        <h2 data-role="main-title"></h2>
        <div data-role="main-grid"></div>
      </section>
      <section class="grid-panel" data-role="compare-panel" hidden>
        <h2 data-role="compare-title"></h2>
        <div data-role="compare-grid"></div>
      </section>
    </div>
    <section class="timeline-panel">
      <h2>timeline</h2>
      <div data-role="timeline"></div>
    </section>
    <aside data-role="overlays" class="overlays"></aside>
  </main>
`;

function fillSelect(select: HTMLSelectElement, options: [string, string][]): void {
  select.innerHTML = "";
  for (const [value, label] of options) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = label;
    select.appendChild(option);
  }
}

function windowLabel(w: WindowInfo): string {
  return `w${w.index} (${w.start.slice(0, 10)})`;
}

export function initApp(root: HTMLElement, api: ApiClient = new ApiClient()): App {
  root.innerHTML = SKELETON;
  const pick = <T extends HTMLElement>(role: string): T => {
    const el = root.querySelector<T>(`[data-role="${role}"]`);
    if (!el) throw new Error(`missing ${role} element`);
    return el;
  };

  const entitySelect = pick<HTMLSelectElement>("entity");
  const windowSelect = pick<HTMLSelectElement>("window");
  const metricSelect = pick<HTMLSelectElement>("metric");
  const formatSelect = pick<HTMLSelectElement>("format");
  const compareToggle = pick<HTMLInputElement>("compare-toggle");
  const compareControls = pick<HTMLElement>("compare-controls");
  const compareEntity = pick<HTMLSelectElement>("compare-entity");
  const compareWindow = pick<HTMLSelectElement>("compare-window");
  const mainTitle = pick<HTMLElement>("main-title");
  const mainGrid = pick<HTMLElement>("main-grid");
  const comparePanel = pick<HTMLElement>("compare-panel");
  const compareTitle = pick<HTMLElement>("compare-title");
  const compareGrid = pick<HTMLElement>("compare-grid");
  const timelineEl = pick<HTMLElement>("timeline");
  const overlaysEl = pick<HTMLElement>("overlays");

  const store = new Store();
  const tooltip = new Tooltip(root);
  new DetailOverlays(overlaysEl, store, api);

  const gridGate = new LatestGate();
  const compareGate = new LatestGate();
  const timelineGate = new LatestGate();
  let lastTimeline: TimelinePayload | null = null;

  fillSelect(metricSelect, METRICS.map((m) => [m, METRIC_LABELS[m]]));
  fillSelect(formatSelect, TIME_FORMATS.map((f) => [f, f]));
  formatSelect.value = store.get().format;

  const onHover = (cell: GridCellPayload | null, anchor: { x: number; y: number }): void => {
    store.update({ hoverTopic: cell ? cell.topic_id : null });
    if (cell) tooltip.show(cell, anchor);
    else tooltip.hide();
  };

  const onSelect = (cell: GridCellPayload): void => {
    const { entity, window } = store.get();
    if (entity !== null && window !== null) store.pinDetail(entity, window, cell.topic_id);
  };

  async function loadMainGrid(): Promise<void> {
    const { entity, window, metric } = store.get();
    if (entity === null || window === null) return;
    const token = gridGate.issue();
    mainTitle.textContent = `${entity} · w${window} · ${METRIC_LABELS[metric]}`;
    try {
      const payload = await api.grid(entity, window, metric);
      if (!gridGate.isCurrent(token)) return;
      renderGrid(mainGrid, payload, { onHover, onSelect });
    } catch (error) {
      if (!gridGate.isCurrent(token)) return;
      renderErrorBanner(mainGrid, (error as Error).message);
    }
  }

  async function loadCompareGrid(): Promise<void> {
    const { compare, metric } = store.get();
    comparePanel.hidden = compare === null;
    if (compare === null) return;
    const token = compareGate.issue();
    compareTitle.textContent = `${compare.entity} · w${compare.window} · ${METRIC_LABELS[metric]}`;
    try {
      const payload = await api.grid(compare.entity, compare.window, metric);
      if (!compareGate.isCurrent(token)) return;
      renderGrid(compareGrid, payload, { onHover, onSelect });
    } catch (error) {
      if (!compareGate.isCurrent(token)) return;
      renderErrorBanner(compareGrid, (error as Error).message);
    }
  }

  const onScrub = (windowIndex: number): void => {
    windowSelect.value = String(windowIndex);
    store.update({ window: windowIndex });
  };

  function paintTimeline(): void {
    if (lastTimeline) {
      renderTimeline(timelineEl, lastTimeline, { onScrub }, store.get().window);
    }
  }

  async function loadTimeline(): Promise<void> {
    const { entity, metric, format } = store.get();
    if (entity === null) return;
    const token = timelineGate.issue();
    try {
      const payload = await api.timeline(entity, metric, format);
      if (!timelineGate.isCurrent(token)) return;
      lastTimeline = payload;
      paintTimeline();
    } catch (error) {
      if (!timelineGate.isCurrent(token)) return;
      renderErrorBanner(timelineEl, (error as Error).message);
    }
  }

  store.subscribe((state, previous) => {
    if (
      state.entity !== previous.entity ||
      state.window !== previous.window ||
      state.metric !== previous.metric
    ) {
      void loadMainGrid();
    }
    if (state.compare !== previous.compare || state.metric !== previous.metric) {
      void loadCompareGrid();
    }
    if (
      state.entity !== previous.entity ||
      state.metric !== previous.metric ||
      state.format !== previous.format
    ) {
      void loadTimeline();
    } else if (state.window !== previous.window) {
      paintTimeline();
    }
  });

  entitySelect.addEventListener("change", () => store.update({ entity: entitySelect.value }));
  windowSelect.addEventListener("change", () =>
    store.update({ window: Number(windowSelect.value) }),
  );
  metricSelect.addEventListener("change", () =>
    store.update({ metric: metricSelect.value as Metric }),
  );
  formatSelect.addEventListener("change", () =>
    store.update({ format: formatSelect.value as TimeFormat }),
  );

  function syncCompare(): void {
    if (compareToggle.checked) {
      compareControls.hidden = false;
      store.update({
        compare: { entity: compareEntity.value, window: Number(compareWindow.value) },
      });
    } else {
      compareControls.hidden = true;
      store.update({ compare: null });
    }
  }
  compareToggle.addEventListener("change", syncCompare);
  compareEntity.addEventListener("change", syncCompare);
  compareWindow.addEventListener("change", syncCompare);

  const ready = (async () => {
    const [entities, windows] = await Promise.all([api.entities(), api.windows()]);
    const entityOptions: [string, string][] = entities.entities.map((e) => [e, e]);
    const windowOptions: [string, string][] = windows.windows.map((w) => [
      String(w.index),
      windowLabel(w),
    ]);
    fillSelect(entitySelect, entityOptions);
    fillSelect(windowSelect, windowOptions);
    fillSelect(compareEntity, entityOptions);
    fillSelect(compareWindow, windowOptions);
    const firstEntity = entities.entities[0] ?? null;
    const lastWindow = windows.windows.length ? windows.windows.length - 1 : null;
    if (firstEntity !== null) entitySelect.value = firstEntity;
    if (lastWindow !== null) windowSelect.value = String(lastWindow);
    store.update({ entity: firstEntity, window: lastWindow });
  })();

  return { store, ready };
}

export { gridPositions };

if (typeof document !== "undefined" && document.getElementById("app")) {
  const base = (window as { GRIDSCOPE_BASE_URL?: string }).GRIDSCOPE_BASE_URL ?? "";
  initApp(document.getElementById("app") as HTMLElement, new ApiClient(base));
}
