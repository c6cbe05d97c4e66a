// Heatmap rendering of one grid payload. Cell geometry is a pure function
// of the assignment coordinates, so switching metrics recolors cells
// without ever moving them.

import { renderLegend, riskScale, sequentialScale } from "./color.js";
import { isRiskMetric, SCHEMA_VERSION } from "./types.js";
import type { GridCellPayload, GridPayload } from "./types.js";

export interface GridCallbacks {
  onHover?: (cell: GridCellPayload | null, anchor: { x: number; y: number }) => void;
  onSelect?: (cell: GridCellPayload) => void;
}

export function renderErrorBanner(container: HTMLElement, message: string): void {
  container.innerHTML = "";
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.setAttribute("role", "alert");
  banner.textContent = message;
  container.appendChild(banner);
}

export function renderGrid(
  container: HTMLElement,
  payload: GridPayload,
  callbacks: GridCallbacks = {},
): void {
  if (payload.schema_version !== SCHEMA_VERSION) {
    renderErrorBanner(
      container,
      `incompatible server schema ${payload.schema_version} (expected ${SCHEMA_VERSION})`,
    );
    return;
  }
  container.innerHTML = "";

  const width = payload.shape[0] ?? 1;
  const height = payload.shape[1] ?? 1;
  const values = payload.cells.map((c) => c.value);
  const scale = isRiskMetric(payload.metric) ? riskScale(values) : sequentialScale(values);

  if (payload.warning) {
    const note = document.createElement("div");
    note.className = "warning-banner";
    note.textContent = payload.warning;
    container.appendChild(note);
  }

  const grid = document.createElement("div");
  grid.className = "grid";
  grid.setAttribute("role", "grid");
  grid.style.gridTemplateColumns = `repeat(${width}, 1fr)`;
  grid.style.gridTemplateRows = `repeat(${height}, 1fr)`;

  for (const cell of payload.cells) {
    const el = document.createElement("div");
    el.className = "cell";
    el.setAttribute("role", "gridcell");
    el.tabIndex = 0;
    el.dataset.topicId = cell.topic_id;
    el.dataset.x = String(cell.x);
    el.dataset.y = String(cell.y);
    el.dataset.value = String(cell.value);
    // lattice y points up; DOM rows grow downward
    el.style.gridColumnStart = String(cell.x + 1);
    el.style.gridRowStart = String(height - cell.y);
    el.style.backgroundColor = scale.color(cell.value);
    const label = document.createElement("span");
    label.className = "cell-label";
    label.textContent = cell.keyword;
    el.appendChild(label);
    el.setAttribute("aria-label", `${cell.topic_id}: ${cell.keyword}`);

    const anchorOf = (event: Event): { x: number; y: number } => {
      const mouse = event as MouseEvent;
      if (typeof mouse.clientX === "number" && (mouse.clientX || mouse.clientY)) {
        return { x: mouse.clientX, y: mouse.clientY };
      }
      const box = el.getBoundingClientRect();
      return { x: box.left + box.width, y: box.top };
    };
    el.addEventListener("mouseenter", (e) => callbacks.onHover?.(cell, anchorOf(e)));
    el.addEventListener("mouseleave", () => callbacks.onHover?.(null, { x: 0, y: 0 }));
    el.addEventListener("focus", (e) => callbacks.onHover?.(cell, anchorOf(e)));
    el.addEventListener("blur", () => callbacks.onHover?.(null, { x: 0, y: 0 }));
    el.addEventListener("click", () => callbacks.onSelect?.(cell));
    el.addEventListener("keydown", (e) => {
      if (e.key === "Enter" || e.key === " ") {
        e.preventDefault();
        callbacks.onSelect?.(cell);
      }
    });
    grid.appendChild(el);
  }

  container.appendChild(grid);
  container.appendChild(renderLegend(scale, isRiskMetric(payload.metric) ? "risk" : "activity"));
}

/** Geometry snapshot for stability checks: topic -> (x, y) in DOM order. */
export function gridPositions(container: HTMLElement): [string, string, string][] {
  return Array.from(container.querySelectorAll<HTMLElement>(".cell")).map((el) => [
    el.dataset.topicId ?? "",
    el.dataset.x ?? "",
    el.dataset.y ?? "",
  ]);
}
