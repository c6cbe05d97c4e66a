// Hover/focus summary: ranked keywords plus the cell's value. One tooltip
// exists at a time, mirroring the single hover cell in the view state.

import { formatValue } from "./color.js";
import type { GridCellPayload } from "./types.js";

export class Tooltip {
  private element: HTMLElement;

  constructor(root: HTMLElement) {
    this.element = document.createElement("div");
    this.element.className = "tooltip";
    this.element.setAttribute("role", "tooltip");
    this.element.hidden = true;
    root.appendChild(this.element);
  }

  show(cell: GridCellPayload, anchor: { x: number; y: number }): void {
    this.element.innerHTML = "";
    const title = document.createElement("div");
    title.className = "tooltip-topic";
    title.textContent = cell.topic_id;
    const keywords = document.createElement("ol");
    keywords.className = "tooltip-keywords";
    for (const word of cell.keywords) {
      const item = document.createElement("li");
      item.textContent = word;
      keywords.appendChild(item);
    }
    const value = document.createElement("div");
    value.className = "tooltip-value";
    value.textContent = `value ${formatValue(cell.value)}`;
    this.element.append(title, keywords, value);
    this.element.style.left = `${anchor.x + 12}px`;
    this.element.style.top = `${anchor.y + 12}px`;
    this.element.hidden = false;
  }

  hide(): void {
    this.element.hidden = true;
  }

  get visible(): boolean {
    return !this.element.hidden;
  }
}
