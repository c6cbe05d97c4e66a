// Single view state for the explorer; every widget reads from here and
// writes through update(), so concurrent interactions stay consistent.

import type { Metric, TimeFormat } from "./types.js";

export interface PinnedDetail {
  id: number;
  entity: string;
  window: number;
  topic: string;
}

export interface ViewState {
  entity: string | null;
  window: number | null;
  metric: Metric;
  format: TimeFormat;
  hoverTopic: string | null;
  pinned: PinnedDetail[];
  compare: { entity: string; window: number } | null;
}

export type Listener = (state: ViewState, previous: ViewState) => void;

const INITIAL: ViewState = {
  entity: null,
  window: null,
  metric: "current",
  format: "shower",
  hoverTopic: null,
  pinned: [],
  compare: null,
};

export class Store {
  private state: ViewState = INITIAL;
  private listeners = new Set<Listener>();
  private nextPin = 1;

  get(): ViewState {
    return this.state;
  }

  update(patch: Partial<ViewState>): void {
    const previous = this.state;
    this.state = { ...previous, ...patch };
    for (const listener of this.listeners) listener(this.state, previous);
  }

  pinDetail(entity: string, window: number, topic: string): PinnedDetail {
    const pin: PinnedDetail = { id: this.nextPin++, entity, window, topic };
    this.update({ pinned: [...this.state.pinned, pin] });
    return pin;
  }

  unpinDetail(id: number): void {
    this.update({ pinned: this.state.pinned.filter((p) => p.id !== id) });
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }
}
