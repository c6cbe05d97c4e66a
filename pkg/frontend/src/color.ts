// Per-view color scales. Activity uses a white->blue sequential ramp over
// the view's min-max; risk anchors zero at neutral and ramps to red so a
// quiet grid stays visually quiet regardless of the maximum.

export interface ColorScale {
  color(value: number): string;
  min: number;
  max: number;
  degenerate: boolean;
}

function mix(from: [number, number, number], to: [number, number, number], t: number): string {
  const channel = (a: number, b: number) => Math.round(a + (b - a) * t);
  return `rgb(${channel(from[0], to[0])}, ${channel(from[1], to[1])}, ${channel(from[2], to[2])})`;
}

const NEUTRAL: [number, number, number] = [244, 246, 248];
const BLUE: [number, number, number] = [23, 92, 166];
const RED: [number, number, number] = [183, 28, 28];

export function sequentialScale(values: number[]): ColorScale {
  const min = values.length ? Math.min(...values) : 0;
  const max = values.length ? Math.max(...values) : 0;
  const degenerate = max === min;
  return {
    min,
    max,
    degenerate,
    color(value: number): string {
      if (degenerate) return mix(NEUTRAL, BLUE, 0);
      const t = (value - min) / (max - min);
      return mix(NEUTRAL, BLUE, Math.max(0, Math.min(1, t)));
    },
  };
}

export function riskScale(values: number[]): ColorScale {
  const max = values.length ? Math.max(...values) : 0;
  const degenerate = max === 0;
  return {
    min: 0,
    max,
    degenerate,
    color(value: number): string {
      if (degenerate) return mix(NEUTRAL, RED, 0);
      const t = value / max;
      return mix(NEUTRAL, RED, Math.max(0, Math.min(1, t)));
    },
  };
}

export function formatValue(value: number): string {
  if (Number.isInteger(value)) return String(value);
  return value.toPrecision(3);
}

export function renderLegend(scale: ColorScale, kind: "activity" | "risk"): HTMLElement {
  const legend = document.createElement("div");
  legend.className = "legend";
  const bar = document.createElement("span");
  bar.className = `legend-bar legend-${kind}`;
  const label = document.createElement("span");
  label.className = "legend-label";
  label.textContent = scale.degenerate
    ? `all values ${formatValue(scale.min)}`
    : `${formatValue(scale.min)} → ${formatValue(scale.max)}`;
  legend.append(bar, label);
  return legend;
}
