// Payload shapes of the gridscope JSON API. Field names are part of the
// wire contract; schema_version guards against drift.

export const SCHEMA_VERSION = 1;

export const METRICS = ["current", "historical", "self_risk", "peer", "peer_risk"] as const;
export type Metric = (typeof METRICS)[number];

export const TIME_FORMATS = ["curtain", "shower"] as const;
export type TimeFormat = (typeof TIME_FORMATS)[number];

export const METRIC_LABELS: Record<Metric, string> = {
  current: "Current activity",
  historical: "Historical activity",
  self_risk: "Self risk",
  peer: "Peer activity",
  peer_risk: "Peer risk",
};

export interface WindowInfo {
  index: number;
  start: string;
  end: string;
}

export interface EntitiesPayload {
  schema_version: number;
  entities: string[];
}

export interface WindowsPayload {
  schema_version: number;
  windows: WindowInfo[];
}

export interface TopicPayload {
  schema_version: number;
  topic_id: string;
  keywords: string[];
  cell: number[];
  rank: number;
}

export interface GridCellPayload {
  x: number;
  y: number;
  z?: number;
  topic_id: string;
  keyword: string;
  keywords: string[];
  value: number;
  value_norm?: number;
}

export interface GridPayload {
  schema_version: number;
  entity: string;
  window: WindowInfo;
  metric: Metric;
  shape: number[];
  cells: GridCellPayload[];
  warning: string | null;
}

export interface DetailWindow extends WindowInfo {
  count: number;
  weight: number;
}

export interface DetailPayload {
  schema_version: number;
  entity: string;
  topic_id: string;
  keywords: string[];
  window: WindowInfo;
  windows: DetailWindow[];
}

export interface TimelinePayload {
  schema_version: number;
  entity: string;
  metric: Metric;
  format: TimeFormat;
  axis: TimeFormat;
  windows: WindowInfo[];
  values: Record<string, number>[];
  placement: Record<string, number | number[]>;
  shape: number[];
}

export function isRiskMetric(metric: Metric): boolean {
  return metric === "self_risk" || metric === "peer_risk";
}
