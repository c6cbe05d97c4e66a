import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient, ApiError, LatestGate } from "../src/api.js";
import { FixtureServer } from "./fixture_server.js";

describe("LatestGate", () => {
  it("treats only the newest token as current", () => {
    const gate = new LatestGate();
    const first = gate.issue();
    const second = gate.issue();
    expect(gate.isCurrent(first)).toBe(false);
    expect(gate.isCurrent(second)).toBe(true);
  });
});

describe("ApiClient", () => {
  let server: FixtureServer;
  let api: ApiClient;

  beforeEach(() => {
    server = new FixtureServer();
    server.install();
    api = new ApiClient();
  });

  it("fetches typed payloads", async () => {
    const entities = await api.entities();
    expect(entities.entities).toEqual(server.entityIds);
    const grid = await api.grid("u01", 1, "current");
    expect(grid.metric).toBe("current");
    expect(grid.cells.length).toBe(16);
    const detail = await api.detail("u01", 1, "t03");
    expect(detail.windows.length).toBe(server.windowCount);
  });

  it("encodes query parameters", async () => {
    await api.grid("u01", 2, "peer_risk");
    const last = server.requests.at(-1)!;
    expect(last.path).toBe("/api/grid");
    expect(last.params).toEqual({ entity: "u01", window: "2", metric: "peer_risk" });
  });

  it("surfaces the server's error message", async () => {
    await expect(api.grid("ghost", 1, "current")).rejects.toThrowError(ApiError);
    await expect(api.grid("ghost", 1, "current")).rejects.toThrowError(/ghost/);
  });

  it("issues only GET requests", async () => {
    await api.entities();
    await api.windows();
    await api.timeline("u02", "self_risk", "shower");
    expect(server.requests.every((r) => r.method === "GET")).toBe(true);
  });
});
