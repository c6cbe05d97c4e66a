// Whole-app interaction tests against the fixture server: boot, hover
// summaries, click drill-down, metric switching, timeline scrubbing,
// compare mode, stale-response discard.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { gridPositions } from "../src/grid.js";
import { initApp } from "../src/main.js";
import type { App } from "../src/main.js";
import type { GridPayload } from "../src/types.js";
import { FixtureServer, flush } from "./fixture_server.js";

let server: FixtureServer;
let root: HTMLElement;

async function boot(): Promise<App> {
  server = new FixtureServer();
  server.install();
  document.body.innerHTML = "";
  root = document.createElement("div");
  document.body.appendChild(root);
  const app = initApp(root, new ApiClient());
  await app.ready;
  await flush();
  return app;
}

function mainCells(): HTMLElement[] {
  return Array.from(
    root.querySelectorAll<HTMLElement>('[data-role="main-grid"] .cell'),
  );
}

function setSelect(role: string, value: string): void {
  const select = root.querySelector<HTMLSelectElement>(`[data-role="${role}"]`)!;
  select.value = value;
  select.dispatchEvent(new Event("change"));
}

describe("explorer app", () => {
  beforeEach(async () => {
    await boot();
  });

  it("boots to the first entity and latest window with a full grid", () => {
    const expected = server.gridFixture("u01", 3, "current") as unknown as GridPayload;
    expect(mainCells().length).toBe(expected.cells.length);
    const title = root.querySelector('[data-role="main-title"]')!.textContent;
    expect(title).toContain("u01");
    expect(title).toContain("w3");
  });

  it("hover shows the ranked keywords and leaves cleanly", () => {
    const cell = mainCells()[5]!;
    const expected = (server.gridFixture("u01", 3, "current") as unknown as GridPayload).cells.find(
      (c) => c.topic_id === cell.dataset.topicId,
    )!;
    cell.dispatchEvent(new MouseEvent("mouseenter"));
    const tooltip = document.querySelector<HTMLElement>(".tooltip")!;
    expect(tooltip.hidden).toBe(false);
    const items = Array.from(tooltip.querySelectorAll("li")).map((li) => li.textContent);
    expect(items).toEqual(expected.keywords);
    cell.dispatchEvent(new MouseEvent("mouseleave"));
    expect(tooltip.hidden).toBe(true);
  });

  it("keyboard focus shows the same summary as hover", () => {
    const cell = mainCells()[2]!;
    cell.dispatchEvent(new Event("focus"));
    const tooltip = document.querySelector<HTMLElement>(".tooltip")!;
    expect(tooltip.hidden).toBe(false);
    expect(tooltip.querySelector(".tooltip-topic")!.textContent).toBe(cell.dataset.topicId);
    cell.dispatchEvent(new Event("blur"));
    expect(tooltip.hidden).toBe(true);
  });

  it("click opens a detail overlay populated from the detail endpoint", async () => {
    const cell = mainCells()[0]!;
    const topic = cell.dataset.topicId!;
    cell.click();
    await flush();
    const overlay = root.querySelector<HTMLElement>(".detail-overlay")!;
    expect(overlay.dataset.topicId).toBe(topic);
    const fixtureDetail = server.detailFixture("u01", topic);
    const rows = overlay.querySelectorAll(".detail-row");
    expect(rows.length).toBe((fixtureDetail.windows as unknown[]).length);
    expect(overlay.querySelector(".detail-keywords")!.textContent).toBe(
      (fixtureDetail.keywords as string[]).join(", "),
    );
  });

  it("a topic with no activity says so in the overlay", async () => {
    const cell = mainCells()[1]!;
    server.zeroDetailTopic = cell.dataset.topicId!;
    cell.click();
    await flush();
    expect(root.querySelector(".detail-empty")!.textContent).toContain("no recorded activity");
  });

  it("pinned overlays close independently", async () => {
    const [first, second] = [mainCells()[0]!, mainCells()[1]!];
    first.click();
    second.click();
    await flush();
    let overlays = root.querySelectorAll<HTMLElement>(".detail-overlay");
    expect(overlays.length).toBe(2);
    overlays[0]!.querySelector<HTMLElement>(".detail-close")!.click();
    await flush();
    overlays = root.querySelectorAll<HTMLElement>(".detail-overlay");
    expect(overlays.length).toBe(1);
    expect(overlays[0]!.dataset.topicId).toBe(second.dataset.topicId);
  });

  it("a failed detail fetch offers a retry that recovers", async () => {
    server.failNextDetail = true;
    mainCells()[3]!.click();
    await flush();
    const overlay = root.querySelector<HTMLElement>(".detail-overlay")!;
    expect(overlay.querySelector(".detail-error")).not.toBeNull();
    overlay.querySelector<HTMLElement>(".detail-retry")!.click();
    await flush();
    expect(overlay.querySelector(".detail-error")).toBeNull();
    expect(overlay.querySelectorAll(".detail-row").length).toBe(server.windowCount);
  });

  it("metric switching recolors but never moves cells", async () => {
    const before = gridPositions(root.querySelector('[data-role="main-grid"]')!);
    setSelect("metric", "self_risk");
    await flush();
    const after = gridPositions(root.querySelector('[data-role="main-grid"]')!);
    expect(after).toEqual(before);
  });

  it("the timeline scrubber drives the grid query (steering loop)", async () => {
    setSelect("format", "shower");
    await flush();
    const scrubber = root.querySelector<HTMLInputElement>(".scrubber")!;
    scrubber.value = "1";
    scrubber.dispatchEvent(new Event("input"));
    await flush();
    const gridRequests = server.requests.filter((r) => r.path === "/api/grid");
    expect(gridRequests.at(-1)!.params.window).toBe("1");
    const windowSelect = root.querySelector<HTMLSelectElement>('[data-role="window"]')!;
    expect(windowSelect.value).toBe("1");
    expect(root.querySelector('[data-role="main-title"]')!.textContent).toContain("w1");
  });

  it("clicking a shower multiple also steers the grid", async () => {
    setSelect("format", "shower");
    await flush();
    root.querySelector<HTMLElement>('.shower-multiple[data-window-index="2"]')!.click();
    await flush();
    const gridRequests = server.requests.filter((r) => r.path === "/api/grid");
    expect(gridRequests.at(-1)!.params.window).toBe("2");
  });

  it("compare mode renders a second grid with identical geometry", async () => {
    setSelect("compare-entity", "u02");
    setSelect("compare-window", "3");
    const toggle = root.querySelector<HTMLInputElement>('[data-role="compare-toggle"]')!;
    toggle.checked = true;
    toggle.dispatchEvent(new Event("change"));
    await flush();
    const panel = root.querySelector<HTMLElement>('[data-role="compare-panel"]')!;
    expect(panel.hidden).toBe(false);
    const main = gridPositions(root.querySelector('[data-role="main-grid"]')!);
    const compare = gridPositions(root.querySelector('[data-role="compare-grid"]')!);
    expect(compare).toEqual(main);
    expect(root.querySelector('[data-role="compare-title"]')!.textContent).toContain("u02");
  });

  it("discards stale grid responses", async () => {
    server.delayNextGrid = 20; // the self_risk response will arrive late
    setSelect("metric", "self_risk");
    setSelect("metric", "peer");
    await flush();
    await new Promise((resolve) => setTimeout(resolve, 40));
    await flush();
    const expected = server.gridFixture("u01", 3, "peer") as unknown as GridPayload;
    const domValues = new Map(
      mainCells().map((el) => [el.dataset.topicId, Number(el.dataset.value)]),
    );
    for (const cell of expected.cells) {
      expect(domValues.get(cell.topic_id)).toBe(cell.value);
    }
  });

  it("issues only GET requests for the whole session", () => {
    expect(server.requests.length).toBeGreaterThan(0);
    expect(server.requests.every((r) => r.method === "GET")).toBe(true);
  });
});
