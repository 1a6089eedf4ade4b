import { beforeEach, describe, expect, it } from "vitest";

import { defaultState } from "../src/state.js";
import { DashboardView } from "../src/views/dashboard.js";
import { ENTITIES, FixtureServer, mouse, Shell, TIMES } from "./fixtures.js";

describe("dashboard view (acceptance: hover dims, brush rescales, event lines)", () => {
  let server: FixtureServer;
  let shell: Shell;

  beforeEach(async () => {
    document.body.replaceChildren();
    server = new FixtureServer();
    const api = server.install();
    shell = new Shell(new DashboardView(), defaultState("dashboard"), api);
    await shell.render();
  });

  it("draws one series line per entity", () => {
    const lines = shell.queryAll<SVGPolylineElement>(".series-line");
    expect(lines.map((l) => l.getAttribute("data-entity")).sort()).toEqual(ENTITIES);
  });

  it("hovering a series dims all other series", () => {
    const lines = shell.queryAll<SVGPolylineElement>(".series-line");
    const us = lines.find((l) => l.getAttribute("data-entity") === "US")!;
    us.dispatchEvent(mouse("mouseenter"));
    for (const line of shell.queryAll<SVGPolylineElement>(".series-line")) {
      const expected = line.getAttribute("data-entity") === "US" ? "1" : "0.15";
      expect(line.getAttribute("opacity")).toBe(expected);
    }
    us.dispatchEvent(mouse("mouseleave"));
    for (const line of shell.queryAll<SVGPolylineElement>(".series-line")) {
      expect(line.getAttribute("opacity")).toBe("1");
    }
  });

  it("hovering a legend label dims the other series too", () => {
    const item = shell.queryAll<HTMLElement>(".legend-item")
      .find((n) => n.getAttribute("data-entity") === "DE")!;
    item.dispatchEvent(mouse("mouseenter"));
    const us = shell.queryAll<SVGPolylineElement>(".series-line")
      .find((l) => l.getAttribute("data-entity") === "US")!;
    expect(us.getAttribute("opacity")).toBe("0.15");
  });

  it("brushing a time span rescales both axes to the visible data", async () => {
    const before = shell.query<SVGSVGElement>("[data-role=dashboard-plot]");
    const yMaxBefore = Number(before.getAttribute("data-ymax"));
    expect(yMaxBefore).toBe(99);   // US peaks at 99 over the full sample

    const brush = shell.query<SVGSVGElement>("[data-role=time-brush]");
    const step = (900 - 8) / (TIMES.length - 1);
    brush.dispatchEvent(mouse("mousedown", { clientX: 4 + 2 * step }));
    brush.dispatchEvent(mouse("mousemove", { clientX: 4 + 5 * step }));
    brush.dispatchEvent(mouse("mouseup", { clientX: 4 + 5 * step }));
    await shell.settle();

    expect(shell.state.span).toEqual([TIMES[2], TIMES[5]]);
    const after = shell.query<SVGSVGElement>("[data-role=dashboard-plot]");
    expect(Number(after.getAttribute("data-ymax"))).toBe(70);
    expect(Number(after.getAttribute("data-ymin"))).toBe(13);
    const labels = shell.queryAll<SVGTextElement>(".axis-label-x")
      .map((n) => n.textContent);
    expect(labels).toEqual([TIMES[2], TIMES[5]]);
  });

  it("a span outside the sample shows a message instead of crashing", async () => {
    // e.g. a permalink brushed to a range this workspace does not cover
    shell.state = { ...shell.state, span: ["1990Q1", "1990Q4"] };
    await shell.render();
    expect(shell.container.querySelector(".empty-state")).not.toBeNull();
    expect(shell.container.querySelector("[data-role=time-brush]")).not.toBeNull();
  });

  it("selecting an event adds a vertical line and stays in the permalink state", async () => {
    const select = shell.query<HTMLSelectElement>("[data-role=event-select]");
    select.value = "US|2006Q1";
    select.dispatchEvent(new Event("change", { bubbles: true }));
    await shell.settle();
    expect(shell.state.events).toEqual(["US|2006Q1"]);
    const line = shell.query<SVGLineElement>(".event-line");
    expect(line.getAttribute("data-event")).toBe("US|2006Q1");
    const x1 = Number(line.getAttribute("x1"));
    expect(x1).toBeGreaterThan(48);
    expect(x1).toBeLessThan(852);
  });

  it("switching the transform refetches percentile-scaled values", async () => {
    const radio = shell.query<HTMLInputElement>("[data-role=transform-percentile]");
    radio.checked = true;
    radio.dispatchEvent(new Event("change", { bubbles: true }));
    await shell.settle();
    expect(shell.state.transform).toBe(true);
    const plot = shell.query<SVGSVGElement>("[data-role=dashboard-plot]");
    expect(Number(plot.getAttribute("data-ymax"))).toBeLessThanOrEqual(100);
    const panelCalls = server.requests.filter((r) =>
      r.url.includes("/api/cube/panel"));
    expect(panelCalls.at(-1)!.url).toContain("transform=percentile");
  });
});
