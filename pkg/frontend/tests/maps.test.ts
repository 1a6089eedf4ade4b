import { beforeEach, describe, expect, it } from "vitest";

import { rampBlueYellow } from "../src/scale.js";
import { defaultState } from "../src/state.js";
import { FsmView } from "../src/views/fsm.js";
import { FsmtView } from "../src/views/fsmt.js";
import { FixtureServer, mouse, Shell } from "./fixtures.js";

describe("stability map view", () => {
  let shell: Shell;
  let server: FixtureServer;

  beforeEach(async () => {
    document.body.replaceChildren();
    server = new FixtureServer();
    const api = server.install();
    shell = new Shell(new FsmView(), defaultState("fsm"), api);
    await shell.render();
  });

  it("renders the full grid and defaults to the state partition colors", () => {
    const cells = shell.queryAll<SVGRectElement>(".map-cell");
    expect(cells).toHaveLength(6);
    // units 0..2 are calm, 3..5 crisis: two distinct partition colors
    expect(new Set(cells.map((c) => c.getAttribute("fill"))).size).toBe(2);
  });

  it("switching the layer drop-down recolors by the component plane", async () => {
    const select = shell.query<HTMLSelectElement>("[data-role=layer-select]");
    select.value = "leverage";
    select.dispatchEvent(new Event("change", { bubbles: true }));
    await shell.settle();
    const cells = shell.queryAll<SVGRectElement>(".map-cell");
    // plane values 0..10 rescale to the blue-yellow ramp ends
    expect(cells[0].getAttribute("fill")).toBe(rampBlueYellow(0));
    expect(cells[5].getAttribute("fill")).toBe(rampBlueYellow(1));
    expect(shell.state.layer).toBe("leverage");
  });

  it("widening the brush lengthens a trajectory monotonically", async () => {
    shell.state = { ...shell.state, entities: ["US"], span: ["2005Q1", "2005Q3"] };
    await shell.render();
    const short = Number(shell.query(".trajectory").getAttribute("data-points"));
    shell.state = { ...shell.state, span: ["2005Q1", "2006Q3"] };
    await shell.render();
    const long = Number(shell.query(".trajectory").getAttribute("data-points"));
    expect(short).toBe(3);
    expect(long).toBe(7);
    expect(long).toBeGreaterThan(short);
  });

  it("left/right arrows step the time span", async () => {
    shell.state = { ...shell.state, span: ["2005Q2", "2006Q2"] };
    await shell.render();
    shell.query<SVGSVGElement>("[data-role=fsm-plot]")
      .dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowRight", bubbles: true }));
    await shell.settle();
    expect(shell.state.span).toEqual(["2005Q3", "2006Q3"]);
    shell.query<SVGSVGElement>("[data-role=fsm-plot]")
      .dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowLeft", bubbles: true }));
    await shell.settle();
    expect(shell.state.span).toEqual(["2005Q2", "2006Q2"]);
  });

  it("up/down arrows cycle the coloring layer", async () => {
    const plot = shell.query<SVGSVGElement>("[data-role=fsm-plot]");
    plot.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowUp", bubbles: true }));
    await shell.settle();
    expect(shell.state.layer).toBe("state:calm");
  });

  it("hovering one entity label dims the other trajectories", async () => {
    shell.state = { ...shell.state, entities: ["US", "JP"] };
    await shell.render();
    const label = shell.queryAll<SVGTextElement>(".trajectory-label")
      .find((l) => l.getAttribute("data-entity") === "US")!;
    label.dispatchEvent(mouse("mouseenter"));
    const jp = shell.queryAll<SVGGElement>(".trajectory")
      .find((g) => g.getAttribute("data-entity") === "JP")!;
    expect(jp.getAttribute("opacity")).toBe("0.15");
  });
});

describe("map-over-time view", () => {
  let shell: Shell;

  beforeEach(async () => {
    document.body.replaceChildren();
    const api = new FixtureServer().install();
    shell = new Shell(new FsmtView(), defaultState("fsmt"), api);
    await shell.render();
  });

  it("encodes cluster sizes as node heights", () => {
    const nodes = shell.queryAll<SVGRectElement>(".sotm-node");
    expect(nodes).toHaveLength(8);   // 4 slices x 2 units
    const first = nodes.find((n) => n.getAttribute("data-time") === "2005Q1"
      && n.getAttribute("data-unit") === "0")!;
    const second = nodes.find((n) => n.getAttribute("data-time") === "2005Q1"
      && n.getAttribute("data-unit") === "1")!;
    expect(Number(first.getAttribute("height")))
      .toBeGreaterThan(Number(second.getAttribute("height")));
  });

  it("toggling distorted positions moves nodes vertically only", async () => {
    const before = new Map(shell.queryAll<SVGRectElement>(".sotm-node")
      .map((n) => [`${n.getAttribute("data-time")}:${n.getAttribute("data-unit")}`,
                   [n.getAttribute("x"), n.getAttribute("y")]]));
    shell.query<HTMLButtonElement>("[data-role=distort-toggle]")
      .dispatchEvent(mouse("click"));
    await shell.settle();
    expect(shell.state.transform).toBe(true);
    let movedY = 0;
    for (const node of shell.queryAll<SVGRectElement>(".sotm-node")) {
      const key = `${node.getAttribute("data-time")}:${node.getAttribute("data-unit")}`;
      const [x0, y0] = before.get(key)!;
      expect(node.getAttribute("x")).toBe(x0);
      if (node.getAttribute("y") !== y0) movedY += 1;
    }
    expect(movedY).toBeGreaterThan(0);
  });

  it("hovering a ribbon lists the switching economies", () => {
    const ribbon = shell.queryAll<SVGPathElement>(".flow-ribbon")
      .find((r) => r.getAttribute("data-from") === "2005Q3:0"
        && r.getAttribute("data-to") === "2005Q4:0")!;
    ribbon.dispatchEvent(mouse("mouseenter", { clientX: 10, clientY: 10 }));
    const tooltip = shell.query<HTMLElement>("[data-role=tooltip]");
    expect(tooltip.textContent).toBe("DE, US");
  });

  it("a selected economy's path visits exactly one node per slice", async () => {
    shell.state = { ...shell.state, entities: ["US"] };
    await shell.render();
    const path = shell.query<SVGPolylineElement>(".entity-path");
    expect(Number(path.getAttribute("data-points"))).toBe(4);
    const xs = path.getAttribute("points")!.split(" ").map((p) => p.split(",")[0]);
    expect(new Set(xs).size).toBe(4);   // one distinct column per slice
  });
});
