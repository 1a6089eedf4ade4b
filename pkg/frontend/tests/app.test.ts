import { beforeEach, describe, expect, it } from "vitest";

import { App } from "../src/app.js";
import { linearScale, rampBlueYellow, ticks } from "../src/scale.js";
import { stateDocument, stateFromDocument } from "../src/state.js";
import { FixtureServer } from "./fixtures.js";

async function flush(times = 20): Promise<void> {
  for (let i = 0; i < times; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

describe("app shell and permalinks", () => {
  let server: FixtureServer;

  beforeEach(() => {
    document.body.replaceChildren();
    window.location.hash = "";
    server = new FixtureServer();
  });

  it("boots into the dashboard and renders the nav", async () => {
    const api = server.install();
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new App(root, api);
    await app.boot();
    expect(root.querySelectorAll(".nav-button")).toHaveLength(5);
    expect(root.querySelector("[data-role=dashboard-plot]")).not.toBeNull();
  });

  it("every interaction refreshes the permalink; booting from it reproduces the view", async () => {
    const api = server.install();
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new App(root, api);
    await app.boot();

    app.update({ view: "ewm", entities: ["US"], span: ["2005Q2", "2006Q2"] });
    await flush();
    const token = window.location.hash.slice(1);
    expect(token.length).toBeGreaterThan(0);

    // a fresh client in a fresh DOM, booted only from the token
    document.body.replaceChildren();
    window.location.hash = `#${token}`;
    const root2 = document.createElement("div");
    document.body.appendChild(root2);
    const app2 = new App(root2, server.install());
    await app2.boot();
    expect(app2.state.view).toBe("ewm");
    expect(app2.state.entities).toEqual(["US"]);
    expect(app2.state.span).toEqual(["2005Q2", "2006Q2"]);
    // single entity selected: the stacked graph is showing
    expect(root2.querySelectorAll(".stack-band").length).toBeGreaterThan(0);
  });

  it("falls back to defaults on a garbage token", async () => {
    window.location.hash = "#not-a-real-token";
    const api = server.install();
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new App(root, api);
    await app.boot();
    expect(app.state.view).toBe("dashboard");
  });

  it("switching views keeps the shared selections", async () => {
    const api = server.install();
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new App(root, api);
    await app.boot();
    app.update({ entities: ["US", "DE"] });
    await flush();
    (root.querySelector("[data-view=fsm]") as HTMLElement).click();
    await flush();
    expect(app.state.view).toBe("fsm");
    expect(app.state.entities).toEqual(["US", "DE"]);
    expect(root.querySelectorAll(".trajectory").length).toBe(2);
  });
});

describe("state document canonicalization", () => {
  it("roundtrips through the wire shape", () => {
    const state = stateFromDocument({
      view: "bim", entities: ["A"], span: ["2005Q1", "2005Q4"],
      layer: null, transform: true, events: ["A|2005Q1"],
      pinned: { N: [1.234567, 9.876543] },
    });
    const doc = stateDocument(state);
    expect(doc.pinned).toEqual({ N: [1.23, 9.88] });
    expect(stateFromDocument(doc)).toEqual({ ...state, pinned: { N: [1.23, 9.88] } });
  });

  it("rejects unknown views", () => {
    expect(() => stateFromDocument({ view: "pie" })).toThrow();
  });
});

describe("scales", () => {
  it("linear scale maps and inverts", () => {
    const s = linearScale(0, 10, 100, 200);
    expect(s(0)).toBe(100);
    expect(s(10)).toBe(200);
    expect(s.invert(150)).toBeCloseTo(5);
  });

  it("ticks cover the domain with round steps", () => {
    const t = ticks(0, 1);
    expect(t[0]).toBeGreaterThanOrEqual(0);
    expect(t[t.length - 1]).toBeLessThanOrEqual(1);
    expect(t.length).toBeGreaterThanOrEqual(3);
    expect(ticks(5, 5)).toEqual([5]);
  });

  it("ramp endpoints are blue and yellow", () => {
    expect(rampBlueYellow(0)).toBe("rgb(40,70,200)");
    expect(rampBlueYellow(1)).toBe("rgb(245,220,50)");
    expect(rampBlueYellow(-3)).toBe(rampBlueYellow(0));
  });
});
