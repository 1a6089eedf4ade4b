/** Bank interrelation map: the windowed co-occurrence network.
 *
 * Node radius follows occurrence count, edge darkness the log-scaled
 * co-occurrence count.  Dragging a node posts the pinned position to the
 * relax endpoint and animates everyone to the returned optimum; the time
 * brush refetches the network for the window; up/down arrows re-run the
 * layout from a fresh random seed.  Highlighting a node fills the side
 * panel with its distress-discussion share.
 */

import { el, svg, clear } from "../dom.js";
import { linearScale, rampBlueYellow } from "../scale.js";
import { MetaPayload, NetworkPayload, RelaxPayload } from "../types.js";
import { emptyMessage, timeBrush } from "../widgets.js";
import { ViewContext } from "./dashboard.js";

const WIDTH = 900;
const HEIGHT = 460;
const FRAME_W = 1000;   // server layout frame; positions rescale into the plot
const FRAME_H = 700;

export class BimView {
  private seed: number | null = null;

  async render(container: HTMLElement, ctx: ViewContext): Promise<void> {
    const { api, state } = ctx;
    const params = new URLSearchParams();
    if (state.span) {
      params.set("from", state.span[0]);
      params.set("to", state.span[1]);
    }
    if (this.seed !== null) params.set("seed", String(this.seed));
    const query = params.toString();
    const payload = await api.getLatest<NetworkPayload>(
      "bim-network", "/api/network" + (query ? `?${query}` : ""));
    if (payload === null) return;
    const meta = await api.getJson<MetaPayload>("/api/meta");

    clear(container);
    const panel = el("div", { class: "side-panel", "data-role": "bim-panel" },
      "highlight a bank for its distress share");
    const plot = svg("svg", {
      width: WIDTH, height: HEIGHT, class: "plot", "data-role": "bim-plot",
      tabindex: 0,
    });

    if (!payload.nodes.length) {
      emptyMessage(container, "no discussion in the selected window");
      container.appendChild(timeBrush(meta.times, state.span,
        (span) => ctx.update({ span })));
      return;
    }

    const sx = linearScale(0, FRAME_W, 30, WIDTH - 30);
    const sy = linearScale(0, FRAME_H, 30, HEIGHT - 30);
    const positions = new Map<string, [number, number]>();
    for (const node of payload.nodes) {
      const pin = state.pinned[node.id];
      positions.set(node.id, pin ? [pin[0], pin[1]] : [node.x, node.y]);
    }

    const edgeNodes = new Map<string, SVGLineElement>();
    for (const edge of payload.edges) {
      const [x0, y0] = positions.get(edge.a)!;
      const [x1, y1] = positions.get(edge.b)!;
      const shade = Math.round(220 - 190 * edge.darkness);
      const line = svg("line", {
        class: "net-edge", "data-a": edge.a, "data-b": edge.b,
        x1: sx(x0), y1: sy(y0), x2: sx(x1), y2: sy(y1),
        stroke: `rgb(${shade},${shade},${shade})`, "stroke-width": 1.2,
      });
      edgeNodes.set(`${edge.a}|${edge.b}`, line);
      plot.appendChild(line);
    }

    const maxCount = Math.max(...payload.nodes.map((n) => n.count));
    const circleOf = new Map<string, SVGCircleElement>();
    const labelOf = new Map<string, SVGTextElement>();

    const moveNode = (id: string, fx: number, fy: number) => {
      positions.set(id, [fx, fy]);
      const circle = circleOf.get(id)!;
      circle.setAttribute("cx", String(sx(fx)));
      circle.setAttribute("cy", String(sy(fy)));
      const label = labelOf.get(id)!;
      label.setAttribute("x", String(sx(fx) + 8));
      label.setAttribute("y", String(sy(fy) + 3));
      for (const edge of payload.edges) {
        if (edge.a !== id && edge.b !== id) continue;
        const line = edgeNodes.get(`${edge.a}|${edge.b}`)!;
        const [ax, ay] = positions.get(edge.a)!;
        const [bx, by] = positions.get(edge.b)!;
        line.setAttribute("x1", String(sx(ax)));
        line.setAttribute("y1", String(sy(ay)));
        line.setAttribute("x2", String(sx(bx)));
        line.setAttribute("y2", String(sy(by)));
      }
    };

    const relax = async (pinnedId: string, fx: number, fy: number) => {
      const body: Record<string, unknown> = {
        positions: Object.fromEntries(positions),
        pinned: { [pinnedId]: [fx, fy] },
        iterations: 40,
      };
      if (state.span) {
        body.from = state.span[0];
        body.to = state.span[1];
      }
      const out = await api.postJson<RelaxPayload>("/api/network/relax", body);
      for (const [id, [nx, ny]] of Object.entries(out.positions)) {
        moveNode(id, nx, ny);   // animate to the adjusted optimum
      }
      // the whole relaxed layout goes into the state, so the permalink
      // reproduces exactly what is on screen (relax persists nothing)
      ctx.update({ pinned: { ...state.pinned, ...out.positions } });
    };

    for (const node of payload.nodes) {
      const [fx, fy] = positions.get(node.id)!;
      const radius = 4 + (16 * node.count) / maxCount;
      const distressed = node.distress_share >= 0.5;
      const circle = svg("circle", {
        class: "net-node" + (distressed ? " distressed" : ""),
        "data-node": node.id, "data-count": node.count,
        "data-share": node.distress_share.toFixed(4),
        cx: sx(fx), cy: sy(fy), r: radius,
        fill: rampBlueYellow(0.25 + node.distress_share / 2),
        stroke: distressed ? "#c22" : "#456",
        "stroke-width": distressed ? 2.5 : 0.8,
      });
      circle.addEventListener("mouseenter", () => {
        panel.textContent =
          `${node.id}: ${(100 * node.distress_share).toFixed(1)}% of discussion ` +
          `relates to distress (${node.count} mentions)`;
        panel.setAttribute("data-node", node.id);
      });
      circle.addEventListener("mousedown", (downEvt) => {
        const down = downEvt as MouseEvent;
        const startX = down.clientX;
        const startY = down.clientY;
        let lastFx = fx;
        let lastFy = fy;
        const move = (moveEvt: Event) => {
          const m = moveEvt as MouseEvent;
          lastFx = fx + (m.clientX - startX) / ((WIDTH - 60) / FRAME_W);
          lastFy = fy + (m.clientY - startY) / ((HEIGHT - 60) / FRAME_H);
          moveNode(node.id, lastFx, lastFy);
        };
        const up = () => {
          plot.removeEventListener("mousemove", move);
          plot.removeEventListener("mouseup", up);
          if (lastFx !== fx || lastFy !== fy) void relax(node.id, lastFx, lastFy);
        };
        plot.addEventListener("mousemove", move);
        plot.addEventListener("mouseup", up);
      });
      plot.appendChild(circle);
      circleOf.set(node.id, circle);
      const label = svg("text", {
        class: "net-label", "data-node": node.id,
        x: sx(fx) + 8, y: sy(fy) + 3, "font-size": 10,
      }, node.id);
      plot.appendChild(label);
      labelOf.set(node.id, label);
    }

    // up/down arrows rerun the layout with a fresh random seed
    plot.addEventListener("keydown", (evt) => {
      const key = (evt as KeyboardEvent).key;
      if (key === "ArrowUp" || key === "ArrowDown") {
        this.seed = (this.seed ?? 0) + (key === "ArrowUp" ? 1 : -1);
        ctx.update({});
      }
    });

    container.appendChild(panel);
    container.appendChild(plot);
    container.appendChild(timeBrush(meta.times, state.span,
      (span) => ctx.update({ span })));
  }
}
