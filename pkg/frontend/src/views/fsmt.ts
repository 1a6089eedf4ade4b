/** Stability map over time: the alluvial representation.
 *
 * Nodes are per-quarter cluster columns, heights encode membership counts,
 * ribbon thickness the number of switching economies (hover lists them).
 * Toggling distorted mode moves nodes vertically to their data-space chain
 * positions, x stays put.  Selecting an economy highlights its path, one
 * node per time slice.  Nodes can be dragged vertically; positions live in
 * the view state so permalinks reproduce them.
 */

import { el, svg, clear } from "../dom.js";
import { pointsAttr, rampBlueYellow, seriesColor } from "../scale.js";
import { toggle } from "../state.js";
import { SotmPayload } from "../types.js";
import { emptyMessage, spanIndices, timeBrush, Tooltip } from "../widgets.js";
import { ViewContext } from "./dashboard.js";

const WIDTH = 900;
const HEIGHT = 460;
const MARGIN = 48;

export class FsmtView {
  async render(container: HTMLElement, ctx: ViewContext): Promise<void> {
    const { api, state } = ctx;
    const doc = await api.getJson<SotmPayload>("/api/sotm");
    const keep = spanIndices(doc.times, state.span);
    clear(container);
    if (!keep.length) {
      emptyMessage(container, "no time slices in the selected range");
      container.appendChild(timeBrush(doc.times, state.span,
        (span) => ctx.update({ span })));
      return;
    }

    const controls = el("div", { class: "controls" });
    const toggleBtn = el("button", { "data-role": "distort-toggle" },
      state.transform ? "grid positions" : "distorted positions");
    toggleBtn.addEventListener("click", () => ctx.update({ transform: !state.transform }));
    controls.appendChild(toggleBtn);
    container.appendChild(controls);

    const plot = svg("svg", {
      width: WIDTH, height: HEIGHT, class: "plot", "data-role": "fsmt-plot",
    });
    const tooltip = new Tooltip(container);
    const sizes = doc.flows.node_sizes;
    const maxSize = Math.max(1, ...sizes.flat());
    const sx = (j: number) =>
      MARGIN + (j * (WIDTH - 2 * MARGIN)) / Math.max(keep.length - 1, 1);
    const yOf = (t: number, unit: number): number => {
      const key = `${doc.times[t]}#${unit}`;
      if (state.pinned[key]) return state.pinned[key][1];
      const frac = state.transform
        ? doc.structural_positions[t][unit]
        : (unit + 0.5) / doc.m;
      return MARGIN + frac * (HEIGHT - 2 * MARGIN);
    };

    const nodeCenters = new Map<string, [number, number]>();
    keep.forEach((t, j) => {
      for (let unit = 0; unit < doc.m; unit++) {
        nodeCenters.set(`${t}:${unit}`, [sx(j), yOf(t, unit)]);
      }
    });

    for (const step of doc.flows.transitions) {
      const t = doc.times.indexOf(step.from_time);
      const jHere = keep.indexOf(t);
      if (jHere < 0 || !keep.includes(t + 1)) continue;
      for (const flow of step.flows) {
        const [x0, y0] = nodeCenters.get(`${t}:${flow.source}`)!;
        const [x1, y1] = nodeCenters.get(`${t + 1}:${flow.target}`)!;
        const width = 0.5 + (3.5 * flow.count) / maxSize;
        const mid = (x0 + x1) / 2;
        const ribbon = svg("path", {
          class: "flow-ribbon",
          "data-from": `${step.from_time}:${flow.source}`,
          "data-to": `${step.to_time}:${flow.target}`,
          "data-entities": flow.entities.join(","),
          d: `M ${x0 + 6} ${y0} C ${mid} ${y0} ${mid} ${y1} ${x1 - 6} ${y1}`,
          fill: "none", stroke: "#7899bb", "stroke-opacity": 0.45,
          "stroke-width": width,
        });
        ribbon.addEventListener("mouseenter", (evt) => {
          tooltip.show(`${flow.entities.join(", ")}`,
            (evt as MouseEvent).clientX, (evt as MouseEvent).clientY);
          ribbon.setAttribute("stroke-opacity", "0.9");
        });
        ribbon.addEventListener("mouseleave", () => {
          tooltip.hide();
          ribbon.setAttribute("stroke-opacity", "0.45");
        });
        plot.appendChild(ribbon);
      }
    }

    keep.forEach((t, j) => {
      for (let unit = 0; unit < doc.m; unit++) {
        const [x, y] = nodeCenters.get(`${t}:${unit}`)!;
        const height = 8 + (26 * sizes[t][unit]) / maxSize;
        const node = svg("rect", {
          class: "sotm-node", "data-time": doc.times[t], "data-unit": unit,
          x: x - 5, y: y - height / 2, width: 10, height,
          fill: rampBlueYellow(doc.coloring[t][unit]),
          stroke: "#666", "stroke-width": 0.5,
        });
        // vertical drag: remembered in state.pinned under "time#unit"
        node.addEventListener("mousedown", (downEvt) => {
          const startY = (downEvt as MouseEvent).clientY;
          const move = (moveEvt: Event) => {
            const dy = (moveEvt as MouseEvent).clientY - startY;
            node.setAttribute("y", String(y - height / 2 + dy));
          };
          const up = (upEvt: Event) => {
            plot.removeEventListener("mousemove", move);
            plot.removeEventListener("mouseup", up);
            const dy = (upEvt as MouseEvent).clientY - startY;
            if (Math.abs(dy) > 1) {
              ctx.update({ pinned: { ...state.pinned,
                [`${doc.times[t]}#${unit}`]: [x, y + dy] } });
            }
          };
          plot.addEventListener("mousemove", move);
          plot.addEventListener("mouseup", up);
        });
        plot.appendChild(node);
      }
      if (j % Math.ceil(keep.length / 16) === 0 || j === keep.length - 1) {
        plot.appendChild(svg("text", {
          x: sx(j), y: HEIGHT - 8, "text-anchor": "middle", "font-size": 9,
        }, doc.times[t]));
      }
    });

    for (const [idx, entity] of state.entities.entries()) {
      const pts: [number, number][] = [];
      for (const t of keep) {
        const unit = doc.assignments[doc.times[t]]?.[entity];
        if (unit !== undefined) pts.push(nodeCenters.get(`${t}:${unit}`)!);
      }
      if (!pts.length) continue;
      plot.appendChild(svg("polyline", {
        class: "entity-path", "data-entity": entity, "data-points": pts.length,
        points: pointsAttr(pts), fill: "none",
        stroke: seriesColor(idx), "stroke-width": 2.5, "stroke-opacity": 0.9,
      }));
    }
    container.appendChild(plot);
    container.appendChild(timeBrush(doc.times, state.span,
      (span) => ctx.update({ span })));

    const meta = await api.getJson<{ entities: string[] }>("/api/meta");
    const legend = el("div", { class: "legend", "data-role": "legend" });
    for (const entity of meta.entities) {
      const active = state.entities.includes(entity);
      const item = el("span", {
        class: "legend-item" + (active ? "" : " deselected"), "data-entity": entity,
      }, entity);
      item.addEventListener("click", () =>
        ctx.update({ entities: toggle(state.entities, entity) }));
      legend.appendChild(item);
    }
    container.appendChild(legend);
  }
}
