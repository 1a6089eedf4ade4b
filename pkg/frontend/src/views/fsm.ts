/** Stability map: the trained grid as a heatmap with entity trajectories.
 *
 * The layer drop-down recolors the cells by the state partition, one
 * state's probability, or any indicator's component plane (up/down arrows
 * cycle it).  Trajectories follow the brushed time span and hovering a
 * label dims the other paths.
 */

import { el, svg, clear, option } from "../dom.js";
import { rampBlueYellow, seriesColor, STATE_COLORS } from "../scale.js";
import { toggle } from "../state.js";
import { PlanePayload, SomPayload, TrajectoryPayload } from "../types.js";
import { spanIndices, timeBrush, Tooltip } from "../widgets.js";
import { ViewContext } from "./dashboard.js";

const WIDTH = 900;
const HEIGHT = 460;

export class FsmView {
  async render(container: HTMLElement, ctx: ViewContext): Promise<void> {
    const { api, state } = ctx;
    const som = await api.getJson<SomPayload>("/api/som");
    const layers: string[] = [];
    if (som.state_layer) {
      layers.push("state");
      for (const cls of som.state_layer.classes) layers.push(`state:${cls}`);
    }
    layers.push(...som.dim_names);
    const layer = state.layer && layers.includes(state.layer) ? state.layer : layers[0];

    let colors: string[];
    let legendText: string;
    if (layer === "state" && som.state_layer) {
      colors = som.state_layer.partition.map(
        (p) => STATE_COLORS[p % STATE_COLORS.length]);
      legendText = "stability states: " + som.state_layer.classes.join(", ");
    } else if (layer.startsWith("state:") && som.state_layer) {
      const ci = som.state_layer.classes.indexOf(layer.slice(6));
      colors = som.state_layer.probabilities.map((row) => rampBlueYellow(row[ci]));
      legendText = `probability of ${layer.slice(6)}`;
    } else {
      const plane = await api.getLatest<PlanePayload>(
        "fsm-plane", `/api/som/plane?indicator=${encodeURIComponent(layer)}`);
      if (plane === null) return;
      const lo = Math.min(...plane.values);
      const hi = Math.max(...plane.values);
      const span = hi - lo || 1;
      colors = plane.values.map((v) => rampBlueYellow((v - lo) / span));
      legendText = `component plane: ${layer}`;
    }

    clear(container);
    const controls = el("div", { class: "controls" });
    const layerSelect = el("select", { "data-role": "layer-select" });
    for (const name of layers) layerSelect.appendChild(option(name, name, name === layer));
    layerSelect.addEventListener("change", () => ctx.update({ layer: layerSelect.value }));
    controls.appendChild(layerSelect);
    controls.appendChild(el("span", { class: "layer-caption" }, legendText));
    container.appendChild(controls);

    const cell = Math.min((WIDTH - 40) / som.x, (HEIGHT - 40) / som.y);
    const ox = (WIDTH - cell * som.x) / 2;
    const oy = (HEIGHT - cell * som.y) / 2;
    const plot = svg("svg", {
      width: WIDTH, height: HEIGHT, class: "plot", "data-role": "fsm-plot",
      tabindex: 0,
    });
    colors.forEach((color, i) => {
      const col = i % som.x;
      const row = Math.floor(i / som.x);
      plot.appendChild(svg("rect", {
        class: "map-cell", "data-unit": i,
        x: ox + col * cell, y: oy + row * cell, width: cell, height: cell,
        fill: color, stroke: "white", "stroke-width": 1,
      }));
    });

    const tooltip = new Tooltip(container);
    const dim = (hovered: string | null) => {
      for (const node of Array.from(plot.querySelectorAll(".trajectory"))) {
        const mine = node.getAttribute("data-entity") === hovered;
        node.setAttribute("opacity", hovered === null || mine ? "1" : "0.15");
      }
    };
    const center = (c: number, r: number): [number, number] =>
      [ox + (c + 0.5) * cell, oy + (r + 0.5) * cell];

    const trajectories = await Promise.all(state.entities.map((entity) =>
      api.getJson<TrajectoryPayload>(
        `/api/som/trajectory?entity=${encodeURIComponent(entity)}`)));
    trajectories.forEach((traj, idx) => {
      const keep = spanIndices(traj.times, state.span);
      if (!keep.length) return;
      const pts = keep.map((i) => center(traj.coords[i][0], traj.coords[i][1]));
      const color = seriesColor(idx);
      const group = svg("g", {
        class: "trajectory", "data-entity": traj.entity,
        "data-points": keep.length, opacity: 1,
      });
      group.appendChild(svg("polyline", {
        points: pts.map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`).join(" "),
        fill: "none", stroke: color, "stroke-width": 2,
      }));
      keep.forEach((ti, j) => {
        const dot = svg("circle", {
          cx: pts[j][0], cy: pts[j][1], r: 3, fill: color,
          "data-time": traj.times[ti],
        });
        dot.addEventListener("mouseenter", (evt) => tooltip.show(
          `${traj.entity} · ${traj.times[ti]}`,
          (evt as MouseEvent).clientX, (evt as MouseEvent).clientY));
        dot.addEventListener("mouseleave", () => tooltip.hide());
        group.appendChild(dot);
      });
      const label = svg("text", {
        class: "trajectory-label", "data-entity": traj.entity,
        x: pts[pts.length - 1][0] + 6, y: pts[pts.length - 1][1] - 6,
        fill: color, "font-size": 11,
      }, traj.entity);
      label.addEventListener("mouseenter", () => dim(traj.entity));
      label.addEventListener("mouseleave", () => dim(null));
      group.appendChild(label);
      plot.appendChild(group);
    });

    const meta = await api.getJson<{ entities: string[]; times: string[] }>("/api/meta");
    // documented bindings: up/down cycles layers, left/right steps the span
    plot.addEventListener("keydown", (evt) => {
      const kev = evt as KeyboardEvent;
      const at = layers.indexOf(layer);
      if (kev.key === "ArrowUp") ctx.update({ layer: layers[(at + 1) % layers.length] });
      if (kev.key === "ArrowDown") {
        ctx.update({ layer: layers[(at - 1 + layers.length) % layers.length] });
      }
      if (kev.key === "ArrowLeft" || kev.key === "ArrowRight") {
        const delta = kev.key === "ArrowRight" ? 1 : -1;
        const times = meta.times;
        const [a, b] = state.span ?? [times[0], times[times.length - 1]];
        const i0 = Math.max(0, Math.min(times.indexOf(a) + delta, times.length - 1));
        const i1 = Math.max(0, Math.min(times.indexOf(b) + delta, times.length - 1));
        if (i0 <= i1) ctx.update({ span: [times[i0], times[i1]] });
      }
    });
    container.appendChild(plot);

    container.appendChild(timeBrush(meta.times, state.span,
      (span) => ctx.update({ span })));
    const legend = el("div", { class: "legend", "data-role": "legend" });
    for (const entity of meta.entities) {
      const active = state.entities.includes(entity);
      const item = el("span", {
        class: "legend-item" + (active ? "" : " deselected"), "data-entity": entity,
      }, entity);
      item.style.color = active
        ? seriesColor(state.entities.indexOf(entity)) : "#777";
      item.addEventListener("click", () =>
        ctx.update({ entities: toggle(state.entities, entity) }));
      item.addEventListener("mouseenter", () => dim(entity));
      item.addEventListener("mouseleave", () => dim(null));
      legend.appendChild(item);
    }
    container.appendChild(legend);
  }
}
