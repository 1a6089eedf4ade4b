/** Risk dashboard: one indicator, every economy, time on the x axis.
 *
 * Overview first: all series drawn at once.  Zoom and filter: the time
 * brush trims the axis, legend clicks drop economies, hovering one dims
 * the rest.  Details on demand: point tooltips, event lines from the
 * drop-down, and the raw/percentile radio re-scales everything.
 */

import { Api } from "../api.js";
import { el, svg, clear, option } from "../dom.js";
import { linearScale, pointsAttr, seriesColor, ticks } from "../scale.js";
import { eventKey, toggle, ViewState } from "../state.js";
import { EventPayload, MetaPayload, PanelPayload } from "../types.js";
import { emptyMessage, spanIndices, timeBrush, Tooltip } from "../widgets.js";

const WIDTH = 900;
const HEIGHT = 420;
const MARGIN = 48;

export interface ViewContext {
  api: Api;
  state: ViewState;
  update(patch: Partial<ViewState>): void;
}

export class DashboardView {
  async render(container: HTMLElement, ctx: ViewContext): Promise<void> {
    const { api, state } = ctx;
    const meta = await api.getJson<MetaPayload>("/api/meta");
    const indicator = state.layer ?? meta.indicators[0];
    const transform = state.transform ? "percentile" : "raw";
    const [panel, events] = await Promise.all([
      api.getLatest<PanelPayload>(
        "dashboard-panel",
        `/api/cube/panel?indicator=${encodeURIComponent(indicator)}&transform=${transform}`),
      api.getJson<EventPayload[]>("/api/events"),
    ]);
    if (panel === null) return;   // a newer interaction superseded this render

    clear(container);
    const controls = el("div", { class: "controls" });
    const indicatorSelect = el("select", { "data-role": "indicator-select" });
    for (const name of meta.indicators) {
      indicatorSelect.appendChild(option(name, name, name === indicator));
    }
    indicatorSelect.addEventListener("change", () =>
      ctx.update({ layer: indicatorSelect.value }));
    controls.appendChild(indicatorSelect);

    for (const mode of ["raw", "percentile"] as const) {
      const radio = el("input", {
        type: "radio", name: "transform", value: mode,
        "data-role": `transform-${mode}`,
      }) as HTMLInputElement;
      radio.checked = transform === mode;
      radio.addEventListener("change", () =>
        ctx.update({ transform: mode === "percentile" }));
      controls.appendChild(el("label", {}, radio, mode));
    }

    const eventSelect = el("select", { "data-role": "event-select" });
    eventSelect.appendChild(option("", "add event line..."));
    for (const ev of events) {
      const key = eventKey(ev.entity, ev.start);
      eventSelect.appendChild(
        option(key, `${ev.entity} ${ev.label} (${ev.start})`, false));
    }
    eventSelect.addEventListener("change", () => {
      if (eventSelect.value) ctx.update({ events: toggle(state.events, eventSelect.value) });
    });
    controls.appendChild(eventSelect);
    container.appendChild(controls);

    const keep = spanIndices(panel.times, state.span);
    const entities = state.entities.length
      ? panel.entities.filter((e) => state.entities.includes(e))
      : panel.entities;
    if (!keep.length || !entities.length) {
      const body = el("div");
      container.appendChild(body);
      emptyMessage(body, "nothing in the selected range");
      container.appendChild(timeBrush(panel.times, state.span,
        (span) => ctx.update({ span })));
      return;
    }

    const times = keep.map((i) => panel.times[i]);
    const visible: { entity: string; pts: [number, string, number][] }[] = [];
    const observed: number[] = [];
    for (const entity of entities) {
      const row = panel.values[panel.entities.indexOf(entity)];
      const pts: [number, string, number][] = [];
      keep.forEach((ti, j) => {
        const v = row[ti];
        if (v !== null) {
          pts.push([j, panel.times[ti], v]);
          observed.push(v);
        }
      });
      visible.push({ entity, pts });
    }
    if (!observed.length) {
      const body = el("div");
      container.appendChild(body);
      emptyMessage(body, "no observations in the selected range");
      container.appendChild(timeBrush(panel.times, state.span,
        (span) => ctx.update({ span })));
      return;
    }

    const yLo = Math.min(...observed);
    const yHi = Math.max(...observed);
    const sx = linearScale(0, Math.max(times.length - 1, 1), MARGIN, WIDTH - MARGIN);
    const sy = linearScale(yLo, yHi, HEIGHT - MARGIN, MARGIN);
    const plot = svg("svg", {
      width: WIDTH, height: HEIGHT, class: "plot", "data-role": "dashboard-plot",
      "data-ymin": yLo.toFixed(6), "data-ymax": yHi.toFixed(6),
    });
    plot.appendChild(svg("line", {
      x1: MARGIN, y1: HEIGHT - MARGIN, x2: WIDTH - MARGIN, y2: HEIGHT - MARGIN,
      stroke: "#999",
    }));
    for (const tick of ticks(yLo, yHi)) {
      plot.appendChild(svg("text", {
        x: MARGIN - 6, y: sy(tick) + 4, "text-anchor": "end",
        class: "axis-label-y", "font-size": 10,
      }, tick.toPrecision(4)));
    }
    plot.appendChild(svg("text", {
      x: MARGIN, y: HEIGHT - 12, class: "axis-label-x", "font-size": 10,
    }, times[0]));
    plot.appendChild(svg("text", {
      x: WIDTH - MARGIN, y: HEIGHT - 12, "text-anchor": "end",
      class: "axis-label-x", "font-size": 10,
    }, times[times.length - 1]));

    for (const key of state.events) {
      const ev = events.find((e) => eventKey(e.entity, e.start) === key);
      if (!ev) continue;
      const at = times.indexOf(ev.start);
      if (at < 0) continue;
      plot.appendChild(svg("line", {
        class: "event-line", "data-event": key,
        x1: sx(at), x2: sx(at), y1: MARGIN, y2: HEIGHT - MARGIN,
        stroke: "#c44", "stroke-dasharray": "4 3",
      }));
      plot.appendChild(svg("text", {
        x: sx(at) + 3, y: MARGIN + 10, fill: "#c44", "font-size": 10,
      }, ev.label));
    }

    const tooltip = new Tooltip(container);
    const dim = (hovered: string | null) => {
      for (const line of Array.from(plot.querySelectorAll(".series-line"))) {
        const mine = line.getAttribute("data-entity") === hovered;
        line.setAttribute("opacity", hovered === null || mine ? "1" : "0.15");
      }
    };
    for (const { entity, pts } of visible) {
      if (!pts.length) continue;
      const color = seriesColor(panel.entities.indexOf(entity));
      const line = svg("polyline", {
        class: "series-line", "data-entity": entity,
        points: pointsAttr(pts.map(([j, , v]) => [sx(j), sy(v)] as [number, number])),
        fill: "none", stroke: color, "stroke-width": 1.5, opacity: 1,
      });
      line.addEventListener("mouseenter", () => dim(entity));
      line.addEventListener("mouseleave", () => dim(null));
      plot.appendChild(line);
      for (const [j, tlabel, v] of pts) {
        const dot = svg("circle", {
          class: "series-dot", "data-entity": entity, "data-time": tlabel,
          cx: sx(j), cy: sy(v), r: 2.5, fill: color, "fill-opacity": 0,
        });
        dot.addEventListener("mouseenter", (evt) => {
          dim(entity);
          tooltip.show(`${v.toPrecision(5)} · ${entity} · ${tlabel}`,
            (evt as MouseEvent).clientX, (evt as MouseEvent).clientY);
        });
        dot.addEventListener("mouseleave", () => {
          dim(null);
          tooltip.hide();
        });
        plot.appendChild(dot);
      }
      const label = svg("text", {
        class: "series-label", "data-entity": entity,
        x: sx(pts[pts.length - 1][0]) + 4, y: sy(pts[pts.length - 1][2]),
        fill: color, "font-size": 10,
      }, entity);
      label.addEventListener("mouseenter", () => dim(entity));
      label.addEventListener("mouseleave", () => dim(null));
      plot.appendChild(label);
    }
    container.appendChild(plot);

    container.appendChild(timeBrush(panel.times, state.span,
      (span) => ctx.update({ span })));

    const legend = el("div", { class: "legend", "data-role": "legend" });
    for (const entity of panel.entities) {
      const active = !state.entities.length || state.entities.includes(entity);
      const item = el("span", {
        class: "legend-item" + (active ? "" : " deselected"), "data-entity": entity,
      }, entity);
      item.style.color = seriesColor(panel.entities.indexOf(entity));
      item.addEventListener("click", () => {
        const base = state.entities.length ? state.entities : [...panel.entities];
        ctx.update({ entities: toggle(base, entity) });
      });
      item.addEventListener("mouseenter", () => dim(entity));
      item.addEventListener("mouseleave", () => dim(null));
      legend.appendChild(item);
    }
    container.appendChild(legend);
  }
}
