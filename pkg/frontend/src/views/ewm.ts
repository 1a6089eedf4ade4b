/** Early-warning view: probability lines, or a stacked decomposition.
 *
 * With one economy chosen the line graph becomes a stacked band chart of
 * the bias plus the named group contributions, in score space; the band
 * boundaries accumulate in group order so the top edge is exactly the
 * linear score.  Hovering a band vertex reports (contribution, group,
 * time).
 */

import { el, svg, clear } from "../dom.js";
import { linearScale, pointsAttr, seriesColor, ticks } from "../scale.js";
import { eventKey } from "../state.js";
import { EventPayload, RiskPayload } from "../types.js";
import { emptyMessage, spanIndices, timeBrush, Tooltip } from "../widgets.js";
import { ViewContext } from "./dashboard.js";

const WIDTH = 900;
const HEIGHT = 420;
const MARGIN = 48;

export class EwmView {
  async render(container: HTMLElement, ctx: ViewContext): Promise<void> {
    const { api, state } = ctx;
    const single = state.entities.length === 1 ? state.entities[0] : null;
    const path = single ? `/api/ewm?entity=${encodeURIComponent(single)}` : "/api/ewm";
    const [payload, events] = await Promise.all([
      api.getLatest<RiskPayload>("ewm", path),
      api.getJson<EventPayload[]>("/api/events"),
    ]);
    if (payload === null) return;

    clear(container);
    const allEntities = [...new Set(payload.rows.map((r) => r.entity))].sort();
    const times = [...new Set(payload.rows.map((r) => r.time))].sort();
    const keep = spanIndices(times, state.span);
    const visibleTimes = keep.map((i) => times[i]);
    const plot = svg("svg", {
      width: WIDTH, height: HEIGHT, class: "plot", "data-role": "ewm-plot",
    });
    const tooltip = new Tooltip(container);
    const sx = linearScale(0, Math.max(visibleTimes.length - 1, 1),
      MARGIN, WIDTH - MARGIN);

    if (!visibleTimes.length) {
      emptyMessage(container, "no scored rows in the selected range");
      container.appendChild(timeBrush(times, state.span, (span) => ctx.update({ span })));
      return;
    }

    if (single) {
      const byTime = new Map(payload.rows
        .filter((r) => r.entity === single && visibleTimes.includes(r.time))
        .map((r) => [r.time, r]));
      const bands = ["bias", ...payload.groups];
      // levels[j] = cumulative boundaries [0, bias, bias+c1, ...] per time
      const levels: (number[] | null)[] = visibleTimes.map((t) => {
        const row = byTime.get(t);
        if (!row) return null;
        const contributionSum = payload.groups
          .reduce((acc, g) => acc + row.contributions[g], 0);
        const out = [0, row.score - contributionSum];
        for (const g of payload.groups) out.push(out[out.length - 1] + row.contributions[g]);
        return out;
      });
      const flat = levels.flatMap((l) => l ?? []);
      if (!flat.length) {
        emptyMessage(container, "no scored rows in the selected range");
        container.appendChild(timeBrush(times, state.span, (span) => ctx.update({ span })));
        return;
      }
      const yLo = Math.min(...flat, 0);
      const yHi = Math.max(...flat, 0);
      const sy = linearScale(yLo, yHi, HEIGHT - MARGIN, MARGIN);
      for (let bi = 0; bi < bands.length; bi++) {
        const top: [number, number][] = [];
        const bottom: [number, number][] = [];
        const tops: number[] = [];
        levels.forEach((lv, j) => {
          if (!lv) return;
          top.push([sx(j), sy(lv[bi + 1])]);
          bottom.push([sx(j), sy(lv[bi])]);
          tops.push(lv[bi + 1]);
        });
        const band = svg("polygon", {
          class: "stack-band", "data-group": bands[bi],
          "data-tops": JSON.stringify(tops.map((v) => Number(v.toFixed(12)))),
          points: pointsAttr([...top, ...bottom.reverse()]),
          fill: seriesColor(bi), "fill-opacity": 0.55, stroke: "none",
        });
        plot.appendChild(band);
        levels.forEach((lv, col) => {
          if (!lv) return;
          const contribution = lv[bi + 1] - lv[bi];
          const dot = svg("circle", {
            class: "stack-dot", "data-group": bands[bi],
            "data-time": visibleTimes[col],
            "data-contribution": contribution.toFixed(6),
            cx: sx(col), cy: sy(lv[bi + 1]), r: 3, "fill-opacity": 0,
          });
          dot.addEventListener("mouseenter", (evt) => {
            tooltip.show(
              `${contribution.toFixed(2)} · ${bands[bi]} · ${visibleTimes[col]}`,
              (evt as MouseEvent).clientX, (evt as MouseEvent).clientY);
          });
          dot.addEventListener("mouseleave", () => tooltip.hide());
          plot.appendChild(dot);
        });
      }
      for (const ev of events.filter((e) => e.entity === single)) {
        const at = visibleTimes.indexOf(ev.start);
        if (at < 0) continue;
        plot.appendChild(svg("line", {
          class: "event-line", "data-event": eventKey(ev.entity, ev.start),
          x1: sx(at), x2: sx(at), y1: MARGIN, y2: HEIGHT - MARGIN,
          stroke: "#c44", "stroke-dasharray": "4 3",
        }));
      }
      for (const tick of ticks(yLo, yHi)) {
        plot.appendChild(svg("text", {
          x: MARGIN - 6, y: sy(tick) + 4, "text-anchor": "end", "font-size": 10,
        }, tick.toFixed(2)));
      }
      plot.appendChild(svg("text", {
        x: WIDTH / 2, y: 20, "text-anchor": "middle", class: "plot-title",
      }, `risk contributions: ${single}`));
    } else {
      const sy = linearScale(0, 1, HEIGHT - MARGIN, MARGIN);
      const dim = (hovered: string | null) => {
        for (const line of Array.from(plot.querySelectorAll(".prob-line"))) {
          const mine = line.getAttribute("data-entity") === hovered;
          line.setAttribute("opacity", hovered === null || mine ? "1" : "0.15");
        }
      };
      for (const entity of allEntities) {
        const pts: [number, number][] = [];
        payload.rows
          .filter((r) => r.entity === entity && visibleTimes.includes(r.time))
          .forEach((r) => pts.push([sx(visibleTimes.indexOf(r.time)), sy(r.probability)]));
        if (!pts.length) continue;
        const line = svg("polyline", {
          class: "prob-line", "data-entity": entity,
          points: pointsAttr(pts.sort((a, b) => a[0] - b[0])),
          fill: "none", stroke: seriesColor(allEntities.indexOf(entity)),
          "stroke-width": 1.3, opacity: 1,
        });
        line.addEventListener("mouseenter", () => dim(entity));
        line.addEventListener("mouseleave", () => dim(null));
        plot.appendChild(line);
      }
      for (const tick of ticks(0, 1)) {
        plot.appendChild(svg("text", {
          x: MARGIN - 6, y: sy(tick) + 4, "text-anchor": "end", "font-size": 10,
        }, tick.toFixed(1)));
      }
      plot.appendChild(svg("text", {
        x: WIDTH / 2, y: 20, "text-anchor": "middle", class: "plot-title",
      }, "systemic risk probability"));
    }
    container.appendChild(plot);
    container.appendChild(timeBrush(times, state.span, (span) => ctx.update({ span })));

    const legend = el("div", { class: "legend", "data-role": "legend" });
    for (const entity of allEntities) {
      const active = !state.entities.length || state.entities.includes(entity);
      const item = el("span", {
        class: "legend-item" + (active ? "" : " deselected"), "data-entity": entity,
      }, entity);
      item.style.color = seriesColor(allEntities.indexOf(entity));
      item.addEventListener("click", () => {
        // selecting a single economy switches line -> stacked; click again to clear
        ctx.update({ entities: state.entities.length === 1
          && state.entities[0] === entity ? [] : [entity] });
      });
      legend.appendChild(item);
    }
    container.appendChild(legend);
  }
}
