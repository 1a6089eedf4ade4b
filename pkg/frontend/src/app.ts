/** App shell: view switching and permalink synchronization.
 *
 * The URL fragment always carries a token for the current state, so any
 * moment of interaction is shareable; booting from a fragment reproduces
 * the exact view.  State changes re-render the active view and mint a new
 * token in the background.
 */

import { Api } from "./api.js";
import { el, clear } from "./dom.js";
import { defaultState, VIEW_IDS, ViewId, ViewState } from "./state.js";
import { BimView } from "./views/bim.js";
import { DashboardView, ViewContext } from "./views/dashboard.js";
import { EwmView } from "./views/ewm.js";
import { FsmView } from "./views/fsm.js";
import { FsmtView } from "./views/fsmt.js";

const VIEW_LABELS: Record<ViewId, string> = {
  dashboard: "Risk dashboard",
  ewm: "Early-warning model",
  fsm: "Stability map",
  fsmt: "Map over time",
  bim: "Interrelation map",
};

export class App {
  state: ViewState = defaultState();
  private views = {
    dashboard: new DashboardView(),
    ewm: new EwmView(),
    fsm: new FsmView(),
    fsmt: new FsmtView(),
    bim: new BimView(),
  };
  private nav: HTMLElement;
  private body: HTMLElement;
  private renderEpoch = 0;

  constructor(root: HTMLElement, private api: Api) {
    this.nav = el("nav", { class: "nav", "data-role": "nav" });
    this.body = el("main", { class: "view-body", "data-role": "view-body" });
    root.append(this.nav, this.body);
  }

  async boot(): Promise<void> {
    const token = window.location.hash.replace(/^#/, "");
    if (token) {
      try {
        this.state = await this.api.decodeState(token);
      } catch {
        this.state = defaultState();
      }
    }
    await this.renderAll();
  }

  /** Apply a state patch, re-render, and refresh the permalink token. */
  update = (patch: Partial<ViewState>): void => {
    this.state = { ...this.state, ...patch };
    void this.renderAll();
    void this.api.encodeState(this.state)
      .then((token) => {
        window.history.replaceState(null, "", `#${token}`);
      })
      .catch(() => undefined);
  };

  switchView(view: ViewId): void {
    this.update({ view });
  }

  private async renderAll(): Promise<void> {
    const epoch = ++this.renderEpoch;
    clear(this.nav);
    for (const view of VIEW_IDS) {
      const button = el("button", {
        class: "nav-button" + (view === this.state.view ? " active" : ""),
        "data-view": view,
      }, VIEW_LABELS[view]);
      button.addEventListener("click", () => this.switchView(view));
      this.nav.appendChild(button);
    }
    const container = el("div", { class: `view view-${this.state.view}` });
    const ctx: ViewContext = { api: this.api, state: this.state, update: this.update };
    try {
      await this.views[this.state.view].render(container, ctx);
    } catch (err) {
      clear(container);
      container.appendChild(el("div", { class: "error-state" },
        `failed to load view: ${String(err)}`));
    }
    if (epoch !== this.renderEpoch) return;   // superseded by a newer update
    clear(this.body);
    this.body.appendChild(container);
  }
}
