/** Fetch layer with per-channel request sequencing.
 *
 * Interactions can fire faster than responses arrive; each logical channel
 * (one per payload a view renders) tracks its latest request number and
 * discards anything stale, so the last user action always wins.
 */

import { stateDocument, stateFromDocument, ViewState } from "./state.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class Api {
  private sequence = new Map<string, number>();
  private controllers = new Map<string, AbortController>();

  constructor(private base = "") {}

  async getJson<T>(path: string, signal?: AbortSignal): Promise<T> {
    const response = await fetch(this.base + path, { signal });
    if (!response.ok) throw new ApiError(response.status, await response.text());
    return (await response.json()) as T;
  }

  async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw new ApiError(response.status, await response.text());
    return (await response.json()) as T;
  }

  /**
   * Sequenced GET: resolves null when a newer request has started on the
   * same channel (the stale response must be dropped, not rendered).
   */
  async getLatest<T>(channel: string, path: string): Promise<T | null> {
    const seq = (this.sequence.get(channel) ?? 0) + 1;
    this.sequence.set(channel, seq);
    this.controllers.get(channel)?.abort();
    const controller = new AbortController();
    this.controllers.set(channel, controller);
    let payload: T;
    try {
      payload = await this.getJson<T>(path, controller.signal);
    } catch (err) {
      if (this.sequence.get(channel) !== seq) return null;
      throw err;
    }
    return this.sequence.get(channel) === seq ? payload : null;
  }

  async encodeState(state: ViewState): Promise<string> {
    const out = await this.postJson<{ token: string }>("/api/state", stateDocument(state));
    return out.token;
  }

  async decodeState(token: string): Promise<ViewState> {
    const doc = await this.getJson<Record<string, unknown>>(`/api/state/${token}`);
    return stateFromDocument(doc);
  }
}
