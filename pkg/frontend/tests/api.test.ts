import { beforeEach, describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { FixtureServer } from "./fixtures.js";

describe("api sequencing", () => {
  let server: FixtureServer;

  beforeEach(() => {
    server = new FixtureServer();
  });

  it("discards the stale response when a newer request wins the race", async () => {
    const api = server.install();
    server.delays.set("/api/ewm", 30);
    const slow = api.getLatest("chan", "/api/ewm");
    server.delays.delete("/api/ewm");
    const fast = api.getLatest("chan", "/api/ewm?entity=US");
    const [slowResult, fastResult] = await Promise.all([slow, fast]);
    expect(slowResult).toBeNull();
    expect(fastResult).not.toBeNull();
  });

  it("independent channels do not interfere", async () => {
    const api = server.install();
    const a = api.getLatest("one", "/api/meta");
    const b = api.getLatest("two", "/api/events");
    expect(await a).not.toBeNull();
    expect(await b).not.toBeNull();
  });

  it("raises ApiError with the status for missing resources", async () => {
    const api = server.install();
    await expect(api.getJson("/api/som/trajectory?entity=XX"))
      .rejects.toThrowError(ApiError);
    try {
      await api.getJson("/api/som/trajectory?entity=XX");
    } catch (err) {
      expect((err as ApiError).status).toBe(404);
    }
  });
});
