/** SessionStore contract tests against a scripted mock backend:
 * single in-flight mutation, reconciliation after failures, auto-fit.
 */

import { ApiClient } from "../src/api.js";
import { SessionStore } from "../src/state.js";
import { SessionPayload } from "../src/types.js";

interface MockServer {
  session: SessionPayload;
  fitResult: { homography: object; residuals: number[] } | null;
  failNextMutation: boolean;
  inFlight: number;
  maxInFlight: number;
  mutationDelayMs: number;
}

function installMockFetch(server: MockServer): void {
  globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? "GET";
    const respond = (status: number, body: unknown) =>
      new Response(JSON.stringify(body), { status });

    if (url.endsWith("/api/session") && method === "GET") {
      return respond(200, {
        session: server.session,
        fit: server.fitResult,
      });
    }
    if (method === "POST" || method === "PUT" || method === "DELETE") {
      server.inFlight += 1;
      server.maxInFlight = Math.max(server.maxInFlight, server.inFlight);
      await new Promise((r) => setTimeout(r, server.mutationDelayMs));
      server.inFlight -= 1;
      if (server.failNextMutation) {
        server.failNextMutation = false;
        return respond(422, { error: "Synthetic", detail: "scripted failure" });
      }
      if (url.endsWith("/api/points") && method === "POST") {
        const body = JSON.parse(String(init?.body));
        server.session.points.push(body);
        server.fitResult = null;
        return respond(201, { index: server.session.points.length - 1 });
      }
      if (url.includes("/api/points/") && method === "DELETE") {
        const index = Number(url.split("/").pop());
        server.session.points.splice(index, 1);
        server.fitResult = null;
        return respond(200, { removed: index });
      }
      if (url.endsWith("/api/fit")) {
        if (server.session.points.length < 4) {
          return respond(422, { error: "InsufficientPoints", detail: "need 4" });
        }
        server.fitResult = {
          homography: { matrix: [], camera_height_m: 1, camera_id: "m", units: "meters" },
          residuals: server.session.points.map(() => 0.001),
        };
        return respond(200, server.fitResult);
      }
    }
    return respond(404, { error: "NotFound", detail: url });
  }) as typeof fetch;
}

function freshServer(): MockServer {
  return {
    session: {
      image_id: "mock",
      camera_height_m: 1.778,
      intrinsics: null,
      vanishing_point: null,
      points: [],
    },
    fitResult: null,
    failNextMutation: false,
    inFlight: 0,
    maxInFlight: 0,
    mutationDelayMs: 5,
  };
}

describe("SessionStore", () => {
  it("keeps at most one mutation in flight", async () => {
    const server = freshServer();
    installMockFetch(server);
    const store = new SessionStore(new ApiClient(""));
    for (let i = 0; i < 6; i++) {
      void store.addPoint([i, i], [i, 0]);
    }
    await store.idle();
    expect(server.maxInFlight).toBe(1);
    expect(store.current.session?.points.length).toBe(6);
  });

  it("reconciles the view after a failed mutation", async () => {
    const server = freshServer();
    installMockFetch(server);
    const store = new SessionStore(new ApiClient(""));
    await store.addPoint([1, 2], [3, 4]);
    server.failNextMutation = true;
    await store.addPoint([5, 6], [7, 8]);
    expect(store.current.notice).toContain("Synthetic");
    // view equals the server's session: the failed point is absent
    expect(store.current.session?.points).toEqual(server.session.points);
    expect(store.current.session?.points.length).toBe(1);
  });

  it("auto-fits once four points exist and surfaces fit errors inline", async () => {
    const server = freshServer();
    installMockFetch(server);
    const store = new SessionStore(new ApiClient(""));
    await store.addPoint([0, 0], [0, 0]);
    await store.addPoint([1, 0], [1, 0]);
    await store.addPoint([0, 1], [0, 1]);
    expect(store.current.fit).toBeNull();
    await store.addPoint([1, 1], [1, 1]);
    expect(store.current.fit).not.toBeNull();
    expect(store.current.fit?.residuals.length).toBe(4);
  });

  it("manual fit failure keeps entered points and reports the error", async () => {
    const server = freshServer();
    installMockFetch(server);
    const store = new SessionStore(new ApiClient(""));
    await store.addPoint([0, 0], [0, 0]);
    await store.fitNow();
    expect(store.current.notice).toContain("InsufficientPoints");
    expect(store.current.session?.points.length).toBe(1);
    expect(store.current.fit).toBeNull();
  });

  it("delete invalidates the fit until auto-fit restores it", async () => {
    const server = freshServer();
    installMockFetch(server);
    const store = new SessionStore(new ApiClient(""));
    for (let i = 0; i < 5; i++) await store.addPoint([i, i * i], [i, 2 * i]);
    expect(store.current.fit?.residuals.length).toBe(5);
    await store.deletePoint(0);
    expect(store.current.fit?.residuals.length).toBe(4);
    store.autoFit = false;
    await store.deletePoint(0);
    expect(store.current.fit).toBeNull();
  });
});
