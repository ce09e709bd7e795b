/** End-to-end acceptance: the DOM app drives the real Python backend.
 *
 * - a scripted session labels 6 oracle points via the grid wizard, sees all
 *   residuals below 1 cm, and exports files that byte-match a CLI
 *   `calibrate` run on the same session;
 * - after a forced fit failure (3 points) the view equals the server state.
 */

import { spawnSync } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import { ApiClient } from "../src/api.js";
import { AppHandles, initApp } from "../src/main.js";
import { Backend, startBackend } from "./server.js";

// pinhole oracle for a pitch-only camera (down-positive), matching the
// backend's synthetic-camera conventions
const HEIGHT = 1.778;
const PITCH = (6 * Math.PI) / 180;
const FX = 1000,
  FY = 1000,
  CU = 640,
  CV = 360;

function pixelOf(x: number, y: number): [number, number] {
  const yc = HEIGHT * Math.cos(PITCH) - y * Math.sin(PITCH);
  const zc = HEIGHT * Math.sin(PITCH) + y * Math.cos(PITCH);
  return [CU + (FX * x) / zc, CV + (FY * yc) / zc];
}

const HORIZON_V = CV - FY * Math.tan(PITCH);

function mouse(target: EventTarget, type: string, clientX: number, clientY: number): void {
  target.dispatchEvent(
    new window.MouseEvent(type, { clientX, clientY, bubbles: true, cancelable: true }),
  );
}

function clickCanvas(canvas: HTMLCanvasElement, u: number, v: number): void {
  // jsdom rects sit at the origin, so client coordinates are image
  // coordinates at the default zoom
  mouse(canvas, "mousedown", u, v);
  mouse(canvas, "mouseup", u, v);
}

function click(id: string): void {
  const node = document.getElementById(id);
  if (!node) throw new Error(`no element #${id}`);
  node.dispatchEvent(new window.MouseEvent("click", { bubbles: true }));
}

function setValue(id: string, value: string): void {
  (document.getElementById(id) as HTMLInputElement).value = value;
}

async function eventually(check: () => boolean, timeoutMs = 5000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!check()) {
    if (Date.now() > deadline) throw new Error("condition not met in time");
    await new Promise((r) => setTimeout(r, 50));
  }
}

function bootApp(base: string): AppHandles {
  document.body.innerHTML = '<div id="app"></div>';
  return initApp(document.getElementById("app")!, new ApiClient(base));
}

describe("calibration UI against the real backend", () => {
  let backend: Backend;

  beforeEach(async () => {
    backend = await startBackend();
  });

  afterEach(async () => {
    await backend.stop();
  });

  it("labels 6 oracle points via the grid wizard and exports byte-identical files", async () => {
    const app = bootApp(backend.base);
    await app.settle();
    await app.store.reload();

    setValue("wiz-origin-x", "-3");
    setValue("wiz-origin-y", "6");
    setValue("wiz-spacing-x", "3");
    setValue("wiz-spacing-y", "5");
    setValue("wiz-columns", "3");
    click("wiz-toggle");

    const planeGrid: [number, number][] = [
      [-3, 6],
      [0, 6],
      [3, 6],
      [-3, 11],
      [0, 11],
      [3, 11],
    ];
    const canvas = document.getElementById("image-canvas") as HTMLCanvasElement;
    for (const [x, y] of planeGrid) {
      const [u, v] = pixelOf(x, y);
      clickCanvas(canvas, u, v);
      await app.settle();
    }

    // the marker list mirrors the server and every residual renders < 1 cm
    const state = app.store.current;
    expect(state.session?.points.length).toBe(6);
    expect(state.session?.points.map((p) => p.plane)).toEqual(planeGrid);
    expect(state.fit).not.toBeNull();
    for (const r of state.fit!.residuals) {
      expect(r).toBeLessThan(0.01);
    }
    const rows = document.querySelectorAll("#point-list .point-row");
    expect(rows.length).toBe(6);
    const chips = document.querySelectorAll("#point-list .residual-chip");
    for (const chip of chips) {
      expect(chip.textContent).toMatch(/mm/); // sub-centimeter formatting
    }

    // hovering at the horizon reports the at-infinity state without crashing
    mouse(canvas, "mousemove", 640, HORIZON_V);
    await eventually(() =>
      (document.getElementById("hover-distance")?.textContent ?? "").includes("at infinity"),
    );

    // export, then byte-compare with a CLI calibrate run on the same session
    click("export");
    await app.settle();
    const paths = app.store.current.exportPaths;
    expect(paths).not.toBeNull();
    expect(paths!.homography).toContain(backend.outDir);

    const cliOut = join(backend.outDir, "cli_fit.json");
    const proc = spawnSync(
      "python3",
      ["-m", "planeval.cli", "calibrate", "--session", paths!.session, "--out", cliOut],
      { encoding: "utf-8" },
    );
    expect(proc.status).toBe(0);
    const exported = readFileSync(paths!.homography);
    const viaCli = readFileSync(cliOut);
    expect(exported.equals(viaCli)).toBe(true);
  });

  it("deleting a point re-renders residuals from a fresh fit", async () => {
    const app = bootApp(backend.base);
    await app.settle();
    await app.store.reload();
    const canvas = document.getElementById("image-canvas") as HTMLCanvasElement;

    setValue("wiz-origin-x", "-3");
    setValue("wiz-origin-y", "6");
    setValue("wiz-spacing-x", "3");
    setValue("wiz-spacing-y", "5");
    setValue("wiz-columns", "3");
    click("wiz-toggle");
    const grid: [number, number][] = [
      [-3, 6],
      [0, 6],
      [3, 6],
      [-3, 11],
      [0, 11],
    ];
    for (const [x, y] of grid) {
      const [u, v] = pixelOf(x, y);
      clickCanvas(canvas, u, v);
      await app.settle();
    }
    expect(app.store.current.fit?.residuals.length).toBe(5);

    const firstDelete = document.querySelector("#point-list .delete") as HTMLButtonElement;
    firstDelete.dispatchEvent(new window.MouseEvent("click", { bubbles: true }));
    await app.settle();
    expect(app.store.current.session?.points.length).toBe(4);
    expect(app.store.current.fit?.residuals.length).toBe(4);
  });

  it("forced fit failure leaves the view equal to the server session", async () => {
    const app = bootApp(backend.base);
    await app.settle();
    await app.store.reload();
    const canvas = document.getElementById("image-canvas") as HTMLCanvasElement;

    setValue("wiz-columns", "3");
    click("wiz-toggle");
    for (const [x, y] of [
      [-3, 6],
      [0, 6],
      [3, 6],
    ] as [number, number][]) {
      const [u, v] = pixelOf(x, y);
      clickCanvas(canvas, u, v);
      await app.settle();
    }

    click("fit-now");
    await app.settle();

    const notice = document.getElementById("notice")?.textContent ?? "";
    expect(notice).toContain("InsufficientPoints");

    // view state equals GET /api/session
    const server = (await (await fetch(backend.base + "/api/session")).json()) as {
      session: { points: unknown[] };
      fit: unknown;
    };
    expect(app.store.current.session?.points).toEqual(server.session.points);
    expect(app.store.current.fit).toBe(server.fit); // both null
    expect(server.session.points.length).toBe(3);
  });

  it("manual coordinate entry keeps typed data across invalid input", async () => {
    const app = bootApp(backend.base);
    await app.settle();
    await app.store.reload();
    const canvas = document.getElementById("image-canvas") as HTMLCanvasElement;

    clickCanvas(canvas, 500, 500);
    expect(document.getElementById("coord-form")?.classList.contains("hidden")).toBe(false);
    setValue("coord-x", "");
    setValue("coord-y", "6");
    click("coord-ok");
    // invalid input: surfaced inline, form still open with entered data
    expect((document.getElementById("notice")?.textContent ?? "").length).toBeGreaterThan(0);
    expect(document.getElementById("coord-form")?.classList.contains("hidden")).toBe(false);
    expect((document.getElementById("coord-y") as HTMLInputElement).value).toBe("6");

    setValue("coord-x", "2.5");
    click("coord-ok");
    await app.settle();
    await app.settle();
    expect(app.store.current.session?.points.length).toBe(1);
    expect(app.store.current.session?.points[0]?.plane).toEqual([2.5, 6]);
    expect(document.getElementById("coord-form")?.classList.contains("hidden")).toBe(true);
  });
});
