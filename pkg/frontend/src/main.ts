/** Application wiring: canvas, point list, wizard, fit controls, export.
 *
 * All displayed numbers (residuals, preview distances, fit status) are
 * echoes of server responses; the client never computes geometry locally.
 */

import { ApiClient } from "./api.js";
import { ImageCanvas } from "./canvas.js";
import { formatDistance, formatResidual, residualColor } from "./residuals.js";
import { SessionStore, ViewState } from "./state.js";
import { ApiError } from "./types.js";
import { GridWizard } from "./wizard.js";

export interface AppHandles {
  store: SessionStore;
  canvas: ImageCanvas;
  root: HTMLElement;
  /** resolves after the mutation queue drains and the view re-rendered */
  settle(): Promise<void>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

export function initApp(root: HTMLElement, api: ApiClient): AppHandles {
  const store = new SessionStore(api);

  const canvasEl = el("canvas", { id: "image-canvas", width: "960", height: "600" });
  const sidebar = el("div", { id: "sidebar" });
  root.append(canvasEl, sidebar);

  const noticeEl = el("div", { id: "notice", class: "notice" });
  const hoverEl = el("div", { id: "hover-distance" }, "hover over the road for a distance");
  const pointList = el("ul", { id: "point-list" });
  const fitStatus = el("div", { id: "fit-status" }, "no fit yet");

  // plane-coordinate entry form for manual labeling
  const coordForm = el("div", { id: "coord-form", class: "hidden" });
  const coordInfo = el("span", { id: "coord-click" }, "");
  const coordX = el("input", { id: "coord-x", type: "number", step: "any", placeholder: "x (m)" });
  const coordY = el("input", { id: "coord-y", type: "number", step: "any", placeholder: "y (m)" });
  const coordOk = el("button", { id: "coord-ok" }, "add point");
  const coordCancel = el("button", { id: "coord-cancel" }, "cancel");
  coordForm.append(coordInfo, coordX, coordY, coordOk, coordCancel);

  // grid wizard controls
  const wizardBox = el("fieldset", { id: "wizard" });
  wizardBox.append(el("legend", {}, "grid wizard"));
  const wizOriginX = el("input", { id: "wiz-origin-x", type: "number", step: "any", value: "0" });
  const wizOriginY = el("input", { id: "wiz-origin-y", type: "number", step: "any", value: "6" });
  const wizSpacingX = el("input", { id: "wiz-spacing-x", type: "number", step: "any", value: "3" });
  const wizSpacingY = el("input", { id: "wiz-spacing-y", type: "number", step: "any", value: "5" });
  const wizColumns = el("input", { id: "wiz-columns", type: "number", step: "1", value: "3" });
  const wizToggle = el("button", { id: "wiz-toggle" }, "start wizard");
  const wizStatus = el("span", { id: "wiz-status" }, "off");
  for (const [label, input] of [
    ["origin x", wizOriginX],
    ["origin y", wizOriginY],
    ["spacing x", wizSpacingX],
    ["spacing y", wizSpacingY],
    ["columns", wizColumns],
  ] as const) {
    const row = el("label", {}, label + " ");
    row.append(input);
    wizardBox.append(row);
  }
  wizardBox.append(wizToggle, wizStatus);

  const autoFitToggle = el("input", { id: "auto-fit", type: "checkbox", checked: "checked" });
  const autoFitLabel = el("label", {}, "auto-fit ");
  autoFitLabel.prepend(autoFitToggle);
  const fitButton = el("button", { id: "fit-now" }, "fit now");
  const exportButton = el("button", { id: "export" }, "export");
  const exportPaths = el("div", { id: "export-paths" });

  sidebar.append(
    noticeEl,
    hoverEl,
    coordForm,
    wizardBox,
    autoFitLabel,
    fitButton,
    exportButton,
    exportPaths,
    fitStatus,
    pointList,
  );

  const canvas = new ImageCanvas(canvasEl);
  let wizard: GridWizard | null = null;
  let pendingClick: [number, number] | null = null;

  const image = new Image();
  image.onload = () => canvas.setImage(image);
  image.src = api.imageUrl();

  function render(state: ViewState): void {
    noticeEl.textContent = state.notice ?? "";
    noticeEl.classList.toggle("visible", state.notice !== null);

    const points = state.session?.points ?? [];
    const residuals = state.fit?.residuals ?? null;
    canvas.setPoints(
      points.map((p, i) => ({
        u: p.image[0],
        v: p.image[1],
        label: String(i),
        color: residuals && residuals[i] !== undefined ? residualColor(residuals[i]!) : "#4878cf",
      })),
    );

    pointList.textContent = "";
    points.forEach((p, i) => {
      const item = el("li", { class: "point-row", "data-index": String(i) });
      const residual = residuals && residuals[i] !== undefined ? residuals[i]! : null;
      const chip = el("span", { class: "residual-chip" }, residual === null ? "-" : formatResidual(residual));
      if (residual !== null) chip.style.backgroundColor = residualColor(residual);
      item.append(
        el("span", { class: "idx" }, `#${i}`),
        el(
          "span",
          { class: "coords" },
          `px(${p.image[0].toFixed(1)}, ${p.image[1].toFixed(1)}) -> m(${p.plane[0]}, ${p.plane[1]})`,
        ),
        chip,
      );
      const del = el("button", { class: "delete", "data-index": String(i) }, "x");
      del.addEventListener("click", () => void store.deletePoint(i));
      item.append(del);
      pointList.append(item);
    });

    if (state.fit) {
      const worst = Math.max(...state.fit.residuals);
      fitStatus.textContent = `fit ok: ${state.fit.residuals.length} points, worst residual ${formatResidual(worst)}`;
    } else {
      fitStatus.textContent = points.length >= 4 ? "no current fit" : "need 4+ points to fit";
    }

    if (state.exportPaths) {
      exportPaths.textContent = `wrote ${state.exportPaths.homography} and ${state.exportPaths.session}`;
    }
  }

  store.subscribe(render);

  canvas.onImageClick = (u, v) => {
    if (wizard) {
      const plane = wizard.next();
      wizStatus.textContent = `on: ${wizard.used} placed, next -> (${wizard.planeAt(wizard.used)[0]}, ${wizard.planeAt(wizard.used)[1]})`;
      void store.addPoint([u, v], plane);
      return;
    }
    pendingClick = [u, v];
    coordInfo.textContent = `pixel (${u.toFixed(2)}, ${v.toFixed(2)})`;
    coordForm.classList.remove("hidden");
  };

  coordOk.addEventListener("click", () => {
    if (!pendingClick) return;
    if (coordX.value.trim() === "" || coordY.value.trim() === "") {
      store.showNotice("plane coordinates must be numbers");
      return; // keep entered data
    }
    const x = Number(coordX.value);
    const y = Number(coordY.value);
    if (!Number.isFinite(x) || !Number.isFinite(y)) {
      store.showNotice("plane coordinates must be numbers");
      return;
    }
    const click = pendingClick;
    void store.addPoint(click, [x, y]).then(() => {
      if (store.current.notice === null) {
        // only a confirmed add clears the form; failures keep entered data
        pendingClick = null;
        coordForm.classList.add("hidden");
        coordX.value = "";
        coordY.value = "";
      }
    });
  });

  coordCancel.addEventListener("click", () => {
    pendingClick = null;
    coordForm.classList.add("hidden");
  });

  wizToggle.addEventListener("click", () => {
    if (wizard) {
      wizard = null;
      wizToggle.textContent = "start wizard";
      wizStatus.textContent = "off";
      return;
    }
    try {
      wizard = new GridWizard({
        originX: Number(wizOriginX.value),
        originY: Number(wizOriginY.value),
        spacingX: Number(wizSpacingX.value),
        spacingY: Number(wizSpacingY.value),
        columns: Number(wizColumns.value),
      });
      wizToggle.textContent = "stop wizard";
      wizStatus.textContent = `on: 0 placed, next -> (${wizard.planeAt(0)[0]}, ${wizard.planeAt(0)[1]})`;
    } catch (err) {
      store.showNotice(String(err instanceof Error ? err.message : err));
    }
  });

  autoFitToggle.addEventListener("change", () => {
    store.autoFit = autoFitToggle.checked;
  });
  fitButton.addEventListener("click", () => void store.fitNow());
  exportButton.addEventListener("click", () => void store.exportFiles());

  let previewBusy = false;
  canvas.onHover = (u, v) => {
    if (previewBusy || store.current.fit === null) return;
    previewBusy = true;
    api
      .preview(u, v)
      .then((p) => {
        hoverEl.textContent = `(${u.toFixed(1)}, ${v.toFixed(1)}) -> ${formatDistance(p.ground_distance_m)}  plane (${p.plane[0].toFixed(2)}, ${p.plane[1].toFixed(2)})`;
      })
      .catch((err) => {
        if (err instanceof ApiError && err.code === "PointAtInfinity") {
          hoverEl.textContent = `(${u.toFixed(1)}, ${v.toFixed(1)}) -> at infinity (horizon)`;
        } else if (err instanceof ApiError && err.code === "NoFit") {
          hoverEl.textContent = "no fit yet";
        }
      })
      .finally(() => {
        previewBusy = false;
      });
  };

  void store.reload().catch((err) => {
    store.showNotice(`cannot reach backend: ${err}`);
  });

  return {
    store,
    canvas,
    root,
    async settle() {
      await store.idle();
      await Promise.resolve();
    },
  };
}

declare global {
  interface Window {
    planevalApp?: AppHandles;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.planevalApp = initApp(document.getElementById("app")!, new ApiClient(""));
}
