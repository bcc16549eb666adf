/**
 * Browser entry point. Everything here is wiring: read view data from the
 * pure modules, put it on screen, translate input events into commands.
 */

import { chainView } from "./chain.js";
import { HttpClient, ServiceError, StreamClient } from "./client.js";
import type { StreamStatus, WireSocket } from "./client.js";
import { fmt, pointLabel } from "./format.js";
import { ghostViews, targetView } from "./ghosts.js";
import { matrixPanels } from "./heatmap.js";
import { fitToViewport } from "./projection.js";
import type { Vec2 } from "./projection.js";
import { sceneFor } from "./scene.js";
import { sliderViews } from "./sliders.js";
import { SessionStore } from "./store.js";
import type { Command, ModelSummary, StateEvent } from "./wire.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const VIEW = { width: 640, height: 480, margin: 40 };

const http = new HttpClient();
const store = new SessionStore();
let stream: StreamClient | null = null;
let models: ModelSummary[] = [];
let model: ModelSummary | null = null;
let sessionId: string | null = null;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node;
}

function setBanner(text: string, kind: "info" | "error" | ""): void {
  const banner = byId("banner");
  banner.textContent = text;
  banner.dataset["kind"] = kind;
}

async function send(command: Command): Promise<void> {
  if (!sessionId) {
    return;
  }
  try {
    const response = await http.send(sessionId, command);
    store.apply(response.state);
    setBanner("", "");
  } catch (err) {
    if (err instanceof ServiceError) {
      setBanner(`${err.code}: ${err.message}`, "error");
    } else {
      setBanner(String(err), "error");
    }
  }
}

function polyline(points: Vec2[], className: string): SVGElement {
  return svgEl("polyline", {
    points: points.map(([x, y]) => `${fmt(x, 2)},${fmt(y, 2)}`).join(" "),
    class: className,
  });
}

function drawScene(event: StateEvent): void {
  const svg = byId("scene") as unknown as SVGSVGElement;
  svg.replaceChildren();
  const chain = chainView(event.frames);
  const ghosts = event.solutions ? ghostViews(event.solutions) : [];
  const target = event.solutions ? targetView(event.solutions) : null;

  const cloud: Vec2[] = [...chain.points];
  for (const ghost of ghosts) {
    cloud.push(...ghost.points);
  }
  if (target) {
    cloud.push(target.position);
  }
  const toPx = fitToViewport(cloud, VIEW);

  for (const ghost of ghosts) {
    const node = polyline(ghost.points.map(toPx), ghost.feasible ? "ghost" : "ghost infeasible");
    svg.append(node);
  }
  for (const triad of chain.triads) {
    for (const axis of ["x", "y", "z"] as const) {
      const [x1, y1] = toPx(triad.origin);
      const [x2, y2] = toPx(triad[axis]);
      svg.append(
        svgEl("line", {
          x1: `${x1}`, y1: `${y1}`, x2: `${x2}`, y2: `${y2}`,
          class: `axis axis-${axis}`,
        }),
      );
    }
  }
  svg.append(polyline(chain.points.map(toPx), "chain"));
  for (const point of chain.points) {
    const [cx, cy] = toPx(point);
    svg.append(svgEl("circle", { cx: `${cx}`, cy: `${cy}`, r: "4", class: "joint" }));
  }
  if (target) {
    const [cx, cy] = toPx(target.position);
    svg.append(
      svgEl("circle", {
        cx: `${cx}`, cy: `${cy}`, r: "6",
        class: target.reachable ? "target" : "target unreachable",
      }),
    );
  }
}

function drawSliders(event: StateEvent): void {
  const host = byId("sliders");
  host.replaceChildren();
  if (!model) {
    return;
  }
  for (const view of sliderViews(model, event)) {
    const row = el("div", { class: "slider-row" });
    row.append(el("label", {}, `${view.name} (${view.kind})`));
    const input = el("input", {
      type: "range",
      min: `${view.min}`,
      max: `${view.max}`,
      step: `${view.step}`,
      value: `${view.value}`,
    });
    input.addEventListener("input", () => {
      void send({ type: "set_joint", joint: view.joint, value: Number(input.value) });
    });
    row.append(input);
    row.append(el("span", { class: view.clamped ? "value clamped" : "value" }, view.label));
    host.append(row);
  }
}

function drawIkPanel(event: StateEvent): void {
  const host = byId("branches");
  host.replaceChildren();
  if (!event.solutions) {
    return;
  }
  const set = event.solutions;
  host.append(
    el(
      "p",
      {},
      set.reachable
        ? `target ${pointLabel(set.target.position)}: ${set.solutions.length} branch(es)`
        : `target ${pointLabel(set.target.position)} is outside the workspace`,
    ),
  );
  for (const ghost of ghostViews(set)) {
    const button = el(
      "button",
      { class: ghost.selectable ? "branch" : "branch disabled" },
      `${ghost.label}  q = ${ghost.qPartial.map((v) => fmt(v)).join(", ")}`,
    );
    button.disabled = !ghost.selectable;
    button.addEventListener("click", () => {
      void send({ type: "choose_branch", branch: ghost.branch });
    });
    host.append(button);
  }
}

function drawMatrixPanel(event: StateEvent): void {
  const host = byId("grades");
  host.replaceChildren();
  if (!event.diffs) {
    return;
  }
  for (const panel of matrixPanels(event.diffs)) {
    const card = el("div", { class: panel.passed ? "matrix passed" : "matrix failed" });
    card.append(
      el(
        "h3",
        {},
        panel.passed
          ? `matrix ${panel.index}: pass`
          : `matrix ${panel.index}: fail (max error ${fmt(panel.maxAbsError, 4)})`,
      ),
    );
    if (panel.reason) {
      card.append(el("p", { class: "reason" }, panel.reason));
    }
    const table = el("table", { class: "heatmap" });
    for (let row = 0; row < 4; row += 1) {
      const tr = el("tr");
      for (const cell of panel.cells.filter((c) => c.row === row)) {
        tr.append(el("td", { class: `cell ${cell.bucket}` }, fmt(cell.value, 3)));
      }
      table.append(tr);
    }
    card.append(table);
    host.append(card);
  }
}

function drawModeBar(event: StateEvent): void {
  const host = byId("modes");
  host.replaceChildren();
  const scene = sceneFor(event.mode);
  host.append(el("strong", {}, scene.title));
  for (const next of scene.nextModes) {
    const button = el("button", {}, sceneFor(next).title);
    button.addEventListener("click", () => {
      void send({ type: "set_mode", mode: next });
    });
    host.append(button);
  }
  byId("panel-dk").hidden = !scene.showSliders;
  byId("panel-ik").hidden = !scene.showIkPanel;
  byId("panel-validate").hidden = !scene.showMatrixPanel;
}

function render(event: StateEvent): void {
  drawScene(event);
  drawModeBar(event);
  drawSliders(event);
  drawIkPanel(event);
  drawMatrixPanel(event);
  byId("readout").textContent =
    `${event.model}  rev ${event.revision}  q = [${event.q.map((v) => fmt(v)).join(", ")}]` +
    (event.animating ? "  (moving)" : "");
}

function streamStatusLabel(status: StreamStatus): string {
  switch (status) {
    case "open":
      return "";
    case "connecting":
      return "connecting…";
    case "retrying":
      return "connection lost, retrying…";
    case "gone":
      return "session no longer exists on the server";
    case "closed":
      return "disconnected";
  }
}

async function openSession(summary: ModelSummary): Promise<void> {
  stream?.close();
  store.clear();
  model = summary;
  const created = await http.createSession(summary.name);
  sessionId = created.session_id;
  store.apply(created.state);
  stream = new StreamClient(
    sessionId,
    store,
    (url) => {
      const scheme = location.protocol === "https:" ? "wss:" : "ws:";
      // The DOM socket carries richer event types than the injected
      // interface asks for; the runtime shape is a superset.
      return new WebSocket(`${scheme}//${location.host}${url}`) as unknown as WireSocket;
    },
  );
  stream.onStatus((status) => {
    setBanner(streamStatusLabel(status), status === "open" ? "" : "info");
  });
  stream.connect();
}

async function boot(): Promise<void> {
  models = await http.listModels();
  const picker = byId("models") as HTMLSelectElement;
  for (const summary of models) {
    picker.append(el("option", { value: summary.name }, `${summary.name} (${summary.family})`));
  }
  picker.addEventListener("change", () => {
    const chosen = models.find((m) => m.name === picker.value);
    if (chosen) {
      void openSession(chosen);
    }
  });

  byId("ik-go").addEventListener("click", () => {
    const x = Number((byId("ik-x") as HTMLInputElement).value);
    const y = Number((byId("ik-y") as HTMLInputElement).value);
    const z = Number((byId("ik-z") as HTMLInputElement).value);
    void send({ type: "request_ik", target: [x, y, z] });
  });

  byId("validate-go").addEventListener("click", () => {
    const text = (byId("matrices-input") as HTMLTextAreaElement).value;
    let matrices: number[][][];
    try {
      matrices = JSON.parse(text) as number[][][];
    } catch (err) {
      setBanner(`matrices are not valid JSON: ${String(err)}`, "error");
      return;
    }
    void send({ type: "validate_matrices", matrices, mode: "factors" });
  });

  byId("reset").addEventListener("click", () => {
    void send({ type: "reset" });
  });

  store.subscribe(render);
  const first = models[0];
  if (first) {
    (byId("models") as HTMLSelectElement).value = first.name;
    await openSession(first);
  }
}

void boot().catch((err) => setBanner(String(err), "error"));
