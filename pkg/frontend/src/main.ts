/** Browser entry point: wires the tested modules to the page.
 *
 * One poll timer keeps the controller in sync with the service; a
 * requestAnimationFrame loop re-draws the clip player.  Everything with
 * logic worth testing lives in the imported modules.
 */

import { HttpApi, type SamplePayload } from "./api.js";
import { SessionController } from "./controller.js";
import { drawChart } from "./chart.js";
import {
  classColor,
  drawScatter,
  nearestPoint,
  scatterFit,
  scatterPoints,
  type ScatterPoint,
} from "./embedding.js";
import { keyAction } from "./keyboard.js";
import { drawFrame, frameAt, fitTransform, frameBounds, PlayerClock, type Fit } from "./playback.js";

const api = new HttpApi("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const sessionSelect = el<HTMLSelectElement>("session-select");
const createForm = el<HTMLFormElement>("create-form");
const phasePill = el<HTMLSpanElement>("phase-pill");
const progressText = el<HTMLSpanElement>("progress-text");
const noteText = el<HTMLSpanElement>("note-text");
const playerCanvas = el<HTMLCanvasElement>("player-canvas");
const playerTitle = el<HTMLDivElement>("player-title");
const labelBar = el<HTMLDivElement>("label-bar");
const queueList = el<HTMLUListElement>("queue-list");
const submitBtn = el<HTMLButtonElement>("submit-btn");
const embeddingCanvas = el<HTMLCanvasElement>("embedding-canvas");
const legendDiv = el<HTMLDivElement>("legend");
const chartCanvas = el<HTMLCanvasElement>("chart-canvas");

const playerCtx = playerCanvas.getContext("2d")!;
const embeddingCtx = embeddingCanvas.getContext("2d")!;
const chartCtx = chartCanvas.getContext("2d")!;

let controller: SessionController | null = null;
const clock = new PlayerClock(0);
const sampleCache = new Map<string, SamplePayload>();
let shownSampleId: string | null = null;
let shownSample: SamplePayload | null = null;
let playerFit: Fit | null = null;
let points: ScatterPoint[] = [];
let embeddingFit: Fit | null = null;
let busy = false;

function setNote(text: string, isError = false): void {
  noteText.textContent = text;
  noteText.className = isError ? "note error" : "note";
}

async function refreshSessions(): Promise<void> {
  const ids = await api.listSessions();
  const current = sessionSelect.value;
  sessionSelect.innerHTML = "";
  for (const id of ids) {
    const opt = document.createElement("option");
    opt.value = id;
    opt.textContent = id;
    sessionSelect.appendChild(opt);
  }
  if (ids.includes(current)) sessionSelect.value = current;
  else if (ids.length > 0) selectSession(sessionSelect.value);
}

function selectSession(id: string): void {
  if (!id) return;
  controller = new SessionController(api, id);
  sampleCache.clear();
  shownSampleId = null;
  shownSample = null;
  points = [];
  setNote("");
  void tick();
}

function renderLabelBar(): void {
  const names = controller?.status?.class_names ?? [];
  labelBar.innerHTML = "";
  names.forEach((name, i) => {
    const btn = document.createElement("button");
    btn.className = "class-btn";
    btn.style.borderColor = classColor(i);
    btn.textContent = `${i + 1} ${name}`;
    btn.onclick = () => stageLabel(i);
    labelBar.appendChild(btn);
  });
  legendDiv.innerHTML = "";
  names.forEach((name, i) => {
    const item = document.createElement("span");
    item.className = "legend-item";
    item.innerHTML = `<i style="background:${classColor(i)}"></i>${name}`;
    legendDiv.appendChild(item);
  });
}

function renderQueue(): void {
  const c = controller;
  queueList.innerHTML = "";
  if (!c) return;
  const names = c.status?.class_names ?? [];
  c.queriedIds.forEach((id, i) => {
    const item = document.createElement("li");
    const staged = c.labelOf(id);
    item.textContent = staged === undefined ? id : `${id} = ${names[staged] ?? staged}`;
    item.className = i === c.cursor ? "current" : staged !== undefined ? "done" : "";
    item.onclick = () => {
      c.moveTo(id);
      renderAll();
    };
    queueList.appendChild(item);
  });
  submitBtn.disabled = !c.complete || busy;
  submitBtn.textContent = c.batch
    ? `submit ${c.stagedCount}/${c.queriedIds.length}`
    : "submit";
}

function renderStatus(): void {
  const s = controller?.status;
  if (!s) {
    phasePill.textContent = "no session";
    phasePill.dataset.phase = "";
    progressText.textContent = "";
    return;
  }
  phasePill.textContent = s.phase.replace("_", " ");
  phasePill.dataset.phase = s.phase;
  progressText.textContent =
    `${s.labeled_count}/${s.pool_size} labeled  round ${s.iteration}  strategy ${s.strategy}`;
  if (s.phase === "error" && s.last_error) setNote(s.last_error, true);
}

async function showSample(id: string | null): Promise<void> {
  if (id === null || controller === null) {
    shownSampleId = null;
    shownSample = null;
    playerTitle.textContent = "no sample";
    return;
  }
  if (id === shownSampleId) return;
  shownSampleId = id;
  let payload = sampleCache.get(id);
  if (!payload) {
    payload = await api.sample(controller.sessionId, id);
    sampleCache.set(id, payload);
  }
  if (shownSampleId !== id) return; // superseded while fetching
  shownSample = payload;
  playerFit = fitTransform(frameBounds(payload.frames_2d), playerCanvas.width, playerCanvas.height);
  clock.reset(payload.num_frames);
  const c = controller;
  playerTitle.textContent = `${id}  (${c.cursor + 1}/${c.queriedIds.length})`;
}

function renderEmbedding(): void {
  if (!embeddingFit) return;
  drawScatter(embeddingCtx, points, embeddingFit, controller?.currentId ?? null);
}

async function refreshEmbedding(): Promise<void> {
  if (!controller) return;
  try {
    const view = await api.embedding(controller.sessionId);
    points = scatterPoints(view);
    embeddingFit = scatterFit(points, embeddingCanvas.width, embeddingCanvas.height);
  } catch {
    return; // not available during training phases
  }
  renderEmbedding();
}

async function refreshChart(): Promise<void> {
  if (!controller) return;
  const records = await api.history(controller.sessionId);
  drawChart(chartCtx, records, chartCanvas.width, chartCanvas.height);
}

function renderAll(): void {
  renderStatus();
  renderQueue();
  renderEmbedding();
  void showSample(controller?.currentId ?? null);
}

function stageLabel(classIndex: number): void {
  const c = controller;
  if (!c || c.currentId === null) return;
  try {
    c.stage(classIndex);
  } catch (err) {
    setNote(String(err), true);
    return;
  }
  renderAll();
}

async function submitBatch(): Promise<void> {
  const c = controller;
  if (!c || !c.complete || busy) return;
  busy = true;
  submitBtn.disabled = true;
  try {
    await c.submit();
    setNote("batch submitted, fine-tuning");
  } catch (err) {
    setNote(String(err), true);
  } finally {
    busy = false;
  }
  renderAll();
  void refreshChart();
}

async function tick(): Promise<void> {
  const c = controller;
  if (!c) return;
  const before = c.status?.phase;
  const hadBatch = c.batch !== null;
  try {
    await c.poll();
    setNoteOnRecovery();
  } catch (err) {
    setNote(String(err), true);
    return;
  }
  const after = c.status?.phase;
  if (before !== after || c.batch !== null !== hadBatch) {
    renderLabelBar();
    renderAll();
    void refreshChart();
    if (after === "awaiting_labels" || after === "idle") void refreshEmbedding();
  } else {
    renderStatus();
  }
}

function setNoteOnRecovery(): void {
  if (noteText.classList.contains("error") && controller?.status?.phase !== "error") {
    setNote("");
  }
}

createForm.onsubmit = (event) => {
  event.preventDefault();
  const data = new FormData(createForm);
  const num = (name: string) => Number(data.get(name));
  void (async () => {
    try {
      const status = await api.createSession({
        dataset: String(data.get("dataset") ?? ""),
        model: { seed: 0 },
        loop: {
          strategy: String(data.get("strategy") ?? "kr"),
          n_clusters: num("clusters"),
          per: num("per"),
          cap: num("cap"),
          iterations: num("iterations"),
          pretrain_epochs: num("pretrain"),
          finetune_epochs: num("finetune"),
        },
      });
      await refreshSessions();
      sessionSelect.value = status.session_id;
      selectSession(status.session_id);
    } catch (err) {
      setNote(String(err), true);
    }
  })();
};

sessionSelect.onchange = () => selectSession(sessionSelect.value);
submitBtn.onclick = () => void submitBatch();

embeddingCanvas.onclick = (event) => {
  if (!embeddingFit || !controller) return;
  const rect = embeddingCanvas.getBoundingClientRect();
  const hit = nearestPoint(points, embeddingFit, event.clientX - rect.left, event.clientY - rect.top);
  if (hit) {
    if (controller.queriedIds.includes(hit.id)) controller.moveTo(hit.id);
    void showSample(hit.id);
    renderAll();
  }
};

window.addEventListener("keydown", (event) => {
  if (event.target instanceof HTMLInputElement) return;
  const action = keyAction(event.key, controller?.status?.class_names.length ?? 0);
  if (!action) return;
  event.preventDefault();
  switch (action.kind) {
    case "label":
      stageLabel(action.classIndex);
      break;
    case "move":
      controller?.move(action.delta);
      renderAll();
      break;
    case "scrub":
      clock.scrub(action.delta);
      break;
    case "toggle-play":
      clock.toggle();
      break;
    case "submit":
      void submitBatch();
      break;
    case "clear":
      if (controller?.currentId) {
        controller.clearLabel(controller.currentId);
        renderAll();
      }
      break;
  }
});

let lastFrameTime = performance.now();
function animate(now: number): void {
  const dt = Math.min((now - lastFrameTime) / 1000, 0.1);
  lastFrameTime = now;
  clock.advance(dt);
  if (shownSample && playerFit) {
    playerCtx.clearRect(0, 0, playerCanvas.width, playerCanvas.height);
    const frames = shownSample.frames_2d;
    const idx = clock.frameIndex();
    const trail = [3, 2, 1]
      .map((back) => frames[(idx - back + frames.length) % frames.length])
      .filter((f): f is number[][] => f !== undefined);
    const staged = controller?.currentId === shownSample.id
      ? controller.labelOf(shownSample.id)
      : undefined;
    drawFrame(playerCtx, frameAt(frames, clock.t), playerFit, {
      trail,
      color: staged === undefined ? "#4cc2ff" : classColor(staged),
    });
  }
  requestAnimationFrame(animate);
}

setInterval(() => void tick(), 800);
void refreshSessions().catch((err) => setNote(String(err), true));
requestAnimationFrame(animate);
