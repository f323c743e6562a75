import { ApiClient, ChallengePayload } from "./api.js";
import { cellFrameStyle, FRAME_COLORS } from "./geometry.js";
import { StoryPicker } from "./picker.js";
import { StrokeRecorder } from "./stroke.js";
import { attachDrawingSurface } from "./draw.js";

// Tail window: roughly 1.5 cell widths of pointer travel at device sampling
// rates; tune per deployment if strokes erase too eagerly or too lazily.
const TAIL_WINDOW = 48;
const PASSWORD_LENGTH = 5;

const api = new ApiClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(text: string, kind: "info" | "ok" | "err" = "info"): void {
  const status = el<HTMLElement>("status");
  status.textContent = text;
  status.dataset.kind = kind;
}

// --- login -------------------------------------------------------------------

let detachDrawing: (() => void) | null = null;
let activeChallenge: ChallengePayload | null = null;

function renderChallengeGrid(payload: ChallengePayload): void {
  const gridBox = el<HTMLDivElement>("challenge-grid");
  gridBox.innerHTML = "";
  gridBox.style.gridTemplateColumns = `repeat(${payload.grid.cols}, 1fr)`;
  payload.cells.forEach((_, cell) => {
    const frame = document.createElement("div");
    frame.className = "cell";
    const marker = cellFrameStyle(cell, payload);
    if (marker) {
      frame.style.outline = `4px solid ${FRAME_COLORS[marker]}`;
      frame.style.outlineOffset = "-4px";
      frame.dataset.marker = marker;
    }
    const img = document.createElement("img");
    // login renders only the degraded challenge endpoint, never the catalog
    img.src = api.challengeImageUrl(payload.nonce, cell);
    img.draggable = false;
    frame.appendChild(img);
    gridBox.appendChild(frame);
  });
}

function sizeOverlay(): void {
  const gridBox = el<HTMLDivElement>("challenge-grid");
  const canvas = el<HTMLCanvasElement>("draw-overlay");
  const rect = gridBox.getBoundingClientRect();
  canvas.width = rect.width;
  canvas.height = rect.height;
  canvas.style.width = `${rect.width}px`;
  canvas.style.height = `${rect.height}px`;
}

async function startLoginChallenge(): Promise<void> {
  const user = el<HTMLInputElement>("login-user").value.trim();
  if (!user) {
    setStatus("enter a user name first", "err");
    return;
  }
  try {
    activeChallenge = await api.challenge(user);
  } catch (err) {
    setStatus(String(err), "err");
    return;
  }
  renderChallengeGrid(activeChallenge);
  el<HTMLDivElement>("login-surface").hidden = false;
  // wait for layout so the overlay matches the rendered grid
  requestAnimationFrame(() => {
    sizeOverlay();
    const canvas = el<HTMLCanvasElement>("draw-overlay");
    const recorder = new StrokeRecorder(TAIL_WINDOW);
    detachDrawing?.();
    detachDrawing = attachDrawingSurface(
      canvas,
      recorder,
      (polyline) => void submitStroke(user, polyline),
      () => {
        // interrupted stroke: discard and start over with a fresh challenge
        setStatus("stroke interrupted: fetching a fresh challenge", "err");
        activeChallenge = null;
        void startLoginChallenge();
      },
    );
    setStatus(
      "draw one continuous stroke: start on the red cell, cross your images in story order, end on the green cell",
    );
  });
}

async function submitStroke(user: string, polyline: [number, number][]): Promise<void> {
  if (!activeChallenge) return;
  const nonce = activeChallenge.nonce;
  activeChallenge = null; // one stroke per challenge, lifted early or not
  detachDrawing?.();
  detachDrawing = null;
  const outcome = await api.verify(user, nonce, polyline);
  if (outcome.result === "accepted") {
    setStatus("accepted: you are logged in", "ok");
    return;
  }
  const why = outcome.reason ? ` (${outcome.reason})` : "";
  setStatus(`rejected${why}: fetching a fresh challenge`, "err");
  void startLoginChallenge();
}

// --- enrollment -----------------------------------------------------------------

const picker = new StoryPicker(PASSWORD_LENGTH);

async function loadEnrollmentCatalog(): Promise<void> {
  const catalog = await api.catalog();
  const box = el<HTMLDivElement>("picker-grid");
  box.innerHTML = "";
  picker.reset();
  for (const image of catalog.images) {
    const cellBox = document.createElement("div");
    cellBox.className = "cell pickable";
    const img = document.createElement("img");
    img.src = `data:image/png;base64,${image.png_base64}`;
    img.draggable = false;
    const badge = document.createElement("span");
    badge.className = "badge";
    badge.hidden = true;
    cellBox.append(img, badge);
    cellBox.addEventListener("click", () => {
      picker.toggle(image.id);
      refreshBadges();
    });
    cellBox.dataset.imageId = image.id;
    box.appendChild(cellBox);
  }
  el<HTMLButtonElement>("enroll-submit").disabled = true;
}

function refreshBadges(): void {
  const box = el<HTMLDivElement>("picker-grid");
  for (const node of Array.from(box.children) as HTMLElement[]) {
    const id = node.dataset.imageId ?? "";
    const badge = node.querySelector(".badge") as HTMLElement;
    const pos = picker.badge(id);
    badge.hidden = pos === null;
    badge.textContent = pos === null ? "" : String(pos);
    node.classList.toggle("picked", pos !== null);
  }
  el<HTMLButtonElement>("enroll-submit").disabled = !picker.canSubmit;
}

async function submitEnrollment(): Promise<void> {
  const user = el<HTMLInputElement>("enroll-user").value.trim();
  if (!user || !picker.canSubmit) return;
  try {
    const response = await api.enroll(user, [...picker.selected]);
    setStatus(
      `enrolled ${response.user} (${response.state}); confirm by drawing your story once`,
    );
    // confirmation uses the login surface with the issued challenge
    el<HTMLInputElement>("login-user").value = user;
    activeChallenge = response.challenge;
    renderChallengeGrid(response.challenge);
    el<HTMLDivElement>("login-surface").hidden = false;
    requestAnimationFrame(() => {
      sizeOverlay();
      const canvas = el<HTMLCanvasElement>("draw-overlay");
      const recorder = new StrokeRecorder(TAIL_WINDOW);
      detachDrawing?.();
      detachDrawing = attachDrawingSurface(canvas, recorder, (polyline) => {
        void submitStroke(user, polyline);
      });
    });
  } catch (err) {
    setStatus(String(err), "err");
  }
}

// --- wiring -----------------------------------------------------------------------

export function bootstrap(): void {
  el<HTMLButtonElement>("login-start").addEventListener("click", () => {
    void startLoginChallenge();
  });
  el<HTMLButtonElement>("enroll-load").addEventListener("click", () => {
    void loadEnrollmentCatalog();
  });
  el<HTMLButtonElement>("enroll-submit").addEventListener("click", () => {
    void submitEnrollment();
  });
  window.addEventListener("resize", () => {
    if (activeChallenge) sizeOverlay();
  });
  setStatus("ready");
}

if (typeof document !== "undefined" && document.getElementById("status")) {
  bootstrap();
}
