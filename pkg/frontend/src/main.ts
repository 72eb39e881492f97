import { HttpApi } from "./api.js";
import { presentReport } from "./report.js";
import { keyToVerdict, SessionController, SessionView } from "./session.js";

/** DOM wiring: one login screen, one judging screen, one report view.
 *
 * Served next to the API the base URL is empty; for split serving pass
 * it as a query parameter: http://localhost:8724/?api=http://localhost:8723
 */

const api = new HttpApi(new URLSearchParams(location.search).get("api") ?? "");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

const screens = {
  login: el<HTMLElement>("screen-login"),
  judge: el<HTMLElement>("screen-judge"),
  done: el<HTMLElement>("screen-done"),
  report: el<HTMLElement>("screen-report"),
};

function show(name: keyof typeof screens): void {
  for (const [key, node] of Object.entries(screens)) {
    node.hidden = key !== name;
  }
}

const audio = el<HTMLAudioElement>("audio");
const transcript = el<HTMLElement>("transcript");
const progressLabel = el<HTMLElement>("progress");
const playHint = el<HTMLElement>("play-hint");
const acceptBtn = el<HTMLButtonElement>("accept");
const rejectBtn = el<HTMLButtonElement>("reject");
const errorBanner = el<HTMLElement>("error-banner");
const errorText = el<HTMLElement>("error-text");

let reportMode = false;
let currentItemId: string | null = null;

function render(view: SessionView): void {
  if (reportMode) {
    return;
  }
  errorBanner.hidden = view.phase !== "error";
  if (view.phase === "error") {
    errorText.textContent = view.errorMessage ?? "request failed";
    return;
  }
  if (view.phase === "done") {
    el<HTMLElement>("done-count").textContent = String(view.judged);
    show("done");
    return;
  }
  if (view.phase !== "ready" && view.phase !== "submitting") {
    return;
  }
  show("judge");
  progressLabel.textContent = `${view.judged} / ${view.assigned} judged`;
  const item = view.item;
  if (item && item.item_id !== currentItemId) {
    currentItemId = item.item_id;
    transcript.replaceChildren(
      ...item.spans.map((span) => {
        const node = document.createElement("span");
        node.className = `span-${span.lang}`;
        node.textContent = span.text;
        return node;
      }),
    );
    audio.src = api.audioUrl(item.audio);
    audio.load();
  }
  const busy = view.phase === "submitting";
  acceptBtn.disabled = busy || !view.canJudge;
  rejectBtn.disabled = busy || !view.canJudge;
  playHint.hidden = view.canJudge;
}

const controller = new SessionController(api, render);

audio.addEventListener("ended", () => controller.notePlaybackComplete());
acceptBtn.addEventListener("click", () => void controller.judge(true));
rejectBtn.addEventListener("click", () => void controller.judge(false));
el<HTMLButtonElement>("retry").addEventListener("click", () => void controller.retry());

document.addEventListener("keydown", (event) => {
  if (reportMode || event.target instanceof HTMLInputElement) {
    return;
  }
  const verdict = keyToVerdict(event.key);
  if (verdict !== null) {
    void controller.judge(verdict);
  }
});

el<HTMLFormElement>("login-form").addEventListener("submit", (event) => {
  event.preventDefault();
  const id = el<HTMLInputElement>("evaluator-id").value.trim();
  if (id) {
    void controller.start(id);
  }
});

// ---- report view ---------------------------------------------------------

async function refreshReport(): Promise<void> {
  const model = presentReport(await api.report());
  el<HTMLElement>("report-completion").textContent = model.completion;
  el<HTMLElement>("report-ser").textContent = model.humanSer;
  el<HTMLElement>("report-agreement").textContent = model.agreement;
  const badge = el<HTMLElement>("report-pending");
  badge.hidden = model.pendingBadge === null;
  badge.textContent = model.pendingBadge ?? "";
  el<HTMLElement>("report-evaluators").replaceChildren(
    ...model.perEvaluator.map(({ id, progress }) => {
      const row = document.createElement("li");
      row.textContent = `${id}: ${progress}`;
      return row;
    }),
  );
}

el<HTMLButtonElement>("show-report").addEventListener("click", () => {
  reportMode = true;
  show("report");
  void refreshReport();
});
el<HTMLButtonElement>("report-refresh").addEventListener("click", () => void refreshReport());
el<HTMLButtonElement>("report-back").addEventListener("click", () => {
  reportMode = false;
  render(controller.view());
  if (controller.view().phase === "idle") {
    show("login");
  }
});

show("login");
