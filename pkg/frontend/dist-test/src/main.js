import { HttpApi } from "./api.js";
import { presentReport } from "./report.js";
import { keyToVerdict, SessionController } from "./session.js";
/** DOM wiring: one login screen, one judging screen, one report view.
 *
 * Served next to the API the base URL is empty; for split serving pass
 * it as a query parameter: http://localhost:8724/?api=http://localhost:8723
 */
const api = new HttpApi(new URLSearchParams(location.search).get("api") ?? "");
function el(id) {
    const node = document.getElementById(id);
    if (!node) {
        throw new Error(`missing element #${id}`);
    }
    return node;
}
const screens = {
    login: el("screen-login"),
    judge: el("screen-judge"),
    done: el("screen-done"),
    report: el("screen-report"),
};
function show(name) {
    for (const [key, node] of Object.entries(screens)) {
        node.hidden = key !== name;
    }
}
const audio = el("audio");
const transcript = el("transcript");
const progressLabel = el("progress");
const playHint = el("play-hint");
const acceptBtn = el("accept");
const rejectBtn = el("reject");
const errorBanner = el("error-banner");
const errorText = el("error-text");
let reportMode = false;
let currentItemId = null;
function render(view) {
    if (reportMode) {
        return;
    }
    errorBanner.hidden = view.phase !== "error";
    if (view.phase === "error") {
        errorText.textContent = view.errorMessage ?? "request failed";
        return;
    }
    if (view.phase === "done") {
        el("done-count").textContent = String(view.judged);
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
        transcript.replaceChildren(...item.spans.map((span) => {
            const node = document.createElement("span");
            node.className = `span-${span.lang}`;
            node.textContent = span.text;
            return node;
        }));
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
el("retry").addEventListener("click", () => void controller.retry());
document.addEventListener("keydown", (event) => {
    if (reportMode || event.target instanceof HTMLInputElement) {
        return;
    }
    const verdict = keyToVerdict(event.key);
    if (verdict !== null) {
        void controller.judge(verdict);
    }
});
el("login-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const id = el("evaluator-id").value.trim();
    if (id) {
        void controller.start(id);
    }
});
// ---- report view ---------------------------------------------------------
async function refreshReport() {
    const model = presentReport(await api.report());
    el("report-completion").textContent = model.completion;
    el("report-ser").textContent = model.humanSer;
    el("report-agreement").textContent = model.agreement;
    const badge = el("report-pending");
    badge.hidden = model.pendingBadge === null;
    badge.textContent = model.pendingBadge ?? "";
    el("report-evaluators").replaceChildren(...model.perEvaluator.map(({ id, progress }) => {
        const row = document.createElement("li");
        row.textContent = `${id}: ${progress}`;
        return row;
    }));
}
el("show-report").addEventListener("click", () => {
    reportMode = true;
    show("report");
    void refreshReport();
});
el("report-refresh").addEventListener("click", () => void refreshReport());
el("report-back").addEventListener("click", () => {
    reportMode = false;
    render(controller.view());
    if (controller.view().phase === "idle") {
        show("login");
    }
});
show("login");
