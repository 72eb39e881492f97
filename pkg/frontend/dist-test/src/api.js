import { ApiError } from "./types.js";
/** fetch-backed client; baseUrl is "" when served next to the API. */
export class HttpApi {
    constructor(baseUrl = "") {
        this.baseUrl = baseUrl;
    }
    async get(path) {
        const resp = await fetch(this.baseUrl + path);
        if (!resp.ok) {
            throw new ApiError(resp.status, await resp.text());
        }
        return resp.json();
    }
    next(evaluatorId) {
        return this.get(`/api/next?evaluator=${encodeURIComponent(evaluatorId)}`);
    }
    async submitJudgment(itemId, evaluatorId, accept) {
        const resp = await fetch(this.baseUrl + "/api/judgment", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ item_id: itemId, evaluator_id: evaluatorId, accept }),
        });
        if (!resp.ok) {
            throw new ApiError(resp.status, await resp.text());
        }
    }
    progress(evaluatorId) {
        return this.get(`/api/progress?evaluator=${encodeURIComponent(evaluatorId)}`);
    }
    report() {
        return this.get("/api/report");
    }
    audioUrl(path) {
        return this.baseUrl + path;
    }
}
