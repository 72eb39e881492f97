import { ApiError, EvalApi, NextResponse, Progress, ReportPayload } from "./types.js";

/** fetch-backed client; baseUrl is "" when served next to the API. */
export class HttpApi implements EvalApi {
  constructor(private baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const resp = await fetch(this.baseUrl + path);
    if (!resp.ok) {
      throw new ApiError(resp.status, await resp.text());
    }
    return resp.json() as Promise<T>;
  }

  next(evaluatorId: string): Promise<NextResponse> {
    return this.get(`/api/next?evaluator=${encodeURIComponent(evaluatorId)}`);
  }

  async submitJudgment(itemId: string, evaluatorId: string, accept: boolean): Promise<void> {
    const resp = await fetch(this.baseUrl + "/api/judgment", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ item_id: itemId, evaluator_id: evaluatorId, accept }),
    });
    if (!resp.ok) {
      throw new ApiError(resp.status, await resp.text());
    }
  }

  progress(evaluatorId: string): Promise<Progress> {
    return this.get(`/api/progress?evaluator=${encodeURIComponent(evaluatorId)}`);
  }

  report(): Promise<ReportPayload> {
    return this.get("/api/report");
  }

  audioUrl(path: string): string {
    return this.baseUrl + path;
  }
}
