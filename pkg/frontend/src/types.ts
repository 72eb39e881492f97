/** Payload shapes of the evaluation service API. */

export interface Span {
  lang: string; // "tn" | "fr" | "en"
  text: string;
}

export interface ItemPayload {
  item_id: string;
  transcript: string;
  spans: Span[];
  audio: string; // URL path, range requests supported
}

export type NextResponse = ItemPayload | { done: true };

export function isDone(r: NextResponse): r is { done: true } {
  return (r as { done?: boolean }).done === true;
}

export interface Progress {
  judged: number;
  assigned: number;
}

export interface ReportPayload {
  total_items: number;
  completed_items: number;
  pending_items: number;
  human_ser: number | null;
  agreement: number | null;
  per_evaluator: Record<string, Progress>;
}

export interface EvalApi {
  next(evaluatorId: string): Promise<NextResponse>;
  submitJudgment(itemId: string, evaluatorId: string, accept: boolean): Promise<void>;
  progress(evaluatorId: string): Promise<Progress>;
  report(): Promise<ReportPayload>;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}
