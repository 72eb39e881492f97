import { ApiError, EvalApi, ItemPayload, isDone } from "./types.js";

/**
 * Evaluation session state machine, UI-framework free.
 *
 * The DOM layer renders the view snapshot and feeds events back in:
 * notePlaybackComplete() when the audio element finishes a full pass,
 * judge() on button clicks and keyboard shortcuts. Judging is blocked
 * until the current item's audio has been heard once, and while a
 * submission is in flight (so a double click sends one request; the
 * server treats exact duplicates as idempotent anyway).
 */

export type Phase = "idle" | "loading" | "ready" | "submitting" | "done" | "error";

export type JudgeOutcome = "submitted" | "duplicate" | "blocked" | "failed";

export interface SessionView {
  phase: Phase;
  evaluatorId: string;
  item: ItemPayload | null;
  canJudge: boolean;
  judged: number;
  assigned: number;
  errorMessage: string | null;
}

export class SessionController {
  private phase: Phase = "idle";
  private item: ItemPayload | null = null;
  private hasPlayed = false;
  private judged = 0;
  private assigned = 0;
  private errorMessage: string | null = null;
  private evaluatorId = "";
  private retryAction: (() => Promise<void>) | null = null;

  constructor(
    private api: EvalApi,
    private onChange: (view: SessionView) => void = () => {},
  ) {}

  view(): SessionView {
    return {
      phase: this.phase,
      evaluatorId: this.evaluatorId,
      item: this.item,
      canJudge: this.phase === "ready" && this.hasPlayed,
      judged: this.judged,
      assigned: this.assigned,
      errorMessage: this.errorMessage,
    };
  }

  private emit(): void {
    this.onChange(this.view());
  }

  async start(evaluatorId: string): Promise<void> {
    this.evaluatorId = evaluatorId;
    this.phase = "loading";
    this.emit();
    await this.guard(async () => {
      const progress = await this.api.progress(evaluatorId);
      this.judged = progress.judged;
      this.assigned = progress.assigned;
      await this.fetchNext();
    });
  }

  /** The audio element finished one full playback of the current item. */
  notePlaybackComplete(): void {
    if (this.phase === "ready" && !this.hasPlayed) {
      this.hasPlayed = true;
      this.emit();
    }
  }

  async judge(accept: boolean): Promise<JudgeOutcome> {
    if (this.phase !== "ready" || !this.hasPlayed || this.item === null) {
      return "blocked";
    }
    const item = this.item;
    this.phase = "submitting";
    this.emit();
    try {
      await this.api.submitJudgment(item.item_id, this.evaluatorId, accept);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // someone (an earlier click, another tab) already judged it: advance
        await this.guard(() => this.fetchNext());
        return "duplicate";
      }
      this.fail(err, () => this.resumeJudge(accept));
      return "failed";
    }
    this.judged += 1;
    await this.guard(() => this.fetchNext());
    return "submitted";
  }

  private async resumeJudge(accept: boolean): Promise<void> {
    this.phase = "ready";
    this.hasPlayed = true;
    await this.judge(accept);
  }

  /** Re-run the operation that hit a network failure. */
  async retry(): Promise<void> {
    const action = this.retryAction;
    if (this.phase !== "error" || action === null) {
      return;
    }
    this.retryAction = null;
    this.errorMessage = null;
    await action();
  }

  private async fetchNext(): Promise<void> {
    const response = await this.api.next(this.evaluatorId);
    if (isDone(response)) {
      this.phase = "done";
      this.item = null;
    } else {
      this.item = response;
      this.hasPlayed = false;
      this.phase = "ready";
    }
    this.emit();
  }

  private async guard(action: () => Promise<void>): Promise<void> {
    try {
      await action();
    } catch (err) {
      this.fail(err, action);
    }
  }

  private fail(err: unknown, retryAction: () => Promise<void>): void {
    this.phase = "error";
    this.errorMessage = err instanceof Error ? err.message : String(err);
    this.retryAction = retryAction;
    this.emit();
  }
}

/** Keyboard shortcuts dispatch exactly what the buttons dispatch. */
export function keyToVerdict(key: string): boolean | null {
  switch (key.toLowerCase()) {
    case "a":
      return true;
    case "r":
      return false;
    default:
      return null;
  }
}
