import { ApiError, isDone } from "./types.js";
export class SessionController {
    constructor(api, onChange = () => { }) {
        this.api = api;
        this.onChange = onChange;
        this.phase = "idle";
        this.item = null;
        this.hasPlayed = false;
        this.judged = 0;
        this.assigned = 0;
        this.errorMessage = null;
        this.evaluatorId = "";
        this.retryAction = null;
    }
    view() {
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
    emit() {
        this.onChange(this.view());
    }
    async start(evaluatorId) {
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
    notePlaybackComplete() {
        if (this.phase === "ready" && !this.hasPlayed) {
            this.hasPlayed = true;
            this.emit();
        }
    }
    async judge(accept) {
        if (this.phase !== "ready" || !this.hasPlayed || this.item === null) {
            return "blocked";
        }
        const item = this.item;
        this.phase = "submitting";
        this.emit();
        try {
            await this.api.submitJudgment(item.item_id, this.evaluatorId, accept);
        }
        catch (err) {
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
    async resumeJudge(accept) {
        this.phase = "ready";
        this.hasPlayed = true;
        await this.judge(accept);
    }
    /** Re-run the operation that hit a network failure. */
    async retry() {
        const action = this.retryAction;
        if (this.phase !== "error" || action === null) {
            return;
        }
        this.retryAction = null;
        this.errorMessage = null;
        await action();
    }
    async fetchNext() {
        const response = await this.api.next(this.evaluatorId);
        if (isDone(response)) {
            this.phase = "done";
            this.item = null;
        }
        else {
            this.item = response;
            this.hasPlayed = false;
            this.phase = "ready";
        }
        this.emit();
    }
    async guard(action) {
        try {
            await action();
        }
        catch (err) {
            this.fail(err, action);
        }
    }
    fail(err, retryAction) {
        this.phase = "error";
        this.errorMessage = err instanceof Error ? err.message : String(err);
        this.retryAction = retryAction;
        this.emit();
    }
}
/** Keyboard shortcuts dispatch exactly what the buttons dispatch. */
export function keyToVerdict(key) {
    switch (key.toLowerCase()) {
        case "a":
            return true;
        case "r":
            return false;
        default:
            return null;
    }
}
