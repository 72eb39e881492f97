import assert from "node:assert/strict";
import test from "node:test";

import { SessionController, keyToVerdict } from "../src/session.js";
import { ApiError, EvalApi, ItemPayload, NextResponse, Progress, ReportPayload } from "../src/types.js";

function item(id: string): ItemPayload {
  return {
    item_id: id,
    transcript: `text ${id}`,
    spans: [{ lang: "tn", text: `text ${id}` }],
    audio: `/api/audio/${id}`,
  };
}

interface PostRecord {
  itemId: string;
  evaluator: string;
  accept: boolean;
}

/** Scripted service double: serves a queue of items, records judgments. */
class StubApi implements EvalApi {
  posts: PostRecord[] = [];
  journal = new Map<string, boolean>();
  failNextPost: Error | null = null;
  failNextFetch: Error | null = null;

  constructor(private items: ItemPayload[]) {}

  async next(evaluator: string): Promise<NextResponse> {
    if (this.failNextFetch) {
      const err = this.failNextFetch;
      this.failNextFetch = null;
      throw err;
    }
    const pending = this.items.find((it) => !this.journal.has(`${it.item_id}:${evaluator}`));
    return pending ?? { done: true };
  }

  async submitJudgment(itemId: string, evaluator: string, accept: boolean): Promise<void> {
    if (this.failNextPost) {
      const err = this.failNextPost;
      this.failNextPost = null;
      throw err;
    }
    const key = `${itemId}:${evaluator}`;
    const existing = this.journal.get(key);
    if (existing !== undefined && existing !== accept) {
      throw new ApiError(409, "AlreadyJudged");
    }
    this.posts.push({ itemId, evaluator, accept });
    this.journal.set(key, accept);
  }

  async progress(evaluator: string): Promise<Progress> {
    const judged = [...this.journal.keys()].filter((k) => k.endsWith(`:${evaluator}`)).length;
    return { judged, assigned: this.items.length };
  }

  async report(): Promise<ReportPayload> {
    throw new Error("not used here");
  }
}

test("a 3-item session posts exactly 3 judgments in order", async () => {
  const api = new StubApi([item("i0"), item("i1"), item("i2")]);
  const controller = new SessionController(api);
  await controller.start("eva");
  assert.equal(controller.view().phase, "ready");
  assert.equal(controller.view().assigned, 3);

  const verdicts = [true, false, true];
  for (const accept of verdicts) {
    controller.notePlaybackComplete();
    const outcome = await controller.judge(accept);
    assert.equal(outcome, "submitted");
  }

  assert.equal(controller.view().phase, "done");
  assert.equal(controller.view().judged, 3);
  assert.deepEqual(
    api.posts,
    [
      { itemId: "i0", evaluator: "eva", accept: true },
      { itemId: "i1", evaluator: "eva", accept: false },
      { itemId: "i2", evaluator: "eva", accept: true },
    ],
  );
});

test("judging is blocked until the audio finished once", async () => {
  const api = new StubApi([item("i0")]);
  const controller = new SessionController(api);
  await controller.start("eva");

  assert.equal(controller.view().canJudge, false);
  assert.equal(await controller.judge(true), "blocked");
  assert.equal(api.posts.length, 0);

  controller.notePlaybackComplete();
  assert.equal(controller.view().canJudge, true);
  assert.equal(await controller.judge(true), "submitted");
  assert.equal(api.posts.length, 1);
});

test("double-clicking accept sends exactly one judgment", async () => {
  const api = new StubApi([item("i0"), item("i1")]);
  const controller = new SessionController(api);
  await controller.start("eva");
  controller.notePlaybackComplete();

  const [first, second] = await Promise.all([
    controller.judge(true),
    controller.judge(true), // second click lands while the first is in flight
  ]);
  assert.equal(first, "submitted");
  assert.equal(second, "blocked");
  assert.equal(api.posts.filter((p) => p.itemId === "i0").length, 1);
});

test("an AlreadyJudged response advances to the next item", async () => {
  const api = new StubApi([item("i0"), item("i1")]);
  api.journal.set("i0:eva", false); // someone already rejected it
  const controller = new SessionController(api);
  await controller.start("eva");
  assert.equal(controller.view().item?.item_id, "i1");

  // force the conflict path directly on a fresh controller
  const api2 = new StubApi([item("i0"), item("i1")]);
  const controller2 = new SessionController(api2);
  await controller2.start("eva");
  controller2.notePlaybackComplete();
  api2.journal.set("i0:eva", false); // conflicting verdict arrives first
  const outcome = await controller2.judge(true);
  assert.equal(outcome, "duplicate");
  assert.equal(controller2.view().item?.item_id, "i1");
});

test("network failure surfaces an error state and retry resumes", async () => {
  const api = new StubApi([item("i0")]);
  const controller = new SessionController(api);
  await controller.start("eva");
  controller.notePlaybackComplete();

  api.failNextPost = new TypeError("fetch failed");
  assert.equal(await controller.judge(true), "failed");
  assert.equal(controller.view().phase, "error");
  assert.match(controller.view().errorMessage ?? "", /fetch failed/);

  await controller.retry();
  assert.equal(controller.view().phase, "done");
  assert.equal(api.posts.length, 1);
});

test("start fetches progress from the service", async () => {
  const api = new StubApi([item("i0"), item("i1")]);
  api.journal.set("i0:eva", true);
  const controller = new SessionController(api);
  await controller.start("eva");
  assert.equal(controller.view().judged, 1);
  assert.equal(controller.view().assigned, 2);
  assert.equal(controller.view().item?.item_id, "i1");
});

test("keyboard shortcuts map to the same verdicts as the buttons", () => {
  assert.equal(keyToVerdict("a"), true);
  assert.equal(keyToVerdict("A"), true);
  assert.equal(keyToVerdict("r"), false);
  assert.equal(keyToVerdict("R"), false);
  assert.equal(keyToVerdict("x"), null);
  assert.equal(keyToVerdict("Enter"), null);
});
