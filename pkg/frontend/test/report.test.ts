import assert from "node:assert/strict";
import test from "node:test";

import { formatPercent, presentReport } from "../src/report.js";
import { ReportPayload } from "../src/types.js";

function payload(overrides: Partial<ReportPayload> = {}): ReportPayload {
  return {
    total_items: 4,
    completed_items: 2,
    pending_items: 2,
    human_ser: 50.0,
    agreement: 75.0,
    per_evaluator: { eva: { judged: 3, assigned: 4 }, evb: { judged: 1, assigned: 4 } },
    ...overrides,
  };
}

test("figures render with one decimal, straight from the payload", () => {
  const model = presentReport(payload());
  assert.equal(model.humanSer, "50.0%");
  assert.equal(model.agreement, "75.0%");
});

test("values are rendered verbatim, not recomputed", () => {
  // a value the UI could not derive from the counts it sees
  const model = presentReport(payload({ human_ser: 66.5, agreement: 80.4 }));
  assert.equal(model.humanSer, "66.5%");
  assert.equal(model.agreement, "80.4%");
  const odd = presentReport(payload({ human_ser: 33.333333 }));
  assert.equal(odd.humanSer, "33.3%");
});

test("pending metrics show a not-available state", () => {
  const model = presentReport(
    payload({ completed_items: 0, pending_items: 4, human_ser: null, agreement: null }),
  );
  assert.equal(model.humanSer, "not available");
  assert.equal(model.agreement, "not available");
  assert.equal(model.completion, "0/4 items complete");
});

test("pending badge appears only when something is pending", () => {
  assert.equal(presentReport(payload()).pendingBadge, "2 pending");
  assert.equal(
    presentReport(payload({ pending_items: 0, completed_items: 4 })).pendingBadge,
    null,
  );
});

test("per-evaluator progress lines", () => {
  const model = presentReport(payload());
  assert.deepEqual(model.perEvaluator, [
    { id: "eva", progress: "3/4" },
    { id: "evb", progress: "1/4" },
  ]);
});

test("formatPercent handles null and numbers", () => {
  assert.equal(formatPercent(null), "not available");
  assert.equal(formatPercent(0), "0.0%");
  assert.equal(formatPercent(96.0), "96.0%");
});
