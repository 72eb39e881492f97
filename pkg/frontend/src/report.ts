import { ReportPayload } from "./types.js";

/**
 * Dashboard view model. Every number is a rendering of a value from
 * /api/report; nothing is computed client-side beyond formatting.
 */

export interface ReportViewModel {
  completion: string; // "3/10 items complete"
  humanSer: string; // "50.0%" or "not available"
  agreement: string;
  pendingBadge: string | null; // "7 pending" when anything is pending
  perEvaluator: { id: string; progress: string }[];
}

export function formatPercent(value: number | null): string {
  if (value === null) {
    return "not available";
  }
  return `${value.toFixed(1)}%`;
}

export function presentReport(report: ReportPayload): ReportViewModel {
  return {
    completion: `${report.completed_items}/${report.total_items} items complete`,
    humanSer: formatPercent(report.human_ser),
    agreement: formatPercent(report.agreement),
    pendingBadge: report.pending_items > 0 ? `${report.pending_items} pending` : null,
    perEvaluator: Object.entries(report.per_evaluator).map(([id, p]) => ({
      id,
      progress: `${p.judged}/${p.assigned}`,
    })),
  };
}
