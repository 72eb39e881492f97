export function formatPercent(value) {
    if (value === null) {
        return "not available";
    }
    return `${value.toFixed(1)}%`;
}
export function presentReport(report) {
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
