//! Compare a recorded trace against its theory bound column.

use std::fmt::Write;

use mpcgs::TraceRecord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass { checked: usize },
    Fail { checked: usize, failing: Vec<u64> },
    NoBound,
}

#[derive(Debug, Clone)]
pub struct BoundTable {
    pub report: String,
    pub verdict: Verdict,
}

/// Row per record carrying a bound: FW-gap, bound and whether the gap is
/// within it. The FW-gap upper-bounds the primal-dual gap, so a pass here is
/// conservative.
pub fn bound_table(records: &[TraceRecord]) -> BoundTable {
    let mut report = String::new();
    let rows: Vec<(&TraceRecord, f64)> = records
        .iter()
        .filter_map(|r| r.theory_bound.map(|b| (r, b)))
        .collect();
    if rows.is_empty() {
        report.push_str("no bound recorded\n");
        return BoundTable {
            report,
            verdict: Verdict::NoBound,
        };
    }
    let _ = writeln!(report, "{:>8}  {:>14}  {:>14}  ok", "k", "fw_gap", "bound");
    let mut failing = Vec::new();
    for (r, b) in &rows {
        let ok = r.fw_gap <= *b;
        if !ok {
            failing.push(r.k);
        }
        let _ = writeln!(report, "{:>8}  {:>14.6e}  {:>14.6e}  {}", r.k, r.fw_gap, b, if ok { "yes" } else { "NO" });
    }
    let checked = rows.len();
    let verdict = if failing.is_empty() {
        let _ = writeln!(report, "PASS {checked}/{checked}");
        Verdict::Pass { checked }
    } else {
        let list: Vec<String> = failing.iter().map(u64::to_string).collect();
        let _ = writeln!(report, "FAIL {}/{checked}; failing k: {}", checked - failing.len(), list.join(", "));
        Verdict::Fail { checked, failing }
    };
    BoundTable { report, verdict }
}
