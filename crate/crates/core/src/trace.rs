use std::sync::mpsc::Sender;

use serde::{Deserialize, Serialize};

use crate::counters::OracleCounters;

/// One per-iteration snapshot of a solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: u64,
    /// Solver time since the start of the run, in milliseconds.
    pub wall_ms: f64,
    pub fw_gap: f64,
    /// Worst-case bound on the primal-dual gap at this iteration, if the
    /// solver has one.
    pub theory_bound: Option<f64>,
    pub counters: OracleCounters,
}

impl TraceRecord {
    /// Equality of everything but the wall clock.
    pub fn same_run_state(&self, other: &TraceRecord) -> bool {
        self.k == other.k
            && self.fw_gap.to_bits() == other.fw_gap.to_bits()
            && self.theory_bound.map(f64::to_bits) == other.theory_bound.map(f64::to_bits)
            && self.counters == other.counters
    }
}

/// Receives trace records in iteration order.
pub trait TraceSink {
    fn record(&mut self, rec: &TraceRecord);
}

impl TraceSink for Vec<TraceRecord> {
    fn record(&mut self, rec: &TraceRecord) {
        self.push(rec.clone());
    }
}

/// Single-producer channel: records arrive in order on the receiving side.
impl TraceSink for Sender<TraceRecord> {
    fn record(&mut self, rec: &TraceRecord) {
        // A dropped receiver just means nobody is listening any more.
        let _ = self.send(rec.clone());
    }
}

pub struct NullSink;

impl TraceSink for NullSink {
    fn record(&mut self, _rec: &TraceRecord) {}
}
