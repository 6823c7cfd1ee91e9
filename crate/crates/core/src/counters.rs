use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest count a counter may hold (`2^63 − 1`).
pub const COUNTER_CAP: u64 = i64::MAX as u64;

/// Oracle call counts: exact first-order (FO), stochastic (SFO),
/// incremental finite-sum (IFO) and linear-optimization (LO) calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCounters {
    pub fo: u64,
    pub sfo: u64,
    pub ifo: u64,
    pub lo: u64,
}

impl OracleCounters {
    pub fn new() -> Self {
        Self::default()
    }

    /// Componentwise sum; errors if any count would exceed [`COUNTER_CAP`].
    pub fn merge(&self, other: &OracleCounters) -> Result<OracleCounters> {
        let add = |a: u64, b: u64| {
            a.checked_add(b)
                .filter(|s| *s <= COUNTER_CAP)
                .ok_or(Error::CounterOverflow)
        };
        Ok(OracleCounters {
            fo: add(self.fo, other.fo)?,
            sfo: add(self.sfo, other.sfo)?,
            ifo: add(self.ifo, other.ifo)?,
            lo: add(self.lo, other.lo)?,
        })
    }

    /// True when every component of `self` is at least the one in `earlier`.
    pub fn dominates(&self, earlier: &OracleCounters) -> bool {
        self.fo >= earlier.fo
            && self.sfo >= earlier.sfo
            && self.ifo >= earlier.ifo
            && self.lo >= earlier.lo
    }

    /// Record `n` stochastic gradient evaluations, as IFO calls for
    /// finite-sum objectives and SFO calls otherwise.
    pub fn add_samples(&mut self, n: u64, finite_sum: bool) {
        if finite_sum {
            self.ifo = self.ifo.saturating_add(n).min(COUNTER_CAP);
        } else {
            self.sfo = self.sfo.saturating_add(n).min(COUNTER_CAP);
        }
    }
}

impl AddAssign for OracleCounters {
    /// Saturating at [`COUNTER_CAP`]; use [`OracleCounters::merge`] to detect overflow.
    fn add_assign(&mut self, rhs: OracleCounters) {
        self.fo = self.fo.saturating_add(rhs.fo).min(COUNTER_CAP);
        self.sfo = self.sfo.saturating_add(rhs.sfo).min(COUNTER_CAP);
        self.ifo = self.ifo.saturating_add(rhs.ifo).min(COUNTER_CAP);
        self.lo = self.lo.saturating_add(rhs.lo).min(COUNTER_CAP);
    }
}

/// Componentwise sum of two counter snapshots.
pub fn counters_merge(a: &OracleCounters, b: &OracleCounters) -> Result<OracleCounters> {
    a.merge(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(fo: u64, sfo: u64, ifo: u64, lo: u64) -> OracleCounters {
        OracleCounters { fo, sfo, ifo, lo }
    }

    #[test]
    fn merge_examples() {
        assert_eq!(
            counters_merge(&c(2, 0, 0, 3), &c(1, 0, 0, 0)).unwrap(),
            c(3, 0, 0, 3)
        );
        let x = c(4, 5, 6, 7);
        assert_eq!(counters_merge(&OracleCounters::new(), &x).unwrap(), x);
        assert_eq!(counters_merge(&x, &x).unwrap(), c(8, 10, 12, 14));
    }

    #[test]
    fn merge_overflow_is_an_error() {
        let big = c(COUNTER_CAP, 0, 0, 0);
        assert!(matches!(
            big.merge(&c(1, 0, 0, 0)),
            Err(Error::CounterOverflow)
        ));
        assert!(big.merge(&OracleCounters::new()).is_ok());
    }

    proptest! {
        #[test]
        fn merge_is_commutative_and_dominating(a in 0u64..1u64 << 40, b in 0u64..1u64 << 40,
                                               p in 0u64..1u64 << 40, q in 0u64..1u64 << 40) {
            let x = c(a, b, p, q);
            let y = c(q, p, b, a);
            let s = x.merge(&y).unwrap();
            prop_assert_eq!(s, y.merge(&x).unwrap());
            prop_assert!(s.dominates(&x) && s.dominates(&y));
        }
    }
}
