//! Closed-form U-functions of eventually periodic sequences.
//!
//! With `z` zeros and `c_i` occurrences of symbol `i` per period, the count of
//! `i`'s before the `(αz + β)`-th zero of the periodic part is
//! `α·c_i + U^(i)(β)`. Balanced sequences are the special case `z = c_i = N`.
//! A preperiod contributes a fixed offset plus a short explicit prefix.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::RotorSequence;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UTable {
    degree: u32,
    zeros_per_period: u64,
    counts_per_period: Vec<u64>,
    /// Row `β-1` holds `U^(1..=d)(β)` for the periodic part.
    base_table: Vec<Vec<u64>>,
    /// `U(x)` for `1 ≤ x ≤` zeros of the preperiod.
    prefix_table: Vec<Vec<u64>>,
    /// Occurrences of `1..=d` in the preperiod.
    preperiod_counts: Vec<u64>,
}

impl UTable {
    pub fn new(s: &RotorSequence) -> Result<Self> {
        if !s.is_nondegenerate() {
            return Err(Error::Degenerate(s.to_string()));
        }
        let d = s.degree() as usize;
        let mut running = vec![0u64; d];
        let mut prefix_table = Vec::new();
        for &sym in s.preperiod() {
            if sym == 0 {
                prefix_table.push(running.clone());
            } else {
                running[sym as usize - 1] += 1;
            }
        }
        let preperiod_counts = running;
        let mut running = vec![0u64; d];
        let mut base_table = Vec::new();
        for &sym in s.period() {
            if sym == 0 {
                base_table.push(running.clone());
            } else {
                running[sym as usize - 1] += 1;
            }
        }
        Ok(UTable {
            degree: s.degree(),
            zeros_per_period: base_table.len() as u64,
            counts_per_period: running,
            base_table,
            prefix_table,
            preperiod_counts,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn zeros_per_period(&self) -> u64 {
        self.zeros_per_period
    }

    /// `c_i` for `i = 1..=d` (index `i - 1`).
    pub fn counts_per_period(&self) -> &[u64] {
        &self.counts_per_period
    }

    pub fn base_table(&self) -> &[Vec<u64>] {
        &self.base_table
    }

    pub fn preperiod_zeros(&self) -> u64 {
        self.prefix_table.len() as u64
    }

    /// Smallest `x` from which `U(x + z) = U(x) + c` holds.
    pub fn threshold(&self) -> u64 {
        self.preperiod_zeros() + 1
    }

    /// Every direction gains exactly `z` per period.
    pub fn is_drift_free(&self) -> bool {
        self.counts_per_period.iter().all(|&c| c == self.zeros_per_period)
    }

    #[inline]
    fn locate(&self, x: u64) -> Locus<'_> {
        let pre = self.prefix_table.len() as u64;
        if x <= pre {
            return Locus::Prefix(&self.prefix_table[x as usize - 1]);
        }
        let y = x - pre - 1;
        let alpha = y / self.zeros_per_period;
        let beta = (y % self.zeros_per_period) as usize;
        Locus::Periodic { alpha, row: &self.base_table[beta] }
    }

    /// `U^(i)(x)` for `1 ≤ i ≤ d`.
    #[inline]
    pub fn eval(&self, i: u32, x: u64) -> u64 {
        debug_assert!(i >= 1 && i <= self.degree);
        if x == 0 {
            return 0;
        }
        let k = i as usize - 1;
        match self.locate(x) {
            Locus::Prefix(row) => row[k],
            Locus::Periodic { alpha, row } => self.preperiod_counts[k] + alpha * self.counts_per_period[k] + row[k],
        }
    }

    /// The vector `(U^(1)(x), …, U^(d)(x))`.
    pub fn eval_vector(&self, x: u64) -> Vec<u64> {
        (1..=self.degree).map(|i| self.eval(i, x)).collect()
    }
}

enum Locus<'a> {
    Prefix(&'a [u64]),
    Periodic { alpha: u64, row: &'a [u64] },
}
