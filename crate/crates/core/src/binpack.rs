//! Best-fit packing into a fixed set of bins of unequal capacity.
//!
//! Two modes are provided. [`best_fit_overflow`] never overfills a bin and
//! sets aside items that fit nowhere; [`best_fit_overstuff`] always places
//! every item and lets bins go over capacity. Both send each item to the bin
//! with the largest remaining capacity at that moment.
//!
//! Bins live in an ordered set keyed by remaining capacity, so each placement
//! costs `O(log m)`. When several bins have exactly the same remaining
//! capacity, the bin that received an item most recently wins; among bins
//! that have not been touched yet, the lowest index wins. This is the order a
//! sorted bin list produces when the updated bin is reinserted ahead of its
//! equals.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use ordered_float::OrderedFloat;
use serde::Serialize;

use crate::error::{Error, Result};

/// An item fits when it exceeds the remaining capacity by at most this much.
pub const FIT_TOLERANCE: f64 = 1e-12;

/// Default bound on the number of candidate assignments an exhaustive solver
/// may visit.
pub const DEFAULT_SIZE_CAP: u64 = 10_000_000;

/// Items to pack and bin capacities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingInstance {
    items: Vec<f64>,
    capacities: Vec<f64>,
}

impl PackingInstance {
    /// Items and capacities must be finite and nonnegative. Zero-size items
    /// are allowed and always fit.
    pub fn new(items: Vec<f64>, capacities: Vec<f64>) -> Result<Self> {
        if items.is_empty() || capacities.is_empty() {
            return Err(Error::EmptyInstance);
        }
        for (index, &x) in items.iter().chain(&capacities).enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if x < 0.0 {
                return Err(Error::NegativeComponent { index, value: x });
            }
        }
        Ok(Self { items, capacities })
    }

    pub fn items(&self) -> &[f64] {
        &self.items
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn bins(&self) -> usize {
        self.capacities.len()
    }
}

/// Where an item ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Bin(usize),
    Overflow,
}

/// Outcome of a packing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingResult {
    /// Slot of each item, in item order.
    pub assignment: Vec<Slot>,
    /// Total size placed in each bin.
    pub loads: Vec<f64>,
    /// `(load - capacity)+` per bin.
    pub excess: Vec<f64>,
    /// `(capacity - load)+` per bin.
    pub slack: Vec<f64>,
    /// Remaining capacity of the bin just before the item that first pushed it
    /// over capacity. Only set in overstuff mode, and only for heavy bins.
    pub residual_before_heavy: Vec<Option<f64>>,
    /// Indices of items that fit in no bin, ascending. Overflow mode only.
    pub overflow: Vec<usize>,
}

impl PackingResult {
    fn from_assignment(
        instance: &PackingInstance,
        assignment: Vec<Slot>,
        residual_before_heavy: Vec<Option<f64>>,
    ) -> Self {
        let mut loads = vec![0.0; instance.bins()];
        let mut overflow = Vec::new();
        for (i, slot) in assignment.iter().enumerate() {
            match *slot {
                Slot::Bin(j) => loads[j] += instance.items[i],
                Slot::Overflow => overflow.push(i),
            }
        }
        let excess = loads
            .iter()
            .zip(&instance.capacities)
            .map(|(l, c)| (l - c).max(0.0))
            .collect();
        let slack = loads
            .iter()
            .zip(&instance.capacities)
            .map(|(l, c)| (c - l).max(0.0))
            .collect();
        Self {
            assignment,
            loads,
            excess,
            slack,
            residual_before_heavy,
            overflow,
        }
    }

    /// Item indices per bin (the sets `I_j`), ascending within each bin.
    pub fn bins(&self) -> Vec<Vec<usize>> {
        let mut bins = vec![Vec::new(); self.loads.len()];
        for (i, slot) in self.assignment.iter().enumerate() {
            if let Slot::Bin(j) = *slot {
                bins[j].push(i);
            }
        }
        bins
    }

    /// Bin index of every item, or `None` if some item overflowed.
    pub fn partition(&self) -> Option<Vec<usize>> {
        self.assignment
            .iter()
            .map(|s| match *s {
                Slot::Bin(j) => Some(j),
                Slot::Overflow => None,
            })
            .collect()
    }

    /// Total unused capacity `sum_j (capacity_j - load_j)+`.
    pub fn unused_capacity(&self) -> f64 {
        self.slack.iter().sum()
    }
}

/// Total mismatch, unused capacity and overstuffing of a complete packing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mismatch {
    pub total: f64,
    pub unused: f64,
    pub overstuffed: f64,
}

#[derive(Clone, Copy)]
enum Mode {
    Overflow,
    Overstuff,
}

type BinKey = (Reverse<OrderedFloat<f64>>, Reverse<u64>, usize);

fn best_fit(instance: &PackingInstance, mode: Mode) -> PackingResult {
    let m = instance.bins();
    let mut residual = instance.capacities.clone();
    let mut stamp = vec![0u64; m];
    let mut queue: BTreeSet<BinKey> = (0..m)
        .map(|j| (Reverse(OrderedFloat(residual[j])), Reverse(0), j))
        .collect();
    let mut heavy = vec![None; m];
    let mut assignment = Vec::with_capacity(instance.items.len());

    for (t, &item) in instance.items.iter().enumerate() {
        let &(_, _, j) = queue.first().expect("at least one bin");
        if matches!(mode, Mode::Overflow) && item > residual[j] + FIT_TOLERANCE {
            assignment.push(Slot::Overflow);
            continue;
        }
        queue.remove(&(Reverse(OrderedFloat(residual[j])), Reverse(stamp[j]), j));
        let before = residual[j];
        residual[j] -= item;
        if matches!(mode, Mode::Overstuff) && heavy[j].is_none() && residual[j] < 0.0 {
            heavy[j] = Some(before);
        }
        stamp[j] = t as u64 + 1;
        queue.insert((Reverse(OrderedFloat(residual[j])), Reverse(stamp[j]), j));
        assignment.push(Slot::Bin(j));
    }
    PackingResult::from_assignment(instance, assignment, heavy)
}

/// Best fit without overfilling: an item that does not fit in the bin with the
/// largest remaining capacity goes to the overflow set.
pub fn best_fit_overflow(instance: &PackingInstance) -> PackingResult {
    best_fit(instance, Mode::Overflow)
}

/// Best fit with overstuffing: every item goes to the bin with the largest
/// remaining capacity, even when it does not fit.
pub fn best_fit_overstuff(instance: &PackingInstance) -> PackingResult {
    best_fit(instance, Mode::Overstuff)
}

/// Total mismatch `sum_j |capacity_j - load_j|` split into its unused and
/// overstuffed parts.
pub fn mismatch(result: &PackingResult, instance: &PackingInstance) -> Result<Mismatch> {
    if !result.overflow.is_empty() {
        return Err(Error::OverflowPresent(result.overflow.len()));
    }
    if result.loads.len() != instance.bins() {
        return Err(Error::DimensionMismatch {
            expected: instance.bins(),
            found: result.loads.len(),
        });
    }
    let mut unused = 0.0;
    let mut over = 0.0;
    for (c, l) in instance.capacities.iter().zip(&result.loads) {
        let gap = c - l;
        if gap > 0.0 {
            unused += gap;
        } else {
            over -= gap;
        }
    }
    Ok(Mismatch {
        total: unused + over,
        unused,
        overstuffed: over,
    })
}

/// `base^exp` as a float, for comparing search-space sizes against a cap.
pub(crate) fn search_space(base: usize, exp: usize) -> f64 {
    (base as f64).powi(exp as i32)
}

pub(crate) fn check_cap(required: f64, cap: u64) -> Result<()> {
    if required > cap as f64 {
        Err(Error::SizeCapExceeded { required, cap })
    } else {
        Ok(())
    }
}

/// Optimal packing minimizing the unused capacity, by exhaustive search over
/// all `m^n` assignments.
///
/// Among assignments whose unused capacity is within 1e-12 of the optimum the
/// lexicographically smallest assignment vector is returned.
pub fn exact_pack(instance: &PackingInstance, size_cap: u64) -> Result<PackingResult> {
    let n = instance.items.len();
    let m = instance.bins();
    check_cap(search_space(m, n), size_cap)?;

    struct Search<'a> {
        items: &'a [f64],
        caps: &'a [f64],
        loads: Vec<f64>,
        current: Vec<usize>,
        best: Vec<usize>,
        best_unused: f64,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize) {
            if i == self.items.len() {
                let unused: f64 = self
                    .caps
                    .iter()
                    .zip(&self.loads)
                    .map(|(c, l)| (c - l).max(0.0))
                    .sum();
                if unused < self.best_unused - 1e-12 {
                    self.best_unused = unused;
                    self.best.copy_from_slice(&self.current);
                }
                return;
            }
            for j in 0..self.caps.len() {
                self.current[i] = j;
                self.loads[j] += self.items[i];
                self.run(i + 1);
                self.loads[j] -= self.items[i];
            }
        }
    }

    let mut search = Search {
        items: &instance.items,
        caps: &instance.capacities,
        loads: vec![0.0; m],
        current: vec![0; n],
        best: vec![0; n],
        best_unused: f64::INFINITY,
    };
    search.run(0);
    let assignment = search.best.iter().map(|&j| Slot::Bin(j)).collect();
    Ok(PackingResult::from_assignment(
        instance,
        assignment,
        vec![None; m],
    ))
}
