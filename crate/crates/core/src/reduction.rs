//! Order reduction: replacing a distribution on `n` symbols by an aggregation
//! on `m < n` symbols.
//!
//! The closest `m`-symbol distribution in the variation-of-information metric
//! is always an aggregation, and its distance is `H(phi) - H(aggregate)`. So
//! the best reduction is the aggregation of maximum entropy. [`exact_reduce`]
//! finds it by enumeration. [`greedy_reduce`] packs `phi` into `m` equal bins
//! with best fit.

use serde::Serialize;

use crate::binpack::{self, check_cap, search_space, PackingInstance, PackingResult};
use crate::error::{Error, Result};
use crate::info::{entropy, entropy_of, h, total_variation_of};
use crate::prob::Distribution;

/// Default tolerance on per-bin mismatch for [`is_aggregation`].
pub const DEFAULT_AGGREGATION_TOL: f64 = 1e-9;

/// A grouping of the source alphabet into `target_m` blocks together with the
/// summed distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregation {
    /// Block of each source symbol.
    pub partition: Vec<usize>,
    /// Block sums.
    pub psi_a: Distribution,
    pub source_n: usize,
    pub target_m: usize,
}

impl Aggregation {
    /// Source indices per block, ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.target_m];
        for (i, &b) in self.partition.iter().enumerate() {
            blocks[b].push(i);
        }
        blocks
    }
}

/// Sums `phi` over the blocks of `partition` (block labels `0..m`).
pub fn aggregate(phi: &Distribution, partition: &[usize], m: usize) -> Result<Aggregation> {
    if partition.len() != phi.len() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} symbols but the distribution has {}",
            partition.len(),
            phi.len()
        )));
    }
    if m == 0 {
        return Err(Error::InvalidPartition("no target blocks".into()));
    }
    let mut sums = vec![0.0; m];
    for (i, &b) in partition.iter().enumerate() {
        if b >= m {
            return Err(Error::InvalidPartition(format!(
                "symbol {i} mapped to block {b}, but only {m} blocks exist"
            )));
        }
        sums[b] += phi[i];
    }
    Ok(Aggregation {
        partition: partition.to_vec(),
        psi_a: Distribution::new(sums)?,
        source_n: phi.len(),
        target_m: m,
    })
}

/// Searches for a partition of `phi` whose block sums match `psi` within
/// `tol` per block.
///
/// Backtracking over items in index order and bins in index order; the first
/// witness found is returned. The search space is bounded by `m^n`, which must
/// not exceed `size_cap`.
pub fn is_aggregation(
    phi: &Distribution,
    psi: &Distribution,
    tol: f64,
    size_cap: u64,
) -> Result<Option<Vec<usize>>> {
    let n = phi.len();
    let m = psi.len();
    if m > n {
        return Ok(None);
    }
    check_cap(search_space(m, n), size_cap)?;

    // suffix[i] = mass of items i.. ; used to prune when the remaining items
    // cannot fill the remaining capacity.
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + phi[i];
    }

    fn search(
        i: usize,
        phi: &[f64],
        psi: &[f64],
        tol: f64,
        suffix: &[f64],
        loads: &mut [f64],
        current: &mut [usize],
    ) -> bool {
        if i == phi.len() {
            return loads.iter().zip(psi).all(|(l, c)| (l - c).abs() <= tol);
        }
        let missing: f64 = loads
            .iter()
            .zip(psi)
            .map(|(l, c)| (c - l - tol).max(0.0))
            .sum();
        if missing > suffix[i] + tol {
            return false;
        }
        for j in 0..psi.len() {
            if loads[j] + phi[i] > psi[j] + tol {
                continue;
            }
            loads[j] += phi[i];
            current[i] = j;
            if search(i + 1, phi, psi, tol, suffix, loads, current) {
                return true;
            }
            loads[j] -= phi[i];
        }
        false
    }

    let mut loads = vec![0.0; m];
    let mut current = vec![0; n];
    let found = search(
        0,
        phi.as_slice(),
        psi.as_slice(),
        tol,
        &suffix,
        &mut loads,
        &mut current,
    );
    Ok(found.then_some(current))
}

/// Result of a reduction together with its quality measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reduction {
    pub aggregation: Aggregation,
    /// `H(psi_a)`.
    pub entropy: f64,
    /// Distance to `phi`, which for an aggregation is `H(phi) - H(psi_a)`.
    pub distance: f64,
}

impl Reduction {
    fn new(phi: &Distribution, aggregation: Aggregation) -> Self {
        let entropy = entropy(&aggregation.psi_a);
        let distance = (crate::info::entropy(phi) - entropy).max(0.0);
        Self {
            aggregation,
            entropy,
            distance,
        }
    }
}

/// Greedy reduction outcome: the aggregation plus the packing that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyReduction {
    pub reduction: Reduction,
    /// Item processing order (identity unless presorted).
    pub order: Vec<usize>,
    /// Packing of the reordered items into `m` bins of size `1/m`.
    pub packing: PackingResult,
    /// Total variation between the aggregation and the uniform distribution.
    pub rho: f64,
    /// `0.25 m max(phi)`, the worst-case bound on `rho` for best fit.
    pub rho_bound: f64,
}

fn check_target(n: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("target size must be at least 1".into()));
    }
    if m > n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m,
        });
    }
    Ok(())
}

/// Best-fit aggregation into `m` bins of size `1/m`. With `presort` the
/// symbols are packed in descending order of probability.
pub fn greedy_reduce(phi: &Distribution, m: usize, presort: bool) -> Result<GreedyReduction> {
    check_target(phi.len(), m)?;
    let order: Vec<usize> = if presort {
        phi.descending_order()
    } else {
        (0..phi.len()).collect()
    };
    let items: Vec<f64> = order.iter().map(|&i| phi[i]).collect();
    let uniform = Distribution::uniform(m)?;
    let instance = PackingInstance::new(items, uniform.as_slice().to_vec())?;
    let packing = binpack::best_fit_overstuff(&instance);
    let sorted_partition = packing
        .partition()
        .expect("overstuff mode places every item");
    let mut partition = vec![0; phi.len()];
    for (k, &i) in order.iter().enumerate() {
        partition[i] = sorted_partition[k];
    }
    let aggregation = aggregate(phi, &partition, m)?;
    let rho = total_variation_of(aggregation.psi_a.as_slice(), uniform.as_slice())?;
    Ok(GreedyReduction {
        reduction: Reduction::new(phi, aggregation),
        order,
        packing,
        rho,
        rho_bound: 0.25 * m as f64 * phi.max(),
    })
}

/// Maximum-entropy aggregation into at most `m` blocks by enumerating set
/// partitions (restricted growth strings), which removes bin-label symmetry.
///
/// Ties are broken toward the lexicographically smallest block vector. The
/// `m^n` assignment count must not exceed `size_cap`.
pub fn exact_reduce(phi: &Distribution, m: usize, size_cap: u64) -> Result<Reduction> {
    let n = phi.len();
    check_target(n, m)?;
    check_cap(search_space(m, n), size_cap)?;

    struct Search<'a> {
        phi: &'a [f64],
        m: usize,
        sums: Vec<f64>,
        current: Vec<usize>,
        best: Vec<usize>,
        best_entropy: f64,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize, used: usize) {
            if i == self.phi.len() {
                let e: f64 = self.sums[..used].iter().map(|&x| h(x)).sum();
                if e > self.best_entropy + 1e-15 {
                    self.best_entropy = e;
                    self.best.copy_from_slice(&self.current);
                }
                return;
            }
            let limit = (used + 1).min(self.m);
            for b in 0..limit {
                self.current[i] = b;
                self.sums[b] += self.phi[i];
                self.run(i + 1, used.max(b + 1));
                self.sums[b] -= self.phi[i];
            }
        }
    }

    let mut search = Search {
        phi: phi.as_slice(),
        m,
        sums: vec![0.0; m],
        current: vec![0; n],
        best: vec![0; n],
        best_entropy: f64::NEG_INFINITY,
    };
    search.run(0, 0);
    let best = search.best;
    Ok(Reduction::new(phi, aggregate(phi, &best, m)?))
}

/// Worst-case check for best fit with arbitrary bin sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestFitBound {
    /// Total variation between bin loads and capacities.
    pub rho: f64,
    /// `0.25 m max(phi)`.
    pub bound: f64,
    pub ok: bool,
}

/// Packs `phi` into bins sized by `capacities` with overstuffing best fit and
/// compares the resulting total variation with `0.25 m max(phi)`.
pub fn best_fit_bound_check(phi: &Distribution, capacities: &Distribution) -> Result<BestFitBound> {
    let instance = PackingInstance::new(phi.as_slice().to_vec(), capacities.as_slice().to_vec())?;
    let packing = binpack::best_fit_overstuff(&instance);
    let rho = total_variation_of(&packing.loads, capacities.as_slice())?;
    let bound = 0.25 * capacities.len() as f64 * phi.max();
    Ok(BestFitBound {
        rho,
        bound,
        ok: rho <= bound + 1e-12,
    })
}

/// `G(lambda) = b H([lambda, 1 - lambda]) - H([c1 + lambda b, c2 + (1 - lambda) b])`.
///
/// Strictly above `min(G(0), G(1))` on the open interval, with its maximum at
/// `lambda = c1 / (c1 + c2)`.
pub fn split_profile(c1: f64, c2: f64, b: f64, lambda: f64) -> Result<f64> {
    if c1 <= 0.0 || c2 <= 0.0 || b <= 0.0 {
        return Err(Error::Domain("c1, c2 and b must be positive".into()));
    }
    if (c1 + c2 + b - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "c1 + c2 + b = {} is not 1",
            c1 + c2 + b
        )));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!(
            "lambda = {lambda} is outside [0, 1]"
        )));
    }
    Ok(b * entropy_of(&[lambda, 1.0 - lambda])
        - entropy_of(&[c1 + lambda * b, c2 + (1.0 - lambda) * b]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn aggregate_halves() {
        let a = aggregate(&dist(&[0.4, 0.3, 0.2, 0.1]), &[0, 1, 1, 0], 2).unwrap();
        assert_eq!(a.psi_a.as_slice(), &[0.5, 0.5]);
        assert_eq!(a.blocks(), vec![vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn identity_partition() {
        let phi = dist(&[0.1, 0.6, 0.3]);
        let a = aggregate(&phi, &[0, 1, 2], 3).unwrap();
        assert_eq!(a.psi_a, phi);
    }

    #[test]
    fn aggregate_rejects_bad_partitions() {
        let phi = dist(&[0.5, 0.5]);
        assert!(matches!(
            aggregate(&phi, &[0], 2),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            aggregate(&phi, &[0, 2], 2),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn aggregation_detection() {
        let phi = dist(&[0.5, 0.3, 0.2]);
        assert_eq!(
            is_aggregation(&phi, &dist(&[0.5, 0.5]), 1e-9, 1000).unwrap(),
            Some(vec![0, 1, 1])
        );
        assert_eq!(
            is_aggregation(&phi, &dist(&[0.6, 0.4]), 1e-9, 1000).unwrap(),
            None
        );
        let phi1 = dist(&[0.50, 0.24, 0.12, 0.071, 0.069]);
        assert_eq!(
            is_aggregation(&phi1, &dist(&[0.4, 0.6]), 1e-9, 1000).unwrap(),
            None
        );
    }

    #[test]
    fn exact_reduce_balanced_split() {
        let phi = dist(&[0.4, 0.3, 0.2, 0.1]);
        let r = exact_reduce(&phi, 2, 1000).unwrap();
        assert!((r.aggregation.psi_a[0] - 0.5).abs() < 1e-15);
        assert!((r.distance - (entropy(&phi) - 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn exact_reduce_three_symbols() {
        // Nontrivial 2-block partitions: {0}|{1,2}, {1}|{0,2}, {2}|{0,1}.
        let phi = dist(&[0.6, 0.2, 0.2]);
        let candidates = [[0.6, 0.4], [0.2, 0.8], [0.2, 0.8]];
        let best = candidates
            .iter()
            .map(|c| entropy_of(c))
            .fold(f64::NEG_INFINITY, f64::max);
        let r = exact_reduce(&phi, 2, 1000).unwrap();
        assert!((r.entropy - best).abs() < 1e-15);
        assert_eq!(r.aggregation.partition, vec![0, 1, 1]);
    }

    #[test]
    fn reduction_rejects_bad_targets() {
        let phi = dist(&[0.5, 0.5]);
        assert!(greedy_reduce(&phi, 3, false).is_err());
        assert!(greedy_reduce(&phi, 0, false).is_err());
        assert!(exact_reduce(&phi, 3, 1000).is_err());
        assert!(matches!(
            exact_reduce(&dist(&[0.1; 10]), 3, 1000),
            Err(Error::SizeCapExceeded { .. })
        ));
    }

    #[test]
    fn greedy_reduce_full_size_keeps_entropy() {
        let phi = dist(&[0.1, 0.2, 0.3, 0.4]);
        let g = greedy_reduce(&phi, 4, false).unwrap();
        assert!(g.reduction.distance.abs() < 1e-12);
    }

    #[test]
    fn bound_check_perfect_packing() {
        let phi = Distribution::uniform(6).unwrap();
        let caps = Distribution::uniform(3).unwrap();
        let b = best_fit_bound_check(&phi, &caps).unwrap();
        assert!(b.rho < 1e-15);
        assert!(b.ok);
    }

    #[test]
    fn split_profile_endpoints() {
        let (c1, c2, b) = (0.2, 0.3, 0.5);
        let g0 = split_profile(c1, c2, b, 0.0).unwrap();
        let g1 = split_profile(c1, c2, b, 1.0).unwrap();
        assert!((g0 + entropy_of(&[c1, c2 + b])).abs() < 1e-15);
        assert!((g1 + entropy_of(&[c1 + b, c2])).abs() < 1e-15);
        assert!(split_profile(0.2, 0.3, 0.6, 0.5).is_err());
        assert!(split_profile(c1, c2, b, 1.5).is_err());
    }

    #[test]
    fn split_profile_peak_on_grid() {
        let (c1, c2, b) = (0.25, 0.25, 0.5);
        let (mut arg, mut best) = (0.0, f64::NEG_INFINITY);
        for k in 0..=1000 {
            let lambda = k as f64 / 1000.0;
            let g = split_profile(c1, c2, b, lambda).unwrap();
            if g > best {
                best = g;
                arg = lambda;
            }
        }
        assert!((arg - 0.5_f64).abs() < 1e-12);
        let g03 = split_profile(c1, c2, b, 0.3).unwrap();
        let g0 = split_profile(c1, c2, b, 0.0).unwrap();
        let g1 = split_profile(c1, c2, b, 1.0).unwrap();
        assert!(g03 > g0.min(g1));
    }
}
