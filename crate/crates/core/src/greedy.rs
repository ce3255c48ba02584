//! Multi-round best-fit upper bound on the distance `d(phi, psi)`.
//!
//! Round `s` packs the symbols of `phi_s` into bins `psi_s` with best fit.
//! Items that fit nowhere form the overflow set `K_s`; the residual
//! capacities `alpha_s` (total `c_s`) and the overflow items, both rescaled by
//! `1 / c_s`, become `phi_{s+1}` and `psi_{s+1}`. The recursion stops when
//! `|K_s| <= 1`, and a backward pass assembles the conditional matrices:
//!
//! ```text
//! V_s = c_s U_{s+1}        U_s = V_s + H(phi_s) - H(psi_s)
//! ```
//!
//! Overflow item `K_s[t]` (ascending) takes row `t` of `Q_{s+1}` as its row of
//! `P_s`. The bound is `d(phi, psi) <= V_1 + U_1`.

use serde::Serialize;

use crate::binpack::{best_fit_overflow, PackingInstance, Slot, DEFAULT_SIZE_CAP};
use crate::error::{Error, Result};
use crate::info::{conditional_from_joint, entropy, entropy_of, joint_from_conditional};
use crate::prob::{ConditionalMatrix, Distribution, Matrix, Orientation};
use crate::transport::exact_n_by_2;

/// Tuning knobs for [`greedy_metric_bound_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GreedyOptions {
    /// Rounds with two bins and at most this many items are solved exactly
    /// instead of by best fit. Zero disables the exact tail.
    pub exact_tail_max_items: usize,
    /// Search-space cap passed to the exact tail solver.
    pub size_cap: u64,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self {
            exact_tail_max_items: 16,
            size_cap: DEFAULT_SIZE_CAP,
        }
    }
}

/// How a round's matrix was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundSolver {
    BestFit,
    ExactTwoBin,
}

/// One round of the recursion. Indices are zero-based and refer to the
/// round's own `phi` and `psi`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    /// One-based round number.
    pub round: usize,
    pub n: usize,
    pub m: usize,
    pub phi: Distribution,
    pub psi: Distribution,
    /// Items placed whole in each bin, ascending.
    pub assignments: Vec<Vec<usize>>,
    /// Items placed in no bin (or split, in an exact round), ascending.
    pub overflow: Vec<usize>,
    /// Residual capacity of each bin.
    pub alpha: Vec<f64>,
    /// Total residual capacity.
    pub c: f64,
    pub v: f64,
    pub u: f64,
    /// `n x m` forward matrix with `phi P = psi`.
    pub p: ConditionalMatrix,
    /// `m x n` reverse matrix of the same coupling.
    pub q: ConditionalMatrix,
    pub solver: RoundSolver,
}

/// Result of the greedy bound with its full per-round trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyMmiTrace {
    /// Rounds of the run that produced the bound. When `swapped` is set they
    /// describe the run on `(psi, phi)`.
    pub rounds: Vec<RoundRecord>,
    /// Upper bound on `V(phi, psi)`, equal to `J_phi(P)`.
    pub v_bound: f64,
    /// Upper bound on `V(psi, phi)`.
    pub u_bound: f64,
    pub d_bound: f64,
    /// `n x m` forward matrix in the caller's index order.
    pub p: ConditionalMatrix,
    /// The recursion ran on `(psi, phi)` because `n < m`.
    pub swapped: bool,
}

/// Greedy bound with the default options.
pub fn greedy_metric_bound(phi: &Distribution, psi: &Distribution) -> Result<GreedyMmiTrace> {
    greedy_metric_bound_with(phi, psi, GreedyOptions::default())
}

pub fn greedy_metric_bound_with(
    phi: &Distribution,
    psi: &Distribution,
    options: GreedyOptions,
) -> Result<GreedyMmiTrace> {
    if phi.len() >= psi.len() {
        let run = run_sorted(phi, psi, options)?;
        return Ok(GreedyMmiTrace {
            v_bound: run.v,
            u_bound: run.u,
            d_bound: run.v + run.u,
            p: run.p,
            rounds: run.rounds,
            swapped: false,
        });
    }
    let run = run_sorted(psi, phi, options)?;
    let theta = joint_from_conditional(psi, &run.p)?;
    let reverse = conditional_from_joint(&theta, Orientation::Reverse);
    let p =
        ConditionalMatrix::from_matrix_unchecked(reverse.matrix().clone(), Orientation::Forward);
    Ok(GreedyMmiTrace {
        v_bound: run.u,
        u_bound: run.v,
        d_bound: run.v + run.u,
        p,
        rounds: run.rounds,
        swapped: true,
    })
}

struct Run {
    rounds: Vec<RoundRecord>,
    v: f64,
    u: f64,
    p: ConditionalMatrix,
}

/// Drops empty bins, sorts the rest descending, runs the recursion and maps
/// the columns of `P` back to the caller's order.
fn run_sorted(phi: &Distribution, psi: &Distribution, options: GreedyOptions) -> Result<Run> {
    let order: Vec<usize> = psi
        .descending_order()
        .into_iter()
        .filter(|&j| psi[j] > 0.0)
        .collect();
    let sorted = Distribution::from_weights(order.iter().map(|&j| psi[j]).collect())?;
    let rounds = recurse(phi.clone(), sorted, options)?;
    let first = &rounds[0];
    let mut p = Matrix::zeros(phi.len(), psi.len());
    for i in 0..phi.len() {
        for (c, &j) in order.iter().enumerate() {
            p.set(i, j, first.p.get(i, c));
        }
    }
    Ok(Run {
        v: first.v,
        u: first.u,
        p: ConditionalMatrix::from_matrix_unchecked(p, Orientation::Forward),
        rounds,
    })
}

/// Runs the recursion on `psi` in the order given, without the sorting,
/// zero-bin removal and argument swap done by [`greedy_metric_bound_with`].
/// Useful for replaying a later round of a published trace.
pub fn greedy_rounds(
    phi: &Distribution,
    psi: &Distribution,
    options: GreedyOptions,
) -> Result<Vec<RoundRecord>> {
    if let Some(j) = psi.as_slice().iter().position(|&x| x <= 0.0) {
        return Err(Error::DegenerateInput(format!("bin {j} has zero capacity")));
    }
    recurse(phi.clone(), psi.clone(), options)
}

struct Forward {
    phi: Distribution,
    psi: Distribution,
    assignment: Vec<Slot>,
    assignments: Vec<Vec<usize>>,
    overflow: Vec<usize>,
    alpha: Vec<f64>,
    c: f64,
}

fn reverse_of(phi: &Distribution, p: &ConditionalMatrix) -> Result<ConditionalMatrix> {
    Ok(conditional_from_joint(
        &joint_from_conditional(phi, p)?,
        Orientation::Reverse,
    ))
}

fn record(
    f: Forward,
    round: usize,
    v: f64,
    p: ConditionalMatrix,
    solver: RoundSolver,
) -> Result<RoundRecord> {
    let q = reverse_of(&f.phi, &p)?;
    Ok(RoundRecord {
        round,
        n: f.phi.len(),
        m: f.psi.len(),
        u: v + entropy(&f.phi) - entropy(&f.psi),
        v,
        assignments: f.assignments,
        overflow: f.overflow,
        alpha: f.alpha,
        c: f.c,
        phi: f.phi,
        psi: f.psi,
        p,
        q,
        solver,
    })
}

fn recurse(
    phi: Distribution,
    psi: Distribution,
    options: GreedyOptions,
) -> Result<Vec<RoundRecord>> {
    let mut forward: Vec<Forward> = Vec::new();
    let (mut phi_s, mut psi_s) = (phi, psi);
    let last = loop {
        let (n, m) = (phi_s.len(), psi_s.len());
        if n < m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: n,
            });
        }
        if m == 2 && n <= options.exact_tail_max_items {
            let exact = exact_n_by_2(&phi_s, &psi_s, options.size_cap)?;
            let f = exact_round(phi_s, psi_s, &exact.p);
            break record(
                f,
                forward.len() + 1,
                exact.v,
                exact.p,
                RoundSolver::ExactTwoBin,
            )?;
        }

        let instance = PackingInstance::new(phi_s.as_slice().to_vec(), psi_s.as_slice().to_vec())?;
        let packing = best_fit_overflow(&instance);
        let alpha = packing.slack.clone();
        let c: f64 = alpha.iter().sum();
        let f = Forward {
            assignments: packing.bins(),
            overflow: packing.overflow.clone(),
            assignment: packing.assignment,
            alpha,
            c,
            phi: phi_s,
            psi: psi_s,
        };
        let k = f.overflow.len();
        if k >= m {
            return Err(Error::DegenerateInput(format!(
                "{k} overflow items for {m} bins"
            )));
        }
        if k <= 1 {
            let mut p = Matrix::zeros(n, m);
            let mut v = 0.0;
            for (i, slot) in f.assignment.iter().enumerate() {
                match *slot {
                    Slot::Bin(j) => p.set(i, j, 1.0),
                    Slot::Overflow => {
                        let split: Vec<f64> = f.alpha.iter().map(|a| a / c).collect();
                        v = c * entropy_of(&split);
                        p.row_mut(i).copy_from_slice(&split);
                    }
                }
            }
            let p = ConditionalMatrix::new(p, Orientation::Forward)?;
            break record(f, forward.len() + 1, v, p, RoundSolver::BestFit)?;
        }
        phi_s = Distribution::from_weights(f.alpha.clone())?;
        psi_s = Distribution::from_weights(f.overflow.iter().map(|&i| f.phi[i]).collect())?;
        forward.push(f);
    };

    let mut rounds = vec![last];
    while let Some(f) = forward.pop() {
        let next = rounds.last().expect("at least one round");
        let (n, m) = (f.phi.len(), f.psi.len());
        let mut p = Matrix::zeros(n, m);
        for (i, slot) in f.assignment.iter().enumerate() {
            if let Slot::Bin(j) = *slot {
                p.set(i, j, 1.0);
            }
        }
        for (t, &i) in f.overflow.iter().enumerate() {
            p.row_mut(i).copy_from_slice(next.q.row(t));
        }
        let v = f.c * next.u;
        let p = ConditionalMatrix::new(p, Orientation::Forward)?;
        let round = forward.len() + 1;
        rounds.push(record(f, round, v, p, RoundSolver::BestFit)?);
    }
    rounds.reverse();
    Ok(rounds)
}

/// Describes an exactly solved two-bin round in packing terms: unit rows are
/// assignments and any other row is a split item.
fn exact_round(phi: Distribution, psi: Distribution, p: &ConditionalMatrix) -> Forward {
    let m = psi.len();
    let mut assignment = Vec::with_capacity(phi.len());
    let mut loads = vec![0.0; m];
    for i in 0..phi.len() {
        match (0..m).find(|&j| p.get(i, j) == 1.0) {
            Some(j) => {
                loads[j] += phi[i];
                assignment.push(Slot::Bin(j));
            }
            None => assignment.push(Slot::Overflow),
        }
    }
    let alpha: Vec<f64> = (0..m).map(|j| (psi[j] - loads[j]).max(0.0)).collect();
    let mut assignments = vec![Vec::new(); m];
    let mut overflow = Vec::new();
    for (i, slot) in assignment.iter().enumerate() {
        match *slot {
            Slot::Bin(j) => assignments[j].push(i),
            Slot::Overflow => overflow.push(i),
        }
    }
    Forward {
        c: alpha.iter().sum(),
        alpha,
        assignments,
        overflow,
        assignment,
        phi,
        psi,
    }
}
