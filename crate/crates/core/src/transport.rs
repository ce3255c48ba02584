//! Exact minimum-entropy couplings at desk scale.
//!
//! The coupling entropy `H(theta)` is concave, so its minimum over the
//! transportation polytope `{theta >= 0 : row sums phi, column sums psi}` is
//! attained at a vertex. Every vertex is the basic solution of some spanning
//! tree of the complete bipartite graph `K_{n,m}`, so enumerating the
//! `n^(m-1) m^(n-1)` spanning trees and solving each one by leaf elimination
//! visits every vertex.
//!
//! For two-symbol targets there are cheaper exact routes: a closed form for
//! the 2x2 case ([`closed_form_2x2`]) and a bin-packing based solver for the
//! `n x 2` case ([`exact_n_by_2`]).

use std::collections::HashSet;

use serde::Serialize;

use crate::binpack::{check_cap, exact_pack, search_space, PackingInstance, Slot};
use crate::error::{Error, Result};
use crate::info::{conditional_entropy, conditional_from_joint, entropy, entropy_of, h};
use crate::prob::{ConditionalMatrix, Distribution, JointDistribution, Matrix, Orientation};
use crate::reduction::{is_aggregation, DEFAULT_AGGREGATION_TOL};

/// Tree solutions with an entry below `-FEASIBILITY_TOL` are infeasible;
/// entries within the tolerance of zero are snapped to zero.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Vertices whose minimum entropies differ by less than this are ties; the
/// earlier one in enumeration order wins.
const TIE_TOL: f64 = 1e-12;

/// Number of spanning trees of `K_{n,m}`, as a float so that large sizes do
/// not overflow.
pub fn spanning_tree_count(n: usize, m: usize) -> f64 {
    search_space(n, m.saturating_sub(1)) * search_space(m, n.saturating_sub(1))
}

/// Minimum-entropy coupling and the derived information distances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricResult {
    /// Minimum joint entropy over all couplings.
    pub w: f64,
    /// Minimum `H(Y | X)`, i.e. `W - H(phi)`.
    pub v_phi_psi: f64,
    /// Minimum `H(X | Y)`, i.e. `W - H(psi)`.
    pub v_psi_phi: f64,
    /// Variation-of-information distance `2W - H(phi) - H(psi)`.
    pub d: f64,
    pub argmin_joint: JointDistribution,
    pub argmin_p: ConditionalMatrix,
}

impl MetricResult {
    pub(crate) fn from_joint(
        phi: &Distribution,
        psi: &Distribution,
        joint: JointDistribution,
    ) -> Self {
        let w = entropy_of(joint.matrix().as_slice());
        let v_phi_psi = (w - entropy(phi)).max(0.0);
        let v_psi_phi = (w - entropy(psi)).max(0.0);
        let argmin_p = conditional_from_joint(&joint, Orientation::Forward);
        Self {
            w,
            v_phi_psi,
            v_psi_phi,
            d: v_phi_psi + v_psi_phi,
            argmin_joint: joint,
            argmin_p,
        }
    }
}

/// Visits every spanning tree of `K_{n,m}` in lexicographic order of the
/// sorted edge list (edge `(i, j)` has rank `i * m + j`).
struct TreeWalk<'a, F> {
    n: usize,
    m: usize,
    visit: &'a mut F,
    comp: Vec<usize>,
    row_deg: Vec<usize>,
    col_deg: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl<F: FnMut(&[(usize, usize)])> TreeWalk<'_, F> {
    fn run(&mut self, e: usize) {
        let (n, m) = (self.n, self.m);
        let need = n + m - 1 - self.edges.len();
        if need == 0 {
            (self.visit)(&self.edges);
            return;
        }
        if n * m - e < need {
            return;
        }
        let (i, j) = (e / m, e % m);
        let (a, b) = (i, n + j);
        if self.comp[a] != self.comp[b] {
            let saved = self.comp.clone();
            let (keep, drop) = (self.comp[a], self.comp[b]);
            self.comp
                .iter_mut()
                .filter(|c| **c == drop)
                .for_each(|c| *c = keep);
            self.edges.push((i, j));
            self.row_deg[i] += 1;
            self.col_deg[j] += 1;
            self.run(e + 1);
            self.row_deg[i] -= 1;
            self.col_deg[j] -= 1;
            self.edges.pop();
            self.comp = saved;
        }
        // Skipping this edge must not strand row i or column j.
        if j == m - 1 && self.row_deg[i] == 0 {
            return;
        }
        if i == n - 1 && self.col_deg[j] == 0 {
            return;
        }
        self.run(e + 1);
    }
}

fn for_each_spanning_tree<F: FnMut(&[(usize, usize)])>(n: usize, m: usize, mut visit: F) {
    let mut walk = TreeWalk {
        n,
        m,
        visit: &mut visit,
        comp: (0..n + m).collect(),
        row_deg: vec![0; n],
        col_deg: vec![0; m],
        edges: Vec::with_capacity(n + m - 1),
    };
    walk.run(0);
}

/// Solves the tree's edge values from the marginals by repeatedly settling a
/// leaf. Returns false when the solution has a negative entry.
fn solve_tree(phi: &[f64], psi: &[f64], edges: &[(usize, usize)], out: &mut Matrix) -> bool {
    let n = phi.len();
    let nodes = n + psi.len();
    let mut supply: Vec<f64> = phi.iter().chain(psi).copied().collect();
    let mut deg = vec![0usize; nodes];
    for &(i, j) in edges {
        deg[i] += 1;
        deg[n + j] += 1;
    }
    let mut settled = vec![false; edges.len()];
    for x in 0..out.rows() {
        out.row_mut(x).iter_mut().for_each(|v| *v = 0.0);
    }
    for _ in 0..edges.len() {
        let leaf = match (0..nodes).find(|&v| deg[v] == 1) {
            Some(v) => v,
            None => return false,
        };
        let k = (0..edges.len())
            .find(|&k| !settled[k] && (edges[k].0 == leaf || n + edges[k].1 == leaf))
            .expect("a leaf has one open edge");
        let (i, j) = edges[k];
        let other = if leaf == i { n + j } else { i };
        let mut value = supply[leaf];
        if value < -FEASIBILITY_TOL {
            return false;
        }
        if value.abs() <= FEASIBILITY_TOL {
            value = 0.0;
        }
        out.set(i, j, value);
        settled[k] = true;
        supply[leaf] = 0.0;
        supply[other] -= value;
        deg[leaf] = 0;
        deg[other] -= 1;
    }
    true
}

fn check_tree_cap(phi: &Distribution, psi: &Distribution, size_cap: u64) -> Result<()> {
    check_cap(spanning_tree_count(phi.len(), psi.len()), size_cap)
}

/// Every vertex of the transportation polytope with marginals `phi` and `psi`,
/// each listed once, in order of first discovery.
pub fn vertex_joints(
    phi: &Distribution,
    psi: &Distribution,
    size_cap: u64,
) -> Result<Vec<JointDistribution>> {
    check_tree_cap(phi, psi, size_cap)?;
    let (n, m) = (phi.len(), psi.len());
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut theta = Matrix::zeros(n, m);
    for_each_spanning_tree(n, m, |edges| {
        if !solve_tree(phi.as_slice(), psi.as_slice(), edges, &mut theta) {
            return;
        }
        // A vertex is determined by its support.
        let support: Vec<bool> = theta.as_slice().iter().map(|&x| x > 0.0).collect();
        if seen.insert(support) {
            out.push(JointDistribution::from_matrix_unchecked(theta.clone()));
        }
    });
    Ok(out)
}

/// Exact minimum-entropy coupling by vertex enumeration.
///
/// The argmin is the first minimizing vertex in tree enumeration order.
pub fn exact_metric(phi: &Distribution, psi: &Distribution, size_cap: u64) -> Result<MetricResult> {
    check_tree_cap(phi, psi, size_cap)?;
    let (n, m) = (phi.len(), psi.len());
    let mut theta = Matrix::zeros(n, m);
    let mut best: Option<(f64, Matrix)> = None;
    for_each_spanning_tree(n, m, |edges| {
        if !solve_tree(phi.as_slice(), psi.as_slice(), edges, &mut theta) {
            return;
        }
        let e = entropy_of(theta.as_slice());
        match &best {
            Some((b, _)) if e >= b - TIE_TOL => {}
            _ => best = Some((e, theta.clone())),
        }
    });
    let (_, joint) = best.expect("the polytope always has a vertex");
    Ok(MetricResult::from_joint(
        phi,
        psi,
        JointDistribution::from_matrix_unchecked(joint),
    ))
}

/// `f_u(x) = x [h(u/x) + h(1 - u/x)]`, the cost of splitting a row of mass `x`
/// so that `u` of it goes to one column. Strictly increasing in `x`.
pub fn f_u(u: f64, x: f64) -> Result<f64> {
    if !(u > 0.0 && x > u) {
        return Err(Error::Domain(format!(
            "need 0 < u < x, got u = {u}, x = {x}"
        )));
    }
    Ok(x * (h(u / x) + h(1.0 - u / x)))
}

/// Minimum conditional entropy `V(phi, psi)` together with a minimizing
/// forward conditional matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coupling {
    pub v: f64,
    pub p: ConditionalMatrix,
}

fn two(d: &Distribution) -> Result<()> {
    if d.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: d.len(),
        });
    }
    Ok(())
}

/// Cost of `p` if it is a feasible conditional matrix (entries in `[0, 1]`).
fn candidate(phi: &[f64; 2], rows: [[f64; 2]; 2]) -> Option<(f64, [[f64; 2]; 2])> {
    if rows
        .iter()
        .flatten()
        .any(|&x| !(-1e-15..=1.0 + 1e-15).contains(&x))
    {
        return None;
    }
    let cost = phi[0] * entropy_of(&rows[0]) + phi[1] * entropy_of(&rows[1]);
    Some((cost, rows))
}

/// Closed-form `V(phi, psi)` for two two-symbol distributions.
///
/// With both vectors sorted ascending, case (a) `psi_1 < phi_1` is solved by
/// splitting the smaller source row and case (b) `phi_1 < psi_1` by splitting
/// the larger one. The competing extreme point is also evaluated and the
/// cheaper of the two returned, which covers boundary equalities.
pub fn closed_form_2x2(phi: &Distribution, psi: &Distribution) -> Result<Coupling> {
    two(phi)?;
    two(psi)?;
    let asc = |d: &Distribution| if d[0] <= d[1] { [0, 1] } else { [1, 0] };
    let (pa, qa) = (asc(phi), asc(psi));
    let f = [phi[pa[0]], phi[pa[1]]];
    let g = [psi[qa[0]], psi[qa[1]]];

    let sorted = if (f[0] - g[0]).abs() <= 1e-15 {
        (0.0, [[1.0, 0.0], [0.0, 1.0]])
    } else {
        // P11 keeps row 1 whole in column 2; P21 splits row 1; P12 splits row 2
        // after sending row 1 to column 1.
        let p11 = candidate(&f, [[0.0, 1.0], [g[0] / f[1], 1.0 - g[0] / f[1]]]);
        let (primary, other) = if g[0] < f[0] {
            (
                candidate(&f, [[g[0] / f[0], 1.0 - g[0] / f[0]], [0.0, 1.0]]),
                p11,
            )
        } else {
            (
                candidate(&f, [[1.0, 0.0], [1.0 - g[1] / f[1], g[1] / f[1]]]),
                p11,
            )
        };
        match (primary, other) {
            (Some(a), Some(b)) if b.0 < a.0 - 1e-15 => b,
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!("one extreme point is always feasible"),
        }
    };

    let mut rows = Matrix::zeros(2, 2);
    for (r, &i) in pa.iter().enumerate() {
        for (c, &j) in qa.iter().enumerate() {
            rows.set(i, j, sorted.1[r][c].clamp(0.0, 1.0));
        }
    }
    Ok(Coupling {
        v: sorted.0,
        p: ConditionalMatrix::new(rows, Orientation::Forward)?,
    })
}

/// Exact `V(phi, psi)` for a two-symbol `psi`.
///
/// If `psi` is an aggregation of `phi` the answer is zero. Otherwise an
/// optimal packing of `phi` (sorted descending) into bins `psi` is computed;
/// when the smallest item sits in the overstuffed bin, splitting that item by
/// the unused capacity `c` is optimal and costs `f_c(phi_min)`. In the
/// remaining case the optimum is found among all matrices with a single split
/// row.
pub fn exact_n_by_2(phi: &Distribution, psi: &Distribution, size_cap: u64) -> Result<Coupling> {
    two(psi)?;
    let n = phi.len();
    check_cap(search_space(2, n), size_cap)?;

    if let Some(partition) = is_aggregation(phi, psi, DEFAULT_AGGREGATION_TOL, size_cap)? {
        return Ok(Coupling {
            v: 0.0,
            p: ConditionalMatrix::from_partition(&partition, 2)?,
        });
    }

    let order = phi.descending_order();
    let items: Vec<f64> = order.iter().map(|&i| phi[i]).collect();
    let packing = exact_pack(
        &PackingInstance::new(items.clone(), psi.as_slice().to_vec())?,
        size_cap,
    )?;
    let c = packing.unused_capacity();
    let under = if packing.slack[0] > 0.0 { 0 } else { 1 };
    let over = 1 - under;
    let smallest = n - 1;
    if packing.assignment[smallest] == Slot::Bin(over) && items[smallest] > 0.0 && c > 0.0 {
        let x = items[smallest];
        let mut rows = Matrix::zeros(n, 2);
        for (k, &i) in order.iter().enumerate() {
            if k == smallest {
                rows.set(i, under, c / x);
                rows.set(i, over, (x - c) / x);
            } else if let Slot::Bin(b) = packing.assignment[k] {
                rows.set(i, b, 1.0);
            }
        }
        return Ok(Coupling {
            v: f_u(c, x)?,
            p: ConditionalMatrix::new(rows, Orientation::Forward)?,
        });
    }
    single_split_search(phi, psi)
}

/// Minimum of `J_phi(P)` over matrices whose rows are unit vectors except for
/// at most one row `k`; `u1` of row `k`'s mass goes to column 0.
pub(crate) fn single_split_search(phi: &Distribution, psi: &Distribution) -> Result<Coupling> {
    let n = phi.len();
    let full = 1usize << n;
    let mut sums = vec![0.0; full];
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + phi[low];
    }
    let mut best: Option<(f64, usize, usize, f64)> = None;
    for k in 0..n {
        let x = phi[k];
        if x <= 0.0 {
            continue;
        }
        for (mask, &sum) in sums.iter().enumerate() {
            if mask >> k & 1 == 1 {
                continue;
            }
            let u1 = psi[0] - sum;
            let u2 = x - u1;
            if u1 < -FEASIBILITY_TOL || u2 < -FEASIBILITY_TOL {
                continue;
            }
            let u1 = u1.clamp(0.0, x);
            let cost = x * entropy_of(&[u1 / x, 1.0 - u1 / x]);
            if best.is_none_or(|(b, ..)| cost < b - 1e-15) {
                best = Some((cost, k, mask, u1));
            }
        }
    }
    let (_, k, mask, u1) =
        best.ok_or_else(|| Error::DegenerateInput("no single-split matrix reaches psi".into()))?;
    let mut rows = Matrix::zeros(n, 2);
    for i in 0..n {
        if i == k {
            rows.set(i, 0, u1 / phi[k]);
            rows.set(i, 1, 1.0 - u1 / phi[k]);
        } else if mask >> i & 1 == 1 {
            rows.set(i, 0, 1.0);
        } else {
            rows.set(i, 1, 1.0);
        }
    }
    let p = ConditionalMatrix::new(rows, Orientation::Forward)?;
    Ok(Coupling {
        v: conditional_entropy(phi, &p)?,
        p,
    })
}
