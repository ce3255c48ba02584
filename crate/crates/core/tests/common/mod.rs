#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vimetric::info::entropy_of;
use vimetric::{ConditionalMatrix, Distribution, Matrix, Orientation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the open simplex.
pub fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> Distribution {
    let w: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-9)
        .collect();
    Distribution::from_weights(w).unwrap()
}

pub fn random_conditional(rng: &mut ChaCha8Rng, n: usize, m: usize) -> ConditionalMatrix {
    let mut rows = Matrix::zeros(n, m);
    for i in 0..n {
        rows.row_mut(i)
            .copy_from_slice(random_dist(rng, m).as_slice());
    }
    ConditionalMatrix::new(rows, Orientation::Forward).unwrap()
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

pub fn dist(v: &[f64]) -> Distribution {
    Distribution::from_weights(v.to_vec()).unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn load(name: &str) -> Distribution {
    vimetric::cli::io::read_distribution(&fixture(name), true).unwrap()
}

pub fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vimetric"))
        .args(args)
        .output()
        .expect("run vimetric")
}

pub fn cli_json(args: &[&str]) -> serde_json::Value {
    let out = cli(args);
    assert!(
        out.status.success(),
        "vimetric {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Converts one-based index sets to zero-based.
pub fn zero_based(sets: &[&[usize]]) -> Vec<Vec<usize>> {
    sets.iter()
        .map(|s| s.iter().map(|i| i - 1).collect())
        .collect()
}

/// Largest aggregate entropy over every map of `n` symbols into `m` labels.
/// Plain odometer enumeration, no symmetry reduction.
pub fn brute_force_max_aggregate_entropy(phi: &Distribution, m: usize) -> f64 {
    let n = phi.len();
    let mut labels = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    loop {
        let mut agg = vec![0.0; m];
        for (i, &l) in labels.iter().enumerate() {
            agg[l] += phi[i];
        }
        best = best.max(entropy_of(&agg));
        let mut k = 0;
        loop {
            if k == n {
                return best;
            }
            labels[k] += 1;
            if labels[k] < m {
                break;
            }
            labels[k] = 0;
            k += 1;
        }
    }
}

/// North-west corner coupling of `phi` and `psi` after reordering rows by
/// `rows` and columns by `cols`, returned in the original index order.
pub fn north_west_corner(
    phi: &Distribution,
    psi: &Distribution,
    rows: &[usize],
    cols: &[usize],
) -> Matrix {
    let mut theta = Matrix::zeros(phi.len(), psi.len());
    let mut a: Vec<f64> = rows.iter().map(|&i| phi[i]).collect();
    let mut b: Vec<f64> = cols.iter().map(|&j| psi[j]).collect();
    let (mut r, mut c) = (0, 0);
    while r < a.len() && c < b.len() {
        let x = a[r].min(b[c]);
        theta.set(rows[r], cols[c], x);
        a[r] -= x;
        b[c] -= x;
        if a[r] <= b[c] {
            r += 1;
        } else {
            c += 1;
        }
    }
    theta
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}
