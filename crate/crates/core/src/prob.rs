//! Probability vectors, joint distributions and stochastic matrices on finite
//! alphabets `{0, .., n-1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw inputs whose sum is within this distance of 1 are rescaled instead of
/// rejected. Printed data rounded to a few decimals lands here.
pub const NORMALIZATION_SLACK: f64 = 1e-6;

/// Components in `[-NEGATIVE_SLACK, 0)` are treated as rounding noise and set
/// to zero.
pub const NEGATIVE_SLACK: f64 = 1e-12;

/// Tolerance on row sums accepted by [`ConditionalMatrix::new`].
pub const ROW_SUM_SLACK: f64 = 1e-9;

/// A probability distribution on a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    p: Vec<f64>,
}

impl Distribution {
    /// Validates `values` and rescales them to an exact unit sum.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let p = checked_nonnegative(values)?;
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_SLACK {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self::rescaled(p, sum))
    }

    /// Normalizes an arbitrary nonnegative, nonzero weight vector.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let w = checked_nonnegative(weights)?;
        let sum: f64 = w.iter().sum();
        if sum <= 0.0 {
            return Err(Error::DegenerateInput("weights sum to zero".into()));
        }
        Ok(Self::rescaled(w, sum))
    }

    /// The uniform distribution with `m` components.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Empty);
        }
        Ok(Self {
            p: vec![1.0 / m as f64; m],
        })
    }

    fn rescaled(mut p: Vec<f64>, sum: f64) -> Self {
        if sum != 1.0 {
            p.iter_mut().for_each(|x| *x /= sum);
        }
        Self { p }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    /// Always false; kept for the `len`/`is_empty` convention.
    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.p
    }

    pub fn max(&self) -> f64 {
        self.p.iter().copied().fold(0.0, f64::max)
    }

    /// Reorders components so that `result[k] = self[order[k]]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: order.len(),
            });
        }
        let mut seen = vec![false; order.len()];
        for &i in order {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Domain(format!("{order:?} is not a permutation")));
            }
        }
        Ok(Self {
            p: order.iter().map(|&i| self.p[i]).collect(),
        })
    }

    /// Indices sorted by descending probability; equal values keep their
    /// original relative order.
    pub fn descending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.p[b].total_cmp(&self.p[a]));
        order
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.p[i]
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        Distribution::new(raw.p).map_err(serde::de::Error::custom)
    }
}

fn checked_nonnegative(mut values: Vec<f64>) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    for (index, x) in values.iter_mut().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if *x < 0.0 {
            if *x < -NEGATIVE_SLACK {
                return Err(Error::NegativeComponent { index, value: *x });
            }
            *x = 0.0;
        }
    }
    Ok(values)
}

/// A dense row-major `rows x cols` matrix of reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Empty);
        }
        let c = rows[0].len();
        if c == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, x) in sums.iter_mut().zip(self.row(i)) {
                *s += x;
            }
        }
        sums
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A joint distribution `theta[i][j] = Pr{X = i, Y = j}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    theta: Matrix,
}

impl JointDistribution {
    pub fn new(theta: Matrix) -> Result<Self> {
        let values = checked_nonnegative(theta.data.clone())?;
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_SLACK {
            return Err(Error::NotNormalized { sum });
        }
        let mut theta = Matrix {
            data: values,
            ..theta
        };
        if sum != 1.0 {
            theta.data.iter_mut().for_each(|x| *x /= sum);
        }
        Ok(Self { theta })
    }

    /// The product coupling `phi_i psi_j`.
    pub fn product(phi: &Distribution, psi: &Distribution) -> Self {
        let mut theta = Matrix::zeros(phi.len(), psi.len());
        for i in 0..phi.len() {
            for j in 0..psi.len() {
                theta.set(i, j, phi[i] * psi[j]);
            }
        }
        Self { theta }
    }

    pub(crate) fn from_matrix_unchecked(theta: Matrix) -> Self {
        Self { theta }
    }

    pub fn rows(&self) -> usize {
        self.theta.rows
    }

    pub fn cols(&self) -> usize {
        self.theta.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.theta.get(i, j)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.theta
    }

    pub fn transpose(&self) -> Self {
        Self {
            theta: self.theta.transpose(),
        }
    }

    /// Marginal on the row alphabet.
    pub fn row_marginal(&self) -> Distribution {
        Distribution {
            p: self.theta.row_sums(),
        }
    }

    /// Marginal on the column alphabet.
    pub fn col_marginal(&self) -> Distribution {
        Distribution {
            p: self.theta.col_sums(),
        }
    }

    /// Number of entries strictly above `tol`.
    pub fn support_size(&self, tol: f64) -> usize {
        self.theta.data.iter().filter(|&&x| x > tol).count()
    }
}

/// Which conditional law a [`ConditionalMatrix`] encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Row `i` is the law of `Y` given `X = i`.
    Forward,
    /// Row `j` is the law of `X` given `Y = j`.
    Reverse,
}

/// A row-stochastic matrix of conditional probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalMatrix {
    rows: Matrix,
    orientation: Orientation,
}

impl ConditionalMatrix {
    /// Validates nonnegativity and unit row sums (within 1e-9), then rescales
    /// each row to an exact unit sum.
    pub fn new(mut rows: Matrix, orientation: Orientation) -> Result<Self> {
        rows.data = checked_nonnegative(rows.data)?;
        for i in 0..rows.rows {
            let sum: f64 = rows.row(i).iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_SLACK {
                return Err(Error::NotStochastic { row: i, sum });
            }
            if sum != 1.0 {
                rows.row_mut(i).iter_mut().for_each(|x| *x /= sum);
            }
        }
        Ok(Self { rows, orientation })
    }

    pub fn identity(n: usize) -> Self {
        let mut rows = Matrix::zeros(n, n);
        for i in 0..n {
            rows.set(i, i, 1.0);
        }
        Self {
            rows,
            orientation: Orientation::Forward,
        }
    }

    /// The 0/1 matrix sending row `i` to column `partition[i]`.
    pub fn from_partition(partition: &[usize], cols: usize) -> Result<Self> {
        let mut rows = Matrix::zeros(partition.len(), cols);
        for (i, &j) in partition.iter().enumerate() {
            if j >= cols {
                return Err(Error::InvalidPartition(format!(
                    "item {i} sent to bin {j} but there are only {cols} bins"
                )));
            }
            rows.set(i, j, 1.0);
        }
        Self::new(rows, Orientation::Forward)
    }

    pub(crate) fn from_matrix_unchecked(rows: Matrix, orientation: Orientation) -> Self {
        Self { rows, orientation }
    }

    pub fn rows(&self) -> usize {
        self.rows.rows
    }

    pub fn cols(&self) -> usize {
        self.rows.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.rows.row(i)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.rows
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The distribution `phi P` reached by pushing `phi` through the rows.
    pub fn push_forward(&self, phi: &Distribution) -> Result<Vec<f64>> {
        if phi.len() != self.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                found: phi.len(),
            });
        }
        let mut out = vec![0.0; self.cols()];
        for i in 0..self.rows() {
            for (o, p) in out.iter_mut().zip(self.row(i)) {
                *o += phi[i] * p;
            }
        }
        Ok(out)
    }

    /// Permutes rows and columns: `result[i][j] = self[row_order[i]][col_order[j]]`.
    pub fn reindexed(&self, row_order: &[usize], col_order: &[usize]) -> Self {
        let mut m = Matrix::zeros(row_order.len(), col_order.len());
        for (i, &ri) in row_order.iter().enumerate() {
            for (j, &cj) in col_order.iter().enumerate() {
                m.set(i, j, self.get(ri, cj));
            }
        }
        Self {
            rows: m,
            orientation: self.orientation,
        }
    }
}

/// Base of the logarithm used when reporting information quantities.
///
/// The library computes everything in nats; every reported quantity
/// (entropy, `W`, `V`, `d`) scales by the same factor `1 / ln(base)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    Nats,
    #[serde(rename = "2")]
    Bits,
    #[serde(rename = "10")]
    Hartleys,
}

impl LogBase {
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Nats => nats,
            LogBase::Bits => nats / std::f64::consts::LN_2,
            LogBase::Hartleys => nats / std::f64::consts::LN_10,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LogBase::Nats => "e",
            LogBase::Bits => "2",
            LogBase::Hartleys => "10",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "nats" => Ok(LogBase::Nats),
            "2" | "bits" => Ok(LogBase::Bits),
            "10" | "hartleys" => Ok(LogBase::Hartleys),
            other => Err(Error::Domain(format!("unsupported log base {other:?}"))),
        }
    }
}
