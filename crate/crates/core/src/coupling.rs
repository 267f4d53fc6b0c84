//! Joint laws of the (counterfactual, factual) outcome pair.
//!
//! The latent connector between the two scenarios is never materialized; a
//! [`Coupling`] is the induced joint distribution, rows indexed by the
//! counterfactual outcome and columns by the factual outcome.

use std::fmt::Write as _;

use crate::error::{Axis, Error, Result};
use crate::outcome::{CaseModel, OutcomeSpace};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Domain("matrix rows have unequal lengths".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = self.data[i * self.cols + j] + v;
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).map(<[T]>::to_vec).collect()
    }

    pub fn total(&self) -> T {
        self.data.iter().copied().sum()
    }
}

/// How a coupling was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingOrigin {
    Evidence,
    Independence,
    Comonotone,
}

/// Joint law of `(O0, O1)` whose marginals are the case's two distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<T> {
    joint: Matrix<T>,
    space: OutcomeSpace<T>,
    origin: CouplingOrigin,
    tie_dependent: bool,
}

impl<T: Scalar> Coupling<T> {
    pub(crate) fn from_parts(joint: Matrix<T>, space: OutcomeSpace<T>, origin: CouplingOrigin) -> Self {
        Self {
            joint,
            space,
            origin,
            tie_dependent: false,
        }
    }

    pub fn joint(&self) -> &Matrix<T> {
        &self.joint
    }

    pub fn space(&self) -> &OutcomeSpace<T> {
        &self.space
    }

    pub fn origin(&self) -> CouplingOrigin {
        self.origin
    }

    /// Set when equal-valued outcomes carry mass, so another ordering of the
    /// tied outcomes would yield a different (equally cheap) coupling.
    pub fn tie_dependent(&self) -> bool {
        self.tie_dependent
    }

    pub fn mass(&self, cf: usize, f: usize) -> T {
        self.joint.get(cf, f)
    }

    /// `P(O1 = j)` under this joint.
    pub fn factual_mass(&self, j: usize) -> T {
        (0..self.joint.rows()).map(|i| self.joint.get(i, j)).sum()
    }

    /// `E[V0 | O1 = j]`, or `None` when `j` carries no mass.
    pub fn conditional_counterfactual_mean(&self, j: usize) -> Option<T> {
        let p = self.factual_mass(j);
        if !(p > T::zero()) {
            return None;
        }
        let s: T = (0..self.joint.rows())
            .map(|i| self.joint.get(i, j) * self.space.value(i))
            .sum();
        Some(s / p)
    }

    /// Audit CSV: `counterfactual,factual,mass`, one line per nonzero cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("counterfactual,factual,mass\n");
        for i in 0..self.joint.rows() {
            for j in 0..self.joint.cols() {
                let m = self.joint.get(i, j);
                if m > T::zero() {
                    let _ = writeln!(out, "{},{},{}", self.space.label(i), self.space.label(j), m);
                }
            }
        }
        out
    }
}

fn check_joint<T: Scalar>(model: &CaseModel<T>, joint: &Matrix<T>) -> Result<()> {
    let n = model.len();
    if joint.rows() != n || joint.cols() != n {
        return Err(Error::Domain(format!(
            "coupling is {}x{} but the outcome space has {n} outcomes",
            joint.rows(),
            joint.cols()
        )));
    }
    for i in 0..n {
        for j in 0..n {
            let m = joint.get(i, j);
            if !m.is_finite() || m < T::zero() {
                return Err(Error::Domain(format!("coupling entry ({i}, {j}) is {m}")));
            }
        }
    }
    let total = joint.total();
    if (total - T::one()).abs() > T::normalization_tol() {
        return Err(Error::Domain(format!(
            "coupling mass sums to {total}, expected 1"
        )));
    }
    let checks = [
        (Axis::Row, joint.row_sums(), model.counterfactual().weights()),
        (Axis::Column, joint.col_sums(), model.factual().weights()),
    ];
    for (axis, sums, marginal) in checks {
        for (index, (&found, &expected)) in sums.iter().zip(marginal).enumerate() {
            if (found - expected).abs() > T::marginal_tol() {
                return Err(Error::MarginalMismatch {
                    axis,
                    index,
                    expected: expected.as_f64(),
                    found: found.as_f64(),
                });
            }
        }
    }
    Ok(())
}

/// Coupling established by evidence, given as an explicit joint matrix.
pub fn evidence_coupling<T: Scalar>(model: &CaseModel<T>, joint: Matrix<T>) -> Result<Coupling<T>> {
    check_joint(model, &joint)?;
    Ok(Coupling {
        joint,
        space: model.space().clone(),
        origin: CouplingOrigin::Evidence,
        tie_dependent: false,
    })
}

/// Expands a deterministic map `counterfactual i -> factual map[i]` into a
/// joint matrix carrying the counterfactual weights.
pub fn deterministic_joint<T: Scalar>(model: &CaseModel<T>, map: &[usize]) -> Result<Matrix<T>> {
    let n = model.len();
    if map.len() != n || map.iter().any(|&j| j >= n) {
        return Err(Error::Domain(format!(
            "deterministic map must send each of the {n} outcomes to a valid outcome"
        )));
    }
    let mut joint = Matrix::zeros(n, n);
    for (i, &j) in map.iter().enumerate() {
        joint.add(i, j, model.counterfactual().weight(i));
    }
    Ok(joint)
}

/// Outer product of the two marginals.
pub fn independence_coupling<T: Scalar>(model: &CaseModel<T>) -> Coupling<T> {
    let n = model.len();
    let mut joint = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            joint.set(i, j, model.counterfactual().weight(i) * model.factual().weight(j));
        }
    }
    Coupling {
        joint,
        space: model.space().clone(),
        origin: CouplingOrigin::Independence,
        tie_dependent: false,
    }
}

/// Indices sorted by value; equal values keep label order.
pub(crate) fn value_order<T: Scalar>(values: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    idx
}

fn has_tie_in_support<T: Scalar>(values: &[T], weights: &[T]) -> bool {
    let order = value_order(values);
    let support: Vec<usize> = order.into_iter().filter(|&i| weights[i] > T::zero()).collect();
    support.windows(2).any(|w| values[w[0]] == values[w[1]])
}

/// Quantile coupling of two laws on (possibly different) value scales.
///
/// Pairs equal quantiles of `row_weights` sorted by `row_values` with
/// quantiles of `col_weights` sorted by `col_values`.
pub(crate) fn quantile_joint<T: Scalar>(
    row_values: &[T],
    row_weights: &[T],
    col_values: &[T],
    col_weights: &[T],
) -> Matrix<T> {
    let rows = value_order(row_values);
    let cols = value_order(col_values);
    let mut joint = Matrix::zeros(row_values.len(), col_values.len());
    let cumulative = |order: &[usize], w: &[T]| -> Vec<T> {
        let mut acc = T::zero();
        order
            .iter()
            .map(|&i| {
                acc = acc + w[i];
                acc
            })
            .collect()
    };
    let a = cumulative(&rows, row_weights);
    let b = cumulative(&cols, col_weights);
    let (mut i, mut j) = (0, 0);
    let mut prev = T::zero();
    while i < rows.len() && j < cols.len() {
        let end = a[i].min(b[j]);
        let mass = end - prev;
        if mass > T::zero() {
            joint.add(rows[i], cols[j], mass);
            prev = end;
        }
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    joint
}

/// Least-divergence coupling: the comonotone (quantile-matching) joint, which
/// minimizes `E[(V0 - V1)^2]` for a scalar value.
pub fn least_divergence_coupling<T: Scalar>(model: &CaseModel<T>) -> Coupling<T> {
    let values = model.space().values();
    let cf = model.counterfactual().weights();
    let f = model.factual().weights();
    let joint = quantile_joint(values, cf, values, f);
    Coupling {
        joint,
        space: model.space().clone(),
        origin: CouplingOrigin::Comonotone,
        tie_dependent: has_tie_in_support(values, cf) || has_tie_in_support(values, f),
    }
}

/// `sum joint(i, j) * (value(i) - value(j))^2`.
pub fn transport_cost<T: Scalar>(c: &Coupling<T>) -> T {
    let v = c.space().values();
    let n = v.len();
    let mut total = T::zero();
    for i in 0..n {
        for j in 0..n {
            let d = v[i] - v[j];
            total = total + c.mass(i, j) * d * d;
        }
    }
    total
}
