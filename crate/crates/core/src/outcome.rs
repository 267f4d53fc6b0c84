//! Outcomes, their values, utility curves, money maps and the validated case
//! container that everything downstream consumes.

use std::collections::HashSet;

use crate::error::{Error, Result, ValidationReport};
use crate::scalar::Scalar;

/// The legally relevant outcomes of a case and the value of each one.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSpace<T> {
    labels: Vec<String>,
    values: Vec<T>,
}

impl<T: Scalar> OutcomeSpace<T> {
    pub fn new(labels: Vec<String>, values: Vec<T>) -> Result<Self> {
        let mut report = ValidationReport::default();
        check_space(&labels, &values, &mut report);
        if report.is_empty() {
            Ok(Self { labels, values })
        } else {
            Err(Error::Validation(report))
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn value(&self, i: usize) -> T {
        self.values[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

fn check_space<T: Scalar>(labels: &[String], values: &[T], report: &mut ValidationReport) {
    if labels.is_empty() {
        report.push("empty", "outcome space has no labels");
    }
    if labels.len() != values.len() {
        report.push(
            "shape",
            format!("{} labels but {} values", labels.len(), values.len()),
        );
    }
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            report.push("duplicate-label", format!("label `{l}` appears more than once"));
        }
    }
    for (l, v) in labels.iter().zip(values) {
        if !v.is_finite() {
            report.push("non-finite", format!("value of `{l}` is {v}"));
        }
    }
}

/// Probability weights over the outcomes of an [`OutcomeSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution<T> {
    weights: Vec<T>,
}

impl<T: Scalar> DiscreteDistribution<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        let mut report = ValidationReport::default();
        check_weights("distribution", &weights, &mut report);
        if report.is_empty() {
            Ok(Self { weights })
        } else {
            Err(Error::Validation(report))
        }
    }

    pub fn point_mass(len: usize, at: usize) -> Self {
        let mut weights = vec![T::zero(); len];
        weights[at] = T::one();
        Self { weights }
    }

    pub fn uniform(len: usize) -> Self {
        let w = T::one() / T::lit(len as f64);
        Self {
            weights: vec![w; len],
        }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> T {
        self.weights[i]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Indices carrying positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&i| self.weights[i] > T::zero())
            .collect()
    }

    pub fn expectation(&self, values: &[T]) -> T {
        self.weights.iter().zip(values).map(|(&w, &v)| w * v).sum()
    }
}

fn check_weights<T: Scalar>(name: &str, weights: &[T], report: &mut ValidationReport) {
    if weights.is_empty() {
        report.push("empty", format!("{name} has no weights"));
        return;
    }
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < T::zero() {
            report.push("negative-weight", format!("{name} weight {i} is {w}"));
        }
    }
    let total: T = weights.iter().copied().sum();
    if (total - T::one()).abs() > T::normalization_tol() {
        report.push(
            "normalization",
            format!("{name} weights sum to {total}, expected 1"),
        );
    }
}

/// Constant-relative-risk-aversion value of money,
/// `V(m) = (1 - m^(1-theta)) / (theta - 1)` with the log limit at `theta = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityCurve<T> {
    theta: T,
}

impl<T: Scalar> UtilityCurve<T> {
    pub fn new(theta: T) -> Result<Self> {
        if !(theta >= T::zero() && theta <= T::one()) {
            return Err(Error::Domain(format!(
                "risk aversion theta = {theta} is outside [0, 1]"
            )));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    fn near_log(&self) -> bool {
        (T::one() - self.theta).abs() < T::lit(1e-9)
    }

    /// Value of a positive amount of money.
    pub fn utility_value(&self, money: T) -> Result<T> {
        if !(money > T::zero()) || !money.is_finite() {
            return Err(Error::Domain(format!(
                "utility is defined for positive money only, got {money}"
            )));
        }
        if self.theta == T::zero() {
            return Ok(money - T::one());
        }
        let log_m = money.ln();
        if self.near_log() {
            return Ok(log_m);
        }
        // (m^k - 1) / k with k = 1 - theta, written with expm1 so the value
        // stays accurate as theta approaches one.
        let k = T::one() - self.theta;
        Ok((k * log_m).exp_m1() / k)
    }

    /// Inverse of [`utility_value`](Self::utility_value).
    pub fn money_equivalent(&self, value: T) -> Result<T> {
        if !value.is_finite() {
            return Err(Error::Domain(format!("value {value} is not finite")));
        }
        if self.theta == T::zero() {
            return Ok(value + T::one());
        }
        if self.near_log() {
            return Ok(value.exp());
        }
        let k = T::one() - self.theta;
        let base = k * value;
        // Range of the curve is (-1/k, inf).
        if !(base > -T::one()) {
            return Err(Error::Domain(format!(
                "value {value} is below the range of the utility curve (theta = {})",
                self.theta
            )));
        }
        Ok((base.ln_1p() / k).exp())
    }
}

impl<T: Scalar> UtilityCurve<T> {
    /// `M(v1 + x) - M(v1)` without subtracting two large money amounts.
    pub fn money_increment(&self, v1: T, x: T) -> Result<T> {
        let base = self.money_equivalent(v1)?;
        self.money_equivalent(v1 + x)?;
        if self.theta == T::zero() {
            return Ok(x);
        }
        if self.near_log() {
            return Ok(base * x.exp_m1());
        }
        // M(v) = (1 + k v)^(1/k), so the ratio M(v1 + x) / M(v1) is
        // (1 + k x / (1 + k v1))^(1/k).
        let k = T::one() - self.theta;
        let ratio = k * x / (T::one() + k * v1);
        Ok(base * (ratio.ln_1p() / k).exp_m1())
    }
}

/// Map from value to the amount of money that has that value.
#[derive(Debug, Clone, PartialEq)]
pub enum MoneyMap<T> {
    /// Money and value coincide.
    Identity,
    /// `M = V^{-1}` for a utility curve.
    InverseUtility(UtilityCurve<T>),
    /// Monotone tabulation, linearly interpolated. `values[i]` is worth
    /// `money[i]`; both strictly increasing.
    Tabulated { values: Vec<T>, money: Vec<T> },
}

impl<T: Scalar> MoneyMap<T> {
    pub fn crra(theta: T) -> Result<Self> {
        Ok(MoneyMap::InverseUtility(UtilityCurve::new(theta)?))
    }

    pub fn tabulated(values: Vec<T>, money: Vec<T>) -> Result<Self> {
        if values.len() != money.len() || values.len() < 2 {
            return Err(Error::Domain(
                "tabulated money map needs at least two (value, money) points of equal count".into(),
            ));
        }
        let increasing = |xs: &[T]| xs.windows(2).all(|w| w[0] < w[1]) && xs.iter().all(|x| x.is_finite());
        if !increasing(&values) || !increasing(&money) {
            return Err(Error::Domain(
                "tabulated money map must be strictly increasing in both columns".into(),
            ));
        }
        Ok(MoneyMap::Tabulated { values, money })
    }

    /// `M(v)`.
    pub fn money(&self, value: T) -> Result<T> {
        match self {
            MoneyMap::Identity => Ok(value),
            MoneyMap::InverseUtility(curve) => curve.money_equivalent(value),
            MoneyMap::Tabulated { values, money } => interpolate(values, money, value),
        }
    }

    /// `M^{-1}(m)`, the value of an amount of money.
    pub fn value(&self, amount: T) -> Result<T> {
        match self {
            MoneyMap::Identity => Ok(amount),
            MoneyMap::InverseUtility(curve) => curve.utility_value(amount),
            MoneyMap::Tabulated { values, money } => interpolate(money, values, amount),
        }
    }
}

fn interpolate<T: Scalar>(xs: &[T], ys: &[T], x: T) -> Result<T> {
    let (first, last) = (xs[0], xs[xs.len() - 1]);
    if !(x >= first && x <= last) {
        return Err(Error::Domain(format!(
            "{x} lies outside the tabulated range [{first}, {last}]"
        )));
    }
    let hi = xs.partition_point(|&p| p < x).max(1);
    let lo = hi - 1;
    if xs[hi] == x {
        return Ok(ys[hi]);
    }
    let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    Ok(ys[lo] + t * (ys[hi] - ys[lo]))
}

/// Money awarded for raising the victim's value from `v1` by `x`:
/// `M(v1 + x) - M(v1)`.
pub fn award_from_compensation<T: Scalar>(money: &MoneyMap<T>, v1: T, x: T) -> Result<T> {
    if x < T::zero() || x.is_nan() {
        return Err(Error::Contract(format!(
            "compensation must be non-negative, got {x}"
        )));
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    match money {
        MoneyMap::InverseUtility(curve) => curve.money_increment(v1, x),
        _ => Ok(money.money(v1 + x)? - money.money(v1)?),
    }
}

/// Unvalidated case facts, as read from a file or built by a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseDraft<T> {
    pub labels: Vec<String>,
    pub values: Vec<T>,
    pub counterfactual: Vec<T>,
    pub factual: Vec<T>,
    pub money: MoneyMap<T>,
    pub factual_observed: Option<usize>,
}

/// A validated single-stage case: outcomes, both scenario laws and the money map.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseModel<T> {
    space: OutcomeSpace<T>,
    counterfactual: DiscreteDistribution<T>,
    factual: DiscreteDistribution<T>,
    money: MoneyMap<T>,
    factual_observed: Option<usize>,
}

/// Checks every invariant of a draft and reports all violations at once.
pub fn validate_case<T: Scalar>(draft: CaseDraft<T>) -> Result<CaseModel<T>> {
    let mut report = ValidationReport::default();
    check_space(&draft.labels, &draft.values, &mut report);
    let n = draft.labels.len();
    for (name, w) in [
        ("counterfactual", &draft.counterfactual),
        ("factual", &draft.factual),
    ] {
        if w.len() != n {
            report.push(
                "shape",
                format!("{name} distribution has {} weights for {n} outcomes", w.len()),
            );
        }
        check_weights(name, w, &mut report);
    }
    if let Some(o) = draft.factual_observed {
        match draft.factual.get(o) {
            None => report.push("observed", format!("observed outcome index {o} out of range")),
            Some(&w) if !(w > T::zero()) => {
                let label = draft.labels.get(o).map(String::as_str).unwrap_or("?");
                report.push(
                    "observed",
                    format!("observed outcome `{label}` has zero factual probability"),
                );
            }
            _ => {}
        }
    }
    if !report.is_empty() {
        return Err(Error::Validation(report));
    }
    Ok(CaseModel {
        space: OutcomeSpace {
            labels: draft.labels,
            values: draft.values,
        },
        counterfactual: DiscreteDistribution {
            weights: draft.counterfactual,
        },
        factual: DiscreteDistribution {
            weights: draft.factual,
        },
        money: draft.money,
        factual_observed: draft.factual_observed,
    })
}

impl<T: Scalar> CaseModel<T> {
    pub fn space(&self) -> &OutcomeSpace<T> {
        &self.space
    }

    pub fn counterfactual(&self) -> &DiscreteDistribution<T> {
        &self.counterfactual
    }

    pub fn factual(&self) -> &DiscreteDistribution<T> {
        &self.factual
    }

    pub fn money(&self) -> &MoneyMap<T> {
        &self.money
    }

    pub fn factual_observed(&self) -> Option<usize> {
        self.factual_observed
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// `E[V0] - E[V1]`.
    pub fn expected_gap(&self) -> T {
        self.counterfactual.expectation(self.space.values()) - self.factual.expectation(self.space.values())
    }

    /// Back to an editable draft (used by serializers).
    pub fn to_draft(&self) -> CaseDraft<T> {
        CaseDraft {
            labels: self.space.labels.clone(),
            values: self.space.values.clone(),
            counterfactual: self.counterfactual.weights.clone(),
            factual: self.factual.weights.clone(),
            money: self.money.clone(),
            factual_observed: self.factual_observed,
        }
    }
}
