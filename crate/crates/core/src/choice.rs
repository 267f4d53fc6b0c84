//! Cases where the victim makes a choice before the result is drawn.
//!
//! Outcomes become `(choice, result)` pairs. The connection between the
//! scenarios is split into a choice channel and a result channel that do not
//! influence each other, choice presumptions fill in the counterfactual choice
//! when evidence is missing (or override it), and a mitigation offset nets out
//! what the victim owes for breaching their own duty.

use crate::coupling::{quantile_joint, Matrix};
use crate::error::{Error, Result, ValidationReport};
use crate::outcome::{validate_case, CaseDraft, CaseModel, DiscreteDistribution, MoneyMap, UtilityCurve};
use crate::scalar::{nearly_equal, Scalar};
use crate::valuation::{evaluate_policy, PolicyCombo};

/// Legal presumption about the counterfactual choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Presumption {
    /// IT-CP: applies only when there is no evidence.
    IurisTantum,
    /// II-CP: applies regardless of evidence.
    IurisEtDeIure,
}

/// What is known about the choice the victim would have made.
#[derive(Debug, Clone, PartialEq)]
pub enum CounterfactualChoice<T> {
    Evidence(DiscreteDistribution<T>),
    Presumed { choice: usize, presumption: Presumption },
    Unknown,
}

/// Unvalidated choice-case facts.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceDraft<T> {
    pub choices: Vec<String>,
    pub duty_set: Vec<usize>,
    pub results: Vec<String>,
    /// `values[c][r] = V(c, r)`.
    pub values: Vec<Vec<T>>,
    pub money: MoneyMap<T>,
    pub counterfactual_choice: Option<Vec<T>>,
    /// `P(R0 = r | C0 = c)`, one row per choice.
    pub result_given_choice_cf: Vec<Vec<T>>,
    /// `P(R1 = r | C1 = c)`, one row per choice.
    pub result_given_choice_f: Vec<Vec<T>>,
    /// Law of the factual choice; defaults to a point mass on `factual_choice`.
    pub factual_choice_law: Option<Vec<T>>,
    pub factual_choice: usize,
    pub factual_result: usize,
    /// Optional joint of `(C0, C1)`; defaults to the product of the two laws.
    pub choice_coupling: Option<Matrix<T>>,
    /// Optional result couplings for specific `(c0, c1)` pairs; the rest are
    /// comonotone in value.
    pub result_couplings: Vec<((usize, usize), Matrix<T>)>,
}

/// A validated choice case.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceCaseModel<T> {
    choices: Vec<String>,
    duty_set: Vec<usize>,
    results: Vec<String>,
    values: Vec<Vec<T>>,
    money: MoneyMap<T>,
    counterfactual_choice: CounterfactualChoice<T>,
    result_given_choice_cf: Vec<DiscreteDistribution<T>>,
    result_given_choice_f: Vec<DiscreteDistribution<T>>,
    factual_choice_law: DiscreteDistribution<T>,
    factual_choice: usize,
    factual_result: usize,
    choice_coupling: Option<Matrix<T>>,
    result_couplings: Vec<((usize, usize), Matrix<T>)>,
    notes: Vec<String>,
}

fn distribution<T: Scalar>(
    name: &str,
    w: Vec<T>,
    len: usize,
    report: &mut ValidationReport,
) -> Option<DiscreteDistribution<T>> {
    if w.len() != len {
        report.push("shape", format!("{name} has {} weights, expected {len}", w.len()));
        return None;
    }
    match DiscreteDistribution::new(w) {
        Ok(d) => Some(d),
        Err(Error::Validation(r)) => {
            for v in r.violations {
                report.push(v.kind, format!("{name}: {}", v.message));
            }
            None
        }
        Err(e) => {
            report.push("invalid", format!("{name}: {e}"));
            None
        }
    }
}

impl<T: Scalar> ChoiceCaseModel<T> {
    pub fn new(d: ChoiceDraft<T>) -> Result<Self> {
        let mut report = ValidationReport::default();
        let (nc, nr) = (d.choices.len(), d.results.len());
        if nc == 0 || nr == 0 {
            report.push("empty", "choice cases need at least one choice and one result");
        }
        for (kind, labels) in [("choices", &d.choices), ("results", &d.results)] {
            let mut sorted: Vec<&String> = labels.iter().collect();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                report.push("duplicate-label", format!("{kind} contain a repeated label"));
            }
        }
        if d.duty_set.is_empty() {
            report.push("duty", "duty set is empty");
        }
        if d.duty_set.iter().any(|&c| c >= nc) {
            report.push("duty", "duty set refers to an unknown choice");
        }
        if d.values.len() != nc || d.values.iter().any(|row| row.len() != nr) {
            report.push("shape", format!("values must be a {nc} x {nr} table"));
        } else if d.values.iter().flatten().any(|v| !v.is_finite()) {
            report.push("non-finite", "values contain a non-finite entry");
        }
        let cond = |name: &str, rows: Vec<Vec<T>>, report: &mut ValidationReport| {
            if rows.len() != nc {
                report.push("shape", format!("{name} needs one row per choice"));
                return Vec::new();
            }
            rows.into_iter()
                .enumerate()
                .filter_map(|(c, w)| distribution(&format!("{name}[{c}]"), w, nr, report))
                .collect::<Vec<_>>()
        };
        let cf = cond("result_given_choice_cf", d.result_given_choice_cf, &mut report);
        let f = cond("result_given_choice_f", d.result_given_choice_f, &mut report);
        let counterfactual_choice = match d.counterfactual_choice {
            Some(w) => distribution("counterfactual_choice", w, nc, &mut report)
                .map_or(CounterfactualChoice::Unknown, CounterfactualChoice::Evidence),
            None => CounterfactualChoice::Unknown,
        };
        if d.factual_choice >= nc || d.factual_result >= nr {
            report.push("observed", "factual choice or result is out of range");
        }
        let factual_choice_law = match d.factual_choice_law {
            Some(w) => distribution("factual_choice_law", w, nc, &mut report),
            None if d.factual_choice < nc => Some(DiscreteDistribution::point_mass(nc, d.factual_choice)),
            None => None,
        };
        if report.is_empty() {
            let law = factual_choice_law.as_ref().expect("validated");
            if !(law.weight(d.factual_choice) > T::zero())
                || !(f[d.factual_choice].weight(d.factual_result) > T::zero())
            {
                report.push(
                    "observed",
                    "the factual (choice, result) pair has zero probability",
                );
            }
        }
        if !report.is_empty() {
            return Err(Error::Validation(report));
        }
        let mut duty_set = d.duty_set;
        duty_set.sort_unstable();
        duty_set.dedup();
        Ok(Self {
            choices: d.choices,
            duty_set,
            results: d.results,
            values: d.values,
            money: d.money,
            counterfactual_choice,
            result_given_choice_cf: cf,
            result_given_choice_f: f,
            factual_choice_law: factual_choice_law.expect("validated"),
            factual_choice: d.factual_choice,
            factual_result: d.factual_result,
            choice_coupling: d.choice_coupling,
            result_couplings: d.result_couplings,
            notes: Vec::new(),
        })
    }

    pub fn choices(&self) -> &[String] {
        &self.choices
    }

    pub fn results(&self) -> &[String] {
        &self.results
    }

    pub fn duty_set(&self) -> &[usize] {
        &self.duty_set
    }

    pub fn value(&self, c: usize, r: usize) -> T {
        self.values[c][r]
    }

    pub fn money(&self) -> &MoneyMap<T> {
        &self.money
    }

    pub fn counterfactual_choice(&self) -> &CounterfactualChoice<T> {
        &self.counterfactual_choice
    }

    /// The presumed counterfactual choice, if a presumption has been applied.
    pub fn counterfactual_choice_index(&self) -> Option<usize> {
        match self.counterfactual_choice {
            CounterfactualChoice::Presumed { choice, .. } => Some(choice),
            _ => None,
        }
    }

    pub fn factual_choice(&self) -> usize {
        self.factual_choice
    }

    pub fn factual_result(&self) -> usize {
        self.factual_result
    }

    pub fn result_given_choice_cf(&self, c: usize) -> &DiscreteDistribution<T> {
        &self.result_given_choice_cf[c]
    }

    pub fn result_given_choice_f(&self, c: usize) -> &DiscreteDistribution<T> {
        &self.result_given_choice_f[c]
    }

    pub fn factual_choice_law(&self) -> &DiscreteDistribution<T> {
        &self.factual_choice_law
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn is_dutiful(&self, c: usize) -> bool {
        self.duty_set.contains(&c)
    }

    /// `E[V0 | C0 = c]`.
    pub fn expected_counterfactual_value(&self, c: usize) -> T {
        self.result_given_choice_cf[c].expectation(&self.values[c])
    }

    /// Law of `C0` once evidence or a presumption has fixed it.
    pub fn resolved_choice_law(&self) -> Result<DiscreteDistribution<T>> {
        match &self.counterfactual_choice {
            CounterfactualChoice::Evidence(d) => Ok(d.clone()),
            CounterfactualChoice::Presumed { choice, .. } => {
                Ok(DiscreteDistribution::point_mass(self.choices.len(), *choice))
            }
            CounterfactualChoice::Unknown => Err(Error::Config(
                "the counterfactual choice is neither proven nor presumed; apply a presumption first".into(),
            )),
        }
    }

    /// Back to an editable draft (the counterfactual choice is kept only when
    /// it came from evidence).
    pub fn to_draft(&self) -> ChoiceDraft<T> {
        ChoiceDraft {
            choices: self.choices.clone(),
            duty_set: self.duty_set.clone(),
            results: self.results.clone(),
            values: self.values.clone(),
            money: self.money.clone(),
            counterfactual_choice: match &self.counterfactual_choice {
                CounterfactualChoice::Evidence(d) => Some(d.weights().to_vec()),
                _ => None,
            },
            result_given_choice_cf: self
                .result_given_choice_cf
                .iter()
                .map(|d| d.weights().to_vec())
                .collect(),
            result_given_choice_f: self
                .result_given_choice_f
                .iter()
                .map(|d| d.weights().to_vec())
                .collect(),
            factual_choice_law: Some(self.factual_choice_law.weights().to_vec()),
            factual_choice: self.factual_choice,
            factual_result: self.factual_result,
            choice_coupling: self.choice_coupling.clone(),
            result_couplings: self.result_couplings.clone(),
        }
    }
}

/// Joint law of `(C0, R0, C1, R1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceJoint<T> {
    choices: usize,
    results: usize,
    data: Vec<T>,
}

impl<T: Scalar> ChoiceJoint<T> {
    #[inline]
    fn idx(&self, c0: usize, r0: usize, c1: usize, r1: usize) -> usize {
        ((c0 * self.results + r0) * self.choices + c1) * self.results + r1
    }

    pub fn get(&self, c0: usize, r0: usize, c1: usize, r1: usize) -> T {
        self.data[self.idx(c0, r0, c1, r1)]
    }

    pub fn choices(&self) -> usize {
        self.choices
    }

    pub fn results(&self) -> usize {
        self.results
    }

    pub fn total(&self) -> T {
        self.data.iter().copied().sum()
    }

    /// `P(C0 = c0, C1 = c1, R1 = r1)`.
    fn c0_c1_r1(&self, c0: usize, c1: usize, r1: usize) -> T {
        (0..self.results).map(|r0| self.get(c0, r0, c1, r1)).sum()
    }

    /// Largest `|P(c0, r1 | c1) - P(c0 | c1) P(r1 | c1)|` over all cells.
    pub fn max_c0_r1_dependence_given_c1(&self) -> T {
        let mut worst = T::zero();
        for c1 in 0..self.choices {
            let p_c1: T = (0..self.choices)
                .flat_map(|c0| (0..self.results).map(move |r1| (c0, r1)))
                .map(|(c0, r1)| self.c0_c1_r1(c0, c1, r1))
                .sum();
            if !(p_c1 > T::zero()) {
                continue;
            }
            for c0 in 0..self.choices {
                let p_c0: T = (0..self.results).map(|r1| self.c0_c1_r1(c0, c1, r1)).sum();
                for r1 in 0..self.results {
                    let p_r1: T = (0..self.choices).map(|k| self.c0_c1_r1(k, c1, r1)).sum();
                    let joint = self.c0_c1_r1(c0, c1, r1) / p_c1;
                    let d = (joint - (p_c0 / p_c1) * (p_r1 / p_c1)).abs();
                    worst = worst.max(d);
                }
            }
        }
        worst
    }

    /// Conditional mutual information `I(C0; R1 | C1)` in nats.
    pub fn conditional_mutual_information_c0_r1_given_c1(&self) -> T {
        let mut total = T::zero();
        for c1 in 0..self.choices {
            let p_c1: T = (0..self.choices)
                .flat_map(|c0| (0..self.results).map(move |r1| (c0, r1)))
                .map(|(c0, r1)| self.c0_c1_r1(c0, c1, r1))
                .sum();
            if !(p_c1 > T::zero()) {
                continue;
            }
            for c0 in 0..self.choices {
                let p_c0c1: T = (0..self.results).map(|r1| self.c0_c1_r1(c0, c1, r1)).sum();
                for r1 in 0..self.results {
                    let p = self.c0_c1_r1(c0, c1, r1);
                    if !(p > T::zero()) {
                        continue;
                    }
                    let p_r1c1: T = (0..self.choices).map(|k| self.c0_c1_r1(k, c1, r1)).sum();
                    total = total + p * (p * p_c1 / (p_c0c1 * p_r1c1)).ln();
                }
            }
        }
        total
    }
}

fn check_matrix_marginals<T: Scalar>(name: &str, m: &Matrix<T>, rows: &[T], cols: &[T]) -> Result<()> {
    if m.rows() != rows.len() || m.cols() != cols.len() {
        return Err(Error::Domain(format!(
            "{name} is {}x{}, expected {}x{}",
            m.rows(),
            m.cols(),
            rows.len(),
            cols.len()
        )));
    }
    let ok = |sums: Vec<T>, want: &[T]| {
        sums.iter()
            .zip(want)
            .all(|(&a, &b)| (a - b).abs() <= T::marginal_tol())
    };
    if !ok(m.row_sums(), rows) || !ok(m.col_sums(), cols) {
        return Err(Error::Domain(format!("{name} does not reproduce its marginals")));
    }
    Ok(())
}

/// Assembles the joint law with separate choice and result channels.
///
/// Given the factual choice, the factual result carries no information about
/// the counterfactual choice: each `(c0, c1)` block is a coupling of
/// `P(R0 | c0)` and `P(R1 | c1)`.
pub fn vk_factorize<T: Scalar>(model: &ChoiceCaseModel<T>) -> Result<ChoiceJoint<T>> {
    let nc = model.choices.len();
    let nr = model.results.len();
    let cf_law = model.resolved_choice_law()?;
    let f_law = &model.factual_choice_law;
    let choice_joint = match &model.choice_coupling {
        Some(m) => {
            check_matrix_marginals("choice coupling", m, cf_law.weights(), f_law.weights())?;
            m.clone()
        }
        None => {
            let mut m = Matrix::zeros(nc, nc);
            for c0 in 0..nc {
                for c1 in 0..nc {
                    m.set(c0, c1, cf_law.weight(c0) * f_law.weight(c1));
                }
            }
            m
        }
    };
    let mut joint = ChoiceJoint {
        choices: nc,
        results: nr,
        data: vec![T::zero(); nc * nr * nc * nr],
    };
    for c0 in 0..nc {
        for c1 in 0..nc {
            let pc = choice_joint.get(c0, c1);
            let r0 = model.result_given_choice_cf[c0].weights();
            let r1 = model.result_given_choice_f[c1].weights();
            let results = match model.result_couplings.iter().find(|(k, _)| *k == (c0, c1)) {
                Some((_, m)) => {
                    check_matrix_marginals(
                        &format!("result coupling ({}, {})", model.choices[c0], model.choices[c1]),
                        m,
                        r0,
                        r1,
                    )?;
                    m.clone()
                }
                None => quantile_joint(&model.values[c0], r0, &model.values[c1], r1),
            };
            if !(pc > T::zero()) {
                continue;
            }
            for a in 0..nr {
                for b in 0..nr {
                    let i = joint.idx(c0, a, c1, b);
                    joint.data[i] = pc * results.get(a, b);
                }
            }
        }
    }
    Ok(joint)
}

/// The choice in the duty set with the highest expected counterfactual value;
/// ties go to the factual choice, then to the earliest listed choice.
fn presumed_choice<T: Scalar>(model: &ChoiceCaseModel<T>) -> Result<usize> {
    if model.duty_set.is_empty() {
        return Err(Error::Config("duty set is empty".into()));
    }
    let mut best = model.duty_set[0];
    let mut best_value = model.expected_counterfactual_value(best);
    for &c in &model.duty_set[1..] {
        let v = model.expected_counterfactual_value(c);
        if nearly_equal(v, best_value, T::tie_tol()) {
            if c == model.factual_choice {
                best = c;
                best_value = v;
            }
        } else if v > best_value {
            best = c;
            best_value = v;
        }
    }
    Ok(best)
}

fn presume<T: Scalar>(model: &ChoiceCaseModel<T>, presumption: Presumption) -> Result<ChoiceCaseModel<T>> {
    let choice = presumed_choice(model)?;
    let mut out = model.clone();
    out.counterfactual_choice = CounterfactualChoice::Presumed { choice, presumption };
    let note = format!(
        "counterfactual choice presumed to be `{}`: the dutiful choice with the highest expected value (argmax over the duty set)",
        model.choices[choice]
    );
    if !out.notes.contains(&note) {
        out.notes.push(note);
    }
    Ok(out)
}

/// IT-CP: presume the best dutiful choice only when no evidence exists.
pub fn presume_choice_it_cp<T: Scalar>(model: &ChoiceCaseModel<T>) -> Result<ChoiceCaseModel<T>> {
    if model.duty_set.is_empty() {
        return Err(Error::Config("duty set is empty".into()));
    }
    match model.counterfactual_choice {
        CounterfactualChoice::Evidence(_) | CounterfactualChoice::Presumed { .. } => Ok(model.clone()),
        CounterfactualChoice::Unknown => presume(model, Presumption::IurisTantum),
    }
}

/// II-CP: presume the best dutiful choice whatever the evidence says.
pub fn presume_choice_ii_cp<T: Scalar>(model: &ChoiceCaseModel<T>) -> Result<ChoiceCaseModel<T>> {
    presume(model, Presumption::IurisEtDeIure)
}

/// A choice case reduced to a single-stage case over `(choice, result)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatChoiceCase<T> {
    pub case: CaseModel<T>,
    /// Joint of the pair outcomes induced by [`vk_factorize`]; use it as the
    /// evidence coupling.
    pub evidence: Matrix<T>,
    /// `(choice, result)` of each flattened outcome.
    pub pairs: Vec<(usize, usize)>,
}

impl<T: Scalar> FlatChoiceCase<T> {
    pub fn observed(&self) -> usize {
        self.case
            .factual_observed()
            .expect("flattened cases record the factual pair")
    }
}

pub fn flatten_choice_case<T: Scalar>(model: &ChoiceCaseModel<T>) -> Result<FlatChoiceCase<T>> {
    let joint = vk_factorize(model)?;
    let cf_law = model.resolved_choice_law()?;
    let nc = model.choices.len();
    let nr = model.results.len();
    let n = nc * nr;
    let pairs: Vec<(usize, usize)> = (0..nc).flat_map(|c| (0..nr).map(move |r| (c, r))).collect();
    let mut evidence = Matrix::zeros(n, n);
    for (i, &(c0, r0)) in pairs.iter().enumerate() {
        for (j, &(c1, r1)) in pairs.iter().enumerate() {
            evidence.set(i, j, joint.get(c0, r0, c1, r1));
        }
    }
    let case = validate_case(CaseDraft {
        labels: pairs
            .iter()
            .map(|&(c, r)| format!("{}:{}", model.choices[c], model.results[r]))
            .collect(),
        values: pairs.iter().map(|&(c, r)| model.values[c][r]).collect(),
        // Products of the stated laws rather than sums over the joint, so a
        // single-choice case reproduces its plain marginals bit for bit.
        counterfactual: pairs
            .iter()
            .map(|&(c, r)| cf_law.weight(c) * model.result_given_choice_cf[c].weight(r))
            .collect(),
        factual: pairs
            .iter()
            .map(|&(c, r)| model.factual_choice_law.weight(c) * model.result_given_choice_f[c].weight(r))
            .collect(),
        money: model.money.clone(),
        factual_observed: Some(model.factual_choice * nr + model.factual_result),
    })?;
    Ok(FlatChoiceCase {
        case,
        evidence,
        pairs,
    })
}

/// Monetary award at the factual pair of a choice case under one policy.
pub fn choice_award<T: Scalar>(model: &ChoiceCaseModel<T>, combo: &PolicyCombo) -> Result<T> {
    let flat = flatten_choice_case(model)?;
    let schedule = evaluate_policy(&flat.case, combo, Some(&flat.evidence))?;
    schedule
        .award(flat.observed())
        .ok_or_else(|| Error::Contract("factual pair missing from the schedule".into()))
}

/// The mirrored case in which the victim is the one who breached a duty.
///
/// Values and money map are those of the dual victim (the original
/// tortfeasor); the counterfactual choice law is the dutiful one.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCaseModel<T> {
    inner: ChoiceCaseModel<T>,
}

impl<T: Scalar> DualCaseModel<T> {
    pub fn new(inner: ChoiceCaseModel<T>) -> Result<Self> {
        if let CounterfactualChoice::Evidence(d) = &inner.counterfactual_choice {
            if d.support().iter().any(|c| !inner.duty_set.contains(c)) {
                return Err(Error::Config(
                    "the dual counterfactual choice law must be supported on the duty set".into(),
                ));
            }
        }
        Ok(Self { inner })
    }

    pub fn inner(&self) -> &ChoiceCaseModel<T> {
        &self.inner
    }

    /// Amount the victim owes for the breach; zero when the factual choice
    /// was dutiful.
    pub fn award(&self, combo: &PolicyCombo) -> Result<T> {
        if self.inner.is_dutiful(self.inner.factual_choice) {
            return Ok(T::zero());
        }
        let resolved = presume_choice_it_cp(&self.inner)?;
        choice_award(&resolved, combo)
    }
}

/// Final award after subtracting what the victim owes for breaching a duty
/// to mitigate: `max(0, main - dual)`.
pub fn mitigation_offset<T: Scalar>(
    main_award: T,
    dual: &DualCaseModel<T>,
    combo: &PolicyCombo,
) -> Result<T> {
    let owed = dual.award(combo)?;
    Ok((main_award - owed).max(T::zero()))
}

/// Closed-form award in the game-show case: keep 500,000 or answer for
/// 1,000,000 (correct, probability `p`) or 300 (wrong), under a CRRA curve.
pub fn matos_award<T: Scalar>(p: T, theta: T) -> Result<T> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::Domain(format!("probability {p} is outside [0, 1]")));
    }
    let curve = UtilityCurve::new(theta)?;
    let kept = T::lit(500_000.0);
    let v_win = curve.utility_value(T::lit(1_000_000.0))?;
    let v_lose = curve.utility_value(T::lit(300.0))?;
    let v_kept = curve.utility_value(kept)?;
    let x = (p * v_win + (T::one() - p) * v_lose - v_kept).max(T::zero());
    if x == T::zero() {
        return Ok(T::zero());
    }
    // M(V(kept)) = kept, so the award is the money increment above V(kept).
    curve.money_increment(v_kept, x)
}

/// Smallest probability of answering correctly that earns a positive award.
pub fn matos_threshold<T: Scalar>(theta: T) -> Result<T> {
    let curve = UtilityCurve::new(theta)?;
    let v = |m: f64| curve.utility_value(T::lit(m));
    Ok((v(500_000.0)? - v(300.0)?) / (v(1_000_000.0)? - v(300.0)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::{Connection, Indemnity, Information};

    fn two_by_two(cf_choice: Option<Vec<f64>>, duty: Vec<usize>) -> ChoiceCaseModel<f64> {
        ChoiceCaseModel::new(ChoiceDraft {
            choices: vec!["x".into(), "y".into()],
            duty_set: duty,
            results: vec!["bad".into(), "good".into()],
            values: vec![vec![0.0, 10.0], vec![1.0, 6.0]],
            money: MoneyMap::Identity,
            counterfactual_choice: cf_choice,
            result_given_choice_cf: vec![vec![0.4, 0.6], vec![0.1, 0.9]],
            result_given_choice_f: vec![vec![0.7, 0.3], vec![0.5, 0.5]],
            factual_choice_law: Some(vec![0.6, 0.4]),
            factual_choice: 0,
            factual_result: 0,
            choice_coupling: None,
            result_couplings: Vec::new(),
        })
        .unwrap()
    }

    #[test]
    fn validation_catches_empty_duty_and_bad_rows() {
        let mut d = two_by_two(None, vec![0]).to_draft();
        d.duty_set.clear();
        d.result_given_choice_cf[1] = vec![0.5, 0.6];
        let Err(Error::Validation(r)) = ChoiceCaseModel::new(d) else {
            panic!()
        };
        assert!(r.has_kind("duty"));
        assert!(r.has_kind("normalization"));
    }

    #[test]
    fn presumption_picks_highest_expected_value() {
        // E[V|x] = 6, E[V|y] = 0.1 + 5.4 = 5.5
        let m = two_by_two(None, vec![0, 1]);
        let it = presume_choice_it_cp(&m).unwrap();
        assert_eq!(
            it.counterfactual_choice(),
            &CounterfactualChoice::Presumed {
                choice: 0,
                presumption: Presumption::IurisTantum
            }
        );
        // duty restricted to y
        let m = two_by_two(None, vec![1]);
        let it = presume_choice_it_cp(&m).unwrap();
        assert!(matches!(
            it.counterfactual_choice(),
            CounterfactualChoice::Presumed { choice: 1, .. }
        ));
    }

    #[test]
    fn evidence_survives_it_cp_but_not_ii_cp() {
        let m = two_by_two(Some(vec![0.2, 0.8]), vec![0, 1]);
        assert_eq!(presume_choice_it_cp(&m).unwrap(), m);
        let ii = presume_choice_ii_cp(&m).unwrap();
        assert!(matches!(
            ii.counterfactual_choice(),
            CounterfactualChoice::Presumed { choice: 0, .. }
        ));
    }

    #[test]
    fn presumptions_are_idempotent() {
        let m = two_by_two(Some(vec![0.2, 0.8]), vec![0, 1]);
        let once = presume_choice_ii_cp(&m).unwrap();
        assert_eq!(presume_choice_ii_cp(&once).unwrap(), once);
        let m = two_by_two(None, vec![0, 1]);
        let once = presume_choice_it_cp(&m).unwrap();
        assert_eq!(presume_choice_it_cp(&once).unwrap(), once);
    }

    #[test]
    fn unresolved_choice_cannot_be_factorized() {
        let m = two_by_two(None, vec![0, 1]);
        assert!(matches!(vk_factorize(&m), Err(Error::Config(_))));
    }

    #[test]
    fn factorized_joint_is_conditionally_independent() {
        let m = two_by_two(Some(vec![0.3, 0.7]), vec![0, 1]);
        let j = vk_factorize(&m).unwrap();
        assert!((j.total() - 1.0).abs() < 1e-12);
        assert!(j.max_c0_r1_dependence_given_c1() < 1e-12);
        assert!(j.conditional_mutual_information_c0_r1_given_c1().abs() < 1e-12);
    }

    #[test]
    fn wrong_result_coupling_is_rejected() {
        let mut d = two_by_two(Some(vec![0.3, 0.7]), vec![0, 1]).to_draft();
        d.result_couplings.push((
            (0, 0),
            Matrix::from_rows(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap(),
        ));
        let m = ChoiceCaseModel::new(d).unwrap();
        assert!(vk_factorize(&m).is_err());
    }

    #[test]
    fn flattening_builds_pair_space() {
        let m = two_by_two(Some(vec![0.3, 0.7]), vec![0, 1]);
        let flat = flatten_choice_case(&m).unwrap();
        assert_eq!(flat.case.len(), 4);
        assert_eq!(flat.case.space().label(1), "x:good");
        assert_eq!(flat.observed(), 0);
        let cf = flat.case.counterfactual().weights();
        assert!((cf[1] - 0.3 * 0.6).abs() < 1e-12);
        assert!((cf[3] - 0.7 * 0.9).abs() < 1e-12);
    }

    #[test]
    fn matos_closed_form_points() {
        assert_eq!(matos_award(1.0, 0.0).unwrap(), 500000.0);
        let a = matos_award(0.625f64, 0.0).unwrap();
        assert!((a - 125112.5).abs() < 1e-6, "{a}");
        assert_eq!(matos_award(0.4f64, 0.0).unwrap(), 0.0);
        assert!((matos_threshold(0.0f64).unwrap() - 499700.0 / 999700.0).abs() < 1e-15);
        assert!(matos_award(1.5f64, 0.0).is_err());
    }

    #[test]
    fn mitigation_clamps() {
        // dutiful factual choice: nothing owed
        let dual = DualCaseModel::new(two_by_two(None, vec![0, 1])).unwrap();
        let combo = PolicyCombo::new(
            Information::High,
            Connection::Evidence,
            Indemnity::ClosestToCounterfactual,
        );
        assert_eq!(mitigation_offset(1000.0, &dual, &combo).unwrap(), 1000.0);
    }
}
