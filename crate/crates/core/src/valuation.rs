//! Compensation valuation: information partitions, conditional gaps and the
//! two indemnity schedules (closest-to-counterfactual and fixed-mean).

use std::fmt;
use std::str::FromStr;

use crate::coupling::{
    evidence_coupling, independence_coupling, least_divergence_coupling, Coupling, Matrix,
};
use crate::error::{Error, Result};
use crate::outcome::{award_from_compensation, CaseModel, OutcomeSpace};
use crate::scalar::{nearly_equal, Scalar};

/// How much factual information the schedule may depend on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Information {
    /// L-FI: nothing; one block.
    Low,
    /// M-FI: only whether the outcome is in O+ or O-.
    Medium,
    /// H-FI: the factual outcome itself.
    High,
    /// Any coarsening of the factual support, as blocks of outcome indices.
    Custom(Vec<Vec<usize>>),
}

/// How the two scenarios are connected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connection {
    /// E-C: joint law supplied as evidence.
    Evidence,
    /// LD-C: the joint minimizing `E[(V0 - V1)^2]`.
    LeastDivergence,
    /// I-C: the two scenarios are independent.
    Independence,
    /// A published joint law (e.g. a printed table row) used verbatim.
    PublishedTable,
}

/// Interpretation of indemnity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Indemnity {
    /// CC-I: closest to the counterfactual scenario.
    ClosestToCounterfactual,
    /// FM-I: closest schedule whose mean equals the expected loss.
    FixedMean,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolicyCombo {
    pub info: Information,
    pub connection: Connection,
    pub indemnity: Indemnity,
}

impl PolicyCombo {
    pub fn new(info: Information, connection: Connection, indemnity: Indemnity) -> Self {
        Self {
            info,
            connection,
            indemnity,
        }
    }

    /// All 3 x 4 x 2 combinations of the built-in restrictions.
    pub fn grid() -> Vec<PolicyCombo> {
        let mut out = Vec::with_capacity(24);
        for info in [Information::Low, Information::Medium, Information::High] {
            for connection in [
                Connection::Evidence,
                Connection::LeastDivergence,
                Connection::Independence,
                Connection::PublishedTable,
            ] {
                for indemnity in [Indemnity::ClosestToCounterfactual, Indemnity::FixedMean] {
                    out.push(PolicyCombo::new(info.clone(), connection, indemnity));
                }
            }
        }
        out
    }
}

impl fmt::Display for Information {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Information::Low => "L-FI",
            Information::Medium => "M-FI",
            Information::High => "H-FI",
            Information::Custom(_) => "custom",
        })
    }
}

impl fmt::Display for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Connection::Evidence => "E-C",
            Connection::LeastDivergence => "LD-C",
            Connection::Independence => "I-C",
            Connection::PublishedTable => "paper-table",
        })
    }
}

impl fmt::Display for Indemnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Indemnity::ClosestToCounterfactual => "CC-I",
            Indemnity::FixedMean => "FM-I",
        })
    }
}

impl fmt::Display for PolicyCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.info, self.connection, self.indemnity)
    }
}

impl FromStr for Connection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e-c" | "ec" | "evidence" => Ok(Connection::Evidence),
            "ld-c" | "ldc" | "least-divergence" => Ok(Connection::LeastDivergence),
            "i-c" | "ic" | "independence" => Ok(Connection::Independence),
            "paper-table" | "published" | "table" => Ok(Connection::PublishedTable),
            other => Err(Error::Config(format!("unknown connection restriction `{other}`"))),
        }
    }
}

impl FromStr for Indemnity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cc-i" | "cci" | "closest" => Ok(Indemnity::ClosestToCounterfactual),
            "fm-i" | "fmi" | "fixed-mean" => Ok(Indemnity::FixedMean),
            other => Err(Error::Config(format!("unknown indemnity restriction `{other}`"))),
        }
    }
}

impl FromStr for Information {
    type Err = Error;
    /// Parses `l-fi`, `m-fi` or `h-fi`. Custom partitions are built from labels
    /// with [`Information::Custom`].
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l-fi" | "lfi" | "low" => Ok(Information::Low),
            "m-fi" | "mfi" | "medium" => Ok(Information::Medium),
            "h-fi" | "hfi" | "high" => Ok(Information::High),
            other => Err(Error::Config(format!(
                "unknown information restriction `{other}`"
            ))),
        }
    }
}

/// The selective compensation groups of a coupling's factual support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectiveGroups {
    /// Factual outcomes worse than their expected counterfactual value.
    pub plus: Vec<usize>,
    /// Factual outcomes at least as good as their expected counterfactual value.
    pub minus: Vec<usize>,
    /// Outcomes whose conditional counterfactual mean equals their own value;
    /// these are placed in `minus`.
    pub ties: Vec<usize>,
}

impl SelectiveGroups {
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.plus.iter().chain(&self.minus).copied().collect();
        s.sort_unstable();
        s
    }
}

/// Splits the factual support by the sign of `E[V0 | O1 = o] - V(o)`.
pub fn selective_groups<T: Scalar>(c: &Coupling<T>) -> SelectiveGroups {
    let mut groups = SelectiveGroups {
        plus: Vec::new(),
        minus: Vec::new(),
        ties: Vec::new(),
    };
    for j in 0..c.space().len() {
        let Some(mean) = c.conditional_counterfactual_mean(j) else {
            continue;
        };
        let v = c.space().value(j);
        if nearly_equal(mean, v, T::tie_tol()) {
            groups.ties.push(j);
            groups.minus.push(j);
        } else if mean < v {
            groups.minus.push(j);
        } else {
            groups.plus.push(j);
        }
    }
    groups
}

/// Which restriction produced a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionOrigin {
    Low,
    Medium,
    High,
    Custom,
}

/// Blocks of factual outcomes inside which compensation must be constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationPartition {
    blocks: Vec<Vec<usize>>,
    origin: PartitionOrigin,
}

impl InformationPartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn origin(&self) -> PartitionOrigin {
        self.origin
    }

    pub fn block_of(&self, outcome: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&outcome))
    }
}

pub fn build_partition(info: &Information, groups: &SelectiveGroups) -> Result<InformationPartition> {
    let support = groups.support();
    let (blocks, origin) = match info {
        Information::Low => (vec![support], PartitionOrigin::Low),
        Information::Medium => {
            let blocks = [groups.plus.clone(), groups.minus.clone()]
                .into_iter()
                .filter(|b| !b.is_empty())
                .collect();
            (blocks, PartitionOrigin::Medium)
        }
        Information::High => (support.iter().map(|&o| vec![o]).collect(), PartitionOrigin::High),
        Information::Custom(blocks) => {
            check_custom(blocks, &support)?;
            (blocks.clone(), PartitionOrigin::Custom)
        }
    };
    Ok(InformationPartition { blocks, origin })
}

fn check_custom(blocks: &[Vec<usize>], support: &[usize]) -> Result<()> {
    let mut seen: Vec<usize> = Vec::new();
    for b in blocks {
        if b.is_empty() {
            return Err(Error::Config("custom partition has an empty block".into()));
        }
        for &o in b {
            if seen.contains(&o) {
                return Err(Error::Config(format!(
                    "outcome {o} appears in more than one block"
                )));
            }
            seen.push(o);
        }
    }
    seen.sort_unstable();
    if seen != support {
        return Err(Error::Config(format!(
            "custom partition covers outcomes {seen:?} but the factual support is {support:?}"
        )));
    }
    Ok(())
}

/// Conditional expected loss of one partition block.
#[derive(Debug, Clone, PartialEq)]
pub struct GapEntry<T> {
    pub outcomes: Vec<usize>,
    pub probability: T,
    /// `E[V0 - V1 | block]`.
    pub gap: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapTable<T> {
    entries: Vec<GapEntry<T>>,
    expected_gap: T,
    space: OutcomeSpace<T>,
    warnings: Vec<String>,
}

impl<T: Scalar> GapTable<T> {
    pub fn entries(&self) -> &[GapEntry<T>] {
        &self.entries
    }

    /// `E[V0 - V1]` over the whole joint law.
    pub fn expected_gap(&self) -> T {
        self.expected_gap
    }

    pub fn space(&self) -> &OutcomeSpace<T> {
        &self.space
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Gap of the block containing `outcome`.
    pub fn gap_of(&self, outcome: usize) -> Option<T> {
        self.entries
            .iter()
            .find(|e| e.outcomes.contains(&outcome))
            .map(|e| e.gap)
    }
}

pub fn conditional_gap<T: Scalar>(c: &Coupling<T>, part: &InformationPartition) -> GapTable<T> {
    let v = c.space().values();
    let n = v.len();
    let mut warnings = Vec::new();
    let mut entries = Vec::with_capacity(part.blocks().len());
    for block in part.blocks() {
        let mut prob = T::zero();
        let mut loss = T::zero();
        for &j in block {
            for i in 0..n {
                let m = c.mass(i, j);
                prob = prob + m;
                loss = loss + m * (v[i] - v[j]);
            }
        }
        if prob > T::zero() {
            entries.push(GapEntry {
                outcomes: block.clone(),
                probability: prob,
                gap: loss / prob,
            });
        } else {
            let labels: Vec<&str> = block.iter().map(|&o| c.space().label(o)).collect();
            warnings.push(format!("block {labels:?} has zero probability and was dropped"));
        }
    }
    let mut expected_gap = T::zero();
    for i in 0..n {
        for j in 0..n {
            expected_gap = expected_gap + c.mass(i, j) * (v[i] - v[j]);
        }
    }
    GapTable {
        entries,
        expected_gap,
        space: c.space().clone(),
        warnings,
    }
}

/// Compensation for one factual outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry<T> {
    pub outcome: usize,
    pub label: String,
    /// Value of the factual outcome, `V(o)`.
    pub value: T,
    /// Compensation in value units, `X(o)`.
    pub x: T,
    /// `M(V(o) + X(o)) - M(V(o))`, once a money map is applied.
    pub award: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompensationSchedule<T> {
    pub entries: Vec<ScheduleEntry<T>>,
    pub policy: Option<PolicyCombo>,
    /// Shift applied by the fixed-mean schedule.
    pub lambda: Option<T>,
    pub notes: Vec<String>,
}

impl<T: Scalar> CompensationSchedule<T> {
    fn from_blocks(g: &GapTable<T>, block_x: impl Fn(T) -> T) -> Self {
        let mut entries: Vec<ScheduleEntry<T>> = g
            .entries
            .iter()
            .flat_map(|e| {
                let x = block_x(e.gap);
                e.outcomes.iter().map(move |&o| (o, x))
            })
            .map(|(o, x)| ScheduleEntry {
                outcome: o,
                label: g.space.label(o).to_string(),
                value: g.space.value(o),
                x,
                award: None,
            })
            .collect();
        entries.sort_by_key(|e| e.outcome);
        Self {
            entries,
            policy: None,
            lambda: None,
            notes: g.warnings.clone(),
        }
    }

    pub fn entry(&self, outcome: usize) -> Option<&ScheduleEntry<T>> {
        self.entries.iter().find(|e| e.outcome == outcome)
    }

    pub fn entry_by_label(&self, label: &str) -> Option<&ScheduleEntry<T>> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn x(&self, outcome: usize) -> Option<T> {
        self.entry(outcome).map(|e| e.x)
    }

    pub fn award(&self, outcome: usize) -> Option<T> {
        self.entry(outcome).and_then(|e| e.award)
    }

    /// Fills in monetary awards for every entry.
    pub fn apply_money(&mut self, money: &crate::outcome::MoneyMap<T>) -> Result<()> {
        for e in &mut self.entries {
            e.award = Some(award_from_compensation(money, e.value, e.x)?);
        }
        Ok(())
    }
}

/// CC-I schedule: `max(0, gap)` per block.
pub fn cc_indemnity<T: Scalar>(g: &GapTable<T>) -> CompensationSchedule<T> {
    CompensationSchedule::from_blocks(g, |gap| gap.max(T::zero()))
}

/// Root of `f(lambda) = sum_k P(block_k) * max(0, gap_k - lambda) = target`.
///
/// `f` is piecewise linear with breakpoints at the gaps, so the root is found
/// exactly on the active linear piece.
pub fn solve_lambda<T: Scalar>(g: &GapTable<T>, target: T) -> Result<T> {
    if !(target > T::zero()) {
        return Err(Error::Contract(format!(
            "lambda is only defined for a positive expected loss, got {target}"
        )));
    }
    let mut pieces: Vec<(T, T)> = g.entries.iter().map(|e| (e.gap, e.probability)).collect();
    pieces.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite gaps"));
    let mut weighted = T::zero();
    let mut mass = T::zero();
    for (k, &(gap, p)) in pieces.iter().enumerate() {
        weighted = weighted + p * gap;
        mass = mass + p;
        // On [next_gap, gap] f(lambda) = weighted - mass * lambda.
        let lambda = (weighted - target) / mass;
        let next = pieces.get(k + 1).map(|x| x.0);
        if next.is_none_or(|lo| lambda >= lo) {
            // Non-negative whenever f(0) >= target; clamp rounding noise.
            return Ok(lambda.max(T::zero()));
        }
    }
    Err(Error::Contract("gap table is empty".into()))
}

/// `f(lambda)`: mean of the gap table soft-thresholded at `lambda`.
pub fn thresholded_mean<T: Scalar>(g: &GapTable<T>, lambda: T) -> T {
    g.entries
        .iter()
        .map(|e| e.probability * (e.gap - lambda).max(T::zero()))
        .sum()
}

/// FM-I schedule: zero when `E[V0 - V1] <= 0`, else `max(0, gap - lambda*)`.
pub fn fm_indemnity<T: Scalar>(g: &GapTable<T>) -> CompensationSchedule<T> {
    let target = g.expected_gap;
    if !(target > T::zero()) || g.entries.is_empty() {
        let mut s = CompensationSchedule::from_blocks(g, |_| T::zero());
        s.lambda = None;
        return s;
    }
    let lambda = solve_lambda(g, target).expect("positive target");
    shifted_schedule(g, lambda)
}

/// `max(0, gap - lambda)` per block, for an arbitrary shift.
pub fn shifted_schedule<T: Scalar>(g: &GapTable<T>, lambda: T) -> CompensationSchedule<T> {
    let mut s = CompensationSchedule::from_blocks(g, |gap| (gap - lambda).max(T::zero()));
    s.lambda = Some(lambda);
    s
}

/// Builds the coupling a policy's connection restriction calls for.
pub fn coupling_for<T: Scalar>(
    model: &CaseModel<T>,
    connection: Connection,
    evidence: Option<&Matrix<T>>,
) -> Result<Coupling<T>> {
    match connection {
        Connection::Evidence | Connection::PublishedTable => {
            let joint = evidence.ok_or_else(|| {
                Error::Config(format!(
                    "connection {connection} needs an evidence coupling matrix, none was supplied"
                ))
            })?;
            evidence_coupling(model, joint.clone())
        }
        Connection::LeastDivergence => Ok(least_divergence_coupling(model)),
        Connection::Independence => Ok(independence_coupling(model)),
    }
}

/// Full pipeline: coupling, groups, partition, gaps, indemnity and awards.
pub fn evaluate_policy<T: Scalar>(
    model: &CaseModel<T>,
    combo: &PolicyCombo,
    evidence: Option<&Matrix<T>>,
) -> Result<CompensationSchedule<T>> {
    let coupling = coupling_for(model, combo.connection, evidence)?;
    let groups = selective_groups(&coupling);
    let partition = build_partition(&combo.info, &groups)?;
    let gaps = conditional_gap(&coupling, &partition);
    let mut schedule = match combo.indemnity {
        Indemnity::ClosestToCounterfactual => cc_indemnity(&gaps),
        Indemnity::FixedMean => fm_indemnity(&gaps),
    };
    schedule.apply_money(model.money())?;
    if combo.info == Information::Medium && !groups.ties.is_empty() {
        let labels: Vec<&str> = groups.ties.iter().map(|&o| model.space().label(o)).collect();
        schedule.notes.push(format!(
            "outcomes {labels:?} tie with their expected counterfactual value and were placed in O-"
        ));
    }
    if coupling.tie_dependent() && combo.info != Information::Low {
        schedule
            .notes
            .push("least-divergence coupling depends on the order of equal-valued outcomes".into());
    }
    schedule.policy = Some(combo.clone());
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::deterministic_joint;
    use crate::outcome::{validate_case, CaseDraft, MoneyMap};

    fn prizes() -> (CaseModel<f64>, Matrix<f64>) {
        let m = validate_case(CaseDraft {
            labels: ["a1", "a2", "a3", "a4", "a5"].map(String::from).to_vec(),
            values: vec![5.0, 30.0, 35.0, 70.0, 110.0],
            counterfactual: vec![0.2; 5],
            factual: vec![0.2, 0.2, 0.4, 0.2, 0.0],
            money: MoneyMap::Identity,
            factual_observed: None,
        })
        .unwrap();
        let ev = deterministic_joint(&m, &[2, 2, 1, 0, 3]).unwrap();
        (m, ev)
    }

    fn xs(s: &CompensationSchedule<f64>) -> Vec<f64> {
        s.entries.iter().map(|e| e.x).collect()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn groups_under_evidence_and_independence() {
        let (m, ev) = prizes();
        let c = evidence_coupling(&m, ev).unwrap();
        let g = selective_groups(&c);
        assert_eq!(g.plus, vec![0, 1, 3]);
        assert_eq!(g.minus, vec![2]);
        let g = selective_groups(&independence_coupling(&m));
        assert_eq!(g.plus, vec![0, 1, 2]);
        assert_eq!(g.minus, vec![3]);
    }

    #[test]
    fn partitions() {
        let (m, ev) = prizes();
        let c = evidence_coupling(&m, ev).unwrap();
        let g = selective_groups(&c);
        assert_eq!(
            build_partition(&Information::Low, &g).unwrap().blocks(),
            &[vec![0, 1, 2, 3]]
        );
        assert_eq!(
            build_partition(&Information::Medium, &g).unwrap().blocks(),
            &[vec![0, 1, 3], vec![2]]
        );
        assert_eq!(build_partition(&Information::High, &g).unwrap().blocks().len(), 4);
        assert!(build_partition(&Information::Custom(vec![vec![0, 1], vec![2]]), &g).is_err());
        assert!(build_partition(&Information::Custom(vec![vec![0, 1], vec![1, 2, 3]]), &g).is_err());
        assert!(build_partition(&Information::Custom(vec![vec![0, 1, 4], vec![2, 3]]), &g).is_err());
        assert!(build_partition(&Information::Custom(vec![vec![0, 1], vec![2, 3]]), &g).is_ok());
    }

    #[test]
    fn gaps_and_cc_schedule() {
        let (m, ev) = prizes();
        let c = evidence_coupling(&m, ev).unwrap();
        let g = selective_groups(&c);
        let gaps = conditional_gap(&c, &build_partition(&Information::High, &g).unwrap());
        let raw: Vec<f64> = gaps.entries().iter().map(|e| e.gap).collect();
        assert!(close(&raw, &[65.0, 5.0, -17.5, 40.0]));
        assert!(close(&xs(&cc_indemnity(&gaps)), &[65.0, 5.0, 0.0, 40.0]));
        let low = conditional_gap(&c, &build_partition(&Information::Low, &g).unwrap());
        assert!((low.entries()[0].gap - 15.0).abs() < 1e-12);
        let mid = conditional_gap(&c, &build_partition(&Information::Medium, &g).unwrap());
        let s = cc_indemnity(&mid);
        assert!((s.x(0).unwrap() - 110.0 / 3.0).abs() < 1e-9);
        assert_eq!(s.x(2).unwrap(), 0.0);
    }

    #[test]
    fn lambda_examples() {
        let (m, ev) = prizes();
        let c = evidence_coupling(&m, ev).unwrap();
        let part = build_partition(&Information::High, &selective_groups(&c)).unwrap();
        let gaps = conditional_gap(&c, &part);
        assert!((solve_lambda(&gaps, 15.0).unwrap() - 15.0).abs() < 1e-12);
        assert!(close(&xs(&fm_indemnity(&gaps)), &[50.0, 0.0, 0.0, 25.0]));

        let c = independence_coupling(&m);
        let part = build_partition(&Information::High, &selective_groups(&c)).unwrap();
        let gaps = conditional_gap(&c, &part);
        assert!((solve_lambda(&gaps, 15.0).unwrap() - 5.0).abs() < 1e-12);
        assert!(close(&xs(&fm_indemnity(&gaps)), &[40.0, 15.0, 10.0, 0.0]));

        assert!(matches!(solve_lambda(&gaps, 0.0), Err(Error::Contract(_))));
    }

    #[test]
    fn single_block_lambda_is_zero() {
        let (m, ev) = prizes();
        let c = evidence_coupling(&m, ev).unwrap();
        let part = build_partition(&Information::Low, &selective_groups(&c)).unwrap();
        let gaps = conditional_gap(&c, &part);
        assert_eq!(solve_lambda(&gaps, gaps.entries()[0].gap).unwrap(), 0.0);
    }

    #[test]
    fn negative_expected_loss_gives_zero() {
        // factual scenario dominates the counterfactual one
        let m = validate_case(CaseDraft {
            labels: vec!["lo".into(), "hi".into()],
            values: vec![0.0, 10.0],
            counterfactual: vec![0.7, 0.3],
            factual: vec![0.2, 0.8],
            money: MoneyMap::Identity,
            factual_observed: None,
        })
        .unwrap();
        for info in [Information::Low, Information::Medium, Information::High] {
            let combo = PolicyCombo::new(info, Connection::Independence, Indemnity::FixedMean);
            let s = evaluate_policy(&m, &combo, None).unwrap();
            assert!(s.entries.iter().all(|e| e.x == 0.0));
        }
    }

    #[test]
    fn missing_evidence_is_a_config_error() {
        let (m, _) = prizes();
        let combo = PolicyCombo::new(Information::High, Connection::Evidence, Indemnity::FixedMean);
        assert!(matches!(evaluate_policy(&m, &combo, None), Err(Error::Config(_))));
    }

    #[test]
    fn policy_names_round_trip() {
        for combo in PolicyCombo::grid() {
            let s = combo.to_string();
            let parts: Vec<&str> = s.split('/').collect();
            assert_eq!(parts[0].parse::<Information>().unwrap(), combo.info);
            assert_eq!(parts[1].parse::<Connection>().unwrap(), combo.connection);
            assert_eq!(parts[2].parse::<Indemnity>().unwrap(), combo.indemnity);
        }
        assert_eq!(PolicyCombo::grid().len(), 24);
    }

    #[test]
    fn f32_prize_schedule() {
        let m = validate_case(CaseDraft {
            labels: ["a1", "a2", "a3", "a4", "a5"].map(String::from).to_vec(),
            values: vec![5.0f32, 30.0, 35.0, 70.0, 110.0],
            counterfactual: vec![0.2; 5],
            factual: vec![0.2, 0.2, 0.4, 0.2, 0.0],
            money: MoneyMap::Identity,
            factual_observed: None,
        })
        .unwrap();
        let ev = deterministic_joint(&m, &[2, 2, 1, 0, 3]).unwrap();
        let combo = PolicyCombo::new(Information::High, Connection::Evidence, Indemnity::FixedMean);
        let s = evaluate_policy(&m, &combo, Some(&ev)).unwrap();
        let want = [50.0f32, 0.0, 0.0, 25.0];
        for (e, w) in s.entries.iter().zip(want) {
            assert!((e.x - w).abs() < 1e-3);
        }
    }
}
