//! Seeded random-instance checks of the closed forms against the brute-force
//! oracles, plus the choice-case properties.
//!
//! Reports are a pure function of the configuration, so a fixed seed gives
//! identical bytes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::choice::{
    mitigation_offset, presume_choice_ii_cp, presume_choice_it_cp, vk_factorize, ChoiceCaseModel,
    ChoiceDraft, CounterfactualChoice, DualCaseModel,
};
use crate::coupling::{
    evidence_coupling, independence_coupling, least_divergence_coupling, transport_cost, Coupling, Matrix,
};
use crate::error::Result;
use crate::oracle::{oracle_best_schedule, oracle_min_cost, risk};
use crate::outcome::{validate_case, CaseDraft, CaseModel, MoneyMap};
use crate::valuation::{
    build_partition, cc_indemnity, conditional_gap, fm_indemnity, selective_groups, shifted_schedule,
    CompensationSchedule, Connection, Indemnity, Information, PolicyCombo,
};

pub const DEFAULT_SEED: u64 = 20_170_101;
pub const DEFAULT_INSTANCES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub instances: usize,
    /// Added to the solved shift before building FM-I schedules; non-zero
    /// values exist to prove the harness can fail.
    pub lambda_offset: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            instances: DEFAULT_INSTANCES,
            lambda_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub checked: usize,
    pub passed: usize,
    pub first_failure: Option<String>,
}

impl PropertyResult {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            passed: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if ok {
            self.passed += 1;
        } else if self.first_failure.is_none() {
            self.first_failure = Some(detail());
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.checked
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub properties: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::ok)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "seed {} instances {} lambda-offset {}\n",
            self.config.seed, self.config.instances, self.config.lambda_offset
        );
        for p in &self.properties {
            out.push_str(&format!(
                "{:<4} {:<28} {}/{}\n",
                if p.ok() { "PASS" } else { "FAIL" },
                p.name,
                p.passed,
                p.checked
            ));
            if let Some(f) = &p.first_failure {
                out.push_str(&format!("     first failure: {f}\n"));
            }
        }
        out.push_str(if self.all_passed() {
            "all properties hold\n"
        } else {
            "violations found\n"
        });
        out
    }
}

pub const P_TRANSPORT: &str = "transport-optimality";
pub const P_CC_OPTIMAL: &str = "cc-i-optimality";
pub const P_FM_OPTIMAL: &str = "fm-i-optimality";
pub const P_FM_MEAN: &str = "fm-i-mean-constraint";
pub const P_CC_GE_FM: &str = "cc-i-dominates-fm-i";
pub const P_VK: &str = "vk-conditional-independence";
pub const P_PRESUMPTION: &str = "presumptions";
pub const P_MITIGATION: &str = "mitigation-offset";

/// Tolerances shared with the acceptance suite.
pub const TRANSPORT_TOL: f64 = 1e-9;
pub const MEAN_TOL: f64 = 1e-10;
pub const VK_TOL: f64 = 1e-10;
/// Grid resolution, as a fraction of the value range.
pub const GRID_RESOLUTION: f64 = 0.01;

/// Random weights on `n` cells with some cells forced to zero (never all).
fn random_weights(rng: &mut ChaCha8Rng, n: usize, zero_chance: f64) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(zero_chance) {
                    0.0
                } else {
                    rng.gen_range(0.05..1.0)
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return w.into_iter().map(|x| x / total).collect();
        }
    }
}

fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..100.0)).collect()
}

/// A random joint law and the case whose marginals it induces.
pub fn random_case(rng: &mut ChaCha8Rng, n: usize) -> (CaseModel<f64>, Matrix<f64>) {
    let cells = random_weights(rng, n * n, 0.4);
    let joint = Matrix::from_rows(cells.chunks(n).map(<[f64]>::to_vec).collect()).expect("square");
    let case = validate_case(CaseDraft {
        labels: (0..n).map(|i| format!("o{i}")).collect(),
        values: random_values(rng, n),
        counterfactual: joint.row_sums(),
        factual: joint.col_sums(),
        money: MoneyMap::Identity,
        factual_observed: None,
    })
    .expect("random case is valid");
    (case, joint)
}

fn schedule_risk(c: &Coupling<f64>, s: &CompensationSchedule<f64>) -> f64 {
    risk(c, |j| s.x(j).unwrap_or(0.0))
}

fn mean_x(c: &Coupling<f64>, s: &CompensationSchedule<f64>) -> f64 {
    (0..c.space().len())
        .map(|j| c.factual_mass(j) * s.x(j).unwrap_or(0.0))
        .sum()
}

fn range_of(v: &[f64]) -> f64 {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

fn schedule_instance(
    rng: &mut ChaCha8Rng,
    cfg: &VerifyConfig,
    results: &mut [PropertyResult],
    instance: usize,
) -> Result<()> {
    let n = rng.gen_range(1..=4);
    let (case, joint) = random_case(rng, n);
    let coupling = match rng.gen_range(0..3) {
        0 => evidence_coupling(&case, joint)?,
        1 => least_divergence_coupling(&case),
        _ => independence_coupling(&case),
    };
    let info = match rng.gen_range(0..3) {
        0 => Information::Low,
        1 => Information::Medium,
        _ => Information::High,
    };
    let partition = build_partition(&info, &selective_groups(&coupling))?;
    let gaps = conditional_gap(&coupling, &partition);
    let cc = cc_indemnity(&gaps);
    let fm = match fm_indemnity(&gaps).lambda {
        Some(l) => shifted_schedule(&gaps, l + cfg.lambda_offset),
        None => fm_indemnity(&gaps),
    };
    let resolution = GRID_RESOLUTION * range_of(case.space().values());
    let tag = || {
        format!(
            "instance {instance} ({n} outcomes, {info:?}, {:?})",
            coupling.origin()
        )
    };

    let grid = oracle_best_schedule(&case, &coupling, &partition, false)?;
    let (r_cc, r_grid) = (schedule_risk(&coupling, &cc), schedule_risk(&coupling, &grid));
    let close = cc
        .entries
        .iter()
        .all(|e| (e.x - grid.x(e.outcome).unwrap_or(0.0)).abs() <= resolution);
    results[1].record(r_cc <= r_grid + 1e-9 * r_grid.max(1.0) && close, || {
        format!("{}: closed-form risk {r_cc} vs grid {r_grid}", tag())
    });

    let grid = oracle_best_schedule(&case, &coupling, &partition, true)?;
    let (r_fm, r_grid) = (schedule_risk(&coupling, &fm), schedule_risk(&coupling, &grid));
    let close = fm
        .entries
        .iter()
        .all(|e| (e.x - grid.x(e.outcome).unwrap_or(0.0)).abs() <= resolution);
    results[2].record(r_fm <= r_grid + 1e-9 * r_grid.max(1.0) && close, || {
        format!("{}: closed-form risk {r_fm} vs grid {r_grid}", tag())
    });

    let target = gaps.expected_gap().max(0.0);
    let mean = mean_x(&coupling, &fm);
    results[3].record((mean - target).abs() <= MEAN_TOL, || {
        format!("{}: E[X] = {mean}, expected {target}", tag())
    });

    let dominated = cc.entries.iter().all(|e| e.x >= fm.x(e.outcome).unwrap_or(0.0));
    results[4].record(dominated, || format!("{}: CC-I below FM-I somewhere", tag()));
    Ok(())
}

fn transport_instance(rng: &mut ChaCha8Rng, results: &mut [PropertyResult], instance: usize) -> Result<()> {
    let n = rng.gen_range(1..=5);
    let (case, _) = random_case(rng, n);
    let ld = transport_cost(&least_divergence_coupling(&case));
    let (_, best) = oracle_min_cost(&case)?;
    results[0].record((ld - best).abs() <= TRANSPORT_TOL * best.max(1.0), || {
        format!("instance {instance}: comonotone cost {ld} vs oracle {best}")
    });
    Ok(())
}

/// Random choice case with 2-3 choices and 2-3 results.
pub fn random_choice_case(rng: &mut ChaCha8Rng, with_evidence: bool) -> ChoiceCaseModel<f64> {
    let nc = rng.gen_range(2..=3);
    let nr = rng.gen_range(2..=3);
    let mut duty: Vec<usize> = (0..nc).filter(|_| rng.gen_bool(0.6)).collect();
    if duty.is_empty() {
        duty.push(rng.gen_range(0..nc));
    }
    let f_rows: Vec<Vec<f64>> = (0..nc).map(|_| random_weights(rng, nr, 0.2)).collect();
    let factual_law = random_weights(rng, nc, 0.0);
    let factual_choice = rng.gen_range(0..nc);
    let factual_result = f_rows[factual_choice]
        .iter()
        .position(|&w| w > 0.0)
        .expect("normalized row");
    ChoiceCaseModel::new(ChoiceDraft {
        choices: (0..nc).map(|c| format!("c{c}")).collect(),
        duty_set: duty,
        results: (0..nr).map(|r| format!("r{r}")).collect(),
        values: (0..nc).map(|_| random_values(rng, nr)).collect(),
        money: MoneyMap::Identity,
        counterfactual_choice: with_evidence.then(|| random_weights(rng, nc, 0.3)),
        result_given_choice_cf: (0..nc).map(|_| random_weights(rng, nr, 0.2)).collect(),
        result_given_choice_f: f_rows,
        factual_choice_law: Some(factual_law),
        factual_choice,
        factual_result,
        choice_coupling: None,
        result_couplings: Vec::new(),
    })
    .expect("random choice case is valid")
}

fn choice_instance(rng: &mut ChaCha8Rng, results: &mut [PropertyResult], instance: usize) -> Result<()> {
    let with_evidence = rng.gen_bool(0.5);
    let model = random_choice_case(rng, with_evidence);
    let resolved = presume_choice_it_cp(&model)?;
    let joint = vk_factorize(&resolved)?;
    let dep = joint.max_c0_r1_dependence_given_c1();
    results[5].record(dep <= VK_TOL && (joint.total() - 1.0).abs() <= 1e-12, || {
        format!("instance {instance}: dependence {dep}")
    });

    let it_ok = if with_evidence {
        resolved == model
    } else {
        matches!(resolved.counterfactual_choice(), CounterfactualChoice::Presumed { choice, .. } if model.is_dutiful(*choice))
    };
    let ii = presume_choice_ii_cp(&model)?;
    let ii_ok = match ii.counterfactual_choice() {
        CounterfactualChoice::Presumed { choice, .. } => model.is_dutiful(*choice),
        _ => false,
    };
    let idempotent = presume_choice_ii_cp(&ii)? == ii && presume_choice_it_cp(&resolved)? == resolved;
    results[6].record(it_ok && ii_ok && idempotent, || {
        format!("instance {instance}: it {it_ok} ii {ii_ok} idempotent {idempotent}")
    });

    let combo = PolicyCombo::new(
        Information::High,
        Connection::Evidence,
        Indemnity::ClosestToCounterfactual,
    );
    let dual = DualCaseModel::new(ii.clone())?;
    let main = rng.gen_range(0.0..150.0);
    let owed = dual.award(&combo)?;
    let fin = mitigation_offset(main, &dual, &combo)?;
    let ok = fin >= 0.0
        && (fin - (main - owed).max(0.0)).abs() <= 1e-12
        && (!model.is_dutiful(model.factual_choice()) || fin == main);
    results[7].record(ok, || {
        format!("instance {instance}: main {main} owed {owed} final {fin}")
    });
    Ok(())
}

/// Runs every suite; errors from the engine count as failures of the
/// property being checked.
pub fn run_verification(cfg: &VerifyConfig) -> VerifyReport {
    let mut results = vec![
        PropertyResult::new(P_TRANSPORT),
        PropertyResult::new(P_CC_OPTIMAL),
        PropertyResult::new(P_FM_OPTIMAL),
        PropertyResult::new(P_FM_MEAN),
        PropertyResult::new(P_CC_GE_FM),
        PropertyResult::new(P_VK),
        PropertyResult::new(P_PRESUMPTION),
        PropertyResult::new(P_MITIGATION),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..cfg.instances {
        if let Err(e) = transport_instance(&mut rng, &mut results, i) {
            results[0].record(false, || format!("instance {i}: {e}"));
        }
        if let Err(e) = schedule_instance(&mut rng, cfg, &mut results, i) {
            results[1].record(false, || format!("instance {i}: {e}"));
        }
        if let Err(e) = choice_instance(&mut rng, &mut results, i) {
            results[5].record(false, || format!("instance {i}: {e}"));
        }
    }
    VerifyReport {
        config: *cfg,
        properties: results,
    }
}
