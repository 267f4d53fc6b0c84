//! The five verbs, as functions from parsed arguments to printable output.

use std::path::{Path, PathBuf};

use lostchance::choice::{flatten_choice_case, presume_choice_ii_cp, presume_choice_it_cp};
use lostchance::coupling::{evidence_coupling, least_divergence_coupling, transport_cost};
use lostchance::scenarios::{
    matos_csv, matos_sweep, medical_csv, medical_sweep, reproduce_table, table_two, CellStatus,
};
use lostchance::verify::{run_verification, VerifyConfig};
use lostchance::{
    evaluate_policy, CaseModel, CompensationSchedule, Connection, Indemnity, Information, Matrix,
    PolicyCombo, Presumption,
};

use crate::casefile::LoadedCase;
use crate::format::{columns, num};
use crate::{CliError, OUT_DIR_ENV};

/// What a command printed, and whether it raised flags or failed outright.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub text: String,
    /// Caveats that `--strict` turns into exit code 1.
    pub flags: Vec<String>,
    /// A check failed; exit code 1 regardless of `--strict`.
    pub failed: bool,
}

/// How the information restriction was requested on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum InfoSpec {
    Named(Information),
    /// Blocks of outcome labels, `a,b;c`.
    Blocks(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    All,
    One {
        info: InfoSpec,
        connection: Connection,
        indemnity: Indemnity,
    },
}

fn custom_partition(spec: &str, labels: &[String]) -> Result<Information, CliError> {
    let blocks = spec
        .split(';')
        .map(|block| {
            block
                .split(',')
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| {
                    labels
                        .iter()
                        .position(|x| x == l)
                        .ok_or_else(|| CliError::Input(format!("partition names unknown outcome `{l}`")))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Information::Custom(
        blocks.into_iter().filter(|b| !b.is_empty()).collect(),
    ))
}

/// The case as the engine evaluates it: choice cases are presumed and
/// flattened into (choice, result) outcomes.
struct Prepared {
    case: CaseModel,
    evidence: Option<Matrix>,
    published: Option<Matrix>,
    observed: Option<usize>,
    notes: Vec<String>,
    choice: bool,
}

fn prepare(loaded: &LoadedCase, presumption: Presumption) -> Result<Prepared, CliError> {
    match loaded {
        LoadedCase::Plain {
            case,
            evidence,
            published,
        } => Ok(Prepared {
            case: case.clone(),
            evidence: evidence.clone(),
            published: published.clone(),
            observed: case.factual_observed(),
            notes: Vec::new(),
            choice: false,
        }),
        LoadedCase::Choice(model) => {
            let presumed = match presumption {
                Presumption::IurisTantum => presume_choice_it_cp(model)?,
                Presumption::IurisEtDeIure => presume_choice_ii_cp(model)?,
            };
            let flat = flatten_choice_case(&presumed)?;
            Ok(Prepared {
                observed: Some(flat.observed()),
                case: flat.case,
                evidence: Some(flat.evidence),
                published: None,
                notes: presumed.notes().to_vec(),
                choice: true,
            })
        }
    }
}

impl Prepared {
    fn matrix_for(&self, c: Connection) -> Option<&Matrix> {
        match c {
            Connection::PublishedTable => self.published.as_ref(),
            _ => self.evidence.as_ref(),
        }
    }

    fn combos(&self, selection: &Selection) -> Result<Vec<PolicyCombo>, CliError> {
        match selection {
            Selection::All => Ok(PolicyCombo::grid()
                .into_iter()
                .filter(|c| {
                    !matches!(c.connection, Connection::Evidence | Connection::PublishedTable)
                        || self.matrix_for(c.connection).is_some()
                })
                .collect()),
            Selection::One {
                info,
                connection,
                indemnity,
            } => {
                if *connection == Connection::PublishedTable && self.choice {
                    return Err(CliError::Input(
                        "choice cases have no published coupling; use e-c, ld-c or i-c".into(),
                    ));
                }
                let info = match info {
                    InfoSpec::Named(i) => i.clone(),
                    InfoSpec::Blocks(s) => custom_partition(s, self.case.space().labels())?,
                };
                Ok(vec![PolicyCombo::new(info, *connection, *indemnity)])
            }
        }
    }

    /// Flag when a published coupling claims to be least-divergence but costs
    /// more than the comonotone one.
    fn published_flag(&self) -> Option<String> {
        let published = self.published.as_ref()?;
        let optimal = transport_cost(&least_divergence_coupling(&self.case));
        let cost = transport_cost(&evidence_coupling(&self.case, published.clone()).ok()?);
        (cost > optimal + 1e-9 * optimal.abs().max(1.0)).then(|| {
            format!(
                "published coupling has squared-value cost {} but the least-divergence coupling has {}",
                num(cost),
                num(optimal)
            )
        })
    }
}

/// One evaluated schedule row.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub policy: String,
    pub outcome: String,
    pub value: f64,
    pub x: f64,
    pub award: f64,
    pub observed: bool,
}

fn rows_of(schedule: &CompensationSchedule, observed: Option<usize>) -> Vec<EvalRow> {
    let policy = schedule
        .policy
        .as_ref()
        .map(ToString::to_string)
        .unwrap_or_default();
    schedule
        .entries
        .iter()
        .map(|e| EvalRow {
            policy: policy.clone(),
            outcome: e.label.clone(),
            value: e.value,
            x: e.x,
            award: e.award.unwrap_or(f64::NAN),
            observed: Some(e.outcome) == observed,
        })
        .collect()
}

/// Schedules for every selected policy, with what the engine noted on the way.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Evaluation {
    pub rows: Vec<EvalRow>,
    pub notes: Vec<String>,
    pub flags: Vec<String>,
}

pub fn evaluate_rows(
    loaded: &LoadedCase,
    selection: &Selection,
    presumption: Presumption,
) -> Result<Evaluation, CliError> {
    let prepared = prepare(loaded, presumption)?;
    let mut rows = Vec::new();
    let mut notes = prepared.notes.clone();
    let mut flags = Vec::new();
    for combo in prepared.combos(selection)? {
        let schedule = evaluate_policy(&prepared.case, &combo, prepared.matrix_for(combo.connection))?;
        for n in &schedule.notes {
            let n = format!("{combo}: {n}");
            if !notes.contains(&n) {
                notes.push(n);
            }
        }
        if matches!(
            combo.connection,
            Connection::LeastDivergence | Connection::PublishedTable
        ) {
            if let Some(f) = prepared.published_flag() {
                if !flags.contains(&f) {
                    flags.push(f);
                }
            }
        }
        rows.extend(rows_of(&schedule, prepared.observed));
    }
    Ok(Evaluation { rows, notes, flags })
}

pub fn evaluate(
    loaded: &LoadedCase,
    selection: &Selection,
    presumption: Presumption,
    csv: bool,
) -> Result<Output, CliError> {
    let Evaluation { rows, notes, flags } = evaluate_rows(loaded, selection, presumption)?;
    let text = if csv {
        eval_csv(&rows)?
    } else {
        let body: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.policy.clone(),
                    r.outcome.clone(),
                    num(r.value),
                    num(r.x),
                    num(r.award),
                    if r.observed { "*".into() } else { String::new() },
                ]
            })
            .collect();
        let mut t = columns(
            &["policy", "outcome", "value", "X", "award", "observed"],
            &body,
            &[false, false, true, true, true, false],
        );
        for n in &notes {
            t.push_str(&format!("note: {n}\n"));
        }
        for f in &flags {
            t.push_str(&format!("flag: {f}\n"));
        }
        t
    };
    Ok(Output {
        text,
        flags,
        failed: false,
    })
}

fn eval_csv(rows: &[EvalRow]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Input(format!("csv: {e}"));
    w.write_record(["policy", "outcome", "value", "x", "award", "observed"])
        .map_err(io)?;
    for r in rows {
        w.write_record([
            r.policy.clone(),
            r.outcome.clone(),
            r.value.to_string(),
            r.x.to_string(),
            r.award.to_string(),
            r.observed.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

/// Reproduction report for one of the published tables.
pub fn table(id: u8, misdiagnosis: Option<(f64, f64, f64)>) -> Result<Output, CliError> {
    let report = match (id, misdiagnosis) {
        (2, Some((p0, p1, dv))) => table_two(p0, p1, dv)?,
        (_, Some(_)) => {
            return Err(CliError::Input(
                "--p0/--p1/--delta-v apply to table 2 only".into(),
            ));
        }
        (id, None) => reproduce_table(id)?,
    };
    let mut body = Vec::new();
    for r in &report.rows {
        for c in &r.cells {
            body.push(vec![
                r.status.to_string(),
                r.label.clone(),
                c.policy.clone(),
                c.outcome.clone(),
                num(c.computed),
                num(c.expected),
                c.status.to_string(),
            ]);
        }
    }
    let mut text = format!(
        "table {}: {}\nparameters: {}\n",
        report.id, report.title, report.parameters
    );
    text.push_str(&columns(
        &["row", "label", "policy", "outcome", "computed", "printed", "cell"],
        &body,
        &[false, false, false, false, true, true, false],
    ));
    let mut flags = Vec::new();
    for r in &report.rows {
        if let Some(n) = &r.note {
            text.push_str(&format!("{} {}: {n}\n", r.status, r.label));
            if r.status == CellStatus::Flag {
                flags.push(format!("{}: {n}", r.label));
            }
        }
    }
    let count = |s: CellStatus| report.rows.iter().filter(|r| r.status == s).count();
    text.push_str(&format!(
        "{} rows: {} PASS, {} FLAG, {} FAIL\n",
        report.rows.len(),
        count(CellStatus::Pass),
        count(CellStatus::Flag),
        count(CellStatus::Fail)
    ));
    Ok(Output {
        text,
        flags,
        failed: !report.passed(),
    })
}

/// `n` evenly spaced points from `min` to `max` inclusive; one point is `min`.
pub fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    max
                } else {
                    min + (max - min) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Explicit `--out`, else `name` inside `$LOSTCHANCE_OUT_DIR`, else `name` in
/// the working directory.
pub fn output_path(out: Option<PathBuf>, name: &str) -> PathBuf {
    out.unwrap_or_else(|| match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(name),
        _ => PathBuf::from(name),
    })
}

/// Writes via a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    use std::io::Write;
    let fail = |e: &dyn std::fmt::Display| CliError::Input(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| fail(&e))?;
    tmp.as_file().sync_all().map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

/// A grid axis: `steps` points from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }
}

fn wrote(path: &Path, rows: usize) -> Output {
    Output {
        text: format!("wrote {rows} rows to {}\n", path.display()),
        ..Output::default()
    }
}

pub fn sweep_matos(theta: Axis, p: Axis, out: &Path) -> Result<Output, CliError> {
    let rows = matos_sweep(&theta.points(), &p.points())?;
    write_atomic(out, &matos_csv(&rows))?;
    Ok(wrote(out, rows.len()))
}

pub fn sweep_medical(
    p0: f64,
    p1: Axis,
    delta_v: f64,
    combo: &PolicyCombo,
    out: &Path,
) -> Result<Output, CliError> {
    let rows = medical_sweep(p0, &p1.points(), delta_v, combo)?;
    write_atomic(out, &medical_csv(&rows, combo, delta_v))?;
    Ok(wrote(out, rows.len()))
}

pub fn verify(cfg: &VerifyConfig) -> Output {
    let report = run_verification(cfg);
    Output {
        text: report.render(),
        flags: Vec::new(),
        failed: !report.all_passed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        assert!(linspace(0.0, 1.0, 0).is_empty());
        assert_eq!(linspace(0.3, 1.0, 1), vec![0.3]);
        let g = linspace(0.0, 1.0, 101);
        assert_eq!((g[0], g[50], g[100]), (0.0, 0.5, 1.0));
    }

    #[test]
    fn partition_from_labels() {
        let labels: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        assert_eq!(
            custom_partition("a, b; c", &labels).unwrap(),
            Information::Custom(vec![vec![0, 1], vec![2]])
        );
        assert!(custom_partition("a;z", &labels).is_err());
    }
}
