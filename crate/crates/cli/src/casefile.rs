//! JSON case files: one case per file, either a single-stage case
//! (`outcomes` + `marginals`) or a choice case (`choice`).

use std::path::Path;

use lostchance::choice::ChoiceDraft;
use lostchance::coupling::evidence_coupling;
use lostchance::{validate_case, CaseDraft, CaseModel, ChoiceCaseModel, Matrix, MoneyMap};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A case file. Give either `outcomes` and `marginals`, or `choice`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    /// Outcome labels and their values, in a fixed order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<OutcomeEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginals: Option<Marginals>,
    /// Joint law established by evidence. Rows are counterfactual outcomes,
    /// columns factual outcomes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Vec<Vec<f64>>>,
    /// A published joint law, used by the `paper-table` connection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub published: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub money: MoneySpec,
    /// Label of the factual outcome actually observed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choice: Option<ChoiceBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct OutcomeEntry {
    pub label: String,
    pub value: f64,
}

/// Outcome probabilities without and with the tort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Marginals {
    pub counterfactual: Vec<f64>,
    pub factual: Vec<f64>,
}

/// Map from value back to money.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MoneySpec {
    /// Values are money.
    #[default]
    Identity,
    /// Inverse of the CRRA curve with risk aversion `theta` in [0, 1].
    Crra { theta: f64 },
    /// Piecewise-linear map through `(values[i], money[i])`.
    Tabulated { values: Vec<f64>, money: Vec<f64> },
}

/// Choice case: what the victim could have done, and what followed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ChoiceBlock {
    pub choices: Vec<String>,
    /// Labels of the choices the victim was entitled or bound to make.
    pub duty_set: Vec<String>,
    pub results: Vec<String>,
    /// `values[c][r]`: value of result `r` after choice `c`.
    pub values: Vec<Vec<f64>>,
    /// Evidence on the counterfactual choice; absent means unknown.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterfactual_choice: Option<Vec<f64>>,
    pub result_given_choice: Conditionals,
    /// Law of the factual choice; defaults to a point mass on the factual choice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factual_choice_law: Option<Vec<f64>>,
    pub factual: FactualPair,
    /// Joint law of (counterfactual choice, factual choice).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choice_coupling: Option<Vec<Vec<f64>>>,
    /// Result couplings for specific choice pairs; other pairs are comonotone.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub result_couplings: Vec<PairCoupling>,
}

/// Result laws given each choice, one row per choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Conditionals {
    pub counterfactual: Vec<Vec<f64>>,
    pub factual: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FactualPair {
    pub choice: String,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PairCoupling {
    pub counterfactual_choice: String,
    pub factual_choice: String,
    pub joint: Vec<Vec<f64>>,
}

/// A validated case ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedCase {
    Plain {
        case: CaseModel,
        evidence: Option<Matrix>,
        published: Option<Matrix>,
    },
    Choice(ChoiceCaseModel),
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn index_of(labels: &[String], label: &str, what: &str) -> Result<usize, CliError> {
    labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| CliError::Input(format!("unknown {what} `{label}`")))
}

fn matrix(rows: &[Vec<f64>]) -> Result<Matrix, CliError> {
    Matrix::from_rows(rows.to_vec()).map_err(input)
}

impl MoneySpec {
    fn build(&self) -> Result<MoneyMap, CliError> {
        match self {
            MoneySpec::Identity => Ok(MoneyMap::Identity),
            MoneySpec::Crra { theta } => MoneyMap::crra(*theta).map_err(input),
            MoneySpec::Tabulated { values, money } => {
                MoneyMap::tabulated(values.clone(), money.clone()).map_err(input)
            }
        }
    }

    fn from_map(m: &MoneyMap) -> Self {
        match m {
            MoneyMap::Identity => MoneySpec::Identity,
            MoneyMap::InverseUtility(c) => MoneySpec::Crra { theta: c.theta() },
            MoneyMap::Tabulated { values, money } => MoneySpec::Tabulated {
                values: values.clone(),
                money: money.clone(),
            },
        }
    }
}

impl CaseFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("case file: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("case files always serialize")
    }

    /// Validates the file into a case model.
    pub fn load(&self) -> Result<LoadedCase, CliError> {
        match (&self.outcomes, &self.choice) {
            (Some(_), Some(_)) => Err(CliError::Input(
                "a case file holds either `outcomes` or `choice`, not both".into(),
            )),
            (None, None) => Err(CliError::Input(
                "a case file needs an `outcomes` or a `choice` section".into(),
            )),
            (Some(outcomes), None) => self.load_plain(outcomes),
            (None, Some(block)) => {
                for (key, present) in [
                    ("marginals", self.marginals.is_some()),
                    ("evidence", self.evidence.is_some()),
                    ("published", self.published.is_some()),
                    ("observed", self.observed.is_some()),
                ] {
                    if present {
                        return Err(CliError::Input(format!(
                            "`{key}` belongs to single-stage cases; choice cases state these inside `choice`"
                        )));
                    }
                }
                load_choice(block, self.money.build()?).map(LoadedCase::Choice)
            }
        }
    }

    fn load_plain(&self, outcomes: &[OutcomeEntry]) -> Result<LoadedCase, CliError> {
        let marginals = self
            .marginals
            .as_ref()
            .ok_or_else(|| CliError::Input("`outcomes` needs `marginals`".into()))?;
        let labels: Vec<String> = outcomes.iter().map(|o| o.label.clone()).collect();
        let factual_observed = match &self.observed {
            Some(l) => Some(index_of(&labels, l, "observed outcome")?),
            None => None,
        };
        let case = validate_case(CaseDraft {
            labels,
            values: outcomes.iter().map(|o| o.value).collect(),
            counterfactual: marginals.counterfactual.clone(),
            factual: marginals.factual.clone(),
            money: self.money.build()?,
            factual_observed,
        })
        .map_err(input)?;
        let check = |rows: &Option<Vec<Vec<f64>>>, what: &str| -> Result<Option<Matrix>, CliError> {
            match rows {
                None => Ok(None),
                Some(r) => {
                    let m = matrix(r)?;
                    evidence_coupling(&case, m.clone())
                        .map_err(|e| CliError::Input(format!("{what} coupling: {e}")))?;
                    Ok(Some(m))
                }
            }
        };
        let evidence = check(&self.evidence, "evidence")?;
        let published = check(&self.published, "published")?;
        Ok(LoadedCase::Plain {
            case,
            evidence,
            published,
        })
    }

    /// Writes a single-stage case back out.
    pub fn from_plain(case: &CaseModel, evidence: Option<&Matrix>, published: Option<&Matrix>) -> Self {
        let d = case.to_draft();
        CaseFile {
            outcomes: Some(
                d.labels
                    .iter()
                    .zip(&d.values)
                    .map(|(l, &v)| OutcomeEntry {
                        label: l.clone(),
                        value: v,
                    })
                    .collect(),
            ),
            marginals: Some(Marginals {
                counterfactual: d.counterfactual,
                factual: d.factual,
            }),
            evidence: evidence.map(Matrix::to_rows),
            published: published.map(Matrix::to_rows),
            money: MoneySpec::from_map(&d.money),
            observed: d.factual_observed.map(|i| d.labels[i].clone()),
            choice: None,
        }
    }

    /// Writes a choice case back out. A presumed counterfactual choice is a
    /// legal conclusion, not a fact, so it is not written.
    pub fn from_choice(model: &ChoiceCaseModel) -> Self {
        let d = model.to_draft();
        let name = |labels: &[String], i: usize| labels[i].clone();
        CaseFile {
            outcomes: None,
            marginals: None,
            evidence: None,
            published: None,
            money: MoneySpec::from_map(&d.money),
            observed: None,
            choice: Some(ChoiceBlock {
                duty_set: d.duty_set.iter().map(|&c| name(&d.choices, c)).collect(),
                values: d.values,
                counterfactual_choice: d.counterfactual_choice,
                result_given_choice: Conditionals {
                    counterfactual: d.result_given_choice_cf,
                    factual: d.result_given_choice_f,
                },
                factual_choice_law: d.factual_choice_law,
                factual: FactualPair {
                    choice: name(&d.choices, d.factual_choice),
                    result: name(&d.results, d.factual_result),
                },
                choice_coupling: d.choice_coupling.as_ref().map(Matrix::to_rows),
                result_couplings: d
                    .result_couplings
                    .iter()
                    .map(|((c0, c1), m)| PairCoupling {
                        counterfactual_choice: name(&d.choices, *c0),
                        factual_choice: name(&d.choices, *c1),
                        joint: m.to_rows(),
                    })
                    .collect(),
                choices: d.choices,
                results: d.results,
            }),
        }
    }
}

fn load_choice(b: &ChoiceBlock, money: MoneyMap) -> Result<ChoiceCaseModel, CliError> {
    let duty_set = b
        .duty_set
        .iter()
        .map(|l| index_of(&b.choices, l, "duty choice"))
        .collect::<Result<_, _>>()?;
    let result_couplings = b
        .result_couplings
        .iter()
        .map(|p| {
            Ok((
                (
                    index_of(&b.choices, &p.counterfactual_choice, "choice")?,
                    index_of(&b.choices, &p.factual_choice, "choice")?,
                ),
                matrix(&p.joint)?,
            ))
        })
        .collect::<Result<_, CliError>>()?;
    ChoiceCaseModel::new(ChoiceDraft {
        choices: b.choices.clone(),
        duty_set,
        results: b.results.clone(),
        values: b.values.clone(),
        money,
        counterfactual_choice: b.counterfactual_choice.clone(),
        result_given_choice_cf: b.result_given_choice.counterfactual.clone(),
        result_given_choice_f: b.result_given_choice.factual.clone(),
        factual_choice_law: b.factual_choice_law.clone(),
        factual_choice: index_of(&b.choices, &b.factual.choice, "factual choice")?,
        factual_result: index_of(&b.results, &b.factual.result, "factual result")?,
        choice_coupling: b.choice_coupling.as_deref().map(matrix).transpose()?,
        result_couplings,
    })
    .map_err(input)
}

/// JSON Schema of the case-file format.
pub fn schema() -> String {
    serde_json::to_string_pretty(&schemars::schema_for!(CaseFile)).expect("schema serializes")
}
