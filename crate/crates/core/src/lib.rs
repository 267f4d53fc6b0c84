//! Damages for lost chances: twin counterfactual/factual outcome laws, the
//! couplings that join them, and compensation schedules derived from the gap
//! between the two.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

// `!(x > 0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod choice;
pub mod coupling;
pub mod error;
pub mod oracle;
pub mod outcome;
pub mod scalar;
pub mod scenarios;
pub mod valuation;
pub mod verify;

pub use choice::{matos_award, matos_threshold, Presumption};
pub use coupling::{CouplingOrigin, Matrix as GenericMatrix};
pub use error::{Axis, Error, Result, ValidationReport, Violation};
pub use outcome::{award_from_compensation, validate_case};
pub use scalar::Scalar;
pub use valuation::{evaluate_policy, Connection, Indemnity, Information, PartitionOrigin, PolicyCombo};

pub type Matrix = coupling::Matrix<f64>;
pub type Coupling = coupling::Coupling<f64>;
pub type OutcomeSpace = outcome::OutcomeSpace<f64>;
pub type DiscreteDistribution = outcome::DiscreteDistribution<f64>;
pub type UtilityCurve = outcome::UtilityCurve<f64>;
pub type MoneyMap = outcome::MoneyMap<f64>;
pub type CaseDraft = outcome::CaseDraft<f64>;
pub type CaseModel = outcome::CaseModel<f64>;
pub type GapTable = valuation::GapTable<f64>;
pub type CompensationSchedule = valuation::CompensationSchedule<f64>;
pub type ChoiceDraft = choice::ChoiceDraft<f64>;
pub type ChoiceCaseModel = choice::ChoiceCaseModel<f64>;
pub type DualCaseModel = choice::DualCaseModel<f64>;
