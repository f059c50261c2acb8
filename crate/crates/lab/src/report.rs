//! Report envelope shared by all commands.

use lane_emden_core::halfspace::Verdict;
use lane_emden_core::{Error, SystemParams};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CERTIFICATION: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const USAGE: i32 = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Ok,
    Certified,
    Inconclusive,
    Failed,
    /// The item lies outside the domain of the requested operation.
    DomainError,
    NumericalError,
}

impl Status {
    pub fn from_verdict(v: Verdict) -> Self {
        match v {
            Verdict::Certified => Status::Certified,
            Verdict::Inconclusive => Status::Inconclusive,
            Verdict::Failed => Status::Failed,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok | Status::Certified => exit::OK,
            Status::Inconclusive | Status::Failed => exit::CERTIFICATION,
            Status::NumericalError => exit::NUMERICAL,
            Status::DomainError => exit::USAGE,
        }
    }
}

/// Error attached to a single grid item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemError {
    pub kind: String,
    pub message: String,
}

fn classify(e: &Error) -> (Status, &'static str) {
    match e {
        Error::Domain(_) => (Status::DomainError, "domain"),
        Error::Regime(_) => (Status::DomainError, "regime"),
        Error::Pole(_) => (Status::DomainError, "pole"),
        Error::SupercriticalOrder { .. } => (Status::DomainError, "supercritical_order"),
        Error::Singularity(_) => (Status::NumericalError, "singularity"),
        Error::Divergence(_) => (Status::NumericalError, "divergence"),
        Error::NonFinite(_) => (Status::NumericalError, "non_finite"),
        Error::Shooting(_) => (Status::NumericalError, "shooting"),
        Error::Stiffness(_) => (Status::NumericalError, "stiffness"),
        Error::NotSubcritical(_) => (Status::NumericalError, "not_subcritical"),
        Error::InsufficientBlowup(_) => (Status::NumericalError, "insufficient_blowup"),
        Error::Consistency(_) => (Status::NumericalError, "consistency"),
    }
}

/// One grid point of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item<T> {
    pub n: u32,
    pub p: Option<f64>,
    pub eps: Option<f64>,
    pub status: Status,
    pub params: Option<SystemParams>,
    pub result: Option<T>,
    pub error: Option<ItemError>,
}

impl<T> Item<T> {
    pub fn new(n: u32, p: Option<f64>, eps: Option<f64>) -> Self {
        Item { n, p, eps, status: Status::Ok, params: None, result: None, error: None }
    }

    pub fn with_params(mut self, params: Option<SystemParams>) -> Self {
        self.params = params;
        self
    }

    pub fn ok(mut self, result: T, status: Status) -> Self {
        self.result = Some(result);
        self.status = status;
        self
    }

    pub fn failed(mut self, e: &Error) -> Self {
        let (status, kind) = classify(e);
        self.status = status;
        self.error = Some(ItemError { kind: kind.to_string(), message: e.to_string() });
        self
    }

    /// Builds an item from a computation; `status` grades a success.
    pub fn from_result(self, r: lane_emden_core::Result<T>, status: impl FnOnce(&T) -> Status) -> Self {
        match r {
            Ok(v) => {
                let s = status(&v);
                self.ok(v, s)
            }
            Err(e) => self.failed(&e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub ok: usize,
    pub failed: usize,
    pub exit_code: i32,
}

impl Summary {
    pub fn of(statuses: impl IntoIterator<Item = Status>) -> Self {
        let (mut total, mut ok, mut code) = (0, 0, exit::OK);
        for s in statuses {
            total += 1;
            if s.exit_code() == exit::OK {
                ok += 1;
            }
            code = code.max(s.exit_code());
        }
        Summary { total, ok, failed: total - ok, exit_code: code }
    }
}

/// `{command, version, config, results, summary}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub results: Vec<T>,
    pub summary: Summary,
}

impl<T> Report<Item<T>> {
    pub fn new(config: RunConfig, results: Vec<Item<T>>) -> Self {
        let summary = Summary::of(results.iter().map(|r| r.status));
        Report { command: config.command.clone(), version: VERSION.to_string(), config, results, summary }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_status_sets_the_exit_code() {
        let s = Summary::of([Status::Certified, Status::Inconclusive, Status::Ok]);
        assert_eq!((s.total, s.ok, s.failed, s.exit_code), (3, 2, 1, exit::CERTIFICATION));
        assert_eq!(Summary::of([Status::Failed, Status::NumericalError]).exit_code, exit::NUMERICAL);
        assert_eq!(Summary::of([Status::NumericalError, Status::DomainError]).exit_code, exit::USAGE);
        assert_eq!(Summary::of([]).exit_code, exit::OK);
    }

    #[test]
    fn core_errors_are_classified() {
        let item: Item<()> = Item::new(5, Some(1.0), None).failed(&Error::Stiffness(0.5));
        assert_eq!(item.status, Status::NumericalError);
        assert_eq!(item.error.unwrap().kind, "stiffness");
        let item: Item<()> = Item::new(5, Some(1.0), None).failed(&Error::Regime("x".into()));
        assert_eq!(item.status, Status::DomainError);
    }
}
