use std::path::PathBuf;

use airdrop_forge_core::detectors::DetectorError;
use airdrop_forge_core::ledger::LedgerError;
use airdrop_forge_core::mechanism::MechanismError;
use airdrop_forge_core::profit::ProfitError;
use airdrop_forge_core::synth::SynthError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error(transparent)]
    Profit(#[from] ProfitError),
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON in {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("unknown plot kind {0:?}")]
    UnknownKind(String),
    #[error("plot kind {kind} needs {needs} reports")]
    PlotInput { kind: String, needs: &'static str },
    #[error("{failed} verification check(s) failed")]
    VerifyFailed { failed: usize },
}

impl CliError {
    /// Machine-readable code printed as `error_code=...` on stderr.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "USAGE",
            CliError::Ledger(e) => match e {
                LedgerError::MissingFile(_) => "MISSING_FILE",
                LedgerError::Io(_) => "IO",
                LedgerError::MissingPrice { .. } => "MISSING_PRICE",
                _ => "SCHEMA",
            },
            CliError::Detector(_) => "INVALID_CONFIG",
            CliError::Profit(e) => match e {
                ProfitError::Ledger(LedgerError::MissingPrice { .. }) => "MISSING_PRICE",
                ProfitError::Ledger(_) => "SCHEMA",
                ProfitError::NegativeFee { .. } => "NEGATIVE_FEE",
                ProfitError::TokenMismatch { .. } => "TOKEN_MISMATCH",
                ProfitError::InvalidParams(_) => "INVALID_PARAMS",
            },
            CliError::Mechanism(e) => match e {
                MechanismError::Domain(_) => "DOMAIN",
                MechanismError::Precondition(_) => "PRECONDITION",
                MechanismError::NonConvergence { .. } => "NON_CONVERGENCE",
                MechanismError::SizeLimit { .. } => "SIZE_LIMIT",
                MechanismError::OrderingViolation { .. } => "ORDERING_VIOLATION",
                MechanismError::InfeasibleOrdering => "INFEASIBLE_ORDERING",
                MechanismError::NoRoot { .. } => "NO_ROOT",
            },
            CliError::Synth(SynthError::Spec(_)) => "SPEC",
            CliError::Synth(SynthError::Ledger(_)) => "SCHEMA",
            CliError::Read { .. } => "IO",
            CliError::Write { .. } => "IO",
            CliError::Json { .. } => "SCHEMA",
            CliError::UnknownKind(_) => "UNKNOWN_KIND",
            CliError::PlotInput { .. } => "UNKNOWN_KIND",
            CliError::VerifyFailed { .. } => "VERIFY_MISMATCH",
        }
    }

    /// 2 when a solver ran but found no answer, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mechanism(
                MechanismError::NonConvergence { .. }
                | MechanismError::NoRoot { .. }
                | MechanismError::InfeasibleOrdering,
            ) => 2,
            _ => 1,
        }
    }
}
