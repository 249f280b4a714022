//! The four-stage airdrop game.
//!
//! 1. The organizer picks a self-report reward ratio `pi_s`.
//! 2. Attackers decide whether to self-report; the stage is a supermodular
//!    binary game whose equilibria are exposed both through best-response
//!    dynamics and exhaustive enumeration.
//! 3. The organizer offers bounty hunters a menu of `(task complexity,
//!    reward)` contracts; rewards for given complexities follow the
//!    telescoping rule and complexities come from a one-dimensional root
//!    search on the stationarity multiplier.
//! 4. Hunters pick contracts; incentive compatibility and individual
//!    rationality are checked directly.
//!
//! Every closed form has a brute-force counterpart in [`oracles`] or next to
//! it ([`enumerate_pure_ne`], [`brute_force_contract_oracle`]).

mod attackers;
mod complexity;
mod contracts;
pub mod oracles;
mod params;
mod solve;
mod stage1;
mod verify;

pub use attackers::{
    attacker_best_response, attacker_utility, best_response_dynamics, enumerate_pure_ne,
    increasing_difference, perceived_detection, BestResponseOutcome, MAX_ENUMERATION_ATTACKERS,
};
pub use complexity::{
    detection_prob_for_a, expected_undetected_stage3, solve_task_complexities, ComplexitySolution,
    TypeComplexity, LAMBDA_FLOOR,
};
pub use contracts::{
    brute_force_contract_oracle, check_feasibility, detection_probability, hunter_utilities,
    optimal_reward_ratio, optimal_rewards, ContractOracleOutcome, FeasibilityVerdict,
    FeasibilityViolation, MAX_ORACLE_TYPES,
};
pub use params::{AttackerProfile, HunterType, OrganizerParams};
pub use solve::{
    end_to_end_solve, self_report_sweep, Contract, MechanismInput, MechanismSolution, SweepRow,
};
pub use stage1::{
    equilibrium_sigma, expected_undetected_stage1, optimal_self_report_ratio, organizer_utility,
    BoundPosition, SelfReportRatio, SigmaEquilibrium,
};
pub use verify::{verify_mechanism, VerifyCheck, VerifyReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MechanismError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("best-response dynamics did not converge after {rounds} rounds")]
    NonConvergence { rounds: usize, last_profile: Vec<bool> },
    #[error("{n} exceeds the enumeration limit of {max}")]
    SizeLimit { n: usize, max: usize },
    #[error("ordering violated at index {index}: {what}")]
    OrderingViolation { index: usize, what: String },
    #[error("no multiplier in range yields ordered task complexities")]
    InfeasibleOrdering,
    #[error("stationarity residual has no sign change in (0, {lambda_max}]")]
    NoRoot { lambda_max: f64 },
}

pub(crate) fn domain(msg: impl Into<String>) -> MechanismError {
    MechanismError::Domain(msg.into())
}
