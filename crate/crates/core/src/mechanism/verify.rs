use serde::Serialize;

use super::attackers::{best_response_dynamics, enumerate_pure_ne, increasing_difference};
use super::complexity::solve_task_complexities;
use super::contracts::{brute_force_contract_oracle, check_feasibility, detection_probability};
use super::oracles::{multiplier_sign_changes, self_report_grid};
use super::solve::{end_to_end_solve, MechanismInput};
use super::stage1::{equilibrium_sigma, perceived_for_check};
use super::{AttackerProfile, BoundPosition, MechanismError, MAX_ORACLE_TYPES};

const SELF_REPORT_GRID_STEP: f64 = 1e-5;
const SELF_REPORT_TOL: f64 = 1e-4;
const REWARD_GRID_STEP: f64 = 0.01;
const MAX_DEFAULT_ATTACKERS: usize = 12;
const MULTIPLIER_SCAN_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyCheck {
    pub name: &'static str,
    /// False when the check's premise does not hold for this input.
    pub applicable: bool,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> VerifyCheck {
    VerifyCheck { name, applicable: true, passed, detail }
}

fn skipped(name: &'static str, detail: String) -> VerifyCheck {
    VerifyCheck { name, applicable: false, passed: true, detail }
}

/// Solves the game and checks every closed form against its brute-force counterpart.
pub fn verify_mechanism(input: &MechanismInput) -> Result<VerifyReport, MechanismError> {
    let solution = end_to_end_solve(input)?;
    let p = &input.organizer;
    let mut checks = Vec::new();

    let grid = self_report_grid(p, input.mean_reward, SELF_REPORT_GRID_STEP)?;
    let closed = solution.self_report_ratio.value;
    let gap = (grid.argmax - closed).abs();
    checks.push(check(
        "self_report_ratio",
        gap <= SELF_REPORT_TOL,
        format!(
            "grid argmax {:.6} ({}), grid minimum {:.6}, closed form {closed:.6}, gap {gap:.2e}",
            grid.argmax,
            if grid.interior { "interior" } else { "boundary" },
            grid.argmin
        ),
    ));

    let sigma = equilibrium_sigma(p, closed)?;
    if sigma.position == BoundPosition::Interior {
        let gap = (perceived_for_check(p, sigma.value) - (1.0 - closed)).abs();
        checks.push(check(
            "reporting_indifference",
            gap <= 1e-12,
            format!("sigma {:.6}, indifference gap {gap:.2e}", sigma.value),
        ));
    } else {
        checks.push(skipped(
            "reporting_indifference",
            format!("reporting rate clamped at {}", sigma.value),
        ));
    }

    checks.extend(attacker_checks(input, closed)?);

    let j = input.hunters.len();
    let alphas: Vec<f64> = solution.menu.iter().map(|c| c.task_complexity).collect();
    let rewards: Vec<f64> = solution.menu.iter().map(|c| c.reward).collect();
    if j <= MAX_ORACLE_TYPES {
        let oracle = brute_force_contract_oracle(&input.hunters, &alphas, REWARD_GRID_STEP)?;
        // grid rounding accumulates one step per type from the least capable upward
        let close = oracle.minimizers.iter().any(|m| {
            m.iter()
                .zip(&rewards)
                .enumerate()
                .all(|(i, (g, r))| (g - r).abs() <= (j - i) as f64 * REWARD_GRID_STEP + 1e-9)
        });
        checks.push(check(
            "reward_menu_oracle",
            close,
            format!(
                "telescoped total {:.6}, grid total {:.6}",
                rewards.iter().sum::<f64>(),
                oracle.total_reward
            ),
        ));
    } else {
        checks.push(skipped("reward_menu_oracle", format!("{j} types exceed the grid limit")));
    }

    let menu: Vec<(f64, f64)> = alphas.iter().copied().zip(rewards.iter().copied()).collect();
    let verdict = check_feasibility(&input.hunters, &menu)?;
    checks.push(check(
        "menu_feasibility",
        verdict.feasible(),
        match &verdict.first_violation {
            None => "all IC/IR conditions hold".into(),
            Some(v) => format!("{v:?}"),
        },
    ));

    let m = input.hunter_count();
    let complexity =
        solve_task_complexities(&input.hunters, m, input.gamma, solution.expected_undetected_stage1)?;
    let quad = complexity.types.iter().map(|t| t.quadratic_residual).fold(0.0, f64::max);
    let a_ok = complexity.types.iter().all(|t| t.a <= 0.25 + 1e-15);
    let brackets = multiplier_sign_changes(&input.hunters, m, input.gamma, MULTIPLIER_SCAN_POINTS);
    let bracketed = brackets
        .iter()
        .any(|&(lo, hi)| complexity.lambda >= lo * (1.0 - 1e-9) && complexity.lambda <= hi * (1.0 + 1e-9));
    checks.push(check(
        "multiplier_stationarity",
        complexity.residual.abs() <= 1e-8 && quad <= 1e-12 && a_ok && bracketed,
        format!(
            "lambda {:.6e}, residual {:.2e}, quadratic residual {quad:.2e}, {} sign changes on the scan",
            complexity.lambda,
            complexity.residual,
            brackets.len()
        ),
    ));

    let detected: Vec<f64> = match &input.detected_rewards {
        Some(d) => d.clone(),
        None => vec![solution.expected_undetected_stage1 / m as f64 * input.mean_reward; j],
    };
    let worst_round_trip = solution
        .menu
        .iter()
        .zip(&input.hunters)
        .zip(&detected)
        .map(|((c, h), d)| {
            let paid = c.reward_ratio
                * detection_probability(h.capability, input.gamma, c.task_complexity)
                * d;
            (paid - c.reward).abs() / c.reward.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    checks.push(check(
        "reward_ratio_round_trip",
        worst_round_trip <= 1e-10,
        format!("largest relative error {worst_round_trip:.2e}"),
    ));

    let utilities: Vec<f64> = solution.menu.iter().map(|c| c.hunter_utility).collect();
    let lowest = *utilities.last().unwrap();
    checks.push(check(
        "hunter_participation",
        lowest.abs() <= 1e-9 && utilities.iter().all(|&u| u >= -1e-9),
        format!("utilities {utilities:?}"),
    ));

    Ok(VerifyReport { checks })
}

fn attacker_checks(input: &MechanismInput, pi_s: f64) -> Result<Vec<VerifyCheck>, MechanismError> {
    let p = &input.organizer;
    let attackers = match &input.attackers {
        Some(a) => a.clone(),
        None => {
            let n = (p.expected_hunters.round() as usize).clamp(1, MAX_DEFAULT_ATTACKERS);
            vec![AttackerProfile { reward: input.mean_reward, cost: 0.0 }; n]
        }
    };
    let n = attackers.len();
    let equilibria = enumerate_pure_ne(&attackers, p, pi_s)?;
    let mut found = Vec::new();
    for start in [false, true] {
        let out = best_response_dynamics(&attackers, p, pi_s, &vec![start; n])?;
        found.push(equilibria.contains(&out.profile));
    }
    let worst = attackers
        .iter()
        .flat_map(|a| (0..n.saturating_sub(1)).map(move |k| (a, k)))
        .map(|(a, k)| increasing_difference(a, p, pi_s, k, k + 1))
        .fold(0.0, f64::min);
    Ok(vec![
        check(
            "attacker_equilibrium",
            found.iter().all(|&f| f),
            format!("{} pure equilibria among {n} attackers", equilibria.len()),
        ),
        check(
            "increasing_differences",
            worst >= -1e-9,
            format!("smallest difference {worst:.2e}"),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::{HunterType, OrganizerParams};

    fn input() -> MechanismInput {
        MechanismInput {
            organizer: OrganizerParams {
                value_per_reduction: 1.0,
                total_tokens: 1000.0,
                eligible_addresses: 1000,
                detection_cost: 0.1,
                baseline_detection: 0.2,
                externality: 0.6,
                expected_hunters: 100.0,
            },
            hunters: vec![
                HunterType { capability: 8.0, variable_cost: 0.5, fixed_cost: 0.1 },
                HunterType { capability: 6.0, variable_cost: 0.8, fixed_cost: 0.2 },
            ],
            gamma: 1.0,
            mean_reward: 5.0,
            detected_rewards: None,
            hunters_m: None,
            attackers: None,
        }
    }

    #[test]
    fn closed_form_self_report_misses_boundary_maximum() {
        // the utility is convex in the ratio: the grid maximum sits on the
        // boundary while the closed form lands inside
        let report = verify_mechanism(&input()).unwrap();
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        assert_eq!(failed, vec!["self_report_ratio"], "{report:#?}");
    }

    #[test]
    fn clamped_closed_form_matches_boundary_maximum() {
        let mut rich = input();
        rich.organizer.total_tokens = 1e7;
        // everyone self-reports at a zero ratio, so detected rewards must be given
        rich.detected_rewards = Some(vec![50.0, 50.0]);
        let report = verify_mechanism(&rich).unwrap();
        assert!(report.all_passed(), "{report:#?}");
    }
}
