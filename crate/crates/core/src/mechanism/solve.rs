use serde::{Deserialize, Serialize};

use super::complexity::{expected_undetected_stage3, solve_task_complexities};
use super::contracts::{hunter_utilities, optimal_reward_ratio};
use super::stage1::{
    equilibrium_sigma, expected_undetected_stage1, optimal_self_report_ratio, organizer_utility,
};
use super::{
    domain, AttackerProfile, BoundPosition, HunterType, MechanismError, OrganizerParams,
    SelfReportRatio,
};

/// Full parameter set of the game, as read from a parameter file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismInput {
    #[serde(flatten)]
    pub organizer: OrganizerParams,
    /// Hunter types from most to least capable.
    pub hunters: Vec<HunterType>,
    /// Sensitivity of detection to task complexity.
    pub gamma: f64,
    /// Mean reward of a self-reporting attacker.
    pub mean_reward: f64,
    /// Total rewards of the accounts each hunter is expected to detect.
    /// Defaults to the expected detection-set size times `mean_reward`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detected_rewards: Option<Vec<f64>>,
    /// Number of hunters; defaults to one per type.
    #[serde(rename = "hunters_M", default, skip_serializing_if = "Option::is_none")]
    pub hunters_m: Option<usize>,
    /// Attackers used by the equilibrium checks in verification.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attackers: Option<Vec<AttackerProfile>>,
}

impl MechanismInput {
    pub fn hunter_count(&self) -> usize {
        self.hunters_m.unwrap_or(self.hunters.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contract {
    pub task_complexity: f64,
    pub reward: f64,
    pub reward_ratio: f64,
    pub detection_prob: f64,
    pub hunter_utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechanismSolution {
    pub self_report_ratio: SelfReportRatio,
    pub sigma: f64,
    pub sigma_position: BoundPosition,
    pub expected_undetected_stage1: f64,
    pub organizer_utility: f64,
    pub lambda: f64,
    pub multiplier_residual: f64,
    pub objective: f64,
    pub menu: Vec<Contract>,
    pub expected_undetected_stage3: f64,
}

/// Solves all four stages in order.
pub fn end_to_end_solve(input: &MechanismInput) -> Result<MechanismSolution, MechanismError> {
    let p = &input.organizer;
    p.validate()?;
    if !input.mean_reward.is_finite() || input.mean_reward <= 0.0 {
        return Err(domain("mean reward must be positive"));
    }
    let m = input.hunter_count();
    let j = input.hunters.len();
    if m != j {
        return Err(MechanismError::Precondition(format!(
            "one hunter per type is assumed: M = {m}, J = {j}"
        )));
    }

    let ratio = optimal_self_report_ratio(p, input.mean_reward)?;
    let sigma = equilibrium_sigma(p, ratio.value)?;
    let e1 = expected_undetected_stage1(p, sigma.value)?;
    let utility = organizer_utility(p, ratio.value, sigma.value, input.mean_reward)?;
    let complexity = solve_task_complexities(&input.hunters, m, input.gamma, e1)?;

    let detected = match &input.detected_rewards {
        Some(d) if d.len() == j => d.clone(),
        Some(d) => {
            return Err(domain(format!(
                "detected_rewards has {} entries for {j} hunter types",
                d.len()
            )))
        }
        None => vec![e1 / m as f64 * input.mean_reward; j],
    };
    let menu_pairs: Vec<(f64, f64)> = complexity.types.iter().map(|t| (t.alpha, t.reward)).collect();
    let utilities = hunter_utilities(&input.hunters, &menu_pairs);
    let menu = complexity
        .types
        .iter()
        .zip(&input.hunters)
        .zip(detected.iter().zip(utilities))
        .map(|((t, h), (&d, u))| {
            Ok(Contract {
                task_complexity: t.alpha,
                reward: t.reward,
                reward_ratio: optimal_reward_ratio(t.reward, h.capability, input.gamma, t.alpha, d)?,
                detection_prob: t.detection_prob,
                hunter_utility: u,
            })
        })
        .collect::<Result<Vec<_>, MechanismError>>()?;
    let probs: Vec<f64> = complexity.types.iter().map(|t| t.detection_prob).collect();
    Ok(MechanismSolution {
        self_report_ratio: ratio,
        sigma: sigma.value,
        sigma_position: sigma.position,
        expected_undetected_stage1: e1,
        organizer_utility: utility,
        lambda: complexity.lambda,
        multiplier_residual: complexity.residual,
        objective: complexity.objective,
        expected_undetected_stage3: expected_undetected_stage3(e1, &probs, m)?,
        menu,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub pi_s: f64,
    pub sigma: f64,
    pub organizer_utility: f64,
}

/// Equilibrium reporting rate and organizer utility over `steps + 1` evenly spaced ratios.
pub fn self_report_sweep(
    p: &OrganizerParams,
    mean_reward: f64,
    steps: usize,
) -> Result<Vec<SweepRow>, MechanismError> {
    if steps == 0 {
        return Err(domain("sweep needs at least one step"));
    }
    (0..=steps)
        .map(|k| {
            let pi_s = k as f64 / steps as f64;
            let sigma = equilibrium_sigma(p, pi_s)?.value;
            Ok(SweepRow {
                pi_s,
                sigma,
                organizer_utility: organizer_utility(p, pi_s, sigma, mean_reward)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_input() -> MechanismInput {
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
    fn end_to_end_is_consistent() {
        let input = sample_input();
        let s = end_to_end_solve(&input).unwrap();
        assert!((s.self_report_ratio.value - 0.33).abs() < 1e-12);
        assert!(s.multiplier_residual.abs() <= 1e-8);
        assert_eq!(s.menu.len(), 2);
        assert!(s.menu[0].task_complexity >= s.menu[1].task_complexity);
        assert!(s.menu[1].hunter_utility.abs() < 1e-9);
        assert!(s.expected_undetected_stage3 <= s.expected_undetected_stage1);
    }

    #[test]
    fn rejects_hunter_count_mismatch() {
        let input = MechanismInput { hunters_m: Some(3), ..sample_input() };
        assert!(matches!(end_to_end_solve(&input), Err(MechanismError::Precondition(_))));
    }

    #[test]
    fn parameter_file_round_trip() {
        let json = r#"{"a":1,"T":1000,"N":1000,"kappa":0.1,"p_o":0.2,"phi":0.6,
            "expected_hunters":100,"gamma":1,"mean_reward":5,"hunters_M":2,
            "hunters":[{"capability":8,"variable_cost":0.5,"fixed_cost":0.1},
                       {"capability":6,"variable_cost":0.8,"fixed_cost":0.2}]}"#;
        let input: MechanismInput = serde_json::from_str(json).unwrap();
        assert_eq!(input.hunter_count(), 2);
        assert_eq!(input.organizer, sample_input().organizer);
    }

    #[test]
    fn sweep_endpoints() {
        let rows = self_report_sweep(&sample_input().organizer, 5.0, 100).unwrap();
        assert_eq!(rows.len(), 101);
        assert_eq!(rows[0].pi_s, 0.0);
        assert_eq!(rows[100].pi_s, 1.0);
        assert_eq!(rows[100].sigma, 0.0);
    }
}
