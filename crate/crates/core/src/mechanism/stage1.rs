use serde::Serialize;

use super::{domain, MechanismError, OrganizerParams};

/// `(1 - p_o) * E[N_h] * (1 - sigma)`.
pub fn expected_undetected_stage1(p: &OrganizerParams, sigma: f64) -> Result<f64, MechanismError> {
    p.validate()?;
    if !(0.0..=1.0).contains(&sigma) {
        return Err(domain(format!("sigma must lie in [0,1], got {sigma}")));
    }
    Ok((1.0 - p.baseline_detection) * p.expected_hunters * (1.0 - sigma))
}

/// Organizer utility for a self-report ratio and reporting rate, with
/// `E[N_sr] = sigma * E[N_h]`.
pub fn organizer_utility(
    p: &OrganizerParams,
    pi_s: f64,
    sigma: f64,
    mean_reward: f64,
) -> Result<f64, MechanismError> {
    if !(0.0..=1.0).contains(&pi_s) {
        return Err(domain(format!("pi_s must lie in [0,1], got {pi_s}")));
    }
    let undetected = expected_undetected_stage1(p, sigma)?;
    let reporters = sigma * p.expected_hunters;
    Ok(p.value_per_reduction * (1.0 - undetected / p.n()) * p.total_tokens
        - pi_s * reporters * mean_reward
        - p.detection_cost * (p.n() - reporters))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfReportRatio {
    /// Clamped into `[0, 1]`.
    pub value: f64,
    pub unclamped: f64,
    pub clamped: bool,
}

/// `pi_s* = 1/2 * (1 - p_o - (a (1 - p_o) T - kappa N) / (R_sr N))`.
pub fn optimal_self_report_ratio(
    p: &OrganizerParams,
    mean_reward: f64,
) -> Result<SelfReportRatio, MechanismError> {
    if !mean_reward.is_finite() || mean_reward <= 0.0 {
        return Err(domain("mean reward must be positive"));
    }
    p.validate()?;
    let po = p.baseline_detection;
    let n = p.n();
    let unclamped = 0.5
        * (1.0
            - po
            - (p.value_per_reduction * (1.0 - po) * p.total_tokens - p.detection_cost * n)
                / (mean_reward * n));
    let value = unclamped.clamp(0.0, 1.0);
    Ok(SelfReportRatio {
        value,
        unclamped,
        clamped: value != unclamped,
    })
}

/// `p_o + phi * sigma`, computed independently of the attacker module.
pub(crate) fn perceived_for_check(p: &OrganizerParams, sigma: f64) -> f64 {
    p.baseline_detection + p.externality * sigma
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundPosition {
    LowerBound,
    Interior,
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaEquilibrium {
    pub value: f64,
    pub unclamped: f64,
    pub position: BoundPosition,
}

/// Reporting rate at which attackers are indifferent: `p_o + phi * sigma = 1 - pi_s`.
pub fn equilibrium_sigma(p: &OrganizerParams, pi_s: f64) -> Result<SigmaEquilibrium, MechanismError> {
    if !(0.0..=1.0).contains(&pi_s) {
        return Err(domain(format!("pi_s must lie in [0,1], got {pi_s}")));
    }
    p.validate()?;
    let unclamped = (1.0 - pi_s - p.baseline_detection) / p.externality;
    let (value, position) = if unclamped <= 0.0 {
        (0.0, BoundPosition::LowerBound)
    } else if unclamped >= 1.0 {
        (1.0, BoundPosition::UpperBound)
    } else {
        (unclamped, BoundPosition::Interior)
    };
    Ok(SigmaEquilibrium {
        value,
        unclamped,
        position,
    })
}
