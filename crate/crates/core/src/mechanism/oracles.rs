//! Brute-force counterparts of the closed forms, written by direct
//! substitution so they share no code with the solvers they check.

use serde::Serialize;

use super::{domain, HunterType, MechanismError, OrganizerParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfReportGrid {
    pub argmax: f64,
    pub max_utility: f64,
    pub argmin: f64,
    pub min_utility: f64,
    /// The maximum sits strictly inside `(0, 1)`.
    pub interior: bool,
}

/// Organizer utility evaluated on `pi_s = 0, step, 2 step, ..., 1`, with the
/// reporting rate clamped into `[0, 1]`.
pub fn self_report_grid(
    p: &OrganizerParams,
    mean_reward: f64,
    step: f64,
) -> Result<SelfReportGrid, MechanismError> {
    if !(step > 0.0 && step < 1.0) {
        return Err(domain("grid step must lie in (0, 1)"));
    }
    let n = p.eligible_addresses as f64;
    let e = p.expected_hunters;
    let steps = (1.0 / step).round() as usize;
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut worst = (f64::INFINITY, 0usize);
    for k in 0..=steps {
        let pi = k as f64 / steps as f64;
        let s = ((1.0 - pi - p.baseline_detection) / p.externality).clamp(0.0, 1.0);
        let u = p.value_per_reduction * p.total_tokens
            - p.value_per_reduction * p.total_tokens * (1.0 - p.baseline_detection) * e * (1.0 - s) / n
            - pi * s * e * mean_reward
            - p.detection_cost * n
            + p.detection_cost * s * e;
        if u > best.0 {
            best = (u, k);
        }
        if u < worst.0 {
            worst = (u, k);
        }
    }
    Ok(SelfReportGrid {
        argmax: best.1 as f64 / steps as f64,
        max_utility: best.0,
        argmin: worst.1 as f64 / steps as f64,
        min_utility: worst.0,
        interior: best.1 > 0 && best.1 < steps,
    })
}

/// Sign changes of the multiplier residual on a uniform grid of `points`
/// over `(0, lambda_max]`, using the textbook quadratic root.
pub fn multiplier_sign_changes(
    types: &[HunterType],
    hunters_m: usize,
    gamma: f64,
    points: usize,
) -> Vec<(f64, f64)> {
    let j = types.len();
    let m = hunters_m as f64;
    let lambda_max = types
        .iter()
        .enumerate()
        .map(|(i, t)| gamma / (4.0 * m * (j - i) as f64 * t.variable_cost))
        .fold(f64::INFINITY, f64::min);
    let residual = |lambda: f64| {
        let mut sum_p = 0.0;
        let mut v = 0.0;
        for (i, t) in types.iter().enumerate() {
            let w = (j - i) as f64;
            let a = lambda * m * w * t.variable_cost / gamma;
            let p = (1.0 - (1.0 - 4.0 * a).max(0.0).sqrt()) / 2.0;
            sum_p += p;
            v += w * t.variable_cost * (t.capability - (p / (1.0 - p)).ln()) / gamma;
        }
        lambda * v - (1.0 - sum_p / m)
    };
    let mut out = Vec::new();
    let mut prev = (lambda_max / points as f64, residual(lambda_max / points as f64));
    for k in 2..=points {
        let l = lambda_max * k as f64 / points as f64;
        let r = residual(l);
        if r.is_finite() && prev.1.is_finite() && (r == 0.0 || r.signum() != prev.1.signum()) {
            out.push((prev.0, l));
        }
        prev = (l, r);
    }
    out
}
