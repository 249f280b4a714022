use serde::Serialize;

use super::contracts::optimal_rewards;
use super::params::check_type_order;
use super::{domain, HunterType, MechanismError};

/// Smallest multiplier tried by the root search.
pub const LAMBDA_FLOOR: f64 = 1e-12;

const SCAN_POINTS: usize = 4096;
const BISECT_MAX_ITERS: usize = 200;
const BISECT_TOL: f64 = 1e-12;
const ORDER_TOL: f64 = 1e-12;

/// Smaller root of `p (1 - p) = a` for `a` in `[0, 1/4]`, in the
/// cancellation-free form `2a / (1 + sqrt(1 - 4a))`.
pub fn detection_prob_for_a(a: f64) -> f64 {
    let disc = (1.0 - 4.0 * a).max(0.0);
    2.0 * a / (1.0 + disc.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeComplexity {
    /// Stationarity coefficient `lambda * M * (J - j + 1) * c_j / gamma`.
    pub a: f64,
    pub detection_prob: f64,
    pub alpha: f64,
    pub reward: f64,
    /// `|p (1 - p) - a|`.
    pub quadratic_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexitySolution {
    pub lambda: f64,
    pub lambda_max: f64,
    pub types: Vec<TypeComplexity>,
    /// Fraction of stage-one undetected attackers that stay undetected.
    pub undetected_share: f64,
    /// Rent-weighted complexity `sum (J - j + 1) c_j alpha_j`.
    pub weighted_complexity: f64,
    /// `lambda * V - U`.
    pub residual: f64,
    /// `U / V`.
    pub objective: f64,
    pub expected_undetected_stage3: f64,
}

struct Eval {
    a: Vec<f64>,
    p: Vec<f64>,
    alpha: Vec<f64>,
    u: f64,
    v: f64,
}

fn weight(j: usize, i: usize) -> f64 {
    (j - i) as f64
}

fn evaluate(types: &[HunterType], m: f64, gamma: f64, lambda: f64) -> Eval {
    let j = types.len();
    let mut out = Eval {
        a: Vec::with_capacity(j),
        p: Vec::with_capacity(j),
        alpha: Vec::with_capacity(j),
        u: 0.0,
        v: 0.0,
    };
    for (i, t) in types.iter().enumerate() {
        let a = lambda * m * weight(j, i) * t.variable_cost / gamma;
        let p = detection_prob_for_a(a);
        let alpha = (t.capability + ((1.0 - p) / p).ln()) / gamma;
        out.v += weight(j, i) * t.variable_cost * alpha;
        out.a.push(a);
        out.p.push(p);
        out.alpha.push(alpha);
    }
    out.u = 1.0 - out.p.iter().sum::<f64>() / m;
    out
}

fn ordered(alpha: &[f64]) -> bool {
    alpha.last().is_some_and(|&a| a >= -ORDER_TOL)
        && alpha.windows(2).all(|w| w[0] >= w[1] - ORDER_TOL)
}

/// Task complexities minimizing the undetected share per unit of rent.
///
/// The stationarity conditions reduce the problem to one multiplier: each
/// type's detection probability solves `p (1 - p) = a_j(lambda)`, and the
/// multiplier is a root of `lambda * V(lambda) - U(lambda)`. Roots are
/// bracketed on a log grid over `(0, lambda_max]` and refined by bisection;
/// the first root with non-increasing, non-negative complexities wins.
pub fn solve_task_complexities(
    types: &[HunterType],
    hunters_m: usize,
    gamma: f64,
    expected_undetected_stage1: f64,
) -> Result<ComplexitySolution, MechanismError> {
    check_type_order(types)?;
    let j = types.len();
    if hunters_m != j {
        return Err(MechanismError::Precondition(format!(
            "one hunter per type is assumed: M = {hunters_m}, J = {j}"
        )));
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(domain("gamma must be positive"));
    }
    if !expected_undetected_stage1.is_finite() || expected_undetected_stage1 < 0.0 {
        return Err(domain("expected undetected attackers must be non-negative"));
    }
    let m = hunters_m as f64;
    let max_weighted = (0..j)
        .map(|i| weight(j, i) * types[i].variable_cost)
        .fold(0.0, f64::max);
    let lambda_max = gamma / (4.0 * m * max_weighted);
    let g = |lambda: f64| {
        let e = evaluate(types, m, gamma, lambda);
        lambda * e.v - e.u
    };

    let (lo_ln, hi_ln) = (LAMBDA_FLOOR.ln(), lambda_max.ln());
    let grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|k| {
            if k == SCAN_POINTS {
                lambda_max
            } else {
                (lo_ln + (hi_ln - lo_ln) * k as f64 / SCAN_POINTS as f64).exp()
            }
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&l| g(l)).collect();

    let mut found_root = false;
    for k in 0..SCAN_POINTS {
        let (gl, gh) = (values[k], values[k + 1]);
        if !(gl.is_finite() && gh.is_finite()) || gl.signum() == gh.signum() && gl != 0.0 {
            continue;
        }
        found_root = true;
        let lambda = if gl == 0.0 {
            grid[k]
        } else {
            bisect(&g, grid[k], grid[k + 1], gl)
        };
        let e = evaluate(types, m, gamma, lambda);
        if ordered(&e.alpha) {
            return Ok(assemble(types, e, lambda, lambda_max, expected_undetected_stage1, m));
        }
    }
    if found_root {
        Err(MechanismError::InfeasibleOrdering)
    } else {
        Err(MechanismError::NoRoot { lambda_max })
    }
}

fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, g_lo: f64) -> f64 {
    let lo_sign = g_lo.signum();
    for _ in 0..BISECT_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECT_TOL * hi.max(1.0) || mid == lo || mid == hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if g(lo).abs() <= g(hi).abs() {
        lo
    } else {
        hi
    }
}

fn assemble(
    types: &[HunterType],
    e: Eval,
    lambda: f64,
    lambda_max: f64,
    e_nu1: f64,
    m: f64,
) -> ComplexitySolution {
    let alphas: Vec<f64> = e.alpha.iter().map(|&a| a.max(0.0)).collect();
    let rewards = optimal_rewards(types, &alphas).unwrap_or_else(|_| vec![f64::NAN; types.len()]);
    let per_type = (0..types.len())
        .map(|i| TypeComplexity {
            a: e.a[i],
            detection_prob: e.p[i],
            alpha: alphas[i],
            reward: rewards[i],
            quadratic_residual: (e.p[i] * (1.0 - e.p[i]) - e.a[i]).abs(),
        })
        .collect();
    ComplexitySolution {
        lambda,
        lambda_max,
        types: per_type,
        undetected_share: e.u,
        weighted_complexity: e.v,
        residual: lambda * e.v - e.u,
        objective: e.u / e.v,
        expected_undetected_stage3: e_nu1 * (1.0 - e.p.iter().sum::<f64>() / m),
    }
}

/// `E[N_u^(1)] * (1 - mean detection probability over the M hunters)`.
pub fn expected_undetected_stage3(
    expected_undetected_stage1: f64,
    detection_probs: &[f64],
    hunters_m: usize,
) -> Result<f64, MechanismError> {
    if hunters_m == 0 || detection_probs.len() != hunters_m {
        return Err(domain("one detection probability per hunter is required"));
    }
    if !expected_undetected_stage1.is_finite() || expected_undetected_stage1 < 0.0 {
        return Err(domain("expected undetected attackers must be non-negative"));
    }
    if detection_probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(domain("detection probabilities must lie in [0,1]"));
    }
    let mean = detection_probs.iter().sum::<f64>() / hunters_m as f64;
    Ok(expected_undetected_stage1 * (1.0 - mean))
}
