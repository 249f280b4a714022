use serde::Serialize;

use super::{domain, AttackerProfile, MechanismError, OrganizerParams};

pub const MAX_ENUMERATION_ATTACKERS: usize = 20;

const DEVIATION_TOL: f64 = 1e-9;

/// `p_o + phi * sigma`, the detection probability an attacker perceives.
pub fn perceived_detection(p: &OrganizerParams, sigma: f64) -> f64 {
    p.baseline_detection + p.externality * sigma
}

fn others_sigma(p: &OrganizerParams, others_reporting: usize) -> f64 {
    others_reporting as f64 / p.expected_hunters
}

/// Reporting is a best response iff the perceived detection probability
/// reaches `1 - pi_s`. Ties report.
///
/// `sigma_others` is the reporting mass of the other attackers divided by
/// `E[N_h]`; an attacker's own choice does not move its own detection risk.
pub fn attacker_best_response(p: &OrganizerParams, pi_s: f64, sigma_others: f64) -> bool {
    perceived_detection(p, sigma_others) >= 1.0 - pi_s
}

/// Utility of one attacker given its own choice and how many others report.
pub fn attacker_utility(
    profile: &AttackerProfile,
    p: &OrganizerParams,
    pi_s: f64,
    reports: bool,
    others_reporting: usize,
) -> f64 {
    if reports {
        pi_s * profile.reward - profile.cost
    } else {
        let hit = perceived_detection(p, others_sigma(p, others_reporting)).min(1.0);
        (1.0 - hit) * profile.reward - profile.cost
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponseOutcome {
    pub profile: Vec<bool>,
    /// Reporting attackers divided by `E[N_h]`.
    pub sigma: f64,
    pub rounds: usize,
    pub converged: bool,
}

fn check_inputs(
    attackers: &[AttackerProfile],
    p: &OrganizerParams,
    pi_s: f64,
) -> Result<(), MechanismError> {
    p.validate()?;
    if !(0.0..=1.0).contains(&pi_s) {
        return Err(domain(format!("pi_s must lie in [0,1], got {pi_s}")));
    }
    if attackers
        .iter()
        .any(|a| !(a.reward >= 0.0 && a.reward.is_finite() && a.cost.is_finite()))
    {
        return Err(domain("attacker rewards must be non-negative and finite"));
    }
    Ok(())
}

/// Synchronous best-response iteration from `start`, capped at `10 * n` rounds.
pub fn best_response_dynamics(
    attackers: &[AttackerProfile],
    p: &OrganizerParams,
    pi_s: f64,
    start: &[bool],
) -> Result<BestResponseOutcome, MechanismError> {
    check_inputs(attackers, p, pi_s)?;
    if start.len() != attackers.len() {
        return Err(domain("start profile length differs from attacker count"));
    }
    let max_rounds = 10 * attackers.len().max(1);
    let mut x = start.to_vec();
    for round in 0..=max_rounds {
        let total = x.iter().filter(|&&b| b).count();
        let next: Vec<bool> = x
            .iter()
            .map(|&own| {
                let others = total - usize::from(own);
                attacker_best_response(p, pi_s, others_sigma(p, others))
            })
            .collect();
        if next == x {
            return Ok(BestResponseOutcome {
                sigma: total as f64 / p.expected_hunters,
                profile: x,
                rounds: round,
                converged: true,
            });
        }
        x = next;
    }
    Err(MechanismError::NonConvergence {
        rounds: max_rounds,
        last_profile: x,
    })
}

/// Every pure Nash equilibrium, found by checking all `2^n` profiles.
pub fn enumerate_pure_ne(
    attackers: &[AttackerProfile],
    p: &OrganizerParams,
    pi_s: f64,
) -> Result<Vec<Vec<bool>>, MechanismError> {
    let n = attackers.len();
    if n > MAX_ENUMERATION_ATTACKERS {
        return Err(MechanismError::SizeLimit {
            n,
            max: MAX_ENUMERATION_ATTACKERS,
        });
    }
    check_inputs(attackers, p, pi_s)?;
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let profile: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let total = mask.count_ones() as usize;
        let stable = attackers.iter().zip(&profile).all(|(a, &own)| {
            let others = total - usize::from(own);
            let current = attacker_utility(a, p, pi_s, own, others);
            let deviated = attacker_utility(a, p, pi_s, !own, others);
            deviated <= current + DEVIATION_TOL * (1.0 + current.abs())
        });
        if stable {
            out.push(profile);
        }
    }
    Ok(out)
}

/// `[U(1, x') - U(0, x')] - [U(1, x) - U(0, x)]` for one attacker, where
/// `x'` has at least as many other reporters as `x`. Supermodularity makes it
/// non-negative.
pub fn increasing_difference(
    profile: &AttackerProfile,
    p: &OrganizerParams,
    pi_s: f64,
    others_low: usize,
    others_high: usize,
) -> f64 {
    let gain = |others| {
        attacker_utility(profile, p, pi_s, true, others)
            - attacker_utility(profile, p, pi_s, false, others)
    };
    gain(others_high) - gain(others_low)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(e: f64, po: f64, phi: f64) -> OrganizerParams {
        OrganizerParams {
            value_per_reduction: 1.0,
            total_tokens: 1000.0,
            eligible_addresses: 1000,
            detection_cost: 0.1,
            baseline_detection: po,
            externality: phi,
            expected_hunters: e,
        }
    }

    fn same(n: usize) -> Vec<AttackerProfile> {
        vec![AttackerProfile { reward: 10.0, cost: 1.0 }; n]
    }

    #[test]
    fn ties_report() {
        let p = params(10.0, 0.5, 0.5);
        assert!(attacker_best_response(&p, 0.5, 0.0));
        assert!(!attacker_best_response(&p, 0.49, 0.0));
    }

    #[test]
    fn dynamics_reach_fixed_points() {
        // every attacker reports once four others do
        let p = params(10.0, 0.1, 0.5);
        let pi_s = 0.7;
        let attackers = same(6);
        let all_in = best_response_dynamics(&attackers, &p, pi_s, &[true; 6]).unwrap();
        assert_eq!(all_in.profile, vec![true; 6]);
        assert!((all_in.sigma - 0.6).abs() < 1e-12);
        let all_out = best_response_dynamics(&attackers, &p, pi_s, &[false; 6]).unwrap();
        assert_eq!(all_out.profile, vec![false; 6]);

        let ne = enumerate_pure_ne(&attackers, &p, pi_s).unwrap();
        assert!(ne.contains(&all_in.profile));
        assert!(ne.contains(&all_out.profile));
        assert_eq!(ne.len(), 2);
    }

    #[test]
    fn mixed_start_can_cycle() {
        let p = params(10.0, 0.1, 0.5);
        let attackers = same(2);
        // threshold of one other reporter: (1, 0) flips to (0, 1) and back
        let err = best_response_dynamics(&attackers, &p, 0.85, &[true, false]).unwrap_err();
        assert!(matches!(err, MechanismError::NonConvergence { .. }));
    }

    #[test]
    fn enumeration_size_limit() {
        let p = params(30.0, 0.1, 0.5);
        let err = enumerate_pure_ne(&same(21), &p, 0.5).unwrap_err();
        assert_eq!(err, MechanismError::SizeLimit { n: 21, max: 20 });
    }

    proptest! {
        #[test]
        fn differences_increase(
            po in 0.0f64..0.9, phi in 0.01f64..1.0, pi_s in 0.0f64..=1.0,
            reward in 0.0f64..100.0, cost in 0.0f64..10.0,
            lo in 0usize..10, extra in 0usize..10,
        ) {
            let p = params(20.0, po, phi);
            let a = AttackerProfile { reward, cost };
            let d = increasing_difference(&a, &p, pi_s, lo, lo + extra);
            prop_assert!(d >= -1e-9);
            let sig = |k: usize| (po + phi * k as f64 / 20.0).min(1.0);
            let expected = (sig(lo + extra) - sig(lo)) * reward;
            prop_assert!((d - expected).abs() <= 1e-9 * (1.0 + reward));
        }

        #[test]
        fn converged_profiles_are_equilibria(
            po in 0.0f64..0.9, phi in 0.01f64..1.0, pi_s in 0.0f64..=1.0,
            n in 1usize..9, start_all in any::<bool>(),
        ) {
            let p = params(10.0, po, phi);
            let attackers: Vec<_> = (0..n)
                .map(|i| AttackerProfile { reward: 1.0 + i as f64, cost: 0.5 })
                .collect();
            let start = vec![start_all; n];
            let out = best_response_dynamics(&attackers, &p, pi_s, &start).unwrap();
            let ne = enumerate_pure_ne(&attackers, &p, pi_s).unwrap();
            prop_assert!(ne.contains(&out.profile));
        }
    }
}
