use serde::Serialize;

use super::params::check_type_order;
use super::{domain, HunterType, MechanismError};

pub const MAX_ORACLE_TYPES: usize = 3;

const FEAS_TOL: f64 = 1e-9;

/// Logistic detection probability `1 / (1 + exp(-(theta - gamma * alpha)))`.
pub fn detection_probability(capability: f64, gamma: f64, alpha: f64) -> f64 {
    let z = capability - gamma * alpha;
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn check_alphas(types: &[HunterType], alphas: &[f64]) -> Result<(), MechanismError> {
    if types.len() != alphas.len() {
        return Err(domain("one task complexity per hunter type is required"));
    }
    for (i, &a) in alphas.iter().enumerate() {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(MechanismError::OrderingViolation {
                index: i,
                what: format!("task complexity {a} must be finite and non-negative"),
            });
        }
    }
    for (i, w) in alphas.windows(2).enumerate() {
        if w[0] < w[1] {
            return Err(MechanismError::OrderingViolation {
                index: i + 1,
                what: "task complexities must be non-increasing".into(),
            });
        }
    }
    Ok(())
}

/// Least-cost rewards that keep the menu incentive compatible:
/// the least capable type is paid its cost, and each more capable type is
/// paid its own cost plus the cost differences of every type below it.
pub fn optimal_rewards(types: &[HunterType], alphas: &[f64]) -> Result<Vec<f64>, MechanismError> {
    check_type_order(types)?;
    check_alphas(types, alphas)?;
    let j = types.len();
    Ok((0..j)
        .map(|i| {
            let rent: f64 = (i + 1..j)
                .map(|m| types[m].cost(alphas[m]) - types[m - 1].cost(alphas[m]))
                .sum();
            types[i].cost(alphas[i]) + rent
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeasibilityViolation {
    /// The least capable type earns negative utility.
    LowestTypeUtility { utility: f64 },
    /// Rewards or complexities increase between neighbours, or the lowest reward is negative.
    Monotonicity { index: usize },
    /// The adjacent-type reward gap is outside its cost sandwich.
    AdjacentGap { index: usize },
    IncentiveCompatibility { hunter: usize, mimics: usize },
    IndividualRationality { hunter: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityVerdict {
    pub lowest_type_utility_ok: bool,
    pub monotonicity_ok: bool,
    pub adjacent_gap_ok: bool,
    pub pairwise_ic_ok: bool,
    pub individual_rationality_ok: bool,
    pub first_violation: Option<FeasibilityViolation>,
}

impl FeasibilityVerdict {
    pub fn feasible(&self) -> bool {
        self.first_violation.is_none()
    }
}

fn tol(x: f64) -> f64 {
    FEAS_TOL * (1.0 + x.abs())
}

/// Checks a `(complexity, reward)` menu against the adjacent-type conditions
/// and the full pairwise IC/IR constraints.
pub fn check_feasibility(
    types: &[HunterType],
    menu: &[(f64, f64)],
) -> Result<FeasibilityVerdict, MechanismError> {
    check_type_order(types)?;
    if menu.len() != types.len() {
        return Err(domain("one contract per hunter type is required"));
    }
    let j = types.len();
    let alpha = |i: usize| menu[i].0;
    let reward = |i: usize| menu[i].1;
    let util = |h: usize, k: usize| reward(k) - types[h].cost(alpha(k));
    let mut violations = Vec::new();

    let lowest = util(j - 1, j - 1);
    let lowest_ok = lowest >= -tol(lowest);
    if !lowest_ok {
        violations.push(FeasibilityViolation::LowestTypeUtility { utility: lowest });
    }

    let mut mono_ok = reward(j - 1) >= -tol(reward(j - 1));
    if !mono_ok {
        violations.push(FeasibilityViolation::Monotonicity { index: j - 1 });
    }
    for i in 0..j - 1 {
        if reward(i) < reward(i + 1) - tol(reward(i)) || alpha(i) < alpha(i + 1) - tol(alpha(i)) {
            mono_ok = false;
            violations.push(FeasibilityViolation::Monotonicity { index: i });
        }
    }

    // C_i(a_i) - C_i(a_{i+1}) <= r_i - r_{i+1} <= C_{i+1}(a_i) - C_{i+1}(a_{i+1})
    let mut gap_ok = true;
    for i in 0..j - 1 {
        let gap = reward(i) - reward(i + 1);
        let lo = types[i].cost(alpha(i)) - types[i].cost(alpha(i + 1));
        let hi = types[i + 1].cost(alpha(i)) - types[i + 1].cost(alpha(i + 1));
        if gap < lo - tol(lo) || gap > hi + tol(hi) {
            gap_ok = false;
            violations.push(FeasibilityViolation::AdjacentGap { index: i });
        }
    }

    let mut ic_ok = true;
    let mut ir_ok = true;
    for h in 0..j {
        let own = util(h, h);
        if own < -tol(own) {
            ir_ok = false;
            violations.push(FeasibilityViolation::IndividualRationality { hunter: h });
        }
        for k in 0..j {
            if k != h && util(h, k) > own + tol(own) {
                ic_ok = false;
                violations.push(FeasibilityViolation::IncentiveCompatibility { hunter: h, mimics: k });
            }
        }
    }

    Ok(FeasibilityVerdict {
        lowest_type_utility_ok: lowest_ok,
        monotonicity_ok: mono_ok,
        adjacent_gap_ok: gap_ok,
        pairwise_ic_ok: ic_ok,
        individual_rationality_ok: ir_ok,
        first_violation: violations.into_iter().next(),
    })
}

/// Utility each type earns from its own contract.
pub fn hunter_utilities(types: &[HunterType], menu: &[(f64, f64)]) -> Vec<f64> {
    types
        .iter()
        .zip(menu)
        .map(|(t, &(a, r))| r - t.cost(a))
        .collect()
}

/// Reward ratio that pays `reward` on average once detection succeeds with
/// probability `sigmoid(theta - gamma * alpha)`:
/// `reward * (1 + exp(-(theta - gamma * alpha))) / detected_rewards`.
pub fn optimal_reward_ratio(
    reward: f64,
    capability: f64,
    gamma: f64,
    alpha: f64,
    detected_rewards: f64,
) -> Result<f64, MechanismError> {
    if !detected_rewards.is_finite() || detected_rewards <= 0.0 {
        return Err(domain("detected rewards must be positive"));
    }
    let ratio = reward / (detection_probability(capability, gamma, alpha) * detected_rewards);
    if !ratio.is_finite() {
        return Err(domain("reward ratio is not finite"));
    }
    Ok(ratio)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractOracleOutcome {
    pub total_reward: f64,
    /// All reward vectors attaining the minimum total.
    pub minimizers: Vec<Vec<f64>>,
    pub step: f64,
}

/// Exhaustive search over a reward grid for the cheapest IC/IR menu with the
/// given complexities. Branch-and-bound pruning only discards branches that
/// cannot beat the best total found so far, so the result equals plain
/// enumeration of `[0, upper]^J`.
pub fn brute_force_contract_oracle(
    types: &[HunterType],
    alphas: &[f64],
    step: f64,
) -> Result<ContractOracleOutcome, MechanismError> {
    let j = types.len();
    if j > MAX_ORACLE_TYPES {
        return Err(MechanismError::SizeLimit {
            n: j,
            max: MAX_ORACLE_TYPES,
        });
    }
    check_type_order(types)?;
    check_alphas(types, alphas)?;
    if !(step > 0.0 && step <= 0.01) {
        return Err(domain("grid step must lie in (0, 0.01]"));
    }
    // any menu cheaper than paying every type the largest cost of every contract
    let upper: f64 = 2.0
        * types
            .iter()
            .map(|t| alphas.iter().map(|&a| t.cost(a)).sum::<f64>())
            .sum::<f64>();
    let max_k = (upper / step).ceil() as i64;

    let mut search = Search {
        types,
        alphas,
        step,
        max_k,
        chosen: vec![None; j],
        best: f64::INFINITY,
        minimizers: Vec::new(),
    };
    search.descend(j);
    if search.minimizers.is_empty() {
        return Err(domain("no feasible menu on the reward grid"));
    }
    Ok(ContractOracleOutcome {
        total_reward: search.best,
        minimizers: search.minimizers,
        step,
    })
}

struct Search<'a> {
    types: &'a [HunterType],
    alphas: &'a [f64],
    step: f64,
    max_k: i64,
    chosen: Vec<Option<f64>>,
    best: f64,
    minimizers: Vec<Vec<f64>>,
}

impl Search<'_> {
    fn cost(&self, hunter: usize, contract: usize) -> f64 {
        self.types[hunter].cost(self.alphas[contract])
    }

    /// Lower bound on hunter `h`'s reward from IR and IC against already chosen contracts.
    fn lower_bound(&self, h: usize) -> f64 {
        let mut lb = self.cost(h, h).max(0.0);
        for (k, r) in self.chosen.iter().enumerate() {
            if let Some(r) = r {
                lb = lb.max(r + self.cost(h, h) - self.cost(h, k));
            }
        }
        lb
    }

    fn consistent(&self, h: usize, r: f64) -> bool {
        let own = r - self.cost(h, h);
        if own < -FEAS_TOL {
            return false;
        }
        self.chosen.iter().enumerate().all(|(k, rk)| match rk {
            None => true,
            Some(rk) => {
                let k_own = rk - self.cost(k, k);
                own + FEAS_TOL >= rk - self.cost(h, k) && k_own + FEAS_TOL >= r - self.cost(k, h)
            }
        })
    }

    fn partial(&self) -> f64 {
        self.chosen.iter().flatten().sum()
    }

    /// Assigns rewards for hunters `remaining-1` down to 0, least capable first.
    fn descend(&mut self, remaining: usize) {
        if remaining == 0 {
            let total = self.partial();
            if total < self.best - FEAS_TOL {
                self.best = total;
                self.minimizers.clear();
            }
            if total <= self.best + FEAS_TOL {
                self.minimizers.push(self.chosen.iter().map(|r| r.unwrap()).collect());
            }
            return;
        }
        let h = remaining - 1;
        let start = ((self.lower_bound(h) - FEAS_TOL) / self.step).ceil().max(0.0) as i64;
        for k in start..=self.max_k {
            let r = k as f64 * self.step;
            self.chosen[h] = Some(r);
            let bound = self.partial() + (0..h).map(|i| self.lower_bound(i)).sum::<f64>();
            if bound > self.best + FEAS_TOL {
                break;
            }
            if self.consistent(h, r) {
                let before = self.minimizers.len();
                let best_before = self.best;
                self.descend(h);
                // the innermost level is monotone in r: the first hit is the branch minimum
                if h == 0 && (self.minimizers.len() != before || self.best != best_before) {
                    break;
                }
            }
        }
        self.chosen[h] = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_types() -> Vec<HunterType> {
        vec![
            HunterType { capability: 2.0, variable_cost: 1.0, fixed_cost: 0.0 },
            HunterType { capability: 1.0, variable_cost: 2.0, fixed_cost: 0.0 },
        ]
    }

    #[test]
    fn telescoped_rewards_two_types() {
        let r = optimal_rewards(&two_types(), &[2.0, 1.0]).unwrap();
        assert_eq!(r, vec![3.0, 2.0]);
        let menu = [(2.0, 3.0), (1.0, 2.0)];
        let v = check_feasibility(&two_types(), &menu).unwrap();
        assert!(v.feasible(), "{v:?}");
        assert_eq!(hunter_utilities(&two_types(), &menu), vec![1.0, 0.0]);
    }

    #[test]
    fn single_type_paid_cost() {
        let t = [HunterType { capability: 1.0, variable_cost: 1.5, fixed_cost: 0.25 }];
        assert_eq!(optimal_rewards(&t, &[2.0]).unwrap(), vec![3.25]);
    }

    #[test]
    fn reward_ordering_errors() {
        let err = optimal_rewards(&two_types(), &[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, MechanismError::OrderingViolation { index: 1, .. }));
        let err = optimal_rewards(&two_types(), &[1.0, -0.5]).unwrap_err();
        assert!(matches!(err, MechanismError::OrderingViolation { .. }));
    }

    #[test]
    fn underpaying_breaks_feasibility() {
        let v = check_feasibility(&two_types(), &[(2.0, 2.5), (1.0, 2.0)]).unwrap();
        assert!(!v.feasible());
        assert!(!v.pairwise_ic_ok);
        assert!(!v.adjacent_gap_ok);
        let v = check_feasibility(&two_types(), &[(2.0, 3.0), (1.0, 1.0)]).unwrap();
        assert!(!v.individual_rationality_ok);
    }

    #[test]
    fn reward_ratio_round_trip() {
        // theta = gamma * alpha: detection probability one half
        let pi = optimal_reward_ratio(10.0, 2.0, 1.0, 2.0, 50.0).unwrap();
        assert!((pi - 0.4).abs() < 1e-12);
        assert!(optimal_reward_ratio(10.0, 2.0, 1.0, 2.0, 0.0).is_err());
        assert!(optimal_reward_ratio(10.0, 2.0, 1.0, 2.0, -1.0).is_err());
    }

    #[test]
    fn oracle_matches_two_types() {
        let out = brute_force_contract_oracle(&two_types(), &[2.0, 1.0], 0.01).unwrap();
        assert!((out.total_reward - 5.0).abs() < 1e-9);
        assert_eq!(out.minimizers.len(), 1);
        assert!((out.minimizers[0][0] - 3.0).abs() < 1e-9);
        assert!((out.minimizers[0][1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn oracle_limits() {
        let t: Vec<_> = (0..4)
            .map(|i| HunterType { capability: 4.0 - i as f64, variable_cost: 1.0 + i as f64, fixed_cost: 0.0 })
            .collect();
        let err = brute_force_contract_oracle(&t, &[4.0, 3.0, 2.0, 1.0], 0.01).unwrap_err();
        assert_eq!(err, MechanismError::SizeLimit { n: 4, max: 3 });
        assert!(brute_force_contract_oracle(&two_types(), &[2.0, 1.0], 0.05).is_err());
    }

    fn grid_instance() -> impl Strategy<Value = (Vec<HunterType>, Vec<f64>)> {
        (1usize..=3).prop_flat_map(|j| {
            (
                proptest::collection::vec(1u32..=20, j),
                proptest::collection::vec(0u32..=20, j),
                proptest::collection::vec(0u32..=10, j),
            )
                .prop_map(move |(dc, alpha_steps, d)| {
                    // ascending costs, descending complexities, all on a 0.1 / 0.01 lattice
                    let mut c = 0u32;
                    let mut fixed = 0u32;
                    let mut a = 40u32;
                    let mut types = Vec::new();
                    let mut alphas = Vec::new();
                    for i in 0..j {
                        c += dc[i];
                        fixed += d[i];
                        a = a.saturating_sub(alpha_steps[i]);
                        types.push(HunterType {
                            capability: (j - i) as f64,
                            variable_cost: c as f64 / 10.0,
                            fixed_cost: fixed as f64 / 100.0,
                        });
                        alphas.push(a as f64 / 10.0);
                    }
                    (types, alphas)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn telescoped_rewards_match_oracle((types, alphas) in grid_instance()) {
            let r = optimal_rewards(&types, &alphas).unwrap();
            let menu: Vec<_> = alphas.iter().copied().zip(r.iter().copied()).collect();
            prop_assert!(check_feasibility(&types, &menu).unwrap().feasible());
            let oracle = brute_force_contract_oracle(&types, &alphas, 0.01).unwrap();
            prop_assert!((oracle.total_reward - r.iter().sum::<f64>()).abs() <= 0.01);
            let close = oracle.minimizers.iter().any(|m| {
                m.iter().zip(&r).all(|(a, b)| (a - b).abs() <= 0.01)
            });
            prop_assert!(close);
            let u = hunter_utilities(&types, &menu);
            prop_assert!(u.last().unwrap().abs() <= 1e-9);
            prop_assert!(u.iter().all(|&x| x >= -1e-9));
        }
    }
}
