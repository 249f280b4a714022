use serde::{Deserialize, Serialize};

use super::{domain, MechanismError};

/// Organizer-side constants of the game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrganizerParams {
    /// Value per reduction in undetected attacks.
    #[serde(rename = "a")]
    pub value_per_reduction: f64,
    /// Tokens available for distribution.
    #[serde(rename = "T")]
    pub total_tokens: f64,
    /// Eligible addresses, honest and attacking.
    #[serde(rename = "N")]
    pub eligible_addresses: u64,
    /// Detection cost per account that did not self-report.
    #[serde(rename = "kappa")]
    pub detection_cost: f64,
    /// Baseline detection probability.
    #[serde(rename = "p_o")]
    pub baseline_detection: f64,
    /// Externality of others' self-reporting on perceived detection.
    #[serde(rename = "phi")]
    pub externality: f64,
    /// `E[N_h]`.
    pub expected_hunters: f64,
}

impl OrganizerParams {
    pub fn validate(&self) -> Result<(), MechanismError> {
        let finite = [
            self.value_per_reduction,
            self.total_tokens,
            self.detection_cost,
            self.baseline_detection,
            self.externality,
            self.expected_hunters,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(domain("organizer parameters must be finite"));
        }
        if self.value_per_reduction <= 0.0 {
            return Err(domain("value per reduction must be positive"));
        }
        if self.total_tokens <= 0.0 {
            return Err(domain("total tokens must be positive"));
        }
        if self.eligible_addresses == 0 {
            return Err(domain("eligible addresses must be positive"));
        }
        if self.detection_cost <= 0.0 {
            return Err(domain("detection cost must be positive"));
        }
        if !(0.0..1.0).contains(&self.baseline_detection) {
            return Err(domain("baseline detection must lie in [0,1)"));
        }
        if self.externality <= 0.0 {
            return Err(domain("externality must be positive"));
        }
        if self.expected_hunters <= 0.0 || self.expected_hunters > self.eligible_addresses as f64 {
            return Err(domain("expected hunters must lie in (0, eligible addresses]"));
        }
        Ok(())
    }

    pub(crate) fn n(&self) -> f64 {
        self.eligible_addresses as f64
    }
}

/// Public reward and cost of one attacker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackerProfile {
    pub reward: f64,
    pub cost: f64,
}

/// Private type of a bounty hunter: capability and linear cost `c * alpha + d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HunterType {
    pub capability: f64,
    pub variable_cost: f64,
    pub fixed_cost: f64,
}

impl HunterType {
    pub fn cost(&self, alpha: f64) -> f64 {
        self.variable_cost * alpha + self.fixed_cost
    }
}

/// Types must be listed from most to least capable, with costs non-decreasing.
pub(crate) fn check_type_order(types: &[HunterType]) -> Result<(), MechanismError> {
    if types.is_empty() {
        return Err(MechanismError::Precondition("at least one hunter type".into()));
    }
    for (i, t) in types.iter().enumerate() {
        if !(t.capability.is_finite() && t.variable_cost.is_finite() && t.fixed_cost.is_finite()) {
            return Err(domain(format!("hunter type {i} has non-finite fields")));
        }
        if t.variable_cost <= 0.0 || t.fixed_cost < 0.0 {
            return Err(domain(format!(
                "hunter type {i}: need variable_cost > 0 and fixed_cost >= 0"
            )));
        }
    }
    for (i, w) in types.windows(2).enumerate() {
        if w[0].capability <= w[1].capability {
            return Err(MechanismError::OrderingViolation {
                index: i + 1,
                what: "capabilities must be strictly decreasing".into(),
            });
        }
        if w[0].variable_cost > w[1].variable_cost || w[0].fixed_cost > w[1].fixed_cost {
            return Err(MechanismError::OrderingViolation {
                index: i + 1,
                what: "more capable types must not have higher costs".into(),
            });
        }
    }
    Ok(())
}
