//! Hunter-pattern detectors over a [`Ledger`] and an [`AttackerGroup`].
//!
//! All detectors are pure functions of their inputs.

mod funder_receiver;
mod sequential;
mod uniformity;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::ledger::{AttackerGroup, Ledger};

pub use funder_receiver::{detect_funder_receiver, FunderReceiverReport, Participant};
pub use sequential::{
    detect_sequential_transfers, hop_is_valid, sequential_coverage, sequential_timeline,
    Coverage, TimelineRow, TransferChain, DEFAULT_TIMELINE_BUCKET,
};
pub use uniformity::{compute_uniformity, fit_centers, uniform_fraction, UniformityScore};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DetectorError {
    #[error("invalid detector config: {0}")]
    InvalidConfig(String),
    #[error("group {0} has no in-group transactions")]
    EmptyActivity(String),
}

/// Thresholds shared by the detectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    /// Allowed relative value drop per hop, in (0, 1).
    pub value_tolerance: Decimal,
    /// Maximum gap between the two transactions of a hop, seconds.
    pub time_window: i64,
    /// Count uniformity threshold.
    pub count_threshold: u64,
    /// Volume uniformity threshold, token units.
    pub volume_threshold: Decimal,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            value_tolerance: Decimal::new(1, 2),
            time_window: 1800,
            count_threshold: 2,
            volume_threshold: Decimal::from(300),
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), DetectorError> {
        if self.value_tolerance <= Decimal::ZERO || self.value_tolerance >= Decimal::ONE {
            return Err(DetectorError::InvalidConfig(format!(
                "value_tolerance must lie in (0,1), got {}",
                self.value_tolerance
            )));
        }
        if self.time_window <= 0 {
            return Err(DetectorError::InvalidConfig(format!(
                "time_window must be positive, got {}",
                self.time_window
            )));
        }
        if self.volume_threshold < Decimal::ZERO {
            return Err(DetectorError::InvalidConfig(
                "volume_threshold must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Everything the detectors say about one group.
#[derive(Debug, Clone, Serialize)]
pub struct DetectionReport {
    pub group_id: String,
    pub group_size: usize,
    pub funder: Option<Participant>,
    pub receiver: Option<Participant>,
    pub chains: Vec<TransferChain>,
    pub coverage: Coverage,
    /// `None` when the group sent nothing to its own members.
    pub uniformity: Option<UniformityScore>,
    pub timeline_bucket: i64,
    pub timeline: Vec<TimelineRow>,
}

/// Runs every detector for `group`.
pub fn detect_group(
    ledger: &Ledger,
    group: &AttackerGroup,
    cfg: &DetectorConfig,
    timeline_bucket: i64,
) -> Result<DetectionReport, DetectorError> {
    cfg.validate()?;
    let fr = detect_funder_receiver(ledger, group);
    let chains = detect_sequential_transfers(ledger, group, cfg)?;
    let coverage = sequential_coverage(&chains, group);
    let uniformity = match compute_uniformity(ledger, group, cfg) {
        Ok(u) => Some(u),
        Err(DetectorError::EmptyActivity(_)) => None,
        Err(e) => return Err(e),
    };
    let timeline = sequential_timeline(&chains, timeline_bucket);
    Ok(DetectionReport {
        group_id: group.group_id.clone(),
        group_size: group.len(),
        funder: fr.funder,
        receiver: fr.receiver,
        chains,
        coverage,
        uniformity,
        timeline_bucket,
        timeline,
    })
}
