//! CSV tables behind the standard figures. Rendering is left to other tools.

use airdrop_forge_core::detectors::{sequential_timeline, DetectionReport, TransferChain};
use airdrop_forge_core::profit::{rank_groups, ProfitReport};

use crate::CliError;

/// Reports a plot table can be built from.
pub enum PlotSource<'a> {
    Detection(&'a [DetectionReport]),
    Profit(&'a [ProfitReport]),
}

pub const PLOT_KINDS: [&str; 3] = ["fig1", "fig3", "fig8"];

/// Builds the CSV for one figure kind:
///
/// * `fig1`: `group_id,pct_funded,pct_received` from funder/receiver detection.
/// * `fig3`: `bucket_start,chain_count,avg_value` over all groups' sequential chains.
/// * `fig8`: `rank,group_id,reward_usd,fee_usd,net_profit_usd`, highest net profit first.
pub fn emit_plot_data(kind: &str, source: &PlotSource<'_>) -> Result<String, CliError> {
    match (kind, source) {
        ("fig1", PlotSource::Detection(reports)) => Ok(fig1(reports)),
        ("fig3", PlotSource::Detection(reports)) => Ok(fig3(reports)),
        ("fig8", PlotSource::Profit(reports)) => Ok(fig8(reports)),
        ("fig1" | "fig3", _) => Err(CliError::PlotInput {
            kind: kind.into(),
            needs: "detection",
        }),
        ("fig8", _) => Err(CliError::PlotInput {
            kind: kind.into(),
            needs: "profit",
        }),
        _ => Err(CliError::UnknownKind(kind.into())),
    }
}

fn pct(p: &Option<airdrop_forge_core::detectors::Participant>, n: usize) -> f64 {
    match p {
        Some(p) if n > 0 => p.count as f64 * 100.0 / n as f64,
        _ => 0.0,
    }
}

fn fig1(reports: &[DetectionReport]) -> String {
    let mut out = String::from("group_id,pct_funded,pct_received\n");
    for r in reports {
        let n = r.group_size;
        out.push_str(&format!(
            "{},{},{}\n",
            r.group_id,
            pct(&r.funder, n),
            pct(&r.receiver, n)
        ));
    }
    out
}

fn fig3(reports: &[DetectionReport]) -> String {
    let chains: Vec<TransferChain> = reports.iter().flat_map(|r| r.chains.iter().cloned()).collect();
    let bucket = reports.first().map_or(
        airdrop_forge_core::detectors::DEFAULT_TIMELINE_BUCKET,
        |r| r.timeline_bucket,
    );
    let mut out = String::from("bucket_start,chain_count,avg_value\n");
    for row in sequential_timeline(&chains, bucket) {
        out.push_str(&format!("{},{},{}\n", row.bucket_start, row.chain_count, row.avg_value));
    }
    out
}

fn fig8(reports: &[ProfitReport]) -> String {
    let mut out = String::from("rank,group_id,reward_usd,fee_usd,net_profit_usd\n");
    for (i, r) in rank_groups(reports).into_iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            r.group_id,
            r.totals.total_reward_usd.normalize(),
            r.totals.total_fee_usd.normalize(),
            r.totals.total_net_profit_usd.normalize()
        ));
    }
    out
}
