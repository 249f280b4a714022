//! Expected airdrop reward, fees and net profit per address and per group.
//!
//! Reward for an eligible address is `B * m_e * m_v * P`; cost is gas plus
//! the bridge fee (sent minus received, priced at the daily close). All money
//! is exact decimal.

use chrono::NaiveDate;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::ledger::{Address, AttackerGroup, Ledger, LedgerError, PriceTable, Transaction};

#[derive(Debug, thiserror::Error)]
pub enum ProfitError {
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("negative bridge fee: received {received} exceeds sent {sent}")]
    NegativeFee { sent: Decimal, received: Decimal },
    #[error("token mismatch: sent {sent}, received {received}")]
    TokenMismatch { sent: String, received: String },
    #[error("invalid reward parameters: {0}")]
    InvalidParams(String),
}

/// Lower edges of the volume-multiplier bands, USD.
const VOLUME_BANDS: [(i64, u8); 3] = [(3000, 3), (2000, 2), (1000, 1)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardParams {
    /// Base token amount per address.
    pub base_amount: Decimal,
    /// Token price in USD.
    pub token_price: Decimal,
    pub earliest_date: NaiveDate,
    pub latest_date: NaiveDate,
    pub early_max: Decimal,
    pub early_min: Decimal,
    pub eligibility_min_txs: usize,
    pub eligibility_min_volume_usd: Decimal,
}

impl Default for RewardParams {
    fn default() -> Self {
        RewardParams {
            base_amount: Decimal::new(3_304_883, 4),
            token_price: Decimal::new(1321, 4),
            earliest_date: NaiveDate::from_ymd_opt(2021, 6, 17).unwrap(),
            latest_date: NaiveDate::from_ymd_opt(2022, 4, 1).unwrap(),
            early_max: Decimal::TWO,
            early_min: Decimal::ONE,
            eligibility_min_txs: 2,
            eligibility_min_volume_usd: Decimal::from(1000),
        }
    }
}

impl RewardParams {
    pub fn validate(&self) -> Result<(), ProfitError> {
        let bad = |m: &str| Err(ProfitError::InvalidParams(m.to_string()));
        if self.base_amount <= Decimal::ZERO || self.token_price <= Decimal::ZERO {
            return bad("base_amount and token_price must be positive");
        }
        if self.earliest_date >= self.latest_date {
            return bad("earliest_date must precede latest_date");
        }
        if self.early_min <= Decimal::ZERO || self.early_max < self.early_min {
            return bad("need early_max >= early_min > 0");
        }
        Ok(())
    }
}

/// Linear decay from `early_max` on `earliest_date` to `early_min` on
/// `latest_date`, clamped outside that window.
pub fn early_bird_multiplier(first_date: NaiveDate, params: &RewardParams) -> Decimal {
    if first_date <= params.earliest_date {
        return params.early_max;
    }
    if first_date >= params.latest_date {
        return params.early_min;
    }
    let elapsed = Decimal::from((first_date - params.earliest_date).num_days());
    let span = Decimal::from((params.latest_date - params.earliest_date).num_days());
    params.early_max - (params.early_max - params.early_min) * elapsed / span
}

/// Step function over bridged USD volume: 0 below eligibility, then 1, 2, 3
/// from 1000, 2000 and 3000 (left-closed bands).
pub fn volume_multiplier(volume_usd: Decimal, params: &RewardParams) -> u8 {
    if volume_usd < params.eligibility_min_volume_usd {
        return 0;
    }
    VOLUME_BANDS
        .iter()
        .find(|(edge, _)| volume_usd >= Decimal::from(*edge))
        .map_or(0, |&(_, m)| m)
}

/// `B * m_e * m_v * P` in USD. Multipliers are taken as given.
pub fn compute_reward(early: Decimal, volume: u8, params: &RewardParams) -> Decimal {
    params.base_amount * early * Decimal::from(volume) * params.token_price
}

/// USD value of the sent/received differential of a bridge transfer, priced
/// on the date the transfer was sent.
pub fn compute_bridge_fee(
    sent: &Transaction,
    received: &Transaction,
    prices: &PriceTable,
) -> Result<Decimal, ProfitError> {
    if sent.token != received.token {
        return Err(ProfitError::TokenMismatch {
            sent: sent.token.clone(),
            received: received.token.clone(),
        });
    }
    differential_usd(sent.amount, received.amount, &sent.token, sent.date(), prices)
}

fn differential_usd(
    sent: Decimal,
    received: Decimal,
    token: &str,
    date: NaiveDate,
    prices: &PriceTable,
) -> Result<Decimal, ProfitError> {
    if received > sent {
        return Err(ProfitError::NegativeFee { sent, received });
    }
    if received == sent {
        return Ok(Decimal::ZERO);
    }
    Ok((sent - received) * prices.price(token, date)?)
}

/// Bridge activity of one address with fees already converted to USD.
#[derive(Debug, Clone, PartialEq)]
pub struct AddressActivity {
    pub address: Address,
    pub bridge_txs: Vec<Transaction>,
    pub first_bridge_date: Option<NaiveDate>,
    pub total_bridge_volume_usd: Decimal,
    pub total_gas_usd: Decimal,
    pub total_bridge_fee_usd: Decimal,
}

impl AddressActivity {
    /// Collects the cross-chain transfers sent by `address`. Volume uses
    /// `amount_usd` when present, otherwise the token's daily close; gas is
    /// priced in the source chain's native token.
    pub fn assemble(
        ledger: &Ledger,
        address: &Address,
        prices: &PriceTable,
    ) -> Result<Self, ProfitError> {
        let bridge_txs: Vec<Transaction> = ledger
            .sent_by(address)
            .filter(|t| t.is_cross_chain())
            .cloned()
            .collect();
        let mut volume = Decimal::ZERO;
        let mut gas = Decimal::ZERO;
        let mut fee = Decimal::ZERO;
        for tx in &bridge_txs {
            let date = tx.date();
            volume += match tx.amount_usd {
                Some(usd) => usd,
                None => tx.amount * prices.price(&tx.token, date)?,
            };
            if tx.gas_fee_native > Decimal::ZERO {
                gas += tx.gas_fee_native * prices.price(&tx.src_chain.native_token(), date)?;
            }
            fee += differential_usd(tx.amount, tx.received_amount(), &tx.token, date, prices)?;
        }
        Ok(AddressActivity {
            address: address.clone(),
            first_bridge_date: bridge_txs.iter().map(|t| t.date()).min(),
            bridge_txs,
            total_bridge_volume_usd: volume,
            total_gas_usd: gas,
            total_bridge_fee_usd: fee,
        })
    }

    pub fn empty(address: Address) -> Self {
        AddressActivity {
            address,
            bridge_txs: Vec::new(),
            first_bridge_date: None,
            total_bridge_volume_usd: Decimal::ZERO,
            total_gas_usd: Decimal::ZERO,
            total_bridge_fee_usd: Decimal::ZERO,
        }
    }
}

/// One row of a [`ProfitReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AddressProfit {
    pub address: Address,
    pub volume_usd: Decimal,
    pub early_multiplier: Decimal,
    pub volume_multiplier: u8,
    pub reward_usd: Decimal,
    pub fees_usd: Decimal,
    pub net_profit_usd: Decimal,
}

/// Net profit using the early-bird multiplier derived from the first bridge date.
pub fn compute_net_profit(activity: &AddressActivity, params: &RewardParams) -> AddressProfit {
    let early = activity
        .first_bridge_date
        .map_or(Decimal::ZERO, |d| early_bird_multiplier(d, params));
    net_profit_with_multiplier(activity, early, params)
}

/// Net profit with an externally supplied early-bird multiplier. Ineligible
/// addresses (too few bridge transfers, or volume below the first band) earn
/// nothing but still pay their fees.
pub fn net_profit_with_multiplier(
    activity: &AddressActivity,
    early: Decimal,
    params: &RewardParams,
) -> AddressProfit {
    let mut volume_mult = volume_multiplier(activity.total_bridge_volume_usd, params);
    if activity.bridge_txs.len() < params.eligibility_min_txs {
        volume_mult = 0;
    }
    let reward = compute_reward(early, volume_mult, params);
    let fees = activity.total_gas_usd + activity.total_bridge_fee_usd;
    AddressProfit {
        address: activity.address.clone(),
        volume_usd: activity.total_bridge_volume_usd,
        early_multiplier: early,
        volume_multiplier: volume_mult,
        reward_usd: reward,
        fees_usd: fees,
        net_profit_usd: reward - fees,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupTotals {
    pub total_reward_usd: Decimal,
    pub total_fee_usd: Decimal,
    pub total_net_profit_usd: Decimal,
    pub mean_reward_usd: Decimal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfitReport {
    pub group_id: String,
    pub rows: Vec<AddressProfit>,
    pub totals: GroupTotals,
}

impl ProfitReport {
    pub fn from_rows(group_id: impl Into<String>, rows: Vec<AddressProfit>) -> Self {
        let total_reward_usd: Decimal = rows.iter().map(|r| r.reward_usd).sum();
        let total_fee_usd: Decimal = rows.iter().map(|r| r.fees_usd).sum();
        let total_net_profit_usd: Decimal = rows.iter().map(|r| r.net_profit_usd).sum();
        let mean_reward_usd = if rows.is_empty() {
            Decimal::ZERO
        } else {
            total_reward_usd / Decimal::from(rows.len())
        };
        ProfitReport {
            group_id: group_id.into(),
            rows,
            totals: GroupTotals {
                total_reward_usd,
                total_fee_usd,
                total_net_profit_usd,
                mean_reward_usd,
            },
        }
    }

    /// `address,V_usd,m_e,m_v,reward_usd,fees_usd,net_profit_usd`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("address,V_usd,m_e,m_v,reward_usd,fees_usd,net_profit_usd\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.address,
                r.volume_usd.normalize(),
                r.early_multiplier.normalize(),
                r.volume_multiplier,
                r.reward_usd.normalize(),
                r.fees_usd.normalize(),
                r.net_profit_usd.normalize()
            ));
        }
        out
    }
}

/// One row per group member, in address order.
pub fn group_profit_report(
    ledger: &Ledger,
    group: &AttackerGroup,
    params: &RewardParams,
    prices: &PriceTable,
) -> Result<ProfitReport, ProfitError> {
    params.validate()?;
    let rows = group
        .addresses
        .iter()
        .map(|a| {
            AddressActivity::assemble(ledger, a, prices).map(|act| compute_net_profit(&act, params))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProfitReport::from_rows(group.group_id.clone(), rows))
}

/// Groups ordered by total net profit, highest first; ties by group id.
pub fn rank_groups(reports: &[ProfitReport]) -> Vec<&ProfitReport> {
    let mut ranked: Vec<&ProfitReport> = reports.iter().collect();
    ranked.sort_by(|a, b| {
        b.totals
            .total_net_profit_usd
            .cmp(&a.totals.total_net_profit_usd)
            .then_with(|| a.group_id.cmp(&b.group_id))
    });
    ranked
}
