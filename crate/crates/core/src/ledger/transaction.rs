use chrono::{DateTime, NaiveDate};
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::{Address, ChainId};

/// One transfer record. `src_chain == dst_chain` for same-chain transfers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub tx_hash: String,
    pub from: Address,
    pub to: Address,
    pub src_chain: ChainId,
    pub dst_chain: ChainId,
    pub token: String,
    pub amount: Decimal,
    pub amount_usd: Option<Decimal>,
    pub timestamp: i64,
    pub gas_fee_native: Decimal,
    /// Sent minus received on the destination chain, in units of `token`.
    pub transfer_fee_native: Decimal,
}

impl Transaction {
    pub fn is_cross_chain(&self) -> bool {
        self.src_chain != self.dst_chain
    }

    /// UTC calendar date of the timestamp.
    pub fn date(&self) -> NaiveDate {
        utc_date(self.timestamp)
    }

    /// Amount credited on the destination chain.
    pub fn received_amount(&self) -> Decimal {
        self.amount - self.transfer_fee_native
    }
}

pub fn utc_date(timestamp: i64) -> NaiveDate {
    DateTime::from_timestamp(timestamp, 0)
        .map(|dt| dt.date_naive())
        .unwrap_or(NaiveDate::MIN)
}
