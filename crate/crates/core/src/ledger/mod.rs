//! Transaction data model, file ingestion, attacker groups and price lookup.

mod address;
mod chain;
mod groups;
mod io;
mod prices;
mod transaction;

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use chrono::NaiveDate;
use rust_decimal::{Decimal, RoundingStrategy};

pub use address::Address;
pub use chain::ChainId;
pub use groups::{load_groups, parse_groups, write_groups, AttackerGroup};
pub use io::{
    load_transactions, parse_transactions_csv, parse_transactions_jsonl, write_transactions,
    LedgerFormat, CSV_HEADER,
};
pub use prices::{load_prices, parse_prices_csv, write_prices_csv, PriceTable};
pub use transaction::{utc_date, Transaction};

/// Fractional digits kept for every token amount.
pub const AMOUNT_SCALE: u32 = 18;

#[derive(Debug, thiserror::Error)]
pub enum LedgerError {
    #[error("input file not found: {0}")]
    MissingFile(PathBuf),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema error at line {line}, field `{field}`: {message}")]
    Schema {
        line: usize,
        field: String,
        message: String,
    },
    #[error("duplicate tx_hash {0}")]
    DuplicateTxHash(String),
    #[error("non-positive amount at line {line}")]
    NonPositiveAmount { line: usize },
    #[error("duplicate group_id {0}")]
    DuplicateGroupId(String),
    #[error("group {0} has no addresses")]
    EmptyGroup(String),
    #[error("duplicate address {address} in group {group_id}")]
    DuplicateAddress { group_id: String, address: String },
    #[error("no price for {token} on {date}")]
    MissingPrice { token: String, date: NaiveDate },
    #[error("invalid address {0:?}")]
    InvalidAddress(String),
    #[error("invalid chain {0:?}")]
    InvalidChain(String),
    #[error("invalid transaction: {0}")]
    InvalidTransaction(String),
}

impl LedgerError {
    pub(crate) fn schema(line: usize, field: &str, message: impl Into<String>) -> Self {
        LedgerError::Schema {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

/// Parses a decimal and rounds it to [`AMOUNT_SCALE`] fractional digits.
pub fn parse_amount(raw: &str) -> Option<Decimal> {
    let raw = raw.trim();
    let d = raw
        .parse::<Decimal>()
        .ok()
        .or_else(|| Decimal::from_scientific(raw).ok())?;
    Some(
        d.round_dp_with_strategy(AMOUNT_SCALE, RoundingStrategy::MidpointNearestEven)
            .normalize(),
    )
}

/// Transactions sorted by `(timestamp, tx_hash)` with sender/receiver indexes.
#[derive(Debug, Clone, Default)]
pub struct Ledger {
    transactions: Vec<Transaction>,
    by_sender: HashMap<Address, Vec<usize>>,
    by_receiver: HashMap<Address, Vec<usize>>,
}

impl PartialEq for Ledger {
    fn eq(&self, other: &Self) -> bool {
        self.transactions == other.transactions
    }
}

impl Eq for Ledger {}

impl Ledger {
    pub fn new(mut transactions: Vec<Transaction>) -> Result<Self, LedgerError> {
        let mut seen = HashSet::with_capacity(transactions.len());
        for tx in &transactions {
            if tx.amount <= Decimal::ZERO {
                return Err(LedgerError::InvalidTransaction(format!(
                    "{}: amount must be positive",
                    tx.tx_hash
                )));
            }
            if tx.timestamp <= 0 {
                return Err(LedgerError::InvalidTransaction(format!(
                    "{}: timestamp must be positive",
                    tx.tx_hash
                )));
            }
            if tx.gas_fee_native < Decimal::ZERO || tx.transfer_fee_native < Decimal::ZERO {
                return Err(LedgerError::InvalidTransaction(format!(
                    "{}: fees must be non-negative",
                    tx.tx_hash
                )));
            }
            if !seen.insert(tx.tx_hash.as_str()) {
                return Err(LedgerError::DuplicateTxHash(tx.tx_hash.clone()));
            }
        }
        transactions.sort_by(|a, b| {
            a.timestamp
                .cmp(&b.timestamp)
                .then_with(|| a.tx_hash.cmp(&b.tx_hash))
        });
        let mut by_sender: HashMap<Address, Vec<usize>> = HashMap::new();
        let mut by_receiver: HashMap<Address, Vec<usize>> = HashMap::new();
        for (i, tx) in transactions.iter().enumerate() {
            by_sender.entry(tx.from.clone()).or_default().push(i);
            by_receiver.entry(tx.to.clone()).or_default().push(i);
        }
        Ok(Ledger {
            transactions,
            by_sender,
            by_receiver,
        })
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// Transactions sent by `address`, in ledger order.
    pub fn sent_by<'a>(&'a self, address: &Address) -> impl Iterator<Item = &'a Transaction> + 'a {
        self.indexed(self.by_sender.get(address))
    }

    /// Transactions received by `address`, in ledger order.
    pub fn received_by<'a>(
        &'a self,
        address: &Address,
    ) -> impl Iterator<Item = &'a Transaction> + 'a {
        self.indexed(self.by_receiver.get(address))
    }

    fn indexed<'a>(
        &'a self,
        idx: Option<&'a Vec<usize>>,
    ) -> impl Iterator<Item = &'a Transaction> + 'a {
        idx.into_iter()
            .flatten()
            .map(move |&i| &self.transactions[i])
    }
}
