use std::collections::{BTreeMap, HashMap, HashSet};

use rust_decimal::Decimal;
use serde::{Serialize, Serializer};

use super::{DetectorConfig, DetectorError};
use crate::ledger::{Address, AttackerGroup, Ledger, Transaction, AMOUNT_SCALE};

/// 30 days.
pub const DEFAULT_TIMELINE_BUCKET: i64 = 2_592_000;

/// A run of cross-chain transfers where each hop forwards (almost) the same
/// value from the address that just received it, inside the time window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferChain {
    #[serde(rename = "tx_hashes", serialize_with = "tx_hashes")]
    pub transactions: Vec<Transaction>,
    pub start_address: Address,
    pub end_address: Address,
    pub start_value: Decimal,
    pub end_value: Decimal,
    pub start_timestamp: i64,
    pub end_timestamp: i64,
}

fn tx_hashes<S: Serializer>(txs: &[Transaction], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(txs.iter().map(|t| t.tx_hash.as_str()))
}

impl TransferChain {
    /// Builds a chain from at least two transactions.
    pub fn from_transactions(transactions: Vec<Transaction>) -> Option<Self> {
        if transactions.len() < 2 {
            return None;
        }
        let first = &transactions[0];
        let last = &transactions[transactions.len() - 1];
        Some(TransferChain {
            start_address: first.from.clone(),
            end_address: last.to.clone(),
            start_value: first.amount,
            end_value: last.amount,
            start_timestamp: first.timestamp,
            end_timestamp: last.timestamp,
            transactions,
        })
    }

    /// Consecutive `(outgoing, incoming)` hops.
    pub fn links(&self) -> impl Iterator<Item = (&Transaction, &Transaction)> {
        self.transactions.windows(2).map(|w| (&w[0], &w[1]))
    }

    /// Re-checks every hop against `cfg`.
    pub fn is_valid(&self, cfg: &DetectorConfig) -> bool {
        self.transactions.len() >= 2 && self.links().all(|(o, i)| hop_is_valid(o, i, cfg))
    }

    /// Distinct addresses touched by the chain.
    pub fn addresses(&self) -> HashSet<&Address> {
        self.transactions
            .iter()
            .flat_map(|t| [&t.from, &t.to])
            .collect()
    }
}

/// Hop conditions: the second transfer leaves the address the first one
/// landed on, both cross chains, the timestamps differ by at most the window
/// and the relative value drop `|(v_out - v_in) / v_out|` is within tolerance.
pub fn hop_is_valid(out: &Transaction, next: &Transaction, cfg: &DetectorConfig) -> bool {
    out.to == next.from
        && out.is_cross_chain()
        && next.is_cross_chain()
        && (out.timestamp - next.timestamp).abs() <= cfg.time_window
        && (out.amount - next.amount).abs() <= cfg.value_tolerance * out.amount
}

/// Greedy chain construction: transactions are taken as chain starts in ledger
/// order, each chain is extended with the earliest unused valid hop, and a
/// transaction belongs to at most one chain.
pub fn detect_sequential_transfers(
    ledger: &Ledger,
    group: &AttackerGroup,
    cfg: &DetectorConfig,
) -> Result<Vec<TransferChain>, DetectorError> {
    cfg.validate()?;
    let candidates: Vec<&Transaction> = ledger
        .transactions()
        .iter()
        .filter(|t| t.is_cross_chain() && group.contains(&t.from) && group.contains(&t.to))
        .collect();
    let mut by_sender: HashMap<&Address, Vec<usize>> = HashMap::new();
    for (i, t) in candidates.iter().enumerate() {
        by_sender.entry(&t.from).or_default().push(i);
    }

    let mut consumed = vec![false; candidates.len()];
    let mut chains = Vec::new();
    for start in 0..candidates.len() {
        if consumed[start] {
            continue;
        }
        let mut path = vec![start];
        let mut in_path: HashSet<usize> = HashSet::from([start]);
        let mut current = start;
        loop {
            let out = candidates[current];
            let next = by_sender.get(&out.to).and_then(|idx| {
                idx.iter().copied().find(|&j| {
                    !consumed[j] && !in_path.contains(&j) && hop_is_valid(out, candidates[j], cfg)
                })
            });
            match next {
                Some(j) => {
                    path.push(j);
                    in_path.insert(j);
                    current = j;
                }
                None => break,
            }
        }
        if path.len() >= 2 {
            for &i in &path {
                consumed[i] = true;
            }
            let txs = path.iter().map(|&i| candidates[i].clone()).collect();
            chains.extend(TransferChain::from_transactions(txs));
        }
    }
    Ok(chains)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coverage {
    /// Share of group members that appear in at least one chain.
    pub covered_fraction: f64,
    /// Mean number of chains per covered member.
    pub avg_transfers_per_covered_address: f64,
}

pub fn sequential_coverage(chains: &[TransferChain], group: &AttackerGroup) -> Coverage {
    let mut participations: BTreeMap<&Address, usize> = BTreeMap::new();
    for chain in chains {
        for a in chain.addresses() {
            if group.contains(a) {
                *participations.entry(a).or_default() += 1;
            }
        }
    }
    if participations.is_empty() || group.is_empty() {
        return Coverage {
            covered_fraction: 0.0,
            avg_transfers_per_covered_address: 0.0,
        };
    }
    let covered = participations.len();
    let total: usize = participations.values().sum();
    Coverage {
        covered_fraction: covered as f64 / group.len() as f64,
        avg_transfers_per_covered_address: total as f64 / covered as f64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineRow {
    pub bucket_start: i64,
    pub chain_count: usize,
    /// Mean start value of the chains in the bucket.
    pub avg_value: Decimal,
}

/// Buckets chains by start timestamp into `bucket`-second windows aligned to
/// the unix epoch.
pub fn sequential_timeline(chains: &[TransferChain], bucket: i64) -> Vec<TimelineRow> {
    let bucket = bucket.max(1);
    let mut acc: BTreeMap<i64, (usize, Decimal)> = BTreeMap::new();
    for c in chains {
        let key = c.start_timestamp.div_euclid(bucket) * bucket;
        let e = acc.entry(key).or_insert((0, Decimal::ZERO));
        e.0 += 1;
        e.1 += c.start_value;
    }
    acc.into_iter()
        .map(|(bucket_start, (count, sum))| TimelineRow {
            bucket_start,
            chain_count: count,
            avg_value: (sum / Decimal::from(count)).round_dp(AMOUNT_SCALE).normalize(),
        })
        .collect()
}
