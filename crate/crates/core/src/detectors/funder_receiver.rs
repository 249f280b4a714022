use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::ledger::{Address, AttackerGroup, Ledger};

/// An address together with the fraction of the group it touches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Participant {
    pub address: Address,
    /// Distinct group members touched.
    pub count: usize,
    /// `count / |G|`, in `[0, 1]`.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunderReceiverReport {
    pub funder: Option<Participant>,
    pub receiver: Option<Participant>,
}

/// Finds the sender reaching the most distinct group members (the initial
/// funder, which may sit outside the group) and the receiver collecting from
/// the most distinct members. Ties go to the lexicographically smallest
/// address.
pub fn detect_funder_receiver(ledger: &Ledger, group: &AttackerGroup) -> FunderReceiverReport {
    let mut recipients: BTreeMap<&Address, BTreeSet<&Address>> = BTreeMap::new();
    let mut senders: BTreeMap<&Address, BTreeSet<&Address>> = BTreeMap::new();
    for member in &group.addresses {
        for tx in ledger.received_by(member) {
            recipients.entry(&tx.from).or_default().insert(&tx.to);
        }
        for tx in ledger.sent_by(member) {
            senders.entry(&tx.to).or_default().insert(&tx.from);
        }
    }
    let n = group.len();
    FunderReceiverReport {
        funder: arg_max(&recipients, n),
        receiver: arg_max(&senders, n),
    }
}

fn arg_max(counts: &BTreeMap<&Address, BTreeSet<&Address>>, n: usize) -> Option<Participant> {
    let mut best: Option<(&Address, usize)> = None;
    // BTreeMap iterates in address order, so strict `>` keeps the smallest on ties.
    for (addr, set) in counts {
        if best.is_none_or(|(_, c)| set.len() > c) {
            best = Some((addr, set.len()));
        }
    }
    best.map(|(address, count)| Participant {
        address: address.clone(),
        count,
        fraction: count as f64 / n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::test_support::*;
    use crate::ledger::ChainId::*;

    fn group(ids: &[u8]) -> AttackerGroup {
        AttackerGroup::new("g", ids.iter().map(|&i| addr(i))).unwrap()
    }

    #[test]
    fn external_funder_three_of_four() {
        let ledger = Ledger::new(vec![
            tx("0x1", 100, 1, Ethereum, Ethereum, "1", 10),
            tx("0x2", 100, 2, Ethereum, Ethereum, "1", 11),
            tx("0x3", 100, 3, Ethereum, Ethereum, "1", 12),
        ])
        .unwrap();
        let r = detect_funder_receiver(&ledger, &group(&[1, 2, 3, 4]));
        let f = r.funder.unwrap();
        assert_eq!(f.address, addr(100));
        assert_eq!(f.fraction, 0.75);
        // the three funded members do not send anything
        assert!(r.receiver.is_none());
    }

    #[test]
    fn empty_group_activity() {
        let ledger = Ledger::new(vec![tx("0x1", 50, 51, Ethereum, Optimism, "1", 10)]).unwrap();
        let r = detect_funder_receiver(&ledger, &group(&[1, 2]));
        assert_eq!(r, FunderReceiverReport { funder: None, receiver: None });
    }

    #[test]
    fn saturated_funder_and_ties() {
        let ledger = Ledger::new(vec![
            tx("0x1", 90, 1, Ethereum, Ethereum, "1", 10),
            tx("0x2", 90, 2, Ethereum, Ethereum, "1", 10),
            tx("0x3", 80, 1, Ethereum, Ethereum, "1", 10),
            tx("0x4", 80, 2, Ethereum, Ethereum, "1", 10),
            tx("0x5", 1, 70, Optimism, Ethereum, "1", 20),
            tx("0x6", 2, 60, Arbitrum, Ethereum, "1", 20),
        ])
        .unwrap();
        let r = detect_funder_receiver(&ledger, &group(&[1, 2]));
        let f = r.funder.unwrap();
        assert_eq!(f.fraction, 1.0);
        assert_eq!(f.address, addr(80), "tie broken by smallest address");
        let rc = r.receiver.unwrap();
        assert_eq!(rc.address, addr(60));
        assert_eq!(rc.fraction, 0.5);
    }

    #[test]
    fn repeated_transfers_count_once() {
        let ledger = Ledger::new(vec![
            tx("0x1", 90, 1, Ethereum, Ethereum, "1", 10),
            tx("0x2", 90, 1, Ethereum, Ethereum, "1", 11),
            tx("0x3", 90, 1, Ethereum, Ethereum, "1", 12),
        ])
        .unwrap();
        let f = detect_funder_receiver(&ledger, &group(&[1, 2])).funder.unwrap();
        assert_eq!(f.count, 1);
        assert_eq!(f.fraction, 0.5);
    }
}
