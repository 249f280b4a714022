use rust_decimal::prelude::ToPrimitive;
use serde::Serialize;

use super::{DetectorConfig, DetectorError};
use crate::ledger::{AttackerGroup, Ledger};

/// Share of members whose count (volume) sits within the threshold of the
/// nearest fitted center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformityScore {
    pub u_count: f64,
    pub u_volume: f64,
}

const MAX_CENTERS: usize = 3;
const MAX_LLOYD_ROUNDS: usize = 1_000;

/// Per member, counts and sums the transfers it sent to other members, fits
/// up to three centers to each vector and reports the share of members
/// within `count_threshold` / `volume_threshold` of their nearest center.
pub fn compute_uniformity(
    ledger: &Ledger,
    group: &AttackerGroup,
    cfg: &DetectorConfig,
) -> Result<UniformityScore, DetectorError> {
    let mut counts = Vec::with_capacity(group.len());
    let mut volumes = Vec::with_capacity(group.len());
    for member in &group.addresses {
        let (mut c, mut v) = (0u64, rust_decimal::Decimal::ZERO);
        for tx in ledger.sent_by(member) {
            if tx.to != *member && group.contains(&tx.to) {
                c += 1;
                v += tx.amount;
            }
        }
        counts.push(c as f64);
        volumes.push(v.to_f64().unwrap_or(f64::MAX));
    }
    if counts.iter().all(|&c| c == 0.0) {
        return Err(DetectorError::EmptyActivity(group.group_id.clone()));
    }
    let k = MAX_CENTERS.min(group.len());
    let count_centers = fit_centers(&counts, k);
    let volume_centers = fit_centers(&volumes, k);
    Ok(UniformityScore {
        u_count: uniform_fraction(&counts, &count_centers, cfg.count_threshold as f64),
        u_volume: uniform_fraction(
            &volumes,
            &volume_centers,
            cfg.volume_threshold.to_f64().unwrap_or(f64::MAX),
        ),
    })
}

/// Deterministic 1-D k-means: centers start at the `i/(k+1)` quantiles
/// (linear interpolation) and Lloyd updates run until assignments stop
/// changing. Empty clusters keep their previous center.
pub fn fit_centers(values: &[f64], k: usize) -> Vec<f64> {
    if values.is_empty() || k == 0 {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut centers: Vec<f64> = (1..=k)
        .map(|i| quantile(&sorted, i as f64 / (k + 1) as f64))
        .collect();

    let mut assignment: Vec<usize> = vec![usize::MAX; values.len()];
    for _ in 0..MAX_LLOYD_ROUNDS {
        let next: Vec<usize> = values.iter().map(|&x| nearest(&centers, x)).collect();
        if next == assignment {
            break;
        }
        assignment = next;
        for (c, center) in centers.iter_mut().enumerate() {
            let (sum, n) = values
                .iter()
                .zip(&assignment)
                .filter(|(_, &a)| a == c)
                .fold((0.0, 0usize), |(s, n), (&x, _)| (s + x, n + 1));
            if n > 0 {
                *center = sum / n as f64;
            }
        }
    }
    centers
}

/// Fraction of `values` within `threshold` (inclusive) of their nearest center.
pub fn uniform_fraction(values: &[f64], centers: &[f64], threshold: f64) -> f64 {
    if values.is_empty() || centers.is_empty() {
        return 0.0;
    }
    let hits = values
        .iter()
        .filter(|&&x| (x - centers[nearest(centers, x)]).abs() <= threshold)
        .count();
    hits as f64 / values.len() as f64
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn nearest(centers: &[f64], x: f64) -> usize {
    let mut best = 0;
    for (i, c) in centers.iter().enumerate().skip(1) {
        if (x - c).abs() < (x - centers[best]).abs() {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::test_support::*;
    use crate::ledger::{ChainId::*, Transaction};
    use proptest::prelude::*;

    #[test]
    fn near_identical_counts_are_uniform() {
        let x = [5.0, 5.0, 5.0, 6.0];
        let centers = fit_centers(&x, 3);
        assert_eq!(uniform_fraction(&x, &centers, 2.0), 1.0);
    }

    #[test]
    fn identical_counts_with_zero_threshold() {
        let x = [4.0; 6];
        let centers = fit_centers(&x, 3);
        assert_eq!(uniform_fraction(&x, &centers, 0.0), 1.0);
    }

    #[test]
    fn two_points_two_centers() {
        let x = [1.0, 100.0];
        let centers = fit_centers(&x, 2);
        assert_eq!(centers, vec![1.0, 100.0]);
        assert_eq!(uniform_fraction(&x, &centers, 0.0), 1.0);
    }

    #[test]
    fn quantile_init_then_lloyd() {
        // Quantiles 1/4, 2/4, 3/4 of [1,2,3,10,11,12,50] are 2.5, 10, 11.5.
        let x = [1.0, 2.0, 3.0, 10.0, 11.0, 12.0, 50.0];
        let centers = fit_centers(&x, 3);
        assert_eq!(centers, vec![2.0, 11.0, 50.0]);
        assert!((uniform_fraction(&x, &centers, 1.0) - 1.0).abs() < 1e-12);
        assert!((uniform_fraction(&x, &centers, 0.5) - 3.0 / 7.0).abs() < 1e-12);
    }

    fn ring_ledger(counts: &[usize]) -> Ledger {
        let n = counts.len() as u8;
        let mut txs: Vec<Transaction> = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            for k in 0..c {
                let from = i as u8 + 1;
                let to = (i as u8 + 1) % n + 1;
                txs.push(tx(
                    &format!("0x{i}_{k}"),
                    from,
                    to,
                    Ethereum,
                    Optimism,
                    "10",
                    (1 + i * 100 + k) as i64,
                ));
            }
        }
        Ledger::new(txs).unwrap()
    }

    #[test]
    fn counts_from_ledger() {
        let ledger = ring_ledger(&[5, 5, 5, 6]);
        let g = AttackerGroup::new("g", (1..=4).map(addr)).unwrap();
        let cfg = DetectorConfig::default();
        let u = compute_uniformity(&ledger, &g, &cfg).unwrap();
        assert_eq!(u.u_count, 1.0);
        // volumes 50,50,50,60 are within 300
        assert_eq!(u.u_volume, 1.0);
    }

    #[test]
    fn empty_activity() {
        let ledger = Ledger::new(vec![tx("0x1", 9, 8, Ethereum, Optimism, "1", 1)]).unwrap();
        let g = AttackerGroup::new("g", [addr(1), addr(2)]).unwrap();
        assert_eq!(
            compute_uniformity(&ledger, &g, &DetectorConfig::default()),
            Err(DetectorError::EmptyActivity("g".into()))
        );
    }

    proptest! {
        #[test]
        fn fraction_is_monotone_in_threshold(
            xs in proptest::collection::vec(0u32..50, 1..20),
            a in 0.0f64..20.0,
            b in 0.0f64..20.0,
        ) {
            let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
            let centers = fit_centers(&xs, 3.min(xs.len()));
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let u_lo = uniform_fraction(&xs, &centers, lo);
            let u_hi = uniform_fraction(&xs, &centers, hi);
            prop_assert!(u_lo <= u_hi);
            prop_assert!((0.0..=1.0).contains(&u_lo));
        }
    }
}
