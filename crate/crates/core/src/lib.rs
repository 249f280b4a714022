//! Airdrop hunter analytics.
//!
//! The crate is organized around three concerns:
//!
//! * [`ledger`] and [`detectors`]: ingest cross-chain transfer records and
//!   measure the funding, sequential-transfer and uniformity patterns that
//!   coordinated (Sybil) address groups leave behind.
//! * [`profit`]: expected airdrop reward, fees and net profit per address
//!   and per group under a base-amount x early-bird x volume reward rule.
//! * [`mechanism`]: the four-stage airdrop game (self-report ratio, attacker
//!   equilibrium, bounty-hunter contract menu, task complexities), each
//!   closed form paired with a brute-force check.
//!
//! [`synth`] produces seeded ledgers with planted patterns for validating the
//! detectors.

pub mod detectors;
pub mod ledger;
pub mod mechanism;
pub mod profit;
pub mod synth;

pub use rust_decimal::Decimal;
