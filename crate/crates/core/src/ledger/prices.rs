use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use rust_decimal::Decimal;

use super::io::csv_io;
use super::{parse_amount, LedgerError};

/// Daily USD closing prices keyed by `(token, UTC date)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PriceTable {
    entries: BTreeMap<(String, NaiveDate), Decimal>,
}

impl PriceTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        token: &str,
        date: NaiveDate,
        close_usd: Decimal,
    ) -> Result<(), LedgerError> {
        if close_usd <= Decimal::ZERO {
            return Err(LedgerError::InvalidTransaction(format!(
                "price for {token} on {date} must be positive"
            )));
        }
        self.entries
            .insert((token.trim().to_ascii_uppercase(), date), close_usd);
        Ok(())
    }

    /// Exact lookup; no interpolation between days.
    pub fn price(&self, token: &str, date: NaiveDate) -> Result<Decimal, LedgerError> {
        let token = token.trim().to_ascii_uppercase();
        self.entries
            .get(&(token.clone(), date))
            .copied()
            .ok_or(LedgerError::MissingPrice { token, date })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, NaiveDate, Decimal)> + '_ {
        self.entries
            .iter()
            .map(|((t, d), p)| (t.as_str(), *d, *p))
    }
}

pub fn load_prices(path: &Path) -> Result<PriceTable, LedgerError> {
    if !path.exists() {
        return Err(LedgerError::MissingFile(path.to_path_buf()));
    }
    parse_prices_csv(&fs::read_to_string(path)?)
}

/// Parses `token,date,close_usd` CSV.
pub fn parse_prices_csv(text: &str) -> Result<PriceTable, LedgerError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| LedgerError::schema(0, "header", e.to_string()))?;
    if headers.iter().ne(["token", "date", "close_usd"]) {
        return Err(LedgerError::schema(0, "header", "expected `token,date,close_usd`"));
    }
    let mut table = PriceTable::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| LedgerError::schema(line, "record", e.to_string()))?;
        let token = record.get(0).unwrap_or("");
        if token.is_empty() {
            return Err(LedgerError::schema(line, "token", "empty"));
        }
        let date = NaiveDate::parse_from_str(record.get(1).unwrap_or(""), "%Y-%m-%d")
            .map_err(|_| LedgerError::schema(line, "date", "expected YYYY-MM-DD"))?;
        let close = parse_amount(record.get(2).unwrap_or(""))
            .filter(|d| *d > Decimal::ZERO)
            .ok_or_else(|| LedgerError::schema(line, "close_usd", "expected a positive decimal"))?;
        table.insert(token, date, close)?;
    }
    Ok(table)
}

pub fn write_prices_csv(table: &PriceTable) -> Result<String, LedgerError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["token", "date", "close_usd"]).map_err(csv_io)?;
    for (token, date, price) in table.iter() {
        w.write_record([
            token.to_string(),
            date.format("%Y-%m-%d").to_string(),
            price.normalize().to_string(),
        ])
        .map_err(csv_io)?;
    }
    let bytes = w.into_inner().map_err(|e| LedgerError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn exact_lookup() {
        let t = parse_prices_csv("token,date,close_usd\nETH,2022-01-15,3000.0\n").unwrap();
        assert_eq!(t.price("ETH", d(2022, 1, 15)).unwrap(), Decimal::from(3000));
        assert!(matches!(
            t.price("ETH", d(2022, 1, 16)).unwrap_err(),
            LedgerError::MissingPrice { .. }
        ));
    }

    #[test]
    fn launch_price() {
        let mut t = PriceTable::new();
        t.insert("hop", d(2022, 6, 9), "0.1321".parse().unwrap()).unwrap();
        assert_eq!(
            t.price("HOP", d(2022, 6, 9)).unwrap(),
            "0.1321".parse::<Decimal>().unwrap()
        );
    }

    #[test]
    fn rejects_non_positive() {
        assert!(parse_prices_csv("token,date,close_usd\nETH,2022-01-15,0\n").is_err());
        assert!(parse_prices_csv("token,date,close_usd\nETH,15/01/2022,1\n").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let t = parse_prices_csv("token,date,close_usd\nETH,2022-01-15,3000.5\nMATIC,2022-01-15,2\n")
            .unwrap();
        assert_eq!(parse_prices_csv(&write_prices_csv(&t).unwrap()).unwrap(), t);
    }
}
