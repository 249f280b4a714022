use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde_json::Value;

use super::{parse_amount, Address, ChainId, Ledger, LedgerError, Transaction};

/// Exact, ordered header of the transaction CSV.
pub const CSV_HEADER: [&str; 11] = [
    "tx_hash",
    "from",
    "to",
    "src_chain",
    "dst_chain",
    "token",
    "amount",
    "amount_usd",
    "timestamp",
    "gas_fee_native",
    "transfer_fee_native",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LedgerFormat {
    Csv,
    Jsonl,
}

impl LedgerFormat {
    /// Guesses the format from the file extension; anything but `.jsonl`/`.ndjson` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => LedgerFormat::Jsonl,
            _ => LedgerFormat::Csv,
        }
    }
}

impl FromStr for LedgerFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(LedgerFormat::Csv),
            "jsonl" => Ok(LedgerFormat::Jsonl),
            other => Err(format!("unknown ledger format {other:?}")),
        }
    }
}

pub fn load_transactions(path: &Path, format: LedgerFormat) -> Result<Ledger, LedgerError> {
    if !path.exists() {
        return Err(LedgerError::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    match format {
        LedgerFormat::Csv => parse_transactions_csv(&text),
        LedgerFormat::Jsonl => parse_transactions_jsonl(&text),
    }
}

/// Parses CSV text. Line numbers in errors count data rows from 1.
pub fn parse_transactions_csv(text: &str) -> Result<Ledger, LedgerError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| LedgerError::schema(0, "header", e.to_string()))?
        .clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(LedgerError::schema(
            0,
            "header",
            format!("expected `{}`", CSV_HEADER.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| LedgerError::schema(line, "record", e.to_string()))?;
        if record.len() != CSV_HEADER.len() {
            return Err(LedgerError::schema(
                line,
                "record",
                format!("expected {} fields, got {}", CSV_HEADER.len(), record.len()),
            ));
        }
        let field = |name: &str| -> &str {
            let idx = CSV_HEADER.iter().position(|h| *h == name).unwrap();
            record.get(idx).unwrap_or("")
        };
        rows.push(build_transaction(line, field)?);
    }
    finish(rows)
}

/// Parses JSON Lines text; blank lines are skipped but still counted.
pub fn parse_transactions_jsonl(text: &str) -> Result<Ledger, LedgerError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(raw)
            .map_err(|e| LedgerError::schema(line, "record", e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| LedgerError::schema(line, "record", "expected a JSON object"))?;
        let strings: Vec<String> = CSV_HEADER
            .iter()
            .map(|name| match obj.get(*name) {
                None | Some(Value::Null) => String::new(),
                Some(Value::String(s)) => s.clone(),
                Some(other) => other.to_string(),
            })
            .collect();
        let field = |name: &str| -> &str {
            let idx = CSV_HEADER.iter().position(|h| *h == name).unwrap();
            strings[idx].as_str()
        };
        rows.push(build_transaction(line, field)?);
    }
    finish(rows)
}

fn finish(rows: Vec<(usize, Transaction)>) -> Result<Ledger, LedgerError> {
    let mut seen = std::collections::HashSet::new();
    for (_, tx) in &rows {
        if !seen.insert(tx.tx_hash.clone()) {
            return Err(LedgerError::DuplicateTxHash(tx.tx_hash.clone()));
        }
    }
    Ledger::new(rows.into_iter().map(|(_, tx)| tx).collect())
}

fn build_transaction<'a>(
    line: usize,
    field: impl Fn(&str) -> &'a str,
) -> Result<(usize, Transaction), LedgerError> {
    let tx_hash = field("tx_hash").to_string();
    if tx_hash.is_empty() {
        return Err(LedgerError::schema(line, "tx_hash", "empty"));
    }
    let address = |name: &str| {
        Address::parse(field(name)).map_err(|_| LedgerError::schema(line, name, "invalid address"))
    };
    let chain = |name: &str| {
        field(name)
            .parse::<ChainId>()
            .map_err(|_| LedgerError::schema(line, name, "invalid chain"))
    };
    let decimal = |name: &str| {
        parse_amount(field(name)).ok_or_else(|| LedgerError::schema(line, name, "invalid decimal"))
    };
    let non_negative = |name: &str| {
        let d = decimal(name)?;
        if d < Decimal::ZERO {
            return Err(LedgerError::schema(line, name, "negative value"));
        }
        Ok(d)
    };

    let from = address("from")?;
    let to = address("to")?;
    let src_chain = chain("src_chain")?;
    let dst_chain = chain("dst_chain")?;
    let token = field("token").trim().to_ascii_uppercase();
    if token.is_empty() {
        return Err(LedgerError::schema(line, "token", "empty"));
    }
    let amount = decimal("amount")?;
    if amount <= Decimal::ZERO {
        return Err(LedgerError::NonPositiveAmount { line });
    }
    let amount_usd = if field("amount_usd").trim().is_empty() {
        None
    } else {
        Some(non_negative("amount_usd")?)
    };
    let timestamp: i64 = field("timestamp")
        .trim()
        .parse()
        .map_err(|_| LedgerError::schema(line, "timestamp", "not an integer"))?;
    if timestamp <= 0 {
        return Err(LedgerError::schema(line, "timestamp", "must be positive"));
    }
    let gas_fee_native = non_negative("gas_fee_native")?;
    let transfer_fee_native = non_negative("transfer_fee_native")?;

    Ok((
        line,
        Transaction {
            tx_hash,
            from,
            to,
            src_chain,
            dst_chain,
            token,
            amount,
            amount_usd,
            timestamp,
            gas_fee_native,
            transfer_fee_native,
        },
    ))
}

/// Writes the ledger in ledger order.
pub fn write_transactions<W: Write>(
    ledger: &Ledger,
    format: LedgerFormat,
    mut out: W,
) -> Result<(), LedgerError> {
    match format {
        LedgerFormat::Csv => {
            let mut w = csv::WriterBuilder::new().from_writer(out);
            w.write_record(CSV_HEADER).map_err(csv_io)?;
            for tx in ledger.transactions() {
                w.write_record([
                    tx.tx_hash.clone(),
                    tx.from.to_string(),
                    tx.to.to_string(),
                    tx.src_chain.to_string(),
                    tx.dst_chain.to_string(),
                    tx.token.clone(),
                    tx.amount.normalize().to_string(),
                    tx.amount_usd
                        .map(|d| d.normalize().to_string())
                        .unwrap_or_default(),
                    tx.timestamp.to_string(),
                    tx.gas_fee_native.normalize().to_string(),
                    tx.transfer_fee_native.normalize().to_string(),
                ])
                .map_err(csv_io)?;
            }
            w.flush()?;
        }
        LedgerFormat::Jsonl => {
            for tx in ledger.transactions() {
                serde_json::to_writer(&mut out, tx).map_err(std::io::Error::from)?;
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

pub(crate) fn csv_io(e: csv::Error) -> LedgerError {
    LedgerError::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "tx_hash,from,to,src_chain,dst_chain,token,amount,amount_usd,timestamp,gas_fee_native,transfer_fee_native\n";
    const A: &str = "0x00000000000000000000000000000000000000a1";
    const B: &str = "0x00000000000000000000000000000000000000B2";

    fn row(hash: &str, amount: &str, ts: &str) -> String {
        format!("{hash},{A},{B},ethereum,optimism,eth,{amount},,{ts},0.001,0.01\n")
    }

    #[test]
    fn accepts_single_row() {
        let text = format!("{HEADER}{}", row("0x01", "1.5", "1640995200"));
        let ledger = parse_transactions_csv(&text).unwrap();
        assert_eq!(ledger.len(), 1);
        let tx = &ledger.transactions()[0];
        assert_eq!(tx.to.as_str(), "0x00000000000000000000000000000000000000b2");
        assert_eq!(tx.token, "ETH");
        assert_eq!(tx.amount_usd, None);
    }

    #[test]
    fn bad_timestamp_is_schema_error() {
        let text = format!("{HEADER}{}", row("0x01", "1.5", "abc"));
        match parse_transactions_csv(&text).unwrap_err() {
            LedgerError::Schema { line, field, .. } => {
                assert_eq!(line, 1);
                assert_eq!(field, "timestamp");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn duplicate_hash_rejected() {
        let text = format!(
            "{HEADER}{}{}",
            row("0x01", "1", "1640995200"),
            row("0x01", "2", "1640995300")
        );
        assert!(matches!(
            parse_transactions_csv(&text).unwrap_err(),
            LedgerError::DuplicateTxHash(h) if h == "0x01"
        ));
    }

    #[test]
    fn non_positive_amount_rejected() {
        let text = format!(
            "{HEADER}{}{}",
            row("0x01", "1", "1640995200"),
            row("0x02", "0", "1640995300")
        );
        assert!(matches!(
            parse_transactions_csv(&text).unwrap_err(),
            LedgerError::NonPositiveAmount { line: 2 }
        ));
    }

    #[test]
    fn wrong_header_rejected() {
        let text = "hash,from\n0x1,0x2\n";
        assert!(matches!(
            parse_transactions_csv(text).unwrap_err(),
            LedgerError::Schema { line: 0, .. }
        ));
    }

    #[test]
    fn jsonl_mirrors_csv() {
        let csv_text = format!(
            "{HEADER}{}{}",
            row("0x01", "1.25", "1640995200"),
            row("0x02", "2", "1640995100")
        );
        let ledger = parse_transactions_csv(&csv_text).unwrap();
        let mut buf = Vec::new();
        write_transactions(&ledger, LedgerFormat::Jsonl, &mut buf).unwrap();
        let back = parse_transactions_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, ledger);

        let mut csv_buf = Vec::new();
        write_transactions(&ledger, LedgerFormat::Csv, &mut csv_buf).unwrap();
        let again = parse_transactions_csv(std::str::from_utf8(&csv_buf).unwrap()).unwrap();
        assert_eq!(again, ledger);
    }

    #[test]
    fn jsonl_accepts_numbers() {
        let line = format!(
            r#"{{"tx_hash":"0x1","from":"{A}","to":"{B}","src_chain":"polygon","dst_chain":"xdai","token":"USDC","amount":12.5,"amount_usd":12.5,"timestamp":1640995200,"gas_fee_native":0,"transfer_fee_native":0.1}}"#
        );
        let l = parse_transactions_jsonl(&line).unwrap();
        assert_eq!(l.transactions()[0].amount_usd, Some("12.5".parse().unwrap()));
    }

    #[test]
    fn missing_file() {
        let err = load_transactions(Path::new("/nonexistent/l.csv"), LedgerFormat::Csv).unwrap_err();
        assert!(matches!(err, LedgerError::MissingFile(_)));
    }

    #[test]
    fn load_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.csv");
        std::fs::write(
            &path,
            format!("{HEADER}{}{}", row("0x02", "1", "5"), row("0x01", "3", "5")),
        )
        .unwrap();
        let a = load_transactions(&path, LedgerFormat::Csv).unwrap();
        let b = load_transactions(&path, LedgerFormat::Csv).unwrap();
        assert_eq!(a, b);
    }
}
