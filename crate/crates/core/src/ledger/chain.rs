use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LedgerError;

/// Network a transfer leaves from or lands on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ChainId {
    Ethereum,
    Optimism,
    Arbitrum,
    Polygon,
    Xdai,
    Other(String),
}

impl ChainId {
    /// Symbol of the token gas is paid in.
    pub fn native_token(&self) -> String {
        match self {
            ChainId::Ethereum | ChainId::Optimism | ChainId::Arbitrum => "ETH".to_string(),
            ChainId::Polygon => "MATIC".to_string(),
            ChainId::Xdai => "XDAI".to_string(),
            ChainId::Other(label) => label.to_ascii_uppercase(),
        }
    }
}

impl FromStr for ChainId {
    type Err = LedgerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let label = s.trim().to_ascii_lowercase();
        Ok(match label.as_str() {
            "" => return Err(LedgerError::InvalidChain(s.to_string())),
            "ethereum" => ChainId::Ethereum,
            "optimism" => ChainId::Optimism,
            "arbitrum" => ChainId::Arbitrum,
            "polygon" => ChainId::Polygon,
            "xdai" => ChainId::Xdai,
            _ => ChainId::Other(label),
        })
    }
}

impl fmt::Display for ChainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainId::Ethereum => f.write_str("ethereum"),
            ChainId::Optimism => f.write_str("optimism"),
            ChainId::Arbitrum => f.write_str("arbitrum"),
            ChainId::Polygon => f.write_str("polygon"),
            ChainId::Xdai => f.write_str("xdai"),
            ChainId::Other(label) => f.write_str(label),
        }
    }
}

impl TryFrom<String> for ChainId {
    type Error = LedgerError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<ChainId> for String {
    fn from(value: ChainId) -> Self {
        value.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_and_other() {
        assert_eq!("Ethereum".parse::<ChainId>().unwrap(), ChainId::Ethereum);
        assert_eq!("xdai".parse::<ChainId>().unwrap(), ChainId::Xdai);
        assert_eq!(
            "Base".parse::<ChainId>().unwrap(),
            ChainId::Other("base".into())
        );
        assert!("".parse::<ChainId>().is_err());
    }

    #[test]
    fn native_tokens() {
        assert_eq!(ChainId::Arbitrum.native_token(), "ETH");
        assert_eq!(ChainId::Polygon.native_token(), "MATIC");
        assert_eq!(ChainId::Other("bsc".into()).native_token(), "BSC");
    }
}
