use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Address, LedgerError};

/// A labeled set of addresses suspected to belong to one entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttackerGroup {
    pub group_id: String,
    pub addresses: BTreeSet<Address>,
}

impl AttackerGroup {
    pub fn new(
        group_id: impl Into<String>,
        addresses: impl IntoIterator<Item = Address>,
    ) -> Result<Self, LedgerError> {
        let group_id = group_id.into();
        let mut set = BTreeSet::new();
        for a in addresses {
            if set.contains(&a) {
                return Err(LedgerError::DuplicateAddress {
                    group_id,
                    address: a.to_string(),
                });
            }
            set.insert(a);
        }
        if set.is_empty() {
            return Err(LedgerError::EmptyGroup(group_id));
        }
        Ok(AttackerGroup {
            group_id,
            addresses: set,
        })
    }

    pub fn contains(&self, address: &Address) -> bool {
        self.addresses.contains(address)
    }

    pub fn len(&self) -> usize {
        self.addresses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.addresses.is_empty()
    }
}

#[derive(Deserialize)]
struct RawGroup {
    group_id: String,
    addresses: Vec<String>,
}

pub fn load_groups(path: &Path) -> Result<Vec<AttackerGroup>, LedgerError> {
    if !path.exists() {
        return Err(LedgerError::MissingFile(path.to_path_buf()));
    }
    parse_groups(&fs::read_to_string(path)?)
}

/// Parses a JSON array of `{group_id, addresses[]}` objects.
pub fn parse_groups(text: &str) -> Result<Vec<AttackerGroup>, LedgerError> {
    let raw: Vec<RawGroup> = serde_json::from_str(text).map_err(|e| LedgerError::Schema {
        line: e.line(),
        field: "groups".to_string(),
        message: e.to_string(),
    })?;
    let mut ids = HashSet::new();
    let mut groups = Vec::with_capacity(raw.len());
    for g in raw {
        if !ids.insert(g.group_id.clone()) {
            return Err(LedgerError::DuplicateGroupId(g.group_id));
        }
        let addresses = g
            .addresses
            .iter()
            .map(|a| Address::parse(a))
            .collect::<Result<Vec<_>, _>>()?;
        groups.push(AttackerGroup::new(g.group_id, addresses)?);
    }
    Ok(groups)
}

/// Pretty-printed JSON in the same shape `parse_groups` reads.
pub fn write_groups(groups: &[AttackerGroup]) -> String {
    let mut s = serde_json::to_string_pretty(groups).expect("groups serialize");
    s.push('\n');
    s
}
