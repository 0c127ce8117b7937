use std::collections::BTreeMap;

use crate::catalog::ColumnDef;
use crate::types::{AsnId, Value};

/// One parsed per-AS row. `values` is aligned with the owning table's
/// column catalog; the ASN is duplicated out of the row for keyed access.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceRecord {
    pub asn: AsnId,
    pub values: Vec<Value>,
}

/// A per-AS table from one source, keyed by ASN. Insertion order is
/// preserved (warnings refer to input positions); snapshot assembly sorts
/// records into canonical ASN order.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceTable {
    columns: &'static [ColumnDef],
    records: Vec<SourceRecord>,
    index: BTreeMap<AsnId, usize>,
}

/// A record-level problem that did not stop the parse.
#[derive(Debug, Clone, PartialEq)]
pub struct TableWarning {
    /// Zero-based record position in the input.
    pub record: usize,
    pub asn: Option<AsnId>,
    pub message: String,
}

impl SourceTable {
    pub fn new(columns: &'static [ColumnDef]) -> Self {
        SourceTable {
            columns,
            records: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    pub fn columns(&self) -> &'static [ColumnDef] {
        self.columns
    }

    /// Appends a record unless its ASN is already present. Returns false
    /// (and leaves the table unchanged) on a duplicate.
    pub fn push(&mut self, record: SourceRecord) -> bool {
        debug_assert_eq!(record.values.len(), self.columns.len());
        match self.index.entry(record.asn) {
            std::collections::btree_map::Entry::Occupied(_) => false,
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(self.records.len());
                self.records.push(record);
                true
            }
        }
    }

    pub fn get(&self, asn: AsnId) -> Option<&SourceRecord> {
        self.index.get(&asn).map(|&i| &self.records[i])
    }

    pub fn value(&self, asn: AsnId, column: &str) -> Option<&Value> {
        let pos = self.columns.iter().position(|c| c.name == column)?;
        Some(&self.get(asn)?.values[pos])
    }

    pub fn contains(&self, asn: AsnId) -> bool {
        self.index.contains_key(&asn)
    }

    pub fn records(&self) -> &[SourceRecord] {
        &self.records
    }

    pub fn asns(&self) -> impl Iterator<Item = AsnId> + '_ {
        self.index.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Keeps only the given ASNs and sorts records into ascending ASN
    /// order: the canonical layout used by snapshots and their caches.
    pub fn restrict_and_sort(&mut self, keep: &std::collections::BTreeSet<AsnId>) {
        self.records.retain(|r| keep.contains(&r.asn));
        self.records.sort_by_key(|r| r.asn);
        self.index = self
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.asn, i))
            .collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::AS_RANK_COLUMNS;

    fn rec(asn: u32) -> SourceRecord {
        let asn = AsnId::new(asn).unwrap();
        let mut values = vec![Value::Missing; AS_RANK_COLUMNS.len()];
        values[0] = Value::Int(asn.get() as i64);
        SourceRecord { asn, values }
    }

    #[test]
    fn duplicate_asn_keeps_first() {
        let mut t = SourceTable::new(&AS_RANK_COLUMNS);
        let mut first = rec(5);
        first.values[1] = Value::Int(42);
        assert!(t.push(first));
        assert!(!t.push(rec(5)));
        assert_eq!(t.len(), 1);
        assert_eq!(t.value(AsnId::new(5).unwrap(), "total"), Some(&Value::Int(42)));
    }

    #[test]
    fn restrict_and_sort_canonicalizes() {
        let mut t = SourceTable::new(&AS_RANK_COLUMNS);
        for asn in [9, 2, 7, 4] {
            t.push(rec(asn));
        }
        let keep = [2, 7, 9]
            .into_iter()
            .map(|a| AsnId::new(a).unwrap())
            .collect();
        t.restrict_and_sort(&keep);
        let order: Vec<u32> = t.records().iter().map(|r| r.asn.get()).collect();
        assert_eq!(order, [2, 7, 9]);
        assert!(t.get(AsnId::new(7).unwrap()).is_some());
        assert!(t.get(AsnId::new(4).unwrap()).is_none());
    }
}
