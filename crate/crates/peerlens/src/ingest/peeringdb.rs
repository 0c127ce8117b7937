//! PeeringDB `net` table ingest. Field names in the dump already match the
//! catalog, so every column is looked up by its own name.

use crate::catalog::PEERINGDB_COLUMNS;
use crate::error::Result;
use crate::ingest::json::{self, build_table};
use crate::ingest::table::{SourceTable, TableWarning};

/// Parses a PeeringDB `net` dump (JSON array, `{"data": [...]}` envelope,
/// or JSON Lines) into a table aligned with [`PEERINGDB_COLUMNS`]. The same
/// record-level policy as AS-Rank applies: no usable ASN or a duplicate ASN
/// skips the record with a warning, unreadable fields become missing cells.
pub fn parse_peeringdb(input: &str) -> Result<(SourceTable, Vec<TableWarning>)> {
    let records = json::extract_records(input, "peeringdb-net")?;
    build_table(records, &PEERINGDB_COLUMNS, &[], "peeringdb-net")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{AsnId, Value};

    #[test]
    fn parses_net_records() {
        let input = r#"{"data": [
            {"id": 905, "asn": 64496, "name": "Example Net", "aka": "",
             "info_traffic": "100-1000Mbps", "info_prefixes4": 120, "info_prefixes6": 30,
             "info_unicast": true, "info_multicast": false, "info_ipv6": true,
             "policy_general": "Open", "policy_ratio": false,
             "fac_count": 4, "ix_count": 2, "org_id": 300,
             "created": "2010-07-29T00:00:00Z", "updated": "2024-05-01T12:00:00Z",
             "info_types": ["NSP", "Content"], "status": "ok"}
        ]}"#;
        let (table, warnings) = parse_peeringdb(input).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        let asn = AsnId::new(64496).unwrap();
        assert_eq!(table.value(asn, "fac_count"), Some(&Value::Int(4)));
        assert_eq!(table.value(asn, "aka"), Some(&Value::Missing));
        assert_eq!(
            table.value(asn, "info_types"),
            Some(&Value::Text("NSP;Content".into()))
        );
        assert_eq!(
            table.value(asn, "created"),
            Some(&Value::Timestamp(1280361600))
        );
        assert_eq!(table.value(asn, "info_unicast"), Some(&Value::Bool(true)));
        // net id 905 is kept as a numeric column of its own
        assert_eq!(table.value(asn, "id"), Some(&Value::Int(905)));
    }

    #[test]
    fn asn_zero_is_rejected_with_warning() {
        let input = r#"[{"asn": 0, "name": "bogon"}, {"asn": 7, "name": "ok"}]"#;
        let (table, warnings) = parse_peeringdb(input).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].message.contains("no usable ASN"));
    }
}
