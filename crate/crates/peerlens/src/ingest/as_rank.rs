//! AS-Rank ingest.
//!
//! Accepts either a flat export whose keys match the catalog names or the
//! nested API shape (`asnDegree.total`, `cone.numberAsns`,
//! `organization.orgName`, ...). For each column the listed paths are tried
//! in order and the first present one wins.

use crate::catalog::AS_RANK_COLUMNS;
use crate::error::Result;
use crate::ingest::json::{self, build_table};
use crate::ingest::table::{SourceTable, TableWarning};

#[rustfmt::skip]
const PATHS: [(&str, &[&str]); 18] = [
    ("asn",           &["asn"]),
    ("total",         &["total", "asnDegree.total"]),
    ("customer",      &["customer", "asnDegree.customer"]),
    ("peer",          &["peer", "asnDegree.peer"]),
    ("provider",      &["provider", "asnDegree.provider"]),
    ("asnName",       &["asnName"]),
    ("Clique-Member", &["Clique-Member", "cliqueMember"]),
    ("NumberASNs",    &["NumberASNs", "cone.numberAsns"]),
    ("NumberPrefix",  &["NumberPrefix", "cone.numberPrefixes"]),
    ("NumberAddrs",   &["NumberAddrs", "cone.numberAddresses"]),
    ("Country",       &["Country", "country.iso", "country"]),
    ("IXP",           &["IXP", "ixp"]),
    ("Latitude",      &["Latitude", "latitude"]),
    ("Longitude",     &["Longitude", "longitude"]),
    ("Org",           &["Org", "organization.orgName"]),
    ("Rank",          &["Rank", "rank"]),
    ("Seen",          &["Seen", "seen"]),
    ("Source",        &["Source", "source"]),
];

/// Parses an AS-Rank dump (JSON array, API envelope, or JSON Lines) into a
/// table aligned with [`AS_RANK_COLUMNS`]. Records without a usable ASN and
/// duplicate ASNs are skipped with a warning; unreadable fields become
/// missing cells with a warning.
pub fn parse_as_rank(input: &str) -> Result<(SourceTable, Vec<TableWarning>)> {
    let records = json::extract_records(input, "as-rank")?;
    build_table(records, &AS_RANK_COLUMNS, &PATHS, "as-rank")
}
