//! Frozen column catalogs for the two data sources and the derived
//! feature variants.
//!
//! The lists below are load-bearing: cached tables, trained models, and the
//! drop experiment all key on these exact names in this exact order.
//! Changing them invalidates every schema fingerprint, so they are spelled
//! out literally and pinned by tests rather than built programmatically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::ColumnKind;

/// Name and interpretation of one source column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnDef {
    pub name: &'static str,
    pub kind: ColumnKind,
}

const fn col(name: &'static str, kind: ColumnKind) -> ColumnDef {
    ColumnDef { name, kind }
}

use ColumnKind::{Boolean, Categorical, Datetime, Numeric};

/// Per-AS fields taken from the AS-Rank export.
pub const AS_RANK_COLUMNS: [ColumnDef; 18] = [
    col("asn", Numeric),
    col("total", Numeric),
    col("customer", Numeric),
    col("peer", Numeric),
    col("provider", Numeric),
    col("asnName", Categorical),
    col("Clique-Member", Boolean),
    col("NumberASNs", Numeric),
    col("NumberPrefix", Numeric),
    col("NumberAddrs", Numeric),
    col("Country", Categorical),
    col("IXP", Numeric),
    col("Latitude", Numeric),
    col("Longitude", Numeric),
    col("Org", Categorical),
    col("Rank", Numeric),
    col("Seen", Boolean),
    col("Source", Categorical),
];

/// Per-network fields taken from the PeeringDB `net` table.
pub const PEERINGDB_COLUMNS: [ColumnDef; 40] = [
    col("asn", Numeric),
    col("id", Numeric),
    col("status", Categorical),
    col("looking_glass", Categorical),
    col("route_server", Categorical),
    col("fac_count", Numeric),
    col("netixlan_updated", Datetime),
    col("info_ratio", Categorical),
    col("policy_ratio", Boolean),
    col("status_dashboard", Categorical),
    col("info_unicast", Boolean),
    col("rir_status", Categorical),
    col("created", Datetime),
    col("name_long", Categorical),
    col("policy_general", Categorical),
    col("website", Categorical),
    col("allow_ixp_update", Boolean),
    col("updated", Datetime),
    col("info_types", Categorical),
    col("rir_status_updated", Datetime),
    col("netfac_updated", Datetime),
    col("info_traffic", Categorical),
    col("info_multicast", Boolean),
    col("policy_locations", Categorical),
    col("name", Categorical),
    col("info_scope", Categorical),
    col("notes", Categorical),
    col("ix_count", Numeric),
    col("org_id", Numeric),
    col("policy_url", Categorical),
    col("info_never_via_route_servers", Boolean),
    col("poc_updated", Datetime),
    col("info_type", Categorical),
    col("social_media", Categorical),
    col("policy_contracts", Categorical),
    col("info_prefixes6", Numeric),
    col("aka", Categorical),
    col("info_prefixes4", Numeric),
    col("info_ipv6", Boolean),
    col("irr_as_set", Categorical),
];

/// Columns dropped from the merged table before training: fields that are
/// near-constant across networks, administrative flags, or duplicates of
/// information carried elsewhere.
pub const REMOVED_COLUMNS: [&str; 15] = [
    "Clique-Member",
    "IXP",
    "Seen",
    "status",
    "policy_ratio",
    "info_unicast",
    "rir_status",
    "policy_general",
    "rir_status_updated",
    "route_server",
    "status_dashboard",
    "info_multicast",
    "policy_contracts",
    "info_never_via_route_servers",
    "info_ipv6",
];

/// Compact per-AS subset: the most informative columns, ordered by
/// importance. All are numeric-valued, which also makes this the variant
/// of choice when categorical vocabularies cannot be shared across
/// snapshots.
pub const FILTERED_COLUMNS: [&str; 16] = [
    "customer",
    "peer",
    "NumberAddrs",
    "NumberPrefix",
    "total",
    "Rank",
    "NumberASNs",
    "info_prefixes4",
    "ix_count",
    "info_prefixes6",
    "fac_count",
    "provider",
    "asn",
    "Latitude",
    "created",
    "Longitude",
];

/// Pair-level columns appended by the `optimum` variant, derived from the
/// relationship graph and point-of-presence sets rather than from either
/// per-AS source.
pub const PAIR_EXTRA_COLUMNS: [ColumnDef; 2] = [
    col("cone_overlap", Numeric),
    col("affinity_score", Numeric),
];

/// Full `default`-variant column list ordered least informative first, as
/// measured on the full table; drives the sequential drop experiment. The
/// final sixteen entries are exactly [`FILTERED_COLUMNS`] (most informative
/// last).
pub const LEAST_IMPORTANT_FIRST: [&str; 41] = [
    "allow_ixp_update",
    "name_long",
    "info_type",
    "info_ratio",
    "notes",
    "info_types",
    "policy_url",
    "info_scope",
    "Source",
    "policy_locations",
    "aka",
    "asnName",
    "looking_glass",
    "name",
    "Country",
    "website",
    "poc_updated",
    "irr_as_set",
    "Org",
    "info_traffic",
    "netfac_updated",
    "netixlan_updated",
    "social_media",
    "updated",
    "org_id",
    "Longitude",
    "created",
    "Latitude",
    "asn",
    "provider",
    "fac_count",
    "info_prefixes6",
    "ix_count",
    "info_prefixes4",
    "NumberASNs",
    "Rank",
    "total",
    "NumberPrefix",
    "NumberAddrs",
    "peer",
    "customer",
];

/// Which per-AS feature set a dataset is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Merged table minus [`REMOVED_COLUMNS`]: 41 columns per AS.
    Default,
    /// [`FILTERED_COLUMNS`]: 16 columns per AS.
    Filtered,
    /// `filtered` plus the two [`PAIR_EXTRA_COLUMNS`] per pair.
    Optimum,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Default, Variant::Filtered, Variant::Optimum];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Default => "default",
            Variant::Filtered => "filtered",
            Variant::Optimum => "optimum",
        }
    }

    /// Width of one assembled pair row.
    pub fn pair_width(self) -> usize {
        match self {
            Variant::Default => 2 * per_as_columns(self).len(),
            Variant::Filtered => 2 * per_as_columns(self).len(),
            Variant::Optimum => 2 * per_as_columns(self).len() + PAIR_EXTRA_COLUMNS.len(),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Variant::Default),
            "filtered" => Ok(Variant::Filtered),
            "optimum" => Ok(Variant::Optimum),
            other => Err(Error::InvalidArgument(format!(
                "unknown variant {other:?}; expected default, filtered, or optimum"
            ))),
        }
    }
}

/// Looks a column up by name in either source catalog. AS-Rank wins on the
/// (nonexistent) shared names so the merge below stays well defined.
pub fn source_column(name: &str) -> Option<&'static ColumnDef> {
    AS_RANK_COLUMNS
        .iter()
        .find(|c| c.name == name)
        .or_else(|| PEERINGDB_COLUMNS.iter().find(|c| c.name == name))
}

/// The merged per-AS table: all AS-Rank columns, then all PeeringDB columns
/// except `asn` (already present) and `id` (a PeeringDB-internal row id).
pub fn merged_columns() -> Vec<&'static ColumnDef> {
    AS_RANK_COLUMNS
        .iter()
        .chain(
            PEERINGDB_COLUMNS
                .iter()
                .filter(|c| c.name != "asn" && c.name != "id"),
        )
        .collect()
}

/// Per-AS columns for a variant, in schema order.
pub fn per_as_columns(variant: Variant) -> Vec<&'static ColumnDef> {
    match variant {
        Variant::Default => merged_columns()
            .into_iter()
            .filter(|c| !REMOVED_COLUMNS.contains(&c.name))
            .collect(),
        Variant::Filtered | Variant::Optimum => FILTERED_COLUMNS
            .iter()
            .map(|name| source_column(name).expect("filtered column exists in a source catalog"))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn catalog_sizes() {
        assert_eq!(AS_RANK_COLUMNS.len(), 18);
        assert_eq!(PEERINGDB_COLUMNS.len(), 40);
        assert_eq!(merged_columns().len(), 56);
        assert_eq!(per_as_columns(Variant::Default).len(), 41);
        assert_eq!(per_as_columns(Variant::Filtered).len(), 16);
        assert_eq!(per_as_columns(Variant::Optimum).len(), 16);
        assert_eq!(Variant::Default.pair_width(), 82);
        assert_eq!(Variant::Filtered.pair_width(), 32);
        assert_eq!(Variant::Optimum.pair_width(), 34);
    }

    #[test]
    fn no_duplicate_names_in_any_list() {
        for names in [
            AS_RANK_COLUMNS.iter().map(|c| c.name).collect::<Vec<_>>(),
            PEERINGDB_COLUMNS.iter().map(|c| c.name).collect(),
            merged_columns().iter().map(|c| c.name).collect(),
            REMOVED_COLUMNS.to_vec(),
            FILTERED_COLUMNS.to_vec(),
            LEAST_IMPORTANT_FIRST.to_vec(),
        ] {
            let set: BTreeSet<_> = names.iter().collect();
            assert_eq!(set.len(), names.len(), "duplicate in {names:?}");
        }
    }

    #[test]
    fn removed_columns_exist_in_merged_table() {
        let merged: BTreeSet<_> = merged_columns().iter().map(|c| c.name).collect();
        for name in REMOVED_COLUMNS {
            assert!(merged.contains(name), "{name} not in merged table");
        }
    }

    #[test]
    fn filtered_is_subset_of_default() {
        let default: BTreeSet<_> = per_as_columns(Variant::Default)
            .iter()
            .map(|c| c.name)
            .collect();
        for name in FILTERED_COLUMNS {
            assert!(default.contains(name), "{name} not in default variant");
        }
    }

    #[test]
    fn filtered_columns_are_all_numeric_or_datetime() {
        // Guarantees the filtered and optimum variants never need a fitted
        // categorical vocabulary, so their schemas transfer across snapshots.
        for def in per_as_columns(Variant::Filtered) {
            assert!(
                matches!(def.kind, ColumnKind::Numeric | ColumnKind::Datetime),
                "{} is {:?}",
                def.name,
                def.kind
            );
        }
    }

    #[test]
    fn drop_order_is_permutation_of_default_columns() {
        let default: BTreeSet<_> = per_as_columns(Variant::Default)
            .iter()
            .map(|c| c.name)
            .collect();
        let order: BTreeSet<_> = LEAST_IMPORTANT_FIRST.iter().copied().collect();
        assert_eq!(default, order);
        assert_eq!(LEAST_IMPORTANT_FIRST.len(), 41);
    }

    #[test]
    fn drop_order_tail_is_the_filtered_set() {
        let tail: BTreeSet<_> = LEAST_IMPORTANT_FIRST[41 - 16..].iter().copied().collect();
        let filtered: BTreeSet<_> = FILTERED_COLUMNS.iter().copied().collect();
        assert_eq!(tail, filtered);
    }

    #[test]
    fn variant_round_trips_through_strings() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        assert!("optimal".parse::<Variant>().is_err());
    }
}
