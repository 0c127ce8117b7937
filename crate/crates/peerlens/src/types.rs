//! Core domain types shared across the pipeline.

use std::fmt;

use chrono::{DateTime, SecondsFormat, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Autonomous system number. Valid ASNs are 1..=u32::MAX; zero is reserved
/// and rejected at construction.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct AsnId(u32);

impl AsnId {
    pub fn new(raw: u32) -> Result<Self> {
        if raw == 0 {
            return Err(Error::InvalidArgument("ASN 0 is reserved".into()));
        }
        Ok(AsnId(raw))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for AsnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for AsnId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let raw: u32 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("not an ASN: {s:?}")))?;
        AsnId::new(raw)
    }
}

/// One cell of a source table. `Missing` is a first-class state: both data
/// sources leave fields unset, and the whole pipeline must carry that fact
/// through to the learner rather than papering over it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Missing,
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
    /// Seconds since the Unix epoch, UTC.
    Timestamp(i64),
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    /// Canonical text form used when a value lands in a categorical column.
    /// Missing has no text form.
    pub fn text_form(&self) -> Option<String> {
        match self {
            Value::Missing => None,
            Value::Int(v) => Some(v.to_string()),
            Value::Real(v) => Some(v.to_string()),
            Value::Bool(v) => Some(v.to_string()),
            Value::Text(v) => Some(v.clone()),
            Value::Timestamp(secs) => Some(format_timestamp(*secs)),
        }
    }
}

/// How a column is interpreted by the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    /// Passed through as f64.
    Numeric,
    /// false -> 0.0, true -> 1.0.
    Boolean,
    /// Free text, label-encoded against a fitted vocabulary.
    Categorical,
    /// Unix seconds passed through as f64.
    Datetime,
}

/// Relationship class from the AS-relationship source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelKind {
    /// Settlement-free peering (code 0 in the serial format).
    Peer,
    /// `asn_a` sells transit to `asn_b` (code -1).
    ProviderCustomer,
}

/// One edge of the relationship file. For `Peer` the endpoints are stored
/// with `asn_a < asn_b`; for `ProviderCustomer` the order is meaningful
/// (provider first) and preserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelationshipRecord {
    pub asn_a: AsnId,
    pub asn_b: AsnId,
    pub kind: RelKind,
}

impl RelationshipRecord {
    pub fn new(asn_a: AsnId, asn_b: AsnId, kind: RelKind) -> Result<Self> {
        if asn_a == asn_b {
            return Err(Error::SelfPair(asn_a));
        }
        let (asn_a, asn_b) = match kind {
            RelKind::Peer => (asn_a.min(asn_b), asn_a.max(asn_b)),
            RelKind::ProviderCustomer => (asn_a, asn_b),
        };
        Ok(RelationshipRecord { asn_a, asn_b, kind })
    }

    /// Unordered endpoint pair, lower ASN first. Two records describe the
    /// same AS pair iff their keys match, whatever the edge direction.
    pub fn pair_key(&self) -> (AsnId, AsnId) {
        (self.asn_a.min(self.asn_b), self.asn_a.max(self.asn_b))
    }
}

/// A point of presence: a colocation facility or an exchange point. The
/// two id spaces are independent, so the kind is part of the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopId {
    Facility(u64),
    Ixp(u64),
}

impl fmt::Display for PopId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PopId::Facility(id) => write!(f, "F{id}"),
            PopId::Ixp(id) => write!(f, "X{id}"),
        }
    }
}

impl std::str::FromStr for PopId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::InvalidArgument(format!("not a PoP id: {s:?}"));
        let (tag, digits) = s.split_at(1.min(s.len()));
        let id: u64 = digits.parse().map_err(|_| err())?;
        match tag {
            "F" => Ok(PopId::Facility(id)),
            "X" => Ok(PopId::Ixp(id)),
            _ => Err(err()),
        }
    }
}

/// Explicit per-AS point-of-presence sets. Optional in a snapshot: when
/// absent, pair arithmetic falls back to the per-AS facility and exchange
/// counts carried in the PeeringDB table.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopMemberships(pub std::collections::BTreeMap<AsnId, std::collections::BTreeSet<PopId>>);

impl PopMemberships {
    pub fn sets(&self) -> &std::collections::BTreeMap<AsnId, std::collections::BTreeSet<PopId>> {
        &self.0
    }
}

/// RFC 3339 with seconds precision, UTC: the single timestamp syntax used
/// in cached CSV tables.
pub fn format_timestamp(secs: i64) -> String {
    match Utc.timestamp_opt(secs, 0) {
        chrono::LocalResult::Single(dt) => dt.to_rfc3339_opts(SecondsFormat::Secs, true),
        _ => secs.to_string(),
    }
}

/// Accepts RFC 3339 (`2010-07-29T00:00:00Z`), a bare date (`2010-07-29`,
/// read as midnight UTC), or raw epoch seconds.
pub fn parse_timestamp(s: &str) -> Option<i64> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    if let Ok(d) = chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(d.and_hms_opt(0, 0, 0)?.and_utc().timestamp());
    }
    s.parse::<i64>().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asn_zero_rejected() {
        assert!(AsnId::new(0).is_err());
        assert!(AsnId::new(1).is_ok());
    }

    #[test]
    fn peer_records_canonicalize_endpoint_order() {
        let a = AsnId::new(20).unwrap();
        let b = AsnId::new(3).unwrap();
        let r = RelationshipRecord::new(a, b, RelKind::Peer).unwrap();
        assert_eq!((r.asn_a, r.asn_b), (b, a));

        let pc = RelationshipRecord::new(a, b, RelKind::ProviderCustomer).unwrap();
        assert_eq!((pc.asn_a, pc.asn_b), (a, b), "provider order is preserved");
        assert_eq!(pc.pair_key(), (b, a));
    }

    #[test]
    fn self_pair_rejected() {
        let a = AsnId::new(5).unwrap();
        assert!(matches!(
            RelationshipRecord::new(a, a, RelKind::Peer),
            Err(Error::SelfPair(_))
        ));
    }

    #[test]
    fn pop_id_round_trip() {
        for pop in [PopId::Facility(12), PopId::Ixp(3)] {
            assert_eq!(pop.to_string().parse::<PopId>().unwrap(), pop);
        }
        assert!("Q7".parse::<PopId>().is_err());
        assert!("F".parse::<PopId>().is_err());
        // facilities and exchanges with the same id are distinct
        assert_ne!(PopId::Facility(3), PopId::Ixp(3));
    }

    #[test]
    fn timestamp_round_trip() {
        let secs = parse_timestamp("2010-07-29T00:00:00Z").unwrap();
        assert_eq!(format_timestamp(secs), "2010-07-29T00:00:00Z");
        assert_eq!(parse_timestamp("2010-07-29"), Some(secs));
        assert_eq!(parse_timestamp(&secs.to_string()), Some(secs));
        assert_eq!(parse_timestamp("not a date"), None);
    }
}
