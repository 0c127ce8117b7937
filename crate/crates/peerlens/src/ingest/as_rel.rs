//! Parser for the pipe-delimited AS-relationship format.
//!
//! Data lines look like `64496|64511|0` (peer) or `64496|64511|-1`
//! (first ASN is a provider of the second). Lines starting with `#` are
//! comments. Some exports append extra fields (e.g. an inference source);
//! anything past the third field is ignored.

use crate::error::{Error, Result};
use crate::types::{AsnId, RelKind, RelationshipRecord};

/// A data line that could not be turned into a relationship. The parse
/// continues past these; callers decide whether any rejects are fatal.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedLine {
    /// One-based line number in the input.
    pub line: usize,
    pub content: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRelationships {
    pub records: Vec<RelationshipRecord>,
    pub rejected: Vec<RejectedLine>,
}

pub fn parse_as_rel(input: &str) -> Result<ParsedRelationships> {
    let mut records = Vec::new();
    let mut rejected = Vec::new();
    let mut saw_data_line = false;

    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        saw_data_line = true;
        match parse_line(text) {
            Ok(record) => records.push(record),
            Err(reason) => rejected.push(RejectedLine {
                line,
                content: text.to_string(),
                reason,
            }),
        }
    }

    if !saw_data_line {
        return Err(Error::EmptyInput(
            "relationship input has no data lines".into(),
        ));
    }
    Ok(ParsedRelationships { records, rejected })
}

fn parse_line(text: &str) -> std::result::Result<RelationshipRecord, String> {
    let mut fields = text.split('|');
    let a = fields.next().ok_or("missing first ASN")?;
    let b = fields.next().ok_or_else(|| "missing second ASN".to_string())?;
    let code = fields.next().ok_or_else(|| "missing relationship code".to_string())?;

    let asn_a: AsnId = a.parse().map_err(|_| format!("bad ASN {a:?}"))?;
    let asn_b: AsnId = b.parse().map_err(|_| format!("bad ASN {b:?}"))?;
    let kind = match code.trim() {
        "0" => RelKind::Peer,
        "-1" => RelKind::ProviderCustomer,
        other => return Err(format!("unknown relationship code {other:?}")),
    };
    RelationshipRecord::new(asn_a, asn_b, kind).map_err(|e| e.to_string())
}
