//! Shared machinery for the two JSON sources: envelope unwrapping, field
//! lookup by dotted path, and coercion of JSON values into typed cells.

use serde_json::Value as Json;

use crate::error::{Error, Result};
use crate::types::{parse_timestamp, ColumnKind, Value};

/// Extracts the record objects from a source file. Accepts, in order of
/// detection:
///
/// * a JSON array of objects,
/// * an API envelope: an object whose `data` field is an array, an object
///   with a GraphQL-style `data.<key>.edges[].node` layout, or a single-key
///   wrapper around either,
/// * JSON Lines, one object per line.
pub fn extract_records(input: &str, source: &str) -> Result<Vec<serde_json::Map<String, Json>>> {
    let trimmed = input.trim();
    if trimmed.is_empty() {
        return Err(Error::EmptyInput(format!("{source}: no content")));
    }

    // Anything that parses as one JSON value is not multi-record JSON
    // Lines, so the whole-file interpretation always wins when it succeeds.
    if let Ok(whole) = serde_json::from_str::<Json>(trimmed) {
        return records_from_value(whole, source);
    }

    let mut records = Vec::new();
    for (idx, line) in trimmed.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match serde_json::from_str::<Json>(line) {
            Ok(Json::Object(map)) => records.push(map),
            Ok(other) => {
                return Err(Error::Parse {
                    file: source.into(),
                    line: idx + 1,
                    msg: format!("expected a JSON object, got {}", json_kind(&other)),
                })
            }
            Err(e) => {
                return Err(Error::Parse {
                    file: source.into(),
                    line: idx + 1,
                    msg: e.to_string(),
                })
            }
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyInput(format!("{source}: no records")));
    }
    Ok(records)
}

fn records_from_value(value: Json, source: &str) -> Result<Vec<serde_json::Map<String, Json>>> {
    let list = unwrap_envelope(value, source, 0)?;
    let mut records = Vec::with_capacity(list.len());
    for (idx, item) in list.into_iter().enumerate() {
        // GraphQL edge lists wrap each record as {"node": {...}}
        let item = match item {
            Json::Object(mut map) if map.len() == 1 && map.contains_key("node") => {
                map.remove("node").unwrap()
            }
            other => other,
        };
        match item {
            Json::Object(map) => records.push(map),
            other => {
                return Err(Error::Parse {
                    file: source.into(),
                    line: idx + 1,
                    msg: format!("expected a JSON object, got {}", json_kind(&other)),
                })
            }
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyInput(format!("{source}: no records")));
    }
    Ok(records)
}

fn unwrap_envelope(value: Json, source: &str, depth: usize) -> Result<Vec<Json>> {
    if depth > 4 {
        return Err(Error::Parse {
            file: source.into(),
            line: 0,
            msg: "could not find a record array in the envelope".into(),
        });
    }
    match value {
        Json::Array(items) => Ok(items),
        Json::Object(mut map) => {
            for key in ["data", "edges", "nodes"] {
                if let Some(inner) = map.remove(key) {
                    return unwrap_envelope(inner, source, depth + 1);
                }
            }
            if map.len() == 1 {
                let inner = map.into_iter().next().unwrap().1;
                return unwrap_envelope(inner, source, depth + 1);
            }
            // a plain object with several keys and no envelope marker is
            // taken to be a single record (the one-line JSON Lines case)
            Ok(vec![Json::Object(map)])
        }
        other => Err(Error::Parse {
            file: source.into(),
            line: 0,
            msg: format!("expected records, got {}", json_kind(&other)),
        }),
    }
}

/// Looks up a dotted path (`cone.numberAsns`) inside a record.
pub fn lookup<'a>(record: &'a serde_json::Map<String, Json>, path: &str) -> Option<&'a Json> {
    let mut segments = path.split('.');
    let mut current = record.get(segments.next()?)?;
    for seg in segments {
        current = current.as_object()?.get(seg)?;
    }
    Some(current)
}

/// Coerces one JSON value into a typed cell. Returns Err with a reason when
/// the value cannot be read as the column's kind; callers downgrade that to
/// a missing cell plus a warning. Empty strings and nulls are missing, not
/// values: both sources use them interchangeably for "unset".
pub fn coerce(value: &Json, kind: ColumnKind) -> std::result::Result<Value, String> {
    match value {
        Json::Null => return Ok(Value::Missing),
        Json::String(s) if s.trim().is_empty() => return Ok(Value::Missing),
        _ => {}
    }
    match kind {
        ColumnKind::Numeric => match value {
            Json::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Value::Int(i))
                } else {
                    Ok(Value::Real(n.as_f64().ok_or("unrepresentable number")?))
                }
            }
            Json::String(s) => {
                let s = s.trim();
                if let Ok(i) = s.parse::<i64>() {
                    Ok(Value::Int(i))
                } else if let Ok(f) = s.parse::<f64>() {
                    Ok(Value::Real(f))
                } else {
                    Err(format!("{s:?} is not numeric"))
                }
            }
            Json::Bool(_) => Err("boolean in a numeric column".into()),
            other => Err(format!("{} in a numeric column", json_kind(other))),
        },
        ColumnKind::Boolean => match value {
            Json::Bool(b) => Ok(Value::Bool(*b)),
            Json::Number(n) => match n.as_i64() {
                Some(0) => Ok(Value::Bool(false)),
                Some(1) => Ok(Value::Bool(true)),
                _ => Err(format!("{n} is not a 0/1 flag")),
            },
            Json::String(s) => match s.trim().to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => Ok(Value::Bool(true)),
                "false" | "no" | "0" => Ok(Value::Bool(false)),
                other => Err(format!("{other:?} is not a boolean")),
            },
            other => Err(format!("{} in a boolean column", json_kind(other))),
        },
        ColumnKind::Categorical => match value {
            Json::String(s) => Ok(Value::Text(s.clone())),
            Json::Number(n) => Ok(Value::Text(n.to_string())),
            Json::Bool(b) => Ok(Value::Text(b.to_string())),
            // list-valued fields (info_types, social_media) are kept as
            // one categorical token: a compact, order-preserving encoding
            Json::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|v| match v {
                        Json::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                if parts.is_empty() {
                    Ok(Value::Missing)
                } else {
                    Ok(Value::Text(parts.join(";")))
                }
            }
            other => Err(format!("{} in a categorical column", json_kind(other))),
        },
        ColumnKind::Datetime => match value {
            Json::String(s) => parse_timestamp(s)
                .map(Value::Timestamp)
                .ok_or_else(|| format!("{s:?} is not a timestamp")),
            Json::Number(n) => n
                .as_i64()
                .map(Value::Timestamp)
                .ok_or_else(|| format!("{n} is not an epoch second count")),
            other => Err(format!("{} in a datetime column", json_kind(other))),
        },
    }
}

/// Converts extracted record maps into a typed table. `paths` overrides the
/// lookup paths per column name; columns without an entry are looked up by
/// their catalog name alone. Record-level policy: no usable ASN or a
/// duplicate ASN skips the record with a warning, a present-but-unreadable
/// field becomes a missing cell with a warning, an absent field is silently
/// missing.
pub(crate) fn build_table(
    records: Vec<serde_json::Map<String, Json>>,
    columns: &'static [crate::catalog::ColumnDef],
    paths: &[(&str, &[&str])],
    source: &str,
) -> Result<(crate::ingest::table::SourceTable, Vec<crate::ingest::table::TableWarning>)> {
    use crate::ingest::table::{SourceRecord, SourceTable, TableWarning};
    use crate::types::AsnId;

    let paths_for = |name: &'static str| -> Vec<&str> {
        paths
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, p)| p.to_vec())
            .unwrap_or_else(|| vec![name])
    };

    let mut table = SourceTable::new(columns);
    let mut warnings = Vec::new();

    for (idx, record) in records.iter().enumerate() {
        let asn = paths_for("asn")
            .iter()
            .find_map(|p| lookup(record, p))
            .and_then(|v| match coerce(v, ColumnKind::Numeric) {
                Ok(Value::Int(i)) => u32::try_from(i).ok().and_then(|r| AsnId::new(r).ok()),
                _ => None,
            });
        let Some(asn) = asn else {
            warnings.push(TableWarning {
                record: idx,
                asn: None,
                message: format!("{source}: record {idx} has no usable ASN, skipped"),
            });
            continue;
        };

        let mut values = Vec::with_capacity(columns.len());
        for def in columns {
            let cell = if def.name == "asn" {
                Value::Int(asn.get() as i64)
            } else {
                match paths_for(def.name).iter().find_map(|p| lookup(record, p)) {
                    None => Value::Missing,
                    Some(raw) => match coerce(raw, def.kind) {
                        Ok(v) => v,
                        Err(reason) => {
                            warnings.push(TableWarning {
                                record: idx,
                                asn: Some(asn),
                                message: format!(
                                    "{source}: AS{asn} field {}: {reason}; treated as missing",
                                    def.name
                                ),
                            });
                            Value::Missing
                        }
                    },
                }
            };
            values.push(cell);
        }

        if !table.push(SourceRecord { asn, values }) {
            warnings.push(TableWarning {
                record: idx,
                asn: Some(asn),
                message: format!("{source}: duplicate ASN {asn}, keeping the first record"),
            });
        }
    }

    if table.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{source}: no records with a usable ASN"
        )));
    }
    Ok((table, warnings))
}

fn json_kind(v: &Json) -> &'static str {
    match v {
        Json::Null => "null",
        Json::Bool(_) => "a boolean",
        Json::Number(_) => "a number",
        Json::String(_) => "a string",
        Json::Array(_) => "an array",
        Json::Object(_) => "an object",
    }
}
