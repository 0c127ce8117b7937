//! Synthetic snapshot generator.
//!
//! Produces a self-consistent world that exercises every pipeline stage:
//!
//! * a provider hierarchy grown by preferential attachment, with a small
//!   set of roots and occasional multi-homing;
//! * point-of-presence sets inherited downward, each AS occupying a subset
//!   of its providers' sites, so a provider-customer pair never has a PoP
//!   advantage over its own customer cone (their affinity is exactly zero);
//! * peer edges planted on the non-adjacent pairs that look most like real
//!   peers: high PoP affinity, similar degree, overlapping cones;
//! * per-AS features filled in for every catalog column, correlated with
//!   the topology (cone size drives rank, prefix counts, traffic class,
//!   account age) and sprinkled with realistic missingness;
//! * PeeringDB covering only most ASes, so the source intersection is a
//!   proper subset, as with the real feeds.
//!
//! The same `(n_as, seed, params)` triple always yields an identical
//! snapshot, which the determinism tests rely on.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::{AS_RANK_COLUMNS, PEERINGDB_COLUMNS};
use crate::cone::affinity::affinity_from_counts;
use crate::error::{Error, Result};
use crate::ingest::snapshot::{build_snapshot, Snapshot};
use crate::ingest::table::{SourceRecord, SourceTable};
use crate::seed;
use crate::types::{AsnId, PopId, PopMemberships, RelKind, RelationshipRecord, Value};

#[derive(Debug, Clone)]
pub struct SynthParams {
    pub date: NaiveDate,
    /// Target fraction of peer pairs among all labeled pairs.
    pub peer_ratio: f64,
    /// Probability that an AS buys transit from a second provider.
    pub multi_home_prob: f64,
    /// Fraction of ASes that also appear in the PeeringDB table.
    pub coverage: f64,
    /// Minimum PoP affinity for a pair to be eligible as a planted peer.
    /// Provider-customer pairs sit at exactly zero, so this is the margin
    /// separating the two classes.
    pub affinity_floor: f64,
    /// Scales how often optional PeeringDB cells are missing: 1 is the
    /// realistic default, 0 produces a fully present table.
    pub missing_scale: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            date: NaiveDate::from_ymd_opt(2024, 6, 1).unwrap(),
            peer_ratio: 0.83,
            multi_home_prob: 0.15,
            coverage: 0.9,
            affinity_floor: 0.05,
            missing_scale: 1.0,
        }
    }
}

/// Generates a snapshot of `n_as` autonomous systems numbered from 1.
pub fn synth_snapshot(n_as: usize, seed_value: u64, params: &SynthParams) -> Result<Snapshot> {
    if n_as < 10 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10 ASes to build a meaningful topology, got {n_as}"
        )));
    }
    if !(params.peer_ratio > 0.0 && params.peer_ratio < 1.0) {
        return Err(Error::InvalidArgument("peer_ratio must be in (0, 1)".into()));
    }
    if !(params.coverage > 0.0 && params.coverage <= 1.0) {
        return Err(Error::InvalidArgument("coverage must be in (0, 1]".into()));
    }
    if !(0.0..1.0).contains(&params.multi_home_prob) {
        return Err(Error::InvalidArgument("multi_home_prob must be in [0, 1)".into()));
    }

    let n = n_as as u32;
    let roots = (n_as / 50).max(1) as u32;

    // provider hierarchy: nodes above `roots` attach to 1..2 lower-numbered
    // providers, preferring those that already have many customers
    let mut rng = seed::rng(seed_value, "synth/tree", 0);
    let mut customers: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut providers: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for i in (roots + 1)..=n {
        let weights: Vec<f64> = (1..i)
            .map(|j| 1.0 + 2.0 * customers.get(&j).map_or(0, Vec::len) as f64)
            .collect();
        let first = 1 + weighted_choice(&mut rng, &weights) as u32;
        customers.entry(first).or_default().push(i);
        providers.entry(i).or_default().push(first);
        if rng.random::<f64>() < params.multi_home_prob {
            let second = 1 + weighted_choice(&mut rng, &weights) as u32;
            if second != first {
                customers.entry(second).or_default().push(i);
                providers.entry(i).or_default().push(second);
            }
        }
    }

    // customer cones; customers always have higher numbers than providers,
    // so a descending sweep sees every customer's cone before its provider
    let mut cones: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for i in (1..=n).rev() {
        let mut cone: BTreeSet<u32> = BTreeSet::from([i]);
        for &c in customers.get(&i).into_iter().flatten() {
            cone.extend(cones[&c].iter().copied());
        }
        cones.insert(i, cone);
    }

    // point-of-presence sets, inherited downward: roots pick from global
    // pools, everyone else occupies a subset of the sites shared by all of
    // its providers
    let n_fac = (n_as / 20).max(6);
    let n_ix = (n_as / 40).max(3);
    let mut rng = seed::rng(seed_value, "synth/pops", 0);
    let fac_weights: Vec<f64> = (0..n_fac).map(|k| (n_fac - k) as f64).collect();
    let ix_weights: Vec<f64> = (0..n_ix).map(|k| (n_ix - k) as f64).collect();
    let mut pops: BTreeMap<u32, BTreeSet<PopId>> = BTreeMap::new();
    for i in 1..=n {
        let set: BTreeSet<PopId> = if i <= roots {
            let fac_cnt = rng.random_range(3..=6.min(n_fac));
            let ix_cnt = rng.random_range(1..=3.min(n_ix));
            weighted_sample_distinct(&mut rng, &fac_weights, fac_cnt)
                .into_iter()
                .map(|k| PopId::Facility(k as u64))
                .chain(
                    weighted_sample_distinct(&mut rng, &ix_weights, ix_cnt)
                        .into_iter()
                        .map(|k| PopId::Ixp(k as u64)),
                )
                .collect()
        } else {
            let parents = &providers[&i];
            let mut pool = pops[&parents[0]].clone();
            for p in &parents[1..] {
                pool = pool.intersection(&pops[p]).copied().collect();
            }
            pool.into_iter()
                .filter(|_| rng.random::<f64>() < 0.65)
                .collect()
        };
        pops.insert(i, set);
    }

    // PeeringDB coverage
    let mut rng = seed::rng(seed_value, "synth/coverage", 0);
    let covered: BTreeSet<u32> = (1..=n)
        .filter(|_| rng.random::<f64>() < params.coverage)
        .collect();
    if covered.is_empty() {
        return Err(Error::InvalidArgument(
            "coverage too low: no AS landed in the PeeringDB table".into(),
        ));
    }

    // planted peers: among covered, non-adjacent pairs with PoP affinity at
    // or above the floor, rank by how much the pair looks like a real peer
    // (shared sites, similar degree, overlapping cones) and take enough
    // from the top to hit the target class ratio
    let pc_degree = |i: u32| {
        customers.get(&i).map_or(0, Vec::len) + providers.get(&i).map_or(0, Vec::len)
    };
    let adjacent: BTreeSet<(u32, u32)> = customers
        .iter()
        .flat_map(|(&p, cs)| cs.iter().map(move |&c| (p.min(c), p.max(c))))
        .collect();
    let retained_pc = adjacent
        .iter()
        .filter(|(a, b)| covered.contains(a) && covered.contains(b))
        .count();

    let mut candidates: Vec<(f64, u32, u32)> = Vec::new();
    let covered_vec: Vec<u32> = covered.iter().copied().collect();
    for (ai, &a) in covered_vec.iter().enumerate() {
        for &b in &covered_vec[ai + 1..] {
            if adjacent.contains(&(a, b)) {
                continue;
            }
            let (pa, pb) = (&pops[&a], &pops[&b]);
            let common = pa.intersection(pb).count() as u64;
            let score = affinity_from_counts(pa.len() as u64, pb.len() as u64, common)
                .expect("intersection cannot exceed either set")
                .score;
            if score < params.affinity_floor {
                continue;
            }
            let overlap = cones[&a].intersection(&cones[&b]).count();
            let min_cone = cones[&a].len().min(cones[&b].len());
            let (da, db) = (pc_degree(a), pc_degree(b));
            let degree_sim = (da.min(db) as f64) / (1.0 + da.max(db) as f64);
            let planted = 2.0 * score + overlap as f64 / (1.0 + min_cone as f64) + degree_sim;
            candidates.push((planted, a, b));
        }
    }
    candidates.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .expect("planted scores are finite")
            .then(x.1.cmp(&y.1))
            .then(x.2.cmp(&y.2))
    });
    let target = (params.peer_ratio / (1.0 - params.peer_ratio) * retained_pc as f64).round();
    let n_peers = (target as usize).min(candidates.len());
    let peers: Vec<(u32, u32)> = candidates[..n_peers].iter().map(|&(_, a, b)| (a, b)).collect();

    // degrees including peers, then per-AS records
    let mut peer_degree: BTreeMap<u32, usize> = BTreeMap::new();
    for &(a, b) in &peers {
        *peer_degree.entry(a).or_default() += 1;
        *peer_degree.entry(b).or_default() += 1;
    }
    let mut rank_order: Vec<u32> = (1..=n).collect();
    rank_order.sort_by_key(|i| (std::cmp::Reverse(cones[i].len()), *i));
    let rank_of: BTreeMap<u32, usize> = rank_order
        .iter()
        .enumerate()
        .map(|(pos, &i)| (i, pos + 1))
        .collect();

    let mut rng = seed::rng(seed_value, "synth/attrs", 0);
    let mut as_rank = SourceTable::new(&AS_RANK_COLUMNS);
    let mut peeringdb = SourceTable::new(&PEERINGDB_COLUMNS);
    let date_epoch = params
        .date
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
        .timestamp();

    for i in 1..=n {
        let asn = AsnId::new(i).expect("ASNs start at 1");
        let n_customer = customers.get(&i).map_or(0, Vec::len) as i64;
        let n_provider = providers.get(&i).map_or(0, Vec::len) as i64;
        let n_peer = peer_degree.get(&i).copied().unwrap_or(0) as i64;
        let cone_size = cones[&i].len() as i64;
        let rank = rank_of[&i] as i64;
        let fac_count = pops[&i].iter().filter(|p| matches!(p, PopId::Facility(_))).count() as i64;
        let ix_count = pops[&i].len() as i64 - fac_count;

        let number_prefix = (cone_size as f64 * (1.5 + 4.5 * rng.random::<f64>())).round() as i64;
        let number_addrs =
            (number_prefix as f64 * 256.0 * (1.0 + 7.0 * rng.random::<f64>())).round() as i64;
        let latitude = -60.0 + 130.0 * rng.random::<f64>();
        let longitude = -180.0 + 360.0 * rng.random::<f64>();
        let country = pick(
            &mut rng,
            &["US", "DE", "GB", "BR", "JP", "AU", "IN", "ZA", "NL", "FR"],
        );
        let source = pick(&mut rng, &["ARIN", "RIPE", "APNIC", "LACNIC", "AFRINIC"]);
        let seen = rng.random::<f64>() < 0.98;

        let values = vec![
            Value::Int(i as i64),
            Value::Int(n_customer + n_provider + n_peer),
            Value::Int(n_customer),
            Value::Int(n_peer),
            Value::Int(n_provider),
            Value::Text(format!("AS{i}-NET")),
            Value::Bool(i <= roots),
            Value::Int(cone_size),
            Value::Int(number_prefix),
            Value::Int(number_addrs),
            Value::Text(country.into()),
            Value::Int(ix_count),
            Value::Real(latitude),
            Value::Real(longitude),
            Value::Text(format!("ORG-{}", 1 + i / 4)),
            Value::Int(rank),
            Value::Bool(seen),
            Value::Text(source.into()),
        ];
        debug_assert_eq!(values.len(), AS_RANK_COLUMNS.len());
        as_rank.push(SourceRecord { asn, values });

        if !covered.contains(&i) {
            // not in PeeringDB; still burn this record's PDB draws so that
            // coverage does not shift every later AS's attributes
            let _ = pdb_values(&mut rng, PdbInputs {
                i,
                rank_frac: (rank - 1) as f64 / n as f64,
                fac_count,
                ix_count,
                number_prefix,
                cone_size,
                n_customer,
                n_peer,
                date_epoch,
                missing_scale: params.missing_scale,
            });
            continue;
        }
        let values = pdb_values(&mut rng, PdbInputs {
            i,
            rank_frac: (rank - 1) as f64 / n as f64,
            fac_count,
            ix_count,
            number_prefix,
            cone_size,
            n_customer,
            n_peer,
            date_epoch,
            missing_scale: params.missing_scale,
        });
        debug_assert_eq!(values.len(), PEERINGDB_COLUMNS.len());
        peeringdb.push(SourceRecord { asn, values });
    }

    let mut relationships: Vec<RelationshipRecord> = Vec::new();
    for (&p, cs) in &customers {
        for &c in cs {
            relationships.push(
                RelationshipRecord::new(
                    AsnId::new(p).expect("valid"),
                    AsnId::new(c).expect("valid"),
                    RelKind::ProviderCustomer,
                )
                .expect("p != c by construction"),
            );
        }
    }
    for &(a, b) in &peers {
        relationships.push(
            RelationshipRecord::new(
                AsnId::new(a).expect("valid"),
                AsnId::new(b).expect("valid"),
                RelKind::Peer,
            )
            .expect("a < b by construction"),
        );
    }

    let memberships = PopMemberships(
        pops.into_iter()
            .map(|(i, set)| (AsnId::new(i).expect("valid"), set))
            .collect(),
    );

    let build = build_snapshot(
        params.date,
        as_rank,
        peeringdb,
        relationships,
        Some(memberships),
    )?;
    debug_assert!(build.warnings.is_empty(), "{:?}", build.warnings);
    Ok(build.snapshot)
}

struct PdbInputs {
    i: u32,
    rank_frac: f64,
    fac_count: i64,
    ix_count: i64,
    number_prefix: i64,
    cone_size: i64,
    n_customer: i64,
    n_peer: i64,
    date_epoch: i64,
    missing_scale: f64,
}

/// Fills the 40 PeeringDB columns for one AS. Draws a fixed number of
/// random values regardless of which cells end up missing, so the stream
/// position after a record does not depend on its contents.
fn pdb_values(rng: &mut ChaCha8Rng, inp: PdbInputs) -> Vec<Value> {
    const DAY: i64 = 86_400;
    let PdbInputs {
        i,
        rank_frac,
        fac_count,
        ix_count,
        number_prefix,
        cone_size,
        n_customer,
        n_peer,
        date_epoch,
        missing_scale,
    } = inp;

    // registration epoch: bigger networks (better rank) registered earlier
    let created_base = NaiveDate::from_ymd_opt(1995, 1, 1)
        .expect("valid date")
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
        .timestamp();
    let created = created_base
        + (rank_frac * 22.0 * 365.0) as i64 * DAY
        + (rng.random::<f64>() * 360.0 - 180.0) as i64 * DAY;
    let updated_near_snapshot =
        |rng: &mut ChaCha8Rng| date_epoch - (rng.random::<f64>() * 400.0) as i64 * DAY;
    let updated = updated_near_snapshot(rng);
    let netixlan_updated = updated_near_snapshot(rng);
    let netfac_updated = updated_near_snapshot(rng);
    let poc_updated = updated_near_snapshot(rng);
    let rir_status_updated = updated_near_snapshot(rng);

    let maybe = |rng: &mut ChaCha8Rng, present: f64, v: Value| {
        // one draw regardless of outcome or scale, to keep the stream stable
        if rng.random::<f64>() < 1.0 - missing_scale * (1.0 - present) {
            v
        } else {
            Value::Missing
        }
    };

    let traffic = match cone_size {
        0..=1 => ["0-20Mbps", "20-100Mbps", "100-1000Mbps"][(rng.random::<f64>() * 3.0) as usize % 3],
        2..=9 => ["100-1000Mbps", "1-5Gbps", "5-10Gbps"][(rng.random::<f64>() * 3.0) as usize % 3],
        _ => ["10-100Gbps", "100+Gbps", "1-5Tbps"][(rng.random::<f64>() * 3.0) as usize % 3],
    };
    let scope = if rank_frac < 0.05 {
        "Global"
    } else {
        pick(rng, &["Regional", "North America", "Europe", "Asia Pacific", "Global"])
    };
    let net_type = if n_customer > 3 {
        "NSP"
    } else if n_customer == 0 && n_peer > 0 {
        pick(rng, &["Content", "Enterprise", "Educational/Research"])
    } else {
        pick(rng, &["Cable/DSL/ISP", "NSP", "Non-Profit"])
    };
    let policy = if rank_frac < 0.05 {
        pick(rng, &["Selective", "Restrictive"])
    } else {
        pick(rng, &["Open", "Open", "Selective", "No"])
    };
    let ratio = pick(
        rng,
        &["Balanced", "Mostly Inbound", "Heavy Inbound", "Mostly Outbound", "Heavy Outbound"],
    );
    let locations = pick(rng, &["Not Required", "Preferred", "Required - US", "Required - International"]);
    let contracts = pick(rng, &["Not Required", "Private Only", "Required"]);

    let p4 = ((number_prefix as f64) * (0.6 + 0.5 * rng.random::<f64>())).round() as i64;
    let prefixes4 = maybe(rng, 0.9, Value::Int(p4));
    let p6 = ((number_prefix as f64) * (0.15 + 0.15 * rng.random::<f64>())).round() as i64;
    let prefixes6 = maybe(rng, 0.85, Value::Int(p6));

    vec![
        Value::Int(i as i64),                                               // asn
        Value::Int(900 + i as i64),                                         // id
        Value::Text("ok".into()),                                           // status
        maybe(rng, 0.4, Value::Text(format!("https://lg.as{i}.example.net"))), // looking_glass
        maybe(rng, 0.3, Value::Text(format!("rs.as{i}.example.net"))),      // route_server
        Value::Int(fac_count),                                              // fac_count
        Value::Timestamp(netixlan_updated),                                 // netixlan_updated
        maybe(rng, 0.8, Value::Text(ratio.into())),                         // info_ratio
        Value::Bool(rng.random::<f64>() < 0.25),                            // policy_ratio
        maybe(rng, 0.2, Value::Text(format!("https://status.as{i}.example.net"))), // status_dashboard
        Value::Bool(rng.random::<f64>() < 0.95),                            // info_unicast
        maybe(rng, 0.95, Value::Text("ok".into())),                         // rir_status
        Value::Timestamp(created),                                          // created
        maybe(rng, 0.5, Value::Text(format!("Example Network {i} Ltd"))),   // name_long
        maybe(rng, 0.85, Value::Text(policy.into())),                       // policy_general
        maybe(rng, 0.8, Value::Text(format!("https://as{i}.example.net"))), // website
        Value::Bool(rng.random::<f64>() < 0.5),                             // allow_ixp_update
        Value::Timestamp(updated),                                          // updated
        maybe(rng, 0.9, Value::Text(net_type.into())),                      // info_types
        Value::Timestamp(rir_status_updated),                               // rir_status_updated
        Value::Timestamp(netfac_updated),                                   // netfac_updated
        maybe(rng, 0.75, Value::Text(traffic.into())),                      // info_traffic
        Value::Bool(rng.random::<f64>() < 0.1),                             // info_multicast
        maybe(rng, 0.7, Value::Text(locations.into())),                     // policy_locations
        Value::Text(format!("Example Net {i}")),                            // name
        maybe(rng, 0.85, Value::Text(scope.into())),                        // info_scope
        maybe(rng, 0.3, Value::Text(format!("Operated from site {}", 1 + i % 7))), // notes
        Value::Int(ix_count),                                               // ix_count
        Value::Int(1 + i as i64 / 4),                                       // org_id
        maybe(rng, 0.6, Value::Text(format!("https://as{i}.example.net/peering"))), // policy_url
        Value::Bool(rng.random::<f64>() < 0.15),                            // info_never_via_route_servers
        Value::Timestamp(poc_updated),                                      // poc_updated
        maybe(rng, 0.9, Value::Text(net_type.into())),                      // info_type
        maybe(rng, 0.25, Value::Text(format!("web:https://as{i}.example.net"))), // social_media
        maybe(rng, 0.65, Value::Text(contracts.into())),                    // policy_contracts
        prefixes6,                                                          // info_prefixes6
        maybe(rng, 0.45, Value::Text(format!("ExNet{i}"))),                 // aka
        prefixes4,                                                          // info_prefixes4
        Value::Bool(rng.random::<f64>() < 0.7),                             // info_ipv6
        maybe(rng, 0.65, Value::Text(format!("AS-EXNET{i}"))),              // irr_as_set
    ]
}

/// Derives an earlier view of a snapshot, for train-on-the-past
/// experiments: a fraction of today's peerings did not exist yet, counts
/// that grow over time are scaled down, and freshness timestamps move
/// behind the earlier date. The provider hierarchy and PoP sets stay put.
pub fn back_date(snapshot: &Snapshot, seed_value: u64) -> Result<Snapshot> {
    let mut rng = seed::rng(seed_value, "backdate/peers", 0);
    let relationships: Vec<RelationshipRecord> = snapshot
        .relationships
        .iter()
        .filter(|r| r.kind != RelKind::Peer || rng.random::<f64>() >= 0.25)
        .copied()
        .collect();

    let mut peer_degree: BTreeMap<AsnId, i64> = BTreeMap::new();
    for rel in relationships.iter().filter(|r| r.kind == RelKind::Peer) {
        *peer_degree.entry(rel.asn_a).or_default() += 1;
        *peer_degree.entry(rel.asn_b).or_default() += 1;
    }

    let old_date = snapshot
        .date
        .checked_sub_months(chrono::Months::new(24))
        .ok_or_else(|| Error::InvalidArgument("snapshot date too early to back-date".into()))?;
    let old_epoch = old_date
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
        .timestamp();

    let col = |columns: &'static [crate::catalog::ColumnDef], name: &str| {
        columns
            .iter()
            .position(|c| c.name == name)
            .expect("catalog column exists")
    };
    let shrink = |rng: &mut ChaCha8Rng, v: &Value| match v {
        Value::Int(x) => Value::Int(((*x as f64) * (0.8 + 0.18 * rng.random::<f64>())).round() as i64),
        other => other.clone(),
    };

    let mut rng = seed::rng(seed_value, "backdate/features", 0);
    let mut as_rank = SourceTable::new(&AS_RANK_COLUMNS);
    for record in snapshot.as_rank.records() {
        let mut values = record.values.clone();
        let peers = peer_degree.get(&record.asn).copied().unwrap_or(0);
        values[col(&AS_RANK_COLUMNS, "peer")] = Value::Int(peers);
        if let (Value::Int(c), Value::Int(p)) = (
            values[col(&AS_RANK_COLUMNS, "customer")].clone(),
            values[col(&AS_RANK_COLUMNS, "provider")].clone(),
        ) {
            values[col(&AS_RANK_COLUMNS, "total")] = Value::Int(c + p + peers);
        }
        for name in ["NumberPrefix", "NumberAddrs"] {
            let idx = col(&AS_RANK_COLUMNS, name);
            values[idx] = shrink(&mut rng, &values[idx]);
        }
        as_rank.push(SourceRecord { asn: record.asn, values });
    }

    let mut peeringdb = SourceTable::new(&PEERINGDB_COLUMNS);
    for record in snapshot.peeringdb.records() {
        let mut values = record.values.clone();
        for name in ["info_prefixes4", "info_prefixes6"] {
            let idx = col(&PEERINGDB_COLUMNS, name);
            values[idx] = shrink(&mut rng, &values[idx]);
        }
        for name in [
            "updated",
            "netixlan_updated",
            "netfac_updated",
            "poc_updated",
            "rir_status_updated",
        ] {
            let idx = col(&PEERINGDB_COLUMNS, name);
            if let Value::Timestamp(ts) = values[idx] {
                values[idx] = Value::Timestamp(ts.min(old_epoch));
            }
        }
        peeringdb.push(SourceRecord { asn: record.asn, values });
    }

    let build = build_snapshot(
        old_date,
        as_rank,
        peeringdb,
        relationships,
        snapshot.pops.clone(),
    )?;
    Ok(build.snapshot)
}

fn pick<'a>(rng: &mut ChaCha8Rng, options: &[&'a str]) -> &'a str {
    options[rng.random_range(0..options.len())]
}

fn weighted_choice(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    debug_assert!(total > 0.0);
    let mut point = rng.random::<f64>() * total;
    for (idx, w) in weights.iter().enumerate() {
        point -= w;
        if point < 0.0 {
            return idx;
        }
    }
    weights.len() - 1
}

fn weighted_sample_distinct(rng: &mut ChaCha8Rng, weights: &[f64], count: usize) -> Vec<usize> {
    let mut remaining = weights.to_vec();
    let mut chosen = Vec::with_capacity(count);
    for _ in 0..count.min(weights.len()) {
        let idx = weighted_choice(rng, &remaining);
        remaining[idx] = 0.0;
        chosen.push(idx);
    }
    chosen
}
