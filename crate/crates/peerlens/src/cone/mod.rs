//! The AS relationship graph, customer cones, and pair-level features
//! derived from them.
//!
//! A customer cone is the set of ASes reachable from an AS by walking
//! provider-to-customer edges, the AS itself included. Cone overlap and
//! point-of-presence affinity are the two pair-level signals the rest of
//! the pipeline consumes.

pub mod affinity;
pub mod pop;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{AsnId, RelKind, RelationshipRecord};

pub use affinity::{affinity_from_counts, Affinity};
pub use pop::{pop_sets, PopIndex};

/// Directed provider-to-customer adjacency plus undirected peer adjacency.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AsGraph {
    customers: BTreeMap<AsnId, BTreeSet<AsnId>>,
    peers: BTreeMap<AsnId, BTreeSet<AsnId>>,
    nodes: BTreeSet<AsnId>,
}

impl AsGraph {
    /// Builds the graph from relationship records. Records are already
    /// pair-unique in a snapshot; stray duplicates collapse harmlessly
    /// into the edge sets.
    pub fn from_relationships(relationships: &[RelationshipRecord]) -> Self {
        let mut graph = AsGraph::default();
        for rel in relationships {
            graph.nodes.insert(rel.asn_a);
            graph.nodes.insert(rel.asn_b);
            match rel.kind {
                RelKind::ProviderCustomer => {
                    graph.customers.entry(rel.asn_a).or_default().insert(rel.asn_b);
                }
                RelKind::Peer => {
                    graph.peers.entry(rel.asn_a).or_default().insert(rel.asn_b);
                    graph.peers.entry(rel.asn_b).or_default().insert(rel.asn_a);
                }
            }
        }
        graph
    }

    /// Adds an isolated node; an AS with no relationships still has a cone
    /// (itself).
    pub fn add_node(&mut self, asn: AsnId) {
        self.nodes.insert(asn);
    }

    pub fn nodes(&self) -> &BTreeSet<AsnId> {
        &self.nodes
    }

    pub fn customers_of(&self, asn: AsnId) -> Option<&BTreeSet<AsnId>> {
        self.customers.get(&asn)
    }

    pub fn peers_of(&self, asn: AsnId) -> Option<&BTreeSet<AsnId>> {
        self.peers.get(&asn)
    }
}

/// Customer cones for every node of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeIndex {
    include_self: bool,
    cones: BTreeMap<AsnId, BTreeSet<AsnId>>,
    /// Provider edges removed to make the graph acyclic, in removal order.
    /// Empty on well-formed data; surfaced so callers can warn.
    pub broken_edges: Vec<(AsnId, AsnId)>,
}

impl ConeIndex {
    pub fn cone(&self, asn: AsnId) -> Result<&BTreeSet<AsnId>> {
        self.cones.get(&asn).ok_or(Error::UnknownAsn(asn))
    }

    pub fn overlap(&self, a: AsnId, b: AsnId) -> Result<u64> {
        let ca = self.cone(a)?;
        let cb = self.cone(b)?;
        Ok(ca.intersection(cb).count() as u64)
    }

    pub fn include_self(&self) -> bool {
        self.include_self
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }
}

/// Computes every customer cone by one sweep in reverse topological order.
///
/// Relationship data occasionally contains provider loops. Each detection
/// pass removes the lexicographically largest back edge and retries, so the
/// result is deterministic and the removals are reported in
/// [`ConeIndex::broken_edges`].
///
/// `include_self` selects the convention: `true` (the usual one) counts an
/// AS as part of its own cone.
pub fn customer_cones(graph: &AsGraph, include_self: bool) -> ConeIndex {
    let mut adjacency: BTreeMap<AsnId, Vec<AsnId>> = graph
        .customers
        .iter()
        .map(|(&p, cs)| (p, cs.iter().copied().collect()))
        .collect();
    let mut broken_edges = Vec::new();

    loop {
        let back_edges = find_back_edges(graph.nodes(), &adjacency);
        let Some(&edge) = back_edges.iter().max() else { break };
        let (provider, customer) = edge;
        adjacency
            .get_mut(&provider)
            .expect("edge endpoints exist")
            .retain(|&c| c != customer);
        broken_edges.push(edge);
    }

    // Kahn's algorithm on customer-to-provider direction: an AS is ready
    // once all of its customers' cones are known
    let mut pending: BTreeMap<AsnId, usize> = graph
        .nodes()
        .iter()
        .map(|&n| (n, adjacency.get(&n).map_or(0, Vec::len)))
        .collect();
    let mut providers_of: BTreeMap<AsnId, Vec<AsnId>> = BTreeMap::new();
    for (&p, cs) in &adjacency {
        for &c in cs {
            providers_of.entry(c).or_default().push(p);
        }
    }
    let mut ready: BTreeSet<AsnId> = pending
        .iter()
        .filter(|(_, &cnt)| cnt == 0)
        .map(|(&n, _)| n)
        .collect();

    let mut cones: BTreeMap<AsnId, BTreeSet<AsnId>> = BTreeMap::new();
    while let Some(&node) = ready.iter().next() {
        ready.remove(&node);
        let mut cone = BTreeSet::from([node]);
        for &c in adjacency.get(&node).into_iter().flatten() {
            cone.extend(cones[&c].iter().copied());
        }
        cones.insert(node, cone);
        for &p in providers_of.get(&node).into_iter().flatten() {
            let cnt = pending.get_mut(&p).expect("provider is a node");
            *cnt -= 1;
            if *cnt == 0 {
                ready.insert(p);
            }
        }
    }
    debug_assert_eq!(cones.len(), graph.nodes().len(), "topological sweep covered all nodes");

    if !include_self {
        for (node, cone) in cones.iter_mut() {
            cone.remove(node);
        }
    }
    ConeIndex {
        include_self,
        cones,
        broken_edges,
    }
}

/// One DFS pass collecting all provider edges that point back into the
/// active stack.
fn find_back_edges(
    nodes: &BTreeSet<AsnId>,
    adjacency: &BTreeMap<AsnId, Vec<AsnId>>,
) -> Vec<(AsnId, AsnId)> {
    const UNSEEN: u8 = 0;
    const ACTIVE: u8 = 1;
    const DONE: u8 = 2;

    let mut state: BTreeMap<AsnId, u8> = nodes.iter().map(|&n| (n, UNSEEN)).collect();
    let mut back_edges = Vec::new();
    let empty = Vec::new();

    for &start in nodes {
        if state[&start] != UNSEEN {
            continue;
        }
        let mut stack: Vec<(AsnId, usize)> = vec![(start, 0)];
        state.insert(start, ACTIVE);
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            let children = adjacency.get(&node).unwrap_or(&empty);
            if *next < children.len() {
                let child = children[*next];
                *next += 1;
                match state[&child] {
                    UNSEEN => {
                        state.insert(child, ACTIVE);
                        stack.push((child, 0));
                    }
                    ACTIVE => back_edges.push((node, child)),
                    _ => {}
                }
            } else {
                state.insert(node, DONE);
                stack.pop();
            }
        }
    }
    back_edges
}

/// Pair-level features: customer cone overlap and point-of-presence
/// affinity, in input pair order.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PairFeature {
    pub cone_overlap: u64,
    pub affinity_score: f64,
}

/// Computes both pair features for each pair. Errors on a self pair or on
/// an ASN without a cone entry.
pub fn pair_features(
    cones: &ConeIndex,
    pops: &PopIndex,
    pairs: &[(AsnId, AsnId)],
) -> Result<Vec<PairFeature>> {
    pairs
        .par_iter()
        .map(|&(a, b)| {
            if a == b {
                return Err(Error::SelfPair(a));
            }
            let cone_overlap = cones.overlap(a, b)?;
            let (p1, p2, p0) = pops.pair_counts(a, b)?;
            let affinity_score = affinity_from_counts(p1, p2, p0)?.score;
            Ok(PairFeature {
                cone_overlap,
                affinity_score,
            })
        })
        .collect()
}
