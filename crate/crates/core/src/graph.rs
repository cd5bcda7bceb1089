//! Immutable temporal graph built from an edge stream.
//!
//! Every temporal edge `(u, v, t)` yields two ordered states `<u, v, t>` and
//! `<v, u, t>`; a state enters its *tail* at time `t`. Per vertex the graph
//! keeps its outgoing states (head == vertex) sorted by time, grouped into
//! one *slot* per distinct timestamp. A state's legal continuations are the
//! outgoing states of its tail in later slots, which makes them a suffix of
//! that vertex's incidence list.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub type Timestamp = u64;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct TemporalEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub t: Timestamp,
}

/// Identifier of an ordered temporal edge: `2 * edge_index + reversed`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    #[inline]
    pub fn new(edge: usize, reversed: bool) -> Self {
        StateId((edge as u32) << 1 | reversed as u32)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Index of the temporal edge this state was derived from.
    #[inline]
    pub fn edge(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn reversed(self) -> bool {
        self.0 & 1 == 1
    }

    /// The state of opposing direction on the same temporal edge.
    #[inline]
    pub fn opposite(self) -> Self {
        StateId(self.0 ^ 1)
    }
}

/// Resolved view of an ordered temporal edge.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct OrderedEdge {
    pub id: StateId,
    pub head: VertexId,
    pub tail: VertexId,
    pub time: Timestamp,
}

/// Counts of input lines discarded while cleaning an edge stream.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadWarnings {
    pub duplicates: usize,
    pub self_loops: usize,
}

impl LoadWarnings {
    pub fn total(&self) -> usize {
        self.duplicates + self.self_loops
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TemporalGraph {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: Vec<TemporalEdge>,
    out_offsets: Vec<usize>,
    out_states: Vec<StateId>,
    slot_offsets: Vec<usize>,
    slot_times: Vec<Timestamp>,
    slot_out_end: Vec<usize>,
    slot_owner: Vec<u32>,
    state_slot: Vec<u32>,
    state_first_slot: Vec<u32>,
    adj_offsets: Vec<usize>,
    adj: Vec<VertexId>,
}

/// Accumulates labelled temporal edges; [`GraphBuilder::build`] sorts them
/// into an edge stream.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, u32>,
    raw: Vec<(u32, u32, Timestamp)>,
    seen: HashSet<(u32, u32, Timestamp)>,
    warnings: LoadWarnings,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, label: &str) -> u32 {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    /// Registers a vertex even if it never receives an edge.
    pub fn add_vertex(&mut self, label: &str) -> &mut Self {
        self.intern(label);
        self
    }

    /// Adds `(u, v, t)`. Self-loops and repeats of an existing triple (in
    /// either orientation) are dropped and counted.
    pub fn add_edge(&mut self, u: &str, v: &str, t: Timestamp) -> &mut Self {
        if u == v {
            self.warnings.self_loops += 1;
            return self;
        }
        let a = self.intern(u);
        let b = self.intern(v);
        let key = (a.min(b), a.max(b), t);
        if self.seen.insert(key) {
            self.raw.push((a, b, t));
        } else {
            self.warnings.duplicates += 1;
        }
        self
    }

    pub fn warnings(&self) -> LoadWarnings {
        self.warnings
    }

    /// Sorts the edges stably by timestamp and assigns dense vertex ids in
    /// order of first appearance in the resulting stream. Vertices that only
    /// came from [`add_vertex`](Self::add_vertex) follow in insertion order.
    pub fn build(self) -> Result<TemporalGraph> {
        let GraphBuilder {
            labels, mut raw, ..
        } = self;
        if raw.is_empty() {
            return Err(Error::EmptyGraph);
        }
        raw.sort_by_key(|&(_, _, t)| t);

        let mut remap = vec![u32::MAX; labels.len()];
        let mut order: Vec<u32> = Vec::with_capacity(labels.len());
        let mut assign = |old: u32, order: &mut Vec<u32>| -> u32 {
            if remap[old as usize] == u32::MAX {
                remap[old as usize] = order.len() as u32;
                order.push(old);
            }
            remap[old as usize]
        };
        let mut edges = Vec::with_capacity(raw.len());
        for &(a, b, t) in &raw {
            let u = assign(a, &mut order);
            let v = assign(b, &mut order);
            edges.push(TemporalEdge {
                u: VertexId(u),
                v: VertexId(v),
                t,
            });
        }
        for old in 0..labels.len() as u32 {
            assign(old, &mut order);
        }
        let labels: Vec<String> = order
            .iter()
            .map(|&old| labels[old as usize].clone())
            .collect();
        Ok(TemporalGraph::from_parts(labels, edges))
    }
}

impl TemporalGraph {
    /// Builds a graph from labelled triples; see [`GraphBuilder`].
    pub fn from_edges<'a, I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, Timestamp)>,
    {
        let mut builder = GraphBuilder::new();
        for (u, v, t) in edges {
            builder.add_edge(u, v, t);
        }
        builder.build()
    }

    fn from_parts(labels: Vec<String>, edges: Vec<TemporalEdge>) -> Self {
        let n = labels.len();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), VertexId(i as u32)))
            .collect();

        // Outgoing states per vertex. The stream is time-sorted, so pushing in
        // stream order keeps each list sorted by time.
        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.u.index()] += 1;
            degree[e.v.index()] += 1;
        }
        let mut out_offsets = Vec::with_capacity(n + 1);
        out_offsets.push(0);
        for d in &degree {
            out_offsets.push(out_offsets.last().unwrap() + d);
        }
        let mut cursor = out_offsets[..n].to_vec();
        let mut out_states = vec![StateId(0); 2 * edges.len()];
        for (i, e) in edges.iter().enumerate() {
            // <u, v, t> has head u; <v, u, t> has head v.
            out_states[cursor[e.u.index()]] = StateId::new(i, false);
            cursor[e.u.index()] += 1;
            out_states[cursor[e.v.index()]] = StateId::new(i, true);
            cursor[e.v.index()] += 1;
        }

        let mut slot_offsets = Vec::with_capacity(n + 1);
        let mut slot_times = Vec::new();
        let mut slot_out_end = Vec::new();
        let mut slot_owner = Vec::new();
        slot_offsets.push(0);
        for u in 0..n {
            let (lo, hi) = (out_offsets[u], out_offsets[u + 1]);
            for k in lo..hi {
                let t = edges[out_states[k].edge()].t;
                if k + 1 == hi || edges[out_states[k + 1].edge()].t != t {
                    slot_times.push(t);
                    slot_out_end.push(k + 1);
                    slot_owner.push(u as u32);
                }
            }
            slot_offsets.push(slot_times.len());
        }

        // A state's tail slot is the slot of its opposite state at the tail.
        let mut state_slot = vec![0u32; 2 * edges.len()];
        let mut state_first_slot = vec![0u32; 2 * edges.len()];
        for u in 0..n {
            let mut slot = slot_offsets[u];
            for k in out_offsets[u]..out_offsets[u + 1] {
                while slot_out_end[slot] <= k {
                    slot += 1;
                }
                state_slot[out_states[k].opposite().index()] = slot as u32;
                state_first_slot[out_states[k].opposite().index()] = slot_offsets[u] as u32;
            }
        }

        let mut neighbours: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for e in &edges {
            neighbours[e.u.index()].push(e.v);
            neighbours[e.v.index()].push(e.u);
        }
        let mut adj_offsets = Vec::with_capacity(n + 1);
        let mut adj = Vec::new();
        adj_offsets.push(0);
        for list in &mut neighbours {
            list.sort_unstable();
            list.dedup();
            adj.extend_from_slice(list);
            adj_offsets.push(adj.len());
        }

        TemporalGraph {
            labels,
            index,
            edges,
            out_offsets,
            out_states,
            slot_offsets,
            slot_times,
            slot_out_end,
            slot_owner,
            state_slot,
            state_first_slot,
            adj_offsets,
            adj,
        }
    }

    /// Number of vertices `n`.
    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    /// Number of temporal edges `m`.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of de-temporal edges.
    pub fn num_static_edges(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + Clone {
        (0..self.labels.len() as u32).map(VertexId)
    }

    /// The edge stream, sorted non-decreasing by timestamp.
    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.index()]
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    pub fn resolve(&self, label: &str) -> Result<VertexId> {
        self.vertex(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    /// De-temporal neighbours, sorted by id.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[self.adj_offsets[v.index()]..self.adj_offsets[v.index() + 1]]
    }

    /// Number of temporal edges incident to `v`.
    #[inline]
    pub fn temporal_degree(&self, v: VertexId) -> usize {
        self.out_offsets[v.index() + 1] - self.out_offsets[v.index()]
    }

    /// Ordered states with head `v`, sorted by time.
    #[inline]
    pub fn out_states(&self, v: VertexId) -> &[StateId] {
        &self.out_states[self.out_offsets[v.index()]..self.out_offsets[v.index() + 1]]
    }

    /// Ordered states with tail `v`, sorted by time.
    pub fn in_states(&self, v: VertexId) -> impl Iterator<Item = StateId> + '_ {
        self.out_states(v).iter().map(|s| s.opposite())
    }

    /// Distinct timestamps on edges incident to `v`, ascending.
    pub fn distinct_times(&self, v: VertexId) -> &[Timestamp] {
        &self.slot_times[self.slot_range(v)]
    }

    /// Number of distinct timestamps incident to `u`.
    pub fn temporal_occurrence(&self, u: VertexId) -> usize {
        self.slot_range(u).len()
    }

    /// Largest temporal occurrence over all vertices.
    pub fn max_temporal_occurrence(&self) -> usize {
        self.vertices()
            .map(|u| self.temporal_occurrence(u))
            .max()
            .unwrap_or(0)
    }

    /// Smallest and largest timestamp in the stream.
    pub fn time_span(&self) -> (Timestamp, Timestamp) {
        (
            self.edges.first().map_or(0, |e| e.t),
            self.edges.last().map_or(0, |e| e.t),
        )
    }

    pub fn num_states(&self) -> usize {
        2 * self.edges.len()
    }

    #[inline]
    pub fn head(&self, s: StateId) -> VertexId {
        let e = &self.edges[s.edge()];
        if s.reversed() {
            e.v
        } else {
            e.u
        }
    }

    #[inline]
    pub fn tail(&self, s: StateId) -> VertexId {
        let e = &self.edges[s.edge()];
        if s.reversed() {
            e.u
        } else {
            e.v
        }
    }

    #[inline]
    pub fn time(&self, s: StateId) -> Timestamp {
        self.edges[s.edge()].t
    }

    pub fn state(&self, s: StateId) -> OrderedEdge {
        OrderedEdge {
            id: s,
            head: self.head(s),
            tail: self.tail(s),
            time: self.time(s),
        }
    }

    /// Looks up the ordered state `<head, tail, time>`.
    pub fn find_state(&self, head: VertexId, tail: VertexId, time: Timestamp) -> Option<StateId> {
        self.out_states(head)
            .iter()
            .copied()
            .find(|&s| self.tail(s) == tail && self.time(s) == time)
    }

    /// Legal continuations of `s`: states leaving `tail(s)` strictly after
    /// `time(s)`. Empty exactly when `s` is dangling.
    #[inline]
    pub fn successors(&self, s: StateId) -> &[StateId] {
        let slot = self.state_slot[s.index()] as usize;
        let tail = self.tail(s);
        &self.out_states[self.slot_out_end[slot]..self.out_offsets[tail.index() + 1]]
    }

    #[inline]
    pub fn is_dangling(&self, s: StateId) -> bool {
        self.is_last_slot(self.state_slot[s.index()] as usize)
    }

    // Slots: one per (vertex, distinct timestamp), globally indexed.

    #[inline]
    pub(crate) fn num_slots(&self) -> usize {
        self.slot_times.len()
    }

    #[inline]
    pub(crate) fn slot_range(&self, v: VertexId) -> std::ops::Range<usize> {
        self.slot_offsets[v.index()]..self.slot_offsets[v.index() + 1]
    }

    #[inline]
    pub(crate) fn slot_time(&self, slot: usize) -> Timestamp {
        self.slot_times[slot]
    }

    /// Slot that `s` enters: (tail(s), time(s)).
    #[inline]
    pub(crate) fn tail_slot(&self, s: StateId) -> usize {
        self.state_slot[s.index()] as usize
    }

    /// First slot of `tail(s)`, stored per state so the streaming pass reads
    /// it sequentially.
    #[inline]
    pub(crate) fn tail_first_slot(&self, s: StateId) -> usize {
        self.state_first_slot[s.index()] as usize
    }

    /// Number of incident temporal edges in `slot`.
    #[inline]
    pub(crate) fn slot_multiplicity(&self, slot: usize) -> usize {
        let owner = self.slot_owner[slot] as usize;
        let start = if slot == self.slot_offsets[owner] {
            self.out_offsets[owner]
        } else {
            self.slot_out_end[slot - 1]
        };
        self.slot_out_end[slot] - start
    }

    /// One past the last slot of the vertex owning `slot`.
    #[inline]
    pub(crate) fn owner_slot_end(&self, slot: usize) -> usize {
        self.slot_offsets[self.slot_owner[slot] as usize + 1]
    }

    #[inline]
    pub(crate) fn is_last_slot(&self, slot: usize) -> bool {
        slot + 1 == self.owner_slot_end(slot)
    }

    /// Vertex set of the connected component of the de-temporal subgraph
    /// induced by `set` that contains `q`, sorted by id.
    pub fn connected_component(&self, set: &[VertexId], q: VertexId) -> Result<Vec<VertexId>> {
        let mut mask = vec![false; self.num_vertices()];
        for &v in set {
            mask[v.index()] = true;
        }
        if !mask[q.index()] {
            return Err(Error::QueryNotInSet(q));
        }
        Ok(self.component_within(&mask, &[q]))
    }

    /// Vertices reachable from `seeds` inside `mask`, sorted by id. Seeds
    /// outside the mask are ignored.
    pub(crate) fn component_within(&self, mask: &[bool], seeds: &[VertexId]) -> Vec<VertexId> {
        let mut seen = vec![false; self.num_vertices()];
        let mut queue = VecDeque::new();
        let mut out = Vec::new();
        for &s in seeds {
            if mask[s.index()] && !seen[s.index()] {
                seen[s.index()] = true;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            out.push(u);
            for &w in self.neighbors(u) {
                if mask[w.index()] && !seen[w.index()] {
                    seen[w.index()] = true;
                    queue.push_back(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Whether all `seeds` lie in one connected component inside `mask`.
    pub(crate) fn seeds_connected(&self, mask: &[bool], seeds: &[VertexId]) -> bool {
        match seeds {
            [] => true,
            [only] => mask[only.index()],
            [first, rest @ ..] => {
                if !seeds.iter().all(|s| mask[s.index()]) {
                    return false;
                }
                let comp = self.component_within(mask, &[*first]);
                rest.iter().all(|s| comp.binary_search(s).is_ok())
            }
        }
    }
}

/// Parses an edge stream: one `u v t` triple per line, `#` comments and
/// blank lines ignored. Input need not be sorted.
pub fn load_edge_stream<R: BufRead>(reader: R) -> Result<(TemporalGraph, LoadWarnings)> {
    let mut builder = GraphBuilder::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let lineno = i + 1;
        if fields.len() != 3 {
            return Err(Error::MalformedLine {
                line: lineno,
                reason: format!("expected 3 fields `u v t`, found {}", fields.len()),
            });
        }
        let t: Timestamp = fields[2].parse().map_err(|_| Error::MalformedLine {
            line: lineno,
            reason: format!("timestamp {:?} is not a non-negative integer", fields[2]),
        })?;
        builder.add_edge(fields[0], fields[1], t);
    }
    let warnings = builder.warnings();
    Ok((builder.build()?, warnings))
}

/// Writes the graph as an edge stream readable by [`load_edge_stream`].
pub fn write_edge_stream<W: Write>(g: &TemporalGraph, mut out: W) -> std::io::Result<()> {
    for e in g.edges() {
        writeln!(out, "{} {} {}", g.label(e.u), g.label(e.v), e.t)?;
    }
    out.flush()
}
