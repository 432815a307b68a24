//! Configuration-model networks, component structure and bond percolation.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::degree::DegreeSequence;
use crate::error::{Error, Result};

/// Simple undirected graph on vertices `0..n` stored as an edge list plus
/// compressed adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    n: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Network {
    /// Builds a network, rejecting self-loops, repeated pairs and out-of-range
    /// endpoints.
    pub fn from_edges(n: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::param("vertex count exceeds u32 range"));
        }
        let mut canon: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::param(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if u == v {
                return Err(Error::param(format!("self-loop at vertex {u}")));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(format!("repeated edge {:?}", w[0])));
        }
        Ok(Self::from_simple_edges(n, edges))
    }

    /// Caller guarantees the edges are simple.
    fn from_simple_edges(n: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in &edges {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; 2 * edges.len()];
        for &(u, v) in &edges {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        Self {
            n,
            edges,
            offsets,
            neighbors,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// No self-loops and no repeated pairs.
    pub fn is_simple(&self) -> bool {
        let mut canon: Vec<(u32, u32)> =
            self.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        canon.sort_unstable();
        canon.iter().all(|&(u, v)| u != v) && canon.windows(2).all(|w| w[0] != w[1])
    }
}

/// How non-simple stub matchings are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchingMode {
    /// Reject the whole matching and restart; uniform over simple graphs with
    /// the given degrees.
    #[default]
    Reject,
    /// Delete self-loops and repeated pairs from a single matching.
    /// Approximate: degrees of affected vertices drop below the sequence.
    Erased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationStats {
    /// Matchings drawn, including the accepted one.
    pub attempts: usize,
    /// Stub pairs removed in erased mode.
    pub erased_pairs: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct ConfigurationModel {
    pub mode: MatchingMode,
    pub restart_budget: usize,
}

impl Default for ConfigurationModel {
    fn default() -> Self {
        Self {
            mode: MatchingMode::Reject,
            restart_budget: 10_000,
        }
    }
}

impl ConfigurationModel {
    pub fn generate<R: Rng + ?Sized>(
        &self,
        seq: &DegreeSequence,
        rng: &mut R,
    ) -> Result<(Network, GenerationStats)> {
        if self.restart_budget == 0 {
            return Err(Error::param("restart budget must be at least 1"));
        }
        let n = seq.len();
        let mut stubs: Vec<u32> = Vec::with_capacity(seq.total());
        for (v, &d) in seq.degrees().iter().enumerate() {
            stubs.extend(std::iter::repeat_n(v as u32, d));
        }
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(stubs.len() / 2);
        for attempt in 1..=self.restart_budget {
            // a uniform shuffle paired off in order is a uniform perfect matching
            stubs.shuffle(rng);
            pairs.clear();
            pairs.extend(stubs.chunks_exact(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))));
            match self.mode {
                MatchingMode::Reject => {
                    if pairs.iter().any(|&(u, v)| u == v) {
                        continue;
                    }
                    let mut sorted = pairs.clone();
                    sorted.sort_unstable();
                    if sorted.windows(2).any(|w| w[0] == w[1]) {
                        continue;
                    }
                    let stats = GenerationStats {
                        attempts: attempt,
                        erased_pairs: 0,
                    };
                    return Ok((Network::from_simple_edges(n, pairs), stats));
                }
                MatchingMode::Erased => {
                    let before = pairs.len();
                    let mut seen = std::collections::HashSet::with_capacity(before);
                    let edges: Vec<(u32, u32)> = pairs
                        .iter()
                        .copied()
                        .filter(|&(u, v)| u != v && seen.insert((u, v)))
                        .collect();
                    let stats = GenerationStats {
                        attempts: attempt,
                        erased_pairs: before - edges.len(),
                    };
                    return Ok((Network::from_simple_edges(n, edges), stats));
                }
            }
        }
        Err(Error::BudgetExhausted {
            attempts: self.restart_budget,
            reason: "every stub matching contained a self-loop or repeated edge".to_string(),
        })
    }
}

/// Paper-faithful generator: uniform stub matching with whole-graph rejection.
pub fn configuration_model<R: Rng + ?Sized>(
    seq: &DegreeSequence,
    rng: &mut R,
    restart_budget: usize,
) -> Result<Network> {
    ConfigurationModel {
        mode: MatchingMode::Reject,
        restart_budget,
    }
    .generate(seq, rng)
    .map(|(net, _)| net)
}

#[derive(Debug, Clone)]
struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Connected components. Component ids are dense and assigned in order of
/// each component's lowest vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub labels: Vec<u32>,
    pub sizes: Vec<usize>,
    pub edge_counts: Vec<usize>,
    /// `edges ≥ vertices`, i.e. the component is not a tree.
    pub cycle_flags: Vec<bool>,
    pub giant_fraction: f64,
}

impl ComponentReport {
    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    /// Id of a largest component (lowest id on ties).
    pub fn largest(&self) -> Option<usize> {
        let max = *self.sizes.iter().max()?;
        self.sizes.iter().position(|&s| s == max)
    }

    pub fn size_of(&self, v: usize) -> usize {
        self.sizes[self.labels[v] as usize]
    }
}

pub fn components(net: &Network) -> ComponentReport {
    let n = net.vertex_count();
    let mut sets = DisjointSets::new(n);
    for &(u, v) in net.edges() {
        sets.union(u, v);
    }
    let mut id_of_root = vec![u32::MAX; n];
    let mut labels = vec![0u32; n];
    let mut sizes = Vec::new();
    for v in 0..n {
        let root = sets.find(v as u32) as usize;
        if id_of_root[root] == u32::MAX {
            id_of_root[root] = sizes.len() as u32;
            sizes.push(0);
        }
        labels[v] = id_of_root[root];
        sizes[labels[v] as usize] += 1;
    }
    let mut edge_counts = vec![0usize; sizes.len()];
    for &(u, _) in net.edges() {
        edge_counts[labels[u as usize] as usize] += 1;
    }
    let cycle_flags = sizes
        .iter()
        .zip(&edge_counts)
        .map(|(&s, &m)| m >= s)
        .collect();
    let giant_fraction = if n == 0 {
        0.0
    } else {
        sizes.iter().copied().max().unwrap_or(0) as f64 / n as f64
    };
    ComponentReport {
        labels,
        sizes,
        edge_counts,
        cycle_flags,
        giant_fraction,
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::param(format!("transmissibility {t} outside [0, 1]")));
    }
    Ok(())
}

/// Keeps each edge independently with probability `t`.
pub fn bond_percolate<R: Rng + ?Sized>(net: &Network, t: f64, rng: &mut R) -> Result<Network> {
    check_t(t)?;
    let edges = net
        .edges()
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(t))
        .collect();
    Ok(Network::from_simple_edges(net.vertex_count(), edges))
}

/// Size of the occupied component containing a uniformly chosen vertex.
///
/// Explores outward from the chosen vertex and decides each edge's occupation
/// the first time it is examined. Edges leading back into the explored set
/// never change the outcome, so this has the same distribution as
/// percolating the whole network first.
pub fn infected_component_size<R: Rng + ?Sized>(net: &Network, t: f64, rng: &mut R) -> Result<usize> {
    check_t(t)?;
    let n = net.vertex_count();
    if n == 0 {
        return Err(Error::param("network has no vertices"));
    }
    let start = rng.gen_range(0..n);
    let mut visited = vec![false; n];
    Ok(explore(net, t, start, &mut visited, rng))
}

pub(crate) fn explore<R: Rng + ?Sized>(
    net: &Network,
    t: f64,
    start: usize,
    visited: &mut [bool],
    rng: &mut R,
) -> usize {
    let mut stack = vec![start as u32];
    visited[start] = true;
    let mut size = 1;
    while let Some(v) = stack.pop() {
        for &w in net.neighbors(v as usize) {
            if !visited[w as usize] && rng.gen_bool(t) {
                visited[w as usize] = true;
                size += 1;
                stack.push(w);
            }
        }
    }
    size
}
