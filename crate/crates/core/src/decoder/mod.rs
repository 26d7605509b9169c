//! Minimum-weight perfect-matching decoding.
//!
//! Edge weights are `ln((1 - p) / p)`, discretised to integer units of
//! `1 / WEIGHT_SCALE` so that matching runs in exact arithmetic and totals
//! can be compared bit for bit. Shortest paths between all detectors, with
//! the boundary as a sink, are tabulated once per graph.
//!
//! Per shot, a pair of flagged detectors is only worth matching together if
//! their path is strictly shorter than sending both to the boundary. The
//! flagged set splits into independent clusters along such pairs; singletons
//! and pairs are solved directly, larger clusters by blossom matching of the
//! savings over sending everything to the boundary.

mod blossom;

pub use blossom::max_weight_matching;

use crate::dem::{merge_probability, DetectorErrorModel};
use crate::frame::SampleResult;
use rayon::prelude::*;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use thiserror::Error;

/// Weight units per unit of log-likelihood.
pub const WEIGHT_SCALE: f64 = 16384.0;
/// Largest detector count for which the full path table is kept in memory.
pub const MAX_TABLE_NODES: usize = 6000;
/// Largest syndrome accepted by [`Decoder::brute_force_decode`].
pub const BRUTE_FORCE_LIMIT: usize = 12;

const INF: u64 = u64::MAX / 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("mechanism on detectors {0:?} is not an edge; decompose the model first")]
    NotDecomposed(Vec<u32>),
    #[error("edge {u}-{v} has probability {p} >= 1/2")]
    ProbabilityTooHigh { u: u32, v: String, p: f64 },
    #[error("detector {0} out of range")]
    DetectorOutOfRange(u32),
    #[error("flagged detector {0} cannot reach the boundary or any partner")]
    Unmatchable(u32),
    #[error("brute force supports at most {BRUTE_FORCE_LIMIT} flagged detectors, got {0}")]
    TooManyFlagged(usize),
    #[error("samples have {samples} detectors but the graph has {graph}")]
    DimensionMismatch { samples: usize, graph: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingEdge {
    pub u: u32,
    /// Second endpoint, or `None` for the boundary.
    pub v: Option<u32>,
    pub probability: f64,
    pub weight: f64,
    pub units: u32,
    pub observable_mask: u64,
}

/// Detectors plus one boundary node, indexed `num_detectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingGraph {
    pub num_detectors: usize,
    pub edges: Vec<MatchingEdge>,
    /// Per node: `(neighbour, edge index)`.
    pub adjacency: Vec<Vec<(u32, u32)>>,
}

pub fn edge_weight(p: f64) -> f64 {
    ((1.0 - p) / p).ln()
}

impl MatchingGraph {
    pub fn boundary(&self) -> u32 {
        self.num_detectors as u32
    }

    /// Graph of a decomposed model. Parallel edges merge as independent
    /// events and keep the observable mask of their likelier constituent.
    pub fn from_dem(dem: &DetectorErrorModel) -> Result<Self, DecodeError> {
        let nd = dem.num_detectors;
        // key -> (merged p, best constituent p, its mask)
        let mut merged: BTreeMap<(u32, u32), (f64, f64, u64)> = BTreeMap::new();
        for m in &dem.mechanisms {
            if let Some(&d) = m.detectors.iter().find(|&&d| d as usize >= nd) {
                return Err(DecodeError::DetectorOutOfRange(d));
            }
            let key = match m.detectors[..] {
                [] => continue,
                [a] => (a, nd as u32),
                [a, b] => (a.min(b), a.max(b)),
                _ => return Err(DecodeError::NotDecomposed(m.detectors.clone())),
            };
            let e = merged.entry(key).or_insert((0.0, -1.0, 0));
            e.0 = merge_probability(e.0, m.probability);
            if m.probability > e.1 {
                e.1 = m.probability;
                e.2 = m.observable_mask;
            }
        }
        let mut edges = Vec::with_capacity(merged.len());
        let mut adjacency = vec![Vec::new(); nd + 1];
        for ((u, v), (p, _, mask)) in merged {
            let v = (v as usize != nd).then_some(v);
            if p >= 0.5 {
                return Err(DecodeError::ProbabilityTooHigh {
                    u,
                    v: v.map_or("boundary".into(), |v| v.to_string()),
                    p,
                });
            }
            let weight = edge_weight(p);
            let idx = edges.len() as u32;
            adjacency[u as usize].push((v.unwrap_or(nd as u32), idx));
            adjacency[v.map_or(nd, |v| v as usize)].push((u, idx));
            edges.push(MatchingEdge { u, v, probability: p, weight, units: (weight * WEIGHT_SCALE).round() as u32, observable_mask: mask });
        }
        Ok(MatchingGraph { num_detectors: nd, edges, adjacency })
    }

    /// Copy with every integer weight multiplied by `factor`.
    pub fn scaled(&self, factor: u32) -> MatchingGraph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.units *= factor;
            e.weight *= factor as f64;
        }
        g
    }

    /// Shortest distances (in weight units) and path masks from `source` to
    /// every node. The boundary is reached but never passed through.
    pub fn dijkstra(&self, source: u32) -> (Vec<u64>, Vec<u64>) {
        let n = self.num_detectors + 1;
        let boundary = self.boundary();
        let mut dist = vec![INF; n];
        let mut mask = vec![0u64; n];
        let mut heap = BinaryHeap::new();
        dist[source as usize] = 0;
        heap.push(Reverse((0u64, source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u as usize] || u == boundary {
                continue;
            }
            for &(v, e) in &self.adjacency[u as usize] {
                let edge = &self.edges[e as usize];
                let nd = d + edge.units as u64;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    mask[v as usize] = mask[u as usize] ^ edge.observable_mask;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        (dist, mask)
    }
}

/// Shortest-path data for the detectors touched by one query.
enum Paths {
    /// Row `u` holds distances to all nodes, boundary last.
    Table { width: usize, dist: Vec<u32>, mask: Vec<u64> },
    OnDemand,
}

/// Matching decoder over a fixed graph.
pub struct Decoder {
    graph: MatchingGraph,
    paths: Paths,
}

/// Outcome of an exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceResult {
    pub weight: u64,
    pub mask: u64,
    /// Number of pairings attaining `weight`.
    pub optimal_pairings: usize,
}

/// Path data for the detectors flagged in one shot.
struct Query<'a> {
    decoder: &'a Decoder,
    flagged: &'a [u32],
    /// Dijkstra rows per flagged detector when there is no table.
    rows: Vec<(Vec<u64>, Vec<u64>)>,
    bdist: Vec<u64>,
    bmask: Vec<u64>,
}

impl<'a> Query<'a> {
    fn new(decoder: &'a Decoder, flagged: &'a [u32]) -> Self {
        let b = decoder.graph.boundary();
        let rows: Vec<(Vec<u64>, Vec<u64>)> = match &decoder.paths {
            Paths::Table { .. } => Vec::new(),
            Paths::OnDemand => flagged.iter().map(|&u| decoder.graph.dijkstra(u)).collect(),
        };
        let mut q = Query { decoder, flagged, rows, bdist: Vec::new(), bmask: Vec::new() };
        (q.bdist, q.bmask) = (0..flagged.len()).map(|i| q.to(i, b)).unzip();
        q
    }

    fn to(&self, i: usize, v: u32) -> (u64, u64) {
        match &self.decoder.paths {
            Paths::Table { .. } => self.decoder.distance(self.flagged[i], v),
            Paths::OnDemand => (self.rows[i].0[v as usize], self.rows[i].1[v as usize]),
        }
    }

    fn dist(&self, i: usize, j: usize) -> u64 {
        match &self.decoder.paths {
            Paths::Table { width, dist, .. } => match dist[self.flagged[i] as usize * width + self.flagged[j] as usize] {
                u32::MAX => INF,
                d => d as u64,
            },
            Paths::OnDemand => self.rows[i].0[self.flagged[j] as usize],
        }
    }

    fn pair(&self, i: usize, j: usize) -> (u64, u64) {
        self.to(i, self.flagged[j])
    }

    /// Pairs worth matching together: strictly cheaper than two boundary
    /// matches. No optimal matching uses any other pair.
    fn profitable_pairs(&self) -> Vec<(usize, usize, u64)> {
        let k = self.flagged.len();
        let mut out = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                let d = self.dist(i, j);
                if d < INF && d < self.bdist[i].saturating_add(self.bdist[j]) {
                    out.push((i, j, d));
                }
            }
        }
        out
    }
}

impl Decoder {
    pub fn new(graph: MatchingGraph) -> Self {
        let n = graph.num_detectors;
        let paths = if n <= MAX_TABLE_NODES {
            let width = n + 1;
            let mut dist = vec![u32::MAX; n * width];
            let mut mask = vec![0u64; n * width];
            dist.par_chunks_mut(width.max(1)).zip(mask.par_chunks_mut(width.max(1))).enumerate().for_each(|(s, (drow, mrow))| {
                let (d, m) = graph.dijkstra(s as u32);
                for v in 0..width {
                    drow[v] = if d[v] >= INF { u32::MAX } else { d[v].min(u32::MAX as u64 - 1) as u32 };
                    mrow[v] = m[v];
                }
            });
            Paths::Table { width, dist, mask }
        } else {
            Paths::OnDemand
        };
        Decoder { graph, paths }
    }

    pub fn from_dem(dem: &DetectorErrorModel) -> Result<Self, DecodeError> {
        Ok(Decoder::new(MatchingGraph::from_dem(dem)?))
    }

    pub fn graph(&self) -> &MatchingGraph {
        &self.graph
    }

    /// Distance in weight units and path mask between two nodes; the
    /// boundary is node `num_detectors`.
    pub fn distance(&self, u: u32, v: u32) -> (u64, u64) {
        match &self.paths {
            Paths::Table { width, dist, mask } => {
                let i = u as usize * width + v as usize;
                let d = dist[i];
                (if d == u32::MAX { INF } else { d as u64 }, mask[i])
            }
            Paths::OnDemand => {
                let (d, m) = self.graph.dijkstra(u);
                (d[v as usize], m[v as usize])
            }
        }
    }

    fn check(&self, flagged: &[u32]) -> Result<(), DecodeError> {
        match flagged.iter().find(|&&d| d as usize >= self.graph.num_detectors) {
            Some(&d) => Err(DecodeError::DetectorOutOfRange(d)),
            None => Ok(()),
        }
    }

    /// Predicted observable mask for a sorted list of flagged detectors.
    pub fn decode(&self, flagged: &[u32]) -> Result<u64, DecodeError> {
        self.decode_with_weight(flagged).map(|(_, m)| m)
    }

    /// Total matching weight (in weight units) and predicted mask.
    pub fn decode_with_weight(&self, flagged: &[u32]) -> Result<(u64, u64), DecodeError> {
        self.check(flagged)?;
        let k = flagged.len();
        if k == 0 {
            return Ok((0, 0));
        }
        let q = Query::new(self, flagged);
        let pairs = q.profitable_pairs();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(i, j, _) in &pairs {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        let mut cluster_pairs: Vec<Vec<(usize, usize, u64)>> = vec![Vec::new(); k];
        for i in 0..k {
            let r = find(&mut parent, i);
            members[r].push(i);
        }
        for &(i, j, d) in &pairs {
            let r = find(&mut parent, i);
            cluster_pairs[r].push((i, j, d));
        }
        let (mut weight, mut mask) = (0u64, 0u64);
        for r in 0..k {
            match members[r][..] {
                [] => {}
                [i] => {
                    if q.bdist[i] >= INF {
                        return Err(DecodeError::Unmatchable(flagged[i]));
                    }
                    weight += q.bdist[i];
                    mask ^= q.bmask[i];
                }
                [i, j] => {
                    let (d, m) = q.pair(i, j);
                    weight += d;
                    mask ^= m;
                }
                _ => {
                    let (w, m) = self.match_cluster(&q, &members[r], &cluster_pairs[r])?;
                    weight += w;
                    mask ^= m;
                }
            }
        }
        Ok((weight, mask))
    }

    /// Exact matching of one cluster. When every member reaches the
    /// boundary, sending all of them there costs `sum b`, and pairing `i`
    /// with `j` saves `b_i + b_j - d_ij > 0`; the optimum is the
    /// maximum-weight matching of those savings. Otherwise each member gets
    /// a boundary twin and the matching must be perfect.
    fn match_cluster(&self, q: &Query, members: &[usize], pairs: &[(usize, usize, u64)]) -> Result<(u64, u64), DecodeError> {
        let m = members.len();
        let mut pos = vec![usize::MAX; q.flagged.len()];
        for (a, &i) in members.iter().enumerate() {
            pos[i] = a;
        }
        let all_reach_boundary = members.iter().all(|&i| q.bdist[i] < INF);
        let mate = if all_reach_boundary {
            let savings: Vec<(usize, usize, i64)> =
                pairs.iter().map(|&(i, j, d)| (pos[i], pos[j], (q.bdist[i] + q.bdist[j] - d) as i64)).collect();
            max_weight_matching(m, &savings, false)
        } else {
            // Twins pair up along the same edges as their originals.
            let mut edges: Vec<(usize, usize, u64)> = Vec::with_capacity(2 * pairs.len() + m);
            for &(i, j, d) in pairs {
                edges.push((pos[i], pos[j], d));
                edges.push((m + pos[i], m + pos[j], 0));
            }
            for (a, &i) in members.iter().enumerate() {
                if q.bdist[i] < INF {
                    edges.push((a, m + a, q.bdist[i]));
                }
            }
            let cap = edges.iter().map(|e| e.2).max().unwrap_or(0) as i64 + 1;
            let weighted: Vec<(usize, usize, i64)> = edges.iter().map(|&(a, b, w)| (a, b, cap - w as i64)).collect();
            let mate = max_weight_matching(2 * m, &weighted, true);
            if let Some(a) = mate.iter().position(|x| x.is_none()) {
                return Err(DecodeError::Unmatchable(q.flagged[members[a % m]]));
            }
            mate.into_iter().take(m).map(|x| x.filter(|&b| b < m)).collect()
        };
        let (mut weight, mut mask) = (0u64, 0u64);
        for a in 0..m {
            let i = members[a];
            match mate[a] {
                None => {
                    weight += q.bdist[i];
                    mask ^= q.bmask[i];
                }
                Some(b) if a < b => {
                    let (d, msk) = q.pair(i, members[b]);
                    weight += d;
                    mask ^= msk;
                }
                Some(_) => {}
            }
        }
        Ok((weight, mask))
    }

    /// Minimum over every pairing of the flagged detectors, each detector
    /// either paired or sent to the boundary.
    pub fn brute_force_decode(&self, flagged: &[u32]) -> Result<BruteForceResult, DecodeError> {
        self.check(flagged)?;
        let k = flagged.len();
        if k > BRUTE_FORCE_LIMIT {
            return Err(DecodeError::TooManyFlagged(k));
        }
        let q = Query::new(self, flagged);
        let pair: Vec<(u64, u64)> = (0..k * k).map(|x| if x / k == x % k { (INF, 0) } else { q.pair(x / k, x % k) }).collect();
        let mut best = BruteForceResult { weight: INF, mask: 0, optimal_pairings: 0 };
        fn go(used: u32, k: usize, q: &Query, pair: &[(u64, u64)], w: u64, m: u64, best: &mut BruteForceResult) {
            if w >= INF || w > best.weight {
                return;
            }
            let Some(i) = (0..k).find(|&i| used >> i & 1 == 0) else {
                if w < best.weight {
                    *best = BruteForceResult { weight: w, mask: m, optimal_pairings: 1 };
                } else {
                    best.optimal_pairings += 1;
                }
                return;
            };
            let used = used | 1 << i;
            go(used, k, q, pair, w.saturating_add(q.bdist[i]), m ^ q.bmask[i], best);
            for j in i + 1..k {
                if used >> j & 1 == 0 {
                    let (d, dm) = pair[i * k + j];
                    go(used | 1 << j, k, q, pair, w.saturating_add(d), m ^ dm, best);
                }
            }
        }
        go(0, k, &q, &pair, 0, 0, &mut best);
        if best.optimal_pairings == 0 {
            return Err(DecodeError::Unmatchable(flagged[0]));
        }
        Ok(best)
    }

    /// Number of shots whose predicted mask differs from the observed one.
    pub fn logical_error_count(&self, samples: &SampleResult) -> Result<u64, DecodeError> {
        if samples.detectors.cols() != self.graph.num_detectors {
            return Err(DecodeError::DimensionMismatch { samples: samples.detectors.cols(), graph: self.graph.num_detectors });
        }
        let shots = samples.shots as usize;
        (0..shots)
            .into_par_iter()
            .with_min_len(64)
            .map(|s| {
                let flagged: Vec<u32> = samples.detectors.ones(s).collect();
                let predicted = self.decode(&flagged)?;
                let actual = samples.observables.row(s).first().copied().unwrap_or(0);
                Ok((predicted != actual) as u64)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }
}

/// Compare decoded predictions with the sampled observables.
pub fn logical_error_count(samples: &SampleResult, decoder: &Decoder) -> Result<u64, DecodeError> {
    decoder.logical_error_count(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::{ArchitectureParams, CodeVariant, MemoryBasis};
    use crate::circuit::build_memory_experiment;
    use crate::dem::{build_dem, ErrorMechanism};
    use crate::noise::{Bias, NoiseParams};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dem(mechs: &[(f64, &[u32], u64)], nd: usize) -> DetectorErrorModel {
        DetectorErrorModel {
            mechanisms: mechs.iter().map(|&(p, d, m)| ErrorMechanism { probability: p, detectors: d.to_vec(), observable_mask: m }).collect(),
            num_detectors: nd,
            num_observables: 1,
        }
    }

    fn memory_decoder(d: u32, rounds: u32, p: f64) -> Decoder {
        let arch = ArchitectureParams::new(2, 3, d, CodeVariant::Xzzx, MemoryBasis::H).unwrap();
        let c = build_memory_experiment(&arch, &NoiseParams::new(p, Bias::Finite(100.0)).unwrap(), rounds).unwrap();
        Decoder::from_dem(&build_dem(&c).unwrap()).unwrap()
    }

    #[test]
    fn single_edge_weight() {
        let g = MatchingGraph::from_dem(&dem(&[(0.01, &[3, 7], 0)], 8)).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert!((g.edges[0].weight - 99f64.ln()).abs() < 1e-12);
        assert!((g.edges[0].weight - 4.595).abs() < 1e-3);
        let g = MatchingGraph::from_dem(&dem(&[(0.01, &[5], 1)], 8)).unwrap();
        assert_eq!((g.edges[0].u, g.edges[0].v), (5, None));
    }

    #[test]
    fn rejects_bad_models() {
        assert!(matches!(MatchingGraph::from_dem(&dem(&[(0.5, &[0, 1], 0)], 2)), Err(DecodeError::ProbabilityTooHigh { .. })));
        assert!(matches!(MatchingGraph::from_dem(&dem(&[(0.1, &[0, 1, 2], 0)], 3)), Err(DecodeError::NotDecomposed(_))));
    }

    #[test]
    fn parallel_edges_keep_likelier_mask() {
        let g = MatchingGraph::from_dem(&dem(&[(0.01, &[0, 1], 1), (0.02, &[0, 1], 0)], 2)).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].observable_mask, 0);
        assert!((g.edges[0].probability - merge_probability(0.01, 0.02)).abs() < 1e-15);
    }

    #[test]
    fn small_decodes() {
        // 0 - 1 cheap, both far from the boundary.
        let d = Decoder::from_dem(&dem(&[(0.1, &[0, 1], 1), (0.001, &[0], 0), (0.001, &[1], 0)], 2)).unwrap();
        assert_eq!(d.decode(&[]).unwrap(), 0);
        assert_eq!(d.decode(&[0, 1]).unwrap(), 1);
        let b = d.brute_force_decode(&[0]).unwrap();
        assert_eq!(b.weight, d.distance(0, 2).0);
        assert_eq!(d.brute_force_decode(&[]).unwrap(), BruteForceResult { weight: 0, mask: 0, optimal_pairings: 1 });
        assert!(matches!(d.decode(&[5]), Err(DecodeError::DetectorOutOfRange(5))));
        let iso = Decoder::from_dem(&dem(&[(0.1, &[0, 1], 0)], 3)).unwrap();
        assert!(matches!(iso.decode(&[2]), Err(DecodeError::Unmatchable(2))));
        assert!(matches!(iso.brute_force_decode(&(0..13).map(|_| 0).collect::<Vec<_>>()), Err(DecodeError::TooManyFlagged(13))));
    }

    /// Floyd–Warshall over the same integer weights, boundary as a sink.
    #[test]
    fn dijkstra_matches_floyd_warshall() {
        let dec = memory_decoder(3, 3, 0.002);
        let g = dec.graph();
        let n = g.num_detectors;
        let b = n;
        let mut d = vec![vec![INF; n]; n];
        let mut bd = vec![INF; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for e in &g.edges {
            let w = e.units as u64;
            match e.v {
                Some(v) => {
                    let (u, v) = (e.u as usize, v as usize);
                    d[u][v] = d[u][v].min(w);
                    d[v][u] = d[v][u].min(w);
                }
                None => bd[e.u as usize] = bd[e.u as usize].min(w),
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k].saturating_add(d[k][j]);
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        for i in 0..n {
            let to_b = (0..n).map(|k| d[i][k].saturating_add(bd[k])).min().unwrap();
            assert_eq!(dec.distance(i as u32, b as u32).0, to_b);
            for j in 0..n {
                assert_eq!(dec.distance(i as u32, j as u32).0, d[i][j]);
            }
        }
    }

    #[test]
    fn distances_are_symmetric_metric() {
        let dec = memory_decoder(3, 3, 0.002);
        let n = dec.graph().num_detectors as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..=n));
            assert_eq!(dec.distance(a, b), dec.distance(b, a));
            assert!(dec.distance(a, c).0 <= dec.distance(a, b).0 + dec.distance(b, c).0);
        }
    }

    #[test]
    fn on_demand_paths_match_table() {
        let dec = memory_decoder(3, 2, 0.002);
        let lazy = Decoder { graph: dec.graph().clone(), paths: Paths::OnDemand };
        let n = dec.graph().num_detectors as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let mut f: Vec<u32> = (0..rng.gen_range(0..10)).map(|_| rng.gen_range(0..n)).collect();
            f.sort_unstable();
            f.dedup();
            assert_eq!(lazy.decode_with_weight(&f), dec.decode_with_weight(&f));
        }
    }

    #[test]
    fn decode_agrees_with_brute_force() {
        for (d, rounds) in [(3, 3), (5, 5)] {
            let dec = memory_decoder(d, rounds, 0.002);
            let n = dec.graph().num_detectors as u32;
            let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
            for _ in 0..300 {
                let mut f: Vec<u32> = (0..rng.gen_range(1..=BRUTE_FORCE_LIMIT)).map(|_| rng.gen_range(0..n)).collect();
                f.sort_unstable();
                f.dedup();
                let (w, m) = dec.decode_with_weight(&f).unwrap();
                let b = dec.brute_force_decode(&f).unwrap();
                assert_eq!(w, b.weight, "{f:?}");
                if b.optimal_pairings == 1 {
                    assert_eq!(m, b.mask, "{f:?}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        /// Scaling every weight by a constant leaves the optimum unchanged.
        #[test]
        fn matching_is_scale_invariant(seed in 0u64..1000, factor in 2u32..5) {
            let dec = memory_decoder(3, 3, 0.003);
            let scaled = Decoder::new(dec.graph().scaled(factor));
            let n = dec.graph().num_detectors as u32;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut f: Vec<u32> = (0..rng.gen_range(1..12)).map(|_| rng.gen_range(0..n)).collect();
            f.sort_unstable();
            f.dedup();
            let (w, m) = dec.decode_with_weight(&f).unwrap();
            let (ws, ms) = scaled.decode_with_weight(&f).unwrap();
            prop_assert_eq!(ws, w * factor as u64);
            if dec.brute_force_decode(&f).unwrap().optimal_pairings == 1 {
                prop_assert_eq!(ms, m);
            }
        }
    }
}
