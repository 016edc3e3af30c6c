//! Benchmark and fixture generators: Dicke graphs, complete bipartite
//! graphs, refutation mutants and small named graphs.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coloring::LegalColoringSpec;
use crate::error::{Error, Result};
use crate::graph::{BicoloredGraph, Edge, Vertex, BLUE, RED};
use crate::matching::{enum_blossom, Decision};

/// Sidecar written next to generated graph files.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub family: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legal: Option<LegalColoringSpec>,
    /// Vertex sets known to be fully symmetric in the graph.
    #[serde(default)]
    pub symmetric_sets: Vec<Vec<Vertex>>,
}

impl GraphMeta {
    pub fn new(family: &str) -> Self {
        GraphMeta {
            family: family.to_string(),
            ..Default::default()
        }
    }

    fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

/// Uncolored cycle `C_n`.
pub fn cycle(n: usize) -> BicoloredGraph {
    BicoloredGraph::uncolored(n, (1..=n).map(|i| (i, i % n + 1))).expect("cycle is valid for n >= 3")
}

/// Uncolored complete graph `K_n`.
pub fn complete(n: usize) -> BicoloredGraph {
    let pairs = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v)));
    BicoloredGraph::uncolored(n, pairs).expect("complete graph is valid")
}

pub fn petersen() -> BicoloredGraph {
    let mut pairs = Vec::new();
    for i in 0..5 {
        pairs.push((i + 1, (i + 1) % 5 + 1));
        pairs.push((i + 1, i + 6));
        pairs.push((i + 6, (i + 2) % 5 + 6));
    }
    BicoloredGraph::uncolored(10, pairs).expect("petersen graph is valid")
}

/// `K_{a,b}` with parts `1..=a` and `a+1..=a+b`, uncolored (`d = 1`).
pub fn complete_bipartite(a: usize, b: usize) -> Result<BicoloredGraph> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidParams(format!(
            "K_{{{a},{b}}} needs both parts non-empty"
        )));
    }
    let pairs = (1..=a).flat_map(|u| (a + 1..=a + b).map(move |v| (u, v)));
    BicoloredGraph::uncolored(a + b, pairs)
}

pub fn complete_bipartite_meta(a: usize, b: usize) -> GraphMeta {
    let mut meta = GraphMeta::new("complete-bipartite").param("a", a).param("b", b);
    meta.legal = Some(LegalColoringSpec::Ghz { n: a + b, d: 1 });
    meta.symmetric_sets = vec![(1..=a).collect(), (a + 1..=a + b).collect()];
    meta
}

/// Even cycle with alternating red-red and blue-blue edges; both
/// monochromatic colorings have a perfect matching.
pub fn ghz_cycle(n: usize) -> Result<BicoloredGraph> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::InvalidParams(format!("GHZ cycle needs an even n >= 4, got {n}")));
    }
    let edges = (1..=n)
        .map(|i| {
            let c = if i % 2 == 1 { RED } else { BLUE };
            Edge::new(i, c, i % n + 1, c)
        })
        .collect();
    BicoloredGraph::new(n, 2, edges)
}

fn check_dicke_params(n: usize, k: usize) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidParams(format!("Dicke graph needs an even n, got {n}")));
    }
    if k == 0 || k > n / 2 {
        return Err(Error::InvalidParams(format!(
            "Dicke graph needs 1 <= k <= n/2, got k = {k}, n = {n}"
        )));
    }
    Ok(())
}

/// `DickeGraph(n, k)`: `V1 = 1..=k`, `V2 = k+1..=n`. Every `V1 x V2` pair gets a
/// red-blue and a blue-red edge, every `V2` pair a blue-blue edge.
pub fn dicke_graph(n: usize, k: usize) -> Result<BicoloredGraph> {
    check_dicke_params(n, k)?;
    let mut edges = Vec::with_capacity(2 * k * (n - k) + (n - k) * (n - k - 1) / 2);
    for u in 1..=k {
        for v in k + 1..=n {
            edges.push(Edge::new(u, RED, v, BLUE));
            edges.push(Edge::new(u, BLUE, v, RED));
        }
    }
    for u in k + 1..=n {
        for v in u + 1..=n {
            edges.push(Edge::new(u, BLUE, v, BLUE));
        }
    }
    BicoloredGraph::new(n, 2, edges)
}

pub fn dicke_meta(n: usize, k: usize) -> GraphMeta {
    let mut meta = GraphMeta::new("dicke-graph").param("n", n).param("k", k);
    meta.legal = Some(LegalColoringSpec::Dicke { n, k });
    meta.symmetric_sets = vec![(1..=k).collect(), (k + 1..=n).collect()];
    meta
}

/// Indices of the blue-red edges joining a blue `V1` endpoint to a red `V2`
/// endpoint. Removing any one of them breaks the Dicke condition.
pub fn required_bicolored_edges(g: &BicoloredGraph, k: usize) -> Vec<usize> {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.u <= k && e.v > k && e.cu == BLUE && e.cv == RED)
        .map(|(i, _)| i)
        .collect()
}

/// How a refutation mutant is derived from its base graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationMode {
    /// Remove `ceil(p * #blue)` blue-blue edges.
    RemoveBlueFraction(f64),
    /// Remove this many bicolored edges.
    RemoveBicolored(usize),
}

impl MutationMode {
    /// Parses `blue:0.4` or `bicolored:2`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidParams(format!(
                "bad mutation mode {text:?}; expected blue:<p> or bicolored:<m>"
            ))
        };
        let (kind, arg) = text.split_once(':').ok_or_else(bad)?;
        match kind {
            "blue" => {
                let p: f64 = arg.parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad());
                }
                Ok(Self::RemoveBlueFraction(p))
            }
            "bicolored" => Ok(Self::RemoveBicolored(arg.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// Removes edges uniformly at random under a seeded ChaCha8 stream.
pub fn mutate(g: &BicoloredGraph, mode: MutationMode, seed: u64) -> Result<BicoloredGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (pool, count): (Vec<usize>, usize) = match mode {
        MutationMode::RemoveBlueFraction(p) => {
            let pool: Vec<usize> = indices_where(g, |e| e.cu == BLUE && e.cv == BLUE);
            let count = (p * pool.len() as f64).ceil() as usize;
            (pool, count)
        }
        MutationMode::RemoveBicolored(m) => (indices_where(g, |e| !e.is_monochromatic()), m),
    };
    if count > pool.len() {
        return Err(Error::InvalidParams(format!(
            "cannot remove {count} edges, only {} are eligible",
            pool.len()
        )));
    }
    let chosen: Vec<usize> = sample(&mut rng, pool.len(), count)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    Ok(g.without_edges(&chosen))
}

fn indices_where(g: &BicoloredGraph, pred: impl Fn(&Edge) -> bool) -> Vec<usize> {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| pred(e))
        .map(|(i, _)| i)
        .collect()
}

/// A mutant of `DickeGraph(n, k)` that violates `Dicke(n, k)`. Seeds
/// `seed, seed + 1, ...` are tried until the mutation breaks the condition
/// (checked by enumeration). Returns the graph and the seed that produced it.
pub fn violating_mutant(
    n: usize,
    k: usize,
    mode: MutationMode,
    seed: u64,
    max_attempts: u64,
) -> Result<(BicoloredGraph, u64)> {
    let base = dicke_graph(n, k)?;
    let spec = LegalColoringSpec::dicke(n, k)?;
    for attempt in 0..max_attempts {
        let s = seed.wrapping_add(attempt);
        let g = mutate(&base, mode, s)?;
        if let Decision::Violated(_) = enum_blossom(&g, &spec, None)? {
            return Ok((g, s));
        }
    }
    Err(Error::InvalidParams(format!(
        "no violating mutant of DickeGraph({n},{k}) found in {max_attempts} attempts"
    )))
}

pub fn mutant_meta(n: usize, k: usize, mode: MutationMode, seed: u64, g: &BicoloredGraph) -> GraphMeta {
    let mut meta = GraphMeta::new("mutant")
        .param("n", n)
        .param("k", k)
        .param("mode", serde_json::to_value(mode).expect("mode serializes"))
        .param("seed", seed);
    meta.legal = Some(LegalColoringSpec::Dicke { n, k });
    meta.symmetric_sets = dicke_meta(n, k)
        .symmetric_sets
        .into_iter()
        .filter(|set| g.is_symmetric_set(set))
        .collect();
    meta
}

/// Random multigraph with `m` edges and uniformly drawn endpoint colors.
pub fn random_bicolored<R: Rng>(n: usize, d: usize, m: usize, rng: &mut R) -> BicoloredGraph {
    assert!(n >= 2 || m == 0, "edges need at least two vertices");
    let edges = (0..m)
        .map(|_| {
            let u = rng.random_range(1..=n);
            let mut v = rng.random_range(1..n);
            if v >= u {
                v += 1;
            }
            Edge::new(u, rng.random_range(1..=d), v, rng.random_range(1..=d))
        })
        .collect();
    BicoloredGraph::new(n, d, edges).expect("random edges are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dicke_graph_edge_count() {
        let g = dicke_graph(6, 2).unwrap();
        assert_eq!(g.edge_count(), 22);
        assert_eq!(g.edges().iter().filter(|e| !e.is_monochromatic()).count(), 16);
        assert!(dicke_graph(6, 4).is_err());
        assert!(dicke_graph(7, 2).is_err());
        assert!(dicke_graph(6, 0).is_err());
    }

    #[test]
    fn dicke_partitions_are_symmetric() {
        let g = dicke_graph(8, 3).unwrap();
        for set in dicke_meta(8, 3).symmetric_sets {
            assert!(g.is_symmetric_set(&set));
        }
        assert!(!g.is_symmetric_set(&[3, 4]));
    }

    #[test]
    fn bipartite_and_cycles() {
        assert_eq!(complete_bipartite(2, 4).unwrap().edge_count(), 8);
        assert!(complete_bipartite(0, 4).is_err());
        assert_eq!(cycle(6).edge_count(), 6);
        assert_eq!(petersen().edge_count(), 15);
        let c = ghz_cycle(6).unwrap();
        assert_eq!(c.edges().iter().filter(|e| e.cu == RED).count(), 3);
    }

    #[test]
    fn mutation_counts_and_determinism() {
        let g = dicke_graph(6, 3).unwrap();
        let m = mutate(&g, MutationMode::RemoveBicolored(2), 0).unwrap();
        assert_eq!(m.edge_count(), g.edge_count() - 2);
        assert_eq!(m, mutate(&g, MutationMode::RemoveBicolored(2), 0).unwrap());

        let g = dicke_graph(10, 4).unwrap();
        let blue = |g: &BicoloredGraph| g.edges().iter().filter(|e| e.cu == BLUE && e.cv == BLUE).count();
        let m = mutate(&g, MutationMode::RemoveBlueFraction(0.4), 11).unwrap();
        assert_eq!(blue(&g), 15);
        assert_eq!(blue(&m), 15 - 6);

        assert!(mutate(&g, MutationMode::RemoveBicolored(1000), 0).is_err());
    }

    #[test]
    fn mutation_mode_parsing() {
        assert_eq!(
            MutationMode::parse("blue:0.4").unwrap(),
            MutationMode::RemoveBlueFraction(0.4)
        );
        assert_eq!(
            MutationMode::parse("bicolored:2").unwrap(),
            MutationMode::RemoveBicolored(2)
        );
        assert!(MutationMode::parse("blue:1.5").is_err());
        assert!(MutationMode::parse("red:1").is_err());
    }

    #[test]
    fn violating_mutants_violate() {
        let (g, _) = violating_mutant(8, 2, MutationMode::RemoveBicolored(2), 5, 50).unwrap();
        let spec = LegalColoringSpec::dicke(8, 2).unwrap();
        assert!(!enum_blossom(&g, &spec, None).unwrap().is_satisfied());
        // All blue edges of DickeGraph(n, n/2) can go without breaking it.
        assert!(violating_mutant(6, 3, MutationMode::RemoveBlueFraction(1.0), 0, 3).is_err());
    }
}
