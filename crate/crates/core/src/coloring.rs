//! Vertex colorings and the legal-coloring families (GHZ, W, Dicke, explicit).

use std::fmt;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BicoloredGraph, Color, Vertex};

/// Default cap on eagerly materialized coloring lists.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 22;

/// A total map `c: V -> {1..d}`; entry `v - 1` holds `c(v)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexColoring(Vec<Color>);

impl VertexColoring {
    pub fn new(colors: Vec<Color>) -> Self {
        assert!(colors.iter().all(|&c| c >= 1), "colors are 1-based");
        VertexColoring(colors)
    }

    pub fn monochromatic(n: usize, color: Color) -> Self {
        VertexColoring(vec![color; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn color(&self, v: Vertex) -> Color {
        self.0[v - 1]
    }

    pub fn colors(&self) -> &[Color] {
        &self.0
    }

    /// `count(c, i)`.
    pub fn count(&self, i: Color) -> usize {
        self.0.iter().filter(|&&c| c == i).count()
    }

    pub fn max_color(&self) -> Color {
        self.0.iter().copied().max().unwrap_or(1)
    }
}

impl fmt::Display for VertexColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

/// A set `C` of legal colorings, either by constraint or by listing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LegalColoringSpec {
    /// Monochromatic colorings.
    Ghz {
        n: usize,
        d: usize,
    },
    /// Exactly one vertex of color 1 (`d = 2`).
    W {
        n: usize,
    },
    /// Exactly `k` vertices of color 1 (`d = 2`).
    Dicke {
        n: usize,
        k: usize,
    },
    Explicit {
        n: usize,
        colorings: Vec<VertexColoring>,
    },
}

impl LegalColoringSpec {
    pub fn ghz(n: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidSpec("GHZ needs d >= 1".into()));
        }
        Ok(Self::Ghz { n, d })
    }

    pub fn w(n: usize) -> Self {
        Self::W { n }
    }

    pub fn dicke(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidSpec(format!("Dicke({n},{k}) needs k <= n")));
        }
        Ok(Self::Dicke { n, k })
    }

    pub fn explicit(n: usize, colorings: Vec<VertexColoring>) -> Result<Self> {
        if let Some(bad) = colorings.iter().find(|c| c.n() != n) {
            return Err(Error::InvalidSpec(format!(
                "explicit coloring {bad} does not have length {n}"
            )));
        }
        Ok(Self::Explicit { n, colorings })
    }

    /// Parses the CLI form: `ghz`, `ghz:<d>`, `w`, `dicke:<k>`. `n` and the
    /// default `d` come from the graph.
    pub fn parse(text: &str, n: usize, d: usize) -> Result<Self> {
        let (name, arg) = match text.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (text, None),
        };
        let number = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::InvalidSpec(format!("bad number {s:?} in {text:?}: {e}")))
        };
        match (name.to_ascii_lowercase().as_str(), arg) {
            ("ghz", None) => Self::ghz(n, d),
            ("ghz", Some(a)) => Self::ghz(n, number(a)?),
            ("w", None) => Ok(Self::w(n)),
            ("dicke", Some(a)) => Self::dicke(n, number(a)?),
            _ => Err(Error::InvalidSpec(format!(
                "unknown coloring spec {text:?}; expected ghz[:d], w, dicke:k or an explicit file"
            ))),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Ghz { n, .. } | Self::W { n } | Self::Dicke { n, .. } | Self::Explicit { n, .. } => *n,
        }
    }

    /// Colors the family ranges over. `None` for explicit lists.
    pub fn required_d(&self) -> Option<usize> {
        match self {
            Self::Ghz { d, .. } => Some(*d),
            Self::W { .. } | Self::Dicke { .. } => Some(2),
            Self::Explicit { .. } => None,
        }
    }

    /// Rejects specs that do not fit `g`: wrong vertex count, W/Dicke on
    /// `d != 2`, colors outside `1..=d`.
    pub fn check_graph(&self, g: &BicoloredGraph) -> Result<()> {
        if self.n() != g.n() {
            return Err(Error::InvalidSpec(format!(
                "spec is over {} vertices but the graph has {}",
                self.n(),
                g.n()
            )));
        }
        match self {
            Self::Ghz { d, .. } if *d != g.d() => Err(Error::InvalidSpec(format!(
                "GHZ over {d} colors on a graph with d = {}",
                g.d()
            ))),
            Self::W { .. } | Self::Dicke { .. } if g.d() != 2 => Err(Error::InvalidSpec(format!(
                "W and Dicke colorings need d = 2, graph has d = {}",
                g.d()
            ))),
            Self::Explicit { colorings, .. } => match colorings.iter().find(|c| c.max_color() > g.d()) {
                Some(bad) => Err(Error::InvalidSpec(format!(
                    "coloring {bad} uses a color above d = {}",
                    g.d()
                ))),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// `|C|`, computed without enumerating.
    pub fn cardinality(&self) -> u128 {
        match self {
            Self::Ghz { d, .. } => *d as u128,
            Self::W { n } => *n as u128,
            Self::Dicke { n, k } => binomial(*n as u128, *k as u128),
            Self::Explicit { colorings, .. } => colorings.len() as u128,
        }
    }

    /// Membership test in time linear in `n` (explicit lists: linear in `|C|`).
    pub fn contains(&self, c: &VertexColoring) -> bool {
        if c.n() != self.n() {
            return false;
        }
        match self {
            Self::Ghz { d, .. } => {
                let first = c.colors().first().copied().unwrap_or(1);
                first <= *d && c.colors().iter().all(|&x| x == first)
            }
            Self::W { .. } => c.colors().iter().all(|&x| x <= 2) && c.count(1) == 1,
            Self::Dicke { k, .. } => c.colors().iter().all(|&x| x <= 2) && c.count(1) == *k,
            Self::Explicit { colorings, .. } => colorings.contains(c),
        }
    }

    /// Lazily enumerates `C` in lexicographic order (explicit lists in
    /// their given order).
    pub fn colorings(&self) -> Box<dyn Iterator<Item = VertexColoring> + '_> {
        match self {
            Self::Ghz { n, d } => Box::new((1..=*d).map(move |i| VertexColoring::monochromatic(*n, i))),
            Self::W { n } => Box::new(ones_at(*n, 1)),
            Self::Dicke { n, k } => Box::new(ones_at(*n, *k)),
            Self::Explicit { colorings, .. } => Box::new(colorings.iter().cloned()),
        }
    }

    /// Materializes `C`, refusing when `|C|` exceeds `cap`.
    pub fn collect_colorings(&self, cap: u128) -> Result<Vec<VertexColoring>> {
        let count = self.cardinality();
        if count > cap {
            return Err(Error::EnumerationCap { count, cap });
        }
        Ok(self.colorings().collect())
    }

    /// `C` as a seeded random permutation.
    pub fn shuffled_colorings(&self, seed: u64, cap: u128) -> Result<Vec<VertexColoring>> {
        let mut all = self.collect_colorings(cap)?;
        all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Ok(all)
    }

    /// Whether every permutation of `set` maps `C` onto itself.
    pub fn is_invariant_under(&self, set: &[Vertex]) -> bool {
        match self {
            Self::Ghz { .. } | Self::W { .. } | Self::Dicke { .. } => true,
            Self::Explicit { colorings, .. } => set.windows(2).all(|w| {
                colorings.iter().all(|c| {
                    let mut swapped = c.colors().to_vec();
                    swapped.swap(w[0] - 1, w[1] - 1);
                    colorings.contains(&VertexColoring(swapped))
                })
            }),
        }
    }
}

impl fmt::Display for LegalColoringSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ghz { n, d } => write!(f, "GHZ({n},{d})"),
            Self::W { n } => write!(f, "W({n})"),
            Self::Dicke { n, k } => write!(f, "Dicke({n},{k})"),
            Self::Explicit { n, colorings } => write!(f, "Explicit({n}, {} colorings)", colorings.len()),
        }
    }
}

/// Colorings over `{1,2}` with exactly `k` ones, in lexicographic order.
fn ones_at(n: usize, k: usize) -> impl Iterator<Item = VertexColoring> {
    (0..n).combinations(k).map(move |positions| {
        let mut colors = vec![2; n];
        for p in positions {
            colors[p] = 1;
        }
        VertexColoring(colors)
    })
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[Color]) -> VertexColoring {
        VertexColoring::new(v.to_vec())
    }

    #[test]
    fn count_color() {
        assert_eq!(col(&[1, 1, 2]).count(1), 2);
        assert_eq!(col(&[2, 2, 2]).count(1), 0);
        let c = col(&[1, 3, 2, 3, 3]);
        assert_eq!((1..=3).map(|i| c.count(i)).sum::<usize>(), c.n());
    }

    #[test]
    fn enumerate_families() {
        let ghz: Vec<_> = LegalColoringSpec::ghz(3, 2).unwrap().colorings().collect();
        assert_eq!(ghz, vec![col(&[1, 1, 1]), col(&[2, 2, 2])]);
        let w: Vec<_> = LegalColoringSpec::w(3).colorings().collect();
        assert_eq!(w, vec![col(&[1, 2, 2]), col(&[2, 1, 2]), col(&[2, 2, 1])]);
        let dicke = LegalColoringSpec::dicke(6, 3).unwrap();
        let all: Vec<_> = dicke.colorings().collect();
        assert_eq!(all.len(), 20);
        assert!(all.windows(2).all(|w| w[0] < w[1]), "lexicographic and distinct");
        assert!(all.iter().all(|c| dicke.contains(c)));
    }

    #[test]
    fn membership() {
        assert!(LegalColoringSpec::dicke(6, 2)
            .unwrap()
            .contains(&col(&[1, 2, 2, 1, 2, 2])));
        assert!(!LegalColoringSpec::ghz(4, 2).unwrap().contains(&col(&[1, 1, 2, 2])));
        assert!(!LegalColoringSpec::w(4).contains(&col(&[1, 1, 2, 2])));
        assert!(!LegalColoringSpec::w(4).contains(&col(&[1, 2, 2])));
    }

    #[test]
    fn enumeration_cap() {
        let spec = LegalColoringSpec::dicke(30, 15).unwrap();
        assert!(matches!(
            spec.collect_colorings(1000),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn shuffle_is_seeded_permutation() {
        let spec = LegalColoringSpec::dicke(6, 2).unwrap();
        let a = spec.shuffled_colorings(7, 100).unwrap();
        assert_eq!(a, spec.shuffled_colorings(7, 100).unwrap());
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(sorted, spec.collect_colorings(100).unwrap());
    }

    #[test]
    fn parse_specs() {
        assert_eq!(
            LegalColoringSpec::parse("dicke:2", 6, 2).unwrap(),
            LegalColoringSpec::Dicke { n: 6, k: 2 }
        );
        assert_eq!(
            LegalColoringSpec::parse("ghz", 4, 3).unwrap(),
            LegalColoringSpec::Ghz { n: 4, d: 3 }
        );
        assert!(LegalColoringSpec::parse("dicke:7", 6, 2).is_err());
        assert!(LegalColoringSpec::parse("bell", 6, 2).is_err());
    }

    #[test]
    fn explicit_invariance() {
        let spec = LegalColoringSpec::explicit(3, vec![col(&[1, 2, 2]), col(&[2, 1, 2])]).unwrap();
        assert!(spec.is_invariant_under(&[1, 2]));
        assert!(!spec.is_invariant_under(&[2, 3]));
    }
}
