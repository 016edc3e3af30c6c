//! Graph files, their metadata sidecars, and inline generator sources.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::generate::{self, GraphMeta, MutationMode};
use crate::graph::BicoloredGraph;

/// `<graph>.meta.json`.
pub fn meta_path(graph: &Path) -> PathBuf {
    let mut s = graph.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Reads a `.json` or text graph plus its sidecar if present.
pub fn read_graph(path: &Path) -> Result<(BicoloredGraph, Option<GraphMeta>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let g = if path.extension().is_some_and(|e| e == "json") {
        BicoloredGraph::from_json(&text)?
    } else {
        BicoloredGraph::from_text(&text)?
    };
    let mp = meta_path(path);
    let meta = if mp.exists() {
        let text = std::fs::read_to_string(&mp).map_err(|e| Error::io(&mp, e))?;
        Some(serde_json::from_str(&text)?)
    } else {
        None
    };
    Ok((g, meta))
}

pub fn write_graph(path: &Path, g: &BicoloredGraph, meta: Option<&GraphMeta>) -> Result<()> {
    let text = if path.extension().is_some_and(|e| e == "json") {
        g.to_json()
    } else {
        g.to_text()
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    if let Some(meta) = meta {
        let mp = meta_path(path);
        let json = serde_json::to_string_pretty(meta)?;
        std::fs::write(&mp, json + "\n").map_err(|e| Error::io(&mp, e))?;
    }
    Ok(())
}

fn numbers(args: &str, want: usize, src: &str) -> Result<Vec<usize>> {
    let nums: Vec<usize> = args
        .split(',')
        .map(|a| a.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidParams(format!("bad numbers in {src:?}")))?;
    if nums.len() != want {
        return Err(Error::InvalidParams(format!("{src:?} needs {want} numbers")));
    }
    Ok(nums)
}

/// Default attempts when searching seeds for a violating mutant.
pub const MUTANT_ATTEMPTS: u64 = 1000;

/// Resolves `dicke:N,K`, `kbip:A,B`, `ghz-cycle:N`,
/// `mutant:N,K,MODE,SEED` or a file path (relative to `base`).
pub fn graph_source(src: &str, base: &Path) -> Result<(BicoloredGraph, Option<GraphMeta>)> {
    let Some((kind, args)) = src.split_once(':') else {
        return read_graph(&base.join(src));
    };
    match kind {
        "dicke" => {
            let v = numbers(args, 2, src)?;
            Ok((
                generate::dicke_graph(v[0], v[1])?,
                Some(generate::dicke_meta(v[0], v[1])),
            ))
        }
        "kbip" => {
            let v = numbers(args, 2, src)?;
            Ok((
                generate::complete_bipartite(v[0], v[1])?,
                Some(generate::complete_bipartite_meta(v[0], v[1])),
            ))
        }
        "ghz-cycle" => {
            let v = numbers(args, 1, src)?;
            let g = generate::ghz_cycle(v[0])?;
            let mut meta = GraphMeta::new("ghz-cycle");
            meta.legal = Some(crate::LegalColoringSpec::ghz(v[0], 2)?);
            Ok((g, Some(meta)))
        }
        "mutant" => {
            let parts: Vec<&str> = args.split(',').collect();
            let [n, k, mode, seed] = parts.as_slice() else {
                return Err(Error::InvalidParams(format!("{src:?} needs N,K,MODE,SEED")));
            };
            let parse = |x: &str| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidParams(format!("bad number {x:?} in {src:?}")))
            };
            let (n, k) = (parse(n)? as usize, parse(k)? as usize);
            let mode = MutationMode::parse(mode)?;
            let (g, used) = generate::violating_mutant(n, k, mode, parse(seed)?, MUTANT_ATTEMPTS)?;
            let meta = generate::mutant_meta(n, k, mode, used, &g);
            Ok((g, Some(meta)))
        }
        _ => read_graph(&base.join(src)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sources_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let (g, meta) = graph_source("dicke:6,2", dir.path()).unwrap();
        assert_eq!(g.edge_count(), 22);
        let path = dir.path().join("d.graph");
        write_graph(&path, &g, meta.as_ref()).unwrap();
        let (back, meta_back) = graph_source("d.graph", dir.path()).unwrap();
        assert_eq!(back, g);
        assert_eq!(meta_back, meta);
        assert!(graph_source("kbip:2", dir.path()).is_err());
        assert!(graph_source("missing.graph", dir.path()).is_err());
        let (m, meta) = graph_source("mutant:6,2,bicolored:1,0", dir.path()).unwrap();
        assert_eq!(m.edge_count(), 21);
        assert_eq!(meta.unwrap().family, "mutant");
    }
}
