//! Deciding whether every legal vertex coloring of a bicolored graph is
//! realised by some perfect matching.

pub mod bench;
pub mod check;
pub mod cnf;
pub mod coloring;
pub mod encode;
pub mod error;
pub mod files;
pub mod generate;
pub mod graph;
pub mod matching;
pub mod oracle;
pub mod solver;

pub use coloring::{LegalColoringSpec, VertexColoring};
pub use error::{Error, Result};
pub use graph::{BicoloredGraph, Color, Edge, Vertex, BLUE, RED};
pub use matching::{enum_blossom, has_perfect_matching, max_matching, Decision};
