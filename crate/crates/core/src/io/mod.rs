//! Text formats and Graphviz export.

pub mod dot;
pub mod text;

pub use text::{parse_cfg, parse_epda, parse_parser, write_cfg, write_epda, write_parser, Names};
