//! Formula syntax: abstract trees, parsing and printing.

pub mod fo;
pub mod parse;
pub mod tl;

pub use fo::FoFormula;
pub use parse::{parse_fo, parse_tl, print_fo, print_tl, ParseError};
pub use tl::TlFormula;
