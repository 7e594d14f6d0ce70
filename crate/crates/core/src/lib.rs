//! Symbolic engine for free categories with binary products and sums:
//! formula and term calculi in combinator and bifunctorial style, cut
//! elimination and normalization, the relational interpretation of arrow
//! terms, a graphical decision procedure for arrow equality, a bounded
//! equational oracle, and the constructive collapse-witness machinery
//! showing the equational theory is maximal.

pub mod decide;
pub mod oracle;
pub mod formula;
pub mod gen;
pub mod fragment;
pub mod graph;
pub mod maximality;
pub mod parse;
pub mod rewrite;
pub mod term;
pub mod translate;

pub use formula::{Formula, Path, Side};
pub use fragment::{fragment_of, ConnectiveUse, Fragment};
pub use graph::{interpret, rel_compose, rel_identity, rel_juxtapose, Relation};
pub use parse::{parse_formula, parse_term, ParseError};
pub use term::{Index, Term, TermStyle, TypeError};
