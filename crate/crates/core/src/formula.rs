//! Objects of the free categories: formulas over propositional letters,
//! the constants I and O, and the binary connectives `*` (product) and
//! `+` (sum).

use std::fmt;

use serde::{Serialize, Serializer};

/// A formula of the propositional language, i.e. an object of the free
/// category. Letters are lowercase identifiers; `Terminal` is the constant
/// I and `Initial` the constant O.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Letter(String),
    Terminal,
    Initial,
    Prod(Box<Formula>, Box<Formula>),
    Sum(Box<Formula>, Box<Formula>),
}

/// One step of a root-to-leaf path inside a formula tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A root-to-subformula path.
pub type Path = Vec<Side>;

impl Formula {
    pub fn letter(name: &str) -> Formula {
        Formula::Letter(name.to_string())
    }

    pub fn prod(left: Formula, right: Formula) -> Formula {
        Formula::Prod(Box::new(left), Box::new(right))
    }

    pub fn sum(left: Formula, right: Formula) -> Formula {
        Formula::Sum(Box::new(left), Box::new(right))
    }

    /// Number of letter occurrences; additive over `Prod` and `Sum`,
    /// zero on the constants.
    pub fn letter_count(&self) -> usize {
        match self {
            Formula::Letter(_) => 1,
            Formula::Terminal | Formula::Initial => 0,
            Formula::Prod(a, b) | Formula::Sum(a, b) => a.letter_count() + b.letter_count(),
        }
    }

    /// The subformula addressed by `path`, if the path stays inside the tree.
    pub fn subformula_at(&self, path: &[Side]) -> Option<&Formula> {
        match path.split_first() {
            None => Some(self),
            Some((side, rest)) => match self {
                Formula::Prod(a, b) | Formula::Sum(a, b) => match side {
                    Side::Left => a.subformula_at(rest),
                    Side::Right => b.subformula_at(rest),
                },
                _ => None,
            },
        }
    }

    /// Root-to-leaf path of the `x`-th letter occurrence (0-based, counted
    /// left to right). Every subformula on the path is one the occurrence
    /// belongs to.
    pub fn occurrence_home(&self, x: usize) -> Result<Path, OccurrenceError> {
        let total = self.letter_count();
        if x >= total {
            return Err(OccurrenceError { index: x, count: total });
        }
        let mut path = Vec::new();
        let mut node = self;
        let mut idx = x;
        loop {
            match node {
                Formula::Letter(_) => return Ok(path),
                Formula::Prod(a, b) | Formula::Sum(a, b) => {
                    let left = a.letter_count();
                    if idx < left {
                        path.push(Side::Left);
                        node = a;
                    } else {
                        path.push(Side::Right);
                        idx -= left;
                        node = b;
                    }
                }
                // Constants hold no occurrences, so the walk cannot land here.
                Formula::Terminal | Formula::Initial => unreachable!("occurrence walk hit a constant"),
            }
        }
    }

    /// Index of the first letter occurrence lying inside the subformula at
    /// `path`, i.e. the offset of that region in the left-to-right order.
    pub fn occurrence_offset(&self, path: &[Side]) -> Option<usize> {
        let mut node = self;
        let mut offset = 0;
        for side in path {
            match node {
                Formula::Prod(a, b) | Formula::Sum(a, b) => match side {
                    Side::Left => node = a,
                    Side::Right => {
                        offset += a.letter_count();
                        node = b;
                    }
                },
                _ => return None,
            }
        }
        Some(offset)
    }

    /// Replaces the subformula at `path` by `replacement`.
    pub fn replace_at(&self, path: &[Side], replacement: Formula) -> Option<Formula> {
        match path.split_first() {
            None => Some(replacement),
            Some((side, rest)) => match self {
                Formula::Prod(a, b) => match side {
                    Side::Left => Some(Formula::prod(a.replace_at(rest, replacement)?, (**b).clone())),
                    Side::Right => Some(Formula::prod((**a).clone(), b.replace_at(rest, replacement)?)),
                },
                Formula::Sum(a, b) => match side {
                    Side::Left => Some(Formula::sum(a.replace_at(rest, replacement)?, (**b).clone())),
                    Side::Right => Some(Formula::sum((**a).clone(), b.replace_at(rest, replacement)?)),
                },
                _ => None,
            },
        }
    }

    /// Applies `f` to every letter name, rebuilding the tree.
    pub fn map_letters(&self, f: &impl Fn(&str) -> String) -> Formula {
        match self {
            Formula::Letter(name) => Formula::Letter(f(name)),
            Formula::Terminal => Formula::Terminal,
            Formula::Initial => Formula::Initial,
            Formula::Prod(a, b) => Formula::prod(a.map_letters(f), b.map_letters(f)),
            Formula::Sum(a, b) => Formula::sum(a.map_letters(f), b.map_letters(f)),
        }
    }

    pub fn letters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut Vec<String>) {
        match self {
            Formula::Letter(name) => {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
            Formula::Terminal | Formula::Initial => {}
            Formula::Prod(a, b) | Formula::Sum(a, b) => {
                a.collect_letters(out);
                b.collect_letters(out);
            }
        }
    }

    fn fmt_nested(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Prod(..) | Formula::Sum(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

/// Renders the compact text form: binary nodes parenthesized except at the
/// root, e.g. `(p*(q+p))+(I*p)`.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Letter(name) => write!(f, "{name}"),
            Formula::Terminal => write!(f, "I"),
            Formula::Initial => write!(f, "O"),
            Formula::Prod(a, b) => {
                a.fmt_nested(f)?;
                write!(f, "*")?;
                b.fmt_nested(f)
            }
            Formula::Sum(a, b) => {
                a.fmt_nested(f)?;
                write!(f, "+")?;
                b.fmt_nested(f)
            }
        }
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("occurrence index {index} out of range: formula has {count} letter occurrences")]
pub struct OccurrenceError {
    pub index: usize,
    pub count: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::letter("p")
    }
    fn q() -> Formula {
        Formula::letter("q")
    }

    #[test]
    fn letter_count_counts_leaves() {
        // (p*(q+p))+(I*p) has 4 letter occurrences
        let a = Formula::sum(
            Formula::prod(p(), Formula::sum(q(), p())),
            Formula::prod(Formula::Terminal, p()),
        );
        assert_eq!(a.letter_count(), 4);
        assert_eq!(p().letter_count(), 1);
        assert_eq!(Formula::Terminal.letter_count(), 0);
        assert_eq!(Formula::Initial.letter_count(), 0);
    }

    #[test]
    fn letter_count_additive() {
        let a = Formula::prod(p(), q());
        let b = Formula::sum(q(), Formula::Terminal);
        assert_eq!(
            Formula::prod(a.clone(), b.clone()).letter_count(),
            a.letter_count() + b.letter_count()
        );
        assert_eq!(
            Formula::sum(a.clone(), b.clone()).letter_count(),
            a.letter_count() + b.letter_count()
        );
    }

    #[test]
    fn occurrence_home_walks_to_leaf() {
        // (p+q)*p, occurrence 2 is the rightmost p
        let a = Formula::prod(Formula::sum(p(), q()), p());
        assert_eq!(a.occurrence_home(2).unwrap(), vec![Side::Right]);
        assert_eq!(a.occurrence_home(0).unwrap(), vec![Side::Left, Side::Left]);
        assert_eq!(p().occurrence_home(0).unwrap(), Vec::<Side>::new());
        // I holds no occurrences
        let b = Formula::prod(Formula::Terminal, p());
        assert_eq!(b.occurrence_home(0).unwrap(), vec![Side::Right]);
    }

    #[test]
    fn occurrence_home_out_of_range() {
        let a = Formula::prod(p(), q());
        assert!(a.occurrence_home(2).is_err());
        assert!(Formula::Terminal.occurrence_home(0).is_err());
    }

    #[test]
    fn display_compact() {
        let a = Formula::sum(
            Formula::prod(p(), Formula::sum(q(), p())),
            Formula::prod(Formula::Terminal, p()),
        );
        assert_eq!(a.to_string(), "(p*(q+p))+(I*p)");
    }

    #[test]
    fn occurrence_offset_matches_home() {
        let a = Formula::sum(Formula::prod(p(), q()), Formula::prod(q(), p()));
        let path = a.occurrence_home(3).unwrap();
        // the leaf's offset is the occurrence index itself
        assert_eq!(a.occurrence_offset(&path), Some(3));
        assert_eq!(a.occurrence_offset(&[Side::Right]), Some(2));
    }

    #[test]
    fn replace_at_swaps_subtree() {
        let a = Formula::prod(Formula::sum(p(), q()), p());
        let b = a.replace_at(&[Side::Left], q()).unwrap();
        assert_eq!(b, Formula::prod(q(), p()));
        assert!(a.replace_at(&[Side::Left, Side::Left, Side::Left], q()).is_none());
    }
}
