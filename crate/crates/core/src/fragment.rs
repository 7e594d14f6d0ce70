//! Signature detection: which generators and connectives a term (or a set
//! of terms) actually uses, and hence which free category it lives in.

use std::fmt;

use serde::Serialize;

use crate::formula::Formula;
use crate::term::Term;

/// How a connective is used in a fragment: not at all, only through the
/// bifunctorial operation on terms (and in formulas), or with the full
/// structural generators (projections/pairing, resp. injections/copairing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ConnectiveUse {
    Absent,
    BifunctorOnly,
    Full,
}

impl ConnectiveUse {
    fn join(self, other: ConnectiveUse) -> ConnectiveUse {
        self.max(other)
    }
}

/// The generator signature of a term or family of terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fragment {
    pub has_terminal: bool,
    pub has_initial: bool,
    pub product: ConnectiveUse,
    pub sum: ConnectiveUse,
}

pub const EMPTY_FRAGMENT: Fragment = Fragment {
    has_terminal: false,
    has_initial: false,
    product: ConnectiveUse::Absent,
    sum: ConnectiveUse::Absent,
};

impl Fragment {
    pub fn join(self, other: Fragment) -> Fragment {
        Fragment {
            has_terminal: self.has_terminal || other.has_terminal,
            has_initial: self.has_initial || other.has_initial,
            product: self.product.join(other.product),
            sum: self.sum.join(other.sum),
        }
    }

    /// True when every generator allowed by `self` is allowed by `other`.
    pub fn subsumed_by(&self, other: &Fragment) -> bool {
        (!self.has_terminal || other.has_terminal)
            && (!self.has_initial || other.has_initial)
            && self.product <= other.product
            && self.sum <= other.sum
    }

    pub fn product_full(&self) -> bool {
        self.product == ConnectiveUse::Full
    }

    pub fn sum_full(&self) -> bool {
        self.sum == ConnectiveUse::Full
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.product {
            ConnectiveUse::Full => parts.push("x"),
            ConnectiveUse::BifunctorOnly => parts.push("xb"),
            ConnectiveUse::Absent => {}
        }
        match self.sum {
            ConnectiveUse::Full => parts.push("+"),
            ConnectiveUse::BifunctorOnly => parts.push("+b"),
            ConnectiveUse::Absent => {}
        }
        if self.has_terminal {
            parts.push("I");
        }
        if self.has_initial {
            parts.push("O");
        }
        if parts.is_empty() {
            write!(f, "trivial")
        } else {
            write!(f, "{}", parts.join(","))
        }
    }
}

fn scan_formula(formula: &Formula, acc: &mut Fragment) {
    match formula {
        Formula::Letter(_) => {}
        Formula::Terminal => acc.has_terminal = true,
        Formula::Initial => acc.has_initial = true,
        Formula::Prod(a, b) => {
            acc.product = acc.product.join(ConnectiveUse::BifunctorOnly);
            scan_formula(a, acc);
            scan_formula(b, acc);
        }
        Formula::Sum(a, b) => {
            acc.sum = acc.sum.join(ConnectiveUse::BifunctorOnly);
            scan_formula(a, acc);
            scan_formula(b, acc);
        }
    }
}

fn scan_term(term: &Term, acc: &mut Fragment) {
    match term {
        Term::Id(a) => scan_formula(a, acc),
        Term::Kappa(a) => {
            acc.has_terminal = true;
            scan_formula(a, acc);
        }
        Term::Lambda(a) => {
            acc.has_initial = true;
            scan_formula(a, acc);
        }
        Term::Comp(g, f) => {
            scan_term(g, acc);
            scan_term(f, acc);
        }
        Term::ProjArg { side, inner, .. } => {
            acc.product = ConnectiveUse::Full;
            scan_formula(side, acc);
            scan_term(inner, acc);
        }
        Term::InjArg { side, inner, .. } => {
            acc.sum = ConnectiveUse::Full;
            scan_formula(side, acc);
            scan_term(inner, acc);
        }
        Term::Pair(f, g) => {
            acc.product = ConnectiveUse::Full;
            scan_term(f, acc);
            scan_term(g, acc);
        }
        Term::Copair(f, g) => {
            acc.sum = ConnectiveUse::Full;
            scan_term(f, acc);
            scan_term(g, acc);
        }
        Term::Proj { left, right, .. } => {
            acc.product = ConnectiveUse::Full;
            scan_formula(left, acc);
            scan_formula(right, acc);
        }
        Term::Inj { left, right, .. } => {
            acc.sum = ConnectiveUse::Full;
            scan_formula(left, acc);
            scan_formula(right, acc);
        }
        Term::Diag(a) => {
            acc.product = ConnectiveUse::Full;
            scan_formula(a, acc);
        }
        Term::Codiag(a) => {
            acc.sum = ConnectiveUse::Full;
            scan_formula(a, acc);
        }
        Term::TensorProd(f, g) => {
            acc.product = acc.product.join(ConnectiveUse::BifunctorOnly);
            scan_term(f, acc);
            scan_term(g, acc);
        }
        Term::TensorSum(f, g) => {
            acc.sum = acc.sum.join(ConnectiveUse::BifunctorOnly);
            scan_term(f, acc);
            scan_term(g, acc);
        }
    }
}

/// The least fragment covering every generator occurring in any of the
/// terms or their formula annotations. Monotone in the input set.
pub fn fragment_of<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Fragment {
    let mut acc = EMPTY_FRAGMENT;
    for term in terms {
        scan_term(term, &mut acc);
    }
    acc
}

/// Parses the display form produced by `Fragment::fmt`, used by the CLI's
/// `--fragment` override.
pub fn parse_fragment(name: &str) -> Option<Fragment> {
    let mut fragment = EMPTY_FRAGMENT;
    if name == "trivial" {
        return Some(fragment);
    }
    for part in name.split(',') {
        match part.trim() {
            "x" => fragment.product = ConnectiveUse::Full,
            "xb" => fragment.product = fragment.product.join(ConnectiveUse::BifunctorOnly),
            "+" => fragment.sum = ConnectiveUse::Full,
            "+b" => fragment.sum = fragment.sum.join(ConnectiveUse::BifunctorOnly),
            "I" => fragment.has_terminal = true,
            "O" => fragment.has_initial = true,
            _ => return None,
        }
    }
    Some(fragment)
}
