//! Arrow terms of the free categories, in both the combinator style
//! (projection/injection operators `K`/`L`, pairing and copairing) and the
//! bifunctorial style (atomic projections/injections `k`/`l`, diagonal `w`,
//! codiagonal `m`, and `*`/`+` on terms). Both styles share identities, the
//! terminal arrow `k`, the initial arrow `l`, composition, and the tensor
//! operations, so one grammar carries both calculi.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::formula::Formula;

/// Index of a projection or injection, 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Index {
    One,
    Two,
}

impl Index {
    pub fn other(self) -> Index {
        match self {
            Index::One => Index::Two,
            Index::Two => Index::One,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Index::One => 1,
            Index::Two => 2,
        }
    }
}

/// An arrow term. Every atomic generator carries its formula annotations,
/// so typing is checking rather than inference.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// `1_A : A -> A`
    Id(Formula),
    /// `k_A : A -> I`
    Kappa(Formula),
    /// `l_A : O -> A`
    Lambda(Formula),
    /// `g . f` (stored outer-first: `Comp(g, f)` is g after f)
    Comp(Box<Term>, Box<Term>),

    /// `K^i_B f : A x B -> C` for i = 1 (side on the right) and
    /// `K^2_A f : A x B -> C` (side on the left), from `f` on the kept slot.
    ProjArg { index: Index, side: Formula, inner: Box<Term> },
    /// `L^i` dually: `L^1_B f : C -> A + B`, `L^2_A f : C -> A + B`.
    InjArg { index: Index, side: Formula, inner: Box<Term> },
    /// `<f,g> : C -> A x B`
    Pair(Box<Term>, Box<Term>),
    /// `[f,g] : A + B -> C`
    Copair(Box<Term>, Box<Term>),

    /// `k^i_{A,B} : A x B -> A` (resp. `-> B`)
    Proj { index: Index, left: Formula, right: Formula },
    /// `l^i_{A,B} : A -> A + B` (resp. `B ->`)
    Inj { index: Index, left: Formula, right: Formula },
    /// `w_A : A -> A x A`
    Diag(Formula),
    /// `m_A : A + A -> A`
    Codiag(Formula),

    /// `f * g : A x C -> B x D`
    TensorProd(Box<Term>, Box<Term>),
    /// `f + g : A + C -> B + D`
    TensorSum(Box<Term>, Box<Term>),
}

/// Which calculus a term's formers commit it to. Terms built only from the
/// shared formers qualify as both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermStyle {
    Combinator,
    Bifunctorial,
    Shared,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("composition mismatch at `{term}`: inner target {inner_target} != outer source {outer_source}")]
    CompositionMismatch {
        term: String,
        inner_target: Formula,
        outer_source: Formula,
    },
    #[error("pairing mismatch at `{term}`: component sources {left} and {right} differ")]
    PairSourceMismatch { term: String, left: Formula, right: Formula },
    #[error("copairing mismatch at `{term}`: component targets {left} and {right} differ")]
    CopairTargetMismatch { term: String, left: Formula, right: Formula },
}

impl Term {
    pub fn comp(outer: Term, inner: Term) -> Term {
        Term::Comp(Box::new(outer), Box::new(inner))
    }

    /// Diagrammatic-order composition: `seq(f, g)` is g after f.
    pub fn seq(first: Term, then: Term) -> Term {
        Term::comp(then, first)
    }

    pub fn proj_arg(index: Index, side: Formula, inner: Term) -> Term {
        Term::ProjArg { index, side, inner: Box::new(inner) }
    }

    pub fn inj_arg(index: Index, side: Formula, inner: Term) -> Term {
        Term::InjArg { index, side, inner: Box::new(inner) }
    }

    pub fn pair(left: Term, right: Term) -> Term {
        Term::Pair(Box::new(left), Box::new(right))
    }

    pub fn copair(left: Term, right: Term) -> Term {
        Term::Copair(Box::new(left), Box::new(right))
    }

    pub fn proj(index: Index, left: Formula, right: Formula) -> Term {
        Term::Proj { index, left, right }
    }

    pub fn inj(index: Index, left: Formula, right: Formula) -> Term {
        Term::Inj { index, left, right }
    }

    pub fn tensor_prod(left: Term, right: Term) -> Term {
        Term::TensorProd(Box::new(left), Box::new(right))
    }

    pub fn tensor_sum(left: Term, right: Term) -> Term {
        Term::TensorSum(Box::new(left), Box::new(right))
    }

    /// The unique type `(source, target)` derived by the typing rules, or
    /// the first rule violation found.
    pub fn infer_type(&self) -> Result<(Formula, Formula), TypeError> {
        match self {
            Term::Id(a) => Ok((a.clone(), a.clone())),
            Term::Kappa(a) => Ok((a.clone(), Formula::Terminal)),
            Term::Lambda(a) => Ok((Formula::Initial, a.clone())),
            Term::Comp(g, f) => {
                let (f_src, f_tgt) = f.infer_type()?;
                let (g_src, g_tgt) = g.infer_type()?;
                if f_tgt != g_src {
                    return Err(TypeError::CompositionMismatch {
                        term: self.to_string(),
                        inner_target: f_tgt,
                        outer_source: g_src,
                    });
                }
                Ok((f_src, g_tgt))
            }
            Term::ProjArg { index, side, inner } => {
                let (src, tgt) = inner.infer_type()?;
                let source = match index {
                    Index::One => Formula::prod(src, side.clone()),
                    Index::Two => Formula::prod(side.clone(), src),
                };
                Ok((source, tgt))
            }
            Term::InjArg { index, side, inner } => {
                let (src, tgt) = inner.infer_type()?;
                let target = match index {
                    Index::One => Formula::sum(tgt, side.clone()),
                    Index::Two => Formula::sum(side.clone(), tgt),
                };
                Ok((src, target))
            }
            Term::Pair(f, g) => {
                let (f_src, f_tgt) = f.infer_type()?;
                let (g_src, g_tgt) = g.infer_type()?;
                if f_src != g_src {
                    return Err(TypeError::PairSourceMismatch {
                        term: self.to_string(),
                        left: f_src,
                        right: g_src,
                    });
                }
                Ok((f_src, Formula::prod(f_tgt, g_tgt)))
            }
            Term::Copair(f, g) => {
                let (f_src, f_tgt) = f.infer_type()?;
                let (g_src, g_tgt) = g.infer_type()?;
                if f_tgt != g_tgt {
                    return Err(TypeError::CopairTargetMismatch {
                        term: self.to_string(),
                        left: f_tgt,
                        right: g_tgt,
                    });
                }
                Ok((Formula::sum(f_src, g_src), f_tgt))
            }
            Term::Proj { index, left, right } => {
                let source = Formula::prod(left.clone(), right.clone());
                let target = match index {
                    Index::One => left.clone(),
                    Index::Two => right.clone(),
                };
                Ok((source, target))
            }
            Term::Inj { index, left, right } => {
                let target = Formula::sum(left.clone(), right.clone());
                let source = match index {
                    Index::One => left.clone(),
                    Index::Two => right.clone(),
                };
                Ok((source, target))
            }
            Term::Diag(a) => Ok((a.clone(), Formula::prod(a.clone(), a.clone()))),
            Term::Codiag(a) => Ok((Formula::sum(a.clone(), a.clone()), a.clone())),
            Term::TensorProd(f, g) => {
                let (f_src, f_tgt) = f.infer_type()?;
                let (g_src, g_tgt) = g.infer_type()?;
                Ok((Formula::prod(f_src, g_src), Formula::prod(f_tgt, g_tgt)))
            }
            Term::TensorSum(f, g) => {
                let (f_src, f_tgt) = f.infer_type()?;
                let (g_src, g_tgt) = g.infer_type()?;
                Ok((Formula::sum(f_src, g_src), Formula::sum(f_tgt, g_tgt)))
            }
        }
    }

    /// Number of atomic subterms (identities, `k`, `l`, and the atomic
    /// bifunctorial generators). Operations on terms are free: this is the
    /// size measure used by enumeration bounds.
    pub fn size(&self) -> usize {
        match self {
            Term::Id(_)
            | Term::Kappa(_)
            | Term::Lambda(_)
            | Term::Proj { .. }
            | Term::Inj { .. }
            | Term::Diag(_)
            | Term::Codiag(_) => 1,
            Term::ProjArg { inner, .. } | Term::InjArg { inner, .. } => inner.size(),
            Term::Comp(g, f) => g.size() + f.size(),
            Term::Pair(f, g) | Term::Copair(f, g) | Term::TensorProd(f, g) | Term::TensorSum(f, g) => {
                f.size() + g.size()
            }
        }
    }

    /// Number of AST nodes, used to cap intermediate terms in searches.
    pub fn node_count(&self) -> usize {
        match self {
            Term::Id(_)
            | Term::Kappa(_)
            | Term::Lambda(_)
            | Term::Proj { .. }
            | Term::Inj { .. }
            | Term::Diag(_)
            | Term::Codiag(_) => 1,
            Term::ProjArg { inner, .. } | Term::InjArg { inner, .. } => 1 + inner.node_count(),
            Term::Comp(g, f) => 1 + g.node_count() + f.node_count(),
            Term::Pair(f, g) | Term::Copair(f, g) | Term::TensorProd(f, g) | Term::TensorSum(f, g) => {
                1 + f.node_count() + g.node_count()
            }
        }
    }

    pub fn contains_composition(&self) -> bool {
        match self {
            Term::Comp(..) => true,
            Term::Id(_)
            | Term::Kappa(_)
            | Term::Lambda(_)
            | Term::Proj { .. }
            | Term::Inj { .. }
            | Term::Diag(_)
            | Term::Codiag(_) => false,
            Term::ProjArg { inner, .. } | Term::InjArg { inner, .. } => inner.contains_composition(),
            Term::Pair(f, g) | Term::Copair(f, g) | Term::TensorProd(f, g) | Term::TensorSum(f, g) => {
                f.contains_composition() || g.contains_composition()
            }
        }
    }

    fn has_combinator_formers(&self) -> bool {
        match self {
            Term::ProjArg { .. } | Term::InjArg { .. } | Term::Pair(..) | Term::Copair(..) => true,
            Term::Id(_) | Term::Kappa(_) | Term::Lambda(_) | Term::Proj { .. } | Term::Inj { .. }
            | Term::Diag(_) | Term::Codiag(_) => false,
            Term::Comp(g, f) | Term::TensorProd(f, g) | Term::TensorSum(f, g) => {
                f.has_combinator_formers() || g.has_combinator_formers()
            }
        }
    }

    fn has_bifunctorial_formers(&self) -> bool {
        match self {
            Term::Proj { .. } | Term::Inj { .. } | Term::Diag(_) | Term::Codiag(_) => true,
            Term::Id(_) | Term::Kappa(_) | Term::Lambda(_) => false,
            Term::ProjArg { inner, .. } | Term::InjArg { inner, .. } => inner.has_bifunctorial_formers(),
            Term::Comp(g, f) | Term::Pair(f, g) | Term::Copair(f, g) | Term::TensorProd(f, g)
            | Term::TensorSum(f, g) => f.has_bifunctorial_formers() || g.has_bifunctorial_formers(),
        }
    }

    /// Style classification. The tensor operations on terms are primitive in
    /// both calculi (they are the whole point of the bifunctorial extensions),
    /// so they do not commit a term to either style.
    pub fn style(&self) -> TermStyle {
        match (self.has_combinator_formers(), self.has_bifunctorial_formers()) {
            (true, true) => TermStyle::Mixed,
            (true, false) => TermStyle::Combinator,
            (false, true) => TermStyle::Bifunctorial,
            (false, false) => TermStyle::Shared,
        }
    }

    pub fn is_combinator_style(&self) -> bool {
        !self.has_bifunctorial_formers()
    }

    pub fn is_bifunctorial_style(&self) -> bool {
        !self.has_combinator_formers()
    }

    /// A complex identity: every atomic constituent is an identity.
    pub fn is_complex_identity(&self) -> bool {
        match self {
            Term::Id(_) => true,
            Term::Comp(g, f) | Term::TensorProd(f, g) | Term::TensorSum(f, g) => {
                f.is_complex_identity() && g.is_complex_identity()
            }
            _ => false,
        }
    }

    /// Uniformly renames every letter in every formula annotation.
    pub fn map_letters(&self, f: &impl Fn(&str) -> String) -> Term {
        match self {
            Term::Id(a) => Term::Id(a.map_letters(f)),
            Term::Kappa(a) => Term::Kappa(a.map_letters(f)),
            Term::Lambda(a) => Term::Lambda(a.map_letters(f)),
            Term::Comp(g, h) => Term::comp(g.map_letters(f), h.map_letters(f)),
            Term::ProjArg { index, side, inner } => {
                Term::proj_arg(*index, side.map_letters(f), inner.map_letters(f))
            }
            Term::InjArg { index, side, inner } => {
                Term::inj_arg(*index, side.map_letters(f), inner.map_letters(f))
            }
            Term::Pair(a, b) => Term::pair(a.map_letters(f), b.map_letters(f)),
            Term::Copair(a, b) => Term::copair(a.map_letters(f), b.map_letters(f)),
            Term::Proj { index, left, right } => {
                Term::proj(*index, left.map_letters(f), right.map_letters(f))
            }
            Term::Inj { index, left, right } => {
                Term::inj(*index, left.map_letters(f), right.map_letters(f))
            }
            Term::Diag(a) => Term::Diag(a.map_letters(f)),
            Term::Codiag(a) => Term::Codiag(a.map_letters(f)),
            Term::TensorProd(a, b) => Term::tensor_prod(a.map_letters(f), b.map_letters(f)),
            Term::TensorSum(a, b) => Term::tensor_sum(a.map_letters(f), b.map_letters(f)),
        }
    }
}

/// Text form per the published grammar; composition prints in diagrammatic
/// order, `(f;g)` meaning g after f.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Id(a) => write!(f, "1{{{a}}}"),
            Term::Kappa(a) => write!(f, "k{{{a}}}"),
            Term::Lambda(a) => write!(f, "l{{{a}}}"),
            Term::Comp(g, inner) => write!(f, "({inner};{g})"),
            Term::ProjArg { index, side, inner } => {
                write!(f, "K{}{{{side}}}({inner})", index.as_u8())
            }
            Term::InjArg { index, side, inner } => {
                write!(f, "L{}{{{side}}}({inner})", index.as_u8())
            }
            Term::Pair(a, b) => write!(f, "<{a},{b}>"),
            Term::Copair(a, b) => write!(f, "[{a},{b}]"),
            Term::Proj { index, left, right } => {
                write!(f, "k{}{{{left},{right}}}", index.as_u8())
            }
            Term::Inj { index, left, right } => {
                write!(f, "l{}{{{left},{right}}}", index.as_u8())
            }
            Term::Diag(a) => write!(f, "w{{{a}}}"),
            Term::Codiag(a) => write!(f, "m{{{a}}}"),
            Term::TensorProd(a, b) => write!(f, "({a}*{b})"),
            Term::TensorSum(a, b) => write!(f, "({a}+{b})"),
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
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
    fn identity_types_as_endo() {
        assert_eq!(Term::Id(p()).infer_type().unwrap(), (p(), p()));
    }

    #[test]
    fn atomic_projection_type() {
        // k^1_{p,q} : p x q -> p
        let t = Term::proj(Index::One, p(), q());
        assert_eq!(t.infer_type().unwrap(), (Formula::prod(p(), q()), p()));
    }

    #[test]
    fn terminal_after_initial() {
        // k_p . l_p : O -> I
        let t = Term::comp(Term::Kappa(p()), Term::Lambda(p()));
        assert_eq!(t.infer_type().unwrap(), (Formula::Initial, Formula::Terminal));
    }

    #[test]
    fn composition_mismatch_names_offender() {
        let t = Term::comp(Term::Id(q()), Term::Id(p()));
        let err = t.infer_type().unwrap_err();
        match err {
            TypeError::CompositionMismatch { inner_target, outer_source, .. } => {
                assert_eq!(inner_target, p());
                assert_eq!(outer_source, q());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn combinator_operator_types() {
        // K^1_q f : p x q -> p for f = 1_p
        let t = Term::proj_arg(Index::One, q(), Term::Id(p()));
        assert_eq!(t.infer_type().unwrap(), (Formula::prod(p(), q()), p()));
        // K^2_q f : q x p -> p
        let t = Term::proj_arg(Index::Two, q(), Term::Id(p()));
        assert_eq!(t.infer_type().unwrap(), (Formula::prod(q(), p()), p()));
        // L^1_q f : p -> p + q
        let t = Term::inj_arg(Index::One, q(), Term::Id(p()));
        assert_eq!(t.infer_type().unwrap(), (p(), Formula::sum(p(), q())));
        // L^2_q f : p -> q + p
        let t = Term::inj_arg(Index::Two, q(), Term::Id(p()));
        assert_eq!(t.infer_type().unwrap(), (p(), Formula::sum(q(), p())));
    }

    #[test]
    fn style_classification() {
        assert_eq!(Term::Id(p()).style(), TermStyle::Shared);
        assert_eq!(Term::pair(Term::Id(p()), Term::Id(p())).style(), TermStyle::Combinator);
        assert_eq!(Term::Diag(p()).style(), TermStyle::Bifunctorial);
        let mixed = Term::comp(Term::Diag(p()), Term::proj_arg(Index::One, p(), Term::Id(p())));
        assert_eq!(mixed.style(), TermStyle::Mixed);
        // tensors stay style-neutral
        let t = Term::tensor_sum(Term::Id(p()), Term::Id(p()));
        assert_eq!(t.style(), TermStyle::Shared);
    }

    #[test]
    fn complex_identity_detection() {
        let t = Term::tensor_prod(Term::Id(p()), Term::Id(q()));
        assert!(t.is_complex_identity());
        assert!(!Term::Diag(p()).is_complex_identity());
        assert!(!Term::proj(Index::One, p(), q()).is_complex_identity());
    }

    #[test]
    fn size_counts_atoms_only() {
        // K^1_q < 1_p, 1_p > has two atoms
        let t = Term::proj_arg(Index::One, q(), Term::pair(Term::Id(p()), Term::Id(p())));
        assert_eq!(t.size(), 2);
        assert_eq!(t.node_count(), 4);
    }

    #[test]
    fn display_round_shapes() {
        let t = Term::proj_arg(Index::One, q(), Term::pair(Term::Id(p()), Term::Id(p())));
        assert_eq!(t.to_string(), "K1{q}(<1{p},1{p}>)");
        let c = Term::comp(Term::Kappa(p()), Term::Lambda(p()));
        assert_eq!(c.to_string(), "(l{p};k{p})");
    }
}
