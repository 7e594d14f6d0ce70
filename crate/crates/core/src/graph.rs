//! The graphical category: finite ordinals with binary relations as arrows,
//! and the interpretation functor from arrow terms into it. A term's
//! interpretation links the letter occurrences of its source formula to
//! those of its target formula.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::term::{Index, Term, TypeError};
use crate::translate::bifunctorial_image;

/// A typed binary relation between finite ordinals. Two relations are equal
/// only when the types agree as well: empty relations of different types
/// are distinct arrows.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Relation {
    pub src: usize,
    pub tgt: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl Relation {
    pub fn new(src: usize, tgt: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Relation {
        let pairs: BTreeSet<_> = pairs.into_iter().collect();
        for &(x, y) in &pairs {
            assert!(x < src && y < tgt, "pair ({x},{y}) out of bounds for {src}->{tgt}");
        }
        Relation { src, tgt, pairs }
    }

    pub fn empty(src: usize, tgt: usize) -> Relation {
        Relation { src, tgt, pairs: BTreeSet::new() }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        self.pairs.contains(&pair)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs present in exactly one of the two relations, in order.
    pub fn symmetric_difference(&self, other: &Relation) -> Vec<(usize, usize)> {
        self.pairs.symmetric_difference(&other.pairs).copied().collect()
    }

    /// True when the relation is the converse of a function: every target
    /// element has exactly one source element related to it.
    pub fn is_converse_functional(&self) -> bool {
        (0..self.tgt).all(|y| self.pairs.iter().filter(|(_, b)| *b == y).count() == 1)
    }

    /// True when the relation is the graph of a function: every source
    /// element relates to exactly one target element.
    pub fn is_functional(&self) -> bool {
        (0..self.src).all(|x| self.pairs.iter().filter(|(a, _)| *a == x).count() == 1)
    }

    pub fn is_bijection(&self) -> bool {
        self.src == self.tgt && self.len() == self.src && self.is_converse_functional() && self.is_functional()
    }
}

/// The identity relation on `n`.
pub fn rel_identity(n: usize) -> Relation {
    Relation { src: n, tgt: n, pairs: (0..n).map(|x| (x, x)).collect() }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("relation composition mismatch: {inner_tgt} != {outer_src}")]
pub struct RelTypeError {
    pub inner_tgt: usize,
    pub outer_src: usize,
}

/// Relational composition `g . f`.
pub fn rel_compose(g: &Relation, f: &Relation) -> Result<Relation, RelTypeError> {
    if f.tgt != g.src {
        return Err(RelTypeError { inner_tgt: f.tgt, outer_src: g.src });
    }
    let mut pairs = BTreeSet::new();
    for (x, y) in f.pairs() {
        for (y2, z) in g.pairs() {
            if y == y2 {
                pairs.insert((x, z));
            }
        }
    }
    Ok(Relation { src: f.src, tgt: g.tgt, pairs })
}

/// Disjoint juxtaposition: the common value of the product and sum of
/// arrows, shifting the second relation past the first one's type.
pub fn rel_juxtapose(f: &Relation, g: &Relation) -> Relation {
    let mut pairs = f.pairs.clone();
    pairs.extend(g.pairs().map(|(x, y)| (x + f.src, y + f.tgt)));
    Relation { src: f.src + g.src, tgt: f.tgt + g.tgt, pairs }
}

/// Interprets a term of either calculus. Combinator-style formers go
/// through their bifunctorial unfolding, so the interpretation clauses
/// exist in one place only.
pub fn interpret(term: &Term) -> Result<Relation, TypeError> {
    term.infer_type()?;
    Ok(interpret_unchecked(&bifunctorial_image(term)))
}

fn interpret_unchecked(term: &Term) -> Relation {
    match term {
        Term::Id(a) => rel_identity(a.letter_count()),
        Term::Kappa(a) => Relation::empty(a.letter_count(), 0),
        Term::Lambda(a) => Relation::empty(0, a.letter_count()),
        Term::Comp(g, f) => {
            let fr = interpret_unchecked(f);
            let gr = interpret_unchecked(g);
            rel_compose(&gr, &fr).expect("well-typed term composes")
        }
        Term::Proj { index, left, right } => {
            let a = left.letter_count();
            let b = right.letter_count();
            match index {
                Index::One => Relation::new(a + b, a, (0..a).map(|x| (x, x))),
                Index::Two => Relation::new(a + b, b, (0..b).map(|x| (x + a, x))),
            }
        }
        Term::Inj { index, left, right } => {
            let a = left.letter_count();
            let b = right.letter_count();
            match index {
                Index::One => Relation::new(a, a + b, (0..a).map(|x| (x, x))),
                Index::Two => Relation::new(b, a + b, (0..b).map(|x| (x, x + a))),
            }
        }
        Term::Diag(a) => {
            let n = a.letter_count();
            Relation::new(n, 2 * n, (0..n).flat_map(|x| [(x, x), (x, x + n)]))
        }
        Term::Codiag(a) => {
            let n = a.letter_count();
            Relation::new(2 * n, n, (0..n).flat_map(|x| [(x, x), (x + n, x)]))
        }
        Term::TensorProd(f, g) | Term::TensorSum(f, g) => {
            rel_juxtapose(&interpret_unchecked(f), &interpret_unchecked(g))
        }
        // bifunctorial_image leaves no combinator formers behind
        Term::ProjArg { .. } | Term::InjArg { .. } | Term::Pair(..) | Term::Copair(..) => {
            unreachable!("interpret runs on the bifunctorial image")
        }
    }
}

/// The two relations of the distributivity round trip over
/// `(p*q)+(p*r)`: down through `p*(q+r)` and back up. Their composite is a
/// fixture showing that an isomorphism candidate fails to have an identity
/// diagram.
pub fn distributivity_fixture() -> (Relation, Relation) {
    let down = Relation::new(4, 3, [(0, 0), (1, 1), (2, 0), (3, 2)]);
    let up = Relation::new(3, 4, [(0, 0), (0, 2), (1, 1), (2, 3)]);
    (down, up)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;

    fn g(text: &str) -> Relation {
        interpret(&parse_term(text).unwrap()).unwrap()
    }

    #[test]
    fn identities() {
        assert_eq!(rel_identity(0), Relation::empty(0, 0));
        assert_eq!(rel_identity(2), Relation::new(2, 2, [(0, 0), (1, 1)]));
        assert_eq!(rel_identity(1), Relation::new(1, 1, [(0, 0)]));
    }

    #[test]
    fn compose_with_empty_absorbs() {
        let f = Relation::new(2, 2, [(0, 0), (1, 1)]);
        let z = Relation::empty(2, 3);
        let c = rel_compose(&z, &f).unwrap();
        assert_eq!(c, Relation::empty(2, 3));
        assert!(rel_compose(&f, &Relation::empty(1, 3)).unwrap_err().inner_tgt == 3);
    }

    #[test]
    fn compose_identity_neutral() {
        let f = Relation::new(3, 2, [(0, 0), (2, 1)]);
        assert_eq!(rel_compose(&rel_identity(2), &f).unwrap(), f);
        assert_eq!(rel_compose(&f, &rel_identity(3)).unwrap(), f);
    }

    #[test]
    fn juxtapose_shifts_by_source_and_target() {
        let id1 = rel_identity(1);
        assert_eq!(rel_juxtapose(&id1, &id1), rel_identity(2));
        // empty 0->1 next to id_1: the shift is by (0,1)
        let e = Relation::empty(0, 1);
        assert_eq!(rel_juxtapose(&e, &id1), Relation::new(1, 2, [(0, 1)]));
        let z = Relation::empty(0, 0);
        let f = Relation::new(2, 1, [(0, 0), (1, 0)]);
        assert_eq!(rel_juxtapose(&f, &z), f);
    }

    #[test]
    fn interpretation_clauses() {
        assert_eq!(g("k{p*q}"), Relation::empty(2, 0));
        assert_eq!(g("l{p}"), Relation::empty(0, 1));
        assert_eq!(g("w{p}"), Relation::new(1, 2, [(0, 0), (0, 1)]));
        assert_eq!(g("m{p}"), Relation::new(2, 1, [(0, 0), (1, 0)]));
        assert_eq!(g("k1{p,q}"), Relation::new(2, 1, [(0, 0)]));
        assert_eq!(g("k2{p,q}"), Relation::new(2, 1, [(1, 0)]));
        assert_eq!(g("l1{p,q}"), Relation::new(1, 2, [(0, 0)]));
        assert_eq!(g("l2{p,q}"), Relation::new(1, 2, [(0, 1)]));
    }

    #[test]
    fn typed_equality_distinguishes_same_pair_sets() {
        // {(0,0)} as a pair set, but with three different types
        assert_ne!(g("k1{p,q}"), g("1{p}"));
        assert_ne!(g("l1{p,q}"), g("1{p}"));
        assert_ne!(g("k1{p,q}"), g("l1{p,q}"));
        // the zero-typed projections collapse to the same empty arrow
        assert_eq!(g("k1{O,O}"), g("k2{O,O}"));
        assert_eq!(g("l1{I,I}"), g("l2{I,I}"));
    }

    #[test]
    fn worked_codiagonal_identity() {
        // m_{p+q} . (l^1_{p,q} + l^2_{p,q}) has the identity diagram on p+q
        let r = g("((l1{p,q}+l2{p,q});m{p+q})");
        assert_eq!(r, rel_identity(2));
    }

    #[test]
    fn combinator_terms_interpret_via_unfolding() {
        assert_eq!(g("K1{q}(1{p})"), g("k1{p,q}"));
        assert_eq!(g("<1{p},1{p}>"), g("w{p}"));
        assert_eq!(g("[1{p},1{p}]"), g("m{p}"));
        assert_eq!(g("L2{q}(1{p})"), g("l2{q,p}"));
    }

    #[test]
    fn distributivity_round_trip_is_not_identity() {
        let (down, up) = distributivity_fixture();
        let round = rel_compose(&up, &down).unwrap();
        assert_eq!(
            round,
            Relation::new(4, 4, [(0, 0), (0, 2), (1, 1), (2, 0), (2, 2), (3, 3)])
        );
        assert_ne!(round, rel_identity(4));
    }

    #[test]
    fn product_side_terms_are_converse_functional() {
        for text in ["k1{p,q}", "K1{q}(1{p})", "<K1{q}(1{p}),K1{q}(1{p})>", "w{p*q}"] {
            assert!(g(text).is_converse_functional(), "{text}");
        }
        // and dually
        for text in ["m{p}", "[1{p},1{p}]", "l1{p,q}"] {
            assert!(g(text).is_functional(), "{text}");
        }
    }

    #[test]
    fn functoriality_on_composites() {
        let f = parse_term("(w{p*q};(k1{p,q}*1{p*q}))").unwrap();
        let h = parse_term("k2{p,p*q}").unwrap();
        let composite = Term::comp(h.clone(), f.clone());
        let lhs = interpret(&composite).unwrap();
        let rhs = rel_compose(&interpret(&h).unwrap(), &interpret(&f).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
