//! Equality of arrows decided through the relational interpretation,
//! gated by the signature families for which the interpretation is
//! faithful. Outside those families the verdict reports whether the
//! graphs coincide without claiming anything about the theory.

use serde::Serialize;

use crate::formula::Formula;
use crate::fragment::{fragment_of, ConnectiveUse, Fragment};
use crate::graph::interpret;
use crate::term::{Index, Term, TermStyle, TypeError};
use crate::translate::bifunctorial_image;

/// The signature families carrying a faithfulness theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremTag {
    /// binary products and sums, no constants
    ProductsSums,
    /// products with terminal object, sums bifunctorial only
    CartesianBifunctorSums,
    /// products only, sums bifunctorial only
    ProductsBifunctorSums,
    /// sums with initial object, products bifunctorial only
    CocartesianBifunctorProducts,
    /// sums only, products bifunctorial only
    SumsBifunctorProducts,
    /// products with terminal object
    Cartesian,
    /// products only
    Products,
    /// sums with initial object
    Cocartesian,
    /// sums only
    Sums,
}

impl TheoremTag {
    pub fn family_name(self) -> &'static str {
        match self {
            TheoremTag::ProductsSums => "x,+",
            TheoremTag::CartesianBifunctorSums => "x,I,+b",
            TheoremTag::ProductsBifunctorSums => "x,+b",
            TheoremTag::CocartesianBifunctorProducts => "+,O,xb",
            TheoremTag::SumsBifunctorProducts => "+,xb",
            TheoremTag::Cartesian => "x,I",
            TheoremTag::Products => "x",
            TheoremTag::Cocartesian => "+,O",
            TheoremTag::Sums => "+",
        }
    }
}

/// Returns the tightest faithfulness theorem covering the fragment, or
/// `None` when the interpretation is known not to be faithful there (both
/// constants together, or a constant next to the full structure of the
/// opposite connective).
pub fn coherent_family(fragment: &Fragment) -> Option<TheoremTag> {
    if fragment.has_terminal && fragment.has_initial {
        return None;
    }
    if fragment.has_terminal {
        return match fragment.sum {
            ConnectiveUse::Full => None,
            ConnectiveUse::Absent => Some(TheoremTag::Cartesian),
            ConnectiveUse::BifunctorOnly => Some(TheoremTag::CartesianBifunctorSums),
        };
    }
    if fragment.has_initial {
        return match fragment.product {
            ConnectiveUse::Full => None,
            ConnectiveUse::Absent => Some(TheoremTag::Cocartesian),
            ConnectiveUse::BifunctorOnly => Some(TheoremTag::CocartesianBifunctorProducts),
        };
    }
    match (fragment.product, fragment.sum) {
        (_, ConnectiveUse::Absent) => Some(TheoremTag::Products),
        (ConnectiveUse::Absent, _) => Some(TheoremTag::Sums),
        (_, ConnectiveUse::BifunctorOnly) => Some(TheoremTag::ProductsBifunctorSums),
        (ConnectiveUse::BifunctorOnly, ConnectiveUse::Full) => Some(TheoremTag::SumsBifunctorProducts),
        (ConnectiveUse::Full, ConnectiveUse::Full) => Some(TheoremTag::ProductsSums),
    }
}

/// Outcome of an equality query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Equal,
    NotEqual { witness: (usize, usize) },
    Incoherent { fragment: String, g_equal: bool },
    TypeMismatch { left: (Formula, Formula), right: (Formula, Formula) },
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Equal => 0,
            Verdict::NotEqual { .. } => 1,
            Verdict::Incoherent { .. } => 2,
            Verdict::TypeMismatch { .. } => 3,
        }
    }
}

/// Decides `f = g`. Mixed-style terms are pushed into the bifunctorial
/// calculus before the pair's joint signature is checked against the
/// coherent families; the verdict then compares interpretations.
pub fn equal(f: &Term, g: &Term) -> Result<Verdict, TypeError> {
    let f_ty = f.infer_type()?;
    let g_ty = g.infer_type()?;
    if f_ty != g_ty {
        return Ok(Verdict::TypeMismatch { left: f_ty, right: g_ty });
    }
    let f_norm = if f.style() == TermStyle::Mixed { bifunctorial_image(f) } else { f.clone() };
    let g_norm = if g.style() == TermStyle::Mixed { bifunctorial_image(g) } else { g.clone() };
    let fragment = fragment_of([&f_norm, &g_norm]);
    let rf = interpret(&f_norm)?;
    let rg = interpret(&g_norm)?;
    if coherent_family(&fragment).is_none() {
        return Ok(Verdict::Incoherent { fragment: fragment.to_string(), g_equal: rf == rg });
    }
    if rf == rg {
        Ok(Verdict::Equal)
    } else {
        let witness = rf.symmetric_difference(&rg)[0];
        Ok(Verdict::NotEqual { witness })
    }
}

/// The pairing/copairing interchange instantiated over four formulas: both
/// sides take a sum of two product sources onto a common product target.
/// The component arrows are generic projection composites, so the instance
/// is well-typed for every assignment of formulas to `a`, `b`, `c`, `d`.
pub fn interchange_instance(a: &Formula, b: &Formula, c: &Formula, d: &Formula) -> (Term, Term) {
    let cd = Formula::prod(c.clone(), d.clone());
    let from = |head: &Formula, index: Index| {
        Term::comp(
            Term::proj(index, c.clone(), d.clone()),
            Term::proj(Index::Two, head.clone(), cd.clone()),
        )
    };
    let f1 = from(a, Index::One);
    let g1 = from(a, Index::Two);
    let f2 = from(b, Index::One);
    let g2 = from(b, Index::Two);
    let lhs = Term::pair(Term::copair(f1.clone(), f2.clone()), Term::copair(g1.clone(), g2.clone()));
    let rhs = Term::copair(Term::pair(f1, g1), Term::pair(f2, g2));
    (lhs, rhs)
}

/// The medial exchange: projecting out of a diagonal equals injecting into
/// a codiagonal, from `(a*b)+(c*d)` to `(a+c)*(b+d)`.
pub fn medial_instance(a: &Formula, b: &Formula, c: &Formula, d: &Formula) -> (Term, Term) {
    let ab = Formula::prod(a.clone(), b.clone());
    let cd = Formula::prod(c.clone(), d.clone());
    let lhs = Term::comp(
        Term::tensor_prod(
            Term::tensor_sum(
                Term::proj(Index::One, a.clone(), b.clone()),
                Term::proj(Index::One, c.clone(), d.clone()),
            ),
            Term::tensor_sum(
                Term::proj(Index::Two, a.clone(), b.clone()),
                Term::proj(Index::Two, c.clone(), d.clone()),
            ),
        ),
        Term::Diag(Formula::sum(ab, cd)),
    );
    let ac = Formula::sum(a.clone(), c.clone());
    let bd = Formula::sum(b.clone(), d.clone());
    let rhs = Term::comp(
        Term::Codiag(Formula::prod(ac, bd)),
        Term::tensor_sum(
            Term::tensor_prod(
                Term::inj(Index::One, a.clone(), c.clone()),
                Term::inj(Index::One, b.clone(), d.clone()),
            ),
            Term::tensor_prod(
                Term::inj(Index::Two, a.clone(), c.clone()),
                Term::inj(Index::Two, b.clone(), d.clone()),
            ),
        ),
    );
    (lhs, rhs)
}

#[derive(Debug, Clone, Serialize)]
pub struct EquationCheck {
    pub equation: &'static str,
    pub letters: [String; 4],
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct PaperEquationsReport {
    pub checks: Vec<EquationCheck>,
}

impl PaperEquationsReport {
    pub fn all_equal(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Equal)
    }
}

/// Checks the two worked display equations over every assignment of the
/// pool letters to the four formula slots.
pub fn check_paper_examples() -> PaperEquationsReport {
    check_equations_over_pool(&["p", "q"])
}

pub fn check_equations_over_pool(pool: &[&str]) -> PaperEquationsReport {
    let mut checks = Vec::new();
    for a in pool {
        for b in pool {
            for c in pool {
                for d in pool {
                    let (fa, fb, fc, fd) = (
                        Formula::letter(a),
                        Formula::letter(b),
                        Formula::letter(c),
                        Formula::letter(d),
                    );
                    let letters =
                        [a.to_string(), b.to_string(), c.to_string(), d.to_string()];
                    let (lhs, rhs) = interchange_instance(&fa, &fb, &fc, &fd);
                    checks.push(EquationCheck {
                        equation: "interchange",
                        letters: letters.clone(),
                        verdict: equal(&lhs, &rhs).expect("well-typed instance"),
                    });
                    let (lhs, rhs) = medial_instance(&fa, &fb, &fc, &fd);
                    checks.push(EquationCheck {
                        equation: "medial",
                        letters,
                        verdict: equal(&lhs, &rhs).expect("well-typed instance"),
                    });
                }
            }
        }
    }
    PaperEquationsReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;

    fn tr(text: &str) -> Term {
        parse_term(text).unwrap()
    }

    #[test]
    fn family_detection() {
        let fr = fragment_of([&tr("<[1{p},1{p}],[1{p},1{p}]>")]);
        assert_eq!(coherent_family(&fr), Some(TheoremTag::ProductsSums));
        let fr = fragment_of([&tr("k{O}"), &tr("l{I}")]);
        assert_eq!(coherent_family(&fr), None);
        let fr = fragment_of([&tr("k{p}"), &tr("[1{p},1{p}]")]);
        assert_eq!(coherent_family(&fr), None);
        let fr = fragment_of([&tr("k{p}"), &tr("(1{p}+1{p})")]);
        assert_eq!(coherent_family(&fr), Some(TheoremTag::CartesianBifunctorSums));
        let fr = fragment_of([&tr("k1{p,q}")]);
        assert_eq!(coherent_family(&fr), Some(TheoremTag::Products));
        let fr = fragment_of([&tr("l{p}"), &tr("m{p}")]);
        assert_eq!(coherent_family(&fr), Some(TheoremTag::Cocartesian));
        let fr = fragment_of([&tr("l{p}"), &tr("m{p}"), &tr("(1{p}*1{p})")]);
        assert_eq!(coherent_family(&fr), Some(TheoremTag::CocartesianBifunctorProducts));
    }

    #[test]
    fn interchange_on_single_letter() {
        let lhs = tr("<[1{p},1{p}],[1{p},1{p}]>");
        let rhs = tr("[<1{p},1{p}>,<1{p},1{p}>]");
        assert_eq!(equal(&lhs, &rhs).unwrap(), Verdict::Equal);
    }

    #[test]
    fn projections_differ() {
        let v = equal(&tr("k1{p,p}"), &tr("k2{p,p}")).unwrap();
        assert_eq!(v, Verdict::NotEqual { witness: (0, 0) });
        assert_eq!(v.exit_code(), 1);
    }

    #[test]
    fn zero_typed_projections_are_gated() {
        let v = equal(&tr("k1{O,O}"), &tr("k2{O,O}")).unwrap();
        match v {
            Verdict::Incoherent { g_equal, .. } => assert!(g_equal),
            other => panic!("expected incoherent, got {other:?}"),
        }
        let v = equal(&tr("l1{I,I}"), &tr("l2{I,I}")).unwrap();
        match v {
            Verdict::Incoherent { g_equal, .. } => assert!(g_equal),
            other => panic!("expected incoherent, got {other:?}"),
        }
    }

    #[test]
    fn full_sums_with_terminal_are_refused_even_when_graphs_agree() {
        // copairing together with k: no faithfulness theorem covers it
        let lhs = Term::comp(tr("k{p+p}"), tr("[L1{p}(1{p}),L2{p}(1{p})]"));
        let rhs = tr("k{p+p}");
        let v = equal(&lhs, &rhs).unwrap();
        assert!(matches!(v, Verdict::Incoherent { g_equal: true, .. }));
        // but pairing with k stays within the cartesian family
        let lhs = Term::comp(tr("k{p*p}"), tr("<1{p},1{p}>"));
        let rhs = tr("(<1{p},1{p}>;k{p*p})");
        assert_eq!(equal(&lhs, &rhs).unwrap(), Verdict::Equal);
    }

    #[test]
    fn type_mismatch_detected() {
        let v = equal(&tr("1{p}"), &tr("1{q}")).unwrap();
        assert!(matches!(v, Verdict::TypeMismatch { .. }));
        assert_eq!(v.exit_code(), 3);
    }

    #[test]
    fn display_equations_hold_for_distinct_letters() {
        for (a, b, c, d) in [("p", "p", "p", "p"), ("p", "q", "r", "s")] {
            let (fa, fb, fc, fd) = (
                Formula::letter(a),
                Formula::letter(b),
                Formula::letter(c),
                Formula::letter(d),
            );
            let (lhs, rhs) = interchange_instance(&fa, &fb, &fc, &fd);
            assert_eq!(equal(&lhs, &rhs).unwrap(), Verdict::Equal);
            let (lhs, rhs) = medial_instance(&fa, &fb, &fc, &fd);
            assert_eq!(equal(&lhs, &rhs).unwrap(), Verdict::Equal);
        }
    }

    #[test]
    fn mutated_medial_is_rejected() {
        let p = Formula::letter("p");
        let (lhs, rhs) = medial_instance(&p, &p, &p, &p);
        // swap one injection index on the right-hand side
        let mutated = match rhs {
            Term::Comp(m, tensor) => match *tensor {
                Term::TensorSum(first, second) => match *first {
                    Term::TensorProd(i1, i2) => {
                        let swapped = match *i1 {
                            Term::Inj { left, right, .. } => Term::inj(Index::Two, left, right),
                            other => panic!("unexpected shape {other:?}"),
                        };
                        Term::comp(
                            *m,
                            Term::tensor_sum(Term::tensor_prod(swapped, *i2), *second),
                        )
                    }
                    other => panic!("unexpected shape {other:?}"),
                },
                other => panic!("unexpected shape {other:?}"),
            },
            other => panic!("unexpected shape {other:?}"),
        };
        match equal(&lhs, &mutated).unwrap() {
            Verdict::NotEqual { .. } => {}
            Verdict::TypeMismatch { .. } => {}
            other => panic!("mutation must not be equal: {other:?}"),
        }
    }

    #[test]
    fn report_covers_sixteen_assignments_per_equation() {
        let report = check_paper_examples();
        assert_eq!(report.checks.len(), 32);
        assert!(report.all_equal());
    }

    #[test]
    fn equal_is_an_equivalence_on_a_fixed_type() {
        let terms = [
            tr("<K1{q}(1{p}),K2{p}(1{q})>"),
            tr("1{p*q}"),
            tr("<K1{q}(1{p}),K1{q}(1{p})>"),
        ];
        for f in &terms {
            assert_eq!(equal(f, f).unwrap(), Verdict::Equal);
            for g in &terms {
                let fg = equal(f, g).unwrap();
                let gf = equal(g, f).unwrap();
                assert_eq!(matches!(fg, Verdict::Equal), matches!(gf, Verdict::Equal));
                for h in &terms {
                    if matches!(equal(f, g).unwrap(), Verdict::Equal)
                        && matches!(equal(g, h).unwrap(), Verdict::Equal)
                    {
                        assert_eq!(equal(f, h).unwrap(), Verdict::Equal);
                    }
                }
            }
        }
    }
}
