//! The isomorphism between the combinator-style and bifunctorial-style
//! calculi, as structural recursion over the defining tables. Translation
//! applies the definition at every node and performs no simplification.

use crate::fragment::{fragment_of, ConnectiveUse};
use crate::term::{Index, Term, TermStyle, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("input is not pure combinator-style (found {found:?} formers)")]
    NotCombinatorStyle { found: TermStyle },
    #[error("input is not pure bifunctorial-style (found {found:?} formers)")]
    NotBifunctorialStyle { found: TermStyle },
    #[error(transparent)]
    IllTyped(#[from] TypeError),
}

/// Combinator style to bifunctorial style. Dedicated projection and
/// injection operators become compositions with the atomic generators;
/// pairing and copairing factor through the diagonal and codiagonal.
pub fn to_bifunctorial(term: &Term) -> Result<Term, TranslateError> {
    if !term.is_combinator_style() {
        return Err(TranslateError::NotCombinatorStyle { found: term.style() });
    }
    term.infer_type()?;
    Ok(bifunctorial_image(term))
}

/// Bifunctorial style to combinator style. Atomic generators unfold to
/// their combinator definitions. The tensor operations unfold only when
/// the term's signature carries the full structural generators for that
/// connective; in the bifunctorial-only extensions the tensor is primitive
/// on both sides of the isomorphism and is left in place.
pub fn to_combinator(term: &Term) -> Result<Term, TranslateError> {
    if !term.is_bifunctorial_style() {
        return Err(TranslateError::NotBifunctorialStyle { found: term.style() });
    }
    term.infer_type()?;
    Ok(combinator_image(term))
}

/// Total homomorphism into the bifunctorial calculus: combinator formers
/// unfold, everything else is preserved. Accepts mixed-style terms.
pub fn bifunctorial_image(term: &Term) -> Term {
    image_b(term).0
}

fn image_b(term: &Term) -> (Term, crate::formula::Formula, crate::formula::Formula) {
    use crate::formula::Formula;
    match term {
        Term::Id(a) => (term.clone(), a.clone(), a.clone()),
        Term::Kappa(a) => (term.clone(), a.clone(), Formula::Terminal),
        Term::Lambda(a) => (term.clone(), Formula::Initial, a.clone()),
        Term::Comp(g, f) => {
            let (f2, f_src, _) = image_b(f);
            let (g2, _, g_tgt) = image_b(g);
            (Term::comp(g2, f2), f_src, g_tgt)
        }
        Term::ProjArg { index, side, inner } => {
            let (f2, f_src, f_tgt) = image_b(inner);
            let (proj, src) = match index {
                Index::One => (
                    Term::proj(Index::One, f_src.clone(), side.clone()),
                    Formula::prod(f_src, side.clone()),
                ),
                Index::Two => (
                    Term::proj(Index::Two, side.clone(), f_src.clone()),
                    Formula::prod(side.clone(), f_src),
                ),
            };
            (Term::comp(f2, proj), src, f_tgt)
        }
        Term::InjArg { index, side, inner } => {
            let (f2, f_src, f_tgt) = image_b(inner);
            let (inj, tgt) = match index {
                Index::One => (
                    Term::inj(Index::One, f_tgt.clone(), side.clone()),
                    Formula::sum(f_tgt, side.clone()),
                ),
                Index::Two => (
                    Term::inj(Index::Two, side.clone(), f_tgt.clone()),
                    Formula::sum(side.clone(), f_tgt),
                ),
            };
            (Term::comp(inj, f2), f_src, tgt)
        }
        Term::Pair(f, g) => {
            let (f2, f_src, f_tgt) = image_b(f);
            let (g2, _, g_tgt) = image_b(g);
            let t = Term::comp(Term::tensor_prod(f2, g2), Term::Diag(f_src.clone()));
            (t, f_src, Formula::prod(f_tgt, g_tgt))
        }
        Term::Copair(f, g) => {
            let (f2, f_src, f_tgt) = image_b(f);
            let (g2, g_src, _) = image_b(g);
            let t = Term::comp(Term::Codiag(f_tgt.clone()), Term::tensor_sum(f2, g2));
            (t, Formula::sum(f_src, g_src), f_tgt)
        }
        Term::Proj { index, left, right } => {
            let src = Formula::prod(left.clone(), right.clone());
            let tgt = match index {
                Index::One => left.clone(),
                Index::Two => right.clone(),
            };
            (term.clone(), src, tgt)
        }
        Term::Inj { index, left, right } => {
            let tgt = Formula::sum(left.clone(), right.clone());
            let src = match index {
                Index::One => left.clone(),
                Index::Two => right.clone(),
            };
            (term.clone(), src, tgt)
        }
        Term::Diag(a) => (term.clone(), a.clone(), Formula::prod(a.clone(), a.clone())),
        Term::Codiag(a) => (term.clone(), Formula::sum(a.clone(), a.clone()), a.clone()),
        Term::TensorProd(f, g) => {
            let (f2, f_src, f_tgt) = image_b(f);
            let (g2, g_src, g_tgt) = image_b(g);
            (
                Term::tensor_prod(f2, g2),
                Formula::prod(f_src, g_src),
                Formula::prod(f_tgt, g_tgt),
            )
        }
        Term::TensorSum(f, g) => {
            let (f2, f_src, f_tgt) = image_b(f);
            let (g2, g_src, g_tgt) = image_b(g);
            (
                Term::tensor_sum(f2, g2),
                Formula::sum(f_src, g_src),
                Formula::sum(f_tgt, g_tgt),
            )
        }
    }
}

/// Total homomorphism into the combinator calculus; accepts mixed-style
/// terms. Tensor unfolding follows the whole term's signature, as in
/// [`to_combinator`].
pub fn combinator_image(term: &Term) -> Term {
    let fragment = fragment_of([term]);
    let expand_prod = fragment.product == ConnectiveUse::Full;
    let expand_sum = fragment.sum == ConnectiveUse::Full;
    image_c(term, expand_prod, expand_sum).0
}

fn image_c(
    term: &Term,
    expand_prod: bool,
    expand_sum: bool,
) -> (Term, crate::formula::Formula, crate::formula::Formula) {
    use crate::formula::Formula;
    match term {
        Term::Id(a) => (term.clone(), a.clone(), a.clone()),
        Term::Kappa(a) => (term.clone(), a.clone(), Formula::Terminal),
        Term::Lambda(a) => (term.clone(), Formula::Initial, a.clone()),
        Term::Comp(g, f) => {
            let (f2, f_src, _) = image_c(f, expand_prod, expand_sum);
            let (g2, _, g_tgt) = image_c(g, expand_prod, expand_sum);
            (Term::comp(g2, f2), f_src, g_tgt)
        }
        Term::Proj { index, left, right } => {
            let src = Formula::prod(left.clone(), right.clone());
            let (t, tgt) = match index {
                Index::One => (
                    Term::proj_arg(Index::One, right.clone(), Term::Id(left.clone())),
                    left.clone(),
                ),
                Index::Two => (
                    Term::proj_arg(Index::Two, left.clone(), Term::Id(right.clone())),
                    right.clone(),
                ),
            };
            (t, src, tgt)
        }
        Term::Inj { index, left, right } => {
            let tgt = Formula::sum(left.clone(), right.clone());
            let (t, src) = match index {
                Index::One => (
                    Term::inj_arg(Index::One, right.clone(), Term::Id(left.clone())),
                    left.clone(),
                ),
                Index::Two => (
                    Term::inj_arg(Index::Two, left.clone(), Term::Id(right.clone())),
                    right.clone(),
                ),
            };
            (t, src, tgt)
        }
        Term::Diag(a) => (
            Term::pair(Term::Id(a.clone()), Term::Id(a.clone())),
            a.clone(),
            Formula::prod(a.clone(), a.clone()),
        ),
        Term::Codiag(a) => (
            Term::copair(Term::Id(a.clone()), Term::Id(a.clone())),
            Formula::sum(a.clone(), a.clone()),
            a.clone(),
        ),
        Term::TensorProd(f, g) => {
            let (f2, f_src, f_tgt) = image_c(f, expand_prod, expand_sum);
            let (g2, g_src, g_tgt) = image_c(g, expand_prod, expand_sum);
            let src = Formula::prod(f_src.clone(), g_src.clone());
            let tgt = Formula::prod(f_tgt, g_tgt);
            let t = if expand_prod {
                Term::pair(
                    Term::proj_arg(Index::One, g_src, f2),
                    Term::proj_arg(Index::Two, f_src, g2),
                )
            } else {
                Term::tensor_prod(f2, g2)
            };
            (t, src, tgt)
        }
        Term::TensorSum(f, g) => {
            let (f2, f_src, f_tgt) = image_c(f, expand_prod, expand_sum);
            let (g2, g_src, g_tgt) = image_c(g, expand_prod, expand_sum);
            let src = Formula::sum(f_src, g_src);
            let tgt = Formula::sum(f_tgt.clone(), g_tgt.clone());
            let t = if expand_sum {
                Term::copair(
                    Term::inj_arg(Index::One, g_tgt, f2),
                    Term::inj_arg(Index::Two, f_tgt, g2),
                )
            } else {
                Term::tensor_sum(f2, g2)
            };
            (t, src, tgt)
        }
        Term::ProjArg { index, side, inner } => {
            let (f2, f_src, f_tgt) = image_c(inner, expand_prod, expand_sum);
            let src = match index {
                Index::One => Formula::prod(f_src, side.clone()),
                Index::Two => Formula::prod(side.clone(), f_src),
            };
            (Term::proj_arg(*index, side.clone(), f2), src, f_tgt)
        }
        Term::InjArg { index, side, inner } => {
            let (f2, f_src, f_tgt) = image_c(inner, expand_prod, expand_sum);
            let tgt = match index {
                Index::One => Formula::sum(f_tgt, side.clone()),
                Index::Two => Formula::sum(side.clone(), f_tgt),
            };
            (Term::inj_arg(*index, side.clone(), f2), f_src, tgt)
        }
        Term::Pair(f, g) => {
            let (f2, f_src, f_tgt) = image_c(f, expand_prod, expand_sum);
            let (g2, _, g_tgt) = image_c(g, expand_prod, expand_sum);
            (Term::pair(f2, g2), f_src, Formula::prod(f_tgt, g_tgt))
        }
        Term::Copair(f, g) => {
            let (f2, f_src, f_tgt) = image_c(f, expand_prod, expand_sum);
            let (g2, g_src, _) = image_c(g, expand_prod, expand_sum);
            (Term::copair(f2, g2), Formula::sum(f_src, g_src), f_tgt)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::parse::parse_term;

    fn tr(text: &str) -> Term {
        parse_term(text).unwrap()
    }

    #[test]
    fn projection_operator_unfolds() {
        // K^1_B f  =  f . k^1_{A,B}
        let t = tr("K1{q}(w{p})");
        assert!(to_bifunctorial(&t).is_err()); // w is already bifunctorial
        let t = tr("K1{q}(1{p})");
        assert_eq!(to_bifunctorial(&t).unwrap(), tr("(k1{p,q};1{p})"));
    }

    #[test]
    fn pairing_factors_through_diagonal() {
        // <f,g>  =  (f x g) . w_C
        let t = tr("<K1{q}(1{p}),K2{p}(1{q})>");
        let out = to_bifunctorial(&t).unwrap();
        assert_eq!(
            out,
            tr("(w{p*q};((k1{p,q};1{p})*(k2{p,q};1{q})))")
        );
        assert!(out.is_bifunctorial_style());
    }

    #[test]
    fn identity_is_fixed() {
        assert_eq!(to_bifunctorial(&tr("1{p}")).unwrap(), tr("1{p}"));
        assert_eq!(to_combinator(&tr("1{p}")).unwrap(), tr("1{p}"));
    }

    #[test]
    fn diagonal_unfolds_to_pairing() {
        assert_eq!(to_combinator(&tr("w{p}")).unwrap(), tr("<1{p},1{p}>"));
        assert_eq!(to_combinator(&tr("m{p}")).unwrap(), tr("[1{p},1{p}]"));
    }

    #[test]
    fn tensor_unfolds_in_full_product_signatures() {
        // (f x g) = <K^1_C f, K^2_A g> when the structural generators are in play
        let t = tr("(k1{p,q}*w{r})");
        let out = to_combinator(&t).unwrap();
        assert_eq!(out, tr("<K1{r}(K1{q}(1{p})),K2{p*q}(<1{r},1{r}>)>"));
    }

    #[test]
    fn tensor_stays_primitive_in_bifunctor_only_signatures() {
        let t = tr("(1{p}+1{p})");
        assert_eq!(to_combinator(&t).unwrap(), t);
        let fr_in = crate::fragment::fragment_of([&t]);
        let fr_out = crate::fragment::fragment_of([&to_combinator(&t).unwrap()]);
        assert_eq!(fr_in, fr_out);
    }

    #[test]
    fn types_preserved() {
        for text in [
            "K1{q}(1{p})",
            "<K1{q}(1{p}),K2{p}(1{q})>",
            "[L1{q}(1{p}),L2{p}(1{q})]",
            "(k{p}+1{q})",
        ] {
            let t = tr(text);
            let (src, tgt) = t.infer_type().unwrap();
            let out = to_bifunctorial(&t).unwrap();
            assert_eq!(out.infer_type().unwrap(), (src, tgt));
        }
        for text in ["w{p*q}", "m{p}", "(k1{p,q}*l1{p,q})", "((w{p};k1{p,p});l2{q,p})"] {
            let t = tr(text);
            let (src, tgt) = t.infer_type().unwrap();
            let out = to_combinator(&t).unwrap();
            assert_eq!(out.infer_type().unwrap(), (src, tgt), "on {text}");
            assert!(out.is_combinator_style());
        }
    }

    #[test]
    fn style_gate() {
        assert!(to_combinator(&tr("<1{p},1{p}>")).is_err());
        assert!(to_bifunctorial(&tr("w{p}")).is_err());
    }

    #[test]
    fn mixed_terms_have_total_images() {
        let t = Term::comp(tr("w{p}"), tr("K1{p}(1{p})"));
        let b = bifunctorial_image(&t);
        assert!(b.is_bifunctorial_style());
        let c = combinator_image(&t);
        assert!(c.is_combinator_style());
        let ty = t.infer_type().unwrap();
        assert_eq!(b.infer_type().unwrap(), ty);
        assert_eq!(c.infer_type().unwrap(), ty);
        assert_eq!(Formula::prod(Formula::letter("p"), Formula::letter("p")), ty.1);
    }
}
