//! Rewriting machinery: cut elimination for combinator-style terms, the
//! reduction of composition-free terms to normal form with its
//! lexicographic termination measure, factorization of bifunctorial terms,
//! and normalization to K-L form.

use crate::formula::Formula;
use crate::fragment::{fragment_of, Fragment};
use crate::term::{Index, Term, TypeError};

/// Termination measure for the normal-form reductions: `n1` counts the
/// connectives (product, sum, terminal) inside the index formulas of
/// identity subterms; `n2` counts pairing brackets and terminal arrows per
/// enclosing projection operator, i.e. each such subterm contributes once
/// for every `K` operator whose scope it lies in. Degrees compare
/// lexicographically and every reduction strictly decreases them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub struct Degree {
    pub n1: usize,
    pub n2: usize,
}

fn connective_weight(formula: &Formula) -> usize {
    match formula {
        Formula::Letter(_) | Formula::Initial => 0,
        Formula::Terminal => 1,
        Formula::Prod(a, b) | Formula::Sum(a, b) => 1 + connective_weight(a) + connective_weight(b),
    }
}

/// The `(n1, n2)` degree of a term.
pub fn degree(term: &Term) -> Degree {
    fn walk(term: &Term, k_depth: usize, acc: &mut Degree) {
        match term {
            Term::Id(a) => acc.n1 += connective_weight(a),
            Term::Kappa(_) => acc.n2 += k_depth,
            Term::Lambda(_)
            | Term::Proj { .. }
            | Term::Inj { .. }
            | Term::Diag(_)
            | Term::Codiag(_) => {}
            Term::Comp(g, f) => {
                walk(g, k_depth, acc);
                walk(f, k_depth, acc);
            }
            Term::ProjArg { inner, .. } => walk(inner, k_depth + 1, acc),
            Term::InjArg { inner, .. } => walk(inner, k_depth, acc),
            Term::Pair(f, g) => {
                acc.n2 += k_depth;
                walk(f, k_depth, acc);
                walk(g, k_depth, acc);
            }
            Term::Copair(f, g) | Term::TensorProd(f, g) | Term::TensorSum(f, g) => {
                walk(f, k_depth, acc);
                walk(g, k_depth, acc);
            }
        }
    }
    let mut acc = Degree { n1: 0, n2: 0 };
    walk(term, 0, &mut acc);
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error(transparent)]
    IllTyped(#[from] TypeError),
    #[error("term is not pure combinator-style")]
    NotCombinatorStyle,
    #[error("term is not pure bifunctorial-style")]
    NotBifunctorialStyle,
    #[error("term signature {found} is not covered by the requested fragment {given}")]
    FragmentMismatch { found: Fragment, given: Fragment },
    #[error("term signature {found} is outside the {expected} family")]
    UnsupportedSignature { expected: &'static str, found: Fragment },
    #[error("term contains a composition node")]
    ContainsComposition,
    #[error("step budget of {budget} exhausted")]
    StepBudgetExceeded { budget: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Optional bounds on rewriting work.
#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub max_steps: Option<usize>,
}

/// One recorded rewrite step. Cut-elimination steps record the local redex
/// and contractum; normal-form reduction steps record the whole term and
/// its degree on both sides.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TraceStep {
    pub rule: &'static str,
    pub before: Term,
    pub after: Term,
    pub degree_before: Option<Degree>,
    pub degree_after: Option<Degree>,
}

pub type Trace = Vec<TraceStep>;

struct Ctx<'a> {
    limits: Limits,
    steps: usize,
    trace: Option<&'a mut Trace>,
}

impl<'a> Ctx<'a> {
    fn new(limits: Limits, trace: Option<&'a mut Trace>) -> Self {
        Ctx { limits, steps: 0, trace }
    }

    fn tick(&mut self) -> Result<(), RewriteError> {
        self.steps += 1;
        if let Some(budget) = self.limits.max_steps {
            if self.steps > budget {
                return Err(RewriteError::StepBudgetExceeded { budget });
            }
        }
        Ok(())
    }

    fn record(
        &mut self,
        rule: &'static str,
        before: &Term,
        after: &Term,
        degrees: Option<(Degree, Degree)>,
    ) {
        if let Some(trace) = self.trace.as_deref_mut() {
            let (db, da) = match degrees {
                Some((b, a)) => (Some(b), Some(a)),
                None => (None, None),
            };
            trace.push(TraceStep {
                rule,
                before: before.clone(),
                after: after.clone(),
                degree_before: db,
                degree_after: da,
            });
        }
    }
}

fn source_of(term: &Term) -> Result<Formula, RewriteError> {
    Ok(term.infer_type()?.0)
}

fn target_of(term: &Term) -> Result<Formula, RewriteError> {
    Ok(term.infer_type()?.1)
}

/// Rewrites one topmost cut `g . f` (both sides composition-free) to a term
/// whose compositions, if any, are strictly shorter cuts.
fn reduce_cut(g: Term, f: Term, ctx: &mut Ctx<'_>) -> Result<Term, RewriteError> {
    ctx.tick()?;
    let before = Term::comp(g.clone(), f.clone());
    let (rule, after) = match (g, f) {
        (Term::Id(_), f) => ("cat1", f),
        (g, Term::Id(_)) => ("cat1", g),
        (Term::Kappa(_), f) => ("k", Term::Kappa(source_of(&f)?)),
        (g, Term::Lambda(_)) => ("l", Term::Lambda(target_of(&g)?)),
        (g, Term::ProjArg { index, side, inner }) => {
            ("K1", Term::proj_arg(index, side, Term::comp(g, *inner)))
        }
        (Term::InjArg { index, side, inner }, f) => {
            ("L1", Term::inj_arg(index, side, Term::comp(*inner, f)))
        }
        (g, Term::Copair(f1, f2)) => (
            "L3",
            Term::copair(Term::comp(g.clone(), *f1), Term::comp(g, *f2)),
        ),
        (Term::Pair(g1, g2), f) => (
            "K3",
            Term::pair(Term::comp(*g1, f.clone()), Term::comp(*g2, f)),
        ),
        (Term::ProjArg { index, inner: g_inner, .. }, Term::Pair(f1, f2)) => {
            let picked = match index {
                Index::One => *f1,
                Index::Two => *f2,
            };
            ("K2", Term::comp(*g_inner, picked))
        }
        (Term::Copair(g1, g2), Term::InjArg { index, inner: f_inner, .. }) => {
            let picked = match index {
                Index::One => *g1,
                Index::Two => *g2,
            };
            ("L2", Term::comp(picked, *f_inner))
        }
        (Term::TensorSum(g1, g2), Term::TensorSum(f1, f2)) => (
            "plus2",
            Term::tensor_sum(Term::comp(*g1, *f1), Term::comp(*g2, *f2)),
        ),
        (Term::TensorProd(g1, g2), Term::TensorProd(f1, f2)) => (
            "times2",
            Term::tensor_prod(Term::comp(*g1, *f1), Term::comp(*g2, *f2)),
        ),
        // Interactions between full-side formers and tensors, derivable
        // from the copair/pair laws and bifunctoriality.
        (Term::Copair(g1, g2), Term::TensorSum(f1, f2)) => (
            "L2+",
            Term::copair(Term::comp(*g1, *f1), Term::comp(*g2, *f2)),
        ),
        (Term::TensorProd(g1, g2), Term::Pair(f1, f2)) => (
            "K2*",
            Term::pair(Term::comp(*g1, *f1), Term::comp(*g2, *f2)),
        ),
        (Term::ProjArg { index, inner: g_inner, .. }, Term::TensorProd(f1, f2)) => {
            let (picked, other) = match index {
                Index::One => (*f1, *f2),
                Index::Two => (*f2, *f1),
            };
            let side = source_of(&other)?;
            ("K1*", Term::proj_arg(index, side, Term::comp(*g_inner, picked)))
        }
        (Term::TensorSum(g1, g2), Term::InjArg { index, inner: f_inner, .. }) => {
            let (picked, other) = match index {
                Index::One => (*g1, *g2),
                Index::Two => (*g2, *g1),
            };
            let side = target_of(&other)?;
            ("L1+", Term::inj_arg(index, side, Term::comp(picked, *f_inner)))
        }
        (g, f) => {
            return Err(RewriteError::Internal(format!(
                "no cut rule applies to ({f};{g})"
            )))
        }
    };
    ctx.record(rule, &before, &after, None);
    Ok(after)
}

fn elim(term: &Term, ctx: &mut Ctx<'_>) -> Result<Term, RewriteError> {
    match term {
        Term::Comp(g, f) => {
            let f = elim(f, ctx)?;
            let g = elim(g, ctx)?;
            let reduced = reduce_cut(g, f, ctx)?;
            if reduced.contains_composition() {
                elim(&reduced, ctx)
            } else {
                Ok(reduced)
            }
        }
        Term::ProjArg { index, side, inner } => {
            Ok(Term::proj_arg(*index, side.clone(), elim(inner, ctx)?))
        }
        Term::InjArg { index, side, inner } => {
            Ok(Term::inj_arg(*index, side.clone(), elim(inner, ctx)?))
        }
        Term::Pair(f, g) => Ok(Term::pair(elim(f, ctx)?, elim(g, ctx)?)),
        Term::Copair(f, g) => Ok(Term::copair(elim(f, ctx)?, elim(g, ctx)?)),
        Term::TensorProd(f, g) => Ok(Term::tensor_prod(elim(f, ctx)?, elim(g, ctx)?)),
        Term::TensorSum(f, g) => Ok(Term::tensor_sum(elim(f, ctx)?, elim(g, ctx)?)),
        atom => Ok(atom.clone()),
    }
}

/// Rewrites a combinator-style term to an equal composition-free term by
/// eliminating topmost cuts, innermost first.
pub fn eliminate_cut(term: &Term, fragment: &Fragment) -> Result<Term, RewriteError> {
    eliminate_cut_with(term, fragment, Limits::default(), None)
}

pub fn eliminate_cut_with(
    term: &Term,
    fragment: &Fragment,
    limits: Limits,
    trace: Option<&mut Trace>,
) -> Result<Term, RewriteError> {
    term.infer_type()?;
    if !term.is_combinator_style() {
        return Err(RewriteError::NotCombinatorStyle);
    }
    let found = fragment_of([term]);
    if !found.subsumed_by(fragment) {
        return Err(RewriteError::FragmentMismatch { found, given: *fragment });
    }
    let mut ctx = Ctx::new(limits, trace);
    let out = elim(term, &mut ctx)?;
    debug_assert!(!out.contains_composition());
    Ok(out)
}

/// True when the term lives in the signature of the cartesian calculus,
/// possibly extended with bifunctorial sums: identities, terminal arrows,
/// projection operators, pairing, and the sum tensor.
fn in_extended_cartesian_signature(term: &Term) -> bool {
    match term {
        Term::Id(_) | Term::Kappa(_) => true,
        Term::Comp(g, f) => {
            in_extended_cartesian_signature(g) && in_extended_cartesian_signature(f)
        }
        Term::ProjArg { inner, .. } => in_extended_cartesian_signature(inner),
        Term::Pair(f, g) | Term::TensorSum(f, g) => {
            in_extended_cartesian_signature(f) && in_extended_cartesian_signature(g)
        }
        _ => false,
    }
}

enum Reduction {
    Rewritten(&'static str, Term),
    Normal,
}

/// Applies the leftmost-innermost reduction if any redex remains. The three
/// terminal-object rules run only when `with_terminal_rules` is set.
fn reduce_once(term: &Term, with_terminal_rules: bool) -> Reduction {
    // innermost: children first
    match term {
        Term::ProjArg { index, side, inner } => {
            match reduce_once(inner, with_terminal_rules) {
                Reduction::Rewritten(rule, inner2) => {
                    return Reduction::Rewritten(rule, Term::proj_arg(*index, side.clone(), inner2))
                }
                Reduction::Normal => {}
            }
        }
        Term::Pair(f, g) | Term::TensorSum(f, g) => {
            match reduce_once(f, with_terminal_rules) {
                Reduction::Rewritten(rule, f2) => {
                    let rebuilt = match term {
                        Term::Pair(..) => Term::pair(f2, (**g).clone()),
                        _ => Term::tensor_sum(f2, (**g).clone()),
                    };
                    return Reduction::Rewritten(rule, rebuilt);
                }
                Reduction::Normal => {}
            }
            match reduce_once(g, with_terminal_rules) {
                Reduction::Rewritten(rule, g2) => {
                    let rebuilt = match term {
                        Term::Pair(..) => Term::pair((**f).clone(), g2),
                        _ => Term::tensor_sum((**f).clone(), g2),
                    };
                    return Reduction::Rewritten(rule, rebuilt);
                }
                Reduction::Normal => {}
            }
        }
        _ => {}
    }
    // then the root
    match term {
        Term::Id(Formula::Prod(a, b)) => Reduction::Rewritten(
            "id-prod",
            Term::pair(
                Term::proj_arg(Index::One, (**b).clone(), Term::Id((**a).clone())),
                Term::proj_arg(Index::Two, (**a).clone(), Term::Id((**b).clone())),
            ),
        ),
        Term::Id(Formula::Sum(a, b)) => Reduction::Rewritten(
            "id-sum",
            Term::tensor_sum(Term::Id((**a).clone()), Term::Id((**b).clone())),
        ),
        Term::Id(Formula::Terminal) if with_terminal_rules => {
            Reduction::Rewritten("id-terminal", Term::Kappa(Formula::Terminal))
        }
        Term::ProjArg { index, side, inner } => match &**inner {
            Term::Pair(f, g) => Reduction::Rewritten(
                "K-pair",
                Term::pair(
                    Term::proj_arg(*index, side.clone(), (**f).clone()),
                    Term::proj_arg(*index, side.clone(), (**g).clone()),
                ),
            ),
            Term::Kappa(a) if with_terminal_rules => {
                let src = match index {
                    Index::One => Formula::prod(a.clone(), side.clone()),
                    Index::Two => Formula::prod(side.clone(), a.clone()),
                };
                Reduction::Rewritten("K-terminal", Term::Kappa(src))
            }
            _ => Reduction::Normal,
        },
        _ => Reduction::Normal,
    }
}

/// Reduces a composition-free term of the cartesian-with-bifunctorial-sums
/// signature to normal form. Every step strictly decreases the degree.
pub fn reduce_to_normal_form(term: &Term, fragment: &Fragment) -> Result<Term, RewriteError> {
    reduce_to_normal_form_with(term, fragment, Limits::default(), None)
}

pub fn reduce_to_normal_form_with(
    term: &Term,
    fragment: &Fragment,
    limits: Limits,
    trace: Option<&mut Trace>,
) -> Result<Term, RewriteError> {
    term.infer_type()?;
    if term.contains_composition() {
        return Err(RewriteError::ContainsComposition);
    }
    if !in_extended_cartesian_signature(term) {
        return Err(RewriteError::UnsupportedSignature {
            expected: "cartesian with bifunctorial sums",
            found: fragment_of([term]),
        });
    }
    let found = fragment_of([term]);
    if !found.subsumed_by(fragment) {
        return Err(RewriteError::FragmentMismatch { found, given: *fragment });
    }
    let with_terminal_rules = fragment.has_terminal;
    let mut ctx = Ctx::new(limits, trace);
    let mut current = term.clone();
    let mut current_degree = degree(&current);
    loop {
        match reduce_once(&current, with_terminal_rules) {
            Reduction::Normal => return Ok(current),
            Reduction::Rewritten(rule, next) => {
                ctx.tick()?;
                let next_degree = degree(&next);
                ctx.record(rule, &current, &next, Some((current_degree, next_degree)));
                if next_degree >= current_degree {
                    return Err(RewriteError::Internal(format!(
                        "reduction {rule} failed to decrease degree: {current} -> {next}"
                    )));
                }
                current = next;
                current_degree = next_degree;
            }
        }
    }
}

/// Cut elimination followed by reduction to the unique composition-free
/// normal form. Two terms equal in the theory normalize to the identical
/// term within this signature family.
pub fn normalize(term: &Term, fragment: &Fragment) -> Result<Term, RewriteError> {
    normalize_with(term, fragment, Limits::default(), None)
}

pub fn normalize_with(
    term: &Term,
    fragment: &Fragment,
    limits: Limits,
    mut trace: Option<&mut Trace>,
) -> Result<Term, RewriteError> {
    term.infer_type()?;
    if !in_extended_cartesian_signature(term) {
        return Err(RewriteError::UnsupportedSignature {
            expected: "cartesian with bifunctorial sums",
            found: fragment_of([term]),
        });
    }
    let cut_free = eliminate_cut_with(term, fragment, limits, trace.as_deref_mut())?;
    reduce_to_normal_form_with(&cut_free, fragment, limits, trace)
}

/// A factorized term: composition-free factors listed in application order,
/// so the composite is the fold of `;` over the list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<Term>,
}

impl Factorization {
    pub fn factors(&self) -> &[Term] {
        &self.factors
    }

    pub fn composite(&self) -> Term {
        let mut iter = self.factors.iter().cloned();
        let first = iter.next().expect("factorization is nonempty");
        iter.fold(first, |acc, next| Term::comp(next, acc))
    }
}

fn zip_factors(
    fs: Vec<Term>,
    gs: Vec<Term>,
    combine: fn(Term, Term) -> Term,
) -> Result<Vec<Term>, RewriteError> {
    let pad_f = target_of(fs.last().expect("nonempty"))?;
    let pad_g = target_of(gs.last().expect("nonempty"))?;
    let len = fs.len().max(gs.len());
    let mut fs = fs;
    let mut gs = gs;
    fs.resize(len, Term::Id(pad_f));
    gs.resize(len, Term::Id(pad_g));
    Ok(fs.into_iter().zip(gs).map(|(f, g)| combine(f, g)).collect())
}

fn raw_factors(term: &Term) -> Result<Vec<Term>, RewriteError> {
    match term {
        Term::Comp(g, f) => {
            let mut out = raw_factors(f)?;
            out.extend(raw_factors(g)?);
            Ok(out)
        }
        Term::TensorProd(f, g) => {
            zip_factors(raw_factors(f)?, raw_factors(g)?, Term::tensor_prod)
        }
        Term::TensorSum(f, g) => zip_factors(raw_factors(f)?, raw_factors(g)?, Term::tensor_sum),
        Term::Id(_)
        | Term::Kappa(_)
        | Term::Lambda(_)
        | Term::Proj { .. }
        | Term::Inj { .. }
        | Term::Diag(_)
        | Term::Codiag(_) => Ok(vec![term.clone()]),
        Term::ProjArg { .. } | Term::InjArg { .. } | Term::Pair(..) | Term::Copair(..) => {
            Err(RewriteError::NotBifunctorialStyle)
        }
    }
}

/// Splits a bifunctorial-style term into composition-free factors,
/// dropping identity factors.
pub fn factorize(term: &Term) -> Result<Factorization, RewriteError> {
    let (src, _) = term.infer_type()?;
    let factors = raw_factors(term)?;
    let mut kept: Vec<Term> = factors.into_iter().filter(|f| !f.is_complex_identity()).collect();
    if kept.is_empty() {
        kept.push(Term::Id(src));
    }
    Ok(Factorization { factors: kept })
}

/// Classification of a bifunctorial-style term by the generator family it
/// draws on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlClass {
    KTerm,
    LTerm,
    ComplexIdentity,
    Neither,
}

fn uses_product_side(term: &Term) -> bool {
    match term {
        Term::Kappa(_) | Term::Proj { .. } | Term::Diag(_) => true,
        Term::ProjArg { .. } | Term::Pair(..) => true,
        Term::Id(_) | Term::Lambda(_) | Term::Inj { .. } | Term::Codiag(_) => false,
        Term::InjArg { inner, .. } => uses_product_side(inner),
        Term::Comp(f, g) | Term::Copair(f, g) | Term::TensorProd(f, g) | Term::TensorSum(f, g) => {
            uses_product_side(f) || uses_product_side(g)
        }
    }
}

fn uses_sum_side(term: &Term) -> bool {
    match term {
        Term::Lambda(_) | Term::Inj { .. } | Term::Codiag(_) => true,
        Term::InjArg { .. } | Term::Copair(..) => true,
        Term::Id(_) | Term::Kappa(_) | Term::Proj { .. } | Term::Diag(_) => false,
        Term::ProjArg { inner, .. } => uses_sum_side(inner),
        Term::Comp(f, g) | Term::Pair(f, g) | Term::TensorProd(f, g) | Term::TensorSum(f, g) => {
            uses_sum_side(f) || uses_sum_side(g)
        }
    }
}

/// Classifies a term as a K-term (no sum-side generators), an L-term (no
/// product-side generators), a complex identity, or neither.
pub fn classify_kl(term: &Term) -> KlClass {
    if term.is_complex_identity() {
        return KlClass::ComplexIdentity;
    }
    match (uses_product_side(term), uses_sum_side(term)) {
        (true, true) => KlClass::Neither,
        (true, false) => KlClass::KTerm,
        (false, true) => KlClass::LTerm,
        (false, false) => KlClass::Neither,
    }
}

/// Replaces every sum-side atom by the identity on its source, leaving the
/// product-side skeleton of a composition-free factor.
fn product_part(term: &Term) -> Term {
    match term {
        Term::Lambda(_) => Term::Id(Formula::Initial),
        Term::Inj { index, left, right } => Term::Id(match index {
            Index::One => left.clone(),
            Index::Two => right.clone(),
        }),
        Term::Codiag(a) => Term::Id(Formula::sum(a.clone(), a.clone())),
        Term::TensorProd(f, g) => Term::tensor_prod(product_part(f), product_part(g)),
        Term::TensorSum(f, g) => Term::tensor_sum(product_part(f), product_part(g)),
        other => other.clone(),
    }
}

/// Dually, replaces every product-side atom by the identity on its target.
fn sum_part(term: &Term) -> Term {
    match term {
        Term::Kappa(_) => Term::Id(Formula::Terminal),
        Term::Proj { index, left, right } => Term::Id(match index {
            Index::One => left.clone(),
            Index::Two => right.clone(),
        }),
        Term::Diag(a) => Term::Id(Formula::prod(a.clone(), a.clone())),
        Term::TensorProd(f, g) => Term::tensor_prod(sum_part(f), sum_part(g)),
        Term::TensorSum(f, g) => Term::tensor_sum(sum_part(f), sum_part(g)),
        other => other.clone(),
    }
}

/// Commutes a composition-free K-term past a composition-free L-term:
/// `f . g` equals `lpart . kpart` with either part possibly trivial.
/// Inputs may also be complex identities, which vanish.
fn commute_kl(f: &Term, g: &Term) -> Result<(Option<Term>, Option<Term>), RewriteError> {
    if f.is_complex_identity() {
        return Ok(if g.is_complex_identity() { (None, None) } else { (None, Some(g.clone())) });
    }
    if g.is_complex_identity() {
        return Ok((Some(f.clone()), None));
    }
    match (f, g) {
        // the initial arrow absorbs on the left
        (_, Term::Lambda(_)) => Ok((None, Some(Term::Lambda(target_of(f)?)))),
        // the terminal arrow absorbs on the right
        (Term::Kappa(_), _) => Ok((Some(Term::Kappa(source_of(g)?)), None)),
        // f . m_D = m_C . (f + f)
        (_, Term::Codiag(_)) => Ok((
            Some(Term::tensor_sum(f.clone(), f.clone())),
            Some(Term::Codiag(target_of(f)?)),
        )),
        // w_B . g = (g x g) . w_A
        (Term::Diag(_), _) => Ok((
            Some(Term::Diag(source_of(g)?)),
            Some(Term::tensor_prod(g.clone(), g.clone())),
        )),
        // k^i . (g1 x g2) = g_i . k^i
        (Term::Proj { index, .. }, Term::TensorProd(g1, g2)) => {
            let a1 = source_of(g1)?;
            let a2 = source_of(g2)?;
            let picked = match index {
                Index::One => (**g1).clone(),
                Index::Two => (**g2).clone(),
            };
            let kp = Term::proj(*index, a1, a2);
            Ok(if picked.is_complex_identity() {
                (Some(kp), None)
            } else {
                (Some(kp), Some(picked))
            })
        }
        // (f1 + f2) . l^i = l^i . f_i
        (Term::TensorSum(f1, f2), Term::Inj { index, .. }) => {
            let c1 = target_of(f1)?;
            let c2 = target_of(f2)?;
            let picked = match index {
                Index::One => (**f1).clone(),
                Index::Two => (**f2).clone(),
            };
            let lp = Term::inj(*index, c1, c2);
            Ok(if picked.is_complex_identity() {
                (None, Some(lp))
            } else {
                (Some(picked), Some(lp))
            })
        }
        // componentwise through matching tensors
        (Term::TensorProd(f1, f2), Term::TensorProd(g1, g2)) => {
            commute_components(f1, f2, g1, g2, Term::tensor_prod)
        }
        (Term::TensorSum(f1, f2), Term::TensorSum(g1, g2)) => {
            commute_components(f1, f2, g1, g2, Term::tensor_sum)
        }
        _ => Err(RewriteError::Internal(format!(
            "no commutation case for ({g};{f})"
        ))),
    }
}

fn commute_components(
    f1: &Term,
    f2: &Term,
    g1: &Term,
    g2: &Term,
    combine: fn(Term, Term) -> Term,
) -> Result<(Option<Term>, Option<Term>), RewriteError> {
    let (k1, l1) = commute_kl(f1, g1)?;
    let (k2, l2) = commute_kl(f2, g2)?;
    let kpart = match (&k1, &k2) {
        (None, None) => None,
        _ => {
            let left = match k1 {
                Some(t) => t,
                None => Term::Id(source_of(g1)?),
            };
            let right = match k2 {
                Some(t) => t,
                None => Term::Id(source_of(g2)?),
            };
            Some(combine(left, right))
        }
    };
    let lpart = match (&l1, &l2) {
        (None, None) => None,
        _ => {
            let left = match l1 {
                Some(t) => t,
                None => Term::Id(target_of(f1)?),
            };
            let right = match l2 {
                Some(t) => t,
                None => Term::Id(target_of(f2)?),
            };
            Some(combine(left, right))
        }
    };
    Ok((kpart, lpart))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PartKind {
    K,
    L,
}

/// Rewrites a bifunctorial-style term into K-L normal form: a K-part acting
/// first, then an L-part, either of which may be an identity.
pub fn kl_normalize(term: &Term) -> Result<(Term, Term), RewriteError> {
    let (src, tgt) = term.infer_type()?;
    if !term.is_bifunctorial_style() {
        return Err(RewriteError::NotBifunctorialStyle);
    }
    let factorization = factorize(term)?;
    let mut seq: Vec<(PartKind, Term)> = Vec::new();
    for factor in factorization.factors() {
        match classify_kl(factor) {
            KlClass::ComplexIdentity => {}
            KlClass::KTerm => seq.push((PartKind::K, factor.clone())),
            KlClass::LTerm => seq.push((PartKind::L, factor.clone())),
            KlClass::Neither => {
                let k = product_part(factor);
                let l = sum_part(factor);
                if !k.is_complex_identity() {
                    seq.push((PartKind::K, k));
                }
                if !l.is_complex_identity() {
                    seq.push((PartKind::L, l));
                }
            }
        }
    }
    // bubble K-parts to the front of the application order
    let mut guard = 0usize;
    loop {
        let inversion = (0..seq.len().saturating_sub(1))
            .find(|&i| seq[i].0 == PartKind::L && seq[i + 1].0 == PartKind::K);
        let Some(i) = inversion else { break };
        guard += 1;
        if guard > 100_000 {
            return Err(RewriteError::Internal("K-L commutation failed to terminate".into()));
        }
        let g = seq[i].1.clone();
        let f = seq[i + 1].1.clone();
        let (kpart, lpart) = commute_kl(&f, &g)?;
        let mut replacement = Vec::new();
        if let Some(k) = kpart {
            replacement.push((PartKind::K, k));
        }
        if let Some(l) = lpart {
            replacement.push((PartKind::L, l));
        }
        seq.splice(i..=i + 1, replacement);
    }
    let compose_run = |parts: Vec<Term>, identity_on: Formula| -> Term {
        let mut iter = parts.into_iter();
        match iter.next() {
            None => Term::Id(identity_on),
            Some(first) => iter.fold(first, |acc, next| Term::comp(next, acc)),
        }
    };
    let kparts: Vec<Term> =
        seq.iter().filter(|(kind, _)| *kind == PartKind::K).map(|(_, t)| t.clone()).collect();
    let lparts: Vec<Term> =
        seq.iter().filter(|(kind, _)| *kind == PartKind::L).map(|(_, t)| t.clone()).collect();
    let kpart = compose_run(kparts, src);
    let lpart = compose_run(lparts, tgt);
    Ok((kpart, lpart))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::interpret;
    use crate::parse::parse_term;

    fn tr(text: &str) -> Term {
        parse_term(text).unwrap()
    }

    fn frag(t: &Term) -> Fragment {
        fragment_of([t])
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degree(&tr("1{p*q}")), Degree { n1: 1, n2: 0 });
        assert_eq!(degree(&tr("K1{q}(<1{p},1{p}>)")), Degree { n1: 0, n2: 1 });
        assert_eq!(degree(&tr("k{p}")), Degree { n1: 0, n2: 0 });
        // nested projection operators count the same bracket once per scope
        assert_eq!(degree(&tr("K2{r}(K1{q}(<1{p},1{p}>))")), Degree { n1: 0, n2: 2 });
        assert_eq!(degree(&tr("1{I}")), Degree { n1: 1, n2: 0 });
    }

    #[test]
    fn cut_elimination_basics() {
        let t = tr("(1{p};1{p})");
        assert_eq!(eliminate_cut(&t, &frag(&t)).unwrap(), tr("1{p}"));
        // the terminal rule wins over the initial rule on O -> I
        let t = tr("(l{p};k{p})");
        let out = eliminate_cut(&t, &frag(&t)).unwrap();
        assert_eq!(out, tr("k{O}"));
        assert_eq!(interpret(&out).unwrap(), interpret(&t).unwrap());
    }

    #[test]
    fn cut_elimination_projection_pair() {
        // K^1_A g . <f1, f2>  ~  g . f1
        let t = tr("(<K1{q}(1{p}),K2{p}(1{q})>;K1{q}(1{p}))");
        let out = eliminate_cut(&t, &frag(&t)).unwrap();
        assert!(!out.contains_composition());
        assert_eq!(interpret(&out).unwrap(), interpret(&t).unwrap());
        let expected = interpret(&tr("K1{q}(1{p})")).unwrap();
        assert_eq!(interpret(&out).unwrap(), expected);
    }

    #[test]
    fn cut_elimination_handles_tensors() {
        let t = tr("((1{p}+1{q});(k{p}+1{q}))");
        let out = eliminate_cut(&t, &frag(&t)).unwrap();
        assert!(!out.contains_composition());
        assert_eq!(interpret(&out).unwrap(), interpret(&t).unwrap());
        // projection operator against a product tensor
        let t = tr("((<1{p},1{p}>*1{q});K1{q}(k1{p,p}))");
        // mixed style is rejected
        assert!(matches!(eliminate_cut(&t, &frag(&t)), Err(RewriteError::NotCombinatorStyle)));
        let t = tr("((<1{p},1{p}>*1{q});K1{q}(K1{p}(1{p})))");
        let out = eliminate_cut(&t, &frag(&t)).unwrap();
        assert!(!out.contains_composition());
        assert_eq!(interpret(&out).unwrap(), interpret(&t).unwrap());
    }

    #[test]
    fn reduction_table() {
        let fr = crate::fragment::parse_fragment("x,+b,I").unwrap();
        assert_eq!(
            reduce_to_normal_form(&tr("1{p*q}"), &fr).unwrap(),
            tr("<K1{q}(1{p}),K2{p}(1{q})>")
        );
        assert_eq!(reduce_to_normal_form(&tr("1{p+q}"), &fr).unwrap(), tr("(1{p}+1{q})"));
        assert_eq!(reduce_to_normal_form(&tr("1{I}"), &fr).unwrap(), tr("k{I}"));
        assert_eq!(
            reduce_to_normal_form(&tr("K1{q}(<1{p},1{p}>)"), &fr).unwrap(),
            tr("<K1{q}(1{p}),K1{q}(1{p})>")
        );
        assert_eq!(reduce_to_normal_form(&tr("K1{q}(k{p})"), &fr).unwrap(), tr("k{p*q}"));
        assert_eq!(reduce_to_normal_form(&tr("K2{p}(k{q})"), &fr).unwrap(), tr("k{p*q}"));
    }

    #[test]
    fn terminal_rules_disabled_without_terminal() {
        let fr = crate::fragment::parse_fragment("x,+b").unwrap();
        // no terminal in the fragment: 1_{p*q} still reduces, but k-rules are moot
        assert_eq!(
            reduce_to_normal_form(&tr("1{p*q}"), &fr).unwrap(),
            tr("<K1{q}(1{p}),K2{p}(1{q})>")
        );
    }

    #[test]
    fn every_arrow_into_terminal_normalizes_to_kappa() {
        let fr = crate::fragment::parse_fragment("x,+b,I").unwrap();
        for text in ["K1{q}(k{p})", "1{I}", "K2{I}(k{I})", "k{p*q}"] {
            let t = tr(text);
            let (src, _) = t.infer_type().unwrap();
            assert_eq!(normalize(&t, &fr).unwrap(), Term::Kappa(src), "{text}");
        }
    }

    #[test]
    fn normalize_composite_identity() {
        let t = tr("(1{p*q};1{p*q})");
        assert_eq!(normalize(&t, &frag(&t)).unwrap(), tr("<K1{q}(1{p}),K2{p}(1{q})>"));
        let t = tr("K1{q}(1{p})");
        assert_eq!(normalize(&t, &frag(&t)).unwrap(), tr("K1{q}(1{p})"));
    }

    #[test]
    fn reduction_trace_decreases_degree() {
        let fr = crate::fragment::parse_fragment("x,+b,I").unwrap();
        let mut trace = Trace::new();
        let t = tr("K1{q}(<1{p*p},k{p*p}>)");
        reduce_to_normal_form_with(&t, &fr, Limits::default(), Some(&mut trace)).unwrap();
        assert!(!trace.is_empty());
        for step in &trace {
            assert!(step.degree_after.unwrap() < step.degree_before.unwrap(), "{}", step.rule);
        }
    }

    #[test]
    fn factorize_tensor_of_composites() {
        // (k^1_{A,B} x l^1_{C,D}) + w_E splits into a product-side factor
        // followed by a sum-side factor
        let t = tr("((k1{a,b}*l1{c,d})+w{e})");
        let f = factorize(&t).unwrap();
        assert_eq!(f.factors().len(), 1); // composition-free already: single factor
        let t2 = tr("(((k1{a,b}*1{c})+w{e});((1{a}*l1{c,d})+1{e*e}))");
        let f2 = factorize(&t2).unwrap();
        assert_eq!(f2.factors().len(), 2);
        assert_eq!(interpret(&f2.composite()).unwrap(), interpret(&t).unwrap());
    }

    #[test]
    fn factorize_drops_identity_factors() {
        let t = tr("(w{p};(1{p}*1{p}))");
        let f = factorize(&t).unwrap();
        assert_eq!(f.factors(), &[tr("w{p}")]);
        let t = tr("w{p}");
        assert_eq!(factorize(&t).unwrap().factors(), &[tr("w{p}")]);
        let t = tr("(1{p};1{p})");
        assert_eq!(factorize(&t).unwrap().factors(), &[tr("1{p}")]);
    }

    #[test]
    fn classification() {
        assert_eq!(classify_kl(&tr("(1{p}*1{q})")), KlClass::ComplexIdentity);
        assert_eq!(classify_kl(&tr("(k1{p,q}+1{r})")), KlClass::KTerm);
        assert_eq!(classify_kl(&tr("(k1{p,q}*m{r})")), KlClass::Neither);
        assert_eq!(classify_kl(&tr("m{r}")), KlClass::LTerm);
        assert_eq!(classify_kl(&tr("k{p}")), KlClass::KTerm);
        assert_eq!(classify_kl(&tr("l{p}")), KlClass::LTerm);
    }

    #[test]
    fn kl_normal_form_of_diagonal_after_codiagonal() {
        // w_p . m_p: the canonical form puts the sum tensor first
        let t = tr("(m{p};w{p})");
        let (k, l) = kl_normalize(&t).unwrap();
        assert_eq!(k, tr("(w{p}+w{p})"));
        assert_eq!(l, tr("m{p*p}"));
        let reassembled = Term::comp(l, k);
        assert_eq!(interpret(&reassembled).unwrap(), interpret(&t).unwrap());
    }

    #[test]
    fn kl_normal_form_of_atoms() {
        let (k, l) = kl_normalize(&tr("k1{p,q}")).unwrap();
        assert_eq!((k, l), (tr("k1{p,q}"), tr("1{p}")));
        let (k, l) = kl_normalize(&tr("l1{p,q}")).unwrap();
        assert_eq!((k, l), (tr("1{p}"), tr("l1{p,q}")));
    }

    #[test]
    fn kl_normalize_mixed_factor() {
        let t = tr("((k1{a,b}*l1{c,d})+w{e})");
        let (k, l) = kl_normalize(&t).unwrap();
        assert!(matches!(classify_kl(&k), KlClass::KTerm | KlClass::ComplexIdentity));
        assert!(matches!(classify_kl(&l), KlClass::LTerm | KlClass::ComplexIdentity));
        let reassembled = Term::comp(l.clone(), k.clone());
        assert_eq!(interpret(&reassembled).unwrap(), interpret(&t).unwrap());
        assert_eq!(k, tr("((k1{a,b}*1{c})+w{e})"));
        assert_eq!(l, tr("((1{a}*l1{c,d})+1{e*e})"));
    }

    #[test]
    fn step_budget_is_honored() {
        let t = tr("(1{((p*p)*(p*p))*((p*p)*(p*p))};1{((p*p)*(p*p))*((p*p)*(p*p))})");
        let limits = Limits { max_steps: Some(2) };
        let err = normalize_with(&t, &frag(&t), limits, None).unwrap_err();
        assert!(matches!(err, RewriteError::StepBudgetExceeded { .. }));
    }
}
