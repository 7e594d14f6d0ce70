//! The collapse-witness construction: given two arrows of the same type in
//! the products-and-sums signature whose interpretations differ, build a
//! certified context pipeline reducing their hypothetical equality to the
//! equality of the two projections `k^1 = k^2` (or dually of the two
//! injections `l^1 = l^2`), from which every parallel pair of arrows
//! collapses. The witness replays mechanically and every stage is checked
//! against the interpretation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::formula::{Formula, Path, Side};
use crate::fragment::{fragment_of, Fragment};
use crate::graph::{interpret, Relation};
use crate::rewrite::{eliminate_cut, RewriteError};
use crate::term::{Index, Term, TypeError};
use crate::translate::combinator_image;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MaximalityError {
    #[error(transparent)]
    IllTyped(#[from] TypeError),
    #[error("terms have different types: {left_src}->{left_tgt} vs {right_src}->{right_tgt}")]
    TypeMismatch {
        left_src: Formula,
        left_tgt: Formula,
        right_src: Formula,
        right_tgt: Formula,
    },
    #[error("terms use signature {found}, outside the products-and-sums family")]
    OutsideProductsSums { found: Fragment },
    #[error("interpretations coincide after letter substitution; no witness exists")]
    GraphsEqual,
    #[error("path does not address a sum subformula")]
    PathNotSum,
    #[error("path does not address a product subformula")]
    PathNotProduct,
    #[error("shape is not a tree of {expected} copies of a single letter")]
    FanShape { expected: usize },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Which generator pair the witness reduces to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    /// `k^1_{p,p} = k^2_{p,p}`
    ProjectionsCollapse,
    /// `l^1_{p,p} = l^2_{p,p}`
    InjectionsCollapse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageSide {
    /// context composed onto the source: `f . h`
    Pre,
    /// context composed onto the target: `h . f`
    Post,
}

/// One pre- or post-composition of the pipeline, with the running state
/// after applying it.
#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub rule: String,
    pub side: StageSide,
    pub context: Term,
    pub tracked: (usize, usize),
    pub f_graph: Relation,
    pub g_graph: Relation,
}

/// The full §-style certificate: substitution, stage list, the canonical
/// final pair, and the generator equation everything reduces to.
#[derive(Debug, Clone, Serialize)]
pub struct CollapseWitness {
    pub substitution: BTreeMap<String, String>,
    /// When set, the roles of the two input terms were exchanged so that
    /// the tracked pair lies in the first graph.
    pub swapped: bool,
    pub stages: Vec<Stage>,
    pub final_pair: (Term, Term),
    pub conclusion: Conclusion,
}

/// Replaces every letter by `p`, in types and annotations alike. The
/// interpretation is unchanged as a set of pairs.
pub fn substitute_all_letters(term: &Term) -> Term {
    term.map_letters(&|_| "p".to_string())
}

/// The context `h(l^i)`: a term that is `l^i` at the addressed sum
/// subformula and identities elsewhere, built with the tensor operations.
/// Its type is `A[sum := summand_i] -> A`.
pub fn injection_context(formula: &Formula, sum_path: &[Side], index: Index) -> Result<Term, MaximalityError> {
    match sum_path.split_first() {
        None => match formula {
            Formula::Sum(a, b) => Ok(Term::inj(index, (**a).clone(), (**b).clone())),
            _ => Err(MaximalityError::PathNotSum),
        },
        Some((side, rest)) => {
            let (combine, a, b): (fn(Term, Term) -> Term, &Formula, &Formula) = match formula {
                Formula::Prod(a, b) => (Term::tensor_prod, a, b),
                Formula::Sum(a, b) => (Term::tensor_sum, a, b),
                _ => return Err(MaximalityError::PathNotSum),
            };
            Ok(match side {
                Side::Left => combine(injection_context(a, rest, index)?, Term::Id(b.clone())),
                Side::Right => combine(Term::Id(a.clone()), injection_context(b, rest, index)?),
            })
        }
    }
}

/// The dual context `h(k^i)`: `k^i` at the addressed product subformula,
/// identities elsewhere. Its type is `B -> B[prod := factor_i]`.
pub fn projection_context(formula: &Formula, prod_path: &[Side], index: Index) -> Result<Term, MaximalityError> {
    match prod_path.split_first() {
        None => match formula {
            Formula::Prod(a, b) => Ok(Term::proj(index, (**a).clone(), (**b).clone())),
            _ => Err(MaximalityError::PathNotProduct),
        },
        Some((side, rest)) => {
            let (combine, a, b): (fn(Term, Term) -> Term, &Formula, &Formula) = match formula {
                Formula::Prod(a, b) => (Term::tensor_prod, a, b),
                Formula::Sum(a, b) => (Term::tensor_sum, a, b),
                _ => return Err(MaximalityError::PathNotProduct),
            };
            Ok(match side {
                Side::Left => combine(projection_context(a, rest, index)?, Term::Id(b.clone())),
                Side::Right => combine(Term::Id(a.clone()), projection_context(b, rest, index)?),
            })
        }
    }
}

fn single_letter_of(shape: &Formula, product: bool) -> Option<&str> {
    match shape {
        Formula::Letter(name) => Some(name),
        Formula::Prod(a, b) if product => {
            let la = single_letter_of(a, product)?;
            let lb = single_letter_of(b, product)?;
            (la == lb).then_some(la)
        }
        Formula::Sum(a, b) if !product => {
            let la = single_letter_of(a, product)?;
            let lb = single_letter_of(b, product)?;
            (la == lb).then_some(la)
        }
        _ => None,
    }
}

/// The spreading arrow from one letter onto a product tree of copies of
/// that letter, built from the diagonal: its graph is `{(0, x)}` over the
/// whole target.
pub fn fan_out(count: usize, shape: &Formula) -> Result<Term, MaximalityError> {
    if single_letter_of(shape, true).is_none() || shape.letter_count() != count || count == 0 {
        return Err(MaximalityError::FanShape { expected: count });
    }
    Ok(fan_out_term(shape))
}

fn fan_out_term(shape: &Formula) -> Term {
    match shape {
        Formula::Prod(a, b) => {
            let letter = Formula::Letter(
                single_letter_of(shape, true).expect("validated shape").to_string(),
            );
            match (&**a, &**b) {
                (Formula::Letter(_), Formula::Letter(_)) => Term::Diag(letter),
                _ => Term::comp(
                    Term::tensor_prod(fan_out_term(a), fan_out_term(b)),
                    Term::Diag(letter),
                ),
            }
        }
        other => Term::Id(other.clone()),
    }
}

/// The collecting arrow from a sum tree of copies of one letter back onto
/// the letter, built from the codiagonal: its graph is `{(x, 0)}`.
pub fn fan_in(count: usize, shape: &Formula) -> Result<Term, MaximalityError> {
    if single_letter_of(shape, false).is_none() || shape.letter_count() != count || count == 0 {
        return Err(MaximalityError::FanShape { expected: count });
    }
    Ok(fan_in_term(shape))
}

fn fan_in_term(shape: &Formula) -> Term {
    match shape {
        Formula::Sum(a, b) => {
            let letter = Formula::Letter(
                single_letter_of(shape, false).expect("validated shape").to_string(),
            );
            match (&**a, &**b) {
                (Formula::Letter(_), Formula::Letter(_)) => Term::Codiag(letter),
                _ => Term::comp(
                    Term::Codiag(letter),
                    Term::tensor_sum(fan_in_term(a), fan_in_term(b)),
                ),
            }
        }
        other => Term::Id(other.clone()),
    }
}

/// Chain of projection operators extracting the `pos`-th letter occurrence
/// of a product tree.
fn extract_occurrence(shape: &Formula, pos: usize) -> Term {
    match shape {
        Formula::Letter(name) => Term::Id(Formula::Letter(name.clone())),
        Formula::Prod(a, b) => {
            let left = a.letter_count();
            if pos < left {
                Term::proj_arg(Index::One, (**b).clone(), extract_occurrence(a, pos))
            } else {
                Term::proj_arg(Index::Two, (**a).clone(), extract_occurrence(b, pos - left))
            }
        }
        _ => unreachable!("product tree of letters"),
    }
}

/// Chain of injection operators hitting the `pos`-th letter occurrence of
/// a sum tree.
fn place_occurrence(shape: &Formula, pos: usize) -> Term {
    match shape {
        Formula::Letter(name) => Term::Id(Formula::Letter(name.clone())),
        Formula::Sum(a, b) => {
            let left = a.letter_count();
            if pos < left {
                Term::inj_arg(Index::One, (**b).clone(), place_occurrence(a, pos))
            } else {
                Term::inj_arg(Index::Two, (**a).clone(), place_occurrence(b, pos - left))
            }
        }
        _ => unreachable!("sum tree of letters"),
    }
}

/// A right-nested product comb of `n` copies of the letter.
fn right_comb(letter: &Formula, n: usize, product: bool) -> Formula {
    if n == 1 {
        letter.clone()
    } else if product {
        Formula::prod(letter.clone(), right_comb(letter, n - 1, product))
    } else {
        Formula::sum(letter.clone(), right_comb(letter, n - 1, product))
    }
}

/// Builds the permutation term `new_shape -> shape` realizing `assign`
/// (target occurrence -> source occurrence) as a pairing of projections.
fn source_shuffle(shape: &Formula, new_shape: &Formula, assign: &dyn Fn(usize) -> usize) -> Term {
    fn build(target: &Formula, offset: usize, new_shape: &Formula, assign: &dyn Fn(usize) -> usize) -> Term {
        match target {
            Formula::Letter(_) => extract_occurrence(new_shape, assign(offset)),
            Formula::Prod(a, b) => {
                let left = a.letter_count();
                Term::pair(
                    build(a, offset, new_shape, assign),
                    build(b, offset + left, new_shape, assign),
                )
            }
            _ => unreachable!("product tree of letters"),
        }
    }
    build(shape, 0, new_shape, assign)
}

/// Dually, the permutation term `shape -> new_shape` on sum trees realized
/// as a copairing of injections; `assign` maps source occurrences of
/// `shape` to occurrences of `new_shape`.
fn target_shuffle(shape: &Formula, new_shape: &Formula, assign: &dyn Fn(usize) -> usize) -> Term {
    fn build(source: &Formula, offset: usize, new_shape: &Formula, assign: &dyn Fn(usize) -> usize) -> Term {
        match source {
            Formula::Letter(_) => place_occurrence(new_shape, assign(offset)),
            Formula::Sum(a, b) => {
                let left = a.letter_count();
                Term::copair(
                    build(a, offset, new_shape, assign),
                    build(b, offset + left, new_shape, assign),
                )
            }
            _ => unreachable!("sum tree of letters"),
        }
    }
    build(shape, 0, new_shape, assign)
}

/// Leftmost innermost sum subformula, if any.
fn find_innermost_sum(formula: &Formula) -> Option<Path> {
    match formula {
        Formula::Prod(a, b) | Formula::Sum(a, b) => {
            if let Some(mut path) = find_innermost_sum(a) {
                path.insert(0, Side::Left);
                return Some(path);
            }
            if let Some(mut path) = find_innermost_sum(b) {
                path.insert(0, Side::Right);
                return Some(path);
            }
            matches!(formula, Formula::Sum(..)).then(Vec::new)
        }
        _ => None,
    }
}

fn find_innermost_product(formula: &Formula) -> Option<Path> {
    match formula {
        Formula::Prod(a, b) | Formula::Sum(a, b) => {
            if let Some(mut path) = find_innermost_product(a) {
                path.insert(0, Side::Left);
                return Some(path);
            }
            if let Some(mut path) = find_innermost_product(b) {
                path.insert(0, Side::Right);
                return Some(path);
            }
            matches!(formula, Formula::Prod(..)).then(Vec::new)
        }
        _ => None,
    }
}

/// Running state of the construction: the two composites, their graphs,
/// and the tracked pair.
struct Pipeline {
    f: Term,
    g: Term,
    f_rel: Relation,
    g_rel: Relation,
    tracked: (usize, usize),
    stages: Vec<Stage>,
}

impl Pipeline {
    fn apply(
        &mut self,
        rule: &str,
        side: StageSide,
        context: Term,
        new_tracked: (usize, usize),
    ) -> Result<(), MaximalityError> {
        if context.is_complex_identity() {
            return Ok(());
        }
        let (compose, label): (fn(Term, Term) -> Term, StageSide) = match side {
            StageSide::Pre => (|t, ctx| Term::comp(t, ctx), StageSide::Pre),
            StageSide::Post => (|t, ctx| Term::comp(ctx, t), StageSide::Post),
        };
        self.f = compose(self.f.clone(), context.clone());
        self.g = compose(self.g.clone(), context.clone());
        self.f_rel = interpret(&self.f)?;
        self.g_rel = interpret(&self.g)?;
        if !self.f_rel.contains(new_tracked) || self.g_rel.contains(new_tracked) {
            return Err(MaximalityError::Internal(format!(
                "stage {rule} lost the tracked pair {:?}",
                new_tracked
            )));
        }
        self.tracked = new_tracked;
        self.stages.push(Stage {
            rule: rule.to_string(),
            side: label,
            context,
            tracked: new_tracked,
            f_graph: self.f_rel.clone(),
            g_graph: self.g_rel.clone(),
        });
        Ok(())
    }

    fn source(&self) -> Result<Formula, MaximalityError> {
        Ok(self.f.infer_type()?.0)
    }

    fn target(&self) -> Result<Formula, MaximalityError> {
        Ok(self.f.infer_type()?.1)
    }
}

/// Normalizes a pipeline endpoint of type `p*p -> p` or `p -> p+p` to the
/// generator it must equal, returning the projection or injection index.
fn canonical_generator(term: &Term, product_branch: bool) -> Result<(Index, Term), MaximalityError> {
    let cut_free = eliminate_cut(&combinator_image(term), &fragment_of([&combinator_image(term)]))?;
    let p = Formula::letter("p");
    if product_branch {
        match &cut_free {
            Term::ProjArg { index, side, inner }
                if **inner == Term::Id(p.clone()) && *side == p =>
            {
                Ok((*index, Term::proj(*index, p.clone(), p)))
            }
            other => Err(MaximalityError::Internal(format!(
                "expected a bare projection after cut elimination, found {other}"
            ))),
        }
    } else {
        match &cut_free {
            Term::InjArg { index, side, inner }
                if **inner == Term::Id(p.clone()) && *side == p =>
            {
                Ok((*index, Term::inj(*index, p.clone(), p)))
            }
            other => Err(MaximalityError::Internal(format!(
                "expected a bare injection after cut elimination, found {other}"
            ))),
        }
    }
}

/// Runs the whole construction. The inputs must share a type inside the
/// products-and-sums signature and have different interpretations once all
/// letters are identified.
pub fn collapse_witness(f: &Term, g: &Term) -> Result<CollapseWitness, MaximalityError> {
    let f_ty = f.infer_type()?;
    let g_ty = g.infer_type()?;
    if f_ty != g_ty {
        return Err(MaximalityError::TypeMismatch {
            left_src: f_ty.0,
            left_tgt: f_ty.1,
            right_src: g_ty.0,
            right_tgt: g_ty.1,
        });
    }
    let fragment = fragment_of([f, g]);
    if fragment.has_terminal || fragment.has_initial {
        return Err(MaximalityError::OutsideProductsSums { found: fragment });
    }

    let mut substitution = BTreeMap::new();
    for letter in f_ty.0.letters().into_iter().chain(f_ty.1.letters()) {
        if letter != "p" {
            substitution.insert(letter, "p".to_string());
        }
    }
    let f0 = substitute_all_letters(f);
    let g0 = substitute_all_letters(g);
    let f_rel = interpret(&f0)?;
    let g_rel = interpret(&g0)?;
    if f_rel == g_rel {
        return Err(MaximalityError::GraphsEqual);
    }
    let pick = f_rel.symmetric_difference(&g_rel)[0];
    let swapped = !f_rel.contains(pick);
    let (f0, g0, f_rel, g_rel) =
        if swapped { (g0, f0, g_rel, f_rel) } else { (f0, g0, f_rel, g_rel) };

    let mut pipe = Pipeline {
        f: f0,
        g: g0,
        f_rel,
        g_rel,
        tracked: pick,
        stages: Vec::new(),
    };

    // eliminate every sum in the source, keeping the tracked occurrence alive
    loop {
        let src = pipe.source()?;
        let Some(path) = find_innermost_sum(&src) else { break };
        let region = src.occurrence_offset(&path).expect("path inside the formula");
        let (left_count, right_count) = match src.subformula_at(&path) {
            Some(Formula::Sum(a, b)) => (a.letter_count(), b.letter_count()),
            _ => unreachable!("path addresses a sum"),
        };
        let x = pipe.tracked.0;
        let index = if x >= region && x < region + left_count {
            Index::One
        } else if x >= region + left_count && x < region + left_count + right_count {
            Index::Two
        } else {
            // tracked occurrence lives outside this sum: either branch works
            Index::One
        };
        let context = injection_context(&src, &path, index)?;
        let ctx_rel = interpret(&context)?;
        let new_x = ctx_rel
            .pairs()
            .find(|(_, y)| *y == x)
            .map(|(x2, _)| x2)
            .ok_or_else(|| MaximalityError::Internal("tracked occurrence dropped by injection context".into()))?;
        let rule = format!("sum-elim-l{}", index.as_u8());
        pipe.apply(&rule, StageSide::Pre, context, (new_x, pipe.tracked.1))?;
    }

    // dually eliminate every product in the target
    loop {
        let tgt = pipe.target()?;
        let Some(path) = find_innermost_product(&tgt) else { break };
        let region = tgt.occurrence_offset(&path).expect("path inside the formula");
        let (left_count, right_count) = match tgt.subformula_at(&path) {
            Some(Formula::Prod(a, b)) => (a.letter_count(), b.letter_count()),
            _ => unreachable!("path addresses a product"),
        };
        let y = pipe.tracked.1;
        let index = if y >= region && y < region + left_count {
            Index::One
        } else if y >= region + left_count && y < region + left_count + right_count {
            Index::Two
        } else {
            Index::One
        };
        let context = projection_context(&tgt, &path, index)?;
        let ctx_rel = interpret(&context)?;
        let new_y = ctx_rel
            .pairs()
            .find(|(x2, _)| *x2 == y)
            .map(|(_, y2)| y2)
            .ok_or_else(|| MaximalityError::Internal("tracked occurrence dropped by projection context".into()))?;
        let rule = format!("prod-elim-k{}", index.as_u8());
        pipe.apply(&rule, StageSide::Post, context, (pipe.tracked.0, new_y))?;
    }

    let p = Formula::letter("p");

    // bring the tracked source occurrence to the head position
    let src = pipe.source()?;
    let n = src.letter_count();
    let src_is_headed = match &src {
        Formula::Letter(_) => true,
        Formula::Prod(a, _) => matches!(&**a, Formula::Letter(_)) && pipe.tracked.0 == 0,
        _ => false,
    };
    if !src_is_headed {
        let new_shape = Formula::prod(p.clone(), right_comb(&p, n - 1, true));
        let x = pipe.tracked.0;
        let assign = move |j: usize| if j == 0 { x } else if j <= x { j - 1 } else { j };
        let context = source_shuffle(&src, &new_shape, &assign);
        let ctx_rel = interpret(&context)?;
        if !ctx_rel.is_bijection() {
            return Err(MaximalityError::Internal("source shuffle is not a bijection".into()));
        }
        pipe.apply("source-shuffle", StageSide::Pre, context, (0, pipe.tracked.1))?;
    }

    // and the tracked target occurrence likewise
    let tgt = pipe.target()?;
    let m = tgt.letter_count();
    let tgt_is_headed = match &tgt {
        Formula::Letter(_) => true,
        Formula::Sum(a, _) => matches!(&**a, Formula::Letter(_)) && pipe.tracked.1 == 0,
        _ => false,
    };
    if !tgt_is_headed {
        let new_shape = Formula::sum(p.clone(), right_comb(&p, m - 1, false));
        let y = pipe.tracked.1;
        let assign = move |j: usize| if j == y { 0 } else if j < y { j + 1 } else { j };
        let context = target_shuffle(&tgt, &new_shape, &assign);
        let ctx_rel = interpret(&context)?;
        if !ctx_rel.is_bijection() {
            return Err(MaximalityError::Internal("target shuffle is not a bijection".into()));
        }
        pipe.apply("target-shuffle", StageSide::Post, context, (pipe.tracked.0, 0))?;
    }

    // wrap with the fans to land on p*p -> p+p (or the degenerate types)
    let src = pipe.source()?;
    let tgt = pipe.target()?;
    let src_is_letter = matches!(src, Formula::Letter(_));
    let tgt_is_letter = matches!(tgt, Formula::Letter(_));
    if src_is_letter && tgt_is_letter {
        return Err(MaximalityError::Internal(
            "arrows of type p -> p cannot have distinct graphs".into(),
        ));
    }
    if !src_is_letter {
        let rest = match &src {
            Formula::Prod(_, rest) => (**rest).clone(),
            _ => unreachable!("headed product source"),
        };
        let fan = fan_out(rest.letter_count(), &rest)?;
        let context = Term::tensor_prod(Term::Id(p.clone()), fan);
        pipe.apply("source-fan", StageSide::Pre, context, pipe.tracked)?;
    }
    if !tgt_is_letter {
        let rest = match &tgt {
            Formula::Sum(_, rest) => (**rest).clone(),
            _ => unreachable!("headed sum target"),
        };
        let fan = fan_in(rest.letter_count(), &rest)?;
        let context = Term::tensor_sum(Term::Id(p.clone()), fan);
        pipe.apply("target-fan", StageSide::Post, context, pipe.tracked)?;
    }

    // final case split on the shape of the pair of graphs
    let src = pipe.source()?;
    let tgt = pipe.target()?;
    let product_branch = if src_is_letter {
        false
    } else if tgt_is_letter {
        true
    } else {
        // both wrapped: g lands in {(0,1),(1,0),(1,1)}; send (1,_) through
        // the codiagonal, (0,1) through the diagonal
        if pipe.g_rel.len() != 1 {
            return Err(MaximalityError::Internal(format!(
                "expected a singleton graph on the separated side, got {:?}",
                pipe.g_rel
            )));
        }
        let witness = pipe.g_rel.pairs().next().expect("singleton");
        if witness == (1, 0) || witness == (1, 1) {
            pipe.apply("codiag-collapse", StageSide::Post, Term::Codiag(p.clone()), (0, 0))?;
            true
        } else {
            pipe.apply("diag-split", StageSide::Pre, Term::Diag(p.clone()), (0, 0))?;
            false
        }
    };
    let _ = (src, tgt);

    if pipe.tracked != (0, 0) {
        return Err(MaximalityError::Internal(format!(
            "pipeline must track (0,0) at the end, got {:?}",
            pipe.tracked
        )));
    }
    if pipe.f_rel.len() != 1 || pipe.g_rel.len() != 1 {
        return Err(MaximalityError::Internal(
            "final graphs are not singletons".into(),
        ));
    }

    let (fi, f_canon) = canonical_generator(&pipe.f, product_branch)?;
    let (gi, g_canon) = canonical_generator(&pipe.g, product_branch)?;
    if fi != Index::One || gi != Index::Two {
        return Err(MaximalityError::Internal(format!(
            "canonical pair came out as indices {ext}/{gxt}",
            ext = fi.as_u8(),
            gxt = gi.as_u8()
        )));
    }
    let conclusion = if product_branch {
        Conclusion::ProjectionsCollapse
    } else {
        Conclusion::InjectionsCollapse
    };
    Ok(CollapseWitness {
        substitution,
        swapped,
        stages: pipe.stages,
        final_pair: (f_canon, g_canon),
        conclusion,
    })
}

/// Replays a witness against the original pair and re-checks every stage
/// and the final certificate.
pub fn verify_witness(
    witness: &CollapseWitness,
    f: &Term,
    g: &Term,
) -> Result<(), MaximalityError> {
    let (mut left, mut right) = {
        let f0 = substitute_all_letters(f);
        let g0 = substitute_all_letters(g);
        if witness.swapped {
            (g0, f0)
        } else {
            (f0, g0)
        }
    };
    for stage in &witness.stages {
        match stage.side {
            StageSide::Pre => {
                left = Term::comp(left, stage.context.clone());
                right = Term::comp(right, stage.context.clone());
            }
            StageSide::Post => {
                left = Term::comp(stage.context.clone(), left);
                right = Term::comp(stage.context.clone(), right);
            }
        }
        let lf = interpret(&left)?;
        let rg = interpret(&right)?;
        if lf != stage.f_graph || rg != stage.g_graph {
            return Err(MaximalityError::Internal(format!(
                "stage {} replays to different graphs",
                stage.rule
            )));
        }
        if !lf.contains(stage.tracked) || rg.contains(stage.tracked) {
            return Err(MaximalityError::Internal(format!(
                "stage {} does not separate the tracked pair",
                stage.rule
            )));
        }
    }
    let lf = interpret(&left)?;
    let rg = interpret(&right)?;
    if lf.len() != 1 || rg.len() != 1 {
        return Err(MaximalityError::Internal("replayed graphs are not singletons".into()));
    }
    if !lf.contains((0, 0)) || rg.contains((0, 0)) {
        return Err(MaximalityError::Internal(
            "replayed graphs do not separate at (0,0)".into(),
        ));
    }
    let product_branch = witness.conclusion == Conclusion::ProjectionsCollapse;
    let (fi, f_canon) = canonical_generator(&left, product_branch)?;
    let (gi, g_canon) = canonical_generator(&right, product_branch)?;
    if fi != Index::One
        || gi != Index::Two
        || f_canon != witness.final_pair.0
        || g_canon != witness.final_pair.1
    {
        return Err(MaximalityError::Internal("final pair does not replay".into()));
    }
    Ok(())
}

/// A symbolic derivation: a chain of terms with justifications, read as an
/// equational proof.
#[derive(Debug, Clone, Serialize)]
pub struct Derivation {
    pub lines: Vec<(Term, String)>,
}

impl std::fmt::Display for Derivation {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, (term, why)) in self.lines.iter().enumerate() {
            if i == 0 {
                writeln!(out, "  {term}")?;
            } else {
                writeln!(out, "= {term}    [{why}]")?;
            }
        }
        Ok(())
    }
}

/// Instantiates the witness's conclusion to collapse an arbitrary parallel
/// pair: `h1 = h2` through the pairing (or copairing) of the two.
pub fn preorder_collapse(
    witness: &CollapseWitness,
    h1: &Term,
    h2: &Term,
) -> Result<Derivation, MaximalityError> {
    let ty1 = h1.infer_type()?;
    let ty2 = h2.infer_type()?;
    if ty1 != ty2 {
        return Err(MaximalityError::TypeMismatch {
            left_src: ty1.0,
            left_tgt: ty1.1,
            right_src: ty2.0,
            right_tgt: ty2.1,
        });
    }
    let (src, tgt) = ty1;
    let lines = match witness.conclusion {
        Conclusion::ProjectionsCollapse => {
            let pairing = Term::pair(h1.clone(), h2.clone());
            vec![
                (h1.clone(), String::new()),
                (
                    Term::comp(Term::proj(Index::One, tgt.clone(), tgt.clone()), pairing.clone()),
                    "projection of the pairing".to_string(),
                ),
                (
                    Term::comp(Term::proj(Index::Two, tgt.clone(), tgt.clone()), pairing),
                    "collapse hypothesis k1 = k2 at the target".to_string(),
                ),
                (h2.clone(), "projection of the pairing".to_string()),
            ]
        }
        Conclusion::InjectionsCollapse => {
            let copairing = Term::copair(h1.clone(), h2.clone());
            vec![
                (h1.clone(), String::new()),
                (
                    Term::comp(copairing.clone(), Term::inj(Index::One, src.clone(), src.clone())),
                    "copairing after the injection".to_string(),
                ),
                (
                    Term::comp(copairing, Term::inj(Index::Two, src.clone(), src.clone())),
                    "collapse hypothesis l1 = l2 at the source".to_string(),
                ),
                (h2.clone(), "copairing after the injection".to_string()),
            ]
        }
    };
    Ok(Derivation { lines })
}

/// Checks the shape of a collapse derivation: the outer lines expand and
/// contract soundly, the middle step is exactly the hypothesis instance.
pub fn verify_derivation(derivation: &Derivation) -> Result<(), MaximalityError> {
    if derivation.lines.len() != 4 {
        return Err(MaximalityError::Internal("derivation must have four lines".into()));
    }
    let first = &derivation.lines[0].0;
    let second = &derivation.lines[1].0;
    let third = &derivation.lines[2].0;
    let last = &derivation.lines[3].0;
    // expansion and contraction steps are sound for the interpretation
    if interpret(first)? != interpret(second)? || interpret(third)? != interpret(last)? {
        return Err(MaximalityError::Internal("expansion steps are not sound".into()));
    }
    // the middle step swaps exactly the generator index
    match (second, third) {
        (Term::Comp(p1, t1), Term::Comp(p2, t2)) if t1 == t2 => match (&**p1, &**p2) {
            (
                Term::Proj { index: Index::One, left: a1, right: b1 },
                Term::Proj { index: Index::Two, left: a2, right: b2 },
            ) if a1 == a2 && b1 == b2 => Ok(()),
            _ => Err(MaximalityError::Internal("middle step is not the projection swap".into())),
        },
        (Term::Comp(t1, i1), Term::Comp(t2, i2)) if t1 == t2 => match (&**i1, &**i2) {
            (
                Term::Inj { index: Index::One, left: a1, right: b1 },
                Term::Inj { index: Index::Two, left: a2, right: b2 },
            ) if a1 == a2 && b1 == b2 => Ok(()),
            _ => Err(MaximalityError::Internal("middle step is not the injection swap".into())),
        },
        _ => Err(MaximalityError::Internal("middle step shape mismatch".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_formula, parse_term};

    fn tr(text: &str) -> Term {
        parse_term(text).unwrap()
    }

    fn fm(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    #[test]
    fn substitution_collapses_letters() {
        assert_eq!(substitute_all_letters(&tr("k1{q,r}")), tr("k1{p,p}"));
        assert_eq!(substitute_all_letters(&tr("1{p}")), tr("1{p}"));
        let t = tr("<K1{q}(1{p}),K2{p}(1{q})>");
        let s = substitute_all_letters(&t);
        assert_eq!(s, tr("<K1{p}(1{p}),K2{p}(1{p})>"));
        // the interpretation is unchanged as a pair set
        assert_eq!(interpret(&t).unwrap(), interpret(&s).unwrap());
    }

    #[test]
    fn injection_context_shapes() {
        let a = fm("(p+q)*p");
        let ctx = injection_context(&a, &[Side::Left], Index::One).unwrap();
        assert_eq!(ctx, tr("(l1{p,q}*1{p})"));
        assert_eq!(
            ctx.infer_type().unwrap(),
            (fm("p*p"), fm("(p+q)*p"))
        );
        let b = fm("p+q");
        assert_eq!(injection_context(&b, &[], Index::Two).unwrap(), tr("l2{p,q}"));
        assert!(injection_context(&fm("p*p"), &[], Index::One).is_err());
        assert!(injection_context(&fm("p*p"), &[Side::Left], Index::One).is_err());
    }

    #[test]
    fn fans_have_cone_graphs() {
        assert_eq!(fan_out(1, &fm("p")).unwrap(), tr("1{p}"));
        let w = fan_out(2, &fm("p*p")).unwrap();
        assert_eq!(w, tr("w{p}"));
        assert_eq!(interpret(&w).unwrap(), Relation::new(1, 2, [(0, 0), (0, 1)]));
        let f3 = fan_out(3, &fm("(p*p)*p")).unwrap();
        assert_eq!(
            interpret(&f3).unwrap(),
            Relation::new(1, 3, [(0, 0), (0, 1), (0, 2)])
        );
        assert_eq!(fan_in(1, &fm("p")).unwrap(), tr("1{p}"));
        assert_eq!(fan_in(2, &fm("p+p")).unwrap(), tr("m{p}"));
        let g3 = fan_in(3, &fm("p+(p+p)")).unwrap();
        assert_eq!(
            interpret(&g3).unwrap(),
            Relation::new(3, 1, [(0, 0), (1, 0), (2, 0)])
        );
        assert!(fan_out(2, &fm("p*q")).is_err());
        assert!(fan_out(2, &fm("p+p")).is_err());
    }

    #[test]
    fn witness_for_the_projections_is_trivial() {
        let w = collapse_witness(&tr("k1{p,p}"), &tr("k2{p,p}")).unwrap();
        assert!(w.stages.is_empty());
        assert!(!w.swapped);
        assert_eq!(w.conclusion, Conclusion::ProjectionsCollapse);
        assert_eq!(w.final_pair, (tr("k1{p,p}"), tr("k2{p,p}")));
        verify_witness(&w, &tr("k1{p,p}"), &tr("k2{p,p}")).unwrap();
    }

    #[test]
    fn witness_for_the_twist() {
        let f = tr("1{p*p}");
        let g = tr("<K2{p}(1{p}),K1{p}(1{p})>");
        let w = collapse_witness(&f, &g).unwrap();
        assert_eq!(w.stages.len(), 1);
        assert_eq!(w.stages[0].rule, "prod-elim-k1");
        assert_eq!(w.stages[0].context, tr("k1{p,p}"));
        assert_eq!(w.conclusion, Conclusion::ProjectionsCollapse);
        assert_eq!(w.final_pair, (tr("k1{p,p}"), tr("k2{p,p}")));
        verify_witness(&w, &f, &g).unwrap();
    }

    #[test]
    fn witness_for_the_injections() {
        let w = collapse_witness(&tr("l1{p,p}"), &tr("l2{p,p}")).unwrap();
        assert!(w.stages.is_empty());
        assert_eq!(w.conclusion, Conclusion::InjectionsCollapse);
        assert_eq!(w.final_pair, (tr("l1{p,p}"), tr("l2{p,p}")));
        verify_witness(&w, &tr("l1{p,p}"), &tr("l2{p,p}")).unwrap();
    }

    #[test]
    fn witness_swaps_roles_when_needed() {
        // the least differing pair lies in the second graph
        let w = collapse_witness(&tr("k2{p,p}"), &tr("k1{p,p}")).unwrap();
        assert!(w.swapped);
        verify_witness(&w, &tr("k2{p,p}"), &tr("k1{p,p}")).unwrap();
    }

    #[test]
    fn witness_across_letters_substitutes() {
        let w = collapse_witness(&tr("k1{q,r}"), &tr("k2{q,r}"));
        // k1{q,r} and k2{q,r} have different types (q vs r targets)
        assert!(matches!(w, Err(MaximalityError::TypeMismatch { .. })));
        let w = collapse_witness(&tr("k1{q,q}"), &tr("k2{q,q}")).unwrap();
        assert_eq!(w.substitution.get("q"), Some(&"p".to_string()));
        verify_witness(&w, &tr("k1{q,q}"), &tr("k2{q,q}")).unwrap();
    }

    #[test]
    fn equal_graphs_are_rejected() {
        let err = collapse_witness(&tr("1{p}"), &tr("1{p}")).unwrap_err();
        assert!(matches!(err, MaximalityError::GraphsEqual));
        // distinct terms whose substitution instances have equal graphs
        let err = collapse_witness(&tr("k1{p,q}"), &tr("k1{p,q}")).unwrap_err();
        assert!(matches!(err, MaximalityError::GraphsEqual));
    }

    #[test]
    fn fragment_gate() {
        let err = collapse_witness(&tr("k{p}"), &tr("k{p}")).unwrap_err();
        assert!(matches!(err, MaximalityError::OutsideProductsSums { .. }));
    }

    #[test]
    fn witness_with_sum_elimination() {
        // copairing of the two injections vs the twisted copairing, on p+p
        let f = tr("[l1{p,p},l2{p,p}]");
        let g = tr("[l2{p,p},l1{p,p}]");
        let w = collapse_witness(&f, &g).unwrap();
        assert_eq!(w.conclusion, Conclusion::InjectionsCollapse);
        verify_witness(&w, &f, &g).unwrap();
        assert!(w.stages.iter().any(|s| s.rule.starts_with("sum-elim")));
    }

    #[test]
    fn witness_with_shuffles() {
        // distinguish occurrence 1 of the source: K2 against K2-of-other
        let f = tr("K2{p}(K1{p}(1{p}))");
        let g = tr("K2{p}(K2{p}(1{p}))");
        // types: p*(p*p) -> p
        let w = collapse_witness(&f, &g).unwrap();
        assert_eq!(w.conclusion, Conclusion::ProjectionsCollapse);
        verify_witness(&w, &f, &g).unwrap();
        assert!(w.stages.iter().any(|s| s.rule == "source-shuffle"));
    }

    #[test]
    fn collapse_derivations() {
        let w = collapse_witness(&tr("k1{p,p}"), &tr("k2{p,p}")).unwrap();
        let d = preorder_collapse(&w, &tr("1{p}"), &tr("1{p}")).unwrap();
        assert_eq!(d.lines.len(), 4);
        assert_eq!(d.lines[0].0, tr("1{p}"));
        assert_eq!(d.lines[3].0, tr("1{p}"));
        verify_derivation(&d).unwrap();
        // self-application: derive the collapse of the projections themselves
        let d = preorder_collapse(&w, &tr("k1{p,p}"), &tr("k2{p,p}")).unwrap();
        verify_derivation(&d).unwrap();
        // the injection flavor
        let w = collapse_witness(&tr("l1{p,p}"), &tr("l2{p,p}")).unwrap();
        let d = preorder_collapse(&w, &tr("l1{p,p}"), &tr("l2{p,p}")).unwrap();
        verify_derivation(&d).unwrap();
        // type mismatch is refused
        assert!(preorder_collapse(&w, &tr("1{p}"), &tr("1{p*p}")).is_err());
    }
}
