//! Seeded random generators for well-typed formulas, terms, and equation
//! instances, shared by the property and acceptance suites.

use rand::prelude::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::formula::Formula;
use crate::fragment::{ConnectiveUse, Fragment};
use crate::oracle::enumerate_terms;
use crate::term::{Index, Term};

pub type GenRng = ChaCha8Rng;

/// Random formula sampler over a fixed letter pool.
#[derive(Debug, Clone)]
pub struct FormulaGen {
    pub letters: Vec<String>,
    pub allow_terminal: bool,
    pub allow_initial: bool,
    pub allow_prod: bool,
    pub allow_sum: bool,
    pub max_leaves: usize,
}

impl FormulaGen {
    pub fn products_and_sums(letters: &[&str], max_leaves: usize) -> FormulaGen {
        FormulaGen {
            letters: letters.iter().map(|s| s.to_string()).collect(),
            allow_terminal: false,
            allow_initial: false,
            allow_prod: true,
            allow_sum: true,
            max_leaves,
        }
    }

    pub fn with_constants(letters: &[&str], max_leaves: usize) -> FormulaGen {
        FormulaGen {
            allow_terminal: true,
            allow_initial: true,
            ..FormulaGen::products_and_sums(letters, max_leaves)
        }
    }

    pub fn sample(&self, rng: &mut GenRng) -> Formula {
        let leaves = rng.random_range(1..=self.max_leaves.max(1));
        self.sample_with_leaves(rng, leaves)
    }

    fn sample_with_leaves(&self, rng: &mut GenRng, leaves: usize) -> Formula {
        if leaves <= 1 {
            let mut choices: Vec<fn(&FormulaGen, &mut GenRng) -> Formula> =
                vec![|g, rng| Formula::Letter(g.letters.choose(rng).unwrap().clone())];
            if self.allow_terminal {
                choices.push(|_, _| Formula::Terminal);
            }
            if self.allow_initial {
                choices.push(|_, _| Formula::Initial);
            }
            let pick = rng.random_range(0..choices.len());
            return choices[pick](self, rng);
        }
        let left = rng.random_range(1..leaves);
        let a = self.sample_with_leaves(rng, left);
        let b = self.sample_with_leaves(rng, leaves - left);
        match (self.allow_prod, self.allow_sum) {
            (true, true) => {
                if rng.random_bool(0.5) {
                    Formula::prod(a, b)
                } else {
                    Formula::sum(a, b)
                }
            }
            (true, false) => Formula::prod(a, b),
            (false, true) => Formula::sum(a, b),
            (false, false) => a,
        }
    }
}

/// Which calculus the generated terms draw their formers from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenStyle {
    Combinator,
    Bifunctorial,
}

/// Random well-typed term sampler, source-directed: every constructor
/// choice keeps the source formula fixed, so arbitrary fragments can be
/// sampled without backtracking.
#[derive(Debug, Clone)]
pub struct TermGen {
    pub style: GenStyle,
    pub fragment: Fragment,
    pub formulas: FormulaGen,
    pub allow_composition: bool,
    pub size_budget: usize,
}

impl TermGen {
    /// Combinator-style terms over products, sums, and no constants.
    pub fn products_sums_combinator(letters: &[&str], size_budget: usize) -> TermGen {
        TermGen {
            style: GenStyle::Combinator,
            fragment: crate::fragment::parse_fragment("x,+").unwrap(),
            formulas: FormulaGen::products_and_sums(letters, 3),
            allow_composition: true,
            size_budget,
        }
    }

    /// Combinator-style terms of the cartesian calculus extended with
    /// bifunctorial sums.
    pub fn cartesian_bifunctor_sums(letters: &[&str], size_budget: usize) -> TermGen {
        let mut formulas = FormulaGen::products_and_sums(letters, 3);
        formulas.allow_terminal = true;
        TermGen {
            style: GenStyle::Combinator,
            fragment: crate::fragment::parse_fragment("x,I,+b").unwrap(),
            formulas,
            allow_composition: true,
            size_budget,
        }
    }

    /// Full-signature generator for either calculus.
    pub fn full(style: GenStyle, letters: &[&str], size_budget: usize) -> TermGen {
        TermGen {
            style,
            fragment: Fragment {
                has_terminal: true,
                has_initial: true,
                product: ConnectiveUse::Full,
                sum: ConnectiveUse::Full,
            },
            formulas: FormulaGen::with_constants(letters, 3),
            allow_composition: true,
            size_budget,
        }
    }

    pub fn sample(&self, rng: &mut GenRng) -> Term {
        let src = self.formulas.sample(rng);
        self.sample_with_source(rng, &src)
    }

    /// A random well-typed term whose source is `src`.
    pub fn sample_with_source(&self, rng: &mut GenRng, src: &Formula) -> Term {
        self.gen_from(rng, src, self.size_budget)
    }

    fn gen_from(&self, rng: &mut GenRng, src: &Formula, budget: usize) -> Term {
        if budget == 0 {
            return Term::Id(src.clone());
        }
        // candidate constructors at this source, as closures
        let mut arms: Vec<Box<dyn Fn(&mut GenRng) -> Term>> = Vec::new();
        arms.push(Box::new({
            let src = src.clone();
            move |_rng: &mut GenRng| Term::Id(src.clone())
        }));
        if self.fragment.has_terminal {
            let src_c = src.clone();
            arms.push(Box::new(move |_| Term::Kappa(src_c.clone())));
        }
        if self.fragment.has_initial && *src == Formula::Initial {
            let this = self.clone();
            arms.push(Box::new(move |rng| {
                let tgt = this.formulas.sample(rng);
                Term::Lambda(tgt)
            }));
        }
        if self.allow_composition && budget >= 2 {
            let this = self.clone();
            let src_c = src.clone();
            arms.push(Box::new(move |rng| {
                let inner = this.gen_from(rng, &src_c, budget / 2);
                let mid = inner.infer_type().expect("generated terms type-check").1;
                let outer = this.gen_from(rng, &mid, budget - 1 - budget / 2);
                Term::comp(outer, inner)
            }));
        }
        match self.style {
            GenStyle::Combinator => self.combinator_arms(src, budget, &mut arms),
            GenStyle::Bifunctorial => self.bifunctorial_arms(src, budget, &mut arms),
        }
        let pick = rng.random_range(0..arms.len());
        arms[pick](rng)
    }

    fn combinator_arms(
        &self,
        src: &Formula,
        budget: usize,
        arms: &mut Vec<Box<dyn Fn(&mut GenRng) -> Term>>,
    ) {
        if self.fragment.product == ConnectiveUse::Full {
            if let Formula::Prod(a, b) = src {
                let (a, b, this) = ((**a).clone(), (**b).clone(), self.clone());
                arms.push(Box::new(move |rng| {
                    if rng.random_bool(0.5) {
                        Term::proj_arg(Index::One, b.clone(), this.gen_from(rng, &a, budget - 1))
                    } else {
                        Term::proj_arg(Index::Two, a.clone(), this.gen_from(rng, &b, budget - 1))
                    }
                }));
            }
            if budget >= 2 {
                let (src_c, this) = (src.clone(), self.clone());
                arms.push(Box::new(move |rng| {
                    Term::pair(
                        this.gen_from(rng, &src_c, budget / 2),
                        this.gen_from(rng, &src_c, budget - budget / 2),
                    )
                }));
            }
        }
        if self.fragment.sum == ConnectiveUse::Full {
            let (src_c, this) = (src.clone(), self.clone());
            arms.push(Box::new(move |rng| {
                let inner = this.gen_from(rng, &src_c, budget - 1);
                let side = this.formulas.sample(rng);
                if rng.random_bool(0.5) {
                    Term::inj_arg(Index::One, side, inner)
                } else {
                    Term::inj_arg(Index::Two, side, inner)
                }
            }));
            if let Formula::Sum(a, b) = src {
                if budget >= 2 {
                    let (a, b, src_c, this) =
                        ((**a).clone(), (**b).clone(), src.clone(), self.clone());
                    arms.push(Box::new(move |rng| {
                        let f = this.gen_from(rng, &a, budget / 2);
                        let tgt = f.infer_type().expect("generated terms type-check").1;
                        // the other branch must share the target
                        if let Some(g) = this.sample_into(rng, &b, &tgt, budget - budget / 2) {
                            Term::copair(f, g)
                        } else if a == b {
                            Term::copair(f.clone(), f)
                        } else {
                            Term::Id(src_c.clone())
                        }
                    }));
                }
            }
        }
        if self.fragment.sum == ConnectiveUse::BifunctorOnly {
            if let Formula::Sum(a, b) = src {
                if budget >= 2 {
                    let (a, b, this) = ((**a).clone(), (**b).clone(), self.clone());
                    arms.push(Box::new(move |rng| {
                        Term::tensor_sum(
                            this.gen_from(rng, &a, budget / 2),
                            this.gen_from(rng, &b, budget - budget / 2),
                        )
                    }));
                }
            }
        }
        if self.fragment.product == ConnectiveUse::BifunctorOnly {
            if let Formula::Prod(a, b) = src {
                if budget >= 2 {
                    let (a, b, this) = ((**a).clone(), (**b).clone(), self.clone());
                    arms.push(Box::new(move |rng| {
                        Term::tensor_prod(
                            this.gen_from(rng, &a, budget / 2),
                            this.gen_from(rng, &b, budget - budget / 2),
                        )
                    }));
                }
            }
        }
    }

    fn bifunctorial_arms(
        &self,
        src: &Formula,
        budget: usize,
        arms: &mut Vec<Box<dyn Fn(&mut GenRng) -> Term>>,
    ) {
        if self.fragment.product >= ConnectiveUse::BifunctorOnly {
            if let Formula::Prod(a, b) = src {
                if budget >= 2 {
                    let (a, b, this) = ((**a).clone(), (**b).clone(), self.clone());
                    arms.push(Box::new(move |rng| {
                        Term::tensor_prod(
                            this.gen_from(rng, &a, budget / 2),
                            this.gen_from(rng, &b, budget - budget / 2),
                        )
                    }));
                }
            }
        }
        if self.fragment.product == ConnectiveUse::Full {
            if let Formula::Prod(a, b) = src {
                let (a, b) = ((**a).clone(), (**b).clone());
                arms.push(Box::new(move |rng| {
                    let index = if rng.random_bool(0.5) { Index::One } else { Index::Two };
                    Term::proj(index, a.clone(), b.clone())
                }));
            }
            let src_c = src.clone();
            arms.push(Box::new(move |_| Term::Diag(src_c.clone())));
        }
        if self.fragment.sum >= ConnectiveUse::BifunctorOnly {
            if let Formula::Sum(a, b) = src {
                if budget >= 2 {
                    let (a, b, this) = ((**a).clone(), (**b).clone(), self.clone());
                    arms.push(Box::new(move |rng| {
                        Term::tensor_sum(
                            this.gen_from(rng, &a, budget / 2),
                            this.gen_from(rng, &b, budget - budget / 2),
                        )
                    }));
                }
            }
        }
        if self.fragment.sum == ConnectiveUse::Full {
            let (src_c, this) = (src.clone(), self.clone());
            arms.push(Box::new(move |rng| {
                let side = this.formulas.sample(rng);
                if rng.random_bool(0.5) {
                    Term::inj(Index::One, src_c.clone(), side)
                } else {
                    Term::inj(Index::Two, side, src_c.clone())
                }
            }));
            if let Formula::Sum(a, b) = src {
                if a == b {
                    let a = (**a).clone();
                    arms.push(Box::new(move |_| Term::Codiag(a.clone())));
                }
            }
        }
    }

    /// A random term from `src` to `tgt`, sampled from the bounded
    /// enumeration of the generator's fragment.
    pub fn sample_into(
        &self,
        rng: &mut GenRng,
        src: &Formula,
        tgt: &Formula,
        size_bound: usize,
    ) -> Option<Term> {
        let candidates = enumerate_terms(src, tgt, size_bound.clamp(1, 3), &self.fragment);
        candidates.choose(rng).cloned()
    }
}

/// A named equation schema with a randomized instantiator producing a
/// well-typed `(lhs, rhs)` pair.
pub struct LawGen {
    pub name: &'static str,
    pub instantiate: fn(&mut GenRng, &TermGen) -> (Term, Term),
}

fn tgt_of(t: &Term) -> Formula {
    t.infer_type().expect("generated terms type-check").1
}

fn src_of(t: &Term) -> Formula {
    t.infer_type().expect("generated terms type-check").0
}

fn rand_index(rng: &mut GenRng) -> Index {
    if rng.random_bool(0.5) {
        Index::One
    } else {
        Index::Two
    }
}

fn law_cat1(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let f = gen.sample(rng);
    if rng.random_bool(0.5) {
        (Term::comp(Term::Id(tgt_of(&f)), f.clone()), f)
    } else {
        (Term::comp(f.clone(), Term::Id(src_of(&f))), f)
    }
}

fn law_cat2(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let f = gen.sample(rng);
    let g = gen.sample_with_source(rng, &tgt_of(&f));
    let h = gen.sample_with_source(rng, &tgt_of(&g));
    (
        Term::comp(h.clone(), Term::comp(g.clone(), f.clone())),
        Term::comp(Term::comp(h, g), f),
    )
}

fn law_k1(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let inner = gen.sample(rng);
    let side = gen.formulas.sample(rng);
    let g = gen.sample_with_source(rng, &tgt_of(&inner));
    let index = rand_index(rng);
    (
        Term::comp(g.clone(), Term::proj_arg(index, side.clone(), inner.clone())),
        Term::proj_arg(index, side, Term::comp(g, inner)),
    )
}

fn law_k2(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let f1 = gen.sample(rng);
    let f2 = gen.sample_with_source(rng, &src_of(&f1));
    let index = rand_index(rng);
    let (picked, side) = match index {
        Index::One => (&f1, tgt_of(&f2)),
        Index::Two => (&f2, tgt_of(&f1)),
    };
    let g = gen.sample_with_source(rng, &tgt_of(picked));
    (
        Term::comp(
            Term::proj_arg(index, side, g.clone()),
            Term::pair(f1.clone(), f2.clone()),
        ),
        Term::comp(g, picked.clone()),
    )
}

fn law_k3(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let f = gen.sample(rng);
    let g1 = gen.sample_with_source(rng, &tgt_of(&f));
    let g2 = gen.sample_with_source(rng, &tgt_of(&f));
    (
        Term::comp(Term::pair(g1.clone(), g2.clone()), f.clone()),
        Term::pair(Term::comp(g1, f.clone()), Term::comp(g2, f)),
    )
}

fn law_k4(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let a = gen.formulas.sample(rng);
    let b = gen.formulas.sample(rng);
    (
        Term::pair(
            Term::proj_arg(Index::One, b.clone(), Term::Id(a.clone())),
            Term::proj_arg(Index::Two, a.clone(), Term::Id(b.clone())),
        ),
        Term::Id(Formula::prod(a, b)),
    )
}

fn law_l1(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let f = gen.sample(rng);
    let g = gen.sample_with_source(rng, &tgt_of(&f));
    let side = gen.formulas.sample(rng);
    let index = rand_index(rng);
    (
        Term::comp(Term::inj_arg(index, side.clone(), g.clone()), f.clone()),
        Term::inj_arg(index, side, Term::comp(g, f)),
    )
}

/// A random arrow into `tgt` from some random source, falling back on the
/// enumeration of the fragment; `None` when nothing small enough exists.
fn sample_term_into(rng: &mut GenRng, gen: &TermGen, tgt: &Formula) -> Option<(Formula, Term)> {
    for _ in 0..4 {
        let src = gen.formulas.sample(rng);
        if let Some(t) = gen.sample_into(rng, &src, tgt, 3) {
            return Some((src, t));
        }
    }
    None
}

fn law_l2(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let f = gen.sample(rng);
    let x = tgt_of(&f);
    let picked = gen.sample_with_source(rng, &x);
    let d = tgt_of(&picked);
    // the other copair branch needs the same target; fall back to
    // duplicating the picked branch when the enumeration is empty
    let (other_src, other) =
        sample_term_into(rng, gen, &d).unwrap_or_else(|| (x.clone(), picked.clone()));
    match rand_index(rng) {
        Index::One => (
            Term::comp(
                Term::copair(picked.clone(), other),
                Term::inj_arg(Index::One, other_src, f.clone()),
            ),
            Term::comp(picked, f),
        ),
        Index::Two => (
            Term::comp(
                Term::copair(other, picked.clone()),
                Term::inj_arg(Index::Two, other_src, f.clone()),
            ),
            Term::comp(picked, f),
        ),
    }
}

fn law_l3(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let f1 = gen.sample(rng);
    let tgt = tgt_of(&f1);
    let f2 = match sample_term_into(rng, gen, &tgt) {
        Some((_, t)) => t,
        None => f1.clone(),
    };
    let g = gen.sample_with_source(rng, &tgt);
    (
        Term::comp(g.clone(), Term::copair(f1.clone(), f2.clone())),
        Term::copair(Term::comp(g.clone(), f1), Term::comp(g, f2)),
    )
}

fn law_l4(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let a = gen.formulas.sample(rng);
    let b = gen.formulas.sample(rng);
    (
        Term::copair(
            Term::inj_arg(Index::One, b.clone(), Term::Id(a.clone())),
            Term::inj_arg(Index::Two, a.clone(), Term::Id(b.clone())),
        ),
        Term::Id(Formula::sum(a, b)),
    )
}

fn law_terminal(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let t = gen.sample(rng);
    let f = Term::comp(Term::Kappa(tgt_of(&t)), t);
    let src = src_of(&f);
    (f, Term::Kappa(src))
}

fn law_initial(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let t = gen.sample_with_source(rng, &Formula::Initial);
    let g = gen.sample_with_source(rng, &tgt_of(&t));
    let f = Term::comp(g, t);
    let tgt = tgt_of(&f);
    (f, Term::Lambda(tgt))
}

fn law_prod1(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let a = gen.formulas.sample(rng);
    let b = gen.formulas.sample(rng);
    (
        Term::tensor_prod(Term::Id(a.clone()), Term::Id(b.clone())),
        Term::Id(Formula::prod(a, b)),
    )
}

fn law_prod2(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let g2 = gen.sample(rng);
    let g1 = gen.sample_with_source(rng, &tgt_of(&g2));
    let f2 = gen.sample(rng);
    let f1 = gen.sample_with_source(rng, &tgt_of(&f2));
    (
        Term::tensor_prod(Term::comp(g1.clone(), g2.clone()), Term::comp(f1.clone(), f2.clone())),
        Term::comp(Term::tensor_prod(g1, f1), Term::tensor_prod(g2, f2)),
    )
}

fn law_sum2(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let (lhs, rhs) = law_prod2(rng, gen);
    let swap = |t: Term| match t {
        Term::TensorProd(a, b) => Term::tensor_sum(*a, *b),
        Term::Comp(g, f) => Term::comp(
            match *g {
                Term::TensorProd(a, b) => Term::tensor_sum(*a, *b),
                other => other,
            },
            match *f {
                Term::TensorProd(a, b) => Term::tensor_sum(*a, *b),
                other => other,
            },
        ),
        other => other,
    };
    (swap(lhs), swap(rhs))
}

fn law_sum1(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let a = gen.formulas.sample(rng);
    let b = gen.formulas.sample(rng);
    (
        Term::tensor_sum(Term::Id(a.clone()), Term::Id(b.clone())),
        Term::Id(Formula::sum(a, b)),
    )
}

fn law_proj_natural(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let f1 = gen.sample(rng);
    let f2 = gen.sample(rng);
    let index = rand_index(rng);
    let picked = match index {
        Index::One => f1.clone(),
        Index::Two => f2.clone(),
    };
    (
        Term::comp(
            Term::proj(index, tgt_of(&f1), tgt_of(&f2)),
            Term::tensor_prod(f1.clone(), f2.clone()),
        ),
        Term::comp(picked.clone(), Term::proj(index, src_of(&f1), src_of(&f2))),
    )
}

fn law_diag_natural(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let f = gen.sample(rng);
    (
        Term::comp(Term::Diag(tgt_of(&f)), f.clone()),
        Term::comp(Term::tensor_prod(f.clone(), f.clone()), Term::Diag(src_of(&f))),
    )
}

fn law_diag_proj(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let a = gen.formulas.sample(rng);
    let index = rand_index(rng);
    (
        Term::comp(Term::proj(index, a.clone(), a.clone()), Term::Diag(a.clone())),
        Term::Id(a),
    )
}

fn law_diag_proj_pairwise(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let a = gen.formulas.sample(rng);
    let b = gen.formulas.sample(rng);
    let ab = Formula::prod(a.clone(), b.clone());
    (
        Term::comp(
            Term::tensor_prod(
                Term::proj(Index::One, a.clone(), b.clone()),
                Term::proj(Index::Two, a, b),
            ),
            Term::Diag(ab.clone()),
        ),
        Term::Id(ab),
    )
}

fn law_inj_natural(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let f1 = gen.sample(rng);
    let f2 = gen.sample(rng);
    let index = rand_index(rng);
    let picked = match index {
        Index::One => f1.clone(),
        Index::Two => f2.clone(),
    };
    (
        Term::comp(
            Term::tensor_sum(f1.clone(), f2.clone()),
            Term::inj(index, src_of(&f1), src_of(&f2)),
        ),
        Term::comp(Term::inj(index, tgt_of(&f1), tgt_of(&f2)), picked),
    )
}

fn law_codiag_natural(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let f = gen.sample(rng);
    (
        Term::comp(f.clone(), Term::Codiag(src_of(&f))),
        Term::comp(Term::Codiag(tgt_of(&f)), Term::tensor_sum(f.clone(), f)),
    )
}

fn law_codiag_inj(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let a = gen.formulas.sample(rng);
    let index = rand_index(rng);
    (
        Term::comp(Term::Codiag(a.clone()), Term::inj(index, a.clone(), a.clone())),
        Term::Id(a),
    )
}

fn law_codiag_inj_pairwise(rng: &mut GenRng, gen: &TermGen) -> (Term, Term) {
    let a = gen.formulas.sample(rng);
    let b = gen.formulas.sample(rng);
    let ab = Formula::sum(a.clone(), b.clone());
    (
        Term::comp(
            Term::Codiag(ab.clone()),
            Term::tensor_sum(
                Term::inj(Index::One, a.clone(), b.clone()),
                Term::inj(Index::Two, a, b),
            ),
        ),
        Term::Id(ab),
    )
}

/// The equation schemas of the combinator calculus; instantiated over the
/// full signature.
pub fn combinator_laws() -> Vec<LawGen> {
    vec![
        LawGen { name: "cat1", instantiate: law_cat1 },
        LawGen { name: "cat2", instantiate: law_cat2 },
        LawGen { name: "K1", instantiate: law_k1 },
        LawGen { name: "K2", instantiate: law_k2 },
        LawGen { name: "K3", instantiate: law_k3 },
        LawGen { name: "K4", instantiate: law_k4 },
        LawGen { name: "L1", instantiate: law_l1 },
        LawGen { name: "L2", instantiate: law_l2 },
        LawGen { name: "L3", instantiate: law_l3 },
        LawGen { name: "L4", instantiate: law_l4 },
        LawGen { name: "k", instantiate: law_terminal },
        LawGen { name: "l", instantiate: law_initial },
    ]
}

/// The equation schemas of the bifunctorial calculus.
pub fn bifunctorial_laws() -> Vec<LawGen> {
    vec![
        LawGen { name: "cat1", instantiate: law_cat1 },
        LawGen { name: "cat2", instantiate: law_cat2 },
        LawGen { name: "x1", instantiate: law_prod1 },
        LawGen { name: "x2", instantiate: law_prod2 },
        LawGen { name: "ki", instantiate: law_proj_natural },
        LawGen { name: "w", instantiate: law_diag_natural },
        LawGen { name: "kw1", instantiate: law_diag_proj },
        LawGen { name: "kw2", instantiate: law_diag_proj_pairwise },
        LawGen { name: "+1", instantiate: law_sum1 },
        LawGen { name: "+2", instantiate: law_sum2 },
        LawGen { name: "li", instantiate: law_inj_natural },
        LawGen { name: "m", instantiate: law_codiag_natural },
        LawGen { name: "lm1", instantiate: law_codiag_inj },
        LawGen { name: "lm2", instantiate: law_codiag_inj_pairwise },
        LawGen { name: "k", instantiate: law_terminal },
        LawGen { name: "l", instantiate: law_initial },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::interpret;
    use rand::SeedableRng;

    #[test]
    fn generated_terms_type_check() {
        let mut rng = GenRng::seed_from_u64(7);
        let gen = TermGen::full(GenStyle::Combinator, &["p", "q"], 8);
        for _ in 0..500 {
            let t = gen.sample(&mut rng);
            assert!(t.infer_type().is_ok(), "ill-typed: {t}");
            assert!(t.is_combinator_style());
        }
        let gen = TermGen::full(GenStyle::Bifunctorial, &["p", "q"], 8);
        for _ in 0..500 {
            let t = gen.sample(&mut rng);
            assert!(t.infer_type().is_ok(), "ill-typed: {t}");
            assert!(t.is_bifunctorial_style());
        }
    }

    #[test]
    fn cartesian_generator_stays_in_signature() {
        let mut rng = GenRng::seed_from_u64(11);
        let gen = TermGen::cartesian_bifunctor_sums(&["p", "q"], 10);
        for _ in 0..300 {
            let t = gen.sample(&mut rng);
            let fr = crate::fragment::fragment_of([&t]);
            assert!(
                fr.subsumed_by(&gen.fragment),
                "{t} escapes the fragment: {fr}"
            );
        }
    }

    #[test]
    fn law_instances_are_well_typed_and_sound() {
        let mut rng = GenRng::seed_from_u64(23);
        let comb = TermGen::full(GenStyle::Combinator, &["p", "q"], 5);
        for law in combinator_laws() {
            for _ in 0..50 {
                let (lhs, rhs) = (law.instantiate)(&mut rng, &comb);
                assert_eq!(
                    lhs.infer_type().unwrap(),
                    rhs.infer_type().unwrap(),
                    "{}: {lhs} vs {rhs}",
                    law.name
                );
                assert_eq!(
                    interpret(&lhs).unwrap(),
                    interpret(&rhs).unwrap(),
                    "{}: {lhs} vs {rhs}",
                    law.name
                );
            }
        }
        let bif = TermGen::full(GenStyle::Bifunctorial, &["p", "q"], 5);
        for law in bifunctorial_laws() {
            for _ in 0..50 {
                let (lhs, rhs) = (law.instantiate)(&mut rng, &bif);
                assert_eq!(
                    lhs.infer_type().unwrap(),
                    rhs.infer_type().unwrap(),
                    "{}: {lhs} vs {rhs}",
                    law.name
                );
                assert_eq!(
                    interpret(&lhs).unwrap(),
                    interpret(&rhs).unwrap(),
                    "{}: {lhs} vs {rhs}",
                    law.name
                );
            }
        }
    }
}
