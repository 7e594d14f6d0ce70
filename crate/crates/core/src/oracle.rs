//! Independent brute-force oracle: exhaustive enumeration of small
//! composition-free terms and a bounded equational closure of the axioms,
//! used to cross-check the graphical decision procedure at desk scale.
//!
//! The closure is backed by an e-graph: applying every axiom in both
//! finitary directions at every subterm position, with congruence doing
//! the context propagation. Every e-class carries its type and its
//! interpretation, so each merge is checked for soundness as it happens.

use std::collections::{BTreeSet, HashMap};
use std::time::Duration;

use egg::{
    define_language, rewrite, Analysis, Applier, DidMerge, EGraph, Id, Pattern, PatternAst,
    Rewrite, Runner, SimpleScheduler, StopReason, Subst, Symbol, Var,
};
use serde::Serialize;

use crate::formula::Formula;
use crate::fragment::{ConnectiveUse, Fragment};
use crate::graph::{interpret, rel_compose, rel_identity, rel_juxtapose, Relation};
use crate::term::{Index, Term, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    IllTyped(#[from] TypeError),
}

/// Enumerates every well-typed composition-free term of the fragment from
/// `src` to `tgt` with at most `size_bound` atomic subterms, in a fixed
/// deterministic order.
pub fn enumerate_terms(
    src: &Formula,
    tgt: &Formula,
    size_bound: usize,
    fragment: &Fragment,
) -> Vec<Term> {
    let mut memo = HashMap::new();
    enum_memo(src, tgt, size_bound, fragment, &mut memo).iter().cloned().collect()
}

type EnumMemo = HashMap<(Formula, Formula, usize), BTreeSet<Term>>;

fn enum_memo(
    src: &Formula,
    tgt: &Formula,
    budget: usize,
    fragment: &Fragment,
    memo: &mut EnumMemo,
) -> BTreeSet<Term> {
    if budget == 0 {
        return BTreeSet::new();
    }
    let key = (src.clone(), tgt.clone(), budget);
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let mut out = BTreeSet::new();
    if src == tgt {
        out.insert(Term::Id(src.clone()));
    }
    if fragment.has_terminal && *tgt == Formula::Terminal {
        out.insert(Term::Kappa(src.clone()));
    }
    if fragment.has_initial && *src == Formula::Initial {
        out.insert(Term::Lambda(tgt.clone()));
    }
    if fragment.product == ConnectiveUse::Full {
        if let Formula::Prod(a, b) = src {
            for inner in enum_memo(a, tgt, budget, fragment, memo) {
                out.insert(Term::proj_arg(Index::One, (**b).clone(), inner));
            }
            for inner in enum_memo(b, tgt, budget, fragment, memo) {
                out.insert(Term::proj_arg(Index::Two, (**a).clone(), inner));
            }
        }
        if let Formula::Prod(c, d) = tgt {
            for f in enum_memo(src, c, budget - 1, fragment, memo) {
                for g in enum_memo(src, d, budget - f.size(), fragment, memo) {
                    out.insert(Term::pair(f.clone(), g));
                }
            }
        }
    }
    if fragment.sum == ConnectiveUse::Full {
        if let Formula::Sum(c, d) = tgt {
            for inner in enum_memo(src, c, budget, fragment, memo) {
                out.insert(Term::inj_arg(Index::One, (**d).clone(), inner));
            }
            for inner in enum_memo(src, d, budget, fragment, memo) {
                out.insert(Term::inj_arg(Index::Two, (**c).clone(), inner));
            }
        }
        if let Formula::Sum(a, b) = src {
            for f in enum_memo(a, tgt, budget - 1, fragment, memo) {
                for g in enum_memo(b, tgt, budget - f.size(), fragment, memo) {
                    out.insert(Term::copair(f.clone(), g));
                }
            }
        }
    }
    if fragment.product == ConnectiveUse::BifunctorOnly {
        if let (Formula::Prod(a, b), Formula::Prod(c, d)) = (src, tgt) {
            for f in enum_memo(a, c, budget - 1, fragment, memo) {
                for g in enum_memo(b, d, budget - f.size(), fragment, memo) {
                    out.insert(Term::tensor_prod(f.clone(), g));
                }
            }
        }
    }
    if fragment.sum == ConnectiveUse::BifunctorOnly {
        if let (Formula::Sum(a, b), Formula::Sum(c, d)) = (src, tgt) {
            for f in enum_memo(a, c, budget - 1, fragment, memo) {
                for g in enum_memo(b, d, budget - f.size(), fragment, memo) {
                    out.insert(Term::tensor_sum(f.clone(), g));
                }
            }
        }
    }
    memo.insert(key, out.clone());
    out
}

define_language! {
    enum CatLang {
        // formula constructors
        "I" = Terminal,
        "O" = Initial,
        "fprod" = FProd([Id; 2]),
        "fsum" = FSum([Id; 2]),
        // term constructors; comp stores [outer, inner]
        "id" = TermId(Id),
        "kap" = Kap(Id),
        "lam" = Lam(Id),
        "comp" = Comp([Id; 2]),
        "karg1" = KArg1([Id; 2]),
        "karg2" = KArg2([Id; 2]),
        "larg1" = LArg1([Id; 2]),
        "larg2" = LArg2([Id; 2]),
        "pair" = PairT([Id; 2]),
        "copair" = CopairT([Id; 2]),
        "proj1" = Proj1([Id; 2]),
        "proj2" = Proj2([Id; 2]),
        "inj1" = Inj1([Id; 2]),
        "inj2" = Inj2([Id; 2]),
        "diag" = Diag(Id),
        "codiag" = Codiag(Id),
        "prodt" = ProdT([Id; 2]),
        "sumt" = SumT([Id; 2]),
        Letter(Symbol),
    }
}

/// Per-class analysis: formula classes carry their formula, term classes
/// their type and interpretation.
#[derive(Debug, Clone, PartialEq, Eq)]
enum ClassData {
    Fml(Formula),
    Arrow { src: Formula, tgt: Formula, rel: Relation },
}

#[derive(Default)]
struct CatAnalysis {
    /// Merges whose two sides carried different interpretations. Any
    /// nonzero count is a soundness bug in the axiom tables.
    mismatches: usize,
}

type EG = EGraph<CatLang, CatAnalysis>;

fn data_formula(eg: &EG, id: Id) -> Formula {
    match &eg[id].data {
        ClassData::Fml(f) => f.clone(),
        ClassData::Arrow { .. } => panic!("expected a formula class"),
    }
}

fn data_arrow(eg: &EG, id: Id) -> (Formula, Formula, Relation) {
    match &eg[id].data {
        ClassData::Arrow { src, tgt, rel } => (src.clone(), tgt.clone(), rel.clone()),
        ClassData::Fml(_) => panic!("expected a term class"),
    }
}

impl Analysis<CatLang> for CatAnalysis {
    type Data = ClassData;

    fn make(eg: &mut EG, enode: &CatLang, _id: Id) -> ClassData {
        let arrow = |src: Formula, tgt: Formula, rel: Relation| ClassData::Arrow { src, tgt, rel };
        match enode {
            CatLang::Letter(s) => ClassData::Fml(Formula::Letter(s.to_string())),
            CatLang::Terminal => ClassData::Fml(Formula::Terminal),
            CatLang::Initial => ClassData::Fml(Formula::Initial),
            CatLang::FProd([a, b]) => {
                ClassData::Fml(Formula::prod(data_formula(eg, *a), data_formula(eg, *b)))
            }
            CatLang::FSum([a, b]) => {
                ClassData::Fml(Formula::sum(data_formula(eg, *a), data_formula(eg, *b)))
            }
            CatLang::TermId(a) => {
                let f = data_formula(eg, *a);
                let n = f.letter_count();
                arrow(f.clone(), f, rel_identity(n))
            }
            CatLang::Kap(a) => {
                let f = data_formula(eg, *a);
                let n = f.letter_count();
                arrow(f, Formula::Terminal, Relation::empty(n, 0))
            }
            CatLang::Lam(a) => {
                let f = data_formula(eg, *a);
                let n = f.letter_count();
                arrow(Formula::Initial, f, Relation::empty(0, n))
            }
            CatLang::Comp([g, f]) => {
                let (fs, _, fr) = data_arrow(eg, *f);
                let (_, gt, gr) = data_arrow(eg, *g);
                let rel = rel_compose(&gr, &fr).expect("e-graph nodes stay well-typed");
                arrow(fs, gt, rel)
            }
            CatLang::KArg1([s, inner]) => {
                let side = data_formula(eg, *s);
                let (isrc, itgt, irel) = data_arrow(eg, *inner);
                let src = Formula::prod(isrc, side);
                let rel = Relation::new(src.letter_count(), itgt.letter_count(), irel.pairs());
                arrow(src, itgt, rel)
            }
            CatLang::KArg2([s, inner]) => {
                let side = data_formula(eg, *s);
                let (isrc, itgt, irel) = data_arrow(eg, *inner);
                let shift = side.letter_count();
                let src = Formula::prod(side, isrc);
                let rel = Relation::new(
                    src.letter_count(),
                    itgt.letter_count(),
                    irel.pairs().map(|(x, y)| (x + shift, y)),
                );
                arrow(src, itgt, rel)
            }
            CatLang::LArg1([s, inner]) => {
                let side = data_formula(eg, *s);
                let (isrc, itgt, irel) = data_arrow(eg, *inner);
                let tgt = Formula::sum(itgt, side);
                let rel = Relation::new(isrc.letter_count(), tgt.letter_count(), irel.pairs());
                arrow(isrc, tgt, rel)
            }
            CatLang::LArg2([s, inner]) => {
                let side = data_formula(eg, *s);
                let (isrc, itgt, irel) = data_arrow(eg, *inner);
                let shift = side.letter_count();
                let tgt = Formula::sum(side, itgt);
                let rel = Relation::new(
                    isrc.letter_count(),
                    tgt.letter_count(),
                    irel.pairs().map(|(x, y)| (x, y + shift)),
                );
                arrow(isrc, tgt, rel)
            }
            CatLang::PairT([f, g]) => {
                let (fs, ft, fr) = data_arrow(eg, *f);
                let (_, gt, gr) = data_arrow(eg, *g);
                let shift = ft.letter_count();
                let tgt = Formula::prod(ft, gt);
                let pairs: Vec<_> =
                    fr.pairs().chain(gr.pairs().map(|(x, y)| (x, y + shift))).collect();
                let rel = Relation::new(fs.letter_count(), tgt.letter_count(), pairs);
                arrow(fs, tgt, rel)
            }
            CatLang::CopairT([f, g]) => {
                let (fs, ft, fr) = data_arrow(eg, *f);
                let (gs, _, gr) = data_arrow(eg, *g);
                let shift = fs.letter_count();
                let src = Formula::sum(fs, gs);
                let pairs: Vec<_> =
                    fr.pairs().chain(gr.pairs().map(|(x, y)| (x + shift, y))).collect();
                let rel = Relation::new(src.letter_count(), ft.letter_count(), pairs);
                arrow(src, ft, rel)
            }
            CatLang::Proj1([l, r]) => {
                let (fl, fr_) = (data_formula(eg, *l), data_formula(eg, *r));
                let (a, b) = (fl.letter_count(), fr_.letter_count());
                arrow(
                    Formula::prod(fl.clone(), fr_),
                    fl,
                    Relation::new(a + b, a, (0..a).map(|x| (x, x))),
                )
            }
            CatLang::Proj2([l, r]) => {
                let (fl, fr_) = (data_formula(eg, *l), data_formula(eg, *r));
                let (a, b) = (fl.letter_count(), fr_.letter_count());
                arrow(
                    Formula::prod(fl, fr_.clone()),
                    fr_,
                    Relation::new(a + b, b, (0..b).map(|x| (x + a, x))),
                )
            }
            CatLang::Inj1([l, r]) => {
                let (fl, fr_) = (data_formula(eg, *l), data_formula(eg, *r));
                let (a, b) = (fl.letter_count(), fr_.letter_count());
                arrow(
                    fl.clone(),
                    Formula::sum(fl, fr_),
                    Relation::new(a, a + b, (0..a).map(|x| (x, x))),
                )
            }
            CatLang::Inj2([l, r]) => {
                let (fl, fr_) = (data_formula(eg, *l), data_formula(eg, *r));
                let (a, b) = (fl.letter_count(), fr_.letter_count());
                arrow(
                    fr_.clone(),
                    Formula::sum(fl, fr_),
                    Relation::new(b, a + b, (0..b).map(|x| (x, x + a))),
                )
            }
            CatLang::Diag(a) => {
                let f = data_formula(eg, *a);
                let n = f.letter_count();
                arrow(
                    f.clone(),
                    Formula::prod(f.clone(), f),
                    Relation::new(n, 2 * n, (0..n).flat_map(|x| [(x, x), (x, x + n)])),
                )
            }
            CatLang::Codiag(a) => {
                let f = data_formula(eg, *a);
                let n = f.letter_count();
                arrow(
                    Formula::sum(f.clone(), f.clone()),
                    f,
                    Relation::new(2 * n, n, (0..n).flat_map(|x| [(x, x), (x + n, x)])),
                )
            }
            CatLang::ProdT([f, g]) => {
                let (fs, ft, fr) = data_arrow(eg, *f);
                let (gs, gt, gr) = data_arrow(eg, *g);
                arrow(Formula::prod(fs, gs), Formula::prod(ft, gt), rel_juxtapose(&fr, &gr))
            }
            CatLang::SumT([f, g]) => {
                let (fs, ft, fr) = data_arrow(eg, *f);
                let (gs, gt, gr) = data_arrow(eg, *g);
                arrow(Formula::sum(fs, gs), Formula::sum(ft, gt), rel_juxtapose(&fr, &gr))
            }
        }
    }

    fn merge(&mut self, to: &mut ClassData, from: ClassData) -> DidMerge {
        if let (ClassData::Arrow { rel: a, .. }, ClassData::Arrow { rel: b, .. }) = (&*to, &from) {
            if a != b {
                self.mismatches += 1;
            }
        }
        let differs = *to != from;
        DidMerge(false, differs)
    }
}

fn add_formula(eg: &mut EG, f: &Formula) -> Id {
    match f {
        Formula::Letter(name) => eg.add(CatLang::Letter(Symbol::from(name.as_str()))),
        Formula::Terminal => eg.add(CatLang::Terminal),
        Formula::Initial => eg.add(CatLang::Initial),
        Formula::Prod(a, b) => {
            let (x, y) = (add_formula(eg, a), add_formula(eg, b));
            eg.add(CatLang::FProd([x, y]))
        }
        Formula::Sum(a, b) => {
            let (x, y) = (add_formula(eg, a), add_formula(eg, b));
            eg.add(CatLang::FSum([x, y]))
        }
    }
}

fn add_term(eg: &mut EG, t: &Term) -> Id {
    match t {
        Term::Id(a) => {
            let x = add_formula(eg, a);
            eg.add(CatLang::TermId(x))
        }
        Term::Kappa(a) => {
            let x = add_formula(eg, a);
            eg.add(CatLang::Kap(x))
        }
        Term::Lambda(a) => {
            let x = add_formula(eg, a);
            eg.add(CatLang::Lam(x))
        }
        Term::Comp(g, f) => {
            let (x, y) = (add_term(eg, g), add_term(eg, f));
            eg.add(CatLang::Comp([x, y]))
        }
        Term::ProjArg { index, side, inner } => {
            let s = add_formula(eg, side);
            let i = add_term(eg, inner);
            eg.add(match index {
                Index::One => CatLang::KArg1([s, i]),
                Index::Two => CatLang::KArg2([s, i]),
            })
        }
        Term::InjArg { index, side, inner } => {
            let s = add_formula(eg, side);
            let i = add_term(eg, inner);
            eg.add(match index {
                Index::One => CatLang::LArg1([s, i]),
                Index::Two => CatLang::LArg2([s, i]),
            })
        }
        Term::Pair(f, g) => {
            let (x, y) = (add_term(eg, f), add_term(eg, g));
            eg.add(CatLang::PairT([x, y]))
        }
        Term::Copair(f, g) => {
            let (x, y) = (add_term(eg, f), add_term(eg, g));
            eg.add(CatLang::CopairT([x, y]))
        }
        Term::Proj { index, left, right } => {
            let (x, y) = (add_formula(eg, left), add_formula(eg, right));
            eg.add(match index {
                Index::One => CatLang::Proj1([x, y]),
                Index::Two => CatLang::Proj2([x, y]),
            })
        }
        Term::Inj { index, left, right } => {
            let (x, y) = (add_formula(eg, left), add_formula(eg, right));
            eg.add(match index {
                Index::One => CatLang::Inj1([x, y]),
                Index::Two => CatLang::Inj2([x, y]),
            })
        }
        Term::Diag(a) => {
            let x = add_formula(eg, a);
            eg.add(CatLang::Diag(x))
        }
        Term::Codiag(a) => {
            let x = add_formula(eg, a);
            eg.add(CatLang::Codiag(x))
        }
        Term::TensorProd(f, g) => {
            let (x, y) = (add_term(eg, f), add_term(eg, g));
            eg.add(CatLang::ProdT([x, y]))
        }
        Term::TensorSum(f, g) => {
            let (x, y) = (add_term(eg, f), add_term(eg, g));
            eg.add(CatLang::SumT([x, y]))
        }
    }
}

type Rw = Rewrite<CatLang, CatAnalysis>;

fn var(name: &str) -> Var {
    name.parse().unwrap()
}

/// Adds `1_B . t` and `t . 1_A` to every term class; the finitary reverse
/// of the identity laws, needed to seed identity nodes for the unit
/// expansions.
struct IdentityIntro {
    t: Var,
}

impl Applier<CatLang, CatAnalysis> for IdentityIntro {
    fn apply_one(
        &self,
        eg: &mut EG,
        matched: Id,
        subst: &Subst,
        _ast: Option<&PatternAst<CatLang>>,
        _rule: Symbol,
    ) -> Vec<Id> {
        let t = subst[self.t];
        let ClassData::Arrow { src, tgt, .. } = eg[t].data.clone() else {
            return Vec::new();
        };
        let src_f = add_formula(eg, &src);
        let tgt_f = add_formula(eg, &tgt);
        let id_src = eg.add(CatLang::TermId(src_f));
        let id_tgt = eg.add(CatLang::TermId(tgt_f));
        let left = eg.add(CatLang::Comp([id_tgt, t]));
        let right = eg.add(CatLang::Comp([t, id_src]));
        let mut changed = Vec::new();
        if eg.union(matched, left) {
            changed.push(left);
        }
        if eg.union(matched, right) {
            changed.push(right);
        }
        changed
    }
}

/// Collapses every arrow into the terminal object with `kap`, and dually
/// every arrow out of the initial object with `lam`.
struct ConstantCollapse {
    t: Var,
    terminal: bool,
}

impl Applier<CatLang, CatAnalysis> for ConstantCollapse {
    fn apply_one(
        &self,
        eg: &mut EG,
        matched: Id,
        subst: &Subst,
        _ast: Option<&PatternAst<CatLang>>,
        _rule: Symbol,
    ) -> Vec<Id> {
        let t = subst[self.t];
        let ClassData::Arrow { src, tgt, .. } = eg[t].data.clone() else {
            return Vec::new();
        };
        let node = if self.terminal {
            if tgt != Formula::Terminal {
                return Vec::new();
            }
            let f = add_formula(eg, &src);
            eg.add(CatLang::Kap(f))
        } else {
            if src != Formula::Initial {
                return Vec::new();
            }
            let f = add_formula(eg, &tgt);
            eg.add(CatLang::Lam(f))
        };
        if eg.union(matched, node) {
            vec![node]
        } else {
            Vec::new()
        }
    }
}

/// `k^i . (f1 x f2) -> f_i . k^i` with the source projection rebuilt from
/// the component types.
struct ProjSlide {
    index: Index,
    f1: Var,
    f2: Var,
}

impl Applier<CatLang, CatAnalysis> for ProjSlide {
    fn apply_one(
        &self,
        eg: &mut EG,
        matched: Id,
        subst: &Subst,
        _ast: Option<&PatternAst<CatLang>>,
        _rule: Symbol,
    ) -> Vec<Id> {
        let (f1, f2) = (subst[self.f1], subst[self.f2]);
        let (s1, _, _) = data_arrow(eg, f1);
        let (s2, _, _) = data_arrow(eg, f2);
        let a1 = add_formula(eg, &s1);
        let a2 = add_formula(eg, &s2);
        let (proj, picked) = match self.index {
            Index::One => (eg.add(CatLang::Proj1([a1, a2])), f1),
            Index::Two => (eg.add(CatLang::Proj2([a1, a2])), f2),
        };
        let new = eg.add(CatLang::Comp([picked, proj]));
        if eg.union(matched, new) {
            vec![new]
        } else {
            Vec::new()
        }
    }
}

/// `f . k^i -> k^i . (f x 1)` (resp. `(1 x f)`), the identity-instantiated
/// reverse of the projection slide.
struct ProjSlideRev {
    index: Index,
    f: Var,
    a1: Var,
    a2: Var,
}

impl Applier<CatLang, CatAnalysis> for ProjSlideRev {
    fn apply_one(
        &self,
        eg: &mut EG,
        matched: Id,
        subst: &Subst,
        _ast: Option<&PatternAst<CatLang>>,
        _rule: Symbol,
    ) -> Vec<Id> {
        let f = subst[self.f];
        let (_, ft, _) = data_arrow(eg, f);
        let b = add_formula(eg, &ft);
        let new = match self.index {
            Index::One => {
                let a2 = subst[self.a2];
                let id2 = eg.add(CatLang::TermId(a2));
                let tensor = eg.add(CatLang::ProdT([f, id2]));
                let proj = eg.add(CatLang::Proj1([b, a2]));
                eg.add(CatLang::Comp([proj, tensor]))
            }
            Index::Two => {
                let a1 = subst[self.a1];
                let id1 = eg.add(CatLang::TermId(a1));
                let tensor = eg.add(CatLang::ProdT([id1, f]));
                let proj = eg.add(CatLang::Proj2([a1, b]));
                eg.add(CatLang::Comp([proj, tensor]))
            }
        };
        if eg.union(matched, new) {
            vec![new]
        } else {
            Vec::new()
        }
    }
}

/// `(f1 + f2) . l^i -> l^i . f_i`.
struct InjSlide {
    index: Index,
    f1: Var,
    f2: Var,
}

impl Applier<CatLang, CatAnalysis> for InjSlide {
    fn apply_one(
        &self,
        eg: &mut EG,
        matched: Id,
        subst: &Subst,
        _ast: Option<&PatternAst<CatLang>>,
        _rule: Symbol,
    ) -> Vec<Id> {
        let (f1, f2) = (subst[self.f1], subst[self.f2]);
        let (_, t1, _) = data_arrow(eg, f1);
        let (_, t2, _) = data_arrow(eg, f2);
        let b1 = add_formula(eg, &t1);
        let b2 = add_formula(eg, &t2);
        let (inj, picked) = match self.index {
            Index::One => (eg.add(CatLang::Inj1([b1, b2])), f1),
            Index::Two => (eg.add(CatLang::Inj2([b1, b2])), f2),
        };
        let new = eg.add(CatLang::Comp([inj, picked]));
        if eg.union(matched, new) {
            vec![new]
        } else {
            Vec::new()
        }
    }
}

/// `l^i . f -> (f + 1) . l^i` (resp. `(1 + f)`).
struct InjSlideRev {
    index: Index,
    f: Var,
    b1: Var,
    b2: Var,
}

impl Applier<CatLang, CatAnalysis> for InjSlideRev {
    fn apply_one(
        &self,
        eg: &mut EG,
        matched: Id,
        subst: &Subst,
        _ast: Option<&PatternAst<CatLang>>,
        _rule: Symbol,
    ) -> Vec<Id> {
        let f = subst[self.f];
        let (fs, _, _) = data_arrow(eg, f);
        let c = add_formula(eg, &fs);
        let new = match self.index {
            Index::One => {
                let b2 = subst[self.b2];
                let id2 = eg.add(CatLang::TermId(b2));
                let tensor = eg.add(CatLang::SumT([f, id2]));
                let inj = eg.add(CatLang::Inj1([c, b2]));
                eg.add(CatLang::Comp([tensor, inj]))
            }
            Index::Two => {
                let b1 = subst[self.b1];
                let id1 = eg.add(CatLang::TermId(b1));
                let tensor = eg.add(CatLang::SumT([id1, f]));
                let inj = eg.add(CatLang::Inj2([b1, c]));
                eg.add(CatLang::Comp([tensor, inj]))
            }
        };
        if eg.union(matched, new) {
            vec![new]
        } else {
            Vec::new()
        }
    }
}

/// Naturality of the diagonal in both directions, and dually of the
/// codiagonal.
struct DiagNatural {
    f: Var,
    forward: bool,
}

impl Applier<CatLang, CatAnalysis> for DiagNatural {
    fn apply_one(
        &self,
        eg: &mut EG,
        matched: Id,
        subst: &Subst,
        _ast: Option<&PatternAst<CatLang>>,
        _rule: Symbol,
    ) -> Vec<Id> {
        let f = subst[self.f];
        let (fs, ft, _) = data_arrow(eg, f);
        let new = if self.forward {
            // w_B . f -> (f x f) . w_A
            let a = add_formula(eg, &fs);
            let w = eg.add(CatLang::Diag(a));
            let tensor = eg.add(CatLang::ProdT([f, f]));
            eg.add(CatLang::Comp([tensor, w]))
        } else {
            // (f x f) . w_A -> w_B . f
            let b = add_formula(eg, &ft);
            let w = eg.add(CatLang::Diag(b));
            eg.add(CatLang::Comp([w, f]))
        };
        if eg.union(matched, new) {
            vec![new]
        } else {
            Vec::new()
        }
    }
}

struct CodiagNatural {
    f: Var,
    forward: bool,
}

impl Applier<CatLang, CatAnalysis> for CodiagNatural {
    fn apply_one(
        &self,
        eg: &mut EG,
        matched: Id,
        subst: &Subst,
        _ast: Option<&PatternAst<CatLang>>,
        _rule: Symbol,
    ) -> Vec<Id> {
        let f = subst[self.f];
        let (fs, ft, _) = data_arrow(eg, f);
        let new = if self.forward {
            // f . m_A -> m_B . (f + f)
            let b = add_formula(eg, &ft);
            let m = eg.add(CatLang::Codiag(b));
            let tensor = eg.add(CatLang::SumT([f, f]));
            eg.add(CatLang::Comp([m, tensor]))
        } else {
            // m_B . (f + f) -> f . m_A
            let a = add_formula(eg, &fs);
            let m = eg.add(CatLang::Codiag(a));
            eg.add(CatLang::Comp([f, m]))
        };
        if eg.union(matched, new) {
            vec![new]
        } else {
            Vec::new()
        }
    }
}

fn dynamic(
    name: &str,
    pattern: &str,
    applier: impl Applier<CatLang, CatAnalysis> + Send + Sync + 'static,
) -> Rw {
    Rewrite::new(name, pattern.parse::<Pattern<CatLang>>().unwrap(), applier).unwrap()
}

fn axiom_rewrites(name: &str) -> Vec<Rw> {
    match name {
        "cat1" => {
            let mut rws = vec![
                rewrite!("cat1-left"; "(comp (id ?a) ?f)" => "?f"),
                rewrite!("cat1-right"; "(comp ?f (id ?a))" => "?f"),
            ];
            rws.push(dynamic("cat1-intro", "?t", IdentityIntro { t: var("?t") }));
            rws
        }
        "cat2" => rewrite!("cat2"; "(comp ?h (comp ?g ?f))" <=> "(comp (comp ?h ?g) ?f)"),
        "K1" => {
            let mut rws = rewrite!("K1-1"; "(comp ?g (karg1 ?s ?f))" <=> "(karg1 ?s (comp ?g ?f))");
            rws.extend(rewrite!("K1-2"; "(comp ?g (karg2 ?s ?f))" <=> "(karg2 ?s (comp ?g ?f))"));
            rws
        }
        "K2" => vec![
            rewrite!("K2-1"; "(comp (karg1 ?s ?g) (pair ?f1 ?f2))" => "(comp ?g ?f1)"),
            rewrite!("K2-2"; "(comp (karg2 ?s ?g) (pair ?f1 ?f2))" => "(comp ?g ?f2)"),
        ],
        "K3" => rewrite!("K3"; "(comp (pair ?g1 ?g2) ?f)" <=> "(pair (comp ?g1 ?f) (comp ?g2 ?f))"),
        "K4" => {
            rewrite!("K4"; "(pair (karg1 ?b (id ?a)) (karg2 ?a (id ?b)))" <=> "(id (fprod ?a ?b))")
        }
        "L1" => {
            let mut rws = rewrite!("L1-1"; "(comp (larg1 ?s ?g) ?f)" <=> "(larg1 ?s (comp ?g ?f))");
            rws.extend(rewrite!("L1-2"; "(comp (larg2 ?s ?g) ?f)" <=> "(larg2 ?s (comp ?g ?f))"));
            rws
        }
        "L2" => vec![
            rewrite!("L2-1"; "(comp (copair ?g1 ?g2) (larg1 ?s ?f))" => "(comp ?g1 ?f)"),
            rewrite!("L2-2"; "(comp (copair ?g1 ?g2) (larg2 ?s ?f))" => "(comp ?g2 ?f)"),
        ],
        "L3" => {
            rewrite!("L3"; "(comp ?g (copair ?f1 ?f2))" <=> "(copair (comp ?g ?f1) (comp ?g ?f2))")
        }
        "L4" => {
            rewrite!("L4"; "(copair (larg1 ?b (id ?a)) (larg2 ?a (id ?b)))" <=> "(id (fsum ?a ?b))")
        }
        "k" => vec![dynamic("k-collapse", "?t", ConstantCollapse { t: var("?t"), terminal: true })],
        "l" => vec![dynamic("l-collapse", "?t", ConstantCollapse { t: var("?t"), terminal: false })],
        "x1" => rewrite!("x1"; "(prodt (id ?a) (id ?b))" <=> "(id (fprod ?a ?b))"),
        "x2" => {
            rewrite!("x2"; "(prodt (comp ?g1 ?g2) (comp ?f1 ?f2))" <=> "(comp (prodt ?g1 ?f1) (prodt ?g2 ?f2))")
        }
        "+1" => rewrite!("sum1"; "(sumt (id ?a) (id ?b))" <=> "(id (fsum ?a ?b))"),
        "+2" => {
            rewrite!("sum2"; "(sumt (comp ?g1 ?g2) (comp ?f1 ?f2))" <=> "(comp (sumt ?g1 ?f1) (sumt ?g2 ?f2))")
        }
        "ki" => vec![
            dynamic(
                "ki-1",
                "(comp (proj1 ?b1 ?b2) (prodt ?f1 ?f2))",
                ProjSlide { index: Index::One, f1: var("?f1"), f2: var("?f2") },
            ),
            dynamic(
                "ki-2",
                "(comp (proj2 ?b1 ?b2) (prodt ?f1 ?f2))",
                ProjSlide { index: Index::Two, f1: var("?f1"), f2: var("?f2") },
            ),
            dynamic(
                "ki-1-rev",
                "(comp ?f (proj1 ?a1 ?a2))",
                ProjSlideRev { index: Index::One, f: var("?f"), a1: var("?a1"), a2: var("?a2") },
            ),
            dynamic(
                "ki-2-rev",
                "(comp ?f (proj2 ?a1 ?a2))",
                ProjSlideRev { index: Index::Two, f: var("?f"), a1: var("?a1"), a2: var("?a2") },
            ),
        ],
        "li" => vec![
            dynamic(
                "li-1",
                "(comp (sumt ?f1 ?f2) (inj1 ?a1 ?a2))",
                InjSlide { index: Index::One, f1: var("?f1"), f2: var("?f2") },
            ),
            dynamic(
                "li-2",
                "(comp (sumt ?f1 ?f2) (inj2 ?a1 ?a2))",
                InjSlide { index: Index::Two, f1: var("?f1"), f2: var("?f2") },
            ),
            dynamic(
                "li-1-rev",
                "(comp (inj1 ?b1 ?b2) ?f)",
                InjSlideRev { index: Index::One, f: var("?f"), b1: var("?b1"), b2: var("?b2") },
            ),
            dynamic(
                "li-2-rev",
                "(comp (inj2 ?b1 ?b2) ?f)",
                InjSlideRev { index: Index::Two, f: var("?f"), b1: var("?b1"), b2: var("?b2") },
            ),
        ],
        "w" => vec![
            dynamic("w-fwd", "(comp (diag ?b) ?f)", DiagNatural { f: var("?f"), forward: true }),
            dynamic(
                "w-rev",
                "(comp (prodt ?f ?f) (diag ?a))",
                DiagNatural { f: var("?f"), forward: false },
            ),
        ],
        "m" => vec![
            dynamic("m-fwd", "(comp ?f (codiag ?a))", CodiagNatural { f: var("?f"), forward: true }),
            dynamic(
                "m-rev",
                "(comp (codiag ?b) (sumt ?f ?f))",
                CodiagNatural { f: var("?f"), forward: false },
            ),
        ],
        "kw1" => {
            let mut rws = rewrite!("kw1-1"; "(comp (proj1 ?a ?a) (diag ?a))" <=> "(id ?a)");
            rws.extend(rewrite!("kw1-2"; "(comp (proj2 ?a ?a) (diag ?a))" <=> "(id ?a)"));
            rws
        }
        "kw2" => {
            rewrite!("kw2"; "(comp (prodt (proj1 ?a ?b) (proj2 ?a ?b)) (diag (fprod ?a ?b)))" <=> "(id (fprod ?a ?b))")
        }
        "lm1" => {
            let mut rws = rewrite!("lm1-1"; "(comp (codiag ?a) (inj1 ?a ?a))" <=> "(id ?a)");
            rws.extend(rewrite!("lm1-2"; "(comp (codiag ?a) (inj2 ?a ?a))" <=> "(id ?a)"));
            rws
        }
        "lm2" => {
            rewrite!("lm2"; "(comp (codiag (fsum ?a ?b)) (sumt (inj1 ?a ?b) (inj2 ?a ?b)))" <=> "(id (fsum ?a ?b))")
        }
        other => panic!("unknown axiom {other}"),
    }
}

const COMBINATOR_AXIOMS: &[&str] =
    &["cat1", "cat2", "K1", "K2", "K3", "K4", "L1", "L2", "L3", "L4", "k", "l"];
const BIFUNCTORIAL_AXIOMS: &[&str] = &[
    "cat1", "cat2", "x1", "x2", "ki", "w", "kw1", "kw2", "+1", "+2", "li", "m", "lm1", "lm2", "k",
    "l",
];

/// A named table of equations, expanded into rewrites on demand so that
/// single axioms can be ablated.
pub struct AxiomSet {
    names: Vec<&'static str>,
    rewrites: Vec<Rw>,
}

impl AxiomSet {
    fn from_names(names: Vec<&'static str>) -> AxiomSet {
        let rewrites = names.iter().flat_map(|n| axiom_rewrites(n)).collect();
        AxiomSet { names, rewrites }
    }

    /// Equations of the combinator calculus.
    pub fn combinator() -> AxiomSet {
        AxiomSet::from_names(COMBINATOR_AXIOMS.to_vec())
    }

    /// Equations of the bifunctorial calculus.
    pub fn bifunctorial() -> AxiomSet {
        AxiomSet::from_names(BIFUNCTORIAL_AXIOMS.to_vec())
    }

    /// Axioms matching the generator set of a fragment, for closing over
    /// terms produced by [`enumerate_terms`].
    pub fn for_fragment(fragment: &Fragment) -> AxiomSet {
        let mut names = vec!["cat1", "cat2"];
        if fragment.product == ConnectiveUse::Full {
            names.extend(["K1", "K2", "K3", "K4"]);
        }
        if fragment.sum == ConnectiveUse::Full {
            names.extend(["L1", "L2", "L3", "L4"]);
        }
        if fragment.product == ConnectiveUse::BifunctorOnly {
            names.extend(["x1", "x2"]);
        }
        if fragment.sum == ConnectiveUse::BifunctorOnly {
            names.extend(["+1", "+2"]);
        }
        if fragment.has_terminal {
            names.push("k");
        }
        if fragment.has_initial {
            names.push("l");
        }
        AxiomSet::from_names(names)
    }

    /// Drops one named axiom, for ablation tests.
    pub fn without(self, name: &str) -> AxiomSet {
        AxiomSet::from_names(self.names.into_iter().filter(|n| *n != name).collect())
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }
}

/// Result of a bounded closure run.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureReport {
    pub seed_count: usize,
    /// Seed terms grouped by closure class, in deterministic order.
    pub classes: Vec<Vec<Term>>,
    /// The interpretation shared by each class.
    pub class_graphs: Vec<Relation>,
    /// Whether the closure reached a fixpoint within its budgets.
    pub saturated: bool,
    /// Whether the node budget cut the search off.
    pub truncated: bool,
    /// Distinct e-nodes explored.
    pub explored: usize,
    /// Merges of terms with distinct interpretations (always a bug):
    /// detected both at merge time and across the final seed classes.
    pub hard_failures: Vec<(Term, Term)>,
    /// Merge-time interpretation mismatches, counted inside the engine.
    pub internal_mismatches: usize,
}

const CLOSURE_ITER_LIMIT: usize = 200;

/// Bounded equational closure over the seed terms: every axiom applied in
/// every finitary direction at every subterm position (modulo congruence)
/// until fixpoint or until `step_bound` e-nodes exist.
pub fn equational_closure(
    seeds: &[Term],
    axioms: &AxiomSet,
    step_bound: usize,
) -> Result<ClosureReport, OracleError> {
    for seed in seeds {
        seed.infer_type()?;
    }
    let mut eg = EG::default();
    let seed_ids: Vec<Id> = seeds.iter().map(|s| add_term(&mut eg, s)).collect();
    eg.rebuild();
    let runner = Runner::default()
        .with_egraph(eg)
        .with_scheduler(SimpleScheduler)
        .with_iter_limit(CLOSURE_ITER_LIMIT)
        .with_node_limit(step_bound)
        .with_time_limit(Duration::from_secs(3600))
        .run(&axioms.rewrites);
    let saturated = matches!(runner.stop_reason, Some(StopReason::Saturated));
    let truncated = matches!(runner.stop_reason, Some(StopReason::NodeLimit(_)));
    let eg = runner.egraph;
    let explored = eg.total_number_of_nodes();
    let internal_mismatches = eg.analysis.mismatches;

    let mut class_map: HashMap<Id, Vec<Term>> = HashMap::new();
    for (seed, id) in seeds.iter().zip(&seed_ids) {
        let root = eg.find(*id);
        let class = class_map.entry(root).or_default();
        if !class.contains(seed) {
            class.push(seed.clone());
        }
    }
    let mut classes: Vec<Vec<Term>> = class_map.into_values().collect();
    for class in &mut classes {
        class.sort();
    }
    classes.sort();

    let mut hard_failures = Vec::new();
    for class in &classes {
        let first_rel = interpret(&class[0]).expect("seeds type-checked above");
        for other in &class[1..] {
            let rel = interpret(other).expect("seeds type-checked above");
            if rel != first_rel {
                hard_failures.push((class[0].clone(), other.clone()));
            }
        }
    }
    let class_graphs =
        classes.iter().map(|c| interpret(&c[0]).expect("seeds type-checked above")).collect();
    Ok(ClosureReport {
        seed_count: seeds.len(),
        classes,
        class_graphs,
        saturated,
        truncated,
        explored,
        hard_failures,
        internal_mismatches,
    })
}

/// Result of comparing the closure partition with the interpretation
/// partition over an exhaustive seed set.
#[derive(Debug, Clone, Serialize)]
pub struct FaithfulnessReport {
    pub src: Formula,
    pub tgt: Formula,
    pub seed_count: usize,
    pub g_classes: usize,
    pub closure_classes: usize,
    /// Closure classes and interpretation classes coincide.
    pub coincide: bool,
    pub saturated: bool,
    /// Representative pairs with equal interpretation that the bounded
    /// closure failed to merge (inconclusive, not a failure).
    pub unresolved: Vec<(Term, Term)>,
    /// Merges of terms with distinct interpretations (always a bug).
    pub hard_failures: Vec<(Term, Term)>,
}

pub const DEFAULT_CLOSURE_NODES: usize = 4_000_000;

pub fn verify_faithfulness(
    src: &Formula,
    tgt: &Formula,
    size_bound: usize,
    fragment: &Fragment,
) -> Result<FaithfulnessReport, OracleError> {
    verify_faithfulness_with_budget(src, tgt, size_bound, fragment, DEFAULT_CLOSURE_NODES)
}

pub fn verify_faithfulness_with_budget(
    src: &Formula,
    tgt: &Formula,
    size_bound: usize,
    fragment: &Fragment,
    node_budget: usize,
) -> Result<FaithfulnessReport, OracleError> {
    let seeds = enumerate_terms(src, tgt, size_bound, fragment);
    let axioms = AxiomSet::for_fragment(fragment);
    let report = equational_closure(&seeds, &axioms, node_budget)?;
    let mut g_partition: HashMap<Relation, Vec<&Term>> = HashMap::new();
    for seed in &seeds {
        g_partition.entry(interpret(seed)?).or_default().push(seed);
    }
    let mut unresolved = Vec::new();
    for class in g_partition.values() {
        let roots: Vec<&Vec<Term>> = report
            .classes
            .iter()
            .filter(|c| c.iter().any(|t| class.iter().any(|s| *s == t)))
            .collect();
        if roots.len() > 1 {
            unresolved.push((roots[0][0].clone(), roots[1][0].clone()));
        }
    }
    let coincide =
        unresolved.is_empty() && report.hard_failures.is_empty() && report.internal_mismatches == 0;
    Ok(FaithfulnessReport {
        src: src.clone(),
        tgt: tgt.clone(),
        seed_count: seeds.len(),
        g_classes: g_partition.len(),
        closure_classes: report.classes.len(),
        coincide,
        saturated: report.saturated,
        unresolved,
        hard_failures: report.hard_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragment::parse_fragment;
    use crate::parse::{parse_formula, parse_term};

    fn tr(text: &str) -> Term {
        parse_term(text).unwrap()
    }

    fn fm(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    #[test]
    fn enumeration_of_projections() {
        let fr = parse_fragment("x").unwrap();
        let terms = enumerate_terms(&fm("p*p"), &fm("p"), 3, &fr);
        assert_eq!(terms, vec![tr("K1{p}(1{p})"), tr("K2{p}(1{p})")]);
    }

    #[test]
    fn enumeration_identity_only() {
        let fr = parse_fragment("x").unwrap();
        let terms = enumerate_terms(&fm("p"), &fm("p"), 1, &fr);
        assert_eq!(terms, vec![tr("1{p}")]);
    }

    #[test]
    fn no_arrows_between_distinct_letters() {
        let fr = parse_fragment("x,+").unwrap();
        for bound in [1, 4, 7] {
            assert!(enumerate_terms(&fm("p"), &fm("q"), bound, &fr).is_empty());
        }
    }

    #[test]
    fn closure_merges_identity_expansion() {
        let seeds = [tr("1{p*q}"), tr("<K1{q}(1{p}),K2{p}(1{q})>")];
        let axioms = AxiomSet::combinator();
        let report = equational_closure(&seeds, &axioms, 100_000).unwrap();
        assert!(report.saturated);
        assert_eq!(report.classes.len(), 1);
        assert!(report.hard_failures.is_empty());
        assert_eq!(report.internal_mismatches, 0);
    }

    #[test]
    fn closure_keeps_projections_apart() {
        let seeds = [tr("k1{p,p}"), tr("k2{p,p}")];
        let axioms = AxiomSet::bifunctorial();
        let report = equational_closure(&seeds, &axioms, 100_000).unwrap();
        assert_eq!(report.classes.len(), 2);
        assert!(report.hard_failures.is_empty());
        assert_eq!(report.internal_mismatches, 0);
    }

    #[test]
    fn closure_merges_both_kl_forms() {
        // the full bifunctorial table does not reach a fixpoint (its unit
        // expansions keep producing fresh classes), so the run is honestly
        // truncated; the merge itself happens in the first iteration
        let seeds = [tr("(m{p};w{p})"), tr("((w{p}+w{p});m{p*p})")];
        let axioms = AxiomSet::bifunctorial();
        let report = equational_closure(&seeds, &axioms, 20_000).unwrap();
        assert_eq!(report.classes.len(), 1, "classes: {:?}", report.classes);
        assert!(report.truncated && !report.saturated);
        assert!(report.hard_failures.is_empty());
        assert_eq!(report.internal_mismatches, 0);
    }

    #[test]
    fn closure_merges_the_interchange_pair() {
        let seeds = [tr("<[1{p},1{p}],[1{p},1{p}]>"), tr("[<1{p},1{p}>,<1{p},1{p}>]")];
        let axioms = AxiomSet::combinator().without("k").without("l");
        let report = equational_closure(&seeds, &axioms, 400_000).unwrap();
        assert_eq!(report.classes.len(), 1, "classes: {:?}", report.classes);
        assert!(report.hard_failures.is_empty());
    }

    #[test]
    fn ablating_the_working_axiom_splits_the_class() {
        let seeds = [tr("1{p*q}"), tr("<K1{q}(1{p}),K2{p}(1{q})>")];
        let axioms = AxiomSet::combinator().without("K4");
        let report = equational_closure(&seeds, &axioms, 100_000).unwrap();
        assert_eq!(report.classes.len(), 2);
    }

    #[test]
    fn faithfulness_on_projection_type() {
        let fr = parse_fragment("x,+").unwrap();
        let report = verify_faithfulness(&fm("p*p"), &fm("p"), 4, &fr).unwrap();
        assert!(report.coincide, "unresolved: {:?}", report.unresolved);
        assert!(report.saturated);
        assert_eq!(report.g_classes, 2);
        assert!(report.hard_failures.is_empty());
    }

    #[test]
    fn determinism_of_reports() {
        let fr = parse_fragment("x,+").unwrap();
        let a = verify_faithfulness(&fm("p+p"), &fm("p"), 4, &fr).unwrap();
        let b = verify_faithfulness(&fm("p+p"), &fm("p"), 4, &fr).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
