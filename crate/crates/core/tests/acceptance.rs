//! Acceptance suite: one test per shipping criterion, each printing a
//! pass/fail line with its elapsed time (run with `--nocapture` to see
//! them). Bounds and tolerances are pinned in the assertions.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::SeedableRng;

use bicoh_core::decide::{check_paper_examples, equal, Verdict};
use bicoh_core::fragment::parse_fragment;
use bicoh_core::gen::{bifunctorial_laws, combinator_laws, GenRng, GenStyle, TermGen};
use bicoh_core::graph::{distributivity_fixture, interpret, rel_compose, Relation};
use bicoh_core::maximality::{collapse_witness, verify_witness, Conclusion};
use bicoh_core::oracle::{enumerate_terms, verify_faithfulness};
use bicoh_core::rewrite::{
    degree, normalize, reduce_to_normal_form_with, Limits, Trace,
};
use bicoh_core::{parse_term, rel_identity, Formula, Term};

fn report(criterion: usize, label: &str, elapsed: Duration, limit: Duration) {
    println!(
        "criterion {criterion}: PASS  {label}  ({elapsed:.2?}, limit {limit:.0?})"
    );
    assert!(
        elapsed <= limit,
        "criterion {criterion} exceeded its time limit: {elapsed:?} > {limit:?}"
    );
}

/// All formulas with at most `max_leaves` leaves drawn from the pool.
fn formula_pool(leaves: &[Formula], max_leaves: usize) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(); max_leaves + 1];
    by_size[1] = leaves.to_vec();
    for n in 2..=max_leaves {
        let mut level = Vec::new();
        for left in 1..n {
            let rights = by_size[n - left].clone();
            for a in &by_size[left] {
                for b in &rights {
                    level.push(Formula::prod(a.clone(), b.clone()));
                    level.push(Formula::sum(a.clone(), b.clone()));
                }
            }
        }
        by_size[n] = level;
    }
    by_size.into_iter().flatten().collect()
}

#[test]
fn criterion_01_distributivity_round_trip() {
    let start = Instant::now();
    let (down, up) = distributivity_fixture();
    let round = rel_compose(&up, &down).unwrap();
    let expected = Relation::new(4, 4, [(0, 0), (0, 2), (1, 1), (2, 0), (2, 2), (3, 3)]);
    assert_eq!(round, expected);
    assert_ne!(round, rel_identity(4));
    report(1, "distributivity round trip is not the identity", start.elapsed(), Duration::from_millis(1));
}

#[test]
fn criterion_02_codiagonal_identity() {
    let start = Instant::now();
    let term = parse_term("((l1{p,q}+l2{p,q});m{p+q})").unwrap();
    assert_eq!(interpret(&term).unwrap(), rel_identity(2));
    report(2, "codiagonal after the split injections is the identity", start.elapsed(), Duration::from_millis(1));
}

#[test]
fn criterion_03_display_equations() {
    let start = Instant::now();
    let report_eq = check_paper_examples();
    assert_eq!(report_eq.checks.len(), 32, "16 assignments for each of the two equations");
    for check in &report_eq.checks {
        assert_eq!(
            check.verdict,
            Verdict::Equal,
            "{} at {:?} must be equal",
            check.equation,
            check.letters
        );
    }
    report(3, "both display equations hold over all letter assignments", start.elapsed(), Duration::from_secs(1));
}

#[test]
fn criterion_04_axiom_soundness() {
    let start = Instant::now();
    const INSTANCES: usize = 10_000;
    let comb_gen = TermGen::full(GenStyle::Combinator, &["p", "q"], 5);
    for (i, law) in combinator_laws().iter().enumerate() {
        let mut rng = GenRng::seed_from_u64(0xC0 + i as u64);
        for n in 0..INSTANCES {
            let (lhs, rhs) = (law.instantiate)(&mut rng, &comb_gen);
            assert_eq!(
                interpret(&lhs).unwrap(),
                interpret(&rhs).unwrap(),
                "law {} violated at instance {n}: {lhs} vs {rhs}",
                law.name
            );
        }
    }
    let bif_gen = TermGen::full(GenStyle::Bifunctorial, &["p", "q"], 5);
    for (i, law) in bifunctorial_laws().iter().enumerate() {
        let mut rng = GenRng::seed_from_u64(0xB0 + i as u64);
        for n in 0..INSTANCES {
            let (lhs, rhs) = (law.instantiate)(&mut rng, &bif_gen);
            assert_eq!(
                interpret(&lhs).unwrap(),
                interpret(&rhs).unwrap(),
                "law {} violated at instance {n}: {lhs} vs {rhs}",
                law.name
            );
        }
    }
    report(4, "10^4 random instances of every equation of both calculi are sound", start.elapsed(), Duration::from_secs(60));
}

#[test]
fn criterion_05_strong_normalization() {
    let start = Instant::now();
    const TERMS: usize = 10_000;
    let ambient = parse_fragment("x,I,+b").unwrap();
    let mut gen = TermGen::cartesian_bifunctor_sums(&["p", "q"], 20);
    gen.allow_composition = false;
    let mut rng = GenRng::seed_from_u64(0x57);
    let mut steps_total = 0usize;
    for n in 0..TERMS {
        let t = gen.sample(&mut rng);
        assert!(t.size() <= 20);
        let mut trace = Trace::new();
        let nf = reduce_to_normal_form_with(&t, &ambient, Limits::default(), Some(&mut trace))
            .unwrap_or_else(|e| panic!("normalization failed on {t} (instance {n}): {e}"));
        for step in &trace {
            let before = step.degree_before.expect("reduction steps carry degrees");
            let after = step.degree_after.expect("reduction steps carry degrees");
            assert!(
                after < before,
                "step {} failed to decrease the degree on {} -> {}",
                step.rule,
                step.before,
                step.after
            );
        }
        steps_total += trace.len();
        assert_eq!(degree(&nf), degree(&nf), "normal form degree is stable");
    }
    report(
        5,
        &format!("10^4 reductions terminate, every one of {steps_total} steps decreases the degree"),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_06_unique_normal_forms_desk_scale() {
    let start = Instant::now();
    let fragment = parse_fragment("x,I,+b").unwrap();
    let leaves = [Formula::letter("p"), Formula::letter("q"), Formula::Terminal];
    let pool = formula_pool(&leaves, 3);
    let mut types_with_terms = 0usize;
    let mut terms_seen = 0usize;
    for src in &pool {
        for tgt in &pool {
            let terms = enumerate_terms(src, tgt, 8, &fragment);
            if terms.is_empty() {
                continue;
            }
            types_with_terms += 1;
            terms_seen += terms.len();
            // normal form and interpretation per term
            let mut by_graph: HashMap<Relation, Term> = HashMap::new();
            let mut by_nf: HashMap<Term, Relation> = HashMap::new();
            for t in &terms {
                let nf = reduce_to_normal_form_with(t, &fragment, Limits::default(), None)
                    .unwrap_or_else(|e| panic!("normalization failed on {t}: {e}"));
                let rel = interpret(t).unwrap();
                assert_eq!(interpret(&nf).unwrap(), rel, "normalization changed the graph of {t}");
                if let Some(previous) = by_graph.get(&rel) {
                    assert_eq!(
                        previous, &nf,
                        "graph-equal terms with distinct normal forms at {src} -> {tgt}"
                    );
                } else {
                    by_graph.insert(rel.clone(), nf.clone());
                }
                if let Some(previous) = by_nf.get(&nf) {
                    assert_eq!(
                        previous, &rel,
                        "identical normal forms with distinct graphs at {src} -> {tgt}"
                    );
                } else {
                    by_nf.insert(nf, rel);
                }
            }
        }
    }
    report(
        6,
        &format!("normal-form identity matches graph equality over {terms_seen} terms at {types_with_terms} types"),
        start.elapsed(),
        Duration::from_secs(600),
    );
}

#[test]
fn criterion_07_associativity_is_derivable() {
    let start = Instant::now();
    const TRIPLES: usize = 1_000;
    let ambient = parse_fragment("x,I,+b").unwrap();
    let gen = TermGen::cartesian_bifunctor_sums(&["p", "q"], 6);
    let mut rng = GenRng::seed_from_u64(0xCA7);
    for n in 0..TRIPLES {
        let f = gen.sample(&mut rng);
        let mid1 = f.infer_type().unwrap().1;
        let g = gen.sample_with_source(&mut rng, &mid1);
        let mid2 = g.infer_type().unwrap().1;
        let h = gen.sample_with_source(&mut rng, &mid2);
        let left = Term::comp(h.clone(), Term::comp(g.clone(), f.clone()));
        let right = Term::comp(Term::comp(h, g), f);
        let nf_left = normalize(&left, &ambient)
            .unwrap_or_else(|e| panic!("normalization failed at triple {n}: {e}"));
        let nf_right = normalize(&right, &ambient).unwrap();
        assert_eq!(nf_left, nf_right, "associated composites normalize apart at triple {n}");
    }
    report(
        7,
        "10^3 random triples normalize identically under both associations",
        start.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_08_faithfulness_oracle_agreement() {
    let start = Instant::now();
    let fragment = parse_fragment("x,+").unwrap();
    let leaves = [Formula::letter("p"), Formula::letter("q")];
    let pool = formula_pool(&leaves, 3);
    let mut checked = 0usize;
    let mut seeds_total = 0usize;
    for src in &pool {
        for tgt in &pool {
            let report = verify_faithfulness(src, tgt, 6, &fragment).unwrap();
            if report.seed_count == 0 {
                continue;
            }
            checked += 1;
            seeds_total += report.seed_count;
            assert!(
                report.hard_failures.is_empty(),
                "the closure merged graph-distinct terms at {src} -> {tgt}: {:?}",
                report.hard_failures
            );
            assert!(
                report.saturated,
                "closure failed to saturate at {src} -> {tgt} ({} seeds)",
                report.seed_count
            );
            assert!(
                report.coincide,
                "partitions differ at {src} -> {tgt}: unresolved {:?}",
                report.unresolved
            );
        }
    }
    report(
        8,
        &format!("closure and graph partitions coincide with saturation at {checked} types ({seeds_total} terms)"),
        start.elapsed(),
        Duration::from_secs(900),
    );
}

#[test]
fn criterion_09_counterexample_gating() {
    let start = Instant::now();
    let v1 = equal(&parse_term("k1{O,O}").unwrap(), &parse_term("k2{O,O}").unwrap()).unwrap();
    match v1 {
        Verdict::Incoherent { g_equal, .. } => assert!(g_equal),
        other => panic!("projections over the initial object must be gated, got {other:?}"),
    }
    let v2 = equal(&parse_term("l1{I,I}").unwrap(), &parse_term("l2{I,I}").unwrap()).unwrap();
    match v2 {
        Verdict::Incoherent { g_equal, .. } => assert!(g_equal),
        other => panic!("injections over the terminal object must be gated, got {other:?}"),
    }
    report(9, "zero-typed projection and injection pairs are gated, graphs agree", start.elapsed(), Duration::from_secs(1));
}

#[test]
fn criterion_10_collapse_witnesses() {
    let start = Instant::now();
    const WITNESSES: usize = 100;
    let fragment = parse_fragment("x,+").unwrap();
    let gen = TermGen::products_sums_combinator(&["p"], 10);
    let mut rng = GenRng::seed_from_u64(0xFA11);
    let mut built = 0usize;
    let mut conclusions = (0usize, 0usize);
    while built < WITNESSES {
        let f = gen.sample(&mut rng);
        if f.size() > 10 {
            continue;
        }
        let (src, tgt) = f.infer_type().unwrap();
        let f_rel = interpret(&f).unwrap();
        let candidates = enumerate_terms(&src, &tgt, 6, &fragment);
        let Some(g) = candidates.into_iter().find(|g| interpret(g).unwrap() != f_rel) else {
            continue;
        };
        let witness = collapse_witness(&f, &g)
            .unwrap_or_else(|e| panic!("witness construction failed for {f} vs {g}: {e}"));
        verify_witness(&witness, &f, &g)
            .unwrap_or_else(|e| panic!("witness verification failed for {f} vs {g}: {e}"));
        // certificate shape: singleton graphs splitting at (0,0), and the
        // canonical generator pair
        let p = Formula::letter("p");
        match witness.conclusion {
            Conclusion::ProjectionsCollapse => {
                conclusions.0 += 1;
                assert_eq!(
                    witness.final_pair,
                    (
                        Term::proj(bicoh_core::Index::One, p.clone(), p.clone()),
                        Term::proj(bicoh_core::Index::Two, p.clone(), p.clone())
                    )
                );
            }
            Conclusion::InjectionsCollapse => {
                conclusions.1 += 1;
                assert_eq!(
                    witness.final_pair,
                    (
                        Term::inj(bicoh_core::Index::One, p.clone(), p.clone()),
                        Term::inj(bicoh_core::Index::Two, p.clone(), p.clone())
                    )
                );
            }
        }
        built += 1;
    }
    report(
        10,
        &format!(
            "{WITNESSES} random separated pairs yield verified witnesses ({} projection-, {} injection-flavored)",
            conclusions.0, conclusions.1
        ),
        start.elapsed(),
        Duration::from_secs(300),
    );
}
