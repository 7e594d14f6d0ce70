use bicoh_core::gen::*;
use bicoh_core::graph::interpret;
use rand::SeedableRng;
use std::time::Instant;

fn main() {
    let comb_gen = TermGen::full(GenStyle::Combinator, &["p", "q"], 5);
    for (i, law) in combinator_laws().iter().enumerate() {
        let mut rng = GenRng::seed_from_u64(0xC0 + i as u64);
        let t0 = Instant::now();
        for n in 0..10_000 {
            let t1 = Instant::now();
            let (lhs, rhs) = (law.instantiate)(&mut rng, &comb_gen);
            assert_eq!(interpret(&lhs).unwrap(), interpret(&rhs).unwrap(), "{}", law.name);
            if t1.elapsed().as_secs() > 2 {
                println!("  SLOW {} instance {n}: {:?}  lhs nodes {}", law.name, t1.elapsed(), lhs.node_count());
            }
        }
        println!("law {}: 10000 in {:?}", law.name, t0.elapsed());
    }
}
