use proptest::prelude::*;

use cyclewalk::bounds;
use cyclewalk::engine::{random_walk_trajectory, CatchEngine};
use cyclewalk::spectral::{nstep_wrapped, wrap};
use cyclewalk::StepLaw;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn law_strategy() -> impl Strategy<Value = StepLaw> {
    prop_oneof![
        (0.5f64..4.0).prop_map(|a| StepLaw::heavy_tailed(a).unwrap()),
        (0.2f64..1.9, 0.05f64..3.0).prop_map(|(beta, extra)| {
            let z = cyclewalk::special::zeta(beta + 1.0);
            StepLaw::power_law(beta, z + extra).unwrap()
        }),
        Just(StepLaw::lazy()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pmf_is_symmetric_and_normalized(law in law_strategy(), k in 0i64..5000) {
        prop_assert_eq!(law.pmf(k).to_bits(), law.pmf(-k).to_bits());
        let head: f64 = (-k.min(200)..=k.min(200)).map(|j| law.pmf(j)).sum();
        prop_assert!((head + law.tail_mass(k.min(200) as u64) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn char_fn_is_bounded_and_even(law in law_strategy(), t in -std::f64::consts::PI..std::f64::consts::PI) {
        let v = law.char_fn(t);
        prop_assert!(v.abs() <= 1.0 + 1e-12);
        prop_assert!((v - law.char_fn(-t)).abs() <= 2.0 * law.eval_tol());
    }

    #[test]
    fn wrapped_table_is_symmetric_distribution(law in law_strategy(), n in 2usize..80, steps in 0u64..40) {
        let t = nstep_wrapped(&law, n, steps).unwrap();
        prop_assert!((t.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        for l in 1..n {
            prop_assert!((t.probs[l] - t.probs[n - l]).abs() <= 1e-12);
        }
    }

    #[test]
    fn spectral_equals_convolution(law in law_strategy(), n in 2usize..65, steps in 1u64..17) {
        let k = wrap(&law, n).unwrap().weights;
        let mut conv = k.clone();
        for _ in 1..steps {
            let mut next = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    next[(i + j) % n] += conv[i] * k[j];
                }
            }
            conv = next;
        }
        let t = nstep_wrapped(&law, n, steps).unwrap();
        for (a, b) in t.probs.iter().zip(&conv) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn sandwich_contains_exact(law in law_strategy(), n in 4usize..48, seed in any::<u64>(), w in (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0)) {
        let total = w.0 + w.1 + w.2 + 1e-9;
        let pmf = [w.0 / total, w.1 / total, 1.0 - (w.0 + w.1) / total];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_walk_trajectory(&pmf, n, &mut rng);
        let mut engine = CatchEngine::new(&law, n).unwrap();
        let r = engine.full(&t);
        let s = bounds::sandwich(&law, n).unwrap();
        prop_assert!(s.lower <= r.average && r.average <= s.upper_capped());
        let mean = r.per_start.iter().sum::<f64>() / n as f64;
        prop_assert!((mean - r.average).abs() <= 1e-9);
        prop_assert!(r.caught_by_time.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(r.per_start.iter().all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn extending_trajectory_never_lowers_catch(law in law_strategy(), n in 4usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let long = random_walk_trajectory(&[0.3, 0.4, 0.3], 2 * n, &mut rng);
        let short = cyclewalk::Trajectory::new(long.positions()[..n].to_vec()).unwrap();
        let mut engine = CatchEngine::new(&law, n).unwrap();
        prop_assert!(engine.forward(&long).average >= engine.forward(&short).average - 1e-15);
    }
}
