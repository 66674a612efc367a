mod common;

use gatree_core::arff::{parse_arff, write_arff};
use gatree_core::evolution::{evolve, fitness_from, EvolutionConfig, SequentialEvaluator};
use gatree_core::rng::Stream;
use gatree_core::{Attribute, Dataset, Schema, Value, ValuePool};
use proptest::prelude::*;

fn name() -> impl Strategy<Value = String> {
    prop_oneof!["[A-Za-z][A-Za-z0-9_]{0,8}", "[ -~]{1,10}", "[a-zé ü'\"%,{}?]{1,6}"]
}

fn unique(mut names: Vec<String>, n: usize) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for (i, s) in names.drain(..).enumerate() {
        if out.contains(&s) {
            out.push(format!("{s}#{i}"));
        } else {
            out.push(s);
        }
        if out.len() == n {
            break;
        }
    }
    out
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        (-1000i32..1000).prop_map(|i| i as f64 / 8.0),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE / 4.0),
    ]
}

/// Random dataset: kinds, names, categories, rows with missing values.
fn arbitrary_dataset() -> impl Strategy<Value = Dataset> {
    (1usize..5, prop::collection::vec(any::<bool>(), 5), prop::collection::vec(name(), 30), 0usize..12, any::<u64>())
        .prop_flat_map(|(preds, kinds, names, rows, salt)| {
            let names = unique(names, 30);
            let mut attrs = Vec::new();
            for i in 0..preds {
                let n = names[i].clone();
                if kinds[i] {
                    attrs.push(Attribute::numeric(n));
                } else {
                    attrs.push(Attribute::nominal(n, names[10 + 3 * i..13 + 3 * i].to_vec()));
                }
            }
            attrs.push(Attribute::nominal(names[5].clone(), names[25..28].to_vec()));
            let schema = Schema::new(attrs, preds).unwrap();
            let row = schema
                .attributes()
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let missing = if i == preds { Just(false).boxed() } else { prop::bool::weighted(0.1).boxed() };
                    let value = if a.is_numeric() {
                        finite().prop_map(Value::Numeric).boxed()
                    } else {
                        (0..a.categories().len()).prop_map(Value::Nominal).boxed()
                    };
                    (missing, value).prop_map(|(m, v)| if m { Value::Missing } else { v }).boxed()
                })
                .collect::<Vec<_>>();
            let relation = format!("rel {salt}");
            prop::collection::vec(row, rows)
                .prop_map(move |rows| Dataset::new(relation.clone(), schema.clone(), rows).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn arff_round_trip_is_bit_exact(d in arbitrary_dataset()) {
        let text = write_arff(&d);
        let back = parse_arff(&text).unwrap();
        prop_assert!(back.bit_eq(&d), "{}", text);
        prop_assert_eq!(back.schema().fingerprint(), d.schema().fingerprint());
        prop_assert_eq!(write_arff(&back), text);
    }

    #[test]
    fn fitness_law(a in 0.0f64..=1.0, b in 0.0f64..=1.0, s in 1usize..500, t in 1usize..500, x in 1.0f64..1e6) {
        let reference = |acc: f64, size: usize| acc * acc / (1.0 + (size * size) as f64 / x);
        let fa = fitness_from(a, s, x);
        prop_assert!((fa - reference(a, s)).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&fa));
        prop_assert_eq!(fitness_from(0.0, s, x), 0.0);
        if a > 0.0 && s != t {
            let (small, large) = (s.min(t), s.max(t));
            prop_assert!(fitness_from(a, small, x) > fitness_from(a, large, x));
        }
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!(fitness_from(hi, s, x) > fitness_from(lo, s, x));
        }
    }

    #[test]
    fn random_tree_shape(seed in any::<u64>(), depth in 0usize..8) {
        let s = common::schema(2, 2, 3);
        let mut rng = Stream::new(seed);
        let d = common::dataset(&s, 20, &mut rng);
        let pool = ValuePool::from_dataset(&d);
        let t = common::random_tree(&s, &pool, &mut rng, depth);
        prop_assert_eq!(t.size() % 2, 1);
        prop_assert!(t.height() <= (t.size() - 1) / 2);
        prop_assert!(t.height() <= depth);
        prop_assert_eq!(t.rules().len(), t.size().div_ceil(2));
    }

    #[test]
    fn evolution_invariants(seed in any::<u64>(), pop in 2usize..25, gens in 0usize..15, rf in 0.05f64..1.0) {
        let s = common::schema(2, 1, 3);
        let mut rng = Stream::new(seed);
        let d = common::dataset(&s, 30, &mut rng);
        let cfg = EvolutionConfig {
            population_size: pop,
            generations: gens,
            replacement_fraction: rf,
            seed,
            ..Default::default()
        };
        let mut history = Vec::new();
        let out = evolve(&cfg, &d, None, &SequentialEvaluator, |g| history.push(g.clone())).unwrap();
        prop_assert_eq!(history.len(), gens + 1);
        prop_assert_eq!(&out.history, &history);
        for (i, g) in history.iter().enumerate() {
            prop_assert_eq!(g.generation, i);
            prop_assert!(g.avg_fitness <= g.best_fitness);
            if i > 0 {
                prop_assert!(g.best_fitness >= history[i - 1].best_fitness);
            }
            prop_assert!(g.test_accuracy.is_none());
        }
        let best = history.iter().map(|g| g.best_fitness).fold(f64::MIN, f64::max);
        prop_assert_eq!(out.best_fitness, best);
        prop_assert_eq!(common::recount_accuracy(&out.best, &d), history.iter().find(|g| g.best_fitness == best).unwrap().best_train_accuracy);
    }
}
