use proptest::prelude::*;

use rbb::corpus::{self, alphabet, FormulaGen, MODEL_CLASSES};
use rbb::parser::print;
use rbb::semantics::{extension, model_from_json, model_to_json, validate_model};
use rbb::syntax::Formula;
use rbb::theory::{check_tautology, match_axiom, SchemeId, TheoryKind};

fn kind() -> impl Strategy<Value = TheoryKind> {
    prop::sample::select(TheoryKind::ALL.to_vec())
}

fn model_kind() -> impl Strategy<Value = TheoryKind> {
    prop::sample::select(MODEL_CLASSES.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>(), k in kind(), r in 1usize..=3, p in 1usize..=3, depth in 0usize..7) {
        let cfg = alphabet(k, r, p);
        let f = FormulaGen::new(&cfg).formula(&mut corpus::rng(seed), depth);
        let text = print(&f);
        prop_assert_eq!(cfg.parse(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn sampled_models_validate_and_round_trip(seed in any::<u64>(), k in model_kind()) {
        for (cfg, m) in corpus::model_corpus(k, 3, 4, seed).unwrap() {
            prop_assert!(validate_model(&m, &cfg).unwrap().is_empty());
            let back = model_from_json(&model_to_json(&m)).unwrap();
            prop_assert_eq!(model_to_json(&back), model_to_json(&m));
        }
    }

    #[test]
    fn negation_complements_and_disjunction_unites(seed in any::<u64>(), k in model_kind()) {
        let mut rng = corpus::rng(seed);
        for (cfg, m) in corpus::model_corpus(k, 2, 4, seed).unwrap() {
            let gen = FormulaGen::new(&cfg);
            let (a, b) = (gen.formula(&mut rng, 3), gen.formula(&mut rng, 3));
            let ea = extension(&m, &a, &cfg).unwrap();
            let eb = extension(&m, &b, &cfg).unwrap();
            prop_assert_eq!(extension(&m, &Formula::not(a.clone()), &cfg).unwrap(), ea.complement(m.len()));
            prop_assert_eq!(extension(&m, &Formula::or(a, b), &cfg).unwrap(), ea.union(eb));
        }
    }

    #[test]
    fn axiom_instances_are_recognised(seed in any::<u64>(), k in model_kind()) {
        let cfg = alphabet(k, 2, 2);
        for scheme in cfg.enabled_schemes() {
            for f in corpus::axiom_corpus(&cfg, scheme, 4, seed).unwrap() {
                prop_assert!(match_axiom(&f, &cfg).is_some(), "{}: {}", scheme, print(&f));
                if scheme == SchemeId::Cl {
                    prop_assert_eq!(check_tautology(&f), Ok(true));
                }
            }
        }
    }

    #[test]
    fn axiom_instances_hold_on_sampled_models(seed in any::<u64>(), k in model_kind()) {
        for (cfg, m) in corpus::model_corpus(k, 4, 4, seed).unwrap() {
            for scheme in cfg.enabled_schemes() {
                let Ok(fs) = corpus::axiom_corpus(&cfg, scheme, 3, seed) else { continue };
                for f in fs {
                    prop_assert_eq!(extension(&m, &f, &cfg).unwrap(), m.all(), "{}", print(&f));
                }
            }
        }
    }
}

#[test]
fn support_binds_tighter_than_implication() {
    let cfg = alphabet(TheoryKind::Rbb, 1, 2);
    let f = cfg.parse("r:p -> q").unwrap();
    let (lhs, _) = f.as_implies().unwrap();
    assert_eq!(print(lhs), "r:p");
}
