mod common;

use std::collections::HashMap;

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use predltl::automata::{
    accepts, contract, export_hoa, import_hoa_named, translate, Component, EpsilonPolicy,
};
use predltl::curriculum::{sample_batch, Curriculum, PropositionRegime};
use predltl::envs::{
    ColorSpace, EnvKind, Environment, FalloutConfig, FalloutState, FalloutWorld, RgbZoneConfig,
    RgbZoneEnv, ScriptedEnv,
};
use predltl::policies::shortest_path;
use predltl::runtime::{ProductState, Task};
use predltl::taskseq::{accepting_paths, Reach, TrainingTask};
use predltl::{
    lasso_satisfies, parse_ltl, Assignment, BooleanFormula, LassoWord, LtlFormula,
    PredicateInstance, Signature,
};

fn atom() -> impl Strategy<Value = LtlFormula> {
    prop_oneof![
        Just(LtlFormula::prop("a")),
        Just(LtlFormula::prop("b")),
        (0usize..21, 0usize..21).prop_map(|(x, y)| LtlFormula::atom(
            PredicateInstance::parse_free("loc", &[x as f64, y as f64]).unwrap()
        )),
        (0u32..=10).prop_map(|t| LtlFormula::atom(
            PredicateInstance::parse_free("rad", &[t as f64 / 10.0]).unwrap()
        )),
    ]
}

fn formula_over(leaf: BoxedStrategy<LtlFormula>, depth: u32) -> impl Strategy<Value = LtlFormula> {
    let leaf = prop_oneof![1 => Just(LtlFormula::True), 6 => leaf];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(LtlFormula::not),
            inner.clone().prop_map(LtlFormula::next),
            inner.clone().prop_map(LtlFormula::eventually),
            inner.clone().prop_map(LtlFormula::always),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.until(b)),
        ]
    })
}

fn ab_formula(depth: u32) -> impl Strategy<Value = LtlFormula> {
    formula_over(
        prop_oneof![Just(LtlFormula::prop("a")), Just(LtlFormula::prop("b"))].boxed(),
        depth,
    )
}

fn letter() -> impl Strategy<Value = Assignment> {
    prop_oneof![
        Just(Assignment::empty()),
        Just(Assignment::singleton(PredicateInstance::prop("a"))),
        Just(Assignment::singleton(PredicateInstance::prop("b"))),
    ]
}

fn lasso(max_prefix: usize, max_cycle: usize) -> impl Strategy<Value = LassoWord> {
    (
        prop::collection::vec(letter(), 0..=max_prefix),
        prop::collection::vec(letter(), 1..=max_cycle),
    )
        .prop_map(|(p, c)| LassoWord::new(p, c).unwrap())
}

fn restrict(w: &LassoWord, f: &LtlFormula) -> LassoWord {
    let aps: Vec<_> = f.atoms().into_iter().collect();
    LassoWord::new(
        w.prefix().iter().map(|s| s.restrict(&aps)).collect(),
        w.cycle().iter().map(|s| s.restrict(&aps)).collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_formulae_parse_back(f in formula_over(atom().boxed(), 4)) {
        let text = f.to_string();
        prop_assert_eq!(parse_ltl(&text, &Signature::permissive()).unwrap(), f);
    }

    #[test]
    fn normalization_preserves_meaning(f in ab_formula(4), w in lasso(3, 3)) {
        prop_assert_eq!(lasso_satisfies(&w, &f.normalize()), lasso_satisfies(&w, &f));
    }

    #[test]
    fn lasso_semantics_ignore_unrolling(f in ab_formula(4), w in lasso(3, 3), rot in 0usize..3) {
        let mut prefix = w.prefix().to_vec();
        prefix.extend(w.cycle().iter().take(rot % w.cycle().len()).cloned());
        let mut cycle: Vec<_> = w.cycle().iter().skip(rot % w.cycle().len()).cloned().collect();
        cycle.extend(w.cycle().iter().take(rot % w.cycle().len()).cloned());
        let doubled: Vec<_> = cycle.iter().chain(&cycle).cloned().collect();
        let shifted = LassoWord::new(prefix, doubled).unwrap();
        prop_assert_eq!(lasso_satisfies(&shifted, &f), lasso_satisfies(&w, &f));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn translation_matches_semantics(f in ab_formula(3), words in prop::collection::vec(lasso(3, 3), 8)) {
        let b = translate(&f).unwrap();
        for w in &words {
            let w = restrict(w, &f);
            prop_assert_eq!(accepts(&b, &w, EpsilonPolicy::Existential).unwrap(), lasso_satisfies(&w, &f), "{} on {:?}", f, w);
        }
    }

    #[test]
    fn contraction_preserves_language(f in ab_formula(3), words in prop::collection::vec(lasso(3, 3), 8)) {
        let b = translate(&f).unwrap();
        let c = contract(&b);
        prop_assert!(c.num_states() <= b.num_states());
        prop_assert!(c.epsilon_edges().len() <= b.epsilon_edges().len());
        for w in &words {
            let w = restrict(w, &f);
            prop_assert_eq!(
                accepts(&c, &w, EpsilonPolicy::Existential).unwrap(),
                accepts(&b, &w, EpsilonPolicy::Existential).unwrap()
            );
        }
    }

    #[test]
    fn hoa_round_trip(seed in any::<u64>()) {
        let b = common::random_ldba(&mut ChaCha8Rng::seed_from_u64(seed), 6, 2);
        let again = import_hoa_named(&export_hoa(&b), true).unwrap();
        prop_assert_eq!(again.num_states(), b.num_states());
        prop_assert_eq!(again.initial(), b.initial());
        prop_assert_eq!(again.epsilon_edges(), b.epsilon_edges());
        for q in b.states() {
            prop_assert_eq!(again.row(q), b.row(q));
            prop_assert_eq!(again.is_accepting(q), b.is_accepting(q));
            // The import infers the smallest deterministic part, which may shrink it.
            if again.component(q) == Component::Accepting {
                prop_assert_eq!(b.component(q), Component::Accepting);
            }
        }
    }

    #[test]
    fn returned_paths_are_runs_that_close_on_acceptance(seed in any::<u64>()) {
        let b = common::random_ldba(&mut ChaCha8Rng::seed_from_u64(seed), 6, 2);
        for p in accepting_paths(&b, b.initial()) {
            prop_assert_eq!(p.states[0], b.initial());
            prop_assert!(p.last_accepting.is_some_and(|l| p.loopback <= l && b.is_accepting(p.states[l])));
            let mut seen = std::collections::HashSet::new();
            prop_assert!(p.states.iter().all(|s| seen.insert(*s)), "states repeat");
        }
    }

    #[test]
    fn epsilon_offers_match_the_automaton(seed in any::<u64>(), word in prop::collection::vec(0usize..3, 0..6)) {
        let b = common::random_ldba(&mut ChaCha8Rng::seed_from_u64(seed), 6, 2);
        let mut env = ScriptedEnv::new(b.alphabet().aps().to_vec(), Assignment::empty());
        let task = Task::Automaton(&b);
        let mut ps = ProductState::init(&env, task).unwrap();
        for i in word {
            let q = ps.ldba_state.unwrap();
            let expected: Vec<usize> = b.epsilon_from(q).map(|(id, _)| id).collect();
            prop_assert_eq!(ps.available_epsilon(task), expected);
            let letters = env.letters();
            let a = letters[i % letters.len()].clone();
            predltl::runtime::step_product(&mut ps, &predltl::runtime::ProductAction::Env(a), &mut env, task).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rgb_labels_name_at_most_one_zone(seed in any::<u64>(), pts in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 32)) {
        let env = RgbZoneEnv::reset(&RgbZoneConfig::default(), seed, 0, &ColorSpace::Continuous).unwrap();
        for (x, y) in pts {
            prop_assert!(env.label_at([x, y]).len() <= 1);
        }
        for z in &env.state().zones {
            prop_assert_eq!(env.label_at(z.center).len(), 1);
        }
    }

    #[test]
    fn fallout_resets_are_valid_and_reproducible(seed in any::<u64>(), x in 0usize..21, y in 0usize..21, t in 2u32..=8) {
        let atoms = vec![
            PredicateInstance::parse_free("loc", &[x as f64, y as f64]).unwrap(),
            PredicateInstance::parse_free("rad", &[t as f64 / 10.0]).unwrap(),
        ];
        let cfg = FalloutConfig::default();
        match FalloutWorld::reset(&cfg, seed, &atoms) {
            Ok(w) => {
                prop_assert!(w.is_valid());
                let again = FalloutWorld::reset(&cfg, seed, &atoms).unwrap();
                prop_assert_eq!(again.state(), w.state());
                let restored = FalloutWorld::restore(&cfg, &w.snapshot()).unwrap();
                prop_assert!(restored.is_valid());
                prop_assert_eq!(restored.state(), w.state());
                prop_assert!(w.state().field.iter().all(|v| (0.0..=1.0).contains(v)));
            }
            Err(e) => { let ok = matches!(e, predltl::Error::SamplingBudgetExhausted { .. }); prop_assert!(ok, "{}", e) }
        }
    }

    #[test]
    fn planner_paths_are_shortest(seed in any::<u64>(), gx in 0usize..21, gy in 0usize..21, t in 2u32..=8) {
        let cfg = FalloutConfig::default();
        let rad = PredicateInstance::parse_free("rad", &[t as f64 / 10.0]).unwrap();
        let goal = PredicateInstance::parse_free("loc", &[gx as f64, gy as f64]).unwrap();
        let Ok(w) = FalloutWorld::reset(&cfg, seed, &[goal.clone(), rad.clone()]) else { return Ok(()) };
        let st: &FalloutState = w.state();
        let n = st.size;
        let safe = |c: (usize, usize)| !BooleanFormula::Atom(rad.clone()).eval(&w.label_at(c));
        let mut g = UnGraph::<(usize, usize), u32>::new_undirected();
        let mut ix: HashMap<(usize, usize), NodeIndex> = HashMap::new();
        for c in st.cells().filter(|&c| safe(c)) {
            ix.insert(c, g.add_node(c));
        }
        for (&c, &i) in &ix {
            for d in [(c.0 + 1, c.1), (c.0, c.1 + 1)] {
                if d.0 < n && d.1 < n {
                    if let Some(&j) = ix.get(&d) {
                        g.add_edge(i, j, 1);
                    }
                }
            }
        }
        let dist = dijkstra(&g, ix[&st.agent], Some(ix[&(gx, gy)]), |e| *e.weight());
        let path = shortest_path(&w, &BooleanFormula::Atom(goal), &BooleanFormula::Atom(rad)).unwrap();
        prop_assert_eq!(path.len() as u32 - 1, dist[&ix[&(gx, gy)]]);
        prop_assert!(path.windows(2).all(|p| p[0].0.abs_diff(p[1].0) + p[0].1.abs_diff(p[1].1) == 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn curriculum_draws_fit_their_stage(seed in any::<u64>(), stage in 0usize..7, fallout in any::<bool>()) {
        let env = if fallout { EnvKind::Fallout } else { EnvKind::RgbZone };
        let c = Curriculum::builtin(env);
        for (entry, task) in sample_batch(&c, stage, PropositionRegime::TrainingGrid, 16, seed).unwrap() {
            let e = &c.stages[stage].entries[entry];
            match task {
                TrainingTask::ReachAvoid(s) => {
                    prop_assert!(e.n.contains(s.len()));
                    for step in &s.steps {
                        let Reach::Formula(r) = &step.reach else { panic!("training steps are formulae") };
                        prop_assert!(e.reach.unwrap().contains(r.atoms().len()));
                        let others = step.avoid.atoms().iter().filter(|p| p.name() != "rad").count();
                        prop_assert!(e.avoid.unwrap().contains(others));
                    }
                }
                TrainingTask::ReachStay(s) => prop_assert_eq!(s.hold_steps, e.n.lo),
            }
        }
    }
}
