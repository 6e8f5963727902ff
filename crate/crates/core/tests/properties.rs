use ers_core::framework::FrameworkDefinition;
use ers_core::{
    builtin_ers_v1, evaluate, parse_formula, print_formula, Audit, Engine, QuestionTag, ScoringMode, ValueEnv, Weight,
};
use proptest::prelude::*;
use std::sync::{Arc, OnceLock};

fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(|| Engine::new(builtin_ers_v1(ScoringMode::Literal)).unwrap())
}

fn arb_mode() -> impl Strategy<Value = ScoringMode> {
    prop_oneof![Just(ScoringMode::Literal), Just(ScoringMode::Gated)]
}

fn arb_audit() -> impl Strategy<Value = Audit> {
    prop::collection::vec(any::<bool>(), 23).prop_map(|picks| {
        let fw = engine().framework();
        let mut audit = Audit::draft(fw);
        for (q, yes) in fw.questions.iter().zip(picks) {
            audit.answers.insert(q.tag, if yes { "yes" } else { "no" }.to_string());
        }
        audit
    })
}

/// Random bindings drawn from each question's option values.
fn arb_env(fw: &'static FrameworkDefinition) -> impl Strategy<Value = ValueEnv> {
    prop::collection::vec((any::<bool>(), any::<bool>()), fw.questions.len()).prop_map(move |picks| {
        let mut env = ValueEnv::new();
        for (q, (pick, gate)) in fw.questions.iter().zip(picks) {
            env.score_values.insert(q.tag, q.options[usize::from(pick)].value);
            env.gate_values.insert(q.tag, gate);
        }
        env
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn raising_one_binding_never_lowers_a_dimension(
        env in arb_env(engine().framework()),
        which in 0usize..23,
        bump in 1u64..3_000_000,
        mode in arb_mode(),
    ) {
        let fw = engine().framework();
        let tag = fw.questions[which].tag;
        let mut raised_score = env.clone();
        let v = raised_score.score_values[&tag];
        raised_score.score_values.insert(tag, Weight::from_scaled(v.scaled() + bump));
        let mut opened_gate = env.clone();
        opened_gate.gate_values.insert(tag, true);
        for d in &fw.dimensions {
            let formula = fw.effective_formula(d, mode);
            // arbitrary bumps may leave the six-digit grid; skip those
            let Ok(before) = evaluate(&formula, &env) else { continue };
            if let Ok(after) = evaluate(&formula, &raised_score) {
                prop_assert!(after >= before, "{} fell when raising {}", d.symbol, tag);
            }
            if let Ok(after) = evaluate(&formula, &opened_gate) {
                prop_assert!(after >= before, "{} fell when opening {}", d.symbol, tag);
            }
        }
    }

    #[test]
    fn literal_answer_raising_value_never_lowers_a_dimension(audit in arb_audit(), which in 0usize..23) {
        let e = engine();
        let q = &e.framework().questions[which];
        let current = q.option(&audit.answers[&q.tag]).unwrap().value;
        let Some(higher) = q.options.iter().find(|o| o.value > current) else { return Ok(()) };
        let base = e.score_in_mode(&audit, ScoringMode::Literal).unwrap();
        let raised = e.score_in_mode(&audit.with_answer(q.tag, higher.key.clone()), ScoringMode::Literal).unwrap();
        for (sym, before) in &base.dimension_scores {
            prop_assert!(raised.dimension_scores[sym] >= *before);
        }
        prop_assert!(raised.total >= base.total);
        prop_assert!(raised.normalized >= base.normalized);
    }

    #[test]
    fn whatif_variant_equals_fresh_score(audit in arb_audit(), which in 0usize..23, yes in any::<bool>(), mode in arb_mode()) {
        let e = engine();
        let tag = e.framework().questions[which].tag;
        let answer = if yes { "yes" } else { "no" };
        let delta = e.what_if(&audit, tag, answer, Some(mode)).unwrap();
        let fresh = e.score_in_mode(&audit.with_answer(tag, answer), mode).unwrap();
        prop_assert_eq!(&delta.variant, &fresh);
        prop_assert_eq!(&delta.base, &e.score_in_mode(&audit, mode).unwrap());
        let recomputed = delta.base.total.delta_to(fresh.total);
        prop_assert_eq!(delta.total_delta, recomputed);
    }

    #[test]
    fn normalized_stays_within_target(audit in arb_audit(), mode in arb_mode()) {
        let r = engine().score_in_mode(&audit, mode).unwrap();
        prop_assert!(r.total <= r.max_possible_total);
        prop_assert!(r.normalized <= r.target_max);
    }

    #[test]
    fn scoring_is_deterministic_and_pure(audit in arb_audit(), mode in arb_mode()) {
        let before = audit.clone();
        let a = engine().score_in_mode(&audit, mode).unwrap();
        let b = engine().score_in_mode(&audit, mode).unwrap();
        prop_assert_eq!(&audit, &before);
        prop_assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
    }
}

#[test]
fn builtin_formulas_round_trip_through_the_printer() {
    let fw = builtin_ers_v1(ScoringMode::Literal);
    for d in &fw.dimensions {
        for mode in ScoringMode::ALL {
            let f = fw.effective_formula(d, mode);
            assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f);
        }
    }
}

#[test]
fn framework_json_round_trip_preserves_scores() {
    let fw = builtin_ers_v1(ScoringMode::Literal);
    let reloaded = FrameworkDefinition::from_json(&fw.to_json_pretty()).unwrap();
    assert_eq!(reloaded, fw);
    let e = Engine::new(reloaded).unwrap();
    let audit = ers_core::samples::beta_ltd();
    assert_eq!(e.score(&audit).unwrap(), engine().score(&audit).unwrap());
}

#[test]
fn concurrent_scoring_agrees() {
    let e = Arc::new(Engine::new(builtin_ers_v1(ScoringMode::Gated)).unwrap());
    let audit = ers_core::samples::beta_ltd();
    let expected = e.score(&audit).unwrap();
    let handles: Vec<_> = (0..8)
        .map(|i| {
            let e = Arc::clone(&e);
            let audit = audit.with_answer(QuestionTag::new(1, 1), if i % 2 == 0 { "yes" } else { "no" });
            std::thread::spawn(move || e.score(&audit).unwrap())
        })
        .collect();
    for (i, h) in handles.into_iter().enumerate() {
        let r = h.join().unwrap();
        if i % 2 == 0 {
            assert_eq!(r, expected);
        }
    }
}
