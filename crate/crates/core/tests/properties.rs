use netinfer_core::chf::chf_allbutk;
use netinfer_core::io::{parse_examples, parse_transform_csv, write_examples, write_transform_csv, ExamplesFile};
use netinfer_core::oracle::oracle_examples;
use netinfer_core::{
    apply_protocol, is_feasible, matching_transform, waterfall, Example, InfluencerSet, Label, Labelling, Protocol,
    TieBreak, WaterfallConfig,
};
use proptest::prelude::*;

fn labelling(n: usize) -> impl Strategy<Value = Labelling> {
    proptest::collection::vec(any::<bool>(), n)
        .prop_map(|v| Labelling::new(v.into_iter().map(|d| if d { Label::Disagree } else { Label::Agree }).collect()))
}

fn examples(n: usize) -> impl Strategy<Value = Vec<Example>> {
    proptest::collection::vec((labelling(n), any::<bool>()).prop_map(|(l, c)| Example::new(l, c)), 0..12)
}

fn sized_examples() -> impl Strategy<Value = (usize, Vec<Example>)> {
    (1usize..9).prop_flat_map(|n| (Just(n), examples(n)))
}

fn subset(n: usize) -> impl Strategy<Value = InfluencerSet> {
    proptest::collection::vec(any::<bool>(), n)
        .prop_map(|v| v.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j).collect())
}

fn protocol() -> impl Strategy<Value = Protocol> {
    prop_oneof![
        (0u32..3).prop_map(|kappa| Protocol::AllButK { kappa }),
        (0u32..3).prop_map(|tau| Protocol::TauMargin { tau }),
    ]
}

fn oracle_case() -> impl Strategy<Value = (usize, InfluencerSet, Vec<Labelling>, Protocol)> {
    (1usize..9).prop_flat_map(|n| {
        (
            Just(n),
            subset(n),
            proptest::collection::vec(labelling(n), 0..16),
            protocol(),
        )
    })
}

proptest! {
    #[test]
    fn transform_round_trips_to_examples((n, ex) in sized_examples()) {
        let m = matching_transform(n, &ex).unwrap();
        prop_assert_eq!(m.to_examples(), ex);
    }

    #[test]
    fn transform_csv_round_trip((n, ex) in sized_examples()) {
        let m = matching_transform(n, &ex).unwrap();
        prop_assert_eq!(parse_transform_csv(&write_transform_csv(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn examples_json_round_trip((n, ex) in sized_examples()) {
        let file = ExamplesFile::new(n, ex).unwrap();
        prop_assert_eq!(parse_examples(&write_examples(&file).unwrap()).unwrap(), file);
    }

    #[test]
    fn true_influencers_explain_oracle_data((n, truth, ls, protocol) in oracle_case()) {
        let ex = oracle_examples(&truth, protocol, &ls).unwrap();
        let m = matching_transform(n, &ex).unwrap();
        prop_assert!(is_feasible(&m, &truth, protocol));
    }

    #[test]
    fn feasibility_matches_protocol_verdicts((n, ex) in sized_examples(), p in protocol(), bits in any::<u16>()) {
        let set = InfluencerSet::from_mask(u64::from(bits) & ((1 << n) - 1));
        let m = matching_transform(n, &ex).unwrap();
        let direct = ex.iter().all(|e| apply_protocol(p, &e.labelling, &set).unwrap() == e.changed);
        prop_assert_eq!(is_feasible(&m, &set, p), direct);
    }

    #[test]
    fn waterfall_never_returns_inconsistent_sets((n, ex) in sized_examples(), tau in 0u32..3, seed in any::<u64>()) {
        let m = matching_transform(n, &ex).unwrap();
        for tie_break in [TieBreak::UniformRandom { seed }, TieBreak::Filters, TieBreak::FirstIndex] {
            let config = WaterfallConfig { tau, tie_break, source_order: None };
            let result = waterfall(&m, &config).unwrap();
            let margin = Protocol::TauMargin { tau };
            if let Some(f) = result.influencers() {
                prop_assert!(is_feasible(&m, f, margin));
            }
        }
    }

    #[test]
    fn waterfall_finds_oracle_sets_on_small_inputs((n, truth, ls, _) in oracle_case(), seed in any::<u64>()) {
        // two or fewer true influencers are always recovered
        prop_assume!(truth.len() <= 2);
        let ex = oracle_examples(&truth, Protocol::MAJORITY, &ls).unwrap();
        let m = matching_transform(n, &ex).unwrap();
        let result = waterfall(&m, &WaterfallConfig::majority(TieBreak::UniformRandom { seed })).unwrap();
        prop_assert!(result.is_found());
    }

    #[test]
    fn allbutk_chf_is_consistent_and_small((n, truth, ls, _) in oracle_case(), kappa in 0u32..3) {
        let protocol = Protocol::AllButK { kappa };
        let ex = oracle_examples(&truth, protocol, &ls).unwrap();
        let m = matching_transform(n, &ex).unwrap();
        let found = chf_allbutk(&m, kappa, None).unwrap();
        prop_assert!(is_feasible(&m, &found, protocol));
        prop_assert!(found.len() <= truth.len());
    }
}
