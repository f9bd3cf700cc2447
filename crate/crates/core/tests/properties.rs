mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use common::brute_force_cycles;
use procmap::discovery::filter_elements;
use procmap::metastates::{find_states, rebuild_log, states_in_model};
use procmap::optimizer::{evaluate_point, grid_search};
use procmap::quality::{GraphCounts, Replayer};
use procmap::{
    compute_significance, cycles_search, discover, parse_log, EventLog, LogFormat, Measure, Node,
    ObjectiveConfig, RateParams,
};

fn arb_log(max_traces: usize, max_len: usize, alphabet: u8) -> impl Strategy<Value = EventLog> {
    prop::collection::vec(
        prop::collection::vec(0..alphabet, 1..=max_len),
        1..=max_traces,
    )
    .prop_map(|traces| {
        let seqs: Vec<Vec<String>> = traces
            .into_iter()
            .map(|t| {
                t.into_iter()
                    .map(|c| ((b'A' + c) as char).to_string())
                    .collect()
            })
            .collect();
        EventLog::from_sequences(&seqs).unwrap()
    })
}

fn arb_rate() -> impl Strategy<Value = f64> {
    (0u32..=20).prop_map(|r| f64::from(r * 5))
}

fn case_count<T: Ord>(sets: impl Iterator<Item = BTreeSet<T>>) -> BTreeMap<T, usize> {
    let mut out = BTreeMap::new();
    for set in sets {
        for x in set {
            *out.entry(x).or_insert(0) += 1;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip(log in arb_log(20, 10, 5)) {
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let back = parse_log(buf.as_slice(), &LogFormat::default()).unwrap();
        prop_assert_eq!(back, log);
    }

    #[test]
    fn log_counts_match_recount(log in arb_log(20, 10, 6)) {
        let alphabet: BTreeSet<&str> =
            log.traces().iter().flat_map(|t| t.events.iter().map(String::as_str)).collect();
        let pairs: BTreeSet<(&str, &str)> = log
            .traces()
            .iter()
            .flat_map(|t| t.events.windows(2).map(|w| (w[0].as_str(), w[1].as_str())))
            .collect();
        prop_assert_eq!(log.num_unique_activities(), alphabet.len());
        prop_assert_eq!(log.num_unique_transitions(), pairs.len());
        prop_assert_eq!(
            log.total_events(),
            log.traces().iter().map(|t| t.len()).sum::<usize>()
        );
    }

    #[test]
    fn significance_matches_recount(log in arb_log(20, 10, 5)) {
        let table = compute_significance(&log).unwrap();
        let k = log.num_traces();
        let acts = case_count(log.traces().iter().map(|t| t.events.iter().cloned().collect()));
        let trans = case_count(log.traces().iter().map(|t| {
            t.events.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
        }));
        prop_assert_eq!(table.activities().len(), acts.len());
        for (a, c) in &acts {
            prop_assert_eq!(table.activities()[a].cases, *c);
            prop_assert!((table.activity_significance(a).unwrap() - *c as f64 / k as f64).abs() < 1e-12);
        }
        prop_assert_eq!(table.transitions().len(), trans.len());
        for ((u, v), c) in &trans {
            let f = &table.transitions()[&(u.clone(), v.clone())];
            prop_assert_eq!(f.cases, *c);
            // a transition's cases contain both of its activities
            prop_assert!(f.cases <= acts[u].min(acts[v]));
        }
    }

    #[test]
    fn duplicating_traces_keeps_significance(log in arb_log(15, 8, 5)) {
        let seqs: Vec<Vec<String>> = log
            .traces()
            .iter()
            .flat_map(|t| [t.events.clone(), t.events.clone()])
            .collect();
        let doubled = EventLog::from_sequences(&seqs).unwrap();
        let a = compute_significance(&log).unwrap();
        let b = compute_significance(&doubled).unwrap();
        for act in a.activities().keys() {
            prop_assert_eq!(a.activity_significance(act), b.activity_significance(act));
        }
        for (u, v) in a.transitions().keys() {
            prop_assert_eq!(a.transition_significance(u, v), b.transition_significance(u, v));
        }
    }

    #[test]
    fn filtering_is_monotone(log in arb_log(20, 10, 6), ra in arb_rate(), rt in arb_rate()) {
        let table = compute_significance(&log).unwrap();
        let base = filter_elements(&table, RateParams::new(ra, rt).unwrap());
        if ra < 100.0 {
            let more = filter_elements(&table, RateParams::new(ra + 5.0, rt).unwrap());
            prop_assert!(base.nodes.is_subset(&more.nodes));
            prop_assert!(base.edges.is_subset(&more.edges));
        }
        if rt < 100.0 {
            let more = filter_elements(&table, RateParams::new(ra, rt + 5.0).unwrap());
            prop_assert!(base.edges.is_subset(&more.edges));
        }
    }

    #[test]
    fn discovered_models_are_connected(log in arb_log(25, 10, 6), ra in arb_rate(), rt in arb_rate()) {
        let params = RateParams::new(ra, rt).unwrap();
        let model = discover(&log, params).unwrap();
        prop_assert!(model.num_activity_nodes() > 0);
        prop_assert!(model.unreachable_nodes().is_empty());
        // repair only adds edges
        let filtered = filter_elements(&compute_significance(&log).unwrap(), params);
        if filtered.nodes.len() == model.num_activity_nodes() {
            for e in &filtered.edges {
                prop_assert!(model.edges().contains_key(e));
            }
            for (e, info) in model.edges() {
                prop_assert_eq!(info.repair, !filtered.edges.contains(e));
            }
        }
        prop_assert_eq!(&model, &discover(&log, params).unwrap());
    }

    #[test]
    fn fitness_is_bounded_and_edges_never_hurt(
        log in arb_log(20, 10, 5),
        ra in arb_rate(),
        rt in arb_rate(),
        pick in any::<prop::sample::Index>(),
    ) {
        let model = discover(&log, RateParams::new(ra, rt).unwrap()).unwrap();
        let n = log.num_unique_activities();
        let replayer = Replayer::for_model(&model, n).unwrap();
        let f = replayer.fitness(&log).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));

        let mut candidates: Vec<(Node, Node)> = Vec::new();
        let labels: Vec<Node> = model.nodes().keys().map(|l| Node::activity(l.as_str())).collect();
        for u in std::iter::once(Node::Start).chain(labels.iter().cloned()) {
            for v in labels.iter().cloned().chain(std::iter::once(Node::End)) {
                if !model.has_edge(&u, &v) {
                    candidates.push((u.clone(), v));
                }
            }
        }
        if !candidates.is_empty() {
            let extra = &candidates[pick.index(candidates.len())];
            let edges = model.edges().keys().map(|(u, v)| (u, v)).chain([(&extra.0, &extra.1)]);
            let wider = Replayer::new(
                model.nodes().keys().map(String::as_str),
                edges,
                model.num_activity_nodes(),
                n,
            )
            .unwrap();
            prop_assert!(wider.fitness(&log).unwrap() >= f);
        }
    }

    #[test]
    fn cycles_match_brute_force(log in arb_log(12, 9, 4)) {
        let expected = brute_force_cycles(
            &log.traces().iter().map(|t| t.events.clone()).collect::<Vec<_>>(),
        );
        let found: BTreeMap<Vec<String>, (usize, usize)> = cycles_search(&log)
            .counts()
            .iter()
            .map(|(b, f)| (b.clone(), (f.total, f.cases)))
            .collect();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn meta_states_antitone_in_threshold(log in arb_log(25, 12, 5), a in 1u32..=20, b in 1u32..=20) {
        let (lo, hi) = (f64::from(a.min(b)) / 20.0, f64::from(a.max(b)) / 20.0);
        let cycles = cycles_search(&log);
        let bodies = |t: f64| -> BTreeSet<Vec<String>> {
            find_states(&cycles.cycles(), log.num_traces(), t)
                .into_iter()
                .map(|s| s.cycle.body)
                .collect()
        };
        prop_assert!(bodies(hi).is_subset(&bodies(lo)));
    }

    #[test]
    fn rebuild_shrinks_and_expands_back(log in arb_log(20, 12, 4), threshold in 1u32..=10) {
        let model = discover(&log, RateParams::full()).unwrap();
        let states = states_in_model(&cycles_search(&log), &model, f64::from(threshold) / 10.0);
        let rebuilt = rebuild_log(&log, &states).unwrap();
        let bodies: BTreeMap<String, Vec<String>> =
            states.iter().map(|s| (s.token(), s.body().to_vec())).collect();
        for (orig, new) in log.traces().iter().zip(rebuilt.traces()) {
            prop_assert!(new.len() <= orig.len());
            // every token stands for body^j + body[0]; free events line up
            let mut at = 0;
            for e in &new.events {
                match bodies.get(e) {
                    Some(body) => {
                        let k = body.len();
                        let mut run = 0;
                        while at + run < orig.len() && orig.events[at + run] == body[run % k] {
                            run += 1;
                        }
                        prop_assert!(run > k);
                        let reps = (run - 1) / k;
                        prop_assert!(reps >= 1);
                        at += reps * k + 1;
                    }
                    None => {
                        prop_assert_eq!(e, &orig.events[at]);
                        at += 1;
                    }
                }
            }
            prop_assert_eq!(at, orig.len());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn objective_formula_holds_on_every_cell(log in arb_log(15, 8, 5), measure in 0usize..4) {
        let config = ObjectiveConfig {
            measure: Measure::ALL[measure],
            grid_step: 25,
            ..ObjectiveConfig::default()
        };
        let landscape = grid_search(&log, &config).unwrap();
        prop_assert_eq!(landscape.cells.len(), 25);
        for cell in &landscape.cells {
            let q = (1.0 - config.lambda) * cell.fitness + config.lambda * (1.0 - cell.complexity_scaled);
            prop_assert!((cell.objective - q).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&cell.complexity_scaled));
        }
        let best = landscape.best().objective;
        prop_assert!(landscape.cells.iter().all(|c| c.objective <= best));
        let full = evaluate_point(&log, RateParams::full(), &config).unwrap();
        prop_assert_eq!(full.fitness, 1.0);
        prop_assert_eq!(full.complexity_scaled, 1.0);
    }

    #[test]
    fn measures_ignore_log_base(log in arb_log(20, 10, 6), ra in arb_rate(), rt in arb_rate()) {
        let model = discover(&log, RateParams::new(ra, rt).unwrap()).unwrap();
        let counts = GraphCounts::of_model(&model, &log);
        let full = GraphCounts::of_model(&discover(&log, RateParams::full()).unwrap(), &log);
        let scaled = |base: f64| {
            let j = Measure::Entropy.evaluate_with_base(&counts, base).unwrap();
            let r = Measure::Entropy.evaluate_with_base(&full, base).unwrap();
            if r > 0.0 { (j / r).clamp(0.0, 1.0) } else { f64::NAN }
        };
        let (a, b) = (scaled(2.0), scaled(std::f64::consts::E));
        prop_assert!(a.is_nan() && b.is_nan() || (a - b).abs() < 1e-12);
    }
}
