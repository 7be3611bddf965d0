use proptest::prelude::*;
use stream_scc::ingest::{approximate, ceil_to, floor_to, parse_interactions, ApproxConfig, DeltaConfig, TimeScale};
use stream_scc::metrics::{compare, latencies};
use stream_scc::scc::{run, Algorithm, CountSink};
use stream_scc::stream::{build_stream_labeled, StreamGraph};
use stream_scc::synth::{self, RandomStreamParams};

fn random(seed: u64) -> StreamGraph {
    synth::random_stream(&mut synth::rng(seed), RandomStreamParams { max_segments: 150, ..Default::default() })
}

fn rebuilt(s: &StreamGraph) -> StreamGraph {
    build_stream_labeled(s.labels().to_vec(), s.node_segments().to_vec(), s.link_segments().to_vec(), Some(s.horizon()))
        .unwrap()
}

fn covered_by(inner: &StreamGraph, outer: &StreamGraph) -> bool {
    let (pn, pl) = (outer.presence_by_node(), outer.presence_by_pair());
    inner.node_segments().iter().all(|g| pn[g.node.index()].iter().any(|o| o.covers(&g.interval)))
        && inner
            .link_segments()
            .iter()
            .all(|l| pl.get(&l.pair).is_some_and(|ivs| ivs.iter().any(|o| o.covers(&l.interval))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>()) {
        let s = random(seed);
        prop_assert_eq!(rebuilt(&s), s);
    }

    #[test]
    fn approximation_is_idempotent_and_included(seed in any::<u64>(), step in 1i64..12) {
        let s = random(seed);
        let a = approximate(&s, ApproxConfig { delta: step }).unwrap().stream;
        prop_assert!(covered_by(&a, &s));
        prop_assert_eq!(approximate(&a, ApproxConfig { delta: step }).unwrap().stream, a.clone());
        prop_assert!(a.event_times().iter().all(|t| t.rem_euclid(step) == 0));
        // each rounded event time is the floor or ceiling of an original one
        let orig = s.event_times();
        for t in a.event_times() {
            prop_assert!(orig.iter().any(|&o| ceil_to(o, step) == t || floor_to(o, step) == t));
        }
        prop_assert!(a.event_times().len() <= 2 * orig.len());
    }

    #[test]
    fn nested_steps_give_nested_streams(seed in any::<u64>(), step in 1i64..6, k in 2i64..4) {
        let s = random(seed);
        let fine = approximate(&s, ApproxConfig { delta: step }).unwrap().stream;
        let coarse = approximate(&s, ApproxConfig { delta: step * k }).unwrap().stream;
        prop_assert!(covered_by(&coarse, &fine));
        let r_fine = compare(&s, &fine, u128::MAX).unwrap();
        let r_coarse = compare(&s, &coarse, u128::MAX).unwrap();
        prop_assert!(r_fine.missing_paths <= r_coarse.missing_paths);
    }

    #[test]
    fn interaction_segments_follow_gaps(seed in any::<u64>(), delta in 0i64..15) {
        let mut rng = synth::rng(seed);
        let text = synth::random_interactions(&mut rng, 4, 60, 200);
        let s = parse_interactions(text.as_bytes(), DeltaConfig { delta }, TimeScale::UNIT).unwrap();
        // per pair: one segment plus one per gap larger than δ
        let mut times: std::collections::BTreeMap<(String, String), Vec<i64>> = Default::default();
        for line in text.lines() {
            let f: Vec<&str> = line.split_whitespace().collect();
            let key = if f[0] < f[1] { (f[0].to_owned(), f[1].to_owned()) } else { (f[1].to_owned(), f[0].to_owned()) };
            times.entry(key).or_default().push(f[2].parse().unwrap());
        }
        let expected: usize = times
            .values_mut()
            .map(|t| {
                t.sort();
                1 + t.windows(2).filter(|w| w[1] - w[0] > delta).count()
            })
            .sum();
        prop_assert_eq!(s.link_segments().len(), expected);
        for step in 1..delta.max(1) {
            let a = approximate(&s, ApproxConfig { delta: step }).unwrap();
            prop_assert_eq!((a.dropped_link_segments, a.dropped_node_segments), (0, 0));
            prop_assert_eq!(a.stream.link_segments().len(), s.link_segments().len());
        }
    }

    #[test]
    fn count_bound_holds(seed in any::<u64>()) {
        let s = random(seed);
        let count = run(Algorithm::Direct, &s, &mut CountSink::default()).component_count;
        prop_assert!(count <= s.node_segments().len() + 4 * s.link_segments().len());
    }

    #[test]
    fn approximation_only_lengthens_latencies(seed in any::<u64>(), step in 2i64..9) {
        let s = random(seed);
        let a = approximate(&s, ApproxConfig { delta: step }).unwrap().stream;
        let (l, ld) = (latencies(&s, u128::MAX).unwrap(), latencies(&a, u128::MAX).unwrap());
        for u in 0..s.node_count() as u32 {
            for v in 0..s.node_count() as u32 {
                let (u, v) = (stream_scc::stream::NodeId(u), stream_scc::stream::NodeId(v));
                if let Some(x) = ld.get(u, v) {
                    prop_assert!(l.get(u, v).is_some_and(|y| y <= x));
                }
            }
        }
        let r = compare(&s, &a, u128::MAX).unwrap();
        prop_assert!(r.lrmse >= 0.0 && r.avg_stretch >= 1.0 && r.avg_difference >= 0.0);
        prop_assert!(r.missing_paths as usize <= l.reachable_pairs());
    }
}
