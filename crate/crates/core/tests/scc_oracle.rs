mod common;

use proptest::prelude::*;
use stream_scc::scc::{components, verify_maximality, verify_partition, Algorithm};
use stream_scc::stream::StreamGraph;
use stream_scc::synth::{self, RandomStreamParams};

fn agrees_with_oracle(s: &StreamGraph) {
    let expected = common::brute_components(s);
    for alg in [Algorithm::Naive, Algorithm::Direct, Algorithm::Fd] {
        let got = components(alg, s);
        assert_eq!(common::raw(&got), expected, "{} disagrees with the sampling oracle", alg.name());
        assert!(verify_partition(s, &got));
        assert!(verify_maximality(&got));
    }
}

#[test]
fn hand_built_streams_match_oracle() {
    for text in common::ADVERSARIAL {
        agrees_with_oracle(&common::segments(text));
    }
}

#[test]
fn two_node_example_file() {
    let s = common::segments("n u 0 9\nn v 0 9\nl u v 2 5");
    let file = common::render(&s, &components(Algorithm::Direct, &s));
    assert_eq!(file, "[0 2[ 1 u\n[0 2[ 1 v\n[2 5] 2 u v\n]5 9] 1 u\n]5 9] 1 v\n");
}

#[test]
fn instant_component_is_closed() {
    let s = common::segments("n a 0 10\nn b 0 10\nn c 0 10\nl a b 0 10\nl b c 4 4");
    let file = common::render(&s, &components(Algorithm::Fd, &s));
    assert!(file.contains("[4 4] 3 a b c\n"), "{file}");
    assert!(file.contains("]4 10] 2 a b\n"), "{file}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_streams_match_oracle(seed in any::<u64>(), horizon in 1i64..40, instant in 0.0f64..0.6) {
        let p = RandomStreamParams { max_nodes: 12, max_segments: 80, horizon, instant_prob: instant };
        agrees_with_oracle(&synth::random_stream(&mut synth::rng(seed), p));
    }
}
