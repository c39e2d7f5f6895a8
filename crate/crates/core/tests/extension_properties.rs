//! Properties of extended alignments over random nets and traces.

mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use tandem_conformance::align::{align_dijkstra, align_optimal, pos_eps, standard_cost, Alignment};
use tandem_conformance::extend::{extend_alignment, verify_proper};
use tandem_conformance::log::{build_dafsa, Trace};
use tandem_conformance::model::{build_reachability_graph, ReachabilityGraph, DEFAULT_STATE_CAP};
use tandem_conformance::tandem::{expand_trace, reduce_trace, ReducedTrace};

use common::*;

struct Case {
    rg: ReachabilityGraph,
    trace: Trace,
    reduced: ReducedTrace,
    aligned: Alignment,
    extended: Alignment,
}

fn case(seed: u64, max_len: usize) -> Case {
    let mut rng = StdRng::seed_from_u64(seed);
    let net = random_net(&mut rng, 8);
    let rg = build_reachability_graph(&net, DEFAULT_STATE_CAP).unwrap();
    let trace = random_trace(&mut rng, &rg, max_len);
    let reduced = reduce_trace(&trace);
    let dafsa = build_dafsa([reduced.labels()]);
    let aligned = align_dijkstra(&reduced, &dafsa, &rg).unwrap();
    let extended = extend_alignment(&aligned, &reduced).unwrap();
    Case { rg, trace, reduced, aligned, extended }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn extended_alignment_is_proper(seed in any::<u64>()) {
        let c = case(seed, 12);
        prop_assert_eq!(c.extended.trace_labels(), c.trace.to_vec());
        prop_assert!(verify_proper(&c.extended, &c.trace, &c.rg).is_ok());
    }

    #[test]
    fn extended_cost_is_never_below_optimum(seed in any::<u64>()) {
        let c = case(seed, 12);
        let optimal = align_optimal(&c.trace, &build_dafsa([&c.trace]), &c.rg).unwrap();
        prop_assert!(standard_cost(&c.extended) >= standard_cost(&optimal));
    }

    #[test]
    fn extension_keeps_prefix_and_suffix(seed in any::<u64>()) {
        let c = case(seed, 12);
        let map = c.reduced.complement_map();
        if let (Some((&lo, _)), Some((&hi, _))) = (map.first_key_value(), map.last_key_value()) {
            let start = pos_eps(&c.aligned, lo).unwrap() - 1;
            let end = pos_eps(&c.aligned, hi).unwrap();
            let (a, e) = (c.aligned.syncs(), c.extended.syncs());
            prop_assert_eq!(&a[..start], &e[..start]);
            let tail = a.len() - end;
            prop_assert_eq!(&a[end..], &e[e.len() - tail..]);
        }
    }

    #[test]
    fn extension_restores_removed_labels(seed in any::<u64>()) {
        let c = case(seed, 12);
        prop_assert_eq!(
            c.extended.trace_labels().len() - c.aligned.trace_labels().len(),
            c.reduced.k_red()
        );
    }

    #[test]
    fn repeat_free_alignment_is_unchanged(seed in any::<u64>()) {
        let c = case(seed, 12);
        if c.reduced.complement_map().is_empty() {
            prop_assert_eq!(&c.extended, &c.aligned);
        }
    }

    #[test]
    fn reduction_round_trips(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = random_repetitive_trace(&mut rng, &["A", "B", "C"], 40);
        prop_assert_eq!(expand_trace(&reduce_trace(&t)).unwrap(), t);
    }
}
