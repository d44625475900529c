use hyperim::greedy::{marginal_coverage, select_seeds, CoverageState, RRCollection};
use proptest::prelude::*;

fn best_coverage(c: &RRCollection, k: usize) -> usize {
    let n = c.universe_size() as u32;
    let mut best = 0;
    let mut pick = vec![0u32; k];
    fn rec(
        c: &RRCollection,
        n: u32,
        start: u32,
        depth: usize,
        pick: &mut Vec<u32>,
        best: &mut usize,
    ) {
        if depth == pick.len() {
            *best = (*best).max(c.coverage(pick));
            return;
        }
        for v in start..n {
            pick[depth] = v;
            rec(c, n, v + 1, depth + 1, pick, best);
        }
    }
    rec(c, n, 0, 0, &mut pick, &mut best);
    best
}

/// Plain argmax loop without lazy evaluation.
fn plain_greedy(c: &RRCollection, k: usize) -> Vec<u32> {
    let mut state = CoverageState::new(c);
    let mut seeds = Vec::new();
    for _ in 0..k {
        let (v, g) = (0..c.universe_size() as u32)
            .map(|v| (v, marginal_coverage(c, v, &state)))
            .fold((0, 0), |a, b| if b.1 > a.1 { b } else { a });
        if g == 0 {
            break;
        }
        state.cover(c, v);
        seeds.push(v);
    }
    seeds
}

fn arb_collection() -> impl Strategy<Value = (RRCollection, usize)> {
    (2usize..=8, 1usize..=3).prop_flat_map(|(n, k)| {
        prop::collection::vec(prop::collection::btree_set(0..n as u32, 1..=n), 1..=12).prop_map(
            move |sets| {
                let lists = sets.into_iter().map(|s| s.into_iter().collect()).collect();
                (RRCollection::from_member_lists(lists, n), k.min(n))
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn greedy_is_within_1_minus_1_over_e((c, k) in arb_collection()) {
        let g = select_seeds(&c, k).unwrap();
        let opt = best_coverage(&c, k);
        prop_assert!(g.coverage as f64 >= (1.0 - (-1.0f64).exp()) * opt as f64);
        prop_assert!(g.coverage <= opt);
    }

    #[test]
    fn lazy_equals_plain((c, k) in arb_collection()) {
        prop_assert_eq!(select_seeds(&c, k).unwrap().seeds, plain_greedy(&c, k));
    }

    #[test]
    fn coverage_trace_is_monotone((c, k) in arb_collection()) {
        let g = select_seeds(&c, k).unwrap();
        prop_assert!(g.coverage_trace.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(g.marginals.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(g.marginals.iter().sum::<usize>(), g.coverage);
    }
}
