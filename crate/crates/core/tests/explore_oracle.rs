mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{named, random_toy, Naive};
use dhccp_core::checker::{parse_formula, verify_lasso, Checker, FairnessSpec, NoAtoms};
use dhccp_core::explorer::{explore, trace_to, ExploreOptions, SearchOrder, StateGraph};
use dhccp_core::kernel::{ground_model, SystemModel};
use proptest::prelude::*;

fn graph_as_named(m: &SystemModel, g: &StateGraph) -> BTreeMap<common::NamedState, BTreeSet<common::NamedState>> {
    (0..g.num_states() as u32)
        .map(|s| {
            let succ = g.edges(s).iter().map(|e| named(m, &g.state(e.dst))).collect();
            (named(m, &g.state(s)), succ)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn explorer_agrees_with_naive_interpreter(seed in any::<u64>()) {
        let types = random_toy(seed);
        let m = ground_model(&types, "Main").unwrap();
        let bfs = explore(&m, &ExploreOptions::default()).unwrap();
        prop_assert!(bfs.is_complete());

        let naive = Naive::new(&types, "Main").reachable();
        prop_assert_eq!(&graph_as_named(&m, &bfs), &naive);
        let stuck = naive.values().filter(|s| s.is_empty()).count();
        prop_assert_eq!(bfs.deadlocks().len(), stuck);

        let dfs = explore(&m, &ExploreOptions { order: SearchOrder::Dfs, ..Default::default() }).unwrap();
        prop_assert_eq!(dfs.num_states(), bfs.num_states());
        prop_assert_eq!(dfs.num_edges(), bfs.num_edges());
        prop_assert_eq!(graph_as_named(&m, &dfs), naive);

        let par = explore(&m, &ExploreOptions { workers: 3, ..Default::default() }).unwrap();
        prop_assert_eq!(par.num_states(), bfs.num_states());
        for s in 0..par.num_states() as u32 {
            prop_assert_eq!(par.state(s), bfs.state(s));
        }

        for s in 0..bfs.num_states() as u32 {
            let t = trace_to(&bfs, s).unwrap();
            prop_assert!(t.replays(&m));
            prop_assert_eq!(t.last_state(), &bfs.state(s));
        }
    }

    #[test]
    fn liveness_lassos_replay(seed in any::<u64>()) {
        let types = random_toy(seed);
        let m = ground_model(&types, "Main").unwrap();
        let g = explore(&m, &ExploreOptions::default()).unwrap();
        let c = Checker::new(&g, &m, &NoAtoms);
        let leaves: Vec<usize> = (0..m.instances().len()).filter(|&i| m.instances()[i].is_leaf).collect();
        let fair = FairnessSpec::per_instance(&m, &leaves);
        let (a, b) = (m.var_index("a.v0").unwrap(), m.var_index("b[1].v0").unwrap());
        let req_p = move |s: &[i32]| s[a] == 1;
        let resp_p = move |s: &[i32]| s[b] == 2;
        let (req, resp) = (parse_formula("a.v0 == 1").unwrap(), parse_formula("b[1].v0 == 2").unwrap());

        let unfair = c.check_response_liveness(&req, &resp, &FairnessSpec::none()).unwrap();
        let ctl = c.eval(&parse_formula("AG(a.v0 == 1 -> AF b[1].v0 == 2)").unwrap()).unwrap();
        prop_assert_eq!(unfair.holds, ctl.holds());
        let fairv = c.check_response_liveness(&req, &resp, &fair).unwrap();
        prop_assert!(fairv.holds || !unfair.holds);
        for (v, spec) in [(unfair, FairnessSpec::none()), (fairv, fair.clone())] {
            if let Some(l) = v.lasso {
                prop_assert!(!v.holds);
                prop_assert!(l.stem.replays(&m));
                let r = verify_lasso(&m, &l, &req_p, &resp_p, &spec);
                prop_assert!(r.is_ok(), "{:?}", r);
            } else {
                prop_assert!(v.holds);
            }
        }
    }
}
