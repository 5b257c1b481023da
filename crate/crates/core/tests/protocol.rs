use dhccp_core::checker::{parse_formula, Checker};
use dhccp_core::dhccp::{build_system, message_table_tsv, Config, Protocol};
use dhccp_core::explorer::{explore, trace_to, ExploreOptions, StateGraph};
use dhccp_core::kernel::StateVector;

fn explored(cfg: Config) -> (Protocol, StateGraph) {
    let pr = build_system(&cfg).unwrap();
    let g = explore(pr.model(), &ExploreOptions::default()).unwrap();
    (pr, g)
}

/// Sharers of line `a` read straight off the variable names.
fn census_by_name(pr: &Protocol, s: &StateVector, a: i32) -> usize {
    let m = pr.model();
    let sym = m.symbols();
    (0..pr.config().nb_proc)
        .filter(|j| {
            let st = s.get(m.var_index(&format!("cpu[{j}].c.state")).unwrap());
            let addr = s.get(m.var_index(&format!("cpu[{j}].c.v_addr")).unwrap());
            (st == sym["L1_VALID"] || st == sym["L1_WRITE_WAIT_VALID"]) && addr == a
        })
        .count()
}

fn all_invariants(pr: &Protocol, g: &StateGraph) {
    let ch = Checker::new(g, pr.model(), pr);
    for p in ["quiescent -> census_ok", "structural_ok", "quiescent -> directory_ok"] {
        let v = ch.check_invariant_everywhere(&parse_formula(p).unwrap()).unwrap();
        assert!(v.holds, "{p} fails at {}: {:?}", pr.config().tag(), v.counterexample.map(|t| t.len()));
    }
}

#[test]
fn census_agrees_with_variable_names() {
    let (pr, g) = explored(Config::new(2, 2, 1));
    for s in g.states().step_by(97) {
        for a in 0..2 {
            assert_eq!(pr.sharer_census(&s, a), census_by_name(&pr, &s, a as i32));
        }
    }
}

#[test]
fn quiescent_census_matches_directory_count() {
    let (pr, g) = explored(Config::new(2, 1, 2));
    let n_copies = pr.model().var_index("l2[0].n_copies").unwrap();
    let mut quiet = 0;
    for s in g.states().filter(|s| pr.quiescent(s)) {
        quiet += 1;
        assert_eq!(census_by_name(&pr, &s, 0) as i32, s.get(n_copies));
    }
    assert!(quiet > 1);
}

#[test]
fn fixed_small_configurations_are_sound() {
    for (p, a, t) in [(1, 1, 1), (1, 2, 1), (2, 1, 1), (2, 1, 2), (3, 1, 1)] {
        let (pr, g) = explored(Config::new(p, a, t));
        assert!(g.deadlocks().is_empty(), "{}", pr.config().tag());
        all_invariants(&pr, &g);
    }
}

#[test]
fn eviction_keeps_the_fix_sound() {
    for (p, a, t) in [(1, 1, 1), (2, 1, 1), (1, 2, 1)] {
        let (pr, g) = explored(Config::new(p, a, t).with_eviction(true));
        let (plain, _) = explored(Config::new(p, a, t));
        assert!(g.num_states() > explore(plain.model(), &ExploreOptions::default()).unwrap().num_states());
        assert!(g.deadlocks().is_empty(), "{}", pr.config().tag());
        all_invariants(&pr, &g);
    }
}

#[test]
fn legacy_deadlocks_already_with_one_line() {
    let (pr, g) = explored(Config::new(2, 1, 1).legacy());
    assert!(!g.deadlocks().is_empty());
    let t = trace_to(&g, g.deadlocks()[0]).unwrap();
    assert!(t.replays(pr.model()));
    assert!(pr.model().successors(t.last_state()).unwrap().is_empty());
}

#[test]
fn one_processor_legacy_matches_fixed() {
    let (_, legacy) = explored(Config::new(1, 1, 1).legacy());
    let (_, fixed) = explored(Config::new(1, 1, 1));
    assert_eq!(legacy.num_states(), fixed.num_states());
    assert!(legacy.deadlocks().is_empty());
}

#[test]
fn coherence_requests_are_delivered() {
    let (pr, g) = explored(Config::new(2, 2, 1));
    let ch = Checker::new(&g, pr.model(), &pr);
    for (i, j) in [(0, 1), (1, 0)] {
        let f = parse_formula(&format!("AG(shared_and_write({i},{j}) -> AF coherence_delivery({j}))")).unwrap();
        assert!(ch.check(&f).unwrap().holds);
        let reach = parse_formula(&format!("EF(shared_and_write({i},{j}) && coherence_pending({j}))")).unwrap();
        assert!(ch.check(&reach).unwrap().holds, "property would be vacuous");
    }
}

#[test]
fn message_table_lists_every_type_once() {
    let tsv = message_table_tsv();
    let rows: Vec<&str> = tsv.lines().skip(1).collect();
    assert_eq!(rows.len(), 19);
    let mut codes: Vec<i32> = rows.iter().map(|r| r.split('\t').next().unwrap().parse().unwrap()).collect();
    codes.sort();
    codes.dedup();
    assert_eq!(codes.len(), 19);
    assert!(rows.iter().any(|r| r.contains("RSP_B_INV")));
}
