use super::*;
use crate::kernel::StateVector;

fn system(p: usize, a: usize, t: usize) -> Protocol {
    build_system(&Config::new(p, a, t)).unwrap()
}

/// Fires, in order, the unique enabled event whose name is `name`.
fn drive(pr: &Protocol, mut s: StateVector, names: &[&str]) -> (StateVector, Vec<StateVector>) {
    let m = pr.model();
    let mut seen = vec![s.clone()];
    for name in names {
        let succ = m.successors(&s).unwrap();
        let hit: Vec<_> = succ.iter().filter(|(ev, _)| m.event_name(ev) == *name).collect();
        assert_eq!(
            hit.len(),
            1,
            "`{name}` among {:?}",
            succ.iter().map(|(ev, _)| m.event_name(ev)).collect::<Vec<_>>()
        );
        s = hit[0].1.clone();
        seen.push(s.clone());
    }
    (s, seen)
}

const READ_MISS_P0: [&str; 7] = [
    "cpu[0].s_write_PL1DTREQ_rd(a=0)",
    "s_empty_rd(self=0,a=0)",
    "s_rd_miss(self=0,j=0)",
    "s_serve_get(a=0)",
    "s_rd_fill(self=0,j=0)",
    "s_miss_fill(self=0,a=0)",
    "cpu[0].s_read_L1PDTRSP_rd(a=0)",
];

#[test]
fn empty_configurations_are_rejected() {
    assert!(matches!(build_system(&Config::new(0, 1, 1)), Err(ConfigError::Empty("nb_proc"))));
    assert!(matches!(build_system(&Config::new(1, 0, 1)), Err(ConfigError::Empty("nb_l2"))));
    assert!(matches!(build_system(&Config::new(1, 1, 0)), Err(ConfigError::Empty("cache_th"))));
    assert!(matches!(build_system(&Config::new(1, 1, MAX_CACHE_TH + 1)), Err(ConfigError::ThresholdTooLarge(_))));
}

#[test]
fn topology_counts() {
    assert_eq!(system(1, 1, 1).instance_counts(), (4, 9));
    assert_eq!(system(2, 2, 2).instance_counts(), (7, 11));
    let pr = system(2, 2, 2);
    for path in ["cpu[1].p", "cpu[1].c", "cpu[0].chan_PL1DTREQ", "l2[1]", "mem", "chan_L2L1CLACK", "chan_MEML2DTRSP"] {
        assert!(pr.model().instance_index(path).is_some(), "{path}");
    }
    assert_eq!(pr.components().len(), 7);
}

#[test]
fn variant_parsing_and_tags() {
    assert_eq!("legacy".parse::<Variant>().unwrap(), Variant::Legacy);
    assert!("buggy".parse::<Variant>().is_err());
    assert_eq!(Config::new(2, 2, 1).legacy().tag(), "2-2-1-legacy");
    assert_eq!(Config::new(3, 1, 2).with_eviction(true).tag(), "3-1-2-evict");
}

#[test]
fn initial_state_is_quiescent_with_no_copies() {
    let pr = system(2, 2, 1);
    let s0 = pr.model().initial_state();
    assert!(quiescent(&pr, &s0));
    assert_eq!(sharer_census(&pr, &s0, 0), 0);
    assert_eq!(sharer_census(&pr, &s0, 1), 0);
}

#[test]
fn full_channel_is_not_quiescent() {
    let pr = system(1, 1, 1);
    let (s, _) = drive(&pr, pr.model().initial_state(), &["init()", READ_MISS_P0[0]]);
    assert!(!pr.quiescent(&s));
}

#[test]
fn read_miss_sequence_installs_one_copy() {
    let pr = system(1, 1, 1);
    let (s, _) = drive(&pr, pr.model().initial_state(), &["init()"]);
    let (end, seen) = drive(&pr, s, &READ_MISS_P0);
    // between the request reaching the L2 and the response reaching the processor
    for mid in &seen[2..6] {
        assert!(!pr.quiescent(mid));
    }
    assert!(pr.quiescent(&end));
    assert_eq!(pr.sharer_census(&end, 0), 1);
    assert!(pr.layout().census_ok(&end, 0));
    assert!(pr.layout().sharer_list_sound(&end, 0));
    assert_eq!(pr.layout().l2_state(&end, 0), l2_loc::IDLE);
}

#[test]
fn broadcast_invalidate_leaves_no_copy() {
    let pr = system(2, 1, 1);
    let (s, _) = drive(&pr, pr.model().initial_state(), &["init()"]);
    let (s, _) = drive(&pr, s, &READ_MISS_P0);
    let (s, _) = drive(
        &pr,
        s,
        &[
            "cpu[1].s_write_PL1DTREQ_rd(a=0)",
            "s_empty_rd(self=1,a=0)",
            "s_rd_overflow(self=0,j=1)",
            "s_miss_fill(self=1,a=0)",
            "cpu[1].s_read_L1PDTRSP_rd(a=0)",
        ],
    );
    assert_eq!(pr.layout().n_copies(&s, 0), 2);
    assert!(!pr.layout().list_mode(&s, 0));
    assert_eq!(pr.sharer_census(&s, 0), 2);
    let (end, _) = drive(
        &pr,
        s,
        &[
            "cpu[0].s_write_PL1DTREQ_wr(a=0)",
            "s_valid_wr(self=0,a=0)",
            "s_wr_broadcast(self=0,j=0)",
            "s_binv_post_0(self=0)",
            "s_binv_write_valid(self=0,a=0)",
            "s_clnup_count(self=0,j=0)",
            "s_clack_write(self=0,a=0)",
            "s_binv_post_1(self=0)",
            "s_binv_valid(self=1,a=0)",
            "s_clnup_count(self=0,j=1)",
            "s_clack_empty(self=1,a=0)",
            "s_binv_done(self=0,j=0)",
            "s_write_done_empty(self=0,a=0)",
            "cpu[0].s_read_L1PDTRSP_wr(a=0)",
        ],
    );
    assert!(pr.quiescent(&end));
    assert_eq!(pr.sharer_census(&end, 0), 0);
    assert_eq!(pr.layout().n_copies(&end, 0), 0);
}

#[test]
fn multicast_update_spares_the_writer() {
    let pr = system(2, 1, 2);
    let (s, _) = drive(&pr, pr.model().initial_state(), &["init()"]);
    let (s, _) = drive(&pr, s, &READ_MISS_P0);
    let (s, _) = drive(
        &pr,
        s,
        &[
            "cpu[1].s_write_PL1DTREQ_rd(a=0)",
            "s_empty_rd(self=1,a=0)",
            "s_rd_insert_1(self=0,j=1)",
            "s_miss_fill(self=1,a=0)",
            "cpu[1].s_read_L1PDTRSP_rd(a=0)",
            "cpu[1].s_write_PL1DTREQ_wr(a=0)",
            "s_valid_wr(self=1,a=0)",
            "s_wr_multicast(self=0,j=1)",
        ],
    );
    // only cache 0 is eligible: slot 1 holds the writer
    let succ = pr.model().successors(&s).unwrap();
    let posts: Vec<String> =
        succ.iter().map(|(ev, _)| pr.model().event_name(ev)).filter(|n| n.starts_with("s_mup_")).collect();
    assert_eq!(posts, vec!["s_mup_last_0(self=0,t=0)".to_string()]);
    let (end, _) = drive(
        &pr,
        s,
        &[
            "s_mup_last_0(self=0,t=0)",
            "s_m_up(self=0,a=0)",
            "s_mup_ack(self=0,j=0)",
            "s_mup_done(self=0,j=1)",
            "s_write_done_valid(self=1,a=0)",
            "cpu[1].s_read_L1PDTRSP_wr(a=0)",
        ],
    );
    assert!(pr.quiescent(&end));
    assert_eq!(pr.sharer_census(&end, 0), 2);
    assert!(pr.layout().directory_violation(&end).is_none());
}

#[test]
fn sole_sharer_write_is_direct() {
    let pr = system(2, 1, 1);
    let (s, _) = drive(&pr, pr.model().initial_state(), &["init()"]);
    let (s, _) = drive(&pr, s, &READ_MISS_P0);
    let (end, _) = drive(
        &pr,
        s,
        &[
            "cpu[0].s_write_PL1DTREQ_wr(a=0)",
            "s_valid_wr(self=0,a=0)",
            "s_wr_direct(self=0,j=0)",
            "s_write_done_valid(self=0,a=0)",
            "cpu[0].s_read_L1PDTRSP_wr(a=0)",
        ],
    );
    assert!(pr.quiescent(&end));
    assert_eq!(pr.sharer_census(&end, 0), 1);
}

#[test]
fn legacy_race_loses_a_copy() {
    let pr = build_system(&Config::new(2, 1, 1).legacy()).unwrap();
    let (s, _) = drive(&pr, pr.model().initial_state(), &["init()"]);
    let (s, _) = drive(&pr, s, &READ_MISS_P0);
    let (s, _) = drive(
        &pr,
        s,
        &[
            "cpu[0].s_write_PL1DTREQ_wr(a=0)",
            "cpu[1].s_write_PL1DTREQ_rd(a=0)",
            "s_empty_rd(self=1,a=0)",
            // the L2 answers the read while the write waits behind it
            "s_rd_overflow(self=0,j=1)",
            "s_valid_wr(self=0,a=0)",
            "s_wr_broadcast(self=0,j=0)",
            "s_binv_post_0(self=0)",
            "s_binv_write_valid(self=0,a=0)",
            "s_binv_post_1(self=0)",
            // the invalidation overtakes the read response
            "s_binv_miss(self=1,a=0)",
            "s_miss_inv_fill(self=1,a=0)",
            "s_rsp_binv_count(self=0,j=0)",
        ],
    );
    assert_eq!(pr.layout().n_copies(&s, 0), 1);
    assert_eq!(pr.sharer_census(&s, 0), 0);
    assert_eq!(pr.layout().l2_state(&s, 0), l2_loc::BINV_WAIT);
}

#[test]
fn fixed_variant_never_writes_rsp_b_inv() {
    let types = type_table(&Config::new(2, 2, 1)).unwrap();
    let m = crate::kernel::ground_model(&types, "Main").unwrap();
    let dump = m.dump_grounded();
    assert!(!dump.contains("rsp_binv"));
    let legacy = crate::kernel::ground_model(&type_table(&Config::new(2, 2, 1).legacy()).unwrap(), "Main").unwrap();
    assert!(legacy.dump_grounded().contains("rsp_binv"));
}

#[test]
fn templates_bind_and_reject_bad_arguments() {
    use crate::checker::AtomResolver;
    let pr = system(2, 2, 1);
    let s0 = pr.model().initial_state();
    for (name, args, expect) in [
        ("quiescent", vec![], true),
        ("census_ok", vec![], true),
        ("census_ok", vec![1], true),
        ("share", vec![0, 1], false),
        ("writes", vec![0, 1], false),
        ("invalidated", vec![1], true),
        ("coherence_delivery", vec![1, 0], true),
        ("coherence_pending", vec![1], false),
        ("req_rd", vec![0], false),
        ("rsp_rd", vec![0], true),
        ("structural_ok", vec![], true),
    ] {
        let p = pr.resolve(name, &args).expect(name).expect(name);
        assert_eq!(p(&s0), expect, "{name}{args:?}");
    }
    assert!(pr.resolve("share", &[0]).unwrap().is_err());
    assert!(pr.resolve("holds", &[5]).unwrap().is_err());
    assert!(pr.resolve("census_ok", &[2]).unwrap().is_err());
    assert!(pr.resolve("nonsense", &[]).is_none());
}

#[test]
fn symbols_name_locations_and_messages() {
    let pr = system(1, 1, 1);
    let sym = pr.model().symbols();
    assert_eq!(sym["L1_VALID"], l1_loc::VALID);
    assert_eq!(sym["L2_BINV_WAIT"], l2_loc::BINV_WAIT);
    assert_eq!(sym["P_WAIT_RD"], proc_loc::WAIT_RD);
    assert_eq!(sym["RSP_B_INV"], 18);
}
