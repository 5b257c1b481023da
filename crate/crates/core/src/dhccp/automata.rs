//! Component automata.
//!
//! Each rule is one guarded step of an L1 or L2 controller together with its
//! sharer-list bookkeeping. Rule comments name the transaction a rule belongs to.

use crate::kernel::{Expr, LeafType, Stmt, TransitionDecl, VarDecl};

use super::messages::{MessageType::*, TYPE_CODES};
use super::rules::{leaf, Msg, Rule, SELF};
use super::{Config, Variant};

/// Processor locations.
pub mod proc_loc {
    pub const IDLE: i32 = 0;
    pub const WAIT_RD: i32 = 1;
    pub const WAIT_WR: i32 = 2;
    pub const NAMES: [&str; 3] = ["P_IDLE", "P_WAIT_RD", "P_WAIT_WR"];
}

/// L1 locations.
pub mod l1_loc {
    pub const INIT: i32 = 0;
    pub const EMPTY: i32 = 1;
    pub const VALID: i32 = 2;
    pub const MISS_WAIT: i32 = 3;
    /// Miss outstanding and an invalidation for the same line already seen.
    pub const MISS_WAIT_INV: i32 = 4;
    pub const WRITE_WAIT_EMPTY: i32 = 5;
    pub const WRITE_WAIT_VALID: i32 = 6;
    /// Write outstanding, copy dropped, cleanup not yet acknowledged.
    pub const WRITE_WAIT_CLNUP: i32 = 7;
    /// Replacement cleanup sent; a read miss follows once acknowledged.
    pub const CLNUP_WAIT_RD: i32 = 8;
    pub const CLNUP_WAIT_EMPTY: i32 = 9;
    /// Cleanup acknowledged, read request not yet sent.
    pub const MISS_SEND: i32 = 10;
    pub const NAMES: [&str; 11] = [
        "INIT",
        "L1_EMPTY",
        "L1_VALID",
        "L1_MISS_WAIT",
        "L1_MISS_WAIT_INV",
        "L1_WRITE_WAIT_EMPTY",
        "L1_WRITE_WAIT_VALID",
        "L1_WRITE_WAIT_CLNUP",
        "L1_CLNUP_WAIT_RD",
        "L1_CLNUP_WAIT_EMPTY",
        "L1_MISS_SEND",
    ];
}

/// L2 locations.
pub mod l2_loc {
    pub const INIT: i32 = 0;
    pub const EMPTY: i32 = 1;
    pub const IDLE: i32 = 2;
    pub const MISS_RD: i32 = 3;
    pub const MISS_WR: i32 = 4;
    pub const MUP_SEND: i32 = 5;
    pub const MUP_WAIT: i32 = 6;
    pub const BINV_SEND: i32 = 7;
    pub const BINV_WAIT: i32 = 8;
    pub const MINV_SEND: i32 = 9;
    pub const MINV_WAIT: i32 = 10;
    pub const EBINV_SEND: i32 = 11;
    pub const EBINV_WAIT: i32 = 12;
    pub const EVICT_PUT: i32 = 13;
    pub const NAMES: [&str; 14] = [
        "INIT",
        "L2_EMPTY",
        "L2_IDLE",
        "L2_MISS_RD",
        "L2_MISS_WR",
        "L2_MUP_SEND",
        "L2_MUP_WAIT",
        "L2_BINV_SEND",
        "L2_BINV_WAIT",
        "L2_MINV_SEND",
        "L2_MINV_WAIT",
        "L2_EBINV_SEND",
        "L2_EBINV_WAIT",
        "L2_EVICT_PUT",
    ];
    /// Locations in which a line may have registered copies.
    pub const HOLDS_COPIES: [i32; 9] =
        [IDLE, MUP_SEND, MUP_WAIT, BINV_SEND, BINV_WAIT, MINV_SEND, MINV_WAIT, EBINV_SEND, EBINV_WAIT];
}

fn var(name: &str) -> Expr {
    Expr::var(name)
}

fn par(name: &str) -> Expr {
    Expr::param(name)
}

fn int(v: i32) -> Expr {
    Expr::int(v)
}

fn at(loc: i32) -> Expr {
    var("state").eq(int(loc))
}

fn at_any(locs: &[i32]) -> Expr {
    Expr::any(locs.iter().map(|&l| at(l)))
}

fn me() -> Expr {
    par(SELF)
}

/// One-place buffer carrying (addr, type); reading flushes it.
pub fn channel_addr_type(cfg: &Config) -> LeafType {
    let a_max = cfg.nb_l2 as i32 - 1;
    let mut l = LeafType::new("ChannelAddrType");
    l.vars = vec![
        VarDecl::new("isFull", 0, 1, 0),
        VarDecl::new("addr", 0, a_max, 0),
        VarDecl::new("type", 0, TYPE_CODES - 1, 0),
    ];
    l.transitions = vec![
        TransitionDecl::new("read")
            .param("addr", 0, a_max)
            .param("rtype", 0, TYPE_CODES - 1)
            .guard(Expr::all([var("isFull").eq(int(1)), var("addr").eq(par("addr")), var("type").eq(par("rtype"))]))
            .label("read", vec![par("addr"), par("rtype")])
            .actions([Stmt::set("isFull", int(0)), Stmt::set("addr", int(0)), Stmt::set("type", int(0))]),
        TransitionDecl::new("write")
            .param("addr", 0, a_max)
            .param("wtype", 0, TYPE_CODES - 1)
            .guard(var("isFull").eq(int(0)))
            .label("write", vec![par("addr"), par("wtype")])
            .actions([Stmt::set("isFull", int(1)), Stmt::set("addr", par("addr")), Stmt::set("type", par("wtype"))]),
    ];
    l
}

/// One-place buffer carrying (addr, type, id), used on the shared L1/L2 networks.
/// `not_for` is a pure test: nothing is pending for the given id.
pub fn channel_addr_type_id(cfg: &Config) -> LeafType {
    let a_max = cfg.nb_l2 as i32 - 1;
    let i_max = cfg.nb_proc as i32 - 1;
    let mut l = LeafType::new("ChannelAddrTypeId");
    l.vars = vec![
        VarDecl::new("isFull", 0, 1, 0),
        VarDecl::new("addr", 0, a_max, 0),
        VarDecl::new("type", 0, TYPE_CODES - 1, 0),
        VarDecl::new("id", 0, i_max, 0),
    ];
    l.transitions = vec![
        TransitionDecl::new("read")
            .param("addr", 0, a_max)
            .param("rtype", 0, TYPE_CODES - 1)
            .param("id", 0, i_max)
            .guard(Expr::all([
                var("isFull").eq(int(1)),
                var("addr").eq(par("addr")),
                var("type").eq(par("rtype")),
                var("id").eq(par("id")),
            ]))
            .label("read", vec![par("addr"), par("rtype"), par("id")])
            .actions([
                Stmt::set("isFull", int(0)),
                Stmt::set("addr", int(0)),
                Stmt::set("type", int(0)),
                Stmt::set("id", int(0)),
            ]),
        TransitionDecl::new("write")
            .param("addr", 0, a_max)
            .param("wtype", 0, TYPE_CODES - 1)
            .param("id", 0, i_max)
            .guard(var("isFull").eq(int(0)))
            .label("write", vec![par("addr"), par("wtype"), par("id")])
            .actions([
                Stmt::set("isFull", int(1)),
                Stmt::set("addr", par("addr")),
                Stmt::set("type", par("wtype")),
                Stmt::set("id", par("id")),
            ]),
        TransitionDecl::new("not_for")
            .param("id", 0, i_max)
            .guard(var("isFull").eq(int(0)).or(var("id").ne(par("id"))))
            .label("not_for", vec![par("id")]),
    ];
    l
}

pub(crate) fn processor_rules(cfg: &Config) -> Vec<Rule> {
    use proc_loc::*;
    let a_max = cfg.nb_l2 as i32 - 1;
    let a = || par("a");
    vec![
        Rule::new("write_PL1DTREQ_rd")
            .param("a", 0, a_max)
            .when(at(IDLE))
            .send(Msg::new(DtRd, a()))
            .set("state", int(WAIT_RD))
            .set("addr", a()),
        Rule::new("write_PL1DTREQ_wr")
            .param("a", 0, a_max)
            .when(at(IDLE))
            .send(Msg::new(DtWr, a()))
            .set("state", int(WAIT_WR))
            .set("addr", a()),
        Rule::new("read_L1PDTRSP_rd")
            .param("a", 0, a_max)
            .when(at(WAIT_RD).and(var("addr").eq(a())))
            .recv(Msg::new(RspDtRd, a()))
            .set("state", int(IDLE)),
        Rule::new("read_L1PDTRSP_wr")
            .param("a", 0, a_max)
            .when(at(WAIT_WR).and(var("addr").eq(a())))
            .recv(Msg::new(RspDtWr, a()))
            .set("state", int(IDLE)),
    ]
}

pub fn processor(cfg: &Config) -> LeafType {
    let vars = vec![VarDecl::new("state", 0, 2, proc_loc::IDLE), VarDecl::new("addr", 0, cfg.nb_l2 as i32 - 1, 0)];
    leaf("Processor", vars, &processor_rules(cfg), Vec::new())
}

pub(crate) fn memory_rules(cfg: &Config) -> Vec<Rule> {
    let a_max = cfg.nb_l2 as i32 - 1;
    vec![
        Rule::new("serve_get").param("a", 0, a_max).recv(Msg::new(Get, par("a"))).send(Msg::new(RspGet, par("a"))),
        Rule::new("serve_put").param("a", 0, a_max).recv(Msg::new(Put, par("a"))).send(Msg::new(RspPut, par("a"))),
    ]
}

pub fn memory(cfg: &Config) -> LeafType {
    leaf("Memory", Vec::new(), &memory_rules(cfg), Vec::new())
}

pub(crate) fn l1_rules(cfg: &Config) -> Vec<Rule> {
    use l1_loc::*;
    let a_max = cfg.nb_l2 as i32 - 1;
    let legacy = cfg.variant == Variant::Legacy;
    let a = || par("a");
    let mut rules = vec![
        // direct read, miss (request step of the miss sequence)
        Rule::new("empty_rd")
            .param("a", 0, a_max)
            .when(at(EMPTY))
            .recv(Msg::new(DtRd, a()))
            .quiet_for(me())
            .send(Msg::to(Rd, a(), me()))
            .set("state", int(MISS_WAIT))
            .set("addr_save", a()),
        // direct write without a copy
        Rule::new("empty_wr")
            .param("a", 0, a_max)
            .when(at(EMPTY))
            .recv(Msg::new(DtWr, a()))
            .quiet_for(me())
            .send(Msg::to(Wr, a(), me()))
            .set("state", int(WRITE_WAIT_EMPTY))
            .set("addr_save", a()),
        Rule::new("valid_hit")
            .param("a", 0, a_max)
            .when(at(VALID).and(var("v_addr").eq(a())))
            .recv(Msg::new(DtRd, a()))
            .quiet_for(me())
            .send(Msg::new(RspDtRd, a())),
        // local cleanup: replace the line before missing on another one
        Rule::new("valid_replace")
            .param("a", 0, a_max)
            .param("v", 0, a_max)
            .when(at(VALID).and(var("v_addr").eq(par("v"))).and(a().ne(par("v"))))
            .recv(Msg::new(DtRd, a()))
            .quiet_for(me())
            .send(Msg::to(Clnup, par("v"), me()))
            .set("state", int(CLNUP_WAIT_RD))
            .set("addr_save", a())
            .set("v_addr", int(0)),
        // write-through, no allocation: the held copy stays valid
        Rule::new("valid_wr")
            .param("a", 0, a_max)
            .when(at(VALID))
            .recv(Msg::new(DtWr, a()))
            .quiet_for(me())
            .send(Msg::to(Wr, a(), me()))
            .set("state", int(WRITE_WAIT_VALID))
            .set("addr_save", a()),
        // miss completion
        Rule::new("miss_fill")
            .param("a", 0, a_max)
            .when(at(MISS_WAIT).and(var("addr_save").eq(a())))
            .recv(Msg::to(RspRd, a(), me()))
            .send(Msg::new(RspDtRd, a()))
            .set("state", int(VALID))
            .set("v_addr", a()),
        Rule::new("write_done_empty")
            .param("a", 0, a_max)
            .when(at(WRITE_WAIT_EMPTY).and(var("addr_save").eq(a())))
            .recv(Msg::to(RspWr, a(), me()))
            .send(Msg::new(RspDtWr, a()))
            .set("state", int(EMPTY)),
        Rule::new("write_done_valid")
            .param("a", 0, a_max)
            .when(at(WRITE_WAIT_VALID).and(var("addr_save").eq(a())))
            .recv(Msg::to(RspWr, a(), me()))
            .send(Msg::new(RspDtWr, a()))
            .set("state", int(VALID)),
        Rule::new("write_done_clnup")
            .param("a", 0, a_max)
            .when(at(WRITE_WAIT_CLNUP).and(var("addr_save").eq(a())))
            .recv(Msg::to(RspWr, a(), me()))
            .send(Msg::new(RspDtWr, a()))
            .set("state", int(CLNUP_WAIT_EMPTY)),
        // cleanup acknowledgements
        Rule::new("clack_rd")
            .param("a", 0, a_max)
            .when(at(CLNUP_WAIT_RD))
            .recv(Msg::to(Clack, a(), me()))
            .set("state", int(MISS_SEND)),
        Rule::new("clack_empty")
            .param("a", 0, a_max)
            .when(at(CLNUP_WAIT_EMPTY))
            .recv(Msg::to(Clack, a(), me()))
            .set("state", int(EMPTY)),
        Rule::new("clack_write")
            .param("a", 0, a_max)
            .when(at(WRITE_WAIT_CLNUP))
            .recv(Msg::to(Clack, a(), me()))
            .set("state", int(WRITE_WAIT_EMPTY)),
        // the read that was held back until the cleanup was acknowledged
        Rule::new("miss_send")
            .param("a", 0, a_max)
            .when(at(MISS_SEND).and(var("addr_save").eq(a())))
            .send(Msg::to(Rd, a(), me()))
            .set("state", int(MISS_WAIT)),
        // multicast update: acknowledged in every location, copy kept
        Rule::new("m_up")
            .param("a", 0, a_max)
            .when(var("state").ne(int(INIT)))
            .recv(Msg::to(MUp, a(), me()))
            .send(Msg::to(RspMUp, a(), me())),
    ];

    // The miss response crosses an invalidation of the same line.
    let mut fill_inv = Rule::new("miss_inv_fill")
        .param("a", 0, a_max)
        .when(at(MISS_WAIT_INV).and(var("addr_save").eq(a())))
        .recv(Msg::to(RspRd, a(), me()))
        .send(Msg::new(RspDtRd, a()));
    fill_inv = if legacy {
        // the line is dropped silently although the L2 has counted it
        fill_inv.set("state", int(EMPTY))
    } else {
        fill_inv.send(Msg::to(Clnup, a(), me())).set("state", int(CLNUP_WAIT_EMPTY))
    };
    rules.push(fill_inv);

    let mut kinds = vec![BInv];
    if cfg.l2_eviction {
        kinds.push(MInv);
    }
    for kind in kinds {
        let tag = if kind == BInv { "binv" } else { "minv" };
        let holds = |loc: i32| at(loc).and(var("v_addr").eq(par("a")));
        let answer_binv = legacy && kind == BInv;
        // holder of the line: drop it and answer
        let mut r = Rule::new(format!("{tag}_valid"))
            .param("a", 0, a_max)
            .when(holds(VALID))
            .recv(Msg::to(kind, a(), me()))
            .set("v_addr", int(0));
        r = if answer_binv {
            r.send(Msg::to(RspBInv, a(), me())).set("state", int(EMPTY))
        } else {
            r.send(Msg::to(Clnup, a(), me())).set("state", int(CLNUP_WAIT_EMPTY))
        };
        rules.push(r);
        let mut r = Rule::new(format!("{tag}_write_valid"))
            .param("a", 0, a_max)
            .when(holds(WRITE_WAIT_VALID))
            .recv(Msg::to(kind, a(), me()))
            .set("v_addr", int(0));
        r = if answer_binv {
            r.send(Msg::to(RspBInv, a(), me())).set("state", int(WRITE_WAIT_EMPTY))
        } else {
            r.send(Msg::to(Clnup, a(), me())).set("state", int(WRITE_WAIT_CLNUP))
        };
        rules.push(r);
        // a miss on this line is in flight: remember the invalidation
        rules.push(
            Rule::new(format!("{tag}_miss"))
                .param("a", 0, a_max)
                .when(at(MISS_WAIT).and(var("addr_save").eq(a())))
                .recv(Msg::to(kind, a(), me()))
                .set("state", int(MISS_WAIT_INV)),
        );
        // no copy: consume and ignore
        rules.push(
            Rule::new(format!("{tag}_drop"))
                .param("a", 0, a_max)
                .when(Expr::all([
                    var("state").ne(int(INIT)),
                    holds(VALID).not(),
                    holds(WRITE_WAIT_VALID).not(),
                    at(MISS_WAIT).and(var("addr_save").eq(a())).not(),
                ]))
                .recv(Msg::to(kind, a(), me())),
        );
    }
    rules
}

fn l1_vars(cfg: &Config) -> Vec<VarDecl> {
    let a_max = cfg.nb_l2 as i32 - 1;
    vec![
        VarDecl::new("state", 0, l1_loc::NAMES.len() as i32 - 1, l1_loc::INIT),
        VarDecl::new("v_addr", 0, a_max, 0),
        VarDecl::new("addr_save", 0, a_max, 0),
        VarDecl::new("id", 0, cfg.nb_proc as i32 - 1, 0),
    ]
}

fn l1_init(cfg: &Config) -> TransitionDecl {
    TransitionDecl::new("t_init")
        .param("id", 0, cfg.nb_proc as i32 - 1)
        .guard(at(l1_loc::INIT))
        .label("init", vec![par("id")])
        .actions([Stmt::set("state", int(l1_loc::EMPTY)), Stmt::set("id", par("id"))])
}

fn l1_automaton(cfg: &Config) -> LeafType {
    leaf("CacheL1", l1_vars(cfg), &l1_rules(cfg), vec![l1_init(cfg)])
}

fn cell(name: &str, k: usize) -> Expr {
    Expr::cell(name, int(k as i32))
}

#[allow(clippy::vec_init_then_push)]
pub(crate) fn l2_rules(cfg: &Config) -> Vec<Rule> {
    use l2_loc::*;
    let p = cfg.nb_proc as i32;
    let th = cfg.cache_th;
    let legacy = cfg.variant == Variant::Legacy;
    let j = || par("j");
    let n = || var("n_copies");
    let sum_v = || Expr::sum((0..th).map(|k| cell("v_c_id", k)));
    let list_mode = || sum_v().eq(n());
    let count_mode = || n().gt(sum_v());
    let holds_copies = || at_any(&HOLDS_COPIES);
    let listed = |k: usize, who: Expr| cell("v_c_id", k).eq(int(1)).and(cell("c_id", k).eq(who));
    let mut rules = Vec::new();

    // misses: fetch the line from memory
    rules.push(
        Rule::new("rd_miss")
            .param("j", 0, p - 1)
            .when(at(EMPTY))
            .recv(Msg::to(Rd, me(), j()))
            .send(Msg::new(Get, me()))
            .set("state", int(MISS_RD))
            .set("src_save", j()),
    );
    rules.push(
        Rule::new("wr_miss")
            .param("j", 0, p - 1)
            .when(at(EMPTY))
            .recv(Msg::to(Wr, me(), j()))
            .send(Msg::new(Get, me()))
            .set("state", int(MISS_WR))
            .set("src_save", j()),
    );
    // the requester becomes the first registered copy
    rules.push(
        Rule::new("rd_fill")
            .param("j", 0, p - 1)
            .when(at(MISS_RD).and(var("src_save").eq(j())))
            .recv(Msg::new(RspGet, me()))
            .send(Msg::to(RspRd, me(), j()))
            .set("state", int(IDLE))
            .set_cell("v_c_id", 0, int(1))
            .set_cell("c_id", 0, j())
            .set("n_copies", int(1))
            .set("src_save", int(0)),
    );
    rules.push(
        Rule::new("wr_fill")
            .param("j", 0, p - 1)
            .when(at(MISS_WR).and(var("src_save").eq(j())))
            .recv(Msg::new(RspGet, me()))
            .send(Msg::to(RspWr, me(), j()))
            .set("state", int(IDLE))
            .set("dirty", int(1))
            .set("src_save", int(0)),
    );

    // read hits: register the new copy
    for k in 0..th {
        let first_free = Expr::all((0..k).map(|m| cell("v_c_id", m).eq(int(1)))).and(cell("v_c_id", k).eq(int(0)));
        rules.push(
            Rule::new(format!("rd_insert_{k}"))
                .param("j", 0, p - 1)
                .when(Expr::all([at(IDLE), list_mode(), n().lt(int(p)), first_free]))
                .recv(Msg::to(Rd, me(), j()))
                .send(Msg::to(RspRd, me(), j()))
                .set_cell("v_c_id", k, int(1))
                .set_cell("c_id", k, j())
                .set("n_copies", n().add(int(1))),
        );
    }
    // list full: free it and keep only the count
    let mut overflow = Rule::new("rd_overflow")
        .param("j", 0, p - 1)
        .when(Expr::all([at(IDLE), list_mode(), n().eq(int(th as i32)), n().lt(int(p))]))
        .recv(Msg::to(Rd, me(), j()))
        .send(Msg::to(RspRd, me(), j()));
    for k in 0..th {
        overflow = overflow.set_cell("v_c_id", k, int(0)).set_cell("c_id", k, int(0));
    }
    rules.push(overflow.set("n_copies", n().add(int(1))));
    rules.push(
        Rule::new("rd_count")
            .param("j", 0, p - 1)
            .when(Expr::all([at(IDLE), count_mode(), n().lt(int(p))]))
            .recv(Msg::to(Rd, me(), j()))
            .send(Msg::to(RspRd, me(), j()))
            .set("n_copies", n().add(int(1))),
    );

    // writes
    let other = |k: usize, who: Expr| cell("v_c_id", k).eq(int(1)).and(cell("c_id", k).ne(who));
    let no_other = || Expr::all((0..th).map(|k| other(k, j()).not()));
    rules.push(
        Rule::new("wr_direct")
            .param("j", 0, p - 1)
            .when(Expr::all([at(IDLE), list_mode(), no_other()]))
            .recv(Msg::to(Wr, me(), j()))
            .send(Msg::to(RspWr, me(), j()))
            .set("dirty", int(1)),
    );
    rules.push(
        Rule::new("wr_multicast")
            .param("j", 0, p - 1)
            .when(Expr::all([at(IDLE), list_mode(), no_other().not()]))
            .recv(Msg::to(Wr, me(), j()))
            .set("state", int(MUP_SEND))
            .set("src_save", j())
            .set("cpt", int(0))
            .set("rsp_cpt", int(0))
            .set("dirty", int(1)),
    );
    rules.push(
        Rule::new("wr_broadcast")
            .param("j", 0, p - 1)
            .when(at(IDLE).and(count_mode()))
            .recv(Msg::to(Wr, me(), j()))
            .set("state", int(BINV_SEND))
            .set("src_save", j())
            .set("cpt", int(0))
            .set("dirty", int(1)),
    );

    // multicast update: one M_UP per registered copy but the writer
    let mup_elig = |k: usize| other(k, var("src_save"));
    multicast_posts(&mut rules, th, p, "mup", MUp, MUP_SEND, MUP_WAIT, &mup_elig, true);
    rules.push(
        Rule::new("mup_ack")
            .param("j", 0, p - 1)
            .when(at_any(&[MUP_SEND, MUP_WAIT]).and(var("rsp_cpt").gt(int(0))))
            .recv(Msg::to(RspMUp, me(), j()))
            .set("rsp_cpt", var("rsp_cpt").sub(int(1))),
    );
    rules.push(
        Rule::new("mup_done")
            .param("j", 0, p - 1)
            .when(Expr::all([at(MUP_WAIT), var("rsp_cpt").eq(int(0)), var("src_save").eq(j())]))
            .send(Msg::to(RspWr, me(), j()))
            .set("state", int(IDLE))
            .set("src_save", int(0)),
    );

    // broadcast invalidate: one B_INV per L1, completion when no copy is left
    broadcast_posts(&mut rules, p, "binv", BINV_SEND, BINV_WAIT);
    rules.push(
        Rule::new("binv_done")
            .param("j", 0, p - 1)
            .when(Expr::all([at(BINV_WAIT), n().eq(int(0)), var("src_save").eq(j())]))
            .send(Msg::to(RspWr, me(), j()))
            .set("state", int(IDLE))
            .set("src_save", int(0)),
    );

    // cleanup (local replacement or invalidation answer), always acknowledged
    for k in 0..th {
        rules.push(
            Rule::new(format!("clnup_list_{k}"))
                .param("j", 0, p - 1)
                .when(holds_copies().and(listed(k, j())))
                .recv(Msg::to(Clnup, me(), j()))
                .send(Msg::to(Clack, me(), j()))
                .set_cell("v_c_id", k, int(0))
                .set_cell("c_id", k, int(0))
                .set("n_copies", n().sub(int(1))),
        );
    }
    rules.push(
        Rule::new("clnup_count")
            .param("j", 0, p - 1)
            .when(holds_copies().and(count_mode()))
            .recv(Msg::to(Clnup, me(), j()))
            .send(Msg::to(Clack, me(), j()))
            .set("n_copies", n().sub(int(1))),
    );
    if legacy {
        // old broadcast answer: counted like a cleanup, never acknowledged
        for k in 0..th {
            rules.push(
                Rule::new(format!("rsp_binv_list_{k}"))
                    .param("j", 0, p - 1)
                    .when(holds_copies().and(listed(k, j())))
                    .recv(Msg::to(RspBInv, me(), j()))
                    .set_cell("v_c_id", k, int(0))
                    .set_cell("c_id", k, int(0))
                    .set("n_copies", n().sub(int(1))),
            );
        }
        rules.push(
            Rule::new("rsp_binv_count")
                .param("j", 0, p - 1)
                .when(holds_copies().and(count_mode()))
                .recv(Msg::to(RspBInv, me(), j()))
                .set("n_copies", n().sub(int(1))),
        );
    }

    if cfg.l2_eviction {
        // replacement of a line without copies
        rules.push(
            Rule::new("evict_clean")
                .when(Expr::all([at(IDLE), n().eq(int(0)), var("dirty").eq(int(0))]))
                .set("state", int(EMPTY)),
        );
        rules.push(
            Rule::new("evict_dirty")
                .when(Expr::all([at(IDLE), n().eq(int(0)), var("dirty").eq(int(1))]))
                .send(Msg::new(Put, me()))
                .set("state", int(EVICT_PUT)),
        );
        // multicast invalidate of the registered copies
        rules.push(
            Rule::new("evict_multicast")
                .when(Expr::all([at(IDLE), n().gt(int(0)), list_mode()]))
                .set("state", int(MINV_SEND))
                .set("cpt", int(0)),
        );
        let minv_elig = |k: usize| cell("v_c_id", k).eq(int(1));
        multicast_posts(&mut rules, th, p, "minv", MInv, MINV_SEND, MINV_WAIT, &minv_elig, false);
        // broadcast invalidate when only the count is known
        rules.push(
            Rule::new("evict_broadcast")
                .when(at(IDLE).and(count_mode()))
                .set("state", int(EBINV_SEND))
                .set("cpt", int(0)),
        );
        broadcast_posts(&mut rules, p, "ebinv", EBINV_SEND, EBINV_WAIT);
        rules.push(
            Rule::new("evict_done_clean")
                .when(Expr::all([at_any(&[MINV_WAIT, EBINV_WAIT]), n().eq(int(0)), var("dirty").eq(int(0))]))
                .set("state", int(EMPTY)),
        );
        rules.push(
            Rule::new("evict_done_dirty")
                .when(Expr::all([at_any(&[MINV_WAIT, EBINV_WAIT]), n().eq(int(0)), var("dirty").eq(int(1))]))
                .send(Msg::new(Put, me()))
                .set("state", int(EVICT_PUT)),
        );
        rules.push(
            Rule::new("put_done")
                .when(at(EVICT_PUT))
                .recv(Msg::new(RspPut, me()))
                .set("state", int(EMPTY))
                .set("dirty", int(0)),
        );
    }
    rules
}

/// Posting loop over sharer-list slots: from `cpt`, ineligible slots are
/// skipped within the same step; the last post moves to `wait`.
#[allow(clippy::too_many_arguments)]
fn multicast_posts(
    rules: &mut Vec<Rule>,
    th: usize,
    p: i32,
    tag: &str,
    kind: crate::dhccp::MessageType,
    send: i32,
    wait: i32,
    elig: &dyn Fn(usize) -> Expr,
    count_answers: bool,
) {
    let skipped = |k: usize| Expr::all((0..k).map(|m| var("cpt").gt(int(m as i32)).or(elig(m).not())));
    for k in 0..th {
        let more = Expr::any((k + 1..th).map(elig));
        let base = Rule::new(String::new())
            .param("t", 0, p - 1)
            .when(Expr::all([
                at(send),
                var("cpt").le(int(k as i32)),
                skipped(k),
                elig(k),
                cell("c_id", k).eq(par("t")),
            ]))
            .send(Msg::to(kind, me(), par("t")));
        let base = if count_answers { base.set("rsp_cpt", var("rsp_cpt").add(int(1))) } else { base };
        let mut next = base.clone().when(more.clone()).set("cpt", int(k as i32 + 1));
        next.name = format!("{tag}_post_{k}");
        rules.push(next);
        let mut last = base.when(more.not()).set("state", int(wait)).set("cpt", int(0));
        last.name = format!("{tag}_last_{k}");
        rules.push(last);
    }
    // every remaining copy was cleaned up meanwhile
    rules.push(
        Rule::new(format!("{tag}_none")).when(at(send).and(skipped(th))).set("state", int(wait)).set("cpt", int(0)),
    );
}

fn broadcast_posts(rules: &mut Vec<Rule>, p: i32, tag: &str, send: i32, wait: i32) {
    for t in 0..p {
        let r = Rule::new(format!("{tag}_post_{t}")).when(at(send).and(var("cpt").eq(int(t)))).send(Msg::to(
            crate::dhccp::MessageType::BInv,
            me(),
            int(t),
        ));
        rules.push(if t + 1 < p { r.set("cpt", int(t + 1)) } else { r.set("state", int(wait)).set("cpt", int(0)) });
    }
}

fn l2_vars(cfg: &Config) -> Vec<VarDecl> {
    let p = cfg.nb_proc as i32;
    let th = cfg.cache_th;
    let mut vars = vec![
        VarDecl::new("state", 0, l2_loc::NAMES.len() as i32 - 1, l2_loc::INIT),
        VarDecl::new("line_addr", 0, cfg.nb_l2 as i32 - 1, 0),
        VarDecl::new("n_copies", 0, p, 0),
        VarDecl::new("dirty", 0, 1, 0),
        VarDecl::new("src_save", 0, p - 1, 0),
        VarDecl::new("cpt", 0, p.max(th as i32), 0),
        VarDecl::new("rsp_cpt", 0, th as i32, 0),
    ];
    vars.extend(VarDecl::array("v_c_id", th, 0, 1, 0));
    vars.extend(VarDecl::array("c_id", th, 0, p - 1, 0));
    vars
}

fn l2_init(cfg: &Config) -> TransitionDecl {
    TransitionDecl::new("t_init")
        .param("a", 0, cfg.nb_l2 as i32 - 1)
        .guard(at(l2_loc::INIT))
        .label("init", vec![par("a")])
        .actions([Stmt::set("state", int(l2_loc::EMPTY)), Stmt::set("line_addr", par("a"))])
}

fn l2_automaton(cfg: &Config) -> LeafType {
    leaf("CacheL2", l2_vars(cfg), &l2_rules(cfg), vec![l2_init(cfg)])
}

/// L1 automaton of the current protocol.
pub fn fixed_l1_automaton(cfg: &Config) -> LeafType {
    l1_automaton(&Config { variant: Variant::Fixed, ..cfg.clone() })
}

/// L2 automaton of the current protocol.
pub fn fixed_l2_automaton(cfg: &Config) -> LeafType {
    l2_automaton(&Config { variant: Variant::Fixed, ..cfg.clone() })
}

/// L1 and L2 automata of the earlier protocol, which acknowledged
/// broadcast invalidations with RSP_B_INV instead of a cleanup.
pub fn legacy_variants(cfg: &Config) -> (LeafType, LeafType) {
    let legacy = Config { variant: Variant::Legacy, ..cfg.clone() };
    (l1_automaton(&legacy), l2_automaton(&legacy))
}

pub(crate) fn automata(cfg: &Config) -> (LeafType, LeafType) {
    (l1_automaton(cfg), l2_automaton(cfg))
}
