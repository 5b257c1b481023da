//! The cache coherence protocol as a hierarchical transition system.
//!
//! [`build_system`] assembles one configuration: `nb_proc` processor/L1
//! composites with their private channels, `nb_l2` single-line L2 banks and a
//! memory, joined by the shared networks. [`Protocol`] wraps the grounded model
//! together with the variable layout that the protocol-level predicates and
//! the property templates read.

mod automata;
mod messages;
mod rules;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::checker::{AtomResolver, FairnessSpec, StatePredicate};
use crate::kernel::{
    ground_model, Call, CompositeType, Expr, KernelError, StateVector, SyncDecl, SystemModel, TypeTable,
};

pub use automata::{
    channel_addr_type, channel_addr_type_id, fixed_l1_automaton, fixed_l2_automaton, l1_loc, l2_loc, legacy_variants,
    memory, proc_loc, processor,
};
pub use messages::{message_table_tsv, Channel, Endpoint, MessageType, TYPE_CODES};

/// Upper bound on the sharer-list size.
pub const MAX_CACHE_TH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Variant {
    #[default]
    Fixed,
    /// Earlier protocol revision with the broadcast-invalidate counting bug.
    Legacy,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Fixed => "fixed",
            Variant::Legacy => "legacy",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixed" => Ok(Variant::Fixed),
            "legacy" => Ok(Variant::Legacy),
            _ => Err(format!("unknown variant `{s}` (expected fixed or legacy)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Config {
    pub nb_proc: usize,
    pub nb_l2: usize,
    pub cache_th: usize,
    pub variant: Variant,
    /// Lets an idle L2 line be replaced at any time, exercising the
    /// invalidate-on-replacement transactions.
    pub l2_eviction: bool,
}

impl Config {
    pub fn new(nb_proc: usize, nb_l2: usize, cache_th: usize) -> Self {
        Config { nb_proc, nb_l2, cache_th, variant: Variant::Fixed, l2_eviction: false }
    }

    pub fn legacy(mut self) -> Self {
        self.variant = Variant::Legacy;
        self
    }

    pub fn with_eviction(mut self, on: bool) -> Self {
        self.l2_eviction = on;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.nb_proc == 0 {
            return Err(ConfigError::Empty("nb_proc"));
        }
        if self.nb_l2 == 0 {
            return Err(ConfigError::Empty("nb_l2"));
        }
        if self.cache_th == 0 {
            return Err(ConfigError::Empty("cache_th"));
        }
        if self.cache_th > MAX_CACHE_TH {
            return Err(ConfigError::ThresholdTooLarge(self.cache_th));
        }
        if self.nb_proc > 64 || self.nb_l2 > 64 {
            return Err(ConfigError::TooLarge);
        }
        Ok(())
    }

    /// Compact name such as `2-2-1` or `2-2-1-legacy`.
    pub fn tag(&self) -> String {
        let mut s = format!("{}-{}-{}", self.nb_proc, self.nb_l2, self.cache_th);
        if self.variant == Variant::Legacy {
            s.push_str("-legacy");
        }
        if self.l2_eviction {
            s.push_str("-evict");
        }
        s
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0} must be at least 1")]
    Empty(&'static str),
    #[error("cache_th = {0} exceeds the supported maximum of {MAX_CACHE_TH}")]
    ThresholdTooLarge(usize),
    #[error("nb_proc and nb_l2 are limited to 64")]
    TooLarge,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Type table of the whole system, rooted at `Main`.
pub fn type_table(cfg: &Config) -> Result<TypeTable, ConfigError> {
    cfg.validate()?;
    let (l1, l2) = automata::automata(cfg);
    let p = cfg.nb_proc as i32;

    let mut cpu = CompositeType::new("ProcessorCacheL1")
        .instance("p", "Processor")
        .instance("c", "CacheL1")
        .instance(Channel::PL1DTREQ.instance(), "ChannelAddrType")
        .instance(Channel::L1PDTRSP.instance(), "ChannelAddrType")
        .sync(SyncDecl::new("init").param("id", 0, p - 1).label("init", vec![Expr::param("id")]).call(Call::on(
            "c",
            "init",
            vec![Expr::param("id")],
        )));
    for r in automata::processor_rules(cfg) {
        cpu = cpu.sync(r.sync("p", None, Channel::is_local, false));
    }
    let l1_rules = automata::l1_rules(cfg);
    for r in &l1_rules {
        cpu = cpu.sync(r.sync("c", None, Channel::is_local, !r.is_local()));
    }

    let mut main = CompositeType::new("Main")
        .instance_array("cpu", "ProcessorCacheL1", cfg.nb_proc)
        .instance_array("l2", "CacheL2", cfg.nb_l2)
        .instance("mem", "Memory");
    for ch in Channel::SHARED_L1L2 {
        main = main.instance(ch.instance(), "ChannelAddrTypeId");
    }
    main = main
        .instance(Channel::L2MEMDTREQ.instance(), "ChannelAddrType")
        .instance(Channel::MEML2DTRSP.instance(), "ChannelAddrType");

    let mut init = SyncDecl::new("init");
    for j in 0..cfg.nb_proc as i32 {
        init = init.call(Call::on_elem("cpu", Expr::int(j), "init", vec![Expr::int(j)]));
    }
    for a in 0..cfg.nb_l2 as i32 {
        init = init.call(Call::on_elem("l2", Expr::int(a), "init", vec![Expr::int(a)]));
    }
    main = main.sync(init);
    for r in l1_rules.iter().filter(|r| !r.is_local()) {
        main = main.sync(r.sync("cpu", Some(p), |c| !c.is_local(), false));
    }
    for r in automata::l2_rules(cfg).iter().filter(|r| !r.is_internal()) {
        main = main.sync(r.sync("l2", Some(cfg.nb_l2 as i32), |_| true, false));
    }
    for r in automata::memory_rules(cfg) {
        main = main.sync(r.sync("mem", None, |_| true, false));
    }

    Ok(TypeTable::new()
        .leaf(channel_addr_type(cfg))
        .leaf(channel_addr_type_id(cfg))
        .leaf(processor(cfg))
        .leaf(memory(cfg))
        .leaf(l1)
        .leaf(l2)
        .composite(cpu)
        .composite(main))
}

/// Builds and grounds the system for `cfg`.
pub fn build_system(cfg: &Config) -> Result<Protocol, ConfigError> {
    let types = type_table(cfg)?;
    let mut model = ground_model(&types, "Main")?;
    for (i, name) in proc_loc::NAMES.iter().enumerate() {
        model.add_symbol(*name, i as i32);
    }
    for (i, name) in l1_loc::NAMES.iter().enumerate() {
        model.add_symbol(*name, i as i32);
    }
    for (i, name) in l2_loc::NAMES.iter().enumerate() {
        model.add_symbol(*name, i as i32);
    }
    for m in MessageType::ALL {
        model.add_symbol(m.name(), m.code());
    }
    let layout = Layout::new(&model, cfg)?;
    Ok(Protocol { config: cfg.clone(), model, layout: Arc::new(layout) })
}

#[derive(Debug, Clone)]
pub struct ChanVars {
    pub chan: Channel,
    /// Owning processor composite for the private channels.
    pub cpu: Option<usize>,
    pub full: usize,
    pub addr: usize,
    pub kind: usize,
    pub id: Option<usize>,
}

/// A message found in a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pending {
    pub chan: Channel,
    pub cpu: Option<usize>,
    pub addr: i32,
    pub kind: Option<MessageType>,
    pub code: i32,
    pub id: Option<i32>,
}

#[derive(Debug, Clone)]
struct CpuVars {
    p_state: usize,
    p_addr: usize,
    c_state: usize,
    v_addr: usize,
}

#[derive(Debug, Clone)]
struct L2Vars {
    state: usize,
    n_copies: usize,
    src_save: usize,
    v_c_id: Vec<usize>,
    c_id: Vec<usize>,
}

/// Variable indices of the protocol-level quantities.
#[derive(Debug, Clone)]
pub struct Layout {
    cfg: Config,
    cpus: Vec<CpuVars>,
    l2s: Vec<L2Vars>,
    chans: Vec<ChanVars>,
}

impl Layout {
    fn new(model: &SystemModel, cfg: &Config) -> Result<Self, KernelError> {
        let ix = |name: String| model.var_index(&name).ok_or(KernelError::UnknownVariable(name));
        let chan = |prefix: String, ch: Channel, cpu: Option<usize>| -> Result<ChanVars, KernelError> {
            let base = format!("{prefix}{}", ch.instance());
            Ok(ChanVars {
                chan: ch,
                cpu,
                full: ix(format!("{base}.isFull"))?,
                addr: ix(format!("{base}.addr"))?,
                kind: ix(format!("{base}.type"))?,
                id: if ch.has_id() { Some(ix(format!("{base}.id"))?) } else { None },
            })
        };
        let mut cpus = Vec::new();
        let mut chans = Vec::new();
        for j in 0..cfg.nb_proc {
            cpus.push(CpuVars {
                p_state: ix(format!("cpu[{j}].p.state"))?,
                p_addr: ix(format!("cpu[{j}].p.addr"))?,
                c_state: ix(format!("cpu[{j}].c.state"))?,
                v_addr: ix(format!("cpu[{j}].c.v_addr"))?,
            });
            for ch in [Channel::PL1DTREQ, Channel::L1PDTRSP] {
                chans.push(chan(format!("cpu[{j}]."), ch, Some(j))?);
            }
        }
        let mut l2s = Vec::new();
        for a in 0..cfg.nb_l2 {
            l2s.push(L2Vars {
                state: ix(format!("l2[{a}].state"))?,
                n_copies: ix(format!("l2[{a}].n_copies"))?,
                src_save: ix(format!("l2[{a}].src_save"))?,
                v_c_id: (0..cfg.cache_th).map(|k| ix(format!("l2[{a}].v_c_id[{k}]"))).collect::<Result<_, _>>()?,
                c_id: (0..cfg.cache_th).map(|k| ix(format!("l2[{a}].c_id[{k}]"))).collect::<Result<_, _>>()?,
            });
        }
        for ch in Channel::SHARED_L1L2.into_iter().chain([Channel::L2MEMDTREQ, Channel::MEML2DTRSP]) {
            chans.push(chan(String::new(), ch, None)?);
        }
        Ok(Layout { cfg: cfg.clone(), cpus, l2s, chans })
    }

    pub fn channels(&self) -> &[ChanVars] {
        &self.chans
    }

    pub fn pending(&self, s: &[i32]) -> Vec<Pending> {
        self.chans
            .iter()
            .filter(|c| s[c.full] == 1)
            .map(|c| Pending {
                chan: c.chan,
                cpu: c.cpu,
                addr: s[c.addr],
                kind: MessageType::from_code(s[c.kind]),
                code: s[c.kind],
                id: c.id.map(|i| s[i]),
            })
            .collect()
    }

    pub fn l1_state(&self, s: &[i32], j: usize) -> i32 {
        s[self.cpus[j].c_state]
    }

    pub fn processor_state(&self, s: &[i32], j: usize) -> i32 {
        s[self.cpus[j].p_state]
    }

    pub fn processor_addr(&self, s: &[i32], j: usize) -> i32 {
        s[self.cpus[j].p_addr]
    }

    pub fn l2_state(&self, s: &[i32], a: usize) -> i32 {
        s[self.l2s[a].state]
    }

    pub fn n_copies(&self, s: &[i32], a: usize) -> i32 {
        s[self.l2s[a].n_copies]
    }

    /// L1 `j` holds a valid copy of `a` (possibly with a write outstanding).
    pub fn holds(&self, s: &[i32], j: usize, a: usize) -> bool {
        let c = &self.cpus[j];
        matches!(s[c.c_state], l1_loc::VALID | l1_loc::WRITE_WAIT_VALID) && s[c.v_addr] == a as i32
    }

    pub fn sharer_census(&self, s: &[i32], a: usize) -> usize {
        (0..self.cpus.len()).filter(|&j| self.holds(s, j, a)).count()
    }

    pub fn census_ok(&self, s: &[i32], a: usize) -> bool {
        self.n_copies(s, a) == self.sharer_census(s, a) as i32
    }

    pub fn quiescent(&self, s: &[i32]) -> bool {
        self.chans.iter().all(|c| s[c.full] == 0)
            && self.cpus.iter().all(|c| {
                s[c.p_state] == proc_loc::IDLE && matches!(s[c.c_state], l1_loc::INIT | l1_loc::EMPTY | l1_loc::VALID)
            })
            && self.l2s.iter().all(|l| matches!(s[l.state], l2_loc::INIT | l2_loc::EMPTY | l2_loc::IDLE))
    }

    fn listed(&self, s: &[i32], a: usize) -> Vec<i32> {
        let l = &self.l2s[a];
        let mut ids: Vec<i32> = l.v_c_id.iter().zip(&l.c_id).filter(|(v, _)| s[**v] == 1).map(|(_, c)| s[*c]).collect();
        ids.sort_unstable();
        ids
    }

    /// The line keeps an explicit sharer list (as opposed to a bare count).
    pub fn list_mode(&self, s: &[i32], a: usize) -> bool {
        self.listed(s, a).len() as i32 == self.n_copies(s, a)
    }

    /// In list mode, the registered ids are exactly the L1s holding a copy.
    pub fn sharer_list_sound(&self, s: &[i32], a: usize) -> bool {
        if !self.list_mode(s, a) {
            return true;
        }
        let holders: Vec<i32> = (0..self.cpus.len()).filter(|&j| self.holds(s, j, a)).map(|j| j as i32).collect();
        self.listed(s, a) == holders
    }

    /// More copies than list slots implies the list was freed.
    pub fn modes_exclusive(&self, s: &[i32], a: usize) -> bool {
        self.n_copies(s, a) <= self.cfg.cache_th as i32 || self.listed(s, a).is_empty()
    }

    pub fn channels_flushed(&self, s: &[i32]) -> bool {
        self.chans
            .iter()
            .all(|c| s[c.full] == 1 || (s[c.addr] == 0 && s[c.kind] == 0 && c.id.is_none_or(|i| s[i] == 0)))
    }

    /// Every message sits on the network its kind belongs to.
    pub fn network_separation(&self, s: &[i32]) -> bool {
        self.pending(s).iter().all(|p| p.kind.is_some_and(|k| k.channel() == p.chan))
    }

    /// No read request travels while a cleanup of the same line by the same L1 is unacknowledged.
    pub fn clack_rule(&self, s: &[i32]) -> bool {
        let pending = self.pending(s);
        let reads = pending.iter().filter(|p| p.kind == Some(MessageType::Rd));
        for rd in reads {
            let j = rd.id.unwrap_or(-1);
            let clnup_in_flight =
                pending.iter().any(|p| p.kind == Some(MessageType::Clnup) && p.id == Some(j) && p.addr == rd.addr);
            let clack_in_flight =
                pending.iter().any(|p| p.kind == Some(MessageType::Clack) && p.id == Some(j) && p.addr == rd.addr);
            if clnup_in_flight || clack_in_flight {
                return false;
            }
        }
        true
    }

    /// Name of the first structural invariant violated by `s`, if any.
    pub fn structural_violation(&self, s: &[i32]) -> Option<String> {
        if !self.channels_flushed(s) {
            return Some("channel_flush".into());
        }
        if !self.network_separation(s) {
            return Some("network_separation".into());
        }
        if !self.clack_rule(s) {
            return Some("clack_rule".into());
        }
        for a in 0..self.l2s.len() {
            if !self.modes_exclusive(s, a) {
                return Some(format!("modes_exclusive({a})"));
            }
        }
        None
    }

    /// Directory consistency, meaningful at quiescent states.
    pub fn directory_violation(&self, s: &[i32]) -> Option<String> {
        for a in 0..self.l2s.len() {
            if !self.census_ok(s, a) {
                return Some(format!("census_ok({a})"));
            }
            if !self.sharer_list_sound(s, a) {
                return Some(format!("sharer_list_sound({a})"));
            }
        }
        None
    }

    /// L1 `i` and L1 `j` both hold `a`.
    pub fn share(&self, s: &[i32], i: usize, j: usize, a: usize) -> bool {
        self.holds(s, i, a) && self.holds(s, j, a)
    }

    /// The L2 bank of `a` is running the coherence transaction of a write from `i`.
    pub fn writes(&self, s: &[i32], i: usize, a: usize) -> bool {
        let l = &self.l2s[a];
        matches!(s[l.state], l2_loc::MUP_SEND | l2_loc::MUP_WAIT | l2_loc::BINV_SEND | l2_loc::BINV_WAIT)
            && s[l.src_save] == i as i32
    }

    /// A coherence request for line `a` is waiting to be taken by L1 `j`.
    pub fn coherence_pending(&self, s: &[i32], j: usize, a: usize) -> bool {
        self.pending(s).iter().any(|p| {
            p.chan == Channel::L2L1CPREQ
                && p.addr == a as i32
                && p.id == Some(j as i32)
                && matches!(p.kind, Some(MessageType::MUp | MessageType::MInv | MessageType::BInv))
        })
    }
}

/// A grounded protocol instance.
#[derive(Debug, Clone)]
pub struct Protocol {
    config: Config,
    model: SystemModel,
    layout: Arc<Layout>,
}

impl Protocol {
    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn model(&self) -> &SystemModel {
        &self.model
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn quiescent(&self, s: &StateVector) -> bool {
        self.layout.quiescent(s)
    }

    pub fn sharer_census(&self, s: &StateVector, addr: usize) -> usize {
        self.layout.sharer_census(s, addr)
    }

    /// Every component instance except the channels.
    pub fn components(&self) -> Vec<usize> {
        let inst = self.model.instances();
        (0..inst.len()).filter(|&i| inst[i].is_leaf && !inst[i].type_name.starts_with("Channel")).collect()
    }

    /// Weak fairness with one set per component; channels are passive and own no events.
    pub fn fairness(&self) -> FairnessSpec {
        FairnessSpec::per_instance(&self.model, &self.components())
    }

    /// Number of component instances and of channel instances.
    pub fn instance_counts(&self) -> (usize, usize) {
        let leaves = self.model.instances().iter().filter(|i| i.is_leaf);
        let (chans, comps): (Vec<_>, Vec<_>) = leaves.partition(|i| i.type_name.starts_with("Channel"));
        (comps.len(), chans.len())
    }
}

/// See [`Layout::quiescent`].
pub fn quiescent(protocol: &Protocol, state: &StateVector) -> bool {
    protocol.quiescent(state)
}

/// See [`Layout::sharer_census`].
pub fn sharer_census(protocol: &Protocol, state: &StateVector, addr: usize) -> usize {
    protocol.sharer_census(state, addr)
}

/// Property templates. With an explicit address they name a single line;
/// without one they range over every line (`share`, `writes`,
/// `coherence_pending`: some line; `census_ok`, `invalidated`: every line).
///
/// | atom | meaning |
/// |---|---|
/// | `quiescent` | channels empty, every component in a stable location |
/// | `census_ok(a)` | `l2[a].n_copies` equals the number of L1s holding `a` |
/// | `holds(i,a)` | L1 `i` holds a valid copy of `a` |
/// | `share(i,j,a)` | `holds(i,a) && holds(j,a)` |
/// | `writes(i,a)` | bank `a` runs the update or invalidate transaction of a write from `i` |
/// | `coherence_pending(j,a)` | an M_UP/M_INV/B_INV for `(j,a)` sits in L2L1CPREQ |
/// | `invalidated(j,a)`, `coherence_delivery(j,a)` | `!coherence_pending(j,a)`: L1 `j` has taken it |
/// | `shared_and_write(i,j,a)` | `share(i,j,a) && writes(i,a)` |
/// | `req_rd(k)` / `rsp_rd(k)` | processor `k` waits for / is not waiting for a read response |
/// | `structural_ok`, `directory_ok` | all structural / directory invariants hold |
impl AtomResolver for Protocol {
    fn resolve(&self, name: &str, args: &[i32]) -> Option<Result<StatePredicate, String>> {
        let l = Arc::clone(&self.layout);
        let np = self.config.nb_proc;
        let na = self.config.nb_l2;
        let cpu = |v: i32| -> Result<usize, String> {
            usize::try_from(v).ok().filter(|&x| x < np).ok_or(format!("{name}: no cache {v}"))
        };
        let line = |v: i32| -> Result<usize, String> {
            usize::try_from(v).ok().filter(|&x| x < na).ok_or(format!("{name}: no address {v}"))
        };
        let arity = |lo: usize, hi: usize| -> Result<(), String> {
            if args.len() < lo || args.len() > hi {
                Err(format!("{name} takes {lo}..={hi} arguments, got {}", args.len()))
            } else {
                Ok(())
            }
        };
        let addrs = |explicit: Option<i32>| -> Result<Vec<usize>, String> {
            match explicit {
                Some(a) => Ok(vec![line(a)?]),
                None => Ok((0..na).collect()),
            }
        };
        let build = || -> Result<StatePredicate, String> {
            Ok(match name {
                "quiescent" => {
                    arity(0, 0)?;
                    Arc::new(move |s: &[i32]| l.quiescent(s))
                }
                "census_ok" => {
                    arity(0, 1)?;
                    let a = addrs(args.first().copied())?;
                    Arc::new(move |s: &[i32]| a.iter().all(|&a| l.census_ok(s, a)))
                }
                "holds" => {
                    arity(1, 2)?;
                    let i = cpu(args[0])?;
                    let a = addrs(args.get(1).copied())?;
                    Arc::new(move |s: &[i32]| a.iter().any(|&a| l.holds(s, i, a)))
                }
                "share" => {
                    arity(2, 3)?;
                    let (i, j) = (cpu(args[0])?, cpu(args[1])?);
                    let a = addrs(args.get(2).copied())?;
                    Arc::new(move |s: &[i32]| a.iter().any(|&a| l.share(s, i, j, a)))
                }
                "writes" => {
                    arity(1, 2)?;
                    let i = cpu(args[0])?;
                    let a = addrs(args.get(1).copied())?;
                    Arc::new(move |s: &[i32]| a.iter().any(|&a| l.writes(s, i, a)))
                }
                "coherence_pending" => {
                    arity(1, 2)?;
                    let j = cpu(args[0])?;
                    let a = addrs(args.get(1).copied())?;
                    Arc::new(move |s: &[i32]| a.iter().any(|&a| l.coherence_pending(s, j, a)))
                }
                "invalidated" | "coherence_delivery" => {
                    arity(1, 2)?;
                    let j = cpu(args[0])?;
                    let a = addrs(args.get(1).copied())?;
                    Arc::new(move |s: &[i32]| a.iter().all(|&a| !l.coherence_pending(s, j, a)))
                }
                "shared_and_write" => {
                    arity(2, 3)?;
                    let (i, j) = (cpu(args[0])?, cpu(args[1])?);
                    let a = addrs(args.get(2).copied())?;
                    Arc::new(move |s: &[i32]| a.iter().any(|&a| l.share(s, i, j, a) && l.writes(s, i, a)))
                }
                "req_rd" => {
                    arity(1, 1)?;
                    let k = cpu(args[0])?;
                    Arc::new(move |s: &[i32]| l.processor_state(s, k) == proc_loc::WAIT_RD)
                }
                "rsp_rd" => {
                    arity(1, 1)?;
                    let k = cpu(args[0])?;
                    Arc::new(move |s: &[i32]| l.processor_state(s, k) != proc_loc::WAIT_RD)
                }
                "structural_ok" => {
                    arity(0, 0)?;
                    Arc::new(move |s: &[i32]| l.structural_violation(s).is_none())
                }
                "directory_ok" => {
                    arity(0, 0)?;
                    Arc::new(move |s: &[i32]| l.directory_violation(s).is_none())
                }
                _ => unreachable!(),
            })
        };
        const KNOWN: [&str; 13] = [
            "quiescent",
            "census_ok",
            "holds",
            "share",
            "writes",
            "coherence_pending",
            "invalidated",
            "coherence_delivery",
            "shared_and_write",
            "req_rd",
            "rsp_rd",
            "structural_ok",
            "directory_ok",
        ];
        KNOWN.contains(&name).then(build)
    }
}

#[cfg(test)]
mod tests;
