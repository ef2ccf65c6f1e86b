//! Variables, propagation to fix-point and depth-first search.

use std::collections::VecDeque;
use std::time::Instant;

use crate::seqvar::{Node, SequenceDomain};
use crate::state::{Level, RevInt, Trail};

/// Domain wipeout. Raised by any update that empties a domain; the search
/// catches it and restores the trail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("domain wipeout")]
pub struct Inconsistency;

pub type CpResult<T> = Result<T, Inconsistency>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVar(pub(crate) usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeqVar(pub(crate) usize);

impl SeqVar {
    pub fn index(self) -> usize {
        self.0
    }
}

impl IntVar {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A domain change, also used as a propagator subscription.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarEvent {
    /// Either bound of an integer variable moved.
    Int(IntVar),
    /// Any change of a sequence domain (edges, members, statuses).
    Seq(SeqVar),
    /// The node became required, excluded or a member.
    SeqNode(SeqVar, Node),
}

/// Boolean "is `node` visited by `seq`" channeled onto the sequence domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoolVisitView {
    pub seq: SeqVar,
    pub node: Node,
}

impl BoolVisitView {
    pub fn new(seq: SeqVar, node: Node) -> Self {
        BoolVisitView { seq, node }
    }
}

/// Every reversible variable of a model, plus pending change events.
#[derive(Debug, Default)]
pub struct Store {
    trail: Trail,
    int_min: Vec<RevInt>,
    int_max: Vec<RevInt>,
    seqs: Vec<SequenceDomain>,
    events: Vec<VarEvent>,
    node_buf: Vec<Node>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn trail(&self) -> &Trail {
        &self.trail
    }

    pub fn save_level(&mut self) -> Level {
        self.trail.save_level()
    }

    pub fn restore_level(&mut self, level: Level) {
        self.trail.restore_level(level);
        self.events.clear();
    }

    // ---- integer variables ----

    pub fn new_int(&mut self, lo: i64, hi: i64) -> IntVar {
        assert!(lo <= hi, "empty initial interval [{lo}, {hi}]");
        let x = IntVar(self.int_min.len());
        self.int_min.push(self.trail.new_int(lo));
        self.int_max.push(self.trail.new_int(hi));
        x
    }

    pub fn int_count(&self) -> usize {
        self.int_min.len()
    }

    #[inline]
    pub fn min(&self, x: IntVar) -> i64 {
        self.trail.get(self.int_min[x.0])
    }

    #[inline]
    pub fn max(&self, x: IntVar) -> i64 {
        self.trail.get(self.int_max[x.0])
    }

    pub fn is_bound(&self, x: IntVar) -> bool {
        self.min(x) == self.max(x)
    }

    pub fn set_min(&mut self, x: IntVar, v: i64) -> CpResult<()> {
        if v > self.max(x) {
            return Err(Inconsistency);
        }
        if v > self.min(x) {
            self.trail.set(self.int_min[x.0], v);
            self.events.push(VarEvent::Int(x));
        }
        Ok(())
    }

    pub fn set_max(&mut self, x: IntVar, v: i64) -> CpResult<()> {
        if v < self.min(x) {
            return Err(Inconsistency);
        }
        if v < self.max(x) {
            self.trail.set(self.int_max[x.0], v);
            self.events.push(VarEvent::Int(x));
        }
        Ok(())
    }

    pub fn assign(&mut self, x: IntVar, v: i64) -> CpResult<()> {
        self.set_min(x, v)?;
        self.set_max(x, v)
    }

    // ---- sequence variables ----

    pub fn new_seq(&mut self, n: usize, alpha: Node, omega: Node) -> SeqVar {
        let s = SeqVar(self.seqs.len());
        let d = SequenceDomain::new(&mut self.trail, n, alpha, omega);
        self.seqs.push(d);
        s
    }

    pub fn seq_count(&self) -> usize {
        self.seqs.len()
    }

    pub fn seq_vars(&self) -> impl Iterator<Item = SeqVar> {
        (0..self.seqs.len()).map(SeqVar)
    }

    /// Read access to a domain together with the trail its queries need.
    #[inline]
    pub fn seq(&self, s: SeqVar) -> (&SequenceDomain, &Trail) {
        (&self.seqs[s.0], &self.trail)
    }

    fn flush(&mut self, s: SeqVar) {
        let d = &mut self.seqs[s.0];
        if d.take_changed() {
            self.events.push(VarEvent::Seq(s));
        }
        d.drain_status_changes(&mut self.node_buf);
        for v in self.node_buf.drain(..) {
            self.events.push(VarEvent::SeqNode(s, v));
        }
    }

    pub fn insert(&mut self, s: SeqVar, v1: Node, v2: Node) -> CpResult<()> {
        let r = self.seqs[s.0].insert(&mut self.trail, v1, v2);
        self.flush(s);
        r
    }

    pub fn insert_at_end(&mut self, s: SeqVar, v: Node) -> CpResult<()> {
        let r = self.seqs[s.0].insert_at_end(&mut self.trail, v);
        self.flush(s);
        r
    }

    pub fn not_between(&mut self, s: SeqVar, v1: Node, v2: Node, v3: Node) -> CpResult<()> {
        let r = self.seqs[s.0].not_between(&mut self.trail, v1, v2, v3);
        self.flush(s);
        r
    }

    pub fn require(&mut self, s: SeqVar, v: Node) -> CpResult<()> {
        let r = self.seqs[s.0].require(&mut self.trail, v);
        self.flush(s);
        r
    }

    pub fn exclude(&mut self, s: SeqVar, v: Node) -> CpResult<()> {
        let r = self.seqs[s.0].exclude(&mut self.trail, v);
        self.flush(s);
        r
    }

    pub fn all_seqs_fixed(&self) -> bool {
        self.seqs.iter().all(|d| d.is_fixed(&self.trail))
    }

    // ---- boolean visit views ----

    /// Fixed iff the node is required or excluded.
    pub fn view_is_fixed(&self, b: BoolVisitView) -> bool {
        !self.seqs[b.seq.0].is_possible(&self.trail, b.node)
    }

    /// `false` is in the domain iff the node is not required.
    pub fn view_can_be_false(&self, b: BoolVisitView) -> bool {
        !self.seqs[b.seq.0].is_required(&self.trail, b.node)
    }

    /// `true` is in the domain iff the node is not excluded.
    pub fn view_can_be_true(&self, b: BoolVisitView) -> bool {
        !self.seqs[b.seq.0].is_excluded(&self.trail, b.node)
    }

    /// Assigning true requires the node; false excludes it.
    pub fn view_assign(&mut self, b: BoolVisitView, value: bool) -> CpResult<()> {
        if value {
            self.require(b.seq, b.node)
        } else {
            self.exclude(b.seq, b.node)
        }
    }

    fn take_events(&mut self, out: &mut Vec<VarEvent>) {
        out.append(&mut self.events);
    }
}

/// A filtering procedure. Implementations recompute from the current
/// domains on each call and must be idempotent at fix-point.
pub trait Propagator {
    fn propagate(&mut self, store: &mut Store) -> CpResult<()>;

    /// Events that schedule this propagator.
    fn subscriptions(&self) -> Vec<VarEvent>;

    fn name(&self) -> &str {
        std::any::type_name::<Self>()
    }
}

type Apply = Box<dyn Fn(&mut Store) -> CpResult<()>>;

/// One branch of a search node.
pub struct Decision {
    /// Sort key; lower is explored first by branchings that sort.
    pub score: i64,
    pub apply: Apply,
}

impl Decision {
    pub fn new(score: i64, apply: impl Fn(&mut Store) -> CpResult<()> + 'static) -> Self {
        Decision { score, apply: Box::new(apply) }
    }
}

impl std::fmt::Debug for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Decision").field("score", &self.score).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Limits {
    pub max_failures: Option<u64>,
    pub deadline: Option<Instant>,
    pub max_solutions: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub failures: u64,
    pub solutions: u64,
    /// Best objective lower bound seen at a solution.
    pub best: Option<i64>,
    /// The tree was fully explored (no limit was hit).
    pub complete: bool,
}

struct Stop;

/// Propagators over a [`Store`], with event-driven scheduling.
pub struct Solver {
    pub store: Store,
    props: Vec<Box<dyn Propagator>>,
    int_subs: Vec<Vec<usize>>,
    seq_subs: Vec<Vec<usize>>,
    node_subs: Vec<Vec<Vec<usize>>>,
    queue: VecDeque<usize>,
    scheduled: Vec<bool>,
    event_buf: Vec<VarEvent>,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Self::with_store(Store::new())
    }

    pub fn with_store(store: Store) -> Self {
        Solver {
            store,
            props: Vec::new(),
            int_subs: Vec::new(),
            seq_subs: Vec::new(),
            node_subs: Vec::new(),
            queue: VecDeque::new(),
            scheduled: Vec::new(),
            event_buf: Vec::new(),
        }
    }

    pub fn propagator_count(&self) -> usize {
        self.props.len()
    }

    /// Registers `p`, runs it and propagates to fix-point.
    pub fn post(&mut self, p: impl Propagator + 'static) -> CpResult<()> {
        self.post_boxed(Box::new(p))
    }

    pub fn post_boxed(&mut self, p: Box<dyn Propagator>) -> CpResult<()> {
        let id = self.props.len();
        for sub in p.subscriptions() {
            match sub {
                VarEvent::Int(x) => {
                    if self.int_subs.len() <= x.0 {
                        self.int_subs.resize(x.0 + 1, Vec::new());
                    }
                    self.int_subs[x.0].push(id);
                }
                VarEvent::Seq(s) => {
                    if self.seq_subs.len() <= s.0 {
                        self.seq_subs.resize(s.0 + 1, Vec::new());
                    }
                    self.seq_subs[s.0].push(id);
                }
                VarEvent::SeqNode(s, v) => {
                    if self.node_subs.len() <= s.0 {
                        self.node_subs.resize(s.0 + 1, Vec::new());
                    }
                    let per_node = &mut self.node_subs[s.0];
                    if per_node.len() <= v {
                        per_node.resize(v + 1, Vec::new());
                    }
                    per_node[v].push(id);
                }
            }
        }
        self.props.push(p);
        self.scheduled.push(false);
        self.schedule(id);
        self.fixpoint()
    }

    fn schedule(&mut self, id: usize) {
        if !self.scheduled[id] {
            self.scheduled[id] = true;
            self.queue.push_back(id);
        }
    }

    fn dispatch(&mut self) {
        let mut events = std::mem::take(&mut self.event_buf);
        self.store.take_events(&mut events);
        for e in events.drain(..) {
            let subs = match e {
                VarEvent::Int(x) => self.int_subs.get(x.0),
                VarEvent::Seq(s) => self.seq_subs.get(s.0),
                VarEvent::SeqNode(s, v) => self.node_subs.get(s.0).and_then(|n| n.get(v)),
            };
            if let Some(subs) = subs {
                for &id in subs {
                    if !self.scheduled[id] {
                        self.scheduled[id] = true;
                        self.queue.push_back(id);
                    }
                }
            }
        }
        self.event_buf = events;
    }

    /// Runs scheduled propagators until no domain changes.
    pub fn fixpoint(&mut self) -> CpResult<()> {
        loop {
            self.dispatch();
            let Some(id) = self.queue.pop_front() else {
                return Ok(());
            };
            self.scheduled[id] = false;
            if let Err(e) = self.props[id].propagate(&mut self.store) {
                for id in self.queue.drain(..) {
                    self.scheduled[id] = false;
                }
                self.store.events.clear();
                return Err(e);
            }
        }
    }

    /// Runs every propagator once more; returns whether any domain changed.
    /// Used to check idempotence at fix-point.
    pub fn rerun_all(&mut self) -> CpResult<bool> {
        self.store.events.clear();
        for id in 0..self.props.len() {
            self.props[id].propagate(&mut self.store)?;
        }
        let changed = !self.store.events.is_empty();
        self.store.events.clear();
        Ok(changed)
    }

    /// Applies `f`, then propagates.
    pub fn apply(&mut self, f: impl FnOnce(&mut Store) -> CpResult<()>) -> CpResult<()> {
        f(&mut self.store)?;
        self.fixpoint()
    }

    /// Depth-first search from the current state.
    ///
    /// `branching` returns the decisions of a node, or an empty list at a
    /// solution. With an objective, every decision is followed by the bound
    /// `objective ≤ best − 1`. The store is restored to its entry state
    /// before returning.
    pub fn dfs<B, S>(
        &mut self,
        branching: &mut B,
        objective: Option<IntVar>,
        limits: &Limits,
        on_solution: &mut S,
    ) -> SearchStats
    where
        B: FnMut(&Store) -> Vec<Decision>,
        S: FnMut(&Store),
    {
        let mut stats = SearchStats::default();
        let root = self.store.save_level();
        let res = match self.fixpoint() {
            Ok(()) => self.dfs_node(branching, objective, limits, on_solution, &mut stats),
            Err(_) => {
                stats.failures += 1;
                Ok(())
            }
        };
        self.store.restore_level(root);
        stats.complete = res.is_ok();
        stats
    }

    fn dfs_node<B, S>(
        &mut self,
        branching: &mut B,
        objective: Option<IntVar>,
        limits: &Limits,
        on_solution: &mut S,
        stats: &mut SearchStats,
    ) -> Result<(), Stop>
    where
        B: FnMut(&Store) -> Vec<Decision>,
        S: FnMut(&Store),
    {
        stats.nodes += 1;
        if limits.max_failures.is_some_and(|m| stats.failures >= m)
            || limits.deadline.is_some_and(|d| Instant::now() >= d)
        {
            return Err(Stop);
        }
        let decisions = branching(&self.store);
        if decisions.is_empty() {
            stats.solutions += 1;
            if let Some(obj) = objective {
                let v = self.store.min(obj);
                stats.best = Some(stats.best.map_or(v, |b| b.min(v)));
            }
            on_solution(&self.store);
            if limits.max_solutions.is_some_and(|m| stats.solutions >= m) {
                return Err(Stop);
            }
            return Ok(());
        }
        for d in decisions {
            let level = self.store.save_level();
            let mut ok = (d.apply)(&mut self.store);
            if ok.is_ok() {
                if let (Some(obj), Some(best)) = (objective, stats.best) {
                    ok = self.store.set_max(obj, best - 1);
                }
            }
            let res = match ok.and_then(|_| self.fixpoint()) {
                Ok(()) => self.dfs_node(branching, objective, limits, on_solution, stats),
                Err(_) => {
                    stats.failures += 1;
                    Ok(())
                }
            };
            self.store.restore_level(level);
            res?;
        }
        Ok(())
    }
}
