use crate::engine::{CpResult, Inconsistency, Propagator, SeqVar, Store, VarEvent};
use crate::seqvar::{Node, SequenceDomain};
use crate::state::Trail;

/// A pair of nodes consuming `load` from `start` up to (excluding) `end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Activity {
    pub start: Node,
    pub end: Node,
    pub load: i64,
}

/// Lower bounds on the load around each member node.
///
/// Every entry bounds the load at every point of its location: the arc
/// entering the node, the visit itself and the arc leaving it. Entries of
/// non-members are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadProfile {
    pub before: Vec<i64>,
    pub at: Vec<i64>,
    pub after: Vec<i64>,
    /// Per activity with only its start inserted: the earliest member after
    /// which its end can go.
    earliest_end: Vec<Option<Node>>,
    /// Per activity with only its end inserted: the latest member after
    /// which its start can go.
    latest_start: Vec<Option<Node>>,
}

impl LoadProfile {
    /// Builds the profile from fully and partially inserted activities.
    /// Fails if a bound exceeds `capacity` or an activity cannot be completed.
    pub fn build(dom: &SequenceDomain, tr: &Trail, acts: &[Activity], capacity: i64) -> CpResult<Self> {
        let mut p = LoadProfile::default();
        let mut members = Vec::new();
        let mut pos = Vec::new();
        p.rebuild(dom, tr, acts, capacity, &mut members, &mut pos)?;
        Ok(p)
    }

    fn rebuild(
        &mut self,
        dom: &SequenceDomain,
        tr: &Trail,
        acts: &[Activity],
        capacity: i64,
        members: &mut Vec<Node>,
        pos: &mut Vec<usize>,
    ) -> CpResult<()> {
        let n = dom.node_count();
        for v in [&mut self.before, &mut self.at, &mut self.after] {
            v.clear();
            v.resize(n, 0);
        }
        self.earliest_end.clear();
        self.earliest_end.resize(acts.len(), None);
        self.latest_start.clear();
        self.latest_start.resize(acts.len(), None);
        dom.members_into(tr, members);
        pos.clear();
        pos.resize(n, usize::MAX);
        for (i, &v) in members.iter().enumerate() {
            pos[v] = i;
        }
        for (a, act) in acts.iter().enumerate() {
            let (s, e, l) = (act.start, act.end, act.load);
            match (dom.is_member(tr, s), dom.is_member(tr, e)) {
                (true, true) => {
                    if pos[e] < pos[s] {
                        return Err(Inconsistency);
                    }
                    for &v in &members[pos[s]..pos[e]] {
                        self.at[v] += l;
                        self.after[v] += l;
                    }
                    for &v in &members[pos[s] + 1..=pos[e]] {
                        self.before[v] += l;
                    }
                }
                (true, false) => {
                    let mut k = pos[s];
                    while !dom.can_insert(tr, members[k], e) {
                        k += 1;
                        if members[k] == dom.omega() {
                            return Err(Inconsistency);
                        }
                    }
                    self.earliest_end[a] = Some(members[k]);
                    for &v in &members[pos[s]..=k] {
                        self.at[v] += l;
                    }
                    for &v in &members[pos[s] + 1..=k] {
                        self.before[v] += l;
                    }
                    for &v in &members[pos[s]..k] {
                        self.after[v] += l;
                    }
                }
                (false, true) => {
                    let mut k = pos[e];
                    loop {
                        if k == 0 {
                            return Err(Inconsistency);
                        }
                        k -= 1;
                        if dom.can_insert(tr, members[k], s) {
                            break;
                        }
                    }
                    self.latest_start[a] = Some(members[k]);
                    for &v in &members[k + 1..=pos[e]] {
                        self.before[v] += l;
                    }
                    for &v in &members[k + 1..pos[e]] {
                        self.at[v] += l;
                        self.after[v] += l;
                    }
                }
                (false, false) => {}
            }
        }
        for &v in members.iter() {
            if self.before[v] > capacity || self.at[v] > capacity || self.after[v] > capacity {
                return Err(Inconsistency);
            }
        }
        Ok(())
    }

    /// The activity could start right after member `p` and end somewhere
    /// later without exceeding `capacity`.
    fn start_fits(&self, dom: &SequenceDomain, tr: &Trail, act: &Activity, p: Node, capacity: i64) -> bool {
        let room = capacity - act.load;
        let mut w = p;
        loop {
            if self.after[w] > room {
                return false;
            }
            if dom.can_insert(tr, w, act.end) {
                return true;
            }
            w = dom.next(tr, w);
            if w == dom.omega() || self.before[w].max(self.at[w]) > room {
                return false;
            }
        }
    }

    /// Mirror of [`Self::start_fits`] for an end placed right after `q`.
    fn end_fits(&self, dom: &SequenceDomain, tr: &Trail, act: &Activity, q: Node, capacity: i64) -> bool {
        let room = capacity - act.load;
        let mut w = q;
        loop {
            if self.after[w] > room {
                return false;
            }
            if dom.can_insert(tr, w, act.start) {
                return true;
            }
            if w == dom.alpha() || self.before[w].max(self.at[w]) > room {
                return false;
            }
            w = dom.prev(tr, w);
        }
    }
}

/// Load carried along the sequence never exceeds `capacity`; see
/// [`LoadProfile`] for the bounds used.
///
/// Companion constraints (start visited iff end visited, start before end)
/// are expected to be posted separately.
pub struct Cumulative {
    seq: SeqVar,
    acts: Vec<Activity>,
    capacity: i64,
    profile: LoadProfile,
    members: Vec<Node>,
    pos: Vec<usize>,
    buf: Vec<Node>,
}

impl Cumulative {
    /// Panics if an activity has `start == end` or a non-positive load.
    pub fn new(seq: SeqVar, acts: Vec<Activity>, capacity: i64) -> Self {
        for a in &acts {
            assert!(a.start != a.end, "activity start and end must differ");
            assert!(a.load > 0, "activity load must be positive");
        }
        Cumulative {
            seq,
            acts,
            capacity,
            profile: LoadProfile::default(),
            members: Vec::new(),
            pos: Vec::new(),
            buf: Vec::new(),
        }
    }
}

impl Propagator for Cumulative {
    fn propagate(&mut self, store: &mut Store) -> CpResult<()> {
        let c = self.capacity;
        {
            let (dom, tr) = store.seq(self.seq);
            for act in &self.acts {
                let (s, e) = (act.start, act.end);
                if (dom.is_member(tr, s) && dom.is_excluded(tr, e)) || (dom.is_member(tr, e) && dom.is_excluded(tr, s)) {
                    return Err(Inconsistency);
                }
            }
            self.profile.rebuild(dom, tr, &self.acts, c, &mut self.members, &mut self.pos)?;
        }
        let (alpha, omega) = {
            let (dom, _) = store.seq(self.seq);
            (dom.alpha(), dom.omega())
        };
        for a in 0..self.acts.len() {
            let act = self.acts[a];
            let room = c - act.load;
            if let Some(vstar) = self.profile.earliest_end[a] {
                let (dom, tr) = store.seq(self.seq);
                let mut v = dom.next(tr, vstar);
                while v != omega {
                    if self.profile.before[v].max(self.profile.at[v]) > room {
                        store.not_between(self.seq, v, act.end, omega)?;
                        break;
                    }
                    v = store.seq(self.seq).0.next(store.trail(), v);
                }
            } else if let Some(u) = self.profile.latest_start[a] {
                let mut v = u;
                while v != alpha {
                    if self.profile.at[v].max(self.profile.after[v]) > room {
                        store.not_between(self.seq, alpha, act.start, v)?;
                        break;
                    }
                    v = store.seq(self.seq).0.prev(store.trail(), v);
                }
            }
        }
        for a in 0..self.acts.len() {
            let act = self.acts[a];
            let (dom, tr) = store.seq(self.seq);
            if !(dom.is_insertable(tr, act.start) && dom.is_insertable(tr, act.end)) {
                continue;
            }
            self.buf.clear();
            self.buf.extend(dom.inserts(tr, act.start));
            for &p in &self.buf {
                let (dom, tr) = store.seq(self.seq);
                if dom.can_insert(tr, p, act.start) && !self.profile.start_fits(dom, tr, &act, p, c) {
                    let k = dom.next(tr, p);
                    store.not_between(self.seq, p, act.start, k)?;
                }
            }
            let (dom, tr) = store.seq(self.seq);
            self.buf.clear();
            self.buf.extend(dom.inserts(tr, act.end));
            for &q in &self.buf {
                let (dom, tr) = store.seq(self.seq);
                if dom.can_insert(tr, q, act.end) && !self.profile.end_fits(dom, tr, &act, q, c) {
                    let k = dom.next(tr, q);
                    store.not_between(self.seq, q, act.end, k)?;
                }
            }
        }
        Ok(())
    }

    fn subscriptions(&self) -> Vec<VarEvent> {
        vec![VarEvent::Seq(self.seq)]
    }

    fn name(&self) -> &str {
        "Cumulative"
    }
}
