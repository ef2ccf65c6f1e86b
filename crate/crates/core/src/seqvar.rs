//! Insertion-based sequence domain.
//!
//! The domain is a directed graph over `V` plus a partial sequence `s`
//! encoded as a circuit in the successor array (`succ[ω] = α`). An edge
//! `(i, j)` with `i` a member means `j` may still be inserted directly after
//! `i`. Non-members point to themselves. Edges only disappear, except on
//! trail restore.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::engine::{CpResult, Inconsistency};
use crate::state::{RevInt, RevSparseSet, Status, Trail, TriPartition};

pub type Node = usize;

#[derive(Debug, Clone)]
pub struct SequenceDomain {
    alpha: Node,
    omega: Node,
    succ: Vec<RevInt>,
    pred: Vec<RevInt>,
    in_edges: Vec<RevSparseSet>,
    out_edges: Vec<RevSparseSet>,
    insertable: RevSparseSet,
    n_member: RevInt,
    n_insert: Vec<RevInt>,
    status: TriPartition,
    // not trailed: drained by the store after each update
    changed: bool,
    status_changes: Vec<Node>,
    scratch: Vec<Node>,
}

impl SequenceDomain {
    /// Creates the domain whose partial sequence is `alpha · omega`.
    ///
    /// Panics if `n < 2`, `alpha == omega` or either is out of range.
    pub fn new(trail: &mut Trail, n: usize, alpha: Node, omega: Node) -> Self {
        assert!(n >= 2, "a sequence domain needs at least two nodes");
        assert!(alpha != omega && alpha < n && omega < n, "invalid start/end nodes");
        let mut in_edges = Vec::with_capacity(n);
        let mut out_edges = Vec::with_capacity(n);
        for v in 0..n {
            let mut out = RevSparseSet::full(trail, n);
            let mut inc = RevSparseSet::full(trail, n);
            out.remove(trail, v);
            inc.remove(trail, v);
            if v == omega {
                for u in 0..n {
                    if u != alpha {
                        out.remove(trail, u);
                    }
                }
            } else {
                out.remove(trail, alpha);
            }
            if v == alpha {
                for u in 0..n {
                    if u != omega {
                        inc.remove(trail, u);
                    }
                }
            } else {
                inc.remove(trail, omega);
            }
            out_edges.push(out);
            in_edges.push(inc);
        }
        let succ: Vec<RevInt> = (0..n)
            .map(|v| {
                let s = if v == alpha {
                    omega
                } else if v == omega {
                    alpha
                } else {
                    v
                };
                trail.new_int(s as i64)
            })
            .collect();
        let pred: Vec<RevInt> = (0..n)
            .map(|v| {
                let p = if v == omega {
                    alpha
                } else if v == alpha {
                    omega
                } else {
                    v
                };
                trail.new_int(p as i64)
            })
            .collect();
        let mut insertable = RevSparseSet::full(trail, n);
        insertable.remove(trail, alpha);
        insertable.remove(trail, omega);
        let n_insert = (0..n)
            .map(|v| trail.new_int(if v == alpha || v == omega { 0 } else { 1 }))
            .collect();
        let mut status = TriPartition::new(trail, n);
        status.require(trail, alpha);
        status.require(trail, omega);
        SequenceDomain {
            alpha,
            omega,
            succ,
            pred,
            in_edges,
            out_edges,
            insertable,
            n_member: trail.new_int(2),
            n_insert,
            status,
            changed: false,
            status_changes: Vec::new(),
            scratch: Vec::new(),
        }
    }

    // ---- queries ----

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn alpha(&self) -> Node {
        self.alpha
    }

    pub fn omega(&self) -> Node {
        self.omega
    }

    /// No insertable node remains.
    pub fn is_fixed(&self, tr: &Trail) -> bool {
        self.insertable.is_empty(tr)
    }

    #[inline]
    pub fn is_member(&self, tr: &Trail, v: Node) -> bool {
        tr.get(self.succ[v]) as usize != v
    }

    #[inline]
    pub fn is_required(&self, tr: &Trail, v: Node) -> bool {
        self.status.status(tr, v) == Status::Required
    }

    #[inline]
    pub fn is_excluded(&self, tr: &Trail, v: Node) -> bool {
        self.status.status(tr, v) == Status::Excluded
    }

    #[inline]
    pub fn is_possible(&self, tr: &Trail, v: Node) -> bool {
        self.status.status(tr, v) == Status::Possible
    }

    #[inline]
    pub fn is_insertable(&self, tr: &Trail, v: Node) -> bool {
        self.insertable.contains(tr, v)
    }

    /// Successor of a member in the partial sequence (`ω` maps to `α`).
    #[inline]
    pub fn next(&self, tr: &Trail, v: Node) -> Node {
        tr.get(self.succ[v]) as usize
    }

    #[inline]
    pub fn prev(&self, tr: &Trail, v: Node) -> Node {
        tr.get(self.pred[v]) as usize
    }

    #[inline]
    pub fn n_insert(&self, tr: &Trail, v: Node) -> usize {
        tr.get(self.n_insert[v]) as usize
    }

    #[inline]
    pub fn n_member(&self, tr: &Trail) -> usize {
        tr.get(self.n_member) as usize
    }

    /// Members in sequence order, from `α` to `ω`.
    pub fn members(&self, tr: &Trail) -> Vec<Node> {
        let mut out = Vec::with_capacity(self.n_member(tr));
        self.members_into(tr, &mut out);
        out
    }

    pub fn members_into(&self, tr: &Trail, out: &mut Vec<Node>) {
        out.clear();
        let mut v = self.alpha;
        out.push(v);
        while v != self.omega {
            v = self.next(tr, v);
            out.push(v);
        }
    }

    pub fn required<'a>(&'a self, tr: &Trail) -> &'a [Node] {
        self.status.required(tr)
    }

    pub fn excluded<'a>(&'a self, tr: &Trail) -> &'a [Node] {
        self.status.excluded(tr)
    }

    pub fn possible<'a>(&'a self, tr: &Trail) -> &'a [Node] {
        self.status.possible(tr)
    }

    pub fn insertable<'a>(&'a self, tr: &Trail) -> &'a [Node] {
        self.insertable.as_slice(tr)
    }

    /// `N⁻(v)`: origins of edges entering `v`.
    pub fn edges_to<'a>(&'a self, tr: &Trail, v: Node) -> &'a [Node] {
        self.in_edges[v].as_slice(tr)
    }

    /// `N⁺(v)`: targets of edges leaving `v`.
    pub fn edges_from<'a>(&'a self, tr: &Trail, v: Node) -> &'a [Node] {
        self.out_edges[v].as_slice(tr)
    }

    pub fn has_edge(&self, tr: &Trail, i: Node, j: Node) -> bool {
        self.out_edges[i].contains(tr, j)
    }

    /// `j` may be inserted directly after member `i`.
    #[inline]
    pub fn can_insert(&self, tr: &Trail, i: Node, j: Node) -> bool {
        self.is_member(tr, i) && self.is_insertable(tr, j) && self.out_edges[i].contains(tr, j)
    }

    /// Members after which `j` may be inserted.
    pub fn inserts<'a>(&'a self, tr: &'a Trail, j: Node) -> impl Iterator<Item = Node> + 'a {
        let ok = self.is_insertable(tr, j);
        self.in_edges[j]
            .as_slice(tr)
            .iter()
            .copied()
            .filter(move |&i| ok && self.is_member(tr, i))
    }

    /// Members strictly after `p` after which `j` may be inserted, in
    /// sequence order. `p` itself is never returned.
    pub fn inserts_after(&self, tr: &Trail, j: Node, p: Node) -> Vec<Node> {
        let mut out = Vec::new();
        if !self.is_member(tr, p) || !self.is_insertable(tr, j) {
            return out;
        }
        let mut v = p;
        while v != self.omega {
            v = self.next(tr, v);
            if self.out_edges[v].contains(tr, j) {
                out.push(v);
            }
        }
        out
    }

    /// Strict order among members: `a ≺ b`. False if either is not a member.
    pub fn precedes(&self, tr: &Trail, a: Node, b: Node) -> bool {
        if !self.is_member(tr, a) || !self.is_member(tr, b) {
            return false;
        }
        let mut v = a;
        while v != self.omega {
            v = self.next(tr, v);
            if v == b {
                return true;
            }
        }
        false
    }

    // ---- updates ----

    fn remove_edge(&mut self, tr: &mut Trail, i: Node, j: Node) {
        if self.out_edges[i].remove(tr, j) {
            self.in_edges[j].remove(tr, i);
            self.changed = true;
        }
    }

    /// Inserts `v2` directly after member `v1`.
    ///
    /// A no-op when `v2` is already a member with `v1 ⪯ v2`; any other
    /// infeasible insertion is a wipeout.
    pub fn insert(&mut self, tr: &mut Trail, v1: Node, v2: Node) -> CpResult<()> {
        if self.is_member(tr, v2) {
            return if v1 == v2 || self.precedes(tr, v1, v2) {
                Ok(())
            } else {
                Err(Inconsistency)
            };
        }
        if !self.can_insert(tr, v1, v2) {
            return Err(Inconsistency);
        }
        self.status.require(tr, v2);
        self.insertable.remove(tr, v2);
        tr.set(self.n_insert[v2], 0);
        tr.incr(self.n_member);
        let v3 = self.next(tr, v1);
        let mut preds = std::mem::take(&mut self.scratch);
        preds.clear();
        preds.extend_from_slice(self.in_edges[v2].as_slice(tr));
        for &vi in &preds {
            if self.is_member(tr, vi) {
                if vi != v1 {
                    self.remove_edge(tr, vi, v2);
                    let vj = self.next(tr, vi);
                    self.remove_edge(tr, v2, vj);
                }
            } else if !self.can_insert(tr, v1, vi) {
                self.remove_edge(tr, v2, vi);
                self.remove_edge(tr, vi, v2);
            } else {
                tr.incr(self.n_insert[vi]);
            }
        }
        self.scratch = preds;
        tr.set(self.succ[v1], v2 as i64);
        tr.set(self.succ[v2], v3 as i64);
        tr.set(self.pred[v3], v2 as i64);
        tr.set(self.pred[v2], v1 as i64);
        self.remove_edge(tr, v1, v3);
        self.changed = true;
        self.status_changes.push(v2);
        Ok(())
    }

    /// Forbids `v2` anywhere between members `v1` and `v3`.
    ///
    /// No-op if `v3 ⪯ v1`, if `v2` is excluded, or if `v2` is a member
    /// outside the window. Wipeout if `v2` is a member with `v1 ≺ v2 ≺ v3`.
    ///
    /// Panics if `v1` or `v3` is not a member.
    pub fn not_between(&mut self, tr: &mut Trail, v1: Node, v2: Node, v3: Node) -> CpResult<()> {
        assert!(
            self.is_member(tr, v1) && self.is_member(tr, v3),
            "notBetween({v1}, {v2}, {v3}): extremities must be members"
        );
        if !self.precedes(tr, v1, v3) {
            return Ok(());
        }
        if self.is_member(tr, v2) {
            return if self.precedes(tr, v1, v2) && self.precedes(tr, v2, v3) {
                Err(Inconsistency)
            } else {
                Ok(())
            };
        }
        if !self.is_insertable(tr, v2) {
            return Ok(());
        }
        let mut vi = v1;
        while vi != v3 {
            let vj = self.next(tr, vi);
            if self.can_insert(tr, vi, v2) {
                self.remove_edge(tr, vi, v2);
                self.remove_edge(tr, v2, vj);
                if tr.decr(self.n_insert[v2]) == 0 {
                    return self.force_exclude(tr, v2);
                }
            }
            vi = vj;
        }
        self.insert_if_forced(tr, v2)
    }

    fn insert_if_forced(&mut self, tr: &mut Trail, v: Node) -> CpResult<()> {
        if self.n_insert(tr, v) == 1 && self.is_required(tr, v) {
            let p = self.inserts(tr, v).next().expect("counter out of sync with edges");
            self.insert(tr, p, v)?;
        }
        Ok(())
    }

    fn force_exclude(&mut self, tr: &mut Trail, v: Node) -> CpResult<()> {
        if self.is_required(tr, v) {
            return Err(Inconsistency);
        }
        self.status.exclude(tr, v);
        self.insertable.remove(tr, v);
        tr.set(self.n_insert[v], 0);
        let mut buf = std::mem::take(&mut self.scratch);
        buf.clear();
        buf.extend_from_slice(self.in_edges[v].as_slice(tr));
        for &u in &buf {
            self.out_edges[u].remove(tr, v);
        }
        buf.clear();
        buf.extend_from_slice(self.out_edges[v].as_slice(tr));
        for &u in &buf {
            self.in_edges[u].remove(tr, v);
        }
        self.scratch = buf;
        self.in_edges[v].clear(tr);
        self.out_edges[v].clear(tr);
        self.changed = true;
        self.status_changes.push(v);
        Ok(())
    }

    /// Marks `v` required, inserting it when a single insertion remains.
    pub fn require(&mut self, tr: &mut Trail, v: Node) -> CpResult<()> {
        match self.status.status(tr, v) {
            Status::Required => Ok(()),
            Status::Excluded => Err(Inconsistency),
            Status::Possible => {
                self.status.require(tr, v);
                self.changed = true;
                self.status_changes.push(v);
                self.insert_if_forced(tr, v)
            }
        }
    }

    /// Marks `v` excluded and detaches all its edges.
    pub fn exclude(&mut self, tr: &mut Trail, v: Node) -> CpResult<()> {
        match self.status.status(tr, v) {
            Status::Excluded => Ok(()),
            Status::Required => Err(Inconsistency),
            Status::Possible => self.force_exclude(tr, v),
        }
    }

    /// Inserts `v` just before `ω`.
    pub fn insert_at_end(&mut self, tr: &mut Trail, v: Node) -> CpResult<()> {
        let last = self.prev(tr, self.omega);
        self.insert(tr, last, v)
    }

    /// Returns and clears the "something changed" flag.
    pub fn take_changed(&mut self) -> bool {
        std::mem::take(&mut self.changed)
    }

    /// Drains nodes whose status (required, excluded, member) changed.
    pub fn drain_status_changes(&mut self, out: &mut Vec<Node>) {
        out.append(&mut self.status_changes);
    }

    // ---- diagnostics ----

    /// Checks every structural invariant; returns one message per violation.
    pub fn check_invariants(&self, tr: &Trail) -> Vec<String> {
        let n = self.node_count();
        let mut errs = Vec::new();
        let (a, w) = (self.alpha, self.omega);
        let member: Vec<bool> = (0..n).map(|v| self.is_member(tr, v)).collect();
        for i in 0..n {
            for j in 0..n {
                let out = self.out_edges[i].contains(tr, j);
                let inc = self.in_edges[j].contains(tr, i);
                if out != inc {
                    errs.push(format!("edge ({i},{j}) stored on one side only"));
                }
            }
            let s = self.next(tr, i);
            if self.prev(tr, s) != i {
                errs.push(format!("succ[{i}]={s} but pred[{s}]={}", self.prev(tr, s)));
            }
            let p = self.prev(tr, i);
            if self.next(tr, p) != i {
                errs.push(format!("pred[{i}]={p} but succ[{p}]={}", self.next(tr, p)));
            }
        }
        let n_members = member.iter().filter(|&&m| m).count();
        if n_members != self.n_member(tr) {
            errs.push(format!("nS={} but {} members", self.n_member(tr), n_members));
        }
        for v in 0..n {
            let insertable = self.is_insertable(tr, v);
            let expect_insertable = !member[v] && !self.is_excluded(tr, v);
            if insertable != expect_insertable {
                errs.push(format!("node {v}: insertable flag {insertable}, expected {expect_insertable}"));
            }
            let counted = self.in_edges[v].as_slice(tr).iter().filter(|&&u| member[u]).count();
            let ni = self.n_insert(tr, v);
            if insertable && ni != counted {
                errs.push(format!("nI[{v}]={ni} but {counted} member predecessors"));
            }
            if (ni >= 1) != insertable {
                errs.push(format!("nI[{v}]={ni} disagrees with insertable={insertable}"));
            }
        }
        if self.next(tr, w) != a || self.prev(tr, a) != w {
            errs.push("ω does not close the circuit onto α".into());
        }
        for i in 0..n {
            let s = self.next(tr, i);
            if s != i && !self.out_edges[i].contains(tr, s) {
                errs.push(format!("succ[{i}]={s} not backed by an edge"));
            }
            let p = self.prev(tr, i);
            if p != i && !self.in_edges[i].contains(tr, p) {
                errs.push(format!("pred[{i}]={p} not backed by an edge"));
            }
        }
        let mut seen = vec![false; n];
        for v in 0..n {
            let s = self.next(tr, v);
            if seen[s] {
                errs.push(format!("successor {s} used twice"));
            }
            seen[s] = true;
        }
        let mut on_circuit = vec![false; n];
        let mut v = a;
        for _ in 0..=n {
            if on_circuit[v] {
                break;
            }
            on_circuit[v] = true;
            v = self.next(tr, v);
        }
        if v != a {
            errs.push("successor array from α does not cycle back to α".into());
        }
        for v in 0..n {
            if member[v] != on_circuit[v] {
                errs.push(format!("node {v}: member={} but on α circuit={}", member[v], on_circuit[v]));
            }
        }
        let ins = self.insertable(tr);
        for &i in ins {
            for &j in ins {
                if i != j && !self.in_edges[j].contains(tr, i) {
                    errs.push(format!("insertable nodes {i},{j} lack edge ({i},{j})"));
                }
            }
        }
        for (i, &is_member) in member.iter().enumerate() {
            if !is_member || i == w {
                continue;
            }
            let k = self.next(tr, i);
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                if self.in_edges[j].contains(tr, i) != self.out_edges[j].contains(tr, k) {
                    errs.push(format!("insertion of {j} between {i} and {k} has one edge only"));
                }
            }
        }
        for (v, &is_member) in member.iter().enumerate() {
            let x = self.is_excluded(tr, v);
            let no_in = self.in_edges[v].is_empty(tr);
            let no_out = self.out_edges[v].is_empty(tr);
            if x != no_in || x != no_out {
                errs.push(format!("node {v}: excluded={x}, no in-edges={no_in}, no out-edges={no_out}"));
            }
            if is_member && !self.is_required(tr, v) {
                errs.push(format!("member {v} not required"));
            }
            if self.is_required(tr, v) && self.is_insertable(tr, v) && self.n_insert(tr, v) <= 1 {
                errs.push(format!("required insertable {v} has nI={}", self.n_insert(tr, v)));
            }
        }
        errs
    }

    /// Every sequence of the domain, sorted. Exponential: test oracle only.
    pub fn enumerate(&self, tr: &Trail) -> Vec<Vec<Node>> {
        let members = self.members(tr);
        let cand: Vec<Node> = {
            let mut c = self.insertable(tr).to_vec();
            c.sort_unstable();
            c
        };
        let mut out = BTreeSet::new();
        let mut gaps: Vec<Vec<Node>> = vec![Vec::new(); members.len()];
        self.enumerate_rec(tr, &members, &cand, 0, &mut gaps, &mut out);
        out.into_iter().collect()
    }

    fn enumerate_rec(
        &self,
        tr: &Trail,
        members: &[Node],
        cand: &[Node],
        k: usize,
        gaps: &mut Vec<Vec<Node>>,
        out: &mut BTreeSet<Vec<Node>>,
    ) {
        if k == cand.len() {
            let mut seqs: Vec<Vec<Node>> = vec![Vec::new()];
            for (g, &m) in members.iter().enumerate() {
                let perms = permutations(&gaps[g]);
                let mut next = Vec::with_capacity(seqs.len() * perms.len());
                for s in &seqs {
                    for p in &perms {
                        let mut t = s.clone();
                        t.push(m);
                        t.extend_from_slice(p);
                        next.push(t);
                    }
                }
                seqs = next;
            }
            out.extend(seqs);
            return;
        }
        let v = cand[k];
        if !self.is_required(tr, v) {
            self.enumerate_rec(tr, members, cand, k + 1, gaps, out);
        }
        for (g, &m) in members.iter().enumerate() {
            if m != self.omega && self.out_edges[m].contains(tr, v) {
                gaps[g].push(v);
                self.enumerate_rec(tr, members, cand, k + 1, gaps, out);
                gaps[g].pop();
            }
        }
    }

    /// Text rendering with one line per node, every set sorted.
    pub fn dump(&self, tr: &Trail) -> String {
        let sorted = |s: &[Node]| {
            let mut v = s.to_vec();
            v.sort_unstable();
            v
        };
        let mut out = String::new();
        let _ = writeln!(out, "s = {:?}", self.members(tr));
        let _ = writeln!(
            out,
            "nS = {} I = {:?} R = {:?} X = {:?}",
            self.n_member(tr),
            sorted(self.insertable(tr)),
            sorted(self.required(tr)),
            sorted(self.excluded(tr))
        );
        for v in 0..self.node_count() {
            let _ = writeln!(
                out,
                "{v}: succ={} pred={} nI={} in={:?} out={:?}",
                self.next(tr, v),
                self.prev(tr, v),
                self.n_insert(tr, v),
                sorted(self.edges_to(tr, v)),
                sorted(self.edges_from(tr, v))
            );
        }
        out
    }
}

fn permutations(items: &[Node]) -> Vec<Vec<Node>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}
