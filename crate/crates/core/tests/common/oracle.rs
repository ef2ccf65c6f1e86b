//! Brute-force model of a sequence domain, independent of the compact
//! encoding: a domain is the set of sequences over V that satisfy the
//! required, excluded, subsequence and NotBetween predicates.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use seqcp::{Node, SequenceDomain, Trail};

/// Every sequence from `alpha` to `omega` over a subset of `0..n`.
pub fn all_sequences(n: usize, alpha: Node, omega: Node) -> Vec<Vec<Node>> {
    let inner: Vec<Node> = (0..n).filter(|&v| v != alpha && v != omega).collect();
    let mut out = Vec::new();
    let mut cur = vec![alpha];
    let mut used = vec![false; n];
    fn rec(inner: &[Node], omega: Node, cur: &mut Vec<Node>, used: &mut [bool], out: &mut Vec<Vec<Node>>) {
        let mut done = cur.clone();
        done.push(omega);
        out.push(done);
        for &v in inner {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(inner, omega, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    rec(&inner, omega, &mut cur, &mut used, &mut out);
    out
}

/// `sub` appears in `seq` in the same order, not necessarily contiguously.
pub fn is_subsequence(sub: &[Node], seq: &[Node]) -> bool {
    let mut it = seq.iter();
    sub.iter().all(|x| it.any(|y| y == x))
}

#[derive(Debug, Clone)]
pub struct Shadow {
    pub n: usize,
    pub alpha: Node,
    pub omega: Node,
    pub required: BTreeSet<Node>,
    pub excluded: BTreeSet<Node>,
    pub partial: Vec<Node>,
    pub triples: Vec<(Node, Node, Node)>,
    /// Set when an update has no sequence-level meaning (inserting a
    /// member before itself); the domain is then empty.
    pub dead: bool,
}

impl Shadow {
    pub fn new(n: usize, alpha: Node, omega: Node) -> Self {
        Shadow {
            n,
            alpha,
            omega,
            required: [alpha, omega].into_iter().collect(),
            excluded: BTreeSet::new(),
            partial: vec![alpha, omega],
            triples: Vec::new(),
            dead: false,
        }
    }

    pub fn admits(&self, seq: &[Node]) -> bool {
        let pos = |v: Node| seq.iter().position(|&x| x == v);
        self.required.iter().all(|&v| pos(v).is_some())
            && self.excluded.iter().all(|&v| pos(v).is_none())
            && is_subsequence(&self.partial, seq)
            && self.triples.iter().all(|&(a, b, c)| !is_subsequence(&[a, b, c], seq))
    }

    pub fn domain(&self) -> BTreeSet<Vec<Node>> {
        if self.dead {
            return BTreeSet::new();
        }
        all_sequences(self.n, self.alpha, self.omega)
            .into_iter()
            .filter(|s| self.admits(s))
            .collect()
    }

    pub fn member_pos(&self, v: Node) -> Option<usize> {
        self.partial.iter().position(|&x| x == v)
    }

    pub fn insert(&mut self, p: Node, v: Node) {
        match (self.member_pos(p), self.member_pos(v)) {
            (Some(i), Some(j)) => {
                if j < i {
                    self.dead = true;
                }
            }
            (Some(i), None) => {
                self.partial.insert(i + 1, v);
                self.required.insert(v);
            }
            (None, _) => self.dead = true,
        }
    }

    pub fn not_between(&mut self, a: Node, v: Node, c: Node) {
        self.triples.push((a, v, c));
    }

    pub fn require(&mut self, v: Node) {
        self.required.insert(v);
    }

    pub fn exclude(&mut self, v: Node) {
        self.excluded.insert(v);
    }

    /// A required node that every sequence places in the same gap joins
    /// the partial sequence there. The domain itself is unchanged.
    pub fn settle(&mut self) {
        loop {
            let dom = self.domain();
            if dom.is_empty() {
                return;
            }
            let pending: Vec<Node> = self
                .required
                .iter()
                .copied()
                .filter(|&v| self.member_pos(v).is_none())
                .collect();
            let mut moved = false;
            for v in pending {
                let gaps: HashSet<Node> = dom.iter().map(|s| self.gap_of(s, v)).collect();
                if gaps.len() == 1 {
                    let p = gaps.into_iter().next().unwrap();
                    self.insert(p, v);
                    moved = true;
                    break;
                }
            }
            if !moved {
                return;
            }
        }
    }

    /// Closest member of the partial sequence preceding `v` in `seq`.
    fn gap_of(&self, seq: &[Node], v: Node) -> Node {
        let at = seq.iter().position(|&x| x == v).expect("required node missing");
        seq[..at]
            .iter()
            .rev()
            .copied()
            .find(|&x| self.member_pos(x).is_some())
            .expect("alpha precedes every node")
    }
}

/// One restriction, with operands given as raw indices resolved against the
/// current domain when applied.
#[derive(Debug, Clone, Copy)]
pub struct RawOp {
    pub kind: u8,
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Insert(Node, Node),
    NotBetween(Node, Node, Node),
    Require(Node),
    Exclude(Node),
    Push,
    Pop,
}

impl RawOp {
    /// Resolves against the compact domain: extremities are drawn from the
    /// members, the moved node from all of `V`.
    pub fn resolve(self, dom: &SequenceDomain, tr: &Trail) -> Op {
        let members = dom.members(tr);
        let n = dom.node_count();
        match self.kind % 10 {
            0..=2 => {
                let outside: Vec<Node> = (0..n).filter(|&v| !dom.is_member(tr, v)).collect();
                let v = if outside.is_empty() || self.b.is_multiple_of(8) { self.b % n } else { outside[self.b % outside.len()] };
                Op::Insert(members[self.a % members.len()], v)
            }
            3..=5 => Op::NotBetween(members[self.a % members.len()], self.b % n, members[self.c % members.len()]),
            6 => Op::Require(self.b % n),
            7 => Op::Exclude(self.b % n),
            8 => Op::Push,
            _ => Op::Pop,
        }
    }
}

pub fn apply_compact(op: Op, dom: &mut SequenceDomain, tr: &mut Trail) -> Result<(), ()> {
    let r = match op {
        Op::Insert(p, v) => dom.insert(tr, p, v),
        Op::NotBetween(a, v, c) => dom.not_between(tr, a, v, c),
        Op::Require(v) => dom.require(tr, v),
        Op::Exclude(v) => dom.exclude(tr, v),
        Op::Push | Op::Pop => Ok(()),
    };
    r.map_err(|_| ())
}

pub fn apply_shadow(op: Op, sh: &mut Shadow) {
    match op {
        Op::Insert(p, v) => sh.insert(p, v),
        Op::NotBetween(a, v, c) => sh.not_between(a, v, c),
        Op::Require(v) => sh.require(v),
        Op::Exclude(v) => sh.exclude(v),
        Op::Push | Op::Pop => {}
    }
}

/// Runs a script against both models and returns the first disagreement.
///
/// After a failed update both models roll back to their state before it.
pub fn run_script(n: usize, ops: &[RawOp]) -> Result<usize, String> {
    let (alpha, omega) = (0, n - 1);
    let mut tr = Trail::new();
    let mut dom = SequenceDomain::new(&mut tr, n, alpha, omega);
    let mut sh = Shadow::new(n, alpha, omega);
    let mut stack = Vec::new();
    let mut checks = 0;
    for (step, raw) in ops.iter().enumerate() {
        let op = raw.resolve(&dom, &tr);
        match op {
            Op::Push => {
                stack.push((tr.save_level(), sh.clone()));
                continue;
            }
            Op::Pop => {
                if let Some((lvl, saved)) = stack.pop() {
                    tr.restore_level(lvl);
                    sh = saved;
                }
            }
            _ => {
                let lvl = tr.save_level();
                let before = sh.clone();
                let res = apply_compact(op, &mut dom, &mut tr);
                apply_shadow(op, &mut sh);
                if res.is_err() {
                    let expect = sh.domain();
                    if !expect.is_empty() {
                        return Err(format!("step {step} {op:?}: wipeout but oracle has {expect:?}"));
                    }
                    tr.restore_level(lvl);
                    sh = before;
                } else {
                    sh.settle();
                }
            }
        }
        let got: BTreeSet<Vec<Node>> = dom.enumerate(&tr).into_iter().collect();
        let expect = sh.domain();
        if got != expect {
            return Err(format!(
                "step {step} {op:?}: compact {got:?} != oracle {expect:?}\n{}",
                dom.dump(&tr)
            ));
        }
        if dom.members(&tr) != sh.partial {
            return Err(format!("step {step} {op:?}: partial {:?} != {:?}", dom.members(&tr), sh.partial));
        }
        checks += 1;
    }
    Ok(checks)
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ScriptStats {
    pub applied: usize,
    pub wipeouts: usize,
    pub restores: usize,
}

/// Runs a script checking every structural invariant after each update,
/// after each rollback of a wipeout and after each explicit restore.
pub fn run_invariant_script(n: usize, ops: &[RawOp]) -> Result<ScriptStats, String> {
    let mut tr = Trail::new();
    let mut dom = SequenceDomain::new(&mut tr, n, 0, n - 1);
    let mut stack = Vec::new();
    let mut stats = ScriptStats::default();
    let check = |dom: &SequenceDomain, tr: &Trail, what: &str| -> Result<(), String> {
        let errs = dom.check_invariants(tr);
        if errs.is_empty() {
            Ok(())
        } else {
            Err(format!("{what}: {errs:?}\n{}", dom.dump(tr)))
        }
    };
    for (step, raw) in ops.iter().enumerate() {
        let op = raw.resolve(&dom, &tr);
        stats.applied += 1;
        match op {
            Op::Push => stack.push(tr.save_level()),
            Op::Pop => {
                if let Some(lvl) = stack.pop() {
                    tr.restore_level(lvl);
                    stats.restores += 1;
                    check(&dom, &tr, &format!("step {step} restore"))?;
                }
            }
            _ => {
                let lvl = tr.save_level();
                if apply_compact(op, &mut dom, &mut tr).is_err() {
                    stats.wipeouts += 1;
                    tr.restore_level(lvl);
                    stats.restores += 1;
                    check(&dom, &tr, &format!("step {step} {op:?} rollback"))?;
                } else {
                    check(&dom, &tr, &format!("step {step} {op:?}"))?;
                    stack.push(lvl);
                }
            }
        }
    }
    Ok(stats)
}
