//! Random small models for checking that a propagator never removes a
//! sequence satisfying its constraint's definition.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqcp::constraints::{Activity, Cumulative, Distance, DistanceMatrix, Precedence, TransitionTimes};
use seqcp::{IntVar, Node, SeqVar, Solver, Store};

use super::oracle::{Op, RawOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Distance,
    TransitionTimes,
    Precedence,
    Cumulative,
}

pub const KINDS: [Kind; 4] = [Kind::Distance, Kind::TransitionTimes, Kind::Precedence, Kind::Cumulative];

/// Model-side data needed to evaluate the definition on a full sequence.
enum Def {
    Distance { d: Vec<Vec<i64>>, dist: IntVar },
    Times { d: Vec<Vec<i64>>, service: Vec<i64>, start: Vec<IntVar> },
    Order(Vec<Node>),
    Load { acts: Vec<Activity>, capacity: i64 },
}

fn length(d: &[Vec<i64>], seq: &[Node]) -> i64 {
    seq.windows(2).map(|w| d[w[0]][w[1]]).sum()
}

/// Earliest-start schedule within the current bounds exists.
fn schedulable(store: &Store, d: &[Vec<i64>], service: &[i64], start: &[IntVar], seq: &[Node]) -> bool {
    let mut t = i64::MIN;
    let mut prev: Option<Node> = None;
    for &v in seq {
        let ready = prev.map_or(i64::MIN, |p| t + service[p] + d[p][v]);
        t = ready.max(store.min(start[v]));
        if t > store.max(start[v]) {
            return false;
        }
        prev = Some(v);
    }
    true
}

fn load_ok(acts: &[Activity], capacity: i64, seq: &[Node]) -> bool {
    let pos = |v: Node| seq.iter().position(|&x| x == v);
    let mut spans = Vec::new();
    for a in acts {
        match (pos(a.start), pos(a.end)) {
            (None, None) => {}
            (Some(s), Some(e)) if s < e => spans.push((s, e, a.load)),
            _ => return false,
        }
    }
    (0..seq.len()).all(|i| spans.iter().filter(|&&(s, e, _)| s <= i && i < e).map(|x| x.2).sum::<i64>() <= capacity)
}

impl Def {
    fn holds(&self, store: &Store, seq: &[Node]) -> bool {
        match self {
            Def::Distance { d, dist } => {
                let l = length(d, seq);
                store.min(*dist) <= l && l <= store.max(*dist)
            }
            Def::Times { d, service, start } => schedulable(store, d, service, start, seq),
            Def::Order(o) => {
                let visited: Vec<Node> = seq.iter().copied().filter(|v| o.contains(v)).collect();
                let expect: Vec<Node> = o.iter().copied().filter(|v| seq.contains(v)).collect();
                visited == expect
            }
            Def::Load { acts, capacity } => load_ok(acts, *capacity, seq),
        }
    }
}

fn metric(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let pts: Vec<(i64, i64)> = (0..n).map(|_| (rng.gen_range(0..10), rng.gen_range(0..10))).collect();
    (0..n)
        .map(|i| (0..n).map(|j| (pts[i].0 - pts[j].0).abs() + (pts[i].1 - pts[j].1).abs()).collect())
        .collect()
}

fn restrict(rng: &mut ChaCha8Rng, store: &mut Store, seq: SeqVar, steps: usize) {
    for _ in 0..steps {
        let raw = RawOp { kind: rng.gen_range(0..8), a: rng.gen(), b: rng.gen(), c: rng.gen() };
        let (dom, tr) = store.seq(seq);
        let op = raw.resolve(dom, tr);
        let lvl = store.save_level();
        let r = match op {
            Op::Insert(p, v) => store.insert(seq, p, v),
            Op::NotBetween(a, v, c) => store.not_between(seq, a, v, c),
            Op::Require(v) => store.require(seq, v),
            Op::Exclude(v) => store.exclude(seq, v),
            Op::Push | Op::Pop => Ok(()),
        };
        if r.is_err() {
            store.restore_level(lvl);
        }
    }
}

/// Outcome of one random case.
#[derive(Debug, Default, Clone, Copy)]
pub struct CaseStats {
    pub before: usize,
    pub satisfying: usize,
    pub after: usize,
}

/// Builds a random model for `kind` from `seed`, posts the propagator and
/// checks that every satisfying sequence survives, still satisfying the
/// definition against the filtered variable bounds.
pub fn soundness_case(kind: Kind, seed: u64) -> Result<CaseStats, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=6);
    let mut store = Store::new();
    let seq = store.new_seq(n, 0, n - 1);
    let steps = rng.gen_range(0..4);
    restrict(&mut rng, &mut store, seq, steps);
    let before = {
        let (dom, tr) = store.seq(seq);
        dom.enumerate(tr)
    };
    let inner: Vec<Node> = (1..n - 1).collect();

    let (def, prop): (Def, Box<dyn seqcp::Propagator>) = match kind {
        Kind::Distance => {
            let d = metric(&mut rng, n);
            let lens: Vec<i64> = before.iter().map(|s| length(&d, s)).collect();
            let lo = lens.iter().copied().min().unwrap_or(0);
            let hi = lens.iter().copied().max().unwrap_or(0);
            let ub = rng.gen_range(lo..=hi.max(lo));
            let dist = store.new_int(0, ub);
            let m = Rc::new(DistanceMatrix::new(d.clone()));
            (Def::Distance { d, dist }, Box::new(Distance::new(seq, m, dist)))
        }
        Kind::TransitionTimes => {
            let d = metric(&mut rng, n);
            let service: Vec<i64> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let start: Vec<IntVar> = (0..n)
                .map(|_| {
                    let a = rng.gen_range(0..25);
                    store.new_int(a, a + rng.gen_range(0..15))
                })
                .collect();
            let m = Rc::new(DistanceMatrix::new(d.clone()));
            let p = TransitionTimes::new(seq, start.clone(), Rc::new(service.clone()), m);
            (Def::Times { d, service, start }, Box::new(p))
        }
        Kind::Precedence => {
            let mut o = inner.clone();
            o.shuffle(&mut rng);
            o.truncate(rng.gen_range(1..=inner.len().max(1)));
            (Def::Order(o.clone()), Box::new(Precedence::new(seq, o, n)))
        }
        Kind::Cumulative => {
            let mut nodes = inner.clone();
            nodes.shuffle(&mut rng);
            let acts: Vec<Activity> = nodes
                .chunks_exact(2)
                .map(|c| Activity { start: c[0], end: c[1], load: rng.gen_range(1..=3) })
                .collect();
            let capacity = rng.gen_range(1..=4);
            (Def::Load { acts: acts.clone(), capacity }, Box::new(Cumulative::new(seq, acts, capacity)))
        }
    };

    let satisfying: Vec<Vec<Node>> = before.iter().filter(|s| def.holds(&store, s)).cloned().collect();
    let mut solver = Solver::with_store(store);
    let posted = solver.post_boxed(prop);
    let after: BTreeSet<Vec<Node>> = match posted {
        Ok(()) => {
            let (dom, tr) = solver.store.seq(seq);
            dom.enumerate(tr).into_iter().collect()
        }
        Err(_) => BTreeSet::new(),
    };
    for s in &satisfying {
        if !after.contains(s) {
            return Err(format!("{kind:?} seed {seed}: pruned satisfying sequence {s:?}"));
        }
        if !def.holds(&solver.store, s) {
            return Err(format!("{kind:?} seed {seed}: bounds exclude satisfying sequence {s:?}"));
        }
    }
    if posted.is_ok() {
        if let Def::Distance { d, dist } = &def {
            let min_len = after.iter().map(|s| length(d, s)).min();
            if min_len.is_some_and(|m| solver.store.min(*dist) > m) {
                return Err(format!("seed {seed}: distance lower bound above shortest sequence"));
            }
        }
        match solver.rerun_all() {
            Ok(false) => {}
            Ok(true) => return Err(format!("{kind:?} seed {seed}: not idempotent at fix-point")),
            Err(_) => return Err(format!("{kind:?} seed {seed}: rerun at fix-point failed")),
        }
    }
    Ok(CaseStats { before: before.len(), satisfying: satisfying.len(), after: after.len() })
}
