//! Hand-worked domain states with their expected outcomes. Each check
//! returns the first mismatch instead of panicking so that it can be
//! reported by name.

#![allow(dead_code)]

use std::collections::BTreeSet;

use seqcp::constraints::{Activity, Cumulative, LoadProfile};
use seqcp::search::two_step_branching;
use seqcp::{Limits, Node, SeqVar, Solver, SequenceDomain, Store, Trail};

use super::oracle::Shadow;

macro_rules! ensure_eq {
    ($a:expr, $b:expr, $what:expr) => {{
        let (a, b) = (&$a, &$b);
        if a != b {
            return Err(format!("{}: got {:?}, expected {:?}", $what, a, b));
        }
    }};
}

macro_rules! ensure {
    ($c:expr, $what:expr) => {
        if !$c {
            return Err(format!("{} does not hold", $what));
        }
    };
}

const A: Node = 0;
const V1: Node = 1;
const V2: Node = 2;
const V3: Node = 3;

fn sorted(s: &[Node]) -> Vec<Node> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v
}

/// V = {α, v1, v2, v3, ω}, R = {α, ω, v2}, X = {v3}, s = α·v1·ω and
/// N = {(α·v2·v1), (v3·v1·v2)}: the domain is exactly {α·v1·v2·ω}.
pub fn required_node_with_one_slot() -> Result<(), String> {
    let w = 4;
    let mut sh = Shadow::new(5, A, w);
    sh.require(V2);
    sh.exclude(V3);
    sh.insert(A, V1);
    sh.not_between(A, V2, V1);
    sh.not_between(V3, V1, V2);
    let expect: Vec<Vec<Node>> = vec![vec![A, V1, V2, w]];
    ensure_eq!(sh.domain().into_iter().collect::<Vec<_>>(), expect, "brute-force domain");

    // (v3·v1·v2) has extremities outside s; with v3 excluded it is vacuous
    let mut tr = Trail::new();
    let mut d = SequenceDomain::new(&mut tr, 5, A, w);
    let steps = d
        .insert(&mut tr, A, V1)
        .and_then(|_| d.exclude(&mut tr, V3))
        .and_then(|_| d.require(&mut tr, V2))
        .and_then(|_| d.not_between(&mut tr, A, V2, V1));
    ensure!(steps.is_ok(), "updates succeed");
    ensure!(d.is_fixed(&tr), "isFixed");
    ensure_eq!(d.members(&tr), vec![A, V1, V2, w], "partial sequence");
    ensure_eq!(d.enumerate(&tr), expect, "compact domain");
    Ok(())
}

/// s = α·v1·ω with (α·v2·v1) and (v1·v3·ω) forbidden.
pub fn two_forbidden_insertions() -> Result<(), String> {
    let w = 4;
    let mut tr = Trail::new();
    let mut d = SequenceDomain::new(&mut tr, 5, A, w);
    let steps = d
        .insert(&mut tr, A, V1)
        .and_then(|_| d.not_between(&mut tr, A, V2, V1))
        .and_then(|_| d.not_between(&mut tr, V1, V3, w));
    ensure!(steps.is_ok(), "updates succeed");

    let mut forbidden = Vec::new();
    for m in d.members(&tr) {
        for v in [V2, V3] {
            if m != w && !d.can_insert(&tr, m, v) {
                forbidden.push((m, v));
            }
        }
    }
    ensure_eq!(forbidden, vec![(A, V2), (V1, V3)], "forbidden insertions");

    let expect: BTreeSet<Vec<Node>> =
        [vec![A, V1, w], vec![A, V1, V2, w], vec![A, V3, V1, w], vec![A, V3, V1, V2, w]].into_iter().collect();
    let got = d.enumerate(&tr);
    ensure_eq!(got.len(), 4, "domain size");
    ensure_eq!(got.into_iter().collect::<BTreeSet<_>>(), expect, "domain");
    Ok(())
}

/// `(node, in, out, nI, pred, succ)` rows of a domain state.
type Row = (Node, Vec<Node>, Vec<Node>, usize, Node, Node);

fn table(d: &SequenceDomain, tr: &Trail) -> Vec<Row> {
    (0..d.node_count())
        .map(|v| {
            (
                v,
                sorted(d.edges_to(tr, v)),
                sorted(d.edges_from(tr, v)),
                d.n_insert(tr, v),
                d.prev(tr, v),
                d.next(tr, v),
            )
        })
        .collect()
}

/// Six nodes, s = α·v1·ω, v2 excluded and (α·v4·v1) forbidden; then
/// insert(α, v3).
pub fn insert_golden_tables() -> Result<(), String> {
    let (v4, w) = (4, 5);
    let mut tr = Trail::new();
    let mut d = SequenceDomain::new(&mut tr, 6, A, w);
    let steps = d
        .insert(&mut tr, A, V1)
        .and_then(|_| d.exclude(&mut tr, V2))
        .and_then(|_| d.not_between(&mut tr, A, v4, V1));
    ensure!(steps.is_ok(), "left state builds");

    let left: Vec<Row> = vec![
        (A, vec![w], vec![V1, V3], 0, w, V1),
        (V1, vec![A, V3], vec![V3, v4, w], 0, A, w),
        (V2, vec![], vec![], 0, V2, V2),
        (V3, vec![A, V1, v4], vec![V1, v4, w], 2, V3, V3),
        (v4, vec![V1, V3], vec![V3, w], 1, v4, v4),
        (w, vec![V1, V3, v4], vec![A], 0, V1, A),
    ];
    ensure_eq!(table(&d, &tr), left, "left table");
    ensure_eq!(d.n_member(&tr), 3, "left nS");
    ensure_eq!(sorted(d.insertable(&tr)), vec![V3, v4], "left I");
    ensure_eq!(sorted(d.required(&tr)), vec![A, V1, w], "left R");
    ensure_eq!(sorted(d.excluded(&tr)), vec![V2], "left X");
    ensure!(d.inserts_after(&tr, v4, V1).is_empty(), "no insertion of v4 after v1");
    ensure_eq!(d.inserts_after(&tr, v4, A), vec![V1], "insertions of v4 after α");

    ensure!(d.insert(&mut tr, A, V3).is_ok(), "insert(α, v3)");
    let right: Vec<Row> = vec![
        (A, vec![w], vec![V3], 0, w, V3),
        (V1, vec![V3], vec![v4, w], 0, V3, w),
        (V2, vec![], vec![], 0, V2, V2),
        (V3, vec![A], vec![V1], 0, A, V1),
        (v4, vec![V1], vec![w], 1, v4, v4),
        (w, vec![V1, v4], vec![A], 0, V1, A),
    ];
    ensure_eq!(table(&d, &tr), right, "right table");
    ensure_eq!(d.members(&tr), vec![A, V3, V1, w], "right partial sequence");
    ensure_eq!(d.n_member(&tr), 4, "right nS");
    ensure_eq!(sorted(d.insertable(&tr)), vec![v4], "right I");
    ensure_eq!(sorted(d.required(&tr)), vec![A, V1, V3, w], "right R");
    ensure_eq!(sorted(d.excluded(&tr)), vec![V2], "right X");
    ensure_eq!(d.inserts(&tr, v4).collect::<Vec<_>>(), vec![V1], "right insertions of v4");
    ensure!(d.check_invariants(&tr).is_empty(), "invariants");
    Ok(())
}

fn fixed_store(n: usize, order: &[Node], excluded: &[Node]) -> (Store, SeqVar) {
    let mut st = Store::new();
    let s = st.new_seq(n, 0, n - 1);
    for &v in order {
        st.insert_at_end(s, v).unwrap();
    }
    for &v in excluded {
        st.exclude(s, v).unwrap();
    }
    (st, s)
}

fn activities(spec: &[(Node, Node, i64)]) -> Vec<Activity> {
    spec.iter().map(|&(start, end, load)| Activity { start, end, load }).collect()
}

/// α=0, s0=1, e0=2, s1=3, e1=4, s2=5, e2=6, s3=7, e3=8, ω=9; the fixed
/// sequence α·s0·s1·e1·e0·s3·e3·ω peaks at load 3.
pub fn fixed_sequence_load() -> Result<(), String> {
    let acts = activities(&[(1, 2, 2), (3, 4, 1), (5, 6, 1), (7, 8, 2)]);
    let order = [1, 3, 4, 2, 7, 8];
    for (capacity, ok) in [(3, true), (2, false)] {
        let (st, s) = fixed_store(10, &order, &[5, 6]);
        let mut solver = Solver::with_store(st);
        let posted = solver.post(Cumulative::new(s, acts.clone(), capacity)).is_ok();
        ensure_eq!(posted, ok, format!("accepted at c={capacity}"));
    }
    let (st, s) = fixed_store(10, &order, &[5, 6]);
    let (dom, tr) = st.seq(s);
    let p = LoadProfile::build(dom, tr, &acts, 3).map_err(|_| "profile at c=3 fails".to_string())?;
    // fully inserted activities only: at equals after on members
    for v in dom.members(tr) {
        ensure_eq!(p.at[v], p.after[v], format!("at/after at {v}"));
    }
    ensure_eq!(p.at[3], 3, "load at s1");
    Ok(())
}

/// α=0, s0=1, e0=2, s1=3, e1=4, s2=5, e2=6, ω=7 with loads 1, 1, 2 and
/// c=2. Left: α·s0·e1·ω, where s2 fits right after s0. Right: α·s0·e0·ω,
/// where s0 departs with load 1 so s2 only fits after e0.
pub fn load_two_insertability() -> Result<(), String> {
    let acts = activities(&[(1, 2, 1), (3, 4, 1), (5, 6, 2)]);
    for (second, at_after_before, after_s0, after_second) in [(4, (1, 0, 1), true, true), (2, (1, 1, 1), false, true)] {
        let side = if second == 4 { "left" } else { "right" };
        let (st, s) = fixed_store(8, &[], &[]);
        let mut solver = Solver::with_store(st);
        let built = solver.apply(|st| st.insert(s, 0, 1).and_then(|_| st.insert(s, 1, second)));
        ensure!(built.is_ok(), format!("{side} state builds"));
        {
            let (dom, tr) = solver.store.seq(s);
            let p = LoadProfile::build(dom, tr, &acts, 2).map_err(|_| format!("{side} profile fails"))?;
            ensure_eq!((p.at[1], p.after[1], p.before[second]), at_after_before, format!("{side} profile"));
        }
        ensure!(solver.post(Cumulative::new(s, acts.clone(), 2)).is_ok(), format!("{side} posts"));
        let (dom, tr) = solver.store.seq(s);
        ensure_eq!(dom.can_insert(tr, 1, 5), after_s0, format!("{side}: s2 after s0"));
        ensure_eq!(dom.can_insert(tr, second, 5), after_second, format!("{side}: s2 after {second}"));
    }
    Ok(())
}

fn solutions(solver: &mut Solver, s: SeqVar) -> Vec<Vec<Node>> {
    let mut out = Vec::new();
    let mut b = move |st: &Store| two_step_branching(st, &[s]);
    solver.dfs(&mut b, None, &Limits::default(), &mut |st: &Store| {
        let (d, t) = st.seq(s);
        out.push(d.members(t));
    });
    out
}

/// α·ω with three required nodes: two-step branching builds the six
/// orders once each, and sibling subtrees share none of them.
pub fn three_required_nodes_branching() -> Result<(), String> {
    let mut st = Store::new();
    let s = st.new_seq(5, 0, 4);
    for v in 1..=3 {
        st.require(s, v).map_err(|_| "require fails".to_string())?;
    }
    let mut solver = Solver::with_store(st);
    let all = solutions(&mut solver, s);
    let distinct: BTreeSet<Vec<Node>> = all.iter().cloned().collect();
    ensure_eq!(all.len(), 6, "solutions");
    ensure_eq!(distinct.len(), 6, "distinct solutions");

    let mut union = BTreeSet::new();
    let mut count = 0;
    for d in two_step_branching(&solver.store, &[s]) {
        let lvl = solver.store.save_level();
        if solver.apply(|st| (d.apply)(st)).is_ok() {
            for sol in solutions(&mut solver, s) {
                count += 1;
                ensure!(union.insert(sol), "sibling subtrees are disjoint");
            }
        }
        solver.store.restore_level(lvl);
    }
    ensure_eq!(count, 6, "solutions across root subtrees");
    ensure_eq!(union, distinct, "union of root subtrees");
    Ok(())
}
