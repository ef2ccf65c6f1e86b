//! Insertion branchings and a large neighbourhood search driver.
//!
//! Every branching returns an empty list exactly when all the given
//! sequence variables are fixed; a dead end is reported as a single
//! failing decision so that the search counts it as a failure.

use std::time::Instant;

use rand::seq::index;
use rand::Rng;

use crate::engine::{CpResult, Decision, Inconsistency, IntVar, Limits, SeqVar, Solver, Store};
use crate::seqvar::Node;

fn dead_end() -> Vec<Decision> {
    vec![Decision::new(0, |_: &mut Store| Err(Inconsistency))]
}

/// Insertable `(seq, node)` with the fewest insertions, ties broken by
/// lowest sequence then lowest node.
fn first_fail(store: &Store, seqs: &[SeqVar]) -> Option<(SeqVar, Node)> {
    let mut best: Option<(usize, SeqVar, Node)> = None;
    for &s in seqs {
        let (dom, tr) = store.seq(s);
        let mut nodes = dom.insertable(tr).to_vec();
        nodes.sort_unstable();
        for v in nodes {
            let n = dom.n_insert(tr, v);
            if best.is_none_or(|(b, _, _)| n < b) {
                best = Some((n, s, v));
            }
        }
    }
    best.map(|(_, s, v)| (s, v))
}

/// Two-step n-ary branching: select the insertable node with the fewest
/// insertions, then branch on each of its insertion points (in sequence
/// order). A node that is not required gets one more branch excluding it.
pub fn two_step_branching(store: &Store, seqs: &[SeqVar]) -> Vec<Decision> {
    let Some((s, v)) = first_fail(store, seqs) else {
        return Vec::new();
    };
    let (dom, tr) = store.seq(s);
    let mut points: Vec<Node> = dom.inserts(tr, v).collect();
    let order = dom.members(tr);
    points.sort_by_key(|p| order.iter().position(|m| m == p));
    let mut out: Vec<Decision> = points
        .into_iter()
        .map(|p| Decision::new(0, move |st: &mut Store| st.insert(s, p, v)))
        .collect();
    if !dom.is_required(tr, v) {
        out.push(Decision::new(0, move |st: &mut Store| st.exclude(s, v)));
    }
    out
}

/// Binary branching on the first insertion point `p` of the first-fail
/// node `v`: insert `v` after `p`, or forbid it between `p` and its successor.
pub fn binary_branching(store: &Store, seqs: &[SeqVar]) -> Vec<Decision> {
    let Some((s, v)) = first_fail(store, seqs) else {
        return Vec::new();
    };
    let (dom, tr) = store.seq(s);
    let mut p = dom.alpha();
    while !dom.can_insert(tr, p, v) {
        p = dom.next(tr, p);
    }
    vec![
        Decision::new(0, move |st: &mut Store| st.insert(s, p, v)),
        Decision::new(1, move |st: &mut Store| {
            let k = st.seq(s).0.next(st.trail(), p);
            st.not_between(s, p, v, k)
        }),
    ]
}

/// A pickup and its drop, both nodes present in every route's domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Request {
    pub pickup: Node,
    pub drop: Node,
}

/// Cost of inserting `j` between consecutive members `i` and `k` of the
/// route with index `route`.
pub trait InsertionCost {
    fn cost(&self, store: &Store, route: usize, i: Node, j: Node, k: Node) -> i64;
}

impl<F: Fn(&Store, usize, Node, Node, Node) -> i64> InsertionCost for F {
    fn cost(&self, store: &Store, route: usize, i: Node, j: Node, k: Node) -> i64 {
        self(store, route, i, j, k)
    }
}

fn membership(store: &Store, routes: &[SeqVar], v: Node) -> Option<usize> {
    routes.iter().position(|&r| {
        let (dom, tr) = store.seq(r);
        dom.is_member(tr, v)
    })
}

/// Request selected by [`pair_branching`]: the one not fully inserted that
/// minimises `Σ_k nInsert(pickup) · nInsert(drop)`, lowest index on ties.
pub fn select_request(store: &Store, routes: &[SeqVar], requests: &[Request]) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for (idx, r) in requests.iter().enumerate() {
        let mut fully = false;
        let mut score = 0;
        for &route in routes {
            let (dom, tr) = store.seq(route);
            if dom.is_member(tr, r.pickup) && dom.is_member(tr, r.drop) {
                fully = true;
                break;
            }
            score += dom.n_insert(tr, r.pickup) * dom.n_insert(tr, r.drop);
        }
        if fully {
            continue;
        }
        if best.is_none_or(|(b, _)| score < b) {
            best = Some((score, idx));
        }
    }
    best.map(|(_, idx)| idx)
}

/// Request-insertion branching: every combination of a pickup insertion
/// `p⁺` and a drop insertion `p⁻` (strictly after `p⁺`, or right after the
/// pickup) in every route, sorted by increasing cost (stable).
///
/// The pair cost is the pickup leg `(p⁺, pickup, next(p⁺))` plus the drop
/// leg, `(pickup, drop, next(p⁺))` when `p⁻` is the pickup and
/// `(p⁻, drop, next(p⁻))` otherwise, both on the current domains.
/// Requests with one endpoint already inserted branch on the other one.
pub fn pair_branching<C: InsertionCost>(
    store: &Store,
    routes: &[SeqVar],
    requests: &[Request],
    cost: &C,
) -> Vec<Decision> {
    let Some(idx) = select_request(store, routes, requests) else {
        return if store.all_seqs_fixed() { Vec::new() } else { dead_end() };
    };
    let Request { pickup, drop } = requests[idx];
    let mut branches: Vec<(i64, usize, Node, Node)> = Vec::new();
    match (membership(store, routes, pickup), membership(store, routes, drop)) {
        (Some(k), None) => {
            let (dom, tr) = store.seq(routes[k]);
            let mut q = pickup;
            while q != dom.omega() {
                if dom.can_insert(tr, q, drop) {
                    let c = cost.cost(store, k, q, drop, dom.next(tr, q));
                    branches.push((c, k, q, drop));
                }
                q = dom.next(tr, q);
            }
        }
        (None, Some(k)) => {
            let (dom, tr) = store.seq(routes[k]);
            let mut p = dom.prev(tr, drop);
            loop {
                if dom.can_insert(tr, p, pickup) {
                    let c = cost.cost(store, k, p, pickup, dom.next(tr, p));
                    branches.push((c, k, p, pickup));
                }
                if p == dom.alpha() {
                    break;
                }
                p = dom.prev(tr, p);
            }
        }
        _ => {
            for (k, &route) in routes.iter().enumerate() {
                let (dom, tr) = store.seq(route);
                let picks: Vec<Node> = {
                    let order = dom.members(tr);
                    let mut v: Vec<Node> = dom.inserts(tr, pickup).collect();
                    v.sort_by_key(|p| order.iter().position(|m| m == p));
                    v
                };
                for p_plus in picks {
                    let after = dom.next(tr, p_plus);
                    let c_pick = cost.cost(store, k, p_plus, pickup, after);
                    let mut drops = vec![pickup];
                    drops.extend(dom.inserts_after(tr, drop, p_plus));
                    for p_minus in drops {
                        let c_drop = if p_minus == pickup {
                            cost.cost(store, k, pickup, drop, after)
                        } else {
                            cost.cost(store, k, p_minus, drop, dom.next(tr, p_minus))
                        };
                        branches.push((c_pick + c_drop, k, p_plus, p_minus));
                    }
                }
            }
        }
    }
    if branches.is_empty() {
        return dead_end();
    }
    branches.sort_by_key(|b| b.0);
    let partial = membership(store, routes, pickup).is_some() || membership(store, routes, drop).is_some();
    branches
        .into_iter()
        .map(|(c, k, a, b)| {
            let route = routes[k];
            if partial {
                // (a, b) is the single remaining insertion
                Decision::new(c, move |st: &mut Store| st.insert(route, a, b))
            } else {
                Decision::new(c, move |st: &mut Store| {
                    st.insert(route, a, pickup)?;
                    st.insert(route, b, drop)
                })
            }
        })
        .collect()
}

/// Routes (each from its start to its end node) and their objective.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub routes: Vec<Vec<Node>>,
    pub objective: i64,
}

impl Assignment {
    pub fn capture(store: &Store, routes: &[SeqVar], objective: IntVar) -> Self {
        Assignment {
            routes: routes
                .iter()
                .map(|&r| {
                    let (dom, tr) = store.seq(r);
                    dom.members(tr)
                })
                .collect(),
            objective: store.min(objective),
        }
    }
}

/// Runs DFS until its first solution.
pub fn first_solution<B>(
    solver: &mut Solver,
    routes: &[SeqVar],
    objective: IntVar,
    branching: &mut B,
    limits: &Limits,
) -> Option<Assignment>
where
    B: FnMut(&Store) -> Vec<Decision>,
{
    let mut found = None;
    let limits = Limits { max_solutions: Some(1), ..limits.clone() };
    solver.dfs(branching, Some(objective), &limits, &mut |st: &Store| {
        found = Some(Assignment::capture(st, routes, objective));
    });
    found
}

/// Rebuilds each route from the incumbent order without the `relaxed`
/// nodes, then propagates.
///
/// Each retained node goes right after the previous retained one, which is
/// appending at the end unless an earlier insertion auto-inserted a later
/// node; such a node is already a member and is skipped.
pub fn reconstruct(
    solver: &mut Solver,
    routes: &[SeqVar],
    incumbent: &Assignment,
    relaxed: &[Node],
) -> CpResult<()> {
    for (k, &route) in routes.iter().enumerate() {
        let nodes = &incumbent.routes[k];
        if nodes.len() < 2 {
            continue;
        }
        let mut last = nodes[0];
        for &v in &nodes[1..nodes.len() - 1] {
            if relaxed.contains(&v) {
                continue;
            }
            let member = {
                let (dom, tr) = solver.store.seq(route);
                dom.is_member(tr, v)
            };
            if !member {
                solver.store.insert(route, last, v)?;
            }
            last = v;
        }
    }
    solver.fixpoint()
}

#[derive(Debug, Clone)]
pub struct LnsConfig {
    /// Requests relaxed per iteration (all of them if fewer).
    pub relax: usize,
    /// Failure budget of each reconstruction search.
    pub fail_limit: u64,
    pub deadline: Option<Instant>,
    pub max_iterations: Option<u64>,
}

impl Default for LnsConfig {
    fn default() -> Self {
        LnsConfig { relax: 10, fail_limit: 1000, deadline: None, max_iterations: None }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LnsStats {
    pub iterations: u64,
    pub improvements: u64,
    /// Iterations whose reconstruction wiped out.
    pub abandoned: u64,
    /// `(iteration, objective)` of every accepted solution.
    pub trace: Vec<(u64, i64)>,
}

/// Large neighbourhood search from a feasible `incumbent`. Each iteration
/// relaxes uniformly drawn requests, rebuilds the other visits in order and
/// searches with `branching` under `objective ≤ best − 1`. Only strict
/// improvements are accepted. The solver state is left unchanged.
#[allow(clippy::too_many_arguments)]
pub fn lns<B, R, F>(
    solver: &mut Solver,
    routes: &[SeqVar],
    requests: &[Request],
    objective: IntVar,
    branching: &mut B,
    incumbent: Assignment,
    cfg: &LnsConfig,
    rng: &mut R,
    on_improve: &mut F,
) -> (Assignment, LnsStats)
where
    B: FnMut(&Store) -> Vec<Decision>,
    R: Rng,
    F: FnMut(&Assignment),
{
    let mut best = incumbent;
    let mut stats = LnsStats::default();
    let amount = cfg.relax.min(requests.len());
    loop {
        if cfg.max_iterations.is_some_and(|m| stats.iterations >= m)
            || cfg.deadline.is_some_and(|d| Instant::now() >= d)
        {
            break;
        }
        stats.iterations += 1;
        let mut relaxed: Vec<Node> = Vec::with_capacity(2 * amount);
        for i in index::sample(rng, requests.len(), amount) {
            relaxed.push(requests[i].pickup);
            relaxed.push(requests[i].drop);
        }
        let level = solver.store.save_level();
        let rebuilt = reconstruct(solver, routes, &best, &relaxed)
            .and_then(|_| solver.store.set_max(objective, best.objective - 1))
            .and_then(|_| solver.fixpoint());
        match rebuilt {
            Ok(()) => {
                let limits = Limits {
                    max_failures: Some(cfg.fail_limit),
                    deadline: cfg.deadline,
                    max_solutions: None,
                };
                let mut found: Option<Assignment> = None;
                solver.dfs(branching, Some(objective), &limits, &mut |st: &Store| {
                    found = Some(Assignment::capture(st, routes, objective));
                });
                if let Some(a) = found {
                    if a.objective < best.objective {
                        best = a;
                        stats.improvements += 1;
                        stats.trace.push((stats.iterations, best.objective));
                        on_improve(&best);
                    }
                }
            }
            Err(_) => stats.abandoned += 1,
        }
        solver.store.restore_level(level);
    }
    (best, stats)
}
