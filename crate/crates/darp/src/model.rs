//! Sequence-variable DARP model.
//!
//! One sequence variable per vehicle, from its start copy of the depot to
//! its end copy. Time variables are shared between vehicles: a node's
//! time is only constrained by the route that visits it, so one variable
//! per node suffices.

use std::rc::Rc;

use seqcp::constraints::{
    Activity, Cumulative, Distance, DistanceMatrix, LeqOffset, Precedence, Sum, TransitionTimes, VisitEqual,
    VisitSum,
};
use seqcp::search::{pair_branching, Request};
use seqcp::{BoolVisitView, CpResult, Decision, IntVar, Node, SeqVar, Solver, Store};
use serde::{Deserialize, Serialize};

use crate::instance::{scale, Instance, Layout, Scaled};

/// Constraint sets: the full DARP, without ride time and route duration
/// (PDPTW), or additionally without time windows (PDP).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Darp,
    Pdptw,
    Pdp,
}

impl Variant {
    pub fn has_ride_and_duration(self) -> bool {
        self == Variant::Darp
    }

    pub fn has_windows(self) -> bool {
        self != Variant::Pdp
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Darp => "darp",
            Variant::Pdptw => "pdptw",
            Variant::Pdp => "pdp",
        }
    }
}

/// Detour weight of the insertion heuristic.
pub const C1: i64 = 80;
/// Weight of the preserved time slack.
pub const C2: i64 = 1;

/// Heuristic cost of inserting `j` between `i` and its successor `k`:
/// `C1 · detour − C2 · slack`, where the slack is what remains of the
/// widest gap `ub(Time_k) − lb(Time_i)` once `j` is served in it.
#[allow(clippy::too_many_arguments)]
pub fn insertion_cost(d_ij: i64, d_jk: i64, d_ik: i64, ub_time_k: i64, lb_time_i: i64, s_i: i64, s_j: i64) -> i64 {
    C1 * (d_ij + d_jk - d_ik) - C2 * (ub_time_k - lb_time_i - s_i - d_ij - s_j - d_jk)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("root propagation proves the instance infeasible")]
pub struct Infeasible;

pub struct Model {
    pub solver: Solver,
    pub variant: Variant,
    pub layout: Layout,
    pub routes: Vec<SeqVar>,
    /// Start of service, per node.
    pub time: Vec<IntVar>,
    /// Travelled distance, per route.
    pub dist: Vec<IntVar>,
    pub objective: IntVar,
    pub requests: Vec<Request>,
    pub d: Rc<DistanceMatrix>,
    pub service: Rc<Vec<i64>>,
}

impl Model {
    pub fn build(inst: &Instance, variant: Variant) -> Result<Model, Infeasible> {
        Self::build_scaled(inst, &inst.scaled(), variant)
    }

    pub fn build_scaled(inst: &Instance, data: &Scaled, variant: Variant) -> Result<Model, Infeasible> {
        let layout = inst.layout();
        let n = layout.node_count();
        let (nk, nr) = (layout.vehicles, layout.requests);
        let d = Rc::new(data.d.clone());
        let service = Rc::new(data.service.clone());
        // every route has to be back at the depot by its closing time
        let horizon = data.close[layout.start(0)];
        let mut solver = Solver::new();
        let st = &mut solver.store;

        let time: Vec<IntVar> = (0..n)
            .map(|v| {
                if variant.has_windows() {
                    st.new_int(data.open[v], data.close[v])
                } else {
                    st.new_int(0, horizon)
                }
            })
            .collect();
        let longest: i64 = (0..n).map(|i| (0..n).map(|j| d.get(i, j)).max().unwrap_or(0)).sum();
        let dist: Vec<IntVar> = (0..nk).map(|_| st.new_int(0, longest)).collect();
        let objective = st.new_int(0, longest * nk as i64);
        let routes: Vec<SeqVar> = (0..nk).map(|k| st.new_seq(n, layout.start(k), layout.end(k))).collect();
        let requests: Vec<Request> =
            (0..nr).map(|i| Request { pickup: layout.pickup(i), drop: layout.drop(i) }).collect();

        let mut run = |f: &mut dyn FnMut(&mut Solver) -> CpResult<()>| f(&mut solver).map_err(|_| Infeasible);

        for k in 0..nk {
            let route = routes[k];
            run(&mut |s| {
                for other in 0..nk {
                    if other != k {
                        s.store.exclude(route, layout.start(other))?;
                        s.store.exclude(route, layout.end(other))?;
                    }
                }
                s.fixpoint()
            })?;
            run(&mut |s| s.post(Distance::new(route, d.clone(), dist[k])))?;
            run(&mut |s| s.post(TransitionTimes::new(route, time.clone(), service.clone(), d.clone())))?;
            for r in &requests {
                run(&mut |s| s.post(Precedence::new(route, vec![r.pickup, r.drop], n)))?;
                run(&mut |s| {
                    s.post(VisitEqual::new(BoolVisitView::new(route, r.pickup), BoolVisitView::new(route, r.drop)))
                })?;
            }
            let acts: Vec<Activity> = (0..nr)
                .filter(|&i| inst.load(i) > 0)
                .map(|i| Activity { start: layout.pickup(i), end: layout.drop(i), load: inst.load(i) })
                .collect();
            run(&mut |s| s.post(Cumulative::new(route, acts.clone(), inst.capacity)))?;
        }
        for v in nk..nk + 2 * nr {
            let views: Vec<BoolVisitView> = routes.iter().map(|&r| BoolVisitView::new(r, v)).collect();
            run(&mut |s| s.post(VisitSum::new(views.clone(), 1, 1)))?;
        }
        if variant.has_ride_and_duration() {
            let ride = scale(inst.max_ride);
            for r in &requests {
                let offset = service[r.pickup] + ride;
                run(&mut |s| s.post(LeqOffset::new(time[r.drop], time[r.pickup], offset)))?;
            }
            let duration = scale(inst.max_duration);
            for k in 0..nk {
                let (a, b) = (layout.start(k), layout.end(k));
                run(&mut |s| s.post(LeqOffset::new(time[b], time[a], duration)))?;
            }
        }
        run(&mut |s| s.post(Sum::new(dist.clone(), objective)))?;

        Ok(Model { solver, variant, layout, routes, time, dist, objective, requests, d, service })
    }

    /// Request-insertion branching ordered by [`insertion_cost`] on the
    /// current time bounds.
    pub fn branching(&self) -> impl FnMut(&Store) -> Vec<Decision> {
        let routes = self.routes.clone();
        let requests = self.requests.clone();
        let (d, service, time) = (self.d.clone(), self.service.clone(), self.time.clone());
        let cost = move |st: &Store, _route: usize, i: Node, j: Node, k: Node| {
            insertion_cost(
                d.get(i, j),
                d.get(j, k),
                d.get(i, k),
                st.max(time[k]),
                st.min(time[i]),
                service[i],
                service[j],
            )
        };
        move |st: &Store| pair_branching(st, &routes, &requests, &cost)
    }

    /// Lower bound of the objective after root propagation.
    pub fn root_bound(&self) -> i64 {
        self.solver.store.min(self.objective)
    }
}
