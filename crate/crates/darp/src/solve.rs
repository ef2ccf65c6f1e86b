//! First solution, large neighbourhood search and exact search on a
//! [`Model`].

use std::time::{Duration, Instant};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seqcp::search::{first_solution, lns, reconstruct, Assignment, LnsConfig, LnsStats};
use seqcp::{CpResult, Limits, SearchStats};

use crate::instance::Instance;
use crate::model::{Infeasible, Model, Variant};
use crate::solution::{Solution, Visit};

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub variant: Variant,
    pub seed: u64,
    /// Requests relaxed per LNS iteration.
    pub relax: usize,
    /// Failure budget of each LNS iteration.
    pub fail_limit: u64,
    pub time_limit: Option<Duration>,
    pub max_iterations: Option<u64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            variant: Variant::Darp,
            seed: 0,
            relax: 10,
            fail_limit: 1000,
            time_limit: None,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Solved { solution: Solution, stats: RunStats },
    /// Root propagation or a complete first-solution search failed.
    Infeasible,
    /// The limits ran out before a first solution.
    NoSolution,
}

#[derive(Debug, Clone, Default)]
pub struct RunStats {
    pub first_objective: i64,
    pub first_after: Duration,
    pub lns: LnsStats,
    /// `(elapsed, objective)` of the first and every improving solution.
    pub timeline: Vec<(Duration, i64)>,
}

impl Model {
    /// Fixes every route to `a` and reads the earliest schedule.
    ///
    /// With every route fixed the remaining constraints on times are
    /// difference constraints, so at fix-point the lower bounds of the time
    /// variables form a feasible schedule.
    pub fn realize(&mut self, inst: &Instance, a: &Assignment) -> CpResult<Solution> {
        let level = self.solver.store.save_level();
        let res = self.replay(a).map(|()| Solution {
            instance: inst.name.clone(),
            variant: self.variant,
            objective: self.solver.store.min(self.objective),
            routes: a
                .routes
                .iter()
                .map(|r| r.iter().map(|&v| Visit { node: v, time: self.solver.store.min(self.time[v]) }).collect())
                .collect(),
        });
        self.solver.store.restore_level(level);
        res
    }

    fn replay(&mut self, a: &Assignment) -> CpResult<()> {
        reconstruct(&mut self.solver, &self.routes, a, &[])?;
        for (k, r) in self.routes.iter().enumerate() {
            let (dom, tr) = self.solver.store.seq(*r);
            if !dom.is_fixed(tr) || dom.members(tr) != a.routes[k] {
                return Err(seqcp::Inconsistency);
            }
        }
        Ok(())
    }

    /// Routes of `sol` as an assignment of this model, if they are feasible.
    pub fn assignment_of(&mut self, sol: &Solution) -> Option<Assignment> {
        let l = self.layout;
        let routes: Vec<Vec<usize>> = sol.routes.iter().map(|r| r.iter().map(|v| v.node).collect()).collect();
        let well_formed = routes.len() == l.vehicles
            && routes.iter().enumerate().all(|(k, r)| {
                r.len() >= 2
                    && r[0] == l.start(k)
                    && r[r.len() - 1] == l.end(k)
                    && r.iter().all(|&v| v < l.node_count())
            });
        if !well_formed {
            return None;
        }
        let mut a = Assignment { routes, objective: 0 };
        let level = self.solver.store.save_level();
        let ok = self.replay(&a).is_ok();
        a.objective = self.solver.store.min(self.objective);
        self.solver.store.restore_level(level);
        ok.then_some(a)
    }

    pub fn first_solution(&mut self, limits: &Limits) -> Option<Assignment> {
        let mut branching = self.branching();
        let (routes, obj) = (self.routes.clone(), self.objective);
        first_solution(&mut self.solver, &routes, obj, &mut branching, limits)
    }

    /// Exhaustive branch and bound. Returns the best assignment and the
    /// search statistics (`complete` tells whether optimality is proven).
    pub fn optimize(&mut self, limits: &Limits) -> (Option<Assignment>, SearchStats) {
        let mut branching = self.branching();
        let (routes, obj) = (self.routes.clone(), self.objective);
        let mut best = None;
        let stats = self.solver.dfs(&mut branching, Some(obj), limits, &mut |st| {
            best = Some(Assignment::capture(st, &routes, obj));
        });
        (best, stats)
    }
}

/// Builds the model, finds a first solution and improves it by LNS until
/// the limits run out. `on_improve` sees every incumbent in order, once
/// the search is over.
pub fn solve(inst: &Instance, cfg: &SolveConfig, on_improve: &mut dyn FnMut(&Solution)) -> Outcome {
    let started = Instant::now();
    let Ok(mut model) = Model::build(inst, cfg.variant) else {
        return Outcome::Infeasible;
    };
    let deadline = cfg.time_limit.map(|t| started + t);
    let limits = Limits { deadline, ..Limits::default() };
    let first = model.first_solution(&limits);
    let Some(first) = first else {
        let complete = deadline.is_none_or(|d| Instant::now() < d);
        return if complete { Outcome::Infeasible } else { Outcome::NoSolution };
    };
    improve(inst, &mut model, first, cfg, started, on_improve)
}

/// LNS from a known solution, e.g. one of a more constrained variant.
/// Fails if `start` does not fit the model.
pub fn solve_from(
    inst: &Instance,
    start: &Solution,
    cfg: &SolveConfig,
    on_improve: &mut dyn FnMut(&Solution),
) -> Result<Outcome, Infeasible> {
    let started = Instant::now();
    let mut model = Model::build(inst, cfg.variant)?;
    let first = model.assignment_of(start).ok_or(Infeasible)?;
    Ok(improve(inst, &mut model, first, cfg, started, on_improve))
}

fn improve(
    inst: &Instance,
    model: &mut Model,
    first: Assignment,
    cfg: &SolveConfig,
    started: Instant,
    on_improve: &mut dyn FnMut(&Solution),
) -> Outcome {
    let realize = |model: &mut Model, a: &Assignment| model.realize(inst, a).expect("search solutions replay");
    let first_sol = realize(model, &first);
    on_improve(&first_sol);
    let mut stats = RunStats {
        first_objective: first.objective,
        first_after: started.elapsed(),
        timeline: vec![(started.elapsed(), first.objective)],
        ..RunStats::default()
    };
    let lns_cfg = LnsConfig {
        relax: cfg.relax,
        fail_limit: cfg.fail_limit,
        deadline: cfg.time_limit.map(|t| started + t),
        max_iterations: cfg.max_iterations,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut branching = model.branching();
    let (routes, requests, obj) = (model.routes.clone(), model.requests.clone(), model.objective);
    let mut improvements = Vec::new();
    let (best, lns_stats) = lns(
        &mut model.solver,
        &routes,
        &requests,
        obj,
        &mut branching,
        first,
        &lns_cfg,
        &mut rng,
        &mut |a: &Assignment| improvements.push((started.elapsed(), a.clone())),
    );
    for (at, a) in &improvements {
        stats.timeline.push((*at, a.objective));
        on_improve(&realize(model, a));
    }
    stats.lns = lns_stats;
    let solution = realize(model, &best);
    Outcome::Solved { solution, stats }
}
