//! Independent solution checker.
//!
//! Recomputes distances from the coordinates with its own rounding and
//! shortest-path repair, then checks the route structure, precedence,
//! loads, windows, travel times, ride times, route durations and the
//! objective. Nothing here goes through the solver.

use std::fmt;

use crate::instance::{Instance, NodeKind};
use crate::model::Variant;
use crate::solution::Solution;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    VehicleCount { expected: usize, found: usize },
    BadEndpoints { vehicle: usize },
    UnknownNode { vehicle: usize, node: usize },
    VisitedTwice { node: usize },
    NotVisited { node: usize },
    DropBeforePickup { request: usize },
    SplitRequest { request: usize },
    Capacity { vehicle: usize, node: usize, load: i64 },
    Window { node: usize, time: i64, open: i64, close: i64 },
    Travel { from: usize, to: usize, arrival: i64, time: i64 },
    RideTime { request: usize, ride: i64, limit: i64 },
    Duration { vehicle: usize, duration: i64, limit: i64 },
    Objective { reported: i64, recomputed: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            VehicleCount { expected, found } => write!(f, "{found} routes for {expected} vehicles"),
            BadEndpoints { vehicle } => write!(f, "vehicle {vehicle} does not start and end at its depot copies"),
            UnknownNode { vehicle, node } => write!(f, "vehicle {vehicle} visits unknown node {node}"),
            VisitedTwice { node } => write!(f, "node {node} visited more than once"),
            NotVisited { node } => write!(f, "node {node} never visited"),
            DropBeforePickup { request } => write!(f, "request {request} dropped before its pickup"),
            SplitRequest { request } => write!(f, "request {request} picked up and dropped by different vehicles"),
            Capacity { vehicle, node, load } => write!(f, "vehicle {vehicle} carries {load} after node {node}"),
            Window { node, time, open, close } => write!(f, "node {node} served at {time} outside [{open}, {close}]"),
            Travel { from, to, arrival, time } => {
                write!(f, "node {to} served at {time} but reachable from {from} only at {arrival}")
            }
            RideTime { request, ride, limit } => write!(f, "request {request} rides {ride} > {limit}"),
            Duration { vehicle, duration, limit } => write!(f, "vehicle {vehicle} runs {duration} > {limit}"),
            Objective { reported, recomputed } => write!(f, "objective {reported} but routes travel {recomputed}"),
        }
    }
}

fn hundredths(x: f64) -> i64 {
    // non-negative inputs: round() and half-up agree
    (x * 100.0).round() as i64
}

/// Scaled Euclidean distances closed under shortest paths.
fn distances(inst: &Instance) -> Vec<Vec<i64>> {
    let n = inst.layout().node_count();
    let mut d = vec![vec![0i64; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        let a = inst.site(i);
        for (j, e) in row.iter_mut().enumerate() {
            let b = inst.site(j);
            *e = hundredths(((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt());
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][m] + d[m][j] < d[i][j] {
                    d[i][j] = d[i][m] + d[m][j];
                }
            }
        }
    }
    d
}

/// All violations of `sol` on `inst` under the constraints of `variant`;
/// empty when the solution is feasible and its objective exact.
pub fn validate(inst: &Instance, sol: &Solution, variant: Variant) -> Vec<Violation> {
    let mut out = Vec::new();
    let l = inst.layout();
    let n = l.node_count();
    if sol.routes.len() != l.vehicles {
        out.push(Violation::VehicleCount { expected: l.vehicles, found: sol.routes.len() });
        return out;
    }
    for (k, r) in sol.routes.iter().enumerate() {
        if let Some(v) = r.iter().find(|v| v.node >= n) {
            out.push(Violation::UnknownNode { vehicle: k, node: v.node });
        }
    }
    if !out.is_empty() {
        return out;
    }
    let d = distances(inst);
    let service: Vec<i64> = (0..n).map(|v| hundredths(inst.site(v).service)).collect();

    let mut vehicle_of = vec![None; n];
    let mut position = vec![0usize; n];
    for (k, r) in sol.routes.iter().enumerate() {
        let ok = r.len() >= 2 && r[0].node == l.start(k) && r[r.len() - 1].node == l.end(k);
        if !ok {
            out.push(Violation::BadEndpoints { vehicle: k });
        }
        for (p, v) in r.iter().enumerate() {
            if vehicle_of[v.node].is_some() {
                out.push(Violation::VisitedTwice { node: v.node });
            }
            vehicle_of[v.node] = Some(k);
            position[v.node] = p;
        }
    }
    for i in 0..l.requests {
        let (p, q) = (l.pickup(i), l.drop(i));
        for v in [p, q] {
            if vehicle_of[v].is_none() {
                out.push(Violation::NotVisited { node: v });
            }
        }
        if let (Some(a), Some(b)) = (vehicle_of[p], vehicle_of[q]) {
            if a != b {
                out.push(Violation::SplitRequest { request: i });
            } else if position[q] < position[p] {
                out.push(Violation::DropBeforePickup { request: i });
            }
        }
    }

    let mut time = vec![0i64; n];
    let mut travelled = 0;
    for (k, r) in sol.routes.iter().enumerate() {
        let mut load = 0;
        for (idx, v) in r.iter().enumerate() {
            time[v.node] = v.time;
            load += match l.kind(v.node) {
                NodeKind::Pickup(i) => inst.load(i),
                NodeKind::Drop(i) => -inst.load(i),
                _ => 0,
            };
            if load > inst.capacity || load < 0 {
                out.push(Violation::Capacity { vehicle: k, node: v.node, load });
            }
            if idx > 0 {
                let u = r[idx - 1];
                travelled += d[u.node][v.node];
                let arrival = u.time + service[u.node] + d[u.node][v.node];
                if v.time < arrival {
                    out.push(Violation::Travel { from: u.node, to: v.node, arrival, time: v.time });
                }
            }
            let site = inst.site(v.node);
            let (open, close) = if variant.has_windows() {
                (hundredths(site.open), hundredths(site.close))
            } else {
                (0, hundredths(inst.depot.close))
            };
            if v.time < open || v.time > close {
                out.push(Violation::Window { node: v.node, time: v.time, open, close });
            }
        }
        if variant.has_ride_and_duration() && r.len() >= 2 {
            let duration = r[r.len() - 1].time - r[0].time;
            let limit = hundredths(inst.max_duration);
            if duration > limit {
                out.push(Violation::Duration { vehicle: k, duration, limit });
            }
        }
    }
    if variant.has_ride_and_duration() {
        let limit = hundredths(inst.max_ride);
        for i in 0..l.requests {
            let (p, q) = (l.pickup(i), l.drop(i));
            if vehicle_of[p].is_some() && vehicle_of[q].is_some() {
                let ride = time[q] - time[p] - service[p];
                if ride > limit {
                    out.push(Violation::RideTime { request: i, ride, limit });
                }
            }
        }
    }
    if travelled != sol.objective {
        out.push(Violation::Objective { reported: sol.objective, recomputed: travelled });
    }
    out
}
