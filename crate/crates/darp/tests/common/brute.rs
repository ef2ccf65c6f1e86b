//! Exhaustive DARP optimum: every split of the requests over the vehicles,
//! every visit order of each vehicle and an exact schedule check. Shares
//! no code with the solver or the validator.

#![allow(dead_code)]

use darp::{Instance, Variant};

fn centi(x: f64) -> i64 {
    (x * 100.0 + 0.5).floor() as i64
}

/// Site of position `p` in `[depot | pickups | drops]`.
fn coords(inst: &Instance, p: usize) -> (f64, f64) {
    let r = inst.pickups.len();
    let s = match p {
        0 => &inst.depot,
        _ if p <= r => &inst.pickups[p - 1],
        _ => &inst.drops[p - 1 - r],
    };
    (s.x, s.y)
}

/// Shortest-path closure of the rounded Euclidean distances over
/// `[depot | pickups | drops]`.
fn distances(inst: &Instance) -> Vec<Vec<i64>> {
    let m = 1 + 2 * inst.pickups.len();
    let mut d: Vec<Vec<i64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let (a, b) = (coords(inst, i), coords(inst, j));
                    centi(((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
                })
                .collect()
        })
        .collect();
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    d
}

/// A stop: request index and whether it is the pickup.
type Stop = (usize, bool);

struct Data<'a> {
    inst: &'a Instance,
    variant: Variant,
    d: Vec<Vec<i64>>,
}

impl Data<'_> {
    fn pos(&self, s: Stop) -> usize {
        if s.1 {
            1 + s.0
        } else {
            1 + self.inst.pickups.len() + s.0
        }
    }

    fn window(&self, p: usize) -> (i64, i64) {
        let r = self.inst.pickups.len();
        let s = match p {
            0 => &self.inst.depot,
            _ if p <= r => &self.inst.pickups[p - 1],
            _ => &self.inst.drops[p - 1 - r],
        };
        if self.variant == Variant::Pdp {
            (0, centi(self.inst.depot.close))
        } else {
            (centi(s.open), centi(s.close))
        }
    }

    fn service(&self, p: usize) -> i64 {
        let r = self.inst.pickups.len();
        match p {
            0 => centi(self.inst.depot.service),
            _ if p <= r => centi(self.inst.pickups[p - 1].service),
            _ => centi(self.inst.drops[p - 1 - r].service),
        }
    }

    /// Whether the route depot·stops·depot has a schedule: lower bounds are
    /// raised along every difference constraint until stable or past a
    /// window end.
    fn schedulable(&self, stops: &[Stop]) -> bool {
        let mut path = vec![0];
        path.extend(stops.iter().map(|&s| self.pos(s)));
        path.push(0);
        let m = path.len();
        // (from, to, w): t[to] ≥ t[from] + w
        let mut cons: Vec<(usize, usize, i64)> = Vec::new();
        for i in 0..m - 1 {
            cons.push((i, i + 1, self.service(path[i]) + self.d[path[i]][path[i + 1]]));
        }
        if self.variant == Variant::Darp {
            let ride = centi(self.inst.max_ride);
            for (a, &(req, pick)) in stops.iter().enumerate() {
                if pick {
                    let b = stops.iter().position(|&s| s == (req, false)).unwrap();
                    // t[drop] ≤ t[pick] + s + L
                    cons.push((b + 1, a + 1, -(self.service(path[a + 1]) + ride)));
                }
            }
            cons.push((m - 1, 0, -centi(self.inst.max_duration)));
        }
        let mut t: Vec<i64> = path.iter().map(|&p| self.window(p).0).collect();
        loop {
            let mut changed = false;
            for &(a, b, w) in &cons {
                if t[b] < t[a] + w {
                    t[b] = t[a] + w;
                    changed = true;
                }
            }
            if (0..m).any(|i| t[i] > self.window(path[i]).1) {
                return false;
            }
            if !changed {
                return true;
            }
        }
    }

    fn length(&self, stops: &[Stop]) -> i64 {
        let mut prev = 0;
        let mut total = 0;
        for &s in stops {
            let p = self.pos(s);
            total += self.d[prev][p];
            prev = p;
        }
        total + self.d[prev][0]
    }

    /// Shortest feasible order of the given requests on one vehicle.
    fn best_route(&self, requests: &[usize]) -> Option<i64> {
        let mut best = None;
        let mut stops = Vec::new();
        let mut picked = vec![false; requests.len()];
        let mut dropped = vec![false; requests.len()];
        self.extend(requests, &mut stops, &mut picked, &mut dropped, &mut best);
        best
    }

    fn extend(
        &self,
        requests: &[usize],
        stops: &mut Vec<Stop>,
        picked: &mut Vec<bool>,
        dropped: &mut Vec<bool>,
        best: &mut Option<i64>,
    ) {
        if stops.len() == 2 * requests.len() {
            if self.capacity_ok(stops) && self.schedulable(stops) {
                let len = self.length(stops);
                if best.is_none_or(|b| len < b) {
                    *best = Some(len);
                }
            }
            return;
        }
        for i in 0..requests.len() {
            if !picked[i] {
                picked[i] = true;
                stops.push((requests[i], true));
                self.extend(requests, stops, picked, dropped, best);
                stops.pop();
                picked[i] = false;
            } else if !dropped[i] {
                dropped[i] = true;
                stops.push((requests[i], false));
                self.extend(requests, stops, picked, dropped, best);
                stops.pop();
                dropped[i] = false;
            }
        }
    }

    fn capacity_ok(&self, stops: &[Stop]) -> bool {
        let mut load = 0;
        for &(req, pick) in stops {
            let q = self.inst.pickups[req].load;
            load += if pick { q } else { -q };
            if load > self.inst.capacity {
                return false;
            }
        }
        true
    }
}

/// Minimum total scaled distance, `None` when infeasible.
pub fn optimum(inst: &Instance, variant: Variant) -> Option<i64> {
    let data = Data { inst, variant, d: distances(inst) };
    let (k, r) = (inst.vehicles, inst.pickups.len());
    let mut best: Option<i64> = None;
    let mut owner = vec![0usize; r];
    loop {
        let mut total = Some(0);
        for v in 0..k {
            let mine: Vec<usize> = (0..r).filter(|&i| owner[i] == v).collect();
            total = match (total, data.best_route(&mine)) {
                (Some(t), Some(x)) => Some(t + x),
                _ => None,
            };
        }
        if let Some(t) = total {
            if best.is_none_or(|b| t < b) {
                best = Some(t);
            }
        }
        // next assignment in base k
        let mut i = 0;
        while i < r && owner[i] == k - 1 {
            owner[i] = 0;
            i += 1;
        }
        if i == r {
            return best;
        }
        owner[i] += 1;
    }
}
