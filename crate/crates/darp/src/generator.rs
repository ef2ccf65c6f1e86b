//! Synthetic instances shaped like the Cordeau benchmark.
//!
//! A planted schedule makes every generated instance feasible: requests are
//! dealt round-robin to vehicles, each vehicle serves its requests one at a
//! time and the tight window of each request is drawn around the planted
//! visit. As in the benchmark, half of the requests constrain the pickup
//! and the other half the drop; the free end keeps the depot window.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, Site};

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub vehicles: usize,
    pub requests: usize,
    /// Coordinates are drawn in `[-half_side, half_side]²`.
    pub half_side: f64,
    pub service: f64,
    pub capacity: i64,
    pub max_duration: f64,
    pub max_ride: f64,
    pub window_width: f64,
    pub horizon: f64,
    pub max_load: i64,
}

impl GenConfig {
    /// Scalars of the `pr` benchmark files: T 480, Q 6, L 90, 15-minute
    /// windows, 3-minute service and a 1440-minute horizon.
    pub fn cordeau_like(vehicles: usize, requests: usize) -> Self {
        GenConfig {
            vehicles,
            requests,
            half_side: 10.0,
            service: 3.0,
            capacity: 6,
            max_duration: 480.0,
            max_ride: 90.0,
            window_width: 15.0,
            horizon: 1440.0,
            max_load: 1,
        }
    }

    /// Tiny instances for exhaustive checks: tighter windows and ride times
    /// and loads up to 2, so that capacity, ride time and windows all bite.
    pub fn tiny(vehicles: usize, requests: usize) -> Self {
        GenConfig {
            vehicles,
            requests,
            half_side: 5.0,
            service: 1.0,
            capacity: 2,
            max_duration: 120.0,
            max_ride: 20.0,
            window_width: 10.0,
            horizon: 240.0,
            max_load: 2,
        }
    }
}

pub fn generate(name: &str, cfg: &GenConfig, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = cfg.half_side;
    let point = |rng: &mut ChaCha8Rng| {
        let x: f64 = rng.gen_range(-side..=side);
        let y: f64 = rng.gen_range(-side..=side);
        ((x * 1000.0).round() / 1000.0, (y * 1000.0).round() / 1000.0)
    };
    let r = cfg.requests;
    let depot = Site {
        file_id: 0,
        x: 0.0,
        y: 0.0,
        service: 0.0,
        load: 0,
        open: 0.0,
        close: cfg.horizon,
    };
    let mut pickups = Vec::with_capacity(r);
    let mut drops = Vec::with_capacity(r);
    let mut clock = vec![0.0_f64; cfg.vehicles];
    let mut at = vec![(0.0_f64, 0.0_f64); cfg.vehicles];
    for i in 0..r {
        let k = i % cfg.vehicles;
        let (px, py) = point(&mut rng);
        let (dx, dy) = point(&mut rng);
        let load = rng.gen_range(1..=cfg.max_load.min(cfg.capacity));
        let slack: f64 = rng.gen_range(0.0..5.0);
        // the 0.1 margins absorb the rounding of scaled distances
        let t_pick = clock[k] + (at[k].0 - px).hypot(at[k].1 - py) + 0.1 + slack;
        let t_drop = t_pick + cfg.service + (px - dx).hypot(py - dy) + 0.1;
        clock[k] = t_drop + cfg.service;
        at[k] = (dx, dy);
        // open is floored, so keeping shift below width - 1 keeps t inside
        let shift: f64 = rng.gen_range(0.0..cfg.window_width - 1.0);
        let tight = |t: f64| {
            let open = ((t - shift).max(0.0)).floor();
            (open, open + cfg.window_width)
        };
        let (p_win, d_win) = if i % 2 == 0 {
            (tight(t_pick), (0.0, cfg.horizon))
        } else {
            ((0.0, cfg.horizon), tight(t_drop))
        };
        pickups.push(Site {
            file_id: i as i64 + 1,
            x: px,
            y: py,
            service: cfg.service,
            load,
            open: p_win.0,
            close: p_win.1,
        });
        drops.push(Site {
            file_id: (r + i) as i64 + 1,
            x: dx,
            y: dy,
            service: cfg.service,
            load: -load,
            open: d_win.0,
            close: d_win.1,
        });
    }
    // the planted routes must respect the duration and ride limits
    let back = clock
        .iter()
        .zip(&at)
        .map(|(&c, &(x, y))| c + x.hypot(y) + 0.1)
        .fold(0.0_f64, f64::max);
    let longest_ride = pickups
        .iter()
        .zip(&drops)
        .map(|(p, d)| (p.x - d.x).hypot(p.y - d.y))
        .fold(0.0_f64, f64::max);
    Instance {
        name: name.to_string(),
        vehicles: cfg.vehicles,
        capacity: cfg.capacity,
        max_duration: cfg.max_duration.max(back.ceil() + cfg.window_width),
        max_ride: cfg.max_ride.max(longest_ride.ceil() + 1.0),
        depot,
        pickups,
        drops,
    }
}
