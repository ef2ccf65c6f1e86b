//! Cordeau-format dial-a-ride instances.
//!
//! Header `K N T Q L` (vehicles, nodes or requests, maximum route duration,
//! capacity, maximum ride time), then one row per site
//! `id x y service load open close`: the depot, every pickup, every drop
//! (drop of request `i` at row `i + |R|`) and optionally a trailing copy of
//! the depot. Some files count nodes in `N`, others requests; the number of
//! rows tells them apart.

use std::path::Path;

use seqcp::constraints::DistanceMatrix;
use seqcp::Node;
use thiserror::Error;

/// Fixed-point factor shared by distances and times.
pub const SCALE: f64 = 100.0;

/// `x · 100` rounded half up.
pub fn scale(x: f64) -> i64 {
    (x * SCALE + 0.5).floor() as i64
}

pub fn unscale(x: i64) -> f64 {
    x as f64 / SCALE
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Shape(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

/// One row of the file, in file units.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub file_id: i64,
    pub x: f64,
    pub y: f64,
    pub service: f64,
    pub load: i64,
    pub open: f64,
    pub close: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub vehicles: usize,
    pub capacity: i64,
    /// Maximum route duration `t^d`.
    pub max_duration: f64,
    /// Maximum ride time, the same for every request.
    pub max_ride: f64,
    pub depot: Site,
    /// `pickups[i]` and `drops[i]` form request `i`.
    pub pickups: Vec<Site>,
    pub drops: Vec<Site>,
}

/// Internal node ids: `[vehicle starts | pickups | drops | vehicle ends]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub vehicles: usize,
    pub requests: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Start(usize),
    Pickup(usize),
    Drop(usize),
    End(usize),
}

impl Layout {
    pub fn node_count(&self) -> usize {
        2 * self.vehicles + 2 * self.requests
    }

    pub fn start(&self, k: usize) -> Node {
        k
    }

    pub fn pickup(&self, i: usize) -> Node {
        self.vehicles + i
    }

    pub fn drop(&self, i: usize) -> Node {
        self.vehicles + self.requests + i
    }

    pub fn end(&self, k: usize) -> Node {
        self.vehicles + 2 * self.requests + k
    }

    /// Panics if `v` is out of range.
    pub fn kind(&self, v: Node) -> NodeKind {
        let (k, r) = (self.vehicles, self.requests);
        match v {
            _ if v < k => NodeKind::Start(v),
            _ if v < k + r => NodeKind::Pickup(v - k),
            _ if v < k + 2 * r => NodeKind::Drop(v - k - r),
            _ if v < 2 * k + 2 * r => NodeKind::End(v - k - 2 * r),
            _ => panic!("node {v} out of range"),
        }
    }

    pub fn is_depot(&self, v: Node) -> bool {
        matches!(self.kind(v), NodeKind::Start(_) | NodeKind::End(_))
    }
}

/// Instance data in scaled integer units, indexed by internal node.
#[derive(Debug, Clone)]
pub struct Scaled {
    pub d: DistanceMatrix,
    pub service: Vec<i64>,
    pub open: Vec<i64>,
    pub close: Vec<i64>,
    /// Entries changed by the metric closure.
    pub repaired: usize,
}

impl Instance {
    pub fn layout(&self) -> Layout {
        Layout { vehicles: self.vehicles, requests: self.pickups.len() }
    }

    pub fn request_count(&self) -> usize {
        self.pickups.len()
    }

    pub fn site(&self, v: Node) -> &Site {
        match self.layout().kind(v) {
            NodeKind::Start(_) | NodeKind::End(_) => &self.depot,
            NodeKind::Pickup(i) => &self.pickups[i],
            NodeKind::Drop(i) => &self.drops[i],
        }
    }

    /// Load of request `i` (the pickup row's load).
    pub fn load(&self, i: usize) -> i64 {
        self.pickups[i].load
    }

    /// Internal node for a file id; `None` for the depot and unknown ids.
    pub fn node_of_file_id(&self, id: i64) -> Option<Node> {
        let l = self.layout();
        if let Some(i) = self.pickups.iter().position(|s| s.file_id == id) {
            return Some(l.pickup(i));
        }
        self.drops.iter().position(|s| s.file_id == id).map(|i| l.drop(i))
    }

    /// Scaled distances (Euclidean, ×100, round half up) repaired into a
    /// metric, and scaled service times and windows.
    pub fn scaled(&self) -> Scaled {
        let l = self.layout();
        let n = l.node_count();
        let mut d = DistanceMatrix::from_fn(n, |i, j| {
            let (a, b) = (self.site(i), self.site(j));
            scale((a.x - b.x).hypot(a.y - b.y))
        });
        let repaired = d.metric_closure();
        if repaired > 0 {
            log::warn!("{}: rounding broke the triangle inequality, {repaired} distances shortened", self.name);
        }
        let col = |f: fn(&Site) -> f64| (0..n).map(|v| scale(f(self.site(v)))).collect::<Vec<_>>();
        Scaled {
            d,
            service: col(|s| s.service),
            open: col(|s| s.open),
            close: col(|s| s.close),
            repaired,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ParseError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ParseError::Io { path: path.display().to_string(), source })?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        parse(&name, &text)
    }
}

fn numbers(line: usize, text: &str) -> Result<Vec<f64>, ParseError> {
    text.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| syntax(line, format!("not a number: {t:?}"))))
        .collect()
}

fn integral(line: usize, x: f64, what: &str) -> Result<i64, ParseError> {
    if x.fract() != 0.0 || x < 0.0 {
        return Err(syntax(line, format!("{what} must be a non-negative integer, got {x}")));
    }
    Ok(x as i64)
}

pub fn parse(name: &str, text: &str) -> Result<Instance, ParseError> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = rows.next().ok_or_else(|| ParseError::Shape("empty instance".into()))?;
    let h = numbers(hline, header)?;
    if h.len() != 5 {
        return Err(syntax(hline, format!("header needs 5 fields (K N T Q L), got {}", h.len())));
    }
    let vehicles = integral(hline, h[0], "vehicle count")? as usize;
    let count = integral(hline, h[1], "node count")? as usize;
    let capacity = integral(hline, h[3], "capacity")?;
    if vehicles == 0 {
        return Err(syntax(hline, "at least one vehicle is needed"));
    }

    let mut sites = Vec::new();
    for (line, text) in rows {
        let f = numbers(line, text)?;
        if f.len() != 7 {
            return Err(syntax(line, format!("node row needs 7 fields, got {}", f.len())));
        }
        let site = Site {
            file_id: f[0] as i64,
            x: f[1],
            y: f[2],
            service: f[3],
            load: f[4] as i64,
            open: f[5],
            close: f[6],
        };
        if site.open > site.close {
            return Err(syntax(line, format!("empty time window [{}, {}]", site.open, site.close)));
        }
        if site.service < 0.0 {
            return Err(syntax(line, "negative service time"));
        }
        sites.push((line, site));
    }

    // N counts requests iff the file has room for 2N + 1 rows
    let requests = if sites.len() > 2 * count { count } else { count / 2 };
    if requests == 0 || (sites.len() <= 2 * count && !count.is_multiple_of(2)) {
        return Err(syntax(hline, format!("N = {count} does not match {} node rows", sites.len())));
    }
    let expected = 2 * requests + 1;
    if sites.len() != expected && sites.len() != expected + 1 {
        return Err(ParseError::Shape(format!(
            "expected {expected} node rows (or one more for the closing depot), found {}",
            sites.len()
        )));
    }
    let depot = sites[0].1.clone();
    let pickups: Vec<Site> = sites[1..=requests].iter().map(|(_, s)| s.clone()).collect();
    let drops: Vec<Site> = sites[requests + 1..expected].iter().map(|(_, s)| s.clone()).collect();
    for (i, (p, d)) in pickups.iter().zip(&drops).enumerate() {
        let line = sites[i + 1].0;
        if p.load <= 0 {
            return Err(syntax(line, format!("pickup load must be positive, got {}", p.load)));
        }
        if d.load != -p.load {
            return Err(syntax(sites[i + 1 + requests].0, format!("drop load {} does not cancel pickup load {}", d.load, p.load)));
        }
        if p.load > capacity {
            return Err(syntax(line, format!("load {} exceeds capacity {capacity}", p.load)));
        }
    }
    Ok(Instance {
        name: name.to_string(),
        vehicles,
        capacity,
        max_duration: h[2],
        max_ride: h[4],
        depot,
        pickups,
        drops,
    })
}

/// Writes `inst` in the node-counting convention with a trailing depot row.
pub fn to_text(inst: &Instance) -> String {
    use std::fmt::Write;
    let r = inst.request_count();
    let mut out = format!(
        "{} {} {} {} {}\n",
        inst.vehicles,
        2 * r,
        inst.max_duration,
        inst.capacity,
        inst.max_ride
    );
    let mut row = |s: &Site| {
        let _ = writeln!(
            out,
            "{} {:.3} {:.3} {} {} {:.3} {:.3}",
            s.file_id, s.x, s.y, s.service, s.load, s.open, s.close
        );
    };
    row(&inst.depot);
    inst.pickups.iter().for_each(&mut row);
    inst.drops.iter().for_each(&mut row);
    row(&Site { file_id: 2 * r as i64 + 1, ..inst.depot.clone() });
    out
}
