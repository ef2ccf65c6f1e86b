//! Propagators over sequence and integer variables.

mod arith;
mod cumulative;
mod distance;
mod precedence;
mod transition_times;

pub use arith::{LeqOffset, Sum, VisitEqual, VisitSum};
pub use cumulative::{Activity, Cumulative, LoadProfile};
pub use distance::Distance;
pub use precedence::Precedence;
pub use transition_times::TransitionTimes;

/// Square matrix of non-negative integer travel costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<i64>,
}

impl DistanceMatrix {
    /// Panics if `rows` is not square or holds a negative entry.
    pub fn new(rows: Vec<Vec<i64>>) -> Self {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "distance matrix must be square");
            assert!(row.iter().all(|&x| x >= 0), "distances must be non-negative");
            d.extend(row);
        }
        DistanceMatrix { n, d }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        Self::new((0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.d[i * self.n + j]
    }

    /// First triple `(i, j, k)` with `d[i][k] > d[i][j] + d[j][k]`.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.get(i, k) > self.get(i, j) + self.get(j, k) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// Replaces every entry by the shortest-path distance (Floyd-Warshall).
    /// Returns the number of entries that changed.
    pub fn metric_closure(&mut self) -> usize {
        let n = self.n;
        let mut changed = 0;
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    let via = self.d[i * n + j] + self.d[j * n + k];
                    if via < self.d[i * n + k] {
                        self.d[i * n + k] = via;
                        changed += 1;
                    }
                }
            }
        }
        changed
    }
}
