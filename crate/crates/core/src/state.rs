//! Reversible state: a trail of undo entries and the structures built on it.
//!
//! Every reversible location lives in the [`Trail`]'s value array and is
//! addressed through a [`RevInt`] handle. Structures such as
//! [`RevSparseSet`] and [`TriPartition`] keep their permutation arrays
//! outside the trail: only their size markers are reversible, so restoring
//! them is a constant-time rollback of those markers.

/// Handle to a reversible integer stored in a [`Trail`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RevInt(u32);

/// Checkpoint returned by [`Trail::save_level`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(usize);

impl Level {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Undo log with first-write-wins trailing per level.
#[derive(Debug, Clone, Default)]
pub struct Trail {
    values: Vec<i64>,
    stamps: Vec<u64>,
    undo: Vec<(u32, i64)>,
    marks: Vec<usize>,
    magic: u64,
}

impl Trail {
    pub fn new() -> Self {
        Self::default()
    }

    /// Allocates a new reversible integer. Allocation itself is permanent.
    pub fn new_int(&mut self, value: i64) -> RevInt {
        let id = self.values.len() as u32;
        self.values.push(value);
        self.stamps.push(self.magic);
        RevInt(id)
    }

    #[inline]
    pub fn get(&self, r: RevInt) -> i64 {
        self.values[r.0 as usize]
    }

    #[inline]
    pub fn set(&mut self, r: RevInt, value: i64) {
        let i = r.0 as usize;
        if self.values[i] == value {
            return;
        }
        // nothing to undo at the root
        if !self.marks.is_empty() && self.stamps[i] != self.magic {
            self.stamps[i] = self.magic;
            self.undo.push((r.0, self.values[i]));
        }
        self.values[i] = value;
    }

    #[inline]
    pub fn incr(&mut self, r: RevInt) -> i64 {
        let v = self.get(r) + 1;
        self.set(r, v);
        v
    }

    #[inline]
    pub fn decr(&mut self, r: RevInt) -> i64 {
        let v = self.get(r) - 1;
        self.set(r, v);
        v
    }

    /// Opens a new checkpoint. The first call on a fresh trail returns level 0.
    pub fn save_level(&mut self) -> Level {
        let level = Level(self.marks.len());
        self.marks.push(self.undo.len());
        self.magic += 1;
        level
    }

    /// Rolls every trailed location back to its value when `level` was
    /// saved, discarding `level` and all deeper checkpoints.
    ///
    /// Panics if `level` is not an open checkpoint.
    pub fn restore_level(&mut self, level: Level) {
        assert!(
            level.0 < self.marks.len(),
            "restore of unknown or closed level {} (depth {})",
            level.0,
            self.marks.len()
        );
        let target = self.marks[level.0];
        while self.undo.len() > target {
            let (loc, old) = self.undo.pop().unwrap();
            self.values[loc as usize] = old;
        }
        self.marks.truncate(level.0);
        self.magic += 1;
    }

    /// Number of open checkpoints.
    pub fn depth(&self) -> usize {
        self.marks.len()
    }

    /// Number of undo entries currently recorded.
    pub fn undo_len(&self) -> usize {
        self.undo.len()
    }
}

/// Sparse set over `0..n` supporting constant-time removal and restoration.
///
/// `dense[..size]` holds the members; `position` is the inverse of `dense`.
#[derive(Debug, Clone)]
pub struct RevSparseSet {
    dense: Vec<usize>,
    position: Vec<usize>,
    size: RevInt,
}

impl RevSparseSet {
    /// Creates the full set `{0, .., n-1}`.
    pub fn full(trail: &mut Trail, n: usize) -> Self {
        RevSparseSet {
            dense: (0..n).collect(),
            position: (0..n).collect(),
            size: trail.new_int(n as i64),
        }
    }

    #[inline]
    pub fn len(&self, trail: &Trail) -> usize {
        trail.get(self.size) as usize
    }

    #[inline]
    pub fn is_empty(&self, trail: &Trail) -> bool {
        self.len(trail) == 0
    }

    #[inline]
    pub fn contains(&self, trail: &Trail, v: usize) -> bool {
        v < self.position.len() && self.position[v] < self.len(trail)
    }

    /// Current members, in no particular order.
    #[inline]
    pub fn as_slice<'a>(&'a self, trail: &Trail) -> &'a [usize] {
        &self.dense[..self.len(trail)]
    }

    /// Removes `v`; returns whether it was present.
    pub fn remove(&mut self, trail: &mut Trail, v: usize) -> bool {
        if !self.contains(trail, v) {
            return false;
        }
        let size = self.len(trail);
        let last = self.dense[size - 1];
        let i = self.position[v];
        self.dense.swap(i, size - 1);
        self.position[last] = i;
        self.position[v] = size - 1;
        trail.set(self.size, (size - 1) as i64);
        true
    }

    /// Removes every member.
    pub fn clear(&mut self, trail: &mut Trail) {
        trail.set(self.size, 0);
    }
}

/// Status of an element of a [`TriPartition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Required,
    Possible,
    Excluded,
}

/// Partition of `0..n` into required, possible and excluded elements.
///
/// The dense array is laid out as `[R | P | X]`; two reversible markers
/// hold `|R|` and `|X|`. Elements only ever leave `P`, except on restore.
#[derive(Debug, Clone)]
pub struct TriPartition {
    dense: Vec<usize>,
    position: Vec<usize>,
    n_required: RevInt,
    n_excluded: RevInt,
}

impl TriPartition {
    /// All elements start possible.
    pub fn new(trail: &mut Trail, n: usize) -> Self {
        TriPartition {
            dense: (0..n).collect(),
            position: (0..n).collect(),
            n_required: trail.new_int(0),
            n_excluded: trail.new_int(0),
        }
    }

    pub fn status(&self, trail: &Trail, v: usize) -> Status {
        let p = self.position[v];
        if p < trail.get(self.n_required) as usize {
            Status::Required
        } else if p >= self.dense.len() - trail.get(self.n_excluded) as usize {
            Status::Excluded
        } else {
            Status::Possible
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        let (va, vb) = (self.dense[a], self.dense[b]);
        self.dense.swap(a, b);
        self.position[va] = b;
        self.position[vb] = a;
    }

    /// Moves a possible element to the required class. Returns `false` (and
    /// does nothing) if `v` is not possible.
    pub fn require(&mut self, trail: &mut Trail, v: usize) -> bool {
        if self.status(trail, v) != Status::Possible {
            return false;
        }
        let r = trail.get(self.n_required) as usize;
        self.swap(self.position[v], r);
        trail.set(self.n_required, (r + 1) as i64);
        true
    }

    /// Moves a possible element to the excluded class. Returns `false` (and
    /// does nothing) if `v` is not possible.
    pub fn exclude(&mut self, trail: &mut Trail, v: usize) -> bool {
        if self.status(trail, v) != Status::Possible {
            return false;
        }
        let x = trail.get(self.n_excluded) as usize;
        let slot = self.dense.len() - 1 - x;
        self.swap(self.position[v], slot);
        trail.set(self.n_excluded, (x + 1) as i64);
        true
    }

    pub fn required<'a>(&'a self, trail: &Trail) -> &'a [usize] {
        &self.dense[..trail.get(self.n_required) as usize]
    }

    pub fn possible<'a>(&'a self, trail: &Trail) -> &'a [usize] {
        let r = trail.get(self.n_required) as usize;
        let x = trail.get(self.n_excluded) as usize;
        &self.dense[r..self.dense.len() - x]
    }

    pub fn excluded<'a>(&'a self, trail: &Trail) -> &'a [usize] {
        let x = trail.get(self.n_excluded) as usize;
        &self.dense[self.dense.len() - x..]
    }
}
