use crate::engine::{BoolVisitView, CpResult, Inconsistency, IntVar, Propagator, Store, VarEvent};

/// `total = Σ terms`, bounds reasoning.
pub struct Sum {
    terms: Vec<IntVar>,
    total: IntVar,
}

impl Sum {
    pub fn new(terms: Vec<IntVar>, total: IntVar) -> Self {
        Sum { terms, total }
    }
}

impl Propagator for Sum {
    fn propagate(&mut self, s: &mut Store) -> CpResult<()> {
        let lo: i64 = self.terms.iter().map(|&x| s.min(x)).sum();
        let hi: i64 = self.terms.iter().map(|&x| s.max(x)).sum();
        s.set_min(self.total, lo)?;
        s.set_max(self.total, hi)?;
        let (tlo, thi) = (s.min(self.total), s.max(self.total));
        for &x in &self.terms {
            let (xlo, xhi) = (s.min(x), s.max(x));
            s.set_min(x, tlo - (hi - xhi))?;
            s.set_max(x, thi - (lo - xlo))?;
        }
        Ok(())
    }

    fn subscriptions(&self) -> Vec<VarEvent> {
        let mut v: Vec<VarEvent> = self.terms.iter().map(|&x| VarEvent::Int(x)).collect();
        v.push(VarEvent::Int(self.total));
        v
    }

    fn name(&self) -> &str {
        "Sum"
    }
}

/// `x ≤ y + offset`.
pub struct LeqOffset {
    x: IntVar,
    y: IntVar,
    offset: i64,
}

impl LeqOffset {
    pub fn new(x: IntVar, y: IntVar, offset: i64) -> Self {
        LeqOffset { x, y, offset }
    }
}

impl Propagator for LeqOffset {
    fn propagate(&mut self, s: &mut Store) -> CpResult<()> {
        s.set_max(self.x, s.max(self.y) + self.offset)?;
        s.set_min(self.y, s.min(self.x) - self.offset)
    }

    fn subscriptions(&self) -> Vec<VarEvent> {
        vec![VarEvent::Int(self.x), VarEvent::Int(self.y)]
    }

    fn name(&self) -> &str {
        "LeqOffset"
    }
}

/// Number of visit views assigned true lies in `lo..=hi`.
pub struct VisitSum {
    views: Vec<BoolVisitView>,
    lo: usize,
    hi: usize,
}

impl VisitSum {
    pub fn new(views: Vec<BoolVisitView>, lo: usize, hi: usize) -> Self {
        VisitSum { views, lo, hi }
    }
}

impl Propagator for VisitSum {
    fn propagate(&mut self, s: &mut Store) -> CpResult<()> {
        let ones = self.views.iter().filter(|&&b| !s.view_can_be_false(b)).count();
        let open = self.views.iter().filter(|&&b| !s.view_is_fixed(b)).count();
        if ones > self.hi || ones + open < self.lo {
            return Err(Inconsistency);
        }
        if ones == self.hi && open > 0 {
            for &b in &self.views {
                if !s.view_is_fixed(b) {
                    s.view_assign(b, false)?;
                }
            }
        } else if ones + open == self.lo && open > 0 {
            for &b in &self.views {
                if !s.view_is_fixed(b) {
                    s.view_assign(b, true)?;
                }
            }
        }
        Ok(())
    }

    fn subscriptions(&self) -> Vec<VarEvent> {
        self.views.iter().map(|b| VarEvent::SeqNode(b.seq, b.node)).collect()
    }

    fn name(&self) -> &str {
        "VisitSum"
    }
}

/// Two visit views take the same value.
pub struct VisitEqual {
    a: BoolVisitView,
    b: BoolVisitView,
}

impl VisitEqual {
    pub fn new(a: BoolVisitView, b: BoolVisitView) -> Self {
        VisitEqual { a, b }
    }
}

impl Propagator for VisitEqual {
    fn propagate(&mut self, s: &mut Store) -> CpResult<()> {
        for (x, y) in [(self.a, self.b), (self.b, self.a)] {
            if !s.view_can_be_false(x) {
                s.view_assign(y, true)?;
            }
            if !s.view_can_be_true(x) {
                s.view_assign(y, false)?;
            }
        }
        Ok(())
    }

    fn subscriptions(&self) -> Vec<VarEvent> {
        vec![
            VarEvent::SeqNode(self.a.seq, self.a.node),
            VarEvent::SeqNode(self.b.seq, self.b.node),
        ]
    }

    fn name(&self) -> &str {
        "VisitEqual"
    }
}
