use std::rc::Rc;

use super::DistanceMatrix;
use crate::engine::{CpResult, IntVar, Propagator, SeqVar, Store, VarEvent};
use crate::seqvar::Node;

/// `dist` equals the summed travel cost between consecutive visits.
pub struct Distance {
    seq: SeqVar,
    d: Rc<DistanceMatrix>,
    dist: IntVar,
    nodes: Vec<Node>,
    preds: Vec<Node>,
}

impl Distance {
    pub fn new(seq: SeqVar, d: Rc<DistanceMatrix>, dist: IntVar) -> Self {
        Distance { seq, d, dist, nodes: Vec::new(), preds: Vec::new() }
    }
}

/// Length of the partial sequence of `seq`.
pub(crate) fn partial_length(store: &Store, seq: SeqVar, d: &DistanceMatrix) -> i64 {
    let (dom, tr) = store.seq(seq);
    let mut len = 0;
    let mut v = dom.alpha();
    while v != dom.omega() {
        let w = dom.next(tr, v);
        len += d.get(v, w);
        v = w;
    }
    len
}

impl Propagator for Distance {
    fn propagate(&mut self, store: &mut Store) -> CpResult<()> {
        let length = partial_length(store, self.seq, &self.d);
        let (dom, tr) = store.seq(self.seq);
        if dom.is_fixed(tr) {
            return store.assign(self.dist, length);
        }
        store.set_min(self.dist, length)?;
        let max_detour = store.max(self.dist) - length;
        let (dom, tr) = store.seq(self.seq);
        self.nodes.clear();
        self.nodes.extend_from_slice(dom.insertable(tr));
        for &j in &self.nodes {
            let (dom, tr) = store.seq(self.seq);
            self.preds.clear();
            self.preds.extend(dom.inserts(tr, j));
            for &i in &self.preds {
                let (dom, tr) = store.seq(self.seq);
                if !dom.can_insert(tr, i, j) {
                    continue;
                }
                let k = dom.next(tr, i);
                let cost = self.d.get(i, j) + self.d.get(j, k) - self.d.get(i, k);
                if cost > max_detour {
                    store.not_between(self.seq, i, j, k)?;
                }
            }
        }
        Ok(())
    }

    fn subscriptions(&self) -> Vec<VarEvent> {
        vec![VarEvent::Seq(self.seq), VarEvent::Int(self.dist)]
    }

    fn name(&self) -> &str {
        "Distance"
    }
}
