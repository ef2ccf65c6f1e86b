use std::rc::Rc;

use super::DistanceMatrix;
use crate::engine::{CpResult, IntVar, Propagator, SeqVar, Store, VarEvent};
use crate::seqvar::Node;

/// For every pair `i ≺ j` in the sequence:
/// `start[i] + service[i] + d[i][j] ≤ start[j]`.
///
/// `start` and `service` are indexed by node. The start of a node that is
/// not visited is left unconstrained.
pub struct TransitionTimes {
    seq: SeqVar,
    start: Vec<IntVar>,
    service: Rc<Vec<i64>>,
    d: Rc<DistanceMatrix>,
    members: Vec<Node>,
    nodes: Vec<Node>,
    preds: Vec<Node>,
}

impl TransitionTimes {
    pub fn new(seq: SeqVar, start: Vec<IntVar>, service: Rc<Vec<i64>>, d: Rc<DistanceMatrix>) -> Self {
        assert_eq!(start.len(), service.len());
        assert_eq!(start.len(), d.len());
        TransitionTimes {
            seq,
            start,
            service,
            d,
            members: Vec::new(),
            nodes: Vec::new(),
            preds: Vec::new(),
        }
    }

    fn bound_members(&mut self, store: &mut Store) -> CpResult<()> {
        let (dom, tr) = store.seq(self.seq);
        dom.members_into(tr, &mut self.members);
        for w in self.members.windows(2) {
            let (i, j) = (w[0], w[1]);
            let ea = store.min(self.start[i]) + self.service[i] + self.d.get(i, j);
            store.set_min(self.start[j], ea)?;
        }
        for w in self.members.windows(2).rev() {
            let (i, j) = (w[0], w[1]);
            let la = store.max(self.start[j]) - self.service[i] - self.d.get(i, j);
            store.set_max(self.start[i], la)?;
        }
        Ok(())
    }

    /// Earliest and latest start of `j` if inserted right after member `i`.
    fn window(&self, store: &Store, i: Node, j: Node, k: Node) -> (i64, i64) {
        let ea = store.min(self.start[i]) + self.service[i] + self.d.get(i, j);
        let la = store.max(self.start[k]) - self.service[j] - self.d.get(j, k);
        (ea, la)
    }
}

impl Propagator for TransitionTimes {
    fn propagate(&mut self, store: &mut Store) -> CpResult<()> {
        self.bound_members(store)?;
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
                let (ea, la) = self.window(store, i, j, k);
                let sj = self.start[j];
                if ea > store.max(sj) || la < store.min(sj) || ea > la {
                    store.not_between(self.seq, i, j, k)?;
                }
            }
        }
        // auto-insertions above may have extended the sequence
        self.bound_members(store)?;
        for idx in 0..self.nodes.len() {
            let j = self.nodes[idx];
            let (dom, tr) = store.seq(self.seq);
            if !(dom.is_required(tr, j) && dom.is_insertable(tr, j)) {
                continue;
            }
            let mut earliest = i64::MAX;
            let mut latest = i64::MIN;
            for i in dom.inserts(tr, j) {
                let k = dom.next(tr, i);
                let (ea, la) = self.window(store, i, j, k);
                earliest = earliest.min(ea);
                latest = latest.max(la);
            }
            store.set_min(self.start[j], earliest)?;
            store.set_max(self.start[j], latest)?;
        }
        Ok(())
    }

    fn subscriptions(&self) -> Vec<VarEvent> {
        let mut subs = vec![VarEvent::Seq(self.seq)];
        subs.extend(self.start.iter().map(|&x| VarEvent::Int(x)));
        subs
    }

    fn name(&self) -> &str {
        "TransitionTimes"
    }
}
