use crate::engine::{CpResult, Inconsistency, Propagator, SeqVar, Store, VarEvent};
use crate::seqvar::Node;

/// Nodes of `order` that are visited appear in that order.
pub struct Precedence {
    seq: SeqVar,
    order: Vec<Node>,
    rank: Vec<Option<usize>>,
    queue: Vec<Node>,
}

impl Precedence {
    /// Panics if `order` repeats a node.
    pub fn new(seq: SeqVar, order: Vec<Node>, n: usize) -> Self {
        let mut rank = vec![None; n];
        for (r, &v) in order.iter().enumerate() {
            assert!(rank[v].is_none(), "node {v} repeated in precedence order");
            rank[v] = Some(r);
        }
        Precedence { seq, order, rank, queue: Vec::new() }
    }
}

impl Propagator for Precedence {
    fn propagate(&mut self, store: &mut Store) -> CpResult<()> {
        let (dom, tr) = store.seq(self.seq);
        let mut last: Option<usize> = None;
        let mut v = dom.alpha();
        loop {
            if let Some(r) = self.rank[v] {
                if last.is_some_and(|l| l > r) {
                    return Err(Inconsistency);
                }
                last = Some(r);
            }
            if v == dom.omega() {
                break;
            }
            v = dom.next(tr, v);
        }
        let alpha = dom.alpha();
        let omega = dom.omega();
        self.queue.clear();
        let mut vi = alpha;
        for idx in 0..=self.order.len() {
            let vk = self.order.get(idx).copied().unwrap_or(omega);
            let (dom, tr) = store.seq(self.seq);
            if dom.is_insertable(tr, vk) {
                self.queue.push(vk);
            } else if dom.is_member(tr, vk) {
                for q in 0..self.queue.len() {
                    let vj = self.queue[q];
                    store.not_between(self.seq, alpha, vj, vi)?;
                    store.not_between(self.seq, vk, vj, omega)?;
                }
                self.queue.clear();
                vi = vk;
            }
        }
        Ok(())
    }

    fn subscriptions(&self) -> Vec<VarEvent> {
        self.order.iter().map(|&v| VarEvent::SeqNode(self.seq, v)).collect()
    }

    fn name(&self) -> &str {
        "Precedence"
    }
}
