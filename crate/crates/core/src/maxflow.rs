//! Edmonds-Karp max-flow on real-valued capacities.

use std::collections::VecDeque;

/// Residual capacities below this are treated as saturated.
pub(crate) const SLACK: f64 = 1e-12;

pub(crate) struct FlowGraph {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    residual: Vec<f64>,
}

impl FlowGraph {
    pub(crate) fn new(n: usize) -> Self {
        FlowGraph { head: vec![Vec::new(); n], to: Vec::new(), residual: Vec::new() }
    }

    /// Adds arc `u -> v` with capacity `cap` and its reverse with capacity `rev_cap`.
    pub(crate) fn add_arc(&mut self, u: usize, v: usize, cap: f64, rev_cap: f64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.residual.push(cap);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.residual.push(rev_cap);
    }

    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let n = self.head.len();
        let mut total = 0.0;
        loop {
            let mut parent_arc = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &a in &self.head[u] {
                    let v = self.to[a];
                    if !seen[v] && self.residual[a] > SLACK {
                        seen[v] = true;
                        parent_arc[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while v != s {
                let a = parent_arc[v];
                push = push.min(self.residual[a]);
                v = self.to[a ^ 1];
            }
            let mut v = t;
            while v != s {
                let a = parent_arc[v];
                self.residual[a] -= push;
                self.residual[a ^ 1] += push;
                v = self.to[a ^ 1];
            }
            total += push;
        }
    }

    /// Nodes reachable from `s` in the residual graph.
    pub(crate) fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &a in &self.head[u] {
                let v = self.to[a];
                if !seen[v] && self.residual[a] > SLACK {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}
