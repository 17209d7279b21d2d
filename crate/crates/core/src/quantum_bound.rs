//! Upper bounds on quantum communication rates through a network.
//!
//! The multipath bound minimises the summed edge REE over every cut that
//! separates all senders from all receivers. It is computed as a max-flow
//! between a super-source joined to the senders and a super-sink joined to
//! the receivers, with each undirected edge carrying its REE both ways.

use serde::Serialize;

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::maxflow::FlowGraph;
use crate::topology::{Cut, Network, NodeId, NodeRole};

#[derive(Debug, Clone, Serialize)]
pub struct QuantumBoundResult {
    /// Minimum cut value in qubits per network use.
    pub total_flow: f64,
    /// `total_flow / r`.
    pub per_receiver: f64,
    pub witness_cut: Cut,
}

pub fn multipath_bound(net: &Network) -> QuantumBoundResult {
    let n = net.nodes().len();
    let (source, sink) = (n, n + 1);
    let mut g = FlowGraph::new(n + 2);
    let unbounded = 1.0 + net.edges().iter().map(|e| e.channel.ree()).sum::<f64>();
    for e in net.edges() {
        let w = e.channel.ree();
        g.add_arc(net.node_index(&e.a).unwrap(), net.node_index(&e.b).unwrap(), w, w);
    }
    for s in net.senders() {
        g.add_arc(source, net.node_index(s).unwrap(), unbounded, 0.0);
    }
    for r in net.receivers() {
        g.add_arc(net.node_index(r).unwrap(), sink, unbounded, 0.0);
    }
    let total_flow = g.max_flow(source, sink);
    let mut side_a = g.source_side(source);
    side_a.truncate(n);
    QuantumBoundResult { total_flow, per_receiver: total_flow / net.r() as f64, witness_cut: Cut { side_a } }
}

/// `(2r - 1)/r · REE` with `r = nx + 1`; the middle cut of every row.
pub fn closed_form_bound(nx: usize, ny: usize, ch: ChannelModel) -> Result<f64> {
    if nx < 1 || ny < 1 {
        return Err(Error::Config(format!("grid dimensions must be >= 1, got {nx}x{ny}")));
    }
    let r = (nx + 1) as f64;
    Ok((2.0 * r - 1.0) / r * ch.ree())
}

/// Large-`nx` limit of [`closed_form_bound`]: `2 · REE`.
pub fn asymptotic_bound(ch: ChannelModel) -> f64 {
    2.0 * ch.ree()
}

/// Single-path bound between one sender and one receiver: the minimum over
/// cuts `a | b` of the largest edge REE in the cut-set. This equals the
/// widest-path (maximum bottleneck) value, found here by adding edges in
/// decreasing REE order until `a` and `b` join.
pub fn singlepath_bound(net: &Network, a: NodeId, b: NodeId) -> Result<f64> {
    if a.role != NodeRole::Sender {
        return Err(Error::Config(format!("{a} is not a sender")));
    }
    if b.role != NodeRole::Receiver {
        return Err(Error::Config(format!("{b} is not a receiver")));
    }
    let ia = net.node_index(&a).ok_or_else(|| Error::Config(format!("{a} not in network")))?;
    let ib = net.node_index(&b).ok_or_else(|| Error::Config(format!("{b} not in network")))?;

    let mut order: Vec<usize> = (0..net.edges().len()).collect();
    order.sort_by(|&x, &y| net.edges()[y].channel.ree().total_cmp(&net.edges()[x].channel.ree()));
    let mut parent: Vec<usize> = (0..net.nodes().len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in order {
        let e = &net.edges()[i];
        let (u, v) = (net.node_index(&e.a).unwrap(), net.node_index(&e.b).unwrap());
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        parent[ru] = rv;
        if find(&mut parent, ia) == find(&mut parent, ib) {
            return Ok(e.channel.ree());
        }
    }
    Ok(0.0)
}
