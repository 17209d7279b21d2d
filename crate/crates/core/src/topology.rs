//! Butterfly-block grids.
//!
//! An `nx × ny` grid has `nx + 1` columns of side nodes. Layer 0 holds the
//! senders, layer `ny` the receivers and the layers in between hold
//! intermediate nodes. Block `j` of layer `k` sits between columns `j` and
//! `j + 1`:
//!
//! ```text
//!   (j,k) ---------------------- (j+1,k)
//!     |  \                      /   |
//!     |   in_left   T   in_right    |
//!   side            |             side
//!     |         bottleneck          |
//!     |   out_left  U   out_right   |
//!     |  /                      \   |
//!   (j,k+1) -------------------- (j+1,k+1)
//! ```
//!
//! The horizontal lines are not edges; they only mark the layers. Adjacent
//! blocks in a layer share the side edge of their common column.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::channel::ChannelModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum NodeRole {
    Sender,
    Intermediate,
    RelayTop,
    RelayBottom,
    Receiver,
}

/// A node of a grid. Side nodes are addressed by `(column, layer)`, relays
/// by `(block column, block layer)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId {
    pub role: NodeRole,
    pub column: usize,
    pub row: usize,
}

impl NodeId {
    pub fn sender(column: usize) -> Self {
        NodeId { role: NodeRole::Sender, column, row: 0 }
    }

    pub fn receiver(column: usize, ny: usize) -> Self {
        NodeId { role: NodeRole::Receiver, column, row: ny }
    }

    pub fn relay_top(block: usize, layer: usize) -> Self {
        NodeId { role: NodeRole::RelayTop, column: block, row: layer }
    }

    pub fn relay_bottom(block: usize, layer: usize) -> Self {
        NodeId { role: NodeRole::RelayBottom, column: block, row: layer }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.column + 1;
        match self.role {
            NodeRole::Sender => write!(f, "A{c}"),
            NodeRole::Receiver => write!(f, "B{c}"),
            NodeRole::Intermediate => write!(f, "I{c}_{}", self.row),
            NodeRole::RelayTop => write!(f, "T{c}_{}", self.row + 1),
            NodeRole::RelayBottom => write!(f, "U{c}_{}", self.row + 1),
        }
    }
}

/// Undirected edge with `a < b` in the canonical node order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub channel: ChannelModel,
}

/// Edge indices of one butterfly block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockEdges {
    pub in_left: usize,
    pub in_right: usize,
    pub bottleneck: usize,
    pub out_left: usize,
    pub out_right: usize,
}

#[derive(Debug, Clone)]
pub struct Network {
    nx: usize,
    ny: usize,
    nodes: Vec<NodeId>,
    edges: Vec<Edge>,
    senders: Vec<NodeId>,
    receivers: Vec<NodeId>,
    node_index: HashMap<NodeId, usize>,
    /// `side[k][c]`: edge from column `c` at layer `k` to layer `k + 1`.
    side: Vec<Vec<usize>>,
    /// `blocks[k][j]`.
    blocks: Vec<Vec<BlockEdges>>,
}

impl Network {
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Number of receivers, `nx + 1`.
    pub fn r(&self) -> usize {
        self.receivers.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Edges in canonical order (sorted by endpoint ids).
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn senders(&self) -> &[NodeId] {
        &self.senders
    }

    pub fn receivers(&self) -> &[NodeId] {
        &self.receivers
    }

    pub fn node_index(&self, id: &NodeId) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn side_edge(&self, layer: usize, column: usize) -> usize {
        self.side[layer][column]
    }

    pub fn block(&self, layer: usize, block: usize) -> BlockEdges {
        self.blocks[layer][block]
    }

    pub fn edge_between(&self, x: NodeId, y: NodeId) -> Option<usize> {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        self.edges.iter().position(|e| e.a == a && e.b == b)
    }

    /// Copy of this network with edge channels reassigned by `f(index, edge)`.
    pub fn relabel(&self, f: impl Fn(usize, &Edge) -> ChannelModel) -> Network {
        let mut out = self.clone();
        for (i, e) in out.edges.iter_mut().enumerate() {
            e.channel = f(i, &self.edges[i]);
        }
        out
    }

    /// Copy of this network with every edge set to `ch`.
    pub fn with_channel(&self, ch: ChannelModel) -> Network {
        self.relabel(|_, _| ch)
    }

    /// One line per edge: `nodeA nodeB kind param`.
    pub fn to_adjacency_listing(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            out.push_str(&format!("{} {} {} {}\n", e.a, e.b, e.channel.kind_name(), e.channel.param()));
        }
        out
    }

    /// Node adjacency as `(neighbour, edge index)` lists, by node index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            let a = self.node_index[&e.a];
            let b = self.node_index[&e.b];
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        adj
    }
}

fn column_node(column: usize, layer: usize, ny: usize) -> NodeId {
    if layer == 0 {
        NodeId::sender(column)
    } else if layer == ny {
        NodeId::receiver(column, ny)
    } else {
        NodeId { role: NodeRole::Intermediate, column, row: layer }
    }
}

/// Builds the `nx × ny` butterfly grid with every edge carrying `ch`.
pub fn build_grid(nx: usize, ny: usize, ch: ChannelModel) -> Result<Network> {
    if nx < 1 || ny < 1 {
        return Err(Error::Config(format!("grid dimensions must be >= 1, got {nx}x{ny}")));
    }
    let mut nodes = Vec::new();
    for k in 0..=ny {
        for c in 0..=nx {
            nodes.push(column_node(c, k, ny));
        }
    }
    for k in 0..ny {
        for j in 0..nx {
            nodes.push(NodeId::relay_top(j, k));
            nodes.push(NodeId::relay_bottom(j, k));
        }
    }
    nodes.sort();

    let mut raw: Vec<(NodeId, NodeId)> = Vec::new();
    for k in 0..ny {
        for c in 0..=nx {
            raw.push((column_node(c, k, ny), column_node(c, k + 1, ny)));
        }
        for j in 0..nx {
            let t = NodeId::relay_top(j, k);
            let u = NodeId::relay_bottom(j, k);
            raw.push((column_node(j, k, ny), t));
            raw.push((column_node(j + 1, k, ny), t));
            raw.push((t, u));
            raw.push((u, column_node(j, k + 1, ny)));
            raw.push((u, column_node(j + 1, k + 1, ny)));
        }
    }
    let mut edges: Vec<Edge> = raw
        .into_iter()
        .map(|(x, y)| {
            let (a, b) = if x < y { (x, y) } else { (y, x) };
            Edge { a, b, channel: ch }
        })
        .collect();
    edges.sort_by_key(|e| (e.a, e.b));

    let node_index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let edge_index: HashMap<(NodeId, NodeId), usize> = edges.iter().enumerate().map(|(i, e)| ((e.a, e.b), i)).collect();
    let find = |x: NodeId, y: NodeId| {
        let key = if x < y { (x, y) } else { (y, x) };
        edge_index[&key]
    };

    let side =
        (0..ny).map(|k| (0..=nx).map(|c| find(column_node(c, k, ny), column_node(c, k + 1, ny))).collect()).collect();
    let blocks = (0..ny)
        .map(|k| {
            (0..nx)
                .map(|j| {
                    let t = NodeId::relay_top(j, k);
                    let u = NodeId::relay_bottom(j, k);
                    BlockEdges {
                        in_left: find(column_node(j, k, ny), t),
                        in_right: find(column_node(j + 1, k, ny), t),
                        bottleneck: find(t, u),
                        out_left: find(u, column_node(j, k + 1, ny)),
                        out_right: find(u, column_node(j + 1, k + 1, ny)),
                    }
                })
                .collect()
        })
        .collect();

    Ok(Network {
        nx,
        ny,
        senders: (0..=nx).map(NodeId::sender).collect(),
        receivers: (0..=nx).map(|c| NodeId::receiver(c, ny)).collect(),
        nodes,
        edges,
        node_index,
        side,
        blocks,
    })
}

/// Bipartition of the nodes of a network; `side_a[i]` refers to node index `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cut {
    pub side_a: Vec<bool>,
}

impl Cut {
    /// Cut whose side A is exactly `members`.
    pub fn from_side_a(net: &Network, members: &[NodeId]) -> Result<Cut> {
        let mut side_a = vec![false; net.nodes().len()];
        for m in members {
            let i = net.node_index(m).ok_or_else(|| Error::InvalidCut(format!("{m} is not a node of the network")))?;
            side_a[i] = true;
        }
        let cut = Cut { side_a };
        cut.validate(net)?;
        Ok(cut)
    }

    pub fn validate(&self, net: &Network) -> Result<()> {
        if self.side_a.len() != net.nodes().len() {
            return Err(Error::InvalidCut(format!(
                "partition covers {} nodes, network has {}",
                self.side_a.len(),
                net.nodes().len()
            )));
        }
        for s in net.senders() {
            if !self.side_a[net.node_index(s).unwrap()] {
                return Err(Error::InvalidCut(format!("sender {s} is on the receiver side")));
            }
        }
        for r in net.receivers() {
            if self.side_a[net.node_index(r).unwrap()] {
                return Err(Error::InvalidCut(format!("receiver {r} is on the sender side")));
            }
        }
        Ok(())
    }

    /// Indices of the edges with endpoints on opposite sides.
    pub fn cut_set(&self, net: &Network) -> Vec<usize> {
        net.edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                let a = net.node_index(&e.a).unwrap();
                let b = net.node_index(&e.b).unwrap();
                self.side_a[a] != self.side_a[b]
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Multi-edge REE flow through a cut: the sum of edge REE over the cut-set.
pub fn cut_value(net: &Network, cut: &Cut) -> Result<f64> {
    cut.validate(net)?;
    Ok(cut.cut_set(net).into_iter().map(|i| net.edges()[i].channel.ree()).sum())
}
