//! Chimera-style hardware topology.
//!
//! Node numbering: the qubit at cell `(row, col)`, side `side` (0 or 1),
//! position `k` within the side has id
//! `((row * cols + col) * 2 + side) * shore + k`.
//!
//! Inside a cell every side-0 qubit couples to every side-1 qubit. Between
//! cells, horizontal neighbours `(r, c)`-`(r, c+1)` couple side-1 qubits with
//! matching `k`, and vertical neighbours `(r, c)`-`(r+1, c)` couple side-0
//! qubits with matching `k`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::model::IsingModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellPosition {
    pub row: usize,
    pub col: usize,
    pub side: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardwareGraph {
    rows: usize,
    cols: usize,
    shore: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl HardwareGraph {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shore(&self) -> usize {
        self.shore
    }

    pub fn num_nodes(&self) -> usize {
        self.rows * self.cols * 2 * self.shore
    }

    /// Edges as `(i, j)` with `i < j`.
    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges.contains(&key)
    }

    pub fn node_id(&self, p: CellPosition) -> usize {
        ((p.row * self.cols + p.col) * 2 + p.side) * self.shore + p.index
    }

    pub fn cell_of(&self, node: usize) -> Option<CellPosition> {
        if node >= self.num_nodes() {
            return None;
        }
        let index = node % self.shore;
        let rest = node / self.shore;
        let side = rest % 2;
        let cell = rest / 2;
        Some(CellPosition {
            row: cell / self.cols,
            col: cell % self.cols,
            side,
            index,
        })
    }

    /// Neighbours of `node` in ascending order.
    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == node {
                    Some(b)
                } else if b == node {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Edges with both endpoints below `n`.
    pub fn induced_edges(&self, n: usize) -> Vec<(usize, usize)> {
        self.edges.iter().copied().filter(|&(_, b)| b < n).collect()
    }
}

pub fn chimera_graph(rows: usize, cols: usize, shore: usize) -> Result<HardwareGraph> {
    if rows == 0 || cols == 0 || shore == 0 {
        return Err(ForgeError::ZeroDimension { rows, cols, shore });
    }
    let mut g = HardwareGraph {
        rows,
        cols,
        shore,
        edges: BTreeSet::new(),
    };
    let id = |row, col, side, index| {
        g.node_id(CellPosition {
            row,
            col,
            side,
            index,
        })
    };
    let mut edges = BTreeSet::new();
    for r in 0..rows {
        for c in 0..cols {
            for a in 0..shore {
                for b in 0..shore {
                    edges.insert((id(r, c, 0, a), id(r, c, 1, b)));
                }
            }
            for k in 0..shore {
                if c + 1 < cols {
                    edges.insert((id(r, c, 1, k), id(r, c + 1, 1, k)));
                }
                if r + 1 < rows {
                    edges.insert((id(r, c, 0, k), id(r + 1, c, 0, k)));
                }
            }
        }
    }
    g.edges = edges;
    Ok(g)
}

/// Couplings of `m` that the graph cannot host, in ascending order. Spins
/// beyond the node count make every one of their couplings a violation.
pub fn check_compatible(m: &IsingModel, g: &HardwareGraph) -> Vec<(usize, usize)> {
    m.edges().filter(|&(i, j)| !g.has_edge(i, j)).collect()
}

/// True when every coupling is an edge and the spin count fits.
pub fn is_compatible(m: &IsingModel, g: &HardwareGraph) -> bool {
    m.num_spins() <= g.num_nodes() && check_compatible(m, g).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IsingBuilder;

    #[test]
    fn node_counts() {
        assert_eq!(chimera_graph(4, 4, 4).unwrap().num_nodes(), 128);
        let one = chimera_graph(1, 1, 4).unwrap();
        assert_eq!(one.num_nodes(), 8);
        assert_eq!(one.edges().len(), 16);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(chimera_graph(0, 1, 4).is_err());
        assert!(chimera_graph(1, 1, 0).is_err());
    }

    #[test]
    fn cell_of_round_trips() {
        let g = chimera_graph(3, 2, 4).unwrap();
        for n in 0..g.num_nodes() {
            assert_eq!(g.node_id(g.cell_of(n).unwrap()), n);
        }
        assert!(g.cell_of(g.num_nodes()).is_none());
    }

    #[test]
    fn same_side_coupling_reported() {
        let g = chimera_graph(1, 1, 4).unwrap();
        let mut b = IsingBuilder::new(8);
        b.add_coupling(0, 4, 1.0).add_coupling(0, 1, 1.0);
        assert_eq!(check_compatible(&b.build(), &g), vec![(0, 1)]);
    }
}
