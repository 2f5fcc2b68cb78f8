//! Uniform edge subdivision with a stable node indexing.

use super::{Graph, VertexData};
use crate::error::Error;
use crate::Result;

/// A base graph with every edge cut into `delta` equal segments.
///
/// Nodes are indexed originals-first: base vertex `v` keeps index `v`, and
/// the interior nodes of base edge `e` are `V + e·(δ−1) + (j−1)` for
/// `j = 1..δ−1`, ordered tail → head. Segment `i` of edge `e` (for
/// `i = 0..δ`) runs from node `(e, i)` to node `(e, i+1)` in the same
/// orientation. Interior nodes carry genus 0 and degree 0; markings stay on
/// the originals, and the first Betti number is unchanged.
#[derive(Clone, Debug)]
pub struct SubdividedGraph {
    base: Graph,
    delta: u32,
    graph: Graph,
}

impl SubdividedGraph {
    pub fn new(base: Graph, delta: u32) -> Result<Self> {
        if delta == 0 {
            return Err(Error::config("subdivision order must be positive"));
        }
        let d = delta as usize;
        let nv = base.n_vertices();
        let mut vertices = base.vertices().to_vec();
        vertices.extend(
            std::iter::repeat(VertexData {
                genus: 0,
                degree: 0,
            })
            .take(base.n_edges() * (d - 1)),
        );
        let mut edges = Vec::with_capacity(base.n_edges() * d);
        for e in 0..base.n_edges() {
            let (tail, head) = base.edge(e);
            for i in 0..d {
                let from = if i == 0 { tail } else { nv + e * (d - 1) + (i - 1) };
                let to = if i + 1 == d {
                    head
                } else {
                    nv + e * (d - 1) + i
                };
                edges.push((from, to));
            }
        }
        let graph = Graph::new(vertices, edges, base.legs().to_vec())?;
        Ok(SubdividedGraph { base, delta, graph })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    /// The subdivided graph itself (edge orientations are re-normalized
    /// there; use [`Self::segment`] for oriented walks).
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n_nodes(&self) -> usize {
        self.base.n_vertices() + self.base.n_edges() * (self.delta as usize - 1)
    }

    pub fn n_segments(&self) -> usize {
        self.base.n_edges() * self.delta as usize
    }

    pub fn is_original(&self, node: usize) -> bool {
        node < self.base.n_vertices()
    }

    /// Node `j` along base edge `e`: `j = 0` is the tail, `j = δ` the head,
    /// and `0 < j < δ` the interior nodes in order.
    ///
    /// # Panics
    /// Panics if `j > δ` or `e` is out of range.
    pub fn node(&self, e: usize, j: usize) -> usize {
        let d = self.delta as usize;
        assert!(j <= d, "node offset past the head");
        let (tail, head) = self.base.edge(e);
        if j == 0 {
            tail
        } else if j == d {
            head
        } else {
            self.base.n_vertices() + e * (d - 1) + (j - 1)
        }
    }

    /// Oriented segment `i` of base edge `e`: `(node(e, i), node(e, i+1))`.
    pub fn segment(&self, e: usize, i: usize) -> (usize, usize) {
        (self.node(e, i), self.node(e, i + 1))
    }

    /// The base edge and offset `1..δ−1` of an interior node.
    pub fn interior_position(&self, node: usize) -> Option<(usize, usize)> {
        if node < self.base.n_vertices() {
            return None;
        }
        let d = self.delta as usize;
        let k = node - self.base.n_vertices();
        Some((k / (d - 1), k % (d - 1) + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vd(genus: u32, degree: u32) -> VertexData {
        VertexData { genus, degree }
    }

    #[test]
    fn banana_in_thirds() {
        let base = Graph::new(vec![vd(1, 0), vd(1, 0)], vec![(0, 1), (0, 1)], vec![0]).unwrap();
        let s = SubdividedGraph::new(base, 3).unwrap();
        assert_eq!(s.n_nodes(), 6);
        assert_eq!(s.n_segments(), 6);
        assert_eq!(s.graph().b1(), 1);
        assert_eq!(s.graph().n_legs(), 1);
        // walk edge 1: 0, interior, interior, 1
        assert_eq!(s.node(1, 0), 0);
        assert_eq!(s.node(1, 1), 4);
        assert_eq!(s.node(1, 2), 5);
        assert_eq!(s.node(1, 3), 1);
        assert_eq!(s.segment(1, 1), (4, 5));
        assert_eq!(s.interior_position(4), Some((1, 1)));
        assert_eq!(s.interior_position(5), Some((1, 2)));
        assert_eq!(s.interior_position(0), None);
        for v in 0..s.n_nodes() {
            if let Some((e, j)) = s.interior_position(v) {
                assert_eq!(s.node(e, j), v);
                assert!(!s.is_original(v));
            }
        }
    }

    #[test]
    fn loop_subdivision_keeps_betti_number() {
        let base = Graph::new(vec![vd(1, 0)], vec![(0, 0)], vec![]).unwrap();
        let s = SubdividedGraph::new(base, 2).unwrap();
        // the loop becomes a two-edge cycle through one interior node
        assert_eq!(s.n_nodes(), 2);
        assert_eq!(s.graph().b1(), 1);
        assert_eq!(s.segment(0, 0), (0, 1));
        assert_eq!(s.segment(0, 1), (1, 0));
    }

    #[test]
    fn trivial_subdivision_is_the_base() {
        let base = Graph::new(vec![vd(0, 1), vd(0, 1)], vec![(0, 1)], vec![0, 1]).unwrap();
        let s = SubdividedGraph::new(base.clone(), 1).unwrap();
        assert_eq!(s.n_nodes(), base.n_vertices());
        assert_eq!(s.graph().edges(), base.edges());
        assert_eq!(s.segment(0, 0), (0, 1));
        assert_eq!(s.interior_position(1), None);
    }

    #[test]
    fn zero_order_rejected() {
        let base = Graph::new(vec![vd(1, 0)], vec![], vec![]).unwrap();
        assert!(SubdividedGraph::new(base, 0).is_err());
    }
}
