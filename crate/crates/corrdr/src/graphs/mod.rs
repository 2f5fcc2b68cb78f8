//! Decorated stable graphs.
//!
//! A graph here is the dual graph of a nodal curve mapping to a target:
//! vertices carry a geometric genus and a map degree, edges are nodes
//! (loops allowed), and legs are labeled marked points. Half-edge data is
//! implicit: edge `e = (v, w)` owns the half-edge at `v` (its *tail*) and
//! the one at `w` (its *head*), which is all the orientation bookkeeping
//! the cycle space and the weighting machinery need.

mod canon;
mod enumerate;
mod subdivide;

pub use canon::{
    automorphism_count, automorphisms, canonical_key, isomorphisms, loop_flip_count, GraphMap,
};
pub use enumerate::enumerate_graphs;
pub use subdivide::SubdividedGraph;

use serde_json::json;

use crate::{Error, Result};

/// Genus and map degree at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexData {
    pub genus: u32,
    pub degree: u32,
}

/// A connected decorated graph with labeled legs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    vertices: Vec<VertexData>,
    /// Edges as vertex pairs, tail ≤ head after normalization.
    edges: Vec<(usize, usize)>,
    /// `legs[i]` is the vertex carrying marking `i + 1`.
    legs: Vec<usize>,
}

impl Graph {
    /// Build and validate. Edges are normalized to `tail ≤ head`;
    /// connectivity is required.
    pub fn new(
        vertices: Vec<VertexData>,
        edges: Vec<(usize, usize)>,
        legs: Vec<usize>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::config("graph needs at least one vertex"));
        }
        let nv = vertices.len();
        for &(a, b) in &edges {
            if a >= nv || b >= nv {
                return Err(Error::config("edge endpoint out of range"));
            }
        }
        for &v in &legs {
            if v >= nv {
                return Err(Error::config("leg vertex out of range"));
            }
        }
        let g = Graph {
            vertices,
            edges: edges
                .into_iter()
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect(),
            legs,
        };
        if !g.is_connected() {
            return Err(Error::config("graph is not connected"));
        }
        Ok(g)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn vertex(&self, v: usize) -> VertexData {
        self.vertices[v]
    }

    pub fn vertices(&self) -> &[VertexData] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].0 == self.edges[e].1
    }

    pub fn n_loops(&self) -> usize {
        (0..self.n_edges()).filter(|&e| self.is_loop(e)).count()
    }

    /// Vertices carrying each marking, indexed by label − 1.
    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    /// Labels of the markings at `v` (1-based).
    pub fn legs_at(&self, v: usize) -> Vec<usize> {
        self.legs
            .iter()
            .enumerate()
            .filter_map(|(i, &w)| (w == v).then_some(i + 1))
            .collect()
    }

    /// Edge ends plus legs at `v`; loops count twice.
    pub fn valence(&self, v: usize) -> usize {
        let mut k = 0;
        for &(a, b) in &self.edges {
            if a == v {
                k += 1;
            }
            if b == v {
                k += 1;
            }
        }
        k + self.legs.iter().filter(|&&w| w == v).count()
    }

    /// First Betti number `E − V + 1` (the graph is connected).
    pub fn b1(&self) -> usize {
        self.n_edges() + 1 - self.n_vertices()
    }

    /// Total (arithmetic) genus `Σ g(v) + b1`.
    pub fn total_genus(&self) -> u32 {
        self.vertices.iter().map(|v| v.genus).sum::<u32>() + self.b1() as u32
    }

    /// Total map degree `Σ deg(v)`.
    pub fn total_degree(&self) -> u32 {
        self.vertices.iter().map(|v| v.degree).sum()
    }

    pub fn is_connected(&self) -> bool {
        let nv = self.n_vertices();
        let mut seen = vec![false; nv];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Stability: every vertex of map degree zero must satisfy
    /// `2g(v) − 2 + n(v) > 0`.
    pub fn is_stable(&self) -> bool {
        (0..self.n_vertices()).all(|v| {
            let data = self.vertices[v];
            data.degree > 0 || 2 * (data.genus as i64) - 2 + self.valence(v) as i64 > 0
        })
    }

    /// Contract edge `e`: a non-loop merges its endpoints (genus and degree
    /// add), a loop disappears and raises its vertex's genus by one. Total
    /// genus, total degree, and legs are preserved.
    ///
    /// # Panics
    /// Panics if `e` is out of range.
    pub fn contract_edge(&self, e: usize) -> Graph {
        assert!(e < self.n_edges(), "edge index out of range");
        let (a, b) = self.edges[e];
        if a == b {
            let mut vertices = self.vertices.clone();
            vertices[a].genus += 1;
            let mut edges = self.edges.clone();
            edges.remove(e);
            return Graph {
                vertices,
                edges,
                legs: self.legs.clone(),
            };
        }
        // merge b into a; vertices after b shift down by one
        let reindex = |v: usize| {
            if v == b {
                a
            } else if v > b {
                v - 1
            } else {
                v
            }
        };
        let mut vertices = Vec::with_capacity(self.n_vertices() - 1);
        for (i, &vd) in self.vertices.iter().enumerate() {
            if i == b {
                continue;
            }
            if i == a {
                vertices.push(VertexData {
                    genus: vd.genus + self.vertices[b].genus,
                    degree: vd.degree + self.vertices[b].degree,
                });
            } else {
                vertices.push(vd);
            }
        }
        let mut edges = Vec::with_capacity(self.n_edges() - 1);
        for (i, &(x, y)) in self.edges.iter().enumerate() {
            if i == e {
                continue;
            }
            let (x, y) = (reindex(x), reindex(y));
            edges.push((x.min(y), x.max(y)));
        }
        let legs = self.legs.iter().map(|&v| reindex(v)).collect();
        Graph {
            vertices,
            edges,
            legs,
        }
    }

    /// Deterministic BFS spanning tree from vertex 0 in edge-index order:
    /// `in_tree[e]` flags plus `parent[v] = (parent vertex, tree edge)`.
    /// Loops are never tree edges.
    pub(crate) fn bfs_tree(&self) -> (Vec<bool>, Vec<Option<(usize, usize)>>) {
        let nv = self.n_vertices();
        let mut in_tree = vec![false; self.n_edges()];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; nv];
        let mut seen = vec![false; nv];
        let mut queue = std::collections::VecDeque::new();
        seen[0] = true;
        queue.push_back(0usize);
        while let Some(v) = queue.pop_front() {
            for (e, &(a, b)) in self.edges.iter().enumerate() {
                if a == b {
                    continue;
                }
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    in_tree[e] = true;
                    parent[other] = Some((v, e));
                    queue.push_back(other);
                }
            }
        }
        (in_tree, parent)
    }

    /// Deterministic spanning tree membership flags.
    pub fn spanning_tree(&self) -> Vec<bool> {
        self.bfs_tree().0
    }

    /// Fundamental cycle basis over the deterministic spanning tree.
    ///
    /// Returns one signed edge-vector per non-tree edge, in edge order:
    /// coefficient `+1` on the non-tree edge (oriented tail → head) closed
    /// up through the tree. Loops contribute the vector with a single `+1`.
    pub fn cycle_basis(&self) -> Vec<Vec<i64>> {
        let (in_tree, parent) = self.bfs_tree();
        // path from v up to the root as signed edge coefficients
        let path_to_root = |mut v: usize, coeffs: &mut Vec<i64>, sign: i64| {
            while let Some((p, e)) = parent[v] {
                let (a, _) = self.edges[e];
                // edge stored (a,b); traversing v -> p moves against the
                // stored orientation when p is the tail
                let dir = if a == p { -1 } else { 1 };
                coeffs[e] += sign * dir;
                v = p;
            }
        };
        let mut basis = Vec::new();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if in_tree[e] {
                continue;
            }
            let mut coeffs = vec![0i64; self.n_edges()];
            coeffs[e] = 1;
            if a != b {
                // close up: head b back to tail a through the tree
                path_to_root(b, &mut coeffs, 1);
                path_to_root(a, &mut coeffs, -1);
            }
            basis.push(coeffs);
        }
        basis
    }

    /// Stable JSON form.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "vertices": self.vertices.iter()
                .map(|v| json!({"genus": v.genus, "degree": v.degree}))
                .collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "legs": self.legs.iter().enumerate()
                .map(|(i, &v)| json!({"vertex": v, "label": i + 1}))
                .collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn banana() -> Graph {
        // two genus-1 vertices, two parallel edges — total genus 3
        Graph::new(
            vec![
                VertexData { genus: 1, degree: 0 },
                VertexData { genus: 1, degree: 0 },
            ],
            vec![(0, 1), (0, 1)],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn betti_and_genus() {
        let g = banana();
        assert_eq!(g.b1(), 1);
        assert_eq!(g.total_genus(), 3);
        let loop_graph = Graph::new(
            vec![VertexData { genus: 1, degree: 0 }],
            vec![(0, 0)],
            vec![1usize - 1],
        )
        .unwrap();
        assert_eq!(loop_graph.b1(), 1);
        assert_eq!(loop_graph.total_genus(), 2);
        assert_eq!(loop_graph.valence(0), 3);
    }

    #[test]
    fn contraction_merges_and_sums() {
        let g = banana();
        let c = g.contract_edge(0);
        // one vertex of genus 2 with a loop: total genus still 3
        assert_eq!(c.n_vertices(), 1);
        assert_eq!(c.vertex(0).genus, 2);
        assert_eq!(c.n_edges(), 1);
        assert!(c.is_loop(0));
        assert_eq!(c.total_genus(), 3);
        // contracting the loop bumps genus
        let cc = c.contract_edge(0);
        assert_eq!(cc.vertex(0).genus, 3);
        assert_eq!(cc.n_edges(), 0);
        assert_eq!(cc.total_genus(), 3);
    }

    #[test]
    fn contraction_of_stable_is_stable() {
        let g = Graph::new(
            vec![
                VertexData { genus: 0, degree: 0 },
                VertexData { genus: 1, degree: 2 },
            ],
            vec![(0, 1)],
            vec![0, 0],
        )
        .unwrap();
        assert!(g.is_stable());
        assert!(g.contract_edge(0).is_stable());
    }

    #[test]
    fn disconnected_rejected() {
        let r = Graph::new(
            vec![
                VertexData { genus: 1, degree: 0 },
                VertexData { genus: 1, degree: 0 },
            ],
            vec![],
            vec![],
        );
        assert!(r.is_err());
    }

    #[test]
    fn cycle_basis_loops_and_bananas() {
        let g = banana();
        let basis = g.cycle_basis();
        assert_eq!(basis.len(), 1);
        // the two parallel edges traversed in opposite directions
        assert_eq!(basis[0].iter().map(|c| c.abs()).sum::<i64>(), 2);
        let theta = Graph::new(
            vec![
                VertexData { genus: 0, degree: 0 },
                VertexData { genus: 0, degree: 0 },
            ],
            vec![(0, 1), (0, 1), (0, 1)],
            vec![],
        )
        .unwrap();
        assert_eq!(theta.b1(), 2);
        assert_eq!(theta.cycle_basis().len(), 2);
    }
}
