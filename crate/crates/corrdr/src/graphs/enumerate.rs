//! Exhaustive enumeration of stable decorated graphs.
//!
//! Breadth-first from the one-vertex graph: every stable graph arises by
//! repeated one-edge degenerations (vertex splits and genus-dropping loop
//! insertions), and contracting an edge of a stable graph is again stable,
//! so walking the stable layer of each edge count and deduplicating by
//! canonical key is exhaustive.

use std::collections::BTreeSet;

use super::canon::canonical_key;
use super::{Graph, VertexData};
use crate::error::Error;
use crate::Result;

/// All isomorphism classes of stable graphs with the given total genus,
/// number of markings, and total degree, sorted by edge count and then by
/// canonical key. `cap` bounds the number of classes; exceeding it is an
/// error rather than a silent truncation.
pub fn enumerate_graphs(genus: u32, n_legs: usize, degree: u32, cap: usize) -> Result<Vec<Graph>> {
    let smooth = Graph::new(
        vec![VertexData { genus, degree }],
        Vec::new(),
        vec![0; n_legs],
    )?;
    if !smooth.is_stable() {
        // contraction preserves stability, so an unstable one-vertex graph
        // means no stable graph of this type exists at all
        return Err(Error::domain(format!(
            "no stable graphs for genus {genus}, {n_legs} markings, degree {degree}"
        )));
    }
    if cap == 0 {
        return Err(Error::resource("graph enumeration cap is zero"));
    }
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    seen.insert(canonical_key(&smooth));
    let mut all: Vec<Graph> = Vec::new();
    let mut level: Vec<Graph> = vec![smooth.clone()];
    all.push(smooth);
    while !level.is_empty() {
        let mut next: Vec<Graph> = Vec::new();
        for g in &level {
            for h in expansions(g) {
                if !h.is_stable() {
                    continue;
                }
                if seen.insert(canonical_key(&h)) {
                    if seen.len() > cap {
                        return Err(Error::resource(format!(
                            "graph enumeration exceeded cap of {cap} classes"
                        )));
                    }
                    next.push(h.clone());
                    all.push(h);
                }
            }
        }
        level = next;
    }
    let mut keyed: Vec<(usize, Vec<i64>, Graph)> = all
        .into_iter()
        .map(|g| (g.n_edges(), canonical_key(&g), g))
        .collect();
    keyed.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
    Ok(keyed.into_iter().map(|(_, _, g)| g).collect())
}

/// One incident attachment at the vertex being split.
#[derive(Clone, Copy)]
enum Item {
    Tail(usize),
    Head(usize),
    Leg(usize),
}

/// All single-edge degenerations of `g`, stable or not.
fn expansions(g: &Graph) -> Vec<Graph> {
    let mut out = Vec::new();
    // trade a handle for a loop
    for v in 0..g.n_vertices() {
        if g.vertex(v).genus >= 1 {
            let mut vertices = g.vertices().to_vec();
            vertices[v].genus -= 1;
            let mut edges = g.edges().to_vec();
            edges.push((v, v));
            out.push(Graph::new(vertices, edges, g.legs().to_vec()).expect("degeneration is valid"));
        }
    }
    // split a vertex along a new edge, distributing genus, degree, and
    // every incident half-edge and marking over the two sides
    for v in 0..g.n_vertices() {
        let data = g.vertex(v);
        let mut items: Vec<Item> = Vec::new();
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            if a == v {
                items.push(Item::Tail(e));
            }
            if b == v {
                items.push(Item::Head(e));
            }
        }
        for (i, &lv) in g.legs().iter().enumerate() {
            if lv == v {
                items.push(Item::Leg(i));
            }
        }
        debug_assert!(items.len() < 63, "valence too large to split");
        let w = g.n_vertices();
        for g1 in 0..=data.genus {
            for d1 in 0..=data.degree {
                for mask in 0u64..(1u64 << items.len()) {
                    let mut vertices = g.vertices().to_vec();
                    vertices[v] = VertexData {
                        genus: g1,
                        degree: d1,
                    };
                    vertices.push(VertexData {
                        genus: data.genus - g1,
                        degree: data.degree - d1,
                    });
                    let mut edges = g.edges().to_vec();
                    let mut legs = g.legs().to_vec();
                    for (k, item) in items.iter().enumerate() {
                        if mask >> k & 1 == 0 {
                            continue;
                        }
                        match *item {
                            Item::Tail(e) => edges[e].0 = w,
                            Item::Head(e) => edges[e].1 = w,
                            Item::Leg(i) => legs[i] = w,
                        }
                    }
                    edges.push((v, w));
                    out.push(Graph::new(vertices, edges, legs).expect("degeneration is valid"));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::graphs::canon::{automorphism_count, isomorphisms};

    #[test]
    fn counts_match_known_strata() {
        assert_eq!(enumerate_graphs(0, 3, 0, 100).unwrap().len(), 1);
        assert_eq!(enumerate_graphs(0, 4, 0, 100).unwrap().len(), 4);
        assert_eq!(enumerate_graphs(1, 1, 0, 100).unwrap().len(), 2);
        assert_eq!(enumerate_graphs(1, 2, 0, 100).unwrap().len(), 5);
        assert_eq!(enumerate_graphs(2, 0, 0, 100).unwrap().len(), 7);
        assert_eq!(enumerate_graphs(0, 2, 1, 100).unwrap().len(), 2);
        assert_eq!(enumerate_graphs(1, 1, 1, 400).unwrap().len(), 10);
    }

    #[test]
    fn empty_when_no_stable_graph_exists() {
        for (g, n) in [(0, 0), (0, 1), (0, 2), (1, 0)] {
            assert!(
                matches!(enumerate_graphs(g, n, 0, 100), Err(Error::Domain(_))),
                "({g},{n}) should be rejected"
            );
        }
        // positive degree rescues stability
        assert!(enumerate_graphs(0, 0, 1, 100).is_ok());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(enumerate_graphs(2, 0, 0, 3).is_err());
    }

    #[test]
    fn automorphism_masses_match_hand_counts() {
        use crate::exact::{rat, rat_int, Rat};
        use crate::graphs::automorphism_count;
        // Σ 1/|Aut| over the graphs of a given type, worked out by hand:
        // (1,1): smooth (1) + loop with flip (1/2); (1,2): smooth, loop,
        // smooth+tail, loop+tail, banana split by the markings.
        for (genus, n, expected) in [(1u32, 1usize, rat(3, 2)), (1, 2, rat(7, 2))] {
            let total: Rat = enumerate_graphs(genus, n, 0, 100)
                .unwrap()
                .iter()
                .map(|g| rat_int(1) / rat_int(automorphism_count(g) as i64))
                .sum();
            assert_eq!(total, expected, "genus {genus}, {n} markings");
        }
    }

    #[test]
    fn genus_two_layer_is_correct() {
        let graphs = enumerate_graphs(2, 0, 0, 100).unwrap();
        for g in &graphs {
            assert!(g.is_stable());
            assert_eq!(g.total_genus(), 2);
            assert_eq!(g.total_degree(), 0);
            assert_eq!(g.n_legs(), 0);
        }
        // pairwise non-isomorphic, by explicit isomorphism search
        for i in 0..graphs.len() {
            for j in 0..graphs.len() {
                let maps = isomorphisms(&graphs[i], &graphs[j]);
                if i == j {
                    assert!(!maps.is_empty());
                } else {
                    assert!(maps.is_empty());
                }
            }
        }
        // closed under edge contraction
        let keys: BTreeSet<Vec<i64>> = graphs.iter().map(canonical_key).collect();
        for g in &graphs {
            for e in 0..g.n_edges() {
                assert!(keys.contains(&canonical_key(&g.contract_edge(e))));
            }
        }
        // the two trivalent classes: theta (Aut 12) and dumbbell (Aut 8)
        let theta = Graph::new(
            vec![
                VertexData { genus: 0, degree: 0 },
                VertexData { genus: 0, degree: 0 },
            ],
            vec![(0, 1), (0, 1), (0, 1)],
            vec![],
        )
        .unwrap();
        let dumbbell = Graph::new(
            vec![
                VertexData { genus: 0, degree: 0 },
                VertexData { genus: 0, degree: 0 },
            ],
            vec![(0, 0), (0, 1), (1, 1)],
            vec![],
        )
        .unwrap();
        assert!(keys.contains(&canonical_key(&theta)));
        assert!(keys.contains(&canonical_key(&dumbbell)));
        assert_eq!(automorphism_count(&theta), 12);
        assert_eq!(automorphism_count(&dumbbell), 8);
    }

    #[test]
    fn genus_three_layer_contains_banana() {
        let graphs = enumerate_graphs(3, 0, 0, 2000).unwrap();
        let banana = Graph::new(
            vec![
                VertexData { genus: 1, degree: 0 },
                VertexData { genus: 1, degree: 0 },
            ],
            vec![(0, 1), (0, 1)],
            vec![],
        )
        .unwrap();
        let key = canonical_key(&banana);
        assert!(graphs.iter().any(|g| canonical_key(g) == key));
        for g in &graphs {
            assert_eq!(g.total_genus(), 3);
            assert!(g.is_stable());
        }
        // closed under edge contraction
        let keys: BTreeSet<Vec<i64>> = graphs.iter().map(canonical_key).collect();
        for g in &graphs {
            for e in 0..g.n_edges() {
                assert!(keys.contains(&canonical_key(&g.contract_edge(e))));
            }
        }
    }

    #[test]
    fn output_order_is_deterministic() {
        let a = enumerate_graphs(2, 1, 0, 400).unwrap();
        let b = enumerate_graphs(2, 1, 0, 400).unwrap();
        let ka: Vec<_> = a.iter().map(canonical_key).collect();
        let kb: Vec<_> = b.iter().map(canonical_key).collect();
        assert_eq!(ka, kb);
        // sorted by edge count
        for w in a.windows(2) {
            assert!(w[0].n_edges() <= w[1].n_edges());
        }
    }
}
