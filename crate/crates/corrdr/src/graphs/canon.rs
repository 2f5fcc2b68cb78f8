//! Canonical keys, isomorphisms, and automorphism counts.
//!
//! Vertices are first separated by color refinement on
//! (genus, degree, markings, valence); the canonical key then minimizes the
//! graph encoding over all vertex orderings compatible with the final
//! coloring. Keys agree exactly for isomorphic graphs and differ otherwise,
//! so they double as deduplication keys during enumeration.

use std::collections::BTreeMap;

use itertools::Itertools;

use super::Graph;

/// An isomorphism between two decorated graphs at the half-edge level.
///
/// `vertex_map[v]` is the image vertex, `edge_map[e]` the image edge, and
/// `edge_sign[e]` is `+1` when the stored tail→head orientation of `e` maps
/// to the stored orientation of its image and `-1` when it reverses. The two
/// half-edges of a loop can be matched either way, so loops contribute an
/// independent sign choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMap {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    pub edge_sign: Vec<i8>,
}

impl GraphMap {
    /// Push a signed edge vector (e.g. a cycle) forward along the map.
    pub fn act_on_edge_vector(&self, vec: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; vec.len()];
        for (e, &c) in vec.iter().enumerate() {
            out[self.edge_map[e]] += i64::from(self.edge_sign[e]) * c;
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().enumerate().all(|(i, &v)| i == v)
            && self.edge_map.iter().enumerate().all(|(i, &e)| i == e)
            && self.edge_sign.iter().all(|&s| s == 1)
    }
}

/// Rank a list of signatures: equal signatures share a rank, ranks follow
/// signature order. Returns the ranks and the number of distinct values.
fn rank_signatures(sigs: &[Vec<i64>]) -> (Vec<usize>, usize) {
    let mut sorted: Vec<&Vec<i64>> = sigs.iter().collect();
    sorted.sort();
    sorted.dedup();
    let index: BTreeMap<&Vec<i64>, usize> =
        sorted.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    (sigs.iter().map(|s| index[s]).collect(), sorted.len())
}

/// Stable joint coloring of the vertices of several graphs. All graphs share
/// one color space, so equal colors across graphs mean "not yet
/// distinguishable". Initial colors come from (genus, degree, valence,
/// marking labels); refinement folds in the multiset of neighbor colors
/// (loops contribute their own vertex twice).
fn refine_colors(graphs: &[&Graph]) -> Vec<Vec<usize>> {
    let mut owners: Vec<(usize, usize)> = Vec::new();
    let mut sigs: Vec<Vec<i64>> = Vec::new();
    for (gi, g) in graphs.iter().enumerate() {
        for v in 0..g.n_vertices() {
            let data = g.vertex(v);
            let mut s = vec![
                i64::from(data.genus),
                i64::from(data.degree),
                g.valence(v) as i64,
            ];
            s.extend(g.legs_at(v).into_iter().map(|l| l as i64));
            sigs.push(s);
            owners.push((gi, v));
        }
    }
    let (mut colors, mut n_colors) = rank_signatures(&sigs);
    loop {
        let mut per_graph: Vec<Vec<usize>> =
            graphs.iter().map(|g| vec![0; g.n_vertices()]).collect();
        for (k, &(gi, v)) in owners.iter().enumerate() {
            per_graph[gi][v] = colors[k];
        }
        let mut next_sigs = Vec::with_capacity(sigs.len());
        for &(gi, v) in &owners {
            let g = graphs[gi];
            let mut nbr: Vec<i64> = Vec::new();
            for &(a, b) in g.edges() {
                if a == v && b == v {
                    nbr.push(per_graph[gi][v] as i64);
                    nbr.push(per_graph[gi][v] as i64);
                } else if a == v {
                    nbr.push(per_graph[gi][b] as i64);
                } else if b == v {
                    nbr.push(per_graph[gi][a] as i64);
                }
            }
            nbr.sort_unstable();
            let mut s = vec![per_graph[gi][v] as i64];
            s.extend(nbr);
            next_sigs.push(s);
        }
        let (next, next_n) = rank_signatures(&next_sigs);
        colors = next;
        if next_n == n_colors {
            break;
        }
        n_colors = next_n;
    }
    let mut out: Vec<Vec<usize>> = graphs.iter().map(|g| vec![0; g.n_vertices()]).collect();
    for (k, &(gi, v)) in owners.iter().enumerate() {
        out[gi][v] = colors[k];
    }
    out
}

/// Encode a graph under the vertex ordering `order` (new index → old vertex).
fn encode(g: &Graph, order: &[usize]) -> Vec<i64> {
    let mut inv = vec![0usize; order.len()];
    for (new, &old) in order.iter().enumerate() {
        inv[old] = new;
    }
    let mut enc = vec![
        g.n_vertices() as i64,
        g.n_edges() as i64,
        g.n_legs() as i64,
    ];
    for &old in order {
        let data = g.vertex(old);
        enc.push(i64::from(data.genus));
        enc.push(i64::from(data.degree));
    }
    for &v in g.legs() {
        enc.push(inv[v] as i64);
    }
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (inv[a], inv[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    edges.sort_unstable();
    for (a, b) in edges {
        enc.push(a as i64);
        enc.push(b as i64);
    }
    enc
}

/// Isomorphism-invariant complete key: two graphs have equal keys exactly
/// when they are isomorphic as decorated graphs with labeled markings.
pub fn canonical_key(g: &Graph) -> Vec<i64> {
    let colors = &refine_colors(&[g])[0];
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        classes.entry(c).or_default().push(v);
    }
    let perms: Vec<Vec<Vec<usize>>> = classes
        .values()
        .map(|class| {
            class
                .iter()
                .copied()
                .permutations(class.len())
                .collect::<Vec<_>>()
        })
        .collect();
    let mut best: Option<Vec<i64>> = None;
    for combo in perms.iter().multi_cartesian_product() {
        let order: Vec<usize> = combo.iter().flat_map(|p| p.iter().copied()).collect();
        let enc = encode(g, &order);
        if best.as_ref().is_none_or(|b| enc < *b) {
            best = Some(enc);
        }
    }
    best.expect("graphs have at least one vertex")
}

/// Edge indices grouped by their (normalized) endpoint pair.
fn pair_groups(g: &Graph) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut m: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        m.entry((a, b)).or_default().push(e);
    }
    m
}

fn sigma_compatible(g1: &Graph, g2: &Graph, sigma: &[usize]) -> bool {
    for v in 0..g1.n_vertices() {
        if g1.vertex(v) != g2.vertex(sigma[v]) {
            return false;
        }
    }
    for (i, &v) in g1.legs().iter().enumerate() {
        if sigma[v] != g2.legs()[i] {
            return false;
        }
    }
    // matching multiplicity on every endpoint pair; sigma is injective, so
    // equal totals make this a bijection of pair groups
    let p2 = pair_groups(g2);
    for ((a, b), es) in pair_groups(g1) {
        let (x, y) = (sigma[a], sigma[b]);
        let key = (x.min(y), x.max(y));
        if p2.get(&key).map_or(0, |v| v.len()) != es.len() {
            return false;
        }
    }
    true
}

/// Run `f` on every vertex bijection g1 → g2 that preserves decorations,
/// markings, and edge multiplicities.
fn for_each_sigma(g1: &Graph, g2: &Graph, f: &mut dyn FnMut(&[usize])) {
    if g1.n_vertices() != g2.n_vertices()
        || g1.n_edges() != g2.n_edges()
        || g1.n_legs() != g2.n_legs()
    {
        return;
    }
    let colors = refine_colors(&[g1, g2]);
    let mut classes: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (v, &c) in colors[0].iter().enumerate() {
        classes.entry(c).or_default().0.push(v);
    }
    for (v, &c) in colors[1].iter().enumerate() {
        classes.entry(c).or_default().1.push(v);
    }
    if classes.values().any(|(a, b)| a.len() != b.len()) {
        return;
    }
    let class_list: Vec<(Vec<usize>, Vec<usize>)> = classes.into_values().collect();
    let choice_sets: Vec<Vec<Vec<usize>>> = class_list
        .iter()
        .map(|(_, tgt)| {
            tgt.iter()
                .copied()
                .permutations(tgt.len())
                .collect::<Vec<_>>()
        })
        .collect();
    for combo in choice_sets.iter().multi_cartesian_product() {
        let mut sigma = vec![usize::MAX; g1.n_vertices()];
        for ((srcs, _), perm) in class_list.iter().zip(combo.iter()) {
            for (&v, &w) in srcs.iter().zip(perm.iter()) {
                sigma[v] = w;
            }
        }
        if sigma_compatible(g1, g2, &sigma) {
            f(&sigma);
        }
    }
}

/// Expand one vertex bijection into all compatible half-edge isomorphisms.
fn expand_edge_maps(g1: &Graph, g2: &Graph, sigma: &[usize], out: &mut Vec<GraphMap>) {
    let p2 = pair_groups(g2);
    let ne = g1.n_edges();
    let mut partial: Vec<(Vec<usize>, Vec<i8>)> = vec![(vec![usize::MAX; ne], vec![0i8; ne])];
    for ((a, b), es) in pair_groups(g1) {
        let (x, y) = (sigma[a], sigma[b]);
        let targets = &p2[&(x.min(y), x.max(y))];
        let is_loop = a == b;
        // a < b for non-loops, so sigma keeps or reverses the orientation
        let straight_sign: i8 = if x <= y { 1 } else { -1 };
        let mut options: Vec<(Vec<usize>, Vec<i8>)> = Vec::new();
        for perm in targets.iter().copied().permutations(targets.len()) {
            if is_loop {
                for mask in 0u32..(1u32 << es.len()) {
                    let signs = (0..es.len())
                        .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                        .collect();
                    options.push((perm.clone(), signs));
                }
            } else {
                options.push((perm.clone(), vec![straight_sign; es.len()]));
            }
        }
        let mut grown = Vec::with_capacity(partial.len() * options.len());
        for (em, sg) in &partial {
            for (perm, signs) in &options {
                let mut em2 = em.clone();
                let mut sg2 = sg.clone();
                for ((&src, &dst), &s) in es.iter().zip(perm.iter()).zip(signs.iter()) {
                    em2[src] = dst;
                    sg2[src] = s;
                }
                grown.push((em2, sg2));
            }
        }
        partial = grown;
    }
    for (edge_map, edge_sign) in partial {
        out.push(GraphMap {
            vertex_map: sigma.to_vec(),
            edge_map,
            edge_sign,
        });
    }
}

/// All half-edge isomorphisms g1 → g2 (empty when none exist).
pub fn isomorphisms(g1: &Graph, g2: &Graph) -> Vec<GraphMap> {
    let mut out = Vec::new();
    for_each_sigma(g1, g2, &mut |sigma| {
        expand_edge_maps(g1, g2, sigma, &mut out);
    });
    out
}

/// All half-edge automorphisms.
pub fn automorphisms(g: &Graph) -> Vec<GraphMap> {
    isomorphisms(g, g)
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Order of the half-edge automorphism group, without materializing it:
/// per vertex bijection, parallel edges permute freely and every loop keeps
/// its half-edge swap.
pub fn automorphism_count(g: &Graph) -> u64 {
    let mut pairs = 0u64;
    for_each_sigma(g, g, &mut |_sigma| {
        let per_sigma: u64 = pair_groups(g).values().map(|es| factorial(es.len())).product();
        pairs += per_sigma;
    });
    pairs * loop_flip_count(g)
}

/// The loop half-edge swaps alone: `2^{#loops}`.
pub fn loop_flip_count(g: &Graph) -> u64 {
    1u64 << g.n_loops()
}
