//! δ-torsion divisor calculus on subdivided graphs with formal edge lengths.
//!
//! Divisors live on the nodes of a `SubdividedGraph`; piecewise-linear
//! functions have integer slopes on segments and take values that are
//! ℚ-linear forms in the base edge lengths. Because lengths are formal, a
//! PL function's total rise along any edge lying on a cycle must vanish
//! identically, which makes principality a finite integer-linear check.
//!
//! The class of a δ-torsion divisor D is read off from the unique slope
//! solution of div(α) = δ·D: the first slope on each non-tree edge, mod δ.
//! Adding div(m) to D shifts every slope by δ·(slope of m), so the residues
//! are invariants; conversely matching residues let (α₁ − α₂)/δ witness
//! equivalence directly. Divergence here is the sum of incoming slopes.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::exact::{rat, Rat};
use crate::graphs::{Graph, SubdividedGraph};
use crate::Result;
use num_traits::Zero;

/// Integer divisor on the nodes of a subdivided graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalDivisor {
    values: Vec<i64>,
}

impl TropicalDivisor {
    pub fn zero(sub: &SubdividedGraph) -> Self {
        TropicalDivisor {
            values: vec![0; sub.n_nodes()],
        }
    }

    pub fn from_values(sub: &SubdividedGraph, values: Vec<i64>) -> Result<Self> {
        if values.len() != sub.n_nodes() {
            return Err(Error::config(format!(
                "divisor needs one value per node ({} expected)",
                sub.n_nodes()
            )));
        }
        Ok(TropicalDivisor { values })
    }

    pub fn value(&self, node: usize) -> i64 {
        self.values[node]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn set(&mut self, node: usize, v: i64) {
        self.values[node] = v;
    }

    pub fn degree(&self) -> i64 {
        self.values.iter().sum()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.values.len(), other.values.len());
        TropicalDivisor {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.values.len(), other.values.len());
        TropicalDivisor {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        TropicalDivisor {
            values: self.values.iter().map(|v| k * v).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Sparse JSON: original vertices by index, interior nodes by
    /// (base edge, subdivision index).
    pub fn to_json(&self, sub: &SubdividedGraph) -> serde_json::Value {
        let mut entries = Vec::new();
        for (node, &v) in self.values.iter().enumerate() {
            if v == 0 {
                continue;
            }
            let entry = match sub.interior_position(node) {
                None => serde_json::json!({"vertex": node, "value": v}),
                Some((e, j)) => serde_json::json!({"edge": e, "index": j, "value": v}),
            };
            entries.push(entry);
        }
        serde_json::json!(entries)
    }
}

/// ℚ-linear form in the base edge lengths.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinForm {
    coeffs: BTreeMap<usize, Rat>,
}

impl LinForm {
    pub fn zero() -> Self {
        LinForm::default()
    }

    pub fn coeff(&self, edge: usize) -> Rat {
        self.coeffs.get(&edge).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, edge: usize, c: Rat) {
        if c.is_zero() {
            return;
        }
        let v = self.coeffs.entry(edge).or_insert_with(Rat::zero);
        *v += c;
        if v.is_zero() {
            self.coeffs.remove(&edge);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, c) in &other.coeffs {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = LinForm::zero();
        for (&e, v) in &self.coeffs {
            out.add_term(e, v.clone() * c.clone());
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&usize, &Rat)> {
        self.coeffs.iter()
    }
}

/// Piecewise-linear function on a subdivided graph: a value at every node
/// and an integer slope on every segment, oriented tail → head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    values: Vec<LinForm>,
    slopes: Vec<Vec<i64>>,
}

impl PLFunction {
    pub fn value(&self, node: usize) -> &LinForm {
        &self.values[node]
    }

    /// Slope on segment `i` of base edge `e`, in the tail → head direction.
    pub fn slope(&self, e: usize, i: usize) -> i64 {
        self.slopes[e][i]
    }

    pub fn slopes(&self) -> &[Vec<i64>] {
        &self.slopes
    }

    pub fn div(&self, sub: &SubdividedGraph) -> TropicalDivisor {
        TropicalDivisor {
            values: divisor_of_slopes(sub, &self.slopes),
        }
    }
}

/// Divisor of a slope field: at each node, the sum of incoming slopes.
fn divisor_of_slopes(sub: &SubdividedGraph, slopes: &[Vec<i64>]) -> Vec<i64> {
    let base = sub.base();
    let d = sub.delta() as usize;
    let mut div = vec![0i64; sub.n_nodes()];
    for e in 0..base.n_edges() {
        let (a, b) = base.edge(e);
        for j in 1..d {
            div[sub.node(e, j)] += slopes[e][j - 1] - slopes[e][j];
        }
        div[a] -= slopes[e][0];
        div[b] += slopes[e][d - 1];
    }
    div
}

struct EdgeProfile {
    /// prefix[i] = Σ_{1 ≤ j ≤ i} τ(u_{e,j}); the slope on segment i is
    /// x_e − prefix[i].
    prefix: Vec<i64>,
    /// Σ_j τ(u_{e,j}) over the interior nodes.
    interior_total: i64,
    /// W_e = Σ_j (δ − j)·τ(u_{e,j}); the total rise along the edge is
    /// (δ·x_e − W_e)·ℓ_e/δ.
    weighted: i64,
}

fn edge_profile(sub: &SubdividedGraph, tau: &[i64], e: usize) -> EdgeProfile {
    let d = sub.delta() as usize;
    let delta = sub.delta() as i64;
    let mut prefix = vec![0i64; d];
    let mut weighted = 0i64;
    for j in 1..d {
        let t = tau[sub.node(e, j)];
        prefix[j] = prefix[j - 1] + t;
        weighted += (delta - j as i64) * t;
    }
    EdgeProfile {
        interior_total: prefix[d - 1],
        prefix,
        weighted,
    }
}

/// Integer slope field with div = τ, if τ is principal over formal lengths.
/// The flow part is solved on the spanning tree; the cycle closure forces
/// δ·x_e = W_e on every edge lying on a cycle, which is where principality
/// can fail.
fn principal_slopes(sub: &SubdividedGraph, tau: &[i64]) -> Option<Vec<Vec<i64>>> {
    if tau.iter().sum::<i64>() != 0 {
        return None;
    }
    let base = sub.base();
    let delta = sub.delta() as i64;
    let (nv, ne) = (base.n_vertices(), base.n_edges());
    let profiles: Vec<EdgeProfile> = (0..ne).map(|e| edge_profile(sub, tau, e)).collect();

    // vertex constraints Σ_head x − Σ_tail x = b
    let mut b: Vec<i64> = (0..nv).map(|v| tau[v]).collect();
    for e in 0..ne {
        let (_, h) = base.edge(e);
        b[h] += profiles[e].interior_total;
    }

    let (in_tree, parent) = base.bfs_tree();
    let mut depth = vec![0usize; nv];
    for v in 0..nv {
        let (mut u, mut d) = (v, 0);
        while let Some((p, _)) = parent[u] {
            u = p;
            d += 1;
        }
        depth[v] = d;
    }
    let mut order: Vec<usize> = (0..nv).filter(|&v| parent[v].is_some()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(depth[v]));

    let mut x = vec![0i64; ne];
    let mut res = b;
    for &v in &order {
        let (p, e) = parent[v].expect("non-root");
        let (_, h) = base.edge(e);
        let coef = if h == v { 1 } else { -1 };
        x[e] = coef * res[v];
        res[v] = 0;
        res[p] += coef * x[e];
    }
    if res[0] != 0 {
        // Στ = 0 makes the root constraint automatic
        unreachable!("tree flow residual at the root");
    }

    let basis = base.cycle_basis();
    let nontree: Vec<usize> = (0..ne).filter(|&e| !in_tree[e]).collect();
    for (j, &ej) in nontree.iter().enumerate() {
        let w = profiles[ej].weighted;
        if w.rem_euclid(delta) != 0 {
            return None;
        }
        let c = w / delta - x[ej];
        if c != 0 {
            for e in 0..ne {
                x[e] += c * basis[j][e];
            }
        }
    }
    for e in 0..ne {
        let on_cycle = basis.iter().any(|row| row[e] != 0);
        if on_cycle && delta * x[e] != profiles[e].weighted {
            return None;
        }
    }

    Some(
        (0..ne)
            .map(|e| {
                profiles[e]
                    .prefix
                    .iter()
                    .map(|p| x[e] - p)
                    .collect::<Vec<i64>>()
            })
            .collect(),
    )
}

/// Linear equivalence of divisors: D₁ − D₂ is the divisor of an integral
/// PL function.
pub fn is_equivalent(sub: &SubdividedGraph, d1: &TropicalDivisor, d2: &TropicalDivisor) -> bool {
    d1.degree() == d2.degree() && principal_slopes(sub, d1.sub(d2).values()).is_some()
}

/// A δ-torsion divisor class on a graph: residues of the defining slope
/// solution on the non-tree edges, one coordinate per fundamental cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClass {
    graph: Graph,
    delta: u32,
    vector: Vec<i64>,
}

impl DivisorClass {
    pub fn new(graph: Graph, delta: u32, vector: Vec<i64>) -> Result<Self> {
        if delta == 0 {
            return Err(Error::config("torsion order must be positive"));
        }
        if vector.len() != graph.b1() {
            return Err(Error::config(format!(
                "class vector needs one entry per cycle ({} expected)",
                graph.b1()
            )));
        }
        let d = i64::from(delta);
        Ok(DivisorClass {
            graph,
            delta,
            vector: vector.into_iter().map(|k| k.rem_euclid(d)).collect(),
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn vector(&self) -> &[i64] {
        &self.vector
    }

    pub fn is_zero(&self) -> bool {
        self.vector.iter().all(|&k| k == 0)
    }

    /// The canonical representative divisor on the δ-subdivision.
    pub fn representative(&self) -> Result<(SubdividedGraph, TropicalDivisor)> {
        let sub = SubdividedGraph::new(self.graph.clone(), self.delta)?;
        let rep = canonical_rep(&sub, &self.vector)?;
        Ok((sub, rep))
    }
}

/// Decide δ-torsion and compute the class of `d`: solve div(α) = δ·d and
/// read the slope residues on the non-tree edges.
pub fn classify(sub: &SubdividedGraph, d: &TropicalDivisor) -> Result<DivisorClass> {
    if d.values().len() != sub.n_nodes() {
        return Err(Error::config("divisor does not live on this subdivision"));
    }
    if d.degree() != 0 {
        return Err(Error::domain("not δ-torsion: divisor has nonzero degree"));
    }
    let delta = i64::from(sub.delta());
    let tau: Vec<i64> = d.values().iter().map(|&v| delta * v).collect();
    let slopes = principal_slopes(sub, &tau)
        .ok_or_else(|| Error::domain("not δ-torsion: δ·D is not principal"))?;
    let in_tree = sub.base().spanning_tree();
    let vector: Vec<i64> = (0..sub.base().n_edges())
        .filter(|&e| !in_tree[e])
        .map(|e| (-slopes[e][0]).rem_euclid(delta))
        .collect();
    DivisorClass::new(sub.base().clone(), sub.delta(), vector)
}

/// Canonical representative of a class vector: the superposition of one
/// staircase per fundamental cycle. On a cycle with coordinate k, each edge
/// traversed forward carries slopes δ−k on its first k segments and −k
/// after; backward edges carry the mirror image. Every per-edge rise is
/// zero, so the underlying PL witness vanishes at all original vertices.
pub fn canonical_rep(sub: &SubdividedGraph, vector: &[i64]) -> Result<TropicalDivisor> {
    let base = sub.base();
    if vector.len() != base.b1() {
        return Err(Error::config(format!(
            "class vector needs one entry per cycle ({} expected)",
            base.b1()
        )));
    }
    let delta = i64::from(sub.delta());
    let d = sub.delta() as usize;
    let basis = base.cycle_basis();
    let mut slopes = vec![vec![0i64; d]; base.n_edges()];
    for (j, row) in basis.iter().enumerate() {
        let k = vector[j].rem_euclid(delta);
        if k == 0 {
            continue;
        }
        for (e, &s) in row.iter().enumerate() {
            match s {
                0 => {}
                1 => {
                    for (i, t) in slopes[e].iter_mut().enumerate() {
                        *t += if (i as i64) < k { delta - k } else { -k };
                    }
                }
                -1 => {
                    for (i, t) in slopes[e].iter_mut().enumerate() {
                        *t += if (i as i64) < delta - k { k } else { -(delta - k) };
                    }
                }
                _ => unreachable!("fundamental cycles have coefficients in {{-1,0,1}}"),
            }
        }
    }
    let div = divisor_of_slopes(sub, &slopes);
    let values = div
        .into_iter()
        .map(|v| {
            debug_assert_eq!(v.rem_euclid(delta), 0);
            v / delta
        })
        .collect();
    Ok(TropicalDivisor { values })
}

/// The PL function with div(α) = δ·D normalized to vanish at every original
/// vertex. Exists for the canonical representatives; errors when the class
/// admits no such normalized witness for this particular divisor.
pub fn solve_alpha(sub: &SubdividedGraph, d: &TropicalDivisor) -> Result<PLFunction> {
    if d.values().len() != sub.n_nodes() {
        return Err(Error::config("divisor does not live on this subdivision"));
    }
    if d.degree() != 0 {
        return Err(Error::domain("not δ-torsion: divisor has nonzero degree"));
    }
    let base = sub.base();
    let delta = i64::from(sub.delta());
    let dd = sub.delta() as usize;
    let (nv, ne) = (base.n_vertices(), base.n_edges());
    let tau: Vec<i64> = d.values().iter().map(|&v| delta * v).collect();
    let profiles: Vec<EdgeProfile> = (0..ne).map(|e| edge_profile(sub, &tau, e)).collect();

    // vanishing at the originals forces zero rise on every edge, hence
    // x_e = W_e/δ; the vertex constraints become a pure consistency check
    let x: Vec<i64> = (0..ne)
        .map(|e| {
            debug_assert_eq!(profiles[e].weighted.rem_euclid(delta), 0);
            profiles[e].weighted / delta
        })
        .collect();
    let mut res: Vec<i64> = (0..nv).map(|v| -tau[v]).collect();
    for e in 0..ne {
        let (t, h) = base.edge(e);
        res[h] += x[e] - profiles[e].interior_total;
        res[t] -= x[e];
    }
    if res.iter().any(|&r| r != 0) {
        return Err(Error::domain(
            "δ·D admits no PL witness vanishing on the original vertices",
        ));
    }

    let slopes: Vec<Vec<i64>> = (0..ne)
        .map(|e| profiles[e].prefix.iter().map(|p| x[e] - p).collect())
        .collect();
    let mut values = vec![LinForm::zero(); sub.n_nodes()];
    for e in 0..ne {
        let mut acc = 0i64;
        for j in 1..dd {
            acc += slopes[e][j - 1];
            values[sub.node(e, j)].add_term(e, rat(acc, delta));
        }
    }
    let pl = PLFunction { values, slopes };
    debug_assert_eq!(pl.div(sub).values(), tau.as_slice());
    Ok(pl)
}

/// The quadratic term 𝔏 = (1/δ²) Σ_v α_D(v) · δD(v) of a class, as a
/// linear form in the base edge lengths.
pub fn l_form(sub: &SubdividedGraph, d: &TropicalDivisor, alpha: &PLFunction) -> LinForm {
    let delta = i64::from(sub.delta());
    let mut out = LinForm::zero();
    for node in 0..sub.n_nodes() {
        let c = delta * d.value(node);
        if c != 0 {
            out = out.add(&alpha.value(node).scale(&rat(c, delta * delta)));
        }
    }
    out
}

/// Realize a divisor supported on the vertices of the base graph as an
/// equivalent divisor supported strictly off them, on the 3-subdivision.
/// For each vertex its value is pushed onto the first incident edge slot;
/// the output is D + div(α) for the tent function α built from those slopes.
pub fn move_off_vertices(base: &Graph, d: &[i64]) -> Result<(SubdividedGraph, TropicalDivisor)> {
    if d.len() != base.n_vertices() {
        return Err(Error::config("divisor needs one value per vertex"));
    }
    if base.n_edges() == 0 {
        if d.iter().any(|&v| v != 0) {
            return Err(Error::domain(
                "cannot move a nonzero divisor off the vertices of an edgeless graph",
            ));
        }
        let sub = SubdividedGraph::new(base.clone(), 3)?;
        let zero = TropicalDivisor::zero(&sub);
        return Ok((sub, zero));
    }
    let ne = base.n_edges();
    let mut s_tail = vec![0i64; ne];
    let mut s_head = vec![0i64; ne];
    for v in 0..base.n_vertices() {
        if d[v] == 0 {
            continue;
        }
        let mut placed = false;
        'slots: for e in 0..ne {
            let (t, h) = base.edge(e);
            if t == v {
                s_tail[e] = d[v];
                placed = true;
                break 'slots;
            }
            if h == v {
                s_head[e] = d[v];
                placed = true;
                break 'slots;
            }
        }
        if !placed {
            return Err(Error::domain(format!(
                "vertex {v} carries divisor but no edge"
            )));
        }
    }
    let sub = SubdividedGraph::new(base.clone(), 3)?;
    let slopes: Vec<Vec<i64>> = (0..ne)
        .map(|e| vec![s_tail[e], s_head[e] - s_tail[e], -s_head[e]])
        .collect();
    let mut values = divisor_of_slopes(&sub, &slopes);
    for v in 0..base.n_vertices() {
        values[v] += d[v];
    }
    debug_assert!((0..base.n_vertices()).all(|v| values[v] == 0));
    Ok((sub, TropicalDivisor { values }))
}

/// Transport a class along the contraction of base edge `e`. Slopes of the
/// defining PL witness survive contraction, and modulo δ every slope field
/// with δ-divisible divergence is a Z_δ-combination of fundamental cycles,
/// so the new residues are read from the old cycle basis (with a sign when
/// re-normalizing the stored orientation flips an edge).
pub fn contract_class(class: &DivisorClass, e: usize) -> Result<DivisorClass> {
    let g = class.graph();
    if e >= g.n_edges() {
        return Err(Error::config("edge index out of range"));
    }
    let delta = i64::from(class.delta);
    let (a, b) = g.edge(e);
    let contracted = g.contract_edge(e);
    let old_of = |i: usize| if i >= e { i + 1 } else { i };
    let reindex = |v: usize| {
        if a == b {
            v
        } else if v == b {
            a
        } else if v > b {
            v - 1
        } else {
            v
        }
    };
    let basis = g.cycle_basis();
    let in_tree_new = contracted.spanning_tree();
    let vector: Vec<i64> = (0..contracted.n_edges())
        .filter(|&f| !in_tree_new[f])
        .map(|f| {
            let old = old_of(f);
            let (x, y) = g.edge(old);
            let flipped = reindex(x) > reindex(y);
            let sign = if flipped { -1 } else { 1 };
            let val: i64 = basis
                .iter()
                .zip(class.vector())
                .map(|(row, &k)| k * row[old])
                .sum();
            (sign * val).rem_euclid(delta)
        })
        .collect();
    DivisorClass::new(contracted, class.delta, vector)
}

/// All δ^{b₁} class vectors, in lexicographic order.
pub fn class_vectors(delta: u32, b1: usize) -> Vec<Vec<i64>> {
    let d = i64::from(delta);
    let mut out = Vec::new();
    let mut v = vec![0i64; b1];
    loop {
        out.push(v.clone());
        let mut i = b1;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            v[i] += 1;
            if v[i] < d {
                break;
            }
            v[i] = 0;
        }
        // carry continues in the inner loop; the outer loop re-pushes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;
    use crate::graphs::VertexData;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bare(nv: usize, edges: Vec<(usize, usize)>) -> Graph {
        Graph::new(
            vec![VertexData { genus: 0, degree: 0 }; nv],
            edges,
            vec![],
        )
        .unwrap()
    }

    fn loop_graph() -> Graph {
        bare(1, vec![(0, 0)])
    }

    fn banana() -> Graph {
        bare(2, vec![(0, 1), (0, 1)])
    }

    fn theta() -> Graph {
        bare(2, vec![(0, 1), (0, 1), (0, 1)])
    }

    fn square() -> Graph {
        bare(4, vec![(0, 1), (0, 3), (1, 2), (2, 3)])
    }

    fn dumbbell() -> Graph {
        bare(2, vec![(0, 0), (0, 1), (1, 1)])
    }

    fn zoo() -> Vec<Graph> {
        vec![loop_graph(), banana(), theta(), square(), dumbbell()]
    }

    #[test]
    fn zero_class_round_trip() {
        for g in zoo() {
            for delta in [1u32, 2, 3] {
                let sub = SubdividedGraph::new(g.clone(), delta).unwrap();
                let zero = TropicalDivisor::zero(&sub);
                let class = classify(&sub, &zero).unwrap();
                assert!(class.is_zero());
                let rep = canonical_rep(&sub, class.vector()).unwrap();
                assert!(rep.is_zero());
                let alpha = solve_alpha(&sub, &zero).unwrap();
                assert!((0..sub.n_nodes()).all(|v| alpha.value(v).is_zero()));
            }
        }
    }

    #[test]
    fn loop_worked_example() {
        // δ = 2, class 1: midpoint minus base vertex, α rising to ℓ/2.
        let sub = SubdividedGraph::new(loop_graph(), 2).unwrap();
        let rep = canonical_rep(&sub, &[1]).unwrap();
        assert_eq!(rep.values(), &[-1, 1]);
        let class = classify(&sub, &rep).unwrap();
        assert_eq!(class.vector(), &[1]);
        let alpha = solve_alpha(&sub, &rep).unwrap();
        assert!(alpha.value(0).is_zero());
        assert_eq!(alpha.value(1).coeff(0), rat(1, 2));
        assert_eq!(alpha.slopes()[0], vec![1, -1]);
        // 𝔏 = k(δ−k)ℓ/δ² = ℓ/4.
        let l = l_form(&sub, &rep, &alpha);
        assert_eq!(l.coeff(0), rat(1, 4));
    }

    #[test]
    fn loop_general_order() {
        // δ = 5, class k = 2: slopes 3,3,−2,−2,−2 and peak value 6ℓ/5.
        let sub = SubdividedGraph::new(loop_graph(), 5).unwrap();
        let rep = canonical_rep(&sub, &[2]).unwrap();
        let alpha = solve_alpha(&sub, &rep).unwrap();
        assert_eq!(alpha.slopes()[0], vec![3, 3, -2, -2, -2]);
        assert_eq!(alpha.value(sub.node(0, 2)).coeff(0), rat(6, 5));
        assert_eq!(l_form(&sub, &rep, &alpha).coeff(0), rat(2 * 3, 25));
        for k in 0..5i64 {
            let rep = canonical_rep(&sub, &[k]).unwrap();
            let alpha = solve_alpha(&sub, &rep).unwrap();
            assert_eq!(
                l_form(&sub, &rep, &alpha).coeff(0),
                rat(k * (5 - k), 25),
                "k = {k}"
            );
        }
    }

    #[test]
    fn classify_sections_canonical_rep() {
        for g in zoo() {
            for delta in [2u32, 3] {
                let sub = SubdividedGraph::new(g.clone(), delta).unwrap();
                let mut seen = std::collections::BTreeSet::new();
                for v in class_vectors(delta, g.b1()) {
                    let rep = canonical_rep(&sub, &v).unwrap();
                    let class = classify(&sub, &rep).unwrap();
                    assert_eq!(class.vector(), v.as_slice(), "graph {g:?} δ={delta}");
                    seen.insert(v);
                }
                assert_eq!(seen.len(), (delta as usize).pow(g.b1() as u32));
            }
        }
    }

    #[test]
    fn alpha_witnesses_delta_d() {
        for g in zoo() {
            for delta in [2u32, 3, 4] {
                let sub = SubdividedGraph::new(g.clone(), delta).unwrap();
                for v in class_vectors(delta, g.b1()) {
                    let rep = canonical_rep(&sub, &v).unwrap();
                    let alpha = solve_alpha(&sub, &rep).unwrap();
                    assert_eq!(
                        alpha.div(&sub),
                        rep.scale(i64::from(delta)),
                        "div(α) = δD for {v:?} on {g:?}"
                    );
                    for orig in 0..g.n_vertices() {
                        assert!(alpha.value(orig).is_zero());
                    }
                }
            }
        }
    }

    /// A random integral PL function: independent slopes on each edge with
    /// zero rise, so its divisor is principal by construction.
    fn random_principal(sub: &SubdividedGraph, rng: &mut ChaCha8Rng) -> TropicalDivisor {
        let d = sub.delta() as usize;
        let slopes: Vec<Vec<i64>> = (0..sub.base().n_edges())
            .map(|_| {
                let mut t: Vec<i64> = (0..d - 1).map(|_| rng.gen_range(-3..=3)).collect();
                let total: i64 = t.iter().sum();
                t.push(-total);
                t
            })
            .collect();
        TropicalDivisor {
            values: divisor_of_slopes(sub, &slopes),
        }
    }

    #[test]
    fn classes_are_stable_under_principal_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut instances = 0;
        while instances < 50 {
            for g in zoo() {
                for delta in [2u32, 3] {
                    let sub = SubdividedGraph::new(g.clone(), delta).unwrap();
                    let vecs = class_vectors(delta, g.b1());
                    let v = &vecs[rng.gen_range(0..vecs.len())];
                    let rep = canonical_rep(&sub, v).unwrap();
                    let shifted = rep.add(&random_principal(&sub, &mut rng));
                    assert_eq!(classify(&sub, &shifted).unwrap().vector(), v.as_slice());
                    assert!(is_equivalent(&sub, &shifted, &rep));
                    // a different class never compares equivalent
                    let w = &vecs[rng.gen_range(0..vecs.len())];
                    if w != v {
                        let other = canonical_rep(&sub, w).unwrap();
                        assert!(!is_equivalent(&sub, &shifted, &other));
                    }
                    instances += 1;
                }
            }
        }
    }

    #[test]
    fn non_torsion_is_rejected() {
        // On the banana, midpoint-minus-vertex has no 2-torsion witness.
        let sub = SubdividedGraph::new(banana(), 2).unwrap();
        let mut d = TropicalDivisor::zero(&sub);
        d.set(sub.node(1, 1), 1);
        d.set(0, -1);
        let err = classify(&sub, &d).unwrap_err();
        assert!(err.to_string().contains("not δ-torsion"), "{err}");
        // Degree obstruction reported the same way.
        let mut bad = TropicalDivisor::zero(&sub);
        bad.set(0, 1);
        assert!(classify(&sub, &bad).is_err());
        // δ = 1: only the zero class, so v₁ − v₀ is not 1-torsion.
        let sub1 = SubdividedGraph::new(banana(), 1).unwrap();
        let mut d1 = TropicalDivisor::zero(&sub1);
        d1.set(0, -1);
        d1.set(1, 1);
        assert!(classify(&sub1, &d1).is_err());
    }

    #[test]
    fn move_off_single_edge() {
        let g = bare(2, vec![(0, 1)]);
        let (sub, out) = move_off_vertices(&g, &[1, -1]).unwrap();
        assert_eq!(sub.delta(), 3);
        // charge 3 at the first interior node, −3 at the second
        assert_eq!(out.value(0), 0);
        assert_eq!(out.value(1), 0);
        assert_eq!(out.value(sub.node(0, 1)), 3);
        assert_eq!(out.value(sub.node(0, 2)), -3);
        // equivalent to the pullback of the input
        let mut pullback = TropicalDivisor::zero(&sub);
        pullback.set(0, 1);
        pullback.set(1, -1);
        assert!(is_equivalent(&sub, &out, &pullback));
    }

    #[test]
    fn move_off_general_graphs() {
        for (g, d) in [
            (theta(), vec![2, -2]),
            (square(), vec![1, -3, 2, 0]),
            (dumbbell(), vec![5, -5]),
        ] {
            let (sub, out) = move_off_vertices(&g, &d).unwrap();
            for v in 0..g.n_vertices() {
                assert_eq!(out.value(v), 0, "support must avoid the originals");
            }
            let mut pullback = TropicalDivisor::zero(&sub);
            for (v, &c) in d.iter().enumerate() {
                pullback.set(v, c);
            }
            assert!(is_equivalent(&sub, &out, &pullback));
        }
        // no edges: only the zero divisor can be moved
        let point = bare(1, vec![]);
        assert!(move_off_vertices(&point, &[0]).is_ok());
        let two = Graph::new(
            vec![VertexData { genus: 1, degree: 0 }],
            vec![],
            vec![],
        )
        .unwrap();
        assert!(move_off_vertices(&two, &[1]).is_err());
    }

    /// Push a divisor through the contraction of base edge `e`: interior
    /// charges of `e` and both endpoint charges land on the merged vertex.
    fn contract_divisor(
        g: &Graph,
        delta: u32,
        d: &TropicalDivisor,
        e: usize,
    ) -> (SubdividedGraph, TropicalDivisor) {
        let (a, b) = g.edge(e);
        let contracted = g.contract_edge(e);
        let sub_old = SubdividedGraph::new(g.clone(), delta).unwrap();
        let sub_new = SubdividedGraph::new(contracted, delta).unwrap();
        let reindex = |v: usize| {
            if a == b {
                v
            } else if v == b {
                a
            } else if v > b {
                v - 1
            } else {
                v
            }
        };
        let mut values = vec![0i64; sub_new.n_nodes()];
        for node in 0..sub_old.n_nodes() {
            let v = d.value(node);
            if v == 0 {
                continue;
            }
            match sub_old.interior_position(node) {
                None => values[reindex(node)] += v,
                Some((f, j)) => {
                    if f == e {
                        values[reindex(a)] += v;
                    } else {
                        let nf = if f > e { f - 1 } else { f };
                        // a flipped stored orientation mirrors the interior
                        let (x, y) = g.edge(f);
                        let nj = if reindex(x) > reindex(y) {
                            delta as usize - j
                        } else {
                            j
                        };
                        values[sub_new.node(nf, nj)] += v;
                    }
                }
            }
        }
        let out = TropicalDivisor { values };
        (sub_new, out)
    }

    #[test]
    fn contraction_commutes_with_classify() {
        for g in zoo() {
            for delta in [2u32, 3] {
                let sub = SubdividedGraph::new(g.clone(), delta).unwrap();
                for v in class_vectors(delta, g.b1()) {
                    let rep = canonical_rep(&sub, &v).unwrap();
                    let class = classify(&sub, &rep).unwrap();
                    for e in 0..g.n_edges() {
                        let transported = contract_class(&class, e).unwrap();
                        let (sub_new, pushed) = contract_divisor(&g, delta, &rep, e);
                        let direct = classify(&sub_new, &pushed).unwrap_or_else(|err| {
                            panic!("pushforward stays torsion ({g:?}, e={e}, {v:?}): {err}")
                        });
                        assert_eq!(
                            direct.vector(),
                            transported.vector(),
                            "graph {g:?} δ={delta} class {v:?} edge {e}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn divisor_json_is_sparse() {
        let sub = SubdividedGraph::new(loop_graph(), 2).unwrap();
        let rep = canonical_rep(&sub, &[1]).unwrap();
        let js = rep.to_json(&sub);
        assert_eq!(js.as_array().unwrap().len(), 2);
        assert_eq!(js[0]["vertex"], 0);
        assert_eq!(js[0]["value"], -1);
        assert_eq!(js[1]["edge"], 0);
        assert_eq!(js[1]["index"], 1);
    }

    #[test]
    fn lin_form_arithmetic() {
        let mut f = LinForm::zero();
        f.add_term(0, rat(1, 2));
        f.add_term(2, rat_int(3));
        let g = f.scale(&rat_int(2));
        assert_eq!(g.coeff(0), rat_int(1));
        assert_eq!(g.coeff(2), rat_int(6));
        let h = f.add(&f.scale(&rat_int(-1)));
        assert!(h.is_zero());
    }
}
