//! Weighting sums, constant-term extraction, and the piecewise polynomial
//! classes carried by a correlated fan.
//!
//! A weighting of level `r` on a subdivided graph assigns a residue in
//! `[0, r)` to every segment half-edge so that the two halves of a segment
//! sum to `0 mod r`, legs carry their prescribed slopes, and the half-edge
//! values around each node sum to the divisor value there. The interior
//! conditions telescope along every base edge, which reduces the whole
//! system to a mod-`r` flow problem on the base graph: one unknown per base
//! edge, one demand per base vertex. A spanning-tree peel produces a base
//! solution and the fundamental cycles sweep out the remaining `r^{b₁}`
//! degrees of freedom.
//!
//! For a δ-torsion divisor the conditions are realized inside `(1/δ)·Z`
//! rather than `Z`: the normalized witness of `δ·D` contributes a fixed
//! offset `−σ/δ` on every segment, so each edge carries a constant
//! fractional part while an integer flow for the leg slopes alone sweeps
//! the torsor. Divisors without a normalized witness fall back to the
//! plain integer weightings with the divisor itself as divergence.
//!
//! The generating sums of products of segment weights are, for `r` past an
//! explicit threshold, polynomial in `r`; the constant-term polynomial `P`
//! is extracted by exact Lagrange interpolation on an oversampled window
//! whose fit is re-checked on extra nodes. Together with the linear damping
//! term `L` this yields the cone contributions, which are assembled over
//! all monodromy strata into a piecewise polynomial and cross-checked by
//! restriction–contraction gluing.

use std::cmp::Reverse;
use std::sync::Arc;

use num_traits::Zero;

use crate::abelian::Subgroup;
use crate::error::Error;
use crate::exact::rational;
use crate::exact::{
    eval_at_r, interpolate_checked, rat, rat_int, Monomial, Rat, TruncPoly, VarTable,
};
use crate::graphs::{isomorphisms, GraphMap, SubdividedGraph};
use crate::monodromy::{enumerate_corr0_cones, enumerate_strata, Corr0Cone, MonodromyGraph};
use crate::tropical::{canonical_rep, classify, l_form, solve_alpha, LinForm, TropicalDivisor};
use crate::Result;

/// Length variables `l0..l{n-1}`, one per base edge.
pub(crate) fn l_table(n_edges: usize) -> Arc<VarTable> {
    VarTable::new((0..n_edges).map(|e| format!("l{e}")))
}

/// Cotangent variables `psi1..psin`, one per marking.
pub(crate) fn psi_table(n_legs: usize) -> Arc<VarTable> {
    VarTable::new((1..=n_legs).map(|i| format!("psi{i}")))
}

fn linform_poly(form: &LinForm, vars: &Arc<VarTable>, bound: u32) -> TruncPoly {
    TruncPoly::from_terms(
        vars,
        bound,
        form.terms().map(|(&e, c)| {
            let mut m = vec![0u32; vars.len()];
            m[e] = 1;
            (Monomial(m), c.clone())
        }),
    )
}

/// All exponent vectors of length `n` with total degree at most `bound`.
fn multi_indices(n: usize, bound: u32) -> Vec<Vec<u32>> {
    fn go(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            go(pos + 1, left - v, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    go(0, bound, &mut cur, &mut out);
    out
}

/// A single level-`r` weighting: the tail residue of every segment, in base
/// edge order and tail → head segment order. The head residue is determined
/// as the complement mod `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weighting {
    r: i64,
    tails: Vec<Vec<i64>>,
    legs: Vec<i64>,
}

impl Weighting {
    pub fn r(&self) -> i64 {
        self.r
    }

    /// Tail half-edge residue of segment `i` of base edge `e`.
    pub fn tail(&self, e: usize, i: usize) -> i64 {
        self.tails[e][i]
    }

    /// Head half-edge residue of segment `i` of base edge `e`.
    pub fn head(&self, e: usize, i: usize) -> i64 {
        (self.r - self.tails[e][i]).rem_euclid(self.r)
    }

    /// Residue carried by leg `j`.
    pub fn leg(&self, j: usize) -> i64 {
        self.legs[j]
    }

    /// `Σ_i tail·head` over the segments of base edge `e`.
    pub fn edge_pair_sum(&self, e: usize) -> i64 {
        (0..self.tails[e].len())
            .map(|i| self.tail(e, i) * self.head(e, i))
            .sum()
    }

    /// Full re-check of the defining conditions against independent data.
    pub fn is_valid(&self, sub: &SubdividedGraph, div: &TropicalDivisor, legs: &[i64]) -> bool {
        let base = sub.base();
        let delta = sub.delta() as usize;
        if self.tails.len() != base.n_edges()
            || self.tails.iter().any(|t| t.len() != delta)
            || self.legs.len() != base.n_legs()
            || legs.len() != base.n_legs()
            || div.values().len() != sub.n_nodes()
        {
            return false;
        }
        if self.tails.iter().flatten().any(|&t| !(0..self.r).contains(&t)) {
            return false;
        }
        if self
            .legs
            .iter()
            .zip(legs)
            .any(|(&w, &a)| w != a.rem_euclid(self.r))
        {
            return false;
        }
        let mut acc = vec![0i64; sub.n_nodes()];
        for e in 0..base.n_edges() {
            for i in 0..delta {
                let (u, v) = sub.segment(e, i);
                acc[u] += self.tail(e, i);
                acc[v] += self.head(e, i);
            }
        }
        for (j, &w) in self.legs.iter().enumerate() {
            acc[base.legs()[j]] += w;
        }
        (0..sub.n_nodes()).all(|u| (acc[u] - div.value(u)).rem_euclid(self.r) == 0)
    }
}

/// The solved mod-`r` flow system behind a weighting enumeration: interior
/// prefixes per edge, a base solution on a spanning tree, and the
/// fundamental cycle sweeps.
struct WeightingSystem {
    r: i64,
    delta: usize,
    prefix: Vec<Vec<i64>>,
    x0: Vec<i64>,
    cycles: Vec<Vec<i64>>,
    solvable: bool,
}

fn weighting_system(
    sub: &SubdividedGraph,
    div: &TropicalDivisor,
    legs: &[i64],
    r: i64,
) -> Result<WeightingSystem> {
    if r <= 0 {
        return Err(Error::config("weighting level r must be positive"));
    }
    let base = sub.base();
    if legs.len() != base.n_legs() {
        return Err(Error::config("one slope per leg is required"));
    }
    if div.values().len() != sub.n_nodes() {
        return Err(Error::config("divisor does not live on this subdivision"));
    }
    let delta = sub.delta() as usize;
    let (nv, ne) = (base.n_vertices(), base.n_edges());

    // interior prefix sums: the tail residue of segment i exceeds the edge
    // unknown by prefix[e][i]
    let mut prefix = vec![vec![0i64; delta]; ne];
    for (e, p) in prefix.iter_mut().enumerate() {
        for i in 1..delta {
            p[i] = p[i - 1] + div.value(sub.node(e, i));
        }
    }

    // vertex demands: Σ_head x − Σ_tail x ≡ b(v)
    let mut b = vec![0i64; nv];
    for (v, demand) in b.iter_mut().enumerate() {
        *demand = -div.value(v);
        for label in base.legs_at(v) {
            *demand += legs[label - 1];
        }
    }
    for e in 0..ne {
        b[base.edge(e).1] -= prefix[e][delta - 1];
    }

    // spanning-tree peel, deepest vertices first
    let (_, parent) = base.bfs_tree();
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
    order.sort_by_key(|&v| Reverse(depth[v]));

    let mut x0 = vec![0i64; ne];
    let mut res = b;
    for &v in &order {
        let (p, e) = parent[v].expect("non-root");
        let (_, h) = base.edge(e);
        let coef = if h == v { 1 } else { -1 };
        x0[e] = (coef * res[v]).rem_euclid(r);
        res[v] = 0;
        res[p] = (res[p] + coef * x0[e]).rem_euclid(r);
    }
    let solvable = res[0].rem_euclid(r) == 0;

    Ok(WeightingSystem {
        r,
        delta,
        prefix,
        x0,
        cycles: base.cycle_basis(),
        solvable,
    })
}

impl WeightingSystem {
    /// Visit the per-edge unknowns of every solution, in odometer order
    /// over the fundamental cycle sweeps.
    fn sweep<F: FnMut(&[i64])>(&self, mut f: F) {
        if !self.solvable {
            return;
        }
        let ne = self.x0.len();
        let b1 = self.cycles.len();
        let mut free = vec![0i64; b1];
        let mut x = vec![0i64; ne];
        loop {
            for (e, slot) in x.iter_mut().enumerate() {
                let mut v = self.x0[e];
                for (fj, cycle) in free.iter().zip(&self.cycles) {
                    v += fj * cycle[e];
                }
                *slot = v.rem_euclid(self.r);
            }
            f(&x);
            let mut j = b1;
            loop {
                if j == 0 {
                    return;
                }
                free[j - 1] += 1;
                if free[j - 1] < self.r {
                    break;
                }
                free[j - 1] = 0;
                j -= 1;
            }
        }
    }

    /// Visit the tail-residue table of every weighting.
    fn for_each<F: FnMut(&[Vec<i64>])>(&self, mut f: F) {
        let mut tails = vec![vec![0i64; self.delta]; self.x0.len()];
        self.sweep(|x| {
            for (e, row) in tails.iter_mut().enumerate() {
                for (i, t) in row.iter_mut().enumerate() {
                    *t = (x[e] + self.prefix[e][i]).rem_euclid(self.r);
                }
            }
            f(&tails);
        });
    }
}

/// All level-`r` weightings for the given divisor and leg slopes. The list
/// is empty exactly when the leg sum and the divisor degree disagree mod
/// `r`; otherwise it has `r^{b₁}` entries.
pub fn enumerate_weightings(
    sub: &SubdividedGraph,
    div: &TropicalDivisor,
    legs: &[i64],
    r: i64,
) -> Result<Vec<Weighting>> {
    let sys = weighting_system(sub, div, legs, r)?;
    let reduced: Vec<i64> = legs.iter().map(|a| a.rem_euclid(r)).collect();
    let mut out = Vec::new();
    sys.for_each(|tails| {
        out.push(Weighting {
            r,
            tails: tails.to_vec(),
            legs: reduced.clone(),
        })
    });
    Ok(out)
}

/// Per-segment offsets of the normalized witness for `δ·div`, split into
/// whole and fractional parts: segment `i` of edge `e` is offset by
/// `−σ/δ = whole[e][i] + part[e][i]/δ` with `part[e][i]` in `[0, δ)`.
/// `None` when no witness vanishing on the base vertices exists.
fn witness_offsets(
    sub: &SubdividedGraph,
    div: &TropicalDivisor,
) -> Option<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let alpha = solve_alpha(sub, div).ok()?;
    let delta = i64::from(sub.delta());
    let mut whole = Vec::with_capacity(sub.base().n_edges());
    let mut part = Vec::with_capacity(sub.base().n_edges());
    for row in alpha.slopes() {
        whole.push(row.iter().map(|&s| (-s).div_euclid(delta)).collect());
        part.push(row.iter().map(|&s| (-s).rem_euclid(delta)).collect());
    }
    Some((whole, part))
}

/// The normalized weighting sum at level `r`: the coefficient of `Πℓ^α` is
/// `r^{-b₁} Σ_w Π_e W_e(w)^{α_e}/α_e!` where `W_e` is the tail·head sum
/// over the segments of `e`, divided by `2δ`. A torsion divisor is
/// realized by the fractional offsets of its witness, so the residues live
/// in `(1/δ)·Z`; a divisor without a witness is realized by plain integer
/// residues. An unsolvable system gives the zero polynomial.
pub fn weighting_sum(
    sub: &SubdividedGraph,
    div: &TropicalDivisor,
    legs: &[i64],
    r: i64,
    trunc: u32,
) -> Result<TruncPoly> {
    let vars = l_table(sub.base().n_edges());
    weighting_sum_in(sub, div, legs, r, trunc, &vars)
}

fn weighting_sum_in(
    sub: &SubdividedGraph,
    div: &TropicalDivisor,
    legs: &[i64],
    r: i64,
    trunc: u32,
    vars: &Arc<VarTable>,
) -> Result<TruncPoly> {
    // scaled segment residues: s = scale·((x + whole) mod r) + part lives
    // in [0, scale·r) and stands for the value s/scale of the weighting
    let (sys, whole, part, scale) = match witness_offsets(sub, div) {
        Some((whole, part)) => {
            let zero = TropicalDivisor::zero(sub);
            let sys = weighting_system(sub, &zero, legs, r)?;
            (sys, whole, part, i64::from(sub.delta()))
        }
        None => {
            let sys = weighting_system(sub, div, legs, r)?;
            let whole = sys.prefix.clone();
            let part = vec![vec![0i64; sys.delta]; sys.x0.len()];
            (sys, whole, part, 1)
        }
    };
    let ne = sub.base().n_edges();
    let b1 = sub.base().b1();
    let delta = sys.delta;
    let alphas = multi_indices(ne, trunc);
    let mut sums = vec![0i128; alphas.len()];
    let mut overflow = false;
    sys.sweep(|x| {
        let w: Vec<i128> = (0..ne)
            .map(|e| {
                (0..delta)
                    .map(|i| {
                        let s = scale * (x[e] + whole[e][i]).rem_euclid(r) + part[e][i];
                        i128::from(s) * i128::from(scale * r - s)
                    })
                    .sum()
            })
            .collect();
        for (acc, alpha) in sums.iter_mut().zip(&alphas) {
            let mut prod: i128 = 1;
            'factors: for (e, &k) in alpha.iter().enumerate() {
                for _ in 0..k {
                    match prod.checked_mul(w[e]) {
                        Some(p) => prod = p,
                        None => {
                            overflow = true;
                            break 'factors;
                        }
                    }
                }
            }
            match acc.checked_add(prod) {
                Some(s) => *acc = s,
                None => overflow = true,
            }
        }
    });
    if overflow {
        return Err(Error::resource("weighting sum exceeds the integer accumulator"));
    }
    let norm = rational::pow(&rat_int(r), b1 as i64);
    let step = rat_int(2 * i64::from(sub.delta()) * scale * scale);
    let terms = alphas.into_iter().zip(sums).map(|(alpha, total)| {
        let mut denom = norm.clone();
        for &k in &alpha {
            for j in 1..=i64::from(k) {
                denom *= rat_int(j);
            }
        }
        let degree: i64 = alpha.iter().map(|&k| i64::from(k)).sum();
        denom *= rational::pow(&step, degree);
        (Monomial(alpha), Rat::from_integer(total.into()) / denom)
    });
    Ok(TruncPoly::from_terms(vars, trunc, terms))
}

/// The constant term in `r` of the weighting sum, as a polynomial in the
/// edge lengths: sample levels `r₀ + iδ` past the polynomiality threshold,
/// interpolate exactly, re-check the fit on extra nodes, and evaluate at
/// `r = 0`.
pub fn p_constant_term(
    sub: &SubdividedGraph,
    div: &TropicalDivisor,
    legs: &[i64],
    trunc: u32,
) -> Result<TruncPoly> {
    let vars = l_table(sub.base().n_edges());
    p_constant_term_in(sub, div, legs, trunc, &vars, 0)
}

/// [`p_constant_term`] with `pad` extra interpolation nodes. The window
/// already sits past the last breakpoint, so the answer must not depend on
/// `pad` — which makes the window bound itself testable.
pub fn p_constant_term_padded(
    sub: &SubdividedGraph,
    div: &TropicalDivisor,
    legs: &[i64],
    trunc: u32,
    pad: usize,
) -> Result<TruncPoly> {
    let vars = l_table(sub.base().n_edges());
    p_constant_term_in(sub, div, legs, trunc, &vars, pad)
}

fn p_constant_term_in(
    sub: &SubdividedGraph,
    div: &TropicalDivisor,
    legs: &[i64],
    trunc: u32,
    vars: &Arc<VarTable>,
    pad: usize,
) -> Result<TruncPoly> {
    let delta = i64::from(sub.delta());
    let b1 = sub.base().b1();
    // every tree-edge residue is an affine branch of r once r exceeds the
    // tree flows plus the largest offset, so this window start is provably
    // past the last breakpoint
    let total_legs: i64 = legs.iter().map(|a| a.abs()).sum();
    let r0 = match witness_offsets(sub, div) {
        Some((whole, _)) => {
            let n_max = whole.iter().flatten().map(|n| n.abs()).max().unwrap_or(0);
            total_legs + 2 * n_max + 2
        }
        None => {
            let total_div: i64 = div.values().iter().map(|v| v.abs()).sum();
            total_legs + delta * total_div + 2
        }
    };
    let dmax = 2 * trunc as usize + b1 + 2 + pad;
    let mut nodes = Vec::with_capacity(dmax + 5);
    for i in 0..dmax + 5 {
        let r = r0 + (i as i64) * delta;
        nodes.push((rat_int(r), weighting_sum_in(sub, div, legs, r, trunc, vars)?));
    }
    let extra = nodes.split_off(dmax + 3);
    let fit = interpolate_checked(&nodes, &extra, "r")
        .map_err(|e| Error::domain(format!("interpolation window too small: {e}")))?;
    Ok(eval_at_r(&fit, &Rat::zero(), vars, trunc))
}

/// The linear damping form of a cone, evaluated on the canonical
/// representative of its divisor class.
pub fn l_function(cone: &Corr0Cone) -> Result<TruncPoly> {
    let vars = l_table(cone.base.graph().n_edges());
    let (sub, rep) = cone.class.representative()?;
    let alpha = solve_alpha(&sub, &rep)?;
    Ok(linform_poly(&l_form(&sub, &rep, &alpha), &vars, 1))
}

fn contribution_from(
    sub: &SubdividedGraph,
    div: &TropicalDivisor,
    legs: &[i64],
    trunc: u32,
    vars: &Arc<VarTable>,
) -> Result<TruncPoly> {
    // the damping form and the constant term glue across cones only for
    // the preferred divisor, so reduce to the canonical representative
    // before evaluating either factor
    let class = classify(sub, div)?;
    let rep = canonical_rep(sub, class.vector())?;
    let alpha = solve_alpha(sub, &rep)?;
    let damping = linform_poly(&l_form(sub, &rep, &alpha), vars, trunc)
        .scale(&rat(-1, 2))
        .exp()?;
    damping.try_mul(&p_constant_term_in(sub, &rep, legs, trunc, vars, 0)?)
}

/// `exp(−L/2)·P` for one cone of the correlated fan, evaluated on the
/// canonical representative of the divisor class; handing in any other
/// representative of the same class gives the identical polynomial.
pub fn cone_contribution(cone: &Corr0Cone, legs: &[i64], trunc: u32) -> Result<TruncPoly> {
    let vars = l_table(cone.base.graph().n_edges());
    let (sub, rep) = cone.class.representative()?;
    contribution_from(&sub, &rep, legs, trunc, &vars)
}

/// A cone of the assembled fan: a monodromy stratum together with its
/// polynomial in the edge lengths, prefactor included.
#[derive(Debug, Clone)]
pub struct Cone {
    pub stratum: MonodromyGraph,
    pub poly: TruncPoly,
}

/// A piecewise polynomial over a correlated fan, one cone per monodromy
/// stratum.
#[derive(Debug, Clone)]
pub struct PiecewisePolynomial {
    fan: Vec<Cone>,
    trunc: u32,
}

impl PiecewisePolynomial {
    pub fn fan(&self) -> &[Cone] {
        &self.fan
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "trunc": self.trunc,
            "fan": self.fan.iter().map(|c| serde_json::json!({
                "stratum": c.stratum.to_json(),
                "lengths": c.poly.vars().names(),
                "poly": c.poly.to_text(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Assemble the piecewise polynomial of the correlated locus: enumerate
/// all monodromy strata, and on each one sum the cone contributions over
/// the right kernel, scaled by `δ^{2g−2q−b₁}·|K̃|`. Automorphism factors
/// are left to the summation layer.
#[allow(clippy::too_many_arguments)]
pub fn assemble_drk(
    genus: u32,
    legs: &[i64],
    degree: u32,
    delta: u32,
    q: usize,
    core: &Subgroup,
    trunc: u32,
    cap: usize,
) -> Result<PiecewisePolynomial> {
    if legs.iter().sum::<i64>() != 0 {
        return Err(Error::config("leg slopes must sum to zero"));
    }
    if core.delta() != delta || core.rank() != 2 * q {
        return Err(Error::config(
            "the correlation core must live in the ambient torsion group",
        ));
    }
    let strata = enumerate_strata(genus, legs.len(), degree, delta, q, core, cap)?;
    let mut fan = Vec::with_capacity(strata.len());
    for mg in strata {
        let vars = l_table(mg.graph().n_edges());
        let exponent =
            2 * i64::from(genus) - 2 * (q as i64) - (mg.graph().b1() as i64);
        let prefactor = rational::pow(&rat_int(i64::from(delta)), exponent)
            * Rat::from_integer(mg.kernel().order().into());
        let mut total = TruncPoly::zero(&vars, trunc);
        for cone in enumerate_corr0_cones(&mg) {
            total = total.try_add(&cone_contribution(&cone, legs, trunc)?)?;
        }
        fan.push(Cone {
            stratum: mg,
            poly: total.scale(&prefactor),
        });
    }
    Ok(PiecewisePolynomial { fan, trunc })
}

/// Outcome of the restriction–contraction check.
#[derive(Debug, Clone)]
pub struct GluingReport {
    pub ok: bool,
    pub counterexample: Option<String>,
}

impl GluingReport {
    fn fail(msg: String) -> Self {
        GluingReport {
            ok: false,
            counterexample: Some(msg),
        }
    }
}

enum MatchOutcome {
    Equal,
    NoCone,
    Differs(usize, String, String),
}

fn phi_transported(contracted: &MonodromyGraph, cand: &MonodromyGraph, sigma: &GraphMap) -> bool {
    let delta = i64::from(cand.ambient().delta);
    let basis = contracted.graph().cycle_basis();
    let tree = cand.graph().spanning_tree();
    let nontree: Vec<usize> = (0..cand.graph().n_edges()).filter(|&f| !tree[f]).collect();
    contracted
        .phi()
        .iter()
        .zip(cand.phi())
        .all(|(crow, krow)| {
            basis.iter().zip(crow).all(|(gamma, &want)| {
                let image = sigma.act_on_edge_vector(gamma);
                let got: i64 = nontree
                    .iter()
                    .zip(krow)
                    .map(|(&f, &p)| image[f] * p)
                    .sum();
                (got - want).rem_euclid(delta) == 0
            })
        })
}

fn find_matching_cone(
    pp: &PiecewisePolynomial,
    contracted: &MonodromyGraph,
    dropped: usize,
    restricted: &TruncPoly,
) -> MatchOutcome {
    let cg = contracted.graph();
    let mut differs = None;
    for (cj, cand) in pp.fan.iter().enumerate() {
        if cand.stratum.kernel() != contracted.kernel()
            || cand.stratum.graph().n_edges() != cg.n_edges()
        {
            continue;
        }
        for sigma in isomorphisms(cg, cand.stratum.graph()) {
            if !phi_transported(contracted, &cand.stratum, &sigma) {
                continue;
            }
            // dropped variable never appears with positive exponent after
            // the restriction, so its image slot is arbitrary
            let map: Vec<usize> = (0..cg.n_edges() + 1)
                .map(|f| match f.cmp(&dropped) {
                    std::cmp::Ordering::Less => sigma.edge_map[f],
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => sigma.edge_map[f - 1],
                })
                .collect();
            let transported = restricted.map_vars(cand.poly.vars(), &map);
            if transported == cand.poly {
                return MatchOutcome::Equal;
            }
            differs = Some((cj, transported.to_text(), cand.poly.to_text()));
        }
    }
    match differs {
        Some((cj, got, want)) => MatchOutcome::Differs(cj, got, want),
        None => MatchOutcome::NoCone,
    }
}

/// Check that the fan polynomials glue: for every cone and every edge, the
/// restriction of the cone polynomial to zero edge length must transport to
/// the polynomial on the contracted stratum, under some graph isomorphism
/// compatible with the monodromy decorations.
pub fn verify_gluing(pp: &PiecewisePolynomial) -> GluingReport {
    for (ci, cone) in pp.fan.iter().enumerate() {
        for e in 0..cone.stratum.graph().n_edges() {
            let restricted = cone.poly.substitute(e, &Rat::zero());
            let contracted = match cone.stratum.contract(e) {
                Ok(mg) => mg,
                Err(err) => {
                    return GluingReport::fail(format!(
                        "cone {ci}, edge {e}: contraction failed: {err}"
                    ))
                }
            };
            match find_matching_cone(pp, &contracted, e, &restricted) {
                MatchOutcome::Equal => {}
                MatchOutcome::NoCone => {
                    return GluingReport::fail(format!(
                        "cone {ci}, edge {e}: the contracted stratum has no cone in the fan"
                    ))
                }
                MatchOutcome::Differs(cj, got, want) => {
                    return GluingReport::fail(format!(
                        "cone {ci}, edge {e}: restriction {got} differs from cone {cj} value {want}"
                    ))
                }
            }
        }
    }
    GluingReport {
        ok: true,
        counterexample: None,
    }
}

/// The full correlated class: a global cotangent prefactor and one
/// piecewise polynomial per requested core subgroup.
#[derive(Debug, Clone)]
pub struct CorrelatedDRClass {
    pub genus: u32,
    pub a: Vec<i64>,
    pub delta: u32,
    pub q: usize,
    pub trunc: u32,
    pub prefactor: TruncPoly,
    pub pieces: Vec<(Subgroup, PiecewisePolynomial)>,
}

impl CorrelatedDRClass {
    /// The product of the prefactor with one cone polynomial, in the joint
    /// ring `psi1..psin, l0..l{E−1}`.
    pub fn joint_cone(&self, piece: usize, cone: usize) -> Result<TruncPoly> {
        let pp = &self
            .pieces
            .get(piece)
            .ok_or_else(|| Error::config("no such core piece"))?
            .1;
        let c = pp
            .fan()
            .get(cone)
            .ok_or_else(|| Error::config("no such cone"))?;
        let n = self.a.len();
        let ne = c.stratum.graph().n_edges();
        let mut names: Vec<String> = (1..=n).map(|i| format!("psi{i}")).collect();
        names.extend((0..ne).map(|e| format!("l{e}")));
        let joint = VarTable::new(names);
        let pmap: Vec<usize> = (0..n).collect();
        let emap: Vec<usize> = (n..n + ne).collect();
        self.prefactor
            .map_vars(&joint, &pmap)
            .try_mul(&c.poly.map_vars(&joint, &emap))
    }

    /// The homogeneous degree-`g` part of a joint cone polynomial.
    pub fn degree_part(&self, piece: usize, cone: usize) -> Result<TruncPoly> {
        Ok(self.joint_cone(piece, cone)?.homogeneous_part(self.genus))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "genus": self.genus,
            "a": self.a,
            "delta": self.delta,
            "q": self.q,
            "trunc": self.trunc,
            "prefactor": self.prefactor.to_text(),
            "pieces": self.pieces.iter().map(|(core, pp)| serde_json::json!({
                "core": core.to_json(),
                "drk": pp.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// The correlated class for slope vector `a`: validates the torsion
/// divisibility, attaches the cotangent prefactor `exp(Σ (a_i/δ)²/2·ψ_i)`,
/// and assembles one piecewise polynomial per core. Truncation defaults to
/// the genus.
#[allow(clippy::too_many_arguments)]
pub fn correlated_dr(
    genus: u32,
    a: &[i64],
    degree: u32,
    delta: u32,
    q: usize,
    cores: &[Subgroup],
    trunc: Option<u32>,
    cap: usize,
) -> Result<CorrelatedDRClass> {
    if delta == 0 {
        return Err(Error::config("the torsion level must be positive"));
    }
    if a.iter().sum::<i64>() != 0 {
        return Err(Error::config("leg slopes must sum to zero"));
    }
    let d = i64::from(delta);
    if a.iter().any(|&x| x % d != 0) {
        return Err(Error::domain(
            "the torsion level must divide every leg slope",
        ));
    }
    let trunc = trunc.unwrap_or(genus);
    let legs: Vec<i64> = a.iter().map(|&x| x / d).collect();
    let psis = psi_table(a.len());
    let prefactor = TruncPoly::from_terms(
        &psis,
        trunc,
        legs.iter().enumerate().map(|(i, &s)| {
            let mut m = vec![0u32; legs.len()];
            m[i] = 1;
            (Monomial(m), rat(s * s, 2))
        }),
    )
    .exp()?;
    let mut pieces = Vec::with_capacity(cores.len());
    for core in cores {
        pieces.push((
            core.clone(),
            assemble_drk(genus, &legs, degree, delta, q, core, trunc, cap)?,
        ));
    }
    Ok(CorrelatedDRClass {
        genus,
        a: a.to_vec(),
        delta,
        q,
        trunc,
        prefactor,
        pieces,
    })
}
