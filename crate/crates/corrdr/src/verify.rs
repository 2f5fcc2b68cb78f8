//! Executable acceptance checks shared by the command-line verifier and
//! the integration suite.
//!
//! Each check exercises one published identity end to end and reports a
//! timed pass/fail with a one-line summary, so the same code backs both
//! `corrdr verify` and the acceptance tests. Randomized checks take an
//! explicit seed and are deterministic for a fixed one.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{
    covering_degrees, enumerate_subgroups, jordan_j2, moebius, Subgroup, TorsionAmbient,
};
use crate::elliptic::{genus1_graph_sum, n0_point, n_point, qseries_check, subgroup_sum_n0};
use crate::exact::{rat, rat_int, rational, Monomial};
use crate::graphs::{Graph, SubdividedGraph, VertexData};
use crate::monodromy::{enumerate_strata, stratum_degrees};
use crate::pixton::{
    assemble_drk, enumerate_weightings, p_constant_term, p_constant_term_padded, verify_gluing,
};
use crate::tropical::{
    canonical_rep, class_vectors, classify, is_equivalent, move_off_vertices, solve_alpha,
    TropicalDivisor,
};
use crate::{Error, Result};

/// Seed used by the randomized checks when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 7;

/// Outcome of one named check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub millis: u64,
    pub details: String,
}

fn run_check(name: &'static str, body: impl FnOnce() -> Result<String>) -> CheckResult {
    let start = Instant::now();
    let outcome = body();
    let millis = start.elapsed().as_millis() as u64;
    match outcome {
        Ok(details) => CheckResult {
            name,
            passed: true,
            millis,
            details,
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            millis,
            details: e.to_string(),
        },
    }
}

fn bare(nv: usize, edges: &[(usize, usize)], legs: &[usize]) -> Graph {
    Graph::new(
        vec![VertexData { genus: 0, degree: 0 }; nv],
        edges.to_vec(),
        legs.to_vec(),
    )
    .expect("pool graph is well formed")
}

/// Small base graphs covering b₁ ∈ {1, 2}, loops, parallel edges, bridges,
/// and legs.
fn graph_pool() -> Vec<Graph> {
    vec![
        bare(1, &[(0, 0)], &[]),
        bare(1, &[(0, 0), (0, 0)], &[]),
        bare(2, &[(0, 1), (0, 1)], &[]),
        bare(2, &[(0, 1), (0, 1), (0, 1)], &[]),
        bare(3, &[(0, 1), (1, 2), (0, 2)], &[]),
        bare(2, &[(0, 0), (0, 1), (1, 1)], &[]),
        bare(1, &[(0, 0)], &[0, 0]),
        bare(2, &[(0, 1), (0, 1)], &[0, 1]),
        bare(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], &[]),
        bare(3, &[(0, 1), (0, 1), (1, 2)], &[2]),
    ]
}

fn zero_sum(rng: &mut ChaCha8Rng, len: usize, span: i64) -> Vec<i64> {
    let mut out: Vec<i64> = (0..len).map(|_| rng.gen_range(-span..=span)).collect();
    let total: i64 = out.iter().sum();
    if let Some(last) = out.last_mut() {
        *last -= total;
    }
    out
}

/// The divisor of the integer-valued function `beta` on the nodes of the
/// subdivision: the graph Laplacian, hence principal by construction.
fn principal_shift(sub: &SubdividedGraph, beta: &[i64]) -> TropicalDivisor {
    let mut values = vec![0i64; sub.n_nodes()];
    for e in 0..sub.base().n_edges() {
        for i in 0..sub.delta() as usize {
            let (u, v) = sub.segment(e, i);
            values[u] += beta[v] - beta[u];
            values[v] += beta[u] - beta[v];
        }
    }
    TropicalDivisor::from_values(sub, values).expect("one value per node")
}

/// Correlated point invariants by every route: the two closed
/// presentations cross-assert inside `n0_point`, the lattice sum must
/// agree, and the level-1 column collapses to the plain count.
pub fn check_point_invariants() -> CheckResult {
    run_check("point_invariants", || {
        let mut instances = 0u32;
        for delta in 1..=12u32 {
            let s = i64::from(delta);
            for a in [vec![s, -s], vec![2 * s, -s, -s]] {
                for d in 1..=60u32 {
                    let closed = n0_point(d, &a, delta)?;
                    let lattice = subgroup_sum_n0(d, &a, delta)?;
                    if closed != lattice {
                        return Err(Error::invariant(format!(
                            "lattice sum disagrees at d={d} δ={delta} a={a:?}"
                        )));
                    }
                    if delta == 1 && closed != n_point(d, &a) {
                        return Err(Error::invariant(format!(
                            "level 1 does not reduce to the plain count at d={d} a={a:?}"
                        )));
                    }
                    instances += 1;
                }
            }
        }
        Ok(format!("{instances} instances agree across three sources"))
    })
}

/// q-series coefficients against the closed λ-class forms.
pub fn check_qseries() -> CheckResult {
    run_check("qseries", || {
        let mut rows = 0usize;
        for delta in [1u32, 2] {
            let s = i64::from(delta);
            for a in [vec![s, -s], vec![2 * s, -s, -s]] {
                let report = qseries_check(&a, delta, 4, 12)?;
                if let Some(bad) = report.first_mismatch() {
                    return Err(Error::invariant(format!(
                        "series coefficient u^{{n+2g−2}}y^d at g={} d={} δ={delta} a={a:?} \
                         is {} but the closed form gives {}",
                        bad.g,
                        bad.d,
                        rational::to_text(&bad.series),
                        rational::to_text(&bad.closed),
                    )));
                }
                rows += report.rows.len();
            }
        }
        Ok(format!("{rows} coefficients match the closed forms"))
    })
}

/// The genus-1 stratum pipeline against the plain point count.
pub fn check_genus1_pipeline() -> CheckResult {
    run_check("genus1_pipeline", || {
        let vectors: [&[i64]; 5] = [
            &[2, -2],
            &[1, -1],
            &[3, -1, -2],
            &[2, -1, -1],
            &[1, 1, -1, -1],
        ];
        let mut instances = 0u32;
        for a in vectors {
            for d in 1..=10u32 {
                if genus1_graph_sum(d, a)? != n_point(d, a) {
                    return Err(Error::invariant(format!(
                        "pipeline disagrees with the closed form at d={d} a={a:?}"
                    )));
                }
                instances += 1;
            }
        }
        Ok(format!("{instances} assemblies reproduce the point count"))
    })
}

/// Engine anchors: the classical loop coefficient, weighting counts, and
/// stability of the interpolation window under extra nodes.
pub fn check_pixton_anchors(seed: u64) -> CheckResult {
    run_check("pixton_anchors", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = graph_pool();

        let sub = SubdividedGraph::new(bare(1, &[(0, 0)], &[]), 1)?;
        let p = p_constant_term(&sub, &TropicalDivisor::zero(&sub), &[], 1)?;
        if p.constant_coeff() != rat_int(1) || p.coeff(&Monomial(vec![1])) != rat(-1, 12) {
            return Err(Error::invariant(format!(
                "loop constant term is {}, not 1 − ℓ/12",
                p.to_text()
            )));
        }

        for _ in 0..20 {
            let graph = &pool[rng.gen_range(0..pool.len())];
            let delta = rng.gen_range(1..=3u32);
            let r = rng.gen_range(3..=9i64);
            let sub = SubdividedGraph::new(graph.clone(), delta)?;
            let div =
                TropicalDivisor::from_values(&sub, zero_sum(&mut rng, sub.n_nodes(), 3))?;
            let legs = zero_sum(&mut rng, graph.n_legs(), 5);
            let all = enumerate_weightings(&sub, &div, &legs, r)?;
            let expected = (r as u128).pow(graph.b1() as u32);
            if all.len() as u128 != expected {
                return Err(Error::invariant(format!(
                    "{} weightings instead of r^b₁ = {expected} at r={r} δ={delta}",
                    all.len()
                )));
            }
            if all.iter().any(|w| !w.is_valid(&sub, &div, &legs)) {
                return Err(Error::invariant("an enumerated weighting fails its own conditions"));
            }
        }

        let mut padded = 0u32;
        for graph in [&pool[0], &pool[2], &pool[6]] {
            for delta in [2u32, 3] {
                let sub = SubdividedGraph::new((*graph).clone(), delta)?;
                let legs = vec![2, -2][..graph.n_legs()].to_vec();
                for c in class_vectors(delta, graph.b1()) {
                    let d = canonical_rep(&sub, &c)?;
                    let plain = p_constant_term(&sub, &d, &legs, 1)?;
                    let wide = p_constant_term_padded(&sub, &d, &legs, 1, 3)?;
                    if plain != wide {
                        return Err(Error::invariant(format!(
                            "interpolation drifts with 3 extra nodes at δ={delta} class {c:?}"
                        )));
                    }
                    padded += 1;
                }
            }
        }
        Ok(format!(
            "loop anchor, 20 weighting counts, {padded} stable windows"
        ))
    })
}

/// Restriction–contraction gluing on fully assembled fans, together with
/// the counting-prefactor identity on every contraction.
pub fn check_gluing() -> CheckResult {
    run_check("gluing", || {
        let mut jobs = Vec::new();
        for genus in [1u32, 2] {
            for delta in [2u32, 3] {
                for core in enumerate_subgroups(delta, 2, 64)? {
                    jobs.push((genus, delta, core));
                }
            }
        }
        let outcomes: Vec<Result<usize>> = jobs
            .par_iter()
            .map(|(genus, delta, core)| {
                let pp = assemble_drk(*genus, &[0], 0, *delta, 1, core, 2, 1_000_000)?;
                let d = rat_int(i64::from(*delta));
                for cone in pp.fan() {
                    let mg = &cone.stratum;
                    let here = rat_int(mg.kernel().order() as i64)
                        / rational::pow(&d, mg.graph().b1() as i64)
                        * rat_int(mg.right_kernel().order() as i64);
                    for e in 0..mg.graph().n_edges() {
                        let down = mg.contract(e)?;
                        let there = rat_int(down.kernel().order() as i64)
                            / rational::pow(&d, down.graph().b1() as i64)
                            * rat_int(down.right_kernel().order() as i64);
                        if here != there {
                            return Err(Error::invariant(format!(
                                "prefactor identity fails contracting edge {e} at g={genus} \
                                 δ={delta} core order {}",
                                core.order()
                            )));
                        }
                    }
                }
                let report = verify_gluing(&pp);
                if !report.ok {
                    return Err(Error::invariant(format!(
                        "fan at g={genus} δ={delta} core order {}: {}",
                        core.order(),
                        report.counterexample.unwrap_or_default()
                    )));
                }
                Ok(pp.fan().len())
            })
            .collect();
        let mut cones = 0usize;
        for outcome in outcomes {
            cones += outcome?;
        }
        Ok(format!(
            "{} fans glue, {cones} cones, prefactor identity on every contraction",
            jobs.len()
        ))
    })
}

/// Weil pairing: non-degeneracy, the level-change lemma in ℝ/ℤ form, and
/// orthogonal-complement orders.
pub fn check_weil() -> CheckResult {
    run_check("weil", || {
        for delta in 2..=6u32 {
            let ambient = TorsionAmbient::new(delta, 1)?;
            let n = i64::from(delta);
            let points: Vec<[i64; 2]> = (0..n)
                .flat_map(|x| (0..n).map(move |y| [x, y]))
                .collect();
            for x in &points {
                if x == &[0, 0] {
                    continue;
                }
                if points.iter().all(|y| ambient.weil_pair(x, y).unwrap_or(0) == 0) {
                    return Err(Error::invariant(format!(
                        "pairing degenerates at {x:?} for δ={delta}"
                    )));
                }
            }
            for k in 1..=4i64 {
                let wide = TorsionAmbient::new(delta * k as u32, 1)?;
                for x in &points {
                    for y in &points {
                        let low = ambient.weil_pair(x, y)?;
                        let high = wide.weil_pair(&[k * x[0], k * x[1]], &[k * y[0], k * y[1]])?;
                        // both sides of W_{kδ} = k·W_δ written at level kδ
                        if high != k * ((k * low).rem_euclid(n)) {
                            return Err(Error::invariant(format!(
                                "level change fails at δ={delta} k={k} x={x:?} y={y:?}"
                            )));
                        }
                    }
                }
            }
            for h in enumerate_subgroups(delta, 2, 10_000)? {
                let perp = ambient.orthogonal(&h)?;
                if h.order() * perp.order() != u64::from(delta) * u64::from(delta) {
                    return Err(Error::invariant(format!(
                        "|H|·|H⊥| ≠ δ² for δ={delta}, |H|={}",
                        h.order()
                    )));
                }
                if ambient.orthogonal(&perp)? != h {
                    return Err(Error::invariant("orthogonal complement is not an involution"));
                }
            }
        }
        let ambient = TorsionAmbient::new(2, 2)?;
        for h in enumerate_subgroups(2, 4, 10_000)? {
            if h.order() * ambient.orthogonal(&h)?.order() != 16 {
                return Err(Error::invariant("|H|·|H⊥| ≠ δ⁴ at δ=2, q=2"));
            }
        }
        Ok("non-degeneracy, level change, and complement orders for δ ≤ 6".to_string())
    })
}

/// Jordan-totient mass and Möbius inversion on subgroup lattices.
pub fn check_moebius() -> CheckResult {
    run_check("moebius", || {
        for delta in 1..=30u64 {
            let total: u64 = (1..=delta)
                .filter(|w| delta % w == 0)
                .map(jordan_j2)
                .sum::<Result<u64>>()?;
            if total != delta * delta {
                return Err(Error::invariant(format!(
                    "Σ_{{ω|δ}} J₂(ω) = {total} ≠ δ² at δ={delta}"
                )));
            }
        }
        for delta in [2u32, 3, 4, 6] {
            let subs = enumerate_subgroups(delta, 2, 10_000)?;
            let f: Vec<i64> = subs.iter().map(|h| h.order() as i64).collect();
            let summed: Vec<i64> = subs
                .iter()
                .map(|h| {
                    subs.iter()
                        .zip(&f)
                        .filter(|(k, _)| k.is_subgroup_of(h))
                        .map(|(_, v)| v)
                        .sum()
                })
                .collect();
            for (i, h) in subs.iter().enumerate() {
                let mut recovered = 0i64;
                for (j, k) in subs.iter().enumerate() {
                    if k.is_subgroup_of(h) {
                        recovered += moebius(k, h)? * summed[j];
                    }
                }
                if recovered != f[i] {
                    return Err(Error::invariant(format!(
                        "Möbius inversion fails at δ={delta}, |H|={}",
                        h.order()
                    )));
                }
            }
        }
        Ok("J₂ mass for δ ≤ 30, inversion round-trips for δ ∈ {2,3,4,6}".to_string())
    })
}

/// Components of the twisted-diagonal covering, counted by brute force:
/// orbits of `H`-labelings of the edges under relabeling at the vertices.
fn diagonal_component_count(graph: &Graph, h: &Subgroup) -> u128 {
    let elems = h.elements();
    let ne = graph.n_edges();
    let rank = h.rank();
    let delta = i64::from(h.delta());
    if ne == 0 {
        return 1;
    }
    let mut all: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut idx = vec![0usize; ne];
    loop {
        all.insert(
            idx.iter()
                .flat_map(|&i| elems[i].iter().copied())
                .collect(),
        );
        let mut j = 0;
        while j < ne {
            idx[j] += 1;
            if idx[j] < elems.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == ne {
            break;
        }
    }
    let mut components = 0u128;
    let mut visited: BTreeSet<Vec<i64>> = BTreeSet::new();
    for start in &all {
        if visited.contains(start) {
            continue;
        }
        components += 1;
        visited.insert(start.clone());
        let mut queue = vec![start.clone()];
        while let Some(state) = queue.pop() {
            for v in 0..graph.n_vertices() {
                for t in &elems {
                    let mut next = state.clone();
                    for e in 0..ne {
                        let (a, b) = graph.edge(e);
                        for (r, &step) in t.iter().enumerate() {
                            if a == v {
                                next[e * rank + r] += step;
                            }
                            if b == v {
                                next[e * rank + r] -= step;
                            }
                        }
                    }
                    for x in &mut next {
                        *x = x.rem_euclid(delta);
                    }
                    if visited.insert(next.clone()) {
                        queue.push(next);
                    }
                }
            }
        }
    }
    components
}

/// Stratum degrees, cone counts, and twisted-diagonal component counts.
pub fn check_strata() -> CheckResult {
    run_check("strata_degrees", || {
        let mut strata = 0u32;
        for genus in [1u32, 2] {
            for core in enumerate_subgroups(2, 2, 64)? {
                for mg in enumerate_strata(genus, 1, 0, 2, 1, &core, 1_000_000)? {
                    let degrees = stratum_degrees(&mg)?;
                    let b1 = mg.graph().b1() as i64;
                    let expected = rational::pow(&rat_int(2), 2 * i64::from(genus) - b1 - 2)
                        * rat_int(mg.kernel().order() as i64);
                    if !expected.is_integer()
                        || rat_int(degrees.spin_corr0 as i64) != expected
                    {
                        return Err(Error::invariant(format!(
                            "stratum degree {} is not δ^{{2g−b₁−2q}}·|K̃| at g={genus}",
                            degrees.spin_corr0
                        )));
                    }
                    let ktilde = mg.kernel().order();
                    let k = mg.core().order();
                    let t = mg.right_kernel().order();
                    if ktilde % k != 0 || u128::from(t) * u128::from(ktilde / k) != 1 << b1 {
                        return Err(Error::invariant(format!(
                            "|𝒯|·|K̃/K| ≠ δ^b₁ on a g={genus} stratum with |K|={k}"
                        )));
                    }
                    strata += 1;
                }
            }
        }
        let mut covers = 0u32;
        for graph in &graph_pool() {
            for delta in [2u32, 3] {
                for h in enumerate_subgroups(delta, 2, 64)? {
                    let degrees = covering_degrees(graph, &h)?;
                    let counted = diagonal_component_count(graph, &h);
                    if counted != degrees.diag_components {
                        return Err(Error::invariant(format!(
                            "{counted} diagonal components instead of |H|^b₁ = {}",
                            degrees.diag_components
                        )));
                    }
                    covers += 1;
                }
            }
        }
        Ok(format!(
            "{strata} strata match the degree formula, {covers} covers counted"
        ))
    })
}

/// Torsion divisor calculus: class counts, witness divergence, and
/// moving divisors off the vertices.
pub fn check_tropical(seed: u64) -> CheckResult {
    run_check("tropical", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = graph_pool();

        let mut classes = 0u32;
        for graph in &pool {
            for delta in [2u32, 3] {
                let sub = SubdividedGraph::new(graph.clone(), delta)?;
                for c in class_vectors(delta, graph.b1()) {
                    let rep = canonical_rep(&sub, &c)?;
                    if classify(&sub, &rep)?.vector() != c.as_slice() {
                        return Err(Error::invariant(format!(
                            "class {c:?} does not round-trip at δ={delta}"
                        )));
                    }
                    classes += 1;
                }
            }
        }

        for _ in 0..50 {
            let graph = &pool[rng.gen_range(0..pool.len())];
            let delta = *[2u32, 3].get(rng.gen_range(0..2)).expect("two levels");
            let sub = SubdividedGraph::new(graph.clone(), delta)?;
            let vectors = class_vectors(delta, graph.b1());
            let class = &vectors[rng.gen_range(0..vectors.len())];
            // a shift vanishing at the originals keeps the divisor inside
            // the normalized-witness domain
            let beta: Vec<i64> = (0..sub.n_nodes())
                .map(|u| if sub.is_original(u) { 0 } else { rng.gen_range(-2..=2) })
                .collect();
            let divisor = canonical_rep(&sub, class)?.add(&principal_shift(&sub, &beta));
            let alpha = solve_alpha(&sub, &divisor)?;
            if alpha.div(&sub).values() != divisor.scale(i64::from(delta)).values() {
                return Err(Error::invariant(format!(
                    "div(α) ≠ δ·D at δ={delta} class {class:?}"
                )));
            }
        }

        for graph in &pool {
            let d = zero_sum(&mut rng, graph.n_vertices(), 3);
            let (sub3, moved) = move_off_vertices(graph, &d)?;
            if (0..sub3.n_nodes()).any(|u| sub3.is_original(u) && moved.value(u) != 0) {
                return Err(Error::invariant("moved divisor still touches a vertex"));
            }
            let mut embedded = vec![0i64; sub3.n_nodes()];
            embedded[..graph.n_vertices()].copy_from_slice(&d);
            let embedded = TropicalDivisor::from_values(&sub3, embedded)?;
            if !is_equivalent(&sub3, &embedded, &moved) {
                return Err(Error::invariant("moved divisor is not equivalent to the input"));
            }
        }
        Ok(format!(
            "{classes} classes round-trip, 50 witnesses, 10 moved divisors"
        ))
    })
}

/// Every check, in acceptance order.
pub fn all_checks(seed: u64) -> Vec<CheckResult> {
    vec![
        check_point_invariants(),
        check_qseries(),
        check_genus1_pipeline(),
        check_pixton_anchors(seed),
        check_gluing(),
        check_weil(),
        check_moebius(),
        check_strata(),
        check_tropical(seed),
    ]
}

/// Suites addressable from the command line.
pub const SUITES: [&str; 9] = [
    "weil",
    "moebius",
    "weightings",
    "gluing",
    "strata",
    "tropical",
    "elliptic",
    "qseries",
    "all",
];

/// Run one named suite. Unknown names are a configuration error.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CheckResult>> {
    match name {
        "weil" => Ok(vec![check_weil()]),
        "moebius" => Ok(vec![check_moebius()]),
        "weightings" => Ok(vec![check_pixton_anchors(seed)]),
        "gluing" => Ok(vec![check_gluing()]),
        "strata" => Ok(vec![check_strata()]),
        "tropical" => Ok(vec![check_tropical(seed)]),
        "elliptic" => Ok(vec![check_point_invariants(), check_genus1_pipeline()]),
        "qseries" => Ok(vec![check_qseries()]),
        "all" => Ok(all_checks(seed)),
        other => Err(Error::config(format!(
            "unknown suite '{other}'; available: {}",
            SUITES.join(", ")
        ))),
    }
}
