//! Finite-abelian machinery for δ-torsion subgroups of the target torus:
//! subgroups of (Z/δ)^rank in Howell normal form, the symplectic Weil
//! pairing, subgroup-lattice Möbius numbers, the second Jordan totient, and
//! covering-degree bookkeeping for diagram spaces.

use crate::error::Error;
use crate::exact::{rat, rat_int, Rat};
use crate::graphs::Graph;
use crate::Result;
use std::collections::BTreeSet;

fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = xgcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    xgcd(a, b).0
}

/// A subgroup of (Z/delta)^rank, stored as the rows of its Howell normal
/// form. Two subgroups are equal as sets iff their row matrices are equal,
/// which is what makes the form usable as a dedup key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subgroup {
    delta: u32,
    rank: usize,
    rows: Vec<Vec<i64>>,
}

fn lead(row: &[i64]) -> Option<usize> {
    row.iter().position(|&x| x != 0)
}

fn row_scale(row: &[i64], c: i64, n: i64) -> Vec<i64> {
    row.iter().map(|&x| (x * c).rem_euclid(n)).collect()
}

fn row_combine(r: &[i64], s: &[i64], cr: i64, cs: i64, n: i64) -> Vec<i64> {
    r.iter()
        .zip(s)
        .map(|(&a, &b)| (a * cr + b * cs).rem_euclid(n))
        .collect()
}

/// Howell normal form of the span of `gens` inside (Z/n)^rank. Echelon over
/// Z/n with annihilator rows inserted, pivots normalized to divisors of n,
/// and entries above each pivot reduced below it; the output is the unique
/// canonical generating matrix of the span.
fn howell_form(gens: &[Vec<i64>], n: i64, rank: usize) -> Vec<Vec<i64>> {
    let mut work: Vec<Vec<i64>> = gens
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(n)).collect::<Vec<_>>())
        .filter(|r: &Vec<i64>| lead(r).is_some())
        .collect();
    let mut out: Vec<Vec<i64>> = Vec::new();
    for col in 0..rank {
        let (here, later): (Vec<_>, Vec<_>) = work.into_iter().partition(|r| lead(r) == Some(col));
        work = later;
        let mut here = here.into_iter();
        let Some(mut r) = here.next() else { continue };
        for s in here {
            let (a, b) = (r[col], s[col]);
            let (g, x, y) = xgcd(a, b);
            let t = row_combine(&r, &s, x, y, n);
            let u = row_combine(&s, &r, a / g, -(b / g), n);
            debug_assert_eq!(t[col], g % n);
            debug_assert_eq!(u[col], 0);
            r = t;
            if lead(&u).is_some() {
                work.push(u);
            }
        }
        let g = gcd(r[col], n);
        let unit = (1..n)
            .find(|&w| gcd(w, n) == 1 && (w * r[col]).rem_euclid(n) == g)
            .expect("unit taking the pivot to gcd(pivot, n) exists");
        r = row_scale(&r, unit, n);
        let ann = row_scale(&r, n / g, n);
        if lead(&ann).is_some() {
            work.push(ann);
        }
        for o in out.iter_mut() {
            if o[col] != 0 {
                *o = row_combine(o, &r, 1, -(o[col] / g), n);
            }
        }
        out.push(r);
    }
    debug_assert!(work.is_empty());
    out
}

impl Subgroup {
    pub fn new(delta: u32, rank: usize, gens: &[Vec<i64>]) -> Result<Self> {
        if delta == 0 {
            return Err(Error::config("subgroup modulus must be positive"));
        }
        if gens.iter().any(|g| g.len() != rank) {
            return Err(Error::config(format!(
                "generator length does not match ambient rank {rank}"
            )));
        }
        let rows = howell_form(gens, delta as i64, rank);
        Ok(Subgroup { delta, rank, rows })
    }

    pub fn trivial(delta: u32, rank: usize) -> Self {
        Subgroup::new(delta, rank, &[]).expect("trivial subgroup")
    }

    pub fn full(delta: u32, rank: usize) -> Self {
        let gens: Vec<Vec<i64>> = (0..rank)
            .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
            .collect();
        Subgroup::new(delta, rank, &gens).expect("full subgroup")
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Canonical generating rows (Howell form).
    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn order(&self) -> u64 {
        let n = i64::from(self.delta);
        self.rows
            .iter()
            .map(|r| {
                let p = r[lead(r).expect("pivot")];
                (n / gcd(p, n)) as u64
            })
            .product()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        assert_eq!(x.len(), self.rank, "element length mismatch");
        let n = i64::from(self.delta);
        let mut x: Vec<i64> = x.iter().map(|&v| v.rem_euclid(n)).collect();
        for r in &self.rows {
            let col = lead(r).expect("pivot");
            if x[col] != 0 {
                let q = x[col] / r[col];
                x = row_combine(&x, r, 1, -q, n);
            }
            if x[col] != 0 {
                return false;
            }
        }
        x.iter().all(|&v| v == 0)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        assert_eq!((self.delta, self.rank), (other.delta, other.rank));
        self.rows.iter().all(|r| other.contains(r))
    }

    /// Every element, sorted. Intended for the small ambients that occur
    /// here; the closure runs in O(|H| · rank · #gens).
    pub fn elements(&self) -> Vec<Vec<i64>> {
        let n = i64::from(self.delta);
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        seen.insert(vec![0; self.rank]);
        let mut frontier: Vec<Vec<i64>> = vec![vec![0; self.rank]];
        while let Some(x) = frontier.pop() {
            for r in &self.rows {
                let y = row_combine(&x, r, 1, 1, n);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "delta": self.delta,
            "rank": self.rank,
            "rows": self.rows,
            "order": self.order(),
        })
    }
}

/// The δ-torsion of the target's Pic⁰ × Alb, modeled as (Z/δ)^{2q} with the
/// standard symplectic pairing between the two blocks of coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorsionAmbient {
    pub delta: u32,
    pub q: usize,
}

impl TorsionAmbient {
    pub fn new(delta: u32, q: usize) -> Result<Self> {
        if delta == 0 {
            return Err(Error::config("torsion order must be positive"));
        }
        Ok(TorsionAmbient { delta, q })
    }

    pub fn rank(&self) -> usize {
        2 * self.q
    }

    /// Weil pairing of two δ-torsion points, valued in Z/δ: the symplectic
    /// form pairing coordinate i against coordinate q+i.
    pub fn weil_pair(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        let r = self.rank();
        if x.len() != r || y.len() != r {
            return Err(Error::config(format!(
                "pairing arguments must have length {r}"
            )));
        }
        let n = i64::from(self.delta);
        let mut acc = 0i64;
        for i in 0..self.q {
            acc = (acc + x[i] * y[self.q + i] - x[self.q + i] * y[i]).rem_euclid(n);
        }
        Ok(acc)
    }

    /// The annihilator of H under the pairing. |H|·|H⊥| = δ^{2q} and the
    /// operation is an involution.
    pub fn orthogonal(&self, h: &Subgroup) -> Result<Subgroup> {
        if h.delta != self.delta || h.rank != self.rank() {
            return Err(Error::config("subgroup does not live in this ambient"));
        }
        let n = i64::from(self.delta);
        let r = self.rank();
        let mut gens: Vec<Vec<i64>> = Vec::new();
        let mut x = vec![0i64; r];
        loop {
            if h.rows
                .iter()
                .all(|row| self.weil_pair(row, &x).expect("lengths match") == 0)
            {
                gens.push(x.clone());
            }
            let mut i = 0;
            while i < r {
                x[i] += 1;
                if x[i] < n {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
            if i == r {
                break;
            }
        }
        Subgroup::new(self.delta, r, &gens)
    }
}

/// All subgroups of (Z/delta)^rank, sorted by (order, canonical rows); the
/// sort is compatible with inclusion. Errors if more than `cap` subgroups
/// would be produced.
pub fn enumerate_subgroups(delta: u32, rank: usize, cap: usize) -> Result<Vec<Subgroup>> {
    if delta == 0 {
        return Err(Error::config("subgroup modulus must be positive"));
    }
    let n = i64::from(delta);
    let mut found: BTreeSet<Subgroup> = BTreeSet::new();
    let mut frontier = vec![Subgroup::trivial(delta, rank)];
    found.insert(frontier[0].clone());
    while let Some(s) = frontier.pop() {
        let mut x = vec![0i64; rank];
        loop {
            if !s.contains(&x) {
                let mut gens = s.rows.clone();
                gens.push(x.clone());
                let bigger = Subgroup::new(delta, rank, &gens)?;
                if found.insert(bigger.clone()) {
                    if found.len() > cap {
                        return Err(Error::resource(format!(
                            "more than {cap} subgroups of (Z/{delta})^{rank}"
                        )));
                    }
                    frontier.push(bigger);
                }
            }
            let mut i = 0;
            while i < rank {
                x[i] += 1;
                if x[i] < n {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
            if i == rank {
                break;
            }
        }
    }
    let mut out: Vec<Subgroup> = found.into_iter().collect();
    out.sort_by_key(|s| (s.order(), s.rows.clone()));
    Ok(out)
}

/// Möbius number μ(K, H) of the interval [K, H] in the subgroup lattice:
/// μ(K, K) = 1 and Σ_{K ⊆ J ⊆ H} μ(K, J) = 0 for K ⊊ H.
pub fn moebius(k: &Subgroup, h: &Subgroup) -> Result<i64> {
    if (k.delta, k.rank) != (h.delta, h.rank) {
        return Err(Error::config("subgroups live in different ambients"));
    }
    if !k.is_subgroup_of(h) {
        return Err(Error::domain("Möbius number needs K ⊆ H"));
    }
    // The interval [K, H]: subgroups of H containing K, found by closing K
    // under elements of H.
    let mut interval: BTreeSet<Subgroup> = BTreeSet::new();
    interval.insert(k.clone());
    let h_elts = h.elements();
    let mut frontier = vec![k.clone()];
    while let Some(s) = frontier.pop() {
        for x in &h_elts {
            if !s.contains(x) {
                let mut gens = s.rows.clone();
                gens.push(x.clone());
                let bigger = Subgroup::new(s.delta, s.rank, &gens)?;
                if interval.insert(bigger.clone()) {
                    frontier.push(bigger);
                }
            }
        }
    }
    let interval: Vec<Subgroup> = interval.into_iter().collect();
    let mut mu = vec![0i64; interval.len()];
    let mut by_order: Vec<usize> = (0..interval.len()).collect();
    by_order.sort_by_key(|&i| interval[i].order());
    for &i in &by_order {
        if interval[i] == *k {
            mu[i] = 1;
            continue;
        }
        let mut acc = 0i64;
        for &j in &by_order {
            if j != i && interval[j].is_subgroup_of(&interval[i]) {
                acc += mu[j];
            }
        }
        mu[i] = -acc;
    }
    let idx = interval.iter().position(|s| s == h).expect("H in interval");
    Ok(mu[idx])
}

/// Second Jordan totient J₂(n) = n² Π_{p|n} (1 − 1/p²): the number of
/// elements of (Z/n)² of exact order n.
pub fn jordan_j2(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("Jordan totient of 0"));
    }
    let mut m = n;
    let mut out = n * n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            out = out / (p * p) * (p * p - 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out = out / (m * m) * (m * m - 1);
    }
    Ok(out)
}

/// Degree data of the diagram-space covering attached to a graph and a
/// finite subgroup H: the diagonal covering splits into |H|^{b₁} components,
/// each a torsor covering of degree |H|^{|E|−1}, and the base torsor has
/// degree |H|.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringDegrees {
    pub diag_components: u128,
    pub per_component_degree: Rat,
    pub torsor_degree: u64,
}

pub fn covering_degrees(graph: &Graph, h: &Subgroup) -> Result<CoveringDegrees> {
    let m = h.order();
    let b1 = graph.b1();
    let ne = graph.n_edges();
    let diag_components = (m as u128)
        .checked_pow(b1 as u32)
        .ok_or_else(|| Error::resource("component count overflows"))?;
    let per_component_degree = if ne == 0 {
        rat(1, m as i64)
    } else {
        let mut acc = rat_int(1);
        for _ in 0..ne - 1 {
            acc = acc * rat_int(m as i64);
        }
        acc
    };
    Ok(CoveringDegrees {
        diag_components,
        per_component_degree,
        torsor_degree: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;

    fn sg(delta: u32, rank: usize, gens: &[&[i64]]) -> Subgroup {
        let gens: Vec<Vec<i64>> = gens.iter().map(|g| g.to_vec()).collect();
        Subgroup::new(delta, rank, &gens).unwrap()
    }

    #[test]
    fn howell_key_matches_element_sets() {
        // Same span, different presentations, equal canonical rows.
        let a = sg(4, 2, &[&[1, 2], &[0, 2]]);
        let b = sg(4, 2, &[&[3, 2], &[0, 2]]);
        assert_eq!(a.elements(), b.elements());
        assert_eq!(a, b);
        let c = sg(4, 2, &[&[2, 0]]);
        assert_ne!(a, c);
    }

    #[test]
    fn order_counts_elements() {
        for (delta, rank) in [(2u32, 2usize), (3, 2), (4, 1), (4, 2), (6, 2), (12, 2)] {
            for s in enumerate_subgroups(delta, rank, 1000).unwrap() {
                assert_eq!(s.order() as usize, s.elements().len(), "{s:?}");
            }
        }
    }

    #[test]
    fn contains_agrees_with_elements() {
        let s = sg(6, 2, &[&[2, 3], &[0, 3]]);
        let elts = s.elements();
        let mut count = 0;
        for x in 0..6 {
            for y in 0..6 {
                let inside = s.contains(&[x, y]);
                assert_eq!(inside, elts.contains(&vec![x, y]));
                count += usize::from(inside);
            }
        }
        assert_eq!(count as u64, s.order());
    }

    #[test]
    fn subgroup_counts() {
        // (Z/2)²: trivial, three of order 2, full.
        assert_eq!(enumerate_subgroups(2, 2, 100).unwrap().len(), 5);
        // (Z/3)²: trivial, four lines, full.
        assert_eq!(enumerate_subgroups(3, 2, 100).unwrap().len(), 6);
        // Z/4: trivial, 2Z/4, full.
        assert_eq!(enumerate_subgroups(4, 1, 100).unwrap().len(), 3);
    }

    #[test]
    fn enumeration_is_inclusion_sorted() {
        let all = enumerate_subgroups(6, 2, 1000).unwrap();
        for (i, a) in all.iter().enumerate() {
            for b in &all[..i] {
                // Anything listed before a is never a strict supergroup.
                assert!(!a.is_subgroup_of(b) || a == b);
            }
        }
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let err = enumerate_subgroups(2, 2, 3).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn weil_pairing_on_dual_basis() {
        let amb = TorsionAmbient::new(2, 1).unwrap();
        assert_eq!(amb.weil_pair(&[1, 0], &[0, 1]).unwrap(), 1);
        assert_eq!(amb.weil_pair(&[1, 0], &[1, 0]).unwrap(), 0);
        let amb2 = TorsionAmbient::new(5, 2).unwrap();
        // e1 pairs against f1 = coordinate q+0, not against f2.
        assert_eq!(amb2.weil_pair(&[1, 0, 0, 0], &[0, 0, 1, 0]).unwrap(), 1);
        assert_eq!(amb2.weil_pair(&[1, 0, 0, 0], &[0, 0, 0, 1]).unwrap(), 0);
        // Antisymmetry.
        assert_eq!(amb2.weil_pair(&[0, 0, 1, 0], &[1, 0, 0, 0]).unwrap(), 4);
    }

    #[test]
    fn weil_pairing_is_bilinear() {
        let amb = TorsionAmbient::new(6, 1).unwrap();
        let n = 6i64;
        for x1 in 0..n {
            for x2 in 0..n {
                for y1 in 0..n {
                    for y2 in 0..n {
                        let x = [x1, x2];
                        let y = [y1, y2];
                        let sum = [(x1 + y1) % n, (x2 + y2) % n];
                        let z = [1, 5];
                        let lhs = amb.weil_pair(&sum, &z).unwrap();
                        let rhs =
                            (amb.weil_pair(&x, &z).unwrap() + amb.weil_pair(&y, &z).unwrap()) % n;
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn weil_pairing_level_change() {
        // δ-torsion sits inside kδ-torsion via x ↦ kx, and the pairing at
        // level kδ restricts to k times the pairing at level δ.
        for (delta, k) in [(2u32, 2i64), (2, 3), (3, 2), (4, 3)] {
            let small = TorsionAmbient::new(delta, 1).unwrap();
            let big = TorsionAmbient::new(delta * k as u32, 1).unwrap();
            let n = i64::from(delta);
            for x1 in 0..n {
                for x2 in 0..n {
                    for y1 in 0..n {
                        for y2 in 0..n {
                            let w = small.weil_pair(&[x1, x2], &[y1, y2]).unwrap();
                            let wk = big
                                .weil_pair(&[k * x1, k * x2], &[k * y1, k * y2])
                                .unwrap();
                            assert_eq!(wk, (k * k * w).rem_euclid(k * n));
                            // k·(embedded value): the embedding Z/δ → Z/kδ is
                            // multiplication by k.
                            assert_eq!(wk, (k * (k * w)).rem_euclid(k * n));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonal_complements() {
        for (delta, q) in [(2u32, 1usize), (3, 1), (4, 1), (2, 2)] {
            let amb = TorsionAmbient::new(delta, q).unwrap();
            let total = u64::from(delta).pow(2 * q as u32);
            for h in enumerate_subgroups(delta, 2 * q, 10_000).unwrap() {
                let perp = amb.orthogonal(&h).unwrap();
                assert_eq!(h.order() * perp.order(), total);
                assert_eq!(amb.orthogonal(&perp).unwrap(), h);
            }
        }
    }

    #[test]
    fn moebius_on_z2_squared() {
        let triv = Subgroup::trivial(2, 2);
        let full = Subgroup::full(2, 2);
        let line = sg(2, 2, &[&[1, 0]]);
        assert_eq!(moebius(&triv, &triv).unwrap(), 1);
        assert_eq!(moebius(&triv, &line).unwrap(), -1);
        assert_eq!(moebius(&triv, &full).unwrap(), 2);
        assert_eq!(moebius(&line, &full).unwrap(), -1);
        assert!(matches!(
            moebius(&line, &sg(2, 2, &[&[0, 1]])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn moebius_sums_vanish() {
        // Σ_{K ⊆ J ⊆ H} μ(K, J) = 0 for every strict pair in (Z/6)².
        let all = enumerate_subgroups(6, 2, 1000).unwrap();
        let k = Subgroup::trivial(6, 2);
        for h in &all {
            let mut total = 0i64;
            for j in &all {
                if k.is_subgroup_of(j) && j.is_subgroup_of(h) {
                    total += moebius(&k, j).unwrap();
                }
            }
            assert_eq!(total, i64::from(*h == k), "H = {h:?}");
        }
    }

    #[test]
    fn jordan_totient_values() {
        assert_eq!(jordan_j2(1).unwrap(), 1);
        assert_eq!(jordan_j2(2).unwrap(), 3);
        assert_eq!(jordan_j2(6).unwrap(), 24);
        // Σ_{ω | δ} J₂(ω) = δ².
        for delta in 1u64..=30 {
            let total: u64 = (1..=delta)
                .filter(|w| delta % w == 0)
                .map(|w| jordan_j2(w).unwrap())
                .sum();
            assert_eq!(total, delta * delta);
        }
        assert!(jordan_j2(0).is_err());
    }

    #[test]
    fn jordan_totient_counts_exact_orders() {
        for n in 1i64..=30 {
            let mut count = 0u64;
            for x in 0..n {
                for y in 0..n {
                    if gcd(gcd(x, y), n) == 1 {
                        count += 1;
                    }
                }
            }
            assert_eq!(count, jordan_j2(n as u64).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn covering_degrees_examples() {
        // Theta graph with H = Z/2: 2^{b₁} = 4 components of degree 2^{3−1}.
        let theta = Graph::new(
            vec![crate::graphs::VertexData { genus: 0, degree: 0 }; 2],
            vec![(0, 1), (0, 1), (0, 1)],
            vec![],
        )
        .unwrap();
        let h = sg(2, 2, &[&[1, 0]]);
        let deg = covering_degrees(&theta, &h).unwrap();
        assert_eq!(deg.diag_components, 4);
        assert_eq!(deg.per_component_degree, rat_int(4));
        assert_eq!(deg.torsor_degree, 2);

        // Loop with H of order 3: 3 components, degree 3⁰ = 1 each.
        let loop_g = Graph::new(
            vec![crate::graphs::VertexData { genus: 0, degree: 0 }],
            vec![(0, 0)],
            vec![],
        )
        .unwrap();
        let h3 = sg(3, 2, &[&[1, 0]]);
        let deg3 = covering_degrees(&loop_g, &h3).unwrap();
        assert_eq!(deg3.diag_components, 3);
        assert_eq!(deg3.per_component_degree, rat_int(1));
        assert_eq!(deg3.torsor_degree, 3);
    }
}
