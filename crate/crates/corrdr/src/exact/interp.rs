//! Exact Lagrange interpolation of polynomial-valued node data.
//!
//! The weighting sums downstream are, for large `r`, polynomials in `r`
//! with coefficients that are themselves polynomials in the edge length
//! symbols. We sample them at explicit integer values of `r` and rebuild
//! the `(r, ℓ)`-polynomial coefficient-by-coefficient. Everything is
//! exact; stability of a fit is certified by refitting on an enlarged node
//! window and demanding literal equality.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::poly::{Monomial, TruncPoly, VarTable};
use super::rational::Rat;
use crate::{Error, Result};

/// Interpolate `nodes = [(r_i, p_i)]` by a polynomial in `r` of degree
/// `< nodes.len()` with `TruncPoly` coefficients.
///
/// The output lives over a new table with the fresh variable `r_name`
/// prepended to the nodes' variables; its truncation bound is raised so
/// that no `r`-power is ever discarded.
///
/// Errors on empty input, duplicate `r`-values, or a node over a different
/// table/bound than the first.
pub fn interpolate(nodes: &[(Rat, TruncPoly)], r_name: &str) -> Result<TruncPoly> {
    let first = nodes
        .first()
        .ok_or_else(|| Error::config("interpolation needs at least one node"))?;
    let vars = first.1.vars();
    let bound = first.1.bound();
    for (_, p) in nodes {
        if p.vars() != vars || p.bound() != bound {
            return Err(Error::config("interpolation nodes over mismatched rings"));
        }
    }
    {
        let mut seen = BTreeSet::new();
        for (r, _) in nodes {
            if !seen.insert(r.clone()) {
                return Err(Error::config(format!("duplicate interpolation node r = {r}")));
            }
        }
    }
    if vars.index_of(r_name).is_some() {
        return Err(Error::config(format!(
            "variable {r_name:?} already present in the node ring"
        )));
    }

    let n = nodes.len();
    let out_vars = VarTable::new(
        std::iter::once(r_name.to_string()).chain(vars.names().iter().cloned()),
    );
    let out_bound = bound + (n as u32 - 1);

    // Univariate Lagrange in r, done once on the basis: basis_coeffs[i][j]
    // is the r^j coefficient of the i-th Lagrange basis polynomial.
    let rs: Vec<Rat> = nodes.iter().map(|(r, _)| r.clone()).collect();
    let mut basis_coeffs: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for i in 0..n {
        // numerator Π_{k≠i} (r - r_k), expanded low-to-high
        let mut num = vec![Rat::one()];
        let mut denom = Rat::one();
        for (k, rk) in rs.iter().enumerate() {
            if k == i {
                continue;
            }
            let mut next = vec![Rat::zero(); num.len() + 1];
            for (d, c) in num.iter().enumerate() {
                next[d] -= c.clone() * rk.clone();
                next[d + 1] += c.clone();
            }
            num = next;
            denom *= rs[i].clone() - rk.clone();
        }
        let inv = denom.recip();
        for c in num.iter_mut() {
            *c *= inv.clone();
        }
        num.resize(n, Rat::zero());
        basis_coeffs.push(num);
    }

    // Assemble Σ_i p_i(ℓ) · L_i(r): for each ℓ-monomial and r-power,
    // accumulate Σ_i coeff_i(mono) · basis_coeffs[i][j].
    let mut terms: Vec<(Monomial, Rat)> = Vec::new();
    let mut monomials: BTreeSet<Monomial> = BTreeSet::new();
    for (_, p) in nodes {
        for (m, _) in p.terms() {
            monomials.insert(m.clone());
        }
    }
    for m in monomials {
        for j in 0..n {
            let mut acc = Rat::zero();
            for (i, (_, p)) in nodes.iter().enumerate() {
                let c = p.coeff(&m);
                if !c.is_zero() {
                    acc += c * basis_coeffs[i][j].clone();
                }
            }
            if !acc.is_zero() {
                let mut e = Vec::with_capacity(m.0.len() + 1);
                e.push(j as u32);
                e.extend_from_slice(&m.0);
                terms.push((Monomial(e), acc));
            }
        }
    }
    Ok(TruncPoly::from_terms(&out_vars, out_bound, terms))
}

/// Interpolate on `base`, refit on `base ++ extra`, and demand that the two
/// fits agree exactly (after raising the smaller fit's formal degree).
/// Disagreement means the sampled data is not polynomial of the assumed
/// degree on this window.
pub fn interpolate_checked(
    base: &[(Rat, TruncPoly)],
    extra: &[(Rat, TruncPoly)],
    r_name: &str,
) -> Result<TruncPoly> {
    let fit = interpolate(base, r_name)?;
    let mut all = base.to_vec();
    all.extend_from_slice(extra);
    let refit = interpolate(&all, r_name)?;
    // Compare over the larger ring.
    let lifted = fit.with_bound(refit.bound());
    if lifted != refit {
        return Err(Error::domain(
            "interpolation unstable: enlarged node window changed the fit",
        ));
    }
    Ok(lifted)
}

/// Evaluate an interpolated `(r, ℓ)`-polynomial at a rational `r`,
/// returning a polynomial over the original ℓ-table.
pub fn eval_at_r(p: &TruncPoly, value: &Rat, l_vars: &Arc<VarTable>, l_bound: u32) -> TruncPoly {
    let subst = p.substitute(0, value);
    // drop the r-column (exponent 0 everywhere after substitution)
    let mut terms = Vec::new();
    for (m, c) in subst.terms() {
        debug_assert_eq!(m.0[0], 0);
        terms.push((Monomial(m.0[1..].to_vec()), c.clone()));
    }
    TruncPoly::from_terms(l_vars, l_bound, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{rat, rat_int};

    /// The loop-cone scalar sum `Σ_{w=0}^{r-1} w(r-w)/(2r) = (r^2-1)/12`,
    /// sampled at r = 5..=11, must interpolate to exactly that quadratic;
    /// its value at r = 0 is -1/12.
    #[test]
    fn loop_average_reproduces_quadratic() {
        let l_vars = VarTable::new(["l0"]);
        let mut nodes = Vec::new();
        for r in 5i64..=11 {
            let mut s = Rat::zero();
            for w in 0..r {
                s += rat(w * (r - w), 2 * r);
            }
            nodes.push((rat_int(r), TruncPoly::constant(&l_vars, 1, s)));
        }
        let fit = interpolate(&nodes[..5], "r").unwrap();
        // (r^2 - 1)/12
        let r2 = fit.coeff(&Monomial(vec![2, 0]));
        let r0 = fit.coeff(&Monomial(vec![0, 0]));
        assert_eq!(r2, rat(1, 12));
        assert_eq!(r0, rat(-1, 12));
        assert_eq!(fit.coeff(&Monomial(vec![1, 0])), rat_int(0));
        assert_eq!(fit.coeff(&Monomial(vec![3, 0])), rat_int(0));
        assert_eq!(fit.coeff(&Monomial(vec![4, 0])), rat_int(0));

        // stability under two more nodes
        let checked = interpolate_checked(&nodes[..5], &nodes[5..], "r").unwrap();
        let at_zero = eval_at_r(&checked, &rat_int(0), &l_vars, 1);
        assert_eq!(at_zero.constant_coeff(), rat(-1, 12));
    }

    #[test]
    fn duplicate_nodes_rejected() {
        let l_vars = VarTable::new(["l0"]);
        let p = TruncPoly::constant(&l_vars, 1, rat_int(1));
        let nodes = vec![(rat_int(3), p.clone()), (rat_int(3), p)];
        assert!(interpolate(&nodes, "r").is_err());
    }

    #[test]
    fn instability_detected() {
        // sample |r| at r = 1, 2 (fits r), then add r = -3 (breaks it)
        let l_vars = VarTable::new(["l0"]);
        let node = |r: i64, v: i64| (rat_int(r), TruncPoly::constant(&l_vars, 1, rat_int(v)));
        let base = vec![node(1, 1), node(2, 2)];
        let extra = vec![node(-3, 3)];
        assert!(interpolate_checked(&base, &extra, "r").is_err());
    }

    #[test]
    fn polynomial_coefficients_survive() {
        // nodes p_r = r·l0: fit must be exactly r*l0
        let l_vars = VarTable::new(["l0"]);
        let nodes: Vec<_> = (1i64..=3)
            .map(|r| {
                (
                    rat_int(r),
                    TruncPoly::var(&l_vars, 1, 0).scale(&rat_int(r)),
                )
            })
            .collect();
        let fit = interpolate(&nodes, "r").unwrap();
        assert_eq!(fit.to_text(), "r*l0");
    }
}
