//! Truncated multivariate polynomials over ℚ.
//!
//! A `TruncPoly` lives over a fixed, shared table of named symbols (edge
//! lengths, cotangent classes, the interpolation variable) and discards
//! every term whose *total* degree exceeds its truncation bound. All cone
//! functions and class prefactors downstream are values of this type, so
//! the monomial order here — graded lexicographic over the table order —
//! is also the canonical serialization order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::rational::{self, Rat};
use crate::{Error, Result};

/// A shared, ordered table of variable names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    /// Build a table from names. Names must be distinct and nonempty.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Arc<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            assert!(!n.is_empty(), "empty variable name");
            assert!(seen.insert(n.clone()), "duplicate variable name {n:?}");
        }
        Arc::new(VarTable { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Index of a name, if present.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Exponent vector over a `VarTable`; ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial over ℚ, truncated in total degree.
///
/// Invariants: no stored zero coefficients, no stored monomial exceeds the
/// bound, all monomials have exactly one exponent per table entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncPoly {
    vars: Arc<VarTable>,
    bound: u32,
    terms: BTreeMap<Monomial, Rat>,
}

impl TruncPoly {
    /// The zero polynomial.
    pub fn zero(vars: &Arc<VarTable>, bound: u32) -> Self {
        TruncPoly {
            vars: Arc::clone(vars),
            bound,
            terms: BTreeMap::new(),
        }
    }

    /// A constant.
    pub fn constant(vars: &Arc<VarTable>, bound: u32, c: Rat) -> Self {
        let mut p = Self::zero(vars, bound);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; vars.len()]), c);
        }
        p
    }

    /// The `i`-th variable as a polynomial.
    ///
    /// # Panics
    /// Panics if `i` is out of range or the bound is 0.
    pub fn var(vars: &Arc<VarTable>, bound: u32, i: usize) -> Self {
        assert!(i < vars.len(), "variable index out of range");
        assert!(bound >= 1, "bound too small to hold a variable");
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = Self::zero(vars, bound);
        p.terms.insert(Monomial(e), Rat::one());
        p
    }

    /// Build from explicit terms, dropping zeros and everything past the
    /// bound.
    pub fn from_terms(
        vars: &Arc<VarTable>,
        bound: u32,
        terms: impl IntoIterator<Item = (Monomial, Rat)>,
    ) -> Self {
        let mut p = Self::zero(vars, bound);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars.len(), "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of a monomial (zero if absent).
    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// The constant coefficient.
    pub fn constant_coeff(&self) -> Rat {
        self.coeff(&Monomial(vec![0; self.vars.len()]))
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() || m.total_degree() > self.bound {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.vars, &other.vars) && self.vars != other.vars {
            return Err(Error::config("polynomial variable tables differ"));
        }
        if self.bound != other.bound {
            return Err(Error::config(format!(
                "mismatched truncation bounds {} vs {}",
                self.bound, other.bound
            )));
        }
        Ok(())
    }

    /// Checked addition; errors on table or bound mismatch.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Checked truncating product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(&self.vars, self.bound);
        for (m1, c1) in &self.terms {
            let d1 = m1.total_degree();
            for (m2, c2) in &other.terms {
                if d1 + m2.total_degree() > self.bound {
                    continue;
                }
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    /// Unchecked wrappers for internal code where compatibility is
    /// structural; panic on mismatch.
    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("incompatible polynomials")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("incompatible polynomials")
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("incompatible polynomials")
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars, self.bound);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c.clone();
        }
        out
    }

    /// Truncating power.
    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(&self.vars, self.bound, Rat::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Truncated exponential `Σ self^k / k!`.
    ///
    /// Requires a vanishing constant term, so the sum stabilizes at
    /// `k = bound`.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_coeff().is_zero() {
            return Err(Error::domain(
                "exp of a truncated polynomial needs zero constant term",
            ));
        }
        let mut out = Self::constant(&self.vars, self.bound, Rat::one());
        let mut power = out.clone();
        let mut factorial = Rat::one();
        for k in 1..=self.bound {
            power = power.mul(self);
            if power.is_zero() {
                break;
            }
            factorial *= rational::rat_int(k as i64);
            out = out.add(&power.scale(&factorial.recip()));
        }
        Ok(out)
    }

    /// The homogeneous part of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut out = Self::zero(&self.vars, self.bound);
        for (m, c) in &self.terms {
            if m.total_degree() == d {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Largest total degree with a nonzero term; `None` for the zero
    /// polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Substitute a rational value for variable `i`; the variable stays in
    /// the table with exponent 0.
    pub fn substitute(&self, i: usize, value: &Rat) -> Self {
        assert!(i < self.vars.len(), "variable index out of range");
        let mut out = Self::zero(&self.vars, self.bound);
        for (m, c) in &self.terms {
            let e = m.0[i];
            let mut m2 = m.clone();
            m2.0[i] = 0;
            out.add_term(m2, c.clone() * rational::pow(value, e as i64));
        }
        out
    }

    /// Re-express over a new table. `map[i]` is the index in `new_vars` of
    /// the `i`-th current variable; the new table may be larger.
    pub fn map_vars(&self, new_vars: &Arc<VarTable>, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.vars.len(), "variable map arity mismatch");
        let mut out = Self::zero(new_vars, self.bound);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; new_vars.len()];
            for (i, &exp) in m.0.iter().enumerate() {
                if exp > 0 {
                    e[map[i]] += exp;
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Raise (never lower) the truncation bound.
    pub fn with_bound(&self, bound: u32) -> Self {
        assert!(bound >= self.bound, "cannot raise precision by truncating");
        let mut out = self.clone();
        out.bound = bound;
        out
    }

    /// Drop all terms of total degree above `bound` and lower the bound.
    pub fn truncated(&self, bound: u32) -> Self {
        let mut out = Self::zero(&self.vars, bound.min(self.bound));
        for (m, c) in &self.terms {
            if m.total_degree() <= out.bound {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Evaluate at a full point.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.vars.len(), "point arity mismatch");
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term *= rational::pow(&point[i], e as i64);
                }
            }
            acc += term;
        }
        acc
    }

    /// Canonical text form: terms in graded-lex order, rational
    /// coefficients as `num/den`, explicit `*` and `^`.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mono = self.monomial_text(m);
            let coeff_abs = rational::to_text(&c.clone().abs());
            let negative = c < &Rat::zero();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            match mono {
                None => out.push_str(&coeff_abs),
                Some(ms) => {
                    if coeff_abs == "1" {
                        out.push_str(&ms);
                    } else {
                        out.push_str(&coeff_abs);
                        out.push('*');
                        out.push_str(&ms);
                    }
                }
            }
        }
        out
    }

    fn monomial_text(&self, m: &Monomial) -> Option<String> {
        let mut parts = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.vars.name(i).to_string()),
                _ => parts.push(format!("{}^{}", self.vars.name(i), e)),
            }
        }
        if parts.is_empty() {
            None
        } else {
            Some(parts.join("*"))
        }
    }
}

impl fmt::Display for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{rat, rat_int};

    fn table() -> Arc<VarTable> {
        VarTable::new(["l0", "l1"])
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial(vec![0, 2]); // degree 2
        let b = Monomial(vec![1, 0]); // degree 1
        let c = Monomial(vec![1, 1]); // degree 2, lex-larger than a
        assert!(b < a);
        assert!(a < c);
    }

    #[test]
    fn arithmetic_and_truncation() {
        let t = table();
        let x = TruncPoly::var(&t, 2, 0);
        let y = TruncPoly::var(&t, 2, 1);
        let p = x.add(&y); // l0 + l1, bound 2
        let sq = p.mul(&p); // l0^2 + 2 l0 l1 + l1^2
        assert_eq!(sq.coeff(&Monomial(vec![1, 1])), rat_int(2));
        // one more power truncates to zero entirely
        assert!(sq.mul(&p).is_zero());
    }

    #[test]
    fn exp_matches_worked_example() {
        // exp(3 l0) at bound 2 = 1 + 3 l0 + 9/2 l0^2
        let t = table();
        let p = TruncPoly::var(&t, 2, 0).scale(&rat_int(3));
        let e = p.exp().unwrap();
        assert_eq!(e.constant_coeff(), rat_int(1));
        assert_eq!(e.coeff(&Monomial(vec![1, 0])), rat_int(3));
        assert_eq!(e.coeff(&Monomial(vec![2, 0])), rat(9, 2));
        assert_eq!(e.to_text(), "1 + 3*l0 + 9/2*l0^2");
    }

    #[test]
    fn exp_requires_zero_constant_term() {
        let t = table();
        let p = TruncPoly::constant(&t, 2, rat_int(1));
        assert!(p.exp().is_err());
    }

    #[test]
    fn mismatched_bounds_error() {
        let t = table();
        let a = TruncPoly::var(&t, 2, 0);
        let b = TruncPoly::var(&t, 3, 0);
        assert!(a.try_add(&b).is_err());
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn substitution_and_eval() {
        let t = table();
        // 1 - 1/2 l0 l1
        let p = TruncPoly::from_terms(
            &t,
            2,
            [
                (Monomial(vec![0, 0]), rat_int(1)),
                (Monomial(vec![1, 1]), rat(-1, 2)),
            ],
        );
        let q = p.substitute(0, &rat_int(0));
        assert_eq!(q.to_text(), "1");
        assert_eq!(p.eval(&[rat_int(2), rat_int(3)]), rat_int(-2));
    }

    #[test]
    fn canonical_text_is_sorted_and_signed() {
        let t = table();
        let p = TruncPoly::from_terms(
            &t,
            3,
            [
                (Monomial(vec![1, 0]), rat(-1, 12)),
                (Monomial(vec![0, 0]), rat_int(1)),
                (Monomial(vec![1, 2]), rat(3, 2)),
            ],
        );
        assert_eq!(p.to_text(), "1 - 1/12*l0 + 3/2*l0*l1^2");
    }

    #[test]
    fn map_vars_embeds() {
        let small = VarTable::new(["l0"]);
        let big = VarTable::new(["r", "l0"]);
        let p = TruncPoly::var(&small, 2, 0);
        let q = p.map_vars(&big, &[1]);
        assert_eq!(q.to_text(), "l0");
    }
}
