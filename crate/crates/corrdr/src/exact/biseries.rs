//! Truncated bivariate power series in `(u, y)` over ℚ.
//!
//! The generating series of correlated invariants is a series in the
//! insertion variable `u` and the degree variable `y`; truncation is
//! rectangular (a separate order in each variable), matching how the
//! closed forms are indexed by genus (`u`-order) and curve degree
//! (`y`-order).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::rational::{self, Rat};

/// Truncated series `Σ c[j][d] u^j y^d`, `j ≤ u_trunc`, `d ≤ y_trunc`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiSeries {
    u_trunc: usize,
    y_trunc: usize,
    terms: BTreeMap<(usize, usize), Rat>,
}

impl BiSeries {
    pub fn zero(u_trunc: usize, y_trunc: usize) -> Self {
        BiSeries {
            u_trunc,
            y_trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(u_trunc: usize, y_trunc: usize, c: Rat) -> Self {
        let mut s = Self::zero(u_trunc, y_trunc);
        s.add_term(0, 0, c);
        s
    }

    /// Series with a single term `c·u^j·y^d` (dropped if out of window).
    pub fn monomial(u_trunc: usize, y_trunc: usize, j: usize, d: usize, c: Rat) -> Self {
        let mut s = Self::zero(u_trunc, y_trunc);
        s.add_term(j, d, c);
        s
    }

    /// Lift a pure `u`-series given by coefficients of `u^0..`.
    pub fn from_u_series(u_trunc: usize, y_trunc: usize, coeffs: &[Rat]) -> Self {
        let mut s = Self::zero(u_trunc, y_trunc);
        for (j, c) in coeffs.iter().enumerate() {
            s.add_term(j, 0, c.clone());
        }
        s
    }

    pub fn u_trunc(&self) -> usize {
        self.u_trunc
    }

    pub fn y_trunc(&self) -> usize {
        self.y_trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, j: usize, d: usize, c: Rat) {
        if c.is_zero() || j > self.u_trunc || d > self.y_trunc {
            return;
        }
        let v = self.terms.entry((j, d)).or_insert_with(Rat::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&(j, d));
        }
    }

    fn check_window(&self, other: &Self) {
        assert_eq!(self.u_trunc, other.u_trunc, "u truncation mismatch");
        assert_eq!(self.y_trunc, other.y_trunc, "y truncation mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_window(other);
        let mut out = self.clone();
        for (&(j, d), c) in &other.terms {
            out.add_term(j, d, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.u_trunc, self.y_trunc);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c.clone();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_window(other);
        let mut out = Self::zero(self.u_trunc, self.y_trunc);
        for (&(j1, d1), c1) in &self.terms {
            for (&(j2, d2), c2) in &other.terms {
                if j1 + j2 > self.u_trunc || d1 + d2 > self.y_trunc {
                    continue;
                }
                out.add_term(j1 + j2, d1 + d2, c1.clone() * c2.clone());
            }
        }
        out
    }

    /// Coefficient of `u^j y^d`.
    ///
    /// # Panics
    /// Panics if `(j, d)` lies outside the truncation window — reading
    /// past the computed precision is a caller bug, not a zero.
    pub fn coeff(&self, j: usize, d: usize) -> Rat {
        assert!(
            j <= self.u_trunc && d <= self.y_trunc,
            "coefficient ({j},{d}) outside truncation window ({}, {})",
            self.u_trunc,
            self.y_trunc
        );
        self.terms.get(&(j, d)).cloned().unwrap_or_else(Rat::zero)
    }

    /// Canonical text form, terms ordered by `(u-degree, y-degree)`.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (&(j, d), c)) in self.terms.iter().enumerate() {
            let negative = c < &Rat::zero();
            let coeff_abs = rational::to_text(&c.clone().abs());
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut parts = Vec::new();
            match j {
                0 => {}
                1 => parts.push("u".to_string()),
                _ => parts.push(format!("u^{j}")),
            }
            match d {
                0 => {}
                1 => parts.push("y".to_string()),
                _ => parts.push(format!("y^{d}")),
            }
            if parts.is_empty() {
                out.push_str(&coeff_abs);
            } else if coeff_abs == "1" {
                out.push_str(&parts.join("*"));
            } else {
                out.push_str(&coeff_abs);
                out.push('*');
                out.push_str(&parts.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for BiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Truncated `u`-series of `sin(c·u)` as a coefficient vector; a direct
/// expansion kept as an independent cross-check of the `q = e^{iu}` route.
#[cfg(test)]
pub(crate) fn sin_series(c: &Rat, trunc: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); trunc + 1];
    let mut pow = Rat::one();
    let mut fact = Rat::one();
    for k in 0..=trunc {
        if k > 0 {
            pow *= c.clone();
            fact *= rational::rat_int(k as i64);
        }
        if k % 2 == 1 {
            let sign = if (k - 1) / 2 % 2 == 0 { 1 } else { -1 };
            out[k] = rational::rat_int(sign) * pow.clone() / fact.clone();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{rat, rat_int};

    #[test]
    fn sin_squared_doubling() {
        // 4 sin^2(u) = 2 - 2cos(2u): coefficient of u^2 is 4, of u^4 is -4/3
        let s = sin_series(&rat_int(1), 6);
        let sin = BiSeries::from_u_series(6, 1, &s);
        let prod = sin.mul(&sin).scale(&rat_int(4));
        assert_eq!(prod.coeff(2, 0), rat_int(4));
        assert_eq!(prod.coeff(4, 0), rat(-4, 3));
    }

    #[test]
    fn window_is_enforced() {
        let s = BiSeries::constant(2, 1, rat_int(1));
        let r = std::panic::catch_unwind(|| s.coeff(3, 0));
        assert!(r.is_err());
    }

    #[test]
    fn multiplication_truncates() {
        let y = BiSeries::monomial(2, 2, 0, 1, rat_int(1));
        let y2 = y.mul(&y);
        assert_eq!(y2.coeff(0, 2), rat_int(1));
        assert!(y2.mul(&y).is_zero());
    }

    #[test]
    fn text_form() {
        let s = BiSeries::monomial(3, 2, 2, 1, rat_int(4))
            .add(&BiSeries::monomial(3, 2, 0, 0, rat(-1, 2)));
        assert_eq!(s.to_text(), "-1/2 + 4*u^2*y");
    }
}
