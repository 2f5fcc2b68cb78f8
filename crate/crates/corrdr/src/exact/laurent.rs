//! Laurent polynomials in `q^(1/2)` over ℚ.
//!
//! Exponents are stored as integers counting units of `q^(1/2)`, so the
//! symmetrized quantum integer `[n] = q^(n/2) − q^(−n/2)` has support
//! `{n, −n}`. The imaginary unit is never materialized: substituting
//! `q = e^(iu)` is exposed as a pair of real truncated `u`-series (the
//! cosine and sine parts), which is all the downstream series identities
//! need.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::rational::{self, Rat};
use crate::{Error, Result};

/// Laurent polynomial in `q^(1/2)`; keys are exponents in `q^(1/2)` units.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentQ {
    terms: BTreeMap<i64, Rat>,
}

impl LaurentQ {
    pub fn zero() -> Self {
        LaurentQ::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, Rat::one())
    }

    /// `c · q^(units/2)`.
    pub fn monomial(units: i64, c: Rat) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(units, c);
        }
        p
    }

    /// The quantum integer `[n] = q^(n/2) − q^(−n/2)`; `[0] = 0` and
    /// `[−n] = −[n]`.
    pub fn qint(n: i64) -> Self {
        let mut p = Self::zero();
        if n != 0 {
            p.terms.insert(n, Rat::one());
            p.terms.insert(-n, -Rat::one());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, units: i64) -> Rat {
        self.terms.get(&units).cloned().unwrap_or_else(Rat::zero)
    }

    fn add_term(&mut self, units: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        let v = self.terms.entry(units).or_insert_with(Rat::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&units);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&u, c) in &other.terms {
            out.add_term(u, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = -v.clone();
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c.clone();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&u1, c1) in &self.terms {
            for (&u2, c2) in &other.terms {
                out.add_term(u1 + u2, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Exact division; errors if `other` is zero or does not divide `self`.
    pub fn div_exact(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::domain("division by the zero Laurent polynomial"));
        }
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let (&lead_u, lead_c) = other.terms.last_key_value().unwrap();
        let lead_c = lead_c.clone();
        // Any quotient must trail at trail(self) − trail(other); a step that
        // would dip below that proves the division inexact (and bounds the
        // loop, since the remainder's lead strictly decreases).
        let quot_trail = match rem.terms.first_key_value() {
            None => return Ok(Self::zero()),
            Some((&t, _)) => t - other.terms.first_key_value().unwrap().0,
        };
        while !rem.is_zero() {
            let (&ru, rc) = rem.terms.last_key_value().unwrap();
            if ru - lead_u < quot_trail {
                return Err(Error::domain("inexact Laurent division"));
            }
            let factor = Self::monomial(ru - lead_u, rc.clone() / lead_c.clone());
            quot = quot.add(&factor);
            rem = rem.sub(&factor.mul(other));
        }
        Ok(quot)
    }

    /// The bar involution `q^(1/2) ↦ q^(−1/2)`.
    pub fn bar(&self) -> Self {
        let mut out = Self::zero();
        for (&u, c) in &self.terms {
            out.terms.insert(-u, c.clone());
        }
        out
    }

    /// Substitute `q = e^(iu)` and expand to a truncated `u`-series:
    /// returns `(re, im)` with `f(e^(iu)) = re(u) + i·im(u)`, both as
    /// coefficient vectors of `u^0 … u^trunc`.
    ///
    /// Each `q^(m/2)` contributes `cos(mu/2) + i·sin(mu/2)`; everything
    /// stays rational.
    pub fn expand_iu(&self, trunc: usize) -> (Vec<Rat>, Vec<Rat>) {
        let mut re = vec![Rat::zero(); trunc + 1];
        let mut im = vec![Rat::zero(); trunc + 1];
        for (&m, c) in &self.terms {
            // q^(m/2) = e^(i u m/2) = Σ_k (i m/2)^k u^k / k!
            let half = rational::rat(m, 2);
            let mut pow = Rat::one(); // half^k
            let mut fact = Rat::one(); // k!
            for k in 0..=trunc {
                if k > 0 {
                    pow *= half.clone();
                    fact *= rational::rat_int(k as i64);
                }
                let coeff = c.clone() * pow.clone() / fact.clone();
                match k % 4 {
                    0 => re[k] += coeff,
                    1 => im[k] += coeff,
                    2 => re[k] -= coeff,
                    3 => im[k] -= coeff,
                    _ => unreachable!(),
                }
            }
        }
        (re, im)
    }

    /// Canonical text form, exponents ascending; even units render as
    /// integer powers of `q`, odd units as `q^(n/2)`.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (&u, c)) in self.terms.iter().enumerate() {
            let negative = c < &Rat::zero();
            let coeff_abs = rational::to_text(&c.clone().abs());
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let power = match u {
                0 => None,
                2 => Some("q".to_string()),
                u if u % 2 == 0 => Some(format!("q^{}", u / 2)),
                u => Some(format!("q^({}/2)", u)),
            };
            match power {
                None => out.push_str(&coeff_abs),
                Some(p) => {
                    if coeff_abs == "1" {
                        out.push_str(&p);
                    } else {
                        out.push_str(&coeff_abs);
                        out.push('*');
                        out.push_str(&p);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{rat, rat_int};

    #[test]
    fn qint_basics() {
        assert!(LaurentQ::qint(0).is_zero());
        assert_eq!(LaurentQ::qint(-3), LaurentQ::qint(3).neg());
        assert_eq!(LaurentQ::qint(2).to_text(), "-q^-1 + q");
        assert_eq!(LaurentQ::qint(1).to_text(), "-q^(-1/2) + q^(1/2)");
    }

    #[test]
    fn quantum_two_over_one() {
        let q2 = LaurentQ::qint(2);
        let q1 = LaurentQ::qint(1);
        let ratio = q2.div_exact(&q1).unwrap();
        let expected = LaurentQ::monomial(1, Rat::one()).add(&LaurentQ::monomial(-1, Rat::one()));
        assert_eq!(ratio, expected); // q^(1/2) + q^(-1/2)
        assert_eq!(ratio.mul(&q1), q2);
    }

    #[test]
    fn inexact_division_detected() {
        // [3]/[2] is not a Laurent polynomial
        assert!(LaurentQ::qint(3).div_exact(&LaurentQ::qint(2)).is_err());
        // but [4]/[2] = q + q^-1 is
        let r = LaurentQ::qint(4).div_exact(&LaurentQ::qint(2)).unwrap();
        assert_eq!(r.coeff(2), rat_int(1));
        assert_eq!(r.coeff(-2), rat_int(1));
    }

    #[test]
    fn bar_involution() {
        let f = LaurentQ::monomial(3, rat(1, 2)).add(&LaurentQ::monomial(-1, rat_int(4)));
        let b = f.bar();
        assert_eq!(b.coeff(-3), rat(1, 2));
        assert_eq!(b.coeff(1), rat_int(4));
        assert_eq!(LaurentQ::qint(5).bar(), LaurentQ::qint(5).neg());
    }

    #[test]
    fn qint_expands_to_sine() {
        // [n] at q = e^(iu) is 2i sin(nu/2): zero real part, odd imaginary
        // part with coefficients 2(−1)^j (n/2)^(2j+1)/(2j+1)!.
        let n = 3i64;
        let (re, im) = LaurentQ::qint(n).expand_iu(7);
        for c in &re {
            assert!(c.is_zero());
        }
        let half = rat(n, 2);
        let mut fact = Rat::one();
        for k in 0..=7usize {
            if k > 0 {
                fact *= rat_int(k as i64);
            }
            if k % 2 == 0 {
                assert!(im[k].is_zero());
            } else {
                let j = (k - 1) / 2;
                let sign = if j % 2 == 0 { 1 } else { -1 };
                let expected = rat_int(2 * sign) * crate::exact::rational::pow(&half, k as i64)
                    / fact.clone();
                assert_eq!(im[k], expected, "u^{k} coefficient");
            }
        }
    }
}
