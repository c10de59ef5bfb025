//! Polynomials in the polarisation parameter eps with exact rational
//! coefficients; degrees stay below the fan rank.

use num::{Signed, Zero};

use crate::rat::{format_rat, Rat};

/// Coefficient list, index k = coefficient of eps^k, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EpsPoly {
    coeffs: Vec<Rat>,
}

impl EpsPoly {
    pub fn zero() -> Self {
        EpsPoly::default()
    }

    pub fn constant(c: Rat) -> Self {
        EpsPoly::from_coeffs(vec![c])
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut p = EpsPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        EpsPoly::from_coeffs((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        EpsPoly::from_coeffs((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scaled(&self, k: &Rat) -> Self {
        EpsPoly::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn eval(&self, eps: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * eps + c;
        }
        acc
    }

    /// Order and value of the lowest nonzero coefficient.
    pub fn lowest_nonzero(&self) -> Option<(usize, &Rat)> {
        self.coeffs.iter().enumerate().find(|(_, c)| !c.is_zero())
    }

    /// Sign of the polynomial just right of zero: the sign of its lowest
    /// order nonzero coefficient (0 for the zero polynomial).
    pub fn sign_near_zero(&self) -> i32 {
        match self.lowest_nonzero() {
            None => 0,
            Some((_, c)) => {
                if c.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// A certified positive lower bound on the smallest positive root:
    /// on (0, bound) the polynomial keeps the sign of its lowest nonzero
    /// coefficient. None for the zero polynomial.
    pub fn positive_root_lower_bound(&self) -> Option<Rat> {
        let (k, ck) = self.lowest_nonzero()?;
        let tail: Rat = self.coeffs[k + 1..].iter().map(|c| c.abs()).sum();
        if tail.is_zero() {
            return None; // a monomial never changes sign on (0, inf)
        }
        // |c_k| / (|c_k| + sum |c_j|) <= 1 bounds the first sign change
        let ck = ck.abs();
        Some(&ck / (&ck + tail))
    }

    /// Text form like "1 - 10/3*eps + 1*eps^2".
    pub fn display(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = format_rat(&c.abs());
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            match k {
                0 => out.push_str(&mag),
                1 => out.push_str(&format!("{mag}*eps")),
                _ => out.push_str(&format!("{mag}*eps^{k}")),
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}
