//! Univariate polynomials over GF(q): evaluation, Hasse derivatives,
//! Taylor expansion around a point, and zero multiplicities.

use crate::gf::{FieldElement, FieldSpec};
use serde::{Deserialize, Serialize};

/// Dense polynomial, coefficient k at index k. The canonical form has no
/// trailing zero coefficients; the zero polynomial is the empty list and
/// its degree is `None` rather than any integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

/// Where a Hasse derivative is evaluated: a field element, or the point
/// at infinity (which reads off a high-order coefficient).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPoint {
    Finite(FieldElement),
    Infinity,
}

impl Poly {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Poly {
        while coeffs.last() == Some(&FieldElement::ZERO) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Poly {
        Poly::new(vec![c])
    }

    /// c X^k.
    pub fn monomial(c: FieldElement, k: usize) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElement::ZERO; k + 1];
        coeffs[k] = c;
        Poly { coeffs }
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

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of X^k, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> FieldElement {
        self.coeffs.get(k).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn add(&self, f: &FieldSpec, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| f.add(self.coeff(k), other.coeff(k)))
            .collect();
        Poly::new(coeffs)
    }

    pub fn sub(&self, f: &FieldSpec, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| f.sub(self.coeff(k), other.coeff(k)))
            .collect();
        Poly::new(coeffs)
    }

    pub fn scale(&self, f: &FieldSpec, c: FieldElement) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, f: &FieldSpec, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        Poly::new(coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, f: &FieldSpec, beta: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, beta), c);
        }
        acc
    }

    /// The i-th Hasse derivative: coefficient j of the result is
    /// C(j + i, i) a_{j+i}.
    pub fn hasse_derivative(&self, f: &FieldSpec, i: usize) -> Poly {
        if i >= self.coeffs.len() {
            return Poly::zero();
        }
        let coeffs = (i..self.coeffs.len())
            .map(|k| f.mul(f.binom(k as u64, i as u64), self.coeffs[k]))
            .collect();
        Poly::new(coeffs)
    }

    /// Evaluates the i-th Hasse derivative at a point. At infinity the
    /// value is the coefficient a_{N-1-i} of the length-N code context,
    /// which requires i < N and deg < N.
    pub fn hasse_eval(&self, f: &FieldSpec, i: usize, pt: EvalPoint, n: usize) -> FieldElement {
        match pt {
            EvalPoint::Finite(beta) => self.hasse_derivative(f, i).eval(f, beta),
            EvalPoint::Infinity => {
                assert!(i < n, "infinity evaluation needs i < N (i = {i}, N = {n})");
                assert!(
                    self.degree().is_none_or(|d| d < n),
                    "infinity evaluation needs deg < N"
                );
                self.coeff(n - 1 - i)
            }
        }
    }

    /// Coefficients of the expansion in powers of (X - beta); entry n is
    /// the n-th Hasse derivative at beta. Always deg + 1 entries (one
    /// zero entry for the zero polynomial).
    pub fn taylor_expand(&self, f: &FieldSpec, beta: FieldElement) -> Vec<FieldElement> {
        if self.is_zero() {
            return vec![FieldElement::ZERO];
        }
        (0..self.coeffs.len())
            .map(|n| self.hasse_derivative(f, n).eval(f, beta))
            .collect()
    }

    /// Inverse of [`Poly::taylor_expand`]: recovers the plain coefficients
    /// a_k = sum_n c_n C(n, k) (-beta)^{n-k}.
    pub fn taylor_contract(f: &FieldSpec, coeffs: &[FieldElement], beta: FieldElement) -> Poly {
        let neg_beta = f.neg(beta);
        let out = (0..coeffs.len())
            .map(|k| {
                let mut acc = FieldElement::ZERO;
                for (n, &c) in coeffs.iter().enumerate().skip(k) {
                    let term = f.mul(
                        f.mul(c, f.binom(n as u64, k as u64)),
                        f.pow(neg_beta, (n - k) as u64),
                    );
                    acc = f.add(acc, term);
                }
                acc
            })
            .collect();
        Poly::new(out)
    }

    /// Multiplicity of beta as a root: the index of the first non-zero
    /// Taylor coefficient around beta. Panics on the zero polynomial.
    pub fn zero_multiplicity(&self, f: &FieldSpec, beta: FieldElement) -> usize {
        assert!(!self.is_zero(), "zero polynomial has no finite multiplicity");
        self.taylor_expand(f, beta)
            .iter()
            .position(|c| !c.is_zero())
            .expect("a non-zero polynomial has a non-zero Taylor coefficient")
    }
}
