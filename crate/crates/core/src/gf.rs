//! Exact arithmetic in GF(q) for prime powers q = p^s.
//!
//! Elements are stored in the canonical packed encoding: the residue
//! c_0 + c_1 X + ... + c_{s-1} X^{s-1} modulo the field modulus is the
//! integer c_0 + c_1 p + ... + c_{s-1} p^{s-1}. For s = 1 this is plain
//! arithmetic mod p.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field size.
pub const MAX_Q: u64 = 1 << 20;

/// Fields up to this size precompute a full multiplication table.
const MUL_TABLE_LIMIT: u64 = 256;

/// An element of GF(q) in canonical integer encoding, 0..q-1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size {0} exceeds the cap of 2^20")]
    TooLarge(u64),
    #[error("division by zero in GF(q)")]
    DivisionByZero,
    #[error("value {value} is not a canonical element of GF({q})")]
    InvalidElement { value: u32, q: u32 },
    #[error("invalid field description: {0}")]
    InvalidSpec(String),
}

/// A concrete realization of GF(q), q = p^s: characteristic, reduction
/// modulus and a primitive element. Construction via [`make_field`] is
/// deterministic, so two specs built from the same (p, s) are identical.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "FieldSpecRepr", into = "FieldSpecRepr")]
pub struct FieldSpec {
    p: u32,
    s: u32,
    q: u32,
    /// Monic degree-s polynomial over GF(p), constant term first.
    /// For s = 1 this is the formal polynomial X, unused.
    modulus: Vec<u32>,
    alpha: FieldElement,
    mul_table: Option<Vec<u32>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.s == other.s
            && self.modulus == other.modulus
            && self.alpha == other.alpha
    }
}

impl Eq for FieldSpec {}

#[derive(Serialize, Deserialize)]
struct FieldSpecRepr {
    p: u32,
    s: u32,
    modulus: Vec<u32>,
    alpha: u32,
}

impl From<FieldSpec> for FieldSpecRepr {
    fn from(f: FieldSpec) -> Self {
        FieldSpecRepr {
            p: f.p,
            s: f.s,
            modulus: f.modulus,
            alpha: f.alpha.0,
        }
    }
}

impl TryFrom<FieldSpecRepr> for FieldSpec {
    type Error = FieldError;

    fn try_from(r: FieldSpecRepr) -> Result<FieldSpec, FieldError> {
        FieldSpec::from_parts(r.p as u64, r.s, r.modulus, r.alpha)
    }
}

/// Builds the deterministic realization of GF(p^s): the lexicographically
/// smallest monic irreducible modulus (coefficients compared low-degree
/// first) and the smallest primitive element.
pub fn make_field(p: u64, s: u32) -> Result<FieldSpec, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if s == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let mut q: u64 = 1;
    for _ in 0..s {
        q = q.checked_mul(p).ok_or(FieldError::TooLarge(u64::MAX))?;
        if q > MAX_Q {
            return Err(FieldError::TooLarge(q));
        }
    }
    let modulus = if s == 1 {
        vec![0, 1]
    } else {
        smallest_irreducible(p as u32, s)
    };
    let mut field = FieldSpec {
        p: p as u32,
        s,
        q: q as u32,
        modulus,
        alpha: FieldElement::ZERO,
        mul_table: None,
    };
    if q <= MUL_TABLE_LIMIT {
        field.build_mul_table();
    }
    field.alpha = field
        .find_primitive()
        .expect("GF(q)* is cyclic, a generator exists");
    Ok(field)
}

impl FieldSpec {
    /// Rebuilds a field from serialized parts, validating every invariant.
    pub fn from_parts(
        p: u64,
        s: u32,
        modulus: Vec<u32>,
        alpha: u32,
    ) -> Result<FieldSpec, FieldError> {
        let mut field = make_field(p, s)?;
        if s > 1 && modulus != field.modulus {
            // A non-canonical modulus is accepted as long as it is monic,
            // irreducible and of the right degree.
            if modulus.len() != s as usize + 1
                || modulus.last() != Some(&1)
                || !modulus.iter().all(|&c| c < field.p)
                || !is_irreducible(&modulus[..], field.p)
            {
                return Err(FieldError::InvalidSpec(format!(
                    "modulus {:?} is not a monic irreducible of degree {} over GF({})",
                    modulus, s, p
                )));
            }
            field.modulus = modulus;
            field.mul_table = None;
            if u64::from(field.q) <= MUL_TABLE_LIMIT {
                field.build_mul_table();
            }
        }
        let a = field.element(alpha)?;
        if !field.is_primitive(a) {
            return Err(FieldError::InvalidSpec(format!(
                "{} is not a primitive element of GF({})",
                alpha, field.q
            )));
        }
        field.alpha = a;
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn alpha(&self) -> FieldElement {
        self.alpha
    }

    /// Checks the canonical range and wraps the value.
    pub fn element(&self, value: u32) -> Result<FieldElement, FieldError> {
        if value < self.q {
            Ok(FieldElement(value))
        } else {
            Err(FieldError::InvalidElement { value, q: self.q })
        }
    }

    /// All q elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    fn digits(&self, v: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.s as usize);
        let mut v = v;
        for _ in 0..self.s {
            out.push(v % self.p);
            v /= self.p;
        }
        out
    }

    fn pack(&self, digits: &[u32]) -> u32 {
        let mut v: u64 = 0;
        for &d in digits.iter().rev() {
            v = v * u64::from(self.p) + u64::from(d);
        }
        v as u32
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.0 < self.q && b.0 < self.q);
        if self.s == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        let da = self.digits(a.0);
        let db = self.digits(b.0);
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        FieldElement(self.pack(&sum))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        debug_assert!(a.0 < self.q);
        if self.s == 1 {
            return FieldElement((self.p - a.0) % self.p);
        }
        let da = self.digits(a.0);
        let neg: Vec<u32> = da.iter().map(|&x| (self.p - x) % self.p).collect();
        FieldElement(self.pack(&neg))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.0 < self.q && b.0 < self.q);
        if let Some(table) = &self.mul_table {
            return FieldElement(table[a.0 as usize * self.q as usize + b.0 as usize]);
        }
        self.mul_generic(a, b)
    }

    fn mul_generic(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.s == 1 {
            return FieldElement(((u64::from(a.0) * u64::from(b.0)) % u64::from(self.p)) as u32);
        }
        let s = self.s as usize;
        let p = u64::from(self.p);
        let da = self.digits(a.0);
        let db = self.digits(b.0);
        let mut prod = vec![0u64; 2 * s - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u64::from(x) * u64::from(y)) % p;
            }
        }
        // Reduce by the monic modulus: X^s = -(m_0 + m_1 X + ... + m_{s-1} X^{s-1}).
        for i in (s..2 * s - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..s {
                let m = u64::from(self.modulus[j]);
                prod[i - s + j] = (prod[i - s + j] + (p - m) % p * c) % p;
            }
        }
        let digits: Vec<u32> = prod[..s].iter().map(|&x| x as u32).collect();
        FieldElement(self.pack(&digits))
    }

    fn build_mul_table(&mut self) {
        let q = self.q as usize;
        let mut table = vec![0u32; q * q];
        for a in 0..q as u32 {
            for b in a..q as u32 {
                let v = self.mul_generic(FieldElement(a), FieldElement(b)).0;
                table[a as usize * q + b as usize] = v;
                table[b as usize * q + a as usize] = v;
            }
        }
        self.mul_table = Some(table);
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        let mut base = a;
        let mut e = e;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, u64::from(self.q) - 2))
    }

    /// The natural mapping of integers into the prime subfield.
    pub fn from_int(&self, n: u64) -> FieldElement {
        FieldElement((n % u64::from(self.p)) as u32)
    }

    /// C(k, n) computed in the integers and mapped into the prime subfield,
    /// evaluated via Lucas' theorem on base-p digits. Returns 0 when k < n.
    pub fn binom(&self, k: u64, n: u64) -> FieldElement {
        let p = u64::from(self.p);
        let mut k = k;
        let mut n = n;
        let mut acc: u64 = 1;
        while n > 0 || k > 0 {
            let kd = k % p;
            let nd = n % p;
            if nd > kd {
                return FieldElement::ZERO;
            }
            acc = acc * binom_mod_p(kd, nd, p) % p;
            k /= p;
            n /= p;
        }
        FieldElement(acc as u32)
    }

    /// True iff a generates the multiplicative group, i.e. has order q - 1.
    pub fn is_primitive(&self, a: FieldElement) -> bool {
        if a.is_zero() {
            return false;
        }
        let order = u64::from(self.q) - 1;
        prime_factors(order)
            .into_iter()
            .all(|r| self.pow(a, order / r) != FieldElement::ONE)
    }

    fn find_primitive(&self) -> Option<FieldElement> {
        (1..self.q).map(FieldElement).find(|&a| self.is_primitive(a))
    }
}

/// C(k, n) mod p for k, n < p, via the multiplicative formula with
/// modular inverses (valid since every denominator is below p).
fn binom_mod_p(k: u64, n: u64, p: u64) -> u64 {
    debug_assert!(k < p && n < p);
    if n > k {
        return 0;
    }
    let mut num: u64 = 1;
    let mut den: u64 = 1;
    for j in 1..=n {
        num = num * ((k - n + j) % p) % p;
        den = den * (j % p) % p;
    }
    num * pow_mod(den, p - 2, p) % p
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Polynomials over the prime field GF(p), constant term first, used only
// for modulus selection. Leading coefficients may be zero in intermediates.

fn pf_degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

/// Remainder of a by the monic divisor b over GF(p).
fn pf_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let db = pf_degree(b).expect("divisor must be non-zero");
    debug_assert_eq!(b[db], 1, "divisor must be monic");
    let mut r: Vec<u32> = a.to_vec();
    while let Some(dr) = pf_degree(&r) {
        if dr < db {
            break;
        }
        let c = r[dr];
        for j in 0..=db {
            let sub = (u64::from(c) * u64::from(b[j])) % u64::from(p);
            let idx = dr - db + j;
            r[idx] = ((u64::from(r[idx]) + u64::from(p) - sub) % u64::from(p)) as u32;
        }
    }
    r
}

/// Irreducibility by trial division: a reducible monic of degree s has a
/// monic factor of degree at most s/2.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let s = match pf_degree(m) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if s == 1 {
        return true;
    }
    for d in 1..=s / 2 {
        // All monic polynomials of degree d.
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut div = vec![0u32; d + 1];
            let mut v = idx;
            for coeff in div.iter_mut().take(d) {
                *coeff = (v % u64::from(p)) as u32;
                v /= u64::from(p);
            }
            div[d] = 1;
            if pf_degree(&pf_rem(m, &div, p)).is_none() {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest (low-degree-first) monic irreducible of
/// degree s over GF(p).
fn smallest_irreducible(p: u32, s: u32) -> Vec<u32> {
    let s = s as usize;
    let count = (p as u64).pow(s as u32);
    for idx in 0..count {
        // idx digits, most significant digit = constant term, so counting
        // upward enumerates coefficient lists in low-degree-first lex order.
        let mut m = vec![0u32; s + 1];
        let mut v = idx;
        for i in (0..s).rev() {
            m[i] = (v % u64::from(p)) as u32;
            v /= u64::from(p);
        }
        m[s] = 1;
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over GF(p)")
}
