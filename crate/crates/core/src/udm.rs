//! Universally decodable matrices: the explicit construction, exhaustive
//! verification of the rank condition, and brute-force existence search
//! at tiny parameters.

use crate::gf::{FieldElement, FieldSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense matrix over GF(q), row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixGF {
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl MatrixGF {
    pub fn new(rows: usize, cols: usize, entries: Vec<FieldElement>) -> MatrixGF {
        assert_eq!(entries.len(), rows * cols);
        MatrixGF { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> MatrixGF {
        MatrixGF {
            rows,
            cols,
            entries: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> MatrixGF {
        let mut m = MatrixGF::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = FieldElement::ONE;
        }
        m
    }

    /// Rows of the identity in reverse order (ones on the anti-diagonal).
    pub fn reversed_identity(n: usize) -> MatrixGF {
        let mut m = MatrixGF::zeros(n, n);
        for i in 0..n {
            m[(i, n - 1 - i)] = FieldElement::ONE;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, f: &FieldSpec, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = FieldElement::ZERO;
                for (c, &x) in v.iter().enumerate() {
                    acc = f.add(acc, f.mul(self[(r, c)], x));
                }
                acc
            })
            .collect()
    }

    pub fn mat_mul(&self, f: &FieldSpec, other: &MatrixGF) -> MatrixGF {
        assert_eq!(self.cols, other.rows);
        let mut out = MatrixGF::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] = f.add(out[(r, c)], f.mul(a, other[(k, c)]));
                }
            }
        }
        out
    }

    /// Rank over GF(q) by Gaussian elimination, first non-zero pivot.
    pub fn rank(&self, f: &FieldSpec) -> usize {
        let mut m = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let pivot = match (rank..rows).find(|&r| !m[r * cols + col].is_zero()) {
                Some(r) => r,
                None => continue,
            };
            for c in 0..cols {
                m.swap(rank * cols + c, pivot * cols + c);
            }
            let inv = f.inv(m[rank * cols + col]).expect("pivot is non-zero");
            for r in rank + 1..rows {
                let factor = f.mul(m[r * cols + col], inv);
                if factor.is_zero() {
                    continue;
                }
                for c in col..cols {
                    let sub = f.mul(factor, m[rank * cols + c]);
                    m[r * cols + c] = f.sub(m[r * cols + c], sub);
                }
            }
            rank += 1;
        }
        rank
    }

    fn to_nested(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|e| e.value()).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for MatrixGF {
    type Output = FieldElement;
    fn index(&self, (r, c): (usize, usize)) -> &FieldElement {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatrixGF {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut FieldElement {
        &mut self.entries[r * self.cols + c]
    }
}

/// An ordered tuple of non-negative parts summing to N.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Composition {
        Composition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.parts.iter().sum()
    }
}

/// All compositions of n into l non-negative parts, lexicographic order.
pub fn enumerate_compositions(n: usize, l: usize) -> CompositionIter {
    assert!(l >= 1);
    let mut first = vec![0; l];
    first[l - 1] = n;
    CompositionIter { next: Some(first) }
}

pub struct CompositionIter {
    next: Option<Vec<usize>>,
}

impl Iterator for CompositionIter {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let cur = self.next.take()?;
        let l = cur.len();
        // Successor: increment at the rightmost position that still has
        // weight to its right, dumping the remainder into the last slot.
        let mut succ = None;
        let mut suffix: usize = 0;
        for i in (0..l).rev() {
            if i < l - 1 && suffix > 0 {
                let mut next = cur.clone();
                next[i] += 1;
                for part in next.iter_mut().take(l - 1).skip(i + 1) {
                    *part = 0;
                }
                next[l - 1] = suffix - 1;
                succ = Some(next);
                break;
            }
            suffix += cur[i];
        }
        self.next = succ;
        Some(Composition::new(cur))
    }
}

/// C(n + l - 1, l - 1), the size of the composition set.
pub fn composition_count(n: usize, l: usize) -> u64 {
    assert!(l >= 1);
    let mut acc: u128 = 1;
    for j in 1..=(l - 1) as u128 {
        acc = acc * (n as u128 + j) / j;
    }
    acc as u64
}

/// L square matrices over GF(q) claimed to satisfy the rank condition:
/// every stack of first-row prefixes keyed by a composition of N has
/// full rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "UdmFamilyRepr", into = "UdmFamilyRepr")]
pub struct UdmFamily {
    field: FieldSpec,
    n: usize,
    l: usize,
    matrices: Vec<MatrixGF>,
}

#[derive(Serialize, Deserialize)]
struct UdmFamilyRepr {
    p: u32,
    s: u32,
    modulus: Vec<u32>,
    alpha: u32,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    l: usize,
    matrices: Vec<Vec<Vec<u32>>>,
}

impl From<UdmFamily> for UdmFamilyRepr {
    fn from(fam: UdmFamily) -> Self {
        UdmFamilyRepr {
            p: fam.field.p(),
            s: fam.field.s(),
            modulus: fam.field.modulus().to_vec(),
            alpha: fam.field.alpha().value(),
            n: fam.n,
            l: fam.l,
            matrices: fam.matrices.iter().map(|m| m.to_nested()).collect(),
        }
    }
}

impl TryFrom<UdmFamilyRepr> for UdmFamily {
    type Error = FamilyError;

    fn try_from(r: UdmFamilyRepr) -> Result<UdmFamily, FamilyError> {
        let field = FieldSpec::from_parts(u64::from(r.p), r.s, r.modulus, r.alpha)
            .map_err(|e| FamilyError::BadField(e.to_string()))?;
        if r.n == 0 || r.l == 0 || r.matrices.len() != r.l {
            return Err(FamilyError::BadShape);
        }
        let mut matrices = Vec::with_capacity(r.l);
        for rows in &r.matrices {
            if rows.len() != r.n {
                return Err(FamilyError::BadShape);
            }
            let mut entries = Vec::with_capacity(r.n * r.n);
            for row in rows {
                if row.len() != r.n {
                    return Err(FamilyError::BadShape);
                }
                for &v in row {
                    entries.push(
                        field
                            .element(v)
                            .map_err(|e| FamilyError::BadField(e.to_string()))?,
                    );
                }
            }
            matrices.push(MatrixGF::new(r.n, r.n, entries));
        }
        Ok(UdmFamily {
            field,
            n: r.n,
            l: r.l,
            matrices,
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("L = {l} exceeds the necessary bound L <= q + 1 = {bound} for N >= 2")]
    BoundExceeded { l: usize, bound: u32 },
    #[error("invalid field in family description: {0}")]
    BadField(String),
    #[error("family shape is inconsistent with the declared L and N")]
    BadShape,
}

/// Outcome of an exhaustive rank-condition check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub ok: bool,
    /// Compositions tested. Equals C(N+L-1, L-1) on success; on failure,
    /// the lexicographic position (1-based) of the first failing one.
    pub checked: u64,
    pub first_failure: Option<(Composition, usize)>,
}

impl UdmFamily {
    pub fn from_matrices(field: FieldSpec, matrices: Vec<MatrixGF>) -> UdmFamily {
        assert!(!matrices.is_empty());
        let n = matrices[0].rows();
        assert!(matrices.iter().all(|m| m.rows() == n && m.cols() == n));
        UdmFamily {
            field,
            l: matrices.len(),
            n,
            matrices,
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn matrices(&self) -> &[MatrixGF] {
        &self.matrices
    }

    pub fn matrix(&self, idx: usize) -> &MatrixGF {
        &self.matrices[idx]
    }

    /// Stacks the first `parts[l]` rows of each matrix, in order. The
    /// result has sum(parts) rows; for a composition of N it is square.
    pub fn stack_profile(&self, parts: &[usize]) -> MatrixGF {
        assert_eq!(parts.len(), self.l, "profile length must equal L");
        assert!(parts.iter().all(|&s| s <= self.n), "profile entry exceeds N");
        let total: usize = parts.iter().sum();
        let mut entries = Vec::with_capacity(total * self.n);
        for (mat, &take) in self.matrices.iter().zip(parts) {
            for r in 0..take {
                entries.extend_from_slice(mat.row(r));
            }
        }
        MatrixGF::new(total, self.n, entries)
    }

    pub fn stack(&self, c: &Composition) -> MatrixGF {
        assert_eq!(c.sum(), self.n, "composition must sum to N");
        self.stack_profile(c.parts())
    }

    /// Checks the rank condition over every composition of N into L parts.
    /// Composition checks run in parallel; the reported failure is the
    /// lexicographically smallest one regardless of thread count.
    pub fn verify(&self) -> VerificationReport {
        let comps: Vec<Composition> = enumerate_compositions(self.n, self.l).collect();
        let failure = comps.par_iter().enumerate().find_first(|(_, c)| {
            self.stack(c).rank(&self.field) != self.n
        });
        match failure {
            None => VerificationReport {
                ok: true,
                checked: comps.len() as u64,
                first_failure: None,
            },
            Some((idx, c)) => VerificationReport {
                ok: false,
                checked: idx as u64 + 1,
                first_failure: Some((c.clone(), self.stack(c).rank(&self.field))),
            },
        }
    }
}

/// The explicit construction: A_0 = I, A_1 = reversed I, and for l >= 2
/// the entry (n, k) of A_l is C(k, n) alpha^{(l-2)(k-n)}. Entries with
/// k < n are zero because the binomial vanishes, so the negative exponent
/// is never evaluated.
pub fn construct(field: &FieldSpec, l: usize, n: usize) -> Result<UdmFamily, FamilyError> {
    assert!(l >= 1 && n >= 1);
    if n >= 2 && l as u64 > u64::from(field.q()) + 1 {
        return Err(FamilyError::BoundExceeded {
            l,
            bound: field.q() + 1,
        });
    }
    let alpha = field.alpha();
    let mut matrices = Vec::with_capacity(l);
    matrices.push(MatrixGF::identity(n));
    if l >= 2 {
        matrices.push(MatrixGF::reversed_identity(n));
    }
    for ell in 0..l.saturating_sub(2) {
        let mut m = MatrixGF::zeros(n, n);
        for row in 0..n {
            for col in row..n {
                let b = field.binom(col as u64, row as u64);
                if b.is_zero() {
                    continue;
                }
                let power = field.pow(alpha, (ell * (col - row)) as u64);
                m[(row, col)] = field.mul(b, power);
            }
        }
        matrices.push(m);
    }
    Ok(UdmFamily {
        field: field.clone(),
        n,
        l,
        matrices,
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("search budget of {0} candidate matrices exceeded")]
    BudgetExceeded(u64),
}

/// Brute-force existence search with A_0 fixed to the identity. Right-
/// multiplying every matrix of a family by a fixed invertible M preserves
/// all stacked ranks, and the composition (N, 0, ..., 0) forces A_0
/// invertible, so searching with A_0 = I is exhaustive up to that
/// equivalence. Candidates for each later slot are pruned as soon as any
/// composition supported on the slots chosen so far fails the rank test.
///
/// `budget` caps the number of candidate matrices examined across the
/// whole search; exceeding it is reported distinctly from "none exists".
pub fn exhaustive_search(
    field: &FieldSpec,
    l: usize,
    n: usize,
    budget: u64,
) -> Result<Option<UdmFamily>, SearchError> {
    assert!(l >= 1 && n >= 1);
    let q = u64::from(field.q());
    let cells = (n * n) as u32;
    let per_slot = q.checked_pow(cells).filter(|&c| c <= budget);
    let per_slot = match per_slot {
        Some(c) => c,
        None => return Err(SearchError::BudgetExceeded(budget)),
    };
    let mut chosen = vec![MatrixGF::identity(n)];
    let mut examined: u64 = 0;
    let found = search_slot(field, l, n, per_slot, budget, &mut examined, &mut chosen)?;
    Ok(found.map(|mats| UdmFamily::from_matrices(field.clone(), mats)))
}

fn search_slot(
    field: &FieldSpec,
    l: usize,
    n: usize,
    per_slot: u64,
    budget: u64,
    examined: &mut u64,
    chosen: &mut Vec<MatrixGF>,
) -> Result<Option<Vec<MatrixGF>>, SearchError> {
    if chosen.len() == l {
        return Ok(Some(chosen.clone()));
    }
    let q = u64::from(field.q());
    for idx in 0..per_slot {
        *examined += 1;
        if *examined > budget {
            return Err(SearchError::BudgetExceeded(budget));
        }
        let mut entries = Vec::with_capacity(n * n);
        let mut v = idx;
        for _ in 0..n * n {
            entries.push(FieldElement((v % q) as u32));
            v /= q;
        }
        chosen.push(MatrixGF::new(n, n, entries));
        if partial_rank_ok(field, n, chosen) {
            if let Some(found) = search_slot(field, l, n, per_slot, budget, examined, chosen)? {
                return Ok(Some(found));
            }
        }
        chosen.pop();
    }
    Ok(None)
}

/// Checks every composition of n over the currently chosen slots that
/// actually uses the newest slot; earlier ones were checked before.
fn partial_rank_ok(field: &FieldSpec, n: usize, chosen: &[MatrixGF]) -> bool {
    let m = chosen.len();
    for c in enumerate_compositions(n, m) {
        if c.parts()[m - 1] == 0 {
            continue;
        }
        let total: usize = n;
        let mut entries = Vec::with_capacity(total * n);
        for (mat, &take) in chosen.iter().zip(c.parts()) {
            for r in 0..take {
                entries.extend_from_slice(mat.row(r));
            }
        }
        if MatrixGF::new(total, n, entries).rank(field) != n {
            return false;
        }
    }
    true
}
