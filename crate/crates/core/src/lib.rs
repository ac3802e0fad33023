//! Universally decodable matrices over GF(q).
//!
//! A family of L square matrices A_0, ..., A_{L-1} of size N over GF(q)
//! is universally decodable when every N x N matrix stacked from the
//! first s_l rows of each A_l, for any non-negative s_l summing to N,
//! has full rank. Such families exist exactly when L <= q + 1, and this
//! crate provides the explicit construction achieving the bound, an
//! exhaustive verifier for the rank condition, a brute-force existence
//! search at tiny parameters, and the matching erasure-channel encoder
//! and decoder.

pub mod codec;
pub mod gf;
pub mod poly;
pub mod udm;

pub use gf::{make_field, FieldElement, FieldSpec};
pub use udm::{construct, enumerate_compositions, Composition, MatrixGF, UdmFamily};
