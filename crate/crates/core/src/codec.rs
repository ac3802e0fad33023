//! Erasure coding over L parallel prefix-erasure channels: encoder,
//! channel, decoder, and a Monte Carlo / exhaustive simulator.

use crate::gf::FieldElement;
use crate::poly::{EvalPoint, Poly};
use crate::udm::{enumerate_compositions, Composition, UdmFamily};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// An information vector of N symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    symbols: Vec<FieldElement>,
}

impl Message {
    pub fn new(symbols: Vec<FieldElement>) -> Message {
        Message { symbols }
    }

    pub fn symbols(&self) -> &[FieldElement] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// The associated information polynomial u_0 + u_1 X + ... .
    pub fn poly(&self) -> Poly {
        Poly::new(self.symbols.clone())
    }
}

/// The L codeword vectors x_l = A_l u.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodewordSet {
    vectors: Vec<Vec<FieldElement>>,
}

impl CodewordSet {
    pub fn vectors(&self) -> &[Vec<FieldElement>] {
        &self.vectors
    }
}

/// Channel output: per channel, an intact prefix followed by erasures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceivedSet {
    symbols: Vec<Vec<Option<FieldElement>>>,
}

impl ReceivedSet {
    /// Builds a received set from explicit symbols, enforcing the prefix
    /// shape: no non-erased symbol may follow an erasure.
    pub fn new(symbols: Vec<Vec<Option<FieldElement>>>) -> Result<ReceivedSet, DecodeError> {
        for chan in &symbols {
            let prefix = chan.iter().take_while(|s| s.is_some()).count();
            if chan[prefix..].iter().any(|s| s.is_some()) {
                return Err(DecodeError::NotPrefixShaped);
            }
        }
        Ok(ReceivedSet { symbols })
    }

    pub fn symbols(&self) -> &[Vec<Option<FieldElement>>] {
        &self.symbols
    }

    /// Per-channel count of non-erased (prefix) symbols.
    pub fn profile(&self) -> Vec<usize> {
        self.symbols
            .iter()
            .map(|chan| chan.iter().take_while(|s| s.is_some()).count())
            .collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("insufficient observations: {have} non-erased symbols, need at least {need}")]
    Insufficient { have: usize, need: usize },
    #[error("received symbols are inconsistent with every codeword")]
    Inconsistent,
    #[error("stacked system is rank-deficient; the family does not satisfy the rank condition")]
    RankDeficient,
    #[error("received symbols are not prefix-shaped")]
    NotPrefixShaped,
}

/// The evaluation points attached to the channels: beta_0 = 0,
/// beta_1 = infinity, beta_{l+2} = alpha^l. Pairwise distinct whenever
/// L <= q + 1.
pub fn eval_points(family: &UdmFamily) -> Vec<EvalPoint> {
    let f = family.field();
    let mut pts = vec![EvalPoint::Finite(FieldElement::ZERO)];
    if family.l() >= 2 {
        pts.push(EvalPoint::Infinity);
    }
    for ell in 0..family.l().saturating_sub(2) {
        pts.push(EvalPoint::Finite(f.pow(f.alpha(), ell as u64)));
    }
    pts
}

pub fn encode(family: &UdmFamily, u: &Message) -> CodewordSet {
    assert_eq!(u.len(), family.n(), "message length must equal N");
    let f = family.field();
    CodewordSet {
        vectors: family
            .matrices()
            .iter()
            .map(|a| a.mul_vec(f, u.symbols()))
            .collect(),
    }
}

/// Applies the prefix-erasure channel: channel l delivers the first
/// profile[l] symbols and erases the rest.
pub fn transmit(x: &CodewordSet, profile: &[usize]) -> ReceivedSet {
    assert_eq!(profile.len(), x.vectors.len(), "profile length must equal L");
    let symbols = x
        .vectors
        .iter()
        .zip(profile)
        .map(|(chan, &keep)| {
            assert!(keep <= chan.len(), "profile entry exceeds N");
            chan.iter()
                .enumerate()
                .map(|(i, &sym)| if i < keep { Some(sym) } else { None })
                .collect()
        })
        .collect();
    ReceivedSet { symbols }
}

/// Recovers the message by solving the stacked linear system built from
/// the non-erased prefixes. With a genuine UDM family and enough
/// observations the solution is unique; surplus equations are kept and
/// checked for consistency rather than discarded.
pub fn decode(family: &UdmFamily, y: &ReceivedSet) -> Result<Message, DecodeError> {
    let n = family.n();
    let f = family.field();
    let profile = y.profile();
    let have: usize = profile.iter().sum();
    if have < n {
        return Err(DecodeError::Insufficient { have, need: n });
    }

    // Augmented system: first s_l rows of A_l against the received prefix.
    let stacked = family.stack_profile(&profile);
    let mut rows: Vec<(Vec<FieldElement>, FieldElement)> = Vec::with_capacity(have);
    let mut r = 0;
    for (l, &keep) in profile.iter().enumerate() {
        for i in 0..keep {
            let sym = y.symbols[l][i].expect("prefix symbol is non-erased");
            rows.push((stacked.row(r).to_vec(), sym));
            r += 1;
        }
    }

    // Forward elimination with first-nonzero pivots.
    let mut pivot_cols = Vec::with_capacity(n);
    let mut rank = 0;
    for col in 0..n {
        let pivot = match (rank..rows.len()).find(|&i| !rows[i].0[col].is_zero()) {
            Some(i) => i,
            None => continue,
        };
        rows.swap(rank, pivot);
        let inv = f.inv(rows[rank].0[col]).expect("pivot is non-zero");
        for i in rank + 1..rows.len() {
            let factor = f.mul(rows[i].0[col], inv);
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let sub = f.mul(factor, rows[rank].0[c]);
                rows[i].0[c] = f.sub(rows[i].0[c], sub);
            }
            let sub = f.mul(factor, rows[rank].1);
            rows[i].1 = f.sub(rows[i].1, sub);
        }
        pivot_cols.push(col);
        rank += 1;
    }

    // Rows below the rank are all-zero on the left; a non-zero right-hand
    // side there means no codeword explains the observations.
    if rows[rank..].iter().any(|(_, rhs)| !rhs.is_zero()) {
        return Err(DecodeError::Inconsistent);
    }
    if rank < n {
        return Err(DecodeError::RankDeficient);
    }

    // Back substitution.
    let mut u = vec![FieldElement::ZERO; n];
    for i in (0..rank).rev() {
        let col = pivot_cols[i];
        let mut acc = rows[i].1;
        for c in col + 1..n {
            acc = f.sub(acc, f.mul(rows[i].0[c], u[c]));
        }
        u[col] = f.mul(acc, f.inv(rows[i].0[col]).expect("pivot is non-zero"));
    }
    Ok(Message::new(u))
}

/// True iff the erasure profile still pins down every message: the full
/// stacked matrix has rank N.
pub fn decode_capability_check(family: &UdmFamily, profile: &[usize]) -> bool {
    family.stack_profile(profile).rank(family.field()) == family.n()
}

/// How erasure profiles are drawn in simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileMode {
    /// Uniform over the compositions of N into L parts (sum always N).
    Uniform,
    /// Each channel keeps an independent uniform prefix in 0..=N.
    Iid,
    /// Deterministic sweep over all compositions of N into L parts.
    Exhaustive,
}

/// Uniform draw from the composition set, via a random bars placement.
pub fn sample_profile_uniform<R: Rng>(rng: &mut R, n: usize, l: usize) -> Vec<usize> {
    assert!(l >= 1);
    if l == 1 {
        return vec![n];
    }
    let mut bars: Vec<usize> = sample(rng, n + l - 1, l - 1).into_iter().collect();
    bars.sort_unstable();
    let mut parts = Vec::with_capacity(l);
    // Bar at slot b with i bars before it has b - i stars to its left.
    let mut prev = 0;
    for (i, &b) in bars.iter().enumerate() {
        let stars = b - i;
        parts.push(stars - prev);
        prev = stars;
    }
    parts.push(n - prev);
    parts
}

/// Independent per-channel truncation, uniform prefix length in 0..=N.
pub fn sample_profile_iid<R: Rng>(rng: &mut R, n: usize, l: usize) -> Vec<usize> {
    (0..l).map(|_| rng.gen_range(0..=n)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureRecord {
    pub profile: Vec<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationStats {
    pub trials: u64,
    pub profile_mode: ProfileMode,
    pub seed: u64,
    pub successes: u64,
    pub failures: Vec<FailureRecord>,
}

/// Runs encode -> channel -> decode round trips with random messages and
/// reports successes and failure reasons. In exhaustive mode every
/// composition of N into L parts is swept `trials` times.
pub fn simulate(family: &UdmFamily, trials: u64, mode: ProfileMode, seed: u64) -> SimulationStats {
    let f = family.field();
    let n = family.n();
    let l = family.l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = SimulationStats {
        trials: 0,
        profile_mode: mode,
        seed,
        successes: 0,
        failures: Vec::new(),
    };

    let run_one = |rng: &mut ChaCha8Rng, profile: &[usize], stats: &mut SimulationStats| {
        let u = Message::new((0..n).map(|_| FieldElement(rng.gen_range(0..f.q()))).collect());
        let y = transmit(&encode(family, &u), profile);
        stats.trials += 1;
        match decode(family, &y) {
            Ok(decoded) if decoded == u => stats.successes += 1,
            Ok(_) => stats.failures.push(FailureRecord {
                profile: profile.to_vec(),
                reason: "decoded to a different message".into(),
            }),
            Err(e) => stats.failures.push(FailureRecord {
                profile: profile.to_vec(),
                reason: e.to_string(),
            }),
        }
    };

    match mode {
        ProfileMode::Exhaustive => {
            let comps: Vec<Composition> = enumerate_compositions(n, l).collect();
            for _ in 0..trials {
                for c in &comps {
                    run_one(&mut rng, c.parts(), &mut stats);
                }
            }
        }
        ProfileMode::Uniform => {
            for _ in 0..trials {
                let profile = sample_profile_uniform(&mut rng, n, l);
                run_one(&mut rng, &profile, &mut stats);
            }
        }
        ProfileMode::Iid => {
            for _ in 0..trials {
                let profile = sample_profile_iid(&mut rng, n, l);
                run_one(&mut rng, &profile, &mut stats);
            }
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::udm::construct;

    fn fe(v: u32) -> FieldElement {
        FieldElement(v)
    }

    fn msg(vals: &[u32]) -> Message {
        Message::new(vals.iter().map(|&v| fe(v)).collect())
    }

    #[test]
    fn encode_examples() {
        let g3 = make_field(3, 1).unwrap();
        let fam = construct(&g3, 4, 3).unwrap();

        let zero = encode(&fam, &msg(&[0, 0, 0]));
        assert!(zero.vectors().iter().flatten().all(|s| s.is_zero()));

        // First columns of A_2 and A_3.
        let x = encode(&fam, &msg(&[1, 0, 0]));
        assert_eq!(x.vectors()[2], vec![fe(1), fe(0), fe(0)]);
        assert_eq!(x.vectors()[3], vec![fe(1), fe(0), fe(0)]);

        // u(X) = X^2: third column of A_2, i.e. the Taylor data at beta = 1.
        let x = encode(&fam, &msg(&[0, 0, 1]));
        assert_eq!(x.vectors()[2], vec![fe(1), fe(2), fe(1)]);
        let expansion = msg(&[0, 0, 1]).poly().taylor_expand(&g3, fe(1));
        assert_eq!(x.vectors()[2], expansion);
    }

    #[test]
    fn matrix_and_hasse_views_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (p, s, l, n) in [(3, 1, 4, 3), (2, 1, 3, 4), (2, 2, 5, 3), (5, 1, 6, 4)] {
            let f = make_field(p, s).unwrap();
            let fam = construct(&f, l, n).unwrap();
            let pts = eval_points(&fam);
            for _ in 0..100 {
                let u = Message::new((0..n).map(|_| fe(rng.gen_range(0..f.q()))).collect());
                let x = encode(&fam, &u);
                let poly = u.poly();
                for (ell, pt) in pts.iter().enumerate() {
                    for i in 0..n {
                        assert_eq!(x.vectors()[ell][i], poly.hasse_eval(&f, i, *pt, n));
                    }
                }
            }
        }
    }

    #[test]
    fn transmit_examples() {
        let g2 = make_field(2, 1).unwrap();
        let fam = construct(&g2, 2, 5).unwrap();
        let x = encode(&fam, &msg(&[1, 0, 1, 1, 0]));

        let intact = transmit(&x, &[5, 5]);
        assert_eq!(intact.profile(), vec![5, 5]);
        assert!(intact.symbols().iter().flatten().all(|s| s.is_some()));

        let gone = transmit(&x, &[0, 0]);
        assert!(gone.symbols().iter().flatten().all(|s| s.is_none()));

        let partial = transmit(&x, &[3, 2]);
        assert_eq!(partial.profile(), vec![3, 2]);
        assert_eq!(partial.symbols()[1][1], Some(x.vectors()[1][1]));
        assert_eq!(partial.symbols()[1][2], None);
    }

    #[test]
    fn decode_direct_channels() {
        let g3 = make_field(3, 1).unwrap();
        let fam = construct(&g3, 4, 3).unwrap();
        let u = msg(&[2, 0, 1]);
        let x = encode(&fam, &u);

        // All of channel 0: read off directly (A_0 = I).
        assert_eq!(decode(&fam, &transmit(&x, &[3, 0, 0, 0])).unwrap(), u);
        // All of channel 1: message reversed (A_1 = J).
        assert_eq!(decode(&fam, &transmit(&x, &[0, 3, 0, 0])).unwrap(), u);
    }

    #[test]
    fn decode_round_trip_all_compositions() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for (p, s, l, n) in [(3, 1, 4, 3), (2, 1, 3, 4), (2, 2, 4, 3)] {
            let f = make_field(p, s).unwrap();
            let fam = construct(&f, l, n).unwrap();
            for c in enumerate_compositions(n, l) {
                for _ in 0..20 {
                    let u = Message::new((0..n).map(|_| fe(rng.gen_range(0..f.q()))).collect());
                    let y = transmit(&encode(&fam, &u), c.parts());
                    assert_eq!(decode(&fam, &y).unwrap(), u, "profile {:?}", c.parts());
                }
            }
        }
    }

    #[test]
    fn decode_surplus_and_errors() {
        let g3 = make_field(3, 1).unwrap();
        let fam = construct(&g3, 4, 3).unwrap();
        let u = msg(&[1, 2, 0]);
        let x = encode(&fam, &u);

        // Overdetermined but consistent.
        assert_eq!(decode(&fam, &transmit(&x, &[3, 3, 3, 3])).unwrap(), u);

        // Too few observations.
        assert_eq!(
            decode(&fam, &transmit(&x, &[1, 1, 0, 0])),
            Err(DecodeError::Insufficient { have: 2, need: 3 })
        );

        // Corrupt one surplus symbol: the decoder must notice.
        let mut symbols = transmit(&x, &[3, 2, 0, 0]).symbols().to_vec();
        let old = symbols[1][0].unwrap();
        symbols[1][0] = Some(g3.add(old, fe(1)));
        let corrupted = ReceivedSet::new(symbols).unwrap();
        assert_eq!(decode(&fam, &corrupted), Err(DecodeError::Inconsistent));

        // Non-prefix erasure patterns are rejected at construction.
        assert_eq!(
            ReceivedSet::new(vec![vec![None, Some(fe(1))]]),
            Err(DecodeError::NotPrefixShaped)
        );
    }

    #[test]
    fn capability_check_examples() {
        let g3 = make_field(3, 1).unwrap();
        let fam = construct(&g3, 4, 3).unwrap();
        for c in enumerate_compositions(3, 4) {
            assert!(decode_capability_check(&fam, c.parts()));
        }
        assert!(!decode_capability_check(&fam, &[1, 1, 0, 0]));

        // A broken family fails at its witness composition.
        let bad = UdmFamily::from_matrices(
            g3.clone(),
            vec![
                crate::udm::MatrixGF::identity(3),
                crate::udm::MatrixGF::identity(3),
            ],
        );
        let report = bad.verify();
        let (witness, _) = report.first_failure.unwrap();
        assert!(!decode_capability_check(&bad, witness.parts()));
    }

    #[test]
    fn profile_samplers() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..500 {
            let p = sample_profile_uniform(&mut rng, 3, 4);
            assert_eq!(p.iter().sum::<usize>(), 3);
            assert_eq!(p.len(), 4);
            seen.insert(p);
        }
        // All 20 compositions show up over 500 draws.
        assert_eq!(seen.len(), 20);

        for _ in 0..100 {
            let p = sample_profile_iid(&mut rng, 3, 4);
            assert!(p.iter().all(|&s| s <= 3));
        }
    }

    #[test]
    fn simulate_modes() {
        let g3 = make_field(3, 1).unwrap();
        let fam = construct(&g3, 4, 3).unwrap();

        let stats = simulate(&fam, 5, ProfileMode::Exhaustive, 7);
        assert_eq!(stats.trials, 100);
        assert_eq!(stats.successes, 100);
        assert!(stats.failures.is_empty());

        let stats = simulate(&fam, 200, ProfileMode::Uniform, 7);
        assert_eq!(stats.successes, 200);

        // Same seed, same outcome.
        let a = simulate(&fam, 50, ProfileMode::Iid, 42);
        let b = simulate(&fam, 50, ProfileMode::Iid, 42);
        assert_eq!(a.successes, b.successes);
        // Iid profiles may fall short of N symbols; every failure must be
        // an insufficiency, never a wrong decode.
        for failure in &a.failures {
            assert!(failure.reason.contains("insufficient"));
        }
        assert_eq!(a.successes + a.failures.len() as u64, a.trials);
    }

    #[test]
    fn injectivity_by_polynomial_enumeration() {
        // For q = 3, N = 3, L = 4: no non-zero polynomial of degree < N
        // meets all the boundary erasure constraints, for any composition.
        let g3 = make_field(3, 1).unwrap();
        let fam = construct(&g3, 4, 3).unwrap();
        let pts = eval_points(&fam);
        let n = 3;
        for c in enumerate_compositions(n, 4) {
            for code in 1..27u32 {
                let u = Message::new(vec![fe(code % 3), fe(code / 3 % 3), fe(code / 9 % 3)]);
                let poly = u.poly();
                let all_zero = c.parts().iter().enumerate().all(|(ell, &s)| {
                    (0..s).all(|i| poly.hasse_eval(&g3, i, pts[ell], n).is_zero())
                });
                assert!(!all_zero, "non-zero message hidden by profile {:?}", c.parts());
            }
        }
    }
}
