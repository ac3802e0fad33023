//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test --test acceptance -- --nocapture` to see them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use udm_codes::codec::{decode, encode, eval_points, transmit, Message};
use udm_codes::gf::{make_field, FieldElement, FieldSpec};
use udm_codes::poly::Poly;
use udm_codes::udm::{
    composition_count, construct, enumerate_compositions, exhaustive_search, Composition,
    MatrixGF, UdmFamily,
};

fn fe(v: u32) -> FieldElement {
    FieldElement(v)
}

/// (p, s) realizations of q in {2, 3, 4, 5, 7, 8, 9}.
const SWEEP_FIELDS: &[(u64, u32)] = &[(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)];

fn sweep_families() -> Vec<UdmFamily> {
    let mut out = Vec::new();
    for &(p, s) in SWEEP_FIELDS {
        let f = make_field(p, s).unwrap();
        for n in 2..=6 {
            for l in 2..=(f.q() as usize + 1) {
                out.push(construct(&f, l, n).unwrap());
            }
        }
    }
    out
}

fn random_message(rng: &mut ChaCha8Rng, f: &FieldSpec, n: usize) -> Message {
    Message::new((0..n).map(|_| fe(rng.gen_range(0..f.q()))).collect())
}

fn random_poly(rng: &mut ChaCha8Rng, f: &FieldSpec, max_deg: usize) -> Poly {
    let deg = rng.gen_range(0..=max_deg);
    Poly::new((0..=deg).map(|_| fe(rng.gen_range(0..f.q()))).collect())
}

fn linear(f: &FieldSpec, beta: FieldElement) -> Poly {
    Poly::new(vec![f.neg(beta), FieldElement::ONE])
}

#[test]
fn criterion_1_golden_reproduction() {
    let start = Instant::now();
    let g3 = make_field(3, 1).unwrap();
    assert_eq!(g3.alpha(), fe(2));
    let fam = construct(&g3, 4, 3).unwrap();

    let expect = |rows: &[[u32; 3]; 3]| {
        MatrixGF::new(
            3,
            3,
            rows.iter().flatten().map(|&v| fe(v)).collect(),
        )
    };
    assert_eq!(fam.matrix(0), &MatrixGF::identity(3));
    assert_eq!(fam.matrix(1), &MatrixGF::reversed_identity(3));
    assert_eq!(fam.matrix(2), &expect(&[[1, 1, 1], [0, 1, 2], [0, 0, 1]]));
    assert_eq!(fam.matrix(3), &expect(&[[1, 2, 1], [0, 1, 1], [0, 0, 1]]));

    let report = fam.verify();
    assert!(report.ok);
    assert_eq!(report.checked, 20);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    println!("criterion 1 (golden reproduction): PASS ({elapsed:?})");
}

#[test]
fn criterion_2_existence_sweep() {
    let start = Instant::now();
    let mut verified = 0;
    for fam in sweep_families() {
        let report = fam.verify();
        assert!(
            report.ok,
            "construction failed verification at q={}, L={}, N={}",
            fam.field().q(),
            fam.l(),
            fam.n()
        );
        assert_eq!(report.checked, composition_count(fam.n(), fam.l()));
        verified += 1;
    }
    // q = 9, N = 6, L = 10 is the largest case: C(15, 9) = 5005 checks.
    assert_eq!(composition_count(6, 10), 5005);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget 60 s");
    println!("criterion 2 (existence sweep, {verified} families): PASS ({elapsed:?})");
}

#[test]
fn criterion_3_nonexistence_frontier() {
    let start = Instant::now();
    let g2 = make_field(2, 1).unwrap();
    let g3 = make_field(3, 1).unwrap();
    let budget = 1_000_000_000;

    assert_eq!(exhaustive_search(&g2, 4, 2, budget).unwrap(), None);
    assert_eq!(exhaustive_search(&g3, 5, 2, budget).unwrap(), None);

    let found = exhaustive_search(&g2, 3, 2, budget).unwrap();
    assert!(found.expect("(3,2,2) family exists").verify().ok);
    let found = exhaustive_search(&g3, 4, 2, budget).unwrap();
    assert!(found.expect("(4,2,3) family exists").verify().ok);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}, budget 5 min");
    println!("criterion 3 (non-existence frontier): PASS ({elapsed:?})");
}

#[test]
fn criterion_4_rank_golden_values() {
    let g2 = make_field(2, 1).unwrap();
    let pair = construct(&g2, 2, 5).unwrap();
    assert_eq!(pair.stack(&Composition::new(vec![3, 2])).rank(&g2), 5);

    let g3 = make_field(3, 1).unwrap();
    let fam = construct(&g3, 4, 3).unwrap();
    for parts in [[0, 0, 3, 0], [0, 0, 1, 2], [1, 1, 0, 1]] {
        assert_eq!(fam.stack(&Composition::new(parts.to_vec())).rank(&g3), 3);
    }
    println!("criterion 4 (rank golden values): PASS");
}

#[test]
fn criterion_5_codec_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut decodes = 0u64;
    for fam in sweep_families() {
        let f = fam.field().clone();
        for c in enumerate_compositions(fam.n(), fam.l()) {
            for _ in 0..20 {
                let u = random_message(&mut rng, &f, fam.n());
                let y = transmit(&encode(&fam, &u), c.parts());
                let decoded = decode(&fam, &y).unwrap_or_else(|e| {
                    panic!(
                        "decode failed at q={}, L={}, N={}, profile {:?}: {e}",
                        f.q(),
                        fam.l(),
                        fam.n(),
                        c.parts()
                    )
                });
                assert_eq!(decoded, u);
                decodes += 1;
            }
        }
    }
    println!("criterion 5 (codec round trip, {decodes} decodes, 0 failures): PASS");
}

#[test]
fn criterion_6_matrix_hasse_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for fam in sweep_families() {
        let f = fam.field().clone();
        let pts = eval_points(&fam);
        let n = fam.n();
        for _ in 0..1000 {
            let u = random_message(&mut rng, &f, n);
            let x = encode(&fam, &u);
            let poly = u.poly();
            for (ell, pt) in pts.iter().enumerate() {
                let expected: Vec<FieldElement> =
                    (0..n).map(|i| poly.hasse_eval(&f, i, *pt, n)).collect();
                assert_eq!(
                    x.vectors()[ell],
                    expected,
                    "duality broken at q={}, L={}, N={}, channel {ell}",
                    f.q(),
                    fam.l(),
                    n
                );
            }
        }
    }
    println!("criterion 6 (matrix/Hasse duality): PASS");
}

#[test]
fn criterion_7_hasse_property_suite() {
    let fields: Vec<FieldSpec> = [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (3, 2)]
        .iter()
        .map(|&(p, s)| make_field(p, s).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let per_field = 500;

    for f in &fields {
        for _ in 0..per_field {
            let a = random_poly(&mut rng, f, 12);
            let b = random_poly(&mut rng, f, 12);
            let gamma = fe(rng.gen_range(0..f.q()));
            let eta = fe(rng.gen_range(0..f.q()));
            let i = rng.gen_range(0..6usize);

            // Linearity.
            let lhs = a.scale(f, gamma).add(f, &b.scale(f, eta)).hasse_derivative(f, i);
            let rhs = a
                .hasse_derivative(f, i)
                .scale(f, gamma)
                .add(f, &b.hasse_derivative(f, i).scale(f, eta));
            assert_eq!(lhs, rhs);

            // Product rule.
            let lhs = a.mul(f, &b).hasse_derivative(f, i);
            let mut rhs = Poly::zero();
            for i1 in 0..=i {
                rhs = rhs.add(f, &a.hasse_derivative(f, i1).mul(f, &b.hasse_derivative(f, i - i1)));
            }
            assert_eq!(lhs, rhs);

            // Composition identity.
            let i1 = rng.gen_range(0..4usize);
            let i2 = rng.gen_range(0..4usize);
            let lhs = a.hasse_derivative(f, i2).hasse_derivative(f, i1);
            let rhs = a
                .hasse_derivative(f, i1 + i2)
                .scale(f, f.binom((i1 + i2) as u64, i1 as u64));
            assert_eq!(lhs, rhs);

            // Power rule.
            let k = rng.gen_range(0..8usize);
            let j = rng.gen_range(0..8usize);
            let mut base = Poly::constant(FieldElement::ONE);
            for _ in 0..k {
                base = base.mul(f, &linear(f, gamma));
            }
            let lhs = base.hasse_derivative(f, j);
            let rhs = if j > k {
                Poly::zero()
            } else {
                let mut pow = Poly::constant(FieldElement::ONE);
                for _ in 0..k - j {
                    pow = pow.mul(f, &linear(f, gamma));
                }
                pow.scale(f, f.binom(k as u64, j as u64))
            };
            assert_eq!(lhs, rhs);

            // Multi-product rule over compositions, up to 3 factors.
            let m = rng.gen_range(1..=3usize);
            let factors: Vec<Poly> = (0..m).map(|_| random_poly(&mut rng, f, 5)).collect();
            let i = rng.gen_range(0..=4usize);
            let mut product = Poly::constant(FieldElement::ONE);
            for factor in &factors {
                product = product.mul(f, factor);
            }
            let lhs = product.hasse_derivative(f, i);
            let mut rhs = Poly::zero();
            for c in enumerate_compositions(i, m) {
                let mut term = Poly::constant(FieldElement::ONE);
                for (factor, &ih) in factors.iter().zip(c.parts()) {
                    term = term.mul(f, &factor.hasse_derivative(f, ih));
                }
                rhs = rhs.add(f, &term);
            }
            assert_eq!(lhs, rhs);
        }
    }
    println!(
        "criterion 7 (Hasse property suite, {} instances/field over {} fields): PASS",
        per_field,
        fields.len()
    );
}

#[test]
fn criterion_8_taylor_and_multiplicity() {
    let fields: Vec<FieldSpec> = [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (3, 2)]
        .iter()
        .map(|&(p, s)| make_field(p, s).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    // taylor_expand / taylor_contract are mutually inverse.
    let mut round_trips = 0;
    while round_trips < 1000 {
        for f in &fields {
            let a = random_poly(&mut rng, f, 11);
            let beta = fe(rng.gen_range(0..f.q()));
            let expansion = a.taylor_expand(f, beta);
            assert_eq!(Poly::taylor_contract(f, &expansion, beta), a);
            if !a.is_zero() {
                let back = Poly::new(expansion.clone()).taylor_expand(f, FieldElement::ZERO);
                assert_eq!(back, expansion);
            }
            round_trips += 1;
        }
    }

    // Constructed multiplicities against a repeated-division oracle.
    let divide_out = |f: &FieldSpec, a: &Poly, beta: FieldElement| -> usize {
        let mut m = 0;
        let mut cur = a.clone();
        while cur.eval(f, beta).is_zero() {
            let d = cur.degree().unwrap();
            let mut q = vec![FieldElement::ZERO; d];
            let mut carry = FieldElement::ZERO;
            for k in (0..d).rev() {
                carry = f.add(cur.coeff(k + 1), f.mul(carry, beta));
                q[k] = carry;
            }
            cur = Poly::new(q);
            m += 1;
        }
        m
    };
    let mut cases = 0;
    while cases < 1000 {
        for f in &fields {
            let beta = fe(rng.gen_range(0..f.q()));
            let m = rng.gen_range(0..5usize);
            let b = loop {
                let cand = random_poly(&mut rng, f, 4);
                if !cand.is_zero() && !cand.eval(f, beta).is_zero() {
                    break cand;
                }
            };
            let mut a = b;
            for _ in 0..m {
                a = a.mul(f, &linear(f, beta));
            }
            assert_eq!(a.zero_multiplicity(f, beta), m);
            assert_eq!(divide_out(f, &a, beta), m);
            cases += 1;
        }
    }
    println!("criterion 8 (Taylor round trip {round_trips}, multiplicity {cases} cases): PASS");
}
