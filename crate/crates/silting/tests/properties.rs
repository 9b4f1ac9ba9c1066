//! Property tests for the exact linear algebra kernel and the sign
//! discipline: contraction identities on random complexes with known
//! cohomology, determinism and postconditions of elimination, and the
//! Koszul-rule composition laws.

use std::collections::BTreeMap;

use proptest::prelude::*;

use silting::exactla::{
    cohomology_with_contraction, kernel_basis, rref, solve, Complex, Field, SparseMatrix,
    SparseVec,
};
use silting::graded::{
    apply_signed, koszul_sign_exponent, BasisElement, GradedBimodule, IdempotentRing, LinComb,
    MultiLinearMap, Slot,
};

fn small_matrix() -> impl Strategy<Value = SparseMatrix> {
    (1usize..5, 1usize..5).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(-3i64..4, rows * cols).prop_map(move |vals| {
            let f = Field::Rational;
            let mut m = SparseMatrix::zero(rows, cols, f);
            for (k, v) in vals.iter().enumerate() {
                if *v != 0 {
                    m.set(k / cols, k % cols, f.from_i64(*v));
                }
            }
            m
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rref_postconditions(m in small_matrix()) {
        let r = rref(&m);
        // The transform records the row operations exactly.
        prop_assert_eq!(r.transform.mul(&m), r.reduced.clone());
        // Pivots are strictly increasing and each pivot column is a unit
        // column in the reduced matrix.
        for w in r.pivots.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        for (row, col) in r.pivots.iter().enumerate() {
            for rr in 0..m.rows {
                let v = r.reduced.get(rr, *col);
                if rr == row {
                    prop_assert!(v.is_one());
                } else {
                    prop_assert!(v.is_zero());
                }
            }
        }
        // Determinism.
        let again = rref(&m);
        prop_assert_eq!(again.reduced, r.reduced);
        prop_assert_eq!(again.pivots, r.pivots);
        prop_assert_eq!(again.transform, r.transform);
    }

    #[test]
    fn kernel_vectors_are_killed(m in small_matrix()) {
        let basis = kernel_basis(&m);
        prop_assert_eq!(basis.len(), m.cols - rref(&m).pivots.len());
        for v in &basis {
            prop_assert!(m.apply(v).is_zero());
        }
        prop_assert_eq!(kernel_basis(&m), basis);
    }

    #[test]
    fn solve_finds_preimages(m in small_matrix(), coeffs in proptest::collection::vec(-2i64..3, 0..5)) {
        // Build b inside the image so the system is consistent.
        let f = Field::Rational;
        let mut x = SparseVec::new();
        for (i, c) in coeffs.iter().enumerate().take(m.cols) {
            if *c != 0 {
                x.set(i, f.from_i64(*c));
            }
        }
        let b = m.apply(&x);
        let sol = solve(&m, &b).expect("consistent system");
        prop_assert_eq!(m.apply(&sol), b);
    }
}

/// A random complex built as a direct sum of stalks and contractible pieces,
/// conjugated by unit-triangular changes of basis: the cohomology is known
/// by construction.
fn random_complex_with_known_cohomology(
    stalks: &[i64],
    cones: &[i64],
    mix: &[(i64, usize, usize, i64)],
) -> (Complex, BTreeMap<i64, usize>) {
    let f = Field::Rational;
    let lo = -3i64;
    let hi = 4i64;
    let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
    let mut expected: BTreeMap<i64, usize> = BTreeMap::new();
    for s in stalks {
        *dims.entry(*s).or_insert(0) += 1;
        *expected.entry(*s).or_insert(0) += 1;
    }
    for c in cones {
        // k --id--> k in degrees (c, c+1): no cohomology.
        *dims.entry(*c).or_insert(0) += 1;
        *dims.entry(*c + 1).or_insert(0) += 1;
    }
    let mut diffs: BTreeMap<i64, SparseMatrix> = BTreeMap::new();
    // Differentials: identity blocks for the cones, placed after the stalks
    // in each degree.
    let mut placed: BTreeMap<i64, usize> = BTreeMap::new();
    for s in stalks {
        *placed.entry(*s).or_insert(0) += 1;
    }
    for c in cones {
        let row = *placed.get(&(c + 1)).unwrap_or(&0);
        let col = *placed.get(c).unwrap_or(&0);
        let rows = *dims.get(&(c + 1)).unwrap_or(&0);
        let cols = *dims.get(c).unwrap_or(&0);
        let m = diffs
            .entry(*c)
            .or_insert_with(|| SparseMatrix::zero(rows, cols, f));
        m.set(row, col, f.one());
        *placed.entry(*c).or_insert(0) += 1;
        *placed.entry(*c + 1).or_insert(0) += 1;
    }
    // Unit-triangular change of basis per degree: B d B^{-1} keeps d.d = 0
    // and the cohomology dimensions; apply as d' = B_{p+1} d B_p^{-1} with
    // B = I + strictly-upper entries from `mix`.
    let mut basis_change: BTreeMap<i64, SparseMatrix> = BTreeMap::new();
    let mut inverse_change: BTreeMap<i64, SparseMatrix> = BTreeMap::new();
    for p in lo..=hi {
        let n = *dims.get(&p).unwrap_or(&0);
        let mut b = SparseMatrix::identity(n, f);
        for (deg, i, j, v) in mix {
            if *deg == p && *i < n && *j < n && i < j && *v != 0 {
                b.set(*i, *j, f.from_i64(*v));
            }
        }
        let inv = silting::exactla::invert(&b).expect("unit triangular");
        basis_change.insert(p, b);
        inverse_change.insert(p, inv);
    }
    let mut mixed: BTreeMap<i64, SparseMatrix> = BTreeMap::new();
    for (p, d) in &diffs {
        let b_next = basis_change.get(&(p + 1)).unwrap();
        let b_inv = inverse_change.get(p).unwrap();
        let m = b_next.mul(&d.mul(b_inv));
        if !m.is_zero() {
            mixed.insert(*p, m);
        }
    }
    let complex = Complex::new(f, lo, hi + 1, dims, mixed).unwrap();
    (complex, expected)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn contraction_invariants_on_random_complexes(
        stalks in proptest::collection::vec(-3i64..4, 0..4),
        cones in proptest::collection::vec(-3i64..4, 0..4),
        mix in proptest::collection::vec((-3i64..5, 0usize..4, 0usize..4, -2i64..3), 0..6),
    ) {
        let (complex, expected) = random_complex_with_known_cohomology(&stalks, &cones, &mix);
        let data = cohomology_with_contraction(&complex, &[]).unwrap();
        // Known cohomology.
        let expected: BTreeMap<i64, usize> =
            expected.into_iter().filter(|(_, d)| *d > 0).collect();
        prop_assert_eq!(&data.dims, &expected);
        // Every contraction identity, exactly. `verify` re-checks pi.iota,
        // iota.pi = 1 - dh - hd, the side conditions and that representatives
        // are cocycles.
        data.contraction.verify(&complex).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn koszul_rule_composes(
        du in 0i64..4, dv in 0i64..4, dphi in -2i64..3, dpsi in -2i64..3,
    ) {
        // (phi (x) id) . (id (x) psi) = phi (x) psi and
        // (id (x) psi) . (phi (x) id) = (-1)^{|phi||psi|} phi (x) psi,
        // evaluated on a two-letter word.
        let f = Field::Rational;
        let ring = IdempotentRing::new(1).unwrap();
        let module = GradedBimodule::new(
            ring,
            vec![
                BasisElement::new("u", du, 0, 0),
                BasisElement::new("v", dv, 0, 0),
                BasisElement::new("pu", du + dphi, 0, 0),
                BasisElement::new("pv", dv + dpsi, 0, 0),
            ],
        )
        .unwrap();
        let mut phi = MultiLinearMap::new(1, dphi);
        phi.set(vec![0], LinComb::single(2, f.one()));
        let mut psi = MultiLinearMap::new(1, dpsi);
        psi.set(vec![1], LinComb::single(3, f.one()));
        // Direct application.
        let direct = apply_signed(&module, &[Slot::Map(&phi), Slot::Map(&psi)], &[0, 1]).unwrap();
        prop_assert_eq!(direct.len(), 1);
        let (word, coeff) = &direct[0];
        prop_assert_eq!(word.clone(), vec![2usize, 3usize]);
        // Two-step composition, first psi then phi: the middle word is
        // (u, psi v); phi crosses nothing new, so the total sign is the
        // Koszul sign of psi crossing u.
        let step1 = apply_signed(&module, &[Slot::Id, Slot::Map(&psi)], &[0, 1]).unwrap();
        prop_assert_eq!(step1.len(), 1);
        let (mid, c1) = &step1[0];
        let step2 = apply_signed(&module, &[Slot::Map(&phi), Slot::Id], mid).unwrap();
        prop_assert_eq!(step2.len(), 1);
        let (final_word, c2) = &step2[0];
        prop_assert_eq!(final_word.clone(), word.clone());
        prop_assert_eq!(c1.mul(c2), coeff.clone());
        // The reversed composition differs by (-1)^{|phi||psi|}.
        let step1 = apply_signed(&module, &[Slot::Map(&phi), Slot::Id], &[0, 1]).unwrap();
        let (mid, d1) = &step1[0];
        let step2 = apply_signed(&module, &[Slot::Id, Slot::Map(&psi)], mid).unwrap();
        let (final_word, d2) = &step2[0];
        prop_assert_eq!(final_word.clone(), word.clone());
        let expected = coeff.clone().with_sign(dphi * dpsi);
        prop_assert_eq!(d1.mul(d2), expected);
        // The exponent helper agrees with the crossing count.
        prop_assert_eq!(koszul_sign_exponent(&[0, dpsi], &[du, dv]) % 2, (dpsi * du) % 2);
    }
}
