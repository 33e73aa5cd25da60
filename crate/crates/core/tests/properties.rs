use std::collections::BTreeMap;
use std::sync::Arc;

use h4n_core::algebra::{Algebra, AlgebraElement, Family};
use h4n_core::coalgebra::StructureMaps;
use h4n_core::linalg::Matrix;
use h4n_core::quasitriangular::{build_r, inverse};
use h4n_core::representation::{
    catalog, decompose, make_indecomposable, parse_product, tensor_representation, IndecLabel, Representation,
};
use h4n_core::scalar::{parse_rational, rational_to_string, CycField, CycScalar, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

fn scalar(field: &Arc<CycField>, coeffs: &[i64]) -> CycScalar {
    let poly: Vec<Rational> = coeffs.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect();
    field.from_poly(&poly)
}

fn labels_for(family: Family, n: u32, picks: &[usize]) -> Vec<IndecLabel> {
    let cat = catalog(family, n);
    picks.iter().map(|&i| cat[i % cat.len()]).collect()
}

/// Unit lower-triangular times unit upper-triangular, so always invertible.
fn invertible(field: &Arc<CycField>, d: usize, entries: &[i64]) -> Matrix {
    let mut lower = Matrix::identity(field, d);
    let mut upper = Matrix::identity(field, d);
    let mut it = entries.iter().cycle();
    for i in 0..d {
        for j in 0..i {
            lower.set(i, j, field.from_int(*it.next().unwrap()));
            upper.set(j, i, field.from_int(*it.next().unwrap()));
        }
    }
    lower.mul(&upper)
}

fn random_element(alg: &Arc<Algebra>, picks: &[(usize, i64)]) -> AlgebraElement {
    picks.iter().fold(alg.one(), |acc, &(i, c)| {
        let b = alg.basis_element(i % alg.dim());
        acc.mul(&b.add(&alg.one().scale(&alg.field().from_int(c))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_axioms(
        n in 1u32..=6,
        a in prop::collection::vec(-5i64..=5, 1..8),
        b in prop::collection::vec(-5i64..=5, 1..8),
        c in prop::collection::vec(-5i64..=5, 1..8),
    ) {
        let f = CycField::new(2 * n).unwrap();
        let (a, b, c) = (scalar(&f, &a), scalar(&f, &b), scalar(&f, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&(&a + &b) - &b) == a);
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    #[test]
    fn rational_roundtrip(num in -10_000i64..10_000, den in 1i64..500) {
        let r = Rational::new(BigInt::from(num), BigInt::from(den));
        prop_assert_eq!(parse_rational(&rational_to_string(&r)).unwrap(), r);
    }

    #[test]
    fn rational_parser_total(s in "\\PC{0,24}") {
        let _ = parse_rational(&s);
    }

    #[test]
    fn matrix_inverse(n in 1u32..=3, d in 1usize..=5, entries in prop::collection::vec(-3i64..=3, 1..30)) {
        let f = CycField::new(2 * n).unwrap();
        let m = invertible(&f, d, &entries);
        let inv = m.inverse().unwrap();
        prop_assert!(m.mul(&inv).is_identity());
        prop_assert!(inv.mul(&m).is_identity());
    }

    #[test]
    fn label_roundtrip(fam in family(), n in 1u32..=6, pick in 0usize..64) {
        let label = labels_for(fam, n, &[pick])[0];
        prop_assert_eq!(IndecLabel::parse(&label.to_string(), fam, n).unwrap(), label);
    }

    #[test]
    fn product_roundtrip(fam in family(), n in 1u32..=4, picks in prop::collection::vec(0usize..64, 1..6)) {
        let labels = labels_for(fam, n, &picks);
        let expr: Vec<String> = labels.iter().map(ToString::to_string).collect();
        prop_assert_eq!(parse_product(&expr.join(" * "), fam, n).unwrap(), labels);
    }

    #[test]
    fn label_parser_total(fam in family(), n in 1u32..=4, s in "\\PC{0,16}") {
        let _ = parse_product(&s, fam, n);
    }

    #[test]
    fn decompose_conjugated_direct_sum(
        fam in family(),
        n in 1u32..=2,
        picks in prop::collection::vec(0usize..64, 1..=3),
        entries in prop::collection::vec(-2i64..=2, 1..40),
    ) {
        let alg = Algebra::from_parts(fam, n, 1).unwrap();
        let labels = labels_for(fam, n, &picks);
        let parts: Vec<Representation> = labels.iter().map(|&l| make_indecomposable(&alg, l).unwrap()).collect();
        let sum = Representation::direct_sum(&alg, &parts);
        let basis = invertible(alg.field(), sum.dim(), &entries);
        let rep = sum.conjugate(&basis).unwrap();
        prop_assert!(rep.is_valid());
        let mut expected = BTreeMap::new();
        for l in &labels {
            *expected.entry(*l).or_insert(0usize) += 1;
        }
        let dec = decompose(&rep).unwrap();
        prop_assert_eq!(dec.multiplicities(), expected);
        prop_assert_eq!(rep.conjugate(&dec.basis).unwrap(), Representation::direct_sum(
            &alg,
            &dec.blocks.iter().map(|&l| make_indecomposable(&alg, l).unwrap()).collect::<Vec<_>>(),
        ));
    }

    #[test]
    fn tensor_dimension_is_multiplicative(fam in family(), n in 1u32..=3, picks in prop::collection::vec(0usize..64, 2)) {
        let alg = Algebra::from_parts(fam, n, 1).unwrap();
        let maps = StructureMaps::new(&alg);
        let labels = labels_for(fam, n, &picks);
        let a = make_indecomposable(&alg, labels[0]).unwrap();
        let b = make_indecomposable(&alg, labels[1]).unwrap();
        let t = tensor_representation(&maps, &a, &b).unwrap();
        prop_assert_eq!(t.dim(), a.dim() * b.dim());
        let dec = decompose(&t).unwrap();
        let total: usize = dec.blocks.iter().map(|l| l.dim_in(fam)).sum();
        prop_assert_eq!(total, t.dim());
    }

    #[test]
    fn representation_json_roundtrip(fam in family(), n in 1u32..=3, pick in 0usize..64, entries in prop::collection::vec(-2i64..=2, 1..20)) {
        let alg = Algebra::from_parts(fam, n, 1).unwrap();
        let label = labels_for(fam, n, &[pick])[0];
        let base = make_indecomposable(&alg, label).unwrap();
        let rep = base.conjugate(&invertible(alg.field(), base.dim(), &entries)).unwrap();
        let text = serde_json::to_string(&rep.to_json()).unwrap();
        let back = Representation::from_json(&alg, &serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, rep);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn r_intertwines_random_products(
        n in 1u32..=3,
        a in 1i64..=3,
        picks in prop::collection::vec((0usize..64, -2i64..=2), 5),
    ) {
        let alg = Algebra::from_parts(Family::H, n, a).unwrap();
        let maps = StructureMaps::new(&alg);
        let r = build_r(&alg).unwrap();
        let r_inv = inverse(&r).unwrap();
        for k in 1..=picks.len() {
            let h = random_element(&alg, &picks[..k]);
            let lhs = r.mul(&maps.comultiply(&h)).mul(&r_inv);
            prop_assert_eq!(lhs, maps.comultiply(&h).flip());
        }
    }
}
