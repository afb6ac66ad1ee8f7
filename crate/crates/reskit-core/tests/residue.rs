mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::*;
use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
use rand::SeedableRng;
use reskit_core::construction::Dim2Case;
use reskit_core::degree::DEFAULT_SEED;
use reskit_core::partition::PartitionMatrix;
use reskit_core::residue::*;
use reskit_core::{Error, PolytopeFamily};

const EXAMPLE1_DET: &str = "-a0*b0*c1*x*y - a2*b1*c0*x*y^2 + a0*b3*c0*x^2*y - a1*b1*c0*x^2*y \
                            - a0*b0*c2*x^2*y^2 - a2*b2*c0*x^2*y^2 - a1*b2*c0*x^3*y";
const EXAMPLE2_DET: &str = "a1*b2*c0*x*y + a0*b1*c1*x^2*y - a1*b0*c1*x^2*y";
const TRIANGLES_DET: &str =
    "a0*b1*c2*x*y - a0*b2*c1*x*y - a1*b0*c2*x*y + a1*b2*c0*x*y + a2*b0*c1*x*y - a2*b1*c0*x*y";
const SEGMENTS_DET: &str = "a0*b1*x - a1*b0*x";

fn cert(f: &Arc<PolytopeFamily>) -> ResidueCertificate {
    residue_element(f, Strategy::Auto, None, DEFAULT_SEED).unwrap()
}

fn assert_matches_leibniz(m: &PartitionMatrix, element: &LaurentPoly, seed: u64) {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..4 {
        let values = random_values(&mut rng, m.family());
        assert_eq!(element.specialize(&values), leibniz_specialized(m, &values));
    }
}

#[test]
fn example1_matrix_and_determinant() {
    let c = cert(&example1());
    let r = c.report.as_ref().unwrap();
    assert_eq!((r.case, r.attempt), (Dim2Case::GenericallyMixed, 1));
    let expected = "[0 | a0*x | a2*y^2 + a1*x*y]\n[b0 | b1*x + b2*x^2 | b3*x*y]\n[c0 | 0 | c1*y + c2*x*y^2]\n";
    assert_eq!(c.matrix.to_string(), expected);
    assert_eq!(c.element.to_string(), EXAMPLE1_DET);
    assert_eq!(c.degree, 1);
    assert!(!c.vanishing);
    assert_matches_leibniz(&c.partition, &c.element, 1);
}

#[test]
fn example2_determinant() {
    let c = cert(&example2());
    assert_eq!(c.report.as_ref().unwrap().case, Dim2Case::PartiallyUnmixed2a);
    assert_eq!(c.element.to_string(), EXAMPLE2_DET);
    assert_eq!(c.element.support(), vec![vec![1, 1], vec![2, 1]]);
    assert_eq!(c.degree, 1);
    assert_matches_leibniz(&c.partition, &c.element, 2);
}

#[test]
fn unmixed_determinants() {
    let t = cert(&triangles());
    assert_eq!(t.strategy, Strategy::LocallyUnmixed);
    assert_eq!(t.element.to_string(), TRIANGLES_DET);
    let s = cert(&segments());
    assert_eq!(s.element.to_string(), SEGMENTS_DET);
    assert_eq!(s.degree, 1);
}

#[test]
fn exceptional_family_is_refused() {
    let r = residue_element(&example3(), Strategy::Auto, None, DEFAULT_SEED);
    assert!(matches!(r, Err(Error::ExceptionalFamily(_))));
}

#[test]
fn non_essential_family_is_refused() {
    let f = family(2, &[&[&[0, 0], &[1, 0]], &[&[0, 0], &[2, 0]], &[&[0, 0], &[0, 1], &[1, 1]]]);
    match residue_element(&f, Strategy::Auto, None, DEFAULT_SEED) {
        Err(Error::NonEssential(s, d)) => assert_eq!((s, d), (vec![0, 1], 1)),
        other => panic!("expected non-essential, got {other:?}"),
    }
}

#[test]
fn incompatible_partition_is_refused() {
    let f = segments();
    let bad = PartitionMatrix::new(f.clone(), vec![vec![pts(&[&[0]]), pts(&[&[1]])], vec![pts(&[&[1]]), pts(&[&[0]])]]).unwrap();
    let r = residue_element(&f, Strategy::Auto, Some(bad), DEFAULT_SEED);
    assert!(matches!(r, Err(Error::PreconditionViolated(_))));
}

#[test]
fn row_swap_negates_the_determinant() {
    let c = cert(&example1());
    assert_eq!(determinant_of(&c.matrix.swap_rows(0, 2)), c.element.neg());
}

#[test]
fn custom_coefficient_names_appear_in_the_text() {
    let supports = vec![pts(&[&[0], &[1]]), pts(&[&[0], &[1]])];
    let names = vec![vec![Some("p".to_string()), Some("q".to_string())], vec![Some("r".to_string()), Some("s".to_string())]];
    let f = Arc::new(PolytopeFamily::from_terms(1, &supports, &names).unwrap());
    assert_eq!(cert(&f).element.to_string(), "p*s*x - q*r*x");
}

#[test]
fn missing_coefficient_drops_the_term() {
    // (1) is a lattice point of [0,2] without a coefficient
    let f = family(1, &[&[&[0], &[2]], &[&[0], &[1]]]);
    let c = cert(&f);
    let values: BTreeMap<String, i64> = [("a0", 2), ("a1", 3), ("b0", 5), ("b1", 7)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    assert_eq!(c.element.specialize(&values), leibniz_specialized(&c.partition, &values));
    assert!(c.element.support().iter().all(|u| f.sum().interior_contains(u)));
}

#[test]
fn homogenized_terms_divide_by_the_facet_product() {
    let c = cert(&example2());
    let sum = c.partition.family().sum();
    let h = homogenize(&c.element, sum).unwrap();
    assert_eq!(h.terms.len(), c.element.support().len());
    let q = h.quotient.unwrap();
    for (e, u) in q.keys().zip(c.element.support()) {
        for (k, f) in sum.facets().iter().enumerate() {
            assert_eq!(e[k] + 1, f.eval(&u) as i64);
        }
    }
}

#[test]
fn laurent_arithmetic() {
    let sym = |member, point: &[i64], name: &str| LaurentPoly::monomial(Symbol { member, point: point.to_vec(), name: name.into() });
    let a = sym(0, &[1, 0], "a1");
    let b = sym(1, &[0, 1], "b2");
    assert_eq!(a.mul(&b), b.mul(&a));
    assert_eq!(a.mul(&b).to_string(), "a1*b2*x*y");
    assert!(a.add(&a.neg()).is_zero());
    assert_eq!(a.add(&a).to_string(), "2*a1*x");
    assert_eq!(LaurentPoly::zero(2).to_string(), "0");
    assert_eq!(LaurentPoly::one(2).mul(&b), b);
}

#[test]
fn verify_reports_each_check() {
    let c = cert(&example2());
    let items = verify(&c.partition, DEFAULT_SEED);
    assert!(items.iter().all(|i| i.outcome.is_ok()), "{items:?}");
    let mut cells = c.partition.cells().to_vec();
    cells[2].swap(0, 2);
    let bad = PartitionMatrix::new(c.partition.family_arc().clone(), cells).unwrap();
    let items = verify(&bad, DEFAULT_SEED);
    let failed: Vec<&str> = items.iter().filter(|i| i.outcome.is_err()).map(|i| i.check).collect();
    assert!(failed.contains(&"coloring matrices have permanent 0"), "{failed:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planar_residues_are_certified(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = random_essential(&mut rng, 2, 2);
        match residue_element(&f, Strategy::Auto, None, DEFAULT_SEED) {
            Ok(c) => {
                prop_assert_eq!(c.degree.abs(), 1);
                prop_assert!(!c.element.is_zero());
                prop_assert_eq!(check_interior_support(&c.element, f.sum()), Ok(()));
                for _ in 0..3 {
                    let values = random_values(&mut rng, &f);
                    prop_assert_eq!(c.element.specialize(&values), leibniz_specialized(&c.partition, &values));
                }
            }
            Err(Error::ExceptionalFamily(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e:?}"),
        }
    }

    #[test]
    fn one_dimensional_residues_are_certified(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = random_essential(&mut rng, 1, 4);
        let c = residue_element(&f, Strategy::Auto, None, DEFAULT_SEED).unwrap();
        prop_assert_eq!(c.degree.abs(), 1);
        prop_assert_eq!(check_interior_support(&c.element, f.sum()), Ok(()));
    }
}
