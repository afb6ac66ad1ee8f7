mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use reskit_core::construction::dim2_partition;
use reskit_core::partition::*;
use reskit_core::Error;

fn seg_matrix(row0: [i64; 2], row1: [i64; 2]) -> PartitionMatrix {
    let cells = vec![
        vec![vec![vec![row0[0]]], vec![vec![row0[1]]]],
        vec![vec![vec![row1[0]]], vec![vec![row1[1]]]],
    ];
    PartitionMatrix::new(segments(), cells).unwrap()
}

#[test]
fn grid_shape_is_checked() {
    let r = PartitionMatrix::new(segments(), vec![vec![pts(&[&[0], &[1]])]]);
    assert!(matches!(r, Err(Error::InvalidInput(_))));
}

#[test]
fn segment_partitions() {
    let good = seg_matrix([0, 1], [0, 1]);
    assert_eq!(validate(&good), None);
    assert_eq!(compatibility_bruteforce(&good, Members::All), Ok(()));
    let bad = seg_matrix([0, 1], [1, 0]);
    let w = compatibility_bruteforce(&bad, Members::All).unwrap_err();
    assert_eq!(w.perm, vec![0, 1]);
    assert_eq!(w.sum, vec![0]);
    assert!(matches!(validate(&bad), Some(Violation::Incompatible(_))));
}

#[test]
fn row_violations_are_reported() {
    let fam = segments();
    let missing = PartitionMatrix::new(fam.clone(), vec![vec![pts(&[&[0]]), vec![]], vec![pts(&[&[0]]), pts(&[&[1]])]]).unwrap();
    assert!(matches!(check_rows(&missing), Some(Violation::RowNotPartition { row: 0, .. })));
    let twice = PartitionMatrix::new(fam.clone(), vec![vec![pts(&[&[0]]), pts(&[&[0], &[1]])], vec![pts(&[&[0]]), pts(&[&[1]])]]).unwrap();
    assert!(matches!(check_rows(&twice), Some(Violation::RowNotPartition { row: 0, .. })));
    let foreign = PartitionMatrix::new(fam, vec![vec![pts(&[&[0]]), pts(&[&[1]])], vec![pts(&[&[0]]), pts(&[&[1], &[5]])]]).unwrap();
    assert!(matches!(check_rows(&foreign), Some(Violation::RowNotPartition { row: 1, .. })));
}

#[test]
fn interior_point_must_follow_a_vertex() {
    // middle point of [0,2] put in a class none of the endpoints has
    let fam = family(1, &[&[&[0], &[1], &[2]], &[&[0], &[1]]]);
    let cells = vec![vec![pts(&[&[0], &[2]]), pts(&[&[1]])], vec![pts(&[&[0]]), pts(&[&[1]])]];
    let m = PartitionMatrix::new(fam, cells).unwrap();
    assert_eq!(check_rows(&m), None);
    assert_eq!(check_induced(&m), Some(Violation::NotInduced { row: 0, class: 1, point: vec![1] }));
}

#[test]
fn corrupted_example2_is_rejected_with_a_witness() {
    let (m, _) = dim2_partition(&example2()).unwrap();
    assert_eq!(validate(&m), None);
    let mut cells = m.cells().to_vec();
    cells[2].swap(0, 2);
    let bad = PartitionMatrix::new(m.family_arc().clone(), cells).unwrap();
    let w = compatibility_bruteforce(&bad, Members::All).unwrap_err();
    assert!(!bad.family().sum().interior_contains(&w.sum));
    assert!(w.facet.is_some());
    let s: Vec<i64> = (0..2).map(|c| w.points.iter().map(|p| p[c]).sum()).collect();
    assert_eq!(s, w.sum);
    for (i, p) in w.points.iter().enumerate() {
        assert!(bad.cell(i, w.perm[i]).contains(p));
    }
    assert!(compatibility_by_faces(&bad).is_err());
}

#[test]
fn lex_tie_break_and_choices() {
    let fam = family(1, &[&[&[0], &[1], &[2]], &[&[0], &[1]]]);
    let p = fam.member(0);
    let opts = extension_options(p, &[0, 1]);
    assert_eq!(opts, vec![(vec![1], vec![0, 1])]);
    assert_eq!(induce(p, &[0, 1], 2, &TieBreak::Lex).unwrap(), vec![pts(&[&[0], &[1]]), pts(&[&[2]])]);
    assert_eq!(induce(p, &[0, 1], 2, &TieBreak::Choices(vec![1])).unwrap(), vec![pts(&[&[0]]), pts(&[&[1], &[2]])]);
    assert!(induce(p, &[0, 1], 2, &TieBreak::Choices(vec![2])).is_err());
    assert!(induce(p, &[0], 2, &TieBreak::Lex).is_err());
    assert!(induce(p, &[0, 2], 2, &TieBreak::Lex).is_err());
}

#[test]
fn induced_example2_checks_agree_on_vertices_only() {
    let (m, _) = dim2_partition(&example2()).unwrap();
    assert_eq!(compatibility_bruteforce(&m, Members::All), Ok(()));
    assert_eq!(compatibility_bruteforce(&m, Members::VerticesOnly), Ok(()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn face_check_agrees_with_brute_force(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, n, 3);
        let m = random_induced(&mut rng, &fam);
        prop_assert_eq!(check_rows(&m), None);
        prop_assert_eq!(check_induced(&m), None);
        let brute = compatibility_bruteforce(&m, Members::All);
        prop_assert_eq!(compatibility_by_faces(&m).is_ok(), brute.is_ok());
        prop_assert_eq!(compatibility_bruteforce(&m, Members::VerticesOnly).is_ok(), brute.is_ok());
    }

    #[test]
    fn column_relabelling_keeps_compatibility(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 2, 3);
        let m = random_induced(&mut rng, &fam);
        let perm = [2usize, 0, 1];
        let p = m.permute_columns(&perm);
        prop_assert_eq!(validate(&p).is_none(), validate(&m).is_none());
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(p.cell(i, perm[j]), m.cell(i, j));
            }
        }
    }

    #[test]
    fn induced_rows_partition(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 2, 4);
        let m = random_induced(&mut rng, &fam);
        for i in 0..3 {
            let total: usize = m.cells()[i].iter().map(|c| c.len()).sum();
            prop_assert_eq!(total, fam.points(i).len());
            for v in fam.member(i).vertices() {
                prop_assert!(m.class_of(i, v).is_some());
            }
        }
    }
}
