//! Partition matrices: vertex partitions, induced lattice-point partitions and the
//! compatibility conditions.

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;

use crate::coloring::{coloring_matrix_at, nonzero_permutation, permanent};
use crate::error::{invalid, Result};
use crate::polytope::{LatticePolytope, Point, PolytopeFamily};

/// Class assignment for the vertices of one member, indexed like its vertex list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    pub member: usize,
    pub assignment: Vec<usize>,
}

/// How a non-vertex lattice point picks among the classes of its minimal face's vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Class of the lex-smallest vertex of the minimal face.
    #[default]
    Lex,
    /// Explicit choice per non-vertex point, as an index into [`extension_options`].
    Choices(Vec<usize>),
}

/// For each non-vertex lattice point (lex order), the distinct classes it may take.
pub fn extension_options(p: &LatticePolytope, assignment: &[usize]) -> Vec<(Point, Vec<usize>)> {
    p.lattice_points()
        .into_iter()
        .filter(|u| p.vertices().binary_search(u).is_err())
        .map(|u| {
            let classes: BTreeSet<usize> = p.carrier(&u).into_iter().map(|v| assignment[v]).collect();
            (u, classes.into_iter().collect())
        })
        .collect()
}

/// Extend a vertex partition to all lattice points of `p`; returns `n_classes` cells.
pub fn induce(p: &LatticePolytope, assignment: &[usize], n_classes: usize, tie: &TieBreak) -> Result<Vec<Vec<Point>>> {
    if assignment.len() != p.vertices().len() {
        return invalid("vertex partition is not total");
    }
    if assignment.iter().any(|&c| c >= n_classes) {
        return invalid("class index out of range");
    }
    let mut cells = vec![Vec::new(); n_classes];
    let mut k = 0;
    for u in p.lattice_points() {
        let class = match p.vertices().binary_search(&u) {
            Ok(vi) => assignment[vi],
            Err(_) => {
                let carrier = p.carrier(&u);
                let c = match tie {
                    TieBreak::Lex => assignment[carrier[0]],
                    TieBreak::Choices(ch) => {
                        let opts: BTreeSet<usize> = carrier.iter().map(|&v| assignment[v]).collect();
                        let pick = ch.get(k).copied().unwrap_or(0);
                        match opts.iter().nth(pick) {
                            Some(&c) => c,
                            None => return invalid("tie-break choice out of range"),
                        }
                    }
                };
                k += 1;
                c
            }
        };
        cells[class].push(u);
    }
    Ok(cells)
}

/// (n+1)x(n+1) grid of lattice-point sets over a family; row i lives in member i.
#[derive(Clone, Debug)]
pub struct PartitionMatrix {
    family: Arc<PolytopeFamily>,
    cells: Vec<Vec<Vec<Point>>>,
}

impl PartialEq for PartitionMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells
    }
}

impl PartitionMatrix {
    pub fn new(family: Arc<PolytopeFamily>, mut cells: Vec<Vec<Vec<Point>>>) -> Result<Self> {
        let m = family.n() + 1;
        if cells.len() != m || cells.iter().any(|r| r.len() != m) {
            return invalid(format!("partition grid must be {m}x{m}"));
        }
        for row in cells.iter_mut() {
            for cell in row.iter_mut() {
                cell.sort();
                cell.dedup();
            }
        }
        Ok(PartitionMatrix { family, cells })
    }

    /// Induced partition matrix from one vertex partition per member.
    pub fn from_vertex_partitions(family: Arc<PolytopeFamily>, vps: &[VertexPartition], tie: &TieBreak) -> Result<Self> {
        let m = family.n() + 1;
        let mut cells = vec![Vec::new(); m];
        for vp in vps {
            if vp.member >= m {
                return invalid("member index out of range");
            }
            cells[vp.member] = induce(family.member(vp.member), &vp.assignment, m, tie)?;
        }
        if cells.iter().any(|r| r.is_empty()) {
            return invalid("missing vertex partition for some member");
        }
        Self::new(family, cells)
    }

    pub fn family(&self) -> &PolytopeFamily {
        &self.family
    }

    pub fn family_arc(&self) -> &Arc<PolytopeFamily> {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    pub fn cells(&self) -> &[Vec<Vec<Point>>] {
        &self.cells
    }

    pub fn cell(&self, i: usize, j: usize) -> &[Point] {
        &self.cells[i][j]
    }

    pub fn class_of(&self, i: usize, u: &[i64]) -> Option<usize> {
        self.cells[i].iter().position(|c| c.binary_search_by(|p| p.as_slice().cmp(u)).is_ok())
    }

    /// Same cells with column j moved to column perm[j].
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        let m = self.n() + 1;
        let cells = self
            .cells
            .iter()
            .map(|row| {
                let mut out = vec![Vec::new(); m];
                for (j, c) in row.iter().enumerate() {
                    out[perm[j]] = c.clone();
                }
                out
            })
            .collect();
        PartitionMatrix { family: self.family.clone(), cells }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteWitness {
    /// Member i takes its point from class perm[i].
    pub perm: Vec<usize>,
    pub points: Vec<Point>,
    pub sum: Point,
    /// Vertex set of a facet of the sum containing `sum`, when the sum is full-dimensional.
    pub facet: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceWitness {
    /// Vertex set of the face of the sum (empty when the sum is not full-dimensional).
    pub face: Vec<usize>,
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    RowNotPartition { row: usize, detail: String },
    NotInduced { row: usize, class: usize, point: Point },
    Incompatible(FaceWitness),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::RowNotPartition { row, detail } => write!(f, "row {row} is not a partition: {detail}"),
            Violation::NotInduced { row, class, point } => {
                write!(f, "cell ({row},{class}) holds {point:?} but no vertex of its minimal face")
            }
            Violation::Incompatible(w) => {
                write!(f, "coloring matrix of face {:?} has nonzero permanent (permutation {:?})", w.face, w.perm)
            }
        }
    }
}

/// Which cell members the brute-force check ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Members {
    All,
    /// Only members that are vertices of their polytope; sufficient for induced partitions.
    VerticesOnly,
}

pub fn check_rows(m: &PartitionMatrix) -> Option<Violation> {
    let fam = m.family();
    for i in 0..=m.n() {
        let mut seen = BTreeSet::new();
        for cell in &m.cells[i] {
            for u in cell {
                if !seen.insert(u.clone()) {
                    return Some(Violation::RowNotPartition { row: i, detail: format!("{u:?} appears twice") });
                }
            }
        }
        let expected: BTreeSet<Point> = fam.points(i).iter().cloned().collect();
        if let Some(u) = seen.difference(&expected).next() {
            return Some(Violation::RowNotPartition { row: i, detail: format!("{u:?} is not a lattice point of P_{i}") });
        }
        if let Some(u) = expected.difference(&seen).next() {
            return Some(Violation::RowNotPartition { row: i, detail: format!("{u:?} is not covered") });
        }
    }
    None
}

pub fn check_induced(m: &PartitionMatrix) -> Option<Violation> {
    let fam = m.family();
    for i in 0..=m.n() {
        let p = fam.member(i);
        for (j, cell) in m.cells[i].iter().enumerate() {
            for u in cell {
                let ok = p.carrier(u).iter().any(|&v| m.class_of(i, &p.vertices()[v]) == Some(j));
                if !ok {
                    return Some(Violation::NotInduced { row: i, class: j, point: u.clone() });
                }
            }
        }
    }
    None
}

/// Row partition, induced condition and compatibility; the first violation found.
pub fn validate(m: &PartitionMatrix) -> Option<Violation> {
    check_rows(m)
        .or_else(|| check_induced(m))
        .or_else(|| compatibility_by_faces(m).err().map(Violation::Incompatible))
}

/// Every transversal sum must lie in the interior of the Minkowski sum.
pub fn compatibility_bruteforce(m: &PartitionMatrix, members: Members) -> std::result::Result<(), BruteWitness> {
    let fam = m.family();
    let n = m.n();
    let sum = fam.sum();
    let cells: Vec<Vec<Vec<&Point>>> = (0..=n)
        .map(|i| {
            m.cells[i]
                .iter()
                .map(|c| match members {
                    Members::All => c.iter().collect(),
                    Members::VerticesOnly => {
                        c.iter().filter(|u| fam.member(i).vertices().binary_search(u).is_ok()).collect()
                    }
                })
                .collect()
        })
        .collect();
    let perms: Vec<Vec<usize>> = (0..=n).permutations(n + 1).collect();
    let found = perms.par_iter().find_map_first(|perm| {
        let choices: Vec<&Vec<&Point>> = perm.iter().enumerate().map(|(i, &j)| &cells[i][j]).collect();
        if choices.iter().any(|c| c.is_empty()) {
            return None;
        }
        choices.iter().map(|c| c.iter()).multi_cartesian_product().find_map(|pts| {
            let mut s = vec![0i64; n];
            for u in &pts {
                for (a, b) in s.iter_mut().zip(u.iter()) {
                    *a += b;
                }
            }
            if sum.interior_contains(&s) {
                return None;
            }
            let facet = sum.facets().iter().find(|f| f.eval(&s) == 0).map(|f| f.vertices.clone());
            Some(BruteWitness {
                perm: perm.clone(),
                points: pts.into_iter().map(|p| (*p).clone()).collect(),
                sum: s,
                facet,
            })
        })
    });
    match found {
        Some(w) => Err(w),
        None => Ok(()),
    }
}

/// Every proper face of the Minkowski sum must have a coloring matrix of permanent 0.
pub fn compatibility_by_faces(m: &PartitionMatrix) -> std::result::Result<(), FaceWitness> {
    let fam = m.family();
    let sum = fam.sum();
    if sum.dim() < fam.n() {
        let a = coloring_matrix_at(m, None);
        return match nonzero_permutation(&a) {
            Some(perm) => Err(FaceWitness { face: Vec::new(), perm }),
            None => Ok(()),
        };
    }
    let faces = sum.all_faces();
    let bad = faces.par_iter().find_map_first(|f| {
        let a = coloring_matrix_at(m, Some(&f.witness));
        if permanent(&a).map_or(true, |p| p == 0) {
            None
        } else {
            nonzero_permutation(&a).map(|perm| FaceWitness { face: f.vertices.clone(), perm })
        }
    });
    match bad {
        Some(w) => Err(w),
        None => Ok(()),
    }
}
