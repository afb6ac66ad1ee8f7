//! JSON file formats: problems, partitions and certificates.
//!
//! All maps are ordered and output is pretty-printed, so writing a parsed file reproduces
//! it byte for byte.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coloring::analyze_faces;
use crate::error::{invalid, Error, Result};
use crate::partition::PartitionMatrix;
use crate::polytope::{hull, Point, PolytopeFamily};
use crate::residue::{coefficient_text, homogenize, ResidueCertificate, Strategy};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub exp: Point,
    /// Coefficient name; defaults to the member letter and the term's rank.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<String>,
}

/// A member given by points (all hull lattice points get coefficients) or by terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Member {
    Points { points: Vec<Point> },
    Terms { terms: Vec<Term> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub ambient_dim: usize,
    pub polytopes: Vec<Member>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<Vec<Point>>>>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let p: ProblemFile = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("problem file: {e}")))?;
        for m in &p.polytopes {
            let pts: Vec<&Point> = match m {
                Member::Points { points } => points.iter().collect(),
                Member::Terms { terms } => terms.iter().map(|t| &t.exp).collect(),
            };
            if pts.is_empty() {
                return invalid("a polytope needs at least one point");
            }
            if pts.iter().any(|u| u.len() != p.ambient_dim) {
                return invalid(format!("every point must have {} coordinates", p.ambient_dim));
            }
        }
        Ok(p)
    }

    pub fn family(&self) -> Result<Arc<PolytopeFamily>> {
        let n = self.ambient_dim;
        let mut supports = Vec::new();
        let mut names = Vec::new();
        for m in &self.polytopes {
            match m {
                Member::Points { points } => {
                    supports.push(hull(points, n)?.lattice_points());
                    names.push(Vec::new());
                }
                Member::Terms { terms } => {
                    supports.push(terms.iter().map(|t| t.exp.clone()).collect());
                    names.push(terms.iter().map(|t| t.coeff.clone()).collect());
                }
            }
        }
        Ok(Arc::new(PolytopeFamily::from_terms(n, &supports, &names)?))
    }

    pub fn partition_matrix(&self, family: &Arc<PolytopeFamily>) -> Option<Result<PartitionMatrix>> {
        self.partition.as_ref().map(|cells| PartitionMatrix::new(family.clone(), cells.clone()))
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// A partition grid on its own, as written by the `partition` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFile {
    pub ambient_dim: usize,
    pub cells: Vec<Vec<Vec<Point>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planar_case: Option<String>,
}

impl PartitionFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("partition file: {e}")))
    }

    pub fn from_matrix(m: &PartitionMatrix) -> Self {
        PartitionFile { ambient_dim: m.n(), cells: m.cells().to_vec(), strategy: None, planar_case: None }
    }

    pub fn matrix(&self, family: &Arc<PolytopeFamily>) -> Result<PartitionMatrix> {
        if self.ambient_dim != family.n() {
            return invalid("partition and problem have different dimensions");
        }
        PartitionMatrix::new(family.clone(), self.cells.clone())
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceColors {
    /// Vertices of the face of the sum.
    pub face: Vec<Point>,
    pub max: Vec<usize>,
    pub min: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogenizedTerm {
    pub exponents: Vec<i64>,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub check: String,
    /// `None` when the check was skipped.
    pub passed: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub ambient_dim: usize,
    pub seed: u64,
    pub strategy: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planar_case: Option<String>,
    pub partition: Vec<Vec<Vec<Point>>>,
    pub face_colorings: Vec<FaceColors>,
    pub cdeg: i64,
    pub vanishing: bool,
    pub determinant: String,
    pub support: Vec<Point>,
    pub homogenized: Vec<HomogenizedTerm>,
    pub ledger: Vec<LedgerEntry>,
}

pub fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Auto => "auto",
        Strategy::LocallyUnmixed => "locally-unmixed",
        Strategy::Dim2 => "dim2",
        Strategy::Search => "search",
    }
}

impl CertificateFile {
    pub fn new(cert: &ResidueCertificate, seed: u64) -> Result<Self> {
        let fam = cert.partition.family();
        let sum = fam.sum();
        let face_colorings = analyze_faces(&cert.partition)?
            .into_iter()
            .map(|a| FaceColors {
                face: sum.all_faces()[a.face].vertices.iter().map(|&v| sum.vertices()[v].clone()).collect(),
                max: a.max,
                min: a.min,
            })
            .collect();
        let homogenized = homogenize(&cert.element, sum)?
            .terms
            .iter()
            .map(|(e, ms)| HomogenizedTerm { exponents: e.clone(), coefficient: coefficient_text(ms) })
            .collect();
        let c = &cert.checks;
        let ledger = vec![
            LedgerEntry { check: "rows partition the lattice points".into(), passed: Some(c.rows_partition) },
            LedgerEntry { check: "cells induced from vertex partitions".into(), passed: Some(c.induced) },
            LedgerEntry { check: "coloring matrices have permanent 0".into(), passed: Some(c.compatible_by_faces) },
            LedgerEntry { check: "every transversal sum is interior".into(), passed: c.compatible_bruteforce },
            LedgerEntry { check: "determinant supported in the interior".into(), passed: Some(c.interior_support) },
        ];
        Ok(CertificateFile {
            ambient_dim: fam.n(),
            seed,
            strategy: strategy_name(cert.strategy).into(),
            planar_case: cert.report.as_ref().map(|r| format!("{:?}", r.case)),
            partition: cert.partition.cells().to_vec(),
            face_colorings,
            cdeg: cert.degree,
            vanishing: cert.vanishing,
            determinant: cert.element.to_string(),
            support: cert.element.support(),
            homogenized,
            ledger,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("certificate file: {e}")))
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("file types serialize");
    s.push('\n');
    s
}
