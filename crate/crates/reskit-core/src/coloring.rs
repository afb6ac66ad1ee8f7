//! Coloring matrices, permanents, zero submatrices and canonical face colorings.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::partition::PartitionMatrix;
use crate::polytope::{dot, Face, LatticePolytope};

pub type BitMatrix = Vec<Vec<bool>>;

/// Colors as a bitmask over {0..n}.
pub type ColorSet = u32;

pub fn mask_to_vec(m: ColorSet) -> Vec<usize> {
    (0..32).filter(|&k| m >> k & 1 == 1).collect()
}

pub fn vec_to_mask(v: &[usize]) -> ColorSet {
    v.iter().fold(0, |m, &k| m | 1 << k)
}

fn full_mask(size: usize) -> ColorSet {
    (1u32 << size) - 1
}

/// Entry (i,j) is set when cell (i,j) meets the face of P_i minimizing `w`
/// (all of P_i when `w` is `None`).
pub fn coloring_matrix_at(m: &PartitionMatrix, w: Option<&[i64]>) -> BitMatrix {
    let fam = m.family();
    (0..=m.n())
        .map(|i| {
            let min = w.map(|w| fam.member(i).min_value(w));
            m.cells()[i]
                .iter()
                .map(|cell| match (w, min) {
                    (Some(w), Some(min)) => cell.iter().any(|u| dot(u, w) == min),
                    _ => !cell.is_empty(),
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringMatrix {
    pub entries: BitMatrix,
    pub face: Face,
}

pub fn coloring_matrix(m: &PartitionMatrix, face: &Face) -> ColoringMatrix {
    ColoringMatrix { entries: coloring_matrix_at(m, Some(&face.witness)), face: face.clone() }
}

fn check_square(a: &BitMatrix) -> Result<usize> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return invalid("matrix is not square");
    }
    Ok(n)
}

/// Exact permanent of a square 0/1 matrix of size at most 8.
pub fn permanent(a: &BitMatrix) -> Result<u64> {
    let n = check_square(a)?;
    if n > 8 {
        return invalid(format!("permanent limited to size 8, got {n}"));
    }
    // dp over the set of used columns, filling rows in order
    let mut dp = vec![0u64; 1 << n];
    dp[0] = 1;
    for mask in 0..(1usize << n) {
        let row = mask.count_ones() as usize;
        if row >= n || dp[mask] == 0 {
            continue;
        }
        for c in 0..n {
            if mask >> c & 1 == 0 && a[row][c] {
                dp[mask | 1 << c] += dp[mask];
            }
        }
    }
    Ok(dp[(1 << n) - 1])
}

/// Lex-first permutation p with every a[i][p[i]] set.
pub fn nonzero_permutation(a: &BitMatrix) -> Option<Vec<usize>> {
    fn go(a: &BitMatrix, row: usize, used: &mut Vec<bool>, acc: &mut Vec<usize>) -> bool {
        if row == a.len() {
            return true;
        }
        for c in 0..a.len() {
            if !used[c] && a[row][c] {
                used[c] = true;
                acc.push(c);
                if go(a, row + 1, used, acc) {
                    return true;
                }
                acc.pop();
                used[c] = false;
            }
        }
        false
    }
    let mut acc = Vec::new();
    go(a, 0, &mut vec![false; a.len()], &mut acc).then_some(acc)
}

fn max_matching(a: &BitMatrix) -> Vec<Option<usize>> {
    let n = a.len();
    let mut col_match: Vec<Option<usize>> = vec![None; n];
    fn augment(a: &BitMatrix, r: usize, seen: &mut [bool], col_match: &mut [Option<usize>]) -> bool {
        for c in 0..a.len() {
            if a[r][c] && !seen[c] {
                seen[c] = true;
                if col_match[c].map_or(true, |r2| augment(a, r2, seen, col_match)) {
                    col_match[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }
    for r in 0..n {
        augment(a, r, &mut vec![false; n], &mut col_match);
    }
    col_match
}

/// Rows I and columns J with a[I][J] = 0 and |I| + |J| = size + 1, from the König cover
/// of a maximum matching.
pub fn fk_zero_submatrix(a: &BitMatrix) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = check_square(a)?;
    let col_match = max_matching(a);
    let matched = col_match.iter().filter(|c| c.is_some()).count();
    if matched == n {
        return Err(Error::PreconditionViolated("matrix has nonzero permanent".into()));
    }
    let mut row_match = vec![None; n];
    for (c, r) in col_match.iter().enumerate() {
        if let Some(r) = r {
            row_match[*r] = Some(c);
        }
    }
    let mut zr = vec![false; n];
    let mut zc = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&r| row_match[r].is_none()).collect();
    for &r in &stack {
        zr[r] = true;
    }
    while let Some(r) = stack.pop() {
        for c in 0..n {
            if a[r][c] && !zc[c] {
                zc[c] = true;
                if let Some(r2) = col_match[c] {
                    if !zr[r2] {
                        zr[r2] = true;
                        stack.push(r2);
                    }
                }
            }
        }
    }
    let mut rows: Vec<usize> = (0..n).filter(|&r| zr[r]).collect();
    let mut cols: Vec<usize> = (0..n).filter(|&c| !zc[c]).collect();
    while rows.len() + cols.len() > n + 1 && cols.len() > 1 {
        cols.pop();
    }
    while rows.len() + cols.len() > n + 1 {
        rows.pop();
    }
    Ok((rows, cols))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleSet {
    /// All admissible column sets, ordered by size and then lexicographically.
    pub colorings: Vec<Vec<usize>>,
    pub maximal: Vec<Vec<usize>>,
    pub minimal: Vec<Vec<usize>>,
}

fn zero_rows_on(a: &BitMatrix, mask: ColorSet) -> usize {
    a.iter().filter(|r| r.iter().enumerate().all(|(c, &x)| !x || mask >> c & 1 == 0)).count()
}

fn admissible_masks(a: &BitMatrix) -> Result<Vec<ColorSet>> {
    let n = check_square(a)?;
    if permanent(a)? != 0 {
        return Err(Error::PreconditionViolated("coloring matrix has nonzero permanent".into()));
    }
    let mut out: Vec<ColorSet> =
        (1..=full_mask(n)).filter(|&m| zero_rows_on(a, m) + m.count_ones() as usize >= n + 1).collect();
    out.sort_by_key(|&m| (m.count_ones(), mask_to_vec(m)));
    Ok(out)
}

/// Column sets J carrying a zero block with |rows| + |J| = size + 1.
pub fn admissible_colorings(a: &BitMatrix) -> Result<AdmissibleSet> {
    let masks = admissible_masks(a)?;
    let maximal = masks.iter().filter(|&&m| !masks.iter().any(|&o| o != m && o & m == m)).map(|&m| mask_to_vec(m)).collect();
    let minimal = masks.iter().filter(|&&m| !masks.iter().any(|&o| o != m && o & m == o)).map(|&m| mask_to_vec(m)).collect();
    Ok(AdmissibleSet { colorings: masks.iter().map(|&m| mask_to_vec(m)).collect(), maximal, minimal })
}

fn canonical_masks(a: &BitMatrix) -> Result<(ColorSet, ColorSet)> {
    let masks = admissible_masks(a)?;
    let is_max = |m: ColorSet| !masks.iter().any(|&o| o != m && o & m == m);
    let is_min = |m: ColorSet| !masks.iter().any(|&o| o != m && o & m == o);
    let c = masks.iter().filter(|&&m| is_min(m)).fold(0, |acc, &m| acc | m);
    let big_c = masks.iter().filter(|&&m| is_max(m)).fold(full_mask(a.len()), |acc, &m| acc & m);
    Ok((c, big_c))
}

/// (c, C): union of the minimal and intersection of the maximal admissible sets.
pub fn canonical_coloring(a: &BitMatrix) -> Result<(Vec<usize>, Vec<usize>)> {
    let (c, big_c) = canonical_masks(a)?;
    Ok((mask_to_vec(c), mask_to_vec(big_c)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    Max,
    Min,
}

/// Color sets for every proper face of a polytope, indexed like its `all_faces()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceColoring {
    pub n: usize,
    pub colors: Vec<ColorSet>,
}

impl FaceColoring {
    pub fn from_sets(n: usize, sets: &[Vec<usize>]) -> Self {
        FaceColoring { n, colors: sets.iter().map(|s| vec_to_mask(s)).collect() }
    }

    pub fn colors_of(&self, face: usize) -> Vec<usize> {
        mask_to_vec(self.colors[face])
    }

    /// Swap colors a and b everywhere.
    pub fn transpose_colors(&self, a: usize, b: usize) -> Self {
        let colors = self
            .colors
            .iter()
            .map(|&m| {
                let (ha, hb) = (m >> a & 1, m >> b & 1);
                (m & !(1 << a) & !(1 << b)) | hb << a | ha << b
            })
            .collect();
        FaceColoring { n: self.n, colors }
    }
}

/// Per-face coloring data for a compatible partition matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceAnalysis {
    pub face: usize,
    pub matrix: BitMatrix,
    pub min: Vec<usize>,
    pub max: Vec<usize>,
}

pub fn analyze_faces(m: &PartitionMatrix) -> Result<Vec<FaceAnalysis>> {
    let sum = m.family().sum();
    sum.all_faces()
        .par_iter()
        .enumerate()
        .map(|(k, f)| {
            let a = coloring_matrix_at(m, Some(&f.witness));
            let (c, big_c) = canonical_masks(&a).map_err(|e| match e {
                Error::PreconditionViolated(_) => {
                    Error::PreconditionViolated(format!("partition is not compatible at face {:?}", f.vertices))
                }
                other => other,
            })?;
            Ok(FaceAnalysis { face: k, matrix: a, min: mask_to_vec(c), max: mask_to_vec(big_c) })
        })
        .collect()
}

pub fn face_coloring(m: &PartitionMatrix, flavor: Flavor) -> Result<FaceColoring> {
    let data = analyze_faces(m)?;
    let colors = data
        .iter()
        .map(|d| vec_to_mask(if flavor == Flavor::Max { &d.max } else { &d.min }))
        .collect();
    Ok(FaceColoring { n: m.n(), colors })
}

/// Every face nonempty-proper and every complete flag's color union proper; on failure the
/// offending face indices.
pub fn is_simplicial(p: &LatticePolytope, fc: &FaceColoring) -> std::result::Result<(), Vec<usize>> {
    let full = full_mask(fc.n + 1);
    if let Some(k) = fc.colors.iter().position(|&c| c == 0 || c & full == full) {
        return Err(vec![k]);
    }
    for flag in p.complete_flags() {
        let u = flag.faces.iter().fold(0, |acc, &f| acc | fc.colors[f]);
        if u & full == full {
            return Err(flag.faces.clone());
        }
    }
    Ok(())
}
