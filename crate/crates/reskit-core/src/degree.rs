//! Combinatorial degree of a face coloring: the degree of a piecewise-linear map from the
//! barycentric subdivision of the boundary to the boundary of the standard simplex.

use itertools::Itertools;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coloring::{face_coloring, is_simplicial, ColorSet, FaceColoring, Flavor};
use crate::error::{Error, Result};
use crate::linalg::{det_q, q, rank_q, sign_q, solve_q, Q};
use crate::partition::PartitionMatrix;
use crate::polytope::{Flag, LatticePolytope};

pub const DEFAULT_SEED: u64 = 0x5eed_2008;
pub const MAX_RETRIES: usize = 64;

/// Orientation convention: three unit triangles with the locally-unmixed partition along
/// (origin, x-axis edge) have degree +1, and in every dimension the degree agrees with the
/// signed flag count.
fn calibration(n: usize) -> i64 {
    if n % 2 == 0 {
        -1
    } else {
        1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedSimplex {
    pub flag: Flag,
    pub vertices: Vec<Vec<Q>>,
    pub orientation: i32,
}

fn barycenter(p: &LatticePolytope, verts: &[usize]) -> Vec<Q> {
    let k = Q::from_integer((verts.len() as i64).into());
    p.vertex_sum(verts).iter().map(|&s| Q::from_integer(s.into()) / &k).collect()
}

fn centroid(points: &[&Vec<Q>]) -> Vec<Q> {
    let n = points[0].len();
    let k = q(points.len() as i64);
    (0..n).map(|j| points.iter().fold(Q::zero(), |acc, p| acc + &p[j]) / &k).collect()
}

/// Sign of det(v_1 - v_0, ..., v_{n-1} - v_0, outward normal).
fn boundary_orientation(vertices: &[Vec<Q>], outward: &[i64]) -> i32 {
    let mut rows: Vec<Vec<Q>> = vertices[1..]
        .iter()
        .map(|v| v.iter().zip(&vertices[0]).map(|(a, b)| a - b).collect())
        .collect();
    rows.push(outward.iter().map(|&x| q(x)).collect());
    sign_q(&det_q(&rows))
}

fn outward_normal(p: &LatticePolytope, facet_face: usize) -> Vec<i64> {
    p.all_faces()[facet_face].witness.iter().map(|x| -x).collect()
}

/// One oriented simplex per complete flag, with vertices at the barycenters of the flag's faces.
pub fn bsd_complex(p: &LatticePolytope) -> Result<Vec<OrientedSimplex>> {
    if p.dim() != p.ambient_dim() {
        return Err(Error::PreconditionViolated("polytope is not full-dimensional".into()));
    }
    let faces = p.all_faces();
    p.complete_flags()
        .iter()
        .map(|flag| {
            let vertices: Vec<Vec<Q>> = flag.faces.iter().map(|&f| barycenter(p, &faces[f].vertices)).collect();
            let orientation = boundary_orientation(&vertices, &outward_normal(p, *flag.faces.last().unwrap()));
            if orientation == 0 {
                return Err(Error::Internal("degenerate boundary simplex".into()));
            }
            Ok(OrientedSimplex { flag: flag.clone(), vertices, orientation })
        })
        .collect()
}

/// Simplex of the second subdivision: faces of one complete flag added one at a time.
#[derive(Clone, Debug)]
struct ChainSimplex {
    /// chain[k] = the k-th face added; the k-th vertex is the centroid of the first k+1.
    chain: Vec<usize>,
    orientation: i32,
}

fn chain_simplices(p: &LatticePolytope) -> Result<Vec<ChainSimplex>> {
    let faces = p.all_faces();
    let n = p.ambient_dim();
    let bary: Vec<Vec<Q>> = faces.iter().map(|f| barycenter(p, &f.vertices)).collect();
    let mut out = Vec::new();
    for flag in p.complete_flags() {
        let nu = outward_normal(p, *flag.faces.last().unwrap());
        for order in (0..n).permutations(n) {
            let chain: Vec<usize> = order.iter().map(|&k| flag.faces[k]).collect();
            let verts: Vec<Vec<Q>> = (1..=n)
                .map(|k| centroid(&chain[..k].iter().map(|&f| &bary[f]).collect::<Vec<_>>()))
                .collect();
            let orientation = boundary_orientation(&verts, &nu);
            if orientation == 0 {
                return Err(Error::Internal("degenerate subdivision simplex".into()));
            }
            out.push(ChainSimplex { chain, orientation });
        }
    }
    Ok(out)
}

/// Where the face Δ_J = {y_j = 0, j in J} of the target simplex is anchored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Anchor {
    #[default]
    Barycenter,
    /// Interior point of Δ_J with weights proportional to j + 2.
    Weighted,
}

fn anchor_point(mask: ColorSet, n: usize, anchor: Anchor) -> Vec<Q> {
    let w: Vec<i64> = (0..=n)
        .map(|j| {
            if mask >> j & 1 == 1 {
                0
            } else {
                match anchor {
                    Anchor::Barycenter => 1,
                    Anchor::Weighted => j as i64 + 2,
                }
            }
        })
        .collect();
    let total = q(w.iter().sum());
    w.iter().map(|&x| q(x) / &total).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeOptions {
    pub seed: u64,
    pub anchor: Anchor,
}

impl Default for DegreeOptions {
    fn default() -> Self {
        DegreeOptions { seed: DEFAULT_SEED, anchor: Anchor::Barycenter }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    pub degree: i64,
    /// The regular value used, a point of the target simplex boundary.
    pub point: Vec<Q>,
    pub attempts: usize,
}

enum Count {
    Regular(i64),
    Degenerate,
}

fn count_preimages(simplices: &[ChainSimplex], fc: &FaceColoring, n: usize, anchor: Anchor, jstar: usize, p: &[Q]) -> Count {
    let coords: Vec<usize> = (0..=n).filter(|&j| j != jstar).collect();
    let rhs: Vec<Q> = coords.iter().map(|&j| p[j].clone()).collect();
    let parts: Vec<Option<i64>> = simplices
        .par_iter()
        .map(|s| {
            if fc.colors[s.chain[0]] >> jstar & 1 == 0 {
                return Some(0);
            }
            let mut unions = Vec::with_capacity(n);
            let mut acc: ColorSet = 0;
            for &f in &s.chain {
                acc |= fc.colors[f];
                unions.push(acc);
            }
            let images: Vec<Vec<Q>> = unions.iter().map(|&m| anchor_point(m, n, anchor)).collect();
            let a: Vec<Vec<Q>> = coords.iter().map(|&j| images.iter().map(|y| y[j].clone()).collect()).collect();
            match solve_q(&a, &rhs) {
                Some(lambda) => {
                    if lambda.iter().any(|l| sign_q(l) < 0) {
                        Some(0)
                    } else if lambda.iter().any(|l| l.is_zero()) {
                        None
                    } else {
                        Some(s.orientation as i64 * sign_q(&det_q(&a)) as i64)
                    }
                }
                None => {
                    let mut aug = a.clone();
                    for (row, r) in aug.iter_mut().zip(&rhs) {
                        row.push(r.clone());
                    }
                    if rank_q(&aug) == rank_q(&a) {
                        None
                    } else {
                        Some(0)
                    }
                }
            }
        })
        .collect();
    if parts.iter().any(|x| x.is_none()) {
        return Count::Degenerate;
    }
    let sign = if jstar % 2 == 0 { 1 } else { -1 };
    Count::Regular(sign * calibration(n) * parts.into_iter().map(|x| x.unwrap()).sum::<i64>())
}

fn sample_point(rng: &mut ChaCha8Rng, n: usize) -> (usize, Vec<Q>) {
    let jstar = rng.gen_range(0..=n);
    let w: Vec<i64> = (0..=n).map(|j| if j == jstar { 0 } else { rng.gen_range(1..=1000) }).collect();
    let total = q(w.iter().sum());
    (jstar, w.iter().map(|&x| q(x) / &total).collect())
}

pub fn pl_degree_report(fc: &FaceColoring, p: &LatticePolytope, opts: DegreeOptions) -> Result<DegreeReport> {
    if let Err(w) = is_simplicial(p, fc) {
        return Err(Error::PreconditionViolated(format!("coloring is not simplicial along faces {w:?}")));
    }
    let n = p.ambient_dim();
    let simplices = chain_simplices(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for attempt in 1..=MAX_RETRIES {
        let (jstar, point) = sample_point(&mut rng, n);
        if let Count::Regular(degree) = count_preimages(&simplices, fc, n, opts.anchor, jstar, &point) {
            return Ok(DegreeReport { degree, point, attempts: attempt });
        }
        log::debug!("generic point attempt {attempt} hit a degenerate image");
    }
    Err(Error::Degeneracy(MAX_RETRIES))
}

pub fn pl_degree(fc: &FaceColoring, p: &LatticePolytope, opts: DegreeOptions) -> Result<i64> {
    pl_degree_report(fc, p, opts).map(|r| r.degree)
}

fn check_monotone(p: &LatticePolytope, fc: &FaceColoring) -> Result<()> {
    let faces = p.all_faces();
    for (a, fa) in faces.iter().enumerate() {
        for (b, fb) in faces.iter().enumerate() {
            if a != b && fa.is_subface_of(fb) && fc.colors[a] & fc.colors[b] != fc.colors[b] {
                return Err(Error::PreconditionViolated(format!(
                    "coloring is not monotone: face {:?} inside {:?}",
                    fa.vertices, fb.vertices
                )));
            }
        }
    }
    Ok(())
}

fn perm_sign(eps: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..eps.len() {
        for j in i + 1..eps.len() {
            if eps[i] > eps[j] {
                s = -s;
            }
        }
    }
    s
}

fn check_perm(eps: &[usize], n: usize) -> Result<()> {
    let mut sorted = eps.to_vec();
    sorted.sort();
    if sorted != (0..=n).collect::<Vec<_>>() {
        return Err(Error::InvalidInput(format!("{eps:?} is not a permutation of 0..={n}")));
    }
    Ok(())
}

/// sign(eps) times the signed number of complete flags whose (k-1)-face is colored
/// exactly {eps(k), ..., eps(n)} for every k.
pub fn signed_flag_count(p: &LatticePolytope, fc: &FaceColoring, eps: &[usize]) -> Result<i64> {
    let n = p.ambient_dim();
    check_perm(eps, n)?;
    if let Err(w) = is_simplicial(p, fc) {
        return Err(Error::PreconditionViolated(format!("coloring is not simplicial along faces {w:?}")));
    }
    check_monotone(p, fc)?;
    let mut total = 0;
    for flag in p.complete_flags() {
        let hit = (1..=n).all(|k| fc.colors[flag.faces[k - 1]] == eps[k..].iter().fold(0, |m, &c| m | 1 << c));
        if hit {
            total += p.flag_sign(flag)? as i64;
        }
    }
    Ok(perm_sign(eps) * total)
}

/// Number of chains G_1 < ... < G_n of flags of faces (G_k has k faces) whose color
/// unions are {eps(n-k+1), ..., eps(n)}.
pub fn unique_colored_flag_check(p: &LatticePolytope, fc: &FaceColoring, eps: &[usize]) -> Result<usize> {
    let n = p.ambient_dim();
    check_perm(eps, n)?;
    let faces = p.all_faces();
    let targets: Vec<ColorSet> = (1..=n).map(|k| eps[n + 1 - k..].iter().fold(0, |m, &c| m | 1 << c)).collect();
    fn go(
        faces: &[crate::polytope::Face],
        fc: &FaceColoring,
        targets: &[ColorSet],
        chain: &mut Vec<usize>,
        acc: ColorSet,
    ) -> usize {
        let k = chain.len();
        if k == targets.len() {
            return 1;
        }
        let mut count = 0;
        for f in 0..faces.len() {
            if chain.contains(&f) {
                continue;
            }
            let comparable = chain
                .iter()
                .all(|&g| faces[g].is_subface_of(&faces[f]) || faces[f].is_subface_of(&faces[g]));
            if comparable && acc | fc.colors[f] == targets[k] {
                chain.push(f);
                count += go(faces, fc, targets, chain, acc | fc.colors[f]);
                chain.pop();
            }
        }
        count
    }
    Ok(go(faces, fc, &targets, &mut Vec::new(), 0))
}

/// Combinatorial degree of the maximal canonical coloring, cross-checked against the
/// minimal coloring and a second regular value.
pub fn cdeg(m: &PartitionMatrix, seed: u64) -> Result<i64> {
    let p = m.family().sum();
    let max = face_coloring(m, Flavor::Max)?;
    let min = face_coloring(m, Flavor::Min)?;
    let d = pl_degree(&max, p, DegreeOptions { seed, anchor: Anchor::Barycenter })?;
    let d_min = pl_degree(&min, p, DegreeOptions { seed, anchor: Anchor::Barycenter })?;
    let d_alt = pl_degree(&max, p, DegreeOptions { seed: seed.wrapping_add(1), anchor: Anchor::Barycenter })?;
    if d != d_min || d != d_alt {
        return Err(Error::Internal(format!("degree mismatch: max {d}, min {d_min}, second point {d_alt}")));
    }
    Ok(d)
}
