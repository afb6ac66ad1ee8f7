//! Lattice polytopes with exact facet descriptions, faces, flags and Minkowski sums.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use itertools::Itertools;

use crate::error::{invalid, Error, Result};
use crate::linalg::{cross, det_i128, gcd_vec, independent_rows, nullspace_int, rank_i64};

pub type Point = Vec<i64>;

/// Facet inequality `<normal, x> + offset >= 0` with a primitive inner normal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
    /// Indices into the polytope's vertex list.
    pub vertices: Vec<usize>,
}

impl Facet {
    pub fn eval(&self, u: &[i64]) -> i128 {
        dot(&self.normal, u) + self.offset as i128
    }
}

/// A proper face, identified by the vertices it contains.
#[derive(Clone, Debug)]
pub struct Face {
    pub vertices: Vec<usize>,
    /// A direction whose minimum over the polytope is attained exactly on this face.
    pub witness: Vec<i64>,
    pub dim: usize,
}

impl PartialEq for Face {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}
impl Eq for Face {}

impl Face {
    pub fn is_subface_of(&self, other: &Face) -> bool {
        self.vertices.iter().all(|v| other.vertices.binary_search(v).is_ok())
    }
}

/// Chain of faces of strictly increasing dimension, stored as indices into
/// [`LatticePolytope::all_faces`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flag {
    pub faces: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinimalFace {
    Face(Face),
    Interior,
}

#[derive(Clone, Debug)]
pub struct LatticePolytope {
    ambient_dim: usize,
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    /// Affine span equations `<w, x> = c`, present when `dim < ambient_dim`.
    equations: Vec<(Vec<i64>, i64)>,
    faces: OnceLock<Vec<Face>>,
    flags: OnceLock<Vec<Flag>>,
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

pub fn add_points(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_points(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Dimension of the affine hull of a point list.
pub fn affine_dim(points: &[&[i64]]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let rows: Vec<Point> = points[1..].iter().map(|p| sub_points(p, points[0])).collect();
    rank_i64(&rows)
}

pub fn hull(points: &[Point], n: usize) -> Result<LatticePolytope> {
    if points.is_empty() {
        return invalid("hull of an empty point set");
    }
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return invalid(format!("point {p:?} does not have length {n}"));
    }
    let pts: Vec<Point> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let p0 = pts[0].clone();
    let diffs: Vec<Point> = pts[1..].iter().map(|p| sub_points(p, &p0)).collect();
    let basis: Vec<Point> = independent_rows(&diffs).into_iter().map(|i| diffs[i].clone()).collect();
    let d = basis.len();
    let equations: Vec<(Vec<i64>, i64)> = nullspace_int(&basis, n)
        .into_iter()
        .map(|w| {
            let c = dot(&w, &p0) as i64;
            (w, c)
        })
        .collect();
    if d == 0 {
        return Ok(LatticePolytope::assemble(n, 0, vec![p0], Vec::new(), equations));
    }

    let b128: Vec<Vec<i128>> = basis.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let local = |v: &[i64]| -> Vec<i128> {
        b128.iter().map(|r| r.iter().zip(v).map(|(&a, &b)| a * b as i128).sum()).collect()
    };
    let mut found: BTreeMap<(Vec<i64>, i64), ()> = BTreeMap::new();
    for combo in (0..pts.len()).combinations(d) {
        let q0 = &pts[combo[0]];
        let edges: Vec<Vec<i128>> = combo[1..].iter().map(|&k| local(&sub_points(&pts[k], q0))).collect();
        let c = cross(&edges, d);
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        let mut v: Vec<i128> = (0..n).map(|j| (0..d).map(|k| c[k] * b128[k][j]).sum()).collect();
        let g = gcd_vec(&v);
        v.iter_mut().for_each(|x| *x /= g);
        let h: i128 = v.iter().zip(q0).map(|(&a, &b)| a * b as i128).sum();
        let (mut pos, mut neg) = (false, false);
        for p in &pts {
            let s: i128 = v.iter().zip(p).map(|(&a, &b)| a * b as i128).sum::<i128>() - h;
            pos |= s > 0;
            neg |= s < 0;
            if pos && neg {
                break;
            }
        }
        if pos && neg {
            continue;
        }
        let sign = if neg { -1 } else { 1 };
        let normal: Vec<i64> = v
            .iter()
            .map(|&x| i64::try_from(sign * x).map_err(|_| Error::InvalidInput("coordinates too large".into())))
            .collect::<Result<_>>()?;
        let offset = i64::try_from(-sign * h).map_err(|_| Error::InvalidInput("coordinates too large".into()))?;
        found.insert((normal, offset), ());
    }

    let raw: Vec<(Vec<i64>, i64)> = found.into_keys().collect();
    let tight: Vec<Vec<usize>> = pts
        .iter()
        .map(|p| {
            raw.iter()
                .enumerate()
                .filter(|(_, (w, a))| dot(w, p) + *a as i128 == 0)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let is_vertex: Vec<bool> = (0..pts.len())
        .map(|i| {
            let mine = &tight[i];
            !mine.is_empty()
                && (0..pts.len()).filter(|&j| mine.iter().all(|f| tight[j].contains(f))).count() == 1
        })
        .collect();
    let vert_idx: Vec<usize> = (0..pts.len()).filter(|&i| is_vertex[i]).collect();
    let vertices: Vec<Point> = vert_idx.iter().map(|&i| pts[i].clone()).collect();
    let facets: Vec<Facet> = raw
        .into_iter()
        .enumerate()
        .map(|(fi, (normal, offset))| Facet {
            normal,
            offset,
            vertices: vert_idx
                .iter()
                .enumerate()
                .filter(|(_, &pi)| tight[pi].contains(&fi))
                .map(|(k, _)| k)
                .collect(),
        })
        .collect();
    Ok(LatticePolytope::assemble(n, d, vertices, facets, equations))
}

impl LatticePolytope {
    fn assemble(
        ambient_dim: usize,
        dim: usize,
        vertices: Vec<Point>,
        mut facets: Vec<Facet>,
        equations: Vec<(Vec<i64>, i64)>,
    ) -> Self {
        facets.sort_by(|a, b| a.vertices.cmp(&b.vertices).then(a.normal.cmp(&b.normal)));
        LatticePolytope {
            ambient_dim,
            dim,
            vertices,
            facets,
            equations,
            faces: OnceLock::new(),
            flags: OnceLock::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extreme points in lex order.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn equations(&self) -> &[(Vec<i64>, i64)] {
        &self.equations
    }

    pub fn contains(&self, u: &[i64]) -> bool {
        u.len() == self.ambient_dim
            && self.equations.iter().all(|(w, c)| dot(w, u) == *c as i128)
            && self.facets.iter().all(|f| f.eval(u) >= 0)
            && (self.dim > 0 || u == self.vertices[0].as_slice())
    }

    /// All lattice points in lex order, by bounding-box scan.
    pub fn lattice_points(&self) -> Vec<Point> {
        let n = self.ambient_dim;
        let lo: Vec<i64> = (0..n).map(|k| self.vertices.iter().map(|v| v[k]).min().unwrap()).collect();
        let hi: Vec<i64> = (0..n).map(|k| self.vertices.iter().map(|v| v[k]).max().unwrap()).collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            if self.contains(&cur) {
                out.push(cur.clone());
            }
            let mut k = n;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    for (j, c) in cur.iter_mut().enumerate().skip(k + 1) {
                        *c = lo[j];
                    }
                    break;
                }
            }
        }
    }

    /// Vertex indices minimizing `<., v>`.
    pub fn argmin(&self, v: &[i64]) -> Vec<usize> {
        let vals: Vec<i128> = self.vertices.iter().map(|p| dot(p, v)).collect();
        let m = *vals.iter().min().unwrap();
        (0..vals.len()).filter(|&i| vals[i] == m).collect()
    }

    pub fn min_value(&self, v: &[i64]) -> i128 {
        self.vertices.iter().map(|p| dot(p, v)).min().unwrap()
    }

    pub fn face_dim(&self, verts: &[usize]) -> usize {
        let pts: Vec<&[i64]> = verts.iter().map(|&i| self.vertices[i].as_slice()).collect();
        affine_dim(&pts)
    }

    /// The face on which `<., v>` is minimized; any positive multiple of a rational
    /// direction gives the same face.
    pub fn face_of(&self, v: &[i64]) -> Result<Face> {
        if v.len() != self.ambient_dim {
            return invalid("direction has the wrong length");
        }
        if v.iter().all(|&x| x == 0) {
            return invalid("zero direction");
        }
        let vertices = self.argmin(v);
        let dim = self.face_dim(&vertices);
        Ok(Face { vertices, witness: v.to_vec(), dim })
    }

    /// All proper nonempty faces, ordered by dimension and then by vertex set.
    pub fn all_faces(&self) -> &[Face] {
        self.faces.get_or_init(|| self.compute_faces())
    }

    fn compute_faces(&self) -> Vec<Face> {
        if self.dim == 0 {
            return Vec::new();
        }
        let mut sets: BTreeSet<Vec<usize>> = self.facets.iter().map(|f| f.vertices.clone()).collect();
        let mut frontier: Vec<Vec<usize>> = sets.iter().cloned().collect();
        while let Some(s) = frontier.pop() {
            for f in &self.facets {
                let inter: Vec<usize> = s.iter().copied().filter(|x| f.vertices.binary_search(x).is_ok()).collect();
                if !inter.is_empty() && sets.insert(inter.clone()) {
                    frontier.push(inter);
                }
            }
        }
        let mut faces: Vec<Face> = sets
            .into_iter()
            .map(|vs| {
                let mut w = vec![0i64; self.ambient_dim];
                for f in self.facets.iter().filter(|f| vs.iter().all(|x| f.vertices.binary_search(x).is_ok())) {
                    for (a, b) in w.iter_mut().zip(&f.normal) {
                        *a += b;
                    }
                }
                let dim = self.face_dim(&vs);
                Face { vertices: vs, witness: w, dim }
            })
            .collect();
        faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.vertices.cmp(&b.vertices)));
        faces
    }

    /// Index of the face with the given vertex set, if it is a proper face.
    pub fn face_index(&self, verts: &[usize]) -> Option<usize> {
        self.all_faces().iter().position(|f| f.vertices == verts)
    }

    /// Vertex set of the minimal face containing `u` (the whole vertex list when `u` is
    /// in the relative interior).
    pub fn carrier(&self, u: &[i64]) -> Vec<usize> {
        let tight: Vec<&Facet> = self.facets.iter().filter(|f| f.eval(u) == 0).collect();
        (0..self.vertices.len())
            .filter(|i| tight.iter().all(|f| f.vertices.binary_search(i).is_ok()))
            .collect()
    }

    pub fn minimal_face(&self, u: &[i64]) -> Result<MinimalFace> {
        if !self.contains(u) {
            return invalid(format!("{u:?} is not in the polytope"));
        }
        if self.interior_contains(u) {
            return Ok(MinimalFace::Interior);
        }
        let vertices = self.carrier(u);
        let dim = self.face_dim(&vertices);
        let witness = match self.face_index(&vertices) {
            Some(i) => self.all_faces()[i].witness.clone(),
            None => vec![0; self.ambient_dim],
        };
        Ok(MinimalFace::Face(Face { vertices, witness, dim }))
    }

    /// Strict interiority in the ambient space; always false for lower-dimensional polytopes.
    pub fn interior_contains(&self, u: &[i64]) -> bool {
        self.dim == self.ambient_dim && self.facets.iter().all(|f| f.eval(u) > 0)
    }

    /// Complete flags (vertex through facet) in lex order of face indices.
    pub fn complete_flags(&self) -> &[Flag] {
        self.flags.get_or_init(|| self.compute_flags())
    }

    fn compute_flags(&self) -> Vec<Flag> {
        if self.dim != self.ambient_dim || self.dim == 0 {
            return Vec::new();
        }
        let faces = self.all_faces();
        let n = self.dim;
        let by_dim: Vec<Vec<usize>> = (0..n).map(|k| (0..faces.len()).filter(|&i| faces[i].dim == k).collect()).collect();
        let mut out = Vec::new();
        fn extend(faces: &[Face], by_dim: &[Vec<usize>], chain: &mut Vec<usize>, out: &mut Vec<Flag>) {
            let k = chain.len();
            if k == by_dim.len() {
                out.push(Flag { faces: chain.clone() });
                return;
            }
            for &j in &by_dim[k] {
                if chain.last().map_or(true, |&l| faces[l].is_subface_of(&faces[j])) {
                    chain.push(j);
                    extend(faces, by_dim, chain, out);
                    chain.pop();
                }
            }
        }
        extend(faces, &by_dim, &mut Vec::new(), &mut out);
        out.sort();
        debug_assert!(n >= 1);
        out
    }

    pub fn vertex_sum(&self, verts: &[usize]) -> Vec<i128> {
        let mut s = vec![0i128; self.ambient_dim];
        for &i in verts {
            for (a, &b) in s.iter_mut().zip(&self.vertices[i]) {
                *a += b as i128;
            }
        }
        s
    }

    /// Sign of the frame from the flag's vertex towards the barycenters of its faces
    /// (and of the polytope itself).
    pub fn flag_sign(&self, flag: &Flag) -> Result<i32> {
        let faces = self.all_faces();
        let n = self.ambient_dim;
        if flag.faces.len() != n || self.dim != n {
            return Err(Error::PreconditionViolated("flag is not complete".into()));
        }
        let v0 = &faces[flag.faces[0]];
        if v0.vertices.len() != 1 {
            return Err(Error::PreconditionViolated("flag does not start at a vertex".into()));
        }
        let v = &self.vertices[v0.vertices[0]];
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut rows: Vec<Vec<i128>> = Vec::with_capacity(n);
        for j in 1..=n {
            let verts = if j == n { &all } else { &faces[flag.faces[j]].vertices };
            let s = self.vertex_sum(verts);
            let k = verts.len() as i128;
            rows.push(s.iter().zip(v).map(|(&a, &b)| a - k * b as i128).collect());
        }
        // rows are the frame vectors; the determinant of the transpose is the same
        match det_i128(&rows).signum() {
            0 => Err(Error::Internal("degenerate flag frame".into())),
            s => Ok(s as i32),
        }
    }
}

pub fn minkowski(p: &LatticePolytope, q: &LatticePolytope) -> Result<LatticePolytope> {
    if p.ambient_dim != q.ambient_dim {
        return invalid("Minkowski sum of polytopes in different dimensions");
    }
    let sums: Vec<Point> = p
        .vertices
        .iter()
        .cartesian_product(q.vertices.iter())
        .map(|(a, b)| add_points(a, b))
        .collect();
    hull(&sums, p.ambient_dim)
}

pub fn minkowski_all(ps: &[&LatticePolytope]) -> Result<LatticePolytope> {
    let Some((first, rest)) = ps.split_first() else {
        return invalid("Minkowski sum of no polytopes");
    };
    let mut acc = (*first).clone();
    for p in rest {
        acc = minkowski(&acc, p)?;
    }
    Ok(acc)
}

/// Dimension of the Minkowski sum of the given polytopes (rank of the joint direction space).
pub fn sum_dim(ps: &[&LatticePolytope]) -> usize {
    let rows: Vec<Point> = ps
        .iter()
        .flat_map(|p| p.vertices[1..].iter().map(move |v| sub_points(v, &p.vertices[0])))
        .collect();
    rank_i64(&rows)
}

#[derive(Clone, Debug)]
pub struct PolytopeFamily {
    n: usize,
    members: Vec<LatticePolytope>,
    points: Vec<Vec<Point>>,
    names: Vec<Vec<Option<String>>>,
    sum: OnceLock<LatticePolytope>,
}

/// Order used for default coefficient numbering: total degree first, then larger
/// exponents of earlier variables first (a0 + a1*x + a2*y + a3*x^2 + ...).
pub fn naming_order(a: &Point, b: &Point) -> std::cmp::Ordering {
    let da: i64 = a.iter().sum();
    let db: i64 = b.iter().sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

pub fn member_letter(i: usize) -> String {
    let letters = "abcdefghijklmnopqrsuv";
    match letters.chars().nth(i) {
        Some(c) => c.to_string(),
        None => format!("m{i}_"),
    }
}

impl PolytopeFamily {
    pub fn new(members: Vec<LatticePolytope>) -> Result<Self> {
        let names = members
            .iter()
            .enumerate()
            .map(|(i, m)| default_names(i, &m.lattice_points(), &m.lattice_points()))
            .collect();
        Self::with_names(members, names)
    }

    pub fn from_points(n: usize, members: &[Vec<Point>]) -> Result<Self> {
        let ps = members.iter().map(|m| hull(m, n)).collect::<Result<Vec<_>>>()?;
        Self::new(ps)
    }

    /// Family from polynomial supports: lattice points of a hull that are not in the support
    /// get no coefficient. `names[i][k]` overrides the default name of `supports[i][k]`.
    pub fn from_terms(n: usize, supports: &[Vec<Point>], names: &[Vec<Option<String>>]) -> Result<Self> {
        let mut members = Vec::new();
        let mut all_names = Vec::new();
        for (i, supp) in supports.iter().enumerate() {
            let p = hull(supp, n)?;
            let pts = p.lattice_points();
            let mut nm = default_names(i, &pts, supp);
            for (k, u) in supp.iter().enumerate() {
                if let Some(Some(s)) = names.get(i).and_then(|v| v.get(k)) {
                    let idx = pts.binary_search(u).expect("support point lies in its hull");
                    nm[idx] = Some(s.clone());
                }
            }
            members.push(p);
            all_names.push(nm);
        }
        Self::with_names(members, all_names)
    }

    pub fn with_names(members: Vec<LatticePolytope>, names: Vec<Vec<Option<String>>>) -> Result<Self> {
        let n = members.first().map(|m| m.ambient_dim).unwrap_or(0);
        if members.len() != n + 1 || n == 0 {
            return invalid(format!("a family in dimension {n} needs {} members, got {}", n + 1, members.len()));
        }
        if members.iter().any(|m| m.ambient_dim != n) {
            return invalid("members have different ambient dimensions");
        }
        let points: Vec<Vec<Point>> = members.iter().map(|m| m.lattice_points()).collect();
        if names.len() != members.len() || names.iter().zip(&points).any(|(a, b)| a.len() != b.len()) {
            return invalid("name table does not match the lattice points");
        }
        Ok(PolytopeFamily { n, members, points, names, sum: OnceLock::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[LatticePolytope] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &LatticePolytope {
        &self.members[i]
    }

    /// Lattice points of member `i` in lex order.
    pub fn points(&self, i: usize) -> &[Point] {
        &self.points[i]
    }

    /// Coefficient name of each lattice point of member `i`; `None` marks a zero coefficient.
    pub fn names(&self, i: usize) -> &[Option<String>] {
        &self.names[i]
    }

    pub fn sum(&self) -> &LatticePolytope {
        self.sum.get_or_init(|| {
            let refs: Vec<&LatticePolytope> = self.members.iter().collect();
            minkowski_all(&refs).expect("members share the ambient dimension")
        })
    }
}

fn default_names(i: usize, pts: &[Point], support: &[Point]) -> Vec<Option<String>> {
    let mut supp: Vec<&Point> = support.iter().collect::<BTreeSet<_>>().into_iter().collect();
    supp.sort_by(|a, b| naming_order(a, b));
    let letter = member_letter(i);
    pts.iter()
        .map(|u| supp.iter().position(|s| *s == u).map(|k| format!("{letter}{k}")))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Essentiality {
    pub essential: bool,
    /// A subset whose sum is too small, with the dimension of that sum.
    pub witness: Option<(Vec<usize>, usize)>,
}

/// Every proper nonempty subfamily I must sum to dimension at least |I|.
pub fn is_essential(family: &PolytopeFamily) -> Essentiality {
    let m = family.members.len();
    for size in 1..m {
        for subset in (0..m).combinations(size) {
            let refs: Vec<&LatticePolytope> = subset.iter().map(|&i| &family.members[i]).collect();
            let d = sum_dim(&refs);
            if d < size {
                return Essentiality { essential: false, witness: Some((subset, d)) };
            }
        }
    }
    Essentiality { essential: true, witness: None }
}
