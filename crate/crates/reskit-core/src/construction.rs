//! Partition constructions: shared complete flags, the planar edge-walk case analysis and a
//! bounded exhaustive search.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::coloring::permanent;
use crate::degree::{cdeg, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::partition::{extension_options, validate, PartitionMatrix, TieBreak, VertexPartition};
use crate::polytope::{dot, is_essential, Face, LatticePolytope, Point, PolytopeFamily};
use crate::residue::{determinant, LaurentPoly};

/// Complete flags of every member whose faces add up to a complete flag of the sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharedFlag {
    /// Indices into the sum's `all_faces()`, dimensions 0..n-1.
    pub sum_faces: Vec<usize>,
    /// `member_faces[i][j]` is the summand of `sum_faces[j]` in member i.
    pub member_faces: Vec<Vec<Face>>,
}

fn summand_chain(family: &PolytopeFamily, sum_faces: &[usize]) -> Option<SharedFlag> {
    let faces = family.sum().all_faces();
    let mut member_faces = Vec::with_capacity(family.members().len());
    for p in family.members() {
        let mut chain = Vec::with_capacity(sum_faces.len());
        for (j, &f) in sum_faces.iter().enumerate() {
            let face = p.face_of(&faces[f].witness).ok()?;
            if face.dim != j {
                return None;
            }
            chain.push(face);
        }
        member_faces.push(chain);
    }
    Some(SharedFlag { sum_faces: sum_faces.to_vec(), member_faces })
}

/// Lex-first complete flag of the sum shared by all members and with positive flag sign.
///
/// Swapping the vertex for the other end of the flag's edge keeps the flag shared and
/// flips its sign, so a positive one exists whenever any shared flag does.
pub fn find_shared_flag(family: &PolytopeFamily) -> Option<SharedFlag> {
    let sum = family.sum();
    if sum.dim() != family.n() {
        return None;
    }
    sum.complete_flags()
        .iter()
        .filter(|f| sum.flag_sign(f).ok() == Some(1))
        .find_map(|f| summand_chain(family, &f.faces))
}

fn on_face(p: &LatticePolytope, u: &[i64], w: &[i64]) -> bool {
    dot(u, w) == p.min_value(w)
}

/// Partition from a per-point class rule. The rule is authoritative on vertices; a
/// non-vertex point keeps its rule class only if a vertex of its minimal face has it, and
/// otherwise takes the smallest such class, so the result is always induced.
fn grid(family: &Arc<PolytopeFamily>, rule: impl Fn(usize, &Point) -> usize) -> Result<PartitionMatrix> {
    let m = family.n() + 1;
    let cells = (0..m)
        .map(|i| {
            let p = family.member(i);
            let vclass: Vec<usize> = p.vertices().iter().map(|v| rule(i, v)).collect();
            let mut row = vec![Vec::new(); m];
            for u in family.points(i) {
                let wanted = rule(i, u);
                let allowed: BTreeSet<usize> = p.carrier(u).into_iter().map(|v| vclass[v]).collect();
                let class = if allowed.contains(&wanted) { wanted } else { *allowed.iter().next().unwrap() };
                row[class].push(u.clone());
            }
            row
        })
        .collect();
    PartitionMatrix::new(family.clone(), cells)
}

/// Cell (i, j) holds the lattice points of the j-th flag face of P_i outside the (j-1)-th,
/// with P_i itself as the n-th face.
pub fn locally_unmixed_partition(family: &Arc<PolytopeFamily>, sf: &SharedFlag) -> Result<PartitionMatrix> {
    let n = family.n();
    let m = grid(family, |i, u| {
        let p = family.member(i);
        (0..n).find(|&j| on_face(p, u, &sf.member_faces[i][j].witness)).unwrap_or(n)
    })?;
    if let Some(v) = validate(&m) {
        return Err(Error::Internal(format!("shared-flag partition failed validation: {v}")));
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dim2Case {
    LocallyUnmixed,
    PartiallyUnmixed2a,
    PartiallyUnmixed2b,
    GenericallyMixed,
    Exceptional,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dim2Report {
    /// Inner normals of the sum's edges, counterclockwise from its lex-smallest vertex.
    pub normals: Vec<Vec<i64>>,
    /// Members contributing an edge (not a vertex) to each edge of the sum.
    pub labels: Vec<Vec<usize>>,
    /// Positions in `labels` of the first minimal window covering all three members.
    pub window: Vec<usize>,
    pub case: Dim2Case,
    /// 1-based index of the construction attempt that succeeded; 0 for the search fallback.
    pub attempt: usize,
}

fn segment_normal(p: &LatticePolytope) -> Vec<i64> {
    let d: Vec<i64> = p.vertices()[1].iter().zip(&p.vertices()[0]).map(|(a, b)| a - b).collect();
    let g = num_integer::Integer::gcd(&d[0], &d[1]);
    vec![-d[1] / g, d[0] / g]
}

/// Two non-parallel segments plus a polygon with exactly the normal fan of their sum.
pub fn is_exceptional(family: &PolytopeFamily) -> bool {
    if family.n() != 2 {
        return false;
    }
    let segs: Vec<usize> = (0..3).filter(|&i| family.member(i).dim() == 1).collect();
    let polys: Vec<usize> = (0..3).filter(|&i| family.member(i).dim() == 2).collect();
    if segs.len() != 2 || polys.len() != 1 {
        return false;
    }
    let (a, b) = (segment_normal(family.member(segs[0])), segment_normal(family.member(segs[1])));
    if a[0] * b[1] - a[1] * b[0] == 0 {
        return false;
    }
    let fan: BTreeSet<Vec<i64>> = [a.clone(), b.clone(), vec![-a[0], -a[1]], vec![-b[0], -b[1]]].into_iter().collect();
    let poly: BTreeSet<Vec<i64>> = family.member(polys[0]).facets().iter().map(|f| f.normal.clone()).collect();
    fan == poly
}

/// Edge walk of the sum, the window and the case tag, without building a partition.
pub fn dim2_report(family: &PolytopeFamily) -> Result<Dim2Report> {
    if family.n() != 2 {
        return Err(Error::PreconditionViolated("planar case analysis needs n = 2".into()));
    }
    let ess = is_essential(family);
    if !ess.essential {
        let (s, d) = ess.witness.unwrap();
        return Err(Error::NonEssential(s, d));
    }
    let sum = family.sum();
    let edges: Vec<&Face> = sum.all_faces().iter().filter(|f| f.dim == 1).collect();
    let mut by_start: BTreeMap<usize, &Face> = BTreeMap::new();
    for e in &edges {
        let dir = [e.witness[1], -e.witness[0]];
        let start = *e.vertices.iter().min_by_key(|&&v| dot(&sum.vertices()[v], &dir)).unwrap();
        by_start.insert(start, e);
    }
    let mut normals = Vec::new();
    let mut v = 0;
    for _ in 0..edges.len() {
        let e = by_start[&v];
        normals.push(e.witness.clone());
        v = *e.vertices.iter().find(|&&x| x != v).unwrap();
    }
    let labels: Vec<Vec<usize>> = normals
        .iter()
        .map(|w| (0..3).filter(|&i| family.member(i).face_of(w).map(|f| f.dim == 1).unwrap_or(false)).collect())
        .collect();
    let case_exc = is_exceptional(family);
    let len = labels.len();
    // walk from the lex-smallest vertex until all three labels are seen, then keep the
    // shortest suffix that still covers them
    let mut seen = BTreeSet::new();
    let mut t = 0;
    for k in 0..2 * len {
        seen.extend(labels[k % len].iter().copied());
        if seen.len() == 3 {
            t = k;
            break;
        }
    }
    let mut window = Vec::new();
    let mut cover = BTreeSet::new();
    for k in (0..=t).rev() {
        window.insert(0, k % len);
        cover.extend(labels[k % len].iter().copied());
        if cover.len() == 3 {
            break;
        }
    }
    let case = if case_exc {
        Dim2Case::Exceptional
    } else {
        match window.len() {
            1 => Dim2Case::LocallyUnmixed,
            2 => {
                let (a, b) = (&labels[window[0]], &labels[window[1]]);
                if a.iter().any(|x| b.contains(x)) {
                    Dim2Case::PartiallyUnmixed2b
                } else {
                    Dim2Case::PartiallyUnmixed2a
                }
            }
            _ => Dim2Case::GenericallyMixed,
        }
    };
    Ok(Dim2Report { normals, labels, window, case, attempt: 0 })
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Vertex of `p` minimizing `w` (which must select a vertex).
fn vertex_at(p: &LatticePolytope, w: &[i64]) -> Point {
    p.vertices()[p.argmin(w)[0]].clone()
}

struct Planar<'a> {
    family: &'a Arc<PolytopeFamily>,
}

impl Planar<'_> {
    fn member(&self, i: usize) -> &LatticePolytope {
        self.family.member(i)
    }

    /// Endpoint of member m's edge at `n1` away from the corner with the edge at `n2`.
    fn far_end(&self, m: usize, n1: &[i64], n2: &[i64]) -> Point {
        let p = self.member(m);
        let corner = vertex_at(p, &add(n1, n2));
        let face = p.face_of(n1).unwrap();
        face.vertices.iter().map(|&v| p.vertices()[v].clone()).find(|v| *v != corner).unwrap_or(corner)
    }

    /// Flag rows along e1 for the pair members, the single vertex at e1 for member k.
    fn case2a(&self, pair: &[usize], k: usize, n1: &[i64], n2: &[i64]) -> Result<PartitionMatrix> {
        let far: BTreeMap<usize, Point> = pair.iter().map(|&m| (m, self.far_end(m, n1, n2))).collect();
        let vk = vertex_at(self.member(k), n1);
        grid(self.family, |i, u| {
            if i == k {
                if *u == vk {
                    0
                } else {
                    2
                }
            } else if *u == far[&i] {
                0
            } else if on_face(self.member(i), u, n1) {
                1
            } else {
                2
            }
        })
    }

    /// Case 2a rows plus member j's points on e2 moved to class 1.
    fn case2b_extended(&self, i: usize, j: usize, k: usize, n1: &[i64], n2: &[i64]) -> Result<PartitionMatrix> {
        let base = self.case2a(&[i, j], k, n1, n2)?;
        let pj = self.member(j);
        grid(self.family, |r, u| {
            let c = base.class_of(r, u).unwrap();
            if r == j && c != 0 && on_face(pj, u, n2) {
                1
            } else {
                c
            }
        })
    }

    /// Planar member a and middle member b flagged along e1; the other outer member c puts
    /// its vertex at e1 in class 1.
    fn case2b_planar(&self, a: usize, b: usize, c: usize, n1: &[i64], n2: &[i64]) -> Result<PartitionMatrix> {
        let far_a = self.far_end(a, n1, n2);
        let far_b = self.far_end(b, n1, n2);
        let vc = vertex_at(self.member(c), n1);
        grid(self.family, |i, u| {
            if i == c {
                if *u == vc {
                    1
                } else {
                    2
                }
            } else {
                let far = if i == a { &far_a } else { &far_b };
                if u == far {
                    0
                } else if on_face(self.member(i), u, n1) {
                    1
                } else {
                    2
                }
            }
        })
    }

    /// Window e2, e1, ..., e3 with e2 carrying a, the middle edges b alone, e3 carrying c.
    fn case3(&self, a: usize, b: usize, c: usize, normals: &[&Vec<i64>]) -> Result<PartitionMatrix> {
        let n_e2 = normals[0];
        let n_e3 = normals[normals.len() - 1];
        let pb = self.member(b);
        let vc = vertex_at(self.member(c), n_e2);
        let va = vertex_at(self.member(a), n_e3);
        grid(self.family, |i, u| {
            if i == b {
                if on_face(pb, u, n_e2) {
                    0
                } else if normals[1..].iter().any(|w| on_face(pb, u, w)) {
                    1
                } else {
                    2
                }
            } else if i == c {
                if *u == vc {
                    0
                } else {
                    2
                }
            } else if *u == va {
                1
            } else {
                2
            }
        })
    }
}

fn accepted(m: &PartitionMatrix) -> bool {
    if let Some(v) = validate(m) {
        log::debug!("attempt rejected: {v}");
        return false;
    }
    match cdeg(m, DEFAULT_SEED) {
        Ok(d) if d.abs() == 1 => true,
        other => {
            log::debug!("attempt rejected: degree {other:?}");
            false
        }
    }
}

/// Planar partition following the edge-walk case analysis; exceptional families are refused.
pub fn dim2_partition(family: &Arc<PolytopeFamily>) -> Result<(PartitionMatrix, Dim2Report)> {
    let mut report = dim2_report(family)?;
    if report.case == Dim2Case::Exceptional {
        return Err(Error::ExceptionalFamily(
            "two non-parallel segments and a polygon with the normal fan of their sum; every compatible partition has determinant 0".into(),
        ));
    }
    let pl = Planar { family };
    let w = &report.window;
    let lab = |k: usize| &report.labels[w[k]];
    let nrm = |k: usize| &report.normals[w[k]];
    let mut attempts: Vec<Result<PartitionMatrix>> = Vec::new();
    match report.case {
        Dim2Case::LocallyUnmixed => {
            let sum = family.sum();
            let edge = sum.face_of(nrm(0))?;
            let dir = [nrm(0)[1], -nrm(0)[0]];
            let start = *edge.vertices.iter().min_by_key(|&&v| dot(&sum.vertices()[v], &dir)).unwrap();
            let faces = [sum.face_index(&[start]).unwrap(), sum.face_index(&edge.vertices).unwrap()];
            let sf = summand_chain(family, &faces).ok_or_else(|| Error::Internal("edge is not shared".into()))?;
            attempts.push(locally_unmixed_partition(family, &sf));
        }
        Dim2Case::PartiallyUnmixed2a => {
            let (p, s) = if lab(0).len() == 2 { (0, 1) } else { (1, 0) };
            attempts.push(pl.case2a(lab(p), lab(s)[0], nrm(p), nrm(s)));
        }
        Dim2Case::PartiallyUnmixed2b => {
            let (l1, l2) = (lab(0), lab(1));
            let j = *l1.iter().find(|x| l2.contains(x)).unwrap();
            let i = *l1.iter().find(|&&x| x != j).unwrap();
            let k = *l2.iter().find(|&&x| x != j).unwrap();
            let (n1, n2) = (nrm(0), nrm(1));
            attempts.push(pl.case2b_extended(i, j, k, n1, n2));
            attempts.push(pl.case2b_extended(k, j, i, n2, n1));
            // planar outer members first, lower index first; with two segments the same
            // partition still works unless the family is exceptional
            let mut outer = vec![i, k];
            outer.sort_by_key(|&m| (family.member(m).dim() != 2, m));
            for a in outer {
                if a == i {
                    attempts.push(pl.case2b_planar(i, j, k, n1, n2));
                } else {
                    attempts.push(pl.case2b_planar(k, j, i, n2, n1));
                }
            }
        }
        Dim2Case::GenericallyMixed => {
            let first = lab(0);
            let last = lab(w.len() - 1);
            let a = *first.iter().find(|x| !last.contains(x) && (1..w.len()).all(|k| !lab(k).contains(x))).unwrap();
            let c = *last.iter().find(|x| (0..w.len() - 1).all(|k| !lab(k).contains(x))).unwrap();
            let b = 3 - a - c;
            let normals: Vec<&Vec<i64>> = (0..w.len()).map(nrm).collect();
            attempts.push(pl.case3(a, b, c, &normals));
        }
        Dim2Case::Exceptional => unreachable!(),
    }
    for (k, m) in attempts.into_iter().enumerate() {
        let m = m?;
        if accepted(&m) {
            report.attempt = k + 1;
            return Ok((m, report));
        }
    }
    log::warn!("planar construction failed for case {:?}; falling back to search", report.case);
    match exhaustive_search(family, &SearchBounds::default()) {
        Ok(Some(m)) => Ok((m, report)),
        Ok(None) => Err(Error::Internal(format!("no partition found for non-exceptional family: {report:?}"))),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Limit on the total number of vertices over all members.
    pub max_vertices: usize,
    /// Limit on the number of matrices collected by [`exhaust_all`].
    pub max_matrices: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { max_vertices: 14, max_matrices: 100_000 }
    }
}

/// Precomputed vertex sets of each member on each facet of the sum.
struct FacetTable {
    offsets: Vec<usize>,
    total: usize,
    /// [facet][member] -> global vertex positions
    on: Vec<Vec<Vec<usize>>>,
}

impl FacetTable {
    fn new(family: &PolytopeFamily) -> Self {
        let mut offsets = Vec::new();
        let mut total = 0;
        for p in family.members() {
            offsets.push(total);
            total += p.vertices().len();
        }
        let on = family
            .sum()
            .facets()
            .iter()
            .map(|f| {
                family
                    .members()
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p.argmin(&f.normal).into_iter().map(|v| offsets[i] + v).collect())
                    .collect()
            })
            .collect();
        FacetTable { offsets, total, on }
    }

    /// For induced partitions, compatibility depends only on the vertex classes and is
    /// decided on facets: every face's coloring matrix is dominated by a facet's.
    fn compatible(&self, classes: &[usize], m: usize) -> bool {
        self.on.iter().all(|members| {
            let a: Vec<Vec<bool>> = members
                .iter()
                .map(|vs| (0..m).map(|j| vs.iter().any(|&v| classes[v] == j)).collect())
                .collect();
            permanent(&a).map_or(false, |p| p == 0)
        })
    }

    fn decode(&self, mut index: u64, m: usize) -> Vec<usize> {
        let mut out = vec![0; self.total];
        for slot in out.iter_mut().rev() {
            *slot = (index % m as u64) as usize;
            index /= m as u64;
        }
        out
    }

    fn vertex_partitions(&self, classes: &[usize]) -> Vec<VertexPartition> {
        (0..self.offsets.len())
            .map(|i| {
                let end = self.offsets.get(i + 1).copied().unwrap_or(self.total);
                VertexPartition { member: i, assignment: classes[self.offsets[i]..end].to_vec() }
            })
            .collect()
    }
}

fn search_space(family: &PolytopeFamily, bounds: &SearchBounds) -> Result<(FacetTable, u64)> {
    let table = FacetTable::new(family);
    if table.total > bounds.max_vertices {
        return Err(Error::ResourceLimit(format!(
            "{} vertices exceed the search bound of {}",
            table.total, bounds.max_vertices
        )));
    }
    let count = (family.n() as u64 + 1).pow(table.total as u32);
    Ok((table, count))
}

/// Lex-first induced partition (vertex classes in lex order, lowest tie-break choices)
/// that is compatible and has combinatorial degree +1 or -1.
pub fn exhaustive_search(family: &Arc<PolytopeFamily>, bounds: &SearchBounds) -> Result<Option<PartitionMatrix>> {
    let (table, count) = search_space(family, bounds)?;
    let m = family.n() + 1;
    let zero_ties = TieBreak::Choices(Vec::new());
    let found = (0..count).into_par_iter().find_map_first(|idx| {
        let classes = table.decode(idx, m);
        if !table.compatible(&classes, m) {
            return None;
        }
        // the coloring matrices, hence the degree, do not depend on the tie-breaks
        let pm = PartitionMatrix::from_vertex_partitions(family.clone(), &table.vertex_partitions(&classes), &zero_ties).ok()?;
        match cdeg(&pm, DEFAULT_SEED) {
            Ok(d) if d.abs() == 1 => Some(pm),
            _ => None,
        }
    });
    Ok(found)
}

fn tie_break_choices(family: &PolytopeFamily, vps: &[VertexPartition]) -> Vec<Vec<Vec<usize>>> {
    let per_member: Vec<Vec<usize>> = vps
        .iter()
        .map(|vp| extension_options(family.member(vp.member), &vp.assignment).iter().map(|(_, o)| o.len()).collect())
        .collect();
    // odometer over every member's choice vector jointly
    let mut out = Vec::new();
    let mut cur: Vec<Vec<usize>> = per_member.iter().map(|v| vec![0; v.len()]).collect();
    loop {
        out.push(cur.clone());
        let mut advanced = false;
        'outer: for i in (0..cur.len()).rev() {
            for k in (0..cur[i].len()).rev() {
                if cur[i][k] + 1 < per_member[i][k] {
                    cur[i][k] += 1;
                    advanced = true;
                    break 'outer;
                }
                cur[i][k] = 0;
            }
        }
        if !advanced {
            return out;
        }
    }
}

/// Every compatible induced partition matrix with its determinant.
pub fn exhaust_all(family: &Arc<PolytopeFamily>, bounds: &SearchBounds) -> Result<Vec<(PartitionMatrix, LaurentPoly)>> {
    let (table, count) = search_space(family, bounds)?;
    let m = family.n() + 1;
    let compatible: Vec<Vec<usize>> = (0..count)
        .into_par_iter()
        .map(|idx| table.decode(idx, m))
        .filter(|classes| table.compatible(classes, m))
        .collect();
    let mut out = Vec::new();
    for classes in compatible {
        let vps = table.vertex_partitions(&classes);
        for choice in tie_break_choices(family, &vps) {
            let mut cells = Vec::with_capacity(m);
            for (vp, ch) in vps.iter().zip(choice) {
                cells.push(crate::partition::induce(family.member(vp.member), &vp.assignment, m, &TieBreak::Choices(ch))?);
            }
            let pm = PartitionMatrix::new(family.clone(), cells)?;
            let det = determinant(&pm)?;
            out.push((pm, det));
            if out.len() > bounds.max_matrices {
                return Err(Error::ResourceLimit(format!("more than {} compatible matrices", bounds.max_matrices)));
            }
        }
    }
    Ok(out)
}
