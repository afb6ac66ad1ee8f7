#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use reskit_core::partition::{PartitionMatrix, TieBreak, VertexPartition};
use reskit_core::{Point, PolytopeFamily};

pub fn pts(raw: &[&[i64]]) -> Vec<Point> {
    raw.iter().map(|p| p.to_vec()).collect()
}

/// Family from supports with default coefficient names.
pub fn family(n: usize, members: &[&[&[i64]]]) -> Arc<PolytopeFamily> {
    let supports: Vec<Vec<Point>> = members.iter().map(|m| pts(m)).collect();
    Arc::new(PolytopeFamily::from_terms(n, &supports, &[]).unwrap())
}

pub fn example1() -> Arc<PolytopeFamily> {
    family(2, &[&[&[1, 0], &[1, 1], &[0, 2]], &[&[0, 0], &[1, 0], &[2, 0], &[1, 1]], &[&[0, 0], &[0, 1], &[1, 2]]])
}

pub fn example2() -> Arc<PolytopeFamily> {
    family(2, &[&[&[0, 0], &[1, 0]], &[&[0, 0], &[1, 0], &[0, 1]], &[&[0, 0], &[1, 1]]])
}

pub fn example3() -> Arc<PolytopeFamily> {
    family(2, &[&[&[0, 0], &[1, 0]], &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]], &[&[0, 0], &[0, 1]]])
}

pub fn triangles() -> Arc<PolytopeFamily> {
    let t: &[&[i64]] = &[&[0, 0], &[1, 0], &[0, 1]];
    family(2, &[t, t, t])
}

pub fn segments() -> Arc<PolytopeFamily> {
    let s: &[&[i64]] = &[&[0], &[1]];
    family(1, &[s, s])
}

pub fn fixtures_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn cross(o: &[i64], a: &[i64], b: &[i64]) -> i64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain: strict convex hull vertices, counterclockwise from the
/// lex-smallest point.
pub fn monotone_chain(points: &[Point]) -> Vec<Point> {
    let mut p = points.to_vec();
    p.sort();
    p.dedup();
    if p.len() <= 2 {
        return p;
    }
    let mut lower: Vec<Point> = Vec::new();
    for q in &p {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], q) <= 0 {
            lower.pop();
        }
        lower.push(q.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for q in p.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], q) <= 0 {
            upper.pop();
        }
        upper.push(q.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Closed-polygon membership from a counterclockwise vertex list (2 or more vertices).
pub fn in_polygon(ccw: &[Point], u: &[i64], strict: bool) -> bool {
    if ccw.len() == 1 {
        return !strict && ccw[0] == u;
    }
    if ccw.len() == 2 {
        if strict {
            return false;
        }
        let (a, b) = (&ccw[0], &ccw[1]);
        let on_line = cross(a, b, u) == 0;
        let within = (0..2).all(|k| u[k] >= a[k].min(b[k]) && u[k] <= a[k].max(b[k]));
        return on_line && within;
    }
    (0..ccw.len()).all(|k| {
        let c = cross(&ccw[k], &ccw[(k + 1) % ccw.len()], u);
        if strict {
            c > 0
        } else {
            c >= 0
        }
    })
}

pub fn point2(range: i64) -> impl Strategy<Value = Point> {
    (0..=range, 0..=range).prop_map(|(a, b)| vec![a, b])
}

pub fn point3(range: i64) -> impl Strategy<Value = Point> {
    (0..=range, 0..=range, 0..=range).prop_map(|(a, b, c)| vec![a, b, c])
}

pub fn point_set2(range: i64, max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(point2(range), 1..=max)
}

/// Random family of `n + 1` members with coordinates in 0..=range; members have 1 to 4 points.
pub fn random_family(rng: &mut impl rand::Rng, n: usize, range: i64) -> Arc<PolytopeFamily> {
    let members: Vec<Vec<Point>> = (0..=n)
        .map(|_| {
            let k = rng.gen_range(1..=4);
            (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..=range)).collect()).collect()
        })
        .collect();
    Arc::new(PolytopeFamily::from_points(n, &members).unwrap())
}

/// Random essential family; retries until one is found.
pub fn random_essential(rng: &mut impl rand::Rng, n: usize, range: i64) -> Arc<PolytopeFamily> {
    loop {
        let f = random_family(rng, n, range);
        if reskit_core::polytope::is_essential(&f).essential {
            return f;
        }
    }
}

/// Random induced partition matrix: uniform vertex classes, lex tie-break.
pub fn random_induced(rng: &mut impl rand::Rng, family: &Arc<PolytopeFamily>) -> PartitionMatrix {
    let m = family.n() + 1;
    let vps: Vec<VertexPartition> = (0..m)
        .map(|i| VertexPartition {
            member: i,
            assignment: (0..family.member(i).vertices().len()).map(|_| rng.gen_range(0..m)).collect(),
        })
        .collect();
    PartitionMatrix::from_vertex_partitions(family.clone(), &vps, &TieBreak::Lex).unwrap()
}

/// Integer Laurent polynomial: exponent -> coefficient.
pub type IntPoly = std::collections::BTreeMap<Point, i64>;

fn int_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = IntPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Point = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_default() += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Determinant of the residue matrix after substituting integers for every coefficient,
/// by the Leibniz formula over the partition cells directly.
pub fn leibniz_specialized(m: &PartitionMatrix, values: &std::collections::BTreeMap<String, i64>) -> IntPoly {
    use itertools::Itertools;
    let fam = m.family();
    let size = m.n() + 1;
    let entry = |i: usize, j: usize| -> IntPoly {
        let mut p = IntPoly::new();
        for u in m.cell(i, j) {
            let k = fam.points(i).binary_search(u).unwrap();
            if let Some(name) = &fam.names(i)[k] {
                *p.entry(u.clone()).or_default() += values[name];
            }
        }
        p
    };
    let mut total = IntPoly::new();
    for perm in (0..size).permutations(size) {
        let inversions = (0..size).flat_map(|a| (a + 1..size).map(move |b| (a, b))).filter(|&(a, b)| perm[a] > perm[b]).count();
        let mut prod: IntPoly = [(vec![0; m.n()], 1)].into_iter().collect();
        for (i, &j) in perm.iter().enumerate() {
            prod = int_mul(&prod, &entry(i, j));
        }
        for (e, c) in prod {
            *total.entry(e).or_default() += if inversions % 2 == 0 { c } else { -c };
        }
    }
    total.retain(|_, c| *c != 0);
    total
}

/// Random integer values for every coefficient name of a family.
pub fn random_values(rng: &mut impl rand::Rng, family: &PolytopeFamily) -> std::collections::BTreeMap<String, i64> {
    (0..=family.n())
        .flat_map(|i| family.names(i).iter().flatten().cloned().collect::<Vec<_>>())
        .map(|name| (name, rng.gen_range(-9..=9)))
        .collect()
}

/// Family of dilated and translated copies of one polytope; all share every flag.
pub fn dilates(rng: &mut impl rand::Rng, base: &[Point]) -> Arc<PolytopeFamily> {
    let n = base[0].len();
    let members: Vec<Vec<Point>> = (0..=n)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let shift: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            base.iter().map(|v| v.iter().zip(&shift).map(|(x, s)| k * x + s).collect()).collect()
        })
        .collect();
    Arc::new(PolytopeFamily::from_points(n, &members).unwrap())
}
