//! Symbolic Laurent polynomials with named coefficients, residue matrices and the
//! certified residue element.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::construction::{dim2_partition, exhaustive_search, find_shared_flag, locally_unmixed_partition, Dim2Report, SearchBounds};
use crate::degree::cdeg;
use crate::error::{invalid, Error, Result};
use crate::partition::{compatibility_bruteforce, validate, Members, PartitionMatrix};
use crate::polytope::{dot, is_essential, naming_order, LatticePolytope, Point, PolytopeFamily};

/// Coefficient c_u of lattice point u in member i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub member: usize,
    pub point: Point,
    pub name: String,
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.member
            .cmp(&other.member)
            .then_with(|| naming_order(&self.point, &other.point))
            .then_with(|| self.name.cmp(&other.name))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Product of coefficient symbols, kept sorted.
pub type CoeffMonomial = Vec<Symbol>;

/// Integer combination of coefficient monomials attached to each exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    n: usize,
    terms: BTreeMap<Point, BTreeMap<CoeffMonomial, i64>>,
}

impl LaurentPoly {
    pub fn zero(n: usize) -> Self {
        LaurentPoly { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; n], Vec::new(), 1);
        p
    }

    pub fn monomial(sym: Symbol) -> Self {
        let mut p = Self::zero(sym.point.len());
        p.add_term(sym.point.clone(), vec![sym], 1);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Point, BTreeMap<CoeffMonomial, i64>> {
        &self.terms
    }

    /// Exponents with a nonzero coefficient, lex-ascending.
    pub fn support(&self) -> Vec<Point> {
        self.terms.keys().cloned().collect()
    }

    pub fn add_term(&mut self, exp: Point, mut mono: CoeffMonomial, scalar: i64) {
        if scalar == 0 {
            return;
        }
        mono.sort();
        let slot = self.terms.entry(exp.clone()).or_default();
        let c = slot.entry(mono.clone()).or_insert(0);
        *c += scalar;
        if *c == 0 {
            slot.remove(&mono);
            if slot.is_empty() {
                self.terms.remove(&exp);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, ms) in &other.terms {
            for (m, &s) in ms {
                out.add_term(e.clone(), m.clone(), s);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for ms in out.terms.values_mut() {
            for s in ms.values_mut() {
                *s = -*s;
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n.max(other.n));
        for (e1, m1) in &self.terms {
            for (e2, m2) in &other.terms {
                let e: Point = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                for (a, &s) in m1 {
                    for (b, &t) in m2 {
                        let mut mono = a.clone();
                        mono.extend(b.iter().cloned());
                        out.add_term(e.clone(), mono, s * t);
                    }
                }
            }
        }
        out
    }

    /// Substitute integer values for the coefficient symbols (by name); unnamed symbols
    /// count as 0. The result maps exponents to integers.
    pub fn specialize(&self, values: &BTreeMap<String, i64>) -> BTreeMap<Point, i64> {
        let mut out = BTreeMap::new();
        for (e, ms) in &self.terms {
            let v: i64 = ms
                .iter()
                .map(|(m, &s)| s * m.iter().map(|x| values.get(&x.name).copied().unwrap_or(0)).product::<i64>())
                .sum();
            if v != 0 {
                out.insert(e.clone(), v);
            }
        }
        out
    }
}

/// Integer combination of coefficient monomials, e.g. `a0*b1 - a1*b0`.
pub fn coefficient_text(ms: &BTreeMap<CoeffMonomial, i64>) -> String {
    let mut out = String::new();
    for (k, (m, &s)) in ms.iter().enumerate() {
        let mut factors: Vec<String> = Vec::new();
        if s.abs() != 1 || m.is_empty() {
            factors.push(s.abs().to_string());
        }
        factors.extend(m.iter().map(|x| x.name.clone()));
        let body = factors.join("*");
        out.push_str(match (k == 0, s < 0) {
            (true, false) => "",
            (true, true) => "-",
            (false, false) => " + ",
            (false, true) => " - ",
        });
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn variable(k: usize, n: usize) -> String {
    if n <= 4 {
        ["x", "y", "z", "w"][k].to_string()
    } else {
        format!("t{}", k + 1)
    }
}

/// Canonical text: one term per (exponent, coefficient monomial), exponents lex-ascending,
/// monomials ordered by symbol sequence, e.g. `a1*b2*c0*x*y - a1*b0*c1*x^2*y`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, ms) in &self.terms {
            for (m, &s) in ms {
                let mut factors: Vec<String> = Vec::new();
                if s.abs() != 1 {
                    factors.push(s.abs().to_string());
                }
                factors.extend(m.iter().map(|x| x.name.clone()));
                for (k, &p) in e.iter().enumerate() {
                    match p {
                        0 => {}
                        1 => factors.push(variable(k, self.n)),
                        _ => factors.push(format!("{}^{}", variable(k, self.n), p)),
                    }
                }
                if factors.is_empty() {
                    factors.push("1".into());
                }
                let body = factors.join("*");
                match (first, s < 0) {
                    (true, false) => write!(f, "{body}")?,
                    (true, true) => write!(f, "-{body}")?,
                    (false, false) => write!(f, " + {body}")?,
                    (false, true) => write!(f, " - {body}")?,
                }
                first = false;
            }
        }
        Ok(())
    }
}

/// Entry (i, j) sums c_u t^u over cell (i, j) of the partition.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueMatrix {
    pub entries: Vec<Vec<LaurentPoly>>,
    pub partition: PartitionMatrix,
}

impl ResidueMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn swap_rows(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        out.entries.swap(a, b);
        out
    }
}

impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            writeln!(f, "[{}]", cells.join(" | "))?;
        }
        Ok(())
    }
}

pub fn residue_matrix(m: &PartitionMatrix) -> Result<ResidueMatrix> {
    let fam = m.family();
    let n = fam.n();
    let mut entries = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = Vec::with_capacity(n + 1);
        for cell in m.cells()[i].iter() {
            let mut p = LaurentPoly::zero(n);
            for u in cell {
                let Ok(k) = fam.points(i).binary_search(u) else {
                    return invalid(format!("{u:?} is not a lattice point of member {i}"));
                };
                if let Some(name) = &fam.names(i)[k] {
                    p.add_term(u.clone(), vec![Symbol { member: i, point: u.clone(), name: name.clone() }], 1);
                }
            }
            row.push(p);
        }
        entries.push(row);
    }
    Ok(ResidueMatrix { entries, partition: m.clone() })
}

/// Laplace expansion along the first row.
pub fn matrix_determinant(entries: &[Vec<LaurentPoly>], n: usize) -> LaurentPoly {
    let size = entries.len();
    if size == 0 {
        return LaurentPoly::one(n);
    }
    let mut acc = LaurentPoly::zero(n);
    for j in 0..size {
        if entries[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<LaurentPoly>> = entries[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, p)| p.clone()).collect())
            .collect();
        let t = entries[0][j].mul(&matrix_determinant(&minor, n));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.add(&t.neg()) };
    }
    acc
}

pub fn determinant_of(r: &ResidueMatrix) -> LaurentPoly {
    matrix_determinant(&r.entries, r.partition.n())
}

/// Determinant of the residue matrix of a partition.
pub fn determinant(m: &PartitionMatrix) -> Result<LaurentPoly> {
    Ok(determinant_of(&residue_matrix(m)?))
}

/// First exponent of `h` outside the interior of `p`, if any.
pub fn check_interior_support(h: &LaurentPoly, p: &LatticePolytope) -> std::result::Result<(), Point> {
    match h.terms.keys().find(|u| !p.interior_contains(u)) {
        Some(u) => Err(u.clone()),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homogenized {
    /// Facet exponents <u, v> + a per term, facets in the polytope's order.
    pub terms: BTreeMap<Vec<i64>, BTreeMap<CoeffMonomial, i64>>,
    /// The same terms divided by the product of all facet variables, when that is polynomial.
    pub quotient: Option<BTreeMap<Vec<i64>, BTreeMap<CoeffMonomial, i64>>>,
}

pub fn homogenize(h: &LaurentPoly, p: &LatticePolytope) -> Result<Homogenized> {
    let mut terms = BTreeMap::new();
    for (u, ms) in &h.terms {
        if !p.contains(u) {
            return invalid(format!("exponent {u:?} lies outside the polytope"));
        }
        let e: Vec<i64> = p.facets().iter().map(|f| (dot(&f.normal, u) + f.offset as i128) as i64).collect();
        terms.insert(e, ms.clone());
    }
    let quotient = terms
        .keys()
        .all(|e| e.iter().all(|&x| x >= 1))
        .then(|| terms.iter().map(|(e, ms)| (e.iter().map(|x| x - 1).collect(), ms.clone())).collect());
    Ok(Homogenized { terms, quotient })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Auto,
    LocallyUnmixed,
    Dim2,
    Search,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Checks {
    pub rows_partition: bool,
    pub induced: bool,
    pub compatible_by_faces: bool,
    /// Transversal sums checked directly; skipped when the search space is large.
    pub compatible_bruteforce: Option<bool>,
    pub interior_support: bool,
}

#[derive(Clone, Debug)]
pub struct ResidueCertificate {
    pub element: LaurentPoly,
    pub degree: i64,
    pub partition: PartitionMatrix,
    pub matrix: ResidueMatrix,
    pub checks: Checks,
    /// Degree 0: the element carries no information about the residue.
    pub vanishing: bool,
    pub strategy: Strategy,
    pub report: Option<Dim2Report>,
}

fn require_essential(family: &PolytopeFamily) -> Result<()> {
    match is_essential(family).witness {
        None => Ok(()),
        Some((s, d)) => Err(Error::NonEssential(s, d)),
    }
}

const BRUTE_FORCE_LIMIT: usize = 200_000;

fn transversal_count(m: &PartitionMatrix) -> usize {
    let n = m.n();
    let sizes: Vec<usize> = m.cells().iter().map(|r| r.iter().map(|c| c.len()).sum::<usize>()).collect();
    sizes.iter().product::<usize>().saturating_mul((1..=n + 1).product())
}

/// Partition matrix for an essential family by the given strategy; `Auto` tries a shared
/// flag, then the planar case analysis (n = 2), then the bounded search.
pub fn construct_partition(family: &Arc<PolytopeFamily>, strategy: Strategy) -> Result<(PartitionMatrix, Strategy, Option<Dim2Report>)> {
    require_essential(family)?;
    let n = family.n();
    let shared = || -> Result<Option<PartitionMatrix>> {
        find_shared_flag(family).map(|sf| locally_unmixed_partition(family, &sf)).transpose()
    };
    let search = || -> Result<PartitionMatrix> {
        exhaustive_search(family, &SearchBounds::default())?
            .ok_or_else(|| Error::NoPartitionFound("no compatible induced partition with degree +-1".into()))
    };
    match strategy {
        Strategy::LocallyUnmixed => shared()?
            .map(|m| (m, Strategy::LocallyUnmixed, None))
            .ok_or_else(|| Error::NoPartitionFound("the members share no complete flag".into())),
        Strategy::Dim2 => {
            let (m, r) = dim2_partition(family)?;
            Ok((m, Strategy::Dim2, Some(r)))
        }
        Strategy::Search => Ok((search()?, Strategy::Search, None)),
        Strategy::Auto => {
            if let Some(m) = shared()? {
                return Ok((m, Strategy::LocallyUnmixed, None));
            }
            if n == 2 {
                let (m, r) = dim2_partition(family)?;
                return Ok((m, Strategy::Dim2, Some(r)));
            }
            Ok((search()?, Strategy::Search, None))
        }
    }
}

/// Partition, determinant, support check and degree for an essential family.
pub fn residue_element(
    family: &Arc<PolytopeFamily>,
    strategy: Strategy,
    partition: Option<PartitionMatrix>,
    seed: u64,
) -> Result<ResidueCertificate> {
    require_essential(family)?;
    let (m, strategy, report) = match partition {
        Some(m) => (m, strategy, None),
        None => construct_partition(family, strategy)?,
    };
    if let Some(v) = validate(&m) {
        return Err(Error::PreconditionViolated(format!("partition rejected: {v}")));
    }
    let mut checks = Checks { rows_partition: true, induced: true, compatible_by_faces: true, ..Default::default() };
    if transversal_count(&m) <= BRUTE_FORCE_LIMIT {
        let ok = compatibility_bruteforce(&m, Members::All).is_ok();
        if !ok {
            return Err(Error::Internal("face check and transversal check disagree".into()));
        }
        checks.compatible_bruteforce = Some(ok);
    }
    let matrix = residue_matrix(&m)?;
    let element = determinant_of(&matrix);
    if let Err(u) = check_interior_support(&element, family.sum()) {
        return Err(Error::Internal(format!("determinant has exponent {u:?} outside the interior")));
    }
    checks.interior_support = true;
    let degree = cdeg(&m, seed)?;
    Ok(ResidueCertificate { element, degree, partition: m, matrix, checks, vanishing: degree == 0, strategy, report })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyItem {
    pub check: &'static str,
    /// Failure witness when the check did not pass.
    pub outcome: std::result::Result<(), String>,
}

/// Every check behind a certificate, each reported separately.
pub fn verify(m: &PartitionMatrix, seed: u64) -> Vec<VerifyItem> {
    use crate::coloring::{face_coloring, is_simplicial, Flavor};
    use crate::degree::{pl_degree, Anchor, DegreeOptions};
    use crate::partition::{check_induced, check_rows, compatibility_by_faces};

    let mut out = Vec::new();
    let mut push = |check, outcome| out.push(VerifyItem { check, outcome });
    let rows = check_rows(m);
    let rows_ok = rows.is_none();
    push("rows partition the lattice points", rows.map_or(Ok(()), |v| Err(v.to_string())));
    if !rows_ok {
        return out;
    }
    push("cells induced from vertex partitions", check_induced(m).map_or(Ok(()), |v| Err(v.to_string())));
    let faces = compatibility_by_faces(m);
    let faces_ok = faces.is_ok();
    push(
        "coloring matrices have permanent 0",
        faces.map_err(|w| format!("face {:?}, permutation {:?}", w.face, w.perm)),
    );
    let brute = if transversal_count(m) <= BRUTE_FORCE_LIMIT {
        compatibility_bruteforce(m, Members::All)
            .map_err(|w| format!("classes {:?} give points {:?} summing to boundary point {:?}", w.perm, w.points, w.sum))
    } else {
        compatibility_bruteforce(m, Members::VerticesOnly)
            .map_err(|w| format!("classes {:?} give vertices {:?} summing to boundary point {:?}", w.perm, w.points, w.sum))
    };
    push("every transversal sum is interior", brute);
    if !faces_ok {
        return out;
    }
    let p = m.family().sum();
    let colorings: Vec<_> = [Flavor::Max, Flavor::Min].into_iter().map(|f| face_coloring(m, f)).collect();
    let simplicial = colorings.iter().try_for_each(|c| match c {
        Ok(fc) => is_simplicial(p, fc).map_err(|w| format!("faces {w:?}")),
        Err(e) => Err(e.to_string()),
    });
    let simplicial_ok = simplicial.is_ok();
    push("canonical colorings are simplicial", simplicial);
    if simplicial_ok {
        let max = colorings[0].as_ref().unwrap();
        let min = colorings[1].as_ref().unwrap();
        let runs = [
            (max, DegreeOptions { seed, anchor: Anchor::Barycenter }),
            (min, DegreeOptions { seed, anchor: Anchor::Barycenter }),
            (max, DegreeOptions { seed: seed.wrapping_add(1), anchor: Anchor::Barycenter }),
            (max, DegreeOptions { seed: seed.wrapping_add(2), anchor: Anchor::Weighted }),
        ];
        let degrees: std::result::Result<Vec<i64>, String> =
            runs.iter().map(|(fc, o)| pl_degree(fc, p, *o).map_err(|e| e.to_string())).collect();
        push(
            "degree independent of flavor, regular value and anchors",
            degrees.and_then(|d| if d.iter().all(|&x| x == d[0]) { Ok(()) } else { Err(format!("degrees {d:?}")) }),
        );
    }
    let support = determinant(m).map_err(|e| e.to_string()).and_then(|h| {
        check_interior_support(&h, p).map_err(|u| format!("exponent {u:?} on the boundary"))
    });
    push("determinant supported in the interior", support);
    out
}
