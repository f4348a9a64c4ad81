//! Chain complexes, (co)homology over `ℤ`, `ℚ` and `ℤ/p`, induced maps,
//! Lefschetz numbers, cross products and Künneth checks.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::digraph::{product_with_coordinates, Digraph, DigraphMorphism, Graph, MorphismMode, Product, Vertex};
use crate::error::{Error, InvariantError};
use crate::linalg::{kernel_field, rank_and_elementary_divisors, rank_field, solve_field, sparse_rank, Matrix};
use crate::minimal::{decompose, minimal_basis, MinimalBasis};
use crate::paths::{omega, PathVector, PrimitivePath};
use crate::{Int, Rational};

/// Coefficient ring of a (co)homology computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coefficients {
    Z,
    Q,
    Zp(u64),
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Z => write!(f, "z"),
            Coefficients::Q => write!(f, "q"),
            Coefficients::Zp(p) => write!(f, "zp:{p}"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl FromStr for Coefficients {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "z" | "Z" => Ok(Coefficients::Z),
            "q" | "Q" => Ok(Coefficients::Q),
            _ => {
                let p = s
                    .strip_prefix("zp:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| format!("unknown coefficients `{s}` (expected z, q or zp:P)"))?;
                if is_prime(p) {
                    Ok(Coefficients::Zp(p))
                } else {
                    Err(format!("{p} is not prime"))
                }
            }
        }
    }
}

/// Graded free modules with boundary matrices; `boundaries[k]` maps degree
/// `k` to degree `k - 1` (and `boundaries[0]` has no rows).
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    pub ranks: Vec<usize>,
    pub boundaries: Vec<Matrix<Int>>,
    pub labels: Vec<Vec<String>>,
}

impl ChainComplex {
    /// Validates shapes and `∂∂ = 0`.
    pub fn new(boundaries: Vec<Matrix<Int>>, labels: Vec<Vec<String>>) -> Result<Self, InvariantError> {
        let ranks: Vec<usize> = boundaries.iter().map(Matrix::cols).collect();
        for k in 1..boundaries.len() {
            if boundaries[k].rows() != ranks[k - 1] {
                return Err(InvariantError::Other(format!("boundary {k} has the wrong shape")));
            }
            if k >= 2 && !(&boundaries[k - 1] * &boundaries[k]).is_zero() {
                return Err(InvariantError::BoundarySquared(k));
            }
        }
        Ok(ChainComplex { ranks, boundaries, labels })
    }

    pub fn top(&self) -> usize {
        self.ranks.len().saturating_sub(1)
    }

    /// `∂_k`, with zero maps past the top degree.
    pub fn boundary(&self, k: usize) -> Matrix<Int> {
        match self.boundaries.get(k) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.ranks.get(k - 1).copied().unwrap_or(0), 0),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks.iter().enumerate().map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
    }

    /// Restriction to the degrees `0..=d`.
    pub fn truncate(&self, d: usize) -> ChainComplex {
        let n = (d + 1).min(self.ranks.len());
        ChainComplex {
            ranks: self.ranks[..n].to_vec(),
            boundaries: self.boundaries[..n].to_vec(),
            labels: self.labels[..n.min(self.labels.len())].to_vec(),
        }
    }
}

/// Betti numbers and torsion per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyResult {
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<Int>>,
    pub coefficients: Coefficients,
}

impl HomologyResult {
    pub fn truncate(mut self, d: usize) -> Self {
        self.betti.truncate(d + 1);
        self.torsion.truncate(d + 1);
        self
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.betti.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }

    /// Same Betti numbers and torsion, ignoring trailing zero degrees.
    pub fn same_invariants(&self, other: &HomologyResult) -> bool {
        let n = self.betti.len().max(other.betti.len());
        (0..n).all(|k| {
            self.betti.get(k).copied().unwrap_or(0) == other.betti.get(k).copied().unwrap_or(0)
                && self.torsion.get(k).map(Vec::as_slice).unwrap_or(&[])
                    == other.torsion.get(k).map(Vec::as_slice).unwrap_or(&[])
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TorsionEntry {
    Small(u64),
    Big(String),
}

#[derive(Serialize, Deserialize)]
struct HomologyJson {
    betti: Vec<usize>,
    torsion: Vec<Vec<TorsionEntry>>,
    coefficients: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
}

impl Serialize for HomologyResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let torsion = self
            .torsion
            .iter()
            .map(|t| {
                t.iter().map(|d| d.to_u64().map(TorsionEntry::Small).unwrap_or_else(|| TorsionEntry::Big(d.to_string()))).collect()
            })
            .collect();
        let (coefficients, p) = match self.coefficients {
            Coefficients::Z => ("z", None),
            Coefficients::Q => ("q", None),
            Coefficients::Zp(p) => ("zp", Some(p)),
        };
        HomologyJson { betti: self.betti.clone(), torsion, coefficients: coefficients.into(), p }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomologyResult {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = HomologyJson::deserialize(d)?;
        let coefficients = match (j.coefficients.as_str(), j.p) {
            ("z", None) => Coefficients::Z,
            ("q", None) => Coefficients::Q,
            ("zp", Some(p)) => Coefficients::Zp(p),
            (c, _) => return Err(D::Error::custom(format!("bad coefficients `{c}`"))),
        };
        let mut torsion = Vec::new();
        for t in j.torsion {
            let mut row = Vec::new();
            for e in t {
                row.push(match e {
                    TorsionEntry::Small(v) => Int::from(v),
                    TorsionEntry::Big(s) => s.parse().map_err(D::Error::custom)?,
                });
            }
            torsion.push(row);
        }
        Ok(HomologyResult { betti: j.betti, torsion, coefficients })
    }
}

/// Rank and nonzero elementary divisors of one matrix.
struct Invariants {
    divisors: Vec<Int>,
}

impl Invariants {
    fn of(m: &Matrix<Int>) -> Self {
        Invariants { divisors: rank_and_elementary_divisors(m, false).1 }
    }

    fn rank(&self, coeff: Coefficients) -> usize {
        match coeff {
            Coefficients::Z | Coefficients::Q => self.divisors.len(),
            Coefficients::Zp(p) => {
                let p = Int::from(p);
                self.divisors.iter().filter(|d| !d.is_multiple_of(&p)).count()
            }
        }
    }

    fn torsion(&self, coeff: Coefficients) -> Vec<Int> {
        match coeff {
            Coefficients::Z => self.divisors.iter().filter(|d| !d.is_one()).cloned().collect(),
            _ => vec![],
        }
    }
}

/// Homology of `ranks` with maps `maps[k]: C_k -> C_{k-1}` (homology) or
/// `C_k -> C_{k+1}` (cohomology); `incoming(k)` is the map whose image is
/// quotiented out and `outgoing(k)` the one whose kernel is taken.
fn graded(
    ranks: &[usize],
    outgoing: &[Option<Invariants>],
    incoming: &[Option<Invariants>],
    coeff: Coefficients,
) -> HomologyResult {
    let mut betti = Vec::with_capacity(ranks.len());
    let mut torsion = Vec::with_capacity(ranks.len());
    for (k, &n) in ranks.iter().enumerate() {
        let out = outgoing[k].as_ref().map_or(0, |i| i.rank(coeff));
        let inc = incoming[k].as_ref().map_or(0, |i| i.rank(coeff));
        betti.push(n - out - inc);
        torsion.push(incoming[k].as_ref().map_or(vec![], |i| i.torsion(coeff)));
    }
    HomologyResult { betti, torsion, coefficients: coeff }
}

/// Homology of every degree `0..=top`, taking `∂_{top+1} = 0`.
pub fn homology(c: &ChainComplex, coeff: Coefficients) -> HomologyResult {
    let inv: Vec<Invariants> = c.boundaries.iter().map(Invariants::of).collect();
    let n = c.ranks.len();
    let mut outgoing: Vec<Option<Invariants>> = Vec::with_capacity(n);
    let mut incoming: Vec<Option<Invariants>> = Vec::with_capacity(n);
    let mut it = inv.into_iter();
    let mut current = it.next();
    for _ in 0..n {
        let next = it.next();
        outgoing.push(current.take());
        incoming.push(next.as_ref().map(|i| Invariants { divisors: i.divisors.clone() }));
        current = next;
    }
    graded(&c.ranks, &outgoing, &incoming, coeff)
}

/// Cohomology of a cochain complex given by `coboundaries[k]: C^k -> C^{k+1}`
/// (the last one may be absent).
pub fn cohomology_from_coboundaries(ranks: &[usize], coboundaries: &[Matrix<Int>], coeff: Coefficients) -> HomologyResult {
    let n = ranks.len();
    let outgoing: Vec<Option<Invariants>> = (0..n).map(|k| coboundaries.get(k).map(Invariants::of)).collect();
    let incoming: Vec<Option<Invariants>> =
        (0..n).map(|k| if k == 0 { None } else { coboundaries.get(k - 1).map(Invariants::of) }).collect();
    graded(ranks, &outgoing, &incoming, coeff)
}

/// Cohomology of the dual complex, `δ_k = ∂_{k+1}^T`.
pub fn cohomology(c: &ChainComplex, coeff: Coefficients) -> HomologyResult {
    let cob: Vec<Matrix<Int>> = (1..c.boundaries.len()).map(|k| c.boundaries[k].transpose()).collect();
    cohomology_from_coboundaries(&c.ranks, &cob, coeff)
}

/// The complex `(Ω_*, ∂)` in the given minimal basis.
pub fn path_chain_complex(basis: &MinimalBasis) -> Result<ChainComplex, Error> {
    let mut boundaries = Vec::with_capacity(basis.max_degree() + 1);
    boundaries.push(Matrix::zeros(0, basis.rank(0)));
    for k in 1..=basis.max_degree() {
        let cols: Vec<Vec<Int>> =
            basis.elements(k).iter().map(|b| decompose(basis, &b.boundary())).collect::<Result<_, _>>()?;
        boundaries.push(Matrix::from_columns(basis.rank(k - 1), &cols));
    }
    let labels = (0..=basis.max_degree()).map(|k| basis.labels(k)).collect();
    Ok(ChainComplex::new(boundaries, labels)?)
}

/// Degrees needed to report homology up to `max_dim` exactly.
pub fn basis_degree_for(g: &Digraph, max_dim: usize) -> usize {
    (max_dim + 1).min(g.vertex_count().saturating_sub(1))
}

/// Path homology through degree `min(max_dim, top)` where `top` is the
/// highest degree with `Ω_k ≠ 0`.
pub fn path_homology(g: &Digraph, max_dim: usize, coeff: Coefficients) -> Result<HomologyResult, Error> {
    let b = minimal_basis(g, basis_degree_for(g, max_dim))?;
    let c = path_chain_complex(&b)?;
    Ok(homology(&c, coeff).truncate(max_dim.min(b.top_degree())))
}

/// Path cohomology, truncated like [`path_homology`].
pub fn path_cohomology(g: &Digraph, max_dim: usize, coeff: Coefficients) -> Result<HomologyResult, Error> {
    let b = minimal_basis(g, basis_degree_for(g, max_dim))?;
    let c = path_chain_complex(&b)?;
    Ok(cohomology(&c, coeff).truncate(max_dim.min(b.top_degree())))
}

/// Per-degree matrices `f_k: C_k(source) -> C_k(target)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap {
    pub matrices: Vec<Matrix<Int>>,
}

impl ChainMap {
    pub fn identity(c: &ChainComplex) -> Self {
        ChainMap { matrices: c.ranks.iter().map(|&n| Matrix::identity(n)).collect() }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ChainMap) -> ChainMap {
        ChainMap { matrices: self.matrices.iter().zip(&first.matrices).map(|(a, b)| a * b).collect() }
    }

    /// First degree where `∂ f ≠ f ∂`, if any.
    pub fn failing_degree(&self, source: &ChainComplex, target: &ChainComplex) -> Option<usize> {
        (1..self.matrices.len()).find(|&k| &target.boundary(k) * &self.matrices[k] != &self.matrices[k - 1] * &source.boundary(k))
    }

    pub fn traces(&self) -> Vec<Int> {
        self.matrices.iter().map(Matrix::trace).collect()
    }
}

/// `Ω(f)` in the chosen bases, for every degree of the source basis.
///
/// Broad maps send paths with repeated image vertices to `0`; when an image
/// leaves `Ω` or the result is not a chain map, the map is reported as
/// undefined instead.
pub fn induced_map(f: &DigraphMorphism<'_>, bg: &MinimalBasis, bh: &MinimalBasis) -> Result<ChainMap, Error> {
    let cg = path_chain_complex(bg)?;
    let ch = path_chain_complex(bh)?;
    induced_map_with(f, bg, &cg, bh, &ch)
}

pub fn induced_map_with(
    f: &DigraphMorphism<'_>,
    bg: &MinimalBasis,
    cg: &ChainComplex,
    bh: &MinimalBasis,
    ch: &ChainComplex,
) -> Result<ChainMap, Error> {
    let top = bg.max_degree();
    let broad = f.mode == MorphismMode::Broad;
    let mut matrices = Vec::with_capacity(top + 1);
    for k in 0..=top {
        if k > bh.max_degree() {
            if k < bh.graph.vertex_count() {
                return Err(Error::Domain(format!("target basis stops below degree {k}")));
            }
            matrices.push(Matrix::zeros(0, bg.rank(k)));
            continue;
        }
        let mut cols = Vec::with_capacity(bg.rank(k));
        for p in bg.elements(k) {
            let image = p.map_vertices(|v| f.apply(v));
            match decompose(bh, &image) {
                Ok(c) => cols.push(c),
                Err(_) if broad => {
                    return Err(Error::Domain(format!(
                        "induced map undefined: image of {} is not ∂-invariant",
                        p.display(&bg.graph)
                    )))
                }
                Err(e) => return Err(e),
            }
        }
        matrices.push(Matrix::from_columns(bh.rank(k), &cols));
    }
    let map = ChainMap { matrices };
    if let Some(k) = map.failing_degree(cg, ch) {
        return Err(if broad {
            Error::Domain(format!("induced map undefined: not a chain map in degree {k}"))
        } else {
            InvariantError::NotChainMap(k).into()
        });
    }
    Ok(map)
}

pub(crate) fn to_rational(m: &Matrix<Int>) -> Matrix<Rational> {
    m.map(|x| Rational::from_integer(x.clone()))
}

pub(crate) fn column_space_basis(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
    let (_, pivots) = crate::linalg::rref(m);
    pivots.into_iter().map(|j| m.column(j)).collect()
}

/// Cycle representatives of a basis of `H_k(C; ℚ)` together with a basis of
/// `B_k`; the pair spans `Z_k`.
pub(crate) fn homology_representatives(c: &ChainComplex, k: usize) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
    let n = c.ranks[k];
    let boundaries = column_space_basis(&to_rational(&c.boundary(k + 1)));
    let cycles = if k == 0 { (0..n).map(|i| unit(n, i)).collect() } else { kernel_field(&to_rational(&c.boundary(k))) };
    let reps = complement_in(n, &boundaries, cycles);
    (reps, boundaries)
}

/// Greedily picks from `candidates` a basis of their span modulo `base`.
pub(crate) fn complement_in(n: usize, base: &[Vec<Rational>], candidates: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let mut basis = base.to_vec();
    let mut reps = Vec::new();
    for z in candidates {
        basis.push(z.clone());
        if rank_field(&Matrix::from_columns(n, &basis)) == basis.len() {
            reps.push(z);
        } else {
            basis.pop();
        }
    }
    reps
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

pub(crate) fn mul_vec_rat(m: &Matrix<Int>, v: &[Rational]) -> Vec<Rational> {
    (0..m.rows())
        .map(|i| (0..m.cols()).fold(Rational::zero(), |acc, j| acc + Rational::from_integer(m[(i, j)].clone()) * &v[j]))
        .collect()
}

/// Traces of an endomorphism chain map on `H_k(C; ℚ)` for every degree.
pub fn homology_traces(c: &ChainComplex, f: &ChainMap) -> Vec<Rational> {
    (0..c.ranks.len())
        .map(|k| {
            let (reps, bounds) = homology_representatives(c, k);
            let mut basis = bounds.clone();
            basis.extend(reps.iter().cloned());
            let m = Matrix::from_columns(c.ranks[k], &basis);
            reps.iter()
                .enumerate()
                .map(|(i, z)| {
                    let y = solve_field(&m, &mul_vec_rat(&f.matrices[k], z)).expect("cycles map to cycles");
                    y[bounds.len() + i].clone()
                })
                .fold(Rational::zero(), |a, b| a + b)
        })
        .collect()
}

/// Theory used for Lefschetz numbers and fixed-point searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    Path,
    Clique,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LefschetzReport {
    pub theory: Theory,
    #[serde(serialize_with = "crate::homology::ser_rational")]
    pub number: Rational,
    #[serde(serialize_with = "crate::homology::ser_rationals")]
    pub homology_traces: Vec<Rational>,
    /// Traces on the chain groups (`Ω_k` or simplicial chains).
    #[serde(serialize_with = "crate::homology::ser_ints")]
    pub chain_traces: Vec<Int>,
    pub fixed: Option<String>,
}

pub(crate) fn ser_rational<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn ser_rationals<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

pub(crate) fn ser_ints<S: Serializer>(xs: &[Int], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

fn alternating_sum(xs: &[Rational]) -> Rational {
    xs.iter().enumerate().fold(Rational::zero(), |acc, (k, x)| if k % 2 == 0 { acc + x } else { acc - x })
}

/// Λ(f) for a digraph endomorphism, over all degrees with `Ω_k ≠ 0`.
pub fn lefschetz_path(f: &DigraphMorphism<'_>) -> Result<LefschetzReport, Error> {
    let g = f.source;
    if !std::ptr::eq(f.source, f.target) && f.source != f.target {
        return Err(Error::Domain("Lefschetz numbers need an endomorphism".into()));
    }
    let b = minimal_basis(g, g.vertex_count().saturating_sub(1))?;
    let c = path_chain_complex(&b)?;
    let map = induced_map_with(f, &b, &c, &b, &c)?;
    let traces = homology_traces(&c, &map);
    Ok(LefschetzReport {
        theory: Theory::Path,
        number: alternating_sum(&traces),
        homology_traces: traces,
        chain_traces: map.traces(),
        fixed: fixed_vertex(f).map(|v| g.name(v).to_string()),
    })
}

pub fn fixed_vertex(f: &DigraphMorphism<'_>) -> Option<Vertex> {
    f.fixed_vertices().first().copied()
}

/// The clique (flag) complex of a graph: simplices are cliques with vertices
/// in increasing order, faces by vertex deletion.
pub fn clique_chain_complex(g: &Graph) -> (Vec<Vec<Vec<Vertex>>>, ChainComplex) {
    let cliques = crate::finitetop::cliques_by_dimension(g);
    let index: Vec<HashMap<&[Vertex], usize>> =
        cliques.iter().map(|l| l.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect()).collect();
    let mut boundaries = vec![Matrix::zeros(0, cliques.first().map_or(0, Vec::len))];
    for k in 1..cliques.len() {
        let mut m = Matrix::zeros(cliques[k - 1].len(), cliques[k].len());
        for (j, s) in cliques[k].iter().enumerate() {
            for i in 0..s.len() {
                let mut face = s.clone();
                face.remove(i);
                m[(index[k - 1][face.as_slice()], j)] = Int::from(if i % 2 == 0 { 1 } else { -1 });
            }
        }
        boundaries.push(m);
    }
    let labels = cliques
        .iter()
        .map(|l| l.iter().map(|c| crate::finitetop::clique_label(g, c)).collect())
        .collect();
    let c = ChainComplex::new(boundaries, labels).expect("simplicial boundaries square to zero");
    (cliques, c)
}

/// Sign of the permutation sorting `v` and the sorted sequence.
fn sort_sign(v: &[Vertex]) -> (i64, Vec<Vertex>) {
    let mut w = v.to_vec();
    let mut sign = 1;
    for i in 0..w.len() {
        for j in 0..w.len() - 1 - i {
            if w[j] > w[j + 1] {
                w.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    (sign, w)
}

/// Λ(f) on the clique complex for a graph automorphism given as a vertex
/// permutation.
pub fn lefschetz_clique(g: &Graph, perm: &[Vertex]) -> LefschetzReport {
    let (cliques, c) = clique_chain_complex(g);
    let index: Vec<HashMap<Vec<Vertex>, usize>> =
        cliques.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
    let matrices = cliques
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let mut m = Matrix::zeros(l.len(), l.len());
            for (j, s) in l.iter().enumerate() {
                let image: Vec<Vertex> = s.iter().map(|&v| perm[v as usize]).collect();
                let (sign, sorted) = sort_sign(&image);
                m[(index[k][&sorted], j)] = Int::from(sign);
            }
            m
        })
        .collect();
    let map = ChainMap { matrices };
    debug_assert_eq!(map.failing_degree(&c, &c), None);
    let traces = homology_traces(&c, &map);
    LefschetzReport {
        theory: Theory::Clique,
        number: alternating_sum(&traces),
        homology_traces: traces,
        chain_traces: map.traces(),
        fixed: fixed_clique(g, perm).map(|s| crate::finitetop::clique_label(g, &s)),
    }
}

/// The first clique (smallest size, then lexicographic) mapped onto itself.
pub fn fixed_clique(g: &Graph, perm: &[Vertex]) -> Option<Vec<Vertex>> {
    crate::finitetop::cliques_by_dimension(g).into_iter().flatten().find(|s| {
        let mut image: Vec<Vertex> = s.iter().map(|&v| perm[v as usize]).collect();
        image.sort_unstable();
        image == *s
    })
}

/// Shuffle-sign cross product of primitive paths into `G □ H`.
fn cross_primitive(p: &PrimitivePath, q: &PrimitivePath, prod: &Product, out: &mut PathVector, coeff: &Int) {
    let (r, s) = (p.degree(), q.degree());
    let (pv, qv) = (p.vertices(), q.vertices());
    // steps: false = G-step, true = H-step; sign counts H-steps before G-steps
    let mut steps = vec![false; r + s];
    fn rec(
        pos: usize,
        hs: usize,
        steps: &mut Vec<bool>,
        s: usize,
        emit: &mut dyn FnMut(&[bool]),
    ) {
        if pos == steps.len() {
            if hs == s {
                emit(steps);
            }
            return;
        }
        let gs = pos - hs;
        if gs < steps.len() - s {
            steps[pos] = false;
            rec(pos + 1, hs, steps, s, emit);
        }
        if hs < s {
            steps[pos] = true;
            rec(pos + 1, hs + 1, steps, s, emit);
        }
    }
    rec(0, 0, &mut steps, s, &mut |st: &[bool]| {
        let (mut i, mut j, mut inversions, mut hseen) = (0usize, 0usize, 0usize, 0usize);
        let mut seq = vec![prod.vertex_of(pv[0], qv[0])];
        for &h in st {
            if h {
                j += 1;
                hseen += 1;
            } else {
                i += 1;
                inversions += hseen;
            }
            seq.push(prod.vertex_of(pv[i], qv[j]));
        }
        let c = if inversions % 2 == 0 { coeff.clone() } else { -coeff.clone() };
        out.add_term(PrimitivePath::new(seq), c);
    });
}

/// `P × Q` in `G □ H`, extended bilinearly.
pub fn cross_product(p: &PathVector, q: &PathVector, prod: &Product) -> PathVector {
    let mut out = PathVector::zero(p.degree() + q.degree());
    for (a, x) in p.terms() {
        for (b, y) in q.terms() {
            cross_primitive(a, b, prod, &mut out, &(x * y));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KunnethReport {
    pub max_degree: usize,
    pub betti_g: Vec<usize>,
    pub betti_h: Vec<usize>,
    pub betti_product: Vec<usize>,
    pub convolution: Vec<usize>,
    pub cross_products_invariant: bool,
    pub cross_products_independent: bool,
    pub passed: bool,
}

/// Rational Betti numbers of `Ω_*` through degree `max_k`, from the
/// saturated kernel bases and sparse exact ranks.
pub fn rational_betti(g: &Digraph, max_k: usize) -> Vec<usize> {
    let top = (max_k + 1).min(g.vertex_count().saturating_sub(1));
    let modules: Vec<_> = (0..=top).map(|k| omega(g, k)).collect();
    let mut ranks_d = vec![0usize; top + 2];
    for k in 1..=top {
        let lower = &modules[k - 1];
        let cols = modules[k].basis_vectors().into_iter().map(|v| {
            let b = v.boundary();
            b.terms()
                .map(|(p, c)| (lower.index_of(p).expect("boundary of Ω lies in A"), c.clone()))
                .collect::<Vec<_>>()
        });
        ranks_d[k] = sparse_rank(cols);
    }
    (0..=max_k.min(top))
        .map(|k| modules[k].rank() - ranks_d[k] - ranks_d[k + 1])
        .collect()
}

pub fn betti_convolution(a: &[usize], b: &[usize], max_k: usize) -> Vec<usize> {
    (0..=max_k)
        .map(|k| (0..=k).map(|i| a.get(i).copied().unwrap_or(0) * b.get(k - i).copied().unwrap_or(0)).sum())
        .collect()
}

fn pad(mut v: Vec<usize>, n: usize) -> Vec<usize> {
    v.resize(n, 0);
    v
}

/// Compares `β_k(G □ H; ℚ)` with `Σ_{i+j=k} β_i(G) β_j(H)` for `k ≤ max_k`
/// and checks that cross products of basis elements are invariant and
/// linearly independent in every degree `≤ max_k`.
pub fn kunneth_check(g: &Digraph, h: &Digraph, max_k: usize) -> Result<KunnethReport, Error> {
    let prod = product_with_coordinates(g, h);
    let bg = pad(rational_betti(g, max_k), max_k + 1);
    let bh = pad(rational_betti(h, max_k), max_k + 1);
    let bp = pad(rational_betti(&prod.digraph, max_k), max_k + 1);
    let conv = betti_convolution(&bg, &bh, max_k);

    let basis_g = minimal_basis(g, max_k.min(g.vertex_count().saturating_sub(1)))?;
    let basis_h = minimal_basis(h, max_k.min(h.vertex_count().saturating_sub(1)))?;
    let mut invariant = true;
    let mut independent = true;
    for k in 0..=max_k {
        let mut cols = Vec::new();
        let mut index: HashMap<PrimitivePath, usize> = HashMap::new();
        for i in 0..=k.min(basis_g.max_degree()) {
            if k - i > basis_h.max_degree() {
                continue;
            }
            for p in basis_g.elements(i) {
                for q in basis_h.elements(k - i) {
                    let x = cross_product(p, q, &prod);
                    invariant &= x.is_invariant(&prod.digraph);
                    let col: Vec<(usize, Int)> = x
                        .terms()
                        .map(|(path, c)| {
                            let next = index.len();
                            (*index.entry(path.clone()).or_insert(next), c.clone())
                        })
                        .collect();
                    cols.push(col);
                }
            }
        }
        let n = cols.len();
        independent &= sparse_rank(cols) == n;
    }
    let passed = bp == conv && invariant && independent;
    Ok(KunnethReport {
        max_degree: max_k,
        betti_g: bg,
        betti_h: bh,
        betti_product: bp,
        convolution: conv,
        cross_products_invariant: invariant,
        cross_products_independent: independent,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomotopyReport {
    pub one_step: bool,
    /// `None` when an induced map is undefined.
    pub same_on_cohomology: Option<bool>,
}

/// Whether `f` and `g` induce the same map on `H_*(·; ℚ)` (equivalently on
/// rational cohomology): `f - g` sends cycles to boundaries.
pub fn same_on_rational_homology(f: &ChainMap, g: &ChainMap, source: &ChainComplex, target: &ChainComplex) -> bool {
    let top = f.matrices.len().min(g.matrices.len());
    (0..top).all(|k| {
        let (reps, _) = homology_representatives(source, k);
        let b = to_rational(&target.boundary(k + 1));
        reps.iter().all(|z| {
            let d: Vec<Rational> =
                mul_vec_rat(&f.matrices[k], z).into_iter().zip(mul_vec_rat(&g.matrices[k], z)).map(|(a, b)| a - b).collect();
            d.iter().all(Zero::is_zero) || (b.cols() > 0 && solve_field(&b, &d).is_some())
        })
    })
}

/// One-step homotopy test plus comparison of the induced maps on rational
/// cohomology, over full-degree bases.
pub fn homotopy_check(f: &DigraphMorphism<'_>, g: &DigraphMorphism<'_>) -> Result<HomotopyReport, Error> {
    let one_step = crate::digraph::one_step_homotopic(f, g)?;
    let bs = minimal_basis(f.source, f.source.vertex_count().saturating_sub(1))?;
    let bt = minimal_basis(f.target, f.target.vertex_count().saturating_sub(1))?;
    let cs = path_chain_complex(&bs)?;
    let ct = path_chain_complex(&bt)?;
    let same = match (induced_map_with(f, &bs, &cs, &bt, &ct), induced_map_with(g, &bs, &cs, &bt, &ct)) {
        (Ok(a), Ok(b)) => Some(same_on_rational_homology(&a, &b, &cs, &ct)),
        (Err(e), _) | (_, Err(e)) if e.is_invariant_failure() => return Err(e),
        _ => None,
    };
    Ok(HomotopyReport { one_step, same_on_cohomology: same })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::cartesian_product;
    use crate::examples;

    fn hom(g: &Digraph, coeff: Coefficients) -> HomologyResult {
        path_homology(g, 6, coeff).unwrap()
    }

    #[test]
    fn chain_complex_examples() {
        let d = examples::diamond();
        let c = path_chain_complex(&minimal_basis(&d, 2).unwrap()).unwrap();
        assert_eq!(c.ranks, vec![4, 4, 1]);
        let col: Vec<i64> = c.boundaries[2].column(0).iter().map(|x| x.to_i64().unwrap()).collect();
        assert!(col.iter().all(|x| x.abs() == 1));
        assert_eq!(col.iter().sum::<i64>(), 0);
        let c3 = path_chain_complex(&minimal_basis(&examples::directed_cycle(3), 2).unwrap()).unwrap();
        assert_eq!(c3.ranks, vec![3, 3, 0]);
        let pt = path_chain_complex(&minimal_basis(&Digraph::lettered(1, &[]), 0).unwrap()).unwrap();
        assert_eq!(pt.ranks, vec![1]);
    }

    #[test]
    fn homology_examples() {
        let z = Coefficients::Z;
        assert_eq!(hom(&examples::diamond(), z).betti, vec![1, 0, 0]);
        assert_eq!(hom(&examples::diamond(), z).torsion, vec![Vec::<Int>::new(); 3]);
        assert_eq!(hom(&examples::directed_cycle(3), z).betti, vec![1, 1]);
        assert_eq!(hom(&examples::alternating_square(), z).betti, vec![1, 1]);
        assert_eq!(hom(&examples::directed_cycle(3), Coefficients::Zp(2)).betti, vec![1, 1]);
        let c33 = cartesian_product(&examples::directed_cycle(3), &examples::directed_cycle(3));
        assert_eq!(path_homology(&c33, 2, Coefficients::Q).unwrap().betti, vec![1, 2, 1]);
    }

    #[test]
    fn cohomology_matches_homology_over_fields() {
        for g in crate::corpus::digraphs_up_to_iso(4) {
            let top = g.vertex_count() - 1;
            for coeff in [Coefficients::Q, Coefficients::Zp(2), Coefficients::Zp(3)] {
                let h = path_homology(&g, top, coeff).unwrap();
                let c = path_cohomology(&g, top, coeff).unwrap();
                assert_eq!(h.betti, c.betti);
            }
            let h = path_homology(&g, top, Coefficients::Z).unwrap();
            let b = minimal_basis(&g, top).unwrap();
            let chi: i64 = b.ranks().iter().enumerate().map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) }).sum();
            let full = homology(&path_chain_complex(&b).unwrap(), Coefficients::Z);
            assert_eq!(full.euler_characteristic(), chi);
            assert!(h.betti.len() <= full.betti.len());
        }
    }

    #[test]
    fn torsion_reporting() {
        // a 1x1 boundary [2] gives ℤ/2 in degree 0
        let c = ChainComplex::new(vec![Matrix::zeros(0, 1), Matrix::from_i64_rows(&[&[2]])], vec![vec![], vec![]]).unwrap();
        let h = homology(&c, Coefficients::Z);
        assert_eq!(h.betti, vec![0, 0]);
        assert_eq!(h.torsion, vec![vec![Int::from(2)], vec![]]);
        assert_eq!(homology(&c, Coefficients::Zp(2)).betti, vec![1, 1]);
        assert_eq!(homology(&c, Coefficients::Q).betti, vec![0, 0]);
        let co = cohomology(&c, Coefficients::Z);
        assert_eq!(co.betti, vec![0, 0]);
        assert_eq!(co.torsion, vec![vec![], vec![Int::from(2)]]);
    }

    #[test]
    fn json_round_trip() {
        let h = HomologyResult {
            betti: vec![1, 0],
            torsion: vec![vec![], vec![Int::from(2), Int::from(10).pow(30)]],
            coefficients: Coefficients::Z,
        };
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, r#"{"betti":[1,0],"torsion":[[],[2,"1000000000000000000000000000000"]],"coefficients":"z"}"#);
        assert_eq!(serde_json::from_str::<HomologyResult>(&s).unwrap(), h);
        let p = HomologyResult { betti: vec![1], torsion: vec![vec![]], coefficients: Coefficients::Zp(5) };
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"betti":[1],"torsion":[[]],"coefficients":"zp","p":5}"#);
        assert_eq!(serde_json::from_str::<HomologyResult>(&s).unwrap(), p);
        assert!("zp:4".parse::<Coefficients>().is_err());
    }

    #[test]
    fn induced_map_examples() {
        let c3 = examples::directed_cycle(3);
        let b = minimal_basis(&c3, 2).unwrap();
        let id = DigraphMorphism::identity(&c3);
        let m = induced_map(&id, &b, &b).unwrap();
        assert_eq!(m, ChainMap::identity(&path_chain_complex(&b).unwrap()));

        let rot = DigraphMorphism::new(&c3, &c3, vec![1, 2, 0], MorphismMode::Narrow).unwrap();
        let m = induced_map(&rot, &b, &b).unwrap();
        // edges ab, bc, ca in basis order ab, bc, ca
        assert_eq!(b.labels(1), ["ab", "bc", "ca"]);
        assert_eq!(m.matrices[1], Matrix::from_i64_rows(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]));

        let i = examples::interval();
        let t = examples::transitive_triangle();
        let inc = DigraphMorphism::from_names(&i, &t, &[("a", "a"), ("b", "b")], MorphismMode::Narrow).unwrap();
        let m = induced_map(&inc, &minimal_basis(&i, 1).unwrap(), &minimal_basis(&t, 1).unwrap()).unwrap();
        assert_eq!(m.matrices[1], Matrix::from_i64_rows(&[&[1], &[0], &[0]]));
    }

    #[test]
    fn functoriality_of_rotations() {
        let c4 = examples::directed_cycle(4);
        let b = minimal_basis(&c4, 3).unwrap();
        let r = DigraphMorphism::new(&c4, &c4, vec![1, 2, 3, 0], MorphismMode::Narrow).unwrap();
        let r2 = r.compose(&r);
        let m = induced_map(&r, &b, &b).unwrap();
        assert_eq!(induced_map(&r2, &b, &b).unwrap(), m.compose(&m));
    }

    #[test]
    fn broad_map_into_cycle_is_undefined() {
        let t = examples::transitive_triangle();
        let c2 = examples::directed_cycle(2);
        let f = DigraphMorphism::from_names(&t, &c2, &[("a", "a"), ("b", "b"), ("c", "a")], MorphismMode::Broad).unwrap();
        assert!(check_morphism_ok(&f));
        let r = induced_map(&f, &minimal_basis(&t, 2).unwrap(), &minimal_basis(&c2, 1).unwrap());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    fn check_morphism_ok(f: &DigraphMorphism<'_>) -> bool {
        crate::digraph::check_morphism(f).is_ok()
    }

    #[test]
    fn lefschetz_examples() {
        let d = examples::diamond();
        let l = lefschetz_path(&DigraphMorphism::identity(&d)).unwrap();
        assert_eq!(l.number, Rational::one());
        let c3 = examples::directed_cycle(3);
        let rot = DigraphMorphism::new(&c3, &c3, vec![1, 2, 0], MorphismMode::Narrow).unwrap();
        let l = lefschetz_path(&rot).unwrap();
        assert_eq!(l.number, Rational::zero());
        assert!(l.chain_traces.iter().all(Zero::is_zero));
        assert_eq!(l.fixed, None);

        let k3 = examples::complete_graph(3);
        let l = lefschetz_clique(&k3, &[1, 2, 0]);
        assert_eq!(l.number, Rational::one());
        assert_eq!(l.fixed.as_deref(), Some("{1,2,3}"));
        assert_eq!(fixed_clique(&k3, &[0, 1, 2]), Some(vec![0]));
    }

    #[test]
    fn cross_product_examples() {
        let i = examples::interval();
        let j = Digraph::new(["c", "d"], [("c".to_string(), "d".to_string())]).unwrap();
        let prod = product_with_coordinates(&i, &j);
        let ab = PathVector::from_names(&i, &[("ab", 1)]).unwrap();
        let cd = PathVector::from_names(&j, &[("cd", 1)]).unwrap();
        let x = cross_product(&ab, &cd, &prod);
        let want =
            PathVector::from_names(&prod.digraph, &[("((a,c),(b,c),(b,d))", 1), ("((a,c),(a,d),(b,d))", -1)]).unwrap();
        assert_eq!(x, want);
        let a = PathVector::from_names(&i, &[("a", 1)]).unwrap();
        let slice = cross_product(&a, &cd, &prod);
        assert_eq!(slice, PathVector::from_names(&prod.digraph, &[("((a,c),(a,d))", 1)]).unwrap());
        let lhs = x.boundary();
        let rhs = cross_product(&ab.boundary(), &cd, &prod).sub(&cross_product(&ab, &cd.boundary(), &prod));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn leibniz_for_cross_products() {
        let g = examples::diamond();
        let h = examples::transitive_triangle();
        let prod = product_with_coordinates(&g, &h);
        let bg = minimal_basis(&g, 2).unwrap();
        let bh = minimal_basis(&h, 2).unwrap();
        for i in 0..=2 {
            for j in 0..=2 {
                for p in bg.elements(i) {
                    for q in bh.elements(j) {
                        let lhs = cross_product(p, q, &prod).boundary();
                        let sign = Int::from(if i % 2 == 0 { 1 } else { -1 });
                        let rhs = cross_product(&p.boundary(), q, &prod)
                            .add(&cross_product(p, &q.boundary(), &prod).scale(&sign));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn kunneth_examples() {
        let i = examples::interval();
        let r = kunneth_check(&i, &i, 2).unwrap();
        assert_eq!(r.betti_product, vec![1, 0, 0]);
        assert!(r.passed);
        let c3 = examples::directed_cycle(3);
        let r = kunneth_check(&c3, &c3, 2).unwrap();
        assert_eq!(r.betti_product, vec![1, 2, 1]);
        assert_eq!(r.convolution, vec![1, 2, 1]);
        assert!(r.passed);
        let pt = Digraph::lettered(1, &[]);
        let d = examples::diamond();
        assert!(kunneth_check(&d, &pt, 2).unwrap().passed);
    }

    #[test]
    fn rational_betti_matches_snf() {
        for g in crate::corpus::digraphs_up_to_iso(4) {
            let top = g.vertex_count() - 1;
            let h = homology(&path_chain_complex(&minimal_basis(&g, top).unwrap()).unwrap(), Coefficients::Q);
            assert_eq!(rational_betti(&g, top), h.betti);
        }
    }

    #[test]
    fn homotopy_examples() {
        let t = examples::transitive_triangle();
        let i = examples::interval();
        let f = DigraphMorphism::from_names(&i, &t, &[("a", "a"), ("b", "b")], MorphismMode::Broad).unwrap();
        let g = DigraphMorphism::from_names(&i, &t, &[("a", "a"), ("b", "c")], MorphismMode::Broad).unwrap();
        let r = homotopy_check(&f, &g).unwrap();
        assert!(r.one_step);
        assert_eq!(r.same_on_cohomology, Some(true));
    }
}
