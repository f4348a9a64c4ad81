//! Regular allowed paths, the boundary operator, `A_k` and `Ω_k`.
//!
//! Every non-allowed term of `∂p` for an allowed path `p` comes from deleting
//! an interior vertex, which keeps both endpoints. Hence `Ω_k` splits as a
//! direct sum over `(start, end)` blocks and each block is computed as a
//! saturated integer kernel on its own.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::digraph::{Digraph, Vertex};
use crate::error::PathError;
use crate::linalg::{integer_kernel_basis, Matrix};
use crate::scalar::{Integral, Ring};
use crate::Int;

/// An ordered sequence of vertices; a `k`-path has `k + 1` of them.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimitivePath(SmallVec<[Vertex; 8]>);

impl PrimitivePath {
    pub fn new(vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let v: SmallVec<[Vertex; 8]> = vertices.into_iter().collect();
        assert!(!v.is_empty(), "a path has at least one vertex");
        PrimitivePath(v)
    }

    pub fn vertex(v: Vertex) -> Self {
        PrimitivePath(smallvec::smallvec![v])
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    /// Path length `k` (number of steps).
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn start(&self) -> Vertex {
        self.0[0]
    }

    pub fn end(&self) -> Vertex {
        *self.0.last().unwrap()
    }

    /// All vertices pairwise distinct.
    pub fn is_regular(&self) -> bool {
        let v = &self.0;
        (0..v.len()).all(|i| (i + 1..v.len()).all(|j| v[i] != v[j]))
    }

    pub fn is_allowed(&self, g: &Digraph) -> bool {
        self.0.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }

    /// The path with the `j`-th vertex removed.
    pub fn delete(&self, j: usize) -> PrimitivePath {
        let mut v = self.0.clone();
        v.remove(j);
        PrimitivePath(v)
    }

    /// Vertices `i..=j`.
    pub fn slice(&self, i: usize, j: usize) -> PrimitivePath {
        PrimitivePath(self.0[i..=j].iter().copied().collect())
    }

    pub fn push(&self, v: Vertex) -> PrimitivePath {
        let mut w = self.0.clone();
        w.push(v);
        PrimitivePath(w)
    }

    pub fn map(&self, f: impl Fn(Vertex) -> Vertex) -> PrimitivePath {
        PrimitivePath(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn display(&self, g: &Digraph) -> String {
        display_sequence(g.names(), &self.0, g.compact_names())
    }
}

impl fmt::Debug for PrimitivePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

pub(crate) fn display_sequence(names: &[String], seq: &[Vertex], compact: bool) -> String {
    if compact {
        seq.iter().map(|&v| names[v as usize].as_str()).collect()
    } else {
        let parts: Vec<&str> = seq.iter().map(|&v| names[v as usize].as_str()).collect();
        format!("({})", parts.join(","))
    }
}

/// Splits `(x,(y,z),w)` into `x`, `(y,z)`, `w`, respecting nested parentheses.
fn split_top_level(s: &str) -> Option<Vec<&str>> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let mut parts = Vec::new();
    let (mut depth, mut from) = (0i32, 0usize);
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(inner[from..i].trim());
                from = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return None;
        }
    }
    parts.push(inner[from..].trim());
    Some(parts)
}

/// Parses a path written as `abd` (single-character names) or `(x,y,z)`.
pub fn parse_path(g: &Digraph, text: &str) -> Result<PrimitivePath, PathError> {
    let text = text.trim();
    let bad = || PathError::NotAllowed(text.to_string());
    let names: Vec<String> = if text.starts_with('(') && g.vertex(text).is_none() {
        split_top_level(text).ok_or_else(bad)?.into_iter().map(str::to_string).collect()
    } else if g.vertex(text).is_some() {
        vec![text.to_string()]
    } else if g.compact_names() {
        text.chars().map(|c| c.to_string()).collect()
    } else {
        return Err(bad());
    };
    let mut seq = Vec::with_capacity(names.len());
    for n in &names {
        seq.push(g.vertex(n).ok_or_else(bad)?);
    }
    if seq.is_empty() {
        return Err(bad());
    }
    Ok(PrimitivePath::new(seq))
}

/// A formal combination of primitive paths of one common degree, stored in
/// lexicographic term order with nonzero coefficients only.
#[derive(Clone, PartialEq, Eq)]
pub struct PathVector<S = Int> {
    degree: usize,
    terms: BTreeMap<PrimitivePath, S>,
}

impl<S: Ring> PathVector<S> {
    pub fn zero(degree: usize) -> Self {
        PathVector { degree, terms: BTreeMap::new() }
    }

    pub fn from_term(p: PrimitivePath, c: S) -> Self {
        let mut v = Self::zero(p.degree());
        v.add_term(p, c);
        v
    }

    pub fn from_path(p: PrimitivePath, c: i64) -> Self {
        Self::from_term(p, S::from_i64(c))
    }

    /// Builds from `(path, coefficient)` pairs written with vertex names.
    pub fn from_names(g: &Digraph, terms: &[(&str, i64)]) -> Result<Self, PathError> {
        let mut out: Option<Self> = None;
        for (text, c) in terms {
            let p = parse_path(g, text)?;
            let v = out.get_or_insert_with(|| Self::zero(p.degree()));
            v.try_add_term(p, S::from_i64(*c))?;
        }
        Ok(out.unwrap_or_else(|| Self::zero(0)))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PrimitivePath, &S)> {
        self.terms.iter()
    }

    pub fn paths(&self) -> impl Iterator<Item = &PrimitivePath> {
        self.terms.keys()
    }

    pub fn coefficient(&self, p: &PrimitivePath) -> S {
        self.terms.get(p).cloned().unwrap_or_else(S::zero)
    }

    pub fn try_add_term(&mut self, p: PrimitivePath, c: S) -> Result<(), PathError> {
        if p.degree() != self.degree {
            if self.terms.is_empty() {
                self.degree = p.degree();
            } else {
                return Err(PathError::MixedDegree(self.degree, p.degree()));
            }
        }
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.entry(p) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add_ref(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
        Ok(())
    }

    /// Panics on a degree mismatch.
    pub fn add_term(&mut self, p: PrimitivePath, c: S) {
        self.try_add_term(p, c).expect("path degree mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        if out.is_zero() {
            out.degree = other.degree;
        }
        for (p, c) in other.terms() {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.degree);
        for (p, x) in self.terms() {
            out.add_term(p.clone(), x.mul_ref(c));
        }
        out
    }

    /// Applies a vertex map term by term; irregular images are dropped.
    pub fn map_vertices(&self, f: impl Fn(Vertex) -> Vertex) -> Self {
        let mut out = Self::zero(self.degree);
        for (p, c) in self.terms() {
            let q = p.map(&f);
            if q.is_regular() {
                out.add_term(q, c.clone());
            }
        }
        out
    }

    /// `∂(i_0...i_k) = Σ_j (-1)^j (i_0...î_j...i_k)` over all regular paths.
    pub fn boundary(&self) -> Self {
        if self.degree == 0 {
            return Self::zero(0);
        }
        let mut out = Self::zero(self.degree - 1);
        for (p, c) in self.terms() {
            for j in 0..=self.degree {
                let c = if j % 2 == 0 { c.clone() } else { -c.clone() };
                out.add_term(p.delete(j), c);
            }
        }
        out
    }

    pub fn is_allowed(&self, g: &Digraph) -> bool {
        self.paths().all(|p| p.is_allowed(g))
    }

    /// `P ∈ Ω_k(G)`: allowed with allowed boundary.
    pub fn is_invariant(&self, g: &Digraph) -> bool {
        self.is_allowed(g) && self.boundary().is_allowed(g)
    }

    /// The common start and end vertex of all terms, if there is one.
    pub fn endpoints(&self) -> Option<(Vertex, Vertex)> {
        let mut it = self.paths();
        let first = it.next()?;
        let (s, e) = (first.start(), first.end());
        it.all(|p| p.start() == s && p.end() == e).then_some((s, e))
    }

    /// `-P` when the first term is negative, so that `P` and `-P` share one
    /// representative.
    pub fn normalized(&self) -> Self {
        match self.terms.values().next() {
            Some(c) if *c != S::one() && (-c.clone()) == S::one() => self.neg(),
            _ => self.clone(),
        }
    }

    pub fn convert<T: Ring>(&self) -> PathVector<T>
    where
        S: Integral,
    {
        PathVector {
            degree: self.degree,
            terms: self.terms.iter().map(|(p, c)| (p.clone(), crate::scalar::convert(c))).collect(),
        }
    }

    pub fn display(&self, g: &Digraph) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (p, c)) in self.terms().enumerate() {
            let text = c.to_string();
            let (neg, mag) = match text.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, text),
            };
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if mag != "1" {
                s.push_str(&mag);
                s.push('*');
            }
            s.push_str(&p.display(g));
        }
        s
    }
}

impl<S: Ring + Integral + Signed> PathVector<S> {
    /// `w(P) = Σ |c_k|`.
    pub fn width(&self) -> Int {
        self.terms.values().map(|c| c.to_bigint().abs()).sum()
    }

    /// All coefficients are `±1`.
    pub fn is_unimodular(&self) -> bool {
        self.terms.values().all(|c| c.is_unit())
    }
}

impl<S: Ring> fmt::Debug for PathVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(p, c)| (p, c.to_string()))).finish()
    }
}

/// Free-function form of [`PathVector::boundary`].
pub fn boundary<S: Ring>(p: &PathVector<S>) -> PathVector<S> {
    p.boundary()
}

/// All regular allowed `k`-paths in lexicographic order.
pub fn allowed_paths(g: &Digraph, k: usize) -> Vec<PrimitivePath> {
    let mut out = Vec::new();
    if k >= g.vertex_count() {
        return out;
    }
    let mut stack: Vec<Vertex> = Vec::with_capacity(k + 1);
    fn rec(g: &Digraph, k: usize, stack: &mut Vec<Vertex>, out: &mut Vec<PrimitivePath>) {
        if stack.len() == k + 1 {
            out.push(PrimitivePath::new(stack.iter().copied()));
            return;
        }
        let last = *stack.last().unwrap();
        for &w in g.out_neighbors(last) {
            if !stack.contains(&w) {
                stack.push(w);
                rec(g, k, stack, out);
                stack.pop();
            }
        }
    }
    for v in g.vertices() {
        stack.push(v);
        rec(g, k, &mut stack, &mut out);
        stack.pop();
    }
    out
}

/// One `(start, end)` summand of `Ω_k`.
#[derive(Clone, Debug)]
pub struct OmegaBlock {
    pub start: Vertex,
    pub end: Vertex,
    /// Indices into [`OmegaModule::allowed`], increasing.
    pub paths: Vec<usize>,
    /// Saturated kernel basis in block-local coordinates (one column each).
    pub kernel: Matrix<Int>,
}

impl OmegaBlock {
    pub fn rank(&self) -> usize {
        self.kernel.cols()
    }
}

/// `Ω_k(G)` with its ambient `A_k(G)`.
#[derive(Clone, Debug)]
pub struct OmegaModule {
    pub degree: usize,
    pub allowed: Vec<PrimitivePath>,
    index: HashMap<PrimitivePath, usize>,
    pub blocks: Vec<OmegaBlock>,
    block_of: HashMap<(Vertex, Vertex), usize>,
}

impl OmegaModule {
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(OmegaBlock::rank).sum()
    }

    pub fn index_of(&self, p: &PrimitivePath) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn block(&self, start: Vertex, end: Vertex) -> Option<&OmegaBlock> {
        self.block_of.get(&(start, end)).map(|&i| &self.blocks[i])
    }

    /// Integral basis as columns over `A_k`, blocks in canonical order.
    pub fn basis_matrix(&self) -> Matrix<Int> {
        let mut m = Matrix::zeros(self.allowed.len(), self.rank());
        let mut col = 0;
        for b in &self.blocks {
            for j in 0..b.rank() {
                for (i, &p) in b.paths.iter().enumerate() {
                    m[(p, col)] = b.kernel[(i, j)].clone();
                }
                col += 1;
            }
        }
        m
    }

    /// Basis columns as path vectors.
    pub fn basis_vectors(&self) -> Vec<PathVector> {
        let mut out = Vec::with_capacity(self.rank());
        for b in &self.blocks {
            for j in 0..b.rank() {
                let mut v = PathVector::zero(self.degree);
                for (i, &p) in b.paths.iter().enumerate() {
                    v.add_term(self.allowed[p].clone(), b.kernel[(i, j)].clone());
                }
                out.push(v);
            }
        }
        out
    }

    /// Coordinates of an allowed path vector over `A_k`.
    pub fn coordinates(&self, p: &PathVector) -> Result<Vec<Int>, PathError> {
        let mut out = vec![Int::zero(); self.allowed.len()];
        for (q, c) in p.terms() {
            let i = self.index_of(q).ok_or_else(|| PathError::NotAllowed(format!("{q:?}")))?;
            out[i] = c.clone();
        }
        Ok(out)
    }
}

/// Groups path indices by endpoints, in canonical block order.
pub(crate) fn group_by_endpoints(paths: &[PrimitivePath]) -> BTreeMap<(Vertex, Vertex), Vec<usize>> {
    let mut m: BTreeMap<(Vertex, Vertex), Vec<usize>> = BTreeMap::new();
    for (i, p) in paths.iter().enumerate() {
        m.entry((p.start(), p.end())).or_default().push(i);
    }
    m
}

/// The non-allowed part of `∂` restricted to one block, as a matrix whose
/// rows are the non-allowed `(k-1)`-paths that occur.
pub(crate) fn block_constraint(g: &Digraph, paths: &[&PrimitivePath]) -> Matrix<Int> {
    let mut rows: BTreeMap<PrimitivePath, Vec<(usize, i64)>> = BTreeMap::new();
    for (col, p) in paths.iter().enumerate() {
        let v = p.vertices();
        for j in 1..p.degree() {
            if !g.has_edge(v[j - 1], v[j + 1]) {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                rows.entry(p.delete(j)).or_default().push((col, sign));
            }
        }
    }
    let mut m: Matrix<Int> = Matrix::zeros(rows.len(), paths.len());
    for (r, entries) in rows.values().enumerate() {
        for &(c, s) in entries {
            m[(r, c)] = m[(r, c)].clone() + Int::from(s);
        }
    }
    m
}

/// `Ω_k(G)`: the saturated kernel of `∂` followed by projection onto the
/// non-allowed `(k-1)`-paths.
pub fn omega(g: &Digraph, k: usize) -> OmegaModule {
    let allowed = allowed_paths(g, k);
    let index: HashMap<PrimitivePath, usize> =
        allowed.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let groups: Vec<((Vertex, Vertex), Vec<usize>)> = group_by_endpoints(&allowed).into_iter().collect();
    let blocks: Vec<OmegaBlock> = groups
        .into_par_iter()
        .map(|((start, end), paths)| {
            let refs: Vec<&PrimitivePath> = paths.iter().map(|&i| &allowed[i]).collect();
            let c = block_constraint(g, &refs);
            let kernel = if c.rows() == 0 { Matrix::identity(paths.len()) } else { integer_kernel_basis(&c) };
            OmegaBlock { start, end, paths, kernel }
        })
        .collect();
    let block_of = blocks.iter().enumerate().map(|(i, b)| ((b.start, b.end), i)).collect();
    OmegaModule { degree: k, allowed, index, blocks, block_of }
}
