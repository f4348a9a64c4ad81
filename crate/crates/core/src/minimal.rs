//! Minimal paths and integral bases of `Ω` made of them.
//!
//! Enumeration follows the recursive scheme: a `±1` element of
//! `Ω_k^{S,E}` is `Σ_W x_W · E` over in-neighbours `W` of `E`, where each
//! `x_W` is a `{0,±1}` element of `Ω_{k-1}^{S,W}` avoiding `E`, subject to the
//! cancellation of the terms obtained by deleting `W`. Minimal paths are the
//! elements with no sign-conformal element of strictly smaller support.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::digraph::{Digraph, Vertex};
use crate::error::{Error, InvariantError, PathError};
use crate::linalg::{rank, Coordinates, LatticeSolver, Matrix};
use crate::paths::{omega, OmegaBlock, OmegaModule, PathVector, PrimitivePath};
use crate::Int;

/// A `{±1}`-coefficient path combination, terms sorted lexicographically.
type SignVector = Vec<(PrimitivePath, i8)>;

struct Enumerator<'g> {
    g: &'g Digraph,
    memo: HashMap<(usize, Vertex, Vertex, Vec<Vertex>), Arc<Vec<SignVector>>>,
}

impl<'g> Enumerator<'g> {
    fn new(g: &'g Digraph) -> Self {
        Enumerator { g, memo: HashMap::new() }
    }

    /// All nonzero `{0,±1}` elements of `Ω_k^{S,E}` of the subgraph induced
    /// on the complement of `avoid`, one per sign class, first term `+1`.
    fn elements(&mut self, k: usize, s: Vertex, e: Vertex, avoid: &[Vertex]) -> Arc<Vec<SignVector>> {
        let key = (k, s, e, avoid.to_vec());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let out = Arc::new(self.compute(k, s, e, avoid));
        self.memo.insert(key, out.clone());
        out
    }

    fn compute(&mut self, k: usize, s: Vertex, e: Vertex, avoid: &[Vertex]) -> Vec<SignVector> {
        if avoid.contains(&s) || avoid.contains(&e) {
            return vec![];
        }
        if k == 0 {
            return if s == e { vec![vec![(PrimitivePath::vertex(s), 1)]] } else { vec![] };
        }
        if s == e {
            return vec![];
        }
        let g = self.g;
        let mut inner: Vec<Vertex> = avoid.to_vec();
        inner.push(e);
        inner.sort_unstable();
        let mut options: Vec<(Vertex, Arc<Vec<SignVector>>)> = Vec::new();
        for &w in g.in_neighbors(e) {
            if inner.contains(&w) {
                continue;
            }
            let list = self.elements(k - 1, s, w, &inner);
            if !list.is_empty() {
                options.push((w, list));
            }
        }
        if options.is_empty() {
            return vec![];
        }

        // Deleting W from q·W·E leaves q·E, which is non-allowed exactly when
        // the vertex before W has no edge to E. Those terms must cancel.
        let mut key_ids: HashMap<PrimitivePath, usize> = HashMap::new();
        let mut last_pos: Vec<usize> = Vec::new();
        let contributions: Vec<Vec<Vec<(usize, i32)>>> = options
            .iter()
            .enumerate()
            .map(|(pos, (_, list))| {
                list.iter()
                    .map(|x| {
                        let mut c = Vec::new();
                        if k >= 2 {
                            for (q, sign) in x {
                                let u = q.vertices()[k - 2];
                                if !g.has_edge(u, e) {
                                    let prefix = q.slice(0, k - 2);
                                    let next = key_ids.len();
                                    let id = *key_ids.entry(prefix).or_insert(next);
                                    if id == last_pos.len() {
                                        last_pos.push(pos);
                                    } else {
                                        last_pos[id] = last_pos[id].max(pos);
                                    }
                                    c.push((id, *sign as i32));
                                }
                            }
                        }
                        c
                    })
                    .collect()
            })
            .collect();
        let mut closing: Vec<Vec<usize>> = vec![Vec::new(); options.len()];
        for (id, &p) in last_pos.iter().enumerate() {
            closing[p].push(id);
        }

        let mut sums = vec![0i32; key_ids.len()];
        let mut choice: Vec<Option<(usize, i8)>> = vec![None; options.len()];
        let mut out = Vec::new();
        self.search(0, &options, &contributions, &closing, &mut sums, &mut choice, e, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        pos: usize,
        options: &[(Vertex, Arc<Vec<SignVector>>)],
        contributions: &[Vec<Vec<(usize, i32)>>],
        closing: &[Vec<usize>],
        sums: &mut [i32],
        choice: &mut [Option<(usize, i8)>],
        e: Vertex,
        out: &mut Vec<SignVector>,
    ) {
        if pos == options.len() {
            if choice.iter().all(Option::is_none) {
                return;
            }
            let mut terms: SignVector = Vec::new();
            for (i, c) in choice.iter().enumerate() {
                if let Some((x, sign)) = c {
                    for (q, s) in &options[i].1[*x] {
                        terms.push((q.push(e), s * sign));
                    }
                }
            }
            terms.sort_by(|a, b| a.0.cmp(&b.0));
            if terms[0].1 == 1 {
                out.push(terms);
            }
            return;
        }
        let closes = |sums: &[i32]| closing[pos].iter().all(|&id| sums[id] == 0);
        choice[pos] = None;
        if closes(sums) {
            self.search(pos + 1, options, contributions, closing, sums, choice, e, out);
        }
        for x in 0..options[pos].1.len() {
            for sign in [1i8, -1] {
                for &(id, c) in &contributions[pos][x] {
                    sums[id] += c * sign as i32;
                }
                if closes(sums) {
                    choice[pos] = Some((x, sign));
                    self.search(pos + 1, options, contributions, closing, sums, choice, e, out);
                    choice[pos] = None;
                }
                for &(id, c) in &contributions[pos][x] {
                    sums[id] -= c * sign as i32;
                }
            }
        }
    }
}

/// `q` equals `±p` restricted to a proper subset of its support.
fn is_conformal_part(q: &SignVector, p: &SignVector) -> bool {
    if q.len() >= p.len() {
        return false;
    }
    let mut rel = 0i8;
    let mut j = 0;
    for (path, s) in q {
        while j < p.len() && p[j].0 < *path {
            j += 1;
        }
        if j == p.len() || p[j].0 != *path {
            return false;
        }
        let r = s * p[j].1;
        if rel == 0 {
            rel = r;
        } else if rel != r {
            return false;
        }
    }
    true
}

/// Every allowed `S -> E` path of the same length inside `Supp(P)` is a term.
fn closed_under_support_paths(g: &Digraph, p: &SignVector) -> bool {
    let (s, e) = (p[0].0.start(), p[0].0.end());
    let k = p[0].0.degree();
    let mut out: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for (q, _) in p {
        for w in q.vertices().windows(2) {
            let l = out.entry(w[0]).or_default();
            if !l.contains(&w[1]) {
                l.push(w[1]);
            }
        }
    }
    let mut stack = vec![s];
    fn rec(
        g: &Digraph,
        k: usize,
        e: Vertex,
        out: &BTreeMap<Vertex, Vec<Vertex>>,
        stack: &mut Vec<Vertex>,
        p: &SignVector,
    ) -> bool {
        if stack.len() == k + 1 {
            if *stack.last().unwrap() != e {
                return true;
            }
            let path = PrimitivePath::new(stack.iter().copied());
            return p.binary_search_by(|t| t.0.cmp(&path)).is_ok();
        }
        let last = *stack.last().unwrap();
        for &w in out.get(&last).map(Vec::as_slice).unwrap_or(&[]) {
            if stack.contains(&w) || (w == e && stack.len() < k) {
                continue;
            }
            debug_assert!(g.has_edge(last, w));
            stack.push(w);
            let ok = rec(g, k, e, out, stack, p);
            stack.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    rec(g, k, e, &out, &mut stack, p)
}

fn to_path_vector(v: &SignVector) -> PathVector {
    let mut p = PathVector::zero(v[0].0.degree());
    for (q, s) in v {
        p.add_term(q.clone(), Int::from(*s));
    }
    p
}

fn canonical_key(p: &PathVector) -> (Int, Vec<(PrimitivePath, Int)>) {
    (p.width(), p.terms().map(|(q, c)| (q.clone(), c.clone())).collect())
}

/// All `{0,±1}` elements of `Ω_k` whose terms run from `s` to `e`, one per
/// sign class.
pub fn invariant_sign_vectors(g: &Digraph, k: usize, s: Vertex, e: Vertex) -> Vec<PathVector> {
    let mut en = Enumerator::new(g);
    let mut v: Vec<PathVector> = en.elements(k, s, e, &[]).iter().map(to_path_vector).collect();
    v.sort_by_cached_key(canonical_key);
    v
}

fn minimal_between(en: &mut Enumerator<'_>, k: usize, s: Vertex, e: Vertex, prune: bool) -> Vec<PathVector> {
    let all = en.elements(k, s, e, &[]);
    let g = en.g;
    let mut out: Vec<PathVector> = all
        .iter()
        .filter(|p| !prune || closed_under_support_paths(g, p))
        .filter(|p| !all.iter().any(|q| is_conformal_part(q, p)))
        .map(to_path_vector)
        .collect();
    out.sort_by_cached_key(canonical_key);
    out
}

/// All minimal paths of `Ω_k` from `s` to `e`, normalized so that the first
/// term has coefficient `+1`, in order of width and then terms.
pub fn minimal_paths_between(g: &Digraph, k: usize, s: Vertex, e: Vertex) -> Vec<PathVector> {
    minimal_between(&mut Enumerator::new(g), k, s, e, true)
}

/// As [`minimal_paths_between`] without the support-closure pruning rule.
pub fn minimal_paths_between_unpruned(g: &Digraph, k: usize, s: Vertex, e: Vertex) -> Vec<PathVector> {
    minimal_between(&mut Enumerator::new(g), k, s, e, false)
}

/// Upper bound on coefficient vectors examined by [`is_minimal`].
pub const MINIMALITY_SEARCH_LIMIT: u128 = 1 << 22;

/// The definitional check: no nonzero `P' = Σ d_k p_k ∈ Ω_k` with every
/// `d_k` between `0` and `c_k` and `w(P') < w(P)`.
pub fn is_minimal(g: &Digraph, p: &PathVector) -> Result<bool, Error> {
    if !p.is_invariant(g) {
        return Err(Error::Domain("path vector is not ∂-invariant".into()));
    }
    if p.is_zero() {
        return Ok(false);
    }
    let terms: Vec<(PrimitivePath, Int)> = p.terms().map(|(q, c)| (q.clone(), c.clone())).collect();
    let mut total: u128 = 1;
    for (_, c) in &terms {
        let m: u128 = num_traits::ToPrimitive::to_u128(&(num_traits::Signed::abs(c) + 1)).unwrap_or(u128::MAX);
        total = total.saturating_mul(m);
    }
    if total > MINIMALITY_SEARCH_LIMIT {
        return Err(PathError::TooLarge(total).into());
    }
    let width = p.width();
    let mut d: Vec<Int> = vec![Int::zero(); terms.len()];
    loop {
        // odometer step: each d_i runs over 0, sgn(c_i), ..., c_i
        let mut i = 0;
        loop {
            if i == terms.len() {
                return Ok(true);
            }
            let c = &terms[i].1;
            if d[i] == *c {
                d[i] = Int::zero();
                i += 1;
            } else {
                d[i] += num_traits::Signed::signum(c);
                break;
            }
        }
        let mut q = PathVector::zero(p.degree());
        for ((path, _), di) in terms.iter().zip(&d) {
            q.add_term(path.clone(), di.clone());
        }
        if q.width() < width && q.is_invariant(g) {
            return Ok(false);
        }
    }
}

/// Order in which the greedy selection visits the minimal paths of a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SelectionOrder {
    #[default]
    Canonical,
    Reversed,
    Seeded(u64),
}

#[derive(Clone, Debug)]
struct BlockBasis {
    omega_block: usize,
    members: Vec<usize>,
    solver: LatticeSolver<Int>,
}

/// The chosen minimal paths in one degree.
#[derive(Clone, Debug)]
pub struct DegreeBasis {
    pub degree: usize,
    pub elements: Vec<PathVector>,
    pub omega: OmegaModule,
    blocks: Vec<BlockBasis>,
    block_of: HashMap<(Vertex, Vertex), usize>,
}

impl DegreeBasis {
    pub fn rank(&self) -> usize {
        self.elements.len()
    }

    /// Endpoints of every element, in element order.
    pub fn endpoints(&self) -> Vec<(Vertex, Vertex)> {
        self.elements.iter().map(|p| p.endpoints().expect("basis elements have unique endpoints")).collect()
    }

    /// Coordinates of the elements over `A_k`, one column each.
    pub fn coordinate_matrix(&self) -> Matrix<Int> {
        let cols: Vec<Vec<Int>> =
            self.elements.iter().map(|p| self.omega.coordinates(p).expect("basis elements are allowed")).collect();
        Matrix::from_columns(self.omega.allowed.len(), &cols)
    }

    fn local_vector(&self, ob: &OmegaBlock, p: &PathVector) -> Option<Vec<Int>> {
        let mut v = vec![Int::zero(); ob.paths.len()];
        for (q, c) in p.terms() {
            let i = self.omega.index_of(q)?;
            let pos = ob.paths.binary_search(&i).ok()?;
            v[pos] = c.clone();
        }
        Some(v)
    }

    /// Coordinates of the projection of an allowed vector onto `Ω_k`, and
    /// whether the vector lay in `Ω_k` to begin with. The projection is along
    /// a fixed complement and is linear.
    pub fn project(&self, p: &PathVector) -> Result<Coordinates<Int>, PathError> {
        let mut coords = vec![Int::zero(); self.rank()];
        let mut exact = true;
        let mut by_block: BTreeMap<(Vertex, Vertex), PathVector> = BTreeMap::new();
        for (q, c) in p.terms() {
            if q.degree() != self.degree {
                return Err(PathError::MixedDegree(self.degree, q.degree()));
            }
            by_block.entry((q.start(), q.end())).or_insert_with(|| PathVector::zero(self.degree)).add_term(q.clone(), c.clone());
        }
        for ((s, e), part) in by_block {
            let Some(&bi) = self.block_of.get(&(s, e)) else {
                if let Some(q) = part.paths().find(|q| self.omega.index_of(q).is_none()) {
                    return Err(PathError::NotAllowed(format!("{q:?}")));
                }
                exact = false;
                continue;
            };
            let bb = &self.blocks[bi];
            let ob = &self.omega.blocks[bb.omega_block];
            let local = self.local_vector(ob, &part).ok_or_else(|| PathError::NotAllowed(format!("{part:?}")))?;
            let sol = bb.solver.solve(&local);
            exact &= sol.exact;
            for (m, c) in bb.members.iter().zip(sol.coords) {
                coords[*m] = c;
            }
        }
        Ok(Coordinates { coords, exact })
    }
}

/// Integral bases of `Ω_0, ..., Ω_max` consisting of minimal paths.
#[derive(Clone, Debug)]
pub struct MinimalBasis {
    pub graph: Digraph,
    degrees: Vec<DegreeBasis>,
}

impl MinimalBasis {
    /// Highest degree held.
    pub fn max_degree(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn degree(&self, k: usize) -> &DegreeBasis {
        &self.degrees[k]
    }

    pub fn degrees(&self) -> &[DegreeBasis] {
        &self.degrees
    }

    pub fn elements(&self, k: usize) -> &[PathVector] {
        self.degrees.get(k).map(|d| d.elements.as_slice()).unwrap_or(&[])
    }

    pub fn rank(&self, k: usize) -> usize {
        self.elements(k).len()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.degrees.iter().map(DegreeBasis::rank).collect()
    }

    /// Highest degree with a nonzero element.
    pub fn top_degree(&self) -> usize {
        self.degrees.iter().rposition(|d| d.rank() > 0).unwrap_or(0)
    }

    pub fn labels(&self, k: usize) -> Vec<String> {
        self.elements(k).iter().map(|p| p.display(&self.graph)).collect()
    }
}

fn select_block(
    g: &Digraph,
    en: &mut Enumerator<'_>,
    om: &OmegaModule,
    bi: usize,
    order: SelectionOrder,
) -> Result<(Vec<PathVector>, LatticeSolver<Int>), InvariantError> {
    let ob = &om.blocks[bi];
    let k = om.degree;
    let name = |v: Vertex| g.name(v).to_string();
    let mut cands = minimal_between(en, k, ob.start, ob.end, true);
    match order {
        SelectionOrder::Canonical => {}
        SelectionOrder::Reversed => cands.reverse(),
        SelectionOrder::Seeded(seed) => {
            let mix = seed ^ ((ob.start as u64) << 32 | ob.end as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ k as u64;
            cands.shuffle(&mut ChaCha8Rng::seed_from_u64(mix));
        }
    }
    let local = |p: &PathVector| -> Vec<Int> {
        let mut v = vec![Int::zero(); ob.paths.len()];
        for (q, c) in p.terms() {
            let i = om.index_of(q).expect("minimal paths are allowed");
            v[ob.paths.binary_search(&i).expect("minimal path lies in its block")] = c.clone();
        }
        v
    };
    let mut chosen: Vec<PathVector> = Vec::new();
    let mut cols: Vec<Vec<Int>> = Vec::new();
    for c in cands {
        if chosen.len() == ob.rank() {
            break;
        }
        if !c.is_unimodular() {
            return Err(InvariantError::NonUnitCoefficient { degree: k, path: c.display(g) });
        }
        cols.push(local(&c));
        if rank(&Matrix::from_columns(ob.paths.len(), &cols)) == cols.len() {
            chosen.push(c);
        } else {
            cols.pop();
        }
    }
    if chosen.len() != ob.rank() {
        return Err(InvariantError::RankMismatch {
            degree: k,
            start: name(ob.start),
            end: name(ob.end),
            found: chosen.len(),
            expected: ob.rank(),
        });
    }
    let solver = LatticeSolver::new(&Matrix::from_columns(ob.paths.len(), &cols));
    // the block kernel is saturated, so the chosen columns span it iff they
    // span a saturated lattice
    if !solver.is_saturated() {
        return Err(InvariantError::NotSaturated { degree: k, start: name(ob.start), end: name(ob.end) });
    }
    Ok((chosen, solver))
}

fn degree_basis(g: &Digraph, k: usize, order: SelectionOrder) -> Result<DegreeBasis, InvariantError> {
    let om = omega(g, k);
    let live: Vec<usize> = (0..om.blocks.len()).filter(|&i| om.blocks[i].rank() > 0).collect();
    let results: Vec<Result<(Vec<PathVector>, LatticeSolver<Int>), InvariantError>> = live
        .par_iter()
        .map_init(|| Enumerator::new(g), |en, &bi| select_block(g, en, &om, bi, order))
        .collect();
    let mut elements = Vec::new();
    let mut blocks = Vec::new();
    let mut block_of = HashMap::new();
    for (&bi, r) in live.iter().zip(results) {
        let (chosen, solver) = r?;
        let ob = &om.blocks[bi];
        let members = (elements.len()..elements.len() + chosen.len()).collect();
        elements.extend(chosen);
        block_of.insert((ob.start, ob.end), blocks.len());
        blocks.push(BlockBasis { omega_block: bi, members, solver });
    }
    Ok(DegreeBasis { degree: k, elements, omega: om, blocks, block_of })
}

/// Minimal-path bases of `Ω_0..=Ω_max_k` chosen greedily in canonical order.
pub fn minimal_basis(g: &Digraph, max_k: usize) -> Result<MinimalBasis, Error> {
    minimal_basis_with_order(g, max_k, SelectionOrder::Canonical)
}

pub fn minimal_basis_with_order(g: &Digraph, max_k: usize, order: SelectionOrder) -> Result<MinimalBasis, Error> {
    let mut degrees = Vec::with_capacity(max_k + 1);
    for k in 0..=max_k {
        degrees.push(degree_basis(g, k, order)?);
    }
    Ok(MinimalBasis { graph: g.clone(), degrees })
}

/// Integer coordinates of `p ∈ Ω_k` in the degree-`k` basis.
pub fn decompose(basis: &MinimalBasis, p: &PathVector) -> Result<Vec<Int>, Error> {
    let k = p.degree();
    if k > basis.max_degree() {
        if p.is_zero() {
            return Ok(vec![]);
        }
        return Err(Error::Domain(format!("degree {k} exceeds the basis maximum {}", basis.max_degree())));
    }
    let sol = basis.degree(k).project(p)?;
    if !sol.exact {
        return Err(InvariantError::OutsideSpan { degree: k }.into());
    }
    Ok(sol.coords)
}

/// Reassembles `Σ x_i b_i`.
pub fn recombine(basis: &MinimalBasis, k: usize, coords: &[Int]) -> PathVector {
    let mut out = PathVector::zero(k);
    for (b, c) in basis.elements(k).iter().zip(coords) {
        if !c.is_zero() {
            out = out.add(&b.scale(c));
        }
    }
    out
}
