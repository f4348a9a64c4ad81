//! Finite topological spaces built from graphs and digraphs: the clique
//! space with its unit-ball topology, the path space on a minimal basis,
//! sheaf cohomology from the cochain resolution, Čech cohomology of covers
//! and the local acyclicity checks.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;
use serde::Serialize;

use crate::digraph::{Digraph, Graph, Vertex};
use crate::error::Error;
use crate::homology::{cohomology_from_coboundaries, path_homology, Coefficients, HomologyResult};
use crate::linalg::Matrix;
use crate::minimal::{decompose, MinimalBasis};
use crate::paths::{omega, PathVector};
use crate::Int;

/// All cliques of `g` grouped by dimension (size − 1), each sorted and each
/// list in lexicographic order.
pub fn cliques_by_dimension(g: &Graph) -> Vec<Vec<Vec<Vertex>>> {
    cliques_up_to(g, usize::MAX)
}

/// Cliques with at most `max_size` vertices.
pub fn cliques_up_to(g: &Graph, max_size: usize) -> Vec<Vec<Vec<Vertex>>> {
    let n = g.vertex_count() as Vertex;
    let mut out: Vec<Vec<Vec<Vertex>>> = Vec::new();
    let mut layer: Vec<Vec<Vertex>> = (0..n).map(|v| vec![v]).collect();
    while !layer.is_empty() && out.len() < max_size {
        let next = layer
            .iter()
            .flat_map(|c| {
                let last = *c.last().unwrap();
                (last + 1..n).filter(|&w| c.iter().all(|&u| g.has_edge(u, w))).map(move |w| {
                    let mut d = c.clone();
                    d.push(w);
                    d
                })
            })
            .collect();
        out.push(std::mem::replace(&mut layer, next));
    }
    out
}

pub fn clique_label(g: &Graph, c: &[Vertex]) -> String {
    let names: Vec<&str> = c.iter().map(|&v| g.name(v)).collect();
    format!("{{{}}}", names.join(","))
}

/// Maximal cliques in lexicographic order.
pub fn maximal_cliques(g: &Graph) -> Vec<Vec<Vertex>> {
    let all: Vec<Vec<Vertex>> = cliques_by_dimension(g).into_iter().flatten().collect();
    let mut out: Vec<Vec<Vertex>> = all
        .iter()
        .filter(|c| (0..g.vertex_count() as Vertex).all(|w| c.contains(&w) || !c.iter().all(|&u| g.has_edge(u, w))))
        .cloned()
        .collect();
    out.sort();
    out
}

/// A finite space given by its minimal open sets, with the cochain
/// differential used for constant-sheaf cohomology.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSpace {
    pub labels: Vec<String>,
    pub grades: Vec<usize>,
    /// `min_open[x]`, sorted.
    pub min_open: Vec<Vec<usize>>,
    /// Boundary of each point as a combination of points one grade lower.
    pub faces: Vec<Vec<(usize, Int)>>,
}

#[derive(Serialize)]
struct PointJson<'a> {
    id: usize,
    label: &'a str,
    grade: usize,
    min_open: &'a [usize],
}

impl Serialize for FiniteSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc<'a> {
            points: Vec<PointJson<'a>>,
        }
        let points = (0..self.len())
            .map(|i| PointJson { id: i, label: &self.labels[i], grade: self.grades[i], min_open: &self.min_open[i] })
            .collect();
        Doc { points }.serialize(s)
    }
}

pub type OpenSet = BTreeSet<usize>;

impl FiniteSpace {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn point(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn max_grade(&self) -> usize {
        self.grades.iter().copied().max().unwrap_or(0)
    }

    pub fn whole(&self) -> OpenSet {
        (0..self.len()).collect()
    }

    pub fn min_open_set(&self, x: usize) -> OpenSet {
        self.min_open[x].iter().copied().collect()
    }

    pub fn is_open(&self, u: &OpenSet) -> bool {
        u.iter().all(|&x| self.min_open[x].iter().all(|y| u.contains(y)))
    }

    /// Smallest open set containing `points`.
    pub fn open_hull(&self, points: impl IntoIterator<Item = usize>) -> OpenSet {
        points.into_iter().flat_map(|x| self.min_open[x].iter().copied()).collect()
    }

    /// Every pairwise intersection of minimal opens is a union of minimal
    /// opens; returns the first failing pair.
    pub fn basis_violation(&self) -> Option<(usize, usize)> {
        for x in 0..self.len() {
            for y in x + 1..self.len() {
                let a = self.min_open_set(x);
                let i: OpenSet = self.min_open[y].iter().copied().filter(|z| a.contains(z)).collect();
                if !self.is_open(&i) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// Cohomology of the cochain complex `C^k(U)` of functions on grade-`k`
    /// points of the open set `U`.
    pub fn sheaf_cohomology(&self, u: &OpenSet, coeff: Coefficients) -> Result<HomologyResult, Error> {
        if !self.is_open(u) {
            return Err(Error::Domain("the set is not open".into()));
        }
        let top = self.max_grade();
        let mut by_grade: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
        for &x in u {
            by_grade[self.grades[x]].push(x);
        }
        let pos: HashMap<usize, usize> =
            by_grade.iter().flat_map(|l| l.iter().enumerate().map(|(i, &x)| (x, i))).collect();
        let ranks: Vec<usize> = by_grade.iter().map(Vec::len).collect();
        let cob: Vec<Matrix<Int>> = (0..top)
            .map(|k| {
                let mut m = Matrix::zeros(ranks[k + 1], ranks[k]);
                for (row, &x) in by_grade[k + 1].iter().enumerate() {
                    for (y, c) in &self.faces[x] {
                        let col = *pos.get(y).expect("open sets are closed under faces");
                        m[(row, col)] = c.clone();
                    }
                }
                m
            })
            .collect();
        Ok(cohomology_from_coboundaries(&ranks, &cob, coeff))
    }

    pub fn global_cohomology(&self, coeff: Coefficients) -> HomologyResult {
        self.sheaf_cohomology(&self.whole(), coeff).expect("the whole space is open")
    }

    /// Components of `U` under the symmetrized specialization relation,
    /// each sorted, ordered by least point.
    pub fn component_sets(&self, u: &OpenSet) -> Vec<Vec<usize>> {
        let pts: Vec<usize> = u.iter().copied().collect();
        let idx: HashMap<usize, usize> = pts.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut parent: Vec<usize> = (0..pts.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for (i, &x) in pts.iter().enumerate() {
            for y in &self.min_open[x] {
                if let Some(&j) = idx.get(y) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for (i, &x) in pts.iter().enumerate() {
            let r = find(&mut parent, i);
            let s = *slot.entry(r).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[s].push(x);
        }
        groups
    }

    pub fn components(&self, u: &OpenSet) -> Result<usize, Error> {
        if !self.is_open(u) {
            return Err(Error::Domain("the set is not open".into()));
        }
        Ok(self.component_sets(u).len())
    }

    /// Restriction `C^k(U) → C^k(V)` is onto for open `V ⊆ U`.
    pub fn restriction_is_surjective(&self, u: &OpenSet, v: &OpenSet) -> bool {
        v.is_subset(u)
    }
}

/// The clique space with minimal opens `U_x` = cliques inside the
/// intersection of the maximal cliques containing `x`.
pub fn clique_space(g: &Graph) -> FiniteSpace {
    clique_space_bounded(g, usize::MAX)
}

/// As [`clique_space`], keeping only cliques with at most `max_size`
/// vertices as points.
pub fn clique_space_bounded(g: &Graph, max_size: usize) -> FiniteSpace {
    let cliques = cliques_up_to(g, max_size);
    let flat: Vec<Vec<Vertex>> = cliques.iter().flatten().cloned().collect();
    let index: HashMap<&[Vertex], usize> = flat.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
    let maximal = maximal_cliques(g);
    let min_open = flat
        .iter()
        .map(|x| {
            let stalk = stalk(g, &maximal, x);
            let mut ids: Vec<usize> =
                flat.iter().enumerate().filter(|(_, c)| c.iter().all(|v| stalk.contains(v))).map(|(i, _)| i).collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    let faces = flat
        .iter()
        .map(|c| {
            if c.len() == 1 {
                return vec![];
            }
            (0..c.len())
                .map(|i| {
                    let mut f = c.clone();
                    f.remove(i);
                    (index[f.as_slice()], Int::from(if i % 2 == 0 { 1 } else { -1 }))
                })
                .collect()
        })
        .collect();
    FiniteSpace {
        labels: flat.iter().map(|c| clique_label(g, c)).collect(),
        grades: flat.iter().map(|c| c.len() - 1).collect(),
        min_open,
        faces,
    }
}

/// Vertices common to all maximal cliques containing `x`.
pub fn stalk(g: &Graph, maximal: &[Vec<Vertex>], x: &[Vertex]) -> Vec<Vertex> {
    (0..g.vertex_count() as Vertex)
        .filter(|v| maximal.iter().filter(|m| x.iter().all(|u| m.contains(u))).all(|m| m.contains(v)))
        .collect()
}

/// Whether every stalk intersection is a complete subgraph.
pub fn stalks_are_complete(g: &Graph) -> bool {
    let maximal = maximal_cliques(g);
    cliques_by_dimension(g).iter().flatten().all(|x| {
        let s = stalk(g, &maximal, x);
        s.iter().enumerate().all(|(i, &a)| s[i + 1..].iter().all(|&b| g.has_edge(a, b)))
    })
}

/// The unit ball around a vertex: cliques lying in a maximal clique through
/// the vertex.
pub fn unit_ball(g: &Graph, space: &FiniteSpace, v: Vertex) -> OpenSet {
    let maximal = maximal_cliques(g);
    let mut out = OpenSet::new();
    for m in maximal.iter().filter(|m| m.contains(&v)) {
        out.extend(space.open_hull(std::iter::once(space.point(&clique_label(g, m)).expect("maximal clique is a point"))));
    }
    out
}

/// The subgraph `G_P = Supp(P) ∪ Supp(∂P)`.
pub fn local_subgraph(g: &Digraph, p: &PathVector) -> Digraph {
    let (mut vs, mut es) = crate::digraph::support_sets(g, p).expect("basis elements are allowed");
    let (v2, e2) = crate::digraph::support_sets(g, &p.boundary()).expect("boundaries of Ω are allowed");
    vs.extend(v2);
    es.extend(e2);
    g.subgraph(&vs, &es)
}

/// Positions of basis elements across all degrees.
fn point_ids(basis: &MinimalBasis) -> Vec<usize> {
    let mut off = vec![0];
    for k in 0..=basis.max_degree() {
        off.push(off[k] + basis.rank(k));
    }
    off
}

/// The path space on `X_G`. `U_P` is `P` together with the minimal opens of
/// every basis element occurring in a decomposition of an element of
/// `Ω(G_P)`, closed to a fixpoint.
pub fn path_space(basis: &MinimalBasis) -> Result<FiniteSpace, Error> {
    let g = &basis.graph;
    let off = point_ids(basis);
    let n = *off.last().unwrap();
    let mut labels = Vec::with_capacity(n);
    let mut grades = Vec::with_capacity(n);
    let mut direct: Vec<BTreeSet<usize>> = Vec::with_capacity(n);
    let mut faces = Vec::with_capacity(n);
    for k in 0..=basis.max_degree() {
        for p in basis.elements(k) {
            labels.push(p.display(g));
            grades.push(k);
            let sub = local_subgraph(g, p);
            let to_g: Vec<Vertex> = sub.names().iter().map(|nm| g.vertex(nm).expect("subgraph vertex")).collect();
            let mut seen = BTreeSet::new();
            for j in 0..=basis.max_degree().min(sub.vertex_count().saturating_sub(1)) {
                for v in omega(&sub, j).basis_vectors() {
                    let coords = decompose(basis, &v.map_vertices(|x| to_g[x as usize]))?;
                    seen.extend(coords.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| off[j] + i));
                }
            }
            direct.push(seen);
            faces.push(if k == 0 {
                vec![]
            } else {
                decompose(basis, &p.boundary())?
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (off[k - 1] + i, c))
                    .collect()
            });
        }
    }
    let min_open = (0..n)
        .map(|x| {
            let mut closed: BTreeSet<usize> = BTreeSet::from([x]);
            let mut stack = vec![x];
            while let Some(y) = stack.pop() {
                for &z in &direct[y] {
                    if closed.insert(z) {
                        stack.push(z);
                    }
                }
            }
            closed.into_iter().collect()
        })
        .collect();
    Ok(FiniteSpace { labels, grades, min_open, faces })
}

/// An ordered list of open sets covering the space.
#[derive(Clone, Debug, PartialEq)]
pub struct Cover {
    pub members: Vec<OpenSet>,
}

impl Cover {
    pub fn new(space: &FiniteSpace, members: Vec<OpenSet>) -> Result<Self, Error> {
        if let Some(i) = members.iter().position(|m| !space.is_open(m)) {
            return Err(Error::Domain(format!("cover member {i} is not open")));
        }
        let union: OpenSet = members.iter().flatten().copied().collect();
        if union.len() != space.len() {
            return Err(Error::Domain("the cover misses some points".into()));
        }
        Ok(Cover { members })
    }

    /// The cover by unit balls around every vertex.
    pub fn unit_balls(g: &Graph, space: &FiniteSpace) -> Self {
        Cover { members: (0..g.vertex_count() as Vertex).map(|v| unit_ball(g, space, v)).collect() }
    }

    /// Intersection of the members indexed by `idx`.
    pub fn intersection(&self, idx: &[usize]) -> OpenSet {
        let mut it = idx.iter();
        let first = it.next().map(|&i| self.members[i].clone()).unwrap_or_default();
        it.fold(first, |acc, &i| acc.intersection(&self.members[i]).copied().collect())
    }

    /// Strictly increasing index tuples of size `n + 1` with nonempty
    /// intersection.
    fn simplices(&self, n: usize) -> Vec<(Vec<usize>, OpenSet)> {
        let m = self.members.len();
        let mut out = Vec::new();
        let mut tuple = Vec::with_capacity(n + 1);
        fn rec(
            c: &Cover,
            start: usize,
            m: usize,
            want: usize,
            tuple: &mut Vec<usize>,
            out: &mut Vec<(Vec<usize>, OpenSet)>,
        ) {
            if tuple.len() == want {
                let i = c.intersection(tuple);
                if !i.is_empty() {
                    out.push((tuple.clone(), i));
                }
                return;
            }
            for j in start..m {
                tuple.push(j);
                if !c.intersection(tuple).is_empty() {
                    rec(c, j + 1, m, want, tuple, out);
                }
                tuple.pop();
            }
        }
        rec(self, 0, m, n + 1, &mut tuple, &mut out);
        out
    }
}

/// Čech cohomology of the constant sheaf, `Γ(U) = ℤ^{components(U)}`.
pub fn cech_cohomology(space: &FiniteSpace, cover: &Cover, coeff: Coefficients) -> HomologyResult {
    let mut levels: Vec<Vec<(Vec<usize>, OpenSet)>> = Vec::new();
    for n in 0..cover.members.len() {
        let l = cover.simplices(n);
        if l.is_empty() {
            break;
        }
        levels.push(l);
    }
    let comps: Vec<Vec<Vec<Vec<usize>>>> =
        levels.iter().map(|l| l.iter().map(|(_, u)| space.component_sets(u)).collect()).collect();
    // column offsets of each tuple's components within its degree
    let offsets: Vec<Vec<usize>> = comps
        .iter()
        .map(|l| {
            let mut o = vec![0];
            for c in l {
                o.push(o.last().unwrap() + c.len());
            }
            o
        })
        .collect();
    let ranks: Vec<usize> = offsets.iter().map(|o| *o.last().unwrap()).collect();
    let cob: Vec<Matrix<Int>> = (0..levels.len().saturating_sub(1))
        .map(|n| {
            let lower: HashMap<&[usize], usize> =
                levels[n].iter().enumerate().map(|(i, (t, _))| (t.as_slice(), i)).collect();
            let mut m = Matrix::zeros(ranks[n + 1], ranks[n]);
            for (ti, (t, _)) in levels[n + 1].iter().enumerate() {
                for j in 0..t.len() {
                    let mut face = t.clone();
                    face.remove(j);
                    let fi = lower[face.as_slice()];
                    let sign = Int::from(if j % 2 == 0 { 1 } else { -1 });
                    // each component of the smaller set lies in one component
                    // of the larger
                    for (ci, comp) in comps[n + 1][ti].iter().enumerate() {
                        let x = comp[0];
                        let cj = comps[n][fi].iter().position(|c| c.binary_search(&x).is_ok()).unwrap();
                        let (r, c) = (offsets[n + 1][ti] + ci, offsets[n][fi] + cj);
                        m[(r, c)] = &m[(r, c)] + &sign;
                    }
                }
            }
            m
        })
        .collect();
    cohomology_from_coboundaries(&ranks, &cob, coeff)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodCoverReport {
    pub good: bool,
    /// Index tuples whose intersection has nonzero higher cohomology.
    pub failing: Vec<Vec<usize>>,
    pub cech: HomologyResult,
    pub sheaf: HomologyResult,
    /// Only meaningful when the cover is good.
    pub agree: bool,
}

pub fn verify_good_cover(space: &FiniteSpace, cover: &Cover) -> GoodCoverReport {
    let mut failing = Vec::new();
    for n in 0..cover.members.len() {
        let l = cover.simplices(n);
        if l.is_empty() {
            break;
        }
        for (t, u) in l {
            let h = space.sheaf_cohomology(&u, Coefficients::Z).expect("intersections of opens are open");
            if h.betti.iter().skip(1).any(|&b| b != 0) || h.torsion.iter().skip(1).any(|t| !t.is_empty()) {
                failing.push(t);
            }
        }
    }
    let cech = cech_cohomology(space, cover, Coefficients::Z);
    let sheaf = space.global_cohomology(Coefficients::Z);
    let agree = cech.same_invariants(&sheaf);
    GoodCoverReport { good: failing.is_empty(), failing, cech, sheaf, agree }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareEntry {
    pub path: String,
    pub degree: usize,
    pub homology: HomologyResult,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareReport {
    pub passed: bool,
    pub entries: Vec<PoincareEntry>,
}

/// `H_*(G_P; ℤ) = (ℤ, 0, 0, ...)` for every basis element of degree ≥ 1.
pub fn poincare_check(basis: &MinimalBasis) -> Result<PoincareReport, Error> {
    let g = &basis.graph;
    let mut entries = Vec::new();
    for k in 1..=basis.max_degree() {
        for p in basis.elements(k) {
            let sub = local_subgraph(g, p);
            let h = path_homology(&sub, sub.vertex_count().saturating_sub(1), Coefficients::Z)?;
            let passed = h.betti.first() == Some(&1)
                && h.betti.iter().skip(1).all(|&b| b == 0)
                && h.torsion.iter().all(Vec::is_empty);
            entries.push(PoincareEntry { path: p.display(g), degree: k, homology: h, passed });
        }
    }
    Ok(PoincareReport { passed: entries.iter().all(|e| e.passed), entries })
}
