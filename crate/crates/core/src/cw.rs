//! The cell complex with one cell per basis element, and its subdivision
//! into a Δ-complex of ordered vertex sequences.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::digraph::Digraph;
use crate::error::{Error, InvariantError};
use crate::homology::{homology, path_chain_complex, ChainComplex, ChainMap, Coefficients, HomologyResult};
use crate::linalg::Matrix;
use crate::minimal::{decompose, MinimalBasis};
use crate::paths::PrimitivePath;
use crate::Int;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub id: usize,
    pub dim: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CwComplex {
    pub cells: Vec<Cell>,
    /// `boundary[id]` lists `(face id, ±1)` in id order.
    pub boundary: Vec<Vec<(usize, i64)>>,
}

struct BoundaryMap<'a>(&'a [Vec<(usize, i64)>]);

impl Serialize for BoundaryMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (id, faces) in self.0.iter().enumerate() {
            let pairs: Vec<[i64; 2]> = faces.iter().map(|&(f, c)| [f as i64, c]).collect();
            m.serialize_entry(&id.to_string(), &pairs)?;
        }
        m.end()
    }
}

impl Serialize for CwComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("cells", &self.cells)?;
        m.serialize_entry("boundary", &BoundaryMap(&self.boundary))?;
        m.end()
    }
}

impl CwComplex {
    pub fn dimension(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    /// Cellular chain complex of the cells in `subset` (closed under faces).
    fn chain_complex_on(&self, subset: &BTreeSet<usize>) -> ChainComplex {
        let top = subset.iter().map(|&i| self.cells[i].dim).max().unwrap_or(0);
        let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
        for &i in subset {
            by_dim[self.cells[i].dim].push(i);
        }
        let pos: HashMap<usize, usize> =
            by_dim.iter().flat_map(|l| l.iter().enumerate().map(|(j, &i)| (i, j))).collect();
        let mut boundaries = vec![Matrix::zeros(0, by_dim[0].len())];
        for k in 1..=top {
            let mut m = Matrix::zeros(by_dim[k - 1].len(), by_dim[k].len());
            for (col, &i) in by_dim[k].iter().enumerate() {
                for &(f, c) in &self.boundary[i] {
                    m[(pos[&f], col)] = Int::from(c);
                }
            }
            boundaries.push(m);
        }
        let labels = by_dim.iter().map(|l| l.iter().map(|&i| self.cells[i].label.clone()).collect()).collect();
        ChainComplex::new(boundaries, labels).expect("cellular boundaries square to zero")
    }

    pub fn chain_complex(&self) -> ChainComplex {
        self.chain_complex_on(&(0..self.cells.len()).collect())
    }

    /// Cells reachable from `cell` through iterated boundaries, excluding
    /// the cell itself.
    pub fn boundary_closure(&self, cell: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<usize> = self.boundary[cell].iter().map(|&(f, _)| f).collect();
        while let Some(f) = stack.pop() {
            if out.insert(f) {
                stack.extend(self.boundary[f].iter().map(|&(g, _)| g));
            }
        }
        out
    }
}

/// One cell per basis element; incidences from the basis decomposition of
/// boundaries, which must all be `±1`.
pub fn build_cw(basis: &MinimalBasis) -> Result<CwComplex, Error> {
    let g = &basis.graph;
    let mut cells = Vec::new();
    let mut offsets = Vec::new();
    for k in 0..=basis.max_degree() {
        offsets.push(cells.len());
        for p in basis.elements(k) {
            cells.push(Cell { id: cells.len(), dim: k, label: p.display(g) });
        }
    }
    let mut boundary = vec![Vec::new(); cells.len()];
    for k in 1..=basis.max_degree() {
        for (i, p) in basis.elements(k).iter().enumerate() {
            let id = offsets[k] + i;
            for (j, c) in decompose(basis, &p.boundary())?.into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if !c.abs().is_one() {
                    return Err(InvariantError::NonUnitIncidence { cell: cells[id].label.clone(), coeff: c.to_string() }.into());
                }
                boundary[id].push((offsets[k - 1] + j, c.to_i64().unwrap()));
            }
        }
    }
    let cw = CwComplex { cells, boundary };
    let cc = cw.chain_complex();
    if cc != path_chain_complex(basis)?.truncate(cw.dimension()) {
        return Err(InvariantError::Other("cellular complex differs from the path complex".into()).into());
    }
    Ok(cw)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SphereReport {
    pub cell: usize,
    pub label: String,
    pub dim: usize,
    pub closure_cells: usize,
    pub homology: HomologyResult,
    pub passed: bool,
}

/// Whether the cells under `cell`'s boundary have the integral homology of
/// `S^{k-1}`.
pub fn cell_boundary_sphere_check(cw: &CwComplex, cell: usize) -> Result<SphereReport, Error> {
    let dim = cw.cells.get(cell).ok_or_else(|| Error::Domain(format!("no cell {cell}")))?.dim;
    if dim == 0 {
        return Err(Error::Domain("sphere checks need a cell of dimension ≥ 1".into()));
    }
    let closure = cw.boundary_closure(cell);
    let h = homology(&cw.chain_complex_on(&closure), Coefficients::Z).truncate(dim - 1);
    let mut want = vec![0usize; dim];
    want[0] += 1;
    want[dim - 1] += 1;
    let passed = h.betti.len() <= dim
        && (0..dim).all(|k| h.betti.get(k).copied().unwrap_or(0) == want[k])
        && h.torsion.iter().all(Vec::is_empty)
        && !closure.is_empty();
    Ok(SphereReport { cell, label: cw.cells[cell].label.clone(), dim, closure_cells: closure.len(), homology: h, passed })
}

/// A semi-simplicial complex whose simplices are ordered vertex sequences
/// and whose faces are vertex deletions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaComplex {
    pub graph: Digraph,
    /// Simplices per dimension in lexicographic order.
    pub simplices: Vec<Vec<PrimitivePath>>,
}

impl DeltaComplex {
    pub fn dimension(&self) -> usize {
        self.simplices.len().saturating_sub(1)
    }

    pub fn index(&self, k: usize, s: &PrimitivePath) -> Option<usize> {
        self.simplices.get(k)?.binary_search(s).ok()
    }

    /// Simplices that are not a face of another simplex.
    pub fn facets(&self) -> Vec<PrimitivePath> {
        let mut faces: BTreeSet<&PrimitivePath> = BTreeSet::new();
        let mut cofaces: Vec<PrimitivePath> = Vec::new();
        for k in 1..self.simplices.len() {
            for s in &self.simplices[k] {
                for j in 0..=k {
                    cofaces.push(s.delete(j));
                }
            }
        }
        faces.extend(cofaces.iter());
        self.simplices.iter().flatten().filter(|s| !faces.contains(s)).cloned().collect()
    }

    pub fn facet_names(&self) -> Vec<Vec<String>> {
        self.facets().iter().map(|s| s.vertices().iter().map(|&v| self.graph.name(v).to_string()).collect()).collect()
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let mut boundaries = vec![Matrix::zeros(0, self.simplices.first().map_or(0, Vec::len))];
        for k in 1..self.simplices.len() {
            let mut m = Matrix::zeros(self.simplices[k - 1].len(), self.simplices[k].len());
            for (col, s) in self.simplices[k].iter().enumerate() {
                for j in 0..=k {
                    let row = self.index(k - 1, &s.delete(j)).expect("faces are present");
                    m[(row, col)] = Int::from(if j % 2 == 0 { 1 } else { -1 });
                }
            }
            boundaries.push(m);
        }
        let labels = self.simplices.iter().map(|l| l.iter().map(|s| s.display(&self.graph)).collect()).collect();
        ChainComplex::new(boundaries, labels).expect("Δ boundaries square to zero")
    }
}

/// All vertex-deletion subsequences of the primitive terms of every basis
/// element.
pub fn subdivide_to_delta(basis: &MinimalBasis) -> DeltaComplex {
    let mut layers: Vec<BTreeSet<PrimitivePath>> = vec![BTreeSet::new(); basis.max_degree() + 1];
    for k in 0..=basis.max_degree() {
        for p in basis.elements(k) {
            layers[k].extend(p.paths().cloned());
        }
    }
    for k in (1..layers.len()).rev() {
        let faces: Vec<PrimitivePath> = layers[k].iter().flat_map(|s| (0..=k).map(move |j| s.delete(j))).collect();
        layers[k - 1].extend(faces);
    }
    while layers.len() > 1 && layers.last().is_some_and(BTreeSet::is_empty) {
        layers.pop();
    }
    DeltaComplex { graph: basis.graph.clone(), simplices: layers.into_iter().map(|l| l.into_iter().collect()).collect() }
}

/// The chain map `Ω_* → C_*(Δ)` sending each basis element to the sum of
/// its terms.
pub fn subdivision_map(basis: &MinimalBasis, delta: &DeltaComplex) -> ChainMap {
    let matrices = (0..=basis.max_degree())
        .map(|k| {
            let rows = delta.simplices.get(k).map_or(0, Vec::len);
            let mut m = Matrix::zeros(rows, basis.rank(k));
            for (col, p) in basis.elements(k).iter().enumerate() {
                for (q, c) in p.terms() {
                    m[(delta.index(k, q).expect("terms are simplices"), col)] = c.clone();
                }
            }
            m
        })
        .collect();
    ChainMap { matrices }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    pub path: HomologyResult,
    pub delta: HomologyResult,
    pub facets: Vec<Vec<String>>,
    pub passed: bool,
}

/// Compares integral homology of the subdivision with path homology.
pub fn delta_vs_path_check(basis: &MinimalBasis) -> Result<DeltaReport, Error> {
    let path = homology(&path_chain_complex(basis)?, Coefficients::Z);
    let delta = subdivide_to_delta(basis);
    let dh = homology(&delta.chain_complex(), Coefficients::Z);
    let passed = path.same_invariants(&dh);
    Ok(DeltaReport { path, delta: dh, facets: delta.facet_names(), passed })
}
