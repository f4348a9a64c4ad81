//! Forms, their coboundary and the cup product evaluated term by term on
//! basis elements, with a Δ-complex cross-check.
//!
//! A `p`-form is a function on the degree-`p` basis. To evaluate it on a
//! truncation that is not `∂`-invariant it is extended linearly by the
//! projection of allowed paths onto `Ω_p` along a fixed complement. Any
//! extension gives the same values on `Ω`, so a second extension (shifted
//! by the coboundary of the indicator of non-allowed paths) is evaluated
//! alongside and any disagreement is reported.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::cw::{subdivide_to_delta, subdivision_map};
use crate::error::Error;
use crate::homology::{column_space_basis, complement_in, path_chain_complex, to_rational};
use crate::linalg::{kernel_field, solve_field, Matrix};
use crate::minimal::MinimalBasis;
use crate::paths::{PathVector, PrimitivePath};
use crate::scalar::{convert, Ring};
use crate::{Int, Rational};

/// Values of a form on the basis of `Ω_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    pub degree: usize,
    pub values: Vec<Rational>,
}

impl Form {
    pub fn zero(basis: &MinimalBasis, degree: usize) -> Self {
        Form { degree, values: vec![Rational::zero(); basis.rank(degree)] }
    }

    /// The dual of the `i`-th basis element.
    pub fn dual(basis: &MinimalBasis, degree: usize, i: usize) -> Self {
        let mut f = Form::zero(basis, degree);
        f.values[i] = Rational::one();
        f
    }

    /// The constant `0`-form `1`.
    pub fn one(basis: &MinimalBasis) -> Self {
        Form { degree: 0, values: vec![Rational::one(); basis.rank(0)] }
    }

    /// Restriction to `Ω` of a function on primitive paths.
    pub fn restrict(basis: &MinimalBasis, degree: usize, f: impl Fn(&PrimitivePath) -> Rational) -> Self {
        let values = basis
            .elements(degree)
            .iter()
            .map(|p| p.terms().fold(Rational::zero(), |acc, (q, c)| acc + Rational::from_integer(c.clone()) * f(q)))
            .collect();
        Form { degree, values }
    }

    /// The dual of the element with this label.
    pub fn dual_of(basis: &MinimalBasis, label: &str) -> Option<Self> {
        (0..=basis.max_degree()).find_map(|k| {
            basis.labels(k).iter().position(|l| l == label).map(|i| Form::dual(basis, k, i))
        })
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!(self.degree, other.degree);
        Form { degree: self.degree, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Form {
        Form { degree: self.degree, values: self.values.iter().map(|a| a * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Pairing with `Σ x_i b_i`.
    pub fn eval(&self, coords: &[Int]) -> Rational {
        self.values.iter().zip(coords).fold(Rational::zero(), |acc, (v, c)| acc + v * Rational::from_integer(c.clone()))
    }

    pub fn labelled<'a>(&'a self, basis: &MinimalBasis) -> LabelledForm<'a> {
        LabelledForm { form: self, labels: basis.labels(self.degree) }
    }
}

/// A form with the labels of its basis, serialized as
/// `{"degree": p, "values": {label: "rational", ...}}`.
pub struct LabelledForm<'a> {
    form: &'a Form,
    labels: Vec<String>,
}

struct Values<'a>(&'a [String], &'a [Rational]);

impl Serialize for Values<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (l, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(l, &v.to_string())?;
        }
        m.end()
    }
}

impl Serialize for LabelledForm<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("degree", &self.form.degree)?;
        m.serialize_entry("values", &Values(&self.labels, &self.form.values))?;
        m.end()
    }
}

type Sparse<S> = Vec<(usize, S)>;

/// Lifts, basis terms and boundary matrices of a basis over the ring `S`.
pub struct CupEngine<'b, S> {
    basis: &'b MinimalBasis,
    /// Per degree: allowed path ↦ coordinates of its projection onto `Ω`.
    lifts: Vec<HashMap<PrimitivePath, Sparse<S>>>,
    /// Per degree: the alternative extension of the dual basis.
    shifts: Vec<HashMap<PrimitivePath, S>>,
    terms: Vec<Vec<Vec<(PrimitivePath, S)>>>,
    /// `boundary[k]`: `n_{k-1} × n_k`.
    boundary: Vec<Matrix<S>>,
}

/// `Σ_{u non-allowed} (∂f)_u`.
fn non_allowed_boundary_mass(g: &crate::Digraph, f: &PrimitivePath) -> Int {
    if f.degree() == 0 {
        return Int::zero();
    }
    PathVector::<Int>::from_path(f.clone(), 1)
        .boundary()
        .terms()
        .filter(|(u, _)| !u.is_allowed(g))
        .fold(Int::zero(), |acc, (_, c)| acc + c)
}

impl<'b, S: Ring> CupEngine<'b, S> {
    pub fn new(basis: &'b MinimalBasis) -> Result<Self, Error> {
        let g = &basis.graph;
        let mut lifts = Vec::new();
        let mut shifts = Vec::new();
        for d in basis.degrees() {
            let mut lift = HashMap::new();
            let mut shift = HashMap::new();
            for path in &d.omega.allowed {
                let c = d.project(&PathVector::from_path(path.clone(), 1))?;
                let sparse: Sparse<S> =
                    c.coords.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, convert(x))).collect();
                if !sparse.is_empty() {
                    lift.insert(path.clone(), sparse);
                }
                let z = non_allowed_boundary_mass(g, path);
                if !z.is_zero() {
                    shift.insert(path.clone(), convert(&z));
                }
            }
            lifts.push(lift);
            shifts.push(shift);
        }
        let terms = basis
            .degrees()
            .iter()
            .map(|d| d.elements.iter().map(|p| p.terms().map(|(q, c)| (q.clone(), convert(c))).collect()).collect())
            .collect();
        let boundary = path_chain_complex(basis)?.boundaries.iter().map(|m| m.map(|x| convert(x))).collect();
        Ok(CupEngine { basis, lifts, shifts, terms, boundary })
    }

    pub fn basis(&self) -> &MinimalBasis {
        self.basis
    }

    pub fn rank(&self, k: usize) -> usize {
        self.basis.rank(k)
    }

    pub fn max_degree(&self) -> usize {
        self.basis.max_degree()
    }

    /// Value of the extension of `a` on an allowed path.
    pub fn extend(&self, k: usize, a: &[S], path: &PrimitivePath) -> S {
        self.lifts[k].get(path).map_or_else(S::zero, |l| l.iter().fold(S::zero(), |acc, (i, x)| acc + a[*i].mul_ref(x)))
    }

    /// Value of the alternative extension.
    fn extend_alt(&self, k: usize, a: &[S], path: &PrimitivePath) -> S {
        let base = self.extend(k, a, path);
        match self.shifts[k].get(path) {
            Some(z) => base + z.clone(),
            None => base,
        }
    }

    pub fn cup(&self, p: usize, a: &[S], q: usize, b: &[S]) -> Vec<S> {
        self.terms[p + q]
            .iter()
            .map(|terms| {
                terms.iter().fold(S::zero(), |acc, (path, c)| {
                    acc + c.mul_ref(&self.extend(p, a, &path.slice(0, p))).mul_ref(&self.extend(q, b, &path.slice(p, p + q)))
                })
            })
            .collect()
    }

    fn cup_alt(&self, p: usize, a: &[S], q: usize, b: &[S]) -> Vec<S> {
        self.terms[p + q]
            .iter()
            .map(|terms| {
                terms.iter().fold(S::zero(), |acc, (path, c)| {
                    acc + c
                        .mul_ref(&self.extend_alt(p, a, &path.slice(0, p)))
                        .mul_ref(&self.extend_alt(q, b, &path.slice(p, p + q)))
                })
            })
            .collect()
    }

    /// `(dα)(P) = α(∂P)`.
    pub fn coboundary(&self, p: usize, a: &[S]) -> Vec<S> {
        let Some(m) = self.boundary.get(p + 1) else { return vec![] };
        (0..m.cols()).map(|j| (0..m.rows()).fold(S::zero(), |acc, i| acc + m[(i, j)].mul_ref(&a[i]))).collect()
    }

    /// `M_P` with `(α ∪ β)(P) = αᵀ M_P β`, for every `P` of degree `p + q`.
    pub fn structure(&self, p: usize, q: usize) -> Vec<Matrix<S>> {
        self.terms[p + q]
            .iter()
            .map(|terms| {
                let mut m: Matrix<S> = Matrix::zeros(self.rank(p), self.rank(q));
                for (path, c) in terms {
                    let (Some(f), Some(b)) = (self.lifts[p].get(&path.slice(0, p)), self.lifts[q].get(&path.slice(p, p + q)))
                    else {
                        continue;
                    };
                    for (i, x) in f {
                        for (j, y) in b {
                            m[(*i, *j)] = m[(*i, *j)].add_ref(&c.mul_ref(x).mul_ref(y));
                        }
                    }
                }
                m
            })
            .collect()
    }

    /// Splits `(p, q)` where `d(α ∪ β) ≠ dα ∪ β + (-1)^p α ∪ dβ` for some
    /// pair of basis forms.
    pub fn leibniz_failures(&self) -> Vec<(usize, usize)> {
        let top = self.max_degree();
        let mut out = Vec::new();
        for m in 0..top {
            for p in 0..=m {
                let q = m - p;
                let here = self.structure(p, q);
                let front = self.structure(p + 1, q);
                let back = self.structure(p, q + 1);
                let d = &self.boundary[m + 1];
                let dp = &self.boundary[p + 1];
                let dq_t = self.boundary[q + 1].transpose();
                let sign = if p % 2 == 0 { S::one() } else { -S::one() };
                let ok = (0..self.rank(m + 1)).all(|j| {
                    let mut lhs = Matrix::zeros(self.rank(p), self.rank(q));
                    for (i, mp) in here.iter().enumerate() {
                        let c = &d[(i, j)];
                        if !c.is_zero() {
                            lhs = add(&lhs, &mp.map(|x| x.mul_ref(c)));
                        }
                    }
                    let rhs = add(&(dp * &front[j]), &(&back[j] * &dq_t).map(|x| x.mul_ref(&sign)));
                    lhs == rhs
                });
                if !ok {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// Nonzero entries `(i, j, c)` of every `M_P`, `P` of degree `p + q`.
    fn structure_sparse(&self, p: usize, q: usize) -> Vec<Vec<(usize, usize, S)>> {
        self.structure(p, q)
            .into_iter()
            .map(|m| {
                let mut nz = Vec::new();
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        if !m[(i, j)].is_zero() {
                            nz.push((i, j, m[(i, j)].clone()));
                        }
                    }
                }
                nz
            })
            .collect()
    }

    /// Triples `(p, q, r)` where `(α ∪ β) ∪ γ ≠ α ∪ (β ∪ γ)` for some basis
    /// forms.
    pub fn associativity_failures(&self) -> Vec<(usize, usize, usize)> {
        let top = self.max_degree();
        let mut out = Vec::new();
        for m in 0..=top {
            for p in 0..=m {
                for q in 0..=m - p {
                    let r = m - p - q;
                    let pq = self.structure_sparse(p, q);
                    let pq_r = self.structure_sparse(p + q, r);
                    let qr = self.structure_sparse(q, r);
                    let p_qr = self.structure_sparse(p, q + r);
                    let ok = (0..self.rank(m)).all(|target| {
                        let mut left: BTreeMap<(usize, usize, usize), S> = BTreeMap::new();
                        for (k, l, c) in &pq_r[target] {
                            for (i, j, x) in &pq[*k] {
                                let e = left.entry((*i, *j, *l)).or_insert_with(S::zero);
                                *e = e.add_ref(&c.mul_ref(x));
                            }
                        }
                        let mut right: BTreeMap<(usize, usize, usize), S> = BTreeMap::new();
                        for (i, k, c) in &p_qr[target] {
                            for (j, l, y) in &qr[*k] {
                                let e = right.entry((*i, *j, *l)).or_insert_with(S::zero);
                                *e = e.add_ref(&c.mul_ref(y));
                            }
                        }
                        left.retain(|_, v| !v.is_zero());
                        right.retain(|_, v| !v.is_zero());
                        left == right
                    });
                    if !ok {
                        out.push((p, q, r));
                    }
                }
            }
        }
        out
    }
}

fn add<S: Ring>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out[(i, j)] = a[(i, j)].add_ref(&b[(i, j)]);
        }
    }
    out
}

pub fn coboundary(basis: &MinimalBasis, alpha: &Form) -> Result<Form, Error> {
    let e = CupEngine::<Rational>::new(basis)?;
    Ok(Form { degree: alpha.degree + 1, values: e.coboundary(alpha.degree, &alpha.values) })
}

/// How one basis element was evaluated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CupFlag {
    pub path: String,
    /// Grouping by front truncation left every bundled back in `Ω`.
    pub front_merge_in_omega: bool,
    /// Grouping by back truncation left every bundled front in `Ω`.
    pub back_merge_in_omega: bool,
    #[serde(serialize_with = "crate::homology::ser_rational")]
    pub value: Rational,
    #[serde(serialize_with = "crate::homology::ser_rational")]
    pub alternative: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CupResult {
    pub form: Form,
    /// Elements where neither grouping stays inside `Ω`.
    pub flags: Vec<CupFlag>,
}

impl CupResult {
    /// Flags whose two candidate values differ.
    pub fn ambiguities(&self) -> impl Iterator<Item = &CupFlag> {
        self.flags.iter().filter(|f| f.value != f.alternative)
    }
}

fn bundles_in_omega(basis: &MinimalBasis, k: usize, bundles: BTreeMap<PrimitivePath, PathVector>) -> bool {
    bundles.into_values().all(|b| basis.degree(k).project(&b).map(|c| c.exact).unwrap_or(false))
}

pub fn cup(basis: &MinimalBasis, alpha: &Form, beta: &Form) -> Result<CupResult, Error> {
    let e = CupEngine::<Rational>::new(basis)?;
    cup_with(&e, alpha, beta)
}

/// `α ∪ β` on every basis element of degree `p + q`.
pub fn cup_with(e: &CupEngine<'_, Rational>, alpha: &Form, beta: &Form) -> Result<CupResult, Error> {
    let basis = e.basis();
    let (p, q) = (alpha.degree, beta.degree);
    if p + q > basis.max_degree() {
        return Err(Error::Domain(format!("degree {} exceeds the basis maximum {}", p + q, basis.max_degree())));
    }
    if alpha.values.len() != basis.rank(p) || beta.values.len() != basis.rank(q) {
        return Err(Error::Domain("form length does not match the basis".into()));
    }
    let values = e.cup(p, &alpha.values, q, &beta.values);
    let alt = e.cup_alt(p, &alpha.values, q, &beta.values);
    let mut flags = Vec::new();
    for (i, el) in basis.elements(p + q).iter().enumerate() {
        let mut by_front: BTreeMap<PrimitivePath, PathVector> = BTreeMap::new();
        let mut by_back: BTreeMap<PrimitivePath, PathVector> = BTreeMap::new();
        for (path, c) in el.terms() {
            let (f, b) = (path.slice(0, p), path.slice(p, p + q));
            by_front.entry(f.clone()).or_insert_with(|| PathVector::zero(q)).add_term(b.clone(), c.clone());
            by_back.entry(b).or_insert_with(|| PathVector::zero(p)).add_term(f, c.clone());
        }
        let front_ok = bundles_in_omega(basis, q, by_front);
        let back_ok = bundles_in_omega(basis, p, by_back);
        if !front_ok && !back_ok {
            flags.push(CupFlag {
                path: el.display(&basis.graph),
                front_merge_in_omega: front_ok,
                back_merge_in_omega: back_ok,
                value: values[i].clone(),
                alternative: alt[i].clone(),
            });
        }
    }
    Ok(CupResult { form: Form { degree: p + q, values }, flags })
}

/// Carries `α` and `β` to cochains on the subdivision (extension on allowed
/// simplices, zero elsewhere), takes the front-face/back-face product there
/// and restricts back to the basis.
pub fn cup_oracle_delta(basis: &MinimalBasis, alpha: &Form, beta: &Form) -> Result<Form, Error> {
    let e = CupEngine::<Rational>::new(basis)?;
    let delta = subdivide_to_delta(basis);
    let (p, q) = (alpha.degree, beta.degree);
    let cochain = |k: usize, f: &Form| -> HashMap<PrimitivePath, Rational> {
        delta.simplices.get(k).map_or_else(HashMap::new, |l| {
            l.iter().map(|s| (s.clone(), e.extend(k, &f.values, s))).collect()
        })
    };
    let a = cochain(p, alpha);
    let b = cochain(q, beta);
    let product: HashMap<&PrimitivePath, Rational> = delta
        .simplices
        .get(p + q)
        .map(|l| l.iter().map(|s| (s, &a[&s.slice(0, p)] * &b[&s.slice(p, p + q)])).collect())
        .unwrap_or_default();
    let values = basis
        .elements(p + q)
        .iter()
        .map(|el| el.terms().fold(Rational::zero(), |acc, (s, c)| acc + Rational::from_integer(c.clone()) * &product[s]))
        .collect();
    Ok(Form { degree: p + q, values })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RingCheck {
    /// The restriction from the subdivision is onto in cohomology.
    pub lifts_exist: bool,
    /// `(p, q)` splits where some product of classes differs.
    pub mismatches: Vec<(usize, usize)>,
    pub products_checked: usize,
}

impl RingCheck {
    pub fn passed(&self) -> bool {
        self.lifts_exist && self.mismatches.is_empty()
    }
}

/// Compares cup products of cohomology classes with the simplicial cup
/// product on the subdivision, over `ℚ`. Each class is represented there by
/// an arbitrary cocycle restricting to it, so the comparison does not reuse
/// the extension of forms.
pub fn cup_cohomology_oracle(basis: &MinimalBasis) -> Result<RingCheck, Error> {
    let e = CupEngine::<Rational>::new(basis)?;
    let cc = path_chain_complex(basis)?;
    let delta = subdivide_to_delta(basis);
    let dc = delta.chain_complex();
    let s = subdivision_map(basis, &delta);
    let top = basis.max_degree();
    let rat = |m: &Matrix<Int>| to_rational(m);
    let n = |k: usize| basis.rank(k);
    let nd = |k: usize| delta.simplices.get(k).map_or(0, Vec::len);

    // cocycle representatives of H^k(Ω; ℚ) and their Δ-cocycle lifts
    let mut classes: Vec<Vec<(Vec<Rational>, Vec<Rational>)>> = Vec::new();
    let mut lifts_exist = true;
    for k in 0..=top {
        let cocycles = if k < top { kernel_field(&rat(&cc.boundary(k + 1)).transpose()) } else { unit_vectors(n(k)) };
        let exact = if k == 0 { vec![] } else { column_space_basis(&rat(&cc.boundary(k)).transpose()) };
        let reps = complement_in(n(k), &exact, cocycles);
        let mut lifted = Vec::new();
        for h in reps {
            // unknowns (a, t): δa = 0 on Δ and sᵀa − δt = h on Ω
            let (na, nt) = (nd(k), if k == 0 { 0 } else { n(k - 1) });
            let rows_d = if k + 1 < dc.ranks.len() { nd(k + 1) } else { 0 };
            let mut m = Matrix::zeros(rows_d + n(k), na + nt);
            if rows_d > 0 {
                let db = rat(&dc.boundary(k + 1));
                for i in 0..na {
                    for j in 0..rows_d {
                        m[(j, i)] = db[(i, j)].clone();
                    }
                }
            }
            let st = rat(&s.matrices[k]);
            for i in 0..na {
                for j in 0..n(k) {
                    m[(rows_d + j, i)] = st[(i, j)].clone();
                }
            }
            if k > 0 {
                let b = rat(&cc.boundary(k));
                for i in 0..nt {
                    for j in 0..n(k) {
                        m[(rows_d + j, na + i)] = -b[(i, j)].clone();
                    }
                }
            }
            let mut rhs = vec![Rational::zero(); rows_d];
            rhs.extend(h.iter().cloned());
            match solve_field(&m, &rhs) {
                Some(x) => lifted.push((h, x[..na].to_vec())),
                None => lifts_exist = false,
            }
        }
        classes.push(lifted);
    }

    let mut mismatches = Vec::new();
    let mut checked = 0;
    for m in 0..=top {
        let exact = if m == 0 { vec![] } else { column_space_basis(&rat(&cc.boundary(m)).transpose()) };
        let exact_m = Matrix::from_columns(n(m), &exact);
        let st = rat(&s.matrices[m]).transpose();
        for p in 0..=m {
            let q = m - p;
            let mut bad = false;
            for (h1, a1) in &classes[p] {
                for (h2, a2) in &classes[q] {
                    let simplicial: Vec<Rational> = delta
                        .simplices
                        .get(m)
                        .map(|l| {
                            l.iter()
                                .map(|sx| {
                                    let i = delta.index(p, &sx.slice(0, p)).unwrap();
                                    let j = delta.index(q, &sx.slice(p, m)).unwrap();
                                    &a1[i] * &a2[j]
                                })
                                .collect()
                        })
                        .unwrap_or_default();
                    let pulled = if simplicial.is_empty() { vec![Rational::zero(); n(m)] } else { st.mul_vec(&simplicial) };
                    let ours = e.cup(p, h1, q, h2);
                    let diff: Vec<Rational> = pulled.iter().zip(&ours).map(|(x, y)| x - y).collect();
                    checked += 1;
                    let same = diff.iter().all(Zero::is_zero) || (!exact.is_empty() && solve_field(&exact_m, &diff).is_some());
                    bad |= !same;
                }
            }
            if bad {
                mismatches.push((p, q));
            }
        }
    }
    Ok(RingCheck { lifts_exist, mismatches, products_checked: checked })
}

fn unit_vectors(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::one();
            v
        })
        .collect()
}
