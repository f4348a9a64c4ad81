//! Brute-force path homology over ℤ, sharing no code with the engine:
//! dense integer kernels by column reduction, coordinates through the
//! inverse transform, and textbook Smith normal form.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

type Mat = Vec<Vec<BigInt>>;

pub struct Dg {
    pub n: usize,
    adj: Vec<Vec<bool>>,
}

impl Dg {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in edges {
            adj[u][v] = true;
        }
        Dg { n, adj }
    }

    /// Allowed paths with `k` edges and pairwise distinct vertices.
    pub fn allowed(&self, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for v in 0..self.n {
            stack.push(v);
            self.extend(k, &mut stack, &mut out);
            stack.pop();
        }
        out
    }

    fn extend(&self, k: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if stack.len() == k + 1 {
            out.push(stack.clone());
            return;
        }
        let last = *stack.last().unwrap();
        for w in 0..self.n {
            if self.adj[last][w] && !stack.contains(&w) {
                stack.push(w);
                self.extend(k, stack, out);
                stack.pop();
            }
        }
    }
}

fn faces(p: &[usize]) -> Vec<(Vec<usize>, i64)> {
    (0..p.len())
        .map(|i| {
            let mut q = p.to_vec();
            q.remove(i);
            (q, if i % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

fn is_regular(p: &[usize]) -> bool {
    p.windows(2).all(|w| w[0] != w[1])
}

/// `x a + y b = g ≥ 0`.
fn bezout(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Kernel of `c` (rows × n) over ℤ together with `R⁻¹`, where the kernel
/// basis is the tail of the columns of the unimodular `R`.
struct IntKernel {
    basis: Mat,
    inverse_tail: Mat,
}

fn integer_kernel(c: &Mat, n: usize) -> IntKernel {
    let mut c = c.clone();
    let mut r: Mat = (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut rinv = r.clone();
    let mut pivot = 0;
    for row in 0..c.len() {
        if pivot == n {
            break;
        }
        for j in pivot + 1..n {
            if c[row][j].is_zero() {
                continue;
            }
            let (a, b) = (c[row][pivot].clone(), c[row][j].clone());
            let (g, x, y) = bezout(&a, &b);
            let (ag, bg) = (&a / &g, &b / &g);
            // columns (pivot, j) ← (x·p + y·j, −(b/g)·p + (a/g)·j)
            let mix_cols = |m: &mut Mat| {
                for line in m.iter_mut() {
                    let (p, q) = (line[pivot].clone(), line[j].clone());
                    line[pivot] = &x * &p + &y * &q;
                    line[j] = &ag * &q - &bg * &p;
                }
            };
            mix_cols(&mut c);
            mix_cols(&mut r);
            let (p, q) = (rinv[pivot].clone(), rinv[j].clone());
            rinv[pivot] = p.iter().zip(&q).map(|(u, v)| &ag * u + &bg * v).collect();
            rinv[j] = p.iter().zip(&q).map(|(u, v)| &x * v - &y * u).collect();
        }
        if !c[row][pivot].is_zero() {
            pivot += 1;
        }
    }
    IntKernel {
        basis: (pivot..n).map(|j| (0..n).map(|i| r[i][j].clone()).collect()).collect(),
        inverse_tail: rinv[pivot..].to_vec(),
    }
}

/// Elementary divisors (positive) of an integer matrix.
pub fn elementary_divisors(m: &Mat) -> Vec<BigInt> {
    let mut a = m.clone();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for line in a.iter_mut() {
            line.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let s = &q * &a[t][j];
                    a[i][j] -= s;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                    if a[i][t].abs() < a[t][t].abs() {
                        a.swap(t, i);
                    }
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for line in a.iter_mut().skip(t) {
                    let s = &q * &line[t];
                    line[j] -= s;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                    if a[t][j].abs() < a[t][t].abs() {
                        for line in a.iter_mut() {
                            line.swap(t, j);
                        }
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the rest of the block
            let bad = (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
            match bad {
                Some((i, _)) => {
                    for j in t..cols {
                        let s = a[i][j].clone();
                        a[t][j] += s;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// `(ranks of Ω_k, betti, torsion)` for `k = 0..n`, trailing zeros kept.
pub struct Brute {
    pub omega_ranks: Vec<usize>,
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<BigInt>>,
}

pub fn brute_homology(g: &Dg) -> Brute {
    let top = g.n.saturating_sub(1);
    let allowed: Vec<Vec<Vec<usize>>> = (0..=top).map(|k| g.allowed(k)).collect();
    let index: Vec<HashMap<Vec<usize>, usize>> =
        allowed.iter().map(|l| l.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect()).collect();
    let mut kernels = Vec::new();
    for k in 0..=top {
        let n = allowed[k].len();
        let mut rows: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut c: Mat = Vec::new();
        if k > 0 {
            for (col, p) in allowed[k].iter().enumerate() {
                for (q, s) in faces(p) {
                    if !is_regular(&q) || index[k - 1].contains_key(&q) {
                        continue;
                    }
                    let r = *rows.entry(q).or_insert_with(|| {
                        c.push(vec![BigInt::zero(); n]);
                        c.len() - 1
                    });
                    c[r][col] += s;
                }
            }
        }
        kernels.push(integer_kernel(&c, n));
    }
    let omega_ranks: Vec<usize> = kernels.iter().map(|k| k.basis.len()).collect();
    // ∂_k in kernel coordinates, k = 1..=top
    let mut divisors: Vec<Vec<BigInt>> = vec![Vec::new(); top + 2];
    for k in 1..=top {
        let lower = &kernels[k - 1];
        let nl = allowed[k - 1].len();
        let images: Vec<Vec<BigInt>> = kernels[k]
            .basis
            .iter()
            .map(|v| {
                let mut w = vec![BigInt::zero(); nl];
                for (i, c) in v.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for (q, s) in faces(&allowed[k][i]) {
                        if let Some(&r) = index[k - 1].get(&q) {
                            w[r] += c * s;
                        }
                    }
                }
                w
            })
            .collect();
        let m: Mat = lower
            .inverse_tail
            .iter()
            .map(|row| images.iter().map(|w| row.iter().zip(w).map(|(a, b)| a * b).sum()).collect())
            .collect();
        divisors[k] = elementary_divisors(&m);
    }
    let betti = (0..=top).map(|k| omega_ranks[k] - divisors[k].len() - divisors[k + 1].len()).collect();
    let torsion = (0..=top).map(|k| divisors[k + 1].iter().filter(|d| !d.is_one()).cloned().collect()).collect();
    Brute { omega_ranks, betti, torsion }
}
