//! Reproducible test corpora: all digraphs and graphs up to isomorphism on a
//! few vertices, and seeded random samples.
//!
//! A digraph on `n` vertices is encoded as a bitmask over ordered pairs; the
//! canonical representative of an isomorphism class is the smallest mask over
//! all vertex permutations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::digraph::{Digraph, Graph};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(i: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(i + 1, p, out);
            p.swap(i, j);
        }
    }
    rec(0, &mut p, &mut out);
    out
}

/// Bit positions and, per permutation, the source position feeding each bit.
struct Encoding {
    pairs: Vec<(usize, usize)>,
    sources: Vec<Vec<usize>>,
}

impl Encoding {
    fn new(n: usize, directed: bool) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| if directed { u != v } else { u < v })
            .collect();
        let pos = |u: usize, v: usize| {
            let key = if directed || u < v { (u, v) } else { (v, u) };
            pairs.iter().position(|&p| p == key).unwrap()
        };
        let sources = permutations(n)
            .into_iter()
            .skip(1)
            .map(|perm| {
                // permuted mask bit at pos(perm[u], perm[v]) comes from pos(u, v)
                let mut src = vec![0; pairs.len()];
                for (i, &(u, v)) in pairs.iter().enumerate() {
                    src[pos(perm[u], perm[v])] = i;
                }
                src
            })
            .collect();
        Encoding { pairs, sources }
    }

    fn is_canonical(&self, mask: u64) -> bool {
        let bit = |m: u64, i: usize| (m >> i) & 1;
        'perm: for src in &self.sources {
            for i in (0..self.pairs.len()).rev() {
                let (a, b) = (bit(mask, i), bit(mask, src[i]));
                if a != b {
                    if b < a {
                        return false;
                    }
                    continue 'perm;
                }
            }
        }
        true
    }

    fn canonical_masks(&self) -> Vec<u64> {
        let total = 1u64 << self.pairs.len();
        (0..total).into_par_iter().filter(|&m| self.is_canonical(m)).collect()
    }

    fn edges(&self, mask: u64) -> Vec<(usize, usize)> {
        self.pairs.iter().enumerate().filter(|(i, _)| (mask >> i) & 1 == 1).map(|(_, &e)| e).collect()
    }
}

/// One digraph per isomorphism class on `1..=max_n` vertices, ordered by
/// vertex count and then canonical mask. Vertices are named `a, b, ...`.
pub fn digraphs_up_to_iso(max_n: usize) -> Vec<Digraph> {
    assert!(max_n <= 6, "exhaustive enumeration is limited to 6 vertices");
    let mut out = Vec::new();
    for n in 1..=max_n {
        let enc = Encoding::new(n, true);
        out.extend(enc.canonical_masks().into_iter().map(|m| Digraph::lettered(n, &enc.edges(m))));
    }
    out
}

/// One graph per isomorphism class on `1..=max_n` vertices, named `1..=n`.
pub fn graphs_up_to_iso(max_n: usize) -> Vec<Graph> {
    assert!(max_n <= 8, "exhaustive enumeration is limited to 8 vertices");
    let mut out = Vec::new();
    for n in 1..=max_n {
        let enc = Encoding::new(n, false);
        out.extend(enc.canonical_masks().into_iter().map(|m| {
            let edges: Vec<(usize, usize)> = enc.edges(m).into_iter().map(|(u, v)| (u + 1, v + 1)).collect();
            Graph::numbered(n, &edges)
        }));
    }
    out
}

/// `count` random digraphs with `1..=max_n` vertices, each ordered pair an
/// edge with probability `density`, from a fixed seed.
pub fn random_digraphs(count: usize, max_n: usize, density: f64, seed: u64) -> Vec<Digraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_n);
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (0..n).map(move |v| (u, v)))
                .filter(|&(u, v)| u != v)
                .collect::<Vec<_>>()
                .into_iter()
                .filter(|_| rng.gen_bool(density))
                .collect();
            Digraph::lettered(n, &edges)
        })
        .collect()
}
