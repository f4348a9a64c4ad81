//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.
//!
//! `ACCEPTANCE_ONLY=3,5` restricts the run to the listed criteria.

mod oracle;

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use pathcell::bench::{bench_quadratic, Family};
use pathcell::corpus::{digraphs_up_to_iso, graphs_up_to_iso};
use pathcell::cup::{cup_cohomology_oracle, CupEngine};
use pathcell::cw::{build_cw, cell_boundary_sphere_check, delta_vs_path_check};
use pathcell::finitetop::{clique_space, path_space, poincare_check, stalks_are_complete, verify_good_cover, Cover};
use pathcell::homology::{
    betti_convolution, clique_chain_complex, cohomology, induced_map_with, kunneth_check, lefschetz_clique,
    path_chain_complex, path_cohomology, path_homology, rational_betti, same_on_rational_homology, ChainComplex,
    ChainMap, Coefficients,
};
use pathcell::{
    cartesian_product, check_morphism, examples, is_minimal, minimal_basis, omega, one_step_homotopic, Digraph, DigraphMorphism,
    Graph, MinimalBasis, MorphismMode, Vertex,
};

type Outcome = Result<String, String>;

const CORPUS_MAX: usize = 5;

fn corpus() -> Vec<Digraph> {
    digraphs_up_to_iso(CORPUS_MAX)
}

fn full_basis(g: &Digraph) -> MinimalBasis {
    minimal_basis(g, g.vertex_count().saturating_sub(1)).expect("basis")
}

fn trim<T: Clone + PartialEq>(v: &[T], zero: T) -> Vec<T> {
    let mut v = v.to_vec();
    while v.last() == Some(&zero) {
        v.pop();
    }
    v
}

fn named_examples() -> Vec<(&'static str, Digraph)> {
    ["diamond", "T", "alternating-square", "cycle3", "cycle4", "cycle5", "cycle6", "square", "C3xC3"]
        .into_iter()
        .map(|n| (n, examples::by_name(n).expect("named example")))
        .collect()
}

// ---------------------------------------------------------------- 1

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let m = |rows: &[[i64; 3]]| rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect::<Vec<_>>();
    let smith = oracle::elementary_divisors(&m(&[[2, 4, 4], [-6, 6, 12], [10, -4, -16]]));
    if smith != [2, 6, 12].map(BigInt::from) {
        return Err(format!("oracle self-check: divisors {smith:?}"));
    }
    let graphs = corpus();
    for g in &graphs {
        let n = g.vertex_count();
        let dg = oracle::Dg::new(n, g.edges().map(|(u, v)| (u as usize, v as usize)));
        let brute = oracle::brute_homology(&dg);
        let ranks: Vec<usize> = (0..n).map(|k| omega(g, k).rank()).collect();
        if ranks != brute.omega_ranks {
            return Err(format!("Ω ranks {ranks:?} vs oracle {:?} on\n{}", brute.omega_ranks, g.to_dg()));
        }
        let h = path_homology(g, n - 1, Coefficients::Z).map_err(|e| e.to_string())?;
        let mut ours: Vec<Vec<BigInt>> = h.torsion.clone();
        ours.resize(n, Vec::new());
        ours.iter_mut().for_each(|t| t.sort());
        let mut theirs = brute.torsion.clone();
        theirs.iter_mut().for_each(|t| t.sort());
        if trim(&h.betti, 0) != trim(&brute.betti, 0) || ours != theirs {
            return Err(format!(
                "homology {:?}/{:?} vs oracle {:?}/{:?} on\n{}",
                h.betti,
                h.torsion,
                brute.betti,
                brute.torsion,
                g.to_dg()
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 600.0 {
        return Err(format!("matched on {} digraphs but took {secs:.0}s", graphs.len()));
    }
    Ok(format!("{} digraphs with ≤{CORPUS_MAX} vertices match the brute-force oracle", graphs.len()))
}

// ---------------------------------------------------------------- 2

fn structure_lemmas() -> Outcome {
    let graphs = corpus();
    let mut elements = 0usize;
    for g in &graphs {
        let b = full_basis(g);
        for d in b.degrees() {
            if d.rank() != d.omega.rank() {
                return Err(format!("degree {}: basis rank {} vs Ω rank {}\n{}", d.degree, d.rank(), d.omega.rank(), g.to_dg()));
            }
            for p in &d.elements {
                elements += 1;
                let label = p.display(g);
                if !is_minimal(g, p).map_err(|e| e.to_string())? {
                    return Err(format!("`{label}` is not minimal\n{}", g.to_dg()));
                }
                if !p.terms().all(|(_, c)| c.abs().is_one()) {
                    return Err(format!("`{label}` has a coefficient outside ±1\n{}", g.to_dg()));
                }
                let starts: BTreeSet<_> = p.paths().map(|q| q.start()).collect();
                let ends: BTreeSet<_> = p.paths().map(|q| q.end()).collect();
                if starts.len() != 1 || ends.len() != 1 {
                    return Err(format!("`{label}` has several start or end vertices\n{}", g.to_dg()));
                }
            }
            let m = d.coordinate_matrix();
            let dense: Vec<Vec<BigInt>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
            let divisors = oracle::elementary_divisors(&dense);
            if divisors.len() != d.rank() || !divisors.iter().all(One::is_one) {
                return Err(format!("degree {}: coordinate matrix has divisors {divisors:?}\n{}", d.degree, g.to_dg()));
            }
        }
    }
    Ok(format!("{elements} basis elements over {} digraphs", graphs.len()))
}

// ---------------------------------------------------------------- 3

fn sphere_checks() -> Outcome {
    let graphs = corpus();
    let (mut cells, mut bad_cells) = (0usize, 0usize);
    let mut bad_graphs = BTreeSet::new();
    let mut by_size: HashMap<usize, usize> = HashMap::new();
    let mut witness = None;
    for (i, g) in graphs.iter().enumerate() {
        let b = full_basis(g);
        if (2..=b.max_degree()).all(|k| b.rank(k) == 0) {
            continue;
        }
        let cw = build_cw(&b).map_err(|e| e.to_string())?;
        for c in cw.cells.iter().filter(|c| c.dim >= 1) {
            cells += 1;
            let r = cell_boundary_sphere_check(&cw, c.id).map_err(|e| e.to_string())?;
            if !r.passed {
                bad_cells += 1;
                bad_graphs.insert(i);
                *by_size.entry(g.vertex_count()).or_default() += 1;
                witness.get_or_insert_with(|| {
                    format!("cell `{}` (dim {}) has boundary Betti {:?} in\n{}", r.label, r.dim, r.homology.betti, g.to_dg())
                });
            }
        }
    }
    match witness {
        None => Ok(format!("{cells} cells, no violations")),
        Some(w) => {
            let mut sizes: Vec<_> = by_size.into_iter().collect();
            sizes.sort();
            Err(format!(
                "{bad_cells} of {cells} cells violate in {} digraphs (violations by vertex count {sizes:?}); first: {w}",
                bad_graphs.len()
            ))
        }
    }
}

// ---------------------------------------------------------------- 4

fn subdivision() -> Outcome {
    let mut inputs: Vec<(String, Digraph)> = corpus().into_iter().map(|g| (g.to_dg(), g)).collect();
    inputs.extend(named_examples().into_iter().map(|(n, g)| (n.to_string(), g)));
    for (name, g) in &inputs {
        let r = delta_vs_path_check(&full_basis(g)).map_err(|e| e.to_string())?;
        if !r.passed {
            return Err(format!("{name}: path {:?} vs Δ {:?}", r.path, r.delta));
        }
    }
    Ok(format!("{} digraphs including the named examples", inputs.len()))
}

// ---------------------------------------------------------------- 5

fn cup_laws() -> Outcome {
    let mut checked = 0;
    let mut products = 0;
    for g in corpus() {
        let b = full_basis(&g);
        if b.rank(2) == 0 {
            continue;
        }
        checked += 1;
        let e = CupEngine::<i64>::new(&b).map_err(|e| e.to_string())?;
        let l = e.leibniz_failures();
        let a = e.associativity_failures();
        if !l.is_empty() || !a.is_empty() {
            return Err(format!("Leibniz failures {l:?}, associativity failures {a:?} on\n{}", g.to_dg()));
        }
        let ring = cup_cohomology_oracle(&b).map_err(|e| e.to_string())?;
        if !ring.passed() {
            return Err(format!("cohomology products disagree with the subdivision: {ring:?} on\n{}", g.to_dg()));
        }
        products += ring.products_checked;
    }
    Ok(format!("{checked} digraphs with Ω₂ ≠ 0; {products} class products agree with the simplicial cup"))
}

// ---------------------------------------------------------------- 6

const KUNNETH_DEGREE: usize = 3;

fn kunneth() -> Outcome {
    let small = digraphs_up_to_iso(4);
    let betti: Vec<Vec<usize>> = small.iter().map(|g| rational_betti(g, KUNNETH_DEGREE)).collect();
    let mut pairs = 0;
    for i in 0..small.len() {
        for j in i..small.len() {
            let p = cartesian_product(&small[i], &small[j]);
            let mut got = rational_betti(&p, KUNNETH_DEGREE);
            got.resize(KUNNETH_DEGREE + 1, 0);
            let want = betti_convolution(&betti[i], &betti[j], KUNNETH_DEGREE);
            if got != want {
                return Err(format!("β(G□H) = {got:?}, convolution {want:?} for\n{}--\n{}", small[i].to_dg(), small[j].to_dg()));
            }
            pairs += 1;
        }
    }
    let c3 = examples::directed_cycle(3);
    let engine = path_homology(&cartesian_product(&c3, &c3), 4, Coefficients::Z).map_err(|e| e.to_string())?;
    let conv = trim(&betti_convolution(&rational_betti(&c3, 2), &rational_betti(&c3, 2), 4), 0);
    if engine.betti != [1, 2, 1] || conv != [1, 2, 1] {
        return Err(format!("C₃□C₃: engine {:?}, convolution {conv:?}", engine.betti));
    }
    for (a, b) in [("cycle3", "cycle3"), ("I", "I"), ("diamond", "cycle3"), ("cycle4", "I"), ("T", "cycle3")] {
        let r = kunneth_check(&examples::by_name(a).unwrap(), &examples::by_name(b).unwrap(), 4).map_err(|e| e.to_string())?;
        if !r.passed {
            return Err(format!("{a} □ {b}: {r:?}"));
        }
    }
    Ok(format!("{pairs} unordered pairs through degree {KUNNETH_DEGREE}; C₃□C₃ = (1,2,1); cross products checked on named pairs"))
}

// ---------------------------------------------------------------- 7

/// Every broad map `source → target`.
fn broad_maps(source: &Digraph, target: &Digraph) -> Vec<Vec<Vertex>> {
    let n = source.vertex_count();
    let m = target.vertex_count() as Vertex;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(s: &Digraph, t: &Digraph, m: Vertex, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        let v = cur.len() as Vertex;
        if cur.len() == s.vertex_count() {
            out.push(cur.clone());
            return;
        }
        for w in 0..m {
            let fits = |a: Vertex, b: Vertex| a == b || t.has_edge(a, b);
            let ok = s.out_neighbors(v).iter().filter(|&&x| x < v).all(|&x| fits(w, cur[x as usize]))
                && s.in_neighbors(v).iter().filter(|&&x| x < v).all(|&x| fits(cur[x as usize], w));
            if ok {
                cur.push(w);
                go(s, t, m, cur, out);
                cur.pop();
            }
        }
    }
    go(source, target, m, &mut cur, &mut out);
    out
}

struct Prepared {
    graph: Digraph,
    basis: MinimalBasis,
    complex: ChainComplex,
}

fn prepare(g: Digraph) -> Prepared {
    let basis = full_basis(&g);
    let complex = path_chain_complex(&basis).expect("chain complex");
    Prepared { graph: g, basis, complex }
}

#[derive(Default)]
struct HomotopyTally {
    detected: usize,
    narrow: usize,
    undefined: usize,
    differ: usize,
    narrow_differ: usize,
    witness: Option<String>,
}

fn injective(m: &[Vertex]) -> bool {
    m.iter().collect::<BTreeSet<_>>().len() == m.len()
}

fn tally_homotopies(s: &Prepared, t: &Prepared, tally: &mut HomotopyTally) -> Result<(), String> {
    let maps = broad_maps(&s.graph, &t.graph);
    let position: HashMap<&Vec<Vertex>, usize> = maps.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let induced: Vec<Option<ChainMap>> = maps
        .iter()
        .map(|m| {
            let f = DigraphMorphism::new(&s.graph, &t.graph, m.clone(), MorphismMode::Broad).unwrap();
            match induced_map_with(&f, &s.basis, &s.complex, &t.basis, &t.complex) {
                Ok(c) => Ok(Some(c)),
                Err(e) if e.is_invariant_failure() => Err(e.to_string()),
                Err(_) => Ok(None),
            }
        })
        .collect::<Result<_, _>>()?;
    for (i, m) in maps.iter().enumerate() {
        // one-step successors: each vertex stays or moves along an edge
        let choices: Vec<Vec<Vertex>> =
            m.iter().map(|&a| std::iter::once(a).chain(t.graph.out_neighbors(a).iter().copied()).collect()).collect();
        let mut stack = vec![Vec::new()];
        while let Some(prefix) = stack.pop() {
            if prefix.len() < m.len() {
                for &c in &choices[prefix.len()] {
                    let mut next = prefix.clone();
                    next.push(c);
                    stack.push(next);
                }
                continue;
            }
            let Some(&j) = position.get(&prefix) else { continue };
            if j == i {
                continue;
            }
            let f = DigraphMorphism::new(&s.graph, &t.graph, m.clone(), MorphismMode::Broad).unwrap();
            let g = DigraphMorphism::new(&s.graph, &t.graph, prefix.clone(), MorphismMode::Broad).unwrap();
            if !one_step_homotopic(&f, &g).map_err(|e| e.to_string())? {
                return Err(format!("one-step pair {m:?} ≤ {prefix:?} not detected"));
            }
            tally.detected += 1;
            let narrow = injective(m) && injective(&prefix);
            tally.narrow += usize::from(narrow);
            let (Some(a), Some(b)) = (&induced[i], &induced[j]) else {
                tally.undefined += 1;
                continue;
            };
            if !same_on_rational_homology(a, b, &s.complex, &t.complex) {
                tally.differ += 1;
                tally.narrow_differ += usize::from(narrow);
                let names = |x: &[Vertex]| -> String {
                    s.graph.vertices().map(|v| format!("{}={}", s.graph.name(v), t.graph.name(x[v as usize]))).collect::<Vec<_>>().join(",")
                };
                tally.witness.get_or_insert_with(|| {
                    format!("maps {} and {} differ on H^*(·;ℚ) from\n{}to\n{}", names(m), names(&prefix), s.graph.to_dg(), t.graph.to_dg())
                });
            }
        }
    }
    Ok(())
}

fn homotopy_invariance() -> Outcome {
    let sources: Vec<Prepared> = digraphs_up_to_iso(3).into_iter().map(prepare).collect();
    let targets: Vec<Prepared> = digraphs_up_to_iso(4).into_iter().map(prepare).collect();
    let mut tally = HomotopyTally::default();
    for s in &sources {
        for t in &targets {
            tally_homotopies(s, t, &mut tally)?;
        }
    }
    for t in targets.iter().filter(|t| t.graph.vertex_count() == 4) {
        tally_homotopies(t, t, &mut tally)?;
    }
    let summary = format!(
        "{} one-step pairs (sources ≤3 vertices into targets ≤4, plus 4-vertex self-maps), {} of them injective; {} skipped with an undefined induced map",
        tally.detected, tally.narrow, tally.undefined
    );
    match tally.witness {
        None => Ok(summary),
        Some(w) => Err(format!(
            "{summary}; {} pairs differ ({} injective); first: {w}",
            tally.differ, tally.narrow_differ
        )),
    }
}

// ---------------------------------------------------------------- 8

fn finite_topology() -> Outcome {
    let graphs: Vec<Graph> = graphs_up_to_iso(6);
    let mut good = 0;
    for g in &graphs {
        let space = clique_space(g);
        if let Some(v) = space.basis_violation() {
            return Err(format!("clique space opens do not form a basis at {v:?}\n{}", g.to_ug()));
        }
        let (_, cc) = clique_chain_complex(g);
        let sheaf = space.global_cohomology(Coefficients::Z);
        let simplicial = cohomology(&cc, Coefficients::Z);
        if !sheaf.same_invariants(&simplicial) {
            return Err(format!("clique space {sheaf:?} vs clique complex {simplicial:?}\n{}", g.to_ug()));
        }
        if !stalks_are_complete(g) {
            return Err(format!("a stalk is not complete\n{}", g.to_ug()));
        }
        if g.vertex_count() > 0 {
            let r = verify_good_cover(&space, &Cover::unit_balls(g, &space));
            if r.good {
                good += 1;
                if !r.agree {
                    return Err(format!("good cover: Čech {:?} vs sheaf {:?}\n{}", r.cech, r.sheaf, g.to_ug()));
                }
            }
        }
        let whole = space.whole();
        if !(0..space.len()).all(|x| space.restriction_is_surjective(&whole, &space.min_open_set(x))) {
            return Err(format!("restriction not onto\n{}", g.to_ug()));
        }
    }
    let digraphs = corpus();
    let mut paths = 0;
    for g in &digraphs {
        let b = full_basis(g);
        let space = path_space(&b).map_err(|e| e.to_string())?;
        if let Some(v) = space.basis_violation() {
            return Err(format!("path space opens do not form a basis at {v:?}\n{}", g.to_dg()));
        }
        let ours = space.global_cohomology(Coefficients::Z);
        let want = path_cohomology(g, g.vertex_count() - 1, Coefficients::Z).map_err(|e| e.to_string())?;
        if !ours.same_invariants(&want) {
            return Err(format!("path space {ours:?} vs path cohomology {want:?}\n{}", g.to_dg()));
        }
        let p = poincare_check(&b).map_err(|e| e.to_string())?;
        if !p.passed {
            let e = p.entries.iter().find(|e| !e.passed).unwrap();
            return Err(format!("H^*(G_P) nontrivial for `{}`: {:?}\n{}", e.path, e.homology, g.to_dg()));
        }
        paths += p.entries.len();
    }
    Ok(format!(
        "{} graphs (≤6 vertices, {good} good unit-ball covers), {} digraphs, {paths} Poincaré checks",
        graphs.len(),
        digraphs.len()
    ))
}

// ---------------------------------------------------------------- 9

fn automorphisms(g: &Graph) -> Vec<Vec<Vertex>> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    fn go(g: &Graph, cur: &mut Vec<Vertex>, used: &mut Vec<bool>, out: &mut Vec<Vec<Vertex>>) {
        let v = cur.len() as Vertex;
        if cur.len() == g.vertex_count() {
            out.push(cur.clone());
            return;
        }
        for w in 0..g.vertex_count() as Vertex {
            if used[w as usize] {
                continue;
            }
            let ok = (0..v).all(|u| g.has_edge(u, v) == g.has_edge(cur[u as usize], w));
            if ok {
                used[w as usize] = true;
                cur.push(w);
                go(g, cur, used, out);
                cur.pop();
                used[w as usize] = false;
            }
        }
    }
    go(g, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn lefschetz() -> Outcome {
    let mut autos = 0;
    let mut nonzero = 0;
    for g in graphs_up_to_iso(6) {
        for perm in automorphisms(&g) {
            autos += 1;
            let r = lefschetz_clique(&g, &perm);
            if !r.number.is_zero() {
                nonzero += 1;
                if r.fixed.is_none() {
                    return Err(format!("Λ = {} with no fixed clique for {perm:?} on\n{}", r.number, g.to_ug()));
                }
            }
        }
    }
    let mut free = 0;
    let mut undefined = 0;
    for g in corpus() {
        let p = prepare(g);
        let n = p.graph.vertex_count();
        let limit_broad = n <= 4;
        for m in broad_maps(&p.graph, &p.graph) {
            if m.iter().enumerate().any(|(v, &w)| v as Vertex == w) {
                continue;
            }
            let narrow = DigraphMorphism::new(&p.graph, &p.graph, m.clone(), MorphismMode::Narrow).unwrap();
            let mode = if check_morphism(&narrow).is_ok() { MorphismMode::Narrow } else { MorphismMode::Broad };
            if mode == MorphismMode::Broad && !limit_broad {
                continue;
            }
            free += 1;
            let f = narrow.with_mode(mode);
            match induced_map_with(&f, &p.basis, &p.complex, &p.basis, &p.complex) {
                Ok(c) => {
                    if let Some(k) = c.traces().iter().position(|t| !t.is_zero()) {
                        return Err(format!("fixed-vertex-free {m:?} has trace on Ω_{k}\n{}", p.graph.to_dg()));
                    }
                }
                Err(e) if e.is_invariant_failure() => return Err(e.to_string()),
                Err(_) => undefined += 1,
            }
        }
    }
    Ok(format!(
        "{autos} graph automorphisms ({nonzero} with Λ ≠ 0); {free} fixed-vertex-free endomorphisms (broad maps on ≤4 vertices, automorphisms on 5), {undefined} with an undefined induced map"
    ))
}

// ---------------------------------------------------------------- 10

fn complexity() -> Outcome {
    let start = Instant::now();
    let r = bench_quadratic(Family::Dipath, &[50, 100, 200, 400], 2, 3).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let slope = r.slope.ok_or("no slope")?;
    let ms: Vec<String> = r.seconds.iter().map(|s| format!("{:.2}", s * 1e3)).collect();
    let detail = format!("slope {slope:.2}, times [{}] ms, {secs:.1}s total", ms.join(", "));
    if slope <= 2.5 && secs <= 300.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- 11

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pathcell-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn determinism() -> Outcome {
    let dir = scratch_dir();
    let dg = dir.join("diamond.dg");
    let ug = dir.join("c5.ug");
    std::fs::write(&dg, "# diamond\na -> b\na -> c\nb -> d\nc -> d\n").unwrap();
    std::fs::write(&ug, "a -- b\nb -- c\nc -- d\nd -- e\ne -- a\n").unwrap();
    let (d, u) = (dg.to_str().unwrap(), ug.to_str().unwrap());
    let runs: Vec<Vec<&str>> = vec![
        vec!["omega", "example:C3xC3"],
        vec!["basis", d],
        vec!["basis", "example:complete4", "--order", "seed:3"],
        vec!["homology", d, "--max-dim", "3"],
        vec!["homology", "example:complete4", "--coeff", "zp:3"],
        vec!["cohomology", "example:C3xC3", "--coeff", "q"],
        vec!["cup", "example:square", "--alpha", "((a,a),(a,b))", "--beta", "((a,b),(b,b))"],
        vec!["cw-export", "example:complete4"],
        vec!["subdivide", "example:C3xC3"],
        vec!["sphere-check", "example:complete4"],
        vec!["clique", u],
        vec!["cech", u],
        vec!["lefschetz", "example:cycle4", "--map", "a=b,b=c,c=d,d=a"],
        vec!["lefschetz", u, "--theory", "clique", "--map", "a=a,b=e,c=d,d=c,e=b"],
        vec!["kunneth", "example:cycle3", "example:diamond"],
        vec!["homotopy-check", "example:I", "example:I", "--f", "a=a,b=b", "--g", "a=b,b=b"],
        vec!["poincare-check", "example:complete4"],
        vec!["corpus", "--max-vertices", "4"],
        vec!["corpus", "--random", "20", "--seed", "7", "--density", "0.4"],
    ];
    let bin = env!("CARGO_BIN_EXE_pathcell");
    for args in &runs {
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let out = Command::new(bin).args(args).args(["--threads", threads]).output().map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("`{}` exited with {:?}: {}", args.join(" "), out.status.code(), String::from_utf8_lossy(&out.stderr)));
            }
            outputs.push(out.stdout);
        }
        let env = Command::new(bin).args(args).env("PATHCELL_THREADS", "2").output().map_err(|e| e.to_string())?;
        outputs.push(env.stdout);
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("`{}` output depends on the thread count", args.join(" ")));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} invocations byte-identical across 1, 2 and 4 threads", runs.len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "oracle equivalence", oracle_equivalence),
        (2, "structure lemmas", structure_lemmas),
        (3, "sphere checks", sphere_checks),
        (4, "subdivision isomorphism", subdivision),
        (5, "cup product laws", cup_laws),
        (6, "Künneth", kunneth),
        (7, "homotopy invariance", homotopy_invariance),
        (8, "finite topology", finite_topology),
        (9, "Lefschetz", lefschetz),
        (10, "complexity", complexity),
        (11, "determinism", determinism),
    ];
    let only: Option<Vec<u32>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    for (n, name, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("criterion {n:>2} PASS  {name} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                println!("criterion {n:>2} FAIL  {name} [{secs:.1}s]: {detail}");
                failed.push(n);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
