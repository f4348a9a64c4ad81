use std::fs;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use pathcell::bench::{bench_quadratic, Family};
use pathcell::cup::{cup, Form};
use pathcell::cw::{build_cw, cell_boundary_sphere_check, delta_vs_path_check};
use pathcell::finitetop::{clique_space_bounded, verify_good_cover, Cover, FiniteSpace};
use pathcell::homology::{
    clique_chain_complex, cohomology, homotopy_check, kunneth_check, lefschetz_clique, lefschetz_path, path_cohomology,
    path_homology, Coefficients, Theory,
};
use pathcell::minimal::{minimal_basis_with_order, SelectionOrder};
use pathcell::{corpus, examples, finitetop, omega, parse_digraph, parse_graph, Digraph, DigraphMorphism, Graph};
use pathcell::{Error, MorphismMode, Rational};

#[derive(Parser, Debug)]
#[command(name = "pathcell", version, about = "Exact path (co)homology of finite digraphs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Worker threads; overrides PATHCELL_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// z, q or zp:P with P prime.
    #[arg(long, global = true, default_value = "z", value_parser = Coefficients::from_str)]
    coeff: Coefficients,
    #[arg(long, global = true, default_value_t = 3)]
    max_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Human,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ranks and blocks of Ω_k.
    Omega { input: String },
    /// Minimal-path basis of Ω_k.
    Basis {
        input: String,
        /// canonical, reversed or seed:N
        #[arg(long, default_value = "canonical", value_parser = parse_order)]
        order: SelectionOrder,
    },
    /// Path homology through --max-dim.
    Homology { input: String },
    /// Path cohomology through --max-dim.
    Cohomology { input: String },
    /// Cup product of two forms given as `label=value,...` or a bare label.
    Cup {
        input: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// Cellular complex of the minimal basis.
    CwExport { input: String },
    /// Δ-complex subdivision and its homology against path homology.
    Subdivide { input: String },
    /// Homology of cell boundaries against spheres.
    SphereCheck {
        input: String,
        /// Cell id or label; all cells of dimension ≥ 1 when absent.
        #[arg(long)]
        cell: Option<String>,
    },
    /// Finite space of cliques of an undirected graph.
    Clique {
        input: String,
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// Čech cohomology of a unit-ball cover.
    Cech {
        input: String,
        /// Centres of the unit balls; all vertices when absent.
        #[arg(long)]
        vertices: Option<String>,
    },
    /// Lefschetz number of a vertex map.
    Lefschetz {
        input: String,
        /// Vertex map `a=b,...`.
        #[arg(long)]
        map: String,
        #[arg(long, value_enum, default_value_t = TheoryArg::Path)]
        theory: TheoryArg,
    },
    /// Künneth formula for the box product of two digraphs.
    Kunneth { g: String, h: String },
    /// Whether two maps are one-step homotopic and agree on cohomology.
    HomotopyCheck {
        g: String,
        h: String,
        #[arg(long)]
        f: String,
        #[arg(long = "g")]
        g_map: String,
    },
    /// Acyclicity of the local subgraph of every basis element.
    PoincareCheck { input: String },
    /// Timing of basis construction on a growing family.
    Bench {
        #[arg(long, default_value = "dipath", value_parser = Family::from_str)]
        family: Family,
        #[arg(long, value_delimiter = ',', default_values_t = vec![50usize, 100, 200, 400])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
    /// All digraphs up to isomorphism, or a seeded random sample.
    Corpus {
        #[arg(long, default_value_t = 5)]
        max_vertices: usize,
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TheoryArg {
    Path,
    Clique,
}

fn parse_order(s: &str) -> Result<SelectionOrder, String> {
    match s {
        "canonical" => Ok(SelectionOrder::Canonical),
        "reversed" => Ok(SelectionOrder::Reversed),
        _ => s
            .strip_prefix("seed:")
            .and_then(|n| n.parse().ok())
            .map(SelectionOrder::Seeded)
            .ok_or_else(|| format!("unknown order `{s}` (expected canonical, reversed or seed:N)")),
    }
}

enum Failure {
    Input(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_invariant_failure() {
            Failure::Invariant(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

/// A report plus whether it records a counterexample.
struct Report {
    body: Value,
    failed: bool,
}

impl Report {
    fn ok(body: Value) -> Self {
        Report { body, failed: false }
    }
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn read_source(input: &str) -> Result<Option<String>, Failure> {
    if input.starts_with("example:") {
        return Ok(None);
    }
    fs::read_to_string(input).map(Some).map_err(|e| Failure::Input(format!("{input}: {e}")))
}

fn load_digraph(input: &str) -> Result<Digraph, Failure> {
    match read_source(input)? {
        Some(text) => parse_digraph(&text).map_err(|e| Failure::Input(format!("{input}: {e}"))),
        None => {
            let name = &input["example:".len()..];
            examples::by_name(name).ok_or_else(|| Failure::Input(format!("unknown example `{name}`")))
        }
    }
}

fn load_graph(input: &str) -> Result<Graph, Failure> {
    match read_source(input)? {
        Some(text) => parse_graph(&text).map_err(|e| Failure::Input(format!("{input}: {e}"))),
        None => {
            let name = &input["example:".len()..];
            let num = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok());
            if let Some(n) = num("complete") {
                Ok(examples::complete_graph(n))
            } else if let Some(n) = num("cycle").filter(|&n| n >= 3) {
                Ok(examples::cycle_graph(n))
            } else {
                Err(Failure::Input(format!("unknown graph example `{name}`")))
            }
        }
    }
}

/// Splits on commas outside parentheses.
fn split_list(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut from) = (0i32, 0usize);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[from..i].trim());
                from = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[from..].trim());
    out.into_iter().filter(|x| !x.is_empty()).collect()
}

fn parse_pairs(s: &str) -> Result<Vec<(&str, &str)>, Failure> {
    split_list(s)
        .into_iter()
        .map(|item| {
            item.rsplit_once('=')
                .map(|(a, b)| (a.trim(), b.trim()))
                .ok_or_else(|| Failure::Input(format!("expected `source=target`, got `{item}`")))
        })
        .collect()
}

fn morphism<'a>(source: &'a Digraph, target: &'a Digraph, spec: &str) -> Result<DigraphMorphism<'a>, Failure> {
    let pairs = parse_pairs(spec)?;
    let f = DigraphMorphism::from_names(source, target, &pairs, MorphismMode::Broad).map_err(input_err)?;
    pathcell::check_morphism(&f).map_err(|v| Failure::Input(format!("not a digraph map: {v}")))?;
    Ok(f)
}

fn basis_for(g: &Digraph, max_dim: usize, order: SelectionOrder) -> Result<pathcell::MinimalBasis, Failure> {
    Ok(minimal_basis_with_order(g, max_dim.min(g.vertex_count().saturating_sub(1)), order)?)
}

fn parse_form(basis: &pathcell::MinimalBasis, text: &str) -> Result<Form, Failure> {
    if !text.contains('=') {
        return Form::dual_of(basis, text.trim()).ok_or_else(|| Failure::Input(format!("no basis element `{}`", text.trim())));
    }
    let mut form: Option<Form> = None;
    for (label, value) in parse_pairs(text)? {
        let c = Rational::from_str(value).map_err(|_| Failure::Input(format!("bad coefficient `{value}`")))?;
        let dual = Form::dual_of(basis, label).ok_or_else(|| Failure::Input(format!("no basis element `{label}`")))?;
        if form.as_ref().is_some_and(|f| f.degree != dual.degree) {
            return Err(Failure::Input("form mixes degrees".into()));
        }
        let term = dual.scale(&c);
        form = Some(match form {
            Some(f) => f.add(&term),
            None => term,
        });
    }
    form.ok_or_else(|| Failure::Input("empty form".into()))
}

fn graph_json(g: &Digraph) -> Value {
    json!({
        "vertices": g.names(),
        "edges": g.edges().map(|(u, v)| [g.name(u), g.name(v)]).collect::<Vec<_>>(),
    })
}

fn space_summary(space: &FiniteSpace, coeff: Coefficients) -> Value {
    json!({ "space": to_value(space), "cohomology": to_value(&space.global_cohomology(coeff)) })
}

fn run(cmd: Command, g: &Global) -> Result<Report, Failure> {
    let order = SelectionOrder::Canonical;
    Ok(match cmd {
        Command::Omega { input } => {
            let dg = load_digraph(&input)?;
            let top = g.max_dim.min(dg.vertex_count().saturating_sub(1));
            let degrees: Vec<Value> = (0..=top)
                .map(|k| {
                    let m = omega(&dg, k);
                    let blocks: Vec<Value> = m
                        .blocks
                        .iter()
                        .filter(|b| b.rank() > 0)
                        .map(|b| json!({"start": dg.name(b.start), "end": dg.name(b.end), "rank": b.rank()}))
                        .collect();
                    json!({"degree": k, "allowed": m.allowed.len(), "rank": m.rank(), "blocks": blocks})
                })
                .collect();
            let ranks: Vec<Value> = degrees.iter().map(|d| d["rank"].clone()).collect();
            Report::ok(json!({"ranks": ranks, "degrees": degrees}))
        }
        Command::Basis { input, order } => {
            let dg = load_digraph(&input)?;
            let b = basis_for(&dg, g.max_dim, order)?;
            let degrees: Vec<Value> = b
                .degrees()
                .iter()
                .map(|d| {
                    let elements: Vec<Value> = d
                        .elements
                        .iter()
                        .zip(d.endpoints())
                        .map(|(p, (s, e))| json!({"path": p.display(&dg), "start": dg.name(s), "end": dg.name(e)}))
                        .collect();
                    json!({"degree": d.degree, "elements": elements})
                })
                .collect();
            Report::ok(json!({"ranks": b.ranks(), "degrees": degrees}))
        }
        Command::Homology { input } => Report::ok(to_value(&path_homology(&load_digraph(&input)?, g.max_dim, g.coeff)?)),
        Command::Cohomology { input } => {
            Report::ok(to_value(&path_cohomology(&load_digraph(&input)?, g.max_dim, g.coeff)?))
        }
        Command::Cup { input, alpha, beta } => {
            let dg = load_digraph(&input)?;
            let b = basis_for(&dg, g.max_dim, order)?;
            let a = parse_form(&b, &alpha)?;
            let c = parse_form(&b, &beta)?;
            let r = cup(&b, &a, &c)?;
            Report::ok(json!({
                "alpha": to_value(&a.labelled(&b)),
                "beta": to_value(&c.labelled(&b)),
                "cup": to_value(&r.form.labelled(&b)),
                "flags": to_value(&r.flags),
                "ambiguous": r.ambiguities().count(),
            }))
        }
        Command::CwExport { input } => {
            let dg = load_digraph(&input)?;
            Report::ok(to_value(&build_cw(&basis_for(&dg, g.max_dim, order)?)?))
        }
        Command::Subdivide { input } => {
            let dg = load_digraph(&input)?;
            let r = delta_vs_path_check(&basis_for(&dg, g.max_dim, order)?)?;
            Report { failed: !r.passed, body: to_value(&r) }
        }
        Command::SphereCheck { input, cell } => {
            let dg = load_digraph(&input)?;
            let cw = build_cw(&basis_for(&dg, g.max_dim, order)?)?;
            let cells: Vec<usize> = match cell {
                Some(c) => {
                    let id = c
                        .parse::<usize>()
                        .ok()
                        .filter(|&i| i < cw.cells.len())
                        .or_else(|| cw.cells.iter().find(|x| x.label == c).map(|x| x.id))
                        .ok_or_else(|| Failure::Input(format!("no cell `{c}`")))?;
                    vec![id]
                }
                None => cw.cells.iter().filter(|c| c.dim >= 1).map(|c| c.id).collect(),
            };
            let reports = cells.into_iter().map(|c| cell_boundary_sphere_check(&cw, c)).collect::<Result<Vec<_>, _>>()?;
            let passed = reports.iter().all(|r| r.passed);
            Report { failed: !passed, body: json!({"passed": passed, "cells": to_value(&reports)}) }
        }
        Command::Clique { input, max_size } => {
            let ug = load_graph(&input)?;
            let space = clique_space_bounded(&ug, max_size.unwrap_or(usize::MAX));
            let (_, cc) = clique_chain_complex(&ug);
            let mut body = space_summary(&space, g.coeff);
            body["clique_complex_cohomology"] = to_value(&cohomology(&cc, g.coeff));
            Report::ok(body)
        }
        Command::Cech { input, vertices } => {
            let ug = load_graph(&input)?;
            let space = finitetop::clique_space(&ug);
            let cover = match vertices {
                None => Cover::unit_balls(&ug, &space),
                Some(list) => {
                    let members = split_list(&list)
                        .into_iter()
                        .map(|v| {
                            let x = ug.vertex(v).ok_or_else(|| Failure::Input(format!("unknown vertex `{v}`")))?;
                            Ok(finitetop::unit_ball(&ug, &space, x))
                        })
                        .collect::<Result<Vec<_>, Failure>>()?;
                    Cover::new(&space, members)?
                }
            };
            let r = verify_good_cover(&space, &cover);
            Report { failed: r.good && !r.agree, body: to_value(&r) }
        }
        Command::Lefschetz { input, map, theory } => match theory {
            TheoryArg::Path => {
                let dg = load_digraph(&input)?;
                let f = morphism(&dg, &dg, &map)?;
                let r = lefschetz_path(&f)?;
                let traces_vanish = r.chain_traces.iter().all(|t| t == &pathcell::Int::from(0));
                Report { failed: r.fixed.is_none() && !traces_vanish, body: to_value(&r) }
            }
            TheoryArg::Clique => {
                let ug = load_graph(&input)?;
                let pairs = parse_pairs(&map)?;
                let mut perm = vec![None; ug.vertex_count()];
                for (a, b) in pairs {
                    let u = ug.vertex(a).ok_or_else(|| Failure::Input(format!("unknown vertex `{a}`")))?;
                    let v = ug.vertex(b).ok_or_else(|| Failure::Input(format!("unknown vertex `{b}`")))?;
                    perm[u as usize] = Some(v);
                }
                let perm: Vec<_> = perm.into_iter().collect::<Option<_>>().ok_or_else(|| input_err("map must cover every vertex"))?;
                let mut seen = perm.clone();
                seen.sort_unstable();
                seen.dedup();
                let preserves = ug.edges().all(|(u, v)| ug.has_edge(perm[u as usize], perm[v as usize]));
                if seen.len() != perm.len() || !preserves {
                    return Err(input_err("map is not a graph automorphism"));
                }
                let r = lefschetz_clique(&ug, &perm);
                debug_assert_eq!(r.theory, Theory::Clique);
                Report { failed: r.number != Rational::from_integer(0.into()) && r.fixed.is_none(), body: to_value(&r) }
            }
        },
        Command::Kunneth { g: a, h } => {
            let r = kunneth_check(&load_digraph(&a)?, &load_digraph(&h)?, g.max_dim)?;
            Report { failed: !r.passed, body: to_value(&r) }
        }
        Command::HomotopyCheck { g: a, h, f, g_map } => {
            let (src, tgt) = (load_digraph(&a)?, load_digraph(&h)?);
            let f = morphism(&src, &tgt, &f)?;
            let k = morphism(&src, &tgt, &g_map)?;
            let r = homotopy_check(&f, &k)?;
            Report { failed: r.one_step && r.same_on_cohomology == Some(false), body: to_value(&r) }
        }
        Command::PoincareCheck { input } => {
            let dg = load_digraph(&input)?;
            let b = basis_for(&dg, dg.vertex_count(), order)?;
            let r = finitetop::poincare_check(&b)?;
            Report { failed: !r.passed, body: to_value(&r) }
        }
        Command::Bench { family, sizes, k, repeats } => {
            if sizes.is_empty() || sizes.contains(&0) {
                return Err(input_err("sizes must be positive"));
            }
            Report::ok(to_value(&bench_quadratic(family, &sizes, k, repeats)?))
        }
        Command::Corpus { max_vertices, random, seed, density } => {
            if !(0.0..=1.0).contains(&density) {
                return Err(input_err("density must lie in [0, 1]"));
            }
            let graphs = match random {
                Some(count) => corpus::random_digraphs(count, max_vertices, density, seed),
                None => corpus::digraphs_up_to_iso(max_vertices),
            };
            let list: Vec<Value> = graphs.iter().map(graph_json).collect();
            Report::ok(json!({"count": list.len(), "digraphs": list}))
        }
    })
}

fn human(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if x.is_object() || (x.is_array() && x.as_array().is_some_and(|a| a.iter().any(|e| e.is_object()))) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    human(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {x}\n"));
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                out.push_str(&format!("{pad}- [{i}]\n"));
                human(x, indent + 1, out);
            }
        }
        _ => out.push_str(&format!("{pad}{v}\n")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let threads = match cli.global.threads {
        Some(n) => Some(n),
        None => match std::env::var("PATHCELL_THREADS") {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) => Some(n),
                Err(_) => {
                    eprintln!("error: PATHCELL_THREADS must be a positive integer, got `{v}`");
                    return ExitCode::from(1);
                }
            },
            Err(_) => None,
        },
    };
    if let Some(n) = threads {
        if n == 0 {
            eprintln!("error: thread count must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let output = cli.global.output;
    match run(cli.command, &cli.global) {
        Ok(report) => {
            match output {
                Output::Json => println!("{}", serde_json::to_string_pretty(&report.body).expect("json")),
                Output::Human => {
                    let mut s = String::new();
                    human(&report.body, 0, &mut s);
                    print!("{s}");
                }
            }
            if report.failed {
                eprintln!("counterexample: check failed");
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(m)) => {
            eprintln!("invariant failure: {m}");
            ExitCode::from(2)
        }
    }
}
