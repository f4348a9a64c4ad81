//! Digraphs, graphs, the edge-list formats, cartesian products, vertex maps
//! and one-step homotopies.
//!
//! Vertex identifiers are opaque strings. Internally a vertex is its index in
//! the lexicographically sorted identifier list, so index order and name order
//! agree and every enumeration built on top of it is reproducible.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GraphError, ParseError};
use crate::paths::PathVector;

pub type Vertex = u32;

/// A finite digraph without self-loops or parallel edges.
#[derive(Clone, PartialEq, Eq)]
pub struct Digraph {
    names: Vec<String>,
    out: Vec<Vec<Vertex>>,
    inn: Vec<Vec<Vertex>>,
    edge_count: usize,
}

impl Digraph {
    /// Builds a digraph from named vertices and edges. Vertices mentioned only
    /// by edges are rejected; see [`parse_digraph`] for the permissive reader.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String)>,
    {
        let mut names: Vec<String> = vertices.into_iter().map(Into::into).collect();
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateVertex(w[0].clone()));
            }
        }
        let index: HashMap<&str, Vertex> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i as Vertex)).collect();
        let mut pairs = Vec::new();
        for (a, b) in edges {
            let u = *index.get(a.as_str()).ok_or_else(|| GraphError::UnknownVertex(a.clone()))?;
            let v = *index.get(b.as_str()).ok_or_else(|| GraphError::UnknownVertex(b.clone()))?;
            pairs.push((u, v));
        }
        Self::from_indexed(names, pairs)
    }

    /// Builds from already sorted, distinct names and index pairs.
    pub fn from_indexed(names: Vec<String>, edges: Vec<(Vertex, Vertex)>) -> Result<Self, GraphError> {
        debug_assert!(names.windows(2).all(|w| w[0] < w[1]), "names must be sorted and distinct");
        let n = names.len();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::UnknownVertex(format!("#{}", u.max(v))));
            }
            if u == v {
                return Err(GraphError::SelfLoop(names[u as usize].clone()));
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateEdge(names[u as usize].clone(), names[v as usize].clone()));
            }
            out[u as usize].push(v);
            inn[v as usize].push(u);
        }
        for l in out.iter_mut().chain(inn.iter_mut()) {
            l.sort_unstable();
        }
        Ok(Digraph { names, out, inn, edge_count: seen.len() })
    }

    /// Vertices named as in [`letter_names`].
    pub fn lettered(n: usize, edges: &[(usize, usize)]) -> Self {
        let names = letter_names(n);
        Self::from_indexed(names, edges.iter().map(|&(u, v)| (u as Vertex, v as Vertex)).collect())
            .expect("valid lettered digraph")
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok().map(|i| i as Vertex)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.names.len()).map(|v| v as Vertex)
    }

    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.out[v as usize]
    }

    pub fn in_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.inn[v as usize]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.out[u as usize].binary_search(&v).is_ok()
    }

    /// Edges in canonical (lexicographic) order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.out.iter().enumerate().flat_map(|(u, vs)| vs.iter().map(move |&v| (u as Vertex, v)))
    }

    /// Induced-free subgraph on the given vertices and edges, renumbered.
    pub fn subgraph(&self, vertices: &BTreeSet<Vertex>, edges: &BTreeSet<(Vertex, Vertex)>) -> Digraph {
        let map: HashMap<Vertex, Vertex> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i as Vertex)).collect();
        let names = vertices.iter().map(|&v| self.names[v as usize].clone()).collect();
        let es = edges.iter().map(|(u, v)| (map[u], map[v])).collect();
        Digraph::from_indexed(names, es).expect("subgraph of a valid digraph")
    }

    /// Renders the `.dg` document for this digraph.
    pub fn to_dg(&self) -> String {
        let mut s = String::new();
        for v in self.vertices() {
            if self.out[v as usize].is_empty() && self.inn[v as usize].is_empty() {
                s.push_str(&format!("vertex {}\n", self.name(v)));
            }
        }
        for (u, v) in self.edges() {
            s.push_str(&format!("{} -> {}\n", self.name(u), self.name(v)));
        }
        s
    }

    /// True when all names are one character, so paths print as words.
    pub(crate) fn compact_names(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges().map(|(u, v)| format!("{}->{}", self.name(u), self.name(v))).collect();
        write!(f, "Digraph(V={:?}, E=[{}])", self.names, edges.join(", "))
    }
}

/// Serializable form used by the corpus and JSON outputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl From<&Digraph> for DigraphDoc {
    fn from(g: &Digraph) -> Self {
        DigraphDoc {
            vertices: g.names.clone(),
            edges: g.edges().map(|(u, v)| (g.name(u).to_string(), g.name(v).to_string())).collect(),
        }
    }
}

/// `a, b, c, ...` for up to 26 vertices, otherwise zero-padded `v000, v001, ...`
/// so that name order matches index order in both cases.
pub(crate) fn letter_names(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        let w = (n - 1).to_string().len();
        (0..n).map(|i| format!("v{i:0w$}")).collect()
    }
}

/// Undirected simple graph.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    adj: Vec<Vec<Vertex>>,
}

impl Graph {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String)>,
    {
        let mut names: Vec<String> = vertices.into_iter().map(Into::into).collect();
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateVertex(w[0].clone()));
            }
        }
        let index: HashMap<&str, Vertex> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i as Vertex)).collect();
        let mut pairs = Vec::new();
        for (a, b) in edges {
            let u = *index.get(a.as_str()).ok_or_else(|| GraphError::UnknownVertex(a.clone()))?;
            let v = *index.get(b.as_str()).ok_or_else(|| GraphError::UnknownVertex(b.clone()))?;
            pairs.push((u, v));
        }
        Self::from_indexed(names, pairs)
    }

    pub fn from_indexed(names: Vec<String>, edges: Vec<(Vertex, Vertex)>) -> Result<Self, GraphError> {
        let n = names.len();
        let mut adj = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::UnknownVertex(format!("#{}", u.max(v))));
            }
            if u == v {
                return Err(GraphError::SelfLoop(names[u as usize].clone()));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge(names[u as usize].clone(), names[v as usize].clone()));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
        }
        Ok(Graph { names, adj })
    }

    /// Vertices named `1, 2, ..., n`.
    pub fn numbered(n: usize, edges: &[(usize, usize)]) -> Self {
        let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        Graph::new(names, edges.iter().map(|&(u, v)| (u.to_string(), v.to_string()))).expect("valid numbered graph")
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok().map(|i| i as Vertex)
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().filter(move |&&v| v > u as Vertex).map(move |&v| (u as Vertex, v)))
    }

    pub fn to_ug(&self) -> String {
        let mut s = String::new();
        for v in 0..self.names.len() {
            if self.adj[v].is_empty() {
                s.push_str(&format!("vertex {}\n", self.names[v]));
            }
        }
        for (u, v) in self.edges() {
            s.push_str(&format!("{} -- {}\n", self.name(u), self.name(v)));
        }
        s
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges().map(|(u, v)| format!("{}--{}", self.name(u), self.name(v))).collect();
        write!(f, "Graph(V={:?}, E=[{}])", self.names, edges.join(", "))
    }
}

enum Line<'a> {
    Blank,
    Vertex(&'a str),
    Edge(&'a str, &'a str),
}

fn single_token(s: &str) -> Option<&str> {
    let t = s.trim();
    (!t.is_empty() && !t.contains(char::is_whitespace)).then_some(t)
}

fn parse_line<'a>(raw: &'a str, arrow: &str) -> Option<Line<'a>> {
    let line = raw.trim();
    if line.is_empty() || line.starts_with('#') {
        return Some(Line::Blank);
    }
    if let Some(rest) = line.strip_prefix("vertex") {
        if rest.starts_with(char::is_whitespace) {
            return single_token(rest).map(Line::Vertex);
        }
    }
    let (a, b) = line.split_once(arrow)?;
    Some(Line::Edge(single_token(a)?, single_token(b)?))
}

struct EdgeList {
    order: Vec<String>,
    edges: Vec<(String, String)>,
}

fn read_edge_list(text: &str, arrow: &str, undirected: bool) -> Result<EdgeList, ParseError> {
    let mut order = Vec::new();
    let mut known = HashSet::new();
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut note = |v: &str, order: &mut Vec<String>| {
        if known.insert(v.to_string()) {
            order.push(v.to_string());
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        match parse_line(raw, arrow) {
            None => return Err(ParseError::Malformed { line, text: raw.to_string() }),
            Some(Line::Blank) => {}
            Some(Line::Vertex(v)) => note(v, &mut order),
            Some(Line::Edge(a, b)) => {
                if a == b {
                    return Err(ParseError::SelfLoop { line, vertex: a.to_string() });
                }
                let key = if undirected && b < a { (b, a) } else { (a, b) };
                if !seen.insert((key.0.to_string(), key.1.to_string())) {
                    return Err(ParseError::DuplicateEdge { line, from: a.to_string(), to: b.to_string() });
                }
                note(a, &mut order);
                note(b, &mut order);
                edges.push((a.to_string(), b.to_string()));
            }
        }
    }
    Ok(EdgeList { order, edges })
}

/// Reads a `.dg` document: `# comment`, `u -> v`, `vertex u`.
pub fn parse_digraph(text: &str) -> Result<Digraph, ParseError> {
    let EdgeList { order, edges } = read_edge_list(text, "->", false)?;
    Ok(Digraph::new(order, edges).expect("reader guarantees a valid digraph"))
}

/// Reads a `.ug` document: `# comment`, `u -- v`, `vertex u`.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let EdgeList { order, edges } = read_edge_list(text, "--", true)?;
    Ok(Graph::new(order, edges).expect("reader guarantees a valid graph"))
}

/// A cartesian product together with the coordinates of each vertex.
#[derive(Clone, Debug)]
pub struct Product {
    pub digraph: Digraph,
    coords: Vec<(Vertex, Vertex)>,
    index: HashMap<(Vertex, Vertex), Vertex>,
}

impl Product {
    pub fn vertex_of(&self, x: Vertex, y: Vertex) -> Vertex {
        self.index[&(x, y)]
    }

    pub fn coordinates(&self, v: Vertex) -> (Vertex, Vertex) {
        self.coords[v as usize]
    }
}

/// Name of the product vertex `(x, y)`.
pub fn product_vertex_name(x: &str, y: &str) -> String {
    format!("({x},{y})")
}

/// The cartesian (box) product with coordinate bookkeeping.
pub fn product_with_coordinates(g: &Digraph, h: &Digraph) -> Product {
    let mut named: Vec<(String, (Vertex, Vertex))> = Vec::with_capacity(g.vertex_count() * h.vertex_count());
    for x in g.vertices() {
        for y in h.vertices() {
            named.push((product_vertex_name(g.name(x), h.name(y)), (x, y)));
        }
    }
    named.sort();
    let coords: Vec<(Vertex, Vertex)> = named.iter().map(|(_, c)| *c).collect();
    let index: HashMap<(Vertex, Vertex), Vertex> =
        coords.iter().enumerate().map(|(i, &c)| (c, i as Vertex)).collect();
    let mut edges = Vec::new();
    for (i, &(x, y)) in coords.iter().enumerate() {
        for &x2 in g.out_neighbors(x) {
            edges.push((i as Vertex, index[&(x2, y)]));
        }
        for &y2 in h.out_neighbors(y) {
            edges.push((i as Vertex, index[&(x, y2)]));
        }
    }
    let names = named.into_iter().map(|(n, _)| n).collect();
    let digraph = Digraph::from_indexed(names, edges).expect("product of valid digraphs");
    Product { digraph, coords, index }
}

/// `G □ H`: `(x,y) -> (x',y')` iff `x -> x'` and `y = y'`, or `x = x'` and `y -> y'`.
pub fn cartesian_product(g: &Digraph, h: &Digraph) -> Digraph {
    product_with_coordinates(g, h).digraph
}

/// The minimal subgraph in which every primitive component of `p` is allowed.
pub fn support_subgraph(g: &Digraph, p: &PathVector) -> Result<Digraph, crate::error::PathError> {
    let (vs, es) = support_sets(g, p)?;
    Ok(g.subgraph(&vs, &es))
}

pub(crate) fn support_sets(
    g: &Digraph,
    p: &PathVector,
) -> Result<(BTreeSet<Vertex>, BTreeSet<(Vertex, Vertex)>), crate::error::PathError> {
    let mut vs = BTreeSet::new();
    let mut es = BTreeSet::new();
    for (path, _) in p.terms() {
        for w in path.vertices().windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(crate::error::PathError::NotAllowed(path.display(g)));
            }
            es.insert((w[0], w[1]));
        }
        vs.extend(path.vertices().iter().copied());
    }
    Ok((vs, es))
}

/// Narrow maps are injective and edge preserving; broad maps may collapse an
/// edge to a single vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphismMode {
    Narrow,
    Broad,
}

/// A vertex map between two digraphs.
#[derive(Clone, Debug)]
pub struct DigraphMorphism<'a> {
    pub source: &'a Digraph,
    pub target: &'a Digraph,
    pub map: Vec<Vertex>,
    pub mode: MorphismMode,
}

/// First violation found by [`check_morphism`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum MorphismViolation {
    NotInjective { first: String, second: String, image: String },
    EdgeNotPreserved { from: String, to: String },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismViolation::NotInjective { first, second, image } => {
                write!(f, "`{first}` and `{second}` both map to `{image}`")
            }
            MorphismViolation::EdgeNotPreserved { from, to } => {
                write!(f, "edge `{from}` -> `{to}` maps to neither an edge nor a vertex")
            }
        }
    }
}

impl<'a> DigraphMorphism<'a> {
    pub fn new(source: &'a Digraph, target: &'a Digraph, map: Vec<Vertex>, mode: MorphismMode) -> Result<Self, GraphError> {
        if map.len() != source.vertex_count() {
            return Err(GraphError::MapLength { expected: source.vertex_count(), got: map.len() });
        }
        if let Some(&bad) = map.iter().find(|&&v| v as usize >= target.vertex_count()) {
            return Err(GraphError::UnknownVertex(format!("#{bad}")));
        }
        Ok(DigraphMorphism { source, target, map, mode })
    }

    /// Builds from `name -> name` pairs; every source vertex must be mapped.
    pub fn from_names(
        source: &'a Digraph,
        target: &'a Digraph,
        pairs: &[(&str, &str)],
        mode: MorphismMode,
    ) -> Result<Self, GraphError> {
        let mut map = vec![None; source.vertex_count()];
        for (a, b) in pairs {
            let u = source.vertex(a).ok_or_else(|| GraphError::UnknownVertex(a.to_string()))?;
            let v = target.vertex(b).ok_or_else(|| GraphError::UnknownVertex(b.to_string()))?;
            map[u as usize] = Some(v);
        }
        let map: Option<Vec<Vertex>> = map.into_iter().collect();
        let map = map.ok_or(GraphError::MapLength { expected: source.vertex_count(), got: pairs.len() })?;
        Self::new(source, target, map, mode)
    }

    pub fn identity(g: &'a Digraph) -> Self {
        DigraphMorphism { source: g, target: g, map: g.vertices().collect(), mode: MorphismMode::Narrow }
    }

    pub fn apply(&self, v: Vertex) -> Vertex {
        self.map[v as usize]
    }

    pub fn with_mode(&self, mode: MorphismMode) -> Self {
        DigraphMorphism { mode, ..self.clone() }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &DigraphMorphism<'a>) -> Self {
        let mode = if self.mode == MorphismMode::Narrow && first.mode == MorphismMode::Narrow {
            MorphismMode::Narrow
        } else {
            MorphismMode::Broad
        };
        DigraphMorphism {
            source: first.source,
            target: self.target,
            map: first.map.iter().map(|&v| self.apply(v)).collect(),
            mode,
        }
    }

    pub fn fixed_vertices(&self) -> Vec<Vertex> {
        self.source.vertices().filter(|&v| self.apply(v) == v).collect()
    }
}

/// Validates the mode-specific conditions and reports the first violation.
pub fn check_morphism(f: &DigraphMorphism<'_>) -> Result<(), MorphismViolation> {
    let (s, t) = (f.source, f.target);
    if f.mode == MorphismMode::Narrow {
        let mut seen: HashMap<Vertex, Vertex> = HashMap::new();
        for v in s.vertices() {
            if let Some(&prev) = seen.get(&f.apply(v)) {
                return Err(MorphismViolation::NotInjective {
                    first: s.name(prev).into(),
                    second: s.name(v).into(),
                    image: t.name(f.apply(v)).into(),
                });
            }
            seen.insert(f.apply(v), v);
        }
    }
    for (u, v) in s.edges() {
        let (a, b) = (f.apply(u), f.apply(v));
        let ok = t.has_edge(a, b) || (f.mode == MorphismMode::Broad && a == b);
        if !ok {
            return Err(MorphismViolation::EdgeNotPreserved { from: s.name(u).into(), to: s.name(v).into() });
        }
    }
    Ok(())
}

fn same_ends(f: &DigraphMorphism<'_>, g: &DigraphMorphism<'_>) -> bool {
    (std::ptr::eq(f.source, g.source) || f.source == g.source)
        && (std::ptr::eq(f.target, g.target) || f.target == g.target)
}

fn step_related(target: &Digraph, from: &[Vertex], to: &[Vertex]) -> bool {
    from.iter().zip(to).all(|(&a, &b)| a == b || target.has_edge(a, b))
}

/// True iff `F(v,0) = f(v)`, `F(v,1) = g(v)` is a broad digraph map on
/// `G □ I` for the line digraph `I = (0 -> 1)` or `I = (1 -> 0)`.
pub fn one_step_homotopic(f: &DigraphMorphism<'_>, g: &DigraphMorphism<'_>) -> Result<bool, GraphError> {
    if !same_ends(f, g) {
        return Err(GraphError::Mismatched);
    }
    for m in [f, g] {
        check_morphism(&m.with_mode(MorphismMode::Broad)).map_err(|v| GraphError::InvalidMorphism(v.to_string()))?;
    }
    Ok(step_related(f.target, &f.map, &g.map) || step_related(f.target, &g.map, &f.map))
}

/// Default vertex bound for the full homotopy search.
pub const HOMOTOPY_SEARCH_BOUND: usize = 8;

/// Whether `f` and `g` are joined by a chain of one-step homotopies through
/// broad maps. Breadth-first search over maps, limited to small digraphs.
pub fn homotopic(f: &DigraphMorphism<'_>, g: &DigraphMorphism<'_>, bound: usize) -> Result<bool, GraphError> {
    if !same_ends(f, g) {
        return Err(GraphError::Mismatched);
    }
    if f.source.vertex_count() > bound || f.target.vertex_count() > bound {
        return Err(GraphError::TooLarge { bound });
    }
    for m in [f, g] {
        check_morphism(&m.with_mode(MorphismMode::Broad)).map_err(|v| GraphError::InvalidMorphism(v.to_string()))?;
    }
    let (src, tgt) = (f.source, f.target);
    let mut seen: HashSet<Vec<Vertex>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(f.map.clone());
    queue.push_back(f.map.clone());
    while let Some(cur) = queue.pop_front() {
        if cur == g.map {
            return Ok(true);
        }
        for forward in [true, false] {
            let choices: Vec<Vec<Vertex>> = cur
                .iter()
                .map(|&a| {
                    let mut c = vec![a];
                    c.extend_from_slice(if forward { tgt.out_neighbors(a) } else { tgt.in_neighbors(a) });
                    c
                })
                .collect();
            for_each_choice(&choices, &mut |next| {
                if seen.contains(next) {
                    return;
                }
                let ok = src.edges().all(|(u, v)| {
                    let (a, b) = (next[u as usize], next[v as usize]);
                    a == b || tgt.has_edge(a, b)
                });
                if ok {
                    seen.insert(next.to_vec());
                    queue.push_back(next.to_vec());
                }
            });
        }
    }
    Ok(false)
}

fn for_each_choice(choices: &[Vec<Vertex>], visit: &mut dyn FnMut(&[Vertex])) {
    let mut idx = vec![0usize; choices.len()];
    let mut cur: Vec<Vertex> = choices.iter().map(|c| c[0]).collect();
    loop {
        visit(&cur);
        let mut i = 0;
        loop {
            if i == choices.len() {
                return;
            }
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                cur[i] = choices[i][idx[i]];
                break;
            }
            idx[i] = 0;
            cur[i] = choices[i][0];
            i += 1;
        }
    }
}

/// All vertex maps `source -> target` valid in the given mode, in
/// lexicographic order of the image vector.
pub fn all_morphisms<'a>(source: &'a Digraph, target: &'a Digraph, mode: MorphismMode) -> Vec<DigraphMorphism<'a>> {
    let n = source.vertex_count();
    let m = target.vertex_count() as Vertex;
    let mut out = Vec::new();
    if n == 0 {
        out.push(DigraphMorphism { source, target, map: vec![], mode });
        return out;
    }
    if m == 0 {
        return out;
    }
    let mut map = vec![0 as Vertex; n];
    // depth-first with edge checks against already-assigned vertices
    fn rec<'a>(
        i: usize,
        map: &mut Vec<Vertex>,
        m: Vertex,
        source: &'a Digraph,
        target: &'a Digraph,
        mode: MorphismMode,
        out: &mut Vec<DigraphMorphism<'a>>,
    ) {
        if i == map.len() {
            out.push(DigraphMorphism { source, target, map: map.clone(), mode });
            return;
        }
        for c in 0..m {
            if mode == MorphismMode::Narrow && map[..i].contains(&c) {
                continue;
            }
            map[i] = c;
            let u = i as Vertex;
            let ok = source.out_neighbors(u).iter().filter(|&&w| (w as usize) < i).all(|&w| {
                let b = map[w as usize];
                target.has_edge(c, b) || (mode == MorphismMode::Broad && c == b)
            }) && source.in_neighbors(u).iter().filter(|&&w| (w as usize) < i).all(|&w| {
                let a = map[w as usize];
                target.has_edge(a, c) || (mode == MorphismMode::Broad && a == c)
            });
            if ok {
                rec(i + 1, map, m, source, target, mode, out);
            }
        }
    }
    rec(0, &mut map, m, source, target, mode, &mut out);
    out
}

/// Undirected relabelings that preserve adjacency.
pub fn graph_automorphisms(g: &Graph) -> Vec<Vec<Vertex>> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    let mut map = vec![0 as Vertex; n];
    let mut used = vec![false; n];
    fn rec(i: usize, g: &Graph, map: &mut Vec<Vertex>, used: &mut Vec<bool>, out: &mut Vec<Vec<Vertex>>) {
        let n = map.len();
        if i == n {
            out.push(map.clone());
            return;
        }
        for c in 0..n {
            if used[c] || g.neighbors(i as Vertex).len() != g.neighbors(c as Vertex).len() {
                continue;
            }
            let ok = (0..i).all(|j| g.has_edge(i as Vertex, j as Vertex) == g.has_edge(c as Vertex, map[j]));
            if ok {
                used[c] = true;
                map[i] = c as Vertex;
                rec(i + 1, g, map, used, out);
                used[c] = false;
            }
        }
    }
    rec(0, g, &mut map, &mut used, &mut out);
    out
}

/// Edge multiset counted per vertex pair, for quick structural equality in
/// tests and reports.
pub fn degree_profile(g: &Digraph) -> BTreeMap<(usize, usize), usize> {
    let mut m = BTreeMap::new();
    for v in g.vertices() {
        *m.entry((g.out_neighbors(v).len(), g.in_neighbors(v).len())).or_insert(0) += 1;
    }
    m
}
