//! Small named digraphs and graphs used throughout the tests and the CLI.

use crate::digraph::{Digraph, Graph};

/// `I = (a -> b)`.
pub fn interval() -> Digraph {
    Digraph::lettered(2, &[(0, 1)])
}

/// `T`: `a -> b`, `b -> c`, `a -> c`.
pub fn transitive_triangle() -> Digraph {
    Digraph::lettered(3, &[(0, 1), (1, 2), (0, 2)])
}

/// `a -> b`, `a -> c`, `b -> d`, `c -> d`.
pub fn diamond() -> Digraph {
    Digraph::lettered(4, &[(0, 1), (0, 2), (1, 3), (2, 3)])
}

/// `a -> b`, `c -> b`, `c -> d`, `a -> d`.
pub fn alternating_square() -> Digraph {
    Digraph::lettered(4, &[(0, 1), (2, 1), (2, 3), (0, 3)])
}

/// The directed `n`-cycle `a -> b -> ... -> a`.
pub fn directed_cycle(n: usize) -> Digraph {
    assert!(n >= 2);
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Digraph::lettered(n, &edges)
}

/// The directed path on `n` vertices.
pub fn dipath(n: usize) -> Digraph {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    Digraph::lettered(n, &edges)
}

/// Directed 3-cycles chained through shared vertices: on `n` vertices, the
/// cycles `2i -> 2i+1 -> 2i+2 -> 2i` for every `2i + 2 < n`, and a final edge
/// when `n` is even.
pub fn dicycle_chain(n: usize) -> Digraph {
    let mut edges = Vec::new();
    let mut i = 0;
    while i + 2 < n {
        edges.extend([(i, i + 1), (i + 1, i + 2), (i + 2, i)]);
        i += 2;
    }
    if i + 1 < n {
        edges.push((i, i + 1));
    }
    Digraph::lettered(n, &edges)
}

/// Every ordered pair of distinct vertices is an edge.
pub fn complete_digraph(n: usize) -> Digraph {
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    Digraph::lettered(n, &edges)
}

/// Undirected complete graph on `1..=n`.
pub fn complete_graph(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
    Graph::numbered(n, &edges)
}

/// Undirected cycle `1 - 2 - ... - n - 1`.
pub fn cycle_graph(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..=n).map(|i| (i, i % n + 1)).collect();
    Graph::numbered(n, &edges)
}

/// Looks up a named example: `diamond`, `T`, `I`, `square` (`I□I`),
/// `alternating-square`, `cycleN`, `dipathN`, `dicycle-chainN`, `completeN`,
/// `C3xC3`.
pub fn by_name(name: &str) -> Option<Digraph> {
    let num = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok());
    Some(match name {
        "diamond" => diamond(),
        "T" | "triangle" => transitive_triangle(),
        "I" | "interval" => interval(),
        "square" => crate::digraph::cartesian_product(&interval(), &interval()),
        "alternating-square" => alternating_square(),
        "C3xC3" => crate::digraph::cartesian_product(&directed_cycle(3), &directed_cycle(3)),
        _ => {
            if let Some(n) = num("cycle").filter(|&n| n >= 2) {
                directed_cycle(n)
            } else if let Some(n) = num("dicycle-chain") {
                dicycle_chain(n)
            } else if let Some(n) = num("dipath") {
                dipath(n)
            } else {
                let n = num("complete")?;
                complete_digraph(n)
            }
        }
    })
}
