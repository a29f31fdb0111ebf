//! Multigraph representation with loops and parallel edges, terminal
//! management, and the surgeries gadget constructions are built from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected multigraph over dense vertex ids `0..n`. Parallel edges and
/// loops are allowed; the edge list is kept canonically sorted with each
/// pair stored as (min, max).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiGraph {
    pub n: usize,
    pub edges: Vec<(u32, u32)>,
}

/// Distinguished vertex pair (s, t) of a gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terminals {
    pub s: u32,
    pub t: u32,
}

impl Terminals {
    pub fn new(s: u32, t: u32) -> Self {
        assert_ne!(s, t, "terminals must be distinct");
        Terminals { s, t }
    }
}

impl MultiGraph {
    pub fn new(n: usize, mut edges: Vec<(u32, u32)>) -> Self {
        for e in edges.iter_mut() {
            assert!((e.0 as usize) < n && (e.1 as usize) < n, "edge endpoint out of range");
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        MultiGraph { n, edges }
    }

    pub fn single_edge() -> (MultiGraph, Terminals) {
        (MultiGraph::new(2, vec![(0, 1)]), Terminals::new(0, 1))
    }

    pub fn path(len: usize) -> (MultiGraph, Terminals) {
        let edges = (0..len).map(|i| (i as u32, i as u32 + 1)).collect();
        (MultiGraph::new(len + 1, edges), Terminals::new(0, len as u32))
    }

    pub fn cycle(len: usize) -> MultiGraph {
        let edges = (0..len).map(|i| (i as u32, ((i + 1) % len) as u32)).collect();
        MultiGraph::new(len, edges)
    }

    pub fn complete(n: usize) -> MultiGraph {
        let mut edges = Vec::new();
        for i in 0..n as u32 {
            for j in i + 1..n as u32 {
                edges.push((i, j));
            }
        }
        MultiGraph::new(n, edges)
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|&(u, v)| u == v)
    }

    pub fn degree(&self, v: u32) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    /// Maximum incident edge count over vertices; loops count twice.
    pub fn max_degree(&self) -> usize {
        (0..self.n as u32).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Adjacency with edge indices, per vertex sorted by canonical edge index.
    pub fn incidence(&self) -> Vec<Vec<(u32, usize)>> {
        let mut inc = vec![Vec::new(); self.n];
        for (idx, &(u, v)) in self.edges.iter().enumerate() {
            inc[u as usize].push((v, idx));
            if u != v {
                inc[v as usize].push((u, idx));
            }
        }
        inc
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let inc = self.incidence();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(u, _) in &inc[v] {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    count += 1;
                    stack.push(u as usize);
                }
            }
        }
        count == self.n
    }

    pub fn components(&self) -> Vec<Vec<u32>> {
        let inc = self.incidence();
        let mut comp = vec![usize::MAX; self.n];
        let mut out: Vec<Vec<u32>> = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start as u32];
            comp[start] = id;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &(u, _) in &inc[v] {
                    if comp[u as usize] == usize::MAX {
                        comp[u as usize] = id;
                        members.push(u);
                        stack.push(u as usize);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Subgraph induced on `verts` with dense relabeling in the given order.
    pub fn induced(&self, verts: &[u32]) -> MultiGraph {
        let mut map = vec![u32::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            map[v as usize] = i as u32;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| map[u as usize] != u32::MAX && map[v as usize] != u32::MAX)
            .map(|&(u, v)| (map[u as usize], map[v as usize]))
            .collect();
        MultiGraph::new(verts.len(), edges)
    }

    /// Minimal edge list over all vertex relabelings; usable as an
    /// isomorphism certificate for small graphs only.
    pub fn canonical_label(&self) -> Vec<(u32, u32)> {
        assert!(self.n <= 9, "canonical_label is factorial in n");
        let mut perm: Vec<u32> = (0..self.n as u32).collect();
        let mut best: Option<Vec<(u32, u32)>> = None;
        permute(&mut perm, 0, &mut |p| {
            let mut relabeled: Vec<(u32, u32)> = self
                .edges
                .iter()
                .map(|&(u, v)| {
                    let (a, b) = (p[u as usize], p[v as usize]);
                    (a.min(b), a.max(b))
                })
                .collect();
            relabeled.sort_unstable();
            if best.as_ref().is_none_or(|b| relabeled < *b) {
                best = Some(relabeled);
            }
        });
        best.unwrap_or_default()
    }
}

fn permute(p: &mut Vec<u32>, k: usize, f: &mut impl FnMut(&[u32])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Disjoint union with t1 = s2 merged; returned terminals (s1, t2).
pub fn series_compose(
    g1: &MultiGraph,
    t1: Terminals,
    g2: &MultiGraph,
    t2: Terminals,
) -> (MultiGraph, Terminals) {
    // vertices: all of g1, then g2 with s2 mapped onto t1
    let map2 = |v: u32| -> u32 {
        if v == t2.s {
            t1.t
        } else if v < t2.s {
            g1.n as u32 + v
        } else {
            g1.n as u32 + v - 1
        }
    };
    let mut edges = g1.edges.clone();
    edges.extend(g2.edges.iter().map(|&(u, v)| (map2(u), map2(v))));
    let g = MultiGraph::new(g1.n + g2.n - 1, edges);
    (g, Terminals::new(t1.s, map2(t2.t)))
}

/// Union with s1 = s2 and t1 = t2 merged; parallel edges preserved.
pub fn parallel_compose(
    g1: &MultiGraph,
    t1: Terminals,
    g2: &MultiGraph,
    t2: Terminals,
) -> (MultiGraph, Terminals) {
    let mut map2 = vec![u32::MAX; g2.n];
    map2[t2.s as usize] = t1.s;
    map2[t2.t as usize] = t1.t;
    let mut next = g1.n as u32;
    for v in 0..g2.n as u32 {
        if map2[v as usize] == u32::MAX {
            map2[v as usize] = next;
            next += 1;
        }
    }
    let mut edges = g1.edges.clone();
    edges.extend(g2.edges.iter().map(|&(u, v)| (map2[u as usize], map2[v as usize])));
    let g = MultiGraph::new(next as usize, edges);
    (g, t1)
}

/// Removes edge `e` and glues a fresh copy of `h`, identifying its terminals
/// with the removed edge's endpoints.
pub fn substitute_edge(
    g: &MultiGraph,
    e: usize,
    h: &MultiGraph,
    th: Terminals,
) -> MultiGraph {
    assert!(e < g.edges.len(), "edge index out of range");
    let (a, b) = g.edges[e];
    let mut edges: Vec<(u32, u32)> = g
        .edges
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != e)
        .map(|(_, &p)| p)
        .collect();
    let mut maph = vec![u32::MAX; h.n];
    maph[th.s as usize] = a;
    maph[th.t as usize] = b;
    let mut next = g.n as u32;
    for v in 0..h.n as u32 {
        if maph[v as usize] == u32::MAX {
            maph[v as usize] = next;
            next += 1;
        }
    }
    edges.extend(h.edges.iter().map(|&(u, v)| (maph[u as usize], maph[v as usize])));
    MultiGraph::new(next as usize, edges)
}

/// Text format: first line "n m", then m lines "u v".
pub fn parse_graph(text: &str) -> Result<MultiGraph> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (lineno, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(Error::Parse { line: lineno + 1, msg: "expected 'n m' header".into() });
    }
    let n: usize = parts[0]
        .parse()
        .map_err(|_| Error::Parse { line: lineno + 1, msg: "bad vertex count".into() })?;
    let m: usize = parts[1]
        .parse()
        .map_err(|_| Error::Parse { line: lineno + 1, msg: "bad edge count".into() })?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (lineno, line) = lines
            .next()
            .ok_or(Error::Parse { line: 0, msg: format!("expected {m} edge lines") })?;
        let ps: Vec<&str> = line.split_whitespace().collect();
        if ps.len() != 2 {
            return Err(Error::Parse { line: lineno + 1, msg: "expected 'u v'".into() });
        }
        let u: u32 = ps[0]
            .parse()
            .map_err(|_| Error::Parse { line: lineno + 1, msg: "bad endpoint".into() })?;
        let v: u32 = ps[1]
            .parse()
            .map_err(|_| Error::Parse { line: lineno + 1, msg: "bad endpoint".into() })?;
        if (u as usize) >= n || (v as usize) >= n {
            return Err(Error::Parse { line: lineno + 1, msg: "endpoint out of range".into() });
        }
        edges.push((u, v));
    }
    Ok(MultiGraph::new(n, edges))
}

pub fn emit_graph(g: &MultiGraph) -> String {
    let mut out = format!("{} {}\n", g.n, g.edges.len());
    for &(u, v) in &g.edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
