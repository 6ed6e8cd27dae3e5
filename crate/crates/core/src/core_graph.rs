//! Rooted, edge-labelled core graphs of finitely generated subgroups.
//!
//! A graph is stored as a list of positively oriented edges `(origin, label,
//! target)`; the inverse edge is implied. Once folded, a graph also carries a
//! transition table with `2n` slots per vertex, ordered `(1,+), (1,-), (2,+),
//! …`, and its vertices are numbered by breadth-first traversal from the
//! base in that slot order. That numbering is canonical for rooted labelled
//! graphs, so folded graphs compare equal exactly when they are isomorphic.

use std::collections::VecDeque;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{same_rank, Error, Result};
use crate::words::{Alphabet, Letter, Word};

pub(crate) const NONE: u32 = u32::MAX;

static DEGREE_FORMULA_CHECKS: AtomicU64 = AtomicU64::new(0);

/// Number of times [`StallingsGraph::rank`] has cross-checked the Betti
/// number against the degree-sum formula in this process.
pub fn degree_formula_checks() -> u64 {
    DEGREE_FORMULA_CHECKS.load(Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub origin: usize,
    /// Generator index `1..=n`.
    pub label: usize,
    pub target: usize,
}

/// Canonical byte encoding of a folded rooted graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Graph JSON exchange format: `{"n": …, "base": …, "edges": [[o, label, t], …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub base: usize,
    pub edges: Vec<[usize; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StallingsGraph {
    alphabet: Alphabet,
    base: usize,
    vertex_count: usize,
    edges: Vec<Edge>,
    folded: bool,
    trimmed: bool,
    table: Vec<u32>,
}

impl StallingsGraph {
    /// Raw (unfolded) graph from an explicit edge list.
    pub fn from_edges(
        alphabet: Alphabet,
        vertex_count: usize,
        base: usize,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        if base >= vertex_count {
            return Err(Error::InvalidInput(format!(
                "base {base} is not one of {vertex_count} vertices"
            )));
        }
        for e in &edges {
            if e.origin >= vertex_count || e.target >= vertex_count {
                return Err(Error::InvalidInput(format!(
                    "edge {e:?} leaves the vertex set"
                )));
            }
            if e.label == 0 || e.label > alphabet.rank() {
                return Err(Error::UnknownGenerator {
                    token: format!("x{}", e.label),
                    rank: alphabet.rank(),
                });
            }
        }
        Ok(StallingsGraph {
            alphabet,
            base,
            vertex_count,
            edges,
            folded: false,
            trimmed: false,
            table: Vec::new(),
        })
    }

    /// Wedge of one loop per generator, each spelling its word. Empty words
    /// contribute nothing.
    pub fn bouquet(gens: &[Word], alphabet: Alphabet) -> Result<Self> {
        let mut vertex_count = 1;
        let mut edges = Vec::new();
        for g in gens {
            same_rank(alphabet.rank(), g.alphabet().rank())?;
            let letters = g.letters();
            let mut at = 0;
            for (i, &l) in letters.iter().enumerate() {
                let next = if i + 1 == letters.len() {
                    0
                } else {
                    vertex_count += 1;
                    vertex_count - 1
                };
                edges.push(oriented(at, l, next));
                at = next;
            }
        }
        StallingsGraph::from_edges(alphabet, vertex_count, 0, edges)
    }

    /// The trivial subgroup: a lone base vertex.
    pub fn trivial(alphabet: Alphabet) -> Self {
        StallingsGraph::from_table(alphabet, 1, 0, vec![NONE; 2 * alphabet.rank()]).mark_trimmed()
    }

    /// The whole group `F_n`: `n` loops at the base.
    pub fn full(alphabet: Alphabet) -> Self {
        let table = (0..2 * alphabet.rank()).map(|_| 0).collect();
        StallingsGraph::from_table(alphabet, 1, 0, table).mark_trimmed()
    }

    /// Folded, trimmed core graph of `⟨gens⟩`.
    pub fn subgroup_graph(gens: &[Word], alphabet: Alphabet) -> Result<Self> {
        Ok(StallingsGraph::bouquet(gens, alphabet)?.fold().trim())
    }

    /// Builds a folded graph from a deterministic transition table and
    /// renumbers it canonically. Vertices not reachable from `base` are dropped.
    pub(crate) fn from_table(
        alphabet: Alphabet,
        vertex_count: usize,
        base: usize,
        table: Vec<u32>,
    ) -> Self {
        let slots = 2 * alphabet.rank();
        debug_assert_eq!(table.len(), vertex_count * slots);
        let mut order = vec![NONE; vertex_count];
        let mut visit = Vec::with_capacity(vertex_count);
        order[base] = 0;
        visit.push(base);
        let mut head = 0;
        while head < visit.len() {
            let v = visit[head];
            head += 1;
            for &t in &table[v * slots..(v + 1) * slots] {
                if t != NONE && order[t as usize] == NONE {
                    order[t as usize] = visit.len() as u32;
                    visit.push(t as usize);
                }
            }
        }
        let count = visit.len();
        let mut canon = vec![NONE; count * slots];
        let mut edges = Vec::new();
        for (new_v, &old_v) in visit.iter().enumerate() {
            for s in 0..slots {
                let t = table[old_v * slots + s];
                if t == NONE {
                    continue;
                }
                let new_t = order[t as usize];
                canon[new_v * slots + s] = new_t;
                if s % 2 == 0 {
                    edges.push(Edge {
                        origin: new_v,
                        label: s / 2 + 1,
                        target: new_t as usize,
                    });
                }
            }
        }
        StallingsGraph {
            alphabet,
            base: 0,
            vertex_count: count,
            edges,
            folded: true,
            trimmed: false,
            table: canon,
        }
    }

    fn mark_trimmed(mut self) -> Self {
        self.trimmed = true;
        self
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_folded(&self) -> bool {
        self.folded
    }

    pub fn is_trimmed(&self) -> bool {
        self.trimmed
    }

    pub(crate) fn table(&self) -> &[u32] {
        debug_assert!(self.folded);
        &self.table
    }

    /// Target of the edge leaving `v` that reads `letter`, on folded graphs.
    pub fn step(&self, v: usize, letter: Letter) -> Option<usize> {
        let t = self.table[v * 2 * self.alphabet.rank() + letter.slot()];
        (t != NONE).then_some(t as usize)
    }

    /// Follows `letters` from `start`; `None` if the path leaves the graph.
    pub fn trace(&self, start: usize, letters: &[Letter]) -> Option<usize> {
        letters.iter().try_fold(start, |v, &l| self.step(v, l))
    }

    /// Merges label-clashing edges until the graph is deterministic.
    ///
    /// Vertices are merged through a disjoint-set forest driven by a
    /// worklist of clashing pairs. The result is canonically numbered and
    /// restricted to the component of the base.
    pub fn fold(&self) -> Self {
        if self.folded {
            return self.clone();
        }
        let slots = 2 * self.alphabet.rank();
        let v_count = self.vertex_count;
        let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); v_count];
        for e in &self.edges {
            let s = 2 * (e.label - 1) as u32;
            adj[e.origin].push((s, e.target as u32));
            adj[e.target].push((s + 1, e.origin as u32));
        }
        let mut sets = DisjointSet::new(v_count);
        let mut pending = Vec::new();
        let mut first = vec![NONE; slots];
        for v in 0..v_count {
            collect_clashes(v, &mut adj, &mut sets, &mut first, &mut pending);
        }
        while let Some((a, b)) = pending.pop() {
            let (a, b) = (sets.find(a), sets.find(b));
            if a == b {
                continue;
            }
            let keep = sets.union(a, b);
            let gone = if keep == a { b } else { a };
            let moved = std::mem::take(&mut adj[gone]);
            adj[keep].extend(moved);
            collect_clashes(keep, &mut adj, &mut sets, &mut first, &mut pending);
        }
        let mut table = vec![NONE; v_count * slots];
        for v in 0..v_count {
            if sets.find(v) != v {
                continue;
            }
            for &(s, t) in &adj[v] {
                table[v * slots + s as usize] = sets.find(t as usize) as u32;
            }
        }
        let base = sets.find(self.base);
        StallingsGraph::from_table(self.alphabet, v_count, base, table)
    }

    /// Iteratively removes non-base vertices of degree at most one.
    pub fn trim(&self) -> Self {
        if !self.folded {
            return self.fold().trim();
        }
        if self.trimmed {
            return self.clone();
        }
        let slots = 2 * self.alphabet.rank();
        let mut table = self.table.clone();
        let mut degree: Vec<usize> = (0..self.vertex_count)
            .map(|v| {
                table[v * slots..(v + 1) * slots]
                    .iter()
                    .filter(|&&t| t != NONE)
                    .count()
            })
            .collect();
        let mut queue: Vec<usize> = (0..self.vertex_count)
            .filter(|&v| v != self.base && degree[v] <= 1)
            .collect();
        while let Some(v) = queue.pop() {
            for s in 0..slots {
                let t = table[v * slots + s];
                if t == NONE {
                    continue;
                }
                let t = t as usize;
                table[v * slots + s] = NONE;
                table[t * slots + (s ^ 1)] = NONE;
                if t != v {
                    degree[t] -= 1;
                    if t != self.base && degree[t] == 1 {
                        queue.push(t);
                    }
                }
            }
            degree[v] = 0;
        }
        StallingsGraph::from_table(self.alphabet, self.vertex_count, self.base, table)
            .mark_trimmed()
    }

    /// Total degree of every vertex; a loop counts twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for e in &self.edges {
            deg[e.origin] += 1;
            deg[e.target] += 1;
        }
        deg
    }

    /// First Betti number `|E| - |V| + 1`.
    ///
    /// When every vertex has degree at least two, this is checked against
    /// the degree-sum form `1 + Σ (deg v - 2) / 2`.
    pub fn rank(&self) -> usize {
        let betti = self.edges.len() + 1 - self.vertex_count;
        if let Some(by_degrees) = self.degree_sum_rank() {
            DEGREE_FORMULA_CHECKS.fetch_add(1, Ordering::Relaxed);
            assert_eq!(
                betti, by_degrees,
                "Betti number disagrees with the degree-sum formula"
            );
        }
        betti
    }

    /// `1 + Σ_v (deg v - 2) / 2`, defined only when all degrees are at least 2.
    pub fn degree_sum_rank(&self) -> Option<usize> {
        let deg = self.degrees();
        if deg.iter().any(|&d| d < 2) {
            return None;
        }
        let excess: usize = deg.iter().map(|d| d - 2).sum();
        debug_assert!(excess.is_multiple_of(2));
        Some(1 + excess / 2)
    }

    /// Membership test: does `w` trace a closed path at the base?
    pub fn contains(&self, w: &Word) -> Result<bool> {
        same_rank(self.alphabet.rank(), w.alphabet().rank())?;
        if !self.folded {
            return self.fold().contains(w);
        }
        Ok(self.trace(self.base, w.letters()) == Some(self.base))
    }

    /// Words spelling the breadth-first spanning-tree path from the base to
    /// each vertex, plus a flag per edge telling whether it is a tree edge.
    pub(crate) fn spanning_tree(&self) -> (Vec<Word>, Vec<bool>) {
        let n = self.alphabet.rank();
        let mut paths: Vec<Option<Word>> = vec![None; self.vertex_count];
        let mut tree_slot = vec![false; self.vertex_count * n];
        paths[self.base] = Some(Word::identity(self.alphabet));
        let mut queue = VecDeque::from([self.base]);
        while let Some(v) = queue.pop_front() {
            for g in 1..=n {
                for l in [Letter::pos(g), Letter::neg(g)] {
                    let Some(t) = self.step(v, l) else { continue };
                    if paths[t].is_some() {
                        continue;
                    }
                    let p = paths[v].as_ref().unwrap();
                    paths[t] = Some(p.mul_same(&Word::new(self.alphabet, &[l]).unwrap()));
                    let origin = if l.is_inverse() { t } else { v };
                    tree_slot[origin * n + g - 1] = true;
                    queue.push_back(t);
                }
            }
        }
        let tree = self
            .edges
            .iter()
            .map(|e| tree_slot[e.origin * n + e.label - 1])
            .collect();
        (paths.into_iter().map(Option::unwrap).collect(), tree)
    }

    /// Word read around the cycle closed by `edge` through the tree paths.
    pub(crate) fn edge_word(&self, paths: &[Word], edge: &Edge) -> Word {
        paths[edge.origin]
            .mul_same(&Word::generator(self.alphabet, edge.label))
            .mul_same(&paths[edge.target].inverse())
    }

    /// Free basis read off a spanning tree: one word per non-tree edge.
    pub fn basis(&self) -> Vec<Word> {
        if !self.folded {
            return self.fold().trim().basis();
        }
        let (paths, tree) = self.spanning_tree();
        self.edges
            .iter()
            .zip(tree)
            .filter(|(_, in_tree)| !in_tree)
            .map(|(e, _)| self.edge_word(&paths, e))
            .collect()
    }

    /// Index in `F_n` when every slot of every vertex is filled.
    pub fn finite_index(&self) -> Option<usize> {
        if !self.folded {
            return self.fold().trim().finite_index();
        }
        self.table
            .iter()
            .all(|&t| t != NONE)
            .then_some(self.vertex_count)
    }

    /// Canonical code of a folded graph: rank, vertex count, then the
    /// forward transition table in canonical numbering (0 = no edge).
    pub fn canonical_code(&self) -> CanonicalCode {
        if !self.folded {
            return self.fold().trim().canonical_code();
        }
        let n = self.alphabet.rank();
        let mut bytes = Vec::with_capacity(8 + 4 * n * self.vertex_count);
        bytes.extend_from_slice(&(n as u32).to_le_bytes());
        bytes.extend_from_slice(&(self.vertex_count as u32).to_le_bytes());
        for v in 0..self.vertex_count {
            for g in 0..n {
                let t = self.table[v * 2 * n + 2 * g];
                let code = if t == NONE { 0 } else { t + 1 };
                bytes.extend_from_slice(&code.to_le_bytes());
            }
        }
        CanonicalCode(bytes)
    }

    /// Rebuilds the folded graph a canonical code was taken from.
    pub fn from_code(code: &CanonicalCode) -> Result<Self> {
        let bad = |why: &str| Error::InvalidInput(format!("canonical code: {why}"));
        let words: Vec<u32> = code
            .0
            .chunks(4)
            .map(|c| {
                c.try_into()
                    .map(u32::from_le_bytes)
                    .map_err(|_| bad("length is not a multiple of 4"))
            })
            .collect::<Result<_>>()?;
        if words.len() < 2 {
            return Err(bad("missing header"));
        }
        let alphabet = Alphabet::new(words[0] as usize)?;
        let (n, count) = (words[0] as usize, words[1] as usize);
        if count == 0 || words.len() != 2 + n * count {
            return Err(bad("size does not match the header"));
        }
        let slots = 2 * n;
        let mut table = vec![NONE; count * slots];
        for v in 0..count {
            for g in 0..n {
                let t = words[2 + v * n + g];
                if t == 0 {
                    continue;
                }
                let t = t as usize - 1;
                if t >= count || table[t * slots + 2 * g + 1] != NONE {
                    return Err(bad("transition table is not a partial injection"));
                }
                table[v * slots + 2 * g] = t as u32;
                table[t * slots + 2 * g + 1] = v as u32;
            }
        }
        Ok(StallingsGraph::from_table(alphabet, count, 0, table))
    }

    /// Graphviz description; the base is drawn as a double circle.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph stallings {\n");
        for v in 0..self.vertex_count {
            let shape = if v == self.base {
                "doublecircle"
            } else {
                "circle"
            };
            out.push_str(&format!("  {v} [shape={shape}];\n"));
        }
        let mut edges = self.edges.clone();
        if !self.folded {
            edges.sort();
        }
        for e in &edges {
            out.push_str(&format!(
                "  {} -> {} [label=\"x{}\"];\n",
                e.origin, e.target, e.label
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.alphabet.rank(),
            base: self.base,
            edges: self
                .edges
                .iter()
                .map(|e| [e.origin, e.label, e.target])
                .collect(),
        }
    }

    /// Imports graph JSON, then folds and trims.
    pub fn from_json(json: &GraphJson) -> Result<Self> {
        let alphabet = Alphabet::new(json.n)?;
        let vertex_count = json
            .edges
            .iter()
            .flat_map(|e| [e[0], e[2]])
            .chain([json.base])
            .max()
            .unwrap_or(0)
            + 1;
        let edges = json
            .edges
            .iter()
            .map(|e| Edge {
                origin: e[0],
                label: e[1],
                target: e[2],
            })
            .collect();
        Ok(
            StallingsGraph::from_edges(alphabet, vertex_count, json.base, edges)?
                .fold()
                .trim(),
        )
    }
}

impl StallingsGraph {
    /// Reads back the output of [`StallingsGraph::to_dot`], then folds and
    /// trims. The alphabet is not recorded in the DOT text.
    pub fn from_dot(text: &str, alphabet: Alphabet) -> Result<Self> {
        let mut base = None;
        let mut edges = Vec::new();
        let mut vertex_count = 0;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim().trim_end_matches(';');
            let bad =
                || Error::Syntax(format!("line {}: cannot read `{}`", lineno + 1, raw.trim()));
            if line.is_empty() || line.starts_with("digraph") || line == "}" {
                continue;
            }
            let (head, attrs) = line.split_once('[').ok_or_else(bad)?;
            let attrs = attrs.trim_end_matches(']');
            if let Some((o, t)) = head.split_once("->") {
                let origin: usize = o.trim().parse().map_err(|_| bad())?;
                let target: usize = t.trim().parse().map_err(|_| bad())?;
                let label = attrs
                    .trim()
                    .strip_prefix("label=\"x")
                    .and_then(|s| s.strip_suffix('"'))
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(bad)?;
                vertex_count = vertex_count.max(origin + 1).max(target + 1);
                edges.push(Edge {
                    origin,
                    label,
                    target,
                });
            } else {
                let v: usize = head.trim().parse().map_err(|_| bad())?;
                vertex_count = vertex_count.max(v + 1);
                if attrs.contains("doublecircle") {
                    base = Some(v);
                }
            }
        }
        let base =
            base.ok_or_else(|| Error::Syntax("no base vertex (doublecircle) found".into()))?;
        Ok(
            StallingsGraph::from_edges(alphabet, vertex_count, base, edges)?
                .fold()
                .trim(),
        )
    }
}

fn oriented(from: usize, l: Letter, to: usize) -> Edge {
    if l.is_inverse() {
        Edge {
            origin: to,
            label: l.gen(),
            target: from,
        }
    } else {
        Edge {
            origin: from,
            label: l.gen(),
            target: to,
        }
    }
}

/// Compacts the adjacency list of `v` to one entry per slot and queues every
/// pair of distinct targets sharing a slot.
fn collect_clashes(
    v: usize,
    adj: &mut [Vec<(u32, u32)>],
    sets: &mut DisjointSet,
    first: &mut [u32],
    pending: &mut Vec<(usize, usize)>,
) {
    first.iter_mut().for_each(|f| *f = NONE);
    let mut kept = Vec::with_capacity(adj[v].len());
    for &(s, t) in &adj[v] {
        let t = sets.find(t as usize) as u32;
        match first[s as usize] {
            NONE => {
                first[s as usize] = t;
                kept.push((s, t));
            }
            f if f != t => pending.push((f as usize, t as usize)),
            _ => {}
        }
    }
    adj[v] = kept;
}

#[derive(Clone, Debug)]
pub(crate) struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Unites two roots and returns the surviving root.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> usize {
        let (big, small) = if self.size[a] >= self.size[b] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        big
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: usize) -> Alphabet {
        Alphabet::new(n).unwrap()
    }

    fn words(texts: &[&str], n: usize) -> Vec<Word> {
        texts
            .iter()
            .map(|t| Word::parse(t, a(n)).unwrap())
            .collect()
    }

    fn sg(texts: &[&str], n: usize) -> StallingsGraph {
        StallingsGraph::subgroup_graph(&words(texts, n), a(n)).unwrap()
    }

    #[test]
    fn bouquet_examples() {
        let g = StallingsGraph::bouquet(&words(&["a"], 1), a(1)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 1));
        let g = StallingsGraph::bouquet(&[], a(2)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        let g = StallingsGraph::bouquet(&words(&["ab"], 2), a(2)).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(
            g.edges(),
            &[
                Edge {
                    origin: 0,
                    label: 1,
                    target: 1
                },
                Edge {
                    origin: 1,
                    label: 2,
                    target: 0
                }
            ]
        );
        assert!(matches!(
            StallingsGraph::bouquet(&words(&["a"], 3), a(2)),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn fold_examples() {
        let g = StallingsGraph::bouquet(&words(&["a", "a"], 1), a(1))
            .unwrap()
            .fold();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 1));
        assert_eq!(g.fold(), g);
        assert_eq!(sg(&["aa", "aaa"], 1), StallingsGraph::full(a(1)));
    }

    #[test]
    fn trim_examples() {
        let g = sg(&["abA"], 2);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(
            g.edges(),
            &[
                Edge {
                    origin: 0,
                    label: 1,
                    target: 1
                },
                Edge {
                    origin: 1,
                    label: 2,
                    target: 1
                }
            ]
        );
        assert_eq!(sg(&[], 2), StallingsGraph::trivial(a(2)));
        assert_eq!(sg(&["abBAa"], 2), sg(&["a"], 2));
        // an unfolded stem that only trimming removes
        let raw = StallingsGraph::from_edges(
            a(2),
            3,
            0,
            vec![
                Edge {
                    origin: 0,
                    label: 1,
                    target: 0,
                },
                Edge {
                    origin: 0,
                    label: 2,
                    target: 1,
                },
            ],
        )
        .unwrap();
        assert_eq!(raw.trim(), sg(&["a"], 2));
    }

    #[test]
    fn rank_examples() {
        for n in 1..5 {
            assert_eq!(StallingsGraph::full(a(n)).rank(), n);
        }
        assert_eq!(StallingsGraph::trivial(a(3)).rank(), 0);
        assert_eq!(sg(&["xxyyxx", "yyzzyy", "zzxxyyxxzz"], 3).rank(), 3);
        assert_eq!(sg(&["xxyyxx", "y", "z"], 3).rank(), 3);
        let before = degree_formula_checks();
        StallingsGraph::full(a(2)).rank();
        assert!(degree_formula_checks() > before);
    }

    #[test]
    fn contains_examples() {
        let g = sg(&["xxyyxx", "y", "z"], 3);
        assert!(g.contains(&Word::parse("xxyyxx", a(3)).unwrap()).unwrap());
        assert!(!g.contains(&Word::parse("x", a(3)).unwrap()).unwrap());
        assert!(g.contains(&Word::identity(a(3))).unwrap());
        assert!(g
            .contains(&Word::parse("y xxyyxx Z", a(3)).unwrap())
            .unwrap());
        assert!(g.contains(&Word::parse("a", a(2)).unwrap()).is_err());
    }

    #[test]
    fn basis_examples() {
        assert_eq!(StallingsGraph::full(a(2)).basis(), words(&["a", "b"], 2));
        assert!(StallingsGraph::trivial(a(2)).basis().is_empty());
        let g = sg(&["aa", "aaa"], 1);
        let b = g.basis();
        assert_eq!(b.len(), 1);
        assert_eq!(
            StallingsGraph::subgroup_graph(&b, a(1))
                .unwrap()
                .canonical_code(),
            g.canonical_code()
        );
        let h = sg(&["xxyyxx", "yyzzyy", "zzxxyyxxzz"], 3);
        let hb = h.basis();
        assert_eq!(hb.len(), 3);
        assert_eq!(StallingsGraph::subgroup_graph(&hb, a(3)).unwrap(), h);
    }

    #[test]
    fn finite_index_examples() {
        assert_eq!(StallingsGraph::full(a(3)).finite_index(), Some(1));
        assert_eq!(sg(&["aa", "bb", "ab"], 2).finite_index(), Some(2));
        assert_eq!(sg(&["a"], 2).finite_index(), None);
    }

    #[test]
    fn canonical_code_examples() {
        assert_eq!(
            sg(&["ab"], 2).canonical_code(),
            sg(&["ab"], 2).canonical_code()
        );
        assert_ne!(
            sg(&["a"], 1).canonical_code(),
            StallingsGraph::trivial(a(1)).canonical_code()
        );
        assert_eq!(
            sg(&["b", "abA"], 2).canonical_code(),
            sg(&["abA", "b"], 2).canonical_code()
        );
        assert_ne!(
            sg(&["a"], 2).canonical_code(),
            sg(&["b"], 2).canonical_code()
        );
    }

    #[test]
    fn dot_examples() {
        let dot = StallingsGraph::trivial(a(2)).to_dot();
        assert_eq!(dot.matches("shape=").count(), 1);
        assert_eq!(dot.matches("->").count(), 0);
        let dot = sg(&["a"], 1).to_dot();
        assert!(dot.contains("0 -> 0 [label=\"x1\"]"));
        let dot = StallingsGraph::full(a(2)).to_dot();
        assert_eq!(dot.matches("0 -> 0").count(), 2);
        assert!(dot.contains("doublecircle"));
    }

    #[test]
    fn json_round_trip() {
        let h = sg(&["xxyyxx", "yyzzyy", "zzxxyyxxzz"], 3);
        let json = serde_json::to_string(&h.to_json()).unwrap();
        let back: GraphJson = serde_json::from_str(&json).unwrap();
        assert_eq!(
            StallingsGraph::from_json(&back).unwrap().canonical_code(),
            h.canonical_code()
        );
    }

    #[test]
    fn dot_round_trip() {
        for g in [
            sg(&["xxyyxx", "yyzzyy", "zzxxyyxxzz"], 3),
            StallingsGraph::trivial(a(3)),
            sg(&["y"], 3),
        ] {
            let back = StallingsGraph::from_dot(&g.to_dot(), a(3)).unwrap();
            assert_eq!(back.canonical_code(), g.canonical_code());
        }
        assert!(matches!(
            StallingsGraph::from_dot("digraph stallings {\n}\n", a(1)),
            Err(Error::Syntax(_))
        ));
        assert!(StallingsGraph::from_dot(
            "  0 [shape=doublecircle];\n  0 -> 0 [label=\"x4\"];",
            a(3)
        )
        .is_err());
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        let bad = StallingsGraph::from_edges(
            a(1),
            1,
            0,
            vec![Edge {
                origin: 0,
                label: 2,
                target: 0,
            }],
        );
        assert!(matches!(bad, Err(Error::UnknownGenerator { .. })));
        assert!(StallingsGraph::from_edges(a(1), 1, 3, vec![]).is_err());
    }
}
