//! Binary and indexed operations on subgroups given by core graphs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::core_graph::{Edge, StallingsGraph, NONE};
use crate::error::{same_rank, Error, Result};
use crate::words::{Alphabet, Word};

/// `rk(H ∩ F_0), …, rk(H ∩ F_n)` for the prefix subgroups `F_i = ⟨x_1, …, x_i⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankProfile(Vec<usize>);

impl RankProfile {
    pub fn new(values: Vec<usize>) -> Self {
        RankProfile(values)
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// Successive differences `r_i - r_{i-1}` for `i = 1..=n`.
    pub fn jumps(&self) -> Vec<usize> {
        self.0.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Every step raises the rank by at most one.
    pub fn is_echelon(&self) -> bool {
        self.jumps().iter().all(|&j| j <= 1)
    }

    pub fn is_monotone(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }
}

impl fmt::Display for RankProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Core graph of `A ∩ B`: the base component of the pullback, trimmed.
pub fn intersect(a: &StallingsGraph, b: &StallingsGraph) -> Result<StallingsGraph> {
    same_rank(a.alphabet().rank(), b.alphabet().rank())?;
    let a = a.fold();
    let b = b.fold();
    let slots = 2 * a.alphabet().rank();
    let (ta, tb) = (a.table(), b.table());
    let width = b.vertex_count();
    // pair (u, v) lives at u * width + v; ids are assigned on discovery
    let mut id = vec![NONE; a.vertex_count() * width];
    let mut pairs = vec![(a.base(), b.base())];
    id[a.base() * width + b.base()] = 0;
    let mut table = Vec::new();
    let mut head = 0;
    while head < pairs.len() {
        let (u, v) = pairs[head];
        head += 1;
        for s in 0..slots {
            let (su, sv) = (ta[u * slots + s], tb[v * slots + s]);
            let target = if su == NONE || sv == NONE {
                NONE
            } else {
                let key = su as usize * width + sv as usize;
                if id[key] == NONE {
                    id[key] = pairs.len() as u32;
                    pairs.push((su as usize, sv as usize));
                }
                id[key]
            };
            table.push(target);
        }
    }
    Ok(StallingsGraph::from_table(a.alphabet(), pairs.len(), 0, table).trim())
}

/// Core graph of `H ∩ F_i`: drop every edge labelled above `i`, keep the
/// base component, trim.
pub fn restrict_to_prefix(h: &StallingsGraph, i: usize) -> Result<StallingsGraph> {
    let n = h.alphabet().rank();
    if i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    let h = h.fold();
    let slots = 2 * n;
    let table = h
        .table()
        .iter()
        .enumerate()
        .map(|(k, &t)| if (k % slots) / 2 < i { t } else { NONE })
        .collect();
    Ok(StallingsGraph::from_table(h.alphabet(), h.vertex_count(), h.base(), table).trim())
}

pub fn rank_profile(h: &StallingsGraph) -> RankProfile {
    let n = h.alphabet().rank();
    RankProfile(
        (0..=n)
            .map(|i| {
                restrict_to_prefix(h, i)
                    .expect("prefix index within range")
                    .rank()
            })
            .collect(),
    )
}

/// Core graph of `w⁻¹ H w`: a new base joined to the old one by a stem
/// spelling `w⁻¹`, then folded and trimmed.
pub fn conjugate(h: &StallingsGraph, w: &Word) -> Result<StallingsGraph> {
    same_rank(h.alphabet().rank(), w.alphabet().rank())?;
    if w.is_identity() {
        return Ok(h.trim());
    }
    let stem = w.inverse();
    let letters = stem.letters();
    let mut edges = h.edges().to_vec();
    let mut vertex_count = h.vertex_count();
    let new_base = vertex_count;
    vertex_count += 1;
    let mut at = new_base;
    for (k, &l) in letters.iter().enumerate() {
        let next = if k + 1 == letters.len() {
            h.base()
        } else {
            vertex_count += 1;
            vertex_count - 1
        };
        edges.push(if l.is_inverse() {
            Edge {
                origin: next,
                label: l.gen(),
                target: at,
            }
        } else {
            Edge {
                origin: at,
                label: l.gen(),
                target: next,
            }
        });
        at = next;
    }
    Ok(
        StallingsGraph::from_edges(h.alphabet(), vertex_count, new_base, edges)?
            .fold()
            .trim(),
    )
}

/// Core graph of `⟨A ∪ B⟩`: wedge at the bases, fold, trim.
pub fn join(a: &StallingsGraph, b: &StallingsGraph) -> Result<StallingsGraph> {
    same_rank(a.alphabet().rank(), b.alphabet().rank())?;
    let offset = a.vertex_count();
    let relabel = |v: usize| if v == b.base() { a.base() } else { v + offset };
    let mut edges = a.edges().to_vec();
    edges.extend(b.edges().iter().map(|e| Edge {
        origin: relabel(e.origin),
        label: e.label,
        target: relabel(e.target),
    }));
    StallingsGraph::from_edges(a.alphabet(), offset + b.vertex_count(), a.base(), edges)
        .map(|g| g.fold().trim())
}

/// True iff `words` are exactly `n` elements generating `F_n`. Free groups
/// are Hopfian, so such a list is a free basis.
pub fn is_basis(words: &[Word], alphabet: Alphabet) -> bool {
    if words.len() != alphabet.rank() {
        return false;
    }
    match StallingsGraph::subgroup_graph(words, alphabet) {
        Ok(g) => g.vertex_count() == 1 && g.edge_count() == alphabet.rank(),
        Err(_) => false,
    }
}
