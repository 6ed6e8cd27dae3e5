//! Desk-scale experiments: enumerate small core graphs and test inertia,
//! compression and the Hanna Neumann bound against them.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core_graph::{CanonicalCode, Edge, StallingsGraph, NONE};
use crate::echelon::EchelonCertificate;
use crate::endo::OneGenEndo;
use crate::error::{same_rank, Error, Result};
use crate::subgroup_ops::{intersect, rank_profile, RankProfile};
use crate::words::{Alphabet, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnumMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumBudget {
    pub max_vertices: usize,
    pub max_graphs: Option<usize>,
    pub seed: u64,
    pub mode: EnumMode,
    /// Exhaustive mode refuses alphabets with `n · max_vertices` above this.
    pub slot_limit: usize,
}

impl EnumBudget {
    pub const DEFAULT_SLOT_LIMIT: usize = 14;
    pub const DEFAULT_SAMPLES: usize = 1000;

    pub fn exhaustive(max_vertices: usize) -> Self {
        EnumBudget {
            max_vertices,
            max_graphs: None,
            seed: 0,
            mode: EnumMode::Exhaustive,
            slot_limit: Self::DEFAULT_SLOT_LIMIT,
        }
    }

    pub fn sampled(max_vertices: usize, count: usize, seed: u64) -> Self {
        EnumBudget {
            max_vertices,
            max_graphs: Some(count),
            seed,
            mode: EnumMode::Sampled,
            slot_limit: Self::DEFAULT_SLOT_LIMIT,
        }
    }
}

const UNKNOWN: u32 = NONE - 1;

/// Depth-first generator of rooted core graphs in canonical numbering.
///
/// Slots are decided in breadth-first order: vertex by vertex, and within a
/// vertex in the order `(1,+), (1,-), (2,+), …`. An undecided slot becomes
/// empty, points at an already discovered vertex whose matching slot is
/// still open, or discovers the next vertex. Every connected deterministic
/// rooted graph therefore arises exactly once, already canonically
/// numbered. Non-base vertices of degree below two are cut as soon as their
/// slots are complete.
struct CoreSearch<'a> {
    alphabet: Alphabet,
    slots: usize,
    max_vertices: usize,
    table: Vec<u32>,
    count: usize,
    emit: &'a mut dyn FnMut(StallingsGraph) -> bool,
    stopped: bool,
}

impl CoreSearch<'_> {
    fn run(&mut self, v: usize, s: usize) {
        if self.stopped {
            return;
        }
        if s == self.slots {
            if v != 0 && self.degree(v) < 2 {
                return;
            }
            if v + 1 == self.count {
                self.finish();
            } else {
                self.run(v + 1, 0);
            }
            return;
        }
        let slot = v * self.slots + s;
        if self.table[slot] != UNKNOWN {
            return self.run(v, s + 1);
        }
        let partner = s ^ 1;
        self.table[slot] = NONE;
        self.run(v, s + 1);
        for w in 0..self.count {
            let back = w * self.slots + partner;
            if self.table[back] != UNKNOWN {
                continue;
            }
            self.table[slot] = w as u32;
            self.table[back] = v as u32;
            self.run(v, s + 1);
            self.table[back] = UNKNOWN;
        }
        if self.count < self.max_vertices {
            let w = self.count;
            self.count += 1;
            self.table[slot] = w as u32;
            self.table[w * self.slots + partner] = v as u32;
            self.run(v, s + 1);
            self.table[w * self.slots + partner] = UNKNOWN;
            self.count -= 1;
        }
        self.table[slot] = UNKNOWN;
    }

    fn degree(&self, v: usize) -> usize {
        self.table[v * self.slots..(v + 1) * self.slots]
            .iter()
            .filter(|&&t| t != NONE)
            .count()
    }

    fn finish(&mut self) {
        let table = self.table[..self.count * self.slots].to_vec();
        let g = StallingsGraph::from_table(self.alphabet, self.count, 0, table).trim();
        debug_assert_eq!(g.vertex_count(), self.count);
        if !(self.emit)(g) {
            self.stopped = true;
        }
    }
}

/// Calls `visit` on every core graph selected by `budget`, each once up to
/// rooted labelled isomorphism. `visit` returns `false` to stop early.
pub fn for_each_core(
    alphabet: Alphabet,
    budget: &EnumBudget,
    mut visit: impl FnMut(&StallingsGraph) -> bool,
) -> Result<()> {
    if budget.max_vertices == 0 {
        return Err(Error::InvalidInput(
            "max_vertices must be at least 1".into(),
        ));
    }
    let mut seen: HashSet<CanonicalCode> = HashSet::new();
    let cap = budget.max_graphs.unwrap_or(usize::MAX);
    let mut accept = |g: StallingsGraph| -> bool {
        if seen.len() >= cap {
            return false;
        }
        if seen.insert(g.canonical_code()) && !visit(&g) {
            return false;
        }
        seen.len() < cap
    };
    match budget.mode {
        EnumMode::Exhaustive => {
            let slots_needed = alphabet.rank() * budget.max_vertices;
            if slots_needed > budget.slot_limit {
                return Err(Error::BudgetExceeded(format!(
                    "exhaustive enumeration needs {slots_needed} transition slots, limit is {}",
                    budget.slot_limit
                )));
            }
            let slots = 2 * alphabet.rank();
            let mut search = CoreSearch {
                alphabet,
                slots,
                max_vertices: budget.max_vertices,
                table: vec![UNKNOWN; budget.max_vertices * slots],
                count: 1,
                emit: &mut accept,
                stopped: false,
            };
            search.run(0, 0);
        }
        EnumMode::Sampled => {
            let target = budget.max_graphs.unwrap_or(EnumBudget::DEFAULT_SAMPLES);
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
            for _ in 0..target.saturating_mul(50) {
                if !accept(random_core(&mut rng, alphabet, budget.max_vertices)) {
                    break;
                }
            }
        }
    }
    Ok(())
}

pub fn enumerate_cores(alphabet: Alphabet, budget: &EnumBudget) -> Result<Vec<StallingsGraph>> {
    let mut out = Vec::new();
    for_each_core(alphabet, budget, |g| {
        out.push(g.clone());
        true
    })?;
    Ok(out)
}

/// One random partial injection per label on `vertices` points, reduced to
/// the trimmed base component.
fn random_core(rng: &mut ChaCha8Rng, alphabet: Alphabet, vertices: usize) -> StallingsGraph {
    let slots = 2 * alphabet.rank();
    let mut table = vec![NONE; vertices * slots];
    let mut perm: Vec<usize> = (0..vertices).collect();
    for g in 0..alphabet.rank() {
        perm.shuffle(rng);
        for (v, &t) in perm.iter().enumerate() {
            if rng.gen_bool(0.5) {
                table[v * slots + 2 * g] = t as u32;
                table[t * slots + 2 * g + 1] = v as u32;
            }
        }
    }
    StallingsGraph::from_table(alphabet, vertices, 0, table).trim()
}

/// Reduced words of length at most `max_len` in `⟨gens⟩`, found by
/// multiplying out products of generators and their inverses.
///
/// Products have at most `⌈2·max_len / min_len⌉ + 2` factors and every
/// partial product is kept within `max_len + max_gen_len` letters. At most
/// `node_cap` distinct partial products are explored.
pub fn brute_force_members_with_cap(
    gens: &[Word],
    alphabet: Alphabet,
    max_len: usize,
    node_cap: usize,
) -> Result<BTreeSet<Word>> {
    for g in gens {
        same_rank(alphabet.rank(), g.alphabet().rank())?;
    }
    let factors: Vec<Word> = gens
        .iter()
        .filter(|g| !g.is_identity())
        .flat_map(|g| [g.clone(), g.inverse()])
        .collect();
    let identity = Word::identity(alphabet);
    if factors.is_empty() {
        return Ok(BTreeSet::from([identity]));
    }
    let min_len = factors.iter().map(Word::len).min().unwrap();
    let max_gen = factors.iter().map(Word::len).max().unwrap();
    let max_factors = (2 * max_len).div_ceil(min_len) + 2;
    let len_cap = max_len + max_gen;
    let mut seen: HashSet<Word> = HashSet::from([identity.clone()]);
    let mut layer = vec![identity];
    for _ in 0..max_factors {
        let mut next = Vec::new();
        for w in &layer {
            for f in &factors {
                let p = w.mul_same(f);
                if p.len() <= len_cap && seen.insert(p.clone()) {
                    next.push(p);
                }
            }
        }
        if seen.len() > node_cap {
            return Err(Error::BudgetExceeded(format!(
                "brute-force product tree passed {node_cap} words"
            )));
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    Ok(seen.into_iter().filter(|w| w.len() <= max_len).collect())
}

pub const DEFAULT_PRODUCT_CAP: usize = 2_000_000;

pub fn brute_force_members(
    gens: &[Word],
    alphabet: Alphabet,
    max_len: usize,
) -> Result<BTreeSet<Word>> {
    brute_force_members_with_cap(gens, alphabet, max_len, DEFAULT_PRODUCT_CAP)
}

/// Every reduced word of length at most `max_len`.
pub fn all_words(alphabet: Alphabet, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::identity(alphabet)];
    let mut layer = out.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for g in 1..=alphabet.rank() {
                for l in [Letter::pos(g), Letter::neg(g)] {
                    if w.letters().last() == Some(&l.inverse()) {
                        continue;
                    }
                    next.push(w.mul_same(&Word::new(alphabet, &[l]).unwrap()));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InertiaViolation {
    /// Canonical code of `G`, hex encoded.
    pub g: String,
    pub rk_cap: usize,
    pub rk_g: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InertiaReport {
    pub tested: usize,
    pub violations: Vec<InertiaViolation>,
    pub seed: u64,
    pub budget: EnumBudget,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Checks `rk(H ∩ G) ≤ rk(G)` for every enumerated `G`.
pub fn test_inert(h: &StallingsGraph, budget: &EnumBudget) -> Result<InertiaReport> {
    let start = Instant::now();
    let family = enumerate_cores(h.alphabet(), budget)?;
    let h = h.trim();
    let mut violations: Vec<InertiaViolation> = family
        .par_iter()
        .filter_map(|g| {
            let rk_g = g.rank();
            let rk_cap = intersect(&h, g).expect("same alphabet").rank();
            (rk_cap > rk_g).then(|| InertiaViolation {
                g: g.canonical_code().to_hex(),
                rk_cap,
                rk_g,
            })
        })
        .collect();
    violations.sort_by(|a, b| a.g.cmp(&b.g));
    Ok(InertiaReport {
        tested: family.len(),
        violations,
        seed: budget.seed,
        budget: budget.clone(),
        elapsed: start.elapsed(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub rank: usize,
    pub method: CompressionMethod,
    pub quotients_tested: usize,
    pub min_overgroup_rank: usize,
    pub compressed: bool,
    /// Code of a quotient whose rank falls below `rank`, if any.
    pub witness: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompressionMethod {
    /// Settled by the abelianized rank bound; no quotient was built.
    AbelianBound,
    Partitions,
    Merging,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompressionOptions {
    /// Accept `rk(H) = rank of H's image in Z^n` as proof of compression.
    pub abelian_bound: bool,
    /// Graphs with at most this many vertices are handled by enumerating
    /// all vertex partitions.
    pub partition_limit: usize,
    /// Cap on distinct quotients for larger graphs.
    pub quotient_budget: usize,
}

impl Default for CompressionOptions {
    fn default() -> Self {
        CompressionOptions {
            abelian_bound: true,
            partition_limit: 9,
            quotient_budget: 500_000,
        }
    }
}

/// Folded quotients of `h`, keyed by canonical code, with their ranks.
pub type QuotientSet = BTreeMap<CanonicalCode, usize>;

fn quotient(h: &StallingsGraph, block: &[usize], blocks: usize) -> StallingsGraph {
    let edges = h
        .edges()
        .iter()
        .map(|e| Edge {
            origin: block[e.origin],
            label: e.label,
            target: block[e.target],
        })
        .collect();
    StallingsGraph::from_edges(h.alphabet(), blocks, block[h.base()], edges)
        .expect("quotient stays within the vertex set")
        .fold()
        .trim()
}

/// Quotients by every partition of the vertex set, enumerated as
/// restricted growth strings.
pub fn quotients_by_partitions(h: &StallingsGraph, limit: usize) -> Result<QuotientSet> {
    let h = h.trim();
    let v = h.vertex_count();
    if v > limit {
        return Err(Error::BudgetExceeded(format!(
            "{v} vertices exceed the partition limit {limit}"
        )));
    }
    let mut out = QuotientSet::new();
    let mut rgs = vec![0usize; v];
    fn walk(
        h: &StallingsGraph,
        rgs: &mut Vec<usize>,
        i: usize,
        blocks: usize,
        out: &mut QuotientSet,
    ) {
        if i == rgs.len() {
            let q = quotient(h, rgs, blocks);
            let rank = q.rank();
            out.insert(q.canonical_code(), rank);
            return;
        }
        for b in 0..=blocks {
            rgs[i] = b;
            walk(h, rgs, i + 1, blocks.max(b + 1), out);
        }
    }
    if v == 0 {
        return Ok(out);
    }
    walk(&h, &mut rgs, 1, 1, &mut out);
    Ok(out)
}

/// Quotients reachable by repeatedly identifying two vertices and folding.
/// Every folded quotient of `h` arises this way. Pending quotients are kept
/// as canonical codes only.
pub fn quotients_by_merging(h: &StallingsGraph, budget: usize) -> Result<QuotientSet> {
    let h = h.trim();
    let mut out = QuotientSet::new();
    out.insert(h.canonical_code(), h.rank());
    let mut pending = vec![h.canonical_code()];
    while let Some(code) = pending.pop() {
        let g = StallingsGraph::from_code(&code)?;
        let v = g.vertex_count();
        let pairs: Vec<(usize, usize)> = (0..v)
            .flat_map(|a| (a + 1..v).map(move |b| (a, b)))
            .collect();
        let found: Vec<(CanonicalCode, usize)> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let block: Vec<usize> = (0..v).map(|x| if x == b { a } else { x }).collect();
                let q = quotient(&g, &block, v);
                (q.canonical_code(), q.rank())
            })
            .collect();
        for (code, rank) in found {
            if !out.contains_key(&code) {
                out.insert(code.clone(), rank);
                pending.push(code);
                if out.len() > budget {
                    return Err(Error::BudgetExceeded(format!(
                        "more than {budget} distinct quotients"
                    )));
                }
            }
        }
    }
    Ok(out)
}

pub fn test_compressed(h: &StallingsGraph) -> Result<CompressionReport> {
    test_compressed_with(h, CompressionOptions::default())
}

/// Rank of the image of `⟨h⟩` in `Z^n` under abelianization. Every
/// overgroup of `h` maps onto a lattice containing that image, so this is a
/// lower bound for the rank of any overgroup.
pub fn abelian_rank(h: &StallingsGraph) -> usize {
    let n = h.alphabet().rank();
    let mut rows: Vec<Vec<i128>> = h
        .basis()
        .iter()
        .map(|w| {
            let mut v = vec![0i128; n];
            for l in w.letters() {
                v[l.gen() - 1] += i128::from(l.sign());
            }
            v
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let factor = row[col];
            if factor == 0 {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(&pivot) {
                *x = *x * pivot[col] - factor * y;
            }
            let g = row.iter().fold(0i128, |g, &x| gcd(g, x.abs()));
            if g > 1 {
                row.iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Decides compression: every overgroup of `H` contains the image of `H`'s
/// core, which is a folded quotient, so the minimum rank over quotients is
/// the minimum rank of any overgroup. When the abelianized rank already
/// equals `rk(H)` no quotient is needed.
pub fn test_compressed_with(
    h: &StallingsGraph,
    options: CompressionOptions,
) -> Result<CompressionReport> {
    let h = h.trim();
    let rank = h.rank();
    if options.abelian_bound && abelian_rank(&h) == rank {
        return Ok(CompressionReport {
            rank,
            method: CompressionMethod::AbelianBound,
            quotients_tested: 0,
            min_overgroup_rank: rank,
            compressed: true,
            witness: None,
        });
    }
    let (method, quotients) = if h.vertex_count() <= options.partition_limit {
        (
            CompressionMethod::Partitions,
            quotients_by_partitions(&h, options.partition_limit)?,
        )
    } else {
        (
            CompressionMethod::Merging,
            quotients_by_merging(&h, options.quotient_budget)?,
        )
    };
    let min_overgroup_rank = quotients.values().copied().min().unwrap_or(rank);
    let witness = quotients
        .iter()
        .find(|(_, &r)| r < rank)
        .map(|(c, _)| c.to_hex());
    Ok(CompressionReport {
        rank,
        method,
        quotients_tested: quotients.len(),
        min_overgroup_rank,
        compressed: min_overgroup_rank >= rank,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnViolation {
    pub g1: String,
    pub g2: String,
    pub rk_cap: usize,
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnReport {
    pub graphs: usize,
    pub tested: usize,
    pub violations: Vec<HnViolation>,
    pub seed: u64,
    pub budget: EnumBudget,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub fn hanna_neumann_bound(r1: usize, r2: usize) -> usize {
    1 + (r1 - 1) * (r2 - 1)
}

/// Checks `rk(G1 ∩ G2) ≤ 1 + (r1 - 1)(r2 - 1)` over unordered pairs of
/// enumerated subgroups of positive rank.
pub fn hn_bound_scan(alphabet: Alphabet, budget: &EnumBudget) -> Result<HnReport> {
    let start = Instant::now();
    let family: Vec<(StallingsGraph, usize)> = enumerate_cores(alphabet, budget)?
        .into_iter()
        .map(|g| {
            let r = g.rank();
            (g, r)
        })
        .filter(|(_, r)| *r > 0)
        .collect();
    let per_row: Vec<(usize, Vec<HnViolation>)> = (0..family.len())
        .into_par_iter()
        .map(|i| {
            let (g1, r1) = &family[i];
            let mut bad = Vec::new();
            for (g2, r2) in &family[i..] {
                let rk_cap = intersect(g1, g2).expect("same alphabet").rank();
                let bound = hanna_neumann_bound(*r1, *r2);
                if rk_cap > bound {
                    bad.push(HnViolation {
                        g1: g1.canonical_code().to_hex(),
                        g2: g2.canonical_code().to_hex(),
                        rk_cap,
                        bound,
                    });
                }
            }
            (family.len() - i, bad)
        })
        .collect();
    let tested = per_row.iter().map(|(k, _)| k).sum();
    let mut violations: Vec<HnViolation> = per_row.into_iter().flat_map(|(_, v)| v).collect();
    violations.sort_by(|a, b| (&a.g1, &a.g2).cmp(&(&b.g1, &b.g2)));
    Ok(HnReport {
        graphs: family.len(),
        tested,
        violations,
        seed: budget.seed,
        budget: budget.clone(),
        elapsed: start.elapsed(),
    })
}

/// Prefix rank chains of `H ≤ G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankChain {
    pub h_profile: RankProfile,
    pub g_profile: RankProfile,
    pub h_echelon: bool,
    /// `rk(G ∩ F_i) ≥ rk(H ∩ F_i)` for every `i`.
    pub dominated: bool,
}

impl RankChain {
    /// Domination is only claimed for echelon `H`.
    pub fn holds(&self) -> bool {
        !self.h_echelon || self.dominated
    }
}

pub fn rank_chain_check(h: &StallingsGraph, g: &StallingsGraph) -> Result<RankChain> {
    same_rank(h.alphabet().rank(), g.alphabet().rank())?;
    for w in h.basis() {
        if !g.contains(&w)? {
            return Err(Error::NotASubgroup(format!("`{w}` lies in H but not in G")));
        }
    }
    let h_profile = rank_profile(h);
    let g_profile = rank_profile(g);
    let dominated = h_profile
        .values()
        .iter()
        .zip(g_profile.values())
        .all(|(a, b)| b >= a);
    Ok(RankChain {
        h_echelon: h_profile.is_echelon(),
        h_profile,
        g_profile,
        dominated,
    })
}

/// Random reduced word with exactly `len` letters over `x_1..x_top`.
pub fn random_word(rng: &mut impl Rng, alphabet: Alphabet, top: usize, len: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::new(
            rng.gen_range(1..=top),
            if rng.gen_bool(0.5) { 1 } else { -1 },
        );
        if letters.last() != Some(&l.inverse()) {
            letters.push(l);
        }
    }
    Word::new(alphabet, &letters).expect("letters within the alphabet")
}

/// A 1-generator endomorphism with a random moved generator and a random
/// image of length `0..=max_len`.
pub fn random_one_gen_endo(rng: &mut impl Rng, alphabet: Alphabet, max_len: usize) -> OneGenEndo {
    let moved = rng.gen_range(1..=alphabet.rank());
    let len = rng.gen_range(0..=max_len);
    let image = random_word(rng, alphabet, alphabet.rank(), len);
    OneGenEndo::new(alphabet, moved, image).expect("index within range")
}

/// A random valid echelon certificate with words of length `1..=max_len`.
pub fn random_echelon_certificate(
    rng: &mut impl Rng,
    alphabet: Alphabet,
    max_len: usize,
) -> EchelonCertificate {
    let n = alphabet.rank();
    loop {
        let indices: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(0.6)).collect();
        if indices.is_empty() {
            continue;
        }
        let words = indices
            .iter()
            .map(|&i| loop {
                let len = rng.gen_range(1..=max_len.max(1));
                let w = random_word(rng, alphabet, i, len);
                if w.max_generator() == i {
                    break w;
                }
            })
            .collect();
        let cert = EchelonCertificate { indices, words };
        if cert.validate(alphabet).is_ok() {
            return cert;
        }
    }
}
