//! Echelon form with respect to an ordered basis of `F_n`.
//!
//! A subgroup `H` is in echelon form with respect to an ordered basis when
//! its rank profile, taken in that basis' coordinates, never jumps by more
//! than one. Deciding whether *some* ordered basis works is not attempted;
//! every operation here takes the basis explicitly.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::core_graph::StallingsGraph;
use crate::endo::{substitute, Endomorphism, OneGenEndo};
use crate::error::{same_rank, Error, Result};
use crate::subgroup_ops::{is_basis, rank_profile, RankProfile};
use crate::words::{parse_word_list, Alphabet, Letter, Word};

/// An ordered free basis `e_1, …, e_n` of `F_n`, written in the standard
/// generators, together with the inverse substitution. Only validated
/// bases can be constructed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedBasis {
    alphabet: Alphabet,
    elements: Vec<Word>,
    inverse: Vec<Word>,
}

impl OrderedBasis {
    pub fn identity(alphabet: Alphabet) -> Self {
        let gens = alphabet.generators();
        OrderedBasis {
            alphabet,
            elements: gens.clone(),
            inverse: gens,
        }
    }

    /// Validates `elements` and inverts the substitution `x_i ↦ e_i` with
    /// the default move budget `10 · n · total length`.
    pub fn new(elements: Vec<Word>, alphabet: Alphabet) -> Result<Self> {
        let total: usize = elements.iter().map(Word::len).sum();
        let budget = 10 * alphabet.rank() * total.max(1);
        OrderedBasis::with_move_budget(elements, alphabet, budget)
    }

    pub fn with_move_budget(
        elements: Vec<Word>,
        alphabet: Alphabet,
        budget: usize,
    ) -> Result<Self> {
        for e in &elements {
            same_rank(alphabet.rank(), e.alphabet().rank())?;
        }
        if !is_basis(&elements, alphabet) {
            let listed: Vec<String> = elements.iter().map(|w| format!("`{w}`")).collect();
            return Err(Error::NotABasis(listed.join(", ")));
        }
        let inverse = nielsen_inverse(&elements, alphabet, budget)?;
        Ok(OrderedBasis {
            alphabet,
            elements,
            inverse,
        })
    }

    /// Parses a comma-separated list such as `"y,x,z"`.
    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Self> {
        OrderedBasis::new(parse_word_list(text, alphabet)?, alphabet)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    pub fn is_identity(&self) -> bool {
        self.elements
            .iter()
            .enumerate()
            .all(|(i, e)| *e == Word::generator(self.alphabet, i + 1))
    }

    /// Rewrites a standard word in basis coordinates: letter `x_i` of the
    /// result stands for `e_i`.
    pub fn to_basis_coords(&self, w: &Word) -> Word {
        substitute(&self.inverse, w)
    }

    /// Evaluates a word in basis coordinates back in the standard generators.
    pub fn from_basis_coords(&self, w: &Word) -> Word {
        substitute(&self.elements, w)
    }

    /// The basis given by the inverse substitution.
    pub fn inverse(&self) -> OrderedBasis {
        OrderedBasis {
            alphabet: self.alphabet,
            elements: self.inverse.clone(),
            inverse: self.elements.clone(),
        }
    }

    /// The automorphism `x_i ↦ e_i`.
    pub fn as_automorphism(&self) -> Endomorphism {
        Endomorphism::new(self.alphabet, self.elements.clone()).expect("validated basis")
    }
}

/// A Nielsen move `current[i] ← current[j]^±1 · current[i]` (left) or
/// `current[i] ← current[i] · current[j]^±1`.
#[derive(Clone, Copy, Debug)]
struct Move {
    i: usize,
    j: usize,
    inverse: bool,
    left: bool,
}

fn moved_word(words: &[Word], m: Move) -> Word {
    let other = if m.inverse {
        words[m.j].inverse()
    } else {
        words[m.j].clone()
    };
    if m.left {
        other.mul_same(&words[m.i])
    } else {
        words[m.i].mul_same(&other)
    }
}

fn all_moves(n: usize) -> impl Iterator<Item = Move> {
    (0..n).flat_map(move |i| {
        (0..n).filter(move |&j| j != i).flat_map(move |j| {
            [(false, false), (true, false), (false, true), (true, true)]
                .into_iter()
                .map(move |(inverse, left)| Move {
                    i,
                    j,
                    inverse,
                    left,
                })
        })
    })
}

/// The move shortening some word the most, if any move shortens at all.
fn best_reduction(words: &[Word]) -> Option<Move> {
    let mut best: Option<(usize, Move)> = None;
    for m in all_moves(words.len()) {
        let len = moved_word(words, m).len();
        let old = words[m.i].len();
        if len < old && best.is_none_or(|(gain, _)| old - len > gain) {
            best = Some((old - len, m));
        }
    }
    best.map(|(_, m)| m)
}

fn apply_move(current: &mut [Word], track: &mut [Word], m: Move) {
    current[m.i] = moved_word(current, m);
    track[m.i] = moved_word(track, m);
}

/// Inverts `x_i ↦ elements[i]` by Nielsen reduction towards the standard
/// basis. Alongside the working list we keep `track` with
/// `current[i] = φ(track[i])`; once every current word is a single letter
/// `x_g^±1`, `track[i]^±1` is the preimage of `x_g`.
///
/// Length-reducing moves are taken greedily. When none exists, a
/// breadth-first search over length-preserving moves looks for a state that
/// admits one. Every explored state counts against `budget`.
fn nielsen_inverse(elements: &[Word], alphabet: Alphabet, budget: usize) -> Result<Vec<Word>> {
    let n = alphabet.rank();
    let mut current = elements.to_vec();
    let mut track = alphabet.generators();
    let mut spent = 0usize;
    while !current.iter().all(|w| w.len() == 1) {
        if let Some(m) = best_reduction(&current) {
            apply_move(&mut current, &mut track, m);
            spent += 1;
        } else {
            let (c, t, used) = plateau_search(&current, &track, budget.saturating_sub(spent))?;
            current = c;
            track = t;
            spent += used;
        }
        if spent > budget {
            return Err(Error::NotABasis(format!(
                "Nielsen reduction exceeded {budget} moves"
            )));
        }
    }
    let mut inverse: Vec<Option<Word>> = vec![None; n];
    for (w, t) in current.iter().zip(track) {
        let l = w.letters()[0];
        let slot = &mut inverse[l.gen() - 1];
        if slot.is_some() {
            return Err(Error::NotABasis(format!(
                "generator x{} reached twice",
                l.gen()
            )));
        }
        *slot = Some(if l.is_inverse() { t.inverse() } else { t });
    }
    inverse
        .into_iter()
        .map(|w| w.ok_or_else(|| Error::NotABasis("a generator was never reached".into())))
        .collect()
}

type NielsenState = (Vec<Word>, Vec<Word>);

fn plateau_search(
    current: &[Word],
    track: &[Word],
    budget: usize,
) -> Result<(Vec<Word>, Vec<Word>, usize)> {
    let mut seen: HashSet<Vec<Word>> = HashSet::from([current.to_vec()]);
    let mut queue: VecDeque<NielsenState> = VecDeque::from([(current.to_vec(), track.to_vec())]);
    let mut explored = 0;
    while let Some((c, t)) = queue.pop_front() {
        for m in all_moves(c.len()) {
            let w = moved_word(&c, m);
            if w.len() != c[m.i].len() {
                continue;
            }
            let (mut c2, mut t2) = (c.clone(), t.clone());
            apply_move(&mut c2, &mut t2, m);
            if !seen.insert(c2.clone()) {
                continue;
            }
            explored += 1;
            if explored > budget {
                return Err(Error::NotABasis(
                    "Nielsen plateau search exhausted its budget".into(),
                ));
            }
            if best_reduction(&c2).is_some() || c2.iter().all(|w| w.len() == 1) {
                return Ok((c2, t2, explored));
            }
            queue.push_back((c2, t2));
        }
    }
    Err(Error::NotABasis("no Nielsen reduction applies".into()))
}

/// Graph of `H` written in the coordinates of `basis`, i.e. the preimage of
/// `H` under `x_i ↦ e_i`.
pub fn change_coordinates(h: &StallingsGraph, basis: &OrderedBasis) -> Result<StallingsGraph> {
    same_rank(h.alphabet().rank(), basis.alphabet().rank())?;
    if basis.is_identity() {
        return Ok(h.trim());
    }
    let gens: Vec<Word> = h.basis().iter().map(|w| basis.to_basis_coords(w)).collect();
    StallingsGraph::subgroup_graph(&gens, h.alphabet())
}

/// Echelon test: the rank profile in basis coordinates and whether it
/// rises by at most one at every step.
pub fn is_echelon_wrt(h: &StallingsGraph, basis: &OrderedBasis) -> Result<(bool, RankProfile)> {
    let profile = rank_profile(&change_coordinates(h, basis)?);
    Ok((profile.is_echelon(), profile))
}

/// Indices `i_1 < … < i_r` and basis words with `words[j] ∈ F_{i_j} − F_{i_j − 1}`.
/// Words are expressed in the coordinates of the ordered basis they were
/// extracted against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchelonCertificate {
    pub indices: Vec<usize>,
    pub words: Vec<Word>,
}

/// Certificate JSON: `{"indices": [...], "words": ["…", …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub indices: Vec<usize>,
    pub words: Vec<String>,
}

impl EchelonCertificate {
    /// Checks index order, the top-generator condition and freeness.
    pub fn validate(&self, alphabet: Alphabet) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedCertificate(msg));
        if self.indices.len() != self.words.len() {
            return bad(format!(
                "{} indices but {} words",
                self.indices.len(),
                self.words.len()
            ));
        }
        if self.indices.windows(2).any(|w| w[0] >= w[1]) {
            return bad("indices are not strictly increasing".into());
        }
        for (&i, w) in self.indices.iter().zip(&self.words) {
            if i == 0 || i > alphabet.rank() {
                return bad(format!("index {i} outside 1..={}", alphabet.rank()));
            }
            same_rank(alphabet.rank(), w.alphabet().rank())?;
            if w.max_generator() != i {
                return bad(format!("word `{w}` does not have top generator x{i}"));
            }
        }
        if StallingsGraph::subgroup_graph(&self.words, alphabet)?.rank() != self.words.len() {
            return bad("words do not form a free basis".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            indices: self.indices.clone(),
            words: self.words.iter().map(|w| w.to_string()).collect(),
        }
    }

    pub fn from_json(json: &CertificateJson, alphabet: Alphabet) -> Result<Self> {
        Ok(EchelonCertificate {
            indices: json.indices.clone(),
            words: json
                .words
                .iter()
                .map(|t| Word::parse(t, alphabet))
                .collect::<Result<_>>()?,
        })
    }
}

/// Edges of `h` that survive in the core of `H ∩ F_i`, for every `i = 0..=n`.
fn prefix_edge_masks(h: &StallingsGraph) -> Vec<Vec<bool>> {
    let n = h.alphabet().rank();
    let edges = h.edges();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); h.vertex_count()];
    for (k, e) in edges.iter().enumerate() {
        incident[e.origin].push(k);
        incident[e.target].push(k);
    }
    (0..=n)
        .map(|i| {
            let mut alive: Vec<bool> = edges.iter().map(|e| e.label <= i).collect();
            let mut reached = vec![false; h.vertex_count()];
            reached[h.base()] = true;
            let mut stack = vec![h.base()];
            while let Some(v) = stack.pop() {
                for &k in &incident[v] {
                    if !alive[k] {
                        continue;
                    }
                    let e = edges[k];
                    let u = if e.origin == v { e.target } else { e.origin };
                    if !reached[u] {
                        reached[u] = true;
                        stack.push(u);
                    }
                }
            }
            for (k, e) in edges.iter().enumerate() {
                alive[k] &= reached[e.origin];
            }
            let mut degree = vec![0usize; h.vertex_count()];
            for (k, e) in edges.iter().enumerate() {
                if alive[k] {
                    degree[e.origin] += 1;
                    degree[e.target] += 1;
                }
            }
            let mut queue: Vec<usize> = (0..h.vertex_count())
                .filter(|&v| v != h.base() && reached[v] && degree[v] == 1)
                .collect();
            while let Some(v) = queue.pop() {
                for &k in &incident[v] {
                    if !alive[k] {
                        continue;
                    }
                    alive[k] = false;
                    let e = edges[k];
                    degree[e.origin] -= 1;
                    degree[e.target] -= 1;
                    let u = if e.origin == v { e.target } else { e.origin };
                    if u != h.base() && degree[u] == 1 {
                        queue.push(u);
                    }
                }
            }
            alive
        })
        .collect()
}

/// Extracts an echelon basis, or `None` when `H` is not echelon with
/// respect to `basis`.
///
/// The core of `H ∩ F_{i-1}` sits inside the core of `H ∩ F_i`. A spanning
/// tree is grown through these nested subgraphs, so the tree paths of
/// earlier vertices never change and each new non-tree edge extends a basis
/// of `H ∩ F_{i-1}` to one of `H ∩ F_i`.
pub fn echelon_certificate(
    h: &StallingsGraph,
    basis: &OrderedBasis,
) -> Result<Option<EchelonCertificate>> {
    let coords = change_coordinates(h, basis)?;
    if !rank_profile(&coords).is_echelon() {
        return Ok(None);
    }
    let alphabet = coords.alphabet();
    let n = alphabet.rank();
    let masks = prefix_edge_masks(&coords);
    let edges = coords.edges();
    let mut paths: Vec<Option<Word>> = vec![None; coords.vertex_count()];
    paths[coords.base()] = Some(Word::identity(alphabet));
    let mut order = vec![coords.base()];
    let mut tree_edge = vec![false; edges.len()];
    let edge_at = |v: usize, l: Letter| {
        let t = coords.step(v, l)?;
        let origin = if l.is_inverse() { t } else { v };
        edges
            .iter()
            .position(|e| e.origin == origin && e.label == l.gen())
    };
    let mut cert = EchelonCertificate {
        indices: Vec::new(),
        words: Vec::new(),
    };
    for i in 1..=n {
        let mask = &masks[i];
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for g in 1..=n {
                for l in [Letter::pos(g), Letter::neg(g)] {
                    let Some(k) = edge_at(v, l) else { continue };
                    let u = coords.step(v, l).unwrap();
                    if !mask[k] || paths[u].is_some() {
                        continue;
                    }
                    let step = Word::new(alphabet, &[l])?;
                    paths[u] = Some(paths[v].as_ref().unwrap().mul_same(&step));
                    tree_edge[k] = true;
                    order.push(u);
                }
            }
        }
        let resolved: Vec<Word> = paths
            .iter()
            .map(|p| p.clone().unwrap_or(Word::identity(alphabet)))
            .collect();
        for (k, e) in edges.iter().enumerate() {
            if mask[k] && !masks[i - 1][k] && !tree_edge[k] {
                cert.indices.push(i);
                cert.words.push(coords.edge_word(&resolved, e));
            }
        }
    }
    cert.validate(alphabet)?;
    let rebuilt = StallingsGraph::subgroup_graph(&cert.words, alphabet)?;
    assert_eq!(
        rebuilt.canonical_code(),
        coords.canonical_code(),
        "certificate must regenerate H"
    );
    Ok(Some(cert))
}

/// A chain of 1-generator subgroup endomorphisms starting at `F_n`. Step
/// `k` acts on the current subgroup through its ordered basis, replacing
/// basis element `x_{n+1-k}`.
#[derive(Clone, Debug)]
pub struct Lemma1Pipeline {
    pub alphabet: Alphabet,
    pub steps: Vec<OneGenEndo>,
    pub expected_image: StallingsGraph,
}

impl Lemma1Pipeline {
    /// Runs every step from the standard basis and returns the final basis
    /// list (entries sent to 1 stay in place as empty words).
    pub fn run(&self) -> Result<Vec<Word>> {
        self.steps
            .iter()
            .try_fold(self.alphabet.generators(), |basis, step| {
                step.apply_to_basis(&basis)
            })
    }

    pub fn image(&self) -> Result<StallingsGraph> {
        StallingsGraph::subgroup_graph(&self.run()?, self.alphabet)
    }

    pub fn non_identity_steps(&self) -> usize {
        self.steps.iter().filter(|s| !s.is_identity()).count()
    }

    /// The single endomorphism of `F_n` with the same image: `x_i` goes to
    /// the final `i`-th basis entry.
    pub fn as_endomorphism(&self) -> Result<Endomorphism> {
        Endomorphism::new(self.alphabet, self.run()?)
    }
}

/// Builds the descending chain: step `k` sends `x_m`, `m = n + 1 - k`, to the
/// certificate word with index `m`, or to 1 when `m` is not an index. Steps
/// that would be the identity are skipped.
pub fn build_via_pipeline(cert: &EchelonCertificate, alphabet: Alphabet) -> Result<Lemma1Pipeline> {
    cert.validate(alphabet)?;
    let n = alphabet.rank();
    let mut steps = Vec::new();
    for k in 1..=n {
        let m = n + 1 - k;
        let image = match cert.indices.iter().position(|&i| i == m) {
            Some(j) => cert.words[j].clone(),
            None => Word::identity(alphabet),
        };
        let step = OneGenEndo::new(alphabet, m, image)?;
        if !step.is_identity() {
            steps.push(step);
        }
    }
    let expected_image = StallingsGraph::subgroup_graph(&cert.words, alphabet)?;
    let pipeline = Lemma1Pipeline {
        alphabet,
        steps,
        expected_image,
    };
    let image = pipeline
        .image()
        .map_err(|e| Error::MalformedCertificate(format!("pipeline step failed: {e}")))?;
    if image.canonical_code() != pipeline.expected_image.canonical_code() {
        return Err(Error::MalformedCertificate(
            "pipeline image differs from ⟨words⟩".into(),
        ));
    }
    Ok(pipeline)
}
