//! Endomorphisms of `F_n` given by the images of the generators.

use serde::{Deserialize, Serialize};

use crate::core_graph::StallingsGraph;
use crate::echelon::{is_echelon_wrt, OrderedBasis};
use crate::error::{same_rank, Error, Result};
use crate::subgroup_ops::is_basis;
use crate::words::{Alphabet, Word};

/// Substitutes `images[g-1]` for every occurrence of `x_g` (inverse for `x_g⁻¹`).
pub(crate) fn substitute(images: &[Word], w: &Word) -> Word {
    let alphabet = images.first().map_or(w.alphabet(), |i| i.alphabet());
    let mut out = Word::identity(alphabet);
    for l in w.letters() {
        let image = &images[l.gen() - 1];
        out = if l.is_inverse() {
            out.mul_same(&image.inverse())
        } else {
            out.mul_same(image)
        };
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Endomorphism {
    alphabet: Alphabet,
    images: Vec<Word>,
}

/// Endomorphism JSON: `{"n": …, "images": ["…", …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndomorphismJson {
    pub n: usize,
    pub images: Vec<String>,
}

impl Endomorphism {
    pub fn new(alphabet: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != alphabet.rank() {
            return Err(Error::InvalidInput(format!(
                "expected {} generator images, got {}",
                alphabet.rank(),
                images.len()
            )));
        }
        for w in &images {
            same_rank(alphabet.rank(), w.alphabet().rank())?;
        }
        Ok(Endomorphism { alphabet, images })
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        Endomorphism {
            alphabet,
            images: alphabet.generators(),
        }
    }

    pub fn parse(alphabet: Alphabet, images: &[&str]) -> Result<Self> {
        let images = images
            .iter()
            .map(|t| Word::parse(t, alphabet))
            .collect::<Result<_>>()?;
        Endomorphism::new(alphabet, images)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        same_rank(self.alphabet.rank(), w.alphabet().rank())?;
        Ok(substitute(&self.images, w))
    }

    /// `self` first, then `then`.
    pub fn compose(&self, then: &Endomorphism) -> Result<Endomorphism> {
        same_rank(self.alphabet.rank(), then.alphabet.rank())?;
        Ok(Endomorphism {
            alphabet: self.alphabet,
            images: self
                .images
                .iter()
                .map(|w| substitute(&then.images, w))
                .collect(),
        })
    }

    /// Core graph of the image subgroup `F_n φ`.
    pub fn image(&self) -> StallingsGraph {
        StallingsGraph::subgroup_graph(&self.images, self.alphabet)
            .expect("images share the endomorphism's alphabet")
    }

    /// Views `self` as a 1-generator endomorphism when at most one generator
    /// moves. The identity is reported with moved index `n`.
    pub fn as_one_generator(&self) -> Option<OneGenEndo> {
        let mut moved = (1..=self.alphabet.rank())
            .filter(|&g| self.images[g - 1] != Word::generator(self.alphabet, g));
        let g = match (moved.next(), moved.next()) {
            (None, _) => self.alphabet.rank(),
            (Some(g), None) => g,
            _ => return None,
        };
        Some(OneGenEndo {
            alphabet: self.alphabet,
            moved: g,
            image: self.images[g - 1].clone(),
        })
    }

    pub fn is_automorphism(&self) -> bool {
        is_basis(&self.images, self.alphabet)
    }

    /// True iff every word in `gens` is fixed, so `⟨gens⟩` is fixed pointwise.
    pub fn fixes(&self, gens: &[Word]) -> Result<bool> {
        for g in gens {
            if &self.apply(g)? != g {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> EndomorphismJson {
        EndomorphismJson {
            n: self.alphabet.rank(),
            images: self.images.iter().map(|w| w.to_string()).collect(),
        }
    }

    pub fn from_json(json: &EndomorphismJson) -> Result<Self> {
        let alphabet = Alphabet::new(json.n)?;
        let images: Vec<&str> = json.images.iter().map(String::as_str).collect();
        Endomorphism::parse(alphabet, &images)
    }
}

/// An endomorphism fixing every basis element except the `moved`-th one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OneGenEndo {
    alphabet: Alphabet,
    moved: usize,
    image: Word,
}

impl OneGenEndo {
    pub fn new(alphabet: Alphabet, moved: usize, image: Word) -> Result<Self> {
        if moved == 0 || moved > alphabet.rank() {
            return Err(Error::IndexOutOfRange {
                index: moved,
                max: alphabet.rank(),
            });
        }
        same_rank(alphabet.rank(), image.alphabet().rank())?;
        Ok(OneGenEndo {
            alphabet,
            moved,
            image,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn moved(&self) -> usize {
        self.moved
    }

    pub fn image(&self) -> &Word {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image == Word::generator(self.alphabet, self.moved)
    }

    /// The endomorphism of `F_n` sending `x_moved` to the image.
    pub fn to_endomorphism(&self) -> Endomorphism {
        let mut images = self.alphabet.generators();
        images[self.moved - 1] = self.image.clone();
        Endomorphism {
            alphabet: self.alphabet,
            images,
        }
    }

    /// Applies the endomorphism to a subgroup through its ordered free basis:
    /// the `moved`-th basis element is replaced by the image, which must
    /// already lie in the subgroup. Trivial entries are kept in place so
    /// positions stay stable along a chain of steps.
    pub fn apply_to_basis(&self, basis: &[Word]) -> Result<Vec<Word>> {
        if self.moved > basis.len() {
            return Err(Error::IndexOutOfRange {
                index: self.moved,
                max: basis.len(),
            });
        }
        let graph = StallingsGraph::subgroup_graph(basis, self.alphabet)?;
        if !graph.contains(&self.image)? {
            return Err(Error::NotASubgroup(format!(
                "image `{}` does not lie in the subgroup being mapped",
                self.image
            )));
        }
        let mut out = basis.to_vec();
        out[self.moved - 1] = self.image.clone();
        Ok(out)
    }
}

/// Shape certificate for a fixed subgroup: generators `y_1, …, y_r` living in
/// consecutive generator blocks and conjugates `z_k = e_j⁻¹ w_k e_j` where
/// `e_j` is the `j`-th ordering element. All words use standard coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixCertificate {
    pub ordering: OrderedBasis,
    pub ys: Vec<Word>,
    /// Pairs `(j, w_k)`.
    pub zs: Vec<(usize, Word)>,
}

/// FixCertificate JSON: `{"n": …, "ordering": [...], "ys": [...], "zs": [[j, "w"], …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixCertificateJson {
    pub n: usize,
    pub ordering: Vec<String>,
    pub ys: Vec<String>,
    pub zs: Vec<(usize, String)>,
}

impl FixCertificate {
    /// Generators of the certified subgroup in standard coordinates.
    pub fn generators(&self) -> Result<Vec<Word>> {
        let n = self.ordering.alphabet().rank();
        let mut gens = self.ys.clone();
        for (j, w) in &self.zs {
            let e = self
                .ordering
                .elements()
                .get(j.wrapping_sub(1))
                .ok_or(Error::IndexOutOfRange { index: *j, max: n })?;
            gens.push(e.inverse().mul_same(w).mul_same(e));
        }
        Ok(gens)
    }

    pub fn to_json(&self) -> FixCertificateJson {
        FixCertificateJson {
            n: self.ordering.alphabet().rank(),
            ordering: self
                .ordering
                .elements()
                .iter()
                .map(|w| w.to_string())
                .collect(),
            ys: self.ys.iter().map(|w| w.to_string()).collect(),
            zs: self.zs.iter().map(|(j, w)| (*j, w.to_string())).collect(),
        }
    }

    pub fn from_json(json: &FixCertificateJson) -> Result<Self> {
        let alphabet = Alphabet::new(json.n)?;
        let parse = |t: &String| Word::parse(t, alphabet);
        let ordering = json
            .ordering
            .iter()
            .map(parse)
            .collect::<Result<Vec<_>>>()?;
        let ordering = if ordering.is_empty() {
            OrderedBasis::identity(alphabet)
        } else {
            OrderedBasis::new(ordering, alphabet)?
        };
        Ok(FixCertificate {
            ordering,
            ys: json.ys.iter().map(parse).collect::<Result<_>>()?,
            zs: json
                .zs
                .iter()
                .map(|(j, w)| parse(w).map(|w| (*j, w)))
                .collect::<Result<_>>()?,
        })
    }
}

/// Checks the fixed-subgroup shape in the ordering's coordinates.
///
/// Each `y_j` must be nontrivial and use only generators strictly above the
/// top generator of `y_{j-1}`; its own top generator is `i_j`. The `k`-th
/// conjugate must sit at index `i_r + k` with `w_k` nontrivial in
/// `F_{i_r+k-1}`, and `i_r + s ≤ n`. Finally the generators must be free
/// of rank `r + s` and the subgroup echelon with respect to the ordering.
pub fn verify_fix_structure(cert: &FixCertificate) -> Result<bool> {
    let alphabet = cert.ordering.alphabet();
    let n = alphabet.rank();
    for w in cert.ys.iter().chain(cert.zs.iter().map(|(_, w)| w)) {
        same_rank(n, w.alphabet().rank())?;
    }
    let mut top = 0;
    for y in &cert.ys {
        let y = cert.ordering.to_basis_coords(y);
        if y.is_identity() || y.min_generator() <= top {
            return Ok(false);
        }
        top = y.max_generator();
    }
    for (k, (j, w)) in cert.zs.iter().enumerate() {
        if *j != top + k + 1 || *j > n {
            return Ok(false);
        }
        let w = cert.ordering.to_basis_coords(w);
        if w.is_identity() || w.max_generator() >= *j {
            return Ok(false);
        }
    }
    if top + cert.zs.len() > n {
        return Ok(false);
    }
    let gens = cert.generators()?;
    let graph = StallingsGraph::subgroup_graph(&gens, alphabet)?;
    if graph.rank() != gens.len() {
        return Ok(false);
    }
    Ok(is_echelon_wrt(&graph, &cert.ordering)?.0)
}
