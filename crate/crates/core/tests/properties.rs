use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stallings::lab::{all_words, brute_force_members_with_cap};
use stallings::{
    free_reduce, intersect, is_echelon_wrt, rank_profile, restrict_to_prefix, Alphabet, Edge,
    Endomorphism, Letter, OneGenEndo, OrderedBasis, StallingsGraph, Word,
};

fn alphabet(n: usize) -> Alphabet {
    Alphabet::new(n).unwrap()
}

fn letters(n: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((1..=n, any::<bool>()), 0..=max_len).prop_map(|raw| {
        raw.into_iter()
            .map(|(g, inv)| if inv { Letter::neg(g) } else { Letter::pos(g) })
            .collect()
    })
}

fn word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
    letters(n, max_len).prop_map(move |l| Word::new(alphabet(n), &l).unwrap())
}

fn generator_set(n: usize, count: usize, max_len: usize) -> impl Strategy<Value = Vec<Word>> {
    prop::collection::vec(word(n, max_len), 1..=count)
}

/// Rank and generators over that rank.
fn subgroup(
    max_n: usize,
    count: usize,
    max_len: usize,
) -> impl Strategy<Value = (usize, Vec<Word>)> {
    (1..=max_n).prop_flat_map(move |n| (Just(n), generator_set(n, count, max_len)))
}

/// Membership decided on the unfolded bouquet: `w` lies in `⟨gens⟩` iff
/// some closed path at the base reads a word freely equal to `w`. Paths
/// reading a word that reduces to 1 are closed under the relation below.
struct UnfoldedOracle {
    arcs: Vec<(usize, Letter, usize)>,
    null: Vec<Vec<bool>>,
}

impl UnfoldedOracle {
    fn new(gens: &[Word]) -> Self {
        let mut arcs = Vec::new();
        let mut count = 1;
        for g in gens {
            let ls = g.letters();
            let mut at = 0;
            for (i, &l) in ls.iter().enumerate() {
                let next = if i + 1 == ls.len() {
                    0
                } else {
                    count += 1;
                    count - 1
                };
                arcs.push((at, l, next));
                arcs.push((next, l.inverse(), at));
                at = next;
            }
        }
        let mut null = vec![vec![false; count]; count];
        for (v, row) in null.iter_mut().enumerate() {
            row[v] = true;
        }
        loop {
            let mut changed = false;
            for &(u, l, u2) in &arcs {
                for &(v2, m, v) in &arcs {
                    if m == l.inverse() && null[u2][v2] && !null[u][v] {
                        null[u][v] = true;
                        changed = true;
                    }
                }
            }
            for a in 0..count {
                for b in 0..count {
                    if null[a][b] && a != b {
                        let via = null[b].clone();
                        for (c, reach) in via.into_iter().enumerate() {
                            if reach && !null[a][c] {
                                null[a][c] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        UnfoldedOracle { arcs, null }
    }

    fn close(&self, set: &[bool]) -> Vec<bool> {
        let mut out = vec![false; set.len()];
        for (u, &on) in set.iter().enumerate() {
            if on {
                for (v, o) in out.iter_mut().enumerate() {
                    *o |= self.null[u][v];
                }
            }
        }
        out
    }

    fn contains(&self, w: &Word) -> bool {
        let mut set = vec![false; self.null.len()];
        set[0] = true;
        set = self.close(&set);
        for &l in w.letters() {
            let mut next = vec![false; set.len()];
            for &(u, m, v) in &self.arcs {
                if m == l && set[u] {
                    next[v] = true;
                }
            }
            set = self.close(&next);
        }
        set[0]
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn multiplication_is_associative_with_identity(a in word(3, 10), b in word(3, 10), c in word(3, 10)) {
        let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        let one = Word::identity(alphabet(3));
        prop_assert_eq!(&a.multiply(&one).unwrap(), &a);
        prop_assert_eq!(&one.multiply(&a).unwrap(), &a);
    }

    #[test]
    fn homomorphism_law(images in prop::collection::vec(word(3, 5), 3), u in word(3, 8), v in word(3, 8)) {
        let e = Endomorphism::new(alphabet(3), images).unwrap();
        let lhs = e.apply(&u.multiply(&v).unwrap()).unwrap();
        let rhs = e.apply(&u).unwrap().multiply(&e.apply(&v).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn free_reduce_is_idempotent(raw in letters(3, 20)) {
        let once = free_reduce(&raw);
        prop_assert_eq!(free_reduce(&once), once.clone());
        prop_assert!(once.windows(2).all(|p| p[1] != p[0].inverse()));
    }

    #[test]
    fn product_length_and_parity(a in word(3, 12), b in word(3, 12)) {
        let ab = a.multiply(&b).unwrap();
        prop_assert!(ab.len() <= a.len() + b.len());
        prop_assert_eq!((a.len() + b.len() - ab.len()) % 2, 0);
        prop_assert!(a.multiply(&a.inverse()).unwrap().is_identity());
    }

    #[test]
    fn cyclic_reduction_conjugates_back(a in word(3, 14)) {
        let (core, conj) = a.cyclically_reduce();
        let back = conj.multiply(&core).unwrap().multiply(&conj.inverse()).unwrap();
        prop_assert_eq!(back, a.clone());
        prop_assert_eq!(core.is_empty(), a.is_identity());
        if let (Some(first), Some(last)) = (core.letters().first(), core.letters().last()) {
            prop_assert!(core.len() == 1 || *last != first.inverse());
        }
    }

    #[test]
    fn parse_display_round_trip(a in word(4, 12)) {
        prop_assert_eq!(Word::parse(&a.to_string(), alphabet(4)).unwrap(), a);
    }

    #[test]
    fn composition_applies_left_to_right(
        e1 in prop::collection::vec(word(2, 4), 2),
        e2 in prop::collection::vec(word(2, 4), 2),
        w in word(2, 8),
    ) {
        let (e1, e2) = (Endomorphism::new(alphabet(2), e1).unwrap(), Endomorphism::new(alphabet(2), e2).unwrap());
        let both = e1.compose(&e2).unwrap();
        prop_assert_eq!(both.apply(&w).unwrap(), e2.apply(&e1.apply(&w).unwrap()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn folding_is_confluent((n, gens) in subgroup(3, 4, 6), seed in any::<u64>()) {
        let a = alphabet(n);
        let bouquet = StallingsGraph::bouquet(&gens, a).unwrap();
        let reference = bouquet.fold().canonical_code();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let mut edges: Vec<Edge> = bouquet.edges().to_vec();
            edges.shuffle(&mut rng);
            let shuffled = StallingsGraph::from_edges(a, bouquet.vertex_count(), bouquet.base(), edges).unwrap();
            prop_assert_eq!(shuffled.fold().canonical_code(), reference.clone());
        }
    }

    #[test]
    fn folding_preserves_the_language((n, gens) in subgroup(2, 3, 5)) {
        let a = alphabet(n);
        let graph = StallingsGraph::subgroup_graph(&gens, a).unwrap();
        let oracle = UnfoldedOracle::new(&gens);
        let short = brute_force_members_with_cap(&gens, a, 8, 200_000);
        for w in all_words(a, 8) {
            let member = graph.contains(&w).unwrap();
            prop_assert_eq!(member, oracle.contains(&w), "word {}", w);
        }
        if let Ok(products) = short {
            for w in products {
                prop_assert!(graph.contains(&w).unwrap(), "product {} missing", w);
            }
        }
    }

    #[test]
    fn trim_keeps_base_and_membership((n, gens) in subgroup(2, 3, 5)) {
        let a = alphabet(n);
        let folded = StallingsGraph::bouquet(&gens, a).unwrap().fold();
        let trimmed = folded.trim();
        prop_assert!(trimmed.vertex_count() >= 1);
        for w in all_words(a, 6) {
            prop_assert_eq!(folded.contains(&w).unwrap(), trimmed.contains(&w).unwrap());
        }
    }

    #[test]
    fn basis_regenerates_the_graph((n, gens) in subgroup(3, 4, 6)) {
        let a = alphabet(n);
        let g = StallingsGraph::subgroup_graph(&gens, a).unwrap();
        let basis = g.basis();
        prop_assert_eq!(basis.len(), g.rank());
        prop_assert_eq!(StallingsGraph::subgroup_graph(&basis, a).unwrap().canonical_code(), g.canonical_code());
    }

    #[test]
    fn intersection_is_symmetric_and_exact(
        gens_a in generator_set(2, 3, 4),
        gens_b in generator_set(2, 3, 4),
    ) {
        let a2 = alphabet(2);
        let a = StallingsGraph::subgroup_graph(&gens_a, a2).unwrap();
        let b = StallingsGraph::subgroup_graph(&gens_b, a2).unwrap();
        let ab = intersect(&a, &b).unwrap();
        prop_assert_eq!(ab.canonical_code(), intersect(&b, &a).unwrap().canonical_code());
        prop_assert!(ab.vertex_count() <= a.vertex_count() * b.vertex_count());
        for w in all_words(a2, 8) {
            let both = a.contains(&w).unwrap() && b.contains(&w).unwrap();
            prop_assert_eq!(ab.contains(&w).unwrap(), both, "word {}", w);
        }
    }

    #[test]
    fn prefix_restriction_and_profile((n, gens) in subgroup(4, 4, 6)) {
        let a = alphabet(n);
        let h = StallingsGraph::subgroup_graph(&gens, a).unwrap();
        prop_assert_eq!(restrict_to_prefix(&h, n).unwrap().canonical_code(), h.canonical_code());
        let profile = rank_profile(&h);
        prop_assert!(profile.is_monotone());
        prop_assert_eq!(profile.values()[0], 0);
        prop_assert_eq!(profile.values()[n], h.rank());
        for i in 0..=n {
            let prefix = StallingsGraph::subgroup_graph(&a.generators()[..i], a).unwrap();
            prop_assert_eq!(
                restrict_to_prefix(&h, i).unwrap().canonical_code(),
                intersect(&h, &prefix).unwrap().canonical_code()
            );
        }
    }

    #[test]
    fn one_generator_images((n, moved, image) in (1..=4usize).prop_flat_map(|n| (Just(n), 1..=n, word(n, 6)))) {
        let a = alphabet(n);
        let e = OneGenEndo::new(a, moved, image.clone()).unwrap();
        let h = e.to_endomorphism().image();
        let others: Vec<Word> = (1..=n).filter(|&g| g != moved).map(|g| Word::generator(a, g)).collect();
        let in_others = StallingsGraph::subgroup_graph(&others, a).unwrap().contains(&image).unwrap();
        prop_assert_eq!(h.rank(), if in_others { n - 1 } else { n });
        let mut order: Vec<Word> = others.clone();
        order.push(Word::generator(a, moved));
        let basis = OrderedBasis::new(order, a).unwrap();
        let (echelon, profile) = is_echelon_wrt(&h, &basis).unwrap();
        prop_assert!(echelon, "profile {}", profile);
    }

    #[test]
    fn fixed_subgroups_are_fixed_pointwise(
        (n, fixed_mask, images, picks) in (2..=3usize).prop_flat_map(|n| (
            Just(n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(word(n, 3), n),
            prop::collection::vec(letters(n, 4), 1..=3),
        ))
    ) {
        let a = alphabet(n);
        let images: Vec<Word> = images
            .into_iter()
            .enumerate()
            .map(|(i, w)| if fixed_mask[i] { Word::generator(a, i + 1) } else { w })
            .collect();
        let e = Endomorphism::new(a, images).unwrap();
        let fixed_gens: Vec<usize> = (1..=n).filter(|&g| fixed_mask[g - 1]).collect();
        let gens: Vec<Word> = picks
            .iter()
            .map(|ls| {
                let kept: Vec<Letter> = ls
                    .iter()
                    .filter(|l| fixed_gens.contains(&l.gen()))
                    .copied()
                    .collect();
                Word::new(a, &kept).unwrap()
            })
            .collect();
        prop_assert!(e.fixes(&gens).unwrap());
        for w in brute_force_members_with_cap(&gens, a, 6, 500_000).unwrap() {
            prop_assert_eq!(e.apply(&w).unwrap(), w);
        }
    }
}
