//! Synthetic inputs for the benchmarks.

use apekit_core::{Corpus, Triplet};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "the", "house", "is", "small", "we", "go", "home", "now", "a", "very", "old", "man", "sees", "dog", "under",
    "tree", "and", "then", "it", "rains", "again", "tomorrow", "maybe", "not",
];

pub fn sentence(rng: &mut impl Rng, min: usize, max: usize) -> String {
    let n = rng.random_range(min..=max);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

/// Hypothesis/reference pairs where the hypothesis is a lightly edited reference.
pub fn text_pairs(n: usize, seed: u64) -> (Vec<String>, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let refs: Vec<String> = (0..n).map(|_| sentence(&mut rng, 5, 25)).collect();
    let hyps = refs
        .iter()
        .map(|r| {
            let mut w: Vec<&str> = r.split(' ').collect();
            for _ in 0..rng.random_range(0..4) {
                let i = rng.random_range(0..w.len());
                match rng.random_range(0..3) {
                    0 => w[i] = WORDS.choose(&mut rng).unwrap(),
                    1 if w.len() > 1 => {
                        w.remove(i);
                    }
                    _ => {
                        let j = rng.random_range(0..w.len());
                        w.swap(i, j);
                    }
                }
            }
            w.join(" ")
        })
        .collect();
    (hyps, refs)
}

pub fn corpus(n: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Corpus::from_triplets(
        (0..n)
            .map(|i| {
                let src = sentence(&mut rng, 4, 20);
                let mt = sentence(&mut rng, 4, 20);
                let pe = if rng.random_bool(0.5) { mt.clone() } else { sentence(&mut rng, 4, 20) };
                Triplet::new(format!("{i:08}"), src, mt, pe)
            })
            .collect(),
    )
    .with_langs("en", "de")
}
