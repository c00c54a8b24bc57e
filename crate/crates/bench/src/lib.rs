//! Seeded synthetic inputs shared by the benchmarks.

use meddialog::stats::{Category, Item, RatingTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "pijn", "klachten", "medicatie", "bloed", "uitslag", "rug", "hoofd", "moe", "slapen", "roken", "bewegen",
    "eten", "dag", "week", "morgen", "goed", "slecht", "soms", "altijd", "nooit", "ik", "u", "het", "de",
    "een", "heb", "heeft", "is", "niet", "wel", "nog", "ook", "waar", "hoe", "wanneer", "paracetamol",
];

/// `n` token ids drawn from a vocabulary of `vocab` types.
pub fn token_stream(seed: u64, n: usize, vocab: u32) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0..vocab)).collect()
}

/// A labelled doctor–patient transcript with `turns` turns.
pub fn transcript(seed: u64, turns: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("Arts: Goedemorgen, wat kan ik voor u doen?\n");
    for t in 1..turns {
        let label = if t % 2 == 0 || rng.random_bool(0.05) { "Arts" } else { "Patiënt" };
        out.push_str(label);
        out.push(':');
        for s in 0..rng.random_range(1..4) {
            for w in 0..rng.random_range(3..12) {
                let word = WORDS[rng.random_range(0..WORDS.len())];
                out.push(' ');
                if w == 0 && s == 0 {
                    let mut c = word.chars();
                    out.extend(c.next().map(|f| f.to_ascii_uppercase()));
                    out.push_str(c.as_str());
                } else {
                    out.push_str(word);
                }
            }
            out.push(if rng.random_bool(0.3) { '?' } else { '.' });
        }
        out.push('\n');
    }
    out.push_str("Arts: Tot ziens en beterschap.\n");
    out
}

/// Independent uniform scores for every rater × dialogue × category cell,
/// with roughly `missing` of the cells left empty.
pub fn ratings(seed: u64, raters: usize, dialogues: usize, missing: f64) -> RatingTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = RatingTable::new();
    for r in 0..raters {
        for d in 0..dialogues {
            for cat in Category::ALL {
                if rng.random_bool(missing) {
                    continue;
                }
                table
                    .insert(&format!("R{r}"), Item::new(format!("D{d}"), cat), rng.random_range(0..=5))
                    .expect("fresh cell");
            }
        }
    }
    table
}
