//! Writes the synthetic game vocabulary used by the bundled fixtures:
//! `game_glove50.txt` (GloVe text format), `game_words.txt` and
//! `game_lexicon.txt`.
//!
//! Each vector mixes a shared component, a word-class component, a
//! synonym-group component and an individual component, then gets a random
//! norm in [3.5, 6). Words in the same group end up highly coherent.
//!
//!     cargo run -p bowsense --example gen_game_embeddings -- data 7

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const DIM: usize = 50;

const VERBS: &str = "take get grab drop throw discard kill attack hit open close climb enter exit move push turn tie \
put light ring read rub echo wave wait dig inflate launch go walk run examine look inventory give say pray lower \
raise wind unlock";
const DIRECTIONS: &str = "north south east west northeast northwest southeast southwest up down";
const PREPOSITIONS: &str = "in with to on off into from under";
const CREATURES: &str = "troll thief cyclops";
const OBJECTS: &str = "egg tree window sack garlic rope knife case lamp lantern sword rug trap door candles book bell \
match torch railing skull mirror bar painting boat pump buoy emerald shovel scarab sceptre pot gold rainbow coffin \
jade chalice diamond coal machine button bolt wrench screwdriver basket bracelet altar house bauble";

const GROUPS: &[&[&str]] = &[
    &["take", "get", "grab"],
    &["drop", "throw", "discard"],
    &["kill", "attack", "hit"],
    &["go", "walk", "run", "move"],
    &["north", "south", "east", "west"],
    &["northeast", "northwest", "southeast", "southwest"],
    &["up", "down"],
    &["lamp", "lantern", "torch"],
    &["in", "into"],
    &["on", "off"],
    &["open", "close"],
    &["lower", "raise"],
    &["emerald", "diamond", "jade"],
    &["sword", "knife"],
    &["egg", "bauble"],
];

// mixing weights: shared, class, group, individual
const WEIGHTS: [f64; 4] = [1.0, 0.8, 1.0, 0.5];

fn gaussian(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let s = (DIM as f64).sqrt();
    (0..DIM).map(|_| rng.sample::<f64, _>(StandardNormal) / s).collect()
}

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "data".into()));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed must be an integer"));

    let classes = [
        (VERBS, "verb"),
        (DIRECTIONS, "direction"),
        (PREPOSITIONS, "preposition"),
        (CREATURES, "object"),
        (OBJECTS, "object"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shared = gaussian(&mut rng);
    let class_vecs: Vec<Vec<f64>> = classes.iter().map(|_| gaussian(&mut rng)).collect();
    let mut group_vec: HashMap<&str, usize> = HashMap::new();
    let group_vecs: Vec<Vec<f64>> = GROUPS
        .iter()
        .enumerate()
        .map(|(g, words)| {
            for w in *words {
                group_vec.insert(w, g);
            }
            gaussian(&mut rng)
        })
        .collect();

    let (mut glove, mut words, mut lexicon) = (String::new(), String::new(), String::new());
    for (c, (list, tag)) in classes.iter().enumerate() {
        for w in list.split_whitespace() {
            let own = gaussian(&mut rng);
            let mut v: Vec<f64> = (0..DIM)
                .map(|k| {
                    let g = group_vec.get(w).map_or(0.0, |&g| group_vecs[g][k]);
                    WEIGHTS[0] * shared[k] + WEIGHTS[1] * class_vecs[c][k] + WEIGHTS[2] * g + WEIGHTS[3] * own[k]
                })
                .collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let target = rng.random_range(3.5..6.0);
            v.iter_mut().for_each(|x| *x *= target / norm);

            glove.push_str(w);
            for x in &v {
                write!(glove, " {x:.6}").unwrap();
            }
            glove.push('\n');
            writeln!(words, "{w}").unwrap();
            writeln!(lexicon, "{w} {tag}").unwrap();
            if w == "light" {
                lexicon.push_str("light object\n");
            }
        }
    }

    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("game_glove50.txt"), glove)?;
    std::fs::write(out.join("game_words.txt"), words)?;
    std::fs::write(out.join("game_lexicon.txt"), lexicon)?;
    Ok(())
}
