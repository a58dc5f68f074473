//! Writes one dense scene per condition family into the given directory.

use vsearch_core::{encode_png, make_rng, render_scene, stimgen::generate_scene, Family};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| ".".into());
    for family in Family::ALL {
        for (i, cond) in family.conditions().iter().enumerate() {
            let mut rng = make_rng(42 + i as u64);
            let n = family.max_distractors().min(30);
            let scene = generate_scene(&mut rng, cond, n, None).expect("scene");
            let path = format!("{out}/{}.png", cond.label().replace('/', "_"));
            std::fs::write(&path, encode_png(&render_scene(&scene))).expect("write");
        }
    }
}
