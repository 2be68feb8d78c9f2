use oddform_core::{monoid, random};
use rand::Rng;
use std::time::Instant;
fn main() {
    let mut rng = random::rng(0xB0C4);
    for i in 0..5 {
        let g = rng.gen_range(1..=5usize);
        let x = random::skew_quasi_formation(&mut rng, g, 5);
        eprintln!("== instance {i} g={g}");
        let t = Instant::now();
        let c = monoid::skew_elementary_certificate(&x);
        eprintln!("== done {:?} ok={}", t.elapsed(), c.is_ok());
    }
}
