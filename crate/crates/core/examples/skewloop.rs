use oddform_core::{monoid, random};
use rand::Rng;
use std::io::Write;
use std::time::Instant;

fn main() {
    let mut rng = random::rng(0xB0C4);
    for i in 0..1000 {
        let g = rng.gen_range(1..=5usize);
        let t = Instant::now();
        let x = random::skew_quasi_formation(&mut rng, g, 5);
        if i < 3 {
            eprintln!("instance {i} g={g} V = {:?}", x.v);
            std::io::stderr().flush().ok();
        }
        let cert = monoid::skew_elementary_certificate(&x);
        let dt = t.elapsed();
        if dt.as_millis() > 200 || cert.is_err() {
            eprintln!("i={i} g={g} took {dt:?} err={:?}", cert.err().map(|e| e.to_string()));
            eprintln!("V = {:?}", x.v);
            std::io::stderr().flush().ok();
        }
        if i % 100 == 0 {
            eprintln!("... {i}");
        }
    }
    eprintln!("all done");
}
