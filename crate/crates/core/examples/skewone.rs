use oddform_core::{matrix::Mat, monoid, ring::Ring, forms};
use std::time::Instant;

fn main() {
    let z = Ring::Z;
    let v = Mat::from_rows(z, &[
        &[1, 5, 2, -3, 1],
        &[-4, -1, -1, -4, -3],
        &[3, -1, -1, -1, 0],
        &[3, 3, 0, -3, -4],
        &[2, 1, 3, -1, 0],
        &[-2, -4, -4, -1, 5],
        &[2, -1, 2, 2, 4],
        &[2, -1, -1, -2, 5],
        &[2, -4, 0, 1, 5],
        &[-2, -1, -4, -2, -5],
    ]);
    let h = forms::hyperbolic(5, forms::Eps::Minus, z);
    let lam = h.lambda();
    let t = Instant::now();
    let w = monoid::isotropic_complement(&lam, &v);
    eprintln!("done in {:?} ok={}", t.elapsed(), w.is_ok());
}
