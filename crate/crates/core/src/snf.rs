//! Exact linear algebra over the supported rings: Smith normal form over Z,
//! kernels, exact solving, saturation and primitivity of sublattices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::Mat;
use crate::ring::Ring;
use crate::{Error, Result};

/// Decomposition `A = U * D * W` with `U`, `W` unimodular and `D` diagonal
/// with nonnegative entries satisfying `d1 | d2 | ...`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: Mat,
    pub u_inv: Mat,
    pub d: Mat,
    pub w: Mat,
    pub w_inv: Mat,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        let n = self.d.rows().min(self.d.cols());
        (0..n).filter(|&i| !self.d.at(i, i).is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.at(i, i).clone()).collect()
    }

    /// Nontrivial invariant factors (the diagonal with units and zeros dropped).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect()
    }

    pub fn verify(&self, a: &Mat) -> bool {
        self.u.mm(&self.d).mm(&self.w) == *a
            && self.u.mm(&self.u_inv).is_identity()
            && self.w.mm(&self.w_inv).is_identity()
            && self.chain_ok()
    }

    fn chain_ok(&self) -> bool {
        let diag = self.diagonal();
        for i in 0..diag.len() {
            if diag[i].is_negative() {
                return false;
            }
            if i + 1 < diag.len() {
                let (a, b) = (&diag[i], &diag[i + 1]);
                if a.is_zero() && !b.is_zero() {
                    return false;
                }
                if !a.is_zero() && !b.mod_floor(a).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

struct Calc {
    d: Mat,
    u: Mat,
    u_inv: Mat,
    w: Mat,
    w_inv: Mat,
}

impl Calc {
    fn new(a: &Mat) -> Calc {
        let r = Ring::Z;
        Calc {
            d: a.clone(),
            u: Mat::identity(r, a.rows()),
            u_inv: Mat::identity(r, a.rows()),
            w: Mat::identity(r, a.cols()),
            w_inv: Mat::identity(r, a.cols()),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.d.cols() {
            let (a, b) = (self.d.at(i, c).clone(), self.d.at(j, c).clone());
            self.d.set(i, c, b);
            self.d.set(j, c, a);
        }
        for c in 0..self.u_inv.cols() {
            let (a, b) = (self.u_inv.at(i, c).clone(), self.u_inv.at(j, c).clone());
            self.u_inv.set(i, c, b);
            self.u_inv.set(j, c, a);
        }
        for r in 0..self.u.rows() {
            let (a, b) = (self.u.at(r, i).clone(), self.u.at(r, j).clone());
            self.u.set(r, i, b);
            self.u.set(r, j, a);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.d.rows() {
            let (a, b) = (self.d.at(r, i).clone(), self.d.at(r, j).clone());
            self.d.set(r, i, b);
            self.d.set(r, j, a);
        }
        for r in 0..self.w_inv.rows() {
            let (a, b) = (self.w_inv.at(r, i).clone(), self.w_inv.at(r, j).clone());
            self.w_inv.set(r, i, b);
            self.w_inv.set(r, j, a);
        }
        for c in 0..self.w.cols() {
            let (a, b) = (self.w.at(i, c).clone(), self.w.at(j, c).clone());
            self.w.set(i, c, b);
            self.w.set(j, c, a);
        }
    }

    /// row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.d.cols() {
            let v = self.d.at(i, k) + c * self.d.at(j, k);
            self.d.set(i, k, v);
        }
        for k in 0..self.u_inv.cols() {
            let v = self.u_inv.at(i, k) + c * self.u_inv.at(j, k);
            self.u_inv.set(i, k, v);
        }
        // u <- u * (I - c e_ij): col_j -= c * col_i
        for r in 0..self.u.rows() {
            let v = self.u.at(r, j) - c * self.u.at(r, i);
            self.u.set(r, j, v);
        }
    }

    /// col_j += c * col_i
    fn add_col(&mut self, j: usize, i: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.d.rows() {
            let v = self.d.at(k, j) + c * self.d.at(k, i);
            self.d.set(k, j, v);
        }
        for k in 0..self.w_inv.rows() {
            let v = self.w_inv.at(k, j) + c * self.w_inv.at(k, i);
            self.w_inv.set(k, j, v);
        }
        // w <- (I - c e_ij) * w: row_i -= c * row_j
        for k in 0..self.w.cols() {
            let v = self.w.at(i, k) - c * self.w.at(j, k);
            self.w.set(i, k, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for k in 0..self.d.cols() {
            let v = -self.d.at(i, k);
            self.d.set(i, k, v);
        }
        for k in 0..self.u_inv.cols() {
            let v = -self.u_inv.at(i, k);
            self.u_inv.set(i, k, v);
        }
        for r in 0..self.u.rows() {
            let v = -self.u.at(r, i);
            self.u.set(r, i, v);
        }
    }

    fn smallest_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for r in t..self.d.rows() {
            for c in t..self.d.cols() {
                let v = self.d.at(r, c);
                if v.is_zero() {
                    continue;
                }
                let a = v.abs();
                match &best {
                    Some((_, _, m)) if *m <= a => {}
                    _ => best = Some((r, c, a)),
                }
            }
        }
        best.map(|(r, c, _)| (r, c))
    }

    fn run(&mut self) {
        let n = self.d.rows().min(self.d.cols());
        let mut t = 0;
        while t < n {
            let Some((pr, pc)) = self.smallest_pivot(t) else { break };
            self.swap_rows(t, pr);
            self.swap_cols(t, pc);
            loop {
                let mut clean = true;
                for r in t + 1..self.d.rows() {
                    if self.d.at(r, t).is_zero() {
                        continue;
                    }
                    let q = self.d.at(r, t).div_floor(self.d.at(t, t));
                    self.add_row(r, t, &-q);
                    if !self.d.at(r, t).is_zero() {
                        // remainder becomes the new, smaller pivot
                        self.swap_rows(t, r);
                        clean = false;
                    }
                }
                for c in t + 1..self.d.cols() {
                    if self.d.at(t, c).is_zero() {
                        continue;
                    }
                    let q = self.d.at(t, c).div_floor(self.d.at(t, t));
                    self.add_col(c, t, &-q);
                    if !self.d.at(t, c).is_zero() {
                        self.swap_cols(t, c);
                        clean = false;
                    }
                }
                let row_clean = (t + 1..self.d.cols()).all(|c| self.d.at(t, c).is_zero());
                let col_clean = (t + 1..self.d.rows()).all(|r| self.d.at(r, t).is_zero());
                if clean && row_clean && col_clean {
                    break;
                }
            }
            t += 1;
        }
        // sign normalization
        for i in 0..n {
            if self.d.at(i, i).is_negative() {
                self.negate_row(i);
            }
        }
        // divisibility chain
        loop {
            let r = (0..n).filter(|&i| !self.d.at(i, i).is_zero()).count();
            let mut fixed = true;
            for i in 0..r.saturating_sub(1) {
                let a = self.d.at(i, i).clone();
                let b = self.d.at(i + 1, i + 1).clone();
                if !b.mod_floor(&a).is_zero() {
                    // fold d_{i+1} into column i and re-eliminate the 2x2 block
                    self.add_col(i, i + 1, &BigInt::one());
                    self.eliminate_pair(i);
                    fixed = false;
                }
            }
            if fixed {
                break;
            }
        }
    }

    /// Re-diagonalize the 2x2 block at (i, i) after a divisibility fix.
    fn eliminate_pair(&mut self, i: usize) {
        loop {
            let (a, c) = (self.d.at(i, i).clone(), self.d.at(i + 1, i).clone());
            if c.is_zero() {
                break;
            }
            if a.is_zero() || (!a.is_zero() && c.abs() < a.abs()) {
                self.swap_rows(i, i + 1);
                continue;
            }
            let q = c.div_floor(&a);
            self.add_row(i + 1, i, &-q);
        }
        // clear the fill-in in row i
        loop {
            let (a, b) = (self.d.at(i, i).clone(), self.d.at(i, i + 1).clone());
            if b.is_zero() {
                break;
            }
            if a.is_zero() || b.abs() < a.abs() {
                self.swap_cols(i, i + 1);
                continue;
            }
            let q = b.div_floor(&a);
            self.add_col(i + 1, i, &-q);
        }
        // the row-clearing may have reintroduced a column entry
        if !self.d.at(i + 1, i).is_zero() {
            self.eliminate_pair(i);
        }
        if self.d.at(i, i).is_negative() {
            self.negate_row(i);
        }
        if self.d.at(i + 1, i + 1).is_negative() {
            self.negate_row(i + 1);
        }
    }
}

/// Smith normal form of an integer matrix, with unimodular transforms.
/// Matrices with large entries are LLL-preprocessed column-wise, which keeps
/// the elimination from exploding on nearly parallel columns.
pub fn smith_normal_form(a: &Mat) -> Result<SnfResult> {
    if a.ring() != Ring::Z {
        return Err(Error::Ring(format!("smith normal form requires Z, got {}", a.ring())));
    }
    let big = a.max_abs() > BigInt::from(1u64 << 20);
    let (work, t) = if big && a.cols() >= 2 {
        let (red, t) = lll_reduce_with_transform(a);
        (red, Some(t))
    } else {
        (a.clone(), None)
    };
    let mut calc = Calc::new(&work);
    calc.run();
    let (w, w_inv) = match t {
        None => (calc.w, calc.w_inv),
        Some(t) => {
            // a * t = work = u d w  =>  a = u d (w t^{-1})
            let t_inv = t.inverse()?;
            (calc.w.mm(&t_inv), t.mm(&calc.w_inv))
        }
    };
    let res = SnfResult { u: calc.u, u_inv: calc.u_inv, d: calc.d, w, w_inv };
    debug_assert!(res.verify(a));
    Ok(res)
}

pub fn rank(a: &Mat) -> Result<usize> {
    match a.ring() {
        Ring::Z => Ok(smith_normal_form(a)?.rank()),
        Ring::Fp { .. } => Ok(row_echelon(a)?.1),
        Ring::Zmod { .. } => Err(Error::Ring("rank over a composite residue ring".into())),
    }
}

/// Row echelon form over a field; returns (reduced matrix, rank, pivot columns).
fn row_echelon(a: &Mat) -> Result<(Mat, usize, Vec<usize>)> {
    if !a.ring().is_field() {
        return Err(Error::Ring("row echelon requires a field".into()));
    }
    let ring = a.ring();
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols() {
        if row >= m.rows() {
            break;
        }
        let Some(p) = (row..m.rows()).find(|&r| !m.at(r, col).is_zero()) else { continue };
        for c in 0..m.cols() {
            let (x, y) = (m.at(row, c).clone(), m.at(p, c).clone());
            m.set(row, c, y);
            m.set(p, c, x);
        }
        let inv = ring.inv(m.at(row, col))?;
        for c in 0..m.cols() {
            let v = ring.mul(m.at(row, c), &inv);
            m.set(row, c, v);
        }
        for r in 0..m.rows() {
            if r == row || m.at(r, col).is_zero() {
                continue;
            }
            let f = m.at(r, col).clone();
            for c in 0..m.cols() {
                let v = ring.sub(m.at(r, c), &ring.mul(&f, m.at(row, c)));
                m.set(r, c, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    Ok((m, row, pivots))
}

/// Lattice (LLL) reduction of the columns of an integer matrix: returns a
/// basis of the same column lattice with controlled entry growth.  Used to
/// keep kernel and complement bases short; every caller's contract is
/// invariant under unimodular basis changes.
pub fn lll_reduce(m: &Mat) -> Mat {
    lll_reduce_with_transform(m).0
}

/// Reduce only when the entries are big enough for it to pay off.
fn lll_if_large(m: Mat) -> Mat {
    if m.max_abs() > BigInt::from(1u64 << 16) {
        lll_reduce(&m)
    } else {
        m
    }
}

/// LLL reduction returning also the unimodular column transform `t` with
/// `m * t = reduced`.
pub fn lll_reduce_with_transform(m: &Mat) -> (Mat, Mat) {
    use num_rational::BigRational;
    let ident = Mat::identity(Ring::Z, m.cols());
    if m.ring() != Ring::Z || m.cols() < 2 || m.rows() == 0 {
        return (m.clone(), ident);
    }
    let n = m.cols();
    let dim = m.rows();
    let mut b: Vec<Vec<BigInt>> =
        (0..n).map(|c| (0..dim).map(|r| m.at(r, c).clone()).collect()).collect();
    let mut t: Vec<Vec<BigInt>> =
        (0..n).map(|c| (0..n).map(|r| ident.at(r, c).clone()).collect()).collect();
    // Gram-Schmidt data, recomputed from scratch (ranks here are small)
    let gs = |b: &Vec<Vec<BigInt>>| -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
        let nn = b.len();
        let mut mu = vec![vec![BigRational::zero(); nn]; nn];
        let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(nn);
        let mut norm = vec![BigRational::zero(); nn];
        for i in 0..nn {
            let mut v: Vec<BigRational> =
                b[i].iter().map(|x| BigRational::from(x.clone())).collect();
            for j in 0..i {
                if norm[j].is_zero() {
                    continue;
                }
                let num: BigRational = b[i]
                    .iter()
                    .zip(star[j].iter())
                    .map(|(x, s)| BigRational::from(x.clone()) * s)
                    .sum();
                mu[i][j] = num / &norm[j];
                for (vk, sk) in v.iter_mut().zip(star[j].iter()) {
                    *vk -= &mu[i][j] * sk;
                }
            }
            norm[i] = v.iter().map(|x| x * x).sum();
            star.push(v);
        }
        (mu, norm)
    };
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mut k = 1usize;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 10_000 {
            break; // refuse to loop forever; the unreduced basis is still valid
        }
        let (mu, norm) = gs(&b);
        // size reduction of b_k
        for j in (0..k).rev() {
            let q = (&mu[k][j] + &half).floor().to_integer();
            if !q.is_zero() {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(bj.iter()) {
                    *x -= &q * y;
                }
                let tj = t[j].clone();
                for (x, y) in t[k].iter_mut().zip(tj.iter()) {
                    *x -= &q * y;
                }
            }
        }
        let (mu, norm2) = gs(&b);
        let _ = norm;
        // Lovasz condition
        let lhs = &norm2[k] + &(&mu[k][k - 1] * &mu[k][k - 1]) * &norm2[k - 1];
        if lhs >= &delta * &norm2[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            t.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }
    (
        Mat::from_fn(Ring::Z, dim, n, |r, c| b[c][r].clone()),
        Mat::from_fn(Ring::Z, n, n, |r, c| t[c][r].clone()),
    )
}

/// Basis of the kernel of `A`, as matrix columns.  Over Z the basis spans the
/// kernel as a primitive sublattice (a direct summand) and is LLL-reduced to
/// keep entries small.
pub fn kernel_basis(a: &Mat) -> Result<Mat> {
    match a.ring() {
        Ring::Z => {
            let snf = smith_normal_form(a)?;
            let r = snf.rank();
            let idx: Vec<usize> = (r..a.cols()).collect();
            Ok(lll_if_large(snf.w_inv.select_columns(&idx)))
        }
        Ring::Fp { .. } => {
            let ring = a.ring();
            let (m, _rank, pivots) = row_echelon(a)?;
            let free: Vec<usize> = (0..a.cols()).filter(|c| !pivots.contains(c)).collect();
            let mut k = Mat::zero(ring, a.cols(), free.len());
            for (j, &fc) in free.iter().enumerate() {
                k.set(fc, j, BigInt::one());
                for (i, &pc) in pivots.iter().enumerate() {
                    k.set(pc, j, ring.neg(m.at(i, fc)));
                }
            }
            Ok(k)
        }
        Ring::Zmod { .. } => Err(Error::Ring("kernels over a composite residue ring".into())),
    }
}

/// Solve `A X = B` exactly; `None` when no solution exists over the ring.
pub fn solve(a: &Mat, b: &Mat) -> Result<Option<Mat>> {
    if a.rows() != b.rows() {
        return Err(Error::Shape("solve: row mismatch".into()));
    }
    match a.ring() {
        Ring::Z => {
            let snf = smith_normal_form(a)?;
            let c = snf.u_inv.mm(b);
            let n = a.cols();
            let mut y = Mat::zero(Ring::Z, n, b.cols());
            for col in 0..b.cols() {
                for i in 0..a.rows() {
                    let rhs = c.at(i, col);
                    let d = if i < n { snf.d.at(i, i).clone() } else { BigInt::zero() };
                    if d.is_zero() {
                        if !rhs.is_zero() {
                            return Ok(None);
                        }
                        continue;
                    }
                    let (q, r) = rhs.div_rem(&d);
                    if !r.is_zero() {
                        return Ok(None);
                    }
                    y.set(i, col, q);
                }
            }
            Ok(Some(snf.w_inv.mm(&y)))
        }
        Ring::Fp { .. } => {
            let ring = a.ring();
            let aug = a.hstack(b)?;
            let (m, _r, pivots) = row_echelon(&aug)?;
            if pivots.iter().any(|&p| p >= a.cols()) {
                return Ok(None);
            }
            let mut x = Mat::zero(ring, a.cols(), b.cols());
            for (i, &p) in pivots.iter().enumerate() {
                for col in 0..b.cols() {
                    x.set(p, col, m.at(i, a.cols() + col).clone());
                }
            }
            Ok(Some(x))
        }
        Ring::Zmod { .. } => Err(Error::Ring("solving over a composite residue ring".into())),
    }
}

/// Whether the columns of `v` form part of a basis of the ambient lattice
/// (over a field: are linearly independent).
pub fn is_primitive(v: &Mat) -> Result<bool> {
    if v.cols() == 0 {
        return Ok(true);
    }
    match v.ring() {
        Ring::Z => {
            let snf = smith_normal_form(v)?;
            Ok(snf.rank() == v.cols() && snf.diagonal().iter().all(|d| d.is_one()))
        }
        Ring::Fp { .. } => Ok(rank(v)? == v.cols()),
        Ring::Zmod { .. } => Err(Error::Ring("primitivity over a composite residue ring".into())),
    }
}

/// Basis of the saturation of the column span (smallest direct summand
/// containing it).  Over a field this is just a basis of the span.
pub fn saturate(v: &Mat) -> Result<Mat> {
    match v.ring() {
        Ring::Z => {
            let snf = smith_normal_form(v)?;
            let idx: Vec<usize> = (0..snf.rank()).collect();
            Ok(lll_if_large(snf.u.select_columns(&idx)))
        }
        Ring::Fp { .. } => {
            let (_, r, _) = row_echelon(&v.transpose())?;
            let (m, _, _) = row_echelon(&v.transpose())?;
            Ok(m.submatrix(0, r, 0, m.cols()).transpose())
        }
        Ring::Zmod { .. } => Err(Error::Ring("saturation over a composite residue ring".into())),
    }
}

/// Columns completing a primitive `v` to a basis of the ambient lattice.
pub fn complement_of_primitive(v: &Mat) -> Result<Mat> {
    if !is_primitive(v)? {
        return Err(Error::Precondition("complement of a non-primitive sublattice".into()));
    }
    match v.ring() {
        Ring::Z => {
            let snf = smith_normal_form(v)?;
            let idx: Vec<usize> = (v.cols()..v.rows()).collect();
            Ok(lll_if_large(snf.u.select_columns(&idx)))
        }
        Ring::Fp { .. } => {
            // extend to a basis by greedily adding standard vectors
            let ring = v.ring();
            let mut basis = v.clone();
            for i in 0..v.rows() {
                if basis.cols() == v.rows() {
                    break;
                }
                let mut e = Mat::zero(ring, v.rows(), 1);
                e.set(i, 0, BigInt::one());
                let cand = basis.hstack(&e)?;
                if rank(&cand)? == cand.cols() {
                    basis = cand;
                }
            }
            Ok(basis.submatrix(0, v.rows(), v.cols(), basis.cols()))
        }
        Ring::Zmod { .. } => Err(Error::Ring("complement over a composite residue ring".into())),
    }
}

/// Express `x` in the column basis `basis` (requires an exact solution).
pub fn coordinates_in(basis: &Mat, x: &Mat) -> Result<Option<Mat>> {
    solve(basis, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf_diag(data: &[&[i64]]) -> Vec<i64> {
        let a = Mat::from_rows(Ring::Z, data);
        let r = smith_normal_form(&a).unwrap();
        assert!(r.verify(&a), "U*D*W != A or transforms not unimodular");
        r.diagonal().iter().map(|d| i64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn snf_identity() {
        assert_eq!(snf_diag(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), vec![1, 1, 1]);
    }

    #[test]
    fn snf_reorders_divisibility() {
        assert_eq!(snf_diag(&[&[6, 0], &[0, 2]]), vec![2, 6]);
    }

    #[test]
    fn snf_hand_reduced_example() {
        // row/column reduction oracle: d1 = gcd of entries = 2, d1*d2 = |det| = 12
        assert_eq!(snf_diag(&[&[2, 4], &[0, 6]]), vec![2, 6]);
    }

    #[test]
    fn snf_rectangular_and_zero() {
        assert_eq!(snf_diag(&[&[0, 0], &[0, 0]]), vec![0, 0]);
        let a = Mat::from_rows(Ring::Z, &[&[2, 4, 6]]);
        let r = smith_normal_form(&a).unwrap();
        assert!(r.verify(&a));
        assert_eq!(r.diagonal(), vec![BigInt::from(2)]);
    }

    #[test]
    fn snf_rejects_non_z() {
        let a = Mat::zero(Ring::fp(3).unwrap(), 2, 2);
        assert!(smith_normal_form(&a).is_err());
    }

    #[test]
    fn kernel_examples() {
        let z = Ring::Z;
        let k = kernel_basis(&Mat::zero(z, 2, 2)).unwrap();
        assert_eq!(k.cols(), 2);
        assert!(k.is_unimodular());

        let k = kernel_basis(&Mat::identity(z, 2)).unwrap();
        assert_eq!(k.cols(), 0);

        let a = Mat::from_rows(z, &[&[1, 2]]);
        let k = kernel_basis(&a).unwrap();
        assert_eq!(k.cols(), 1);
        assert!(a.mm(&k).is_zero());
        assert!(is_primitive(&k).unwrap());
    }

    #[test]
    fn kernel_rank_identity() {
        let a = Mat::from_rows(Ring::Z, &[&[2, 4, 6], &[1, 2, 3]]);
        let k = kernel_basis(&a).unwrap();
        assert!(a.mm(&k).is_zero());
        assert_eq!(k.cols(), a.cols() - rank(&a).unwrap());
    }

    #[test]
    fn kernel_over_field() {
        let f3 = Ring::fp(3).unwrap();
        let a = Mat::from_rows(f3, &[&[1, 2, 0], &[0, 1, 1]]);
        let k = kernel_basis(&a).unwrap();
        assert!(a.mm(&k).is_zero());
        assert_eq!(k.cols(), 1);
    }

    #[test]
    fn solve_integer() {
        let a = Mat::from_rows(Ring::Z, &[&[2, 0], &[0, 3]]);
        let b = Mat::col_vec(Ring::Z, &[4, 9]);
        let x = solve(&a, &b).unwrap().unwrap();
        assert_eq!(a.mm(&x), b);
        let b2 = Mat::col_vec(Ring::Z, &[1, 0]);
        assert!(solve(&a, &b2).unwrap().is_none());
    }

    #[test]
    fn primitive_and_complement() {
        let v = Mat::from_rows(Ring::Z, &[&[1], &[3]]);
        assert!(is_primitive(&v).unwrap());
        let c = complement_of_primitive(&v).unwrap();
        assert!(v.hstack(&c).unwrap().is_unimodular());

        let v2 = Mat::from_rows(Ring::Z, &[&[2], &[4]]);
        assert!(!is_primitive(&v2).unwrap());
        let s = saturate(&v2).unwrap();
        assert!(is_primitive(&s).unwrap());
        assert_eq!(s.cols(), 1);
    }
}
