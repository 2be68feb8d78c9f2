//! Dense matrices with exact entries over a coefficient ring.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ring::Ring;
use crate::{Error, Result};

/// Row-major dense matrix.  All entries are kept reduced to the canonical
/// representative of the ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    ring: Ring,
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl Mat {
    pub fn zero(ring: Ring, rows: usize, cols: usize) -> Mat {
        Mat { ring, rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(ring: Ring, n: usize) -> Mat {
        let mut m = Mat::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_fn(ring: Ring, rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigInt) -> Mat {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(ring.reduce(&f(r, c)));
            }
        }
        Mat { ring, rows, cols, entries }
    }

    /// Convenience constructor from machine integers, row by row.
    pub fn from_rows(ring: Ring, data: &[&[i64]]) -> Mat {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        assert!(data.iter().all(|r| r.len() == cols), "ragged rows");
        Mat::from_fn(ring, rows, cols, |r, c| BigInt::from(data[r][c]))
    }

    pub fn col_vec(ring: Ring, data: &[i64]) -> Mat {
        Mat::from_fn(ring, data.len(), 1, |r, _| BigInt::from(data[r]))
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        let v = self.ring.reduce(&v);
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    if r == c {
                        self.at(r, c).is_one()
                    } else {
                        self.at(r, c).is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.ring, self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn neg(&self) -> Mat {
        Mat::from_fn(self.ring, self.rows, self.cols, |r, c| self.ring.neg(self.at(r, c)))
    }

    pub fn scale(&self, s: &BigInt) -> Mat {
        Mat::from_fn(self.ring, self.rows, self.cols, |r, c| self.ring.mul(self.at(r, c), s))
    }

    fn check_same_shape(&self, other: &Mat) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::Ring(format!("ring mismatch: {} vs {}", self.ring, other.ring)));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        Ok(Mat::from_fn(self.ring, self.rows, self.cols, |r, c| {
            self.ring.add(self.at(r, c), other.at(r, c))
        }))
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        Ok(Mat::from_fn(self.ring, self.rows, self.cols, |r, c| {
            self.ring.sub(self.at(r, c), other.at(r, c))
        }))
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.ring != other.ring {
            return Err(Error::Ring(format!("ring mismatch: {} vs {}", self.ring, other.ring)));
        }
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zero(self.ring, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.at(r, c) + a * other.at(k, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// `self * other` for matrices known to be composable; panics otherwise.
    /// Used internally where shapes are guaranteed by construction.
    pub fn mm(&self, other: &Mat) -> Mat {
        self.mul(other).expect("internal shape error")
    }

    pub fn hstack(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows || self.ring != other.ring {
            return Err(Error::Shape("hstack shape mismatch".into()));
        }
        Ok(Mat::from_fn(self.ring, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.at(r, c).clone()
            } else {
                other.at(r, c - self.cols).clone()
            }
        }))
    }

    pub fn vstack(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.cols || self.ring != other.ring {
            return Err(Error::Shape("vstack shape mismatch".into()));
        }
        Ok(Mat::from_fn(self.ring, self.rows + other.rows, self.cols, |r, c| {
            if r < self.rows {
                self.at(r, c).clone()
            } else {
                other.at(r - self.rows, c).clone()
            }
        }))
    }

    /// Block matrix from a grid of blocks.  Each row of blocks must agree in
    /// height and each column in width.
    pub fn block(grid: &[&[&Mat]]) -> Mat {
        assert!(!grid.is_empty() && !grid[0].is_empty());
        let ring = grid[0][0].ring;
        let mut out_rows: Option<Mat> = None;
        for row in grid {
            let mut acc: Option<Mat> = None;
            for m in *row {
                acc = Some(match acc {
                    None => (*m).clone(),
                    Some(a) => a.hstack(m).expect("block width mismatch"),
                });
            }
            let acc = acc.unwrap();
            out_rows = Some(match out_rows {
                None => acc,
                Some(a) => a.vstack(&acc).expect("block height mismatch"),
            });
        }
        let out = out_rows.unwrap();
        debug_assert_eq!(out.ring, ring);
        out
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Mat) -> Mat {
        let z1 = Mat::zero(self.ring, self.rows, other.cols);
        let z2 = Mat::zero(self.ring, other.rows, self.cols);
        Mat::block(&[&[self, &z1], &[&z2, other]])
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        Mat::from_fn(self.ring, r1 - r0, c1 - c0, |r, c| self.at(r0 + r, c0 + c).clone())
    }

    pub fn column(&self, c: usize) -> Mat {
        self.submatrix(0, self.rows, c, c + 1)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.ring, self.rows, idx.len(), |r, c| self.at(r, idx[c]).clone())
    }

    pub fn map_ring(&self, ring: Ring) -> Mat {
        Mat::from_fn(ring, self.rows, self.cols, |r, c| self.at(r, c).clone())
    }

    /// Exact determinant.  Computed over the integers by fraction-free
    /// (Bareiss) elimination on lifted entries, then reduced; this is valid
    /// over any of the supported commutative rings.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::Shape(format!("det of {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a: Vec<Vec<BigInt>> =
            (0..n).map(|r| (0..n).map(|c| self.at(r, c).clone()).collect()).collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = &num / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        let mut d = a[n - 1][n - 1].clone();
        if sign < 0 {
            d = -d;
        }
        Ok(self.ring.reduce(&d))
    }

    /// Exact determinant together with the unit test in the ring.
    pub fn det_and_unit_test(&self) -> Result<(BigInt, bool)> {
        let d = self.det()?;
        let unit = self.ring.is_unit(&d);
        Ok((d, unit))
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det_and_unit_test().map_or(false, |(_, u)| u)
    }

    /// Inverse of a matrix whose determinant is a unit, by the adjugate over
    /// the lifted integers reduced back into the ring.
    pub fn inverse(&self) -> Result<Mat> {
        let (det, unit) = self.det_and_unit_test()?;
        if !unit {
            return Err(Error::Ring(format!("matrix determinant {det} is not a unit")));
        }
        let n = self.rows;
        let det_inv = self.ring.inv(&det)?;
        let mut out = Mat::zero(self.ring, n, n);
        for r in 0..n {
            for c in 0..n {
                // cofactor C_{c,r}
                let minor = self.minor(c, r);
                let mut cof = minor.det()?;
                if (r + c) % 2 == 1 {
                    cof = -cof;
                }
                out.set(r, c, cof * &det_inv);
            }
        }
        Ok(out)
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> Mat {
        Mat::from_fn(self.ring, self.rows - 1, self.cols - 1, |r, c| {
            let rr = if r < skip_r { r } else { r + 1 };
            let cc = if c < skip_c { c } else { c + 1 };
            self.at(rr, cc).clone()
        })
    }

    /// Maximum absolute value of the entries (over the lifted integers).
    pub fn max_abs(&self) -> BigInt {
        self.entries.iter().map(|e| e.abs()).max().unwrap_or_else(BigInt::zero)
    }
}

fn fmt_mat(m: &Mat, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
    writeln!(f, "[{}x{} over {}]", m.rows, m.cols, m.ring)?;
    for r in 0..m.rows {
        let row: Vec<String> = (0..m.cols).map(|c| m.at(r, c).to_string()).collect();
        writeln!(f, "  [{}]", row.join(", "))?;
    }
    Ok(())
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fmt_mat(self, f)
    }
}

impl std::fmt::Display for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fmt_mat(self, f)
    }
}

/// Matrices serialize as arrays of arrays of decimal strings; the ring tag is
/// carried by the surrounding document.
impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c).to_string()).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Mat, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(deserializer)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in &rows {
            for s in row {
                let v: BigInt = s.parse().map_err(|_| D::Error::custom(format!("bad integer '{s}'")))?;
                entries.push(v);
            }
        }
        // Deserialized matrices default to Z; documents re-tag via `with_ring`.
        Ok(Mat { ring: Ring::Z, rows: nrows, cols: ncols, entries })
    }
}

impl Mat {
    /// Re-interpret the entries in `ring`, reducing to canonical form.
    pub fn with_ring(&self, ring: Ring) -> Mat {
        Mat::from_fn(ring, self.rows, self.cols, |r, c| self.at(r, c).clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_examples() {
        let z = Ring::Z;
        assert_eq!(Mat::identity(z, 3).det().unwrap(), BigInt::from(1));
        let m = Mat::from_rows(z, &[&[1, 1], &[0, 1]]);
        assert_eq!(m.det_and_unit_test().unwrap(), (BigInt::from(1), true));
        let m = Mat::from_rows(z, &[&[2, 0], &[0, 3]]);
        assert_eq!(m.det_and_unit_test().unwrap(), (BigInt::from(6), false));
        let m = Mat::from_rows(z, &[&[0, 1], &[1, 0]]);
        assert_eq!(m.det().unwrap(), BigInt::from(-1));
    }

    #[test]
    fn det_rejects_nonsquare() {
        let m = Mat::zero(Ring::Z, 2, 3);
        assert!(m.det().is_err());
    }

    #[test]
    fn det_multiplicative() {
        let z = Ring::Z;
        let a = Mat::from_rows(z, &[&[2, 1, 0], &[-3, 4, 1], &[0, 5, -2]]);
        let b = Mat::from_rows(z, &[&[1, 0, 7], &[2, -1, 0], &[3, 3, 1]]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.det().unwrap(), a.det().unwrap() * b.det().unwrap());
    }

    #[test]
    fn inverse_roundtrip() {
        let z = Ring::Z;
        let u = Mat::from_rows(z, &[&[1, 2], &[0, -1]]);
        let ui = u.inverse().unwrap();
        assert!(u.mul(&ui).unwrap().is_identity());

        let f5 = Ring::fp(5).unwrap();
        let m = Mat::from_rows(f5, &[&[2, 1], &[1, 1]]);
        let mi = m.inverse().unwrap();
        assert!(m.mul(&mi).unwrap().is_identity());
    }

    #[test]
    fn zmod_arithmetic_reduces() {
        let z4 = Ring::zmod(4).unwrap();
        let m = Mat::from_rows(z4, &[&[5, -1], &[2, 7]]);
        assert_eq!(*m.at(0, 0), BigInt::from(1));
        assert_eq!(*m.at(0, 1), BigInt::from(3));
        let (d, unit) = m.det_and_unit_test().unwrap();
        // det = 1*3 - 3*2 = -3 = 1 mod 4
        assert_eq!(d, BigInt::from(1));
        assert!(unit);
    }

    #[test]
    fn serde_roundtrip() {
        let m = Mat::from_rows(Ring::Z, &[&[1, -2], &[30000000000, 4]]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1","-2"],["30000000000","4"]]"#);
        let back: Mat = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
