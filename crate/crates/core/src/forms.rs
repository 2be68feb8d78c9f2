//! Epsilon-quadratic and epsilon-symmetric forms on based free modules:
//! constructions, invariants (signature, Arf, Witt index), isometries and
//! transvections.
//!
//! A form is stored as a representative matrix `theta`; two representatives
//! denote the same form iff their difference is `chi - eps * chi^T` for some
//! `chi`, which is decided by [`q_epsilon_equal`].  There is no canonical
//! representative, so equality of forms always goes through that predicate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::Mat;
use crate::ring::Ring;
use crate::snf;
use crate::{Error, Result};

/// The sign `eps = (-1)^q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Eps {
    Plus,
    Minus,
}

impl Eps {
    pub fn sign(self) -> i8 {
        match self {
            Eps::Plus => 1,
            Eps::Minus => -1,
        }
    }

    pub fn flip(self) -> Eps {
        match self {
            Eps::Plus => Eps::Minus,
            Eps::Minus => Eps::Plus,
        }
    }

    pub fn apply(self, m: &Mat) -> Mat {
        match self {
            Eps::Plus => m.clone(),
            Eps::Minus => m.neg(),
        }
    }
}

impl From<Eps> for i8 {
    fn from(e: Eps) -> i8 {
        e.sign()
    }
}

impl TryFrom<i8> for Eps {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Eps, String> {
        match v {
            1 => Ok(Eps::Plus),
            -1 => Ok(Eps::Minus),
            _ => Err(format!("epsilon must be 1 or -1, got {v}")),
        }
    }
}

/// An epsilon-quadratic form: a based free module of the given rank with a
/// representative matrix of the quadratic structure.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub ring: Ring,
    pub epsilon: Eps,
    pub theta: Mat,
}

/// Whether `t1` and `t2` represent the same class in `Q_eps`, i.e. whether
/// `t1 - t2 = chi - eps * chi^T` for some `chi`.  The off-diagonal part is
/// always matchable once the symmetrisations agree; the diagonal must lie in
/// `(1 - eps) * ring` entrywise.
pub fn q_epsilon_equal(t1: &Mat, t2: &Mat, eps: Eps) -> Result<bool> {
    if t1.rows() != t2.rows() || t1.cols() != t2.cols() || t1.ring() != t2.ring() {
        return Err(Error::Shape("q_epsilon_equal: shape mismatch".into()));
    }
    let d = t1.sub(t2)?;
    let sym = d.add(&eps.apply(&d.transpose()))?;
    if !sym.is_zero() {
        return Ok(false);
    }
    let ring = t1.ring();
    for i in 0..d.rows() {
        if !scalar_q_zero(ring, eps, d.at(i, i)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether a scalar represents `0` in `Q_eps(ring)`, i.e. lies in
/// `{ a - eps * a : a in ring }`.
pub fn scalar_q_zero(ring: Ring, eps: Eps, v: &BigInt) -> bool {
    match eps {
        Eps::Plus => ring.reduce(v).is_zero(),
        Eps::Minus => ring.divides(&BigInt::from(2), v),
    }
}

impl QuadraticForm {
    pub fn new(ring: Ring, epsilon: Eps, theta: Mat) -> Result<QuadraticForm> {
        if !theta.is_square() {
            return Err(Error::Shape("theta must be square".into()));
        }
        if theta.ring() != ring {
            return Err(Error::Ring("theta ring mismatch".into()));
        }
        Ok(QuadraticForm { ring, epsilon, theta })
    }

    pub fn from_rows(ring: Ring, epsilon: Eps, data: &[&[i64]]) -> QuadraticForm {
        QuadraticForm::new(ring, epsilon, Mat::from_rows(ring, data)).unwrap()
    }

    /// The rank-one form `(ring, n)`.
    pub fn rank_one(ring: Ring, epsilon: Eps, n: i64) -> QuadraticForm {
        QuadraticForm::from_rows(ring, epsilon, &[&[n]])
    }

    pub fn zero_form(ring: Ring, epsilon: Eps, rank: usize) -> QuadraticForm {
        QuadraticForm::new(ring, epsilon, Mat::zero(ring, rank, rank)).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.theta.rows()
    }

    /// The symmetrisation `lambda = theta + eps * theta^T`.
    pub fn lambda(&self) -> Mat {
        self.theta.add(&self.epsilon.apply(&self.theta.transpose())).unwrap()
    }

    /// Evaluate the symmetrised pairing on column vectors.
    pub fn pair(&self, x: &Mat, y: &Mat) -> BigInt {
        x.transpose().mm(&self.lambda()).mm(y).at(0, 0).clone()
    }

    /// `theta(x, x)`, the quadratic value of a column vector.
    pub fn quad(&self, x: &Mat) -> BigInt {
        x.transpose().mm(&self.theta).mm(x).at(0, 0).clone()
    }

    pub fn negate(&self) -> QuadraticForm {
        QuadraticForm { ring: self.ring, epsilon: self.epsilon, theta: self.theta.neg() }
    }

    pub fn direct_sum(&self, other: &QuadraticForm) -> Result<QuadraticForm> {
        if self.ring != other.ring || self.epsilon != other.epsilon {
            return Err(Error::Ring("direct sum of incompatible forms".into()));
        }
        QuadraticForm::new(self.ring, self.epsilon, self.theta.direct_sum(&other.theta))
    }

    /// Restriction of the quadratic structure to a submodule basis.
    pub fn restrict(&self, basis: &Mat) -> QuadraticForm {
        let t = basis.transpose().mm(&self.theta).mm(basis);
        QuadraticForm { ring: self.ring, epsilon: self.epsilon, theta: t }
    }

    /// Nondegenerate: the symmetrisation is injective.
    pub fn is_nondegenerate(&self) -> Result<bool> {
        let lam = self.lambda();
        match self.ring {
            Ring::Z => Ok(!lam.det()?.is_zero()),
            _ => Ok(snf::rank(&lam)? == self.rank()),
        }
    }

    /// Simple: the symmetrisation is an isomorphism of unit determinant.
    pub fn is_simple(&self) -> Result<bool> {
        Ok(self.lambda().det_and_unit_test()?.1)
    }

    pub fn q_equal(&self, other: &QuadraticForm) -> Result<bool> {
        if self.ring != other.ring || self.epsilon != other.epsilon {
            return Ok(false);
        }
        q_epsilon_equal(&self.theta, &other.theta, self.epsilon)
    }

    /// Split the radical off: returns (radical basis, complement basis,
    /// nondegenerate form induced on the complement).
    pub fn split_radical(&self) -> Result<(Mat, Mat, QuadraticForm)> {
        let rad = radical(self)?;
        let comp = snf::complement_of_primitive(&rad.basis)?;
        Ok((rad.basis.clone(), comp.clone(), self.restrict(&comp)))
    }
}

/// The hyperbolic epsilon-quadratic form on `L + L*` with
/// `theta = [[0, I], [0, 0]]`.
pub fn hyperbolic(rank_l: usize, epsilon: Eps, ring: Ring) -> QuadraticForm {
    let n = 2 * rank_l;
    let theta = Mat::from_fn(ring, n, n, |r, c| {
        if c >= rank_l && c - rank_l == r {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    });
    QuadraticForm { ring, epsilon, theta }
}

/// A based direct summand of an ambient module, given by basis columns.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Submodule {
    pub basis: Mat,
}

impl Submodule {
    /// Checks primitivity: the columns extend to a basis of the ambient module.
    pub fn new(basis: Mat) -> Result<Submodule> {
        if !snf::is_primitive(&basis)? {
            return Err(Error::Precondition("submodule basis is not primitive".into()));
        }
        Ok(Submodule { basis })
    }

    pub fn ambient_rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// Whether the two submodules agree as sublattices (mutual containment).
    pub fn same_submodule(&self, other: &Submodule) -> Result<bool> {
        if self.ambient_rank() != other.ambient_rank() || self.rank() != other.rank() {
            return Ok(false);
        }
        Ok(snf::solve(&self.basis, &other.basis)?.is_some()
            && snf::solve(&other.basis, &self.basis)?.is_some())
    }
}

/// A verified isometry of epsilon-quadratic forms.
#[derive(Clone, Debug)]
pub struct Isometry {
    pub source: QuadraticForm,
    pub target: QuadraticForm,
    pub matrix: Mat,
}

impl Isometry {
    pub fn new(source: QuadraticForm, target: QuadraticForm, matrix: Mat) -> Result<Isometry> {
        if !matrix.is_unimodular() {
            return Err(Error::Verification("isometry matrix is not unimodular".into()));
        }
        let pulled = matrix.transpose().mm(&target.theta).mm(&matrix);
        if !q_epsilon_equal(&pulled, &source.theta, source.epsilon)? {
            return Err(Error::Verification("matrix does not intertwine the forms".into()));
        }
        Ok(Isometry { source, target, matrix })
    }

    pub fn identity(form: &QuadraticForm) -> Isometry {
        Isometry {
            source: form.clone(),
            target: form.clone(),
            matrix: Mat::identity(form.ring, form.rank()),
        }
    }

    pub fn compose(&self, inner: &Isometry) -> Result<Isometry> {
        Isometry::new(inner.source.clone(), self.target.clone(), self.matrix.mm(&inner.matrix))
    }

    pub fn invert(&self) -> Result<Isometry> {
        Isometry::new(self.target.clone(), self.source.clone(), self.matrix.inverse()?)
    }
}

/// The annihilator `W^perp = ker(W^T lambda)` together with the induced form.
pub fn annihilator(v: &QuadraticForm, w: &Submodule) -> Result<(Submodule, QuadraticForm)> {
    if w.ambient_rank() != v.rank() {
        return Err(Error::Shape("submodule ambient rank mismatch".into()));
    }
    let pairing = w.basis.transpose().mm(&v.lambda());
    let perp = snf::kernel_basis(&pairing)?;
    let induced = v.restrict(&perp);
    Ok((Submodule { basis: perp }, induced))
}

/// The radical: kernel of the symmetrisation, as a primitive summand.
pub fn radical(v: &QuadraticForm) -> Result<Submodule> {
    let k = snf::kernel_basis(&v.lambda())?;
    Ok(Submodule { basis: k })
}

/// Signature of a symmetric integer matrix, by exact congruence
/// diagonalization over the rationals.
pub fn signature(sym: &Mat) -> Result<i64> {
    if !sym.is_square() || sym.ring() != Ring::Z {
        return Err(Error::Precondition("signature requires a square matrix over Z".into()));
    }
    if sym != &sym.transpose() {
        return Err(Error::Precondition("signature requires a symmetric matrix".into()));
    }
    let n = sym.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|r| (0..n).map(|c| BigRational::from(sym.at(r, c).clone())).collect())
        .collect();
    let mut sig = 0i64;
    for k in 0..n {
        if a[k][k].is_zero() {
            // bring a nonzero diagonal entry up, or create one from a
            // nonzero off-diagonal pair
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some((i, j)) = (k..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a[i][j].is_zero())
            {
                // e_i += e_j makes the (i,i) entry 2*a_ij
                for c in 0..n {
                    let v = &a[i][c] + &a[j][c];
                    a[i][c] = v;
                }
                for row in a.iter_mut() {
                    let v = &row[i] + &row[j];
                    row[i] = v;
                }
                if i != k {
                    a.swap(k, i);
                    for row in a.iter_mut() {
                        row.swap(k, i);
                    }
                }
            } else {
                break; // remaining block is zero
            }
        }
        let pivot = a[k][k].clone();
        sig += if pivot.is_positive() { 1 } else { -1 };
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for c in 0..n {
                let v = &a[i][c] - &f * &a[k][c];
                a[i][c] = v;
            }
            for row in a.iter_mut() {
                let v = &row[i] - &f * &row[k];
                row[i] = v;
            }
        }
    }
    Ok(sig)
}

/// A symplectic basis of a unimodular skew pairing: columns alternate
/// `e_1, f_1, e_2, f_2, ...` with `lambda(e_i, f_i) = 1` and all other
/// pairings zero.  Works over Z and over prime fields.
pub fn symplectic_basis(lam: &Mat) -> Result<Mat> {
    if lam.rows() % 2 != 0 {
        return Err(Error::Precondition("skew form of odd rank".into()));
    }
    if !lam.add(&lam.transpose())?.is_zero() {
        // over F2 skewness is symmetry; accept symmetric with zero diagonal
        let symmetric = lam == &lam.transpose();
        let zero_diag = (0..lam.rows()).all(|i| lam.at(i, i).is_zero());
        if !(lam.ring() == (Ring::Fp { p: 2 }) && symmetric && zero_diag) {
            return Err(Error::Precondition("pairing is not alternating".into()));
        }
    }
    let ring = lam.ring();
    let n = lam.rows();
    let mut basis = Mat::identity(ring, n); // columns span the current complement
    let mut out: Option<Mat> = None;
    while basis.cols() > 0 {
        let g = basis.transpose().mm(lam).mm(&basis);
        let e_local = Mat::from_fn(ring, basis.cols(), 1, |r, _| {
            if r == 0 {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        });
        // first row of g is primitive since g is unimodular
        let row0 = g.submatrix(0, 1, 0, g.cols());
        let mut rhs = Mat::zero(ring, 1, 1);
        rhs.set(0, 0, BigInt::one());
        let y = snf::solve(&row0, &rhs)?
            .ok_or_else(|| Error::Verification("restricted pairing is degenerate".into()))?;
        let e = basis.mm(&e_local);
        let f = basis.mm(&y);
        let pair = e.hstack(&f)?;
        out = Some(match out {
            None => pair.clone(),
            Some(o) => o.hstack(&pair)?,
        });
        // orthogonal complement of (e, f) inside the current block
        let rows = e_local.transpose().mm(&g).vstack(&y.transpose().mm(&g))?;
        let ker = snf::kernel_basis(&rows)?;
        basis = basis.mm(&ker);
    }
    Ok(out.unwrap_or_else(|| Mat::zero(ring, n, 0)))
}

/// Arf invariant of a nonsingular (-1)-quadratic form over Z or F2, by
/// finding a symplectic basis and summing the products of the quadratic
/// values over the pairs.
pub fn arf_invariant(v: &QuadraticForm) -> Result<u8> {
    match v.ring {
        Ring::Z | Ring::Fp { p: 2 } => {}
        _ => return Err(Error::Precondition("Arf invariant over Z or F2 only".into())),
    }
    if v.ring == Ring::Z && v.epsilon != Eps::Minus {
        return Err(Error::Precondition("Arf invariant requires eps = -1 over Z".into()));
    }
    let lam = v.lambda();
    if !lam.det_and_unit_test()?.1 {
        return Err(Error::Precondition("Arf invariant of a singular form".into()));
    }
    let s = symplectic_basis(&lam)?;
    let two = BigInt::from(2);
    let parity = |x: &BigInt| -> u8 {
        if x.mod_floor_ref(&two).is_zero() {
            0
        } else {
            1
        }
    };
    let mut arf = 0u8;
    for i in 0..v.rank() / 2 {
        let e = s.column(2 * i);
        let f = s.column(2 * i + 1);
        arf ^= parity(&v.quad(&e)) & parity(&v.quad(&f));
    }
    Ok(arf)
}

trait ModFloorRef {
    fn mod_floor_ref(&self, m: &BigInt) -> BigInt;
}

impl ModFloorRef for BigInt {
    fn mod_floor_ref(&self, m: &BigInt) -> BigInt {
        num_integer::Integer::mod_floor(self, m)
    }
}

/// All integer column vectors `x` with `x^T lam x = target`, for `lam`
/// positive definite, by recursive enumeration with exact rational bounds.
pub fn short_vectors(lam: &Mat, target: &BigInt) -> Result<Vec<Mat>> {
    let n = lam.rows();
    if target.is_negative() {
        return Ok(vec![]);
    }
    if n == 0 {
        return Ok(vec![]);
    }
    // rational Cholesky: lam = R^T D R with R unit upper triangular
    let mut d = vec![BigRational::zero(); n];
    let mut r = vec![vec![BigRational::zero(); n]; n];
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from(lam.at(i, j).clone())).collect())
        .collect();
    for k in 0..n {
        d[k] = a[k][k].clone();
        if !d[k].is_positive() {
            return Err(Error::Precondition("short_vectors requires positive definite".into()));
        }
        r[k][k] = BigRational::one();
        for j in k + 1..n {
            r[k][j] = &a[k][j] / &d[k];
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] - &(&r[k][i] * &d[k]) * &r[k][j];
                a[i][j] = v;
            }
        }
        // keep the symmetric mirror in sync for the next rounds
        for i in k + 1..n {
            for j in k + 1..i {
                a[i][j] = a[j][i].clone();
            }
        }
    }
    // x^T lam x = sum_k d_k (x_k + sum_{j>k} r_kj x_j)^2
    let target_q = BigRational::from(target.clone());
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    enumerate_level(n - 1, target_q.clone(), &mut x, &d, &r, &mut |v| {
        let m = Mat::from_fn(lam.ring(), n, 1, |i, _| v[i].clone());
        if m.transpose().mm(lam).mm(&m).at(0, 0) == target {
            out.push(m);
        }
    });
    Ok(out)
}

fn enumerate_level(
    k: usize,
    budget: BigRational,
    x: &mut Vec<BigInt>,
    d: &[BigRational],
    r: &[Vec<BigRational>],
    emit: &mut impl FnMut(&[BigInt]),
) {
    let n = x.len();
    let mut offset = BigRational::zero();
    for j in k + 1..n {
        offset += &r[k][j] * BigRational::from(x[j].clone());
    }
    let root = rational_sqrt_upper(&(&budget / &d[k]));
    let lo = (-&root - &offset).floor().to_integer();
    let hi = (&root - &offset).ceil().to_integer();
    let mut t = lo;
    while t <= hi {
        let s = BigRational::from(t.clone()) + &offset;
        let term = &(&d[k] * &s) * &s;
        if term <= budget {
            x[k] = t.clone();
            if k == 0 {
                emit(x);
            } else {
                enumerate_level(k - 1, &budget - &term, x, d, r, emit);
            }
            x[k] = BigInt::zero();
        }
        t += 1;
    }
}

/// An upper bound for sqrt(q), exact enough for interval enumeration.
fn rational_sqrt_upper(q: &BigRational) -> BigRational {
    if !q.is_positive() {
        return BigRational::zero();
    }
    let c = q.ceil().to_integer();
    BigRational::from(c.sqrt() + BigInt::one())
}

/// Outcome of an isometry decision.
#[derive(Clone, Debug)]
pub enum IsometryVerdict {
    Yes(Isometry),
    No(Distinction),
    Unknown,
}

/// The invariant separating two non-isometric forms.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Distinction {
    Rank,
    DetLambda,
    Signature,
    Arf,
    BoundaryLinking,
    SearchExhausted,
}

/// Decide isometry of two forms over Z: compare invariants, then run a
/// backtracking search over candidate basis images.  The search is complete
/// for definite forms; otherwise it is budget-bounded and `Unknown` is an
/// honest outcome.
pub fn is_isometric(v: &QuadraticForm, w: &QuadraticForm, budget: u64) -> Result<IsometryVerdict> {
    if v.ring != w.ring || v.epsilon != w.epsilon {
        return Err(Error::Precondition("isometry test requires matching ring and epsilon".into()));
    }
    if v.rank() != w.rank() {
        return Ok(IsometryVerdict::No(Distinction::Rank));
    }
    if v.ring == Ring::Z {
        if v.epsilon == Eps::Plus && signature(&v.lambda())? != signature(&w.lambda())? {
            return Ok(IsometryVerdict::No(Distinction::Signature));
        }
        let (dv, dw) = (v.lambda().det()?, w.lambda().det()?);
        if dv != dw {
            return Ok(IsometryVerdict::No(Distinction::DetLambda));
        }
        if v.epsilon == Eps::Minus && !dv.is_zero() && arf_invariant(v)? != arf_invariant(w)? {
            return Ok(IsometryVerdict::No(Distinction::Arf));
        }
    }
    let mut found = search_isometries(v, w, budget, false)?;
    match found.isometries.pop() {
        Some(m) => Ok(IsometryVerdict::Yes(Isometry::new(v.clone(), w.clone(), m)?)),
        None if found.complete => Ok(IsometryVerdict::No(Distinction::SearchExhausted)),
        None => Ok(IsometryVerdict::Unknown),
    }
}

pub struct IsometrySearch {
    pub isometries: Vec<Mat>,
    pub complete: bool,
}

/// Backtracking search for isometries `v -> w`.  For definite symmetrisations
/// the candidate images come from exact short-vector enumeration and the
/// search is exhaustive; otherwise candidates are drawn from a bounded box
/// and exhaustion of the candidate set does not prove non-isometry.
pub fn search_isometries(
    v: &QuadraticForm,
    w: &QuadraticForm,
    budget: u64,
    want_all: bool,
) -> Result<IsometrySearch> {
    if v.rank() != w.rank() {
        return Ok(IsometrySearch { isometries: vec![], complete: true });
    }
    let n = v.rank();
    if n == 0 {
        return Ok(IsometrySearch { isometries: vec![Mat::zero(v.ring, 0, 0)], complete: true });
    }
    let lam_v = v.lambda();
    let lam_w = w.lambda();
    let definite = v.ring == Ring::Z
        && v.epsilon == Eps::Plus
        && is_definite(&lam_w)?
        && is_definite(&lam_v)?;
    let mut candidates: Vec<Vec<Mat>> = Vec::with_capacity(n);
    if definite {
        let sign = if signature(&lam_w)? > 0 { 1 } else { -1 };
        let lam_pos = if sign > 0 { lam_w.clone() } else { lam_w.neg() };
        for i in 0..n {
            let t = lam_v.at(i, i) * BigInt::from(sign);
            candidates.push(short_vectors(&lam_pos, &t)?);
        }
    } else {
        let b = 2i64;
        let all = box_vectors(v.ring, n, b);
        for i in 0..n {
            let t = lam_v.at(i, i).clone();
            let c: Vec<Mat> = all
                .iter()
                .filter(|m| m.transpose().mm(&lam_w).mm(m).at(0, 0) == &t)
                .cloned()
                .collect();
            candidates.push(c);
        }
    }
    let mut st = SearchState {
        v,
        w,
        lam_v: &lam_v,
        lam_w: &lam_w,
        cols: Vec::new(),
        nodes: 0,
        budget,
        exhausted: false,
        want_all,
        found: Vec::new(),
    };
    st.rec(&candidates);
    Ok(IsometrySearch { isometries: st.found, complete: definite && !st.exhausted })
}

/// All nonzero vectors with entries in `[-b, b]`.
pub fn box_vectors(ring: Ring, n: usize, b: i64) -> Vec<Mat> {
    let mut out = Vec::new();
    let mut x = vec![-b; n];
    loop {
        let m = Mat::from_fn(ring, n, 1, |i, _| BigInt::from(x[i]));
        if !m.is_zero() {
            out.push(m);
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            x[k] += 1;
            if x[k] > b {
                x[k] = -b;
                k += 1;
            } else {
                break;
            }
        }
    }
}

fn is_definite(lam: &Mat) -> Result<bool> {
    let n = lam.rows();
    if n == 0 {
        return Ok(true);
    }
    Ok(signature(lam)?.unsigned_abs() as usize == n)
}

struct SearchState<'a> {
    v: &'a QuadraticForm,
    w: &'a QuadraticForm,
    lam_v: &'a Mat,
    lam_w: &'a Mat,
    cols: Vec<Mat>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    want_all: bool,
    found: Vec<Mat>,
}

impl<'a> SearchState<'a> {
    fn rec(&mut self, candidates: &[Vec<Mat>]) {
        if !self.want_all && !self.found.is_empty() {
            return;
        }
        let i = self.cols.len();
        if i == self.v.rank() {
            let mut m = self.cols[0].clone();
            for c in &self.cols[1..] {
                m = m.hstack(c).unwrap();
            }
            if m.is_unimodular()
                && q_epsilon_equal(
                    &m.transpose().mm(&self.w.theta).mm(&m),
                    &self.v.theta,
                    self.v.epsilon,
                )
                .unwrap_or(false)
            {
                self.found.push(m);
            }
            return;
        }
        for cand in &candidates[i] {
            self.nodes += 1;
            if self.nodes > self.budget {
                self.exhausted = true;
                return;
            }
            let ok = (0..i).all(|j| {
                self.cols[j].transpose().mm(self.lam_w).mm(cand).at(0, 0) == self.lam_v.at(j, i)
            });
            if !ok {
                continue;
            }
            let qw = cand.transpose().mm(&self.w.theta).mm(cand);
            if !scalar_q_zero(self.v.ring, self.v.epsilon, &(qw.at(0, 0) - self.v.theta.at(i, i))) {
                continue;
            }
            self.cols.push(cand.clone());
            self.rec(candidates);
            self.cols.pop();
            if self.exhausted || (!self.want_all && !self.found.is_empty()) {
                return;
            }
        }
    }
}

/// The orthogonal transvection `tau_{u,a,v}`:
/// `x -> x + u lambda(v,x) - eps v lambda(u,x) - eps u a lambda(u,x)`.
/// All four side conditions are checked and the result is verified.
pub fn transvection(form: &QuadraticForm, u: &Mat, vecv: &Mat, a: &BigInt) -> Result<Isometry> {
    let lam = form.lambda();
    let ring = form.ring;
    let urow = u.transpose().mm(&lam); // x -> lambda(u, x)
    let vrow = vecv.transpose().mm(&lam);
    let mut one = Mat::zero(ring, 1, 1);
    one.set(0, 0, BigInt::one());
    if snf::solve(&urow, &one)?.is_none() {
        return Err(Error::Precondition("transvection: u is not unimodular for the form".into()));
    }
    if !urow.mm(vecv).at(0, 0).is_zero() {
        return Err(Error::Precondition("transvection: lambda(u, v) != 0".into()));
    }
    if !scalar_q_zero(ring, form.epsilon, &form.quad(u)) {
        return Err(Error::Precondition("transvection: theta(u,u) != 0 in Q_eps".into()));
    }
    if !scalar_q_zero(ring, form.epsilon, &(form.quad(vecv) - a)) {
        return Err(Error::Precondition("transvection: theta(v,v) != [a] in Q_eps".into()));
    }
    let n = form.rank();
    let id = Mat::identity(ring, n);
    let t = id
        .add(&u.mm(&vrow))?
        .sub(&form.epsilon.apply(&vecv.mm(&urow)))?
        .sub(&form.epsilon.apply(&u.mm(&urow).scale(a)))?;
    Isometry::new(form.clone(), form.clone(), t)
}

/// Search for hyperbolic pairs and split them off, returning a certified
/// lower bound for the Witt index.
pub fn witt_index_lower_bound(v: &QuadraticForm, budget: u64) -> Result<usize> {
    let mut current = v.clone();
    let mut index = 0;
    let mut nodes = 0u64;
    'outer: loop {
        let n = current.rank();
        if n < 2 {
            return Ok(index);
        }
        for bound in 1..=3i64 {
            for e in box_vectors(current.ring, n, bound) {
                nodes += 1;
                if nodes > budget {
                    return Ok(index);
                }
                if !snf::is_primitive(&e)?
                    || !scalar_q_zero(current.ring, current.epsilon, &current.quad(&e))
                {
                    continue;
                }
                if let Some(f) = complete_hyperbolic_pair(&current, &e, budget, &mut nodes)? {
                    let pair = e.hstack(&f)?;
                    let (_, induced) = annihilator(&current, &Submodule { basis: pair })?;
                    current = induced;
                    index += 1;
                    continue 'outer;
                }
            }
        }
        return Ok(index);
    }
}

/// Find `f` with `lambda(e, f) = 1` and `theta(f,f) = 0` in `Q_eps`, given an
/// isotropic primitive `e`.
pub fn complete_hyperbolic_pair(
    v: &QuadraticForm,
    e: &Mat,
    budget: u64,
    nodes: &mut u64,
) -> Result<Option<Mat>> {
    let lam = v.lambda();
    let erow = e.transpose().mm(&lam);
    let mut one = Mat::zero(v.ring, 1, 1);
    one.set(0, 0, BigInt::one());
    let Some(f0) = snf::solve(&erow, &one)? else {
        return Ok(None);
    };
    let ker = snf::kernel_basis(&erow)?;
    let kdim = ker.cols();
    if scalar_q_zero(v.ring, v.epsilon, &v.quad(&f0)) {
        return Ok(Some(f0));
    }
    let bound = 2i64;
    for z in box_vectors(v.ring, kdim, bound) {
        *nodes += 1;
        if *nodes > budget {
            return Ok(None);
        }
        let f = f0.add(&ker.mm(&z))?;
        if scalar_q_zero(v.ring, v.epsilon, &v.quad(&f)) {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// The classical even lattices, with the upper-triangular quadratic
/// refinement of the standard Gram matrix.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NamedLattice {
    E8,
    E7,
    E6,
    D5,
    A4,
}

impl std::str::FromStr for NamedLattice {
    type Err = Error;
    fn from_str(s: &str) -> Result<NamedLattice> {
        match s.to_ascii_uppercase().as_str() {
            "E8" => Ok(NamedLattice::E8),
            "E7" => Ok(NamedLattice::E7),
            "E6" => Ok(NamedLattice::E6),
            "D5" => Ok(NamedLattice::D5),
            "A4" => Ok(NamedLattice::A4),
            _ => Err(Error::Document(format!("unknown lattice '{s}'"))),
        }
    }
}

pub fn named_lattice(name: NamedLattice) -> QuadraticForm {
    // Gram matrices from the Dynkin diagrams: 2 on the diagonal, -1 on edges.
    let (n, e): (usize, Vec<(usize, usize)>) = match name {
        // T(2,3,5): center 0; legs 1 | 2-3 | 4-5-6-7
        NamedLattice::E8 => (8, vec![(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6), (6, 7)]),
        // T(2,3,4): center 0; legs 1 | 2-3 | 4-5-6
        NamedLattice::E7 => (7, vec![(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)]),
        // T(2,3,3): center 0; legs 1 | 2-3 | 4-5
        NamedLattice::E6 => (6, vec![(0, 1), (0, 2), (2, 3), (0, 4), (4, 5)]),
        // fork 0,1 -> 2, then chain 2-3-4
        NamedLattice::D5 => (5, vec![(0, 2), (1, 2), (2, 3), (3, 4)]),
        NamedLattice::A4 => (4, vec![(0, 1), (1, 2), (2, 3)]),
    };
    let mut gram = Mat::zero(Ring::Z, n, n);
    for i in 0..n {
        gram.set(i, i, BigInt::from(2));
    }
    for (i, j) in e {
        gram.set(i, j, BigInt::from(-1));
        gram.set(j, i, BigInt::from(-1));
    }
    let theta = Mat::from_fn(Ring::Z, n, n, |r, c| {
        if r == c {
            BigInt::one()
        } else if r < c {
            gram.at(r, c).clone()
        } else {
            BigInt::zero()
        }
    });
    QuadraticForm { ring: Ring::Z, epsilon: Eps::Plus, theta }
}
