//! Split quadratic linking forms over `(Z, S)` with `S = Z \ {0}`: the
//! S-boundary of a nondegenerate form on the cokernel of its symmetrisation,
//! exhaustive isometry enumeration, descent of formation isomorphisms, and
//! the orbit sets of boundary isomorphisms under the isometry groups of the
//! underlying forms.
//!
//! All values in `Q/Z` are reduced fractions in `[0, 1)`; exactness is
//! structural.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::formations::{normal_form_boundary_iso, FormationIso};
use crate::forms::{self, Eps, QuadraticForm};
use crate::matrix::Mat;
use crate::ring::Ring;
use crate::snf;
use crate::{Error, Result};

/// Serde helpers: big integers as decimal strings, rationals as `p/q`
/// strings, keeping documents exact and diff-stable.
mod strings {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub mod bigint_vec {
        use super::*;
        pub fn serialize<S: Serializer>(
            v: &[BigInt],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            use serde::Serialize;
            let out: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            out.serialize(s)
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<BigInt>, D::Error> {
            use serde::Deserialize;
            let raw: Vec<String> = Vec::deserialize(d)?;
            raw.iter()
                .map(|x| x.parse().map_err(|_| D::Error::custom(format!("bad integer '{x}'"))))
                .collect()
        }
    }

    pub fn parse_ratio(s: &str) -> std::result::Result<BigRational, String> {
        if let Some((num, den)) = s.split_once('/') {
            let n: BigInt = num.trim().parse().map_err(|_| format!("bad numerator '{num}'"))?;
            let d: BigInt = den.trim().parse().map_err(|_| format!("bad denominator '{den}'"))?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(BigRational::new(n, d))
        } else {
            let n: BigInt = s.trim().parse().map_err(|_| format!("bad rational '{s}'"))?;
            Ok(BigRational::from(n))
        }
    }

    pub mod ratio_vec {
        use super::*;
        pub fn serialize<S: Serializer>(
            v: &[BigRational],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            use serde::Serialize;
            let out: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            out.serialize(s)
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<BigRational>, D::Error> {
            use serde::Deserialize;
            let raw: Vec<String> = Vec::deserialize(d)?;
            raw.iter().map(|x| parse_ratio(x).map_err(D::Error::custom)).collect()
        }
    }

    pub mod ratio_mat {
        use super::*;
        pub fn serialize<S: Serializer>(
            v: &[Vec<BigRational>],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            use serde::Serialize;
            let out: Vec<Vec<String>> =
                v.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect();
            out.serialize(s)
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Vec<BigRational>>, D::Error> {
            use serde::Deserialize;
            let raw: Vec<Vec<String>> = Vec::deserialize(d)?;
            raw.iter()
                .map(|row| {
                    row.iter().map(|x| parse_ratio(x).map_err(D::Error::custom)).collect()
                })
                .collect()
        }
    }
}

/// Reduce a rational to its representative in `[0, 1)`.
fn mod_one(q: &BigRational) -> BigRational {
    let f = q.floor();
    q - f
}

fn frac(num: BigInt, den: BigInt) -> BigRational {
    mod_one(&BigRational::new(num, den))
}

/// A split epsilon-quadratic linking form on a finite abelian group
/// presented by generators with given orders.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LinkingForm {
    pub epsilon: Eps,
    /// generator orders `d_1 | d_2 | ...`, each >= 2 (a chain when produced
    /// by `s_boundary`; direct sums may interleave)
    #[serde(with = "strings::bigint_vec")]
    pub factors: Vec<BigInt>,
    /// `phi(g_i, g_j)` in `Q/Z`
    #[serde(with = "strings::ratio_mat")]
    pub pairing: Vec<Vec<BigRational>>,
    /// `nu(g_i)` in `Q_eps(Q/Z)`; empty when `eps = -1` over `Z`, where that
    /// group vanishes
    #[serde(with = "strings::ratio_vec", default)]
    pub refinement: Vec<BigRational>,
}

impl LinkingForm {
    pub fn new(
        epsilon: Eps,
        factors: Vec<BigInt>,
        pairing: Vec<Vec<BigRational>>,
        refinement: Vec<BigRational>,
    ) -> Result<LinkingForm> {
        let x = LinkingForm { epsilon, factors, pairing, refinement };
        x.validate()?;
        Ok(x)
    }

    pub fn trivial(epsilon: Eps) -> LinkingForm {
        LinkingForm { epsilon, factors: vec![], pairing: vec![], refinement: vec![] }
    }

    pub fn generators(&self) -> usize {
        self.factors.len()
    }

    pub fn group_order(&self) -> BigInt {
        self.factors.iter().product()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.factors.len();
        for d in &self.factors {
            if *d < BigInt::from(2) {
                return Err(Error::Precondition("generator orders must be >= 2".into()));
            }
        }
        if self.pairing.len() != k || self.pairing.iter().any(|row| row.len() != k) {
            return Err(Error::Shape("pairing must be k x k".into()));
        }
        let want_refinement = self.epsilon == Eps::Plus;
        if want_refinement && self.refinement.len() != k {
            return Err(Error::Shape("refinement must have one value per generator".into()));
        }
        if !want_refinement && !self.refinement.is_empty() {
            return Err(Error::Shape("skew linking data is pairing-only".into()));
        }
        for i in 0..k {
            for j in 0..k {
                let sym = match self.epsilon {
                    Eps::Plus => mod_one(&self.pairing[j][i]),
                    Eps::Minus => mod_one(&-&self.pairing[j][i]),
                };
                if mod_one(&self.pairing[i][j]) != sym {
                    return Err(Error::Precondition("pairing is not eps-symmetric".into()));
                }
                let scaled = &self.pairing[i][j] * BigRational::from(self.factors[i].clone());
                if !scaled.is_integer() {
                    return Err(Error::Precondition("d_i phi(g_i, -) != 0".into()));
                }
            }
        }
        if want_refinement {
            for i in 0..k {
                let two_nu = &self.refinement[i] * BigRational::from(BigInt::from(2));
                if mod_one(&two_nu) != mod_one(&self.pairing[i][i]) {
                    return Err(Error::Precondition("2 nu(g) != phi(g, g)".into()));
                }
                let d = BigRational::from(self.factors[i].clone());
                if !(&self.refinement[i] * &d * &d).is_integer()
                    || !(&self.refinement[i] * &d * BigRational::from(BigInt::from(2)))
                        .is_integer()
                {
                    return Err(Error::Precondition("nu denominator exceeds d^2".into()));
                }
            }
        }
        Ok(())
    }

    /// `nu` of the group element with the given coordinates, via the
    /// quadratic expansion `nu(x + y) = nu(x) + nu(y) + phi(x, y)`.
    pub fn nu_of(&self, coords: &[BigInt]) -> BigRational {
        let k = self.factors.len();
        let mut acc = BigRational::zero();
        for i in 0..k {
            let c = BigRational::from(coords[i].clone());
            acc += &(&c * &c) * &self.refinement[i];
            for j in i + 1..k {
                let cj = BigRational::from(coords[j].clone());
                acc += &(&c * &cj) * &self.pairing[i][j];
            }
        }
        mod_one(&acc)
    }

    /// `phi` of two group elements given by coordinates.
    pub fn phi_of(&self, x: &[BigInt], y: &[BigInt]) -> BigRational {
        let k = self.factors.len();
        let mut acc = BigRational::zero();
        for i in 0..k {
            for j in 0..k {
                acc += &(&BigRational::from(x[i].clone()) * &BigRational::from(y[j].clone()))
                    * &self.pairing[i][j];
            }
        }
        mod_one(&acc)
    }

    /// Direct product presentation; the factor list may stop being a chain.
    pub fn direct_sum(&self, other: &LinkingForm) -> Result<LinkingForm> {
        if self.epsilon != other.epsilon {
            return Err(Error::Precondition("direct sum of mixed epsilon".into()));
        }
        let k1 = self.factors.len();
        let k2 = other.factors.len();
        let k = k1 + k2;
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        let mut pairing = vec![vec![BigRational::zero(); k]; k];
        for i in 0..k1 {
            for j in 0..k1 {
                pairing[i][j] = self.pairing[i][j].clone();
            }
        }
        for i in 0..k2 {
            for j in 0..k2 {
                pairing[k1 + i][k1 + j] = other.pairing[i][j].clone();
            }
        }
        let mut refinement = self.refinement.clone();
        refinement.extend(other.refinement.iter().cloned());
        Ok(LinkingForm { epsilon: self.epsilon, factors, pairing, refinement })
    }
}

/// The S-boundary of an S-nonsingular form over Z: the linking form on
/// `coker(lambda)` with `phi(x, y) = x(z)/s` and `nu(y) = theta(z, z)/s^2`
/// where `s y = lambda z`.
pub fn s_boundary(v: &QuadraticForm) -> Result<LinkingForm> {
    if v.ring != Ring::Z {
        return Err(Error::Ring("S-boundary is defined over Z".into()));
    }
    let lam = v.lambda();
    let det = lam.det()?;
    if det.is_zero() {
        return Err(Error::Precondition("S-boundary of a degenerate form".into()));
    }
    let snf = snf::smith_normal_form(&lam)?;
    let diag = snf.diagonal();
    let idx: Vec<usize> = (0..diag.len()).filter(|&i| !diag[i].is_one()).collect();
    let factors: Vec<BigInt> = idx.iter().map(|&i| diag[i].clone()).collect();
    // generators g_i = U e_i; lifts z_i = W^{-1} e_i with d_i g_i = lambda z_i
    let m = snf.u.transpose().mm(&snf.w_inv);
    let k = idx.len();
    let pairing: Vec<Vec<BigRational>> = (0..k)
        .map(|a| {
            (0..k).map(|b| frac(m.at(idx[a], idx[b]).clone(), factors[b].clone())).collect()
        })
        .collect();
    let refinement: Vec<BigRational> = if v.epsilon == Eps::Plus {
        (0..k)
            .map(|b| {
                let zcol = snf.w_inv.column(idx[b]);
                let q = zcol.transpose().mm(&v.theta).mm(&zcol);
                frac(q.at(0, 0).clone(), &factors[b] * &factors[b])
            })
            .collect()
    } else {
        vec![]
    };
    LinkingForm::new(v.epsilon, factors, pairing, refinement)
}

/// An isometry of linking forms, stored as the integer matrix of generator
/// images (columns), read modulo the target orders.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LinkingIso {
    #[serde(with = "strings::bigint_vec")]
    pub source_factors: Vec<BigInt>,
    #[serde(with = "strings::bigint_vec")]
    pub target_factors: Vec<BigInt>,
    /// `k' x k` integer matrix: column `i` holds the coordinates of the
    /// image of the i-th source generator
    pub matrix: Mat,
}

impl LinkingIso {
    pub fn new(source: &LinkingForm, target: &LinkingForm, matrix: Mat) -> Result<LinkingIso> {
        let f = LinkingIso {
            source_factors: source.factors.clone(),
            target_factors: target.factors.clone(),
            matrix,
        };
        f.verify(source, target)?;
        Ok(f)
    }

    pub fn identity(form: &LinkingForm) -> LinkingIso {
        LinkingIso {
            source_factors: form.factors.clone(),
            target_factors: form.factors.clone(),
            matrix: Mat::identity(Ring::Z, form.factors.len()),
        }
    }

    fn reduce(&self) -> Mat {
        Mat::from_fn(Ring::Z, self.target_factors.len(), self.source_factors.len(), |r, c| {
            self.matrix.at(r, c).mod_floor(&self.target_factors[r])
        })
    }

    pub fn verify(&self, source: &LinkingForm, target: &LinkingForm) -> Result<()> {
        let k = source.factors.len();
        let kq = target.factors.len();
        if self.matrix.rows() != kq || self.matrix.cols() != k {
            return Err(Error::Shape("linking iso matrix shape".into()));
        }
        if source.group_order() != target.group_order() {
            return Err(Error::Verification("group orders differ".into()));
        }
        // well-defined on orders: d_i * image of g_i = 0 in the target
        for i in 0..k {
            for j in 0..kq {
                let prod = &source.factors[i] * self.matrix.at(j, i);
                if !prod.mod_floor(&target.factors[j]).is_zero() {
                    return Err(Error::Verification("map not well-defined on orders".into()));
                }
            }
        }
        // surjective (hence bijective)
        let c = self.reduce();
        let d = Mat::from_fn(Ring::Z, kq, kq, |r, s| {
            if r == s {
                target.factors[r].clone()
            } else {
                BigInt::zero()
            }
        });
        let aug = c.hstack(&d)?;
        let s = snf::smith_normal_form(&aug)?;
        if s.rank() != kq || !s.diagonal().iter().all(|x| x.is_one()) {
            return Err(Error::Verification("map is not surjective".into()));
        }
        // pairing and refinement preservation on generators
        for i in 0..k {
            let ci: Vec<BigInt> = (0..kq).map(|r| c.at(r, i).clone()).collect();
            for j in 0..k {
                let cj: Vec<BigInt> = (0..kq).map(|r| c.at(r, j).clone()).collect();
                if target.phi_of(&ci, &cj) != mod_one(&source.pairing[i][j]) {
                    return Err(Error::Verification("pairing not preserved".into()));
                }
            }
            if source.epsilon == Eps::Plus && target.nu_of(&ci) != mod_one(&source.refinement[i])
            {
                return Err(Error::Verification("refinement not preserved".into()));
            }
        }
        Ok(())
    }

    /// Equality as maps of the presented groups.
    pub fn same_map(&self, other: &LinkingIso) -> bool {
        self.source_factors == other.source_factors
            && self.target_factors == other.target_factors
            && self.reduce() == other.reduce()
    }

    /// `self . inner` (apply `inner` first).
    pub fn compose(&self, inner: &LinkingIso) -> Result<LinkingIso> {
        if inner.target_factors != self.source_factors {
            return Err(Error::Precondition("linking iso composition mismatch".into()));
        }
        Ok(LinkingIso {
            source_factors: inner.source_factors.clone(),
            target_factors: self.target_factors.clone(),
            matrix: self.matrix.mm(&inner.matrix),
        })
    }

    /// Inverse, by exact solving modulo the order lattice.
    pub fn invert(&self, source: &LinkingForm, target: &LinkingForm) -> Result<LinkingIso> {
        let k = source.factors.len();
        let c = self.reduce();
        let d = Mat::from_fn(Ring::Z, k, k, |r, s| {
            if r == s {
                target.factors[r].clone()
            } else {
                BigInt::zero()
            }
        });
        let aug = c.hstack(&d)?;
        let sol = snf::solve(&aug, &Mat::identity(Ring::Z, k))?
            .ok_or_else(|| Error::Verification("linking iso not invertible".into()))?;
        let x = sol.submatrix(0, k, 0, k);
        LinkingIso::new(target, source, x)
    }
}

/// The complete list of isometries between two linking forms, by brute force
/// over generator images with order and Gram pruning.  Requires the group
/// order to stay within `order_cap`.
pub fn isometries_between(
    a: &LinkingForm,
    b: &LinkingForm,
    order_cap: u64,
) -> Result<Vec<LinkingIso>> {
    if a.epsilon != b.epsilon {
        return Err(Error::Precondition("mixed epsilon".into()));
    }
    if a.group_order() > BigInt::from(order_cap) {
        return Err(Error::Budget(format!(
            "group order {} exceeds cap {order_cap}",
            a.group_order()
        )));
    }
    if a.group_order() != b.group_order() {
        return Ok(vec![]);
    }
    let k = a.factors.len();
    let kq = b.factors.len();
    if k == 0 && kq == 0 {
        return Ok(vec![LinkingIso::identity(a)]);
    }
    // candidate images for generator i
    let mut per_gen: Vec<Vec<Vec<BigInt>>> = Vec::with_capacity(k);
    for i in 0..k {
        let mut cands = Vec::new();
        let steps: Vec<(BigInt, BigInt)> = b
            .factors
            .iter()
            .map(|dj| {
                let g = dj.gcd(&a.factors[i]);
                (dj / &g, g)
            })
            .collect();
        let mut idx = vec![BigInt::zero(); kq];
        loop {
            let coords: Vec<BigInt> =
                (0..kq).map(|j| (&idx[j] * &steps[j].0).mod_floor(&b.factors[j])).collect();
            let phi_ok = b.phi_of(&coords, &coords) == mod_one(&a.pairing[i][i]);
            let nu_ok = a.epsilon == Eps::Minus || b.nu_of(&coords) == mod_one(&a.refinement[i]);
            if phi_ok && nu_ok {
                cands.push(coords);
            }
            let mut j = 0;
            loop {
                if j == kq {
                    break;
                }
                idx[j] += 1;
                if idx[j] >= steps[j].1 {
                    idx[j] = BigInt::zero();
                    j += 1;
                } else {
                    break;
                }
            }
            if j == kq {
                break;
            }
        }
        per_gen.push(cands);
    }
    let mut out = Vec::new();
    let mut chosen: Vec<Vec<BigInt>> = Vec::new();
    search_isos(a, b, &per_gen, &mut chosen, &mut out);
    Ok(out)
}

fn search_isos(
    a: &LinkingForm,
    b: &LinkingForm,
    per_gen: &[Vec<Vec<BigInt>>],
    chosen: &mut Vec<Vec<BigInt>>,
    out: &mut Vec<LinkingIso>,
) {
    let k = a.factors.len();
    let i = chosen.len();
    if i == k {
        let matrix =
            Mat::from_fn(Ring::Z, b.factors.len(), k, |r, c| chosen[c][r].clone());
        let f = LinkingIso {
            source_factors: a.factors.clone(),
            target_factors: b.factors.clone(),
            matrix,
        };
        if f.verify(a, b).is_ok() {
            out.push(f);
        }
        return;
    }
    'cand: for cand in &per_gen[i] {
        for (j, prev) in chosen.iter().enumerate() {
            if b.phi_of(prev, cand) != mod_one(&a.pairing[j][i]) {
                continue 'cand;
            }
        }
        chosen.push(cand.clone());
        search_isos(a, b, per_gen, chosen, out);
        chosen.pop();
    }
}

/// Descend a verified stable boundary isomorphism to an isometry of the
/// S-boundary linking forms.  The stabilization blocks are erased by the
/// normal-form extraction; the induced map is `[b^T]` on cokernels.
pub fn descend_iso(
    f: &FormationIso,
    v: &QuadraticForm,
    vprime: &QuadraticForm,
) -> Result<LinkingIso> {
    let comp = normal_form_boundary_iso(f, v, vprime)?;
    descend_matrix(&comp.b, v, vprime)
}

/// The linking isometry induced on cokernels by `b^T : V* -> V'*`, where
/// `lambda' a = b^T`-compatibility guarantees `b^T(im lambda)` lies in
/// `im lambda'`.
fn descend_matrix(b: &Mat, v: &QuadraticForm, vprime: &QuadraticForm) -> Result<LinkingIso> {
    let bs = s_boundary(v)?;
    let bt = s_boundary(vprime)?;
    let snf_v = snf::smith_normal_form(&v.lambda())?;
    let snf_w = snf::smith_normal_form(&vprime.lambda())?;
    let dv = snf_v.diagonal();
    let dw = snf_w.diagonal();
    let idx_v: Vec<usize> = (0..dv.len()).filter(|&i| !dv[i].is_one()).collect();
    let idx_w: Vec<usize> = (0..dw.len()).filter(|&i| !dw[i].is_one()).collect();
    let map = snf_w.u_inv.mm(&b.transpose()).mm(&snf_v.u);
    let matrix = Mat::from_fn(Ring::Z, idx_w.len(), idx_v.len(), |r, c| {
        map.at(idx_w[r], idx_v[c]).mod_floor(&dw[idx_w[r]])
    });
    LinkingIso::new(&bs, &bt, matrix)
}

/// The boundary `d_S h = [h^{-T}]` of an isometry of S-nonsingular forms.
pub fn s_boundary_of_isometry(h: &forms::Isometry) -> Result<LinkingIso> {
    let hinv = h.matrix.inverse()?;
    descend_matrix(&hinv, &h.source, &h.target)
}

/// Orbit decomposition of `Iso_S(d_S v, d_S v')` under the action of
/// `Aut(v) x Aut(v')` through their S-boundaries.
#[derive(Clone, Debug)]
pub struct OrbitDecomposition {
    pub isometries: Vec<LinkingIso>,
    /// indices into `isometries`, one sorted vector per orbit
    pub orbits: Vec<Vec<usize>>,
    /// index of the orbit containing the identity, when it applies
    pub identity_orbit: Option<usize>,
    /// both automorphism searches ran to completion
    pub complete: bool,
}

impl OrbitDecomposition {
    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }
}

/// Caps for the orbit computation.
#[derive(Clone, Copy, Debug)]
pub struct OrbitBudget {
    pub order_cap: u64,
    pub search_budget: u64,
}

impl Default for OrbitBudget {
    fn default() -> Self {
        OrbitBudget { order_cap: 10_000, search_budget: 2_000_000 }
    }
}

pub fn biso_orbits(
    v: &QuadraticForm,
    vprime: &QuadraticForm,
    budget: OrbitBudget,
) -> Result<OrbitDecomposition> {
    let bv = s_boundary(v)?;
    let bw = s_boundary(vprime)?;
    let isos = isometries_between(&bv, &bw, budget.order_cap)?;
    let auts_v = forms::search_isometries(v, v, budget.search_budget, true)?;
    let auts_w = forms::search_isometries(vprime, vprime, budget.search_budget, true)?;
    let complete = auts_v.complete && auts_w.complete;
    let mut left: Vec<LinkingIso> = Vec::new(); // d_S of Aut(v')
    for m in &auts_w.isometries {
        let h = forms::Isometry::new(vprime.clone(), vprime.clone(), m.clone())?;
        left.push(s_boundary_of_isometry(&h)?);
    }
    let mut right_inv: Vec<LinkingIso> = Vec::new(); // inverses of d_S of Aut(v)
    for m in &auts_v.isometries {
        let h = forms::Isometry::new(v.clone(), v.clone(), m.clone())?;
        right_inv.push(s_boundary_of_isometry(&h)?.invert(&bv, &bv)?);
    }
    let mut orbit_of: Vec<Option<usize>> = vec![None; isos.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..isos.len() {
        if orbit_of[start].is_some() {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![start];
        orbit_of[start] = Some(id);
        let mut frontier = vec![start];
        while let Some(cur) = frontier.pop() {
            for l in &left {
                for r in &right_inv {
                    let img = l.compose(&isos[cur])?.compose(r)?;
                    if let Some(pos) = isos.iter().position(|f| f.same_map(&img)) {
                        if orbit_of[pos].is_none() {
                            orbit_of[pos] = Some(id);
                            members.push(pos);
                            frontier.push(pos);
                        }
                    } else {
                        return Err(Error::Verification(
                            "orbit action left the isometry set".into(),
                        ));
                    }
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    let identity_orbit = if bv.factors == bw.factors {
        let id = LinkingIso::identity(&bv);
        isos.iter().position(|f| f.same_map(&id)).and_then(|p| orbit_of[p])
    } else {
        None
    };
    Ok(OrbitDecomposition { isometries: isos, orbits, identity_orbit, complete })
}

/// `l_p(G)`: the number of invariant factors divisible by `p`.
pub fn min_generators(factors: &[BigInt], p: &BigInt) -> usize {
    factors.iter().filter(|d| d.mod_floor(p).is_zero()).count()
}

/// The odd primes dividing the group order.
pub fn odd_prime_divisors(factors: &[BigInt]) -> Vec<BigInt> {
    let order: BigInt = factors.iter().product();
    let mut n = order.abs();
    let two = BigInt::from(2);
    while n.mod_floor(&two).is_zero() && n > BigInt::zero() {
        n /= &two;
    }
    let mut out = Vec::new();
    let mut p = BigInt::from(3);
    while &p * &p <= n {
        if n.mod_floor(&p).is_zero() {
            out.push(p.clone());
            while n.mod_floor(&p).is_zero() {
                n /= &p;
            }
        }
        p += &two;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Ring {
        Ring::Z
    }

    #[test]
    fn s_boundary_rank_one() {
        // (Z,1): G = Z/2, phi = 1/2, nu = 1/4
        let v = QuadraticForm::rank_one(z(), Eps::Plus, 1);
        let b = s_boundary(&v).unwrap();
        assert_eq!(b.factors, vec![BigInt::from(2)]);
        assert_eq!(b.pairing[0][0], BigRational::new(BigInt::one(), BigInt::from(2)));
        assert_eq!(b.refinement[0], BigRational::new(BigInt::one(), BigInt::from(4)));

        // (Z,3): G = Z/6, nu = 1/12
        let v = QuadraticForm::rank_one(z(), Eps::Plus, 3);
        let b = s_boundary(&v).unwrap();
        assert_eq!(b.factors, vec![BigInt::from(6)]);
        assert_eq!(b.refinement[0], BigRational::new(BigInt::one(), BigInt::from(12)));

        // hyperbolic: trivial boundary
        let h = forms::hyperbolic(1, Eps::Plus, z());
        let b = s_boundary(&h).unwrap();
        assert!(b.factors.is_empty());
    }

    #[test]
    fn s_boundary_respects_group_order() {
        for theta in [
            Mat::from_rows(z(), &[&[2, 1], &[0, -3]]),
            Mat::from_rows(z(), &[&[1, 0], &[1, 5]]),
        ] {
            let v = QuadraticForm::new(z(), Eps::Plus, theta).unwrap();
            let det = v.lambda().det().unwrap().abs();
            let b = s_boundary(&v).unwrap();
            assert_eq!(b.group_order(), det);
        }
    }

    #[test]
    fn s_boundary_of_hyperbolics_trivial() {
        for k in 1..=4 {
            for eps in [Eps::Plus, Eps::Minus] {
                let h = forms::hyperbolic(k, eps, z());
                assert_eq!(s_boundary(&h).unwrap().generators(), 0, "H_{eps:?}({k})");
            }
        }
    }

    #[test]
    fn isometry_counts_for_rank_one_forms() {
        // d_S(Z,15): Z/30, exactly the units u with u^2 = 1 mod 60
        let v = QuadraticForm::rank_one(z(), Eps::Plus, 15);
        let b = s_boundary(&v).unwrap();
        let isos = isometries_between(&b, &b, 10_000).unwrap();
        let units: Vec<BigInt> = isos.iter().map(|f| f.matrix.at(0, 0).clone()).collect();
        assert_eq!(isos.len(), 4, "units found: {units:?}");
        for u in [1i64, 11, 19, 29] {
            assert!(units.contains(&BigInt::from(u)), "missing unit {u}");
        }

        // trivial group: only the identity
        let h = forms::hyperbolic(1, Eps::Plus, z());
        let b = s_boundary(&h).unwrap();
        assert_eq!(isometries_between(&b, &b, 10_000).unwrap().len(), 1);

        // (Z,1): only the identity on Z/2
        let v = QuadraticForm::rank_one(z(), Eps::Plus, 1);
        let b = s_boundary(&v).unwrap();
        assert_eq!(isometries_between(&b, &b, 10_000).unwrap().len(), 1);
    }

    #[test]
    fn s_boundary_additive_up_to_isometry() {
        let v1 = QuadraticForm::rank_one(z(), Eps::Plus, 1);
        let v3 = QuadraticForm::rank_one(z(), Eps::Plus, 3);
        let sum = v1.direct_sum(&v3).unwrap();
        let direct = s_boundary(&v1).unwrap().direct_sum(&s_boundary(&v3).unwrap()).unwrap();
        let of_sum = s_boundary(&sum).unwrap();
        assert_eq!(of_sum.group_order(), direct.group_order());
        let isos = isometries_between(&of_sum, &direct, 10_000).unwrap();
        assert!(!isos.is_empty(), "product and sum presentations must be isometric");
    }

    #[test]
    fn descend_boundary_of_isometry() {
        // d_S(-id) on (Z,15) is multiplication by -1 = 29 on Z/30
        let v = QuadraticForm::rank_one(z(), Eps::Plus, 15);
        let h =
            forms::Isometry::new(v.clone(), v.clone(), Mat::from_rows(z(), &[&[-1]])).unwrap();
        let d = s_boundary_of_isometry(&h).unwrap();
        assert_eq!(*d.matrix.at(0, 0), BigInt::from(29));

        let id = forms::Isometry::identity(&v);
        let d = s_boundary_of_isometry(&id).unwrap();
        assert!(d.same_map(&LinkingIso::identity(&s_boundary(&v).unwrap())));
    }

    #[test]
    fn descend_formation_iso_of_boundary() {
        use crate::formations::boundary_of_isometry;
        let v = QuadraticForm::rank_one(z(), Eps::Plus, 15);
        let h =
            forms::Isometry::new(v.clone(), v.clone(), Mat::from_rows(z(), &[&[-1]])).unwrap();
        let f = boundary_of_isometry(&h).unwrap();
        let d = descend_iso(&f, &v, &v).unwrap();
        let direct = s_boundary_of_isometry(&h).unwrap();
        assert!(d.same_map(&direct));
    }

    #[test]
    fn orbit_counts_match_example() {
        // sbAut(Z, n) has 2^{k-1} orbits for n a product of k distinct odd primes
        let cases = [(3i64, 1usize), (15, 2), (105, 4)];
        for (n, orbits) in cases {
            let v = QuadraticForm::rank_one(z(), Eps::Plus, n);
            let dec = biso_orbits(&v, &v, OrbitBudget::default()).unwrap();
            assert!(dec.complete);
            assert_eq!(dec.orbit_count(), orbits, "n = {n}");
            assert!(dec.identity_orbit.is_some());
        }
    }

    #[test]
    fn min_generators_examples() {
        let g = vec![BigInt::from(2), BigInt::from(6)];
        assert_eq!(min_generators(&g, &BigInt::from(2)), 2);
        let g = vec![BigInt::from(6)];
        assert_eq!(min_generators(&g, &BigInt::from(5)), 0);
        let g = vec![BigInt::from(3), BigInt::from(4), BigInt::from(8)];
        assert_eq!(min_generators(&g, &BigInt::from(2)), 2);
    }

    #[test]
    fn linking_iso_rejects_non_isometry() {
        let v = QuadraticForm::rank_one(z(), Eps::Plus, 15);
        let b = s_boundary(&v).unwrap();
        // 7^2 = 49 != 1 mod 60: not an isometry of the refinement
        let m = Mat::from_rows(z(), &[&[7]]);
        assert!(LinkingIso::new(&b, &b, m).is_err());
    }
}
