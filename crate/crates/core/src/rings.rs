//! The etale algebra K_f = Q[x]/(f(x,1)), the ring R_f with basis
//! (1, zeta_1, ..., zeta_{n-1}), based fractional ideals, and a
//! probabilistic square-class comparison.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::forms::BinaryForm;
use crate::gf::{FpPoly, PrimeField};
use crate::poly;
use crate::sturm;

/// K_f with the power basis 1, theta, ..., theta^(n-1).
#[derive(Debug, PartialEq, Eq)]
pub struct EtaleAlgebra {
    form: BinaryForm,
    /// theta^n = sum reduction[j] theta^j.
    reduction: Vec<BigRational>,
}

impl EtaleAlgebra {
    pub fn new(form: &BinaryForm) -> Result<Arc<Self>> {
        let f0 = form.leading().clone();
        if f0.is_zero() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let low = form.dehomogenize();
        let n = form.degree();
        let reduction = (0..n)
            .map(|j| -BigRational::new(low[j].clone(), f0.clone()))
            .collect();
        Ok(Arc::new(EtaleAlgebra {
            form: form.clone(),
            reduction,
        }))
    }

    pub fn form(&self) -> &BinaryForm {
        &self.form
    }

    pub fn degree(&self) -> usize {
        self.form.degree()
    }
}

/// An element of K_f in power-basis coordinates.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    alg: Arc<EtaleAlgebra>,
    coords: Vec<BigRational>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, o: &Self) -> bool {
        self.alg == o.alg && self.coords == o.coords
    }
}

impl AlgebraElement {
    pub fn new(alg: &Arc<EtaleAlgebra>, coords: Vec<BigRational>) -> Result<Self> {
        if coords.len() != alg.degree() {
            return Err(Error::OutOfRange {
                what: "coordinate count",
                value: coords.len().to_string(),
            });
        }
        Ok(AlgebraElement {
            alg: alg.clone(),
            coords,
        })
    }

    /// Reduce an arbitrary polynomial in theta (lowest degree first).
    pub fn from_poly(alg: &Arc<EtaleAlgebra>, p: &[BigRational]) -> Self {
        let n = alg.degree();
        let mut c: Vec<BigRational> = p.to_vec();
        if c.len() < n {
            c.resize(n, BigRational::zero());
        }
        for k in (n..c.len()).rev() {
            let top = std::mem::replace(&mut c[k], BigRational::zero());
            if top.is_zero() {
                continue;
            }
            for (j, r) in alg.reduction.iter().enumerate() {
                c[k - n + j] += &top * r;
            }
        }
        c.truncate(n);
        AlgebraElement {
            alg: alg.clone(),
            coords: c,
        }
    }

    pub fn from_int_poly(alg: &Arc<EtaleAlgebra>, p: &[BigInt]) -> Self {
        let q: Vec<BigRational> = p.iter().cloned().map(BigRational::from_integer).collect();
        Self::from_poly(alg, &q)
    }

    pub fn from_integer(alg: &Arc<EtaleAlgebra>, k: &BigInt) -> Self {
        Self::from_int_poly(alg, std::slice::from_ref(k))
    }

    pub fn one(alg: &Arc<EtaleAlgebra>) -> Self {
        Self::from_integer(alg, &BigInt::one())
    }

    pub fn theta(alg: &Arc<EtaleAlgebra>) -> Self {
        Self::from_int_poly(alg, &[BigInt::zero(), BigInt::one()])
    }

    pub fn algebra(&self) -> &Arc<EtaleAlgebra> {
        &self.alg
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn check(&self, o: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.alg, &o.alg) || self.alg == o.alg {
            Ok(())
        } else {
            Err(Error::MismatchedForms)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect();
        Ok(AlgebraElement { alg: self.alg.clone(), coords })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect();
        Ok(AlgebraElement { alg: self.alg.clone(), coords })
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        AlgebraElement {
            alg: self.alg.clone(),
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let n = self.coords.len();
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coords.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Ok(Self::from_poly(&self.alg, &prod))
    }

    /// Matrix of multiplication: column j holds the coordinates of self * theta^j.
    pub fn mult_matrix(&self) -> Vec<Vec<BigRational>> {
        let n = self.coords.len();
        let theta = Self::theta(&self.alg);
        let mut col = self.clone();
        let mut cols = Vec::with_capacity(n);
        for _ in 0..n {
            cols.push(col.coords.clone());
            col = col.mul(&theta).expect("same algebra");
        }
        (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect()
    }

    pub fn norm(&self) -> BigRational {
        poly::rational_det(&self.mult_matrix())
    }

    pub fn trace(&self) -> BigRational {
        let m = self.mult_matrix();
        (0..m.len()).map(|i| m[i][i].clone()).sum()
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.coords.len();
        let mut e0 = vec![BigRational::zero(); n];
        e0[0] = BigRational::one();
        let x = poly::rational_solve(&self.mult_matrix(), &e0).ok_or(Error::NotInvertible)?;
        Ok(AlgebraElement { alg: self.alg.clone(), coords: x })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.mul(&o.inverse()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one(&self.alg);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Positive integer multiple of self with integer coordinates, and the
    /// multiplier used.
    pub fn clear_denominators(&self) -> (Vec<BigInt>, BigInt) {
        let d = self
            .coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let v = self
            .coords
            .iter()
            .map(|c| (c * BigRational::from_integer(d.clone())).to_integer())
            .collect();
        (v, d)
    }

    /// Substitute theta -> `image` (an element of another algebra) in the
    /// polynomial representing self.
    pub fn substitute(&self, image: &AlgebraElement) -> AlgebraElement {
        let mut acc = AlgebraElement::from_integer(&image.alg, &BigInt::zero());
        for c in self.coords.iter().rev() {
            acc = acc.mul(image).expect("same algebra");
            acc.coords[0] += c;
        }
        acc
    }
}

/// N(a theta + b) = f(-b, a) / f0.
pub fn norm_linear(f: &BinaryForm, a: &BigInt, b: &BigInt) -> Result<BigRational> {
    if f.leading().is_zero() {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let v = f.evaluate(&-b, a);
    if v.is_zero() {
        return Err(Error::RationalRoot);
    }
    Ok(BigRational::new(v, f.leading().clone()))
}

/// R_f given by integer structure constants on (1, zeta_1, ..., zeta_{n-1}).
#[derive(Clone, Debug)]
pub struct RankNRing {
    alg: Arc<EtaleAlgebra>,
    /// Power-basis coordinates of zeta_k for k = 0..n (zeta_0 = 1,
    /// zeta_n = -f_n as a scalar).
    zeta: Vec<Vec<BigInt>>,
    /// table[i][j] = coordinates of b_i b_j in the basis (1, zeta_1, ...).
    table: Vec<Vec<Vec<BigInt>>>,
}

impl RankNRing {
    pub fn from_form(f: &BinaryForm) -> Result<Self> {
        let alg = EtaleAlgebra::new(f)?;
        let n = f.degree();
        let c = f.coeffs();
        let mut zeta = Vec::with_capacity(n + 1);
        zeta.push(unit_vec(n, 0));
        for k in 1..n {
            let mut v = vec![BigInt::zero(); n];
            for i in 1..=k {
                v[i] = c[k - i].clone();
            }
            zeta.push(v);
        }
        let mut last = vec![BigInt::zero(); n];
        last[0] = -&c[n];
        zeta.push(last);

        // zeta_k in the ring basis, with zeta_n = -f_n.
        let basis_vec = |k: usize| -> Vec<BigInt> {
            if k == n {
                let mut v = vec![BigInt::zero(); n];
                v[0] = -&c[n];
                v
            } else {
                unit_vec(n, k)
            }
        };
        let mut table = vec![vec![vec![BigInt::zero(); n]; n]; n];
        for j in 0..n {
            table[0][j] = unit_vec(n, j);
            table[j][0] = unit_vec(n, j);
        }
        for i in 1..n {
            for j in i..n {
                let mut v = vec![BigInt::zero(); n];
                for k in (j + 1)..=(i + j).min(n) {
                    let b = basis_vec(k);
                    let coef = &c[i + j - k];
                    for (t, bt) in b.iter().enumerate() {
                        v[t] += coef * bt;
                    }
                }
                let lo = if i + j > n { i + j - n } else { 1 };
                for k in lo.max(1)..=i {
                    let b = basis_vec(k);
                    let coef = &c[i + j - k];
                    for (t, bt) in b.iter().enumerate() {
                        v[t] -= coef * bt;
                    }
                }
                table[i][j] = v.clone();
                table[j][i] = v;
            }
        }
        Ok(RankNRing { alg, zeta, table })
    }

    pub fn algebra(&self) -> &Arc<EtaleAlgebra> {
        &self.alg
    }

    pub fn form(&self) -> &BinaryForm {
        &self.alg.form
    }

    pub fn rank(&self) -> usize {
        self.alg.degree()
    }

    /// Coordinates of b_i b_j in the ring basis.
    pub fn structure_constants(&self, i: usize, j: usize) -> &[BigInt] {
        &self.table[i][j]
    }

    pub fn structure_tensor(&self) -> &Vec<Vec<Vec<BigInt>>> {
        &self.table
    }

    /// zeta_k for 0 <= k <= n as an element of K_f.
    pub fn zeta(&self, k: usize) -> AlgebraElement {
        AlgebraElement::from_int_poly(&self.alg, &self.zeta[k])
    }

    /// Product of two elements given in ring-basis coordinates.
    pub fn mul_coords(&self, u: &[BigInt], v: &[BigInt]) -> Vec<BigInt> {
        let n = self.rank();
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in u.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in self.table[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &ab * c;
                    }
                }
            }
        }
        out
    }

    pub fn to_algebra(&self, coords: &[BigRational]) -> AlgebraElement {
        let n = self.rank();
        let mut v = vec![BigRational::zero(); n];
        for (k, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, z) in self.zeta[k].iter().enumerate() {
                if !z.is_zero() {
                    v[i] += c * BigRational::from_integer(z.clone());
                }
            }
        }
        AlgebraElement { alg: self.alg.clone(), coords: v }
    }

    /// Ring-basis coordinates of an element of K_f (triangular solve).
    pub fn from_algebra(&self, x: &AlgebraElement) -> Vec<BigRational> {
        let n = self.rank();
        let f0 = BigRational::from_integer(self.form().leading().clone());
        let mut out = vec![BigRational::zero(); n];
        let mut rest = x.coords.clone();
        for k in (1..n).rev() {
            let ck = &rest[k] / &f0;
            for (i, z) in self.zeta[k].iter().enumerate() {
                if !z.is_zero() {
                    rest[i] -= &ck * BigRational::from_integer(z.clone());
                }
            }
            out[k] = ck;
        }
        out[0] = rest[0].clone();
        out
    }

    /// det Tr(b_i b_j) computed from the structure constants.
    pub fn discriminant(&self) -> BigInt {
        let n = self.rank();
        let traces: Vec<BigInt> = (0..n)
            .map(|k| (0..n).map(|l| self.table[k][l][l].clone()).sum())
            .collect();
        let m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        self.table[i][j]
                            .iter()
                            .zip(&traces)
                            .map(|(c, t)| c * t)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        poly::bareiss_det(m)
    }

    /// Compare the table with multiplication in K_f.
    pub fn agrees_with_algebra(&self) -> bool {
        let n = self.rank();
        for i in 0..n {
            for j in i..n {
                let prod = self.zeta(i).mul(&self.zeta(j)).expect("same algebra");
                let coords: Vec<BigRational> = self.table[i][j]
                    .iter()
                    .cloned()
                    .map(BigRational::from_integer)
                    .collect();
                if self.to_algebra(&coords) != prod {
                    return false;
                }
            }
        }
        true
    }

    /// (b_i b_j) b_k == b_i (b_j b_k) for every basis triple.
    pub fn is_associative(&self) -> bool {
        let n = self.rank();
        for i in 0..n {
            for j in 0..n {
                let left_ij = &self.table[i][j];
                for k in 0..n {
                    let lhs = self.mul_coords(left_ij, &unit_vec(n, k));
                    let rhs = self.mul_coords(&unit_vec(n, i), &self.table[j][k]);
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn unit_vec(n: usize, k: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[k] = BigInt::one();
    v
}

/// A fractional ideal with an ordered basis.
#[derive(Clone, Debug)]
pub struct BasedIdeal {
    basis: Vec<AlgebraElement>,
    norm: BigRational,
    orientation: i8,
    /// Inverse of the basis matrix (rows = basis power coordinates).
    inverse: Vec<Vec<BigRational>>,
}

impl BasedIdeal {
    pub fn new(basis: Vec<AlgebraElement>) -> Result<Self> {
        let Some(first) = basis.first() else {
            return Err(Error::DependentBasis);
        };
        let alg = first.alg.clone();
        let n = alg.degree();
        if basis.len() != n {
            return Err(Error::DependentBasis);
        }
        for b in &basis {
            first.check(b)?;
        }
        let rows: Vec<Vec<BigRational>> = basis.iter().map(|b| b.coords.clone()).collect();
        let det = poly::rational_det(&rows);
        if det.is_zero() {
            return Err(Error::DependentBasis);
        }
        let f0 = BigRational::from_integer(alg.form.leading().clone());
        let t = det / f0.pow(n as i32 - 1);
        let orientation = if t.is_negative() { -1 } else { 1 };
        // Columns of the inverse solve rows^T x = e_i.
        let rows_t: Vec<Vec<BigRational>> =
            (0..n).map(|i| (0..n).map(|j| rows[j][i].clone()).collect()).collect();
        let mut inverse = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![BigRational::zero(); n];
            e[i] = BigRational::one();
            inverse.push(poly::rational_solve(&rows_t, &e).ok_or(Error::DependentBasis)?);
        }
        Ok(BasedIdeal {
            basis,
            norm: t.abs(),
            orientation,
            inverse,
        })
    }

    pub fn basis(&self) -> &[AlgebraElement] {
        &self.basis
    }

    pub fn algebra(&self) -> &Arc<EtaleAlgebra> {
        &self.basis[0].alg
    }

    /// Positive norm relative to R_f.
    pub fn norm(&self) -> &BigRational {
        &self.norm
    }

    /// Sign of the transition determinant.
    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    /// Coordinates of `x` in this basis.
    pub fn coordinates(&self, x: &AlgebraElement) -> Vec<BigRational> {
        // x = sum c_i b_i, i.e. c = x * rows^{-1}; inverse[i] holds the
        // coefficients expressing theta^i.
        let n = self.basis.len();
        let mut c = vec![BigRational::zero(); n];
        for (i, xi) in x.coords.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, v) in self.inverse[i].iter().enumerate() {
                c[j] += xi * v;
            }
        }
        c
    }

    /// The ideal kappa * I with the scaled basis.
    pub fn scale(&self, kappa: &AlgebraElement) -> Result<Self> {
        let basis = self
            .basis
            .iter()
            .map(|b| b.mul(kappa))
            .collect::<Result<Vec<_>>>()?;
        BasedIdeal::new(basis)
    }

    /// Whether the Z-span of `gens` equals the Z-span of this basis.
    pub fn spanned_by(&self, gens: &[AlgebraElement]) -> bool {
        same_lattice(gens, &self.basis)
    }

    /// Basis as string fractions, one row of power coordinates per element.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.basis
                .iter()
                .map(|b| {
                    serde_json::Value::Array(
                        b.coords
                            .iter()
                            .map(|c| serde_json::Value::String(crate::json::rational_string(c)))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

/// Lattice equality via Hermite normal forms after clearing a common
/// denominator.
pub fn same_lattice(a: &[AlgebraElement], b: &[AlgebraElement]) -> bool {
    let d = a
        .iter()
        .chain(b)
        .flat_map(|e| e.coords.iter())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let dq = BigRational::from_integer(d);
    let to_rows = |s: &[AlgebraElement]| -> Vec<Vec<BigInt>> {
        s.iter()
            .map(|e| e.coords.iter().map(|c| (c * &dq).to_integer()).collect())
            .collect()
    };
    poly::hermite_normal_form(&to_rows(a)) == poly::hermite_normal_form(&to_rows(b))
}

/// All pairwise products of two bases.
pub fn product_generators(i: &BasedIdeal, j: &BasedIdeal) -> Result<Vec<AlgebraElement>> {
    let mut out = Vec::new();
    for a in &i.basis {
        for b in &j.basis {
            out.push(a.mul(b)?);
        }
    }
    Ok(out)
}

/// The based ideal I_f(k) = <1, theta, ..., theta^k, zeta_{k+1}, ..., zeta_{n-1}>
/// for 0 <= k <= n-1, and for k = -1 the inverse ideal
/// <f0, zeta_2/theta, ..., zeta_n/theta>.
pub fn ideal_power_basis(f: &BinaryForm, k: i64) -> Result<BasedIdeal> {
    let ring = RankNRing::from_form(f)?;
    ring_ideal_power(&ring, k)
}

pub fn ring_ideal_power(ring: &RankNRing, k: i64) -> Result<BasedIdeal> {
    let n = ring.rank() as i64;
    if k < -1 || k > n - 1 {
        return Err(Error::OutOfRange {
            what: "ideal power",
            value: k.to_string(),
        });
    }
    let alg = ring.algebra();
    let c = ring.form().coeffs();
    let basis = if k == -1 {
        let mut b = vec![AlgebraElement::from_integer(alg, &c[0])];
        for j in 2..=n as usize {
            // zeta_j / theta = f0 theta^(j-1) + ... + f_{j-1}
            let p: Vec<BigInt> = (0..j).map(|i| c[j - 1 - i].clone()).collect();
            b.push(AlgebraElement::from_int_poly(alg, &p));
        }
        b
    } else {
        let k = k as usize;
        (0..n as usize)
            .map(|i| {
                if i <= k {
                    AlgebraElement::from_int_poly(alg, &unit_vec(i + 1, i))
                } else {
                    ring.zeta(i)
                }
            })
            .collect()
    };
    BasedIdeal::new(basis)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SquareClassVerdict {
    Equal,
    Distinct,
    Inconclusive,
}

const WITNESS_PRIME_BOUND: u64 = 1_000_000;

/// Compare the classes of `a` and `b` in K^x / K^x2. A Distinct verdict is
/// certain; Equal means every real sign and `trials` residue characters
/// at primes of good reduction agreed.
pub fn same_square_class(
    a: &AlgebraElement,
    b: &AlgebraElement,
    trials: usize,
    seed: u64,
) -> Result<SquareClassVerdict> {
    let g = a.mul(b)?;
    if g.is_zero() {
        return Err(Error::NotInvertible);
    }
    let f = g.alg.form.clone();
    let disc = f.discriminant()?;
    if disc.is_zero() {
        return Err(Error::DegenerateForm);
    }
    let big_f = f.dehomogenize();
    // g = h / d is in the square class of h d.
    let (h, denom) = g.clear_denominators();
    let gpoly: Vec<BigInt> = h.iter().map(|c| c * &denom).collect();

    for iv in sturm::isolate_real_roots(&big_f) {
        match sturm::sign_at_root(&gpoly, &big_f, &iv) {
            0 => return Err(Error::NotInvertible),
            s if s < 0 => return Ok(SquareClassVerdict::Distinct),
            _ => {}
        }
    }

    let bad = f.leading() * &disc * &denom;
    let mut witnesses = 0;
    for p in arith::primes_up_to(WITNESS_PRIME_BOUND) {
        if witnesses >= trials {
            break;
        }
        if p == 2 || (&bad % p).is_zero() {
            continue;
        }
        let field = PrimeField::new(p as u128)?;
        let fact = f.factor_mod_p(p as u128, arith::stream_seed(seed, p))?;
        let gmod = FpPoly::new(gpoly.iter().map(|c| arith::residue_u128(c, p as u128)).collect());
        let mut unit = true;
        let mut square = true;
        for (q, _) in &fact.factors {
            match field.is_square_mod_irreducible(&gmod, q) {
                None => {
                    unit = false;
                    break;
                }
                Some(false) => square = false,
                Some(true) => {}
            }
        }
        if !unit {
            continue;
        }
        if !square {
            return Ok(SquareClassVerdict::Distinct);
        }
        witnesses += 1;
    }
    if witnesses == 0 && trials > 0 {
        return Err(Error::NoGoodPrimes(WITNESS_PRIME_BOUND));
    }
    Ok(if witnesses >= trials && trials > 0 {
        SquareClassVerdict::Equal
    } else {
        SquareClassVerdict::Inconclusive
    })
}
