//! Binary n-ic forms f(x, y) = sum f_i x^(n-i) y^i over the integers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{FpPoly, PrimeField};
use crate::poly::{self, ZPoly};
use crate::sturm;

/// A binary form of degree n, stored as (f_0, ..., f_n).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::MalformedForm(coeffs.len()));
        }
        Ok(BinaryForm { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Same as `new`, additionally requiring even degree.
    pub fn new_even(coeffs: Vec<BigInt>) -> Result<Self> {
        let f = Self::new(coeffs)?;
        if f.degree() % 2 != 0 {
            return Err(Error::UnsupportedDegree(f.degree()));
        }
        Ok(f)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    pub fn leading(&self) -> &BigInt {
        &self.coeffs[0]
    }

    /// Genus g = n/2 - 1 of z^2 = f for even n >= 2.
    pub fn genus(&self) -> Option<usize> {
        let n = self.degree();
        (n % 2 == 0).then(|| n / 2 - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> BigInt {
        // Horner in x, with f_i y^i entering at step i.
        let mut acc = BigInt::zero();
        let mut ypow = BigInt::one();
        for c in &self.coeffs {
            acc = acc * x + c * &ypow;
            ypow *= y;
        }
        acc
    }

    pub fn height(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    /// f(x, 1) as a polynomial, lowest degree first.
    pub fn dehomogenize(&self) -> ZPoly {
        self.coeffs.iter().rev().cloned().collect()
    }

    /// f(1, y) as a polynomial in y, lowest degree first.
    pub fn dehomogenize_y(&self) -> ZPoly {
        self.coeffs.clone()
    }

    pub fn scale(&self, k: &BigInt) -> BinaryForm {
        BinaryForm {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Discriminant, normalised so that n = 2 gives f1^2 - 4 f0 f2. Forms
    /// with f0 = 0 are first moved by (1 t; 0 1) for the smallest t >= 1
    /// with f(1, t) != 0, which leaves the discriminant unchanged.
    pub fn discriminant(&self) -> Result<BigInt> {
        if self.is_zero() {
            return Ok(BigInt::zero());
        }
        if self.leading().is_zero() {
            let mut t = 1i64;
            loop {
                if !self.evaluate(&BigInt::one(), &BigInt::from(t)).is_zero() {
                    let g = Unimodular::new(1.into(), t.into(), 0.into(), 1.into())?;
                    return self.act(&g).discriminant();
                }
                t += 1;
            }
        }
        let n = self.degree();
        let f = self.dehomogenize();
        let df = poly::derivative(&f);
        let res = poly::resultant(&f, &df);
        let d = res / self.leading();
        Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
    }

    /// f'(x, y) = f(ax + cy, bx + dy) for g = (a b; c d).
    pub fn act(&self, g: &Unimodular) -> BinaryForm {
        let n = self.degree();
        let l1 = [g.a.clone(), g.c.clone()];
        let l2 = [g.b.clone(), g.d.clone()];
        let p1 = linear_powers(&l1, n);
        let p2 = linear_powers(&l2, n);
        let mut out = vec![BigInt::zero(); n + 1];
        for (i, fi) in self.coeffs.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            let term = binary_mul(&p1[n - i], &p2[i]);
            for (k, t) in term.iter().enumerate() {
                out[k] += fi * t;
            }
        }
        BinaryForm { coeffs: out }
    }

    /// Number of roots in P^1(R). Requires a nonzero discriminant.
    pub fn real_root_count(&self) -> Result<usize> {
        if self.discriminant()?.is_zero() {
            return Err(Error::DegenerateForm);
        }
        let at_infinity = usize::from(self.leading().is_zero());
        Ok(sturm::real_root_count(&self.dehomogenize()) + at_infinity)
    }

    /// Real root count by the exact Sturm method only.
    pub fn real_root_count_exact(&self) -> Result<usize> {
        if self.discriminant()?.is_zero() {
            return Err(Error::DegenerateForm);
        }
        let at_infinity = usize::from(self.leading().is_zero());
        Ok(sturm::exact_real_root_count(&self.dehomogenize()) + at_infinity)
    }

    /// Reduction modulo p: f(x, 1) mod p and the power of y dividing it.
    pub fn reduce_mod(&self, field: &PrimeField) -> (FpPoly, usize) {
        let p = field.p();
        let c: Vec<u128> = self
            .dehomogenize()
            .iter()
            .map(|c| crate::arith::residue_u128(c, p))
            .collect();
        let g = FpPoly::new(c);
        let v = self.degree() - g.deg();
        (g, v)
    }

    /// Factorisation type over F_p; the seed drives equal-degree splitting.
    pub fn factorization_type_mod_p(&self, p: u128, seed: u64) -> Result<FactorizationType> {
        Ok(self.factor_mod_p(p, seed)?.factorization_type())
    }

    pub fn factor_mod_p(&self, p: u128, seed: u64) -> Result<FactorizationMod> {
        if !crate::arith::is_probable_prime(&BigInt::from(p)) {
            return Err(Error::NotPrime(p));
        }
        let field = PrimeField::new(p)?;
        let (g, v) = self.reduce_mod(&field);
        if g.is_zero() {
            return Err(Error::ZeroForm(p));
        }
        let factors = field.factor(&g, seed);
        Ok(FactorizationMod {
            p,
            unit: g.lead(),
            factors,
            y_power: v,
        })
    }

    /// Coefficients i.i.d. uniform on [-height, height].
    pub fn random(n: usize, height: u64, seed: u64) -> BinaryForm {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(n, height, &mut rng)
    }

    pub fn random_with<R: Rng>(n: usize, height: u64, rng: &mut R) -> BinaryForm {
        let h = height.min(i64::MAX as u64) as i64;
        let coeffs = (0..=n).map(|_| BigInt::from(rng.random_range(-h..=h))).collect();
        BinaryForm { coeffs }
    }

    /// Coefficients as i64 when they all fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }
}

/// Powers L^0, ..., L^n of a binary linear form L = l0 x + l1 y.
fn linear_powers(l: &[BigInt; 2], n: usize) -> Vec<Vec<BigInt>> {
    let mut out = vec![vec![BigInt::one()]];
    for k in 1..=n {
        let prev = &out[k - 1];
        out.push(binary_mul(prev, &l[..]));
    }
    out
}

/// Product of binary forms stored as coefficient lists by power of y.
fn binary_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    poly::mul(a, b)
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for BinaryForm {
    type Err = Error;
    /// Comma-separated f_0, ..., f_n.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        BinaryForm::new(coeffs)
    }
}

impl Serialize for BinaryForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BinaryForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let coeffs = v
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        BinaryForm::new(coeffs).map_err(serde::de::Error::custom)
    }
}

/// An element (a b; c d) of SL_2(Z).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Unimodular {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Unimodular {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if &a * &d - &b * &c != BigInt::one() {
            return Err(Error::NotUnimodular);
        }
        Ok(Unimodular { a, b, c, d })
    }

    pub fn identity() -> Self {
        Unimodular {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    pub fn inverse(&self) -> Self {
        Unimodular {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn mul(&self, o: &Unimodular) -> Unimodular {
        Unimodular {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    /// Row vector times matrix: (x, y) . g.
    pub fn apply_row(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        (x * &self.a + y * &self.c, x * &self.b + y * &self.d)
    }

    /// Random product of elementary matrices with small multipliers.
    pub fn random<R: Rng>(rng: &mut R, steps: usize, bound: i64) -> Unimodular {
        let mut g = Unimodular::identity();
        for _ in 0..steps {
            let t = BigInt::from(rng.random_range(-bound..=bound));
            let e = if rng.random_bool(0.5) {
                Unimodular { a: 1.into(), b: t, c: 0.into(), d: 1.into() }
            } else {
                Unimodular { a: 1.into(), b: 0.into(), c: t, d: 1.into() }
            };
            g = g.mul(&e);
        }
        g
    }
}

/// Multiset of (degree, multiplicity) of the irreducible factors over F_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactorizationType {
    pub parts: Vec<(usize, usize)>,
}

impl FactorizationType {
    /// Number of distinct irreducible factors.
    pub fn m(&self) -> usize {
        self.parts.len()
    }

    pub fn total_degree(&self) -> usize {
        self.parts.iter().map(|(d, e)| d * e).sum()
    }

    pub fn is_separable(&self) -> bool {
        self.parts.iter().all(|&(_, e)| e == 1)
    }
}

/// The factors themselves: f = unit * y^v * prod q_i(x, y)^e_i mod p.
#[derive(Clone, Debug)]
pub struct FactorizationMod {
    pub p: u128,
    pub unit: u128,
    /// Monic irreducible factors of f(x, 1) mod p with multiplicities.
    pub factors: Vec<(FpPoly, usize)>,
    pub y_power: usize,
}

impl FactorizationMod {
    pub fn factorization_type(&self) -> FactorizationType {
        let mut parts: Vec<(usize, usize)> =
            self.factors.iter().map(|(q, e)| (q.deg(), *e)).collect();
        if self.y_power > 0 {
            parts.push((1, self.y_power));
        }
        parts.sort_unstable();
        FactorizationType { parts }
    }
}
