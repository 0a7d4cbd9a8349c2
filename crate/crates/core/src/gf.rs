//! Prime fields with moduli below 2^127, polynomials over them, and
//! factorisation by squarefree, distinct-degree and equal-degree splitting.
//! Also a table-driven small extension field for pencil determinants.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u128,
}

impl PrimeField {
    /// `p` must be prime; callers are trusted (checked in debug builds).
    pub fn new(p: u128) -> Result<Self> {
        if p < 2 || p >= 1u128 << 127 {
            return Err(Error::OutOfRange {
                what: "prime modulus",
                value: p.to_string(),
            });
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u128 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        if self.p <= u64::MAX as u128 {
            return (a * b) % self.p;
        }
        // Shift-and-add; fine since large moduli are rare.
        let mut result = 0u128;
        let mut x = a;
        let mut y = b;
        while y > 0 {
            if y & 1 == 1 {
                result = self.add(result, x);
            }
            x = self.add(x, x);
            y >>= 1;
        }
        result
    }

    pub fn pow(&self, mut a: u128, mut e: u128) -> u128 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u128) -> u128 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }

    /// Euler's criterion; zero counts as a square.
    pub fn is_square(&self, a: u128) -> bool {
        if a == 0 || self.p == 2 {
            return true;
        }
        self.pow(a, (self.p - 1) / 2) == 1
    }

    /// Reduce a signed 128-bit integer.
    pub fn from_i128(&self, a: i128) -> u128 {
        let p = self.p as i128;
        if self.p < (1u128 << 126) {
            (a.rem_euclid(p)) as u128
        } else {
            let r = a.unsigned_abs() % self.p;
            if a < 0 {
                self.neg(r)
            } else {
                r
            }
        }
    }
}

/// Polynomial over a prime field, lowest degree first, no trailing zeros
/// (the zero polynomial is empty).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly(pub Vec<u128>);

impl FpPoly {
    pub fn zero() -> Self {
        FpPoly(Vec::new())
    }
    pub fn one() -> Self {
        FpPoly(vec![1])
    }
    pub fn x() -> Self {
        FpPoly(vec![0, 1])
    }
    pub fn new(mut c: Vec<u128>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly(c)
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.0 == [1]
    }
    /// Degree; the zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }
    pub fn lead(&self) -> u128 {
        self.0.last().copied().unwrap_or(0)
    }
    pub fn coeffs(&self) -> &[u128] {
        &self.0
    }
}

impl PrimeField {
    pub fn poly_add(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let n = a.0.len().max(b.0.len());
        let c = (0..n)
            .map(|i| {
                self.add(
                    a.0.get(i).copied().unwrap_or(0),
                    b.0.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        FpPoly::new(c)
    }

    pub fn poly_sub(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let n = a.0.len().max(b.0.len());
        let c = (0..n)
            .map(|i| {
                self.sub(
                    a.0.get(i).copied().unwrap_or(0),
                    b.0.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        FpPoly::new(c)
    }

    pub fn poly_scale(&self, a: &FpPoly, k: u128) -> FpPoly {
        FpPoly::new(a.0.iter().map(|&c| self.mul(c, k)).collect())
    }

    pub fn poly_mul(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        if a.is_zero() || b.is_zero() {
            return FpPoly::zero();
        }
        let mut c = vec![0u128; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                c[i + j] = self.add(c[i + j], self.mul(x, y));
            }
        }
        FpPoly::new(c)
    }

    pub fn poly_divrem(&self, a: &FpPoly, b: &FpPoly) -> (FpPoly, FpPoly) {
        let db = b.degree().expect("division by zero polynomial");
        let inv = self.inv(b.lead());
        let mut r = a.0.clone();
        if r.len() <= db {
            return (FpPoly::zero(), a.clone());
        }
        let mut q = vec![0u128; r.len() - db];
        for k in (db..r.len()).rev() {
            let c = self.mul(r[k], inv);
            if c == 0 {
                continue;
            }
            q[k - db] = c;
            for (j, &bj) in b.0.iter().enumerate() {
                let idx = k - db + j;
                r[idx] = self.sub(r[idx], self.mul(c, bj));
            }
        }
        r.truncate(db);
        (FpPoly::new(q), FpPoly::new(r))
    }

    pub fn poly_rem(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        self.poly_divrem(a, b).1
    }

    pub fn monic(&self, a: &FpPoly) -> FpPoly {
        if a.is_zero() {
            return a.clone();
        }
        self.poly_scale(a, self.inv(a.lead()))
    }

    pub fn poly_gcd(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = self.poly_rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    pub fn derivative(&self, a: &FpPoly) -> FpPoly {
        let c = a
            .0
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.mul(c, (i as u128) % self.p))
            .collect();
        FpPoly::new(c)
    }

    pub fn eval(&self, a: &FpPoly, x: u128) -> u128 {
        a.0.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    pub fn powmod(&self, base: &FpPoly, e: &BigUint, m: &FpPoly) -> FpPoly {
        let mut result = self.poly_rem(&FpPoly::one(), m);
        let mut b = self.poly_rem(base, m);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = self.poly_rem(&self.poly_mul(&result, &b), m);
            }
            if i + 1 < bits {
                b = self.poly_rem(&self.poly_mul(&b, &b), m);
            }
        }
        result
    }

    fn pth_root(&self, a: &FpPoly) -> FpPoly {
        let p = self.p as usize;
        FpPoly::new(a.0.iter().step_by(p).copied().collect())
    }

    /// Squarefree decomposition of a monic polynomial: (factor, multiplicity)
    /// with pairwise coprime squarefree factors.
    pub fn squarefree_decomposition(&self, f: &FpPoly) -> Vec<(FpPoly, usize)> {
        let mut out = Vec::new();
        if f.deg() == 0 {
            return out;
        }
        let f = self.monic(f);
        let df = self.derivative(&f);
        let mut c = self.poly_gcd(&f, &df);
        let mut w = self.poly_divrem(&f, &c).0;
        let mut i = 1;
        while !w.is_one() {
            let y = self.poly_gcd(&w, &c);
            let fac = self.poly_divrem(&w, &y).0;
            if !fac.is_one() {
                out.push((fac, i));
            }
            w = y;
            c = self.poly_divrem(&c, &w).0;
            i += 1;
        }
        if !c.is_one() {
            let root = self.pth_root(&c);
            for (g, j) in self.squarefree_decomposition(&root) {
                out.push((g, j * self.p as usize));
            }
        }
        out
    }

    /// Distinct-degree factorisation of a monic squarefree polynomial.
    pub fn distinct_degree(&self, f: &FpPoly) -> Vec<(FpPoly, usize)> {
        let mut out = Vec::new();
        let mut rest = f.clone();
        let pe = BigUint::from(self.p);
        let mut h = self.poly_rem(&FpPoly::x(), &rest);
        let mut d = 1;
        while rest.deg() >= 2 * d {
            h = self.powmod(&h, &pe, &rest);
            let g = self.poly_gcd(&rest, &self.poly_sub(&h, &FpPoly::x()));
            if !g.is_one() {
                rest = self.poly_divrem(&rest, &g).0;
                h = self.poly_rem(&h, &rest);
                out.push((g, d));
            }
            d += 1;
        }
        if rest.deg() > 0 {
            let d = rest.deg();
            out.push((rest, d));
        }
        out
    }

    /// Split a product of distinct monic irreducibles of degree `d`.
    pub fn equal_degree(&self, f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
        if f.deg() == d {
            return vec![f.clone()];
        }
        let n = f.deg();
        loop {
            let a = FpPoly::new((0..n).map(|_| rng.random_range(0..self.p)).collect());
            if a.deg() == 0 {
                continue;
            }
            let b = if self.p == 2 {
                // Trace map a + a^2 + ... + a^(2^(nd-1)) onto F_2.
                let mut t = a.clone();
                let mut acc = a.clone();
                for _ in 1..d {
                    t = self.poly_rem(&self.poly_mul(&t, &t), f);
                    acc = self.poly_add(&acc, &t);
                }
                acc
            } else {
                let e = (BigUint::from(self.p).pow(d as u32) - 1u32) >> 1;
                self.poly_sub(&self.powmod(&a, &e, f), &FpPoly::one())
            };
            let g = self.poly_gcd(f, &b);
            if g.deg() > 0 && g.deg() < n {
                let h = self.poly_divrem(f, &g).0;
                let mut out = self.equal_degree(&g, d, rng);
                out.extend(self.equal_degree(&self.monic(&h), d, rng));
                return out;
            }
        }
    }

    /// Full factorisation into monic irreducibles with multiplicities,
    /// sorted by (degree, coefficients). Constants give an empty list.
    pub fn factor(&self, f: &FpPoly, seed: u64) -> Vec<(FpPoly, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for (sf, mult) in self.squarefree_decomposition(f) {
            for (g, d) in self.distinct_degree(&sf) {
                for q in self.equal_degree(&g, d, &mut rng) {
                    out.push((q, mult));
                }
            }
        }
        out.sort_by(|a, b| a.0.deg().cmp(&b.0.deg()).then(a.0 .0.cmp(&b.0 .0)));
        out
    }

    /// Distinct roots in F_p, sorted.
    pub fn roots(&self, f: &FpPoly, seed: u64) -> Vec<u128> {
        if f.deg() == 0 {
            return Vec::new();
        }
        let f = self.monic(f);
        let xp = self.powmod(&FpPoly::x(), &BigUint::from(self.p), &f);
        let g = self.poly_gcd(&f, &self.poly_sub(&xp, &FpPoly::x()));
        if g.deg() == 0 {
            return Vec::new();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut r: Vec<u128> = self
            .equal_degree(&g, 1, &mut rng)
            .into_iter()
            .map(|q| self.neg(q.0[0]))
            .collect();
        r.sort_unstable();
        r
    }

    pub fn is_irreducible(&self, f: &FpPoly) -> bool {
        let n = f.deg();
        if n == 0 {
            return false;
        }
        let sf = self.squarefree_decomposition(f);
        if sf.len() != 1 || sf[0].1 != 1 {
            return false;
        }
        let dd = self.distinct_degree(&self.monic(f));
        dd.len() == 1 && dd[0].1 == n
    }

    /// Quadratic character of `a` in F_p[x]/(q) for irreducible monic q.
    /// Returns None when a is divisible by q.
    pub fn is_square_mod_irreducible(&self, a: &FpPoly, q: &FpPoly) -> Option<bool> {
        let a = self.poly_rem(a, q);
        if a.is_zero() {
            return None;
        }
        if self.p == 2 {
            return Some(true);
        }
        let e = (BigUint::from(self.p).pow(q.deg() as u32) - 1u32) >> 1;
        Some(self.powmod(&a, &e, q).is_one())
    }
}

/// A finite field of order q = p^e small enough for q*q lookup tables.
/// Elements are indices 0..q: the base-p digits are the coordinates in
/// the power basis of F_p[t]/(modulus). Index i < p is the element i of F_p.
#[derive(Clone, Debug)]
pub struct SmallField {
    p: u32,
    q: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl SmallField {
    /// Smallest extension of F_p having at least `min_order` elements.
    pub fn with_min_order(p: u32, min_order: u32) -> Self {
        let mut e = 1u32;
        while p.pow(e) < min_order {
            e += 1;
        }
        Self::new(p, e)
    }

    pub fn new(p: u32, e: u32) -> Self {
        let q = p.pow(e);
        assert!(q <= 1 << 12, "field too large for tables");
        let field = PrimeField::new(p as u128).expect("prime");
        // First monic irreducible of degree e in lexicographic order.
        let modulus = if e == 1 {
            FpPoly::x()
        } else {
            (0..q)
                .map(|idx| {
                    let mut c: Vec<u128> = digits(idx, p, e).into_iter().map(u128::from).collect();
                    c.push(1);
                    FpPoly::new(c)
                })
                .find(|f| field.is_irreducible(f))
                .expect("irreducible exists")
        };
        let to_poly = |i: u32| FpPoly::new(digits(i, p, e).into_iter().map(u128::from).collect());
        let from_poly = |f: &FpPoly| -> u16 {
            let mut idx = 0u32;
            for (k, &c) in f.0.iter().enumerate() {
                idx += c as u32 * p.pow(k as u32);
            }
            idx as u16
        };
        let polys: Vec<FpPoly> = (0..q).map(to_poly).collect();
        let qs = q as usize;
        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        for a in 0..qs {
            for b in 0..qs {
                add[a * qs + b] = from_poly(&field.poly_add(&polys[a], &polys[b]));
                let m = field.poly_mul(&polys[a], &polys[b]);
                mul[a * qs + b] = from_poly(&field.poly_rem(&m, &modulus));
            }
        }
        let mut neg = vec![0u16; qs];
        let mut inv = vec![0u16; qs];
        for a in 0..qs {
            for b in 0..qs {
                if add[a * qs + b] == 0 {
                    neg[a] = b as u16;
                }
                if mul[a * qs + b] == 1 {
                    inv[a] = b as u16;
                }
            }
        }
        SmallField {
            p,
            q,
            add,
            mul,
            neg,
            inv,
        }
    }

    pub fn order(&self) -> u32 {
        self.q
    }
    pub fn characteristic(&self) -> u32 {
        self.p
    }
    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q as usize + b as usize]
    }
    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q as usize + b as usize]
    }
    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg[b as usize])
    }
    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }
    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        self.inv[a as usize]
    }

    /// Determinant by Gaussian elimination; `m` is n*n row-major and is
    /// overwritten.
    pub fn det(&self, m: &mut [u16], n: usize) -> u16 {
        let mut det = 1u16;
        for k in 0..n {
            let Some(piv) = (k..n).find(|&i| m[i * n + k] != 0) else {
                return 0;
            };
            if piv != k {
                for j in 0..n {
                    m.swap(k * n + j, piv * n + j);
                }
                det = self.neg(det);
            }
            let pk = m[k * n + k];
            det = self.mul(det, pk);
            let pinv = self.inv(pk);
            for i in k + 1..n {
                let a = m[i * n + k];
                if a == 0 {
                    continue;
                }
                let f = self.mul(a, pinv);
                for j in k..n {
                    let t = self.mul(f, m[k * n + j]);
                    m[i * n + j] = self.sub(m[i * n + j], t);
                }
            }
        }
        det
    }
}

fn digits(mut idx: u32, p: u32, e: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(e as usize);
    for _ in 0..e {
        d.push(idx % p);
        idx /= p;
    }
    d
}

/// Number of monic irreducible polynomials of degree d over F_q (Gauss).
pub fn irreducible_count(q: &BigUint, d: usize) -> BigUint {
    let mut total = num_bigint::BigInt::zero();
    for k in 1..=d {
        if d % k != 0 {
            continue;
        }
        let mu = mobius(d / k);
        if mu != 0 {
            total += num_bigint::BigInt::from(mu) * num_bigint::BigInt::from(q.pow(k as u32));
        }
    }
    (total / num_bigint::BigInt::from(d)).to_biguint().unwrap_or_else(BigUint::one)
}

fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}
