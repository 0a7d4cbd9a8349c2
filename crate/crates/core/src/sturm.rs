//! Real roots of integer polynomials: exact Sturm sequences, root
//! isolation, and a certified floating-point Descartes counter that falls
//! back to the exact method when it cannot decide.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::{degree, derivative, primitive_part, signed_pseudo_rem, trim, ZPoly};

/// Sturm sequence of `p`, each term made primitive (positive content).
pub fn sturm_sequence(p: &[BigInt]) -> Vec<ZPoly> {
    let mut p0 = p.to_vec();
    trim(&mut p0);
    let mut seq = vec![p0.clone()];
    let p1 = primitive_part(&derivative(&p0));
    if degree(&p1).is_none() {
        return seq;
    }
    seq.push(p1);
    loop {
        let k = seq.len();
        let r = signed_pseudo_rem(&seq[k - 2], &seq[k - 1]);
        if degree(&r).is_none() && r[0].is_zero() {
            break;
        }
        let r: ZPoly = primitive_part(&r).into_iter().map(|c| -c).collect();
        let done = degree(&r) == Some(0) || degree(&r).is_none();
        seq.push(r);
        if done {
            break;
        }
    }
    seq
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_at_infinity(p: &[BigInt], positive: bool) -> i32 {
    match degree(p) {
        None => 0,
        Some(d) => {
            let s = if p[d].is_positive() { 1 } else { -1 };
            if positive || d % 2 == 0 {
                s
            } else {
                -s
            }
        }
    }
}

/// Sign of p(num/den) for den > 0.
fn sign_at(p: &[BigInt], num: &BigInt, den: &BigInt) -> i32 {
    let d = p.len();
    let mut acc = BigInt::zero();
    let mut den_pow = BigInt::one();
    // Homogenised Horner: sum c_i num^i den^(d-1-i).
    let mut terms = Vec::with_capacity(d);
    for _ in 0..d {
        terms.push(den_pow.clone());
        den_pow *= den;
    }
    for (i, c) in p.iter().enumerate().rev() {
        acc = acc * num + c * &terms[d - 1 - i];
    }
    match acc.sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
    }
}

fn variations_at(seq: &[ZPoly], num: &BigInt, den: &BigInt) -> usize {
    variations(seq.iter().map(|q| sign_at(q, num, den)))
}

/// Number of distinct real roots of a nonzero integer polynomial.
pub fn exact_real_root_count(p: &[BigInt]) -> usize {
    let seq = sturm_sequence(p);
    let neg = variations(seq.iter().map(|q| sign_at_infinity(q, false)));
    let pos = variations(seq.iter().map(|q| sign_at_infinity(q, true)));
    neg - pos
}

/// Distinct real roots, trying the fast certified path first.
pub fn real_root_count(p: &[BigInt]) -> usize {
    fast_real_root_count(p).unwrap_or_else(|| exact_real_root_count(p))
}

/// An isolating interval (lo, hi] with dyadic endpoints.
#[derive(Clone, Debug)]
pub struct RootInterval {
    pub lo: BigInt,
    pub hi: BigInt,
    /// Endpoints are lo / 2^exp and hi / 2^exp.
    pub exp: u32,
}

impl RootInterval {
    pub fn lo_rational(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.exp)
    }
    pub fn hi_rational(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.exp)
    }
}

fn root_bound_pow2(p: &[BigInt]) -> u32 {
    let d = degree(p).expect("nonzero");
    let lead = p[d].abs();
    let mut m = BigInt::zero();
    for c in &p[..d] {
        let q = c.abs() / &lead + 1;
        if q > m {
            m = q;
        }
    }
    ((m + 1u32).bits() as u32) + 1
}

/// Isolate the distinct real roots of `p`, in increasing order.
pub fn isolate_real_roots(p: &[BigInt]) -> Vec<RootInterval> {
    let seq = sturm_sequence(p);
    let b = root_bound_pow2(p);
    let mut out = Vec::new();
    let one = BigInt::one();
    let bound = BigInt::one() << b;
    let mut stack = vec![(-bound.clone(), bound, 0u32)];
    while let Some((lo, hi, exp)) = stack.pop() {
        let den = &one << exp;
        let count = variations_at(&seq, &lo, &den) - variations_at(&seq, &hi, &den);
        if count == 0 {
            continue;
        }
        if count == 1 {
            out.push(RootInterval { lo, hi, exp });
            continue;
        }
        let (lo2, hi2) = (lo * 2, hi * 2);
        let mid: BigInt = (&lo2 + &hi2) / 2;
        // Pushed right-first so roots come out in increasing order.
        stack.push((mid.clone(), hi2, exp + 1));
        stack.push((lo2, mid, exp + 1));
    }
    out
}

/// Sign of `g` at the root of `p` isolated by `iv`. Returns 0 when the
/// refinement budget is exhausted, which happens when g vanishes there.
pub fn sign_at_root(g: &[BigInt], p: &[BigInt], iv: &RootInterval) -> i32 {
    let pseq = sturm_sequence(p);
    let gseq = sturm_sequence(g);
    let one = BigInt::one();
    let (mut lo, mut hi, mut exp) = (iv.lo.clone(), iv.hi.clone(), iv.exp);
    for _ in 0..4000 {
        let den = &one << exp;
        let s_lo = sign_at(g, &lo, &den);
        let s_hi = sign_at(g, &hi, &den);
        if s_lo != 0
            && s_hi != 0
            && variations_at(&gseq, &lo, &den) == variations_at(&gseq, &hi, &den)
        {
            return s_hi;
        }
        let (lo2, hi2) = (&lo * 2, &hi * 2);
        let mid: BigInt = (&lo2 + &hi2) / 2;
        exp += 1;
        let den = &one << exp;
        if sign_at(p, &mid, &den) == 0 {
            return sign_at(g, &mid, &den);
        }
        if variations_at(&pseq, &lo2, &den) - variations_at(&pseq, &mid, &den) == 1 {
            lo = lo2;
            hi = mid;
        } else {
            lo = mid;
            hi = hi2;
        }
    }
    0
}

// ---------------------------------------------------------------------------
// Certified floating-point Descartes (Vincent-Collins-Akritas) counter.

const UNIT: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53
const FLOOR: f64 = 1e-290;
const MAX_DEPTH: u32 = 30;

#[derive(Clone, Copy, Debug)]
struct Iv {
    v: f64,
    e: f64,
}

impl Iv {
    fn add(self, o: Iv) -> Iv {
        let v = self.v + o.v;
        Iv {
            v,
            e: self.e + o.e + v.abs() * 2.0 * UNIT + FLOOR,
        }
    }
    /// Some(sign) when the sign is certain.
    fn sign(self) -> Option<i32> {
        if self.v == 0.0 && self.e == 0.0 {
            return Some(0);
        }
        let slack = self.e * (1.0 + 1.0 / 1_099_511_627_776.0) + FLOOR;
        if self.v > slack {
            Some(1)
        } else if self.v < -slack {
            Some(-1)
        } else {
            None
        }
    }
}

/// Minimum and maximum number of sign variations over all sign choices
/// consistent with the enclosures.
fn variation_range(c: &[Iv]) -> (usize, usize) {
    // State: last nonzero sign (0 none, 1 plus, 2 minus) -> (min, max)
    const INF: usize = usize::MAX / 4;
    let mut st = [(0usize, 0usize), (INF, 0), (INF, 0)];
    let mut live = [true, false, false];
    for x in c {
        let options: &[i32] = match x.sign() {
            Some(0) => &[0],
            Some(1) => &[1],
            Some(_) => &[-1],
            None => &[-1, 0, 1],
        };
        let mut next = [(INF, 0usize); 3];
        let mut nlive = [false; 3];
        for s in 0..3 {
            if !live[s] {
                continue;
            }
            let (lo, hi) = st[s];
            for &o in options {
                let (ns, inc) = match (s, o) {
                    (_, 0) => (s, 0),
                    (0, 1) => (1, 0),
                    (0, _) => (2, 0),
                    (1, 1) => (1, 0),
                    (1, _) => (2, 1),
                    (2, 1) => (1, 1),
                    _ => (2, 0),
                };
                next[ns].0 = next[ns].0.min(lo + inc);
                next[ns].1 = next[ns].1.max(hi + inc);
                nlive[ns] = true;
            }
        }
        st = next;
        live = nlive;
    }
    let mut lo = INF;
    let mut hi = 0;
    for s in 0..3 {
        if live[s] {
            lo = lo.min(st[s].0);
            hi = hi.max(st[s].1);
        }
    }
    (lo, hi)
}

fn renormalize(c: &mut [Iv]) {
    let m = c.iter().fold(0.0f64, |m, x| m.max(x.v.abs() + x.e));
    if m == 0.0 || !m.is_finite() {
        return;
    }
    let k = m.log2().floor();
    let s = (-k).exp2();
    for x in c.iter_mut() {
        x.v *= s;
        x.e = x.e * s + FLOOR;
    }
}

fn taylor_shift_one(c: &mut [Iv]) {
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            c[j] = c[j].add(c[j + 1]);
        }
    }
}

/// Roots of q in (0, 1), or None if undecidable in floating point.
fn vca_count(q: Vec<Iv>, depth: u32) -> Option<usize> {
    // Descartes bound for (0,1): variations of (1+x)^d q(1/(1+x)).
    let mut t: Vec<Iv> = q.iter().rev().copied().collect();
    taylor_shift_one(&mut t);
    let (lo, hi) = variation_range(&t);
    if hi == 0 {
        return Some(0);
    }
    if lo == 1 && hi == 1 {
        return Some(1);
    }
    if depth >= MAX_DEPTH {
        return None;
    }
    // Left half: q(x/2). Right half: q((x+1)/2) = left(x+1).
    let mut left: Vec<Iv> = q
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let s = (-(i as f64)).exp2();
            Iv {
                v: x.v * s,
                e: x.e * s + FLOOR,
            }
        })
        .collect();
    renormalize(&mut left);
    let mid = left.iter().fold(Iv { v: 0.0, e: 0.0 }, |a, &b| a.add(b));
    match mid.sign() {
        Some(0) | None => return None,
        _ => {}
    }
    let mut right = left.clone();
    taylor_shift_one(&mut right);
    renormalize(&mut right);
    let l = vca_count(left, depth + 1)?;
    let r = vca_count(right, depth + 1)?;
    Some(l + r)
}

fn to_iv(c: &BigInt) -> Iv {
    let v = c.to_f64().unwrap_or(f64::INFINITY);
    Iv {
        v,
        e: v.abs() * 2.0 * UNIT,
    }
}

/// Number of real roots by certified floating-point bisection. Returns
/// None whenever the answer cannot be certified (including polynomials
/// vanishing at 0 or +-1, or coefficients too large for f64).
pub fn fast_real_root_count(p: &[BigInt]) -> Option<usize> {
    let d = degree(p)?;
    if d == 0 {
        return Some(0);
    }
    let p = &p[..=d];
    if p[0].is_zero() {
        return None;
    }
    let at_one: BigInt = p.iter().sum();
    let at_minus_one: BigInt = p
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
        .sum();
    if at_one.is_zero() || at_minus_one.is_zero() {
        return None;
    }
    let base: Vec<Iv> = p.iter().map(to_iv).collect();
    if base.iter().any(|x| !x.v.is_finite()) {
        return None;
    }
    count_on_four_intervals(base)
}

/// Same as [`fast_real_root_count`] for small integer coefficients
/// (|c| < 2^53 / (degree + 1)), avoiding big-integer allocation.
pub fn fast_real_root_count_i64(p: &[i64]) -> Option<usize> {
    let d = p.iter().rposition(|&c| c != 0)?;
    if d == 0 {
        return Some(0);
    }
    let p = &p[..=d];
    if p[0] == 0 {
        return None;
    }
    let at_one: i128 = p.iter().map(|&c| c as i128).sum();
    let at_minus_one: i128 = p
        .iter()
        .enumerate()
        .map(|(i, &c)| if i % 2 == 0 { c as i128 } else { -(c as i128) })
        .sum();
    if at_one == 0 || at_minus_one == 0 {
        return None;
    }
    let base: Vec<Iv> = p
        .iter()
        .map(|&c| {
            let v = c as f64;
            let exact = v as i64 == c;
            Iv {
                v,
                e: if exact { 0.0 } else { v.abs() * 2.0 * UNIT },
            }
        })
        .collect();
    count_on_four_intervals(base)
}

/// Real roots of an integer polynomial with small coefficients: fast path
/// first, exact Sturm count otherwise.
pub fn real_root_count_i64(p: &[i64]) -> usize {
    fast_real_root_count_i64(p).unwrap_or_else(|| {
        let big: Vec<BigInt> = p.iter().map(|&c| BigInt::from(c)).collect();
        exact_real_root_count(&big)
    })
}

/// Roots in (0,1), (1,inf), (-1,0) and (-inf,-1), via x -> 1/x and x -> -x.
fn count_on_four_intervals(base: Vec<Iv>) -> Option<usize> {
    let mut reflected = base.clone();
    for (i, x) in reflected.iter_mut().enumerate() {
        if i % 2 == 1 {
            x.v = -x.v;
        }
    }
    let mut total = 0;
    for mut q in [
        base.iter().rev().copied().collect(),
        base,
        reflected.iter().rev().copied().collect(),
        reflected,
    ] {
        renormalize(&mut q);
        total += vca_count(q, 0)?;
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    /// Coefficients of prod (x - r_i), low degree first.
    fn from_roots(roots: &[i64], extra: &[i64]) -> ZPoly {
        let mut p = z(extra);
        for &r in roots {
            p = crate::poly::mul(&p, &z(&[-r, 1]));
        }
        p
    }

    #[test]
    fn counts_known() {
        assert_eq!(exact_real_root_count(&z(&[1, 0, 0, 0, 1])), 0);
        assert_eq!(exact_real_root_count(&z(&[-2, 0, 1])), 2);
        let p = from_roots(&[-3, -1, 2, 5, 7], &[1]);
        assert_eq!(exact_real_root_count(&p), 5);
        let p = from_roots(&[-3, 4], &[1, 0, 1]);
        assert_eq!(exact_real_root_count(&p), 2);
    }

    #[test]
    fn fast_agrees() {
        let cases = [
            z(&[1, 0, 0, 0, 1]),
            z(&[-2, 0, 3]),
            z(&[3, -7, 1, 4, -1, 2]),
            from_roots(&[-5, -2, 3, 9], &[2, 0, 1]),
            z(&[1, 1, 1, 1, 1, 1, 1]),
        ];
        for c in &cases {
            if let Some(k) = fast_real_root_count(c) {
                assert_eq!(k, exact_real_root_count(c), "{c:?}");
            }
        }
        let small: Vec<i64> = vec![3, -7, 1, 4, -1, 2];
        assert_eq!(real_root_count_i64(&small), exact_real_root_count(&z(&small)));
        // Close roots 1/1000 apart still resolve.
        let p = crate::poly::mul(&z(&[-1000, 1001]), &z(&[-1001, 1002]));
        let p = crate::poly::mul(&p, &z(&[1, 0, 1]));
        assert_eq!(real_root_count(&p), 2);
    }

    #[test]
    fn isolation_and_signs() {
        let p = z(&[-2, 0, 1]);
        let iv = isolate_real_roots(&p);
        assert_eq!(iv.len(), 2);
        assert!(iv[0].hi_rational() <= iv[1].lo_rational());
        // g = x - 1 is negative at -sqrt2 and positive at sqrt2.
        let g = z(&[-1, 1]);
        assert_eq!(sign_at_root(&g, &p, &iv[0]), -1);
        assert_eq!(sign_at_root(&g, &p, &iv[1]), 1);
    }

    #[test]
    fn variation_range_uncertain() {
        let c = [
            Iv { v: 1.0, e: 0.0 },
            Iv { v: 0.0, e: 1e-3 },
            Iv { v: 1.0, e: 0.0 },
        ];
        assert_eq!(variation_range(&c), (0, 2));
    }
}
