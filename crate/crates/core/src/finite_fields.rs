//! Brute-force statistics of pairs (A, B) over F_p with a given invariant
//! form, compared against the predicted orbit counts and stabilisers.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::forms::BinaryForm;
use crate::gf::{PrimeField, SmallField};

/// Largest p^(n(n+1)) the exhaustive counter will enumerate.
pub const ENUMERATION_BUDGET: u64 = 1 << 22;

/// #SL_n(F_p) = p^(n(n-1)/2) prod_{k=2}^{n} (p^k - 1).
pub fn sl_n_order(n: u32, p: u64) -> BigUint {
    let pb = BigUint::from(p);
    let mut r = pb.pow(n * (n.saturating_sub(1)) / 2);
    for k in 2..=n {
        r *= pb.pow(k) - 1u32;
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitStats {
    pub n: usize,
    pub p: u64,
    /// Coefficients reduced into [0, p).
    pub form: BinaryForm,
    /// Order of the acting group SL_n^+-(F_p).
    pub group_order: u64,
    pub total_elements: u64,
    /// Present when an orbit decomposition was carried out (n = 2).
    pub orbit_count: Option<u64>,
    /// One entry per orbit, sorted.
    pub stabilizer_sizes: Vec<u64>,
    /// Points of P^1(F_p) where f takes a square value (0 included).
    pub square_point_count: u64,
}

impl OrbitStats {
    /// Orbit-stabiliser bookkeeping: sum of |G| / |Stab| equals the total.
    pub fn is_consistent(&self) -> bool {
        match self.orbit_count {
            None => true,
            Some(k) => {
                k as usize == self.stabilizer_sizes.len()
                    && self
                        .stabilizer_sizes
                        .iter()
                        .map(|s| self.group_order / s)
                        .sum::<u64>()
                        == self.total_elements
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPrediction {
    pub m: usize,
    pub orbit_count: u64,
    pub stabilizer_size: u64,
    pub total_elements: u64,
    pub group_order: u64,
}

fn reduce_form(f: &BinaryForm, p: u64) -> Result<BinaryForm> {
    let pb = BigInt::from(p);
    let g = BinaryForm::new(
        f.coeffs()
            .iter()
            .map(|c| num_integer::Integer::mod_floor(c, &pb))
            .collect(),
    )?;
    if g.is_zero() {
        return Err(Error::ZeroForm(p as u128));
    }
    Ok(g)
}

fn sign_group_factor(p: u64) -> u64 {
    if p == 2 {
        1
    } else {
        2
    }
}

/// Predicted orbit data for f separable mod p: 2^(m-1) orbits with
/// stabiliser (Z/2)^m for odd p, one free orbit for p = 2.
pub fn orbit_statistics_prediction(f: &BinaryForm, p: u64) -> Result<OrbitPrediction> {
    let n = f.degree() as u32;
    let ty = f.factorization_type_mod_p(p as u128, 0)?;
    if !ty.is_separable() {
        return Err(Error::NotSeparable(p as u128));
    }
    let m = ty.m();
    let sl = sl_n_order(n, p).to_u64().ok_or_else(|| Error::BudgetExceeded("group order".into()))?;
    let group_order = sl * sign_group_factor(p);
    let (orbit_count, stabilizer_size) = if p == 2 { (1, 1) } else { (1u64 << (m - 1), 1u64 << m) };
    Ok(OrbitPrediction {
        m,
        orbit_count,
        stabilizer_size,
        total_elements: sl,
        group_order,
    })
}

/// Number of (a : b) in P^1(F_p) with f(a, b) a square, 0 included.
pub fn square_value_count(f: &BinaryForm, p: u64) -> Result<u64> {
    if !arith::is_prime_u64(p) {
        return Err(Error::NotPrime(p as u128));
    }
    let field = PrimeField::new(p as u128)?;
    let big = f.dehomogenize();
    let red: Vec<u128> = big.iter().map(|c| arith::residue_u128(c, p as u128)).collect();
    let poly = crate::gf::FpPoly::new(red);
    let mut k = u64::from(field.is_square(arith::residue_u128(f.leading(), p as u128)));
    for x in 0..p as u128 {
        if field.is_square(field.eval(&poly, x)) {
            k += 1;
        }
    }
    Ok(k)
}

/// Evaluates (-1)^(n/2) det(Ax - By) over F_p through a small extension
/// with at least n points, then interpolates.
struct PencilEvaluator {
    k: SmallField,
    n: usize,
    points: Vec<u16>,
    /// Inverse Vandermonde for the monomials 1, x, ..., x^(n-1).
    vinv: Vec<Vec<u16>>,
    sign: u16,
}

impl PencilEvaluator {
    fn new(n: usize, p: u32) -> Self {
        let k = SmallField::with_min_order(p, n as u32);
        let points: Vec<u16> = (0..n as u16).collect();
        let mut v: Vec<Vec<u16>> = points
            .iter()
            .map(|&x| {
                let mut row = Vec::with_capacity(n);
                let mut t = 1u16;
                for _ in 0..n {
                    row.push(t);
                    t = k.mul(t, x);
                }
                row
            })
            .collect();
        // Gauss-Jordan inverse.
        let mut inv: Vec<Vec<u16>> = (0..n)
            .map(|i| (0..n).map(|j| u16::from(i == j)).collect())
            .collect();
        for c in 0..n {
            let piv = (c..n).find(|&r| v[r][c] != 0).expect("distinct points");
            v.swap(c, piv);
            inv.swap(c, piv);
            let s = k.inv(v[c][c]);
            for j in 0..n {
                v[c][j] = k.mul(v[c][j], s);
                inv[c][j] = k.mul(inv[c][j], s);
            }
            for r in 0..n {
                if r == c || v[r][c] == 0 {
                    continue;
                }
                let t = v[r][c];
                for j in 0..n {
                    v[r][j] = k.sub(v[r][j], k.mul(t, v[c][j]));
                    inv[r][j] = k.sub(inv[r][j], k.mul(t, inv[c][j]));
                }
            }
        }
        let sign = if (n / 2) % 2 == 1 { k.neg(1) } else { 1 };
        PencilEvaluator {
            k,
            n,
            points,
            vinv: inv,
            sign,
        }
    }

    /// Invariant form coefficients f_0..f_n as residues, for full n x n
    /// matrices given row-major with entries < p.
    fn form(&self, a: &[u16], b: &[u16], scratch: &mut Vec<u16>) -> Vec<u16> {
        let n = self.n;
        let k = &self.k;
        scratch.clear();
        scratch.extend_from_slice(a);
        let f0 = k.mul(self.sign, k.det(scratch, n));
        let mut g = vec![0u16; n];
        let mut vals = Vec::with_capacity(n);
        for &x in &self.points {
            scratch.clear();
            scratch.extend(a.iter().zip(b).map(|(&ai, &bi)| k.sub(k.mul(ai, x), bi)));
            let mut v = k.mul(self.sign, k.det(scratch, n));
            // subtract f0 x^n
            let mut xn = 1u16;
            for _ in 0..n {
                xn = k.mul(xn, x);
            }
            v = k.sub(v, k.mul(f0, xn));
            vals.push(v);
        }
        for (i, gi) in g.iter_mut().enumerate() {
            let mut s = 0u16;
            for (j, &vj) in vals.iter().enumerate() {
                s = k.add(s, k.mul(self.vinv[i][j], vj));
            }
            *gi = s;
        }
        // g_k is the coefficient of x^k, i.e. f_{n-k}.
        let mut out = vec![f0];
        out.extend((1..=n).map(|i| g[n - i]));
        out
    }
}

fn decode_pair(mut idx: u64, n: usize, p: u64, a: &mut [u16], b: &mut [u16]) {
    for m in [a, b] {
        for i in 0..n {
            for j in i..n {
                let v = (idx % p) as u16;
                idx /= p;
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
    }
}

fn encode_form(f: &[u16], p: u64) -> u64 {
    f.iter().rev().fold(0u64, |acc, &c| acc * p + c as u64)
}

/// Exhaustive count of pairs over F_p whose invariant form is f mod p,
/// with an orbit decomposition under SL_2^+-(F_p) when n = 2.
pub fn count_pairs_with_form(f: &BinaryForm, p: u64) -> Result<OrbitStats> {
    let n = f.degree();
    if n < 2 || n % 2 != 0 {
        return Err(Error::UnsupportedDegree(n));
    }
    if !arith::is_prime_u64(p) {
        return Err(Error::NotPrime(p as u128));
    }
    let entries = (n * (n + 1)) as u32;
    let space = (p as u128).checked_pow(entries).unwrap_or(u128::MAX);
    if space > ENUMERATION_BUDGET as u128 {
        return Err(Error::BudgetExceeded(format!(
            "{p}^{entries} pairs exceed the enumeration budget"
        )));
    }
    let reduced = reduce_form(f, p)?;
    let target: Vec<u16> = reduced.coeffs().iter().map(|c| c.to_u16().unwrap()).collect();
    let target_code = encode_form(&target, p);
    let space = space as u64;
    let ev = PencilEvaluator::new(n, p as u32);

    const CHUNK: u64 = 1 << 14;
    let chunks = space.div_ceil(CHUNK);
    let matches: Vec<u64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut a = vec![0u16; n * n];
            let mut b = vec![0u16; n * n];
            let mut scratch = Vec::with_capacity(n * n);
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(space);
            let mut found = Vec::new();
            for idx in lo..hi {
                decode_pair(idx, n, p, &mut a, &mut b);
                if encode_form(&ev.form(&a, &b, &mut scratch), p) == target_code {
                    found.push(idx);
                }
            }
            found
        })
        .collect();
    let total = matches.len() as u64;
    let sl = sl_n_order(n as u32, p).to_u64().expect("small group");
    let group_order = sl * sign_group_factor(p);
    let square_point_count = square_value_count(f, p)?;

    let (orbit_count, stabilizer_sizes) = if n == 2 {
        let (k, s) = orbits_n2(&matches, p);
        (Some(k), s)
    } else {
        (None, Vec::new())
    };
    Ok(OrbitStats {
        n,
        p,
        form: reduced,
        group_order,
        total_elements: total,
        orbit_count,
        stabilizer_sizes,
        square_point_count,
    })
}

/// All 2x2 matrices over F_p with determinant +-1.
fn sl2_pm(p: u64) -> Vec<[u64; 4]> {
    let mut g = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    let det = (a * d + p * p - b * c) % p;
                    if det == 1 || det == p - 1 {
                        g.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    g
}

type Sym2 = [u64; 3]; // (m11, m12, m22)

fn conj(g: &[u64; 4], m: &Sym2, p: u64) -> Sym2 {
    let [a, b, c, d] = *g;
    let [x, y, z] = *m;
    // g M g^T for g = (a b; c d), M = (x y; y z)
    let r11 = (a * a % p * x + 2 * a * b % p * y + b * b % p * z) % p;
    let r12 = (a * c % p * x + (a * d + b * c) % p * y + b * d % p * z) % p;
    let r22 = (c * c % p * x + 2 * c * d % p * y + d * d % p * z) % p;
    [r11, r12, r22]
}

fn decode_sym2(idx: u64, p: u64) -> (Sym2, Sym2) {
    let mut v = [0u64; 6];
    let mut t = idx;
    for x in v.iter_mut() {
        *x = t % p;
        t /= p;
    }
    ([v[0], v[1], v[2]], [v[3], v[4], v[5]])
}

fn encode_sym2(a: &Sym2, b: &Sym2, p: u64) -> u64 {
    let v = [a[0], a[1], a[2], b[0], b[1], b[2]];
    v.iter().rev().fold(0, |acc, &x| acc * p + x)
}

fn orbits_n2(elements: &[u64], p: u64) -> (u64, Vec<u64>) {
    let group = sl2_pm(p);
    let mut seen: HashSet<u64> = HashSet::new();
    let mut stabs = Vec::new();
    for &start in elements {
        if seen.contains(&start) {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        let mut orbit_size = 0u64;
        while let Some(v) = queue.pop_front() {
            orbit_size += 1;
            let (a, b) = decode_sym2(v, p);
            for g in &group {
                let w = encode_sym2(&conj(g, &a, p), &conj(g, &b, p), p);
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        let (a, b) = decode_sym2(start, p);
        let stab = group
            .iter()
            .filter(|g| conj(g, &a, p) == a && conj(g, &b, p) == b)
            .count() as u64;
        debug_assert_eq!(stab * orbit_size, group.len() as u64);
        stabs.push(stab);
    }
    stabs.sort_unstable();
    (stabs.len() as u64, stabs)
}

/// Histogram of invariant forms over all pairs: maps reduced coefficient
/// vectors to counts. Useful for checking many forms at once.
pub fn invariant_form_histogram(n: usize, p: u64) -> Result<HashMap<Vec<u64>, u64>> {
    let entries = (n * (n + 1)) as u32;
    let space = (p as u128).checked_pow(entries).unwrap_or(u128::MAX);
    if space > ENUMERATION_BUDGET as u128 {
        return Err(Error::BudgetExceeded("histogram enumeration".into()));
    }
    let ev = PencilEvaluator::new(n, p as u32);
    let space = space as u64;
    let buckets = (p as usize).pow(n as u32 + 1);
    const CHUNK: u64 = 1 << 14;
    let hist = (0..space.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut h = vec![0u64; buckets];
            let mut a = vec![0u16; n * n];
            let mut b = vec![0u16; n * n];
            let mut scratch = Vec::with_capacity(n * n);
            for idx in c * CHUNK..((c + 1) * CHUNK).min(space) {
                decode_pair(idx, n, p, &mut a, &mut b);
                h[encode_form(&ev.form(&a, &b, &mut scratch), p) as usize] += 1;
            }
            h
        })
        .reduce(
            || vec![0u64; buckets],
            |mut x, y| {
                for (u, v) in x.iter_mut().zip(y) {
                    *u += v;
                }
                x
            },
        );
    let mut out = HashMap::new();
    for (code, &count) in hist.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let mut c = code as u64;
        let coeffs: Vec<u64> = (0..=n)
            .map(|_| {
                let d = c % p;
                c /= p;
                d
            })
            .collect();
        out.insert(coeffs, count);
    }
    Ok(out)
}

/// Forms of degree n over F_p (coefficients in [0, p)) that are separable
/// with nonzero leading coefficient.
pub fn separable_forms(n: usize, p: u64) -> Vec<BinaryForm> {
    let total = (p as usize).pow(n as u32 + 1);
    (0..total)
        .filter_map(|mut code| {
            let c: Vec<i64> = (0..=n)
                .map(|_| {
                    let d = (code % p as usize) as i64;
                    code /= p as usize;
                    d
                })
                .collect();
            let f = BinaryForm::from_i64(&c).ok()?;
            if c[0] == 0 {
                return None;
            }
            let ty = f.factorization_type_mod_p(p as u128, 0).ok()?;
            ty.is_separable().then_some(f)
        })
        .collect()
}
