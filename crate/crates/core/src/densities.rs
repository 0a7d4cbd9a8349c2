//! Local density factors: real-root statistics of random polynomials,
//! factorisation-type frequencies over F_p and Z/8Z, and the assembled
//! upper bound for the density of genus-g curves with a rational point.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::forms::{BinaryForm, FactorizationType};
use crate::gf::irreducible_count;
use crate::sturm;

/// Samples per independent random stream.
const STREAM_LEN: u64 = 4096;
/// Coefficients are uniform dyadic rationals k / 2^COEFF_BITS in [-1/2, 1/2].
const COEFF_BITS: u32 = 30;

/// Counts of real-root classes for random real polynomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealRootDistribution {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// counts[m] = samples with exactly 2m real roots.
    pub counts: Vec<u64>,
}

impl RealRootDistribution {
    pub fn estimate(&self, m: usize) -> f64 {
        self.counts[m] as f64 / self.samples as f64
    }

    pub fn stderr(&self, m: usize) -> f64 {
        let p = self.estimate(m);
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }

    /// Mean and standard error of sum_m w(m) * [class = m].
    pub fn weighted(&self, w: impl Fn(usize) -> f64) -> (f64, f64) {
        let n = self.samples as f64;
        let mut mean = 0.0;
        let mut sq = 0.0;
        for (m, &c) in self.counts.iter().enumerate() {
            let x = w(m);
            mean += x * c as f64;
            sq += x * x * c as f64;
        }
        mean /= n;
        let var = (sq / n - mean * mean).max(0.0);
        (mean, (var / n).sqrt())
    }
}

fn sample_class(n: usize, rng: &mut ChaCha8Rng, coeffs: &mut [i64]) -> usize {
    let half = 1i64 << (COEFF_BITS - 1);
    loop {
        for c in coeffs.iter_mut() {
            *c = rng.random_range(-half..=half);
        }
        // f(x, 1) lowest degree first is the reversed coefficient list.
        coeffs.reverse();
        let mut roots = sturm::real_root_count_i64(coeffs);
        if coeffs[n] == 0 {
            roots += 1;
        }
        // Odd counts only arise from repeated roots (probability ~0).
        if roots % 2 == 0 {
            return roots / 2;
        }
    }
}

/// Monte Carlo estimate of the distribution of the number of real roots of
/// a degree-n form with i.i.d. uniform coefficients in [-1/2, 1/2].
pub fn mu_real(n: usize, samples: u64, seed: u64) -> Result<RealRootDistribution> {
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    if n < 2 || n % 2 != 0 {
        return Err(Error::UnsupportedDegree(n));
    }
    let streams = samples.div_ceil(STREAM_LEN);
    let counts = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(arith::stream_seed(seed, s));
            let mut local = vec![0u64; n / 2 + 1];
            let mut coeffs = vec![0i64; n + 1];
            let lo = s * STREAM_LEN;
            let hi = (lo + STREAM_LEN).min(samples);
            for _ in lo..hi {
                local[sample_class(n, &mut rng, &mut coeffs)] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; n / 2 + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(RealRootDistribution {
        n,
        samples,
        seed,
        counts,
    })
}

/// M[d][j]: monic polynomials of degree d over F_q with j distinct
/// irreducible factors, from prod_k (1 + u x^k / (1 - x^k))^(N_k).
fn monic_type_counts(q: u64, n: usize) -> Vec<Vec<BigUint>> {
    let qb = BigUint::from(q);
    let mut acc = vec![vec![BigUint::zero(); n + 1]; n + 1];
    acc[0][0] = BigUint::one();
    for k in 1..=n {
        let nk = irreducible_count(&qb, k);
        // Sparse factor entries (x-degree, u-degree, coefficient).
        let mut factor: Vec<(usize, usize, BigUint)> = vec![(0, 0, BigUint::one())];
        let mut binom = BigUint::one();
        for j in 1..=n / k {
            // C(N_k, j) built incrementally.
            let jb = BigUint::from(j);
            if nk < jb {
                break;
            }
            binom = binom * (&nk - &jb + 1u32) / &jb;
            // (x^k/(1-x^k))^j: coefficient of x^{(j+t)k} is C(t+j-1, j-1).
            let mut c = BigUint::one();
            let mut t = 0usize;
            while (j + t) * k <= n {
                factor.push(((j + t) * k, j, &binom * &c));
                t += 1;
                c = c * BigUint::from(t + j - 1) / BigUint::from(t);
            }
        }
        let mut next = vec![vec![BigUint::zero(); n + 1]; n + 1];
        for a in 0..=n {
            for b in 0..=a {
                if acc[a][b].is_zero() {
                    continue;
                }
                for (c, d, v) in &factor {
                    if a + c <= n && b + d <= n {
                        next[a + c][b + d] += &acc[a][b] * v;
                    }
                }
            }
        }
        acc = next;
    }
    acc
}

/// |I_p(m)| for m = 0..=n: nonzero binary forms of degree n over F_p with m
/// distinct irreducible factors (a power of y counts as one factor).
pub fn type_counts(n: usize, p: u64) -> Vec<BigUint> {
    let monic = monic_type_counts(p, n);
    let units = BigUint::from(p - 1);
    let mut out = vec![BigUint::zero(); n + 1];
    for v in 0..=n {
        let d = n - v;
        for (j, count) in monic[d].iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            let m = j + usize::from(v > 0);
            out[m] += &units * count;
        }
    }
    out
}

/// mu(I_p(m)) = |I_p(m)| / p^(n+1) for m = 0..=n, exactly.
pub fn mu_p_all(n: usize, p: u64) -> Vec<BigRational> {
    let total = BigInt::from(p).pow(n as u32 + 1);
    type_counts(n, p)
        .into_iter()
        .map(|c| BigRational::new(BigInt::from(c), total.clone()))
        .collect()
}

pub fn mu_p(n: usize, m: usize, p: u64) -> BigRational {
    mu_p_all(n, p)
        .into_iter()
        .nth(m)
        .unwrap_or_else(BigRational::zero)
}

/// Factorisation types of every nonzero form over F_p, by enumeration.
pub fn enumerate_factorization_types(n: usize, p: u64) -> HashMap<FactorizationType, u64> {
    let total = p.pow(n as u32 + 1);
    (1..total)
        .into_par_iter()
        .map(|mut code| {
            let c: Vec<i64> = (0..=n)
                .map(|_| {
                    let d = (code % p) as i64;
                    code /= p;
                    d
                })
                .collect();
            BinaryForm::from_i64(&c)
                .and_then(|f| f.factorization_type_mod_p(p as u128, 0))
                .expect("nonzero form")
        })
        .fold(HashMap::new, |mut h, t| {
            *h.entry(t).or_insert(0u64) += 1;
            h
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        })
}

/// mu(I_8(m)) for m = 0..=n. The type depends only on f mod 2 and every
/// class mod 2 has 4^(n+1) lifts mod 8, so this equals mu(I_2(m)).
pub fn mu_8_all(n: usize) -> Vec<BigRational> {
    mu_p_all(n, 2)
}

pub fn mu_8(n: usize, m: usize) -> BigRational {
    mu_8_all(n)
        .into_iter()
        .nth(m)
        .unwrap_or_else(BigRational::zero)
}

/// Enumeration over (Z/8Z)^(n+1), classifying by the reduction mod 2.
/// Feasible for n <= 4.
pub fn mu_8_enumerated(n: usize) -> Result<Vec<BigRational>> {
    if n > 4 {
        return Err(Error::BudgetExceeded(format!("8^{} enumeration", n + 1)));
    }
    let total = 8u64.pow(n as u32 + 1);
    let mut counts = vec![0u64; n + 1];
    for mut code in 0..total {
        let c: Vec<i64> = (0..=n)
            .map(|_| {
                let d = (code % 8) as i64;
                code /= 8;
                d
            })
            .collect();
        let f = BinaryForm::from_i64(&c)?;
        match f.factorization_type_mod_p(2, 0) {
            Ok(t) => counts[t.m()] += 1,
            Err(Error::ZeroForm(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| BigRational::new(c.into(), total.into()))
        .collect())
}

/// Weight max{1, 2m} / 2^m.
fn arch_weight(m: usize) -> f64 {
    (1.max(2 * m)) as f64 / 2f64.powi(m as i32)
}

/// The archimedean sum S_g = sum_m max{1,2m}/2^m mu(I(m)) and its 2^g
/// multiple. For g <= 1 every weight is 1 and S_g = 1 without sampling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchimedeanFactor {
    pub genus: usize,
    pub value: f64,
    pub stderr: f64,
    /// 2^g * value.
    pub scaled: f64,
    pub scaled_stderr: f64,
    pub distribution: Option<RealRootDistribution>,
}

pub fn archimedean_factor(g: usize, samples: u64, seed: u64) -> Result<ArchimedeanFactor> {
    let scale = 2f64.powi(g as i32);
    if g <= 1 {
        return Ok(ArchimedeanFactor {
            genus: g,
            value: 1.0,
            stderr: 0.0,
            scaled: scale,
            scaled_stderr: 0.0,
            distribution: None,
        });
    }
    let dist = mu_real(2 * g + 2, samples, seed)?;
    let (value, stderr) = dist.weighted(arch_weight);
    Ok(ArchimedeanFactor {
        genus: g,
        value,
        stderr,
        scaled: scale * value,
        scaled_stderr: scale * stderr,
        distribution: Some(dist),
    })
}

fn two_adic_weight(n: usize, m: usize) -> BigRational {
    if n + m == 0 {
        return BigRational::one();
    }
    BigRational::new(BigInt::from(12), BigInt::from(2).pow((n + m - 1) as u32)).min(BigRational::one())
}

/// Factor at 2: sum_m min{1, 12/2^(n+m-1)} mu(I_8(m)). The forms vanishing
/// mod 2 (mass 2^-(n+1)) are the m = 0 term: f = 0 mod 2 still has the
/// 2^n units 1 + 4y in R_f^x[2] mod 8, so the m = 0 weight applies.
pub fn two_adic_factor(n: usize) -> BigRational {
    let zero_mass = BigRational::new(BigInt::one(), BigInt::from(2).pow(n as u32 + 1));
    let mut s = two_adic_weight(n, 0) * zero_mass;
    for (m, mu) in mu_8_all(n).into_iter().enumerate() {
        s += two_adic_weight(n, m) * mu;
    }
    s
}

/// Factor at odd p: sum_m min{1, (p+1)/2^(m-1)} mu(I_p(m)), plus weight 1
/// on the zero form.
pub fn prime_factor(n: usize, p: u64) -> BigRational {
    let mut s = BigRational::new(BigInt::one(), BigInt::from(p).pow(n as u32 + 1));
    for (m, mu) in mu_p_all(n, p).into_iter().enumerate() {
        let cap = if m == 0 {
            BigRational::one()
        } else {
            BigRational::new(BigInt::from(p + 1), BigInt::from(2).pow((m - 1) as u32))
                .min(BigRational::one())
        };
        s += cap * mu;
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub genus: usize,
    pub truncation_prime: u64,
    pub samples: u64,
    pub seed: u64,
    /// S_g = sum_m max{1,2m}/2^m mu(I(m)); exactly 1 for g <= 1.
    pub archimedean_sum: f64,
    pub archimedean_sum_stderr: f64,
    /// (1/2) 2^(n/2) sum_m max{1,2m}/2^(m-1) mu(I(m)) = 2^(g+1) S_g.
    pub archimedean: f64,
    pub archimedean_stderr: f64,
    /// With S_g replaced by S_g + 3 stderr.
    pub archimedean_conservative: f64,
    pub two_adic: f64,
    pub finite_factors: BTreeMap<u64, f64>,
    pub finite_product: f64,
    pub bound: f64,
    pub bound_conservative: f64,
    pub real_root_estimates: Vec<(f64, f64)>,
}

impl DensityReport {
    pub const CSV_HEADER: &'static str =
        "genus,truncation_prime,samples,archimedean_sum,archimedean_sum_stderr,archimedean,archimedean_stderr,two_adic,finite_product,bound,bound_conservative,bound_times_2g";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.9},{:.3e},{:.9e},{:.3e},{:.9e},{:.9e},{:.9e},{:.9e},{:.6}",
            self.genus,
            self.truncation_prime,
            self.samples,
            self.archimedean_sum,
            self.archimedean_sum_stderr,
            self.archimedean,
            self.archimedean_stderr,
            self.two_adic,
            self.finite_product,
            self.bound,
            self.bound_conservative,
            self.bound_conservative * 2f64.powi(self.genus as i32)
        )
    }
}

/// The assembled upper bound for genus g, truncating the Euler product at
/// the odd primes up to `truncation`. Omitted factors are at most 1, so
/// the result is still an upper bound.
pub fn density_bound(g: usize, truncation: u64, samples: u64, seed: u64) -> Result<DensityReport> {
    let n = 2 * g + 2;
    let arch = archimedean_factor(g, samples, seed)?;
    let two = 2f64.powi(g as i32 + 1);
    let archimedean = two * arch.value;
    let archimedean_stderr = two * arch.stderr;
    let archimedean_conservative = two * (arch.value + 3.0 * arch.stderr);
    let two_adic = rational_to_f64(&two_adic_factor(n));
    let finite_factors: BTreeMap<u64, f64> = arith::primes_up_to(truncation)
        .into_par_iter()
        .filter(|&p| p > 2)
        .map(|p| (p, rational_to_f64(&prime_factor(n, p))))
        .collect();
    let finite_product: f64 = finite_factors.values().product();
    let real_root_estimates = match &arch.distribution {
        Some(d) => (0..=n / 2).map(|m| (d.estimate(m), d.stderr(m))).collect(),
        None => Vec::new(),
    };
    Ok(DensityReport {
        genus: g,
        truncation_prime: truncation,
        samples: if g <= 1 { 0 } else { samples },
        seed,
        archimedean_sum: arch.value,
        archimedean_sum_stderr: arch.stderr,
        archimedean,
        archimedean_stderr,
        archimedean_conservative,
        two_adic,
        bound: archimedean * two_adic * finite_product,
        bound_conservative: archimedean_conservative * two_adic * finite_product,
        finite_factors,
        finite_product,
        real_root_estimates,
    })
}

/// Nearest-ish f64 to q, also when numerator and denominator overflow f64.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let (n, d) = (q.numer(), q.denom());
    let sn = n.bits().saturating_sub(64);
    let sd = d.bits().saturating_sub(64);
    let top = (n.magnitude() >> sn).to_f64().unwrap_or(f64::NAN);
    let bottom = (d.magnitude() >> sd).to_f64().unwrap_or(f64::NAN);
    let sign = if n.is_negative() { -1.0 } else { 1.0 };
    let e = sn as i64 - sd as i64;
    sign * top / bottom * 2f64.powi(e.clamp(-2000, 2000) as i32)
}

/// log10 |q| for q != 0, without overflow.
pub fn rational_log10(q: &BigRational) -> f64 {
    let (n, d) = (q.numer(), q.denom());
    let sn = n.bits().saturating_sub(64);
    let sd = d.bits().saturating_sub(64);
    let top = (n.magnitude() >> sn).to_f64().unwrap_or(f64::NAN);
    let bottom = (d.magnitude() >> sd).to_f64().unwrap_or(f64::NAN);
    top.log10() - bottom.log10() + (sn as f64 - sd as f64) * 2f64.log10()
}

/// prod over odd primes p <= P of (1 - (p-1)^2 / (2p^2)), exactly.
pub fn genus0_product(truncation: u64) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for p in arith::primes_up_to(truncation) {
        if p == 2 {
            continue;
        }
        let pb = BigInt::from(p);
        num *= &pb * &pb + 2 * &pb - 1;
        den *= 2 * &pb * &pb;
    }
    BigRational::new(num, den)
}

/// Riemann zeta at an integer k >= 2 by Euler-Maclaurin summation.
pub fn zeta(k: u32) -> f64 {
    assert!(k >= 2);
    const N: u32 = 32;
    let s = k as f64;
    let mut sum: f64 = (1..N).map(|j| (j as f64).powf(-s)).sum();
    let nf = N as f64;
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // Bernoulli corrections B_2j / (2j)! * s(s+1)...(s+2j-2) N^(-s-2j+1)
    const B: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in B.iter().enumerate() {
        let j = j as i32 + 1;
        sum += b / fact * rising * nf.powf(-s - 2.0 * j as f64 + 1.0);
        rising *= (s + 2.0 * j as f64 - 1.0) * (s + 2.0 * j as f64);
        fact *= (2 * j + 1) as f64 * (2 * j + 2) as f64;
    }
    sum
}

/// |zeta(2)...zeta(n) prod_{p <= P} #SL_n(F_p)/p^(n^2-1) - 1|.
pub fn zeta_identity_gap(n: u32, truncation: u64) -> f64 {
    let mut log = 0.0f64;
    for k in 2..=n {
        log += zeta(k).ln();
    }
    for p in arith::primes_up_to(truncation) {
        for k in 2..=n {
            log += (-(p as f64).powi(-(k as i32))).ln_1p();
        }
    }
    log.exp_m1().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_fields::sl_n_order;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn binary_quadratics_mod_two() {
        let mu = mu_p_all(2, 2);
        assert_eq!(mu[1], q(4, 8));
        assert_eq!(mu[2], q(3, 8));
        assert_eq!(mu.iter().sum::<BigRational>(), q(7, 8));
    }

    #[test]
    fn generating_function_matches_enumeration() {
        for (n, p) in [(2, 3), (4, 2), (4, 3), (6, 2), (2, 5)] {
            let counts = type_counts(n, p);
            let mut by_m = vec![0u64; n + 1];
            for (t, c) in enumerate_factorization_types(n, p) {
                by_m[t.m()] += c;
            }
            let expect: Vec<BigUint> = by_m.into_iter().map(BigUint::from).collect();
            assert_eq!(counts, expect, "n={n} p={p}");
        }
    }

    #[test]
    fn mod_eight_equals_mod_two() {
        for n in [2, 4] {
            assert_eq!(mu_8_enumerated(n).unwrap(), mu_8_all(n));
        }
    }

    #[test]
    fn real_roots_quadratic() {
        let d = mu_real(2, 40_000, 5).unwrap();
        assert_eq!(d.counts.iter().sum::<u64>(), 40_000);
        // P(b^2 > 4ac) for a, b, c uniform on [-1/2, 1/2] is
        // 41/72 + ln(2)/12 (classical integral).
        let exact = 41.0 / 72.0 + 2f64.ln() / 12.0;
        assert!((d.estimate(1) - exact).abs() < 4.0 * d.stderr(1));
        assert_eq!(d, mu_real(2, 40_000, 5).unwrap());
    }

    #[test]
    fn archimedean_low_genus_exact() {
        for g in [0, 1] {
            let a = archimedean_factor(g, 0, 0).unwrap();
            assert_eq!(a.value, 1.0);
            assert_eq!(a.stderr, 0.0);
        }
        assert!(archimedean_factor(2, 0, 0).is_err());
    }

    #[test]
    fn report_assembly() {
        let r = density_bound(1, 50, 0, 0).unwrap();
        assert_eq!(r.archimedean_sum, 1.0);
        assert_eq!(r.archimedean, 4.0);
        let two = rational_to_f64(&two_adic_factor(4));
        assert!((r.bound - 4.0 * two * r.finite_product).abs() < 1e-15);
        assert_eq!(r.finite_factors.len(), 14);
        assert!(r.finite_factors.values().all(|&x| x > 0.0 && x <= 1.0));
        assert_eq!(r.csv_row().split(',').count(), DensityReport::CSV_HEADER.split(',').count());
    }

    #[test]
    fn genus_zero_product() {
        let big = genus0_product(5000);
        let v = rational_to_f64(&big);
        assert!(v > 0.0 && v < 0.05);
        assert!(rational_to_f64(&genus0_product(7000)) < v);
        assert!((rational_to_f64(&q(-7, 9)) + 7.0 / 9.0).abs() < 1e-16);
        assert!((rational_log10(&q(1, 1000)) + 3.0).abs() < 1e-12);
        // Each factor is about 1/2, so the exponent tracks the prime count.
        let l = rational_log10(&genus0_product(10_000));
        assert!(l < -300.0 && l > -400.0, "{l}");
        assert_eq!(genus0_product(3), q(7, 9));
        assert_eq!(genus0_product(5), q(7 * 17, 9 * 25));
    }

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta(2) - pi * pi / 6.0).abs() < 1e-14);
        assert!((zeta(4) - pi.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(3) - 1.202_056_903_159_594_2).abs() < 1e-14);
    }

    #[test]
    fn euler_factor_matches_group_order() {
        for (n, p) in [(2u32, 3u64), (3, 5), (4, 2)] {
            let direct = rational_to_f64(&BigRational::new(
                BigInt::from(sl_n_order(n, p)),
                BigInt::from(p).pow(n * n - 1),
            ));
            let product: f64 = (2..=n).map(|k| 1.0 - (p as f64).powi(-(k as i32))).product();
            assert!((direct - product).abs() < 1e-15);
        }
    }
}
