//! Local solubility of z^2 = f(x, y) over R and Q_p.
//!
//! Over Q_p the curve has a point iff f takes a square value (zero
//! included) at some primitive (x, y). P^1(Z_p) is covered by the charts
//! (x : 1) and (1 : p y), and on each chart we run a residue-class descent:
//! a polynomial G(t) on Z_p is split by t mod p, unit values are decided by
//! quadratic characters (mod 8 when p = 2), simple roots are lifted by
//! Hensel, and the remaining classes are rescaled by t -> r + p t.
//!
//! For p >= (n + 2)^2 the residue loop is replaced by a structural step:
//! unless G mod p is a constant times a square, the Weil bound guarantees a
//! nonzero square value, so only the roots of G mod p need to be refined.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::forms::BinaryForm;
use crate::gf::{FpPoly, PrimeField};
use crate::poly::{self, ZPoly};

/// Real solubility: false exactly when f is negative definite.
pub fn locally_soluble_r(f: &BinaryForm) -> Result<bool> {
    if f.real_root_count()? > 0 {
        return Ok(true);
    }
    // No real roots, so f0 != 0 and f has the sign of f0 everywhere.
    Ok(f.leading().is_positive())
}

/// Hasse-Weil bound: a smooth genus-g curve over F_p has a point once
/// p > 4g^2 + 4, and it lifts.
pub fn hasse_weil_threshold(genus: usize) -> u64 {
    4 * (genus as u64).pow(2) + 4
}

/// Decide whether z^2 = f(x, y) has a Q_p-point.
pub fn locally_soluble_p(f: &BinaryForm, p: &BigInt) -> Result<bool> {
    let disc = f.discriminant()?;
    if disc.is_zero() {
        return Err(Error::DegenerateForm);
    }
    if f.degree() % 2 != 0 {
        return Err(Error::UnsupportedDegree(f.degree()));
    }
    if !arith::is_probable_prime(p) {
        return Err(Error::NotPrime(p.to_u128().unwrap_or(u128::MAX)));
    }
    let g = f.degree() / 2 - 1;
    let two = BigInt::from(2);
    if p != &two && p > &BigInt::from(hasse_weil_threshold(g)) && !disc.is_multiple_of(p) {
        return Ok(true);
    }
    let descent = Descent::new(f.degree(), p, &disc)?;
    let x_chart = f.dehomogenize();
    if descent.soluble(&x_chart, 0)? {
        return Ok(true);
    }
    // f(1, p y)
    let mut pk = BigInt::one();
    let y_chart: ZPoly = f
        .dehomogenize_y()
        .into_iter()
        .map(|c| {
            let v = c * &pk;
            pk *= p;
            v
        })
        .collect();
    descent.soluble(&y_chart, 0)
}

struct Descent {
    p: BigInt,
    field: Option<PrimeField>,
    small: Option<u64>,
    budget: u32,
}

impl Descent {
    fn new(n: usize, p: &BigInt, disc: &BigInt) -> Result<Self> {
        let budget = arith::valuation(&(disc * 4), p) + n as u32 + 4;
        let structural = p >= &BigInt::from((n + 2) * (n + 2)) && p != &BigInt::from(2);
        let (field, small) = if structural {
            let q = p.to_u128().ok_or_else(|| Error::OutOfRange {
                what: "prime",
                value: p.to_string(),
            })?;
            (Some(PrimeField::new(q)?), None)
        } else {
            (None, Some(p.to_u64().expect("small prime")))
        };
        Ok(Descent {
            p: p.clone(),
            field,
            small,
            budget,
        })
    }

    /// Is there t in Z_p with G(t) a square in Q_p?
    fn soluble(&self, g: &[BigInt], depth: u32) -> Result<bool> {
        if depth > self.budget {
            return Err(Error::BudgetExceeded(format!(
                "descent depth {} at p = {}",
                self.budget, self.p
            )));
        }
        let Some(v) = content_valuation(g, &self.p) else {
            return Ok(true);
        };
        let odd = v % 2 == 1;
        let scale = self.p.pow(v);
        let h: ZPoly = g.iter().map(|c| c / &scale).collect();
        let dh = poly::derivative(&h);
        match (self.small, &self.field) {
            (Some(p), _) => self.small_step(&h, &dh, odd, p, depth),
            (None, Some(field)) => self.structural_step(&h, &dh, odd, field, depth),
            _ => unreachable!(),
        }
    }

    fn refine(&self, h: &[BigInt], r: &BigInt, odd: bool, depth: u32) -> Result<bool> {
        let mut next = compose_linear(h, r, &self.p);
        if odd {
            for c in next.iter_mut() {
                *c *= &self.p;
            }
        }
        self.soluble(&next, depth + 1)
    }

    fn small_step(&self, h: &[BigInt], dh: &[BigInt], odd: bool, p: u64, depth: u32) -> Result<bool> {
        let pb = &self.p;
        for r in 0..p {
            let rb = BigInt::from(r);
            let hr = poly::eval(h, &rb);
            if !hr.is_multiple_of(pb) {
                if odd {
                    continue;
                }
                let square = if p == 2 {
                    (0..4).any(|k| {
                        let t = BigInt::from(r + 2 * k);
                        poly::eval(h, &t).mod_floor(&BigInt::from(8)).is_one()
                    })
                } else {
                    arith::legendre(&hr, pb) == 1
                };
                if square {
                    return Ok(true);
                }
                continue;
            }
            if !poly::eval(dh, &rb).is_multiple_of(pb) {
                return Ok(true);
            }
            if self.refine(h, &rb, odd, depth)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn structural_step(
        &self,
        h: &[BigInt],
        dh: &[BigInt],
        odd: bool,
        field: &PrimeField,
        depth: u32,
    ) -> Result<bool> {
        let q = field.p();
        let hbar = FpPoly::new(h.iter().map(|c| arith::residue_u128(c, q)).collect());
        if !odd {
            let not_square = field
                .squarefree_decomposition(&hbar)
                .iter()
                .any(|(g, m)| g.deg() > 0 && m % 2 == 1);
            if not_square || field.is_square(hbar.lead()) {
                return Ok(true);
            }
        }
        for r in field.roots(&hbar, 0) {
            let rb = BigInt::from(r);
            if !poly::eval(dh, &rb).is_multiple_of(&self.p) {
                return Ok(true);
            }
            if self.refine(h, &rb, odd, depth)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Smallest p-adic valuation among the coefficients; None for zero.
fn content_valuation(g: &[BigInt], p: &BigInt) -> Option<u32> {
    g.iter()
        .filter(|c| !c.is_zero())
        .map(|c| arith::valuation(c, p))
        .min()
}

/// g(r + s t) as a polynomial in t, lowest degree first.
pub fn compose_linear(g: &[BigInt], r: &BigInt, s: &BigInt) -> ZPoly {
    let mut out: ZPoly = Vec::with_capacity(g.len());
    for c in g.iter().rev() {
        // out = out * (r + s t) + c
        let mut next = vec![BigInt::zero(); out.len() + 1];
        for (i, a) in out.iter().enumerate() {
            next[i] += a * r;
            next[i + 1] += a * s;
        }
        next[0] += c;
        out = next;
    }
    out
}

/// Three-valued oracle over P^1(Z/p^k): Some(true) when some residue class
/// certifies a square value, Some(false) when z^2 = f(x, y) has no
/// solution mod p^k at all, None otherwise.
pub fn soluble_mod_prime_power(f: &BinaryForm, p: u64, k: u32) -> Option<bool> {
    let q = (p as u128).pow(k);
    let qb = BigInt::from(q);
    let coeffs: Vec<u128> = f
        .coeffs()
        .iter()
        .map(|c| c.mod_floor(&qb).to_u128().expect("fits"))
        .collect();
    let eval = |x: u128, y: u128| -> u128 {
        // sum f_i x^(n-i) y^i by Horner in x / y.
        let mut acc = 0u128;
        let mut ypow = 1u128;
        let n = coeffs.len() - 1;
        let mut xpows = vec![1u128; n + 1];
        for i in 1..=n {
            xpows[i] = xpows[i - 1] * x % q;
        }
        for (i, c) in coeffs.iter().enumerate() {
            acc = (acc + c * xpows[n - i] % q * ypow) % q;
            ypow = ypow * y % q;
        }
        acc
    };
    let mut squares = vec![false; q as usize];
    for z in 0..q {
        squares[(z * z % q) as usize] = true;
    }
    let mut any_solution = false;
    let pts = (0..q)
        .map(|x| (x, 1u128))
        .chain((0..q / p as u128).map(|y| (1u128, y * p as u128)));
    for (x, y) in pts {
        let v = eval(x, y);
        if !squares[v as usize] {
            continue;
        }
        any_solution = true;
        if v == 0 {
            continue;
        }
        let mut e = 0u32;
        let mut u = v;
        while u % p as u128 == 0 {
            u /= p as u128;
            e += 1;
        }
        if e % 2 == 1 {
            continue;
        }
        let certified = if p == 2 {
            k - e >= 3 && u % 8 == 1
        } else {
            arith::legendre(&BigInt::from(u), &BigInt::from(p)) == 1
        };
        if certified {
            return Some(true);
        }
    }
    if any_solution {
        None
    } else {
        Some(false)
    }
}

/// Place at which solubility was tested.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Place {
    Real,
    Prime(#[serde(with = "crate::json::bigint_string")] BigInt),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceVerdict {
    pub place: Place,
    /// None when the descent budget ran out.
    pub soluble: Option<bool>,
}

/// Primes at which the Hasse-Weil shortcut does not apply: p <= 4g^2 + 4
/// and the prime divisors of the discriminant.
pub fn bad_primes(f: &BinaryForm) -> Result<Vec<BigInt>> {
    let disc = f.discriminant()?;
    if disc.is_zero() {
        return Err(Error::DegenerateForm);
    }
    let g = f.degree() / 2 - 1;
    let mut ps: Vec<BigInt> = arith::primes_up_to(hasse_weil_threshold(g))
        .into_iter()
        .map(BigInt::from)
        .collect();
    ps.extend(arith::factorize(&disc).into_iter().map(|(q, _)| q));
    ps.sort();
    ps.dedup();
    Ok(ps)
}

/// Verdicts at the real place and at every prime where a test is needed.
pub fn local_verdicts(f: &BinaryForm) -> Result<Vec<PlaceVerdict>> {
    let mut out = vec![PlaceVerdict {
        place: Place::Real,
        soluble: Some(locally_soluble_r(f)?),
    }];
    for p in bad_primes(f)? {
        let soluble = match locally_soluble_p(f, &p) {
            Ok(b) => Some(b),
            Err(Error::BudgetExceeded(_)) => None,
            Err(e) => return Err(e),
        };
        out.push(PlaceVerdict {
            place: Place::Prime(p),
            soluble,
        });
    }
    Ok(out)
}

/// Overall verdict: Some(false) if any place fails, Some(true) if all pass,
/// None if some place is undecided and none fails.
pub fn overall(verdicts: &[PlaceVerdict]) -> Option<bool> {
    if verdicts.iter().any(|v| v.soluble == Some(false)) {
        Some(false)
    } else if verdicts.iter().all(|v| v.soluble == Some(true)) {
        Some(true)
    } else {
        None
    }
}
