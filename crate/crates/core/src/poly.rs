//! Dense integer and rational linear algebra plus univariate polynomial
//! helpers. Polynomials are coefficient vectors, lowest degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type ZPoly = Vec<BigInt>;

pub fn trim(p: &mut ZPoly) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &[BigInt]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn derivative(p: &[BigInt]) -> ZPoly {
    if p.len() <= 1 {
        return vec![BigInt::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

pub fn eval(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Divide out the content, keeping the sign of the leading coefficient.
pub fn primitive_part(p: &[BigInt]) -> ZPoly {
    let g = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() || g.is_one() {
        return p.to_vec();
    }
    p.iter().map(|c| c / &g).collect()
}

/// Pseudo-remainder of `a` by `b` with a positive multiplier, so signs are
/// preserved (needed for Sturm sequences).
pub fn signed_pseudo_rem(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let db = degree(b).expect("nonzero divisor");
    let lb = b[db].clone();
    let mut r: ZPoly = a.to_vec();
    trim(&mut r);
    let lb_abs = lb.abs();
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        // r <- |lb| r - sign(lb) lr x^(dr-db) b
        let lr = r[dr].clone();
        let factor = if lb.is_negative() { -lr } else { lr };
        for c in r.iter_mut() {
            *c *= &lb_abs;
        }
        for (j, bc) in b.iter().enumerate().take(db + 1) {
            r[dr - db + j] -= &factor * bc;
        }
        r.truncate(dr);
        if r.is_empty() {
            r.push(BigInt::zero());
        }
        trim(&mut r);
    }
    r
}

/// Determinant of an integer matrix by fraction-free Bareiss elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Resultant of two integer polynomials via the Sylvester matrix.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let df = degree(f).unwrap_or(0);
    let dg = degree(g).unwrap_or(0);
    let size = df + dg;
    if size == 0 {
        return BigInt::one();
    }
    let mut m = vec![vec![BigInt::zero(); size]; size];
    for i in 0..dg {
        for k in 0..=df {
            m[i][i + k] = f[df - k].clone();
        }
    }
    for i in 0..df {
        for k in 0..=dg {
            m[dg + i][i + k] = g[dg - k].clone();
        }
    }
    bareiss_det(m)
}

pub fn rational_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        det *= &a[k][k];
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Solve `m x = rhs` for square nonsingular `m`.
pub fn rational_solve(m: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(piv, k);
        let pivot = a[k][k].clone();
        for j in k..=n {
            a[k][j] = &a[k][j] / &pivot;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in k..=n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Row-style Hermite normal form of the lattice spanned by the given rows.
/// Zero rows are dropped; pivots are positive and entries above a pivot are
/// reduced into [0, pivot).
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        // Euclid down the column until one row holds the gcd.
        loop {
            let mut best: Option<usize> = None;
            for i in r..a.len() {
                if !a[i][c].is_zero()
                    && best.is_none_or(|b| a[i][c].abs() < a[b][c].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(r, b);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                for j in c..ncols {
                    let t = &q * &a[r][j];
                    a[i][j] -= t;
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < a.len() && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                for j in c..ncols {
                    a[r][j] = -&a[r][j];
                }
            }
            for i in 0..r {
                let q = a[i][c].div_floor(&a[r][c]);
                if q.is_zero() {
                    continue;
                }
                for j in c..ncols {
                    let t = &q * &a[r][j];
                    a[i][j] -= t;
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    a
}

/// Coefficients of the unique polynomial of degree <= n through
/// (t, values[t]) for t = 0..=n. Errors if the result is not integral.
pub fn interpolate_integer(values: &[BigInt]) -> Option<ZPoly> {
    // Newton forward differences.
    let n = values.len();
    let mut diffs: Vec<BigRational> = values.iter().cloned().map(BigRational::from_integer).collect();
    let mut newton = Vec::with_capacity(n);
    for k in 0..n {
        newton.push(diffs[0].clone());
        for i in 0..n - k - 1 {
            diffs[i] = (&diffs[i + 1] - &diffs[i]) / BigInt::from(k + 1);
        }
        diffs.truncate(n - k - 1);
    }
    // Expand sum newton[k] * t(t-1)...(t-k+1).
    let mut out = vec![BigRational::zero(); n];
    let mut basis = vec![BigRational::one()];
    for (k, c) in newton.iter().enumerate() {
        for (i, b) in basis.iter().enumerate() {
            out[i] += c * b;
        }
        let mut next = vec![BigRational::zero(); basis.len() + 1];
        let kk = BigRational::from_integer(BigInt::from(k));
        for (i, b) in basis.iter().enumerate() {
            next[i + 1] += b;
            next[i] -= &kk * b;
        }
        basis = next;
    }
    out.into_iter()
        .map(|c| c.is_integer().then(|| c.to_integer()))
        .collect()
}
