//! Fixed inputs shared by the benchmarks.

use hyperorbit_core::{BinaryForm, CurvePoint};
use num_bigint::BigInt;

/// Deterministic forms of degree `n` used across benchmark groups.
pub fn sample_forms(n: usize, count: usize, height: u64) -> Vec<BinaryForm> {
    (0..count as u64)
        .map(|i| BinaryForm::random(n, height, 1000 + i))
        .collect()
}

/// Forms with a square last coefficient, paired with the point (0 : 1 : c).
pub fn sample_curves(n: usize, count: usize, height: u64) -> Vec<(BinaryForm, CurvePoint)> {
    sample_forms(n, count, height)
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let c = 1 + (i as i64 % 7);
            let mut coeffs = f.coeffs().to_vec();
            *coeffs.last_mut().unwrap() = BigInt::from(c * c);
            (BinaryForm::new(coeffs).unwrap(), CurvePoint::from_i64(0, 1, c))
        })
        .collect()
}

/// Dehomogenised coefficients of width at most 2^29, as in real-root sampling.
pub fn sample_real_polys(n: usize, count: usize) -> Vec<Vec<i64>> {
    sample_forms(n, count, 1 << 29)
        .iter()
        .map(|f| f.to_i64().unwrap())
        .collect()
}
