//! Rational point search on z^2 = f(x, y) and random-curve surveys.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::Result;
use crate::forms::BinaryForm;
use crate::local::{self, PlaceVerdict};
use crate::orbits::CurvePoint;

/// z with z^2 = v and z >= 0, if v is a perfect square.
fn square_root(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    arith::exact_sqrt(v)
}

fn value_i128(c: &[i128], x: i128, y: i128) -> Option<i128> {
    let mut acc: i128 = 0;
    let mut ypow: i128 = 1;
    let n = c.len() - 1;
    let mut xpows = vec![1i128; n + 1];
    for i in 1..=n {
        xpows[i] = xpows[i - 1].checked_mul(x)?;
    }
    for (i, ci) in c.iter().enumerate() {
        let t = ci.checked_mul(xpows[n - i])?.checked_mul(ypow)?;
        acc = acc.checked_add(t)?;
        ypow = ypow.checked_mul(y)?;
    }
    Some(acc)
}

fn square_root_i128(v: i128) -> Option<i128> {
    if v < 0 {
        return None;
    }
    let r = (v as u128).sqrt();
    (r * r == v as u128).then_some(r as i128)
}

/// Primitive pairs of height exactly h with y > 0, ordered by |x| (positive
/// x first) and then by y.
fn pairs_of_height(h: i64) -> impl Iterator<Item = (i64, i64)> {
    (0..=h).flat_map(move |ax| {
        let signs: &[i64] = if ax == 0 { &[1] } else { &[1, -1] };
        signs.iter().flat_map(move |&s| {
            let ys: Vec<i64> = if ax == h {
                (1..=h).collect()
            } else {
                vec![h]
            };
            ys.into_iter()
                .filter(move |&y| ax.gcd(&y) == 1)
                .map(move |y| (s * ax, y))
        })
    })
}

/// First point of height at most `bound` on z^2 = f(x, y): finite pairs by
/// increasing height, then the point at infinity (1 : 0 : sqrt f0).
pub fn rational_point_search(f: &BinaryForm, bound: u64) -> Option<CurvePoint> {
    let small: Option<Vec<i128>> = f.to_i64().map(|c| c.into_iter().map(i128::from).collect());
    for h in 1..=bound.min(i64::MAX as u64) as i64 {
        for (x, y) in pairs_of_height(h) {
            let z = match small
                .as_ref()
                .and_then(|c| value_i128(c, x as i128, y as i128))
            {
                Some(v) => square_root_i128(v).map(BigInt::from),
                None => square_root(&f.evaluate(&x.into(), &y.into())),
            };
            if let Some(z) = z {
                return Some(CurvePoint::new(x.into(), y.into(), z));
            }
        }
    }
    if bound >= 1 {
        if let Some(z) = square_root(f.leading()) {
            return Some(CurvePoint::new(1.into(), BigInt::zero(), z));
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub index: u64,
    pub form: BinaryForm,
    pub genus: usize,
    /// None when some place was undecided within the descent budget.
    pub locally_soluble: Option<bool>,
    pub places: Vec<PlaceVerdict>,
    pub point: Option<CurvePoint>,
    pub point_bound: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurveyAggregate {
    pub count: u64,
    pub locally_soluble: u64,
    pub undecided: u64,
    pub with_point: u64,
    /// Curves with a point that failed some local test; always 0.
    pub point_but_insoluble: u64,
    pub locally_soluble_fraction: Option<f64>,
    pub point_fraction: Option<f64>,
}

impl SurveyAggregate {
    pub fn from_records(records: &[SurveyRecord]) -> Self {
        let mut a = SurveyAggregate {
            count: records.len() as u64,
            ..Default::default()
        };
        for r in records {
            match r.locally_soluble {
                Some(true) => a.locally_soluble += 1,
                None => a.undecided += 1,
                Some(false) => {}
            }
            if r.point.is_some() {
                a.with_point += 1;
                if r.locally_soluble != Some(true) {
                    a.point_but_insoluble += 1;
                }
            }
        }
        if a.count > 0 {
            a.locally_soluble_fraction = Some(a.locally_soluble as f64 / a.count as f64);
            a.point_fraction = Some(a.with_point as f64 / a.count as f64);
        }
        a
    }

    pub const CSV_HEADER: &'static str =
        "count,locally_soluble,undecided,with_point,locally_soluble_fraction,point_fraction";

    pub fn csv_row(&self) -> String {
        let f = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.count,
            self.locally_soluble,
            self.undecided,
            self.with_point,
            f(self.locally_soluble_fraction),
            f(self.point_fraction)
        )
    }
}

impl SurveyRecord {
    pub const CSV_HEADER: &'static str = "index,form,genus,locally_soluble,point";

    pub fn csv_row(&self) -> String {
        let verdict = match self.locally_soluble {
            Some(b) => b.to_string(),
            None => "undecided".into(),
        };
        let point = self
            .point
            .as_ref()
            .map(|p| format!("{}:{}:{}", p.x, p.y, p.z))
            .unwrap_or_default();
        format!(
            "{},\"{}\",{},{},{}",
            self.index, self.form, self.genus, verdict, point
        )
    }
}

/// One surveyed curve: a form of height <= `height` with nonzero
/// discriminant, drawn from stream `index` of `seed`.
pub fn survey_record(n: usize, height: u64, point_bound: u64, index: u64, seed: u64) -> Result<SurveyRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(arith::stream_seed(seed, index));
    let form = loop {
        let f = BinaryForm::random_with(n, height, &mut rng);
        if !f.discriminant()?.is_zero() {
            break f;
        }
    };
    let places = local::local_verdicts(&form)?;
    Ok(SurveyRecord {
        index,
        genus: n / 2 - 1,
        locally_soluble: local::overall(&places),
        point: rational_point_search(&form, point_bound),
        places,
        form,
        point_bound,
    })
}

/// Survey `count` random curves; records come back in index order.
pub fn survey(
    n: usize,
    height: u64,
    point_bound: u64,
    count: u64,
    seed: u64,
) -> Result<(Vec<SurveyRecord>, SurveyAggregate)> {
    if n < 2 || n % 2 != 0 {
        return Err(crate::Error::UnsupportedDegree(n));
    }
    let records = (0..count)
        .into_par_iter()
        .map(|i| survey_record(n, height, point_bound, i, seed))
        .collect::<Result<Vec<_>>>()?;
    let agg = SurveyAggregate::from_records(&records);
    Ok((records, agg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::pair_from_point;

    fn form(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    #[test]
    fn examples() {
        let p = rational_point_search(&form(&[1, 0, 0, 0, 15]), 1).unwrap();
        assert_eq!(p, CurvePoint::from_i64(1, 1, 4));
        assert_eq!(rational_point_search(&form(&[-1, 0, 0, 0, -1]), 20), None);
        let p = rational_point_search(&form(&[2, 1, 0, 3, 9]), 1).unwrap();
        assert_eq!(p, CurvePoint::from_i64(0, 1, 3));
    }

    #[test]
    fn infinity_last() {
        // f0 = 4 is a square; no finite point of height 1.
        let f = form(&[4, 0, 0, 0, 3]);
        assert_eq!(rational_point_search(&f, 1), Some(CurvePoint::from_i64(1, 0, 2)));
    }

    #[test]
    fn height_enumeration() {
        let mut seen = 0;
        for h in 1..=6 {
            for (x, y) in pairs_of_height(h) {
                assert_eq!(x.abs().max(y), h);
                assert_eq!(x.gcd(&y), 1);
                seen += 1;
            }
        }
        // Primitive (x, y) with y > 0 and max(|x|, y) <= 6.
        let brute = (1..=6i64)
            .flat_map(|y| (-6..=6i64).map(move |x| (x, y)))
            .filter(|(x, y)| x.gcd(y) == 1)
            .count();
        assert_eq!(seen, brute);
    }

    #[test]
    fn found_points_feed_construction() {
        let (records, agg) = survey(4, 30, 10, 60, 3).unwrap();
        assert_eq!(agg.count, 60);
        assert_eq!(agg.point_but_insoluble, 0);
        for r in records.iter().filter_map(|r| r.point.as_ref().map(|p| (r, p))) {
            let (rec, p) = r;
            assert!(p.lies_on(&rec.form));
            let pair = pair_from_point(&rec.form, p).unwrap();
            assert_eq!(pair.pair.invariant_form().unwrap(), rec.form);
        }
        assert_eq!(survey(4, 30, 10, 60, 3).unwrap().0, records);
    }

    #[test]
    fn empty_survey() {
        let (r, a) = survey(4, 10, 5, 0, 0).unwrap();
        assert!(r.is_empty());
        assert_eq!(a.count, 0);
        assert_eq!(a.locally_soluble_fraction, None);
    }
}
