//! Pairs of symmetric matrices (A, B), their invariant binary form
//! (-1)^(n/2) det(Ax - By), the group actions on them, and the passage
//! from rational points and from ideal data to explicit pairs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::forms::{BinaryForm, Unimodular};
use crate::json;
use crate::poly;
use crate::rings::{ring_ideal_power, AlgebraElement, BasedIdeal, RankNRing};

/// A pair of symmetric n x n integer matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymmetricPair {
    a: Vec<Vec<BigInt>>,
    b: Vec<Vec<BigInt>>,
}

fn is_symmetric_square(m: &[Vec<BigInt>], n: usize) -> bool {
    m.len() == n
        && m.iter().all(|r| r.len() == n)
        && (0..n).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

impl SymmetricPair {
    pub fn new(a: Vec<Vec<BigInt>>, b: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = a.len();
        if n == 0 || !is_symmetric_square(&a, n) || !is_symmetric_square(&b, n) {
            return Err(Error::Parse("pair must be two symmetric n x n matrices".into()));
        }
        Ok(SymmetricPair { a, b })
    }

    pub fn from_i64(a: &[&[i64]], b: &[&[i64]]) -> Result<Self> {
        let conv = |m: &[&[i64]]| -> Vec<Vec<BigInt>> {
            m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
        };
        Self::new(conv(a), conv(b))
    }

    pub fn size(&self) -> usize {
        self.a.len()
    }
    pub fn a(&self) -> &[Vec<BigInt>] {
        &self.a
    }
    pub fn b(&self) -> &[Vec<BigInt>] {
        &self.b
    }

    /// (-1)^(n/2) det(Ax - By), computed by exact evaluation at n+1 points
    /// and interpolation.
    pub fn invariant_form(&self) -> Result<BinaryForm> {
        let n = self.size();
        if n % 2 != 0 {
            return Err(Error::UnsupportedDegree(n));
        }
        let values: Vec<BigInt> = (0..=n)
            .map(|t| {
                let t = BigInt::from(t);
                let m: Vec<Vec<BigInt>> = (0..n)
                    .map(|i| (0..n).map(|j| &self.a[i][j] * &t - &self.b[i][j]).collect())
                    .collect();
                poly::bareiss_det(m)
            })
            .collect();
        let g = poly::interpolate_integer(&values).expect("determinant is an integer polynomial");
        // g(t) = det(At - B) has t^k coefficient equal to f_{n-k}, up to sign.
        let sign = if (n / 2) % 2 == 1 { -BigInt::one() } else { BigInt::one() };
        let coeffs = (0..=n).map(|i| &g[n - i] * &sign).collect();
        BinaryForm::new(coeffs)
    }

    /// (g A g^T, g B g^T) for g with det +-1.
    pub fn gl_act(&self, g: &[Vec<BigInt>]) -> Result<SymmetricPair> {
        let n = self.size();
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(Error::NotUnimodular);
        }
        if !poly::bareiss_det(g.to_vec()).abs().is_one() {
            return Err(Error::NotUnimodular);
        }
        let conj = |m: &[Vec<BigInt>]| -> Vec<Vec<BigInt>> {
            let gm: Vec<Vec<BigInt>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| &g[i][k] * &m[k][j]).sum())
                        .collect()
                })
                .collect();
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| &gm[i][k] * &g[j][k]).sum())
                        .collect()
                })
                .collect()
        };
        Ok(SymmetricPair {
            a: conj(&self.a),
            b: conj(&self.b),
        })
    }

    /// (aA - bB, dB - cA) for d = (a b; c d); compatible with the action on
    /// invariant forms.
    pub fn sl2_act(&self, d: &Unimodular) -> SymmetricPair {
        let n = self.size();
        let comb = |x: &BigInt, m1: &[Vec<BigInt>], y: &BigInt, m2: &[Vec<BigInt>]| {
            (0..n)
                .map(|i| (0..n).map(|j| x * &m1[i][j] - y * &m2[i][j]).collect())
                .collect()
        };
        SymmetricPair {
            a: comb(&d.a, &self.a, &d.b, &self.b),
            b: comb(&d.d, &self.b, &d.c, &self.a),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "A": json::int_matrix(&self.a), "B": json::int_matrix(&self.b) })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let a = json::parse_int_matrix(&v["A"])?;
        let b = json::parse_int_matrix(&v["B"])?;
        Self::new(a, b)
    }
}

impl Serialize for SymmetricPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymmetricPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        SymmetricPair::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// A point (x0, y0, z0) with z0^2 = f(x0, y0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurvePoint {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
}

impl CurvePoint {
    pub fn new(x: BigInt, y: BigInt, z: BigInt) -> Self {
        CurvePoint { x, y, z }
    }

    pub fn from_i64(x: i64, y: i64, z: i64) -> Self {
        CurvePoint::new(x.into(), y.into(), z.into())
    }

    pub fn lies_on(&self, f: &BinaryForm) -> bool {
        &self.z * &self.z == f.evaluate(&self.x, &self.y)
    }

    pub fn is_primitive(&self) -> bool {
        num_integer::Integer::gcd(&self.x, &self.y).is_one()
    }
}

impl std::str::FromStr for CurvePoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<BigInt> = s
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad coordinate {t:?}"))))
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [x, y, z] => Ok(CurvePoint::new(x.clone(), y.clone(), z.clone())),
            _ => Err(Error::Parse("a point needs three coordinates x,y,z".into())),
        }
    }
}

impl std::fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.x, self.y, self.z)
    }
}

impl Serialize for CurvePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x.to_string(), self.y.to_string(), self.z.to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for CurvePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: [String; 3] = Deserialize::deserialize(d)?;
        let p = |s: &str| s.parse::<BigInt>().map_err(serde::de::Error::custom);
        Ok(CurvePoint::new(p(&v[0])?, p(&v[1])?, p(&v[2])?))
    }
}

/// Symbolic entry of the point template.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TemplateEntry {
    Zero,
    One,
    MinusOne,
    C,
    F(usize),
    NegF(usize),
}

/// The template (A, B) for the point (0, 1, c) on z^2 = f, as symbols.
pub fn template_symbolic(n: usize) -> Result<(Vec<Vec<TemplateEntry>>, Vec<Vec<TemplateEntry>>)> {
    use TemplateEntry::*;
    if n < 2 || n % 2 != 0 {
        return Err(Error::UnsupportedDegree(n));
    }
    let h = n / 2;
    let mut a = vec![vec![Zero; n]; n];
    let mut b = vec![vec![Zero; n]; n];
    a[0][0] = MinusOne;
    for i in 1..n {
        if i != h {
            a[i][n - i] = One;
        }
    }
    for i in 0..h {
        for j in 0..h {
            a[h + i][h + j] = F(i + j);
        }
    }
    b[0][n - 1] = C;
    b[n - 1][0] = C;
    b[n - 1][n - 1] = NegF(n - 1);
    for i in 1..n - 1 {
        b[i][n - 1 - i] = One;
    }
    for i in 0..h.saturating_sub(1) {
        for j in 0..h - 1 {
            b[h + i][h + j] = F(i + j + 1);
        }
    }
    Ok((a, b))
}

/// The template pair instantiated on f with f_n = c^2.
pub fn template_pair(f: &BinaryForm, c: &BigInt) -> Result<SymmetricPair> {
    let n = f.degree();
    if f.coeff(n) != &(c * c) {
        return Err(Error::NotOnCurve);
    }
    let (sa, sb) = template_symbolic(n)?;
    let inst = |m: &Vec<Vec<TemplateEntry>>| -> Vec<Vec<BigInt>> {
        m.iter()
            .map(|row| {
                row.iter()
                    .map(|e| match e {
                        TemplateEntry::Zero => BigInt::zero(),
                        TemplateEntry::One => BigInt::one(),
                        TemplateEntry::MinusOne => -BigInt::one(),
                        TemplateEntry::C => c.clone(),
                        TemplateEntry::F(i) => f.coeff(*i).clone(),
                        TemplateEntry::NegF(i) => -f.coeff(*i),
                    })
                    .collect()
            })
            .collect()
    };
    Ok(SymmetricPair {
        a: inst(&sa),
        b: inst(&sb),
    })
}

/// gamma = (s -r; x0 y0) with r x0 + s y0 = 1 and f(s, -r) != 0, moving
/// (x0, y0) to (0, 1) and keeping a nonzero leading coefficient.
pub fn moving_matrix(f: &BinaryForm, x0: &BigInt, y0: &BigInt) -> Result<Unimodular> {
    let (g, r, s) = arith::ext_gcd(x0, y0);
    if !g.is_one() {
        return Err(Error::NonPrimitivePoint);
    }
    // Other Bezout pairs are (r + k y0, s - k x0).
    for k in (0i64..).flat_map(|k| if k == 0 { vec![0] } else { vec![k, -k] }) {
        let rk = &r + y0 * k;
        let sk = &s - x0 * k;
        if !f.evaluate(&sk, &-&rk).is_zero() || k > 2 * f.degree() as i64 + 2 {
            return Unimodular::new(sk, -rk, x0.clone(), y0.clone());
        }
    }
    unreachable!()
}

/// gamma for a specific Bezout choice (r, s); exposed for well-definedness
/// checks.
pub fn moving_matrix_with(x0: &BigInt, y0: &BigInt, r: &BigInt, s: &BigInt) -> Result<Unimodular> {
    Unimodular::new(s.clone(), -r, x0.clone(), y0.clone())
}

fn check_point(f: &BinaryForm, p: &CurvePoint) -> Result<()> {
    if f.degree() % 2 != 0 {
        return Err(Error::UnsupportedDegree(f.degree()));
    }
    if !p.lies_on(f) {
        return Err(Error::NotOnCurve);
    }
    if !p.is_primitive() {
        return Err(Error::NonPrimitivePoint);
    }
    Ok(())
}

/// Result of the point-to-pair construction.
#[derive(Clone, Debug)]
pub struct PointPair {
    pub pair: SymmetricPair,
    /// gamma with f' = f . gamma having (0, 1, z0) as a point.
    pub gamma: Unimodular,
    pub moved_form: BinaryForm,
}

/// The pair attached to a rational point through the explicit template.
pub fn pair_from_point(f: &BinaryForm, p: &CurvePoint) -> Result<PointPair> {
    check_point(f, p)?;
    let gamma = moving_matrix(f, &p.x, &p.y)?;
    pair_from_point_with(f, p, &gamma)
}

/// Same, with a caller-supplied gamma whose bottom row is (x0, y0).
pub fn pair_from_point_with(f: &BinaryForm, p: &CurvePoint, gamma: &Unimodular) -> Result<PointPair> {
    check_point(f, p)?;
    if gamma.c != p.x || gamma.d != p.y {
        return Err(Error::NotUnimodular);
    }
    let moved = f.act(gamma);
    let v = template_pair(&moved, &p.z)?;
    Ok(PointPair {
        pair: v.sl2_act(&gamma.inverse()),
        gamma: gamma.clone(),
        moved_form: moved,
    })
}

/// The ideal I = <c, theta, ..., theta^((n-2)/2), zeta_{n/2}, ..., zeta_{n-1}>
/// and alpha = theta attached to the point (0, 1, c).
pub fn construct_ideal(ring: &RankNRing, c: &BigInt) -> Result<(BasedIdeal, AlgebraElement)> {
    let f = ring.form();
    let n = f.degree();
    if n % 2 != 0 {
        return Err(Error::UnsupportedDegree(n));
    }
    if f.coeff(n) != &(c * c) {
        return Err(Error::NotOnCurve);
    }
    if c.is_zero() {
        return Err(Error::WeierstrassPoint);
    }
    let alg = ring.algebra();
    let h = n / 2;
    let mut basis = vec![AlgebraElement::from_integer(alg, c)];
    for k in 1..h {
        let mut p = vec![BigInt::zero(); k + 1];
        p[k] = BigInt::one();
        basis.push(AlgebraElement::from_int_poly(alg, &p));
    }
    for k in h..n {
        basis.push(ring.zeta(k));
    }
    Ok((BasedIdeal::new(basis)?, AlgebraElement::theta(alg)))
}

/// Outcome of checking I^2 in alpha I_f^(n-3) and the norm equation.
#[derive(Clone, Debug, Serialize)]
pub struct PairDataReport {
    pub containment: bool,
    /// Index pairs (i, j) whose product b_i b_j / alpha leaves I_f^(n-3).
    pub failures: Vec<(usize, usize)>,
    /// N(I)^2 and N(alpha) N(I_f^(n-3)) as fraction strings.
    pub norm_lhs: String,
    pub norm_rhs: String,
    pub norm_equation: bool,
}

impl PairDataReport {
    pub fn passes(&self) -> bool {
        self.containment && self.norm_equation
    }
}

struct Products {
    target: BasedIdeal,
    coords: Vec<Vec<Vec<BigRational>>>,
}

fn products(ring: &RankNRing, ideal: &BasedIdeal, alpha: &AlgebraElement) -> Result<Products> {
    let n = ring.rank() as i64;
    let target = ring_ideal_power(ring, n - 3)?;
    let inv = alpha.inverse()?;
    let b = ideal.basis();
    let nn = b.len();
    let mut coords = vec![vec![Vec::new(); nn]; nn];
    for i in 0..nn {
        for j in i..nn {
            let e = b[i].mul(&b[j])?.mul(&inv)?;
            let c = target.coordinates(&e);
            coords[i][j] = c.clone();
            coords[j][i] = c;
        }
    }
    Ok(Products { target, coords })
}

pub fn verify_pair_data(ring: &RankNRing, ideal: &BasedIdeal, alpha: &AlgebraElement) -> Result<PairDataReport> {
    let pr = products(ring, ideal, alpha)?;
    let nn = ideal.basis().len();
    let mut failures = Vec::new();
    for i in 0..nn {
        for j in i..nn {
            if pr.coords[i][j].iter().any(|c| !c.is_integer()) {
                failures.push((i, j));
            }
        }
    }
    let lhs = ideal.norm() * ideal.norm();
    let rhs = alpha.norm() * pr.target.norm();
    Ok(PairDataReport {
        containment: failures.is_empty(),
        failures,
        norm_equation: lhs == rhs.abs(),
        norm_lhs: lhs.to_string(),
        norm_rhs: rhs.to_string(),
    })
}

/// The pair read off from the products b_i b_j / alpha in the basis of
/// I_f^(n-3): the zeta_{n-1} coefficients give A and the zeta_{n-2}
/// coefficients give B. With this orientation the invariant form is f
/// itself for the point construction; other valid data may come out with
/// a sign change, so the sign variants are tried before giving up.
pub fn pair_from_ideal(ring: &RankNRing, ideal: &BasedIdeal, alpha: &AlgebraElement) -> Result<SymmetricPair> {
    let v = pair_from_ideal_raw(ring, ideal, alpha)?;
    let f = ring.form();
    if &v.invariant_form()? == f {
        return Ok(v);
    }
    let neg = |m: &[Vec<BigInt>]| -> Vec<Vec<BigInt>> {
        m.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
    };
    for (x, y) in [
        (v.a.clone(), neg(&v.b)),
        (neg(&v.a), v.b.clone()),
        (neg(&v.a), neg(&v.b)),
    ] {
        let w = SymmetricPair { a: x, b: y };
        if &w.invariant_form()? == f {
            return Ok(w);
        }
    }
    Ok(v)
}

/// The (zeta_{n-1}, zeta_{n-2}) coefficient matrices with no sign fixing.
pub fn pair_from_ideal_raw(ring: &RankNRing, ideal: &BasedIdeal, alpha: &AlgebraElement) -> Result<SymmetricPair> {
    let n = ring.rank();
    if n < 2 || n % 2 != 0 {
        return Err(Error::UnsupportedDegree(n));
    }
    let pr = products(ring, ideal, alpha)?;
    for i in 0..n {
        for j in i..n {
            if pr.coords[i][j].iter().any(|c| !c.is_integer()) {
                return Err(Error::NonIntegralPairData(i, j));
            }
        }
    }
    let take = |idx: usize| -> Vec<Vec<BigInt>> {
        (0..n)
            .map(|i| (0..n).map(|j| pr.coords[i][j][idx].to_integer()).collect())
            .collect()
    };
    Ok(SymmetricPair {
        a: take(n - 1),
        b: take(n - 2),
    })
}

/// The element y0 theta - x0 of K_f.
pub fn x_minus_t(f: &BinaryForm, p: &CurvePoint) -> Result<AlgebraElement> {
    if !p.lies_on(f) {
        return Err(Error::NotOnCurve);
    }
    if p.z.is_zero() {
        return Err(Error::WeierstrassPoint);
    }
    let alg = crate::rings::EtaleAlgebra::new(f)?;
    Ok(AlgebraElement::from_int_poly(&alg, &[-&p.x, p.y.clone()]))
}

/// Pair and class obtained by running the ideal construction on the moved
/// form f . gamma and transporting back to f.
#[derive(Clone, Debug)]
pub struct IdealPair {
    pub pair: SymmetricPair,
    pub gamma: Unimodular,
    /// The class of alpha carried into K_f.
    pub class: AlgebraElement,
}

pub fn pair_from_point_via_ideal(f: &BinaryForm, p: &CurvePoint) -> Result<IdealPair> {
    check_point(f, p)?;
    if f.leading().is_zero() {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let gamma = moving_matrix(f, &p.x, &p.y)?;
    let moved = f.act(&gamma);
    let ring = RankNRing::from_form(&moved)?;
    let (ideal, alpha) = construct_ideal(&ring, &p.z)?;
    let v = pair_from_ideal(&ring, &ideal, &alpha)?;
    let pair = v.sl2_act(&gamma.inverse());

    // theta' -> (d theta - c) / (a - b theta) identifies K_{f'} with K_f.
    let base = crate::rings::EtaleAlgebra::new(f)?;
    let lin = |u: &BigInt, w: &BigInt| AlgebraElement::from_int_poly(&base, &[u.clone(), w.clone()]);
    let denom = lin(&gamma.a, &-&gamma.b);
    let image = lin(&-&gamma.c, &gamma.d).div(&denom)?;
    let n = f.degree() as i64;
    let class = alpha.substitute(&image).mul(&denom.pow(-(n - 3))?)?;
    Ok(IdealPair { pair, gamma, class })
}
