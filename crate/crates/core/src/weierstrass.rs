//! The Weierstrass curve `Y² = 4X³ − g1 X − g0` attached to a Weierstrass
//! level, and the function field `k(θ, θ′)` over it.
//!
//! The generic point of the level is `(θ, θ′/α)`. Adding a constant point
//! `p` to it gives the translation automorphism of `k(θ, θ′)`; valuations at
//! constant points are computed from norms down to `k(θ)` and, where two
//! points lie over the same `θ`-value, from a local power series.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::field::{rat, Field};
use crate::algebra::numfield::{self, AlgNumber, Consts, NumberField};
use crate::algebra::poly::{self, Poly};
use crate::tower::{ExtensionSpec, Role, Tower, TowerElem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeierstrassError {
    #[error("level {0} is not a Weierstrass level")]
    NotWeierstrass(usize),
    #[error("point {0} is not on the curve")]
    OffCurve(String),
    #[error("valuation of zero")]
    ZeroInput,
    #[error("element does not lie in the Weierstrass function field")]
    NotInField,
    #[error("constants lie in unrelated number fields")]
    FieldMismatch,
}

/// A point of the curve with constant coordinates, in the chart `Z = 1`,
/// or the point at infinity `(0 : 1 : 0)`.
#[derive(Clone, Debug, PartialEq)]
pub enum EllipticPoint {
    Infinity,
    Affine(AlgNumber, AlgNumber),
}

impl EllipticPoint {
    pub fn affine(x: AlgNumber, y: AlgNumber) -> Self {
        EllipticPoint::Affine(x, y)
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        EllipticPoint::Affine(AlgNumber::from_i64(x), AlgNumber::from_i64(y))
    }

    /// Projective coordinates `(X : Y : Z)`.
    pub fn projective(&self) -> [AlgNumber; 3] {
        match self {
            EllipticPoint::Infinity => [Consts.zero(), Consts.one(), Consts.zero()],
            EllipticPoint::Affine(x, y) => [x.clone(), y.clone(), Consts.one()],
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            EllipticPoint::Infinity => EllipticPoint::Infinity,
            EllipticPoint::Affine(x, y) => EllipticPoint::Affine(x.clone(), Consts.neg(y)),
        }
    }

    pub fn is_two_torsion(&self) -> bool {
        match self {
            EllipticPoint::Infinity => true,
            EllipticPoint::Affine(_, y) => y.is_zero(),
        }
    }
}

impl fmt::Display for EllipticPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EllipticPoint::Infinity => f.write_str("O"),
            EllipticPoint::Affine(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

/// Finitely supported integer combination of points.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Divisor {
    pub entries: Vec<(EllipticPoint, i64)>,
}

impl Divisor {
    pub fn degree(&self) -> i64 {
        self.entries.iter().map(|(_, n)| n).sum()
    }

    pub fn get(&self, p: &EllipticPoint) -> i64 {
        self.entries.iter().find(|(q, _)| q == p).map_or(0, |(_, n)| *n)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn add_entry(&mut self, p: EllipticPoint, n: i64) {
        if n != 0 {
            self.entries.push((p, n));
        }
    }
}

/// Divisor of a function at constant points, with a flag telling whether
/// zeros or poles at non-constant points were left out.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantDivisor {
    pub divisor: Divisor,
    pub residual: bool,
}

/// The curve of a Weierstrass level together with its generator slots.
#[derive(Clone, Debug)]
pub struct WeierstrassCurve {
    pub level: usize,
    pub g0: AlgNumber,
    pub g1: AlgNumber,
    pub alpha: TowerElem,
    pub theta: usize,
    pub thetap: usize,
}

impl WeierstrassCurve {
    pub fn of_level(tower: &Tower, level: usize) -> Result<Self, WeierstrassError> {
        let ExtensionSpec::Weierstrass { g0, g1, alpha } = &tower.level(level).spec else {
            return Err(WeierstrassError::NotWeierstrass(level));
        };
        Ok(WeierstrassCurve {
            level,
            g0: g0.clone(),
            g1: g1.clone(),
            alpha: alpha.clone(),
            theta: tower.role_slot(level, Role::Theta).unwrap(),
            thetap: tower.role_slot(level, Role::ThetaPrime).unwrap(),
        })
    }

    /// `P(X) = 4X³ − g1 X − g0`, ascending coefficients.
    pub fn cubic(&self) -> Poly<AlgNumber> {
        let k = &Consts;
        vec![k.neg(&self.g0), k.neg(&self.g1), k.zero(), AlgNumber::from_i64(4)]
    }

    pub fn contains(&self, p: &EllipticPoint) -> bool {
        match p {
            EllipticPoint::Infinity => true,
            EllipticPoint::Affine(x, y) => {
                numfield::common_field(x, y).is_ok() && Consts.mul(y, y) == poly::eval(&Consts, &self.cubic(), x)
            }
        }
    }

    fn check(&self, p: &EllipticPoint) -> Result<(), WeierstrassError> {
        if let EllipticPoint::Affine(x, y) = p {
            numfield::common_field(x, y).map_err(|_| WeierstrassError::FieldMismatch)?;
        }
        if self.contains(p) {
            Ok(())
        } else {
            Err(WeierstrassError::OffCurve(p.to_string()))
        }
    }

    /// The group law with identity `O`: `x₃ = ¼λ² − x₁ − x₂`.
    pub fn add(&self, p: &EllipticPoint, q: &EllipticPoint) -> Result<EllipticPoint, WeierstrassError> {
        self.check(p)?;
        self.check(q)?;
        let k = &Consts;
        let (EllipticPoint::Affine(x1, y1), EllipticPoint::Affine(x2, y2)) = (p, q) else {
            return Ok(if *p == EllipticPoint::Infinity {
                q.clone()
            } else {
                p.clone()
            });
        };
        let lambda = if x1 != x2 {
            k.div(&k.sub(y2, y1), &k.sub(x2, x1)).unwrap()
        } else if k.add(y1, y2).is_zero() {
            return Ok(EllipticPoint::Infinity);
        } else {
            // Tangent slope P'(x)/(2y).
            let num = k.sub(&k.mul(&AlgNumber::from_i64(12), &k.mul(x1, x1)), &self.g1);
            k.div(&num, &k.mul(&AlgNumber::from_i64(2), y1)).unwrap()
        };
        let quarter = AlgNumber::Rat(rat(1, 4));
        let x3 = k.sub(&k.sub(&k.mul(&quarter, &k.mul(&lambda, &lambda)), x1), x2);
        let y3 = k.neg(&k.add(y1, &k.mul(&lambda, &k.sub(&x3, x1))));
        Ok(EllipticPoint::Affine(x3, y3))
    }

    /// The constant 2-torsion points `(e, 0)` with `P(e) = 0`, adjoining
    /// the roots of `P` to the constants.
    pub fn two_torsion(&self) -> (Option<Arc<NumberField>>, Vec<EllipticPoint>) {
        let base = numfield::join_fields([&self.g0, &self.g1]).expect("constants in one field");
        let (field, roots) = numfield::split(&base, &self.cubic()).expect("constants in one field");
        let pts = roots
            .into_iter()
            .map(|(e, _)| EllipticPoint::Affine(e, Consts.zero()))
            .collect();
        (field, pts)
    }

    /// The derivation of the function field (the tower's derivation).
    pub fn derive(&self, tower: &Tower, u: &TowerElem) -> TowerElem {
        tower.derive(u)
    }

    /// Splits `u` as `a + b θ′` with `a, b` in the field below `θ′`.
    pub fn components(&self, tower: &Tower, u: &TowerElem) -> Result<(TowerElem, TowerElem), WeierstrassError> {
        if !u.within(self.thetap) {
            return Err(WeierstrassError::NotInField);
        }
        match tower.slot_poly(u, self.thetap) {
            Some(c) => Ok((poly::coeff(tower, &c, 0), poly::coeff(tower, &c, 1))),
            None => Err(WeierstrassError::NotInField),
        }
    }

    /// Images of `θ` and `θ′` under translation by `p`.
    fn translation_images(&self, tower: &Tower, p: &EllipticPoint) -> (TowerElem, TowerElem) {
        let theta = tower.gen(self.theta);
        let thetap = tower.gen(self.thetap);
        let EllipticPoint::Affine(x0, y0) = p else {
            return (theta, thetap);
        };
        let x0 = TowerElem::Const(x0.clone());
        let y0 = TowerElem::Const(y0.clone());
        let y = tower.div(&thetap, &self.alpha).unwrap();
        let lambda = tower.div(&tower.sub(&y, &y0), &tower.sub(&theta, &x0)).unwrap();
        let quarter = TowerElem::rational(rat(1, 4));
        let x3 = tower.sub(
            &tower.sub(&tower.mul(&quarter, &tower.mul(&lambda, &lambda)), &theta),
            &x0,
        );
        let y3 = tower.neg(&tower.add(&y, &tower.mul(&lambda, &tower.sub(&x3, &theta))));
        (x3, tower.mul(&self.alpha, &y3))
    }

    /// The translation automorphism `τ*ₚ`: substitutes the coordinates of
    /// `(θ, θ′/α) + p` for those of `(θ, θ′/α)`.
    pub fn translate(&self, tower: &Tower, u: &TowerElem, p: &EllipticPoint) -> Result<TowerElem, WeierstrassError> {
        self.check(p)?;
        if !u.within(self.thetap) {
            return Err(WeierstrassError::NotInField);
        }
        if *p == EllipticPoint::Infinity {
            return Ok(u.clone());
        }
        let images = self.translation_images(tower, p);
        Ok(self.substitute(tower, u, &images))
    }

    fn substitute(&self, tower: &Tower, u: &TowerElem, images: &(TowerElem, TowerElem)) -> TowerElem {
        match u.slot() {
            Some(s) if s == self.thetap => {
                let c = tower.slot_poly(u, s).unwrap();
                let c: Vec<TowerElem> = c.iter().map(|ci| self.substitute(tower, ci, images)).collect();
                poly::eval(tower, &c, &images.1)
            }
            Some(s) if s == self.theta => {
                let (n, d) = tower.slot_fraction(u, s).unwrap();
                let n = poly::eval(tower, &n, &images.0);
                let d = poly::eval(tower, &d, &images.0);
                tower.div(&n, &d).expect("translation is an automorphism")
            }
            _ => u.clone(),
        }
    }

    /// Norm `a² − b² α² P(θ)` of `u = a + b θ′` down to the field of `θ`.
    pub fn norm(&self, tower: &Tower, u: &TowerElem) -> Result<TowerElem, WeierstrassError> {
        let (a, b) = self.components(tower, u)?;
        let theta = tower.gen(self.theta);
        let p = poly::eval(
            tower,
            &self.cubic().into_iter().map(TowerElem::Const).collect::<Vec<_>>(),
            &theta,
        );
        let rhs = tower.mul(&tower.mul(&tower.mul(&b, &b), &tower.mul(&self.alpha, &self.alpha)), &p);
        Ok(tower.sub(&tower.mul(&a, &a), &rhs))
    }

    /// `θ`-adic valuation of an element of the field of `θ` at `θ = x0`.
    fn theta_order(&self, tower: &Tower, e: &TowerElem, x0: &AlgNumber) -> i64 {
        let (n, d) = tower.slot_fraction(e, self.theta).unwrap();
        let at = TowerElem::Const(x0.clone());
        let n = poly::taylor_shift(tower, &n, &at);
        let d = poly::taylor_shift(tower, &d, &at);
        poly::low_order(tower, &n).unwrap() as i64 - poly::low_order(tower, &d).unwrap() as i64
    }

    /// Order of `u` at the constant point `p` (or at infinity).
    pub fn valuation_at(&self, tower: &Tower, u: &TowerElem, p: &EllipticPoint) -> Result<i64, WeierstrassError> {
        self.check(p)?;
        if u.is_zero() {
            return Err(WeierstrassError::ZeroInput);
        }
        let n = self.norm(tower, u)?;
        match p {
            EllipticPoint::Infinity => {
                // v_∞(θ) = −2 and the involution θ′ ↦ −θ′ fixes ∞.
                let (num, den) = tower.slot_fraction(&n, self.theta).unwrap();
                Ok(den.len() as i64 - num.len() as i64)
            }
            EllipticPoint::Affine(x0, y0) if y0.is_zero() => Ok(self.theta_order(tower, &n, x0)),
            EllipticPoint::Affine(x0, y0) => self.valuation_unramified(tower, u, &n, x0, y0),
        }
    }

    /// Valuation at a point with `y0 ≠ 0`, where `θ − x0` is a uniformizer:
    /// expand `a(θ) + b(θ) α Y` with `Y` the branch through `y0`.
    fn valuation_unramified(
        &self,
        tower: &Tower,
        u: &TowerElem,
        norm: &TowerElem,
        x0: &AlgNumber,
        y0: &AlgNumber,
    ) -> Result<i64, WeierstrassError> {
        let (a, b) = self.components(tower, u)?;
        if b.is_zero() {
            return Ok(self.theta_order(tower, &a, x0));
        }
        let va = (!a.is_zero()).then(|| self.theta_order(tower, &a, x0));
        let vb = self.theta_order(tower, &b, x0);
        let lower = va.map_or(vb, |va| va.min(vb));
        // v_p(u) + v_{-p}(u) = v(N) and v_{-p}(u) ≥ lower.
        let upper = self.theta_order(tower, norm, x0) - lower;
        let terms = (upper - lower + 1) as usize;
        let at = TowerElem::Const(x0.clone());
        let series = |e: &TowerElem, from: i64| -> Vec<TowerElem> {
            // Coefficients of T^from … T^(from + terms - 1).
            if e.is_zero() {
                return vec![TowerElem::zero(); terms];
            }
            let (n, d) = tower.slot_fraction(e, self.theta).unwrap();
            let n = poly::taylor_shift(tower, &n, &at);
            let d = poly::taylor_shift(tower, &d, &at);
            let ln = poly::low_order(tower, &n).unwrap();
            let ld = poly::low_order(tower, &d).unwrap();
            let ord = ln as i64 - ld as i64;
            let s = series_div(tower, &n[ln..], &d[ld..], terms);
            (0..terms as i64)
                .map(|j| {
                    let idx = from + j - ord;
                    if idx < 0 {
                        TowerElem::zero()
                    } else {
                        s[idx as usize].clone()
                    }
                })
                .collect()
        };
        // Y(T) with Y(0) = y0 and Y² = P(x0 + T).
        let cubic: Vec<AlgNumber> = poly::taylor_shift(&Consts, &self.cubic(), x0);
        let y_series = series_sqrt_with(&cubic, y0, terms);
        let sa = series(&a, lower);
        let sb = series(&b, lower);
        for j in 0..terms {
            let mut c = sa[j].clone();
            for i in 0..=j {
                let yb = tower.mul(&sb[i], &TowerElem::Const(y_series[j - i].clone()));
                c = tower.add(&c, &tower.mul(&self.alpha, &yb));
            }
            if !c.is_zero() {
                return Ok(lower + j as i64);
            }
        }
        unreachable!("valuation bounded by the norm")
    }

    /// Divisor of `u` at constant points and infinity.
    pub fn constant_point_divisor(&self, tower: &Tower, u: &TowerElem) -> Result<ConstantDivisor, WeierstrassError> {
        if u.is_zero() {
            return Err(WeierstrassError::ZeroInput);
        }
        let n = self.norm(tower, u)?;
        let mut divisor = Divisor::default();
        let mut residual = false;
        let mut points: Vec<EllipticPoint> = vec![];
        if let Some((num, den)) = tower.slot_fraction(&n, self.theta) {
            for p in [&num, &den] {
                let (roots, complete) = constant_roots(tower, p);
                residual |= !complete;
                for (x0, _) in roots {
                    let y2 = poly::eval(&Consts, &self.cubic(), &x0);
                    if y2.is_zero() {
                        points.push(EllipticPoint::Affine(x0, y2));
                    } else {
                        let (_, ys) =
                            numfield::split(&y2.field().cloned(), &[Consts.neg(&y2), Consts.zero(), Consts.one()])
                                .map_err(|_| WeierstrassError::FieldMismatch)?;
                        let y0 = ys[0].0.clone();
                        points.push(EllipticPoint::Affine(x0.clone(), y0.clone()));
                        points.push(EllipticPoint::Affine(x0, Consts.neg(&y0)));
                    }
                }
            }
        } else {
            residual = true;
        }
        for p in points {
            if divisor.entries.iter().any(|(q, _)| *q == p) {
                continue;
            }
            let v = self.valuation_at(tower, u, &p)?;
            divisor.add_entry(p, v);
        }
        let vinf = self.valuation_at(tower, u, &EllipticPoint::Infinity)?;
        divisor.add_entry(EllipticPoint::Infinity, vinf);
        Ok(ConstantDivisor { divisor, residual })
    }
}

/// Constant roots (with multiplicity) of a polynomial in `θ` whose
/// coefficients lie in `C(x)`; `complete` is false when some roots are not
/// constant or the coefficients lie higher in the tower.
fn constant_roots(tower: &Tower, p: &[TowerElem]) -> (Vec<(AlgNumber, usize)>, bool) {
    let k = &Consts;
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return (vec![], true);
    }
    let Some(coeffs) = p.iter().map(|c| tower.to_base_ratfunc(c)).collect::<Option<Vec<_>>>() else {
        return (vec![], false);
    };
    // Clear denominators, then gcd over the x-coefficient slices.
    let common = coeffs.iter().fold(poly::one(k), |acc, c| {
        let g = poly::gcd(k, &acc, &c.den);
        poly::mul(k, &acc, &poly::exact_div(k, &c.den, &g))
    });
    let polys: Vec<Poly<AlgNumber>> = coeffs
        .iter()
        .map(|c| poly::mul(k, &c.num, &poly::exact_div(k, &common, &c.den)))
        .collect();
    let xdeg = polys.iter().map(|q| q.len()).max().unwrap_or(0);
    let mut g: Poly<AlgNumber> = vec![];
    for j in 0..xdeg {
        let slice: Poly<AlgNumber> = poly::trim(k, polys.iter().map(|q| poly::coeff(k, q, j)).collect());
        g = poly::gcd(k, &g, &slice);
    }
    if g.len() < 2 {
        return (vec![], false);
    }
    let field = numfield::join_fields(g.iter()).ok().flatten();
    let Ok((_, roots)) = numfield::split(&field, &g) else {
        return (vec![], false);
    };
    // Multiplicities in the original polynomial.
    let mut out = vec![];
    let mut total = 0;
    for (r, _) in roots {
        let at = TowerElem::Const(r.clone());
        let shifted = poly::taylor_shift(tower, p, &at);
        let m = poly::low_order(tower, &shifted).unwrap();
        total += m;
        out.push((r, m));
    }
    (out, total == deg)
}

fn series_div(tower: &Tower, a: &[TowerElem], b: &[TowerElem], n: usize) -> Vec<TowerElem> {
    let b0_inv = tower.inv(&b[0]).unwrap();
    let mut out: Vec<TowerElem> = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = poly::coeff(tower, a, j);
        for i in 1..=j.min(b.len().saturating_sub(1)) {
            acc = tower.sub(&acc, &tower.mul(&b[i], &out[j - i]));
        }
        out.push(tower.mul(&acc, &b0_inv));
    }
    out
}

/// Power-series square root of `q` with prescribed constant term `s0`
/// (`s0² = q[0] ≠ 0`).
fn series_sqrt_with(q: &[AlgNumber], s0: &AlgNumber, n: usize) -> Vec<AlgNumber> {
    let k = &Consts;
    let inv = k.inv(&k.mul(&AlgNumber::from_i64(2), s0)).unwrap();
    let mut s = vec![s0.clone()];
    for j in 1..n {
        let mut acc = poly::coeff(k, q, j);
        for i in 1..j {
            acc = k.sub(&acc, &k.mul(&s[i], &s[j - i]));
        }
        s.push(k.mul(&acc, &inv));
    }
    s.truncate(n);
    s
}
