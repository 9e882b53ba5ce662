//! Truncated Laurent expansions in a transcendental tower generator.
//!
//! An element of `L(g)`, with `g` transcendental over `L`, is expanded about
//! `g = a` for a point `a ∈ L` (constants included). Coefficients live in
//! `L`. Derivative series use the substitution rule for `(g − a)′`, which on
//! an SL2 `alpha` generator reads `(α − a)′ = −R(a) − (2a − r)(α − a) − (α − a)²`.

use thiserror::Error;

use crate::algebra::field::Field;
use crate::algebra::poly;
use crate::tower::{ExtensionSpec, Role, SlotKind, Tower, TowerElem};

/// Default number of coefficients after the leading one.
pub const DEFAULT_TRUNCATION: usize = 8;

/// Environment variable overriding [`DEFAULT_TRUNCATION`].
pub const TRUNCATION_ENV: &str = "FINTERM_MAX_TRUNCATION";

/// The truncation in effect: `FINTERM_MAX_TRUNCATION` when set to a
/// nonnegative integer, otherwise [`DEFAULT_TRUNCATION`].
pub fn default_truncation() -> usize {
    std::env::var(TRUNCATION_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_TRUNCATION)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaurentError {
    #[error("cannot expand zero")]
    ZeroInput,
    #[error("{0} is not a transcendental generator")]
    NotTranscendental(String),
    #[error("expansion point must lie below the generator {0}")]
    PointNotBelow(String),
    #[error("element does not lie in the field generated by {0}")]
    NotInField(String),
    #[error("truncation {truncation} is insufficient to determine the order; increase it")]
    InsufficientTruncation { truncation: usize },
}

/// `Σ coeffs[j] (g − a)^(order + j)` up to `(g − a)^(order + truncation)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    pub slot: usize,
    pub point: TowerElem,
    pub order: i64,
    pub coeffs: Vec<TowerElem>,
    pub truncation: usize,
}

impl LaurentSeries {
    /// The leading coefficient `r_λ`.
    pub fn leading(&self) -> &TowerElem {
        &self.coeffs[0]
    }

    /// The truncated sum as a tower element.
    pub fn recombine(&self, tower: &Tower) -> TowerElem {
        let shift = tower.sub(&tower.gen(self.slot), &self.point);
        let mut acc = TowerElem::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            let p = tower.powi(&shift, self.order + j as i64).expect("nonzero shift");
            acc = tower.add(&acc, &tower.mul(c, &p));
        }
        acc
    }
}

/// First `n` coefficients of the power series `a / b` (`b[0] ≠ 0`).
fn series_div(tower: &Tower, a: &[TowerElem], b: &[TowerElem], n: usize) -> Vec<TowerElem> {
    let b0_inv = tower.inv(&b[0]).expect("nonzero constant term");
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

fn check_slot(tower: &Tower, slot: usize, a: &TowerElem) -> Result<(), LaurentError> {
    let name = tower.slot(slot).name.clone();
    if !matches!(tower.slot(slot).kind, SlotKind::Transcendental) {
        return Err(LaurentError::NotTranscendental(name));
    }
    if slot > 0 && !a.within(slot - 1) || slot == 0 && a.slot().is_some() {
        return Err(LaurentError::PointNotBelow(name));
    }
    Ok(())
}

/// Numerator and denominator of `x` shifted to `g = a + T`.
fn shifted(
    tower: &Tower,
    x: &TowerElem,
    slot: usize,
    a: &TowerElem,
) -> Result<(Vec<TowerElem>, Vec<TowerElem>), LaurentError> {
    let (num, den) = tower
        .slot_fraction(x, slot)
        .ok_or_else(|| LaurentError::NotInField(tower.slot(slot).name.clone()))?;
    Ok((poly::taylor_shift(tower, &num, a), poly::taylor_shift(tower, &den, a)))
}

/// Laurent expansion of `x` about `g = a` with `truncation + 1` terms.
pub fn expand(
    tower: &Tower,
    x: &TowerElem,
    slot: usize,
    a: &TowerElem,
    truncation: usize,
) -> Result<LaurentSeries, LaurentError> {
    check_slot(tower, slot, a)?;
    if x.is_zero() {
        return Err(LaurentError::ZeroInput);
    }
    let (num, den) = shifted(tower, x, slot, a)?;
    let lo_n = poly::low_order(tower, &num).unwrap();
    let lo_d = poly::low_order(tower, &den).unwrap();
    let coeffs = series_div(tower, &num[lo_n..], &den[lo_d..], truncation + 1);
    Ok(LaurentSeries {
        slot,
        point: a.clone(),
        order: lo_n as i64 - lo_d as i64,
        coeffs,
        truncation,
    })
}

/// Valuation of `x` at `g = a`; `None` stands for `+∞` (`x = 0`).
pub fn ord_at(tower: &Tower, x: &TowerElem, slot: usize, a: &TowerElem) -> Result<Option<i64>, LaurentError> {
    check_slot(tower, slot, a)?;
    if x.is_zero() {
        return Ok(None);
    }
    let (num, den) = shifted(tower, x, slot, a)?;
    let lo_n = poly::low_order(tower, &num).unwrap() as i64;
    let lo_d = poly::low_order(tower, &den).unwrap() as i64;
    Ok(Some(lo_n - lo_d))
}

/// The Riccati value `R(a) = a′ + a² − r a − s` of an SL2 level.
pub fn riccati_value(tower: &Tower, level: usize, a: &TowerElem) -> Option<TowerElem> {
    let ExtensionSpec::Sl2 { r, s, .. } = &tower.level(level).spec else {
        return None;
    };
    let v = tower.add(&tower.derive(a), &tower.mul(a, a));
    Some(tower.sub(&tower.sub(&v, &tower.mul(r, a)), s))
}

/// The SL2 level whose `alpha` generator is `slot`, if any.
pub fn sl2_alpha_level(tower: &Tower, slot: usize) -> Option<usize> {
    let level = tower.slot(slot).level;
    (tower.role_slot(level, Role::Alpha) == Some(slot) && matches!(tower.level(level).spec, ExtensionSpec::Sl2 { .. }))
        .then_some(level)
}

/// Power series of `(g − a)′` in `T = g − a`, to `n` terms.
fn shift_derivative_series(tower: &Tower, slot: usize, a: &TowerElem, n: usize) -> Vec<TowerElem> {
    let dg = &tower.slot(slot).derivative;
    let (num, den) = shifted(tower, dg, slot, a).expect("generator derivative lies in the field");
    let mut s = series_div(tower, &num, &den, n);
    // (g - a)' = g' - a'
    let da = tower.derive(a);
    if !s.is_empty() {
        s[0] = tower.sub(&s[0], &da);
    }
    s
}

/// Laurent series of `x′` about `g = a`, computed termwise from the
/// expansion of `x` and the series of `(g − a)′`.
pub fn derivative_series(
    tower: &Tower,
    x: &TowerElem,
    slot: usize,
    a: &TowerElem,
    truncation: usize,
) -> Result<LaurentSeries, LaurentError> {
    let sx = expand(tower, x, slot, a, truncation)?;
    let n = truncation + 1;
    let p = shift_derivative_series(tower, slot, a, n);
    let lambda = sx.order;
    // Index k of the output stands for T^(lambda - 1 + k).
    let mut out = vec![TowerElem::zero(); n];
    for (j, r) in sx.coeffs.iter().enumerate() {
        // r' T^(lambda + j)
        let k = j + 1;
        if k < n {
            out[k] = tower.add(&out[k], &tower.derive(r));
        }
        // (lambda + j) r T^(lambda + j - 1) (g - a)'
        let e = lambda + j as i64;
        if e != 0 {
            let coef = tower.mul(&TowerElem::from_i64(e), r);
            for (i, pi) in p.iter().enumerate() {
                let k = j + i;
                if k < n {
                    out[k] = tower.add(&out[k], &tower.mul(&coef, pi));
                }
            }
        }
    }
    let Some(first) = out.iter().position(|c| !c.is_zero()) else {
        return Err(LaurentError::InsufficientTruncation { truncation });
    };
    Ok(LaurentSeries {
        slot,
        point: a.clone(),
        order: lambda - 1 + first as i64,
        coeffs: out[first..].to_vec(),
        truncation: truncation - first,
    })
}

/// Series of the logarithmic derivative `x′/x` about `g = a`.
pub fn logderiv_series(
    tower: &Tower,
    x: &TowerElem,
    slot: usize,
    a: &TowerElem,
    truncation: usize,
) -> Result<LaurentSeries, LaurentError> {
    let dx = derivative_series(tower, x, slot, a, truncation)?;
    let sx = expand(tower, x, slot, a, truncation)?;
    let n = dx.coeffs.len();
    let coeffs = series_div(tower, &dx.coeffs, &sx.coeffs, n);
    Ok(LaurentSeries {
        slot,
        point: a.clone(),
        order: dx.order - sx.order,
        coeffs,
        truncation: dx.truncation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::ExtensionSpec;

    fn airy() -> Tower {
        let b = Tower::base(None);
        b.extend(ExtensionSpec::Sl2 {
            r: TowerElem::zero(),
            s: b.x(),
            omega: TowerElem::one(),
        })
        .unwrap()
    }

    #[test]
    fn simple_expansions() {
        let t = airy();
        let slot = t.role_slot(1, Role::Alpha).unwrap();
        let alpha = t.gen(slot);
        let a = TowerElem::from_i64(3);
        let shift = t.sub(&alpha, &a);
        let s = expand(&t, &t.inv(&shift).unwrap(), slot, &a, 3).unwrap();
        assert_eq!(s.order, -1);
        assert_eq!(
            s.coeffs,
            vec![
                TowerElem::one(),
                TowerElem::zero(),
                TowerElem::zero(),
                TowerElem::zero()
            ]
        );
        let s = expand(&t, &t.mul(&shift, &shift), slot, &a, 1).unwrap();
        assert_eq!(s.order, 2);
        assert_eq!(ord_at(&t, &TowerElem::zero(), slot, &a), Ok(None));
        let b = TowerElem::from_i64(-1);
        let e = t.inv(&t.mul(&t.mul(&shift, &shift), &t.sub(&alpha, &b))).unwrap();
        assert_eq!(ord_at(&t, &e, slot, &a), Ok(Some(-2)));
    }

    #[test]
    fn airy_logderiv_of_alpha() {
        // alpha'/alpha = x/alpha - alpha has order -1 at 0 with leading x.
        let t = airy();
        let slot = t.role_slot(1, Role::Alpha).unwrap();
        let alpha = t.gen(slot);
        let ld = t.logderiv(&alpha).unwrap();
        let s = expand(&t, &ld, slot, &TowerElem::zero(), 2).unwrap();
        assert_eq!(s.order, -1);
        assert_eq!(s.leading(), &t.x());
        let d = logderiv_series(&t, &alpha, slot, &TowerElem::zero(), 2).unwrap();
        assert_eq!(d.order, -1);
        assert_eq!(d.leading(), &t.x());
    }

    #[test]
    fn pole_derivative_order() {
        let t = airy();
        let slot = t.role_slot(1, Role::Alpha).unwrap();
        let alpha = t.gen(slot);
        let a = TowerElem::from_i64(2);
        let x = t.inv(&t.sub(&alpha, &a)).unwrap();
        let d = derivative_series(&t, &x, slot, &a, 4).unwrap();
        assert_eq!(d.order, -2);
        // Leading coefficient R(a) = a^2 - x.
        assert_eq!(d.leading(), &riccati_value(&t, 1, &a).unwrap());
        // The series agrees with expanding the derivative directly.
        let direct = expand(&t, &t.derive(&x), slot, &a, 3).unwrap();
        assert_eq!(direct.order, d.order);
        assert_eq!(direct.coeffs[..3], d.coeffs[..3]);
    }

    #[test]
    fn recombination() {
        let t = airy();
        let slot = t.role_slot(1, Role::Alpha).unwrap();
        let alpha = t.gen(slot);
        let a = TowerElem::from_i64(1);
        let x = t
            .div(&t.add(&alpha, &t.x()), &t.mul(&t.sub(&alpha, &a), &t.add(&alpha, &a)))
            .unwrap();
        let s = expand(&t, &x, slot, &a, 5).unwrap();
        let diff = t.sub(&x, &s.recombine(&t));
        let o = ord_at(&t, &diff, slot, &a).unwrap().unwrap();
        assert!(o > s.order + 5);
    }

    #[test]
    fn zero_and_bad_points() {
        let t = airy();
        let slot = t.role_slot(1, Role::Alpha).unwrap();
        let alpha = t.gen(slot);
        assert_eq!(
            expand(&t, &TowerElem::zero(), slot, &TowerElem::zero(), 2),
            Err(LaurentError::ZeroInput)
        );
        assert!(matches!(
            expand(&t, &alpha, slot, &alpha, 2),
            Err(LaurentError::PointNotBelow(_))
        ));
    }
}
