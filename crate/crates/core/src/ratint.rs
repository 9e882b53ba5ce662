//! Integration of rational functions over `C(x)`.
//!
//! Hermite reduction splits off the rational part of the antiderivative;
//! the Rothstein–Trager resultant then yields the logarithmic part, with
//! constants adjoined only as far as the resultant's roots require. Log
//! arguments are the gcds `gcd(D, A − c D′)`, so they stay unsplit whenever
//! several roots of the denominator share a residue. Over Q, resultant
//! factors of degree three or more become root sums instead of being split,
//! which keeps the constant field small (a generic sextic denominator would
//! otherwise need a splitting field of degree 720).

use std::sync::Arc;

use crate::algebra::field::Field;
use crate::algebra::numfield::{self, AlgNumber, Consts, NumberField, NumberFieldError};
use crate::algebra::poly::{self, Poly};
use crate::algebra::ratfunc::RatFunc;
use crate::certificate::{Certificate, RootSum, Term};
use crate::tower::{Tower, TowerElem};

type Rf = RatFunc<AlgNumber>;
type P = Poly<AlgNumber>;

/// Hermite reduction: `f = g′ + h` where `h` has a squarefree denominator.
/// The polynomial part of `f` is left inside `h`.
pub fn hermite_reduce(f: &Rf) -> (Rf, Rf) {
    let k = &Consts;
    let (poly_part, mut a) = poly::divrem(k, &f.num, &f.den);
    let d = &f.den;
    let mut g = Rf::zero(k);
    let mut d_minus = poly::gcd(k, d, &poly::derivative(k, d));
    let d_star = poly::exact_div(k, d, &d_minus);
    while d_minus.len() > 1 {
        let d_minus2 = poly::gcd(k, &d_minus, &poly::derivative(k, &d_minus));
        let d_minus_star = poly::exact_div(k, &d_minus, &d_minus2);
        let coef = poly::neg(
            k,
            &poly::exact_div(k, &poly::mul(k, &d_star, &poly::derivative(k, &d_minus)), &d_minus),
        );
        let (b, c) = poly::diophantine(k, &coef, &d_minus_star, &a).expect("coprime by squarefreeness");
        let quotient = poly::exact_div(k, &d_star, &d_minus_star);
        a = poly::sub(k, &c, &poly::mul(k, &poly::derivative(k, &b), &quotient));
        g = g.add(k, &Rf::new(k, b, d_minus.clone()).unwrap());
        d_minus = d_minus2;
    }
    let h = Rf::new(k, a, d_star).unwrap().add(k, &Rf::from_poly(k, poly_part));
    (g, h)
}

/// `∫ p dx` with zero constant term.
pub fn integrate_polynomial(p: &P) -> P {
    let k = &Consts;
    let mut out = vec![k.zero()];
    for (i, c) in p.iter().enumerate() {
        out.push(k.mul(c, &AlgNumber::Rat(crate::algebra::field::rat(1, i as i64 + 1))));
    }
    poly::trim(k, out)
}

/// The Rothstein–Trager resultant `R(z) = res_x(D, A − z D′)`.
pub fn rothstein_trager_resultant(a: &P, d: &P) -> P {
    let k = &Consts;
    let dd = poly::derivative(k, d);
    let n = d.len() - 1;
    let zs: Vec<AlgNumber> = (0..=n as i64).map(AlgNumber::from_i64).collect();
    let vals: Vec<AlgNumber> = zs
        .iter()
        .map(|z| {
            let e = poly::sub(k, a, &poly::scale(k, &dd, z));
            if e.is_empty() {
                k.zero()
            } else {
                poly::resultant(k, d, &e)
            }
        })
        .collect();
    poly::interpolate(k, &zs, &vals)
}

/// Logarithmic part of a proper fraction `A/D`: explicit terms `(c, S)`
/// over `field`, plus root sums `(R, [T₀, T₁, …])` standing for
/// `Σ_{R(c)=0} c · log Σ_k c^k T_k(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogPart {
    pub field: Option<Arc<NumberField>>,
    pub terms: Vec<(AlgNumber, P)>,
    pub root_sums: Vec<(P, Vec<P>)>,
}

/// Logarithmic part of a proper fraction `A/D` with squarefree monic `D`,
/// so that `Σ c S′/S` plus the root sums equals `A/D`.
///
/// Over Q, irreducible factors of the resultant of degree three or more
/// are kept as root sums over their own root; the remaining factors are
/// split, adjoining their roots.
pub fn log_part(base: &Option<Arc<NumberField>>, h: &Rf) -> Result<LogPart, NumberFieldError> {
    let k = &Consts;
    if h.is_zero() {
        return Ok(LogPart {
            field: base.clone(),
            terms: vec![],
            root_sums: vec![],
        });
    }
    debug_assert!(h.num.len() < h.den.len());
    let r = rothstein_trager_resultant(&h.num, &h.den);
    let r = poly::monic(k, &poly::squarefree_part(k, &r));
    let rational = base.is_none() && r.iter().all(|c| c.as_rational().is_some());
    let (small, large): (Vec<P>, Vec<P>) = if rational {
        numfield::factor_over(&None, &r)
            .into_iter()
            .map(|(g, _)| poly::monic(k, &g))
            .partition(|g| g.len() <= 3)
    } else {
        (vec![r], vec![])
    };
    let small = small.iter().fold(poly::one(k), |acc, g| poly::mul(k, &acc, g));
    let dd = poly::derivative(k, &h.den);
    let (field, roots) = if small.len() > 1 {
        numfield::split(base, &small)?
    } else {
        (base.clone(), vec![])
    };
    let mut terms = vec![];
    for (c, _) in roots {
        let e = poly::sub(k, &h.num, &poly::scale(k, &dd, &c));
        let s = poly::gcd(k, &h.den, &e);
        if s.len() > 1 {
            terms.push((c, s));
        }
    }
    let mut root_sums = vec![];
    for g in large {
        let minpoly: Vec<_> = g.iter().map(|c| c.as_rational().unwrap().clone()).collect();
        let field = NumberField::new(minpoly);
        let c = field.generator();
        let e = poly::sub(k, &h.num, &poly::scale(k, &dd, &c));
        let s = poly::gcd(k, &h.den, &e);
        // Rewrite S(c, x) = Σ_k c^k T_k(x).
        let n = field.degree();
        let mut by_power: Vec<P> = vec![vec![]; n];
        for (i, coeff) in s.iter().enumerate() {
            let coords = coeff.coords_in(&field).expect("coefficient in the root field");
            for (j, q) in coords.into_iter().enumerate() {
                let mono = poly::monomial(k, AlgNumber::Rat(q), i);
                by_power[j] = poly::add(k, &by_power[j], &mono);
            }
        }
        while by_power.last().is_some_and(|p| p.is_empty()) {
            by_power.pop();
        }
        root_sums.push((g, by_power));
    }
    Ok(LogPart {
        field,
        terms,
        root_sums,
    })
}

/// Rational antiderivative and logarithmic terms of `f`:
/// `f = v′ + Σ c (S′/S)` plus root sums.
#[derive(Clone, Debug)]
pub struct RationalIntegral {
    pub rational: Rf,
    pub logs: LogPart,
}

pub fn integrate(base: &Option<Arc<NumberField>>, f: &Rf) -> Result<RationalIntegral, NumberFieldError> {
    let k = &Consts;
    let (g, h) = hermite_reduce(f);
    let (poly_part, rest) = poly::divrem(k, &h.num, &h.den);
    let proper = Rf::new(k, rest, h.den.clone()).unwrap();
    let rational = g.add(k, &Rf::from_poly(k, integrate_polynomial(&poly_part)));
    Ok(RationalIntegral {
        rational,
        logs: log_part(base, &proper)?,
    })
}

/// Does `a` have an antiderivative in `C(x)`?
pub fn has_rational_antiderivative(a: &Rf) -> bool {
    let (_, h) = hermite_reduce(a);
    let (_, rest) = poly::divrem(&Consts, &h.num, &h.den);
    rest.is_empty()
}

/// Is `n a = u′/u` for some nonzero integer `n` and nonzero `u ∈ C(x)`?
/// (Equivalently: simple poles only, no polynomial part, rational residues.)
pub fn is_rational_logderiv_multiple(a: &Rf) -> bool {
    let k = &Consts;
    let (g, h) = hermite_reduce(a);
    if !g.is_zero() {
        return false;
    }
    let (poly_part, rest) = poly::divrem(k, &h.num, &h.den);
    if !poly_part.is_empty() {
        return false;
    }
    if rest.is_empty() {
        return true;
    }
    let r = rothstein_trager_resultant(&rest, &h.den);
    let field = numfield::join_fields(r.iter()).ok().flatten();
    numfield::factor_over(&field, &r)
        .iter()
        .all(|(q, _)| q.len() == 2 && q[0].as_rational().is_some())
}

/// A certificate for `∫ f` over the base level of `tower`.
pub fn integrate_rational(tower: &Tower, f: &TowerElem) -> Result<Certificate, RatIntError> {
    let r = tower.to_base_ratfunc(f).ok_or(RatIntError::NotRational)?;
    let base = numfield::join_two(
        &tower.constants().cloned(),
        &numfield::join_fields(r.num.iter().chain(&r.den)).map_err(RatIntError::Field)?,
    )
    .map_err(RatIntError::Field)?;
    let integral = integrate(&base, &r).map_err(RatIntError::Field)?;
    let lift = |p: &P| tower.from_base_ratfunc(&RatFunc::from_poly(&Consts, p.clone()));
    let terms = integral
        .logs
        .terms
        .iter()
        .map(|(c, s)| Term {
            c: c.clone(),
            u: lift(s),
        })
        .collect();
    let root_sums = integral
        .logs
        .root_sums
        .iter()
        .map(|(r, s)| RootSum {
            minpoly: r.clone(),
            arg: s.iter().map(lift).collect(),
        })
        .collect();
    Ok(Certificate {
        level: 0,
        terms,
        root_sums,
        v: tower.from_base_ratfunc(&integral.rational),
        f: f.clone(),
    })
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum RatIntError {
    #[error("integrand is not a rational function of x")]
    NotRational,
    #[error(transparent)]
    Field(NumberFieldError),
}
