//! Univariate rational functions in canonical form, and partial fractions.

use thiserror::Error;

use super::field::Field;
use super::poly::{self, Poly};

/// `num / den` with `den` monic and `gcd(num, den) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc<E> {
    pub num: Poly<E>,
    pub den: Poly<E>,
}

impl<E: Clone + PartialEq + std::fmt::Debug> RatFunc<E> {
    /// Canonical form of `num / den`; `None` when `den` is zero.
    pub fn new<F: Field<Elem = E>>(f: &F, num: Poly<E>, den: Poly<E>) -> Option<Self> {
        if den.is_empty() {
            return None;
        }
        if num.is_empty() {
            return Some(Self::zero(f));
        }
        let g = poly::gcd(f, &num, &den);
        let (mut n, mut d) = if g.len() > 1 {
            (poly::exact_div(f, &num, &g), poly::exact_div(f, &den, &g))
        } else {
            (num, den)
        };
        let l = poly::lc(f, &d);
        if !f.is_one(&l) {
            let li = f.inv(&l).unwrap();
            n = poly::scale(f, &n, &li);
            d = poly::monic(f, &d);
        }
        Some(RatFunc { num: n, den: d })
    }

    pub fn zero<F: Field<Elem = E>>(f: &F) -> Self {
        RatFunc {
            num: vec![],
            den: poly::one(f),
        }
    }

    pub fn from_poly<F: Field<Elem = E>>(f: &F, p: Poly<E>) -> Self {
        RatFunc {
            num: p,
            den: poly::one(f),
        }
    }

    pub fn constant<F: Field<Elem = E>>(f: &F, c: E) -> Self {
        Self::from_poly(f, poly::constant(f, c))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.len() == 1
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let num = poly::add(
            f,
            &poly::mul(f, &self.num, &other.den),
            &poly::mul(f, &other.num, &self.den),
        );
        Self::new(f, num, poly::mul(f, &self.den, &other.den)).unwrap()
    }

    pub fn neg<F: Field<Elem = E>>(&self, f: &F) -> Self {
        RatFunc {
            num: poly::neg(f, &self.num),
            den: self.den.clone(),
        }
    }

    pub fn sub<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        self.add(f, &other.neg(f))
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        Self::new(
            f,
            poly::mul(f, &self.num, &other.num),
            poly::mul(f, &self.den, &other.den),
        )
        .unwrap()
    }

    pub fn inv<F: Field<Elem = E>>(&self, f: &F) -> Option<Self> {
        Self::new(f, self.den.clone(), self.num.clone())
    }

    pub fn div<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Option<Self> {
        other.inv(f).map(|o| self.mul(f, &o))
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: &E) -> Self {
        Self::new(f, poly::scale(f, &self.num, c), self.den.clone()).unwrap()
    }

    /// Derivative with respect to the variable (coefficients constant).
    pub fn derivative<F: Field<Elem = E>>(&self, f: &F) -> Self {
        let num = poly::sub(
            f,
            &poly::mul(f, &poly::derivative(f, &self.num), &self.den),
            &poly::mul(f, &self.num, &poly::derivative(f, &self.den)),
        );
        Self::new(f, num, poly::mul(f, &self.den, &self.den)).unwrap()
    }

    /// Value at a point; `None` at a pole.
    pub fn eval<F: Field<Elem = E>>(&self, f: &F, at: &E) -> Option<E> {
        f.div(&poly::eval(f, &self.num, at), &poly::eval(f, &self.den, at))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartialFractionError {
    #[error("denominator factors are not pairwise coprime")]
    NotCoprime,
    #[error("denominator is not a product of the given factors")]
    FactorMismatch,
}

/// `f = polynomial + Σ numerator / factors[factor]^power`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialFractions<E> {
    pub polynomial: Poly<E>,
    /// `(factor index, power, numerator)` with `deg numerator < deg factor`.
    pub terms: Vec<(usize, usize, Poly<E>)>,
}

impl<E: Clone + PartialEq + std::fmt::Debug> PartialFractions<E> {
    pub fn recombine<F: Field<Elem = E>>(&self, f: &F, factors: &[Poly<E>]) -> RatFunc<E> {
        let mut acc = RatFunc::from_poly(f, self.polynomial.clone());
        for (i, j, a) in &self.terms {
            let den = poly::pow(f, &factors[*i], *j as u32);
            acc = acc.add(f, &RatFunc::new(f, a.clone(), den).unwrap());
        }
        acc
    }
}

/// Full partial-fraction decomposition of `r` over pairwise coprime
/// nonconstant denominator factors.
pub fn partial_fractions<F: Field>(
    f: &F,
    r: &RatFunc<F::Elem>,
    factors: &[Poly<F::Elem>],
) -> Result<PartialFractions<F::Elem>, PartialFractionError> {
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            if poly::gcd(f, &factors[i], &factors[j]).len() > 1 {
                return Err(PartialFractionError::NotCoprime);
            }
        }
    }
    // Multiplicity of each factor in the denominator.
    let mut rest = r.den.clone();
    let mut mults = vec![0usize; factors.len()];
    for (i, g) in factors.iter().enumerate() {
        if g.len() < 2 {
            return Err(PartialFractionError::FactorMismatch);
        }
        loop {
            let (q, rem) = poly::divrem(f, &rest, g);
            if !rem.is_empty() {
                break;
            }
            rest = q;
            mults[i] += 1;
        }
    }
    if rest.len() != 1 {
        return Err(PartialFractionError::FactorMismatch);
    }
    let (polynomial, mut numer) = poly::divrem(f, &r.num, &r.den);
    // The leftover unit from dividing out the (non-monic) factors.
    let unit_inv = f.inv(&rest[0]).unwrap();
    numer = poly::scale(f, &numer, &unit_inv);

    let mut terms = vec![];
    let powers: Vec<Poly<F::Elem>> = factors
        .iter()
        .zip(&mults)
        .map(|(g, &m)| poly::pow(f, g, m as u32))
        .collect();
    for (i, g) in factors.iter().enumerate() {
        if mults[i] == 0 {
            continue;
        }
        let others = powers
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(poly::one(f), |acc, (_, p)| poly::mul(f, &acc, p));
        // numer / (powers[i] * others): the piece over powers[i] is
        // numer * others^{-1} mod powers[i].
        let (_, s, _) = poly::ext_gcd(f, &others, &powers[i]);
        let mut a = poly::rem(f, &poly::mul(f, &numer, &s), &powers[i]);
        // g-adic expansion a = Σ a_j g^j, giving a_j / g^(m - j).
        let m = mults[i];
        for j in 0..m {
            let (q, digit) = poly::divrem(f, &a, g);
            if !digit.is_empty() {
                terms.push((i, m - j, digit));
            }
            a = q;
        }
    }
    terms.sort_by_key(|(i, j, _)| (*i, *j));
    Ok(PartialFractions { polynomial, terms })
}
