//! Tower elements and the field/derivation structure on them.
//!
//! Every generator of a tower occupies a *slot*. An element whose highest
//! generator is slot `s` is stored either as a reduced fraction of
//! polynomials in that generator (transcendental slots) or as a polynomial
//! of degree below the minimal polynomial's degree (algebraic slots), with
//! coefficients that are themselves canonical elements of lower slots.
//! Canonical forms are unique, so equality is structural.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::algebra::field::{Field, Rational};
use crate::algebra::numfield::{AlgNumber, Consts};
use crate::algebra::poly;

use super::{SlotKind, Tower, TowerError};

#[derive(Clone, Debug, PartialEq)]
pub enum TowerElem {
    Const(AlgNumber),
    Rat(Arc<RatNode>),
    Alg(Arc<AlgNode>),
}

/// `num / den` in the generator of `slot`; `den` monic, coprime to `num`,
/// and not both of degree zero.
#[derive(Clone, Debug, PartialEq)]
pub struct RatNode {
    pub slot: usize,
    pub num: Vec<TowerElem>,
    pub den: Vec<TowerElem>,
}

/// `Σ coeffs[i] g^i` in the algebraic generator `g` of `slot`, of degree
/// at least one and below the degree of the minimal polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgNode {
    pub slot: usize,
    pub coeffs: Vec<TowerElem>,
}

impl TowerElem {
    pub fn zero() -> Self {
        TowerElem::Const(AlgNumber::from_i64(0))
    }

    pub fn one() -> Self {
        TowerElem::Const(AlgNumber::from_i64(1))
    }

    pub fn from_i64(n: i64) -> Self {
        TowerElem::Const(AlgNumber::from_i64(n))
    }

    pub fn rational(q: Rational) -> Self {
        TowerElem::Const(AlgNumber::Rat(q))
    }

    /// Highest generator slot the element depends on (`None` for constants).
    pub fn slot(&self) -> Option<usize> {
        match self {
            TowerElem::Const(_) => None,
            TowerElem::Rat(n) => Some(n.slot),
            TowerElem::Alg(n) => Some(n.slot),
        }
    }

    pub fn as_const(&self) -> Option<&AlgNumber> {
        match self {
            TowerElem::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TowerElem::Const(c) if c.is_zero())
    }

    /// True when the element lives at slot `limit` or below.
    pub fn within(&self, limit: usize) -> bool {
        self.slot().is_none_or(|s| s <= limit)
    }

    /// All generator slots the element depends on.
    pub fn support(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_support(&mut out);
        out
    }

    fn collect_support(&self, out: &mut BTreeSet<usize>) {
        match self {
            TowerElem::Const(_) => {}
            TowerElem::Rat(n) => {
                out.insert(n.slot);
                for c in n.num.iter().chain(&n.den) {
                    c.collect_support(out);
                }
            }
            TowerElem::Alg(n) => {
                out.insert(n.slot);
                for c in &n.coeffs {
                    c.collect_support(out);
                }
            }
        }
    }

    /// All constants occurring in the element.
    pub fn constants(&self) -> Vec<AlgNumber> {
        let mut out = vec![];
        self.collect_constants(&mut out);
        out
    }

    fn collect_constants(&self, out: &mut Vec<AlgNumber>) {
        match self {
            TowerElem::Const(c) => out.push(c.clone()),
            TowerElem::Rat(n) => n.num.iter().chain(&n.den).for_each(|c| c.collect_constants(out)),
            TowerElem::Alg(n) => n.coeffs.iter().for_each(|c| c.collect_constants(out)),
        }
    }
}

impl From<AlgNumber> for TowerElem {
    fn from(c: AlgNumber) -> Self {
        TowerElem::Const(c)
    }
}

fn max_slot(a: &TowerElem, b: &TowerElem) -> Option<usize> {
    match (a.slot(), b.slot()) {
        (None, s) | (s, None) => s,
        (Some(x), Some(y)) => Some(x.max(y)),
    }
}

impl Tower {
    /// The generator of `slot` as an element.
    pub fn gen(&self, slot: usize) -> TowerElem {
        match &self.slots[slot].kind {
            SlotKind::Transcendental => TowerElem::Rat(Arc::new(RatNode {
                slot,
                num: vec![TowerElem::zero(), TowerElem::one()],
                den: vec![TowerElem::one()],
            })),
            SlotKind::Algebraic(_) => TowerElem::Alg(Arc::new(AlgNode {
                slot,
                coeffs: vec![TowerElem::zero(), TowerElem::one()],
            })),
        }
    }

    /// Element `Σ coeffs[i] g^i` for the generator `g` of `slot`, with
    /// coefficients from lower slots.
    pub fn from_slot_poly(&self, slot: usize, coeffs: Vec<TowerElem>) -> TowerElem {
        let coeffs = poly::trim(self, coeffs);
        match &self.slots[slot].kind {
            SlotKind::Transcendental => self.make_rat_coprime(slot, coeffs, vec![TowerElem::one()]),
            SlotKind::Algebraic(m) => {
                let c = if coeffs.len() >= m.len() {
                    poly::rem(self, &coeffs, m)
                } else {
                    coeffs
                };
                self.make_alg(slot, c)
            }
        }
    }

    /// Canonical element from a fraction in a transcendental slot.
    pub fn make_rat(&self, slot: usize, num: Vec<TowerElem>, den: Vec<TowerElem>) -> TowerElem {
        let num = poly::trim(self, num);
        let den = poly::trim(self, den);
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return TowerElem::zero();
        }
        let g = poly::gcd(self, &num, &den);
        if g.len() > 1 {
            let n = poly::exact_div(self, &num, &g);
            let d = poly::exact_div(self, &den, &g);
            self.make_rat_coprime(slot, n, d)
        } else {
            self.make_rat_coprime(slot, num, den)
        }
    }

    /// As [`Tower::make_rat`] for a coprime pair (only normalizes the
    /// leading coefficient and demotes).
    fn make_rat_coprime(&self, slot: usize, num: Vec<TowerElem>, den: Vec<TowerElem>) -> TowerElem {
        if num.is_empty() {
            return TowerElem::zero();
        }
        let l = den.last().unwrap().clone();
        let (num, den) = if self.is_one(&l) {
            (num, den)
        } else {
            let li = self.inv(&l).unwrap();
            (poly::scale(self, &num, &li), poly::monic(self, &den))
        };
        if den.len() == 1 && num.len() == 1 {
            return num.into_iter().next().unwrap();
        }
        TowerElem::Rat(Arc::new(RatNode { slot, num, den }))
    }

    fn make_alg(&self, slot: usize, coeffs: Vec<TowerElem>) -> TowerElem {
        let coeffs = poly::trim(self, coeffs);
        match coeffs.len() {
            0 => TowerElem::zero(),
            1 => coeffs.into_iter().next().unwrap(),
            _ => TowerElem::Alg(Arc::new(AlgNode { slot, coeffs })),
        }
    }

    /// The element as a fraction of polynomials in the generator of `slot`
    /// (which must be transcendental or algebraic at or above the element).
    pub fn slot_fraction(&self, e: &TowerElem, slot: usize) -> Option<(Vec<TowerElem>, Vec<TowerElem>)> {
        match e {
            TowerElem::Rat(n) if n.slot == slot => Some((n.num.clone(), n.den.clone())),
            TowerElem::Alg(n) if n.slot == slot => Some((n.coeffs.clone(), vec![TowerElem::one()])),
            _ if e.within(slot) => Some((poly::constant(self, e.clone()), vec![TowerElem::one()])),
            _ => None,
        }
    }

    /// Coefficients of `e` as a polynomial in the generator of `slot`, if
    /// `e` is such a polynomial.
    pub fn slot_poly(&self, e: &TowerElem, slot: usize) -> Option<Vec<TowerElem>> {
        let (n, d) = self.slot_fraction(e, slot)?;
        (d.len() == 1).then_some(n)
    }

    /// Laurent-polynomial view in a transcendental slot: `(coeffs, shift)`
    /// with `e = Σ coeffs[i] g^(i - shift)`, when the denominator is a
    /// power of the generator.
    pub fn slot_laurent(&self, e: &TowerElem, slot: usize) -> Option<(Vec<TowerElem>, usize)> {
        let (n, d) = self.slot_fraction(e, slot)?;
        let k = d.len() - 1;
        let monomial = d[..k].iter().all(|c| c.is_zero());
        monomial.then_some((n, k))
    }

    fn add_lower(&self, hi: &TowerElem, lo: &TowerElem) -> TowerElem {
        if lo.is_zero() {
            return hi.clone();
        }
        match hi {
            TowerElem::Rat(n) => {
                let num = poly::add(self, &n.num, &poly::scale(self, &n.den, lo));
                self.make_rat_coprime(n.slot, num, n.den.clone())
            }
            TowerElem::Alg(n) => {
                let mut c = n.coeffs.clone();
                c[0] = self.add(&c[0], lo);
                self.make_alg(n.slot, c)
            }
            TowerElem::Const(_) => unreachable!(),
        }
    }

    fn mul_lower(&self, hi: &TowerElem, lo: &TowerElem) -> TowerElem {
        if lo.is_zero() {
            return TowerElem::zero();
        }
        if self.is_one(lo) {
            return hi.clone();
        }
        match hi {
            TowerElem::Rat(n) => TowerElem::Rat(Arc::new(RatNode {
                slot: n.slot,
                num: poly::scale(self, &n.num, lo),
                den: n.den.clone(),
            })),
            TowerElem::Alg(n) => TowerElem::Alg(Arc::new(AlgNode {
                slot: n.slot,
                coeffs: poly::scale(self, &n.coeffs, lo),
            })),
            TowerElem::Const(_) => unreachable!(),
        }
    }

    /// `e^n` for an integer `n` (negative powers need `e ≠ 0`).
    pub fn powi(&self, e: &TowerElem, n: i64) -> Result<TowerElem, TowerError> {
        Field::powi(self, e, n).ok_or(TowerError::DivisionByZero)
    }

    /// Checked quotient.
    pub fn div_checked(&self, a: &TowerElem, b: &TowerElem) -> Result<TowerElem, TowerError> {
        self.div(a, b).ok_or(TowerError::DivisionByZero)
    }

    // -----------------------------------------------------------------
    // Derivation.

    /// The derivation of the tower.
    pub fn derive(&self, e: &TowerElem) -> TowerElem {
        match e {
            TowerElem::Const(_) => TowerElem::zero(),
            TowerElem::Rat(n) => {
                let dn = self.derive_poly(n.slot, &n.num);
                if n.den.len() == 1 {
                    return dn;
                }
                let dd = self.derive_poly(n.slot, &n.den);
                if let (Some(dn), Some(dd)) = (self.slot_poly(&dn, n.slot), self.slot_poly(&dd, n.slot)) {
                    return self.derive_fraction(n.slot, &n.num, &n.den, &dn, &dd);
                }
                let den = self.from_slot_poly(n.slot, n.den.clone());
                let top = self.sub(&dn, &self.mul(e, &dd));
                self.div(&top, &den).unwrap()
            }
            TowerElem::Alg(n) => self.derive_poly(n.slot, &n.coeffs),
        }
    }

    /// `(N/D)′` for coprime `N`, `D` whose derivatives `dn`, `dd` are
    /// polynomials in the same generator. With `G = gcd(D, D′)` and
    /// `D = G·D1`, the derivative is `T / (G·D1²)` where
    /// `T = N′·D1 − N·D′/G`; only factors `P` with `P | P′` can survive in
    /// both `T` and the denominator, and those all divide `G`.
    fn derive_fraction(
        &self,
        slot: usize,
        num: &[TowerElem],
        den: &[TowerElem],
        dn: &[TowerElem],
        dd: &[TowerElem],
    ) -> TowerElem {
        let g = poly::gcd(self, den, dd);
        let d1 = poly::exact_div(self, den, &g);
        let top = poly::sub(
            self,
            &poly::mul(self, dn, &d1),
            &poly::mul(self, num, &poly::exact_div(self, dd, &g)),
        );
        let h = poly::gcd(self, &top, &g);
        let bottom = poly::mul(self, &poly::exact_div(self, &g, &h), &poly::mul(self, &d1, &d1));
        self.make_rat_coprime(slot, poly::exact_div(self, &top, &h), bottom)
    }

    /// Derivative of `Σ p[i] g^i` for the generator `g` of `slot`.
    pub fn derive_poly(&self, slot: usize, p: &[TowerElem]) -> TowerElem {
        let coeff_part: Vec<TowerElem> = p.iter().map(|c| self.derive(c)).collect();
        // The derivative of a coefficient may involve this very slot (θ′ of a
        // Weierstrass level), in which case it must be multiplied out.
        let coeff_part = if coeff_part.iter().all(|c| c.slot().is_none_or(|s| s < slot)) {
            self.from_slot_poly(slot, coeff_part)
        } else {
            poly::eval(self, &coeff_part, &self.gen(slot))
        };
        let formal = poly::derivative(self, p);
        if formal.is_empty() {
            return coeff_part;
        }
        let formal = self.from_slot_poly(slot, formal);
        self.add(&coeff_part, &self.mul(&formal, &self.slots[slot].derivative))
    }

    /// Logarithmic derivative `e′/e`.
    pub fn logderiv(&self, e: &TowerElem) -> Result<TowerElem, TowerError> {
        if e.is_zero() {
            return Err(TowerError::ZeroArgument);
        }
        if let TowerElem::Rat(n) = e {
            // Sum of the logarithmic derivatives of numerator and denominator
            // avoids forming the quotient of two large expressions.
            let num = self.from_slot_poly(n.slot, n.num.clone());
            let den = self.from_slot_poly(n.slot, n.den.clone());
            if !den.is_zero() && n.den.len() > 1 {
                let a = self.div(&self.derive(&num), &num).unwrap();
                let b = self.div(&self.derive(&den), &den).unwrap();
                return Ok(self.sub(&a, &b));
            }
        }
        Ok(self.div(&self.derive(e), e).unwrap())
    }

    /// Derivative of an algebraic generator from its minimal polynomial:
    /// `θ′ = −m^δ(θ) / m_Y(θ)`.
    pub(super) fn algebraic_derivative(&self, slot: usize) -> TowerElem {
        let SlotKind::Algebraic(m) = &self.slots[slot].kind else {
            unreachable!()
        };
        let md: Vec<TowerElem> = m.iter().map(|c| self.derive(c)).collect();
        let md = self.from_slot_poly(slot, md);
        let my = self.from_slot_poly(slot, poly::derivative(self, m));
        self.neg(&self.div(&md, &my).expect("separable minimal polynomial"))
    }

    // -----------------------------------------------------------------
    // Trace and norm.

    /// Trace and norm of `e` over the field below the algebraic `slot`.
    pub fn trace_norm(&self, e: &TowerElem, slot: usize) -> Result<(TowerElem, TowerElem), TowerError> {
        let SlotKind::Algebraic(m) = &self.slots[slot].kind else {
            return Err(TowerError::NotAlgebraic(self.slots[slot].name.clone()));
        };
        let d = m.len() - 1;
        if !e.within(slot) {
            return Err(TowerError::NotInLevel(self.obstruction(e, slot)));
        }
        if e.slot() != Some(slot) {
            let tr = self.mul(&TowerElem::from_i64(d as i64), e);
            return Ok((tr, self.pow(e, d as u32)));
        }
        let TowerElem::Alg(n) = e else { unreachable!() };
        let sums = self.power_sums(m);
        let mut tr = TowerElem::zero();
        for (c, p) in n.coeffs.iter().zip(&sums) {
            tr = self.add(&tr, &self.mul(c, p));
        }
        let nr = poly::resultant(self, m, &n.coeffs);
        Ok((tr, nr))
    }

    /// Power sums `p_0 … p_{d-1}` of the roots of a monic polynomial.
    fn power_sums(&self, m: &[TowerElem]) -> Vec<TowerElem> {
        let d = m.len() - 1;
        // a(j) = coefficient of Y^(d-j) (elementary data, a(0) = 1).
        let a = |j: usize| m[d - j].clone();
        let mut p = vec![TowerElem::from_i64(d as i64)];
        for k in 1..d {
            let mut acc = self.mul(&TowerElem::from_i64(k as i64), &a(k));
            for i in 1..k {
                acc = self.add(&acc, &self.mul(&a(i), &p[k - i]));
            }
            p.push(self.neg(&acc));
        }
        p
    }

    // -----------------------------------------------------------------
    // Levels.

    /// Largest slot belonging to `level`.
    pub fn top_slot(&self, level: usize) -> usize {
        self.levels[level].slots.end - 1
    }

    /// The lowest level containing `e`.
    pub fn level_of(&self, e: &TowerElem) -> usize {
        match e.slot() {
            None => 0,
            Some(s) => self.slots[s].level,
        }
    }

    fn obstruction(&self, e: &TowerElem, limit: usize) -> String {
        let s = e
            .support()
            .into_iter()
            .find(|&s| s > limit)
            .expect("element above the limit");
        self.slots[s].name.clone()
    }

    /// Re-expresses `e` at `level`, or names the first generator above that
    /// level on which `e` genuinely depends.
    pub fn coerce_down(&self, e: &TowerElem, level: usize) -> Result<TowerElem, NotInLevel> {
        let limit = self.top_slot(level);
        if e.within(limit) {
            Ok(e.clone())
        } else {
            Err(NotInLevel {
                generator: self.obstruction(e, limit),
            })
        }
    }

    /// Same as [`Tower::coerce_down`] with a slot bound.
    pub fn coerce_to_slot(&self, e: &TowerElem, limit: usize) -> Result<TowerElem, NotInLevel> {
        if e.within(limit) {
            Ok(e.clone())
        } else {
            Err(NotInLevel {
                generator: self.obstruction(e, limit),
            })
        }
    }

    /// A deterministic "leading constant": dividing by it normalizes an
    /// argument of a logarithmic derivative without changing `u′/u`.
    pub fn leading_constant(&self, e: &TowerElem) -> AlgNumber {
        match e {
            TowerElem::Const(c) => c.clone(),
            TowerElem::Rat(n) => self.leading_constant(n.num.last().unwrap()),
            TowerElem::Alg(n) => self.leading_constant(n.coeffs.last().unwrap()),
        }
    }

    /// `e` divided by its leading constant.
    pub fn monic_normalize(&self, e: &TowerElem) -> TowerElem {
        let c = self.leading_constant(e);
        if Consts.is_one(&c) || c.is_zero() {
            return e.clone();
        }
        self.mul(e, &TowerElem::Const(Consts.inv(&c).unwrap()))
    }
}

/// Result of a failed [`Tower::coerce_down`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotInLevel {
    pub generator: String,
}

impl std::fmt::Display for NotInLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "element depends on {}", self.generator)
    }
}

impl Field for Tower {
    type Elem = TowerElem;

    fn zero(&self) -> TowerElem {
        TowerElem::zero()
    }

    fn one(&self) -> TowerElem {
        TowerElem::one()
    }

    fn is_zero(&self, a: &TowerElem) -> bool {
        a.is_zero()
    }

    fn is_one(&self, a: &TowerElem) -> bool {
        matches!(a, TowerElem::Const(c) if Consts.is_one(c))
    }

    fn add(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let s = max_slot(a, b);
        let Some(s) = s else {
            let (TowerElem::Const(x), TowerElem::Const(y)) = (a, b) else {
                unreachable!()
            };
            return TowerElem::Const(Consts.add(x, y));
        };
        if a.slot() != Some(s) {
            return self.add_lower(b, a);
        }
        if b.slot() != Some(s) {
            return self.add_lower(a, b);
        }
        match (a, b) {
            (TowerElem::Rat(x), TowerElem::Rat(y)) => {
                if x.den == y.den {
                    let num = poly::add(self, &x.num, &y.num);
                    if x.den.len() == 1 {
                        return self.make_rat_coprime(s, num, x.den.clone());
                    }
                    return self.make_rat(s, num, x.den.clone());
                }
                let g = poly::gcd(self, &x.den, &y.den);
                if g.len() == 1 {
                    let num = poly::add(self, &poly::mul(self, &x.num, &y.den), &poly::mul(self, &y.num, &x.den));
                    let den = poly::mul(self, &x.den, &y.den);
                    self.make_rat_coprime(s, num, den)
                } else {
                    let xd = poly::exact_div(self, &x.den, &g);
                    let yd = poly::exact_div(self, &y.den, &g);
                    let num = poly::add(self, &poly::mul(self, &x.num, &yd), &poly::mul(self, &y.num, &xd));
                    let den = poly::mul(self, &poly::mul(self, &xd, &yd), &g);
                    self.make_rat(s, num, den)
                }
            }
            (TowerElem::Alg(x), TowerElem::Alg(y)) => self.make_alg(s, poly::add(self, &x.coeffs, &y.coeffs)),
            _ => unreachable!("slot kinds are fixed"),
        }
    }

    fn sub(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        self.add(a, &self.neg(b))
    }

    fn neg(&self, a: &TowerElem) -> TowerElem {
        match a {
            TowerElem::Const(c) => TowerElem::Const(Consts.neg(c)),
            TowerElem::Rat(n) => TowerElem::Rat(Arc::new(RatNode {
                slot: n.slot,
                num: n.num.iter().map(|c| self.neg(c)).collect(),
                den: n.den.clone(),
            })),
            TowerElem::Alg(n) => TowerElem::Alg(Arc::new(AlgNode {
                slot: n.slot,
                coeffs: n.coeffs.iter().map(|c| self.neg(c)).collect(),
            })),
        }
    }

    fn mul(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let Some(s) = max_slot(a, b) else {
            let (TowerElem::Const(x), TowerElem::Const(y)) = (a, b) else {
                unreachable!()
            };
            return TowerElem::Const(Consts.mul(x, y));
        };
        if a.slot() != Some(s) {
            return self.mul_lower(b, a);
        }
        if b.slot() != Some(s) {
            return self.mul_lower(a, b);
        }
        match (a, b) {
            (TowerElem::Rat(x), TowerElem::Rat(y)) => {
                let g1 = poly::gcd(self, &x.num, &y.den);
                let g2 = poly::gcd(self, &y.num, &x.den);
                let (n1, d2) = if g1.len() > 1 {
                    (poly::exact_div(self, &x.num, &g1), poly::exact_div(self, &y.den, &g1))
                } else {
                    (x.num.clone(), y.den.clone())
                };
                let (n2, d1) = if g2.len() > 1 {
                    (poly::exact_div(self, &y.num, &g2), poly::exact_div(self, &x.den, &g2))
                } else {
                    (y.num.clone(), x.den.clone())
                };
                self.make_rat_coprime(s, poly::mul(self, &n1, &n2), poly::mul(self, &d1, &d2))
            }
            (TowerElem::Alg(x), TowerElem::Alg(y)) => self.from_slot_poly(s, poly::mul(self, &x.coeffs, &y.coeffs)),
            _ => unreachable!("slot kinds are fixed"),
        }
    }

    fn inv(&self, a: &TowerElem) -> Option<TowerElem> {
        match a {
            TowerElem::Const(c) => Consts.inv(c).map(TowerElem::Const),
            TowerElem::Rat(n) => Some(self.make_rat_coprime(n.slot, n.den.clone(), n.num.clone())),
            TowerElem::Alg(n) => {
                let SlotKind::Algebraic(m) = &self.slots[n.slot].kind else {
                    unreachable!()
                };
                let (g, s, _) = poly::ext_gcd(self, &n.coeffs, m);
                assert_eq!(
                    g.len(),
                    1,
                    "minimal polynomial of {} is reducible",
                    self.slots[n.slot].name
                );
                Some(self.make_alg(n.slot, s))
            }
        }
    }

    fn from_rational(&self, q: &Rational) -> TowerElem {
        TowerElem::rational(q.clone())
    }
}
