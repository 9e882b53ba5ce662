//! Algebraic number fields, extended lazily.
//!
//! A [`NumberField`] is `Q(g)` for a primitive element `g` with a monic
//! irreducible minimal polynomial over Q. Fields created by adjoining a root
//! over an existing field remember that parent together with the image of
//! the parent's generator, so values coerce upward along the chain. Two
//! fields are the same field when their minimal polynomials agree.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::factor::{self, compare_polys};
use super::field::{format_rational, int, Field, Rational, Q};
use super::poly::{self, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumberFieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("values lie in unrelated number fields")]
    FieldMismatch,
    #[error("cannot adjoin a root of a constant polynomial")]
    ConstantPolynomial,
}

#[derive(Debug)]
pub struct NumberField {
    minpoly: Vec<Rational>,
    parent: Option<(Arc<NumberField>, Vec<Rational>)>,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly
    }
}

impl NumberField {
    /// A field with no recorded parent. `minpoly` must be monic and
    /// irreducible over Q of degree at least 2.
    pub fn new(minpoly: Vec<Rational>) -> Arc<NumberField> {
        debug_assert!(minpoly.len() >= 3 && minpoly.last().unwrap().is_one());
        Arc::new(NumberField { minpoly, parent: None })
    }

    /// Builds `Q[X]/(m)` after checking that `m` is irreducible of degree ≥ 2.
    pub fn from_minpoly(m: &[Rational]) -> Option<Arc<NumberField>> {
        if m.len() < 3 {
            return None;
        }
        let m = poly::monic(&Q, m);
        let facs = factor::factor_q(&m);
        if facs.len() != 1 || facs[0].1 != 1 {
            return None;
        }
        Some(NumberField::new(m))
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minpoly(&self) -> &[Rational] {
        &self.minpoly
    }

    pub fn parent(&self) -> Option<&Arc<NumberField>> {
        self.parent.as_ref().map(|(p, _)| p)
    }

    /// Coordinates of the parent's generator in this field's power basis.
    pub fn parent_image(&self) -> Option<&[Rational]> {
        self.parent.as_ref().map(|(_, image)| image.as_slice())
    }

    /// `Q[X]/(m)` as an extension of `parent`, whose generator maps to the
    /// element with coordinates `image`. Returns `None` if `m` is not
    /// irreducible or `image` is not a root of the parent's minimal
    /// polynomial.
    pub fn with_parent(m: &[Rational], parent: Arc<NumberField>, image: Vec<Rational>) -> Option<Arc<NumberField>> {
        let field = NumberField::from_minpoly(m)?;
        let image_el = AlgNumber::from_coords(&field, &image);
        let value = poly::eval_with::<Q, Consts>(&Consts, parent.minpoly(), &image_el, |q| AlgNumber::Rat(q.clone()));
        if !value.is_zero() {
            return None;
        }
        let mut image = image;
        image.resize(field.degree(), Rational::zero());
        Some(Arc::new(NumberField {
            minpoly: field.minpoly.clone(),
            parent: Some((parent, image)),
        }))
    }

    pub fn generator(self: &Arc<Self>) -> AlgNumber {
        AlgNumber::Alg(self.clone(), vec![Rational::zero(), Rational::one()])
    }

    /// Minimal polynomial printed in the variable `X`.
    pub fn minpoly_string(&self) -> String {
        format_poly(&self.minpoly, "X")
    }
}

/// Prints a rational polynomial such as `X^2 - 2`.
pub fn format_poly(p: &[Rational], var: &str) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if mono.is_empty() {
            out.push_str(&format_rational(&a));
        } else if a.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{}*{}", format_rational(&a), mono));
        }
    }
    out
}

/// An element of Q or of a number field.
#[derive(Clone, Debug, PartialEq)]
pub enum AlgNumber {
    Rat(Rational),
    /// Coordinates in the power basis of the field's generator; always has
    /// some nonzero coordinate beyond the constant one.
    Alg(Arc<NumberField>, Vec<Rational>),
}

impl From<Rational> for AlgNumber {
    fn from(q: Rational) -> Self {
        AlgNumber::Rat(q)
    }
}

impl AlgNumber {
    pub fn from_i64(n: i64) -> Self {
        AlgNumber::Rat(int(n))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, AlgNumber::Rat(q) if q.is_zero())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            AlgNumber::Rat(q) => Some(q),
            AlgNumber::Alg(..) => None,
        }
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        match self {
            AlgNumber::Rat(_) => None,
            AlgNumber::Alg(k, _) => Some(k),
        }
    }

    /// Builds a reduced element of `field` from generator coordinates.
    pub fn from_coords(field: &Arc<NumberField>, coords: &[Rational]) -> AlgNumber {
        let c = poly::trim(&Q, coords.to_vec());
        let c = if c.len() > field.degree() {
            poly::rem(&Q, &c, &field.minpoly)
        } else {
            c
        };
        demote(field, c)
    }

    /// Coordinates of length `field.degree()` (the value must lie in a
    /// subfield along `field`'s parent chain).
    pub fn coords_in(&self, field: &Arc<NumberField>) -> Option<Vec<Rational>> {
        let lifted = lift(self, field)?;
        let mut c = match lifted {
            AlgNumber::Rat(q) => poly::constant(&Q, q),
            AlgNumber::Alg(_, c) => c,
        };
        c.resize(field.degree(), Rational::zero());
        Some(c)
    }

    /// Prints the number as a polynomial in `var`, e.g. `1/2*rho + 3`.
    pub fn format_in(&self, var: &str) -> String {
        match self {
            AlgNumber::Rat(q) => format_rational(q),
            AlgNumber::Alg(_, c) => format_poly(c, var),
        }
    }

    /// Lexicographic comparison on coordinates (used for deterministic
    /// choices). Values are compared in the larger of the two fields.
    pub fn lex_cmp(&self, other: &AlgNumber) -> Ordering {
        match common_field(self, other) {
            Ok(None) => self.as_rational().cmp(&other.as_rational()),
            Ok(Some(k)) => self.coords_in(&k).cmp(&other.coords_in(&k)),
            Err(_) => Ordering::Equal,
        }
    }
}

impl fmt::Display for AlgNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_in("rho"))
    }
}

fn demote(field: &Arc<NumberField>, c: Vec<Rational>) -> AlgNumber {
    if c.len() <= 1 {
        AlgNumber::Rat(c.into_iter().next().unwrap_or_else(Rational::zero))
    } else {
        AlgNumber::Alg(field.clone(), c)
    }
}

/// Is `sub` equal to `field` or one of its ancestors?
pub fn is_subfield(sub: &Arc<NumberField>, field: &Arc<NumberField>) -> bool {
    let mut cur = Some(field);
    while let Some(k) = cur {
        if **k == **sub {
            return true;
        }
        cur = k.parent();
    }
    false
}

/// Coerces `a` into `target`, following `target`'s parent chain.
pub fn lift(a: &AlgNumber, target: &Arc<NumberField>) -> Option<AlgNumber> {
    match a {
        AlgNumber::Rat(_) => Some(a.clone()),
        AlgNumber::Alg(k, _) if **k == **target => Some(a.clone()),
        AlgNumber::Alg(..) => {
            let (parent, image) = target.parent.as_ref()?;
            let in_parent = lift(a, parent)?;
            let coords = match in_parent {
                AlgNumber::Rat(q) => return Some(AlgNumber::Rat(q)),
                AlgNumber::Alg(_, c) => c,
            };
            // Evaluate the parent coordinates at the image of its generator.
            let image_el = AlgNumber::from_coords(target, image);
            let ctx = Consts;
            let v = poly::eval_with::<Q, Consts>(&ctx, &coords, &image_el, |q| AlgNumber::Rat(q.clone()));
            Some(v)
        }
    }
}

/// The larger of the fields of `a` and `b` (`None` for Q).
pub fn common_field(a: &AlgNumber, b: &AlgNumber) -> Result<Option<Arc<NumberField>>, NumberFieldError> {
    match (a.field(), b.field()) {
        (None, None) => Ok(None),
        (Some(k), None) | (None, Some(k)) => Ok(Some(k.clone())),
        (Some(k), Some(l)) => {
            if is_subfield(k, l) {
                Ok(Some(l.clone()))
            } else if is_subfield(l, k) {
                Ok(Some(k.clone()))
            } else {
                Err(NumberFieldError::FieldMismatch)
            }
        }
    }
}

/// Largest field among a collection (`None` for Q).
pub fn join_fields<'a>(
    xs: impl IntoIterator<Item = &'a AlgNumber>,
) -> Result<Option<Arc<NumberField>>, NumberFieldError> {
    let mut acc: Option<Arc<NumberField>> = None;
    for x in xs {
        let cur = match &acc {
            None => AlgNumber::Rat(Rational::zero()),
            Some(k) => k.generator(),
        };
        acc = common_field(&cur, x)?;
    }
    Ok(acc)
}

/// Join of two optional fields.
pub fn join_two(
    a: &Option<Arc<NumberField>>,
    b: &Option<Arc<NumberField>>,
) -> Result<Option<Arc<NumberField>>, NumberFieldError> {
    let ga = a.as_ref().map(|k| k.generator()).unwrap_or(AlgNumber::from_i64(0));
    let gb = b.as_ref().map(|k| k.generator()).unwrap_or(AlgNumber::from_i64(0));
    common_field(&ga, &gb)
}

fn binary(
    a: &AlgNumber,
    b: &AlgNumber,
    op: impl Fn(&[Rational], &[Rational], &Arc<NumberField>) -> Vec<Rational>,
    rat: impl Fn(&Rational, &Rational) -> Rational,
) -> Result<AlgNumber, NumberFieldError> {
    match (a, b) {
        (AlgNumber::Rat(x), AlgNumber::Rat(y)) => Ok(AlgNumber::Rat(rat(x, y))),
        _ => {
            let k = common_field(a, b)?.expect("an algebraic operand");
            let ca = coords_poly(&lift(a, &k).unwrap());
            let cb = coords_poly(&lift(b, &k).unwrap());
            Ok(demote(&k, op(&ca, &cb, &k)))
        }
    }
}

fn coords_poly(a: &AlgNumber) -> Vec<Rational> {
    match a {
        AlgNumber::Rat(q) => poly::constant(&Q, q.clone()),
        AlgNumber::Alg(_, c) => c.clone(),
    }
}

pub fn try_add(a: &AlgNumber, b: &AlgNumber) -> Result<AlgNumber, NumberFieldError> {
    binary(a, b, |x, y, _| poly::add(&Q, x, y), |x, y| x + y)
}

pub fn try_sub(a: &AlgNumber, b: &AlgNumber) -> Result<AlgNumber, NumberFieldError> {
    binary(a, b, |x, y, _| poly::sub(&Q, x, y), |x, y| x - y)
}

pub fn try_mul(a: &AlgNumber, b: &AlgNumber) -> Result<AlgNumber, NumberFieldError> {
    binary(
        a,
        b,
        |x, y, k| poly::rem(&Q, &poly::mul(&Q, x, y), &k.minpoly),
        |x, y| x * y,
    )
}

pub fn try_inv(a: &AlgNumber) -> Result<AlgNumber, NumberFieldError> {
    match a {
        AlgNumber::Rat(q) if q.is_zero() => Err(NumberFieldError::DivisionByZero),
        AlgNumber::Rat(q) => Ok(AlgNumber::Rat(q.recip())),
        AlgNumber::Alg(k, c) => {
            let (g, s, _) = poly::ext_gcd(&Q, c, &k.minpoly);
            debug_assert_eq!(g.len(), 1, "minimal polynomial must be irreducible");
            Ok(demote(k, s))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Mul,
    Div,
}

/// Checked field arithmetic on algebraic numbers.
pub fn nf_arith(a: &AlgNumber, b: &AlgNumber, kind: ArithKind) -> Result<AlgNumber, NumberFieldError> {
    match kind {
        ArithKind::Add => try_add(a, b),
        ArithKind::Mul => try_mul(a, b),
        ArithKind::Div => try_mul(a, &try_inv(b)?),
    }
}

/// Field context over all algebraic numbers, coercing operands to their
/// common field. Panics if operands lie in unrelated fields; callers that
/// accept user data go through [`nf_arith`] instead.
#[derive(Clone, Copy, Debug, Default)]
pub struct Consts;

impl Field for Consts {
    type Elem = AlgNumber;

    fn zero(&self) -> AlgNumber {
        AlgNumber::Rat(Rational::zero())
    }
    fn one(&self) -> AlgNumber {
        AlgNumber::Rat(Rational::one())
    }
    fn is_zero(&self, a: &AlgNumber) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &AlgNumber, b: &AlgNumber) -> AlgNumber {
        try_add(a, b).expect("constants in unrelated number fields")
    }
    fn sub(&self, a: &AlgNumber, b: &AlgNumber) -> AlgNumber {
        try_sub(a, b).expect("constants in unrelated number fields")
    }
    fn neg(&self, a: &AlgNumber) -> AlgNumber {
        match a {
            AlgNumber::Rat(q) => AlgNumber::Rat(-q),
            AlgNumber::Alg(k, c) => AlgNumber::Alg(k.clone(), poly::neg(&Q, c)),
        }
    }
    fn mul(&self, a: &AlgNumber, b: &AlgNumber) -> AlgNumber {
        try_mul(a, b).expect("constants in unrelated number fields")
    }
    fn inv(&self, a: &AlgNumber) -> Option<AlgNumber> {
        try_inv(a).ok()
    }
    fn from_rational(&self, q: &Rational) -> AlgNumber {
        AlgNumber::Rat(q.clone())
    }
    fn is_one(&self, a: &AlgNumber) -> bool {
        matches!(a, AlgNumber::Rat(q) if q.is_one())
    }
}

// ---------------------------------------------------------------------------
// Factoring over number fields and root adjunction.

fn lift_poly(p: &[AlgNumber], k: &Option<Arc<NumberField>>) -> Vec<AlgNumber> {
    match k {
        None => p.to_vec(),
        Some(k) => p
            .iter()
            .map(|c| lift(c, k).expect("coefficient outside base field"))
            .collect(),
    }
}

fn rational_poly(p: &[AlgNumber]) -> Option<Vec<Rational>> {
    p.iter().map(|c| c.as_rational().cloned()).collect()
}

fn to_alg_poly(p: &[Rational]) -> Vec<AlgNumber> {
    p.iter().map(|c| AlgNumber::Rat(c.clone())).collect()
}

/// Norm over Q of a polynomial with coefficients in `k`, i.e.
/// `Res_Y(m(Y), p(X, Y))` computed by interpolation in X.
fn norm_poly(k: &Arc<NumberField>, p: &[AlgNumber]) -> Vec<Rational> {
    let n = k.degree();
    let deg = (p.len() - 1) * n;
    let xs: Vec<Rational> = (0..=deg as i64).map(int).collect();
    let ys: Vec<Rational> = xs
        .iter()
        .map(|x| {
            let v = poly::eval(&Consts, p, &AlgNumber::Rat(x.clone()));
            let c = coords_poly(&lift(&v, k).unwrap());
            if c.is_empty() {
                Rational::zero()
            } else {
                poly::resultant(&Q, &k.minpoly, &c)
            }
        })
        .collect();
    poly::interpolate(&Q, &xs, &ys)
}

fn shift_by(p: &[AlgNumber], a: &AlgNumber) -> Vec<AlgNumber> {
    poly::taylor_shift(&Consts, p, a)
}

/// Irreducible monic factors of a squarefree polynomial over `k`.
fn factor_squarefree_over(k: &Option<Arc<NumberField>>, p: &[AlgNumber]) -> Vec<Vec<AlgNumber>> {
    let p = poly::monic(&Consts, p);
    if p.len() <= 2 {
        return vec![p];
    }
    let field = match k {
        None => {
            let q = rational_poly(&p).expect("rational coefficients");
            return factor::factor_q(&q).into_iter().map(|(g, _)| to_alg_poly(&g)).collect();
        }
        Some(field) => field,
    };
    // Trager: shift so the norm is squarefree, factor the norm over Q and
    // pull the factors back by gcds.
    let gamma = field.generator();
    for s in shifts() {
        let shift = Consts.mul(&AlgNumber::from_i64(-s), &gamma);
        let shifted = shift_by(&p, &shift);
        let norm = norm_poly(field, &shifted);
        if poly::gcd(&Q, &norm, &poly::derivative(&Q, &norm)).len() != 1 {
            continue;
        }
        let back = Consts.neg(&shift);
        let mut out = vec![];
        for (nj, _) in factor::factor_q(&norm) {
            let g = poly::gcd(&Consts, &shifted, &to_alg_poly(&nj));
            if g.len() > 1 {
                out.push(shift_by(&g, &back));
            }
        }
        return out;
    }
    unreachable!("some shift yields a squarefree norm")
}

fn shifts() -> impl Iterator<Item = i64> {
    (0..).flat_map(|i: i64| if i == 0 { vec![0] } else { vec![i, -i] })
}

fn compare_alg_polys(a: &[AlgNumber], b: &[AlgNumber]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (x, y) in a.iter().rev().zip(b.iter().rev()) {
            let o = x.lex_cmp(y);
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    })
}

/// Monic irreducible factors over `k` with multiplicities, sorted by
/// degree and then lexicographically on coefficients.
pub fn factor_over(k: &Option<Arc<NumberField>>, p: &[AlgNumber]) -> Vec<(Vec<AlgNumber>, usize)> {
    let p = lift_poly(p, k);
    let mut out = vec![];
    for (part, mult) in poly::squarefree(&Consts, &p) {
        for g in factor_squarefree_over(k, &part) {
            out.push((g, mult));
        }
    }
    out.sort_by(|a, b| compare_alg_polys(&a.0, &b.0));
    out
}

/// Roots of `p` lying in `k` (distinct, in factor order).
pub fn roots_in(k: &Option<Arc<NumberField>>, p: &[AlgNumber]) -> Vec<AlgNumber> {
    factor_over(k, p)
        .into_iter()
        .filter(|(g, _)| g.len() == 2)
        .map(|(g, _)| Consts.neg(&g[0]))
        .collect()
}

/// Result of a root adjunction.
#[derive(Clone, Debug)]
pub struct Adjoined {
    /// The (possibly unchanged) ambient field.
    pub field: Option<Arc<NumberField>>,
    /// The designated root.
    pub root: AlgNumber,
}

/// Adjoins a root of a nonconstant polynomial to the field `base`.
///
/// The irreducible factor of lowest degree (ties broken lexicographically
/// on coefficients) supplies the root; a linear factor leaves the field
/// unchanged.
pub fn adjoin_root(base: &Option<Arc<NumberField>>, p: &[AlgNumber]) -> Result<Adjoined, NumberFieldError> {
    let base = join_two(base, &join_fields(p.iter())?)?;
    if p.len() < 2 {
        return Err(NumberFieldError::ConstantPolynomial);
    }
    let factors = factor_over(&base, p);
    let q = &factors[0].0;
    if q.len() == 2 {
        return Ok(Adjoined {
            field: base,
            root: Consts.neg(&q[0]),
        });
    }
    Ok(match &base {
        None => adjoin_over_q(&rational_poly(q).unwrap()),
        Some(k) => adjoin_over_field(k, q),
    })
}

/// Primitive squarefree integer `d` and rational `f` with `x = f^2 * d`.
fn squarefree_integer_split(x: &Rational) -> (BigInt, Rational) {
    // x = n/m = n*m / m^2.
    let nm = x.numer() * x.denom();
    let sign = if nm.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    let mut rest = nm.abs();
    let mut square = BigInt::one();
    let mut d = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let pp = &p * &p;
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            square *= &p;
        }
        if (&rest % &p).is_zero() {
            rest /= &p;
            d *= &p;
        }
        p += 1;
    }
    d *= rest;
    (sign * d, Rational::new(square, x.denom().clone()))
}

fn adjoin_over_q(q: &[Rational]) -> Adjoined {
    if q.len() == 3 {
        // X^2 + bX + c: root (-b + sqrt(b^2 - 4c)) / 2 in Q(sqrt(d)).
        let b = &q[1];
        let c = &q[0];
        let disc = b * b - int(4) * c;
        let (d, f) = squarefree_integer_split(&disc);
        let k = NumberField::new(vec![Rational::from_integer(-d), Rational::zero(), Rational::one()]);
        let root = AlgNumber::from_coords(&k, &[-b / int(2), f / int(2)]);
        return Adjoined { field: Some(k), root };
    }
    // Scale to a monic integer polynomial: Y = L*X.
    let l = q.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let lq = Rational::from_integer(l.clone());
    let n = q.len() - 1;
    let scaled: Vec<Rational> = q
        .iter()
        .enumerate()
        .map(|(i, c)| c * pow_rat(&lq, (n - i) as u32))
        .collect();
    let k = NumberField::new(scaled);
    let root = AlgNumber::from_coords(&k, &[Rational::zero(), lq.recip()]);
    Adjoined { field: Some(k), root }
}

fn pow_rat(q: &Rational, e: u32) -> Rational {
    Q.pow(q, e)
}

/// Adjoins a root of an irreducible `q` (degree ≥ 2) over `k` via a
/// primitive element `delta = beta + s*gamma`.
fn adjoin_over_field(k: &Arc<NumberField>, q: &[AlgNumber]) -> Adjoined {
    let gamma = k.generator();
    for s in shifts().filter(|&s| s != 0) {
        let shift = Consts.mul(&AlgNumber::from_i64(-s), &gamma);
        let shifted = shift_by(q, &shift);
        let norm = norm_poly(k, &shifted);
        if poly::gcd(&Q, &norm, &poly::derivative(&Q, &norm)).len() != 1 {
            continue;
        }
        let Adjoined {
            field: Some(big),
            root: delta,
        } = adjoin_over_q(&poly::monic(&Q, &norm))
        else {
            unreachable!()
        };
        // gamma is the common root of m(Y) and q(delta - s*Y).
        let m = to_alg_poly(k.minpoly());
        let lin = vec![delta.clone(), AlgNumber::from_i64(-s)];
        let mut composed: Vec<AlgNumber> = vec![];
        for c in q.iter().rev() {
            let cy = to_alg_poly(&coords_poly(c));
            composed = poly::add(&Consts, &poly::mul(&Consts, &composed, &lin), &cy);
        }
        let g = poly::gcd(&Consts, &m, &composed);
        assert_eq!(g.len(), 2, "primitive element construction failed");
        let gamma_hat = Consts.neg(&g[0]);
        let beta = Consts.sub(&delta, &Consts.mul(&AlgNumber::from_i64(s), &gamma_hat));
        let gamma_coords = gamma_hat.coords_in(&big).expect("image lies in the new field");
        let field = Arc::new(NumberField {
            minpoly: big.minpoly.clone(),
            parent: Some((k.clone(), gamma_coords)),
        });
        let root = AlgNumber::from_coords(&field, &beta.coords_in(&big).unwrap());
        return Adjoined {
            field: Some(field),
            root,
        };
    }
    unreachable!()
}

/// Adjoins roots until `p` splits into linear factors. Returns the final
/// field and all roots with multiplicity, in a deterministic order.
pub fn split(
    base: &Option<Arc<NumberField>>,
    p: &[AlgNumber],
) -> Result<(Option<Arc<NumberField>>, Vec<(AlgNumber, usize)>), NumberFieldError> {
    let mut field = join_two(base, &join_fields(p.iter())?)?;
    loop {
        let facs = factor_over(&field, p);
        if let Some((g, _)) = facs.iter().find(|(g, _)| g.len() > 2) {
            field = adjoin_root(&field, g)?.field;
            continue;
        }
        let roots = facs.into_iter().map(|(g, m)| (Consts.neg(&g[0]), m)).collect();
        return Ok((field, roots));
    }
}

/// Square-free decomposition and factorization over Q in one call, for
/// polynomials with rational coefficients.
pub fn factor_rational(p: &Poly<Rational>) -> Vec<(Poly<Rational>, usize)> {
    let mut v = factor::factor_q(p);
    v.sort_by(|a, b| compare_polys(&a.0, &b.0));
    v
}
