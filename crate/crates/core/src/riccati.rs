//! Rational solutions of the Riccati equation `u′ + u² = r u + s` over `C(x)`.
//!
//! The substitution `u = v + r/2` turns the equation into `v′ + v² = q` with
//! `q = s + r²/4 − r′/2`, whose rational solutions are exactly the
//! logarithmic derivatives of the hyperexponential solutions `P·exp(∫ω)`
//! of `z″ = q z` with `ω ∈ C(x)` and `P` a polynomial. The search follows
//! the first case of Kovacic's algorithm: local exponents at each pole of
//! `q` and at infinity determine finitely many candidates `ω` together with
//! a degree bound for `P`, and `P` is then found by linear algebra. The
//! search is complete, so an empty answer certifies that no rational
//! solution exists. Algebraic constants (poles, square roots of leading
//! coefficients, indicial roots) are adjoined as needed.

use std::sync::Arc;

use num_traits::{Signed, ToPrimitive};

use crate::algebra::field::{rat, Field};
use crate::algebra::linalg;
use crate::algebra::numfield::{self, AlgNumber, Consts, NumberField};
use crate::algebra::poly::{self, Poly};
use crate::algebra::ratfunc::RatFunc;

type Rf = RatFunc<AlgNumber>;
type P = Poly<AlgNumber>;

/// The equation `u′ + u² = r u + s`, i.e. the zeros of the Riccati
/// polynomial `R(X) = X′ + X² − r X − s` in `C(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RiccatiProblem {
    pub r: Rf,
    pub s: Rf,
}

impl RiccatiProblem {
    /// `R(u) = u′ + u² − r u − s`.
    pub fn residual(&self, u: &Rf) -> Rf {
        let k = &Consts;
        u.derivative(k)
            .add(k, &u.mul(k, u))
            .sub(k, &self.r.mul(k, u))
            .sub(k, &self.s)
    }

    /// The normal-form potential `q = s + r²/4 − r′/2`.
    pub fn potential(&self) -> Rf {
        let k = &Consts;
        let quarter = AlgNumber::Rat(rat(1, 4));
        let half = AlgNumber::Rat(rat(1, 2));
        self.s
            .add(k, &self.r.mul(k, &self.r).scale(k, &quarter))
            .sub(k, &self.r.derivative(k).scale(k, &half))
    }
}

/// A one-parameter (projective) family `u = base + P′/P` for every nonzero
/// `P` in the span of `basis`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionFamily {
    pub base: Rf,
    pub basis: Vec<P>,
}

impl SolutionFamily {
    /// The member for `P = Σ coeffs[i] basis[i]`; `None` if `P = 0`.
    pub fn member(&self, coeffs: &[AlgNumber]) -> Option<Rf> {
        let k = &Consts;
        let p = self
            .basis
            .iter()
            .zip(coeffs)
            .fold(vec![], |acc, (b, c)| poly::add(k, &acc, &poly::scale(k, b, c)));
        if p.is_empty() {
            return None;
        }
        let ld = Rf::new(k, poly::derivative(k, &p), p).unwrap();
        Some(self.base.add(k, &ld))
    }

    /// Whether `u` belongs to the family.
    pub fn contains(&self, u: &Rf) -> bool {
        let k = &Consts;
        // u = base + P'/P exactly when P' - (u - base) P = 0, a linear
        // condition on the coordinates of P in the basis.
        let w = u.sub(k, &self.base);
        let rows: Vec<Vec<AlgNumber>> = {
            let cols: Vec<Rf> = self
                .basis
                .iter()
                .map(|b| {
                    let bp = Rf::from_poly(k, b.clone());
                    Rf::from_poly(k, poly::derivative(k, b)).sub(k, &w.mul(k, &bp))
                })
                .collect();
            to_linear_system(&cols)
        };
        !linalg::nullspace(k, &rows, self.basis.len()).is_empty()
    }
}

/// Result of the rational-solution search.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RiccatiSolutions {
    /// Constant field in which the solutions are expressed.
    pub field: Option<Arc<NumberField>>,
    /// Distinct solutions found (one per basis vector of every family).
    pub solutions: Vec<Rf>,
    /// Families of solutions with a free constant.
    pub families: Vec<SolutionFamily>,
}

impl RiccatiSolutions {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Whether `u` is among the solutions or in one of the families.
    pub fn contains(&self, u: &Rf) -> bool {
        self.solutions.contains(u) || self.families.iter().any(|f| f.contains(u))
    }
}

/// Local data at a singular point: the admissible `(exponent, part of ω)`
/// choices.
type LocalChoices = Vec<(AlgNumber, Rf)>;

struct Search {
    field: Option<Arc<NumberField>>,
}

impl Search {
    fn sqrt(&mut self, a: &AlgNumber) -> AlgNumber {
        if a.is_zero() {
            return a.clone();
        }
        let k = &Consts;
        let (field, roots) =
            numfield::split(&self.field, &[k.neg(a), k.zero(), k.one()]).expect("constants in one tower");
        self.field = field;
        roots[0].0.clone()
    }

    /// `½ ± ½√(1 + 4b)`.
    fn indicial(&mut self, b: &AlgNumber) -> [AlgNumber; 2] {
        let k = &Consts;
        let half = AlgNumber::Rat(rat(1, 2));
        let root = self.sqrt(&k.add(&k.one(), &k.mul(&AlgNumber::from_i64(4), b)));
        let h = k.mul(&half, &root);
        [k.add(&half, &h), k.sub(&half, &h)]
    }

    /// Series square root `S` with `S² = Q` to `n` terms (`Q[0] ≠ 0`).
    fn series_sqrt(&mut self, q: &[AlgNumber], n: usize) -> Vec<AlgNumber> {
        let k = &Consts;
        let s0 = self.sqrt(&q[0]);
        let two_s0_inv = k.inv(&k.mul(&AlgNumber::from_i64(2), &s0)).unwrap();
        let mut s = vec![s0];
        for j in 1..n {
            let mut acc = poly::coeff(k, q, j);
            for i in 1..j {
                acc = k.sub(&acc, &k.mul(&s[i], &s[j - i]));
            }
            s.push(k.mul(&acc, &two_s0_inv));
        }
        s
    }

    fn pole_choices(&mut self, c: &AlgNumber, order: usize, q: &Rf) -> Option<LocalChoices> {
        let k = &Consts;
        let lin = Rf::new(k, poly::one(k), poly::linear(k, c)).unwrap();
        match order {
            1 => Some(vec![(k.one(), lin)]),
            2 => {
                let series = laurent_at(q, c, order, 1);
                let alphas = self.indicial(&series[0]);
                Some(alphas.into_iter().map(|a| (a.clone(), lin.scale(k, &a))).collect())
            }
            _ if order % 2 == 1 => None,
            _ => {
                let nu = order / 2;
                let series = laurent_at(q, c, order, nu);
                let s = self.series_sqrt(&series, nu);
                // [√q]_c = Σ_{i<ν-1} s_i (x-c)^{i-ν}; b/a = 2 s_{ν-1}.
                let shift = poly::taylor_shift(k, &s[..nu - 1], &k.neg(c));
                let den = poly::pow(k, &poly::linear(k, c), nu as u32);
                let sqrt_part = Rf::new(k, shift, den).unwrap();
                let nu_half = AlgNumber::Rat(rat(nu as i64, 2));
                let mut out = vec![];
                for sign in [1i64, -1] {
                    let sg = AlgNumber::from_i64(sign);
                    let alpha = k.add(&nu_half, &k.mul(&sg, &s[nu - 1]));
                    let part = sqrt_part.scale(k, &sg).add(k, &lin.scale(k, &alpha));
                    out.push((alpha, part));
                }
                Some(out)
            }
        }
    }

    fn infinity_choices(&mut self, q: &Rf) -> Option<LocalChoices> {
        let k = &Consts;
        if q.is_zero() {
            return Some(vec![(k.zero(), Rf::zero(k)), (k.one(), Rf::zero(k))]);
        }
        let o = q.den.len() as i64 - q.num.len() as i64;
        if o > 2 {
            return Some(vec![(k.zero(), Rf::zero(k)), (k.one(), Rf::zero(k))]);
        }
        if o == 2 {
            let b = k.div(q.num.last().unwrap(), q.den.last().unwrap()).unwrap();
            return Some(self.indicial(&b).into_iter().map(|a| (a, Rf::zero(k))).collect());
        }
        if o % 2 != 0 {
            return None;
        }
        let nu = (-o / 2) as usize;
        // q(1/t) t^{-2ν} = rev(num)/rev(den) as a power series in t.
        let rn: Vec<AlgNumber> = q.num.iter().rev().cloned().collect();
        let rd: Vec<AlgNumber> = q.den.iter().rev().cloned().collect();
        let series = series_div(&rn, &rd, nu + 2);
        let s = self.series_sqrt(&series, nu + 2);
        // [√q]_∞ = Σ_{i≤ν} s_i x^{ν-i}; b/a = 2 s_{ν+1}.
        let sqrt_part: P = poly::trim(k, (0..=nu).map(|j| s[nu - j].clone()).collect());
        let sqrt_part = Rf::from_poly(k, sqrt_part);
        let neg_nu_half = AlgNumber::Rat(rat(-(nu as i64), 2));
        let mut out = vec![];
        for sign in [1i64, -1] {
            let sg = AlgNumber::from_i64(sign);
            let alpha = k.add(&neg_nu_half, &k.mul(&sg, &s[nu + 1]));
            out.push((alpha, sqrt_part.scale(k, &sg)));
        }
        Some(out)
    }
}

/// Laurent coefficients of `q` at `x = c`, normalized so that `out[0]` is
/// the coefficient of `(x - c)^{-order}`; `n` terms.
fn laurent_at(q: &Rf, c: &AlgNumber, order: usize, n: usize) -> Vec<AlgNumber> {
    let k = &Consts;
    let num = poly::taylor_shift(k, &q.num, c);
    let den = poly::taylor_shift(k, &q.den, c);
    debug_assert_eq!(poly::low_order(k, &den), Some(order));
    series_div(&num, &den[order..], n)
}

/// First `n` power-series coefficients of `a / b` (`b[0] ≠ 0`).
fn series_div(a: &[AlgNumber], b: &[AlgNumber], n: usize) -> Vec<AlgNumber> {
    let k = &Consts;
    let b0_inv = k.inv(&b[0]).expect("nonzero constant term");
    let mut out: Vec<AlgNumber> = vec![];
    for j in 0..n {
        let mut acc = poly::coeff(k, a, j);
        for i in 1..=j.min(b.len().saturating_sub(1)) {
            acc = k.sub(&acc, &k.mul(&b[i], &out[j - i]));
        }
        out.push(k.mul(&acc, &b0_inv));
    }
    out
}

/// Coefficient matrix (rows = powers of x) of the numerators of `cols`
/// brought over a common denominator.
fn to_linear_system(cols: &[Rf]) -> Vec<Vec<AlgNumber>> {
    let k = &Consts;
    let common = cols.iter().fold(poly::one(k), |acc, c| {
        let g = poly::gcd(k, &acc, &c.den);
        poly::mul(k, &acc, &poly::exact_div(k, &c.den, &g))
    });
    let nums: Vec<P> = cols
        .iter()
        .map(|c| poly::mul(k, &c.num, &poly::exact_div(k, &common, &c.den)))
        .collect();
    let rows = nums.iter().map(|n| n.len()).max().unwrap_or(0);
    (0..rows)
        .map(|i| nums.iter().map(|n| poly::coeff(k, n, i)).collect())
        .collect()
}

fn nonnegative_integer(a: &AlgNumber) -> Option<usize> {
    let q = a.as_rational()?;
    (q.is_integer() && !q.is_negative())
        .then(|| q.to_integer().to_usize())
        .flatten()
}

/// Polynomial solutions of degree ≤ `d` of `P″ + 2ωP′ + (ω′ + ω² − q)P = 0`.
fn polynomial_solutions(omega: &Rf, q: &Rf, d: usize) -> Vec<P> {
    let k = &Consts;
    let two_omega = omega.scale(k, &AlgNumber::from_i64(2));
    let zeroth = omega.derivative(k).add(k, &omega.mul(k, omega)).sub(k, q);
    let cols: Vec<Rf> = (0..=d)
        .map(|j| {
            let p = poly::monomial(k, k.one(), j);
            let p1 = Rf::from_poly(k, poly::derivative(k, &p));
            let p2 = Rf::from_poly(k, poly::derivative(k, &poly::derivative(k, &p)));
            p2.add(k, &two_omega.mul(k, &p1))
                .add(k, &zeroth.mul(k, &Rf::from_poly(k, p)))
        })
        .collect();
    let m = to_linear_system(&cols);
    if m.is_empty() {
        // Every column vanishes identically.
        return (0..=d).map(|j| poly::monomial(k, k.one(), j)).collect();
    }
    linalg::nullspace(k, &m, d + 1)
        .into_iter()
        .map(|v| poly::trim(k, v))
        .collect()
}

/// All rational solutions of the Riccati equation.
pub fn rational_solutions(p: &RiccatiProblem) -> RiccatiSolutions {
    let k = &Consts;
    let q = p.potential();
    let start = numfield::join_fields(p.r.num.iter().chain(&p.r.den).chain(&p.s.num).chain(&p.s.den))
        .expect("constants in one tower");
    let mut search = Search { field: start };
    let mut out = RiccatiSolutions::default();

    // Poles of q with their orders.
    let mut poles: Vec<(AlgNumber, usize)> = vec![];
    for (factor, mult) in poly::squarefree(k, &q.den) {
        let (field, roots) = numfield::split(&search.field, &factor).expect("constants in one tower");
        search.field = field;
        poles.extend(roots.into_iter().map(|(c, _)| (c, mult)));
    }
    let mut local: Vec<LocalChoices> = vec![];
    for (c, order) in &poles {
        match search.pole_choices(c, *order, &q) {
            Some(ch) => local.push(ch),
            None => {
                out.field = search.field;
                return out;
            }
        }
    }
    let Some(at_infinity) = search.infinity_choices(&q) else {
        out.field = search.field;
        return out;
    };

    let half_r = p.r.scale(k, &AlgNumber::Rat(rat(1, 2)));
    // Enumerate sign choices.
    let total: usize = local.iter().map(|c| c.len()).product();
    for (ai, (alpha_inf, part_inf)) in at_infinity.iter().enumerate() {
        if ai > 0 && at_infinity[0].0 == *alpha_inf && at_infinity[0].1 == *part_inf {
            continue;
        }
        for mut idx in 0..total {
            let mut d = alpha_inf.clone();
            let mut omega = part_inf.clone();
            for ch in &local {
                let (a, part) = &ch[idx % ch.len()];
                idx /= ch.len();
                d = k.sub(&d, a);
                omega = omega.add(k, part);
            }
            let Some(d) = nonnegative_integer(&d) else {
                continue;
            };
            let basis = polynomial_solutions(&omega, &q, d);
            if basis.is_empty() {
                continue;
            }
            let base = omega.add(k, &half_r);
            for b in &basis {
                let ld = Rf::new(k, poly::derivative(k, b), b.clone()).unwrap();
                let u = base.add(k, &ld);
                if !out.solutions.contains(&u) {
                    out.solutions.push(u);
                }
            }
            if basis.len() > 1 {
                let fam = SolutionFamily { base, basis };
                if !out.families.contains(&fam) {
                    out.families.push(fam);
                }
            }
        }
    }
    out.field = search.field;
    out
}

/// The SL2 gate: `Ok` when the Riccati equation has no rational solution,
/// otherwise a witness solution.
pub fn is_sl2_admissible(p: &RiccatiProblem) -> Result<(), Rf> {
    let sols = rational_solutions(p);
    match sols.solutions.into_iter().next() {
        None => Ok(()),
        Some(u) => Err(u),
    }
}
