//! Elementary-integral certificates `f = Σ cᵢ uᵢ′/uᵢ + v′`.
//!
//! A [`Certificate`] is checked exactly in canonical form. Normalization
//! makes the constants linearly independent over Q by merging arguments
//! into integer power products, which keeps the identity intact because
//! the logarithmic derivative turns products into sums.
//!
//! A certificate may also carry [`RootSum`]s: logarithmic terms summed over
//! the roots of an irreducible polynomial, which keep integrals such as
//! `∫ 1/(x³ − 2)` over the field of the polynomial's coefficients instead
//! of a splitting field.

use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::field::{Field, Rational, Q};
use crate::algebra::linalg;
use crate::algebra::numfield::{self, AlgNumber, Consts, NumberField};
use crate::algebra::poly;
use crate::algebra::ratfunc::RatFunc;
use crate::tower::{Tower, TowerElem};

/// One logarithmic term `c · u′/u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub c: AlgNumber,
    pub u: TowerElem,
}

/// `Σ_{R(c) = 0} c · S(c)′/S(c)` over the roots of a monic polynomial
/// `R(z)` (`minpoly`, constant coefficients listed from the constant term)
/// with `S(z) = Σ arg[k] zᵏ`. The derivation acts on the coefficients of
/// `S` only.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSum {
    pub minpoly: Vec<AlgNumber>,
    pub arg: Vec<TowerElem>,
}

/// The data `(c, u, v)` claiming `f = Σ cᵢ uᵢ′/uᵢ + v′` at `level`, with
/// optional root sums among the logarithmic terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub level: usize,
    pub terms: Vec<Term>,
    pub root_sums: Vec<RootSum>,
    pub v: TowerElem,
    pub f: TowerElem,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertificateError {
    #[error("certificate level {level} exceeds the tower height {height}")]
    LevelOutOfRange { level: usize, height: usize },
    #[error("{what} is not in level {level} (depends on {generator})")]
    LevelMismatch {
        what: String,
        level: usize,
        generator: String,
    },
    #[error("logarithmic argument u{index} is zero")]
    ZeroArgument { index: usize },
    #[error("identity fails: f - (sum c u'/u + v') = {residual}")]
    IdentityFails { residual: String },
    #[error("constants lie in unrelated number fields")]
    FieldMismatch,
    #[error("root sum {index}: {reason}")]
    MalformedRootSum { index: usize, reason: String },
}

impl RootSum {
    /// `e` times the root sum, for a nonzero constant `e`: the roots scale
    /// by `e`, so `R(z)` becomes `eⁿ R(z/e)` and `S(z)` becomes `S(z/e)`.
    pub fn scale(&self, tower: &Tower, e: &AlgNumber) -> RootSum {
        let k = &Consts;
        let n = self.minpoly.len() - 1;
        let inv = k.inv(e).expect("nonzero scale");
        let minpoly = self
            .minpoly
            .iter()
            .enumerate()
            .map(|(i, c)| k.mul(c, &k.powi(e, (n - i) as i64).unwrap()))
            .collect();
        let arg = self
            .arg
            .iter()
            .enumerate()
            .map(|(j, a)| tower.mul(a, &TowerElem::Const(k.powi(&inv, j as i64).unwrap())))
            .collect();
        RootSum { minpoly, arg }
    }

    /// `Σ_{R(c)=0} c·S′(c)/S(c)`, computed as the trace of `z·S′/S` in
    /// `F[z]/(R)`: with `z·S′·S⁻¹ ≡ Σ gⱼ zʲ (mod R)`, the sum is
    /// `Σ gⱼ pⱼ` for the power sums `pⱼ` of the roots of `R`.
    pub fn derivative(&self, tower: &Tower, index: usize) -> Result<TowerElem, CertificateError> {
        let r: Vec<TowerElem> = self.minpoly.iter().map(|c| TowerElem::Const(c.clone())).collect();
        let s = poly::rem(tower, &poly::trim(tower, self.arg.clone()), &r);
        let sums = power_sums(&self.minpoly, r.len() - 1);
        let coeffs: Option<Vec<RatFunc<AlgNumber>>> = s.iter().map(|c| tower.to_base_ratfunc(c)).collect();
        match coeffs {
            Some(coeffs) => self.base_derivative(tower, index, &coeffs, &sums),
            None => self.tower_derivative(tower, index, &r, &s, &sums),
        }
    }

    fn malformed(index: usize) -> CertificateError {
        CertificateError::MalformedRootSum {
            index,
            reason: "the argument vanishes at a root of the polynomial".into(),
        }
    }

    /// General case: inverts the argument modulo the polynomial by the
    /// extended Euclidean algorithm over the tower.
    fn tower_derivative(
        &self,
        tower: &Tower,
        index: usize,
        r: &[TowerElem],
        s: &[TowerElem],
        sums: &[AlgNumber],
    ) -> Result<TowerElem, CertificateError> {
        let (g, _, inv) = poly::ext_gcd(tower, r, s);
        if g.len() != 1 {
            return Err(Self::malformed(index));
        }
        let ds: Vec<TowerElem> = s.iter().map(|c| tower.derive(c)).collect();
        let z_ds = poly::shift(tower, &ds, 1);
        let g = poly::rem(tower, &poly::mul(tower, &z_ds, &inv), r);
        let mut acc = TowerElem::zero();
        for (gj, pj) in g.iter().zip(sums) {
            acc = tower.add(&acc, &tower.mul(gj, &TowerElem::Const(pj.clone())));
        }
        Ok(acc)
    }

    /// Argument coefficients in the base field. With the coefficients
    /// written over a common denominator `L`, the sum is
    /// `pᵀ adj(M) b / det(M) − p₁ L′/L`, where `M` is multiplication by the
    /// cleared argument modulo the polynomial, `b` the coordinates of
    /// `z·S′` and `p` the power sums. Numerator and determinant are
    /// polynomials in `x` of known degree, recovered by evaluation at
    /// rational points and interpolation.
    fn base_derivative(
        &self,
        tower: &Tower,
        index: usize,
        coeffs: &[RatFunc<AlgNumber>],
        sums: &[AlgNumber],
    ) -> Result<TowerElem, CertificateError> {
        let k = &Consts;
        let n = self.minpoly.len() - 1;
        let common = coeffs.iter().fold(poly::one(k), |l, c| {
            let g = poly::gcd(k, &l, &c.den);
            poly::mul(k, &l, &poly::exact_div(k, &c.den, &g))
        });
        let cleared: Vec<Vec<AlgNumber>> = coeffs
            .iter()
            .map(|c| poly::mul(k, &c.num, &poly::exact_div(k, &common, &c.den)))
            .collect();
        let derived: Vec<Vec<AlgNumber>> = cleared.iter().map(|c| poly::derivative(k, c)).collect();
        if cleared.iter().all(|c| c.is_empty()) {
            return Err(Self::malformed(index));
        }
        // Coordinates of z^j modulo the polynomial, extended on demand.
        let mut powers: Vec<Vec<AlgNumber>> = vec![(0..n).map(|i| if i == 0 { k.one() } else { k.zero() }).collect()];
        let deg_x = cleared.iter().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0);
        let bound = n * deg_x;
        let (mut xs, mut nums, mut dets) = (vec![], vec![], vec![]);
        let mut point = 0i64;
        while xs.len() <= bound {
            if point as usize > 2 * bound + 1 {
                // More than `bound` roots: the determinant vanishes identically.
                return Err(Self::malformed(index));
            }
            let a = AlgNumber::from_i64(point);
            point += 1;
            let sv: Vec<AlgNumber> = cleared.iter().map(|c| poly::eval(k, c, &a)).collect();
            let dv: Vec<AlgNumber> = derived.iter().map(|c| poly::eval(k, c, &a)).collect();
            // Column j holds the coordinates of z^j · S.
            let mut m = vec![vec![k.zero(); n]; n];
            let mut b = vec![k.zero(); n];
            for (i, (si, di)) in sv.iter().zip(&dv).enumerate() {
                for row in 0..n {
                    if !k.is_zero(si) {
                        for (col, entry) in m[row].iter_mut().enumerate() {
                            let p = self.power_coord(&mut powers, i + col, row);
                            *entry = k.add(entry, &k.mul(si, &p));
                        }
                    }
                    if !k.is_zero(di) {
                        let p = self.power_coord(&mut powers, i + 1, row);
                        b[row] = k.add(&b[row], &k.mul(di, &p));
                    }
                }
            }
            let d = linalg::det(k, &m);
            if k.is_zero(&d) {
                continue;
            }
            let y = linalg::solve(k, &m, &b).expect("nonsingular system");
            let trace = y
                .iter()
                .zip(sums)
                .fold(k.zero(), |acc, (yj, pj)| k.add(&acc, &k.mul(yj, pj)));
            xs.push(a);
            nums.push(k.mul(&d, &trace));
            dets.push(d);
        }
        let num = poly::interpolate(k, &xs, &nums);
        let den = poly::interpolate(k, &xs, &dets);
        let main = RatFunc::new(k, num, den).expect("nonzero determinant");
        let p1 = sums.get(1).cloned().unwrap_or_else(|| k.zero());
        let correction = RatFunc::new(k, poly::derivative(k, &common), common.clone())
            .expect("nonzero denominator")
            .scale(k, &p1);
        Ok(tower.from_base_ratfunc(&main.sub(k, &correction)))
    }

    /// Coordinate `row` of `z^j` modulo the polynomial, extending the cache.
    fn power_coord(&self, powers: &mut Vec<Vec<AlgNumber>>, j: usize, row: usize) -> AlgNumber {
        let k = &Consts;
        let n = self.minpoly.len() - 1;
        while powers.len() <= j {
            // Multiply by z and reduce with z^n = −Σ a_i z^i.
            let cur = powers.last().unwrap().clone();
            let top = cur[n - 1].clone();
            let mut next = vec![k.zero(); n];
            for i in (1..n).rev() {
                next[i] = k.sub(&cur[i - 1], &k.mul(&top, &self.minpoly[i]));
            }
            next[0] = k.neg(&k.mul(&top, &self.minpoly[0]));
            powers.push(next);
        }
        powers[j][row].clone()
    }
}

/// Power sums `p₀, …, p_{n−1}` of the roots of the monic `r` of degree `n`
/// (Newton's identities).
fn power_sums(r: &[AlgNumber], n: usize) -> Vec<AlgNumber> {
    let k = &Consts;
    // r = z^n + a_{n-1} z^{n-1} + … + a_0; e-coefficient of z^{n-i} is r[n-i].
    let a = |i: usize| r[n - i].clone();
    let mut p = vec![AlgNumber::from_i64(n as i64)];
    for m in 1..n {
        // p_m = −(m a_{n−m}) − Σ_{i=1}^{m−1} a_{n−i} p_{m−i}
        let mut acc = k.neg(&k.mul(&AlgNumber::from_i64(m as i64), &a(m)));
        for i in 1..m {
            acc = k.sub(&acc, &k.mul(&a(i), &p[m - i]));
        }
        p.push(acc);
    }
    p
}

impl Certificate {
    /// A certificate with no logarithmic terms.
    pub fn rational(level: usize, v: TowerElem, f: TowerElem) -> Certificate {
        Certificate {
            level,
            terms: vec![],
            root_sums: vec![],
            v,
            f,
        }
    }

    /// Checks that all data lie at the certificate's level and that every
    /// argument is nonzero.
    pub fn check_shape(&self, tower: &Tower) -> Result<(), CertificateError> {
        if self.level > tower.height() {
            return Err(CertificateError::LevelOutOfRange {
                level: self.level,
                height: tower.height(),
            });
        }
        let check = |what: String, e: &TowerElem| {
            tower
                .coerce_down(e, self.level)
                .map(|_| ())
                .map_err(|n| CertificateError::LevelMismatch {
                    what,
                    level: self.level,
                    generator: n.generator,
                })
        };
        check("f".into(), &self.f)?;
        check("v".into(), &self.v)?;
        for (i, t) in self.terms.iter().enumerate() {
            check(format!("u{}", i + 1), &t.u)?;
            if t.u.is_zero() {
                return Err(CertificateError::ZeroArgument { index: i + 1 });
            }
        }
        for (i, r) in self.root_sums.iter().enumerate() {
            let malformed = |reason: &str| CertificateError::MalformedRootSum {
                index: i + 1,
                reason: reason.into(),
            };
            if r.minpoly.len() < 2 || !r.minpoly.last().is_some_and(|c| Consts.is_one(c)) {
                return Err(malformed("the polynomial must be monic of positive degree"));
            }
            if r.arg.iter().all(|a| a.is_zero()) {
                return Err(malformed("the argument is zero"));
            }
            for (k, a) in r.arg.iter().enumerate() {
                check(format!("coefficient {k} of root-sum argument {}", i + 1), a)?;
            }
        }
        self.constant_field()?;
        Ok(())
    }

    /// `Σ cᵢ uᵢ′/uᵢ + v′`.
    pub fn derivative_sum(&self, tower: &Tower) -> Result<TowerElem, CertificateError> {
        let mut acc = tower.derive(&self.v);
        for (i, t) in self.terms.iter().enumerate() {
            let ld = tower
                .logderiv(&t.u)
                .map_err(|_| CertificateError::ZeroArgument { index: i + 1 })?;
            acc = tower.add(&acc, &tower.mul(&TowerElem::Const(t.c.clone()), &ld));
        }
        for (i, r) in self.root_sums.iter().enumerate() {
            acc = tower.add(&acc, &r.derivative(tower, i + 1)?);
        }
        Ok(acc)
    }

    /// `f − (Σ cᵢ uᵢ′/uᵢ + v′)`, zero exactly when the certificate holds.
    pub fn residual(&self, tower: &Tower) -> Result<TowerElem, CertificateError> {
        self.check_shape(tower)?;
        Ok(tower.sub(&self.f, &self.derivative_sum(tower)?))
    }

    /// Exact check of the defining identity.
    pub fn verify(&self, tower: &Tower) -> Result<bool, CertificateError> {
        Ok(self.residual(tower)?.is_zero())
    }

    /// As [`Certificate::verify`], reporting a failed identity as an error.
    pub fn check(&self, tower: &Tower) -> Result<(), CertificateError> {
        let r = self.residual(tower)?;
        if r.is_zero() {
            Ok(())
        } else {
            Err(CertificateError::IdentityFails {
                residual: tower.format(&r),
            })
        }
    }

    /// The same certificate viewed at a higher level.
    pub fn lift(&self, to_level: usize) -> Certificate {
        assert!(to_level >= self.level, "lift must not lower the level");
        Certificate {
            level: to_level,
            ..self.clone()
        }
    }

    /// The common number field of the constants, root-sum polynomials
    /// included.
    pub fn constant_field(&self) -> Result<Option<Arc<NumberField>>, CertificateError> {
        let roots = self.root_sums.iter().flat_map(|r| &r.minpoly);
        numfield::join_fields(self.terms.iter().map(|t| &t.c).chain(roots)).map_err(|_| CertificateError::FieldMismatch)
    }

    /// Coordinate matrix of the term constants (rows = field basis,
    /// columns = constants).
    fn coordinate_matrix(&self) -> Result<Vec<Vec<Rational>>, CertificateError> {
        let field =
            numfield::join_fields(self.terms.iter().map(|t| &t.c)).map_err(|_| CertificateError::FieldMismatch)?;
        let deg = field.as_ref().map_or(1, |k| k.degree());
        let cols: Vec<Vec<Rational>> = self
            .terms
            .iter()
            .map(|t| match &field {
                None => vec![t.c.as_rational().unwrap().clone()],
                Some(k) => {
                    let mut c = t.c.coords_in(k).expect("constant in the common field");
                    c.resize(deg, Q.zero());
                    c
                }
            })
            .collect();
        Ok((0..deg).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())
    }

    /// Whether the constants are linearly independent over Q.
    pub fn constants_independent(&self) -> Result<bool, CertificateError> {
        if self.terms.is_empty() {
            return Ok(true);
        }
        let m = self.coordinate_matrix()?;
        Ok(linalg::rank(&Q, &m) == self.terms.len())
    }

    /// An equivalent certificate with Q-linearly independent constants and
    /// no constant arguments. Dependent constants are expressed through
    /// the independent ones, and their arguments are folded into integer
    /// power products; each constant is oriented so that its leading
    /// coordinate is positive.
    pub fn normalize_constants(&self, tower: &Tower) -> Result<Certificate, CertificateError> {
        let mut out = self.canonical(tower);
        if out.terms.is_empty() {
            return Ok(out);
        }
        let mut m = out.coordinate_matrix()?;
        let pivots = linalg::rref(&Q, &mut m);
        let mut terms = vec![];
        for (row, &p) in pivots.iter().enumerate() {
            // c_j = Σ_rows m[row][j] c_{pivot(row)} for non-pivot j.
            let lambdas: Vec<(usize, Rational)> = (0..out.terms.len())
                .filter(|j| !pivots.contains(j))
                .map(|j| (j, m[row][j].clone()))
                .filter(|(_, l)| !l.is_zero())
                .collect();
            let denom = lambdas.iter().fold(num_bigint::BigInt::one(), |acc, (_, l)| {
                num_integer::lcm(acc, l.denom().clone())
            });
            let big = Rational::from_integer(denom.clone());
            let mut u = tower
                .powi(&out.terms[p].u, denom.to_i64().expect("small exponent"))
                .map_err(|_| CertificateError::ZeroArgument { index: p + 1 })?;
            for (j, l) in &lambdas {
                let e = (l * &big).to_integer().to_i64().expect("small exponent");
                let f = tower
                    .powi(&out.terms[*j].u, e)
                    .map_err(|_| CertificateError::ZeroArgument { index: j + 1 })?;
                u = tower.mul(&u, &f);
            }
            if u.slot().is_none() {
                continue;
            }
            let mut c = Consts.mul(&out.terms[p].c, &AlgNumber::Rat(big.recip()));
            // (c, u) and (−c, 1/u) contribute alike; keep the orientation
            // whose constant has a positive leading coordinate.
            let neg = Consts.neg(&c);
            if c.lex_cmp(&neg) == std::cmp::Ordering::Less {
                c = neg;
                u = tower.inv(&u).expect("nonzero argument");
            }
            terms.push(Term {
                c,
                u: tower.monic_normalize(&u),
            });
        }
        out.terms = terms;
        Ok(out)
    }

    /// Drops terms with zero constants or constant arguments and makes
    /// arguments monic, combining terms that share an argument; the
    /// identity is unaffected.
    pub fn canonical(&self, tower: &Tower) -> Certificate {
        let mut terms: Vec<Term> = vec![];
        for t in self.terms.iter().filter(|t| t.u.slot().is_some()) {
            let u = tower.monic_normalize(&t.u);
            match terms.iter_mut().find(|s| s.u == u) {
                Some(s) => s.c = Consts.add(&s.c, &t.c),
                None => terms.push(Term { c: t.c.clone(), u }),
            }
        }
        terms.retain(|t| !t.c.is_zero());
        Certificate { terms, ..self.clone() }
    }
}
