//! Dense univariate polynomials over a [`Field`] context.
//!
//! A polynomial is a `Vec` of coefficients in ascending degree order. The
//! canonical form has no trailing zeros; the zero polynomial is the empty
//! vector. Every function here returns canonical polynomials provided its
//! inputs are canonical.

use super::field::Field;

pub type Poly<E> = Vec<E>;

pub fn trim<F: Field>(f: &F, mut p: Poly<F::Elem>) -> Poly<F::Elem> {
    while p.last().is_some_and(|c| f.is_zero(c)) {
        p.pop();
    }
    p
}

/// Degree, with `None` for the zero polynomial.
pub fn degree<E>(p: &[E]) -> Option<usize> {
    p.len().checked_sub(1)
}

/// Degree as a signed integer, `-1` for zero.
pub fn deg<E>(p: &[E]) -> isize {
    p.len() as isize - 1
}

pub fn lc<F: Field>(f: &F, p: &[F::Elem]) -> F::Elem {
    p.last().cloned().unwrap_or_else(|| f.zero())
}

pub fn constant<F: Field>(f: &F, c: F::Elem) -> Poly<F::Elem> {
    if f.is_zero(&c) {
        vec![]
    } else {
        vec![c]
    }
}

pub fn one<F: Field>(f: &F) -> Poly<F::Elem> {
    vec![f.one()]
}

/// The monomial `c * X^k`.
pub fn monomial<F: Field>(f: &F, c: F::Elem, k: usize) -> Poly<F::Elem> {
    if f.is_zero(&c) {
        return vec![];
    }
    let mut p = vec![f.zero(); k + 1];
    p[k] = c;
    p
}

/// `X - a`.
pub fn linear<F: Field>(f: &F, a: &F::Elem) -> Poly<F::Elem> {
    vec![f.neg(a), f.one()]
}

pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => f.add(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        });
    }
    trim(f, out)
}

pub fn neg<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    a.iter().map(|c| f.neg(c)).collect()
}

pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => f.sub(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => f.neg(y),
            (None, None) => unreachable!(),
        });
    }
    trim(f, out)
}

pub fn scale<F: Field>(f: &F, a: &[F::Elem], c: &F::Elem) -> Poly<F::Elem> {
    if f.is_zero(c) {
        return vec![];
    }
    trim(f, a.iter().map(|x| f.mul(x, c)).collect())
}

pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    if a.len() == 1 {
        return scale(f, b, &a[0]);
    }
    if b.len() == 1 {
        return scale(f, a, &b[0]);
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if f.is_zero(y) {
                continue;
            }
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, out)
}

/// Multiplication by `X^k`.
pub fn shift<F: Field>(f: &F, a: &[F::Elem], k: usize) -> Poly<F::Elem> {
    if a.is_empty() {
        return vec![];
    }
    let mut out = vec![f.zero(); k];
    out.extend(a.iter().cloned());
    out
}

pub fn pow<F: Field>(f: &F, a: &[F::Elem], mut e: u32) -> Poly<F::Elem> {
    let mut base = a.to_vec();
    let mut acc = one(f);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(f, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(f, &base, &base);
        }
    }
    acc
}

/// Euclidean division `a = q*b + r` with `deg r < deg b`.
///
/// Panics if `b` is zero.
pub fn divrem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Poly<F::Elem>, Poly<F::Elem>) {
    assert!(!b.is_empty(), "polynomial division by zero");
    if a.len() < b.len() {
        return (vec![], a.to_vec());
    }
    let lead_inv = f.inv(b.last().unwrap()).expect("nonzero leading coefficient");
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![f.zero(); a.len() - db];
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let c = f.mul(r.last().unwrap(), &lead_inv);
        for (i, bi) in b.iter().enumerate().take(db) {
            r[k + i] = f.sub(&r[k + i], &f.mul(&c, bi));
        }
        r.pop();
        q[k] = c;
        r = trim(f, r);
    }
    (trim(f, q), r)
}

pub fn rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    divrem(f, a, b).1
}

/// Quotient of an exact division; panics (debug) if the remainder is nonzero.
pub fn exact_div<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let (q, r) = divrem(f, a, b);
    debug_assert!(r.is_empty(), "inexact polynomial division");
    q
}

pub fn divides<F: Field>(f: &F, b: &[F::Elem], a: &[F::Elem]) -> bool {
    rem(f, a, b).is_empty()
}

pub fn monic<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    match a.last() {
        None => vec![],
        Some(l) if f.is_one(l) => a.to_vec(),
        Some(l) => {
            let li = f.inv(l).expect("nonzero leading coefficient");
            let mut out: Vec<_> = a[..a.len() - 1].iter().map(|c| f.mul(c, &li)).collect();
            out.push(f.one());
            out
        }
    }
}

/// Monic greatest common divisor; `gcd(a, 0) = monic(a)`.
pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    while !y.is_empty() {
        if y.len() == 1 {
            return one(f);
        }
        // Monic remainders keep coefficient growth in check over function
        // fields.
        let r = monic(f, &rem(f, &x, &y));
        x = y;
        y = r;
    }
    monic(f, &x)
}

/// Extended Euclid: returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
pub fn ext_gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Poly<F::Elem>, Poly<F::Elem>, Poly<F::Elem>) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (one(f), vec![]);
    let (mut t0, mut t1) = (vec![], one(f));
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1);
        let mut s2 = sub(f, &s0, &mul(f, &q, &s1));
        let mut t2 = sub(f, &t0, &mul(f, &q, &t1));
        // Keep remainders monic (and the cofactors in step) to limit
        // coefficient growth over function fields.
        let mut r = r;
        if let Some(l) = r.last().filter(|l| !f.is_one(l)) {
            let li = f.inv(l).unwrap();
            r = scale(f, &r, &li);
            s2 = scale(f, &s2, &li);
            t2 = scale(f, &t2, &li);
        }
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_empty() {
        return (vec![], s0, t0);
    }
    let li = f.inv(r0.last().unwrap()).unwrap();
    (scale(f, &r0, &li), scale(f, &s0, &li), scale(f, &t0, &li))
}

/// Solves `s*a + t*b = c` with `deg s < deg b`, for coprime `a`, `b`.
///
/// Returns `None` when `gcd(a, b)` does not divide `c`.
pub fn diophantine<F: Field>(
    f: &F,
    a: &[F::Elem],
    b: &[F::Elem],
    c: &[F::Elem],
) -> Option<(Poly<F::Elem>, Poly<F::Elem>)> {
    let (g, s0, _) = ext_gcd(f, a, b);
    let (cq, cr) = divrem(f, c, &g);
    if !cr.is_empty() {
        return None;
    }
    let mut s = mul(f, &s0, &cq);
    if !b.is_empty() && degree(b).unwrap_or(0) > 0 {
        s = rem(f, &s, b);
    }
    let t = exact_div(f, &sub(f, c, &mul(f, &s, a)), b);
    Some((s, t))
}

pub fn derivative<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| f.mul(&f.from_i64(i as i64), c))
        .collect();
    trim(f, out)
}

/// Horner evaluation of `p` at a point of a possibly larger field `g`,
/// with `lift` embedding coefficients.
pub fn eval_with<F: Field, G: Field>(
    g: &G,
    p: &[F::Elem],
    at: &G::Elem,
    lift: impl Fn(&F::Elem) -> G::Elem,
) -> G::Elem {
    let mut acc = g.zero();
    for c in p.iter().rev() {
        acc = g.add(&g.mul(&acc, at), &lift(c));
    }
    acc
}

pub fn eval<F: Field>(f: &F, p: &[F::Elem], at: &F::Elem) -> F::Elem {
    let mut acc = f.zero();
    for c in p.iter().rev() {
        acc = f.add(&f.mul(&acc, at), c);
    }
    acc
}

/// Composition `p(q(X))`.
pub fn compose<F: Field>(f: &F, p: &[F::Elem], q: &[F::Elem]) -> Poly<F::Elem> {
    let mut acc: Poly<F::Elem> = vec![];
    for c in p.iter().rev() {
        acc = add(f, &mul(f, &acc, q), &constant(f, c.clone()));
    }
    acc
}

/// Taylor shift `p(X + a)`.
pub fn taylor_shift<F: Field>(f: &F, p: &[F::Elem], a: &F::Elem) -> Poly<F::Elem> {
    compose(f, p, &trim(f, vec![a.clone(), f.one()]))
}

/// Yun's squarefree decomposition of a nonzero polynomial.
///
/// Returns monic, pairwise coprime, squarefree factors with strictly
/// increasing multiplicities, such that `a = lc(a) * prod(factor^mult)`.
/// Constant inputs give an empty list.
pub fn squarefree<F: Field>(f: &F, a: &[F::Elem]) -> Vec<(Poly<F::Elem>, usize)> {
    assert!(!a.is_empty(), "squarefree decomposition of zero");
    let a = monic(f, a);
    let mut out = vec![];
    if a.len() <= 1 {
        return out;
    }
    let da = derivative(f, &a);
    let g = gcd(f, &a, &da);
    let mut b = exact_div(f, &a, &g);
    let mut c = exact_div(f, &da, &g);
    let mut d = sub(f, &c, &derivative(f, &b));
    let mut i = 1;
    loop {
        let ai = gcd(f, &b, &d);
        b = exact_div(f, &b, &ai);
        c = exact_div(f, &d, &ai);
        if ai.len() > 1 {
            out.push((ai, i));
        }
        if b.len() <= 1 {
            break;
        }
        d = sub(f, &c, &derivative(f, &b));
        i += 1;
    }
    out
}

/// The squarefree part `prod(factor)` of a nonzero polynomial, monic.
pub fn squarefree_part<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    let g = gcd(f, a, &derivative(f, a));
    monic(f, &exact_div(f, a, &g))
}

/// Resultant `Res(a, b) = lc(a)^deg(b) * prod_{a(r)=0} b(r)`, via the
/// Euclidean remainder sequence. Both inputs must be nonzero.
pub fn resultant<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    assert!(!a.is_empty() && !b.is_empty(), "resultant of zero polynomial");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let mut acc = f.one();
    loop {
        let da = a.len() - 1;
        let db = b.len() - 1;
        if db == 0 {
            return f.mul(&acc, &f.pow(&b[0], da as u32));
        }
        if da == 0 {
            return f.mul(&acc, &f.pow(&a[0], db as u32));
        }
        // Res(a, b) = (-1)^(da*db) Res(b, a) and Res(b, a) = lc(b)^(da - dr) Res(b, r).
        let r = rem(f, &a, &b);
        if r.is_empty() {
            return f.zero();
        }
        let dr = r.len() - 1;
        if (da * db) % 2 == 1 {
            acc = f.neg(&acc);
        }
        acc = f.mul(&acc, &f.pow(b.last().unwrap(), (da - dr) as u32));
        a = b;
        b = r;
    }
}

/// Coefficient of `X^k`.
pub fn coeff<F: Field>(f: &F, p: &[F::Elem], k: usize) -> F::Elem {
    p.get(k).cloned().unwrap_or_else(|| f.zero())
}

/// Maps each coefficient through `m` (and trims in the target field).
pub fn map<F: Field, G: Field>(g: &G, p: &[F::Elem], m: impl Fn(&F::Elem) -> G::Elem) -> Poly<G::Elem> {
    trim(g, p.iter().map(m).collect())
}

/// Lowest index with a nonzero coefficient (the `X`-adic valuation).
pub fn low_order<F: Field>(f: &F, p: &[F::Elem]) -> Option<usize> {
    p.iter().position(|c| !f.is_zero(c))
}

/// Newton interpolation through the points `(xs[i], ys[i])` (distinct `xs`).
pub fn interpolate<F: Field>(f: &F, xs: &[F::Elem], ys: &[F::Elem]) -> Poly<F::Elem> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = f.sub(&dd[i], &dd[i - 1]);
            let den = f.sub(&xs[i], &xs[i - j]);
            dd[i] = f.div(&num, &den).expect("interpolation nodes must be distinct");
        }
    }
    let mut acc: Poly<F::Elem> = vec![];
    for i in (0..n).rev() {
        acc = add(f, &mul(f, &acc, &linear(f, &xs[i])), &constant(f, dd[i].clone()));
    }
    acc
}
