//! Sparse multivariate polynomials over the integers in the five loop
//! variables `d, z, x, y, w`, rational functions over them, and the
//! Chebyshev-style recurrence families the closed determinant formulas are
//! made of.
//!
//! The monomial order is graded lexicographic with `d > z > x > y > w`.
//! Every polynomial keeps its term list sorted descending in that order with
//! no zero coefficients and no repeated exponent tuples — this canonical form
//! is what makes equality, exact division, and serialization bit-exact.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{BuildHasherDefault, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of ring variables.
pub const NUM_VARS: usize = 5;

/// The five loop variables, listed in monomial-order precedence.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Variable {
    D,
    Z,
    X,
    Y,
    W,
}

impl Variable {
    pub const ALL: [Variable; NUM_VARS] = [
        Variable::D,
        Variable::Z,
        Variable::X,
        Variable::Y,
        Variable::W,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> char {
        match self {
            Variable::D => 'd',
            Variable::Z => 'z',
            Variable::X => 'x',
            Variable::Y => 'y',
            Variable::W => 'w',
        }
    }
}

/// Exponent tuple of a monomial.  `exps[i]` is the exponent of
/// `Variable::ALL[i]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: [u16; NUM_VARS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        exps: [0; NUM_VARS],
    };

    pub fn new(exps: [u16; NUM_VARS]) -> Monomial {
        Monomial { exps }
    }

    pub fn var(v: Variable) -> Monomial {
        let mut exps = [0; NUM_VARS];
        exps[v.index()] = 1;
        Monomial { exps }
    }

    pub fn exps(&self) -> [u16; NUM_VARS] {
        self.exps
    }

    pub fn exp(&self, v: Variable) -> u16 {
        self.exps[v.index()]
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = [0; NUM_VARS];
        for i in 0..NUM_VARS {
            exps[i] = self.exps[i]
                .checked_add(other.exps[i])
                .expect("monomial exponent overflow");
        }
        Monomial { exps }
    }

    /// Componentwise quotient; `None` if any exponent of `other` exceeds the
    /// corresponding exponent of `self`.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = [0; NUM_VARS];
        for i in 0..NUM_VARS {
            exps[i] = self.exps[i].checked_sub(other.exps[i])?;
        }
        Some(Monomial { exps })
    }

    pub fn pow(&self, e: u16) -> Monomial {
        let mut exps = [0; NUM_VARS];
        for i in 0..NUM_VARS {
            exps[i] = self.exps[i].checked_mul(e).expect("monomial exponent overflow");
        }
        Monomial { exps }
    }

    /// Packs the exponent tuple into a single integer key (12 bits per
    /// variable), used for fast hashing during multiplication.
    fn pack(&self) -> u64 {
        debug_assert!(self.exps.iter().all(|&e| e < (1 << 12)));
        let mut key = 0u64;
        for &e in &self.exps {
            key = (key << 12) | e as u64;
        }
        key
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Monomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: compare total degree first, then exponents of
    /// `d, z, x, y, w` in that order.
    fn cmp(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

/// Multiply-and-rotate hasher for the packed monomial keys; the default
/// SipHash is a measurable cost inside polynomial multiplication.
#[derive(Default)]
struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.0 = (self.0 ^ v).wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(29);
    }
}

type KeyMap<V> = HashMap<u64, V, BuildHasherDefault<KeyHasher>>;

/// Integer polynomial in the five loop variables, kept in canonical sorted
/// form at all times.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Polynomial {
    /// Terms in strictly descending monomial order, all coefficients nonzero.
    terms: Vec<(Monomial, BigInt)>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial { terms: Vec::new() }
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(1)
    }

    pub fn constant(c: i64) -> Polynomial {
        Polynomial::from_bigint(BigInt::from(c))
    }

    pub fn from_bigint(c: BigInt) -> Polynomial {
        if c.is_zero() {
            Polynomial::zero()
        } else {
            Polynomial {
                terms: vec![(Monomial::ONE, c)],
            }
        }
    }

    pub fn var(v: Variable) -> Polynomial {
        Polynomial {
            terms: vec![(Monomial::var(v), BigInt::one())],
        }
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Polynomial {
        if c.is_zero() {
            Polynomial::zero()
        } else {
            Polynomial { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary (monomial, coefficient) pairs,
    /// merging duplicates and dropping zeros.
    pub fn from_terms(terms: Vec<(Monomial, BigInt)>) -> Polynomial {
        let mut terms = terms;
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, BigInt)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Polynomial { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().map(|(m, c)| (m, c))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// The unique variable appearing in this polynomial, or `None` if it is
    /// constant or involves several variables.
    pub fn sole_variable(&self) -> Option<Variable> {
        let mut found = None;
        for (m, _) in &self.terms {
            for v in Variable::ALL {
                if m.exp(v) > 0 {
                    match found {
                        None => found = Some(v),
                        Some(f) if f == v => {}
                        Some(_) => return None,
                    }
                }
            }
        }
        found
    }

    /// Leading (monomial, coefficient) in graded lex order.
    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.first().map(|(m, c)| (m, c))
    }

    fn merge(&self, other: &Polynomial, negate_other: bool) -> Polynomial {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other.terms.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ma, ca)), Some((mb, cb))) => match ma.cmp(mb) {
                    Ordering::Greater => {
                        out.push((*ma, (*ca).clone()));
                        a.next();
                    }
                    Ordering::Less => {
                        let c = if negate_other { -(*cb).clone() } else { (*cb).clone() };
                        out.push((*mb, c));
                        b.next();
                    }
                    Ordering::Equal => {
                        let c = if negate_other { ca - cb } else { ca + cb };
                        if !c.is_zero() {
                            out.push((*ma, c));
                        }
                        a.next();
                        b.next();
                    }
                },
                (Some((ma, ca)), None) => {
                    out.push((*ma, (*ca).clone()));
                    a.next();
                }
                (None, Some((mb, cb))) => {
                    let c = if negate_other { -(*cb).clone() } else { (*cb).clone() };
                    out.push((*mb, c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        Polynomial { terms: out }
    }

    /// `self * (m, c)` for a single term; preserves sorted order directly.
    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(tm, tc)| (tm.mul(m), tc * c))
                .collect(),
        }
    }

    fn mul_impl(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, c);
        }
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc: KeyMap<(Monomial, BigInt)> =
            KeyMap::with_capacity_and_hasher(large.terms.len() * 2, Default::default());
        for (ms, cs) in &small.terms {
            for (ml, cl) in &large.terms {
                let m = ms.mul(ml);
                let prod = cs * cl;
                match acc.entry(m.pack()) {
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        e.get_mut().1 += prod;
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert((m, prod));
                    }
                }
            }
        }
        let mut terms: Vec<(Monomial, BigInt)> = acc
            .into_values()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Polynomial { terms }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Exact division: returns `Some(q)` with `self = q * divisor`, or `None`
    /// when no such integer-coefficient quotient exists.
    pub fn try_div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Polynomial::zero());
        }
        let (dm, dc) = divisor.leading().unwrap();
        let mut rem = self.clone();
        let mut quot: Vec<(Monomial, BigInt)> = Vec::new();
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.try_div(dm)?;
            let (c, r) = rc.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            // Leading monomials strictly decrease, so the quotient is built
            // already sorted.
            rem = rem.merge(&divisor.mul_term(&m, &c), true);
            quot.push((m, c));
        }
        Some(Polynomial { terms: quot })
    }

    /// Positive gcd of all coefficients; 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides every coefficient by `c` (must divide exactly).
    pub fn div_scalar(&self, c: &BigInt) -> Polynomial {
        assert!(!c.is_zero());
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, tc)| {
                    let (q, r) = tc.div_rem(c);
                    assert!(r.is_zero(), "scalar division is not exact");
                    (*m, q)
                })
                .collect(),
        }
    }

    /// Substitutes a polynomial for one variable.
    pub fn substitute(&self, v: Variable, by: &Polynomial) -> Polynomial {
        let vi = v.index();
        let mut powers: Vec<Polynomial> = vec![Polynomial::one()];
        let mut acc = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exps[vi] as usize;
            while powers.len() <= e {
                let next = &powers[powers.len() - 1] * by;
                powers.push(next);
            }
            let mut rest = *m;
            rest.exps[vi] = 0;
            acc = &acc + &powers[e].mul_term(&rest, c);
        }
        acc
    }

    /// Exchanges two variables in every monomial.
    pub fn swap_vars(&self, a: Variable, b: Variable) -> Polynomial {
        let (ai, bi) = (a.index(), b.index());
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = m.exps;
                exps.swap(ai, bi);
                (Monomial::new(exps), c.clone())
            })
            .collect();
        Polynomial::from_terms(terms)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, other: &Polynomial) -> Polynomial {
        self.merge(other, false)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, other: &Polynomial) -> Polynomial {
        self.merge(other, true)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, other: &Polynomial) -> Polynomial {
        self.mul_impl(other)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let abs = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else {
                let mut first = true;
                if !abs.is_one() {
                    write!(f, "{abs}")?;
                    first = false;
                }
                for v in Variable::ALL {
                    let e = m.exp(v);
                    if e == 0 {
                        continue;
                    }
                    if !first {
                        write!(f, "*")?;
                    }
                    first = false;
                    if e == 1 {
                        write!(f, "{}", v.symbol())?;
                    } else {
                        write!(f, "{}^{}", v.symbol(), e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

// Serialized as a list of `[coefficient, [e_d, e_z, e_x, e_y, e_w]]` pairs in
// canonical term order, with decimal-string coefficients so arbitrary
// precision survives the round trip.
impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (m, c) in &self.terms {
            seq.serialize_element(&(c.to_string(), m.exps))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Polynomial, D::Error> {
        struct PolyVisitor;

        impl<'de> Visitor<'de> for PolyVisitor {
            type Value = Polynomial;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a list of [coefficient, exponent-tuple] pairs")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Polynomial, A::Error> {
                let mut terms: Vec<(Monomial, BigInt)> = Vec::new();
                while let Some((c, exps)) = seq.next_element::<(String, [u16; NUM_VARS])>()? {
                    let c: BigInt = c
                        .parse()
                        .map_err(|_| de::Error::custom("invalid integer coefficient"))?;
                    if c.is_zero() {
                        return Err(de::Error::custom("zero coefficient in term list"));
                    }
                    let m = Monomial::new(exps);
                    if let Some((last, _)) = terms.last() {
                        if *last <= m {
                            return Err(de::Error::custom("terms not in canonical order"));
                        }
                    }
                    terms.push((m, c));
                }
                Ok(Polynomial { terms })
            }
        }

        deserializer.deserialize_seq(PolyVisitor)
    }
}

/// First-kind Chebyshev-style family: `T_0 = 2`, `T_1 = v`,
/// `T_{k+1} = v*T_k - T_{k-1}`.  Only `d` and `w` appear in this role.
pub fn chebyshev_t(k: usize, v: Variable) -> Polynomial {
    assert!(
        matches!(v, Variable::D | Variable::W),
        "first-kind family is only used in d or w"
    );
    let mut prev = Polynomial::constant(2);
    if k == 0 {
        return prev;
    }
    let var = Polynomial::var(v);
    let mut cur = var.clone();
    for _ in 1..k {
        let next = &(&var * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Second-kind Chebyshev-style family: `S_0 = 1`, `S_1 = v`,
/// `S_{k+1} = v*S_k - S_{k-1}`.  Used in `d`, `z`, and `w`.
pub fn chebyshev_s(k: usize, v: Variable) -> Polynomial {
    assert!(
        matches!(v, Variable::D | Variable::Z | Variable::W),
        "second-kind family is only used in d, z, or w"
    );
    let mut prev = Polynomial::one();
    if k == 0 {
        return prev;
    }
    let var = Polynomial::var(v);
    let mut cur = var.clone();
    for _ in 1..k {
        let next = &(&var * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Quantum integer `Δ_k = S_k(d)`.
pub fn delta(k: usize) -> Polynomial {
    chebyshev_s(k, Variable::D)
}

/// `Δ_k! = Δ_1 Δ_2 ⋯ Δ_k`, with `Δ_{-1}! = Δ_0! = 1`.
pub fn delta_factorial(k: i64) -> Polynomial {
    let mut acc = Polynomial::one();
    if k <= 0 {
        return acc;
    }
    for j in 1..=k as usize {
        acc = &acc * &delta(j);
    }
    acc
}

/// Strips trailing zero coefficients from a dense univariate coefficient
/// vector (index = exponent).
fn trim_univariate(v: &mut Vec<BigInt>) {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

/// Divides out the integer content and makes the leading coefficient
/// positive, so that gcds come out in a canonical form.
fn primitive_univariate(mut v: Vec<BigInt>) -> Vec<BigInt> {
    trim_univariate(&mut v);
    let mut g = BigInt::zero();
    for c in &v {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    if v.last().map(|c| c.is_negative()).unwrap_or(false) {
        g = -g;
    }
    if !g.is_zero() && !g.is_one() {
        for c in v.iter_mut() {
            *c = &*c / &g;
        }
    }
    v
}

/// Pseudo-remainder of `a` by `b` (both nonzero, deg a >= deg b): repeatedly
/// scales the remainder by b's leading coefficient so every cancellation
/// stays in integer arithmetic.
fn pseudo_rem_univariate(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = b.last().unwrap();
    let mut r = a.to_vec();
    while r.len() > db {
        let lr = r.pop().unwrap();
        if !lr.is_zero() {
            let shift = r.len() - db;
            for c in r.iter_mut() {
                *c = &*c * lb;
            }
            for (i, bc) in b[..db].iter().enumerate() {
                r[shift + i] -= &lr * bc;
            }
        }
        trim_univariate(&mut r);
    }
    r
}

/// Primitive gcd of two univariate integer polynomials given as dense
/// coefficient vectors, by the primitive Euclidean algorithm.
fn gcd_univariate(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = primitive_univariate(a.to_vec());
    let mut b = primitive_univariate(b.to_vec());
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        if b.len() == 1 {
            return vec![BigInt::one()];
        }
        let r = pseudo_rem_univariate(&a, &b);
        a = b;
        b = primitive_univariate(r);
    }
    a
}

/// Quotient of two polynomials.  Normalization removes the integer content
/// common to numerator and denominator, keeps the denominator's leading
/// coefficient positive, clears a denominator that divides the numerator
/// exactly, and — when the denominator involves a single variable, as every
/// denominator produced by the recursions here does — cancels the polynomial
/// gcd of the two sides.  Without that last step repeated additions compound
/// denominators multiplicatively and exponents blow past the packed 12-bit
/// budget.  Equality is decided by cross-multiplication regardless.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> RationalFunction {
        assert!(!den.is_zero(), "zero denominator");
        let mut rf = RationalFunction { num, den };
        rf.normalize();
        rf
    }

    pub fn from_poly(p: Polynomial) -> RationalFunction {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn from_int(c: i64) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::constant(c))
    }

    pub fn zero() -> RationalFunction {
        RationalFunction::from_int(0)
    }

    pub fn one() -> RationalFunction {
        RationalFunction::from_int(1)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Polynomial::one();
            return;
        }
        if self.den.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            self.num = -&self.num;
            self.den = -&self.den;
        }
        let g = self.num.content().gcd(&self.den.content());
        if !g.is_one() && !g.is_zero() {
            self.num = self.num.div_scalar(&g);
            self.den = self.den.div_scalar(&g);
        }
        if self.den.is_one() {
            return;
        }
        if let Some(q) = self.num.try_div_exact(&self.den) {
            self.num = q;
            self.den = Polynomial::one();
            return;
        }
        if let Some(v) = self.den.sole_variable() {
            self.cancel_univariate(v);
        }
    }

    /// Cancels the polynomial gcd of numerator and denominator, assuming the
    /// denominator involves only the variable `v`.  The gcd is computed
    /// between the denominator and every coefficient of the numerator viewed
    /// as a polynomial in `v`.
    fn cancel_univariate(&mut self, v: Variable) {
        let den_deg = self.den.degree().unwrap() as usize;
        let mut den_vec = vec![BigInt::zero(); den_deg + 1];
        for (m, c) in self.den.terms() {
            den_vec[m.exp(v) as usize] = c.clone();
        }
        let mut groups: HashMap<Monomial, Vec<BigInt>> = HashMap::new();
        for (m, c) in self.num.terms() {
            let e = m.exp(v) as usize;
            let mut rest = m.exps();
            rest[v.index()] = 0;
            let slot = groups.entry(Monomial::new(rest)).or_default();
            if slot.len() <= e {
                slot.resize(e + 1, BigInt::zero());
            }
            slot[e] = c.clone();
        }
        let mut g = primitive_univariate(den_vec);
        for group in groups.values() {
            g = gcd_univariate(&g, group);
            if g.len() <= 1 {
                return;
            }
        }
        let g_poly = Polynomial::from_terms(
            g.into_iter()
                .enumerate()
                .map(|(e, c)| (Monomial::var(v).pow(e as u16), c))
                .collect(),
        );
        self.num = self.num.try_div_exact(&g_poly).expect("gcd divides numerator");
        self.den = self.den.try_div_exact(&g_poly).expect("gcd divides denominator");
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> RationalFunction {
        assert!(!self.is_zero(), "reciprocal of zero");
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    /// Clears the denominator when it divides the numerator exactly.
    pub fn to_polynomial(&self) -> Option<Polynomial> {
        self.num.try_div_exact(&self.den)
    }

    pub fn pow(&self, e: u32) -> RationalFunction {
        RationalFunction::new(self.num.pow(e), self.den.pow(e))
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &RationalFunction) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RationalFunction {}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, other: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &other.den) + &(&other.num * &self.den),
            &self.den * &other.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, other: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &other.den) - &(&other.num * &self.den),
            &self.den * &other.den,
        )
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, other: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &other.num, &self.den * &other.den)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl RationalFunction {
    pub fn div(&self, other: &RationalFunction) -> RationalFunction {
        assert!(!other.is_zero(), "division by zero");
        RationalFunction::new(&self.num * &other.den, &self.den * &other.num)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> Polynomial {
        Polynomial::var(Variable::D)
    }

    fn z() -> Polynomial {
        Polynomial::var(Variable::Z)
    }

    #[test]
    fn chebyshev_first_kind_small_values() {
        assert_eq!(chebyshev_t(0, Variable::D), Polynomial::constant(2));
        assert_eq!(chebyshev_t(1, Variable::D), d());
        let t2 = &(&d() * &d()) - &Polynomial::constant(2);
        assert_eq!(chebyshev_t(2, Variable::D), t2);
        let t3 = &(&d() * &t2) - &d();
        assert_eq!(chebyshev_t(3, Variable::D), t3);
    }

    #[test]
    fn chebyshev_second_kind_small_values() {
        assert_eq!(chebyshev_s(0, Variable::Z), Polynomial::one());
        assert_eq!(chebyshev_s(1, Variable::Z), z());
        let s2 = &(&z() * &z()) - &Polynomial::one();
        assert_eq!(chebyshev_s(2, Variable::Z), s2);
        assert_eq!(delta(2), &(&d() * &d()) - &Polynomial::one());
    }

    #[test]
    fn delta_recurrence_holds() {
        for k in 1..30 {
            let lhs = delta(k + 1);
            let rhs = &(&d() * &delta(k)) - &delta(k - 1);
            assert_eq!(lhs, rhs, "recurrence fails at k = {k}");
        }
    }

    #[test]
    fn delta_factorial_edge_cases() {
        assert_eq!(delta_factorial(-1), Polynomial::one());
        assert_eq!(delta_factorial(0), Polynomial::one());
        assert_eq!(delta_factorial(2), &delta(1) * &delta(2));
    }

    #[test]
    fn exact_division_difference_of_squares() {
        let lhs = &(&d() * &d()) - &(&z() * &z());
        let div = &d() - &z();
        let q = lhs.try_div_exact(&div).expect("should divide");
        assert_eq!(q, &d() + &z());
    }

    #[test]
    fn exact_division_rejects_non_multiples() {
        let p = &(&d() * &d()) - &Polynomial::one();
        assert!(p.try_div_exact(&(&d() - &Polynomial::constant(2))).is_none());
        // Coefficient obstruction: 2d + 1 does not divide d^2 over the integers.
        let two_d = &Polynomial::constant(2) * &d();
        assert!((&d() * &d()).try_div_exact(&(&two_d + &Polynomial::one())).is_none());
    }

    #[test]
    fn division_by_constant_needs_divisible_content() {
        let p = &Polynomial::constant(6) * &d();
        let q = p.try_div_exact(&Polynomial::constant(3)).unwrap();
        assert_eq!(q, &Polynomial::constant(2) * &d());
        assert!(p.try_div_exact(&Polynomial::constant(4)).is_none());
    }

    #[test]
    fn monomial_order_is_graded_lex() {
        let d2 = Monomial::var(Variable::D).pow(2);
        let dz = Monomial::var(Variable::D).mul(&Monomial::var(Variable::Z));
        let z2 = Monomial::var(Variable::Z).pow(2);
        let w = Monomial::var(Variable::W);
        assert!(d2 > dz && dz > z2 && z2 > w);
        let p = &(&d() + &z()) * &(&d() + &z());
        let terms: Vec<_> = p.terms().map(|(m, _)| *m).collect();
        assert_eq!(terms, vec![d2, dz, z2]);
    }

    #[test]
    fn display_is_readable() {
        let p = &(&(&d() * &d()) - &(&Polynomial::constant(2) * &(&Polynomial::var(Variable::X) * &Polynomial::var(Variable::Y)))) + &Polynomial::constant(1);
        assert_eq!(p.to_string(), "d^2 - 2*x*y + 1");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }

    #[test]
    fn serialization_round_trips() {
        let p = &(&d().pow(3) - &(&Polynomial::constant(7) * &z())) + &Polynomial::constant(123);
        let json = serde_json::to_string(&p).unwrap();
        let back: Polynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
        // Huge coefficients survive.
        let big = Polynomial::from_bigint(BigInt::from(2).pow(200u32));
        let json = serde_json::to_string(&big).unwrap();
        let back: Polynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(big, back);
    }

    #[test]
    fn rational_function_basics() {
        let diff_sq = RationalFunction::new(&(&d() * &d()) - &(&z() * &z()), &d() - &z());
        let sum = RationalFunction::from_poly(&d() + &z());
        assert_eq!(diff_sq, sum);
        assert_eq!(diff_sq.to_polynomial().unwrap(), &d() + &z());

        let half = RationalFunction::new(Polynomial::one(), Polynomial::constant(2));
        let one = &half + &half;
        assert_eq!(one, RationalFunction::one());
    }

    #[test]
    fn rational_function_normalizes_sign_and_content() {
        let r = RationalFunction::new(&Polynomial::constant(2) * &d(), -&Polynomial::constant(4));
        assert_eq!(r.denominator().to_string(), "2");
        assert_eq!(r.numerator().to_string(), "-d");
    }

    #[test]
    fn rational_sums_keep_denominators_reduced() {
        // Equal denominators must not square under addition.
        let a = RationalFunction::new(Polynomial::var(Variable::X), delta(4));
        let b = RationalFunction::new(Polynomial::var(Variable::Y), delta(4));
        let s = &a + &b;
        assert_eq!(s.denominator(), &delta(4));

        // 1/Δ₁ + 1/Δ₂ - 1/Δ₁ collapses back to 1/Δ₂ exactly, not merely up
        // to cross-multiplication.
        let r1 = RationalFunction::new(Polynomial::one(), delta(1));
        let r2 = RationalFunction::new(Polynomial::one(), delta(2));
        let roundtrip = &(&r1 + &r2) - &r1;
        assert_eq!(roundtrip.numerator(), &Polynomial::one());
        assert_eq!(roundtrip.denominator(), &delta(2));

        // Long alternating sums stay bounded: the denominator never exceeds
        // the least common multiple of the inputs.
        let mut acc = RationalFunction::zero();
        for k in 1..=99 {
            let term = RationalFunction::new(Polynomial::one(), delta(5));
            if k % 2 == 0 {
                acc = &acc - &term;
            } else {
                acc = &acc + &term;
            }
        }
        assert_eq!(acc.denominator(), &delta(5));

        // A shared non-trivial factor across distinct denominators cancels:
        // Δ₃ = Δ₁·(d² - 2), so 1/Δ₃ + 1/Δ₁ has denominator Δ₃, not Δ₁·Δ₃.
        let r3 = RationalFunction::new(Polynomial::one(), delta(3));
        let mixed = &r3 + &r1;
        assert_eq!(mixed.denominator(), &delta(3));
    }

    #[test]
    fn substitute_specializes_variables() {
        // z := d sends d^2 - z^2 to zero.
        let p = &(&d() * &d()) - &(&z() * &z());
        assert!(p.substitute(Variable::Z, &d()).is_zero());
        let q = &d() + &z();
        assert_eq!(q.substitute(Variable::Z, &d()), &Polynomial::constant(2) * &d());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_poly() -> impl Strategy<Value = Polynomial> {
            proptest::collection::vec(
                (
                    -50i64..50,
                    proptest::array::uniform5(0u16..3),
                ),
                0..8,
            )
            .prop_map(|terms| {
                Polynomial::from_terms(
                    terms
                        .into_iter()
                        .map(|(c, e)| (Monomial::new(e), BigInt::from(c)))
                        .collect(),
                )
            })
        }

        proptest! {
            #[test]
            fn addition_commutes(p in arb_poly(), q in arb_poly()) {
                prop_assert_eq!(&p + &q, &q + &p);
            }

            #[test]
            fn multiplication_commutes(p in arb_poly(), q in arb_poly()) {
                prop_assert_eq!(&p * &q, &q * &p);
            }

            #[test]
            fn multiplication_distributes(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
                prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            }

            #[test]
            fn division_inverts_multiplication(p in arb_poly(), q in arb_poly()) {
                prop_assume!(!q.is_zero());
                let prod = &p * &q;
                let back = prod.try_div_exact(&q).expect("product must divide");
                prop_assert_eq!(back, p);
            }

            #[test]
            fn serialization_round_trip(p in arb_poly()) {
                let json = serde_json::to_string(&p).unwrap();
                let back: Polynomial = serde_json::from_str(&json).unwrap();
                prop_assert_eq!(p, back);
            }
        }
    }
}
