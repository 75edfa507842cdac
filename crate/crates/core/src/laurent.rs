//! Exact sparse multivariate Laurent polynomials over the integers.
//!
//! Every value lives in an ambient [`Ring`] that interns variable names.
//! Mixing values from two rings is a hard error rather than a silent
//! capture by name.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("operands belong to different ambient rings")]
    RingMismatch,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("not divisible")]
    NotDivisible,
    #[error("variable {0} has no assigned value")]
    Unassigned(String),
    #[error("substitution sends a denominator to zero")]
    ZeroDenominator,
    #[error("undefined at the given point")]
    UndefinedAtPoint,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, LaurentError>;

/// Index of a variable within its ambient ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

#[derive(Debug)]
struct RingData {
    id: u64,
    names: Vec<String>,
    index: HashMap<String, u32>,
}

/// Ambient ring: a symbol table with a process-unique identity.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

static NEXT_RING: AtomicU64 = AtomicU64::new(1);

impl Ring {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Ring {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        Ring(Arc::new(RingData {
            id: NEXT_RING.fetch_add(1, AtomicOrdering::Relaxed),
            names,
            index,
        }))
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.0.names[v.0 as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.0.index.get(name).map(|&i| VarId(i))
    }

    /// The generator `name` as a polynomial.
    pub fn var(&self, name: &str) -> Result<LaurentPoly> {
        let v = self
            .var_id(name)
            .ok_or_else(|| LaurentError::UnknownVariable(name.to_string()))?;
        Ok(LaurentPoly::var(self, v))
    }

    pub fn same(&self, other: &Ring) -> bool {
        self.0.id == other.0.id
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}
impl Eq for Ring {}

impl std::hash::Hash for Ring {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.id.hash(state)
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring#{}{:?}", self.0.id, self.0.names)
    }
}

/// Laurent monomial: sorted `(var, exponent)` pairs with no zero exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(VarId, i64)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId, e: i64) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    /// Builds from arbitrary pairs, merging duplicates and dropping zeros.
    pub fn from_pairs<I: IntoIterator<Item = (VarId, i64)>>(pairs: I) -> Monomial {
        let mut map: BTreeMap<VarId, i64> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[(VarId, i64)] {
        &self.0
    }

    pub fn exponent(&self, v: VarId) -> i64 {
        self.0
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    fn combine(&self, other: &Monomial, sign: i64) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match take {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0, sign * b[j].1));
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + sign * b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.combine(other, 1)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.combine(other, -1)
    }

    pub fn pow(&self, k: i64) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }

    /// True when every exponent is nonnegative.
    pub fn is_polynomial(&self) -> bool {
        self.0.iter().all(|&(_, e)| e >= 0)
    }

    /// Componentwise minimum (missing entries count as zero).
    fn meet(&self, other: &Monomial) -> Monomial {
        let mut vars: Vec<VarId> = self.0.iter().chain(other.0.iter()).map(|&(v, _)| v).collect();
        vars.sort();
        vars.dedup();
        Monomial::from_pairs(vars.into_iter().map(|v| (v, self.exponent(v).min(other.exponent(v)))))
    }
}

/// Graded-lex order: total degree first, then the exponent of the
/// lowest-indexed variable where they differ.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(x), None) => return x.1.cmp(&0),
                (None, Some(y)) => return 0.cmp(&y.1),
                (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                    Ordering::Less => return x.1.cmp(&0),
                    Ordering::Greater => return 0.cmp(&y.1),
                    Ordering::Equal => {
                        if x.1 != y.1 {
                            return x.1.cmp(&y.1);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse Laurent polynomial with integer coefficients, terms sorted
/// ascending in graded-lex order.
#[derive(Clone)]
pub struct LaurentPoly {
    ring: Ring,
    terms: Vec<(Monomial, BigInt)>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same(&other.ring) && self.terms == other.terms
    }
}
impl Eq for LaurentPoly {}

impl std::hash::Hash for LaurentPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ring.hash(state);
        self.terms.hash(state);
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({})", self)
    }
}

fn ensure_same(a: &Ring, b: &Ring) -> Result<()> {
    if a.same(b) {
        Ok(())
    } else {
        Err(LaurentError::RingMismatch)
    }
}

impl LaurentPoly {
    pub fn zero(ring: &Ring) -> LaurentPoly {
        LaurentPoly { ring: ring.clone(), terms: Vec::new() }
    }

    pub fn one(ring: &Ring) -> LaurentPoly {
        LaurentPoly::constant(ring, BigInt::one())
    }

    pub fn constant<T: Into<BigInt>>(ring: &Ring, c: T) -> LaurentPoly {
        let c = c.into();
        LaurentPoly::monomial(ring, Monomial::one(), c)
    }

    pub fn var(ring: &Ring, v: VarId) -> LaurentPoly {
        LaurentPoly::monomial(ring, Monomial::var(v, 1), BigInt::one())
    }

    pub fn monomial(ring: &Ring, m: Monomial, c: BigInt) -> LaurentPoly {
        let terms = if c.is_zero() { Vec::new() } else { vec![(m, c)] };
        LaurentPoly { ring: ring.clone(), terms }
    }

    /// Builds the canonical form from arbitrary terms.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(ring: &Ring, terms: I) -> LaurentPoly {
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(BigInt::zero) += c;
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        LaurentPoly { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// The integer value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// The single variable if the polynomial is exactly one generator.
    pub fn as_var(&self) -> Option<VarId> {
        match self.terms.as_slice() {
            [(m, c)] if c.is_one() => match m.exponents() {
                [(v, 1)] => Some(*v),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, BigInt)> {
        self.terms.last()
    }

    /// Largest monomial dividing every term (componentwise minimum of exponents).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let first = match it.next() {
            Some((m, _)) => m.clone(),
            None => return Monomial::one(),
        };
        it.fold(first, |acc, (m, _)| acc.meet(m))
    }

    /// Variables that appear with a negative exponent somewhere.
    pub fn negative_support(&self) -> Vec<VarId> {
        let mut out: Vec<VarId> = self
            .terms
            .iter()
            .flat_map(|(m, _)| m.exponents().iter().filter(|&&(_, e)| e < 0).map(|&(v, _)| v))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_polynomial())
    }

    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        ensure_same(&self.ring, &other.ring)?;
        Ok(self.merge(other, false))
    }

    pub fn sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        ensure_same(&self.ring, &other.ring)?;
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &LaurentPoly, negate: bool) -> LaurentPoly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let sgn = |c: &BigInt| if negate { -c } else { c.clone() };
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0.clone(), sgn(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + sgn(&b[j].1);
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        LaurentPoly { ring: self.ring.clone(), terms: out }
    }

    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        ensure_same(&self.ring, &other.ring)?;
        if self.terms.len() == 1 {
            return Ok(other.mul_term(&self.terms[0].0, &self.terms[0].1));
        }
        if other.terms.len() == 1 {
            return Ok(self.mul_term(&other.terms[0].0, &other.terms[0].1));
        }
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity((self.terms.len() * other.terms.len()).min(1 << 16));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(LaurentPoly { ring: self.ring.clone(), terms })
    }

    /// Multiplication by a single term preserves the order of the terms.
    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero(&self.ring);
        }
        LaurentPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(mm, cc)| (mm.mul(m), cc * c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> LaurentPoly {
        self.mul_term(&Monomial::one(), c)
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return LaurentPoly {
                ring: self.ring.clone(),
                terms: vec![(m.pow(k as i64), num_traits::pow(c.clone(), k as usize))],
            };
        }
        let mut result = LaurentPoly::one(&self.ring);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("same ring");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same ring");
            }
        }
        result
    }

    /// Exact quotient `self / den`, or `NotDivisible`.
    pub fn exact_divide(&self, den: &LaurentPoly) -> Result<LaurentPoly> {
        ensure_same(&self.ring, &den.ring)?;
        if den.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero(&self.ring));
        }
        if den.terms.len() == 1 {
            let (m, c) = &den.terms[0];
            let mut terms = Vec::with_capacity(self.terms.len());
            for (mm, cc) in &self.terms {
                let (q, r) = cc.div_rem(c);
                if !r.is_zero() {
                    return Err(LaurentError::NotDivisible);
                }
                terms.push((mm.div(m), q));
            }
            return Ok(LaurentPoly { ring: self.ring.clone(), terms });
        }
        // Strip monomial content so both sides are polynomials with no
        // monomial factor; a Laurent quotient is then a polynomial.
        let cn = self.monomial_content();
        let cd = den.monomial_content();
        let one = BigInt::one();
        let n = self.mul_term(&Monomial::one().div(&cn), &one);
        let d = den.mul_term(&Monomial::one().div(&cd), &one);
        let q = poly_divide(&n, &d)?;
        Ok(q.mul_term(&cn.div(&cd), &one))
    }

    /// Substitutes each variable by a rational expression. Missing
    /// variables are an error.
    pub fn substitute(&self, target: &Ring, assignment: &dyn Fn(VarId) -> Option<RationalExpr>) -> Result<RationalExpr> {
        // Exponent range per variable.
        let mut range: BTreeMap<VarId, (i64, i64)> = BTreeMap::new();
        for (m, _) in &self.terms {
            for &(v, e) in m.exponents() {
                let r = range.entry(v).or_insert((0, 0));
                r.0 = r.0.min(e);
                r.1 = r.1.max(e);
            }
        }
        let mut values: BTreeMap<VarId, RationalExpr> = BTreeMap::new();
        for &v in range.keys() {
            let val = assignment(v).ok_or_else(|| LaurentError::Unassigned(self.ring.name(v).to_string()))?;
            ensure_same(target, val.ring())?;
            values.insert(v, val);
        }
        let mut cache: HashMap<(VarId, bool, i64), LaurentPoly> = HashMap::new();
        let mut power = |v: VarId, numer: bool, k: i64, values: &BTreeMap<VarId, RationalExpr>| -> LaurentPoly {
            cache
                .entry((v, numer, k))
                .or_insert_with(|| {
                    let r = &values[&v];
                    let base = if numer { &r.num } else { &r.den };
                    base.pow(k as u32)
                })
                .clone()
        };
        // Common denominator D = prod den_v^{max} * num_v^{-min}.
        let mut den = LaurentPoly::one(target);
        for (&v, &(lo, hi)) in &range {
            if lo < 0 {
                if values[&v].num.is_zero() {
                    return Err(LaurentError::ZeroDenominator);
                }
                den = den.mul(&power(v, true, -lo, &values))?;
            }
            if hi > 0 && !values[&v].den.is_one() {
                den = den.mul(&power(v, false, hi, &values))?;
            }
        }
        let mut num = LaurentPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = LaurentPoly::constant(target, c.clone());
            for (&v, &(lo, hi)) in &range {
                let e = m.exponent(v);
                let up = e - lo;
                if up > 0 {
                    t = t.mul(&power(v, true, up, &values))?;
                }
                let down = hi - e;
                if down > 0 && !values[&v].den.is_one() {
                    t = t.mul(&power(v, false, down, &values))?;
                }
            }
            num = num.add(&t)?;
        }
        Ok(RationalExpr { num, den })
    }

    /// Exact rational value at an integer point.
    pub fn evaluate(&self, point: &dyn Fn(VarId) -> Option<BigInt>) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for &(v, e) in m.exponents() {
                let x = point(v).ok_or_else(|| LaurentError::Unassigned(self.ring.name(v).to_string()))?;
                if e < 0 && x.is_zero() {
                    return Err(LaurentError::UndefinedAtPoint);
                }
                let p = num_traits::pow(x, e.unsigned_abs() as usize);
                if e > 0 {
                    t *= BigRational::from_integer(p);
                } else {
                    t /= BigRational::from_integer(p);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Moves the polynomial into another ring along a variable map.
    pub fn transport(&self, target: &Ring, map: &dyn Fn(VarId) -> VarId) -> LaurentPoly {
        LaurentPoly::from_terms(
            target,
            self.terms
                .iter()
                .map(|(m, c)| (Monomial::from_pairs(m.exponents().iter().map(|&(v, e)| (map(v), e))), c.clone())),
        )
    }

    /// Fraction form: polynomial numerator over a monomial denominator,
    /// e.g. `(1 + x2 + x1*x3)/(x1*x2)`.
    pub fn to_fraction_string(&self) -> String {
        let content = self.monomial_content();
        let den = Monomial::from_pairs(content.exponents().iter().filter(|&&(_, e)| e < 0).map(|&(v, e)| (v, -e)));
        if den.is_one() {
            return self.to_string();
        }
        let num = self.mul_term(&den, &BigInt::one());
        let num_s = num.to_string();
        let num_s = if num.len() > 1 { format!("({})", num_s) } else { num_s };
        let den_s = render_monomial(&self.ring, &den);
        if den.exponents().len() > 1 || den.exponents()[0].1 > 1 {
            format!("{}/({})", num_s, den_s)
        } else {
            format!("{}/{}", num_s, den_s)
        }
    }
}

/// Exact division of polynomials (nonnegative exponents) by leading-term
/// elimination in graded-lex order.
fn poly_divide(n: &LaurentPoly, d: &LaurentPoly) -> Result<LaurentPoly> {
    let (lm, lc) = d.leading().expect("nonzero divisor").clone();
    let mut rem: BTreeMap<Monomial, BigInt> = n.terms.iter().cloned().collect();
    let mut quot: Vec<(Monomial, BigInt)> = Vec::new();
    while let Some((rm, rc)) = rem.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
        let qm = rm.div(&lm);
        if !qm.is_polynomial() {
            return Err(LaurentError::NotDivisible);
        }
        let (qc, r) = rc.div_rem(&lc);
        if !r.is_zero() {
            return Err(LaurentError::NotDivisible);
        }
        for (dm, dc) in &d.terms {
            let m = dm.mul(&qm);
            let entry = rem.entry(m).or_insert_with(BigInt::zero);
            *entry -= dc * &qc;
            if entry.is_zero() {
                let key = dm.mul(&qm);
                rem.remove(&key);
            }
        }
        quot.push((qm, qc));
    }
    quot.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(LaurentPoly { ring: n.ring.clone(), terms: quot })
}

fn render_monomial(ring: &Ring, m: &Monomial) -> String {
    m.exponents()
        .iter()
        .map(|&(v, e)| {
            if e == 1 {
                ring.name(v).to_string()
            } else {
                format!("{}^{}", ring.name(v), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Canonical text: terms ascending in graded-lex order, `*` for products,
/// `^` for exponents.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if m.is_one() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", render_monomial(&self.ring, m))?;
            } else {
                write!(f, "{}*{}", abs, render_monomial(&self.ring, m))?;
            }
        }
        Ok(())
    }
}

/// A fraction of Laurent polynomials, not kept in lowest terms.
#[derive(Clone)]
pub struct RationalExpr {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

impl fmt::Debug for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalExpr({})", self)
    }
}

impl RationalExpr {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<RationalExpr> {
        ensure_same(&num.ring, &den.ring)?;
        if den.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        Ok(RationalExpr { num, den })
    }

    pub fn ring(&self) -> &Ring {
        &self.num.ring
    }

    pub fn constant<T: Into<BigInt>>(ring: &Ring, c: T) -> RationalExpr {
        RationalExpr::from(LaurentPoly::constant(ring, c))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RationalExpr) -> Result<RationalExpr> {
        if self.den == o.den {
            return RationalExpr::new(self.num.add(&o.num)?, self.den.clone());
        }
        RationalExpr::new(self.num.mul(&o.den)?.add(&o.num.mul(&self.den)?)?, self.den.mul(&o.den)?)
    }

    pub fn sub(&self, o: &RationalExpr) -> Result<RationalExpr> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RationalExpr {
        RationalExpr { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &RationalExpr) -> Result<RationalExpr> {
        RationalExpr::new(self.num.mul(&o.num)?, self.den.mul(&o.den)?)
    }

    pub fn div(&self, o: &RationalExpr) -> Result<RationalExpr> {
        if o.num.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        RationalExpr::new(self.num.mul(&o.den)?, self.den.mul(&o.num)?)
    }

    pub fn inv(&self) -> Result<RationalExpr> {
        RationalExpr::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, k: i64) -> Result<RationalExpr> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let k = k.unsigned_abs() as u32;
        Ok(RationalExpr { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// Field equality by cross-multiplication.
    pub fn equals(&self, o: &RationalExpr) -> Result<bool> {
        ensure_same(self.ring(), o.ring())?;
        if self.den == o.den {
            return Ok(self.num == o.num);
        }
        Ok(self.num.mul(&o.den)? == o.num.mul(&self.den)?)
    }

    /// The Laurent polynomial equal to this fraction, if there is one.
    pub fn to_laurent(&self) -> Result<LaurentPoly> {
        self.num.exact_divide(&self.den)
    }

    pub fn is_laurent(&self) -> Option<LaurentPoly> {
        self.to_laurent().ok()
    }

    pub fn substitute(&self, target: &Ring, assignment: &dyn Fn(VarId) -> Option<RationalExpr>) -> Result<RationalExpr> {
        let n = self.num.substitute(target, assignment)?;
        let d = self.den.substitute(target, assignment)?;
        if d.num.is_zero() {
            return Err(LaurentError::ZeroDenominator);
        }
        n.div(&d)
    }

    pub fn evaluate(&self, point: &dyn Fn(VarId) -> Option<BigInt>) -> Result<BigRational> {
        let d = self.den.evaluate(point)?;
        if d.is_zero() {
            return Err(LaurentError::UndefinedAtPoint);
        }
        Ok(self.num.evaluate(point)? / d)
    }

    /// Text in lowest available form: Laurent fraction form when the
    /// quotient is exact, otherwise `(num)/(den)`.
    pub fn to_pretty_string(&self) -> String {
        match self.to_laurent() {
            Ok(p) => p.to_fraction_string(),
            Err(_) => {
                // polynomial over polynomial: pull the monomial contents out
                // and split the resulting monomial by sign of exponent
                let (cn, cd) = (self.num.monomial_content(), self.den.monomial_content());
                let m = cn.div(&cd);
                let up = Monomial::from_pairs(m.exponents().iter().filter(|&&(_, e)| e > 0).copied());
                let down = Monomial::from_pairs(m.exponents().iter().filter(|&&(_, e)| e < 0).map(|&(v, e)| (v, -e)));
                let one = BigInt::one();
                let num = self.num.mul_term(&cn.pow(-1), &one).mul_term(&up, &one);
                let den = self.den.mul_term(&cd.pow(-1), &one).mul_term(&down, &one);
                let wrap = |p: &LaurentPoly| if p.len() > 1 { format!("({})", p) } else { p.to_string() };
                let den_s = den.to_string();
                let den_s = if den.len() > 1 || den_s.contains('*') || den_s.starts_with('-') {
                    format!("({})", den_s)
                } else {
                    den_s
                };
                format!("{}/{}", wrap(&num), den_s)
            }
        }
    }

    /// Parses expressions such as `(1 + x1*x3)/x2` or `2*x1^-1 - 3`.
    pub fn parse(ring: &Ring, text: &str) -> Result<RationalExpr> {
        let mut p = Parser { ring, s: text.as_bytes(), pos: 0 };
        let r = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(r)
    }
}

impl From<LaurentPoly> for RationalExpr {
    fn from(p: LaurentPoly) -> RationalExpr {
        let den = LaurentPoly::one(&p.ring);
        RationalExpr { num: p, den }
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

struct Parser<'a> {
    ring: &'a Ring,
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> LaurentError {
        LaurentError::Parse { col: self.pos + 1, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RationalExpr> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalExpr> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?)?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.power()?;
                    if d.is_zero() {
                        self.pos = at;
                        return Err(self.err("division by zero"));
                    }
                    acc = acc.div(&d)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<RationalExpr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let neg = if self.s.get(self.pos) == Some(&b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let n = self.integer()?.to_i64().ok_or_else(|| self.err("exponent too large"))?;
            let e = if neg { -n } else { n };
            if e < 0 && base.is_zero() {
                return Err(self.err("negative power of zero"));
            }
            return base.pow(e);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        Ok(text.parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<RationalExpr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            Some(c) if c.is_ascii_digit() => Ok(RationalExpr::constant(self.ring, self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len() {
                    let c = self.s[self.pos];
                    if c.is_ascii_alphanumeric() || c == b'_' || c == b'\'' || c == b'.' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                match self.ring.var_id(name) {
                    Some(v) => Ok(RationalExpr::from(LaurentPoly::var(self.ring, v))),
                    None => {
                        self.pos = start;
                        Err(self.err(&format!("unknown variable `{}`", name)))
                    }
                }
            }
            _ => Err(self.err("expected a number, variable or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Ring {
        Ring::new(&["x1", "x2", "x3", "x4"])
    }

    fn p(r: &Ring, s: &str) -> LaurentPoly {
        RationalExpr::parse(r, s).unwrap().to_laurent().unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let r = ring();
        let a = p(&r, "x1 + 1").mul(&p(&r, "x1 - 1")).unwrap();
        assert_eq!(a.to_string(), "-1 + x1^2");
    }

    #[test]
    fn inverse_monomial_cancels() {
        let r = ring();
        assert!(p(&r, "x2^-1").mul(&p(&r, "x2")).unwrap().is_one());
    }

    #[test]
    fn sum_renders_graded_lex() {
        let r = ring();
        let a = p(&r, "1 + x1*x3").add(&p(&r, "x2")).unwrap();
        assert_eq!(a.to_string(), "1 + x2 + x1*x3");
    }

    #[test]
    fn divide_by_monomial_factor() {
        let r = ring();
        assert_eq!(p(&r, "x1*x2 + x1").exact_divide(&p(&r, "x1")).unwrap(), p(&r, "x2 + 1"));
    }

    #[test]
    fn constant_term_obstructs_division() {
        let r = ring();
        assert_eq!(p(&r, "1 + x2 + x1*x3").exact_divide(&p(&r, "x2 + x1")), Err(LaurentError::NotDivisible));
        let a = p(&r, "x2^2 + x1^2");
        assert_eq!(a.exact_divide(&p(&r, "x3 + 1")), Err(LaurentError::NotDivisible));
        assert_eq!(a.exact_divide(&p(&r, "x3")).unwrap().to_string(), "x2^2*x3^-1 + x1^2*x3^-1");
    }

    #[test]
    fn laurent_quotient_with_negative_part() {
        let r = ring();
        // (1 + x)/(x + x^2) = x^-1
        let q = p(&r, "1 + x1").exact_divide(&p(&r, "x1 + x1^2")).unwrap();
        assert_eq!(q, p(&r, "x1^-1"));
    }

    #[test]
    fn is_laurent_cases() {
        let r = ring();
        let e = RationalExpr::parse(&r, "(x1^2 - 1)/(x1 - 1)").unwrap();
        assert_eq!(e.is_laurent().unwrap(), p(&r, "x1 + 1"));
        let e = RationalExpr::parse(&r, "2*x2/(1 + x1)").unwrap();
        assert!(e.is_laurent().is_none());
    }

    #[test]
    fn substitution() {
        let r = ring();
        let u = Ring::new(&["u1", "u2"]);
        let u1 = RationalExpr::from(u.var("u1").unwrap());
        let out = p(&r, "1 + x1*x3").substitute(&u, &|_| Some(u1.clone())).unwrap();
        assert_eq!(out.to_laurent().unwrap().to_string(), "1 + u1^2");
        let one = RationalExpr::constant(&r, 1);
        let out = p(&r, "x4").substitute(&r, &|_| Some(one.clone())).unwrap();
        assert!(out.to_laurent().unwrap().is_one());
        let missing = p(&r, "x4").substitute(&r, &|_| None);
        assert!(matches!(missing, Err(LaurentError::Unassigned(_))));
    }

    #[test]
    fn evaluation() {
        let r = ring();
        let v = |vals: Vec<i64>| move |x: VarId| vals.get(x.0 as usize).map(|&n| BigInt::from(n));
        assert_eq!(p(&r, "x1 + x2").evaluate(&v(vec![2, 3])).unwrap(), BigRational::from_integer(5.into()));
        assert_eq!(p(&r, "x1^-1").evaluate(&v(vec![0])), Err(LaurentError::UndefinedAtPoint));
        let d4 = p(&r, "(1 + x1*x2*x3 + 3*x4 + 3*x4^2 + x4^3)/(x1*x2*x3*x4)");
        assert_eq!(d4.evaluate(&v(vec![1, 1, 1, 1])).unwrap(), BigRational::from_integer(9.into()));
    }

    #[test]
    fn cross_ring_is_error() {
        let a = ring();
        let b = ring();
        assert_eq!(a.var("x1").unwrap().add(&b.var("x1").unwrap()), Err(LaurentError::RingMismatch));
    }

    #[test]
    fn fraction_rendering() {
        let r = ring();
        assert_eq!(p(&r, "(1 + x2 + x1*x3)/(x1*x2)").to_fraction_string(), "(1 + x2 + x1*x3)/(x1*x2)");
        assert_eq!(p(&r, "(1 + x2)/x1").to_fraction_string(), "(1 + x2)/x1");
        assert_eq!(p(&r, "x1^-2").to_fraction_string(), "1/(x1^2)");
    }

    #[test]
    fn parse_error_has_column() {
        let r = ring();
        match RationalExpr::parse(&r, "1 + y7") {
            Err(LaurentError::Parse { col, .. }) => assert_eq!(col, 5),
            other => panic!("{:?}", other),
        }
    }
}
