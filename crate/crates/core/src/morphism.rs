//! Rooted cluster morphisms: construction, application and
//! depth-bounded verification of the mutation-compatibility condition.
//!
//! A morphism is given on the initial cluster of its source: each source
//! variable goes to a target cluster variable or to an integer. The ring
//! homomorphism it induces is evaluated by substitution.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::laurent::{LaurentError, LaurentPoly, RationalExpr, Ring, VarId};
use crate::seed::{self, express_in_cluster, Expressed, Seed, SeedError, SeedFile, SeedIso};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error("CM1 violation at `{0}`: image is not a target cluster variable or an integer")]
    CM1Violation(String),
    #[error("CM2 violation at `{0}`: exchangeable variable sent to a frozen variable")]
    CM2Violation(String),
    #[error("assignment has {got} entries for {want} source variables")]
    AssignmentLength { got: usize, want: usize },
    #[error("morphism endpoints must be root seeds")]
    NotRooted,
    #[error("target of the first morphism is not the source of the second")]
    SeedMismatch,
    #[error("a denominator is sent to zero")]
    ZeroDenominatorImage,
    #[error("no variable `{0}`")]
    NoSuchVariable(String),
    #[error("sequence is not biadmissible at position {0}")]
    NotBiadmissible(usize),
    #[error("invalid morphism file: {0}")]
    Format(String),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

pub type Result<T> = std::result::Result<T, MorphismError>;

/// Image of one source variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Image {
    Var(usize),
    Const(BigInt),
}

/// A candidate rooted cluster morphism. Values built with
/// [`MorphismSpec::new`] satisfy CM1 and CM2; [`MorphismSpec::candidate`]
/// skips CM2 so that non-morphisms can still be explored.
#[derive(Debug, Clone)]
pub struct MorphismSpec {
    source: Seed,
    target: Seed,
    assignment: Vec<Image>,
}

/// Which source variables CM3 compares after a biadmissible sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Cm3Scope {
    /// The variables produced by the sequence's own mutations.
    #[default]
    Exchanged,
    /// Every variable of the initial cluster.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerificationStatus {
    VerifiedToDepth,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Source variables mutated, labelled as they were when mutated.
    pub sequence: Vec<String>,
    /// The corresponding target variables.
    pub image_sequence: Vec<String>,
    /// Initial source variable whose two values disagree.
    pub variable: String,
    /// `f` applied to the mutated source variable.
    pub source_value: String,
    /// The mutated target variable.
    pub target_value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub depth: usize,
    pub scope: Cm3Scope,
    pub status: VerificationStatus,
    pub sequences_checked: usize,
    pub witness: Option<Witness>,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.status == VerificationStatus::VerifiedToDepth
    }
}

/// Outcome of replaying one sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceCheck {
    pub sequence: Vec<String>,
    pub image_sequence: Vec<String>,
    pub mismatches: Vec<Witness>,
}

/// Working state along a biadmissible sequence.
#[derive(Clone)]
struct Walk {
    src: Seed,
    tgt: Seed,
    seq: Vec<String>,
    img: Vec<String>,
    /// source position -> target position mutated alongside it; a target
    /// position re-paired by a later step drops its earlier partner
    pairs: BTreeMap<usize, usize>,
    last: Option<usize>,
}

impl MorphismSpec {
    /// Validates CM1 and CM2.
    pub fn new(source: Seed, target: Seed, assignment: Vec<Image>) -> Result<MorphismSpec> {
        let f = MorphismSpec::candidate(source, target, assignment)?;
        if let Some(i) = f.cm2_violations().first() {
            return Err(MorphismError::CM2Violation(f.source.label(*i).to_string()));
        }
        Ok(f)
    }

    /// Validates CM1 only.
    pub fn candidate(source: Seed, target: Seed, assignment: Vec<Image>) -> Result<MorphismSpec> {
        if !source.is_root() || !target.is_root() {
            return Err(MorphismError::NotRooted);
        }
        if assignment.len() != source.len() {
            return Err(MorphismError::AssignmentLength { got: assignment.len(), want: source.len() });
        }
        for (i, a) in assignment.iter().enumerate() {
            if let Image::Var(j) = a {
                if *j >= target.len() {
                    return Err(MorphismError::CM1Violation(source.label(i).to_string()));
                }
            }
        }
        Ok(MorphismSpec { source, target, assignment })
    }

    /// Builds from a label map; values are target labels or integers.
    pub fn from_labels(source: Seed, target: Seed, map: &[(String, Value)], check_cm2: bool) -> Result<MorphismSpec> {
        let mut assignment: Vec<Option<Image>> = vec![None; source.len()];
        for (k, v) in map {
            let i = source.index_of(k).map_err(|_| MorphismError::NoSuchVariable(k.clone()))?;
            let img = match v {
                Value::String(t) => {
                    Image::Var(target.resolve(t).ok_or_else(|| MorphismError::CM1Violation(k.clone()))?)
                }
                Value::Number(n) => Image::Const(
                    n.as_i64().map(BigInt::from).ok_or_else(|| MorphismError::CM1Violation(k.clone()))?,
                ),
                _ => return Err(MorphismError::CM1Violation(k.clone())),
            };
            assignment[i] = Some(img);
        }
        let assignment = assignment
            .into_iter()
            .enumerate()
            .map(|(i, a)| a.ok_or_else(|| MorphismError::Format(format!("no image for `{}`", source.label(i)))))
            .collect::<Result<Vec<_>>>()?;
        if check_cm2 {
            MorphismSpec::new(source, target, assignment)
        } else {
            MorphismSpec::candidate(source, target, assignment)
        }
    }

    pub fn identity(s: &Seed) -> Result<MorphismSpec> {
        MorphismSpec::new(s.clone(), s.clone(), (0..s.len()).map(Image::Var).collect())
    }

    pub fn source(&self) -> &Seed {
        &self.source
    }

    pub fn target(&self) -> &Seed {
        &self.target
    }

    pub fn assignment(&self) -> &[Image] {
        &self.assignment
    }

    /// Image of the source variable labelled `name`.
    pub fn image_of(&self, name: &str) -> Option<&Image> {
        self.source.resolve(name).map(|i| &self.assignment[i])
    }

    pub fn image_label(&self, i: usize) -> String {
        match &self.assignment[i] {
            Image::Var(j) => self.target.label(*j).to_string(),
            Image::Const(c) => c.to_string(),
        }
    }

    /// Source exchangeables sent to frozen target variables.
    pub fn cm2_violations(&self) -> Vec<usize> {
        (0..self.source.len())
            .filter(|&i| {
                self.source.is_exchangeable(i)
                    && matches!(self.assignment[i], Image::Var(j) if !self.target.is_exchangeable(j))
            })
            .collect()
    }

    fn value(&self, i: usize) -> RationalExpr {
        let ring = self.target.ring();
        match &self.assignment[i] {
            Image::Var(j) => RationalExpr::from(LaurentPoly::var(ring, VarId(*j as u32))),
            Image::Const(c) => RationalExpr::constant(ring, c.clone()),
        }
    }

    /// The ring homomorphism on an element over the source root ring.
    pub fn apply(&self, elem: &RationalExpr) -> Result<RationalExpr> {
        if elem.ring() != self.source.ring() {
            return Err(LaurentError::RingMismatch.into());
        }
        let values: Vec<RationalExpr> = (0..self.source.len()).map(|i| self.value(i)).collect();
        elem.substitute(self.target.ring(), &|v| values.get(v.0 as usize).cloned()).map_err(|e| match e {
            LaurentError::ZeroDenominator | LaurentError::DivisionByZero => MorphismError::ZeroDenominatorImage,
            e => e.into(),
        })
    }

    pub fn apply_poly(&self, p: &LaurentPoly) -> Result<RationalExpr> {
        self.apply(&RationalExpr::from(p.clone()))
    }

    /// Target position holding `f(x_k)` after the walk so far, if it is
    /// exchangeable there.
    fn image_position(&self, w: &Walk, k: usize) -> Result<Option<usize>> {
        let img = self.apply_poly(w.src.expansion(k))?;
        let lp = match img.to_laurent() {
            Ok(p) => p,
            Err(_) => return Ok(None),
        };
        Ok((0..w.tgt.len()).find(|&j| w.tgt.is_exchangeable(j) && *w.tgt.expansion(j) == lp))
    }

    fn step(&self, w: &Walk, k: usize) -> Result<Option<Walk>> {
        if !w.src.is_exchangeable(k) {
            return Ok(None);
        }
        let j = match self.image_position(w, k)? {
            Some(j) => j,
            None => return Ok(None),
        };
        let mut seq = w.seq.clone();
        seq.push(w.src.label(k).to_string());
        let mut img = w.img.clone();
        img.push(w.tgt.label(j).to_string());
        let mut pairs = w.pairs.clone();
        pairs.retain(|_, q| *q != j);
        pairs.insert(k, j);
        Ok(Some(Walk { src: w.src.mutate(k)?, tgt: w.tgt.mutate(j)?, seq, img, pairs, last: Some(k) }))
    }

    fn mismatches(&self, w: &Walk, scope: Cm3Scope, first_only: bool) -> Result<Vec<Witness>> {
        let positions: Vec<(usize, RationalExpr)> = match scope {
            Cm3Scope::Exchanged => w
                .pairs
                .iter()
                .map(|(&p, &q)| (p, RationalExpr::from(w.tgt.expansion(q).clone())))
                .collect(),
            Cm3Scope::All => (0..self.source.len())
                .map(|i| {
                    let t = match &self.assignment[i] {
                        Image::Var(j) => RationalExpr::from(w.tgt.expansion(*j).clone()),
                        Image::Const(c) => RationalExpr::constant(self.target.ring(), c.clone()),
                    };
                    (i, t)
                })
                .collect(),
        };
        let mut out = Vec::new();
        for (p, want) in positions {
            let got = self.apply_poly(w.src.expansion(p))?;
            if !got.equals(&want)? {
                out.push(Witness {
                    sequence: w.seq.clone(),
                    image_sequence: w.img.clone(),
                    variable: self.source.label(p).to_string(),
                    source_value: got.to_pretty_string(),
                    target_value: want.to_pretty_string(),
                });
                if first_only {
                    break;
                }
            }
        }
        Ok(out)
    }

    fn start(&self) -> Walk {
        Walk {
            src: self.source.clone(),
            tgt: self.target.clone(),
            seq: Vec::new(),
            img: Vec::new(),
            pairs: BTreeMap::new(),
            last: None,
        }
    }

    /// Depth-first walk in lexicographic order; stops at the first
    /// mismatch. Returns (sequences visited, first failure). When checking,
    /// immediate repeats are skipped: mutating twice at one position
    /// restores both seeds.
    fn dfs(&self, w: &Walk, depth: usize, scope: Option<Cm3Scope>, out: &mut Vec<Vec<String>>) -> Result<(usize, Option<Witness>)> {
        let mut count = 0;
        if w.seq.len() == depth {
            return Ok((0, None));
        }
        for k in 0..w.src.len() {
            if scope.is_some() && w.last == Some(k) {
                continue;
            }
            let next = match self.step(w, k)? {
                Some(n) => n,
                None => continue,
            };
            count += 1;
            if let Some(scope) = scope {
                if let Some(wit) = self.mismatches(&next, scope, true)?.into_iter().next() {
                    return Ok((count, Some(wit)));
                }
            } else {
                out.push(next.seq.clone());
            }
            let (c, wit) = self.dfs(&next, depth, scope, out)?;
            count += c;
            if wit.is_some() {
                return Ok((count, wit));
            }
        }
        Ok((count, None))
    }

    /// All biadmissible sequences of length 1..=depth, in lexicographic order.
    pub fn biadmissible_sequences(&self, depth: usize) -> Result<Vec<Vec<String>>> {
        let mut out = Vec::new();
        self.dfs(&self.start(), depth, None, &mut out)?;
        Ok(out)
    }

    /// CM3 on every biadmissible sequence of length at most `depth`.
    pub fn verify_cm3(&self, depth: usize) -> Result<VerificationReport> {
        self.verify_cm3_scoped(depth, Cm3Scope::Exchanged)
    }

    /// As [`MorphismSpec::verify_cm3`], with an explicit comparison scope.
    /// First-level branches run in parallel; the reported witness is the
    /// lexicographically first failure.
    pub fn verify_cm3_scoped(&self, depth: usize, scope: Cm3Scope) -> Result<VerificationReport> {
        let root = self.start();
        let mut checked = 0;
        let mut witness = None;
        if depth > 0 {
            let branches: Vec<Result<(usize, Option<Witness>)>> = (0..self.source.len())
                .into_par_iter()
                .map(|k| {
                    let next = match self.step(&root, k)? {
                        Some(n) => n,
                        None => return Ok((0, None)),
                    };
                    if let Some(w) = self.mismatches(&next, scope, true)?.into_iter().next() {
                        return Ok((1, Some(w)));
                    }
                    let (c, w) = self.dfs(&next, depth, Some(scope), &mut Vec::new())?;
                    Ok((c + 1, w))
                })
                .collect();
            for b in branches {
                let (c, w) = b?;
                checked += c;
                if witness.is_none() {
                    witness = w;
                }
            }
        }
        Ok(VerificationReport {
            depth,
            scope,
            status: if witness.is_some() { VerificationStatus::Failed } else { VerificationStatus::VerifiedToDepth },
            sequences_checked: checked,
            witness,
        })
    }

    /// CM3 restricted to sequences of length one.
    pub fn verify_locally(&self) -> Result<VerificationReport> {
        if let Some(i) = self.cm2_violations().first() {
            return Err(MorphismError::CM2Violation(self.source.label(*i).to_string()));
        }
        self.verify_cm3(1)
    }

    /// Replays one named sequence and reports every disagreement at its end.
    pub fn check_sequence<S: AsRef<str>>(&self, names: &[S], scope: Cm3Scope) -> Result<SequenceCheck> {
        let mut w = self.start();
        for (i, name) in names.iter().enumerate() {
            let k = w.src.resolve(name.as_ref()).ok_or_else(|| MorphismError::NoSuchVariable(name.as_ref().to_string()))?;
            w = self.step(&w, k)?.ok_or(MorphismError::NotBiadmissible(i))?;
        }
        Ok(SequenceCheck { mismatches: self.mismatches(&w, scope, false)?, sequence: w.seq, image_sequence: w.img })
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &MorphismSpec) -> Result<MorphismSpec> {
        compose(g, self)
    }

    /// The same morphism over `source`, which must be a root seed with
    /// identical labels, exchangeable set and matrix. Lets morphisms read
    /// from separate files be composed.
    pub fn rebase(&self, source: &Seed) -> Result<MorphismSpec> {
        if !source.is_root() || source.to_file() != self.source.to_file() {
            return Err(MorphismError::SeedMismatch);
        }
        MorphismSpec::candidate(source.clone(), self.target.clone(), self.assignment.clone())
    }

    /// Morphism file representation.
    pub fn to_file(&self) -> MorphismFile {
        let map = (0..self.source.len())
            .map(|i| {
                let v = match &self.assignment[i] {
                    Image::Var(j) => Value::String(self.target.label(*j).to_string()),
                    Image::Const(c) => c.to_i64().map(Value::from).unwrap_or_else(|| Value::String(c.to_string())),
                };
                (self.source.label(i).to_string(), v)
            })
            .collect();
        MorphismFile { source: self.source.to_file(), target: self.target.to_file(), map }
    }

    pub fn from_file(f: &MorphismFile) -> Result<MorphismSpec> {
        let s = Seed::from_file(&f.source)?;
        let t = Seed::from_file(&f.target)?;
        let map: Vec<(String, Value)> = f.map.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        MorphismSpec::from_labels(s, t, &map, true)
    }
}

/// On-disk morphism format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismFile {
    pub source: SeedFile,
    pub target: SeedFile,
    pub map: serde_json::Map<String, Value>,
}

/// Composition `g ∘ f`; requires `f`'s target to be `g`'s source.
pub fn compose(g: &MorphismSpec, f: &MorphismSpec) -> Result<MorphismSpec> {
    if f.target != g.source {
        return Err(MorphismError::SeedMismatch);
    }
    let assignment = f
        .assignment
        .iter()
        .map(|a| match a {
            Image::Var(j) => g.assignment[*j].clone(),
            Image::Const(c) => Image::Const(c.clone()),
        })
        .collect();
    MorphismSpec::new(f.source.clone(), g.target.clone(), assignment)
}

/// Positions of the target cluster hit by `f`, ascending.
pub fn image_positions(f: &MorphismSpec) -> Vec<usize> {
    let mut pos: Vec<usize> = f.assignment.iter().filter_map(|a| if let Image::Var(j) = a { Some(*j) } else { None }).collect();
    pos.sort();
    pos.dedup();
    pos
}

/// `(x' ∩ f(x), ex' ∩ f(ex), B'[f(x)])` as a fresh root seed.
pub fn image_seed(f: &MorphismSpec) -> Seed {
    let pos = image_positions(f);
    let sub = f.target.subseed(&pos);
    let ex: Vec<bool> = pos
        .iter()
        .map(|&j| {
            f.target.is_exchangeable(j)
                && (0..f.source.len()).any(|i| f.source.is_exchangeable(i) && f.assignment[i] == Image::Var(j))
        })
        .collect();
    Seed::root(sub.labels().to_vec(), ex, sub.matrix().clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum IdealVerdict {
    IdealToDepth { depth: usize },
    Counterexample { variable: String, image: String },
    Inconclusive { reason: String },
}

/// Compares `f(X_source)` with the cluster variables of the image seed,
/// both generated to `depth`.
pub fn is_ideal(f: &MorphismSpec, depth: usize) -> Result<IdealVerdict> {
    let img = image_seed(f);
    let pos = image_positions(f);
    let to_target = |p: &LaurentPoly| p.transport(f.target.ring(), &|v| VarId(pos[v.0 as usize] as u32));
    let img_vars: Vec<LaurentPoly> = seed::cluster_variables(&img, depth)?.variables.iter().map(to_target).collect();
    let src_vars = seed::cluster_variables(&f.source, depth)?.variables;
    let mut images = Vec::new();
    let mut forward = true;
    for v in &src_vars {
        let r = f.apply_poly(v)?;
        let lp = r.to_laurent().ok();
        let ok = match &lp {
            Some(p) => p.as_constant().is_some() || img_vars.contains(p),
            None => false,
        };
        if !ok {
            forward = false;
            // Outside the upper bound of the image seed means outside its algebra.
            if let Some(elem) = to_image_ring(&r, &img, &pos) {
                if let BoundMembership::NotMember { .. } = check_upper_bound_membership(&elem, &img)? {
                    return Ok(IdealVerdict::Counterexample { variable: v.to_fraction_string(), image: r.to_pretty_string() });
                }
            }
        }
        if let Some(p) = lp {
            images.push(p);
        }
    }
    let backward = img_vars.iter().all(|p| images.contains(p));
    Ok(if forward && backward {
        IdealVerdict::IdealToDepth { depth }
    } else if !backward {
        IdealVerdict::Inconclusive { reason: "an image-seed variable was not reached from the source at this depth".into() }
    } else {
        IdealVerdict::Inconclusive { reason: "some image lies in the upper bound but is not a cluster variable at this depth".into() }
    })
}

fn to_image_ring(r: &RationalExpr, img: &Seed, pos: &[usize]) -> Option<RationalExpr> {
    let back = |p: &LaurentPoly| -> Option<LaurentPoly> {
        let ok = p.terms().iter().all(|(m, _)| m.exponents().iter().all(|(v, _)| pos.contains(&(v.0 as usize))));
        ok.then(|| p.transport(img.ring(), &|v| VarId(pos.iter().position(|&q| q == v.0 as usize).unwrap() as u32)))
    };
    RationalExpr::new(back(&r.num)?, back(&r.den)?).ok()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoVerdict {
    Iso(SeedIso),
    NotIso(String),
}

/// Bijective on variables, exchangeables onto exchangeables, and the
/// simplified matrices agree up to a global sign.
pub fn classify_isomorphism(f: &MorphismSpec) -> IsoVerdict {
    let n = f.source.len();
    if f.target.len() != n {
        return IsoVerdict::NotIso("cluster sizes differ".into());
    }
    let mut perm = Vec::with_capacity(n);
    for (i, a) in f.assignment.iter().enumerate() {
        match a {
            Image::Var(j) => perm.push(*j),
            Image::Const(_) => return IsoVerdict::NotIso(format!("not injective on variables: `{}` goes to an integer", f.source.label(i))),
        }
    }
    let mut sorted = perm.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != n {
        return IsoVerdict::NotIso("not injective on variables".into());
    }
    if (0..n).any(|i| f.source.is_exchangeable(i) != f.target.is_exchangeable(perm[i])) {
        return IsoVerdict::NotIso("exchangeables not mapped onto exchangeables".into());
    }
    let (a, b) = (f.source.simplify(), f.target.simplify());
    for sign in [1i8, -1] {
        let iso = SeedIso { perm: perm.clone(), sign };
        if iso.is_iso(&a, &b) {
            return IsoVerdict::Iso(iso);
        }
    }
    IsoVerdict::NotIso("simplified matrices are not related by the bijection".into())
}

/// Necessary conditions on the value chosen for a simple specialisation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "flag", rename_all = "kebab-case")]
pub enum ValueFlag {
    /// Some exchangeable neighbour forces the value to be ±1.
    NotUnit { neighbour: String },
    /// An odd entry forces the value to be 1.
    OddEntry { neighbour: String, entry: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuesReport {
    pub variable: String,
    pub value: String,
    pub flags: Vec<ValueFlag>,
}

impl ValuesReport {
    pub fn possible(&self) -> bool {
        self.flags.is_empty()
    }
}

/// The simple specialisation of variable `x` to `n`, into `s ∖ {x}`.
pub fn specialisation(s: &Seed, x: usize, n: BigInt) -> Result<(MorphismSpec, ValuesReport)> {
    if x >= s.len() {
        return Err(MorphismError::NoSuchVariable(format!("#{}", x)));
    }
    let target = s.without(x);
    let assignment = (0..s.len())
        .map(|i| match i.cmp(&x) {
            std::cmp::Ordering::Less => Image::Var(i),
            std::cmp::Ordering::Equal => Image::Const(n.clone()),
            std::cmp::Ordering::Greater => Image::Var(i - 1),
        })
        .collect();
    let mut flags = Vec::new();
    let unit = n.abs().is_one();
    for y in s.exchangeable_indices() {
        let b = s.b(x, y);
        if b == 0 {
            continue;
        }
        if !unit {
            flags.push(ValueFlag::NotUnit { neighbour: s.label(y).to_string() });
        }
        if b % 2 != 0 && !n.is_one() {
            flags.push(ValueFlag::OddEntry { neighbour: s.label(y).to_string(), entry: b });
        }
    }
    let report = ValuesReport { variable: s.label(x).to_string(), value: n.to_string(), flags };
    Ok((MorphismSpec::new(s.clone(), target, assignment)?, report))
}

/// Identity on `keep`, 1 elsewhere, into the full subseed on `keep`.
pub fn restriction(s: &Seed, keep: &[usize]) -> Result<MorphismSpec> {
    let mut keep = keep.to_vec();
    keep.sort();
    keep.dedup();
    let target = s.subseed(&keep);
    let assignment = (0..s.len())
        .map(|i| match keep.iter().position(|&k| k == i) {
            Some(j) => Image::Var(j),
            None => Image::Const(BigInt::one()),
        })
        .collect();
    MorphismSpec::new(s.clone(), target, assignment)
}

#[derive(Debug, Clone)]
pub enum BoundMembership {
    Member,
    /// `cluster` is `None` for the initial cluster, otherwise the label
    /// mutated to reach the witness cluster.
    NotMember { cluster: Option<String>, expansion: Expressed },
}

impl BoundMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, BoundMembership::Member)
    }
}

/// Membership in the upper bound: Laurent in the cluster of `s` and of
/// every one-step mutation, with frozen variables in the numerator only.
pub fn check_upper_bound_membership(elem: &RationalExpr, s: &Seed) -> Result<BoundMembership> {
    let mut clusters = vec![(None, s.clone())];
    for k in s.exchangeable_indices() {
        clusters.push((Some(s.label(k).to_string()), s.mutate(k)?));
    }
    for (name, c) in clusters {
        let e = express_in_cluster(elem, &c)?;
        let ok = match &e {
            Expressed::Laurent(p) => p.negative_support().iter().all(|v| c.is_exchangeable(v.0 as usize)),
            Expressed::NotLaurent(_) => false,
        };
        if !ok {
            return Ok(BoundMembership::NotMember { cluster: name, expansion: e });
        }
    }
    Ok(BoundMembership::Member)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeboundsReport {
    pub variable: String,
    pub depth: usize,
    pub checked: usize,
    pub violations: Vec<String>,
}

/// Applies σ_{x,1} to every cluster variable found to `depth` and checks
/// each image against the upper bound of `s ∖ {x}`.
pub fn check_spebounds(s: &Seed, x: usize, depth: usize) -> Result<SpeboundsReport> {
    let (sigma, _) = specialisation(s, x, BigInt::one())?;
    let vars = seed::cluster_variables(s, depth)?.variables;
    let mut violations = Vec::new();
    for v in &vars {
        let img = sigma.apply_poly(v)?;
        if !check_upper_bound_membership(&img, sigma.target())?.is_member() {
            violations.push(v.to_fraction_string());
        }
    }
    Ok(SpeboundsReport { variable: s.label(x).to_string(), depth, checked: vars.len(), violations })
}

/// Convenience: parses `text` over `ring`.
pub fn parse(ring: &Ring, text: &str) -> Result<RationalExpr> {
    Ok(RationalExpr::parse(ring, text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_22() -> MorphismSpec {
        let m = vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]];
        let s = Seed::new(&["x1", "x2", "x3"], &["x2"], &m).unwrap();
        let t = Seed::new(&["y1", "y2", "y3"], &["y1", "y2", "y3"], &m).unwrap();
        MorphismSpec::new(s, t, vec![Image::Const(BigInt::one()), Image::Var(0), Image::Var(1)]).unwrap()
    }

    fn folding() -> MorphismSpec {
        let s = Seed::new(&["x1", "x2", "x3"], &["x1", "x2", "x3"], &[vec![0, 1, 0], vec![-1, 0, -1], vec![0, 1, 0]]).unwrap();
        let t = Seed::new(&["u1", "u2"], &["u1", "u2"], &[vec![0, 1], vec![-2, 0]]).unwrap();
        MorphismSpec::new(s, t, vec![Image::Var(0), Image::Var(1), Image::Var(0)]).unwrap()
    }

    #[test]
    fn worked_morphism() {
        let f = example_22();
        let e = parse(f.source().ring(), "(x1 + x3)/x2").unwrap();
        let img = f.apply(&e).unwrap();
        assert!(img.equals(&parse(f.target().ring(), "(1 + y2)/y1").unwrap()).unwrap());
        assert_eq!(f.biadmissible_sequences(1).unwrap(), vec![vec!["x2".to_string()]]);
        for d in 0..=4 {
            assert!(f.verify_cm3(d).unwrap().verified());
            assert!(f.verify_cm3_scoped(d, Cm3Scope::All).unwrap().verified());
        }
        let img = image_seed(&f);
        assert_eq!(img.labels(), ["y1", "y2"]);
        assert_eq!(img.exchangeable_indices(), vec![0]);
        assert_eq!(img.matrix().rows(), vec![vec![0, 1], vec![-1, 0]]);
        assert_eq!(is_ideal(&f, 4).unwrap(), IdealVerdict::IdealToDepth { depth: 4 });
        assert!(matches!(classify_isomorphism(&f), IsoVerdict::NotIso(_)));
    }

    #[test]
    fn folding_is_only_locally_rooted() {
        let f = folding();
        assert!(f.verify_locally().unwrap().verified());
        let r = f.verify_cm3(3).unwrap();
        assert_eq!(r.status, VerificationStatus::Failed);
        let w = r.witness.unwrap();
        let replay = f.check_sequence(&w.sequence, Cm3Scope::Exchanged).unwrap();
        assert!(!replay.mismatches.is_empty());
        let c = f.check_sequence(&["x2", "x1", "x2'"], Cm3Scope::Exchanged).unwrap();
        assert_eq!(c.mismatches.len(), 1);
        assert_eq!(c.mismatches[0].source_value, "(1 + u2)/u1");
        assert_eq!(c.mismatches[0].target_value, "(1 + 2*u2 + u2^2 + u1^2)/(u1^2*u2)");
        assert!(!f.verify_cm3_scoped(1, Cm3Scope::All).unwrap().verified());
    }

    #[test]
    fn cm2_and_cm1_enforced() {
        let s = Seed::new(&["x"], &["x"], &[vec![0]]).unwrap();
        let t = Seed::new(&["y"], &[], &[vec![0]]).unwrap();
        assert!(matches!(
            MorphismSpec::new(s.clone(), t.clone(), vec![Image::Var(0)]),
            Err(MorphismError::CM2Violation(_))
        ));
        assert!(matches!(
            MorphismSpec::new(s.clone(), t.clone(), vec![Image::Var(3)]),
            Err(MorphismError::CM1Violation(_))
        ));
        let id = MorphismSpec::identity(&s).unwrap();
        let e = parse(s.ring(), "(1 + x)/x").unwrap();
        assert!(id.apply(&e).unwrap().equals(&e).unwrap());
        let to_zero = MorphismSpec::new(s.clone(), t, vec![Image::Const(BigInt::from(0))]).unwrap();
        assert!(matches!(to_zero.apply(&e), Err(MorphismError::ZeroDenominatorImage)));
    }

    #[test]
    fn composition_with_identity() {
        let f = example_22();
        let g = compose(&MorphismSpec::identity(f.target()).unwrap(), &f).unwrap();
        assert_eq!(g.assignment(), f.assignment());
        assert!(matches!(compose(&f, &f), Err(MorphismError::SeedMismatch)));
    }

    #[test]
    fn restriction_of_a3() {
        let s = Seed::new(&["x1", "x2", "x3"], &["x1", "x2", "x3"], &[vec![0, 1, 0], vec![-1, 0, -1], vec![0, 1, 0]]).unwrap();
        let r = restriction(&s, &[0, 1]).unwrap();
        assert!(r.verify_cm3(3).unwrap().verified());
        let all = restriction(&s, &[0, 1, 2]).unwrap();
        assert!(matches!(classify_isomorphism(&all), IsoVerdict::Iso(SeedIso { sign: 1, .. })));
        let none = restriction(&s, &[]).unwrap();
        assert!(none.target().is_empty());
        assert!(none.verify_cm3(2).unwrap().verified());
    }

    #[test]
    fn upper_bound_witness() {
        let s = Seed::new(&["x1", "x2"], &["x1", "x2"], &[vec![0, 1], vec![-1, 0]]).unwrap();
        let e = parse(s.ring(), "2/x2").unwrap();
        match check_upper_bound_membership(&e, &s).unwrap() {
            BoundMembership::NotMember { cluster, .. } => assert_eq!(cluster.as_deref(), Some("x2")),
            m => panic!("{:?}", m),
        }
        assert!(check_upper_bound_membership(&parse(s.ring(), "x1").unwrap(), &s).unwrap().is_member());
    }
}
