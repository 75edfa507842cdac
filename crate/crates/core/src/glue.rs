//! Amalgamated sums of seeds along frozen subseeds, finite coproducts,
//! and the inverse operation of cutting along a separating family.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morphism::{Image, MorphismError, MorphismSpec, VerificationReport};
use crate::seed::{iso_with_sign, ExchangeMatrix, Seed, SeedError, SeedFile, SeedIso};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GlueError {
    #[error("not glueable: `{0}` is exchangeable")]
    NotFrozen(String),
    #[error("not glueable: {0}")]
    NotGlueable(String),
    #[error("not separating: {0}")]
    NotSeparating(String),
    #[error("cocone disagrees on `{0}`")]
    CoconeDisagreesOnDelta(String),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Seed(#[from] SeedError),
}

pub type Result<T> = std::result::Result<T, GlueError>;

/// Two seeds with frozen subsets `delta1`, `delta2` and an isomorphism
/// of the full subseeds on them: `delta1[i]` is identified with
/// `delta2[iso.perm[i]]`.
#[derive(Debug, Clone)]
pub struct GlueSpec {
    pub s1: Seed,
    pub delta1: Vec<usize>,
    pub s2: Seed,
    pub delta2: Vec<usize>,
    pub iso: SeedIso,
}

fn check_frozen(s: &Seed, delta: &[usize]) -> Result<()> {
    let mut seen = HashSet::new();
    for &i in delta {
        if i >= s.len() || !seen.insert(i) {
            return Err(GlueError::NotGlueable(format!("invalid variable index {}", i)));
        }
        if s.is_exchangeable(i) {
            return Err(GlueError::NotFrozen(s.label(i).to_string()));
        }
    }
    Ok(())
}

/// Finds an isomorphism between the frozen subseeds, if any.
pub fn glueable(s1: &Seed, delta1: &[usize], s2: &Seed, delta2: &[usize]) -> Result<GlueSpec> {
    check_frozen(s1, delta1)?;
    check_frozen(s2, delta2)?;
    if delta1.len() != delta2.len() {
        return Err(GlueError::NotGlueable("frozen subsets differ in size".into()));
    }
    let iso = iso_with_sign(&s1.subseed(delta1), &s2.subseed(delta2), 1)
        .ok_or_else(|| GlueError::NotGlueable("frozen subseeds are not isomorphic".into()))?;
    Ok(GlueSpec { s1: s1.clone(), delta1: delta1.to_vec(), s2: s2.clone(), delta2: delta2.to_vec(), iso })
}

/// Validates a caller-supplied identification.
pub fn glueable_with(s1: &Seed, delta1: &[usize], s2: &Seed, delta2: &[usize], iso: SeedIso) -> Result<GlueSpec> {
    check_frozen(s1, delta1)?;
    check_frozen(s2, delta2)?;
    if iso.sign != 1 || !iso.is_iso(&s1.subseed(delta1), &s2.subseed(delta2)) {
        return Err(GlueError::NotGlueable("the given map is not an isomorphism of the frozen subseeds".into()));
    }
    Ok(GlueSpec { s1: s1.clone(), delta1: delta1.to_vec(), s2: s2.clone(), delta2: delta2.to_vec(), iso })
}

/// The glued seed together with where each summand's variables landed.
#[derive(Debug, Clone)]
pub struct Amalgam {
    pub seed: Seed,
    /// `left[i]` is the position of `s1`'s variable `i` in the sum.
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

fn fresh_label(taken: &mut HashSet<String>, want: &str) -> String {
    let mut l = want.to_string();
    while taken.contains(&l) {
        l.push_str("_2");
    }
    taken.insert(l.clone());
    l
}

/// Cluster `(x1 ∖ Δ1) ⊔ (x2 ∖ Δ2) ⊔ Δ` with the block matrix
/// `[[B1, 0, B1Δ], [0, B2, B2Δ], [BΔ1, BΔ2, BΔ]]`.
pub fn amalgamate(g: &GlueSpec) -> Result<Amalgam> {
    let (s1, s2) = (&g.s1, &g.s2);
    let d = g.delta1.len();
    let rest1: Vec<usize> = (0..s1.len()).filter(|i| !g.delta1.contains(i)).collect();
    let rest2: Vec<usize> = (0..s2.len()).filter(|i| !g.delta2.contains(i)).collect();
    let (n1, n2) = (rest1.len(), rest2.len());
    let n = n1 + n2 + d;
    let mut left = vec![0; s1.len()];
    let mut right = vec![0; s2.len()];
    for (p, &i) in rest1.iter().enumerate() {
        left[i] = p;
    }
    for (p, &i) in rest2.iter().enumerate() {
        right[i] = n1 + p;
    }
    for (k, &i) in g.delta1.iter().enumerate() {
        left[i] = n1 + n2 + k;
        right[g.delta2[g.iso.perm[k]]] = n1 + n2 + k;
    }
    let mut taken: HashSet<String> = rest1.iter().chain(g.delta1.iter()).map(|&i| s1.label(i).to_string()).collect();
    let mut labels = vec![String::new(); n];
    let mut ex = vec![false; n];
    for &i in rest1.iter().chain(g.delta1.iter()) {
        labels[left[i]] = s1.label(i).to_string();
        ex[left[i]] = s1.is_exchangeable(i);
    }
    for &i in &rest2 {
        labels[right[i]] = fresh_label(&mut taken, s2.label(i));
        ex[right[i]] = s2.is_exchangeable(i);
    }
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..s1.len() {
        for j in 0..s1.len() {
            b[left[i]][left[j]] = s1.b(i, j);
        }
    }
    for i in 0..s2.len() {
        for j in 0..s2.len() {
            let (p, q) = (right[i], right[j]);
            if p >= n1 + n2 && q >= n1 + n2 {
                if b[p][q] != s2.b(i, j) {
                    return Err(GlueError::NotGlueable("frozen blocks differ under the identification".into()));
                }
            } else {
                b[p][q] = s2.b(i, j);
            }
        }
    }
    let matrix = ExchangeMatrix::new(&b)?;
    Ok(Amalgam { seed: Seed::root(labels, ex, matrix), left, right })
}

pub fn amalgamated_sum(g: &GlueSpec) -> Result<Seed> {
    Ok(amalgamate(g)?.seed)
}

fn injection(source: &Seed, target: &Seed, positions: &[usize]) -> Result<MorphismSpec> {
    Ok(MorphismSpec::new(source.clone(), target.clone(), positions.iter().map(|&p| Image::Var(p)).collect())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    First,
    Second,
}

/// Canonical injection of one summand into the amalgamated sum.
pub fn canonical_injection(a: &Amalgam, g: &GlueSpec, side: Side) -> Result<MorphismSpec> {
    match side {
        Side::First => injection(&g.s1, &a.seed, &a.left),
        Side::Second => injection(&g.s2, &a.seed, &a.right),
    }
}

/// A finite coproduct with the block offsets of each summand.
#[derive(Debug, Clone)]
pub struct Coproduct {
    pub seed: Seed,
    pub summands: Vec<Seed>,
    pub offsets: Vec<usize>,
}

impl Coproduct {
    pub fn injection(&self, k: usize) -> Result<MorphismSpec> {
        let s = &self.summands[k];
        let pos: Vec<usize> = (0..s.len()).map(|i| self.offsets[k] + i).collect();
        injection(s, &self.seed, &pos)
    }
}

/// Block-diagonal union of seeds; clashing labels get a `_2` suffix.
pub fn coproduct(seeds: &[Seed]) -> Result<Coproduct> {
    let n: usize = seeds.iter().map(Seed::len).sum();
    let mut labels = Vec::with_capacity(n);
    let mut ex = Vec::with_capacity(n);
    let mut b = vec![vec![0i64; n]; n];
    let mut offsets = Vec::new();
    let mut taken = HashSet::new();
    let mut off = 0;
    for s in seeds {
        offsets.push(off);
        for i in 0..s.len() {
            labels.push(fresh_label(&mut taken, s.label(i)));
            ex.push(s.is_exchangeable(i));
            for j in 0..s.len() {
                b[off + i][off + j] = s.b(i, j);
            }
        }
        off += s.len();
    }
    let seed = Seed::root(labels, ex, ExchangeMatrix::new(&b)?);
    Ok(Coproduct { seed, summands: seeds.to_vec(), offsets })
}

/// `x = part1 ⊔ part2 ⊔ delta` with no arrows between the two parts.
#[derive(Debug, Clone)]
pub struct SeparatingPartition {
    pub s: Seed,
    pub delta: Vec<usize>,
    pub part1: Vec<usize>,
    pub part2: Vec<usize>,
}

/// Connected components of the quiver on the variables outside `delta`.
pub fn components(s: &Seed, delta: &[usize]) -> Vec<Vec<usize>> {
    let rest: Vec<usize> = (0..s.len()).filter(|i| !delta.contains(i)).collect();
    let mut seen = HashSet::new();
    let mut comps = Vec::new();
    for &start in &rest {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for &j in &rest {
                if (s.b(i, j) != 0 || s.b(j, i) != 0) && seen.insert(j) {
                    comp.push(j);
                    stack.push(j);
                }
            }
        }
        comp.sort();
        comps.push(comp);
    }
    comps
}

/// Default bipartition: the component of the lowest-indexed variable
/// against all the others.
pub fn separating_partition(s: &Seed, delta: &[usize]) -> Result<SeparatingPartition> {
    check_frozen(s, delta).map_err(|e| GlueError::NotSeparating(e.to_string()))?;
    let comps = components(s, delta);
    if comps.len() < 2 {
        return Err(GlueError::NotSeparating("the variables outside the family are connected".into()));
    }
    let part1 = comps[0].clone();
    let mut part2: Vec<usize> = comps[1..].iter().flatten().copied().collect();
    part2.sort();
    Ok(SeparatingPartition { s: s.clone(), delta: delta.to_vec(), part1, part2 })
}

/// Caller-chosen first part; the second part is everything else.
pub fn separating_partition_with(s: &Seed, delta: &[usize], part1: &[usize]) -> Result<SeparatingPartition> {
    check_frozen(s, delta).map_err(|e| GlueError::NotSeparating(e.to_string()))?;
    let p1: BTreeSet<usize> = part1.iter().copied().collect();
    if p1.iter().any(|i| delta.contains(i) || *i >= s.len()) {
        return Err(GlueError::NotSeparating("first part overlaps the family".into()));
    }
    let part2: Vec<usize> = (0..s.len()).filter(|i| !p1.contains(i) && !delta.contains(i)).collect();
    for &i in &p1 {
        for &j in &part2 {
            if s.b(i, j) != 0 || s.b(j, i) != 0 {
                return Err(GlueError::NotSeparating(format!("`{}` and `{}` are joined", s.label(i), s.label(j))));
            }
        }
    }
    if p1.is_empty() || part2.is_empty() {
        return Err(GlueError::NotSeparating("a part is empty".into()));
    }
    Ok(SeparatingPartition { s: s.clone(), delta: delta.to_vec(), part1: p1.into_iter().collect(), part2 })
}

impl SeparatingPartition {
    fn side(&self, side: Side) -> Vec<usize> {
        let part = match side {
            Side::First => &self.part1,
            Side::Second => &self.part2,
        };
        part.iter().chain(self.delta.iter()).copied().collect()
    }

    /// `d^i`: the full subseed on one part plus the family.
    pub fn piece(&self, side: Side) -> Seed {
        self.s.subseed(&self.side(side))
    }

    /// The inclusion `d^i → s`.
    pub fn inclusion(&self, side: Side) -> Result<MorphismSpec> {
        injection(&self.piece(side), &self.s, &self.side(side))
    }

    /// Glue data that reassembles the two pieces along the family.
    pub fn glue_spec(&self) -> Result<GlueSpec> {
        let (a, b) = (self.piece(Side::First), self.piece(Side::Second));
        let d = self.delta.len();
        let da: Vec<usize> = (self.part1.len()..self.part1.len() + d).collect();
        let db: Vec<usize> = (self.part2.len()..self.part2.len() + d).collect();
        glueable_with(&a, &da, &b, &db, SeedIso::identity(d))
    }
}

/// The two pieces of a cutting.
pub fn cut(p: &SeparatingPartition) -> (Seed, Seed) {
    (p.piece(Side::First), p.piece(Side::Second))
}

/// `pr_i`: identity on one side and the family, zero on the other side.
pub fn projection(p: &SeparatingPartition, side: Side) -> Result<MorphismSpec> {
    let keep = p.side(side);
    let target = p.s.subseed(&keep);
    let assignment = (0..p.s.len())
        .map(|i| match keep.iter().position(|&k| k == i) {
            Some(j) => Image::Var(j),
            None => Image::Const(BigInt::zero()),
        })
        .collect();
    Ok(MorphismSpec::new(p.s.clone(), target, assignment)?)
}

#[derive(Debug, Clone)]
pub enum PushoutResult {
    FactorsUniquely { h: MorphismSpec, report: VerificationReport },
    NoFactorisation(String),
}

/// Builds the unique `h` with `h ∘ j1 = f1`, `h ∘ j2 = f2` on generators
/// and verifies it to `depth`.
pub fn pushout_check(g: &GlueSpec, f1: &MorphismSpec, f2: &MorphismSpec, depth: usize) -> Result<PushoutResult> {
    if *f1.source() != g.s1 || *f2.source() != g.s2 || f1.target() != f2.target() {
        return Err(GlueError::Morphism(MorphismError::SeedMismatch));
    }
    for (k, &i) in g.delta1.iter().enumerate() {
        let j = g.delta2[g.iso.perm[k]];
        if f1.assignment()[i] != f2.assignment()[j] {
            return Err(GlueError::CoconeDisagreesOnDelta(g.s1.label(i).to_string()));
        }
    }
    let a = amalgamate(g)?;
    let mut assignment: Vec<Option<Image>> = vec![None; a.seed.len()];
    for (i, &p) in a.left.iter().enumerate() {
        assignment[p] = Some(f1.assignment()[i].clone());
    }
    for (i, &p) in a.right.iter().enumerate() {
        assignment[p].get_or_insert_with(|| f2.assignment()[i].clone());
    }
    let assignment = assignment.into_iter().map(|x| x.expect("every position covered")).collect();
    let h = match MorphismSpec::new(a.seed.clone(), f1.target().clone(), assignment) {
        Ok(h) => h,
        Err(e) => return Ok(PushoutResult::NoFactorisation(e.to_string())),
    };
    let report = h.verify_cm3(depth)?;
    if !report.verified() {
        return Ok(PushoutResult::NoFactorisation("the induced map fails mutation compatibility".into()));
    }
    Ok(PushoutResult::FactorsUniquely { h, report })
}

/// On-disk glue data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlueFile {
    pub s1: SeedFile,
    pub delta1: Vec<String>,
    pub s2: SeedFile,
    pub delta2: Vec<String>,
    #[serde(default)]
    pub iso: Option<IsoFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsoFile {
    pub map: std::collections::BTreeMap<String, String>,
    #[serde(default = "one")]
    pub sign: i8,
}

fn one() -> i8 {
    1
}

impl GlueFile {
    pub fn to_spec(&self) -> Result<GlueSpec> {
        let s1 = Seed::from_file(&self.s1)?;
        let s2 = Seed::from_file(&self.s2)?;
        let d1 = self.delta1.iter().map(|l| s1.index_of(l)).collect::<std::result::Result<Vec<_>, _>>()?;
        let d2 = self.delta2.iter().map(|l| s2.index_of(l)).collect::<std::result::Result<Vec<_>, _>>()?;
        match &self.iso {
            None => glueable(&s1, &d1, &s2, &d2),
            Some(iso) => {
                let mut perm = Vec::with_capacity(d1.len());
                for l in &self.delta1 {
                    let t = iso.map.get(l).ok_or_else(|| GlueError::NotGlueable(format!("`{}` is not identified", l)))?;
                    let j = s2.index_of(t)?;
                    let k = d2.iter().position(|&x| x == j).ok_or_else(|| GlueError::NotGlueable(format!("`{}` is not in delta2", t)))?;
                    perm.push(k);
                }
                glueable_with(&s1, &d1, &s2, &d2, SeedIso { perm, sign: iso.sign })
            }
        }
    }
}
