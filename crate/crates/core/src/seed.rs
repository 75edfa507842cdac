//! Seeds, mutation and exploration of mutation classes.
//!
//! A [`Seed`] remembers the ring of its root seed and stores every
//! cluster variable as a Laurent polynomial in the root variables, so
//! that equalities between cluster variables are structural.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{LaurentError, LaurentPoly, RationalExpr, Ring, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeedError {
    #[error("matrix is not skew-symmetrisable (entries {0},{1})")]
    NotSkewSymmetrisable(usize, usize),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` is not exchangeable")]
    NotExchangeable(String),
    #[error("sequence is not admissible at position {0}")]
    NotAdmissible(usize),
    #[error("matrix entry overflow during mutation")]
    MatrixOverflow,
    #[error("exchange relation would exceed {0} terms")]
    ExpansionBudget(usize),
    #[error("exchange relation not divisible: {0}")]
    LaurentContractViolation(String),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

pub type Result<T> = std::result::Result<T, SeedError>;

/// Square integer matrix together with a symmetriser witness.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExchangeMatrix {
    n: usize,
    b: Vec<i64>,
    d: Vec<u64>,
}

impl ExchangeMatrix {
    pub fn new(rows: &[Vec<i64>]) -> Result<ExchangeMatrix> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(SeedError::DimensionMismatch(format!("row of length {} in a {}x{} matrix", r.len(), n, n)));
        }
        let b: Vec<i64> = rows.iter().flatten().copied().collect();
        let d = symmetriser(n, &b)?;
        Ok(ExchangeMatrix { n, b, d })
    }

    pub fn zero(n: usize) -> ExchangeMatrix {
        ExchangeMatrix { n, b: vec![0; n * n], d: vec![1; n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.b[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.b[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn symmetriser(&self) -> &[u64] {
        &self.d
    }

    /// True if `d` symmetrises this matrix.
    pub fn is_symmetrised_by(&self, d: &[u64]) -> bool {
        d.len() == self.n
            && (0..self.n).all(|i| {
                (0..self.n).all(|j| d[i] as i128 * self.get(i, j) as i128 == -(d[j] as i128) * self.get(j, i) as i128)
            })
    }

    /// Matrix mutation in direction `k`. The symmetriser is unchanged.
    pub fn mutate(&self, k: usize) -> Result<ExchangeMatrix> {
        let n = self.n;
        let mut b = self.b.clone();
        for y in 0..n {
            for z in 0..n {
                let v = if y == k || z == k {
                    -self.get(y, z)
                } else {
                    let (a, c) = (self.get(y, k), self.get(k, z));
                    let t = a
                        .abs()
                        .checked_mul(c)
                        .and_then(|p| a.checked_mul(c.abs()).and_then(|q| p.checked_add(q)))
                        .ok_or(SeedError::MatrixOverflow)?;
                    self.get(y, z).checked_add(t / 2).ok_or(SeedError::MatrixOverflow)?
                };
                b[y * n + z] = v;
            }
        }
        Ok(ExchangeMatrix { n, b, d: self.d.clone() })
    }

    pub fn submatrix(&self, idx: &[usize]) -> ExchangeMatrix {
        let b = idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j))).map(|(i, j)| self.get(i, j)).collect();
        ExchangeMatrix { n: idx.len(), b, d: idx.iter().map(|&i| self.d[i]).collect() }.renormalised()
    }

    pub fn negated(&self) -> ExchangeMatrix {
        ExchangeMatrix { n: self.n, b: self.b.iter().map(|x| -x).collect(), d: self.d.clone() }
    }

    fn with_entries(&self, b: Vec<i64>) -> ExchangeMatrix {
        ExchangeMatrix { n: self.n, b, d: self.d.clone() }
    }

    fn renormalised(self) -> ExchangeMatrix {
        let d = symmetriser(self.n, &self.b).expect("restriction of a skew-symmetrisable matrix");
        ExchangeMatrix { d, ..self }
    }
}

/// Minimal positive symmetriser, found by propagating ratios
/// `d_j / d_i = -b_ij / b_ji` along each connected component.
pub fn check_skew_symmetrisable(rows: &[Vec<i64>]) -> Result<Vec<u64>> {
    ExchangeMatrix::new(rows).map(|m| m.d)
}

fn symmetriser(n: usize, b: &[i64]) -> Result<Vec<u64>> {
    let at = |i: usize, j: usize| b[i * n + j];
    for i in 0..n {
        if at(i, i) != 0 {
            return Err(SeedError::NotSkewSymmetrisable(i, i));
        }
        for j in i + 1..n {
            let (x, y) = (at(i, j), at(j, i));
            if x.signum() != -y.signum() {
                return Err(SeedError::NotSkewSymmetrisable(i, j));
            }
        }
    }
    let mut ratio: Vec<Option<Ratio<i128>>> = vec![None; n];
    let mut d = vec![0u64; n];
    for start in 0..n {
        if ratio[start].is_some() {
            continue;
        }
        ratio[start] = Some(Ratio::from_integer(1));
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let ri = ratio[i].expect("visited");
            for j in 0..n {
                if at(i, j) == 0 {
                    continue;
                }
                let rj = ri * Ratio::new(-(at(i, j) as i128), at(j, i) as i128);
                match ratio[j] {
                    None => {
                        ratio[j] = Some(rj);
                        comp.push(j);
                        queue.push_back(j);
                    }
                    Some(r) if r != rj => return Err(SeedError::NotSkewSymmetrisable(i, j)),
                    Some(_) => {}
                }
            }
        }
        let lcm = comp.iter().fold(1i128, |acc, &i| acc.lcm(ratio[i].unwrap().denom()));
        let scaled: Vec<i128> = comp.iter().map(|&i| (ratio[i].unwrap() * lcm).to_integer()).collect();
        let g = scaled.iter().fold(0i128, |acc, x| acc.gcd(x));
        for (&i, s) in comp.iter().zip(&scaled) {
            d[i] = (s / g) as u64;
        }
    }
    Ok(d)
}

/// A seed: cluster, exchangeable subset and exchange matrix, plus the
/// expansion of each cluster variable in the root variables.
#[derive(Debug, Clone)]
pub struct Seed {
    ring: Ring,
    labels: Vec<String>,
    expansions: Vec<LaurentPoly>,
    exchangeable: Vec<bool>,
    matrix: ExchangeMatrix,
    history: Vec<usize>,
}

/// Seeds compare by cluster (expansions), exchangeable set and matrix;
/// labels and history are bookkeeping.
impl PartialEq for Seed {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.expansions == other.expansions
            && self.exchangeable == other.exchangeable
            && self.matrix == other.matrix
    }
}

/// Seed isomorphism: `perm[i]` is the image of variable `i`, and
/// `b2[perm i][perm j] = sign * b1[i][j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedIso {
    pub perm: Vec<usize>,
    pub sign: i8,
}

impl SeedIso {
    pub fn identity(n: usize) -> SeedIso {
        SeedIso { perm: (0..n).collect(), sign: 1 }
    }

    pub fn inverse(&self) -> SeedIso {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        SeedIso { perm: inv, sign: self.sign }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SeedIso) -> SeedIso {
        SeedIso { perm: self.perm.iter().map(|&p| other.perm[p]).collect(), sign: self.sign * other.sign }
    }

    pub fn is_iso(&self, a: &Seed, b: &Seed) -> bool {
        let n = a.len();
        if b.len() != n || self.perm.len() != n || !(self.sign == 1 || self.sign == -1) {
            return false;
        }
        let mut seen = vec![false; n];
        for &p in &self.perm {
            if p >= n || seen[p] {
                return false;
            }
            seen[p] = true;
        }
        (0..n).all(|i| a.exchangeable[i] == b.exchangeable[self.perm[i]])
            && (0..n).all(|i| {
                (0..n).all(|j| b.matrix.get(self.perm[i], self.perm[j]) == self.sign as i64 * a.matrix.get(i, j))
            })
    }
}

/// On-disk seed format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedFile {
    pub variables: Vec<String>,
    pub exchangeable: Vec<String>,
    pub matrix: Vec<Vec<i64>>,
}

impl Seed {
    /// Validated root seed.
    pub fn new<S: AsRef<str>>(labels: &[S], exchangeable: &[S], matrix: &[Vec<i64>]) -> Result<Seed> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(SeedError::DuplicateLabel(l.clone()));
            }
        }
        if matrix.len() != labels.len() {
            return Err(SeedError::DimensionMismatch(format!(
                "{} variables but a matrix with {} rows",
                labels.len(),
                matrix.len()
            )));
        }
        let mut ex = vec![false; labels.len()];
        for e in exchangeable {
            let i = labels
                .iter()
                .position(|l| l == e.as_ref())
                .ok_or_else(|| SeedError::UnknownVariable(e.as_ref().to_string()))?;
            ex[i] = true;
        }
        let matrix = ExchangeMatrix::new(matrix)?;
        Ok(Seed::root(labels, ex, matrix))
    }

    /// Root seed from validated parts.
    pub fn root(labels: Vec<String>, exchangeable: Vec<bool>, matrix: ExchangeMatrix) -> Seed {
        let ring = Ring::new(&labels);
        let expansions = (0..labels.len()).map(|i| LaurentPoly::var(&ring, VarId(i as u32))).collect();
        Seed { ring, labels, expansions, exchangeable, matrix, history: Vec::new() }
    }

    pub fn empty() -> Seed {
        Seed::root(Vec::new(), Vec::new(), ExchangeMatrix::zero(0))
    }

    pub fn from_file(f: &SeedFile) -> Result<Seed> {
        Seed::new(&f.variables, &f.exchangeable, &f.matrix)
    }

    pub fn to_file(&self) -> SeedFile {
        SeedFile {
            variables: self.labels.clone(),
            exchangeable: self.exchangeable_indices().iter().map(|&i| self.labels[i].clone()).collect(),
            matrix: self.matrix.rows(),
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn root_label(&self, i: usize) -> &str {
        self.ring.name(VarId(i as u32))
    }

    pub fn expansions(&self) -> &[LaurentPoly] {
        &self.expansions
    }

    pub fn expansion(&self, i: usize) -> &LaurentPoly {
        &self.expansions[i]
    }

    pub fn is_exchangeable(&self, i: usize) -> bool {
        self.exchangeable[i]
    }

    pub fn exchangeable_mask(&self) -> &[bool] {
        &self.exchangeable
    }

    pub fn exchangeable_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.exchangeable[i]).collect()
    }

    pub fn frozen_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.exchangeable[i]).collect()
    }

    pub fn matrix(&self) -> &ExchangeMatrix {
        &self.matrix
    }

    pub fn b(&self, i: usize, j: usize) -> i64 {
        self.matrix.get(i, j)
    }

    pub fn history(&self) -> &[usize] {
        &self.history
    }

    pub fn is_root(&self) -> bool {
        self.history.is_empty()
    }

    /// Position of a variable by current label, falling back to the label
    /// of the root variable at that position.
    pub fn resolve(&self, name: &str) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l == name)
            .or_else(|| self.ring.var_id(name).map(|v| v.0 as usize))
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.resolve(name).ok_or_else(|| SeedError::UnknownVariable(name.to_string()))
    }

    /// Mutation in direction `k`.
    pub fn mutate(&self, k: usize) -> Result<Seed> {
        self.mutate_bounded(k, usize::MAX)
    }

    /// Mutation that gives up once a partial product of the exchange
    /// binomial exceeds `max_terms` terms.
    pub fn mutate_bounded(&self, k: usize, max_terms: usize) -> Result<Seed> {
        if k >= self.len() {
            return Err(SeedError::UnknownVariable(format!("#{}", k)));
        }
        if !self.exchangeable[k] {
            return Err(SeedError::NotExchangeable(self.labels[k].clone()));
        }
        let mut pos = LaurentPoly::one(&self.ring);
        let mut neg = LaurentPoly::one(&self.ring);
        for (j, &e) in self.matrix.row(k).iter().enumerate() {
            let side = if e > 0 { &mut pos } else { &mut neg };
            for _ in 0..e.unsigned_abs() {
                *side = side.mul(&self.expansions[j])?;
                if side.len() > max_terms {
                    return Err(SeedError::ExpansionBudget(max_terms));
                }
            }
        }
        let new = pos
            .add(&neg)?
            .exact_divide(&self.expansions[k])
            .map_err(|e| SeedError::LaurentContractViolation(format!("{}: {}", self.labels[k], e)))?;
        let mut labels = self.labels.clone();
        labels[k] = match new.as_var() {
            Some(v) => self.ring.name(v).to_string(),
            None => format!("{}'", self.labels[k]),
        };
        let mut expansions = self.expansions.clone();
        expansions[k] = new;
        let mut history = self.history.clone();
        history.push(k);
        Ok(Seed {
            ring: self.ring.clone(),
            labels,
            expansions,
            exchangeable: self.exchangeable.clone(),
            matrix: self.matrix.mutate(k)?,
            history,
        })
    }

    /// Folds [`Seed::mutate`]; reports the first inadmissible position.
    pub fn mutate_seq(&self, ks: &[usize]) -> Result<Seed> {
        let mut s = self.clone();
        for (i, &k) in ks.iter().enumerate() {
            if k >= s.len() || !s.exchangeable[k] {
                return Err(SeedError::NotAdmissible(i));
            }
            s = s.mutate(k)?;
        }
        Ok(s)
    }

    /// Mutates along labels, each resolved in the seed reached so far.
    pub fn mutate_labels<S: AsRef<str>>(&self, names: &[S]) -> Result<Seed> {
        let mut s = self.clone();
        for (i, name) in names.iter().enumerate() {
            let k = s.index_of(name.as_ref())?;
            if !s.exchangeable[k] {
                return Err(SeedError::NotAdmissible(i));
            }
            s = s.mutate(k)?;
        }
        Ok(s)
    }

    /// Zeroes every entry between two frozen variables.
    pub fn simplify(&self) -> Seed {
        let n = self.len();
        let mut b = self.matrix.b.clone();
        for i in 0..n {
            for j in 0..n {
                if !self.exchangeable[i] && !self.exchangeable[j] {
                    b[i * n + j] = 0;
                }
            }
        }
        Seed { matrix: self.matrix.with_entries(b), ..self.clone() }
    }

    pub fn opposite(&self) -> Seed {
        Seed { matrix: self.matrix.negated(), ..self.clone() }
    }

    /// Full subseed on `idx` (in that order) as a fresh root seed.
    pub fn subseed(&self, idx: &[usize]) -> Seed {
        Seed::root(
            idx.iter().map(|&i| self.labels[i].clone()).collect(),
            idx.iter().map(|&i| self.exchangeable[i]).collect(),
            self.matrix.submatrix(idx),
        )
    }

    /// The seed with variable `k` removed, as a fresh root seed.
    pub fn without(&self, k: usize) -> Seed {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| i != k).collect();
        self.subseed(&idx)
    }

    /// This seed's cluster, exchangeables and matrix as a new root seed.
    pub fn rebased(&self) -> Seed {
        Seed::root(self.labels.clone(), self.exchangeable.clone(), self.matrix.clone())
    }

    /// Canonical key: sorted expansion texts with the matrix and
    /// exchangeable flags rewritten in that order.
    pub fn key(&self) -> SeedKey {
        let texts: Vec<String> = self.expansions.iter().map(|p| p.to_string()).collect();
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| texts[a].cmp(&texts[b]));
        SeedKey {
            variables: order.iter().map(|&i| texts[i].clone()).collect(),
            exchangeable: order.iter().map(|&i| self.exchangeable[i]).collect(),
            matrix: order.iter().flat_map(|&i| order.iter().map(move |&j| (i, j))).map(|(i, j)| self.b(i, j)).collect(),
        }
    }

    /// Acyclicity of the valued quiver once frozen–frozen arrows are removed.
    pub fn is_acyclic(&self) -> bool {
        let n = self.len();
        let arrow = |i: usize, j: usize| self.b(i, j) > 0 && (self.exchangeable[i] || self.exchangeable[j]);
        let mut indeg: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| arrow(i, j)).count()).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut removed = 0;
        while let Some(i) = stack.pop() {
            removed += 1;
            for j in 0..n {
                if arrow(i, j) {
                    indeg[j] -= 1;
                    if indeg[j] == 0 {
                        stack.push(j);
                    }
                }
            }
        }
        removed == n
    }

    /// DOT rendering of the valued quiver.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph Q {\n");
        for (i, l) in self.labels.iter().enumerate() {
            let style = if self.exchangeable[i] {
                "shape=circle, style=filled, fillcolor=black, fontcolor=white"
            } else {
                "shape=circle, style=solid"
            };
            writeln!(out, "  n{} [label=\"{}\", {}];", i, l, style).unwrap();
        }
        for i in 0..self.len() {
            for j in 0..self.len() {
                if self.b(i, j) > 0 {
                    let dashed = if !self.exchangeable[i] && !self.exchangeable[j] { ", style=dashed" } else { "" };
                    writeln!(out, "  n{} -> n{} [label=\"({},{})\"{}];", i, j, self.b(i, j), -self.b(j, i), dashed).unwrap();
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Canonical identity of a seed for de-duplication.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeedKey {
    pub variables: Vec<String>,
    pub exchangeable: Vec<bool>,
    pub matrix: Vec<i64>,
}

/// Isomorphism search, trying sign +1 before −1.
pub fn seed_isomorphic(a: &Seed, b: &Seed) -> Option<SeedIso> {
    if a.len() != b.len() || a.exchangeable_indices().len() != b.exchangeable_indices().len() {
        return None;
    }
    [1i8, -1].into_iter().find_map(|sign| iso_with_sign(a, b, sign))
}

/// Isomorphism search for one fixed sign.
pub fn iso_with_sign(a: &Seed, b: &Seed, sign: i8) -> Option<SeedIso> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    let sig = |s: &Seed, i: usize, sgn: i64| {
        let mut row: Vec<(i64, i64)> = (0..n).map(|j| (sgn * s.b(i, j), sgn * s.b(j, i))).collect();
        row.sort();
        (s.exchangeable[i], row)
    };
    let sa: Vec<_> = (0..n).map(|i| sig(a, i, sign as i64)).collect();
    let sb: Vec<_> = (0..n).map(|i| sig(b, i, 1)).collect();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        a: &Seed,
        b: &Seed,
        sign: i64,
        sa: &[(bool, Vec<(i64, i64)>)],
        sb: &[(bool, Vec<(i64, i64)>)],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == perm.len() {
            return true;
        }
        for c in 0..perm.len() {
            if used[c] || sa[i] != sb[c] {
                continue;
            }
            let ok = (0..i).all(|j| b.b(c, perm[j]) == sign * a.b(i, j) && b.b(perm[j], c) == sign * a.b(j, i));
            if !ok {
                continue;
            }
            perm[i] = c;
            used[c] = true;
            if go(i + 1, a, b, sign, sa, sb, perm, used) {
                return true;
            }
            used[c] = false;
        }
        false
    }
    if go(0, a, b, sign as i64, &sa, &sb, &mut perm, &mut used) {
        Some(SeedIso { perm, sign })
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplorationStatus {
    Closed,
    DepthTruncated,
    SizeTruncated,
}

/// Result of a breadth-first exploration of a mutation class.
#[derive(Debug, Clone)]
pub struct MutationClass {
    pub seeds: Vec<Seed>,
    pub keys: Vec<SeedKey>,
    pub depths: Vec<usize>,
    pub status: ExplorationStatus,
}

/// Breadth-first search over mutations, de-duplicating by [`SeedKey`].
/// Each frontier level is expanded in parallel; merging is sequential in
/// frontier order so the result is deterministic.
pub fn mutation_class(s: &Seed, max_depth: usize, max_seeds: usize) -> Result<MutationClass> {
    let mut index: HashMap<SeedKey, usize> = HashMap::new();
    let mut class = MutationClass { seeds: Vec::new(), keys: Vec::new(), depths: Vec::new(), status: ExplorationStatus::Closed };
    if max_seeds == 0 {
        class.status = ExplorationStatus::SizeTruncated;
        return Ok(class);
    }
    let k0 = s.key();
    index.insert(k0.clone(), 0);
    class.seeds.push(s.clone());
    class.keys.push(k0);
    class.depths.push(0);
    let mut frontier = vec![0usize];
    let mut depth = 0;
    while !frontier.is_empty() {
        let expanded: Vec<Vec<(SeedKey, Seed)>> = frontier
            .par_iter()
            .map(|&i| {
                let seed = &class.seeds[i];
                seed.exchangeable_indices()
                    .into_iter()
                    .map(|k| seed.mutate(k).map(|m| (m.key(), m)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut next = Vec::new();
        for (key, seed) in expanded.into_iter().flatten() {
            if index.contains_key(&key) {
                continue;
            }
            if depth == max_depth {
                class.status = ExplorationStatus::DepthTruncated;
                return Ok(class);
            }
            if class.seeds.len() == max_seeds {
                class.status = ExplorationStatus::SizeTruncated;
                return Ok(class);
            }
            index.insert(key.clone(), class.seeds.len());
            next.push(class.seeds.len());
            class.seeds.push(seed);
            class.keys.push(key);
            class.depths.push(depth + 1);
        }
        frontier = next;
        depth += 1;
    }
    Ok(class)
}

/// Cluster variables found within a depth/size budget.
#[derive(Debug, Clone)]
pub struct VariableSet {
    pub variables: Vec<LaurentPoly>,
    pub status: ExplorationStatus,
}

pub fn cluster_variables(s: &Seed, max_depth: usize) -> Result<VariableSet> {
    cluster_variables_bounded(s, max_depth, usize::MAX)
}

pub fn cluster_variables_bounded(s: &Seed, max_depth: usize, max_seeds: usize) -> Result<VariableSet> {
    let class = mutation_class(s, max_depth, max_seeds)?;
    let mut seen = HashSet::new();
    let mut variables = Vec::new();
    for seed in &class.seeds {
        for p in seed.expansions() {
            if seen.insert(p.clone()) {
                variables.push(p.clone());
            }
        }
    }
    Ok(VariableSet { variables, status: class.status })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiniteType {
    Finite(usize),
    Unknown,
}

/// Finite iff the mutation class closes within `max_seeds` seeds.
pub fn is_finite_type(s: &Seed, max_seeds: usize) -> Result<FiniteType> {
    let vs = cluster_variables_bounded(s, usize::MAX, max_seeds)?;
    Ok(match vs.status {
        ExplorationStatus::Closed => FiniteType::Finite(vs.variables.len()),
        _ => FiniteType::Unknown,
    })
}

/// Expansion of an element in another cluster.
#[derive(Debug, Clone)]
pub enum Expressed {
    Laurent(LaurentPoly),
    NotLaurent(RationalExpr),
}

impl Expressed {
    pub fn laurent(&self) -> Option<&LaurentPoly> {
        match self {
            Expressed::Laurent(p) => Some(p),
            Expressed::NotLaurent(_) => None,
        }
    }
}

/// The root variables of `s`'s root seed, written in the cluster of `s`
/// (a ring named by `s`'s current labels).
pub fn root_in_cluster(s: &Seed) -> Result<Seed> {
    let mut back: Vec<usize> = s.history.clone();
    back.reverse();
    s.rebased().mutate_seq(&back)
}

/// Writes `elem` (over the root ring of `s`) in the cluster of `s`.
pub fn express_in_cluster(elem: &RationalExpr, s: &Seed) -> Result<Expressed> {
    if elem.ring() != s.ring() {
        return Err(LaurentError::RingMismatch.into());
    }
    let replay = root_in_cluster(s)?;
    let target = replay.ring().clone();
    let values: Vec<RationalExpr> = replay.expansions().iter().cloned().map(RationalExpr::from).collect();
    let r = elem.substitute(&target, &|v| values.get(v.0 as usize).cloned())?;
    Ok(match r.to_laurent() {
        Ok(p) => Expressed::Laurent(p),
        Err(LaurentError::NotDivisible) => Expressed::NotLaurent(r),
        Err(e) => return Err(e.into()),
    })
}
