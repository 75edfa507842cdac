//! Triangulations of the m-gon and their seeds.
//!
//! Vertices are labelled 1..=m counterclockwise. An arc `{i,j}` is stored
//! with `i < j`; the sides `{i,i+1}` and `{1,m}` are boundary arcs.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{LaurentPoly, VarId};
use crate::morphism::{Image, MorphismError, MorphismSpec};
use crate::seed::{ExchangeMatrix, Seed, SeedError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooSmall(u32),
    #[error("invalid arc {{{0},{1}}}")]
    InvalidArc(u32, u32),
    #[error("arcs {{{0},{1}}} and {{{2},{3}}} cross")]
    Crossing(u32, u32, u32, u32),
    #[error("expected {want} internal arcs, got {got}")]
    NotMaximal { want: usize, got: usize },
    #[error("{{{0},{1}}} is a boundary arc")]
    BoundaryArc(u32, u32),
    #[error("{{{0},{1}}} is not in the triangulation")]
    NotInTriangulation(u32, u32),
    #[error("need {0}")]
    Range(String),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
}

pub type Result<T> = std::result::Result<T, SurfaceError>;

pub type Arc = (u32, u32);

fn norm(a: u32, b: u32) -> Arc {
    (a.min(b), a.max(b))
}

pub fn is_boundary(m: u32, (i, j): Arc) -> bool {
    j == i + 1 || (i == 1 && j == m)
}

/// Strict interior crossing of two chords.
pub fn crosses((a, b): Arc, (c, d): Arc) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// Variable name of an arc.
pub fn arc_label(m: u32, (i, j): Arc) -> String {
    if m <= 9 {
        format!("x{}{}", i, j)
    } else {
        format!("x{}_{}", i, j)
    }
}

/// A triangulation of the m-gon by its internal arcs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangulation {
    m: u32,
    arcs: BTreeSet<Arc>,
}

/// On-disk triangulation format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangulationFile {
    pub m: u32,
    pub arcs: Vec<[u32; 2]>,
}

impl Triangulation {
    pub fn new(m: u32, arcs: &[Arc]) -> Result<Triangulation> {
        if m < 3 {
            return Err(SurfaceError::TooSmall(m));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in arcs {
            let (i, j) = norm(a, b);
            if i < 1 || j > m || i == j || is_boundary(m, (i, j)) {
                return Err(SurfaceError::InvalidArc(a, b));
            }
            set.insert((i, j));
        }
        let v: Vec<Arc> = set.iter().copied().collect();
        for (x, &p) in v.iter().enumerate() {
            for &q in &v[x + 1..] {
                if crosses(p, q) {
                    return Err(SurfaceError::Crossing(p.0, p.1, q.0, q.1));
                }
            }
        }
        let want = (m - 3) as usize;
        if set.len() != want {
            return Err(SurfaceError::NotMaximal { want, got: set.len() });
        }
        Ok(Triangulation { m, arcs: set })
    }

    pub fn from_file(f: &TriangulationFile) -> Result<Triangulation> {
        let arcs: Vec<Arc> = f.arcs.iter().map(|a| (a[0], a[1])).collect();
        Triangulation::new(f.m, &arcs)
    }

    pub fn to_file(&self) -> TriangulationFile {
        TriangulationFile { m: self.m, arcs: self.arcs.iter().map(|&(i, j)| [i, j]).collect() }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn internal_arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.arcs.iter().copied()
    }

    pub fn boundary_arcs(&self) -> Vec<Arc> {
        let mut b: Vec<Arc> = (1..self.m).map(|i| (i, i + 1)).collect();
        b.push((1, self.m));
        b.sort();
        b
    }

    /// All arcs (internal and boundary), sorted: the variable order of
    /// [`polygon_seed`].
    pub fn all_arcs(&self) -> Vec<Arc> {
        let mut v: Vec<Arc> = self.arcs.iter().copied().chain(self.boundary_arcs()).collect();
        v.sort();
        v
    }

    pub fn contains(&self, a: Arc) -> bool {
        let a = norm(a.0, a.1);
        self.arcs.contains(&a) || is_boundary(self.m, a)
    }

    /// Triangles `a < b < c` with all three sides present.
    pub fn triangles(&self) -> Vec<(u32, u32, u32)> {
        let m = self.m;
        let mut out = Vec::new();
        for a in 1..=m {
            for b in a + 1..=m {
                if !self.contains((a, b)) {
                    continue;
                }
                for c in b + 1..=m {
                    if self.contains((b, c)) && self.contains((a, c)) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    /// The apexes of the two triangles on either side of an internal arc.
    fn quadrilateral(&self, arc: Arc) -> Result<(u32, u32)> {
        let (i, j) = norm(arc.0, arc.1);
        if is_boundary(self.m, (i, j)) {
            return Err(SurfaceError::BoundaryArc(i, j));
        }
        if !self.arcs.contains(&(i, j)) {
            return Err(SurfaceError::NotInTriangulation(i, j));
        }
        let ok = |&v: &u32| self.contains((i, v)) && self.contains((v, j));
        let inner = (i + 1..j).find(ok).expect("triangulated");
        let outer = (1..i).chain(j + 1..=self.m).find(ok).expect("triangulated");
        Ok((inner, outer))
    }

    /// Replaces an internal arc by the other diagonal of its quadrilateral.
    pub fn flip(&self, arc: Arc) -> Result<Triangulation> {
        let (k, l) = self.quadrilateral(arc)?;
        let mut arcs = self.arcs.clone();
        arcs.remove(&norm(arc.0, arc.1));
        arcs.insert(norm(k, l));
        Ok(Triangulation { m: self.m, arcs })
    }

    /// The arc that replaces `arc` under a flip.
    pub fn flipped_arc(&self, arc: Arc) -> Result<Arc> {
        let (k, l) = self.quadrilateral(arc)?;
        Ok(norm(k, l))
    }
}

/// Internal arcs `{1,k}` for `3 ≤ k ≤ m−1`.
pub fn fan_triangulation(m: u32) -> Result<Triangulation> {
    if m < 3 {
        return Err(SurfaceError::TooSmall(m));
    }
    let arcs: Vec<Arc> = (3..m).map(|k| (1, k)).collect();
    Triangulation::new(m, &arcs)
}

/// Every triangulation of the m-gon, by the triangle on side `{1,m}`.
pub fn enumerate_triangulations(m: u32) -> Result<Vec<Triangulation>> {
    if m < 3 {
        return Err(SurfaceError::TooSmall(m));
    }
    fn tri(lo: u32, hi: u32) -> Vec<Vec<Arc>> {
        if hi - lo < 2 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for k in lo + 1..hi {
            for left in tri(lo, k) {
                for right in tri(k, hi) {
                    let mut v = left.clone();
                    v.extend(right.iter().copied());
                    if k - lo > 1 {
                        v.push((lo, k));
                    }
                    if hi - k > 1 {
                        v.push((k, hi));
                    }
                    out.push(v);
                }
            }
        }
        out
    }
    tri(1, m).into_iter().map(|arcs| Triangulation::new(m, &arcs)).collect()
}

/// The seed of a triangulation: one variable per arc (sorted), internal
/// arcs exchangeable, `B = Σ B^Δ` over triangles with the counterclockwise
/// orientation.
pub fn polygon_seed(t: &Triangulation) -> Seed {
    let arcs = t.all_arcs();
    let n = arcs.len();
    let pos = |a: Arc| arcs.binary_search(&a).expect("arc of the triangulation");
    let mut b = vec![vec![0i64; n]; n];
    for (a, bb, c) in t.triangles() {
        let sides = [pos((a, bb)), pos((bb, c)), pos((a, c))];
        for k in 0..3 {
            let (p, q) = (sides[k], sides[(k + 1) % 3]);
            b[p][q] += 1;
            b[q][p] -= 1;
        }
    }
    let labels = arcs.iter().map(|&a| arc_label(t.m, a)).collect();
    let ex = arcs.iter().map(|&a| !is_boundary(t.m, a)).collect();
    Seed::root(labels, ex, ExchangeMatrix::new(&b).expect("sum of skew-symmetric blocks"))
}

/// One exchange relation against the Plücker identity of its quadrilateral.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PluckerLine {
    pub arc: String,
    pub flipped: String,
    pub relation: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PluckerReport {
    pub m: u32,
    pub lines: Vec<PluckerLine>,
}

impl PluckerReport {
    pub fn holds(&self) -> bool {
        self.lines.iter().all(|l| l.holds)
    }
}

/// For every internal arc, `x_γ · μ_γ(x_γ)` must equal
/// `x_ab x_cd + x_ad x_bc` for the quadrilateral `a < b < c < d`.
pub fn plucker_check(t: &Triangulation) -> Result<PluckerReport> {
    let s = polygon_seed(t);
    let arcs = t.all_arcs();
    let ring = s.ring().clone();
    let var = |a: Arc| LaurentPoly::var(&ring, VarId(arcs.binary_search(&norm(a.0, a.1)).unwrap() as u32));
    let mut lines = Vec::new();
    for gamma in t.internal_arcs() {
        let k = arcs.binary_search(&gamma).unwrap();
        let other = t.flipped_arc(gamma)?;
        let mut q = [gamma.0, gamma.1, other.0, other.1];
        q.sort();
        let [a, b, c, d] = q;
        let product = s.expansion(k).mul(s.mutate(k)?.expansion(k)).map_err(SeedError::from)?;
        let rhs = var((a, b))
            .mul(&var((c, d)))
            .and_then(|x| x.add(&var((a, d)).mul(&var((b, c)))?))
            .map_err(SeedError::from)?;
        let lbl = |x: Arc| arc_label(t.m, x);
        lines.push(PluckerLine {
            arc: lbl(gamma),
            flipped: lbl(other),
            relation: format!(
                "{}*{} = {}*{} + {}*{}",
                lbl((a, c)),
                lbl((b, d)),
                lbl((a, b)),
                lbl((c, d)),
                lbl((a, d)),
                lbl((b, c))
            ),
            holds: product == rhs,
        });
    }
    Ok(PluckerReport { m: t.m, lines })
}

/// `polygon_seed(flip(t, γ))` against `μ_γ(polygon_seed(t))`, matching
/// variables by arc with the new diagonal in place of `γ`.
pub fn flip_matches_mutation(t: &Triangulation, gamma: Arc) -> Result<bool> {
    let flipped = t.flip(gamma)?;
    let new_arc = t.flipped_arc(gamma)?;
    let s = polygon_seed(t);
    let arcs = t.all_arcs();
    let k = arcs.binary_search(&norm(gamma.0, gamma.1)).unwrap();
    let mutated = s.mutate(k)?;
    let f = polygon_seed(&flipped);
    let farcs = flipped.all_arcs();
    let to_old = |a: Arc| if a == new_arc { k } else { arcs.binary_search(&a).unwrap() };
    Ok((0..farcs.len()).all(|p| {
        let op = to_old(farcs[p]);
        f.is_exchangeable(p) == mutated.is_exchangeable(op)
            && (0..farcs.len()).all(|q| f.b(p, q) == mutated.b(op, to_old(farcs[q])))
    }))
}

fn arc_map(src: &Triangulation, tgt: &Triangulation, rule: impl Fn(Arc) -> Option<Arc>) -> Result<Vec<Image>> {
    let tarcs = tgt.all_arcs();
    src.all_arcs()
        .into_iter()
        .map(|a| match rule(a) {
            Some(b) => tarcs
                .binary_search(&b)
                .map(Image::Var)
                .map_err(|_| SurfaceError::Morphism(MorphismError::CM1Violation(arc_label(src.m, a)))),
            None => Ok(Image::Const(0.into())),
        })
        .collect()
}

/// `j_{m,m'}`: fan seed of the m-gon into the fan seed of the m'-gon,
/// `x_ij ↦ x_ij`.
pub fn polygon_inclusion(m: u32, m_prime: u32) -> Result<MorphismSpec> {
    if m < 3 || m_prime < m {
        return Err(SurfaceError::Range(format!("3 <= m <= m', got m={} m'={}", m, m_prime)));
    }
    let (s, t) = (fan_triangulation(m)?, fan_triangulation(m_prime)?);
    let assignment = arc_map(&s, &t, Some)?;
    Ok(MorphismSpec::new(polygon_seed(&s), polygon_seed(&t), assignment)?)
}

fn projection_rule(m_prime: u32) -> impl Fn(Arc) -> Option<Arc> {
    move |(k, l)| if l <= m_prime { Some((k, l)) } else { None }
}

fn projection_seeds(m: u32, m_prime: u32) -> Result<(Triangulation, Triangulation)> {
    if m_prime < 4 || m_prime > m {
        return Err(SurfaceError::Range(format!("4 <= m' <= m, got m={} m'={}", m, m_prime)));
    }
    Ok((fan_triangulation(m)?, fan_triangulation(m_prime)?))
}

/// `π_{m,m'}`: `x_kl ↦ x'_kl` if `l ≤ m'`, else 0, between fan seeds.
///
/// For `m' < m` this is rejected with a CM2 violation: `x_{1,m'}` is
/// internal in the m-gon fan but a side of the m'-gon. Other source
/// triangulations do not help: those that avoid `{1,m'}` either send
/// every exchangeable variable to 0 or have an exchange relation through
/// a vertex beyond `m'`, which the map kills (CM3 fails).
pub fn grassmannian_projection(m: u32, m_prime: u32) -> Result<MorphismSpec> {
    let (s, t) = projection_seeds(m, m_prime)?;
    let assignment = arc_map(&s, &t, projection_rule(m_prime))?;
    Ok(MorphismSpec::new(polygon_seed(&s), polygon_seed(&t), assignment)?)
}

/// The assignment of [`grassmannian_projection`] without the CM2 check,
/// so that CM1 and CM3 can still be examined.
pub fn grassmannian_candidate(m: u32, m_prime: u32) -> Result<MorphismSpec> {
    let (s, t) = projection_seeds(m, m_prime)?;
    let assignment = arc_map(&s, &t, projection_rule(m_prime))?;
    Ok(MorphismSpec::candidate(polygon_seed(&s), polygon_seed(&t), assignment)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fans() {
        assert_eq!(fan_triangulation(4).unwrap().internal_arcs().collect::<Vec<_>>(), vec![(1, 3)]);
        assert_eq!(fan_triangulation(3).unwrap().internal_arcs().count(), 0);
        assert_eq!(fan_triangulation(6).unwrap().internal_arcs().collect::<Vec<_>>(), vec![(1, 3), (1, 4), (1, 5)]);
        assert!(fan_triangulation(2).is_err());
        assert!(matches!(Triangulation::new(4, &[(1, 3), (2, 4)]), Err(SurfaceError::Crossing(..))));
        assert!(matches!(Triangulation::new(5, &[(1, 3)]), Err(SurfaceError::NotMaximal { .. })));
    }

    #[test]
    fn square_seed_and_plucker() {
        let t = fan_triangulation(4).unwrap();
        let s = polygon_seed(&t);
        assert_eq!(s.len(), 5);
        assert_eq!(s.exchangeable_indices().len(), 1);
        let r = plucker_check(&t).unwrap();
        assert!(r.holds());
        assert_eq!(r.lines[0].relation, "x13*x24 = x12*x34 + x14*x23");
        let tri = polygon_seed(&fan_triangulation(3).unwrap());
        assert!(tri.exchangeable_indices().is_empty());
        assert_eq!(tri.b(0, 1), -tri.b(1, 0));
        assert!(plucker_check(&fan_triangulation(3).unwrap()).unwrap().lines.is_empty());
    }

    #[test]
    fn flips() {
        let sq = fan_triangulation(4).unwrap();
        let f = sq.flip((1, 3)).unwrap();
        assert_eq!(f.internal_arcs().collect::<Vec<_>>(), vec![(2, 4)]);
        assert_eq!(f.flip((2, 4)).unwrap(), sq);
        assert!(matches!(sq.flip((1, 2)), Err(SurfaceError::BoundaryArc(1, 2))));
        let p = fan_triangulation(5).unwrap().flip((1, 3)).unwrap();
        assert_eq!(p.internal_arcs().collect::<Vec<_>>(), vec![(1, 4), (2, 4)]);
    }

    #[test]
    fn counts() {
        let catalan = [1, 1, 2, 5, 14, 42];
        for m in 3..=7u32 {
            assert_eq!(enumerate_triangulations(m).unwrap().len(), catalan[(m - 2) as usize]);
        }
    }

    #[test]
    fn inner_triangle_hexagon() {
        let t = Triangulation::new(6, &[(1, 3), (3, 5), (1, 5)]).unwrap();
        let s = polygon_seed(&t);
        let ex = s.exchangeable_indices();
        assert!(!s.subseed(&ex).is_acyclic());
        let dashed = (0..s.len())
            .flat_map(|i| (0..s.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| s.b(i, j) > 0 && !s.is_exchangeable(i) && !s.is_exchangeable(j))
            .count();
        assert_eq!(dashed, 3);
        assert_eq!(s.simplify().to_dot().matches("dashed").count(), 0);
    }

    #[test]
    fn grassmannian() {
        assert!(matches!(
            grassmannian_projection(5, 4),
            Err(SurfaceError::Morphism(MorphismError::CM2Violation(_)))
        ));
        let p = grassmannian_candidate(5, 4).unwrap();
        assert_eq!(p.image_of("x45"), Some(&Image::Const(0.into())));
        assert_eq!(p.image_label(p.source().index_of("x13").unwrap()), "x13");
        assert_eq!(p.cm2_violations(), vec![p.source().index_of("x14").unwrap()]);
        assert!(p.verify_cm3(3).unwrap().verified());
        let id = grassmannian_projection(5, 5).unwrap();
        assert!(id.assignment().iter().enumerate().all(|(i, a)| *a == Image::Var(i)));
    }
}
