//! Random seeds and morphisms shared by the integration tests.
#![allow(dead_code)]

use clusteralg::seed::{ExchangeMatrix, Seed};
use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::Rng;

/// Skew-symmetrisable `n × n` matrix with entries in `[-max, max]`: a
/// random symmetriser `d_i ∈ {1, 2}` and, per pair, `b_ij = c·d_j/g`,
/// `b_ji = −c·d_i/g` with `g = gcd(d_i, d_j)`.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, max: i64) -> Vec<Vec<i64>> {
    let skew = rng.gen_bool(0.5);
    let d: Vec<i64> = (0..n).map(|_| if skew { 1 } else { rng.gen_range(1..=2) }).collect();
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let g = d[i].gcd(&d[j]);
            let (ui, uj) = (d[j] / g, d[i] / g);
            let cmax = max / ui.max(uj);
            let c = rng.gen_range(-cmax..=cmax);
            b[i][j] = c * ui;
            b[j][i] = -c * uj;
        }
    }
    b
}

pub fn skew_matrix<R: Rng>(rng: &mut R, n: usize, max: i64) -> Vec<Vec<i64>> {
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let c = rng.gen_range(-max..=max);
            b[i][j] = c;
            b[j][i] = -c;
        }
    }
    b
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{}{}", prefix, i)).collect()
}

/// Root seed on `x1..xn` with at least one exchangeable variable.
pub fn random_seed<R: Rng>(rng: &mut R, max_n: usize, max_entry: i64) -> Seed {
    let n = rng.gen_range(1..=max_n);
    let b = random_matrix(rng, n, max_entry);
    let mut ex: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.75)).collect();
    let k = rng.gen_range(0..n);
    ex[k] = true;
    Seed::root(labels("x", n), ex, ExchangeMatrix::new(&b).unwrap())
}

/// Two seeds sharing a frozen block: `s1 = (a…, d…)`, `s2 = (b…, e…)`
/// where the `e` variables are a shuffled copy of the `d` block. Both
/// sides have at least one non-shared variable.
pub struct GluePair {
    pub s1: Seed,
    pub delta1: Vec<usize>,
    pub s2: Seed,
    pub delta2: Vec<usize>,
}

pub fn random_glue_pair<R: Rng>(rng: &mut R) -> GluePair {
    let d = rng.gen_range(0..=2);
    let n1 = rng.gen_range(1..=3);
    let n2 = rng.gen_range(1..=3);
    let block = skew_matrix(rng, d, 2);
    let side = |rng: &mut R, n: usize, prefix: &str, dprefix: &str, perm: &[usize]| {
        let mut b = skew_matrix(rng, n + d, 2);
        for i in 0..d {
            for j in 0..d {
                b[n + perm[i]][n + perm[j]] = block[i][j];
            }
        }
        let mut names = labels(prefix, n);
        names.extend(labels(dprefix, d));
        let ex: Vec<bool> = (0..n + d).map(|i| i < n && rng.gen_bool(0.8)).collect();
        Seed::root(names, ex, ExchangeMatrix::new(&b).unwrap())
    };
    let id: Vec<usize> = (0..d).collect();
    let mut perm = id.clone();
    perm.shuffle(rng);
    let s1 = side(rng, n1, "a", "d", &id);
    let s2 = side(rng, n2, "b", "e", &perm);
    GluePair { s1, delta1: (n1..n1 + d).collect(), s2, delta2: (n2..n2 + d).collect() }
}

/// Independent oracle: internal arcs `{i, j}` of the m-gon, i.e. pairs
/// of vertices that are not neighbours on the boundary.
pub fn count_internal_arcs(m: usize) -> usize {
    let mut count = 0;
    for i in 0..m {
        for j in i + 1..m {
            let adjacent = j == i + 1 || (i == 0 && j == m - 1);
            if !adjacent {
                count += 1;
            }
        }
    }
    count
}

/// Linear A_n quiver `1 → 2 → … → n`, coefficient-free.
pub fn a_n(n: usize) -> Seed {
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n.saturating_sub(1) {
        b[i][i + 1] = 1;
        b[i + 1][i] = -1;
    }
    Seed::root(labels("x", n), vec![true; n], ExchangeMatrix::new(&b).unwrap())
}
