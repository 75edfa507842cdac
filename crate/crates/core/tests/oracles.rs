//! Closed-form oracles: known counts, exchange relations and renderings.

mod common;

use clusteralg::laurent::{RationalExpr, Ring};
use clusteralg::seed::{
    cluster_variables, express_in_cluster, is_finite_type, mutation_class, ExplorationStatus, FiniteType, Seed,
};
use clusteralg::surface::{enumerate_triangulations, fan_triangulation, polygon_seed, Triangulation};
use num_bigint::BigInt;
use num_traits::{One, Signed};

fn catalan(n: u64) -> u64 {
    (0..n).fold(1, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

fn seed2(matrix: [[i64; 2]; 2]) -> Seed {
    Seed::new(&["x1", "x2"], &["x1", "x2"], &[matrix[0].to_vec(), matrix[1].to_vec()]).unwrap()
}

#[test]
fn type_a_counts() {
    for n in 1..=5 {
        let s = common::a_n(n);
        let class = mutation_class(&s, usize::MAX, 10_000).unwrap();
        assert_eq!(class.status, ExplorationStatus::Closed);
        assert_eq!(class.seeds.len() as u64, catalan(n as u64 + 1), "seeds of A{}", n);
        let vars = cluster_variables(&s, usize::MAX).unwrap();
        assert_eq!(vars.variables.len(), n * (n + 3) / 2, "variables of A{}", n);
    }
}

#[test]
fn rank_two_finite_types() {
    assert_eq!(is_finite_type(&seed2([[0, 1], [-1, 0]]), 1000).unwrap(), FiniteType::Finite(5));
    assert_eq!(is_finite_type(&seed2([[0, 1], [-2, 0]]), 1000).unwrap(), FiniteType::Finite(6));
    assert_eq!(is_finite_type(&seed2([[0, 1], [-3, 0]]), 1000).unwrap(), FiniteType::Finite(8));
    assert_eq!(is_finite_type(&seed2([[0, 2], [-2, 0]]), 20).unwrap(), FiniteType::Unknown);
}

#[test]
fn d4_has_sixteen_variables() {
    let s = Seed::new(
        &["x1", "x2", "x3", "x4"],
        &["x1", "x2", "x3", "x4"],
        &[vec![0, 0, 0, 1], vec![0, 0, 0, 1], vec![0, 0, 0, 1], vec![-1, -1, -1, 0]],
    )
    .unwrap();
    assert_eq!(is_finite_type(&s, 1000).unwrap(), FiniteType::Finite(16));
    assert_eq!(mutation_class(&s, usize::MAX, 1000).unwrap().seeds.len(), 50);
}

#[test]
fn a2_pentagon_recurrence() {
    let s = seed2([[0, 1], [-1, 0]]);
    // alternate mutations walk round the pentagon: 1 -> 2 -> 1 -> 2 -> 1
    let mut cur = s.clone();
    let mut seen = Vec::new();
    for k in [0, 1, 0, 1, 0] {
        cur = cur.mutate(k).unwrap();
        seen.push(cur.expansion(k).to_fraction_string());
    }
    assert_eq!(seen, ["(1 + x2)/x1", "(1 + x2 + x1)/(x1*x2)", "(1 + x1)/x2", "x1", "x2"]);
    assert_eq!(cur.labels(), ["x2", "x1"]);
    assert_eq!(cur.matrix().rows(), vec![vec![0, -1], vec![1, 0]]);
}

#[test]
fn laurent_positivity_in_finite_type() {
    for s in [common::a_n(4), seed2([[0, 1], [-3, 0]])] {
        for p in cluster_variables(&s, usize::MAX).unwrap().variables {
            assert!(p.terms().iter().all(|(_, c)| c.is_positive()), "{}", p);
            // at the all-ones point every cluster variable is a positive integer
            let v = p.evaluate(&|_| Some(BigInt::one())).unwrap();
            assert!(v.is_integer() && v.is_positive(), "{} = {}", p, v);
        }
    }
}

#[test]
fn expressing_in_a_neighbouring_cluster() {
    let s = seed2([[0, 1], [-1, 0]]);
    let m = s.mutate(1).unwrap();
    let x2 = RationalExpr::from(s.ring().var("x2").unwrap());
    let e = express_in_cluster(&x2, &m).unwrap();
    assert_eq!(e.laurent().unwrap().to_fraction_string(), "(1 + x1)/x2'");
}

#[test]
fn polygon_counts_match_arcs() {
    for m in 4..=8u32 {
        let ts = enumerate_triangulations(m).unwrap();
        assert_eq!(ts.len() as u64, catalan(m as u64 - 2), "triangulations of {}-gon", m);
        let s = polygon_seed(&fan_triangulation(m).unwrap());
        let class = mutation_class(&s, usize::MAX, 10_000).unwrap();
        assert_eq!(class.seeds.len(), ts.len());
        let frozen = s.frozen_indices().len();
        let vars = cluster_variables(&s, usize::MAX).unwrap().variables.len();
        assert_eq!(vars - frozen, common::count_internal_arcs(m as usize));
    }
}

#[test]
fn hexagon_inner_triangle_rendering() {
    let t = Triangulation::new(6, &[(1, 3), (3, 5), (1, 5)]).unwrap();
    let dot = polygon_seed(&t).to_dot();
    assert_eq!(dot.matches("style=filled").count(), 3);
    assert_eq!(dot.matches("style=dashed").count(), 3);
}

#[test]
fn canonical_text_and_dot() {
    let r = Ring::new(&["x1", "x2", "x3"]);
    let e = RationalExpr::parse(&r, "(x3*x1 + 1 + x2)/(x2*x1)").unwrap();
    assert_eq!(e.to_laurent().unwrap().to_fraction_string(), "(1 + x2 + x1*x3)/(x1*x2)");
    let e = RationalExpr::parse(&r, "x1^-2 - 3*x2^2*x1^-2").unwrap();
    assert_eq!(e.to_laurent().unwrap().to_fraction_string(), "(1 - 3*x2^2)/(x1^2)");

    let s = common::a_n(3);
    assert_eq!(
        s.to_dot(),
        "digraph Q {\n  n0 [label=\"x1\", shape=circle, style=filled, fillcolor=black, fontcolor=white];\n  \
         n1 [label=\"x2\", shape=circle, style=filled, fillcolor=black, fontcolor=white];\n  \
         n2 [label=\"x3\", shape=circle, style=filled, fillcolor=black, fontcolor=white];\n  \
         n0 -> n1 [label=\"(1,1)\"];\n  n1 -> n2 [label=\"(1,1)\"];\n}\n"
    );
}
