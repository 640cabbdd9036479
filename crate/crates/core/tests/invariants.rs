mod common;

use edgeshift::measures::{self, Cylinder, EdgeMarkov, MeasureRoute, ParryMeasure, StochMat};
use edgeshift::scalar::ratio;
use edgeshift::spectral::{self, AdjMatrix, SpectralOptions};
use edgeshift::verify::{verify, Status, VerifyOptions};
use edgeshift::Rational;
use num_traits::Zero;
use proptest::prelude::*;

fn irreducible(spec: &edgeshift::langmodel::ShiftSpec) -> bool {
    spectral::build_adjacency(spec).map(|a| a.is_irreducible()).unwrap_or(false)
}

// rows of positive integer weights on a random support containing a cycle through every vertex
fn arb_stochastic() -> impl Strategy<Value = Vec<Vec<Rational>>> {
    (2usize..=4).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(0i64..=5, n), n).prop_map(move |w| {
            (0..n)
                .map(|i| {
                    let mut row = w[i].clone();
                    row[(i + 1) % n] += 1;
                    let s: i64 = row.iter().sum();
                    row.iter().map(|&x| ratio(x, s)).collect()
                })
                .collect()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verify_suite_passes(spec in common::arb_spec()) {
        let rep = verify(&spec, None, &VerifyOptions::default()).unwrap();
        let failed: Vec<_> = rep.checks.iter().filter(|c| c.status == Status::Fail).collect();
        prop_assert!(failed.is_empty(), "{}: {:?}", spec, failed);
    }

    #[test]
    fn parallel_edges_share_mass(spec in common::arb_spec().prop_filter("irreducible", irreducible)) {
        let pm = ParryMeasure::float(&spec, &SpectralOptions::default()).unwrap();
        let a = &pm.adjacency;
        for x in 0..a.len() {
            for y in 0..a.len() {
                let k = a.get(x, y);
                if k < 2 {
                    continue;
                }
                let first = pm.cylinder(&Cylinder::edge_word(vec![x, y], vec![1]), MeasureRoute::Parry).unwrap();
                let last = pm.cylinder(&Cylinder::edge_word(vec![x, y], vec![k]), MeasureRoute::Parry).unwrap();
                prop_assert_eq!(first, last);
                let union = pm.cylinder(&Cylinder::vertex_word(vec![x, y]), MeasureRoute::ShannonParry).unwrap();
                prop_assert!((union - pm.chain.stationary[x] * pm.chain.entries[x][y]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unequal_branches_push_forward(spec in common::arb_spec().prop_filter("irreducible", irreducible), seed in 1i64..50) {
        let a = spectral::build_adjacency(&spec).unwrap();
        let n = a.len();
        let mut branches = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            let w: Vec<(usize, i64)> = (0..n)
                .flat_map(|j| (0..a.get(i, j)).map(move |b| (j, 1 + (seed * (b as i64 + 1) + j as i64) % 7)))
                .collect();
            let s: i64 = w.iter().map(|x| x.1).sum();
            for (j, x) in w {
                branches[i][j].push(ratio(x, s));
            }
        }
        let m = EdgeMarkov::with_branches(&a, branches).unwrap();
        let rep = measures::pushforward_check(&m, 4, 1 << 20).unwrap();
        prop_assert!(rep.violations.is_empty());
        prop_assert!(rep.max_defect.is_zero());
    }

    #[test]
    fn lift_inverts_shannon_parry(rows in arb_stochastic()) {
        let labels = AdjMatrix::from_rows(vec![vec![0; rows.len()]; rows.len()]).labels;
        let p = StochMat::new(labels, rows).unwrap();
        let (l, a) = measures::lift_rational_stochastic(&p).unwrap();
        prop_assert!(a.row_sums().iter().all(|&s| num_bigint::BigInt::from(s) == l));
        prop_assert_eq!(measures::shannon_parry_exact(&a).unwrap(), p);
    }
}
