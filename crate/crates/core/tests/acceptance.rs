//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Every sub-check is either required (a failure exits nonzero) or a printed
//! claim that does not hold for this construction; the latter are reported as
//! FAIL with the computed values and only affect the exit code under
//! `--include-ignored` or `--ignored`. The same claims are `#[ignore]`d tests
//! in `literal_claims.rs`.

mod common;

use std::time::{Duration, Instant};

use edgeshift::genfun::{self, SystemMode};
use edgeshift::langmodel::{enumerate_slice, oracle_table, Budget, ShiftSpec};
use edgeshift::measures::{self, Cylinder, ParryMeasure, StochMat};
use edgeshift::scalar::{int, ratio};
use edgeshift::spectral::{self, AdjMatrix, SpectralOptions};
use edgeshift::verify::{verify, Status, VerifyOptions};
use edgeshift::{QPoly, QRatFun, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::spec;

#[derive(Default)]
struct Outcome {
    required: Vec<(String, bool)>,
    claims: Vec<(String, bool)>,
    notes: Vec<String>,
}

impl Outcome {
    fn need(&mut self, what: &str, ok: bool) {
        self.required.push((what.to_string(), ok));
    }

    fn claim(&mut self, what: &str, ok: bool) {
        self.claims.push((what.to_string(), ok));
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn required_ok(&self) -> bool {
        self.required.iter().all(|x| x.1)
    }

    fn claims_ok(&self) -> bool {
        self.claims.iter().all(|x| x.1)
    }
}

fn rf(num: &[i64], den: &[i64]) -> QRatFun {
    QRatFun::new(QPoly::from_ints(num), QPoly::from_ints(den)).unwrap()
}

fn big(v: &[u128]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(x.into())).collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn table_example() -> Outcome {
    let mut o = Outcome::default();
    let t0 = Instant::now();
    let s = spec(2, &["010"], &[("000", 2)]);
    let t = oracle_table(&s, 10, &Budget::default()).unwrap();
    let sol = genfun::solve(&s).unwrap();
    let f = [1u128, 2, 4, 8, 17, 37, 81, 178, 392, 864, 1905];
    let g = [0u128, 0, 0, 2, 6, 14, 32, 72, 160, 354, 782];
    let fa = [0u128, 0, 0, 1, 2, 4, 9, 20, 44, 97, 214];
    o.need("oracle f", t.f == f);
    o.need("oracle g", t.g[0] == g);
    o.need("oracle f_a", t.fa[0] == fa);
    o.need("series f", sol.f.series_coeffs(10).unwrap() == big(&f));
    o.need("series g", sol.g[0].series_coeffs(10).unwrap() == big(&g));
    o.need("series f_a", sol.fa[0].series_coeffs(10).unwrap() == big(&fa));
    let el = t0.elapsed();
    o.need("runtime < 5 s", el < Duration::from_secs(5));
    o.note(format!("{el:.2?}"));
    o
}

fn perron_example() -> Outcome {
    let mut o = Outcome::default();
    let s = spec(2, &["010"], &[("100", 3)]);
    let a = spectral::build_adjacency(&s).unwrap();
    o.need("A", a.entries == vec![vec![1, 1, 0, 0], vec![0, 0, 0, 1], vec![3, 1, 0, 0], vec![0, 0, 1, 1]]);
    let p = genfun::build_p::<Rational>(&s).unwrap();
    let q = genfun::build_q::<Rational>(&s).unwrap();
    let pz = |c: &[Rational]| QRatFun::from_poly(QPoly::new(c.to_vec()));
    o.need(
        "P(z)",
        *p.get(0, 0) == pz(&[int(0), int(0), int(0), ratio(-1, 3)])
            && *p.get(0, 1) == rf(&[0, 0, -1], &[1])
            && *p.get(1, 0) == pz(&[int(0), ratio(2, 3)])
            && *p.get(1, 1) == rf(&[0, -1, 0, -1], &[1]),
    );
    o.need(
        "Q(z)",
        *q.get(0, 0) == pz(&[int(0), int(0), int(0), ratio(-1, 3)])
            && *q.get(0, 1) == rf(&[0, -1], &[1])
            && *q.get(1, 0) == pz(&[int(0), int(0), ratio(2, 3)])
            && *q.get(1, 1) == rf(&[0, -1, 0, -1], &[1]),
    );
    let r = genfun::p_inverse_row_sums::<Rational>(&s).unwrap();
    let sr = genfun::q_inverse_row_sums::<Rational>(&s).unwrap();
    o.need("R_1", r[0] == rf(&[-3, 3, -3], &[0, 0, 2, 1, 0, 1]));
    o.need("R_2", r[1] == rf(&[-2, 0, -1], &[0, 0, 2, 1, 0, 1]));
    o.need("S_1", sr[0] == rf(&[-3], &[2, 1, 0, 1]));
    o.need("S_2", sr[1] == rf(&[-2, -1], &[0, 2, 1, 0, 1]));
    let rep = spectral::analyze(&s, &SpectralOptions::default()).unwrap();
    o.need("theta = 2 exact", rep.certificate.exact == Some(int(2)));
    let v = rep.vectors.unwrap();
    o.need("U", close(&v.u_f64(), &[1.5, 1.0, 0.5, 1.0], 1e-12));
    o.need("V", close(&v.v_f64(), &[2.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0], 1e-12));
    o
}

fn normalization_identities() -> Outcome {
    let mut o = Outcome::default();
    let opts = SpectralOptions::default();
    let rep = spectral::analyze(&spec(2, &["010"], &[("100", 3)]), &opts).unwrap();
    let n = rep.normalization.unwrap();
    o.need("U^T V = 11/3 (length-3 words)", (n.dot - 11.0 / 3.0).abs() < 1e-9 && (n.formula - 11.0 / 3.0).abs() < 1e-9);
    o.need("exact 11/3", n.exact == Some((ratio(11, 3), ratio(11, 3))));

    let r7 = 7f64.sqrt();
    let rep = spectral::analyze(&spec(2, &["00"], &[("01", 2), ("10", 3), ("11", 2)]), &opts).unwrap();
    let v = rep.vectors.as_ref().unwrap();
    let n = rep.normalization.as_ref().unwrap();
    o.need("irrational root 1+sqrt7", (rep.theta - (1.0 + r7)).abs() < 1e-9);
    o.need("U = (sqrt7-1, 2)", close(&v.u_f64(), &[r7 - 1.0, 2.0], 1e-9));
    o.need("V = (2(sqrt7-2), 5-sqrt7)", close(&v.v_f64(), &[2.0 * (r7 - 2.0), 5.0 - r7], 1e-9));
    o.need("U^T V = 28-8sqrt7", (n.dot - (28.0 - 8.0 * r7)).abs() < 1e-9 && n.agree);
    o.need("property (P) reported unknown", rep.property_p.is_none() && !n.property_p);

    // alpha = a+b+c; multiplicity 1 on every word is the full shift
    let family: [(u64, Vec<(&str, u64)>); 3] =
        [(3, vec![]), (8, vec![("10", 2), ("20", 3), ("30", 3)]), (15, vec![("10", 5), ("20", 5), ("30", 5)])];
    for (alpha, r) in family {
        let rep = spectral::analyze(&spec(4, &[], &r), &opts).unwrap();
        let n = rep.normalization.unwrap();
        let sq = (1.0 + alpha as f64).sqrt();
        o.need(&format!("alpha={alpha}: theta = 2+sqrt(1+alpha)"), (rep.theta - (2.0 + sq)).abs() < 1e-9);
        o.need(&format!("alpha={alpha}: U^T V = theta^(p-1)(1+R'(theta))"), n.agree);
        let printed = (5.0 - alpha as f64 + sq) / (2.0 + sq);
        o.claim(&format!("alpha={alpha}: printed U^T V {printed:.6}"), (n.dot - printed).abs() < 1e-9);
        o.note(format!("alpha={alpha}: U^T V = {:.12} (2 sqrt(1+alpha) = {:.12})", n.dot, 2.0 * sq));
    }
    o
}

fn nonreduced_example() -> Outcome {
    let mut o = Outcome::default();
    let s = spec(2, &["001"], &[("00", 2)]);
    let sys = genfun::build_system::<Rational>(&s).unwrap();
    let pz = |c: &[Rational]| QRatFun::from_poly(QPoly::new(c.to_vec()));
    let m = &sys.matrix;
    let want = [
        [rf(&[-2, 1], &[1]), pz(&[int(0), ratio(-1, 2)]), rf(&[0, 2], &[1])],
        [rf(&[1], &[1]), pz(&[int(0), ratio(1, 2), ratio(-1, 2)]), rf(&[], &[1])],
        [rf(&[1], &[1]), pz(&[int(0), ratio(1, 2)]), rf(&[0, 0, 0, -1], &[1])],
    ];
    let entrywise = (0..3).all(|i| (0..3).all(|j| *m.get(i, j) == want[i][j]));
    o.need("3x3 system entrywise", sys.mode == SystemMode::NonReduced && entrywise);
    let sol = genfun::solve(&s).unwrap();
    let t = oracle_table(&s, 12, &Budget::default()).unwrap();
    o.need("series = oracle for n <= 12", sol.f.series_coeffs(12).unwrap() == big(&t.f));
    let rep = spectral::analyze(&s, &SpectralOptions { allow_reducible: true, ..SpectralOptions::default() }).unwrap();
    o.need("theta = 2", rep.certificate.exact == Some(int(2)));
    o.claim("F(z) = z/(z-2)", sol.f == rf(&[0, 1], &[-2, 1]));
    o.note(format!("F(z) = ({}) / ({}), f(0..8) = {:?}", sol.f.num(), sol.f.den(), &t.f[..9]));
    o
}

fn entropy_split() -> Outcome {
    let mut o = Outcome::default();
    let s = spec(2, &["00"], &[("110", 2), ("01", 3)]);
    let a = spectral::build_adjacency(&s).unwrap();
    let at = spectral::build_tilde_adjacency(&s).unwrap();
    let th = spectral::power_iteration(&a).unwrap().theta;
    let tt = spectral::power_iteration(&at).unwrap().theta;
    o.need("theta(A) in [2.55, 2.65]", (2.55..=2.65).contains(&th));
    o.need("theta(A~) in [3.85, 3.95]", (3.85..=3.95).contains(&tt));
    let card = enumerate_slice(&s, 3, &Budget::default()).unwrap().cardinality;
    o.need("|Lambda_3| = 12", card == 12);
    let (x, y) = (at.index_of(&[1, 0]).unwrap(), at.index_of(&[0, 1]).unwrap());
    let paths = at.get(x, y) * at.get(y, x);
    o.need("A~ paths 10->01->10 = 9 = m(1010)^2", paths == 9 && s.multiplicity(&[1, 0, 1, 0]).unwrap() == 3);
    o.claim("sum of A~ entries = 9", at.total() == 9);
    o.note(format!("theta(A) = {th:.6}, theta(A~) = {tt:.6}, sum A = {}, sum A~ = {}", a.total(), at.total()));
    o
}

fn escape_fixture() -> Outcome {
    let mut o = Outcome::default();
    let s = spec(2, &["00"], &[("01", 2)]);
    let a = spectral::build_adjacency(&s).unwrap();
    o.need("A = [[0,2],[1,1]]", a.entries == vec![vec![0, 2], vec![1, 1]]);
    let hole = Cylinder::parse(&s, &a, "0*1#2 1*1#1").unwrap();
    let rep = measures::escape_rate(&s, &hole, 12, &Budget::default()).unwrap();
    o.need("h_W(2) = 7", rep.h[2] == 7);
    o.need("tau_011(3) = 6", rep.tau[3] == 6);
    o.need("transfer counts = brute force (n <= 12)", rep.h == measures::avoiding_path_counts_brute(&a, &hole, 12).unwrap());
    o.need("ln lambda_W > ln theta_011 at n_max = 12", rep.lambda.ln() > rep.theta_w.ln());
    o.note(format!("ln lambda_W = {:.6}, ln theta_w = {:.6}, rate = {:.6}", rep.lambda.ln(), rep.theta_w.ln(), rep.rate));
    o
}

fn property_suite() -> Outcome {
    let mut o = Outcome::default();
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut specs: Vec<ShiftSpec> = Vec::new();
    for reduced in [true, false] {
        let mut k = 0;
        while k < 10 {
            let s = common::random_spec_with(&mut rng, Some(reduced));
            if spectral::build_adjacency(&s).is_ok_and(|a| a.is_irreducible()) {
                specs.push(s);
                k += 1;
            }
        }
    }
    let opts = VerifyOptions { max_n: 10, measure_len: 4, budget: Budget::default() };
    let names = [
        "series_vs_oracle",
        "recurrence",
        "eigen_residuals",
        "theta_routes",
        "power_sums",
        "kolmogorov",
        "route_agreement_measures",
        "pushforward",
    ];
    let mut power = 0;
    for s in &specs {
        let rep = verify(s, None, &opts).unwrap();
        for name in names {
            let c = rep.get(name).unwrap();
            if name == "power_sums" && c.status == Status::Pass {
                power += 1;
            }
            o.need(&format!("{s}: {name}"), c.status != Status::Fail);
        }
        o.need(&format!("{s}: measures ran"), rep.get("kolmogorov").unwrap().status == Status::Pass);
    }
    let el = t0.elapsed();
    o.need("runtime < 60 s", el < Duration::from_secs(60));
    o.note(format!("{} specs (10 reduced, 10 not), power sums applicable on {power}, {el:.2?}", specs.len()));
    o
}

fn round_trips() -> Outcome {
    let mut o = Outcome::default();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for k in 0..10 {
        let n = rng.gen_range(2..=4);
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut w: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.6) { rng.gen_range(1..=6) } else { 0 }).collect();
                w[(i + 1) % n] += 1;
                let s: i64 = w.iter().sum();
                w.iter().map(|&x| ratio(x, s)).collect()
            })
            .collect();
        let labels = AdjMatrix::from_rows(vec![vec![0; n]; n]).labels;
        let p = StochMat::new(labels, rows).unwrap();
        let (_, a) = measures::lift_rational_stochastic(&p).unwrap();
        o.need(&format!("matrix {k}"), measures::shannon_parry_exact(&a).unwrap() == p);
    }
    let s = spec(2, &["11"], &[("00", 3), ("01", 3), ("10", 3)]);
    let rep = measures::equal_multiplicity_check(&s, 5).unwrap();
    o.need("push-forward = Parry of the binary matrix, exactly", rep.failures.is_empty());
    o.note(format!("{} vertex words up to 5 edges, M = {}", rep.checked, rep.multiplicity));
    // the Shannon-Parry chain itself is the binary matrix's Parry chain
    let pm = ParryMeasure::float(&s, &SpectralOptions::default()).unwrap();
    let hat = measures::shannon_parry_float(&AdjMatrix::from_rows(vec![vec![1, 1], vec![1, 0]])).unwrap();
    let gap = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (pm.chain.entries[i][j] - hat.entries[i][j]).abs()).fold(0.0, f64::max);
    o.need("same stochastic matrix", gap < 1e-12);
    o
}

fn main() {
    let strict = std::env::args().any(|a| a == "--include-ignored" || a == "--ignored");
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("counts table", table_example),
        ("Perron data of the 4-vertex example", perron_example),
        ("normalization identities", normalization_identities),
        ("non-reduced union", nonreduced_example),
        ("entropy split", entropy_split),
        ("escape-rate fixtures", escape_fixture),
        ("property suite", property_suite),
        ("round trips", round_trips),
    ];
    let mut bad = false;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let ok = o.required_ok() && o.claims_ok();
        println!("criterion {}: {} {name}", i + 1, if ok { "PASS" } else { "FAIL" });
        for (what, _) in o.required.iter().filter(|x| !x.1) {
            println!("    required check failed: {what}");
        }
        for (what, _) in o.claims.iter().filter(|x| !x.1) {
            println!("    printed value does not hold: {what}");
        }
        for n in &o.notes {
            println!("    {n}");
        }
        bad |= !o.required_ok() || (strict && !o.claims_ok());
    }
    if bad {
        std::process::exit(1);
    }
}
