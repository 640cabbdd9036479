//! The invariant suite: every computed quantity against an independent route.

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::genfun::{self, GenFunError};
use crate::langmodel::{oracle_table, Budget, LangError, ShiftSpec};
use crate::measures::{self, Cylinder, MeasureError, MeasureRoute, ParryMeasure};
use crate::ratfield::AlgebraError;
use crate::specfile::Expected;
use crate::spectral::{self, SpectralError, SpectralOptions, SpectralReport};

pub const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    GenFun(#[from] GenFunError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, ok: bool, detail: String) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.checks.push(Check { name: name.into(), status, detail });
    }

    fn skip(&mut self, name: &str, detail: &str) {
        self.checks.push(Check { name: name.into(), status: Status::Skipped, detail: detail.into() });
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub max_n: usize,
    /// Edge count for the measure checks.
    pub measure_len: usize,
    pub budget: Budget,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_n: 10, measure_len: 4, budget: Budget::default() }
    }
}

fn first_diff(a: &[BigRational], b: &[u128]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| *x != BigRational::from_integer((*y).into()))
}

/// Runs every check that applies to the spec.
pub fn verify(spec: &ShiftSpec, expected: Option<&Expected>, opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let mut rep = VerifyReport { checks: Vec::new() };
    let n = opts.max_n;
    let table = oracle_table(spec, n, &opts.budget)?;
    let sol = genfun::solve(spec)?;

    let mut bad = Vec::new();
    if let Some(k) = first_diff(&sol.f.series_coeffs(n)?, &table.f) {
        bad.push(format!("f at n={k}"));
    }
    for (j, g) in sol.g.iter().enumerate() {
        if let Some(k) = first_diff(&g.series_coeffs(n)?, &table.g[j]) {
            bad.push(format!("g[{j}] at n={k}"));
        }
    }
    for (i, fa) in sol.fa.iter().enumerate() {
        if let Some(k) = first_diff(&fa.series_coeffs(n)?, &table.fa[i]) {
            bad.push(format!("fa[{i}] at n={k}"));
        }
    }
    rep.push(
        "series_vs_oracle",
        bad.is_empty(),
        if bad.is_empty() { format!("all series agree for n <= {n}") } else { bad.join(", ") },
    );

    let res = genfun::recurrence_residuals(spec, &table);
    let off = res.iter().filter(|r| **r != BigRational::from_integer(0.into())).count();
    rep.push("recurrence", off == 0, format!("{off} of {} residuals nonzero", res.len()));

    match expected {
        Some(Expected { f: Some(f), .. }) => {
            let k = f.len().min(table.f.len());
            let miss = (0..k).find(|&i| u128::from(f[i]) != table.f[i]);
            rep.push(
                "expected_f",
                miss.is_none(),
                match miss {
                    None => format!("{k} values match"),
                    Some(i) => format!("series mismatch at n={i}: expected {}, computed {}", f[i], table.f[i]),
                },
            );
        }
        _ => rep.skip("expected_f", "no expected values"),
    }

    let sopts = SpectralOptions { allow_reducible: true, budget: opts.budget, ..SpectralOptions::default() };
    let sr = spectral::analyze(spec, &sopts)?;
    if let Some(Expected { theta: Some(t), .. }) = expected {
        rep.push("expected_theta", (sr.theta - t).abs() <= TOL * t.max(1.0), format!("expected {t}, computed {}", sr.theta));
    } else {
        rep.skip("expected_theta", "no expected value");
    }
    spectral_checks(spec, &sr, opts, &mut rep)?;
    if sr.irreducible {
        measure_checks(spec, &sr, opts, &mut rep)?;
    } else {
        for name in ["measure_chain", "kolmogorov", "route_agreement_measures", "pushforward"] {
            rep.skip(name, "reducible adjacency matrix");
        }
    }
    Ok(rep)
}

fn spectral_checks(spec: &ShiftSpec, sr: &SpectralReport, opts: &VerifyOptions, rep: &mut VerifyReport) -> Result<(), VerifyError> {
    let tol = TOL * sr.theta.max(1.0);
    if sr.irreducible {
        let gap = (sr.theta - sr.theta_power).abs();
        rep.push("theta_routes", gap <= tol, format!("combinatorial {} vs power {}", sr.theta, sr.theta_power));
    } else {
        let best = sr.components.iter().map(|c| c.theta).fold(0.0, f64::max);
        let gap = (sr.theta - best).abs();
        rep.push("theta_routes", gap <= tol, format!("root {} vs largest component root {best}", sr.theta));
    }
    match sr.residuals {
        Some((r, l)) => rep.push("eigen_residuals", r <= TOL && l <= TOL, format!("right {r:.3e}, left {l:.3e}")),
        None => rep.skip("eigen_residuals", "no eigenvectors for a reducible matrix"),
    }
    match &sr.normalization {
        Some(nm) if nm.agree => rep.push("normalization", true, format!("U^T V = {} = formula", nm.dot)),
        Some(nm) if sr.property_p.is_some() => {
            rep.push("normalization", false, format!("U^T V = {} but formula gives {}", nm.dot, nm.formula))
        }
        Some(nm) => rep.skip("normalization", &format!("property (P) unknown; U^T V = {}, formula {}", nm.dot, nm.formula)),
        None => rep.skip("normalization", "no eigenvectors"),
    }
    match spectral::power_sum_check(spec, &sr.adjacency, 3, &opts.budget)? {
        Some(rows) => {
            let off: Vec<String> = rows.iter().filter(|(_, f, s)| f != s).map(|(n, f, s)| format!("n={n}: {f} vs {s}")).collect();
            rep.push("power_sums", off.is_empty(), if off.is_empty() { format!("{} lengths agree", rows.len()) } else { off.join(", ") });
        }
        None => rep.skip("power_sums", "repeated words shorter than the block length"),
    }
    Ok(())
}

fn measure_checks(spec: &ShiftSpec, sr: &SpectralReport, opts: &VerifyOptions, rep: &mut VerifyReport) -> Result<(), VerifyError> {
    let cap = 1 << 20;
    let pm = ParryMeasure::<f64>::from_report(spec, sr)?;
    let (rd, sd) = (pm.chain.row_defect(), pm.chain.stationarity_defect());
    rep.push("measure_chain", rd <= 1e-12 && sd <= TOL, format!("row defect {rd:.3e}, stationarity defect {sd:.3e}"));

    let mut worst = 0.0f64;
    let mut count = 0;
    for route in [MeasureRoute::Parry, MeasureRoute::ShannonParry] {
        let (c, d) = pm.kolmogorov(route, opts.measure_len, cap)?;
        worst = worst.max(d);
        count += c;
    }
    rep.push("kolmogorov", worst <= TOL, format!("{count} cylinders, largest defect {worst:.3e}"));

    let routes: Vec<MeasureRoute> = if pm.property_p {
        MeasureRoute::ALL.to_vec()
    } else {
        vec![MeasureRoute::Parry, MeasureRoute::ShannonParry]
    };
    let mut gap = 0.0f64;
    let mut count = 0;
    for k in 0..=opts.measure_len {
        for vs in measures::vertex_words(&pm.adjacency, k, cap)? {
            let c = Cylinder::vertex_word(vs);
            let vals = routes.iter().map(|&r| pm.cylinder(&c, r)).collect::<Result<Vec<_>, _>>()?;
            let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
            let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
            gap = gap.max(hi - lo);
            count += 1;
        }
    }
    let names: Vec<&str> = routes.iter().map(|r| r.name()).collect();
    rep.push("route_agreement_measures", gap <= TOL, format!("{} over {count} cylinders, largest gap {gap:.3e}", names.join("/")));

    let push = match ParryMeasure::<BigRational>::from_report(spec, sr) {
        Ok(ex) => measures::pushforward_check(&ex.edge_markov()?, opts.measure_len, cap)?,
        Err(MeasureError::Irrational) => measures::pushforward_check(&pm.edge_markov()?, opts.measure_len, cap)?,
        Err(e) => return Err(e.into()),
    };
    rep.push(
        "pushforward",
        push.violations.is_empty(),
        format!("{} vertex words, largest defect {:.3e}", push.checked, push.max_defect),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_specs_pass() {
        for s in [
            ShiftSpec::digits(2, &[], &[]).unwrap(),
            ShiftSpec::digits(2, &["010"], &[("000", 2)]).unwrap(),
            ShiftSpec::digits(2, &["010"], &[("100", 3)]).unwrap(),
            ShiftSpec::digits(2, &["001"], &[("00", 2)]).unwrap(),
        ] {
            let rep = verify(&s, None, &VerifyOptions::default()).unwrap();
            assert!(rep.passed(), "{s}: {rep:?}");
        }
    }

    #[test]
    fn wrong_expectations_fail() {
        let s = ShiftSpec::digits(2, &["010"], &[("000", 3)]).unwrap();
        let exp = Expected { f: Some(vec![1, 2, 4, 8, 17]), theta: None };
        let rep = verify(&s, Some(&exp), &VerifyOptions::default()).unwrap();
        assert!(!rep.passed());
        assert_eq!(rep.get("expected_f").unwrap().status, Status::Fail);
        assert_eq!(rep.get("series_vs_oracle").unwrap().status, Status::Pass);
    }
}
