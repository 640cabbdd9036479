//! Generating functions of the language through correlation polynomials.
//!
//! The unknowns are `F(z) = Σ f(n) z^{-n}`, one `G_r(z)` per repeated word and
//! one `F_a(z)` per forbidden word, always in that order.

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::langmodel::{LangError, OracleTable, ShiftSpec};
use crate::ratfield::{AlgebraError, Poly, RatFun, RatMat};
use crate::scalar::Scalar;
use crate::words::{self, Sym};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenFunError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("the union of the collections is not reduced; use the general system")]
    NotReduced,
    #[error("closed forms disagree with the solved system for {0}")]
    ClosedFormMismatch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemMode {
    Reduced,
    NonReduced,
}

/// Linear system `M x = (z, 0, …, 0)^T` for the generating functions.
#[derive(Clone, Debug, PartialEq)]
pub struct GenFunSystem<T> {
    pub matrix: RatMat<T>,
    pub labels: Vec<String>,
    pub mode: SystemMode,
}

fn weight<T: Scalar>(m: u64) -> T {
    T::one() - T::one() / T::from_u64(m).expect("multiplicity fits")
}

fn cint<T: Scalar>(c: usize) -> T {
    T::from_usize(c).expect("count fits")
}

fn cp<T: Scalar>(u: &[Sym], v: &[Sym]) -> Poly<T> {
    words::correlation_poly(u, v)
}

// tail correlation clipped to the word length; an empty tail is zero
fn tail<T: Scalar>(u: &[Sym], v: &[Sym], alpha: usize) -> Poly<T> {
    if alpha == 0 {
        Poly::zero()
    } else {
        words::tail_correlation_poly(u, v, alpha.min(u.len())).expect("alpha in range")
    }
}

fn rf<T: Scalar>(p: Poly<T>) -> RatFun<T> {
    RatFun::from_poly(p)
}

fn z<T: Scalar>() -> Poly<T> {
    Poly::z()
}

fn zpow<T: Scalar>(k: usize) -> Poly<T> {
    Poly::monomial(T::one(), k)
}

fn require_reduced(spec: &ShiftSpec) -> Result<(), GenFunError> {
    if spec.union_reduced() {
        Ok(())
    } else {
        Err(GenFunError::NotReduced)
    }
}

/// Labels `F`, `G[r]…`, `F[a]…` of the unknowns.
pub fn unknown_labels(spec: &ShiftSpec) -> Vec<String> {
    let mut out = vec!["F".to_string()];
    out.extend(spec.repeated().iter().map(|(r, _)| format!("G[{}]", spec.render(r.symbols()))));
    out.extend(spec.forbidden().iter().map(|a| format!("F[{}]", spec.render(a.symbols()))));
    out
}

/// The `(ℓ+s)`-square block of the reduced system below the first row.
pub fn build_p<T: Scalar>(spec: &ShiftSpec) -> Result<RatMat<T>, GenFunError> {
    require_reduced(spec)?;
    let rs = spec.repeated();
    let fs = spec.forbidden();
    let l = rs.len();
    Ok(RatMat::from_fn(l + fs.len(), l + fs.len(), |i, j| {
        let row: &[Sym] = if i < l { rs[i].0.symbols() } else { fs[i - l].symbols() };
        let p = if j < l {
            let (rj, mj) = &rs[j];
            let mut p = cp::<T>(rj.symbols(), row).shift(1).scale(&weight(*mj));
            if i == j {
                p = &p - &zpow(rj.len());
            }
            p
        } else {
            -&cp::<T>(fs[j - l].symbols(), row).shift(1)
        };
        rf(p)
    }))
}

/// Diagonal with `z(1-1/m_j)` for repeated words, then `-z` for forbidden words.
pub fn build_d<T: Scalar>(spec: &ShiftSpec) -> Result<RatMat<T>, GenFunError> {
    require_reduced(spec)?;
    let mut d: Vec<RatFun<T>> = spec.repeated().iter().map(|(_, m)| rf(z::<T>().scale(&weight(*m)))).collect();
    d.extend(spec.forbidden().iter().map(|_| rf(-&z::<T>())));
    Ok(RatMat::diag(d))
}

/// `D^{-1} P^T D`.
pub fn build_q<T: Scalar>(spec: &ShiftSpec) -> Result<RatMat<T>, GenFunError> {
    let p = build_p::<T>(spec)?;
    let d = build_d::<T>(spec)?;
    Ok(d.inverse()?.mul(&p.transpose())?.mul(&d)?)
}

/// `P` bordered by the first equation: corner `z - q`.
pub fn build_l<T: Scalar>(spec: &ShiftSpec) -> Result<RatMat<T>, GenFunError> {
    let p = build_p::<T>(spec)?;
    let l = spec.repeated().len();
    let n = p.rows() + 1;
    Ok(RatMat::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => rf(&z::<T>() - &Poly::constant(cint(spec.q()))),
        (0, j) if j <= l => rf(-&z::<T>().scale(&weight(spec.repeated()[j - 1].1))),
        (0, _) => rf(z()),
        (_, 0) => RatFun::constant(T::one()),
        (i, j) => p.get(i - 1, j - 1).clone(),
    }))
}

/// How occurrences of repeated words inside a forbidden word weight its counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OverlapWeight {
    /// `Π_j m_j^{γ}`; exact for any number of inner occurrences.
    #[default]
    Product,
    /// `1 + Σ_j (m_j - 1) γ`; agrees with the product when a forbidden word
    /// holds at most one inner occurrence of a repeated word.
    Linear,
}

impl OverlapWeight {
    fn apply<T: Scalar>(self, spec: &ShiftSpec, count: impl Fn(&[Sym]) -> usize) -> T {
        let rs = spec.repeated().iter().map(|(r, m)| (count(r.symbols()), *m));
        match self {
            OverlapWeight::Product => rs.fold(T::one(), |acc, (g, m)| {
                (0..g).fold(acc, |a, _| a * T::from_u64(m).expect("multiplicity fits"))
            }),
            OverlapWeight::Linear => rs.fold(T::one(), |acc, (g, m)| acc + cint::<T>(g) * cint((m - 1) as usize)),
        }
    }
}

/// The linear system for the spec, picking the general form when the union is not reduced.
pub fn build_system<T: Scalar>(spec: &ShiftSpec) -> Result<GenFunSystem<T>, GenFunError> {
    build_system_with(spec, OverlapWeight::Product)
}

/// [`build_system`] with an explicit weighting of inner occurrences (general form only).
pub fn build_system_with<T: Scalar>(spec: &ShiftSpec, rule: OverlapWeight) -> Result<GenFunSystem<T>, GenFunError> {
    let labels = unknown_labels(spec);
    if spec.union_reduced() {
        return Ok(GenFunSystem { matrix: build_l(spec)?, labels, mode: SystemMode::Reduced });
    }
    let rs = spec.repeated();
    let fs = spec.forbidden();
    let l = rs.len();
    let n = 1 + l + fs.len();
    let inner: Vec<T> = fs.iter().map(|a| rule.apply(spec, |r| words::gamma(a.symbols(), r))).collect();
    let matrix = RatMat::from_fn(n, n, |i, j| {
        if i == 0 {
            return match j {
                0 => rf(&z::<T>() - &Poly::constant(cint(spec.q()))),
                j if j <= l => rf(-&z::<T>().scale(&weight(rs[j - 1].1))),
                j => rf(z::<T>().scale(&inner[j - 1 - l])),
            };
        }
        if j == 0 {
            return RatFun::constant(T::one());
        }
        if i <= l {
            let rk = rs[i - 1].0.symbols();
            if j <= l {
                let (rj, mj) = &rs[j - 1];
                let mut p = cp::<T>(rj.symbols(), rk).shift(1).scale(&weight(*mj));
                if i == j {
                    p = &p - &zpow(rj.len());
                }
                rf(p)
            } else {
                let a = fs[j - 1 - l].symbols();
                rf(-&tail::<T>(a, rk, rk.len()).shift(1).scale(&inner[j - 1 - l]))
            }
        } else {
            let ak = fs[i - 1 - l].symbols();
            if j <= l {
                let (rj, mj) = &rs[j - 1];
                rf(tail::<T>(rj.symbols(), ak, rj.len() - 1).shift(1).scale(&weight(*mj)))
            } else {
                let a = fs[j - 1 - l].symbols();
                let p = words::overlap_positions(a, ak).into_iter().fold(Poly::zero(), |acc, t| {
                    let c: T = rule.apply(spec, |r| words::gamma_t(a, r, t));
                    &acc + &Poly::monomial(c, t)
                });
                rf(-&p)
            }
        }
    });
    Ok(GenFunSystem { matrix, labels, mode: SystemMode::NonReduced })
}

/// Solved generating functions.
#[derive(Clone, Debug, PartialEq)]
pub struct GenFunSolution<T> {
    pub mode: SystemMode,
    pub f: RatFun<T>,
    pub g: Vec<RatFun<T>>,
    pub fa: Vec<RatFun<T>>,
    /// `R(z)` with `F = z / (z - q + R)`; reduced case only.
    pub r_of_z: Option<RatFun<T>>,
}

impl<T: Scalar> GenFunSystem<T> {
    /// All unknowns, from the first column of the inverse.
    pub fn solve(&self) -> Result<Vec<RatFun<T>>, GenFunError> {
        let inv = self.matrix.inverse()?;
        let zf = rf(z::<T>());
        Ok((0..inv.rows()).map(|i| inv.get(i, 0) * &zf).collect())
    }
}

/// Row sums of `P^{-1}`.
pub fn p_inverse_row_sums<T: Scalar>(spec: &ShiftSpec) -> Result<Vec<RatFun<T>>, GenFunError> {
    Ok(build_p::<T>(spec)?.inverse()?.row_sums())
}

/// Row sums of `Q^{-1}`.
pub fn q_inverse_row_sums<T: Scalar>(spec: &ShiftSpec) -> Result<Vec<RatFun<T>>, GenFunError> {
    Ok(build_q::<T>(spec)?.inverse()?.row_sums())
}

// z Σ (1-1/m_i) X_i - z Σ X_{ℓ+j}
fn combine<T: Scalar>(spec: &ShiftSpec, sums: &[RatFun<T>]) -> RatFun<T> {
    let l = spec.repeated().len();
    let mut acc = RatFun::zero();
    for (i, x) in sums.iter().enumerate() {
        let c = if i < l { weight(spec.repeated()[i].1) } else { -T::one() };
        acc = &acc + &x.scale(&c);
    }
    &acc * &rf(z())
}

/// `R(z) = z Σ (1-1/m_i) R_i - z Σ R_{ℓ+j}` from the row sums of `P^{-1}`.
pub fn r_of_z<T: Scalar>(spec: &ShiftSpec) -> Result<RatFun<T>, GenFunError> {
    Ok(combine(spec, &p_inverse_row_sums::<T>(spec)?))
}

/// Same function built from the row sums of `Q^{-1}`.
pub fn r_of_z_dual<T: Scalar>(spec: &ShiftSpec) -> Result<RatFun<T>, GenFunError> {
    Ok(combine(spec, &q_inverse_row_sums::<T>(spec)?))
}

fn f_from_r<T: Scalar>(spec: &ShiftSpec, r: &RatFun<T>) -> Result<RatFun<T>, GenFunError> {
    let den = &rf(&z::<T>() - &Poly::constant(cint(spec.q()))) + r;
    Ok(&rf(z()) * &den.inv()?)
}

/// Solves the system; in the reduced case also checks both closed forms for `F`.
pub fn solve(spec: &ShiftSpec) -> Result<GenFunSolution<BigRational>, GenFunError> {
    let sys = build_system::<BigRational>(spec)?;
    let x = sys.solve()?;
    let l = spec.repeated().len();
    let f = x[0].clone();
    let r_of_z = if sys.mode == SystemMode::Reduced {
        let r = r_of_z::<BigRational>(spec)?;
        if f_from_r(spec, &r)? != f {
            return Err(GenFunError::ClosedFormMismatch(format!("{spec} (P route)")));
        }
        if f_from_r(spec, &r_of_z_dual::<BigRational>(spec)?)? != f {
            return Err(GenFunError::ClosedFormMismatch(format!("{spec} (Q route)")));
        }
        Some(r)
    } else {
        None
    };
    Ok(GenFunSolution {
        mode: sys.mode,
        f,
        g: x[1..=l].to_vec(),
        fa: x[l + 1..].to_vec(),
        r_of_z,
    })
}

/// First-equation recurrence evaluated on oracle counts, one residual per `n < n_max`:
/// `q f(n) - f(n+1) + Σ (1-1/m_j) g_j(n+1) - Σ c_i f_{a_i}(n+1)`, where
/// `c_i = Π_j m_j^{γ(a_i, r_j)}` (always 1 for a reduced union).
pub fn recurrence_residuals(spec: &ShiftSpec, table: &OracleTable) -> Vec<BigRational> {
    let q: BigRational = cint(spec.q());
    let n_max = table.f.len().saturating_sub(1);
    let big = |v: u128| BigRational::from_integer(v.into());
    let coef: Vec<BigRational> = spec
        .forbidden()
        .iter()
        .map(|a| OverlapWeight::Product.apply(spec, |r| words::gamma(a.symbols(), r)))
        .collect();
    (0..n_max)
        .map(|n| {
            let mut acc = &q * big(table.f[n]) - big(table.f[n + 1]);
            for (j, (_, m)) in spec.repeated().iter().enumerate() {
                acc += weight::<BigRational>(*m) * big(table.g[j][n + 1]);
            }
            for (i, c) in coef.iter().enumerate() {
                acc -= c * big(table.fa[i][n + 1]);
            }
            acc
        })
        .collect()
}

/// Whether every residual vanishes.
pub fn recurrence_holds(spec: &ShiftSpec, table: &OracleTable) -> bool {
    recurrence_residuals(spec, table).iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langmodel::{oracle_table, Budget};
    use crate::scalar::{int, ratio};
    use crate::{QPoly, QRatFun};

    fn spec(q: usize, f: &[&str], r: &[(&str, u64)]) -> ShiftSpec {
        ShiftSpec::digits(q, f, r).unwrap()
    }

    fn poly(c: &[BigRational]) -> QRatFun {
        QRatFun::from_poly(QPoly::new(c.to_vec()))
    }

    fn series_match(s: &ShiftSpec, n: usize) {
        let sol = solve(s).unwrap();
        let t = oracle_table(s, n, &Budget::default()).unwrap();
        let big = |v: &Vec<u128>| v.iter().map(|&x| BigRational::from_integer(x.into())).collect::<Vec<_>>();
        assert_eq!(sol.f.series_coeffs(n).unwrap(), big(&t.f), "{s} F");
        for (j, g) in sol.g.iter().enumerate() {
            assert_eq!(g.series_coeffs(n).unwrap(), big(&t.g[j]), "{s} G{j}");
        }
        for (i, fa) in sol.fa.iter().enumerate() {
            assert_eq!(fa.series_coeffs(n).unwrap(), big(&t.fa[i]), "{s} Fa{i}");
        }
        assert!(recurrence_holds(s, &t), "{s}");
    }

    #[test]
    fn p_and_q_matrices() {
        let s = spec(2, &["010"], &[("100", 3)]);
        let p = build_p::<BigRational>(&s).unwrap();
        assert_eq!(p.get(0, 0), &poly(&[int(0), int(0), int(0), ratio(-1, 3)]));
        assert_eq!(p.get(0, 1), &poly(&[int(0), int(0), int(-1)]));
        assert_eq!(p.get(1, 0), &poly(&[int(0), ratio(2, 3)]));
        assert_eq!(p.get(1, 1), &poly(&[int(0), int(-1), int(0), int(-1)]));
        let q = build_q::<BigRational>(&s).unwrap();
        assert_eq!(q.get(0, 0), &poly(&[int(0), int(0), int(0), ratio(-1, 3)]));
        assert_eq!(q.get(0, 1), &poly(&[int(0), int(-1)]));
        assert_eq!(q.get(1, 0), &poly(&[int(0), int(0), ratio(2, 3)]));
        assert_eq!(q.get(1, 1), &poly(&[int(0), int(-1), int(0), int(-1)]));
    }

    #[test]
    fn l_without_repeated_words() {
        let s = spec(2, &["11"], &[]);
        let l = build_l::<BigRational>(&s).unwrap();
        assert_eq!(l.get(0, 0), &poly(&[int(-2), int(1)]));
        assert_eq!(l.get(0, 1), &poly(&[int(0), int(1)]));
        assert_eq!(l.get(1, 1), &poly(&[int(0), int(-1), int(-1)]));
    }

    #[test]
    fn general_system_entries() {
        let s = spec(2, &["001"], &[("00", 2)]);
        assert!(build_p::<BigRational>(&s).is_err());
        let sys = build_system::<BigRational>(&s).unwrap();
        assert_eq!(sys.mode, SystemMode::NonReduced);
        let m = &sys.matrix;
        assert_eq!(m.get(0, 0), &poly(&[int(-2), int(1)]));
        assert_eq!(m.get(0, 1), &poly(&[int(0), ratio(-1, 2)]));
        assert_eq!(m.get(0, 2), &poly(&[int(0), int(2)]));
        assert_eq!(m.get(1, 1), &poly(&[int(0), ratio(1, 2), ratio(-1, 2)]));
        assert_eq!(m.get(1, 2), &poly(&[]));
        assert_eq!(m.get(2, 1), &poly(&[int(0), ratio(1, 2)]));
        assert_eq!(m.get(2, 2), &poly(&[int(0), int(0), int(0), int(-1)]));
        // z^2 (z-1) / ((z-2)(z^2-z-1))
        let sol = solve(&s).unwrap();
        let want = QRatFun::new(QPoly::from_ints(&[0, 0, -1, 1]), QPoly::from_ints(&[2, 1, -3, 1])).unwrap();
        assert_eq!(sol.f, want);
        // a single inner occurrence: both weightings give the same system
        assert_eq!(build_system_with::<BigRational>(&s, OverlapWeight::Linear).unwrap(), sys);
    }

    #[test]
    fn linear_weight_breaks_with_two_inner_occurrences() {
        let s = spec(3, &["022", "1120"], &[("0", 2), ("2", 3)]);
        let t = oracle_table(&s, 8, &Budget::default()).unwrap();
        let want: Vec<BigRational> = t.f.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        let exact = build_system::<BigRational>(&s).unwrap().solve().unwrap();
        assert_eq!(exact[0].series_coeffs(8).unwrap(), want);
        let linear = build_system_with::<BigRational>(&s, OverlapWeight::Linear).unwrap().solve().unwrap();
        assert_ne!(linear[0].series_coeffs(8).unwrap(), want);
    }

    #[test]
    fn full_shift() {
        let s = spec(2, &[], &[]);
        let sol = solve(&s).unwrap();
        assert_eq!(sol.f, QRatFun::new(QPoly::from_ints(&[0, 1]), QPoly::from_ints(&[-2, 1])).unwrap());
        assert_eq!(sol.r_of_z, Some(QRatFun::zero()));
    }

    #[test]
    fn r_of_z_examples() {
        let s = spec(2, &["010"], &[("100", 3)]);
        let want = QRatFun::new(QPoly::from_ints(&[2, -1]), QPoly::from_ints(&[2, 1, 0, 1])).unwrap();
        assert_eq!(r_of_z::<BigRational>(&s).unwrap(), want);
        let s = spec(2, &["00"], &[("01", 2), ("10", 3), ("11", 2)]);
        let want = QRatFun::new(QPoly::from_ints(&[-6, -3]), QPoly::from_ints(&[-3, 0, 1])).unwrap();
        assert_eq!(r_of_z::<BigRational>(&s).unwrap(), want);
    }

    #[test]
    fn series_against_oracle() {
        series_match(&spec(2, &["010"], &[("000", 2)]), 12);
        series_match(&spec(2, &["001"], &[("00", 2)]), 12);
        series_match(&spec(2, &["00"], &[("110", 2), ("01", 3)]), 10);
        series_match(&spec(3, &["12", "201"], &[("0", 2), ("22", 3)]), 8);
        series_match(&spec(2, &["0000"], &[("01", 2)]), 10);
        series_match(&spec(4, &[], &[("10", 2), ("20", 3), ("30", 3)]), 7);
    }

    #[test]
    fn float_instantiation_builds() {
        let s = spec(2, &["010"], &[("100", 3)]);
        let p = build_p::<f64>(&s).unwrap();
        assert!((p.get(0, 0).eval_f64(2.0) + 8.0 / 3.0).abs() < 1e-12);
        let r = r_of_z::<f64>(&s).unwrap();
        assert!((r.eval_f64(3.0) - (2.0 - 3.0) / 32.0).abs() < 1e-9);
    }
}
