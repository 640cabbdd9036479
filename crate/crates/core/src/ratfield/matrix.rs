use num_traits::Zero;

use super::{AlgebraError, Poly, RatFun};
use crate::scalar::Scalar;

/// Dense matrix over the rational-function field, row major.
#[derive(Clone, PartialEq, Debug)]
pub struct RatMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<RatFun<T>>,
}

impl<T: Scalar> RatMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![RatFun::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { RatFun::constant(T::one()) } else { RatFun::zero() })
    }

    pub fn diag(entries: Vec<RatFun<T>>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RatFun<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<RatFun<T>>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(AlgebraError::Shape("ragged rows".into()));
        }
        Ok(RatMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFun<T> {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFun<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[RatFun<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if self.cols != rhs.rows {
            return Err(AlgebraError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(RatFun::zero(), |acc, k| {
                let a = self.get(i, k);
                let b = rhs.get(k, j);
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    &acc + &(a * b)
                }
            })
        }))
    }

    pub fn row_sums(&self) -> Vec<RatFun<T>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(RatFun::zero(), |acc, x| &acc + x))
            .collect()
    }

    pub fn eval(&self, x: &T) -> Result<Vec<Vec<T>>, AlgebraError> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.eval(x)).collect())
            .collect()
    }

    /// Exact inverse by fraction-free Gauss-Jordan elimination.
    ///
    /// Each row is first cleared of denominators, `N = C M` with `C` diagonal,
    /// then `[N | I]` is reduced over the polynomial ring dividing every update
    /// by the previous pivot. The left block ends as `d I` with `d = det N`,
    /// and `M^{-1} = N^{-1} C`.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::Shape(format!("{}x{} is not square", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut clear = Vec::with_capacity(n);
        let mut aug: Vec<Vec<Poly<T>>> = Vec::with_capacity(n);
        for i in 0..n {
            let c = self.row(i).iter().fold(Poly::one(), |acc, e| lcm(&acc, e.den()));
            let mut row: Vec<Poly<T>> = self
                .row(i)
                .iter()
                .map(|e| &e.num().clone() * &quotient(&c, e.den()))
                .collect();
            row.extend((0..n).map(|j| if i == j { Poly::one() } else { Poly::zero() }));
            aug.push(row);
            clear.push(c);
        }
        let mut prev = Poly::one();
        for k in 0..n {
            let pivot = (k..n)
                .filter(|&i| !aug[i][k].is_zero())
                .min_by_key(|&i| aug[i][k].degree())
                .ok_or(AlgebraError::Singular)?;
            aug.swap(k, pivot);
            let (head, tail) = aug.split_at_mut(k);
            let (pivot_row, tail) = tail.split_first_mut().expect("row k exists");
            for row in head.iter_mut().chain(tail.iter_mut()) {
                let factor = row[k].clone();
                for j in 0..2 * n {
                    if j == k {
                        continue;
                    }
                    let upd = &(&pivot_row[k] * &row[j]) - &(&factor * &pivot_row[j]);
                    row[j] = quotient(&upd, &prev);
                }
                row[k] = Poly::zero();
            }
            prev = pivot_row[k].clone();
        }
        Ok(Self::from_fn(n, n, |i, j| {
            RatFun::new(&aug[i][n + j] * &clear[j], prev.clone()).expect("non-zero determinant")
        }))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> RatMat<U> {
        RatMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|e| e.map(&f)).collect() }
    }
}

// Exact division over exact scalars; over floats the rounding remainder is dropped.
fn quotient<T: Scalar>(a: &Poly<T>, b: &Poly<T>) -> Poly<T> {
    if T::EXACT {
        a.exact_div(b).expect("fraction-free step divides exactly")
    } else {
        a.div_rem(b).expect("non-zero divisor").0
    }
}

fn lcm<T: Scalar>(a: &Poly<T>, b: &Poly<T>) -> Poly<T> {
    if b.degree() == Some(0) {
        return a.clone();
    }
    if !T::EXACT {
        return a * b;
    }
    let g = a.gcd(b);
    (&quotient(a, &g) * b).monic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{QPoly, QRatFun, QRatMat};

    fn p(c: &[i64]) -> QRatFun {
        QRatFun::from_poly(QPoly::from_ints(c))
    }

    #[test]
    fn identity_inverse() {
        let i = QRatMat::identity(3);
        assert_eq!(i.inverse().unwrap(), i);
    }

    #[test]
    fn diagonal_inverse() {
        let d = QRatMat::diag(vec![p(&[0, 1]), p(&[1, 1]), p(&[2])]);
        let inv = d.inverse().unwrap();
        for i in 0..3 {
            assert_eq!(inv.get(i, i), &d.get(i, i).inv().unwrap());
        }
    }

    #[test]
    fn rational_entries_round_trip() {
        let m = QRatMat::from_rows(vec![
            vec![p(&[0, 1]), QRatFun::new(QPoly::from_ints(&[1]), QPoly::from_ints(&[-1, 1])).unwrap(), p(&[3])],
            vec![p(&[1]), p(&[0, 0, 1]), QRatFun::new(QPoly::from_ints(&[2, 1]), QPoly::from_ints(&[0, 1])).unwrap()],
            vec![p(&[0]), p(&[5, 1]), p(&[1, 0, 1])],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), QRatMat::identity(3));
        assert_eq!(inv.mul(&m).unwrap(), QRatMat::identity(3));
    }

    #[test]
    fn singular_detected() {
        let m = QRatMat::from_rows(vec![vec![p(&[0, 1]), p(&[0, 2])], vec![p(&[1]), p(&[2])]]).unwrap();
        assert_eq!(m.inverse(), Err(AlgebraError::Singular));
    }

    #[test]
    fn one_by_one_row_sum() {
        assert_eq!(QRatMat::from_rows(vec![vec![p(&[1])]]).unwrap().row_sums(), vec![p(&[1])]);
    }
}
