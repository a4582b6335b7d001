//! Exact rational scalars, dense matrices over Q, determinants,
//! characteristic polynomials and Gram matrices.
//!
//! Everything here is exact: no floating point anywhere. `Rat` is the only
//! scalar type in the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

/// Arbitrary-precision rational in canonical form (positive denominator,
/// reduced). Serializes as the string "p/q", or "p" for integers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        Rat(self.0.recip())
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn pow(&self, exp: i32) -> Self {
        if exp == 0 {
            return Rat::one();
        }
        let base = if exp < 0 { self.recip() } else { self.clone() };
        let mut acc = Rat::one();
        for _ in 0..exp.unsigned_abs() {
            acc *= base.clone();
        }
        acc
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat(BigRational::from(BigInt::from(v)))
    }
}

impl FromStr for Rat {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ExactError::Parse(s.to_string());
        match s.split_once('/') {
            Some((p, q)) => {
                let num = BigInt::from_str(p.trim()).map_err(|_| bad())?;
                let den = BigInt::from_str(q.trim()).map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(Rat(BigRational::new(num, den)))
            }
            None => {
                let num = BigInt::from_str(s).map_err(|_| bad())?;
                Ok(Rat(BigRational::from(num)))
            }
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        Rat::from_str(&s).map_err(|e| D::Error::custom(e.to_string()))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl $trait for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(self.0 / rhs.0)
    }
}

impl Div for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(&self.0 / &rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        self.0 -= rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign for Rat {
    fn mul_assign(&mut self, rhs: Rat) {
        self.0 *= rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |a, b| a * b)
    }
}

/// Vector in Q^n.
pub type Vector = Vec<Rat>;

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len(), "dot: length mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = vec![Rat::zero(); n];
    v[i] = Rat::one();
    v
}

/// Dense row-major matrix over Q.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut m = Matrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn trace(&self) -> Rat {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn scale(&self, s: &Rat) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * s)
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &other[(i, j)])
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &other[(i, j)])
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|t| &self[(i, t)] * &other[(t, j)]).sum()
        })
    }

    pub fn apply(&self, v: &[Rat]) -> Vector {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rat::is_zero)
    }

    /// Principal submatrix on the given (sorted) index set.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])].clone())
    }

    /// Submatrix on given row and column index sets.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        })
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols {
            let pivot = (row..m.rows).find(|&r| !m[(r, col)].is_zero());
            let Some(p) = pivot else { continue };
            m.swap_rows(row, p);
            for r in row + 1..m.rows {
                if !m[(r, col)].is_zero() {
                    let factor = &m[(r, col)] / &m[(row, col)];
                    for c in col..m.cols {
                        let v = &m[(r, c)] - &(&factor * &m[(row, c)]);
                        m[(r, c)] = v;
                    }
                }
            }
            rank += 1;
            row += 1;
            if row == m.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Exact kernel (nullspace) basis of the matrix, viewed as a linear map
    /// Q^cols -> Q^rows.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let mut m = self.clone();
        let n = m.cols;
        let mut pivot_col_of_row = Vec::new();
        let mut row = 0;
        for col in 0..n {
            let pivot = (row..m.rows).find(|&r| !m[(r, col)].is_zero());
            let Some(p) = pivot else { continue };
            m.swap_rows(row, p);
            let inv = m[(row, col)].recip();
            for c in col..n {
                let v = &m[(row, c)] * &inv;
                m[(row, c)] = v;
            }
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    for c in col..n {
                        let v = &m[(r, c)] - &(&factor * &m[(row, c)]);
                        m[(r, c)] = v;
                    }
                }
            }
            pivot_col_of_row.push(col);
            row += 1;
            if row == m.rows {
                break;
            }
        }
        let pivot_cols: std::collections::BTreeSet<usize> =
            pivot_col_of_row.iter().copied().collect();
        let mut basis = Vec::new();
        for free in (0..n).filter(|c| !pivot_cols.contains(c)) {
            let mut v = vec![Rat::zero(); n];
            v[free] = Rat::one();
            for (r, &pc) in pivot_col_of_row.iter().enumerate() {
                v[pc] = -&m[(r, free)];
            }
            basis.push(v);
        }
        basis
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|r| r.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Rat>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        rows.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<Rat>> = Vec::deserialize(de)?;
        let c = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != c) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Ok(Matrix::from_rows(rows))
    }
}

/// Exact determinant by fraction-free Bareiss elimination.
///
/// Rows are first scaled to integers (tracking the scaling), then the
/// division-free Bareiss recurrence runs over BigInt, so no intermediate
/// rational blow-up occurs.
pub fn det(m: &Matrix) -> Result<Rat, ExactError> {
    if !m.is_square() {
        return Err(ExactError::NonSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Rat::one());
    }

    // Clear denominators row by row.
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut lcm = BigInt::one();
        for j in 0..n {
            lcm = num_integer::lcm(lcm, m[(i, j)].denom().clone());
        }
        scale *= &lcm;
        a.push(
            (0..n)
                .map(|j| m[(i, j)].numer() * (&lcm / m[(i, j)].denom()))
                .collect(),
        );
    }

    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Ok(Rat::zero());
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone() * BigInt::from(sign);
    Ok(Rat::from_big(d, scale))
}

/// Recursive cofactor-expansion determinant. Test oracle only; exponential.
pub fn det_cofactor(m: &Matrix) -> Result<Rat, ExactError> {
    if !m.is_square() {
        return Err(ExactError::NonSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    fn go(m: &Matrix) -> Rat {
        let n = m.rows();
        if n == 0 {
            return Rat::one();
        }
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut acc = Rat::zero();
        let cols: Vec<usize> = (1..n).collect();
        for j in 0..n {
            if m[(0, j)].is_zero() {
                continue;
            }
            let keep: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = m.submatrix(&cols, &keep);
            let term = &m[(0, j)] * &go(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }
    Ok(go(m))
}

/// Polynomial over Q; coefficient of t^i at index i.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rat>,
}

impl Polynomial {
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rat::zero());
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial {
            coeffs: vec![Rat::zero()],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn eval(&self, t: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t.clone() + c.clone();
        }
        acc
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && self.degree() > 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c.is_one() => write!(f, "t")?,
                1 => write!(f, "({c})*t")?,
                _ if c.is_one() => write!(f, "t^{i}")?,
                _ => write!(f, "({c})*t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// char_M(t) = det(tI - M), computed by the Faddeev-LeVerrier recurrence
/// over exact rationals. Monic of degree n.
pub fn char_poly(m: &Matrix) -> Result<Polynomial, ExactError> {
    if !m.is_square() {
        return Err(ExactError::NonSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    // coeffs[n] = 1, coeffs[n-k] = c_k
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = Rat::one();
    let mut aux = Matrix::identity(n);
    for k in 1..=n {
        aux = m.mul(&aux);
        let c = -(aux.trace() / Rat::from(k as i64));
        for i in 0..n {
            let v = &aux[(i, i)] + &c;
            aux[(i, i)] = v;
        }
        coeffs[n - k] = c;
    }
    Ok(Polynomial::from_coeffs(coeffs))
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::new(), f);
}

/// All k-subsets of 0..n in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_subset(n, k, &mut |s| out.push(s.to_vec()));
    out
}

/// Sum of determinants of all k x k principal submatrices of m;
/// equals Tr M^{wedge k}. k = 0 gives 1, k > n gives 0.
pub fn principal_minor_sum(m: &Matrix, k: usize) -> Result<Rat, ExactError> {
    if !m.is_square() {
        return Err(ExactError::NonSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if k == 0 {
        return Ok(Rat::one());
    }
    if k > n {
        return Ok(Rat::zero());
    }
    let mut acc = Rat::zero();
    let mut err = None;
    for_each_subset(n, k, &mut |s| {
        if err.is_some() {
            return;
        }
        match det(&m.principal_submatrix(s)) {
            Ok(d) => acc += d,
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}

/// Gram matrix G(M,X): entry (i,j) = <mu_i, xi_j> in the standard scalar
/// product.
pub fn gram(left: &[Vector], right: &[Vector]) -> Result<Matrix, ExactError> {
    let dim = left
        .first()
        .or_else(|| right.first())
        .map(|v| v.len())
        .unwrap_or(0);
    if left.iter().chain(right.iter()).any(|v| v.len() != dim) {
        return Err(ExactError::Dimension(
            "gram: vectors of unequal ambient dimension".into(),
        ));
    }
    Ok(Matrix::from_fn(left.len(), right.len(), |i, j| {
        dot(&left[i], &right[j])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn rat_roundtrip_strings() {
        for s in ["3/4", "-7/2", "5", "0", "-12"] {
            let v: Rat = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        // non-canonical input canonicalizes
        let v: Rat = "6/4".parse().unwrap();
        assert_eq!(v, r(3, 2));
        let v: Rat = "3/-6".parse().unwrap();
        assert_eq!(v.to_string(), "-1/2");
    }

    #[test]
    fn det_identity_and_transposition() {
        assert_eq!(det(&Matrix::identity(2)).unwrap(), Rat::one());
        let swap = Matrix::from_rows(vec![
            vec![r(0, 1), r(1, 1)],
            vec![r(1, 1), r(0, 1)],
        ]);
        assert_eq!(det(&swap).unwrap(), r(-1, 1));
    }

    #[test]
    fn det_non_square_errors() {
        let m = Matrix::zero(2, 3);
        assert!(matches!(det(&m), Err(ExactError::NonSquare { .. })));
    }

    #[test]
    fn det_matches_cofactor_oracle() {
        // deterministic "random" 5x5 rational matrix
        let m = Matrix::from_fn(5, 5, |i, j| {
            r(
                ((i * 7 + j * 3) % 11) as i64 - 5,
                ((i + 2 * j) % 3 + 1) as i64,
            )
        });
        assert_eq!(det(&m).unwrap(), det_cofactor(&m).unwrap());
    }

    #[test]
    fn det_multiplicative() {
        let a = Matrix::from_fn(4, 4, |i, j| r((i * 5 + j * 11) as i64 % 7 - 3, 2));
        let b = Matrix::from_fn(4, 4, |i, j| r((i * 3 + j * 13) as i64 % 9 - 4, 3));
        assert_eq!(
            det(&a.mul(&b)).unwrap(),
            det(&a).unwrap() * det(&b).unwrap()
        );
    }

    #[test]
    fn char_poly_identity_2x2() {
        let p = char_poly(&Matrix::identity(2)).unwrap();
        // t^2 - 2t + 1
        assert_eq!(p.coeffs(), &[r(1, 1), r(-2, 1), r(1, 1)]);
    }

    #[test]
    fn char_poly_1x1() {
        let m = Matrix::from_rows(vec![vec![r(5, 3)]]);
        let p = char_poly(&m).unwrap();
        assert_eq!(p.coeffs(), &[r(-5, 3), r(1, 1)]);
    }

    #[test]
    fn char_poly_coeffs_are_signed_minor_sums() {
        let m = Matrix::from_fn(4, 4, |i, j| r((3 * i + 5 * j) as i64 % 7 - 2, 1 + (i % 2) as i64));
        let p = char_poly(&m).unwrap();
        for k in 0..=4usize {
            let sign = if k % 2 == 0 { Rat::one() } else { r(-1, 1) };
            assert_eq!(
                p.coeff(4 - k),
                sign * principal_minor_sum(&m, k).unwrap(),
                "k = {k}"
            );
        }
    }

    #[test]
    fn minor_sum_edges() {
        let m = Matrix::from_fn(3, 3, |i, j| r((i + j) as i64, 1));
        assert_eq!(principal_minor_sum(&m, 0).unwrap(), Rat::one());
        assert_eq!(principal_minor_sum(&m, 1).unwrap(), m.trace());
        assert_eq!(principal_minor_sum(&m, 5).unwrap(), Rat::zero());
    }

    #[test]
    fn gram_standard_basis() {
        let basis: Vec<Vector> = (0..3).map(|i| unit_vector(3, i)).collect();
        let g = gram(&basis, &basis).unwrap();
        assert_eq!(g, Matrix::identity(3));
    }

    #[test]
    fn gram_orthogonal_pair() {
        let left = vec![vec![r(1, 1), r(1, 1)]];
        let right = vec![vec![r(1, 1), r(-1, 1)]];
        let g = gram(&left, &right).unwrap();
        assert!(g[(0, 0)].is_zero());
    }

    #[test]
    fn gram_transpose_symmetry() {
        let fam_a = vec![
            vec![r(1, 2), r(3, 1), r(-1, 1)],
            vec![r(2, 1), r(0, 1), r(5, 3)],
        ];
        let fam_b = vec![
            vec![r(1, 1), r(1, 1), r(1, 1)],
            vec![r(-2, 1), r(1, 4), r(0, 1)],
            vec![r(0, 1), r(1, 1), r(-1, 2)],
        ];
        let g1 = gram(&fam_a, &fam_b).unwrap();
        let g2 = gram(&fam_b, &fam_a).unwrap();
        assert_eq!(g1.transpose(), g2);
    }

    #[test]
    fn kernel_of_rank_deficient() {
        let m = Matrix::from_rows(vec![
            vec![r(1, 1), r(2, 1), r(3, 1)],
            vec![r(2, 1), r(4, 1), r(6, 1)],
        ]);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.apply(v).iter().all(Rat::is_zero));
        }
    }
}
