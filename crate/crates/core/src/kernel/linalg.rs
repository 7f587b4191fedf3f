use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{format_rational, int, parse_rational, to_f64, Rational};
use crate::error::{ensure_dim, Result};

/// Dense vector of exact rationals.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        Self(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![Rational::zero(); len])
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[index] = Rational::one();
        v
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        Self(entries.iter().map(|&e| int(e)).collect())
    }

    pub fn from_f64(entries: &[f64]) -> Result<Self> {
        entries.iter().map(|&e| super::from_f64(e)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Inner product. Panics on length mismatch; public entry points validate
    /// dimensions before reaching this.
    pub fn dot(&self, other: &RationalVector) -> Rational {
        dot(&self.0, &other.0)
    }

    pub fn add(&self, other: &RationalVector) -> RationalVector {
        assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()
    }

    pub fn sub(&self, other: &RationalVector) -> RationalVector {
        assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    pub fn scale(&self, factor: &Rational) -> RationalVector {
        self.0.iter().map(|a| a * factor).collect()
    }

    /// `self + factor * other`
    pub fn axpy(&self, factor: &Rational, other: &RationalVector) -> RationalVector {
        assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a + factor * b)
            .collect()
    }

    pub fn neg(&self) -> RationalVector {
        self.0.iter().map(|a| -a).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    /// Positive rescaling to a primitive integer vector (coprime integer
    /// entries). The zero vector is returned unchanged.
    pub fn primitive(&self) -> RationalVector {
        if self.is_zero() {
            return self.clone();
        }
        let lcm = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        let scaled: Vec<BigInt> = self
            .0
            .iter()
            .map(|e| e.numer() * (&lcm / e.denom()))
            .collect();
        let gcd = scaled
            .iter()
            .fold(BigInt::zero(), |acc, e| acc.gcd(e))
            .abs();
        scaled
            .into_iter()
            .map(|e| Rational::from_integer(e / &gcd))
            .collect()
    }

    /// Primitive representative of the line through the vector, oriented so
    /// the first nonzero entry is positive.
    pub fn primitive_line(&self) -> RationalVector {
        let p = self.primitive();
        match p.0.iter().find(|e| !e.is_zero()) {
            Some(first) if first.is_negative() => p.neg(),
            _ => p,
        }
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len(), "inner product of vectors of unequal length");
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

impl FromIterator<Rational> for RationalVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl From<Vec<Rational>> for RationalVector {
    fn from(entries: Vec<Rational>) -> Self {
        Self(entries)
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;
    fn index(&self, index: usize) -> &Rational {
        &self.0[index]
    }
}

impl IndexMut<usize> for RationalVector {
    fn index_mut(&mut self, index: usize) -> &mut Rational {
        &mut self.0[index]
    }
}

impl<'a> IntoIterator for &'a RationalVector {
    type Item = &'a Rational;
    type IntoIter = std::slice::Iter<'a, Rational>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(e))?;
        }
        write!(f, ")")
    }
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(format_rational))
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<String>::deserialize(deserializer)?;
        entries
            .iter()
            .map(|e| parse_rational(e).map_err(D::Error::custom))
            .collect()
    }
}

/// Dense row-major matrix of exact rationals. Zero-row matrices keep their
/// column count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        ensure_dim("matrix entry count", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    /// A matrix with no rows and `cols` columns.
    pub fn empty(cols: usize) -> Self {
        Self::zeros(0, cols)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<RationalVector>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let count = rows.len();
        for row in rows {
            ensure_dim("matrix row length", cols, row.len())?;
            data.extend(row.into_inner());
        }
        Ok(Self {
            rows: count,
            cols,
            data,
        })
    }

    pub fn from_int_rows(cols: usize, rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            cols,
            rows.iter().map(|r| RationalVector::from_ints(r)).collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Rational] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_vector(&self, row: usize) -> RationalVector {
        RationalVector::new(self.row(row).to_vec())
    }

    pub fn row_vectors(&self) -> Vec<RationalVector> {
        (0..self.rows).map(|i| self.row_vector(i)).collect()
    }

    pub fn column_vector(&self, col: usize) -> RationalVector {
        (0..self.rows).map(|i| self.get(i, col).clone()).collect()
    }

    pub fn mul_vec(&self, v: &RationalVector) -> Result<RationalVector> {
        ensure_dim("matrix-vector product", self.cols, v.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), v.as_slice())).collect())
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        RationalMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        ensure_dim("matrix product", self.cols, other.rows)?;
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                data.push(acc);
            }
        }
        RationalMatrix::new(self.rows, other.cols, data)
    }

    /// `vᵀ M v`
    pub fn quadratic_form(&self, v: &RationalVector) -> Result<Rational> {
        ensure_dim("quadratic form", self.rows, self.cols)?;
        Ok(self.mul_vec(v)?.dot(v))
    }

    /// First off-diagonal position where `M ≠ Mᵀ`, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        if self.rows != self.cols {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry().is_none()
    }

    pub fn push_row(&mut self, row: &RationalVector) -> Result<()> {
        ensure_dim("appended row", self.cols, row.len())?;
        self.data.extend(row.iter().cloned());
        self.rows += 1;
        Ok(())
    }

    pub fn vstack(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        ensure_dim("stacked matrix columns", self.cols, other.cols)?;
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RationalMatrix::new(self.rows + other.rows, self.cols, data)
    }

    pub fn select_rows(&self, indices: &[usize]) -> RationalMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend(self.row(i).iter().cloned());
        }
        RationalMatrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(pivot_row) = (lead..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(lead, pivot_row);
            let inv = m.get(lead, col).recip();
            for j in col..m.cols {
                let e = &mut m.data[lead * m.cols + j];
                *e = &*e * &inv;
            }
            for r in 0..m.rows {
                if r == lead || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for j in col..m.cols {
                    let delta = &factor * m.get(lead, j);
                    m.data[r * m.cols + j] -= delta;
                }
            }
            pivots.push(col);
            lead += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical basis of the row space: the nonzero rows of the RREF.
    pub fn row_space_basis(&self) -> Vec<RationalVector> {
        let (r, pivots) = self.rref();
        (0..pivots.len()).map(|i| r.row_vector(i)).collect()
    }

    /// Basis of `{x | Mx = 0}`, one vector per free column.
    pub fn null_space(&self) -> Vec<RationalVector> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = RationalVector::zeros(self.cols);
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Some solution of `Mx = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &RationalVector) -> Result<Option<RationalVector>> {
        ensure_dim("linear system right-hand side", self.rows, rhs.len())?;
        let mut augmented = Vec::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            augmented.extend(self.row(i).iter().cloned());
            augmented.push(rhs[i].clone());
        }
        let aug = RationalMatrix::new(self.rows, self.cols + 1, augmented)?;
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = RationalVector::zeros(self.cols);
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Ok(Some(x))
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(self.get(i, j)))
    }

    pub fn from_f64(m: &nalgebra::DMatrix<f64>) -> Result<RationalMatrix> {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(super::from_f64(m[(i, j)])?);
            }
        }
        RationalMatrix::new(m.nrows(), m.ncols(), data)
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", self.row_vector(i))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixRepr {
    cols: usize,
    rows: Vec<RationalVector>,
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            cols: self.cols,
            rows: self.row_vectors(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        RationalMatrix::from_rows(repr.cols, repr.rows).map_err(D::Error::custom)
    }
}
