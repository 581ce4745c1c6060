//! Dense rational matrices and exact elimination.

use std::ops::{Index, IndexMut, Mul};

use num_traits::{One, Zero};

use super::{int, GaussianRational, IntMatrix, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: RatMatrix,
    pub pivots: Vec<usize>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row);
        }
        Self { rows: r, cols, data }
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out[(i, j)] = Rational::from_integer(m[(i, j)].clone());
            }
        }
        out
    }

    /// Matrix whose columns are the given integer vectors.
    pub fn from_i64_columns<R: AsRef<[i64]>>(cols: &[R], nrows: usize) -> Self {
        let mut out = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.as_ref().iter().enumerate() {
                out[(i, j)] = int(x);
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn scaled_add(&self, other: &RatMatrix, factor: &Rational) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b * factor).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn pow(&self, e: usize) -> RatMatrix {
        let mut out = RatMatrix::identity(self.rows);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Reduced row echelon form; pivots are taken at the first nonzero entry
    /// in column order, so the pivot set is deterministic.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(p, r);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &m[(r, j)] * &f;
                    m[(i, j)] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = RatMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let rr = aug.rref();
        if rr.pivots.len() < n || rr.pivots[n - 1] >= n {
            return None;
        }
        let mut inv = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = rr.matrix[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> Rational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else { return Rational::zero() };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let v = &m[(c, j)] * &f;
                    m[(i, j)] -= v;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, o: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out = RatMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    if !o[(k, j)].is_zero() {
                        out[(i, j)] += a * &o[(k, j)];
                    }
                }
            }
        }
        out
    }
}

/// Unique coefficients `c` with `sum_i c_i * gens[i] = p`, where the
/// generators are integer vectors and `p` has Gaussian-rational entries.
pub fn solve_simplicial_coords(
    gens: &[Vec<i64>],
    p: &[GaussianRational],
) -> Result<Vec<GaussianRational>> {
    let d = p.len();
    let k = gens.len();
    if gens.iter().any(|g| g.len() != d) {
        return Err(Error::DimensionMismatch("generator length differs from point length".into()));
    }
    // columns: generators, then re(p), then im(p)
    let mut aug = RatMatrix::zeros(d, k + 2);
    for (j, g) in gens.iter().enumerate() {
        for (i, &x) in g.iter().enumerate() {
            aug[(i, j)] = int(x);
        }
    }
    for (i, z) in p.iter().enumerate() {
        aug[(i, k)] = z.re.clone();
        aug[(i, k + 1)] = z.im.clone();
    }
    let rr = aug.rref();
    let gen_pivots = rr.pivots.iter().filter(|&&c| c < k).count();
    if gen_pivots < k {
        return Err(Error::DependentGenerators);
    }
    if rr.pivots.iter().any(|&c| c >= k) {
        return Err(Error::NotInSpan);
    }
    Ok((0..k)
        .map(|i| GaussianRational::new(rr.matrix[(i, k)].clone(), rr.matrix[(i, k + 1)].clone()))
        .collect())
}
