//! Integer solutions of `Σ m_i v_i = b` inside an ℓ¹ window.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::exact::IntMatrix;

/// The relation lattice `{m ∈ Z^k : Σ m_i v_i = 0}` of a list of vectors,
/// with the data needed to solve `Σ m_i v_i = b` over the integers.
#[derive(Debug, Clone)]
pub struct RelationLattice {
    rays: Vec<Vec<i64>>,
    /// row HNF of the k×d matrix with rows `v_i`, and its transform
    h: IntMatrix,
    u: IntMatrix,
    rank: usize,
    /// echelon basis of the kernel; first nonzero entry of each row is
    /// positive and pivot columns increase
    kernel: Vec<Vec<i64>>,
    pivots: Vec<usize>,
}

impl RelationLattice {
    pub fn new(rays: &[Vec<i64>]) -> Self {
        let a_t = IntMatrix::from_rows(rays);
        let (h, u) = a_t.hermite_normal_form();
        let rank = (0..h.rows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
        let raw: Vec<Vec<i64>> = (rank..u.rows())
            .map(|i| u.row(i).iter().map(|x| x.to_i64().expect("kernel entry fits in i64")).collect())
            .collect();
        let (kernel, pivots) = if raw.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            let (kh, _) = IntMatrix::from_rows(&raw).hermite_normal_form();
            let mut kernel = Vec::new();
            let mut pivots = Vec::new();
            for i in 0..kh.rows() {
                let row: Vec<i64> = kh.row(i).iter().map(|x| x.to_i64().expect("kernel entry fits in i64")).collect();
                if let Some(p) = row.iter().position(|&x| x != 0) {
                    kernel.push(row);
                    pivots.push(p);
                }
            }
            (kernel, pivots)
        };
        Self { rays: rays.to_vec(), h, u, rank, kernel, pivots }
    }

    pub fn kernel(&self) -> &[Vec<i64>] {
        &self.kernel
    }

    /// Some integer `m` with `Σ m_i v_i = b`, if one exists.
    pub fn particular(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        // U A^T = H, so A U^T = H^T and m = U^T y solves A m = H^T y.
        let k = self.rays.len();
        let mut y = vec![BigInt::zero(); k];
        for i in 0..self.rank {
            let row = self.h.row(i);
            let p = row.iter().position(|x| !x.is_zero())?;
            let mut rhs = b[p].clone();
            for (yi, hi) in y.iter().zip(0..i) {
                rhs -= yi * &self.h[(hi, p)];
            }
            let (q, r) = rhs.div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
        let m: Vec<BigInt> = (0..k).map(|j| (0..self.rank).map(|i| &self.u[(i, j)] * &y[i]).sum()).collect();
        let ok = (0..b.len()).all(|c| {
            let s: BigInt = m.iter().zip(&self.rays).map(|(mi, v)| mi * BigInt::from(v[c])).sum();
            s == b[c]
        });
        ok.then_some(m)
    }

    /// All `m ∈ m0 + kernel` with `Σ |m_i| ≤ bound`, sorted.
    pub fn window(&self, m0: &[BigInt], bound: i64) -> Vec<Vec<i64>> {
        let Some(start) = m0.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<i64>>>() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        self.descend(0, start, bound, &mut out);
        out.sort();
        out
    }

    fn descend(&self, level: usize, cur: Vec<i64>, bound: i64, out: &mut Vec<Vec<i64>>) {
        if level == self.kernel.len() {
            if cur.iter().map(|x| x.abs()).sum::<i64>() <= bound {
                out.push(cur);
            }
            return;
        }
        let p = self.pivots[level];
        let b = &self.kernel[level];
        // coordinates before the pivot no longer change
        let fixed: i64 = cur[..p].iter().map(|x| x.abs()).sum();
        let room = bound - fixed;
        if room < 0 {
            return;
        }
        let piv = b[p];
        // |cur[p] + t * piv| <= room
        let lo = Integer::div_ceil(&(-room - cur[p]), &piv);
        let hi = Integer::div_floor(&(room - cur[p]), &piv);
        for t in lo..=hi {
            let next: Vec<i64> = cur.iter().zip(b).map(|(c, x)| c + t * x).collect();
            self.descend(level + 1, next, bound, out);
        }
    }
}
