use nalgebra::DMatrix;
use num_complex::Complex64;

pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NumericalRank {
    pub rank: usize,
    /// Singular values in decreasing order.
    pub singular_values: Vec<f64>,
}

/// Numerical rank of a complex matrix given as rows. Singular values below
/// `tol` times the largest one count as zero.
pub fn rank_over_c(rows: &[Vec<Complex64>], tol: f64) -> NumericalRank {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return NumericalRank { rank: 0, singular_values: Vec::new() };
    }
    let m = DMatrix::from_fn(r, c, |i, j| rows[i][j]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = if top == 0.0 { 0 } else { sv.iter().filter(|&&s| s > tol * top).count() };
    NumericalRank { rank, singular_values: sv }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> Vec<Vec<Complex64>> {
        rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect()
    }

    #[test]
    fn basic_ranks() {
        let i3 = real(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(rank_over_c(&i3, DEFAULT_RANK_TOL).rank, 3);
        let z = real(&[&[0.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(rank_over_c(&z, DEFAULT_RANK_TOL).rank, 0);
        let p = real(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(rank_over_c(&p, DEFAULT_RANK_TOL).rank, 1);
    }

    #[test]
    fn complex_proportional_rows() {
        let i = Complex64::new(0.0, 1.0);
        let rows = vec![vec![Complex64::new(1.0, 0.0), i], vec![i, Complex64::new(-1.0, 0.0)]];
        assert_eq!(rank_over_c(&rows, DEFAULT_RANK_TOL).rank, 1);
    }
}
