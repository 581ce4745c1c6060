//! Regular triangulations from lifting heights.
//!
//! The points are homogeneous (they lie on `deg = 1`), so a lower facet of
//! the lifted configuration is a d-subset whose lifting functional
//! `psi` (with `psi(v_i) = h_i` on the subset) stays at or below every other
//! height.

use itertools::Itertools;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{dot_i64, RatMatrix, Rational};
use crate::fan::{infer_deg, StackyFan};

pub fn triangulate_from_heights(points: &[Vec<i64>], heights: &[Rational]) -> Result<StackyFan> {
    let k = points.len();
    if k == 0 || heights.len() != k {
        return Err(Error::DimensionMismatch("one height per point is required".into()));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::DimensionMismatch("points of different lengths".into()));
    }
    let deg = infer_deg(points, d).ok_or_else(|| Error::InvalidFan("points are not homogeneous".into()))?;
    let mut cones = Vec::new();
    for subset in (0..k).combinations(d) {
        let cols: Vec<&[i64]> = subset.iter().map(|&i| points[i].as_slice()).collect();
        let g = RatMatrix::from_i64_columns(&cols, d);
        // psi^T G = h_S  <=>  G^T psi = h_S
        let Some(inv) = g.transpose().inverse() else { continue };
        let h_s: Vec<Rational> = subset.iter().map(|&i| heights[i].clone()).collect();
        let psi = inv.mul_vec(&h_s);
        let mut lower = true;
        let mut touching = false;
        for j in (0..k).filter(|j| !subset.contains(j)) {
            let gap = &heights[j] - dot_i64(&points[j], &psi);
            if gap < Rational::zero() {
                lower = false;
                break;
            }
            if gap.is_zero() {
                touching = true;
            }
        }
        if lower {
            if touching {
                return Err(Error::DegenerateHeights);
            }
            cones.push(subset);
        }
    }
    if cones.is_empty() {
        return Err(Error::DegenerateHeights);
    }
    StackyFan::new(d, points.to_vec(), cones, Some(deg))
}
