//! Spectrum of the deformed Grothendieck ring: one point
//! `y = e^{2πiα}` per class of Box elements, with multiplicities read off
//! from the summands of the deformed cohomology.

use std::f64::consts::PI;

use itertools::Itertools;
use num_complex::Complex64;

use crate::boxes::{collisions, stabilize, BetaParameter, ConeElement};
use crate::error::Result;
use crate::exact::{to_f64, GaussianRational, Rational};
use crate::fan::StackyFan;
use crate::quotient::{quotient_for_beta, QuotientAlgebra};

/// Relative tolerance for the multiplicative relations.
pub const RELATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct KPoint {
    pub exponents: Vec<GaussianRational>,
    pub y: Vec<Complex64>,
    /// per-cone Box elements mapping to this point
    pub members: Vec<ConeElement>,
    pub multiplicity: usize,
}

/// Two per-cone Box elements with the same spectrum point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub first: ConeElement,
    pub second: ConeElement,
    /// `α − α′`, an integer vector
    pub witness: Vec<Rational>,
}

/// `e^{2πi a}` for a Gaussian rational `a`; exactly 1 when `a = 0`.
pub fn exp_2pi_i(a: &GaussianRational) -> Complex64 {
    if a.is_zero() {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar((-2.0 * PI * to_f64(&a.im)).exp(), 2.0 * PI * to_f64(&a.re))
}

/// Spectrum with multiplicities taken from an already computed quotient of
/// the full module for β.
pub fn spectrum_from(fan: &StackyFan, beta: &BetaParameter, q: &QuotientAlgebra) -> Result<Vec<KPoint>> {
    Ok(collisions(fan, beta)?
        .into_iter()
        .map(|class| KPoint {
            y: class.alpha.iter().map(exp_2pi_i).collect(),
            multiplicity: q.summand_dim(&class.alpha).unwrap_or(0),
            exponents: class.alpha,
            members: class.members,
        })
        .collect())
}

pub fn spectrum(fan: &StackyFan, beta: &BetaParameter) -> Result<Vec<KPoint>> {
    let corr = stabilize(fan, beta)?;
    let q = quotient_for_beta(fan, &corr, None)?;
    spectrum_from(fan, beta, &q)
}

pub fn wall_report(fan: &StackyFan, beta: &BetaParameter) -> Result<Vec<Wall>> {
    let mut out = Vec::new();
    for class in collisions(fan, beta)? {
        for (a, b) in class.members.iter().tuple_combinations() {
            let witness = a.alpha.iter().zip(&b.alpha).map(|(x, y)| &x.re - &y.re).collect();
            out.push(Wall { first: a.clone(), second: b.clone(), witness });
        }
    }
    Ok(out)
}

pub fn is_semisimple(fan: &StackyFan, beta: &BetaParameter) -> Result<bool> {
    Ok(spectrum(fan, beta)?.iter().all(|p| p.multiplicity == 1))
}

/// `Π_i y_i^{g(v_i)} = e^{2πi g(β)}` for every coordinate functional g.
pub fn multiplicative_relations_hold(fan: &StackyFan, beta: &BetaParameter, points: &[KPoint], tol: f64) -> bool {
    points.iter().all(|p| {
        (0..fan.rank()).all(|j| {
            let lhs: Complex64 = p.y.iter().enumerate().map(|(i, y)| y.powi(fan.ray(i)[j] as i32)).product();
            let rhs = exp_2pi_i(&beta.coords[j]);
            (lhs - rhs).norm() <= tol * rhs.norm().max(1.0)
        })
    })
}

/// Minimal index sets that do not span a cone of the fan.
pub fn minimal_non_faces(fan: &StackyFan) -> Vec<Vec<usize>> {
    let k = fan.num_rays();
    let mut out = Vec::new();
    for size in 1..=(fan.rank() + 1).min(k) {
        for s in (0..k).combinations(size) {
            if fan.is_face(&s) {
                continue;
            }
            let minimal = (0..size).all(|drop| {
                let sub: Vec<usize> = s.iter().enumerate().filter(|&(t, _)| t != drop).map(|(_, &i)| i).collect();
                sub.is_empty() || fan.is_face(&sub)
            });
            if minimal {
                out.push(s);
            }
        }
    }
    out
}

/// `Π_{i∈I} (1 − y_i) = 0` for each minimal non-face I, checked exactly
/// through the exponents: some `α_i` with `i ∈ I` vanishes.
pub fn sr_relations_hold(fan: &StackyFan, points: &[KPoint]) -> bool {
    let non_faces = minimal_non_faces(fan);
    points.iter().all(|p| non_faces.iter().all(|s| s.iter().any(|&i| p.exponents[i].is_zero())))
}

pub fn total_multiplicity(points: &[KPoint]) -> usize {
    points.iter().map(|p| p.multiplicity).sum()
}
