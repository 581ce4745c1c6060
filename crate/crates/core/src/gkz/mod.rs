//! Gamma-series solutions of the better-behaved GKZ system with values in
//! the shadow quotient, and the checks that they solve the system.

mod gamma;
mod lattice;

pub use gamma::{jet_exp, jet_mul, ln_gamma, polygamma, reciprocal_gamma_jet};
pub use lattice::RelationLattice;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::boxes::{box_of_cone, box_of_fan, stabilize, BetaParameter, BoxElement, DeltaCorrespondence};
use crate::error::{Error, Result};
use crate::exact::rank::{rank_over_c, DEFAULT_RANK_TOL};
use crate::exact::{floor, frac, is_integer, to_f64, GaussianRational, Rational};
use crate::fan::{generic_heights, StackyFan};
use crate::quotient::{graded_piece, quotient_for_beta, summand_points, ModuleSpec, QuotientAlgebra};
use crate::triangulate::triangulate_from_heights;

/// Target size of `|x^m|` for the relation-lattice generators when choosing
/// a default evaluation point.
pub const DEFAULT_RATIO: f64 = 1e-2;

/// A point `x ∈ (C^*)^k` with a choice of branch: `log x_i` uses
/// `arg x_i ∈ (−π, π]` plus `arg_offsets[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct XPoint {
    pub values: Vec<Complex64>,
    pub arg_offsets: Vec<f64>,
}

impl XPoint {
    pub fn new(values: Vec<Complex64>) -> Self {
        let n = values.len();
        Self { values, arg_offsets: vec![0.0; n] }
    }

    pub fn real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn logs(&self) -> Result<Vec<Complex64>> {
        self.values
            .iter()
            .zip(&self.arg_offsets)
            .enumerate()
            .map(|(i, (x, off))| {
                if x.norm() == 0.0 {
                    Err(Error::ZeroCoordinate { index: i })
                } else {
                    Ok(Complex64::new(x.norm().ln(), x.arg() + off))
                }
            })
            .collect()
    }
}

/// An element `l` of `L(α, v)`; `l = α + m` with integral `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LVector {
    pub l: Vec<GaussianRational>,
    pub m: Vec<i64>,
    /// index of α in [`GkzInstance::elements`]
    pub alpha: usize,
    pub v: Vec<i64>,
}

impl LVector {
    pub fn norm(&self) -> i64 {
        self.m.iter().map(|x| x.abs()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue {
    pub v: Vec<i64>,
    pub x: Vec<Complex64>,
    pub value: Vec<Complex64>,
    pub truncation_bound: i64,
    /// max-norm difference between the truncations at B and B − s, with s the
    /// largest norm of a relation-lattice basis vector; thinner shells can be
    /// empty
    pub tail_estimate: f64,
    /// number of nonzero terms
    pub terms: usize,
    /// terms whose support left the shadow module (expected zero)
    pub shadow_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundarySide {
    /// `l − e_j` for some `l ∈ L(α, v)` in the window, outside the window of
    /// `L(α, v + v_j)`
    Shifted,
    /// in the window of `L(α, v + v_j)`, not hit by the shift
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryTerm {
    pub alpha: usize,
    pub m: Vec<i64>,
    pub side: BoundarySide,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermShiftReport {
    pub holds: bool,
    pub matched: usize,
    pub boundary: Vec<BoundaryTerm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub v: Vec<i64>,
    pub j: usize,
    pub max_abs: f64,
    pub tail_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSystem {
    pub points: Vec<Vec<i64>>,
    pub matrix: Vec<Vec<Complex64>>,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// `σ_dim / max(σ_{dim+1}, tol·σ_1)` with `σ_{dim+1} = 0` when absent
    pub gap: f64,
    pub rank_deficient: bool,
    pub tail_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    pub checked: usize,
    pub failures: Vec<Vec<BigInt>>,
}

enum Term {
    Zero,
    Value(DVector<Complex64>),
    OutsideShadow,
}

/// Everything needed to evaluate `Φ_v` for one fan and one parameter.
#[derive(Debug, Clone)]
pub struct GkzInstance {
    pub fan: StackyFan,
    pub beta: BetaParameter,
    pub deg: Vec<i64>,
    pub correspondence: DeltaCorrespondence,
    /// quotient of the shadow module `C[Σ;β_δ]_{Re β}` by Z
    pub quotient: QuotientAlgebra,
    /// `Bx(Σ;β)` in the order of the correspondence
    pub elements: Vec<BoxElement>,
    lattice: RelationLattice,
    shell_step: i64,
    d_mats: Vec<DMatrix<Complex64>>,
}

fn complex_of(z: &GaussianRational) -> Complex64 {
    z.to_complex()
}

fn negative_integer(z: &GaussianRational) -> bool {
    z.im.is_zero() && is_integer(&z.re) && z.re.is_negative()
}

fn apply_jet(jet: &[Complex64], d: &DMatrix<Complex64>, v: &DVector<Complex64>) -> DVector<Complex64> {
    let mut acc = v * jet[0];
    let mut cur = v.clone();
    for c in &jet[1..] {
        cur = d * cur;
        acc += &cur * *c;
    }
    acc
}

/// Pairwise sum in a fixed tree shape over the given order.
fn tree_sum(items: &[&DVector<Complex64>], dim: usize) -> DVector<Complex64> {
    match items.len() {
        0 => DVector::zeros(dim),
        1 => items[0].clone(),
        n => tree_sum(&items[..n / 2], dim) + tree_sum(&items[n / 2..], dim),
    }
}

fn max_abs_diff(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

impl GkzInstance {
    pub fn new(fan: StackyFan, beta: BetaParameter) -> Result<Self> {
        let deg = fan.require_gkz()?;
        if beta.dim() != fan.rank() {
            return Err(Error::DimensionMismatch(format!("beta must have {} coordinates", fan.rank())));
        }
        let correspondence = stabilize(&fan, &beta)?;
        let quotient = quotient_for_beta(&fan, &correspondence, Some(beta.real_part()))?;
        let complex = box_of_fan(&fan, &beta)?;
        let elements = correspondence
            .triples
            .iter()
            .map(|t| complex.iter().find(|e| e.alpha == t.alpha).cloned().expect("triples come from Bx"))
            .collect();
        let lattice = RelationLattice::new(fan.rays());
        let shell_step = lattice.kernel().iter().map(|m| m.iter().map(|x| x.abs()).sum::<i64>()).max().unwrap_or(1).max(1);
        let dim = quotient.dim;
        let d_mats = quotient
            .d_mats
            .iter()
            .map(|m| DMatrix::from_fn(dim, dim, |i, j| Complex64::new(to_f64(&m[(i, j)]), 0.0)))
            .collect();
        Ok(Self { fan, beta, deg, correspondence, quotient, elements, lattice, shell_step, d_mats })
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim
    }

    pub fn relation_lattice(&self) -> &RelationLattice {
        &self.lattice
    }

    fn check_point(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.fan.rank() {
            return Err(Error::DimensionMismatch(format!("v must have {} coordinates", self.fan.rank())));
        }
        let p: Vec<Rational> = v.iter().map(|&x| Rational::from_integer(x.into())).collect();
        if !self.fan.contains(&p) {
            return Err(Error::PointOutsideSupport);
        }
        Ok(())
    }

    /// Elements of `L(α, v)` with `Σ |m_i| ≤ bound`, sorted by `m`.
    pub fn enumerate_l(&self, alpha: usize, v: &[i64], bound: i64) -> Result<Vec<LVector>> {
        self.check_point(v)?;
        let e = &self.elements[alpha];
        let b: Vec<BigInt> = v.iter().zip(&e.n).map(|(&vi, n)| -BigInt::from(vi) - n).collect();
        let m0 = self.lattice.particular(&b).ok_or(Error::NoParticularSolution)?;
        Ok(self
            .lattice
            .window(&m0, bound)
            .into_iter()
            .map(|m| {
                let l = e
                    .alpha
                    .iter()
                    .zip(&m)
                    .map(|(a, &mi)| a + &GaussianRational::real(Rational::from_integer(mi.into())))
                    .collect();
                LVector { l, m, alpha, v: v.to_vec() }
            })
            .collect())
    }

    fn all_l(&self, v: &[i64], bound: i64) -> Result<Vec<LVector>> {
        let mut out = Vec::new();
        for a in 0..self.elements.len() {
            out.extend(self.enumerate_l(a, v, bound)?);
        }
        Ok(out)
    }

    /// One term `Π x_i^{l_i+D_i}/Γ(l_i+D_i+1) · [c(α_δ)]`, optionally followed
    /// by `∂/∂x_j`.
    fn term(&self, lv: &LVector, x: &XPoint, logs: &[Complex64], deriv: Option<usize>) -> Term {
        let fan = &self.fan;
        let k = fan.num_rays();
        let dim = self.dim();
        let neg: Vec<usize> = (0..k).filter(|&i| negative_integer(&lv.l[i])).collect();
        if neg.iter().any(|&i| !fan.is_fan_ray(i)) {
            return Term::Zero;
        }
        let triple = &self.correspondence.triples[lv.alpha];
        let mut face = triple.support.indices().to_vec();
        face.extend(&neg);
        face.sort_unstable();
        face.dedup();
        if !fan.is_face(&face) {
            return Term::Zero;
        }
        // the zeros of 1/Γ at negative integers are absorbed by [v_i]
        let mut w = triple.point.clone();
        for &i in &neg {
            for (c, &vi) in w.iter_mut().zip(fan.ray(i)) {
                *c += Rational::from_integer(vi.into());
            }
        }
        let Some(class) = self.quotient.class_of(fan, &w) else { return Term::OutsideShadow };
        let mut vec = DVector::from_iterator(dim, class.iter().map(|r| Complex64::new(to_f64(r), 0.0)));
        let mut exponent = Complex64::new(0.0, 0.0);
        let mut scalar = Complex64::new(1.0, 0.0);
        for i in 0..k {
            let li = complex_of(&lv.l[i]);
            exponent += li * logs[i];
            if fan.is_fan_ray(i) {
                let is_neg = neg.contains(&i);
                let order = dim.max(1);
                let mut rg = reciprocal_gamma_jet(li, order + usize::from(is_neg));
                if is_neg {
                    rg.remove(0);
                }
                let mut lin = vec![Complex64::new(0.0, 0.0); order];
                if order > 1 {
                    lin[1] = logs[i];
                }
                let jet = jet_mul(&jet_exp(&lin, order), &rg, order);
                vec = apply_jet(&jet, &self.d_mats[i], &vec);
            } else {
                scalar *= reciprocal_gamma_jet(li, 1)[0];
            }
        }
        vec *= scalar * exponent.exp();
        if let Some(j) = deriv {
            // ∂_j x^{l+D}/Γ(l+D+1) = (l_j + D_j) x_j^{-1} x^{l+D}/Γ(l+D+1)
            let lj = complex_of(&lv.l[j]);
            vec = (&vec * lj + &self.d_mats[j] * &vec) / x.values[j];
        }
        Term::Value(vec)
    }

    fn evaluate(
        &self,
        ls: &[LVector],
        x: &XPoint,
        deriv: Option<usize>,
    ) -> Result<(Vec<(i64, DVector<Complex64>)>, usize)> {
        let logs = x.logs()?;
        if logs.len() != self.fan.num_rays() {
            return Err(Error::DimensionMismatch(format!("x must have {} coordinates", self.fan.num_rays())));
        }
        let evaluated: Vec<Term> = ls.par_iter().map(|lv| self.term(lv, x, &logs, deriv)).collect();
        let mut values = Vec::new();
        let mut violations = 0;
        for (lv, t) in ls.iter().zip(evaluated) {
            match t {
                Term::Zero => {}
                Term::OutsideShadow => violations += 1,
                Term::Value(v) => values.push((lv.norm(), v)),
            }
        }
        Ok((values, violations))
    }

    fn sums(&self, values: &[(i64, DVector<Complex64>)], bound: i64) -> (DVector<Complex64>, DVector<Complex64>) {
        let all: Vec<&DVector<Complex64>> = values.iter().map(|(_, v)| v).collect();
        let inner: Vec<&DVector<Complex64>> = values.iter().filter(|(n, _)| *n <= bound - self.shell_step).map(|(_, v)| v).collect();
        (tree_sum(&all, self.dim()), tree_sum(&inner, self.dim()))
    }

    /// `Φ_v(x)` truncated to `Σ |m_i| ≤ bound`.
    pub fn gamma_series(&self, v: &[i64], x: &XPoint, bound: i64) -> Result<SeriesValue> {
        let ls = self.all_l(v, bound)?;
        let (values, shadow_violations) = self.evaluate(&ls, x, None)?;
        let (full, inner) = self.sums(&values, bound);
        Ok(SeriesValue {
            v: v.to_vec(),
            x: x.values.clone(),
            tail_estimate: max_abs_diff(&full, &inner),
            value: full.iter().copied().collect(),
            truncation_bound: bound,
            terms: values.len(),
            shadow_violations,
        })
    }

    /// `∂Φ_v/∂x_j` from the termwise derivative of the same truncation.
    pub fn derivative_series(&self, v: &[i64], j: usize, x: &XPoint, bound: i64) -> Result<Vec<Complex64>> {
        let ls = self.all_l(v, bound)?;
        let (values, _) = self.evaluate(&ls, x, Some(j))?;
        Ok(self.sums(&values, bound).0.iter().copied().collect())
    }

    /// `max |∂_j Φ_v − Φ_{v+v_j}|` over components.
    pub fn residual(&self, v: &[i64], j: usize, x: &XPoint, bound: i64) -> Result<Residual> {
        let d = self.derivative_series(v, j, x, bound)?;
        let target: Vec<i64> = v.iter().zip(self.fan.ray(j)).map(|(a, b)| a + b).collect();
        let phi = self.gamma_series(&target, x, bound)?;
        let own = self.gamma_series(v, x, bound)?;
        let max_abs = d.iter().zip(&phi.value).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        Ok(Residual { v: v.to_vec(), j, max_abs, tail_estimate: phi.tail_estimate.max(own.tail_estimate) })
    }

    /// Compares `L(α, v) − e_j` with `L(α, v + v_j)` on the window, listing
    /// the elements that differ only because of the window.
    pub fn verify_term_shift(&self, v: &[i64], j: usize, bound: i64) -> Result<TermShiftReport> {
        let target: Vec<i64> = v.iter().zip(self.fan.ray(j)).map(|(a, b)| a + b).collect();
        let mut boundary = Vec::new();
        let mut matched = 0;
        let mut holds = true;
        for a in 0..self.elements.len() {
            let shifted: Vec<Vec<i64>> = self
                .enumerate_l(a, v, bound)?
                .into_iter()
                .map(|lv| {
                    let mut m = lv.m;
                    m[j] -= 1;
                    m
                })
                .collect();
            let targets: Vec<Vec<i64>> = self.enumerate_l(a, &target, bound)?.into_iter().map(|lv| lv.m).collect();
            for m in &shifted {
                if targets.contains(m) {
                    matched += 1;
                } else {
                    holds &= m.iter().map(|x| x.abs()).sum::<i64>() == bound + 1;
                    boundary.push(BoundaryTerm { alpha: a, m: m.clone(), side: BoundarySide::Shifted });
                }
            }
            for m in targets.iter().filter(|m| !shifted.contains(m)) {
                let mut back = m.clone();
                back[j] += 1;
                holds &= back.iter().map(|x| x.abs()).sum::<i64>() == bound + 1;
                boundary.push(BoundaryTerm { alpha: a, m: m.clone(), side: BoundarySide::Target });
            }
        }
        Ok(TermShiftReport { holds, matched, boundary })
    }

    /// `Σ_i g(v_i) D_i = 0` exactly for every coordinate functional g.
    pub fn verify_euler(&self) -> bool {
        self.quotient.euler_relations_hold(&self.fan)
    }

    /// Lattice points of the support with `deg ≤ cap`, by degree then
    /// lexicographically.
    pub fn lattice_points(&self, cap: i64) -> Result<Vec<Vec<i64>>> {
        let spec = ModuleSpec::new(self.fan.clone(), vec![Rational::zero(); self.fan.rank()]);
        let mut out = Vec::new();
        for m in 0..=cap {
            for p in graded_piece(&spec, m)?.points {
                out.push(p.iter().map(|x| x.to_i64().expect("small lattice point")).collect());
            }
        }
        Ok(out)
    }

    /// Rows `Φ_v(x)` for all lattice points of degree at most `vcap`, and
    /// their numerical rank.
    pub fn solution_system(&self, x: &XPoint, bound: i64, vcap: i64) -> Result<SolutionSystem> {
        let points = self.lattice_points(vcap)?;
        let mut matrix = Vec::with_capacity(points.len());
        let mut tail: f64 = 0.0;
        for v in &points {
            let s = self.gamma_series(v, x, bound)?;
            tail = tail.max(s.tail_estimate);
            matrix.push(s.value);
        }
        let nr = rank_over_c(&matrix, DEFAULT_RANK_TOL);
        let dim = self.dim();
        let sv = &nr.singular_values;
        let top = sv.first().copied().unwrap_or(0.0);
        let gap = if dim == 0 || sv.len() < dim {
            0.0
        } else {
            let next = sv.get(dim).copied().unwrap_or(0.0);
            sv[dim - 1] / next.max(DEFAULT_RANK_TOL * top)
        };
        Ok(SolutionSystem {
            rank_deficient: nr.rank < dim,
            rank: nr.rank,
            singular_values: nr.singular_values,
            gap,
            points,
            matrix,
            tail_estimate: tail,
        })
    }

    /// Checks, for every shadow point of offset at most `max_offset`, that it
    /// has the form `c(α_δ) + Σ_{l_i<0} v_i + Σ_{i∈σ} Z_{≥0} v_i` for a unique
    /// Box element of a suitable maximal cone σ and some `l ∈ L(α, v)`.
    pub fn verify_decomposition(&self, max_offset: i64) -> Result<DecompositionReport> {
        let fan = &self.fan;
        let beta_delta = &self.correspondence.beta_delta;
        let xi = self.beta.real_part();
        let real = box_of_fan(fan, &BetaParameter::real(beta_delta.clone()))?;
        let mut checked = 0;
        let mut failures = Vec::new();
        for e in &real {
            for o in 0..=max_offset {
                for p in summand_points(fan, e, o) {
                    let w: Vec<Rational> =
                        p.n.iter().zip(beta_delta).map(|(a, b)| Rational::from_integer(a.clone()) + b).collect();
                    if !fan.tangent_member_unchecked(&w, &xi) {
                        continue;
                    }
                    checked += 1;
                    if !self.decomposes(&w, beta_delta)? {
                        failures.push(p.n);
                    }
                }
            }
        }
        Ok(DecompositionReport { checked, failures })
    }

    fn decomposes(&self, w: &[Rational], beta_delta: &[Rational]) -> Result<bool> {
        let fan = &self.fan;
        // a maximal cone containing w + ε β_δ for small ε
        let Some(sigma) = (0..fan.max_cones().len()).find(|&c| {
            let (Some(q), Some(b)) = (fan.coords_in_cone(c, w), fan.coords_in_cone(c, beta_delta)) else {
                return false;
            };
            q.iter().zip(&b).all(|(x, y)| x.is_positive() || (x.is_zero() && !y.is_negative()))
        }) else {
            return Ok(false);
        };
        let idx = fan.max_cones()[sigma].clone();
        let q = fan.coords_in_cone(sigma, w).expect("cone found above");
        let mut alpha_delta = vec![Rational::zero(); fan.num_rays()];
        for (&i, x) in idx.iter().zip(&q) {
            alpha_delta[i] = frac(x);
        }
        let p: Vec<BigInt> = q.iter().map(floor).collect();
        // uniqueness of the Box element of σ below w
        let below = box_of_cone(fan, sigma, &BetaParameter::real(beta_delta.to_vec()))?
            .iter()
            .filter(|b| {
                idx.iter().all(|&i| {
                    let diff = &q[idx.iter().position(|&t| t == i).unwrap()] - &b.alpha[i].re;
                    is_integer(&diff) && !diff.is_negative()
                })
            })
            .count();
        if below != 1 {
            return Ok(false);
        }
        let Some(a) = self.correspondence.triples.iter().position(|t| t.alpha_delta == alpha_delta) else {
            return Ok(false);
        };
        let e = &self.elements[a];
        // t_i ≥ 0 is forced where α_i = 0 and p_i = 0; elsewhere t_i is free
        let forced: Vec<bool> = idx.iter().zip(&p).map(|(&i, pi)| e.alpha[i].is_zero() && pi.is_zero()).collect();
        let reach = 3 + p.iter().map(|x| x.to_i64().unwrap_or(0)).max().unwrap_or(0);
        let in_support = |t: &[i64]| {
            let v: Vec<Rational> = (0..fan.rank())
                .map(|r| {
                    let s: BigInt = idx.iter().zip(t).map(|(&i, &ti)| BigInt::from(ti * fan.ray(i)[r])).sum();
                    Rational::from_integer(-&e.n[r] - s)
                })
                .collect();
            fan.contains(&v)
        };
        let mut t = vec![-reach; idx.len()];
        loop {
            if t.iter().zip(&forced).all(|(&ti, &f)| !f || ti >= 0) && in_support(&t) {
                return Ok(true);
            }
            let mut c = 0;
            while c < t.len() && t[c] == reach {
                t[c] = -reach;
                c += 1;
            }
            if c == t.len() {
                return Ok(false);
            }
            t[c] += 1;
        }
    }
}

/// Heights for which the regular triangulation reproduces the fan, if a
/// small search finds them. Small integer heights are tried first; the
/// result is shifted by a linear function so that it vanishes on the first
/// maximal cone, which leaves every `⟨h, m⟩` with `Σ m_i v_i = 0` unchanged.
pub fn find_heights(fan: &StackyFan) -> Option<Vec<Rational>> {
    let same = |h: &[Rational]| {
        triangulate_from_heights(fan.rays(), h).is_ok_and(|t| {
            let mut a = t.max_cones().to_vec();
            let mut b = fan.max_cones().to_vec();
            a.sort();
            b.sort();
            a == b
        })
    };
    let k = fan.num_rays();
    let top: u32 = if k <= 6 { 3 } else { 2 };
    let small = (0..top.pow(k as u32)).map(|code| {
        (0..k).map(|i| Rational::from_integer(((code / top.pow(i as u32)) % top).into())).collect::<Vec<_>>()
    });
    let found = small
        .chain((0..64).map(|a| generic_heights(k, a)))
        .find(|h| same(h))?;
    Some(normalize_heights(fan, &found))
}

fn normalize_heights(fan: &StackyFan, h: &[Rational]) -> Vec<Rational> {
    let Some(first) = fan.max_cones().first() else { return h.to_vec() };
    (0..fan.num_rays())
        .map(|j| {
            let p: Vec<Rational> = fan.ray(j).iter().map(|&x| Rational::from_integer(x.into())).collect();
            match fan.coords_in_cone(0, &p) {
                Some(c) => &h[j] - c.iter().zip(first).map(|(ci, &i)| ci * &h[i]).sum::<Rational>(),
                None => h[j].clone(),
            }
        })
        .collect()
}

/// `x_i = ρ^{h_i}` with ρ chosen so that `|x^m| ≤ DEFAULT_RATIO` for each
/// relation-lattice generator m oriented so that `⟨h, m⟩ > 0`.
pub fn default_x(fan: &StackyFan, heights: &[Rational]) -> XPoint {
    let h: Vec<f64> = heights.iter().map(to_f64).collect();
    let lat = RelationLattice::new(fan.rays());
    let mut rho: f64 = 0.5;
    for m in lat.kernel() {
        let s: f64 = m.iter().zip(&h).map(|(&mi, hi)| mi as f64 * hi).sum::<f64>().abs();
        if s > 0.0 {
            rho = rho.min(DEFAULT_RATIO.powf(1.0 / s));
        }
    }
    XPoint::real(&h.iter().map(|hi| rho.powf(*hi)).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::fixtures::{f1, square, square_heights};

    fn inst(beta: BetaParameter) -> GkzInstance {
        GkzInstance::new(f1(), beta).unwrap()
    }

    fn x_f1() -> XPoint {
        XPoint::real(&[1.0, 10.0, 1.0])
    }

    #[test]
    fn l_sets() {
        let g = inst(BetaParameter::zero(2));
        let ms: Vec<Vec<i64>> = g.enumerate_l(0, &[0, 0], 4).unwrap().into_iter().map(|l| l.m).collect();
        assert_eq!(ms, vec![vec![-1, 2, -1], vec![0, 0, 0], vec![1, -2, 1]]);
        let ls = g.enumerate_l(0, &[1, 0], 4).unwrap();
        assert!(ls.iter().any(|l| l.m == vec![-1, 0, 0]));
        for l in &ls {
            let s: Vec<i64> = (0..2).map(|c| l.m.iter().zip(f1().rays()).map(|(m, v)| m * v[c]).sum()).collect();
            assert_eq!(s, vec![-1, 0]);
        }
        assert!(g.enumerate_l(0, &[0, 0], 0).unwrap().len() <= 1);
    }

    #[test]
    fn scalar_series_on_trivial_summand() {
        // β = 0: the quotient is spanned by [0] and [v_3]; only l = t(1,−2,1)
        // with t ≥ 0 survive, and the [0]-component is Σ_t x^l / (t!^2 Γ(1−2t+D_2))
        let g = inst(BetaParameter::zero(2));
        let s = g.gamma_series(&[0, 0], &x_f1(), 12).unwrap();
        assert_eq!(s.value.len(), 2);
        assert_eq!(s.shadow_violations, 0);
        // the t = 0 term alone is the unit vector [0]; the rest is tiny
        assert!((s.value[0] - 1.0).norm() < 0.05);
    }

    #[test]
    fn quarter_summands_match_classical_series() {
        // β = (1/4, 0): each Box summand is one-dimensional, so Φ_0 splits into
        // two classical scalar Γ-series
        let g = inst(BetaParameter::real(vec![rat(1, 4), rat(0, 1)]));
        assert_eq!(g.dim(), 2);
        let x = x_f1();
        let s = g.gamma_series(&[0, 0], &x, 12).unwrap();
        for (a, e) in g.elements.iter().enumerate() {
            let b = g.quotient.summand_basis(g.quotient.summands.iter().position(|s| {
                s.alpha_real == g.correspondence.triples[a].alpha_delta
            }).unwrap())[0];
            let mut oracle = Complex64::new(0.0, 0.0);
            for lv in g.enumerate_l(a, &[0, 0], 12).unwrap() {
                let mut t = Complex64::new(1.0, 0.0);
                for (li, xi) in lv.l.iter().zip(&x.values) {
                    let lf = to_f64(&li.re);
                    t *= xi.powf(lf) * reciprocal_gamma_jet(Complex64::new(lf, 0.0), 1)[0];
                }
                oracle += t;
            }
            assert!((s.value[b] - oracle).norm() < 1e-12 * oracle.norm().max(1.0), "{:?}", e.alpha);
        }
    }

    #[test]
    fn term_shift_examples() {
        let g = inst(BetaParameter::zero(2));
        let r = g.verify_term_shift(&[0, 0], 1, 8).unwrap();
        assert!(r.holds);
        assert!(r.boundary.len() <= 2);
        assert!(g.verify_term_shift(&[0, 0], 1, 0).unwrap().holds);
        let q = inst(BetaParameter::real(vec![rat(1, 4), rat(0, 1)]));
        assert!(q.verify_term_shift(&[0, 0], 0, 8).unwrap().holds);
    }

    #[test]
    fn euler_and_rank() {
        let g = inst(BetaParameter::zero(2));
        assert!(g.verify_euler());
        let sys = g.solution_system(&x_f1(), 15, 2).unwrap();
        assert_eq!(sys.rank, 2);
        assert!(!sys.rank_deficient);
        let sq = GkzInstance::new(
            square(),
            BetaParameter::real(vec![rat(1, 3), rat(1, 7), rat(1, 11)]),
        )
        .unwrap();
        assert!(sq.verify_euler());
        let x = default_x(&sq.fan, &square_heights());
        let sys = sq.solution_system(&x, 15, 2).unwrap();
        assert_eq!(sys.rank, 2);
    }

    #[test]
    fn derivative_matches_shifted_series() {
        let g = inst(BetaParameter::zero(2));
        for j in 0..3 {
            let r = g.residual(&[0, 0], j, &x_f1(), 15).unwrap();
            assert!(r.max_abs < 1e-6, "j = {j}: {}", r.max_abs);
        }
    }

    #[test]
    fn decomposition_of_shadow_points() {
        let g = inst(BetaParameter::real(vec![rat(1, 4), rat(0, 1)]));
        let r = g.verify_decomposition(4).unwrap();
        assert!(r.checked > 0);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
    }

    #[test]
    fn default_point_for_square() {
        let x = default_x(&square(), &square_heights());
        let want = [1.0, 0.1, 0.1, 1.0];
        for (a, b) in x.values.iter().zip(want) {
            assert!((a.re - b).abs() < 1e-12);
        }
        let h = find_heights(&square()).unwrap();
        assert!(h.iter().all(|x| !x.is_negative()));
        let x = default_x(&square(), &h);
        // x^m for the relation (1,−1,−1,1) is pinned at 10^-2 either way
        let xm = x.values[0] * x.values[3] / (x.values[1] * x.values[2]);
        assert!((xm.norm().log10().abs() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_coordinate_is_rejected() {
        let g = inst(BetaParameter::zero(2));
        let x = XPoint::real(&[1.0, 0.0, 1.0]);
        assert_eq!(g.gamma_series(&[0, 0], &x, 2), Err(Error::ZeroCoordinate { index: 1 }));
    }

    #[test]
    fn residual_shrinks_with_the_window() {
        let g = inst(BetaParameter::zero(2));
        let at = |b: i64| (0..3).map(|j| g.residual(&[0, 0], j, &x_f1(), b).unwrap()).collect::<Vec<_>>();
        let worst = |b: i64| {
            let rs = at(b);
            for r in &rs {
                assert!(r.max_abs <= 10.0 * r.tail_estimate + 1e-13, "B = {b}, j = {}: {r:?}", r.j);
            }
            rs.iter().map(|r| r.max_abs).fold(0.0, f64::max)
        };
        let (coarse, fine) = (worst(12), worst(24));
        assert!(coarse > 1e-7 && fine < 1e-3 * coarse, "{coarse} {fine}");
    }

    #[test]
    fn doubling_the_window() {
        let g = inst(BetaParameter::zero(2));
        let diff = |a: &SeriesValue, b: &SeriesValue| a.value.iter().zip(&b.value).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        for v in g.lattice_points(2).unwrap() {
            let s = [12, 24, 48].map(|b| g.gamma_series(&v, &x_f1(), b).unwrap());
            let (d1, d2) = (diff(&s[0], &s[1]), diff(&s[1], &s[2]));
            // the change is covered by the tail estimate and shrinks geometrically
            assert!(d1 <= s[0].tail_estimate && d1 < 1e-5, "v = {v:?}: {d1:e}");
            assert!(d2 < 1e-3 * d1 + 1e-14 && d2 < 1e-9, "v = {v:?}: {d2:e}");
        }
    }
}
