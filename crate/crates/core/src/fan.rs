//! Simplicial stacky fans: validation, cone membership, tangent cones and
//! normalized volume.
//!
//! Cones are stored by generator indices only (0-based internally). Facet
//! data is never stored explicitly; coordinates with respect to a simplicial
//! cone come from one exact solve with a cached square subsystem.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{int, lp, GaussianRational, IntMatrix, RatMatrix, Rational};
use crate::triangulate;

/// A face of the fan, given by the sorted 0-based indices of its rays.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ConeRef(pub Vec<usize>);

impl ConeRef {
    pub fn zero() -> Self {
        ConeRef(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &[usize]) -> bool {
        self.0.iter().all(|i| other.binary_search(i).is_ok())
    }

    /// 1-based indices for file output.
    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for ConeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.one_based().iter().join(","))
    }
}

/// How a complex point is turned into a real one before a support test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RealView {
    RealPart,
    /// `re + delta * im`
    Delta(Rational),
}

#[derive(Debug, Clone)]
struct ConeGeom {
    /// rows of the generator matrix forming an invertible square block
    rows: Vec<usize>,
    /// inverse of that block
    inv: RatMatrix,
    /// d x |I| generator matrix
    gens: RatMatrix,
}

impl ConeGeom {
    fn build(rays: &[Vec<i64>], idx: &[usize], d: usize) -> Option<Self> {
        let cols: Vec<&[i64]> = idx.iter().map(|&i| rays[i].as_slice()).collect();
        let gens = RatMatrix::from_i64_columns(&cols, d);
        let rr = gens.transpose().rref();
        if rr.pivots.len() < idx.len() {
            return None;
        }
        let rows = rr.pivots;
        let mut block = RatMatrix::zeros(idx.len(), idx.len());
        for (a, &r) in rows.iter().enumerate() {
            for b in 0..idx.len() {
                block[(a, b)] = gens[(r, b)].clone();
            }
        }
        let inv = block.inverse()?;
        Some(Self { rows, inv, gens })
    }

    fn coords(&self, p: &[Rational]) -> Option<Vec<Rational>> {
        let sub: Vec<Rational> = self.rows.iter().map(|&r| p[r].clone()).collect();
        let c = self.inv.mul_vec(&sub);
        if self.rows.len() < p.len() && self.gens.mul_vec(&c) != p {
            return None;
        }
        Some(c)
    }
}

#[derive(Debug, Clone)]
pub struct StackyFan {
    rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    deg: Option<Vec<i64>>,
    geom: Vec<Option<ConeGeom>>,
}

/// One violated fan invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// generators of a maximal cone are linearly dependent
    NonSimplicial { cone: Vec<usize> },
    /// a listed maximal cone is a face of another listed cone
    NotMaximal { cone: Vec<usize>, contained_in: Vec<usize> },
    /// two cones meet outside their common face
    NotAFan { first: Vec<usize>, second: Vec<usize> },
    /// the given degree functional is not 1 on a ray
    DegreeNotOne { ray: usize },
}

/// Reasons why a valid fan cannot be used for the GKZ constructions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GkzIssue {
    NoDegree,
    RaysDoNotGenerateLattice,
    NotFullDimensional { cone: Vec<usize> },
    SupportIsNotHullCone { fan_volume: usize, hull_volume: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub gkz_eligible: bool,
    pub volume: Option<usize>,
    pub deg: Option<Vec<i64>>,
    pub violations: Vec<Violation>,
    pub gkz_issues: Vec<GkzIssue>,
}

impl StackyFan {
    /// Builds a fan after structural checks (shapes and index ranges).
    /// Geometric invariants are checked by [`StackyFan::validate`].
    pub fn new(
        rank: usize,
        rays: Vec<Vec<i64>>,
        max_cones: Vec<Vec<usize>>,
        deg: Option<Vec<i64>>,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidFan("rank must be positive".into()));
        }
        if let Some((i, _)) = rays.iter().find_position(|r| r.len() != rank) {
            return Err(Error::InvalidFan(format!("ray {} does not have {rank} coordinates", i + 1)));
        }
        if deg.as_ref().is_some_and(|g| g.len() != rank) {
            return Err(Error::InvalidFan(format!("deg does not have {rank} coordinates")));
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for c in max_cones {
            let mut c = c;
            c.sort_unstable();
            if c.is_empty() {
                return Err(Error::InvalidFan("empty maximal cone".into()));
            }
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidFan(format!("repeated ray in cone {:?}", one_based(&c))));
            }
            if c.iter().any(|&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!("ray index out of range in cone {:?}", one_based(&c))));
            }
            cones.push(c);
        }
        let geom = cones.iter().map(|c| ConeGeom::build(&rays, c, rank)).collect();
        Ok(Self { rank, rays, max_cones: cones, deg, geom })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number k of marked vectors v_1..v_k (rays and, in GKZ mode, possibly
    /// points of the polytope that are not rays).
    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn given_deg(&self) -> Option<&[i64]> {
        self.deg.as_deref()
    }

    /// Indices that generate a ray of some cone, I(Σ).
    pub fn fan_rays(&self) -> Vec<usize> {
        self.max_cones.iter().flatten().copied().sorted().dedup().collect()
    }

    pub fn is_fan_ray(&self, i: usize) -> bool {
        self.max_cones.iter().any(|c| c.contains(&i))
    }

    /// The degree functional: the given one, or the integral solution of
    /// deg(v_i) = 1 when one exists.
    pub fn deg(&self) -> Option<Vec<i64>> {
        match &self.deg {
            Some(g) => Some(g.clone()),
            None => infer_deg(&self.rays, self.rank),
        }
    }

    pub fn is_simplicial_cone(&self, c: usize) -> bool {
        self.geom[c].is_some()
    }

    /// Coordinates of a real point with respect to the generators of maximal
    /// cone `c`, or `None` if the point is outside the span (or the cone is
    /// not simplicial).
    pub fn coords_in_cone(&self, c: usize, p: &[Rational]) -> Option<Vec<Rational>> {
        self.geom[c].as_ref()?.coords(p)
    }

    /// First maximal cone containing every index in `idx`.
    pub fn common_cone(&self, idx: &[usize]) -> Option<usize> {
        self.max_cones.iter().position(|c| idx.iter().all(|i| c.contains(i)))
    }

    pub fn is_face(&self, idx: &[usize]) -> bool {
        self.common_cone(idx).is_some()
    }

    /// Maximal cones that contain every index in `idx`.
    pub fn witness_cones(&self, idx: &[usize]) -> Vec<usize> {
        (0..self.max_cones.len()).filter(|&c| idx.iter().all(|i| self.max_cones[c].contains(i))).collect()
    }

    /// |det| of the generators of a full-dimensional maximal cone.
    pub fn cone_index(&self, c: usize) -> Result<BigInt> {
        let idx = &self.max_cones[c];
        if idx.len() != self.rank {
            return Err(Error::NotFullDimensional { cone: c });
        }
        let cols: Vec<&[i64]> = idx.iter().map(|&i| self.rays[i].as_slice()).collect();
        Ok(IntMatrix::from_columns(&cols).det().abs())
    }

    /// Sum over maximal cones of |det(generators)|.
    pub fn normalized_volume(&self) -> Result<usize> {
        let mut total = BigInt::zero();
        for c in 0..self.max_cones.len() {
            total += self.cone_index(c)?;
        }
        total.to_usize().ok_or_else(|| Error::InvalidFan("volume does not fit in usize".into()))
    }

    /// Smallest face whose cone contains the real point `p`.
    pub fn minimal_cone(&self, p: &[Rational]) -> Option<ConeRef> {
        for c in 0..self.max_cones.len() {
            let Some(coords) = self.coords_in_cone(c, p) else { continue };
            if coords.iter().any(Signed::is_negative) {
                continue;
            }
            let face = self.max_cones[c]
                .iter()
                .zip(&coords)
                .filter(|(_, x)| x.is_positive())
                .map(|(&i, _)| i)
                .collect();
            return Some(ConeRef(face));
        }
        None
    }

    pub fn minimal_cone_complex(&self, p: &[GaussianRational], view: &RealView) -> Option<ConeRef> {
        let real: Vec<Rational> = p
            .iter()
            .map(|z| match view {
                RealView::RealPart => z.re.clone(),
                RealView::Delta(delta) => z.real_combination(delta),
            })
            .collect();
        self.minimal_cone(&real)
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.minimal_cone(p).is_some()
    }

    /// Whether `p + eps * xi` stays in the support for all sufficiently small
    /// `eps > 0`.
    pub fn tangent_member(&self, p: &[Rational], xi: &[Rational]) -> Result<bool> {
        if !self.contains(p) {
            return Err(Error::PointOutsideSupport);
        }
        Ok(self.tangent_member_unchecked(p, xi))
    }

    /// As [`StackyFan::tangent_member`], returning false for points outside
    /// the support.
    pub fn tangent_member_unchecked(&self, p: &[Rational], xi: &[Rational]) -> bool {
        (0..self.max_cones.len()).any(|c| {
            let Some(pc) = self.coords_in_cone(c, p) else { return false };
            if pc.iter().any(Signed::is_negative) {
                return false;
            }
            let Some(xc) = self.coords_in_cone(c, xi) else { return false };
            pc.iter().zip(&xc).all(|(a, b)| a.is_positive() || !b.is_negative())
        })
    }

    /// Checks simpliciality, maximality and the fan property, and in
    /// addition the conditions needed by the GKZ constructions.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (c, idx) in self.max_cones.iter().enumerate() {
            if self.geom[c].is_none() {
                violations.push(Violation::NonSimplicial { cone: one_based(idx) });
            }
        }
        for (a, b) in (0..self.max_cones.len()).tuple_combinations() {
            let (ia, ib) = (&self.max_cones[a], &self.max_cones[b]);
            if ib.iter().all(|i| ia.contains(i)) {
                violations.push(Violation::NotMaximal { cone: one_based(ib), contained_in: one_based(ia) });
            } else if ia.iter().all(|i| ib.contains(i)) {
                violations.push(Violation::NotMaximal { cone: one_based(ia), contained_in: one_based(ib) });
            } else if self.geom[a].is_some()
                && self.geom[b].is_some()
                && self.cones_overlap(ia, ib)
            {
                violations.push(Violation::NotAFan { first: one_based(ia), second: one_based(ib) });
            }
        }
        if let Some(g) = &self.deg {
            for (i, v) in self.rays.iter().enumerate() {
                if dot(g, v) != 1 {
                    violations.push(Violation::DegreeNotOne { ray: i + 1 });
                }
            }
        }
        let valid = violations.is_empty();

        let mut gkz_issues = Vec::new();
        let deg = self.deg();
        if deg.is_none() {
            gkz_issues.push(GkzIssue::NoDegree);
        }
        if !rays_generate_lattice(&self.rays, self.rank) {
            gkz_issues.push(GkzIssue::RaysDoNotGenerateLattice);
        }
        for idx in &self.max_cones {
            if idx.len() != self.rank {
                gkz_issues.push(GkzIssue::NotFullDimensional { cone: one_based(idx) });
            }
        }
        let volume = if valid { self.normalized_volume().ok() } else { None };
        if let (Some(fan_volume), true, Some(_)) = (volume, valid, &deg) {
            match hull_volume(&self.rays) {
                Some(hull) if hull == fan_volume => {}
                Some(hull_volume) => gkz_issues.push(GkzIssue::SupportIsNotHullCone { fan_volume, hull_volume }),
                None => gkz_issues.push(GkzIssue::SupportIsNotHullCone { fan_volume, hull_volume: 0 }),
            }
        }
        ValidationReport { valid, gkz_eligible: valid && gkz_issues.is_empty(), volume, deg, violations, gkz_issues }
    }

    /// Whether the simplicial cones `a` and `b` share a point outside the
    /// cone on their common rays.
    fn cones_overlap(&self, a: &[usize], b: &[usize]) -> bool {
        let d = self.rank;
        let n = a.len() + b.len();
        let mut m = RatMatrix::zeros(d + 1, n);
        for (j, &i) in a.iter().enumerate() {
            for r in 0..d {
                m[(r, j)] = int(self.rays[i][r]);
            }
            if !b.contains(&i) {
                m[(d, j)] = Rational::one();
            }
        }
        for (j, &i) in b.iter().enumerate() {
            for r in 0..d {
                m[(r, a.len() + j)] = -int(self.rays[i][r]);
            }
        }
        let mut rhs = vec![Rational::zero(); d + 1];
        rhs[d] = Rational::one();
        lp::feasible(&m, &rhs)
    }

    /// Fails unless the fan is valid and usable for the GKZ constructions.
    pub fn require_gkz(&self) -> Result<Vec<i64>> {
        let report = self.validate();
        if !report.valid {
            return Err(Error::InvalidFan(format!("{:?}", report.violations)));
        }
        if !report.gkz_eligible {
            return Err(Error::NotGkzEligible(format!("{:?}", report.gkz_issues)));
        }
        report.deg.ok_or_else(|| Error::NotGkzEligible("no degree functional".into()))
    }
}

fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Integral solution of deg(v_i) = 1 for all i, if one exists.
pub fn infer_deg(points: &[Vec<i64>], rank: usize) -> Option<Vec<i64>> {
    if points.is_empty() {
        return None;
    }
    let mut aug = RatMatrix::zeros(points.len(), rank + 1);
    for (i, v) in points.iter().enumerate() {
        for j in 0..rank {
            aug[(i, j)] = int(v[j]);
        }
        aug[(i, rank)] = Rational::one();
    }
    let rr = aug.rref();
    if rr.pivots.contains(&rank) {
        return None;
    }
    let mut g = vec![Rational::zero(); rank];
    for (r, &c) in rr.pivots.iter().enumerate() {
        g[c] = rr.matrix[(r, rank)].clone();
    }
    g.iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect()
}

/// Whether the vectors generate Z^d as a group (gcd of maximal minors is 1).
pub fn rays_generate_lattice(rays: &[Vec<i64>], rank: usize) -> bool {
    if rays.len() < rank {
        return false;
    }
    let (h, _) = IntMatrix::from_rows(rays).hermite_normal_form();
    (0..rank).all(|i| h[(i, i)].is_one())
}

/// Normalized volume of the convex hull of homogeneous points, computed
/// from an independent regular triangulation with generic heights.
pub fn hull_volume(points: &[Vec<i64>]) -> Option<usize> {
    for attempt in 0..12u64 {
        let heights = generic_heights(points.len(), attempt);
        match triangulate::triangulate_from_heights(points, &heights) {
            Ok(fan) => return fan.normalized_volume().ok(),
            Err(Error::DegenerateHeights) => continue,
            Err(_) => return None,
        }
    }
    None
}

/// Deterministic pseudo-random heights; a different stream per attempt.
pub(crate) fn generic_heights(n: usize, attempt: u64) -> Vec<Rational> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ attempt.wrapping_mul(0xD1B5_4A32_D192_ED03);
    (0..n)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            Rational::new(BigInt::from((state >> 33) % 100_003), BigInt::from(97))
        })
        .collect()
}
