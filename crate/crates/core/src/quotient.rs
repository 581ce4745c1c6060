//! The deformed modules over R = Z[Σ], their shadow submodules, and the
//! finite-dimensional quotients by the ideal generated by
//! `Z_j = Σ_i g_j(v_i) [v_i]`.
//!
//! Each module splits as a direct sum over `Bx(Σ;χ)` of cyclic
//! `S_Σ`-modules generated by `[c(α)]`. Inside one summand a point
//! `c(α) + Σ p_i v_i` has offset `Σ p_i`, multiplication by `[v_i]` raises
//! the offset by one, and the quotient is computed summand by summand,
//! offset by offset.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::boxes::{alpha_support, box_of_fan, BetaParameter, BoxElement, DeltaCorrespondence};
use crate::error::{Error, Result};
use crate::exact::{floor, frac, int, is_integer, GaussianRational, RatMatrix, Rational};
use crate::fan::{dot, ConeRef, StackyFan};

/// Extra offsets that must contribute nothing once the volume is reached.
pub const STOP_WINDOW: i64 = 3;

pub fn offset_cap(rank: usize) -> i64 {
    10 * rank as i64 + 10
}

#[derive(Debug, Clone)]
pub struct ModuleSpec {
    pub fan: StackyFan,
    pub chi: Vec<Rational>,
    /// shadow direction; when present only points `n + χ` with
    /// `n + χ + εξ` in the support for small `ε > 0` are kept
    pub xi: Option<Vec<Rational>>,
    pub complex_beta: Option<BetaParameter>,
}

impl ModuleSpec {
    pub fn new(fan: StackyFan, chi: Vec<Rational>) -> Self {
        Self { fan, chi, xi: None, complex_beta: None }
    }

    pub fn with_shadow(mut self, xi: Vec<Rational>) -> Self {
        self.xi = Some(xi);
        self
    }

    pub fn with_complex_beta(mut self, beta: BetaParameter) -> Self {
        self.complex_beta = Some(beta);
        self
    }

    fn admits(&self, point: &[Rational]) -> bool {
        match &self.xi {
            Some(xi) => self.fan.tangent_member_unchecked(point, xi),
            None => true,
        }
    }

    fn point(&self, n: &[BigInt]) -> Vec<Rational> {
        n.iter().zip(&self.chi).map(|(a, c)| Rational::from_integer(a.clone()) + c).collect()
    }

    fn check_dims(&self) -> Result<()> {
        let d = self.fan.rank();
        if self.chi.len() != d || self.xi.as_ref().is_some_and(|x| x.len() != d) {
            return Err(Error::DimensionMismatch(format!("parameters must have {d} coordinates")));
        }
        Ok(())
    }
}

/// Lattice points `n` of one degree, `deg(n) = m`, with `n + χ` in the module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPiece {
    pub offset: i64,
    pub points: Vec<Vec<BigInt>>,
}

/// All `p ∈ Z_{≥0}^w` with `Σ weights_i p_i = total`.
fn weighted_compositions(weights: &[i64], total: i64) -> Vec<Vec<i64>> {
    fn go(weights: &[i64], total: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        match weights.split_first() {
            None => {
                if total == 0 {
                    out.push(prefix.clone());
                }
            }
            Some((&w, rest)) => {
                let mut p = 0;
                while p * w <= total {
                    prefix.push(p);
                    go(rest, total - p * w, prefix, out);
                    prefix.pop();
                    p += 1;
                }
            }
        }
    }
    let mut out = Vec::new();
    go(weights, total, &mut Vec::new(), &mut out);
    out
}

fn shifted(n: &[BigInt], fan: &StackyFan, idx: &[usize], p: &[i64]) -> Vec<BigInt> {
    let mut out = n.to_vec();
    for (&i, &pi) in idx.iter().zip(p) {
        for (o, &v) in out.iter_mut().zip(fan.ray(i)) {
            *o += BigInt::from(pi * v);
        }
    }
    out
}

fn deg_of(deg: &[i64], n: &[BigInt]) -> BigInt {
    deg.iter().zip(n).map(|(&g, x)| BigInt::from(g) * x).sum()
}

/// Lattice points of degree `m` in the module described by `spec`.
pub fn graded_piece(spec: &ModuleSpec, m: i64) -> Result<GradedPiece> {
    spec.check_dims()?;
    let fan = &spec.fan;
    let deg = fan.deg().ok_or(Error::UnboundedDegree)?;
    if fan.fan_rays().iter().any(|&i| dot(&deg, fan.ray(i)) <= 0) {
        return Err(Error::UnboundedDegree);
    }
    let mut found = BTreeSet::new();
    for e in box_of_fan(fan, &BetaParameter::real(spec.chi.clone()))? {
        let t = BigInt::from(m) - deg_of(&deg, &e.n);
        let Ok(t) = i64::try_from(t) else { continue };
        if t < 0 {
            continue;
        }
        for &c in &e.witness_cones {
            let idx = &fan.max_cones()[c];
            let weights: Vec<i64> = idx.iter().map(|&i| dot(&deg, fan.ray(i))).collect();
            for p in weighted_compositions(&weights, t) {
                let n = shifted(&e.n, fan, idx, &p);
                if spec.admits(&spec.point(&n)) {
                    found.insert(n);
                }
            }
        }
    }
    Ok(GradedPiece { offset: m, points: found.into_iter().collect() })
}

/// A point of one summand together with its minimal cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummandPoint {
    pub n: Vec<BigInt>,
    pub support: ConeRef,
}

/// Points `c(α) + Σ p_i v_i` with `Σ p_i = offset`, the `p_i` supported on a
/// maximal cone containing the support of α; sorted by `n`.
pub fn summand_points(fan: &StackyFan, e: &BoxElement, offset: i64) -> Vec<SummandPoint> {
    let mut found: BTreeMap<Vec<BigInt>, ConeRef> = BTreeMap::new();
    for &c in &e.witness_cones {
        let idx = &fan.max_cones()[c];
        for p in weighted_compositions(&vec![1; idx.len()], offset) {
            let n = shifted(&e.n, fan, idx, &p);
            found.entry(n).or_insert_with(|| {
                let mut s: BTreeSet<usize> = e.support.indices().iter().copied().collect();
                s.extend(idx.iter().zip(&p).filter(|(_, &x)| x > 0).map(|(&i, _)| i));
                ConeRef(s.into_iter().collect())
            });
        }
    }
    found.into_iter().map(|(n, support)| SummandPoint { n, support }).collect()
}

/// `[v_i] · [p]` inside a summand, as a lattice point, or `None` for zero.
fn ray_times(fan: &StackyFan, i: usize, p: &SummandPoint) -> Option<Vec<BigInt>> {
    let mut idx = p.support.indices().to_vec();
    if !idx.contains(&i) {
        idx.push(i);
    }
    if !fan.is_face(&idx) {
        return None;
    }
    Some(p.n.iter().zip(fan.ray(i)).map(|(a, &v)| a + BigInt::from(v)).collect())
}

/// One graded piece of one summand with its reduction data.
#[derive(Debug, Clone)]
struct Piece {
    points: Vec<SummandPoint>,
    index: BTreeMap<Vec<BigInt>, usize>,
    /// nonzero rows of the RREF of the image of `Z · M_{m-1}`
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
    free: Vec<usize>,
    first_basis: usize,
}

impl Piece {
    /// Coordinates of a vector modulo the image, on the free columns.
    fn reduce(&self, mut v: Vec<Rational>) -> Vec<Rational> {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        self.free.iter().map(|&j| v[j].clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElement {
    pub offset: i64,
    pub summand: usize,
    pub n: Vec<BigInt>,
    /// `n + χ`
    pub point: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    /// the exponent vector; complex when the module came from a complex β
    pub alpha: Vec<GaussianRational>,
    /// the exponent vector of the real module the quotient was computed on
    pub alpha_real: Vec<Rational>,
    pub n: Vec<BigInt>,
    pub support: ConeRef,
    pub dim: usize,
}

/// The quotient `M / Z·M` with multiplication matrices of the `[v_i]`.
#[derive(Debug, Clone)]
pub struct QuotientAlgebra {
    pub chi: Vec<Rational>,
    pub dim: usize,
    pub volume: usize,
    pub basis: Vec<BasisElement>,
    /// `d_mats[i]` acts on coordinate columns; zero for indices that do not
    /// generate a ray of the fan
    pub d_mats: Vec<RatMatrix>,
    pub summands: Vec<Summand>,
    /// last offset computed; every offset above it is zero in the quotient
    pub top_offset: i64,
    pieces: Vec<Vec<Piece>>,
}

impl QuotientAlgebra {
    pub fn summand_dim(&self, alpha: &[GaussianRational]) -> Option<usize> {
        self.summands.iter().find(|s| s.alpha == alpha).map(|s| s.dim)
    }

    /// Coordinates of the class of `[point]` (a point of `N + χ`), or `None`
    /// if the point does not belong to the module.
    pub fn class_of(&self, fan: &StackyFan, point: &[Rational]) -> Option<Vec<Rational>> {
        let support = fan.minimal_cone(point)?;
        let c = fan.common_cone(support.indices())?;
        let q = fan.coords_in_cone(c, point)?;
        let mut alpha = vec![Rational::zero(); fan.num_rays()];
        let mut offset = BigInt::zero();
        for (&i, x) in fan.max_cones()[c].iter().zip(&q) {
            alpha[i] = frac(x);
            offset += floor(x);
        }
        let s = self.summands.iter().position(|s| s.alpha_real == alpha)?;
        let mut out = vec![Rational::zero(); self.dim];
        let Ok(offset) = i64::try_from(offset) else { return Some(out) };
        if offset > self.top_offset {
            return Some(out);
        }
        let piece = &self.pieces[s][offset as usize];
        let n: Vec<BigInt> = point.iter().zip(&self.chi).map(|(p, c)| (p - c).to_integer()).collect();
        let &col = piece.index.get(&n)?;
        let mut e = vec![Rational::zero(); piece.points.len()];
        e[col] = int(1);
        for (k, x) in piece.reduce(e).into_iter().enumerate() {
            out[piece.first_basis + k] = x;
        }
        Some(out)
    }

    /// Basis indices belonging to summand `s`.
    pub fn summand_basis(&self, s: usize) -> Vec<usize> {
        (0..self.dim).filter(|&b| self.basis[b].summand == s).collect()
    }

    /// `Σ_i g(v_i) D_i = 0` for each coordinate functional g.
    pub fn euler_relations_hold(&self, fan: &StackyFan) -> bool {
        (0..fan.rank()).all(|j| {
            let mut acc = RatMatrix::zeros(self.dim, self.dim);
            for (i, m) in self.d_mats.iter().enumerate() {
                acc = acc.scaled_add(m, &int(fan.ray(i)[j]));
            }
            acc.is_zero()
        })
    }

    pub fn is_nilpotent(&self) -> bool {
        self.d_mats.iter().all(|m| m.pow(self.dim.max(1)).is_zero())
    }

    pub fn commute(&self) -> bool {
        self.d_mats.iter().enumerate().all(|(i, a)| self.d_mats[i + 1..].iter().all(|b| a * b == b * a))
    }
}

/// Quotient of the module described by `spec` (real χ) by `Z`.
pub fn quotient(spec: &ModuleSpec) -> Result<QuotientAlgebra> {
    spec.check_dims()?;
    let fan = &spec.fan;
    let d = fan.rank();
    let k = fan.num_rays();
    let volume = fan.normalized_volume()?;
    let elems = box_of_fan(fan, &BetaParameter::real(spec.chi.clone()))?;
    let cap = offset_cap(d);

    let mut pieces: Vec<Vec<Piece>> = vec![Vec::new(); elems.len()];
    let mut basis = Vec::new();
    let mut total = 0usize;
    let mut quiet = 0i64;
    let mut offset = 0i64;
    loop {
        if offset > cap {
            return Err(Error::NoStabilizationWindow { cap, dim: total, volume });
        }
        let mut added = 0;
        for (s, e) in elems.iter().enumerate() {
            let points: Vec<SummandPoint> = summand_points(fan, e, offset)
                .into_iter()
                .filter(|p| spec.admits(&spec.point(&p.n)))
                .collect();
            let index: BTreeMap<Vec<BigInt>, usize> =
                points.iter().enumerate().map(|(c, p)| (p.n.clone(), c)).collect();
            let mut image = Vec::new();
            if offset > 0 {
                for p in &pieces[s][offset as usize - 1].points {
                    for j in 0..d {
                        let mut row = vec![Rational::zero(); points.len()];
                        for i in 0..k {
                            let g = fan.ray(i)[j];
                            if g == 0 {
                                continue;
                            }
                            if let Some(col) = ray_times(fan, i, p).and_then(|q| index.get(&q)) {
                                row[*col] += int(g);
                            }
                        }
                        if row.iter().any(|x| !x.is_zero()) {
                            image.push(row);
                        }
                    }
                }
            }
            let (rows, pivots) = if image.is_empty() {
                (Vec::new(), Vec::new())
            } else {
                let r = RatMatrix::from_rows(image, points.len()).rref();
                let rows = (0..r.pivots.len()).map(|i| r.matrix.row(i).to_vec()).collect();
                (rows, r.pivots)
            };
            let free: Vec<usize> = (0..points.len()).filter(|c| !pivots.contains(c)).collect();
            let first_basis = basis.len();
            for &c in &free {
                basis.push(BasisElement {
                    offset,
                    summand: s,
                    n: points[c].n.clone(),
                    point: spec.point(&points[c].n),
                });
            }
            added += free.len();
            pieces[s].push(Piece { points, index, rows, pivots, free, first_basis });
        }
        total += added;
        if total > volume {
            return Err(Error::DimensionOvershoot { dim: total, volume });
        }
        if total == volume && added == 0 {
            quiet += 1;
            if quiet >= STOP_WINDOW {
                break;
            }
        } else {
            quiet = 0;
        }
        offset += 1;
    }
    let top_offset = offset;
    let dim = total;

    let mut d_mats = vec![RatMatrix::zeros(dim, dim); k];
    for (b, el) in basis.iter().enumerate() {
        let s = el.summand;
        let piece = &pieces[s][el.offset as usize];
        let p = &piece.points[piece.index[&el.n]];
        let next = &pieces[s][el.offset as usize + 1];
        for (i, mat) in d_mats.iter_mut().enumerate() {
            let Some(col) = ray_times(fan, i, p).and_then(|q| next.index.get(&q).copied()) else { continue };
            let mut e = vec![Rational::zero(); next.points.len()];
            e[col] = int(1);
            for (r, x) in next.reduce(e).into_iter().enumerate() {
                mat[(next.first_basis + r, b)] = x;
            }
        }
    }

    let summands = elems
        .iter()
        .enumerate()
        .map(|(s, e)| Summand {
            alpha: e.alpha.clone(),
            alpha_real: e.alpha_real(),
            n: e.n.clone(),
            support: e.support.clone(),
            dim: basis.iter().filter(|b| b.summand == s).count(),
        })
        .collect();
    Ok(QuotientAlgebra { chi: spec.chi.clone(), dim, volume, basis, d_mats, summands, top_offset, pieces })
}

/// Quotient for a complex parameter, computed on the stabilized real module
/// `Z[Σ;β_δ]` (optionally its shadow along `xi`), with summands tagged by
/// the complex exponents of `Bx(Σ;β)`.
pub fn quotient_for_beta(
    fan: &StackyFan,
    corr: &DeltaCorrespondence,
    xi: Option<Vec<Rational>>,
) -> Result<QuotientAlgebra> {
    let mut spec = ModuleSpec::new(fan.clone(), corr.beta_delta.clone()).with_complex_beta(corr.beta.clone());
    spec.xi = xi;
    let mut q = quotient(&spec)?;
    for s in &mut q.summands {
        if let Some(t) = corr.triples.iter().find(|t| t.alpha_delta == s.alpha_real) {
            s.alpha = t.alpha.clone();
        }
    }
    Ok(q)
}

/// A basis element `[n + β, α]` of the module of pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TaggedPoint {
    pub n: Vec<BigInt>,
    pub alpha: Vec<GaussianRational>,
}

/// `[n′] · [n + β, α]` in the module of pairs, or `None` for zero.
pub fn module_product(fan: &StackyFan, beta: &BetaParameter, n_prime: &[BigInt], x: &TaggedPoint) -> Option<TaggedPoint> {
    let support = alpha_support(&x.alpha);
    let np: Vec<Rational> = n_prime.iter().map(|a| Rational::from_integer(a.clone())).collect();
    // n + β − Σ α_i v_i must be real
    let mut rest = Vec::with_capacity(fan.rank());
    for j in 0..fan.rank() {
        let mut w = &GaussianRational::real(Rational::from_integer(x.n[j].clone())) + &beta.coords[j];
        for (i, a) in x.alpha.iter().enumerate() {
            w = &w - &a.scale(&int(fan.ray(i)[j]));
        }
        if !w.is_real() {
            return None;
        }
        rest.push(w.re);
    }
    for c in fan.witness_cones(support.indices()) {
        let Some(gamma) = fan.coords_in_cone(c, &np) else { continue };
        if gamma.iter().any(Signed::is_negative) {
            continue;
        }
        let Some(p) = fan.coords_in_cone(c, &rest) else { continue };
        if p.iter().any(|t| t.is_negative() || !is_integer(t)) {
            continue;
        }
        let mut alpha = vec![GaussianRational::zero(); fan.num_rays()];
        for (&i, g) in fan.max_cones()[c].iter().zip(&gamma) {
            let a = &x.alpha[i];
            alpha[i] = GaussianRational::new(frac(&(&a.re + g)), a.im.clone());
        }
        let n = x.n.iter().zip(n_prime).map(|(a, b)| a + b).collect();
        return Some(TaggedPoint { n, alpha });
    }
    None
}

/// `[n′] · [n + χ]` in the module of points for real χ, or `None` for zero.
pub fn point_product(fan: &StackyFan, chi: &[Rational], n_prime: &[BigInt], n: &[BigInt]) -> Option<Vec<BigInt>> {
    let np: Vec<Rational> = n_prime.iter().map(|a| Rational::from_integer(a.clone())).collect();
    let p: Vec<Rational> = n.iter().zip(chi).map(|(a, c)| Rational::from_integer(a.clone()) + c).collect();
    let together = (0..fan.max_cones().len()).any(|c| {
        [&np, &p].iter().all(|v| fan.coords_in_cone(c, v).is_some_and(|q| !q.iter().any(Signed::is_negative)))
    });
    together.then(|| n.iter().zip(n_prime).map(|(a, b)| a + b).collect())
}

/// The exponent vector attached to a point of `N + χ` in the support:
/// fractional parts of its coordinates in its minimal cone.
pub fn remark_alpha(fan: &StackyFan, point: &[Rational]) -> Option<Vec<Rational>> {
    let support = fan.minimal_cone(point)?;
    let c = fan.common_cone(support.indices())?;
    let q = fan.coords_in_cone(c, point)?;
    let mut alpha = vec![Rational::zero(); fan.num_rays()];
    for (&i, x) in fan.max_cones()[c].iter().zip(&q) {
        alpha[i] = frac(x);
    }
    Some(alpha)
}

/// The image of `[n + β, α]` in `Z[Σ;β_δ]`: the point with coordinates
/// `{Re α_i + δ Im α_i} + p_i`, where `n + β = Σ (α_i + p_i) v_i`.
pub fn delta_image(fan: &StackyFan, delta: &Rational, x: &TaggedPoint) -> (Vec<BigInt>, Vec<Rational>) {
    let mut n = x.n.clone();
    let mut alpha = Vec::with_capacity(x.alpha.len());
    for (i, a) in x.alpha.iter().enumerate() {
        let t = a.real_combination(delta);
        let f = floor(&t);
        for (o, &v) in n.iter_mut().zip(fan.ray(i)) {
            *o -= &f * BigInt::from(v);
        }
        alpha.push(frac(&t));
    }
    (n, alpha)
}

/// Checks exhaustively, up to `max_offset`, that [`delta_image`]
/// intertwines `[n′]·` on the module of pairs with `[n′]·` on the module of
/// points for `β_δ`.
pub fn verify_def2_isomorphism(
    fan: &StackyFan,
    beta: &BetaParameter,
    corr: &DeltaCorrespondence,
    max_offset: i64,
) -> Result<bool> {
    let delta = &corr.delta;
    let beta_delta = &corr.beta_delta;
    let ring: Vec<Vec<BigInt>> = box_of_fan(fan, &BetaParameter::zero(fan.rank()))?
        .iter()
        .flat_map(|e| (0..=max_offset).flat_map(move |o| summand_points(fan, e, o)))
        .map(|p| p.n)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut module = BTreeSet::new();
    for e in box_of_fan(fan, beta)? {
        for o in 0..=max_offset {
            for p in summand_points(fan, &e, o) {
                module.insert(TaggedPoint { n: p.n, alpha: e.alpha.clone() });
            }
        }
    }
    let images: BTreeSet<_> = module.iter().map(|x| delta_image(fan, delta, x)).collect();
    if images.len() != module.len() {
        return Ok(false);
    }
    for np in &ring {
        for x in &module {
            let lhs = module_product(fan, beta, np, x).map(|t| delta_image(fan, delta, &t));
            let (n, _) = delta_image(fan, delta, x);
            let rhs = point_product(fan, beta_delta, np, &n).and_then(|n| {
                let p: Vec<Rational> =
                    n.iter().zip(beta_delta).map(|(a, b)| Rational::from_integer(a.clone()) + b).collect();
                remark_alpha(fan, &p).map(|a| (n, a))
            });
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{correspondence_at, stabilize};
    use crate::exact::rat;
    use crate::fixtures::{f1, f2, square, unimodular};

    fn bigs(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn zero_chi(d: usize) -> Vec<Rational> {
        vec![rat(0, 1); d]
    }

    #[test]
    fn f1_graded_pieces() {
        let spec = ModuleSpec::new(f1(), zero_chi(2));
        assert_eq!(graded_piece(&spec, 0).unwrap().points, vec![bigs(&[0, 0])]);
        assert_eq!(graded_piece(&spec, 1).unwrap().points, vec![bigs(&[1, 0]), bigs(&[1, 1]), bigs(&[1, 2])]);
        let shifted = ModuleSpec::new(f1(), vec![rat(1, 4), rat(0, 1)]);
        assert_eq!(graded_piece(&shifted, 0).unwrap().points, vec![bigs(&[0, 0])]);
    }

    #[test]
    fn graded_piece_counts_match_lattice_points() {
        // degree m slice of the cone over [0,2] has 2m + 1 points
        let spec = ModuleSpec::new(f1(), zero_chi(2));
        for m in 0..6 {
            assert_eq!(graded_piece(&spec, m).unwrap().points.len(), 2 * m as usize + 1);
        }
    }

    #[test]
    fn graded_piece_needs_degree() {
        assert_eq!(graded_piece(&ModuleSpec::new(f2(), zero_chi(2)), 0), Err(Error::UnboundedDegree));
    }

    #[test]
    fn f1_quotient() {
        let f = f1();
        let q = quotient(&ModuleSpec::new(f.clone(), zero_chi(2))).unwrap();
        assert_eq!(q.dim, 2);
        assert_eq!(q.basis[0].n, bigs(&[0, 0]));
        assert_eq!(q.basis[1].offset, 1);
        assert!(q.euler_relations_hold(&f));
        assert!(q.is_nilpotent());
        assert!(q.commute());
    }

    #[test]
    fn f1_shadow_quotient() {
        let f = f1();
        let chi = vec![rat(1, 4), rat(0, 1)];
        let q = quotient(&ModuleSpec::new(f.clone(), chi.clone()).with_shadow(chi)).unwrap();
        assert_eq!(q.dim, 2);
        assert_eq!(q.summands.iter().map(|s| s.dim).collect::<Vec<_>>(), vec![1, 1]);
    }

    #[test]
    fn unimodular_quotient_is_a_point() {
        let f = unimodular(3);
        let q = quotient(&ModuleSpec::new(f, zero_chi(3))).unwrap();
        assert_eq!(q.dim, 1);
        assert!(q.d_mats.iter().all(|m| m.rows() == 1 && m.is_zero()));
    }

    #[test]
    fn f2_quotients() {
        let f = f2();
        for (chi, dims) in [
            (zero_chi(2), vec![3, 1]),
            (vec![rat(0, 1), rat(1, 2)], vec![2, 2]),
            (vec![rat(1, 3), rat(1, 5)], vec![1, 1, 1, 1]),
        ] {
            let q = quotient(&ModuleSpec::new(f.clone(), chi)).unwrap();
            assert_eq!(q.dim, 4);
            let mut got: Vec<usize> = q.summands.iter().map(|s| s.dim).collect();
            got.sort_unstable();
            let mut want = dims;
            want.sort_unstable();
            assert_eq!(got, want);
            assert!(q.euler_relations_hold(&f));
            assert!(q.is_nilpotent());
            assert!(q.commute());
        }
    }

    #[test]
    fn square_quotient_with_shadow() {
        let f = square();
        let chi = vec![rat(0, 1), rat(1, 3), rat(-1, 5)];
        let q = quotient(&ModuleSpec::new(f.clone(), chi.clone()).with_shadow(chi)).unwrap();
        assert_eq!(q.dim, 2);
        assert!(q.euler_relations_hold(&f));
    }

    #[test]
    fn class_of_matches_basis() {
        let f = f2();
        let q = quotient(&ModuleSpec::new(f.clone(), zero_chi(2))).unwrap();
        for (b, el) in q.basis.iter().enumerate() {
            let v = q.class_of(&f, &el.point).unwrap();
            for (i, x) in v.iter().enumerate() {
                assert_eq!(*x, if i == b { rat(1, 1) } else { rat(0, 1) });
            }
        }
    }

    #[test]
    fn def2_products() {
        let f = f1();
        let beta = BetaParameter::real(vec![rat(1, 4), rat(0, 1)]);
        let alpha: Vec<GaussianRational> =
            [rat(1, 4), rat(0, 1), rat(0, 1)].into_iter().map(GaussianRational::real).collect();
        let x = TaggedPoint { n: bigs(&[0, 0]), alpha: alpha.clone() };
        assert_eq!(module_product(&f, &beta, &bigs(&[0, 0]), &x), Some(x.clone()));
        assert_eq!(module_product(&f, &beta, &bigs(&[1, 0]), &x), Some(TaggedPoint { n: bigs(&[1, 0]), alpha }));
        assert_eq!(module_product(&f, &beta, &bigs(&[1, 2]), &x), None);
    }

    #[test]
    fn def1_and_def2_agree_for_real_beta() {
        let f = f2();
        let beta = BetaParameter::real(vec![rat(1, 3), rat(1, 2)]);
        let corr = stabilize(&f, &beta).unwrap();
        assert!(verify_def2_isomorphism(&f, &beta, &corr, 3).unwrap());
    }

    #[test]
    fn def2_isomorphism_complex() {
        let f = f1();
        let beta = BetaParameter::new(vec![
            GaussianRational::new(rat(0, 1), rat(1, 1)),
            GaussianRational::zero(),
        ]);
        let corr = correspondence_at(&f, &beta, &rat(1, 4)).unwrap().unwrap();
        assert!(verify_def2_isomorphism(&f, &beta, &corr, 4).unwrap());

        let g = f2();
        let beta = BetaParameter::new(vec![
            GaussianRational::new(rat(1, 3), rat(1, 7)),
            GaussianRational::real(rat(1, 5)),
        ]);
        let corr = stabilize(&g, &beta).unwrap();
        assert!(verify_def2_isomorphism(&g, &beta, &corr, 4).unwrap());
    }

    #[test]
    fn complex_quotient_tags() {
        let f = f2();
        let beta = BetaParameter::new(vec![
            GaussianRational::new(rat(1, 3), rat(1, 7)),
            GaussianRational::real(rat(1, 5)),
        ]);
        let corr = stabilize(&f, &beta).unwrap();
        let q = quotient_for_beta(&f, &corr, None).unwrap();
        assert_eq!(q.dim, 4);
        for s in &q.summands {
            assert!(box_of_fan(&f, &beta).unwrap().iter().any(|e| e.alpha == s.alpha));
        }
    }

    #[test]
    fn delta_map_breaks_on_real_walls() {
        // Re β on a wall: a product can move a coordinate with negative
        // imaginary part onto real part 0, which the δ side does not see
        let f = f2();
        let beta = BetaParameter::new(vec![GaussianRational::new(rat(0, 1), rat(1, 1)), GaussianRational::zero()]);
        let corr = stabilize(&f, &beta).unwrap();
        assert!(!verify_def2_isomorphism(&f, &beta, &corr, 3).unwrap());
    }

    #[test]
    fn large_imaginary_parts_force_a_smaller_delta() {
        // at δ = 1/16 the Box signature is already stable, but δ·Im α_2 pushes
        // Re α_2 + 1/2 past 1 after multiplying by a twisted ring element
        let f = f2();
        let beta = BetaParameter::new(vec![
            GaussianRational::new(rat(-2, 13), rat(-40, 17)),
            GaussianRational::new(rat(21, 23), rat(3, 1)),
        ]);
        let coarse = correspondence_at(&f, &beta, &rat(1, 16)).unwrap().unwrap();
        assert!(!verify_def2_isomorphism(&f, &beta, &coarse, 3).unwrap());
        let corr = stabilize(&f, &beta).unwrap();
        assert!(corr.delta < rat(1, 16));
        assert!(verify_def2_isomorphism(&f, &beta, &corr, 3).unwrap());
    }
}
