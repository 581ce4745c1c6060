//! Box sets `Bx(σ;β)`, `Bx(Σ;β)` and `Box(Σ;β)` for a complex parameter,
//! delta-stabilization of a complex parameter to a real one, and collision
//! classes of per-cone Box elements.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{
    floor, frac, int, is_integer, solve_simplicial_coords, GaussianRational, IntMatrix, RatMatrix, Rational,
};
use crate::fan::{ConeRef, StackyFan};

/// First trial delta and the number of halvings before giving up.
pub const DELTA_START: (i64, i64) = (1, 16);
pub const DELTA_MAX_HALVINGS: u32 = 40;

/// A point β of N ⊗ C with Gaussian-rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BetaParameter {
    pub coords: Vec<GaussianRational>,
}

impl BetaParameter {
    pub fn new(coords: Vec<GaussianRational>) -> Self {
        Self { coords }
    }

    pub fn real(coords: Vec<Rational>) -> Self {
        Self { coords: coords.into_iter().map(GaussianRational::real).collect() }
    }

    pub fn zero(d: usize) -> Self {
        Self { coords: vec![GaussianRational::zero(); d] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_real(&self) -> bool {
        self.coords.iter().all(GaussianRational::is_real)
    }

    pub fn real_part(&self) -> Vec<Rational> {
        self.coords.iter().map(|z| z.re.clone()).collect()
    }

    /// β_δ = Re β + δ Im β
    pub fn at_delta(&self, delta: &Rational) -> Vec<Rational> {
        self.coords.iter().map(|z| z.real_combination(delta)).collect()
    }
}

/// One element α of `Bx(Σ;β)` with its lattice point `n`
/// (`Σ α_i v_i = n + β`), its support cone and the maximal cones containing
/// that support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxElement {
    pub alpha: Vec<GaussianRational>,
    pub n: Vec<BigInt>,
    pub support: ConeRef,
    pub witness_cones: Vec<usize>,
}

impl BoxElement {
    /// `n + β`, equal to `Σ α_i v_i`.
    pub fn point(&self, beta: &BetaParameter) -> Vec<GaussianRational> {
        self.n
            .iter()
            .zip(&beta.coords)
            .map(|(n, b)| &GaussianRational::real(Rational::from_integer(n.clone())) + b)
            .collect()
    }

    /// Real parts of the exponents; only meaningful for real β.
    pub fn alpha_real(&self) -> Vec<Rational> {
        self.alpha.iter().map(|a| a.re.clone()).collect()
    }
}

pub fn alpha_support(alpha: &[GaussianRational]) -> ConeRef {
    ConeRef(alpha.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(i, _)| i).collect())
}

/// Representatives of Z^d modulo the lattice spanned by the columns of `g`,
/// read off from the Smith normal form `U g V = S`.
fn coset_representatives(g: &IntMatrix) -> Vec<Vec<BigInt>> {
    let d = g.rows();
    let (s, u, _) = g.smith_normal_form();
    let u_inv = RatMatrix::from_int(&u).inverse().expect("unimodular");
    let diag = s.diagonal();
    let mut reps = Vec::new();
    let mut t = vec![BigInt::zero(); d];
    loop {
        let tr: Vec<Rational> = t.iter().map(|x| Rational::from_integer(x.clone())).collect();
        reps.push(u_inv.mul_vec(&tr).into_iter().map(|x| x.to_integer()).collect());
        // odometer over the box 0 <= t_i < s_i
        let mut i = 0;
        loop {
            if i == d {
                return reps;
            }
            t[i] += 1;
            if t[i] < diag[i] {
                break;
            }
            t[i] = BigInt::zero();
            i += 1;
        }
    }
}

/// `Bx(σ;β)` for a full-dimensional maximal cone, as k-vectors, sorted.
pub fn box_of_cone(fan: &StackyFan, cone: usize, beta: &BetaParameter) -> Result<Vec<BoxElement>> {
    let d = fan.rank();
    if beta.dim() != d {
        return Err(Error::DimensionMismatch(format!("beta has {} coordinates, fan rank is {d}", beta.dim())));
    }
    let idx = &fan.max_cones()[cone];
    if idx.len() != d {
        return Err(Error::NotFullDimensional { cone });
    }
    let gens: Vec<Vec<i64>> = idx.iter().map(|&i| fan.ray(i).to_vec()).collect();
    let g = IntMatrix::from_columns(&gens);
    let mut out = Vec::new();
    for r in coset_representatives(&g) {
        let target: Vec<GaussianRational> = r
            .iter()
            .zip(&beta.coords)
            .map(|(ri, b)| &GaussianRational::real(Rational::from_integer(ri.clone())) + b)
            .collect();
        let c = solve_simplicial_coords(&gens, &target)?;
        let shifts: Vec<BigInt> = c.iter().map(|z| floor(&z.re)).collect();
        let mut alpha = vec![GaussianRational::zero(); fan.num_rays()];
        for (j, &i) in idx.iter().enumerate() {
            alpha[i] = GaussianRational::new(&c[j].re - Rational::from_integer(shifts[j].clone()), c[j].im.clone());
        }
        let n: Vec<BigInt> = (0..d)
            .map(|row| {
                let gs: BigInt = gens.iter().zip(&shifts).map(|(v, s)| BigInt::from(v[row]) * s).sum();
                &r[row] - gs
            })
            .collect();
        let support = alpha_support(&alpha);
        let witness_cones = fan.witness_cones(support.indices());
        out.push(BoxElement { alpha, n, support, witness_cones });
    }
    out.sort_by(|a, b| a.alpha.cmp(&b.alpha));
    Ok(out)
}

/// `Bx(Σ;β)`: the union over maximal cones, deduplicated by exact equality
/// of exponent vectors, sorted lexicographically.
pub fn box_of_fan(fan: &StackyFan, beta: &BetaParameter) -> Result<Vec<BoxElement>> {
    let mut merged: BTreeMap<Vec<GaussianRational>, BoxElement> = BTreeMap::new();
    for c in 0..fan.max_cones().len() {
        for mut e in box_of_cone(fan, c, beta)? {
            match merged.get_mut(&e.alpha) {
                Some(existing) => {
                    if !existing.witness_cones.contains(&c) {
                        existing.witness_cones.push(c);
                    }
                }
                None => {
                    e.witness_cones = vec![c];
                    merged.insert(e.alpha.clone(), e);
                }
            }
        }
    }
    let mut out: Vec<BoxElement> = merged.into_values().collect();
    for e in &mut out {
        e.witness_cones.sort_unstable();
    }
    Ok(out)
}

/// `Box(Σ;β)` for real β: the points `Σ α_i v_i`.
pub fn box_points(fan: &StackyFan, beta: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    let b = BetaParameter::real(beta.to_vec());
    Ok(box_of_fan(fan, &b)?
        .iter()
        .map(|e| e.point(&b).into_iter().map(|z| z.re).collect())
        .collect())
}

/// One entry `α ↔ α_δ ↔ c(α_δ)` of the delta correspondence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub alpha: Vec<GaussianRational>,
    pub alpha_delta: Vec<Rational>,
    /// `c(α_δ) = Σ (α_δ)_i v_i = n_δ + β_δ`
    pub point: Vec<Rational>,
    pub lattice_point: Vec<BigInt>,
    pub support: ConeRef,
    pub witness_cones: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaCorrespondence {
    pub delta: Rational,
    pub beta: BetaParameter,
    pub beta_delta: Vec<Rational>,
    /// in the order of `Bx(Σ;β)` as returned by [`box_of_fan`]
    pub triples: Vec<Triple>,
}

impl DeltaCorrespondence {
    /// The real Box elements `α_δ` in triple order.
    pub fn real_elements(&self) -> Vec<BoxElement> {
        self.triples
            .iter()
            .map(|t| BoxElement {
                alpha: t.alpha_delta.iter().cloned().map(GaussianRational::real).collect(),
                n: t.lattice_point.clone(),
                support: t.support.clone(),
                witness_cones: t.witness_cones.clone(),
            })
            .collect()
    }

    pub fn position_of_real(&self, alpha_delta: &[Rational]) -> Option<usize> {
        self.triples.iter().position(|t| t.alpha_delta == alpha_delta)
    }
}

/// Combinatorial fingerprint of the correspondence at one delta.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Level {
    triples: Vec<Triple>,
    signature: Vec<(ConeRef, Vec<BigInt>, Vec<usize>)>,
}

fn level(fan: &StackyFan, complex: &[BoxElement], beta: &BetaParameter, delta: &Rational) -> Result<Option<Level>> {
    let beta_delta = beta.at_delta(delta);
    let real = box_of_fan(fan, &BetaParameter::real(beta_delta.clone()))?;
    if real.len() != complex.len() {
        return Ok(None);
    }
    let mut used = vec![false; real.len()];
    let mut triples = Vec::with_capacity(complex.len());
    let mut signature = Vec::with_capacity(complex.len());
    for e in complex {
        let combos: Vec<Rational> = e.alpha.iter().map(|a| a.real_combination(delta)).collect();
        let floors: Vec<BigInt> = combos.iter().map(floor).collect();
        let alpha_delta: Vec<Rational> = combos.iter().map(frac).collect();
        let key: Vec<GaussianRational> = alpha_delta.iter().cloned().map(GaussianRational::real).collect();
        let Some(pos) = real.iter().position(|r| r.alpha == key) else { return Ok(None) };
        if std::mem::replace(&mut used[pos], true) {
            return Ok(None);
        }
        let r = &real[pos];
        if r.support != e.support {
            return Ok(None);
        }
        let point: Vec<Rational> = r
            .n
            .iter()
            .zip(&beta_delta)
            .map(|(n, b)| Rational::from_integer(n.clone()) + b)
            .collect();
        if fan.minimal_cone(&point).as_ref() != Some(&e.support) {
            return Ok(None);
        }
        signature.push((r.support.clone(), floors, r.witness_cones.clone()));
        triples.push(Triple {
            alpha: e.alpha.clone(),
            alpha_delta,
            point,
            lattice_point: r.n.clone(),
            support: r.support.clone(),
            witness_cones: r.witness_cones.clone(),
        });
    }
    Ok(Some(Level { triples, signature }))
}

/// Finds δ > 0 for which the correspondence `Bx(Σ;β) → Bx(Σ;β_δ)` is a
/// support-preserving bijection whose combinatorics agree with those at δ/2.
pub fn stabilize(fan: &StackyFan, beta: &BetaParameter) -> Result<DeltaCorrespondence> {
    let complex = box_of_fan(fan, beta)?;
    let mut delta = Rational::new(BigInt::from(DELTA_START.0), BigInt::from(DELTA_START.1));
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let bound = product_bound(fan, &complex)?;
    let mut previous: Option<(Rational, Level)> = None;
    for _ in 0..=DELTA_MAX_HALVINGS {
        let current = match &bound {
            Some(b) if delta >= *b => None,
            _ => level(fan, &complex, beta, &delta)?,
        };
        if let (Some((prev_delta, prev)), Some(cur)) = (&previous, &current) {
            if prev.signature == cur.signature {
                return Ok(DeltaCorrespondence {
                    delta: prev_delta.clone(),
                    beta: beta.clone(),
                    beta_delta: beta.at_delta(prev_delta),
                    triples: prev.triples.clone(),
                });
            }
        }
        previous = current.map(|l| (delta.clone(), l));
        delta = &delta * &half;
    }
    Err(Error::NoStabilization { halvings: DELTA_MAX_HALVINGS })
}

/// Strict upper bound on δ below which `floor(Re α_i + δ Im α_i)` is unchanged
/// when `Re α_i` is shifted by the fractional coordinates of any untwisted Box
/// element of a cone containing the support of α. Without it the δ-map fails
/// to commute with multiplication by twisted ring elements. Constraints that no
/// δ > 0 can meet (α on a real wall) are left out.
fn product_bound(fan: &StackyFan, complex: &[BoxElement]) -> Result<Option<Rational>> {
    let zero = BetaParameter::zero(fan.rank());
    let mut untwisted = Vec::with_capacity(fan.max_cones().len());
    for c in 0..fan.max_cones().len() {
        untwisted.push(box_of_cone(fan, c, &zero)?);
    }
    let mut bound: Option<Rational> = None;
    let mut tighten = |b: Rational| {
        if bound.as_ref().map_or(true, |x| b < *x) {
            bound = Some(b);
        }
    };
    for e in complex {
        for (c, idx) in fan.max_cones().iter().enumerate() {
            if !e.support.0.iter().all(|i| idx.contains(i)) {
                continue;
            }
            for g in &untwisted[c] {
                for &i in idx {
                    let a = &e.alpha[i];
                    if a.im.is_zero() {
                        continue;
                    }
                    let r = a.re.clone();
                    let f = frac(&(&r + &g.alpha[i].re));
                    if a.im > Rational::zero() {
                        tighten((Rational::one() - &f) / &a.im);
                        tighten((Rational::one() - &r) / &a.im);
                    } else {
                        let m = -a.im.clone();
                        match (r.is_zero(), f.is_zero()) {
                            (false, false) => {
                                tighten(&f / &m);
                                tighten(&r / &m);
                            }
                            (true, true) => tighten(Rational::one() / &m),
                            _ => {}
                        }
                    }
                }
            }
        }
    }
    Ok(bound)
}

/// The correspondence at a caller-chosen δ, if it is a support-preserving
/// bijection there (no halving certificate).
pub fn correspondence_at(fan: &StackyFan, beta: &BetaParameter, delta: &Rational) -> Result<Option<DeltaCorrespondence>> {
    let complex = box_of_fan(fan, beta)?;
    Ok(level(fan, &complex, beta, delta)?.map(|l| DeltaCorrespondence {
        delta: delta.clone(),
        beta: beta.clone(),
        beta_delta: beta.at_delta(delta),
        triples: l.triples,
    }))
}

/// A Box element of one particular maximal cone, before deduplication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeElement {
    /// 0-based maximal cone index
    pub cone: usize,
    /// position within `box_of_cone(cone)`
    pub local: usize,
    #[serde(skip)]
    pub alpha: Vec<GaussianRational>,
}

/// Per-cone Box elements that define the same spectrum point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionClass {
    pub alpha: Vec<GaussianRational>,
    pub members: Vec<ConeElement>,
}

/// α and α′ give the same point `y = e^{2πiα}` iff `α − α′ ∈ Z^k`.
pub fn same_spectrum_point(a: &[GaussianRational], b: &[GaussianRational]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| is_integer(&(&x.re - &y.re)) && x.im == y.im)
}

/// Partition of the per-cone Box elements into classes with equal spectrum
/// points, ordered by exponent vector.
pub fn collisions(fan: &StackyFan, beta: &BetaParameter) -> Result<Vec<CollisionClass>> {
    let mut classes: Vec<CollisionClass> = Vec::new();
    for c in 0..fan.max_cones().len() {
        for (local, e) in box_of_cone(fan, c, beta)?.into_iter().enumerate() {
            let member = ConeElement { cone: c, local, alpha: e.alpha.clone() };
            match classes.iter_mut().find(|k| same_spectrum_point(&k.alpha, &e.alpha)) {
                Some(k) => k.members.push(member),
                None => classes.push(CollisionClass { alpha: e.alpha, members: vec![member] }),
            }
        }
    }
    classes.sort_by(|a, b| a.alpha.cmp(&b.alpha));
    Ok(classes)
}

/// Exact check that `Σ α_i v_i = n + β`.
pub fn reconstructs(fan: &StackyFan, e: &BoxElement, beta: &BetaParameter) -> bool {
    let d = fan.rank();
    (0..d).all(|row| {
        let mut acc = GaussianRational::zero();
        for (i, a) in e.alpha.iter().enumerate() {
            acc = &acc + &a.scale(&int(fan.ray(i)[row]));
        }
        acc == e.point(beta)[row]
    })
}
