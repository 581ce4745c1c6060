#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use stacky_gkz::boxes::BetaParameter;
use stacky_gkz::exact::{rat, GaussianRational, Rational};
use stacky_gkz::triangulate::triangulate_from_heights;
use stacky_gkz::StackyFan;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Regular triangulation of a few random points on the hyperplane `x_0 = 1`.
pub fn random_gkz_fan(rng: &mut ChaCha8Rng, rank: usize) -> StackyFan {
    loop {
        let (count, lo, hi) = if rank == 2 { (rng.random_range(3..=5), -3, 3) } else { (rng.random_range(4..=6), -1, 2) };
        let mut pts: Vec<Vec<i64>> = Vec::new();
        while pts.len() < count {
            let mut p = vec![1];
            p.extend((1..rank).map(|_| rng.random_range(lo..=hi)));
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let heights: Vec<Rational> = (0..count).map(|_| rat(rng.random_range(0..1000), 7)).collect();
        if let Ok(fan) = triangulate_from_heights(&pts, &heights) {
            if fan.validate().valid {
                return fan;
            }
        }
    }
}

/// A complete fan in rank 2 with 3 to 5 random primitive rays.
pub fn random_complete_fan(rng: &mut ChaCha8Rng) -> StackyFan {
    loop {
        let k = rng.random_range(3..=5);
        let mut rays: Vec<Vec<i64>> = Vec::new();
        while rays.len() < k {
            let v = vec![rng.random_range(-3..=3), rng.random_range(-3..=3)];
            if gcd_all(&v) == 1 && !rays.contains(&v) {
                rays.push(v);
            }
        }
        let angle = |v: &Vec<i64>| (v[1] as f64).atan2(v[0] as f64);
        rays.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
        let ok = (0..k).all(|i| {
            let (a, b) = (&rays[i], &rays[(i + 1) % k]);
            a[0] * b[1] - a[1] * b[0] > 0
        });
        if !ok {
            continue;
        }
        let cones = (0..k).map(|i| vec![i, (i + 1) % k]).collect();
        let fan = StackyFan::new(2, rays, cones, None).expect("shapes are consistent");
        if fan.validate().valid {
            return fan;
        }
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let q = [13, 17, 19, 23, 29][rng.random_range(0..5)];
    rat(rng.random_range(-40..=40), q)
}

pub fn random_real_beta(rng: &mut ChaCha8Rng, rank: usize) -> BetaParameter {
    BetaParameter::real((0..rank).map(|_| random_rational(rng)).collect())
}

pub fn random_complex_beta(rng: &mut ChaCha8Rng, rank: usize) -> BetaParameter {
    BetaParameter::new((0..rank).map(|_| GaussianRational::new(random_rational(rng), random_rational(rng))).collect())
}

/// Box elements of a real parameter by scanning the lattice points of a
/// bounding box of each cone's half-open parallelepiped, independent of
/// Smith normal forms.
pub fn brute_force_box(fan: &StackyFan, beta: &[Rational]) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for (c, idx) in fan.max_cones().iter().enumerate() {
        let d = fan.rank();
        let ranges: Vec<(BigInt, BigInt)> = (0..d)
            .map(|r| {
                let lo: i64 = idx.iter().map(|&i| fan.ray(i)[r].min(0)).sum();
                let hi: i64 = idx.iter().map(|&i| fan.ray(i)[r].max(0)).sum();
                ((rat(lo, 1) - &beta[r]).ceil().to_integer(), (rat(hi, 1) - &beta[r]).floor().to_integer())
            })
            .collect();
        let mut n: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
        if ranges.iter().any(|(a, b)| a > b) {
            continue;
        }
        loop {
            let p: Vec<Rational> = n.iter().zip(beta).map(|(x, b)| Rational::from_integer(x.clone()) + b).collect();
            if let Some(t) = fan.coords_in_cone(c, &p) {
                if t.iter().all(|x| *x >= rat(0, 1) && *x < rat(1, 1)) {
                    let mut alpha = vec![rat(0, 1); fan.num_rays()];
                    for (&i, x) in idx.iter().zip(t) {
                        alpha[i] = x;
                    }
                    if !out.contains(&alpha) {
                        out.push(alpha);
                    }
                }
            }
            let mut r = 0;
            while r < d && n[r] == ranges[r].1 {
                n[r] = ranges[r].0.clone();
                r += 1;
            }
            if r == d {
                break;
            }
            n[r] += 1;
        }
    }
    out.sort();
    out
}

#[derive(Deserialize)]
pub struct GoldenJets {
    pub order: usize,
    pub jets: Vec<GoldenJet>,
}

#[derive(Deserialize)]
pub struct GoldenJet {
    pub l: String,
    pub coefficients: Vec<String>,
}

pub fn golden_jets() -> GoldenJets {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/rgamma_jets.json");
    serde_json::from_str(&std::fs::read_to_string(path).expect("golden data present")).expect("golden data parses")
}

/// Largest relative deviation of a jet from its golden value; zero golden
/// coefficients are compared against the largest golden coefficient.
pub fn jet_deviation(got: &[Complex64], want: &[f64]) -> f64 {
    let scale = want.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    got.iter()
        .zip(want)
        .map(|(g, &w)| (g - w).norm() / if w == 0.0 { scale } else { w.abs() })
        .fold(0.0, f64::max)
}

pub fn parse_l(s: &str) -> f64 {
    let r = stacky_gkz::exact::parse_rational(s).expect("rational l");
    stacky_gkz::exact::to_f64(&r)
}
