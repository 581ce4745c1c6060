//! Taylor jets of `ε ↦ 1/Γ(l + 1 + ε)` for complex `l`.

use num_complex::Complex64;

/// B_2, B_4, ..., B_20
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Below this modulus arguments are pushed up by the recurrence before the
/// asymptotic series is used.
const ASYMPTOTIC_RADIUS: f64 = 20.0;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Truncated product of two jets.
pub fn jet_mul(a: &[Complex64], b: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); order];
    for (i, x) in a.iter().enumerate().take(order) {
        for (j, y) in b.iter().enumerate().take(order - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `exp` of a jet.
pub fn jet_exp(a: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); order];
    if order == 0 {
        return out;
    }
    out[0] = a.first().copied().unwrap_or_default().exp();
    for n in 1..order {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            if let Some(ak) = a.get(k) {
                s += *ak * k as f64 * out[n - k];
            }
        }
        out[n] = s / n as f64;
    }
    out
}

/// Steps needed to move `w` into the asymptotic region.
fn recurrence_steps(w: Complex64) -> usize {
    let mut m = 0;
    while (w + m as f64).norm() < ASYMPTOTIC_RADIUS {
        m += 1;
    }
    m
}

/// `ln Γ(w)` up to a multiple of 2πi, for `Re w > 0`.
pub fn ln_gamma(w: Complex64) -> Complex64 {
    let m = recurrence_steps(w);
    let mut shift = Complex64::new(0.0, 0.0);
    for j in 0..m {
        shift += (w + j as f64).ln();
    }
    let z = w + m as f64;
    let mut s = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln();
    let zinv = z.inv();
    let z2 = zinv * zinv;
    let mut p = zinv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        s += b / (2.0 * k * (2.0 * k - 1.0)) * p;
        p *= z2;
    }
    s - shift
}

/// Polygamma `ψ^{(n)}(w)` for `Re w > 0`.
pub fn polygamma(n: usize, w: Complex64) -> Complex64 {
    let m = recurrence_steps(w);
    let z = w + m as f64;
    let zinv = z.inv();
    let z2 = zinv * zinv;
    let mut s;
    if n == 0 {
        s = z.ln() - 0.5 * zinv;
        let mut p = z2;
        for (k, b) in BERNOULLI.iter().enumerate() {
            let k = (k + 1) as f64;
            s -= b / (2.0 * k) * p;
            p *= z2;
        }
    } else {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let zn = zinv.powu(n as u32);
        s = factorial(n - 1) * zn + factorial(n) * 0.5 * zn * zinv;
        let mut p = zn * z2;
        for (k, b) in BERNOULLI.iter().enumerate() {
            let k = k + 1;
            s += b * factorial(2 * k + n - 1) / factorial(2 * k) * p;
            p *= z2;
        }
        s *= sign;
    }
    // ψ^{(n)}(w) = ψ^{(n)}(w + m) − Σ_j (−1)^n n! (w + j)^{−n−1}
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    for j in 0..m {
        s -= sign * factorial(n) * (w + j as f64).inv().powu(n as u32 + 1);
    }
    s
}

/// Coefficients `c_0 .. c_{order-1}` of `1/Γ(l + 1 + ε)` at `ε = 0`.
pub fn reciprocal_gamma_jet(l: Complex64, order: usize) -> Vec<Complex64> {
    let z = l + 1.0;
    let m0 = (1.5 - z.re).ceil().max(0.0) as usize;
    let w = z + m0 as f64;
    // −ln Γ(w + ε) = −ln Γ(w) − Σ_{n≥1} ψ^{(n−1)}(w) ε^n / n!
    let mut log_jet = vec![-ln_gamma(w)];
    for n in 1..order {
        log_jet.push(-polygamma(n - 1, w) / factorial(n));
    }
    let mut jet = jet_exp(&log_jet, order);
    // 1/Γ(z + ε) = Π_{j<m0} (z + j + ε) / Γ(w + ε)
    for j in 0..m0 {
        jet = jet_mul(&jet, &[z + j as f64, Complex64::new(1.0, 0.0)], order);
    }
    jet
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn small_jets() {
        let j = reciprocal_gamma_jet(c(0.0), 2);
        assert!((j[0] - 1.0).norm() < 1e-14);
        assert!((j[1] - EULER_GAMMA).norm() < 1e-13);
        let j = reciprocal_gamma_jet(c(-1.0), 2);
        assert_eq!(j[0], c(0.0));
        assert!((j[1] - 1.0).norm() < 1e-13);
        let j = reciprocal_gamma_jet(c(-2.0), 3);
        assert_eq!(j[0], c(0.0));
        assert!((j[1] + 1.0).norm() < 1e-13);
    }

    #[test]
    fn ln_gamma_values() {
        assert!((ln_gamma(c(5.0)) - c(24f64.ln())).norm() < 1e-13);
        assert!((ln_gamma(c(0.5)) - c(std::f64::consts::PI.sqrt().ln())).norm() < 1e-13);
        // Γ(1+i) = i Γ(i); |Γ(i)|^2 = π / sinh π
        let g = ln_gamma(Complex64::new(1.0, 1.0)).exp();
        let want = (std::f64::consts::PI / std::f64::consts::PI.sinh()).sqrt();
        assert!((g.norm() - want).abs() < 1e-13);
    }

    #[test]
    fn polygamma_recurrence() {
        let w = Complex64::new(1.7, -0.4);
        for n in 0..6 {
            let lhs = polygamma(n, w + 1.0) - polygamma(n, w);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = sign * factorial(n) * w.inv().powu(n as u32 + 1);
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0), "n = {n}");
        }
        assert!((polygamma(0, c(1.0)) + EULER_GAMMA).norm() < 1e-14);
        assert!((polygamma(1, c(1.0)) - std::f64::consts::PI.powi(2) / 6.0).norm() < 1e-13);
    }

    #[test]
    fn jet_exp_of_linear() {
        let e = jet_exp(&[c(0.0), c(2.0)], 5);
        for (n, x) in e.iter().enumerate() {
            assert!((x - 2f64.powi(n as i32) / factorial(n)).norm() < 1e-14);
        }
    }

    #[test]
    fn functional_equation_on_jets() {
        // 1/Γ(l + ε) = (l + ε) / Γ(l + 1 + ε)
        for l in [0.3, -2.75, 4.0, -6.0] {
            let a = reciprocal_gamma_jet(c(l - 1.0), 6);
            let b = jet_mul(&reciprocal_gamma_jet(c(l), 6), &[c(l), c(1.0)], 6);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-12 * y.norm().max(1.0));
            }
        }
    }
}
