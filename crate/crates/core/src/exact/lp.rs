//! Exact feasibility of `{x >= 0 : A x = b}` by phase-one simplex with
//! Bland's rule. Used to decide whether two simplicial cones meet in a
//! common face.

use num_traits::{Signed, Zero};

use super::{RatMatrix, Rational};

pub fn feasible(a: &RatMatrix, b: &[Rational]) -> bool {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m);
    if m == 0 {
        return true;
    }
    let width = n + m + 1;
    let rhs = n + m;
    let mut t = RatMatrix::zeros(m + 1, width);
    for i in 0..m {
        let sign = if b[i].is_negative() { -Rational::from_integer(1.into()) } else { Rational::from_integer(1.into()) };
        for j in 0..n {
            t[(i, j)] = &a[(i, j)] * &sign;
        }
        t[(i, n + i)] = Rational::from_integer(1.into());
        t[(i, rhs)] = &b[i] * &sign;
    }
    // objective row: minimize the sum of artificials, expressed in nonbasics
    for j in 0..n {
        let s: Rational = (0..m).map(|i| t[(i, j)].clone()).sum();
        t[(m, j)] = -s;
    }
    let s: Rational = (0..m).map(|i| t[(i, rhs)].clone()).sum();
    t[(m, rhs)] = -s;
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        let Some(enter) = (0..n + m).find(|&j| t[(m, j)].is_negative()) else { break };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[(i, enter)] > Rational::zero() {
                let ratio = &t[(i, rhs)] / &t[(i, enter)];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // phase one is bounded below by zero, so a leaving row always exists
        let Some((row, _)) = leave else { break };
        let piv = t[(row, enter)].clone();
        for j in 0..width {
            let v = &t[(row, j)] / &piv;
            t[(row, j)] = v;
        }
        for i in 0..=m {
            if i == row || t[(i, enter)].is_zero() {
                continue;
            }
            let f = t[(i, enter)].clone();
            for j in 0..width {
                if t[(row, j)].is_zero() {
                    continue;
                }
                let v = &t[(row, j)] * &f;
                t[(i, j)] -= v;
            }
        }
        basis[row] = enter;
    }
    t[(m, rhs)].is_zero()
}
