//! Small fans used throughout the tests and materialized by the CLI's
//! `--seed-examples`.

use crate::exact::int;
use crate::fan::StackyFan;
use crate::triangulate::triangulate_from_heights;

/// Rays (1,0), (1,1), (1,2) with maximal cones {1,2} and {2,3}.
pub fn f1() -> StackyFan {
    StackyFan::new(2, vec![vec![1, 0], vec![1, 1], vec![1, 2]], vec![vec![0, 1], vec![1, 2]], Some(vec![1, 0]))
        .expect("static fan")
}

/// The complete fan of the weighted projective stack P(2,1,1).
pub fn f2() -> StackyFan {
    StackyFan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-2, -1]],
        vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        None,
    )
    .expect("static fan")
}

/// Cone over the unit square, triangulated by heights (0,1,1,0).
pub fn square() -> StackyFan {
    let pts = vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1], vec![1, 1, 1]];
    triangulate_from_heights(&pts, &square_heights()).expect("static heights")
}

pub fn square_heights() -> Vec<crate::exact::Rational> {
    [0, 1, 1, 0].iter().map(|&x| int(x)).collect()
}

pub fn f1_heights() -> Vec<crate::exact::Rational> {
    [1, 0, 1].iter().map(|&x| int(x)).collect()
}

/// A single unimodular cone in rank `d`.
pub fn unimodular(d: usize) -> StackyFan {
    let rays = (0..d)
        .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
        .collect();
    StackyFan::new(d, rays, vec![(0..d).collect()], None).expect("static fan")
}
