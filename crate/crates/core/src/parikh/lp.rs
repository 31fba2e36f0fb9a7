//! Exact convex-hull membership by linear programming over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Whether `p` is a convex combination of `points`. Solves the phase-one
/// problem of the simplex method with Bland's rule, in exact arithmetic.
pub(crate) fn in_convex_hull(p: &[BigInt], points: &[&[BigInt]]) -> bool {
    if points.is_empty() {
        return false;
    }
    let d = p.len();
    let rows = d + 1;
    let n = points.len();
    let cols = n + rows;
    // tableau rows: [A | I | b], last row: reduced costs
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(rows + 1);
    for i in 0..rows {
        let mut row = vec![BigRational::zero(); cols + 1];
        for (j, q) in points.iter().enumerate() {
            row[j] = if i < d {
                BigRational::from_integer(q[i].clone())
            } else {
                BigRational::one()
            };
        }
        row[n + i] = BigRational::one();
        row[cols] = if i < d {
            BigRational::from_integer(p[i].clone())
        } else {
            BigRational::one()
        };
        t.push(row);
    }
    // minimise the sum of artificials: cost row = −(sum of constraint rows)
    let mut cost = vec![BigRational::zero(); cols + 1];
    for row in &t {
        for j in 0..=cols {
            if j < n || j == cols {
                cost[j] -= &row[j];
            }
        }
    }
    t.push(cost);
    let mut basis: Vec<usize> = (n..cols).collect();

    loop {
        let obj = &t[rows];
        let Some(enter) = (0..cols).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..rows {
            let a = &t[i][enter];
            if a.is_positive() {
                let ratio = &t[i][cols] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            // unbounded cannot happen: the objective is bounded below by 0
            unreachable!("phase-one objective is bounded");
        };
        let pivot = t[r][enter].clone();
        for x in t[r].iter_mut() {
            *x /= &pivot;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        basis[r] = enter;
    }
    t[rows][cols].is_zero()
}

/// Extreme points of a finite point set, sorted and deduplicated.
pub(crate) fn extreme_points(mut pts: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    // Lexicographic extremes of any linear order are vertices; keep them
    // without a solve.
    let last = pts.len() - 1;
    (0..pts.len())
        .filter(|&i| {
            if i == 0 || i == last {
                return true;
            }
            let others: Vec<&[BigInt]> = pts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| q.as_slice())
                .collect();
            !in_convex_hull(&pts[i], &others)
        })
        .map(|i| pts[i].clone())
        .collect()
}
