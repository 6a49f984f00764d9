//! Exact lattice-hull membership by Fourier–Motzkin elimination.
//!
//! `v` lies in the real hull of `S` iff the strict system `(s - v) . x > 0`
//! (one row per `s`) has no solution. Rows are integer vectors; scaling a row
//! by a positive number does not change the system, so every intermediate row
//! is divided by its content and the arithmetic stays exact without fractions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, Signed, Zero};

use crate::error::{usage, Result};
use crate::group::{Element, GroupSpec, Shape};

/// Whether `v` lies in `conv(S)`. Only lattice groups.
pub fn hull_membership_lattice(v: &Element, s: &Shape) -> Result<bool> {
    let GroupSpec::Lattice(d) = s.group else {
        return usage("hull membership needs a lattice group");
    };
    if s.is_empty() {
        return usage("hull membership against an empty set");
    }
    s.group.check(v)?;
    let pts: Vec<Vec<i64>> = s.iter().map(|g| g.coords().to_vec()).collect();
    debug_assert!(pts.iter().all(|p| p.len() == d as usize));
    Ok(HullTester::new(&pts).contains(v.coords()))
}

/// Strict feasibility of `A x > 0` over the rationals. `None` on overflow.
fn strictly_feasible<T>(mut rows: Vec<Vec<T>>) -> Option<bool>
where
    T: Clone + Ord + Integer + Signed + CheckedAdd + CheckedMul,
{
    loop {
        if rows.iter().any(|r| r.iter().all(Zero::is_zero)) {
            return Some(false);
        }
        let width = match rows.first() {
            None => return Some(true),
            Some(r) => r.len(),
        };
        if width == 0 {
            return Some(rows.is_empty());
        }
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next = Vec::new();
        for r in rows {
            if r[0].is_positive() {
                pos.push(r);
            } else if r[0].is_negative() {
                neg.push(r);
            } else {
                next.push(r[1..].to_vec());
            }
        }
        for p in &pos {
            for n in &neg {
                let pc = &p[0];
                let nc = n[0].abs();
                let mut row = Vec::with_capacity(width - 1);
                for j in 1..width {
                    let a = p[j].checked_mul(&nc)?;
                    let b = n[j].checked_mul(pc)?;
                    row.push(a.checked_add(&b)?);
                }
                next.push(row);
            }
        }
        for r in &mut next {
            let g = r.iter().fold(T::zero(), |g, x| g.gcd(x));
            if !g.is_zero() && !g.is_one() {
                for x in r.iter_mut() {
                    *x = x.div_floor(&g);
                }
            }
        }
        next.sort();
        next.dedup();
        rows = next;
    }
}

fn feasible_exact(rows: &[Vec<i64>]) -> bool {
    let small: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    if let Some(ans) = strictly_feasible(small) {
        return ans;
    }
    let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    strictly_feasible(big).expect("bigint arithmetic cannot overflow")
}

fn cross(o: &[i64], a: &[i64], b: &[i64]) -> i128 {
    let (ax, ay) = ((a[0] - o[0]) as i128, (a[1] - o[1]) as i128);
    let (bx, by) = ((b[0] - o[0]) as i128, (b[1] - o[1]) as i128);
    ax * by - ay * bx
}

/// Extreme points of a planar point set (monotone chain). Dropping interior
/// points leaves the hull, and hence every elimination result, unchanged.
fn planar_vertices(pts: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut p: Vec<Vec<i64>> = pts.to_vec();
    p.sort();
    p.dedup();
    if p.len() <= 2 {
        return p;
    }
    let mut hull: Vec<Vec<i64>> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec<i64>>> =
            if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for q in iter {
            while hull.len() >= start + 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], q) <= 0 {
                hull.pop();
            }
            hull.push(q.clone());
        }
        hull.pop();
    }
    hull
}

/// Membership tester against a fixed point set.
pub(crate) struct HullTester {
    verts: Vec<Vec<i64>>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl HullTester {
    pub(crate) fn new(pts: &[Vec<i64>]) -> HullTester {
        assert!(!pts.is_empty());
        let d = pts[0].len();
        let lo = (0..d).map(|i| pts.iter().map(|p| p[i]).min().unwrap()).collect();
        let hi = (0..d).map(|i| pts.iter().map(|p| p[i]).max().unwrap()).collect();
        let verts = if d == 2 {
            planar_vertices(pts)
        } else {
            let mut v = pts.to_vec();
            v.sort();
            v.dedup();
            v
        };
        HullTester { verts, lo, hi }
    }

    pub(crate) fn contains(&self, v: &[i64]) -> bool {
        if v.iter().zip(&self.lo).any(|(x, l)| x < l) || v.iter().zip(&self.hi).any(|(x, h)| x > h) {
            return false;
        }
        let rows: Vec<Vec<i64>> = self.verts.iter().map(|s| s.iter().zip(v).map(|(a, b)| a - b).collect()).collect();
        !feasible_exact(&rows)
    }

    /// All lattice points of the hull, in lexicographic order.
    pub(crate) fn lattice_points(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut cur = self.lo.clone();
        loop {
            if self.contains(&cur) {
                out.push(cur.clone());
            }
            // odometer, last coordinate fastest
            let mut i = cur.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < self.hi[i] {
                    cur[i] += 1;
                    for j in i + 1..cur.len() {
                        cur[j] = self.lo[j];
                    }
                    break;
                }
            }
        }
    }
}
