#![allow(dead_code)]
//! Fixtures and independent oracles shared by the integration tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use tep_core::group::{lattice_disc, parse_free_word};
use tep_core::tep::{is_locally_legal, sample_tep, Alphabet, Corners, Pattern, Rule, Symbol, TepFamily};
use tep_core::{ConvexGeometry, Element, GroupSpec, Shape};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pt(x: i64, y: i64) -> Element {
    Element::lattice(&[x, y])
}

pub fn word(s: &str) -> Element {
    parse_free_word(s).unwrap()
}

pub fn triangle() -> Shape {
    Shape::lattice(&[&[1, 0], &[0, 1], &[1, 1]])
}

/// Row of three with the right end dropped one step.
pub fn s_prime() -> Shape {
    Shape::lattice(&[&[0, 0], &[1, 0], &[2, -1], &[2, 0]])
}

pub fn disc61() -> Shape {
    lattice_disc(19)
}

/// A recorded random anti-shelling of the 61-cell disc.
pub const DISC_ORDER: [[i64; 2]; 61] = [
    [1, 3], [-3, 0], [-2, 1], [-4, 0], [-4, -1], [-1, 2], [-3, 1], [0, 2], [-4, 1], [-2, 2], [0, 3], [1, 4],
    [-1, 3], [0, 4], [-1, 1], [-3, 2], [-2, 0], [1, 2], [-3, -1], [0, 1], [-2, 3], [-3, 3], [2, 3], [2, 2],
    [-1, 4], [3, 3], [-1, 0], [1, 1], [-2, -1], [-3, -2], [0, 0], [-1, -1], [3, 2], [2, 1], [1, 0], [-2, -2],
    [3, 1], [0, -1], [-3, -3], [2, 0], [-1, -2], [-2, -3], [1, -1], [4, 1], [3, 0], [0, -2], [2, -1], [4, 0],
    [3, -1], [1, -2], [2, -2], [4, -1], [-1, -3], [0, -3], [-1, -4], [1, -3], [0, -4], [3, -2], [2, -3], [1, -4],
    [3, -3],
];

pub fn ledrappier() -> TepFamily {
    TepFamily::sum_zero(triangle(), 2).unwrap()
}

/// S3 with 0 = id, 1 = (123), 2 = (132), 3 = (12), 4 = (23), 5 = (13), and
/// `(p ∘ q)(n) = p(q(n))`.
pub fn s3_table() -> Vec<Vec<Symbol>> {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]];
    let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap() as Symbol;
    (0..6)
        .map(|i| (0..6).map(|j| idx([perms[i][perms[j][0]], perms[i][perms[j][1]], perms[i][perms[j][2]]])).collect())
        .collect()
}

pub fn s3_labels() -> Vec<String> {
    [" ", "a", "b", "A", "B", "*"].iter().map(|s| s.to_string()).collect()
}

/// `x_{v+(0,-1)} = x_{v+(-1,0)} ∘ x_v` over S3.
pub fn s3_family() -> TepFamily {
    let s = Shape::lattice(&[&[0, -1], &[-1, 0], &[0, 0]]);
    let i = |p: [i64; 2]| s.index_of(&Element::lattice(&p)).unwrap();
    let rule = Rule::GroupWord {
        table: s3_table(),
        factors: vec![(i([-1, 0]), 1), (i([0, 0]), 1), (i([0, -1]), -1)],
        target: 0,
    };
    let mut a = Alphabet::new(6).unwrap();
    a.labels = Some(s3_labels());
    TepFamily::new(s, a, rule, Corners::Auto).unwrap()
}

/// `x_{v+(0,-1)} = x_{v+(-1,0)} + x_v (mod 6)`.
pub fn z6_family() -> TepFamily {
    let s = Shape::lattice(&[&[0, -1], &[-1, 0], &[0, 0]]);
    let mut coeffs = vec![0; 3];
    coeffs[s.index_of(&pt(0, -1)).unwrap()] = -1;
    coeffs[s.index_of(&pt(-1, 0)).unwrap()] = 1;
    coeffs[s.index_of(&pt(0, 0)).unwrap()] = 1;
    TepFamily::new(s, Alphabet::new(6).unwrap(), Rule::SumMod { q: 6, coeffs, target: 0 }, Corners::Auto).unwrap()
}

/// The five shapes whose pattern counts are pinned, leftmost convex.
pub fn counts_shapes() -> Vec<Shape> {
    vec![
        Shape::lattice(&[&[0, 0], &[1, 0], &[2, 0], &[3, 0], &[1, -1], &[2, -1], &[2, -2], &[2, -3]]),
        Shape::lattice(&[&[0, 0], &[2, 0], &[2, -2]]),
        Shape::lattice(&[&[0, 0], &[1, 0], &[3, 0], &[3, -3]]),
        Shape::lattice(&[&[0, 0], &[1, 0], &[2, 0], &[4, 0], &[4, -4]]),
        Shape::lattice(&[&[0, 0], &[2, 0], &[3, -1], &[2, -2], &[4, -2], &[4, -4]]),
    ]
}

pub fn free_ball_shape(r: usize) -> Shape {
    Shape::from_elements(GroupSpec::Free(2), tep_core::group::free_ball(2, r))
}

/// `x_1 + x_a + x_b + x_A + x_B = 0 (mod 2)` on the radius-1 ball of F_2.
pub fn f2_sum_family() -> TepFamily {
    TepFamily::sum_zero(free_ball_shape(1), 2).unwrap()
}

/// Sum rule on a 4-cell Heisenberg shape.
pub fn heis_family() -> TepFamily {
    let s = Shape::new(
        GroupSpec::Heisenberg,
        [Element::heis(0, 0, 0), Element::heis(1, 0, 0), Element::heis(0, 1, 0), Element::heis(1, 1, 1)],
    )
    .unwrap();
    TepFamily::sum_zero(s, 3).unwrap()
}

/// A random convex set: the closure of a few random points.
pub fn random_convex(geo: &ConvexGeometry, rng: &mut ChaCha8Rng, points: usize, radius: i64) -> Shape {
    let n = rng.gen_range(1..=points);
    let pts: Vec<Element> = (0..n).map(|_| geo.group.random_element(rng, radius)).collect();
    geo.closure(&Shape::from_elements(geo.group, pts)).unwrap()
}

/// A random finite set.
pub fn random_set(group: GroupSpec, rng: &mut ChaCha8Rng, max: usize, radius: i64) -> Shape {
    let n = rng.gen_range(0..=max);
    Shape::from_elements(group, (0..n).map(|_| group.random_element(rng, radius)).collect::<Vec<_>>())
}

/// All patterns on `domain` that are locally legal, by plain enumeration of
/// `A^domain`. Independent of the anti-shelling walk.
pub fn enumerate_legal(domain: &Shape, family: &TepFamily) -> Vec<Pattern> {
    let a = family.alphabet.size as u64;
    let total = a.pow(domain.len() as u32);
    let mut out = Vec::new();
    for mut idx in 0..total {
        let mut values = Vec::with_capacity(domain.len());
        for _ in 0..domain.len() {
            values.push((idx % a) as Symbol);
            idx /= a;
        }
        let p = Pattern::new(domain.clone(), values).unwrap();
        if is_locally_legal(&p, family) {
            out.push(p);
        }
    }
    out
}

/// Triangle over `Z_4` with `x_(1,1) ≡ x_(1,0) + x_(0,1) (mod 2)`: two
/// completions at every cell.
pub fn two_tep() -> TepFamily {
    let s = triangle();
    let i = |p: [i64; 2]| s.index_of(&pt(p[0], p[1])).unwrap();
    let mut allowed = Vec::new();
    for x in 0..4u8 {
        for y in 0..4u8 {
            for z in 0..4u8 {
                if (x + y + z) % 2 == 0 {
                    let mut p = vec![0; 3];
                    p[i([1, 0])] = x;
                    p[i([0, 1])] = y;
                    p[i([1, 1])] = z;
                    allowed.push(p);
                }
            }
        }
    }
    TepFamily::new(s, Alphabet::new(4).unwrap(), Rule::Explicit(allowed), Corners::Auto).unwrap()
}

/// A random locally legal pattern on `c`: rejection from uniform fillings,
/// falling back to the sampler for larger sets.
pub fn random_legal(c: &Shape, fam: &TepFamily, geo: &ConvexGeometry, r: &mut ChaCha8Rng) -> Pattern {
    for _ in 0..50 {
        let values: Vec<Symbol> = (0..c.len()).map(|_| r.gen_range(0..fam.alphabet.size) as Symbol).collect();
        let p = Pattern::new(c.clone(), values).unwrap();
        if is_locally_legal(&p, fam) {
            return p;
        }
    }
    let p = sample_tep(c, fam, geo, r.gen()).unwrap();
    assert!(is_locally_legal(&p, fam));
    p
}

/// Some `a ∉ C` with `C ∪ {a}` convex, found among the closure of `C` and a
/// random nearby element.
pub fn convex_step(c: &Shape, geo: &ConvexGeometry, r: &mut ChaCha8Rng) -> Option<Element> {
    for _ in 0..20 {
        let far = match c.members().first() {
            Some(g) => g.op(&geo.group.random_element(r, 2)),
            None => geo.group.random_element(r, 2),
        };
        let d = geo.closure(&c.with(far)).unwrap();
        let cands: Vec<Element> = d.minus(c).iter().filter(|a| geo.is_convex(&c.with((*a).clone()))).cloned().collect();
        if !cands.is_empty() {
            return Some(cands[r.gen_range(0..cands.len())].clone());
        }
    }
    None
}

/// `x_(1,1) = σ(x_(1,0)) + x_(0,1)` over `Z_4` with `σ` a permutation.
pub fn other_triangle_rule() -> TepFamily {
    let s = triangle();
    let i = |p: [i64; 2]| s.index_of(&pt(p[0], p[1])).unwrap();
    let sigma = [2u8, 0, 3, 1];
    let mut allowed = Vec::new();
    for x in 0..4u8 {
        for y in 0..4u8 {
            let mut p = vec![0; 3];
            p[i([1, 0])] = x;
            p[i([0, 1])] = y;
            p[i([1, 1])] = (sigma[x as usize] + y) % 4;
            allowed.push(p);
        }
    }
    TepFamily::new(s, Alphabet::new(4).unwrap(), Rule::Explicit(allowed), Corners::Auto).unwrap()
}

/// Carathéodory oracle: `v ∈ conv(S)` iff `v` is a nonnegative barycentric
/// combination of some affinely independent subset of at most `d + 1` points.
/// Each subset is solved once with exact rationals; per query point only
/// integer adjugate products are evaluated.
pub struct CaratheodoryOracle {
    systems: Vec<Solved>,
}

struct Solved {
    pts: Vec<Vec<i64>>,
    rows: Vec<usize>,
    adj: Vec<Vec<i128>>,
    det: i128,
}

fn det_and_adj(m: &[Vec<BigRational>]) -> (BigRational, Vec<Vec<BigRational>>) {
    // Gauss-Jordan on [m | I]
    let k = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut inv: Vec<Vec<BigRational>> =
        (0..k).map(|i| (0..k).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    let mut det = BigRational::one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !a[r][c].is_zero()) else {
            return (BigRational::zero(), inv);
        };
        if p != c {
            a.swap(p, c);
            inv.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= piv.clone();
        for j in 0..k {
            a[c][j] = a[c][j].clone() / piv.clone();
            inv[c][j] = inv[c][j].clone() / piv.clone();
        }
        for r in 0..k {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..k {
                    let x = a[c][j].clone() * f.clone();
                    a[r][j] = a[r][j].clone() - x;
                    let y = inv[c][j].clone() * f.clone();
                    inv[r][j] = inv[r][j].clone() - y;
                }
            }
        }
    }
    let adj = inv.into_iter().map(|r| r.into_iter().map(|x| x * det.clone()).collect()).collect();
    (det, adj)
}

fn to_i128(x: &BigRational) -> i128 {
    assert!(x.is_integer());
    x.to_integer().to_i128().unwrap()
}

impl CaratheodoryOracle {
    pub fn new(points: &[Vec<i64>]) -> CaratheodoryOracle {
        let d = points[0].len();
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        let n = pts.len();
        let mut systems = Vec::new();
        for k in 1..=(d + 1).min(n) {
            for idx in subsets(n, k) {
                let sub: Vec<Vec<i64>> = idx.iter().map(|&i| pts[i].clone()).collect();
                // (d+1) x k matrix: coordinates, then the row of ones
                let full: Vec<Vec<BigRational>> = (0..=d)
                    .map(|r| {
                        sub.iter()
                            .map(|p| BigRational::from_integer(BigInt::from(if r < d { p[r] } else { 1 })))
                            .collect()
                    })
                    .collect();
                // choose k independent rows greedily, always keeping the ones row
                let mut rows = vec![d];
                for r in 0..d {
                    if rows.len() == k {
                        break;
                    }
                    let mut trial = rows.clone();
                    trial.push(r);
                    if rank(&trial.iter().map(|&i| full[i].clone()).collect::<Vec<_>>()) == trial.len() {
                        rows = trial;
                    }
                }
                if rows.len() < k {
                    continue;
                }
                let sq: Vec<Vec<BigRational>> = rows.iter().map(|&i| full[i].clone()).collect();
                let (det, adj) = det_and_adj(&sq);
                if !det.is_zero() {
                    systems.push(Solved {
                        pts: sub,
                        rows,
                        adj: adj.iter().map(|r| r.iter().map(to_i128).collect()).collect(),
                        det: to_i128(&det),
                    });
                }
            }
        }
        CaratheodoryOracle { systems }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let d = v.len();
        let rhs = |r: usize| if r < d { v[r] as i128 } else { 1 };
        'sys: for s in &self.systems {
            let b: Vec<i128> = s.rows.iter().map(|&r| rhs(r)).collect();
            // det * lambda = adj * b
            let lam: Vec<i128> = s.adj.iter().map(|row| row.iter().zip(&b).map(|(x, y)| x * y).sum()).collect();
            if lam.iter().any(|&l| l * s.det.signum() < 0) {
                continue;
            }
            for r in 0..=d {
                if s.rows.contains(&r) {
                    continue;
                }
                let lhs: i128 = s.pts.iter().zip(&lam).map(|(p, &l)| (if r < d { p[r] as i128 } else { 1 }) * l).sum();
                if lhs != s.det * rhs(r) {
                    continue 'sys;
                }
            }
            return true;
        }
        false
    }
}

fn rank(m: &[Vec<BigRational>]) -> usize {
    let mut a = m.to_vec();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(p, r);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone() / a[r][c].clone();
                for j in 0..cols {
                    let x = a[r][j].clone() * f.clone();
                    a[i][j] = a[i][j].clone() - x;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}
