//! Named families used by the command line and the demos.

use crate::error::{usage, Result};
use crate::group::{free_ball, Element, GroupSpec, Shape};
use crate::tep::{Alphabet, Corners, Rule, Symbol, TepFamily};

/// Preset names accepted by [`by_name`].
pub const NAMES: [&str; 5] = ["ledrappier", "s3-triangle", "s3-square", "z6-triangle", "f2-sum"];

/// Permutations of `{1,2,3}` in symbol order: id, (123), (132), (12), (23), (13).
const S3_PERMS: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]];

/// Multiplication table of `S_3` with `(p ∘ q)(n) = p(q(n))`.
pub fn s3_table() -> Vec<Vec<Symbol>> {
    let idx = |p: [usize; 3]| S3_PERMS.iter().position(|q| *q == p).unwrap() as Symbol;
    (0..6)
        .map(|i| {
            let p = S3_PERMS[i];
            (0..6).map(|j| idx(S3_PERMS[j].map(|n| p[n]))).collect()
        })
        .collect()
}

/// Identity is a blank.
pub fn s3_labels() -> Vec<String> {
    [" ", "a", "b", "A", "B", "*"].iter().map(|s| s.to_string()).collect()
}

fn lattice_triangle() -> Shape {
    Shape::lattice(&[&[1, 0], &[0, 1], &[1, 1]])
}

pub fn ledrappier() -> TepFamily {
    TepFamily::sum_zero(lattice_triangle(), 2).expect("ledrappier is TEP")
}

fn s3_word(shape: Shape, product: &[[i64; 2]], equals: [i64; 2]) -> TepFamily {
    let i = |p: &[i64; 2]| shape.index_of(&Element::lattice(p)).expect("cell in shape");
    let mut factors: Vec<(usize, i8)> = product.iter().map(|p| (i(p), 1)).collect();
    factors.push((i(&equals), -1));
    let rule = Rule::GroupWord { table: s3_table(), factors, target: 0 };
    let mut alphabet = Alphabet::new(6).expect("six symbols");
    alphabet.labels = Some(s3_labels());
    TepFamily::new(shape, alphabet, rule, Corners::Auto).expect("group words are TEP")
}

/// `x_(1,0) = x_(0,1) ∘ x_(1,1)`.
pub fn s3_triangle() -> TepFamily {
    s3_word(lattice_triangle(), &[[0, 1], [1, 1]], [1, 0])
}

/// `x_(1,0) = x_(0,0) ∘ x_(0,1) ∘ x_(1,1)`.
pub fn s3_square() -> TepFamily {
    s3_word(Shape::lattice(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]), &[[0, 0], [0, 1], [1, 1]], [1, 0])
}

/// `x_(1,0) = x_(0,1) + x_(1,1) (mod 6)`.
pub fn z6_triangle() -> TepFamily {
    let s = lattice_triangle();
    let coeffs = s.iter().map(|g| if g.coords() == [1, 0] { -1 } else { 1 }).collect();
    TepFamily::new(s, Alphabet::new(6).unwrap(), Rule::SumMod { q: 6, coeffs, target: 0 }, Corners::Auto)
        .expect("sums are TEP")
}

/// Sum mod 2 over the radius-1 ball of `F_2`.
pub fn f2_sum() -> TepFamily {
    let s = Shape::from_elements(GroupSpec::Free(2), free_ball(2, 1));
    TepFamily::sum_zero(s, 2).expect("sums are TEP")
}

pub fn by_name(name: &str) -> Result<TepFamily> {
    Ok(match name {
        "ledrappier" => ledrappier(),
        "s3-triangle" => s3_triangle(),
        "s3-square" => s3_square(),
        "z6-triangle" => z6_triangle(),
        "f2-sum" => f2_sum(),
        _ => return usage(format!("unknown family {name:?}; presets are {}", NAMES.join(", "))),
    })
}
