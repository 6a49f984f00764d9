//! Left-invariant orders, good position and S-contours.

use std::cmp::Ordering;

use num_integer::Integer;
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{usage, Error, Result};
use crate::group::{Element, GroupSpec, Shape};
use crate::rng::step_rng;
use crate::tep::{Pattern, Symbol, TepFamily, Uniformity, VERIFY_BUDGET};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantOrder {
    /// Lexicographic on `Z^d`.
    Lex(u32),
    /// `u < v` iff `w.u < w.v`, ties broken lexicographically; `w` has
    /// rational entries `(num, den)`.
    Vector {
        w: Vec<(i64, i64)>,
        scaled: Vec<i128>,
    },
    /// Magnus order on `F_n`.
    Magnus(u32),
}

impl InvariantOrder {
    pub fn vector(w: Vec<(i64, i64)>) -> Result<InvariantOrder> {
        if w.is_empty() || w.iter().any(|&(_, d)| d == 0) {
            return usage("weight vector needs nonzero denominators");
        }
        let l = w.iter().fold(1i128, |l, &(_, d)| l.lcm(&(d.abs() as i128)));
        let scaled = w.iter().map(|&(n, d)| n as i128 * (l / d as i128)).collect();
        Ok(InvariantOrder::Vector { w, scaled })
    }

    pub fn group(&self) -> GroupSpec {
        match self {
            InvariantOrder::Lex(d) => GroupSpec::Lattice(*d),
            InvariantOrder::Vector { w, .. } => GroupSpec::Lattice(w.len() as u32),
            InvariantOrder::Magnus(n) => GroupSpec::Free(*n),
        }
    }

    pub fn compare(&self, u: &Element, v: &Element) -> Ordering {
        match self {
            InvariantOrder::Lex(_) => u.coords().cmp(v.coords()),
            InvariantOrder::Vector { scaled, .. } => {
                let dot = |x: &Element| x.coords().iter().zip(scaled).map(|(&c, &s)| c as i128 * s).sum::<i128>();
                dot(u).cmp(&dot(v)).then_with(|| u.coords().cmp(v.coords()))
            }
            InvariantOrder::Magnus(n) => magnus_sign(u.ldiv(v).inv().letters(), *n),
        }
    }

    pub fn max_of<'a>(&self, s: impl IntoIterator<Item = &'a Element>) -> Option<&'a Element> {
        s.into_iter().max_by(|x, y| self.compare(x, y))
    }

    pub fn to_json(&self) -> Value {
        match self {
            InvariantOrder::Lex(d) => json!({"lex": d}),
            InvariantOrder::Vector { w, .. } => {
                json!({"vector": {"w": w.iter().map(|&(n, d)| json!([n, d])).collect::<Vec<_>>()}})
            }
            InvariantOrder::Magnus(n) => json!({"magnus": n}),
        }
    }

    pub fn from_json(v: &Value) -> Result<InvariantOrder> {
        if let Some(d) = v.get("lex").and_then(Value::as_u64) {
            return Ok(InvariantOrder::Lex(d as u32));
        }
        if let Some(n) = v.get("magnus").and_then(Value::as_u64) {
            if n < 2 {
                return usage("magnus order needs rank at least 2");
            }
            return Ok(InvariantOrder::Magnus(n as u32));
        }
        if let Some(w) = v.get("vector").and_then(|x| x.get("w")) {
            let w: Vec<(i64, i64)> =
                serde_json::from_value(w.clone()).map_err(|e| Error::Usage(format!("bad weight vector: {e}")))?;
            return InvariantOrder::vector(w);
        }
        usage(format!("unknown order spec {v}"))
    }
}

/// Coefficient of the monomial `m` (variable indices, 1-based) in the Magnus
/// image of the word `w`, where `a ↦ 1 + a` and `a^-1 ↦ 1 - a + a^2 - ...`.
pub fn magnus_coefficient(w: &[i8], m: &[u8]) -> i128 {
    let d = m.len();
    let mut dp = vec![0i128; d + 1];
    dp[0] = 1;
    for &l in w {
        let g = l.unsigned_abs();
        let mut next = vec![0i128; d + 1];
        for q in 0..=d {
            let mut j = 0;
            // consume m[q-j..q], all equal to g
            loop {
                let c = if l > 0 {
                    if j <= 1 { 1 } else { 0 }
                } else if j % 2 == 0 {
                    1
                } else {
                    -1
                };
                if c != 0 {
                    next[q] += c * dp[q - j];
                }
                if j == q || m[q - j - 1] != g {
                    break;
                }
                j += 1;
            }
        }
        dp = next;
    }
    dp[d]
}

/// Sign of the leading coefficient of `M(w) - 1`, scanning monomials by degree
/// and then lexicographically. `Equal` only for the empty word.
fn magnus_sign(w: &[i8], n: u32) -> Ordering {
    if w.is_empty() {
        return Ordering::Equal;
    }
    for d in 1..=w.len() {
        let mut m = vec![1u8; d];
        'monomials: loop {
            let c = magnus_coefficient(w, &m);
            if c != 0 {
                return c.cmp(&0);
            }
            let mut i = d;
            loop {
                if i == 0 {
                    break 'monomials;
                }
                i -= 1;
                if m[i] < n as u8 {
                    m[i] += 1;
                    m[i + 1..].fill(1);
                    continue 'monomials;
                }
            }
        }
    }
    // the syllable monomial of degree |w| always has a nonzero coefficient
    debug_assert!(false, "Magnus image of a nontrivial word vanished to degree {}", w.len());
    Ordering::Equal
}

/// `g = (max S)^-1`, so that `gS` has the identity as its maximum.
pub fn good_position(s: &Shape, order: &InvariantOrder) -> Result<(Element, Shape)> {
    let top = order.max_of(s).ok_or_else(|| Error::Usage("good position of an empty shape".into()))?;
    let g = top.inv();
    let gs = s.translate_unchecked(&g);
    Ok((g, gs))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contour {
    pub region: Shape,
    /// The shape in good position.
    pub shape: Shape,
    pub members: Shape,
    /// `region \ members`, ascending in the order.
    pub fill_order: Vec<Element>,
}

impl Contour {
    pub fn to_json(&self) -> Value {
        json!({
            "region": self.region.to_json(),
            "shape": self.shape.to_json(),
            "members": self.members.to_json(),
            "fill_order": self.fill_order.iter().map(Element::to_json).collect::<Vec<_>>(),
        })
    }
}

/// `E = {c ∈ C : c·gS ⊄ C}` with `gS` the good-positioned shape.
pub fn s_contour(c: &Shape, s: &Shape, order: &InvariantOrder) -> Result<Contour> {
    if c.group != order.group() || s.group != order.group() {
        return usage("region, shape and order must share a group");
    }
    let (_, gs) = good_position(s, order)?;
    let mut members = Vec::new();
    let mut fill = Vec::new();
    for x in c {
        if gs.iter().all(|t| c.contains(&x.op(t))) {
            fill.push(x.clone());
        } else {
            members.push(x.clone());
        }
    }
    fill.sort_by(|x, y| order.compare(x, y));
    Ok(Contour { region: c.clone(), shape: gs, members: Shape::from_elements(c.group, members), fill_order: fill })
}

/// Completes an arbitrary pattern on the contour of `C`, filling the rest in
/// ascending order; each cell completes the translate it is the maximum of.
pub fn fill_via_contour(
    p: &Pattern,
    c: &Shape,
    family: &TepFamily,
    order: &InvariantOrder,
    seed: u64,
) -> Result<Pattern> {
    let contour = s_contour(c, &family.shape, order)?;
    if p.domain != contour.members {
        return usage("pattern must be defined exactly on the contour");
    }
    let (g, _) = good_position(&family.shape, order)?;
    let top_idx = family.shape.index_of(&g.inv()).expect("max in shape");
    let top = Shape::from_elements(family.shape.group, [g.inv()]);
    let k = match family.verify_uniform_extensions(&top, VERIFY_BUDGET)? {
        Uniformity::Uniform(k) if k > 0 => k,
        _ => return usage(format!("family has no uniform extensions at its maximal cell {}", g.inv())),
    };
    let mut vals: std::collections::HashMap<Element, Symbol> = p.pairs().map(|(x, v)| (x.clone(), v)).collect();
    let mut pat = vec![0; family.shape.len()];
    let mut opts = Vec::new();
    for (step, x) in contour.fill_order.iter().enumerate() {
        let h = x.op(&g);
        for (j, t) in family.shape.iter().enumerate() {
            if j != top_idx {
                pat[j] = vals[&h.op(t)];
            }
        }
        opts.clear();
        for b in 0..family.alphabet.size as Symbol {
            pat[top_idx] = b;
            if family.allows(&pat) {
                opts.push(b);
            }
        }
        debug_assert_eq!(opts.len(), k as usize);
        let b = if opts.len() == 1 { opts[0] } else { opts[step_rng(seed, step as u64).gen_range(0..opts.len())] };
        vals.insert(x.clone(), b);
    }
    Ok(Pattern::from_pairs(c.group, vals))
}

/// Exponent of `|A|` in the number of legal patterns on an `n1 × n2`
/// rectangle, for a shape of width `m1` and height `m2` (coordinate spreads):
/// `n1·m2 + m1·n2 − m1·m2`.
pub fn rectangle_count_exponent(n1: u64, n2: u64, s: &Shape) -> Result<u64> {
    if s.group != GroupSpec::Lattice(2) || s.is_empty() {
        return usage("rectangle exponent needs a nonempty shape in Z^2");
    }
    let spread = |i: usize| {
        let v: Vec<i64> = s.iter().map(|g| g.coords()[i]).collect();
        (v.iter().max().unwrap() - v.iter().min().unwrap()) as u64
    };
    let (m1, m2) = (spread(0), spread(1));
    if n1 < m1 || n2 < m2 {
        return usage(format!("rectangle {n1}x{n2} is smaller than the shape ({m1}x{m2})"));
    }
    Ok(n1 * m2 + m1 * n2 - m1 * m2)
}
