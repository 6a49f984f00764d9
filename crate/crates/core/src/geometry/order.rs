//! Type-ω orders whose lower sets form a convex geometry.
//!
//! Only orders with enumerable prefixes are admitted: every element has
//! finitely many predecessors and `down_set` lists them.

use std::cmp::Ordering;

use serde_json::{json, Value};

use crate::error::{usage, Error, Result};
use crate::group::{free_ball, Element, GroupSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OmegaOrder {
    /// By a norm (squared Euclidean on coordinates, word length on free
    /// groups), then canonically.
    Shells,
    /// The listed elements first, in the given order, then `then`.
    Prefix { head: Vec<Element>, then: Box<OmegaOrder> },
}

fn norm(g: &Element) -> i64 {
    match g {
        Element::Lattice(x) => x.iter().map(|p| p * p).sum(),
        Element::Free(w) => w.len() as i64,
        Element::Heis { a, b, c2 } => a * a + b * b + c2 * c2,
    }
}

fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Elements of norm at most `n`.
fn norm_ball(group: GroupSpec, n: i64) -> Vec<Element> {
    match group {
        GroupSpec::Lattice(d) => {
            let r = isqrt(n);
            let mut out = Vec::new();
            let mut cur = vec![-r; d as usize];
            loop {
                if cur.iter().map(|p| p * p).sum::<i64>() <= n {
                    out.push(Element::lattice(&cur));
                }
                let mut i = cur.len();
                loop {
                    if i == 0 {
                        return out;
                    }
                    i -= 1;
                    if cur[i] < r {
                        cur[i] += 1;
                        for x in cur.iter_mut().skip(i + 1) {
                            *x = -r;
                        }
                        break;
                    }
                }
            }
        }
        GroupSpec::Free(k) => free_ball(k, n as usize),
        GroupSpec::Heisenberg => {
            let r = isqrt(n);
            let mut out = Vec::new();
            for a in -r..=r {
                for b in -r..=r {
                    for c2 in -r..=r {
                        if a * a + b * b + c2 * c2 <= n && (c2 - a * b).rem_euclid(2) == 0 {
                            out.push(Element::heis(a, b, c2));
                        }
                    }
                }
            }
            out
        }
    }
}

impl OmegaOrder {
    pub fn compare(&self, u: &Element, v: &Element) -> Ordering {
        match self {
            OmegaOrder::Shells => norm(u).cmp(&norm(v)).then_with(|| u.cmp(v)),
            OmegaOrder::Prefix { head, then } => {
                let pu = head.iter().position(|h| h == u);
                let pv = head.iter().position(|h| h == v);
                match (pu, pv) {
                    (Some(i), Some(j)) => i.cmp(&j),
                    (Some(_), None) => Ordering::Less,
                    (None, Some(_)) => Ordering::Greater,
                    (None, None) => then.compare(u, v),
                }
            }
        }
    }

    /// All `h <= g`, in increasing order.
    pub fn down_set(&self, group: GroupSpec, g: &Element) -> Vec<Element> {
        let mut out = match self {
            OmegaOrder::Shells => {
                let mut v: Vec<Element> =
                    norm_ball(group, norm(g)).into_iter().filter(|h| self.compare(h, g) != Ordering::Greater).collect();
                v.sort_by(|x, y| self.compare(x, y));
                v
            }
            OmegaOrder::Prefix { head, then } => {
                if let Some(i) = head.iter().position(|h| h == g) {
                    return head[..=i].to_vec();
                }
                let mut v = head.clone();
                v.extend(then.down_set(group, g).into_iter().filter(|h| !head.contains(h)));
                v
            }
        };
        out.dedup();
        out
    }

    pub fn to_json(&self) -> Value {
        match self {
            OmegaOrder::Shells => json!("shells"),
            OmegaOrder::Prefix { head, then } => json!({
                "prefix": head.iter().map(Element::to_json).collect::<Vec<_>>(),
                "then": then.to_json(),
            }),
        }
    }

    pub fn from_json(group: GroupSpec, v: &Value) -> Result<OmegaOrder> {
        if v.as_str() == Some("shells") || v.get("shells").is_some() {
            return Ok(OmegaOrder::Shells);
        }
        if let Some(p) = v.get("prefix") {
            let arr = p.as_array().ok_or_else(|| Error::Usage("prefix must be an array".into()))?;
            let head = arr.iter().map(|e| group.parse_element(e)).collect::<Result<Vec<_>>>()?;
            let mut seen = head.clone();
            seen.sort();
            seen.dedup();
            if seen.len() != head.len() {
                return usage("prefix lists an element twice");
            }
            let then = match v.get("then") {
                Some(t) => OmegaOrder::from_json(group, t)?,
                None => OmegaOrder::Shells,
            };
            return Ok(OmegaOrder::Prefix { head, then: Box::new(then) });
        }
        if v.get("lex").is_some() || v.get("vector").is_some() || v.get("magnus").is_some() {
            return Err(Error::Unsupported(format!(
                "order {v} has elements with infinitely many predecessors, so its lower sets are not finite"
            )));
        }
        usage(format!("unknown order spec {v}"))
    }
}
