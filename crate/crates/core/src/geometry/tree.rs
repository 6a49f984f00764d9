//! Tree convexity on the Cayley graph of `F_n`.
//!
//! `[uw]` is `{u, w}` plus every `t` with `d(v, t) < min(d(v, u), d(v, w))`
//! for some `v` on the geodesic from `u` to `w`: a ball around each interior
//! geodesic vertex. Balls are collected per vertex with the largest radius
//! any pair asks for, so each is enumerated once.

use std::collections::{HashMap, HashSet};

use smallvec::SmallVec;

use crate::group::{free_ball, Element};

/// Vertices of the geodesic from `u` to `w`, starting at `u`.
fn geodesic(u: &Element, w: &Element) -> Vec<Element> {
    let (x, y) = (u.letters(), w.letters());
    let common = x.iter().zip(y).take_while(|(p, q)| p == q).count();
    let mut path = Vec::with_capacity(x.len() + y.len() - 2 * common + 1);
    for k in (common..=x.len()).rev() {
        path.push(Element::Free(SmallVec::from_slice(&x[..k])));
    }
    for k in common + 1..=y.len() {
        path.push(Element::Free(SmallVec::from_slice(&y[..k])));
    }
    path
}

/// Records, for each interior geodesic vertex, the ball radius `[uw]` needs.
fn note_radii(u: &Element, w: &Element, radii: &mut HashMap<Element, usize>) {
    let path = geodesic(u, w);
    let len = path.len() - 1;
    for (i, v) in path.into_iter().enumerate() {
        let m = i.min(len - i);
        if m == 0 {
            continue;
        }
        let r = m - 1;
        radii.entry(v).and_modify(|x| *x = (*x).max(r)).or_insert(r);
    }
}

pub(crate) struct BallCache {
    n: u32,
    balls: Vec<Vec<Element>>,
}

impl BallCache {
    pub(crate) fn new(n: u32) -> BallCache {
        BallCache { n, balls: Vec::new() }
    }

    fn ball(&mut self, r: usize) -> &[Element] {
        while self.balls.len() <= r {
            let k = self.balls.len();
            self.balls.push(free_ball(self.n, k));
        }
        &self.balls[r]
    }
}

pub(crate) fn tree_closure(n: u32, c: &[Element]) -> Vec<Element> {
    let mut radii = HashMap::new();
    for (i, u) in c.iter().enumerate() {
        for w in &c[i + 1..] {
            note_radii(u, w, &mut radii);
        }
    }
    let mut out: HashSet<Element> = c.iter().cloned().collect();
    let mut cache = BallCache::new(n);
    for (v, r) in radii {
        for z in cache.ball(r) {
            out.insert(v.op(z));
        }
    }
    let mut out: Vec<Element> = out.into_iter().collect();
    out.sort();
    out
}

/// Whether `c ∪ {a}` is tree convex, given that `c` is.
pub(crate) fn tree_extends(n: u32, c: &HashSet<Element>, a: &Element) -> bool {
    let mut radii = HashMap::new();
    for w in c {
        note_radii(a, w, &mut radii);
    }
    let mut cache = BallCache::new(n);
    let mut by_radius: Vec<(Element, usize)> = radii.into_iter().collect();
    // cheap vertices first so a failure shows up early
    by_radius.sort_by_key(|(_, r)| *r);
    for (v, r) in by_radius {
        if &v != a && !c.contains(&v) {
            return false;
        }
        for z in cache.ball(r) {
            let t = v.op(z);
            if &t != a && !c.contains(&t) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_free_word;

    fn w(s: &str) -> Element {
        parse_free_word(s).unwrap()
    }

    #[test]
    fn geodesic_through_prefix() {
        let p = geodesic(&w("ab"), &w("aB"));
        let names: Vec<String> = p.iter().map(|e| e.to_string()).collect();
        assert_eq!(names, ["ab", "a", "aB"]);
    }

    #[test]
    fn closure_of_two_words() {
        let c = tree_closure(2, &[w("ab"), w("BA")]);
        assert!(c.contains(&w("")));
        assert!(c.contains(&w("a")));
        assert!(c.contains(&w("B")));
        // d(1, ab) = d(1, BA) = 2 so the radius-1 ball around 1 is included
        assert!(c.contains(&w("b")));
        assert!(c.contains(&w("A")));
        assert_eq!(c.len(), 7);
    }
}
