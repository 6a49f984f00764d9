//! Convex geometries on the encoded groups and anti-shellings between convex
//! sets.

mod hull;
mod order;
mod tree;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use serde_json::{json, Value};

use crate::error::{usage, Error, Result};
use crate::group::{Element, GroupSpec, Shape};
use crate::rng::step_rng;

pub use hull::hull_membership_lattice;
pub use order::OmegaOrder;

use hull::HullTester;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeometryKind {
    /// Lattice points of real convex sets in `Z^d`.
    StdLattice,
    /// Tree convex sets of the Cayley graph of `F_n`.
    TreeConvex,
    /// Real convex sets intersected with the Heisenberg lattice, in
    /// exponential coordinates.
    HeisenbergExp,
    /// Lower sets of a type-ω order.
    OrderLowerSets(OmegaOrder),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexGeometry {
    pub kind: GeometryKind,
    pub group: GroupSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    MinCanonical,
    SeededRandom(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiShelling {
    pub base: Shape,
    pub added: Vec<Element>,
}

impl AntiShelling {
    pub fn to_json(&self) -> Value {
        json!({
            "base": self.base.to_json(),
            "added": self.added.iter().map(Element::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Result of a randomized midpointedness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MidpointReport {
    pub midpointed: bool,
    /// `(g, h)` with `g` outside the closure of `{gh, gh^-1}`.
    pub witness: Option<(Element, Element)>,
}

fn lattice_points(c: &Shape) -> Vec<Vec<i64>> {
    c.iter().map(|g| g.coords().to_vec()).collect()
}

fn heis_points(c: &Shape) -> Vec<Vec<i64>> {
    c.iter()
        .map(|g| match g {
            Element::Heis { a, b, c2 } => vec![*a, *b, *c2],
            _ => unreachable!("checked by the geometry constructor"),
        })
        .collect()
}

fn heis_parity(p: &[i64]) -> bool {
    (p[2] - p[0] * p[1]).rem_euclid(2) == 0
}

fn to_heis(p: &[i64]) -> Element {
    Element::heis(p[0], p[1], p[2])
}

impl ConvexGeometry {
    pub fn new(kind: GeometryKind, group: GroupSpec) -> Result<ConvexGeometry> {
        group.validate()?;
        let ok = match (&kind, group) {
            (GeometryKind::StdLattice, GroupSpec::Lattice(_)) => true,
            (GeometryKind::TreeConvex, GroupSpec::Free(_)) => true,
            (GeometryKind::HeisenbergExp, GroupSpec::Heisenberg) => true,
            (GeometryKind::OrderLowerSets(_), _) => true,
            _ => false,
        };
        if !ok {
            return usage(format!("geometry {kind:?} is not defined on {group:?}"));
        }
        Ok(ConvexGeometry { kind, group })
    }

    /// The standard invariant geometry of a group.
    pub fn default_for(group: GroupSpec) -> ConvexGeometry {
        let kind = match group {
            GroupSpec::Lattice(_) => GeometryKind::StdLattice,
            GroupSpec::Free(_) => GeometryKind::TreeConvex,
            GroupSpec::Heisenberg => GeometryKind::HeisenbergExp,
        };
        ConvexGeometry { kind, group }
    }

    pub fn std_lattice(d: u32) -> ConvexGeometry {
        ConvexGeometry { kind: GeometryKind::StdLattice, group: GroupSpec::Lattice(d) }
    }

    pub fn tree(n: u32) -> ConvexGeometry {
        ConvexGeometry { kind: GeometryKind::TreeConvex, group: GroupSpec::Free(n) }
    }

    pub fn heisenberg() -> ConvexGeometry {
        ConvexGeometry { kind: GeometryKind::HeisenbergExp, group: GroupSpec::Heisenberg }
    }

    /// Invariant under left translation.
    pub fn is_invariant(&self) -> bool {
        !matches!(self.kind, GeometryKind::OrderLowerSets(_))
    }

    fn check_group(&self, s: &Shape) -> Result<()> {
        if s.group != self.group {
            return usage(format!("shape lives in {:?}, geometry in {:?}", s.group, self.group));
        }
        Ok(())
    }

    pub fn closure(&self, s: &Shape) -> Result<Shape> {
        self.check_group(s)?;
        if s.is_empty() {
            return Ok(s.clone());
        }
        let members = match &self.kind {
            GeometryKind::StdLattice => HullTester::new(&lattice_points(s))
                .lattice_points()
                .into_iter()
                .map(|p| Element::lattice(&p))
                .collect::<Vec<_>>(),
            GeometryKind::HeisenbergExp => HullTester::new(&heis_points(s))
                .lattice_points()
                .into_iter()
                .filter(|p| heis_parity(p))
                .map(|p| to_heis(&p))
                .collect(),
            GeometryKind::TreeConvex => {
                let GroupSpec::Free(n) = self.group else { unreachable!() };
                let out = tree::tree_closure(n, s.members());
                debug_assert!(out.len() > 60 || tree::tree_closure(n, &out) == out, "tree closure not idempotent");
                out
            }
            GeometryKind::OrderLowerSets(o) => {
                let top = s.iter().max_by(|x, y| o.compare(x, y)).expect("nonempty");
                o.down_set(self.group, top)
            }
        };
        Ok(Shape::from_elements(self.group, members))
    }

    pub fn is_convex(&self, c: &Shape) -> bool {
        if c.group != self.group {
            return false;
        }
        if c.is_empty() {
            return true;
        }
        match &self.kind {
            GeometryKind::StdLattice | GeometryKind::HeisenbergExp => {
                let set: HashSet<&Element> = c.iter().collect();
                self.hull_misses(c, |g| set.contains(g)).is_none()
            }
            GeometryKind::TreeConvex => {
                let GroupSpec::Free(n) = self.group else { unreachable!() };
                tree::tree_closure(n, c.members()).len() == c.len()
            }
            GeometryKind::OrderLowerSets(o) => {
                let top = c.iter().max_by(|x, y| o.compare(x, y)).expect("nonempty");
                o.down_set(self.group, top).len() == c.len()
            }
        }
    }

    /// First hull point of `c` (in the box scan) that `inside` rejects.
    fn hull_misses(&self, c: &Shape, inside: impl Fn(&Element) -> bool) -> Option<Element> {
        let heis = self.kind == GeometryKind::HeisenbergExp;
        let pts = if heis { heis_points(c) } else { lattice_points(c) };
        let tester = HullTester::new(&pts);
        let d = pts[0].len();
        let lo: Vec<i64> = (0..d).map(|i| pts.iter().map(|p| p[i]).min().unwrap()).collect();
        let hi: Vec<i64> = (0..d).map(|i| pts.iter().map(|p| p[i]).max().unwrap()).collect();
        let mut cur = lo.clone();
        loop {
            if !heis || heis_parity(&cur) {
                let g = if heis { to_heis(&cur) } else { Element::lattice(&cur) };
                if !inside(&g) && tester.contains(&cur) {
                    return Some(g);
                }
            }
            let mut i = d;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    cur[i + 1..].copy_from_slice(&lo[i + 1..]);
                    break;
                }
            }
        }
    }

    /// Whether `c ∪ {a}` is convex, for convex `c` not containing `a`.
    pub fn extends_convex(&self, c: &Shape, set: &HashSet<Element>, a: &Element) -> bool {
        match &self.kind {
            GeometryKind::StdLattice | GeometryKind::HeisenbergExp => {
                let bigger = c.with(a.clone());
                self.hull_misses(&bigger, |g| g == a || set.contains(g)).is_none()
            }
            GeometryKind::TreeConvex => {
                let GroupSpec::Free(n) = self.group else { unreachable!() };
                tree::tree_extends(n, set, a)
            }
            GeometryKind::OrderLowerSets(_) => self.is_convex(&c.with(a.clone())),
        }
    }

    /// `{a in C : C \ {a} convex}`
    pub fn corners(&self, c: &Shape) -> Result<Shape> {
        self.check_group(c)?;
        if !self.is_convex(c) {
            return usage(format!("corners of a non-convex set {c}"));
        }
        let out = c.iter().filter(|a| self.is_convex(&c.without(a))).cloned();
        Ok(Shape::from_elements(self.group, out.collect::<Vec<_>>()))
    }

    /// `{s in S : s not in closure(S \ {s})}`, defined for invariant geometries.
    pub fn translated_lax_corners(&self, s: &Shape) -> Result<Shape> {
        self.check_group(s)?;
        if !self.is_invariant() {
            return Err(Error::Unsupported("translated lax corners need an invariant geometry".into()));
        }
        let mut out = Vec::new();
        for a in s {
            if !self.closure(&s.without(a))?.contains(a) {
                out.push(a.clone());
            }
        }
        Ok(Shape::from_elements(self.group, out))
    }

    pub fn anti_shelling(&self, c: &Shape, d: &Shape, policy: Policy) -> Result<AntiShelling> {
        self.check_group(c)?;
        self.check_group(d)?;
        if !c.is_subset(d) {
            return usage("anti-shelling needs C ⊆ D");
        }
        if !self.is_convex(c) || !self.is_convex(d) {
            return usage("anti-shelling endpoints must be convex");
        }
        self.anti_shelling_unchecked(c, d, policy)
    }

    /// As [`anti_shelling`](Self::anti_shelling) but trusts that `C ⊆ D` are
    /// both convex.
    pub fn anti_shelling_unchecked(&self, c: &Shape, d: &Shape, policy: Policy) -> Result<AntiShelling> {
        let linear = matches!(self.kind, GeometryKind::StdLattice | GeometryKind::HeisenbergExp);
        if linear && policy == Policy::MinCanonical && d.members()[..c.len()] == *c.members() {
            // A canonical (lexicographic) prefix of D is D cut by a
            // perturbed half-space, hence convex: the greedy choice never
            // has to look past the next element.
            return Ok(AntiShelling { base: c.clone(), added: d.members()[c.len()..].to_vec() });
        }
        let mut cur = c.clone();
        let mut set: HashSet<Element> = c.iter().cloned().collect();
        let mut rest: Vec<Element> = d.iter().filter(|g| !set.contains(*g)).cloned().collect();
        let mut added = Vec::with_capacity(rest.len());
        let mut step = 0u64;
        while !rest.is_empty() {
            let pick = match policy {
                Policy::MinCanonical => rest.iter().position(|a| self.extends_convex(&cur, &set, a)),
                Policy::SeededRandom(seed) => {
                    let ok: Vec<usize> = (0..rest.len()).filter(|&i| self.extends_convex(&cur, &set, &rest[i])).collect();
                    ok.choose(&mut step_rng(seed, step)).copied()
                }
            };
            let Some(i) = pick else {
                return Err(Error::GeometryViolation(format!(
                    "no element of D \\ C extends {cur} convexly ({} remaining)",
                    rest.len()
                )));
            };
            let a = rest.remove(i);
            cur = cur.with(a.clone());
            set.insert(a.clone());
            added.push(a);
            step += 1;
        }
        Ok(AntiShelling { base: c.clone(), added })
    }

    /// Samples `g` (the identity first) and checks `g ∈ closure({gh, gh^-1})`
    /// for every `h ∈ S`.
    pub fn check_midpointed(&self, s: &Shape, samples: usize, seed: u64) -> Result<MidpointReport> {
        self.check_group(s)?;
        let mut rng = step_rng(seed, 0);
        for i in 0..samples {
            let g = if i == 0 { self.group.identity() } else { self.group.random_element(&mut rng, 4) };
            for h in s {
                let pair = Shape::from_elements(self.group, [g.op(h), g.op(&h.inv())]);
                if !self.closure(&pair)?.contains(&g) {
                    return Ok(MidpointReport { midpointed: false, witness: Some((g, h.clone())) });
                }
            }
        }
        Ok(MidpointReport { midpointed: true, witness: None })
    }

    pub fn to_json(&self) -> Value {
        match &self.kind {
            GeometryKind::StdLattice => json!("std-lattice"),
            GeometryKind::TreeConvex => json!("tree-convex"),
            GeometryKind::HeisenbergExp => json!("heisenberg-exp"),
            GeometryKind::OrderLowerSets(o) => json!({"order-lower-sets": o.to_json()}),
        }
    }

    /// Parses `"std-lattice" | "tree-convex" | "heisenberg-exp" |
    /// {"order-lower-sets": order}`; a wrapping `{"geometry": ...}` is accepted.
    pub fn from_json(group: GroupSpec, v: &Value) -> Result<ConvexGeometry> {
        if let Some(inner) = v.get("geometry") {
            return ConvexGeometry::from_json(group, inner);
        }
        let kind = match v.as_str() {
            Some("std-lattice") => GeometryKind::StdLattice,
            Some("tree-convex") => GeometryKind::TreeConvex,
            Some("heisenberg-exp") => GeometryKind::HeisenbergExp,
            Some(other) => return usage(format!("unknown geometry {other:?}")),
            None => match v.get("order-lower-sets") {
                Some(o) => GeometryKind::OrderLowerSets(OmegaOrder::from_json(group, o)?),
                None => return usage(format!("bad geometry spec {v}")),
            },
        };
        ConvexGeometry::new(kind, group)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{free_ball, lattice_disc, parse_free_word};

    fn w(s: &str) -> Element {
        parse_free_word(s).unwrap()
    }

    #[test]
    fn std_closure_example() {
        let g = ConvexGeometry::std_lattice(2);
        let s = Shape::lattice(&[&[0, 0], &[3, -1], &[2, 3]]);
        let c = g.closure(&s).unwrap();
        let extra = c.minus(&s);
        assert_eq!(extra, Shape::lattice(&[&[1, 0], &[2, 0], &[1, 1], &[2, 1], &[2, 2]]));
    }

    #[test]
    fn convexity_examples() {
        let g = ConvexGeometry::std_lattice(2);
        assert!(g.is_convex(&lattice_disc(19)));
        assert!(!g.is_convex(&Shape::lattice(&[&[0, 0], &[2, 0]])));
        let t = ConvexGeometry::tree(2);
        assert!(t.is_convex(&Shape::from_elements(GroupSpec::Free(2), free_ball(2, 4))));
        assert_eq!(g.closure(&Shape::empty(GroupSpec::Lattice(2))).unwrap().len(), 0);
    }

    #[test]
    fn corner_examples() {
        let g1 = ConvexGeometry::std_lattice(1);
        let c = g1.corners(&Shape::lattice(&[&[0], &[1], &[2]])).unwrap();
        assert_eq!(c, Shape::lattice(&[&[0], &[2]]));
        let g2 = ConvexGeometry::std_lattice(2);
        let sq = Shape::lattice(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(g2.corners(&sq).unwrap(), sq);
        let t = ConvexGeometry::tree(2);
        let ball = Shape::from_elements(GroupSpec::Free(2), free_ball(2, 1));
        let tc = t.corners(&ball).unwrap();
        assert_eq!(tc, ball.without(&w("")));
        assert!(g1.corners(&Shape::lattice(&[&[0], &[2]])).is_err());
    }

    #[test]
    fn lax_corner_examples() {
        let g = ConvexGeometry::std_lattice(2);
        let s = Shape::lattice(&[&[0, 0], &[1, 0], &[2, 0], &[1, 1]]);
        assert_eq!(g.translated_lax_corners(&s).unwrap(), Shape::lattice(&[&[0, 0], &[2, 0], &[1, 1]]));
        let o = ConvexGeometry::new(GeometryKind::OrderLowerSets(OmegaOrder::Shells), GroupSpec::Lattice(2)).unwrap();
        assert!(matches!(o.translated_lax_corners(&s), Err(Error::Unsupported(_))));
    }

    #[test]
    fn interval_anti_shelling() {
        let g = ConvexGeometry::std_lattice(1);
        let c = Shape::lattice(&[&[1]]);
        let d = Shape::lattice(&[&[0], &[1], &[2]]);
        let a = g.anti_shelling(&c, &d, Policy::MinCanonical).unwrap();
        assert_eq!(a.added, vec![Element::lattice(&[0]), Element::lattice(&[2])]);
        assert!(g.anti_shelling(&d, &c, Policy::MinCanonical).is_err());
    }

    #[test]
    fn broken_order_geometry_has_witness() {
        let group = GroupSpec::Lattice(2);
        let order = OmegaOrder::from_json(group, &json!({"prefix": [[1, 0], [-1, 0]], "then": "shells"})).unwrap();
        let g = ConvexGeometry::new(GeometryKind::OrderLowerSets(order), group).unwrap();
        let s = Shape::lattice(&[&[1, 0], &[0, 1]]);
        let rep = g.check_midpointed(&s, 10, 1).unwrap();
        assert!(!rep.midpointed);
        assert_eq!(rep.witness, Some((Element::lattice(&[0, 0]), Element::lattice(&[1, 0]))));
    }

    #[test]
    fn geometry_json() {
        let g = ConvexGeometry::from_json(GroupSpec::Lattice(2), &json!({"geometry": "std-lattice"})).unwrap();
        assert_eq!(g, ConvexGeometry::std_lattice(2));
        assert!(ConvexGeometry::from_json(GroupSpec::Lattice(2), &json!("tree-convex")).is_err());
        let o = json!({"order-lower-sets": {"prefix": [[1, 0]], "then": "shells"}});
        let g = ConvexGeometry::from_json(GroupSpec::Lattice(2), &o).unwrap();
        assert_eq!(ConvexGeometry::from_json(GroupSpec::Lattice(2), &g.to_json()).unwrap(), g);
    }
}
