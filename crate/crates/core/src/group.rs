//! Encoded groups: `Z^d`, free groups `F_n` and the discrete Heisenberg group
//! in exponential coordinates.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use smallvec::SmallVec;

use crate::error::{usage, Error, Result};

/// Largest absolute coordinate accepted from outside for lattice elements.
pub const LATTICE_BOUND: i64 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupSpec {
    Lattice(u32),
    Free(u32),
    Heisenberg,
}

/// A group element in canonical form.
///
/// Free words store letters as nonzero `i8`: `+k` is the k-th generator
/// (1-based), `-k` its inverse. Heisenberg elements store `c2 = 2c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Lattice(SmallVec<[i64; 3]>),
    Free(SmallVec<[i8; 14]>),
    Heis { a: i64, b: i64, c2: i64 },
}

fn letter_key(l: i8) -> u8 {
    // a < A < b < B < ...
    let k = l.unsigned_abs() - 1;
    2 * k + u8::from(l < 0)
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        use Element::*;
        match (self, other) {
            (Lattice(x), Lattice(y)) => x.cmp(y),
            (Free(x), Free(y)) => x
                .len()
                .cmp(&y.len())
                .then_with(|| x.iter().map(|&l| letter_key(l)).cmp(y.iter().map(|&l| letter_key(l)))),
            (Heis { a, b, c2 }, Heis { a: a2, b: b2, c2: c22 }) => (a, b, c2).cmp(&(a2, b2, c22)),
            _ => self.variant().cmp(&other.variant()),
        }
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn push_letter(w: &mut SmallVec<[i8; 14]>, l: i8) {
    if w.last() == Some(&-l) {
        w.pop();
    } else {
        w.push(l);
    }
}

impl Element {
    fn variant(&self) -> u8 {
        match self {
            Element::Lattice(_) => 0,
            Element::Free(_) => 1,
            Element::Heis { .. } => 2,
        }
    }

    pub fn lattice(coords: &[i64]) -> Element {
        Element::Lattice(SmallVec::from_slice(coords))
    }

    /// Builds a free-group element from arbitrary letters, reducing as it goes.
    pub fn free(letters: &[i8]) -> Element {
        let mut w = SmallVec::new();
        for &l in letters {
            push_letter(&mut w, l);
        }
        Element::Free(w)
    }

    pub fn heis(a: i64, b: i64, c2: i64) -> Element {
        Element::Heis { a, b, c2 }
    }

    pub fn coords(&self) -> &[i64] {
        match self {
            Element::Lattice(v) => v,
            _ => panic!("not a lattice element"),
        }
    }

    pub fn letters(&self) -> &[i8] {
        match self {
            Element::Free(w) => w,
            _ => panic!("not a free-group element"),
        }
    }

    /// Word length for free elements, 0 otherwise.
    pub fn word_len(&self) -> usize {
        match self {
            Element::Free(w) => w.len(),
            _ => 0,
        }
    }

    fn same_kind(&self, h: &Element) -> bool {
        match (self, h) {
            (Element::Lattice(x), Element::Lattice(y)) => x.len() == y.len(),
            (Element::Free(_), Element::Free(_)) => true,
            (Element::Heis { .. }, Element::Heis { .. }) => true,
            _ => false,
        }
    }

    /// Group product; errors if the elements come from different groups.
    pub fn mul(&self, h: &Element) -> Result<Element> {
        if !self.same_kind(h) {
            return usage(format!("cannot multiply {self} and {h}: different groups"));
        }
        Ok(self.op(h))
    }

    /// Unchecked product, for callers that already know both sides match.
    pub fn op(&self, h: &Element) -> Element {
        match (self, h) {
            (Element::Lattice(x), Element::Lattice(y)) => {
                Element::Lattice(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (Element::Free(x), Element::Free(y)) => {
                let mut w = x.clone();
                for &l in y {
                    push_letter(&mut w, l);
                }
                Element::Free(w)
            }
            (Element::Heis { a, b, c2 }, Element::Heis { a: a2, b: b2, c2: c22 }) => Element::Heis {
                a: a + a2,
                b: b + b2,
                c2: c2 + c22 + a * b2 - a2 * b,
            },
            _ => panic!("mismatched group elements"),
        }
    }

    pub fn inv(&self) -> Element {
        match self {
            Element::Lattice(x) => Element::Lattice(x.iter().map(|p| -p).collect()),
            Element::Free(w) => Element::Free(w.iter().rev().map(|l| -l).collect()),
            Element::Heis { a, b, c2 } => Element::Heis { a: -a, b: -b, c2: -c2 },
        }
    }

    /// `self^-1 * h`
    pub fn ldiv(&self, h: &Element) -> Element {
        self.inv().op(h)
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Element::Lattice(x) => x.iter().all(|&p| p == 0),
            Element::Free(w) => w.is_empty(),
            Element::Heis { a, b, c2 } => *a == 0 && *b == 0 && *c2 == 0,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Element::Lattice(x) => json!(x.as_slice()),
            Element::Free(w) => Value::String(free_word_string(w)),
            Element::Heis { a, b, c2 } => json!([a, b, c2]),
        }
    }
}

fn free_word_string(w: &[i8]) -> String {
    w.iter()
        .map(|&l| {
            let base = if l > 0 { b'a' } else { b'A' };
            (base + l.unsigned_abs() - 1) as char
        })
        .collect()
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Lattice(x) => {
                write!(f, "(")?;
                for (i, p) in x.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            Element::Free(w) if w.is_empty() => write!(f, "1"),
            Element::Free(w) => write!(f, "{}", free_word_string(w)),
            Element::Heis { a, b, c2 } => write!(f, "[{a},{b},{c2}]"),
        }
    }
}

impl GroupSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GroupSpec::Lattice(0) => usage("lattice dimension must be at least 1"),
            GroupSpec::Free(n) if !(2..=26).contains(&n) => usage("free rank must lie in 2..=26"),
            _ => Ok(()),
        }
    }

    pub fn identity(&self) -> Element {
        match *self {
            GroupSpec::Lattice(d) => Element::Lattice(SmallVec::from_elem(0, d as usize)),
            GroupSpec::Free(_) => Element::Free(SmallVec::new()),
            GroupSpec::Heisenberg => Element::heis(0, 0, 0),
        }
    }

    /// Checks that `g` is a canonical element of this group.
    pub fn check(&self, g: &Element) -> Result<()> {
        match (*self, g) {
            (GroupSpec::Lattice(d), Element::Lattice(x)) => {
                if x.len() != d as usize {
                    return usage(format!("element {g} does not have dimension {d}"));
                }
                if x.iter().any(|p| p.abs() > LATTICE_BOUND) {
                    return usage(format!("coordinate of {g} exceeds 2^31"));
                }
                Ok(())
            }
            (GroupSpec::Free(n), Element::Free(w)) => {
                if w.iter().any(|l| *l == 0 || l.unsigned_abs() as u32 > n) {
                    return usage(format!("word {g} uses a letter outside F_{n}"));
                }
                if w.windows(2).any(|p| p[0] == -p[1]) {
                    return usage(format!("word {g} is not reduced"));
                }
                Ok(())
            }
            (GroupSpec::Heisenberg, Element::Heis { a, b, c2 }) => {
                if (c2 - a * b).rem_euclid(2) != 0 {
                    return usage(format!("{g} violates the parity c2 = ab mod 2"));
                }
                Ok(())
            }
            _ => usage(format!("element {g} does not belong to {self:?}")),
        }
    }

    pub fn generators(&self) -> Vec<Element> {
        match *self {
            GroupSpec::Lattice(d) => (0..d as usize)
                .map(|i| {
                    let mut v = SmallVec::from_elem(0, d as usize);
                    v[i] = 1;
                    Element::Lattice(v)
                })
                .collect(),
            GroupSpec::Free(n) => (1..=n as i8).map(|k| Element::free(&[k])).collect(),
            GroupSpec::Heisenberg => vec![Element::heis(1, 0, 0), Element::heis(0, 1, 0)],
        }
    }

    /// A random element with every coordinate (or word length) bounded by `r`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, r: i64) -> Element {
        match *self {
            GroupSpec::Lattice(d) => Element::Lattice((0..d).map(|_| rng.gen_range(-r..=r)).collect()),
            GroupSpec::Free(n) => {
                let len = rng.gen_range(0..=r.max(0) as usize);
                let mut w: SmallVec<[i8; 14]> = SmallVec::new();
                while w.len() < len {
                    let k = rng.gen_range(1..=n as i8);
                    let l = if rng.gen_bool(0.5) { k } else { -k };
                    if w.last() != Some(&-l) {
                        w.push(l);
                    }
                }
                Element::Free(w)
            }
            GroupSpec::Heisenberg => {
                let a = rng.gen_range(-r..=r);
                let b = rng.gen_range(-r..=r);
                let mut c2 = rng.gen_range(-2 * r..=2 * r);
                if (c2 - a * b).rem_euclid(2) != 0 {
                    c2 += 1;
                }
                Element::heis(a, b, c2)
            }
        }
    }

    pub fn parse_element(&self, v: &Value) -> Result<Element> {
        let g = match *self {
            GroupSpec::Lattice(_) => {
                let arr = v.as_array().ok_or_else(|| Error::Usage(format!("lattice element must be an array, got {v}")))?;
                let coords = arr
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(|| Error::Usage(format!("bad coordinate {x}"))))
                    .collect::<Result<SmallVec<[i64; 3]>>>()?;
                Element::Lattice(coords)
            }
            GroupSpec::Free(_) => {
                let s = v.as_str().ok_or_else(|| Error::Usage(format!("free element must be a string, got {v}")))?;
                parse_free_word(s)?
            }
            GroupSpec::Heisenberg => {
                let arr = v.as_array().filter(|a| a.len() == 3);
                let arr = arr.ok_or_else(|| Error::Usage(format!("heisenberg element must be [a,b,c2], got {v}")))?;
                let c: Vec<i64> = arr
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(|| Error::Usage(format!("bad coordinate {x}"))))
                    .collect::<Result<_>>()?;
                Element::heis(c[0], c[1], c[2])
            }
        };
        self.check(&g)?;
        Ok(g)
    }
}

/// Parses a word such as `"abA"`; `""` and `"1"` are the identity. The word
/// must already be reduced.
pub fn parse_free_word(s: &str) -> Result<Element> {
    if s == "1" {
        return Ok(Element::Free(SmallVec::new()));
    }
    let mut w = SmallVec::new();
    for ch in s.chars() {
        let l = match ch {
            'a'..='z' => (ch as u8 - b'a' + 1) as i8,
            'A'..='Z' => -((ch as u8 - b'A' + 1) as i8),
            _ => return usage(format!("bad letter {ch:?} in word {s:?}")),
        };
        w.push(l);
    }
    Ok(Element::Free(w))
}

/// A finite subset of a group, sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    pub group: GroupSpec,
    members: Vec<Element>,
}

impl Shape {
    pub fn new(group: GroupSpec, members: impl IntoIterator<Item = Element>) -> Result<Shape> {
        group.validate()?;
        let mut m: Vec<Element> = members.into_iter().collect();
        for g in &m {
            group.check(g)?;
        }
        m.sort();
        m.dedup();
        Ok(Shape { group, members: m })
    }

    /// Builds a shape from elements already known to belong to `group`.
    pub fn from_elements(group: GroupSpec, members: impl IntoIterator<Item = Element>) -> Shape {
        let mut m: Vec<Element> = members.into_iter().collect();
        m.sort();
        m.dedup();
        Shape { group, members: m }
    }

    pub fn empty(group: GroupSpec) -> Shape {
        Shape { group, members: Vec::new() }
    }

    pub fn lattice(points: &[&[i64]]) -> Shape {
        let d = points.first().map_or(1, |p| p.len()) as u32;
        Shape::from_elements(GroupSpec::Lattice(d), points.iter().map(|p| Element::lattice(p)))
    }

    pub fn members(&self) -> &[Element] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Element> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.members.binary_search(g).is_ok()
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.members.binary_search(g).ok()
    }

    pub fn is_subset(&self, other: &Shape) -> bool {
        self.members.iter().all(|g| other.contains(g))
    }

    pub fn union(&self, other: &Shape) -> Shape {
        Shape::from_elements(self.group, self.members.iter().chain(other.iter()).cloned())
    }

    pub fn intersection(&self, other: &Shape) -> Shape {
        Shape { group: self.group, members: self.members.iter().filter(|g| other.contains(g)).cloned().collect() }
    }

    pub fn minus(&self, other: &Shape) -> Shape {
        Shape { group: self.group, members: self.members.iter().filter(|g| !other.contains(g)).cloned().collect() }
    }

    pub fn with(&self, g: Element) -> Shape {
        let mut members = self.members.clone();
        if let Err(i) = members.binary_search(&g) {
            members.insert(i, g);
        }
        Shape { group: self.group, members }
    }

    pub fn without(&self, g: &Element) -> Shape {
        Shape { group: self.group, members: self.members.iter().filter(|h| *h != g).cloned().collect() }
    }

    /// Left translate `{g s : s in S}`.
    pub fn translate(&self, g: &Element) -> Result<Shape> {
        self.group.check(g)?;
        Ok(self.translate_unchecked(g))
    }

    pub(crate) fn translate_unchecked(&self, g: &Element) -> Shape {
        Shape::from_elements(self.group, self.members.iter().map(|s| g.op(s)))
    }

    /// `{s^-1 t : s, t in S}`
    pub fn difference_set(&self) -> Result<Shape> {
        if self.is_empty() {
            return usage("difference set of the empty shape");
        }
        let mut out = Vec::with_capacity(self.len() * self.len());
        for s in &self.members {
            let si = s.inv();
            for t in &self.members {
                out.push(si.op(t));
            }
        }
        Ok(Shape::from_elements(self.group, out))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "group": self.group,
            "members": self.members.iter().map(Element::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Shape> {
        let group: GroupSpec = serde_json::from_value(v.get("group").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Usage(format!("bad group: {e}")))?;
        group.validate()?;
        Shape::members_from_json(group, v.get("members").unwrap_or(&Value::Null))
    }

    /// Parses a bare member list in a known group.
    pub fn members_from_json(group: GroupSpec, v: &Value) -> Result<Shape> {
        let arr = v.as_array().ok_or_else(|| Error::Usage("members must be an array".into()))?;
        let members = arr.iter().map(|m| group.parse_element(m)).collect::<Result<Vec<_>>>()?;
        Shape::new(group, members)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Shape {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        Shape::from_json(&v).map_err(serde::de::Error::custom)
    }
}

impl<'a> IntoIterator for &'a Shape {
    type Item = &'a Element;
    type IntoIter = std::slice::Iter<'a, Element>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// All free-group elements of word length at most `r`, in canonical order.
pub fn free_ball(n: u32, r: usize) -> Vec<Element> {
    let mut out = vec![Element::Free(SmallVec::new())];
    let mut layer = out.clone();
    for _ in 0..r {
        let mut next = Vec::new();
        for w in &layer {
            for k in 1..=n as i8 {
                for l in [k, -k] {
                    if w.letters().last() != Some(&-l) {
                        let mut x: SmallVec<[i8; 14]> = SmallVec::from_slice(w.letters());
                        x.push(l);
                        next.push(Element::Free(x));
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out.sort();
    out
}

/// Cayley-graph distance between free elements.
pub fn free_distance(u: &Element, v: &Element) -> usize {
    let (x, y) = (u.letters(), v.letters());
    let common = x.iter().zip(y).take_while(|(p, q)| p == q).count();
    x.len() + y.len() - 2 * common
}

/// Integer points of the closed Euclidean ball of squared radius `r2` in `Z^2`.
pub fn lattice_disc(r2: i64) -> Shape {
    let r = (r2 as f64).sqrt() as i64 + 1;
    let mut pts = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            if x * x + y * y <= r2 {
                pts.push(Element::lattice(&[x, y]));
            }
        }
    }
    Shape::from_elements(GroupSpec::Lattice(2), pts)
}

/// `{0..m-1} x {0..n-1}`
pub fn lattice_rect(m: i64, n: i64) -> Shape {
    let mut pts = Vec::new();
    for x in 0..m {
        for y in 0..n {
            pts.push(Element::lattice(&[x, y]));
        }
    }
    Shape::from_elements(GroupSpec::Lattice(2), pts)
}
