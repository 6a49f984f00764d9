//! TEP families: allowed patterns on a shape with uniform corner extensions,
//! local legality, counting and sampling on convex sets.

pub mod presets;
mod walk;

use std::collections::HashMap;

use num_integer::Integer;
use serde_json::{json, Value};

use crate::error::{usage, Error, Result};
use crate::geometry::ConvexGeometry;
use crate::group::{Element, GroupSpec, Shape};

pub use walk::{
    count_convex, count_shape_bruteforce, extend_to_configuration, factorize, legal_corner_symbols, sample_tep,
    Choice, ConvexCount, FamilyMeta, Sampler,
};

pub type Symbol = u8;

/// Largest `|A|^|S|` materialized into a bitset.
pub const MATERIALIZE_LIMIT: u64 = 10_000_000;
/// Default guard on the number of extension checks during verification.
pub const VERIFY_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub size: u32,
    pub labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: u32) -> Result<Alphabet> {
        if !(2..=256).contains(&size) {
            return usage(format!("alphabet size {size} outside 2..=256"));
        }
        Ok(Alphabet { size, labels: None })
    }

    pub fn label(&self, s: Symbol) -> String {
        match &self.labels {
            Some(l) => l[s as usize].clone(),
            None => s.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// Allowed patterns listed explicitly, values in shape member order.
    Explicit(Vec<Vec<Symbol>>),
    /// `sum_s c_s x_s = target (mod q)`; coefficients in member order.
    SumMod { q: u32, coeffs: Vec<i64>, target: i64 },
    /// `prod x_s^(e_s) = target` in a finite group given by its table. Each
    /// factor is `(member index, exponent ±1)`, multiplied left to right.
    GroupWord { table: Vec<Vec<Symbol>>, factors: Vec<(usize, i8)>, target: Symbol },
}

/// Which cells of the shape the family promises uniform extensions at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Corners {
    /// Translated lax corners under the group's standard geometry.
    Auto,
    Given(Shape),
}

/// Outcome of checking uniform extensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Uniformity {
    Uniform(u32),
    /// Extensions at `cell` of `rest` (values on `S \ {cell}` in member
    /// order) number `count`, which differs from the count seen before.
    Witness { cell: Element, rest: Vec<Symbol>, count: u32, expected: u32 },
}

#[derive(Clone, Debug)]
struct GroupTable {
    table: Vec<Vec<Symbol>>,
    inv: Vec<Symbol>,
    id: Symbol,
}

fn group_table(table: &[Vec<Symbol>], n: usize) -> Result<GroupTable> {
    if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x as usize >= n)) {
        return usage(format!("group table must be {n}x{n} over the alphabet"));
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|x| table[e][x] as usize == x && table[x][e] as usize == x))
        .ok_or_else(|| Error::Usage("group table has no identity".into()))?;
    let mut inv = vec![0; n];
    for x in 0..n {
        let y = (0..n)
            .find(|&y| table[x][y] as usize == e)
            .ok_or_else(|| Error::Usage(format!("element {x} has no inverse")))?;
        inv[x] = y as Symbol;
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let l = table[table[x][y] as usize][z];
                let r = table[x][table[y][z] as usize];
                if l != r {
                    return usage("group table is not associative");
                }
            }
        }
    }
    Ok(GroupTable { table: table.to_vec(), inv, id: e as Symbol })
}

#[derive(Clone, Debug)]
pub struct TepFamily {
    pub shape: Shape,
    pub alphabet: Alphabet,
    pub rule: Rule,
    /// Cells with verified `k`-uniform extensions.
    pub corners: Shape,
    pub k: u32,
    pow: Vec<u64>,
    group: Option<GroupTable>,
    allowed: Option<Vec<u64>>,
}

impl TepFamily {
    /// Builds a family and verifies its uniformity at the declared corners.
    pub fn new(shape: Shape, alphabet: Alphabet, rule: Rule, corners: Corners) -> Result<TepFamily> {
        if shape.is_empty() {
            return usage("family shape is empty");
        }
        let a = alphabet.size as usize;
        let n = shape.len();
        let mut group = None;
        match &rule {
            Rule::Explicit(pats) => {
                if pats.iter().any(|p| p.len() != n || p.iter().any(|&x| x as usize >= a)) {
                    return usage("explicit pattern of wrong length or symbol out of range");
                }
            }
            Rule::SumMod { q, coeffs, .. } => {
                if *q as usize != a {
                    return usage(format!("sum-mod modulus {q} must equal the alphabet size {a}"));
                }
                if coeffs.len() != n {
                    return usage("one coefficient per shape cell");
                }
            }
            Rule::GroupWord { table, factors, target } => {
                group = Some(group_table(table, a)?);
                if factors.iter().any(|&(i, e)| i >= n || e.abs() != 1) {
                    return usage("group-word factor outside the shape or with exponent other than ±1");
                }
                if *target as usize >= a {
                    return usage("group-word target outside the alphabet");
                }
            }
        }
        let corners = match corners {
            Corners::Auto => ConvexGeometry::default_for(shape.group).translated_lax_corners(&shape)?,
            Corners::Given(c) => {
                if !c.is_subset(&shape) {
                    return usage("declared corners are not a subset of the shape");
                }
                c
            }
        };
        if corners.is_empty() {
            return usage("a family needs at least one corner");
        }
        if let Rule::SumMod { q, coeffs, .. } = &rule {
            for c in &corners {
                let i = shape.index_of(c).expect("corner in shape");
                if coeffs[i].rem_euclid(*q as i64).gcd(&(*q as i64)) != 1 {
                    return usage(format!("coefficient at corner {c} is not a unit mod {q}"));
                }
            }
        }
        let mut pow = Vec::with_capacity(n + 1);
        let mut p = 1u64;
        for _ in 0..=n {
            pow.push(p);
            p = p.saturating_mul(a as u64);
        }
        let mut fam = TepFamily { shape, alphabet, rule, corners: corners.clone(), k: 0, pow, group, allowed: None };
        fam.materialize();
        match fam.verify_uniform_extensions(&corners, VERIFY_BUDGET)? {
            Uniformity::Uniform(0) => usage("the rule allows no pattern"),
            Uniformity::Uniform(k) => {
                fam.k = k;
                Ok(fam)
            }
            Uniformity::Witness { cell, rest, count, expected } => usage(format!(
                "extensions are not uniform: at {cell} with {rest:?} there are {count}, elsewhere {expected}"
            )),
        }
    }

    fn materialize(&mut self) {
        let total = self.pow[self.shape.len()];
        if total > MATERIALIZE_LIMIT {
            return;
        }
        let mut bits = vec![0u64; (total as usize).div_ceil(64)];
        if let Rule::Explicit(pats) = &self.rule {
            for p in pats {
                let idx = self.index(p);
                bits[(idx / 64) as usize] |= 1 << (idx % 64);
            }
            self.allowed = Some(bits);
            return;
        }
        let mut pat = vec![0; self.shape.len()];
        for idx in 0..total {
            self.decode(idx, &mut pat);
            if self.eval(&pat) {
                bits[(idx / 64) as usize] |= 1 << (idx % 64);
            }
        }
        self.allowed = Some(bits);
    }

    fn decode(&self, mut idx: u64, pat: &mut [Symbol]) {
        let a = self.alphabet.size as u64;
        for x in pat.iter_mut() {
            *x = (idx % a) as Symbol;
            idx /= a;
        }
    }

    pub(crate) fn index(&self, pat: &[Symbol]) -> u64 {
        pat.iter().zip(&self.pow).map(|(&x, &p)| x as u64 * p).sum()
    }

    pub(crate) fn weight(&self, i: usize) -> u64 {
        self.pow[i]
    }

    pub(crate) fn is_materialized(&self) -> bool {
        self.allowed.is_some()
    }

    pub(crate) fn allows_index(&self, idx: u64) -> bool {
        let bits = self.allowed.as_ref().expect("materialized");
        bits[(idx / 64) as usize] >> (idx % 64) & 1 == 1
    }

    fn eval(&self, pat: &[Symbol]) -> bool {
        match &self.rule {
            Rule::Explicit(pats) => pats.iter().any(|p| p == pat),
            Rule::SumMod { q, coeffs, target } => {
                let s: i64 = coeffs.iter().zip(pat).map(|(c, &x)| c * x as i64).sum();
                (s - target).rem_euclid(*q as i64) == 0
            }
            Rule::GroupWord { factors, target, .. } => {
                let g = self.group.as_ref().expect("group table");
                let mut acc: Option<Symbol> = None;
                for &(i, e) in factors {
                    let x = if e > 0 { pat[i] } else { g.inv[pat[i] as usize] };
                    acc = Some(match acc {
                        None => x,
                        Some(y) => g.table[y as usize][x as usize],
                    });
                }
                acc.unwrap_or(g.id) == *target
            }
        }
    }

    /// Whether a pattern on the shape (member order) is allowed.
    pub fn allows(&self, pat: &[Symbol]) -> bool {
        if self.is_materialized() {
            self.allows_index(self.index(pat))
        } else {
            self.eval(pat)
        }
    }

    /// Counts extensions at every cell of `c` over all fillings of the other
    /// cells; uniform when every count agrees.
    pub fn verify_uniform_extensions(&self, c: &Shape, budget: u64) -> Result<Uniformity> {
        if !c.is_subset(&self.shape) {
            return usage("extension cells must lie in the shape");
        }
        let n = self.shape.len();
        let a = self.alphabet.size as u64;
        let checks = (c.len() as u64).saturating_mul(self.pow[n]);
        if checks > budget {
            return Err(Error::Resource { what: format!("{checks} extension checks"), estimate: None });
        }
        let mut expected: Option<u32> = None;
        let mut pat = vec![0; n];
        for cell in c {
            let i = self.shape.index_of(cell).expect("subset");
            let rest_total = self.pow[n] / a;
            for r in 0..rest_total {
                // spread r over the other coordinates
                let mut x = r;
                for (j, slot) in pat.iter_mut().enumerate() {
                    if j != i {
                        *slot = (x % a) as Symbol;
                        x /= a;
                    }
                }
                let mut count = 0;
                for b in 0..a {
                    pat[i] = b as Symbol;
                    if self.allows(&pat) {
                        count += 1;
                    }
                }
                match expected {
                    None => expected = Some(count),
                    Some(e) if e != count => {
                        let rest = pat.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &v)| v).collect();
                        return Ok(Uniformity::Witness { cell: cell.clone(), rest, count, expected: e });
                    }
                    _ => {}
                }
            }
        }
        Ok(Uniformity::Uniform(expected.unwrap_or(0)))
    }

    pub fn meta(&self) -> FamilyMeta {
        FamilyMeta { shape: self.shape.clone(), alphabet: self.alphabet.size, k: self.k }
    }

    /// The Ledrappier-style rule `sum_s x_s = 0 (mod q)` on `shape`.
    pub fn sum_zero(shape: Shape, q: u32) -> Result<TepFamily> {
        let n = shape.len();
        TepFamily::new(shape, Alphabet::new(q)?, Rule::SumMod { q, coeffs: vec![1; n], target: 0 }, Corners::Auto)
    }

    pub fn to_json(&self) -> Value {
        let rule = match &self.rule {
            Rule::Explicit(p) => json!({"explicit": p}),
            Rule::SumMod { q, coeffs, target } => json!({"sum-mod": {"q": q, "coefficients": coeffs, "target": target}}),
            Rule::GroupWord { table, factors, target } => json!({"group-word": {
                "table": table,
                "factors": factors.iter().map(|&(i, e)| json!({"cell": self.shape.members()[i].to_json(), "exp": e})).collect::<Vec<_>>(),
                "target": target,
            }}),
        };
        let mut v = json!({
            "shape": self.shape.to_json(),
            "alphabet": self.alphabet.size,
            "rule": rule,
            "corners": self.corners.to_json(),
            "k": self.k,
        });
        if let Some(l) = &self.alphabet.labels {
            v["labels"] = json!(l);
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<TepFamily> {
        let shape = Shape::from_json(v.get("shape").ok_or_else(|| Error::Usage("family needs a shape".into()))?)?;
        let size = v.get("alphabet").and_then(Value::as_u64).ok_or_else(|| Error::Usage("family needs an alphabet size".into()))?;
        let mut alphabet = Alphabet::new(size as u32)?;
        if let Some(l) = v.get("labels") {
            let labels: Vec<String> =
                serde_json::from_value(l.clone()).map_err(|e| Error::Usage(format!("bad labels: {e}")))?;
            if labels.len() != size as usize {
                return usage("one label per symbol");
            }
            alphabet.labels = Some(labels);
        }
        let rule = parse_rule(&shape, v.get("rule").ok_or_else(|| Error::Usage("family needs a rule".into()))?)?;
        let corners = match v.get("corners") {
            None => Corners::Auto,
            Some(c) if c.as_str() == Some("auto") => Corners::Auto,
            Some(c) => {
                let s = if c.is_array() { Shape::members_from_json(shape.group, c)? } else { Shape::from_json(c)? };
                Corners::Given(s)
            }
        };
        let fam = TepFamily::new(shape, alphabet, rule, corners)?;
        if let Some(k) = v.get("k").and_then(Value::as_u64) {
            if k != fam.k as u64 {
                return usage(format!("declared k = {k} but the rule has k = {}", fam.k));
            }
        }
        Ok(fam)
    }
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::Usage(format!("missing field {name:?}")))
}

fn from_value<T: serde::de::DeserializeOwned>(v: &Value, what: &str) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Usage(format!("bad {what}: {e}")))
}

fn parse_rule(shape: &Shape, v: &Value) -> Result<Rule> {
    if let Some(p) = v.get("explicit") {
        return Ok(Rule::Explicit(from_value(p, "explicit patterns")?));
    }
    if let Some(s) = v.get("sum-mod") {
        let q: u32 = from_value(field(s, "q")?, "modulus")?;
        let coeffs: Vec<i64> = match s.get("coefficients") {
            Some(c) => from_value(c, "coefficients")?,
            None => vec![1; shape.len()],
        };
        let target: i64 = match s.get("target") {
            Some(t) => from_value(t, "target")?,
            None => 0,
        };
        return Ok(Rule::SumMod { q, coeffs, target });
    }
    if let Some(g) = v.get("group-word") {
        let table: Vec<Vec<Symbol>> = from_value(field(g, "table")?, "group table")?;
        let target: Symbol = from_value(field(g, "target")?, "target")?;
        let arr = field(g, "factors")?.as_array().ok_or_else(|| Error::Usage("factors must be an array".into()))?;
        let mut factors = Vec::new();
        for f in arr {
            let cell = shape.group.parse_element(field(f, "cell")?)?;
            let i = shape.index_of(&cell).ok_or_else(|| Error::Usage(format!("factor cell {cell} not in shape")))?;
            let e: i8 = match f.get("exp") {
                Some(e) => from_value(e, "exponent")?,
                None => 1,
            };
            factors.push((i, e));
        }
        return Ok(Rule::GroupWord { table, factors, target });
    }
    usage(format!("unknown rule {v}"))
}

/// A finite labeling with an explicit domain; `values[i]` labels
/// `domain.members()[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub domain: Shape,
    pub values: Vec<Symbol>,
}

impl Pattern {
    pub fn new(domain: Shape, values: Vec<Symbol>) -> Result<Pattern> {
        if domain.len() != values.len() {
            return usage("one value per domain cell");
        }
        Ok(Pattern { domain, values })
    }

    pub fn constant(domain: Shape, x: Symbol) -> Pattern {
        let values = vec![x; domain.len()];
        Pattern { domain, values }
    }

    /// Builds a pattern from `(cell, value)` pairs in any order.
    pub fn from_pairs(group: GroupSpec, pairs: impl IntoIterator<Item = (Element, Symbol)>) -> Pattern {
        let map: HashMap<Element, Symbol> = pairs.into_iter().collect();
        let domain = Shape::from_elements(group, map.keys().cloned().collect::<Vec<_>>());
        let values = domain.iter().map(|g| map[g]).collect();
        Pattern { domain, values }
    }

    pub fn get(&self, g: &Element) -> Option<Symbol> {
        self.domain.index_of(g).map(|i| self.values[i])
    }

    pub fn restrict(&self, to: &Shape) -> Result<Pattern> {
        let values = to
            .iter()
            .map(|g| self.get(g).ok_or_else(|| Error::Usage(format!("{g} outside the pattern domain"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Pattern { domain: to.clone(), values })
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Element, Symbol)> {
        self.domain.iter().zip(self.values.iter().copied())
    }

    pub fn to_json(&self) -> Value {
        json!({"domain": self.domain.to_json(), "values": self.values})
    }

    pub fn from_json(v: &Value) -> Result<Pattern> {
        let domain = Shape::from_json(field(v, "domain")?)?;
        let values: Vec<Symbol> = from_value(field(v, "values")?, "values")?;
        Pattern::new(domain, values)
    }
}

/// Translates `g` with `gS` inside `domain`.
pub(crate) fn fitting_translates(domain: &Shape, s: &Shape, inside: impl Fn(&Element) -> bool) -> Vec<Element> {
    let mut cands: Vec<Element> = Vec::new();
    for d in domain {
        for t in s {
            cands.push(d.op(&t.inv()));
        }
    }
    cands.sort();
    cands.dedup();
    cands.retain(|g| s.iter().all(|t| inside(&g.op(t))));
    cands
}

/// Every translate `gS` inside the domain carries an allowed pattern.
pub fn is_locally_legal(p: &Pattern, family: &TepFamily) -> bool {
    if p.domain.group != family.shape.group {
        return false;
    }
    let mut pat = vec![0; family.shape.len()];
    for g in fitting_translates(&p.domain, &family.shape, |x| p.domain.contains(x)) {
        for (slot, t) in pat.iter_mut().zip(&family.shape) {
            *slot = p.get(&g.op(t)).expect("fits");
        }
        if !family.allows(&pat) {
            return false;
        }
    }
    true
}

/// Whether `p` extends to a locally legal pattern on `d ⊇ domain`, by
/// exhaustive search. Meant for small instances and for families that are
/// not TEP, where local legality on convex sets does not imply a global
/// extension.
pub fn has_local_extension(p: &Pattern, d: &Shape, family: &TepFamily) -> Result<bool> {
    if !p.domain.is_subset(d) {
        return usage("extension target must contain the domain");
    }
    if !is_locally_legal(p, family) {
        return Ok(false);
    }
    let free: Vec<Element> = d.minus(&p.domain).members().to_vec();
    let mut vals: HashMap<Element, Symbol> = p.pairs().map(|(g, x)| (g.clone(), x)).collect();
    // translates completed by each free cell, with everything else placed before it
    let mut checks: Vec<Vec<Element>> = Vec::with_capacity(free.len());
    let pos: HashMap<&Element, usize> = free.iter().enumerate().map(|(i, g)| (g, i)).collect();
    for (i, a) in free.iter().enumerate() {
        let mut gs = Vec::new();
        for t in &family.shape {
            let g = a.op(&t.inv());
            let ok = family.shape.iter().all(|u| {
                let c = g.op(u);
                d.contains(&c) && pos.get(&c).is_none_or(|&j| j <= i)
            });
            if ok {
                gs.push(g);
            }
        }
        checks.push(gs);
    }
    fn go(
        i: usize,
        free: &[Element],
        checks: &[Vec<Element>],
        vals: &mut HashMap<Element, Symbol>,
        family: &TepFamily,
    ) -> bool {
        if i == free.len() {
            return true;
        }
        for b in 0..family.alphabet.size as Symbol {
            vals.insert(free[i].clone(), b);
            let ok = checks[i].iter().all(|g| {
                let pat: Vec<Symbol> = family.shape.iter().map(|t| vals[&g.op(t)]).collect();
                family.allows(&pat)
            });
            if ok && go(i + 1, free, checks, vals, family) {
                return true;
            }
        }
        vals.remove(&free[i]);
        false
    }
    Ok(go(0, &free, &checks, &mut vals, family))
}
