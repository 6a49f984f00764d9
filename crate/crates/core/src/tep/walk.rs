//! Walking an anti-shelling: legal corner symbols, extension, counting and
//! perfect sampling.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use rand::Rng;

use super::{is_locally_legal, Pattern, Symbol, TepFamily};
use crate::error::{usage, Error, Result};
use crate::geometry::{ConvexGeometry, Policy};
use crate::group::{Element, Shape};
use crate::rng::step_rng;

/// What counting needs to know about a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMeta {
    pub shape: Shape,
    pub alphabet: u32,
    pub k: u32,
}

/// `|A|^m k^n`
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvexCount {
    pub m: u64,
    pub n: u64,
    pub alphabet: u32,
    pub k: u32,
}

impl ConvexCount {
    pub fn count(&self) -> BigUint {
        BigUint::from(self.alphabet).pow(self.m as u32) * BigUint::from(self.k).pow(self.n as u32)
    }

    pub fn factorization(&self) -> Vec<(u128, u64)> {
        let mut f: HashMap<u128, u64> = HashMap::new();
        for (p, e) in factorize(self.alphabet as u128) {
            *f.entry(p).or_default() += e as u64 * self.m;
        }
        for (p, e) in factorize(self.k as u128) {
            *f.entry(p).or_default() += e as u64 * self.n;
        }
        let mut v: Vec<(u128, u64)> = f.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort();
        v
    }
}

/// Prime factorization by trial division.
pub fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut p = 2u128;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Choice {
    First,
    Seeded(u64),
}

/// One translate completed at a walk step: the other cells' positions and
/// member indices, and the member index of the new cell.
#[derive(Clone, Debug)]
struct Constraint {
    others: Vec<(usize, usize)>,
    own: usize,
}

/// For each position of `order`, the translates of `shape` whose last cell
/// (in walk order) sits there.
fn build_plan(shape: &Shape, order: &[Element]) -> Vec<Vec<Constraint>> {
    let pos: HashMap<&Element, usize> = order.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let inv: Vec<Element> = shape.iter().map(Element::inv).collect();
    let mut plan = Vec::with_capacity(order.len());
    for (i, a) in order.iter().enumerate() {
        let mut cons = Vec::new();
        for (own, si) in inv.iter().enumerate() {
            let g = a.op(si);
            let mut others = Vec::with_capacity(shape.len() - 1);
            let fits = shape.iter().enumerate().filter(|&(j, _)| j != own).all(|(j, t)| match pos.get(&g.op(t)) {
                Some(&p) if p < i => {
                    others.push((p, j));
                    true
                }
                _ => false,
            });
            if fits {
                cons.push(Constraint { others, own });
            }
        }
        plan.push(cons);
    }
    plan
}

fn legal_symbols(family: &TepFamily, cons: &[Constraint], vals: &[Symbol], out: &mut Vec<Symbol>) {
    out.clear();
    let a = family.alphabet.size as Symbol;
    if cons.is_empty() {
        out.extend(0..a);
        return;
    }
    if family.is_materialized() {
        let bases: Vec<(u64, u64)> = cons
            .iter()
            .map(|c| (c.others.iter().map(|&(p, j)| vals[p] as u64 * family.weight(j)).sum(), family.weight(c.own)))
            .collect();
        for b in 0..a {
            if bases.iter().all(|&(base, w)| family.allows_index(base + b as u64 * w)) {
                out.push(b);
            }
        }
    } else {
        let mut pat = vec![0; family.shape.len()];
        for b in 0..a {
            let ok = cons.iter().all(|c| {
                for &(p, j) in &c.others {
                    pat[j] = vals[p];
                }
                pat[c.own] = b;
                family.allows(&pat)
            });
            if ok {
                out.push(b);
            }
        }
    }
}

fn expected_count(family: &TepFamily, cons: &[Constraint]) -> usize {
    if cons.is_empty() {
        family.alphabet.size as usize
    } else {
        family.k as usize
    }
}

fn inconsistency(cell: &Element, got: usize, want: usize, translates: usize) -> Error {
    Error::Inconsistent(format!(
        "{got} legal symbols at {cell} where {want} were expected ({translates} fitting translates)"
    ))
}

fn check_family_group(family: &TepFamily, geometry: &ConvexGeometry, s: &Shape) -> Result<()> {
    if family.shape.group != geometry.group || s.group != geometry.group {
        return usage("family, geometry and shape must share a group");
    }
    Ok(())
}

/// Symbols `b` making `P ∪ (a ↦ b)` locally legal. The count is exactly `k`
/// when a translate of `S` through `a` fits in `C ∪ {a}`, else `|A|`.
pub fn legal_corner_symbols(
    p: &Pattern,
    a: &Element,
    family: &TepFamily,
    geometry: &ConvexGeometry,
) -> Result<Vec<Symbol>> {
    check_family_group(family, geometry, &p.domain)?;
    if p.domain.contains(a) {
        return usage(format!("{a} is already in the pattern domain"));
    }
    let bigger = p.domain.with(a.clone());
    if !geometry.is_convex(&p.domain) || !geometry.is_convex(&bigger) {
        return usage("C and C ∪ {a} must both be convex");
    }
    let mut order = p.domain.members().to_vec();
    order.push(a.clone());
    let plan = build_plan(&family.shape, &order);
    let mut vals = p.values.clone();
    vals.push(0);
    let mut out = Vec::new();
    let cons = &plan[order.len() - 1];
    legal_symbols(family, cons, &vals, &mut out);
    let want = expected_count(family, cons);
    if out.len() != want {
        return Err(inconsistency(a, out.len(), want, cons.len()));
    }
    Ok(out)
}

/// Extends a locally legal pattern on convex `C` to convex `D ⊇ C`.
pub fn extend_to_configuration(
    p: &Pattern,
    family: &TepFamily,
    geometry: &ConvexGeometry,
    d: &Shape,
    choice: Choice,
) -> Result<Pattern> {
    check_family_group(family, geometry, d)?;
    if !is_locally_legal(p, family) {
        return usage("pattern is not locally legal");
    }
    let shelling = geometry.anti_shelling(&p.domain, d, Policy::MinCanonical)?;
    let mut order = p.domain.members().to_vec();
    order.extend(shelling.added.iter().cloned());
    let plan = build_plan(&family.shape, &order);
    let mut vals = p.values.clone();
    vals.resize(order.len(), 0);
    let mut opts = Vec::new();
    for i in p.domain.len()..order.len() {
        legal_symbols(family, &plan[i], &vals, &mut opts);
        let want = expected_count(family, &plan[i]);
        if opts.len() != want {
            return Err(inconsistency(&order[i], opts.len(), want, plan[i].len()));
        }
        vals[i] = match choice {
            Choice::First => opts[0],
            Choice::Seeded(seed) => opts[step_rng(seed, i as u64).gen_range(0..opts.len())],
        };
    }
    Ok(Pattern::from_pairs(d.group, order.into_iter().zip(vals)))
}

/// `(m, n)` for convex `C`: steps of a greedy anti-shelling from the empty set
/// with no fitting translate, and with one.
pub fn count_convex(c: &Shape, meta: &FamilyMeta, geometry: &ConvexGeometry) -> Result<ConvexCount> {
    if c.group != geometry.group || meta.shape.group != geometry.group {
        return usage("shape, family and geometry must share a group");
    }
    if !geometry.is_convex(c) {
        return usage(format!("count_convex needs a convex set; {c} is not (try brute force)"));
    }
    let shelling = geometry.anti_shelling_unchecked(&Shape::empty(c.group), c, Policy::MinCanonical)?;
    let plan = build_plan(&meta.shape, &shelling.added);
    let n = plan.iter().filter(|c| !c.is_empty()).count() as u64;
    Ok(ConvexCount { m: c.len() as u64 - n, n, alphabet: meta.alphabet, k: meta.k })
}

/// Number of globally legal patterns on an arbitrary finite `B`: distinct
/// restrictions to `B` of locally legal patterns on the closure of `B`.
pub fn count_shape_bruteforce(
    b: &Shape,
    family: &TepFamily,
    geometry: &ConvexGeometry,
    budget: u64,
) -> Result<u128> {
    check_family_group(family, geometry, b)?;
    if b.is_empty() {
        return Ok(1);
    }
    let d = geometry.closure(b)?;
    let mut order = geometry.anti_shelling_unchecked(&Shape::empty(d.group), &d, Policy::MinCanonical)?.added;
    // cells after the last cell of B cannot change the projection
    let last = order.iter().rposition(|g| b.contains(g)).expect("B ⊆ closure(B)");
    order.truncate(last + 1);
    let plan = build_plan(&family.shape, &order);
    let det = plan.iter().filter(|c| !c.is_empty()).count() as u64;
    let free = order.len() as u64 - det;
    let est = (family.alphabet.size as f64).powi(free as i32) * (family.k as f64).powi(det as i32);
    if est > budget as f64 {
        return Err(Error::Resource {
            what: format!("enumerating |A|^{free} k^{det} ≈ {est:.3e} patterns"),
            estimate: Some((free, det)),
        });
    }
    let b_pos: Vec<usize> = order.iter().enumerate().filter(|(_, g)| b.contains(g)).map(|(i, _)| i).collect();
    let a = family.alphabet.size as u128;
    let packable = (b_pos.len() as f64) * (a as f64).log2() < 127.0;
    let mut seen_packed: HashSet<u128> = HashSet::new();
    let mut seen_vec: HashSet<Vec<Symbol>> = HashSet::new();
    let mut vals = vec![0; order.len()];
    let mut opts: Vec<Vec<Symbol>> = vec![Vec::new(); order.len()];
    let mut cursor = vec![0usize; order.len()];
    const MEMORY_GUARD: usize = 100_000_000;
    // iterative depth-first enumeration
    let mut depth = 0usize;
    let mut scratch = Vec::new();
    legal_symbols(family, &plan[0], &vals, &mut scratch);
    opts[0] = scratch.clone();
    loop {
        if cursor[depth] == opts[depth].len() {
            if depth == 0 {
                break;
            }
            depth -= 1;
            cursor[depth] += 1;
            continue;
        }
        vals[depth] = opts[depth][cursor[depth]];
        if depth + 1 == order.len() {
            let len = if packable {
                seen_packed.insert(b_pos.iter().fold(0u128, |acc, &p| acc * a + vals[p] as u128));
                seen_packed.len()
            } else {
                seen_vec.insert(b_pos.iter().map(|&p| vals[p]).collect());
                seen_vec.len()
            };
            if len > MEMORY_GUARD {
                return Err(Error::Resource { what: "distinct projections exceed the memory guard".into(), estimate: Some((free, det)) });
            }
            cursor[depth] += 1;
            continue;
        }
        depth += 1;
        legal_symbols(family, &plan[depth], &vals, &mut scratch);
        let want = expected_count(family, &plan[depth]);
        if scratch.len() != want {
            return Err(inconsistency(&order[depth], scratch.len(), want, plan[depth].len()));
        }
        opts[depth].clone_from(&scratch);
        cursor[depth] = 0;
    }
    Ok(if packable { seen_packed.len() } else { seen_vec.len() } as u128)
}

/// Reusable perfect sampler on a fixed convex region.
pub struct Sampler<'a> {
    family: &'a TepFamily,
    region: Shape,
    order: Vec<Element>,
    plan: Vec<Vec<Constraint>>,
}

impl<'a> Sampler<'a> {
    /// Trusts that `c` is convex; the walk raises an inconsistency if not.
    pub fn new(c: &Shape, family: &'a TepFamily, geometry: &ConvexGeometry) -> Result<Sampler<'a>> {
        check_family_group(family, geometry, c)?;
        let order = geometry.anti_shelling_unchecked(&Shape::empty(c.group), c, Policy::MinCanonical)?.added;
        let plan = build_plan(&family.shape, &order);
        Ok(Sampler { family, region: c.clone(), order, plan })
    }

    pub fn order(&self) -> &[Element] {
        &self.order
    }

    /// Values in walk order.
    pub fn sample_raw(&self, seed: u64) -> Result<Vec<Symbol>> {
        let mut vals = vec![0; self.order.len()];
        let mut opts = Vec::new();
        for i in 0..self.order.len() {
            legal_symbols(self.family, &self.plan[i], &vals, &mut opts);
            let want = expected_count(self.family, &self.plan[i]);
            if opts.len() != want {
                return Err(inconsistency(&self.order[i], opts.len(), want, self.plan[i].len()));
            }
            vals[i] = opts[step_rng(seed, i as u64).gen_range(0..opts.len())];
        }
        Ok(vals)
    }

    pub fn sample(&self, seed: u64) -> Result<Pattern> {
        let vals = self.sample_raw(seed)?;
        let by_cell: HashMap<&Element, Symbol> = self.order.iter().zip(vals).collect();
        let values = self.region.iter().map(|g| by_cell[g]).collect();
        Ok(Pattern { domain: self.region.clone(), values })
    }
}

/// A uniform sample of the legal patterns on convex `C`, reproducible per seed.
pub fn sample_tep(c: &Shape, family: &TepFamily, geometry: &ConvexGeometry, seed: u64) -> Result<Pattern> {
    Sampler::new(c, family, geometry)?.sample(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{lattice_rect, GroupSpec};

    fn ledrappier() -> TepFamily {
        TepFamily::sum_zero(Shape::lattice(&[&[1, 0], &[0, 1], &[1, 1]]), 2).unwrap()
    }

    #[test]
    fn forced_parity() {
        let f = ledrappier();
        let g = ConvexGeometry::std_lattice(2);
        let p = Pattern::from_pairs(GroupSpec::Lattice(2), [(Element::lattice(&[0, 1]), 0), (Element::lattice(&[1, 1]), 1)]);
        assert_eq!(legal_corner_symbols(&p, &Element::lattice(&[1, 0]), &f, &g).unwrap(), vec![1]);
        let q = Pattern::from_pairs(GroupSpec::Lattice(2), [(Element::lattice(&[0, 1]), 0)]);
        assert_eq!(legal_corner_symbols(&q, &Element::lattice(&[1, 1]), &f, &g).unwrap(), vec![0, 1]);
    }

    #[test]
    fn zero_extends_to_zero() {
        let f = ledrappier();
        let g = ConvexGeometry::std_lattice(2);
        let seg = Shape::lattice(&[&[0, 0], &[1, 0], &[2, 0]]);
        let out = extend_to_configuration(&Pattern::constant(seg, 0), &f, &g, &lattice_rect(3, 3), Choice::First).unwrap();
        assert!(out.values.iter().all(|&x| x == 0));
    }

    #[test]
    fn rectangle_counts() {
        let f = ledrappier();
        let g = ConvexGeometry::std_lattice(2);
        assert_eq!(count_shape_bruteforce(&lattice_rect(3, 3), &f, &g, 1 << 20).unwrap(), 32);
        let c = count_convex(&lattice_rect(2, 3), &f.meta(), &g).unwrap();
        assert_eq!((c.m, c.n), (4, 2));
        assert_eq!(c.count(), BigUint::from(16u32));
        assert!(matches!(count_shape_bruteforce(&lattice_rect(4, 4), &f, &g, 4), Err(Error::Resource { .. })));
    }

    #[test]
    fn factor_small() {
        assert_eq!(factorize(5616), vec![(2, 4), (3, 3), (13, 1)]);
        assert_eq!(factorize(1), vec![]);
    }
}
