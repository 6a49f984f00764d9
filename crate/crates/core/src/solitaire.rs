//! The independence solitaire: supports are moved by swapping one cell of a
//! translate `gS` for another when the rest of the translate is present.

use std::collections::{HashMap, HashSet, VecDeque};

use serde_json::{json, Value};

use crate::error::{usage, Error, Result};
use crate::geometry::ConvexGeometry;
use crate::group::{Element, GroupSpec, Shape};
use crate::tep::{count_shape_bruteforce, Pattern, Symbol, TepFamily, Uniformity, VERIFY_BUDGET};

/// Above this many states, callers should not ask for member lists.
pub const MEMBER_LIMIT: usize = 1_000_000;

/// Swap across the translate `gS`: `a` leaves the support, `b` enters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolitaireMove {
    pub g: Element,
    pub a: Element,
    pub b: Element,
}

impl SolitaireMove {
    pub fn reverse(&self) -> SolitaireMove {
        SolitaireMove { g: self.g.clone(), a: self.b.clone(), b: self.a.clone() }
    }

    pub fn to_json(&self) -> Value {
        json!({"g": self.g.to_json(), "a": self.a.to_json(), "b": self.b.to_json()})
    }

    pub fn from_json(group: GroupSpec, v: &Value) -> Result<SolitaireMove> {
        let get = |k: &str| -> Result<Element> {
            group.parse_element(v.get(k).ok_or_else(|| Error::Usage(format!("move needs field {k:?}")))?)
        };
        Ok(SolitaireMove { g: get("g")?, a: get("a")?, b: get("b")? })
    }
}

fn in_t(g: &Element, t: &Shape, x: &Element) -> bool {
    t.contains(&g.ldiv(x))
}

/// All legal moves, sorted and without duplicates.
pub fn legal_moves(y: &Shape, s: &Shape, t: &Shape) -> Vec<SolitaireMove> {
    let mut gs: Vec<Element> = y.iter().flat_map(|d| s.iter().map(move |u| d.op(&u.inv()))).collect();
    gs.sort();
    gs.dedup();
    let mut out = Vec::new();
    for g in gs {
        let cells: Vec<Element> = s.iter().map(|u| g.op(u)).collect();
        let missing: Vec<&Element> = cells.iter().filter(|c| !y.contains(c)).collect();
        let [m] = missing[..] else { continue };
        if !in_t(&g, t, m) {
            continue;
        }
        for p in &cells {
            if p != m && y.contains(p) && in_t(&g, t, p) {
                out.push(SolitaireMove { g: g.clone(), a: p.clone(), b: m.clone() });
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Names the first violated clause, if any. Accepts either orientation of
/// `(a, b)`.
pub fn check_move(y: &Shape, mv: &SolitaireMove, s: &Shape, t: &Shape) -> Result<()> {
    if mv.a == mv.b {
        return usage("a and b must differ");
    }
    if !in_t(&mv.g, t, &mv.a) || !in_t(&mv.g, t, &mv.b) {
        return usage("a and b must both lie in gT");
    }
    if y.contains(&mv.a) == y.contains(&mv.b) {
        return usage("exactly one of a, b must be in the support");
    }
    for u in s {
        let c = mv.g.op(u);
        if c != mv.a && c != mv.b && !y.contains(&c) {
            return usage(format!("gS \\ {{a, b}} must lie in the support; {c} is missing"));
        }
    }
    Ok(())
}

/// The support after the swap; the cell in the support leaves.
pub fn apply_move(y: &Shape, mv: &SolitaireMove, s: &Shape, t: &Shape) -> Result<Shape> {
    check_move(y, mv, s, t)?;
    let (out, inn) = if y.contains(&mv.a) { (&mv.a, &mv.b) } else { (&mv.b, &mv.a) };
    Ok(y.without(out).with(inn.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub size: u64,
    /// True when the whole component was explored within the budget.
    pub exhausted: bool,
    pub budget: u64,
    pub members: Option<Vec<Shape>>,
}

impl ComponentReport {
    pub fn to_json(&self) -> Value {
        let mut v = json!({"size": self.size, "exhausted": self.exhausted, "budget": self.budget});
        if let Some(m) = &self.members {
            v["members"] = json!(m.iter().map(Shape::to_json).collect::<Vec<_>>());
        }
        v
    }
}

struct Interner {
    ids: HashMap<Element, u32>,
    elems: Vec<Element>,
}

impl Interner {
    fn id(&mut self, g: &Element) -> u32 {
        if let Some(&i) = self.ids.get(g) {
            return i;
        }
        let i = self.elems.len() as u32;
        self.ids.insert(g.clone(), i);
        self.elems.push(g.clone());
        i
    }
}

/// Cells of one translate.
struct Translate {
    g: u32,
    cells: Box<[u32]>,
}

/// A support as a sorted list of interned cell ids.
trait State: Clone + Eq + std::hash::Hash {
    fn pack(ids: &[u32]) -> Option<Self>;
    fn unpack(&self, len: usize, out: &mut Vec<u32>);
}

/// Up to 16 cells with ids below 256, one byte each.
impl State for u128 {
    fn pack(ids: &[u32]) -> Option<u128> {
        if ids.len() > 16 {
            return None;
        }
        let mut x = 0u128;
        for (k, &i) in ids.iter().enumerate() {
            if i > 0xff {
                return None;
            }
            x |= (i as u128) << (8 * k);
        }
        Some(x)
    }

    fn unpack(&self, len: usize, out: &mut Vec<u32>) {
        out.clear();
        out.extend((0..len).map(|k| ((self >> (8 * k)) & 0xff) as u32));
    }
}

impl State for Box<[u32]> {
    fn pack(ids: &[u32]) -> Option<Box<[u32]>> {
        Some(ids.into())
    }

    fn unpack(&self, _: usize, out: &mut Vec<u32>) {
        out.clear();
        out.extend_from_slice(self);
    }
}

/// Breadth-first closure of `y` under legal moves, stopping once more than
/// `limit` states are known.
pub fn component(y: &Shape, s: &Shape, t: &Shape, limit: u64, keep_members: bool) -> ComponentReport {
    bfs::<u128>(y, s, t, limit, keep_members).unwrap_or_else(|| {
        bfs::<Box<[u32]>>(y, s, t, limit, keep_members).expect("unbounded state type")
    })
}

/// `None` if some reachable state does not fit `St`.
fn bfs<St: State>(y: &Shape, s: &Shape, t: &Shape, limit: u64, keep_members: bool) -> Option<ComponentReport> {
    let mut names = Interner { ids: HashMap::new(), elems: Vec::new() };
    let mut g_names = Interner { ids: HashMap::new(), elems: Vec::new() };
    let inv: Vec<Element> = s.iter().map(Element::inv).collect();
    let in_t: Vec<bool> = s.iter().map(|u| t.contains(u)).collect();
    let k = inv.len();
    // translates through cell d, indexed by d * |S| + i
    let mut cache: Vec<Option<Translate>> = Vec::new();

    let len = y.len();
    let mut start: Vec<u32> = y.iter().map(|g| names.id(g)).collect();
    start.sort_unstable();
    let start = St::pack(&start)?;
    let mut seen: HashSet<St> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    let mut exhausted = true;
    let mut done_g: Vec<u32> = Vec::new();
    let mut state: Vec<u32> = Vec::with_capacity(len);
    let mut next: Vec<u32> = Vec::with_capacity(len);

    'bfs: while let Some(packed) = queue.pop_front() {
        packed.unpack(len, &mut state);
        done_g.clear();
        for &d in &state {
            for i in 0..k {
                let slot = d as usize * k + i;
                if slot >= cache.len() {
                    cache.resize_with(slot + 1, || None);
                }
                if cache[slot].is_none() {
                    let g = names.elems[d as usize].op(&inv[i]);
                    let gid = g_names.id(&g);
                    let cells: Box<[u32]> = s.iter().map(|u| names.id(&g.op(u))).collect();
                    cache[slot] = Some(Translate { g: gid, cells });
                }
                let tr = cache[slot].as_ref().expect("filled");
                if done_g.contains(&tr.g) {
                    continue;
                }
                done_g.push(tr.g);
                let mut missing = None;
                let mut count = 0;
                for (j, c) in tr.cells.iter().enumerate() {
                    if state.binary_search(c).is_err() {
                        count += 1;
                        missing = Some(j);
                    }
                }
                let (1, Some(mj)) = (count, missing) else { continue };
                if !in_t[mj] {
                    continue;
                }
                let m = tr.cells[mj];
                for (j, &p) in tr.cells.iter().enumerate() {
                    if j == mj || !in_t[j] {
                        continue;
                    }
                    next.clear();
                    next.extend(state.iter().copied().filter(|&x| x != p));
                    let pos = next.binary_search(&m).unwrap_err();
                    next.insert(pos, m);
                    let candidate = St::pack(&next)?;
                    if !seen.contains(&candidate) {
                        if seen.len() as u64 >= limit {
                            exhausted = false;
                            break 'bfs;
                        }
                        seen.insert(candidate.clone());
                        queue.push_back(candidate);
                    }
                }
            }
        }
    }
    let members = keep_members.then(|| {
        let mut ids = Vec::new();
        let mut v: Vec<Shape> = seen
            .iter()
            .map(|st| {
                st.unpack(len, &mut ids);
                Shape::from_elements(y.group, ids.iter().map(|&i| names.elems[i as usize].clone()))
            })
            .collect();
        v.sort_by(|a, b| a.members().cmp(b.members()));
        v
    });
    Some(ComponentReport { size: seen.len() as u64, exhausted, budget: limit, members })
}

/// Every assignment of symbols to the support is globally legal.
pub fn verify_independent(y: &Shape, family: &TepFamily, geometry: &ConvexGeometry, budget: u64) -> Result<bool> {
    let total = (family.alphabet.size as f64).powi(y.len() as i32);
    if total > budget as f64 {
        return Err(Error::Resource { what: format!("|A|^{} patterns on the support", y.len()), estimate: None });
    }
    let count = count_shape_bruteforce(y, family, geometry, budget)?;
    Ok(count == (family.alphabet.size as u128).pow(y.len() as u32))
}

/// Carries a pattern on the support across a move: the leaving cell's value
/// is forgotten and the entering cell gets the unique symbol completing `gS`.
pub fn transport_pattern(p: &Pattern, mv: &SolitaireMove, family: &TepFamily) -> Result<Pattern> {
    let (a, b) = if p.domain.contains(&mv.a) { (&mv.a, &mv.b) } else { (&mv.b, &mv.a) };
    if !p.domain.contains(a) || p.domain.contains(b) {
        return usage("the move must swap a support cell for a cell outside it");
    }
    let local = Shape::from_elements(family.shape.group, [mv.g.ldiv(a), mv.g.ldiv(b)]);
    if !local.is_subset(&family.shape) {
        return usage("a and b must lie in gS");
    }
    if family.verify_uniform_extensions(&local, VERIFY_BUDGET)? != Uniformity::Uniform(1) {
        return usage("family is not 1-uniform at the swapped cells");
    }
    let bi = family.shape.index_of(&mv.g.ldiv(b)).expect("checked");
    let mut pat = vec![0; family.shape.len()];
    for (j, u) in family.shape.iter().enumerate() {
        if j != bi {
            let c = mv.g.op(u);
            pat[j] = p.get(&c).ok_or_else(|| Error::Usage(format!("{c} of gS is not in the support")))?;
        }
    }
    let mut value: Option<Symbol> = None;
    for x in 0..family.alphabet.size as Symbol {
        pat[bi] = x;
        if family.allows(&pat) {
            value = Some(x);
            break;
        }
    }
    let value = value.expect("1-uniform");
    let pairs = p.pairs().filter(|(g, _)| *g != a).map(|(g, x)| (g.clone(), x)).chain([(b.clone(), value)]);
    Ok(Pattern::from_pairs(p.domain.group, pairs))
}
