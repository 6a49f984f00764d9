//! Spacetime diagrams of one-dimensional automata `f(x)_i = x_{i-1} ⋅ x_i`.

use serde_json::{json, Value};
use tep_core::tep::{presets, Symbol};

use crate::CliError;

/// `next[left][self]`; symbol 0 is quiescent.
pub struct RowRule {
    pub next: Vec<Vec<Symbol>>,
    pub labels: Option<Vec<String>>,
}

impl RowRule {
    pub fn size(&self) -> u32 {
        self.next.len() as u32
    }

    pub fn label(&self, s: Symbol) -> String {
        match &self.labels {
            Some(l) => l[s as usize].clone(),
            None => s.to_string(),
        }
    }

    /// `s3`, `sum:Q`, or a JSON file `{"table": [[...]], "labels"?: [...]}`.
    pub fn parse(arg: &str) -> Result<RowRule, CliError> {
        if arg == "s3" {
            return Ok(RowRule { next: presets::s3_table(), labels: Some(presets::s3_labels()) });
        }
        if let Some(q) = arg.strip_prefix("sum:") {
            let q: usize = q.parse().ok().filter(|&q| (2..=256).contains(&q)).ok_or_else(|| CliError::usage("sum:Q needs 2 <= Q <= 256"))?;
            let next = (0..q).map(|l| (0..q).map(|x| ((l + x) % q) as Symbol).collect()).collect();
            return Ok(RowRule { next, labels: None });
        }
        let text = std::fs::read_to_string(arg).map_err(|e| CliError::usage(format!("cannot read rule {arg}: {e}")))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("bad rule file: {e}")))?;
        let next: Vec<Vec<Symbol>> = serde_json::from_value(v["table"].clone()).map_err(|e| CliError::usage(format!("bad rule table: {e}")))?;
        let n = next.len();
        if n == 0 || next.iter().any(|r| r.len() != n || r.iter().any(|&x| x as usize >= n)) {
            return Err(CliError::usage("rule table must be square over its own symbols"));
        }
        if next[0][0] != 0 {
            return Err(CliError::usage("symbol 0 must be quiescent: table[0][0] = 0"));
        }
        let labels = match v.get("labels") {
            None => None,
            Some(l) => {
                let l: Vec<String> = serde_json::from_value(l.clone()).map_err(|e| CliError::usage(format!("bad labels: {e}")))?;
                if l.len() != n {
                    return Err(CliError::usage("one label per symbol"));
                }
                Some(l)
            }
        };
        Ok(RowRule { next, labels })
    }

    /// A label or a decimal index.
    pub fn symbol(&self, s: &str) -> Result<Symbol, CliError> {
        if let Some(i) = self.labels.as_ref().and_then(|l| l.iter().position(|x| x == s)) {
            return Ok(i as Symbol);
        }
        match s.parse::<usize>() {
            Ok(i) if i < self.next.len() => Ok(i as Symbol),
            _ => Err(CliError::usage(format!("unknown symbol {s:?}"))),
        }
    }
}

/// A cell written into the diagram at row `y`, overriding the automaton.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedCell {
    pub symbol: String,
    pub x: i64,
    pub y: i64,
}

impl std::str::FromStr for SeedCell {
    type Err = String;
    /// `SYMBOL@X,Y`
    fn from_str(s: &str) -> Result<SeedCell, String> {
        let (sym, pos) = s.rsplit_once('@').ok_or_else(|| format!("expected SYMBOL@X,Y, got {s:?}"))?;
        let (x, y) = pos.split_once(',').ok_or_else(|| format!("expected SYMBOL@X,Y, got {s:?}"))?;
        let x = x.trim().parse().map_err(|_| format!("bad x in {s:?}"))?;
        let y = y.trim().parse().map_err(|_| format!("bad y in {s:?}"))?;
        Ok(SeedCell { symbol: sym.to_string(), x, y })
    }
}

impl std::fmt::Display for SeedCell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}@{},{}", self.symbol, self.x, self.y)
    }
}

pub struct Diagram {
    pub x_min: i64,
    pub y_top: i64,
    pub width: usize,
    pub rows: Vec<Vec<Symbol>>,
}

impl Diagram {
    pub fn to_json(&self, rule: &RowRule) -> Value {
        let mut v = json!({"x_min": self.x_min, "y_top": self.y_top, "width": self.width, "rows": self.rows});
        if let Some(l) = &rule.labels {
            v["labels"] = json!(l);
        }
        v
    }
}

/// Rows from the highest seed row downward. Everything outside the seeds is
/// quiescent; since information moves only rightward, a window starting at
/// the leftmost seed and `rows + margin` cells wide past the rightmost one
/// is exact.
pub fn evolve(rule: &RowRule, seeds: &[(Symbol, i64, i64)], rows: usize, margin: usize) -> Diagram {
    let (x_min, x_max, y_top) = if seeds.is_empty() {
        (0, 0, 0)
    } else {
        (
            seeds.iter().map(|s| s.1).min().unwrap(),
            seeds.iter().map(|s| s.1).max().unwrap(),
            seeds.iter().map(|s| s.2).max().unwrap(),
        )
    };
    let x_min = x_min - margin as i64;
    let width = (x_max - x_min) as usize + rows + margin + 1;
    let mut out: Vec<Vec<Symbol>> = Vec::with_capacity(rows);
    for r in 0..rows {
        let y = y_top - r as i64;
        let mut row = match out.last() {
            None => vec![0; width],
            Some(prev) => (0..width)
                .map(|i| {
                    let left = if i == 0 { 0 } else { prev[i - 1] };
                    rule.next[left as usize][prev[i] as usize]
                })
                .collect(),
        };
        for &(s, x, sy) in seeds {
            if sy == y {
                row[(x - x_min) as usize] = s;
            }
        }
        out.push(row);
    }
    Diagram { x_min, y_top, width, rows: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom_mod(n: u64, k: u64, p: u64) -> u64 {
        // Lucas
        let (mut n, mut k, mut r) = (n, k, 1);
        while n > 0 || k > 0 {
            let (a, b) = (n % p, k % p);
            if b > a {
                return 0;
            }
            let mut c = 1u64;
            for i in 0..b {
                c = c * (a - i) / (i + 1);
            }
            r = r * (c % p) % p;
            n /= p;
            k /= p;
        }
        r
    }

    fn nonzero(d: &Diagram, x0: i64) -> Vec<(usize, i64)> {
        let mut v = Vec::new();
        for (t, row) in d.rows.iter().enumerate() {
            for (i, &s) in row.iter().enumerate() {
                if s != 0 {
                    v.push((t, d.x_min + i as i64 - x0));
                }
            }
        }
        v
    }

    fn pascal(rows: usize, p: u64) -> Vec<(usize, i64)> {
        let mut v = Vec::new();
        for t in 0..rows {
            for j in 0..=t {
                if binom_mod(t as u64, j as u64, p) != 0 {
                    v.push((t, j as i64));
                }
            }
        }
        v
    }

    #[test]
    fn lone_b_and_lone_a_draw_pascal_triangles() {
        let rule = RowRule::parse("s3").unwrap();
        let b = rule.symbol("B").unwrap();
        let a = rule.symbol("a").unwrap();
        let d = evolve(&rule, &[(b, 5, 0)], 40, 2);
        assert_eq!(nonzero(&d, 5), pascal(40, 2));
        let d = evolve(&rule, &[(a, -3, 7)], 40, 0);
        assert_eq!(nonzero(&d, -3), pascal(40, 3));
        // values below a lone a follow a^C(t, j)
        let pow = [0, a, rule.next[a as usize][a as usize]];
        for (t, row) in d.rows.iter().enumerate() {
            for j in 0..=t {
                assert_eq!(row[j], pow[binom_mod(t as u64, j as u64, 3) as usize]);
            }
        }
    }

    #[test]
    fn quiescent_row_stays_quiescent() {
        let rule = RowRule::parse("s3").unwrap();
        let d = evolve(&rule, &[(0, 0, 0), (0, 9, 0)], 20, 3);
        assert!(d.rows.iter().all(|r| r.iter().all(|&s| s == 0)));
    }

    #[test]
    fn every_window_satisfies_the_rule() {
        let rule = RowRule::parse("s3").unwrap();
        let seeds = [(rule.symbol("B").unwrap(), -32, 22), (rule.symbol("a").unwrap(), 0, 0)];
        let d = evolve(&rule, &seeds, 90, 2);
        for t in 1..d.rows.len() {
            let y = d.y_top - t as i64;
            for i in 1..d.width {
                let seeded = seeds.iter().any(|s| s.2 == y && s.1 - d.x_min == i as i64);
                if !seeded {
                    assert_eq!(d.rows[t][i], rule.next[d.rows[t - 1][i - 1] as usize][d.rows[t - 1][i] as usize]);
                }
            }
        }
        // B ∘ a = *: the collision produces stars
        let star = rule.symbol("*").unwrap();
        assert!(d.rows.iter().any(|r| r.contains(&star)));
    }

    #[test]
    fn seed_cells_parse() {
        assert_eq!("B@-32,22".parse::<SeedCell>().unwrap(), SeedCell { symbol: "B".into(), x: -32, y: 22 });
        assert_eq!("*@1,2".parse::<SeedCell>().unwrap().symbol, "*");
        assert!("B-32,22".parse::<SeedCell>().is_err());
        assert!(RowRule::parse("sum:1").is_err());
        assert_eq!(RowRule::parse("sum:3").unwrap().next[2][2], 1);
    }
}
