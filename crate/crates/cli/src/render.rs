//! Raster, SVG and text renderings of patterns on `Z^2` and free groups.

use std::fmt::Write as _;

use tep_core::tep::{Pattern, Symbol};
use tep_core::{Element, GroupSpec};

use crate::CliError;

/// Symbol `s` gets `PALETTE[s % 12]`; binary alphabets use black and white.
pub const PALETTE: [[u8; 3]; 12] = [
    [224, 224, 224],
    [228, 26, 28],
    [55, 126, 184],
    [77, 175, 74],
    [152, 78, 163],
    [255, 127, 0],
    [255, 255, 51],
    [166, 86, 40],
    [247, 129, 191],
    [153, 153, 153],
    [0, 0, 0],
    [102, 194, 165],
];

const OUTSIDE: [u8; 3] = [255, 255, 255];
const OUTSIDE_BINARY: [u8; 3] = [160, 160, 160];

pub fn color(s: Symbol, alphabet: u32) -> [u8; 3] {
    if alphabet <= 2 {
        if s == 0 { [255, 255, 255] } else { [0, 0, 0] }
    } else {
        PALETTE[s as usize % PALETTE.len()]
    }
}

/// Row-major cells, top row first; `None` outside the domain.
pub struct Grid {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<Option<Symbol>>,
}

impl Grid {
    pub fn from_pattern(p: &Pattern) -> Result<Grid, CliError> {
        if p.domain.group != GroupSpec::Lattice(2) {
            return Err(CliError::usage("grid output needs a pattern on Z^2"));
        }
        if p.domain.is_empty() {
            return Ok(Grid { width: 0, height: 0, cells: Vec::new() });
        }
        let xs = p.domain.iter().map(|g| g.coords()[0]);
        let ys = p.domain.iter().map(|g| g.coords()[1]);
        let (x_min, x_max) = (xs.clone().min().unwrap(), xs.max().unwrap());
        let (y_min, y_max) = (ys.clone().min().unwrap(), ys.max().unwrap());
        let width = (x_max - x_min + 1) as usize;
        let height = (y_max - y_min + 1) as usize;
        let mut cells = vec![None; width * height];
        for (g, v) in p.pairs() {
            let (x, y) = (g.coords()[0], g.coords()[1]);
            cells[(y_max - y) as usize * width + (x - x_min) as usize] = Some(v);
        }
        Ok(Grid { width, height, cells })
    }

    pub fn rows(width: usize, rows: &[Vec<Symbol>]) -> Grid {
        let cells = rows.iter().flat_map(|r| r.iter().map(|&s| Some(s))).collect();
        Grid { width, height: rows.len(), cells }
    }

    fn at(&self, col: usize, row: usize) -> Option<Symbol> {
        self.cells[row * self.width + col]
    }
}

/// Binary PBM (P4); outside cells are white.
pub fn pbm(g: &Grid, alphabet: u32, px: usize) -> Result<Vec<u8>, CliError> {
    if alphabet > 2 {
        return Err(CliError::usage(format!("pbm needs a binary alphabet, this one has {alphabet} symbols; use ppm")));
    }
    let (w, h) = (g.width * px, g.height * px);
    let mut out = format!("P4\n{w} {h}\n").into_bytes();
    let stride = w.div_ceil(8);
    for row in 0..h {
        let mut line = vec![0u8; stride];
        for col in 0..w {
            if g.at(col / px, row / px).is_some_and(|s| s != 0) {
                line[col / 8] |= 0x80 >> (col % 8);
            }
        }
        out.extend(line);
    }
    Ok(out)
}

/// Binary PPM (P6).
pub fn ppm(g: &Grid, alphabet: u32, px: usize) -> Vec<u8> {
    let (w, h) = (g.width * px, g.height * px);
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    let outside = if alphabet <= 2 { OUTSIDE_BINARY } else { OUTSIDE };
    for row in 0..h {
        for col in 0..w {
            out.extend(g.at(col / px, row / px).map_or(outside, |s| color(s, alphabet)));
        }
    }
    out
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

pub fn svg_grid(g: &Grid, alphabet: u32, px: usize) -> String {
    let (w, h) = (g.width * px, g.height * px);
    let mut s = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n");
    for row in 0..g.height {
        for col in 0..g.width {
            if let Some(v) = g.at(col, row) {
                let _ = writeln!(
                    s,
                    "<rect x=\"{}\" y=\"{}\" width=\"{px}\" height=\"{px}\" fill=\"{}\"/>",
                    col * px,
                    row * px,
                    hex(color(v, alphabet))
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

/// One character per cell: the symbol label when it is a single character,
/// else a base-36 digit; `.` outside the domain.
pub fn ascii(g: &Grid, label: impl Fn(Symbol) -> String) -> String {
    let ch = |s: Symbol| {
        let l = label(s);
        let mut it = l.chars();
        match (it.next(), it.next()) {
            (Some(c), None) => c,
            _ => std::char::from_digit(s as u32 % 36, 36).unwrap(),
        }
    };
    let mut out = String::with_capacity((g.width + 1) * g.height);
    for row in 0..g.height {
        for col in 0..g.width {
            out.push(g.at(col, row).map_or('.', ch));
        }
        out.push('\n');
    }
    out
}

/// Three decimals, never `-0.000`.
fn num(v: f64) -> String {
    format!("{:.3}", (v * 1000.0).round() / 1000.0 + 0.0)
}

fn direction(letter: i8, rank: u32) -> (f64, f64) {
    let k = letter.unsigned_abs() as f64 - 1.0;
    let mut angle = k * std::f64::consts::PI / rank as f64;
    if letter < 0 {
        angle += std::f64::consts::PI;
    }
    // SVG y grows downward
    (angle.cos(), -angle.sin())
}

/// Tree drawing of a pattern on `F_n`: the identity at the origin, generator
/// `k` along angle `(k-1)π/n` (so `a` east, `b` north on `F_2`), inverses
/// opposite, and each edge `shrink` times its parent edge.
pub fn svg_tree(p: &Pattern, alphabet: u32, shrink: f64) -> Result<String, CliError> {
    let GroupSpec::Free(rank) = p.domain.group else {
        return Err(CliError::usage("tree output needs a pattern on a free group"));
    };
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(CliError::usage("shrink factor must lie in (0, 1)"));
    }
    const EDGE: f64 = 100.0;
    let pos = |w: &Element| {
        let (mut x, mut y, mut len) = (0.0, 0.0, EDGE);
        for &l in w.letters() {
            let (dx, dy) = direction(l, rank);
            x += dx * len;
            y += dy * len;
            len *= shrink;
        }
        (x, y)
    };
    let depth = p.domain.iter().map(Element::word_len).max().unwrap_or(0);
    let extent = EDGE * (1.0 - shrink.powi(depth as i32)) / (1.0 - shrink) + EDGE * 0.5;
    let size = 2.0 * extent;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size:.0}\" height=\"{size:.0}\" viewBox=\"{:.3} {:.3} {size:.3} {size:.3}\">\n",
        -extent, -extent
    );
    let stroke = 2.0 * shrink.powi(depth as i32 / 2);
    s.push_str("<g stroke=\"#777777\" stroke-width=\"");
    let _ = write!(s, "{stroke:.3}\">\n");
    for w in &p.domain {
        let letters = w.letters();
        if letters.is_empty() {
            continue;
        }
        let parent = Element::free(&letters[..letters.len() - 1]);
        let ((x0, y0), (x1, y1)) = (pos(&parent), pos(w));
        let _ = writeln!(s, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", num(x0), num(y0), num(x1), num(y1));
    }
    s.push_str("</g>\n");
    for (w, v) in p.pairs() {
        let (x, y) = pos(w);
        let r = 0.3 * EDGE * shrink.powi(w.word_len() as i32);
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"{}\"/>",
            num(x),
            num(y),
            num(r),
            hex(color(v, alphabet)),
            num(r * 0.1)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
