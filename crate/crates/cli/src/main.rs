//! `tep`: sampling, counting, contours, solitaire runs, property checks,
//! spacetime diagrams and the session server.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::{json, Value};
use tep_core::contour::{fill_via_contour, s_contour};
use tep_core::rng::step_rng;
use tep_core::solitaire::{apply_move, component, SolitaireMove, MEMBER_LIMIT};
use tep_core::tep::{
    count_convex, count_shape_bruteforce, extend_to_configuration, factorize, is_locally_legal, Choice, FamilyMeta,
    Pattern, Sampler, Symbol, TepFamily, Uniformity, VERIFY_BUDGET,
};
use tep_core::{ConvexGeometry, Error, GroupSpec, Shape};

mod input;
mod render;
mod spacetime;

use input::{family_json, parse_family, parse_geometry, parse_group, parse_order, parse_shape};
use render::Grid;
use spacetime::{evolve, RowRule, SeedCell};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Resource(String),
    Violation(String),
}

impl CliError {
    pub fn usage(m: impl Into<String>) -> CliError {
        CliError::Usage(m.into())
    }

    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Resource(_) => EXIT_RESOURCE,
            CliError::Violation(_) => EXIT_VIOLATION,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Usage(m) | Error::Unsupported(m) => CliError::Usage(m),
            e @ Error::Resource { .. } => CliError::Resource(e.to_string()),
            e @ (Error::GeometryViolation(_) | Error::Inconsistent(_)) => CliError::Violation(e.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Resource(m) => write!(f, "resource budget: {m}"),
            CliError::Violation(m) => write!(f, "property violation: {m}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pbm,
    Ppm,
    Svg,
    Ascii,
}

#[derive(Parser)]
#[command(name = "tep", version, about = "TEP subshift workbench")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// std-lattice, tree-convex, heisenberg-exp, or a JSON spec; defaults to the group's own.
    #[arg(long, global = true)]
    geometry: Option<String>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Work budget for brute-force and exhaustive steps.
    #[arg(long, global = true, default_value_t = 1 << 24)]
    budget: u64,
    /// Output file; standard output when omitted.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Pixels per cell for raster and grid SVG output.
    #[arg(long, global = true, default_value_t = 4)]
    cell_px: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Uniform sample of a family on a convex region.
    Sample {
        /// Preset name or family JSON file.
        #[arg(long)]
        family: String,
        /// ball:R, disc:R2, rect:W,H, inline JSON or a JSON file.
        #[arg(long)]
        region: String,
        /// Edge shrink per tree level for free-group SVG.
        #[arg(long, default_value_t = 0.5)]
        shrink: f64,
    },
    /// Number of globally legal patterns on a shape.
    Count {
        /// Preset name or family JSON file; or give --rule-shape/--alphabet/--k.
        #[arg(long)]
        family: Option<String>,
        /// Rule shape S when no family is given.
        #[arg(long)]
        rule_shape: Option<String>,
        /// Alphabet size |A|.
        #[arg(long)]
        alphabet: Option<u32>,
        /// Number of choices at a free corner.
        #[arg(long)]
        k: Option<u32>,
        /// Group of bare member lists: z:D, f:N or heisenberg.
        #[arg(long)]
        group: Option<String>,
        /// Shape to count on: ball:R, disc:R2, rect:W,H, inline JSON or a file.
        #[arg(long)]
        shape: String,
        /// convex walks the shape; bruteforce enumerates any finite shape.
        #[arg(long, value_enum, default_value_t = CountMode::Convex)]
        mode: CountMode,
    },
    /// Contour of a region for a shape; with a family, a random legal filling.
    Contour {
        /// Convex region, in the same forms as --shape.
        #[arg(long)]
        region: String,
        /// Defaults to the family's shape.
        #[arg(long)]
        shape: Option<String>,
        /// Preset or family file; fills the region from random contour values.
        #[arg(long)]
        family: Option<String>,
        /// lex, magnus, vector:W1,W2 or JSON.
        #[arg(long)]
        order: Option<String>,
        /// Group of bare member lists.
        #[arg(long)]
        group: Option<String>,
    },
    /// Component of a support in the solitaire graph, or replay of a history.
    Solitaire {
        /// Starting support.
        #[arg(long, required_unless_present = "replay")]
        support: Option<String>,
        /// Rule shape S.
        #[arg(long, required_unless_present = "replay")]
        shape: Option<String>,
        /// Movable cells; translated lax corners of the shape by default.
        #[arg(long)]
        t: Option<String>,
        /// Group of bare member lists.
        #[arg(long)]
        group: Option<String>,
        /// Stop after this many supports.
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
        /// Include the member supports in the report.
        #[arg(long)]
        members: bool,
        /// History export from the server: replays its moves.
        #[arg(long, conflicts_with_all = ["support", "shape"])]
        replay: Option<PathBuf>,
    },
    /// Uniformity of a family and property suites of a geometry.
    Verify {
        /// Preset name or family JSON file.
        #[arg(long)]
        family: String,
        /// Random points and patterns per suite.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Spacetime diagram of a row automaton.
    Spacetime {
        /// s3, sum:Q or a JSON table file.
        #[arg(long, default_value = "s3")]
        rule: String,
        /// SYMBOL@X,Y, repeatable; y grows upward and the top seed row starts.
        #[arg(long = "cell", default_values_t = ["B@-32,22".parse::<SeedCell>().unwrap(), "a@0,0".parse().unwrap()])]
        cells: Vec<SeedCell>,
        /// Number of rows, top seed row included.
        #[arg(long, default_value_t = 120)]
        rows: usize,
        /// Blank columns left of the leftmost seed.
        #[arg(long, default_value_t = 2)]
        margin: usize,
    },
    /// Run the HTTP session server.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Address to bind.
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Mutation log, replayed on startup.
        #[arg(long)]
        log: Option<PathBuf>,
        /// CORS origin; any when omitted.
        #[arg(long)]
        allow_origin: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CountMode {
    Convex,
    Bruteforce,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.code()
        }
    };
    std::process::exit(code);
}

fn emit(cli: &Cli, bytes: &[u8]) -> Result<(), CliError> {
    let res = match &cli.output {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush())
        }
    };
    res.map_err(|e| CliError::usage(format!("cannot write output: {e}")))
}

fn emit_json(cli: &Cli, v: &Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    emit(cli, s.as_bytes())
}

fn group_arg(g: &Option<String>) -> Result<Option<GroupSpec>, CliError> {
    g.as_deref().map(parse_group).transpose()
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.cell_px == 0 {
        return Err(CliError::usage("--cell-px must be at least 1"));
    }
    match &cli.command {
        Command::Sample { family, region, shrink } => sample(cli, family, region, *shrink),
        Command::Count { family, rule_shape, alphabet, k, group, shape, mode } => {
            count(cli, family.as_deref(), rule_shape.as_deref(), *alphabet, *k, group, shape, *mode)
        }
        Command::Contour { region, shape, family, order, group } => {
            contour(cli, region, shape.as_deref(), family.as_deref(), order.as_deref(), group)
        }
        Command::Solitaire { support, shape, t, group, limit, members, replay } => match replay {
            Some(path) => solitaire_replay(cli, path),
            None => solitaire(
                cli,
                support.as_deref().expect("required"),
                shape.as_deref().expect("required"),
                t.as_deref(),
                group,
                *limit,
                *members,
            ),
        },
        Command::Verify { family, samples } => verify(cli, family, *samples),
        Command::Spacetime { rule, cells, rows, margin } => spacetime_cmd(cli, rule, cells, *rows, *margin),
        Command::Serve { port, host, log, allow_origin } => serve(host, *port, log.clone(), allow_origin.clone()),
    }
}

/// Writes a pattern in the chosen format after checking it is locally legal.
fn write_pattern(cli: &Cli, p: &Pattern, family: &TepFamily, default: Format, shrink: f64) -> Result<(), CliError> {
    if !is_locally_legal(p, family) {
        return Err(CliError::Violation("output pattern is not locally legal".into()));
    }
    let a = family.alphabet.size;
    match cli.format.unwrap_or(default) {
        Format::Json => {
            let mut v = p.to_json();
            v["alphabet"] = json!(a);
            if let Some(l) = &family.alphabet.labels {
                v["labels"] = json!(l);
            }
            emit_json(cli, &v)
        }
        Format::Pbm => emit(cli, &render::pbm(&Grid::from_pattern(p)?, a, cli.cell_px)?),
        Format::Ppm => emit(cli, &render::ppm(&Grid::from_pattern(p)?, a, cli.cell_px)),
        Format::Svg => match p.domain.group {
            GroupSpec::Free(_) => emit(cli, render::svg_tree(p, a, shrink)?.as_bytes()),
            _ => emit(cli, render::svg_grid(&Grid::from_pattern(p)?, a, cli.cell_px).as_bytes()),
        },
        Format::Ascii => emit(cli, render::ascii(&Grid::from_pattern(p)?, |s| family.alphabet.label(s)).as_bytes()),
    }
}

fn sample(cli: &Cli, family: &str, region: &str, shrink: f64) -> Result<(), CliError> {
    let fam = parse_family(family)?;
    let group = fam.shape.group;
    let geo = parse_geometry(cli.geometry.as_deref(), group)?;
    let c = parse_shape(region, Some(group))?;
    // small regions get the full convexity check; large ones are caught by the walk
    if c.len() <= 2000 && !geo.is_convex(&c) {
        return Err(CliError::usage("sampling region must be convex"));
    }
    let p = Sampler::new(&c, &fam, &geo)?.sample(cli.seed)?;
    if shrink <= 0.0 || shrink >= 1.0 {
        return Err(CliError::usage("--shrink must lie in (0, 1)"));
    }
    write_pattern(cli, &p, &fam, Format::Json, shrink)
}

fn factor_string(f: &[(u128, u64)]) -> String {
    if f.is_empty() {
        return "1".into();
    }
    f.iter().map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") }).collect::<Vec<_>>().join(" * ")
}

#[allow(clippy::too_many_arguments)]
fn count(
    cli: &Cli,
    family: Option<&str>,
    rule_shape: Option<&str>,
    alphabet: Option<u32>,
    k: Option<u32>,
    group: &Option<String>,
    shape: &str,
    mode: CountMode,
) -> Result<(), CliError> {
    let group = group_arg(group)?;
    let (fam, meta) = match (family, rule_shape) {
        (Some(f), None) => {
            let fam = parse_family(f)?;
            let meta = fam.meta();
            (Some(fam), meta)
        }
        (None, Some(s)) => {
            let (Some(alphabet), Some(k)) = (alphabet, k) else {
                return Err(CliError::usage("--rule-shape needs --alphabet and --k"));
            };
            if mode == CountMode::Bruteforce {
                return Err(CliError::usage("bruteforce mode needs a concrete --family"));
            }
            if alphabet == 0 || k == 0 || k > alphabet {
                return Err(CliError::usage("need 1 <= k <= alphabet"));
            }
            (None, FamilyMeta { shape: parse_shape(s, group)?, alphabet, k })
        }
        _ => return Err(CliError::usage("give exactly one of --family or --rule-shape")),
    };
    let group = group.unwrap_or(meta.shape.group);
    let geo = parse_geometry(cli.geometry.as_deref(), group)?;
    let b = parse_shape(shape, Some(group))?;
    let report = match mode {
        CountMode::Convex => {
            if !geo.is_convex(&b) {
                return Err(CliError::usage("shape is not convex; rerun with --mode bruteforce"));
            }
            let c = count_convex(&b, &meta, &geo)?;
            let f = c.factorization();
            json!({
                "m": c.m, "n": c.n, "alphabet": c.alphabet, "k": c.k,
                "count": c.count().to_string(),
                "factorization": f.iter().map(|&(p, e)| json!([p.to_string(), e])).collect::<Vec<_>>(),
                "factored": factor_string(&f),
            })
        }
        CountMode::Bruteforce => {
            let fam = fam.expect("checked above");
            let n = count_shape_bruteforce(&b, &fam, &geo, cli.budget)?;
            let f: Vec<(u128, u64)> = factorize(n).into_iter().map(|(p, e)| (p, e as u64)).collect();
            json!({
                "m": null, "n": null, "alphabet": fam.alphabet.size, "k": fam.k,
                "count": n.to_string(),
                "factorization": f.iter().map(|&(p, e)| json!([p.to_string(), e])).collect::<Vec<_>>(),
                "factored": factor_string(&f),
            })
        }
    };
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(cli, &report),
        Format::Ascii => {
            let (c, f) = (report["count"].as_str().unwrap(), report["factored"].as_str().unwrap());
            let mut line = if c == f { format!("count = {c}") } else { format!("count = {c} = {f}") };
            if let (Some(m), Some(n)) = (report["m"].as_u64(), report["n"].as_u64()) {
                line.push_str(&format!(" = |A|^{m} k^{n}"));
            }
            line.push('\n');
            emit(cli, line.as_bytes())
        }
        f => Err(CliError::usage(format!("count reports are json or ascii, not {f:?}"))),
    }
}

fn contour(
    cli: &Cli,
    region: &str,
    shape: Option<&str>,
    family: Option<&str>,
    order: Option<&str>,
    group: &Option<String>,
) -> Result<(), CliError> {
    let fam = family.map(parse_family).transpose()?;
    let group = group_arg(group)?.or(fam.as_ref().map(|f| f.shape.group));
    let s = match (shape, &fam) {
        (Some(s), _) => parse_shape(s, group)?,
        (None, Some(f)) => f.shape.clone(),
        (None, None) => return Err(CliError::usage("give --shape or --family")),
    };
    let group = s.group;
    let c = parse_shape(region, Some(group))?;
    let order = parse_order(order, group)?;
    let e = s_contour(&c, &s, &order)?;
    let Some(fam) = fam else {
        return match cli.format.unwrap_or(Format::Json) {
            Format::Json => {
                let mut v = e.to_json();
                v["size"] = json!(e.members.len());
                emit_json(cli, &v)
            }
            Format::Ascii => {
                // 1 on the contour, 0 elsewhere in the region
                let marks = Pattern::new(c.clone(), c.iter().map(|g| e.members.contains(g) as Symbol).collect())?;
                let g = Grid::from_pattern(&marks)?;
                emit(cli, render::ascii(&g, |s| if s == 1 { "#".into() } else { "o".into() }).as_bytes())
            }
            f => Err(CliError::usage(format!("a bare contour renders as json or ascii, not {f:?}"))),
        };
    };
    if fam.shape != s {
        return Err(CliError::usage("--shape must match the family's shape when filling"));
    }
    let values = (0..e.members.len())
        .map(|i| step_rng(cli.seed, i as u64).gen_range(0..fam.alphabet.size) as Symbol)
        .collect();
    let on_contour = Pattern::new(e.members.clone(), values)?;
    let p = fill_via_contour(&on_contour, &c, &fam, &order, cli.seed)?;
    write_pattern(cli, &p, &fam, Format::Json, 0.5)
}

fn solitaire(
    cli: &Cli,
    support: &str,
    shape: &str,
    t: Option<&str>,
    group: &Option<String>,
    limit: u64,
    members: bool,
) -> Result<(), CliError> {
    let group = group_arg(group)?;
    let s = parse_shape(shape, group)?;
    let y = parse_shape(support, Some(s.group))?;
    let t = match t {
        Some(t) => parse_shape(t, Some(s.group))?,
        None => parse_geometry(cli.geometry.as_deref(), s.group)?.translated_lax_corners(&s)?,
    };
    if !t.is_subset(&s) {
        return Err(CliError::usage("T must be a subset of S"));
    }
    if members && limit > MEMBER_LIMIT as u64 {
        return Err(CliError::usage(format!("--members needs --limit <= {MEMBER_LIMIT}")));
    }
    let rep = component(&y, &s, &t, limit, members);
    emit_json(cli, &rep.to_json())?;
    if !rep.exhausted {
        return Err(CliError::Resource(format!("component has more than {limit} supports")));
    }
    Ok(())
}

fn solitaire_replay(cli: &Cli, path: &PathBuf) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("bad history file: {e}")))?;
    let group: GroupSpec =
        serde_json::from_value(v["group"].clone()).map_err(|e| CliError::usage(format!("bad group: {e}")))?;
    group.validate()?;
    let s = Shape::members_from_json(group, &v["s"])?;
    let t = match v.get("t") {
        Some(t) => Shape::members_from_json(group, t)?,
        None => ConvexGeometry::default_for(group).translated_lax_corners(&s)?,
    };
    let mut y = Shape::members_from_json(group, &v["initial"])?;
    let moves = v["moves"].as_array().map(Vec::as_slice).unwrap_or(&[]);
    for (i, m) in moves.iter().enumerate() {
        let mv = SolitaireMove::from_json(group, m)?;
        y = apply_move(&y, &mv, &s, &t).map_err(|e| CliError::Violation(format!("move {i} is illegal: {e}")))?;
    }
    emit_json(cli, &json!({"support": y.to_json(), "moves": moves.len()}))
}

fn verify(cli: &Cli, family: &str, samples: usize) -> Result<(), CliError> {
    let raw = family_json(family)?;
    let fam = match TepFamily::from_json(&raw) {
        Ok(f) => f,
        Err(Error::Usage(m)) if m.starts_with("extensions are not uniform") => {
            emit_json(cli, &json!({"uniform": false, "witness": m}))?;
            return Err(CliError::Violation(m));
        }
        Err(e) => return Err(e.into()),
    };
    let group = fam.shape.group;
    let geo = parse_geometry(cli.geometry.as_deref(), group)?;
    let mut failures = Vec::new();

    // uniformity at the declared corners, and the shape's own corners under this geometry
    let declared = fam.verify_uniform_extensions(&fam.corners, VERIFY_BUDGET)?;
    let geo_corners = if geo.is_invariant() { geo.translated_lax_corners(&fam.shape)? } else { fam.corners.clone() };
    let at_geo = fam.verify_uniform_extensions(&geo_corners, VERIFY_BUDGET)?;
    if at_geo != Uniformity::Uniform(fam.k) {
        failures.push(format!("not {}-uniform at the geometry's corners {geo_corners}", fam.k));
    }

    let mid = geo.check_midpointed(&fam.shape, samples.min(50), cli.seed)?;
    if !mid.midpointed {
        let (g, h) = mid.witness.clone().expect("witness");
        failures.push(format!("not midpointed: {g} outside closure({{{g}·{h}, {g}·{h}^-1}})"));
    }

    // extension suite: random legal patterns on random convex sets extend to bigger ones
    let mut extended = 0;
    for i in 0..samples {
        let mut rng = step_rng(cli.seed, 1 + i as u64);
        let pts: Vec<_> = (0..1 + i % 4).map(|_| group.random_element(&mut rng, 2)).collect();
        let c = geo.closure(&Shape::from_elements(group, pts.clone()))?;
        let far = group.random_element(&mut rng, 3);
        let d = geo.closure(&c.with(far))?;
        if d.len() == c.len() || d.len() > 400 {
            continue;
        }
        let p = Sampler::new(&c, &fam, &geo)?.sample(cli.seed.wrapping_add(i as u64))?;
        match extend_to_configuration(&p, &fam, &geo, &d, Choice::Seeded(cli.seed ^ i as u64)) {
            Ok(q) if is_locally_legal(&q, &fam) && q.restrict(&c)? == p => extended += 1,
            Ok(_) => failures.push(format!("extension of a pattern on {c} to {d} is not legal")),
            Err(e) => failures.push(format!("extension from {c} failed: {e}")),
        }
    }

    let report = json!({
        "family": {"k": fam.k, "alphabet": fam.alphabet.size, "corners": fam.corners.to_json()},
        "uniform": declared == Uniformity::Uniform(fam.k),
        "geometry": geo.to_json(),
        "invariant": geo.is_invariant(),
        "midpointed": mid.midpointed,
        "extensions_checked": extended,
        "failures": failures,
    });
    emit_json(cli, &report)?;
    if !failures.is_empty() {
        return Err(CliError::Violation(failures.join("; ")));
    }
    Ok(())
}

fn spacetime_cmd(cli: &Cli, rule: &str, cells: &[SeedCell], rows: usize, margin: usize) -> Result<(), CliError> {
    let rule = RowRule::parse(rule)?;
    let seeds: Vec<(Symbol, i64, i64)> =
        cells.iter().map(|c| Ok((rule.symbol(&c.symbol)?, c.x, c.y))).collect::<Result<_, CliError>>()?;
    if rows == 0 {
        return Err(CliError::usage("--rows must be positive"));
    }
    if (rows as u64).saturating_mul(rows as u64 + 200) > cli.budget.max(1 << 26) {
        return Err(CliError::Resource(format!("{rows} rows exceed the budget")));
    }
    let d = evolve(&rule, &seeds, rows, margin);
    for t in 1..d.rows.len() {
        let y = d.y_top - t as i64;
        for i in 0..d.width {
            let seeded = seeds.iter().any(|s| s.2 == y && s.1 - d.x_min == i as i64);
            let left = if i == 0 { 0 } else { d.rows[t - 1][i - 1] };
            if !seeded && d.rows[t][i] != rule.next[left as usize][d.rows[t - 1][i] as usize] {
                return Err(CliError::Violation(format!("row {y} breaks the rule at column {i}")));
            }
        }
    }
    let grid = Grid::rows(d.width, &d.rows);
    let a = rule.size();
    match cli.format.unwrap_or(Format::Ascii) {
        Format::Json => emit_json(cli, &d.to_json(&rule)),
        Format::Ascii => emit(cli, render::ascii(&grid, |s| rule.label(s)).as_bytes()),
        Format::Pbm => {
            // nonzero symbols black
            let bin = Grid::rows(d.width, &d.rows.iter().map(|r| r.iter().map(|&s| (s != 0) as Symbol).collect()).collect::<Vec<_>>());
            emit(cli, &render::pbm(&bin, 2, cli.cell_px)?)
        }
        Format::Ppm => emit(cli, &render::ppm(&grid, a, cli.cell_px)),
        Format::Svg => emit(cli, render::svg_grid(&grid, a, cli.cell_px).as_bytes()),
    }
}

fn serve(host: &str, port: u16, log: Option<PathBuf>, allow_origin: Option<String>) -> Result<(), CliError> {
    let addr: std::net::SocketAddr =
        format!("{host}:{port}").parse().map_err(|e| CliError::usage(format!("bad address {host}:{port}: {e}")))?;
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::usage(format!("runtime: {e}")))?;
    rt.block_on(tep_server::serve(addr, tep_server::Config { log_path: log, allow_origin }))
        .map_err(|e| CliError::usage(format!("server: {e}")))
}
