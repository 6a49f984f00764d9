//! Parsing of shape, family, geometry and order arguments.

use std::path::Path;

use serde_json::Value;
use tep_core::contour::InvariantOrder;
use tep_core::group::{free_ball, lattice_disc, lattice_rect};
use tep_core::tep::{presets, TepFamily};
use tep_core::{ConvexGeometry, Element, GroupSpec, Shape};

use crate::CliError;

fn read_json(path: &str) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{path} is not valid JSON: {e}")))
}

/// Inline JSON if the argument starts with `[` or `{`, else a file.
fn json_arg(arg: &str) -> Result<Value, CliError> {
    let t = arg.trim_start();
    if t.starts_with('[') || t.starts_with('{') {
        serde_json::from_str(t).map_err(|e| CliError::usage(format!("bad inline JSON {arg:?}: {e}")))
    } else {
        read_json(arg)
    }
}

pub fn parse_group(s: &str) -> Result<GroupSpec, CliError> {
    let g = match s {
        "heisenberg" => GroupSpec::Heisenberg,
        _ => match s.split_once(':') {
            Some(("z" | "lattice", d)) => GroupSpec::Lattice(d.parse().map_err(|_| CliError::usage(format!("bad dimension in {s:?}")))?),
            Some(("f" | "free", n)) => GroupSpec::Free(n.parse().map_err(|_| CliError::usage(format!("bad rank in {s:?}")))?),
            _ => return Err(CliError::usage(format!("unknown group {s:?}; use z:D, f:N or heisenberg"))),
        },
    };
    g.validate()?;
    Ok(g)
}

/// `ball:R`, `disc:R2` (squared radius, `Z^2`), `rect:W,H`, inline JSON or
/// a JSON file. A bare member list needs `group`; a `{group, members}`
/// object carries its own.
pub fn parse_shape(arg: &str, group: Option<GroupSpec>) -> Result<Shape, CliError> {
    if let Some(r) = arg.strip_prefix("ball:") {
        let r: i64 = r.parse().map_err(|_| CliError::usage(format!("bad radius in {arg:?}")))?;
        if r < 0 {
            return Err(CliError::usage("radius must be nonnegative"));
        }
        return match group.unwrap_or(GroupSpec::Lattice(2)) {
            GroupSpec::Lattice(2) => Ok(lattice_disc(r * r)),
            GroupSpec::Lattice(d) => Ok(lattice_ball(d, r)),
            GroupSpec::Free(n) => Ok(Shape::from_elements(GroupSpec::Free(n), free_ball(n, r as usize))),
            GroupSpec::Heisenberg => Err(CliError::usage("ball regions are not defined for the Heisenberg group; pass a file")),
        };
    }
    if let Some(r2) = arg.strip_prefix("disc:") {
        let r2: i64 = r2.parse().ok().filter(|&r| r >= 0).ok_or_else(|| CliError::usage(format!("bad squared radius in {arg:?}")))?;
        if group.is_some_and(|g| g != GroupSpec::Lattice(2)) {
            return Err(CliError::usage("disc regions live in Z^2"));
        }
        return Ok(lattice_disc(r2));
    }
    if let Some(wh) = arg.strip_prefix("rect:") {
        let parts: Vec<i64> = wh.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>()
            .map_err(|_| CliError::usage(format!("bad rectangle {arg:?}; use rect:W,H")))?;
        let [w, h] = parts[..] else { return Err(CliError::usage(format!("bad rectangle {arg:?}; use rect:W,H"))) };
        if w < 0 || h < 0 {
            return Err(CliError::usage("rectangle sides must be nonnegative"));
        }
        if group.is_some_and(|g| g != GroupSpec::Lattice(2)) {
            return Err(CliError::usage("rect regions live in Z^2"));
        }
        return Ok(lattice_rect(w, h));
    }
    let v = json_arg(arg)?;
    shape_from_value(&v, group)
}

fn shape_from_value(v: &Value, group: Option<GroupSpec>) -> Result<Shape, CliError> {
    if v.is_array() {
        let g = group.unwrap_or(GroupSpec::Lattice(2));
        return Ok(Shape::members_from_json(g, v)?);
    }
    // a pattern or a contour file also works: use its domain
    let inner = v.get("domain").or_else(|| v.get("region")).unwrap_or(v);
    let s = Shape::from_json(inner)?;
    if let Some(g) = group {
        if g != s.group {
            return Err(CliError::usage(format!("shape lives in {:?}, expected {g:?}", s.group)));
        }
    }
    Ok(s)
}

fn lattice_ball(d: u32, r: i64) -> Shape {
    let mut out = Vec::new();
    let mut cur = vec![-r; d as usize];
    loop {
        if cur.iter().map(|x| x * x).sum::<i64>() <= r * r {
            out.push(Element::lattice(&cur));
        }
        let mut i = 0;
        while i < cur.len() && cur[i] == r {
            cur[i] = -r;
            i += 1;
        }
        if i == cur.len() {
            break;
        }
        cur[i] += 1;
    }
    Shape::from_elements(GroupSpec::Lattice(d), out)
}

/// Raw family JSON without building it, so that `verify` can report a
/// uniformity failure as a property violation.
pub fn family_json(arg: &str) -> Result<Value, CliError> {
    if presets::NAMES.contains(&arg) {
        return Ok(presets::by_name(arg)?.to_json());
    }
    if !Path::new(arg).exists() && !arg.trim_start().starts_with('{') {
        return Err(CliError::usage(format!(
            "family {arg:?} is neither a preset ({}) nor a file",
            presets::NAMES.join(", ")
        )));
    }
    json_arg(arg)
}

pub fn parse_family(arg: &str) -> Result<TepFamily, CliError> {
    if presets::NAMES.contains(&arg) {
        return Ok(presets::by_name(arg)?);
    }
    Ok(TepFamily::from_json(&family_json(arg)?)?)
}

pub fn parse_geometry(arg: Option<&str>, group: GroupSpec) -> Result<ConvexGeometry, CliError> {
    match arg {
        None => Ok(ConvexGeometry::default_for(group)),
        Some(name @ ("std-lattice" | "tree-convex" | "heisenberg-exp")) => {
            Ok(ConvexGeometry::from_json(group, &Value::String(name.to_string()))?)
        }
        Some(other) => Ok(ConvexGeometry::from_json(group, &json_arg(other)?)?),
    }
}

/// `lex`, `magnus`, `vector:W1,W2,...` with rational weights like `1/2`, or JSON.
pub fn parse_order(arg: Option<&str>, group: GroupSpec) -> Result<InvariantOrder, CliError> {
    let order = match (arg, group) {
        (None | Some("lex"), GroupSpec::Lattice(d)) => InvariantOrder::Lex(d),
        (None | Some("magnus"), GroupSpec::Free(n)) => InvariantOrder::from_json(&serde_json::json!({"magnus": n}))?,
        (None, GroupSpec::Heisenberg) => return Err(CliError::usage("no invariant order is implemented for the Heisenberg group")),
        (Some(s), _) if s.starts_with("vector:") => {
            let w = s["vector:".len()..]
                .split(',')
                .map(|t| match t.trim().split_once('/') {
                    Some((n, d)) => Ok((n.parse()?, d.parse()?)),
                    None => Ok((t.trim().parse()?, 1)),
                })
                .collect::<Result<Vec<(i64, i64)>, std::num::ParseIntError>>()
                .map_err(|_| CliError::usage(format!("bad weight vector {s:?}")))?;
            InvariantOrder::vector(w)?
        }
        (Some(s), _) => InvariantOrder::from_json(&json_arg(s)?)?,
    };
    if order.group() != group {
        return Err(CliError::usage(format!("order lives in {:?}, region in {group:?}", order.group())));
    }
    Ok(order)
}
