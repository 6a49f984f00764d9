//! Prints solitaire component sizes of `m × n` rectangles for the triangle shape.
//!
//! `cargo run --release -p tep-core --example table -- 4 4`

use std::time::Instant;

use tep_core::group::lattice_rect;
use tep_core::solitaire::component;
use tep_core::Shape;

fn main() {
    let args: Vec<i64> = std::env::args().skip(1).map(|a| a.parse().expect("integer")).collect();
    let [m, n] = args[..] else {
        eprintln!("usage: table M N");
        std::process::exit(2);
    };
    let s = Shape::lattice(&[&[1, 0], &[0, 1], &[1, 1]]);
    let start = Instant::now();
    let rep = component(&lattice_rect(m, n), &s, &s, u64::MAX, false);
    println!("{m}x{n}: {} states, exhausted {} ({:.1?})", rep.size, rep.exhausted, start.elapsed());
}
