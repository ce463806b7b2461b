//! Named origamis.
//!
//! Names: `trivial`, `L23`, `D`, `L(m,n)` for the L-shape with a column of
//! `m` and a row of `n` squares, and `O(n)` / `D(n)` for the members of the
//! two sequences.

use crate::error::{Error, Result};
use crate::origami::{Origami, Perm};
use crate::sequences::{build, Base, SequenceSpec};

pub fn trivial() -> Origami {
    Origami::trivial()
}

/// `L(2,3)`: `σa = (2 3 4)`, `σb = (1 2)`.
pub fn l23() -> Origami {
    Origami::from_cycles(4, "(2 3 4)", "(1 2)").expect("valid")
}

/// `σa = (1 2 3)`, `σb = (1 4 5)(2 3)`.
pub fn d() -> Origami {
    Origami::from_cycles(5, "(1 2 3)", "(1 4 5)(2 3)").expect("valid")
}

/// The L-shape with a column of `m` squares and a row of `n` squares
/// sharing the corner. The column is numbered from the top, so the corner
/// is square `m` and the row continues with `m+1, …, m+n-1`.
pub fn l_shape(m: usize, n: usize) -> Result<Origami> {
    if m == 0 || n == 0 {
        return Err(Error::Precondition("L-shape arms must be positive".into()));
    }
    let d = m + n - 1;
    let row: Vec<usize> = (m..=d).collect();
    let column: Vec<usize> = (1..=m).rev().collect();
    let a = Perm::from_cycles(d, &[row])?;
    let b = Perm::from_cycles(d, &[column])?;
    Origami::new(d, a, b)
}

/// Names listed by [`by_name`], for help texts.
pub const NAMES: &[&str] = &["trivial", "L23", "D", "L(m,n)", "O(n)", "D(n)"];

pub fn by_name(name: &str) -> Result<Origami> {
    let name = name.trim();
    match name {
        "trivial" => return Ok(trivial()),
        "L23" | "L(2,3)" => return Ok(l23()),
        "D" => return Ok(d()),
        _ => {}
    }
    let args = |prefix: &str| -> Option<Vec<usize>> {
        let inner = name
            .strip_prefix(prefix)?
            .strip_prefix('(')?
            .strip_suffix(')')?;
        inner.split(',').map(|x| x.trim().parse().ok()).collect()
    };
    if let Some(v) = args("L") {
        if let [m, n] = v[..] {
            return l_shape(m, n);
        }
    }
    for (prefix, base) in [("O", Base::L23), ("D", Base::D)] {
        if let Some(v) = args(prefix) {
            if let [n] = v[..] {
                return Ok(build(SequenceSpec::new(base, n)?));
            }
        }
    }
    Err(Error::Parse(format!(
        "unknown origami name {name:?}; known: {}",
        NAMES.join(", ")
    )))
}
