//! The families `Oₙ` built from `L(2,3)` and from `D` by gluing `n` cut
//! copies, and checks of their Veech group structure.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::origami_to_subgroup;
use crate::origami::{Origami, Perm};
use crate::sl2::MatZ2;
use crate::veech::{compute_veech_with_cap, VeechGroup, DEFAULT_ORBIT_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Base {
    L23,
    D,
}

impl Base {
    /// Squares per copy.
    pub fn copy_size(self) -> usize {
        match self {
            Base::L23 => 4,
            Base::D => 5,
        }
    }

    /// The element `[[1,0],[k,1]]` that lies in every group of the family.
    pub fn remark_element(self) -> MatZ2 {
        let k = match self {
            Base::L23 => 2,
            Base::D => 3,
        };
        MatZ2::from_i64(1, 0, k, 1).expect("unipotent")
    }

    /// Largest `n` used by default for full Veech group computations.
    pub fn default_n_max(self) -> usize {
        match self {
            Base::L23 => 4,
            Base::D => 3,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Base::L23 => "L23",
            Base::D => "D",
        })
    }
}

impl FromStr for Base {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "L23" | "l23" | "L(2,3)" | "O" => Ok(Base::L23),
            "D" | "d" => Ok(Base::D),
            other => Err(Error::Parse(format!("unknown sequence base {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub base: Base,
    pub n: usize,
}

impl SequenceSpec {
    pub fn new(base: Base, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition(
                "sequence index must be at least 1".into(),
            ));
        }
        Ok(Self { base, n })
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.base, self.n)
    }
}

/// The `n`-th member with squares numbered as in the pictures.
///
/// For `L23`: `σa = (1 3 4 5 7 8 … 4n-3 4n-1 4n)`, `σb = (1 2)(5 6)…`.
/// For `D`: `σa = (1 2 3 6 7 8 … 5n-4 5n-3 5n-2)`,
/// `σb = (1 4 5)(6 9 10)…(2 3)(7 8)…`.
pub fn build(spec: SequenceSpec) -> Origami {
    let n = spec.n;
    let (a_cycle, b_cycles): (Vec<usize>, Vec<Vec<usize>>) = match spec.base {
        Base::L23 => (
            (0..n)
                .flat_map(|k| [4 * k + 1, 4 * k + 3, 4 * k + 4])
                .collect(),
            (0..n).map(|k| vec![4 * k + 1, 4 * k + 2]).collect(),
        ),
        Base::D => (
            (0..n)
                .flat_map(|k| [5 * k + 1, 5 * k + 2, 5 * k + 3])
                .collect(),
            (0..n)
                .map(|k| vec![5 * k + 1, 5 * k + 4, 5 * k + 5])
                .chain((0..n).map(|k| vec![5 * k + 2, 5 * k + 3]))
                .collect(),
        ),
    };
    let d = spec.base.copy_size() * n;
    let a = Perm::from_cycles(d, &[a_cycle]).expect("valid cycle");
    let b = Perm::from_cycles(d, &b_cycles).expect("valid cycles");
    Origami::new(d, a, b).expect("the glued copies are connected")
}

/// The same surface obtained as the origami of the power kernel `Hₙ` of
/// `U = π₁` of the first member, based at square 1.
pub fn build_from_power_kernel(spec: SequenceSpec) -> Origami {
    let first = build(SequenceSpec { n: 1, ..spec });
    origami_to_subgroup(&first)
        .power_kernel(spec.n)
        .automaton
        .origami()
}

pub fn veech_of(spec: SequenceSpec, cap: usize) -> Result<VeechGroup> {
    compute_veech_with_cap(&build(spec), cap)
}

/// `Tˢ ∈ G`.
pub fn parabolic_test(g: &VeechGroup, s: i64) -> bool {
    g.member(&MatZ2::t_pow(s))
}

/// `Γ(O_m) ⊆ Γ(O_n)`, checked on the Schreier generators of `Γ(O_m)`.
pub fn verify_inclusion(base: Base, n: usize, m: usize) -> Result<bool> {
    verify_inclusion_with_cap(base, n, m, DEFAULT_ORBIT_CAP)
}

pub fn verify_inclusion_with_cap(base: Base, n: usize, m: usize, cap: usize) -> Result<bool> {
    let (sn, sm) = (SequenceSpec::new(base, n)?, SequenceSpec::new(base, m)?);
    if !m.is_multiple_of(n) {
        return Err(Error::Precondition(format!("{n} does not divide {m}")));
    }
    let big = veech_of(sn, cap)?;
    let small = veech_of(sm, cap)?;
    Ok(group_inclusion(&small, &big))
}

/// Whether every Schreier generator of `small` lies in `big`.
pub fn group_inclusion(small: &VeechGroup, big: &VeechGroup) -> bool {
    small
        .schreier_generators()
        .iter()
        .all(|g| big.member(&g.matrix))
}

/// `Γ(Oₙ) ≠ Γ(O_m)`, separated by `T^{3 min(n, m)}`.
pub fn verify_distinctness(base: Base, n: usize, m: usize) -> Result<bool> {
    if n == m {
        return Err(Error::Precondition("distinctness needs n != m".into()));
    }
    let s = 3 * n.min(m) as i64;
    let gn = veech_of(SequenceSpec::new(base, n)?, DEFAULT_ORBIT_CAP)?;
    let gm = veech_of(SequenceSpec::new(base, m)?, DEFAULT_ORBIT_CAP)?;
    Ok(parabolic_test(&gn, s) != parabolic_test(&gm, s))
}

/// `[[1,0],[k,1]] ∈ Γ(Oₙ)` for all `n ≤ n_max`, with `k` = 2 for `L23`
/// and 3 for `D`.
pub fn remark_check(base: Base, n_max: usize) -> Result<bool> {
    let b = base.remark_element();
    for n in 1..=n_max {
        if !veech_of(SequenceSpec::new(base, n)?, DEFAULT_ORBIT_CAP)?.member(&b) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Veech group indices produced by this crate, kept as regression
/// baselines. Not taken from any external source.
pub fn baseline_index(base: Base, n: usize) -> Option<usize> {
    let table: &[usize] = match base {
        Base::L23 => &BASELINE_L23,
        Base::D => &BASELINE_D,
    };
    table.get(n.checked_sub(1)?).copied()
}

const BASELINE_L23: [usize; 4] = [9, 36, 288, 288];
const BASELINE_D: [usize; 3] = [24, 144, 1728];
