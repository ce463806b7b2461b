//! Origamis as transitive pairs of permutations `(σa, σb)` of the squares.
//!
//! `σa` sends a square to its right neighbour and `σb` to the square above.
//! Points are 0-based internally and 1-based in every text format.
//! Permutations compose left to right: `p.then(q)` is `i ↦ q(p(i))`.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A permutation of `0..d`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(d: usize) -> Self {
        Perm((0..d).collect())
    }

    /// Checks that `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || seen[i] {
                return Err(Error::BadPermutation(format!(
                    "{:?} is not a bijection",
                    images.iter().map(|x| x + 1).collect::<Vec<_>>()
                )));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    /// Builds a permutation of `0..d` from 1-based disjoint cycles.
    pub fn from_cycles(d: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..d).collect();
        let mut touched = vec![false; d];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p == 0 || p > d {
                    return Err(Error::BadPermutation(format!("point {p} outside 1..={d}")));
                }
                if touched[p - 1] {
                    return Err(Error::BadPermutation(format!("point {p} appears twice")));
                }
                touched[p - 1] = true;
                let next = cycle[(k + 1) % cycle.len()];
                images[p - 1] = next - 1;
            }
        }
        Ok(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Self {
        Perm(self.0.iter().map(|&i| other.0[i]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Transports the permutation along the bijection `s`: the result maps
    /// `s(i)` to `s(self(i))`.
    pub fn relabel(&self, s: &[usize]) -> Self {
        let mut out = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            out[s[i]] = s[j];
        }
        Perm(out)
    }

    /// 0-based cycles, each starting at its least point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.0[i];
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle lengths, largest first.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// Parses `(1 2 3)(4 5)`, `()`, `id`, or the one-line form `[2,3,1]`
    /// on `d` points.
    pub fn parse(d: usize, text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('[') {
            let inner = t
                .strip_prefix('[')
                .and_then(|x| x.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("unterminated image list {t:?}")))?;
            let images = inner
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|x| !x.is_empty())
                .map(|x| {
                    x.parse::<usize>()
                        .ok()
                        .filter(|&v| v >= 1)
                        .map(|v| v - 1)
                        .ok_or_else(|| Error::Parse(format!("bad image {x:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if images.len() != d {
                return Err(Error::BadPermutation(format!(
                    "image list has {} entries, expected {d}",
                    images.len()
                )));
            }
            return Perm::from_images(images);
        }
        if t.is_empty() || t == "id" || t == "()" {
            return Ok(Perm::identity(d));
        }
        let mut cycles = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in {t:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unterminated cycle in {t:?}")))?;
            let cycle = open[..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|x| !x.is_empty())
                .map(|x| {
                    x.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad point {x:?} in {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = open[close + 1..].trim_start();
        }
        Perm::from_cycles(d, &cycles)
    }
}

/// Disjoint-cycle notation, 1-based, fixed points omitted; `()` for the identity.
impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles() {
            if cycle.len() < 2 {
                continue;
            }
            any = true;
            let pts: Vec<String> = cycle.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// A connected square-tiled surface given by its monodromy pair.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Origami {
    sigma_a: Perm,
    sigma_b: Perm,
}

/// Orbits of the group generated by `perms`, 0-based.
fn orbits(d: usize, perms: &[&Perm]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; d];
    let mut out = Vec::new();
    for start in 0..d {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut k = 0;
        while k < orbit.len() {
            let i = orbit[k];
            k += 1;
            for p in perms {
                let j = p.apply(i);
                if !seen[j] {
                    seen[j] = true;
                    orbit.push(j);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

impl Origami {
    /// Validates a pair of permutations on `d` points.
    pub fn new(d: usize, sigma_a: Perm, sigma_b: Perm) -> Result<Self> {
        if d == 0 {
            return Err(Error::BadPermutation("degree must be at least 1".into()));
        }
        if sigma_a.degree() != d || sigma_b.degree() != d {
            return Err(Error::BadPermutation(format!(
                "expected permutations of degree {d}, got {} and {}",
                sigma_a.degree(),
                sigma_b.degree()
            )));
        }
        let orbs = orbits(d, &[&sigma_a, &sigma_b]);
        if orbs.len() > 1 {
            return Err(Error::NotTransitive(
                orbs.into_iter()
                    .map(|o| o.into_iter().map(|p| p + 1).collect())
                    .collect(),
            ));
        }
        Ok(Self { sigma_a, sigma_b })
    }

    /// Convenience constructor from cycle strings, e.g. `from_cycles(4, "(2 3 4)", "(1 2)")`.
    pub fn from_cycles(d: usize, sigma_a: &str, sigma_b: &str) -> Result<Self> {
        Self::new(d, Perm::parse(d, sigma_a)?, Perm::parse(d, sigma_b)?)
    }

    pub fn trivial() -> Self {
        Self {
            sigma_a: Perm::identity(1),
            sigma_b: Perm::identity(1),
        }
    }

    /// Pairs built by the crate's own moves stay transitive.
    pub(crate) fn from_parts_unchecked(sigma_a: Perm, sigma_b: Perm) -> Self {
        debug_assert_eq!(sigma_a.degree(), sigma_b.degree());
        Self { sigma_a, sigma_b }
    }

    pub fn degree(&self) -> usize {
        self.sigma_a.degree()
    }

    pub fn sigma_a(&self) -> &Perm {
        &self.sigma_a
    }

    pub fn sigma_b(&self) -> &Perm {
        &self.sigma_b
    }

    /// The commutator `σa σb σa⁻¹ σb⁻¹`; its cycles are the vertices of X.
    pub fn vertex_permutation(&self) -> Perm {
        self.sigma_a
            .then(&self.sigma_b)
            .then(&self.sigma_a.inverse())
            .then(&self.sigma_b.inverse())
    }

    /// Cycle lengths of the vertex permutation, largest first.
    pub fn vertex_structure(&self) -> Vec<usize> {
        self.vertex_permutation().cycle_type()
    }

    /// Genus of the closed surface, from `χ = c - d`.
    pub fn surface_genus(&self) -> usize {
        let c = self.vertex_structure().len();
        let d = self.degree();
        debug_assert!((d - c).is_multiple_of(2));
        1 + (d - c) / 2
    }

    /// Number of vertices where the covering is ramified.
    pub fn ramification_points(&self) -> usize {
        self.vertex_structure().iter().filter(|&&l| l > 1).count()
    }

    /// Number of preimages of the branch point (punctures of X*).
    pub fn puncture_count(&self) -> usize {
        self.vertex_structure().len()
    }

    /// Simultaneous relabelling by the bijection `s` (old point → new point).
    pub fn relabel(&self, s: &[usize]) -> Self {
        Self {
            sigma_a: self.sigma_a.relabel(s),
            sigma_b: self.sigma_b.relabel(s),
        }
    }

    /// Breadth-first numbering from `start`, following `σa` before `σb`.
    fn bfs_labeling(&self, start: usize) -> Vec<usize> {
        let d = self.degree();
        let mut label = vec![usize::MAX; d];
        let mut order = Vec::with_capacity(d);
        label[start] = 0;
        order.push(start);
        let mut k = 0;
        while k < order.len() {
            let i = order[k];
            k += 1;
            for p in [&self.sigma_a, &self.sigma_b] {
                let j = p.apply(i);
                if label[j] == usize::MAX {
                    label[j] = order.len();
                    order.push(j);
                }
            }
        }
        label
    }

    /// Representative of the simultaneous-conjugacy class.
    pub fn canonical_form(&self) -> CanonicalForm {
        let mut best: Option<(Origami, Vec<usize>)> = None;
        for start in 0..self.degree() {
            let labeling = self.bfs_labeling(start);
            let candidate = self.relabel(&labeling);
            let better = match &best {
                None => true,
                Some((b, _)) => candidate < *b,
            };
            if better {
                best = Some((candidate, labeling));
            }
        }
        let (origami, relabeling) = best.expect("degree is at least 1");
        CanonicalForm {
            origami,
            relabeling,
        }
    }

    /// Canonical representative without the relabelling.
    pub fn canonical(&self) -> Origami {
        self.canonical_form().origami
    }

    pub fn is_equivalent(&self, other: &Origami) -> bool {
        self.degree() == other.degree() && self.canonical() == other.canonical()
    }

    /// `d; σa; σb` with 1-based cycle notation.
    pub fn to_text(&self) -> String {
        format!("{}; {}; {}", self.degree(), self.sigma_a, self.sigma_b)
    }

    /// Graphviz rendering of the square-gluing graph: solid edges to the
    /// right neighbour, dashed edges to the upper neighbour.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph origami {\n");
        for i in 0..self.degree() {
            let _ = writeln!(out, "  {};", i + 1);
        }
        for i in 0..self.degree() {
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"x\", style=solid];",
                i + 1,
                self.sigma_a.apply(i) + 1
            );
        }
        for i in 0..self.degree() {
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"y\", style=dashed];",
                i + 1,
                self.sigma_b.apply(i) + 1
            );
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for Origami {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses `d; σa; σb` where each permutation is in cycle or one-line notation.
impl FromStr for Origami {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(';').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "expected `d; sigma_a; sigma_b`, got {s:?}"
            )));
        }
        let d: usize = parts[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad degree {:?}", parts[0])))?;
        Origami::new(d, Perm::parse(d, parts[1])?, Perm::parse(d, parts[2])?)
    }
}

#[derive(Serialize, Deserialize)]
struct OrigamiRepr {
    degree: usize,
    sigma_a: String,
    sigma_b: String,
}

impl Serialize for Origami {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OrigamiRepr {
            degree: self.degree(),
            sigma_a: self.sigma_a.to_string(),
            sigma_b: self.sigma_b.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Origami {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = OrigamiRepr::deserialize(de)?;
        let a = Perm::parse(r.degree, &r.sigma_a).map_err(serde::de::Error::custom)?;
        let b = Perm::parse(r.degree, &r.sigma_b).map_err(serde::de::Error::custom)?;
        Origami::new(r.degree, a, b).map_err(serde::de::Error::custom)
    }
}

/// Canonical representative of an origami together with the relabelling
/// (`relabeling[old] = new`) that produced it.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalForm {
    pub origami: Origami,
    pub relabeling: Vec<usize>,
}

/// Random transitive pairs of permutations, shared by the property tests.
#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::Rng;

    pub fn random_perm<R: Rng>(rng: &mut R, d: usize) -> Perm {
        let mut v: Vec<usize> = (0..d).collect();
        v.shuffle(rng);
        Perm(v)
    }

    pub fn random_origami<R: Rng>(rng: &mut R, max_degree: usize) -> Origami {
        loop {
            let d = rng.gen_range(1..=max_degree);
            let a = random_perm(rng, d);
            let b = random_perm(rng, d);
            if let Ok(o) = Origami::new(d, a, b) {
                return o;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn l23() -> Origami {
        Origami::from_cycles(4, "(2 3 4)", "(1 2)").unwrap()
    }

    fn d() -> Origami {
        Origami::from_cycles(5, "(1 2 3)", "(1 4 5)(2 3)").unwrap()
    }

    #[test]
    fn construction() {
        let o0 = Origami::from_cycles(1, "()", "()").unwrap();
        assert_eq!(o0, Origami::trivial());
        assert_eq!(l23().degree(), 4);
        assert_eq!(d().degree(), 5);
        assert_eq!(l23().sigma_b().to_string(), "(1 2)");
        match Origami::from_cycles(4, "(1 2)", "(1 2)") {
            Err(Error::NotTransitive(orbits)) => {
                assert_eq!(orbits, vec![vec![1, 2], vec![3], vec![4]])
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(Origami::from_cycles(3, "(1 2)(2 3)", "()").is_err());
        assert!(Origami::from_cycles(3, "(1 4)", "()").is_err());
        assert!(Perm::parse(3, "[1,1,2]").is_err());
    }

    #[test]
    fn vertices_and_genus() {
        assert_eq!(Origami::trivial().vertex_structure(), vec![1]);
        assert_eq!(l23().vertex_structure(), vec![3, 1]);
        assert_eq!(d().vertex_structure(), vec![2, 2, 1]);
        assert_eq!(Origami::trivial().surface_genus(), 1);
        assert_eq!(l23().surface_genus(), 2);
        assert_eq!(d().surface_genus(), 2);
        assert_eq!(Origami::trivial().ramification_points(), 0);
        assert_eq!(d().ramification_points(), 2);
        // The second vertex of L(2,3) has cone angle 2π.
        assert_eq!(l23().ramification_points(), 1);
    }

    #[test]
    fn canonical_form_over_all_relabelings() {
        let base = l23().canonical();
        let mut perms = vec![vec![0usize, 1, 2, 3]];
        // all 24 permutations of four points
        for k in 1..4 {
            let mut next = Vec::new();
            for p in &perms {
                for i in 0..=k {
                    let mut q: Vec<usize> = p[..k].to_vec();
                    q.insert(i, k);
                    q.extend_from_slice(&p[k + 1..]);
                    next.push(q);
                }
            }
            perms = next;
        }
        let mut all: Vec<Vec<usize>> = perms;
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 24);
        for s in &all {
            assert_eq!(l23().relabel(s).canonical(), base);
        }
        assert_ne!(l23().canonical(), d().canonical());
        assert_eq!(Origami::trivial().canonical(), Origami::trivial());
    }

    #[test]
    fn canonical_relabeling_is_consistent() {
        let cf = d().canonical_form();
        assert_eq!(d().relabel(&cf.relabeling), cf.origami);
    }

    #[test]
    fn parse_formats() {
        let o: Origami = "4; (2 3 4); (1 2)".parse().unwrap();
        assert_eq!(o, l23());
        let o: Origami = "4; [1,3,4,2]; [2,1,3,4]".parse().unwrap();
        assert_eq!(o, l23());
        let o: Origami = "1; (); ()".parse().unwrap();
        assert_eq!(o, Origami::trivial());
        assert!("4; (1 2)(3 4); (1 3)(2 4)".parse::<Origami>().is_ok());
        assert!("4; (1 2)".parse::<Origami>().is_err());
        assert!("x; (); ()".parse::<Origami>().is_err());
        assert_eq!(d().to_text(), "5; (1 2 3); (1 4 5)(2 3)");
        assert_eq!(d().to_text().parse::<Origami>().unwrap(), d());
    }

    #[test]
    fn json_mirrors_fields() {
        let json = serde_json::to_string(&l23()).unwrap();
        assert_eq!(
            json,
            r#"{"degree":4,"sigma_a":"(2 3 4)","sigma_b":"(1 2)"}"#
        );
        assert_eq!(serde_json::from_str::<Origami>(&json).unwrap(), l23());
    }

    #[test]
    fn dot_has_all_edges() {
        let dot = l23().to_dot();
        assert_eq!(dot.matches("style=solid").count(), 4);
        assert_eq!(dot.matches("style=dashed").count(), 4);
    }

    #[test]
    fn random_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let o = random_origami(&mut rng, 9);
            let vs = o.vertex_structure();
            assert_eq!(vs.iter().sum::<usize>(), o.degree());
            assert_eq!((o.degree() - vs.len()) % 2, 0);
        }
    }
}
