//! Finite-index subgroups of the free group `F₂ = ⟨x, y⟩`.
//!
//! A subgroup `U` is stored as its coset automaton: states are the cosets
//! (the squares of the corresponding origami), `x` and `y` act as the
//! permutations `σa` and `σb`, and `U` is the stabiliser of the base state.
//! Free bases are Schreier bases read off a breadth-first spanning tree.

use std::collections::VecDeque;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::origami::{Origami, Perm};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Letter {
    X,
    XInv,
    Y,
    YInv,
}

impl Letter {
    pub fn inverse(self) -> Self {
        match self {
            Letter::X => Letter::XInv,
            Letter::XInv => Letter::X,
            Letter::Y => Letter::YInv,
            Letter::YInv => Letter::Y,
        }
    }

    /// 0 for `x`, 1 for `y`.
    pub fn axis(self) -> usize {
        match self {
            Letter::X | Letter::XInv => 0,
            Letter::Y | Letter::YInv => 1,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Letter::X | Letter::Y)
    }

    fn slot(self) -> usize {
        self as usize
    }

    fn from_axis(axis: usize, positive: bool) -> Self {
        match (axis, positive) {
            (0, true) => Letter::X,
            (0, false) => Letter::XInv,
            (_, true) => Letter::Y,
            (_, false) => Letter::YInv,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::XInv => 'X',
            Letter::Y => 'y',
            Letter::YInv => 'Y',
        }
    }

    pub const ALL: [Letter; 4] = [Letter::X, Letter::XInv, Letter::Y, Letter::YInv];
}

/// A freely reduced word in `x`, `y` and their inverses.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct F2Word(Vec<Letter>);

impl F2Word {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Freely reduces `letters`.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = Self::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        F2Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut w = self.clone();
        for &l in &other.0 {
            w.push(l);
        }
        w
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut w = Self::identity();
        for _ in 0..k.unsigned_abs() {
            w = w.concat(&base);
        }
        w
    }

    /// `self · other · self⁻¹`
    pub fn conjugate(&self, other: &Self) -> Self {
        self.concat(other).concat(&self.inverse())
    }
}

impl fmt::Display for F2Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// Parses letters `x`, `X`, `y`, `Y` (capitals are inverses); `1` or the
/// empty string is the identity.
impl FromStr for F2Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = Self::identity();
        for c in s.trim().chars() {
            let l = match c {
                'x' => Letter::X,
                'X' => Letter::XInv,
                'y' => Letter::Y,
                'Y' => Letter::YInv,
                '1' | ' ' | '.' | '*' => continue,
                other => {
                    return Err(Error::Parse(format!(
                        "unexpected character {other:?} in {s:?}"
                    )))
                }
            };
            w.push(l);
        }
        Ok(w)
    }
}

impl Serialize for F2Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for F2Word {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(de)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Lifts to `Aut⁺(F₂)` of `S`, `T`, their inverses and `-I`.
///
/// `γ_T : x ↦ x, y ↦ xy` and `γ_S : x ↦ y, y ↦ x⁻¹` act on abelianisations
/// as `T` and `S`. On a monodromy pair the image subgroup `γ(U)` has
/// monodromy `m ∘ γ⁻¹`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum AutLift {
    S,
    T,
    SInv,
    TInv,
    NegI,
}

impl AutLift {
    /// Monodromy pair of `γ(U)` given that of `U`.
    pub fn apply_to_pair(self, a: &Perm, b: &Perm) -> (Perm, Perm) {
        match self {
            // γ_S⁻¹ : x ↦ y⁻¹, y ↦ x
            AutLift::S => (b.inverse(), a.clone()),
            // γ_S : x ↦ y, y ↦ x⁻¹
            AutLift::SInv => (b.clone(), a.inverse()),
            // γ_T⁻¹ : y ↦ x⁻¹ y
            AutLift::T => (a.clone(), a.inverse().then(b)),
            // γ_T : y ↦ x y
            AutLift::TInv => (a.clone(), a.then(b)),
            AutLift::NegI => (a.inverse(), b.inverse()),
        }
    }

    /// The image of a word under the automorphism itself.
    pub fn apply_to_word(self, w: &F2Word) -> F2Word {
        let image = |l: Letter| -> F2Word {
            let (xi, yi): (&str, &str) = match self {
                AutLift::S => ("y", "X"),
                AutLift::SInv => ("Y", "x"),
                AutLift::T => ("x", "xy"),
                AutLift::TInv => ("x", "Xy"),
                AutLift::NegI => ("X", "Y"),
            };
            let base: F2Word = if l.axis() == 0 { xi } else { yi }
                .parse()
                .expect("static word");
            if l.is_positive() {
                base
            } else {
                base.inverse()
            }
        };
        w.letters()
            .iter()
            .fold(F2Word::identity(), |acc, &l| acc.concat(&image(l)))
    }
}

impl Origami {
    /// The origami of `γ(U)`.
    pub fn apply_aut(&self, gamma: AutLift) -> Origami {
        let (a, b) = gamma.apply_to_pair(self.sigma_a(), self.sigma_b());
        Origami::from_parts_unchecked(a, b)
    }
}

/// Complete folded coset graph of a finite-index subgroup.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CosetAutomaton {
    x: Perm,
    y: Perm,
    base: usize,
}

impl CosetAutomaton {
    pub fn from_origami(o: &Origami, base: usize) -> Self {
        assert!(base < o.degree(), "base state out of range");
        Self {
            x: o.sigma_a().clone(),
            y: o.sigma_b().clone(),
            base,
        }
    }

    pub fn index(&self) -> usize {
        self.x.degree()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn origami(&self) -> Origami {
        Origami::from_parts_unchecked(self.x.clone(), self.y.clone())
    }

    #[inline]
    pub fn step(&self, state: usize, l: Letter) -> usize {
        match l {
            Letter::X => self.x.apply(state),
            Letter::Y => self.y.apply(state),
            // inverse steps are rare enough to search the cycle
            Letter::XInv => preimage(&self.x, state),
            Letter::YInv => preimage(&self.y, state),
        }
    }

    pub fn trace_from(&self, state: usize, w: &F2Word) -> usize {
        w.letters().iter().fold(state, |s, &l| self.step(s, l))
    }

    pub fn trace(&self, w: &F2Word) -> usize {
        self.trace_from(self.base, w)
    }

    pub fn contains(&self, w: &F2Word) -> bool {
        self.trace(w) == self.base
    }

    pub fn apply_aut(&self, gamma: AutLift) -> Self {
        let (x, y) = gamma.apply_to_pair(&self.x, &self.y);
        Self {
            x,
            y,
            base: self.base,
        }
    }

    /// Graphviz rendering: `x`-edges solid, `y`-edges dashed, base doubled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph coset_automaton {\n");
        for s in 0..self.index() {
            let shape = if s == self.base {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(out, "  {} [shape={shape}];", s + 1);
        }
        for s in 0..self.index() {
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"x\", style=solid];",
                s + 1,
                self.x.apply(s) + 1
            );
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"y\", style=dashed];",
                s + 1,
                self.y.apply(s) + 1
            );
        }
        out.push_str("}\n");
        out
    }
}

fn preimage(p: &Perm, state: usize) -> usize {
    let mut prev = state;
    let mut cur = p.apply(state);
    while cur != state {
        prev = cur;
        cur = p.apply(cur);
    }
    prev
}

/// A Schreier basis of `U`: one generator per non-tree edge of a
/// breadth-first spanning tree of the coset automaton.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SubgroupBasis {
    pub gens: Vec<F2Word>,
    /// Non-tree edge `(source state, axis)` behind each generator.
    pub edges: Vec<(usize, usize)>,
    /// Coset representative word of each state (`reps[base]` is empty).
    pub reps: Vec<F2Word>,
    /// `edge_gen[state][axis]` is the generator index of a non-tree edge.
    #[serde(skip)]
    edge_gen: Vec<[Option<usize>; 2]>,
}

impl SubgroupBasis {
    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    /// Reorders the basis so that generator `i` comes first.
    pub fn with_first(&self, i: usize) -> Self {
        let mut order: Vec<usize> = (0..self.gens.len()).collect();
        order.remove(i);
        order.insert(0, i);
        let gens = order.iter().map(|&k| self.gens[k].clone()).collect();
        let edges: Vec<(usize, usize)> = order.iter().map(|&k| self.edges[k]).collect();
        let mut edge_gen = vec![[None; 2]; self.edge_gen.len()];
        for (k, &(s, a)) in edges.iter().enumerate() {
            edge_gen[s][a] = Some(k);
        }
        Self {
            gens,
            edges,
            reps: self.reps.clone(),
            edge_gen,
        }
    }

    /// Re-expands a word over the basis (`(index, ±1)` letters) in `F₂`.
    pub fn expand(&self, word: &[(usize, i8)]) -> F2Word {
        word.iter().fold(F2Word::identity(), |acc, &(k, e)| {
            if e > 0 {
                acc.concat(&self.gens[k])
            } else {
                acc.concat(&self.gens[k].inverse())
            }
        })
    }
}

fn schreier_basis(aut: &CosetAutomaton) -> SubgroupBasis {
    let d = aut.index();
    let mut reps: Vec<Option<F2Word>> = vec![None; d];
    let mut tree = vec![[false; 2]; d];
    reps[aut.base] = Some(F2Word::identity());
    let mut order = vec![aut.base];
    let mut k = 0;
    while k < order.len() {
        let s = order[k];
        k += 1;
        for (axis, edge) in tree[s].iter_mut().enumerate() {
            let l = Letter::from_axis(axis, true);
            let t = aut.step(s, l);
            if reps[t].is_none() {
                let mut w = reps[s].clone().expect("visited");
                w.push(l);
                reps[t] = Some(w);
                *edge = true;
                order.push(t);
            }
        }
    }
    let reps: Vec<F2Word> = reps.into_iter().map(|r| r.expect("transitive")).collect();
    let mut gens = Vec::new();
    let mut edges = Vec::new();
    let mut edge_gen = vec![[None; 2]; d];
    for &s in &order {
        for axis in 0..2 {
            if tree[s][axis] {
                continue;
            }
            let l = Letter::from_axis(axis, true);
            let t = aut.step(s, l);
            let mut w = reps[s].clone();
            w.push(l);
            edge_gen[s][axis] = Some(gens.len());
            gens.push(w.concat(&reps[t].inverse()));
            edges.push((s, axis));
        }
    }
    let basis = SubgroupBasis {
        gens,
        edges,
        reps,
        edge_gen,
    };
    // Put first the generator on the x-cycle through the base, so that
    // for the standard examples it is the pure power x^k.
    let mut s = aut.base;
    loop {
        if let Some(g) = basis.edge_gen[s][0] {
            return basis.with_first(g);
        }
        s = aut.step(s, Letter::X);
    }
}

/// A finite-index subgroup with its automaton and a Schreier basis.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub automaton: CosetAutomaton,
    pub basis: SubgroupBasis,
}

/// The subgroup `U = π₁(X*)` of an origami, based at square 1.
pub fn origami_to_subgroup(o: &Origami) -> Subgroup {
    origami_to_subgroup_at(o, 0)
}

/// As [`origami_to_subgroup`] with an explicit (0-based) base square.
pub fn origami_to_subgroup_at(o: &Origami, base: usize) -> Subgroup {
    Subgroup::from_automaton(CosetAutomaton::from_origami(o, base))
}

impl Subgroup {
    pub fn from_automaton(automaton: CosetAutomaton) -> Self {
        let basis = schreier_basis(&automaton);
        Self { automaton, basis }
    }

    pub fn index(&self) -> usize {
        self.automaton.index()
    }

    pub fn contains(&self, w: &F2Word) -> bool {
        self.automaton.contains(w)
    }

    /// Schreier rewriting of a member as a word over the basis.
    pub fn rewrite_in_basis(&self, w: &F2Word) -> Result<Vec<(usize, i8)>> {
        let aut = &self.automaton;
        let mut s = aut.base;
        let mut out = Vec::new();
        for &l in w.letters() {
            let axis = l.axis();
            if l.is_positive() {
                if let Some(g) = self.basis.edge_gen[s][axis] {
                    out.push((g, 1));
                }
                s = aut.step(s, l);
            } else {
                let t = aut.step(s, l);
                if let Some(g) = self.basis.edge_gen[t][axis] {
                    out.push((g, -1));
                }
                s = t;
            }
        }
        if s != aut.base {
            return Err(Error::NotMember(w.to_string()));
        }
        Ok(out)
    }

    /// Exponent sum of the first basis generator in the basis expression of `w`.
    pub fn alpha(&self, w: &F2Word) -> Result<i64> {
        Ok(self
            .rewrite_in_basis(w)?
            .iter()
            .filter(|(g, _)| *g == 0)
            .map(|&(_, e)| e as i64)
            .sum())
    }

    /// Whether `w ∈ H₀ = ker α`.
    pub fn in_alpha_kernel(&self, w: &F2Word) -> bool {
        matches!(self.alpha(w), Ok(0))
    }

    /// `Hₙ = ker(α mod n)`: states are pairs (state, α mod n).
    pub fn power_kernel(&self, n: usize) -> Subgroup {
        assert!(n >= 1, "power kernel needs n >= 1");
        let d = self.index();
        let aut = &self.automaton;
        let (g1_state, g1_axis) = self.basis.edges[0];
        let idx = |s: usize, r: usize| s * n + r;
        let mut x = vec![0; d * n];
        let mut y = vec![0; d * n];
        for s in 0..d {
            for r in 0..n {
                for (axis, table) in [(0, &mut x), (1, &mut y)] {
                    let t = aut.step(s, Letter::from_axis(axis, true));
                    let shift = usize::from(s == g1_state && axis == g1_axis);
                    table[idx(s, r)] = idx(t, (r + shift) % n);
                }
            }
        }
        let kernel = CosetAutomaton {
            x: Perm::from_images(x).expect("lifted permutation"),
            y: Perm::from_images(y).expect("lifted permutation"),
            base: idx(aut.base, 0),
        };
        Subgroup::from_automaton(kernel)
    }

    /// Searches, for every non-trivial coset representative `w_j`, an
    /// `h ∈ H₀` with `w_j h w_j⁻¹ ∉ U`, using basis words of length at
    /// most `bound`.
    pub fn property_b_check(&self, bound: usize) -> PropertyB {
        let k = self.basis.rank();
        let aut = &self.automaton;
        let mut witnesses = Vec::new();
        let mut missing = Vec::new();
        for j in 0..self.index() {
            if j == aut.base {
                continue;
            }
            let rep = &self.basis.reps[j];
            // Conjugates g1^i g_k g1^-i come first; they normally generate H₀.
            let mut found = None;
            'conj: for i in 0..=bound.saturating_sub(1) as i64 {
                for g in 1..k {
                    for sign in [1i64, -1] {
                        let h = self.basis.gens[0]
                            .pow(sign * i)
                            .conjugate(&self.basis.gens[g]);
                        if aut.trace_from(j, &h) != j {
                            let mut word = vec![(0usize, sign as i8); i as usize];
                            word.push((g, 1));
                            word.extend(vec![(0usize, -sign as i8); i as usize]);
                            found = Some((h, word));
                            break 'conj;
                        }
                        if i == 0 {
                            break;
                        }
                    }
                }
            }
            if found.is_none() {
                found = self.search_kernel_word(j, bound);
            }
            match found {
                Some((h, basis_word)) => {
                    debug_assert!(!aut.contains(&rep.concat(&h).concat(&rep.inverse())));
                    witnesses.push(PropertyBWitness {
                        state: j,
                        rep: rep.clone(),
                        h,
                        basis_word,
                    });
                }
                None => missing.push(j),
            }
        }
        if missing.is_empty() {
            PropertyB::Verified { bound, witnesses }
        } else {
            PropertyB::Unknown { bound, missing }
        }
    }

    /// Depth-first search over reduced basis words of length `<= bound`
    /// with zero `g1`-exponent that move `state`.
    fn search_kernel_word(&self, state: usize, bound: usize) -> Option<(F2Word, Vec<(usize, i8)>)> {
        fn go(
            sub: &Subgroup,
            state: usize,
            cur: usize,
            word: &mut Vec<(usize, i8)>,
            alpha: i64,
            left: usize,
        ) -> bool {
            if alpha == 0 && !word.is_empty() && cur != state {
                return true;
            }
            if left == 0 || alpha.unsigned_abs() as usize > left {
                return false;
            }
            for g in 0..sub.basis.rank() {
                for e in [1i8, -1] {
                    if word.last() == Some(&(g, -e)) {
                        continue;
                    }
                    let gw = if e > 0 {
                        sub.basis.gens[g].clone()
                    } else {
                        sub.basis.gens[g].inverse()
                    };
                    let next = sub.automaton.trace_from(cur, &gw);
                    word.push((g, e));
                    let da = if g == 0 { e as i64 } else { 0 };
                    if go(sub, state, next, word, alpha + da, left - 1) {
                        return true;
                    }
                    word.pop();
                }
            }
            false
        }
        for len in 1..=bound {
            let mut word = Vec::new();
            if go(self, state, state, &mut word, 0, len) {
                return Some((self.basis.expand(&word), word));
            }
        }
        None
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyBWitness {
    pub state: usize,
    pub rep: F2Word,
    pub h: F2Word,
    pub basis_word: Vec<(usize, i8)>,
}

#[derive(Clone, Debug, Serialize)]
pub enum PropertyB {
    Verified {
        bound: usize,
        witnesses: Vec<PropertyBWitness>,
    },
    Unknown {
        bound: usize,
        missing: Vec<usize>,
    },
}

impl PropertyB {
    pub fn is_verified(&self) -> bool {
        matches!(self, PropertyB::Verified { .. })
    }
}

/// Union-find graph used by Stallings folding. Labels are `Letter` slots.
struct Folder {
    parent: Vec<usize>,
    adj: Vec<[Option<usize>; 4]>,
    pending: VecDeque<(usize, usize)>,
}

impl Folder {
    fn new() -> Self {
        Self {
            parent: vec![0],
            adj: vec![[None; 4]],
            pending: VecDeque::new(),
        }
    }

    fn add_vertex(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.adj.push([None; 4]);
        self.parent.len() - 1
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn set(&mut self, u: usize, l: Letter, v: usize) {
        match self.adj[u][l.slot()] {
            Some(w) => {
                if self.find(w) != self.find(v) {
                    self.pending.push_back((w, v));
                }
            }
            None => self.adj[u][l.slot()] = Some(v),
        }
    }

    fn add_edge(&mut self, u: usize, l: Letter, v: usize) {
        let (u, v) = (self.find(u), self.find(v));
        self.set(u, l, v);
        self.set(v, l.inverse(), u);
        self.fold();
    }

    fn fold(&mut self) {
        while let Some((a, b)) = self.pending.pop_front() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (keep, gone) = if a < b { (a, b) } else { (b, a) };
            self.parent[gone] = keep;
            let moved = std::mem::take(&mut self.adj[gone]);
            for l in Letter::ALL {
                if let Some(w) = moved[l.slot()] {
                    self.set(keep, l, w);
                }
            }
        }
    }
}

/// Stallings folding of the generator loops. A complete folded graph is the
/// coset automaton of the generated subgroup; otherwise the subgroup has
/// infinite index and the missing transitions are reported (1-based states
/// in discovery order).
pub fn subgroup_to_automaton(gens: &[F2Word]) -> Result<CosetAutomaton> {
    let mut g = Folder::new();
    for w in gens {
        if w.is_empty() {
            continue;
        }
        let mut cur = 0;
        let n = w.len();
        for (i, &l) in w.letters().iter().enumerate() {
            let next = if i + 1 == n { 0 } else { g.add_vertex() };
            g.add_edge(cur, l, next);
            cur = next;
        }
    }
    // Number surviving vertices in breadth-first order from the base.
    let root = g.find(0);
    let mut number = std::collections::HashMap::new();
    number.insert(root, 0usize);
    let mut order = vec![root];
    let mut k = 0;
    while k < order.len() {
        let v = order[k];
        k += 1;
        for l in Letter::ALL {
            if let Some(w) = g.adj[v][l.slot()] {
                let w = g.find(w);
                if let std::collections::hash_map::Entry::Vacant(e) = number.entry(w) {
                    e.insert(order.len());
                    order.push(w);
                }
            }
        }
    }
    let m = order.len();
    let mut x = vec![usize::MAX; m];
    let mut y = vec![usize::MAX; m];
    let mut missing = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        for l in Letter::ALL {
            match g.adj[v][l.slot()] {
                Some(w) => {
                    let j = number[&g.find(w)];
                    match l {
                        Letter::X => x[i] = j,
                        Letter::Y => y[i] = j,
                        _ => {}
                    }
                }
                None => missing.push((i + 1, l.to_char())),
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteAutomaton(missing));
    }
    Ok(CosetAutomaton {
        x: Perm::from_images(x)?,
        y: Perm::from_images(y)?,
        base: 0,
    })
}

/// The origami of the subgroup generated by `gens`.
pub fn subgroup_to_origami(gens: &[F2Word]) -> Result<Origami> {
    Ok(subgroup_to_automaton(gens)?.origami())
}
