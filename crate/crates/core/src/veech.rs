//! Veech groups of origamis.
//!
//! `SL₂(ℤ)` acts on equivalence classes of origamis through the lifts
//! [`AutLift`]; the Veech group is the stabiliser of the input class. The
//! orbit is enumerated breadth first, so each orbit state is a left coset
//! `AΓ` and the representative word `A` satisfies `A · base = state`.
//! A matrix `M = L₁⋯L_k` acts on a state by applying `L_k` first.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use num_integer::Integer;
use serde::Serialize;

use crate::cosets::enumerate_index;
use crate::error::{Error, Result};
use crate::freegroup::AutLift;
use crate::origami::{Origami, Perm};
use crate::sl2::{decompose_st, eval_word, Gen, MatZ2, STWord};

pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

/// Coset limit for Todd–Coxeter comparisons of generating sets.
pub const DEFAULT_COSET_CAP: usize = 200_000;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SchreierGenerator {
    pub matrix: MatZ2,
    pub word: STWord,
}

/// The Veech group as a transitive coset action of `SL₂(ℤ)`.
#[derive(Clone, Debug)]
pub struct VeechGroup {
    degree: usize,
    orbit: Vec<Origami>,
    s_action: Perm,
    t_action: Perm,
    reps: Vec<STWord>,
    schreier_gens: Vec<SchreierGenerator>,
}

pub fn compute_veech(o: &Origami) -> Result<VeechGroup> {
    compute_veech_with_cap(o, DEFAULT_ORBIT_CAP)
}

/// Breadth-first orbit of the canonical form of `o` under `S` and `T`.
pub fn compute_veech_with_cap(o: &Origami, cap: usize) -> Result<VeechGroup> {
    let start = o.canonical();
    let mut index: HashMap<Origami, usize> = HashMap::new();
    index.insert(start.clone(), 0);
    let mut orbit = vec![start];
    let mut reps = vec![STWord::new()];
    let mut s_img = Vec::new();
    let mut t_img = Vec::new();
    let mut k = 0;
    while k < orbit.len() {
        for (gen, lift, img) in [
            (Gen::S, AutLift::S, &mut s_img),
            (Gen::T, AutLift::T, &mut t_img),
        ] {
            let next = orbit[k].apply_aut(lift).canonical();
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if orbit.len() >= cap {
                        return Err(Error::OrbitCap(cap));
                    }
                    let id = orbit.len();
                    index.insert(next.clone(), id);
                    orbit.push(next);
                    reps.push(STWord::gen(gen).concat(&reps[k]));
                    id
                }
            };
            img.push(id);
        }
        k += 1;
    }
    let s_action = Perm::from_images(s_img)?;
    let t_action = Perm::from_images(t_img)?;

    // Schreier generators rep(L·s)⁻¹ · L · rep(s), deduplicated by matrix.
    let mut seen = HashSet::new();
    let mut schreier_gens = Vec::new();
    for s in 0..orbit.len() {
        for (gen, action) in [(Gen::S, &s_action), (Gen::T, &t_action)] {
            let t = action.apply(s);
            let word = reps[t].inverse().concat(&STWord::gen(gen)).concat(&reps[s]);
            let matrix = eval_word(&word);
            if matrix.is_identity() || !seen.insert(matrix.clone()) {
                continue;
            }
            schreier_gens.push(SchreierGenerator { matrix, word });
        }
    }
    Ok(VeechGroup {
        degree: o.degree(),
        orbit,
        s_action,
        t_action,
        reps,
        schreier_gens,
    })
}

/// One cusp: the coset where its `T`-cycle starts and the cycle length.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Cusp {
    pub coset: usize,
    pub rep: STWord,
    pub width: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CuspData {
    pub cusps: Vec<Cusp>,
}

impl CuspData {
    pub fn widths(&self) -> Vec<usize> {
        self.cusps.iter().map(|c| c.width).collect()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CurveInvariants {
    pub index: usize,
    /// Index of the image in PSL₂(ℤ).
    pub projective_index: usize,
    pub contains_minus_identity: bool,
    pub cusp_count: usize,
    pub cusp_widths: Vec<usize>,
    pub e2: usize,
    pub e3: usize,
    pub genus: usize,
    pub general_level: u64,
}

impl VeechGroup {
    /// Degree of the origami the group was computed from.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn index(&self) -> usize {
        self.orbit.len()
    }

    /// The orbit of canonical forms; position 0 is the input origami.
    pub fn orbit(&self) -> &[Origami] {
        &self.orbit
    }

    pub fn s_action(&self) -> &Perm {
        &self.s_action
    }

    pub fn t_action(&self) -> &Perm {
        &self.t_action
    }

    pub fn schreier_generators(&self) -> &[SchreierGenerator] {
        &self.schreier_gens
    }

    /// Words `A` with `A · base` the respective coset, in orbit order.
    pub fn coset_representatives(&self) -> &[STWord] {
        &self.reps
    }

    fn act_run(&self, state: usize, g: Gen, exp: i64) -> usize {
        let perm = match g {
            Gen::S => &self.s_action,
            Gen::T => &self.t_action,
        };
        let mut cycle = vec![state];
        let mut cur = perm.apply(state);
        while cur != state {
            cycle.push(cur);
            cur = perm.apply(cur);
        }
        cycle[exp.rem_euclid(cycle.len() as i64) as usize]
    }

    /// The state `w · state`.
    pub fn act(&self, state: usize, w: &STWord) -> usize {
        w.runs()
            .iter()
            .rev()
            .fold(state, |s, &(g, e)| self.act_run(s, g, e))
    }

    /// The coset `w · base`.
    pub fn coset_of(&self, w: &STWord) -> usize {
        self.act(0, w)
    }

    pub fn member_word(&self, w: &STWord) -> bool {
        self.coset_of(w) == 0
    }

    pub fn member(&self, m: &MatZ2) -> bool {
        self.member_word(&decompose_st(m))
    }

    pub fn contains_minus_identity(&self) -> bool {
        self.member(&MatZ2::neg_identity())
    }

    /// Cycles of `T` on the cosets; the width of a cusp is its cycle length.
    pub fn cusps(&self) -> CuspData {
        let cusps = self
            .t_action
            .cycles()
            .into_iter()
            .map(|cycle| Cusp {
                coset: cycle[0],
                rep: self.reps[cycle[0]].clone(),
                width: cycle.len(),
            })
            .collect();
        CuspData { cusps }
    }

    /// Checks each width against the amplitude definition: with `A` the
    /// cusp representative, `A⁻¹ Tʷ A ∈ Γ` for `w` = width and for no
    /// smaller positive `w`.
    pub fn verify_cusp_widths(&self) -> bool {
        self.cusps().cusps.iter().all(|c| {
            let a = eval_word(&c.rep);
            let a_inv = a.inverse();
            (1..=c.width).all(|w| {
                let conj = &(&a_inv * &MatZ2::t_pow(w as i64)) * &a;
                self.member(&conj) == (w == c.width)
            })
        })
    }

    /// The parabolic element `A⁻¹ Tʷ A` of each cusp, in cusp order.
    pub fn cusp_generators(&self) -> Vec<MatZ2> {
        self.cusps()
            .cusps
            .iter()
            .map(|c| {
                let a = eval_word(&c.rep);
                &(&a.inverse() * &MatZ2::t_pow(c.width as i64)) * &a
            })
            .collect()
    }

    /// Least common multiple of the cusp widths.
    pub fn general_level(&self) -> u64 {
        self.cusps()
            .widths()
            .iter()
            .fold(1u64, |acc, &w| acc.lcm(&(w as u64)))
    }

    /// Index, elliptic points, cusps and genus of `ℍ/Γ`.
    ///
    /// Everything is computed on the classes `{A, -A}`, i.e. on the image
    /// of `Γ` in PSL₂(ℤ); when `-I ∈ Γ` these are the cosets themselves.
    pub fn curve_invariants(&self) -> Result<CurveInvariants> {
        let n = self.index();
        let s2 = self.s_action.then(&self.s_action);
        let mut class = vec![usize::MAX; n];
        let mut classes = 0;
        for s in 0..n {
            if class[s] == usize::MAX {
                class[s] = classes;
                class[s2.apply(s)] = classes;
                classes += 1;
            }
        }
        let induced = |p: &Perm| {
            let mut img = vec![0; classes];
            for s in 0..n {
                img[class[s]] = class[p.apply(s)];
            }
            Perm::from_images(img)
        };
        let s_bar = induced(&self.s_action)?;
        let t_bar = induced(&self.t_action)?;
        // ST acts by T first, then S.
        let st_bar = t_bar.then(&s_bar);
        let fixed = |p: &Perm| (0..classes).filter(|&c| p.apply(c) == c).count();
        let e2 = fixed(&s_bar);
        let e3 = fixed(&st_bar);
        let cusp_widths: Vec<usize> = t_bar.cycles().iter().map(Vec::len).collect();
        let c = cusp_widths.len();
        // 12 g = 12 + μ - 3 e₂ - 4 e₃ - 6 c
        let twelve_g = 12 + classes as i64 - 3 * e2 as i64 - 4 * e3 as i64 - 6 * c as i64;
        if twelve_g < 0 || twelve_g % 12 != 0 {
            return Err(Error::CheckFailed(format!(
                "genus formula gives {twelve_g}/12 (index {classes}, e2 {e2}, e3 {e3}, cusps {c})"
            )));
        }
        Ok(CurveInvariants {
            index: n,
            projective_index: classes,
            contains_minus_identity: classes == n,
            cusp_count: c,
            cusp_widths,
            e2,
            e3,
            genus: (twelve_g / 12) as usize,
            general_level: self.general_level(),
        })
    }

    /// Whether `listed_gens` generate exactly this group: each must be a
    /// member, and the subgroup they generate must have the same index.
    /// The index of the generated subgroup comes from Todd–Coxeter
    /// enumeration; an enumeration that overflows counts as a mismatch.
    pub fn generators_match(&self, gens: &[MatZ2]) -> bool {
        self.generators_match_with_cap(gens, DEFAULT_COSET_CAP)
    }

    pub fn generators_match_with_cap(&self, gens: &[MatZ2], cap: usize) -> bool {
        if !gens.iter().all(|g| self.member(g)) {
            return false;
        }
        let words: Vec<STWord> = gens.iter().map(decompose_st).collect();
        matches!(enumerate_index(&words, cap), Ok(i) if i == self.index())
    }

    /// Maps each word to its left coset `AΓ`. Returns the coset list and
    /// whether the words hit pairwise distinct cosets.
    pub fn classify_words(&self, words: &[STWord]) -> (Vec<usize>, bool) {
        distinct_images(words.iter().map(|w| self.coset_of(w)))
    }

    /// As [`classify_words`](Self::classify_words), for right cosets `ΓA`.
    /// `ΓA = ΓB` iff `A⁻¹Γ = B⁻¹Γ`.
    pub fn classify_right_cosets(&self, words: &[STWord]) -> (Vec<usize>, bool) {
        distinct_images(words.iter().map(|w| self.coset_of(&w.inverse())))
    }

    /// Graphviz rendering of the coset graph with labelled `S`- and `T`-edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph coset_graph {\n");
        for s in 0..self.index() {
            let rep = if self.reps[s].is_empty() {
                "I".to_string()
            } else {
                self.reps[s].to_string()
            };
            let _ = writeln!(out, "  {s} [label=\"{rep}\"];");
        }
        for s in 0..self.index() {
            let _ = writeln!(out, "  {s} -> {} [label=\"S\"];", self.s_action.apply(s));
            let _ = writeln!(
                out,
                "  {s} -> {} [label=\"T\", style=dashed];",
                self.t_action.apply(s)
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn report(&self) -> Result<VeechReport> {
        let curve = self.curve_invariants()?;
        Ok(VeechReport {
            degree: self.degree,
            index: self.index(),
            generators: self.schreier_gens.clone(),
            coset_reps: self.reps.clone(),
            cusps: self
                .cusps()
                .cusps
                .into_iter()
                .map(|c| CuspReport {
                    rep: c.rep,
                    width: c.width,
                })
                .collect(),
            general_level: curve.general_level,
            curve: CurveReport {
                genus: curve.genus,
                e2: curve.e2,
                e3: curve.e3,
                cusps: curve.cusp_count,
            },
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspReport {
    pub rep: STWord,
    pub width: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveReport {
    pub genus: usize,
    pub e2: usize,
    pub e3: usize,
    pub cusps: usize,
}

/// Serialisable summary of a Veech group computation.
#[derive(Clone, Debug, Serialize)]
pub struct VeechReport {
    pub degree: usize,
    pub index: usize,
    pub generators: Vec<SchreierGenerator>,
    pub coset_reps: Vec<STWord>,
    pub cusps: Vec<CuspReport>,
    pub general_level: u64,
    pub curve: CurveReport,
}

fn distinct_images(it: impl Iterator<Item = usize>) -> (Vec<usize>, bool) {
    let cosets: Vec<usize> = it.collect();
    let distinct = cosets.iter().collect::<HashSet<_>>().len() == cosets.len();
    (cosets, distinct)
}

/// Breadth-first closure `{A · base}` of the words' cosets, as a set
/// independent of the stored representatives.
pub fn orbit_of_base(g: &VeechGroup) -> usize {
    let mut seen = vec![false; g.index()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(s) = queue.pop_front() {
        for p in [g.s_action(), g.t_action()] {
            let t = p.apply(s);
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    seen.iter().filter(|&&b| b).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::origami::testing::{random_origami, random_perm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(a: i64, b: i64, c: i64, d: i64) -> MatZ2 {
        MatZ2::from_i64(a, b, c, d).unwrap()
    }

    fn l23() -> Origami {
        Origami::from_cycles(4, "(2 3 4)", "(1 2)").unwrap()
    }

    fn d() -> Origami {
        Origami::from_cycles(5, "(1 2 3)", "(1 4 5)(2 3)").unwrap()
    }

    fn words(list: &[&str]) -> Vec<STWord> {
        list.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn l23_gens() -> Vec<MatZ2> {
        vec![
            m(1, 3, 0, 1),
            m(1, 0, 2, 1),
            m(-1, 3, -2, 5),
            m(3, -5, 2, -3),
            MatZ2::neg_identity(),
        ]
    }

    fn d_gens() -> Vec<MatZ2> {
        vec![
            MatZ2::neg_identity(),
            m(1, 3, 0, 1),
            m(1, 0, -6, 1),
            m(-7, 16, -4, 9),
            m(-3, 4, -4, 5),
            m(-9, 5, -20, 11),
            m(7, 2, -18, -5),
        ]
    }

    #[test]
    fn trivial_origami() {
        let g = compute_veech(&Origami::trivial()).unwrap();
        assert_eq!(g.index(), 1);
        assert_eq!(g.cusps().widths(), vec![1]);
        assert_eq!(g.general_level(), 1);
        let c = g.curve_invariants().unwrap();
        assert_eq!((c.genus, c.cusp_count, c.e2, c.e3), (0, 1, 1, 1));
        assert_eq!(g.coset_representatives(), &[STWord::new()]);
    }

    #[test]
    fn l23_group() {
        let g = compute_veech(&l23()).unwrap();
        assert_eq!(g.index(), 9);
        for gen in l23_gens() {
            assert!(g.member(&gen), "{gen}");
        }
        assert!(!g.member(&MatZ2::t()));
        let mut widths = g.cusps().widths();
        widths.sort();
        assert_eq!(widths, vec![2, 3, 4]);
        assert_eq!(g.general_level(), 12);
        let c = g.curve_invariants().unwrap();
        assert_eq!((c.genus, c.cusp_count), (0, 3));
        assert!(g.verify_cusp_widths());
        assert!(g.generators_match(&l23_gens()));
        assert!(!g.generators_match(&[MatZ2::identity()]));
    }

    #[test]
    fn l23_listed_generator_words() {
        for (word, mat) in [
            ("TTT", m(1, 3, 0, 1)),
            ("TSTTStt", m(-1, 3, -2, 5)),
            ("TSTStS", m(1, 0, 2, 1)),
            ("TTSTStstt", m(3, -5, 2, -3)),
        ] {
            let w: STWord = word.parse().unwrap();
            let e = eval_word(&w);
            assert!(e == mat || e == mat.neg(), "{word}: {e}");
        }
    }

    #[test]
    fn l23_representatives() {
        let g = compute_veech(&l23()).unwrap();
        let listed = words(&["I", "T", "S", "TT", "TS", "ST", "TTS", "TST", "TTST"]);
        // They are representatives of right cosets, not of left ones.
        assert!(g.classify_right_cosets(&listed).1);
        assert!(!g.classify_words(&listed).1);
    }

    #[test]
    fn d_representatives() {
        let g = compute_veech(&d()).unwrap();
        let listed = words(&[
            "I",
            "T",
            "S",
            "TT",
            "TS",
            "ST",
            "TTS",
            "TST",
            "STT",
            "STS",
            "TTST",
            "TSTT",
            "ST^5",
            "ST^3",
            "TTS",
            "TST^3",
            "TSTTS",
            "ST^4",
            "ST^3S",
            "TSTTSt",
            "TSTTStt",
            "TSTTSttt",
            "TSTTStttt",
            "STTTST",
        ]);
        let (cosets, distinct) = g.classify_right_cosets(&listed);
        // TTS is listed twice; the other 23 words are pairwise inequivalent.
        assert!(!distinct);
        let unique: HashSet<usize> = cosets.iter().copied().collect();
        assert_eq!(unique.len(), 23);
    }

    #[test]
    fn d_group() {
        let g = compute_veech(&d()).unwrap();
        assert_eq!(g.index(), 24);
        assert!(g.contains_minus_identity());
        assert!(!g.member(&MatZ2::t()));
        for gen in d_gens() {
            assert!(g.member(&gen), "{gen}");
        }
        assert!(g.generators_match(&d_gens()));
        let mut widths = g.cusps().widths();
        widths.sort();
        assert_eq!(widths, vec![2, 3, 4, 4, 5, 6]);
        assert_eq!(g.general_level(), 60);
        let c = g.curve_invariants().unwrap();
        assert_eq!((c.genus, c.cusp_count), (0, 6));
        assert!(g.verify_cusp_widths());
    }

    #[test]
    fn d_generator_words() {
        for (word, mat) in [
            ("ST^6s", m(1, 0, -6, 1)),
            ("TTS T^4 stt", m(-7, 16, -4, 9)),
            ("TS T^4 st", m(-3, 4, -4, 5)),
            ("TSTTS T^5 sttst", m(-9, 5, -20, 11)),
            ("STTTS TT sttts", m(7, 2, -18, -5)),
        ] {
            let w: STWord = word.parse().unwrap();
            assert_eq!(eval_word(&w), mat, "{word}");
        }
    }

    #[test]
    fn parabolic_membership_l23() {
        let g = compute_veech(&l23()).unwrap();
        for s in -12..=12 {
            assert_eq!(g.member(&MatZ2::t_pow(s)), s % 3 == 0, "s = {s}");
        }
    }

    #[test]
    fn schreier_generators_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let o = random_origami(&mut rng, 6);
            let g = compute_veech(&o).unwrap();
            assert_eq!(orbit_of_base(&g), g.index());
            for sg in g.schreier_generators() {
                assert_eq!(eval_word(&sg.word), sg.matrix);
                assert!(g.member(&sg.matrix));
            }
            let widths: usize = g.cusps().widths().iter().sum();
            assert_eq!(widths, g.index());
            g.curve_invariants().unwrap();
            // Schreier generators generate the stabiliser.
            let gens: Vec<MatZ2> = g
                .schreier_generators()
                .iter()
                .map(|s| s.matrix.clone())
                .collect();
            if !gens.is_empty() {
                assert!(g.generators_match(&gens));
            }
        }
    }

    #[test]
    fn conjugate_inputs_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let o = random_origami(&mut rng, 6);
            let s = random_perm(&mut rng, o.degree());
            let o2 = o.relabel(s.images());
            let g1 = compute_veech(&o).unwrap();
            let g2 = compute_veech(&o2).unwrap();
            assert_eq!(g1.index(), g2.index());
            // same canonical orbit, hence identical actions
            assert_eq!(g1.orbit(), g2.orbit());
            assert_eq!(g1.s_action(), g2.s_action());
        }
    }

    #[test]
    fn membership_is_word_independent() {
        let g = compute_veech(&d()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let mut w = STWord::new();
            for _ in 0..rng.gen_range(0..20) {
                let gen = if rng.gen() { Gen::S } else { Gen::T };
                w.push(gen, rng.gen_range(-3..=3));
            }
            let mat = eval_word(&w);
            // the random word and the Euclidean word give the same answer
            assert_eq!(g.member_word(&w), g.member(&mat));
            // an inserted relator S⁴ or S²(ST)⁻³ does not change membership
            let padded = w.concat(&"SSSS".parse().unwrap());
            assert_eq!(g.member_word(&padded), g.member(&mat));
            let padded = "SStststs".parse::<STWord>().unwrap().concat(&w);
            assert_eq!(g.member_word(&padded), g.member(&mat));
        }
    }

    #[test]
    fn orbit_cap() {
        assert!(matches!(
            compute_veech_with_cap(&d(), 5),
            Err(Error::OrbitCap(5))
        ));
    }

    #[test]
    fn report_schema() {
        let g = compute_veech(&l23()).unwrap();
        let json = serde_json::to_value(g.report().unwrap()).unwrap();
        for key in [
            "degree",
            "index",
            "generators",
            "coset_reps",
            "cusps",
            "general_level",
            "curve",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["index"], 9);
        assert_eq!(json["curve"]["genus"], 0);
        assert!(g.to_dot().contains("label=\"S\""));
    }
}
