//! Congruence testing for Veech groups.
//!
//! By Wohlfahrt's theorem a congruence group of general level `N` contains
//! `Γ(N)`. Since `Γ ⊆ π_N⁻¹(π_N(Γ))` with equality iff `Γ(N) ⊆ Γ`, the test
//! compares `[SL₂(ℤ) : Γ]` with `[SL₂(ℤ/N) : π_N(Γ)]`.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::catalog;
use crate::error::{Error, Result};
use crate::sl2::{
    crt_combine, crt_split, decompose_st, eval_word, reduce_mod, sl2_order, subgroup_closure_mod,
    Gen, MatModN, MatZ2, STWord, SubgroupClosure, DEFAULT_CLOSURE_CAP,
};
use crate::veech::{compute_veech, VeechGroup};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(tag = "kind")]
pub enum Verdict {
    /// Contains `Γ(level)`, and `level` is the least such divisor of the
    /// general level.
    Congruence {
        level: u64,
    },
    NonCongruence,
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceReport {
    pub general_level: u64,
    pub index_in_sl2z: usize,
    /// `|π_N(Γ)|`.
    pub image_order: u64,
    /// `|SL₂(ℤ/N)|`.
    pub sl2_mod_order: u64,
    /// `[SL₂(ℤ/N) : π_N(Γ)]`.
    pub index_mod_level: u64,
    pub verdict: Verdict,
    pub closure_cap: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl CongruenceReport {
    pub fn is_congruence(&self) -> bool {
        matches!(self.verdict, Verdict::Congruence { .. })
    }
}

fn reduced_generators(g: &VeechGroup, n: u64) -> Vec<MatModN> {
    g.schreier_generators()
        .iter()
        .map(|s| reduce_mod(&s.matrix, n))
        .collect()
}

/// `π_N(Γ)` as the closure of the reduced Schreier generators.
pub fn image_mod(g: &VeechGroup, n: u64, cap: usize) -> Result<SubgroupClosure> {
    subgroup_closure_mod(&reduced_generators(g, n), n, cap)
}

/// Whether `Γ(n) ⊆ Γ`, by index comparison.
pub fn contains_principal(g: &VeechGroup, n: u64, cap: usize) -> Result<bool> {
    let image = image_mod(g, n, cap)?;
    Ok(g.index() as u64 * image.size() as u64 == sl2_order(n))
}

pub fn is_congruence(g: &VeechGroup) -> Result<CongruenceReport> {
    is_congruence_with_cap(g, DEFAULT_CLOSURE_CAP)
}

pub fn is_congruence_with_cap(g: &VeechGroup, cap: usize) -> Result<CongruenceReport> {
    let n = g.general_level();
    let image = image_mod(g, n, cap)?;
    let order = sl2_order(n);
    let image_order = image.size() as u64;
    let index_mod_level = order / image_order;
    let verdict = if index_mod_level == g.index() as u64 {
        let level = divisors(n)
            .into_iter()
            .find(|&d| matches!(contains_principal(g, d, cap), Ok(true)))
            .unwrap_or(n);
        Verdict::Congruence { level }
    } else {
        Verdict::NonCongruence
    };
    Ok(CongruenceReport {
        general_level: n,
        index_in_sl2z: g.index(),
        image_order,
        sl2_mod_order: order,
        index_mod_level,
        verdict,
        closure_cap: cap,
        witness: None,
    })
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Size of the orbit of `(I, base)` under left multiplication by `S` and
/// `T`, acting on `SL₂(ℤ/n) × cosets`. The stabiliser is `Γ ∩ Γ(n)`, so the
/// orbit has `|SL₂(ℤ/n)|` elements exactly when `Γ(n) ⊆ Γ`.
pub fn pair_orbit_size(g: &VeechGroup, n: u64, cap: usize) -> Result<usize> {
    let orbit = PairOrbit::explore(g, n, cap, false)?;
    Ok(orbit.states.len())
}

struct PairOrbit {
    states: Vec<([u64; 4], usize)>,
    parent: Vec<(usize, Gen)>,
    /// Two states with equal matrix and different cosets, if asked for.
    collision: Option<(usize, usize)>,
}

impl PairOrbit {
    fn explore(g: &VeechGroup, n: u64, cap: usize, stop_at_collision: bool) -> Result<Self> {
        let moves = [
            (Gen::S, reduce_mod(&MatZ2::s(), n), g.s_action()),
            (Gen::T, reduce_mod(&MatZ2::t(), n), g.t_action()),
        ];
        let start = (MatModN::identity(n).entries(), 0usize);
        let mut index = HashMap::from([(start, 0usize)]);
        let mut first_by_matrix = HashMap::from([(start.0, 0usize)]);
        let mut out = Self {
            states: vec![start],
            parent: vec![(0, Gen::S)],
            collision: None,
        };
        let mut k = 0;
        while k < out.states.len() {
            let (e, coset) = out.states[k];
            let m = MatModN::new(n, e.map(|x| x as i64))?;
            for (gen, lm, perm) in &moves {
                let next = (lm.mul(&m).entries(), perm.apply(coset));
                if index.contains_key(&next) {
                    continue;
                }
                if out.states.len() >= cap {
                    return Err(Error::OrbitCap(cap));
                }
                let id = out.states.len();
                index.insert(next, id);
                out.states.push(next);
                out.parent.push((k, *gen));
                let first = *first_by_matrix.entry(next.0).or_insert(id);
                if stop_at_collision && first != id {
                    out.collision = Some((first, id));
                    return Ok(out);
                }
            }
            k += 1;
        }
        Ok(out)
    }

    /// The word `A` with `A · (I, base)` equal to state `id`.
    fn word(&self, mut id: usize) -> STWord {
        let mut gens = Vec::new();
        while id != 0 {
            let (p, gen) = self.parent[id];
            gens.push(gen);
            id = p;
        }
        // gens lists the left factors from the outside in
        STWord::from_runs(gens.into_iter().map(|g| (g, 1)))
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct WitnessFactor {
    pub matrix: MatZ2,
    pub exponent: u64,
}

/// `g ∈ Γ` and `h ∉ Γ` with `g ≡ h (mod N)`, so `Γ(N) ⊄ Γ`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Witness {
    pub modulus: u64,
    /// `g` as an ordered product of powers of group elements.
    pub factors: Vec<WitnessFactor>,
    pub g: MatZ2,
    pub h: MatZ2,
    pub h_word: STWord,
}

impl Witness {
    pub fn from_factors(modulus: u64, factors: Vec<WitnessFactor>, h: MatZ2) -> Self {
        let g = factors.iter().fold(MatZ2::identity(), |acc, f| {
            acc * f.matrix.pow(f.exponent as i64)
        });
        let h_word = decompose_st(&h);
        Self {
            modulus,
            factors,
            g,
            h,
            h_word,
        }
    }

    /// Re-checks all three defining properties from scratch.
    pub fn verify(&self, group: &VeechGroup) -> Result<()> {
        let product = self.factors.iter().fold(MatZ2::identity(), |acc, f| {
            acc * f.matrix.pow(f.exponent as i64)
        });
        if product != self.g {
            return Err(Error::CheckFailed("factors do not multiply to g".into()));
        }
        if let Some(f) = self.factors.iter().find(|f| !group.member(&f.matrix)) {
            return Err(Error::CheckFailed(format!(
                "factor {} not in group",
                f.matrix
            )));
        }
        if !group.member(&self.g) {
            return Err(Error::CheckFailed(format!("g = {} not in group", self.g)));
        }
        if eval_word(&self.h_word) != self.h {
            return Err(Error::CheckFailed("h_word does not evaluate to h".into()));
        }
        if group.member(&self.h) || group.member_word(&self.h_word) {
            return Err(Error::CheckFailed(format!("h = {} lies in group", self.h)));
        }
        if reduce_mod(&self.g, self.modulus) != reduce_mod(&self.h, self.modulus) {
            return Err(Error::CheckFailed(format!(
                "g and h differ mod {}",
                self.modulus
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let product: Vec<String> = self
            .factors
            .iter()
            .map(|x| format!("{}^{}", x.matrix, x.exponent))
            .collect();
        let product = if product.is_empty() {
            "I".to_string()
        } else {
            product.join(" * ")
        };
        write!(
            f,
            "g = {product} = {} is in the group, h = {} is not, g = h mod {}",
            self.g, self.h, self.modulus
        )
    }
}

/// Default length of generator-power products tried by [`find_witness`].
pub const DEFAULT_WITNESS_LENGTH: usize = 2;

/// Default state limit for the fallback search through `Γ(N)`.
pub const DEFAULT_WITNESS_STATES: usize = 5_000_000;

/// Finds a verified witness that `Γ(n) ⊄ Γ`.
///
/// Tries products `g₁^a g₂^b` of at most two powers, exponents below their
/// orders mod `n`, of the cusp generators followed by the Schreier
/// generators. Targets are first `T`, then the powers `Tʲ` outside `Γ`, then all
/// `R Tʲ` and `R Tʲ R⁻¹` outside `Γ`. If nothing matches, an element of
/// `Γ(n) \ Γ` is read off the pair orbit, with `g = I`.
///
/// Fails with [`Error::Precondition`] when `Γ(n) ⊆ Γ`.
pub fn find_witness(g: &VeechGroup, n: u64) -> Result<Option<Witness>> {
    if contains_principal(g, n, DEFAULT_CLOSURE_CAP)? {
        return Err(Error::Precondition(format!(
            "the group contains the principal congruence group of level {n}"
        )));
    }
    let mut gens = g.cusp_generators();
    for s in g.schreier_generators() {
        if !gens.contains(&s.matrix) {
            gens.push(s.matrix.clone());
        }
    }
    let powers: Vec<MatZ2> = (1..n as i64).map(MatZ2::t_pow).collect();
    for targets in [vec![MatZ2::t()], powers, outside_targets(g, n)] {
        if let Some(w) = find_witness_among(g, n, &gens, &targets, DEFAULT_WITNESS_LENGTH) {
            return Ok(Some(w));
        }
    }
    Ok(kernel_witness(g, n, DEFAULT_WITNESS_STATES))
}

/// Candidate elements outside `Γ`: `R Tʲ` and `R Tʲ R⁻¹` for coset
/// representatives `R` and `0 ≤ j < n`.
fn outside_targets(g: &VeechGroup, n: u64) -> Vec<MatZ2> {
    let mut out = Vec::new();
    for r in g.coset_representatives() {
        let r = eval_word(r);
        let r_inv = r.inverse();
        for j in 0..n as i64 {
            let tj = MatZ2::t_pow(j);
            let a = &r * &tj;
            let b = &a * &r_inv;
            for h in [a, b] {
                if !g.member(&h) {
                    out.push(h);
                }
            }
        }
    }
    out
}

/// Products of at most `max_len` powers of `gens` (consecutive factors
/// distinct) whose reduction mod `n` equals that of some target outside
/// `Γ`. Returns the first verified hit in search order.
pub fn find_witness_among(
    g: &VeechGroup,
    n: u64,
    gens: &[MatZ2],
    targets: &[MatZ2],
    max_len: usize,
) -> Option<Witness> {
    let mut wanted: HashMap<MatModN, &MatZ2> = HashMap::new();
    for h in targets {
        if !g.member(h) {
            wanted.entry(reduce_mod(h, n)).or_insert(h);
        }
    }
    if wanted.is_empty() {
        return None;
    }
    let reduced: Vec<MatModN> = gens.iter().map(|m| reduce_mod(m, n)).collect();
    let orders: Vec<u64> = reduced.iter().map(MatModN::order).collect();
    let mut stack: Vec<(usize, u64)> = Vec::new();
    for len in 1..=max_len {
        if let Some(w) = search_products(g, n, gens, &reduced, &orders, &wanted, len, &mut stack) {
            return Some(w);
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn search_products(
    g: &VeechGroup,
    n: u64,
    gens: &[MatZ2],
    reduced: &[MatModN],
    orders: &[u64],
    wanted: &HashMap<MatModN, &MatZ2>,
    len: usize,
    stack: &mut Vec<(usize, u64)>,
) -> Option<Witness> {
    if stack.len() == len {
        let prod = stack.iter().fold(MatModN::identity(n), |acc, &(i, e)| {
            acc.mul(&reduced[i].pow(e))
        });
        let h = wanted.get(&prod)?;
        let factors = stack
            .iter()
            .map(|&(i, e)| WitnessFactor {
                matrix: gens[i].clone(),
                exponent: e,
            })
            .collect();
        let w = Witness::from_factors(n, factors, (*h).clone());
        return w.verify(g).is_ok().then_some(w);
    }
    for i in 0..gens.len() {
        if stack.last().is_some_and(|&(j, _)| j == i) {
            continue;
        }
        for e in 1..orders[i] {
            stack.push((i, e));
            let hit = search_products(g, n, gens, reduced, orders, wanted, len, stack);
            stack.pop();
            if hit.is_some() {
                return hit;
            }
        }
    }
    None
}

/// An element of `Γ(n)` outside `Γ`, found as `A⁻¹B` for two words with
/// `A ≡ B (mod n)` reaching different cosets.
fn kernel_witness(g: &VeechGroup, n: u64, cap: usize) -> Option<Witness> {
    let orbit = PairOrbit::explore(g, n, cap, true).ok()?;
    let (a, b) = orbit.collision?;
    let h_word = orbit.word(a).inverse().concat(&orbit.word(b));
    let w = Witness {
        modulus: n,
        factors: Vec::new(),
        g: MatZ2::identity(),
        h: eval_word(&h_word),
        h_word,
    };
    w.verify(g).is_ok().then_some(w)
}

/// One recomputed step of the mod-60 argument.
#[derive(Clone, Debug, Serialize)]
pub struct ProofStep {
    pub claim: String,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProofTrace {
    pub steps: Vec<ProofStep>,
    pub witness: Witness,
}

impl fmt::Display for ProofTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "{:>2}. {}: {}", i + 1, s.claim, s.value)?;
        }
        write!(f, "witness: {}", self.witness)
    }
}

fn triple(parts: &[MatModN]) -> String {
    let parts: Vec<String> = parts.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn mat(n: u64, e: [i64; 4]) -> MatModN {
    MatModN::new(n, e).expect("listed matrices have determinant 1")
}

/// Recomputes the proof that the Veech group of `D` does not contain
/// `Γ(60)`: every displayed residue triple, both order triples, the
/// membership facts and the final congruence `A₆²⁰A₁⁷ ≡ T (mod 60)`.
pub fn replay_mod60_proof() -> Result<ProofTrace> {
    const FACTORS: [u64; 3] = [4, 3, 5];
    let mut steps = Vec::new();
    let mut check = |claim: &str, ok: bool, value: String| -> Result<()> {
        if !ok {
            return Err(Error::CheckFailed(format!("{claim}: got {value}")));
        }
        steps.push(ProofStep {
            claim: claim.to_string(),
            value,
        });
        Ok(())
    };
    let u = |n| mat(n, [1, 1, 0, 1]);
    let id = MatModN::identity;

    let a1 = MatZ2::from_i64(1, 3, 0, 1)?;
    let a6 = MatZ2::from_i64(7, 2, -18, -5)?;
    let t = MatZ2::t();
    let a1_word: STWord = "TTT".parse()?;
    let a6_word: STWord = "sTTstsTsttts".parse()?;
    check("A1 = T^3", eval_word(&a1_word) == a1, a1_word.to_string())?;
    check(
        "A6 = S^-1 T^2 S^-1 T^-1 S^-1 T S^-1 T^-3 S^-1",
        eval_word(&a6_word) == a6,
        eval_word(&a6_word).to_string(),
    )?;

    let group = compute_veech(&catalog::d())?;
    check(
        "A1 in Gamma(D)",
        group.member_word(&a1_word),
        a1.to_string(),
    )?;
    check(
        "A6 in Gamma(D)",
        group.member_word(&a6_word),
        a6.to_string(),
    )?;
    check("T not in Gamma(D)", !group.member(&t), t.to_string())?;
    check(
        "general level 60",
        group.general_level() == 60,
        group.general_level().to_string(),
    )?;

    let p = |m: &MatZ2| crt_split(m, &FACTORS);
    let p_a1 = p(&a1)?;
    check(
        "p60(A1)",
        p_a1 == [mat(4, [1, 3, 0, 1]), id(3), mat(5, [1, 3, 0, 1])],
        triple(&p_a1),
    )?;
    let p_a6 = p(&a6)?;
    check(
        "p60(A6)",
        p_a6 == [
            mat(4, [3, 2, 2, 3]),
            mat(3, [1, 2, 0, 1]),
            mat(5, [2, 2, 2, 0]),
        ],
        triple(&p_a6),
    )?;
    let orders: Vec<u64> = p_a1.iter().map(MatModN::order).collect();
    check(
        "order of p60(A1)",
        orders == [4, 1, 5],
        format!("{orders:?}"),
    )?;
    let p_a1_7 = p(&a1.pow(7))?;
    check("p60(A1^7)", p_a1_7 == [u(4), id(3), u(5)], triple(&p_a1_7))?;
    let p_a6_2 = p(&a6.pow(2))?;
    check(
        "p60(A6^2)",
        p_a6_2 == [id(4), u(3), mat(5, [3, 4, 4, 4])],
        triple(&p_a6_2),
    )?;
    let orders: Vec<u64> = p_a6_2.iter().map(MatModN::order).collect();
    check(
        "order of p60(A6^2)",
        orders == [1, 3, 5],
        format!("{orders:?}"),
    )?;
    let p_a6_20 = p(&a6.pow(20))?;
    check(
        "p60(A6^20)",
        p_a6_20 == [id(4), u(3), id(5)],
        triple(&p_a6_20),
    )?;

    let g = a6.pow(20) * a1.pow(7);
    let p_g = p(&g)?;
    check("p60(A6^20 A1^7)", p_g == [u(4), u(3), u(5)], triple(&p_g))?;
    let combined = crt_combine(&p_g)?;
    check(
        "p60(A6^20 A1^7) = p60(T)",
        combined == reduce_mod(&t, 60),
        combined.to_string(),
    )?;

    let witness = Witness::from_factors(
        60,
        vec![
            WitnessFactor {
                matrix: a6,
                exponent: 20,
            },
            WitnessFactor {
                matrix: a1,
                exponent: 7,
            },
        ],
        t,
    );
    witness.verify(&group)?;
    Ok(ProofTrace { steps, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> MatZ2 {
        MatZ2::from_i64(a, b, c, d).unwrap()
    }

    #[test]
    fn examples() {
        let triv = compute_veech(&catalog::trivial()).unwrap();
        let r = is_congruence(&triv).unwrap();
        assert_eq!(r.verdict, Verdict::Congruence { level: 1 });
        assert_eq!(r.general_level, 1);

        let l23 = compute_veech(&catalog::l23()).unwrap();
        let r = is_congruence(&l23).unwrap();
        assert_eq!(r.verdict, Verdict::NonCongruence);
        assert_eq!(r.general_level, 12);
        assert!(r.index_mod_level < r.index_in_sl2z as u64);

        let d = compute_veech(&catalog::d()).unwrap();
        let r = is_congruence(&d).unwrap();
        assert_eq!(r.verdict, Verdict::NonCongruence);
        assert_eq!(r.general_level, 60);
    }

    #[test]
    fn pair_orbit_agrees_with_index_comparison() {
        for o in [
            catalog::trivial(),
            catalog::l23(),
            catalog::l_shape(2, 2).unwrap(),
        ] {
            let g = compute_veech(&o).unwrap();
            for n in [1, 2, 3, 4, 6] {
                let size = pair_orbit_size(&g, n, 1_000_000).unwrap();
                assert_eq!(
                    size as u64 == sl2_order(n),
                    contains_principal(&g, n, DEFAULT_CLOSURE_CAP).unwrap(),
                    "{o} at {n}"
                );
            }
        }
    }

    #[test]
    fn congruence_origamis() {
        // Two squares side by side: the Veech group is the theta group,
        // which contains Γ(2).
        let o = "2; (1 2); ()".parse().unwrap();
        let g = compute_veech(&o).unwrap();
        assert_eq!(g.index(), 3);
        let r = is_congruence(&g).unwrap();
        assert_eq!(r.verdict, Verdict::Congruence { level: 2 });
        assert_eq!(r.index_mod_level, 3);
        assert_eq!(pair_orbit_size(&g, 2, 1000).unwrap() as u64, sl2_order(2));
        assert!(matches!(find_witness(&g, 2), Err(Error::Precondition(_))));

        // Three squares in a row: Γ₀(3)-type group of index 4.
        let o = "3; (1 2 3); ()".parse().unwrap();
        let g = compute_veech(&o).unwrap();
        let r = is_congruence(&g).unwrap();
        assert!(r.is_congruence());
        assert_eq!(r.index_in_sl2z as u64, r.index_mod_level);
    }

    #[test]
    fn congruence_members_sample() {
        use rand::{Rng, SeedableRng};
        let o = "2; (1 2); ()".parse().unwrap();
        let g = compute_veech(&o).unwrap();
        let Verdict::Congruence { level } = is_congruence(&g).unwrap().verdict else {
            panic!("expected a congruence group");
        };
        // elements of Γ(level) as words in conjugates of T^level
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let conj = [MatZ2::identity(), MatZ2::s(), MatZ2::t(), m(1, 0, 1, 1)];
        for _ in 0..200 {
            let mut x = MatZ2::identity();
            for _ in 0..rng.gen_range(1..6) {
                let c = &conj[rng.gen_range(0..conj.len())];
                let k = rng.gen_range(-3i64..=3) * level as i64;
                x = &x * &(&(c * &MatZ2::t_pow(k)) * &c.inverse());
            }
            assert!(reduce_mod(&x, level).is_identity());
            assert!(g.member(&x), "{x}");
        }
    }

    #[test]
    fn monotone_in_level() {
        let g = compute_veech(&catalog::trivial()).unwrap();
        for (a, b) in [(1, 2), (2, 4)] {
            assert!(contains_principal(&g, a, 1000).unwrap());
            assert!(contains_principal(&g, b, 1000).unwrap());
        }
    }

    #[test]
    fn l23_witness() {
        let g = compute_veech(&catalog::l23()).unwrap();
        let w = find_witness(&g, 12).unwrap().expect("witness");
        w.verify(&g).unwrap();
        assert_eq!(w.modulus, 12);
        assert!(g.member(&w.g));
        assert!(!g.member(&w.h));
        assert!(w.g.congruent_mod(&w.h, 12));
    }

    #[test]
    fn kernel_witness_fallback() {
        let g = compute_veech(&catalog::l23()).unwrap();
        let w = kernel_witness(&g, 12, 1_000_000).expect("witness");
        assert!(reduce_mod(&w.h, 12).is_identity());
        w.verify(&g).unwrap();
    }

    #[test]
    fn d_witness_from_two_generators() {
        let g = compute_veech(&catalog::d()).unwrap();
        let a1 = m(1, 3, 0, 1);
        let a6 = m(7, 2, -18, -5);
        let w = find_witness_among(&g, 60, &[a6, a1], &[MatZ2::t()], 2).expect("witness");
        w.verify(&g).unwrap();
        assert_eq!(w.h, MatZ2::t());
        assert_eq!(w.factors.len(), 2);
        let exps: Vec<u64> = w.factors.iter().map(|f| f.exponent).collect();
        assert_eq!(exps, [20, 7]);
    }

    #[test]
    fn replay() {
        let trace = replay_mod60_proof().unwrap();
        assert!(trace.steps.len() >= 12);
        assert_eq!(trace.witness.h, MatZ2::t());
        assert!(trace.to_string().contains("p60(A6^20)"));
    }
}
