//! Todd–Coxeter coset enumeration in SL₂(ℤ) = ⟨S, T | S⁴, S² = (ST)³⟩.
//!
//! Used to find the index of a subgroup given only by generating words,
//! independently of any origami.

use crate::error::{Error, Result};
use crate::sl2::{Gen, STWord};

const NONE: usize = usize::MAX;

// Columns: S, S⁻¹, T, T⁻¹.
const S: usize = 0;
const S_INV: usize = 1;
const T: usize = 2;
const T_INV: usize = 3;

fn inv(col: usize) -> usize {
    col ^ 1
}

fn columns(w: &STWord) -> Vec<usize> {
    w.letters()
        .map(|(g, sign)| match (g, sign > 0) {
            (Gen::S, true) => S,
            (Gen::S, false) => S_INV,
            (Gen::T, true) => T,
            (Gen::T, false) => T_INV,
        })
        .collect()
}

fn relators() -> Vec<Vec<usize>> {
    vec![
        vec![S, S, S, S],
        // S² (ST)⁻³
        vec![S, S, T_INV, S_INV, T_INV, S_INV, T_INV, S_INV],
    ]
}

struct Table {
    rows: Vec<[usize; 4]>,
    parent: Vec<usize>,
    cap: usize,
}

impl Table {
    fn new(cap: usize) -> Self {
        Self {
            rows: vec![[NONE; 4]],
            parent: vec![0],
            cap,
        }
    }

    fn alive(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn rep(&mut self, mut c: usize) -> usize {
        let mut root = c;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[c] != root {
            let next = self.parent[c];
            self.parent[c] = root;
            c = next;
        }
        root
    }

    fn define(&mut self, c: usize, x: usize) -> Result<()> {
        if self.rows.len() >= self.cap {
            return Err(Error::CosetCap(self.cap));
        }
        let n = self.rows.len();
        self.rows.push([NONE; 4]);
        self.parent.push(n);
        self.rows[c][x] = n;
        self.rows[n][inv(x)] = c;
        Ok(())
    }

    fn merge(&mut self, k: usize, l: usize, queue: &mut Vec<usize>) {
        let (k, l) = (self.rep(k), self.rep(l));
        if k == l {
            return;
        }
        let (m, n) = if k < l { (k, l) } else { (l, k) };
        self.parent[n] = m;
        queue.push(n);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..4 {
                let f = self.rows[e][x];
                if f == NONE {
                    continue;
                }
                if self.rows[f][inv(x)] == e {
                    self.rows[f][inv(x)] = NONE;
                }
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                if self.rows[e1][x] != NONE {
                    let g = self.rows[e1][x];
                    self.merge(f1, g, &mut queue);
                } else if self.rows[f1][inv(x)] != NONE {
                    let g = self.rows[f1][inv(x)];
                    self.merge(e1, g, &mut queue);
                } else {
                    self.rows[e1][x] = f1;
                    self.rows[f1][inv(x)] = e1;
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, word: &[usize]) -> Result<()> {
        if word.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = word.len() as isize - 1;
        loop {
            while (i as isize) <= j && self.rows[f][word[i]] != NONE {
                f = self.rows[f][word[i]];
                i += 1;
            }
            if (i as isize) > j {
                if f != c {
                    self.coincidence(f, c);
                }
                return Ok(());
            }
            while j >= i as isize && self.rows[b][inv(word[j as usize])] != NONE {
                b = self.rows[b][inv(word[j as usize])];
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            } else if j == i as isize {
                self.rows[f][word[i]] = b;
                self.rows[b][inv(word[i])] = f;
                return Ok(());
            } else {
                self.define(f, word[i])?;
            }
        }
    }
}

/// Index of the subgroup of SL₂(ℤ) generated by `gens`.
///
/// Fails with [`Error::CosetCap`] when more than `cap` cosets are defined,
/// which is what happens for subgroups of infinite index.
pub fn enumerate_index(gens: &[STWord], cap: usize) -> Result<usize> {
    let rels = relators();
    let gens: Vec<Vec<usize>> = gens.iter().map(columns).collect();
    let mut table = Table::new(cap);
    for g in &gens {
        table.scan_and_fill(0, g)?;
    }
    let mut c = 0;
    while c < table.rows.len() {
        if table.alive(c) {
            for r in &rels {
                table.scan_and_fill(c, r)?;
                if !table.alive(c) {
                    break;
                }
            }
            if table.alive(c) {
                for x in 0..4 {
                    if table.rows[c][x] == NONE {
                        table.define(c, x)?;
                    }
                }
            }
        }
        c += 1;
    }
    Ok((0..table.rows.len()).filter(|&c| table.alive(c)).count())
}
