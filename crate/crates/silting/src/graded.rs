//! Graded bimodules over `K = k x ... x k` and the Koszul sign rule.
//!
//! Everything downstream of this module manipulates finite-dimensional graded
//! `K`-bimodules whose basis elements carry a degree and a pair of idempotent
//! indices. An element `x` with `(left = i, right = j)` satisfies
//! `x = e_i x e_j` and is read as a morphism from the `j`-th object to a
//! shift of the `i`-th object; products `m2(x (x) y)` therefore require
//! `right(x) = left(y)` and denote "apply `y` first, then `x`".
//!
//! Sign conventions live here and in `docs/conventions.md`:
//!
//! * Koszul rule: `(f (x) g)(u (x) v) = (-1)^{|g| |u|} (f(u) (x) g(v))`, and
//!   its n-fold generalisation with one crossing sign per (map, earlier
//!   letter) pair.
//! * Suspension bookkeeping for the bar-type constructions: a letter of
//!   degree `d` contributes `d - 1` once suspended; [`bar_sign`] accumulates
//!   the crossings of the n-fold (de)suspension over a word.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactla::Scalar;

/// The base ring `K = k^r` with standard idempotents `e_1, ..., e_r`
/// (indices are stored zero-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdempotentRing {
    pub r: usize,
}

impl IdempotentRing {
    pub fn new(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::input("the idempotent ring needs at least one factor"));
        }
        Ok(IdempotentRing { r })
    }
}

/// A homogeneous basis element of a graded `K`-bimodule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub id: String,
    pub degree: i64,
    /// Target idempotent: `x = e_left x e_right`.
    pub left: usize,
    pub right: usize,
}

impl BasisElement {
    pub fn new(id: impl Into<String>, degree: i64, left: usize, right: usize) -> Self {
        BasisElement { id: id.into(), degree, left, right }
    }
}

/// A finite-dimensional graded `K`-bimodule with an ordered basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBimodule {
    pub ring: IdempotentRing,
    pub basis: Vec<BasisElement>,
}

impl GradedBimodule {
    pub fn new(ring: IdempotentRing, basis: Vec<BasisElement>) -> Result<Self> {
        for b in &basis {
            if b.left >= ring.r || b.right >= ring.r {
                return Err(Error::input(format!(
                    "basis element {} has idempotents outside 1..{}",
                    b.id, ring.r
                )));
            }
        }
        Ok(GradedBimodule { ring, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    /// Dimension of the `(degree, left, right)` component.
    pub fn block_dim(&self, degree: i64, left: usize, right: usize) -> usize {
        self.basis
            .iter()
            .filter(|b| b.degree == degree && b.left == left && b.right == right)
            .count()
    }

    /// Is the word `x_1 (x) ... (x) x_n` nonzero in the tensor power over K?
    pub fn word_admissible(&self, word: &[usize]) -> bool {
        word.windows(2).all(|w| self.basis[w[0]].right == self.basis[w[1]].left)
    }

    pub fn word_degree(&self, word: &[usize]) -> i64 {
        word.iter().map(|i| self.basis[*i].degree).sum()
    }

    /// Degrees appearing in the basis, sorted.
    pub fn degrees(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = self.basis.iter().map(|b| b.degree).collect();
        ds.sort();
        ds.dedup();
        ds
    }
}

/// Tensor product over `K`: basis indexed by admissible pairs.
pub struct TensorProduct {
    pub module: GradedBimodule,
    /// For each basis element of the product, the contributing pair.
    pub pairs: Vec<(usize, usize)>,
}

/// `v (x)_K w`: admissible pairs `(x, y)` with `right(x) = left(y)`, degree
/// additive, outer idempotents inherited from the ends.
pub fn tensor_over_k(v: &GradedBimodule, w: &GradedBimodule) -> Result<TensorProduct> {
    if v.ring != w.ring {
        return Err(Error::input("tensor product over mismatched idempotent rings"));
    }
    let mut basis = Vec::new();
    let mut pairs = Vec::new();
    for (i, x) in v.basis.iter().enumerate() {
        for (j, y) in w.basis.iter().enumerate() {
            if x.right != y.left {
                continue;
            }
            basis.push(BasisElement::new(
                format!("{}|{}", x.id, y.id),
                x.degree + y.degree,
                x.left,
                y.right,
            ));
            pairs.push((i, j));
        }
    }
    Ok(TensorProduct { module: GradedBimodule::new(v.ring, basis)?, pairs })
}

/// Shift `v[s]`: degrees decrease by `s`; the identity on ids is the
/// bookkeeping isomorphism.
pub fn shift(v: &GradedBimodule, s: i64) -> GradedBimodule {
    GradedBimodule {
        ring: v.ring,
        basis: v
            .basis
            .iter()
            .map(|b| BasisElement::new(b.id.clone(), b.degree - s, b.left, b.right))
            .collect(),
    }
}

/// `k`-linear dual: degrees negate, idempotents swap, ids gain a `D` prefix.
pub fn dual(v: &GradedBimodule) -> GradedBimodule {
    GradedBimodule {
        ring: v.ring,
        basis: v
            .basis
            .iter()
            .map(|b| BasisElement::new(format!("D{}", b.id), -b.degree, b.right, b.left))
            .collect(),
    }
}

/// A sparse linear combination of basis indices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinComb {
    terms: BTreeMap<usize, Scalar>,
}

impl LinComb {
    pub fn zero() -> Self {
        LinComb::default()
    }

    pub fn single(i: usize, c: Scalar) -> Self {
        let mut l = LinComb::zero();
        l.add_term(i, c);
        l
    }

    pub fn add_term(&mut self, i: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let cur = match self.terms.get(&i) {
            Some(t) => t.add(&c),
            None => c,
        };
        if cur.is_zero() {
            self.terms.remove(&i);
        } else {
            self.terms.insert(i, cur);
        }
    }

    pub fn add(&mut self, other: &LinComb) {
        for (i, c) in other.iter() {
            self.add_term(i, c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &LinComb, c: &Scalar) {
        for (i, s) in other.iter() {
            self.add_term(i, s.mul(c));
        }
    }

    pub fn scaled(&self, c: &Scalar) -> LinComb {
        let mut out = LinComb::zero();
        for (i, s) in self.iter() {
            out.add_term(i, s.mul(c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.terms.iter().map(|(i, c)| (*i, c))
    }

    pub fn coeff(&self, i: usize) -> Option<&Scalar> {
        self.terms.get(&i)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.keys().copied()
    }
}

/// A sparse multilinear map on basis words.
///
/// Entries are keyed by admissible source words; what the index spaces mean
/// (a single algebra, or a module slot followed by algebra slots) is decided
/// by the owner. Words that carry designated unit letters are never stored;
/// evaluators handle those by the strict unitality rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiLinearMap {
    pub arity: usize,
    pub degree_shift: i64,
    entries: BTreeMap<Vec<usize>, LinComb>,
}

impl MultiLinearMap {
    pub fn new(arity: usize, degree_shift: i64) -> Self {
        assert!(arity >= 1);
        MultiLinearMap { arity, degree_shift, entries: BTreeMap::new() }
    }

    pub fn set(&mut self, word: Vec<usize>, value: LinComb) {
        assert_eq!(word.len(), self.arity, "word length must match arity");
        if value.is_zero() {
            self.entries.remove(&word);
        } else {
            self.entries.insert(word, value);
        }
    }

    pub fn add_entry(&mut self, word: &[usize], i: usize, c: Scalar) {
        assert_eq!(word.len(), self.arity);
        let mut cur = self.entries.remove(word).unwrap_or_default();
        cur.add_term(i, c);
        self.set(word.to_vec(), cur);
    }

    pub fn get(&self, word: &[usize]) -> Option<&LinComb> {
        self.entries.get(word)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &LinComb)> {
        self.entries.iter()
    }
}

/// Checks the structural invariants of an algebra operation: admissible
/// source words, additive degrees, and outer idempotents matching the ends of
/// the word.
pub fn validate_algebra_op(module: &GradedBimodule, op: &MultiLinearMap) -> Result<()> {
    for (word, value) in op.entries() {
        if !module.word_admissible(word) {
            return Err(Error::check(format!(
                "operation entry on non-admissible word {word:?}"
            )));
        }
        let deg = module.word_degree(word) + op.degree_shift;
        let left = module.basis[word[0]].left;
        let right = module.basis[*word.last().unwrap()].right;
        for (i, _) in value.iter() {
            let b = &module.basis[i];
            if b.degree != deg {
                return Err(Error::check(format!(
                    "operation on {word:?} lands in degree {} instead of {deg}",
                    b.degree
                )));
            }
            if b.left != left || b.right != right {
                return Err(Error::check(format!(
                    "operation on {word:?} violates idempotent bookkeeping"
                )));
            }
        }
    }
    Ok(())
}

/// One factor of a tensor product of homogeneous maps.
pub enum Slot<'a> {
    /// Identity on a single letter.
    Id,
    /// A stored multilinear map, consuming `arity` letters.
    Map(&'a MultiLinearMap),
}

impl Slot<'_> {
    fn arity(&self) -> usize {
        match self {
            Slot::Id => 1,
            Slot::Map(m) => m.arity,
        }
    }

    fn degree(&self) -> i64 {
        match self {
            Slot::Id => 0,
            Slot::Map(m) => m.degree_shift,
        }
    }
}

/// Exponent of the Koszul sign for applying maps of degrees `map_degrees`
/// blockwise to blocks of total degrees `block_degrees`: one crossing per
/// (later map, earlier block) pair.
pub fn koszul_sign_exponent(map_degrees: &[i64], block_degrees: &[i64]) -> i64 {
    let mut e = 0;
    for v in 1..map_degrees.len() {
        for u in 0..v {
            e += map_degrees[v] * block_degrees[u];
        }
    }
    e
}

/// Applies `slots[0] (x) ... (x) slots[k]` to `word` with the Koszul sign
/// rule. The result is a list of (word, coefficient) pairs; positions covered
/// by a map slot are replaced by that map's output indices, one summand per
/// output basis element.
pub fn apply_signed(
    module: &GradedBimodule,
    slots: &[Slot],
    word: &[usize],
) -> Result<Vec<(Vec<usize>, Scalar)>> {
    let total: usize = slots.iter().map(|s| s.arity()).sum();
    if total != word.len() {
        return Err(Error::input(format!(
            "slot arities sum to {total} but the word has length {}",
            word.len()
        )));
    }
    let mut offset = 0usize;
    let mut block_degrees = Vec::with_capacity(slots.len());
    let mut map_degrees = Vec::with_capacity(slots.len());
    let mut blocks = Vec::with_capacity(slots.len());
    for s in slots {
        let block = &word[offset..offset + s.arity()];
        block_degrees.push(module.word_degree(block));
        map_degrees.push(s.degree());
        blocks.push(block);
        offset += s.arity();
    }
    let sign = koszul_sign_exponent(&map_degrees, &block_degrees);

    // Expand the product of per-slot outputs. `None` coefficient means "no
    // map slot consumed yet", i.e. an implicit 1.
    let mut partial: Vec<(Vec<usize>, Option<Scalar>)> = vec![(Vec::new(), None)];
    for (slot, block) in slots.iter().zip(&blocks) {
        let mut next = Vec::new();
        match slot {
            Slot::Id => {
                for (w, c) in &partial {
                    let mut w = w.clone();
                    w.push(block[0]);
                    next.push((w, c.clone()));
                }
            }
            Slot::Map(m) => {
                let Some(out) = m.get(block) else {
                    partial = Vec::new();
                    break;
                };
                for (w, c) in &partial {
                    for (i, s) in out.iter() {
                        let mut w = w.clone();
                        w.push(i);
                        let coeff = match c {
                            Some(c) => c.mul(s),
                            None => s.clone(),
                        };
                        next.push((w, Some(coeff)));
                    }
                }
            }
        }
        partial = next;
    }
    let mut results: Vec<(Vec<usize>, Scalar)> = Vec::new();
    for (w, c) in partial {
        if let Some(c) = c {
            results.push((w, c.with_sign(sign)));
        }
    }
    Ok(results)
}

/// Suspension sign exponent for a word: crossing the n-fold (de)suspension
/// over letters of the given degrees contributes `(n - i) * (d_i - 1)` for
/// the `i`-th letter (1-based).
pub fn bar_sign(letter_degrees: &[i64]) -> i64 {
    let n = letter_degrees.len() as i64;
    letter_degrees
        .iter()
        .enumerate()
        .map(|(i, d)| (n - 1 - i as i64) * (d - 1))
        .sum()
}
