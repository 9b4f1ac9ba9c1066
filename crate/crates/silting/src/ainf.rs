//! A-infinity algebras, modules, morphisms and homotopies over `K = k^r`,
//! with exact checkers for the defining identities.
//!
//! Operations are stored as sparse maps on basis words. Strict unitality is
//! enforced structurally: designated unit letters never appear in stored
//! entries, and evaluation treats them by the closed-form rules
//! (`m2(e (x) x) = x = m2(x (x) e)`, every other interaction vanishes).
//! Checkers evaluate the identities on every admissible basis word up to a
//! requested arity and report the first violating word.
//!
//! Degree windows: a structure may declare a window outside which operation
//! values are unknown (truncated rather than silently zero). Evaluation
//! returns [`Eval::Truncated`] in that case and checkers count such words as
//! skipped instead of passing or failing them.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactla::{cohomology_dims, Complex, Field, Scalar, SparseMatrix};
use crate::graded::{
    koszul_sign_exponent, validate_algebra_op, BasisElement, GradedBimodule, IdempotentRing,
    LinComb, MultiLinearMap,
};

/// Result of evaluating an operation on a word: an exact value, or "unknown
/// because it falls outside the declared bounds".
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Eval {
    Val(LinComb),
    Truncated,
}

impl Eval {
    pub fn zero() -> Eval {
        Eval::Val(LinComb::zero())
    }

    pub fn value(self) -> Option<LinComb> {
        match self {
            Eval::Val(v) => Some(v),
            Eval::Truncated => None,
        }
    }
}

/// A strictly unital A-infinity algebra over `K`.
///
/// `ops[n]` is the n-ary multiplication of degree `2 - n` on non-unit basis
/// words. `arity_bound` is the largest arity for which operations were
/// computed; `ops_complete` asserts that every operation of higher arity is
/// exactly zero (true for dg algebras and certified transfers).
#[derive(Clone, Debug)]
pub struct AInfAlgebra {
    pub field: Field,
    pub underlying: GradedBimodule,
    /// `unit_indices[i]` is the basis index of `e_{i+1}`.
    pub unit_indices: Vec<usize>,
    pub ops: BTreeMap<usize, MultiLinearMap>,
    pub arity_bound: usize,
    pub ops_complete: bool,
    pub window: Option<(i64, i64)>,
    /// Largest arity for which the construction-time identity check ran.
    pub verified_arity: usize,
}

/// Construction-time identity checks stop growing past this many words.
const CONSTRUCTION_WORD_BUDGET: usize = 1_000_000;

impl AInfAlgebra {
    pub fn new(
        field: Field,
        underlying: GradedBimodule,
        unit_indices: Vec<usize>,
        ops: BTreeMap<usize, MultiLinearMap>,
        arity_bound: usize,
        ops_complete: bool,
        window: Option<(i64, i64)>,
    ) -> Result<Self> {
        let mut a = AInfAlgebra {
            field,
            underlying,
            unit_indices,
            ops,
            arity_bound,
            ops_complete,
            window,
            verified_arity: 0,
        };
        a.validate_structure()?;
        // Assert the defining identities as far as the word budget allows.
        let mut n_max = 0usize;
        let dim = a.underlying.dim().max(1);
        let mut words = 1usize;
        for n in 1..=a.arity_bound.min(64) {
            words = words.saturating_mul(dim);
            if words > CONSTRUCTION_WORD_BUDGET {
                break;
            }
            n_max = n;
        }
        let report = check_stasheff(&a, n_max)?;
        if let Some(v) = report.violation {
            return Err(Error::check(format!(
                "associativity identity fails at arity {} on word {:?}: {}",
                v.arity, v.word, v.description
            )));
        }
        a.verified_arity = n_max;
        Ok(a)
    }

    fn validate_structure(&self) -> Result<()> {
        let r = self.underlying.ring.r;
        if self.unit_indices.len() != r {
            return Err(Error::input("one unit per idempotent is required"));
        }
        for (i, idx) in self.unit_indices.iter().enumerate() {
            let b = self
                .underlying
                .basis
                .get(*idx)
                .ok_or_else(|| Error::input("unit index out of range"))?;
            if b.degree != 0 || b.left != i || b.right != i {
                return Err(Error::input(format!(
                    "unit for idempotent {} must sit in degree 0 at ({0}, {0})",
                    i + 1
                )));
            }
        }
        for (n, op) in &self.ops {
            if op.arity != *n {
                return Err(Error::input("operation arity mismatch"));
            }
            if op.degree_shift != 2 - *n as i64 {
                return Err(Error::input(format!(
                    "operation of arity {n} must have degree {}",
                    2 - *n as i64
                )));
            }
            for (word, _) in op.entries() {
                if word.iter().any(|i| self.is_unit(*i)) {
                    return Err(Error::input(
                        "unit letters must not be stored in operation entries",
                    ));
                }
            }
            validate_algebra_op(&self.underlying, op)?;
        }
        Ok(())
    }

    pub fn ring(&self) -> IdempotentRing {
        self.underlying.ring
    }

    pub fn dim(&self) -> usize {
        self.underlying.dim()
    }

    pub fn is_unit(&self, idx: usize) -> bool {
        self.unit_indices.contains(&idx)
    }

    pub fn degree(&self, idx: usize) -> i64 {
        self.underlying.degree(idx)
    }

    /// Minimal means the differential vanishes.
    pub fn is_minimal(&self) -> bool {
        self.ops.get(&1).is_none_or(|m| m.is_zero())
    }

    /// Positive means no negative degrees and degree zero spanned exactly by
    /// the units.
    pub fn is_positive(&self) -> bool {
        self.underlying.basis.iter().enumerate().all(|(i, b)| {
            b.degree > 0 || (b.degree == 0 && self.is_unit(i))
        })
    }

    fn in_window(&self, degree: i64) -> bool {
        match self.window {
            Some((lo, hi)) => degree >= lo && degree <= hi,
            None => true,
        }
    }

    /// Evaluates `m_n` on a basis word.
    pub fn eval(&self, n: usize, word: &[usize]) -> Eval {
        assert_eq!(word.len(), n);
        if !self.underlying.word_admissible(word) {
            return Eval::zero();
        }
        if let Some(pos) = word.iter().position(|i| self.is_unit(*i)) {
            if n == 2 {
                // Admissibility already matched the idempotents.
                let other = word[1 - pos];
                return Eval::Val(LinComb::single(other, self.field.one()));
            }
            return Eval::zero();
        }
        let out_degree = self.underlying.word_degree(word) + 2 - n as i64;
        match self.ops.get(&n) {
            Some(op) => {
                if !self.in_window(out_degree) {
                    return Eval::Truncated;
                }
                Eval::Val(op.get(word).cloned().unwrap_or_default())
            }
            // No stored differential means minimal on the nose, and a
            // completeness certificate means higher operations vanish
            // identically; neither is a window artefact.
            None if n == 1 || self.ops_complete => Eval::zero(),
            None if n <= self.arity_bound => {
                if self.in_window(out_degree) {
                    Eval::zero()
                } else {
                    Eval::Truncated
                }
            }
            None => Eval::Truncated,
        }
    }

    /// Evaluates `m_n` where one position holds a linear combination.
    fn eval_at(&self, n: usize, word: &[usize], pos: usize, value: &LinComb) -> Eval {
        let mut acc = LinComb::zero();
        let mut w = word.to_vec();
        for (idx, c) in value.iter() {
            w[pos] = idx;
            match self.eval(n, &w) {
                Eval::Val(v) => acc.add_scaled(&v, c),
                Eval::Truncated => return Eval::Truncated,
            }
        }
        Eval::Val(acc)
    }
}

/// A basis element of a graded right `K`-module: `x = x . e_vertex`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleBasisElement {
    pub id: String,
    pub degree: i64,
    pub vertex: usize,
}

impl ModuleBasisElement {
    pub fn new(id: impl Into<String>, degree: i64, vertex: usize) -> Self {
        ModuleBasisElement { id: id.into(), degree, vertex }
    }
}

/// A strictly unital A-infinity module over an [`AInfAlgebra`].
///
/// `ops[n]` is `m_n : M (x) A^{(x) n-1} -> M` of degree `2 - n`; entry words
/// are `[module letter, algebra letters...]`.
#[derive(Clone, Debug)]
pub struct AInfModule {
    pub basis: Vec<ModuleBasisElement>,
    pub ops: BTreeMap<usize, MultiLinearMap>,
    pub arity_bound: usize,
    pub ops_complete: bool,
    pub window: Option<(i64, i64)>,
}

impl AInfModule {
    pub fn new(
        a: &AInfAlgebra,
        basis: Vec<ModuleBasisElement>,
        ops: BTreeMap<usize, MultiLinearMap>,
        arity_bound: usize,
        ops_complete: bool,
        window: Option<(i64, i64)>,
    ) -> Result<Self> {
        let m = AInfModule { basis, ops, arity_bound, ops_complete, window };
        m.validate_structure(a)?;
        Ok(m)
    }

    fn validate_structure(&self, a: &AInfAlgebra) -> Result<()> {
        let r = a.ring().r;
        for b in &self.basis {
            if b.vertex >= r {
                return Err(Error::input(format!("module element {} has bad vertex", b.id)));
            }
        }
        for (n, op) in &self.ops {
            if op.arity != *n || op.degree_shift != 2 - *n as i64 {
                return Err(Error::input("module operation arity or degree mismatch"));
            }
            for (word, value) in op.entries() {
                if !self.word_admissible(a, word) {
                    return Err(Error::check(format!(
                        "module operation entry on non-admissible word {word:?}"
                    )));
                }
                if word[1..].iter().any(|i| a.is_unit(*i)) {
                    return Err(Error::input(
                        "unit letters must not be stored in module operation entries",
                    ));
                }
                let deg = self.word_degree(a, word) + 2 - *n as i64;
                let vertex = if word.len() == 1 {
                    self.basis[word[0]].vertex
                } else {
                    a.underlying.basis[*word.last().unwrap()].right
                };
                for (i, _) in value.iter() {
                    let b = &self.basis[i];
                    if b.degree != deg || b.vertex != vertex {
                        return Err(Error::check(format!(
                            "module operation on {word:?} violates grading or idempotents"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Words are `[module letter, algebra letters...]`.
    pub fn word_admissible(&self, a: &AInfAlgebra, word: &[usize]) -> bool {
        if word.is_empty() {
            return false;
        }
        let m = &self.basis[word[0]];
        if word.len() == 1 {
            return true;
        }
        if a.underlying.basis[word[1]].left != m.vertex {
            return false;
        }
        word[1..]
            .windows(2)
            .all(|w| a.underlying.basis[w[0]].right == a.underlying.basis[w[1]].left)
    }

    pub fn word_degree(&self, a: &AInfAlgebra, word: &[usize]) -> i64 {
        self.basis[word[0]].degree
            + word[1..].iter().map(|i| a.underlying.basis[*i].degree).sum::<i64>()
    }

    pub fn is_minimal(&self) -> bool {
        self.ops.get(&1).is_none_or(|m| m.is_zero())
    }

    fn in_window(&self, degree: i64) -> bool {
        match self.window {
            Some((lo, hi)) => degree >= lo && degree <= hi,
            None => true,
        }
    }

    /// Evaluates `m_n^M` on `[module letter, algebra letters...]`.
    pub fn eval(&self, a: &AInfAlgebra, n: usize, word: &[usize]) -> Eval {
        assert_eq!(word.len(), n);
        if !self.word_admissible(a, word) {
            return Eval::zero();
        }
        if word[1..].iter().any(|i| a.is_unit(*i)) {
            if n == 2 {
                return Eval::Val(LinComb::single(word[0], a.field.one()));
            }
            return Eval::zero();
        }
        let out_degree = self.word_degree(a, word) + 2 - n as i64;
        match self.ops.get(&n) {
            Some(op) => {
                if !self.in_window(out_degree) {
                    return Eval::Truncated;
                }
                Eval::Val(op.get(word).cloned().unwrap_or_default())
            }
            None if n == 1 || self.ops_complete => Eval::zero(),
            None if n <= self.arity_bound => {
                if self.in_window(out_degree) {
                    Eval::zero()
                } else {
                    Eval::Truncated
                }
            }
            None => Eval::Truncated,
        }
    }

    fn eval_at(&self, a: &AInfAlgebra, n: usize, word: &[usize], pos: usize, value: &LinComb) -> Eval {
        let mut acc = LinComb::zero();
        let mut w = word.to_vec();
        for (idx, c) in value.iter() {
            w[pos] = idx;
            match self.eval(a, n, &w) {
                Eval::Val(v) => acc.add_scaled(&v, c),
                Eval::Truncated => return Eval::Truncated,
            }
        }
        Eval::Val(acc)
    }

    /// The degree-wise restriction `M e_i` as a complex with differential
    /// `m_1`; this is a subcomplex because `m_1` preserves the vertex.
    pub fn idempotent_part_complex(&self, a: &AInfAlgebra, vertex: usize) -> Result<(Complex, Vec<usize>)> {
        let indices: Vec<usize> = (0..self.basis.len())
            .filter(|i| self.basis[*i].vertex == vertex)
            .collect();
        let lookup: BTreeMap<usize, usize> =
            indices.iter().enumerate().map(|(k, i)| (*i, k)).collect();
        let degrees: Vec<i64> = indices.iter().map(|i| self.basis[*i].degree).collect();
        let (lo, hi) = match (degrees.iter().min(), degrees.iter().max()) {
            (Some(lo), Some(hi)) => (*lo, *hi + 1),
            _ => (0, 0),
        };
        let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
        let mut offset: BTreeMap<usize, usize> = BTreeMap::new();
        for (k, i) in indices.iter().enumerate() {
            let d = self.basis[*i].degree;
            let o = dims.entry(d).or_insert(0);
            offset.insert(k, *o);
            *o += 1;
        }
        let mut diffs: BTreeMap<i64, SparseMatrix> = BTreeMap::new();
        for (k, i) in indices.iter().enumerate() {
            let d = self.basis[*i].degree;
            let img = match self.eval(a, 1, &[*i]) {
                Eval::Val(v) => v,
                Eval::Truncated => {
                    return Err(Error::check(format!(
                        "differential truncated at degree {d}; enlarge the window"
                    )))
                }
            };
            if img.is_zero() {
                continue;
            }
            let rows = *dims.get(&(d + 1)).unwrap_or(&0);
            let cols = *dims.get(&d).unwrap_or(&0);
            let mat = diffs
                .entry(d)
                .or_insert_with(|| SparseMatrix::zero(rows, cols, a.field));
            for (j, c) in img.iter() {
                let kj = *lookup.get(&j).ok_or_else(|| {
                    Error::internal("module differential leaves the idempotent part")
                })?;
                mat.set(offset[&kj], offset[&k], c.clone());
            }
        }
        let complex = Complex::new(a.field, lo, hi, dims, diffs)?;
        Ok((complex, indices))
    }
}

/// A strictly unital morphism of A-infinity algebras `f : A -> B` with
/// components `f_n : A^{(x) n} -> B` of degree `1 - n`. Absent components are
/// zero.
#[derive(Clone, Debug, Default)]
pub struct AInfMorphism {
    pub components: BTreeMap<usize, MultiLinearMap>,
}

impl AInfMorphism {
    pub fn eval(&self, a: &AInfAlgebra, b: &AInfAlgebra, n: usize, word: &[usize]) -> Eval {
        assert_eq!(word.len(), n);
        if !a.underlying.word_admissible(word) {
            return Eval::zero();
        }
        if let Some(pos) = word.iter().position(|i| a.is_unit(*i)) {
            if n == 1 {
                let i = a.unit_indices.iter().position(|u| *u == word[pos]).unwrap();
                return Eval::Val(LinComb::single(b.unit_indices[i], b.field.one()));
            }
            return Eval::zero();
        }
        match self.components.get(&n) {
            Some(f) => Eval::Val(f.get(word).cloned().unwrap_or_default()),
            None => Eval::zero(),
        }
    }
}

/// The strict identity morphism of an algebra.
pub fn identity_morphism(a: &AInfAlgebra) -> AInfMorphism {
    let mut f1 = MultiLinearMap::new(1, 0);
    for i in 0..a.dim() {
        if !a.is_unit(i) {
            f1.set(vec![i], LinComb::single(i, a.field.one()));
        }
    }
    let mut components = BTreeMap::new();
    components.insert(1, f1);
    AInfMorphism { components }
}

/// The augmentation of a positive algebra: the strict projection onto the
/// degree-zero part `K`.
pub fn augmentation(a: &AInfAlgebra) -> Result<(AInfMorphism, AInfAlgebra)> {
    if !a.is_positive() {
        return Err(Error::input("augmentation requires a positive algebra"));
    }
    let k = k_algebra(a.ring(), a.field)?;
    // Non-unit letters all map to zero, so there are no stored components.
    Ok((AInfMorphism::default(), k))
}

/// `K` itself as a strictly unital algebra: only the closed-form unit
/// products.
pub fn k_algebra(ring: IdempotentRing, field: Field) -> Result<AInfAlgebra> {
    let basis = (0..ring.r)
        .map(|i| BasisElement::new(format!("e{}", i + 1), 0, i, i))
        .collect();
    let underlying = GradedBimodule::new(ring, basis)?;
    AInfAlgebra::new(
        field,
        underlying,
        (0..ring.r).collect(),
        BTreeMap::new(),
        4,
        true,
        None,
    )
}

/// A strictly unital morphism of A-infinity modules `f : M -> M'` with
/// components `f_n : M (x) A^{(x) n-1} -> M'` of degree `1 - n`.
#[derive(Clone, Debug, Default)]
pub struct AInfModuleMorphism {
    pub components: BTreeMap<usize, MultiLinearMap>,
}

impl AInfModuleMorphism {
    pub fn zero() -> Self {
        AInfModuleMorphism::default()
    }

    pub fn eval(&self, a: &AInfAlgebra, m: &AInfModule, n: usize, word: &[usize]) -> Eval {
        assert_eq!(word.len(), n);
        if !m.word_admissible(a, word) {
            return Eval::zero();
        }
        if word[1..].iter().any(|i| a.is_unit(*i)) {
            return Eval::zero();
        }
        match self.components.get(&n) {
            Some(f) => Eval::Val(f.get(word).cloned().unwrap_or_default()),
            None => Eval::zero(),
        }
    }
}

/// A strictly unital homotopy with components `h_n : M (x) A^{(x) n-1} -> M'`
/// of degree `-n`.
#[derive(Clone, Debug, Default)]
pub struct Homotopy {
    pub components: BTreeMap<usize, MultiLinearMap>,
}

impl Homotopy {
    pub fn zero() -> Self {
        Homotopy::default()
    }

    pub fn eval(&self, a: &AInfAlgebra, m: &AInfModule, n: usize, word: &[usize]) -> Eval {
        assert_eq!(word.len(), n);
        if !m.word_admissible(a, word) {
            return Eval::zero();
        }
        if word[1..].iter().any(|i| a.is_unit(*i)) {
            return Eval::zero();
        }
        match self.components.get(&n) {
            Some(h) => Eval::Val(h.get(word).cloned().unwrap_or_default()),
            None => Eval::zero(),
        }
    }
}

/// A designated unit component `e_i` regarded as a strict idempotent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrictIdempotent {
    /// Zero-based idempotent index.
    pub index: usize,
}

impl StrictIdempotent {
    /// Validates the strict idempotent conditions. With units handled by the
    /// closed-form rules these are structural, so this checks that the index
    /// designates a unit and that no stored entry mentions it.
    pub fn validate(&self, a: &AInfAlgebra) -> Result<()> {
        if self.index >= a.ring().r {
            return Err(Error::input("idempotent index out of range"));
        }
        let unit = a.unit_indices[self.index];
        for op in a.ops.values() {
            for (word, _) in op.entries() {
                if word.contains(&unit) {
                    return Err(Error::check(
                        "strict idempotent appears in a stored operation entry",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// First violating word of a failed identity check.
#[derive(Clone, Debug)]
pub struct Violation {
    pub arity: usize,
    pub word: Vec<usize>,
    pub description: String,
}

/// Outcome of an identity check. Violations are report content, not errors.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub checked_words: usize,
    pub skipped_truncated: usize,
    pub violation: Option<Violation>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

fn for_each_word(
    admissible_next: impl Fn(&[usize], usize) -> bool,
    letters: usize,
    n: usize,
    mut visit: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<()> {
    // Depth-first enumeration of admissible words of length n.
    let mut word: Vec<usize> = Vec::with_capacity(n);
    let mut cursor: Vec<usize> = vec![0];
    if n == 0 || letters == 0 {
        return Ok(());
    }
    loop {
        let depth = word.len();
        let next = cursor[depth];
        if next >= letters {
            if depth == 0 {
                return Ok(());
            }
            word.pop();
            cursor.pop();
            let d = word.len();
            cursor[d] += 1;
            continue;
        }
        if !admissible_next(&word, next) {
            cursor[depth] += 1;
            continue;
        }
        word.push(next);
        if word.len() == n {
            if !visit(&word)? {
                return Ok(());
            }
            word.pop();
            cursor[depth] += 1;
        } else {
            cursor.push(0);
        }
    }
}

/// Evaluates the left side of the associativity identity at `word`:
/// the signed sum of `m_{i+1+l}(id^i (x) m_j (x) id^l)`.
fn stasheff_defect(a: &AInfAlgebra, word: &[usize]) -> Eval {
    let n = word.len();
    let mut acc = LinComb::zero();
    for j in 1..=n {
        for i in 0..=(n - j) {
            let l = n - i - j;
            let prefix_degree = a.underlying.word_degree(&word[0..i]);
            let sign = (i * j + l) as i64 + (2 - j as i64) * prefix_degree;
            let inner = match a.eval(j, &word[i..i + j]) {
                Eval::Val(v) => v,
                Eval::Truncated => return Eval::Truncated,
            };
            if inner.is_zero() {
                continue;
            }
            let mut outer_word: Vec<usize> = Vec::with_capacity(i + 1 + l);
            outer_word.extend_from_slice(&word[0..i]);
            outer_word.push(0);
            outer_word.extend_from_slice(&word[i + j..]);
            match a.eval_at(i + 1 + l, &outer_word, i, &inner) {
                Eval::Val(v) => {
                    let s = a.field.one().with_sign(sign);
                    acc.add_scaled(&v, &s);
                }
                Eval::Truncated => return Eval::Truncated,
            }
        }
    }
    Eval::Val(acc)
}

/// Checks the associativity identities on every admissible basis word of
/// length up to `n_max`.
pub fn check_stasheff(a: &AInfAlgebra, n_max: usize) -> Result<CheckReport> {
    if n_max > a.arity_bound && !a.ops_complete {
        return Err(Error::input(format!(
            "cannot check arity {n_max}: operations are only known up to {}",
            a.arity_bound
        )));
    }
    let mut report = CheckReport { checked_words: 0, skipped_truncated: 0, violation: None };
    let basis = &a.underlying.basis;
    for n in 1..=n_max {
        if report.violation.is_some() {
            break;
        }
        for_each_word(
            |word, next| {
                word.last().is_none_or(|l| basis[*l].right == basis[next].left)
            },
            a.dim(),
            n,
            |word| {
                match stasheff_defect(a, word) {
                    Eval::Val(v) => {
                        report.checked_words += 1;
                        if !v.is_zero() {
                            report.violation = Some(Violation {
                                arity: n,
                                word: word.to_vec(),
                                description: describe_alg_defect(a, &v),
                            });
                            return Ok(false);
                        }
                    }
                    Eval::Truncated => report.skipped_truncated += 1,
                }
                Ok(true)
            },
        )?;
    }
    Ok(report)
}

fn describe_alg_defect(a: &AInfAlgebra, v: &LinComb) -> String {
    let terms: Vec<String> = v
        .iter()
        .map(|(i, c)| format!("{} {}", c, a.underlying.basis[i].id))
        .collect();
    format!("defect = {}", terms.join(" + "))
}

fn describe_mod_defect(m: &AInfModule, v: &LinComb) -> String {
    let terms: Vec<String> =
        v.iter().map(|(i, c)| format!("{} {}", c, m.basis[i].id)).collect();
    format!("defect = {}", terms.join(" + "))
}

fn module_defect(a: &AInfAlgebra, m: &AInfModule, word: &[usize]) -> Eval {
    let n = word.len();
    let mut acc = LinComb::zero();
    for j in 1..=n {
        for i in 0..=(n - j) {
            let l = n - i - j;
            let prefix_degree = if i == 0 { 0 } else { m.word_degree(a, &word[0..i]) };
            let sign = (i * j + l) as i64 + (2 - j as i64) * prefix_degree;
            // Inner block: module operation when it starts at slot 0,
            // algebra operation otherwise.
            let inner = if i == 0 {
                m.eval(a, j, &word[0..j])
            } else {
                a.eval(j, &word[i..i + j])
            };
            let inner = match inner {
                Eval::Val(v) => v,
                Eval::Truncated => return Eval::Truncated,
            };
            if inner.is_zero() {
                continue;
            }
            let mut outer_word: Vec<usize> = Vec::with_capacity(i + 1 + l);
            outer_word.extend_from_slice(&word[0..i]);
            outer_word.push(0);
            outer_word.extend_from_slice(&word[i + j..]);
            match m.eval_at(a, i + 1 + l, &outer_word, i, &inner) {
                Eval::Val(v) => {
                    let s = a.field.one().with_sign(sign);
                    acc.add_scaled(&v, &s);
                }
                Eval::Truncated => return Eval::Truncated,
            }
        }
    }
    Eval::Val(acc)
}

fn for_each_module_word(
    a: &AInfAlgebra,
    m: &AInfModule,
    n: usize,
    mut visit: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<()> {
    let alg = &a.underlying.basis;
    for first in 0..m.basis.len() {
        let vertex = m.basis[first].vertex;
        let mut stop = false;
        for_each_word(
            |word, next| {
                let prev_right = match word.len() {
                    0 => vertex,
                    k => alg[word[k - 1]].right,
                };
                alg[next].left == prev_right
            },
            a.dim(),
            n - 1,
            |rest| {
                let mut word = Vec::with_capacity(n);
                word.push(first);
                word.extend_from_slice(rest);
                let go = visit(&word)?;
                if !go {
                    stop = true;
                }
                Ok(go)
            },
        )?;
        if n == 1
            && !visit(&[first])? {
                return Ok(());
            }
        if stop {
            return Ok(());
        }
    }
    Ok(())
}

/// Checks the module identities on every admissible word up to `n_max`.
pub fn check_module(a: &AInfAlgebra, m: &AInfModule, n_max: usize) -> Result<CheckReport> {
    let mut report = CheckReport { checked_words: 0, skipped_truncated: 0, violation: None };
    for n in 1..=n_max {
        if report.violation.is_some() {
            break;
        }
        for_each_module_word(a, m, n, |word| {
            match module_defect(a, m, word) {
                Eval::Val(v) => {
                    report.checked_words += 1;
                    if !v.is_zero() {
                        report.violation = Some(Violation {
                            arity: n,
                            word: word.to_vec(),
                            description: describe_mod_defect(m, &v),
                        });
                        return Ok(false);
                    }
                }
                Eval::Truncated => report.skipped_truncated += 1,
            }
            Ok(true)
        })?;
    }
    Ok(report)
}

/// Compositions of `n` into `p` positive parts, lexicographic.
fn compositions(n: usize, p: usize) -> Vec<Vec<usize>> {
    if p == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 1..=(n - p + 1) {
        for rest in compositions(n - first, p - 1) {
            let mut c = vec![first];
            c.extend(rest);
            out.push(c);
        }
    }
    out
}

/// Defect of the algebra-morphism identity at `word` for `f : A -> B`.
fn morphism_defect(a: &AInfAlgebra, b: &AInfAlgebra, f: &AInfMorphism, word: &[usize]) -> Eval {
    let n = word.len();
    let mut acc = LinComb::zero();
    // Left side: signed f_{i+1+l}(id^i (x) m_j (x) id^l).
    for j in 1..=n {
        for i in 0..=(n - j) {
            let l = n - i - j;
            let prefix_degree = a.underlying.word_degree(&word[0..i]);
            let sign = (i * j + l) as i64 + (2 - j as i64) * prefix_degree;
            let inner = match a.eval(j, &word[i..i + j]) {
                Eval::Val(v) => v,
                Eval::Truncated => return Eval::Truncated,
            };
            if inner.is_zero() {
                continue;
            }
            let mut outer_word: Vec<usize> = Vec::with_capacity(i + 1 + l);
            outer_word.extend_from_slice(&word[0..i]);
            outer_word.push(0);
            outer_word.extend_from_slice(&word[i + j..]);
            let mut w = outer_word.clone();
            for (idx, c) in inner.iter() {
                w[i] = idx;
                match f.eval(a, b, i + 1 + l, &w) {
                    Eval::Val(v) => {
                        let s = c.clone().with_sign(sign);
                        acc.add_scaled(&v, &s);
                    }
                    Eval::Truncated => return Eval::Truncated,
                }
            }
        }
    }
    // Right side, subtracted: (-1)^omega m_p(f_{i_1} (x) ... (x) f_{i_p}).
    for p in 1..=n {
        for comp in compositions(n, p) {
            let mut omega: i64 = 0;
            let mut partial_sum = comp[0] as i64;
            for u in 1..p {
                partial_sum += comp[u] as i64;
                omega += (1 - comp[u] as i64) * partial_sum;
            }
            let map_degrees: Vec<i64> = comp.iter().map(|i| 1 - *i as i64).collect();
            let mut block_degrees = Vec::with_capacity(p);
            let mut offset = 0;
            for iu in &comp {
                block_degrees.push(a.underlying.word_degree(&word[offset..offset + iu]));
                offset += iu;
            }
            let cross = koszul_sign_exponent(&map_degrees, &block_degrees);
            // Expand the product of block values.
            let mut partial: Vec<(Vec<usize>, Scalar)> =
                vec![(Vec::new(), a.field.one())];
            let mut offset = 0;
            let mut truncated = false;
            for iu in &comp {
                let block = &word[offset..offset + iu];
                offset += iu;
                let out = match f.eval(a, b, *iu, block) {
                    Eval::Val(v) => v,
                    Eval::Truncated => {
                        truncated = true;
                        break;
                    }
                };
                let mut next = Vec::new();
                for (w, c) in &partial {
                    for (idx, s) in out.iter() {
                        let mut w = w.clone();
                        w.push(idx);
                        next.push((w, c.mul(s)));
                    }
                }
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            if truncated {
                return Eval::Truncated;
            }
            for (bword, c) in partial {
                match b.eval(p, &bword) {
                    Eval::Val(v) => {
                        // Subtract the right side.
                        let s = c.with_sign(omega + cross + 1);
                        acc.add_scaled(&v, &s);
                    }
                    Eval::Truncated => return Eval::Truncated,
                }
            }
        }
    }
    Eval::Val(acc)
}

/// Checks the morphism identities for `f : A -> B` up to `n_max`.
pub fn check_morphism(
    a: &AInfAlgebra,
    b: &AInfAlgebra,
    f: &AInfMorphism,
    n_max: usize,
) -> Result<CheckReport> {
    let mut report = CheckReport { checked_words: 0, skipped_truncated: 0, violation: None };
    let basis = &a.underlying.basis;
    for n in 1..=n_max {
        if report.violation.is_some() {
            break;
        }
        for_each_word(
            |word, next| word.last().is_none_or(|l| basis[*l].right == basis[next].left),
            a.dim(),
            n,
            |word| {
                match morphism_defect(a, b, f, word) {
                    Eval::Val(v) => {
                        report.checked_words += 1;
                        if !v.is_zero() {
                            report.violation = Some(Violation {
                                arity: n,
                                word: word.to_vec(),
                                description: describe_alg_defect(b, &v),
                            });
                            return Ok(false);
                        }
                    }
                    Eval::Truncated => report.skipped_truncated += 1,
                }
                Ok(true)
            },
        )?;
    }
    Ok(report)
}

/// Defect of the module-morphism identity at `word` for `f : M -> M'`.
fn module_morphism_defect(
    a: &AInfAlgebra,
    m: &AInfModule,
    m2: &AInfModule,
    f: &AInfModuleMorphism,
    word: &[usize],
) -> Eval {
    let n = word.len();
    let mut acc = LinComb::zero();
    // Left side.
    for j in 1..=n {
        for i in 0..=(n - j) {
            let l = n - i - j;
            let prefix_degree = if i == 0 { 0 } else { m.word_degree(a, &word[0..i]) };
            let sign = (i * j + l) as i64 + (2 - j as i64) * prefix_degree;
            let inner = if i == 0 {
                m.eval(a, j, &word[0..j])
            } else {
                a.eval(j, &word[i..i + j])
            };
            let inner = match inner {
                Eval::Val(v) => v,
                Eval::Truncated => return Eval::Truncated,
            };
            if inner.is_zero() {
                continue;
            }
            let mut outer_word: Vec<usize> = Vec::with_capacity(i + 1 + l);
            outer_word.extend_from_slice(&word[0..i]);
            outer_word.push(0);
            outer_word.extend_from_slice(&word[i + j..]);
            let mut w = outer_word.clone();
            for (idx, c) in inner.iter() {
                w[i] = idx;
                match f.eval(a, m, i + 1 + l, &w) {
                    Eval::Val(v) => {
                        let s = c.clone().with_sign(sign);
                        acc.add_scaled(&v, &s);
                    }
                    Eval::Truncated => return Eval::Truncated,
                }
            }
        }
    }
    // Right side: m_{1+t}(f_s (x) id^t), subtracted.
    for s in 1..=n {
        let t = n - s;
        let out = match f.eval(a, m, s, &word[0..s]) {
            Eval::Val(v) => v,
            Eval::Truncated => return Eval::Truncated,
        };
        if out.is_zero() {
            continue;
        }
        let mut outer_word: Vec<usize> = Vec::with_capacity(1 + t);
        outer_word.push(0);
        outer_word.extend_from_slice(&word[s..]);
        match m2.eval_at(a, 1 + t, &outer_word, 0, &out) {
            Eval::Val(v) => {
                let sgn = a.field.one().with_sign(1);
                acc.add_scaled(&v, &sgn);
            }
            Eval::Truncated => return Eval::Truncated,
        }
    }
    Eval::Val(acc)
}

/// Checks the module-morphism identities for `f : M -> M'` up to `n_max`.
pub fn check_module_morphism(
    a: &AInfAlgebra,
    m: &AInfModule,
    m_target: &AInfModule,
    f: &AInfModuleMorphism,
    n_max: usize,
) -> Result<CheckReport> {
    let mut report = CheckReport { checked_words: 0, skipped_truncated: 0, violation: None };
    for n in 1..=n_max {
        if report.violation.is_some() {
            break;
        }
        for_each_module_word(a, m, n, |word| {
            match module_morphism_defect(a, m, m_target, f, word) {
                Eval::Val(v) => {
                    report.checked_words += 1;
                    if !v.is_zero() {
                        report.violation = Some(Violation {
                            arity: n,
                            word: word.to_vec(),
                            description: describe_mod_defect(m_target, &v),
                        });
                        return Ok(false);
                    }
                }
                Eval::Truncated => report.skipped_truncated += 1,
            }
            Ok(true)
        })?;
    }
    Ok(report)
}

/// Defect of the homotopy identity at `word`:
/// `f_n - g_n - sum (-1)^t m_{1+t}(h_s (x) id^t) - sum (-1)^{ij+l}
/// h_{i+1+l}(id^i (x) m_j (x) id^l)`.
fn homotopy_defect(
    a: &AInfAlgebra,
    m: &AInfModule,
    m2: &AInfModule,
    h: &Homotopy,
    f: &AInfModuleMorphism,
    g: &AInfModuleMorphism,
    word: &[usize],
) -> Eval {
    let n = word.len();
    let mut acc = LinComb::zero();
    match f.eval(a, m, n, word) {
        Eval::Val(v) => acc.add(&v),
        Eval::Truncated => return Eval::Truncated,
    }
    match g.eval(a, m, n, word) {
        Eval::Val(v) => acc.add_scaled(&v, &a.field.one().neg()),
        Eval::Truncated => return Eval::Truncated,
    }
    for s in 1..=n {
        let t = n - s;
        let out = match h.eval(a, m, s, &word[0..s]) {
            Eval::Val(v) => v,
            Eval::Truncated => return Eval::Truncated,
        };
        if out.is_zero() {
            continue;
        }
        let mut outer_word: Vec<usize> = Vec::with_capacity(1 + t);
        outer_word.push(0);
        outer_word.extend_from_slice(&word[s..]);
        match m2.eval_at(a, 1 + t, &outer_word, 0, &out) {
            Eval::Val(v) => {
                let s = a.field.one().with_sign(t as i64 + 1);
                acc.add_scaled(&v, &s);
            }
            Eval::Truncated => return Eval::Truncated,
        }
    }
    for j in 1..=n {
        for i in 0..=(n - j) {
            let l = n - i - j;
            let prefix_degree = if i == 0 { 0 } else { m.word_degree(a, &word[0..i]) };
            let sign = (i * j + l) as i64 + (2 - j as i64) * prefix_degree + 1;
            let inner = if i == 0 {
                m.eval(a, j, &word[0..j])
            } else {
                a.eval(j, &word[i..i + j])
            };
            let inner = match inner {
                Eval::Val(v) => v,
                Eval::Truncated => return Eval::Truncated,
            };
            if inner.is_zero() {
                continue;
            }
            let mut outer_word: Vec<usize> = Vec::with_capacity(i + 1 + l);
            outer_word.extend_from_slice(&word[0..i]);
            outer_word.push(0);
            outer_word.extend_from_slice(&word[i + j..]);
            let mut w = outer_word.clone();
            for (idx, c) in inner.iter() {
                w[i] = idx;
                match h.eval(a, m, i + 1 + l, &w) {
                    Eval::Val(v) => {
                        let s = c.clone().with_sign(sign);
                        acc.add_scaled(&v, &s);
                    }
                    Eval::Truncated => return Eval::Truncated,
                }
            }
        }
    }
    Eval::Val(acc)
}

/// Checks that `h` is a homotopy from `f` to `g` up to `n_max`.
pub fn check_homotopy(
    a: &AInfAlgebra,
    m: &AInfModule,
    m_target: &AInfModule,
    h: &Homotopy,
    f: &AInfModuleMorphism,
    g: &AInfModuleMorphism,
    n_max: usize,
) -> Result<CheckReport> {
    let mut report = CheckReport { checked_words: 0, skipped_truncated: 0, violation: None };
    for n in 1..=n_max {
        if report.violation.is_some() {
            break;
        }
        for_each_module_word(a, m, n, |word| {
            match homotopy_defect(a, m, m_target, h, f, g, word) {
                Eval::Val(v) => {
                    report.checked_words += 1;
                    if !v.is_zero() {
                        report.violation = Some(Violation {
                            arity: n,
                            word: word.to_vec(),
                            description: describe_mod_defect(m_target, &v),
                        });
                        return Ok(false);
                    }
                }
                Eval::Truncated => report.skipped_truncated += 1,
            }
            Ok(true)
        })?;
    }
    Ok(report)
}

/// The boundary of a homotopy: the module morphism with components
/// `f_n = sum (-1)^t m_{1+t}(h_s (x) id^t) + sum (-1)^{ij+l}
/// h_{i+1+l}(id^i (x) m_j (x) id^l)`, which is homotopic to zero via `h` by
/// construction.
pub fn homotopy_boundary(
    a: &AInfAlgebra,
    m: &AInfModule,
    m_target: &AInfModule,
    h: &Homotopy,
    n_max: usize,
) -> Result<AInfModuleMorphism> {
    let mut components = BTreeMap::new();
    for n in 1..=n_max {
        let mut f_n = MultiLinearMap::new(n, 1 - n as i64);
        for_each_module_word(a, m, n, |word| {
            let defect = homotopy_defect(
                a,
                m,
                m_target,
                h,
                &AInfModuleMorphism::zero(),
                &AInfModuleMorphism::zero(),
                word,
            );
            match defect {
                Eval::Val(v) => {
                    // The defect of (0, 0, h) is minus the boundary.
                    if !v.is_zero() {
                        f_n.set(word.to_vec(), v.scaled(&a.field.one().neg()));
                    }
                }
                Eval::Truncated => {
                    return Err(Error::input("homotopy boundary truncated"))
                }
            }
            Ok(true)
        })?;
        if !f_n.is_zero() {
            components.insert(n, f_n);
        }
    }
    Ok(AInfModuleMorphism { components })
}

/// Componentwise difference of two module morphisms.
pub fn morphism_sub(
    a: &AInfAlgebra,
    m: &AInfModule,
    f: &AInfModuleMorphism,
    g: &AInfModuleMorphism,
    n_max: usize,
) -> Result<AInfModuleMorphism> {
    let mut components = BTreeMap::new();
    for n in 1..=n_max {
        let mut f_n = MultiLinearMap::new(n, 1 - n as i64);
        for_each_module_word(a, m, n, |word| {
            let mut v = match f.eval(a, m, n, word) {
                Eval::Val(v) => v,
                Eval::Truncated => return Err(Error::input("morphism truncated")),
            };
            match g.eval(a, m, n, word) {
                Eval::Val(w) => v.add_scaled(&w, &a.field.one().neg()),
                Eval::Truncated => return Err(Error::input("morphism truncated")),
            }
            if !v.is_zero() {
                f_n.set(word.to_vec(), v);
            }
            Ok(true)
        })?;
        if !f_n.is_zero() {
            components.insert(n, f_n);
        }
    }
    Ok(AInfModuleMorphism { components })
}

/// The module `e_i A`: basis elements of `A` with left idempotent `i`, with
/// the restricted operations. Returns the module and the embedding of its
/// basis into the algebra's.
pub fn module_from_idempotent(a: &AInfAlgebra, index: usize) -> Result<(AInfModule, Vec<usize>)> {
    if index >= a.ring().r {
        return Err(Error::input("idempotent index out of range"));
    }
    let embed: Vec<usize> = (0..a.dim())
        .filter(|i| a.underlying.basis[*i].left == index)
        .collect();
    let lookup: BTreeMap<usize, usize> =
        embed.iter().enumerate().map(|(k, i)| (*i, k)).collect();
    let basis: Vec<ModuleBasisElement> = embed
        .iter()
        .map(|i| {
            let b = &a.underlying.basis[*i];
            ModuleBasisElement::new(b.id.clone(), b.degree, b.right)
        })
        .collect();
    let mut ops: BTreeMap<usize, MultiLinearMap> = BTreeMap::new();
    // Restrict each algebra operation to words starting in e_i A. Words whose
    // algebra slots carry units stay closed-form. The module slot may itself
    // be the unit e_i; those words are stored since in module terms the first
    // slot is an ordinary basis vector.
    for (n, op) in &a.ops {
        let mut restricted = MultiLinearMap::new(*n, 2 - *n as i64);
        for (word, value) in op.entries() {
            let Some(first) = lookup.get(&word[0]) else { continue };
            let mut mword = vec![*first];
            mword.extend_from_slice(&word[1..]);
            let mut out = LinComb::zero();
            for (idx, c) in value.iter() {
                let Some(k) = lookup.get(&idx) else {
                    return Err(Error::internal(
                        "operation leaves the idempotent submodule",
                    ));
                };
                out.add_term(*k, c.clone());
            }
            restricted.set(mword, out);
        }
        if !restricted.is_zero() {
            ops.insert(*n, restricted);
        }
    }
    // Words starting with the unit e_i and otherwise unit-free: in the
    // algebra they are closed-form, in the module they must be stored.
    let unit = a.unit_indices[index];
    let unit_pos = lookup[&unit];
    // Only m_2(e_i (x) x) = x survives; higher operations vanish on units.
    let mut m2 = ops.remove(&2).unwrap_or_else(|| MultiLinearMap::new(2, 0));
    for (x, xe) in &lookup {
        if a.is_unit(*x) {
            continue;
        }
        if a.underlying.basis[*x].left == index {
            m2.set(vec![unit_pos, *x], LinComb::single(*xe, a.field.one()));
        }
    }
    if !m2.is_zero() {
        ops.insert(2, m2);
    }
    let module = AInfModule::new(a, basis, ops, a.arity_bound, a.ops_complete, a.window)?;
    Ok((module, embed))
}

/// The simple modules of a positive algebra: one-dimensional, concentrated in
/// degree zero, with all operations factoring through the augmentation.
pub fn simple_modules(a: &AInfAlgebra) -> Result<Vec<AInfModule>> {
    if !a.is_positive() {
        return Err(Error::input("simple modules require a positive algebra"));
    }
    (0..a.ring().r)
        .map(|i| {
            AInfModule::new(
                a,
                vec![ModuleBasisElement::new(format!("s{}", i + 1), 0, i)],
                BTreeMap::new(),
                a.arity_bound,
                true,
                None,
            )
        })
        .collect()
}

/// Dimension of the cohomology of `M e_i` in degree `p`, which computes the
/// morphism space out of the idempotent summand `e_i A` up to shift.
pub fn hom_dim_via_idempotent(
    a: &AInfAlgebra,
    m: &AInfModule,
    e: StrictIdempotent,
    p: i64,
) -> Result<usize> {
    e.validate(a)?;
    let (complex, _) = m.idempotent_part_complex(a, e.index)?;
    let dims = cohomology_dims(&complex)?;
    Ok(dims.get(&p).copied().unwrap_or(0))
}

/// Morphism `e A -> M` attached to a cocycle `z` in `Z^0(M e)`:
/// `f_n(a_1 (x) ... (x) a_n) = (-1)^{n+1} m_{n+1}(z (x) a_1 (x) ... (x) a_n)`.
pub fn cocycle_to_morphism(
    a: &AInfAlgebra,
    m: &AInfModule,
    e: StrictIdempotent,
    z: &LinComb,
    n_max: usize,
) -> Result<AInfModuleMorphism> {
    for (i, _) in z.iter() {
        let b = &m.basis[i];
        if b.vertex != e.index {
            return Err(Error::input("cocycle does not lie in M e"));
        }
        if b.degree != 0 {
            return Err(Error::input("cocycle must be homogeneous of degree 0"));
        }
    }
    let mut dz = LinComb::zero();
    for (i, c) in z.iter() {
        match m.eval(a, 1, &[i]) {
            Eval::Val(v) => dz.add_scaled(&v, c),
            Eval::Truncated => return Err(Error::input("cocycle check truncated")),
        }
    }
    if !dz.is_zero() {
        return Err(Error::input("the given element is not a cocycle"));
    }
    let (source, embed) = module_from_idempotent(a, e.index)?;
    let mut components = BTreeMap::new();
    for n in 1..=n_max {
        let mut f_n = MultiLinearMap::new(n, 1 - n as i64);
        let mut visit = |word: &[usize]| -> Result<bool> {
            // word = [x in eA, algebra letters]; evaluate m_{n+1}(z (x) ...).
            let mut mword: Vec<usize> = Vec::with_capacity(n + 1);
            mword.push(0);
            mword.push(embed[word[0]]);
            mword.extend_from_slice(&word[1..]);
            let mut out = LinComb::zero();
            for (zi, zc) in z.iter() {
                mword[0] = zi;
                match m.eval(a, n + 1, &mword) {
                    Eval::Val(v) => out.add_scaled(&v, zc),
                    Eval::Truncated => {
                        return Err(Error::input(
                            "morphism component truncated; enlarge the window",
                        ))
                    }
                }
            }
            if !out.is_zero() {
                f_n.set(word.to_vec(), out.scaled(&a.field.one().with_sign(n as i64 + 1)));
            }
            Ok(true)
        };
        for_each_module_word(a, &source, n, &mut visit)?;
        if !f_n.is_zero() {
            components.insert(n, f_n);
        }
    }
    Ok(AInfModuleMorphism { components })
}

/// Homotopy attached to a bounding element `z'` of degree -1:
/// `h_n(a_1 (x) ... (x) a_n) = m_{n+1}(z' (x) a_1 (x) ... (x) a_n)`, a
/// homotopy between the morphism of `m_1(z')` and zero.
pub fn homotopy_from_bounding(
    a: &AInfAlgebra,
    m: &AInfModule,
    e: StrictIdempotent,
    z_prime: &LinComb,
    n_max: usize,
) -> Result<Homotopy> {
    for (i, _) in z_prime.iter() {
        if m.basis[i].degree != -1 || m.basis[i].vertex != e.index {
            return Err(Error::input("bounding element must lie in degree -1 of M e"));
        }
    }
    let (source, embed) = module_from_idempotent(a, e.index)?;
    let mut components = BTreeMap::new();
    for n in 1..=n_max {
        let mut h_n = MultiLinearMap::new(n, -(n as i64));
        let mut visit = |word: &[usize]| -> Result<bool> {
            let mut mword: Vec<usize> = Vec::with_capacity(n + 1);
            mword.push(0);
            mword.push(embed[word[0]]);
            mword.extend_from_slice(&word[1..]);
            let mut out = LinComb::zero();
            for (zi, zc) in z_prime.iter() {
                mword[0] = zi;
                match m.eval(a, n + 1, &mword) {
                    Eval::Val(v) => out.add_scaled(&v, zc),
                    Eval::Truncated => {
                        return Err(Error::input(
                            "homotopy component truncated; enlarge the window",
                        ))
                    }
                }
            }
            if !out.is_zero() {
                h_n.set(word.to_vec(), out);
            }
            Ok(true)
        };
        for_each_module_word(a, &source, n, &mut visit)?;
        if !h_n.is_zero() {
            components.insert(n, h_n);
        }
    }
    Ok(Homotopy { components })
}

/// Truncation of a minimal positive algebra at degree 2: basis elements of
/// degree at least 3 are removed together with every operation entry landing
/// there.
pub fn truncate02(a: &AInfAlgebra) -> Result<AInfAlgebra> {
    if !a.is_minimal() || !a.is_positive() {
        return Err(Error::input("truncation requires a minimal positive algebra"));
    }
    let keep: Vec<usize> = (0..a.dim()).filter(|i| a.degree(*i) <= 2).collect();
    let lookup: BTreeMap<usize, usize> =
        keep.iter().enumerate().map(|(k, i)| (*i, k)).collect();
    let basis: Vec<BasisElement> =
        keep.iter().map(|i| a.underlying.basis[*i].clone()).collect();
    let underlying = GradedBimodule::new(a.ring(), basis)?;
    let unit_indices: Vec<usize> =
        a.unit_indices.iter().map(|u| lookup[u]).collect();
    let mut ops = BTreeMap::new();
    for (n, op) in &a.ops {
        let mut t = MultiLinearMap::new(*n, 2 - *n as i64);
        'entry: for (word, value) in op.entries() {
            let mut w = Vec::with_capacity(word.len());
            for idx in word {
                match lookup.get(idx) {
                    Some(k) => w.push(*k),
                    None => continue 'entry,
                }
            }
            let mut out = LinComb::zero();
            for (idx, c) in value.iter() {
                if let Some(k) = lookup.get(&idx) {
                    out.add_term(*k, c.clone());
                }
            }
            if !out.is_zero() {
                t.set(w, out);
            }
        }
        if !t.is_zero() {
            ops.insert(*n, t);
        }
    }
    AInfAlgebra::new(
        a.field,
        underlying,
        unit_indices,
        ops,
        a.arity_bound,
        a.ops_complete,
        Some((0, 2)),
    )
}
