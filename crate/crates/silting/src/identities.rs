//! The seeded randomized identity suite behind the `identities` subcommand.
//!
//! Each trial builds honest structures — dg endomorphism algebras of random
//! two-term projective complexes, random quotient modules, random cocycles
//! and homotopies — and runs every checker against them: the associativity
//! identities on transferred algebras, the module identities on transferred
//! modules, the morphism and homotopy identities on the cocycle
//! constructions, and the squared differential of the dual bar construction
//! on randomly rescaled Ext-algebras. A deliberately corrupted product is
//! checked to fail, so a silent all-pass checker would be caught.
//!
//! Randomness comes from a hand-rolled splitmix generator so that equal
//! seeds give byte-identical reports on every platform.

use std::collections::BTreeMap;

use crate::ainf::{
    check_homotopy, check_module, check_module_morphism, check_morphism, check_stasheff,
    cocycle_to_morphism, homotopy_boundary, homotopy_from_bounding, module_from_idempotent,
    morphism_sub, AInfAlgebra, AInfModuleMorphism, Eval, Homotopy, StrictIdempotent,
};
use crate::error::{Error, Result};
use crate::exactla::{Field, Scalar};
use crate::graded::{LinComb, MultiLinearMap};
use crate::koszul::dual_bar;
use crate::quivalg::{dg_end_algebra, path_basis, ComplexOfReps, PathAlgebra, PathMatrix, ProjComplex, Representation};
use crate::transfer::{
    algebra_contraction, ext_algebra_over, transfer_algebra, transfer_module, TransferBounds,
};
use crate::fixtures;

/// Deterministic splitmix64.
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n.max(1) as u64) as usize
    }

    pub fn scalar(&mut self, field: Field) -> Scalar {
        // Small nonzero-biased values.
        let v = (self.next_u64() % 7) as i64 - 3;
        field.from_i64(v)
    }
}

/// Outcome of the identity suite.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub trials: usize,
    pub seed: u64,
    /// Number of successful checks per identity family.
    pub checked: BTreeMap<String, usize>,
    /// Human-readable failures; empty on success.
    pub failures: Vec<String>,
    /// The seeded corruption control failed as it must.
    pub corruption_detected: bool,
    pub corruption_witness: String,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.corruption_detected
    }
}

/// A random two-term complex of projectives; any single differential
/// squares to zero, so these are honest complexes.
pub fn random_proj_complex(alg: &PathAlgebra, rng: &mut Rng) -> ProjComplex {
    let r = alg.vertices();
    // Mostly single summands: the identity checks are quartic in the size
    // of the transferred basis.
    let bottom_count = 1 + usize::from(rng.below(4) == 0);
    let top_count = 1 + usize::from(rng.below(4) == 0);
    let cols: Vec<usize> = (0..bottom_count).map(|_| rng.below(r)).collect();
    let rows: Vec<usize> = (0..top_count).map(|_| rng.below(r)).collect();
    let base = -(rng.below(2) as i64);
    let mut pm = PathMatrix::zero(rows.clone(), cols.clone());
    for (ri, rv) in rows.iter().enumerate() {
        for (ci, cv) in cols.iter().enumerate() {
            let block = alg.block(*rv, *cv);
            if block.is_empty() {
                continue;
            }
            let mut value = LinComb::zero();
            for b in block {
                if rng.below(2) == 0 {
                    value.add_term(b, rng.scalar(alg.field()));
                }
            }
            pm.set(ri, ci, value);
        }
    }
    let mut terms = BTreeMap::new();
    terms.insert(base, cols);
    terms.insert(base + 1, rows);
    let mut diffs = BTreeMap::new();
    if !pm.is_zero() {
        diffs.insert(base, pm);
    }
    ProjComplex { terms, diffs, valid_above: i64::MIN / 2 }
}

/// A random cocycle in degree `degree` of the `vertex` part of a module,
/// over the kernel of the differential; `None` when the kernel is trivial.
fn random_cocycle(
    e: &AInfAlgebra,
    m: &crate::ainf::AInfModule,
    vertex: usize,
    degree: i64,
    rng: &mut Rng,
) -> Option<LinComb> {
    let indices: Vec<usize> = (0..m.basis.len())
        .filter(|i| m.basis[*i].vertex == vertex && m.basis[*i].degree == degree)
        .collect();
    if indices.is_empty() {
        return None;
    }
    // Kernel of m_1 restricted to these coordinates.
    let mut cocycles = Vec::new();
    'outer: for i in &indices {
        let img = match m.eval(e, 1, &[*i]) {
            Eval::Val(v) => v,
            Eval::Truncated => continue 'outer,
        };
        if img.is_zero() {
            cocycles.push(*i);
        }
    }
    // Random combination of single-coordinate cocycles; richer kernels are
    // exercised through the transferred modules elsewhere.
    let mut z = LinComb::zero();
    for i in cocycles {
        if rng.below(2) == 0 {
            z.add_term(i, rng.scalar(e.field));
        }
    }
    if z.is_zero() {
        None
    } else {
        Some(z)
    }
}

fn random_strict_homotopy(
    e: &AInfAlgebra,
    m: &crate::ainf::AInfModule,
    n_max: usize,
    rng: &mut Rng,
) -> Homotopy {
    let mut components = BTreeMap::new();
    for n in 1..=n_max {
        let mut h_n = MultiLinearMap::new(n, -(n as i64));
        // A few random entries on random admissible words.
        for _ in 0..3 {
            let first = rng.below(m.basis.len());
            let mut word = vec![first];
            let mut right = m.basis[first].vertex;
            let mut ok = true;
            for _ in 1..n {
                let letters: Vec<usize> = (0..e.dim())
                    .filter(|i| !e.is_unit(*i) && e.underlying.basis[*i].left == right)
                    .collect();
                if letters.is_empty() {
                    ok = false;
                    break;
                }
                let pick = letters[rng.below(letters.len())];
                right = e.underlying.basis[pick].right;
                word.push(pick);
            }
            if !ok {
                continue;
            }
            let degree = m.word_degree(e, &word) - n as i64;
            let targets: Vec<usize> = (0..m.basis.len())
                .filter(|i| m.basis[*i].vertex == right && m.basis[*i].degree == degree)
                .collect();
            if targets.is_empty() {
                continue;
            }
            let target = targets[rng.below(targets.len())];
            let mut value = h_n.get(&word).cloned().unwrap_or_default();
            value.add_term(target, rng.scalar(e.field));
            h_n.set(word, value);
        }
        if !h_n.is_zero() {
            components.insert(n, h_n);
        }
    }
    Homotopy { components }
}

/// The Step-3 homotopy of a morphism `f : eA -> M` with `f_1(e) = 0`:
/// `h_n(a_1 (x) ... (x) a_n) = (-1)^{n+1} f_{n+1}(e (x) a_1 (x) ... (x) a_n)`.
fn step3_homotopy(
    e: &AInfAlgebra,
    source: &crate::ainf::AInfModule,
    embed: &[usize],
    f: &AInfModuleMorphism,
    idempotent: usize,
    n_max: usize,
) -> Result<Homotopy> {
    let unit = e.unit_indices[idempotent];
    let unit_pos = embed
        .iter()
        .position(|i| *i == unit)
        .ok_or_else(|| Error::internal("unit missing from idempotent module"))?;
    let mut components = BTreeMap::new();
    for n in 1..=n_max {
        let Some(f_next) = f.components.get(&(n + 1)) else { continue };
        let mut h_n = MultiLinearMap::new(n, -(n as i64));
        for (word, _) in f_next.entries() {
            if word[0] != unit_pos {
                continue;
            }
            // word = [e, a_1, ..., a_n] with a_1 an algebra letter; the
            // homotopy's word is [a_1 as module letter, a_2, ...].
            let first_alg = word[1];
            let Some(first_mod) = embed.iter().position(|i| *i == first_alg) else {
                continue;
            };
            let mut hword = vec![first_mod];
            hword.extend_from_slice(&word[2..]);
            let value = f_next.get(word).cloned().unwrap_or_default();
            let sign = e.field.one().with_sign(n as i64 + 1);
            let signed = value.scaled(&sign);
            if !signed.is_zero() {
                h_n.set(hword, signed);
            }
        }
        let _ = source;
        if !h_n.is_zero() {
            components.insert(n, h_n);
        }
    }
    Ok(Homotopy { components })
}

/// Runs the full identity suite: `trials` seeded random instances, identity
/// checks up to arity `n_max`, dual-bar verification to `word_bound`.
pub fn run_identity_suite(
    field: Field,
    trials: usize,
    n_max: usize,
    word_bound: usize,
    seed: u64,
) -> Result<IdentityReport> {
    let mut rng = Rng::new(seed);
    let mut checked: BTreeMap<String, usize> = BTreeMap::new();
    let mut failures: Vec<String> = Vec::new();
    let mut tick = |key: &str| {
        *checked.entry(key.to_string()).or_insert(0) += 1;
    };
    let fixture_list = fixtures::all(field);
    let algebras: Vec<PathAlgebra> = fixture_list
        .iter()
        .map(|(_, pres)| path_basis(pres))
        .collect::<Result<_>>()?;
    // Ext-algebras of the standard simples, one per fixture, reused by the
    // rescaling trials.
    let bounds = TransferBounds { max_arity: n_max.max(2), window: (-3, 4) };
    let mut ext_cache = Vec::new();
    for alg in &algebras {
        let collection: Vec<ComplexOfReps> = (0..alg.vertices())
            .map(|v| ComplexOfReps::stalk(Representation::simple(alg, v), 0))
            .collect();
        ext_cache.push(ext_algebra_over(alg, &collection, bounds, 0)?.algebra);
    }

    for trial in 0..trials {
        let pick = rng.below(algebras.len());
        let alg = &algebras[pick];
        let name = fixture_list[pick].0;
        let mut fail = |what: String| {
            failures.push(format!("trial {trial} ({name}): {what}"));
        };

        // Transferred algebra of the dg endomorphism algebra of random
        // two-term projective complexes. A draw can be contractible (the
        // cone of an isomorphism), which the pipeline rejects as a vanishing
        // identity class; resample deterministically in that case.
        let window = (-2i64, 2i64);
        let (e, contraction) = {
            // The identity checks are quartic in the size of the transferred
            // basis, so oversized draws are resampled a few times and the
            // smallest one wins; contractible draws are rejected outright.
            let mut best: Option<(AInfAlgebra, _)> = None;
            for _ in 0..20 {
                let c1 = random_proj_complex(alg, &mut rng);
                let c2 = random_proj_complex(alg, &mut rng);
                let (e, _) = dg_end_algebra(alg, &[c1, c2], window)?;
                match algebra_contraction(&e, |_| true) {
                    Ok(c) => {
                        let small = c.h_basis.len() <= 12;
                        if best
                            .as_ref()
                            .is_none_or(|(_, b): &(_, crate::transfer::AlgebraContraction)| {
                                c.h_basis.len() < b.h_basis.len()
                            })
                        {
                            best = Some((e, c));
                        }
                        if small {
                            break;
                        }
                    }
                    Err(Error::CheckFailed(_)) => continue,
                    Err(err) => return Err(err),
                }
            }
            match best {
                Some(x) => x,
                None => {
                    fail("could not draw a non-contractible complex".into());
                    continue;
                }
            }
        };
        let t = transfer_algebra(&e, contraction, TransferBounds {
            max_arity: n_max.max(2),
            window,
        })?;
        let r = check_stasheff(&t.algebra, n_max)?;
        if !r.ok() {
            fail(format!("transferred algebra violates the associativity identities: {:?}",
                r.violation));
        } else {
            tick("stasheff");
        }
        let r = check_morphism(&t.algebra, &e, &t.inclusion, n_max.min(3))?;
        if !r.ok() {
            fail("transfer inclusion violates the morphism identities".into());
        } else {
            tick("morphism");
        }

        // Transferred module.
        let vertex = rng.below(2);
        let (module, _embed) = module_from_idempotent(&e, vertex)?;
        let tm = transfer_module(&e, &module, &t, TransferBounds {
            max_arity: n_max.max(2),
            window,
        })?;
        let r = check_module(&t.algebra, &tm, n_max)?;
        if !r.ok() {
            fail("transferred module violates the module identities".into());
        } else {
            tick("module");
        }

        // Cocycle machinery over the dg endomorphism algebra.
        let idem = StrictIdempotent { index: rng.below(2) };
        let (m, embed) = module_from_idempotent(&e, idem.index)?;
        let _ = &embed;
        let target_vertex = rng.below(2);
        if let Some(z) = random_cocycle(&e, &m, target_vertex, 0, &mut rng) {
            // Step 1: the attached morphism satisfies the identities.
            let target = StrictIdempotent { index: target_vertex };
            let f = cocycle_to_morphism(&e, &m, target, &z, n_max)?;
            let (source, _) = module_from_idempotent(&e, target.index)?;
            let r = check_module_morphism(&e, &source, &m, &f, n_max.min(3))?;
            if !r.ok() {
                fail("cocycle morphism violates the morphism identities".into());
            } else {
                tick("cocycle-morphism");
            }
        }
        if let Some(z_prime) = random_cocycle_any(&e, &m, target_vertex, -1, &mut rng) {
            // Step 2: the bounding homotopy relates the morphism of the
            // boundary to zero.
            let target = StrictIdempotent { index: target_vertex };
            let mut dz = LinComb::zero();
            for (i, c) in z_prime.iter() {
                if let Eval::Val(v) = m.eval(&e, 1, &[i]) {
                    dz.add_scaled(&v, c);
                }
            }
            if !dz.is_zero() {
                let h = homotopy_from_bounding(&e, &m, target, &z_prime, n_max)?;
                let f = cocycle_to_morphism(&e, &m, target, &dz, n_max)?;
                let (source, _) = module_from_idempotent(&e, target.index)?;
                let zero = AInfModuleMorphism::zero();
                let r = check_homotopy(&e, &source, &m, &h, &f, &zero, n_max.min(3))?;
                if !r.ok() {
                    fail("bounding homotopy violates the homotopy identity".into());
                } else {
                    tick("homotopy");
                }
                // Functional form: two cocycles differing by the boundary
                // have homotopic morphisms.
                if let Some(z) = random_cocycle(&e, &m, target_vertex, 0, &mut rng) {
                    let mut z2 = z.clone();
                    z2.add(&dz);
                    let f1 = cocycle_to_morphism(&e, &m, target, &z, n_max)?;
                    let f2 = cocycle_to_morphism(&e, &m, target, &z2, n_max)?;
                    let r = check_homotopy(&e, &source, &m, &h, &f2, &f1, n_max.min(3))?;
                    if !r.ok() {
                        fail("cohomologous cocycles are not explicitly homotopic".into());
                    } else {
                        tick("homotopy-functional");
                    }
                }
            }
        }
        // Step 3 on a boundary morphism: subtract the step-1 morphism of
        // f_1(e) and bound the difference by the step-3 formula.
        {
            // The homotopy identity at arity n consumes the morphism's
            // component of arity n + 1, so the boundary morphism is built
            // one arity deeper than the check runs.
            let depth = n_max.min(3);
            let hr = random_strict_homotopy(&e, &m, depth + 1, &mut rng);
            let idem3 = StrictIdempotent { index: idem.index };
            let (source, semb) = module_from_idempotent(&e, idem3.index)?;
            let f = homotopy_boundary(&e, &source, &m, &hr, depth + 1)?;
            let r = check_module_morphism(&e, &source, &m, &f, depth)?;
            if !r.ok() {
                fail("homotopy boundary is not a morphism".into());
            } else {
                tick("boundary-morphism");
            }
            // f_1(e) as a cocycle; with the unit position inside the module.
            let unit_pos = semb
                .iter()
                .position(|i| *i == e.unit_indices[idem3.index])
                .unwrap();
            let f1e = match f.eval(&e, &source, 1, &[unit_pos]) {
                Eval::Val(v) => v,
                Eval::Truncated => LinComb::zero(),
            };
            let g = cocycle_to_morphism(&e, &m, idem3, &f1e, depth + 1)?;
            let phi = morphism_sub(&e, &source, &f, &g, depth + 1)?;
            let h3 = step3_homotopy(&e, &source, &semb, &phi, idem3.index, depth)?;
            let zero = AInfModuleMorphism::zero();
            let r = check_homotopy(&e, &source, &m, &h3, &phi, &zero, depth)?;
            if !r.ok() {
                fail("step-3 homotopy fails the homotopy identity".into());
            } else {
                tick("step3");
            }
        }

        // Dual bar of a randomly rescaled Ext-algebra: the construction
        // verifies its squared differential internally.
        let base = &ext_cache[pick];
        let rescaled = random_rescale(base, &mut rng)?;
        match dual_bar(&rescaled, word_bound) {
            Ok(_) => tick("dual-bar"),
            Err(err) => fail(format!("dual bar differential check failed: {err}")),
        }
    }

    // Corruption control: scaling one product of the noncommutative
    // Yoneda algebra must break the associativity checker with a localized
    // witness.
    let mut corrupted = ext_cache[2].clone();
    let (witness, detected) = {
        let dim = corrupted.dim();
        let basis = corrupted.underlying.basis.clone();
        let a1 = (0..dim).find(|i| basis[*i].degree == 1 && basis[*i].right == 0);
        let m2 = corrupted.ops.get_mut(&2);
        match (m2, a1) {
            (Some(m2), Some(a1)) => {
                let word: Option<Vec<usize>> = m2
                    .entries()
                    .map(|(w, _)| w.clone())
                    .find(|w| w.contains(&a1));
                match word {
                    Some(word) => {
                        let value = m2.get(&word).cloned().unwrap_or_default();
                        let two = field.from_i64(2);
                        m2.set(word, value.scaled(&two));
                        let r = check_stasheff(&corrupted, 3)?;
                        match r.violation {
                            Some(v) => (
                                format!(
                                    "arity {} word {:?}: {}",
                                    v.arity, v.word, v.description
                                ),
                                true,
                            ),
                            None => ("corruption was not detected".into(), false),
                        }
                    }
                    None => ("no product to corrupt".into(), false),
                }
            }
            _ => ("no product to corrupt".into(), false),
        }
    };

    Ok(IdentityReport {
        trials,
        seed,
        checked,
        failures,
        corruption_detected: detected,
        corruption_witness: witness,
    })
}

/// Like [`random_cocycle`] but in an arbitrary degree, where every element
/// may be taken (used for bounding elements in degree -1).
fn random_cocycle_any(
    e: &AInfAlgebra,
    m: &crate::ainf::AInfModule,
    vertex: usize,
    degree: i64,
    rng: &mut Rng,
) -> Option<LinComb> {
    let indices: Vec<usize> = (0..m.basis.len())
        .filter(|i| m.basis[*i].vertex == vertex && m.basis[*i].degree == degree)
        .collect();
    if indices.is_empty() {
        return None;
    }
    let mut z = LinComb::zero();
    for i in indices {
        if rng.below(2) == 0 {
            z.add_term(i, rng.scalar(e.field));
        }
    }
    if z.is_zero() {
        None
    } else {
        Some(z)
    }
}

/// Rescales every non-unit basis element by a random nonzero scalar; this is
/// an isomorphism of strictly unital structures, so identities survive.
fn random_rescale(x: &AInfAlgebra, rng: &mut Rng) -> Result<AInfAlgebra> {
    let field = x.field;
    let mut lambda: Vec<Scalar> = Vec::with_capacity(x.dim());
    for i in 0..x.dim() {
        if x.is_unit(i) {
            lambda.push(field.one());
        } else {
            let mut v = rng.scalar(field);
            if v.is_zero() {
                v = field.one();
            }
            lambda.push(v);
        }
    }
    let mut ops = BTreeMap::new();
    for (n, op) in &x.ops {
        let mut new_op = MultiLinearMap::new(*n, 2 - *n as i64);
        for (word, value) in op.entries() {
            let mut factor = field.one();
            for i in word {
                factor = factor.mul(&lambda[*i]);
            }
            let mut out = LinComb::zero();
            for (z, c) in value.iter() {
                out.add_term(z, c.mul(&factor).mul(&lambda[z].inv().unwrap()));
            }
            new_op.set(word.clone(), out);
        }
        if !new_op.is_zero() {
            ops.insert(*n, new_op);
        }
    }
    AInfAlgebra::new(
        field,
        x.underlying.clone(),
        x.unit_indices.clone(),
        ops,
        x.arity_bound,
        x.ops_complete,
        x.window,
    )
}

/// Convenience wrapper used by tests and the acceptance suite.
pub fn default_suite(trials: usize, seed: u64) -> Result<IdentityReport> {
    let field = Field::prime(101)?;
    run_identity_suite(field, trials, 4, 6, seed)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let report = default_suite(5, 7).unwrap();
        assert!(report.ok(), "failures: {:?}", report.failures);
        assert!(report.checked["stasheff"] >= 5);
        assert!(report.corruption_detected);
    }

    #[test]
    fn suite_is_deterministic() {
        let a = default_suite(3, 42).unwrap();
        let b = default_suite(3, 42).unwrap();
        assert_eq!(format!("{:?}", a.checked), format!("{:?}", b.checked));
        assert_eq!(a.corruption_witness, b.corruption_witness);
    }
}
