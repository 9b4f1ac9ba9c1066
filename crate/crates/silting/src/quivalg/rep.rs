//! Representations of a quiver with relations and bounded complexes of them.
//!
//! Everything is a right module: an arrow `a : s -> t` (the element
//! `e_t a e_s`) acts by a matrix from the fibre at `t` to the fibre at `s`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactla::SparseMatrix;
use crate::graded::LinComb;

use super::presentation::{Path, PathAlgebra};

/// A finite-dimensional representation: one vector space per vertex, one
/// matrix per arrow of shape `dims[source] x dims[target]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub dims: Vec<usize>,
    pub matrices: Vec<SparseMatrix>,
}

impl Representation {
    pub fn zero(alg: &PathAlgebra) -> Representation {
        let dims = vec![0; alg.vertices()];
        let matrices = alg
            .pres
            .arrows
            .iter()
            .map(|_| SparseMatrix::zero(0, 0, alg.field()))
            .collect();
        Representation { dims, matrices }
    }

    /// The simple module at a vertex.
    pub fn simple(alg: &PathAlgebra, vertex: usize) -> Representation {
        let mut dims = vec![0; alg.vertices()];
        dims[vertex] = 1;
        let matrices = alg
            .pres
            .arrows
            .iter()
            .map(|a| SparseMatrix::zero(dims[a.source], dims[a.target], alg.field()))
            .collect();
        Representation { dims, matrices }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn validate(&self, alg: &PathAlgebra) -> Result<()> {
        let pres = &alg.pres;
        if self.dims.len() != pres.vertices || self.matrices.len() != pres.arrows.len() {
            return Err(Error::input("representation shape does not match the quiver"));
        }
        for (k, a) in pres.arrows.iter().enumerate() {
            let m = &self.matrices[k];
            if m.rows != self.dims[a.source] || m.cols != self.dims[a.target] {
                return Err(Error::input(format!(
                    "matrix for arrow {} has shape {}x{}, expected {}x{}",
                    a.name, m.rows, m.cols, self.dims[a.source], self.dims[a.target]
                )));
            }
            if a.degree != 0 {
                return Err(Error::input(format!(
                    "arrow {} has nonzero degree; representations require a degree-zero algebra",
                    a.name
                )));
            }
        }
        for (k, rel) in pres.relations.iter().enumerate() {
            let mut acc: Option<SparseMatrix> = None;
            for t in &rel.terms {
                let p = pres.compose(&t.arrows).unwrap();
                let m = self.path_action(alg, &p).scaled(&t.coeff);
                acc = Some(match acc {
                    Some(a) => a.add(&m),
                    None => m,
                });
            }
            if let Some(a) = acc {
                if !a.is_zero() {
                    return Err(Error::check(format!(
                        "relation {} does not annihilate the representation",
                        k + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Action of a path: the matrix of right multiplication, from the fibre
    /// at `target(p)` to the fibre at `source(p)`.
    pub fn path_action(&self, alg: &PathAlgebra, p: &Path) -> SparseMatrix {
        let field = alg.field();
        let mut m = SparseMatrix::identity(self.dims[p.target], field);
        // m . (a1 a2 ... ak) = (((m . a1) . a2) ... ) . ak
        for a in &p.arrows {
            m = self.matrices[*a].mul(&m);
        }
        m
    }

    /// Action of a linear combination of basis paths with common endpoints.
    pub fn comb_action(
        &self,
        alg: &PathAlgebra,
        value: &LinComb,
        target: usize,
        source: usize,
    ) -> SparseMatrix {
        let mut m = SparseMatrix::zero(self.dims[source], self.dims[target], alg.field());
        for (i, c) in value.iter() {
            let p = &alg.basis[i];
            debug_assert!(p.target == target && p.source == source);
            m = m.add(&self.path_action(alg, p).scaled(c));
        }
        m
    }
}

/// A morphism of representations: one matrix per vertex commuting with the
/// arrow actions.
#[derive(Clone, Debug)]
pub struct RepMorphism {
    pub matrices: Vec<SparseMatrix>,
}

impl RepMorphism {
    pub fn validate(
        &self,
        alg: &PathAlgebra,
        from: &Representation,
        to: &Representation,
    ) -> Result<()> {
        for v in 0..alg.vertices() {
            let m = &self.matrices[v];
            if m.rows != to.dims[v] || m.cols != from.dims[v] {
                return Err(Error::input("morphism matrix shape mismatch"));
            }
        }
        for (k, a) in alg.pres.arrows.iter().enumerate() {
            let lhs = self.matrices[a.source].mul(&from.matrices[k]);
            let rhs = to.matrices[k].mul(&self.matrices[a.target]);
            if lhs != rhs {
                return Err(Error::check(format!(
                    "morphism does not commute with arrow {}",
                    a.name
                )));
            }
        }
        Ok(())
    }
}

/// A bounded cochain complex of representations.
#[derive(Clone, Debug, Default)]
pub struct ComplexOfReps {
    pub terms: BTreeMap<i64, Representation>,
    /// `diffs[p][v]` is the vertex-`v` component of `d^p : C^p -> C^{p+1}`.
    pub diffs: BTreeMap<i64, Vec<SparseMatrix>>,
}

impl ComplexOfReps {
    pub fn stalk(rep: Representation, degree: i64) -> ComplexOfReps {
        let mut terms = BTreeMap::new();
        if rep.total_dim() > 0 {
            terms.insert(degree, rep);
        }
        ComplexOfReps { terms, diffs: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|t| t.total_dim() == 0)
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.terms
            .iter()
            .filter(|(_, t)| t.total_dim() > 0)
            .map(|(p, _)| *p)
            .collect()
    }

    pub fn dim(&self, p: i64, v: usize) -> usize {
        self.terms.get(&p).map_or(0, |t| t.dims[v])
    }

    pub fn term_dims(&self, p: i64, vertices: usize) -> Vec<usize> {
        (0..vertices).map(|v| self.dim(p, v)).collect()
    }

    pub fn diff_at(&self, alg: &PathAlgebra, p: i64, v: usize) -> SparseMatrix {
        match self.diffs.get(&p) {
            Some(ms) => ms[v].clone(),
            None => SparseMatrix::zero(self.dim(p + 1, v), self.dim(p, v), alg.field()),
        }
    }

    pub fn validate(&self, alg: &PathAlgebra) -> Result<()> {
        for t in self.terms.values() {
            t.validate(alg)?;
        }
        for (p, ms) in &self.diffs {
            if ms.len() != alg.vertices() {
                return Err(Error::input("differential is missing vertex components"));
            }
            for v in 0..alg.vertices() {
                let m = &ms[v];
                if m.rows != self.dim(p + 1, v) || m.cols != self.dim(*p, v) {
                    return Err(Error::input(format!(
                        "differential at degree {p}, vertex {} has the wrong shape",
                        v + 1
                    )));
                }
            }
            // d commutes with every arrow action.
            for (k, a) in alg.pres.arrows.iter().enumerate() {
                let act_p = self
                    .terms
                    .get(p)
                    .map(|t| t.matrices[k].clone())
                    .unwrap_or_else(|| {
                        SparseMatrix::zero(self.dim(*p, a.source), self.dim(*p, a.target), alg.field())
                    });
                let act_p1 = self
                    .terms
                    .get(&(p + 1))
                    .map(|t| t.matrices[k].clone())
                    .unwrap_or_else(|| {
                        SparseMatrix::zero(
                            self.dim(p + 1, a.source),
                            self.dim(p + 1, a.target),
                            alg.field(),
                        )
                    });
                let lhs = self.diff_at(alg, *p, a.source).mul(&act_p);
                let rhs = act_p1.mul(&self.diff_at(alg, *p, a.target));
                if lhs != rhs {
                    return Err(Error::check(format!(
                        "differential at degree {p} does not commute with arrow {}",
                        a.name
                    )));
                }
            }
        }
        // d . d = 0.
        let degrees: Vec<i64> = self.diffs.keys().copied().collect();
        for p in degrees {
            for v in 0..alg.vertices() {
                let dd = self.diff_at(alg, p + 1, v).mul(&self.diff_at(alg, p, v));
                if !dd.is_zero() {
                    return Err(Error::check(format!(
                        "differential does not square to zero at degree {p}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Shift: `(shift(C, k))^p = C^{p+k}` with differentials scaled by
    /// `(-1)^k`.
    pub fn shift(&self, alg: &PathAlgebra, k: i64) -> ComplexOfReps {
        let terms = self.terms.iter().map(|(p, t)| (p - k, t.clone())).collect();
        let sign = alg.field().one().with_sign(k);
        let diffs = self
            .diffs
            .iter()
            .map(|(p, ms)| (p - k, ms.iter().map(|m| m.scaled(&sign)).collect()))
            .collect();
        ComplexOfReps { terms, diffs }
    }

    /// Brutal truncation keeping degrees `>= from`.
    pub fn brutal_above(&self, from: i64) -> ComplexOfReps {
        let terms = self
            .terms
            .iter()
            .filter(|(p, _)| **p >= from)
            .map(|(p, t)| (*p, t.clone()))
            .collect();
        let diffs = self
            .diffs
            .iter()
            .filter(|(p, _)| **p >= from)
            .map(|(p, ms)| (*p, ms.clone()))
            .collect();
        ComplexOfReps { terms, diffs }
    }
}

/// The indecomposable projective `P_v = e_v A` as a representation: the
/// fibre at `w` has the paths with target `v` and source `w` as basis, in
/// block order.
pub fn projective_rep(alg: &PathAlgebra, v: usize) -> (Representation, Vec<Vec<usize>>) {
    let blocks: Vec<Vec<usize>> = (0..alg.vertices()).map(|w| alg.block(v, w)).collect();
    let dims: Vec<usize> = blocks.iter().map(|b| b.len()).collect();
    let mut matrices = Vec::new();
    for (ai, a) in alg.pres.arrows.iter().enumerate() {
        // Right action by the arrow: fibre at target(a) -> fibre at source(a).
        let mut m = SparseMatrix::zero(dims[a.source], dims[a.target], alg.field());
        for (col, pi) in blocks[a.target].iter().enumerate() {
            let p = &alg.basis[*pi];
            let mut arrows = p.arrows.clone();
            arrows.push(ai);
            let prod = alg
                .reduce_path(&Path { arrows, source: a.source, target: p.target })
                .expect("products of basis paths stay within the cap");
            for (bi, c) in prod.iter() {
                let row = blocks[a.source]
                    .iter()
                    .position(|x| *x == bi)
                    .expect("product lands in the right block");
                m.set(row, col, c.clone());
            }
        }
        matrices.push(m);
    }
    (Representation { dims, matrices }, blocks)
}

/// The indecomposable injective `I_v = D(A e_v)`: the fibre at `w` is dual
/// to the paths with target `w` and source `v`.
pub fn injective_rep(alg: &PathAlgebra, v: usize) -> (Representation, Vec<Vec<usize>>) {
    let blocks: Vec<Vec<usize>> = (0..alg.vertices()).map(|w| alg.block(w, v)).collect();
    let dims: Vec<usize> = blocks.iter().map(|b| b.len()).collect();
    let mut matrices = Vec::new();
    for (ai, a) in alg.pres.arrows.iter().enumerate() {
        // (f . a)(m) = f(a . m): transpose of left multiplication
        // e_{source(a)} (A e_v) -> e_{target(a)} (A e_v).
        let mut left_mult =
            SparseMatrix::zero(dims[a.target], dims[a.source], alg.field());
        for (col, pi) in blocks[a.source].iter().enumerate() {
            let p = &alg.basis[*pi];
            let mut arrows = vec![ai];
            arrows.extend_from_slice(&p.arrows);
            let prod = alg
                .reduce_path(&Path { arrows, source: p.source, target: a.target })
                .expect("products of basis paths stay within the cap");
            for (bi, c) in prod.iter() {
                let row = blocks[a.target]
                    .iter()
                    .position(|x| *x == bi)
                    .expect("product lands in the right block");
                left_mult.set(row, col, c.clone());
            }
        }
        matrices.push(left_mult.transpose());
    }
    (Representation { dims, matrices }, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Field;
    use crate::fixtures;
    use crate::quivalg::presentation::path_basis;

    #[test]
    fn projectives_of_the_two_cycle_algebra() {
        let alg = path_basis(&fixtures::radical_square_zero_two_cycle(Field::Rational)).unwrap();
        let (p1, _) = projective_rep(&alg, 0);
        assert_eq!(p1.dims, vec![1, 1]);
        p1.validate(&alg).unwrap();
        let (p2, _) = projective_rep(&alg, 1);
        assert_eq!(p2.dims, vec![1, 1]);
        p2.validate(&alg).unwrap();
        let (i1, _) = injective_rep(&alg, 0);
        assert_eq!(i1.dims, vec![1, 1]);
        i1.validate(&alg).unwrap();
    }

    #[test]
    fn dual_numbers_projective_is_two_dimensional() {
        let alg = path_basis(&fixtures::dual_numbers(Field::Rational)).unwrap();
        let (p, _) = projective_rep(&alg, 0);
        assert_eq!(p.dims, vec![2]);
        p.validate(&alg).unwrap();
        // x acts nontrivially but squares to zero.
        assert!(!p.matrices[0].is_zero());
        assert!(p.matrices[0].mul(&p.matrices[0]).is_zero());
    }

    #[test]
    fn semisimple_projectives_are_simple() {
        let alg = path_basis(&fixtures::semisimple_two(Field::Rational)).unwrap();
        let (p1, _) = projective_rep(&alg, 0);
        assert_eq!(p1, Representation::simple(&alg, 0));
    }

    #[test]
    fn relation_violation_is_detected() {
        let alg = path_basis(&fixtures::dual_numbers(Field::Rational)).unwrap();
        let rep = Representation {
            dims: vec![1],
            matrices: vec![SparseMatrix::identity(1, Field::Rational)],
        };
        // x acts as 1, so x^2 = 1 != 0.
        assert!(rep.validate(&alg).is_err());
    }
}
