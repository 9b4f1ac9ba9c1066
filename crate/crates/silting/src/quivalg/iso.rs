//! Deterministic normal-form comparison of presented algebras.
//!
//! Two presentations are compared by canonicalising both quotient algebras
//! and searching over vertex permutations for a basis bijection under which
//! the structure constants agree. This decides isomorphism for the fixture
//! class covered here (at most one arrow between any ordered pair of
//! vertices); richer inputs get an honest "not comparable" answer instead of
//! a guess.

use crate::error::Result;
use crate::graded::LinComb;

use super::presentation::{Path, PathAlgebra};

/// Outcome of a normal-form comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoOutcome {
    Isomorphic,
    NotIsomorphic,
    /// The comparer does not cover this input shape.
    NotComparable(String),
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// Compares two finite-dimensional quotient algebras up to isomorphism by
/// vertex relabelling.
pub fn presentations_isomorphic(a: &PathAlgebra, b: &PathAlgebra) -> Result<IsoOutcome> {
    let r = a.vertices();
    if r != b.vertices() {
        return Ok(IsoOutcome::NotIsomorphic);
    }
    if a.dim() != b.dim() {
        return Ok(IsoOutcome::NotIsomorphic);
    }
    if r > 7 {
        return Ok(IsoOutcome::NotComparable(
            "vertex permutation search limited to 7 vertices".into(),
        ));
    }
    // Arrow multiplicity guard: the canonical arrow correspondence needs at
    // most one arrow per ordered vertex pair, after reduction.
    for alg in [a, b] {
        for i in 0..r {
            for j in 0..r {
                let arrows = alg
                    .basis
                    .iter()
                    .filter(|p| p.len() == 1 && p.target == j && p.source == i)
                    .count();
                if arrows > 1 {
                    return Ok(IsoOutcome::NotComparable(format!(
                        "{arrows} parallel arrows between a vertex pair"
                    )));
                }
            }
        }
    }
    'perm: for sigma in permutations(r) {
        // Map basis paths of `a` through sigma and locate them in `b`.
        let mut image: Vec<Option<usize>> = vec![None; a.dim()];
        // Arrow correspondence: the unique b-arrow with the permuted
        // endpoints, if any.
        let arrow_of = |alg: &PathAlgebra, src: usize, tgt: usize| -> Option<usize> {
            alg.pres
                .arrows
                .iter()
                .position(|x| x.source == src && x.target == tgt)
        };
        for (k, p) in a.basis.iter().enumerate() {
            let q = if p.is_trivial() {
                Path::trivial(sigma[p.source])
            } else {
                let mut arrows = Vec::with_capacity(p.len());
                for ai in &p.arrows {
                    let arr = &a.pres.arrows[*ai];
                    match arrow_of(b, sigma[arr.source], sigma[arr.target]) {
                        Some(bi) => arrows.push(bi),
                        None => continue 'perm,
                    }
                }
                match b.pres.compose(&arrows) {
                    Some(q) => q,
                    None => continue 'perm,
                }
            };
            match b.basis.iter().position(|x| *x == q) {
                Some(pos) => image[k] = Some(pos),
                None => continue 'perm,
            }
        }
        let image: Vec<usize> = image.into_iter().map(|x| x.unwrap()).collect();
        // The path map must be a bijection on bases.
        let mut seen = vec![false; b.dim()];
        for i in &image {
            if seen[*i] {
                continue 'perm;
            }
            seen[*i] = true;
        }
        // Structure constants must transport.
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let prod_a = a.multiply(i, j)?;
                let mut transported = LinComb::zero();
                for (k, c) in prod_a.iter() {
                    transported.add_term(image[k], c.clone());
                }
                let prod_b = b.multiply(image[i], image[j])?;
                if transported != prod_b {
                    continue 'perm;
                }
            }
        }
        return Ok(IsoOutcome::Isomorphic);
    }
    Ok(IsoOutcome::NotIsomorphic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Field;
    use crate::fixtures;
    use crate::quivalg::presentation::{path_basis, AlgebraPresentation, Arrow};

    #[test]
    fn a2_is_isomorphic_to_its_opposite() {
        let f = Field::Rational;
        let a = path_basis(&fixtures::a2_quiver(f)).unwrap();
        let op = AlgebraPresentation {
            field: f,
            vertices: 2,
            arrows: vec![Arrow { name: "z".into(), source: 1, target: 0, degree: 0 }],
            relations: vec![],
            nilpotency_bound: 2,
        };
        let b = path_basis(&op).unwrap();
        assert_eq!(presentations_isomorphic(&a, &b).unwrap(), IsoOutcome::Isomorphic);
    }

    #[test]
    fn different_sizes_are_not_isomorphic() {
        let f = Field::Rational;
        let a = path_basis(&fixtures::a2_quiver(f)).unwrap();
        let b = path_basis(&fixtures::semisimple_two(f)).unwrap();
        assert_eq!(presentations_isomorphic(&a, &b).unwrap(), IsoOutcome::NotIsomorphic);
    }

    #[test]
    fn two_cycle_is_isomorphic_to_itself_relabelled() {
        let f = Field::Rational;
        let a = path_basis(&fixtures::radical_square_zero_two_cycle(f)).unwrap();
        assert_eq!(presentations_isomorphic(&a, &a).unwrap(), IsoOutcome::Isomorphic);
    }

    #[test]
    fn hereditary_vs_radical_square_zero() {
        let f = Field::Rational;
        let a = path_basis(&fixtures::a2_quiver(f)).unwrap();
        let b = path_basis(&fixtures::dual_numbers(f)).unwrap();
        // Same dimension over different vertex counts.
        assert_eq!(presentations_isomorphic(&a, &b).unwrap(), IsoOutcome::NotIsomorphic);
    }
}
