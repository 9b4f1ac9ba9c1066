//! Built-in example algebras used by tests, golden files and the identity
//! suite.

use crate::exactla::Field;
use crate::quivalg::{AlgebraPresentation, Arrow, PathTerm, Relation};

fn arrow(name: &str, source: usize, target: usize) -> Arrow {
    Arrow { name: name.into(), source, target, degree: 0 }
}

fn monomial(field: Field, arrows: Vec<usize>) -> Relation {
    Relation { terms: vec![PathTerm { arrows, coeff: field.one() }] }
}

/// The two-vertex quiver `1 <-> 2` with both length-two compositions set to
/// zero: a radical-square-zero self-injective algebra of dimension four.
/// Arrows: `a : 1 -> 2` and `b : 2 -> 1`.
pub fn radical_square_zero_two_cycle(field: Field) -> AlgebraPresentation {
    AlgebraPresentation {
        field,
        vertices: 2,
        arrows: vec![arrow("a", 0, 1), arrow("b", 1, 0)],
        // a*b is the loop at vertex 2, b*a the loop at vertex 1.
        relations: vec![monomial(field, vec![0, 1]), monomial(field, vec![1, 0])],
        nilpotency_bound: 2,
    }
}

/// The dual numbers `k[x]/(x^2)`: one vertex, one loop, square zero.
pub fn dual_numbers(field: Field) -> AlgebraPresentation {
    AlgebraPresentation {
        field,
        vertices: 1,
        arrows: vec![arrow("x", 0, 0)],
        relations: vec![monomial(field, vec![0, 0])],
        nilpotency_bound: 2,
    }
}

/// The semisimple algebra `k x k`: two vertices, no arrows.
pub fn semisimple_two(field: Field) -> AlgebraPresentation {
    AlgebraPresentation {
        field,
        vertices: 2,
        arrows: vec![],
        relations: vec![],
        nilpotency_bound: 1,
    }
}

/// The hereditary path algebra of the quiver `1 -> 2`.
pub fn a2_quiver(field: Field) -> AlgebraPresentation {
    AlgebraPresentation {
        field,
        vertices: 2,
        arrows: vec![arrow("a", 0, 1)],
        relations: vec![],
        nilpotency_bound: 2,
    }
}

/// Every built-in presentation, with a short name for reports.
pub fn all(field: Field) -> Vec<(&'static str, AlgebraPresentation)> {
    vec![
        ("semisimple-two", semisimple_two(field)),
        ("dual-numbers", dual_numbers(field)),
        ("two-cycle-rad-square-zero", radical_square_zero_two_cycle(field)),
        ("a2-quiver", a2_quiver(field)),
    ]
}
