//! Quivers with relations and their finite-dimensional quotient algebras.
//!
//! An arrow `a : i -> j` is the algebra element `e_j a e_i` (target on the
//! left), and a path `[a, b]` is the product `a . b`, i.e. traverse `b`
//! first. Path bases are computed by bounded linear algebra on the span of
//! ideal elements: with a nilpotency bound `N`, every path of length at
//! least `N` must reduce to zero, which is verified rather than assumed.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactla::{Field, Scalar, SparseVec, SpanBuilder};
use crate::graded::LinComb;

/// An arrow of the quiver. Degrees must be non-positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub degree: i64,
}

/// A scalar multiple of a path, written in composition order:
/// `path[0]` is applied last.
#[derive(Clone, Debug, PartialEq)]
pub struct PathTerm {
    pub arrows: Vec<usize>,
    pub coeff: Scalar,
}

/// A relation: a linear combination of parallel paths of positive length.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub terms: Vec<PathTerm>,
}

/// A quiver with relations and a nilpotency bound for the arrow ideal.
#[derive(Clone, Debug)]
pub struct AlgebraPresentation {
    pub field: Field,
    pub vertices: usize,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<Relation>,
    pub nilpotency_bound: usize,
}

/// A path in the quiver: arrow indices in composition order; the empty path
/// at a vertex is the idempotent `e_vertex`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub arrows: Vec<usize>,
    /// Start vertex (right idempotent).
    pub source: usize,
    /// End vertex (left idempotent).
    pub target: usize,
}

impl Path {
    pub fn trivial(vertex: usize) -> Path {
        Path { arrows: Vec::new(), source: vertex, target: vertex }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn degree(&self, pres: &AlgebraPresentation) -> i64 {
        self.arrows.iter().map(|a| pres.arrows[*a].degree).sum()
    }

    pub fn display(&self, pres: &AlgebraPresentation) -> String {
        if self.is_trivial() {
            format!("e{}", self.source + 1)
        } else {
            self.arrows
                .iter()
                .map(|a| pres.arrows[*a].name.clone())
                .collect::<Vec<_>>()
                .join("*")
        }
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        // Length first, then arrow sequence, then start vertex.
        (self.arrows.len(), &self.arrows, self.source).cmp(&(
            other.arrows.len(),
            &other.arrows,
            other.source,
        ))
    }
}

impl AlgebraPresentation {
    pub fn validate(&self) -> Result<()> {
        if self.vertices == 0 {
            return Err(Error::input("a quiver needs at least one vertex"));
        }
        if self.nilpotency_bound == 0 {
            return Err(Error::input("the nilpotency bound must be positive"));
        }
        if self.nilpotency_bound > 32 {
            return Err(Error::input("the nilpotency bound is limited to 32"));
        }
        if self.arrows.len() > 256 {
            return Err(Error::input("at most 256 arrows are supported"));
        }
        let mut names: Vec<&str> = Vec::new();
        for a in &self.arrows {
            if a.source >= self.vertices || a.target >= self.vertices {
                return Err(Error::input(format!("arrow {} has bad endpoints", a.name)));
            }
            if a.degree > 0 {
                return Err(Error::input(format!(
                    "arrow {} has positive degree; only non-positive gradings are supported",
                    a.name
                )));
            }
            if names.contains(&a.name.as_str()) {
                return Err(Error::input(format!("duplicate arrow name {}", a.name)));
            }
            names.push(&a.name);
        }
        for (k, rel) in self.relations.iter().enumerate() {
            if rel.terms.is_empty() {
                return Err(Error::input(format!("relation {} is empty", k + 1)));
            }
            let mut sig: Option<(usize, usize, i64)> = None;
            for t in &rel.terms {
                if t.arrows.is_empty() {
                    return Err(Error::input(format!(
                        "relation {} contains a trivial path; relations must lie in the arrow ideal",
                        k + 1
                    )));
                }
                if t.arrows.len() > 64 {
                    return Err(Error::input(format!(
                        "relation {} has a path longer than 64 arrows",
                        k + 1
                    )));
                }
                let p = self.compose(&t.arrows).ok_or_else(|| {
                    Error::input(format!("relation {} contains a non-composable path", k + 1))
                })?;
                let this = (p.source, p.target, p.degree(self));
                match &sig {
                    None => sig = Some(this),
                    Some(s) if *s != this => {
                        return Err(Error::input(format!(
                            "relation {} mixes paths with different endpoints or degrees",
                            k + 1
                        )))
                    }
                    _ => {}
                }
                if t.coeff.field() != self.field {
                    return Err(Error::input("relation coefficient in the wrong field"));
                }
            }
        }
        Ok(())
    }

    /// Path from a list of arrow indices in composition order, if composable.
    pub fn compose(&self, arrows: &[usize]) -> Option<Path> {
        if arrows.is_empty() {
            return None;
        }
        for a in arrows {
            if *a >= self.arrows.len() {
                return None;
            }
        }
        for w in arrows.windows(2) {
            // arrows[k] is applied after arrows[k+1].
            if self.arrows[w[0]].source != self.arrows[w[1]].target {
                return None;
            }
        }
        Some(Path {
            arrows: arrows.to_vec(),
            source: self.arrows[*arrows.last().unwrap()].source,
            target: self.arrows[arrows[0]].target,
        })
    }

    /// All paths of length up to `cap`, sorted; fails on quivers whose path
    /// count explodes past a fixed resource limit.
    fn paths_up_to(&self, cap: usize) -> Result<Vec<Path>> {
        const LIMIT: usize = 200_000;
        let mut all: Vec<Path> = (0..self.vertices).map(Path::trivial).collect();
        let mut frontier: Vec<Path> = all.clone();
        for _ in 1..=cap {
            let mut next = Vec::new();
            for p in &frontier {
                // Extend on the left: a . p with source(a) = target(p).
                for (ai, a) in self.arrows.iter().enumerate() {
                    if a.source == p.target {
                        let mut arrows = vec![ai];
                        arrows.extend_from_slice(&p.arrows);
                        next.push(Path { arrows, source: p.source, target: a.target });
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            all.extend(next.iter().cloned());
            if all.len() > LIMIT {
                return Err(Error::input(
                    "the quiver has too many bounded-length paths to enumerate",
                ));
            }
            frontier = next;
        }
        all.sort();
        Ok(all)
    }
}

/// The quotient of a path algebra by its relation ideal, with a cached
/// deterministic basis of normal-form paths and structure constants.
#[derive(Clone, Debug)]
pub struct PathAlgebra {
    pub pres: AlgebraPresentation,
    /// Normal-form paths, sorted by length then lexicographically; the `r`
    /// trivial paths come first.
    pub basis: Vec<Path>,
    /// Basis index of `e_v` for each vertex.
    pub unit_paths: Vec<usize>,
    // Reduction data over the bounded path space.
    all_paths: Vec<Path>,
    index_of: BTreeMap<Path, usize>,
    reducer: SpanBuilder,
    /// Maps a coordinate in the bounded path space to a basis index, for
    /// vectors already in normal form.
    coord_to_basis: BTreeMap<usize, usize>,
}

/// Computes the deterministic path basis of the quotient algebra; fails when
/// the relation ideal is not nilpotent at the declared bound.
pub fn path_basis(pres: &AlgebraPresentation) -> Result<PathAlgebra> {
    pres.validate()?;
    let n = pres.nilpotency_bound;
    let max_rel_len = pres
        .relations
        .iter()
        .flat_map(|r| r.terms.iter().map(|t| t.arrows.len()))
        .max()
        .unwrap_or(0);
    let cap = (2 * n.saturating_sub(1)).max(n + max_rel_len).max(1);
    let all_paths = pres.paths_up_to(cap)?;
    // Coordinates ordered by descending (length, lex) so elimination pivots
    // remove the largest paths first.
    let total = all_paths.len();
    let index_of: BTreeMap<Path, usize> =
        all_paths.iter().enumerate().map(|(k, p)| (p.clone(), k)).collect();
    let coord = |k: usize| total - 1 - k;

    let mut reducer = SpanBuilder::new(total, pres.field);
    // Span of u . rel . v over all composable path sandwiches within the cap.
    for rel in &pres.relations {
        let rel_len = rel.terms.iter().map(|t| t.arrows.len()).max().unwrap();
        let (src, tgt) = {
            let p = pres.compose(&rel.terms[0].arrows).unwrap();
            (p.source, p.target)
        };
        for u in &all_paths {
            if u.source != tgt || u.len() + rel_len > cap {
                continue;
            }
            for v in &all_paths {
                if v.target != src || u.len() + rel_len + v.len() > cap {
                    continue;
                }
                let mut vec = SparseVec::new();
                for t in &rel.terms {
                    let mut arrows = u.arrows.clone();
                    arrows.extend_from_slice(&t.arrows);
                    arrows.extend_from_slice(&v.arrows);
                    let p = Path { arrows, source: v.source, target: u.target };
                    let k = index_of[&p];
                    let cur = match vec.get(coord(k)) {
                        Some(c) => c.add(&t.coeff),
                        None => t.coeff.clone(),
                    };
                    vec.set(coord(k), cur);
                }
                reducer.insert(&vec);
            }
        }
    }

    // Nilpotency: every path of length in [n, cap] must lie in the ideal.
    for (k, p) in all_paths.iter().enumerate() {
        if p.len() >= n {
            let v = SparseVec::unit(coord(k), pres.field);
            if !reducer.contains(&v) {
                return Err(Error::input(format!(
                    "relation ideal is not admissible within bound {n}: path {} does not vanish",
                    p.display(pres)
                )));
            }
        }
    }

    // Normal-form basis: paths of length < n whose coordinate is not an
    // elimination pivot; pivot paths reduce to combinations of smaller ones.
    let mut basis = Vec::new();
    let mut coord_to_basis = BTreeMap::new();
    for (k, p) in all_paths.iter().enumerate() {
        if p.len() >= n {
            continue;
        }
        if !reducer.has_lead(coord(k)) {
            coord_to_basis.insert(coord(k), basis.len());
            basis.push(p.clone());
        }
    }
    let mut unit_paths = vec![usize::MAX; pres.vertices];
    for (i, p) in basis.iter().enumerate() {
        if p.is_trivial() {
            unit_paths[p.source] = i;
        }
    }
    if unit_paths.contains(&usize::MAX) {
        return Err(Error::internal("a trivial path was eliminated by the relations"));
    }
    Ok(PathAlgebra {
        pres: pres.clone(),
        basis,
        unit_paths,
        all_paths,
        index_of,
        reducer,
        coord_to_basis,
    })
}

impl PathAlgebra {
    pub fn field(&self) -> Field {
        self.pres.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn vertices(&self) -> usize {
        self.pres.vertices
    }

    /// Reduces an arbitrary bounded-length path to the basis.
    pub fn reduce_path(&self, p: &Path) -> Result<LinComb> {
        let k = self
            .index_of
            .get(p)
            .ok_or_else(|| Error::internal(format!("path of length {} beyond cap", p.len())))?;
        let total = self.all_paths.len();
        let v = SparseVec::unit(total - 1 - k, self.field());
        let red = self.reducer.reduce(&v);
        let mut out = LinComb::zero();
        for (c, s) in red.iter() {
            let b = self.coord_to_basis.get(&c).ok_or_else(|| {
                Error::internal("reduction produced a non-basis coordinate")
            })?;
            out.add_term(*b, s.clone());
        }
        Ok(out)
    }

    /// Product of two basis elements in the quotient.
    pub fn multiply(&self, i: usize, j: usize) -> Result<LinComb> {
        let (p, q) = (&self.basis[i], &self.basis[j]);
        if p.source != q.target {
            return Ok(LinComb::zero());
        }
        if p.is_trivial() {
            return Ok(LinComb::single(j, self.field().one()));
        }
        if q.is_trivial() {
            return Ok(LinComb::single(i, self.field().one()));
        }
        let mut arrows = p.arrows.clone();
        arrows.extend_from_slice(&q.arrows);
        self.reduce_path(&Path { arrows, source: q.source, target: p.target })
    }

    /// Product of two linear combinations of basis elements.
    pub fn multiply_combs(&self, x: &LinComb, y: &LinComb) -> Result<LinComb> {
        let mut out = LinComb::zero();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let prod = self.multiply(i, j)?;
                out.add_scaled(&prod, &a.mul(b));
            }
        }
        Ok(out)
    }

    /// Basis indices of `e_target A e_source`.
    pub fn block(&self, target: usize, source: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|k| self.basis[*k].target == target && self.basis[*k].source == source)
            .collect()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree(&self.pres)
    }

    /// True when every arrow sits in degree zero, so representations and
    /// resolutions are available.
    pub fn is_degree_zero(&self) -> bool {
        self.pres.arrows.iter().all(|a| a.degree == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn two_cycle_radical_square_zero_basis() {
        let pres = fixtures::radical_square_zero_two_cycle(Field::Rational);
        let alg = path_basis(&pres).unwrap();
        assert_eq!(alg.dim(), 4);
        let names: Vec<String> = alg.basis.iter().map(|p| p.display(&pres)).collect();
        assert_eq!(names, vec!["e1", "e2", "a", "b"]);
        // a*b and b*a vanish in the quotient.
        let a = 2;
        let b = 3;
        assert!(alg.multiply(a, b).unwrap().is_zero());
        assert!(alg.multiply(b, a).unwrap().is_zero());
    }

    #[test]
    fn dual_numbers_basis() {
        let pres = fixtures::dual_numbers(Field::Rational);
        let alg = path_basis(&pres).unwrap();
        assert_eq!(alg.dim(), 2);
        assert!(alg.multiply(1, 1).unwrap().is_zero());
    }

    #[test]
    fn semisimple_two_basis() {
        let pres = fixtures::semisimple_two(Field::Rational);
        let alg = path_basis(&pres).unwrap();
        assert_eq!(alg.dim(), 2);
        assert!(alg.multiply(0, 1).unwrap().is_zero());
        assert_eq!(
            alg.multiply(0, 0).unwrap(),
            LinComb::single(0, Field::Rational.one())
        );
    }

    #[test]
    fn nilpotency_violation_is_reported() {
        // A loop with no relations cannot be finite-dimensional.
        let pres = AlgebraPresentation {
            field: Field::Rational,
            vertices: 1,
            arrows: vec![Arrow { name: "x".into(), source: 0, target: 0, degree: 0 }],
            relations: vec![],
            nilpotency_bound: 3,
        };
        assert!(path_basis(&pres).is_err());
    }

    #[test]
    fn non_monomial_relation() {
        // k<x, y> / (xy - yx, x^2, y^2): commuting nilpotents; basis
        // {e, x, y, xy}.
        let f = Field::Rational;
        let arrows = vec![
            Arrow { name: "x".into(), source: 0, target: 0, degree: 0 },
            Arrow { name: "y".into(), source: 0, target: 0, degree: 0 },
        ];
        let rel = |terms: Vec<(Vec<usize>, i64)>| Relation {
            terms: terms
                .into_iter()
                .map(|(arrows, c)| PathTerm { arrows, coeff: f.from_i64(c) })
                .collect(),
        };
        let pres = AlgebraPresentation {
            field: f,
            vertices: 1,
            arrows,
            relations: vec![
                rel(vec![(vec![0, 1], 1), (vec![1, 0], -1)]),
                rel(vec![(vec![0, 0], 1)]),
                rel(vec![(vec![1, 1], 1)]),
            ],
            nilpotency_bound: 3,
        };
        let alg = path_basis(&pres).unwrap();
        assert_eq!(alg.dim(), 4);
        // yx reduces to xy.
        let x = 1;
        let y = 2;
        let yx = alg.multiply(y, x).unwrap();
        let xy = alg.multiply(x, y).unwrap();
        assert_eq!(yx, xy);
        assert!(!xy.is_zero());
    }
}
