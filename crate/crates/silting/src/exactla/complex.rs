//! Cochain complexes over an exact field and contractions onto cohomology.
//!
//! A contraction is a triple (inclusion, projection, homotopy) exhibiting the
//! cohomology of a complex as a deformation retract, with the side conditions
//! needed by homotopy transfer. The construction here chooses, in every
//! degree, a deterministic splitting `C = B + H + L` where `B` is the space
//! of coboundaries, `H` a complement of `B` inside the cocycles, and `L` a
//! complement of the cocycles mapped isomorphically onto the coboundaries one
//! degree up. All side conditions then hold on the nose:
//!
//! * `pi . iota = id`
//! * `iota . pi = id - d h - h d`
//! * `h . iota = 0`, `pi . h = 0`, `h . h = 0`

use std::collections::BTreeMap;

use super::matrix::{kernel_basis, rref, solve, SparseMatrix, SparseVec, SpanBuilder};
use super::scalar::Field;
use crate::error::{Error, Result};

/// A bounded cochain complex: per-degree dimensions and differentials
/// `d^p : C^p -> C^{p+1}` raising degree by one.
#[derive(Clone, Debug)]
pub struct Complex {
    field: Field,
    lo: i64,
    hi: i64,
    dims: BTreeMap<i64, usize>,
    diffs: BTreeMap<i64, SparseMatrix>,
}

impl Complex {
    pub fn new(
        field: Field,
        lo: i64,
        hi: i64,
        dims: BTreeMap<i64, usize>,
        diffs: BTreeMap<i64, SparseMatrix>,
    ) -> Result<Self> {
        if lo > hi {
            return Err(Error::input(format!("empty degree window [{lo}, {hi}]")));
        }
        for (p, dim) in &dims {
            if *p < lo || *p > hi {
                return Err(Error::input(format!(
                    "complex has a term in degree {p} outside [{lo}, {hi}]"
                )));
            }
            let _ = dim;
        }
        let c = Complex { field, lo, hi, dims, diffs };
        for (p, d) in &c.diffs {
            if d.rows != c.dim(*p + 1) || d.cols != c.dim(*p) {
                return Err(Error::input(format!(
                    "differential at degree {p} has shape {}x{}, expected {}x{}",
                    d.rows,
                    d.cols,
                    c.dim(*p + 1),
                    c.dim(*p)
                )));
            }
        }
        Ok(c)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn dim(&self, p: i64) -> usize {
        self.dims.get(&p).copied().unwrap_or(0)
    }

    pub fn diff(&self, p: i64) -> SparseMatrix {
        self.diffs
            .get(&p)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zero(self.dim(p + 1), self.dim(p), self.field))
    }

    /// Checks `d . d = 0` in every degree of the window.
    pub fn check_dd_zero(&self) -> Result<()> {
        for p in self.lo..self.hi {
            let dd = self.diff(p + 1).mul(&self.diff(p));
            if !dd.is_zero() {
                return Err(Error::check(format!(
                    "differential does not square to zero at degree {p}"
                )));
            }
        }
        Ok(())
    }
}

/// Contraction of a complex onto its cohomology.
///
/// `iota^p` includes chosen cocycle representatives, `pi^p` projects onto
/// them, and the homotopy `h^p : C^p -> C^{p-1}` lowers degree by one.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub field: Field,
    pub lo: i64,
    pub hi: i64,
    pub h_dims: BTreeMap<i64, usize>,
    pub iota: BTreeMap<i64, SparseMatrix>,
    pub pi: BTreeMap<i64, SparseMatrix>,
    pub h: BTreeMap<i64, SparseMatrix>,
}

impl Contraction {
    pub fn h_dim(&self, p: i64) -> usize {
        self.h_dims.get(&p).copied().unwrap_or(0)
    }

    pub fn iota_at(&self, p: i64, cdim: usize) -> SparseMatrix {
        self.iota
            .get(&p)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zero(cdim, self.h_dim(p), self.field))
    }

    pub fn pi_at(&self, p: i64, cdim: usize) -> SparseMatrix {
        self.pi
            .get(&p)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zero(self.h_dim(p), cdim, self.field))
    }

    pub fn h_at(&self, p: i64, cdim: usize, cdim_below: usize) -> SparseMatrix {
        self.h
            .get(&p)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zero(cdim_below, cdim, self.field))
    }

    /// Verifies every contraction identity exactly against `complex`.
    pub fn verify(&self, complex: &Complex) -> Result<()> {
        for p in self.lo..=self.hi {
            let n = complex.dim(p);
            let below = complex.dim(p - 1);
            let iota = self.iota_at(p, n);
            let pi = self.pi_at(p, n);
            let h = self.h_at(p, n, below);
            let h_above = self.h_at(p + 1, complex.dim(p + 1), n);
            let d = complex.diff(p);
            let d_below = complex.diff(p - 1);

            let pi_iota = pi.mul(&iota);
            if pi_iota != SparseMatrix::identity(self.h_dim(p), self.field) {
                return Err(Error::check(format!("pi . iota != id in degree {p}")));
            }
            // iota . pi = id - d h - h d
            let lhs = iota.mul(&pi);
            let rhs = SparseMatrix::identity(n, self.field)
                .sub(&d_below.mul(&h))
                .sub(&h_above.mul(&d));
            if lhs != rhs {
                return Err(Error::check(format!(
                    "iota . pi != id - dh - hd in degree {p}"
                )));
            }
            if !h.mul(&iota).is_zero() {
                return Err(Error::check(format!("h . iota != 0 in degree {p}")));
            }
            if !pi.mul(&h_above).is_zero() {
                return Err(Error::check(format!("pi . h != 0 in degree {p}")));
            }
            if !h.mul(&h_above).is_zero() {
                return Err(Error::check(format!("h . h != 0 in degree {p}")));
            }
            // The homotopy must vanish on the chosen representatives and the
            // representatives must be cocycles.
            if !d.mul(&iota).is_zero() {
                return Err(Error::check(format!(
                    "chosen representatives are not cocycles in degree {p}"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of [`cohomology_with_contraction`]: cohomology dimensions, the
/// contraction, and for each requested seed the position of its class in the
/// cohomology basis (or `None` when the seed was a coboundary).
pub struct CohomologyData {
    pub dims: BTreeMap<i64, usize>,
    pub contraction: Contraction,
    pub seed_positions: Vec<Option<usize>>,
}

/// Computes cohomology together with an exact contraction.
///
/// `seeds` are cocycles that should be used as the first representatives in
/// their degree (the transfer pipeline passes identity endomorphisms here so
/// that the transferred structure is strictly unital on the nose). A seed
/// that is not a cocycle is an error; a seed that is a coboundary is skipped
/// and reported through `seed_positions`.
pub fn cohomology_with_contraction(
    complex: &Complex,
    seeds: &[(i64, SparseVec)],
) -> Result<CohomologyData> {
    complex.check_dd_zero()?;
    let field = complex.field();
    let (lo, hi) = complex.window();

    let mut h_dims = BTreeMap::new();
    let mut iota = BTreeMap::new();
    let mut pi = BTreeMap::new();
    let mut h = BTreeMap::new();
    let mut seed_positions: Vec<Option<usize>> = vec![None; seeds.len()];

    for p in lo..=hi {
        let n = complex.dim(p);
        if n == 0 {
            continue;
        }
        let d = complex.diff(p);
        let d_below = complex.diff(p - 1);

        // Coboundary basis: images of the pivot columns of the incoming
        // differential; those pivot columns span the complement L one degree
        // down and are the homotopy's preimages.
        let pivots_below = rref(&d_below).pivots;
        let boundary_basis: Vec<SparseVec> =
            pivots_below.iter().map(|c| d_below.column(*c)).collect();

        // Extend coboundaries to a basis of the cocycles: seeds first, then
        // kernel vectors in their canonical order.
        let mut span = SpanBuilder::new(n, field);
        for b in &boundary_basis {
            let grew = span.insert(b);
            debug_assert!(grew, "coboundary basis vectors must be independent");
        }
        let n_bound = span.rank();
        let mut reps: Vec<SparseVec> = Vec::new();
        for (k, (deg, v)) in seeds.iter().enumerate() {
            if *deg != p {
                continue;
            }
            if !d.apply(v).is_zero() {
                return Err(Error::input(format!(
                    "seed representative in degree {p} is not a cocycle"
                )));
            }
            if span.insert(v) {
                seed_positions[k] = Some(reps.len());
                reps.push(v.clone());
            }
        }
        for v in kernel_basis(&d) {
            if span.insert(&v) {
                reps.push(v);
            }
        }
        let h_dim = reps.len();

        // Complement of the cocycles: standard basis vectors at the pivot
        // columns of the outgoing differential.
        let pivots_here = rref(&d).pivots;
        let l_basis: Vec<SparseVec> =
            pivots_here.iter().map(|c| SparseVec::unit(*c, field)).collect();

        // Full basis [B | H | L] of C^p and its inverse coordinate map.
        let mut full = Vec::new();
        full.extend(boundary_basis.iter().cloned());
        full.extend(reps.iter().cloned());
        full.extend(l_basis.iter().cloned());
        if full.len() != n {
            return Err(Error::internal(format!(
                "splitting of degree {p} has size {} != {}",
                full.len(),
                n
            )));
        }
        let basis_matrix = SparseMatrix::from_columns(n, field, &full);
        let coords = invert(&basis_matrix)
            .ok_or_else(|| Error::internal(format!("degenerate splitting in degree {p}")))?;

        if h_dim > 0 {
            iota.insert(p, SparseMatrix::from_columns(n, field, &reps));
            let mut pi_p = SparseMatrix::zero(h_dim, n, field);
            for r in 0..h_dim {
                for c in 0..n {
                    let v = coords.get(n_bound + r, c);
                    if !v.is_zero() {
                        pi_p.set(r, c, v);
                    }
                }
            }
            pi.insert(p, pi_p);
            h_dims.insert(p, h_dim);
        }

        // Homotopy out of degree p: boundary coordinates composed with the
        // recorded preimages in degree p-1.
        if !pivots_below.is_empty() {
            let below = complex.dim(p - 1);
            let mut h_p = SparseMatrix::zero(below, n, field);
            for (k, pre_col) in pivots_below.iter().enumerate() {
                for c in 0..n {
                    let v = coords.get(k, c);
                    if !v.is_zero() {
                        h_p.set(*pre_col, c, v);
                    }
                }
            }
            h.insert(p, h_p);
        }
    }

    let contraction = Contraction { field, lo, hi, h_dims: h_dims.clone(), iota, pi, h };
    contraction.verify(complex)?;
    Ok(CohomologyData { dims: h_dims, contraction, seed_positions })
}

/// Cohomology dimensions only.
pub fn cohomology_dims(complex: &Complex) -> Result<BTreeMap<i64, usize>> {
    Ok(cohomology_with_contraction(complex, &[])?.dims)
}

/// Exact inverse of a square matrix, `None` if singular.
pub fn invert(m: &SparseMatrix) -> Option<SparseMatrix> {
    assert_eq!(m.rows, m.cols);
    let r = rref(m);
    if r.pivots.len() != m.rows {
        return None;
    }
    Some(r.transform)
}

/// Deterministic preimage under a matrix, `None` when `b` is outside the
/// image.
pub fn preimage(m: &SparseMatrix, b: &SparseVec) -> Option<SparseVec> {
    solve(m, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex_from(
        field: Field,
        lo: i64,
        hi: i64,
        dims: &[(i64, usize)],
        diffs: Vec<(i64, SparseMatrix)>,
    ) -> Complex {
        Complex::new(
            field,
            lo,
            hi,
            dims.iter().copied().collect(),
            diffs.into_iter().collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_stalk_has_identity_contraction() {
        let f = Field::Rational;
        let c = complex_from(f, 0, 0, &[(0, 1)], vec![]);
        let data = cohomology_with_contraction(&c, &[]).unwrap();
        assert_eq!(data.dims.get(&0), Some(&1));
        assert!(data.contraction.h.is_empty());
    }

    #[test]
    fn contractible_complex_has_no_cohomology() {
        let f = Field::Rational;
        let d = SparseMatrix::identity(1, f);
        let c = complex_from(f, 0, 1, &[(0, 1), (1, 1)], vec![(0, d)]);
        let data = cohomology_with_contraction(&c, &[]).unwrap();
        assert!(data.dims.is_empty());
        // h inverts d on the image.
        let h = data.contraction.h_at(1, 1, 1);
        assert!(h.get(0, 0).is_one());
    }

    #[test]
    fn dd_nonzero_is_reported() {
        let f = Field::Rational;
        let d0 = SparseMatrix::identity(1, f);
        let d1 = SparseMatrix::identity(1, f);
        let c = complex_from(f, 0, 2, &[(0, 1), (1, 1), (2, 1)], vec![(0, d0), (1, d1)]);
        assert!(cohomology_with_contraction(&c, &[]).is_err());
    }

    #[test]
    fn two_term_complex_with_rank_one_differential() {
        // 0 -> k^2 --[1 1]--> k -> 0: H^0 = ker = k, H^1 = 0.
        let f = Field::Rational;
        let d = SparseMatrix::from_entries(1, 2, f, [(0, 0, f.one()), (0, 1, f.one())]).unwrap();
        let c = complex_from(f, 0, 1, &[(0, 2), (1, 1)], vec![(0, d)]);
        let data = cohomology_with_contraction(&c, &[]).unwrap();
        assert_eq!(data.dims.get(&0), Some(&1));
        assert_eq!(data.dims.get(&1), None);
    }

    #[test]
    fn seeded_representative_is_used() {
        // Zero differential on k^2 in degree 0; seed picks a specific line.
        let f = Field::Rational;
        let c = complex_from(f, 0, 0, &[(0, 2)], vec![]);
        let mut seed = SparseVec::new();
        seed.set(0, f.one());
        seed.set(1, f.one());
        let data = cohomology_with_contraction(&c, &[(0, seed.clone())]).unwrap();
        assert_eq!(data.seed_positions, vec![Some(0)]);
        let iota = data.contraction.iota_at(0, 2);
        assert_eq!(iota.column(0), seed);
    }
}
