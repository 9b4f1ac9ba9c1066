//! Projective complexes and resolutions.
//!
//! A bounded complex of projectives is stored structurally: each term is a
//! list of indecomposable summands `P_v` and each differential a matrix of
//! path-algebra elements, entry `(r, c)` in `e_{v_r} A e_{v_c}` acting by
//! left multiplication. Arbitrary bounded complexes of representations are
//! resolved by induction on the number of nonzero terms, taking the mapping
//! cone of a strictly lifted comparison map between resolutions; with every
//! resolution built down to a common bottom degree `B`, the lifts exist on
//! the nose and the cohomology is certified in degrees `>= B + 2`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactla::{kernel_basis, solve, SparseMatrix, SparseVec, SpanBuilder};
use crate::graded::LinComb;

use super::presentation::PathAlgebra;
use super::rep::{projective_rep, ComplexOfReps, Representation};

/// A matrix of path-algebra elements: entry `(r, c)` lies in
/// `e_{rows[r]} A e_{cols[c]}` and represents the morphism
/// `P_{cols[c]} -> P_{rows[r]}` of left multiplication.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathMatrix {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    entries: BTreeMap<(usize, usize), LinComb>,
}

impl PathMatrix {
    pub fn zero(rows: Vec<usize>, cols: Vec<usize>) -> PathMatrix {
        PathMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn set(&mut self, r: usize, c: usize, value: LinComb) {
        assert!(r < self.rows.len() && c < self.cols.len());
        if value.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), value);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> LinComb {
        self.entries.get(&(r, c)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &LinComb)> {
        self.entries.iter().map(|((r, c), v)| (*r, *c, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn neg(&self, alg: &PathAlgebra) -> PathMatrix {
        let minus = alg.field().one().neg();
        let mut out = PathMatrix::zero(self.rows.clone(), self.cols.clone());
        for (r, c, v) in self.entries() {
            out.set(r, c, v.scaled(&minus));
        }
        out
    }

    /// Matrix product in the path algebra: `(self . other)[r][c] =
    /// sum_m self[r][m] * other[m][c]`.
    pub fn mul(&self, alg: &PathAlgebra, other: &PathMatrix) -> Result<PathMatrix> {
        assert_eq!(self.cols, other.rows, "path matrix shape mismatch");
        let mut out = PathMatrix::zero(self.rows.clone(), other.cols.clone());
        for (r, m, x) in self.entries() {
            for c in 0..other.cols.len() {
                let y = other.get(m, c);
                if y.is_zero() {
                    continue;
                }
                let mut cur = out.get(r, c);
                cur.add(&alg.multiply_combs(x, &y)?);
                out.set(r, c, cur);
            }
        }
        Ok(out)
    }
}

/// A bounded complex of finite direct sums of indecomposable projectives,
/// with a record of the degree above which its cohomology is certified.
#[derive(Clone, Debug, Default)]
pub struct ProjComplex {
    /// Summand vertices per degree; absent degrees are zero.
    pub terms: BTreeMap<i64, Vec<usize>>,
    /// `diffs[p] : terms[p] -> terms[p+1]`.
    pub diffs: BTreeMap<i64, PathMatrix>,
    /// Cohomology agrees with the resolved complex in degrees `>= valid_above`.
    pub valid_above: i64,
}

impl ProjComplex {
    pub fn summands(&self, p: i64) -> &[usize] {
        self.terms.get(&p).map_or(&[], |v| v.as_slice())
    }

    pub fn diff(&self, p: i64) -> PathMatrix {
        self.diffs.get(&p).cloned().unwrap_or_else(|| {
            PathMatrix::zero(self.summands(p + 1).to_vec(), self.summands(p).to_vec())
        })
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.terms.iter().filter(|(_, s)| !s.is_empty()).map(|(p, _)| *p).collect()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.degrees().first().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.degrees().last().copied()
    }

    /// Checks `d . d = 0` in the path algebra.
    pub fn check_dd(&self, alg: &PathAlgebra) -> Result<()> {
        for p in self.diffs.keys() {
            let dd = self.diff(p + 1).mul(alg, &self.diff(*p))?;
            if !dd.is_zero() {
                return Err(Error::internal(format!(
                    "projective complex differential fails d.d = 0 at degree {p}"
                )));
            }
        }
        Ok(())
    }
}

/// Coordinate bookkeeping for the expansion of a projective term: the fibre
/// at vertex `w` is the concatenation over summands `s` of the basis paths
/// `e_{v_s} A e_w`.
#[derive(Clone, Debug)]
pub struct TermExpansion {
    /// Per vertex: the list of (summand index, algebra basis index).
    pub coords: Vec<Vec<(usize, usize)>>,
}

impl TermExpansion {
    pub fn new(alg: &PathAlgebra, summands: &[usize]) -> TermExpansion {
        let mut coords = vec![Vec::new(); alg.vertices()];
        for (s, v) in summands.iter().enumerate() {
            for w in 0..alg.vertices() {
                for b in alg.block(*v, w) {
                    coords[w].push((s, b));
                }
            }
        }
        // Canonical order: by summand, then by basis path within the block;
        // the enumeration above is per summand already, so sort stably by
        // summand index to interleave consistently.
        for w in 0..alg.vertices() {
            coords[w].sort();
        }
        TermExpansion { coords }
    }

    pub fn dim(&self, w: usize) -> usize {
        self.coords[w].len()
    }

    /// Position of (summand, basis path) in the fibre at `w`.
    pub fn position(&self, w: usize, summand: usize, basis: usize) -> Option<usize> {
        self.coords[w].iter().position(|x| *x == (summand, basis))
    }

    /// Expands a path-matrix column (images of one generator at `vertex`)
    /// into a fibre vector.
    pub fn column_vector(
        &self,
        pm: &PathMatrix,
        col: usize,
        vertex: usize,
    ) -> SparseVec {
        let mut v = SparseVec::new();
        for r in 0..pm.rows.len() {
            let value = pm.get(r, col);
            for (b, c) in value.iter() {
                let pos = self
                    .position(vertex, r, b)
                    .expect("path matrix entry outside the expansion");
                v.set(pos, c.clone());
            }
        }
        v
    }

    /// Decomposes a fibre vector at `vertex` into path-matrix column
    /// entries: summand -> combination.
    pub fn vector_to_column(&self, v: &SparseVec, vertex: usize) -> BTreeMap<usize, LinComb> {
        let mut out: BTreeMap<usize, LinComb> = BTreeMap::new();
        for (pos, c) in v.iter() {
            let (s, b) = self.coords[vertex][pos];
            out.entry(s).or_default().add_term(b, c.clone());
        }
        out
    }
}

/// A projective complex together with its expansion to representations and
/// a termwise surjective quasi-isomorphism onto a target complex.
#[derive(Clone, Debug)]
pub struct ResolvedComplex {
    pub proj: ProjComplex,
    pub expanded: ComplexOfReps,
    pub expansions: BTreeMap<i64, TermExpansion>,
    /// `pi[p][v]` maps the expanded fibre onto the target fibre.
    pub pi: BTreeMap<i64, Vec<SparseMatrix>>,
    pub target: ComplexOfReps,
}

/// Expands a projective complex into an honest complex of representations.
pub fn expand_proj(
    alg: &PathAlgebra,
    proj: &ProjComplex,
) -> Result<(ComplexOfReps, BTreeMap<i64, TermExpansion>)> {
    let mut terms = BTreeMap::new();
    let mut expansions = BTreeMap::new();
    let projectives: Vec<Representation> = (0..alg.vertices())
        .map(|v| projective_rep(alg, v).0)
        .collect();
    for (p, summands) in &proj.terms {
        if summands.is_empty() {
            continue;
        }
        let exp = TermExpansion::new(alg, summands);
        let dims: Vec<usize> = (0..alg.vertices()).map(|w| exp.dim(w)).collect();
        let mut matrices = Vec::new();
        for (ai, a) in alg.pres.arrows.iter().enumerate() {
            let mut m =
                SparseMatrix::zero(dims[a.source], dims[a.target], alg.field());
            for (col, (s, b)) in exp.coords[a.target].iter().enumerate() {
                // Action within the summand P_{v_s}.
                let v_s = summands[*s];
                let blocks: Vec<usize> = alg.block(v_s, a.target);
                let local_col = blocks.iter().position(|x| x == b).unwrap();
                let local = &projectives[v_s].matrices[ai];
                let src_blocks = alg.block(v_s, a.source);
                for (local_row, bb) in src_blocks.iter().enumerate() {
                    let c = local.get(local_row, local_col);
                    if !c.is_zero() {
                        let row = exp.position(a.source, *s, *bb).unwrap();
                        m.set(row, col, c);
                    }
                }
            }
            matrices.push(m);
        }
        terms.insert(*p, Representation { dims, matrices });
        expansions.insert(*p, exp);
    }
    let mut diffs = BTreeMap::new();
    for (p, pm) in &proj.diffs {
        let exp_from = match expansions.get(p) {
            Some(e) => e,
            None => continue,
        };
        let zero_exp = TermExpansion { coords: vec![Vec::new(); alg.vertices()] };
        let exp_to = expansions.get(&(p + 1)).unwrap_or(&zero_exp);
        let mut per_vertex = Vec::new();
        for w in 0..alg.vertices() {
            let mut m = SparseMatrix::zero(exp_to.dim(w), exp_from.dim(w), alg.field());
            for (col, (s, b)) in exp_from.coords[w].iter().enumerate() {
                // d(gen_s . path_b) = d(gen_s) . path_b.
                for r in 0..pm.rows.len() {
                    let x = pm.get(r, *s);
                    if x.is_zero() {
                        continue;
                    }
                    // x in e_{v_r} A e_{v_s}, path_b in e_{v_s} A e_w.
                    let prod = alg.multiply_combs(&x, &LinComb::single(*b, alg.field().one()))?;
                    for (bb, c) in prod.iter() {
                        let row = exp_to
                            .position(w, r, bb)
                            .ok_or_else(|| Error::internal("expansion position missing"))?;
                        let cur = m.get(row, col).add(c);
                        m.set(row, col, cur);
                    }
                }
            }
            per_vertex.push(m);
        }
        diffs.insert(*p, per_vertex);
    }
    let complex = ComplexOfReps { terms, diffs };
    complex.validate(alg)?;
    Ok((complex, expansions))
}

/// Deterministic top generators of a representation: vectors extending a
/// basis of the radical part `M J` to `M`, per vertex.
fn top_generators(alg: &PathAlgebra, rep: &Representation) -> Vec<Vec<SparseVec>> {
    let mut gens = vec![Vec::new(); alg.vertices()];
    for v in 0..alg.vertices() {
        let mut span = SpanBuilder::new(rep.dims[v], alg.field());
        // Radical part at v: images of arrow actions into the fibre at v.
        for (ai, a) in alg.pres.arrows.iter().enumerate() {
            if a.source != v {
                continue;
            }
            for col in rep.matrices[ai].columns() {
                span.insert(&col);
            }
        }
        for i in 0..rep.dims[v] {
            let e = SparseVec::unit(i, alg.field());
            if span.insert(&e) {
                gens[v].push(e);
            }
        }
    }
    gens
}

/// Minimal projective resolution of a module, placed so that the cover sits
/// in cohomological degree `top` and terms continue down to `bottom`:
/// `P^bottom -> ... -> P^top ->> M`.
pub fn resolve_module(
    alg: &PathAlgebra,
    rep: &Representation,
    top: i64,
    bottom: i64,
) -> Result<ResolvedComplex> {
    rep.validate(alg)?;
    let target = ComplexOfReps::stalk(rep.clone(), top);
    let mut proj = ProjComplex { valid_above: bottom + 2, ..Default::default() };
    let mut pi: BTreeMap<i64, Vec<SparseMatrix>> = BTreeMap::new();

    // Current module to cover, starting with M itself; `inclusion` embeds it
    // into the expanded previous term (empty for the first step).
    let mut current = rep.clone();
    let mut inclusion: Option<(Vec<SparseMatrix>, TermExpansion, Vec<usize>)> = None;
    let mut degree = top;
    while degree >= bottom {
        if current.total_dim() == 0 {
            break;
        }
        let gens = top_generators(alg, &current);
        let mut summands = Vec::new();
        let mut gen_list: Vec<(usize, SparseVec)> = Vec::new();
        for (v, gs) in gens.iter().enumerate() {
            for g in gs {
                summands.push(v);
                gen_list.push((v, g.clone()));
            }
        }
        let exp = TermExpansion::new(alg, &summands);
        // Cover map: per vertex, columns indexed by (summand, path).
        let mut cover: Vec<SparseMatrix> = Vec::new();
        for w in 0..alg.vertices() {
            let mut m =
                SparseMatrix::zero(current.dims[w], exp.dim(w), alg.field());
            for (col, (s, b)) in exp.coords[w].iter().enumerate() {
                let (v, g) = &gen_list[*s];
                let p = &alg.basis[*b];
                debug_assert_eq!(p.target, *v);
                let action = current.path_action(alg, p);
                let img = action.apply(g);
                m.set_column(col, &img);
            }
            cover.push(m);
        }
        // Record the summands, the projection (top step only) or the
        // differential through the previous inclusion.
        proj.terms.insert(degree, summands.clone());
        match &inclusion {
            None => {
                pi.insert(degree, cover.clone());
            }
            Some((incl, prev_exp, prev_summands)) => {
                // d: new term -> previous term; entry per (previous summand,
                // new summand): decompose iota(cover(gen)) over the previous
                // expansion.
                let mut pm = PathMatrix::zero(prev_summands.clone(), summands.clone());
                for (s, (v, _)) in gen_list.iter().enumerate() {
                    // Image of the generator in the previous expanded term.
                    let col_in_exp = exp.position(*v, s, alg.unit_paths[*v]).unwrap();
                    let img = cover[*v].column(col_in_exp);
                    let emb = incl[*v].apply(&img);
                    for (row_s, value) in prev_exp.vector_to_column(&emb, *v) {
                        let mut cur = pm.get(row_s, s);
                        cur.add(&value);
                        pm.set(row_s, s, cur);
                    }
                }
                proj.diffs.insert(degree, pm);
            }
        }
        // Kernel of the cover becomes the next module, with its inclusion
        // into the current expanded term.
        let mut kdims = vec![0usize; alg.vertices()];
        let mut kbases: Vec<Vec<SparseVec>> = Vec::new();
        for w in 0..alg.vertices() {
            let kb = kernel_basis(&cover[w]);
            kdims[w] = kb.len();
            kbases.push(kb);
        }
        if kdims.iter().all(|d| *d == 0) {
            break;
        }
        // Arrow actions on the kernel: solve within the kernel basis.
        let mut kmatrices = Vec::new();
        let exp_rep = {
            // Expanded representation of the new projective term.
            let (c, _) = expand_proj(
                alg,
                &ProjComplex {
                    terms: [(0i64, summands.clone())].into_iter().collect(),
                    diffs: BTreeMap::new(),
                    valid_above: 0,
                },
            )?;
            c.terms.get(&0).cloned().unwrap_or_else(|| Representation::zero(alg))
        };
        for (_ai, a) in alg.pres.arrows.iter().enumerate() {
            let mut m = SparseMatrix::zero(kdims[a.source], kdims[a.target], alg.field());
            let kb_src =
                SparseMatrix::from_columns(exp_rep.dims[a.source], alg.field(), &kbases[a.source]);
            for (col, kv) in kbases[a.target].iter().enumerate() {
                let img = exp_rep.matrices[_ai].apply(kv);
                if img.is_zero() {
                    continue;
                }
                let sol = solve(&kb_src, &img).ok_or_else(|| {
                    Error::internal("kernel is not closed under the arrow action")
                })?;
                m.set_column(col, &sol);
            }
            kmatrices.push(m);
        }
        let kernel_rep = Representation { dims: kdims, matrices: kmatrices };
        let incl: Vec<SparseMatrix> = (0..alg.vertices())
            .map(|w| SparseMatrix::from_columns(exp_rep.dims[w], alg.field(), &kbases[w]))
            .collect();
        inclusion = Some((incl, exp, summands));
        current = kernel_rep;
        degree -= 1;
    }

    proj.check_dd(alg)?;
    let (expanded, expansions) = expand_proj(alg, &proj)?;
    // Fill missing projection degrees with zero maps.
    let mut pi_full = BTreeMap::new();
    for p in proj.terms.keys() {
        let per: Vec<SparseMatrix> = match pi.get(p) {
            Some(ms) => ms.clone(),
            None => (0..alg.vertices())
                .map(|w| {
                    SparseMatrix::zero(
                        target.dim(*p, w),
                        expansions.get(p).map_or(0, |e| e.dim(w)),
                        alg.field(),
                    )
                })
                .collect(),
        };
        pi_full.insert(*p, per);
    }
    Ok(ResolvedComplex { proj, expanded, expansions, pi: pi_full, target })
}

/// Resolves a bounded complex of representations by a complex of
/// projectives, by induction on the number of nonzero terms via mapping
/// cones of strictly lifted comparison maps.
pub fn resolve_complex(
    alg: &PathAlgebra,
    x: &ComplexOfReps,
    bottom: i64,
) -> Result<ResolvedComplex> {
    x.validate(alg)?;
    let degrees = x.degrees();
    let Some(&a) = degrees.first() else {
        return Ok(ResolvedComplex {
            proj: ProjComplex { valid_above: bottom + 2, ..Default::default() },
            expanded: ComplexOfReps::default(),
            expansions: BTreeMap::new(),
            pi: BTreeMap::new(),
            target: x.clone(),
        });
    };
    if degrees.len() == 1 {
        let mut r = resolve_module(alg, x.terms.get(&a).unwrap(), a, bottom)?;
        r.target = x.clone();
        return Ok(r);
    }
    // Split off the lowest term: X is the cone of
    // f : stalk(X^a)[-1] -> brutal_{>= a+1}(X) given by d^a.
    let rest = x.brutal_above(a + 1);
    let q = resolve_complex(alg, &rest, bottom)?;
    let r = resolve_module(alg, x.terms.get(&a).unwrap(), a + 1, bottom)?;
    // psi = f . pi_R, nonzero only in degree a+1.
    // Lift phi : R -> Q with pi_Q . phi = psi and d_Q . phi = phi . d_R,
    // descending from the top.
    let mut phi: BTreeMap<i64, PathMatrix> = BTreeMap::new();
    let r_degrees: Vec<i64> = r.proj.terms.keys().copied().collect();
    for &p in r_degrees.iter().rev() {
        let r_summands = r.proj.summands(p).to_vec();
        let q_summands = q.proj.summands(p).to_vec();
        let mut pm = PathMatrix::zero(q_summands.clone(), r_summands.clone());
        let q_exp = q.expansions.get(&p);
        let zero_exp = TermExpansion { coords: vec![Vec::new(); alg.vertices()] };
        let q_exp = q_exp.unwrap_or(&zero_exp);
        let q_exp_next = q.expansions.get(&(p + 1)).unwrap_or(&zero_exp);
        // phi^{p+1} . d_R^p as a path matrix (zero when either is missing).
        let phi_next = phi.get(&(p + 1)).cloned().unwrap_or_else(|| {
            PathMatrix::zero(q.proj.summands(p + 1).to_vec(), r.proj.summands(p + 1).to_vec())
        });
        let phi_d = phi_next.mul(alg, &r.proj.diff(p))?;
        let r_exp = r.expansions.get(&p).unwrap();
        for (s, v) in r_summands.iter().enumerate() {
            // Conditions on the image y of the generator of summand s:
            //   pi_Q^p(y) = psi^p(gen), d_Q^p(y) = (phi^{p+1} d_R)(gen).
            let psi_vec: SparseVec = if p == a + 1 {
                // d^a applied to pi_R of the generator.
                let gen_pos = r_exp.position(*v, s, alg.unit_paths[*v]).unwrap();
                let pr = r.pi.get(&p).map(|ms| ms[*v].clone()).unwrap_or_else(|| {
                    SparseMatrix::zero(0, r_exp.dim(*v), alg.field())
                });
                let in_target = pr.column(gen_pos);
                x.diff_at(alg, a, *v).apply(&in_target)
            } else {
                SparseVec::new()
            };
            let d_vec = q_exp_next.column_vector(&phi_d, s, *v);
            // Stack [pi_Q; d_Q] at vertex v.
            let pi_q = q
                .pi
                .get(&p)
                .map(|ms| ms[*v].clone())
                .unwrap_or_else(|| SparseMatrix::zero(rest.dim(p, *v), q_exp.dim(*v), alg.field()));
            let d_q = q
                .expanded
                .diff_at(alg, p, *v);
            let rows_top = pi_q.rows;
            let mut stacked =
                SparseMatrix::zero(rows_top + d_q.rows, q_exp.dim(*v), alg.field());
            for (rr, cc, val) in pi_q.entries() {
                stacked.set(rr, cc, val.clone());
            }
            for (rr, cc, val) in d_q.entries() {
                stacked.set(rows_top + rr, cc, val.clone());
            }
            let mut rhs = SparseVec::new();
            for (i, c) in psi_vec.iter() {
                rhs.set(i, c.clone());
            }
            for (i, c) in d_vec.iter() {
                rhs.set(rows_top + i, c.clone());
            }
            let y = solve(&stacked, &rhs).ok_or_else(|| {
                Error::internal(format!(
                    "comparison lift is inconsistent at degree {p}; resolution depth too small"
                ))
            })?;
            for (row_s, value) in q_exp.vector_to_column(&y, *v) {
                pm.set(row_s, s, value);
            }
        }
        if !pm.is_zero() {
            phi.insert(p, pm);
        }
    }
    // Cone: C^p = R^{p+1} ++ Q^p with differential
    // [ -d_R, 0 ; phi^{p+1}, d_Q ].
    let mut cone = ProjComplex { valid_above: bottom + 2, ..Default::default() };
    let mut all_degrees: Vec<i64> = Vec::new();
    for p in r.proj.terms.keys() {
        all_degrees.push(p - 1);
    }
    for p in q.proj.terms.keys() {
        all_degrees.push(*p);
    }
    all_degrees.sort();
    all_degrees.dedup();
    for &p in &all_degrees {
        let mut summands: Vec<usize> = r.proj.summands(p + 1).to_vec();
        summands.extend_from_slice(q.proj.summands(p));
        if !summands.is_empty() {
            cone.terms.insert(p, summands);
        }
    }
    for &p in &all_degrees {
        let rows: Vec<usize> = cone.summands(p + 1).to_vec();
        let cols: Vec<usize> = cone.summands(p).to_vec();
        if rows.is_empty() || cols.is_empty() {
            continue;
        }
        let r_cols = r.proj.summands(p + 1).len();
        let r_rows = r.proj.summands(p + 2).len();
        let mut pm = PathMatrix::zero(rows, cols);
        let d_r = r.proj.diff(p + 1).neg(alg);
        for (rr, cc, v) in d_r.entries() {
            pm.set(rr, cc, v.clone());
        }
        if let Some(f) = phi.get(&(p + 1)) {
            for (rr, cc, v) in f.entries() {
                pm.set(r_rows + rr, cc, v.clone());
            }
        }
        let d_q = q.proj.diff(p);
        for (rr, cc, v) in d_q.entries() {
            pm.set(r_rows + rr, r_cols + cc, v.clone());
        }
        if !pm.is_zero() {
            cone.diffs.insert(p, pm);
        }
    }
    cone.check_dd(alg)?;
    let (expanded, expansions) = expand_proj(alg, &cone)?;
    // Projection onto X: R-part covers X^a at degree a, Q-part covers the
    // rest.
    let mut pi: BTreeMap<i64, Vec<SparseMatrix>> = BTreeMap::new();
    for &p in &all_degrees {
        if !cone.terms.contains_key(&p) {
            continue;
        }
        let exp = expansions.get(&p).unwrap();
        let mut per = Vec::new();
        for w in 0..alg.vertices() {
            let mut m = SparseMatrix::zero(x.dim(p, w), exp.dim(w), alg.field());
            let r_summand_count = r.proj.summands(p + 1).len();
            let r_exp = r.expansions.get(&(p + 1));
            let q_exp = q.expansions.get(&p);
            for (col, (s, b)) in exp.coords[w].iter().enumerate() {
                if *s < r_summand_count {
                    // pi_R^{p+1}, landing in X^a when p = a.
                    if p != a {
                        continue;
                    }
                    let (Some(r_exp), Some(pr)) = (r_exp, r.pi.get(&(p + 1))) else {
                        continue;
                    };
                    let pos = r_exp.position(w, *s, *b).unwrap();
                    let img = pr[w].column(pos);
                    m.set_column(col, &img);
                } else {
                    let (Some(q_exp), Some(pq)) = (q_exp, q.pi.get(&p)) else {
                        continue;
                    };
                    let pos = q_exp.position(w, *s - r_summand_count, *b).unwrap();
                    let img = pq[w].column(pos);
                    m.set_column(col, &img);
                }
            }
            per.push(m);
        }
        pi.insert(p, per);
    }
    Ok(ResolvedComplex { proj: cone, expanded, expansions, pi, target: x.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{cohomology_dims, Complex, Field};
    use crate::fixtures;
    use crate::quivalg::presentation::path_basis;
    use crate::quivalg::rep::injective_rep;

    /// Cohomology dimensions of an expanded complex at one vertex.
    fn vertex_cohomology(
        alg: &PathAlgebra,
        c: &ComplexOfReps,
        v: usize,
        lo: i64,
        hi: i64,
    ) -> BTreeMap<i64, usize> {
        let mut dims = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for p in lo..=hi {
            let d = c.dim(p, v);
            if d > 0 {
                dims.insert(p, d);
            }
            let m = c.diff_at(alg, p, v);
            if !m.is_zero() {
                diffs.insert(p, m);
            }
        }
        let complex = Complex::new(alg.field(), lo, hi + 1, dims, diffs).unwrap();
        cohomology_dims(&complex).unwrap()
    }

    #[test]
    fn resolution_of_simple_over_two_cycle_is_periodic() {
        let alg = path_basis(&fixtures::radical_square_zero_two_cycle(Field::Rational)).unwrap();
        let s1 = Representation::simple(&alg, 0);
        let res = resolve_module(&alg, &s1, 0, -6).unwrap();
        // Betti numbers all 1, alternating vertices 1, 2, 1, 2, ...
        for p in -6..=0 {
            let s = res.proj.summands(p);
            assert_eq!(s.len(), 1, "degree {p}");
            let expect = if (-p) % 2 == 0 { 0 } else { 1 };
            assert_eq!(s[0], expect, "degree {p}");
        }
        // Exactness: away from 0 the expanded complex is exact above the
        // certified bottom; at 0 the cohomology is S1.
        for v in 0..2 {
            let h = vertex_cohomology(&alg, &res.expanded, v, -6, 0);
            for p in res.proj.valid_above..0 {
                assert_eq!(h.get(&p), None, "vertex {v} degree {p}");
            }
            let expect = if v == 0 { Some(&1usize) } else { None };
            assert_eq!(h.get(&0), expect);
        }
    }

    #[test]
    fn resolution_of_projective_is_the_projective() {
        let alg = path_basis(&fixtures::radical_square_zero_two_cycle(Field::Rational)).unwrap();
        let (p1, _) = projective_rep(&alg, 0);
        let res = resolve_module(&alg, &p1, 0, -6).unwrap();
        assert_eq!(res.proj.degrees(), vec![0]);
        assert_eq!(res.proj.summands(0), &[0]);
    }

    #[test]
    fn resolution_over_dual_numbers() {
        let alg = path_basis(&fixtures::dual_numbers(Field::Rational)).unwrap();
        let s = Representation::simple(&alg, 0);
        let res = resolve_module(&alg, &s, 0, -5).unwrap();
        for p in -5..=0 {
            assert_eq!(res.proj.summands(p), &[0], "degree {p}");
        }
    }

    #[test]
    fn resolving_a_two_term_complex_keeps_cohomology() {
        // Over the hereditary algebra 1 -> 2, resolve the two-term complex
        // I1 -> I2 (the canonical surjection onto the simple injective) and
        // compare cohomology with the original.
        let alg = path_basis(&fixtures::a2_quiver(Field::Rational)).unwrap();
        let (i1, _) = injective_rep(&alg, 0);
        let (i2, _) = injective_rep(&alg, 1);
        // I1 = D(A e1) has fibres (1, 1); I2 = D(A e2) is the simple at
        // vertex 2 with fibres (0, 1); the surjection lives at vertex 2.
        let m_v0 = SparseMatrix::zero(i2.dims[0], i1.dims[0], Field::Rational);
        let mut m_v1 = SparseMatrix::zero(i2.dims[1], i1.dims[1], Field::Rational);
        m_v1.set(0, 0, Field::Rational.one());
        let mut x = ComplexOfReps::default();
        x.terms.insert(-1, i1.clone());
        x.terms.insert(0, i2.clone());
        x.diffs.insert(-1, vec![m_v0, m_v1]);
        x.validate(&alg).unwrap();
        let res = resolve_complex(&alg, &x, -6).unwrap();
        res.proj.check_dd(&alg).unwrap();
        for v in 0..2 {
            let want = vertex_cohomology(&alg, &x, v, -7, 1);
            let got = vertex_cohomology(&alg, &res.expanded, v, -7, 1);
            for p in res.proj.valid_above..=1 {
                assert_eq!(want.get(&p), got.get(&p), "vertex {v} degree {p}");
            }
        }
    }

    #[test]
    fn resolving_a_shifted_simple() {
        let alg = path_basis(&fixtures::radical_square_zero_two_cycle(Field::Rational)).unwrap();
        let s1 = ComplexOfReps::stalk(Representation::simple(&alg, 0), 1);
        let res = resolve_complex(&alg, &s1, -5).unwrap();
        // Shifted resolution: top summand P1 in degree 1.
        assert_eq!(res.proj.summands(1), &[0]);
        assert_eq!(res.proj.summands(0), &[1]);
        for v in 0..2 {
            let h = vertex_cohomology(&alg, &res.expanded, v, -5, 1);
            let expect = if v == 0 { Some(&1usize) } else { None };
            assert_eq!(h.get(&1), expect);
            for p in res.proj.valid_above..1 {
                assert_eq!(h.get(&p), None);
            }
        }
    }
}
