//! The JSON input document and the serialized Ext-algebra format.
//!
//! Input documents are human-writable and diffable: scalars are decimal
//! strings (`"3/7"` is allowed over the rationals and means `3 * 7^{-1}` in
//! a prime field), vertices are one-based, paths are written in composition
//! order (`["a", "b"]` means apply `b` first, then `a`).
//!
//! Parsing is total: malformed documents produce errors, never panics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ainf::AInfAlgebra;
use crate::error::{Error, Result};
use crate::exactla::{Field, SparseMatrix};
use crate::graded::{BasisElement, GradedBimodule, IdempotentRing, LinComb, MultiLinearMap};
use crate::quivalg::{
    path_basis, projective_rep, AlgebraPresentation, Arrow, ComplexOfReps, PathAlgebra, PathTerm,
    Relation, Representation,
};

/// `"Q"` or `{"Fp": p}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum FieldSpec {
    Name(String),
    Prime {
        #[serde(rename = "Fp")]
        fp: u64,
    },
}

impl FieldSpec {
    pub fn to_field(&self) -> Result<Field> {
        match self {
            FieldSpec::Name(s) if s == "Q" => Ok(Field::Rational),
            FieldSpec::Name(s) => Err(Error::input(format!(
                "unknown field {s:?}; use \"Q\" or {{\"Fp\": p}}"
            ))),
            FieldSpec::Prime { fp } => Field::prime(*fp),
        }
    }

    pub fn from_field(f: Field) -> FieldSpec {
        match f {
            Field::Rational => FieldSpec::Name("Q".into()),
            Field::Prime(p) => FieldSpec::Prime { fp: p },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArrowDoc {
    pub name: String,
    pub from: usize,
    pub to: usize,
    #[serde(default)]
    pub degree: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuiverDoc {
    pub vertices: usize,
    #[serde(default)]
    pub arrows: Vec<ArrowDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathTermDoc {
    pub path: Vec<String>,
    #[serde(default = "one_string")]
    pub coeff: String,
}

fn one_string() -> String {
    "1".into()
}

/// A representation: dimension vector plus one dense matrix per arrow
/// (row-major, entries as scalar strings); missing arrows act by zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleDoc {
    pub dims: Vec<usize>,
    #[serde(default)]
    pub matrices: BTreeMap<String, Vec<Vec<String>>>,
}

/// A bounded complex: named module terms per degree and per-degree
/// differentials given as one dense matrix per vertex.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub terms: BTreeMap<String, String>,
    #[serde(default)]
    pub diffs: BTreeMap<String, Vec<Vec<Vec<String>>>>,
}

/// One member of the collection: a named complex, a named module placed as a
/// stalk, or a built-in simple or projective, optionally shifted.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CollectionEntry {
    Named(String),
    Builtin {
        #[serde(default)]
        simple: Option<usize>,
        #[serde(default)]
        projective: Option<usize>,
        #[serde(default)]
        module: Option<String>,
        /// Cohomological degree the stalk is placed in.
        #[serde(default)]
        shift: i64,
    },
}

/// The top-level input document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputDocument {
    pub field: FieldSpec,
    pub quiver: QuiverDoc,
    #[serde(default)]
    pub relations: Vec<Vec<PathTermDoc>>,
    /// Nilpotency bound for the arrow ideal; defaults to vertices + 1.
    #[serde(default)]
    pub nilpotency: Option<usize>,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleDoc>,
    #[serde(default)]
    pub complexes: BTreeMap<String, ComplexDoc>,
    #[serde(default)]
    pub collection: Vec<CollectionEntry>,
}

/// A fully validated input: the algebra with its path basis and the
/// collection as complexes of representations.
pub struct ValidatedInput {
    pub field: Field,
    pub presentation: AlgebraPresentation,
    pub algebra: PathAlgebra,
    pub modules: BTreeMap<String, Representation>,
    pub complexes: BTreeMap<String, ComplexOfReps>,
    pub collection: Vec<ComplexOfReps>,
    pub collection_names: Vec<String>,
}

pub fn parse_document(text: &str) -> Result<InputDocument> {
    serde_json::from_str(text).map_err(|e| Error::input(format!("invalid JSON input: {e}")))
}

/// Validates a parsed document: the quiver is well-formed, relations hold in
/// every module, differentials square to zero and commute with the action.
pub fn validate_document(doc: &InputDocument) -> Result<ValidatedInput> {
    let field = doc.field.to_field()?;
    let vertices = doc.quiver.vertices;
    if vertices == 0 || vertices > 64 {
        return Err(Error::input("vertex count must be between 1 and 64"));
    }
    let one_based = |v: usize, what: &str| -> Result<usize> {
        if v == 0 || v > vertices {
            Err(Error::input(format!("{what} vertex {v} out of range 1..{vertices}")))
        } else {
            Ok(v - 1)
        }
    };
    let mut arrows = Vec::new();
    for a in &doc.quiver.arrows {
        arrows.push(Arrow {
            name: a.name.clone(),
            source: one_based(a.from, &format!("arrow {}", a.name))?,
            target: one_based(a.to, &format!("arrow {}", a.name))?,
            degree: a.degree,
        });
    }
    let arrow_names: Vec<String> = arrows.iter().map(|a| a.name.clone()).collect();
    let arrow_index = move |name: &str| -> Result<usize> {
        arrow_names
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::input(format!("unknown arrow {name:?}")))
    };
    let mut relations = Vec::new();
    for rel in &doc.relations {
        let mut terms = Vec::new();
        for t in rel {
            let path: Vec<usize> =
                t.path.iter().map(|n| arrow_index(n)).collect::<Result<_>>()?;
            terms.push(PathTerm { arrows: path, coeff: field.parse(&t.coeff)? });
        }
        relations.push(Relation { terms });
    }
    let presentation = AlgebraPresentation {
        field,
        vertices,
        arrows,
        relations,
        nilpotency_bound: doc.nilpotency.unwrap_or(vertices + 1),
    };
    let algebra = path_basis(&presentation)?;

    let parse_matrix =
        |rows: usize, cols: usize, data: &[Vec<String>], what: &str| -> Result<SparseMatrix> {
            if data.len() != rows || data.iter().any(|r| r.len() != cols) {
                return Err(Error::input(format!(
                    "{what}: expected a {rows}x{cols} matrix, got {}x{}",
                    data.len(),
                    data.first().map_or(0, |r| r.len())
                )));
            }
            let mut m = SparseMatrix::zero(rows, cols, field);
            for (r, row) in data.iter().enumerate() {
                for (c, s) in row.iter().enumerate() {
                    let v = field.parse(s)?;
                    if !v.is_zero() {
                        m.set(r, c, v);
                    }
                }
            }
            Ok(m)
        };

    let mut modules: BTreeMap<String, Representation> = BTreeMap::new();
    for (name, m) in &doc.modules {
        if m.dims.len() != vertices {
            return Err(Error::input(format!(
                "module {name:?} has {} dimensions for {vertices} vertices",
                m.dims.len()
            )));
        }
        if m.dims.iter().any(|d| *d > 64) {
            return Err(Error::input(format!("module {name:?} is too large")));
        }
        for key in m.matrices.keys() {
            arrow_index(key)?;
        }
        let mut matrices = Vec::new();
        for a in &presentation.arrows {
            let rows = m.dims[a.source];
            let cols = m.dims[a.target];
            let mat = match m.matrices.get(&a.name) {
                Some(data) => parse_matrix(
                    rows,
                    cols,
                    data,
                    &format!("module {name:?}, arrow {}", a.name),
                )?,
                None => SparseMatrix::zero(rows, cols, field),
            };
            matrices.push(mat);
        }
        let rep = Representation { dims: m.dims.clone(), matrices };
        rep.validate(&algebra).map_err(|e| match e {
            Error::CheckFailed(msg) => Error::input(format!("module {name:?}: {msg}")),
            e => e,
        })?;
        modules.insert(name.clone(), rep);
    }

    let mut complexes: BTreeMap<String, ComplexOfReps> = BTreeMap::new();
    for (name, c) in &doc.complexes {
        let mut complex = ComplexOfReps::default();
        for (deg, module_name) in &c.terms {
            let p: i64 = deg
                .parse()
                .map_err(|_| Error::input(format!("complex {name:?}: bad degree {deg:?}")))?;
            let rep = modules.get(module_name).ok_or_else(|| {
                Error::input(format!(
                    "complex {name:?} refers to unknown module {module_name:?}"
                ))
            })?;
            complex.terms.insert(p, rep.clone());
        }
        for (deg, mats) in &c.diffs {
            let p: i64 = deg
                .parse()
                .map_err(|_| Error::input(format!("complex {name:?}: bad degree {deg:?}")))?;
            if mats.len() != vertices {
                return Err(Error::input(format!(
                    "complex {name:?}: differential at {p} needs one matrix per vertex"
                )));
            }
            let mut per_vertex = Vec::new();
            for (v, data) in mats.iter().enumerate() {
                let rows = complex.dim(p + 1, v);
                let cols = complex.dim(p, v);
                per_vertex.push(parse_matrix(
                    rows,
                    cols,
                    data,
                    &format!("complex {name:?}, degree {p}, vertex {}", v + 1),
                )?);
            }
            complex.diffs.insert(p, per_vertex);
        }
        complex.validate(&algebra).map_err(|e| match e {
            Error::CheckFailed(msg) => Error::input(format!("complex {name:?}: {msg}")),
            e => e,
        })?;
        complexes.insert(name.clone(), complex);
    }

    let mut collection = Vec::new();
    let mut collection_names = Vec::new();
    for entry in &doc.collection {
        let (name, complex) = match entry {
            CollectionEntry::Named(n) => {
                let c = complexes
                    .get(n)
                    .cloned()
                    .or_else(|| modules.get(n).map(|m| ComplexOfReps::stalk(m.clone(), 0)))
                    .ok_or_else(|| {
                        Error::input(format!("collection refers to unknown complex {n:?}"))
                    })?;
                (n.clone(), c)
            }
            CollectionEntry::Builtin { simple, projective, module, shift } => {
                let picks = usize::from(simple.is_some())
                    + usize::from(projective.is_some())
                    + usize::from(module.is_some());
                if picks != 1 {
                    return Err(Error::input(
                        "a collection entry needs exactly one of simple, projective or module",
                    ));
                }
                if let Some(i) = simple {
                    let v = one_based(*i, "simple")?;
                    (
                        format!("S{i}[{shift}]"),
                        ComplexOfReps::stalk(Representation::simple(&algebra, v), *shift),
                    )
                } else if let Some(i) = projective {
                    let v = one_based(*i, "projective")?;
                    let (rep, _) = projective_rep(&algebra, v);
                    (format!("P{i}[{shift}]"), ComplexOfReps::stalk(rep, *shift))
                } else {
                    let n = module.as_ref().unwrap();
                    let rep = modules.get(n).ok_or_else(|| {
                        Error::input(format!("collection refers to unknown module {n:?}"))
                    })?;
                    (format!("{n}[{shift}]"), ComplexOfReps::stalk(rep.clone(), *shift))
                }
            }
        };
        if complex.is_zero() {
            return Err(Error::input(format!("collection member {name} is zero")));
        }
        collection.push(complex);
        collection_names.push(name);
    }

    Ok(ValidatedInput {
        field,
        presentation,
        algebra,
        modules,
        complexes,
        collection,
        collection_names,
    })
}

/// Serialized minimal algebra: the machine output of the Ext-algebra command
/// and an accepted input of the Koszulity command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub field: FieldSpec,
    pub vertices: usize,
    pub basis: Vec<BasisElementDoc>,
    /// Basis indices of the units, one per vertex.
    pub units: Vec<usize>,
    #[serde(rename = "arityBound")]
    pub arity_bound: usize,
    #[serde(rename = "opsComplete")]
    pub ops_complete: bool,
    pub window: (i64, i64),
    /// Operations by arity: entries as (word, value) pairs with scalar
    /// strings.
    pub ops: BTreeMap<String, Vec<OpEntryDoc>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisElementDoc {
    pub id: String,
    pub degree: i64,
    pub left: usize,
    pub right: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OpEntryDoc {
    pub word: Vec<usize>,
    pub value: Vec<(usize, String)>,
}

impl AlgebraFile {
    pub fn from_algebra(a: &AInfAlgebra) -> AlgebraFile {
        let basis = a
            .underlying
            .basis
            .iter()
            .map(|b| BasisElementDoc {
                id: b.id.clone(),
                degree: b.degree,
                left: b.left + 1,
                right: b.right + 1,
            })
            .collect();
        let mut ops = BTreeMap::new();
        for (n, op) in &a.ops {
            let entries: Vec<OpEntryDoc> = op
                .entries()
                .map(|(w, v)| OpEntryDoc {
                    word: w.clone(),
                    value: v.iter().map(|(i, c)| (i, c.to_string())).collect(),
                })
                .collect();
            ops.insert(n.to_string(), entries);
        }
        AlgebraFile {
            field: FieldSpec::from_field(a.field),
            vertices: a.ring().r,
            basis,
            units: a.unit_indices.clone(),
            arity_bound: a.arity_bound,
            ops_complete: a.ops_complete,
            window: a.window.unwrap_or((0, 0)),
            ops,
        }
    }

    pub fn to_algebra(&self) -> Result<AInfAlgebra> {
        let field = self.field.to_field()?;
        let ring = IdempotentRing::new(self.vertices)?;
        let mut basis = Vec::new();
        for b in &self.basis {
            if b.left == 0 || b.left > self.vertices || b.right == 0 || b.right > self.vertices {
                return Err(Error::input(format!(
                    "basis element {} has bad idempotents",
                    b.id
                )));
            }
            basis.push(BasisElement::new(b.id.clone(), b.degree, b.left - 1, b.right - 1));
        }
        let underlying = GradedBimodule::new(ring, basis)?;
        let dim = underlying.dim();
        if self.units.iter().any(|u| *u >= dim) {
            return Err(Error::input("unit index out of range"));
        }
        if self.arity_bound > 64 {
            return Err(Error::input("arity bound is limited to 64"));
        }
        if dim > 4096 {
            return Err(Error::input("algebra files are limited to 4096 basis elements"));
        }
        let mut ops = BTreeMap::new();
        for (n_str, entries) in &self.ops {
            let n: usize = n_str
                .parse()
                .map_err(|_| Error::input(format!("bad arity key {n_str:?}")))?;
            if n == 0 || n > 16 {
                return Err(Error::input(format!("arity {n} out of range")));
            }
            let mut op = MultiLinearMap::new(n, 2 - n as i64);
            for e in entries {
                if e.word.len() != n {
                    return Err(Error::input("operation word length does not match arity"));
                }
                if e.word.iter().any(|i| *i >= dim) {
                    return Err(Error::input("operation word index out of range"));
                }
                let mut value = LinComb::zero();
                for (i, s) in &e.value {
                    if *i >= dim {
                        return Err(Error::input("operation value index out of range"));
                    }
                    value.add_term(*i, field.parse(s)?);
                }
                op.set(e.word.clone(), value);
            }
            if !op.is_zero() {
                ops.insert(n, op);
            }
        }
        // Structural validation and the identity checks happen in the
        // constructor.
        AInfAlgebra::new(
            field,
            underlying,
            self.units.clone(),
            ops,
            self.arity_bound,
            self.ops_complete,
            Some(self.window),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_CYCLE: &str = r#"{
        "field": "Q",
        "quiver": {
            "vertices": 2,
            "arrows": [
                {"name": "a", "from": 1, "to": 2},
                {"name": "b", "from": 2, "to": 1}
            ]
        },
        "relations": [
            [{"path": ["a", "b"]}],
            [{"path": ["b", "a"]}]
        ],
        "nilpotency": 2,
        "collection": [{"projective": 1}, {"simple": 1, "shift": 1}]
    }"#;

    #[test]
    fn parses_and_validates_the_worked_example() {
        let doc = parse_document(TWO_CYCLE).unwrap();
        let v = validate_document(&doc).unwrap();
        assert_eq!(v.algebra.dim(), 4);
        assert_eq!(v.collection.len(), 2);
        assert_eq!(v.collection_names, vec!["P1[0]", "S1[1]"]);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(parse_document("{").is_err());
        assert!(parse_document("null").is_err());
        let bad_vertex = TWO_CYCLE.replace("\"from\": 1", "\"from\": 7");
        let doc = parse_document(&bad_vertex).unwrap();
        assert!(validate_document(&doc).is_err());
        let bad_scalar = TWO_CYCLE.replace(
            "[{\"path\": [\"a\", \"b\"]}]",
            "[{\"path\": [\"a\", \"b\"], \"coeff\": \"x\"}]",
        );
        let doc = parse_document(&bad_scalar).unwrap();
        assert!(validate_document(&doc).is_err());
    }

    #[test]
    fn module_with_violated_relation_is_rejected() {
        let text = r#"{
            "field": "Q",
            "quiver": {"vertices": 1, "arrows": [{"name": "x", "from": 1, "to": 1}]},
            "relations": [[{"path": ["x", "x"]}]],
            "nilpotency": 2,
            "modules": {"M": {"dims": [1], "matrices": {"x": [["1"]]}}}
        }"#;
        let doc = parse_document(text).unwrap();
        let err = match validate_document(&doc) {
            Err(e) => e,
            Ok(_) => panic!("expected a rejection"),
        };
        assert!(matches!(err, Error::Input(_)));
        assert!(err.to_string().contains('M'), "{err}");
    }

    #[test]
    fn algebra_file_round_trip() {
        let k =
            crate::ainf::k_algebra(IdempotentRing::new(2).unwrap(), Field::Rational).unwrap();
        let f = AlgebraFile::from_algebra(&k);
        let text = serde_json::to_string(&f).unwrap();
        let back: AlgebraFile = serde_json::from_str(&text).unwrap();
        let a = back.to_algebra().unwrap();
        assert_eq!(a.dim(), 2);
    }
}
