//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured evidence (run with `--nocapture` to see them on success).

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use silting::ainf::{hom_dim_via_idempotent, module_from_idempotent, StrictIdempotent};
use silting::cli::{silting_end_presentation, JobConfig};
use silting::exactla::Field;
use silting::fixtures;
use silting::identities::{self, Rng};
use silting::koszul::{koszul_check, x1_zero_shortcut, KoszulVerdict};
use silting::quivalg::{
    derived_hom_table, expand_proj, hom_table_from_resolution, injective_rep, nakayama_on_projectives,
    path_basis, presentations_isomorphic, projective_rep, ComplexOfReps, IsoOutcome,
    Representation,
};
use silting::transfer::{ext_algebra_over, TransferBounds};

fn fixture_path(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run_cli(args: &[&str]) -> (String, i32) {
    let exe = env!("CARGO_BIN_EXE_silting");
    let out = Command::new(exe).args(args).output().expect("binary runs");
    (
        String::from_utf8(out.stdout).expect("utf8 output"),
        out.status.code().unwrap_or(-1),
    )
}

/// Criterion 1: the worked example end to end, exactly, in under 5 seconds.
#[test]
fn criterion_1_worked_example_end_to_end() {
    let start = Instant::now();
    let (stdout, code) = run_cli(&[
        "silting-end",
        "--input",
        &fixture_path("worked_example.json"),
        "--format",
        "json",
    ]);
    let elapsed = start.elapsed();
    assert_eq!(code, 0, "silting-end failed: {stdout}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let pres = &v["presentation"];
    assert_eq!(pres["vertices"], 2);
    let arrows = pres["arrows"].as_array().unwrap();
    assert_eq!(arrows.len(), 1, "expected exactly one arrow");
    assert_eq!(arrows[0]["from"], 2);
    assert_eq!(arrows[0]["to"], 1);
    assert_eq!(pres["relations"].as_array().unwrap().len(), 0);
    assert_eq!(pres["exact"], true);
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "took {elapsed:?}, budget is 5 s"
    );
    // Byte-exact against the checked-in golden output.
    let golden_path = format!("{}/tests/golden/worked_example.silting-end.json",
        env!("CARGO_MANIFEST_DIR"));
    let golden = std::fs::read_to_string(&golden_path).expect("golden file present");
    assert_eq!(stdout, golden, "output drifted from the golden file");
    println!(
        "criterion 1: PASS - one arrow 2 -> 1, no relations, exact, in {elapsed:?}"
    );
}

/// Criterion 2: Ext-algebra dimensions of the worked example against the
/// independent derived Hom tables, two code paths, exact equality.
#[test]
fn criterion_2_ext_dims_against_hom_tables() {
    let field = Field::Rational;
    let alg = path_basis(&fixtures::radical_square_zero_two_cycle(field)).unwrap();
    let (p1, _) = projective_rep(&alg, 0);
    let collection = vec![
        ComplexOfReps::stalk(p1, 0),
        ComplexOfReps::stalk(Representation::simple(&alg, 0), 1),
    ];
    let bounds = TransferBounds { max_arity: 4, window: (-4, 6) };
    let ext = ext_algebra_over(&alg, &collection, bounds, 0).unwrap();
    let x = &ext.algebra;
    // Transfer-side dimensions...
    for p in -4..=6i64 {
        assert_eq!(x.underlying.block_dim(p, 1, 0), usize::from(p == 1), "(2<-1) deg {p}");
        assert_eq!(
            x.underlying.block_dim(p, 1, 1),
            usize::from(p >= 0 && p % 2 == 0),
            "(2<-2) deg {p}"
        );
        assert_eq!(x.underlying.block_dim(p, 0, 0), usize::from(p == 0), "(1<-1) deg {p}");
        assert_eq!(x.underlying.block_dim(p, 0, 1), 0, "(1<-2) deg {p}");
    }
    // ...equal the independently computed Hom-complex dimensions.
    let mut compared = 0;
    for ((i, j), table) in &ext.tables {
        let direct = derived_hom_table(&alg, &collection[*i], &collection[*j], (-4, 6), 0)
            .unwrap();
        for p in -4..=6i64 {
            assert_eq!(table.dim(p), direct.dim(p), "table mismatch at ({i},{j},{p})");
            let transfer_side = if p <= 0 {
                usize::from(p == 0 && i == j)
            } else {
                x.underlying.block_dim(p, *j, *i)
            };
            assert_eq!(transfer_side, direct.dim(p), "two paths differ at ({i},{j},{p})");
            compared += 1;
        }
    }
    println!("criterion 2: PASS - {compared} dimension entries agree across both code paths");
}

fn round_trip(name: &str, cfg: &JobConfig) -> (bool, String) {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    let v = silting::cli::load_input(&text).unwrap();
    let (q, _, _, _) = silting_end_presentation(&v, cfg).unwrap();
    let out_pres = q.to_presentation(v.field, v.presentation.nilpotency_bound.max(2));
    let a = path_basis(&v.presentation).unwrap();
    let b = match path_basis(&out_pres) {
        Ok(b) => b,
        Err(e) => return (false, format!("{name}: output not finite-dimensional: {e}")),
    };
    match presentations_isomorphic(&a, &b).unwrap() {
        IsoOutcome::Isomorphic => (true, format!("{name}: recovered up to isomorphism")),
        other => (false, format!("{name}: {other:?}")),
    }
}

/// Criterion 3: round trips over the four fixtures with standard simples,
/// in under 30 seconds total.
#[test]
fn criterion_3_round_trips() {
    let start = Instant::now();
    let cfg = JobConfig::default();
    let mut lines = Vec::new();
    for name in [
        "semisimple.json",
        "dual_numbers.json",
        "two_cycle_simples.json",
        "a2.json",
    ] {
        let (ok, line) = round_trip(name, &cfg);
        assert!(ok, "{line}");
        lines.push(line);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget is 30 s");
    println!("criterion 3: PASS - {} ({elapsed:?})", lines.join("; "));
}

/// Criterion 4: 100 seeded random instances over F_101, all identity
/// families, zero violations; dual bar differentials square to zero to word
/// bound 6.
#[test]
fn criterion_4_identity_suite() {
    let field = Field::prime(101).unwrap();
    let report = identities::run_identity_suite(field, 100, 4, 6, 20260808).unwrap();
    assert!(report.failures.is_empty(), "failures: {:?}", report.failures);
    assert!(report.corruption_detected, "the corrupted control was not detected");
    for family in ["stasheff", "morphism", "module", "dual-bar", "step3"] {
        assert!(
            report.checked.get(family).copied().unwrap_or(0) >= 90,
            "family {family} under-exercised: {:?}",
            report.checked
        );
    }
    for family in ["cocycle-morphism", "homotopy", "homotopy-functional"] {
        assert!(
            report.checked.get(family).copied().unwrap_or(0) >= 10,
            "family {family} under-exercised: {:?}",
            report.checked
        );
    }
    println!(
        "criterion 4: PASS - 100 trials, checks: {:?}, corruption witness: {}",
        report.checked, report.corruption_witness
    );
}

/// Criterion 5: the idempotent-restriction cohomology equals the Hom
/// dimension computed through the dg model, wherever both are defined.
#[test]
fn criterion_5_idempotent_hom_oracle() {
    let field = Field::Rational;
    let mut instances = 0;
    for (name, pres) in fixtures::all(field) {
        let alg = path_basis(&pres).unwrap();
        let r = alg.vertices();
        let collection: Vec<ComplexOfReps> = (0..r)
            .map(|v| ComplexOfReps::stalk(Representation::simple(&alg, v), 0))
            .collect();
        let bounds = TransferBounds { max_arity: 4, window: (-3, 4) };
        let ext = ext_algebra_over(&alg, &collection, bounds, 0).unwrap();
        // Path one: cohomology of the idempotent restriction of the minimal
        // module e_j X over the transferred algebra.
        for j in 0..r {
            let (module, _) = module_from_idempotent(&ext.algebra, j).unwrap();
            for i in 0..r {
                let table = ext
                    .tables
                    .iter()
                    .find(|((a, b), _)| *a == i && *b == j)
                    .map(|(_, t)| t)
                    .unwrap();
                for p in 0..=4i64 {
                    let via_module = hom_dim_via_idempotent(
                        &ext.algebra,
                        &module,
                        StrictIdempotent { index: i },
                        p,
                    )
                    .unwrap();
                    assert_eq!(
                        via_module,
                        table.dim(p),
                        "{name}: ({i},{j}) degree {p}"
                    );
                }
                instances += 1;
            }
        }
    }
    assert!(instances >= 10, "only {instances} instances");
    println!("criterion 5: PASS - {instances} module/idempotent instances agree with the tables");
}

/// Criterion 6: the projective/simple and simple/injective Hom tables over
/// the two-cycle algebra, and the dimension identity of the Nakayama
/// functor on 20 seeded random pairs.
#[test]
fn criterion_6_hom_tables_and_nakayama() {
    let field = Field::Rational;
    let alg = path_basis(&fixtures::radical_square_zero_two_cycle(field)).unwrap();
    for i in 0..2usize {
        for j in 0..2usize {
            let (pi, _) = projective_rep(&alg, i);
            let p = ComplexOfReps::stalk(pi, 0);
            let s = ComplexOfReps::stalk(Representation::simple(&alg, j), 0);
            let t = derived_hom_table(&alg, &p, &s, (-4, 4), 0).unwrap();
            for deg in -4..=4i64 {
                let expect = usize::from(i == j && deg == 0);
                assert_eq!(t.dim(deg), expect, "Hom(P{},S{}) at {deg}", i + 1, j + 1);
            }
            let si = ComplexOfReps::stalk(Representation::simple(&alg, i), 0);
            let (inj, _) = injective_rep(&alg, j);
            let ij = ComplexOfReps::stalk(inj, 0);
            let t = derived_hom_table(&alg, &si, &ij, (-4, 4), 0).unwrap();
            for deg in -4..=4i64 {
                let expect = usize::from(i == j && deg == 0);
                assert_eq!(t.dim(deg), expect, "Hom(S{},I{}) at {deg}", i + 1, j + 1);
            }
        }
    }
    // The dimension identity dim Hom(M, shift^p N) = dim Hom(N, shift^{-p} nu M).
    let mut rng = Rng::new(66);
    let mut pairs = 0;
    while pairs < 20 {
        let m = identities::random_proj_complex(&alg, &mut rng);
        let nu_m = nakayama_on_projectives(&alg, &m).unwrap();
        if nu_m.is_zero() {
            continue;
        }
        let (m_expanded, _) = expand_proj(&alg, &m).unwrap();
        if m_expanded.is_zero() {
            continue;
        }
        let v = rng.below(2);
        let n = ComplexOfReps::stalk(Representation::simple(&alg, v), rng.below(2) as i64);
        let lhs = hom_table_from_resolution(&alg, &m, &n, (-2, 2)).unwrap();
        let rhs = derived_hom_table(&alg, &n, &nu_m, (-2, 2), 0).unwrap();
        for p in -2..=2i64 {
            assert_eq!(lhs.dim(p), rhs.dim(-p), "pair {pairs}, degree {p}");
        }
        pairs += 1;
    }
    println!("criterion 6: PASS - Hom tables exact, dimension identity on {pairs} random pairs");
}

/// Criterion 7: Koszulity reports and the degree-one shortcut.
#[test]
fn criterion_7_koszulity() {
    let field = Field::Rational;
    let bounds = TransferBounds { max_arity: 4, window: (-4, 6) };
    // The Ext-algebra of the dual numbers is the polynomial algebra on one
    // degree-one generator.
    let alg = path_basis(&fixtures::dual_numbers(field)).unwrap();
    let collection = vec![ComplexOfReps::stalk(Representation::simple(&alg, 0), 0)];
    let poly = ext_algebra_over(&alg, &collection, bounds, 0).unwrap().algebra;
    let r = koszul_check(&poly, 6).unwrap();
    assert_eq!(r.verdict, KoszulVerdict::KoszulUpTo(6), "polynomial algebra");
    assert!(x1_zero_shortcut(&poly).is_none());

    // The Ext-algebra of the hereditary fixture: one arrow in degree one, no
    // relations.
    let alg = path_basis(&fixtures::a2_quiver(field)).unwrap();
    let collection = vec![
        ComplexOfReps::stalk(Representation::simple(&alg, 0), 0),
        ComplexOfReps::stalk(Representation::simple(&alg, 1), 0),
    ];
    let hereditary = ext_algebra_over(&alg, &collection, bounds, 0).unwrap().algebra;
    let r = koszul_check(&hereditary, 6).unwrap();
    assert!(
        matches!(r.verdict, KoszulVerdict::KoszulUpTo(_)),
        "path algebra in degree one: {:?}",
        r.verdict
    );

    // The worked example's Ext-algebra has a degree-two generator.
    let alg = path_basis(&fixtures::radical_square_zero_two_cycle(field)).unwrap();
    let (p1, _) = projective_rep(&alg, 0);
    let collection = vec![
        ComplexOfReps::stalk(p1, 0),
        ComplexOfReps::stalk(Representation::simple(&alg, 0), 1),
    ];
    let x = ext_algebra_over(&alg, &collection, bounds, 0).unwrap().algebra;
    let r = koszul_check(&x, 6).unwrap();
    match r.verdict {
        KoszulVerdict::NotKoszul { witness } => {
            assert!(witness.contains("degree 2"), "witness: {witness}");
        }
        v => panic!("expected a refusal with a degree-2 witness, got {v:?}"),
    }
    assert!(x1_zero_shortcut(&x).is_none());

    // The shortcut fires exactly when the degree-one part vanishes.
    let alg = path_basis(&fixtures::semisimple_two(field)).unwrap();
    let collection = vec![
        ComplexOfReps::stalk(Representation::simple(&alg, 0), 0),
        ComplexOfReps::stalk(Representation::simple(&alg, 1), 0),
    ];
    let k = ext_algebra_over(&alg, &collection, bounds, 0).unwrap().algebra;
    let q = x1_zero_shortcut(&k).expect("shortcut must fire");
    assert_eq!(q.vertices, 2);
    assert!(q.arrows.is_empty() && q.relations.is_empty() && q.exact);
    println!("criterion 7: PASS - Koszul verdicts and the degree-one shortcut behave as required");
}

/// Criterion 8: byte-identical machine output across repeated runs of every
/// command on every fixture.
#[test]
fn criterion_8_determinism() {
    let fixture_files = [
        "worked_example.json",
        "two_cycle_simples.json",
        "dual_numbers.json",
        "semisimple.json",
        "a2.json",
        "explicit_modules.json",
    ];
    let commands: Vec<Vec<String>> = vec![
        vec!["validate".into()],
        vec!["smc-check".into(), "--max-degree".into(), "3".into()],
        vec!["ext-algebra".into(), "--max-degree".into(), "4".into()],
        vec!["silting-end".into(), "--max-degree".into(), "4".into()],
        vec![
            "koszul-check".into(),
            "--steps".into(),
            "3".into(),
            "--max-degree".into(),
            "4".into(),
        ],
    ];
    let mut runs = 0;
    for file in fixture_files {
        let path = fixture_path(file);
        assert!(Path::new(&path).exists());
        for cmd in &commands {
            let mut args: Vec<&str> = cmd.iter().map(|s| s.as_str()).collect();
            args.extend_from_slice(&["--input", &path, "--format", "json"]);
            let (out1, code1) = run_cli(&args);
            let (out2, code2) = run_cli(&args);
            assert_eq!(code1, code2, "{file} {cmd:?} exit codes differ");
            assert_eq!(out1, out2, "{file} {cmd:?} output differs between runs");
            assert!(!out1.is_empty());
            runs += 1;
        }
    }
    // The seeded identity suite is deterministic as well.
    let a = identities::default_suite(3, 9).unwrap();
    let b = identities::default_suite(3, 9).unwrap();
    assert_eq!(format!("{:?}", a.checked), format!("{:?}", b.checked));
    runs += 1;
    println!("criterion 8: PASS - {runs} command invocations byte-identical across runs");
}
