mod common;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::checks::{default_report, solver_round_trip};
use sugra::catalog::{self, solve_walker_h, CatalogError, ENTRIES};
use sugra::exprlang::{parse, Chart};
use sugra::geometry::WalkerData;
use sugra::sugra::{diagnose_reduced_case, evaluate, ReducedCase};

#[test]
fn entries_verify_at_100_points() {
    for e in ENTRIES {
        let r = default_report(e.id, 100);
        if e.id == "alphabeta-poly" {
            // the Riemannian 1-form of this entry is not closed
            assert!(!r.pass());
            let bad: Vec<_> = r.rows.iter().filter(|row| row.max >= 1e-8).collect();
            assert!(bad.iter().all(|row| row.equation == "closedness"), "{bad:?}");
            continue;
        }
        assert!(r.pass(), "{}: {:?}", e.id, r.rows.iter().map(|x| x.max).collect::<Vec<_>>());
    }
}

#[test]
fn perturbed_entries_fail() {
    for e in ENTRIES {
        let p = catalog::perturbed_params(e.id, e.perturb_key, 1.1).unwrap();
        let bg = catalog::build(e.id, &p).unwrap();
        let r = evaluate(&bg, &bg.plan(50, 42).unwrap(), 1e-8, None).unwrap();
        let worst = r.rows.iter().map(|x| x.max).fold(0.0, f64::max);
        assert!(worst > 1e-3, "{}: {worst}", e.id);
    }
}

#[test]
fn diagnosis_of_entries() {
    let expect = [
        ("alpha-ppwave", ReducedCase::Case(1)),
        ("beta-nu-ppwave", ReducedCase::Case(2)),
        ("gamma-delta-ppwave", ReducedCase::Case(3)),
        ("varpi-epsilon-ppwave", ReducedCase::Case(4)),
        ("kahler-theta", ReducedCase::Case(5)),
        ("general-combined", ReducedCase::ProductFactor(0)),
        ("alphabeta-trig", ReducedCase::Case(6)),
        ("alphabeta-poly", ReducedCase::Case(6)),
    ];
    for (id, case) in expect {
        let bg = catalog::build_default(id).unwrap();
        let d = diagnose_reduced_case(&bg.flux, &bg.product, &bg.plan(30, 3).unwrap()).unwrap();
        assert_eq!(d.case, case, "{id}");
        if id == "alphabeta-poly" {
            let dnu = d.residuals.iter().find(|s| s.equation == "d nu").unwrap();
            assert!(dnu.max > 1.0);
            assert_eq!(d.kappa, Some(0.0));
        } else {
            assert!(d.max_residual() < 1e-10, "{id}: {:?}", d.residuals);
        }
        if id == "alphabeta-trig" {
            assert!((d.kappa.unwrap() - 1.0).abs() < 1e-10);
            assert!((d.lambda.unwrap() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn degenerate_parameters() {
    let p = BTreeMap::from([("a".to_string(), 0.0)]);
    let bg = catalog::build("alpha-ppwave", &p).unwrap();
    let r = evaluate(&bg, &bg.plan(20, 1).unwrap(), 1e-8, None).unwrap();
    assert!(r.pass());
    let ein = r.rows.iter().filter(|x| x.equation == "einstein");
    assert!(ein.map(|x| x.max).fold(0.0, f64::max) < 1e-14);

    // without flux the Kähler background is not Ricci flat
    let p = BTreeMap::from([("c".to_string(), 0.0)]);
    let bg = catalog::build("kahler-theta", &p).unwrap();
    let r = evaluate(&bg, &bg.plan(20, 1).unwrap(), 1e-8, None).unwrap();
    assert!(!r.pass());
}

#[test]
fn invalid_parameters() {
    assert!(matches!(catalog::build_default("nosuch"), Err(CatalogError::UnknownId(_))));
    let p = BTreeMap::from([("zz".to_string(), 1.0)]);
    assert!(matches!(catalog::build("alpha-ppwave", &p), Err(CatalogError::UnknownParam { .. })));
    let p = BTreeMap::from([("L".to_string(), -1.0)]);
    assert!(matches!(catalog::build("alphabeta-poly", &p), Err(CatalogError::OutOfRange { .. })));
}

#[test]
fn solver_inverts_the_transverse_laplacian() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        assert!(solver_round_trip(&mut rng, 10) < 1e-9);
    }
    let c: Chart = WalkerData::standard_chart();
    let bad = parse("exp(x1)", &c).unwrap();
    assert!(matches!(solve_walker_h(&bad), Err(CatalogError::NonPolynomialRhs(_))));
    let bad = parse("v*x1", &c).unwrap();
    assert!(matches!(solve_walker_h(&bad), Err(CatalogError::RhsDependsOnV)));
}
