mod common;

use common::*;
use fnef_core::cone::{build_system, verify_system};
use fnef_core::formats::{
    read_certificate, read_divisor, read_invariant, read_report_certificates, read_script, read_system,
    write_batch_report, write_certificate, write_check_report, write_divisor, write_invariant, write_mori_report,
    write_report, write_script, write_system,
};
use fnef_core::mori::{mori_check, MoriCase};
use fnef_core::replay::{check, script_for};
use fnef_core::symmetry::{basis_for, InvariantDivisor, SymSetup};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn reports_are_byte_stable() {
    let setup = SymSetup::new(8, 5).unwrap();
    let a = verify_system(&build_system(setup)).unwrap();
    let b = verify_system(&build_system(setup)).unwrap();
    let system = build_system(setup);
    assert_eq!(write_report(&a, &system), write_report(&b, &system));
    let pair = vec![(a, system)];
    assert_eq!(write_batch_report(8, &pair), write_batch_report(8, &pair));
    let text = write_report(&pair[0].0, &pair[0].1);
    assert!(!text.contains('.'), "no decimal points anywhere");
}

#[test]
fn every_exported_system_reloads_equal() {
    for setup in SymSetup::all_up_to(9) {
        let system = build_system(setup);
        assert_eq!(read_system(&write_system(&system)).unwrap(), system, "{setup}");
    }
}

#[test]
fn stored_certificates_replay_through_the_validator() {
    for setup in SymSetup::all_up_to(8) {
        let system = build_system(setup);
        let report = verify_system(&system).unwrap();
        let text = write_report(&report, &system);
        let certs = read_report_certificates(&text).unwrap();
        assert_eq!(certs.len(), basis_for(setup).len());
        for c in &certs {
            c.validate(&system).unwrap();
            assert_eq!(&read_certificate(&write_certificate(c, &system)).unwrap(), c);
        }
    }
}

#[test]
fn tampered_certificate_file_fails_validation() {
    let setup = SymSetup::new(6, 6).unwrap();
    let system = build_system(setup);
    let report = verify_system(&system).unwrap();
    let text = write_certificate(report.certificates().next().unwrap(), &system);
    let tampered = text.replacen("\"2/5\"", "\"3/5\"", 1);
    assert_ne!(tampered, text);
    assert!(read_certificate(&tampered).unwrap().validate(&system).is_err());
}

#[test]
fn scripts_and_replay_reports_serialize() {
    for setup in [SymSetup::new(9, 8).unwrap(), SymSetup::new(6, 3).unwrap()] {
        let script = script_for(setup).unwrap();
        let text = write_script(&script);
        assert_eq!(read_script(&text).unwrap(), script);
        let report = write_check_report(&check(&script));
        assert!(report.contains("\"status\": \"VERIFIED\""));
    }
}

#[test]
fn mori_report_names_its_assumptions() {
    let text = write_mori_report(&mori_check(MoriCase::new(8, 1).unwrap()).unwrap());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["status"], "VERIFIED");
    assert_eq!(v["assumptions"].as_array().unwrap().len(), 2);
    assert!(v["levels"].as_array().unwrap().iter().all(|l| l["status"] == "CONTAINED"));
}

#[test]
fn diagnostics_carry_line_and_field() {
    let text = "{\n  \"n\": 6,\n  \"m\": 4,\n  \"coords\": [\n    {\"i\": 2, \"T\": [1, 2], \"coeff\": \"1\"}\n  ]\n}";
    let err = read_invariant(text).unwrap_err();
    assert_eq!((err.line, err.field.as_str()), (Some(5), "coords[0]"));
    assert!(err.to_string().starts_with("line 5, field coords[0]: "));

    let text = "{\n  \"n\": 6,\n  \"boundary\": [{\"subset\": [1, 1], \"coeff\": \"1\"}]\n}";
    let err = read_divisor(text).unwrap_err();
    assert_eq!(err.line, Some(3));
    assert_eq!(err.field, "boundary[0].subset");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn divisor_files_round_trip(n in 4u32..=10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_bvector(&mut rng, n, 10, true);
        let text = write_divisor(&d);
        prop_assert_eq!(read_divisor(&text).unwrap(), d);
        prop_assert_eq!(write_divisor(&read_divisor(&text).unwrap()), text);
    }

    #[test]
    fn invariant_files_round_trip(k in 0usize..40, seed in any::<u64>()) {
        let setups = SymSetup::all_up_to(10);
        let setup = setups[k % setups.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<_> = basis_for(setup).iter().map(|_| random_rational(&mut rng, 9)).collect();
        let d = InvariantDivisor::from_dense(setup, &values).unwrap();
        prop_assert_eq!(read_invariant(&write_invariant(&d)).unwrap(), d);
    }
}
