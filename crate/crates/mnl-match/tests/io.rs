//! File format round trips through the library API.

use mnl_match::io::{
    parse_eval_input, parse_instance, read_instance, to_json, write_text, EvalInput, SolutionFile,
};
use mnl_match_core::customized::solve_customized;
use mnl_match_core::inclusive::solve_inclusive;
use mnl_match_core::instance::generate_random;
use mnl_match_core::{GenParams, Model};

#[test]
fn solution_files_round_trip() {
    let inst = generate_random(3, 2, &GenParams::default().with_seed(4)).unwrap();
    let cust = SolutionFile::from(&solve_customized(&inst).unwrap());
    let incl = SolutionFile::from(&solve_inclusive(&inst, 0.05).unwrap());
    for (file, model) in [(cust, Model::Customized), (incl, Model::Inclusive)] {
        let EvalInput::Solution(back) = parse_eval_input(&to_json(&file)).unwrap() else {
            panic!("expected a solution");
        };
        assert_eq!(back, file);
        assert_eq!(back.model().unwrap(), model);
        assert!(back.choice_matrix().unwrap().is_feasible(&inst, 1e-9));
        let total: f64 = back.menu_distributions[0].iter().map(|a| a.prob).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn instance_written_to_disk_reads_back_bit_exact() {
    let inst = generate_random(4, 3, &GenParams::default().with_seed(9)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    write_text(&path, &mnl_match::io::instance_json(&inst)).unwrap();
    assert_eq!(read_instance(&path).unwrap(), inst);
}

#[test]
fn unknown_fields_and_negative_weights_are_rejected() {
    let extra = r#"{"customers":1,"suppliers":1,"rewards":[[1]],"customer_weights":[[1]],"supplier_weights":[[1]],"extra":0}"#;
    assert!(parse_instance(extra)
        .unwrap_err()
        .to_string()
        .contains("extra"));
    let negative_weight = r#"{"customers":1,"suppliers":1,"rewards":[[1]],"customer_weights":[[-2]],"supplier_weights":[[1]]}"#;
    assert!(parse_instance(negative_weight).is_err());
}

#[test]
fn missing_file_names_the_path() {
    let err = read_instance(std::path::Path::new("/nonexistent/inst.json")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/inst.json"));
}
