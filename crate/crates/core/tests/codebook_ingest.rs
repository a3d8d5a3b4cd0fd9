mod common;

use std::collections::BTreeMap;
use std::io::Write;

use common::*;
use proptest::prelude::*;
use silsamp_core::codebook::tally_answers;
use silsamp_core::{
    empirical_marginals, human_distribution, load_codebook, load_human_responses, CodebookError, HumanDataset,
};

#[test]
fn bundled_codebook_shape() {
    let cb = bundled_codebook();
    assert_eq!(cb.questions.len(), 10);
    assert_eq!(cb.variables.len(), 8);
    assert_eq!(cb.questions.iter().filter(|q| q.reverse_applicable).count(), 6);
    assert_eq!(cb.variables.iter().filter(|v| v.is_numeric()).count(), 1);
    assert!(cb.priming_text.starts_with("You value logic, objectivity, and internal consistency"));
    assert!(cb.preamble_text.contains("There are no correct or desirable answers"));
    assert!(!cb.question("V202337").unwrap().reverse_applicable);
}

#[test]
fn missing_codebook_is_io_error() {
    let err = load_codebook(data_dir().join("nope.toml")).unwrap_err();
    assert!(matches!(err, CodebookError::Io { .. }));
}

#[test]
fn bundled_dataset_rows() {
    let cb = bundled_codebook();
    let data = bundled_2020(&cb);
    assert_eq!(data.len(), 5441);
    assert_eq!(data.wave_label, "2020");
}

#[test]
fn missing_column_named() {
    let cb = bundled_codebook();
    let src = std::fs::read_to_string(data_dir().join("anes2020_synthetic.csv")).unwrap();
    // drop the Gun Regulation column
    let header: Vec<&str> = src.lines().next().unwrap().split(',').collect();
    let drop = header.iter().position(|h| *h == "V202337").unwrap();
    let mut tmp = tempfile::NamedTempFile::new().unwrap();
    for line in src.lines().take(20) {
        let cells: Vec<&str> = line.split(',').enumerate().filter(|(i, _)| *i != drop).map(|(_, c)| c).collect();
        writeln!(tmp, "{}", cells.join(",")).unwrap();
    }
    match load_human_responses(tmp.path(), &cb, "x") {
        Err(CodebookError::MissingColumn { code, .. }) => assert_eq!(code, "V202337"),
        other => panic!("expected MissingColumn, got {other:?}"),
    }
}

#[test]
fn empty_file_rejected() {
    let cb = bundled_codebook();
    let tmp = tempfile::NamedTempFile::new().unwrap();
    assert!(matches!(load_human_responses(tmp.path(), &cb, "x"), Err(CodebookError::Io { .. })));
}

#[test]
fn header_only_rejected_downstream() {
    let cb = bundled_codebook();
    let src = std::fs::read_to_string(data_dir().join("anes2020_synthetic.csv")).unwrap();
    let mut tmp = tempfile::NamedTempFile::new().unwrap();
    writeln!(tmp, "{}", src.lines().next().unwrap()).unwrap();
    let data = load_human_responses(tmp.path(), &cb, "x").unwrap();
    assert!(data.is_empty());
    assert!(matches!(empirical_marginals(&data, &cb), Err(CodebookError::EmptyDataset)));
}

#[test]
fn non_integer_cell_reports_line() {
    let cb = bundled_codebook();
    let src = std::fs::read_to_string(data_dir().join("anes2020_synthetic.csv")).unwrap();
    let mut tmp = tempfile::NamedTempFile::new().unwrap();
    for (i, line) in src.lines().take(5).enumerate() {
        if i == 3 {
            writeln!(tmp, "x{}", &line[1..]).unwrap();
        } else {
            writeln!(tmp, "{line}").unwrap();
        }
    }
    let err = load_human_responses(tmp.path(), &cb, "x").unwrap_err();
    match err {
        CodebookError::Csv { line, .. } => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
}

#[test]
fn marginals_match_tally_oracle() {
    let cb = bundled_codebook();
    let data = bundled_2020(&cb);
    let oracle = oracle_json("tally_2020.json");
    let marginals = empirical_marginals(&data, &cb).unwrap();
    assert_eq!(marginals.marginals.len(), 8);
    for m in &marginals.marginals {
        let expected = &oracle["marginals"][&m.code];
        let values: Vec<i64> = expected["values"].as_array().unwrap().iter().map(|v| v.as_i64().unwrap()).collect();
        assert_eq!(m.values, values, "{}", m.code);
        for (a, b) in m.probabilities.iter().zip(f64_vec(&expected["probabilities"])) {
            assert!((a - b).abs() < 1e-12, "{}: {a} vs {b}", m.code);
        }
        assert!((m.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(m.valid_count, expected["valid"].as_u64().unwrap());
    }
}

#[test]
fn human_distributions_match_tally_oracle() {
    let cb = bundled_codebook();
    let data = bundled_2020(&cb);
    let oracle = oracle_json("tally_2020.json");
    for q in &cb.questions {
        let d = human_distribution(&data, q).unwrap();
        let expected = &oracle["human"][&q.id];
        assert_eq!(d.sample_count, expected["sample_count"].as_u64().unwrap());
        for (a, b) in d.probabilities.iter().zip(f64_vec(&expected["probabilities"])) {
            assert!((a - b).abs() < 1e-12, "{}: {a} vs {b}", q.id);
        }
    }
}

fn single_question_dataset(values: Vec<Option<i64>>) -> HumanDataset {
    let mut cols = BTreeMap::new();
    cols.insert("V202371".to_string(), values);
    HumanDataset::from_columns("t", cols).unwrap()
}

proptest! {
    #[test]
    fn distribution_sums_to_one_and_permutation_invariant(
        raw in proptest::collection::vec(-9i64..6, 1..200),
        seed in any::<u64>(),
    ) {
        let cb = bundled_codebook();
        let q = cb.question("V202371").unwrap();
        let values: Vec<Option<i64>> = raw.iter().copied().map(Some).collect();
        let data = single_question_dataset(values.clone());
        match human_distribution(&data, q) {
            Ok(d) => {
                prop_assert!((d.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prop_assert!(d.probabilities.iter().all(|&p| p >= 0.0));
                let mut shuffled = values.clone();
                let mut rng = SplitMix(seed);
                for i in (1..shuffled.len()).rev() {
                    let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                    shuffled.swap(i, j);
                }
                let d2 = human_distribution(&single_question_dataset(shuffled), q).unwrap();
                prop_assert_eq!(d.probabilities, d2.probabilities);
            }
            Err(CodebookError::AllMissing { .. }) => prop_assert!(raw.iter().all(|v| !(1..=3).contains(v))),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn filtering_is_idempotent(raw in proptest::collection::vec(-9i64..6, 1..200)) {
        let cb = bundled_codebook();
        let q = cb.question("V202371").unwrap();
        let data = single_question_dataset(raw.iter().copied().map(Some).collect());
        let once = tally_answers(&data, q, |_| true).unwrap();
        let filtered: Vec<Option<i64>> = raw.iter().copied().filter(|v| q.is_valid_answer(*v)).map(Some).collect();
        let twice = tally_answers(&single_question_dataset(filtered), q, |_| true).unwrap();
        prop_assert_eq!(once, twice);
    }
}
