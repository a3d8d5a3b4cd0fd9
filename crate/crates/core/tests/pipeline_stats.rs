mod common;

use chrono::NaiveDate;
use common::*;
use proptest::prelude::*;
use silsamp_core::backend::MockCategoricalBackend;
use silsamp_core::stats::{bootstrap_options, AGGREGATED};
use silsamp_core::{
    aggregate, bootstrap_jsd, empirical_marginals, finalize_record, human_distribution, run_survey,
    sample_population, stratify, total_variation, AnswerParser, BootstrapConfig, ConditionId, Distribution,
    Question, ResponseRecord, ResponseStatus, SampleSpec, StatsError, SurveyOptions,
};

fn record(question: &Question, condition: ConditionId, i: usize, option: Option<usize>) -> ResponseRecord {
    ResponseRecord {
        respondent_index: i,
        question_id: question.id.clone(),
        condition,
        raw_text: option.map(|k| k.to_string()).unwrap_or_else(|| "?".into()),
        status: if option.is_some() { ResponseStatus::Parsed } else { ResponseStatus::Malformed },
        option_index: option,
        attempts: 1,
        error: None,
    }
}

fn climate() -> Question {
    bundled_codebook().question("V202332").unwrap().clone()
}

proptest! {
    #[test]
    fn aggregate_is_order_invariant(options in proptest::collection::vec(proptest::option::of(1usize..=5), 1..300), seed in any::<u64>()) {
        let q = climate();
        let records: Vec<_> = options.iter().enumerate().map(|(i, o)| record(&q, ConditionId::Replicate, i, *o)).collect();
        let mut shuffled = records.clone();
        let mut rng = SplitMix(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, (rng.next_u64() % (i as u64 + 1)) as usize);
        }
        match (aggregate(&records, &q), aggregate(&shuffled, &q)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(&a, &b);
                prop_assert_eq!(a.sample_count + a.failure_tally.total(), records.len() as u64);
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            _ => prop_assert!(false),
        }
    }

    #[test]
    fn remap_commutes_with_aggregation(options in proptest::collection::vec(1usize..=5, 1..300)) {
        let q = climate();
        let raw: Vec<_> = options.iter().enumerate().map(|(i, o)| record(&q, ConditionId::ReverseCoded, i, Some(*o))).collect();
        let finalized: Vec<_> = raw.iter().cloned().map(|r| finalize_record(r, &q)).collect();
        let pre = aggregate(&raw, &q).unwrap();
        let post = aggregate(&finalized, &q).unwrap();
        prop_assert_eq!(pre.reversed().probabilities, post.probabilities);
    }
}

#[test]
fn bootstrap_zero_variance_cases() {
    let q = bundled_codebook().question("V202378").unwrap().clone();
    let records: Vec<_> = (0..50).map(|i| record(&q, ConditionId::Replicate, i, Some(1))).collect();
    let cfg = BootstrapConfig { replicates: 200, ..Default::default() };
    let same = Distribution::from_probabilities(&q.id, vec![1.0, 0.0, 0.0]);
    let est = bootstrap_jsd(&same, &records, &q, &cfg).unwrap();
    assert_eq!((est.point, est.ci_low, est.ci_high), (0.0, 0.0, 0.0));
    assert_eq!(est.replicate_count, 200);
    let other = Distribution::from_probabilities(&q.id, vec![0.0, 1.0, 0.0]);
    let est = bootstrap_jsd(&other, &records, &q, &cfg).unwrap();
    assert_eq!((est.point, est.ci_low, est.ci_high), (1.0, 1.0, 1.0));
}

#[test]
fn bootstrap_requires_parsed_records() {
    let q = climate();
    let human = Distribution::from_probabilities(&q.id, vec![0.2; 5]);
    let cfg = BootstrapConfig::default();
    let failed: Vec<_> = (0..5).map(|i| record(&q, ConditionId::Replicate, i, None)).collect();
    assert_eq!(bootstrap_jsd(&human, &failed, &q, &cfg), Err(StatsError::NoParsedResponses(q.id.clone())));
    assert_eq!(bootstrap_jsd(&human, &[], &q, &cfg), Err(StatsError::NoParsedResponses(q.id.clone())));
    let mixed = vec![record(&q, ConditionId::Replicate, 0, Some(1)), record(&q, ConditionId::Priming, 1, Some(2))];
    assert!(matches!(bootstrap_jsd(&human, &mixed, &q, &cfg), Err(StatsError::MixedConditions(..))));
}

#[test]
fn bootstrap_is_seeded() {
    let human = [0.2, 0.3, 0.5];
    let mut rng = SplitMix(3);
    let options: Vec<usize> = (0..2000).map(|_| rng.categorical(&[0.3, 0.3, 0.4]) - 1).collect();
    let cfg = BootstrapConfig { replicates: 500, confidence_level: 0.95, seed: 42 };
    let a = bootstrap_options(&human, &options, &cfg).unwrap();
    let b = bootstrap_options(&human, &options, &cfg).unwrap();
    assert_eq!(a, b);
    let c = bootstrap_options(&human, &options, &cfg.with_seed(43)).unwrap();
    assert_eq!(a.0, c.0);
    assert_ne!((a.1, a.2), (c.1, c.2));
    assert!(a.1 <= a.2 && a.1 >= 0.0 && a.2 <= 1.0);
}

#[test]
fn interval_narrows_with_sample_size() {
    let human = [0.2, 0.3, 0.5];
    let q = [0.4, 0.35, 0.25];
    let cfg = BootstrapConfig { replicates: 400, ..Default::default() };
    let median_width = |n: usize| {
        let mut widths: Vec<f64> = (0..15)
            .map(|t| {
                let mut rng = SplitMix(1000 + t);
                let options: Vec<usize> = (0..n).map(|_| rng.categorical(&q) - 1).collect();
                let (_, lo, hi) = bootstrap_options(&human, &options, &cfg.with_seed(t)).unwrap();
                hi - lo
            })
            .collect();
        widths.sort_by(f64::total_cmp);
        widths[widths.len() / 2]
    };
    let ratio = median_width(4000) / median_width(1000);
    assert!((0.35..=0.65).contains(&ratio), "{ratio}");
}

#[test]
fn mock_categorical_concentrates() {
    let cb = bundled_codebook();
    let q = cb.question("V202378").unwrap();
    let cells = [silsamp_core::backend::CategoricalCell {
        question_id: q.id.clone(),
        condition: None,
        probabilities: vec![0.2, 0.3, 0.5],
    }];
    let backend = MockCategoricalBackend::new(&cb, 9, &cells).unwrap();
    let marginals = empirical_marginals(&bundled_2020(&cb), &cb).unwrap();
    let pop = sample_population(&marginals, SampleSpec { population_size: 5441, master_seed: 1 }).unwrap();
    let parser = AnswerParser::default();
    let opts = SurveyOptions {
        survey_date: NaiveDate::from_ymd_opt(2020, 11, 3).unwrap(),
        max_in_flight: 4,
        parser: &parser,
        run_id: "t",
        checkpoint: None,
        cancel: None,
    };
    let records = run_survey(&pop, q, ConditionId::Replicate, &cb, &backend, &opts).unwrap();
    let d = aggregate(&records, q).unwrap();
    assert!(total_variation(&d.probabilities, &[0.2, 0.3, 0.5]) < 0.03, "{:?}", d.probabilities);
}

#[test]
fn stratify_by_gender_matches_filtered_tally() {
    let cb = bundled_codebook();
    let human = bundled_2020(&cb);
    let oracle = oracle_json("tally_2020.json");
    let gender = cb.variable("V201600").unwrap();
    let q = cb.question("V202332").unwrap();
    let marginals = empirical_marginals(&human, &cb).unwrap();
    let pop = sample_population(&marginals, SampleSpec { population_size: 3000, master_seed: 8 }).unwrap();

    let mut records = Vec::new();
    for condition in [ConditionId::Replicate, ConditionId::Reformulated] {
        let mut rng = SplitMix(condition.index() as u64);
        for p in &pop {
            let probs = if condition == ConditionId::Replicate { [0.1, 0.1, 0.2, 0.3, 0.3] } else { [0.1, 0.15, 0.25, 0.25, 0.25] };
            let k = rng.categorical(&probs);
            // a few failures in each arm
            let opt = (p.index % 97 != 0).then_some(k);
            records.push(record(q, condition, p.index, opt));
        }
    }
    let cfg = BootstrapConfig { replicates: 200, ..Default::default() };
    let reports = stratify(&records, &pop, &human, gender, q, &cfg).unwrap();
    assert_eq!(reports.len(), 3);
    assert_eq!(reports[2].stratum, AGGREGATED);

    let mut total_parsed = 0;
    for report in &reports[..2] {
        let level = report.level_code.unwrap();
        // human side: independent tally with explicit filter
        let expected = &oracle["strata"][&q.id][level.to_string()];
        let h = report.human.as_ref().unwrap();
        assert_eq!(h.sample_count, expected["sample_count"].as_u64().unwrap());
        for (a, b) in h.probabilities.iter().zip(f64_vec(&expected["probabilities"])) {
            assert!((a - b).abs() < 1e-12);
        }
        // silicon side: direct filter through the profiles
        for cell in &report.cells {
            let mut counts = [0u64; 5];
            for r in records.iter().filter(|r| r.condition == cell.condition && r.is_parsed()) {
                if pop[r.respondent_index].get("V201600") == Some(level) {
                    counts[r.option_index.unwrap() - 1] += 1;
                }
            }
            let n: u64 = counts.iter().sum();
            let want: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
            assert_eq!(cell.silicon.probabilities, want);
            if cell.condition == ConditionId::Replicate {
                total_parsed += n;
            }
        }
        assert_eq!(report.deltas.len(), 1);
    }
    // strata partition the parsed records
    let parsed = records.iter().filter(|r| r.condition == ConditionId::Replicate && r.is_parsed()).count() as u64;
    assert_eq!(total_parsed, parsed);

    let agg = &reports[2].deltas[0];
    let (d1, d2) = (reports[0].deltas[0].delta, reports[1].deltas[0].delta);
    let (w1, w2) = (reports[0].human_count as f64, reports[1].human_count as f64);
    assert!((agg.delta - (d1 + d2) / 2.0).abs() < 1e-15);
    assert!((agg.weighted_delta.unwrap() - (d1 * w1 + d2 * w2) / (w1 + w2)).abs() < 1e-15);
    // respondents with a missing axis value drop out of every stratum
    assert_eq!(reports[2].human_count, reports[0].human_count + reports[1].human_count);
    assert!(reports[2].human_count < human_distribution(&human, q).unwrap().sample_count);
}

#[test]
fn stratify_single_level_and_empty_levels() {
    let cb = bundled_codebook();
    let human = bundled_2020(&cb);
    let q = cb.question("V202378").unwrap();
    let mut gender = cb.variable("V201600").unwrap().clone();
    let marginals = empirical_marginals(&human, &cb).unwrap();
    let pop = sample_population(&marginals, SampleSpec { population_size: 400, master_seed: 2 }).unwrap();
    let mut records = Vec::new();
    for c in [ConditionId::Replicate, ConditionId::Priming] {
        for p in &pop {
            records.push(record(q, c, p.index, Some(1 + (p.index + c.index() as usize) % 3)));
        }
    }
    let cfg = BootstrapConfig { replicates: 50, ..Default::default() };

    gender.levels.truncate(1);
    let reports = stratify(&records, &pop, &human, &gender, q, &cfg).unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[1].deltas[0].delta, reports[0].deltas[0].delta);
    assert_eq!(reports[1].deltas[0].weighted_delta, Some(reports[0].deltas[0].delta));

    // a level nobody has: reported, not fatal
    gender.levels.push(silsamp_core::CategoryLevel { code: 9, label: "other".into(), first_person: None, third_person: None });
    let reports = stratify(&records, &pop, &human, &gender, q, &cfg).unwrap();
    assert_eq!(reports.len(), 3);
    assert!(!reports[1].issues.is_empty());
    assert!(reports[1].cells.is_empty());

    let age = cb.variable("V201507x").unwrap();
    assert!(matches!(stratify(&records, &pop, &human, age, q, &cfg), Err(StatsError::InvalidAxis(_))));
}
