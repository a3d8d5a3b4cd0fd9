//! The five pipeline stages. Each reads the artifacts of the previous one from
//! the output directory and writes line-delimited JSON or CSV.
//!
//! ```text
//! <out>/manifest.json
//! <out>/<wave>/marginals.jsonl, human.jsonl, population.jsonl
//! <out>/<wave>/records/<t>/<question>_c<condition>.jsonl, skipped.jsonl, run.json
//! <out>/<wave>/eval/estimates.csv, strata.csv, sweep.csv, distributions.jsonl
//! <out>/report/<wave>/<question>.svg, deltas.md
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::AtomicBool;

use log::{info, warn};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use silsamp_core::backend::CheckpointStore;
use silsamp_core::codebook::{load_human_responses, MarginalSet};
use silsamp_core::sampler::sample_for_codebook;
use silsamp_core::{
    bootstrap_jsd, build_backend, delta, empirical_marginals, human_distribution, load_codebook, run_survey, stratify,
    Codebook, ConditionId, DivergenceEstimate, FailureTally, HumanDataset, Question, RespondentProfile, ResponseRecord,
    ResponseStatus, RunError, SampleSpec, StatsError, SurveyOptions,
};

use crate::config::{temperature_tag, RunConfig, WaveConfig};
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::report;

pub type Counts = BTreeMap<String, u64>;

pub fn wave_dir(config: &RunConfig, wave: &WaveConfig) -> PathBuf {
    config.output_dir.join(&wave.label)
}

pub fn records_dir(config: &RunConfig, wave: &WaveConfig, temperature: f64) -> PathBuf {
    wave_dir(config, wave).join("records").join(temperature_tag(temperature))
}

pub fn record_file_name(question_id: &str, condition: ConditionId) -> String {
    format!("{question_id}_c{}.jsonl", condition.index())
}

pub(crate) fn write_jsonl<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let mut text = String::new();
    for item in items {
        text.push_str(&serde_json::to_string(&item).expect("artifact serializes"));
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(CliError::io(&tmp))?;
    f.write_all(bytes).map_err(CliError::io(&tmp))?;
    f.sync_all().map_err(CliError::io(&tmp))?;
    fs::rename(&tmp, path).map_err(CliError::io(path))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| serde_json::from_str(l).map_err(|e| CliError::Data(format!("{}:{}: {e}", path.display(), n + 1))))
        .collect()
}

fn require(path: &Path, stage: &str) -> Result<(), CliError> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, format!("missing; run `silsamp {stage}` first")),
        })
    }
}

struct Inputs {
    codebook: Codebook,
    questions: Vec<String>,
}

fn prepare(config: &RunConfig) -> Result<Inputs, CliError> {
    config.validate()?;
    let codebook = load_codebook(&config.codebook)?;
    let questions = config.select_questions(&codebook)?.into_iter().map(|q| q.id.clone()).collect();
    config.check_axes(&codebook)?;
    Ok(Inputs { codebook, questions })
}

fn load_wave(codebook: &Codebook, wave: &WaveConfig) -> Result<HumanDataset, CliError> {
    Ok(load_human_responses(&wave.path, codebook, &wave.label)?)
}

pub fn cmd_ingest(config: &RunConfig) -> Result<Counts, CliError> {
    let inputs = prepare(config)?;
    let mut counts = Counts::new();
    for wave in &config.waves {
        let data = load_wave(&inputs.codebook, wave)?;
        let marginals = empirical_marginals(&data, &inputs.codebook)?;
        let dir = wave_dir(config, wave);
        write_jsonl(&dir.join("marginals.jsonl"), &marginals.marginals)?;
        let mut human = Vec::new();
        for q in &inputs.codebook.questions {
            match human_distribution(&data, q) {
                Ok(d) => human.push(d),
                Err(e) => warn!("wave {}: {e}", wave.label),
            }
        }
        write_jsonl(&dir.join("human.jsonl"), &human)?;
        info!("wave {}: {} rows, {} marginals", wave.label, data.len(), marginals.marginals.len());
        *counts.entry("rows".into()).or_default() += data.len() as u64;
        *counts.entry("marginals".into()).or_default() += marginals.marginals.len() as u64;
        *counts.entry("human_distributions".into()).or_default() += human.len() as u64;
    }
    RunManifest::record_stage(&config.output_dir, &config.digest(), "ingest", counts.clone())?;
    Ok(counts)
}

pub fn cmd_sample(config: &RunConfig) -> Result<Counts, CliError> {
    let inputs = prepare(config)?;
    let mut counts = Counts::new();
    for wave in &config.waves {
        let dir = wave_dir(config, wave);
        let marginals_path = dir.join("marginals.jsonl");
        require(&marginals_path, "ingest")?;
        let marginals = MarginalSet { marginals: read_jsonl(&marginals_path)? };
        let population_size = match config.population_size {
            Some(n) => n,
            None => load_wave(&inputs.codebook, wave)?.len(),
        };
        let spec = SampleSpec { population_size, master_seed: config.sample_seed(&wave.label) };
        let population =
            sample_for_codebook(&inputs.codebook, &marginals, spec).map_err(|e| CliError::Data(e.to_string()))?;
        write_jsonl(&dir.join("population.jsonl"), &population)?;
        info!("wave {}: sampled {} respondents", wave.label, population.len());
        *counts.entry("respondents".into()).or_default() += population.len() as u64;
    }
    RunManifest::record_stage(&config.output_dir, &config.digest(), "sample", counts.clone())?;
    Ok(counts)
}

/// A condition requested for a question it does not apply to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipNotice {
    pub question_id: String,
    pub condition: ConditionId,
    pub reason: String,
}

/// Identity of the response-generating settings for one records directory.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct RunIdentity {
    run_id: String,
}

fn run_identity(config: &RunConfig, wave: &WaveConfig, temperature: f64, population: &[RespondentProfile]) -> String {
    let mut backend = config.backend.clone();
    backend.temperature = temperature;
    backend.seed = config.backend_seed(&wave.label, temperature);
    backend.max_in_flight = 0;
    let key = serde_json::json!({
        "backend": backend,
        "survey_date": wave.survey_date,
        "refusal_prefixes": config.parser().refusal_prefixes,
        "codebook": fs::read(&config.codebook).map(|b| hex::encode(Sha256::digest(b))).unwrap_or_default(),
        "population": hex::encode(Sha256::digest(serde_json::to_vec(population).expect("serializes"))),
    });
    hex::encode(Sha256::digest(key.to_string().as_bytes()))
}

fn complete_records(path: &Path, population: &[RespondentProfile]) -> Option<Vec<ResponseRecord>> {
    let records: Vec<ResponseRecord> = read_jsonl(path).ok()?;
    let complete = records.len() == population.len()
        && records.iter().zip(population).all(|(r, p)| r.respondent_index == p.index);
    complete.then_some(records)
}

fn load_population(config: &RunConfig, wave: &WaveConfig) -> Result<Vec<RespondentProfile>, CliError> {
    let path = wave_dir(config, wave).join("population.jsonl");
    require(&path, "sample")?;
    read_jsonl(&path)
}

/// Query the backend for every selected (question, condition) cell.
///
/// Finished record files are kept; a partially finished cell resumes from the
/// checkpoint. `cancel` stops the run between requests.
pub fn cmd_run(config: &RunConfig, cancel: Option<&AtomicBool>) -> Result<Counts, CliError> {
    let inputs = prepare(config)?;
    let parser = config.parser();
    let conditions = config.condition_list();
    let mut counts = Counts::new();
    let (mut failed, mut total) = (0usize, 0usize);
    for wave in &config.waves {
        let population = load_population(config, wave)?;
        for temperature in config.temperature_list() {
            let dir = records_dir(config, wave, temperature);
            fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
            let run_id = run_identity(config, wave, temperature, &population);
            let identity_path = dir.join("run.json");
            if identity_path.exists() {
                let text = fs::read_to_string(&identity_path).map_err(CliError::io(&identity_path))?;
                let existing: RunIdentity = serde_json::from_str(&text)
                    .map_err(|e| CliError::Data(format!("{}: {e}", identity_path.display())))?;
                if existing.run_id != run_id {
                    return Err(CliError::Config(format!(
                        "{} holds responses from different settings; choose another output directory",
                        dir.display()
                    )));
                }
            } else {
                let text = serde_json::to_string(&RunIdentity { run_id: run_id.clone() }).expect("serializes");
                write_atomic(&identity_path, (text + "\n").as_bytes())?;
            }

            let mut backend_config = config.backend.clone();
            backend_config.temperature = temperature;
            backend_config.seed = config.backend_seed(&wave.label, temperature);
            let backend =
                build_backend(&backend_config, &inputs.codebook).map_err(|e| CliError::Config(e.to_string()))?;
            let checkpoint_path = dir.join("checkpoint.jsonl");
            let checkpoint = CheckpointStore::open(&checkpoint_path).map_err(CliError::io(&checkpoint_path))?;
            let options = SurveyOptions {
                survey_date: wave.survey_date,
                max_in_flight: backend_config.max_in_flight,
                parser: &parser,
                run_id: &run_id,
                checkpoint: Some(&checkpoint),
                cancel,
            };

            let mut skipped = Vec::new();
            for qid in &inputs.questions {
                let question = inputs.codebook.question(qid).expect("selected from codebook");
                for &condition in &conditions {
                    if !condition.is_applicable(question) {
                        info!("skipping `{qid}` under {condition}: no reverse-coded variant");
                        skipped.push(SkipNotice {
                            question_id: qid.clone(),
                            condition,
                            reason: "question has no reverse-coded variant".into(),
                        });
                        continue;
                    }
                    let path = dir.join(record_file_name(qid, condition));
                    let records = match complete_records(&path, &population) {
                        Some(records) => {
                            *counts.entry("files_reused".into()).or_default() += 1;
                            records
                        }
                        None => {
                            let records = run_survey(&population, question, condition, &inputs.codebook, backend.as_ref(), &options)
                                .map_err(|e| match e {
                                    RunError::Config(m) => CliError::Config(m),
                                    RunError::Checkpoint(source) => CliError::Io { path: checkpoint_path.clone(), source },
                                    RunError::Interrupted { completed, total } => CliError::Interrupted {
                                        question_id: qid.clone(),
                                        condition,
                                        completed,
                                        total,
                                    },
                                })?;
                            write_jsonl(&path, &records)?;
                            info!("wave {} {} `{qid}` {condition}: {} records", wave.label, temperature_tag(temperature), records.len());
                            records
                        }
                    };
                    *counts.entry("record_files".into()).or_default() += 1;
                    *counts.entry("records".into()).or_default() += records.len() as u64;
                    *counts.entry("parsed".into()).or_default() += records.iter().filter(|r| r.is_parsed()).count() as u64;
                    let transport = records.iter().filter(|r| r.status == ResponseStatus::TransportFailed).count();
                    *counts.entry("transport_failed".into()).or_default() += transport as u64;
                    failed += transport;
                    total += records.len();
                }
            }
            write_jsonl(&dir.join("skipped.jsonl"), &skipped)?;
            *counts.entry("skip_notices".into()).or_default() += skipped.len() as u64;
            drop(checkpoint);
            fs::remove_file(&checkpoint_path).map_err(CliError::io(&checkpoint_path))?;
        }
    }
    RunManifest::record_stage(&config.output_dir, &config.digest(), "run", counts.clone())?;
    if total > 0 && failed as f64 / total as f64 > config.max_failure_fraction {
        return Err(CliError::PartialFailure { failed, total, allowed: config.max_failure_fraction });
    }
    Ok(counts)
}

/// One row of `estimates.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub temperature: f64,
    pub question_id: String,
    pub condition: u8,
    pub condition_name: String,
    pub status: String,
    pub records: u64,
    pub parsed: u64,
    pub refusal: u64,
    pub out_of_range: u64,
    pub malformed: u64,
    pub transport_failed: u64,
    pub point: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub delta: Option<f64>,
    pub significant: Option<bool>,
}

/// One row of `strata.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumRow {
    pub temperature: f64,
    pub axis: String,
    pub question_id: String,
    pub stratum: String,
    pub level_code: Option<i64>,
    pub human_count: u64,
    pub condition: Option<u8>,
    pub parsed: Option<u64>,
    pub point: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub delta: Option<f64>,
    pub significant: Option<bool>,
    pub weighted_delta: Option<f64>,
    pub issues: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub condition: u8,
    pub condition_name: String,
    pub temperature: f64,
    pub mean_jsd: f64,
    pub questions: u64,
}

/// A human or silicon distribution as written to `distributions.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionLine {
    pub temperature: Option<f64>,
    pub question_id: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionId>,
    pub probabilities: Vec<f64>,
    pub sample_count: u64,
    pub failure_tally: FailureTally,
}

pub(crate) fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| CliError::Data(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
    write_atomic(path, &bytes)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    reader
        .deserialize()
        .map(|r| r.map_err(|e| CliError::Data(format!("{}: {e}", path.display()))))
        .collect()
}

fn estimate_row(temperature: f64, q: &Question, condition: ConditionId, records: &[ResponseRecord]) -> EstimateRow {
    let tally = silsamp_core::response::tally(records, q).map(|(_, t)| t).unwrap_or_default();
    EstimateRow {
        temperature,
        question_id: q.id.clone(),
        condition: condition.index(),
        condition_name: condition.name().into(),
        status: "ok".into(),
        records: records.len() as u64,
        parsed: records.iter().filter(|r| r.is_parsed()).count() as u64,
        refusal: tally.refusal,
        out_of_range: tally.out_of_range,
        malformed: tally.malformed,
        transport_failed: tally.transport_failed,
        point: None,
        ci_low: None,
        ci_high: None,
        delta: None,
        significant: None,
    }
}

pub fn cmd_eval(config: &RunConfig) -> Result<Counts, CliError> {
    let inputs = prepare(config)?;
    let conditions = config.condition_list();
    let mut counts = Counts::new();
    for wave in &config.waves {
        let data = load_wave(&inputs.codebook, wave)?;
        let population = load_population(config, wave)?;
        let mut estimates = Vec::new();
        let mut strata = Vec::new();
        let mut lines = Vec::new();
        let mut sweep: BTreeMap<(u8, String), (f64, f64, u64)> = BTreeMap::new();
        for qid in &inputs.questions {
            let q = inputs.codebook.question(qid).expect("selected");
            let human = match human_distribution(&data, q) {
                Ok(h) => Some(h),
                Err(e) => {
                    warn!("wave {}: {e}", wave.label);
                    None
                }
            };
            if let Some(h) = &human {
                lines.push(DistributionLine {
                    temperature: None,
                    question_id: q.id.clone(),
                    source: "human".into(),
                    condition: None,
                    probabilities: h.probabilities.clone(),
                    sample_count: h.sample_count,
                    failure_tally: FailureTally::default(),
                });
            }
        }
        for temperature in config.temperature_list() {
            let dir = records_dir(config, wave, temperature);
            for qid in &inputs.questions {
                let q = inputs.codebook.question(qid).expect("selected");
                let human = human_distribution(&data, q).ok();
                let mut cells: HashMap<ConditionId, DivergenceEstimate> = HashMap::new();
                let mut all_records = Vec::new();
                let mut rows = Vec::new();
                for &condition in conditions.iter().filter(|c| c.is_applicable(q)) {
                    let path = dir.join(record_file_name(qid, condition));
                    let records: Vec<ResponseRecord> = if path.exists() { read_jsonl(&path)? } else { Vec::new() };
                    let mut row = estimate_row(temperature, q, condition, &records);
                    if !path.exists() {
                        row.status = "missing_records".into();
                    } else if let Some(h) = &human {
                        let cfg = config.bootstrap.with_seed(config.bootstrap_seed(&wave.label, temperature, qid, condition));
                        match bootstrap_jsd(h, &records, q, &cfg) {
                            Ok(est) => {
                                row.point = Some(est.point);
                                row.ci_low = Some(est.ci_low);
                                row.ci_high = Some(est.ci_high);
                                cells.insert(condition, est);
                            }
                            Err(StatsError::NoParsedResponses(_)) => row.status = "no_parsed_responses".into(),
                            Err(e) => return Err(CliError::Data(format!("{}: {e}", path.display()))),
                        }
                    } else {
                        row.status = "no_human_data".into();
                    }
                    if let Ok(d) = silsamp_core::aggregate(&records, q) {
                        lines.push(DistributionLine {
                            temperature: Some(temperature),
                            question_id: q.id.clone(),
                            source: "silicon".into(),
                            condition: Some(condition),
                            probabilities: d.probabilities,
                            sample_count: d.sample_count,
                            failure_tally: d.failure_tally,
                        });
                    }
                    rows.push((condition, row));
                    all_records.extend(records);
                }
                for (condition, row) in &mut rows {
                    if let (true, Some(est), Some(base)) =
                        (config.deltas, cells.get(condition), cells.get(&ConditionId::Replicate))
                    {
                        if *condition != ConditionId::Replicate {
                            let d = delta(est, base).map_err(|e| CliError::Data(e.to_string()))?;
                            row.delta = Some(d.delta);
                            row.significant = Some(d.significant);
                        }
                    }
                    if let Some(p) = row.point {
                        let entry = sweep.entry((condition.index(), temperature_tag(temperature))).or_insert((temperature, 0.0, 0));
                        entry.1 += p;
                        entry.2 += 1;
                    }
                    *counts.entry(format!("cells_{}", row.status)).or_default() += 1;
                }
                estimates.extend(rows.into_iter().map(|(_, r)| r));

                if human.is_some() && !all_records.is_empty() {
                    for axis in &config.stratify.axes {
                        let var = inputs.codebook.variable(axis).expect("checked axis");
                        let cfg = config.bootstrap.with_seed(config.bootstrap_seed(&wave.label, temperature, qid, ConditionId::Replicate));
                        let reports = stratify(&all_records, &population, &data, var, q, &cfg)
                            .map_err(|e| CliError::Data(e.to_string()))?;
                        for report in reports {
                            strata.extend(stratum_rows(temperature, &report));
                        }
                    }
                }
            }
        }
        let sweep_rows: Vec<SweepRow> = sweep
            .into_iter()
            .map(|((c, _), (temperature, sum, n))| SweepRow {
                condition: c,
                condition_name: ConditionId::try_from(c).expect("valid").name().into(),
                temperature,
                mean_jsd: sum / n as f64,
                questions: n,
            })
            .collect();
        let eval_dir = wave_dir(config, wave).join("eval");
        write_csv(&eval_dir.join("estimates.csv"), &estimates)?;
        write_csv(&eval_dir.join("strata.csv"), &strata)?;
        write_csv(&eval_dir.join("sweep.csv"), &sweep_rows)?;
        write_jsonl(&eval_dir.join("distributions.jsonl"), &lines)?;
        *counts.entry("estimate_rows".into()).or_default() += estimates.len() as u64;
        *counts.entry("stratum_rows".into()).or_default() += strata.len() as u64;
    }
    RunManifest::record_stage(&config.output_dir, &config.digest(), "eval", counts.clone())?;
    Ok(counts)
}

fn stratum_rows(temperature: f64, report: &silsamp_core::StratumReport) -> Vec<StratumRow> {
    let base = StratumRow {
        temperature,
        axis: report.axis.clone(),
        question_id: report.question_id.clone(),
        stratum: report.stratum.clone(),
        level_code: report.level_code,
        human_count: report.human_count,
        condition: None,
        parsed: None,
        point: None,
        ci_low: None,
        ci_high: None,
        delta: None,
        significant: None,
        weighted_delta: None,
        issues: report.issues.join("; "),
    };
    let mut rows = Vec::new();
    for cell in &report.cells {
        let d = report.deltas.iter().find(|d| d.condition == cell.condition);
        rows.push(StratumRow {
            condition: Some(cell.condition.index()),
            parsed: Some(cell.estimate.sample_count),
            point: Some(cell.estimate.point),
            ci_low: Some(cell.estimate.ci_low),
            ci_high: Some(cell.estimate.ci_high),
            delta: d.map(|d| d.delta),
            significant: d.and_then(|d| d.significant),
            ..base.clone()
        });
    }
    if report.cells.is_empty() {
        // aggregated rows carry only deltas; empty strata carry only issues
        for d in &report.deltas {
            rows.push(StratumRow {
                condition: Some(d.condition.index()),
                delta: Some(d.delta),
                significant: d.significant,
                weighted_delta: d.weighted_delta,
                ..base.clone()
            });
        }
        if rows.is_empty() {
            rows.push(base);
        }
    }
    rows
}

pub fn cmd_report(config: &RunConfig) -> Result<Counts, CliError> {
    let inputs = prepare(config)?;
    let mut counts = Counts::new();
    let temperatures = config.temperature_list();
    for wave in &config.waves {
        let eval_dir = wave_dir(config, wave).join("eval");
        let estimates_path = eval_dir.join("estimates.csv");
        require(&estimates_path, "eval")?;
        let estimates: Vec<EstimateRow> = read_csv(&estimates_path)?;
        let lines: Vec<DistributionLine> = read_jsonl(&eval_dir.join("distributions.jsonl"))?;
        let out = config.output_dir.join("report").join(&wave.label);
        fs::create_dir_all(&out).map_err(CliError::io(&out))?;
        for (i, &t) in temperatures.iter().enumerate() {
            for qid in &inputs.questions {
                let q = inputs.codebook.question(qid).expect("selected");
                let human = lines.iter().find(|l| l.source == "human" && &l.question_id == qid);
                let silicon: Vec<&DistributionLine> = lines
                    .iter()
                    .filter(|l| l.source == "silicon" && &l.question_id == qid && l.temperature == Some(t))
                    .collect();
                let svg = report::stacked_bar_svg(q, &wave.label, human, &silicon);
                let name = if i == 0 { format!("{qid}.svg") } else { format!("{qid}_{}.svg", temperature_tag(t)) };
                write_atomic(&out.join(name), svg.as_bytes())?;
                *counts.entry("charts".into()).or_default() += 1;
            }
        }
        let table = report::delta_table(&inputs.codebook, &inputs.questions, &config.condition_list(), &temperatures, &estimates);
        write_atomic(&out.join("deltas.md"), table.as_bytes())?;
        *counts.entry("tables".into()).or_default() += 1;
    }
    RunManifest::record_stage(&config.output_dir, &config.digest(), "report", counts.clone())?;
    Ok(counts)
}

/// Every stage in order.
pub fn cmd_all(config: &RunConfig, cancel: Option<&AtomicBool>) -> Result<Counts, CliError> {
    let mut counts = Counts::new();
    for (stage, c) in [
        ("ingest", cmd_ingest(config)?),
        ("sample", cmd_sample(config)?),
        ("run", cmd_run(config, cancel)?),
        ("eval", cmd_eval(config)?),
        ("report", cmd_report(config)?),
    ] {
        for (k, v) in c {
            counts.insert(format!("{stage}.{k}"), v);
        }
    }
    Ok(counts)
}
