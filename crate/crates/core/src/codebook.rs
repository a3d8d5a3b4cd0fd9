//! Survey schema, human dataset ingestion, and empirical tallies.
//!
//! A codebook is a single TOML document with top-level keys `variables`,
//! `questions`, `priming_text` and `preamble_text`. Human data is a UTF-8 CSV
//! file with a header row of variable/question codes and one integer per cell.
//! Raw values outside a variable's valid range (negative sentinels, "don't
//! know" codes, blanks) are kept at ingestion and dropped only when tallying.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::Distribution;

/// Default analytical-persona paragraph appended to the system prompt.
pub const DEFAULT_PRIMING_TEXT: &str = "You value logic, objectivity, and internal consistency. When responding, you prioritize reasoning over emotion, and aim to base your answers on evidence, structure, and rational analysis. Your goal is to provide clear, well-reasoned, and intellectually honest answers that reflect careful thought. The best answer is that which reflects your reasoning process.";

/// Default sincerity paragraph prepended to the user prompt.
pub const DEFAULT_PREAMBLE_TEXT: &str = "In this study, we are exploring how people naturally respond to various questions. To ensure meaningful results, it is important that responses reflect your genuine thoughts and feelings. There are no correct or desirable answers, and your responses will not be evaluated or judged. Please answer honestly and without concern for how your answers might be perceived. Your sincerity helps us better understand authentic human responses.";

/// Placeholder substituted by a level's text in a variable template.
pub const TEMPLATE_SLOT: &str = "{value}";

pub const MIN_OPTIONS: usize = 2;
pub const MAX_OPTIONS: usize = 9;

#[derive(Debug, Error)]
pub enum CodebookError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("codebook parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("{}: missing column `{code}`", path.display())]
    MissingColumn { path: PathBuf, code: String },
    #[error("{}:{line}: {message}", path.display())]
    Csv {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("`{code}` has no valid (non-sentinel) values")]
    AllMissing { code: String },
}

fn schema(msg: impl Into<String>) -> CodebookError {
    CodebookError::Schema(msg.into())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryLevel {
    pub code: i64,
    pub label: String,
    /// Slot text for first-person templates; defaults to `label`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_person: Option<String>,
    /// Slot text for third-person templates; defaults to `label`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub third_person: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericRange {
    pub min: i64,
    pub max: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Person {
    First,
    Third,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemographicVariable {
    pub code: String,
    pub name: String,
    #[serde(rename = "first_person")]
    pub render_first_person: String,
    #[serde(rename = "third_person")]
    pub render_third_person: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<CategoryLevel>,
    /// Set for open-ended integer variables (age); mutually exclusive with `levels`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericRange>,
}

impl DemographicVariable {
    pub fn is_numeric(&self) -> bool {
        self.numeric.is_some()
    }

    pub fn level(&self, code: i64) -> Option<&CategoryLevel> {
        self.levels.iter().find(|l| l.code == code)
    }

    pub fn max_level_code(&self) -> i64 {
        self.levels.iter().map(|l| l.code).max().unwrap_or(0)
    }

    /// Whether a raw value is an informative response for this variable.
    pub fn is_valid(&self, value: i64) -> bool {
        match self.numeric {
            Some(range) => (range.min..=range.max).contains(&value),
            None => value >= 1 && value <= self.max_level_code() && self.level(value).is_some(),
        }
    }

    /// Human-readable name of a value: the level label, or the integer itself.
    pub fn value_label(&self, value: i64) -> Option<String> {
        match self.numeric {
            Some(_) => self.is_valid(value).then(|| value.to_string()),
            None => self.level(value).map(|l| l.label.clone()),
        }
    }

    /// Render the sentence for `value`, or `None` if the value is not valid.
    pub fn render(&self, value: i64, person: Person) -> Option<String> {
        let slot = match self.numeric {
            Some(_) => {
                if !self.is_valid(value) {
                    return None;
                }
                value.to_string()
            }
            None => {
                let level = self.level(value)?;
                match person {
                    Person::First => level.first_person.as_ref(),
                    Person::Third => level.third_person.as_ref(),
                }
                .unwrap_or(&level.label)
                .clone()
            }
        };
        let template = match person {
            Person::First => &self.render_first_person,
            Person::Third => &self.render_third_person,
        };
        Some(template.replace(TEMPLATE_SLOT, &slot))
    }

    fn validate(&self) -> Result<(), CodebookError> {
        let code = &self.code;
        if code.is_empty() {
            return Err(schema("variable with empty code"));
        }
        match (self.numeric, self.levels.is_empty()) {
            (Some(_), false) => {
                return Err(schema(format!("variable `{code}` has both `numeric` and `levels`")))
            }
            (None, true) => return Err(schema(format!("variable `{code}` has no levels"))),
            (Some(r), true) if r.min > r.max => {
                return Err(schema(format!("variable `{code}` has empty numeric range")))
            }
            _ => {}
        }
        let mut seen = HashSet::new();
        for level in &self.levels {
            if level.code < 1 {
                return Err(schema(format!("variable `{code}`: level code {} < 1", level.code)));
            }
            if !seen.insert(level.code) {
                return Err(schema(format!("variable `{code}`: duplicate level code {}", level.code)));
            }
            if level.label.trim().is_empty() {
                return Err(schema(format!("variable `{code}`: level {} has an empty label", level.code)));
            }
        }
        let values: Vec<i64> = match self.numeric {
            Some(r) => vec![r.min, r.max],
            None => self.levels.iter().map(|l| l.code).collect(),
        };
        for v in values {
            for person in [Person::First, Person::Third] {
                let text = self.render(v, person).unwrap_or_default();
                if text.trim().is_empty() {
                    return Err(schema(format!("variable `{code}`: template renders empty text for {v}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub topic: String,
    pub options: Vec<String>,
    pub text_replicate: String,
    pub text_reformulated: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_reverse_coded: Option<String>,
    pub reverse_applicable: bool,
    /// Option labels shown with the reformulated text; same count as `options`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options_reformulated: Option<Vec<String>>,
    /// Option labels shown with the reverse-coded text; same count as `options`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options_reverse_coded: Option<Vec<String>>,
}

impl Question {
    pub fn n_options(&self) -> usize {
        self.options.len()
    }

    pub fn is_valid_answer(&self, value: i64) -> bool {
        value >= 1 && value <= self.n_options() as i64
    }

    fn validate(&self) -> Result<(), CodebookError> {
        let id = &self.id;
        if id.is_empty() {
            return Err(schema("question with empty id"));
        }
        let n = self.options.len();
        if !(MIN_OPTIONS..=MAX_OPTIONS).contains(&n) {
            return Err(schema(format!(
                "question `{id}` has {n} options; expected {MIN_OPTIONS}..={MAX_OPTIONS}"
            )));
        }
        if self.reverse_applicable != self.text_reverse_coded.is_some() {
            return Err(schema(format!(
                "question `{id}`: reverse_applicable must be true iff text_reverse_coded is present"
            )));
        }
        for (name, alt) in [
            ("options_reformulated", &self.options_reformulated),
            ("options_reverse_coded", &self.options_reverse_coded),
        ] {
            if let Some(alt) = alt {
                if alt.len() != n {
                    return Err(schema(format!("question `{id}`: {name} has {} entries, expected {n}", alt.len())));
                }
            }
        }
        if self.options_reverse_coded.is_some() && !self.reverse_applicable {
            return Err(schema(format!("question `{id}`: options_reverse_coded without reverse text")));
        }
        if self.text_replicate.trim().is_empty() || self.text_reformulated.trim().is_empty() {
            return Err(schema(format!("question `{id}` has empty text")));
        }
        Ok(())
    }
}

fn default_priming() -> String {
    DEFAULT_PRIMING_TEXT.to_string()
}

fn default_preamble() -> String {
    DEFAULT_PREAMBLE_TEXT.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codebook {
    pub variables: Vec<DemographicVariable>,
    pub questions: Vec<Question>,
    #[serde(default = "default_priming")]
    pub priming_text: String,
    #[serde(default = "default_preamble")]
    pub preamble_text: String,
}

impl Codebook {
    pub fn from_toml_str(text: &str) -> Result<Self, CodebookError> {
        let codebook: Codebook = toml::from_str(text)?;
        codebook.validate()?;
        Ok(codebook)
    }

    pub fn validate(&self) -> Result<(), CodebookError> {
        if self.variables.is_empty() {
            return Err(schema("codebook has no variables"));
        }
        if self.questions.is_empty() {
            return Err(schema("codebook has no questions"));
        }
        let mut codes = HashSet::new();
        for v in &self.variables {
            v.validate()?;
            if !codes.insert(v.code.as_str()) {
                return Err(schema(format!("duplicate variable code `{}`", v.code)));
            }
        }
        for q in &self.questions {
            q.validate()?;
            if !codes.insert(q.id.as_str()) {
                return Err(schema(format!("duplicate question id `{}`", q.id)));
            }
        }
        Ok(())
    }

    pub fn question(&self, id: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.id == id)
    }

    pub fn variable(&self, code: &str) -> Option<&DemographicVariable> {
        self.variables.iter().find(|v| v.code == code)
    }
}

/// Read and validate a codebook file.
pub fn load_codebook(path: impl AsRef<Path>) -> Result<Codebook, CodebookError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CodebookError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Codebook::from_toml_str(&text)
}

/// Human survey responses, stored column-wise by code. `None` marks a blank cell.
#[derive(Debug, Clone, PartialEq)]
pub struct HumanDataset {
    pub wave_label: String,
    columns: BTreeMap<String, Vec<Option<i64>>>,
    n_rows: usize,
}

impl HumanDataset {
    /// Assemble a dataset from columns of equal length.
    pub fn from_columns(
        wave_label: impl Into<String>,
        columns: BTreeMap<String, Vec<Option<i64>>>,
    ) -> Result<Self, CodebookError> {
        let n_rows = columns.values().next().map_or(0, Vec::len);
        if columns.values().any(|c| c.len() != n_rows) {
            return Err(schema("dataset columns have different lengths"));
        }
        Ok(Self {
            wave_label: wave_label.into(),
            columns,
            n_rows,
        })
    }

    pub fn len(&self) -> usize {
        self.n_rows
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0
    }

    pub fn column(&self, code: &str) -> Option<&[Option<i64>]> {
        self.columns.get(code).map(Vec::as_slice)
    }
}

/// Load a CSV of human responses; every codebook variable and question must have a column.
pub fn load_human_responses(
    path: impl AsRef<Path>,
    codebook: &Codebook,
    wave_label: &str,
) -> Result<HumanDataset, CodebookError> {
    let path = path.as_ref();
    let io_err = |source| CodebookError::Io {
        path: path.to_path_buf(),
        source,
    };
    let bytes = fs::read(path).map_err(io_err)?;
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(io_err(std::io::Error::new(
            std::io::ErrorKind::UnexpectedEof,
            "empty file",
        )));
    }
    let csv_err = |e: csv::Error| CodebookError::Csv {
        path: path.to_path_buf(),
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let header = reader.headers().map_err(csv_err)?.clone();

    let wanted = codebook
        .variables
        .iter()
        .map(|v| v.code.as_str())
        .chain(codebook.questions.iter().map(|q| q.id.as_str()));
    let mut positions = Vec::new();
    for code in wanted {
        let idx = header
            .iter()
            .position(|h| h == code)
            .ok_or_else(|| CodebookError::MissingColumn {
                path: path.to_path_buf(),
                code: code.to_string(),
            })?;
        positions.push((code.to_string(), idx));
    }

    let mut columns: BTreeMap<String, Vec<Option<i64>>> =
        positions.iter().map(|(c, _)| (c.clone(), Vec::new())).collect();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        for (code, idx) in &positions {
            let cell = record.get(*idx).unwrap_or("");
            let value = if cell.is_empty() {
                None
            } else {
                Some(cell.parse::<i64>().map_err(|_| CodebookError::Csv {
                    path: path.to_path_buf(),
                    line,
                    message: format!("column `{code}`: `{cell}` is not an integer"),
                })?)
            };
            columns.get_mut(code).expect("column registered").push(value);
        }
    }
    HumanDataset::from_columns(wave_label, columns)
}

/// Empirical distribution of one demographic variable, over ascending values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginal {
    pub code: String,
    pub values: Vec<i64>,
    pub probabilities: Vec<f64>,
    pub valid_count: u64,
}

/// Marginals for every codebook variable, in codebook order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalSet {
    pub marginals: Vec<Marginal>,
}

impl MarginalSet {
    pub fn get(&self, code: &str) -> Option<&Marginal> {
        self.marginals.iter().find(|m| m.code == code)
    }
}

/// Estimate per-variable marginals from unweighted counts, dropping sentinel codes.
///
/// Categorical variables keep every level in the support (zero entries allowed);
/// numeric variables yield a distribution over observed valid integers.
pub fn empirical_marginals(data: &HumanDataset, codebook: &Codebook) -> Result<MarginalSet, CodebookError> {
    if data.is_empty() {
        return Err(CodebookError::EmptyDataset);
    }
    let mut marginals = Vec::with_capacity(codebook.variables.len());
    for var in &codebook.variables {
        let column = data.column(&var.code).ok_or_else(|| CodebookError::MissingColumn {
            path: PathBuf::new(),
            code: var.code.clone(),
        })?;
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        if var.numeric.is_none() {
            for level in &var.levels {
                counts.insert(level.code, 0);
            }
        }
        for v in column.iter().flatten().filter(|&&v| var.is_valid(v)) {
            *counts.entry(*v).or_insert(0) += 1;
        }
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(CodebookError::AllMissing { code: var.code.clone() });
        }
        marginals.push(Marginal {
            code: var.code.clone(),
            values: counts.keys().copied().collect(),
            probabilities: counts.values().map(|&c| c as f64 / total as f64).collect(),
            valid_count: total,
        });
    }
    Ok(MarginalSet { marginals })
}

/// Tally a question column over rows accepted by `keep`, dropping sentinel codes.
pub fn tally_answers<F>(data: &HumanDataset, question: &Question, mut keep: F) -> Result<Vec<u64>, CodebookError>
where
    F: FnMut(usize) -> bool,
{
    let column = data.column(&question.id).ok_or_else(|| CodebookError::MissingColumn {
        path: PathBuf::new(),
        code: question.id.clone(),
    })?;
    let mut counts = vec![0u64; question.n_options()];
    for (row, value) in column.iter().enumerate() {
        if let Some(v) = *value {
            if question.is_valid_answer(v) && keep(row) {
                counts[(v - 1) as usize] += 1;
            }
        }
    }
    Ok(counts)
}

/// Human answer distribution over the question's options.
pub fn human_distribution(data: &HumanDataset, question: &Question) -> Result<Distribution, CodebookError> {
    let counts = tally_answers(data, question, |_| true)?;
    Distribution::from_counts(&question.id, &counts).ok_or_else(|| CodebookError::AllMissing {
        code: question.id.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINI: &str = r#"
[[variables]]
code = "G"
name = "gender"
first_person = "I am a {value}."
third_person = "The respondent is a {value}."
levels = [{ code = 1, label = "man" }, { code = 2, label = "woman" }]

[[variables]]
code = "AGE"
name = "age"
first_person = "I am {value} years old."
third_person = "The respondent is {value} years old."
numeric = { min = 18, max = 80 }

[[questions]]
id = "Q1"
topic = "Test"
options = ["A", "B", "C"]
text_replicate = "Do you?"
text_reformulated = "Would this respondent?"
reverse_applicable = false
"#;

    fn dataset(cols: &[(&str, Vec<Option<i64>>)]) -> HumanDataset {
        HumanDataset::from_columns("t", cols.iter().map(|(c, v)| (c.to_string(), v.clone())).collect()).unwrap()
    }

    #[test]
    fn defaults_fill_condition_texts() {
        let cb = Codebook::from_toml_str(MINI).unwrap();
        assert_eq!(cb.priming_text, DEFAULT_PRIMING_TEXT);
        assert_eq!(cb.preamble_text, DEFAULT_PREAMBLE_TEXT);
    }

    #[test]
    fn one_option_rejected() {
        let text = MINI.replace(r#"options = ["A", "B", "C"]"#, r#"options = ["A"]"#);
        assert!(matches!(Codebook::from_toml_str(&text), Err(CodebookError::Schema(_))));
    }

    #[test]
    fn ten_options_rejected() {
        let opts: Vec<String> = (0..10).map(|i| format!("\"o{i}\"")).collect();
        let text = MINI.replace(r#"["A", "B", "C"]"#, &format!("[{}]", opts.join(",")));
        assert!(matches!(Codebook::from_toml_str(&text), Err(CodebookError::Schema(_))));
    }

    #[test]
    fn reverse_flag_without_text_rejected() {
        let text = MINI.replace("reverse_applicable = false", "reverse_applicable = true");
        let err = Codebook::from_toml_str(&text).unwrap_err();
        assert!(err.to_string().contains("reverse_applicable"), "{err}");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let text = MINI.replace(r#"id = "Q1""#, r#"id = "G""#);
        assert!(matches!(Codebook::from_toml_str(&text), Err(CodebookError::Schema(_))));
        let dup_level = MINI.replace(r#"{ code = 2, label = "woman" }"#, r#"{ code = 1, label = "woman" }"#);
        assert!(matches!(Codebook::from_toml_str(&dup_level), Err(CodebookError::Schema(_))));
    }

    #[test]
    fn level_code_must_be_positive() {
        let text = MINI.replace(r#"code = 1, label = "man""#, r#"code = 0, label = "man""#);
        assert!(matches!(Codebook::from_toml_str(&text), Err(CodebookError::Schema(_))));
    }

    #[test]
    fn render_levels_and_numeric() {
        let cb = Codebook::from_toml_str(MINI).unwrap();
        assert_eq!(cb.variables[0].render(2, Person::Third).unwrap(), "The respondent is a woman.");
        assert_eq!(cb.variables[1].render(43, Person::First).unwrap(), "I am 43 years old.");
        assert!(cb.variables[1].render(17, Person::First).is_none());
        assert!(cb.variables[0].render(3, Person::First).is_none());
    }

    #[test]
    fn symmetric_gender_marginal() {
        let cb = Codebook::from_toml_str(MINI).unwrap();
        let mut g = vec![Some(1); 2500];
        g.extend(vec![Some(2); 2500]);
        let data = dataset(&[("G", g), ("AGE", vec![Some(40); 5000]), ("Q1", vec![Some(1); 5000])]);
        let m = empirical_marginals(&data, &cb).unwrap();
        assert_eq!(m.get("G").unwrap().probabilities, vec![0.5, 0.5]);
        assert_eq!(m.get("AGE").unwrap().values, vec![40]);
    }

    #[test]
    fn sentinels_dropped() {
        let mut cb = Codebook::from_toml_str(MINI).unwrap();
        cb.variables[0].levels.truncate(1);
        let data = dataset(&[
            ("G", vec![Some(1), Some(1), Some(1), Some(-9)]),
            ("AGE", vec![Some(30), Some(-9), None, Some(99)]),
            ("Q1", vec![Some(1); 4]),
        ]);
        let m = empirical_marginals(&data, &cb).unwrap();
        assert_eq!(m.get("G").unwrap().probabilities, vec![1.0]);
        assert_eq!(m.get("AGE").unwrap().valid_count, 1);
    }

    #[test]
    fn all_missing_variable() {
        let cb = Codebook::from_toml_str(MINI).unwrap();
        let data = dataset(&[("G", vec![Some(-9), None]), ("AGE", vec![Some(30); 2]), ("Q1", vec![Some(1); 2])]);
        assert!(matches!(empirical_marginals(&data, &cb), Err(CodebookError::AllMissing { code }) if code == "G"));
    }

    #[test]
    fn human_distribution_examples() {
        let cb = Codebook::from_toml_str(MINI).unwrap();
        let q = &cb.questions[0];
        let data = dataset(&[("Q1", vec![Some(2); 4])]);
        assert_eq!(human_distribution(&data, q).unwrap().probabilities, vec![0.0, 1.0, 0.0]);
        let data = dataset(&[("Q1", vec![Some(1), Some(2), Some(3), Some(-8)])]);
        let d = human_distribution(&data, q).unwrap();
        assert_eq!(d.probabilities, vec![1.0 / 3.0; 3]);
        assert_eq!(d.sample_count, 3);
        let data = dataset(&[("Q1", vec![Some(-8), Some(7)])]);
        assert!(matches!(human_distribution(&data, q), Err(CodebookError::AllMissing { .. })));
    }
}
