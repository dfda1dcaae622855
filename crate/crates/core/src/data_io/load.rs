use std::collections::HashMap;
use std::io::Read;

use super::{DataError, DatasetConfig};
use crate::{Class, Dataset, FeatureKind};

/// Load the CSV named by `config.csv_path`.
pub fn load_dataset(config: &DatasetConfig) -> Result<Dataset, DataError> {
    let file = std::fs::File::open(&config.csv_path)
        .map_err(|source| DataError::Io { path: config.csv_path.display().to_string(), source })?;
    load_dataset_from_reader(config, file)
}

/// Line number in the file of data row `i` (the header is line 1).
fn line_of(i: usize) -> usize {
    i + 2
}

/// Parse CSV text from any reader.
///
/// Missing numerics are replaced by the column median and missing
/// categoricals by the column mode. Categorical values get integer codes in
/// order of first appearance. The protected column becomes 1 (privileged) or
/// 0 (unprivileged).
pub fn load_dataset_from_reader<R: Read>(config: &DatasetConfig, reader: R) -> Result<Dataset, DataError> {
    config.validate()?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(DataError::EmptyFile);
    }
    let mut records: Vec<Vec<String>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        if rec.len() != header.len() {
            return Err(DataError::RowLength { line: line_of(i), got: rec.len(), expected: header.len() });
        }
        records.push(rec.iter().map(str::to_string).collect());
    }
    if records.is_empty() {
        return Err(DataError::EmptyFile);
    }

    let find = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };
    let label_idx = find(&config.label_column)?;
    let protected_idx = find(&config.protected_column)?;
    for c in config.drop_columns.iter().chain(&config.categorical_columns) {
        find(c)?;
    }

    let labels = records
        .iter()
        .enumerate()
        .map(|(i, r)| label_of(config, &r[label_idx], line_of(i)))
        .collect::<Result<Vec<Class>, _>>()?;

    let mut names = Vec::new();
    let mut kinds = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (j, name) in header.iter().enumerate() {
        if j == label_idx || config.drop_columns.contains(name) {
            continue;
        }
        let raw: Vec<&str> = records.iter().map(|r| r[j].as_str()).collect();
        if j == protected_idx {
            columns.push(binarize_protected(config, name, &raw)?);
            names.push(name.clone());
            kinds.push(FeatureKind::Categorical { levels: vec!["unprivileged".into(), "privileged".into()] });
            continue;
        }
        let categorical = config.categorical_columns.contains(name)
            || (config.auto_detect_categorical
                && raw.iter().any(|v| !config.is_missing(v) && parse_number(v).is_none()));
        if categorical {
            let (codes, levels) = encode_categorical(config, name, &raw)?;
            if config.one_hot {
                for (code, level) in levels.iter().enumerate() {
                    names.push(format!("{name}={level}"));
                    kinds.push(FeatureKind::Numeric);
                    columns.push(codes.iter().map(|&c| f64::from(u8::from(c == code as f64))).collect());
                }
            } else {
                names.push(name.clone());
                kinds.push(FeatureKind::Categorical { levels });
                columns.push(codes);
            }
        } else {
            names.push(name.clone());
            kinds.push(FeatureKind::Numeric);
            columns.push(impute_numeric(config, name, &raw)?);
        }
    }

    let rows: Vec<Vec<f64>> = (0..records.len()).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    Dataset::new(names, kinds, rows, labels).map_err(|e| DataError::Config(e.to_string()))
}

fn parse_number(raw: &str) -> Option<f64> {
    raw.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn label_of(config: &DatasetConfig, raw: &str, line: usize) -> Result<Class, DataError> {
    if config.is_missing(raw) {
        return Err(DataError::MissingLabel { line });
    }
    if raw == config.positive_label_value {
        return Ok(1);
    }
    if config.negative_label_values.is_empty() || config.negative_label_values.iter().any(|v| v == raw) {
        return Ok(0);
    }
    Err(DataError::LabelOutsideMapping { line, value: raw.to_string() })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn impute_numeric(config: &DatasetConfig, name: &str, raw: &[&str]) -> Result<Vec<f64>, DataError> {
    let parsed = raw
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if config.is_missing(v) {
                Ok(None)
            } else {
                parse_number(v).map(Some).ok_or_else(|| DataError::NotNumeric {
                    line: line_of(i),
                    column: name.to_string(),
                    value: v.to_string(),
                })
            }
        })
        .collect::<Result<Vec<Option<f64>>, _>>()?;
    let mut present: Vec<f64> = parsed.iter().flatten().copied().collect();
    if present.is_empty() {
        return Err(DataError::AllMissing(name.to_string()));
    }
    let fill = median(&mut present);
    Ok(parsed.into_iter().map(|v| v.unwrap_or(fill)).collect())
}

/// Most frequent non-missing value; ties go to the value seen first.
fn mode<'a>(config: &DatasetConfig, name: &str, raw: &[&'a str]) -> Result<&'a str, DataError> {
    let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
    for (i, v) in raw.iter().enumerate().filter(|(_, v)| !config.is_missing(v)) {
        counts.entry(v).or_insert((0, i)).0 += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
        .map(|(v, _)| v)
        .ok_or_else(|| DataError::AllMissing(name.to_string()))
}

fn encode_categorical(config: &DatasetConfig, name: &str, raw: &[&str]) -> Result<(Vec<f64>, Vec<String>), DataError> {
    let fill = mode(config, name, raw)?;
    let mut levels: Vec<String> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for v in raw.iter().filter(|v| !config.is_missing(v)) {
        if !index.contains_key(v) {
            index.insert(v, levels.len());
            levels.push(v.to_string());
        }
    }
    let codes = raw
        .iter()
        .map(|v| {
            let v = if config.is_missing(v) { fill } else { v };
            index[v] as f64
        })
        .collect();
    Ok((codes, levels))
}

fn binarize_protected(config: &DatasetConfig, name: &str, raw: &[&str]) -> Result<Vec<f64>, DataError> {
    if let Some(pred) = config.privileged_predicate {
        let values = impute_numeric(config, name, raw)?;
        return Ok(values.into_iter().map(|v| f64::from(u8::from(pred.holds(v)))).collect());
    }
    let fill = mode(config, name, raw)?;
    Ok(raw
        .iter()
        .map(|v| {
            let v = if config.is_missing(v) { fill } else { v };
            f64::from(u8::from(config.privileged_values.iter().any(|p| p == v)))
        })
        .collect())
}
