use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::DataError;

/// Numeric rule deciding privilege, e.g. `age >= 25`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivilegedPredicate {
    pub op: PredicateOp,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredicateOp {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

impl PrivilegedPredicate {
    pub fn holds(&self, x: f64) -> bool {
        match self.op {
            PredicateOp::Ge => x >= self.value,
            PredicateOp::Gt => x > self.value,
            PredicateOp::Le => x <= self.value,
            PredicateOp::Lt => x < self.value,
        }
    }
}

fn default_missing() -> Vec<String> {
    vec![String::new(), "?".into(), "NA".into(), "NaN".into()]
}

fn default_true() -> bool {
    true
}

/// How to turn one CSV file into a [`crate::Dataset`]. Read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// Relative paths are resolved against the config file's directory.
    pub csv_path: PathBuf,
    pub label_column: String,
    pub positive_label_value: String,
    /// When set, label values outside `positive_label_value` and this list
    /// are rejected. When empty, every other value maps to class 0.
    #[serde(default)]
    pub negative_label_values: Vec<String>,
    pub protected_column: String,
    /// Raw values mapped to privileged (1). Exactly one of this and
    /// `privileged_predicate` must be given.
    #[serde(default)]
    pub privileged_values: Vec<String>,
    #[serde(default)]
    pub privileged_predicate: Option<PrivilegedPredicate>,
    #[serde(default)]
    pub drop_columns: Vec<String>,
    #[serde(default)]
    pub categorical_columns: Vec<String>,
    /// Treat any column with a non-numeric value as categorical.
    #[serde(default = "default_true")]
    pub auto_detect_categorical: bool,
    /// One-hot encode categorical columns other than the protected one.
    #[serde(default)]
    pub one_hot: bool,
    #[serde(default = "default_missing")]
    pub missing_values: Vec<String>,
}

impl DatasetConfig {
    pub fn new(csv_path: impl Into<PathBuf>, label_column: &str, positive_label_value: &str, protected_column: &str) -> Self {
        Self {
            csv_path: csv_path.into(),
            label_column: label_column.into(),
            positive_label_value: positive_label_value.into(),
            negative_label_values: Vec::new(),
            protected_column: protected_column.into(),
            privileged_values: Vec::new(),
            privileged_predicate: None,
            drop_columns: Vec::new(),
            categorical_columns: Vec::new(),
            auto_detect_categorical: true,
            one_hot: false,
            missing_values: default_missing(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, DataError> {
        let cfg: DatasetConfig = toml::from_str(text).map_err(|e| DataError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a TOML config and resolve `csv_path` against its directory.
    pub fn from_file(path: &Path) -> Result<Self, DataError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| DataError::Io { path: path.display().to_string(), source })?;
        let mut cfg = Self::from_toml_str(&text)?;
        if cfg.csv_path.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.csv_path = dir.join(&cfg.csv_path);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        match (self.privileged_values.is_empty(), self.privileged_predicate.is_some()) {
            (true, false) => {
                return Err(DataError::Config("privileged_values must be nonempty (or give privileged_predicate)".into()))
            }
            (false, true) => {
                return Err(DataError::Config("give either privileged_values or privileged_predicate, not both".into()))
            }
            _ => {}
        }
        if self.label_column == self.protected_column {
            return Err(DataError::Config("label and protected columns must differ".into()));
        }
        for c in [&self.label_column, &self.protected_column] {
            if self.drop_columns.contains(c) {
                return Err(DataError::Config(format!("column {c:?} cannot be dropped")));
            }
        }
        Ok(())
    }

    pub(crate) fn is_missing(&self, raw: &str) -> bool {
        self.missing_values.iter().any(|m| m == raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_toml() {
        let cfg = DatasetConfig::from_toml_str(
            r#"
            csv_path = "adult.csv"
            label_column = "income"
            positive_label_value = ">50K"
            protected_column = "sex"
            privileged_values = ["Male"]
            drop_columns = ["fnlwgt"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.privileged_values, vec!["Male"]);
        assert!(cfg.auto_detect_categorical);
        assert!(cfg.is_missing("?"));
    }

    #[test]
    fn predicate_config() {
        let cfg = DatasetConfig::from_toml_str(
            r#"
            csv_path = "bank.csv"
            label_column = "y"
            positive_label_value = "yes"
            protected_column = "age"
            privileged_predicate = { op = ">=", value = 25.0 }
            "#,
        )
        .unwrap();
        let p = cfg.privileged_predicate.unwrap();
        assert!(p.holds(25.0) && !p.holds(24.9));
    }

    #[test]
    fn requires_privilege_rule() {
        let err = DatasetConfig::from_toml_str(
            r#"
            csv_path = "x.csv"
            label_column = "y"
            positive_label_value = "1"
            protected_column = "z"
            "#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("privileged_values"));
    }
}
