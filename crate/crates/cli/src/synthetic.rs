//! A small deterministic dataset with a planted group bias.
//!
//! Rows are laid out on a grid: `x` takes the values 0.0, 0.1, ..., 19.9
//! and each `(x, z)` cell holds ten rows whose label counts are fixed by the
//! region `x` falls in:
//!
//! | region         | privileged (z = 1) | unprivileged (z = 0) |
//! |----------------|--------------------|----------------------|
//! | `x < 5`        | 1 of 10 positive   | 1 of 10 positive     |
//! | `5 <= x < 7`   | 8 of 10 positive   | 4 of 10 positive     |
//! | `x >= 7`       | 9 of 10 positive   | 9 of 10 positive     |
//!
//! A shallow tree splits the middle band on `z`, sending unprivileged rows to
//! an unfavorable leaf, which is exactly the situation the fairness
//! adjustment targets.

use std::fmt::Write;

pub const CSV_NAME: &str = "synthetic_biased.csv";

/// Dataset config matching [`csv_text`], with `csv_path` relative to the
/// config file.
pub const CONFIG_TOML: &str = r#"# Synthetic grid with a planted bias against z = 0 for 5 <= x < 7.
csv_path = "synthetic_biased.csv"
label_column = "y"
positive_label_value = "1"
negative_label_values = ["0"]
protected_column = "z"
privileged_values = ["1"]
"#;

fn positives(x_tenths: u32, privileged: bool) -> u32 {
    match x_tenths {
        0..50 => 1,
        50..70 if privileged => 8,
        50..70 => 4,
        _ => 9,
    }
}

/// The fixture as CSV text with header `x,z,y`.
pub fn csv_text() -> String {
    let mut out = String::from("x,z,y\n");
    for x in 0..200u32 {
        for z in [0u8, 1] {
            let pos = positives(x, z == 1);
            for k in 0..10 {
                let y = u8::from(k < pos);
                writeln!(out, "{}.{},{z},{y}", x / 10, x % 10).unwrap();
            }
        }
    }
    out
}

/// Write `synthetic_biased.csv` and `synthetic_biased.toml` into `dir` and
/// return the config path.
pub fn write_fixture(dir: &std::path::Path) -> std::io::Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(CSV_NAME), csv_text())?;
    let config = dir.join("synthetic_biased.toml");
    std::fs::write(&config, CONFIG_TOML)?;
    Ok(config)
}
