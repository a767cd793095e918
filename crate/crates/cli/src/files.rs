//! Input and output documents.
//!
//! A channel file is a JSON object
//!
//! ```json
//! { "name": "C", "matrix": [["9/10", "0"], ["1/10", "1"]], "input_dist": ["1/2", "1/2"] }
//! ```
//!
//! Rows are output letters and columns are input letters, so every column
//! sums to 1. Entries are strings holding `p/q` or an integer. Utility files
//! use the same layout with an `n x m` matrix (rows are inputs, columns are
//! actions) and no stochastic constraint. A distribution file is either an
//! object with `input_dist` or a bare array of strings.

use std::fs;
use std::path::Path;

use channel_order::fixtures::Fixture;
use channel_order::{format_rational, parse_rational, Channel, RMatrix, Rational, UtilityMatrix};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub matrix: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_dist: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum DistributionFile {
    Object { input_dist: Vec<String> },
    Bare(Vec<String>),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_all(cells: &[String], path: &Path) -> Result<Vec<Rational>, CliError> {
    cells
        .iter()
        .map(|s| parse_rational(s).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))))
        .collect()
}

pub fn load_document(path: &Path) -> Result<ChannelFile, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn matrix_of(doc: &ChannelFile, path: &Path) -> Result<RMatrix, CliError> {
    let rows = doc
        .matrix
        .iter()
        .map(|row| parse_all(row, path))
        .collect::<Result<Vec<_>, _>>()?;
    RMatrix::from_rows(rows).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn dist_of(doc: &ChannelFile, path: &Path) -> Result<Option<Vec<Rational>>, CliError> {
    doc.input_dist.as_ref().map(|d| parse_all(d, path)).transpose()
}

pub struct LoadedChannel {
    pub channel: Channel,
    pub dist: Option<Vec<Rational>>,
}

pub fn load_channel(path: &Path) -> Result<LoadedChannel, CliError> {
    let doc = load_document(path)?;
    let channel = Channel::new(matrix_of(&doc, path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(LoadedChannel {
        channel,
        dist: dist_of(&doc, path)?,
    })
}

pub fn load_utility(path: &Path) -> Result<UtilityMatrix, CliError> {
    let doc = load_document(path)?;
    Ok(UtilityMatrix::new(matrix_of(&doc, path)?))
}

pub fn load_distribution(path: &Path) -> Result<Vec<Rational>, CliError> {
    let text = read(path)?;
    let cells = match serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))? {
        DistributionFile::Object { input_dist } => input_dist,
        DistributionFile::Bare(v) => v,
    };
    parse_all(&cells, path)
}

fn cells(m: &RMatrix) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect()
}

/// Writes `c.json`, `cbar.json` and `utility.json` for a fixture.
pub fn export_fixture(fixture: &Fixture, dir: &Path) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    let dist: Vec<String> = fixture.pi.weights().iter().map(format_rational).collect();
    let docs = [
        ("c.json", "C", cells(fixture.c.matrix()), Some(dist.clone())),
        ("cbar.json", "C̄", cells(fixture.cbar.matrix()), Some(dist)),
        ("utility.json", "U", cells(fixture.utility.matrix()), None),
    ];
    let mut written = Vec::new();
    for (file, name, matrix, input_dist) in docs {
        let doc = ChannelFile {
            name: Some(format!("{} {name}", fixture.id)),
            matrix,
            input_dist,
        };
        let path = dir.join(file);
        let text = serde_json::to_string_pretty(&doc).expect("plain strings serialize");
        fs::write(&path, text + "\n").map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        written.push(path.display().to_string());
    }
    Ok(written)
}
