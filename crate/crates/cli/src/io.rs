//! Reading inputs and writing results.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        line: source.line(),
        source,
    })
}

/// One value per nonblank line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?);
    }
    log::info!("read {} records from {}", out.len(), path.display());
    Ok(out)
}

/// Header row plus text cells.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(err)?;
    let header = reader.headers().map_err(err)?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    Ok((header, rows))
}

/// Destination for results: a file given by `--out`, else stdout.
pub struct Output {
    path: Option<PathBuf>,
    buf: Vec<u8>,
}

impl Output {
    pub fn new(path: Option<PathBuf>) -> Self {
        Output { path, buf: Vec::new() }
    }

    pub fn json<T: Serialize>(&mut self, value: &T) {
        serde_json::to_writer_pretty(&mut self.buf, value).expect("results serialize to JSON");
        self.buf.push(b'\n');
    }

    pub fn jsonl<T: Serialize>(&mut self, values: impl IntoIterator<Item = T>) {
        for v in values {
            serde_json::to_writer(&mut self.buf, &v).expect("results serialize to JSON");
            self.buf.push(b'\n');
        }
    }

    pub fn text(&mut self, text: &str) {
        self.buf.extend_from_slice(text.as_bytes());
        if !text.ends_with('\n') {
            self.buf.push(b'\n');
        }
    }

    pub fn finish(self) -> Result<(), CliError> {
        match &self.path {
            Some(p) => fs::write(p, &self.buf).map_err(|source| CliError::Io {
                path: p.clone(),
                source,
            }),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(&self.buf)
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Io {
                        path: PathBuf::from("<stdout>"),
                        source,
                    })
            }
        }
    }
}
