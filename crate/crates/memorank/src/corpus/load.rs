//! Bios-corpus ingestion from delimited or line-delimited record files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde_json::Value;

use crate::corpus::{scrub_with_first_name, CandidateId, CandidateRecord, Gender, Split};
use crate::error::{Error, Result};

/// Source field names. Defaults match the Bias-in-Bios column layout
/// (`bio`, `profession`, `gender`); `name` and `split` are optional columns.
#[derive(Debug, Clone)]
pub struct FieldMap {
    pub bio: String,
    pub profession: String,
    pub gender: String,
    /// Candidate name column; the first whitespace token is treated as the
    /// first name and scrubbed from the bio.
    pub name: Option<String>,
    /// Split column for single-file corpora holding both pools. Rows whose
    /// value does not match the requested split are skipped.
    pub split: Option<String>,
}

impl Default for FieldMap {
    fn default() -> Self {
        Self {
            bio: "bio".to_string(),
            profession: "profession".to_string(),
            gender: "gender".to_string(),
            name: Some("name".to_string()),
            split: Some("split".to_string()),
        }
    }
}

fn parse_gender(value: &str, row: usize) -> Result<Gender> {
    match value.trim().to_ascii_lowercase().as_str() {
        "m" | "male" => Ok(Gender::Male),
        "f" | "female" => Ok(Gender::Female),
        other => Err(Error::UnknownGender {
            row,
            value: other.to_string(),
        }),
    }
}

fn split_matches(value: &str, split: Split) -> bool {
    value.trim().eq_ignore_ascii_case(split.as_str())
}

fn first_name_of(name: &str) -> Option<String> {
    name.split_whitespace().next().map(str::to_string)
}

struct RawRow {
    bio: String,
    profession: String,
    gender: String,
    name: Option<String>,
    split_value: Option<String>,
}

/// Load one candidate pool from `path`, tagging every record with `split`.
///
/// Supports CSV (default), TSV (`.tsv`), and JSON-lines (`.jsonl` /
/// `.ndjson`). Candidate ids are derived from the source row index, so they
/// are stable across runs over the same file. Bios are scrubbed at load time;
/// both raw and scrubbed variants are kept on the record.
pub fn load_bios(path: &Path, split: Split, fields: &FieldMap) -> Result<Vec<CandidateRecord>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let rows = match ext.as_str() {
        "jsonl" | "ndjson" => read_jsonl_rows(path, fields)?,
        "tsv" => read_delimited_rows(path, fields, b'\t')?,
        _ => read_delimited_rows(path, fields, b',')?,
    };

    let mut pool = Vec::new();
    for (row_idx, row) in rows {
        if let Some(split_value) = &row.split_value {
            if !split_matches(split_value, split) {
                continue;
            }
        }
        if row.profession.trim().is_empty() {
            return Err(Error::MalformedRow {
                row: row_idx,
                reason: format!("missing field {:?}", fields.profession),
            });
        }
        if row.bio.trim().is_empty() {
            return Err(Error::MalformedRow {
                row: row_idx,
                reason: format!("missing field {:?}", fields.bio),
            });
        }
        let gender = parse_gender(&row.gender, row_idx)?;
        let first_name = row.name.as_deref().and_then(first_name_of);
        let scrubbed_bio = scrub_with_first_name(&row.bio, first_name.as_deref());
        pool.push(CandidateRecord {
            id: CandidateId::new(format!("{}-{:06}", split.id_prefix(), row_idx)),
            profession: row.profession.trim().to_string(),
            gender,
            first_name,
            raw_bio: row.bio,
            scrubbed_bio,
            split,
        });
    }
    if pool.is_empty() {
        log::warn!("no {} records loaded from {}", split.as_str(), path.display());
    }
    Ok(pool)
}

fn read_delimited_rows(
    path: &Path,
    fields: &FieldMap,
    delimiter: u8,
) -> Result<Vec<(usize, RawRow)>> {
    let file = File::open(path).map_err(Error::io_at(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .from_reader(file);
    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers.get(0) == Some("")) {
        // Zero-byte or headerless file: treated as an empty corpus.
        return Ok(Vec::new());
    }
    let col = |name: &str| headers.iter().position(|h| h == name);

    let missing = |row: usize, name: &str| Error::MalformedRow {
        row,
        reason: format!("missing field {name:?}"),
    };
    let bio_col = col(&fields.bio).ok_or_else(|| missing(0, &fields.bio))?;
    let profession_col = col(&fields.profession).ok_or_else(|| missing(0, &fields.profession))?;
    let gender_col = col(&fields.gender).ok_or_else(|| missing(0, &fields.gender))?;
    let name_col = fields.name.as_deref().and_then(col);
    let split_col = fields.split.as_deref().and_then(col);

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row_idx = i + 1;
        let record = record.map_err(|e| Error::MalformedRow {
            row: row_idx,
            reason: e.to_string(),
        })?;
        let get = |idx: usize, name: &str| -> Result<String> {
            record
                .get(idx)
                .map(str::to_string)
                .ok_or_else(|| missing(row_idx, name))
        };
        rows.push((
            row_idx,
            RawRow {
                bio: get(bio_col, &fields.bio)?,
                profession: get(profession_col, &fields.profession)?,
                gender: get(gender_col, &fields.gender)?,
                name: name_col.and_then(|c| record.get(c)).map(str::to_string),
                split_value: split_col.and_then(|c| record.get(c)).map(str::to_string),
            },
        ));
    }
    Ok(rows)
}

fn read_jsonl_rows(path: &Path, fields: &FieldMap) -> Result<Vec<(usize, RawRow)>> {
    let file = File::open(path).map_err(Error::io_at(path))?;
    let reader = BufReader::new(file);
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let row_idx = i + 1;
        let line = line.map_err(Error::io_at(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: BTreeMap<String, Value> =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRow {
                row: row_idx,
                reason: e.to_string(),
            })?;
        let text_of = |key: &str| -> Option<String> {
            value.get(key).map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
        };
        let require = |key: &str| -> Result<String> {
            text_of(key).ok_or_else(|| Error::MalformedRow {
                row: row_idx,
                reason: format!("missing field {key:?}"),
            })
        };
        rows.push((
            row_idx,
            RawRow {
                bio: require(&fields.bio)?,
                profession: require(&fields.profession)?,
                gender: require(&fields.gender)?,
                name: fields.name.as_deref().and_then(text_of),
                split_value: fields.split.as_deref().and_then(text_of),
            },
        ));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("memorank-load-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        let mut f = File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn loads_well_formed_csv() {
        let path = write_temp(
            "ok.csv",
            "bio,profession,gender\n\
             She is a nurse with 4 years of practice.,nurse,f\n\
             He writes compilers.,software engineer,m\n\
             An experienced accountant.,accountant,female\n",
        );
        let pool = load_bios(&path, Split::Train, &FieldMap::default()).unwrap();
        assert_eq!(pool.len(), 3);
        assert_eq!(pool[0].gender, Gender::Female);
        assert_eq!(pool[0].id.as_str(), "tr-000001");
        assert_eq!(pool[0].scrubbed_bio, "_ is a nurse with 4 years of practice.");
        assert_eq!(pool[1].raw_bio, "He writes compilers.");
    }

    #[test]
    fn empty_file_gives_empty_pool() {
        let path = write_temp("empty.csv", "bio,profession,gender\n");
        let pool = load_bios(&path, Split::Test, &FieldMap::default()).unwrap();
        assert!(pool.is_empty());
    }

    #[test]
    fn missing_profession_names_the_row() {
        let path = write_temp(
            "bad.csv",
            "bio,profession,gender\nfine bio,chef,m\nanother bio,,f\n",
        );
        let err = load_bios(&path, Split::Train, &FieldMap::default()).unwrap_err();
        match err {
            Error::MalformedRow { row, .. } => assert_eq!(row, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn unknown_gender_is_rejected() {
        let path = write_temp("gender.csv", "bio,profession,gender\nbio text,chef,x\n");
        let err = load_bios(&path, Split::Train, &FieldMap::default()).unwrap_err();
        assert!(matches!(err, Error::UnknownGender { row: 1, .. }));
    }

    #[test]
    fn missing_file_is_reported() {
        let err = load_bios(
            Path::new("/nonexistent/bios.csv"),
            Split::Train,
            &FieldMap::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingFile(_)));
    }

    #[test]
    fn jsonl_with_split_column_filters_rows() {
        let path = write_temp(
            "mixed.jsonl",
            r#"{"bio": "She teaches algebra.", "profession": "professor", "gender": "f", "split": "train"}
{"bio": "He audits ledgers.", "profession": "accountant", "gender": "m", "split": "test"}
"#,
        );
        let train = load_bios(&path, Split::Train, &FieldMap::default()).unwrap();
        let test = load_bios(&path, Split::Test, &FieldMap::default()).unwrap();
        assert_eq!(train.len(), 1);
        assert_eq!(test.len(), 1);
        assert_eq!(train[0].profession, "professor");
        assert_eq!(test[0].id.as_str(), "te-000002");
    }

    #[test]
    fn name_column_is_scrubbed() {
        let path = write_temp(
            "named.csv",
            "name,bio,profession,gender\nGrace Hopper,Grace wrote the first compiler.,software engineer,f\n",
        );
        let pool = load_bios(&path, Split::Train, &FieldMap::default()).unwrap();
        assert_eq!(pool[0].first_name.as_deref(), Some("Grace"));
        assert_eq!(pool[0].scrubbed_bio, "_ wrote the first compiler.");
    }
}
