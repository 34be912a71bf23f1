use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::SetId;
use crate::error::{Error, Result};
use crate::nn::CANONICAL_SEQ_LEN;

pub const BONN_FILES_PER_SET: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadOptions {
    pub expected_files: usize,
    /// Exact number of samples each file must hold.
    pub file_len: usize,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            expected_files: BONN_FILES_PER_SET,
            file_len: CANONICAL_SEQ_LEN,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Recording {
    /// Set letter followed by the file stem, e.g. `A:Z001`.
    pub source_id: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BonnSet {
    pub id: SetId,
    pub recordings: Vec<Recording>,
}

fn is_txt(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("txt"))
}

/// Locates the directory of `set_id` under `root`, accepting either the set
/// letter or the archive letter, in either case.
pub fn find_set_dir(root: &Path, set_id: SetId) -> Result<PathBuf> {
    let candidates = [
        set_id.letter(),
        set_id.letter().to_ascii_lowercase(),
        set_id.archive_letter(),
        set_id.archive_letter().to_ascii_lowercase(),
    ];
    candidates
        .iter()
        .map(|c| root.join(c.to_string()))
        .find(|p| p.is_dir())
        .ok_or_else(|| {
            Error::ingest(
                root,
                0,
                format!(
                    "no directory for set {set_id} (looked for {}/ or {}/)",
                    set_id.letter(),
                    set_id.archive_letter()
                ),
            )
        })
}

fn parse_file(path: &Path, file_len: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::ingest(path, 0, e.to_string()))?;
    let mut values = Vec::with_capacity(file_len);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: i64 = line
            .parse()
            .map_err(|_| Error::ingest(path, i + 1, format!("expected an integer, found `{line}`")))?;
        values.push(v as f64);
    }
    if values.len() != file_len {
        return Err(Error::ingest(
            path,
            0,
            format!("expected {file_len} samples, found {}", values.len()),
        ));
    }
    Ok(values)
}

/// Reads one set directory: `expected_files` text files, one integer sample per
/// line, ordered by file name. Values are kept exactly as written.
pub fn load_bonn_set(directory: &Path, set_id: SetId, opts: &LoadOptions) -> Result<BonnSet> {
    let entries = fs::read_dir(directory).map_err(|e| Error::ingest(directory, 0, e.to_string()))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path.is_file() && is_txt(&path) {
            files.push(path);
        }
    }
    files.sort();
    if files.len() != opts.expected_files {
        return Err(Error::ingest(
            directory,
            0,
            format!("expected {} .txt files, found {}", opts.expected_files, files.len()),
        ));
    }
    let recordings = files
        .iter()
        .map(|path| {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("?");
            Ok(Recording {
                source_id: format!("{set_id}:{stem}"),
                values: parse_file(path, opts.file_len)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BonnSet { id: set_id, recordings })
}

/// Writes sequences in the loader's format, rounding to integers. Files are
/// named `<archive letter><NNN>.txt`.
pub fn write_bonn_set<'a>(
    directory: &Path,
    set_id: SetId,
    sequences: impl IntoIterator<Item = &'a [f64]>,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(directory)?;
    let mut written = Vec::new();
    for (i, seq) in sequences.into_iter().enumerate() {
        let path = directory.join(format!("{}{:03}.txt", set_id.archive_letter(), i + 1));
        let mut out = std::io::BufWriter::new(fs::File::create(&path)?);
        for v in seq {
            writeln!(out, "{}", v.round() as i64)?;
        }
        out.flush()?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_set(dir: &Path, n: usize, len: usize) {
        let seqs: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..len).map(|t| (t as f64) - (i as f64)).collect())
            .collect();
        write_bonn_set(dir, SetId::A, seqs.iter().map(|s| s.as_slice())).unwrap();
    }

    #[test]
    fn parses_raw_integers() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = String::from("12\n-7\n");
        for _ in 0..4095 {
            body.push_str("3\r\n");
        }
        for i in 0..100 {
            fs::write(dir.path().join(format!("Z{:03}.TXT", i + 1)), &body).unwrap();
        }
        let set = load_bonn_set(dir.path(), SetId::A, &LoadOptions::default()).unwrap();
        assert_eq!(set.recordings.len(), 100);
        assert!(set.recordings.iter().all(|r| r.values.len() == 4097));
        assert_eq!(&set.recordings[0].values[..3], &[12.0, -7.0, 3.0]);
        assert_eq!(set.recordings[0].source_id, "A:Z001");
    }

    #[test]
    fn wrong_file_count() {
        let dir = tempfile::tempdir().unwrap();
        write_set(dir.path(), 99, 5);
        let opts = LoadOptions {
            expected_files: 100,
            file_len: 5,
        };
        let err = load_bonn_set(dir.path(), SetId::A, &opts).unwrap_err();
        assert!(err.to_string().contains("found 99"), "{err}");
    }

    #[test]
    fn bad_line_is_reported_with_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        write_set(dir.path(), 2, 5);
        fs::write(dir.path().join("Z002.txt"), "1\n2\n3.5\n4\n5\n").unwrap();
        let opts = LoadOptions {
            expected_files: 2,
            file_len: 5,
        };
        match load_bonn_set(dir.path(), SetId::A, &opts).unwrap_err() {
            Error::Ingest { path, line, .. } => {
                assert!(path.ends_with("Z002.txt"));
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_sample_count() {
        let dir = tempfile::tempdir().unwrap();
        write_set(dir.path(), 2, 4);
        let opts = LoadOptions {
            expected_files: 2,
            file_len: 5,
        };
        assert!(matches!(
            load_bonn_set(dir.path(), SetId::A, &opts),
            Err(Error::Ingest { .. })
        ));
    }

    #[test]
    fn set_dir_lookup() {
        let root = tempfile::tempdir().unwrap();
        fs::create_dir(root.path().join("S")).unwrap();
        fs::create_dir(root.path().join("a")).unwrap();
        assert_eq!(find_set_dir(root.path(), SetId::E).unwrap(), root.path().join("S"));
        assert_eq!(find_set_dir(root.path(), SetId::A).unwrap(), root.path().join("a"));
        assert!(find_set_dir(root.path(), SetId::C).is_err());
    }
}
