//! Document data model and streaming corpus I/O.
//!
//! A corpus is stored as UTF-8 JSONL: one document per line with the fields
//! `id`, `text`, `lang`, `source` and `quality`. JSON string escaping keeps
//! embedded newlines intact, so write-then-read is the identity on any
//! document sequence. Unknown fields found in a record are preserved and
//! re-emitted on write.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Language tag of a document. The pipeline is bilingual by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    Ro,
    En,
}

impl Lang {
    /// Both supported languages, in stable order.
    pub const ALL: [Lang; 2] = [Lang::Ro, Lang::En];

    pub fn as_str(&self) -> &'static str {
        match self {
            Lang::Ro => "ro",
            Lang::En => "en",
        }
    }
}

impl std::str::FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ro" => Ok(Lang::Ro),
            "en" => Ok(Lang::En),
            other => Err(format!("unsupported language tag `{other}` (expected ro|en)")),
        }
    }
}

impl std::fmt::Display for Lang {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Quality tier. `High` marks documents eligible for end-of-training repetition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quality {
    #[default]
    Standard,
    High,
}

/// One corpus record: text plus language, provenance and quality metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub lang: Lang,
    pub source: String,
    #[serde(default)]
    pub quality: Quality,
    /// Fields not part of the schema; carried through read/write untouched.
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl Document {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        lang: Lang,
        source: impl Into<String>,
    ) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            lang,
            source: source.into(),
            quality: Quality::Standard,
            extra: serde_json::Map::new(),
        }
    }

    pub fn with_quality(mut self, quality: Quality) -> Self {
        self.quality = quality;
        self
    }
}

/// Summary counters over a document sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub documents: u64,
    pub text_bytes: u64,
    pub ro_documents: u64,
    pub en_documents: u64,
}

impl CorpusSummary {
    pub fn add(&mut self, doc: &Document) {
        self.documents += 1;
        self.text_bytes += doc.text.len() as u64;
        match doc.lang {
            Lang::Ro => self.ro_documents += 1,
            Lang::En => self.en_documents += 1,
        }
    }
}

/// An in-memory corpus: ordered documents plus summary counters.
///
/// Counters are derived from the sequence at construction, so they always
/// equal the recomputed values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
    summary: CorpusSummary,
}

impl Corpus {
    pub fn from_documents(documents: Vec<Document>) -> Self {
        let mut summary = CorpusSummary::default();
        for doc in &documents {
            summary.add(doc);
        }
        Corpus { documents, summary }
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    pub fn summary(&self) -> &CorpusSummary {
        &self.summary
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: cannot open: {source}")]
    Open {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {reason}")]
    Malformed {
        path: PathBuf,
        line: u64,
        reason: String,
    },
    #[error("{path}:{line}: duplicate document id `{id}`")]
    DuplicateId { path: PathBuf, line: u64, id: String },
    #[error("{path}: I/O error: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Streaming reader over a JSONL corpus file.
///
/// Yields documents in file order while holding only the current line in
/// memory. Document ids are tracked to reject duplicates.
pub struct CorpusReader<R: BufRead> {
    reader: R,
    path: PathBuf,
    line: u64,
    seen_ids: HashSet<String>,
    buf: String,
}

impl CorpusReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref().to_path_buf();
        let file = File::open(&path).map_err(|source| CorpusError::Open {
            path: path.clone(),
            source,
        })?;
        Ok(CorpusReader::new(BufReader::new(file), path))
    }
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(reader: R, path: impl Into<PathBuf>) -> Self {
        CorpusReader {
            reader,
            path: path.into(),
            line: 0,
            seen_ids: HashSet::new(),
            buf: String::new(),
        }
    }

    fn parse_line(&mut self) -> Result<Document, CorpusError> {
        let doc: Document = serde_json::from_str(&self.buf).map_err(|e| CorpusError::Malformed {
            path: self.path.clone(),
            line: self.line,
            reason: e.to_string(),
        })?;
        if doc.id.is_empty() {
            return Err(CorpusError::Malformed {
                path: self.path.clone(),
                line: self.line,
                reason: "empty document id".into(),
            });
        }
        if !self.seen_ids.insert(doc.id.clone()) {
            return Err(CorpusError::DuplicateId {
                path: self.path.clone(),
                line: self.line,
                id: doc.id,
            });
        }
        Ok(doc)
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<Document, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            self.line += 1;
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {
                    if self.buf.trim().is_empty() {
                        continue; // tolerate blank lines (e.g. trailing newline)
                    }
                    return Some(self.parse_line());
                }
                Err(source) => {
                    return Some(Err(CorpusError::Io {
                        path: self.path.clone(),
                        source,
                    }))
                }
            }
        }
    }
}

/// Streams documents from a JSONL corpus file.
pub fn read_corpus(
    path: impl AsRef<Path>,
) -> Result<impl Iterator<Item = Result<Document, CorpusError>>, CorpusError> {
    CorpusReader::open(path)
}

/// Reads a whole corpus into memory. Convenience for desk-scale inputs.
pub fn read_corpus_vec(path: impl AsRef<Path>) -> Result<Vec<Document>, CorpusError> {
    read_corpus(path)?.collect()
}

/// Incremental corpus writer; one JSON record per line.
pub struct CorpusWriter<W: Write> {
    writer: W,
    path: PathBuf,
    summary: CorpusSummary,
}

impl CorpusWriter<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|source| CorpusError::Open {
            path: path.clone(),
            source,
        })?;
        Ok(CorpusWriter::new(BufWriter::new(file), path))
    }
}

impl<W: Write> CorpusWriter<W> {
    pub fn new(writer: W, path: impl Into<PathBuf>) -> Self {
        CorpusWriter {
            writer,
            path: path.into(),
            summary: CorpusSummary::default(),
        }
    }

    pub fn write(&mut self, doc: &Document) -> Result<(), CorpusError> {
        let line = serde_json::to_string(doc).map_err(|e| CorpusError::Io {
            path: self.path.clone(),
            source: std::io::Error::other(e),
        })?;
        self.write_raw(line.as_bytes())?;
        self.summary.add(doc);
        Ok(())
    }

    fn write_raw(&mut self, bytes: &[u8]) -> Result<(), CorpusError> {
        let io_err = |path: &PathBuf, source| CorpusError::Io {
            path: path.clone(),
            source,
        };
        self.writer
            .write_all(bytes)
            .map_err(|e| io_err(&self.path, e))?;
        self.writer
            .write_all(b"\n")
            .map_err(|e| io_err(&self.path, e))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<CorpusSummary, CorpusError> {
        self.writer.flush().map_err(|source| CorpusError::Io {
            path: self.path.clone(),
            source,
        })?;
        Ok(self.summary)
    }
}

/// Writes a document stream to a JSONL file, returning summary counters.
pub fn write_corpus<'a>(
    docs: impl IntoIterator<Item = &'a Document>,
    path: impl AsRef<Path>,
) -> Result<CorpusSummary, CorpusError> {
    let mut writer = CorpusWriter::create(path)?;
    for doc in docs {
        writer.write(doc)?;
    }
    writer.finish()
}

/// Reads a corpus from any readable source (useful for stdin or tests).
pub fn read_corpus_from<R: Read>(
    reader: R,
    label: &str,
) -> impl Iterator<Item = Result<Document, CorpusError>> {
    CorpusReader::new(BufReader::new(reader), label)
}
