//! Domain taxonomy: loading, validation, the stem → objects noun index and
//! the token-overlap search used by the manual (search) arm.
//!
//! # File format
//!
//! UTF-8 JSON Lines. The first line is a header object
//! `{"format":"taxonomy","version":1}`; every following non-blank line is one
//! object:
//!
//! ```text
//! {"format":"taxonomy","version":1}
//! {"code":"A10","label":"Bridge","description":"Road bridge","synonyms":["viaduct"],"parent_code":null}
//! ```
//!
//! `synonyms` and `parent_code` may be omitted.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textproc::{Analyzer, AnalyzerConfig, Vocabulary};

pub const TAXONOMY_FORMAT: &str = "taxonomy";
pub const TAXONOMY_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: missing or invalid header (expected {{\"format\":\"taxonomy\",\"version\":1}})")]
    Header { line: usize },
    #[error("line {line}: unsupported taxonomy format version {version}")]
    Version { line: usize, version: u32 },
    #[error("line {line}: empty object code")]
    EmptyCode { line: usize },
    #[error("line {line}: duplicate object code `{code}`")]
    DuplicateCode { code: String, line: usize },
    #[error("line {line}: object `{code}` has an empty label")]
    EmptyLabel { code: String, line: usize },
    #[error("line {line}: object `{code}` refers to unknown parent `{parent}`")]
    DanglingParent { code: String, parent: String, line: usize },
    #[error("line {line}: object `{code}` is part of a parent cycle")]
    ParentCycle { code: String, line: usize },
    #[error("search query contains no searchable tokens")]
    EmptyQuery,
    #[error("search limit must be at least 1")]
    ZeroLimit,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyObject {
    pub code: String,
    pub label: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default)]
    pub parent_code: Option<String>,
}

impl TaxonomyObject {
    /// Label, description and synonyms, in that order.
    pub fn text_fields(&self) -> impl Iterator<Item = &str> {
        [self.label.as_str(), self.description.as_str()].into_iter().chain(self.synonyms.iter().map(String::as_str))
    }
}

#[derive(Debug, Deserialize)]
struct Header {
    format: String,
    version: u32,
}

/// Validated taxonomy keyed by object code.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Taxonomy {
    objects: BTreeMap<String, TaxonomyObject>,
}

impl Taxonomy {
    /// Validates `objects` as if they had been read from a file, one per
    /// line after the header.
    pub fn from_objects(objects: Vec<TaxonomyObject>) -> Result<Self, TaxonomyError> {
        let lines = (2..).zip(objects).collect();
        Self::validate(lines)
    }

    fn validate(records: Vec<(usize, TaxonomyObject)>) -> Result<Self, TaxonomyError> {
        let mut objects = BTreeMap::new();
        let mut lines = BTreeMap::new();
        for (line, obj) in records {
            if obj.code.trim().is_empty() {
                return Err(TaxonomyError::EmptyCode { line });
            }
            if obj.label.trim().is_empty() {
                return Err(TaxonomyError::EmptyLabel { code: obj.code, line });
            }
            if objects.contains_key(&obj.code) {
                return Err(TaxonomyError::DuplicateCode { code: obj.code, line });
            }
            lines.insert(obj.code.clone(), line);
            objects.insert(obj.code.clone(), obj);
        }
        for obj in objects.values() {
            let Some(parent) = &obj.parent_code else {
                continue;
            };
            if !objects.contains_key(parent) {
                return Err(TaxonomyError::DanglingParent {
                    code: obj.code.clone(),
                    parent: parent.clone(),
                    line: lines[&obj.code],
                });
            }
        }
        for code in objects.keys() {
            let mut seen = HashSet::new();
            let mut cursor = Some(code);
            while let Some(c) = cursor {
                if !seen.insert(c) {
                    return Err(TaxonomyError::ParentCycle { code: code.clone(), line: lines[code] });
                }
                cursor = objects[c].parent_code.as_ref();
            }
        }
        Ok(Self { objects })
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn get(&self, code: &str) -> Option<&TaxonomyObject> {
        self.objects.get(code)
    }

    /// Objects in code order.
    pub fn iter(&self) -> impl Iterator<Item = &TaxonomyObject> {
        self.objects.values()
    }
}

/// Reads a taxonomy file (see the module docs for the format).
pub fn load_taxonomy<R: BufRead>(reader: R) -> Result<Taxonomy, TaxonomyError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (header_line, header) = loop {
        match lines.next() {
            None => return Err(TaxonomyError::Header { line: 1 }),
            Some((n, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break (n, line);
                }
            }
        }
    };
    let header: Header = serde_json::from_str(&header).map_err(|_| TaxonomyError::Header { line: header_line })?;
    if header.format != TAXONOMY_FORMAT {
        return Err(TaxonomyError::Header { line: header_line });
    }
    if header.version != TAXONOMY_VERSION {
        return Err(TaxonomyError::Version { line: header_line, version: header.version });
    }

    let mut records = Vec::new();
    for (n, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let obj: TaxonomyObject =
            serde_json::from_str(&line).map_err(|e| TaxonomyError::Malformed { line: n, message: e.to_string() })?;
        records.push((n, obj));
    }
    Taxonomy::validate(records)
}

/// Writes `taxonomy` in the file format read by [`load_taxonomy`].
pub fn write_taxonomy<W: std::io::Write>(taxonomy: &Taxonomy, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{{\"format\":\"{TAXONOMY_FORMAT}\",\"version\":{TAXONOMY_VERSION}}}")?;
    for obj in taxonomy.iter() {
        serde_json::to_writer(&mut out, obj)?;
        writeln!(out)?;
    }
    Ok(())
}

/// Inverted index from case-folded noun stems to the objects whose text
/// contains them. `f_noun(stem)` is the size of the object set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NounIndex {
    entries: BTreeMap<String, BTreeSet<String>>,
}

impl NounIndex {
    /// Indexes every content token of every text field, plus the parts of
    /// tokens that split into other indexed words when decompounding is on.
    pub fn build(taxonomy: &Taxonomy, analyzer: &Analyzer) -> Self {
        let mut per_object: Vec<(&str, Vec<(String, String)>)> = Vec::new();
        let mut whole: Vocabulary = Vocabulary::new();
        for obj in taxonomy.iter() {
            let mut tokens = Vec::new();
            for field in obj.text_fields() {
                for t in analyzer.content_tokens(field) {
                    let stem = analyzer.stem(&t.folded);
                    if analyzer.is_stopword(&stem) {
                        continue;
                    }
                    whole.insert(stem.clone());
                    tokens.push((t.folded, stem));
                }
            }
            per_object.push((&obj.code, tokens));
        }

        let mut entries: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (code, tokens) in per_object {
            for (folded, stem) in tokens {
                entries.entry(stem).or_default().insert(code.to_string());
                if !analyzer.config().decompound {
                    continue;
                }
                let Some(parts) = analyzer.split_compound(&folded, &whole) else {
                    continue;
                };
                for part in parts {
                    let part_stem = analyzer.stem(&part);
                    if analyzer.is_stopword(&part_stem) {
                        continue;
                    }
                    entries.entry(part_stem).or_default().insert(code.to_string());
                }
            }
        }
        Self { entries }
    }

    /// Object codes and `f_noun` for `stem`; unknown stems give `(∅, 0)`.
    pub fn lookup(&self, stem: &str) -> (Vec<&str>, usize) {
        match self.entries.get(&stem.to_lowercase()) {
            Some(codes) => (codes.iter().map(String::as_str).collect(), codes.len()),
            None => (Vec::new(), 0),
        }
    }

    pub fn objects(&self, stem: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(&stem.to_lowercase())
    }

    pub fn f_noun(&self, stem: &str) -> usize {
        self.objects(stem).map_or(0, BTreeSet::len)
    }

    pub fn contains(&self, stem: &str) -> bool {
        self.entries.contains_key(&stem.to_lowercase())
    }

    pub fn stems(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub const INDEX_FORMAT: &str = "noun-index";

/// Serialised form of a noun index together with the analyzer that built it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexFile {
    pub format: String,
    pub version: u32,
    pub analyzer: AnalyzerConfig,
    pub objects: usize,
    pub index: NounIndex,
}

impl IndexFile {
    pub fn new(index: NounIndex, analyzer: AnalyzerConfig, objects: usize) -> Self {
        Self { format: INDEX_FORMAT.to_string(), version: 1, analyzer, objects, index }
    }

    /// Parses an index file written by [`IndexFile::new`] + serde_json.
    pub fn read<R: std::io::Read>(reader: R) -> Result<Self, TaxonomyError> {
        let file: IndexFile = serde_json::from_reader(reader)
            .map_err(|e| TaxonomyError::Malformed { line: e.line(), message: e.to_string() })?;
        if file.format != INDEX_FORMAT {
            return Err(TaxonomyError::Malformed {
                line: 1,
                message: format!("format is `{}`, expected `{INDEX_FORMAT}`", file.format),
            });
        }
        if file.version != 1 {
            return Err(TaxonomyError::Version { line: 1, version: file.version });
        }
        Ok(file)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub code: String,
    pub label: String,
    /// Distinct query tokens found in any field.
    pub matched_tokens: usize,
    /// Distinct query tokens found in the label or a synonym.
    pub label_matches: usize,
    /// `matched_tokens / query tokens`.
    pub score: f64,
}

/// Token-overlap search over labels, descriptions and synonyms.
///
/// Ranked by matched query tokens, then label/synonym matches, then code.
pub fn search_taxonomy(
    taxonomy: &Taxonomy,
    analyzer: &Analyzer,
    query: &str,
    limit: usize,
) -> Result<Vec<SearchHit>, TaxonomyError> {
    if limit == 0 {
        return Err(TaxonomyError::ZeroLimit);
    }
    let stems_of = |text: &str| -> BTreeSet<String> {
        analyzer.content_tokens(text).into_iter().map(|t| analyzer.stem(&t.folded)).collect()
    };
    let query_stems = stems_of(query);
    if query_stems.is_empty() {
        return Err(TaxonomyError::EmptyQuery);
    }

    let mut hits: Vec<SearchHit> = taxonomy
        .iter()
        .filter_map(|obj| {
            let mut name = stems_of(&obj.label);
            for syn in &obj.synonyms {
                name.extend(stems_of(syn));
            }
            let description = stems_of(&obj.description);
            let label_matches = query_stems.iter().filter(|s| name.contains(*s)).count();
            let matched = query_stems.iter().filter(|s| name.contains(*s) || description.contains(*s)).count();
            (matched > 0).then(|| SearchHit {
                code: obj.code.clone(),
                label: obj.label.clone(),
                matched_tokens: matched,
                label_matches,
                score: matched as f64 / query_stems.len() as f64,
            })
        })
        .collect();
    hits.sort_by(|a, b| {
        b.matched_tokens
            .cmp(&a.matched_tokens)
            .then(b.label_matches.cmp(&a.label_matches))
            .then_with(|| a.code.cmp(&b.code))
    });
    hits.truncate(limit);
    Ok(hits)
}
