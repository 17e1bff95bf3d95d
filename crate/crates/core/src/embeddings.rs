//! Word-vector store for the semantic similarity predictor.
//!
//! Vectors are read from the plain-text interchange format: a header line
//! `<word-count> <dimension>` followed by one `<word> <c1> ... <cd>` line per
//! word.

use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("malformed header: {0}")]
    Header(String),
    #[error("line {line}: word `{word}` has {found} components, expected {expected}")]
    DimensionMismatch { line: usize, word: String, found: usize, expected: usize },
    #[error("line {line}: duplicate word `{word}`")]
    DuplicateWord { line: usize, word: String },
    #[error("line {line}: word `{word}` has a zero-norm vector")]
    ZeroNorm { line: usize, word: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("header declares {declared} words but {found} were read")]
    WordCount { declared: usize, found: usize },
    #[error("word `{0}` is not in the embedding vocabulary")]
    UnknownWord(String),
    #[error("k must be at least 1")]
    ZeroK,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dimension: usize,
    words: Vec<String>,
    /// Row-major, `words.len() * dimension`.
    vectors: Vec<f64>,
    norms: Vec<f64>,
    lookup: HashMap<String, usize>,
}

impl EmbeddingStore {
    pub fn new(dimension: usize) -> Result<Self, EmbeddingError> {
        if dimension == 0 {
            return Err(EmbeddingError::Header("dimension must be positive".into()));
        }
        Ok(Self { dimension, words: Vec::new(), vectors: Vec::new(), norms: Vec::new(), lookup: HashMap::new() })
    }

    /// Empty store used when no embedding file is configured.
    pub fn empty() -> Self {
        Self::new(1).expect("dimension 1 is valid")
    }

    pub fn from_pairs<I, S>(dimension: usize, pairs: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut store = Self::new(dimension)?;
        for (i, (word, vector)) in pairs.into_iter().enumerate() {
            store.insert(i + 1, word.into(), vector)?;
        }
        Ok(store)
    }

    fn insert(&mut self, line: usize, word: String, vector: Vec<f64>) -> Result<(), EmbeddingError> {
        if vector.len() != self.dimension {
            return Err(EmbeddingError::DimensionMismatch {
                line,
                word,
                found: vector.len(),
                expected: self.dimension,
            });
        }
        if self.lookup.contains_key(&word) {
            return Err(EmbeddingError::DuplicateWord { line, word });
        }
        let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(EmbeddingError::ZeroNorm { line, word });
        }
        self.lookup.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.vectors.extend(vector);
        self.norms.push(norm);
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.lookup.contains_key(word)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.lookup.get(word).map(|&i| self.row(i))
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dimension..(i + 1) * self.dimension]
    }

    fn index_of(&self, word: &str) -> Result<usize, EmbeddingError> {
        self.lookup.get(word).copied().ok_or_else(|| EmbeddingError::UnknownWord(word.to_string()))
    }

    fn cosine_at(&self, a: usize, b: usize) -> f64 {
        let dot: f64 = self.row(a).iter().zip(self.row(b)).map(|(x, y)| x * y).sum();
        // + 0.0 turns -0.0 into 0.0 so ranking ties compare equal
        (dot / (self.norms[a] * self.norms[b])).clamp(-1.0, 1.0) + 0.0
    }

    pub fn cosine(&self, w1: &str, w2: &str) -> Result<f64, EmbeddingError> {
        let a = self.index_of(w1)?;
        let b = self.index_of(w2)?;
        Ok(self.cosine_at(a, b))
    }

    /// The `k` most similar other words, by cosine descending and then word.
    pub fn top_k_proxies(&self, word: &str, k: usize) -> Result<Vec<(String, f64)>, EmbeddingError> {
        if k == 0 {
            return Err(EmbeddingError::ZeroK);
        }
        let q = self.index_of(word)?;
        let mut scored: Vec<(usize, f64)> =
            (0..self.words.len()).filter(|&i| i != q).map(|i| (i, self.cosine_at(q, i))).collect();
        scored.sort_by(|(ia, ca), (ib, cb)| cb.total_cmp(ca).then_with(|| self.words[*ia].cmp(&self.words[*ib])));
        scored.truncate(k);
        Ok(scored.into_iter().map(|(i, c)| (self.words[i].clone(), c)).collect())
    }
}

/// Reads the `<count> <dim>` text vector format.
pub fn load_embeddings<R: BufRead>(reader: R) -> Result<EmbeddingStore, EmbeddingError> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or_else(|| EmbeddingError::Header("empty input".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [count, dim] = fields.as_slice() else {
        return Err(EmbeddingError::Header(format!("expected `<count> <dimension>`, got `{header}`")));
    };
    let count: usize = count.parse().map_err(|_| EmbeddingError::Header(format!("bad word count `{count}`")))?;
    let dim: usize = dim.parse().map_err(|_| EmbeddingError::Header(format!("bad dimension `{dim}`")))?;
    let mut store = EmbeddingStore::new(dim)?;

    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        let mut parts = line.split(' ').filter(|s| !s.is_empty());
        let Some(word) = parts.next() else { continue };
        let vector = parts
            .map(|c| {
                c.parse::<f64>().map_err(|_| EmbeddingError::Malformed {
                    line: line_no,
                    message: format!("component `{c}` of `{word}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        store.insert(line_no, word.to_string(), vector)?;
    }
    if store.len() != count {
        return Err(EmbeddingError::WordCount { declared: count, found: store.len() });
    }
    Ok(store)
}
