//! Text analysis: tokenizer, stemmer, stopword filter, noun identification
//! and compound splitting.

mod decompound;
mod stem;
mod stopwords;

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use stem::StemmerKind;
pub use stopwords::{default_stopwords, read_stopwords};

/// Set of stems known to the recommender (taxonomy index ∪ embedding words).
pub type Vocabulary = HashSet<String>;

#[derive(Debug, Error)]
pub enum AnalyzerError {
    #[error("stopword list contains an empty entry")]
    EmptyStopword,
    #[error("minimum token length must be at least 1")]
    MinTokenLength,
    #[error("linking morpheme list contains an empty entry")]
    EmptyLinkingMorpheme,
    #[error("noun strategy `tagger` selected but no tagger was supplied")]
    MissingTagger,
    #[error("reading stopwords: {0}")]
    Io(#[from] std::io::Error),
}

/// How tokens are recognised as nouns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NounStrategy {
    /// A token is a noun candidate iff its stem is in the vocabulary.
    #[default]
    VocabularyGated,
    /// Delegate to a [`NounTagger`].
    Tagger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyzerConfig {
    pub language: String,
    pub stemmer: StemmerKind,
    pub stopwords: Vec<String>,
    pub noun_strategy: NounStrategy,
    pub decompound: bool,
    pub min_token_length: usize,
    pub linking_morphemes: Vec<String>,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        Self::for_language("en")
    }
}

impl AnalyzerConfig {
    pub fn for_language(language: &str) -> Self {
        Self {
            language: language.to_string(),
            stemmer: StemmerKind::SuffixStrip,
            stopwords: default_stopwords(language),
            noun_strategy: NounStrategy::VocabularyGated,
            decompound: true,
            min_token_length: 2,
            linking_morphemes: vec!["s".to_string()],
        }
    }

    pub fn validate(&self) -> Result<(), AnalyzerError> {
        if self.stopwords.iter().any(|s| s.is_empty()) {
            return Err(AnalyzerError::EmptyStopword);
        }
        if self.min_token_length < 1 {
            return Err(AnalyzerError::MinTokenLength);
        }
        if self.linking_morphemes.iter().any(|s| s.is_empty()) {
            return Err(AnalyzerError::EmptyLinkingMorpheme);
        }
        Ok(())
    }
}

/// Part-of-speech hook for [`NounStrategy::Tagger`].
pub trait NounTagger: Send + Sync {
    /// `token` is the case-folded surface form.
    fn is_noun(&self, token: &str) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccurrenceSource {
    WholeToken,
    CompoundPart,
}

/// A part of a split compound, with byte offsets into the analysed text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompoundPart {
    pub text: String,
    pub stem: String,
    pub start: usize,
    pub end: usize,
    /// Linking morpheme that follows this part inside the compound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linking: Option<String>,
}

/// A noun found in a text.
///
/// `start..end` are byte offsets, `char_start..char_end` the same span in
/// Unicode scalar values. For compound parts, `parts` lists the whole split
/// of the containing token and `token_start..token_end` is that token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NounOccurrence {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    pub char_start: usize,
    pub char_end: usize,
    pub stem: String,
    pub source: OccurrenceSource,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<CompoundPart>,
    pub token_start: usize,
    pub token_end: usize,
}

/// A raw token: byte span, char span and case-folded form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub start: usize,
    pub end: usize,
    pub char_start: usize,
    pub folded: String,
}

/// Splits on every char that is not alphanumeric.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut current: Option<(usize, usize)> = None;
    for (char_idx, (byte_idx, ch)) in text.char_indices().enumerate() {
        if ch.is_alphanumeric() {
            if current.is_none() {
                current = Some((byte_idx, char_idx));
            }
        } else if let Some((start, char_start)) = current.take() {
            tokens.push(make_token(text, start, byte_idx, char_start));
        }
    }
    if let Some((start, char_start)) = current {
        tokens.push(make_token(text, start, text.len(), char_start));
    }
    tokens
}

fn make_token(text: &str, start: usize, end: usize, char_start: usize) -> Token<'_> {
    let slice = &text[start..end];
    Token { text: slice, start, end, char_start, folded: slice.to_lowercase() }
}

/// Analyzer bound to a validated config and an optional tagger.
#[derive(Clone)]
pub struct Analyzer {
    config: AnalyzerConfig,
    stopwords: HashSet<String>,
    tagger: Option<Arc<dyn NounTagger>>,
}

impl fmt::Debug for Analyzer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Analyzer").field("config", &self.config).field("tagger", &self.tagger.is_some()).finish()
    }
}

impl Analyzer {
    pub fn new(config: AnalyzerConfig) -> Result<Self, AnalyzerError> {
        config.validate()?;
        if config.noun_strategy == NounStrategy::Tagger {
            return Err(AnalyzerError::MissingTagger);
        }
        Ok(Self::build(config, None))
    }

    pub fn with_tagger(config: AnalyzerConfig, tagger: Arc<dyn NounTagger>) -> Result<Self, AnalyzerError> {
        config.validate()?;
        Ok(Self::build(config, Some(tagger)))
    }

    fn build(config: AnalyzerConfig, tagger: Option<Arc<dyn NounTagger>>) -> Self {
        let stopwords = config.stopwords.iter().map(|s| s.to_lowercase()).collect();
        Self { config, stopwords, tagger }
    }

    pub fn config(&self) -> &AnalyzerConfig {
        &self.config
    }

    pub fn stem(&self, token: &str) -> String {
        stem::stem_token(token, self.config.stemmer, &self.config.language)
    }

    pub fn is_stopword(&self, folded: &str) -> bool {
        self.stopwords.contains(folded)
    }

    /// Splits `token` into vocabulary parts.
    ///
    /// Returns the case-folded token alone when it cannot be split (or when
    /// it is itself a vocabulary word, which is always the fewest parts).
    pub fn decompound(&self, token: &str, vocabulary: &Vocabulary) -> Vec<String> {
        let folded = token.to_lowercase();
        let chars: Vec<char> = folded.chars().collect();
        match self.split(&chars, vocabulary, true) {
            Some(parts) => parts.iter().map(|p| chars[p.start..p.end].iter().collect()).collect(),
            None => vec![folded],
        }
    }

    /// Like [`Analyzer::decompound`] but only returns splits of two or more
    /// parts; `None` when the token is not a compound of known parts.
    pub fn split_compound(&self, folded: &str, vocabulary: &Vocabulary) -> Option<Vec<String>> {
        let chars: Vec<char> = folded.chars().collect();
        self.split(&chars, vocabulary, false)
            .map(|parts| parts.iter().map(|p| chars[p.start..p.end].iter().collect()).collect())
    }

    fn split(&self, chars: &[char], vocabulary: &Vocabulary, allow_whole: bool) -> Option<Vec<decompound::SplitPart>> {
        decompound::best_split(
            chars,
            self.config.min_token_length,
            &self.config.linking_morphemes,
            allow_whole,
            |part| vocabulary.contains(&self.stem(part)),
        )
    }

    /// Tokens that pass the stopword and length filters.
    pub fn content_tokens<'a>(&self, text: &'a str) -> Vec<Token<'a>> {
        tokenize(text)
            .into_iter()
            .filter(|t| t.folded.chars().count() >= self.config.min_token_length)
            .filter(|t| !self.is_stopword(&t.folded))
            .collect()
    }

    /// Noun occurrences of `text`, in document order.
    pub fn analyze(&self, text: &str, vocabulary: &Vocabulary) -> Vec<NounOccurrence> {
        let mut out = Vec::new();
        for token in self.content_tokens(text) {
            let stem = self.stem(&token.folded);
            if self.is_stopword(&stem) {
                continue;
            }
            let whole_is_noun = match self.config.noun_strategy {
                NounStrategy::VocabularyGated => vocabulary.contains(&stem),
                NounStrategy::Tagger => self.tagger.as_ref().is_some_and(|t| t.is_noun(&token.folded)),
            };
            if whole_is_noun {
                out.push(NounOccurrence {
                    surface: token.text.to_string(),
                    start: token.start,
                    end: token.end,
                    char_start: token.char_start,
                    char_end: token.char_start + token.text.chars().count(),
                    stem,
                    source: OccurrenceSource::WholeToken,
                    parts: Vec::new(),
                    token_start: token.start,
                    token_end: token.end,
                });
                continue;
            }
            if self.config.decompound {
                if let Some(parts) = self.compound_parts(&token, vocabulary) {
                    out.extend(self.part_occurrences(&token, parts));
                }
            }
        }
        out
    }

    fn compound_parts(&self, token: &Token<'_>, vocabulary: &Vocabulary) -> Option<Vec<CompoundPart>> {
        let chars: Vec<char> = token.folded.chars().collect();
        // Offsets are mapped char-for-char; give up on case folds that
        // change the char count.
        let raw: Vec<(usize, char)> = token.text.char_indices().collect();
        if raw.len() != chars.len() {
            return None;
        }
        let split = self.split(&chars, vocabulary, false)?;
        let byte_at = |c: usize| token.start + raw.get(c).map_or(token.text.len(), |(b, _)| *b);
        Some(
            split
                .into_iter()
                .map(|p| {
                    let text: String = chars[p.start..p.end].iter().collect();
                    CompoundPart {
                        stem: self.stem(&text),
                        text,
                        start: byte_at(p.start),
                        end: byte_at(p.end),
                        linking: p.linking,
                    }
                })
                .collect(),
        )
    }

    fn part_occurrences(&self, token: &Token<'_>, parts: Vec<CompoundPart>) -> Vec<NounOccurrence> {
        let char_of = |byte: usize| token.char_start + token.text[..byte - token.start].chars().count();
        parts
            .iter()
            .filter(|p| !self.is_stopword(&p.stem))
            .map(|p| NounOccurrence {
                surface: token.text[p.start - token.start..p.end - token.start].to_string(),
                start: p.start,
                end: p.end,
                char_start: char_of(p.start),
                char_end: char_of(p.end),
                stem: p.stem.clone(),
                source: OccurrenceSource::CompoundPart,
                parts: parts.clone(),
                token_start: token.start,
                token_end: token.end,
            })
            .collect()
    }
}

/// Reads a stopword list, one word per line; blank lines and `#` comments
/// are skipped.
pub fn load_stopwords<R: BufRead>(reader: R) -> Result<Vec<String>, AnalyzerError> {
    Ok(read_stopwords(reader)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity() -> Analyzer {
        let mut cfg = AnalyzerConfig::for_language("en");
        cfg.stemmer = StemmerKind::Identity;
        Analyzer::new(cfg).unwrap()
    }

    fn vocab(words: &[&str]) -> Vocabulary {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn gated_occurrences_in_order() {
        let a = identity();
        let text = "The bridge shall carry road traffic";
        let occ = a.analyze(text, &vocab(&["bridge", "road", "traffic"]));
        let got: Vec<_> = occ.iter().map(|o| (o.surface.as_str(), o.start, o.end)).collect();
        assert_eq!(got, vec![("bridge", 4, 10), ("road", 23, 27), ("traffic", 28, 35)]);
        for o in &occ {
            assert_eq!(&text[o.start..o.end], o.surface);
            assert_eq!(o.source, OccurrenceSource::WholeToken);
        }
    }

    #[test]
    fn empty_text() {
        assert!(identity().analyze("", &vocab(&["a"])).is_empty());
    }

    #[test]
    fn compound_parts_are_emitted() {
        let mut cfg = AnalyzerConfig::for_language("sv");
        cfg.stemmer = StemmerKind::Identity;
        let a = Analyzer::new(cfg).unwrap();
        let text = "Ny järnvägsbro";
        let occ = a.analyze(text, &vocab(&["järnväg", "bro"]));
        assert_eq!(occ.len(), 2);
        assert_eq!(occ[0].surface, "järnväg");
        assert_eq!(occ[1].surface, "bro");
        for o in &occ {
            assert_eq!(o.source, OccurrenceSource::CompoundPart);
            assert_eq!(&text[o.start..o.end], o.surface);
            assert_eq!(&text[o.token_start..o.token_end], "järnvägsbro");
        }
        assert_eq!(occ[0].parts[0].linking.as_deref(), Some("s"));
        // char offsets differ from byte offsets because of ä
        assert_eq!((occ[1].char_start, occ[1].char_end), (11, 14));
    }

    #[test]
    fn decompound_examples() {
        let a = identity();
        assert_eq!(a.decompound("cykelväg", &vocab(&["cykel", "väg"])), vec!["cykel", "väg"]);
        assert_eq!(a.decompound("bridge", &vocab(&["road"])), vec!["bridge"]);
        assert_eq!(a.decompound("järnvägsbro", &vocab(&["järnväg", "väg", "bro"])), vec!["järnväg", "bro"]);
    }

    #[test]
    fn stopwords_and_short_tokens_are_dropped() {
        let a = identity();
        let occ = a.analyze("the a x road", &vocab(&["the", "a", "x", "road"]));
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].stem, "road");
    }

    #[test]
    fn case_folded_stems() {
        let a = identity();
        let occ = a.analyze("BRIDGE", &vocab(&["bridge"]));
        assert_eq!(occ[0].surface, "BRIDGE");
        assert_eq!(occ[0].stem, "bridge");
    }

    struct SuffixTagger;
    impl NounTagger for SuffixTagger {
        fn is_noun(&self, token: &str) -> bool {
            token.ends_with("ion")
        }
    }

    #[test]
    fn tagger_strategy() {
        let mut cfg = AnalyzerConfig::for_language("en");
        cfg.noun_strategy = NounStrategy::Tagger;
        assert!(matches!(Analyzer::new(cfg.clone()), Err(AnalyzerError::MissingTagger)));
        let a = Analyzer::with_tagger(cfg, Arc::new(SuffixTagger)).unwrap();
        let occ = a.analyze("station and bridge", &Vocabulary::new());
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].surface, "station");
    }

    #[test]
    fn config_validation() {
        let mut cfg = AnalyzerConfig::default();
        cfg.stopwords.push(String::new());
        assert!(matches!(cfg.validate(), Err(AnalyzerError::EmptyStopword)));
        let cfg = AnalyzerConfig { min_token_length: 0, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(AnalyzerError::MinTokenLength)));
    }

    #[test]
    fn config_roundtrips_through_json() {
        let cfg = AnalyzerConfig::for_language("sv");
        let json = serde_json::to_string(&cfg).unwrap();
        let back: AnalyzerConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
        // missing fields take defaults
        let partial: AnalyzerConfig = serde_json::from_str(r#"{"stemmer":"identity"}"#).unwrap();
        assert_eq!(partial.min_token_length, 2);
    }
}
