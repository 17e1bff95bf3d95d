use std::io::{self, BufRead};

const ENGLISH: &[&str] = &[
    "a", "about", "above", "after", "all", "also", "an", "and", "any", "are", "as", "at", "be", "been", "before",
    "being", "between", "both", "but", "by", "can", "could", "do", "does", "during", "each", "either", "for", "from",
    "had", "has", "have", "if", "in", "into", "is", "it", "its", "may", "must", "no", "not", "of", "on", "only", "or",
    "other", "over", "shall", "should", "such", "than", "that", "the", "their", "then", "there", "these", "they",
    "this", "those", "to", "under", "up", "was", "were", "when", "where", "which", "while", "will", "with", "within",
    "would",
];

const SWEDISH: &[&str] = &[
    "alla", "allt", "att", "av", "de", "dem", "den", "denna", "dessa", "det", "detta", "där", "eller", "en", "ett",
    "från", "för", "ha", "har", "hos", "i", "inom", "inte", "kan", "med", "mellan", "men", "mot", "när", "och", "om",
    "på", "samt", "sig", "ska", "skall", "som", "så", "till", "under", "utan", "vara", "vid", "är", "över",
];

/// Built-in stopword list for `language` (`en` or `sv`); unknown languages
/// get an empty list.
pub fn default_stopwords(language: &str) -> Vec<String> {
    let list = match language {
        "en" | "eng" | "english" => ENGLISH,
        "sv" | "swe" | "swedish" => SWEDISH,
        _ => &[],
    };
    list.iter().map(|s| s.to_string()).collect()
}

pub fn read_stopwords<R: BufRead>(reader: R) -> io::Result<Vec<String>> {
    let mut words = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let word = line.trim();
        if word.is_empty() || word.starts_with('#') {
            continue;
        }
        words.push(word.to_lowercase());
    }
    Ok(words)
}
