//! Light suffix-stripping stemmers.
//!
//! Every rule only removes a suffix, so a stem is always a prefix of the
//! case-folded token. Rules are applied until no rule matches, which makes
//! the stemmer idempotent.

use serde::{Deserialize, Serialize};

/// Stemmer selection for an analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StemmerKind {
    /// Case folding only.
    Identity,
    /// Language-specific suffix stripping.
    #[default]
    SuffixStrip,
}

/// Characters a stem must keep after a suffix is removed.
const MIN_STEM_CHARS: usize = 3;

struct Rule {
    suffix: &'static str,
    /// The suffix is not removed when the preceding char is one of these.
    unless_after: &'static [char],
}

const fn rule(suffix: &'static str) -> Rule {
    Rule { suffix, unless_after: &[] }
}

const ENGLISH: &[Rule] = &[rule("ings"), rule("ing"), rule("ed"), Rule { suffix: "s", unless_after: &['s', 'u', 'i'] }];

// Definite and plural endings, longest first.
const SWEDISH: &[Rule] = &[
    rule("arnas"),
    rule("ernas"),
    rule("ornas"),
    rule("arna"),
    rule("erna"),
    rule("orna"),
    rule("heten"),
    rule("heter"),
    rule("ande"),
    rule("ende"),
    rule("aste"),
    rule("ens"),
    rule("ets"),
    rule("are"),
    rule("ast"),
    rule("en"),
    rule("ar"),
    rule("er"),
    rule("or"),
    rule("et"),
    rule("na"),
    rule("a"),
    rule("e"),
];

fn rules_for(language: &str) -> &'static [Rule] {
    match language {
        "sv" | "swe" | "swedish" => SWEDISH,
        _ => ENGLISH,
    }
}

/// Case-folds `token` and, for [`StemmerKind::SuffixStrip`], strips
/// suffixes until a fixpoint is reached.
pub fn stem_token(token: &str, kind: StemmerKind, language: &str) -> String {
    let mut word = token.to_lowercase();
    if kind == StemmerKind::Identity {
        return word;
    }
    let rules = rules_for(language);
    while let Some(next) = strip_once(&word, rules) {
        word = next;
    }
    word
}

fn strip_once(word: &str, rules: &[Rule]) -> Option<String> {
    for r in rules {
        let Some(rest) = word.strip_suffix(r.suffix) else {
            continue;
        };
        if rest.chars().count() < MIN_STEM_CHARS {
            continue;
        }
        if let Some(prev) = rest.chars().last() {
            if r.unless_after.contains(&prev) {
                continue;
            }
        }
        return Some(rest.to_string());
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_folds_case() {
        assert_eq!(stem_token("Bridges", StemmerKind::Identity, "en"), "bridges");
    }

    #[test]
    fn english_plurals() {
        let s = |t| stem_token(t, StemmerKind::SuffixStrip, "en");
        assert_eq!(s("bridges"), "bridge");
        assert_eq!(s("bridge"), "bridge");
        assert_eq!(s("railings"), "rail");
        assert_eq!(s("glass"), "glass");
        assert_eq!(s("bus"), "bus");
        assert_eq!(s("sings"), "sing");
    }

    #[test]
    fn swedish_definite_forms() {
        let s = |t| stem_token(t, StemmerKind::SuffixStrip, "sv");
        assert_eq!(s("broarna"), "bro");
        assert_eq!(s("järnvägen"), "järnväg");
        assert_eq!(s("bro"), "bro");
    }

    #[test]
    fn short_tokens_are_still_stemmed() {
        // length filtering belongs to the analyzer
        assert_eq!(stem_token("X", StemmerKind::SuffixStrip, "en"), "x");
    }

    proptest! {
        #[test]
        fn idempotent_prefix_reduction(t in "[a-zåäö]{1,14}", sv in any::<bool>()) {
            let lang = if sv { "sv" } else { "en" };
            let once = stem_token(&t, StemmerKind::SuffixStrip, lang);
            let twice = stem_token(&once, StemmerKind::SuffixStrip, lang);
            prop_assert_eq!(&once, &twice);
            prop_assert!(t.starts_with(once.as_str()));
            prop_assert!(once.len() <= t.len());
        }
    }
}
