//! Dictionary-based compound splitting.
//!
//! A split is a sequence of parts that are all known to the dictionary,
//! optionally separated by one linking morpheme per junction (Swedish
//! `järnväg+s+bro`). Among the valid splits the splitter picks the one with
//! the fewest parts, then the longest first part, then the longest second
//! part and so on; a junction without a linking morpheme wins a remaining
//! tie.

use std::cmp::Ordering;

/// One part of a split, in char offsets of the case-folded token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPart {
    pub start: usize,
    pub end: usize,
    /// Linking morpheme consumed right after this part, if any.
    pub linking: Option<String>,
}

#[derive(Debug, Clone)]
struct Candidate {
    parts: Vec<SplitPart>,
}

impl Candidate {
    fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.parts.iter().map(|p| p.end - p.start)
    }

    /// `Less` means `self` is preferred.
    fn preference(&self, other: &Self) -> Ordering {
        self.parts.len().cmp(&other.parts.len()).then_with(|| other.lengths().cmp(self.lengths())).then_with(|| {
            let links = |c: &Candidate| c.parts.iter().filter(|p| p.linking.is_some()).count();
            links(self).cmp(&links(other))
        })
    }
}

/// Finds the preferred split of `chars` whose parts all satisfy `known`.
///
/// With `allow_whole` false the single-part split covering the whole token
/// is not considered, so only genuine compounds are returned.
pub(crate) fn best_split<F>(
    chars: &[char],
    min_part_chars: usize,
    linking: &[String],
    allow_whole: bool,
    known: F,
) -> Option<Vec<SplitPart>>
where
    F: Fn(&str) -> bool,
{
    let n = chars.len();
    let min_part_chars = min_part_chars.max(1);
    let linking: Vec<Vec<char>> = linking.iter().filter(|m| !m.is_empty()).map(|m| m.chars().collect()).collect();

    // best[i]: preferred split of chars[i..], filled right to left.
    let mut best: Vec<Option<Candidate>> = vec![None; n + 1];
    for start in (0..n).rev() {
        let mut chosen: Option<Candidate> = None;
        for end in (start + min_part_chars)..=n {
            if start == 0 && end == n && !allow_whole {
                continue;
            }
            let part: String = chars[start..end].iter().collect();
            if !known(&part) {
                continue;
            }
            let mut consider = |cand: Candidate| {
                let better = match &chosen {
                    None => true,
                    Some(cur) => cand.preference(cur) == Ordering::Less,
                };
                if better {
                    chosen = Some(cand);
                }
            };
            if end == n {
                consider(Candidate { parts: vec![SplitPart { start, end, linking: None }] });
                continue;
            }
            if let Some(rest) = &best[end] {
                let mut parts = vec![SplitPart { start, end, linking: None }];
                parts.extend(rest.parts.iter().cloned());
                consider(Candidate { parts });
            }
            for morpheme in &linking {
                let next = end + morpheme.len();
                if next >= n || chars[end..next] != morpheme[..] {
                    continue;
                }
                if let Some(rest) = &best[next] {
                    let mut parts = vec![SplitPart { start, end, linking: Some(morpheme.iter().collect()) }];
                    parts.extend(rest.parts.iter().cloned());
                    consider(Candidate { parts });
                }
            }
        }
        best[start] = chosen;
    }
    best[0].take().map(|c| c.parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn split(token: &str, vocab: &[&str], allow_whole: bool) -> Option<Vec<String>> {
        let vocab: HashSet<&str> = vocab.iter().copied().collect();
        let chars: Vec<char> = token.chars().collect();
        best_split(&chars, 2, &["s".to_string()], allow_whole, |p| vocab.contains(p))
            .map(|parts| parts.iter().map(|p| chars[p.start..p.end].iter().collect()).collect())
    }

    #[test]
    fn two_part_compound() {
        assert_eq!(split("cykelväg", &["cykel", "väg"], true), Some(vec!["cykel".into(), "väg".into()]));
    }

    #[test]
    fn linking_s_is_consumed() {
        assert_eq!(split("järnvägsbro", &["järnväg", "väg", "bro"], true), Some(vec!["järnväg".into(), "bro".into()]));
    }

    #[test]
    fn whole_token_wins_when_allowed() {
        assert_eq!(split("cykelväg", &["cykelväg", "cykel", "väg"], true), Some(vec!["cykelväg".into()]));
        assert_eq!(split("cykelväg", &["cykelväg", "cykel", "väg"], false), Some(vec!["cykel".into(), "väg".into()]));
    }

    #[test]
    fn longest_first_part_breaks_ties() {
        // ab|cde and abc|de are both two-part splits
        assert_eq!(split("abcde", &["ab", "cde", "abc", "de"], true), Some(vec!["abc".into(), "de".into()]));
    }

    #[test]
    fn fewest_parts_beats_long_first_part() {
        assert_eq!(split("aabbcc", &["aabb", "cc", "aa", "bbcc"], true), Some(vec!["aabb".into(), "cc".into()]));
        assert_eq!(
            split("aabbccdd", &["aabbcc", "dd", "aa", "bbccdd", "bb", "cc"], true),
            Some(vec!["aabbcc".into(), "dd".into()])
        );
    }

    #[test]
    fn no_split() {
        assert_eq!(split("bridge", &["bri"], true), None);
    }

    #[test]
    fn long_repetitive_token_is_fast() {
        let token = "a".repeat(200);
        let parts = split(&token, &["aa", "aaa"], true).unwrap();
        assert_eq!(parts.len(), 67);
    }
}
