//! Lexicon-based gender-mention detection for personalized instructions.
//!
//! Deterministic by construction: the lexicon is a versioned plain-text
//! asset, and matching is whole-word and case-insensitive on
//! non-alphanumeric token boundaries. That tokenization means a term inside
//! a hyphenated compound ("He-man") still counts as a whole word.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Bundled copy of `lexicons/gender_terms.txt`.
pub const DEFAULT_LEXICON_TEXT: &str = include_str!("../../lexicons/gender_terms.txt");

#[derive(Debug, Clone)]
pub struct GenderLexicon {
    words: BTreeSet<String>,
    phrases: Vec<Vec<String>>,
}

impl GenderLexicon {
    pub fn parse(text: &str) -> Self {
        let mut words = BTreeSet::new();
        let mut phrases = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<String> = tokenize(line).collect();
            match tokens.len() {
                0 => {}
                1 => {
                    words.insert(tokens.into_iter().next().expect("one token"));
                }
                _ => phrases.push(tokens),
            }
        }
        Self { words, phrases }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(Error::io_at(path))?;
        Ok(Self::parse(&text))
    }

    /// Bundled default lexicon, parsed once.
    pub fn default_lexicon() -> &'static GenderLexicon {
        static LEXICON: OnceLock<GenderLexicon> = OnceLock::new();
        LEXICON.get_or_init(|| GenderLexicon::parse(DEFAULT_LEXICON_TEXT))
    }

    /// True when the lowercased token is a single-word lexicon entry.
    pub fn is_gender_term(&self, token: &str) -> bool {
        self.words.contains(&token.to_lowercase())
    }

    /// Scan `text` for lexicon matches. Returns whether anything matched and
    /// the matched terms in first-occurrence order, deduplicated.
    ///
    /// Single-word entries take precedence; a phrase is only reported when
    /// none of its tokens already matched as a single-word entry.
    pub fn detect(&self, text: &str) -> (bool, Vec<String>) {
        let tokens: Vec<String> = tokenize(text).collect();
        let mut matched: Vec<String> = Vec::new();
        let mut word_hit_positions = BTreeSet::new();
        for (i, token) in tokens.iter().enumerate() {
            if self.words.contains(token) {
                word_hit_positions.insert(i);
                if !matched.contains(token) {
                    matched.push(token.clone());
                }
            }
        }
        for phrase in &self.phrases {
            for start in 0..tokens.len().saturating_sub(phrase.len() - 1) {
                if tokens[start..start + phrase.len()] == phrase[..] {
                    let overlaps_word_hit =
                        (start..start + phrase.len()).any(|i| word_hit_positions.contains(&i));
                    if !overlaps_word_hit {
                        let joined = phrase.join(" ");
                        if !matched.contains(&joined) {
                            matched.push(joined);
                        }
                    }
                }
            }
        }
        (!matched.is_empty(), matched)
    }
}

fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    // Same token boundaries as the hashing embedder.
    crate::embedding::tokenize(text)
}

/// Detect gender-specific mentions with the bundled default lexicon.
pub fn detect_gender_mentions(text: &str) -> (bool, Vec<String>) {
    GenderLexicon::default_lexicon().detect(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_preference_is_detected() {
        let (hit, terms) = detect_gender_mentions(
            "Prefer female candidates with strong publication records",
        );
        assert!(hit);
        assert_eq!(terms, vec!["female".to_string()]);
    }

    #[test]
    fn neutral_text_is_clean() {
        let (hit, terms) = detect_gender_mentions(
            "Seeking a systems engineer with strong portable skills in kernel development",
        );
        assert!(!hit);
        assert!(terms.is_empty());
    }

    #[test]
    fn hyphenated_compounds_count_as_whole_words() {
        let (hit, terms) = detect_gender_mentions("He-man Enterprises seeks staff");
        assert!(hit);
        assert_eq!(terms, vec!["he".to_string()]);
    }

    #[test]
    fn substrings_do_not_match() {
        for text in [
            "herbal mantra shop",
            "menu of amendments",
            "this chairman of the humane society", // latent terms stay undetected
            "mshta and msbuild logs",
            "salesman of the year",
        ] {
            let (hit, terms) = detect_gender_mentions(text);
            assert!(!hit, "false positive on {text:?}: {terms:?}");
        }
    }

    #[test]
    fn case_insensitive() {
        let (a, _) = detect_gender_mentions("SHE leads the team");
        let (b, _) = detect_gender_mentions("she leads the team");
        assert!(a && b);
    }

    #[test]
    fn phrase_only_lexicons_match_sequences() {
        let lexicon = GenderLexicon::parse("hard requirement\n");
        let (hit, terms) = lexicon.detect("This is a HARD requirement, not a wish.");
        assert!(hit);
        assert_eq!(terms, vec!["hard requirement".to_string()]);
        let (miss, _) = lexicon.detect("hard work and one requirement");
        assert!(!miss);
    }

    #[test]
    fn first_occurrence_order_dedup() {
        let (_, terms) = detect_gender_mentions("woman and man and woman again, with her");
        assert_eq!(
            terms,
            vec!["woman".to_string(), "man".to_string(), "her".to_string()]
        );
    }
}
