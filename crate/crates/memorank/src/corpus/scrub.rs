//! Removal of explicit gender indicators from bio text.
//!
//! The lexicon is deliberately narrow: pronouns and honorifics, plus the
//! record's first name when known. Latent gender-coded terms such as
//! "husband", "waitress", "actress", or "priest" are left in place; the
//! downstream experiments measure exactly what survives this scrubbing.

use std::sync::OnceLock;

use regex::Regex;

/// Explicit indicator lexicon: whole-word, case-insensitive matches are
/// replaced by [`SCRUB_PLACEHOLDER`].
pub const EXPLICIT_INDICATORS: &[&str] = &[
    "himself", "herself", "hers", "his", "him", "he", "she", "her", "mrs", "miss", "ms", "mr",
];

/// Replacement token for scrubbed indicator occurrences.
pub const SCRUB_PLACEHOLDER: &str = "_";

fn indicator_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        let alternation = EXPLICIT_INDICATORS.join("|");
        Regex::new(&format!(r"(?i)\b(?:{alternation})\b")).expect("static indicator regex")
    })
}

/// Replace every explicit-indicator occurrence with the placeholder token.
///
/// Idempotent: the placeholder never matches the lexicon.
pub fn scrub_gender_indicators(text: &str) -> String {
    indicator_re().replace_all(text, SCRUB_PLACEHOLDER).into_owned()
}

/// Scrub explicit indicators and, when known, the record's first name.
pub fn scrub_with_first_name(text: &str, first_name: Option<&str>) -> String {
    let scrubbed = scrub_gender_indicators(text);
    let Some(name) = first_name.map(str::trim).filter(|n| !n.is_empty()) else {
        return scrubbed;
    };
    let name_re = Regex::new(&format!(r"(?i)\b{}\b", regex::escape(name)))
        .expect("escaped name regex");
    name_re.replace_all(&scrubbed, SCRUB_PLACEHOLDER).into_owned()
}

/// Whole-word, case-insensitive scan for any explicit indicator. Used by the
/// scrubbing-completeness checks.
pub fn contains_explicit_indicator(text: &str) -> bool {
    indicator_re().is_match(text)
}
