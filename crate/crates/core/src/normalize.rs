//! String normalization shared by the query and gold-set paths.

/// Lowercases, trims, and joins whitespace-separated runs with `_`.
///
/// Used for verbs and character labels.
pub fn normalize_token(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join("_")
}

/// Trim plus lowercase. Punctuation is kept.
pub fn normalize_utterance(raw: &str) -> String {
    raw.trim().to_lowercase()
}
