/// Tokens longer than this are dropped (base64 blobs, hashes, minified code).
pub const MAX_TOKEN_LEN: usize = 64;

/// Lowercases `raw` and splits it into maximal `[a-z0-9]` runs.
///
/// Every other character (after lowercasing) acts as a separator, so
/// programming syntax such as `==`, `+` or `--` disappears. No stemming and no
/// stopword removal: phrases like "how to reproduce" must survive intact.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.to_lowercase()
        .split(|c: char| !is_token_char(c))
        .filter(|t| !t.is_empty() && t.len() <= MAX_TOKEN_LEN)
        .map(str::to_owned)
        .collect()
}

#[inline]
pub(crate) fn is_token_char(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit()
}

pub(crate) fn is_valid_token(t: &str) -> bool {
    !t.is_empty() && t.chars().all(is_token_char)
}
