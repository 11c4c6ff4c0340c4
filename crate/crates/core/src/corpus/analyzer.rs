/// Terms used for indexing and querying.
///
/// Lowercases, splits on Unicode whitespace and trims non-alphanumeric
/// characters from both ends of each token. Tokens that become empty are
/// dropped. Internal punctuation (`über-maß`, `don't`) is kept.
pub fn analyze_for_index(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split_whitespace()
        .map(|tok| tok.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|tok| !tok.is_empty())
        .map(str::to_owned)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strips_edge_punctuation() {
        assert_eq!(analyze_for_index("The cat, sat."), ["the", "cat", "sat"]);
    }

    #[test]
    fn empty_input() {
        assert!(analyze_for_index("").is_empty());
        assert!(analyze_for_index("  ... !! ").is_empty());
    }

    #[test]
    fn keeps_internal_hyphen() {
        assert_eq!(analyze_for_index("über-Maß  geht"), ["über-maß", "geht"]);
    }

    #[test]
    fn unicode_whitespace() {
        assert_eq!(analyze_for_index("a\u{00a0}b\u{3000}c\td"), ["a", "b", "c", "d"]);
    }

    proptest! {
        #[test]
        fn idempotent_on_joined_output(s in "\\PC{0,60}") {
            let once = analyze_for_index(&s);
            let twice = analyze_for_index(&once.join(" "));
            prop_assert_eq!(once, twice);
        }
    }
}
