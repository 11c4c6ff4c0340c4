use std::sync::LazyLock;

use regex::Regex;

struct Rule {
    re: Regex,
    rep: &'static str,
}

// mteval-v13a, language-independent part. Applied in order, each rule as a
// leftmost non-overlapping global substitution.
static RULES: LazyLock<[Rule; 4]> = LazyLock::new(|| {
    let rule = |pat: &str, rep| Rule {
        re: Regex::new(pat).expect("static pattern"),
        rep,
    };
    [
        // ASCII symbols other than . , - ' are padded
        rule(r"([\{-~\[-` -&\(-\+:-@/])", " $1 "),
        // period and comma unless preceded by a digit
        rule(r"([^0-9])([\.,])", "$1 $2 "),
        // period and comma unless followed by a digit
        rule(r"([\.,])([^0-9])", " $1 $2"),
        // dash preceded by a digit
        rule(r"([0-9])(-)", "$1 $2 "),
    ]
});

/// `str::isspace` from the reference scorer also splits on the ASCII
/// information separators, which `char::is_whitespace` does not.
pub(crate) fn is_split_space(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

/// Tokenize with mteval-v13a rules and return the space-joined string.
/// Case is preserved.
pub fn tokenize_13a_string(text: &str) -> String {
    let mut line = text.replace("<skipped>", "").replace("-\n", "").replace('\n', " ");
    if line.contains('&') {
        line = line
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let mut line = format!(" {line} ");
    for rule in RULES.iter() {
        if let std::borrow::Cow::Owned(s) = rule.re.replace_all(&line, rule.rep) {
            line = s;
        }
    }
    line.split(is_split_space)
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Tokenize with mteval-v13a rules.
pub fn tokenize_13a(text: &str) -> Vec<String> {
    tokenize_13a_string(text)
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}
