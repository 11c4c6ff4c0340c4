use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{SentencePair, TranslationMemory};
use crate::{Error, Result};

/// On-disk corpus layouts.
///
/// JSONL: one `{"id", "domain", "src", "tgt"}` object per line.
/// TSV: `id<TAB>domain<TAB>source<TAB>target`, no header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Tsv,
}

impl CorpusFormat {
    /// Guess the format from a file extension (`.tsv` or `.jsonl`/`.json`).
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "tsv" => Some(CorpusFormat::Tsv),
            "jsonl" | "json" => Some(CorpusFormat::Jsonl),
            _ => None,
        }
    }
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "tsv" => Ok(CorpusFormat::Tsv),
            other => Err(Error::Config(format!("unknown corpus format {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonRecord<'a> {
    #[serde(borrow)]
    id: std::borrow::Cow<'a, str>,
    #[serde(borrow)]
    domain: std::borrow::Cow<'a, str>,
    #[serde(borrow)]
    src: std::borrow::Cow<'a, str>,
    #[serde(borrow)]
    tgt: std::borrow::Cow<'a, str>,
}

/// Load and validate a corpus file. The TM is named after the file stem.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<TranslationMemory> {
    let file =
        File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    read_corpus(BufReader::new(file), format, path)
}

/// Parse a corpus from any buffered reader. `origin` is used for the TM name
/// and in error messages.
pub fn read_corpus<R: BufRead>(
    mut reader: R,
    format: CorpusFormat,
    origin: &Path,
) -> Result<TranslationMemory> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    let mut pairs = Vec::new();
    let mut first_line: HashMap<String, usize> = HashMap::new();
    let mut buf = Vec::new();
    let mut lineno = 0;
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::io(format!("reading {}", origin.display()), e))?;
        if n == 0 {
            break;
        }
        lineno += 1;
        if buf.last() == Some(&b'\n') {
            buf.pop();
        }
        if buf.last() == Some(&b'\r') {
            buf.pop();
        }
        let line = std::str::from_utf8(&buf)
            .map_err(|e| parse_err(lineno, format!("invalid UTF-8: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let pair = match format {
            CorpusFormat::Jsonl => {
                let rec: JsonRecord = serde_json::from_str(line)
                    .map_err(|e| parse_err(lineno, format!("malformed record: {e}")))?;
                SentencePair::new(rec.id, rec.domain, rec.src, rec.tgt)
            }
            CorpusFormat::Tsv => {
                let cols: Vec<&str> = line.split('\t').collect();
                if cols.len() != 4 {
                    return Err(parse_err(
                        lineno,
                        format!("expected 4 tab-separated columns, found {}", cols.len()),
                    ));
                }
                SentencePair::new(cols[0], cols[1], cols[2], cols[3])
            }
        };
        pair.check()
            .map_err(|m| Error::Validation(format!("line {lineno}: {m}")))?;
        if let Some(first) = first_line.get(&pair.id) {
            return Err(Error::Validation(format!(
                "line {lineno}: duplicate id {:?} (first seen on line {first})",
                pair.id
            )));
        }
        first_line.insert(pair.id.clone(), lineno);
        pairs.push(pair);
    }
    if pairs.is_empty() {
        return Err(Error::Validation(format!(
            "{} contains no records",
            origin.display()
        )));
    }
    let name = origin
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("tm")
        .to_string();
    TranslationMemory::new(name, pairs)
}

/// Write pairs in the given format. TSV refuses text containing tabs or
/// newlines since it cannot be represented.
pub fn write_corpus<W: Write>(
    writer: W,
    pairs: &[SentencePair],
    format: CorpusFormat,
) -> Result<()> {
    let mut w = BufWriter::new(writer);
    let io_err = |e| Error::io("writing corpus", e);
    for pair in pairs {
        match format {
            CorpusFormat::Jsonl => {
                let rec = JsonRecord {
                    id: pair.id.as_str().into(),
                    domain: pair.domain.as_str().into(),
                    src: pair.source.as_str().into(),
                    tgt: pair.target.as_str().into(),
                };
                serde_json::to_writer(&mut w, &rec)?;
                w.write_all(b"\n").map_err(io_err)?;
            }
            CorpusFormat::Tsv => {
                let fields = [&pair.id, &pair.domain, &pair.source, &pair.target];
                if fields.iter().any(|f| f.contains(['\t', '\n', '\r'])) {
                    return Err(Error::Validation(format!(
                        "pair {:?} cannot be written as TSV",
                        pair.id
                    )));
                }
                writeln!(w, "{}\t{}\t{}\t{}", pair.id, pair.domain, pair.source, pair.target)
                    .map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, format: CorpusFormat) -> Result<TranslationMemory> {
        read_corpus(text.as_bytes(), format, Path::new("mem.jsonl"))
    }

    #[test]
    fn jsonl_three_records() {
        let text = r#"{"id":"s1","domain":"it","src":"a b","tgt":"x y"}
{"id":"s2","domain":"law","src":"c","tgt":"z"}
{"id":"s3","domain":"it","src":"d","tgt":"w"}
"#;
        let tm = parse(text, CorpusFormat::Jsonl).unwrap();
        assert_eq!(tm.len(), 3);
        assert_eq!(tm.name(), "mem");
        let ids: Vec<_> = tm.pairs().iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["s1", "s2", "s3"]);
        assert_eq!(tm.domains().len(), 2);
    }

    #[test]
    fn duplicate_id_cites_second_line() {
        let text = r#"{"id":"s1","domain":"it","src":"a","tgt":"x"}
{"id":"s2","domain":"it","src":"b","tgt":"x"}
{"id":"s3","domain":"it","src":"c","tgt":"x"}
{"id":"s1","domain":"it","src":"d","tgt":"x"}
"#;
        let err = parse(text, CorpusFormat::Jsonl).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        let msg = err.to_string();
        assert!(msg.contains("line 4"), "{msg}");
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn malformed_record_names_line() {
        let text = "{\"id\":\"s1\",\"domain\":\"it\",\"src\":\"a\",\"tgt\":\"x\"}\n{\"id\":\"s2\"\n";
        match parse(text, CorpusFormat::Jsonl).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_rejected() {
        assert!(matches!(
            parse("", CorpusFormat::Jsonl),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse("\n\n", CorpusFormat::Tsv),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn tsv_two_domains() {
        let text = "p1\td1\ta\tA\np2\td1\tb\tB\np3\td2\tc\tC\np4\td2\td\tD\np5\td1\te\tE\n";
        let tm = parse(text, CorpusFormat::Tsv).unwrap();
        assert_eq!(tm.len(), 5);
        let domains: Vec<_> = tm.domains().iter().map(String::as_str).collect();
        assert_eq!(domains, ["d1", "d2"]);
        assert_eq!(tm.pairs()[2].source, "c");
        assert_eq!(tm.pairs()[2].target, "C");
    }

    #[test]
    fn tsv_wrong_column_count() {
        match parse("p1\td1\ta\n", CorpusFormat::Tsv).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 1);
                assert!(message.contains("found 3"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tsv_refuses_embedded_tab() {
        let pairs = vec![SentencePair::new("a", "d", "x\ty", "z")];
        assert!(write_corpus(Vec::new(), &pairs, CorpusFormat::Tsv).is_err());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(CorpusFormat::from_path(Path::new("a.tsv")), Some(CorpusFormat::Tsv));
        assert_eq!(CorpusFormat::from_path(Path::new("a.jsonl")), Some(CorpusFormat::Jsonl));
        assert_eq!(CorpusFormat::from_path(Path::new("a.txt")), None);
    }
}
