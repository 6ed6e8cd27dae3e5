use std::fs;
use std::path::Path;

use stallings::{Alphabet, Error, StallingsGraph, Word};

/// Failure classes of a command, mapped to exit codes 2 and 3.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(msg) => Failure::Budget(msg),
            other => Failure::Input(other.to_string()),
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

pub fn input_error(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

pub fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

/// `1` and the empty string both denote the identity.
pub fn parse_word(text: &str, alphabet: Alphabet) -> Outcome<Word> {
    if text.trim() == "1" {
        return Ok(Word::identity(alphabet));
    }
    Ok(Word::parse(text, alphabet)?)
}

pub fn parse_list(text: &str, alphabet: Alphabet) -> Outcome<Vec<Word>> {
    text.split(',')
        .map(|part| parse_word(part, alphabet))
        .collect()
}

/// Subgroup file: `n=<int>` on the first meaningful line, then one word per
/// line. `#` starts a comment.
pub fn parse_subgroup_text(text: &str) -> Outcome<(Alphabet, Vec<Word>)> {
    let mut alphabet = None;
    let mut words = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let lineno = index + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match alphabet {
            None => {
                let n = line
                    .strip_prefix("n=")
                    .or_else(|| line.strip_prefix("n ="))
                    .and_then(|v| v.trim().parse::<usize>().ok())
                    .ok_or_else(|| {
                        input_error(format!(
                            "syntax error at line {lineno}: expected `n=<int>`, found `{line}`"
                        ))
                    })?;
                alphabet = Some(
                    Alphabet::new(n)
                        .map_err(|e| input_error(format!("syntax error at line {lineno}: {e}")))?,
                );
            }
            Some(a) => {
                let w = parse_word(line, a).map_err(|e| match e {
                    Failure::Input(msg) => {
                        input_error(format!("syntax error at line {lineno}: {msg}"))
                    }
                    other => other,
                })?;
                words.push(w);
            }
        }
    }
    let alphabet =
        alphabet.ok_or_else(|| input_error("syntax error at line 1: missing `n=<int>` header"))?;
    Ok((alphabet, words))
}

/// Graph file: graph JSON, or DOT as written by `export-dot` (which needs
/// the rank from `-n`).
pub fn parse_graph_file(path: &Path, n: Option<usize>) -> Outcome<StallingsGraph> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let json: stallings::GraphJson = serde_json::from_str(&text)
            .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
        if let Some(n) = n {
            if n != json.n {
                return Err(input_error(format!(
                    "-n {n} disagrees with the graph's n={}",
                    json.n
                )));
            }
        }
        Ok(StallingsGraph::from_json(&json)?)
    } else {
        let n = n.ok_or_else(|| input_error("reading a DOT graph needs -n"))?;
        Ok(StallingsGraph::from_dot(&text, Alphabet::new(n)?)?)
    }
}
