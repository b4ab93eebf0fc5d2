//! Plain-text form of a [`BlockCode`]:
//!
//! ```text
//! # backward-dmc block code v1
//! # constructor: lloyd
//! # seed: 3
//! n 3
//! alphabets 2 2
//! M 2
//! codeword 0 0 0
//! codeword 1 1 1
//! encoder 0*4 1*4
//! ```
//!
//! Header comments of the form `# key: value` carry the code's notes.
//! Encoder tokens are `message*run` over source blocks in lexicographic
//! order; `encoder` lines may repeat and are concatenated.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::block_code::BlockCode;

const MAGIC: &str = "# backward-dmc block code v1";
const RUNS_PER_LINE: usize = 16;

impl BlockCode {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        for (k, v) in self.notes() {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "n {}", self.n());
        let _ = writeln!(out, "alphabets {} {}", self.x_size(), self.y_size());
        let _ = writeln!(out, "M {}", self.size());
        for m in 0..self.size() {
            let symbols: Vec<String> =
                self.codeword_symbols(m).iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, "codeword {}", symbols.join(" "));
        }
        let mut runs: Vec<(u32, usize)> = Vec::new();
        for &m in self.encoder() {
            match runs.last_mut() {
                Some((last, len)) if *last == m => *len += 1,
                _ => runs.push((m, 1)),
            }
        }
        for line in runs.chunks(RUNS_PER_LINE) {
            let tokens: Vec<String> = line.iter().map(|(m, r)| format!("{m}*{r}")).collect();
            let _ = writeln!(out, "encoder {}", tokens.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        match lines.next() {
            Some((_, MAGIC)) => {}
            _ => return Err(err(1, format!("expected header `{MAGIC}`"))),
        }
        let mut notes = Vec::new();
        let mut n = None;
        let mut alphabets = None;
        let mut m = None;
        let mut words: Vec<Vec<usize>> = Vec::new();
        let mut encoder: Vec<u32> = Vec::new();
        for (no, line) in lines {
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once(':') {
                    notes.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let nums = |parts: std::str::SplitWhitespace<'_>| -> Result<Vec<usize>> {
                parts
                    .map(|t| t.parse::<usize>().map_err(|e| err(no, format!("`{t}`: {e}"))))
                    .collect()
            };
            match key {
                "n" => n = Some(single(nums(parts)?, no)?),
                "M" => m = Some(single(nums(parts)?, no)?),
                "alphabets" => {
                    let v = nums(parts)?;
                    if v.len() != 2 {
                        return Err(err(no, "expected two alphabet sizes".into()));
                    }
                    alphabets = Some((v[0], v[1]));
                }
                "codeword" => words.push(nums(parts)?),
                "encoder" => {
                    for token in parts {
                        let (msg, run) = token
                            .split_once('*')
                            .ok_or_else(|| err(no, format!("bad run `{token}`")))?;
                        let msg: u32 =
                            msg.parse().map_err(|e| err(no, format!("`{token}`: {e}")))?;
                        let run: usize =
                            run.parse().map_err(|e| err(no, format!("`{token}`: {e}")))?;
                        encoder.extend(std::iter::repeat_n(msg, run));
                    }
                }
                other => return Err(err(no, format!("unknown key `{other}`"))),
            }
        }
        let n = n.ok_or_else(|| err(0, "missing `n`".into()))?;
        let (xs, ys) = alphabets.ok_or_else(|| err(0, "missing `alphabets`".into()))?;
        let m = m.ok_or_else(|| err(0, "missing `M`".into()))?;
        if words.len() != m {
            return Err(err(0, format!("M = {m} but {} codewords listed", words.len())));
        }
        let indexer = crate::distributions::BlockIndexer::unchecked(ys, n);
        let codebook = words
            .iter()
            .map(|w| {
                if w.len() != n {
                    return Err(err(0, format!("codeword of length {} with n = {n}", w.len())));
                }
                indexer.index(w)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut code = BlockCode::new(n, xs, ys, codebook, encoder)?;
        for (k, v) in notes {
            code = code.with_note(k, v);
        }
        Ok(code)
    }
}

fn single(v: Vec<usize>, line: usize) -> Result<usize> {
    match v.as_slice() {
        [x] => Ok(*x),
        _ => Err(Error::Parse {
            line,
            message: "expected exactly one value".into(),
        }),
    }
}
