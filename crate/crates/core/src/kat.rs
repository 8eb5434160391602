//! Known-answer test files.
//!
//! One case per line, `#` starts a comment:
//!
//! ```text
//! key=<32 hex> iv=<4 hex> n=<bytes> out=<2n hex>         keystream prefix
//! key=<32 hex> iv=<4 hex> level=<1|3|5> fv=<2n' hex>     sampled vector, one byte per element
//! ```

use thiserror::Error;

use crate::aesprg::{keystream, AesKey128, Iv, KeystreamRequest};
use crate::params::{builtin_params, SecLevel};
use crate::sampler::rej_samp_prg;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KatCase {
    Keystream { key: AesKey128, iv: Iv, expected: Vec<u8> },
    Sample { key: AesKey128, iv: Iv, level: SecLevel, expected: Vec<u8> },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KatError {
    #[error("line {line}, column {column}: {reason}")]
    Parse { line: usize, column: usize, reason: String },
    #[error("line {line}: {what} mismatch at byte {offset}")]
    Mismatch { line: usize, what: &'static str, offset: usize },
}

/// A parsed case with its 1-based source line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatEntry {
    pub line: usize,
    pub case: KatCase,
}

pub fn parse(text: &str) -> Result<Vec<KatEntry>, KatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        out.push(KatEntry { line, case: parse_line(line, body)? });
    }
    Ok(out)
}

struct Field<'a> {
    key: &'a str,
    value: &'a str,
    /// 1-based column of the value's first character.
    column: usize,
}

fn fields(line: usize, body: &str) -> Result<Vec<Field<'_>>, KatError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for tok in body.split(' ') {
        let start = offset;
        offset += tok.len() + 1;
        if tok.is_empty() {
            continue;
        }
        let (key, value) = tok.split_once('=').ok_or_else(|| KatError::Parse {
            line,
            column: start + 1,
            reason: format!("expected `name=value`, found `{tok}`"),
        })?;
        out.push(Field { key, value, column: start + key.len() + 2 });
    }
    Ok(out)
}

fn parse_hex(line: usize, f: &Field<'_>, len: Option<usize>) -> Result<Vec<u8>, KatError> {
    if let Some(bad) = f.value.find(|c: char| !c.is_ascii_hexdigit()) {
        return Err(KatError::Parse { line, column: f.column + bad, reason: format!("non-hex digit in `{}`", f.key) });
    }
    if !f.value.len().is_multiple_of(2) {
        return Err(KatError::Parse {
            line,
            column: f.column + f.value.len(),
            reason: format!("odd number of hex digits in `{}`", f.key),
        });
    }
    if let Some(n) = len {
        if f.value.len() != 2 * n {
            return Err(KatError::Parse {
                line,
                column: f.column,
                reason: format!("`{}` must have {} hex digits, found {}", f.key, 2 * n, f.value.len()),
            });
        }
    }
    Ok(hex::decode(f.value).expect("validated hex"))
}

fn parse_line(line: usize, body: &str) -> Result<KatCase, KatError> {
    let fs = fields(line, body)?;
    let names: Vec<&str> = fs.iter().map(|f| f.key).collect();
    let err_at = |column: usize, reason: String| KatError::Parse { line, column, reason };
    match names.as_slice() {
        ["key", "iv", "n", "out"] => {
            let key = parse_hex(line, &fs[0], Some(16))?;
            let iv = parse_hex(line, &fs[1], Some(2))?;
            let n: usize = fs[2].value.parse().map_err(|_| err_at(fs[2].column, "`n` must be a decimal count".into()))?;
            let expected = parse_hex(line, &fs[3], Some(n))?;
            Ok(KatCase::Keystream { key: AesKey128(key.try_into().unwrap()), iv: Iv(iv.try_into().unwrap()), expected })
        }
        ["key", "iv", "level", "fv"] => {
            let key = parse_hex(line, &fs[0], Some(16))?;
            let iv = parse_hex(line, &fs[1], Some(2))?;
            let level: SecLevel = fs[2].value.parse().map_err(|e| err_at(fs[2].column, format!("{e}")))?;
            let expected = parse_hex(line, &fs[3], Some(builtin_params(level).n_prime))?;
            Ok(KatCase::Sample {
                key: AesKey128(key.try_into().unwrap()),
                iv: Iv(iv.try_into().unwrap()),
                level,
                expected,
            })
        }
        _ => Err(err_at(
            1,
            format!("expected `key= iv= n= out=` or `key= iv= level= fv=`, found fields {names:?}"),
        )),
    }
}

pub fn format_case(case: &KatCase) -> String {
    match case {
        KatCase::Keystream { key, iv, expected } => format!(
            "key={} iv={} n={} out={}",
            key.to_hex(),
            iv.to_hex(),
            expected.len(),
            hex::encode(expected)
        ),
        KatCase::Sample { key, iv, level, expected } => format!(
            "key={} iv={} level={} fv={}",
            key.to_hex(),
            iv.to_hex(),
            level.number(),
            hex::encode(expected)
        ),
    }
}

/// Recomputes a keystream case of `n` bytes.
pub fn keystream_case(key: AesKey128, iv: Iv, n: usize) -> KatCase {
    let expected = keystream(&KeystreamRequest { key, iv, n_bytes: n }).expect("non-empty request");
    KatCase::Keystream { key, iv, expected }
}

/// Recomputes a sampled-vector case at `level`.
pub fn sample_case(key: AesKey128, iv: Iv, level: SecLevel) -> KatCase {
    let fv = rej_samp_prg(&key, iv, &builtin_params(level)).expect("built-in parameters are valid");
    KatCase::Sample { key, iv, level, expected: fv.into_inner() }
}

pub fn verify(entry: &KatEntry) -> Result<(), KatError> {
    let (what, actual, expected) = match &entry.case {
        KatCase::Keystream { key, iv, expected } => {
            ("keystream", keystream_case(*key, *iv, expected.len()), expected)
        }
        KatCase::Sample { key, iv, level, expected } => ("field vector", sample_case(*key, *iv, *level), expected),
    };
    let actual = match actual {
        KatCase::Keystream { expected, .. } | KatCase::Sample { expected, .. } => expected,
    };
    match actual.iter().zip(expected).position(|(a, b)| a != b) {
        None if actual.len() == expected.len() => Ok(()),
        pos => Err(KatError::Mismatch { line: entry.line, what, offset: pos.unwrap_or(actual.len().min(expected.len())) }),
    }
}
