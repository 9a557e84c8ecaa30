//! Tokenizer for the bootstrap frontend.

use super::spec::Loc;
use super::Diagnostic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    /// Backtick literal with escapes decoded.
    Str(String),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub loc: Loc,
}

// Longest first.
const PUNCTS: &[&str] = &[
    "<<>>", "::++", "#Alt", "::+", "#B2", "#T2", "=>", "<-", "<=", "->", "..", "::", ":?", "#L",
    "#B", "#T", "{", "}", "(", ")", "[", "]", ";", ",", ".", ":", "|", "*", "+", "?", "~", "@",
    "_", "=", "!",
];

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, Diagnostic> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = src.char_indices().peekable();
    let bytes = src.as_bytes();

    macro_rules! bump {
        ($c:expr) => {{
            if $c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }};
    }

    while let Some(&(i, c)) = chars.peek() {
        let loc = Loc::new(line, col);
        if c == ' ' || c == '\t' || c == '\r' || c == '\n' {
            chars.next();
            bump!(c);
            continue;
        }
        if src[i..].starts_with("//") {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                bump!(c);
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut end = i;
            while let Some(&(j, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    end = j + 1;
                    chars.next();
                    bump!(c);
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Ident(src[i..end].to_string()), loc });
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i;
            while let Some(&(j, c)) = chars.peek() {
                if c.is_ascii_digit() {
                    end = j + 1;
                    chars.next();
                    bump!(c);
                } else {
                    break;
                }
            }
            let n = src[i..end]
                .parse::<u64>()
                .map_err(|_| Diagnostic::new(loc, "integer literal out of range"))?;
            out.push(Spanned { tok: Tok::Int(n), loc });
            continue;
        }
        if c == '`' {
            chars.next();
            bump!(c);
            let mut raw_end = None;
            let start = i + 1;
            while let Some((j, c)) = chars.next() {
                bump!(c);
                if c == '\\' {
                    if let Some((_, d)) = chars.next() {
                        bump!(d);
                    }
                } else if c == '`' {
                    raw_end = Some(j);
                    break;
                }
            }
            let end = raw_end.ok_or_else(|| Diagnostic::new(loc, "unterminated backtick literal"))?;
            let text = unescape(&src[start..end]).map_err(|m| Diagnostic::new(loc, m))?;
            out.push(Spanned { tok: Tok::Str(text), loc });
            continue;
        }
        let rest = &bytes[i..];
        match PUNCTS.iter().find(|p| rest.starts_with(p.as_bytes())) {
            Some(p) => {
                for _ in 0..p.len() {
                    let (_, c) = chars.next().unwrap();
                    bump!(c);
                }
                out.push(Spanned { tok: Tok::Punct(p), loc });
            }
            None => return Err(Diagnostic::new(loc, format!("unexpected character {c:?}"))),
        }
    }
    out.push(Spanned { tok: Tok::Eof, loc: Loc::new(line, col) });
    Ok(out)
}

/// Decodes the body of a backtick literal.
pub fn unescape(raw: &str) -> Result<String, String> {
    let mut out = String::with_capacity(raw.len());
    let mut it = raw.chars();
    while let Some(c) = it.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match it.next() {
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('r') => out.push('\r'),
            Some('0') => out.push('\0'),
            Some('\\') => out.push('\\'),
            Some('`') => out.push('`'),
            Some('\'') => out.push('\''),
            Some('"') => out.push('"'),
            Some('u') => {
                if it.next() != Some('{') {
                    return Err("expected `{` after \\u".into());
                }
                let mut hex = String::new();
                loop {
                    match it.next() {
                        Some('}') => break,
                        Some(h) if h.is_ascii_hexdigit() => hex.push(h),
                        _ => return Err("malformed \\u{...} escape".into()),
                    }
                }
                let v = u32::from_str_radix(&hex, 16).map_err(|_| "malformed \\u{...} escape")?;
                out.push(char::from_u32(v).ok_or("\\u{...} is not a scalar value")?);
            }
            Some(d) => return Err(format!("unknown escape \\{d}")),
            None => return Err("dangling backslash".into()),
        }
    }
    Ok(out)
}

/// Inverse of [`unescape`] (up to the choice of escape spelling).
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\\' => out.push_str("\\\\"),
            '`' => out.push_str("\\`"),
            c if c.is_control() => out.push_str(&format!("\\u{{{:x}}}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_roundtrip() {
        let s = "a\n\t`\\'\"\u{1}é";
        assert_eq!(unescape(&escape(s)).unwrap(), s);
        assert_eq!(unescape(r"\u{10ffff}").unwrap(), "\u{10ffff}");
        assert!(unescape(r"\q").is_err());
    }

    #[test]
    fn longest_punct_and_comments() {
        let toks = tokenize("a ::++ b // c\n`x\\`y` <<>>").unwrap();
        let kinds: Vec<_> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("a".into()),
                Tok::Punct("::++"),
                Tok::Ident("b".into()),
                Tok::Str("x`y".into()),
                Tok::Punct("<<>>"),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn locations_are_one_based() {
        let toks = tokenize("\n  foo").unwrap();
        assert_eq!((toks[0].loc.line, toks[0].loc.col), (2, 3));
    }
}
