use crate::error::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// Digits, optionally followed by `/digits` or `.digits`.
    Number(String),
    Eq,
    Assign,
    Semi,
    Amp,
    Tilde,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Plus,
    Oplus,
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number(s) => format!("number `{s}`"),
        Tok::Eq => "`=`".into(),
        Tok::Assign => "`:=`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Tilde => "`~`".into(),
        Tok::Star => "`*`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Oplus => "`⊕`".into(),
        Tok::Eof => "end of input".into(),
    }
}

pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    let advance = |n: usize, i: &mut usize| *i += n;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, i - line_start + 1);
        match c {
            '\n' => {
                i += 1;
                line += 1;
                line_start = i;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i);
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let tok = match c {
            '=' => {
                advance(1, &mut i);
                Tok::Eq
            }
            ':' if chars.get(i + 1) == Some(&'=') => {
                advance(2, &mut i);
                Tok::Assign
            }
            ';' => {
                advance(1, &mut i);
                Tok::Semi
            }
            '&' => {
                advance(1, &mut i);
                Tok::Amp
            }
            '~' | '¬' => {
                advance(1, &mut i);
                Tok::Tilde
            }
            '*' => {
                advance(1, &mut i);
                Tok::Star
            }
            '^' => {
                advance(1, &mut i);
                Tok::Caret
            }
            '(' => {
                advance(1, &mut i);
                Tok::LParen
            }
            ')' => {
                advance(1, &mut i);
                Tok::RParen
            }
            '[' => {
                advance(1, &mut i);
                Tok::LBracket
            }
            ']' => {
                advance(1, &mut i);
                Tok::RBracket
            }
            '+' => {
                advance(1, &mut i);
                Tok::Plus
            }
            '⊕' => {
                advance(1, &mut i);
                Tok::Oplus
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                let mut seen_sep = false;
                while i < chars.len() {
                    let d = chars[i];
                    if d.is_ascii_digit() {
                        advance(1, &mut i);
                    } else if (d == '/' || d == '.')
                        && !seen_sep
                        && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())
                    {
                        seen_sep = true;
                        advance(1, &mut i);
                    } else {
                        break;
                    }
                }
                if i == start {
                    return Err(SyntaxError {
                        line: tl,
                        column: tc,
                        message: "unexpected character `.`".into(),
                    });
                }
                Tok::Number(chars[start..i].iter().collect())
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    advance(1, &mut i);
                }
                Tok::Ident(chars[start..i].iter().collect())
            }
            other => {
                return Err(SyntaxError {
                    line: tl,
                    column: tc,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push(Spanned {
            tok,
            line: tl,
            column: tc,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: i - line_start + 1,
    });
    Ok(out)
}
