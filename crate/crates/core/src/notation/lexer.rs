use alloc::string::String;
use alloc::vec::Vec;

use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Letters and digits, starting with a letter.
    Ident(String),
    /// `\name`, stored with the backslash.
    Command(String),
    Number(String),
    /// `@name` or `@@name`; the flag is true for `@@`.
    Algo(String, bool),
    /// A bare `@`, as in `@(Gamma)`.
    At,
    Sub,
    Sup,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Slash,
    Comma,
    DoubleColon,
    Assign,
    Arrow,
    Semi,
    Dot,
    DotDot,
    Eq,
    Bang,
    Percent,
    Hash,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

fn is_word(c: char) -> bool {
    c.is_ascii_alphanumeric()
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let at = |k: usize| bytes.get(k).map(|&(_, c)| c);
    let off = |k: usize| bytes.get(k).map(|&(o, _)| o).unwrap_or(src.len());
    while i < bytes.len() {
        let c = bytes[i].1;
        let start = off(i);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = match c {
            '\\' if matches!(at(i + 1), Some(',' | ';' | '!' | ' ')) => {
                // TeX spacing commands are whitespace.
                i += 2;
                continue;
            }
            '\\' => {
                let mut j = i + 1;
                while at(j).is_some_and(|c| c.is_ascii_alphabetic()) {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(ParseError::syntax("expected a command name after '\\'", SourceSpan::at(src, start, start + 1)));
                }
                match &src[start..off(j)] {
                    r"\rightarrow" | r"\to" => (Tok::Arrow, j - i),
                    cmd => (Tok::Command(String::from(cmd)), j - i),
                }
            }
            '@' => {
                let double = at(i + 1) == Some('@');
                let name_start = if double { i + 2 } else { i + 1 };
                let mut j = name_start;
                while at(j).is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    j += 1;
                }
                if j == name_start {
                    if double {
                        return Err(ParseError::syntax("expected an algorithm name after '@@'", SourceSpan::at(src, start, start + 2)));
                    }
                    (Tok::At, 1)
                } else {
                    (Tok::Algo(String::from(&src[off(name_start)..off(j)]), double), j - i)
                }
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while at(j).is_some_and(|c| c.is_ascii_digit()) {
                    j += 1;
                }
                (Tok::Number(String::from(&src[start..off(j)])), j - i)
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while at(j).is_some_and(is_word) {
                    j += 1;
                }
                (Tok::Ident(String::from(&src[start..off(j)])), j - i)
            }
            ':' if at(i + 1) == Some(':') => (Tok::DoubleColon, 2),
            ':' if at(i + 1) == Some('=') => (Tok::Assign, 2),
            '-' if at(i + 1) == Some('>') => (Tok::Arrow, 2),
            '.' if at(i + 1) == Some('.') => (Tok::DotDot, 2),
            '_' => (Tok::Sub, 1),
            '^' => (Tok::Sup, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            '+' => (Tok::Plus, 1),
            '-' => (Tok::Minus, 1),
            '*' => (Tok::Star, 1),
            '/' => (Tok::Slash, 1),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            '.' => (Tok::Dot, 1),
            '=' => (Tok::Eq, 1),
            '!' => (Tok::Bang, 1),
            '%' => (Tok::Percent, 1),
            '#' => (Tok::Hash, 1),
            other => {
                return Err(ParseError::syntax(
                    alloc::format!("unexpected character '{}'", other),
                    SourceSpan::at(src, start, start + other.len_utf8()),
                ))
            }
        };
        out.push(Token { tok, start, end: off(i + len) });
        i += len;
    }
    Ok(out)
}
