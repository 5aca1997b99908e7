//! Tokenizer. Lossless: lexemes plus the skipped whitespace reproduce the
//! input, and bad characters become `Error` tokens instead of aborting.

use std::fmt;

pub const KEYWORDS: &[&str] = &[
    "class",
    "inherit",
    "feature",
    "require",
    "ensure",
    "do",
    "deferred",
    "end",
    "invariant",
    "local",
    "if",
    "then",
    "else",
    "from",
    "until",
    "loop",
    "create",
    "not",
    "and",
    "or",
    "implies",
    "across",
    "as",
    "all",
    "Note",
    "note",
    "true",
    "false",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Ident,
    Symbol,
    Str,
    Integer,
    Real,
    Comment,
    Error,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenKind::Keyword => "keyword",
            TokenKind::Ident => "identifier",
            TokenKind::Symbol => "symbol",
            TokenKind::Str => "string",
            TokenKind::Integer => "integer",
            TokenKind::Real => "real",
            TokenKind::Comment => "comment",
            TokenKind::Error => "invalid character",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// Byte offset of the first character.
    pub offset: usize,
    pub line: u32,
    pub column: u32,
}

impl Token {
    pub fn is_keyword(&self, kw: &str) -> bool {
        self.kind == TokenKind::Keyword && self.lexeme == kw
    }

    pub fn is_symbol(&self, sym: &str) -> bool {
        self.kind == TokenKind::Symbol && self.lexeme == sym
    }

    pub fn end(&self) -> usize {
        self.offset + self.lexeme.len()
    }
}

// Longest first.
const SYMBOLS: &[&str] = &[
    ":=", "/=", "<=", ">=", "//", "\\\\", "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "=",
    "<", ">", "+", "-", "*", "/", "^",
];

pub fn tokenize(source: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let bytes = source.as_bytes();
    let mut pos = 0;
    let mut line = 1u32;
    let mut column = 1u32;

    let advance = |from: usize, to: usize, line: &mut u32, column: &mut u32| {
        for ch in source[from..to].chars() {
            if ch == '\n' {
                *line += 1;
                *column = 1;
            } else {
                *column += 1;
            }
        }
    };

    while pos < source.len() {
        let ch = source[pos..].chars().next().unwrap();
        if ch.is_whitespace() {
            let next = pos + ch.len_utf8();
            advance(pos, next, &mut line, &mut column);
            pos = next;
            continue;
        }
        let start = pos;
        let kind;
        if source[pos..].starts_with("--") {
            let len = source[pos..].find('\n').unwrap_or(source.len() - pos);
            pos += len;
            kind = TokenKind::Comment;
        } else if ch.is_alphabetic() || ch == '_' {
            while pos < source.len() {
                let c = source[pos..].chars().next().unwrap();
                if c.is_alphanumeric() || c == '_' {
                    pos += c.len_utf8();
                } else {
                    break;
                }
            }
            kind = if KEYWORDS.contains(&&source[start..pos]) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            };
        } else if ch.is_ascii_digit() {
            while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'_') {
                pos += 1;
            }
            if pos + 1 < bytes.len() && bytes[pos] == b'.' && bytes[pos + 1].is_ascii_digit() {
                pos += 1;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                kind = TokenKind::Real;
            } else {
                kind = TokenKind::Integer;
            }
        } else if ch == '"' {
            pos += 1;
            let mut closed = false;
            while pos < bytes.len() {
                match bytes[pos] {
                    b'"' => {
                        pos += 1;
                        closed = true;
                        break;
                    }
                    b'\n' => break,
                    b'%' if pos + 1 < bytes.len() && bytes[pos + 1] != b'\n' => pos += 2,
                    _ => pos += 1,
                }
            }
            // keep char boundaries intact after the escape skip
            while !source.is_char_boundary(pos) {
                pos += 1;
            }
            kind = if closed {
                TokenKind::Str
            } else {
                TokenKind::Error
            };
        } else if let Some(sym) = SYMBOLS.iter().find(|s| source[pos..].starts_with(**s)) {
            pos += sym.len();
            kind = TokenKind::Symbol;
        } else {
            pos += ch.len_utf8();
            kind = TokenKind::Error;
        }
        tokens.push(Token {
            kind,
            lexeme: source[start..pos].to_string(),
            offset: start,
            line,
            column,
        });
        advance(start, pos, &mut line, &mut column);
    }
    tokens
}
