use super::{Diagnostic, DiagnosticKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// Digits with an optional fractional part, as written.
    Number(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Tilde,
    Define,
    Plus,
    Minus,
    Star,
    Slash,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Tilde => "~",
            Tok::Define => ":=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Ident(_) | Tok::Number(_) => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub column: usize,
}

/// Tokens of one line plus its trailing comment, if any.
pub(crate) struct LexedLine {
    pub tokens: Vec<Token>,
    pub comment: Option<String>,
}

pub(crate) fn lex_line(line_no: usize, line: &str) -> Result<LexedLine, Diagnostic> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let single = |tok| Token { tok, column };
        match c {
            ' ' | '\t' | '\r' | '\u{feff}' => {
                i += 1;
            }
            '#' => {
                let comment: String = chars[i + 1..].iter().collect();
                return Ok(LexedLine {
                    tokens,
                    comment: Some(comment),
                });
            }
            'A'..='Z' | 'a'..='z' | '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(single(Tok::Ident(chars[start..i].iter().collect())));
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    let frac = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == frac {
                        return Err(Diagnostic::new(
                            DiagnosticKind::Lexical,
                            line_no,
                            column,
                            "malformed number: expected digits after `.`",
                        ));
                    }
                }
                if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
                    return Err(Diagnostic::new(
                        DiagnosticKind::Lexical,
                        line_no,
                        i + 1,
                        "identifier cannot start with a digit",
                    ));
                }
                tokens.push(single(Tok::Number(chars[start..i].iter().collect())));
            }
            _ => {
                let next = chars.get(i + 1).copied();
                let (tok, width) = match (c, next) {
                    (':', Some('=')) => (Tok::Define, 2),
                    ('=', Some('=')) => (Tok::EqEq, 2),
                    ('!', Some('=')) => (Tok::Ne, 2),
                    ('<', Some('=')) => (Tok::Le, 2),
                    ('>', Some('=')) => (Tok::Ge, 2),
                    ('(', _) => (Tok::LParen, 1),
                    (')', _) => (Tok::RParen, 1),
                    ('{', _) => (Tok::LBrace, 1),
                    ('}', _) => (Tok::RBrace, 1),
                    (',', _) => (Tok::Comma, 1),
                    (':', _) => (Tok::Colon, 1),
                    ('~', _) => (Tok::Tilde, 1),
                    ('+', _) => (Tok::Plus, 1),
                    ('-', _) => (Tok::Minus, 1),
                    ('*', _) => (Tok::Star, 1),
                    ('/', _) => (Tok::Slash, 1),
                    ('<', _) => (Tok::Lt, 1),
                    ('>', _) => (Tok::Gt, 1),
                    ('=', _) => {
                        return Err(Diagnostic::new(
                            DiagnosticKind::Lexical,
                            line_no,
                            column,
                            "unexpected `=`: use `:=` for assignment or `==` for comparison",
                        ))
                    }
                    _ => {
                        return Err(Diagnostic::new(
                            DiagnosticKind::Lexical,
                            line_no,
                            column,
                            format!("unexpected character {c:?}"),
                        ))
                    }
                };
                tokens.push(single(tok));
                i += width;
            }
        }
    }
    Ok(LexedLine {
        tokens,
        comment: None,
    })
}
