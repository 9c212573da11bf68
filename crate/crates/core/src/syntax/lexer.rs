use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Nat(u64),
    Bar,
    Bang,
    Dot,
    Comma,
    Colon,
    Star,
    Plus,
    Hash,
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    Arrow,
    Backslash,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => {
                let s = match other {
                    Tok::Bar => "|",
                    Tok::Bang => "!",
                    Tok::Dot => ".",
                    Tok::Comma => ",",
                    Tok::Colon => ":",
                    Tok::Star => "*",
                    Tok::Plus => "+",
                    Tok::Hash => "#",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LAngle => "<",
                    Tok::RAngle => ">",
                    Tok::LBracket => "[",
                    Tok::RBracket => "]",
                    Tok::Arrow => "->",
                    _ => "\\",
                };
                format!("`{s}`")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, i - line_start + 1);
        if c == '\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let simple = match c {
            '|' => Some(Tok::Bar),
            '!' => Some(Tok::Bang),
            '.' => Some(Tok::Dot),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '*' => Some(Tok::Star),
            '+' => Some(Tok::Plus),
            '#' => Some(Tok::Hash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '<' => Some(Tok::LAngle),
            '>' => Some(Tok::RAngle),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '\\' | 'λ' => Some(Tok::Backslash),
            _ => None,
        };
        if let Some(tok) = simple {
            i += 1;
            out.push(Token {
                tok,
                line: tl,
                column: tc,
            });
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            out.push(Token {
                tok: Tok::Arrow,
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse::<u64>().map_err(|_| SyntaxError {
                line: tl,
                column: tc,
                message: format!("numeral `{digits}` is too large"),
            })?;
            out.push(Token {
                tok: Tok::Nat(n),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                column: tc,
            });
            continue;
        }
        return Err(SyntaxError {
            line: tl,
            column: tc,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: i - line_start + 1,
    });
    Ok(out)
}
