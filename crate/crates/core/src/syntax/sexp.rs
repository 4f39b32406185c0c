//! Generic s-expression reader with source positions.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    Str(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(v, _) => Some(v),
            _ => None,
        }
    }

    /// The head symbol of a list form, if any.
    pub fn head(&self) -> Option<&str> {
        self.as_list()
            .and_then(|v| v.first())
            .and_then(Sexp::as_atom)
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s, _) => write!(f, "{s}"),
            Sexp::Str(s, _) => write!(f, "{s:?}"),
            Sexp::List(v, _) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> SyntaxError {
        SyntaxError {
            pos,
            msg: msg.into(),
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.chars.peek() {
                        None => return Err(SyntaxError::new(start, "unclosed parenthesis")),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexp::List(items, start)));
                        }
                        Some(_) => {
                            if let Some(x) = self.read()? {
                                items.push(x);
                            }
                        }
                    }
                }
            }
            ')' => Err(SyntaxError::new(start, "unexpected ')'")),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(SyntaxError::new(start, "unterminated string")),
                        Some('"') => return Ok(Some(Sexp::Str(s, start))),
                        Some('\\') => match self.bump() {
                            Some(c) => s.push(c),
                            None => return Err(SyntaxError::new(start, "unterminated string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '"' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Some(Sexp::Atom(s, start)))
            }
        }
    }
}

/// Reads every top-level s-expression in `text`.
pub fn read_all(text: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut r = Reader {
        chars: text.chars().peekable(),
        pos: Pos { line: 1, col: 1 },
    };
    let mut out = Vec::new();
    while let Some(x) = r.read()? {
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_and_comments() {
        let xs = read_all("; c\n(a (b c)) d \"s t\"").unwrap();
        assert_eq!(xs.len(), 3);
        assert_eq!(xs[0].to_string(), "(a (b c))");
        assert_eq!(xs[1].as_atom(), Some("d"));
        assert_eq!(xs[2], Sexp::Str("s t".into(), Pos { line: 2, col: 13 }));
    }

    #[test]
    fn error_positions() {
        let e = read_all("(a\n  (b").unwrap_err();
        assert_eq!(e.pos, Pos { line: 2, col: 3 });
        let e = read_all("a )").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 3 });
    }
}
