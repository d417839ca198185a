use std::fmt;

use crate::ta::CmpOp;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(i64),
    Cmp(CmpOp),
    /// `A[]`, `E<>`, `A<>`, `E[]`
    Path(&'static str),
    AndAnd,
    OrOr,
    Amp,
    Pipe,
    Bang,
    Arrow,
    Assign,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Comment(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(n) => write!(f, "`{n}`"),
            Tok::Cmp(op) => write!(f, "`{op}`"),
            Tok::Path(p) => write!(f, "`{p}`"),
            Tok::AndAnd => f.write_str("`&&`"),
            Tok::OrOr => f.write_str("`||`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Assign => f.write_str("`=`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Comment(_) => f.write_str("comment"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        SyntaxError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// Tokenizes property and contract text. Comments are kept as tokens since
/// some of them carry facet markers. Word operators of the query dialect
/// (`imply`, `and`, `or`, `not`) are mapped onto their symbolic forms.
pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let peek = chars.get(i + 1).copied();
        let push = |out: &mut Vec<Token>, tok| {
            out.push(Token {
                tok,
                line: tl,
                col: tc,
            })
        };

        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && peek == Some('*') {
            bump!();
            bump!();
            let start = i;
            loop {
                if i + 1 >= chars.len() {
                    return Err(SyntaxError::new(tl, tc, "unterminated comment"));
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    break;
                }
                bump!();
            }
            let body: String = chars[start..i].iter().collect();
            bump!();
            bump!();
            push(&mut out, Tok::Comment(body.trim().to_string()));
            continue;
        }
        if c == '/' && peek == Some('/') {
            let start = i + 2;
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            let body: String = chars[start..i].iter().collect();
            push(&mut out, Tok::Comment(body.trim().to_string()));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits
                .parse()
                .map_err(|_| SyntaxError::new(tl, tc, format!("number `{digits}` out of range")))?;
            push(&mut out, Tok::Number(n));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.')
            {
                bump!();
            }
            if i < chars.len() && chars[i] == '*' && !(chars.get(i + 1) == Some(&'/')) {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let path = match (word.as_str(), two.as_str()) {
                ("A", "[]") => Some("A[]"),
                ("E", "<>") => Some("E<>"),
                ("A", "<>") => Some("A<>"),
                ("E", "[]") => Some("E[]"),
                _ => None,
            };
            if let Some(p) = path {
                bump!();
                bump!();
                push(&mut out, Tok::Path(p));
                continue;
            }
            let tok = match word.as_str() {
                "imply" => Tok::Arrow,
                "and" => Tok::AndAnd,
                "or" => Tok::OrOr,
                "not" => Tok::Bang,
                _ => Tok::Ident(word),
            };
            push(&mut out, tok);
            continue;
        }
        let two = (c, peek);
        let (tok, len) = match two {
            ('&', Some('&')) => (Tok::AndAnd, 2),
            ('|', Some('|')) => (Tok::OrOr, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('=', Some('=')) => (Tok::Cmp(CmpOp::Eq), 2),
            ('!', Some('=')) => (Tok::Cmp(CmpOp::Ne), 2),
            ('<', Some('=')) => (Tok::Cmp(CmpOp::Le), 2),
            ('>', Some('=')) => (Tok::Cmp(CmpOp::Ge), 2),
            ('<', _) => (Tok::Cmp(CmpOp::Lt), 1),
            ('>', _) => (Tok::Cmp(CmpOp::Gt), 1),
            ('&', _) => (Tok::Amp, 1),
            ('|', _) => (Tok::Pipe, 1),
            ('!', _) => (Tok::Bang, 1),
            ('=', _) => (Tok::Assign, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            _ => {
                return Err(SyntaxError::new(
                    tl,
                    tc,
                    format!("unexpected character `{c}`"),
                ))
            }
        };
        for _ in 0..len {
            bump!();
        }
        push(&mut out, tok);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn dotted_and_starred_names() {
        assert_eq!(
            toks("p4.1 = gear.man_highdown && P7*"),
            [
                Tok::Ident("p4.1".into()),
                Tok::Assign,
                Tok::Ident("gear.man_highdown".into()),
                Tok::AndAnd,
                Tok::Ident("P7*".into())
            ]
        );
    }

    #[test]
    fn query_dialect() {
        assert_eq!(
            toks("A[] a or b imply c"),
            [
                Tok::Path("A[]"),
                Tok::Ident("a".into()),
                Tok::OrOr,
                Tok::Ident("b".into()),
                Tok::Arrow,
                Tok::Ident("c".into())
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("/*facet: SAFETY*/\n  x>=4").unwrap();
        assert_eq!(t[0].tok, Tok::Comment("facet: SAFETY".into()));
        assert_eq!((t[1].line, t[1].col), (2, 3));
        assert_eq!(t[2].tok, Tok::Cmp(CmpOp::Ge));
        assert!(tokenize("/* open").is_err());
        assert!(tokenize("x $ y").is_err());
    }
}
