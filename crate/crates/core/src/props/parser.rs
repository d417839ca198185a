use super::ast::{
    normalize_name, DeclId, DeclKind, Declaration, Expr, Item, PropertyAst, PropertyFile,
    Quantifier,
};
use super::lexer::{tokenize, SyntaxError, Tok, Token};
use crate::contracts::Facet;
use crate::ta::Value;

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Parser, SyntaxError> {
        let toks = tokenize(text)?;
        let lines = text.lines().count().max(1);
        let last_col = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
        Ok(Parser {
            toks,
            pos: 0,
            end: (lines, last_col),
        })
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_comments();
        self.pos >= self.toks.len()
    }

    fn skip_comments(&mut self) {
        while matches!(
            self.toks.get(self.pos),
            Some(Token {
                tok: Tok::Comment(_),
                ..
            })
        ) {
            self.pos += 1;
        }
    }

    /// Next comment at the current position, without skipping anything else.
    pub(crate) fn take_comment(&mut self) -> Option<String> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Comment(c),
                ..
            }) => {
                let c = c.clone();
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    pub(crate) fn peek(&mut self) -> Option<&Tok> {
        self.skip_comments();
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub(crate) fn position(&mut self) -> (usize, usize) {
        self.skip_comments();
        self.toks
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.col))
    }

    pub(crate) fn error(&mut self, message: impl Into<String>) -> SyntaxError {
        let (line, col) = self.position();
        SyntaxError::new(line, col, message)
    }

    pub(crate) fn next(&mut self) -> Option<Tok> {
        self.skip_comments();
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("{tok}")))
        }
    }

    pub(crate) fn unexpected(&mut self, wanted: &str) -> SyntaxError {
        match self.peek().cloned() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.next() {
                Some(Tok::Ident(s)) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected("identifier")),
        }
    }

    /// True when the next tokens start an item: `assert ...` or `NAME =`.
    pub(crate) fn at_item_start(&mut self) -> bool {
        if self.is_word("assert") {
            return true;
        }
        if !matches!(self.peek(), Some(Tok::Ident(_))) {
            return false;
        }
        let next = self.toks[self.pos + 1..]
            .iter()
            .find(|t| !matches!(t.tok, Tok::Comment(_)));
        matches!(
            next,
            Some(Token {
                tok: Tok::Assign,
                ..
            })
        )
    }

    pub(crate) fn is_word(&mut self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(w)) if w == word)
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.conj()?;
        while self.eat(&Tok::OrOr) {
            lhs = Expr::or(lhs, self.conj()?);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::AndAnd) {
            lhs = Expr::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat(&Tok::Bang) {
            return Ok(Expr::negate(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.next();
                match name.as_str() {
                    "true" => return Ok(Expr::Const(true)),
                    "false" => return Ok(Expr::Const(false)),
                    _ => {}
                }
                if let Some(Tok::Cmp(op)) = self.peek().cloned() {
                    self.next();
                    let value = match self.next() {
                        Some(Tok::Number(n)) => Value::Int(n),
                        Some(Tok::Ident(w)) if w == "true" => Value::Bool(true),
                        Some(Tok::Ident(w)) if w == "false" => Value::Bool(false),
                        _ => {
                            self.pos -= 1;
                            return Err(self.unexpected("constant"));
                        }
                    };
                    return Ok(Expr::Compare { name, op, value });
                }
                Ok(Expr::Name(name))
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    fn quantifier(&mut self) -> Result<Quantifier, SyntaxError> {
        let word = match self.peek().cloned() {
            Some(Tok::Path(p)) => p.to_string(),
            Some(Tok::Ident(w)) => w,
            _ => return Err(self.unexpected("quantifier")),
        };
        match Quantifier::parse(&word) {
            Some(q) => {
                self.next();
                Ok(q)
            }
            None => Err(self.error(format!("unknown quantifier `{word}`"))),
        }
    }

    /// `QUANT expr [-> expr]`
    pub(crate) fn body(&mut self) -> Result<(Quantifier, Expr, Option<Expr>), SyntaxError> {
        let q = self.quantifier()?;
        let ante = self.expr()?;
        let cons = if self.eat(&Tok::Arrow) {
            Some(self.expr()?)
        } else {
            None
        };
        Ok((q, ante, cons))
    }

    fn decl_ids(&mut self) -> Result<Vec<DeclId>, SyntaxError> {
        let mut ids = Vec::new();
        loop {
            let name = self.ident()?;
            let array = if self.eat(&Tok::LBracket) {
                self.expect(Tok::RBracket)?;
                true
            } else {
                false
            };
            ids.push(DeclId { name, array });
            if !self.eat(&Tok::Comma) {
                return Ok(ids);
            }
        }
    }

    /// One `[assert property] NAME = ...;` item.
    pub(crate) fn item(&mut self, facet: Option<Facet>) -> Result<Item, SyntaxError> {
        let (line, _) = self.position();
        let asserted = if self.is_word("assert") {
            self.next();
            if !self.is_word("property") {
                return Err(self.unexpected("`property`"));
            }
            self.next();
            true
        } else {
            false
        };
        let name = normalize_name(&self.ident()?);
        self.expect(Tok::Assign)?;
        let kind = match self.peek() {
            Some(Tok::Ident(w)) => DeclKind::parse(w),
            _ => None,
        };
        let item = if let Some(kind) = kind {
            self.next();
            let ids = self.decl_ids()?;
            Item::Declaration(Declaration {
                name,
                kind,
                ids,
                facet,
                asserted,
                line,
            })
        } else {
            let (quantifier, antecedent, consequent) = self.body()?;
            Item::Property(PropertyAst {
                name,
                quantifier,
                antecedent,
                consequent,
                facet,
                asserted,
                line,
            })
        };
        self.expect(Tok::Semi)?;
        Ok(item)
    }

    /// Consumes comments before the next item, updating the sticky facet.
    pub(crate) fn markers(&mut self, facet: &mut Option<Facet>) {
        while let Some(c) = self.take_comment() {
            if let Some(rest) = c.trim().strip_prefix("facet:") {
                if rest.trim().eq_ignore_ascii_case("none") {
                    *facet = None;
                    continue;
                }
            }
            if let Some(f) = Facet::from_marker(&c) {
                *facet = Some(f);
            }
        }
    }
}

/// Parses a property file: properties and declarations with facet markers.
pub fn parse_document(text: &str) -> Result<PropertyFile, SyntaxError> {
    let mut p = Parser::new(text)?;
    let mut file = PropertyFile::default();
    let mut facet = None;
    loop {
        p.markers(&mut facet);
        if p.at_end() {
            break;
        }
        let (line, col) = p.position();
        let item = p.item(facet)?;
        if file.items.iter().any(|i| i.name() == item.name()) {
            return Err(SyntaxError::new(
                line,
                col,
                format!("duplicate property name `{}`", item.name()),
            ));
        }
        file.items.push(item);
    }
    Ok(file)
}

/// The properties of a file, declarations dropped.
pub fn parse_properties(text: &str) -> Result<Vec<PropertyAst>, SyntaxError> {
    Ok(parse_document(text)?.properties().cloned().collect())
}

/// A single unnamed query, in either the property syntax (`AG p -> q`) or
/// the query dialect (`A[] p imply q`).
pub fn parse_query(text: &str) -> Result<PropertyAst, SyntaxError> {
    let mut p = Parser::new(text)?;
    let (line, _) = p.position();
    let (quantifier, antecedent, consequent) = p.body()?;
    p.eat(&Tok::Semi);
    if !p.at_end() {
        return Err(p.unexpected("end of query"));
    }
    Ok(PropertyAst {
        name: "QUERY".into(),
        quantifier,
        antecedent,
        consequent,
        facet: None,
        asserted: false,
        line,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ta::CmpOp;

    #[test]
    fn implication_with_negation() {
        let p = parse_properties("p21 = AG door_open==true -> door_closed==false;").unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].name, "P21");
        assert_eq!(p[0].quantifier, Quantifier::AG);
        assert_eq!(
            p[0].antecedent,
            Expr::Compare {
                name: "door_open".into(),
                op: CmpOp::Eq,
                value: Value::Bool(true)
            }
        );
    }

    #[test]
    fn precedence() {
        let p = parse_query("AG a || b && !c -> d").unwrap();
        assert_eq!(p.antecedent.to_string(), "a || b && !c");
        match p.antecedent {
            Expr::Or(_, r) => assert!(matches!(*r, Expr::And(..))),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn errors_have_positions() {
        let e = parse_properties("x = AG ;").unwrap_err();
        assert_eq!((e.line, e.col), (1, 8));
        let e = parse_properties("x = XG a;").unwrap_err();
        assert!(e.message.contains("unknown quantifier"), "{e}");
        let e = parse_properties("a = AG x;\nA = AG y;").unwrap_err();
        assert!(e.message.contains("duplicate"), "{e}");
    }

    #[test]
    fn facet_markers_are_sticky() {
        let f = parse_document(
            "/*Safety facets*/ assert property p5 = AG a; q = AG b;\n/*facet: LIVENESS*/ r = EF c;\n/*facet: none*/ s = EF d;",
        )
        .unwrap();
        let facets: Vec<_> = f.items.iter().map(|i| i.facet()).collect();
        assert_eq!(
            facets,
            [
                Some(Facet::Safety),
                Some(Facet::Safety),
                Some(Facet::Liveness),
                None
            ]
        );
    }

    #[test]
    fn declarations() {
        let f = parse_document("P39 = boolean gear_extend[], failure[];\nP40 = clock ck_door;")
            .unwrap();
        let d: Vec<_> = f.declarations().collect();
        assert_eq!(d[0].kind, DeclKind::Boolean);
        assert!(d[0].ids.iter().all(|i| i.array));
        assert_eq!(d[1].ids[0].name, "ck_door");
    }

    #[test]
    fn query_dialect() {
        let q = parse_query("A[] failure_door==true or failure_gear==true imply interface.red")
            .unwrap();
        assert_eq!(q.quantifier, Quantifier::AG);
        assert_eq!(q.consequent, Some(Expr::Name("interface.red".into())));
    }
}
