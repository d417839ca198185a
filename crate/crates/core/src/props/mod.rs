//! Property language: lexer, parser, compilation to checkable queries and
//! the named state predicates of the landing-gear model.

mod ast;
mod compile;
mod lexer;
pub(crate) mod parser;
mod predicates;

pub use ast::{
    normalize_name, DeclId, DeclKind, Declaration, Expr, Item, PropertyAst, PropertyFile,
    Quantifier,
};
pub use compile::{
    compile_expr, compile_property, fixes_clock, CheckableQuery, CompileError, MappingRow, Pred,
    QueryKind, MAPPING,
};
pub use lexer::{tokenize, SyntaxError, Tok, Token};
pub use parser::{parse_document, parse_properties, parse_query};
pub use predicates::{builtin_predicates, predicate_exprs, star, PredicateTable};

/// Source of the landing-gear property suite.
pub const SUITE_SOURCE: &str = include_str!("../../assets/properties.psl");

/// The landing-gear property suite.
pub fn suite() -> PropertyFile {
    parse_document(SUITE_SOURCE).expect("bundled suite parses")
}
