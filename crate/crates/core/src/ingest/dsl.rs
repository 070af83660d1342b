//! Parser for the `.csm` text format.
//!
//! ```text
//! interface IJL group : I, J, L { op ping; }
//! class E active : Base {
//!     realizes J, L;
//!     uses K;
//!     part w: Worker x2;
//!     port pJL: JL;
//!     port rK: K reversed;
//!     connector self.pJL, w via deleg_J;
//! }
//! assoc itsK (D, K nav);
//! root A;
//! ```
//!
//! One statement per element. On a syntax error the parser skips to the end
//! of the current statement and keeps going, so one run reports every
//! malformed statement.

use crate::ingest::ParseError;
use crate::model::{
    Association, AssociationEnd, Attribute, Class, ClassKind, Connector, EndRef, Interface,
    Model, Part, Port, SourceSpan, Span,
};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(u64),
    Punct(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: u32,
    column: u32,
}

fn lex(text: &str, file: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (sl, sc) = (line, col);
            advance(&mut i, &mut line, &mut col, '/');
            advance(&mut i, &mut line, &mut col, '*');
            loop {
                if i >= chars.len() {
                    return Err(ParseError {
                        span: span(file, sl, sc),
                        message: "unterminated block comment".into(),
                        expected: Some("`*/`".into()),
                    });
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    advance(&mut i, &mut line, &mut col, '*');
                    advance(&mut i, &mut line, &mut col, '/');
                    break;
                }
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            continue;
        }
        let (tl, tc) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: tl,
                column: tc,
            });
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            let n = s.parse().map_err(|_| ParseError {
                span: span(file, tl, tc),
                message: format!("number `{s}` is out of range"),
                expected: None,
            })?;
            out.push(Token {
                tok: Tok::Number(n),
                line: tl,
                column: tc,
            });
        } else if "{}():;,.[]".contains(c) {
            out.push(Token {
                tok: Tok::Punct(c),
                line: tl,
                column: tc,
            });
            advance(&mut i, &mut line, &mut col, c);
        } else {
            return Err(ParseError {
                span: span(file, tl, tc),
                message: format!("unexpected character `{c}`"),
                expected: None,
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

fn span(file: &str, line: u32, column: u32) -> SourceSpan {
    SourceSpan {
        file: file.to_string(),
        line,
        column,
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: &'a str,
    errors: Vec<ParseError>,
}

type PResult<T> = Result<T, ParseError>;

const TOP_LEVEL: [&str; 4] = ["interface", "class", "assoc", "root"];

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> SourceSpan {
        let t = &self.toks[self.pos];
        span(self.file, t.line, t.column)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>, expected: &str) -> PResult<T> {
        Err(ParseError {
            span: self.here(),
            message: message.into(),
            expected: Some(expected.to_string()),
        })
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        self.error(format!("unexpected {}", self.peek().describe()), expected)
    }

    fn is_punct(&self, c: char) -> bool {
        *self.peek() == Tok::Punct(c)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.is_punct(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> PResult<()> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            self.unexpected(&format!("`{c}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        let here = self.here();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, Span(Some(here))))
            }
            _ => self.unexpected(what),
        }
    }

    fn name_list(&mut self, what: &str) -> PResult<Vec<String>> {
        let mut out = vec![self.ident(what)?.0];
        while self.eat_punct(',') {
            out.push(self.ident(what)?.0);
        }
        Ok(out)
    }

    /// `;`, or nothing when the enclosing block closes next.
    fn end_statement(&mut self) -> PResult<()> {
        if self.eat_punct(';') || self.is_punct('}') {
            Ok(())
        } else {
            self.unexpected("`;`")
        }
    }

    /// Skips to just past the next `;` at the current nesting depth, or up to
    /// (not past) the `}` closing it.
    fn recover_member(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Punct('{') | Tok::Punct('(') => depth += 1,
                Tok::Punct(')') => depth = depth.saturating_sub(1),
                Tok::Punct('}') if depth == 0 => return,
                Tok::Punct('}') => depth -= 1,
                Tok::Punct(';') if depth == 0 => {
                    self.bump();
                    return;
                }
                _ => {}
            }
            self.bump();
        }
    }

    /// Skips to the next top-level keyword outside any block.
    fn recover_item(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Punct('{') => depth += 1,
                Tok::Punct('}') => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        self.bump();
                        self.eat_punct(';');
                        return;
                    }
                }
                Tok::Ident(s) if depth == 0 && TOP_LEVEL.contains(&s.as_str()) => return,
                _ => {}
            }
            self.bump();
        }
    }

    fn parse_file(&mut self) -> Model {
        let mut model = Model::new();
        while *self.peek() != Tok::Eof {
            let start = self.pos;
            let res = if self.eat_kw("interface") {
                self.interface().map(|i| model.interfaces.push(i))
            } else if self.eat_kw("class") {
                self.class().map(|c| model.classes.push(c))
            } else if self.eat_kw("assoc") {
                self.association().map(|a| model.associations.push(a))
            } else if self.eat_kw("root") {
                self.ident("root class name").and_then(|(name, _)| {
                    self.expect_punct(';')?;
                    if model.root.is_some() {
                        return self.error("root is declared more than once", "a single `root`");
                    }
                    model.root = Some(name);
                    Ok(())
                })
            } else {
                self.unexpected("`interface`, `class`, `assoc` or `root`")
            };
            if let Err(e) = res {
                self.errors.push(e);
                if self.pos == start {
                    self.bump();
                }
                self.recover_item();
            }
        }
        model
    }

    fn generals(&mut self) -> PResult<Vec<String>> {
        if self.eat_punct(':') {
            self.name_list("general name")
        } else {
            Ok(Vec::new())
        }
    }

    fn interface(&mut self) -> PResult<Interface> {
        let (name, span) = self.ident("interface name")?;
        let is_group = self.eat_kw("group");
        let generals = self.generals()?;
        self.expect_punct('{')?;
        let mut operations = Vec::new();
        while !self.is_punct('}') {
            if *self.peek() == Tok::Eof {
                return self.unexpected("`}`");
            }
            let res = if self.eat_kw("op") {
                self.ident("operation name").and_then(|(op, _)| {
                    operations.push(op);
                    self.end_statement()
                })
            } else {
                self.unexpected("`op` or `}`")
            };
            if let Err(e) = res {
                self.errors.push(e);
                self.recover_member();
            }
        }
        self.expect_punct('}')?;
        self.eat_punct(';');
        Ok(Interface {
            name,
            generals,
            is_group,
            operations,
            span,
        })
    }

    fn class(&mut self) -> PResult<Class> {
        let (name, span) = self.ident("class name")?;
        let kind = match self.peek() {
            Tok::Ident(s) if s == "active" => Some(ClassKind::Active),
            Tok::Ident(s) if s == "passive" => Some(ClassKind::Passive),
            Tok::Ident(s) if s == "protected" => Some(ClassKind::Protected),
            Tok::Ident(s) if s == "observer" => Some(ClassKind::Observer),
            _ => None,
        };
        if kind.is_some() {
            self.bump();
        }
        let generals = self.generals()?;
        self.expect_punct('{')?;
        let mut class = Class {
            name,
            kind: kind.unwrap_or_default(),
            generals,
            span,
            ..Class::default()
        };
        while !self.is_punct('}') {
            if *self.peek() == Tok::Eof {
                return self.unexpected("`}`");
            }
            if let Err(e) = self.member(&mut class) {
                self.errors.push(e);
                self.recover_member();
            }
        }
        self.expect_punct('}')?;
        self.eat_punct(';');
        Ok(class)
    }

    fn member(&mut self, class: &mut Class) -> PResult<()> {
        let Tok::Ident(kw) = self.peek().clone() else {
            return self.unexpected("a class member");
        };
        match kw.as_str() {
            "realizes" => {
                self.bump();
                let names = self.name_list("interface name")?;
                class.realizes.extend(names);
            }
            "uses" => {
                self.bump();
                let names = self.name_list("interface name")?;
                class.uses.extend(names);
            }
            "attr" => {
                self.bump();
                let (name, span) = self.ident("attribute name")?;
                self.expect_punct(':')?;
                let (ty, _) = self.ident("attribute type")?;
                class.attributes.push(Attribute { name, ty, span });
            }
            "part" => {
                self.bump();
                let (name, span) = self.ident("part name")?;
                self.expect_punct(':')?;
                let (ty, _) = self.ident("part type")?;
                let multiplicity = self.multiplicity()?;
                class.parts.push(Part {
                    name,
                    ty,
                    multiplicity,
                    span,
                });
            }
            "port" => {
                self.bump();
                let (name, span) = self.ident("port name")?;
                self.expect_punct(':')?;
                let (contract, _) = self.ident("port contract")?;
                let reversed = self.eat_kw("reversed");
                class.ports.push(Port {
                    name,
                    contract,
                    reversed,
                    span,
                });
            }
            "connector" => {
                let span = Span(Some(self.here()));
                self.bump();
                let end1 = self.end_ref()?;
                self.expect_punct(',')?;
                let end2 = self.end_ref()?;
                if self.is_punct(',') {
                    return self.error(
                        "connectors are binary; n-ary connectors are not supported",
                        "`via`, `;` or `}`",
                    );
                }
                let association = if self.eat_kw("via") {
                    Some(self.ident("association name")?.0)
                } else {
                    None
                };
                class.connectors.push(Connector {
                    end1,
                    end2,
                    association,
                    span,
                });
            }
            _ => return self.unexpected("`realizes`, `uses`, `attr`, `part`, `port` or `connector`"),
        }
        self.end_statement()
    }

    /// `xN`, `x N` or `[N]` after a part type; defaults to 1.
    fn multiplicity(&mut self) -> PResult<u32> {
        let to_u32 = |p: &Self, n: u64| -> PResult<u32> {
            u32::try_from(n).or_else(|_| p.error("multiplicity is too large", "a smaller count"))
        };
        if self.eat_punct('[') {
            let n = match self.peek().clone() {
                Tok::Number(n) => {
                    self.bump();
                    n
                }
                _ => return self.unexpected("multiplicity"),
            };
            self.expect_punct(']')?;
            return to_u32(self, n);
        }
        if let Tok::Ident(s) = self.peek().clone() {
            if s == "x" {
                if let Tok::Number(n) = *self.peek_at(1) {
                    self.bump();
                    self.bump();
                    return to_u32(self, n);
                }
            } else if let Some(digits) = s.strip_prefix('x') {
                if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                    let n: u64 = digits.parse().unwrap_or(u64::MAX);
                    self.bump();
                    return to_u32(self, n);
                }
            }
        }
        Ok(1)
    }

    fn end_ref(&mut self) -> PResult<EndRef> {
        let (first, _) = self.ident("connector end")?;
        if first == "self" {
            self.expect_punct('.')?;
            let (port, _) = self.ident("port name")?;
            return Ok(EndRef::own_port(&port));
        }
        if self.eat_punct('.') {
            let (port, _) = self.ident("port name")?;
            return Ok(EndRef::part_port(&first, &port));
        }
        Ok(EndRef::part(&first))
    }

    fn association(&mut self) -> PResult<Association> {
        let (name, span) = self.ident("association name")?;
        self.expect_punct('(')?;
        let end1 = self.association_end()?;
        self.expect_punct(',')?;
        let end2 = self.association_end()?;
        if self.is_punct(',') {
            return self.error("associations are binary", "`)`");
        }
        self.expect_punct(')')?;
        self.expect_punct(';')?;
        Ok(Association {
            name,
            end1,
            end2,
            synthesized: false,
            span,
        })
    }

    fn association_end(&mut self) -> PResult<AssociationEnd> {
        let (ty, _) = self.ident("association end type")?;
        let navigable = self.eat_kw("nav");
        Ok(AssociationEnd { ty, navigable })
    }
}

pub fn parse_dsl(text: &str) -> Result<Model, Vec<ParseError>> {
    parse_dsl_named(text, "<input>")
}

pub fn parse_dsl_named(text: &str, file: &str) -> Result<Model, Vec<ParseError>> {
    let toks = lex(text, file).map_err(|e| vec![e])?;
    let mut parser = Parser {
        toks,
        pos: 0,
        file,
        errors: Vec::new(),
    };
    let model = parser.parse_file();
    if parser.errors.is_empty() {
        Ok(model)
    } else {
        Err(parser.errors)
    }
}
