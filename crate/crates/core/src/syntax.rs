//! Concrete syntax.
//!
//! ```text
//! term := "\" ident "." term | app
//! app  := item { item }
//! item := atom { "[" ident "<-" term "]" }
//! atom := ident | "(" term ")"
//! ```
//!
//! Application is left associative and explicit substitutions are postfix,
//! binding tighter than application. `λ` is accepted for `\`. Context syntax
//! additionally admits a single hole `<>` as an atom.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::position::{Position, Step};
use crate::term::{Name, Node, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unbalanced '{bracket}' opened at {line}:{column}")]
    Unbalanced { bracket: char, line: usize, column: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lambda,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Arrow,
    Hole,
    Ident(String),
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut advance = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        let tok = match c {
            c if c.is_whitespace() => {
                advance(&mut chars);
                continue;
            }
            '\\' | 'λ' => {
                advance(&mut chars);
                Tok::Lambda
            }
            '.' => {
                advance(&mut chars);
                Tok::Dot
            }
            '(' => {
                advance(&mut chars);
                Tok::LParen
            }
            ')' => {
                advance(&mut chars);
                Tok::RParen
            }
            '[' => {
                advance(&mut chars);
                Tok::LBracket
            }
            ']' => {
                advance(&mut chars);
                Tok::RBracket
            }
            '<' => {
                advance(&mut chars);
                match chars.peek() {
                    Some('-') => {
                        advance(&mut chars);
                        Tok::Arrow
                    }
                    Some('>') => {
                        advance(&mut chars);
                        Tok::Hole
                    }
                    _ => {
                        return Err(ParseError::Syntax {
                            line: l,
                            column: col,
                            message: "expected '<-' or '<>'".into(),
                        })
                    }
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        s.push(advance(&mut chars));
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            other => {
                return Err(ParseError::Syntax {
                    line: l,
                    column: col,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push(Spanned {
            tok,
            line: l,
            column: col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

/// Source-level term, before names are resolved to binders.
enum Raw {
    Var(String),
    Hole,
    Lam(String, Box<Raw>),
    App(Box<Raw>, Box<Raw>),
    ESub(Box<Raw>, String, Box<Raw>),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    allow_hole: bool,
    holes: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    fn term(&mut self) -> Result<Raw, ParseError> {
        if self.peek().tok == Tok::Lambda {
            self.bump();
            let x = self.expect_ident()?;
            if self.peek().tok != Tok::Dot {
                return Err(self.error("expected '.' after the binder"));
            }
            self.bump();
            let body = self.term()?;
            return Ok(Raw::Lam(x, Box::new(body)));
        }
        let mut acc = self.item()?;
        loop {
            match self.peek().tok {
                Tok::Ident(_) | Tok::LParen | Tok::Hole => {
                    let arg = self.item()?;
                    acc = Raw::App(Box::new(acc), Box::new(arg));
                }
                // a trailing lambda extends to the end of the enclosing term
                Tok::Lambda => {
                    let arg = self.term()?;
                    acc = Raw::App(Box::new(acc), Box::new(arg));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn item(&mut self) -> Result<Raw, ParseError> {
        let mut acc = self.atom()?;
        while self.peek().tok == Tok::LBracket {
            let open = self.bump();
            let x = self.expect_ident()?;
            if self.peek().tok != Tok::Arrow {
                return Err(self.error("expected '<-'"));
            }
            self.bump();
            let content = self.term()?;
            match self.peek().tok {
                Tok::RBracket => {
                    self.bump();
                }
                Tok::Eof => {
                    return Err(ParseError::Unbalanced {
                        bracket: '[',
                        line: open.line,
                        column: open.column,
                    })
                }
                _ => return Err(self.error("expected ']'")),
            }
            acc = Raw::ESub(Box::new(acc), x, Box::new(content));
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Raw, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(s) => {
                self.bump();
                Ok(Raw::Var(s))
            }
            Tok::Hole if self.allow_hole => {
                self.bump();
                self.holes += 1;
                Ok(Raw::Hole)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.term()?;
                match self.peek().tok {
                    Tok::RParen => {
                        self.bump();
                        Ok(inner)
                    }
                    Tok::Eof => Err(ParseError::Unbalanced {
                        bracket: '(',
                        line: t.line,
                        column: t.column,
                    }),
                    _ => Err(self.error("expected ')'")),
                }
            }
            Tok::Eof => Err(self.error("unexpected end of input")),
            Tok::RParen | Tok::RBracket => Err(self.error("unbalanced closing bracket")),
            _ => Err(self.error("expected a variable or '('")),
        }
    }
}

fn parse_raw(src: &str, allow_hole: bool) -> Result<(Raw, usize), ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        allow_hole,
        holes: 0,
    };
    let raw = p.term()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.error("unexpected trailing input"));
    }
    Ok((raw, p.holes))
}

struct Resolver {
    next_uid: u32,
    scope: Vec<(String, Name)>,
    hole_path: Option<Vec<Step>>,
    path: Vec<Step>,
}

impl Resolver {
    fn binder(&mut self, text: &str) -> Name {
        let n = Name::with_uid(text, self.next_uid);
        self.next_uid += 1;
        n
    }

    fn lookup(&self, text: &str) -> Name {
        self.scope
            .iter()
            .rev()
            .find(|(s, _)| s == text)
            .map(|(_, n)| n.clone())
            .unwrap_or_else(|| Name::new(text))
    }

    fn resolve(&mut self, raw: &Raw) -> Term {
        match raw {
            Raw::Var(s) => Term::var(self.lookup(s)),
            Raw::Hole => {
                self.hole_path = Some(self.path.clone());
                Term::hole()
            }
            Raw::Lam(x, body) => {
                let n = self.binder(x);
                self.scope.push((x.clone(), n.clone()));
                self.path.push(Step::LamBody);
                let b = self.resolve(body);
                self.path.pop();
                self.scope.pop();
                Term::lam(n, b)
            }
            Raw::App(f, a) => {
                self.path.push(Step::AppLeft);
                let f = self.resolve(f);
                self.path.pop();
                self.path.push(Step::AppRight);
                let a = self.resolve(a);
                self.path.pop();
                Term::app(f, a)
            }
            Raw::ESub(body, x, content) => {
                self.path.push(Step::ESubContent);
                let c = self.resolve(content);
                self.path.pop();
                // a fresh uid means the binder can never be free in its content
                let n = self.binder(x);
                self.scope.push((x.clone(), n.clone()));
                self.path.push(Step::ESubBody);
                let b = self.resolve(body);
                self.path.pop();
                self.scope.pop();
                Term::esub_raw(b, n, c)
            }
        }
    }
}

fn resolver() -> Resolver {
    Resolver {
        next_uid: 1,
        scope: Vec::new(),
        hole_path: None,
        path: Vec::new(),
    }
}

/// Parses a term. Free variables get uid 0 and every binder a distinct uid.
pub fn parse(src: &str) -> Result<Term, ParseError> {
    let (raw, _) = parse_raw(src, false)?;
    Ok(resolver().resolve(&raw))
}

/// Parses a context: a term with exactly one hole `<>`. Returns the host
/// term, with the hole marker at the returned position.
pub fn parse_context(src: &str) -> Result<(Term, Position), ParseError> {
    let (raw, holes) = parse_raw(src, true)?;
    if holes != 1 {
        return Err(ParseError::Syntax {
            line: 1,
            column: 1,
            message: format!("a context needs exactly one hole, found {holes}"),
        });
    }
    let mut r = resolver();
    let t = r.resolve(&raw);
    Ok((t, Position::from(r.hole_path.unwrap_or_default())))
}

/// Parses a context and a term to plug into its hole, resolving the term's
/// names in the scope of the hole. Returns the plugged host and the position
/// of the plugged term.
pub fn parse_plugged(context: &str, filler: &str) -> Result<(Term, Position), ParseError> {
    let (_, pos) = parse_context(context)?;
    parse(filler)?;
    let host = parse(&context.replacen("<>", &format!("({filler})"), 1))?;
    Ok((host, pos))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Top,
    Fun,
    Arg,
    ESubBody,
}

struct Printer {
    display: HashMap<Name, String>,
}

impl Printer {
    fn new(t: &Term) -> Self {
        let mut display = HashMap::new();
        let free = t.free_vars();
        let mut taken: BTreeSet<String> = free
            .iter()
            .filter(|n| n.uid() == 0 || n.is_hole())
            .map(|n| n.text().to_string())
            .collect();
        for n in &free {
            let s = if n.uid() == 0 || n.is_hole() {
                n.text().to_string()
            } else {
                let s = pick(n.text(), |c| taken.contains(c));
                taken.insert(s.clone());
                s
            };
            display.insert(n.clone(), s);
        }
        Printer { display }
    }

    fn binder(&mut self, x: &Name, scope_body: &Term) -> (String, Option<String>) {
        let avoid: BTreeSet<&String> = scope_body
            .free_vars()
            .iter()
            .filter(|n| *n != x)
            .filter_map(|n| self.display.get(n))
            .collect();
        let s = pick(x.text(), |c| avoid.iter().any(|a| a.as_str() == c));
        let old = self.display.insert(x.clone(), s.clone());
        (s, old)
    }

    fn restore(&mut self, x: &Name, old: Option<String>) {
        match old {
            Some(o) => self.display.insert(x.clone(), o),
            None => self.display.remove(x),
        };
    }

    fn print(&mut self, t: &Term, slot: Slot, out: &mut String) {
        match t.node() {
            Node::Var(x) => {
                let s = self.display.get(x).cloned().unwrap_or_else(|| x.text().to_string());
                out.push_str(&s);
            }
            Node::Lam(x, b) => {
                let paren = slot != Slot::Top;
                if paren {
                    out.push('(');
                }
                let (s, old) = self.binder(x, b);
                out.push('\\');
                out.push_str(&s);
                out.push_str(". ");
                self.print(b, Slot::Top, out);
                self.restore(x, old);
                if paren {
                    out.push(')');
                }
            }
            Node::App(f, a) => {
                let paren = matches!(slot, Slot::Arg | Slot::ESubBody);
                if paren {
                    out.push('(');
                }
                self.print(f, Slot::Fun, out);
                out.push(' ');
                self.print(a, Slot::Arg, out);
                if paren {
                    out.push(')');
                }
            }
            Node::ESub(b, x, c) => {
                let (s, old) = self.binder(x, b);
                self.print(b, Slot::ESubBody, out);
                self.restore(x, old);
                out.push('[');
                out.push_str(&s);
                out.push_str(" <- ");
                self.print(c, Slot::Top, out);
                out.push(']');
            }
        }
    }
}

fn pick(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut s = base.to_string();
    while taken(&s) {
        s.push('\'');
    }
    s
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        Printer::new(self).print(self, Slot::Top, &mut out);
        f.write_str(&out)
    }
}
