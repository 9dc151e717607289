use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{BasicSpec, Core, Equation, NodeId, NodeKind, Span, SpeciesGrammar, TerminalDecl};
use crate::zindex::{BasicKind, PointMode};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(u32),
    Eq,
    Plus,
    Times,
    LParen,
    RParen,
    LBrack,
    RBrack,
}

const RESERVED: &[&str] = &[
    "star", "osub", "o", "point", "sympoint", "root", "terminal", "pointing", "of", "pointed",
    "X", "ONE", "ZERO", "SEQ", "SET", "CYC",
];

fn syntax(span: Span, msg: impl Into<String>) -> Error {
    Error::Syntax { line: span.line, col: span.col, msg: msg.into() }
}

fn lex_line(line: &str, lineno: usize) -> Result<Vec<(Tok, Span)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line: lineno, col: i + 1 };
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '=' => Some(Tok::Eq),
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Times),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, span));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse::<u32>()
                .map_err(|_| syntax(span, format!("number {} out of range", text)))?;
            out.push((Tok::Num(n), span));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), span));
            continue;
        }
        return Err(syntax(span, format!("unexpected character '{}'", c)));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, Span)],
    pos: usize,
    end: Span,
    g: &'a mut SpeciesGrammar,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn bump(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == w)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Span> {
        let span = self.span();
        match self.bump() {
            Some((t, s)) if t == want => Ok(s),
            Some((t, _)) => Err(syntax(span, format!("expected {}, found {:?}", what, t))),
            None => Err(syntax(span, format!("expected {}, found end of line", what))),
        }
    }

    fn sum(&mut self) -> Result<NodeId> {
        let mut left = self.term()?;
        while self.peek() == Some(&Tok::Plus) {
            let span = self.bump().unwrap().1;
            let right = self.term()?;
            left = self.g.push(NodeKind::Sum(left, right), span);
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<NodeId> {
        let mut left = self.comp()?;
        loop {
            if self.peek() == Some(&Tok::Times) {
                let span = self.bump().unwrap().1;
                let right = self.comp()?;
                left = self.g.push(NodeKind::Prod(left, right), span);
            } else if self.peek_word("star") {
                let span = self.bump().unwrap().1;
                let right = self.comp()?;
                left = self.g.push(NodeKind::PProd(left, right), span);
            } else {
                return Ok(left);
            }
        }
    }

    fn comp(&mut self) -> Result<NodeId> {
        let left = self.primary()?;
        let pointed_sub = if self.peek_word("o") {
            false
        } else if self.peek_word("osub") {
            true
        } else {
            return Ok(left);
        };
        let span = self.bump().unwrap().1;
        let core = self.as_core(left)?;
        let arg = self.comp()?;
        let kind = if pointed_sub { NodeKind::PSubst(core, arg) } else { NodeKind::Subst(core, arg) };
        Ok(self.g.push(kind, span))
    }

    /// Turn a just-parsed primary into a substitution core.
    fn as_core(&mut self, id: NodeId) -> Result<Core> {
        let node = self.g.nodes[id].clone();
        // The primary was only needed as a core; drop it from the arena if it is last.
        if id + 1 == self.g.nodes.len() {
            self.g.nodes.pop();
        }
        match node.kind {
            NodeKind::Basic(b) => Ok(Core::Basic(b)),
            NodeKind::Ref(name) => Ok(Core::Terminal { name, point: false }),
            NodeKind::PointTerminal(name) => Ok(Core::Terminal { name, point: true }),
            _ => Err(syntax(
                node.span,
                "substitution core must be a basic species or a terminal",
            )),
        }
    }

    fn basic_kind(word: &str) -> Option<BasicKind> {
        Some(match word {
            "X" => BasicKind::X,
            "ONE" => BasicKind::One,
            "ZERO" => BasicKind::Zero,
            "SEQ" => BasicKind::Seq,
            "SET" => BasicKind::Set,
            "CYC" => BasicKind::Cyc,
            _ => return None,
        })
    }

    /// `KIND` or `KIND[k]`.
    fn basic_spec(&mut self, kind: BasicKind) -> Result<BasicSpec> {
        let mut size = None;
        if kind.takes_size() && self.peek() == Some(&Tok::LBrack) {
            self.bump();
            let span = self.span();
            match self.bump() {
                Some((Tok::Num(n), _)) => size = Some(n),
                _ => return Err(syntax(span, "expected a size inside [ ]")),
            }
            self.expect(Tok::RBrack, "']'")?;
        }
        Ok(BasicSpec { kind, size, pointing: None })
    }

    fn primary(&mut self) -> Result<NodeId> {
        let span = self.span();
        match self.bump() {
            Some((Tok::LParen, _)) => {
                let inner = self.sum()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some((Tok::Ident(w), _)) => {
                if let Some(kind) = Self::basic_kind(&w) {
                    let spec = self.basic_spec(kind)?;
                    if kind.takes_size() && self.peek() == Some(&Tok::LParen) {
                        self.bump();
                        let arg = self.sum()?;
                        self.expect(Tok::RParen, "')'")?;
                        return Ok(self.g.push(NodeKind::Subst(Core::Basic(spec), arg), span));
                    }
                    return Ok(self.g.push(NodeKind::Basic(spec), span));
                }
                if w == "point" || w == "sympoint" {
                    let mode = if w == "point" { PointMode::Circle } else { PointMode::Symm };
                    self.expect(Tok::LParen, "'('")?;
                    let inner_span = self.span();
                    let kind = match self.bump() {
                        Some((Tok::Ident(inner), _)) => {
                            if let Some(k) = Self::basic_kind(&inner) {
                                let mut spec = self.basic_spec(k)?;
                                spec.pointing = Some(mode);
                                NodeKind::Basic(spec)
                            } else if RESERVED.contains(&inner.as_str()) {
                                return Err(syntax(inner_span, format!("unexpected keyword '{}'", inner)));
                            } else if mode == PointMode::Circle {
                                NodeKind::PointTerminal(inner)
                            } else {
                                return Err(syntax(
                                    inner_span,
                                    "sympoint applies to basic species only",
                                ));
                            }
                        }
                        _ => {
                            return Err(syntax(
                                inner_span,
                                "point(...) takes a basic species or a terminal name",
                            ))
                        }
                    };
                    self.expect(Tok::RParen, "')'")?;
                    return Ok(self.g.push(kind, span));
                }
                if RESERVED.contains(&w.as_str()) {
                    return Err(syntax(span, format!("unexpected keyword '{}'", w)));
                }
                Ok(self.g.push(NodeKind::Ref(w), span))
            }
            Some((t, _)) => Err(syntax(span, format!("unexpected token {:?}", t))),
            None => Err(syntax(span, "unexpected end of line")),
        }
    }
}

fn ident_at(toks: &[(Tok, Span)], i: usize, end: Span) -> Result<(String, Span)> {
    match toks.get(i) {
        Some((Tok::Ident(s), sp)) if !RESERVED.contains(&s.as_str()) => Ok((s.clone(), *sp)),
        Some((_, sp)) => Err(syntax(*sp, "expected a name")),
        None => Err(syntax(end, "expected a name")),
    }
}

/// Parse specification text. The result is not validated.
pub fn parse(text: &str) -> Result<SpeciesGrammar> {
    let mut g = SpeciesGrammar::default();
    for (lineno0, line) in text.lines().enumerate() {
        let lineno = lineno0 + 1;
        let toks = lex_line(line, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let end = Span { line: lineno, col: line.chars().count() + 1 };
        let first = match &toks[0].0 {
            Tok::Ident(s) => s.clone(),
            _ => return Err(syntax(toks[0].1, "expected a directive or an equation")),
        };
        let trailing = |n: usize| -> Result<()> {
            match toks.get(n) {
                Some((_, sp)) => Err(syntax(*sp, "unexpected trailing input")),
                None => Ok(()),
            }
        };
        match first.as_str() {
            "root" => {
                let (name, sp) = ident_at(&toks, 1, end)?;
                trailing(2)?;
                if g.root.is_some() {
                    return Err(syntax(sp, "duplicate root directive"));
                }
                g.root = Some(name);
            }
            "terminal" => {
                let (name, _) = ident_at(&toks, 1, end)?;
                let pointed = match toks.get(2) {
                    None => false,
                    Some((Tok::Ident(w), _)) if w == "pointed" => {
                        trailing(3)?;
                        true
                    }
                    Some((_, sp)) => return Err(syntax(*sp, "expected 'pointed' or end of line")),
                };
                g.terminals.push(TerminalDecl { name, pointed });
            }
            "pointing" => {
                let (p, _) = ident_at(&toks, 1, end)?;
                match toks.get(2) {
                    Some((Tok::Ident(w), _)) if w == "of" => {}
                    Some((_, sp)) => return Err(syntax(*sp, "expected 'of'")),
                    None => return Err(syntax(end, "expected 'of'")),
                }
                let (o, _) = ident_at(&toks, 3, end)?;
                trailing(4)?;
                g.pointings.push((p, o));
            }
            _ => {
                let (var, span) = ident_at(&toks, 0, end)?;
                match toks.get(1) {
                    Some((Tok::Eq, _)) => {}
                    Some((_, sp)) => return Err(syntax(*sp, "expected '='")),
                    None => return Err(syntax(end, "expected '='")),
                }
                let rest = &toks[2..];
                let mut p = Parser { toks: rest, pos: 0, end, g: &mut g };
                let rhs = p.sum()?;
                if p.pos < rest.len() {
                    return Err(syntax(rest[p.pos].1, "unexpected trailing input"));
                }
                g.equations.push(Equation { var, rhs, span });
            }
        }
    }
    if g.equations.is_empty() {
        return Err(Error::Syntax { line: 1, col: 1, msg: "no equations".to_string() });
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rooted_trees() {
        let g = parse("R = X * SET(R)").unwrap();
        assert_eq!(g.equations.len(), 1);
        let rhs = &g.nodes[g.equations[0].rhs].kind;
        match rhs {
            NodeKind::Prod(a, b) => {
                assert!(matches!(g.nodes[*a].kind, NodeKind::Basic(BasicSpec { kind: BasicKind::X, .. })));
                assert!(matches!(&g.nodes[*b].kind, NodeKind::Subst(Core::Basic(_), _)));
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn binary_trees() {
        let g = parse("T = X + T * T").unwrap();
        assert!(matches!(g.nodes[g.equations[0].rhs].kind, NodeKind::Sum(_, _)));
    }

    #[test]
    fn precedence_of_osub_and_star() {
        let g = parse("P = sympoint(SET) osub R star X\nR = X * SET(R)").unwrap();
        match &g.nodes[g.equations[0].rhs].kind {
            NodeKind::PProd(a, _) => {
                assert!(matches!(&g.nodes[*a].kind, NodeKind::PSubst(Core::Basic(b), _) if b.pointing == Some(PointMode::Symm)));
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn syntax_error_position() {
        let err = parse("# c\nA = X +\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }), "{:?}", err);
        let err = parse("A = X $ X").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, col: 7, .. }), "{:?}", err);
    }

    #[test]
    fn unknown_token_rejected() {
        assert!(matches!(parse("A = MSET(A)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("A = X o"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("A = (X * X) o X"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn directives() {
        let g = parse("terminal B\nterminal C pointed\npointing Ao of A\nA = B o X\nAo = point(B) osub A\nroot A").unwrap();
        assert_eq!(g.terminals.len(), 2);
        assert!(g.terminals[1].pointed);
        assert_eq!(g.pointings, [("Ao".into(), "A".into())]);
        assert_eq!(g.root.as_deref(), Some("A"));
    }
}
