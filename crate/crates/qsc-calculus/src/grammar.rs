//! Text grammar for resource expressions and inequalities, e.g.
//! `2[c->c] + 1/2 I(A;E)@psi [qq] + o[cc] >= [q->q]`.
//! Whitespace-insensitive; printing is deterministic and round-trips.

use crate::atom::{AtomKind, EntropicAtom, Group};
use crate::coeff::{Coefficient, Rat};
use crate::error::{CalcError, Result};
use crate::expr::{DecouplingFlag, Relation, ResourceExpr, ResourceInequality, Side};
use crate::symbol::ResourceSymbol;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

// ---------------------------------------------------------------- printing

pub fn print_rat(r: &Rat) -> String {
    if r.denom() == &BigInt::from(1) {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn print_group(g: &Group) -> String {
    g.join(" ")
}

pub fn print_atom(a: &EntropicAtom) -> String {
    match a.kind {
        AtomKind::H => format!("H({})@{}", print_group(&a.groups[0]), a.tag),
        AtomKind::Hcond => format!(
            "H({}|{})@{}",
            print_group(&a.groups[0]),
            print_group(&a.groups[1]),
            a.tag
        ),
        AtomKind::Imutual => format!(
            "I({};{})@{}",
            print_group(&a.groups[0]),
            print_group(&a.groups[1]),
            a.tag
        ),
        AtomKind::Icoh => format!(
            "Icoh({}>{})@{}",
            print_group(&a.groups[0]),
            print_group(&a.groups[1]),
            a.tag
        ),
        AtomKind::Icmi => format!(
            "I({};{}|{})@{}",
            print_group(&a.groups[0]),
            print_group(&a.groups[1]),
            print_group(&a.groups[2]),
            a.tag
        ),
    }
}

pub fn print_symbol(s: &ResourceSymbol) -> String {
    match s {
        ResourceSymbol::Cbit => "[c->c]".into(),
        ResourceSymbol::Qubit => "[q->q]".into(),
        ResourceSymbol::Ebit => "[qq]".into(),
        ResourceSymbol::Rbit => "[cc]".into(),
        ResourceSymbol::Cobit => "[q->qq]".into(),
        ResourceSymbol::CbitTau => "[c->c:tau]".into(),
        ResourceSymbol::QubitTau => "[q->q:tau]".into(),
        ResourceSymbol::CobitTau => "[q->qq:tau]".into(),
        ResourceSymbol::Static { tag } => format!("<{tag}>"),
        ResourceSymbol::Dynamic { name, test: None } => format!("<ch {name}>"),
        ResourceSymbol::Dynamic { name, test: Some(t) } => format!("<ch {name} : {t}>"),
        ResourceSymbol::Protected { name, source } => format!("<src {name} : {source}>"),
    }
}

/// Signed parts of a coefficient: (is_negative, body-without-sign).
fn coeff_parts(c: &Coefficient) -> Vec<(bool, String)> {
    let mut parts = Vec::new();
    if !c.rational.is_zero() || c.atoms.is_empty() {
        parts.push((c.rational.is_negative(), print_rat(&c.rational.abs())));
    }
    for (a, r) in &c.atoms {
        let body = if r.abs().is_one() {
            print_atom(a)
        } else {
            format!("{} {}", print_rat(&r.abs()), print_atom(a))
        };
        parts.push((r.is_negative(), body));
    }
    parts
}

fn print_term(sym: &ResourceSymbol, c: &Coefficient, flag: Option<DecouplingFlag>) -> (bool, String) {
    let parts = coeff_parts(c);
    let flag_suffix = match flag {
        Some(DecouplingFlag::Coherent) => "{coh}",
        Some(DecouplingFlag::Incoherent) => "{inc}",
        None => "",
    };
    let symtext = format!("{}{}", print_symbol(sym), flag_suffix);
    if parts.len() == 1 {
        let (neg, body) = &parts[0];
        if body == "1" {
            (*neg, symtext)
        } else if c.atoms.is_empty() {
            // bare rational coefficients attach to the symbol: 2[c->c]
            (*neg, format!("{body}{symtext}"))
        } else {
            (*neg, format!("{body} {symtext}"))
        }
    } else {
        let mut body = String::from("(");
        for (i, (neg, text)) in parts.iter().enumerate() {
            if i == 0 {
                if *neg {
                    body.push_str("- ");
                }
            } else {
                body.push_str(if *neg { " - " } else { " + " });
            }
            body.push_str(text);
        }
        body.push(')');
        (false, format!("{body} {symtext}"))
    }
}

pub fn print_expr(e: &ResourceExpr) -> String {
    print_expr_flagged(e, &BTreeMap::new())
}

fn print_expr_flagged(
    e: &ResourceExpr,
    flags: &BTreeMap<ResourceSymbol, DecouplingFlag>,
) -> String {
    let mut pieces: Vec<(bool, String)> = Vec::new();
    for (s, c) in &e.terms {
        pieces.push(print_term(s, c, flags.get(s).copied()));
    }
    for s in &e.o_terms {
        pieces.push((false, format!("o{}", print_symbol(s))));
    }
    for s in &e.inf_terms {
        pieces.push((false, format!("inf{}", print_symbol(s))));
    }
    if pieces.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (neg, text)) in pieces.iter().enumerate() {
        if i == 0 {
            if *neg {
                out.push_str("- ");
            }
        } else {
            out.push_str(if *neg { " - " } else { " + " });
        }
        out.push_str(text);
    }
    out
}

pub fn print_ri(ri: &ResourceInequality) -> String {
    let lflags: BTreeMap<ResourceSymbol, DecouplingFlag> = ri
        .flags
        .iter()
        .filter(|((side, _), _)| *side == Side::Lhs)
        .map(|((_, s), f)| (s.clone(), *f))
        .collect();
    let rflags: BTreeMap<ResourceSymbol, DecouplingFlag> = ri
        .flags
        .iter()
        .filter(|((side, _), _)| *side == Side::Rhs)
        .map(|((_, s), f)| (s.clone(), *f))
        .collect();
    let rel = match ri.relation {
        Relation::Geq => ">=",
        Relation::Eq => "=",
        Relation::GeqS => ">=s",
    };
    format!(
        "{} {} {}",
        print_expr_flagged(&ri.lhs, &lflags),
        rel,
        print_expr_flagged(&ri.rhs, &rflags)
    )
}

// ----------------------------------------------------------------- parsing

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Plus,
    Minus,
    LParen,
    RParen,
    Rel(Relation),
    Rational(Rat),
    Atom(EntropicAtom),
    Symbol(ResourceSymbol),
    O,
    Inf,
    Flag(DecouplingFlag),
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn rest(&self) -> &str {
        std::str::from_utf8(&self.src[self.pos.min(self.src.len())..]).unwrap_or("")
    }

    fn starts_with(&self, s: &str) -> bool {
        self.rest().starts_with(s)
    }

    fn take_until(&mut self, end: char) -> Result<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos] as char != end {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Err(CalcError::Parse(
                String::from_utf8_lossy(&self.src[start..]).into(),
                format!("missing closing `{end}`"),
            ));
        }
        let text = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        self.pos += 1; // consume end
        Ok(text)
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos] as char;
            if c.is_alphanumeric() || c == '_' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn next(&mut self) -> Result<Tok> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(Tok::End);
        }
        let c = self.src[self.pos] as char;
        if self.starts_with(">=s") {
            self.pos += 3;
            return Ok(Tok::Rel(Relation::GeqS));
        }
        if self.starts_with(">=") {
            self.pos += 2;
            return Ok(Tok::Rel(Relation::Geq));
        }
        if self.starts_with("{coh}") {
            self.pos += 5;
            return Ok(Tok::Flag(DecouplingFlag::Coherent));
        }
        if self.starts_with("{inc}") {
            self.pos += 5;
            return Ok(Tok::Flag(DecouplingFlag::Incoherent));
        }
        match c {
            '=' => {
                self.pos += 1;
                Ok(Tok::Rel(Relation::Eq))
            }
            '+' => {
                self.pos += 1;
                Ok(Tok::Plus)
            }
            '-' => {
                self.pos += 1;
                Ok(Tok::Minus)
            }
            '(' => {
                self.pos += 1;
                Ok(Tok::LParen)
            }
            ')' => {
                self.pos += 1;
                Ok(Tok::RParen)
            }
            '[' => {
                self.pos += 1;
                let inner = self.take_until(']')?;
                let cleaned: String = inner.chars().filter(|c| !c.is_whitespace()).collect();
                let sym = match cleaned.as_str() {
                    "c->c" => ResourceSymbol::Cbit,
                    "q->q" => ResourceSymbol::Qubit,
                    "qq" => ResourceSymbol::Ebit,
                    "cc" => ResourceSymbol::Rbit,
                    "q->qq" => ResourceSymbol::Cobit,
                    "c->c:tau" => ResourceSymbol::CbitTau,
                    "q->q:tau" => ResourceSymbol::QubitTau,
                    "q->qq:tau" => ResourceSymbol::CobitTau,
                    other => {
                        return Err(CalcError::Parse(
                            format!("[{other}]"),
                            "unknown unit resource".into(),
                        ))
                    }
                };
                Ok(Tok::Symbol(sym))
            }
            '<' => {
                self.pos += 1;
                let inner = self.take_until('>')?;
                let inner = inner.trim();
                let sym = if let Some(rest) = inner.strip_prefix("ch ") {
                    match rest.split_once(':') {
                        Some((n, t)) => {
                            ResourceSymbol::chan_rel(n.trim(), t.trim())
                        }
                        None => ResourceSymbol::chan(rest.trim()),
                    }
                } else if let Some(rest) = inner.strip_prefix("src ") {
                    match rest.split_once(':') {
                        Some((n, t)) => ResourceSymbol::protected(n.trim(), t.trim()),
                        None => {
                            return Err(CalcError::Parse(
                                inner.into(),
                                "protected resource needs `: source`".into(),
                            ))
                        }
                    }
                } else {
                    ResourceSymbol::stat(inner)
                };
                Ok(Tok::Symbol(sym))
            }
            '0'..='9' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos] as char).is_ascii_digit() {
                    self.pos += 1;
                }
                let numer: BigInt = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|e| CalcError::Parse(self.rest().into(), format!("{e}")))?;
                let denom = if self.pos < self.src.len() && self.src[self.pos] as char == '/' {
                    self.pos += 1;
                    let d0 = self.pos;
                    while self.pos < self.src.len()
                        && (self.src[self.pos] as char).is_ascii_digit()
                    {
                        self.pos += 1;
                    }
                    std::str::from_utf8(&self.src[d0..self.pos])
                        .unwrap()
                        .parse()
                        .map_err(|e| CalcError::Parse(self.rest().into(), format!("{e}")))?
                } else {
                    BigInt::one()
                };
                Ok(Tok::Rational(Rat::new(numer, denom)))
            }
            _ => {
                // identifiers: o, inf, H(, I(, Icoh(
                let save = self.pos;
                let id = self.ident();
                match id.as_str() {
                    "o" => Ok(Tok::O),
                    "inf" => Ok(Tok::Inf),
                    "H" | "I" | "Icoh" => {
                        if self.pos < self.src.len() && self.src[self.pos] as char == '(' {
                            self.pos += 1;
                            let inner = self.take_until(')')?;
                            // expect @tag
                            self.skip_ws();
                            if self.pos >= self.src.len() || self.src[self.pos] as char != '@' {
                                return Err(CalcError::Parse(
                                    inner,
                                    "entropic atom needs @tag".into(),
                                ));
                            }
                            self.pos += 1;
                            let tag = self.ident();
                            if tag.is_empty() {
                                return Err(CalcError::Parse(inner, "empty tag after @".into()));
                            }
                            Ok(Tok::Atom(parse_atom_body(&id, &inner, &tag)?))
                        } else {
                            Err(CalcError::Parse(id, "expected `(` after atom head".into()))
                        }
                    }
                    "" => Err(CalcError::Parse(
                        self.rest().chars().take(12).collect(),
                        "unexpected character".into(),
                    )),
                    other => {
                        self.pos = save;
                        Err(CalcError::Parse(other.into(), "unknown token".into()))
                    }
                }
            }
        }
    }
}

fn parse_group(s: &str) -> Result<Group> {
    let parts: Vec<String> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(|p| p.to_string())
        .collect();
    if parts.is_empty() {
        return Err(CalcError::Parse(s.into(), "empty label group".into()));
    }
    Ok(parts)
}

fn parse_atom_body(head: &str, inner: &str, tag: &str) -> Result<EntropicAtom> {
    match head {
        "H" => {
            if let Some((g1, g2)) = inner.split_once('|') {
                EntropicAtom::new(
                    AtomKind::Hcond,
                    vec![parse_group(g1)?, parse_group(g2)?],
                    tag,
                )
            } else {
                EntropicAtom::new(AtomKind::H, vec![parse_group(inner)?], tag)
            }
        }
        "Icoh" => {
            let (g1, g2) = inner.split_once('>').ok_or_else(|| {
                CalcError::Parse(inner.into(), "Icoh needs `G1>G2`".into())
            })?;
            EntropicAtom::new(
                AtomKind::Icoh,
                vec![parse_group(g1)?, parse_group(g2)?],
                tag,
            )
        }
        "I" => {
            let (front, cond) = match inner.split_once('|') {
                Some((f, c)) => (f, Some(c)),
                None => (inner, None),
            };
            let (g1, g2) = front.split_once(';').ok_or_else(|| {
                CalcError::Parse(inner.into(), "I needs `G1;G2`".into())
            })?;
            match cond {
                Some(c) => EntropicAtom::new(
                    AtomKind::Icmi,
                    vec![parse_group(g1)?, parse_group(g2)?, parse_group(c)?],
                    tag,
                ),
                None => EntropicAtom::new(
                    AtomKind::Imutual,
                    vec![parse_group(g1)?, parse_group(g2)?],
                    tag,
                ),
            }
        }
        _ => unreachable!(),
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Tok>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { lexer: Lexer::new(src), peeked: None }
    }

    fn peek(&mut self) -> Result<&Tok> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next()?);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    fn bump(&mut self) -> Result<Tok> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next(),
        }
    }

    /// One coefficient addend: rational, atom, or rational·atom.
    fn parse_addend(&mut self) -> Result<Coefficient> {
        let mut rational: Option<Rat> = None;
        if let Tok::Rational(_) = self.peek()? {
            if let Tok::Rational(r) = self.bump()? {
                rational = Some(r);
            }
        }
        if let Tok::Atom(_) = self.peek()? {
            if let Tok::Atom(a) = self.bump()? {
                let w = rational.unwrap_or_else(Rat::one);
                return Ok(Coefficient::atom_scaled(a, w));
            }
        }
        match rational {
            Some(r) => Ok(Coefficient::from_rat(r)),
            None => Err(CalcError::Parse(
                format!("{:?}", self.peek()?),
                "expected a coefficient".into(),
            )),
        }
    }

    /// A term: [o|inf] [coefficient] symbol [flag].
    fn parse_term(
        &mut self,
        negate: bool,
    ) -> Result<(ResourceExpr, Option<(ResourceSymbol, DecouplingFlag)>)> {
        match self.peek()? {
            Tok::O => {
                self.bump()?;
                if negate {
                    return Err(CalcError::Parse("-o".into(), "o-terms cannot be negated".into()));
                }
                let sym = self.expect_symbol()?;
                return Ok((ResourceExpr::o(sym), None));
            }
            Tok::Inf => {
                self.bump()?;
                if negate {
                    return Err(CalcError::Parse(
                        "-inf".into(),
                        "inf-terms cannot be negated".into(),
                    ));
                }
                let sym = self.expect_symbol()?;
                return Ok((ResourceExpr::inf(sym), None));
            }
            _ => {}
        }
        let coeff = match self.peek()? {
            Tok::LParen => {
                self.bump()?;
                let mut total = Coefficient::zero();
                let mut neg = false;
                if matches!(self.peek()?, Tok::Minus) {
                    self.bump()?;
                    neg = true;
                }
                loop {
                    let a = self.parse_addend()?;
                    total = if neg { total.sub(&a) } else { total.add(&a) };
                    match self.bump()? {
                        Tok::Plus => neg = false,
                        Tok::Minus => neg = true,
                        Tok::RParen => break,
                        other => {
                            return Err(CalcError::Parse(
                                format!("{other:?}"),
                                "expected +, - or ) in coefficient".into(),
                            ))
                        }
                    }
                }
                total
            }
            Tok::Rational(_) | Tok::Atom(_) => self.parse_addend()?,
            Tok::Symbol(_) => Coefficient::one(),
            other => {
                return Err(CalcError::Parse(
                    format!("{other:?}"),
                    "expected a term".into(),
                ))
            }
        };
        let sym = self.expect_symbol()?;
        let flag = if let Tok::Flag(_) = self.peek()? {
            if let Tok::Flag(f) = self.bump()? {
                Some((sym.clone(), f))
            } else {
                None
            }
        } else {
            None
        };
        let coeff = if negate { coeff.neg() } else { coeff };
        Ok((ResourceExpr::term(sym, coeff), flag))
    }

    fn expect_symbol(&mut self) -> Result<ResourceSymbol> {
        match self.bump()? {
            Tok::Symbol(s) => Ok(s),
            other => Err(CalcError::Parse(
                format!("{other:?}"),
                "expected a resource symbol".into(),
            )),
        }
    }

    fn parse_expr(
        &mut self,
    ) -> Result<(ResourceExpr, Vec<(ResourceSymbol, DecouplingFlag)>)> {
        let mut flags = Vec::new();
        let mut total = ResourceExpr::empty();
        let mut neg = if matches!(self.peek()?, Tok::Minus) {
            self.bump()?;
            true
        } else {
            false
        };
        loop {
            // a literal `0` contributes nothing (either the empty expression
            // or a zero-coefficient term)
            let zero_literal = matches!(self.peek()?, Tok::Rational(r) if r.is_zero());
            if zero_literal {
                self.bump()?;
                match self.peek()? {
                    Tok::End | Tok::Rel(_) | Tok::Plus | Tok::Minus => {}
                    _ => {
                        if matches!(self.peek()?, Tok::Atom(_)) {
                            self.bump()?;
                        }
                        let _sym = self.expect_symbol()?;
                        if matches!(self.peek()?, Tok::Flag(_)) {
                            self.bump()?;
                        }
                    }
                }
            } else {
                let (t, f) = self.parse_term(neg)?;
                total = total.add(&t);
                if let Some(f) = f {
                    flags.push(f);
                }
            }
            match self.peek()? {
                Tok::Plus => {
                    self.bump()?;
                    neg = false;
                }
                Tok::Minus => {
                    self.bump()?;
                    neg = true;
                }
                _ => break,
            }
        }
        Ok((total, flags))
    }
}

pub fn parse_expr(src: &str) -> Result<ResourceExpr> {
    let mut p = Parser::new(src);
    let (e, flags) = p.parse_expr()?;
    if !flags.is_empty() {
        return Err(CalcError::Parse(
            src.into(),
            "decoupling flags belong to inequalities, not bare expressions".into(),
        ));
    }
    match p.bump()? {
        Tok::End => Ok(e),
        other => Err(CalcError::Parse(
            format!("{other:?}"),
            "trailing input after expression".into(),
        )),
    }
}

pub fn parse_ri(src: &str) -> Result<ResourceInequality> {
    let mut p = Parser::new(src);
    let (lhs, lflags) = p.parse_expr()?;
    let rel = match p.bump()? {
        Tok::Rel(r) => r,
        other => {
            return Err(CalcError::Parse(
                format!("{other:?}"),
                "expected >=, = or >=s".into(),
            ))
        }
    };
    let (rhs, rflags) = p.parse_expr()?;
    match p.bump()? {
        Tok::End => {}
        other => {
            return Err(CalcError::Parse(
                format!("{other:?}"),
                "trailing input after inequality".into(),
            ))
        }
    }
    let mut ri = ResourceInequality::new(lhs, rel, rhs)?;
    for (s, f) in lflags {
        ri = ri.with_flag(Side::Lhs, s, f)?;
    }
    for (s, f) in rflags {
        ri = ri.with_flag(Side::Rhs, s, f)?;
    }
    Ok(ri)
}

pub fn parse_rat(src: &str) -> Result<Rat> {
    let src = src.trim();
    let (neg, body) = match src.strip_prefix('-') {
        Some(b) => (true, b.trim()),
        None => (false, src),
    };
    let (n, d) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (body, "1"),
    };
    let numer: BigInt = n
        .parse()
        .map_err(|e| CalcError::Parse(src.into(), format!("{e}")))?;
    let denom: BigInt = d
        .parse()
        .map_err(|e| CalcError::Parse(src.into(), format!("{e}")))?;
    if denom.is_zero() {
        return Err(CalcError::Parse(src.into(), "zero denominator".into()));
    }
    let r = Rat::new(numer, denom);
    Ok(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    #[test]
    fn round_trip_spec_example() {
        let src = "2[c->c] + 1/2 I(A;E)@psi [qq] + o[cc] >= [q->q]";
        let ri = parse_ri(src).unwrap();
        let printed = print_ri(&ri);
        let back = parse_ri(&printed).unwrap();
        assert_eq!(ri, back);
        assert_eq!(printed, src);
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse_ri("2[c->c]+1/2I(A;E)@psi[qq]+o[cc]>=[q->q]").unwrap();
        let b = parse_ri("2 [c->c] + 1/2 I(A;E)@psi [qq] + o [cc] >= [q->q]").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn named_symbols_round_trip() {
        for src in [
            "<rho> + I(A;E)@psi [c->c] >= Icoh(A>B)@psi [qq]",
            "<ch N : rho> + H(R)@sigma [qq] >= I(R;B)@sigma [c->c]",
            "<src merge : rho> >=s <src id_S_B : rho>",
            "2[q->qq] + [qq] >= [q->q] + 2[qq]",
            "[q->q:tau] = [q->q]",
            "H(X A|B)@s [c->c] + inf[qq] >= (1/2 I(A;B)@s - 1/2 I(A;E)@s + 3) [qq]",
        ] {
            let ri = parse_ri(src).unwrap();
            let printed = print_ri(&ri);
            let back = parse_ri(&printed).unwrap();
            assert_eq!(ri, back, "source: {src}");
        }
    }

    #[test]
    fn flags_round_trip() {
        let src = "<rho> + I(A;E)@psi [c->c]{coh} >= Icoh(A>B)@psi [qq]";
        let ri = parse_ri(src).unwrap();
        assert_eq!(ri.flags.len(), 1);
        let back = parse_ri(&print_ri(&ri)).unwrap();
        assert_eq!(ri, back);
    }

    #[test]
    fn negative_coefficients() {
        let e = parse_expr("[q->q] - 1/2 [qq]").unwrap();
        assert_eq!(e.coeff_of(&ResourceSymbol::Ebit).rational, rat(-1, 2));
        let printed = print_expr(&e);
        assert_eq!(parse_expr(&printed).unwrap(), e);
    }

    #[test]
    fn empty_expression() {
        let e = parse_expr("0").unwrap();
        assert!(e.is_empty());
        assert_eq!(print_expr(&e), "0");
    }
}

// ------------------------------------------------ standalone coefficients

pub fn print_coeff(c: &Coefficient) -> String {
    let parts = coeff_parts(c);
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (neg, text)) in parts.iter().enumerate() {
        if i == 0 {
            if *neg {
                out.push_str("- ");
            }
        } else {
            out.push_str(if *neg { " - " } else { " + " });
        }
        out.push_str(text);
    }
    out
}

pub fn parse_coeff(src: &str) -> Result<Coefficient> {
    let mut p = Parser::new(src);
    let mut total = Coefficient::zero();
    let mut neg = false;
    if matches!(p.peek()?, Tok::Minus) {
        p.bump()?;
        neg = true;
    }
    loop {
        let a = p.parse_addend()?;
        total = if neg { total.sub(&a) } else { total.add(&a) };
        match p.bump()? {
            Tok::Plus => neg = false,
            Tok::Minus => neg = true,
            Tok::End => break,
            other => {
                return Err(CalcError::Parse(
                    format!("{other:?}"),
                    "expected +, - or end in coefficient".into(),
                ))
            }
        }
    }
    Ok(total)
}

// ------------------------------------------- serde via the grammar strings

impl serde::Serialize for Coefficient {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&print_coeff(self))
    }
}

impl<'de> serde::Deserialize<'de> for Coefficient {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_coeff(&text).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for ResourceExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&print_expr(self))
    }
}

impl<'de> serde::Deserialize<'de> for ResourceExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_expr(&text).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for ResourceInequality {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&print_ri(self))
    }
}

impl<'de> serde::Deserialize<'de> for ResourceInequality {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_ri(&text).map_err(serde::de::Error::custom)
    }
}
