//! Text format for succinct expression systems.
//!
//! ```text
//! ses
//! alphabet: a b
//! start: X
//! X = [ Y , Z ]^eta
//! Y = Z Z
//! Z = 'a' 'b' ^omega     # postfix powers bind to the preceding atom
//! ```
//!
//! rhs is a concatenation of atoms; an atom is a quoted symbol, a variable
//! name, a parenthesized rhs, an atom with `^omega`/`^omegabar` postfix, or
//! `[ rhs , ... , rhs ]^eta`.

use super::{Expr, Ses, VarId};
use crate::automata::Alphabet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Quoted(String),
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Omega,
    OmegaBar,
    Eta,
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    let err = |msg: String| Error::Parse(format!("line {line_no}: {msg}"));
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '\'' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '\'' {
                    j += 1;
                }
                if j == chars.len() {
                    return Err(err("unterminated quoted symbol".into()));
                }
                if j == start {
                    return Err(err("empty quoted symbol".into()));
                }
                toks.push(Tok::Quoted(chars[start..j].iter().collect()));
                i = j + 1;
            }
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            '[' => {
                toks.push(Tok::LBracket);
                i += 1;
            }
            ']' => {
                toks.push(Tok::RBracket);
                i += 1;
            }
            ',' => {
                toks.push(Tok::Comma);
                i += 1;
            }
            '^' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i + 1..j].iter().collect();
                toks.push(match word.as_str() {
                    "omega" => Tok::Omega,
                    "omegabar" => Tok::OmegaBar,
                    "eta" => Tok::Eta,
                    other => return Err(err(format!("unknown power `^{other}`"))),
                });
                i = j;
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                toks.push(Tok::Ident(chars[i..j].iter().collect()));
                i = j;
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    line_no: usize,
    alphabet: &'a Alphabet,
    var_of: &'a dyn Fn(&str) -> Option<VarId>,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse(format!("line {}: {}", self.line_no, msg.into()))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    /// rhs: one or more postfixed atoms.
    fn rhs(&mut self) -> Result<Expr> {
        let mut parts = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Quoted(_) | Tok::Ident(_) | Tok::LParen | Tok::LBracket) => {
                    parts.push(self.postfixed_atom()?);
                }
                _ => break,
            }
        }
        if parts.is_empty() {
            return Err(self.err("empty right-hand side"));
        }
        Ok(Expr::concat(parts))
    }

    fn postfixed_atom(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        loop {
            match self.peek() {
                Some(Tok::Omega) => {
                    self.bump();
                    e = Expr::omega(e);
                }
                Some(Tok::OmegaBar) => {
                    self.bump();
                    e = Expr::omega_bar(e);
                }
                _ => return Ok(e),
            }
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Tok::Quoted(sym)) => {
                let id = self
                    .alphabet
                    .id_of(&sym)
                    .ok_or_else(|| self.err(format!("unknown symbol '{sym}'")))?;
                Ok(Expr::Symbol(id))
            }
            Some(Tok::Ident(name)) => {
                let v = (self.var_of)(&name).ok_or_else(|| self.err(format!("unknown variable `{name}`")))?;
                Ok(Expr::Var(v))
            }
            Some(Tok::LParen) => {
                let e = self.rhs()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(self.err("expected `)`")),
                }
            }
            Some(Tok::LBracket) => {
                let mut args = vec![self.rhs()?];
                loop {
                    match self.bump() {
                        Some(Tok::Comma) => args.push(self.rhs()?),
                        Some(Tok::RBracket) => break,
                        _ => return Err(self.err("expected `,` or `]`")),
                    }
                }
                match self.bump() {
                    Some(Tok::Eta) => Ok(Expr::shuffle(args)),
                    _ => Err(self.err("expected `^eta` after `]`")),
                }
            }
            other => Err(self.err(format!("expected an atom, got {other:?}"))),
        }
    }
}

pub fn parse_ses(text: &str) -> Result<Ses> {
    let mut lines: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if !line.is_empty() {
            lines.push((i + 1, line.to_string()));
        }
    }
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, l)) if l == "ses" => {}
        _ => return Err(Error::Parse("an SES file starts with a `ses` line".into())),
    }
    let mut alphabet: Option<Alphabet> = None;
    let mut start_name: Option<String> = None;
    let mut defs: Vec<(usize, String, String)> = Vec::new();
    for (no, line) in it {
        if let Some(rest) = line.strip_prefix("alphabet:") {
            if alphabet.replace(Alphabet::new(rest.split_whitespace())?).is_some() {
                return Err(Error::Parse(format!("line {no}: duplicate `alphabet`")));
            }
        } else if let Some(rest) = line.strip_prefix("start:") {
            if start_name.replace(rest.trim().to_string()).is_some() {
                return Err(Error::Parse(format!("line {no}: duplicate `start`")));
            }
        } else if let Some((name, body)) = line.split_once('=') {
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::Parse(format!("line {no}: bad variable name `{name}`")));
            }
            defs.push((no, name.to_string(), body.trim().to_string()));
        } else {
            return Err(Error::Parse(format!("line {no}: expected a definition `NAME = rhs`")));
        }
    }
    let alphabet = alphabet.ok_or_else(|| Error::Parse("missing `alphabet`".into()))?;
    let mut var_names: Vec<String> = Vec::new();
    for (no, name, _) in &defs {
        if var_names.iter().any(|n| n == name) {
            return Err(Error::Parse(format!("line {no}: variable `{name}` defined twice")));
        }
        var_names.push(name.clone());
    }
    let names_ref = var_names.clone();
    let var_of = move |n: &str| names_ref.iter().position(|m| m == n);
    let mut rhs = Vec::with_capacity(defs.len());
    for (no, _, body) in &defs {
        let toks = tokenize(body, *no)?;
        let mut p = Parser { toks: &toks, pos: 0, line_no: *no, alphabet: &alphabet, var_of: &var_of };
        let e = p.rhs()?;
        if p.pos != toks.len() {
            return Err(Error::Parse(format!("line {no}: trailing tokens after expression")));
        }
        rhs.push(e);
    }
    let start = match start_name {
        None => None,
        Some(n) => Some(
            var_names
                .iter()
                .position(|m| *m == n)
                .ok_or_else(|| Error::Parse(format!("unknown start variable `{n}`")))?,
        ),
    };
    Ses::new(var_names, alphabet, rhs, start)
}

fn write_expr(e: &Expr, s: &Ses, out: &mut String) {
    let atom = |e: &Expr, s: &Ses, out: &mut String| {
        if matches!(e, Expr::Symbol(_) | Expr::Var(_) | Expr::Shuffle(_) | Expr::Omega(_) | Expr::OmegaBar(_)) {
            write_expr(e, s, out);
        } else {
            out.push('(');
            write_expr(e, s, out);
            out.push(')');
        }
    };
    match e {
        Expr::Symbol(id) => {
            out.push('\'');
            out.push_str(s.alphabet.symbol(*id));
            out.push('\'');
        }
        Expr::Var(v) => out.push_str(&s.var_names[*v]),
        Expr::Concat(parts) => {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                if matches!(p, Expr::Concat(_)) {
                    out.push('(');
                    write_expr(p, s, out);
                    out.push(')');
                } else {
                    atom(p, s, out);
                }
            }
        }
        Expr::Omega(c) => {
            atom(c, s, out);
            out.push_str("^omega");
        }
        Expr::OmegaBar(c) => {
            atom(c, s, out);
            out.push_str("^omegabar");
        }
        Expr::Shuffle(parts) => {
            out.push_str("[ ");
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" , ");
                }
                write_expr(p, s, out);
            }
            out.push_str(" ]^eta");
        }
    }
}

pub fn write_ses(s: &Ses) -> String {
    let mut out = String::from("ses\n");
    out.push_str(&format!("alphabet: {}\n", s.alphabet));
    if let Some(v) = s.start {
        out.push_str(&format!("start: {}\n", s.var_names[v]));
    }
    for (v, e) in s.rhs.iter().enumerate() {
        out.push_str(&s.var_names[v]);
        out.push_str(" = ");
        write_expr(e, s, &mut out);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_spec_example() {
        let text = "ses\nalphabet: a b\nstart: X\nX = [ Y , Z ]^eta\nY = Z Z\nZ = 'a' 'b' ^omega\n";
        let s = parse_ses(text).unwrap();
        assert_eq!(s.var_count(), 3);
        assert_eq!(s.start, Some(0));
        // Z = 'a' 'b'^omega: the power binds to 'b' only
        assert_eq!(
            s.rhs[2],
            Expr::Concat(vec![Expr::Symbol(0), Expr::Omega(Box::new(Expr::Symbol(1)))])
        );
    }

    #[test]
    fn roundtrip() {
        let text = "ses\nalphabet: a b\nstart: X\nX = [ Y , Z ]^eta\nY = Z Z\nZ = ('a' 'b')^omegabar\n";
        let s = parse_ses(text).unwrap();
        let w = write_ses(&s);
        let s2 = parse_ses(&w).unwrap();
        assert_eq!(s.rhs, s2.rhs);
        assert_eq!(s.var_names, s2.var_names);
    }

    #[test]
    fn parse_rejects_unknowns() {
        assert!(parse_ses("ses\nalphabet: a\nX = 'b'\n").is_err());
        assert!(parse_ses("ses\nalphabet: a\nX = Y\n").is_err());
        assert!(parse_ses("ses\nalphabet: a\nX = 'a' )\n").is_err());
    }

    #[test]
    fn parse_rejects_cycles() {
        assert!(parse_ses("ses\nalphabet: a\nX = Y\nY = X\n").is_err());
    }
}
