//! Recursive-descent parser for the matrix DSL.
//!
//! ```text
//! file        := matrix-block+
//! matrix-block:= "matrix" IDENT "{" decl* "log_entry:" expr "}"
//! decl        := "seq" IDENT "class" class ["values" PATH] [";"]
//! class       := "bounded" | "log" | "superlog" | "poly(" RATIONAL ")" | "superpoly"
//! expr        := term (("+"|"-") term)*
//! term        := factor ("*" factor)*
//! factor      := ["-"] (RATIONAL | "q" ["^" INT] | "(" expr ")" | basisref)
//! basisref    := "log(j)" | "j" ["^" RATIONAL] | "seq(" IDENT ")"
//! ```
//!
//! A term without a basis reference multiplies the constant basis function
//! `1`. Products of two non-constant basis references are rejected.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::basis::{GrowthBasisFunction, GrowthClass};
use super::poly::{CoefficientPoly, Rational};
use super::spec::KoetheMatrixSpec;
use super::DslError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rational),
    Str(String),
    Sym(char),
    Eof,
}

#[derive(Clone)]
struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { src: text.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = *self.src.get(self.pos)?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else if c & 0xC0 != 0x80 {
            self.col += 1;
        }
        Some(c)
    }

    fn peek_byte(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_byte() {
            if c.is_ascii_whitespace() {
                self.bump();
            } else if c == b'#' {
                while self.peek_byte().is_some_and(|c| c != b'\n') {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn err(&self, msg: impl Into<String>) -> DslError {
        DslError::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }

    /// Position of the next token.
    fn here(&mut self) -> (usize, usize) {
        self.skip_ws();
        (self.line, self.col)
    }

    fn next(&mut self) -> Result<Tok, DslError> {
        self.skip_ws();
        let Some(c) = self.peek_byte() else {
            return Ok(Tok::Eof);
        };
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.peek_byte().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
                self.bump();
            }
            return Ok(Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()));
        }
        if c.is_ascii_digit() {
            return self.number().map(Tok::Num);
        }
        if c == b'"' {
            self.bump();
            let start = self.pos;
            while self.peek_byte().is_some_and(|c| c != b'"' && c != b'\n') {
                self.bump();
            }
            if self.peek_byte() != Some(b'"') {
                return Err(self.err("unterminated string"));
            }
            let s = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
            self.bump();
            return Ok(Tok::Str(s));
        }
        if b"{}()+-*^/:;".contains(&c) {
            self.bump();
            return Ok(Tok::Sym(c as char));
        }
        Err(self.err(format!("unexpected character '{}'", c as char)))
    }

    /// Unsigned integer or decimal literal, read exactly.
    fn number(&mut self) -> Result<Rational, DslError> {
        let mut int: i128 = 0;
        let mut den: i128 = 1;
        let mut seen_dot = false;
        while let Some(c) = self.peek_byte() {
            if c.is_ascii_digit() {
                int = int
                    .checked_mul(10)
                    .and_then(|v| v.checked_add((c - b'0') as i128))
                    .ok_or_else(|| self.err("numeric literal too large"))?;
                if seen_dot {
                    den = den.checked_mul(10).ok_or_else(|| self.err("numeric literal too long"))?;
                }
                self.bump();
            } else if c == b'.' && !seen_dot {
                seen_dot = true;
                self.bump();
            } else {
                break;
            }
        }
        Ok(Rational::new(int, den))
    }

    fn peek(&self) -> Result<Tok, DslError> {
        self.clone().next()
    }

    /// Bare path: everything up to whitespace, `;` or `}`.
    fn raw_word(&mut self) -> Result<String, DslError> {
        self.skip_ws();
        if self.peek_byte() == Some(b'"') {
            return match self.next()? {
                Tok::Str(s) => Ok(s),
                _ => unreachable!(),
            };
        }
        let start = self.pos;
        while self.peek_byte().is_some_and(|c| !c.is_ascii_whitespace() && c != b';' && c != b'}') {
            self.bump();
        }
        if start == self.pos {
            return Err(self.err("expected a path"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum BasisKey {
    One,
    LogJ,
    Power(Rational),
    Seq(String),
}

/// Linear combination of basis references with polynomial coefficients.
type Lin = BTreeMap<BasisKey, CoefficientPoly>;

fn lin_const(p: CoefficientPoly) -> Lin {
    let mut m = Lin::new();
    m.insert(BasisKey::One, p);
    m
}

fn lin_add(mut a: Lin, b: Lin, negate: bool) -> Lin {
    for (k, v) in b {
        let v = if negate { -&v } else { v };
        let e = a.entry(k).or_default();
        *e = &*e + &v;
    }
    a
}

struct Parser<'a> {
    lex: Lexer<'a>,
    seqs: BTreeMap<String, GrowthBasisFunction>,
}

impl<'a> Parser<'a> {
    fn expect_sym(&mut self, c: char) -> Result<(), DslError> {
        let (line, col) = self.lex.here();
        match self.lex.next()? {
            Tok::Sym(s) if s == c => Ok(()),
            t => Err(DslError::Syntax { line, col, msg: format!("expected '{c}', found {}", describe(&t)) }),
        }
    }

    fn expect_ident(&mut self) -> Result<String, DslError> {
        let (line, col) = self.lex.here();
        match self.lex.next()? {
            Tok::Ident(s) => Ok(s),
            t => Err(DslError::Syntax { line, col, msg: format!("expected identifier, found {}", describe(&t)) }),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), DslError> {
        let (line, col) = self.lex.here();
        match self.lex.next()? {
            Tok::Ident(s) if s == kw => Ok(()),
            t => Err(DslError::Syntax { line, col, msg: format!("expected '{kw}', found {}", describe(&t)) }),
        }
    }

    fn eat_sym(&mut self, c: char) -> Result<bool, DslError> {
        if self.lex.peek()? == Tok::Sym(c) {
            self.lex.next()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// `INT ["/" INT]` or decimal, optionally parenthesized.
    fn rational(&mut self) -> Result<Rational, DslError> {
        if self.eat_sym('(')? {
            let r = self.rational()?;
            self.expect_sym(')')?;
            return Ok(r);
        }
        let neg = self.eat_sym('-')?;
        let (line, col) = self.lex.here();
        let n = match self.lex.next()? {
            Tok::Num(n) => n,
            t => return Err(DslError::Syntax { line, col, msg: format!("expected number, found {}", describe(&t)) }),
        };
        let n = if self.lex.peek()? == Tok::Sym('/') {
            self.lex.next()?;
            let (line, col) = self.lex.here();
            match self.lex.next()? {
                Tok::Num(d) if !d.is_zero() => n / d,
                t => return Err(DslError::Syntax { line, col, msg: format!("bad denominator {}", describe(&t)) }),
            }
        } else {
            n
        };
        Ok(if neg { -n } else { n })
    }

    fn file(&mut self) -> Result<Vec<KoetheMatrixSpec>, DslError> {
        let mut out = Vec::new();
        while self.lex.peek()? != Tok::Eof {
            out.push(self.block()?);
        }
        if out.is_empty() {
            return Err(DslError::EmptyInput);
        }
        Ok(out)
    }

    fn block(&mut self) -> Result<KoetheMatrixSpec, DslError> {
        self.seqs.clear();
        self.expect_keyword("matrix")?;
        let name = self.expect_ident()?;
        self.expect_sym('{')?;
        loop {
            let (line, col) = self.lex.here();
            match self.lex.next()? {
                Tok::Ident(k) if k == "seq" => self.decl()?,
                Tok::Ident(k) if k == "log_entry" => break,
                t => {
                    return Err(DslError::Syntax {
                        line,
                        col,
                        msg: format!("expected 'seq' or 'log_entry', found {}", describe(&t)),
                    })
                }
            }
        }
        self.expect_sym(':')?;
        let lin = self.expr()?;
        self.eat_sym(';')?;
        self.expect_sym('}')?;

        let mut entries: Vec<(GrowthBasisFunction, CoefficientPoly)> =
            self.seqs.values().map(|f| (f.clone(), CoefficientPoly::zero())).collect();
        for (k, c) in lin {
            let f = match k {
                BasisKey::One => GrowthBasisFunction::one(),
                BasisKey::LogJ => GrowthBasisFunction::log_j(),
                BasisKey::Power(t) => GrowthBasisFunction::power(t)?,
                BasisKey::Seq(n) => self.seqs[&n].clone(),
            };
            entries.push((f, c));
        }
        KoetheMatrixSpec::new(name, entries)
    }

    fn decl(&mut self) -> Result<(), DslError> {
        let name = self.expect_ident()?;
        if self.seqs.contains_key(&name) {
            return Err(DslError::DuplicateBasis(format!("seq({name})")));
        }
        self.expect_keyword("class")?;
        let (cl, cc) = self.lex.here();
        let class = match self.lex.next()? {
            Tok::Ident(c) => match c.as_str() {
                "bounded" => GrowthClass::Bounded,
                "log" => GrowthClass::Logarithmic,
                "superlog" => GrowthClass::SuperlogSubpoly,
                "superpoly" => GrowthClass::Superpolynomial,
                "poly" => {
                    self.expect_sym('(')?;
                    let t = self.rational()?;
                    self.expect_sym(')')?;
                    GrowthClass::Polynomial(t)
                }
                other => return Err(DslError::UnknownClass { line: cl, col: cc, name: other.to_string() }),
            },
            t => return Err(DslError::UnknownClass { line: cl, col: cc, name: describe(&t) }),
        };
        let mut f = GrowthBasisFunction::named(name.clone(), class)?;
        if self.lex.peek()? == Tok::Ident("values".into()) {
            self.lex.next()?;
            f = f.with_values_path(self.lex.raw_word()?);
        }
        self.eat_sym(';')?;
        self.seqs.insert(name, f);
        Ok(())
    }

    fn expr(&mut self) -> Result<Lin, DslError> {
        let mut acc = self.term()?;
        loop {
            match self.lex.peek()? {
                Tok::Sym('+') => {
                    self.lex.next()?;
                    acc = lin_add(acc, self.term()?, false);
                }
                Tok::Sym('-') => {
                    self.lex.next()?;
                    acc = lin_add(acc, self.term()?, true);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Lin, DslError> {
        let mut acc = self.factor()?;
        while self.eat_sym('*')? {
            let (line, col) = self.lex.here();
            let rhs = self.factor()?;
            acc = lin_mul(acc, rhs).ok_or(DslError::Syntax {
                line,
                col,
                msg: "product of two non-constant basis functions".into(),
            })?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Lin, DslError> {
        let (line, col) = self.lex.here();
        match self.lex.next()? {
            Tok::Sym('-') => Ok(lin_add(Lin::new(), self.factor()?, true)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Num(n) => {
                let v = if self.lex.peek()? == Tok::Sym('/') {
                    self.lex.next()?;
                    let (l2, c2) = self.lex.here();
                    match self.lex.next()? {
                        Tok::Num(d) if !d.is_zero() => n / d,
                        t => {
                            return Err(DslError::Syntax {
                                line: l2,
                                col: c2,
                                msg: format!("bad denominator {}", describe(&t)),
                            })
                        }
                    }
                } else {
                    n
                };
                Ok(lin_const(CoefficientPoly::constant(v)))
            }
            Tok::Ident(id) => match id.as_str() {
                "q" => {
                    let mut deg = 1usize;
                    if self.eat_sym('^')? {
                        let (l2, c2) = self.lex.here();
                        match self.lex.next()? {
                            Tok::Num(n) if n.is_integer() && *n.numer() <= 32 => deg = *n.numer() as usize,
                            t => {
                                return Err(DslError::Syntax {
                                    line: l2,
                                    col: c2,
                                    msg: format!("expected small integer power of q, found {}", describe(&t)),
                                })
                            }
                        }
                    }
                    Ok(lin_const(CoefficientPoly::monomial(deg)))
                }
                "log" => {
                    self.expect_sym('(')?;
                    self.expect_keyword("j")?;
                    self.expect_sym(')')?;
                    Ok(single(BasisKey::LogJ))
                }
                "j" => {
                    let theta = if self.eat_sym('^')? { self.rational()? } else { Rational::one() };
                    if theta <= Rational::zero() {
                        return Err(DslError::NonPositiveExponent(super::poly::fmt_rational(&theta)));
                    }
                    Ok(single(BasisKey::Power(theta)))
                }
                "seq" => {
                    self.expect_sym('(')?;
                    let (l2, c2) = self.lex.here();
                    let name = self.expect_ident()?;
                    self.expect_sym(')')?;
                    if !self.seqs.contains_key(&name) {
                        return Err(DslError::UndeclaredSequence { line: l2, col: c2, name });
                    }
                    Ok(single(BasisKey::Seq(name)))
                }
                other => Err(DslError::Syntax { line, col, msg: format!("unknown symbol '{other}'") }),
            },
            t => Err(DslError::Syntax { line, col, msg: format!("unexpected {}", describe(&t)) }),
        }
    }
}

fn single(k: BasisKey) -> Lin {
    let mut m = Lin::new();
    m.insert(k, CoefficientPoly::constant(Rational::one()));
    m
}

fn lin_mul(a: Lin, b: Lin) -> Option<Lin> {
    let non_const = |l: &Lin| l.iter().any(|(k, c)| *k != BasisKey::One && !c.is_zero());
    let (scalar, other) = match (non_const(&a), non_const(&b)) {
        (true, true) => return None,
        (false, _) => (a, b),
        (true, false) => (b, a),
    };
    let s = scalar.get(&BasisKey::One).cloned().unwrap_or_default();
    Some(other.into_iter().map(|(k, c)| (k, &c * &s)).collect())
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Num(n) => format!("number {n}"),
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses every matrix block in `text`.
pub fn parse_file(text: &str) -> Result<Vec<KoetheMatrixSpec>, DslError> {
    Parser { lex: Lexer::new(text), seqs: BTreeMap::new() }.file()
}

/// Parses a source containing exactly one matrix block.
pub fn parse_spec(text: &str) -> Result<KoetheMatrixSpec, DslError> {
    let mut v = parse_file(text)?;
    if v.len() != 1 {
        return Err(DslError::BlockCount(v.len()));
    }
    Ok(v.remove(0))
}
