//! Recursive-descent parser.
//!
//! ```text
//! program  ::= par EOF
//! par      ::= choice ("&" choice)*
//! choice   ::= seq (oplus seq)*
//! oplus    ::= "⊕" ["[" prob "]"] | "+" "[" prob "]" | "oplus" ["[" prob "]"]
//! seq      ::= unary (";" unary)*
//! unary    ::= ("~" | "¬") unary | postfix
//! postfix  ::= atom ("*" | "^" "(" nat ")")*
//! atom     ::= "drop" | "false" | "skip" | "true" | "dup"
//!            | field "=" nat | field ":=" nat | "(" par ")"
//!            | "if" par "then" par "else" par | "while" par "do" par
//! ```
//!
//! All binary operators are left-associative. A bare `⊕` or `oplus` means
//! probability 1/2.

use super::ast::Program;
use super::lexer::{describe, lex, Spanned, Tok};
use crate::error::SyntaxError;
use crate::prob::{parse_rational, ratio, Rational};

const KEYWORDS: &[&str] = &[
    "drop", "false", "skip", "true", "dup", "if", "then", "else", "while", "do", "oplus",
];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub(crate) fn parse_program(text: &str) -> Result<Program, SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let prog = p.par()?;
    if p.peek() != &Tok::Eof {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(prog)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, at: &Spanned, message: String) -> SyntaxError {
        SyntaxError {
            line: at.line,
            column: at.column,
            message,
        }
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        let t = self.here();
        self.error_at(t, format!("expected {expected}, found {}", describe(&t.tok)))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&describe(&tok)))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn par(&mut self) -> Result<Program, SyntaxError> {
        let mut left = self.choice()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.choice()?;
            left = Program::par(left, right);
        }
        Ok(left)
    }

    fn choice(&mut self) -> Result<Program, SyntaxError> {
        let mut left = self.seq()?;
        while let Some(r) = self.oplus()? {
            let right = self.seq()?;
            left = Program::choice(r, left, right);
        }
        Ok(left)
    }

    /// Consumes a choice operator if one is next and returns its probability.
    fn oplus(&mut self) -> Result<Option<Rational>, SyntaxError> {
        match self.peek() {
            Tok::Oplus => {
                self.bump();
                self.optional_prob().map(Some)
            }
            Tok::Ident(s) if s == "oplus" => {
                self.bump();
                self.optional_prob().map(Some)
            }
            Tok::Plus => {
                self.bump();
                if *self.peek() != Tok::LBracket {
                    return Err(self.unexpected("`[` and a probability after `+`"));
                }
                self.optional_prob().map(Some)
            }
            _ => Ok(None),
        }
    }

    fn optional_prob(&mut self) -> Result<Rational, SyntaxError> {
        if *self.peek() != Tok::LBracket {
            return Ok(ratio(1, 2));
        }
        self.bump();
        let at = self.here().clone();
        let text = match &at.tok {
            Tok::Number(s) => s.clone(),
            _ => return Err(self.unexpected("a probability")),
        };
        self.bump();
        let r = parse_rational(&text).map_err(|e| self.error_at(&at, e.to_string()))?;
        if r > ratio(1, 1) {
            return Err(self.error_at(&at, format!("probability {text} outside [0, 1]")));
        }
        self.expect(Tok::RBracket)?;
        Ok(r)
    }

    fn seq(&mut self) -> Result<Program, SyntaxError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            let right = self.unary()?;
            left = Program::seq(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Program, SyntaxError> {
        if *self.peek() == Tok::Tilde {
            self.bump();
            return Ok(Program::neg(self.unary()?));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Program, SyntaxError> {
        let mut p = self.atom()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    p = Program::star(p);
                }
                Tok::Caret => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let n = self.nat()?;
                    let n = u32::try_from(n).map_err(|_| {
                        let t = &self.toks[self.pos - 1];
                        self.error_at(t, format!("iteration bound {n} too large"))
                    })?;
                    self.expect(Tok::RParen)?;
                    p = Program::bounded_star(n, p);
                }
                _ => return Ok(p),
            }
        }
    }

    fn nat(&mut self) -> Result<u64, SyntaxError> {
        let at = self.here().clone();
        match &at.tok {
            Tok::Number(s) if s.bytes().all(|b| b.is_ascii_digit()) => {
                self.bump();
                s.parse::<u64>()
                    .map_err(|_| self.error_at(&at, format!("number `{s}` too large")))
            }
            _ => Err(self.unexpected("a natural number")),
        }
    }

    fn atom(&mut self) -> Result<Program, SyntaxError> {
        let at = self.here().clone();
        match &at.tok {
            Tok::LParen => {
                self.bump();
                let p = self.par()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(word) => {
                let word = word.clone();
                match word.as_str() {
                    "drop" | "false" => {
                        self.bump();
                        Ok(Program::Drop)
                    }
                    "skip" | "true" => {
                        self.bump();
                        Ok(Program::Skip)
                    }
                    "dup" => {
                        self.bump();
                        Ok(Program::Dup)
                    }
                    "if" => {
                        self.bump();
                        let cond = self.par()?;
                        self.expect_keyword("then")?;
                        let then = self.par()?;
                        self.expect_keyword("else")?;
                        let otherwise = self.par()?;
                        Ok(Program::ite(cond, then, otherwise))
                    }
                    "while" => {
                        self.bump();
                        let cond = self.par()?;
                        self.expect_keyword("do")?;
                        let body = self.par()?;
                        Ok(Program::while_do(cond, body))
                    }
                    w if is_keyword(w) => Err(self.unexpected("a program")),
                    _ => {
                        self.bump();
                        match self.peek() {
                            Tok::Eq => {
                                self.bump();
                                Ok(Program::Test(word, self.nat()?))
                            }
                            Tok::Assign => {
                                self.bump();
                                Ok(Program::Mod(word, self.nat()?))
                            }
                            _ => Err(self.unexpected(&format!("`=` or `:=` after field `{word}`"))),
                        }
                    }
                }
            }
            _ => Err(self.unexpected("a program")),
        }
    }
}
