//! Parser for the line-oriented presentation format.
//!
//! ```text
//! gens: x y s t a
//! rels: x^2, y^2, s^3, [x,y], s^t=s^-1, x^s=y
//! ```
//!
//! Grammar for relation expressions (see README for the full format):
//!
//! ```text
//! relation := word [ '=' word ]
//! word     := factor { ['*'] factor }
//! factor   := atom { '^' exponent }
//! atom     := name | '1' | '(' word ')' | '[' word ',' word ']'
//! exponent := ['-'] digits | name | '(' word ')'
//! ```
//!
//! `u^v` with a word exponent means conjugation `v^-1 u v`, `[u,v]` means
//! `u^-1 v^-1 u v`, and `u=v` contributes the relator `u v^-1`. Generator
//! names are matched longest-first, so `xy` denotes `x*y` when `x` and `y`
//! are generators and `xy` is not.

use super::{Presentation, Word};
use thiserror::Error;

/// A syntax or validation error, with 1-based line and column.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError { line, col, message: message.into() }
    }
}

/// Parses the full presentation format.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut gens: Option<(Vec<String>, usize)> = None;
    let mut rel_chunks: Vec<(String, usize, usize)> = Vec::new(); // text, line, col offset
    let mut in_rels = false;

    // Treat ';' as a line separator so one-line inputs work too.
    let mut lineno = 0;
    for raw_line in text.lines() {
        lineno += 1;
        let mut col_base = 0usize;
        for piece in raw_line.split(';') {
            let piece_no_comment = match piece.find('#') {
                Some(i) => &piece[..i],
                None => piece,
            };
            let trimmed = piece_no_comment.trim_start();
            let lead = piece_no_comment.len() - trimmed.len();
            let trimmed = trimmed.trim_end();
            let col0 = col_base + lead + 1;
            if !trimmed.is_empty() {
                if let Some(rest) = trimmed.strip_prefix("gens:") {
                    if gens.is_some() {
                        return Err(ParseError::new(lineno, col0, "duplicate `gens:` section"));
                    }
                    let names: Vec<String> =
                        rest.split_whitespace().map(|s| s.to_string()).collect();
                    gens = Some((names, lineno));
                    in_rels = false;
                } else if let Some(rest) = trimmed.strip_prefix("rels:") {
                    if gens.is_none() {
                        return Err(ParseError::new(lineno, col0, "`rels:` before `gens:`"));
                    }
                    in_rels = true;
                    rel_chunks.push((rest.to_string(), lineno, col0 + 5));
                } else if in_rels {
                    rel_chunks.push((trimmed.to_string(), lineno, col0));
                } else {
                    return Err(ParseError::new(
                        lineno,
                        col0,
                        "expected `gens:` or `rels:` section",
                    ));
                }
            }
            col_base += piece.len() + 1;
        }
    }

    let (names, gline) = gens.ok_or_else(|| ParseError::new(1, 1, "missing `gens:` section"))?;
    if names.is_empty() {
        return Err(ParseError::new(gline, 1, "empty generator list"));
    }
    for n in &names {
        if !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            || !n.chars().next().unwrap().is_ascii_alphabetic()
        {
            return Err(ParseError::new(gline, 1, format!("invalid generator name `{n}`")));
        }
    }

    let mut relators = Vec::new();
    for (chunk, line, col) in rel_chunks {
        // Split on commas, but not inside `[u,v]` or parentheses.
        let mut start = 0usize;
        let mut depth = 0i32;
        let chars: Vec<char> = chunk.chars().collect();
        for i in 0..=chars.len() {
            let boundary = i == chars.len() || (chars[i] == ',' && depth == 0);
            if i < chars.len() {
                match chars[i] {
                    '[' | '(' => depth += 1,
                    ']' | ')' => depth -= 1,
                    _ => {}
                }
            }
            if boundary {
                let part: String = chars[start..i].iter().collect();
                let trimmed = part.trim();
                if !trimmed.is_empty() {
                    let lead = part.len() - part.trim_start().len();
                    let mut p = WordParser::new(trimmed, &names, line, col + start + lead);
                    relators.push(p.parse_relation()?);
                }
                start = i + 1;
            }
        }
    }

    Presentation::new(names, relators).map_err(|m| ParseError::new(gline, 1, m))
}

/// Parses a single relation expression in the context of `pres`.
pub fn parse_word_in(pres: &Presentation, text: &str) -> Result<Word, ParseError> {
    let names: Vec<String> = pres.generators().to_vec();
    let mut p = WordParser::new(text.trim(), &names, 1, 1);
    p.parse_relation()
}

struct WordParser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [String],
    line: usize,
    col0: usize,
}

impl<'a> WordParser<'a> {
    fn new(text: &str, names: &'a [String], line: usize, col0: usize) -> WordParser<'a> {
        WordParser { chars: text.chars().collect(), pos: 0, names, line, col0 }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col0 + self.pos, message)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_space(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_space();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn parse_relation(&mut self) -> Result<Word, ParseError> {
        let lhs = self.parse_word()?;
        self.skip_space();
        let rel = if self.eat('=') {
            let rhs = self.parse_word()?;
            lhs.concat(&rhs.inverse())
        } else {
            lhs
        };
        self.skip_space();
        if self.pos < self.chars.len() {
            return Err(self.err("trailing input after relation"));
        }
        Ok(rel)
    }

    fn parse_word(&mut self) -> Result<Word, ParseError> {
        let mut out = self.parse_factor()?;
        loop {
            self.skip_space();
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let f = self.parse_factor()?;
                    out = out.concat(&f);
                }
                Some(c) if c.is_ascii_alphabetic() || c == '(' || c == '[' || c == '1' => {
                    let f = self.parse_factor()?;
                    out = out.concat(&f);
                }
                _ => break,
            }
        }
        Ok(out)
    }

    fn parse_factor(&mut self) -> Result<Word, ParseError> {
        let mut base = self.parse_atom()?;
        loop {
            self.skip_space();
            if self.peek() == Some('^') {
                self.pos += 1;
                base = self.parse_exponent(base)?;
            } else {
                break;
            }
        }
        Ok(base)
    }

    fn parse_exponent(&mut self, base: Word) -> Result<Word, ParseError> {
        self.skip_space();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '-' => {
                let neg = self.eat('-');
                self.skip_space();
                let mut digits = String::new();
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    digits.push(self.peek().unwrap());
                    self.pos += 1;
                }
                if digits.is_empty() {
                    return Err(self.err("expected integer exponent"));
                }
                let mut e: i32 = digits
                    .parse()
                    .map_err(|_| self.err("exponent out of range"))?;
                if neg {
                    e = -e;
                }
                Ok(base.pow(e))
            }
            Some('(') => {
                let by = self.parse_atom()?;
                Ok(base.conjugated_by(&by))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let by = self.parse_name()?;
                Ok(base.conjugated_by(&by))
            }
            _ => Err(self.err("expected exponent (integer, generator, or parenthesized word)")),
        }
    }

    fn parse_atom(&mut self) -> Result<Word, ParseError> {
        self.skip_space();
        match self.peek() {
            Some('1') => {
                self.pos += 1;
                Ok(Word::empty())
            }
            Some('(') => {
                self.pos += 1;
                let w = self.parse_word()?;
                self.expect(')')?;
                Ok(w)
            }
            Some('[') => {
                self.pos += 1;
                let u = self.parse_word()?;
                self.expect(',')?;
                let v = self.parse_word()?;
                self.expect(']')?;
                Ok(Word::commutator(&u, &v))
            }
            Some(c) if c.is_ascii_alphabetic() => self.parse_name(),
            Some(c) => Err(self.err(format!("unexpected character `{c}`"))),
            None => Err(self.err("unexpected end of relation")),
        }
    }

    /// Longest-match lookup of a declared generator name.
    fn parse_name(&mut self) -> Result<Word, ParseError> {
        let rest: String = self.chars[self.pos..].iter().collect();
        let mut best: Option<usize> = None;
        for (i, n) in self.names.iter().enumerate() {
            if rest.starts_with(n.as_str())
                && best.is_none_or(|b: usize| self.names[b].len() < n.len())
            {
                best = Some(i);
            }
        }
        match best {
            Some(i) => {
                self.pos += self.names[i].len();
                Ok(Word::gen(i))
            }
            None => {
                let run: String = rest
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
                    .collect();
                Err(self.err(format!("undeclared generator `{run}`")))
            }
        }
    }
}
