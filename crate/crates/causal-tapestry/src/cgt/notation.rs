//! `{a,b|c}` notation. Names are used only where the game is literally the
//! named form, so parsing a printed game gives back the same game.

use super::{CgtError, Game, GameStore};

pub(super) fn format(s: &GameStore, g: Game) -> String {
    if let Some(n) = s.as_integer(g) {
        return n.to_string();
    }
    let (l, r) = (s.left(g), s.right(g));
    if let ([a], [b]) = (l, r) {
        if s.as_integer(*a) == Some(0) && s.as_integer(*b) == Some(0) {
            return "*".into();
        }
        if let (Some(x), Some(y)) = (s.as_integer(*a), s.as_integer(*b)) {
            if x > 0 && y == -x {
                return format!("±{x}");
            }
        }
    }
    let side = |opts: &[Game]| opts.iter().map(|&o| format(s, o)).collect::<Vec<_>>().join(",");
    format!("{{{}|{}}}", side(l), side(r))
}

pub(super) fn parse(s: &mut GameStore, text: &str) -> Result<Game, CgtError> {
    let mut p = Parser { text, pos: 0 };
    let g = p.game(s)?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input"));
    }
    Ok(g)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> CgtError {
        CgtError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<i64, CgtError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.text[start..self.pos].parse().map_err(|_| self.error("expected digits"))
    }

    fn game(&mut self, s: &mut GameStore) -> Result<Game, CgtError> {
        self.skip_ws();
        match self.peek() {
            Some('{') => {
                self.pos += 1;
                let left = self.options(s, '|')?;
                let right = self.options(s, '}')?;
                Ok(s.make(left, right))
            }
            Some('*') => {
                self.pos += 1;
                Ok(s.star())
            }
            Some('±') => {
                self.pos += '±'.len_utf8();
                let n = self.digits()?;
                let (a, b) = (s.integer(n), s.integer(-n));
                Ok(s.make(vec![a], vec![b]))
            }
            Some('-') | Some('+') => {
                let negative = self.peek() == Some('-');
                self.pos += 1;
                let n = self.digits()?;
                Ok(s.integer(if negative { -n } else { n }))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.digits()?;
                Ok(s.integer(n))
            }
            _ => Err(self.error("expected a game")),
        }
    }

    /// Comma-separated games up to and including `close`.
    fn options(&mut self, s: &mut GameStore, close: char) -> Result<Vec<Game>, CgtError> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.game(s)?);
            if self.eat(close) {
                return Ok(out);
            }
            if !self.eat(',') {
                return Err(self.error(&format!("expected ',' or '{close}'")));
            }
        }
    }
}
