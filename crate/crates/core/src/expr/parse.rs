use thiserror::Error;

use super::{BinOp, Constant, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at position {pos}")]
    Lexical { pos: usize, ch: char },
    #[error("malformed number {text:?} at position {pos}")]
    BadNumber { pos: usize, text: String },
    #[error("expected {} at position {pos}, found {found}", .expected.join(" or "))]
    Unexpected {
        pos: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown identifier {name:?} at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("expression nested deeper than {MAX_DEPTH} levels at position {pos}")]
    TooDeep { pos: usize },
}

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Num(c) => format!("number {c}"),
            Token::Ident(s) => format!("identifier {s:?}"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::End => "end of input".into(),
        }
    }
}

/// Positions are character offsets into the source.
fn tokenize(source: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let simple = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            tokens.push((start, tok));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part only when followed by a digit (optionally signed)
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ParseError::BadNumber {
                    pos: start,
                    text: text.clone(),
                })?;
            tokens.push((start, Token::Num(value)));
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            tokens.push((start, Token::Ident(chars[start..i].iter().collect())));
        } else {
            return Err(ParseError::Lexical { pos: start, ch: c });
        }
    }
    tokens.push((chars.len(), Token::End));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
    depth: usize,
}

pub(super) fn parse(source: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(source)?,
        cursor: 0,
        depth: 0,
    };
    let expr = parser.sum()?;
    match parser.peek() {
        Token::End => Ok(expr),
        _ => Err(parser.unexpected(&["operator", "end of input"])),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.cursor].1
    }

    fn pos(&self) -> usize {
        self.tokens[self.cursor].0
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.cursor].1.clone();
        if tok != Token::End {
            self.cursor += 1;
        }
        tok
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Unexpected {
            pos: self.pos(),
            found: self.peek().describe(),
            expected: expected.to_vec(),
        }
    }

    fn expect(&mut self, tok: Token, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.product()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::TooDeep { pos: self.pos() });
        }
        let result = self.unary_inner();
        self.depth -= 1;
        result
    }

    fn unary_inner(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Token::Minus => {
                self.advance();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Token::Plus => {
                self.advance();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Token::Caret {
            self.advance();
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Token::Num(c) => {
                self.advance();
                Ok(Expr::Num(c))
            }
            Token::LParen => {
                self.advance();
                let inner = self.sum()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Token::Ident(name) => {
                self.advance();
                if let Some(var) = Var::from_name(&name) {
                    return Ok(Expr::Var(var));
                }
                match name.as_str() {
                    "pi" => return Ok(Expr::Const(Constant::Pi)),
                    "e" => return Ok(Expr::Const(Constant::E)),
                    _ => {}
                }
                let func =
                    Func::from_name(&name).ok_or(ParseError::UnknownIdentifier { pos, name })?;
                self.expect(Token::LParen, "'('")?;
                let arg = self.sum()?;
                self.expect(Token::RParen, "')'")?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(self.unexpected(&["number", "variable", "function", "'('"])),
        }
    }
}
