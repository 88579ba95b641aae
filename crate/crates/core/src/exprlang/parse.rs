//! Recursive-descent parser for the scalar expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)* ;
//! term   := factor (('*'|'/') factor)* ;
//! factor := ('-')? base ('^' signed-integer)? ;
//! base   := number | ident | '(' expr ')' | func '(' expr ')' ;
//! func   := 'sin' | 'cos' | 'exp' | 'sqrt' ;
//! ```

use super::{Chart, Expr, ExprError, Node};

const FUNCTIONS: [&str; 4] = ["sin", "cos", "exp", "sqrt"];

pub(crate) fn is_function_name(s: &str) -> bool {
    FUNCTIONS.contains(&s)
}

pub fn parse(text: &str, chart: &Chart) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        chart,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.syntax("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    chart: &'a Chart,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn syntax(&self, msg: &str) -> ExprError {
        ExprError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let first = self.term()?;
        let mut terms = vec![first];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                let t = self.term()?;
                terms.push(Expr::from_node(Node::Neg(t)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::from_node(Node::Add(terms))
        })
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.factor()?;
        // Factors joined by '*' since the last '/' collect into one Mul node.
        let mut run: Vec<Expr> = Vec::new();
        loop {
            if self.eat(b'*') {
                if run.is_empty() {
                    run.push(acc.clone());
                }
                run.push(self.factor()?);
                acc = Expr::from_node(Node::Mul(run.clone()));
            } else if self.eat(b'/') {
                let den = self.factor()?;
                if den.as_const() == Some(0.0) {
                    return Err(self.syntax("division by literal zero"));
                }
                acc = Expr::from_node(Node::Div(acc, den));
                run.clear();
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let negate = self.eat(b'-');
        let mut base = self.base()?;
        if self.eat(b'^') {
            let k = self.signed_integer()?;
            base = Expr::from_node(Node::IntPow(base, k));
        }
        Ok(if negate {
            Expr::from_node(Node::Neg(base))
        } else {
            base
        })
    }

    fn signed_integer(&mut self) -> Result<i32, ExprError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        // Anything number-like glued to the digits makes the exponent malformed.
        let mut end = self.pos;
        while matches!(self.src.get(end), Some(c) if c.is_ascii_alphanumeric() || *c == b'.') {
            end += 1;
        }
        let text = String::from_utf8_lossy(&self.src[start..end.max(self.pos)]).into_owned();
        if self.pos == digits_start || end != self.pos {
            return Err(ExprError::MalformedExponent { pos: start, text });
        }
        text.parse::<i32>()
            .map_err(|_| ExprError::MalformedExponent { pos: start, text })
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while matches!(p.peek(), Some(c) if c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let int_digits = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            if digits(self) == 0 || int_digits == 0 {
                return Err(ExprError::Syntax {
                    pos: start,
                    msg: "malformed number".into(),
                });
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'-') | Some(b'+')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
                return Err(ExprError::Syntax {
                    pos: start,
                    msg: "malformed number exponent".into(),
                });
            }
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == b'_') {
            return Err(self.syntax("identifier glued to number"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| ExprError::Syntax {
            pos: start,
            msg: "malformed number".into(),
        })?;
        if !value.is_finite() {
            return Err(ExprError::Syntax {
                pos: start,
                msg: "number out of range".into(),
            });
        }
        Ok(Expr::constant(value))
    }

    fn ident(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if is_function_name(name) {
            if !self.eat(b'(') {
                return Err(ExprError::Syntax {
                    pos: self.pos,
                    msg: format!("expected '(' after function '{name}'"),
                });
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.syntax("expected ')'"));
            }
            let node = match name {
                "sin" => Node::Sin(arg),
                "cos" => Node::Cos(arg),
                "exp" => Node::Exp(arg),
                _ => Node::Sqrt(arg),
            };
            return Ok(Expr::from_node(node));
        }
        match self.chart.index_of(name) {
            Some(i) => Ok(Expr::coord(i)),
            None => Err(ExprError::UnknownIdentifier {
                name: name.to_string(),
                pos: start,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walker() -> Chart {
        Chart::new(&["u", "x1", "x2", "x3", "v"]).unwrap()
    }

    #[test]
    fn sum_of_squares_structure() {
        let e = parse("x1^2 + x2^2 + x3^2", &walker()).unwrap();
        let sq = |i| Expr::from_node(Node::IntPow(Expr::coord(i), 2));
        assert_eq!(e, Expr::from_node(Node::Add(vec![sq(1), sq(2), sq(3)])));
    }

    #[test]
    fn exp_over_constant_structure() {
        let e = parse("exp(2*x1)/4", &walker()).unwrap();
        let inner = Expr::from_node(Node::Mul(vec![Expr::constant(2.0), Expr::coord(1)]));
        let expected = Expr::from_node(Node::Div(
            Expr::from_node(Node::Exp(inner)),
            Expr::constant(4.0),
        ));
        assert_eq!(e, expected);
    }

    #[test]
    fn unknown_identifier() {
        let err = parse("1/6 * f^2", &walker()).unwrap_err();
        assert!(matches!(err, ExprError::UnknownIdentifier { ref name, pos: 6 } if name == "f"));
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = parse("-x1^2", &walker()).unwrap();
        assert_eq!(
            e,
            Expr::from_node(Node::Neg(Expr::from_node(Node::IntPow(Expr::coord(1), 2))))
        );
        let e = parse("x1^-2", &walker()).unwrap();
        assert_eq!(e, Expr::from_node(Node::IntPow(Expr::coord(1), -2)));
    }

    #[test]
    fn left_associative_division() {
        let c = walker();
        let e = parse("u/x1/x2", &c).unwrap();
        assert_eq!(
            e,
            Expr::from_node(Node::Div(
                Expr::from_node(Node::Div(Expr::coord(0), Expr::coord(1))),
                Expr::coord(2)
            ))
        );
        let e = parse("u*x1/x2*x3", &c).unwrap();
        let mul = Expr::from_node(Node::Mul(vec![Expr::coord(0), Expr::coord(1)]));
        let div = Expr::from_node(Node::Div(mul, Expr::coord(2)));
        assert_eq!(e, Expr::from_node(Node::Mul(vec![div, Expr::coord(3)])));
    }

    #[test]
    fn numbers_with_fraction_and_exponent() {
        let c = walker();
        assert_eq!(parse("1.25e-2", &c).unwrap().as_const(), Some(0.0125));
        assert_eq!(parse(" 3 ", &c).unwrap().as_const(), Some(3.0));
    }

    #[test]
    fn malformed_inputs() {
        let c = walker();
        for bad in [
            "", "x1 +", "(x1", "x1)", "sin x1", "2^0.5", "x1^", "x1^^2", "x1^2^3", "1..2",
            "1e", "3x1", "x1 x2", "*x1", "sqrt()", "u/0", "@", "x1^a",
        ] {
            assert!(parse(bad, &c).is_err(), "accepted {bad:?}");
        }
        assert!(matches!(
            parse("x1^1.5", &c),
            Err(ExprError::MalformedExponent { .. })
        ));
    }
}
