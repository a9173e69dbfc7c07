use super::function::Function;
use super::tree::ExprTree;
use crate::error::{Error, Result};

/// Parses the prefix text form produced by `ExprTree`'s `Display` impl.
pub fn parse_prefix(text: &str) -> Result<ExprTree> {
    let mut p = Parser { src: text, pos: 0 };
    let tree = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input"));
    }
    Ok(tree)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn atom(&mut self) -> &str {
        let rest = &self.src[self.pos..];
        let end = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn expr(&mut self) -> Result<ExprTree> {
        self.skip_ws();
        if self.src[self.pos..].starts_with('(') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let name = self.atom().to_string();
            let f = Function::from_name(&name).ok_or_else(|| Error::Parse {
                offset: start,
                message: format!("unknown function `{name}`"),
            })?;
            let mut children = Vec::with_capacity(f.arity());
            loop {
                self.skip_ws();
                match self.src[self.pos..].chars().next() {
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(_) => children.push(self.expr()?),
                    None => return Err(self.error("unclosed parenthesis")),
                }
            }
            if children.len() != f.arity() {
                return Err(Error::Parse {
                    offset: start,
                    message: format!("{f} expects {} argument(s), got {}", f.arity(), children.len()),
                });
            }
            return Ok(ExprTree::Func(f, children));
        }
        let start = self.pos;
        let tok = self.atom();
        if tok.is_empty() {
            return Err(self.error("expected an expression"));
        }
        if let Some(idx) = tok.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
            if idx == 0 {
                return Err(Error::Parse {
                    offset: start,
                    message: "variables are numbered from x1".into(),
                });
            }
            return Ok(ExprTree::Var(idx - 1));
        }
        tok.parse::<f64>().map(ExprTree::Const).map_err(|_| Error::Parse {
            offset: start,
            message: format!("unrecognised token `{tok}`"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_example() {
        let t = parse_prefix("(plus (sin x1) (times 3.0 x1))").unwrap();
        assert_eq!(t.to_string(), "(plus (sin x1) (times 3.0 x1))");
        assert_eq!(t.node_count(), 6);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_prefix("(plus x1)").is_err());
        assert!(parse_prefix("(frobnicate x1)").is_err());
        assert!(parse_prefix("(plus x1 x2").is_err());
        assert!(parse_prefix("x0").is_err());
        assert!(parse_prefix("x1 x2").is_err());
    }

    proptest! {
        #[test]
        fn constants_round_trip_exactly(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let t = ExprTree::binary(Function::Plus, ExprTree::Var(2), ExprTree::Const(v));
            let back = parse_prefix(&t.to_string()).unwrap();
            prop_assert_eq!(back.canonical_key(), t.canonical_key());
        }
    }
}
