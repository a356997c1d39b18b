//! Recursive-descent parser for the set DSL.
//!
//! ```text
//! spec := "explicit(" ratlist ")" | "fs(" ratlist ")"
//!       | "shift(" rat "," spec ")" | "union(" spec "," spec ")"
//!       | "intersect(" spec "," spec ")" | "window(" spec "," rat ")"
//!       | "pattern(" int ",[" intlist "])" | "complement(" spec ")"
//! rat  := int "/" int | int
//! ```
//!
//! Whitespace between tokens is ignored.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::spec::SetSpec;
use crate::error::{Error, Result};
use crate::rat::Rat;

pub fn parse_setspec(text: &str) -> Result<SetSpec> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let spec = p.spec()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("end of input"));
    }
    Ok(spec)
}

pub fn print_setspec(spec: &SetSpec) -> String {
    spec.to_string()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

const KEYWORDS: &str = "explicit, fs, shift, union, intersect, window, pattern or complement";

impl Parser<'_> {
    fn error(&self, expected: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("'{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_lowercase() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(KEYWORDS));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn spec(&mut self) -> Result<SetSpec> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let kw = self.ident()?.to_string();
        self.expect(b'(')?;
        let spec = match kw.as_str() {
            "explicit" => SetSpec::Explicit(self.rat_list(false)?),
            "fs" => SetSpec::FiniteSums(self.rat_list(true)?),
            "shift" => {
                let a = self.rat()?;
                self.expect(b',')?;
                SetSpec::shift(a, self.spec()?)
            }
            "union" | "intersect" => {
                let a = self.spec()?;
                self.expect(b',')?;
                let b = self.spec()?;
                if kw == "union" {
                    SetSpec::union(a, b)
                } else {
                    SetSpec::intersect(a, b)
                }
            }
            "window" => {
                let x = self.spec()?;
                self.expect(b',')?;
                SetSpec::window(x, self.rat()?)
            }
            "pattern" => {
                let at = self.pos;
                let period = self.small_int()?;
                if period == 0 {
                    self.pos = at;
                    return Err(self.error("positive period"));
                }
                self.expect(b',')?;
                self.expect(b'[')?;
                let mut residues = Vec::new();
                if self.peek() != Some(b']') {
                    loop {
                        residues.push(self.small_int()?);
                        if self.peek() == Some(b',') {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                self.expect(b']')?;
                SetSpec::Pattern { period, residues }
            }
            "complement" => SetSpec::complement(self.spec()?),
            _ => {
                self.pos = start;
                return Err(self.error(KEYWORDS));
            }
        };
        self.expect(b')')?;
        Ok(spec)
    }

    fn rat_list(&mut self, nonempty: bool) -> Result<Vec<Rat>> {
        let mut out = Vec::new();
        if !nonempty && self.peek() == Some(b')') {
            return Ok(out);
        }
        loop {
            out.push(self.rat()?);
            if self.peek() == Some(b',') {
                self.pos += 1;
            } else {
                return Ok(out);
            }
        }
    }

    fn int(&mut self) -> Result<BigUint> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(digits.parse().expect("digits"))
    }

    fn small_int(&mut self) -> Result<u64> {
        let at = {
            self.skip_ws();
            self.pos
        };
        let v = self.int()?;
        v.to_u64().ok_or(Error::Syntax {
            offset: at,
            expected: "integer below 2^64".into(),
        })
    }

    fn rat(&mut self) -> Result<Rat> {
        let num = self.int()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let at = {
                self.skip_ws();
                self.pos
            };
            let den = self.int()?;
            if den.is_zero() {
                return Err(Error::Syntax {
                    offset: at,
                    expected: "nonzero denominator".into(),
                });
            }
            Ok(Rat::from_big(num, den))
        } else {
            Ok(Rat::from_big(num, BigUint::from(1u32)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: u64, d: u64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn parses_examples() {
        assert_eq!(
            parse_setspec("fs(1/2, 1/4)").unwrap(),
            SetSpec::FiniteSums(vec![r(1, 2), r(1, 4)])
        );
        assert_eq!(
            parse_setspec("union(pattern(2,[1]), shift(1/16, fs(1/8)))").unwrap(),
            SetSpec::union(
                SetSpec::Pattern { period: 2, residues: vec![1] },
                SetSpec::shift(r(1, 16), SetSpec::FiniteSums(vec![r(1, 8)]))
            )
        );
        assert_eq!(parse_setspec("explicit()").unwrap(), SetSpec::empty());
        assert_eq!(
            parse_setspec(" window ( complement(explicit(1)) , 1/2 ) ").unwrap(),
            SetSpec::window(SetSpec::complement(SetSpec::Explicit(vec![r(1, 1)])), r(1, 2))
        );
    }

    #[test]
    fn reports_offsets() {
        assert_eq!(
            parse_setspec("fs(1/2,"),
            Err(Error::Syntax { offset: 7, expected: "integer".into() })
        );
        assert!(matches!(parse_setspec("fs()"), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse_setspec("fog(1)"), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_setspec("fs(1/0)"), Err(Error::Syntax { offset: 5, .. })));
        assert!(matches!(parse_setspec("pattern(0,[1])"), Err(Error::Syntax { offset: 8, .. })));
        assert!(matches!(parse_setspec("fs(1) x"), Err(Error::Syntax { offset: 6, .. })));
    }

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (0u64..200, 1u64..200).prop_map(|(n, d)| Rat::new(n, d))
    }

    fn arb_spec() -> impl Strategy<Value = SetSpec> {
        let leaf = prop_oneof![
            proptest::collection::vec(arb_rat(), 0..4).prop_map(SetSpec::Explicit),
            proptest::collection::vec(arb_rat(), 1..4).prop_map(SetSpec::FiniteSums),
            (1u64..9, proptest::collection::vec(0u64..9, 0..4))
                .prop_map(|(period, residues)| SetSpec::Pattern { period, residues }),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (arb_rat(), inner.clone()).prop_map(|(a, x)| SetSpec::shift(a, x)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SetSpec::union(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SetSpec::intersect(a, b)),
                (inner.clone(), arb_rat()).prop_map(|(x, d)| SetSpec::window(x, d)),
                inner.prop_map(SetSpec::complement),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(spec in arb_spec()) {
            let text = print_setspec(&spec);
            prop_assert_eq!(parse_setspec(&text).unwrap(), spec);
        }
    }
}
