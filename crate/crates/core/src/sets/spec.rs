use std::fmt;

use crate::rat::Rat;

/// Symbolic description of a subset of `S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SetSpec {
    Explicit(Vec<Rat>),
    /// All nonempty finite sums of the listed terms.
    FiniteSums(Vec<Rat>),
    /// `{a + x : x in X}`.
    Shift(Rat, Box<SetSpec>),
    Union(Box<SetSpec>, Box<SetSpec>),
    Intersect(Box<SetSpec>, Box<SetSpec>),
    /// `X ∩ (0, delta)`.
    Window(Box<SetSpec>, Rat),
    /// `{k/N : k mod period in residues}`, relative to the grid modulus `N`.
    Pattern { period: u64, residues: Vec<u64> },
    /// Complement within the grid.
    Complement(Box<SetSpec>),
}

impl SetSpec {
    pub fn empty() -> SetSpec {
        SetSpec::Explicit(Vec::new())
    }

    /// The whole grid, as `pattern(1,[0])`.
    pub fn everything() -> SetSpec {
        SetSpec::Pattern {
            period: 1,
            residues: vec![0],
        }
    }

    pub fn shift(a: Rat, x: SetSpec) -> SetSpec {
        SetSpec::Shift(a, Box::new(x))
    }

    pub fn union(a: SetSpec, b: SetSpec) -> SetSpec {
        SetSpec::Union(Box::new(a), Box::new(b))
    }

    pub fn intersect(a: SetSpec, b: SetSpec) -> SetSpec {
        SetSpec::Intersect(Box::new(a), Box::new(b))
    }

    pub fn window(x: SetSpec, delta: Rat) -> SetSpec {
        SetSpec::Window(Box::new(x), delta)
    }

    pub fn complement(x: SetSpec) -> SetSpec {
        SetSpec::Complement(Box::new(x))
    }

    /// Left-nested union of all parts; the empty set for no parts.
    pub fn union_all(parts: impl IntoIterator<Item = SetSpec>) -> SetSpec {
        parts
            .into_iter()
            .reduce(SetSpec::union)
            .unwrap_or_else(SetSpec::empty)
    }
}

fn write_rats(f: &mut fmt::Formatter<'_>, rs: &[Rat]) -> fmt::Result {
    for (i, r) in rs.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{r}")?;
    }
    Ok(())
}

/// Prints the canonical DSL form accepted by [`super::parse_setspec`].
impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSpec::Explicit(rs) => {
                f.write_str("explicit(")?;
                write_rats(f, rs)?;
                f.write_str(")")
            }
            SetSpec::FiniteSums(rs) => {
                f.write_str("fs(")?;
                write_rats(f, rs)?;
                f.write_str(")")
            }
            SetSpec::Shift(a, x) => write!(f, "shift({a}, {x})"),
            SetSpec::Union(a, b) => write!(f, "union({a}, {b})"),
            SetSpec::Intersect(a, b) => write!(f, "intersect({a}, {b})"),
            SetSpec::Window(x, d) => write!(f, "window({x}, {d})"),
            SetSpec::Pattern { period, residues } => {
                write!(f, "pattern({period},[")?;
                for (i, r) in residues.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{r}")?;
                }
                f.write_str("])")
            }
            SetSpec::Complement(x) => write!(f, "complement({x})"),
        }
    }
}
