use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A supported finite reflection group together with its realization.
///
/// `A(n)` for `n ≥ 2` is the symmetric group `Sₙ` permuting the coordinates
/// of ℝⁿ (the reducible presentation with Newton power sums as invariants).
/// `A(1)` is the rank-one group `{±1}` acting on ℝ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoxeterType {
    A(usize),
    B(usize),
    D(usize),
    I2(u32),
    H3,
    H4,
    F4,
}

impl CoxeterType {
    /// Validates the rank against the supported ranges.
    pub fn checked(self) -> Result<Self> {
        let ok = match self {
            CoxeterType::A(n) => (1..=6).contains(&n),
            CoxeterType::B(n) => (2..=4).contains(&n),
            CoxeterType::D(n) => (3..=6).contains(&n),
            CoxeterType::I2(p) => (3..=12).contains(&p),
            CoxeterType::H3 | CoxeterType::H4 | CoxeterType::F4 => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::Capability(format!("unsupported Coxeter type {self}")))
        }
    }

    /// Dimension of the ambient space ℝⁿ.
    pub fn dim(&self) -> usize {
        match *self {
            CoxeterType::A(n) | CoxeterType::B(n) | CoxeterType::D(n) => n,
            CoxeterType::I2(_) => 2,
            CoxeterType::H3 => 3,
            CoxeterType::H4 | CoxeterType::F4 => 4,
        }
    }

    /// True for the symmetric-group realization with Newton power sums.
    pub fn is_newton(&self) -> bool {
        matches!(*self, CoxeterType::A(n) if n >= 2)
    }

    /// Degrees of the basic invariants, nondecreasing.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = match *self {
            CoxeterType::A(1) => vec![2],
            CoxeterType::A(n) => (1..=n as u32).collect(),
            CoxeterType::B(n) => (1..=n as u32).map(|i| 2 * i).collect(),
            CoxeterType::D(n) => (1..n as u32).map(|i| 2 * i).chain([n as u32]).collect(),
            CoxeterType::I2(p) => vec![2, p],
            CoxeterType::H3 => vec![2, 6, 10],
            CoxeterType::H4 => vec![2, 12, 20, 30],
            CoxeterType::F4 => vec![2, 6, 8, 12],
        };
        d.sort_unstable();
        d
    }

    /// Coxeter number `h`, the largest degree.
    pub fn coxeter_number(&self) -> u32 {
        *self.degrees().last().expect("nonempty degree list")
    }

    /// Number of reflections, `Σ(kᵢ − 1)`.
    pub fn reflection_count(&self) -> usize {
        self.degrees().iter().map(|&k| k as usize - 1).sum()
    }

    /// Group order, `∏kᵢ`.
    pub fn order(&self) -> u64 {
        self.degrees().iter().map(|&k| k as u64).product()
    }
}

/// Degrees of a type; see [`CoxeterType::degrees`].
pub fn degrees(t: CoxeterType) -> Vec<u32> {
    t.degrees()
}

/// Coxeter number of a type; see [`CoxeterType::coxeter_number`].
pub fn coxeter_number(t: CoxeterType) -> u32 {
    t.coxeter_number()
}

impl fmt::Display for CoxeterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CoxeterType::A(n) => write!(f, "A{n}"),
            CoxeterType::B(n) => write!(f, "B{n}"),
            CoxeterType::D(n) => write!(f, "D{n}"),
            CoxeterType::I2(6) => write!(f, "G2"),
            CoxeterType::I2(p) => write!(f, "I2:{p}"),
            CoxeterType::H3 => write!(f, "H3"),
            CoxeterType::H4 => write!(f, "H4"),
            CoxeterType::F4 => write!(f, "F4"),
        }
    }
}

impl FromStr for CoxeterType {
    type Err = Error;

    /// Accepts `"A3"`, `"B4"`, `"D6"`, `"I2:7"`, `"H3"`, `"H4"`, `"F4"` and
    /// the alias `"G2"` for `I2:6`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Capability(format!("unsupported Coxeter type {s:?}"));
        let t = match s {
            "H3" => CoxeterType::H3,
            "H4" => CoxeterType::H4,
            "F4" => CoxeterType::F4,
            "G2" => CoxeterType::I2(6),
            _ => {
                if let Some(p) = s.strip_prefix("I2:") {
                    CoxeterType::I2(p.parse().map_err(|_| bad())?)
                } else {
                    let (family, rank) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
                    let n: usize = rank.parse().map_err(|_| bad())?;
                    match family {
                        "A" => CoxeterType::A(n),
                        "B" => CoxeterType::B(n),
                        "D" => CoxeterType::D(n),
                        _ => return Err(bad()),
                    }
                }
            }
        };
        t.checked()
    }
}

impl Serialize for CoxeterType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CoxeterType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specifiers() {
        assert_eq!("A3".parse::<CoxeterType>().unwrap(), CoxeterType::A(3));
        assert_eq!("B4".parse::<CoxeterType>().unwrap(), CoxeterType::B(4));
        assert_eq!("D6".parse::<CoxeterType>().unwrap(), CoxeterType::D(6));
        assert_eq!("I2:7".parse::<CoxeterType>().unwrap(), CoxeterType::I2(7));
        assert_eq!("G2".parse::<CoxeterType>().unwrap(), CoxeterType::I2(6));
        assert_eq!("I2:6".parse::<CoxeterType>().unwrap().to_string(), "G2");
        for bad in ["E8", "A7", "D2", "I2:2", "I2:13", "B", "X3", ""] {
            assert!(
                matches!(bad.parse::<CoxeterType>(), Err(Error::Capability(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn degree_tables() {
        assert_eq!(CoxeterType::H3.degrees(), vec![2, 6, 10]);
        assert_eq!(CoxeterType::H3.coxeter_number(), 10);
        assert_eq!(CoxeterType::F4.degrees(), vec![2, 6, 8, 12]);
        assert_eq!(CoxeterType::F4.coxeter_number(), 12);
        assert_eq!(CoxeterType::B(2).degrees(), vec![2, 4]);
        assert_eq!(CoxeterType::B(2).coxeter_number(), 4);
        assert_eq!(CoxeterType::D(4).degrees(), vec![2, 4, 4, 6]);
        assert_eq!(CoxeterType::D(5).degrees(), vec![2, 4, 5, 6, 8]);
        assert_eq!(CoxeterType::A(4).degrees(), vec![1, 2, 3, 4]);
        assert_eq!(CoxeterType::H3.reflection_count(), 15);
        assert_eq!(CoxeterType::F4.reflection_count(), 24);
        assert_eq!(CoxeterType::H4.order(), 14400);
    }
}
