//! Party bipartitions `M|M̄` and their factor-level index sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::SubsystemLayout;

/// A cut `M|M̄` of parties `1..=n`, stored canonically with `1 ∈ M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    m: Vec<usize>,
    n: usize,
}

impl Bipartition {
    /// Any nonempty proper subset; the complement is taken if it lacks party 1.
    pub fn new(parties: &[usize], n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidBipartition(format!(
                "need at least 2 parties, got {n}"
            )));
        }
        let mut m: Vec<usize> = parties.to_vec();
        m.sort_unstable();
        m.dedup();
        if m.is_empty() || m.len() >= n {
            return Err(Error::InvalidBipartition(format!(
                "{parties:?} is not a nonempty proper subset of 1..={n}"
            )));
        }
        if m.iter().any(|&p| p == 0 || p > n) {
            return Err(Error::InvalidBipartition(format!(
                "party label outside 1..={n} in {parties:?}"
            )));
        }
        if m[0] != 1 {
            m = (1..=n).filter(|p| !m.contains(p)).collect();
        }
        Ok(Self { m, n })
    }

    pub fn parties(&self) -> &[usize] {
        &self.m
    }

    pub fn complement(&self) -> Vec<usize> {
        (1..=self.n).filter(|p| !self.m.contains(p)).collect()
    }

    pub fn party_count(&self) -> usize {
        self.n
    }

    pub fn contains(&self, party: usize) -> bool {
        self.m.contains(&party)
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|p| p.to_string()).collect::<String>();
        write!(f, "{}|{}", join(&self.m), join(&self.complement()))
    }
}

impl FromStr for Bipartition {
    type Err = Error;

    /// Parses `"1|23"`; parties are single digits, so `n ≤ 9`.
    fn from_str(s: &str) -> Result<Self> {
        let (l, r) = s
            .split_once('|')
            .ok_or_else(|| Error::InvalidBipartition(format!("expected 'M|M̄', got {s:?}")))?;
        let digits = |t: &str| -> Result<Vec<usize>> {
            t.trim()
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .filter(|&d| d > 0)
                        .map(|d| d as usize)
                        .ok_or_else(|| {
                            Error::InvalidBipartition(format!("bad party {c:?} in {s:?}"))
                        })
                })
                .collect()
        };
        let left = digits(l)?;
        let right = digits(r)?;
        let n = left.len() + right.len();
        let mut all: Vec<usize> = left.iter().chain(&right).copied().collect();
        all.sort_unstable();
        if all != (1..=n).collect::<Vec<_>>() {
            return Err(Error::InvalidBipartition(format!(
                "{s:?} must list each of 1..={n} once"
            )));
        }
        Self::new(&left, n)
    }
}

impl Serialize for Bipartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bipartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All `2^{n-1} - 1` canonical cuts, lexicographic in `M`.
pub fn enumerate_bipartitions(n: usize) -> Result<Vec<Bipartition>> {
    if n < 2 {
        return Err(Error::InvalidBipartition(format!(
            "need at least 2 parties, got {n}"
        )));
    }
    if n > 20 {
        return Err(Error::Domain(format!(
            "{n} parties is too many to enumerate"
        )));
    }
    let mut out = Vec::with_capacity((1 << (n - 1)) - 1);
    // bit i of mask selects party i + 2
    for mask in 0..(1usize << (n - 1)) - 1 {
        let mut m = vec![1];
        m.extend((0..n - 1).filter(|i| mask & (1 << i) != 0).map(|i| i + 2));
        out.push(Bipartition { m, n });
    }
    out.sort();
    Ok(out)
}

/// Factor indices on each side of the cut (all copies of each party).
pub fn cut_factors(b: &Bipartition, layout: &SubsystemLayout) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (i, f) in layout.factors().iter().enumerate() {
        if f.party > b.n {
            return Err(Error::InvalidBipartition(format!(
                "layout party {} outside 1..={}",
                f.party, b.n
            )));
        }
        if b.contains(f.party) {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    Ok((left, right))
}

/// Hilbert-space dimensions `(d_M, d_M̄)` of the two sides.
pub fn cut_dimensions(b: &Bipartition, layout: &SubsystemLayout) -> Result<(usize, usize)> {
    let (l, r) = cut_factors(b, layout)?;
    let dim = |ix: &[usize]| ix.iter().map(|&i| layout.factors()[i].dimension).product();
    Ok((dim(&l), dim(&r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{copies, star_pen, IsotropicVisibility};

    #[test]
    fn counts_follow_formula() {
        for n in 2..=7 {
            assert_eq!(enumerate_bipartitions(n).unwrap().len(), (1 << (n - 1)) - 1);
        }
        assert!(enumerate_bipartitions(1).is_err());
    }

    #[test]
    fn small_enumerations() {
        let show = |n| {
            enumerate_bipartitions(n)
                .unwrap()
                .iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(show(2), vec!["1|2"]);
        assert_eq!(show(3), vec!["1|23", "12|3", "13|2"]);
    }

    #[test]
    fn no_complementary_pairs() {
        let cuts = enumerate_bipartitions(5).unwrap();
        for b in &cuts {
            let c = b.complement();
            assert!(!cuts.iter().any(|x| x.parties() == c.as_slice()));
        }
    }

    #[test]
    fn parse_and_canonicalise() {
        let b: Bipartition = "23|1".parse().unwrap();
        assert_eq!(b.to_string(), "1|23");
        assert!("1|1".parse::<Bipartition>().is_err());
        assert!("12".parse::<Bipartition>().is_err());
        assert!("1|3".parse::<Bipartition>().is_err());
        assert!(Bipartition::new(&[1, 2, 3], 3).is_err());
    }

    #[test]
    fn star_cut_factors() {
        let s = star_pen(3, IsotropicVisibility::new(0.5).unwrap()).unwrap();
        let hub = Bipartition::new(&[1], 3).unwrap();
        assert_eq!(
            cut_factors(&hub, s.layout()).unwrap(),
            (vec![0, 1], vec![2, 3])
        );
        let b12 = Bipartition::new(&[1, 2], 3).unwrap();
        assert_eq!(cut_factors(&b12, s.layout()).unwrap().1, vec![3]);
        let two = copies(&s, 2).unwrap();
        let (l, r) = cut_factors(&hub, two.layout()).unwrap();
        assert_eq!((l.len(), r.len()), (4, 4));
    }

    #[test]
    fn party_outside_range() {
        let s = star_pen(3, IsotropicVisibility::new(0.5).unwrap()).unwrap();
        let b = Bipartition::new(&[1], 2).unwrap();
        assert!(cut_factors(&b, s.layout()).is_err());
    }
}
