//! Exponent compositions: the argument tuples of the star sums.
//!
//! Convention used through the whole crate: `parts[0]` is the exponent of
//! the largest summation index, so a non-empty composition needs
//! `parts[0] >= 2` to converge. The empty composition is the formal unit
//! and evaluates to exactly 1.

use std::fmt;

use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self, Error> {
        if parts.iter().any(|&k| k == 0) {
            return Err(Error::Parse("composition parts must be positive".into()));
        }
        if let Some(&first) = parts.first() {
            if first < 2 {
                return Err(Error::DivergentComposition);
            }
        }
        Ok(Composition { parts })
    }

    pub fn empty() -> Self {
        Composition { parts: Vec::new() }
    }

    /// Parse a comma-separated list of positive integers; empty input is the
    /// unit composition.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Composition::empty());
        }
        let mut parts = Vec::new();
        for tok in text.split(',') {
            let tok = tok.trim();
            let k: u32 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad composition part {tok:?}")))?;
            if k == 0 {
                return Err(Error::Parse("composition parts must be positive".into()));
            }
            parts.push(k);
        }
        Composition::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }

    pub fn weight(&self) -> u64 {
        self.parts.iter().map(|&k| k as u64).sum()
    }

    /// Extend by one more (innermost) part.
    pub fn push(&self, k: u32) -> Result<Self, Error> {
        let mut parts = self.parts.clone();
        parts.push(k);
        Composition::new(parts)
    }

    /// Drop the last part.
    pub fn parent(&self) -> Option<Self> {
        if self.parts.is_empty() {
            return None;
        }
        let mut parts = self.parts.clone();
        parts.pop();
        Some(Composition { parts })
    }

    /// Decrement the last part (returns `None` when the last part is 1 or
    /// the result would start below 2).
    pub fn decrement_last(&self) -> Option<Self> {
        let mut parts = self.parts.clone();
        let last = parts.last_mut()?;
        if *last < 2 {
            return None;
        }
        *last -= 1;
        if parts[0] < 2 {
            return None;
        }
        Some(Composition { parts })
    }

    pub fn canonical_text(&self) -> String {
        self.parts
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.canonical_text())
    }
}

/// Strictly increasing index tuple for the alternating multiple integrals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSeq {
    indices: Vec<u32>,
}

impl IndexSeq {
    pub fn new(indices: Vec<u32>) -> Result<Self, Error> {
        if indices.is_empty() {
            return Err(Error::Parse("index sequence must be non-empty".into()));
        }
        if indices[0] < 1 {
            return Err(Error::Parse("indices start at 1".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse(
                "indices must be strictly increasing".into(),
            ));
        }
        Ok(IndexSeq { indices })
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut v = Vec::new();
        for tok in text.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            v.push(
                tok.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad index {tok:?}")))?,
            );
        }
        IndexSeq::new(v)
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> u32 {
        *self.indices.last().expect("non-empty by construction")
    }

    pub fn canonical_text(&self) -> String {
        self.indices
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for IndexSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.canonical_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_basic() {
        let c = Composition::parse("2,1,3").unwrap();
        assert_eq!(c.parts(), &[2, 1, 3]);
        assert_eq!(c.weight(), 6);
        assert_eq!(c.depth(), 3);
    }

    #[test]
    fn parse_empty_is_unit() {
        let c = Composition::parse("").unwrap();
        assert!(c.is_empty());
        assert_eq!(c.weight(), 0);
        assert_eq!(c.depth(), 0);
    }

    #[test]
    fn parse_divergent_rejected() {
        assert!(matches!(
            Composition::parse("1,2"),
            Err(Error::DivergentComposition)
        ));
        assert!(matches!(
            Composition::parse("1"),
            Err(Error::DivergentComposition)
        ));
    }

    #[test]
    fn parse_bad_tokens_rejected() {
        assert!(Composition::parse("2,x").is_err());
        assert!(Composition::parse("2,,3").is_err());
        assert!(Composition::parse("2,0").is_err());
        assert!(Composition::parse("-2").is_err());
    }

    #[test]
    fn format_round_trip() {
        for s in ["2,1,3", "4", ""] {
            let c = Composition::parse(s).unwrap();
            assert_eq!(c.canonical_text(), s);
        }
        // whitespace normalizes away
        let c = Composition::parse(" 2 , 1 ").unwrap();
        assert_eq!(c.canonical_text(), "2,1");
    }

    #[test]
    fn index_seq_validation() {
        assert!(IndexSeq::new(vec![1, 2, 3]).is_ok());
        assert!(IndexSeq::new(vec![1, 1]).is_err());
        assert!(IndexSeq::new(vec![2, 1]).is_err());
        assert!(IndexSeq::new(vec![]).is_err());
        assert!(IndexSeq::new(vec![0, 1]).is_err());
    }
}
