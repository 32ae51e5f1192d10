use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A realization `x_1..x_n` of colors in `1..=m` with no immediate repeat.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColorSequence {
    values: Vec<usize>,
}

/// One maximal strictly increasing block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Run {
    pub start_value: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunDecomposition {
    pub runs: Vec<Run>,
    pub max_len: usize,
}

impl ColorSequence {
    /// Validates non-emptiness, the no-repeat constraint and (when given)
    /// that every color lies in `1..=m`.
    pub fn new(values: Vec<usize>, m: Option<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSequence("sequence is empty".into()));
        }
        if let Some(pos) = values
            .iter()
            .position(|&v| v == 0 || m.is_some_and(|m| v > m))
        {
            return Err(Error::InvalidSequence(format!(
                "value {} at position {} outside 1..={}",
                values[pos],
                pos + 1,
                m.map_or_else(|| "inf".to_string(), |m| m.to_string())
            )));
        }
        if let Some(k) = values.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidSequence(format!(
                "value {} repeats at positions {} and {}",
                values[k],
                k + 1,
                k + 2
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest color present.
    pub fn max_color(&self) -> usize {
        self.values.iter().copied().max().unwrap_or(0)
    }

    /// Compact form for alphabets up to 9: one digit per color, e.g. `23124`.
    pub fn from_digits(s: &str) -> Result<Self> {
        let values = s
            .trim()
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::Parse(format!("`{c}` is not a digit")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values, None)
    }

    /// Reads one color per line; blank lines and `#` comments are skipped.
    pub fn parse_lines(text: &str, m: Option<usize>) -> Result<Self> {
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v = line.parse::<usize>().map_err(|_| {
                Error::Parse(format!("line {}: `{line}` is not a color", lineno + 1))
            })?;
            values.push(v);
        }
        Self::new(values, m)
    }
}

impl FromStr for ColorSequence {
    type Err = Error;

    /// Comma- or whitespace-separated colors.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("`{t}` is not a color")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values, None)
    }
}

impl fmt::Display for ColorSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Greedy left-to-right split into maximal strictly increasing blocks
/// (with the convention `x_0 = +inf`).
pub fn decompose_runs(seq: &ColorSequence) -> RunDecomposition {
    let values = seq.values();
    let mut runs = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] < values[k - 1] {
            runs.push(Run {
                start_value: values[start],
                length: k - start,
            });
            start = k;
        }
    }
    let max_len = runs.iter().map(|r| r.length).max().unwrap_or(0);
    RunDecomposition { runs, max_len }
}

impl RunDecomposition {
    /// Rebuilds the sequence by slicing `seq` at the run boundaries.
    pub fn split<'a>(&self, seq: &'a ColorSequence) -> Vec<&'a [usize]> {
        let mut out = Vec::with_capacity(self.runs.len());
        let mut pos = 0;
        for run in &self.runs {
            out.push(&seq.values()[pos..pos + run.length]);
            pos += run.length;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const INTRO: &str = "2,3,1,2,4,3,4,2,3,1,3,4,5,1,2,3,4,3,4,1";

    #[test]
    fn intro_example() {
        let seq: ColorSequence = INTRO.parse().unwrap();
        let d = decompose_runs(&seq);
        assert_eq!(d.runs.len(), 8);
        assert_eq!(d.max_len, 4);
        let compact = ColorSequence::from_digits("23124342313451234341").unwrap();
        assert_eq!(compact, seq);
    }

    #[test]
    fn singleton_and_alternation() {
        let d = decompose_runs(&"5".parse().unwrap());
        assert_eq!(
            d.runs,
            vec![Run {
                start_value: 5,
                length: 1
            }]
        );
        assert_eq!(d.max_len, 1);
        let d = decompose_runs(&"1,2,1,2".parse().unwrap());
        assert_eq!(
            d.runs,
            vec![
                Run {
                    start_value: 1,
                    length: 2
                },
                Run {
                    start_value: 1,
                    length: 2
                }
            ]
        );
        assert_eq!(d.max_len, 2);
    }

    #[test]
    fn rejects_invalid_sequences() {
        assert!(ColorSequence::new(vec![], None).is_err());
        assert!(ColorSequence::new(vec![1, 2, 2], None).is_err());
        assert!(ColorSequence::new(vec![1, 0], None).is_err());
        assert!(ColorSequence::new(vec![1, 6], Some(5)).is_err());
        assert!("1,x".parse::<ColorSequence>().is_err());
    }

    #[test]
    fn parse_lines_skips_comments() {
        let seq = ColorSequence::parse_lines("# chain\n1\n\n3 # node 2\n2\n", Some(3)).unwrap();
        assert_eq!(seq.values(), &[1, 3, 2]);
        assert!(ColorSequence::parse_lines("1\nfoo\n", None).is_err());
    }

    fn arb_sequence() -> impl Strategy<Value = ColorSequence> {
        (2usize..30, 1usize..60).prop_flat_map(|(m, n)| {
            (1..=m, proptest::collection::vec(1..m, n - 1)).prop_map(move |(first, shifts)| {
                let mut values = vec![first];
                for u in shifts {
                    let prev = *values.last().unwrap();
                    values.push(if u < prev { u } else { u + 1 });
                }
                ColorSequence::new(values, Some(m)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn runs_concatenate_to_input(seq in arb_sequence()) {
            let d = decompose_runs(&seq);
            let joined: Vec<usize> = d.split(&seq).concat();
            prop_assert_eq!(&joined[..], seq.values());
            prop_assert_eq!(d.runs.iter().map(|r| r.length).sum::<usize>(), seq.len());
            prop_assert_eq!(d.max_len, d.runs.iter().map(|r| r.length).max().unwrap());
            let pieces = d.split(&seq);
            for piece in &pieces {
                prop_assert!(piece.windows(2).all(|w| w[0] < w[1]));
            }
            for pair in pieces.windows(2) {
                prop_assert!(pair[0].last() > pair[1].first());
            }
        }

        #[test]
        fn display_parse_round_trip(seq in arb_sequence()) {
            let back: ColorSequence = seq.to_string().parse().unwrap();
            prop_assert_eq!(back, seq);
        }
    }
}
