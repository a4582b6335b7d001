//! Noncommutative polynomials P(x_1, ..., x_N) as finite sums of
//! coefficiented words, and their evaluation over matrices.
//!
//! Words are nonempty: there is deliberately no constant term, since a
//! constant shift falls outside the rank-1 assembly framework.

use crate::exact::{ExactError, Matrix, Rat};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NcError {
    #[error("word is empty")]
    EmptyWord,
    #[error("letter {letter} out of range 1..={n}")]
    LetterOutOfRange { letter: usize, n: usize },
    #[error("expected {expected} operands, got {got}")]
    OperandCount { expected: usize, got: usize },
    #[error("operand matrices must be square of equal size")]
    OperandShape,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A word over the alphabet 1..=N; letters are 1-based as in serialized form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        *self.0.last().unwrap()
    }
}

/// A noncommutative polynomial in canonical form: terms keyed by word,
/// identical words merged, zero coefficients dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcPoly {
    alphabet_size: usize,
    terms: BTreeMap<Word, Rat>,
}

impl NcPoly {
    pub fn zero(alphabet_size: usize) -> Self {
        NcPoly {
            alphabet_size,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        alphabet_size: usize,
        terms: impl IntoIterator<Item = (Rat, Vec<usize>)>,
    ) -> Result<Self, NcError> {
        let mut p = NcPoly::zero(alphabet_size);
        for (coeff, letters) in terms {
            p.add_term(coeff, letters)?;
        }
        Ok(p)
    }

    pub fn add_term(&mut self, coeff: Rat, letters: Vec<usize>) -> Result<(), NcError> {
        if letters.is_empty() {
            return Err(NcError::EmptyWord);
        }
        for &l in &letters {
            if l == 0 || l > self.alphabet_size {
                return Err(NcError::LetterOutOfRange {
                    letter: l,
                    n: self.alphabet_size,
                });
            }
        }
        let word = Word(letters);
        let entry = self.terms.entry(word.clone()).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&word);
        }
        Ok(())
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &NcPoly) -> Result<NcPoly, NcError> {
        let mut p = self.clone();
        for (w, c) in other.terms() {
            p.add_term(c.clone(), w.0.clone())?;
        }
        Ok(p)
    }
}

/// Evaluate p over square matrices, one per alphabet letter, multiplying
/// operands in word order.
pub fn nc_evaluate(p: &NcPoly, operands: &[Matrix]) -> Result<Matrix, NcError> {
    if operands.len() != p.alphabet_size() {
        return Err(NcError::OperandCount {
            expected: p.alphabet_size(),
            got: operands.len(),
        });
    }
    let n = match operands.first() {
        Some(m) => {
            if !m.is_square() {
                return Err(NcError::OperandShape);
            }
            m.rows()
        }
        None => 0,
    };
    if operands.iter().any(|m| m.rows() != n || m.cols() != n) {
        return Err(NcError::OperandShape);
    }
    let mut acc = Matrix::zero(n, n);
    for (word, coeff) in p.terms() {
        let mut prod = operands[word.0[0] - 1].clone();
        for &l in &word.0[1..] {
            prod = prod.mul(&operands[l - 1]);
        }
        acc = acc.add(&prod.scale(coeff));
    }
    Ok(acc)
}

/// Degree-1 polynomial with the given per-letter coefficients.
pub fn linear_poly(alphabet_size: usize, coeffs: &BTreeMap<usize, Rat>) -> Result<NcPoly, NcError> {
    NcPoly::from_terms(
        alphabet_size,
        coeffs.iter().map(|(&i, c)| (c.clone(), vec![i])),
    )
}

/// Lexicographic rank (1-based) of the unordered pair {i, j}, i < j, among
/// all pairs from 1..=n. This mapping is part of the public contract: DOOMB
/// vertices over a pair alphabet are reported through it.
pub fn pair_rank(i: usize, j: usize, n: usize) -> usize {
    assert!(1 <= i && i < j && j <= n, "pair_rank needs 1 <= i < j <= n");
    (i - 1) * (2 * n - i) / 2 + (j - i)
}

/// Inverse of [`pair_rank`].
pub fn pair_unrank(rank: usize, n: usize) -> (usize, usize) {
    let mut r = rank;
    for i in 1..n {
        let row = n - i;
        if r <= row {
            return (i, i + r);
        }
        r -= row;
    }
    panic!("pair rank {rank} out of range for n = {n}");
}

pub fn num_pairs(n: usize) -> usize {
    n * (n - 1) / 2
}

#[derive(Serialize, Deserialize)]
struct NcPolyTermRepr {
    coeff: Rat,
    word: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct NcPolyRepr {
    #[serde(rename = "N")]
    n: usize,
    terms: Vec<NcPolyTermRepr>,
}

impl Serialize for NcPoly {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        NcPolyRepr {
            n: self.alphabet_size,
            terms: self
                .terms()
                .map(|(w, c)| NcPolyTermRepr {
                    coeff: c.clone(),
                    word: w.0.clone(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for NcPoly {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = NcPolyRepr::deserialize(de)?;
        NcPoly::from_terms(repr.n, repr.terms.into_iter().map(|t| (t.coeff, t.word)))
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}
