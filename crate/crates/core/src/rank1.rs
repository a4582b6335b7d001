//! Rank-1 operator families M_i(v) = <alpha_i, v> e_i and assembly of the
//! operator P(M_1, ..., M_N).

use crate::exact::{dot, ExactError, Matrix, Rat, Vector};
use crate::ncpoly::{NcError, NcPoly};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Rank1Error {
    #[error("operator index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("polynomial alphabet size {poly} does not match family size {family}")]
    AlphabetMismatch { poly: usize, family: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Nc(#[from] NcError),
}

/// Two families of N vectors in Q^n defining the rank-1 operators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOneSystem {
    pub n: usize,
    #[serde(rename = "N")]
    pub family_size: usize,
    pub e: Vec<Vector>,
    pub alpha: Vec<Vector>,
}

impl RankOneSystem {
    pub fn new(n: usize, e: Vec<Vector>, alpha: Vec<Vector>) -> Result<Self, Rank1Error> {
        if e.len() != alpha.len() {
            return Err(ExactError::Dimension("e and alpha counts differ".into()).into());
        }
        if e.iter().chain(alpha.iter()).any(|v| v.len() != n) {
            return Err(ExactError::Dimension(format!(
                "all vectors must have ambient dimension {n}"
            ))
            .into());
        }
        let family_size = e.len();
        Ok(RankOneSystem {
            n,
            family_size,
            e,
            alpha,
        })
    }

    /// <alpha_j, e_i>, both 1-based. This is the scalar that a path step
    /// j-after-i contributes.
    pub fn pairing(&self, i: usize, j: usize) -> Rat {
        dot(&self.alpha[j - 1], &self.e[i - 1])
    }

    /// pairing_matrix[i][j] = <alpha_j, e_i> (0-based storage of the
    /// 1-based pairing).
    pub fn pairing_matrix(&self) -> Matrix {
        Matrix::from_fn(self.family_size, self.family_size, |i, j| {
            self.pairing(i + 1, j + 1)
        })
    }
}

/// Matrix of M_i in the standard basis: the outer product e_i alpha_i^T.
pub fn rank_one_matrix(sys: &RankOneSystem, i: usize) -> Result<Matrix, Rank1Error> {
    if i == 0 || i > sys.family_size {
        return Err(Rank1Error::IndexOutOfRange(i, sys.family_size));
    }
    let e = &sys.e[i - 1];
    let a = &sys.alpha[i - 1];
    Ok(Matrix::from_fn(sys.n, sys.n, |r, c| &e[r] * &a[c]))
}

/// The assembled operator M = P(M_1, ..., M_N); ground truth for every
/// oracle comparison in the crate. A word is a path read left to right, so
/// its first letter acts first: the word (i_1, ..., i_s) contributes the
/// matrix product M_{i_s} ... M_{i_1}.
pub fn assemble(sys: &RankOneSystem, p: &NcPoly) -> Result<Matrix, Rank1Error> {
    if p.alphabet_size() != sys.family_size {
        return Err(Rank1Error::AlphabetMismatch {
            poly: p.alphabet_size(),
            family: sys.family_size,
        });
    }
    let mats: Vec<Matrix> = (1..=sys.family_size)
        .map(|i| rank_one_matrix(sys, i))
        .collect::<Result<_, _>>()?;
    let mut acc = Matrix::zero(sys.n, sys.n);
    for (word, coeff) in p.terms() {
        let mut prod = mats[word.first() - 1].clone();
        for &letter in &word.0[1..] {
            prod = mats[letter - 1].mul(&prod);
        }
        acc = acc.add(&prod.scale(coeff));
    }
    Ok(acc)
}

/// Scalar chain of a word: prod_{r=2..s} <alpha_{i_r}, e_{i_{r-1}}>.
/// A length-1 word contributes the empty product 1.
pub fn word_chain(sys: &RankOneSystem, word: &[usize]) -> Rat {
    word.windows(2).map(|w| sys.pairing(w[0], w[1])).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::unit_vector;
    use crate::ncpoly::NcPoly;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn unit_pair_gives_unit_matrix() {
        let sys = RankOneSystem::new(2, vec![unit_vector(2, 0)], vec![unit_vector(2, 0)]).unwrap();
        let m = rank_one_matrix(&sys, 1).unwrap();
        assert_eq!(m[(0, 0)], Rat::one());
        assert!(m[(0, 1)].is_zero() && m[(1, 0)].is_zero() && m[(1, 1)].is_zero());
    }

    #[test]
    fn zero_alpha_gives_zero_matrix() {
        let sys = RankOneSystem::new(
            2,
            vec![vec![r(1, 1), r(2, 1)]],
            vec![vec![Rat::zero(), Rat::zero()]],
        )
        .unwrap();
        assert!(rank_one_matrix(&sys, 1).unwrap().is_zero());
    }

    #[test]
    fn outer_product_example() {
        let sys = RankOneSystem::new(
            2,
            vec![vec![r(1, 1), r(2, 1)]],
            vec![vec![r(3, 1), r(4, 1)]],
        )
        .unwrap();
        let m = rank_one_matrix(&sys, 1).unwrap();
        assert_eq!(m[(0, 0)], r(3, 1));
        assert_eq!(m[(0, 1)], r(4, 1));
        assert_eq!(m[(1, 0)], r(6, 1));
        assert_eq!(m[(1, 1)], r(8, 1));
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_at_most_one_via_two_by_two_minors() {
        let sys = RankOneSystem::new(
            3,
            vec![vec![r(1, 2), r(-1, 1), r(3, 1)], vec![r(0, 1), r(2, 1), r(1, 3)]],
            vec![vec![r(2, 1), r(1, 1), r(0, 1)], vec![r(-1, 1), r(1, 2), r(4, 1)]],
        )
        .unwrap();
        for i in 1..=2 {
            let m = rank_one_matrix(&sys, i).unwrap();
            for r0 in 0..3 {
                for r1 in r0 + 1..3 {
                    for c0 in 0..3 {
                        for c1 in c0 + 1..3 {
                            let minor = &m[(r0, c0)] * &m[(r1, c1)] - &m[(r0, c1)] * &m[(r1, c0)];
                            assert!(minor.is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn assemble_single_letter() {
        let sys = RankOneSystem::new(2, vec![unit_vector(2, 0)], vec![unit_vector(2, 0)]).unwrap();
        let p = NcPoly::from_terms(1, [(Rat::one(), vec![1])]).unwrap();
        let m = assemble(&sys, &p).unwrap();
        assert_eq!(m[(0, 0)], Rat::one());
    }

    #[test]
    fn two_vertex_laplacian_by_hand() {
        // e = alpha = u1 - u2 (phi = 1), P = c * x1
        let c = r(7, 3);
        let v = vec![r(1, 1), r(-1, 1)];
        let sys = RankOneSystem::new(2, vec![v.clone()], vec![v]).unwrap();
        let p = NcPoly::from_terms(1, [(c.clone(), vec![1])]).unwrap();
        let m = assemble(&sys, &p).unwrap();
        assert_eq!(m[(0, 0)], c);
        assert_eq!(m[(0, 1)], -&c);
        assert_eq!(m[(1, 0)], -&c);
        assert_eq!(m[(1, 1)], c);
    }

    #[test]
    fn word_contraction_identity() {
        // running a word left to right (first letter acting first) collapses
        // to (prod of chain pairings) * (e_{is} outer alpha_{i1})
        let sys = RankOneSystem::new(
            3,
            vec![
                vec![r(1, 1), r(2, 1), r(0, 1)],
                vec![r(-1, 2), r(1, 1), r(3, 1)],
                vec![r(0, 1), r(1, 3), r(1, 1)],
            ],
            vec![
                vec![r(2, 1), r(-1, 1), r(1, 2)],
                vec![r(1, 1), r(0, 1), r(1, 1)],
                vec![r(3, 1), r(1, 1), r(-2, 1)],
            ],
        )
        .unwrap();
        let words: [&[usize]; 4] = [&[2], &[1, 3], &[3, 1, 2], &[2, 2, 1, 3]];
        for word in words {
            let mut prod = rank_one_matrix(&sys, word[0]).unwrap();
            for &l in &word[1..] {
                prod = rank_one_matrix(&sys, l).unwrap().mul(&prod);
            }
            let chain = word_chain(&sys, word);
            let first = word[0];
            let last = *word.last().unwrap();
            let outer = Matrix::from_fn(3, 3, |a, b| {
                &sys.e[last - 1][a] * &sys.alpha[first - 1][b]
            });
            assert_eq!(prod, outer.scale(&chain), "word {word:?}");
        }
    }
}
