//! DOOMBs (directed graphs whose components are oriented chains or cycles,
//! i.e. partial injections), path-sum edge weights, edge-Gram determinants
//! and the combinatorial coefficients mu_k.

use crate::exact::{det, ExactError, Matrix, Polynomial, Rat};
use crate::ncpoly::NcPoly;
use crate::rank1::{word_chain, Rank1Error, RankOneSystem};
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// A directed graph on 1..=N in which every vertex has in-degree <= 1 and
/// out-degree <= 1. Edges are kept sorted by (tail, head) so edge-Gram
/// row/column indexing is deterministic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Doomb {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Doomb {
    pub fn new(vertex_count: usize, mut edges: Vec<(usize, usize)>) -> Option<Self> {
        edges.sort_unstable();
        edges.dedup();
        let mut out_seen = vec![false; vertex_count + 1];
        let mut in_seen = vec![false; vertex_count + 1];
        for &(t, h) in &edges {
            if t == 0 || h == 0 || t > vertex_count || h > vertex_count {
                return None;
            }
            if out_seen[t] || in_seen[h] {
                return None;
            }
            out_seen[t] = true;
            in_seen[h] = true;
        }
        Some(Doomb {
            vertex_count,
            edges,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Connected components, each reported as the ordered vertex list of an
    /// oriented chain (first to last) or of an oriented cycle (the flag is
    /// true for cycles; the list starts at the minimal vertex).
    pub fn components(&self) -> Vec<(Vec<usize>, bool)> {
        let n = self.vertex_count;
        let mut next = vec![0usize; n + 1];
        let mut prev = vec![0usize; n + 1];
        let mut touched = vec![false; n + 1];
        for &(t, h) in &self.edges {
            next[t] = h;
            prev[h] = t;
            touched[t] = true;
            touched[h] = true;
        }
        let mut seen = vec![false; n + 1];
        let mut out = Vec::new();
        // chains: start where in-degree is 0
        for v in 1..=n {
            if !touched[v] || seen[v] || prev[v] != 0 {
                continue;
            }
            let mut walk = vec![v];
            seen[v] = true;
            let mut cur = v;
            while next[cur] != 0 {
                cur = next[cur];
                seen[cur] = true;
                walk.push(cur);
            }
            out.push((walk, false));
        }
        // what is left are cycles
        for v in 1..=n {
            if !touched[v] || seen[v] {
                continue;
            }
            let mut walk = vec![v];
            seen[v] = true;
            let mut cur = next[v];
            while cur != v {
                seen[cur] = true;
                walk.push(cur);
                cur = next[cur];
            }
            out.push((walk, true));
        }
        out
    }
}

/// W_P(a, b) for all vertex pairs: sum over words of P starting at a and
/// ending at b of the coefficient times the internal pairing chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable {
    pub n: usize,
    entries: Vec<Rat>,
}

impl WeightTable {
    pub fn get(&self, a: usize, b: usize) -> &Rat {
        &self.entries[(a - 1) * self.n + (b - 1)]
    }
}

pub fn weight_table(sys: &RankOneSystem, p: &NcPoly) -> Result<WeightTable, Rank1Error> {
    if p.alphabet_size() != sys.family_size {
        return Err(Rank1Error::AlphabetMismatch {
            poly: p.alphabet_size(),
            family: sys.family_size,
        });
    }
    let n = sys.family_size;
    let mut entries = vec![Rat::zero(); n * n];
    for (word, coeff) in p.terms() {
        let a = word.first();
        let b = word.last();
        entries[(a - 1) * n + (b - 1)] += coeff * &word_chain(sys, &word.0);
    }
    Ok(WeightTable { n, entries })
}

/// Depth-first enumeration of DOOMBs on 1..=N with exactly k edges, every
/// edge passing `support`, visiting in lexicographic edge-list order.
pub fn for_each_doomb(
    n: usize,
    k: usize,
    support: &dyn Fn(usize, usize) -> bool,
    f: &mut dyn FnMut(&Doomb),
) {
    let candidates: Vec<(usize, usize)> = (1..=n)
        .flat_map(|t| (1..=n).map(move |h| (t, h)))
        .filter(|&(t, h)| support(t, h))
        .collect();
    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(k);
    let mut out_used = 0u64;
    let mut in_used = 0u64;
    dfs(
        &candidates,
        0,
        n,
        k,
        &mut chosen,
        &mut out_used,
        &mut in_used,
        f,
    );
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    candidates: &[(usize, usize)],
    start: usize,
    n: usize,
    k: usize,
    chosen: &mut Vec<(usize, usize)>,
    out_used: &mut u64,
    in_used: &mut u64,
    f: &mut dyn FnMut(&Doomb),
) {
    if chosen.len() == k {
        f(&Doomb {
            vertex_count: n,
            edges: chosen.clone(),
        });
        return;
    }
    let need = k - chosen.len();
    for idx in start..candidates.len() {
        if candidates.len() - idx < need {
            break;
        }
        let (t, h) = candidates[idx];
        let (tb, hb) = (1u64 << t, 1u64 << h);
        if *out_used & tb != 0 || *in_used & hb != 0 {
            continue;
        }
        chosen.push((t, h));
        *out_used |= tb;
        *in_used |= hb;
        dfs(candidates, idx + 1, n, k, chosen, out_used, in_used, f);
        chosen.pop();
        *out_used &= !tb;
        *in_used &= !hb;
    }
}

/// Collects the enumeration into a vector (deterministic order).
pub fn enumerate_doombs(
    n: usize,
    k: usize,
    support: &dyn Fn(usize, usize) -> bool,
) -> Vec<Doomb> {
    let mut out = Vec::new();
    for_each_doomb(n, k, support, &mut |g| out.push(g.clone()));
    out
}

/// W_P(G): product of W_P over the edges; empty product is 1.
pub fn doomb_weight(g: &Doomb, w: &WeightTable) -> Rat {
    g.edges.iter().map(|&(a, b)| w.get(a, b).clone()).product()
}

/// Determinant of the k x k matrix indexed by edges in canonical order,
/// entry (d1, d2) = <alpha at tail of d1, e at head of d2>. Empty graph
/// gives 1.
pub fn edge_gram_det(g: &Doomb, sys: &RankOneSystem) -> Result<Rat, ExactError> {
    let k = g.edge_count();
    let m = Matrix::from_fn(k, k, |i, j| sys.pairing(g.edges[j].1, g.edges[i].0));
    det(&m)
}

/// One DOOMB's contribution to mu_k, for audit dumps.
#[derive(Clone, Debug, Serialize)]
pub struct DoombContribution {
    pub edges: Vec<(usize, usize)>,
    pub weight: Rat,
    pub gram_det: Rat,
}

pub fn doomb_contribution(
    g: &Doomb,
    sys: &RankOneSystem,
    w: &WeightTable,
) -> Result<DoombContribution, ExactError> {
    Ok(DoombContribution {
        edges: g.edges.clone(),
        weight: doomb_weight(g, w),
        gram_det: edge_gram_det(g, sys)?,
    })
}

/// The combinatorial exterior-power trace: sum over all k-edge DOOMBs whose
/// edges carry nonzero weight of W_P(G) times the edge-Gram determinant.
pub fn mu_combinatorial(sys: &RankOneSystem, p: &NcPoly, k: usize) -> Result<Rat, Rank1Error> {
    let w = weight_table(sys, p)?;
    mu_with_table(sys, &w, k)
}

pub fn mu_with_table(sys: &RankOneSystem, w: &WeightTable, k: usize) -> Result<Rat, Rank1Error> {
    let n = sys.family_size;
    if k > n {
        return Ok(Rat::zero());
    }
    let support = |a: usize, b: usize| !w.get(a, b).is_zero();

    #[cfg(feature = "parallel")]
    {
        // Partition the DOOMB space by first edge; fixed chunk order keeps the
        // reduction deterministic (exact arithmetic makes it order-free anyway).
        let candidates: Vec<(usize, usize)> = (1..=n)
            .flat_map(|t| (1..=n).map(move |h| (t, h)))
            .filter(|&(t, h)| support(t, h))
            .collect();
        if k == 0 {
            return Ok(Rat::one());
        }
        let partial: Result<Vec<Rat>, Rank1Error> = (0..candidates.len())
            .into_par_iter()
            .map(|first| {
                let mut acc = Rat::zero();
                let mut err = None;
                let (t, h) = candidates[first];
                let mut chosen = vec![(t, h)];
                let mut out_used = 1u64 << t;
                let mut in_used = 1u64 << h;
                dfs(
                    &candidates,
                    first + 1,
                    n,
                    k,
                    &mut chosen,
                    &mut out_used,
                    &mut in_used,
                    &mut |g| {
                        if err.is_some() {
                            return;
                        }
                        match edge_gram_det(g, sys) {
                            Ok(d) => acc += doomb_weight(g, w) * d,
                            Err(e) => err = Some(e),
                        }
                    },
                );
                match err {
                    Some(e) => Err(e.into()),
                    None => Ok(acc),
                }
            })
            .collect();
        Ok(partial?.into_iter().sum())
    }

    #[cfg(not(feature = "parallel"))]
    {
        mu_with_table_sequential(sys, w, k)
    }
}

/// Sequential reference path for the same sum; always available so the
/// benches can compare it against the rayon path.
pub fn mu_with_table_sequential(
    sys: &RankOneSystem,
    w: &WeightTable,
    k: usize,
) -> Result<Rat, Rank1Error> {
    let n = sys.family_size;
    if k > n {
        return Ok(Rat::zero());
    }
    let mut acc = Rat::zero();
    let mut err: Option<ExactError> = None;
    for_each_doomb(n, k, &|a, b| !w.get(a, b).is_zero(), &mut |g| {
        if err.is_some() {
            return;
        }
        match edge_gram_det(g, sys) {
            Ok(d) => acc += doomb_weight(g, w) * d,
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e.into()),
        None => Ok(acc),
    }
}

/// char_M(t) = sum_{k=0}^{n} (-1)^k mu_k t^{n-k}, assembled purely from the
/// combinatorial side.
pub fn charpoly_combinatorial(sys: &RankOneSystem, p: &NcPoly) -> Result<Polynomial, Rank1Error> {
    let n = sys.n;
    let w = weight_table(sys, p)?;
    let mut coeffs = vec![Rat::zero(); n + 1];
    for k in 0..=n {
        let mu = mu_with_table(sys, &w, k)?;
        coeffs[n - k] = if k % 2 == 0 { mu } else { -mu };
    }
    Ok(Polynomial::from_coeffs(coeffs))
}

/// C(N,k)^2 * k!, the number of partial injections with k edges.
pub fn doomb_census(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let choose = |n: u64, k: u64| -> u64 {
        let mut acc = 1u64;
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    };
    let c = choose(n as u64, k as u64);
    let fact: u64 = (1..=k as u64).product();
    c * c * fact
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{char_poly, principal_minor_sum, unit_vector};
    use crate::ncpoly::NcPoly;
    use crate::rank1::assemble;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn small_sys() -> RankOneSystem {
        RankOneSystem::new(
            3,
            vec![
                vec![r(1, 1), r(0, 1), r(2, 1)],
                vec![r(0, 1), r(1, 2), r(-1, 1)],
                vec![r(1, 1), r(1, 1), r(0, 1)],
                vec![r(-1, 2), r(0, 1), r(1, 1)],
            ],
            vec![
                vec![r(2, 1), r(-1, 1), r(0, 1)],
                vec![r(1, 1), r(1, 1), r(1, 2)],
                vec![r(0, 1), r(3, 1), r(-1, 1)],
                vec![r(1, 3), r(0, 1), r(1, 1)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn weight_table_linear_is_diagonal() {
        // linear P: paths all have length 1, W(a,b) = p_a delta_{ab}
        let sys = small_sys();
        let p = NcPoly::from_terms(4, [(r(2, 1), vec![1]), (r(-1, 3), vec![3])]).unwrap();
        let w = weight_table(&sys, &p).unwrap();
        for a in 1..=4 {
            for b in 1..=4 {
                if a == b && a == 1 {
                    assert_eq!(*w.get(a, b), r(2, 1));
                } else if a == b && a == 3 {
                    assert_eq!(*w.get(a, b), r(-1, 3));
                } else {
                    assert!(w.get(a, b).is_zero());
                }
            }
        }
    }

    #[test]
    fn weight_table_single_quadratic_word() {
        // P = x1 x2: W(1,2) = <alpha_2, e_1>, all else 0
        let sys = small_sys();
        let p = NcPoly::from_terms(4, [(Rat::one(), vec![1, 2])]).unwrap();
        let w = weight_table(&sys, &p).unwrap();
        assert_eq!(*w.get(1, 2), sys.pairing(1, 2));
        let nonzero: usize = (1..=4)
            .flat_map(|a| (1..=4).map(move |b| (a, b)))
            .filter(|&(a, b)| !w.get(a, b).is_zero())
            .count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn weight_table_matches_word_loop_oracle() {
        let sys = small_sys();
        let p = NcPoly::from_terms(
            4,
            [
                (r(1, 2), vec![1, 2, 3]),
                (r(-2, 1), vec![2, 2]),
                (r(3, 1), vec![4]),
                (r(1, 1), vec![3, 1, 4]),
            ],
        )
        .unwrap();
        let w = weight_table(&sys, &p).unwrap();
        for a in 1..=4 {
            for b in 1..=4 {
                let mut expect = Rat::zero();
                for (word, coeff) in p.terms() {
                    if word.first() == a && word.last() == b {
                        expect += coeff * &word_chain(&sys, &word.0);
                    }
                }
                assert_eq!(*w.get(a, b), expect, "entry ({a},{b})");
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let all = |_: usize, _: usize| true;
        assert_eq!(enumerate_doombs(3, 0, &all).len(), 1);
        assert_eq!(enumerate_doombs(3, 2, &all).len(), 18);
        assert_eq!(enumerate_doombs(2, 2, &all).len(), 2);
        // census formula against brute force for N <= 4
        for n in 1..=4usize {
            for k in 0..=n {
                // brute force over all k-subsets of ordered pairs
                let pairs: Vec<(usize, usize)> = (1..=n)
                    .flat_map(|t| (1..=n).map(move |h| (t, h)))
                    .collect();
                let brute = crate::exact::subsets(pairs.len(), k)
                    .into_iter()
                    .filter(|s| {
                        let edges: Vec<_> = s.iter().map(|&i| pairs[i]).collect();
                        Doomb::new(n, edges).is_some()
                    })
                    .count() as u64;
                assert_eq!(brute, doomb_census(n, k), "N={n}, k={k}");
                assert_eq!(
                    enumerate_doombs(n, k, &all).len() as u64,
                    doomb_census(n, k)
                );
            }
        }
    }

    #[test]
    fn doomb_rejects_degree_violations() {
        assert!(Doomb::new(3, vec![(1, 2), (1, 3)]).is_none());
        assert!(Doomb::new(3, vec![(1, 2), (3, 2)]).is_none());
        assert!(Doomb::new(3, vec![(1, 1), (2, 3)]).is_some());
    }

    #[test]
    fn components_classify_chains_and_cycles() {
        let g = Doomb::new(6, vec![(1, 2), (2, 3), (4, 4), (5, 6), (6, 5)]).unwrap();
        let comps = g.components();
        assert!(comps.contains(&(vec![1, 2, 3], false)));
        assert!(comps.contains(&(vec![4], true)));
        assert!(comps.contains(&(vec![5, 6], true)));
    }

    #[test]
    fn doomb_weight_products() {
        let sys = small_sys();
        let p = NcPoly::from_terms(4, [(r(2, 1), vec![1]), (r(3, 1), vec![2]), (r(5, 1), vec![1, 2])])
            .unwrap();
        let w = weight_table(&sys, &p).unwrap();
        let empty = Doomb::new(4, vec![]).unwrap();
        assert_eq!(doomb_weight(&empty, &w), Rat::one());
        let single = Doomb::new(4, vec![(1, 1)]).unwrap();
        assert_eq!(doomb_weight(&single, &w), *w.get(1, 1));
        let chain = Doomb::new(4, vec![(1, 2), (2, 3)]).unwrap();
        assert_eq!(doomb_weight(&chain, &w), w.get(1, 2) * w.get(2, 3));
    }

    #[test]
    fn edge_gram_small_cases() {
        let sys = small_sys();
        let loop_a = Doomb::new(4, vec![(2, 2)]).unwrap();
        assert_eq!(edge_gram_det(&loop_a, &sys).unwrap(), sys.pairing(2, 2));

        // orthogonal families block-diagonalize
        let ortho = RankOneSystem::new(
            2,
            vec![unit_vector(2, 0), unit_vector(2, 1)],
            vec![unit_vector(2, 0), unit_vector(2, 1)],
        )
        .unwrap();
        let two_loops = Doomb::new(2, vec![(1, 1), (2, 2)]).unwrap();
        assert_eq!(
            edge_gram_det(&two_loops, &ortho).unwrap(),
            ortho.pairing(1, 1) * ortho.pairing(2, 2)
        );
    }

    #[test]
    fn det_setup_repeated_row_index_vanishes() {
        // e_{(i,j)} = u_i, alpha_{(i,j)} = u_j over n = 2: pairs in order
        // (1,1), (1,2), (2,1), (2,2); loops at (1,1) and (1,2) pair alphas
        // {1, 2} against e rows both u_1 -> repeated e row index -> det 0.
        let n = 2;
        let mut e = Vec::new();
        let mut alpha = Vec::new();
        for i in 0..n {
            for j in 0..n {
                e.push(unit_vector(n, i));
                alpha.push(unit_vector(n, j));
            }
        }
        let sys = RankOneSystem::new(n, e, alpha).unwrap();
        let g = Doomb::new(4, vec![(1, 1), (2, 2)]).unwrap(); // vertices (1,1) and (1,2)
        assert!(edge_gram_det(&g, &sys).unwrap().is_zero());
    }

    #[test]
    fn mu_trivial_and_trace() {
        let sys = small_sys();
        let p = NcPoly::from_terms(
            4,
            [(r(1, 2), vec![1, 2]), (r(-1, 1), vec![3]), (r(2, 1), vec![4, 1])],
        )
        .unwrap();
        assert_eq!(mu_combinatorial(&sys, &p, 0).unwrap(), Rat::one());
        let m = assemble(&sys, &p).unwrap();
        assert_eq!(mu_combinatorial(&sys, &p, 1).unwrap(), m.trace());
    }

    #[test]
    fn mu_matches_principal_minor_sums() {
        let sys = small_sys();
        let p = NcPoly::from_terms(
            4,
            [
                (r(1, 2), vec![1, 2]),
                (r(-1, 1), vec![3, 3]),
                (r(2, 1), vec![4]),
                (r(1, 1), vec![2, 1]),
            ],
        )
        .unwrap();
        let m = assemble(&sys, &p).unwrap();
        for k in 0..=3 {
            assert_eq!(
                mu_combinatorial(&sys, &p, k).unwrap(),
                principal_minor_sum(&m, k).unwrap(),
                "k = {k}"
            );
        }
        // k > n vanishes
        assert_eq!(mu_combinatorial(&sys, &p, 4).unwrap(), Rat::zero());
    }

    #[test]
    fn pruning_soundness() {
        let sys = small_sys();
        let p = NcPoly::from_terms(4, [(r(1, 1), vec![1, 2]), (r(1, 2), vec![3])]).unwrap();
        let w = weight_table(&sys, &p).unwrap();
        for k in 0..=3 {
            // full enumeration without pruning
            let mut full = Rat::zero();
            for_each_doomb(4, k, &|_, _| true, &mut |g| {
                full += doomb_weight(g, &w) * edge_gram_det(g, &sys).unwrap();
            });
            assert_eq!(full, mu_with_table(&sys, &w, k).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn zero_poly_charpoly_is_t_n() {
        let sys = small_sys();
        let p = NcPoly::zero(4);
        let cp = charpoly_combinatorial(&sys, &p).unwrap();
        assert_eq!(cp.degree(), 3);
        assert_eq!(cp.coeff(3), Rat::one());
        for i in 0..3 {
            assert!(cp.coeff(i).is_zero());
        }
    }

    #[test]
    fn charpoly_matches_oracle() {
        let sys = small_sys();
        let p = NcPoly::from_terms(
            4,
            [(r(1, 2), vec![1, 2]), (r(-1, 1), vec![3, 3]), (r(2, 1), vec![4])],
        )
        .unwrap();
        let comb = charpoly_combinatorial(&sys, &p).unwrap();
        let oracle = char_poly(&assemble(&sys, &p).unwrap()).unwrap();
        assert_eq!(comb, oracle);
    }

    #[test]
    fn sequential_and_default_paths_agree() {
        let sys = small_sys();
        let p = NcPoly::from_terms(4, [(r(1, 2), vec![1, 2]), (r(2, 1), vec![4])]).unwrap();
        let w = weight_table(&sys, &p).unwrap();
        for k in 0..=3 {
            assert_eq!(
                mu_with_table(&sys, &w, k).unwrap(),
                mu_with_table_sequential(&sys, &w, k).unwrap()
            );
        }
    }
}
