//! Line bundles with connection over a graph: the bundle Laplacian, mixed
//! forest sums, and the matrix-tree style corollaries for the Coxeter
//! families A_n and D_n.

use crate::exact::{ExactError, Matrix, Rat, Vector};
use crate::ncpoly::{pair_rank, NcPoly};
use crate::rank1::{Rank1Error, RankOneSystem};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("edge ({0},{1}) must satisfy 1 <= u < v <= n")]
    BadEdge(usize, usize),
    #[error("duplicate edge ({0},{1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0},{1}) has phi = 0, the connection must be invertible")]
    SingularPhi(usize, usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Rank1(#[from] Rank1Error),
}

/// Undirected edge u < v with parallel transport phi (direction u -> v)
/// and symmetric weight c.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleEdge {
    pub u: usize,
    pub v: usize,
    pub phi: Rat,
    pub c: Rat,
}

/// A line bundle with connection over a simple graph on vertices 1..=n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineBundle {
    pub n: usize,
    pub edges: Vec<BundleEdge>,
}

impl LineBundle {
    pub fn new(n: usize, edges: Vec<BundleEdge>) -> Result<Self, BundleError> {
        let mut seen = std::collections::BTreeSet::new();
        for e in &edges {
            if e.u == 0 || e.u >= e.v || e.v > n {
                return Err(BundleError::BadEdge(e.u, e.v));
            }
            if !seen.insert((e.u, e.v)) {
                return Err(BundleError::DuplicateEdge(e.u, e.v));
            }
            if e.phi.is_zero() {
                return Err(BundleError::SingularPhi(e.u, e.v));
            }
        }
        Ok(LineBundle { n, edges })
    }

    fn find(&self, i: usize, j: usize) -> Option<&BundleEdge> {
        let (u, v) = if i < j { (i, j) } else { (j, i) };
        self.edges.iter().find(|e| e.u == u && e.v == v)
    }

    /// phi_{ij}, the transport along the edge in the direction i -> j.
    pub fn phi(&self, i: usize, j: usize) -> Option<Rat> {
        self.find(i, j).map(|e| {
            if i < j {
                e.phi.clone()
            } else {
                e.phi.recip()
            }
        })
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<Rat> {
        self.find(i, j).map(|e| e.c.clone())
    }

    /// Transport along a closed walk (v_1, ..., v_m, v_1), given as the
    /// vertex list without the repeated endpoint.
    pub fn holonomy(&self, cycle: &[usize]) -> Option<Rat> {
        let mut acc = Rat::one();
        for idx in 0..cycle.len() {
            let a = cycle[idx];
            let b = cycle[(idx + 1) % cycle.len()];
            acc *= self.phi(a, b)?;
        }
        Some(acc)
    }

    /// The bundle Laplacian: row i maps v to sum_{j ~ i} c_ij (v_i - phi_ji v_j).
    pub fn laplacian(&self) -> Matrix {
        let mut m = Matrix::zero(self.n, self.n);
        for e in &self.edges {
            let (i, j) = (e.u - 1, e.v - 1);
            m[(i, i)] += &e.c;
            m[(j, j)] += &e.c;
            // phi_vu = 1/phi and phi_uv = phi
            m[(i, j)] -= &e.c * e.phi.recip();
            m[(j, i)] -= &e.c * &e.phi;
        }
        m
    }

    /// The rank-1 presentation over the pair alphabet: for an edge (i,j),
    /// e = u_i - phi_ij u_j and alpha = u_i - phi_ji u_j; non-edges get
    /// zero vectors and never appear in the polynomial.
    pub fn to_rank_one_system(&self) -> Result<(RankOneSystem, NcPoly), BundleError> {
        let n = self.n;
        let count = n * (n - 1) / 2;
        let mut e_fam = vec![vec![Rat::zero(); n]; count];
        let mut a_fam = vec![vec![Rat::zero(); n]; count];
        let mut coeffs = std::collections::BTreeMap::new();
        for edge in &self.edges {
            let idx = pair_rank(edge.u, edge.v, n) - 1;
            e_fam[idx] = pair_vector(n, edge.u, edge.v, &edge.phi);
            a_fam[idx] = pair_vector(n, edge.u, edge.v, &edge.phi.recip());
            coeffs.insert(idx + 1, edge.c.clone());
        }
        let sys = RankOneSystem::new(n, e_fam, a_fam)?;
        let p = crate::ncpoly::linear_poly(count, &coeffs).expect("valid pair alphabet");
        Ok((sys, p))
    }
}

/// u_i - phi u_j as a coordinate vector (i, j are 1-based).
pub fn pair_vector(n: usize, i: usize, j: usize, phi: &Rat) -> Vector {
    let mut v = vec![Rat::zero(); n];
    v[i - 1] = Rat::one();
    v[j - 1] = -phi;
    v
}

/// One edge of a weighted multigraph with transports; parallel edges are
/// allowed, which the two-layer D_n setup needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiEdge {
    pub u: usize,
    pub v: usize,
    pub phi: Rat,
    pub c: Rat,
}

/// A subset of multigraph edges every component of which is a tree or
/// carries exactly one cycle.
#[derive(Clone, Debug)]
pub struct MixedForest {
    pub edge_indices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ForestComponent {
    pub vertices: Vec<usize>,
    pub edge_count: usize,
    /// Edge indices of the unique cycle, in traversal order starting at
    /// the smallest cycle vertex; None for tree components.
    pub cycle: Option<Vec<usize>>,
}

struct Dsu {
    parent: Vec<usize>,
    has_cycle: Vec<bool>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..=n).collect(),
            has_cycle: vec![false; n + 1],
        }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    /// Returns false if adding (u,v) would create a second cycle in a
    /// component.
    fn add(&mut self, u: usize, v: usize) -> bool {
        let (ru, rv) = (self.find(u), self.find(v));
        if ru == rv {
            if self.has_cycle[ru] {
                return false;
            }
            self.has_cycle[ru] = true;
        } else {
            let cyc = self.has_cycle[ru] || self.has_cycle[rv];
            if self.has_cycle[ru] && self.has_cycle[rv] {
                return false;
            }
            self.parent[ru] = rv;
            self.has_cycle[rv] = cyc;
        }
        true
    }
}

/// Enumerates k-edge mixed forests of the multigraph in lexicographic
/// edge-index order.
pub fn for_each_mixed_forest(
    n: usize,
    edges: &[MultiEdge],
    k: usize,
    f: &mut dyn FnMut(&MixedForest),
) {
    fn rec(
        n: usize,
        edges: &[MultiEdge],
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        f: &mut dyn FnMut(&MixedForest),
    ) {
        if chosen.len() == k {
            f(&MixedForest {
                edge_indices: chosen.clone(),
            });
            return;
        }
        let need = k - chosen.len();
        for idx in start..edges.len() {
            if edges.len() - idx < need {
                break;
            }
            // re-run the union-find on the prefix; cheap at the sizes the
            // exact sums can reach anyway
            let mut dsu = Dsu::new(n);
            let mut ok = true;
            for &c in chosen.iter() {
                ok &= dsu.add(edges[c].u, edges[c].v);
            }
            if ok && dsu.add(edges[idx].u, edges[idx].v) {
                chosen.push(idx);
                rec(n, edges, k, idx + 1, chosen, f);
                chosen.pop();
            }
        }
    }
    rec(n, edges, k, 0, &mut Vec::with_capacity(k), f);
}

pub fn enumerate_mixed_forests(n: usize, edges: &[MultiEdge], k: usize) -> Vec<MixedForest> {
    let mut out = Vec::new();
    for_each_mixed_forest(n, edges, k, &mut |mf| out.push(mf.clone()));
    out
}

/// Splits a mixed forest into components, locating the unique cycle of the
/// non-tree ones by stripping leaves.
pub fn forest_components(n: usize, edges: &[MultiEdge], mf: &MixedForest) -> Vec<ForestComponent> {
    let mut dsu = Dsu::new(n);
    for &ei in &mf.edge_indices {
        dsu.add(edges[ei].u, edges[ei].v);
    }
    let mut by_root: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> =
        std::collections::BTreeMap::new();
    for v in 1..=n {
        let r = dsu.find(v);
        by_root.entry(r).or_default().0.push(v);
    }
    for &ei in &mf.edge_indices {
        let r = dsu.find(edges[ei].u);
        by_root.entry(r).or_default().1.push(ei);
    }
    by_root
        .into_values()
        .map(|(vertices, comp_edges)| {
            let cycle = if comp_edges.len() == vertices.len() {
                Some(extract_cycle(edges, &comp_edges))
            } else {
                None
            };
            ForestComponent {
                edge_count: comp_edges.len(),
                vertices,
                cycle,
            }
        })
        .collect()
}

fn extract_cycle(edges: &[MultiEdge], comp_edges: &[usize]) -> Vec<usize> {
    let mut alive: Vec<usize> = comp_edges.to_vec();
    // strip leaves until only the cycle remains
    loop {
        let mut degree: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
        for &ei in &alive {
            *degree.entry(edges[ei].u).or_insert(0) += 1;
            *degree.entry(edges[ei].v).or_insert(0) += 1;
        }
        let before = alive.len();
        alive.retain(|&ei| degree[&edges[ei].u] > 1 && degree[&edges[ei].v] > 1);
        if alive.len() == before {
            break;
        }
    }
    // walk the cycle from its smallest vertex
    let start = alive
        .iter()
        .flat_map(|&ei| [edges[ei].u, edges[ei].v])
        .min()
        .unwrap();
    let mut order = Vec::with_capacity(alive.len());
    let mut used = vec![false; alive.len()];
    let mut cur = start;
    for _ in 0..alive.len() {
        let (pos, _) = alive
            .iter()
            .enumerate()
            .filter(|&(pos, &ei)| !used[pos] && (edges[ei].u == cur || edges[ei].v == cur))
            .min_by_key(|&(_, &ei)| ei)
            .unwrap();
        used[pos] = true;
        let ei = alive[pos];
        order.push(ei);
        cur = if edges[ei].u == cur {
            edges[ei].v
        } else {
            edges[ei].u
        };
    }
    debug_assert_eq!(cur, start);
    order
}

/// Transport around a cycle given as ordered edge indices starting at the
/// smallest cycle vertex.
pub fn cycle_holonomy(edges: &[MultiEdge], cycle: &[usize]) -> Rat {
    let mut cur = cycle
        .iter()
        .flat_map(|&ei| [edges[ei].u, edges[ei].v])
        .min()
        .unwrap();
    let mut acc = Rat::one();
    for &ei in cycle {
        if edges[ei].u == cur {
            acc *= &edges[ei].phi;
            cur = edges[ei].v;
        } else {
            acc *= edges[ei].phi.recip();
            cur = edges[ei].u;
        }
    }
    acc
}

/// The mixed forest sum: over k-edge mixed forests, the product of edge
/// weights times (m+1) per tree component with m edges times
/// (1-w)(1-1/w) per one-cycle component with holonomy w. Cycles with w=1
/// contribute 0, which silently removes them from the sum.
pub fn mixed_forest_mu(n: usize, edges: &[MultiEdge], k: usize) -> Rat {
    let mut acc = Rat::zero();
    for_each_mixed_forest(n, edges, k, &mut |mf| {
        let mut term: Rat = mf.edge_indices.iter().map(|&ei| edges[ei].c.clone()).product();
        for comp in forest_components(n, edges, mf) {
            match comp.cycle {
                None => term *= Rat::from_int(comp.edge_count as i64 + 1),
                Some(cycle) => {
                    let w = cycle_holonomy(edges, &cycle);
                    let one = Rat::one();
                    term *= (&one - &w) * (&one - &w.recip());
                }
            }
        }
        acc += term;
    });
    acc
}

impl LineBundle {
    fn multi_edges(&self) -> Vec<MultiEdge> {
        self.edges
            .iter()
            .map(|e| MultiEdge {
                u: e.u,
                v: e.v,
                phi: e.phi.clone(),
                c: e.c.clone(),
            })
            .collect()
    }

    /// Coefficient mu_k of the bundle Laplacian char polynomial, computed
    /// as the mixed forest sum.
    pub fn forman_mu(&self, k: usize) -> Rat {
        mixed_forest_mu(self.n, &self.multi_edges(), k)
    }
}

/// Plain forest sum for the A_n (all-transports-1) specialization: over
/// k-edge cycle-free forests, the product of edge weights times (m+1) per
/// component. Deliberately a separate enumeration so it can arbitrate the
/// mixed forest route at phi = 1.
pub fn mtt_mu(n: usize, edges: &[(usize, usize, Rat)], k: usize) -> Rat {
    fn rec(n: usize, edges: &[(usize, usize, Rat)], k: usize, start: usize, chosen: &mut Vec<usize>, acc: &mut Rat) {
        if chosen.len() == k {
            // component sizes via a fresh scan
            let mut dsu = Dsu::new(n);
            for &ei in chosen.iter() {
                dsu.add(edges[ei].0, edges[ei].1);
            }
            let mut edge_count: std::collections::BTreeMap<usize, usize> =
                std::collections::BTreeMap::new();
            for &ei in chosen.iter() {
                *edge_count.entry(dsu.find(edges[ei].0)).or_insert(0) += 1;
            }
            let mut term: Rat = chosen.iter().map(|&ei| edges[ei].2.clone()).product();
            for v in 1..=n {
                let r = dsu.find(v);
                // count each component once, at its root
                if r == v {
                    let m = edge_count.get(&r).copied().unwrap_or(0);
                    term *= Rat::from_int(m as i64 + 1);
                }
            }
            *acc += term;
            return;
        }
        let need = k - chosen.len();
        for idx in start..edges.len() {
            if edges.len() - idx < need {
                break;
            }
            let mut dsu = Dsu::new(n);
            let mut acyclic = true;
            for &c in chosen.iter() {
                acyclic &= dsu.find(edges[c].0) != dsu.find(edges[c].1);
                dsu.add(edges[c].0, edges[c].1);
            }
            if acyclic && dsu.find(edges[idx].0) != dsu.find(edges[idx].1) {
                chosen.push(idx);
                rec(n, edges, k, idx + 1, chosen, acc);
                chosen.pop();
            }
        }
    }
    let mut acc = Rat::zero();
    rec(n, edges, k, 0, &mut Vec::new(), &mut acc);
    acc
}

/// Weights of the two-layer D_n setup: every pair p < q may carry a minus
/// edge (transport 1) and a plus edge (transport -1).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubledWeights {
    pub n: usize,
    /// (p, q, c_minus, c_plus) with p < q; absent pairs mean both zero.
    pub pairs: Vec<(usize, usize, Rat, Rat)>,
}

impl DoubledWeights {
    pub fn multi_edges(&self) -> Vec<MultiEdge> {
        let mut out = Vec::new();
        for (p, q, cm, cp) in &self.pairs {
            if !cm.is_zero() {
                out.push(MultiEdge {
                    u: *p,
                    v: *q,
                    phi: Rat::one(),
                    c: cm.clone(),
                });
            }
            if !cp.is_zero() {
                out.push(MultiEdge {
                    u: *p,
                    v: *q,
                    phi: -Rat::one(),
                    c: cp.clone(),
                });
            }
        }
        out
    }

    /// The operator sum c^-(1 - sigma_pq) + c^+(1 - tau_pq) where sigma
    /// swaps coordinates p,q and tau swaps them with a sign flip.
    pub fn operator(&self) -> Matrix {
        let mut m = Matrix::zero(self.n, self.n);
        for (p, q, cm, cp) in &self.pairs {
            let (i, j) = (p - 1, q - 1);
            m[(i, i)] += cm + cp;
            m[(j, j)] += cm + cp;
            m[(i, j)] -= cm;
            m[(j, i)] -= cm;
            m[(i, j)] += cp;
            m[(j, i)] += cp;
        }
        m
    }

    /// Mixed forest sum over the doubled edges. Every cycle holonomy is
    /// (-1)^{number of plus edges}, so odd-plus cycles pick up the factor
    /// (1-w)(1-1/w) = 4 and even-plus cycles drop out.
    pub fn mttd_mu(&self, k: usize) -> Rat {
        mixed_forest_mu(self.n, &self.multi_edges(), k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{char_poly, principal_minor_sum};
    use crate::rank1::assemble;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn sample_bundle() -> LineBundle {
        LineBundle::new(
            4,
            vec![
                BundleEdge { u: 1, v: 2, phi: r(2, 1), c: r(1, 1) },
                BundleEdge { u: 1, v: 3, phi: r(1, 2), c: r(3, 1) },
                BundleEdge { u: 2, v: 3, phi: r(-1, 1), c: r(1, 2) },
                BundleEdge { u: 2, v: 4, phi: r(3, 1), c: r(2, 1) },
                BundleEdge { u: 3, v: 4, phi: r(1, 3), c: r(-1, 1) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_input() {
        assert!(LineBundle::new(2, vec![BundleEdge { u: 2, v: 1, phi: r(1, 1), c: r(1, 1) }]).is_err());
        assert!(LineBundle::new(
            2,
            vec![
                BundleEdge { u: 1, v: 2, phi: r(1, 1), c: r(1, 1) },
                BundleEdge { u: 1, v: 2, phi: r(2, 1), c: r(1, 1) },
            ]
        )
        .is_err());
        assert!(LineBundle::new(2, vec![BundleEdge { u: 1, v: 2, phi: r(0, 1), c: r(1, 1) }]).is_err());
    }

    #[test]
    fn phi_is_inverted_backwards() {
        let b = sample_bundle();
        assert_eq!(b.phi(1, 2).unwrap(), r(2, 1));
        assert_eq!(b.phi(2, 1).unwrap(), r(1, 2));
        assert!(b.phi(1, 4).is_none());
    }

    #[test]
    fn holonomy_of_triangle() {
        let b = sample_bundle();
        // 1 -> 2 -> 3 -> 1: 2 * (-1) * (1/(1/2)) = -4
        assert_eq!(b.holonomy(&[1, 2, 3]).unwrap(), r(-4, 1));
        // reversed orientation inverts it
        assert_eq!(b.holonomy(&[1, 3, 2]).unwrap(), r(-1, 4));
    }

    #[test]
    fn laplacian_matches_rank_one_assembly() {
        let b = sample_bundle();
        let (sys, p) = b.to_rank_one_system().unwrap();
        assert_eq!(b.laplacian(), assemble(&sys, &p).unwrap());
    }

    #[test]
    fn two_vertex_laplacian_entries() {
        let b = LineBundle::new(
            2,
            vec![BundleEdge { u: 1, v: 2, phi: r(1, 1), c: r(5, 1) }],
        )
        .unwrap();
        let m = b.laplacian();
        assert_eq!(m[(0, 0)], r(5, 1));
        assert_eq!(m[(0, 1)], r(-5, 1));
        assert_eq!(m[(1, 0)], r(-5, 1));
        assert_eq!(m[(1, 1)], r(5, 1));
    }

    #[test]
    fn mixed_forest_census_on_triangle() {
        let edges: Vec<MultiEdge> = [(1, 2), (1, 3), (2, 3)]
            .iter()
            .map(|&(u, v)| MultiEdge { u, v, phi: Rat::one(), c: Rat::one() })
            .collect();
        assert_eq!(enumerate_mixed_forests(3, &edges, 0).len(), 1);
        assert_eq!(enumerate_mixed_forests(3, &edges, 1).len(), 3);
        assert_eq!(enumerate_mixed_forests(3, &edges, 2).len(), 3);
        // all three edges: the triangle itself, one cycle component
        assert_eq!(enumerate_mixed_forests(3, &edges, 3).len(), 1);
        let comps = forest_components(3, &edges, &enumerate_mixed_forests(3, &edges, 3)[0]);
        assert_eq!(comps.len(), 1);
        assert!(comps[0].cycle.is_some());
    }

    #[test]
    fn union_find_blocks_second_cycle() {
        // two triangles sharing nothing, plus a chord making a theta graph
        let edges: Vec<MultiEdge> = [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4)]
            .iter()
            .map(|&(u, v)| MultiEdge { u, v, phi: Rat::one(), c: Rat::one() })
            .collect();
        // all 5 edges would give a component with 4 vertices and 5 edges
        assert_eq!(enumerate_mixed_forests(4, &edges, 5).len(), 0);
    }

    #[test]
    fn forman_matches_charpoly_oracle() {
        let b = sample_bundle();
        let m = b.laplacian();
        for k in 0..=4 {
            assert_eq!(
                b.forman_mu(k),
                principal_minor_sum(&m, k).unwrap(),
                "k = {k}"
            );
        }
    }

    #[test]
    fn forman_matches_doomb_route() {
        let b = sample_bundle();
        let (sys, p) = b.to_rank_one_system().unwrap();
        for k in 0..=4 {
            assert_eq!(
                b.forman_mu(k),
                crate::doomb::mu_combinatorial(&sys, &p, k).unwrap(),
                "k = {k}"
            );
        }
    }

    #[test]
    fn unit_holonomy_cycle_drops_out() {
        // triangle with trivial transport: only genuine forests survive
        let b = LineBundle::new(
            3,
            vec![
                BundleEdge { u: 1, v: 2, phi: r(1, 1), c: r(1, 1) },
                BundleEdge { u: 1, v: 3, phi: r(1, 1), c: r(2, 1) },
                BundleEdge { u: 2, v: 3, phi: r(1, 1), c: r(3, 1) },
            ],
        )
        .unwrap();
        assert_eq!(b.forman_mu(3), Rat::zero());
        let det = crate::exact::det(&b.laplacian()).unwrap();
        assert!(det.is_zero());
    }

    #[test]
    fn mtt_matches_forman_at_phi_one() {
        let edges = vec![
            (1, 2, r(1, 1)),
            (1, 3, r(2, 1)),
            (2, 3, r(3, 1)),
            (2, 4, r(1, 2)),
            (3, 4, r(5, 1)),
        ];
        let b = LineBundle::new(
            4,
            edges
                .iter()
                .map(|&(u, v, ref c)| BundleEdge { u, v, phi: r(1, 1), c: c.clone() })
                .collect(),
        )
        .unwrap();
        for k in 0..=4 {
            assert_eq!(mtt_mu(4, &edges, k), b.forman_mu(k), "k = {k}");
        }
    }

    #[test]
    fn mtt_matches_charpoly_oracle() {
        let edges = vec![(1, 2, r(2, 1)), (1, 3, r(1, 3)), (2, 3, r(1, 1))];
        let b = LineBundle::new(
            3,
            edges
                .iter()
                .map(|&(u, v, ref c)| BundleEdge { u, v, phi: r(1, 1), c: c.clone() })
                .collect(),
        )
        .unwrap();
        let cp = char_poly(&b.laplacian()).unwrap();
        for k in 0..=3 {
            let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
            assert_eq!(mtt_mu(3, &edges, k), sign * cp.coeff(3 - k), "k = {k}");
        }
    }

    #[test]
    fn mttd_two_vertices_pure() {
        // n = 2, both layers present: det M = 4 c^- c^+
        let d = DoubledWeights {
            n: 2,
            pairs: vec![(1, 2, r(3, 1), r(5, 1))],
        };
        let m = d.operator();
        assert_eq!(crate::exact::det(&m).unwrap(), r(60, 1));
        assert_eq!(d.mttd_mu(2), r(60, 1));
    }

    #[test]
    fn mttd_matches_charpoly_oracle() {
        let d = DoubledWeights {
            n: 3,
            pairs: vec![
                (1, 2, r(1, 1), r(2, 1)),
                (1, 3, r(1, 2), r(0, 1)),
                (2, 3, r(3, 1), r(-1, 1)),
            ],
        };
        let m = d.operator();
        for k in 0..=3 {
            assert_eq!(d.mttd_mu(k), principal_minor_sum(&m, k).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn mttd_even_plus_cycles_drop_out() {
        // only minus edges: holonomies are all 1, so no cycles survive and
        // the sum reduces to the plain forest sum
        let d = DoubledWeights {
            n: 3,
            pairs: vec![
                (1, 2, r(1, 1), r(0, 1)),
                (1, 3, r(2, 1), r(0, 1)),
                (2, 3, r(3, 1), r(0, 1)),
            ],
        };
        assert_eq!(d.mttd_mu(3), Rat::zero());
        let edges = vec![(1, 2, r(1, 1)), (1, 3, r(2, 1)), (2, 3, r(3, 1))];
        for k in 0..=2 {
            assert_eq!(d.mttd_mu(k), mtt_mu(3, &edges, k));
        }
    }
}
