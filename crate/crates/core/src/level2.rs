//! The level-2 Laplacian of a line bundle: the antisymmetrized quadratic
//! polynomial over the pair alphabet, the explicit matrix, the polyhedral
//! reading of pair-alphabet DOOMBs, and the mixed-forest style expansion
//! of the characteristic polynomial coefficients.

use crate::bundle::LineBundle;
use crate::doomb::{doomb_weight, for_each_doomb, weight_table, Doomb};
use crate::exact::{det, dot, ExactError, Matrix, Rat, Vector};
use crate::ncpoly::{pair_rank, pair_unrank, NcError, NcPoly};
use crate::rank1::{Rank1Error, RankOneSystem};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Level2Error {
    #[error("skew symmetry violated: c({i},{j},{k}) != -c({i},{k},{j})")]
    SkewViolation { i: usize, j: usize, k: usize },
    #[error("triple ({0},{1},{2}) out of range or degenerate")]
    BadTriple(usize, usize, usize),
    #[error("transport phi({0},{1}) required but the bundle has no such edge")]
    MissingPhi(usize, usize),
    #[error("DOOMB edge joins pairs {0:?} and {1:?} sharing {2} indices, not one")]
    BadPairEdge((usize, usize), (usize, usize), usize),
    #[error("root {root} does not belong to its tree component {component:?}")]
    BadRoot { root: usize, component: Vec<usize> },
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Rank1(#[from] Rank1Error),
    #[error(transparent)]
    Nc(#[from] NcError),
}

/// Coefficients c_ijk with c_ijk = -c_ikj; stored once per unordered
/// {j,k} under a canonical sign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkewTriple {
    pub n: usize,
    entries: BTreeMap<(usize, usize, usize), Rat>,
}

impl SkewTriple {
    pub fn new(n: usize, values: Vec<(usize, usize, usize, Rat)>) -> Result<Self, Level2Error> {
        let mut entries: BTreeMap<(usize, usize, usize), Rat> = BTreeMap::new();
        for (i, j, k, val) in values {
            if i == 0 || j == 0 || k == 0 || i > n || j > n || k > n || j == k || i == j || i == k
            {
                return Err(Level2Error::BadTriple(i, j, k));
            }
            let (key, canon) = if j < k {
                ((i, j, k), val)
            } else {
                ((i, k, j), -val)
            };
            match entries.get(&key) {
                None => {
                    entries.insert(key, canon);
                }
                Some(existing) if *existing == canon => {}
                Some(_) => {
                    return Err(Level2Error::SkewViolation { i, j, k });
                }
            }
        }
        entries.retain(|_, v| !v.is_zero());
        Ok(SkewTriple { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        SkewTriple {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> Rat {
        if j == k {
            return Rat::zero();
        }
        let (key, sign) = if j < k { ((i, j, k), 1) } else { ((i, k, j), -1) };
        match self.entries.get(&key) {
            Some(v) if sign > 0 => v.clone(),
            Some(v) => -v,
            None => Rat::zero(),
        }
    }

    /// w_ijk = c_ijk + c_jki + c_kij, totally skew-symmetric.
    pub fn w(&self, i: usize, j: usize, k: usize) -> Rat {
        self.c(i, j, k) + self.c(j, k, i) + self.c(k, i, j)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

fn phi_or_err(b: &LineBundle, i: usize, j: usize) -> Result<Rat, Level2Error> {
    b.phi(i, j).ok_or(Level2Error::MissingPhi(i, j))
}

/// The antisymmetrized quadratic polynomial: sum over i and ordered pairs
/// (j,k) of c_ijk x_{ij} x_{ik}, words on the pair alphabet.
pub fn level2_poly(c: &SkewTriple) -> Result<NcPoly, Level2Error> {
    let n = c.n;
    let count = n * (n - 1) / 2;
    let mut p = NcPoly::zero(count);
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                if j == k || i == j || i == k {
                    continue;
                }
                let coeff = c.c(i, j, k);
                if coeff.is_zero() {
                    continue;
                }
                let a = pair_rank(i.min(j), i.max(j), n);
                let b = pair_rank(i.min(k), i.max(k), n);
                p.add_term(coeff, vec![a, b])?;
            }
        }
    }
    Ok(p)
}

/// The rank-1 pair family of the bundle: for every edge (i,j) with i < j,
/// e = u_i - phi_ij u_j and alpha = u_i - phi_ji u_j, indexed by pair
/// rank; missing pairs get zero vectors. Errors if the polynomial touches
/// a pair the bundle lacks.
pub fn level2_pair_system(
    c: &SkewTriple,
    b: &LineBundle,
) -> Result<(RankOneSystem, NcPoly), Level2Error> {
    level2_pair_system_flipped(c, b, &BTreeSet::new())
}

/// Same pair family with the bracket of every pair rank in `flips`
/// reversed: [pq] becomes [qp], scaling e by -phi_pq and alpha by
/// -phi_qp. All downstream totals are invariant under any flip set.
pub fn level2_pair_system_flipped(
    c: &SkewTriple,
    b: &LineBundle,
    flips: &BTreeSet<usize>,
) -> Result<(RankOneSystem, NcPoly), Level2Error> {
    let n = c.n;
    let count = n * (n - 1) / 2;
    let p = level2_poly(c)?;
    let mut e_fam = vec![vec![Rat::zero(); n]; count];
    let mut a_fam = vec![vec![Rat::zero(); n]; count];
    let mut present = vec![false; count + 1];
    for edge in &b.edges {
        let idx = pair_rank(edge.u, edge.v, n);
        present[idx] = true;
        let mut e = crate::bundle::pair_vector(n, edge.u, edge.v, &edge.phi);
        let mut a = crate::bundle::pair_vector(n, edge.u, edge.v, &edge.phi.recip());
        if flips.contains(&idx) {
            let se = -&edge.phi;
            let sa = -edge.phi.recip();
            for x in e.iter_mut() {
                *x *= &se;
            }
            for x in a.iter_mut() {
                *x *= &sa;
            }
        }
        e_fam[idx - 1] = e;
        a_fam[idx - 1] = a;
    }
    for (word, _) in p.terms() {
        for &letter in &word.0 {
            if !present[letter] {
                let (u, v) = pair_unrank(letter, n);
                return Err(Level2Error::MissingPhi(u, v));
            }
        }
    }
    Ok((RankOneSystem::new(n, e_fam, a_fam)?, p))
}

/// The explicit matrix of the level-2 Laplacian: the u_j coordinate of
/// M(u_i) is
/// phi_ij sum_{k != i,j} (c_ijk + c_jki) + sum_{k != i,j} c_kij phi_ik phi_kj,
/// so that expression lands in row j, column i.
pub fn level2_laplacian(c: &SkewTriple, b: &LineBundle) -> Result<Matrix, Level2Error> {
    let n = c.n;
    let mut m = Matrix::zero(n, n);
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let mut entry = Rat::zero();
            for k in 1..=n {
                if k == i || k == j {
                    continue;
                }
                let direct = c.c(i, j, k) + c.c(j, k, i);
                if !direct.is_zero() {
                    entry += phi_or_err(b, i, j)? * direct;
                }
                let via = c.c(k, i, j);
                if !via.is_zero() {
                    entry += via * phi_or_err(b, i, k)? * phi_or_err(b, k, j)?;
                }
            }
            m[(j - 1, i - 1)] = entry;
        }
    }
    Ok(m)
}

/// One triangular face: apex i with internal sides {i,j} (tail, first)
/// and {i,k} (head, second) and boundary side {j,k}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub apex: usize,
    pub tail_side: (usize, usize),
    pub head_side: (usize, usize),
    pub boundary: (usize, usize),
}

/// A component of the polyhedron: a run of faces following one DOOMB
/// component over the pair alphabet.
#[derive(Clone, Debug, Serialize)]
pub struct PolyComponent {
    pub faces: Vec<Face>,
    pub is_cycle: bool,
    /// marked boundary sides of the two exceptional faces of a chain
    pub initial_side: Option<(usize, usize)>,
    pub terminal_side: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Polyhedron2 {
    pub components: Vec<PolyComponent>,
}

fn sorted_pair(p: (usize, usize)) -> (usize, usize) {
    if p.0 < p.1 {
        p
    } else {
        (p.1, p.0)
    }
}

fn face_of(a: usize, b: usize, n: usize) -> Result<Face, Level2Error> {
    let pa = pair_unrank(a, n);
    let pb = pair_unrank(b, n);
    let sa: BTreeSet<usize> = [pa.0, pa.1].into();
    let sb: BTreeSet<usize> = [pb.0, pb.1].into();
    let common: Vec<usize> = sa.intersection(&sb).copied().collect();
    if common.len() != 1 {
        return Err(Level2Error::BadPairEdge(pa, pb, common.len()));
    }
    let apex = common[0];
    let j = if pa.0 == apex { pa.1 } else { pa.0 };
    let k = if pb.0 == apex { pb.1 } else { pb.0 };
    Ok(Face {
        apex,
        tail_side: pa,
        head_side: pb,
        boundary: sorted_pair((j, k)),
    })
}

/// Reads a DOOMB over the pair alphabet as a 2-polyhedron, one triangle
/// per edge.
pub fn doomb_to_polyhedron(g: &Doomb, n: usize) -> Result<Polyhedron2, Level2Error> {
    let mut components = Vec::new();
    for (walk, is_cycle) in g.components() {
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for &(t, h) in &g.edges {
            next.insert(t, h);
        }
        let mut faces = Vec::new();
        let steps = if is_cycle { walk.len() } else { walk.len() - 1 };
        for idx in 0..steps {
            let a = walk[idx];
            let b = walk[(idx + 1) % walk.len()];
            faces.push(face_of(a, b, n)?);
        }
        if faces.is_empty() {
            continue; // isolated pair vertex, no face
        }
        let (initial_side, terminal_side) = if is_cycle {
            (None, None)
        } else {
            (
                Some(pair_unrank(*walk.first().unwrap(), n)),
                Some(pair_unrank(*walk.last().unwrap(), n)),
            )
        };
        components.push(PolyComponent {
            faces,
            is_cycle,
            initial_side,
            terminal_side,
        });
    }
    Ok(Polyhedron2 { components })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceKind {
    NodalAnnulus,
    NodalMoebius,
    ConedDisk,
    ChainNodalDisk,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentClass {
    pub kind: SurfaceKind,
    pub euler_characteristic: i64,
}

fn internal_sides(comp: &PolyComponent) -> Vec<(usize, usize)> {
    // pair vertices in walk order: tails then the last head for chains
    let mut sides: Vec<(usize, usize)> = comp.faces.iter().map(|f| f.tail_side).collect();
    if !comp.is_cycle {
        sides.push(comp.faces.last().unwrap().head_side);
    }
    sides
}

/// Number of maximal runs of consecutive sides (cyclically for cycle
/// components) containing the index.
fn solid_arcs(sides: &[(usize, usize)], index: usize, cyclic: bool) -> usize {
    let hit: Vec<bool> = sides.iter().map(|&(a, b)| a == index || b == index).collect();
    let m = hit.len();
    let mut arcs = 0;
    for t in 0..m {
        let prev = if t == 0 {
            if cyclic {
                hit[m - 1]
            } else {
                false
            }
        } else {
            hit[t - 1]
        };
        if hit[t] && !prev {
            arcs += 1;
        }
    }
    if cyclic && arcs == 0 && hit.iter().all(|&h| h) {
        arcs = 1; // the whole cycle is one arc
    }
    arcs
}

/// Classifies one compatibly oriented component per the trichotomy:
/// coned disk, nodal annulus or Moebius band for cycles; nodal disk for
/// chains. The Euler characteristic is that of the normalized surface
/// (nodes pulled apart), counting one vertex per solid arc of each index.
pub fn classify_component(comp: &PolyComponent) -> ComponentClass {
    let sides = internal_sides(comp);
    let indices: BTreeSet<usize> = sides.iter().flat_map(|&(a, b)| [a, b]).collect();
    let m = comp.faces.len() as i64;
    if !comp.is_cycle {
        // chain: m faces, m+1 black sides, m red sides; normalized vertex
        // count is the arc count
        let arcs: i64 = indices
            .iter()
            .map(|&i| solid_arcs(&sides, i, false) as i64)
            .sum();
        return ComponentClass {
            kind: SurfaceKind::ChainNodalDisk,
            euler_characteristic: arcs - (2 * m + 1) + m,
        };
    }
    if let Some(&apex) = indices
        .iter()
        .find(|&&i| sides.iter().all(|&(a, b)| a == i || b == i))
    {
        let _ = apex;
        // every internal side carries the index: a smooth coned disk
        return ComponentClass {
            kind: SurfaceKind::ConedDisk,
            euler_characteristic: 1,
        };
    }
    let arcs: i64 = indices
        .iter()
        .map(|&i| solid_arcs(&sides, i, true) as i64)
        .sum();
    let chi = arcs - 2 * m + m;
    // flip parity along the cycle: consecutive faces share a side s; the
    // strip twists when the shared index changes
    let mut flips = 0usize;
    let len = sides.len();
    for t in 0..len {
        let x = sides[t];
        let s = sides[(t + 1) % len];
        let y = sides[(t + 2) % len];
        let common_in = common_index(x, s);
        let common_out = common_index(s, y);
        if common_in != common_out {
            flips += 1;
        }
    }
    let kind = if flips % 2 == 1 {
        SurfaceKind::NodalMoebius
    } else {
        SurfaceKind::NodalAnnulus
    };
    ComponentClass {
        kind,
        euler_characteristic: chi,
    }
}

fn common_index(a: (usize, usize), b: (usize, usize)) -> usize {
    if a.0 == b.0 || a.0 == b.1 {
        a.0
    } else {
        a.1
    }
}

/// Counts the compatible ways to order the internal sides of all faces,
/// forgetting the orientation the DOOMB induced. Exceptional chain faces
/// have a single internal side and no freedom.
pub fn orientation_count(comp: &PolyComponent) -> usize {
    let sides = internal_sides(comp);
    let m = comp.faces.len();
    // face t has internal sides sides[t] and sides[t+1] in the cycle case;
    // in the chain case face 0 lacks sides[0] and face m-1 lacks sides[m]
    // as internal sides only when they are the marked boundary sides
    let face_sides: Vec<Vec<usize>> = (0..m)
        .map(|t| {
            if comp.is_cycle {
                vec![t, (t + 1) % sides.len()]
            } else {
                let mut v = Vec::new();
                if t > 0 {
                    v.push(t);
                }
                if t < m - 1 {
                    v.push(t + 1);
                }
                v
            }
        })
        .collect();
    let free: Vec<usize> = (0..m).filter(|&t| face_sides[t].len() == 2).collect();
    let mut count = 0usize;
    for mask in 0u64..(1u64 << free.len()) {
        // orientation of face t: which of its two internal sides is first
        let mut first_of: Vec<Option<usize>> = vec![None; m];
        for (pos, &t) in free.iter().enumerate() {
            let pick = if mask >> pos & 1 == 0 { 0 } else { 1 };
            first_of[t] = Some(face_sides[t][pick]);
        }
        // exceptional faces: initial face's only internal side is second
        // ("the initial side, the internal side, ..." puts it after the
        // marked side), terminal face's internal side is first
        let mut ok = true;
        for s in 0..sides.len() {
            // faces sharing internal side s
            let sharers: Vec<usize> = (0..m).filter(|&t| face_sides[t].contains(&s)).collect();
            if sharers.len() != 2 {
                continue;
            }
            let s_first = |t: usize| -> bool {
                match first_of[t] {
                    Some(f) => f == s,
                    // chain initial face (t=0): internal side ordered second;
                    // terminal face: internal side ordered first
                    None => t == m - 1,
                }
            };
            if s_first(sharers[0]) == s_first(sharers[1]) {
                ok = false;
                break;
            }
        }
        if ok {
            count += 1;
        }
    }
    count
}

/// Which vertex acts as root inside every tree component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootChoice {
    Smallest,
    Largest,
    /// explicit root per tree component, keyed by the component's
    /// smallest vertex; components without an entry fall back to Smallest
    Explicit(BTreeMap<usize, usize>),
}

impl RootChoice {
    fn resolve(&self, component: &[usize]) -> Result<usize, Level2Error> {
        match self {
            RootChoice::Smallest => Ok(component[0]),
            RootChoice::Largest => Ok(*component.last().unwrap()),
            RootChoice::Explicit(map) => match map.get(&component[0]) {
                None => Ok(component[0]),
                Some(&r) if component.contains(&r) => Ok(r),
                Some(&r) => Err(Level2Error::BadRoot {
                    root: r,
                    component: component.to_vec(),
                }),
            },
        }
    }
}

/// Undirected graph on 1..=n built from a set of pairs; every component
/// must be a tree or carry one cycle for the expansion to contribute.
struct PairGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

enum PairGraphShape {
    NotMixedForest,
    Mixed {
        /// tree components as sorted vertex lists
        trees: Vec<Vec<usize>>,
        /// cycle components as edge lists
        cycles: Vec<Vec<(usize, usize)>>,
    },
}

impl PairGraph {
    fn shape(&self) -> PairGraphShape {
        let n = self.n;
        let mut parent: Vec<usize> = (0..=n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        let mut extra = vec![0usize; n + 1]; // cycles per component root
        for &(u, v) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                extra[ru] += 1;
            } else {
                let c = extra[ru] + extra[rv];
                parent[ru] = rv;
                extra[rv] = c;
            }
        }
        let mut comp_vertices: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 1..=n {
            let r = find(&mut parent, v);
            comp_vertices.entry(r).or_default().push(v);
        }
        let mut trees = Vec::new();
        let mut cycles = Vec::new();
        for (root, vertices) in comp_vertices {
            match extra[root] {
                0 => trees.push(vertices),
                1 => {
                    let vs: BTreeSet<usize> = vertices.into_iter().collect();
                    cycles.push(
                        self.edges
                            .iter()
                            .copied()
                            .filter(|&(u, _)| vs.contains(&u))
                            .collect(),
                    );
                }
                _ => return PairGraphShape::NotMixedForest,
            }
        }
        PairGraphShape::Mixed { trees, cycles }
    }
}

fn cycle_holonomy_of_component(b: &LineBundle, comp_edges: &[(usize, usize)]) -> Option<Rat> {
    let mes: Vec<crate::bundle::MultiEdge> = comp_edges
        .iter()
        .map(|&(u, v)| {
            Some(crate::bundle::MultiEdge {
                u,
                v,
                phi: b.phi(u, v)?,
                c: Rat::one(),
            })
        })
        .collect::<Option<_>>()?;
    // strip to the cycle and transport around it
    let mf = crate::bundle::MixedForest {
        edge_indices: (0..mes.len()).collect(),
    };
    let n = mes.iter().flat_map(|e| [e.u, e.v]).max().unwrap();
    for comp in crate::bundle::forest_components(n, &mes, &mf) {
        if let Some(cycle) = comp.cycle {
            return Some(crate::bundle::cycle_holonomy(&mes, &cycle));
        }
    }
    None
}

/// Complement vector of a tree of pairs: the unique (up to scale) vector
/// orthogonal to all alpha vectors (sign = +1) or e vectors (sign = -1)
/// of its edges, normalized to 1 at the root, zero off the component.
fn tree_complement(
    b: &LineBundle,
    n: usize,
    vertices: &[usize],
    tree_edges: &[(usize, usize)],
    root: usize,
    alpha_side: bool,
) -> Result<Vector, Level2Error> {
    let mut vec = vec![Rat::zero(); n];
    vec[root - 1] = Rat::one();
    let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &(u, v) in tree_edges {
        adj.entry(u).or_default().push((v, 0));
        adj.entry(v).or_default().push((u, 0));
    }
    let mut seen: BTreeSet<usize> = [root].into();
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(p) = queue.pop_front() {
        if let Some(nbrs) = adj.get(&p) {
            for &(q, _) in nbrs {
                if seen.insert(q) {
                    // alpha_{pq} = u_p - phi_qp u_q needs x_q = phi_pq x_p;
                    // e_{pq} = u_p - phi_pq u_q needs x_q = phi_qp x_p
                    let step = if alpha_side {
                        phi_or_err(b, p, q)?
                    } else {
                        phi_or_err(b, q, p)?
                    };
                    vec[q - 1] = &vec[p - 1] * step;
                    queue.push_back(q);
                }
            }
        }
    }
    debug_assert!(vertices.iter().all(|v| seen.contains(v)));
    Ok(vec)
}

fn alpha_of_pair(b: &LineBundle, n: usize, p: usize, q: usize) -> Result<Vector, Level2Error> {
    // pair is stored sorted; alpha = u_p - phi_qp u_q
    Ok(crate::bundle::pair_vector(n, p, q, &phi_or_err(b, q, p)?))
}

fn e_of_pair(b: &LineBundle, n: usize, p: usize, q: usize) -> Result<Vector, Level2Error> {
    Ok(crate::bundle::pair_vector(n, p, q, &phi_or_err(b, p, q)?))
}

/// Per-polyhedron audit record for one DOOMB contributing to mu_k.
#[derive(Clone, Debug, Serialize)]
pub struct PolyContribution {
    pub edges: Vec<(usize, usize)>,
    pub weight: Rat,
    pub gram_det: Rat,
    pub contribution: Rat,
    pub classes: Vec<ComponentClass>,
}

/// The mixed-forest style right-hand side for the level-2 Laplacian: sum
/// over pair-alphabet DOOMBs of the face-weight product times the edge
/// Gram determinant, the latter evaluated through tree-complement
/// completions instead of the raw k x k pairing matrix. The value is
/// root-choice independent.
pub fn level2_mu_rhs(
    c: &SkewTriple,
    b: &LineBundle,
    k: usize,
    roots: &RootChoice,
) -> Result<Rat, Level2Error> {
    level2_mu_rhs_flipped(c, b, k, roots, &BTreeSet::new())
}

/// The same sum evaluated with the brackets of the given pair ranks
/// reversed everywhere; the total is unchanged for any flip set.
pub fn level2_mu_rhs_flipped(
    c: &SkewTriple,
    b: &LineBundle,
    k: usize,
    roots: &RootChoice,
    flips: &BTreeSet<usize>,
) -> Result<Rat, Level2Error> {
    Ok(level2_contributions_flipped(c, b, k, roots, flips)?
        .into_iter()
        .map(|pc| pc.contribution)
        .sum())
}

pub fn level2_contributions(
    c: &SkewTriple,
    b: &LineBundle,
    k: usize,
    roots: &RootChoice,
) -> Result<Vec<PolyContribution>, Level2Error> {
    level2_contributions_flipped(c, b, k, roots, &BTreeSet::new())
}

pub fn level2_contributions_flipped(
    c: &SkewTriple,
    b: &LineBundle,
    k: usize,
    roots: &RootChoice,
    flips: &BTreeSet<usize>,
) -> Result<Vec<PolyContribution>, Level2Error> {
    let n = c.n;
    if k == 0 {
        return Ok(vec![PolyContribution {
            edges: vec![],
            weight: Rat::one(),
            gram_det: Rat::one(),
            contribution: Rat::one(),
            classes: vec![],
        }]);
    }
    let (sys, p) = level2_pair_system_flipped(c, b, flips)?;
    let w = weight_table(&sys, &p)?;
    let count = n * (n - 1) / 2;
    let mut doombs: Vec<Doomb> = Vec::new();
    for_each_doomb(count, k, &|a, bb| !w.get(a, bb).is_zero(), &mut |g| {
        doombs.push(g.clone())
    });
    let mut out = Vec::new();
    for g in doombs {
        let weight = doomb_weight(&g, &w);
        if weight.is_zero() {
            continue;
        }
        let gram_det = level2_gram_det(b, n, &g, roots, flips)?;
        if gram_det.is_zero() {
            continue;
        }
        let classes = doomb_to_polyhedron(&g, n)?
            .components
            .iter()
            .map(classify_component)
            .collect();
        let contribution = &weight * &gram_det;
        out.push(PolyContribution {
            edges: g.edges.clone(),
            weight,
            gram_det,
            contribution,
            classes,
        });
    }
    Ok(out)
}

/// det of the pairing matrix (alpha at tails against e at heads) of a
/// pair-alphabet DOOMB, computed by completing both edge families with
/// the complement vectors of their tree components:
///   det G(A,E) = det [A; F] * det [E; B] / det G(B,F),
/// where B and F span the orthogonal complements of the alpha and e
/// families. Zero whenever either family's pair graph fails to be a
/// mixed forest, a cycle has trivial holonomy, or G(B,F) degenerates.
fn level2_gram_det(
    b: &LineBundle,
    n: usize,
    g: &Doomb,
    roots: &RootChoice,
    flips: &BTreeSet<usize>,
) -> Result<Rat, Level2Error> {
    let tail_pairs: Vec<(usize, usize)> =
        g.edges.iter().map(|&(t, _)| pair_unrank(t, n)).collect();
    let head_pairs: Vec<(usize, usize)> =
        g.edges.iter().map(|&(_, h)| pair_unrank(h, n)).collect();
    let tails = PairGraph { n, edges: tail_pairs.clone() };
    let heads = PairGraph { n, edges: head_pairs.clone() };
    let (t_trees, t_cycles) = match tails.shape() {
        PairGraphShape::NotMixedForest => return Ok(Rat::zero()),
        PairGraphShape::Mixed { trees, cycles } => (trees, cycles),
    };
    let (h_trees, h_cycles) = match heads.shape() {
        PairGraphShape::NotMixedForest => return Ok(Rat::zero()),
        PairGraphShape::Mixed { trees, cycles } => (trees, cycles),
    };
    for comp in t_cycles.iter().chain(h_cycles.iter()) {
        match cycle_holonomy_of_component(b, comp) {
            None => return Err(first_missing_phi(b, comp)),
            Some(w) if w.is_one() => return Ok(Rat::zero()),
            Some(_) => {}
        }
    }
    // complement vectors: b_i kills the alpha family of its tail tree,
    // f_j kills the e family of its head tree
    let mut b_vecs = Vec::with_capacity(t_trees.len());
    for comp in &t_trees {
        let edges: Vec<(usize, usize)> = tail_pairs
            .iter()
            .copied()
            .filter(|&(u, _)| comp.contains(&u))
            .collect();
        let root = roots.resolve(comp)?;
        b_vecs.push(tree_complement(b, n, comp, &edges, root, true)?);
    }
    let mut f_vecs = Vec::with_capacity(h_trees.len());
    for comp in &h_trees {
        let edges: Vec<(usize, usize)> = head_pairs
            .iter()
            .copied()
            .filter(|&(u, _)| comp.contains(&u))
            .collect();
        let root = roots.resolve(comp)?;
        f_vecs.push(tree_complement(b, n, comp, &edges, root, false)?);
    }
    debug_assert_eq!(b_vecs.len() + g.edge_count(), n);
    debug_assert_eq!(f_vecs.len() + g.edge_count(), n);
    // det [A; F]
    let mut rows_af: Vec<Vector> = Vec::with_capacity(n);
    for &(p, q) in &tail_pairs {
        let mut row = alpha_of_pair(b, n, p, q)?;
        if flips.contains(&pair_rank(p, q, n)) {
            let s = -phi_or_err(b, q, p)?;
            for x in row.iter_mut() {
                *x *= &s;
            }
        }
        rows_af.push(row);
    }
    rows_af.extend(f_vecs.iter().cloned());
    let det_af = det(&Matrix::from_rows(rows_af))?;
    // det [E; B]
    let mut rows_eb: Vec<Vector> = Vec::with_capacity(n);
    for &(p, q) in &head_pairs {
        let mut row = e_of_pair(b, n, p, q)?;
        if flips.contains(&pair_rank(p, q, n)) {
            let s = -phi_or_err(b, p, q)?;
            for x in row.iter_mut() {
                *x *= &s;
            }
        }
        rows_eb.push(row);
    }
    rows_eb.extend(b_vecs.iter().cloned());
    let det_eb = det(&Matrix::from_rows(rows_eb))?;
    // det G(B, F)
    let s = b_vecs.len();
    let gbf = Matrix::from_fn(s, s, |i, j| dot(&b_vecs[i], &f_vecs[j]));
    let det_bf = det(&gbf)?;
    if det_bf.is_zero() {
        return Ok(Rat::zero());
    }
    Ok(det_af * det_eb / det_bf)
}

fn first_missing_phi(b: &LineBundle, comp: &[(usize, usize)]) -> Level2Error {
    for &(u, v) in comp {
        if b.phi(u, v).is_none() {
            return Level2Error::MissingPhi(u, v);
        }
    }
    unreachable!("component had a missing transport")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::BundleEdge;
    use crate::doomb::mu_combinatorial;
    use crate::exact::principal_minor_sum;
    use crate::rank1::assemble;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn complete_bundle(n: usize, phis: &[((usize, usize), Rat)]) -> LineBundle {
        let mut edges = Vec::new();
        for u in 1..n {
            for v in u + 1..=n {
                let phi = phis
                    .iter()
                    .find(|((a, b), _)| (*a, *b) == (u, v))
                    .map(|(_, p)| p.clone())
                    .unwrap_or_else(Rat::one);
                edges.push(BundleEdge {
                    u,
                    v,
                    phi,
                    c: Rat::one(),
                });
            }
        }
        LineBundle::new(n, edges).unwrap()
    }

    fn sample3() -> (SkewTriple, LineBundle) {
        let c = SkewTriple::new(
            3,
            vec![
                (1, 2, 3, r(1, 1)),
                (2, 1, 3, r(1, 2)),
                (3, 1, 2, r(-2, 1)),
            ],
        )
        .unwrap();
        let b = complete_bundle(
            3,
            &[
                ((1, 2), r(2, 1)),
                ((1, 3), r(1, 3)),
                ((2, 3), r(-1, 2)),
            ],
        );
        (c, b)
    }

    fn sample4() -> (SkewTriple, LineBundle) {
        let c = SkewTriple::new(
            4,
            vec![
                (1, 2, 3, r(1, 1)),
                (2, 3, 4, r(-1, 2)),
                (3, 1, 4, r(2, 1)),
                (4, 1, 2, r(1, 3)),
                (1, 3, 4, r(1, 1)),
            ],
        )
        .unwrap();
        let b = complete_bundle(
            4,
            &[
                ((1, 2), r(2, 1)),
                ((1, 3), r(1, 2)),
                ((1, 4), r(3, 1)),
                ((2, 3), r(-1, 1)),
                ((2, 4), r(1, 3)),
                ((3, 4), r(-1, 2)),
            ],
        );
        (c, b)
    }

    #[test]
    fn skew_validation() {
        assert!(SkewTriple::new(3, vec![(1, 2, 2, r(1, 1))]).is_err());
        assert!(SkewTriple::new(
            3,
            vec![(1, 2, 3, r(1, 1)), (1, 3, 2, r(1, 1))]
        )
        .is_err());
        let c = SkewTriple::new(3, vec![(1, 2, 3, r(1, 1)), (1, 3, 2, r(-1, 1))]).unwrap();
        assert_eq!(c.c(1, 2, 3), r(1, 1));
        assert_eq!(c.c(1, 3, 2), r(-1, 1));
        assert_eq!(c.c(1, 2, 2), r(0, 1));
        assert_eq!(c.w(1, 2, 3), r(1, 1));
    }

    #[test]
    fn poly_structure_single_coefficient() {
        // n = 3, c_123 = 1: terms x_(12)x_(13) - x_(13)x_(12)
        let c = SkewTriple::new(3, vec![(1, 2, 3, r(1, 1))]).unwrap();
        let p = level2_poly(&c).unwrap();
        let a12 = pair_rank(1, 2, 3);
        let a13 = pair_rank(1, 3, 3);
        let terms: Vec<_> = p.terms().collect();
        assert_eq!(terms.len(), 2);
        for (word, coeff) in terms {
            if word.0 == vec![a12, a13] {
                assert_eq!(*coeff, r(1, 1));
            } else {
                assert_eq!(word.0, vec![a13, a12]);
                assert_eq!(*coeff, r(-1, 1));
            }
        }
    }

    #[test]
    fn laplacian_zero_for_zero_coefficients() {
        let (_, b) = sample3();
        let m = level2_laplacian(&SkewTriple::zero(3), &b).unwrap();
        assert!(m.is_zero());
    }

    #[test]
    fn laplacian_skew_at_trivial_transport() {
        let (c, _) = sample4();
        let b = complete_bundle(4, &[]);
        let m = level2_laplacian(&c, &b).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m[(i, j)], -&m[(j, i)]);
            }
        }
        // each off-diagonal entry collapses to a sum of the fully skew w's
        let mut expect = Matrix::zero(4, 4);
        for i in 1..=4usize {
            for j in 1..=4usize {
                if i == j {
                    continue;
                }
                let mut s = Rat::zero();
                for k in 1..=4usize {
                    if k != i && k != j {
                        s += c.w(i, j, k);
                    }
                }
                expect[(j - 1, i - 1)] = s;
            }
        }
        assert_eq!(m, expect);
    }

    #[test]
    fn laplacian_matches_rank_one_assembly() {
        for (c, b) in [sample3(), sample4()] {
            let (sys, p) = level2_pair_system(&c, &b).unwrap();
            assert_eq!(
                level2_laplacian(&c, &b).unwrap(),
                assemble(&sys, &p).unwrap()
            );
        }
    }

    #[test]
    fn loop_words_have_zero_weight() {
        let (c, b) = sample3();
        let (sys, p) = level2_pair_system(&c, &b).unwrap();
        let w = weight_table(&sys, &p).unwrap();
        for a in 1..=3 {
            assert!(w.get(a, a).is_zero(), "loop at pair {a}");
        }
    }

    #[test]
    fn face_construction() {
        // DOOMB edge (12) -> (13) over n=3
        let n = 3;
        let a = pair_rank(1, 2, n);
        let b = pair_rank(1, 3, n);
        let f = face_of(a, b, n).unwrap();
        assert_eq!(f.apex, 1);
        assert_eq!(f.tail_side, (1, 2));
        assert_eq!(f.head_side, (1, 3));
        assert_eq!(f.boundary, (2, 3));
        // disjoint pairs are rejected
        let n4 = 4;
        assert!(face_of(pair_rank(1, 2, n4), pair_rank(3, 4, n4), n4).is_err());
    }

    #[test]
    fn coned_disk_classification() {
        // cycle (12) -> (13) -> (12): all sides share index 1
        let n = 3;
        let g = Doomb::new(
            3,
            vec![
                (pair_rank(1, 2, n), pair_rank(1, 3, n)),
                (pair_rank(1, 3, n), pair_rank(1, 2, n)),
            ],
        )
        .unwrap();
        let h = doomb_to_polyhedron(&g, n).unwrap();
        assert_eq!(h.components.len(), 1);
        let class = classify_component(&h.components[0]);
        assert_eq!(class.kind, SurfaceKind::ConedDisk);
        assert_eq!(orientation_count(&h.components[0]), 2);
    }

    #[test]
    fn bristle_cycle_is_moebius() {
        // vertices a..f = 1..6; cycle of pairs
        // (ab) -> (bc) -> (ce) -> (cd) -> (bd) -> (ab)
        let n = 6;
        let pr = |x: usize, y: usize| pair_rank(x.min(y), x.max(y), n);
        let cycle = [
            (pr(1, 2), pr(2, 3)),
            (pr(2, 3), pr(3, 5)),
            (pr(3, 5), pr(3, 4)),
            (pr(3, 4), pr(2, 4)),
            (pr(2, 4), pr(1, 2)),
        ];
        let count = n * (n - 1) / 2;
        let g = Doomb::new(count, cycle.to_vec()).unwrap();
        let h = doomb_to_polyhedron(&g, n).unwrap();
        assert_eq!(h.components.len(), 1);
        let class = classify_component(&h.components[0]);
        assert_eq!(class.kind, SurfaceKind::NodalMoebius);
        assert_eq!(class.euler_characteristic, 0);
        assert_eq!(orientation_count(&h.components[0]), 2);
    }

    #[test]
    fn bristle_chain_is_nodal_disk() {
        // chain (ab) -> (bc) -> (cd) -> (ce) -> (ef)
        let n = 6;
        let pr = |x: usize, y: usize| pair_rank(x.min(y), x.max(y), n);
        let chain = [
            (pr(1, 2), pr(2, 3)),
            (pr(2, 3), pr(3, 4)),
            (pr(3, 4), pr(3, 5)),
            (pr(3, 5), pr(5, 6)),
        ];
        let count = n * (n - 1) / 2;
        let g = Doomb::new(count, chain.to_vec()).unwrap();
        let h = doomb_to_polyhedron(&g, n).unwrap();
        assert_eq!(h.components.len(), 1);
        let comp = &h.components[0];
        assert!(!comp.is_cycle);
        assert_eq!(comp.initial_side, Some((1, 2)));
        assert_eq!(comp.terminal_side, Some((5, 6)));
        let class = classify_component(comp);
        assert_eq!(class.kind, SurfaceKind::ChainNodalDisk);
        assert_eq!(orientation_count(comp), 1);
    }

    #[test]
    fn annulus_classification() {
        // 4-cycle (12) -> (23) -> (34) -> (14) -> (12): indices alternate,
        // zero flips parity -> annulus
        let n = 4;
        let pr = |x: usize, y: usize| pair_rank(x, y, n);
        let cycle = [
            (pr(1, 2), pr(2, 3)),
            (pr(2, 3), pr(3, 4)),
            (pr(3, 4), pr(1, 4)),
            (pr(1, 4), pr(1, 2)),
        ];
        let count = n * (n - 1) / 2;
        let g = Doomb::new(count, cycle.to_vec()).unwrap();
        let h = doomb_to_polyhedron(&g, n).unwrap();
        let class = classify_component(&h.components[0]);
        assert_eq!(class.kind, SurfaceKind::NodalAnnulus);
        assert_eq!(class.euler_characteristic, 0);
    }

    #[test]
    fn triple_equality_n3() {
        let (c, b) = sample3();
        let m = level2_laplacian(&c, &b).unwrap();
        let (sys, p) = level2_pair_system(&c, &b).unwrap();
        for k in 0..=3 {
            let oracle = principal_minor_sum(&m, k).unwrap();
            let comb = mu_combinatorial(&sys, &p, k).unwrap();
            let rhs = level2_mu_rhs(&c, &b, k, &RootChoice::Smallest).unwrap();
            assert_eq!(comb, oracle, "doomb route, k = {k}");
            assert_eq!(rhs, oracle, "polyhedral route, k = {k}");
        }
    }

    #[test]
    fn triple_equality_n4() {
        let (c, b) = sample4();
        let m = level2_laplacian(&c, &b).unwrap();
        let (sys, p) = level2_pair_system(&c, &b).unwrap();
        for k in 0..=4 {
            let oracle = principal_minor_sum(&m, k).unwrap();
            let comb = mu_combinatorial(&sys, &p, k).unwrap();
            let rhs = level2_mu_rhs(&c, &b, k, &RootChoice::Smallest).unwrap();
            assert_eq!(comb, oracle, "doomb route, k = {k}");
            assert_eq!(rhs, oracle, "polyhedral route, k = {k}");
        }
    }

    #[test]
    fn root_choice_invariance() {
        let (c, b) = sample4();
        for k in 1..=3 {
            let a = level2_mu_rhs(&c, &b, k, &RootChoice::Smallest).unwrap();
            let z = level2_mu_rhs(&c, &b, k, &RootChoice::Largest).unwrap();
            assert_eq!(a, z, "k = {k}");
        }
    }

    #[test]
    fn bracket_flip_invariance() {
        let (c, b) = sample4();
        let base: Vec<Rat> = (0..=3)
            .map(|k| level2_mu_rhs(&c, &b, k, &RootChoice::Smallest).unwrap())
            .collect();
        for flips in [
            BTreeSet::from([1]),
            BTreeSet::from([2, 5]),
            BTreeSet::from([1, 2, 3, 4, 5, 6]),
        ] {
            for k in 0..=3usize {
                let v =
                    level2_mu_rhs_flipped(&c, &b, k, &RootChoice::Smallest, &flips).unwrap();
                assert_eq!(v, base[k], "flips {flips:?}, k = {k}");
            }
        }
    }

    #[test]
    fn explicit_root_validation() {
        let (c, b) = sample4();
        let mut map = BTreeMap::new();
        map.insert(1, 99); // no component contains vertex 99
        let res = level2_mu_rhs(&c, &b, 1, &RootChoice::Explicit(map));
        assert!(matches!(res, Err(Level2Error::BadRoot { .. })));
    }

    #[test]
    fn zero_coefficients_vanish() {
        let (_, b) = sample3();
        let c = SkewTriple::zero(3);
        for k in 1..=3 {
            assert_eq!(
                level2_mu_rhs(&c, &b, k, &RootChoice::Smallest).unwrap(),
                Rat::zero()
            );
        }
        assert_eq!(
            level2_mu_rhs(&c, &b, 0, &RootChoice::Smallest).unwrap(),
            Rat::one()
        );
    }
}
