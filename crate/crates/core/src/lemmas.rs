//! Gram determinants of edge-vector families on trees and one-cycle
//! graphs, with their closed forms, plus the supporting linear algebra:
//! the Gram minor identity, subspace angles, and orthogonal-complement
//! spanning vectors.
//!
//! Conventions here: for a directed edge (i,j) with transport phi,
//! alpha_ij = u_i - phi_ij u_j and e_ij = u_i - phi_ji u_j, with
//! phi_ji = 1/phi_ij.

use crate::exact::{det, gram, unit_vector, ExactError, Matrix, Rat, Vector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LemmaError {
    #[error("graph is not a tree: {0}")]
    NotATree(String),
    #[error("graph is not a one-cycle graph: {0}")]
    NotOneCycle(String),
    #[error("root {0} out of range 1..={1}")]
    BadRoot(usize, usize),
    #[error("subspace dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Directed edge with an invertible transport in its own direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePhi {
    pub u: usize,
    pub v: usize,
    pub phi: Rat,
}

impl EdgePhi {
    pub fn new(u: usize, v: usize, phi: Rat) -> Self {
        assert!(!phi.is_zero(), "transport must be invertible");
        EdgePhi { u, v, phi }
    }

    /// alpha vector of the edge inside an n-dimensional ambient space.
    pub fn alpha(&self, n: usize) -> Vector {
        let mut w = vec![Rat::zero(); n];
        w[self.u - 1] = Rat::one();
        w[self.v - 1] = -&self.phi;
        w
    }

    /// e vector: u_i - (1/phi) u_j.
    pub fn evec(&self, n: usize) -> Vector {
        let mut w = vec![Rat::zero(); n];
        w[self.u - 1] = Rat::one();
        w[self.v - 1] = -self.phi.recip();
        w
    }
}

fn adjacency(n: usize, edges: &[EdgePhi]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); n + 1];
    for (idx, e) in edges.iter().enumerate() {
        adj[e.u].push((e.v, idx));
        adj[e.v].push((e.u, idx));
    }
    adj
}

fn is_connected(n: usize, edges: &[EdgePhi]) -> bool {
    if n == 0 {
        return false;
    }
    let adj = adjacency(n, edges);
    let mut seen = vec![false; n + 1];
    let mut stack = vec![1];
    seen[1] = true;
    while let Some(v) = stack.pop() {
        for &(w, _) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (1..=n).all(|v| seen[v])
}

/// Transport along the unique path from `from` to `to` in a tree (or in
/// the forest part of any graph where the path is unique); edges
/// traversed with their direction contribute phi, against it 1/phi.
pub fn path_transport(n: usize, edges: &[EdgePhi], from: usize, to: usize) -> Option<Rat> {
    let adj = adjacency(n, edges);
    // BFS parents
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; n + 1];
    let mut seen = vec![false; n + 1];
    let mut queue = std::collections::VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &(w, idx) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, idx));
                queue.push_back(w);
            }
        }
    }
    if !seen[to] {
        return None;
    }
    let mut acc = Rat::one();
    let mut cur = to;
    while cur != from {
        let (parent, idx) = prev[cur].unwrap();
        // step parent -> cur
        if edges[idx].u == parent {
            acc *= &edges[idx].phi;
        } else {
            acc *= edges[idx].phi.recip();
        }
        cur = parent;
    }
    Some(acc)
}

/// A tree on 1..=n with arbitrarily directed edges and a chosen root.
#[derive(Clone, Debug)]
pub struct RootedTree {
    pub n: usize,
    pub edges: Vec<EdgePhi>,
    pub root: usize,
}

impl RootedTree {
    pub fn new(n: usize, edges: Vec<EdgePhi>, root: usize) -> Result<Self, LemmaError> {
        if root == 0 || root > n {
            return Err(LemmaError::BadRoot(root, n));
        }
        if edges.len() + 1 != n {
            return Err(LemmaError::NotATree(format!(
                "{} edges on {} vertices",
                edges.len(),
                n
            )));
        }
        if !is_connected(n, &edges) {
            return Err(LemmaError::NotATree("disconnected".into()));
        }
        Ok(RootedTree { n, edges, root })
    }

    fn depths(&self) -> Vec<usize> {
        depths_from(self.n, &self.edges, &[self.root])
    }

    /// Indices of edges whose stored direction points away from the root.
    pub fn edges_away_from_root(&self) -> Vec<usize> {
        let d = self.depths();
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| d[e.v] > d[e.u])
            .map(|(i, _)| i)
            .collect()
    }

    pub fn alphas(&self) -> Vec<Vector> {
        self.edges.iter().map(|e| e.alpha(self.n)).collect()
    }

    pub fn evecs(&self) -> Vec<Vector> {
        self.edges.iter().map(|e| e.evec(self.n)).collect()
    }
}

fn depths_from(n: usize, edges: &[EdgePhi], sources: &[usize]) -> Vec<usize> {
    let adj = adjacency(n, edges);
    let mut depth = vec![usize::MAX; n + 1];
    let mut queue = std::collections::VecDeque::new();
    for &s in sources {
        depth[s] = 0;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &(w, _) in &adj[v] {
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
    }
    depth
}

/// det G(A,A) on a tree, from the vectors.
pub fn det_p_tree(t: &RootedTree) -> Result<Rat, LemmaError> {
    Ok(det(&gram(&t.alphas(), &t.alphas())?)?)
}

/// Closed form: product of phi^2 over edges directed away from the root
/// times the sum over all vertices of the squared transport to the root
/// (the root contributes the empty-path term 1).
pub fn det_p_tree_closed(t: &RootedTree) -> Rat {
    let prod: Rat = t
        .edges_away_from_root()
        .into_iter()
        .map(|i| t.edges[i].phi.pow(2))
        .product();
    let sum: Rat = (1..=t.n)
        .map(|u| path_transport(t.n, &t.edges, u, t.root).unwrap().pow(2))
        .sum();
    prod * sum
}

pub fn det_r_tree(t: &RootedTree) -> Result<Rat, LemmaError> {
    Ok(det(&gram(&t.evecs(), &t.evecs())?)?)
}

pub fn det_r_tree_closed(t: &RootedTree) -> Rat {
    let prod: Rat = t
        .edges_away_from_root()
        .into_iter()
        .map(|i| t.edges[i].phi.pow(-2))
        .product();
    let sum: Rat = (1..=t.n)
        .map(|u| path_transport(t.n, &t.edges, u, t.root).unwrap().pow(-2))
        .sum();
    prod * sum
}

/// det G(A,E) on a tree; equals m+1 regardless of the transports.
pub fn det_q_tree(t: &RootedTree) -> Result<Rat, LemmaError> {
    Ok(det(&gram(&t.alphas(), &t.evecs())?)?)
}

/// A connected graph on 1..=n with exactly n directed edges, so exactly
/// one cycle, possibly with antler trees attached.
#[derive(Clone, Debug)]
pub struct OneCycleGraph {
    pub n: usize,
    pub edges: Vec<EdgePhi>,
}

impl OneCycleGraph {
    pub fn new(n: usize, edges: Vec<EdgePhi>) -> Result<Self, LemmaError> {
        if edges.len() != n {
            return Err(LemmaError::NotOneCycle(format!(
                "{} edges on {} vertices",
                edges.len(),
                n
            )));
        }
        for e in &edges {
            if e.u == e.v || e.u == 0 || e.v == 0 || e.u > n || e.v > n {
                return Err(LemmaError::NotOneCycle(format!("bad edge ({},{})", e.u, e.v)));
            }
        }
        if !is_connected(n, &edges) {
            return Err(LemmaError::NotOneCycle("disconnected".into()));
        }
        Ok(OneCycleGraph { n, edges })
    }

    /// Edge indices of the cycle, in traversal order starting at the
    /// smallest cycle vertex toward its smallest cycle neighbour, paired
    /// with a flag telling whether the stored direction agrees with the
    /// traversal.
    pub fn cycle(&self) -> Vec<(usize, bool)> {
        // strip leaves
        let mut alive: Vec<usize> = (0..self.edges.len()).collect();
        loop {
            let mut deg = vec![0usize; self.n + 1];
            for &i in &alive {
                deg[self.edges[i].u] += 1;
                deg[self.edges[i].v] += 1;
            }
            let before = alive.len();
            alive.retain(|&i| deg[self.edges[i].u] > 1 && deg[self.edges[i].v] > 1);
            if alive.len() == before {
                break;
            }
        }
        let start = alive
            .iter()
            .flat_map(|&i| [self.edges[i].u, self.edges[i].v])
            .min()
            .unwrap();
        let mut used = vec![false; alive.len()];
        let mut out = Vec::with_capacity(alive.len());
        let mut cur = start;
        for _ in 0..alive.len() {
            // among unused cycle edges at cur, take the one leading to the
            // smallest next vertex (fixes the traversal deterministically)
            let (pos, next) = alive
                .iter()
                .enumerate()
                .filter(|&(p, &i)| {
                    !used[p] && (self.edges[i].u == cur || self.edges[i].v == cur)
                })
                .map(|(p, &i)| {
                    let other = if self.edges[i].u == cur {
                        self.edges[i].v
                    } else {
                        self.edges[i].u
                    };
                    (p, other)
                })
                .min_by_key(|&(_, other)| other)
                .unwrap();
            let i = alive[pos];
            used[pos] = true;
            out.push((i, self.edges[i].u == cur));
            cur = next;
        }
        out
    }

    /// Holonomy along the canonical traversal.
    pub fn holonomy(&self) -> Rat {
        self.cycle()
            .into_iter()
            .map(|(i, along)| {
                if along {
                    self.edges[i].phi.clone()
                } else {
                    self.edges[i].phi.recip()
                }
            })
            .product()
    }

    fn cycle_vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .cycle()
            .into_iter()
            .flat_map(|(i, _)| [self.edges[i].u, self.edges[i].v])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Antler edge indices whose stored direction points away from the
    /// cycle.
    pub fn antlers_away(&self) -> Vec<usize> {
        let on_cycle: std::collections::BTreeSet<usize> =
            self.cycle().into_iter().map(|(i, _)| i).collect();
        let d = depths_from(self.n, &self.edges, &self.cycle_vertices());
        (0..self.edges.len())
            .filter(|i| !on_cycle.contains(i))
            .filter(|&i| d[self.edges[i].v] > d[self.edges[i].u])
            .collect()
    }

    pub fn alphas(&self) -> Vec<Vector> {
        self.edges.iter().map(|e| e.alpha(self.n)).collect()
    }

    pub fn evecs(&self) -> Vec<Vector> {
        self.edges.iter().map(|e| e.evec(self.n)).collect()
    }
}

/// (det P, det R, det Q) on a one-cycle graph, from the Gram matrices.
pub fn pqr_cycle(g: &OneCycleGraph) -> Result<(Rat, Rat, Rat), LemmaError> {
    let a = g.alphas();
    let e = g.evecs();
    Ok((
        det(&gram(&a, &a)?)?,
        det(&gram(&e, &e)?)?,
        det(&gram(&a, &e)?)?,
    ))
}

/// Closed forms of (det P, det R, det Q). With w the holonomy of the
/// canonical traversal:
///   det P = (1-w)^2 * prod phi^2 over antler edges directed away from
///           the cycle and cycle edges directed against the traversal,
///   det R = the same with phi^-2 and (1-1/w)^2,
///   det Q = (1-w)(1-1/w), direction independent.
pub fn pqr_cycle_closed(g: &OneCycleGraph) -> (Rat, Rat, Rat) {
    let w = g.holonomy();
    let one = Rat::one();
    let mut squares = Rat::one();
    for i in g.antlers_away() {
        squares *= g.edges[i].phi.pow(2);
    }
    for (i, along) in g.cycle() {
        if !along {
            squares *= g.edges[i].phi.pow(2);
        }
    }
    let p = (&one - &w).pow(2) * &squares;
    let r = (&one - &w.recip()).pow(2) * squares.recip();
    let q = (&one - &w) * (&one - &w.recip());
    (p, r, q)
}

/// The three-case rule for a single Gram entry of P, Q or R: 0 for
/// disjoint edges, psi products over the common vertices otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Alpha,
    E,
}

fn psi(edge: &EdgePhi, at: usize, family: Family) -> Rat {
    if edge.u == at {
        Rat::one()
    } else {
        match family {
            Family::Alpha => -&edge.phi,
            Family::E => -edge.phi.recip(),
        }
    }
}

/// Gram entry of two edge vectors predicted from edge incidence alone.
pub fn incidence_entry(s: &EdgePhi, fs: Family, t: &EdgePhi, ft: Family) -> Rat {
    let mut acc = Rat::zero();
    for a in [s.u, s.v] {
        if a == t.u || a == t.v {
            acc += psi(s, a, fs) * psi(t, a, ft);
        }
    }
    acc
}

/// (det G(M,M), sum of squared k x k minors of the coefficient matrix).
pub fn gram_minor_identity(vectors: &[Vector]) -> Result<(Rat, Rat), LemmaError> {
    let g = gram(vectors, vectors)?;
    let gd = det(&g)?;
    let k = vectors.len();
    let n = if k == 0 { 0 } else { vectors[0].len() };
    let a = Matrix::from_rows(vectors.to_vec());
    let rows: Vec<usize> = (0..k).collect();
    let mut sum = Rat::zero();
    for cols in crate::exact::subsets(n, k) {
        let m = a.submatrix(&rows, &cols);
        sum += det(&m)?.pow(2);
    }
    Ok((gd, sum))
}

/// A linear subspace of Q^n given by an independent basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub n: usize,
    pub basis: Vec<Vector>,
}

impl Subspace {
    pub fn new(n: usize, basis: Vec<Vector>) -> Result<Self, LemmaError> {
        if basis.iter().any(|v| v.len() != n) {
            return Err(ExactError::Dimension("basis vector of wrong length".into()).into());
        }
        if !basis.is_empty() && Matrix::from_rows(basis.clone()).rank() != basis.len() {
            return Err(LemmaError::DependentBasis);
        }
        Ok(Subspace { n, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal complement, via the exact nullspace of the basis matrix.
    pub fn complement(&self) -> Subspace {
        if self.basis.is_empty() {
            return Subspace {
                n: self.n,
                basis: (0..self.n).map(|i| unit_vector(self.n, i)).collect(),
            };
        }
        let m = Matrix::from_rows(self.basis.clone());
        Subspace {
            n: self.n,
            basis: m.kernel_basis(),
        }
    }
}

/// det G(M,X)^2 / (det G(M,M) det G(X,X)); basis independent.
pub fn angle(a: &Subspace, b: &Subspace) -> Result<Rat, LemmaError> {
    if a.dim() != b.dim() {
        return Err(LemmaError::DimensionMismatch(a.dim(), b.dim()));
    }
    if a.dim() == 0 {
        return Ok(Rat::one());
    }
    let num = det(&gram(&a.basis, &b.basis)?)?.pow(2);
    let da = det(&gram(&a.basis, &a.basis)?)?;
    let db = det(&gram(&b.basis, &b.basis)?)?;
    Ok(num / (da * db))
}

/// (angle(a,b), angle of the orthogonal complements); the two are equal.
pub fn orth_complement_angle_duality(
    a: &Subspace,
    b: &Subspace,
) -> Result<(Rat, Rat), LemmaError> {
    Ok((angle(a, b)?, angle(&a.complement(), &b.complement())?))
}

/// Spanning vectors of the 1-dimensional orthogonal complements of the
/// edge families of a tree inside the span of its vertices:
/// b = sum_u phi_{u->root} u is orthogonal to every alpha, and
/// f = sum_u phi_{root->u} u to every e. Vertices outside the tree get 0.
pub fn tree_complement_vectors(t: &RootedTree) -> (Vector, Vector) {
    let mut b = vec![Rat::zero(); t.n];
    let mut f = vec![Rat::zero(); t.n];
    for u in 1..=t.n {
        let to_root = path_transport(t.n, &t.edges, u, t.root).unwrap();
        b[u - 1] = to_root.clone();
        f[u - 1] = to_root.recip();
    }
    (b, f)
}
