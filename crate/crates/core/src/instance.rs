//! Instance files: the JSON schemas the CLI reads and writes, seeded
//! random generation from a small rational palette, and the per-theorem
//! verification drivers shared by the CLI and the test suites.

use crate::bundle::{BundleEdge, DoubledWeights, LineBundle};
use crate::doomb::{charpoly_combinatorial, mu_combinatorial};
use crate::exact::{char_poly, principal_minor_sum, Matrix, Rat, Vector};
use crate::exact::dot;
use crate::lemmas::{
    det_p_tree, det_p_tree_closed, det_q_tree, det_r_tree, det_r_tree_closed,
    gram_minor_identity, orth_complement_angle_duality, pqr_cycle, pqr_cycle_closed, EdgePhi,
    OneCycleGraph, RootedTree, Subspace,
};
use crate::level2::{level2_laplacian, level2_pair_system, level2_mu_rhs, RootChoice, SkewTriple};
use crate::ncpoly::NcPoly;
use crate::rank1::{assemble, RankOneSystem};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Small fixed palette of rationals for random instances: keeps every
/// determinant small and failing cases readable.
pub const PALETTE: [(i64, i64); 9] = [
    (0, 1),
    (1, 1),
    (-1, 1),
    (2, 1),
    (-2, 1),
    (1, 2),
    (-1, 2),
    (3, 1),
    (1, 3),
];

pub fn palette_rat(rng: &mut ChaCha8Rng) -> Rat {
    let (p, q) = PALETTE[rng.gen_range(0..PALETTE.len())];
    Rat::new(p, q)
}

pub fn nonzero_palette_rat(rng: &mut ChaCha8Rng) -> Rat {
    let (p, q) = PALETTE[rng.gen_range(1..PALETTE.len())];
    Rat::new(p, q)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyTerm {
    pub coeff: Rat,
    pub word: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Rank1Instance {
    pub n: usize,
    pub e: Vec<Vector>,
    pub alpha: Vec<Vector>,
    pub terms: Vec<PolyTerm>,
}

impl Rank1Instance {
    pub fn build(&self) -> Result<(RankOneSystem, NcPoly), InstanceError> {
        let sys = RankOneSystem::new(self.n, self.e.clone(), self.alpha.clone())
            .map_err(|e| InstanceError::Invalid(e.to_string()))?;
        let mut p = NcPoly::zero(self.e.len());
        for t in &self.terms {
            p.add_term(t.coeff.clone(), t.word.clone())
                .map_err(|e| InstanceError::Invalid(e.to_string()))?;
        }
        Ok((sys, p))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleEdgeSpec {
    pub u: usize,
    pub v: usize,
    pub phi: Rat,
    pub c: Rat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleInstance {
    pub n: usize,
    pub edges: Vec<BundleEdgeSpec>,
}

impl BundleInstance {
    pub fn build(&self) -> Result<LineBundle, InstanceError> {
        let edges = self
            .edges
            .iter()
            .map(|e| BundleEdge {
                u: e.u,
                v: e.v,
                phi: e.phi.clone(),
                c: e.c.clone(),
            })
            .collect();
        LineBundle::new(self.n, edges).map_err(|e| InstanceError::Invalid(e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MttdInstance {
    pub n: usize,
    /// (p, q, c_minus, c_plus) per unordered pair
    pub pairs: Vec<(usize, usize, Rat, Rat)>,
}

impl MttdInstance {
    pub fn build(&self) -> Result<DoubledWeights, InstanceError> {
        for &(p, q, _, _) in &self.pairs {
            if p == 0 || q == 0 || p >= q || q > self.n {
                return Err(InstanceError::Invalid(format!("bad pair ({p},{q})")));
            }
        }
        Ok(DoubledWeights {
            n: self.n,
            pairs: self.pairs.clone(),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TripleSpec {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: Rat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Level2Instance {
    pub n: usize,
    pub triples: Vec<TripleSpec>,
    pub edges: Vec<BundleEdgeSpec>,
}

impl Level2Instance {
    pub fn build(&self) -> Result<(SkewTriple, LineBundle), InstanceError> {
        let c = SkewTriple::new(
            self.n,
            self.triples
                .iter()
                .map(|t| (t.i, t.j, t.k, t.c.clone()))
                .collect(),
        )
        .map_err(|e| InstanceError::Invalid(e.to_string()))?;
        let b = BundleInstance {
            n: self.n,
            edges: self.edges.clone(),
        }
        .build()?;
        Ok((c, b))
    }
}

/// The on-disk instance format: a kind tag, the matching payload, and
/// an optional generation seed for provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum InstancePayload {
    Rank1(Rank1Instance),
    Bundle(BundleInstance),
    Mttd(MttdInstance),
    Level2(Level2Instance),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub payload: InstancePayload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

// ---------------------------------------------------------------------
// random generation

pub fn random_rank1(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_ops: usize,
    max_deg: usize,
    max_terms: usize,
) -> Rank1Instance {
    let n = rng.gen_range(1..=max_n);
    let count = rng.gen_range(1..=max_ops);
    let vecs = |rng: &mut ChaCha8Rng| -> Vec<Vector> {
        (0..count)
            .map(|_| (0..n).map(|_| palette_rat(rng)).collect())
            .collect()
    };
    let e = vecs(rng);
    let alpha = vecs(rng);
    let num_terms = rng.gen_range(1..=max_terms);
    let terms = (0..num_terms)
        .map(|_| {
            let len = rng.gen_range(1..=max_deg);
            PolyTerm {
                coeff: nonzero_palette_rat(rng),
                word: (0..len).map(|_| rng.gen_range(1..=count)).collect(),
            }
        })
        .collect();
    Rank1Instance { n, e, alpha, terms }
}

/// A rank-1 instance that encodes a plain matrix: unit vectors for e,
/// matrix rows for alpha, and the linear polynomial x_1 + ... + x_n.
pub fn random_matrix_rank1(rng: &mut ChaCha8Rng, max_n: usize) -> (Rank1Instance, Matrix) {
    let n = rng.gen_range(1..=max_n);
    let m = Matrix::from_fn(n, n, |_, _| palette_rat(rng));
    let e = (0..n).map(|i| crate::exact::unit_vector(n, i)).collect();
    let alpha = (0..n).map(|i| m.row(i).to_vec()).collect();
    let terms = (1..=n)
        .map(|i| PolyTerm {
            coeff: Rat::one(),
            word: vec![i],
        })
        .collect();
    (Rank1Instance { n, e, alpha, terms }, m)
}

pub fn random_bundle(rng: &mut ChaCha8Rng, max_n: usize, max_edges: usize) -> BundleInstance {
    let n = rng.gen_range(2..=max_n);
    let mut all_pairs: Vec<(usize, usize)> = Vec::new();
    for u in 1..n {
        for v in u + 1..=n {
            all_pairs.push((u, v));
        }
    }
    all_pairs.shuffle(rng);
    let m = rng.gen_range(1..=max_edges.min(all_pairs.len()));
    let mut edges: Vec<BundleEdgeSpec> = all_pairs[..m]
        .iter()
        .map(|&(u, v)| BundleEdgeSpec {
            u,
            v,
            phi: nonzero_palette_rat(rng),
            c: palette_rat(rng),
        })
        .collect();
    edges.sort_by_key(|e| (e.u, e.v));
    BundleInstance { n, edges }
}

pub fn random_mttd(rng: &mut ChaCha8Rng, max_n: usize) -> MttdInstance {
    let n = rng.gen_range(2..=max_n);
    let mut pairs = Vec::new();
    for p in 1..n {
        for q in p + 1..=n {
            if rng.gen_bool(0.7) {
                pairs.push((p, q, palette_rat(rng), palette_rat(rng)));
            }
        }
    }
    MttdInstance { n, pairs }
}

pub fn random_level2(rng: &mut ChaCha8Rng, n: usize) -> Level2Instance {
    // complete bundle so every transport the explicit matrix needs exists
    let mut edges = Vec::new();
    for u in 1..n {
        for v in u + 1..=n {
            edges.push(BundleEdgeSpec {
                u,
                v,
                phi: nonzero_palette_rat(rng),
                c: Rat::one(),
            });
        }
    }
    let mut triples = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for k in j + 1..=n {
                if j == i || k == i {
                    continue;
                }
                let c = palette_rat(rng);
                if !c.is_zero() {
                    triples.push(TripleSpec { i, j, k, c });
                }
            }
        }
    }
    Level2Instance { n, triples, edges }
}

pub fn random_rooted_tree(rng: &mut ChaCha8Rng, max_n: usize) -> RootedTree {
    let n = rng.gen_range(1..=max_n);
    let mut edges = Vec::new();
    for v in 2..=n {
        let parent = rng.gen_range(1..v);
        let (a, b) = if rng.gen_bool(0.5) {
            (parent, v)
        } else {
            (v, parent)
        };
        edges.push(EdgePhi::new(a, b, nonzero_palette_rat(rng)));
    }
    let root = rng.gen_range(1..=n);
    RootedTree::new(n, edges, root).expect("generated tree is valid")
}

pub fn random_one_cycle(rng: &mut ChaCha8Rng, max_n: usize) -> OneCycleGraph {
    let n = rng.gen_range(3..=max_n.max(3));
    let cycle_len = rng.gen_range(3..=n);
    let mut edges = Vec::new();
    for t in 0..cycle_len {
        let (a, b) = (t + 1, (t + 1) % cycle_len + 1);
        let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        edges.push(EdgePhi::new(a, b, nonzero_palette_rat(rng)));
    }
    // antlers hang off already-placed vertices
    for v in cycle_len + 1..=n {
        let anchor = rng.gen_range(1..v);
        let (a, b) = if rng.gen_bool(0.5) {
            (anchor, v)
        } else {
            (v, anchor)
        };
        edges.push(EdgePhi::new(a, b, nonzero_palette_rat(rng)));
    }
    OneCycleGraph::new(n, edges).expect("generated one-cycle graph is valid")
}

// ---------------------------------------------------------------------
// verification drivers

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Main,
    Forman,
    Mtt,
    Mttd,
    Level2,
    Lemmas,
}

impl std::str::FromStr for Theorem {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "main" => Ok(Theorem::Main),
            "forman" => Ok(Theorem::Forman),
            "mtt" => Ok(Theorem::Mtt),
            "mttd" => Ok(Theorem::Mttd),
            "level2" => Ok(Theorem::Level2),
            "lemmas" => Ok(Theorem::Lemmas),
            other => Err(format!("unknown theorem '{other}'")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialOutcome {
    pub index: usize,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceFile>,
}

fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index as u64 + 1)))
}

/// One seeded trial of the named equivalence; mismatches carry the
/// reproducing instance.
pub fn run_trial(theorem: Theorem, seed: u64, index: usize, max_n: usize) -> TrialOutcome {
    let mut rng = trial_rng(seed, index);
    let (passed, detail, instance) = match theorem {
        Theorem::Main => {
            let inst = random_rank1(&mut rng, max_n.min(4), 5, 3, 12);
            let d = check_main(&inst);
            let file = InstanceFile {
                payload: InstancePayload::Rank1(inst),
                seed: Some(seed),
            };
            (d.is_none(), d.unwrap_or_default(), Some(file))
        }
        Theorem::Forman => {
            let inst = random_bundle(&mut rng, max_n.min(6), 10);
            let d = check_forman(&inst);
            let file = InstanceFile {
                payload: InstancePayload::Bundle(inst),
                seed: Some(seed),
            };
            (d.is_none(), d.unwrap_or_default(), Some(file))
        }
        Theorem::Mtt => {
            let d = check_mtt();
            (d.is_none(), d.unwrap_or_default(), None)
        }
        Theorem::Mttd => {
            let inst = random_mttd(&mut rng, max_n.min(4));
            let d = check_mttd(&inst);
            let file = InstanceFile {
                payload: InstancePayload::Mttd(inst),
                seed: Some(seed),
            };
            (d.is_none(), d.unwrap_or_default(), Some(file))
        }
        Theorem::Level2 => {
            let n = (index % 2) + 3; // alternate n = 3, 4
            let inst = random_level2(&mut rng, n.min(max_n.max(3)));
            let d = check_level2(&inst);
            let file = InstanceFile {
                payload: InstancePayload::Level2(inst),
                seed: Some(seed),
            };
            (d.is_none(), d.unwrap_or_default(), Some(file))
        }
        Theorem::Lemmas => {
            let d = check_lemmas(&mut rng, max_n.min(8));
            (d.is_none(), d.unwrap_or_default(), None)
        }
    };
    TrialOutcome {
        index,
        passed,
        detail: if passed { "ok".into() } else { detail },
        instance: if passed { None } else { instance },
    }
}

/// None on success, Some(description) on the first mismatch.
pub fn check_main(inst: &Rank1Instance) -> Option<String> {
    let (sys, p) = match inst.build() {
        Ok(x) => x,
        Err(e) => return Some(e.to_string()),
    };
    let m = assemble(&sys, &p).ok()?;
    for k in 0..=inst.n {
        let comb = mu_combinatorial(&sys, &p, k).ok()?;
        let oracle = principal_minor_sum(&m, k).ok()?;
        if comb != oracle {
            return Some(format!("mu_{k}: combinatorial {comb} vs oracle {oracle}"));
        }
    }
    None
}

pub fn check_matrix_reduction(inst: &Rank1Instance, m: &Matrix) -> Option<String> {
    let (sys, p) = match inst.build() {
        Ok(x) => x,
        Err(e) => return Some(e.to_string()),
    };
    let comb = charpoly_combinatorial(&sys, &p).ok()?;
    let oracle = char_poly(m).ok()?;
    if comb != oracle {
        return Some(format!("char poly {comb} vs {oracle}"));
    }
    None
}

pub fn check_forman(inst: &BundleInstance) -> Option<String> {
    let b = match inst.build() {
        Ok(x) => x,
        Err(e) => return Some(e.to_string()),
    };
    let lap = b.laplacian();
    for k in 0..=inst.n {
        let mu = b.forman_mu(k);
        let oracle = principal_minor_sum(&lap, k).ok()?;
        if mu != oracle {
            return Some(format!("forman mu_{k}: {mu} vs oracle {oracle}"));
        }
    }
    None
}

pub fn check_mtt() -> Option<String> {
    use crate::bundle::mtt_mu;
    // triangle: 3 spanning trees; K4: 16, against the Kirchhoff reduced
    // determinant of the plain Laplacian
    let k3: Vec<(usize, usize, Rat)> = vec![
        (1, 2, Rat::one()),
        (1, 3, Rat::one()),
        (2, 3, Rat::one()),
    ];
    let mut k4 = Vec::new();
    for u in 1..4 {
        for v in u + 1..=4 {
            k4.push((u, v, Rat::one()));
        }
    }
    for (n, edges, expect) in [(3usize, &k3, 3i64), (4, &k4, 16)] {
        // each spanning tree enters mu_{n-1} with the factor m+1 = n, so
        // the raw tree count is mu_{n-1}/n
        let got = mtt_mu(n, edges, n - 1) / Rat::new(n as i64, 1);
        if got != Rat::new(expect, 1) {
            return Some(format!("K{n} tree count {got} vs {expect}"));
        }
        let mut lap = Matrix::zero(n, n);
        for &(u, v, ref c) in edges.iter() {
            lap[(u - 1, u - 1)] += c;
            lap[(v - 1, v - 1)] += c;
            lap[(u - 1, v - 1)] -= c;
            lap[(v - 1, u - 1)] -= c;
        }
        let rows: Vec<usize> = (1..n).collect();
        let reduced = lap.submatrix(&rows, &rows);
        let kirchhoff = crate::exact::det(&reduced).ok()?;
        if got != kirchhoff {
            return Some(format!("K{n} vs Kirchhoff {kirchhoff}"));
        }
        if !mtt_mu(n, edges, n).is_zero() {
            return Some(format!("K{n}: nonzero forest count at k = n"));
        }
    }
    None
}

pub fn check_mttd(inst: &MttdInstance) -> Option<String> {
    let dw = match inst.build() {
        Ok(x) => x,
        Err(e) => return Some(e.to_string()),
    };
    let op = dw.operator();
    for k in 0..=inst.n {
        let mu = dw.mttd_mu(k);
        let oracle = principal_minor_sum(&op, k).ok()?;
        if mu != oracle {
            return Some(format!("mttd mu_{k}: {mu} vs oracle {oracle}"));
        }
    }
    None
}

pub fn check_level2(inst: &Level2Instance) -> Option<String> {
    let (c, b) = match inst.build() {
        Ok(x) => x,
        Err(e) => return Some(e.to_string()),
    };
    let m = match level2_laplacian(&c, &b) {
        Ok(m) => m,
        Err(e) => return Some(e.to_string()),
    };
    let (sys, p) = level2_pair_system(&c, &b).ok()?;
    for k in 0..=inst.n {
        let oracle = principal_minor_sum(&m, k).ok()?;
        let comb = mu_combinatorial(&sys, &p, k).ok()?;
        if comb != oracle {
            return Some(format!("level2 mu_{k}: doomb {comb} vs oracle {oracle}"));
        }
        for roots in [RootChoice::Smallest, RootChoice::Largest] {
            let rhs = match level2_mu_rhs(&c, &b, k, &roots) {
                Ok(r) => r,
                Err(e) => return Some(e.to_string()),
            };
            if rhs != oracle {
                return Some(format!(
                    "level2 mu_{k}: polyhedral {rhs} vs oracle {oracle} ({roots:?})"
                ));
            }
        }
    }
    None
}

pub fn check_lemmas(rng: &mut ChaCha8Rng, max_n: usize) -> Option<String> {
    let t = random_rooted_tree(rng, max_n);
    let p = det_p_tree(&t).ok()?;
    if p != det_p_tree_closed(&t) {
        return Some(format!("det P tree: {p} vs closed form"));
    }
    let r = det_r_tree(&t).ok()?;
    if r != det_r_tree_closed(&t) {
        return Some(format!("det R tree: {r} vs closed form"));
    }
    let q = det_q_tree(&t).ok()?;
    let m = t.edges.len() as i64;
    if q != Rat::new(m + 1, 1) {
        return Some(format!("det Q tree: {q} vs m+1 = {}", m + 1));
    }
    let g = random_one_cycle(rng, max_n.max(3));
    let (gp, gr, gq) = pqr_cycle(&g).ok()?;
    let (cp, cr, cq) = pqr_cycle_closed(&g);
    if (gp, gr, gq) != (cp, cr, cq) {
        return Some("cycle P/R/Q closed forms disagree".into());
    }
    // Gram minor identity on a random vector family
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=n);
    let fam: Vec<Vector> = (0..m)
        .map(|_| (0..n).map(|_| palette_rat(rng)).collect())
        .collect();
    let (lhs, rhs) = gram_minor_identity(&fam).ok()?;
    if lhs != rhs {
        return Some(format!("gram minor identity: {lhs} vs {rhs}"));
    }
    // angle duality on random independent families
    let sub = |rng: &mut ChaCha8Rng, n: usize| -> Option<Subspace> {
        for _ in 0..20 {
            let d = rng.gen_range(1..=n);
            let basis: Vec<Vector> = (0..d)
                .map(|_| (0..n).map(|_| palette_rat(rng)).collect())
                .collect();
            if let Ok(s) = Subspace::new(n, basis) {
                return Some(s);
            }
        }
        None
    };
    let n = rng.gen_range(2..=max_n.max(2));
    if let (Some(a), Some(b)) = (sub(rng, n), sub(rng, n)) {
        if a.dim() == b.dim() {
            match orth_complement_angle_duality(&a, &b) {
                Ok((direct, dual)) if direct == dual => {}
                Ok((direct, dual)) => {
                    return Some(format!("angle duality: {direct} vs {dual}"));
                }
                Err(e) => return Some(e.to_string()),
            }
        }
    }
    // the tree complement vectors really annihilate their families
    let (bv, fv) = crate::lemmas::tree_complement_vectors(&t);
    for a in t.alphas() {
        if !dot(&bv, &a).is_zero() {
            return Some("b_H not orthogonal to alpha family".into());
        }
    }
    for e in t.evecs() {
        if !dot(&fv, &e).is_zero() {
            return Some("f_H not orthogonal to e family".into());
        }
    }
    None
}

/// Per-k coefficient line of a verification or charpoly report.
#[derive(Clone, Debug, Serialize)]
pub struct CoeffRow {
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combinatorial: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equal: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub coefficients: Vec<CoeffRow>,
    pub passed: usize,
    pub failed: usize,
    /// kept out of the serialized report so identical seeds give
    /// byte-identical output
    #[serde(skip)]
    pub elapsed_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceFile>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub audit: Vec<serde_json::Value>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failures: Vec<TrialOutcome>,
}

/// The operator an instance describes, for the oracle side of reports.
pub fn instance_operator(file: &InstanceFile) -> Result<Matrix, InstanceError> {
    match &file.payload {
        InstancePayload::Rank1(i) => {
            let (sys, p) = i.build()?;
            assemble(&sys, &p).map_err(|e| InstanceError::Invalid(e.to_string()))
        }
        InstancePayload::Bundle(i) => Ok(i.build()?.laplacian()),
        InstancePayload::Mttd(i) => Ok(i.build()?.operator()),
        InstancePayload::Level2(i) => {
            let (c, b) = i.build()?;
            level2_laplacian(&c, &b).map_err(|e| InstanceError::Invalid(e.to_string()))
        }
    }
}

/// The combinatorial-side mu values for every k, by the formula the
/// instance kind belongs to.
pub fn instance_mus(file: &InstanceFile) -> Result<Vec<Rat>, InstanceError> {
    let bad = |e: String| InstanceError::Invalid(e);
    match &file.payload {
        InstancePayload::Rank1(i) => {
            let (sys, p) = i.build()?;
            (0..=i.n)
                .map(|k| mu_combinatorial(&sys, &p, k).map_err(|e| bad(e.to_string())))
                .collect()
        }
        InstancePayload::Bundle(i) => {
            let b = i.build()?;
            Ok((0..=i.n).map(|k| b.forman_mu(k)).collect())
        }
        InstancePayload::Mttd(i) => {
            let dw = i.build()?;
            Ok((0..=i.n).map(|k| dw.mttd_mu(k)).collect())
        }
        InstancePayload::Level2(i) => {
            let (c, b) = i.build()?;
            (0..=i.n)
                .map(|k| {
                    level2_mu_rhs(&c, &b, k, &RootChoice::Smallest)
                        .map_err(|e| bad(e.to_string()))
                })
                .collect()
        }
    }
}

/// Dimension of the instance's operator.
pub fn instance_n(file: &InstanceFile) -> usize {
    match &file.payload {
        InstancePayload::Rank1(i) => i.n,
        InstancePayload::Bundle(i) => i.n,
        InstancePayload::Mttd(i) => i.n,
        InstancePayload::Level2(i) => i.n,
    }
}

pub fn seed_from_env() -> u64 {
    std::env::var("RANK1_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(42)
}
