//! Span program deciding graph collision, worked in closed-form inner
//! products.
//!
//! The underlying vectors live in a space of dimension 2^n: for each vertex j
//! and bit b, |s_jb> is the sum of all basis states whose j-th bit equals b,
//! and the target is |t> = gamma * (sum of all basis states) with
//! gamma = ((n+k)/2)^(1/4). Everything we ever need (membership, witnesses,
//! witness sizes) depends only on inner products among these 2n+1 vectors,
//! and those have a closed form, so no 2^n-dimensional object is built here.
//! The explicit-coordinate form lives in [`explicit`] as a cross-check oracle
//! for small n.
//!
//! Vectors are stored normalized by 2^((n-2)/2), which keeps every Gram entry
//! O(gamma^2) for any n. Witness coefficients and overlaps are unchanged by
//! this: scaling all vectors by c rescales a positive witness's coefficients
//! by nothing (both sides of t = sum w_v v scale together) and a negative
//! witness by 1/c, which cancels in each overlap. So reported values need no
//! unscaling; `scale_log2` records the exponent anyway for inspection.
//!
//! Solves do not touch the Gram matrix directly: the normalized Gram admits
//! the exact rank-(n+1) factorization s_jb -> e_0 + (-1)^b e_j and
//! t -> 2 gamma e_0 (checked entrywise in tests, in integer arithmetic), and
//! all least-squares and quadratic-program work runs on those coordinates.
//! Residuals then come out as norms of residual vectors instead of
//! differences of near-equal quadratic forms, which matters: the subtraction
//! form loses up to half the significand on feasible instances.
//!
//! Availability rule: vertex j contributes no vectors when x_j = 0; when
//! x_j = 1 it makes available |s_j0> together with |s_i1> for every neighbor
//! i of j. The same |s_i1> can be made available by several marked neighbors;
//! each such membership is a distinct witness slot.

pub mod explicit;

use crate::graph::{Graph, GraphCollisionInstance, GraphError};
use crate::linalg;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Default relative squared-residual threshold for membership. The Gram
/// systems here are small and the true residual is either 0 or at least
/// 1/(2n+1) relatively, so anything in between works.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum SpanError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no collision edge: a positive proof witness needs a marked edge")]
    NoCollision,
    #[error("marked set is not independent, negative witnesses do not exist")]
    NotIndependent,
    #[error("target is not in the available span, positive witnesses do not exist")]
    NotFeasible,
    #[error("target is in the available span, negative witnesses do not exist")]
    Feasible,
    #[error("explicit form needs dimension 2^n, refusing n = {0} > {max}", max = explicit::EXPLICIT_MAX_N)]
    TooLargeForExplicit(usize),
    #[error("negative witness program is infeasible, which contradicts the membership verdict")]
    WitnessSolveFailed,
}

/// Identifies the vector |s_{vertex,bit}>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct VectorTag {
    pub vertex: usize,
    pub bit: u8,
}

impl VectorTag {
    pub fn new(vertex: usize, bit: u8) -> Self {
        VectorTag { vertex, bit }
    }

    fn index(&self) -> usize {
        2 * (self.vertex - 1) + self.bit as usize
    }
}

/// One coefficient (positive side) or overlap (negative side) of a witness.
/// `multiplicity` is the number of identical slots the value applies to, so
/// sizes are recoverable as sum of multiplicity * value^2.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessEntry {
    pub tag: VectorTag,
    pub value: f64,
    pub multiplicity: usize,
}

/// Outcome of a witness computation. `min_wsize` and `proof_wsize` are both
/// always filled for the applicable sign (minimal vs hand-constructed), so
/// min_wsize <= proof_wsize can be checked on any report. `residual` is the
/// relative squared membership residual of the instance; feasible instances
/// have residual below the membership tolerance. `entries` describes the
/// witness the called operation asked for.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub feasible: bool,
    pub min_wsize: f64,
    pub proof_wsize: f64,
    pub bound: f64,
    pub residual: f64,
    pub entries: Vec<WitnessEntry>,
}

fn sig12(v: f64) -> String {
    format!("{:.11e}", v)
}

impl WitnessReport {
    /// JSON form with numeric values rendered as 12-significant-digit
    /// decimal strings, so emitted reports are byte-stable.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "feasible": self.feasible,
            "min_wsize": sig12(self.min_wsize),
            "proof_wsize": sig12(self.proof_wsize),
            "bound": sig12(self.bound),
            "residual": sig12(self.residual),
            "entries": self.entries.iter().map(|e| {
                serde_json::json!({
                    "vertex": e.tag.vertex,
                    "bit": e.tag.bit,
                    "value": sig12(e.value),
                    "multiplicity": e.multiplicity,
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// The graph-collision span program, represented by its Gram matrix.
#[derive(Debug, Clone)]
pub struct GcSpanProgram {
    graph: Graph,
    k: u64,
    gamma: f64,
    /// (2n+1) x (2n+1) inner products among s_10, s_11, ..., s_n0, s_n1, t,
    /// in normalized units.
    gram: DMatrix<f64>,
    /// log2 of the normalization divisor applied to every vector.
    scale_log2: f64,
}

pub fn build_gc_span_program(g: &Graph, k: u64) -> GcSpanProgram {
    let n = g.n();
    let gamma = ((n as f64 + k as f64) / 2.0).powf(0.25);
    let dim = 2 * n + 1;
    let mut gram = DMatrix::zeros(dim, dim);
    for j in 1..=n {
        for b in 0..2usize {
            let row = 2 * (j - 1) + b;
            for i in 1..=n {
                for c in 0..2usize {
                    let col = 2 * (i - 1) + c;
                    gram[(row, col)] = if i != j {
                        1.0
                    } else if b == c {
                        2.0
                    } else {
                        0.0
                    };
                }
            }
            gram[(row, dim - 1)] = 2.0 * gamma;
            gram[(dim - 1, row)] = 2.0 * gamma;
        }
    }
    gram[(dim - 1, dim - 1)] = 4.0 * gamma * gamma;
    GcSpanProgram {
        graph: g.clone(),
        k,
        gamma,
        gram,
        scale_log2: (n as f64 - 2.0) / 2.0,
    }
}

impl GcSpanProgram {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn scale_log2(&self) -> f64 {
        self.scale_log2
    }

    /// The witness-size guarantee sqrt(2(n+k)), valid on both sides of the
    /// promise deg(S) <= k.
    pub fn witness_size_bound(&self) -> f64 {
        (2.0 * (self.n() as f64 + self.k as f64)).sqrt()
    }

    pub fn gram_entry(&self, a: VectorTag, b: VectorTag) -> f64 {
        self.gram[(a.index(), b.index())]
    }

    pub fn target_overlap(&self) -> f64 {
        2.0 * self.gamma
    }

    pub fn target_norm_sq(&self) -> f64 {
        4.0 * self.gamma * self.gamma
    }

    pub fn gram_matrix(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Vectors available under x, each with the number of witness slots it
    /// occupies: (j,0) appears once (via marked j itself), (i,1) once per
    /// marked neighbor of i. Sorted by vector index.
    pub fn active_tags(
        &self,
        inst: &GraphCollisionInstance,
    ) -> Vec<(VectorTag, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for j in 1..=n {
            if inst.is_marked(j) {
                out.push((VectorTag::new(j, 0), 1));
            }
            let marked_nbrs = self
                .graph
                .neighbors(j)
                .iter()
                .filter(|&&i| inst.is_marked(i))
                .count();
            if marked_nbrs > 0 {
                out.push((VectorTag::new(j, 1), marked_nbrs));
            }
        }
        out
    }

    /// Total slots of each vector across the whole program, independent of x:
    /// (j,0) has one slot, (i,1) has deg(i) slots. Used by negative witness
    /// sizes, which sum over every slot of every family.
    fn program_multiplicity(&self, tag: VectorTag) -> usize {
        if tag.bit == 0 {
            1
        } else {
            self.graph.degree(tag.vertex)
        }
    }

    fn instance<'g>(&'g self, x: &[bool]) -> Result<GraphCollisionInstance<'g>, SpanError> {
        Ok(GraphCollisionInstance::new(&self.graph, x.to_vec())?)
    }

    /// |s_jb> in the rank-(n+1) realization: e_0 + e_j for b = 0,
    /// e_0 - e_j for b = 1. Reproduces the Gram exactly.
    fn realized(&self, tag: VectorTag) -> DVector<f64> {
        let mut v = DVector::zeros(self.n() + 1);
        v[0] = 1.0;
        v[tag.vertex] = if tag.bit == 0 { 1.0 } else { -1.0 };
        v
    }

    /// |t> in the same realization: 2 gamma e_0.
    fn realized_target(&self) -> DVector<f64> {
        let mut t = DVector::zeros(self.n() + 1);
        t[0] = 2.0 * self.gamma;
        t
    }

    /// Columns (scale * realized vector) for each (tag, scale). Callers keep
    /// the list nonempty.
    fn realized_columns<I>(&self, cols: I) -> DMatrix<f64>
    where
        I: Iterator<Item = (VectorTag, f64)>,
    {
        let cols: Vec<DVector<f64>> =
            cols.map(|(tag, scale)| self.realized(tag) * scale).collect();
        DMatrix::from_columns(&cols)
    }

    /// Relative squared residual of projecting the target onto the available
    /// span: 0 for members, at least 1/(2n+1) for non-members. Computed as
    /// the norm of an actual residual vector in the realization, never as a
    /// difference of quadratic forms.
    pub fn membership_residual(&self, x: &[bool]) -> Result<f64, SpanError> {
        let inst = self.instance(x)?;
        let active = self.active_tags(&inst);
        if active.is_empty() {
            return Ok(1.0);
        }
        let v = self.realized_columns(active.iter().map(|(tag, _)| (*tag, 1.0)));
        let t = self.realized_target();
        let y = linalg::lstsq_min_norm(&v, &t);
        Ok((v * y - &t).norm_squared() / self.target_norm_sq())
    }

    pub fn evaluate_with_tol(&self, x: &[bool], tol: f64) -> Result<bool, SpanError> {
        Ok(self.membership_residual(x)? <= tol)
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<bool, SpanError> {
        self.evaluate_with_tol(x, DEFAULT_MEMBERSHIP_TOL)
    }

    /// The two-term witness built on the lexicographically least collision
    /// edge (i,j): gamma on |s_j0> (slot in family j) and gamma on |s_j1>
    /// (slot in family i). Size 2 gamma^2 = sqrt(2(n+k)) exactly.
    pub fn proof_positive_witness(&self, x: &[bool]) -> Result<WitnessReport, SpanError> {
        let inst = self.instance(x)?;
        let edge = self
            .graph
            .edges()
            .iter()
            .find(|&&(u, v)| inst.is_marked(u) && inst.is_marked(v))
            .copied()
            .ok_or(SpanError::NoCollision)?;
        let (_, j) = edge;
        let g2 = self.gamma * self.gamma;
        let tags = [VectorTag::new(j, 0), VectorTag::new(j, 1)];

        // |t - gamma(s_j0 + s_j1)|^2, which is 0: the two realized vectors
        // sum to 2 e_0 and gamma * 2 e_0 is the target.
        let recon = (self.realized_target()
            - (self.realized(tags[0]) + self.realized(tags[1])) * self.gamma)
            .norm_squared();
        let recon_rel = recon / self.target_norm_sq();

        let min = self.min_positive_witness(x)?;
        Ok(WitnessReport {
            feasible: true,
            min_wsize: min.min_wsize,
            proof_wsize: 2.0 * g2,
            bound: self.witness_size_bound(),
            residual: recon_rel,
            entries: tags
                .iter()
                .map(|&tag| WitnessEntry { tag, value: self.gamma, multiplicity: 1 })
                .collect(),
        })
    }

    /// Minimal positive witness size over all slot assignments. A vector with
    /// m slots carrying total coefficient y costs y^2/m when split evenly
    /// (which is optimal for identical slots), so the problem reduces to a
    /// minimum-norm solve against the sqrt-multiplicity-scaled columns.
    pub fn min_positive_witness(&self, x: &[bool]) -> Result<WitnessReport, SpanError> {
        let inst = self.instance(x)?;
        let residual = self.membership_residual(x)?;
        if residual > DEFAULT_MEMBERSHIP_TOL {
            return Err(SpanError::NotFeasible);
        }
        let active = self.active_tags(&inst);
        let v = self
            .realized_columns(active.iter().map(|(tag, m)| (*tag, (*m as f64).sqrt())));
        let u = linalg::lstsq_min_norm(&v, &self.realized_target());
        let min_wsize = u.norm_squared();
        let entries = active
            .iter()
            .zip(u.iter())
            .map(|((tag, mult), &ui)| WitnessEntry {
                tag: *tag,
                // per-slot coefficient after the even split
                value: ui / (*mult as f64).sqrt(),
                multiplicity: *mult,
            })
            .collect();
        let proof = if inst.has_collision() {
            2.0 * self.gamma * self.gamma
        } else {
            // membership without a collision cannot happen; keep the
            // invariant min <= proof meaningful regardless
            min_wsize
        };
        Ok(WitnessReport {
            feasible: true,
            min_wsize,
            proof_wsize: proof,
            bound: self.witness_size_bound(),
            residual,
            entries,
        })
    }

    /// The witness |x>/gamma: unit overlap with the target, zero overlap with
    /// every available vector when the marked set is independent, and overlap
    /// [x_j = b]/gamma with |s_jb> generally. Its size counts every slot of
    /// the program: (n - |S| + deg(S)) / gamma^2.
    pub fn proof_negative_witness(&self, x: &[bool]) -> Result<WitnessReport, SpanError> {
        let inst = self.instance(x)?;
        if inst.has_collision() {
            return Err(SpanError::NotIndependent);
        }
        let g2 = self.gamma * self.gamma;
        let n = self.n();
        let s_size = inst.marked_set().len();
        let deg_s = inst.marked_degree_sum();
        let proof_wsize = (n as f64 - s_size as f64 + deg_s as f64) / g2;

        let mut entries = Vec::with_capacity(n);
        for j in 1..=n {
            let bit = u8::from(inst.is_marked(j));
            let tag = VectorTag::new(j, bit);
            entries.push(WitnessEntry {
                tag,
                value: 1.0 / self.gamma,
                multiplicity: self.program_multiplicity(tag),
            });
        }
        let min = self.min_negative_witness(x)?;
        Ok(WitnessReport {
            feasible: false,
            min_wsize: min.min_wsize,
            proof_wsize,
            bound: self.witness_size_bound(),
            residual: min.residual,
            entries,
        })
    }

    /// Minimal negative witness size: minimize the multiplicity-weighted sum
    /// of squared overlaps with every program vector, over w' with unit
    /// target overlap and zero overlap on available vectors. Components of
    /// w' orthogonal to span{s_jb} change neither objective nor constraints,
    /// and the realized vectors span the whole realization space, so this is
    /// an (n+1)-dimensional equality-constrained quadratic program there.
    pub fn min_negative_witness(&self, x: &[bool]) -> Result<WitnessReport, SpanError> {
        let inst = self.instance(x)?;
        let residual = self.membership_residual(x)?;
        if residual <= DEFAULT_MEMBERSHIP_TOL {
            return Err(SpanError::Feasible);
        }
        let n = self.n();
        let rdim = n + 1;
        let all_tags: Vec<VectorTag> = (0..2 * n)
            .map(|ix| VectorTag::new(ix / 2 + 1, (ix % 2) as u8))
            .collect();
        let weights: Vec<f64> = all_tags
            .iter()
            .map(|tag| self.program_multiplicity(*tag) as f64)
            .collect();

        // Objective w^T Q w with Q = sum over slots of v v^T.
        let mut q = DMatrix::zeros(rdim, rdim);
        for (tag, wt) in all_tags.iter().zip(weights.iter()) {
            let v = self.realized(*tag);
            for r in 0..rdim {
                for cix in 0..rdim {
                    q[(r, cix)] += wt * v[r] * v[cix];
                }
            }
        }

        let active = self.active_tags(&inst);
        let mut a = DMatrix::zeros(active.len() + 1, rdim);
        let mut b = DVector::zeros(active.len() + 1);
        for (r, (tag, _)) in active.iter().enumerate() {
            let v = self.realized(*tag);
            for cix in 0..rdim {
                a[(r, cix)] = v[cix];
            }
        }
        let t = self.realized_target();
        for cix in 0..rdim {
            a[(active.len(), cix)] = t[cix];
        }
        b[active.len()] = 1.0;

        let w = linalg::constrained_quadratic_min(&q, &a, &b)
            .ok_or(SpanError::WitnessSolveFailed)?;
        let overlaps: Vec<f64> =
            all_tags.iter().map(|tag| self.realized(*tag).dot(&w)).collect();
        let min_wsize = overlaps
            .iter()
            .zip(weights.iter())
            .map(|(o, wt)| wt * o * o)
            .sum::<f64>();

        let deg_s = inst.marked_degree_sum();
        let s_size = inst.marked_set().len();
        let proof_wsize =
            (n as f64 - s_size as f64 + deg_s as f64) / (self.gamma * self.gamma);

        let entries = all_tags
            .iter()
            .zip(overlaps.iter())
            .map(|(tag, o)| WitnessEntry {
                tag: *tag,
                value: *o,
                multiplicity: self.program_multiplicity(*tag),
            })
            .collect();
        Ok(WitnessReport {
            feasible: false,
            min_wsize,
            proof_wsize,
            bound: self.witness_size_bound(),
            residual,
            entries,
        })
    }
}
