//! Explicit-coordinate form of the graph-collision span program.
//!
//! Serves as an independent oracle for the Gram-implicit path: vectors are
//! materialized over the full 2^n basis (vertex j reads bit j-1 of the basis
//! index) and every operation here works on raw coordinates, never on the
//! closed-form Gram entries. Feasible only for small n.

use super::{GcSpanProgram, SpanError, VectorTag};
use crate::linalg;
use nalgebra::{DMatrix, DVector};

pub const EXPLICIT_MAX_N: usize = 14;
/// The dense negative-witness program is dim^2 in memory; cap it lower.
pub const NEGATIVE_QP_MAX_N: usize = 10;

#[derive(Debug, Clone)]
pub struct TaggedVector {
    pub tag: VectorTag,
    pub coords: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct ExplicitSpanProgram {
    pub dim: usize,
    pub target: DVector<f64>,
    /// families[j-1][b] is the vector list made available when x_j = b.
    pub families: Vec<[Vec<TaggedVector>; 2]>,
}

fn s_vector(n: usize, tag: VectorTag) -> DVector<f64> {
    let dim = 1usize << n;
    DVector::from_fn(dim, |z, _| {
        if (z >> (tag.vertex - 1)) & 1 == tag.bit as usize {
            1.0
        } else {
            0.0
        }
    })
}

impl GcSpanProgram {
    pub fn to_explicit(&self) -> Result<ExplicitSpanProgram, SpanError> {
        let n = self.n();
        if n > EXPLICIT_MAX_N {
            return Err(SpanError::TooLargeForExplicit(n));
        }
        let dim = 1usize << n;
        let target = DVector::from_element(dim, self.gamma());
        let families = (1..=n)
            .map(|j| {
                let mut avail = Vec::with_capacity(1 + self.graph().degree(j));
                let tag = VectorTag::new(j, 0);
                avail.push(TaggedVector { tag, coords: s_vector(n, tag) });
                for &i in self.graph().neighbors(j) {
                    let tag = VectorTag::new(i, 1);
                    avail.push(TaggedVector { tag, coords: s_vector(n, tag) });
                }
                [Vec::new(), avail]
            })
            .collect();
        Ok(ExplicitSpanProgram { dim, target, families })
    }
}

impl ExplicitSpanProgram {
    fn n(&self) -> usize {
        self.families.len()
    }

    /// Every slot the marking makes available, duplicates included.
    fn available_slots(&self, x: &[bool]) -> Vec<&TaggedVector> {
        x.iter()
            .enumerate()
            .flat_map(|(j0, &m)| self.families[j0][usize::from(m)].iter())
            .collect()
    }

    fn available_matrix(&self, x: &[bool]) -> DMatrix<f64> {
        let slots = self.available_slots(x);
        let mut v = DMatrix::zeros(self.dim, slots.len());
        for (c, tv) in slots.iter().enumerate() {
            v.set_column(c, &tv.coords);
        }
        v
    }

    /// Integer count of basis states shared by two s-vectors; lets callers
    /// reproduce Gram entries exactly, without summing floats.
    pub fn s_overlap_count(&self, a: VectorTag, b: VectorTag) -> u64 {
        let n = self.n();
        if a.vertex == b.vertex {
            if a.bit == b.bit {
                1u64 << (n - 1)
            } else {
                0
            }
        } else {
            1u64 << (n - 2)
        }
    }

    /// Number of one-entries of an s-vector, counted from coordinates.
    pub fn ones_count(&self, a: VectorTag) -> u64 {
        self.families
            .iter()
            .flat_map(|f| f[1].iter())
            .find(|tv| tv.tag == a)
            .map(|tv| tv.coords.iter().filter(|&&c| c == 1.0).count() as u64)
            .unwrap_or((self.dim as u64) / 2)
    }

    /// Membership by raw least squares on the coordinate matrix.
    pub fn evaluate(&self, x: &[bool], tol: f64) -> bool {
        let v = self.available_matrix(x);
        if v.ncols() == 0 {
            return false;
        }
        let w = linalg::lstsq_min_norm(&v, &self.target);
        let resid = (&v * w - &self.target).norm_squared();
        resid / self.target.norm_squared() <= tol
    }

    /// Minimal positive witness size: minimum-norm coefficients over the
    /// slot-expanded coordinate matrix.
    pub fn min_positive_witness_size(&self, x: &[bool], tol: f64) -> Result<f64, SpanError> {
        let v = self.available_matrix(x);
        if v.ncols() == 0 {
            return Err(SpanError::NotFeasible);
        }
        let w = linalg::lstsq_min_norm(&v, &self.target);
        let resid = (&v * &w - &self.target).norm_squared() / self.target.norm_squared();
        if resid > tol {
            return Err(SpanError::NotFeasible);
        }
        Ok(w.norm_squared())
    }

    /// Minimal negative witness size by a dense quadratic program over the
    /// full coordinate space.
    pub fn min_negative_witness_size(&self, x: &[bool], tol: f64) -> Result<f64, SpanError> {
        let n = self.n();
        if n > NEGATIVE_QP_MAX_N {
            return Err(SpanError::TooLargeForExplicit(n));
        }
        if self.evaluate(x, tol) {
            return Err(SpanError::Feasible);
        }

        // Objective counts every slot of every family.
        let mut q = DMatrix::zeros(self.dim, self.dim);
        for fam in &self.families {
            for tv in &fam[1] {
                q += &tv.coords * tv.coords.transpose();
            }
        }

        let mut active = self.available_slots(x);
        active.dedup_by_key(|tv| tv.tag);
        let mut a = DMatrix::zeros(active.len() + 1, self.dim);
        let mut b = DVector::zeros(active.len() + 1);
        for (r, tv) in active.iter().enumerate() {
            a.set_row(r, &tv.coords.transpose());
        }
        a.set_row(active.len(), &self.target.transpose());
        b[active.len()] = 1.0;

        let w = linalg::constrained_quadratic_min(&q, &a, &b)
            .ok_or(SpanError::WitnessSolveFailed)?;
        Ok((w.transpose() * &q * &w)[(0, 0)])
    }
}
