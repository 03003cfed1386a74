//! Rationality of a negative-definite plumbing graph via Laufer's
//! computation sequence, plus the weight-plus-degree necessary condition
//! used as a generator pre-filter.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;
use crate::lattice;

/// Default bound on scanned products before the run is abandoned as an
/// internal error (never a verdict). Overridable per call; the CLI wires
/// this to PLUMB_ITER_CAP.
pub const DEFAULT_ITER_CAP: u64 = 1_000_000;

static ITER_CAP: std::sync::atomic::AtomicU64 =
    std::sync::atomic::AtomicU64::new(DEFAULT_ITER_CAP);

/// Process-wide override of the iteration guard used by callers that do not
/// pass an explicit cap.
pub fn set_iter_cap(cap: u64) {
    ITER_CAP.store(cap, std::sync::atomic::Ordering::Relaxed);
}

pub fn iter_cap() -> u64 {
    ITER_CAP.load(std::sync::atomic::Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LauferAction {
    Continue,
    Increment,
    HaltNotRational,
    HaltRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LauferStep {
    /// Canonical index of the scanned vertex.
    pub vertex: usize,
    /// The pairing (Q K_i) at that vertex.
    pub product: BigInt,
    pub action: LauferAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RationalityVerdict {
    Rational,
    NotRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LauferTrace {
    /// Coefficient vectors K_0 (all ones), K_1, ... in increment order.
    pub cycles: Vec<Vec<BigInt>>,
    pub steps: Vec<LauferStep>,
    pub verdict: RationalityVerdict,
    pub final_cycle: Vec<BigInt>,
}

impl LauferTrace {
    pub fn is_rational(&self) -> bool {
        self.verdict == RationalityVerdict::Rational
    }
}

/// Run Laufer's loop: scan vertices in order; a product of 2 or more halts
/// with a not-rational verdict, a product of 1 bumps that coefficient and
/// restarts the scan, a clean scan of nonpositive products is rational.
pub fn laufer_rationality(g: &PlumbingGraph) -> Result<LauferTrace> {
    let order: Vec<usize> = (0..g.len()).collect();
    laufer_rationality_with(g, &order, iter_cap())
}

/// As `laufer_rationality`, with an explicit scan order and step cap. The
/// verdict and final cycle are scan-order independent; the trace is not.
pub fn laufer_rationality_with(
    g: &PlumbingGraph,
    order: &[usize],
    cap: u64,
) -> Result<LauferTrace> {
    let q = lattice::build_intersection_form(g);
    if !lattice::is_negative_definite(&q) {
        return Err(Error::NotNegativeDefinite);
    }
    assert_eq!(order.len(), g.len());
    let n = g.len();
    let mut coeff: Vec<BigInt> = vec![BigInt::one(); n];
    let mut cycles = vec![coeff.clone()];
    let mut steps: Vec<LauferStep> = Vec::new();
    let mut scanned: u64 = 0;
    if n == 0 {
        return Ok(LauferTrace {
            cycles,
            steps,
            verdict: RationalityVerdict::Rational,
            final_cycle: coeff,
        });
    }
    'outer: loop {
        let mut products = q.matrix().mul_vec(&coeff);
        for &v in order {
            scanned += 1;
            if scanned > cap {
                return Err(Error::IterationCap { cap });
            }
            let product = std::mem::take(&mut products[v]);
            if product >= BigInt::from(2) {
                steps.push(LauferStep {
                    vertex: v,
                    product,
                    action: LauferAction::HaltNotRational,
                });
                return Ok(LauferTrace {
                    cycles,
                    steps,
                    verdict: RationalityVerdict::NotRational,
                    final_cycle: coeff,
                });
            }
            if product.is_one() {
                steps.push(LauferStep {
                    vertex: v,
                    product,
                    action: LauferAction::Increment,
                });
                coeff[v] += 1;
                cycles.push(coeff.clone());
                continue 'outer;
            }
            steps.push(LauferStep {
                vertex: v,
                product,
                action: LauferAction::Continue,
            });
        }
        // clean scan: mark the last step as the rational halt
        if let Some(last) = steps.last_mut() {
            last.action = LauferAction::HaltRational;
        }
        return Ok(LauferTrace {
            cycles,
            steps,
            verdict: RationalityVerdict::Rational,
            final_cycle: coeff,
        });
    }
}

/// Necessary condition for rationality: weight plus degree at most 1 at
/// every vertex. Used as a cheap pre-filter, never as a verdict.
pub fn lemma_precheck(g: &PlumbingGraph) -> bool {
    (0..g.len()).all(|i| g.weight(i) + g.degree(i) as i64 <= 1)
}
