//! The plumbing intersection lattice: determinant, definiteness, signature,
//! Smith normal form, and characteristic-vector algebra, all in exact
//! arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;
use crate::matrix::{self, IntMat, Rat};

/// Symmetric intersection form of a plumbing graph: diagonal entries are
/// the weights, off-diagonal entries are 1 exactly on edges. Rows and
/// columns follow the canonical (declaration) vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionForm {
    mat: IntMat,
    weights: Vec<i64>,
}

impl IntersectionForm {
    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn matrix(&self) -> &IntMat {
        &self.mat
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.mat[(i, j)]
    }
}

/// Integer evaluation vector K with K_i congruent to the weight n_i mod 2.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharVector(pub Vec<BigInt>);

impl CharVector {
    pub fn from_i64(v: &[i64]) -> Self {
        CharVector(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> Self {
        CharVector(self.0.iter().map(|x| -x).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum H1Order {
    Finite(BigInt),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSummary {
    pub det: BigInt,
    /// (n+, n-, n0) inertia of Q.
    pub signature: (usize, usize, usize),
    /// Nonzero invariant factors of Q, in divisibility order.
    pub invariant_factors: Vec<BigInt>,
    pub h1_order: H1Order,
    /// dim of H1 tensored with Z/2: even invariant factors plus corank.
    pub dim_h1_mod2: usize,
}

impl LatticeSummary {
    pub fn sigma(&self) -> BigInt {
        BigInt::from(self.signature.0 as i64) - BigInt::from(self.signature.1 as i64)
    }

    pub fn det_is_odd(&self) -> bool {
        self.det.is_odd()
    }
}

pub fn build_intersection_form(g: &PlumbingGraph) -> IntersectionForm {
    let n = g.len();
    let mut mat = IntMat::zeros(n, n);
    for i in 0..n {
        mat[(i, i)] = BigInt::from(g.weight(i));
    }
    for (a, b) in g.edges() {
        mat[(a, b)] = BigInt::one();
        mat[(b, a)] = BigInt::one();
    }
    IntersectionForm {
        mat,
        weights: g.vertices().iter().map(|v| v.weight).collect(),
    }
}

pub fn lattice_summary(q: &IntersectionForm) -> LatticeSummary {
    let det = matrix::det_bareiss(&q.mat);
    let signature = matrix::ldlt_signature(&q.mat);
    let snf = matrix::smith_normal_form(&q.mat);
    let invariant_factors: Vec<BigInt> = snf.diag[..snf.rank].to_vec();
    let corank = q.rank() - snf.rank;
    let dim_h1_mod2 =
        invariant_factors.iter().filter(|d| d.is_even()).count() + corank;
    let h1_order = if det.is_zero() {
        H1Order::Infinite
    } else {
        H1Order::Finite(det.abs())
    };
    LatticeSummary {
        det,
        signature,
        invariant_factors,
        h1_order,
        dim_h1_mod2,
    }
}

/// Exact negative-definiteness test: the k-th leading principal minor must
/// carry sign (-1)^k for every k.
pub fn is_negative_definite(q: &IntersectionForm) -> bool {
    let n = q.rank();
    let minors = matrix::leading_principal_minors(&q.mat);
    for (k, minor) in minors.iter().enumerate().take(n) {
        let ok = if k % 2 == 0 {
            minor.is_negative()
        } else {
            minor.is_positive()
        };
        if !ok {
            return false;
        }
    }
    true
}

pub fn is_characteristic(q: &IntersectionForm, k: &CharVector) -> bool {
    k.len() == q.rank()
        && k.0
            .iter()
            .zip(q.weights())
            .all(|(ki, &w)| (ki - BigInt::from(w)).is_even())
}

/// K^T Q^{-1} K as an exact rational.
pub fn char_square(q: &IntersectionForm, k: &CharVector) -> Result<Rat> {
    if k.len() != q.rank() {
        return Err(Error::NotCharacteristic);
    }
    if q.rank() == 0 {
        return Ok(Rat::zero());
    }
    let x = matrix::solve_rational(&q.mat, &k.0).ok_or(Error::SingularForm)?;
    Ok(k.0
        .iter()
        .zip(&x)
        .map(|(ki, xi)| Rat::from(ki.clone()) * xi)
        .sum())
}

/// Do two characteristic vectors represent the same boundary spin-c
/// structure, i.e. is (K' - K)/2 in the image lattice Q Z^n?
pub fn same_spinc(q: &IntersectionForm, k: &CharVector, k2: &CharVector) -> Result<bool> {
    if !is_characteristic(q, k) || !is_characteristic(q, k2) {
        return Err(Error::NotCharacteristic);
    }
    let mut half = Vec::with_capacity(q.rank());
    for (a, b) in k2.0.iter().zip(&k.0) {
        let d = a - b;
        if d.is_odd() {
            return Err(Error::NotSameCharCoset);
        }
        half.push(d / 2);
    }
    if q.rank() == 0 {
        return Ok(true);
    }
    let snf = matrix::smith_normal_form(&q.mat);
    Ok(matrix::solve_integer(&snf, &half).is_some())
}

/// Search state shared by the coset enumeration helpers: a lower-triangular
/// HNF basis of 2*Q Z^n, so that members of a characteristic coset can be
/// walked coordinate-by-coordinate.
pub(crate) struct CosetLattice {
    h: IntMat,
}

impl CosetLattice {
    pub(crate) fn new(q: &IntersectionForm) -> Result<Self> {
        if matrix::det_bareiss(&q.mat).is_zero() {
            return Err(Error::SingularForm);
        }
        let n = q.rank();
        let mut doubled = q.mat.clone();
        for i in 0..n {
            for j in 0..n {
                let t = &doubled[(i, j)] * 2;
                doubled[(i, j)] = t;
            }
        }
        Ok(CosetLattice {
            h: matrix::hnf_lower(&doubled),
        })
    }

    /// All members K of base + 2 Q Z^n with lo[i] <= K_i <= hi[i], in
    /// lexicographic order.
    pub(crate) fn members_in_box(
        &self,
        base: &[BigInt],
        lo: &[BigInt],
        hi: &[BigInt],
    ) -> Vec<Vec<BigInt>> {
        let mut out = Vec::new();
        self.walk_box(base, lo, hi, false, &mut out);
        out
    }

    /// Lexicographically smallest member in the box, if any.
    pub(crate) fn first_in_box(
        &self,
        base: &[BigInt],
        lo: &[BigInt],
        hi: &[BigInt],
    ) -> Option<Vec<BigInt>> {
        let mut out = Vec::new();
        self.walk_box(base, lo, hi, true, &mut out);
        out.into_iter().next()
    }

    fn walk_box(
        &self,
        base: &[BigInt],
        lo: &[BigInt],
        hi: &[BigInt],
        stop_at_first: bool,
        out: &mut Vec<Vec<BigInt>>,
    ) {
        let n = self.h.rows();
        if n == 0 {
            out.push(Vec::new());
            return;
        }
        let mut current = base.to_vec();
        self.descend(0, &mut current, lo, hi, stop_at_first, out);
    }

    /// Fix coordinates in canonical order; the lower-triangular basis means
    /// choosing y_level shifts only coordinates >= level. Iterating the
    /// feasible y range in increasing K order yields lexicographic output.
    fn descend(
        &self,
        level: usize,
        current: &mut Vec<BigInt>,
        lo: &[BigInt],
        hi: &[BigInt],
        stop_at_first: bool,
        out: &mut Vec<Vec<BigInt>>,
    ) -> bool {
        let n = self.h.rows();
        if level == n {
            out.push(current.clone());
            return stop_at_first;
        }
        let step = &self.h[(level, level)];
        debug_assert!(step.is_positive());
        // K_level = current[level] + y * step must land in [lo, hi]
        let y_min = (&lo[level] - &current[level]).div_ceil(step);
        let y_max = (&hi[level] - &current[level]).div_floor(step);
        let mut y = y_min.clone();
        while y <= y_max {
            let mut next = current.clone();
            for r in level..n {
                let t = &self.h[(r, level)] * &y;
                next[r] += t;
            }
            if self.descend(level + 1, &mut next, lo, hi, stop_at_first, out) {
                return true;
            }
            y += 1;
        }
        false
    }
}

/// One canonical representative per spin-c class: the lexicographically
/// smallest characteristic vector of each class found in the symmetric box
/// n_i <= K_i <= -n_i (enlarged by 2 per coordinate until every class has a
/// member). Representatives are returned in lexicographic order.
pub fn enumerate_spinc_classes(q: &IntersectionForm) -> Result<Vec<CharVector>> {
    if !is_negative_definite(q) {
        return Err(Error::NotNegativeDefinite);
    }
    let n = q.rank();
    if n == 0 {
        return Ok(vec![CharVector(Vec::new())]);
    }
    let det = matrix::det_bareiss(&q.mat);
    let class_count = det.abs();
    let coset = CosetLattice::new(q)?;
    // base characteristic vector: the diagonal itself
    let base: Vec<BigInt> = q.weights().iter().map(|&w| BigInt::from(w)).collect();
    // one base member per class: base + 2*r over the residues of Q Z^n
    let h_single = matrix::hnf_lower(&q.mat);
    let mut residues: Vec<Vec<BigInt>> = vec![Vec::new()];
    for i in 0..n {
        let cap = h_single[(i, i)].abs();
        let mut grown = Vec::new();
        for r in residues {
            let mut v = BigInt::zero();
            while v < cap {
                let mut next = r.clone();
                next.push(v.clone());
                grown.push(next);
                v += 1;
            }
        }
        residues = grown;
    }
    debug_assert_eq!(BigInt::from(residues.len()), class_count);

    let mut grow = BigInt::zero();
    loop {
        let lo: Vec<BigInt> = q
            .weights()
            .iter()
            .map(|&w| BigInt::from(w) - &grow)
            .collect();
        let hi: Vec<BigInt> = q
            .weights()
            .iter()
            .map(|&w| BigInt::from(-w) + &grow)
            .collect();
        let mut reps: Vec<CharVector> = Vec::with_capacity(residues.len());
        let mut complete = true;
        for r in &residues {
            let member: Vec<BigInt> = base
                .iter()
                .zip(r)
                .map(|(b, ri)| b + ri * 2)
                .collect();
            match coset.first_in_box(&member, &lo, &hi) {
                Some(k) => reps.push(CharVector(k)),
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if complete {
            reps.sort();
            debug_assert_eq!(BigInt::from(reps.len()), class_count);
            return Ok(reps);
        }
        grow += 2;
    }
}
