//! Boundary invariants of a plumbing forest: the integer invariant
//! mubar = signature - [Wu surface]^2 per spin structure, the correction
//! term d per spin-c class, and the rational-homology-ball obstruction
//! verdicts, together with the identity check mubar = -4 d.
//!
//! The correction term is computed by two routes that must agree exactly:
//! a discharge-path algorithm over characteristic vectors, and a complete
//! bounded enumeration of the class (the oracle). Both are exact; there is
//! no floating point and no tolerance anywhere.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::PlumbingGraph;
use crate::lattice::{self, CharVector, CosetLattice, IntersectionForm};
use crate::matrix::{self, Rat};
use crate::rationality;
use crate::spin::{self, WuSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MubarValue {
    pub wu_set: WuSet,
    pub sigma: BigInt,
    pub wu_square: BigInt,
    pub mubar: BigInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DMethod {
    Path,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectionTerm {
    pub class_rep: CharVector,
    pub d: Rat,
    /// A class member realizing the maximum of (K^2 + n)/4.
    pub witness: CharVector,
    pub method: DMethod,
    /// False when the graph is not rational and the value is only the
    /// maximum of the degree formula, not a certified correction term.
    pub certified: bool,
}

/// mubar = sigma(Q) - 1_S^T Q 1_S for a valid Wu set.
pub fn mubar(g: &PlumbingGraph, s: &WuSet) -> Result<MubarValue> {
    let q = lattice::build_intersection_form(g);
    let c = spin::wu_char_vector(g, &q, &s.members)?;
    if c != s.char_vector {
        return Err(Error::NotWuSet(
            "stored characteristic vector does not match the member set".into(),
        ));
    }
    let summary = lattice::lattice_summary(&q);
    let wu_square = wu_square(&q, &s.members);
    let sigma = summary.sigma();
    let mubar = &sigma - &wu_square;
    Ok(MubarValue {
        wu_set: s.clone(),
        sigma,
        wu_square,
        mubar,
    })
}

/// 1_S^T Q 1_S: the self-intersection of the union of spheres over S.
pub fn wu_square(q: &IntersectionForm, s: &BTreeSet<usize>) -> BigInt {
    let mut total = BigInt::zero();
    for &i in s {
        for &j in s {
            total += q.entry(i, j);
        }
    }
    total
}

/// Number of vertices outside S whose S-neighbour count equals minus their
/// weight; these are exactly the sites where a framing reduction applies.
pub fn m_counter(g: &PlumbingGraph, s: &WuSet) -> usize {
    (0..g.len())
        .filter(|i| !s.members.contains(i))
        .filter(|&i| {
            let in_set = g
                .neighbours(i)
                .iter()
                .filter(|n| s.members.contains(n))
                .count() as i64;
            in_set == -g.weight(i)
        })
        .count()
}

/// Shared setup for the d computations.
struct DSetup {
    q: IntersectionForm,
    n: usize,
    certified: bool,
}

fn d_setup(g: &PlumbingGraph, class_rep: &CharVector, allow_uncertified: bool) -> Result<DSetup> {
    let q = lattice::build_intersection_form(g);
    if !lattice::is_negative_definite(&q) {
        return Err(Error::NotNegativeDefinite);
    }
    if !lattice::is_characteristic(&q, class_rep) {
        return Err(Error::NotCharacteristic);
    }
    let rational = rationality::laufer_rationality(g)?.is_rational();
    if !rational && !allow_uncertified {
        return Err(Error::NotRational);
    }
    Ok(DSetup {
        n: g.len(),
        q,
        certified: rational,
    })
}

/// Correction term by complete bounded enumeration: the maximum of
/// (K^2 + n)/4 over the whole class of `class_rep`. A greedy ascent seeds
/// the bound; enumeration then visits every class member whose value could
/// still reach the bound, so the returned maximum is provably global.
pub fn d_oracle(
    g: &PlumbingGraph,
    class_rep: &CharVector,
    allow_uncertified: bool,
) -> Result<CorrectionTerm> {
    let setup = d_setup(g, class_rep, allow_uncertified)?;
    let (q, n) = (&setup.q, setup.n);
    if n == 0 {
        return Ok(CorrectionTerm {
            class_rep: class_rep.clone(),
            d: Rat::zero(),
            witness: CharVector(Vec::new()),
            method: DMethod::Oracle,
            certified: setup.certified,
        });
    }
    let seed = greedy_ascent(q, class_rep);
    let enumerator = ClassEnumerator::new(q)?;
    let f_seed = -lattice::char_square(q, &seed)?;
    let f_min = enumerator.minimize(&seed.0, &f_seed);
    let witnesses = enumerator.members_at(&seed.0, &f_min);
    let witness = witnesses
        .into_iter()
        .min()
        .expect("the minimizing member is revisited at the exact bound");
    let d = (Rat::from(BigInt::from(n as i64)) - &f_min) / Rat::from(BigInt::from(4));
    debug_assert!(lattice::same_spinc(q, class_rep, &CharVector(witness.clone())).unwrap());
    Ok(CorrectionTerm {
        class_rep: class_rep.clone(),
        d,
        witness: CharVector(witness),
        method: DMethod::Oracle,
        certified: setup.certified,
    })
}

/// Walk the class toward larger K^2: adding 2 Q e_i changes K^2 by
/// 4(K_i + n_i), subtracting by 4(n_i - K_i); apply whichever increases the
/// square until K sits in the symmetric box n_i <= K_i <= -n_i.
fn greedy_ascent(q: &IntersectionForm, start: &CharVector) -> CharVector {
    let n = start.len();
    let mut k = start.0.clone();
    loop {
        let mut moved = false;
        for i in 0..n {
            let w = BigInt::from(q.weights()[i]);
            let add = k[i] > -&w;
            let sub = k[i] < w;
            if add || sub {
                let sign = if add { BigInt::one() } else { -BigInt::one() };
                for j in 0..n {
                    let t = q.entry(j, i) * 2 * &sign;
                    k[j] += t;
                }
                moved = true;
                break;
            }
        }
        if !moved {
            return CharVector(k);
        }
    }
}

/// Exact Fincke-Pohst style enumeration of a characteristic coset under the
/// positive definite form -Q, in the solved coordinates w = Q^{-1} K where
/// the coset is the coordinate-wise progression w0 + 2 Z^n and
/// f(w) = w^T (-Q) w = -K^2.
struct ClassEnumerator<'a> {
    q: &'a IntersectionForm,
    l: Vec<Vec<Rat>>,
    d: Vec<Rat>,
}

impl<'a> ClassEnumerator<'a> {
    fn new(q: &'a IntersectionForm) -> Result<Self> {
        let n = q.rank();
        let mut neg = matrix::IntMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                neg[(i, j)] = -q.entry(i, j).clone();
            }
        }
        let (l, d) = matrix::ldlt_posdef(&neg).ok_or(Error::NotNegativeDefinite)?;
        Ok(ClassEnumerator { q, l, d })
    }

    fn base_point(&self, class_member: &[BigInt]) -> Vec<Rat> {
        matrix::solve_rational(self.q.matrix(), class_member)
            .expect("negative definite forms are nonsingular")
    }

    /// Smallest attainable f over the class, starting from a known bound.
    fn minimize(&self, class_member: &[BigInt], f_bound: &Rat) -> Rat {
        let w0 = self.base_point(class_member);
        let n = w0.len();
        let mut best = f_bound.clone();
        let mut w = w0.clone();
        self.search(n, &w0, &mut w, Rat::zero(), &mut best, None);
        best
    }

    /// All class members attaining f == f_target (in K coordinates).
    fn members_at(&self, class_member: &[BigInt], f_target: &Rat) -> Vec<Vec<BigInt>> {
        let w0 = self.base_point(class_member);
        let n = w0.len();
        let mut out = Vec::new();
        let mut best = f_target.clone();
        let mut w = w0.clone();
        self.search(n, &w0, &mut w, Rat::zero(), &mut best, Some(&mut out));
        out
    }

    /// Depth-first over levels n .. 1, fixing coordinate i = level - 1 at
    /// each step. The feasible w[i] form an arithmetic progression
    /// w0[i] + 2Z clipped by the remaining quadratic budget. `collect`
    /// switches between shrink-the-bound mode and collect-at-exact-bound
    /// mode.
    fn search(
        &self,
        level: usize,
        w0: &[Rat],
        w: &mut Vec<Rat>,
        partial: Rat,
        best: &mut Rat,
        mut collect: Option<&mut Vec<Vec<BigInt>>>,
    ) {
        if level == 0 {
            match collect {
                None => {
                    if partial < *best {
                        *best = partial;
                    }
                }
                Some(out) => {
                    debug_assert!(partial >= *best);
                    if partial == *best {
                        out.push(self.q.matrix().mul_vec_rat(w));
                    }
                }
            }
            return;
        }
        let i = level - 1;
        let sigma: Rat = (level..w0.len()).map(|j| &self.l[j][i] * &w[j]).sum();
        let budget = best.clone() - &partial;
        if budget.is_negative() {
            return;
        }
        // |w_i + sigma| <= sqrt(budget / d_i), w_i in w0_i + 2Z
        let t_sq = &budget / &self.d[i];
        let offset = (-&sigma - &w0[i]) / Rat::from(BigInt::from(2));
        let halfwidth_sq = &t_sq / Rat::from(BigInt::from(4));
        let (t_lo, t_hi) = progression_range(&offset, &halfwidth_sq);
        let mut t = t_lo;
        while t <= t_hi {
            let wi = &w0[i] + Rat::from(&t * 2);
            let u = &wi + &sigma;
            let term = &self.d[i] * &u * &u;
            let next_partial = partial.clone() + &term;
            if next_partial <= *best {
                w[i] = wi;
                self.search(
                    i,
                    w0,
                    w,
                    next_partial,
                    best,
                    collect.as_mut().map(|v| &mut **v),
                );
            }
            t += 1;
        }
    }
}

/// Integer t range with (t - offset)^2 <= halfwidth_sq; empty range when
/// negative. Exact: guesses come from integer square roots and are fixed up
/// by rational comparisons.
fn progression_range(offset: &Rat, halfwidth_sq: &Rat) -> (BigInt, BigInt) {
    if halfwidth_sq.is_negative() {
        return (BigInt::one(), BigInt::zero());
    }
    let r = matrix::sqrt_floor_rat(halfwidth_sq);
    let hi_guess = floor_rat(&(offset + Rat::from(r.clone())));
    let lo_guess = -floor_rat(&(Rat::from(r) - offset));
    let ok = |t: &BigInt| {
        let diff = Rat::from(t.clone()) - offset;
        &diff * &diff <= *halfwidth_sq
    };
    let mut hi = hi_guess;
    while ok(&(&hi + 1)) {
        hi += 1;
    }
    while hi >= lo_guess && !ok(&hi) {
        hi -= 1;
    }
    let mut lo = lo_guess;
    while ok(&(&lo - 1)) {
        lo -= 1;
    }
    while lo <= hi && !ok(&lo) {
        lo += 1;
    }
    (lo, hi)
}

fn floor_rat(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

/// Outcome of one discharge path from an initial vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DischargeOutcome {
    /// Reached the terminal box n_i <= K_i <= -n_i - 2.
    Terminal { vector: CharVector, steps: usize },
    /// Some coordinate exceeded -n_i; lowest such index reported.
    Dead { exceeded_at: usize, steps: usize },
}

/// Run the discharge rewriting from `start`: while some K_i = -n_i, add
/// 2 Q e_i at the first eligible vertex in `pivot_order`; a coordinate
/// strictly above -n_i kills the path. K^2 is invariant along the path.
pub fn discharge_path(
    q: &IntersectionForm,
    start: &CharVector,
    pivot_order: &[usize],
    cap: u64,
) -> Result<DischargeOutcome> {
    let n = q.rank();
    assert_eq!(start.len(), n);
    assert_eq!(pivot_order.len(), n);
    let weights: Vec<BigInt> = q.weights().iter().map(|&w| BigInt::from(w)).collect();
    let mut k = start.0.clone();
    let mut steps = 0usize;
    loop {
        if let Some(bad) = (0..n).find(|&i| k[i] > -&weights[i]) {
            return Ok(DischargeOutcome::Dead {
                exceeded_at: bad,
                steps,
            });
        }
        let pivot = pivot_order.iter().copied().find(|&i| k[i] == -&weights[i]);
        match pivot {
            None => {
                return Ok(DischargeOutcome::Terminal {
                    vector: CharVector(k),
                    steps,
                });
            }
            Some(i) => {
                if steps as u64 >= cap {
                    return Err(Error::IterationCap { cap });
                }
                debug_assert_eq!(k[i], -&weights[i]);
                for j in 0..n {
                    let t = q.entry(j, i) * 2;
                    k[j] += t;
                }
                steps += 1;
            }
        }
    }
}

/// One discharge run from an initial vector, for trace consumers.
#[derive(Debug, Clone)]
pub struct PathRecord {
    pub start: CharVector,
    pub outcome: DischargeOutcome,
    /// (K^2 + n)/4 when the path is full.
    pub value: Option<Rat>,
}

/// Correction term by the discharge-path algorithm: run a path from every
/// characteristic vector of the class inside the initial box
/// n_i + 2 <= K_i <= -n_i and take the maximum value over paths that reach
/// a terminal vector. Must equal the oracle on rational graphs.
pub fn d_path(
    g: &PlumbingGraph,
    class_rep: &CharVector,
    allow_uncertified: bool,
) -> Result<CorrectionTerm> {
    d_path_with_trace(g, class_rep, allow_uncertified).map(|(ct, _)| ct)
}

/// As `d_path`, also returning the per-initial-vector path records.
pub fn d_path_with_trace(
    g: &PlumbingGraph,
    class_rep: &CharVector,
    allow_uncertified: bool,
) -> Result<(CorrectionTerm, Vec<PathRecord>)> {
    let setup = d_setup(g, class_rep, allow_uncertified)?;
    let (q, n) = (&setup.q, setup.n);
    if n == 0 {
        let ct = CorrectionTerm {
            class_rep: class_rep.clone(),
            d: Rat::zero(),
            witness: CharVector(Vec::new()),
            method: DMethod::Path,
            certified: setup.certified,
        };
        let record = PathRecord {
            start: CharVector(Vec::new()),
            outcome: DischargeOutcome::Terminal {
                vector: CharVector(Vec::new()),
                steps: 0,
            },
            value: Some(Rat::zero()),
        };
        return Ok((ct, vec![record]));
    }
    let coset = CosetLattice::new(q)?;
    let lo: Vec<BigInt> = q.weights().iter().map(|&w| BigInt::from(w + 2)).collect();
    let hi: Vec<BigInt> = q.weights().iter().map(|&w| BigInt::from(-w)).collect();
    let initials = coset.members_in_box(&class_rep.0, &lo, &hi);
    let order: Vec<usize> = (0..n).collect();
    let mut best: Option<(Rat, CharVector)> = None;
    let mut records = Vec::with_capacity(initials.len());
    for start in initials {
        let start = CharVector(start);
        let outcome = discharge_path(q, &start, &order, rationality::iter_cap())?;
        let mut value = None;
        if let DischargeOutcome::Terminal { vector, .. } = &outcome {
            let square = lattice::char_square(q, &start)?;
            debug_assert_eq!(square, lattice::char_square(q, vector)?);
            let v = (square + Rat::from(BigInt::from(n as i64))) / Rat::from(BigInt::from(4));
            let replace = match &best {
                None => true,
                Some((bv, bw)) => v > *bv || (v == *bv && *vector < *bw),
            };
            if replace {
                best = Some((v.clone(), vector.clone()));
            }
            value = Some(v);
        }
        records.push(PathRecord {
            start,
            outcome,
            value,
        });
    }
    let (d, witness) = best.ok_or(Error::NoFullPath)?;
    let ct = CorrectionTerm {
        class_rep: class_rep.clone(),
        d,
        witness,
        method: DMethod::Path,
        certified: setup.certified,
    };
    Ok((ct, records))
}

/// One spin structure's worth of evidence for the identity mubar = -4 d.
#[derive(Debug, Clone)]
pub struct TheoremCase {
    pub wu_set: WuSet,
    pub mubar: MubarValue,
    pub d_by_path: CorrectionTerm,
    pub d_by_oracle: CorrectionTerm,
    pub identity_holds: bool,
    pub methods_agree: bool,
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub cases: Vec<TheoremCase>,
    pub pass: bool,
}

/// Check mubar(S) = -4 d(class of c_S) for every Wu set, with d computed by
/// both routes. Identity failures come back as structured evidence, never
/// as a panic.
pub fn verify_theorem(g: &PlumbingGraph) -> Result<TheoremReport> {
    let q = lattice::build_intersection_form(g);
    if !lattice::is_negative_definite(&q) {
        return Err(Error::NotNegativeDefinite);
    }
    if !rationality::laufer_rationality(g)?.is_rational() {
        return Err(Error::NotRational);
    }
    let wu_sets = spin::enumerate_wu_sets(g, &q)?;
    let minus_four = Rat::from(BigInt::from(-4));
    let mut cases = Vec::with_capacity(wu_sets.len());
    let mut pass = true;
    for wu in wu_sets {
        let mu = mubar(g, &wu)?;
        let by_path = d_path(g, &wu.char_vector, false)?;
        let by_oracle = d_oracle(g, &wu.char_vector, false)?;
        let methods_agree = by_path.d == by_oracle.d;
        let mu_rat = Rat::from(mu.mubar.clone());
        let identity_holds =
            mu_rat == &minus_four * &by_oracle.d && mu_rat == &minus_four * &by_path.d;
        pass &= methods_agree && identity_holds;
        cases.push(TheoremCase {
            wu_set: wu,
            mubar: mu,
            d_by_path: by_path,
            d_by_oracle: by_oracle,
            identity_holds,
            methods_agree,
        });
    }
    Ok(TheoremReport { cases, pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetParity {
    Odd,
    Even,
}

#[derive(Debug, Clone)]
pub struct SpinObstruction {
    pub wu_set: WuSet,
    pub mubar: BigInt,
    pub d: Rat,
    /// d != 0: no spin-c rational homology ball bounds this spin structure.
    pub spin_c_ball_obstructed: bool,
}

#[derive(Debug, Clone)]
pub struct ObstructionVerdict {
    pub per_spin: Vec<SpinObstruction>,
    pub mubar_product: BigInt,
    /// Product of mubar over spin structures nonzero: no spin rational
    /// homology ball.
    pub spin_ball_obstructed: bool,
    pub det_parity: DetParity,
    /// Odd determinant only: nonzero mubar of the unique spin structure
    /// rules out any rational homology ball.
    pub any_ball_obstructed: Option<bool>,
}

/// The rational-homology-ball obstruction verdicts. Requires a rational
/// negative-definite graph so the d values are certified.
pub fn obstruction_report(g: &PlumbingGraph) -> Result<ObstructionVerdict> {
    let q = lattice::build_intersection_form(g);
    if !lattice::is_negative_definite(&q) {
        return Err(Error::NotNegativeDefinite);
    }
    if !rationality::laufer_rationality(g)?.is_rational() {
        return Err(Error::NotRational);
    }
    let summary = lattice::lattice_summary(&q);
    let wu_sets = spin::enumerate_wu_sets(g, &q)?;
    let mut per_spin = Vec::with_capacity(wu_sets.len());
    let mut product = BigInt::one();
    for wu in wu_sets {
        let mu = mubar(g, &wu)?;
        let d = d_oracle(g, &wu.char_vector, false)?;
        product *= &mu.mubar;
        per_spin.push(SpinObstruction {
            wu_set: wu,
            spin_c_ball_obstructed: !d.d.is_zero(),
            mubar: mu.mubar,
            d: d.d,
        });
    }
    let det_parity = if summary.det_is_odd() {
        DetParity::Odd
    } else {
        DetParity::Even
    };
    let any_ball_obstructed = if det_parity == DetParity::Odd {
        debug_assert_eq!(per_spin.len(), 1);
        Some(!per_spin[0].mubar.is_zero())
    } else {
        None
    };
    Ok(ObstructionVerdict {
        spin_ball_obstructed: !product.is_zero(),
        mubar_product: product,
        per_spin,
        det_parity,
        any_ball_obstructed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn graph(s: &str) -> PlumbingGraph {
        PlumbingGraph::parse(s).unwrap()
    }

    fn e8() -> PlumbingGraph {
        graph(
            "vertices: v1:-2 v2:-2 v3:-2 v4:-2 v5:-2 v6:-2 v7:-2 v8:-2\n\
             edges: v1-v2 v2-v3 v3-v4 v4-v5 v5-v6 v6-v7 v5-v8",
        )
    }

    fn wu_sets(g: &PlumbingGraph) -> Vec<WuSet> {
        let q = lattice::build_intersection_form(g);
        spin::enumerate_wu_sets(g, &q).unwrap()
    }

    fn rat(p: i64, q: i64) -> Rat {
        Rat::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn mubar_examples() {
        // single (-2), empty Wu set
        let g = graph("vertices: a:-2\nedges:");
        let sets = wu_sets(&g);
        let m = mubar(&g, &sets[0]).unwrap();
        assert_eq!(m.mubar, BigInt::from(-1));
        // single (-4), full Wu set: -1 - (-4) = 3
        let g = graph("vertices: a:-4\nedges:");
        let sets = wu_sets(&g);
        let full = sets.iter().find(|s| !s.members.is_empty()).unwrap();
        assert_eq!(mubar(&g, full).unwrap().mubar, BigInt::from(3));
        // E8: even lattice forces the empty Wu set; mubar = -8
        let g = e8();
        let sets = wu_sets(&g);
        assert_eq!(sets.len(), 1);
        assert!(sets[0].members.is_empty());
        assert_eq!(mubar(&g, &sets[0]).unwrap().mubar, BigInt::from(-8));
    }

    #[test]
    fn mubar_rejects_mismatched_char_vector() {
        let g = graph("vertices: a:-2\nedges:");
        let sets = wu_sets(&g);
        let mut broken = sets[0].clone();
        broken.char_vector = CharVector::from_i64(&[2]);
        assert!(mubar(&g, &broken).is_err());
    }

    #[test]
    fn m_counter_examples() {
        let g = graph("vertices: a:-2 c:-2 b:-2\nedges: a-c c-b");
        let sets = wu_sets(&g);
        let empty = &sets[0];
        assert_eq!(m_counter(&g, empty), 0);
        let ab = sets.iter().find(|s| s.members.len() == 2).unwrap();
        assert_eq!(m_counter(&g, ab), 1);
        let g = graph("vertices: v:-4\nedges:");
        let sets = wu_sets(&g);
        let full = sets.iter().find(|s| !s.members.is_empty()).unwrap();
        assert_eq!(m_counter(&g, full), 0);
    }

    #[test]
    fn d_of_boundary_s3_presentations() {
        // single (-1) bounds S^3: d = 0 with witness square -1
        let g = graph("vertices: a:-1\nedges:");
        let classes = lattice::enumerate_spinc_classes(&lattice::build_intersection_form(&g))
            .unwrap();
        assert_eq!(classes.len(), 1);
        let d = d_oracle(&g, &classes[0], false).unwrap();
        assert_eq!(d.d, Rat::zero());
        let dp = d_path(&g, &classes[0], false).unwrap();
        assert_eq!(dp.d, Rat::zero());
        // (-2)-(-1) chain also blows down to nothing
        let g = graph("vertices: a:-2 b:-1\nedges: a-b");
        let classes = lattice::enumerate_spinc_classes(&lattice::build_intersection_form(&g))
            .unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(d_oracle(&g, &classes[0], false).unwrap().d, Rat::zero());
        assert_eq!(d_path(&g, &classes[0], false).unwrap().d, Rat::zero());
    }

    #[test]
    fn d_values_of_small_lens_spaces() {
        // single (-2): classes give {1/4, -1/4}
        let g = graph("vertices: a:-2\nedges:");
        let q = lattice::build_intersection_form(&g);
        let mut ds: Vec<Rat> = lattice::enumerate_spinc_classes(&q)
            .unwrap()
            .iter()
            .map(|c| d_oracle(&g, c, false).unwrap().d)
            .collect();
        ds.sort();
        assert_eq!(ds, vec![rat(-1, 4), rat(1, 4)]);
        // single (-3): spin class has d = -1/2
        let g = graph("vertices: a:-3\nedges:");
        let spin_class = &wu_sets(&g)[0].char_vector;
        assert_eq!(d_oracle(&g, spin_class, false).unwrap().d, rat(-1, 2));
        // single (-4): d over all classes is {-3/4, 0, 0, 1/4}
        let g = graph("vertices: a:-4\nedges:");
        let q = lattice::build_intersection_form(&g);
        let mut ds: Vec<Rat> = lattice::enumerate_spinc_classes(&q)
            .unwrap()
            .iter()
            .map(|c| d_oracle(&g, c, false).unwrap().d)
            .collect();
        ds.sort();
        assert_eq!(ds, vec![rat(-3, 4), rat(0, 1), rat(0, 1), rat(1, 4)]);
    }

    /// Published lens-space values: d(L(p,1), i) = 1/4 - (2i - p)^2 / (4p)
    /// for i = 0..p, matching the boundary of a single (-p)-vertex.
    #[test]
    fn lens_space_table_cross_check() {
        for p in 2i64..=9 {
            let g = graph(&format!("vertices: a:-{p}\nedges:"));
            let q = lattice::build_intersection_form(&g);
            let mut computed: Vec<Rat> = lattice::enumerate_spinc_classes(&q)
                .unwrap()
                .iter()
                .map(|c| d_oracle(&g, c, false).unwrap().d)
                .collect();
            computed.sort();
            let mut table: Vec<Rat> = (0..p)
                .map(|i| rat(1, 4) - rat((2 * i - p) * (2 * i - p), 4 * p))
                .collect();
            table.sort();
            assert_eq!(computed, table, "L({p},1)");
        }
    }

    #[test]
    fn d_path_traces_match_spec_examples() {
        // single (-2), K = (0): immediately terminal, d = 1/4
        let g = graph("vertices: a:-2\nedges:");
        let q = lattice::build_intersection_form(&g);
        let order = [0usize];
        let out = discharge_path(&q, &CharVector::from_i64(&[0]), &order, 100).unwrap();
        assert!(matches!(out, DischargeOutcome::Terminal { steps: 0, .. }));
        // single (-2), K = (2): one discharge to (-2), value -1/4
        let out = discharge_path(&q, &CharVector::from_i64(&[2]), &order, 100).unwrap();
        match out {
            DischargeOutcome::Terminal { vector, steps } => {
                assert_eq!(steps, 1);
                assert_eq!(vector, CharVector::from_i64(&[-2]));
            }
            other => panic!("unexpected {other:?}"),
        }
        let d = d_path(&g, &CharVector::from_i64(&[2]), false).unwrap();
        assert_eq!(d.d, rat(-1, 4));
        // chain (-2)-(-2), spin class K = (0,0): terminal at once, d = 1/2
        let g = graph("vertices: a:-2 b:-2\nedges: a-b");
        let d = d_path(&g, &CharVector::from_i64(&[0, 0]), false).unwrap();
        assert_eq!(d.d, rat(1, 2));
    }

    #[test]
    fn e8_correction_term() {
        let g = e8();
        let zero = CharVector::from_i64(&[0; 8]);
        let o = d_oracle(&g, &zero, false).unwrap();
        assert_eq!(o.d, rat(2, 1));
        assert_eq!(o.witness, zero);
        let p = d_path(&g, &zero, false).unwrap();
        assert_eq!(p.d, rat(2, 1));
    }

    #[test]
    fn d_refuses_non_rational_without_override() {
        let g = graph("vertices: c:-1 a:-2 b:-3 d:-7\nedges: c-a c-b c-d");
        let q = lattice::build_intersection_form(&g);
        let class = &lattice::enumerate_spinc_classes(&q).unwrap()[0];
        assert!(matches!(
            d_oracle(&g, class, false),
            Err(Error::NotRational)
        ));
        let forced = d_oracle(&g, class, true).unwrap();
        assert!(!forced.certified);
    }

    #[test]
    fn d_refuses_indefinite_and_non_characteristic() {
        let g = graph("vertices: a:0\nedges:");
        assert!(matches!(
            d_oracle(&g, &CharVector::from_i64(&[0]), false),
            Err(Error::NotNegativeDefinite)
        ));
        let g = graph("vertices: a:-2\nedges:");
        assert!(matches!(
            d_oracle(&g, &CharVector::from_i64(&[1]), false),
            Err(Error::NotCharacteristic)
        ));
    }

    #[test]
    fn verify_theorem_fixtures() {
        // single (-2): (mubar, d) pairs {(-1, 1/4), (1, -1/4)}
        let rep = verify_theorem(&graph("vertices: a:-2\nedges:")).unwrap();
        assert!(rep.pass);
        let pairs: Vec<(i64, Rat)> = rep
            .cases
            .iter()
            .map(|c| (c.mubar.mubar.to_i64().unwrap(), c.d_by_oracle.d.clone()))
            .collect();
        assert!(pairs.contains(&(-1, rat(1, 4))));
        assert!(pairs.contains(&(1, rat(-1, 4))));
        // E8: (-8, 2)
        let rep = verify_theorem(&e8()).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.cases.len(), 1);
        assert_eq!(rep.cases[0].mubar.mubar, BigInt::from(-8));
        assert_eq!(rep.cases[0].d_by_oracle.d, rat(2, 1));
        // A3 chain: (-3, 3/4) for the empty set, (1, -1/4) for {a, b}
        let rep = verify_theorem(&graph("vertices: a:-2 c:-2 b:-2\nedges: a-c c-b")).unwrap();
        assert!(rep.pass);
        let pairs: Vec<(i64, Rat)> = rep
            .cases
            .iter()
            .map(|c| (c.mubar.mubar.to_i64().unwrap(), c.d_by_oracle.d.clone()))
            .collect();
        assert!(pairs.contains(&(-3, rat(3, 4))));
        assert!(pairs.contains(&(1, rat(-1, 4))));
    }

    #[test]
    fn verify_theorem_refuses_non_rational() {
        let g = graph("vertices: c:-1 a:-2 b:-3 d:-7\nedges: c-a c-b c-d");
        assert!(matches!(verify_theorem(&g), Err(Error::NotRational)));
    }

    #[test]
    fn obstruction_single_minus_three() {
        let v = obstruction_report(&graph("vertices: a:-3\nedges:")).unwrap();
        assert_eq!(v.det_parity, DetParity::Odd);
        assert_eq!(v.per_spin.len(), 1);
        assert_eq!(v.per_spin[0].mubar, BigInt::from(2));
        assert_eq!(v.per_spin[0].d, rat(-1, 2));
        assert_eq!(v.any_ball_obstructed, Some(true));
        assert!(v.spin_ball_obstructed);
    }

    #[test]
    fn obstruction_single_minus_four() {
        let v = obstruction_report(&graph("vertices: a:-4\nedges:")).unwrap();
        assert_eq!(v.det_parity, DetParity::Even);
        assert_eq!(v.mubar_product, BigInt::from(-3));
        assert!(v.spin_ball_obstructed);
        assert_eq!(v.any_ball_obstructed, None);
        let ds: Vec<Rat> = v.per_spin.iter().map(|s| s.d.clone()).collect();
        assert!(ds.contains(&rat(1, 4)));
        assert!(ds.contains(&rat(-3, 4)));
        assert!(v.per_spin.iter().all(|s| s.spin_c_ball_obstructed));
    }

    #[test]
    fn obstruction_single_minus_one_is_clean() {
        let v = obstruction_report(&graph("vertices: a:-1\nedges:")).unwrap();
        assert_eq!(v.per_spin.len(), 1);
        assert_eq!(v.per_spin[0].mubar, BigInt::zero());
        assert_eq!(v.per_spin[0].d, Rat::zero());
        assert!(!v.spin_ball_obstructed);
        assert_eq!(v.any_ball_obstructed, Some(false));
    }

    #[test]
    fn discharge_outcome_is_pivot_order_independent_small() {
        let g = graph("vertices: a:-2 b:-3 c:-2\nedges: a-b b-c");
        let q = lattice::build_intersection_form(&g);
        let coset = CosetLattice::new(&q).unwrap();
        let lo: Vec<BigInt> = q.weights().iter().map(|&w| BigInt::from(w + 2)).collect();
        let hi: Vec<BigInt> = q.weights().iter().map(|&w| BigInt::from(-w)).collect();
        let base = CharVector::from_i64(&[-2, -3, -2]);
        let orders: Vec<Vec<usize>> = vec![
            vec![0, 1, 2],
            vec![2, 1, 0],
            vec![1, 2, 0],
            vec![2, 0, 1],
        ];
        for start in coset.members_in_box(&base.0, &lo, &hi) {
            let start = CharVector(start);
            let outcomes: Vec<_> = orders
                .iter()
                .map(|o| discharge_path(&q, &start, o, 10_000).unwrap())
                .collect();
            let kinds: Vec<bool> = outcomes
                .iter()
                .map(|o| matches!(o, DischargeOutcome::Terminal { .. }))
                .collect();
            assert!(kinds.iter().all(|&k| k == kinds[0]));
            let squares: Vec<Rat> = outcomes
                .iter()
                .filter_map(|o| match o {
                    DischargeOutcome::Terminal { vector, .. } => {
                        Some(lattice::char_square(&q, vector).unwrap())
                    }
                    _ => None,
                })
                .collect();
            assert!(squares.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn empty_graph_invariants() {
        let g = PlumbingGraph::empty();
        let rep = verify_theorem(&g).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.cases.len(), 1);
        assert_eq!(rep.cases[0].mubar.mubar, BigInt::zero());
        assert_eq!(rep.cases[0].d_by_oracle.d, Rat::zero());
    }
}
