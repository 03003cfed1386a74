//! The analysis report: one fully evaluated graph rendered as a stable,
//! schema-validated JSON document. Every computed value is serialized
//! exactly: integers as decimal strings, rationals as "p/q" in lowest
//! terms. Field order is fixed by the struct definitions, so reports are
//! byte-stable for a fixed input and tool version.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use plumb_core::invariants::{d_path_with_trace, DetParity, DischargeOutcome};
use plumb_core::lattice::CharVector;
use plumb_core::rationality::{LauferAction, LauferTrace};
use plumb_core::*;
use std::result::Result;

pub const TOOL_NAME: &str = "plumb";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Documented once per report: the sign conventions the values follow.
pub const CONVENTION: &str =
    "mubar = signature(Q) - wu_square; d = max over the class of (K^2 + n)/4";

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub trace: bool,
    pub uncertified_d: bool,
    /// Largest spin-c class count for which the per-class table is built.
    pub class_cap: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            trace: false,
            uncertified_d: false,
            class_cap: 4096,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub tool: ToolInfo,
    pub input: String,
    pub options: OptionsEcho,
    pub graph: GraphEcho,
    pub lattice: LatticeInfo,
    pub h1_mod2_reduction: ReductionInfo,
    pub negative_definite: bool,
    pub rationality: RationalityInfo,
    pub spin_structures: SpinSection,
    pub spin_c_classes: SpinCSection,
    pub obstructions: Option<ObstructionInfo>,
    pub obstructions_omitted_reason: Option<String>,
    /// "pass", "fail", or "not_applicable" (d values unavailable).
    pub theorem_check: String,
    pub convention: String,
}

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Serialize)]
pub struct OptionsEcho {
    pub trace: bool,
    pub uncertified_d: bool,
    pub class_cap: usize,
}

#[derive(Debug, Serialize)]
pub struct GraphEcho {
    pub vertices: Vec<VertexEcho>,
    pub edges: Vec<[String; 2]>,
    pub plumb: String,
}

#[derive(Debug, Serialize)]
pub struct VertexEcho {
    pub id: String,
    pub weight: i64,
}

#[derive(Debug, Serialize)]
pub struct LatticeInfo {
    pub matrix: Vec<Vec<i64>>,
    pub det: String,
    pub signature: SignatureInfo,
    pub invariant_factors: Vec<String>,
    /// Decimal string, or "infinite" when det = 0.
    pub h1_order: String,
    pub dim_h1_mod2: usize,
}

#[derive(Debug, Serialize)]
pub struct SignatureInfo {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

#[derive(Debug, Serialize)]
pub struct ReductionInfo {
    pub p: usize,
    pub q: usize,
    pub moves: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<ReductionStepEcho>>,
}

#[derive(Debug, Serialize)]
pub struct ReductionStepEcho {
    /// 1 erases leaf and neighbour, 2 erases the leaf and flips the
    /// neighbour's parity.
    pub r#move: u8,
    pub leaf: String,
    pub neighbour: String,
}

#[derive(Debug, Serialize)]
pub struct RationalityInfo {
    pub verdict: String,
    pub final_cycle: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<LauferTraceEcho>,
}

#[derive(Debug, Serialize)]
pub struct LauferTraceEcho {
    pub cycles: Vec<Vec<String>>,
    pub steps: Vec<LauferStepEcho>,
}

#[derive(Debug, Serialize)]
pub struct LauferStepEcho {
    pub vertex: String,
    pub product: String,
    pub action: String,
}

#[derive(Debug, Serialize)]
pub struct SpinSection {
    pub count: usize,
    pub per_spin: Vec<SpinRow>,
    pub d_refused_reason: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SpinRow {
    pub wu_set: Vec<String>,
    pub char_vector: Vec<String>,
    pub sigma: String,
    pub wu_square: String,
    pub mubar: String,
    pub m_counter: usize,
    pub d: Option<String>,
    pub d_path: Option<String>,
    pub d_certified: Option<bool>,
    pub identity_mubar_eq_minus_4d: Option<bool>,
    pub d_methods_agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discharge: Option<Vec<DischargeRecordEcho>>,
}

#[derive(Debug, Serialize)]
pub struct DischargeRecordEcho {
    pub start: Vec<String>,
    pub outcome: String,
    pub steps: usize,
    pub terminal: Option<Vec<String>>,
    pub value: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SpinCSection {
    pub count: String,
    pub classes: Option<Vec<SpinCRow>>,
    pub omitted_reason: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SpinCRow {
    pub rep: Vec<String>,
    pub d: Option<String>,
    pub witness: Option<Vec<String>>,
    pub spin: bool,
    pub wu_set: Option<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct ObstructionInfo {
    pub per_spin: Vec<ObstructionRow>,
    pub mubar_product: String,
    pub spin_ball_obstructed: bool,
    pub det_parity: String,
    pub any_ball_obstructed: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct ObstructionRow {
    pub wu_set: Vec<String>,
    pub mubar: String,
    pub d: String,
    pub spin_c_ball_obstructed: bool,
}

fn rat_str(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn vec_str(v: &[BigInt]) -> Vec<String> {
    v.iter().map(BigInt::to_string).collect()
}

fn char_vec_str(c: &CharVector) -> Vec<String> {
    vec_str(&c.0)
}

/// Analysis failure modes the CLI maps to exit codes.
#[derive(Debug)]
pub enum AnalysisRefusal {
    /// Exit 3: a precondition refused the pipeline.
    Precondition(String),
    /// Exit 2: the input could not be read or parsed.
    Input(String),
}

/// Run the full pipeline on one graph and assemble the report.
pub fn build_report(
    g: &PlumbingGraph,
    input: &str,
    opts: &AnalyzeOptions,
) -> Result<AnalysisReport, AnalysisRefusal> {
    let q = build_intersection_form(g);
    let summary = lattice_summary(&q);
    if !is_negative_definite(&q) {
        return Err(AnalysisRefusal::Precondition(
            "not negative definite".into(),
        ));
    }
    let reduction = reduce_mod2(g);
    let laufer = laufer_rationality(g)
        .map_err(|e| AnalysisRefusal::Precondition(e.to_string()))?;
    let rational = laufer.is_rational();
    let wu_sets = enumerate_wu_sets(g, &q)
        .map_err(|e| AnalysisRefusal::Precondition(e.to_string()))?;

    let d_allowed = rational || opts.uncertified_d;
    let d_refused_reason = if d_allowed {
        None
    } else {
        Some("graph is not rational; rerun with --uncertified-d for formula values".to_string())
    };

    let minus_four = BigRational::from(BigInt::from(-4));
    let mut per_spin = Vec::with_capacity(wu_sets.len());
    let mut theorem_pass: Option<bool> = if d_allowed && rational {
        Some(true)
    } else {
        None
    };
    for wu in &wu_sets {
        let mu = mubar(g, wu).map_err(|e| AnalysisRefusal::Precondition(e.to_string()))?;
        let (d, dp, certified, identity, agree, discharge) = if d_allowed {
            let oracle = d_oracle(g, &wu.char_vector, opts.uncertified_d)
                .map_err(|e| AnalysisRefusal::Precondition(e.to_string()))?;
            let path = d_path_with_trace(g, &wu.char_vector, opts.uncertified_d);
            let (path_value, records) = match path {
                Ok((ct, recs)) => (Some(ct.d), recs),
                Err(Error::NoFullPath) if !rational => (None, Vec::new()),
                Err(e) => return Err(AnalysisRefusal::Precondition(e.to_string())),
            };
            let identity = BigRational::from(mu.mubar.clone()) == &minus_four * &oracle.d;
            let agree = path_value.as_ref().map(|p| *p == oracle.d);
            if rational {
                if let Some(t) = theorem_pass.as_mut() {
                    *t &= identity && agree == Some(true);
                }
            }
            let discharge = opts.trace.then(|| {
                records
                    .iter()
                    .map(|r| {
                        let (outcome, steps, terminal) = match &r.outcome {
                            DischargeOutcome::Terminal { vector, steps } => {
                                ("terminal", *steps, Some(char_vec_str(vector)))
                            }
                            DischargeOutcome::Dead { steps, .. } => ("dead", *steps, None),
                        };
                        DischargeRecordEcho {
                            start: char_vec_str(&r.start),
                            outcome: outcome.to_string(),
                            steps,
                            terminal,
                            value: r.value.as_ref().map(rat_str),
                        }
                    })
                    .collect()
            });
            (
                Some(rat_str(&oracle.d)),
                path_value.as_ref().map(rat_str),
                Some(oracle.certified),
                Some(identity),
                agree,
                discharge,
            )
        } else {
            (None, None, None, None, None, None)
        };
        per_spin.push(SpinRow {
            wu_set: wu.ids(g).iter().map(|s| s.to_string()).collect(),
            char_vector: char_vec_str(&wu.char_vector),
            sigma: mu.sigma.to_string(),
            wu_square: mu.wu_square.to_string(),
            mubar: mu.mubar.to_string(),
            m_counter: m_counter(g, wu),
            d,
            d_path: dp,
            d_certified: certified,
            identity_mubar_eq_minus_4d: identity,
            d_methods_agree: agree,
            discharge,
        });
    }

    let class_count = summary.det.magnitude().clone();
    let spin_c_classes = if class_count > num_bigint::BigUint::from(opts.class_cap) {
        SpinCSection {
            count: class_count.to_string(),
            classes: None,
            omitted_reason: Some(format!(
                "{} spin-c classes exceed the table cap of {}",
                class_count, opts.class_cap
            )),
        }
    } else {
        let reps = enumerate_spinc_classes(&q)
            .map_err(|e| AnalysisRefusal::Precondition(e.to_string()))?;
        let mut rows = Vec::with_capacity(reps.len());
        for rep in &reps {
            let matching_wu = wu_sets
                .iter()
                .find(|wu| same_spinc(&q, rep, &wu.char_vector).unwrap_or(false));
            let (d, witness) = if d_allowed {
                let ct = d_oracle(g, rep, opts.uncertified_d)
                    .map_err(|e| AnalysisRefusal::Precondition(e.to_string()))?;
                (Some(rat_str(&ct.d)), Some(char_vec_str(&ct.witness)))
            } else {
                (None, None)
            };
            rows.push(SpinCRow {
                rep: char_vec_str(rep),
                d,
                witness,
                spin: matching_wu.is_some(),
                wu_set: matching_wu.map(|wu| wu.ids(g).iter().map(|s| s.to_string()).collect()),
            });
        }
        SpinCSection {
            count: class_count.to_string(),
            classes: Some(rows),
            omitted_reason: None,
        }
    };

    let (obstructions, obstructions_omitted_reason) = if rational {
        let v = obstruction_report(g)
            .map_err(|e| AnalysisRefusal::Precondition(e.to_string()))?;
        (
            Some(ObstructionInfo {
                per_spin: v
                    .per_spin
                    .iter()
                    .map(|s| ObstructionRow {
                        wu_set: s.wu_set.ids(g).iter().map(|x| x.to_string()).collect(),
                        mubar: s.mubar.to_string(),
                        d: rat_str(&s.d),
                        spin_c_ball_obstructed: s.spin_c_ball_obstructed,
                    })
                    .collect(),
                mubar_product: v.mubar_product.to_string(),
                spin_ball_obstructed: v.spin_ball_obstructed,
                det_parity: match v.det_parity {
                    DetParity::Odd => "odd".to_string(),
                    DetParity::Even => "even".to_string(),
                },
                any_ball_obstructed: v.any_ball_obstructed,
            }),
            None,
        )
    } else {
        (
            None,
            Some(
                "graph is not rational; the obstruction statements assume a rational graph"
                    .to_string(),
            ),
        )
    };

    let theorem_check = match theorem_pass {
        Some(true) => "pass",
        Some(false) => "fail",
        None => "not_applicable",
    }
    .to_string();

    Ok(AnalysisReport {
        tool: ToolInfo {
            name: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
        },
        input: input.to_string(),
        options: OptionsEcho {
            trace: opts.trace,
            uncertified_d: opts.uncertified_d,
            class_cap: opts.class_cap,
        },
        graph: GraphEcho {
            vertices: g
                .vertices()
                .iter()
                .map(|v| VertexEcho {
                    id: v.id.clone(),
                    weight: v.weight,
                })
                .collect(),
            edges: g
                .edges()
                .map(|(a, b)| [g.id(a).to_string(), g.id(b).to_string()])
                .collect(),
            plumb: g.to_plumb(),
        },
        lattice: LatticeInfo {
            matrix: (0..g.len())
                .map(|i| {
                    (0..g.len())
                        .map(|j| q.entry(i, j).to_i64().expect("entries are small"))
                        .collect()
                })
                .collect(),
            det: summary.det.to_string(),
            signature: SignatureInfo {
                positive: summary.signature.0,
                negative: summary.signature.1,
                zero: summary.signature.2,
            },
            invariant_factors: summary
                .invariant_factors
                .iter()
                .map(BigInt::to_string)
                .collect(),
            h1_order: match &summary.h1_order {
                H1Order::Finite(n) => n.to_string(),
                H1Order::Infinite => "infinite".to_string(),
            },
            dim_h1_mod2: summary.dim_h1_mod2,
        },
        h1_mod2_reduction: ReductionInfo {
            p: reduction.p,
            q: reduction.q,
            moves: reduction.steps.len(),
            steps: opts.trace.then(|| {
                reduction
                    .steps
                    .iter()
                    .map(|s| ReductionStepEcho {
                        r#move: s.mv.code(),
                        leaf: g.id(s.leaf).to_string(),
                        neighbour: g.id(s.neighbour).to_string(),
                    })
                    .collect()
            }),
        },
        negative_definite: true,
        rationality: RationalityInfo {
            verdict: if rational { "rational" } else { "not_rational" }.to_string(),
            final_cycle: vec_str(&laufer.final_cycle),
            trace: opts.trace.then(|| laufer_trace_echo(g, &laufer)),
        },
        spin_structures: SpinSection {
            count: per_spin.len(),
            per_spin,
            d_refused_reason,
        },
        spin_c_classes,
        obstructions,
        obstructions_omitted_reason,
        theorem_check,
        convention: CONVENTION.to_string(),
    })
}

fn laufer_trace_echo(g: &PlumbingGraph, t: &LauferTrace) -> LauferTraceEcho {
    LauferTraceEcho {
        cycles: t.cycles.iter().map(|c| vec_str(c)).collect(),
        steps: t
            .steps
            .iter()
            .map(|s| LauferStepEcho {
                vertex: g.id(s.vertex).to_string(),
                product: s.product.to_string(),
                action: match s.action {
                    LauferAction::Continue => "continue",
                    LauferAction::Increment => "increment",
                    LauferAction::HaltNotRational => "halt_not_rational",
                    LauferAction::HaltRational => "halt_rational",
                }
                .to_string(),
            })
            .collect(),
    }
}

