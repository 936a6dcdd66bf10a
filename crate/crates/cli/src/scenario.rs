//! Scenario files, built-in scenarios, and the check runner.
//!
//! A scenario names a built-in model (when its checks need one) and an
//! ordered list of checks.  Running it yields one report with a verdict per
//! check; everything in the report is deterministic, timing goes to stderr.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use fjcalc::chern::hmp_check;
use fjcalc::coeffs::{boundary_vanishing_check, BoundaryDatum, VanishingStatus};
use fjcalc::fj::{
    compact_p1, ext_dim, fj_expansion, jacobi, jacobi_object, modular_curve,
    modular_forms_object, snc_corner_toy, tensor_fj, unit_object, ExtTarget, ExtValue, FjModel,
    FjObject,
};

/// A parse- or setup-level failure: the scenario never ran.
#[derive(Debug)]
pub struct SetupError(pub String);

impl fmt::Display for SetupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SetupError {}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// built-in model tag; omitted when no check needs a model
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

/// Inclusive ranges for the boundary-data sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRanges {
    pub n0: [usize; 2],
    pub v: [usize; 2],
    pub u: [usize; 2],
}

/// How to build an object inside a check.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectSpec {
    Unit,
    /// weight-`weight` forms vanishing to order `step` along the cusp
    Forms { weight: i64, step: i64 },
    /// the punctual weight/index object on the cusp grid
    Jacobi { weight: i64, index: i64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckSpec {
    /// model well-formedness plus construction of the unit object
    Validate,
    /// report the predicate flags of one object
    Predicates { object: ObjectSpec },
    /// tensor two objects and report the resulting dimensions
    Tensor { left: ObjectSpec, right: ObjectSpec },
    /// expand an object along one stratum and locate its components
    Expansion { object: ObjectSpec, stratum: String },
    /// boundary vanishing: sweep explicit ranges, or audit the model's data
    Vanishing {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sweep: Option<SweepRanges>,
    },
    /// one Ext dimension, optionally pinned to an expected value
    Ext {
        target: ExtTarget,
        degree: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<usize>,
    },
    /// the full proportionality pipeline
    Hmp,
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::Validate => "validate",
            CheckSpec::Predicates { .. } => "predicates",
            CheckSpec::Tensor { .. } => "tensor",
            CheckSpec::Expansion { .. } => "expansion",
            CheckSpec::Vanishing { .. } => "vanishing",
            CheckSpec::Ext { .. } => "ext",
            CheckSpec::Hmp => "hmp",
        }
    }

    fn needs_model(&self) -> bool {
        !matches!(self, CheckSpec::Vanishing { sweep: Some(_) })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub details: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
}

/// Resolve a built-in model tag.
pub fn model_by_tag(tag: &str) -> Result<FjModel, SetupError> {
    match tag {
        "modular_curve" => Ok(modular_curve()),
        "jacobi" => Ok(jacobi()),
        "compact_p1" => Ok(compact_p1()),
        "snc_corner_toy" => Ok(snc_corner_toy()),
        other => Err(SetupError(format!("unknown model tag {other:?}"))),
    }
}

/// Reject scenarios that reference unknown models or strata before running
/// anything.
pub fn validate_scenario(scenario: &Scenario) -> Result<Option<FjModel>, SetupError> {
    let model = match &scenario.model {
        Some(tag) => Some(model_by_tag(tag)?),
        None => None,
    };
    for check in &scenario.checks {
        if check.needs_model() && model.is_none() {
            return Err(SetupError(format!(
                "check {:?} needs a model, but the scenario names none",
                check.name()
            )));
        }
        if let (CheckSpec::Expansion { stratum, .. }, Some(m)) = (check, &model) {
            m.by_label(stratum)
                .map_err(|_| SetupError(format!("unknown stratum {stratum:?}")))?;
        }
    }
    Ok(model)
}

fn build_object(model: &FjModel, spec: &ObjectSpec) -> Result<FjObject, String> {
    let built = match spec {
        ObjectSpec::Unit => unit_object(model),
        ObjectSpec::Forms { weight, step } => modular_forms_object(model, *weight, *step),
        ObjectSpec::Jacobi { weight, index } => jacobi_object(model, *weight, *index),
    };
    built.map_err(|e| e.to_string())
}

fn status_tag(status: VanishingStatus) -> String {
    serde_json::to_value(status)
        .expect("status serializes")
        .as_str()
        .expect("status is a string")
        .to_string()
}

fn run_validate(model: &FjModel) -> (bool, Value) {
    let model_ok = model.validate();
    let unit_ok = model_ok.is_ok().then(|| unit_object(model).map(|_| ()));
    let labels: Vec<String> = model
        .poset
        .ids()
        .map(|y| model.stratum(y).label.clone())
        .collect();
    let error = match (&model_ok, &unit_ok) {
        (Err(e), _) => Some(e.to_string()),
        (_, Some(Err(e))) => Some(e.to_string()),
        _ => None,
    };
    (
        error.is_none(),
        json!({
            "dim": model.dim,
            "strata": labels,
            "error": error,
        }),
    )
}

fn run_predicates(model: &FjModel, spec: &ObjectSpec) -> (bool, Value) {
    match build_object(model, spec) {
        Ok(obj) => {
            let flags = serde_json::to_value(obj.flags(model)).expect("flags serialize");
            (true, json!({ "object": spec, "flags": flags }))
        }
        Err(e) => (false, json!({ "object": spec, "error": e })),
    }
}

fn run_tensor(model: &FjModel, left: &ObjectSpec, right: &ObjectSpec) -> (bool, Value) {
    let built = build_object(model, left).and_then(|f| Ok((f, build_object(model, right)?)));
    let (f, g) = match built {
        Ok(pair) => pair,
        Err(e) => return (false, json!({ "error": e })),
    };
    match tensor_fj(model, &f, &g) {
        Ok(t) => {
            let dims: BTreeMap<String, usize> = model
                .poset
                .ids()
                .map(|y| {
                    let grid = t.stratum(y);
                    let label = model.stratum(y).label.clone();
                    (label, grid.evaluate(grid.hi()).total_dim())
                })
                .collect();
            (true, json!({ "stable_dims": dims }))
        }
        Err(e) => (false, json!({ "error": e.to_string() })),
    }
}

fn run_expansion(model: &FjModel, spec: &ObjectSpec, stratum: &str) -> (bool, Value) {
    let obj = match build_object(model, spec) {
        Ok(obj) => obj,
        Err(e) => return (false, json!({ "object": spec, "error": e })),
    };
    let y = model.by_label(stratum).expect("label checked at setup");
    match fj_expansion(model, &obj, y) {
        Ok(report) => {
            let nonzero: Vec<Value> = report
                .components
                .iter()
                .filter(|c| c.object_dim > 0)
                .map(|c| {
                    json!({
                        "degree": c.degree,
                        "object_dim": c.object_dim,
                        "weight_zero_dim": c.weight_zero_dim,
                    })
                })
                .collect();
            (
                report.injective,
                json!({
                    "stratum": report.stratum,
                    "num_sections": report.num_sections,
                    "injective": report.injective,
                    "nonzero_components": nonzero,
                }),
            )
        }
        Err(e) => (false, json!({ "error": e.to_string() })),
    }
}

fn run_vanishing_sweep(ranges: &SweepRanges) -> (bool, Value) {
    let mut cases = 0usize;
    let mut all_zero = true;
    let mut formulas_hold = true;
    let mut statuses: BTreeMap<String, usize> = BTreeMap::new();
    for n0 in ranges.n0[0]..=ranges.n0[1] {
        for v in ranges.v[0]..=ranges.v[1] {
            for u in ranges.u[0]..=ranges.u[1] {
                let report = boundary_vanishing_check(&BoundaryDatum::new(n0, v, u));
                cases += 1;
                all_zero &= report.weight_zero_mults.iter().all(|&m| m == 0);
                formulas_hold &= report.top_degree_weight
                    == vec![(v + n0) as i64, -(n0 as i64)]
                    && report.tensor_weight == vec![-(u as i64), -(u as i64)];
                *statuses.entry(status_tag(report.status)).or_insert(0) += 1;
            }
        }
    }
    (
        all_zero && formulas_hold,
        json!({
            "cases": cases,
            "all_multiplicities_zero": all_zero,
            "weight_formulas_hold": formulas_hold,
            "statuses": statuses,
        }),
    )
}

fn run_vanishing_model(model: &FjModel) -> (bool, Value) {
    let mut entries = Vec::new();
    let mut ok = true;
    for y in model.poset.ids() {
        if let Some(d) = &model.stratum(y).boundary {
            let report = boundary_vanishing_check(d);
            ok &= report.status != VanishingStatus::Fails;
            entries.push(json!({
                "stratum": model.stratum(y).label,
                "status": status_tag(report.status),
                "threshold": report.threshold,
            }));
        }
    }
    (ok, json!({ "strata": entries }))
}

fn run_ext(model: &FjModel, target: &ExtTarget, degree: usize, expect: Option<usize>) -> (bool, Value) {
    match ext_dim(model, target, degree) {
        Ok(outcome) => {
            let pass = match (expect, outcome.value) {
                (Some(want), ExtValue::Exact(got)) => got == want,
                (Some(_), ExtValue::Bounds { .. }) => false,
                (None, _) => true,
            };
            (
                pass,
                json!({
                    "target": target,
                    "degree": degree,
                    "value": outcome.value,
                    "expect": expect,
                    "audit": outcome.audit,
                }),
            )
        }
        Err(e) => (false, json!({ "target": target, "degree": degree, "error": e.to_string() })),
    }
}

fn run_hmp(model: &FjModel) -> (bool, Value) {
    match hmp_check(model) {
        Ok(report) => {
            let pass = report.consistent;
            (pass, serde_json::to_value(report).expect("report serializes"))
        }
        Err(e) => (false, json!({ "error": e.to_string() })),
    }
}

/// Execute every check of a validated scenario in order.  The per-check
/// durations go to `timing` (milliseconds); nothing time-dependent enters
/// the report.
pub fn run_scenario(
    scenario: &Scenario,
    model: Option<&FjModel>,
    timing: &mut Vec<(String, u128)>,
) -> ScenarioReport {
    let mut checks = Vec::new();
    let mut pass = true;
    for check in &scenario.checks {
        let started = std::time::Instant::now();
        let (ok, details) = match (check, model) {
            (CheckSpec::Vanishing { sweep: Some(r) }, _) => run_vanishing_sweep(r),
            (CheckSpec::Validate, Some(m)) => run_validate(m),
            (CheckSpec::Predicates { object }, Some(m)) => run_predicates(m, object),
            (CheckSpec::Tensor { left, right }, Some(m)) => run_tensor(m, left, right),
            (CheckSpec::Expansion { object, stratum }, Some(m)) => {
                run_expansion(m, object, stratum)
            }
            (CheckSpec::Vanishing { sweep: None }, Some(m)) => run_vanishing_model(m),
            (CheckSpec::Ext { target, degree, expect }, Some(m)) => {
                run_ext(m, target, *degree, *expect)
            }
            (CheckSpec::Hmp, Some(m)) => run_hmp(m),
            (_, None) => unreachable!("validate_scenario enforces model presence"),
        };
        timing.push((check.name().to_string(), started.elapsed().as_millis()));
        pass &= ok;
        checks.push(CheckReport {
            check: check.name().to_string(),
            pass: ok,
            details,
        });
    }
    ScenarioReport {
        scenario: scenario.name.clone(),
        model: scenario.model.clone(),
        checks,
        pass,
    }
}

/// The built-in scenarios, each with a one-line description.
pub fn built_ins() -> Vec<(Scenario, &'static str)> {
    vec![
        (
            Scenario {
                name: "modular_curve".into(),
                model: Some("modular_curve".into()),
                checks: vec![
                    CheckSpec::Validate,
                    CheckSpec::Ext {
                        target: ExtTarget::Omega,
                        degree: 1,
                        expect: Some(1),
                    },
                    CheckSpec::Hmp,
                ],
            },
            "One cusp over a rank-2 flag stabilizer: validates the model, pins the first Ext \
             dimension against the interior dualizing object, and runs the proportionality \
             pipeline.",
        ),
        (
            Scenario {
                name: "jacobi".into(),
                model: Some("jacobi".into()),
                checks: vec![
                    CheckSpec::Validate,
                    CheckSpec::Predicates {
                        object: ObjectSpec::Jacobi {
                            weight: 2,
                            index: 1,
                        },
                    },
                    CheckSpec::Expansion {
                        object: ObjectSpec::Jacobi {
                            weight: 2,
                            index: 1,
                        },
                        stratum: "cusp".into(),
                    },
                ],
            },
            "Non-reductive open stabilizer with a torus cusp: reports the predicate flags of a \
             punctual index object and locates its single expansion component.",
        ),
        (
            Scenario {
                name: "compact_p1".into(),
                model: Some("compact_p1".into()),
                checks: vec![CheckSpec::Validate, CheckSpec::Hmp],
            },
            "Boundary-free flag model: the dualizing object equals its canonical extension and \
             the proportionality pipeline degenerates to the chart model.",
        ),
        (
            Scenario {
                name: "boundary_vanishing_sweep".into(),
                model: None,
                checks: vec![CheckSpec::Vanishing {
                    sweep: Some(SweepRanges {
                        n0: [0, 4],
                        v: [0, 4],
                        u: [1, 4],
                    }),
                }],
            },
            "Exhaustive sweep of small boundary data: certifies that the weight-zero \
             multiplicity vanishes in every exterior degree and that the top and tensor weights \
             match their closed forms.",
        ),
        (
            Scenario {
                name: "snc_corner_toy".into(),
                model: Some("snc_corner_toy".into()),
                checks: vec![
                    CheckSpec::Validate,
                    CheckSpec::Predicates {
                        object: ObjectSpec::Unit,
                    },
                    CheckSpec::Vanishing { sweep: None },
                ],
            },
            "Two divisors crossing in a corner over a rank-2 torus: validates the corner \
             closures, reports unit-object predicates, and checks the vanishing statuses of all \
             three boundary data.",
        ),
    ]
}

/// Canonical JSON emitter: compact by default, or pretty with the given
/// indent width.
pub fn to_json<T: Serialize>(value: &T, indent: Option<usize>) -> String {
    match indent {
        None => serde_json::to_string(value).expect("report serializes"),
        Some(n) => {
            let spaces = vec![b' '; n];
            let mut buf = Vec::new();
            let fmt = serde_json::ser::PrettyFormatter::with_indent(&spaces);
            let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
            value.serialize(&mut ser).expect("report serializes");
            String::from_utf8(buf).expect("json is utf8")
        }
    }
}
