//! Approximating a non-invertible element by an invertible one along a chain
//! of models, with a certificate of every structural step.
//!
//! Stages, in order: perturb to a zero cross, push the cross forward and
//! spread it, soft-threshold to open block points, condense the crosses,
//! triangulate, invert.

mod certificate;
mod chain;
mod condense;
mod propagate;
mod sweep;
mod triangulate;
mod zero;

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dsh_model::{Chain, Element};
use crate::error::{Error, Result};
use crate::matrixkit::min_singular_value;

pub use certificate::{
    CertificateSummary, PipelineCertificate, PipelineParameters, PredicateResult, Predicates, StageRecord, Status,
};
pub use chain::{plan_cylinder_chain, source_tower, CylinderChain, CylinderChainConfig};
pub use condense::{condense_crosses, open_block_points, verify_block_opening, verify_condensation, BlockOpening, Condensation};
pub use propagate::{propagate_crosses, verify_propagation, Propagation};
pub use triangulate::{rordam_invert, singular_value_floor, triangulate, verify_triangulation, Triangulation};
pub use zero::{find_singular_point, make_zero_cross, plant_singularity, verify_zero_cross, ZeroCross, SINGULAR_TOL};

use sweep::{par_min_singular_value, par_norm_dist, sweep};

/// How the nilpotent element is turned into an invertible one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inversion {
    /// Floor the singular values at `δ`.
    #[default]
    SingularValueFloor,
    /// Add `δ·1`.
    ScalarShift,
}

impl Inversion {
    fn name(self) -> &'static str {
        match self {
            Inversion::SingularValueFloor => "singular_value_floor",
            Inversion::ScalarShift => "scalar_shift",
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    /// Label of the input element in the certificate.
    pub input_id: String,
    /// Crosses per block start; `R + M + 3` when unset.
    pub n: Option<usize>,
    pub inversion: Inversion,
    /// Inversion step as a fraction of `ε`.
    pub invert_fraction: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { input_id: "a".into(), n: None, inversion: Inversion::default(), invert_fraction: 0.125 }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub element: Element,
    pub certificate: PipelineCertificate,
}

/// Runs every stage on `a` (living at chain position `source`) with budget
/// `ε / 4` for each of the two perturbing stages and `ε · invert_fraction`
/// for the inversion.
///
/// Returns the invertible approximant in the model where the crosses were
/// spread. An input that is already invertible is returned unchanged.
pub fn approximate_by_invertible(
    chain: &Chain,
    source: usize,
    a: &Element,
    epsilon: f64,
    opts: &PipelineOptions,
) -> Result<PipelineOutput> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(opts.invert_fraction > 0.0 && opts.invert_fraction < 0.5) {
        return Err(Error::Precondition(format!("inversion fraction must lie in (0, 1/2), got {}", opts.invert_fraction)));
    }
    let source_model = chain.models.get(source).ok_or(Error::IndexOutOfRange { index: source, n: chain.len() })?;
    if **a.model() != **source_model {
        return Err(Error::Precondition(format!("element does not live on model {source}")));
    }
    let start = Instant::now();
    let output_id = format!("{}-invertible", opts.input_id);
    let (sigma, _) = par_min_singular_value(a)?;
    if sigma > SINGULAR_TOL {
        let mut preds = Predicates::new();
        preds.insert("invertible".into(), PredicateResult::pass());
        let certificate = PipelineCertificate {
            input_element: opts.input_id.clone(),
            output_element: output_id,
            parameters: PipelineParameters {
                source_index: source,
                target_index: source,
                r: source_model.max_dim(),
                inversion: "none".into(),
                ..Default::default()
            },
            stages: vec![StageRecord::new("already_invertible", &[], 0.0, preds)],
            summary: CertificateSummary {
                epsilon,
                total_distance: 0.0,
                stage_distance_sum: 0.0,
                min_singular_value: sigma,
                scalar_shift_min_singular_value: None,
                runtime_ms: start.elapsed().as_millis() as u64,
            },
        };
        return Ok(PipelineOutput { element: a.clone(), certificate });
    }

    let budget = epsilon / 4.0;
    let mut stages = Vec::new();

    let zc = make_zero_cross(a, budget)?;
    stages.push(StageRecord::new("zero_cross", &["vL", "vR"], zc.distance, verify_zero_cross(&zc, budget)?));

    let pr = propagate_crosses(chain, source, &zc, opts.n)?;
    stages.push(StageRecord::new("propagate_crosses", &["V", "V1", "V2"], 0.0, verify_propagation(&pr, &zc)?));
    let (m, n) = (pr.m, pr.n);

    let opened = open_block_points(&pr.g, budget)?;
    stages.push(StageRecord::new(
        "open_block_points",
        &[],
        opened.distance,
        verify_block_opening(&pr.g, &opened, budget)?,
    ));

    let mut discipline = Predicates::new();
    discipline.insert(
        "n_exceeds_r_plus_m_plus_2".into(),
        PredicateResult::from_check(n > pr.r + m + 2, || format!("N = {n} <= R + M + 2 = {}", pr.r + m + 2)),
    );
    let cd = condense_crosses(&opened.element, m, n)?;
    let mut preds = verify_condensation(&opened.element, &cd, m, n)?;
    preds.append(&mut discipline);
    stages.push(StageRecord::new("condense_crosses", &["V3"], 0.0, preds));

    let tr = triangulate(&cd.g, n)?;
    stages.push(StageRecord::new("triangulate", &["V4"], 0.0, verify_triangulation(&cd.g, &tr, n)?));

    let delta = epsilon * opts.invert_fraction;
    let shifted = rordam_invert(&tr.t, delta)?;
    let shift_sigma = par_min_singular_value(&shifted)?.0;
    let inverted = match opts.inversion {
        Inversion::ScalarShift => shifted,
        Inversion::SingularValueFloor => singular_value_floor(&tr.t, delta)?,
    };
    let invert_distance = par_norm_dist(&tr.t, &inverted)?;
    let (inv_sigma, at) = par_min_singular_value(&inverted)?;
    let mut preds = Predicates::new();
    preds.insert(
        "invertible".into(),
        PredicateResult::from_check(inv_sigma > 0.0, || format!("{}: smallest singular value {inv_sigma:e}", tr.t.model().key(at).unwrap_or_default())),
    );
    preds.insert(
        "within_step".into(),
        PredicateResult::from_check(invert_distance <= delta * (1.0 + 1e-9), || format!("distance {invert_distance} > δ = {delta}")),
    );
    stages.push(StageRecord::new(opts.inversion.name(), &[], invert_distance, preds));

    // a′ = V1* V3* T′ V4* V3 V2*
    let left = pr.v1.adjoint().mul(&cd.v3.adjoint())?;
    let right = tr.v4.adjoint().mul(&cd.v3)?.mul(&pr.v2.adjoint())?;
    let output = left.mul(&inverted)?.mul(&right)?;

    let pushed = pr.map.apply(a)?;
    let measured = par_norm_dist(&pushed, &output)?;
    let (out_sigma, out_at) = par_min_singular_value(&output)?;
    let stage_sum: f64 = stages.iter().map(|s| s.distance).sum();
    let model = Arc::clone(output.model());
    let mut preds = Predicates::new();
    preds.insert(
        "measured_within_stage_sum".into(),
        PredicateResult::from_check(measured <= stage_sum + 1e-9, || format!("measured {measured} > stage sum {stage_sum}")),
    );
    preds.insert(
        "measured_below_epsilon".into(),
        PredicateResult::from_check(measured < epsilon, || format!("measured {measured} >= ε = {epsilon}")),
    );
    preds.insert(
        "invertible".into(),
        PredicateResult::from_check(out_sigma > 0.0, || format!("{}: smallest singular value {out_sigma:e}", model.key(out_at).unwrap_or_default())),
    );
    preds.insert(
        "sandwich_preserves_singular_values".into(),
        sweep(&model, &model.free_points(), |p| {
            let d = (min_singular_value(output.free_value(p)?) - min_singular_value(inverted.free_value(p)?)).abs();
            Ok((d > 1e-10).then(|| format!("smallest singular values differ by {d:e}")))
        })?,
    );
    stages.push(StageRecord::new("output", &["V1", "V2", "V3", "V4"], 0.0, preds));

    let certificate = PipelineCertificate {
        input_element: opts.input_id.clone(),
        output_element: output_id,
        parameters: PipelineParameters {
            source_index: source,
            simple_index: Some(pr.simple_index),
            target_index: pr.target_index,
            r: pr.r,
            m,
            n,
            block_delta: opened.delta,
            invert_delta: delta,
            inversion: opts.inversion.name().into(),
        },
        stages,
        summary: CertificateSummary {
            epsilon,
            total_distance: measured,
            stage_distance_sum: stage_sum,
            min_singular_value: out_sigma,
            scalar_shift_min_singular_value: Some(shift_sigma),
            runtime_ms: start.elapsed().as_millis() as u64,
        },
    };
    Ok(PipelineOutput { element: output, certificate })
}
