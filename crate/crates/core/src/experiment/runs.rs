use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, SQRT_2};

use super::{Cell, ConfigError, Experiment, ExperimentConfig, Report, RunError, Verdict};
use crate::conformal::{apex_params, cardy_prediction, derivative_ratio};
use crate::domain::{classify, standard_triangle, SiteClassification};
use crate::engine::{coupled_estimate, estimate, CrossingEstimate, SamplingPlan};
use crate::geometry::Point;
use crate::lattice::{validate_graph_requirements, FamilyTag, LatticeFamily, LatticeSpec};

pub const RESULT_COLUMNS: [&str; 14] = [
    "family",
    "k",
    "delta",
    "p",
    "x_requested",
    "x_snapped",
    "n",
    "successes",
    "p_hat",
    "ci_low",
    "ci_high",
    "cardy_X",
    "deviation",
    "z_score",
];

const PREDICT_COLUMNS: [&str; 7] = ["family", "k", "kappa", "x", "w", "cardy_X", "residual"];
const VALIDATE_COLUMNS: [&str; 4] = ["check", "value", "bound", "ok"];

/// Allowed |p̂ − x| on the equilateral lattice: three Wilson half-widths
/// plus a mesh-dependent allowance for the finite-size bias.
pub fn verify_tolerance(half_width: f64, delta: f64) -> f64 {
    3.0 * half_width + 0.5 * delta.cbrt()
}

/// A lattice as the user names it. For `square-ne`, `delta` is the mesh of
/// the triangular lattice it rotates onto; the square mesh is δ/√2.
#[derive(Debug, Clone, Copy)]
struct Subject {
    tag: FamilyTag,
    k: f64,
    delta: f64,
}

impl Subject {
    fn new(tag: FamilyTag, k: f64, delta: f64) -> Self {
        Self { tag, k, delta }
    }

    fn equilateral(delta: f64) -> Self {
        Self::new(FamilyTag::Triangular, 1.0, delta)
    }

    fn spec(&self) -> Result<LatticeSpec, RunError> {
        let family = LatticeFamily::from_parts(self.tag, Some(self.k))?;
        let mesh = if self.tag == FamilyTag::SquareNe {
            self.delta / SQRT_2
        } else {
            self.delta
        };
        Ok(LatticeSpec::new(family, mesh)?)
    }

    /// Base angle of the subject's triangle.
    fn kappa(&self) -> f64 {
        match self.tag {
            FamilyTag::Triangular => apex_params(self.k).expect("validated shape"),
            FamilyTag::SquareNe => FRAC_PI_4,
            _ => FRAC_PI_3,
        }
    }

    /// Classification in native indices.
    fn classify(&self, x: f64) -> Result<SiteClassification, RunError> {
        let spec = self.spec()?;
        let domain = standard_triangle(&spec, x)?;
        Ok(classify(&spec, &domain)?)
    }

    /// Classification indexed like the triangular lattices, so that it can
    /// be coupled with them.
    fn classify_canonical(&self, x: f64) -> Result<SiteClassification, RunError> {
        let cls = self.classify(x)?;
        if self.tag == FamilyTag::SquareNe {
            Ok(cls.rotated_square_ne()?)
        } else {
            Ok(cls)
        }
    }

    fn predicted(&self, x_snapped: f64) -> f64 {
        cardy_prediction(x_snapped, self.kappa())
            .expect("snapped x lies inside (0, 1)")
            .big_x
    }

    fn row(&self, p: f64, est: &CrossingEstimate) -> (Vec<Cell>, f64) {
        let d = est.provenance.domain;
        let big_x = self.predicted(d.x_snapped);
        let deviation = est.p_hat - big_x;
        let z = deviation / ((est.ci_high - est.ci_low) / (2.0 * crate::engine::Z_95));
        let cells = vec![
            Cell::Str(self.tag.to_string()),
            Cell::Float(self.k),
            Cell::Float(self.spec().map(|s| s.delta()).unwrap_or(self.delta)),
            Cell::Float(p),
            Cell::Float(d.x_requested),
            Cell::Float(d.x_snapped),
            Cell::Int(est.n),
            Cell::Int(est.successes),
            Cell::Float(est.p_hat),
            Cell::Float(est.ci_low),
            Cell::Float(est.ci_high),
            Cell::Float(big_x),
            Cell::Float(deviation),
            Cell::Float(z),
        ];
        (cells, big_x)
    }
}

fn plan(cfg: &ExperimentConfig, p: f64) -> Result<SamplingPlan, RunError> {
    Ok(SamplingPlan::new(p, cfg.seed, cfg.n_samples)?)
}

fn report(cfg: &ExperimentConfig, columns: &[&'static str]) -> Report {
    Report {
        experiment: cfg.experiment,
        provenance: cfg.provenance(),
        columns: columns.to_vec(),
        rows: Vec::new(),
        verdict: Verdict::Pass,
        success: true,
        notes: Vec::new(),
    }
}

fn expect(cfg: &ExperimentConfig, exp: Experiment) -> Result<(), RunError> {
    if cfg.experiment != exp {
        return Err(ConfigError::Invalid(format!("configuration is for {}, not {exp}", cfg.experiment)).into());
    }
    Ok(())
}

fn fmt(v: f64) -> String {
    super::output::format_sig(v)
}

/// Crossing probabilities on the equilateral lattice at p = 1/2 against
/// the conformal prediction X = x.
pub fn run_verify_cardy(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    expect(cfg, Experiment::VerifyCardy)?;
    let subject = Subject::equilateral(cfg.delta[0]);
    let p = cfg.p[0];
    let plan = plan(cfg, p)?;
    let mut rep = report(cfg, &RESULT_COLUMNS);
    let mut all_ok = true;
    for &x in &cfg.x_params {
        let cls = subject.classify(x)?;
        let est = estimate(&cls, &plan);
        let (row, big_x) = subject.row(p, &est);
        let tol = verify_tolerance(est.half_width(), subject.delta);
        let ok = (est.p_hat - big_x).abs() <= tol;
        all_ok &= ok;
        rep.notes.push(format!(
            "x={}: |p_hat - X| = {} vs tolerance {} ({})",
            fmt(x),
            fmt((est.p_hat - big_x).abs()),
            fmt(tol),
            if ok { "ok" } else { "outside" }
        ));
        rep.rows.push(row);
    }
    rep.verdict = if all_ok { Verdict::Pass } else { Verdict::Fail };
    rep.success = all_ok;
    Ok(rep)
}

struct CoupledRun {
    target_row: Vec<Cell>,
    reference_row: Vec<Cell>,
    target: CrossingEstimate,
    reference: CrossingEstimate,
    target_x: f64,
    agreement: u64,
}

/// Runs the subject and the equilateral reference on shared site marks.
fn coupled(
    cfg: &ExperimentConfig,
    subject: Subject,
    reference: Subject,
    x: f64,
) -> Result<CoupledRun, RunError> {
    let p = cfg.p[0];
    let a = subject.classify_canonical(x)?;
    let b = reference.classify_canonical(x)?;
    let c = coupled_estimate(&a, &b, &plan(cfg, p)?)?;
    let (target_row, target_x) = subject.row(p, &c.estimate_a);
    let (reference_row, _) = reference.row(p, &c.estimate_b);
    Ok(CoupledRun {
        target_row,
        reference_row,
        target: c.estimate_a,
        reference: c.estimate_b,
        target_x,
        agreement: c.agreement,
    })
}

fn subjects(cfg: &ExperimentConfig) -> (Subject, Subject) {
    let delta = cfg.delta[0];
    (
        Subject::new(cfg.family, cfg.k[0], delta),
        Subject::equilateral(cfg.pair_delta.unwrap_or(delta)),
    )
}

/// Checks that the stretched (or rotated) lattice and the equilateral one
/// cross in exactly the same samples.
pub fn run_coupling(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    expect(cfg, Experiment::Coupling)?;
    let (subject, reference) = subjects(cfg);
    let mut rep = report(cfg, &RESULT_COLUMNS);
    let mut all_agree = true;
    for &x in &cfg.x_params {
        let run = coupled(cfg, subject, reference, x)?;
        all_agree &= run.agreement == cfg.n_samples;
        rep.notes.push(format!(
            "x={}: agreement {}/{} (crossings {} vs {})",
            fmt(x),
            run.agreement,
            cfg.n_samples,
            run.target.successes,
            run.reference.successes
        ));
        rep.rows.push(run.target_row);
        rep.rows.push(run.reference_row);
    }
    rep.verdict = if all_agree { Verdict::Pass } else { Verdict::Fail };
    rep.success = all_agree;
    Ok(rep)
}

/// Shows that the crossing probability on the subject lattice misses its
/// conformal prediction while the coupled equilateral control matches.
pub fn run_violation(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    expect(cfg, Experiment::Violation)?;
    let (subject, reference) = subjects(cfg);
    let is_control = subject.tag == FamilyTag::Triangular && subject.k == 1.0;
    let mut rep = report(cfg, &RESULT_COLUMNS);
    let mut controls_ok = true;
    let mut significant = false;
    for &x in &cfg.x_params {
        let (target, target_x, rows) = if is_control {
            let est = estimate(&subject.classify(x)?, &plan(cfg, cfg.p[0])?);
            let (row, big_x) = subject.row(cfg.p[0], &est);
            (est, big_x, vec![row])
        } else {
            let run = coupled(cfg, subject, reference, x)?;
            let tol = verify_tolerance(run.reference.half_width(), reference.delta);
            let control_ok = (run.reference.p_hat - run.reference.provenance.domain.x_snapped).abs() <= tol;
            controls_ok &= control_ok;
            rep.notes.push(format!(
                "x={}: equilateral control p_hat {} vs X {} within {} ({})",
                fmt(x),
                fmt(run.reference.p_hat),
                fmt(run.reference.provenance.domain.x_snapped),
                fmt(tol),
                if control_ok { "ok" } else { "outside" }
            ));
            (run.target, run.target_x, vec![run.target_row, run.reference_row])
        };
        let deviation = target.p_hat - target_x;
        // On the equilateral lattice itself only a miss beyond the
        // finite-size allowance counts.
        let allowance = if is_control {
            verify_tolerance(target.half_width(), subject.delta)
        } else {
            3.0 * target.half_width()
        };
        let sig = deviation.abs() > allowance;
        significant |= sig;
        let x_snapped = target.provenance.domain.x_snapped;
        let toward_x = (deviation < 0.0) == (x_snapped < target_x) || x_snapped == target_x;
        rep.notes.push(format!(
            "x={}: p_hat - X = {} against allowance {} ({}; {})",
            fmt(x),
            fmt(deviation),
            fmt(allowance),
            if sig { "significant" } else { "not significant" },
            if toward_x { "p_hat lies on the side of x" } else { "p_hat lies away from x" }
        ));
        rep.rows.extend(rows);
    }
    let confirms = controls_ok && significant;
    rep.verdict = if confirms {
        Verdict::ConfirmsViolation
    } else {
        Verdict::NoViolation
    };
    rep.success = confirms != is_control;
    Ok(rep)
}

/// Crossing probabilities over a grid of p and δ. Off the critical point
/// the estimates must move monotonically towards 0 (p < p_c) or 1
/// (p > p_c) as δ shrinks.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    expect(cfg, Experiment::Sweep)?;
    let k = cfg.k[0];
    let p_c = LatticeFamily::from_parts(cfg.family, Some(k))?.critical_probability();
    let mut deltas = cfg.delta.clone();
    deltas.sort_by(|a, b| b.total_cmp(a));
    let mut rep = report(cfg, &RESULT_COLUMNS);
    let mut monotone_ok = true;
    for &p in &cfg.p {
        let plan = plan(cfg, p)?;
        for &x in &cfg.x_params {
            let mut ladder = Vec::with_capacity(deltas.len());
            for &delta in &deltas {
                let subject = Subject::new(cfg.family, k, delta);
                let est = estimate(&subject.classify(x)?, &plan);
                rep.rows.push(subject.row(p, &est).0);
                ladder.push(est.p_hat);
            }
            let steps: Vec<f64> = ladder.windows(2).map(|w| w[1] - w[0]).collect();
            let Some(pc) = p_c else { continue };
            let ladder_text = ladder.iter().map(|&v| fmt(v)).collect::<Vec<_>>().join(" -> ");
            if p == pc {
                let settling = steps.windows(2).all(|s| s[1].abs() <= s[0].abs());
                rep.notes.push(format!(
                    "p={} x={} (critical): {}; successive changes {} (heuristic, not gated)",
                    fmt(p),
                    fmt(x),
                    ladder_text,
                    if settling { "shrink" } else { "do not shrink" }
                ));
            } else {
                let ok = if p < pc {
                    steps.iter().all(|&s| s < 0.0)
                } else {
                    steps.iter().all(|&s| s > 0.0)
                };
                monotone_ok &= ok;
                rep.notes.push(format!(
                    "p={} x={}: {} ({} towards {})",
                    fmt(p),
                    fmt(x),
                    ladder_text,
                    if ok { "monotone" } else { "not monotone" },
                    if p < pc { 0 } else { 1 }
                ));
            }
        }
    }
    match p_c {
        Some(_) => {
            rep.verdict = if monotone_ok { Verdict::Pass } else { Verdict::Fail };
            rep.success = monotone_ok;
        }
        None => {
            rep.notes.push(format!(
                "critical probability of {} is not known; results are exploratory",
                cfg.family
            ));
            rep.verdict = Verdict::Exploratory;
        }
    }
    Ok(rep)
}

/// Conformal predictions and the derivative ratio over a grid of x.
pub fn run_predict(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    expect(cfg, Experiment::Predict)?;
    let mut rep = report(cfg, &PREDICT_COLUMNS);
    for &k in &cfg.k {
        let subject = Subject::new(cfg.family, k, 1.0);
        let kappa = subject.kappa();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for &x in &cfg.x_params {
            let pred = cardy_prediction(x, kappa).map_err(|e| ConfigError::Invalid(e.to_string()))?;
            let ratio = derivative_ratio(pred.w, kappa).map_err(|e| ConfigError::Invalid(e.to_string()))?;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            rep.rows.push(vec![
                Cell::Str(cfg.family.to_string()),
                Cell::Float(k),
                Cell::Float(kappa),
                Cell::Float(x),
                Cell::Float(pred.w),
                Cell::Float(pred.big_x),
                Cell::Float(ratio),
            ]);
        }
        rep.notes.push(format!(
            "k={} kappa={}: residual ranges over [{}, {}], max/min {}",
            fmt(k),
            fmt(kappa),
            fmt(lo),
            fmt(hi),
            fmt(hi / lo)
        ));
    }
    Ok(rep)
}

/// Finite-window checks of the lattice requirements and of the requested
/// period vectors.
pub fn run_validate_lattice(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    expect(cfg, Experiment::ValidateLattice)?;
    let family = LatticeFamily::from_parts(cfg.family, Some(cfg.k[0]))?;
    let spec = LatticeSpec::new(family, cfg.delta[0])?;
    let periods: Vec<Point> = cfg.periods.iter().map(|&[x, y]| Point::new(x, y)).collect();
    let g = validate_graph_requirements(&spec, cfg.window_radius, &periods)?;
    let mut rep = report(cfg, &VALIDATE_COLUMNS);
    let row = |check: String, value: Cell, bound: Cell, ok: bool| vec![Cell::Str(check), value, bound, Cell::Bool(ok)];
    rep.rows.push(row(
        "degree".into(),
        Cell::Int(g.max_degree as u64),
        Cell::Int(g.degree_bound as u64),
        g.bounded_degree(),
    ));
    rep.rows.push(row(
        "edge_length".into(),
        Cell::Float(g.max_edge_length),
        Cell::Float(g.edge_length_bound),
        g.finite_edges(),
    ));
    rep.rows.push(row(
        "sites_per_unit_area".into(),
        Cell::Float(g.sites_per_unit_area),
        Cell::Empty,
        g.sites_per_unit_area.is_finite() && g.sites_per_unit_area > 0.0,
    ));
    rep.rows.push(row(
        "connected".into(),
        Cell::Int(g.window_sites as u64),
        Cell::Empty,
        g.connected,
    ));
    for pc in &g.periods {
        rep.rows.push(row(
            format!("period ({} {})", fmt(pc.vector.x), fmt(pc.vector.y)),
            Cell::Empty,
            Cell::Empty,
            pc.is_period,
        ));
    }
    let failures = g.failures();
    if failures.is_empty() {
        rep.verdict = Verdict::Pass;
    } else {
        rep.notes.push(format!("failed: {}", failures.join(", ")));
        rep.verdict = Verdict::Fail;
        rep.success = false;
    }
    Ok(rep)
}
