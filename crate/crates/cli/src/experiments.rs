//! Experiment drivers: each one writes its CSV artifacts, a gnuplot
//! script, and contributes lines to the run summary.

use crate::config::{Experiment, ExperimentConfig};
use crate::csvio::{CsvField, CsvWriter};
use crate::plots::{emit_plot_script, FigureId};
use anyhow::{anyhow, Context, Result};
use ncplane_core::classical::{
    hamiltonian_value, initial_state, integrate_eom, CoordinateSet, Gauge, GaugeField,
    IntegrationOptions, OrbitSpec, PhasePoint,
};
use ncplane_core::cstates::{
    classical_l_from_zeta, coherent_vector, error_function, internal_radius, j_expectation,
    mm_evolved_label, mm_mean_trajectory, truncation_for, ZetaEvolution,
};
use ncplane_core::fock::{hamiltonian_landau, hamiltonian_symmetric, ladder, Mode};
use ncplane_core::params::derive;
use ncplane_core::quadrature::QuadratureScheme;
use ncplane_core::quantize::{
    moment, moment_target, quantize_lambda, quantize_phase_space_map, ClassicalObservable,
    Monomial, WeightFunction,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::path::PathBuf;
use std::time::Instant;

pub struct RunReport {
    pub summary: Vec<String>,
    pub files: Vec<PathBuf>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("cannot create {}", cfg.out_dir.display()))?;
    let start = Instant::now();
    let mut report = match cfg.experiment {
        Experiment::ClassicalTraj => classical_traj(cfg)?,
        Experiment::Spectrum => spectrum(cfg)?,
        Experiment::MmEvolve => mm_evolve(cfg)?,
        Experiment::LambdaError => lambda_error(cfg)?,
        Experiment::LambdaPhase => lambda_phase(cfg)?,
        Experiment::LambdaRadius => lambda_radius(cfg)?,
        Experiment::QuantizeVerify => quantize_verify(cfg)?,
        Experiment::WeightMoments => weight_moments(cfg)?,
    };
    report
        .summary
        .push(format!("runtime: {:?}", start.elapsed()));

    let mut text = format!(
        "experiment: {}\nunits: {:?}\nB = {}, theta = {}, N = {}, seed = {}\n",
        cfg.experiment.name(),
        cfg.units,
        cfg.b_field,
        cfg.theta,
        cfg.n_max,
        cfg.seed
    );
    for f in &report.files {
        text.push_str(&format!("wrote {}\n", f.display()));
    }
    for line in &report.summary {
        text.push_str(line);
        text.push('\n');
    }
    let summary_path = cfg.out_dir.join("summary.txt");
    std::fs::write(&summary_path, text)?;
    report.files.push(summary_path);
    Ok(report)
}

fn gauge_of(cfg: &ExperimentConfig) -> Gauge {
    match cfg.gauge.as_str() {
        "landau" => Gauge::Landau,
        "landau_swapped" => Gauge::LandauSwapped,
        _ => Gauge::Symmetric,
    }
}

fn t_grid(cfg: &ExperimentConfig) -> Vec<f64> {
    (0..cfg.t_samples)
        .map(|i| cfg.t_max * i as f64 / (cfg.t_samples - 1) as f64)
        .collect()
}

fn classical_traj(cfg: &ExperimentConfig) -> Result<RunReport> {
    let d = derive(cfg.physical_params())?;
    let gauge = gauge_of(cfg);
    let orbit = OrbitSpec::new(cfg.radius, cfg.phase, cfg.center, gauge);
    let field = GaugeField::new(gauge, d.params.b_field);
    let init = initial_state(&d, &orbit)?;
    let coords = if cfg.coords == "commuting" {
        CoordinateSet::Commuting
    } else {
        CoordinateSet::Noncommutative
    };
    let init = match coords {
        CoordinateSet::Noncommutative => init,
        CoordinateSet::Commuting => {
            // same orbit expressed in the commuting chart
            let half = d.params.theta / (2.0 * d.params.hbar);
            PhasePoint {
                pos: [
                    init.pos[0] + half * init.mom[1],
                    init.pos[1] - half * init.mom[0],
                ],
                mom: init.mom,
            }
        }
    };
    let grid = t_grid(cfg);
    let traj = integrate_eom(&d, &field, coords, init, &grid, &IntegrationOptions::default())?;

    let mut csv = CsvWriter::new("t,q1,q2,x1,x2,p1,p2");
    for s in &traj {
        csv.row(&[
            CsvField::Float(s.t),
            CsvField::Float(s.q[0]),
            CsvField::Float(s.q[1]),
            CsvField::Float(s.x[0]),
            CsvField::Float(s.x[1]),
            CsvField::Float(s.p[0]),
            CsvField::Float(s.p[1]),
        ]);
    }
    let csv_path = cfg.out_dir.join("trajectory.csv");
    csv.write_to(&csv_path)?;
    let script = emit_plot_script(FigureId::Trajectory, &[&csv_path])?;
    let gp_path = cfg.out_dir.join(FigureId::Trajectory.script_name());
    std::fs::write(&gp_path, script)?;

    // diagnostics: energy drift and the field curl at seeded points
    let e0 = hamiltonian_value(&d, &field, traj[0].q, traj[0].p);
    let drift = traj
        .iter()
        .map(|s| (hamiltonian_value(&d, &field, s.q, s.p) - e0).abs())
        .fold(0.0_f64, f64::max)
        / e0.abs().max(f64::MIN_POSITIVE);
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut curl_err = 0.0_f64;
    for _ in 0..3 {
        let q = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let h = 1e-4;
        let da2 = (field.vector_potential([q[0] + h, q[1]])[1]
            - field.vector_potential([q[0] - h, q[1]])[1])
            / (2.0 * h);
        let da1 = (field.vector_potential([q[0], q[1] + h])[0]
            - field.vector_potential([q[0], q[1] - h])[0])
            / (2.0 * h);
        curl_err = curl_err.max((da2 - da1 - field.b_field).abs());
    }
    Ok(RunReport {
        summary: vec![
            format!("gauge {} in {} coordinates", cfg.gauge, cfg.coords),
            format!("relative energy drift over the run: {drift:.3e}"),
            format!("finite-difference curl deviation from B: {curl_err:.3e}"),
        ],
        files: vec![csv_path, gp_path],
    })
}

fn spectrum(cfg: &ExperimentConfig) -> Result<RunReport> {
    let d = derive(cfg.physical_params())?;
    let h_sym = hamiltonian_symmetric(&d, cfg.n_max)?;
    let h_lan = hamiltonian_landau(&d, cfg.n_max);
    let mut csv = CsvWriter::new("n,e_symmetric,e_landau");
    for n in 0..=cfg.n_max {
        csv.row(&[
            CsvField::Int(n as i64),
            CsvField::Float(h_sym.matrix()[(n, n)].re),
            CsvField::Float(h_lan.matrix()[(n, n)].re),
        ]);
    }
    let csv_path = cfg.out_dir.join("spectrum.csv");
    csv.write_to(&csv_path)?;
    let gp_path = cfg.out_dir.join(FigureId::Spectrum.script_name());
    std::fs::write(&gp_path, emit_plot_script(FigureId::Spectrum, &[&csv_path])?)?;
    Ok(RunReport {
        summary: vec![format!(
            "level spacings: symmetric {:.6e}, landau {:.6e} (ratio |mu_S| = {:.6e})",
            d.params.hbar * d.omega_tilde,
            d.params.hbar * d.omega,
            d.mu_s.abs()
        )],
        files: vec![csv_path, gp_path],
    })
}

fn mm_evolve(cfg: &ExperimentConfig) -> Result<RunReport> {
    let d = derive(cfg.physical_params())?;
    let mw = d.scale_mw()?;
    let n = truncation_for(cfg.r_amp / d.params.hbar.sqrt(), 1e-12).max(cfg.n_max);
    let (a, a_dag) = ladder(n, Mode::A);
    let sx = (d.params.hbar / (2.0 * mw)).sqrt();
    let op1 = a.add(&a_dag).scale_re(sx);
    let op2 = a.sub(&a_dag).scale(Complex64::new(0.0, sx));
    let alpha0 = Complex64::from_polar(cfg.r_amp / d.params.hbar.sqrt(), -cfg.phi);

    let mut csv = CsvWriter::new("t,x1,x2,x1_fock,x2_fock");
    let mut worst = 0.0_f64;
    for t in t_grid(cfg) {
        let closed = mm_mean_trajectory(&d, cfg.r_amp, cfg.phi, t)?;
        let (alpha_t, _) = mm_evolved_label(alpha0, d.omega_tilde, t);
        let v = coherent_vector(alpha_t, n);
        let fock = [op1.expectation(&v).re, op2.expectation(&v).re];
        worst = worst
            .max((closed[0] - fock[0]).abs())
            .max((closed[1] - fock[1]).abs());
        csv.row(&[
            CsvField::Float(t),
            CsvField::Float(closed[0]),
            CsvField::Float(closed[1]),
            CsvField::Float(fock[0]),
            CsvField::Float(fock[1]),
        ]);
    }
    let csv_path = cfg.out_dir.join("mm_evolve.csv");
    csv.write_to(&csv_path)?;
    let gp_path = cfg.out_dir.join(FigureId::MmEvolve.script_name());
    std::fs::write(&gp_path, emit_plot_script(FigureId::MmEvolve, &[&csv_path])?)?;
    Ok(RunReport {
        summary: vec![format!(
            "closed form vs truncated-Fock expectation (N = {n}): max deviation {worst:.3e}"
        )],
        files: vec![csv_path, gp_path],
    })
}

fn lambda_error(cfg: &ExperimentConfig) -> Result<RunReport> {
    let mut csv = CsvWriter::new("lambda,l,zeta_abs,error");
    let lambdas = cfg.lambda.values();
    let (figure, description) = if let Some(lg) = &cfg.l_grid {
        // fixed lambda curves over the l grid
        for &lam in &lambdas {
            for &l in &lg.values() {
                let zeta_abs = (0.5 * l * (0.5 * lam * l).exp()).sqrt();
                let e = error_function(lam, l).map_err(|e| anyhow!("{e}"))?;
                csv.row(&[
                    CsvField::Float(lam),
                    CsvField::Float(l),
                    CsvField::Float(zeta_abs),
                    CsvField::Float(e),
                ]);
            }
        }
        (FigureId::Fig2, "l sweep at fixed lambda values")
    } else {
        // lambda sweep at fixed |zeta| with l recovered by inversion
        let zeta_abs = (cfg.zeta_re * cfg.zeta_re + cfg.zeta_im * cfg.zeta_im).sqrt();
        for &lam in &lambdas {
            let l = classical_l_from_zeta(zeta_abs, lam);
            let e = (j_expectation(zeta_abs, lam) - l).abs() / l;
            csv.row(&[
                CsvField::Float(lam),
                CsvField::Float(l),
                CsvField::Float(zeta_abs),
                CsvField::Float(e),
            ]);
        }
        (FigureId::Fig1, "lambda sweep at fixed |zeta|")
    };
    let csv_path = cfg.out_dir.join("lambda_error.csv");
    csv.write_to(&csv_path)?;
    let gp_path = cfg.out_dir.join(figure.script_name());
    std::fs::write(&gp_path, emit_plot_script(figure, &[&csv_path])?)?;
    Ok(RunReport {
        summary: vec![format!("angular-momentum error sweep: {description}")],
        files: vec![csv_path, gp_path],
    })
}

fn lambda_phase(cfg: &ExperimentConfig) -> Result<RunReport> {
    let lam = cfg.lambda.values()[0];
    let zeta = Complex64::new(cfg.zeta_re, cfg.zeta_im);
    let ev = ZetaEvolution::new(zeta, lam, Default::default());
    let mut csv = CsvWriter::new("t,re_zeta,im_zeta,abs_zeta");
    for t in t_grid(cfg) {
        let z = ev.eval(t);
        csv.row(&[
            CsvField::Float(t),
            CsvField::Float(z.re),
            CsvField::Float(z.im),
            CsvField::Float(z.norm()),
        ]);
    }
    let csv_path = cfg.out_dir.join("lambda_phase.csv");
    csv.write_to(&csv_path)?;
    let gp_path = cfg.out_dir.join(FigureId::Fig3.script_name());
    std::fs::write(&gp_path, emit_plot_script(FigureId::Fig3, &[&csv_path])?)?;
    Ok(RunReport {
        summary: vec![format!(
            "lower-symbol phase trajectory at lambda = {lam}, zeta = {zeta}, t in [0, {}]",
            cfg.t_max
        )],
        files: vec![csv_path, gp_path],
    })
}

fn lambda_radius(cfg: &ExperimentConfig) -> Result<RunReport> {
    let zeta = Complex64::new(cfg.zeta_re, cfg.zeta_im);
    let mut csv = CsvWriter::new("lambda,r_int,r_ext");
    let lambdas = cfg.lambda.values();
    let mut min_row = (0.0_f64, f64::INFINITY);
    for &lam in &lambdas {
        let (ri, re) = internal_radius(zeta, lam, cfg.t_max, cfg.t_samples);
        if ri < min_row.1 {
            min_row = (lam, ri);
        }
        csv.row(&[
            CsvField::Float(lam),
            CsvField::Float(ri),
            CsvField::Float(re),
        ]);
    }
    let csv_path = cfg.out_dir.join("lambda_radius.csv");
    csv.write_to(&csv_path)?;
    let gp_path = cfg.out_dir.join(FigureId::Fig4.script_name());
    std::fs::write(&gp_path, emit_plot_script(FigureId::Fig4, &[&csv_path])?)?;

    // measured circulation period of the dominant term, reported but not
    // asserted against any scaling law
    let mut summary = vec![format!(
        "deepest squeeze: r_int = {:.6} at lambda = {:.3}",
        min_row.1, min_row.0
    )];
    if let Some(&lam) = lambdas.iter().find(|&&l| l > 6.0) {
        let gap = 2.0 * (2.0 * lam).exp() - lam.exp();
        summary.push(format!(
            "dominant circulation period at lambda = {lam}: {:.6e}",
            2.0 * std::f64::consts::PI / gap
        ));
    }
    Ok(RunReport {
        summary,
        files: vec![csv_path, gp_path],
    })
}

fn quantize_verify(cfg: &ExperimentConfig) -> Result<RunReport> {
    let scheme = QuadratureScheme::standard();
    let mut csv = CsvWriter::new("identity,N,lambda,max_abs_err,trust_band");
    let mut worst: f64 = 0.0;
    for &lam in &cfg.lambda.values() {
        let rows = ncplane_core::quantize::verification_report(lam, cfg.n_max, &scheme)?;
        for row in rows {
            worst = worst.max(row.max_abs_err);
            csv.row(&[
                CsvField::Text(row.identity),
                CsvField::Int(row.n_max as i64),
                CsvField::Float(row.lambda),
                CsvField::Float(row.max_abs_err),
                CsvField::Int(row.trust_band as i64),
            ]);
        }
        // randomized monomials: the angular selection rule must zero out
        // every entry off the m - n = b - a line
        let mut rng = StdRng::seed_from_u64(cfg.seed);
        for _ in 0..3 {
            let a = rng.random_range(0..=3u32);
            let b = rng.random_range(0..=3u32);
            let coeff = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let q = quantize_lambda(
                &ClassicalObservable::Monomials(vec![Monomial::new(a, b, coeff)]),
                lam,
                cfg.n_max,
                &scheme,
            )?;
            let mut off = 0.0_f64;
            for m in 0..=cfg.n_max {
                for n in 0..=cfg.n_max {
                    if m as i64 - n as i64 != b as i64 - a as i64 {
                        off = off.max(q.op.matrix()[(m, n)].norm());
                    }
                }
            }
            worst = worst.max(off);
            csv.row(&[
                CsvField::Text(format!("selection_zeta{a}_conj{b}")),
                CsvField::Int(cfg.n_max as i64),
                CsvField::Float(lam),
                CsvField::Float(off),
                CsvField::Int(cfg.n_max as i64),
            ]);
        }
    }
    // phase-space reconstruction defect at theta = 1 (two-mode, small N)
    let d = derive(ncplane_core::params::PhysicalParams::natural_units(1.0, 1.0))?;
    let n_two_mode = cfg.n_max.min(12);
    let map = quantize_phase_space_map(&d, n_two_mode, &scheme)?;
    worst = worst.max(map.commutator_defect);
    csv.row(&[
        CsvField::Text("phase_space_theta1".to_string()),
        CsvField::Int(n_two_mode as i64),
        CsvField::Float(1.0),
        CsvField::Float(map.commutator_defect),
        CsvField::Int(n_two_mode.saturating_sub(2) as i64),
    ]);

    let csv_path = cfg.out_dir.join("quantize_verify.csv");
    csv.write_to(&csv_path)?;
    Ok(RunReport {
        summary: vec![format!(
            "quantization identity suite: worst scaled error {worst:.3e}"
        )],
        files: vec![csv_path],
    })
}

fn weight_moments(cfg: &ExperimentConfig) -> Result<RunReport> {
    let mut csv = CsvWriter::new("lambda,n,numeric,analytic,rel_err");
    let mut worst = 0.0_f64;
    for &lam in &cfg.lambda.values() {
        let w = WeightFunction::new(lam).map_err(|e| anyhow!("{e}"))?;
        for n in 0..=10u32 {
            let numeric = moment(&w, n)?;
            let analytic = moment_target(n, lam);
            let rel = ((numeric - analytic) / analytic).abs();
            worst = worst.max(rel);
            csv.row(&[
                CsvField::Float(lam),
                CsvField::Int(n as i64),
                CsvField::Float(numeric),
                CsvField::Float(analytic),
                CsvField::Float(rel),
            ]);
        }
    }
    let csv_path = cfg.out_dir.join("weight_moments.csv");
    csv.write_to(&csv_path)?;
    let gp_path = cfg.out_dir.join(FigureId::Moments.script_name());
    std::fs::write(&gp_path, emit_plot_script(FigureId::Moments, &[&csv_path])?)?;
    Ok(RunReport {
        summary: vec![format!(
            "moment problem: worst relative error {worst:.3e} over n <= 10"
        )],
        files: vec![csv_path, gp_path],
    })
}
