//! Standalone gnuplot scripts reproducing each figure's axes and labels.

use anyhow::Result;
use ncplane_core::CoreError;
use std::path::Path;

/// Figure identifiers understood by [`emit_plot_script`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Error function e against λ.
    Fig1,
    /// Error function e against l for several λ.
    Fig2,
    /// Phase trajectory Re ζ̌ × Im ζ̌ (equal aspect).
    Fig3,
    /// Internal radius r_int against λ, with the λ > 6 circularity band.
    Fig4,
    /// Planar trajectory (equal aspect).
    Trajectory,
    /// Energy levels of both gauges.
    Spectrum,
    /// Mean-trajectory closed form against the Fock oracle.
    MmEvolve,
    /// Moment-problem relative errors.
    Moments,
}

impl FigureId {
    pub fn script_name(&self) -> &'static str {
        match self {
            Self::Fig1 => "fig1.gp",
            Self::Fig2 => "fig2.gp",
            Self::Fig3 => "fig3.gp",
            Self::Fig4 => "fig4.gp",
            Self::Trajectory => "trajectory.gp",
            Self::Spectrum => "spectrum.gp",
            Self::MmEvolve => "mm_evolve.gp",
            Self::Moments => "weight_moments.gp",
        }
    }
}

/// Build a gnuplot script for one figure. The CSVs must already exist;
/// fig2 additionally needs the λ values present in the file and fig4
/// reads the data back to place the circularity band.
pub fn emit_plot_script(figure: FigureId, csv_paths: &[&Path]) -> Result<String> {
    for p in csv_paths {
        if !p.exists() {
            return Err(CoreError::MissingInput(p.display().to_string()).into());
        }
    }
    let csv = csv_paths
        .first()
        .map(|p| p.file_name().unwrap().to_string_lossy().to_string())
        .unwrap_or_default();
    let mut s = String::from("set datafile separator \",\"\nset grid\nset key top right\n");
    match figure {
        FigureId::Fig1 => {
            s.push_str(&format!(
                "set xlabel \"lambda\"\nset ylabel \"e\"\n\
                 plot \"{csv}\" every ::1 using 1:4 with linespoints title \"error\"\n"
            ));
        }
        FigureId::Fig2 => {
            let lambdas = distinct_column_values(csv_paths[0], 0)?;
            s.push_str("set xlabel \"l\"\nset ylabel \"e\"\nplot \\\n");
            let styles = ["lines", "lines dashtype 2", "lines dashtype 3", "linespoints"];
            for (i, lam) in lambdas.iter().enumerate() {
                let sep = if i + 1 == lambdas.len() { "\n" } else { ", \\\n" };
                s.push_str(&format!(
                    "  \"{csv}\" every ::1 using 2:((abs($1-{lam})<1e-12)?$4:1/0) \
                     with {} title \"lambda={lam}\"{sep}",
                    styles[i % styles.len()]
                ));
            }
        }
        FigureId::Fig3 => {
            s.push_str(&format!(
                "set size ratio -1\nset xlabel \"Re zeta\"\nset ylabel \"Im zeta\"\n\
                 plot \"{csv}\" every ::1 using 2:3 with lines title \"phase trajectory\"\n"
            ));
        }
        FigureId::Fig4 => {
            // circularity band: r_int/r_ext envelope over lambda > 6
            let rows = read_rows(csv_paths[0])?;
            let tail: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] > 6.0).collect();
            if !tail.is_empty() {
                let lo = tail.iter().map(|r| r[1]).fold(f64::INFINITY, f64::min);
                let hi = tail.iter().map(|r| r[2]).fold(0.0_f64, f64::max);
                let x0 = 6.0;
                let x1 = rows.iter().map(|r| r[0]).fold(0.0_f64, f64::max);
                s.push_str(&format!(
                    "set object 1 rectangle from {x0},{lo} to {x1},{hi} \
                     fillcolor rgb \"#dddddd\" fillstyle solid 0.4 noborder\n"
                ));
            }
            s.push_str(&format!(
                "set xlabel \"lambda\"\nset ylabel \"radius\"\n\
                 plot \"{csv}\" every ::1 using 1:2 with lines title \"r_int\", \\\n  \
                 \"{csv}\" every ::1 using 1:3 with lines title \"r_ext\"\n"
            ));
        }
        FigureId::Trajectory => {
            s.push_str(&format!(
                "set size ratio -1\nset xlabel \"q1\"\nset ylabel \"q2\"\n\
                 plot \"{csv}\" every ::1 using 2:3 with lines title \"q\", \\\n  \
                 \"{csv}\" every ::1 using 4:5 with lines title \"x\"\n"
            ));
        }
        FigureId::Spectrum => {
            s.push_str(&format!(
                "set xlabel \"n\"\nset ylabel \"E_n\"\n\
                 plot \"{csv}\" every ::1 using 1:2 with points title \"symmetric\", \\\n  \
                 \"{csv}\" every ::1 using 1:3 with points title \"landau\"\n"
            ));
        }
        FigureId::MmEvolve => {
            s.push_str(&format!(
                "set xlabel \"t\"\nset ylabel \"<x - x0>\"\n\
                 plot \"{csv}\" every ::1 using 1:2 with lines title \"x1 closed form\", \\\n  \
                 \"{csv}\" every ::1 using 1:4 with points pointtype 6 title \"x1 Fock\"\n"
            ));
        }
        FigureId::Moments => {
            s.push_str(&format!(
                "set xlabel \"n\"\nset ylabel \"relative error\"\nset logscale y\n\
                 plot \"{csv}\" every ::1 using 2:5 with points title \"moment error\"\n"
            ));
        }
    }
    Ok(s)
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines().skip(1) {
        let row: Vec<f64> = line
            .split(',')
            .filter_map(|f| f.trim().parse().ok())
            .collect();
        if !row.is_empty() {
            out.push(row);
        }
    }
    Ok(out)
}

fn distinct_column_values(path: &Path, col: usize) -> Result<Vec<f64>> {
    let rows = read_rows(path)?;
    let mut vals: Vec<f64> = Vec::new();
    for r in rows {
        if let Some(&v) = r.get(col) {
            if !vals.iter().any(|&x| (x - v).abs() < 1e-12) {
                vals.push(v);
            }
        }
    }
    Ok(vals)
}
