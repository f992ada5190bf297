//! One function per subcommand, each turning a scenario into a table.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use clap::ValueEnum;
use rayon::prelude::*;

use hybridlink_core::channels::homodyne_kernel;
use hybridlink_core::hybrid::{lossy_he_logneg, lossy_he_logneg_oracle};
use hybridlink_core::qkd::{
    channel_fidelity, channel_fidelity_oracle, distance_to_transmittance, key_rate, max_distance,
};
use hybridlink_core::swap::{
    analytic_final_state, oracle_final_state, shared_logneg, sweep_entanglement, Link, ProtocolParams, SweepAxis,
};
use hybridlink_core::{Complex64, HybridError};

use crate::error::Result;
use crate::scenario::Scenario;
use crate::table::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Command {
    /// Lossy hybrid-entanglement log-negativity against amplitude.
    Fig2,
    /// Effective log-negativity against amplitude at fixed distances.
    #[value(alias = "alpha-sweep")]
    Fig3,
    /// Effective log-negativity against distance at fixed amplitudes.
    #[value(alias = "distance-sweep")]
    Fig4,
    /// Maximum distance against amplitude for each target key rate.
    Fig5,
    /// Key rate against distance for each detector efficiency.
    Fig6,
    /// Loss-only versus noisy channel fidelity against transmittance.
    Fidelity,
    /// Every figure of merit at a single parameter point.
    Point,
    /// Closed forms against the numerical Fock-space oracles.
    OracleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::Fidelity => "fidelity",
            Self::Point => "point",
            Self::OracleCheck => "oracle-check",
        }
    }
}

/// A finished table plus the names of any self-check suites that failed.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: ResultTable,
    pub failed: Vec<String>,
}

impl From<ResultTable> for Report {
    fn from(table: ResultTable) -> Self {
        Self {
            table,
            failed: Vec::new(),
        }
    }
}

const FIG5_ETA_D: f64 = 1.0;
const DEFAULT_ETA_D: f64 = 0.95;

pub fn execute(command: Command, scenario: &Scenario) -> Result<Report> {
    let mut report = match command {
        Command::Fig2 => cmd_fig2(scenario)?.into(),
        Command::Fig3 => cmd_fig3(scenario)?.into(),
        Command::Fig4 => cmd_fig4(scenario)?.into(),
        Command::Fig5 => cmd_fig5(scenario)?.into(),
        Command::Fig6 => cmd_fig6(scenario)?.into(),
        Command::Fidelity => cmd_fidelity(scenario)?.into(),
        Command::Point => cmd_point(scenario)?.into(),
        Command::OracleCheck => cmd_oracle_check(scenario)?,
    };
    let mut head = vec![
        format!("hybridlink {}", env!("CARGO_PKG_VERSION")),
        format!("command = {}", command.name()),
    ];
    head.extend(scenario.metadata().into_iter().map(|(k, v)| format!("param.{k} = {v}")));
    report.table.prepend_comments(head);
    Ok(report)
}

fn params(s: &Scenario, alpha: f64, link: Link, eta_d: f64) -> Result<ProtocolParams> {
    let p = ProtocolParams::new(alpha, link)
        .with_eta_h(s.eta_h)
        .with_eta_o(s.eta_o)
        .with_eta_d(eta_d)
        .with_p(s.p);
    p.validate()?;
    Ok(p)
}

fn distance_link(s: &Scenario, km: f64) -> Link {
    Link::Distance {
        total_km: km,
        loss_db_per_km: s.loss_db_per_km,
    }
}

fn product<A: Copy + Sync, B: Copy + Sync>(a: &[A], b: &[B]) -> Vec<(A, B)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

pub fn cmd_fig2(s: &Scenario) -> Result<ResultTable> {
    let cells = product(&s.loss_fractions, &s.alpha_grid.points());
    let values: Vec<f64> = cells
        .par_iter()
        .map(|&(r, a)| lossy_he_logneg(a, r))
        .collect::<hybridlink_core::Result<_>>()?;
    let mut t = ResultTable::new(["loss_fraction", "alpha", "logneg"]);
    for (&(r, a), v) in cells.iter().zip(values) {
        t.push(vec![r, a, v]);
    }
    Ok(t)
}

pub fn cmd_fig3(s: &Scenario) -> Result<ResultTable> {
    let grid = s.alpha_grid.points();
    let mut t = ResultTable::new(["distance_km", "alpha", "shared_logneg", "effective_logneg", "p0", "h"]);
    for &km in &s.distances_km {
        let fixed = params(s, s.alpha, distance_link(s, km), s.eta_d.unwrap_or(DEFAULT_ETA_D))?;
        for row in sweep_entanglement(SweepAxis::Alpha, &grid, &fixed)? {
            t.push(vec![km, row.x, row.shared_logneg, row.effective_logneg, row.p0, row.h]);
        }
    }
    Ok(t)
}

pub fn cmd_fig4(s: &Scenario) -> Result<ResultTable> {
    let grid = s.distance_grid.points();
    let mut t = ResultTable::new(["alpha", "distance_km", "shared_logneg", "effective_logneg", "p0", "h"]);
    for &alpha in &s.alphas {
        let fixed = params(s, alpha, distance_link(s, 0.0), s.eta_d.unwrap_or(DEFAULT_ETA_D))?;
        for row in sweep_entanglement(SweepAxis::Distance, &grid, &fixed)? {
            t.push(vec![
                alpha,
                row.x,
                row.shared_logneg,
                row.effective_logneg,
                row.p0,
                row.h,
            ]);
        }
    }
    Ok(t)
}

/// `nan` marks amplitudes whose key rate never reaches the target.
pub fn cmd_fig5(s: &Scenario) -> Result<ResultTable> {
    let eta_d = s.eta_d.unwrap_or(FIG5_ETA_D);
    let fixed = params(s, s.alpha, distance_link(s, 0.0), eta_d)?;
    let cells = product(&s.r_targets, &s.alpha_grid.points());
    let values: Vec<f64> = cells
        .par_iter()
        .map(|&(r, a)| match max_distance(r, a, &fixed) {
            Err(HybridError::NoSolution(_)) => Ok(f64::NAN),
            other => other,
        })
        .collect::<hybridlink_core::Result<_>>()?;
    let mut t = ResultTable::new(["r_target", "alpha", "max_distance_km"]);
    t.annotate("eta_d", eta_d);
    for (&(r, a), v) in cells.iter().zip(values) {
        t.push(vec![r, a, v]);
    }
    Ok(t)
}

pub fn cmd_fig6(s: &Scenario) -> Result<ResultTable> {
    let cells = product(&s.eta_ds, &s.distance_grid.points());
    let rows: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|&(eta_d, km)| {
            let k = key_rate(&params(s, s.alpha, distance_link(s, km), eta_d)?)?;
            Ok(vec![eta_d, km, k.r, k.raw, k.i_ab, k.chi_ae, k.p0, k.h])
        })
        .collect::<Result<_>>()?;
    let mut t = ResultTable::new([
        "eta_d",
        "distance_km",
        "key_rate",
        "raw_rate",
        "i_ab",
        "chi_ae",
        "p0",
        "h",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn cmd_fidelity(s: &Scenario) -> Result<ResultTable> {
    let cells = product(&s.n_bars, &s.transmittance_grid.points());
    let rows: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|&(n, t)| {
            let mut row = vec![n, t, n / (1.0 + n), channel_fidelity(t, n, s.alpha)?];
            if s.oracle {
                let o = channel_fidelity_oracle(t, n, s.alpha, s.cv_dim)?;
                row.extend([o.raw, o.normalized]);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut columns = vec!["n_bar", "transmittance", "x", "fidelity"];
    if s.oracle {
        columns.extend(["overlap", "normalized_overlap"]);
    }
    let mut t = ResultTable::new(columns);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn cmd_point(s: &Scenario) -> Result<ResultTable> {
    let p = params(
        s,
        s.alpha,
        distance_link(s, s.distance_km),
        s.eta_d.unwrap_or(DEFAULT_ETA_D),
    )?;
    let k = key_rate(&p)?;
    let shared = shared_logneg(k.h);
    let mut t = ResultTable::new([
        "distance_km",
        "transmittance",
        "h",
        "p0",
        "shared_logneg",
        "effective_logneg",
        "i_ab",
        "chi_ae",
        "raw_rate",
        "key_rate",
    ]);
    t.push(vec![
        s.distance_km,
        distance_to_transmittance(s.distance_km, s.loss_db_per_km)?,
        k.h,
        k.p0,
        shared,
        k.p0 * shared,
        k.i_ab,
        k.chi_ae,
        k.raw,
        k.r,
    ]);
    Ok(t)
}

struct Suite {
    name: &'static str,
    points: usize,
    max_deviation: f64,
    tolerance: f64,
}

fn worst(values: Vec<f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |m, v| if v.is_nan() || v > m { v } else { m })
}

fn swap_suite(s: &Scenario) -> Result<Suite> {
    let mut grid = Vec::new();
    for alpha in [0.3, 0.5, 0.8] {
        for t in [0.05, 0.1, 0.5] {
            for eta_o in [0.8, 1.0] {
                for eta_h in [0.55, 1.0] {
                    grid.push((alpha, t, eta_o, eta_h));
                }
            }
        }
    }
    let devs: Vec<f64> = grid
        .par_iter()
        .map(|&(alpha, t, eta_o, eta_h)| {
            let p = ProtocolParams::new(alpha, Link::Symmetric { transmittance: t })
                .with_eta_o(eta_o)
                .with_eta_h(eta_h)
                .with_p(s.p);
            let o = oracle_final_state(&p, s.cv_dim)?;
            let a = analytic_final_state(&p)?;
            let elem = (o.rho.matrix() - a.rho_shared.matrix())
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            Ok(elem.max((o.p0 - a.p0).abs()))
        })
        .collect::<hybridlink_core::Result<_>>()?;
    Ok(Suite {
        name: "swap",
        points: grid.len(),
        max_deviation: worst(devs),
        tolerance: 1e-6,
    })
}

fn lossy_suite(s: &Scenario) -> Result<Suite> {
    let alphas: Vec<f64> = (0..5).map(|k| 0.1 + 0.2 * k as f64).collect();
    let grid = product(&alphas, &[0.0, 0.25, 0.5, 0.75, 0.9]);
    let devs: Vec<f64> = grid
        .par_iter()
        .map(|&(a, r)| Ok((lossy_he_logneg(a, r)? - lossy_he_logneg_oracle(a, r, s.cv_dim)?).abs()))
        .collect::<hybridlink_core::Result<_>>()?;
    Ok(Suite {
        name: "lossy",
        points: grid.len(),
        max_deviation: worst(devs),
        tolerance: 1e-8,
    })
}

fn fidelity_suite(s: &Scenario) -> Result<Suite> {
    let grid = product(&[0.25, 0.5, 0.75], &[0.01, 0.05, 0.1]);
    let devs: Vec<f64> = grid
        .par_iter()
        .map(|&(t, n)| {
            let o = channel_fidelity_oracle(t, n, s.alpha, s.cv_dim)?;
            Ok((channel_fidelity(t, n, s.alpha)? - o.normalized).abs())
        })
        .collect::<hybridlink_core::Result<_>>()?;
    Ok(Suite {
        name: "fidelity",
        points: grid.len(),
        max_deviation: worst(devs),
        tolerance: 1e-6,
    })
}

/// Truncated quadrature kernel summed against coherent amplitudes.
fn kernel_suite(s: &Scenario) -> Suite {
    let alphas = [
        Complex64::new(0.3, 0.0),
        Complex64::new(0.6, -0.3),
        Complex64::new(0.9, 0.2),
    ];
    let ps = [-1.5, -0.5, 0.0, 0.8, FRAC_PI_2];
    let grid = product(&alphas, &ps);
    let devs: Vec<f64> = grid
        .iter()
        .map(|&(alpha, p)| {
            let mut amp = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
            let mut sum = Complex64::new(0.0, 0.0);
            for (n, kn) in homodyne_kernel(p, s.cv_dim).iter().enumerate() {
                if n > 0 {
                    amp *= alpha / (n as f64).sqrt();
                }
                sum += kn * amp;
            }
            let exponent = Complex64::new(-0.5 * p * p - 0.5 * alpha.norm_sqr(), 0.0)
                - 0.5 * alpha * alpha
                - Complex64::new(0.0, SQRT_2 * p) * alpha;
            let exact = PI.powf(-0.25) * exponent.exp();
            (sum - exact).norm()
        })
        .collect();
    Suite {
        name: "kernel",
        points: grid.len(),
        max_deviation: worst(devs),
        tolerance: 1e-9,
    }
}

pub fn cmd_oracle_check(s: &Scenario) -> Result<Report> {
    let suites = [swap_suite(s)?, lossy_suite(s)?, fidelity_suite(s)?, kernel_suite(s)];
    let mut t = ResultTable::new(["points", "max_deviation", "tolerance", "pass"]).keyed("suite");
    let mut failed = Vec::new();
    for suite in suites {
        let pass = suite.max_deviation <= suite.tolerance;
        if !pass {
            failed.push(suite.name.to_string());
        }
        log::info!("{}: max deviation {:e}", suite.name, suite.max_deviation);
        t.push_keyed(
            suite.name,
            vec![
                suite.points as f64,
                suite.max_deviation,
                suite.tolerance,
                if pass { 1.0 } else { 0.0 },
            ],
        );
    }
    Ok(Report { table: t, failed })
}
