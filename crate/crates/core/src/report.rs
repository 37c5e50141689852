//! Tabular results of the `solve` and `sweep` runs and their CSV encoding.

use std::io::Write;

use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::politics::kkt_residuals;
use crate::production::{coordination_slack, output_of, productive_optimum, ProductiveOptimum};
use crate::reforms::{theta_statics, BroadeningFamily, InterfaceFamily};
use crate::scenario::Scenario;
use crate::welfare::{total_welfare, WelfareReport};

/// A header and rows of already-formatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Output(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Output(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Output(e.to_string()))
    }
}

/// Shortest round-trip decimal form; locale independent.
pub fn cell(x: f64) -> String {
    format!("{x}")
}

fn blank_if_none(x: Option<f64>) -> String {
    x.map(cell).unwrap_or_default()
}

/// Everything `solve` reports for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveSummary {
    pub theta: f64,
    pub theta_bar: f64,
    pub optimum: ProductiveOptimum,
    pub welfare: WelfareReport,
    /// `|Y(A*) - Y*|` from the general output formula.
    pub output_gap: f64,
    /// Integration slack at the optimum.
    pub slack: f64,
    /// Largest absolute equilibrium first-order residual.
    pub kkt: f64,
}

pub fn solve(econ: &Economy) -> Result<SolveSummary> {
    let (optimum, alloc) = productive_optimum(econ)?;
    let welfare = total_welfare(econ, &alloc)?;
    let kkt = kkt_residuals(&econ.gov, econ.gov.lambda0, &welfare.outcome)
        .iter()
        .fold(0.0f64, |a, r| a.max(r.abs()));
    Ok(SolveSummary {
        theta: econ.theta,
        theta_bar: econ.theta_bar(),
        output_gap: (output_of(&alloc, econ)? - optimum.y_star).abs(),
        slack: coordination_slack(&alloc, econ)?,
        kkt,
        optimum,
        welfare,
    })
}

impl SolveSummary {
    pub fn table(&self) -> Table {
        let o = &self.optimum;
        let w = &self.welfare;
        let p = &w.outcome;
        Table {
            header: vec![
                "theta", "theta_bar", "h_star", "H_h_star", "D_q", "m_star", "Y_star", "e_pol",
                "z_pol", "t_S", "t_M", "R", "B_S", "B_M", "B_soc", "service_welfare",
                "dispersion", "W", "output_gap", "slack", "kkt_max",
            ],
            rows: vec![vec![
                cell(self.theta),
                cell(self.theta_bar),
                o.h_star.iter().map(|v| cell(*v)).collect::<Vec<_>>().join(";"),
                cell(o.h_hstar),
                cell(o.d_q),
                cell(o.m_star),
                cell(o.y_star),
                cell(p.e_pol),
                cell(p.z_pol),
                cell(p.t_s),
                cell(p.t_m),
                cell(p.r),
                cell(p.b_s),
                cell(p.b_m),
                cell(p.b_soc),
                cell(w.service_welfare),
                cell(w.dispersion),
                cell(w.total),
                cell(self.output_gap),
                cell(self.slack),
                cell(self.kkt),
            ]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    B,
    Alpha,
    Theta,
}

/// One row per grid point, in grid order.
///
/// * `b`: `b, m, Y, B_soc, W` with `W` blank where the integrator layer
///   vanishes.
/// * `alpha`: `alpha, B_S, B_M, B_soc, W, dB_soc, dW`.
/// * `theta`: `theta, theta_fraction, m, Y, B_soc, W, dm_closed, dm_fd`.
pub fn sweep(scenario: &Scenario, axis: SweepAxis) -> Result<Table> {
    let econ = &scenario.econ;
    match axis {
        SweepAxis::B => {
            let fam = BroadeningFamily::new(econ)?;
            let rows = scenario
                .sweep
                .b
                .iter()
                .map(|&b| {
                    let m = fam.m(b);
                    let w = if m > 0.0 { Some(fam.welfare(b)?.total) } else { None };
                    Ok(vec![
                        cell(b),
                        cell(m),
                        cell(fam.output(b)),
                        cell(fam.b_soc(b)),
                        blank_if_none(w),
                    ])
                })
                .collect::<Result<_>>()?;
            Ok(Table {
                header: vec!["b", "m", "Y", "B_soc", "W"],
                rows,
            })
        }
        SweepAxis::Alpha => {
            let fam = InterfaceFamily::new(econ)?;
            let rows = scenario
                .sweep
                .alpha
                .iter()
                .map(|&a| {
                    let w = fam.welfare(a)?;
                    let d = fam.decompose(a)?;
                    Ok(vec![
                        cell(a),
                        cell(w.outcome.b_s),
                        cell(w.outcome.b_m),
                        cell(w.outcome.b_soc),
                        cell(w.total),
                        cell(d.d_b_soc),
                        cell(d.dw),
                    ])
                })
                .collect::<Result<_>>()?;
            Ok(Table {
                header: vec!["alpha", "B_S", "B_M", "B_soc", "W", "dB_soc", "dW"],
                rows,
            })
        }
        SweepAxis::Theta => {
            let rows = theta_statics(econ, &scenario.theta_grid())?
                .into_iter()
                .zip(&scenario.sweep.theta_fraction)
                .map(|(r, f)| {
                    vec![
                        cell(r.theta),
                        cell(*f),
                        cell(r.m),
                        cell(r.y),
                        cell(r.b_soc),
                        cell(r.w),
                        cell(r.dm_closed),
                        cell(r.dm_fd),
                    ]
                })
                .collect();
            Ok(Table {
                header: vec![
                    "theta", "theta_fraction", "m", "Y", "B_soc", "W", "dm_closed", "dm_fd",
                ],
                rows,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario() -> Scenario {
        Scenario::parse(
            "learning.family = rational\nlearning.param = 1\nmodel.q = 0.5,0.3,0.2\n\
             model.u = 0.3,0.35,0.35\nmodel.p = 0.5\nmodel.theta_fraction = 0.5\nmodel.v = 10\n\
             gov.eta = 0.5\ngov.c0 = 0.125\ngov.tau = 0.2\ngov.lambda0 = 1\n\
             sweep.b = 0, 0.5, 1\nsweep.alpha = 0, 1\nsweep.theta_fraction = 0.2, 0.4, 0.6\n",
        )
        .unwrap()
    }

    #[test]
    fn solve_row_has_header_width() {
        let s = solve(&scenario().econ).unwrap();
        let t = s.table();
        assert_eq!(t.rows[0].len(), t.header.len());
        assert!(s.output_gap < 1e-10 && s.slack.abs() < 1e-10 && s.kkt < 1e-9);
    }

    #[test]
    fn sweep_rows_follow_grid() {
        let sc = scenario();
        let b = sweep(&sc, SweepAxis::B).unwrap();
        assert_eq!(b.rows.len(), 3);
        assert_eq!(b.rows[2][4], "");
        let csv = b.to_csv_string().unwrap();
        assert!(csv.starts_with("b,m,Y,B_soc,W\n0,"));
        assert_eq!(sweep(&sc, SweepAxis::Alpha).unwrap().rows.len(), 2);
        let t = sweep(&sc, SweepAxis::Theta).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.rows[1][1], "0.4");
    }

    #[test]
    fn cells_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 12345.678] {
            assert_eq!(cell(x).parse::<f64>().unwrap(), x);
        }
    }
}
