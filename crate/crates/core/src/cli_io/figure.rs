//! Plot-ready panel CSVs cut from upstream artifacts.

use std::fs;
use std::path::Path;

use super::config::FigureTag;
use super::output::Artifact;
use crate::error::{Error, Result};
use crate::phasemap::FINITE_SIZE_CAVEAT;

/// A parsed CSV artifact; cells are kept verbatim.
#[derive(Debug, Clone)]
pub struct Table {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingArtifact(path.to_path_buf()));
        }
        let text = fs::read_to_string(path)?;
        Self::parse(&text).map_err(|message| Error::MalformedArtifact {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut comments = Vec::new();
        let mut header: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for line in text.lines() {
            if let Some(c) = line.strip_prefix('#') {
                comments.push(c.trim().to_string());
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<String> = line.split(',').map(str::to_string).collect();
            match &header {
                None => header = Some(cells),
                Some(h) if h.len() != cells.len() => {
                    return Err(format!("row has {} cells, header has {}", cells.len(), h.len()))
                }
                Some(_) => rows.push(cells),
            }
        }
        let header = header.ok_or("no header line")?;
        Ok(Self { comments, header, rows })
    }

    fn column(&self, name: &str) -> std::result::Result<usize, String> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| format!("missing column `{name}`"))
    }

    /// New CSV with the named columns, renamed, under a fresh comment block.
    fn select(&self, columns: &[(&str, &str)], comments: &[String]) -> std::result::Result<String, String> {
        let idx = columns
            .iter()
            .map(|(c, _)| self.column(c))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut out = String::new();
        for c in comments {
            out += &format!("# {c}\n");
        }
        out += &columns.iter().map(|(_, r)| *r).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.rows {
            out += &idx.iter().map(|&i| row[i].as_str()).collect::<Vec<_>>().join(",");
            out.push('\n');
        }
        Ok(out)
    }
}

struct Panel {
    name: &'static str,
    source: &'static str,
    columns: &'static [(&'static str, &'static str)],
    header: &'static [&'static str],
}

fn panels(tag: FigureTag) -> &'static [Panel] {
    match tag {
        FigureTag::Fig2 => &[
            Panel {
                name: "fig2_a.csv",
                source: "map3d.csv",
                columns: &[("theta", "theta"), ("phi", "phi"), ("R_over_NK", "R_over_NK")],
                header: &[
                    "panel a: mean-field angular map, detected standing wave phase phi1 = 0",
                    "axes: theta (polar, rad), phi (azimuth, rad); value R/N_K",
                ],
            },
            Panel {
                name: "fig2_b.csv",
                source: "map3d_phi1_pi2.csv",
                columns: &[("theta", "theta"), ("phi", "phi"), ("R_over_NK", "R_over_NK")],
                header: &[
                    "panel b: mean-field angular map, detected standing wave phase phi1 = pi/2",
                    "axes: theta (polar, rad), phi (azimuth, rad); value R/N_K",
                ],
            },
        ],
        FigureTag::Fig3 => &[
            Panel {
                name: "fig3_a.csv",
                source: "wannier.csv",
                columns: &[("x", "x"), ("W0", "W0"), ("W1", "W1")],
                header: &[
                    "panel a: Wannier overlap densities",
                    "axes: x in units of d; W0, W1 in units of 1/d",
                ],
            },
            Panel {
                name: "fig3_b.csv",
                source: "wannier_ft.csv",
                columns: &[("k", "k"), ("ftW0", "ftW0"), ("ftW1", "ftW1")],
                header: &[
                    "panel b: Fourier transforms of W0 and W1",
                    "axes: k in units of 1/d; dimensionless",
                ],
            },
            Panel {
                name: "fig3_c.csv",
                source: "coupling_phase.csv",
                columns: &[("phi", "phi"), ("J_00", "J_00"), ("J_11", "J_11"), ("J_01", "J_01")],
                header: &[
                    "panel c: coupling coefficients against the standing-wave phase",
                    "axes: phi (rad); coefficients dimensionless",
                ],
            },
            Panel {
                name: "fig3_d.csv",
                source: "coupling_beta.csv",
                columns: &[("beta", "beta"), ("X_00", "X_00"), ("X_11", "X_11"), ("X_01", "X_01")],
                header: &[
                    "panel d: quadrature coefficients against the local-oscillator phase",
                    "axes: beta (rad); coefficients dimensionless",
                ],
            },
        ],
        FigureTag::Fig4 => &[
            Panel {
                name: "fig4_a.csv",
                source: "grid_mu_u.csv",
                columns: &[("axis1", "mu_over_2J"), ("axis2", "U_over_2J"), ("Rmax", "Rmax")],
                header: &[
                    "panel a: maximum of the quantum addition over the scan",
                    "axes: mu/2J, U/2J; Rmax in units of |C|^2",
                ],
            },
            Panel {
                name: "fig4_b.csv",
                source: "grid_mu_u.csv",
                columns: &[("axis1", "mu_over_2J"), ("axis2", "U_over_2J"), ("W_R", "W_R")],
                header: &["panel b: dip width", "axes: mu/2J, U/2J; W_R in rad of theta1"],
            },
        ],
        FigureTag::Fig5 => &[
            Panel {
                name: "fig5_a.csv",
                source: "grid_disorder.csv",
                columns: &[("axis1", "U_over_2J"), ("axis2", "V_over_2J"), ("Rmax", "Rmax")],
                header: &[
                    "panel a: maximum of the quantum addition",
                    "axes: U/2J, V/2J; Rmax in units of |C|^2",
                ],
            },
            Panel {
                name: "fig5_b.csv",
                source: "grid_disorder.csv",
                columns: &[("axis1", "U_over_2J"), ("axis2", "V_over_2J"), ("W_R", "W_R")],
                header: &["panel b: dip width", "axes: U/2J, V/2J; W_R in rad of theta1"],
            },
            Panel {
                name: "fig5_c.csv",
                source: "grid_disorder.csv",
                columns: &[("axis1", "U_over_2J"), ("axis2", "V_over_2J"), ("label", "label")],
                header: &[
                    "panel c: phase labels from the corner-calibrated classifier",
                    "axes: U/2J, V/2J; label in {SF, MI, BG}",
                ],
            },
        ],
        FigureTag::Quads => &[
            Panel {
                name: "quads_a.csv",
                source: "quads.csv",
                columns: &[
                    ("u", "U_over_zJ"),
                    ("intensity_min_over_Ctilde", "intensity_over_Ctilde"),
                ],
                header: &[
                    "panel a: photon number in the diffraction minimum on the n = 1 path",
                    "axes: U/zJ; intensity in units of C~",
                ],
            },
            Panel {
                name: "quads_b.csv",
                source: "quads.csv",
                columns: &[("u", "U_over_zJ"), ("var_x0", "var_X0"), ("var_xpi2", "var_Xpi2")],
                header: &[
                    "panel b: matter quadrature variances on the n = 1 path",
                    "axes: U/zJ; variances dimensionless",
                ],
            },
        ],
    }
}

/// Upstream artifacts a figure tag needs.
pub fn required_inputs(tag: FigureTag) -> Vec<&'static str> {
    let mut v: Vec<&str> = panels(tag).iter().map(|p| p.source).collect();
    v.dedup();
    v
}

pub fn emit_figure_data(dir: &Path, tag: FigureTag) -> Result<Vec<Artifact>> {
    let mut out = Vec::new();
    for p in panels(tag) {
        let path = dir.join(p.source);
        let table = Table::read(&path)?;
        let mut comments: Vec<String> = p.header.iter().map(|s| s.to_string()).collect();
        comments.push(format!("source: {}", p.source));
        comments.extend(table.comments.iter().map(|c| format!("upstream: {c}")));
        if matches!(tag, FigureTag::Fig4 | FigureTag::Fig5) && !table.comments.iter().any(|c| c == FINITE_SIZE_CAVEAT) {
            comments.push(FINITE_SIZE_CAVEAT.into());
        }
        let text = table
            .select(p.columns, &comments)
            .map_err(|message| Error::MalformedArtifact { path, message })?;
        out.push(Artifact::new(p.name, text));
    }
    Ok(out)
}
