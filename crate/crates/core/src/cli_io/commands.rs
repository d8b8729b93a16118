//! One function per subcommand: configuration in, in-memory artifacts out.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{linspace, parse_range, GeometryKind, RunConfig, Source};
use super::output::{Artifact, Csv};
use crate::ed1d::{ground_state_with, ChainSpec, DisorderSpec, EDState, LanczosOptions, SectorEnergies};
use crate::error::{Error, Result};
use crate::format::g12;
use crate::gutzwiller::{
    intensity_scale, matter_quadrature_variance, max_quadrature_mean, min_intensity, product_expectations,
    solve_gutzwiller, unit_density_mu, BoseHubbardParams, GutzwillerState,
};
use crate::observables::{
    angular_grid, density_scan, extract_summary, luttinger_parameter, mf_angular_map_3d, operator_scan, photon_rate,
    sphere_grid, AngularScan, ScanGeometry, SphereMap, SummaryOptions,
};
use crate::optics::{
    coefficients_at_positions, coupling_coefficients, density_suppression_phase, Geometry, LightMode, ModeKind,
};
use crate::phasemap::{sweep_disorder, sweep_mu_u, Axis, PhaseGrid, SweepMode, SweepSettings, FINITE_SIZE_CAVEAT};
use crate::wannier::{build_wannier, solve_bloch_band, LatticePotential, Overlap, WannierBasis};

/// Artifacts of one command plus manifest annotations.
#[derive(Debug, Default)]
pub struct Outputs {
    pub artifacts: Vec<Artifact>,
    pub caveat: Option<String>,
    pub notes: Vec<String>,
}

/// Rounds to 12 significant digits so JSON numbers match the CSV format.
pub(crate) fn r12(x: f64) -> f64 {
    g12(x).parse().unwrap_or(x)
}

fn r12v(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| r12(x)).collect()
}

fn c12(z: Complex64) -> [f64; 2] {
    [r12(z.re), r12(z.im)]
}

fn named(cfg: &RunConfig, default: &str) -> String {
    cfg.out.clone().unwrap_or_else(|| default.to_string())
}

pub fn wannier_basis(cfg: &RunConfig) -> Result<WannierBasis> {
    let l = &cfg.lattice;
    let bloch = solve_bloch_band(LatticePotential::new(l.depth)?, l.cutoff, l.nq)?;
    build_wannier(&bloch)
}

fn lanczos(cfg: &RunConfig) -> LanczosOptions {
    LanczosOptions {
        krylov: cfg.tolerance.krylov,
        max_restarts: cfg.tolerance.max_restarts,
        tolerance: cfg.tolerance.lanczos,
        seed: cfg.seed,
    }
}

pub fn wannier(cfg: &RunConfig) -> Result<Outputs> {
    let basis = wannier_basis(cfg)?;
    let x = basis.positions();
    let (w, w0, w1) = (
        basis.orbital(),
        basis.overlap(Overlap::Density),
        basis.overlap(Overlap::Bond),
    );
    let mut real = Csv::new(
        &[
            format!("lattice depth V0 = {} E_R; x in units of d", g12(cfg.lattice.depth)),
            "W0 = w(x)^2, W1 = w(x - d/2) w(x + d/2)".into(),
        ],
        &["x", "w", "W0", "W1"],
    );
    for i in 0..x.len() {
        real.row(&[x[i], w[i], w0[i], w1[i]]);
    }
    let (t0, t1) = (
        basis.fourier_table(Overlap::Density),
        basis.fourier_table(Overlap::Bond),
    );
    let mut ft = Csv::new(
        &["k in units of 1/d; ftW = int W(x) exp(i k x) dx".into()],
        &["k", "ftW0", "ftW1"],
    );
    for (i, k) in t0.wavenumbers().enumerate() {
        ft.row(&[k, t0.values[i], t1.values[i]]);
    }
    let f = |which, k| basis.fourier_overlap(which, k);
    let summary = WannierSummary {
        depth: cfg.lattice.depth,
        periods: basis.grid().periods,
        points_per_period: basis.grid().points_per_period,
        hopping_integral: r12(basis.hopping_integral()),
        norm: r12(basis.site_overlap(0)),
        neighbour_overlap: r12(basis.site_overlap(1)),
        ft_w0_0: r12(f(Overlap::Density, 0.0)?),
        ft_w0_2pi: r12(f(Overlap::Density, 2.0 * PI)?),
        ft_w1_0: r12(f(Overlap::Bond, 0.0)?),
        ft_w1_pi: r12(f(Overlap::Bond, PI)?),
        ft_w1_2pi: r12(f(Overlap::Bond, 2.0 * PI)?),
        density_suppression_phase: density_suppression_phase(&basis).ok().map(r12),
    };
    Ok(Outputs {
        artifacts: vec![
            real.into_artifact(named(cfg, "wannier.csv")),
            ft.into_artifact("wannier_ft.csv"),
            Artifact::json("wannier.json", &summary)?,
        ],
        ..Default::default()
    })
}

#[derive(Serialize)]
struct WannierSummary {
    depth: f64,
    periods: usize,
    points_per_period: usize,
    hopping_integral: f64,
    norm: f64,
    neighbour_overlap: f64,
    ft_w0_0: f64,
    ft_w0_2pi: f64,
    ft_w1_0: f64,
    ft_w1_pi: f64,
    ft_w1_2pi: f64,
    density_suppression_phase: Option<f64>,
}

fn geometry_of(cfg: &RunConfig, basis: &WannierBasis) -> Result<Geometry> {
    let g = &cfg.geometry;
    Ok(match g.kind {
        GeometryKind::Max => Geometry::max_suppressed(basis)?,
        GeometryKind::Min => Geometry::min_nodes(),
        GeometryKind::Custom => Geometry::Custom {
            k0x: g.k0x,
            k1x: g.k1x,
            phi0: g.phi0,
            phi1: g.phi1,
        },
    })
}

#[derive(Serialize)]
struct CouplingDump {
    geometry: Geometry,
    sites: Vec<usize>,
    density: Vec<[f64; 2]>,
    bond: Vec<[f64; 2]>,
    dropped_next_nearest: f64,
}

pub fn coupling(cfg: &RunConfig) -> Result<Outputs> {
    let basis = wannier_basis(cfg)?;
    let d = basis.period();
    let geometry = geometry_of(cfg, &basis)?;
    let (probe, detected) = geometry.modes(d);
    let k = cfg.geometry.sites;
    let c = coupling_coefficients(&basis, &probe, &detected, k, k)?;
    let dump = CouplingDump {
        geometry,
        sites: c.sites.clone(),
        density: c.density.iter().map(|&z| c12(z)).collect(),
        bond: c.bond.iter().map(|&z| c12(z)).collect(),
        dropped_next_nearest: r12(c.dropped_next_nearest),
    };

    let n = cfg.geometry.phase_points;
    let pair = [0.0, d];
    let mut phase = Csv::new(
        &[
            format!(
                "standing waves k0x = {}, k1x = {} (1/d) with phases phi0 = phi, phi1 = -phi",
                g12(probe.k[0]),
                g12(detected.k[0])
            ),
            "J_00, J_11 density and J_01 bond coefficients at sites x = 0 and x = d".into(),
        ],
        &["phi", "J_00", "J_11", "J_01"],
    );
    for phi in linspace(0.0, PI, n) {
        let p = LightMode::standing(probe.k, phi);
        let q = LightMode::standing(detected.k, -phi);
        let (dens, bond, _) = coefficients_at_positions(&basis, &p, &q, &pair)?;
        phase.row(&[phi, dens[0].re, dens[1].re, bond[0].re]);
    }

    let (dens, bond, _) = coefficients_at_positions(&basis, &probe, &detected, &pair)?;
    let mut beta = Csv::new(
        &[
            "configured geometry; coefficients of the quadrature X^F_beta = (F e^{-i beta} + F^+ e^{i beta}) / 2"
                .into(),
            "entries Re(J e^{-i beta}) at sites x = 0 and x = d".into(),
        ],
        &["beta", "X_00", "X_11", "X_01"],
    );
    for b in linspace(0.0, PI, n) {
        let e = Complex64::from_polar(1.0, -b);
        beta.row(&[b, (dens[0] * e).re, (dens[1] * e).re, (bond[0] * e).re]);
    }
    Ok(Outputs {
        artifacts: vec![
            Artifact::json(named(cfg, "coupling.json"), &dump)?,
            phase.into_artifact("coupling_phase.csv"),
            beta.into_artifact("coupling_beta.csv"),
        ],
        notes: vec!["phase and local-oscillator scans are reported separately".into()],
        ..Default::default()
    })
}

fn mf_state(cfg: &RunConfig, u: f64, mu: Option<f64>) -> Result<GutzwillerState> {
    let m = &cfg.mf;
    let tol = cfg.tolerance.mf;
    let mu = match mu {
        Some(mu) => mu,
        None => unit_density_mu(u, m.z, tol, m.max_iter)?,
    };
    let mut p = BoseHubbardParams::in_zj_units(u, mu, m.z)?;
    p.n_max = m.n_max;
    solve_gutzwiller(p, tol, m.max_iter)
}

fn mf_row(s: &GutzwillerState) -> [f64; 8] {
    let p2 = s.phi * s.phi;
    let a = s.b2 - p2;
    let b = s.density - p2;
    [
        s.params.interaction,
        s.params.chemical_potential,
        s.phi,
        s.density,
        s.b2,
        matter_quadrature_variance(s, true),
        matter_quadrature_variance(s, false),
        a * a + b * (1.0 + b),
    ]
}

const MF_COLUMNS: [&str; 8] = [
    "u",
    "mu",
    "phi",
    "n",
    "b2",
    "var_x0",
    "var_xpi2",
    "intensity_min_over_Ctilde",
];

#[derive(Serialize)]
struct MfSummary {
    u_over_zj: f64,
    mu_over_zj: f64,
    unit_density_path: bool,
    z: usize,
    n_max: usize,
    phi: f64,
    density: f64,
    b2: f64,
    n2: f64,
    energy: f64,
    number_variance: f64,
    var_x0: f64,
    var_xpi2: f64,
    illuminated_sites: usize,
    c_abs: f64,
    ctilde: f64,
    intensity_min: f64,
    intensity_min_over_ctilde: f64,
    quadrature_mean_max: f64,
}

pub fn mf(cfg: &RunConfig) -> Result<Outputs> {
    let basis = wannier_basis(cfg)?;
    let m = &cfg.mf;
    let k = cfg.geometry.sites;
    let c_abs = cfg.geometry.c_abs;
    let f1_pi = basis.fourier_overlap(Overlap::Bond, PI)?;
    let f1_2pi = basis.fourier_overlap(Overlap::Bond, 2.0 * PI)?;
    let s = mf_state(cfg, m.u, m.mu)?;
    let ctilde = intensity_scale(k, c_abs, f1_pi);
    let row = mf_row(&s);
    let summary = MfSummary {
        u_over_zj: r12(s.params.interaction),
        mu_over_zj: r12(s.params.chemical_potential),
        unit_density_path: m.mu.is_none(),
        z: m.z,
        n_max: s.params.n_max,
        phi: r12(s.phi),
        density: r12(s.density),
        b2: r12(s.b2),
        n2: r12(s.n2),
        energy: r12(s.energy),
        number_variance: r12(s.number_variance()),
        var_x0: r12(row[5]),
        var_xpi2: r12(row[6]),
        illuminated_sites: k,
        c_abs,
        ctilde: r12(ctilde),
        intensity_min: r12(min_intensity(&s, k, c_abs, f1_pi)),
        intensity_min_over_ctilde: r12(row[7]),
        quadrature_mean_max: r12(max_quadrature_mean(&s, k, f1_2pi)),
    };
    let mut artifacts = vec![Artifact::json("mf.json", &summary)?];

    if m.scan_u.is_some() || m.scan_mu.is_some() {
        let us = match &m.scan_u {
            Some(r) => range_values(r, "mf.scan_u")?,
            None => vec![m.u],
        };
        let mus: Vec<Option<f64>> = match &m.scan_mu {
            Some(r) => range_values(r, "mf.scan_mu")?.into_iter().map(Some).collect(),
            None => vec![m.mu],
        };
        let jobs: Vec<(f64, Option<f64>)> = us.iter().flat_map(|&u| mus.iter().map(move |&mu| (u, mu))).collect();
        let rows = jobs
            .par_iter()
            .map(|&(u, mu)| mf_state(cfg, u, mu).map(|s| mf_row(&s)))
            .collect::<Result<Vec<_>>>()?;
        let mut grid = Csv::new(
            &[format!(
                "Gutzwiller mean field, z = {}; u = U/zJ, mu = mu/zJ; unit-density mu where no mu is given",
                m.z
            )],
            &MF_COLUMNS,
        );
        rows.iter().for_each(|r| grid.row(r));
        artifacts.push(grid.into_artifact(named(cfg, "mf_grid.csv")));
    }

    let q = &cfg.quads;
    let rows = linspace(q.u[0], q.u[1], q.count)
        .par_iter()
        .map(|&u| mf_state(cfg, u, None).map(|s| mf_row(&s)))
        .collect::<Result<Vec<_>>>()?;
    let mut quads = Csv::new(
        &[format!(
            "unit-density path n = 1, z = {}; intensity in the diffraction minimum over C~ = 2|C|^2 (K-1) F[W1](pi/d)^2",
            m.z
        )],
        &MF_COLUMNS,
    );
    rows.iter().for_each(|r| quads.row(r));
    artifacts.push(quads.into_artifact("quads.csv"));
    Ok(Outputs {
        artifacts,
        notes: vec!["quads.csv follows the unit-density path n = 1".into()],
        ..Default::default()
    })
}

fn range_values(spec: &str, key: &str) -> Result<Vec<f64>> {
    let (a, b, n) = parse_range(spec).map_err(|m| Error::Config {
        line: None,
        message: format!("{key}: {m}"),
    })?;
    Ok(linspace(a, b, n))
}

pub fn chain_spec(cfg: &RunConfig) -> ChainSpec {
    let c = &cfg.chain;
    let n = c.bosons();
    let mut spec = ChainSpec::new(c.sites, n, c.u);
    spec.boundary = c.boundary;
    spec.chemical_potential = 2.0 * c.mu;
    spec.n_cap = c.n_cap_for(n);
    if c.v > 0.0 {
        spec = spec.with_disorder(DisorderSpec {
            strength: 2.0 * c.v,
            ratio: c.ratio,
            offset: c.offset,
        });
    }
    spec
}

pub fn ed_state(cfg: &RunConfig) -> Result<EDState> {
    let spec = chain_spec(cfg);
    let opts = lanczos(cfg);
    if cfg.chain.grand_canonical {
        let sectors = SectorEnergies::compute_with(&spec, cfg.chain.max_bosons(), opts)?;
        let n = sectors.best_sector(spec.chemical_potential);
        let mut s = spec.with_bosons(n);
        if let Some(cap) = cfg.chain.n_cap {
            s.n_cap = cap.min(n);
        }
        ground_state_with(&s, opts)
    } else {
        ground_state_with(&spec, opts)
    }
}

#[derive(Serialize)]
struct EdDump {
    sites: usize,
    bosons: usize,
    u_over_2j: f64,
    mu_over_2j: f64,
    v_over_2j: f64,
    ratio: f64,
    offset: f64,
    boundary: crate::ed1d::Boundary,
    n_cap: usize,
    dimension: usize,
    energy: f64,
    residual: f64,
    degenerate: bool,
    density: Vec<f64>,
    dd: Vec<f64>,
    sp: Vec<f64>,
    sum_dd: f64,
    k_b: Option<f64>,
}

pub fn ed(cfg: &RunConfig) -> Result<Outputs> {
    let s = ed_state(cfg)?;
    let c = &s.correlations;
    let m = s.sites();
    let positions: Vec<f64> = (0..m).map(|i| i as f64).collect();
    let k_b = if s.spec.bosons > 0 {
        Some(r12(luttinger_parameter(&c.dd, &positions)?.k_b))
    } else {
        None
    };
    let dump = EdDump {
        sites: m,
        bosons: s.spec.bosons,
        u_over_2j: cfg.chain.u,
        mu_over_2j: cfg.chain.mu,
        v_over_2j: cfg.chain.v,
        ratio: cfg.chain.ratio,
        offset: cfg.chain.offset,
        boundary: s.spec.boundary,
        n_cap: s.spec.n_cap,
        dimension: s.basis.len(),
        energy: r12(s.energy / 2.0),
        residual: s.residual,
        degenerate: s.degenerate,
        density: r12v(&c.density),
        dd: r12v(&c.dd),
        sp: r12v(&c.sp),
        sum_dd: r12((0..m).map(|i| c.dd(i, i)).sum()),
        k_b,
    };
    Ok(Outputs {
        artifacts: vec![Artifact::json(named(cfg, "state.json"), &dump)?],
        notes: vec!["energy in units of 2J; dd and sp are row-major M x M".into()],
        caveat: Some(FINITE_SIZE_CAVEAT.into()),
    })
}

#[derive(Serialize)]
struct ScanDump {
    source: Source,
    geometry: ScanGeometry,
    theta0: f64,
    k: f64,
    points: usize,
    r_max: f64,
    r_max_per_atom: Option<f64>,
    dip_center: Option<f64>,
    w_r: Option<f64>,
    w_r_dk: Option<f64>,
    r_min: Option<f64>,
    sum_dd: Option<f64>,
    k_b: Option<f64>,
    dip_error: Option<String>,
}

pub fn scan_run(cfg: &RunConfig) -> Result<(AngularScan, Option<EDState>)> {
    let sc = &cfg.scan;
    let grid = angular_grid(sc.points_per_pi);
    let needs_basis = sc.geometry != ScanGeometry::Density;
    let basis = if needs_basis { Some(wannier_basis(cfg)?) } else { None };
    match sc.source {
        Source::Ed => {
            let s = ed_state(cfg)?;
            let m = s.sites();
            let scan = match (sc.geometry, sc.k_sites) {
                (ScanGeometry::Density, None) => {
                    let positions: Vec<f64> = (0..m).map(|i| i as f64).collect();
                    density_scan(&s.correlations.dd, &positions, sc.theta0, sc.k, &grid)?
                }
                (g, ks) => operator_scan(g, sc.theta0, sc.k, &grid, basis.as_ref(), ks.unwrap_or(m), m, |op| {
                    crate::ed1d::expectation_of(&s, op, 0.0)
                })?,
            };
            Ok((scan, Some(s)))
        }
        Source::Mf => {
            let st = mf_state(cfg, cfg.mf.u, cfg.mf.mu)?;
            let k = sc.k_sites.unwrap_or(cfg.geometry.sites);
            let scan = operator_scan(sc.geometry, sc.theta0, sc.k, &grid, basis.as_ref(), k, k, |op| {
                Ok(product_expectations(&st, op, 0.0))
            })?;
            Ok((scan, None))
        }
    }
}

pub fn scan(cfg: &RunConfig) -> Result<Outputs> {
    let sc = &cfg.scan;
    let (scan, state) = scan_run(cfg)?;
    let r_max = scan.r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let summary = extract_summary(
        &scan,
        SummaryOptions {
            mask_half_width: sc.mask_half_width,
        },
    );
    let (sum_dd, k_b, atoms) = match &state {
        Some(s) => {
            let m = s.sites();
            let positions: Vec<f64> = (0..m).map(|i| i as f64).collect();
            let kb = if s.spec.bosons > 0 {
                Some(r12(luttinger_parameter(&s.correlations.dd, &positions)?.k_b))
            } else {
                None
            };
            (
                Some(r12((0..m).map(|i| s.correlations.dd(i, i)).sum())),
                kb,
                s.spec.bosons as f64,
            )
        }
        None => (None, None, 0.0),
    };
    let dump = ScanDump {
        source: sc.source,
        geometry: sc.geometry,
        theta0: sc.theta0,
        k: r12(sc.k),
        points: scan.r.len(),
        r_max: r12(r_max),
        r_max_per_atom: (atoms > 0.0).then(|| r12(r_max / atoms)),
        dip_center: summary.as_ref().ok().map(|s| r12(s.dip_center)),
        w_r: summary.as_ref().ok().map(|s| r12(s.w_r)),
        w_r_dk: summary.as_ref().ok().map(|s| r12(s.w_r_dk)),
        r_min: summary.as_ref().ok().map(|s| r12(s.r_min)),
        sum_dd,
        k_b,
        dip_error: summary.as_ref().err().map(|e| e.to_string()),
    };
    let mut comments = vec![
        format!(
            "source = {:?}; geometry = {:?}; theta0 = {}; k = {} / d",
            sc.source,
            sc.geometry,
            g12(sc.theta0),
            g12(sc.k)
        )
        .to_lowercase(),
        "R = <F^+ F> - |<F>|^2 in units of |C|^2, raw (not divided by the atom number)".into(),
        format!("R_max = {}", g12(r_max)),
    ];
    match &summary {
        Ok(s) => comments.push(format!(
            "dip centre = {}; W_R = {} rad ({} in dk d)",
            g12(s.dip_center),
            g12(s.w_r),
            g12(s.w_r_dk)
        )),
        Err(e) => comments.push(format!("no dip: {e}")),
    }
    let mut csv = Csv::new(
        &comments,
        &["theta1", "R", "is_bragg_generalized", "is_bragg_classical"],
    );
    for i in 0..scan.r.len() {
        csv.raw_row(&[
            g12(scan.theta1[i]),
            g12(scan.r[i]),
            u8::from(scan.generalized_bragg[i]).to_string(),
            u8::from(scan.classical_bragg[i]).to_string(),
        ]);
    }
    Ok(Outputs {
        artifacts: vec![
            csv.into_artifact(named(cfg, "scan.csv")),
            Artifact::json("scan_summary.json", &dump)?,
        ],
        caveat: state.map(|_| FINITE_SIZE_CAVEAT.to_string()),
        notes: vec![],
    })
}

pub fn map3d_maps(cfg: &RunConfig) -> Result<(GutzwillerState, [SphereMap; 2])> {
    let s = mf_state(cfg, cfg.mf.u, cfg.mf.mu)?;
    let p = cfg.map3d.probe;
    let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    let probe = LightMode::travelling(p.map(|x| x * PI / norm), 0.0)?;
    let (theta, phi) = sphere_grid(cfg.map3d.q);
    let sigma2 = s.number_variance();
    let one = |phase: f64| {
        mf_angular_map_3d(
            sigma2,
            s.density,
            &probe,
            ModeKind::Standing,
            phase,
            cfg.map3d.lattice,
            (&theta, &phi),
        )
    };
    let maps = [one(0.0)?, one(PI / 2.0)?];
    Ok((s, maps))
}

#[derive(Serialize)]
struct MapDump {
    u_over_zj: f64,
    mu_over_zj: f64,
    sigma2: f64,
    density: f64,
    lattice: usize,
    probe: [f64; 3],
    background_phi1_0: f64,
    background_phi1_pi2: f64,
    max_phi1_0: f64,
    max_phi1_pi2: f64,
}

fn map_csv(map: &SphereMap, phi1: &str, name: String) -> Artifact {
    let mut csv = Csv::new(
        &[
            format!("detected standing wave phase phi1 = {phi1}; travelling probe, |k| = pi/d"),
            "R/N_K with N_K = K n; theta polar angle from z, phi azimuth".into(),
        ],
        &["theta", "phi", "R_over_NK"],
    );
    for (it, &t) in map.theta.iter().enumerate() {
        for (ip, &p) in map.phi.iter().enumerate() {
            csv.row(&[t, p, map.at(it, ip)]);
        }
    }
    csv.into_artifact(name)
}

pub fn map3d(cfg: &RunConfig) -> Result<Outputs> {
    let (s, [m0, m1]) = map3d_maps(cfg)?;
    let max = |m: &SphereMap| m.r_over_nk.iter().copied().fold(0.0, f64::max);
    let dump = MapDump {
        u_over_zj: r12(s.params.interaction),
        mu_over_zj: r12(s.params.chemical_potential),
        sigma2: r12(s.number_variance()),
        density: r12(s.density),
        lattice: cfg.map3d.lattice,
        probe: cfg.map3d.probe,
        background_phi1_0: r12(m0.background()),
        background_phi1_pi2: r12(m1.background()),
        max_phi1_0: r12(max(&m0)),
        max_phi1_pi2: r12(max(&m1)),
    };
    Ok(Outputs {
        artifacts: vec![
            map_csv(&m0, "0", named(cfg, "map3d.csv")),
            map_csv(&m1, "pi/2", "map3d_phi1_pi2.csv".into()),
            Artifact::json("map3d.json", &dump)?,
        ],
        ..Default::default()
    })
}

pub fn phase_grid(cfg: &RunConfig) -> Result<PhaseGrid> {
    let sw = &cfg.sweep;
    let ch = &cfg.chain;
    let su = sw.u_range();
    let mut template = ChainSpec::new(ch.sites, ch.sites, ch.u);
    template.boundary = ch.boundary;
    let settings = SweepSettings {
        points_per_pi: cfg.scan.points_per_pi,
        theta0: cfg.scan.theta0,
        k: cfg.scan.k,
        lanczos: lanczos(cfg),
    };
    match sw.mode {
        SweepMode::MuU => sweep_mu_u(
            &template,
            &Axis::new("mu/2J", sw.mu[0], sw.mu[1], sw.grid[0])?,
            &Axis::new("U/2J", su[0], su[1], sw.grid[1])?,
            ch.max_bosons(),
            &settings,
        ),
        SweepMode::Disorder => sweep_disorder(
            &template,
            &Axis::new("U/2J", su[0], su[1], sw.grid[0])?,
            &Axis::new("V/2J", sw.v[0], sw.v[1], sw.grid[1])?,
            ch.ratio,
            ch.offset,
            &settings,
        ),
    }
}

pub fn phasediagram(cfg: &RunConfig) -> Result<Outputs> {
    let grid = phase_grid(cfg)?;
    let default = match grid.mode {
        SweepMode::MuU => "grid_mu_u.csv",
        SweepMode::Disorder => "grid_disorder.csv",
    };
    let mut notes = vec!["V and mu axes in units of 2J".to_string()];
    if grid.corners_consistent == Some(false) {
        notes.push("calibration corners do not carry their expected labels".into());
    }
    Ok(Outputs {
        artifacts: vec![Artifact::new(named(cfg, default), grid.to_csv())],
        caveat: Some(FINITE_SIZE_CAVEAT.into()),
        notes,
    })
}

#[derive(Serialize)]
struct RateDump {
    omega0: f64,
    delta_a: f64,
    gamma: f64,
    k_sites: usize,
    sigma2: f64,
    rate_per_second: f64,
    off_resonant: bool,
}

pub fn rate(cfg: &RunConfig) -> Result<Outputs> {
    let r = &cfg.rate;
    let out = photon_rate(r.omega0, r.delta_a, r.gamma, r.k_sites, r.sigma2)?;
    let dump = RateDump {
        omega0: r.omega0,
        delta_a: r.delta_a,
        gamma: r.gamma,
        k_sites: r.k_sites,
        sigma2: r.sigma2,
        rate_per_second: r12(out.rate),
        off_resonant: out.off_resonant,
    };
    Ok(Outputs {
        artifacts: vec![Artifact::json(named(cfg, "rate.json"), &dump)?],
        notes: vec!["the absolute rate depends on the supplied experimental parameters".into()],
        ..Default::default()
    })
}
