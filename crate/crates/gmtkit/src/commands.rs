use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use gmtkit_core::area::{
    area_formula_with_multiplicity, curve_length, jacobian_integral_box, surface_measure_box, MultiplicityOptions,
    YGrid, CURVE_ORDER, CURVE_PANELS, Y_GRID_1D, Y_GRID_2D,
};
use gmtkit_core::hausdorff::{dimension_estimate, dyadic_scales, premeasure_delta};
use gmtkit_core::measures::{AtomSubset, AtomicMeasure};
use gmtkit_core::pointwise::density;
use gmtkit_core::smoothing::{
    distributional_derivative, mollify, weak_derivative_verdict, weak_pairing, MollifierKernel, TestFunctionBattery,
};
use gmtkit_core::sobolev_bv::{
    bmo_by_generation, bv_norm, decompose_1d, gns_check, morrey_check, regime, sobolev_norm, tonelli_variation,
    variation_1d, variation_nd, Regime, VariationMethod,
};
use gmtkit_core::{GridFunction, ParametricMap};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::formats::{self, BatteryFile, MapParams, MeasureFile};
use crate::report::{Report, Series, Table};
use crate::{Command, Kernel, ScaleRange};

pub fn execute(cmd: &Command, seed: u64) -> CliResult<Report> {
    match cmd {
        Command::Measure { input, reference, subset } => measure(input, reference.as_deref(), subset.as_deref()),
        Command::Dim { ifs, input, scales, depth, s } => dim(ifs.as_deref(), input.as_deref(), *scales, *depth, *s),
        Command::Density { input, point, scales, radii } => density_cmd(input, point, *scales, radii.as_deref()),
        Command::Mollify { input, eps, kernel } => mollify_cmd(input, *eps, *kernel),
        Command::Weakdiff { input, axis, battery, candidate } => {
            weakdiff(input, *axis, battery.as_deref(), candidate.as_deref(), seed)
        }
        Command::Sobolev { input, p, depth, pairs } => sobolev(input, *p, *depth, *pairs, seed),
        Command::Bv { input, method, threshold } => bv(input, method, *threshold, seed),
        Command::Area { map, range, params, cells, y_grid, lip, depth } => area(&AreaJob {
            map,
            range: range.as_deref(),
            params: params.as_deref(),
            cells: *cells,
            y_grid: *y_grid,
            lip: *lip,
            depth: *depth,
        }),
    }
}

fn numbers(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{what}: bad number `{}`", t.trim()))))
        .collect()
}

fn scales_of(r: ScaleRange) -> Vec<f64> {
    dyadic_scales(r.lo, r.hi)
}

fn subset_of(mu: &AtomicMeasure, ids: &str) -> CliResult<AtomSubset> {
    let mut members = vec![false; mu.len()];
    for id in ids.split(',').map(str::trim) {
        let i = mu
            .atoms()
            .iter()
            .position(|a| a == id)
            .ok_or_else(|| CliError::Usage(format!("unknown atom `{id}`")))?;
        members[i] = true;
    }
    Ok(AtomSubset::new(members))
}

fn ids(mu: &AtomicMeasure, e: &AtomSubset) -> Vec<String> {
    e.indices().map(|i| mu.atoms()[i].clone()).collect()
}

fn measure(input: &Path, reference: Option<&Path>, subset: Option<&str>) -> CliResult<Report> {
    let mu = formats::read_measure(input)?;
    let all = mu.everything();
    let mut r = Report::new("measure");
    r.set("atoms", mu.atoms().to_vec());
    r.set("m", mu.m());
    r.set("weights", (0..mu.len()).map(|i| mu.weight(i).to_vec()).collect::<Vec<_>>());
    r.set("measure", mu.measure_of(&all)?);
    r.set("total_variation", mu.total_variation(&all)?);
    let var = mu.variation_measure();
    r.set("variation", var.weights().to_vec());

    let mut columns: Vec<String> = vec!["atom".into()];
    columns.extend((1..=mu.m()).map(|j| format!("w{j}")));
    columns.push("variation".into());
    let mut rows: Vec<Vec<Value>> = (0..mu.len())
        .map(|i| {
            let mut row = vec![Value::from(mu.atoms()[i].clone())];
            row.extend(mu.weight(i).iter().map(|w| Value::from(*w)));
            row.push(var.weights()[i].into());
            row
        })
        .collect();

    if mu.m() == 1 {
        let (pos, neg) = mu.jordan_decomposition()?;
        let (p_set, n_set) = mu.hahn_decomposition()?;
        r.set("jordan", json!({ "positive": pos.weights(), "negative": neg.weights() }));
        r.set("hahn", json!({ "positive": ids(&mu, &p_set), "negative": ids(&mu, &n_set) }));
        columns.extend(["positive", "negative", "hahn"].map(String::from));
        for (i, row) in rows.iter_mut().enumerate() {
            row.push(pos.weights()[i].into());
            row.push(neg.weights()[i].into());
            row.push(if p_set.contains(i) { "P" } else { "N" }.into());
        }
    }
    if let Some(list) = subset {
        let e = subset_of(&mu, list)?;
        r.set(
            "subset",
            json!({
                "atoms": ids(&mu, &e),
                "measure": mu.measure_of(&e)?,
                "total_variation": mu.total_variation(&e)?,
            }),
        );
    }
    if let Some(path) = reference {
        let nu = formats::read_measure(path)?;
        let (f, singular) = mu.radon_nikodym(&nu)?;
        let all = singular.everything();
        r.set(
            "radon_nikodym",
            json!({
                "density": f,
                "singular": MeasureFile::from_measure(&singular),
                "singular_total_variation": singular.total_variation(&all)?,
            }),
        );
    }
    r.table = Some(Table { columns, rows });
    Ok(r)
}

fn dim(
    ifs: Option<&Path>,
    input: Option<&Path>,
    scales: ScaleRange,
    depth: Option<usize>,
    s: Option<f64>,
) -> CliResult<Report> {
    let deltas = scales_of(scales);
    let mut r = Report::new("dim");
    let cloud = match (ifs, input) {
        (Some(path), _) => {
            let mut sys = formats::read_ifs(path)?;
            if let Some(d) = depth {
                sys.depth = d;
            }
            if sys.depth == 0 {
                sys.depth = sys.default_depth(*deltas.last().expect("scale range is nonempty"));
            }
            r.set("depth", sys.depth);
            sys.generate()?
        }
        (None, Some(path)) => formats::read_cloud(path)?,
        (None, None) => return Err(CliError::Usage("dim needs --ifs or --input".into())),
    };
    let est = dimension_estimate(&cloud, &deltas)?;
    r.set("points", cloud.len());
    r.set("slope", est.slope);
    r.set("intercept", est.intercept);
    r.set("r2", est.r2);
    r.set("degenerate", est.degenerate);
    r.set("scales", est.scales.clone());
    r.set("counts", est.counts.clone());

    let mut columns = vec!["delta".to_string(), "log_inv_delta".into(), "count".into()];
    let pre = match s {
        Some(s) => {
            let values = deltas.iter().map(|d| premeasure_delta(&cloud, s, *d)).collect::<Result<Vec<_>, _>>()?;
            r.set("s", s);
            r.set("premeasure", values.clone());
            columns.push("premeasure".into());
            Some(values)
        }
        None => None,
    };
    let xs: Vec<f64> = est.scales.iter().map(|d| -d.ln()).collect();
    let ys: Vec<f64> = est.counts.iter().map(|c| c.ln()).collect();
    let rows = (0..deltas.len())
        .map(|i| {
            let mut row = vec![est.scales[i].into(), xs[i].into(), est.counts[i].into()];
            if let Some(p) = &pre {
                row.push(p[i].into());
            }
            row
        })
        .collect();
    r.table = Some(Table { columns, rows });
    r.series = Some(Series::LogLog {
        x: xs,
        y: ys,
        fit: (!est.degenerate).then_some((est.slope, est.intercept)),
        x_label: "log(1/δ)".into(),
        y_label: "log N(δ)".into(),
    });
    Ok(r)
}

fn density_cmd(input: &Path, point: &str, scales: Option<ScaleRange>, radii: Option<&str>) -> CliResult<Report> {
    let set = formats::read_raster(input)?;
    let x = numbers(point, "--point")?;
    let radii = match (scales, radii) {
        (_, Some(list)) => numbers(list, "--radii")?,
        (Some(s), None) => scales_of(s),
        (None, None) => return Err(CliError::Usage("density needs --scales or --radii".into())),
    };
    let rep = density(&set, &x, &radii)?;
    let mut r = Report::new("density");
    r.set("point", x);
    r.set("radii", rep.radii.clone());
    r.set("ratios", rep.ratios.clone());
    r.set("limit", rep.limit);
    r.set("classification", rep.classification.as_str());
    r.table = Some(Table {
        columns: vec!["radius".into(), "ratio".into()],
        rows: rep.radii.iter().zip(&rep.ratios).map(|(a, b)| vec![(*a).into(), (*b).into()]).collect(),
    });
    Ok(r)
}

fn lattice_json(f: &GridFunction) -> Value {
    let lat = f.lattice();
    json!({ "dims": lat.dims(), "origin": lat.origin(), "h": lat.spacing() })
}

fn mollify_cmd(input: &Path, eps: f64, kernel: Kernel) -> CliResult<Report> {
    let f = formats::read_grid(input)?;
    let n = f.lattice().ndim();
    let k = match kernel {
        Kernel::Standard => MollifierKernel::standard(n, eps)?,
        Kernel::Ball => MollifierKernel::ball_indicator(n, eps)?,
    };
    let g = mollify(&f, &k)?;
    let mut r = Report::new("mollify");
    r.set("kernel", match kernel {
        Kernel::Standard => "standard",
        Kernel::Ball => "ball",
    });
    r.set("eps", eps);
    r.set("c_n", k.c_n);
    r.set("input", lattice_json(&f));
    r.set("output", lattice_json(&g));
    r.set("sup_norm", json!({ "input": f.sup_norm(), "output": g.sup_norm() }));
    r.set("integral", json!({ "input": f.integral(), "output": g.integral() }));
    r.files.push(("mollified.csv".into(), formats::write_grid(&g)));
    Ok(r)
}

fn weakdiff(
    input: &Path,
    axis: usize,
    battery: Option<&Path>,
    candidate: Option<&Path>,
    seed: u64,
) -> CliResult<Report> {
    let f = formats::read_grid(input)?;
    let battery = match battery {
        Some(path) => formats::read_battery(path)?,
        None => TestFunctionBattery::for_lattice(f.lattice(), seed)?,
    };
    let verdict = weak_derivative_verdict(&f, axis, &battery)?;
    let pairings = distributional_derivative(&f, axis, &battery)?;
    let mut r = Report::new("weakdiff");
    r.set("axis", axis);
    r.set("battery", serde_json::to_value(BatteryFile::from_battery(&battery)).expect("battery serializes"));
    r.set("distributional", pairings.clone());
    r.set(
        "verdict",
        json!({
            "exists": verdict.exists,
            "residual": verdict.residual,
            "floor": verdict.floor,
            "jump_cells": verdict.jump_cells,
        }),
    );
    let mut columns = vec!["bump".to_string(), "radius".into(), "distributional".into()];
    let given = match candidate {
        Some(path) => {
            let g = formats::read_grid(path)?;
            let pairing = weak_pairing(&f, &g, axis, &battery)?;
            r.set(
                "candidate",
                json!({
                    "residual": pairing.max_residual(),
                    "pairings": pairing.with_candidate,
                    "residuals": pairing.residuals(),
                }),
            );
            columns.extend(["candidate".to_string(), "residual".into()]);
            Some(pairing)
        }
        None => None,
    };
    let rows = battery
        .bumps
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut row = vec![i.into(), b.radius.into(), pairings[i].into()];
            if let Some(p) = &given {
                row.push(p.with_candidate[i].into());
                row.push(p.residuals()[i].into());
            }
            row
        })
        .collect();
    r.table = Some(Table { columns, rows });
    r.files.push(("weak_derivative.csv".into(), formats::write_grid(&verdict.candidate)));
    Ok(r)
}

fn sobolev(input: &Path, p: f64, generations: usize, pairs: usize, seed: u64) -> CliResult<Report> {
    let f = formats::read_grid(input)?;
    let n = f.lattice().ndim();
    let norms = sobolev_norm(&f, p)?;
    let reg = regime(n, p)?;
    let mut r = Report::new("sobolev");
    r.set("p", p);
    r.set("n", n);
    r.set("lp_norm", norms.lp_norm);
    r.set("grad_lp_norm", norms.grad_lp_norm);
    r.set("partial_norms", norms.partial_norms.clone());
    r.set("sobolev_norm", norms.sobolev_norm);
    r.set("p_star", norms.p_star);
    match reg {
        Regime::Gns => {
            r.set("regime", "gns");
            // the inequality is only stated for functions vanishing on the boundary
            let check = match gns_check(&f, p) {
                Ok(c) => json!({ "lhs": c.lhs, "rhs": c.rhs, "constant": c.constant, "holds": c.holds(0.0) }),
                Err(e @ gmtkit_core::Error::InvalidInput(_)) => json!({ "skipped": e.to_string() }),
                Err(e) => return Err(e.into()),
            };
            r.set("gns", check);
        }
        Regime::Bmo => {
            r.set("regime", "bmo");
            let by_gen = bmo_by_generation(&f, generations)?;
            let sup = by_gen.iter().copied().fold(0.0f64, f64::max);
            r.set("bmo", json!({ "generations": by_gen, "seminorm": sup }));
        }
        Regime::Morrey => {
            r.set("regime", "morrey");
            let c = morrey_check(&f, p, pairs, seed)?;
            r.set(
                "morrey",
                json!({
                    "worst_ratio": c.worst_ratio,
                    "constant": c.constant,
                    "pairs": c.pairs,
                    "holds": c.worst_ratio <= 1.0,
                }),
            );
        }
    }
    Ok(r)
}

fn bv(input: &Path, method: &str, threshold: f64, seed: u64) -> CliResult<Report> {
    let f = formats::read_grid(input)?;
    let mut r = Report::new("bv");
    r.set("l1_norm", f.lp_norm(1.0));
    if f.lattice().ndim() == 1 {
        let dec = decompose_1d(&f, threshold)?;
        r.set("variation", variation_1d(f.values())?);
        r.set("bv_norm", bv_norm(&f)?);
        r.set(
            "decomposition",
            json!({
                "threshold": threshold,
                "constant": dec.constant,
                "ac_variation": variation_1d(&dec.ac_part)?,
                "jump_variation": variation_1d(&dec.jump_part)?,
                "cantor_variation": variation_1d(&dec.cantor_part)?,
                "jumps": dec.jump_locations.iter().map(|(x, h)| json!([x, h])).collect::<Vec<_>>(),
            }),
        );
        r.table = Some(Table {
            columns: ["x", "f", "ac", "jump", "cantor"].map(String::from).to_vec(),
            rows: (0..dec.x.len())
                .map(|i| {
                    vec![
                        dec.x[i].into(),
                        f.values()[i].into(),
                        dec.ac_part[i].into(),
                        dec.jump_part[i].into(),
                        dec.cantor_part[i].into(),
                    ]
                })
                .collect(),
        });
        return Ok(r);
    }
    let method = VariationMethod::parse(method)?;
    let rep = variation_nd(&f, method, seed)?;
    r.set("method", rep.method.as_str());
    r.set("variation", rep.tv);
    r.set("lower_bound", rep.lower_bound);
    if f.lattice().ndim() == 2 {
        let (vx, vy) = tonelli_variation(&f)?;
        r.set("tonelli", json!([vx, vy]));
    }
    if let Some(levels) = &rep.per_level {
        r.set("per_level", levels.iter().map(|(t, p)| json!([t, p])).collect::<Vec<_>>());
        r.files.push(("levels.csv".into(), formats::write_pairs("t,perimeter", levels)));
        r.table = Some(Table {
            columns: vec!["t".into(), "perimeter".into()],
            rows: levels.iter().map(|(t, p)| vec![(*t).into(), (*p).into()]).collect(),
        });
        r.series = Some(Series::Levels {
            points: levels.clone(),
            x_label: "t".into(),
            y_label: "P({f > t})".into(),
        });
    }
    Ok(r)
}

pub struct AreaJob<'a> {
    pub map: &'a str,
    pub range: Option<&'a str>,
    pub params: Option<&'a str>,
    pub cells: Option<usize>,
    pub y_grid: Option<usize>,
    pub lip: Option<f64>,
    pub depth: Option<u32>,
}

fn map_params(src: Option<&str>) -> CliResult<MapParams> {
    let Some(src) = src else { return Ok(MapParams::default()) };
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        fs::read_to_string(src).map_err(|source| CliError::Io { path: src.into(), source })?
    };
    serde_json::from_str(&text).map_err(|e| CliError::parse(src, e.to_string()))
}

/// `(lo, hi)` from `a,b` or `a1,b1,a2,b2`.
fn parse_range(s: &str) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let v = numbers(s, "--range")?;
    if v.is_empty() || v.len() % 2 != 0 {
        return Err(CliError::Usage("--range needs pairs `a,b`".into()));
    }
    Ok((v.iter().step_by(2).copied().collect(), v.iter().skip(1).step_by(2).copied().collect()))
}

fn build_map(job: &AreaJob) -> CliResult<ParametricMap> {
    let params = map_params(job.params)?;
    let range = job.range.map(parse_range).transpose()?;
    let interval = |default: (f64, f64)| -> CliResult<(f64, f64)> {
        match &range {
            None => Ok(default),
            Some((lo, hi)) if lo.len() == 1 => Ok((lo[0], hi[0])),
            Some(_) => Err(CliError::Usage(format!("map `{}` takes one interval", job.map))),
        }
    };
    let phi = match job.map {
        "helix" => {
            let (a, b) = interval((0.0, 2.0 * PI))?;
            ParametricMap::helix(a, b)?
        }
        "circle" => {
            let (a, b) = interval((0.0, 2.0 * PI))?;
            ParametricMap::circle(a, b)?
        }
        "square" => {
            let (a, b) = interval((-1.0, 1.0))?;
            ParametricMap::square(a, b)?
        }
        "sine" => {
            let (a, b) = interval((0.0, PI))?;
            ParametricMap::sine(params.omega.unwrap_or(1.0), a, b)?
        }
        "fold" => ParametricMap::fold(params.laps.unwrap_or(2), params.height.unwrap_or(1.0))?,
        "polar" => ParametricMap::polar(params.r_max.unwrap_or(1.0))?,
        "sphere" => ParametricMap::sphere()?,
        "identity" => {
            let (lo, hi) = range.clone().ok_or_else(|| CliError::Usage("identity needs --range".into()))?;
            return Ok(ParametricMap::identity(lo, hi)?);
        }
        other => return Err(CliError::Usage(format!("unknown map `{other}`"))),
    };
    match (&range, job.map) {
        (Some((lo, hi)), "fold" | "polar" | "sphere") => Ok(phi.with_domain(lo.clone(), hi.clone())?),
        _ => Ok(phi),
    }
}

fn area(job: &AreaJob) -> CliResult<Report> {
    let phi = build_map(job)?;
    let (k, n) = (phi.k(), phi.n());
    let cells = vec![job.cells.unwrap_or(if k == 1 { 256 } else { 64 }); k];
    let mut r = Report::new("area");
    r.set("map", phi.name());
    r.set("k", k);
    r.set("n", n);
    r.set("lo", phi.lo().to_vec());
    r.set("hi", phi.hi().to_vec());
    r.set("injective", phi.is_injective());
    let jac = jacobian_integral_box(&phi, &cells)?;
    r.set("jacobian_integral", jac);
    if phi.is_injective() {
        if k == 1 {
            r.set("length", curve_length(&phi, CURVE_PANELS, CURVE_ORDER)?);
        } else if n > k {
            r.set("surface_measure", surface_measure_box(&phi, &cells)?);
        }
    }
    let mut multiplicity_integral = None;
    if k == n && n <= 2 {
        let mut opts = MultiplicityOptions::default();
        if let Some(d) = job.depth {
            opts.max_depth = d;
        }
        let (samples, per_axis) = if n == 1 { (1024, Y_GRID_1D) } else { (64, Y_GRID_2D) };
        let grid = YGrid::around_image(&phi, samples, job.y_grid.unwrap_or(per_axis))?;
        let cmp = area_formula_with_multiplicity(&phi, &cells, &grid, &opts)?;
        r.set(
            "area_formula",
            json!({
                "multiplicity_integral": cmp.lhs,
                "jacobian_integral": cmp.rhs,
                "rel_diff": cmp.rel_diff(),
                "y_grid": { "lo": grid.lo, "hi": grid.hi, "per_axis": grid.per_axis },
                "max_depth": opts.max_depth,
            }),
        );
        multiplicity_integral = Some(cmp.lhs);
    }
    if let Some(lip) = job.lip {
        if !(lip > 0.0) {
            return Err(CliError::Usage("--lip must be positive".into()));
        }
        let volume: f64 = phi.lo().iter().zip(phi.hi()).map(|(a, b)| b - a).product();
        let bound = lip.powi(k as i32) * volume;
        let lhs = multiplicity_integral.unwrap_or(jac);
        r.set("a_priori", json!({ "lip": lip, "bound": bound, "value": lhs, "holds": lhs <= bound }));
    }
    Ok(r)
}
