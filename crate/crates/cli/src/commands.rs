use anyhow::{bail, Result};
use lpfz_core::approx::{empirical_gap, n_for_epsilon};
use lpfz_core::factorization::{build_product, compare_product, divide_products, match_zero_sets};
use lpfz_core::positivity::{b_table, monotonicity_scan, series_error_band, series_reconstruct, RingSettings};
use lpfz_core::transform::convolve_kernels;
use lpfz_core::zeros::{
    certify_real_zeros, choose_window, default_step, estimate_order, real_axis, CertifyOptions, ZeroReport,
};
use lpfz_core::{
    ComplexPoint, ComplexValue, Error, Evaluator, ExtendedKernel, KernelSpec, QuadratureSettings, Transform, VERSION,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{
    CoeffsArgs, Command, ConvergeArgs, ConvolveArgs, Family, KernelArgs, MonotoneArgs, OrderArgs, ProductArgs,
    RunConfig, WindowArgs,
};
use crate::output::{num, Artifacts, Report, Status};
use crate::spec_file::load_kernel;

/// Points in the `|G(w)|` series written next to every zero report.
const SERIES_POINTS: usize = 401;

struct Run<'a> {
    settings: QuadratureSettings,
    out: &'a Artifacts,
    kernels: Vec<KernelSpec>,
    findings: Vec<String>,
}

impl Run<'_> {
    fn finding(&mut self, text: String) {
        self.findings.push(text);
    }

    fn transform(&mut self, args: &KernelArgs) -> Result<Transform> {
        let mut kernels = Vec::with_capacity(args.kernels.len());
        for path in &args.kernels {
            let k = load_kernel(path)?;
            self.kernels.push(k.spec().clone());
            kernels.push(k);
        }
        if kernels.len() == 2 {
            return Ok(Transform::Extended { kernel: ExtendedKernel::new(kernels)? });
        }
        let kernel = kernels.pop().expect("one kernel");
        Ok(match (args.family.unwrap_or(Family::Basis), args.n) {
            (Family::Approx, Some(n)) => Transform::Approx { kernel, n },
            (Family::Hn, Some(n)) => Transform::Hn { kernel, n },
            _ => Transform::Basis { kernel },
        })
    }

    fn certify(&self, t: &Transform, w: &WindowArgs, r: Option<f64>) -> Result<ZeroReport> {
        let step = w.step.unwrap_or_else(|| default_step(t));
        let r = match r.or(w.r) {
            Some(r) => r,
            None => choose_window(&t.evaluator(self.settings), w.count, step, w.r_max)?,
        };
        let options = CertifyOptions {
            step: Some(step),
            refine_tol: w.refine_tol,
            samples_per_side: w.samples,
            ..CertifyOptions::default()
        };
        Ok(certify_real_zeros(t, r, w.y, &self.settings, &options)?)
    }

    fn zero_artifacts(&mut self, t: &Transform, report: &ZeroReport) -> Result<()> {
        let rows: Vec<Vec<String>> = report
            .real_zeros
            .iter()
            .zip(&report.zero_tols)
            .enumerate()
            .map(|(i, (z, tol))| vec![(i + 1).to_string(), num(*z), num(*tol)])
            .collect();
        self.out.table("zeros.csv", &["index", "zero", "tol"], &rows)?;

        let ev = t.evaluator(self.settings);
        let r = report.rectangle.half_width;
        let points = (0..SERIES_POINTS)
            .into_par_iter()
            .map(|i| {
                let w = r * i as f64 / (SERIES_POINTS - 1) as f64;
                Ok((w, ev.eval(ComplexPoint::real(w))?.abs()))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        self.out.series("series_abs_g.csv", ["w", "abs_g"], &points)?;

        if !report.certified {
            self.finding(format!(
                "not certified: winding count {} but {} real zeros in [0, {}]",
                report.winding_count,
                report.real_zeros.len(),
                r
            ));
        }
        Ok(())
    }
}

pub fn run(config: &RunConfig) -> Result<Status> {
    let out = Artifacts::create(&config.command.common().output_dir)?;
    let mut run = Run { settings: config.settings, out: &out, kernels: Vec::new(), findings: Vec::new() };
    let result = match &config.command {
        Command::Zeros(a) => zeros(&mut run, a, false)?,
        Command::Verify(a) => zeros(&mut run, a, true)?,
        Command::Converge(a) => converge(&mut run, a)?,
        Command::Product(a) => product(&mut run, a)?,
        Command::Monotone(a) => monotone(&mut run, a)?,
        Command::Coeffs(a) => coeffs(&mut run, a)?,
        Command::Convolve(a) => convolve(&mut run, a)?,
        Command::Order(a) => order(&mut run, a)?,
    };
    let status = if run.findings.is_empty() { Status::Consistent } else { Status::Falsified };
    let report = Report {
        tool: "lpfz",
        version: VERSION,
        config,
        kernels: &run.kernels,
        status,
        findings: &run.findings,
        result,
    };
    out.json("report.json", &report)?;
    Ok(status)
}

fn zeros(run: &mut Run, a: &WindowArgs, verify: bool) -> Result<Value> {
    let t = run.transform(&a.kernel)?;
    let report = run.certify(&t, a, None)?;
    run.zero_artifacts(&t, &report)?;
    if !verify {
        return Ok(json!({ "zero_report": report }));
    }

    let ev = t.evaluator(run.settings);
    let f = real_axis(&ev);
    let mut checks = Vec::new();
    for (z, tol) in report.real_zeros.iter().zip(&report.zero_tols) {
        let plus = ev.eval(ComplexPoint::real(*z))?;
        let minus = ev.eval(ComplexPoint::real(-*z))?;
        let even = (plus.re - minus.re).abs() <= 2.0 * plus.error_estimate.max(minus.error_estimate);
        let (lo, lo_err) = f(z - tol)?;
        let (hi, hi_err) = f(z + tol)?;
        let sign_change = lo * hi < 0.0 && lo.abs() > lo_err && hi.abs() > hi_err;
        if !even {
            run.finding(format!("F({z}) and F(-{z}) differ beyond the error estimate"));
        }
        if !sign_change {
            run.finding(format!("no certified sign change across {z} ± {tol:e}"));
        }
        checks.push(json!({ "zero": z, "tol": tol, "even": even, "sign_change": sign_change }));
    }

    let step = report.scan_step;
    let finer = WindowArgs { step: Some(0.5 * step), samples: 2 * a.samples, ..a.clone() };
    let again = run.certify(&t, &finer, Some(report.rectangle.half_width))?;
    let moved = match_zero_sets(&report.real_zeros, &again.real_zeros);
    let stable = again.certified
        && again.winding_count == report.winding_count
        && report
            .real_zeros
            .iter()
            .zip(&again.real_zeros)
            .zip(&report.zero_tols)
            .all(|((x, y), tol)| (x - y).abs() <= 10.0 * tol)
        && moved.is_some();
    if !stable {
        run.finding(format!(
            "refined pass disagrees: {} zeros and winding {} at half the step, {} and {} before",
            again.real_zeros.len(),
            again.winding_count,
            report.real_zeros.len(),
            report.winding_count
        ));
    }
    Ok(json!({
        "zero_report": report,
        "checks": checks,
        "refined_pass": {
            "scan_step": again.scan_step,
            "samples_per_side": again.samples_per_side,
            "winding_count": again.winding_count,
            "certified": again.certified,
            "max_zero_shift": moved,
        },
    }))
}

fn converge(run: &mut Run, a: &ConvergeArgs) -> Result<Value> {
    let kernel = load_kernel(&a.kernel)?;
    run.kernels.push(kernel.spec().clone());
    let bound = n_for_epsilon(&kernel, a.m, a.epsilon, &run.settings)?;
    let mut ns: Vec<u64> = [8, 4, 2, 1].iter().map(|d| bound.n_min.div_ceil(*d).max(1)).collect();
    ns.dedup();
    let gaps = ns
        .iter()
        .map(|&n| Ok((n, empirical_gap(&kernel, n, a.m, a.grid, &run.settings)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let points: Vec<(f64, f64)> = gaps.iter().map(|(n, g)| (*n as f64, g.gap)).collect();
    run.out.series("series_gap.csv", ["n", "gap"], &points)?;
    let at_min = gaps.last().expect("n_min").1;
    if at_min.gap >= a.epsilon {
        run.finding(format!("gap {:e} at n = {} is not below epsilon = {:e}", at_min.gap, bound.n_min, a.epsilon));
    }
    Ok(json!({ "bound": bound, "gap_at_n_min": at_min }))
}

fn product(run: &mut Run, a: &ProductArgs) -> Result<Value> {
    let t = run.transform(&a.window.kernel)?;
    let report = run.certify(&t, &a.window, None)?;
    run.zero_artifacts(&t, &report)?;
    if !report.certified {
        return Ok(json!({ "zero_report": report }));
    }
    let ev = t.evaluator(run.settings);
    let rep = build_product(&ev, &report)?;
    let r = report.rectangle.half_width;
    let test_radius = a.test_radius.unwrap_or(r / 3.0);
    let mut radii: Vec<f64> = (1..=4).map(|i| r * i as f64 / 12.0).collect();
    if !radii.contains(&test_radius) {
        radii.push(test_radius);
        radii.sort_by(f64::total_cmp);
    }
    let table = radii
        .iter()
        .map(|&radius| Ok((radius, compare_product(&ev, &rep, radius, a.grid)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    run.out.series("product.csv", ["radius", "deviation"], &table)?;
    let deviation = table.iter().find(|(radius, _)| *radius == test_radius).expect("test radius").1;

    let mut quotient = Value::Null;
    if let Transform::Hn { kernel, n } = &t {
        let f4 = Transform::F2k { k: 2 };
        let g = Transform::Approx { kernel: kernel.clone(), n: *n };
        let f4_report = run.certify(&f4, &a.window, Some(r))?;
        let g_report = run.certify(&g, &a.window, Some(r))?;
        if !(f4_report.certified && g_report.certified) {
            bail!("F_4 or G_n could not be certified on the window of H_n");
        }
        let f4_rep = build_product(&f4.evaluator(run.settings), &f4_report)?;
        let g_rep = build_product(&g.evaluator(run.settings), &g_report)?;
        quotient = match divide_products(&rep, &f4_rep, a.match_tol) {
            Ok(q) => {
                let distance = match_zero_sets(&q.rep.zeros, &g_rep.zeros);
                if !distance.is_some_and(|d| d <= 10.0 * a.match_tol) {
                    run.finding(format!("H_n / F_4 zeros do not match those of G_n (distance {distance:?})"));
                }
                json!({ "quotient": q, "approximant": g_rep, "zero_distance": distance })
            }
            Err(e @ Error::UnmatchedDivisorZero { .. }) => {
                run.finding(e.to_string());
                json!({ "error": e.to_string() })
            }
            Err(e) => return Err(e.into()),
        };
    }
    Ok(json!({
        "zero_report": report,
        "product": rep,
        "test_radius": test_radius,
        "deviation": deviation,
        "division": quotient,
    }))
}

fn monotone(run: &mut Run, a: &MonotoneArgs) -> Result<Value> {
    let sigmas: Vec<f64> = (0..=a.sigma_steps).map(|i| a.sigma_max * i as f64 / a.sigma_steps as f64).collect();
    let report = if a.control {
        let control = |z: ComplexPoint| {
            let z = z.to_complex();
            Ok(ComplexValue::exact(z * z + 1.0))
        };
        monotonicity_scan(&control, &a.w, &sigmas)?
    } else {
        let args = KernelArgs { kernels: a.kernels.clone(), family: a.family, n: a.n };
        let t = run.transform(&args)?;
        let report = monotonicity_scan(&t.evaluator(run.settings), &a.w, &sigmas)?;
        report
    };

    let rows: Vec<Vec<String>> = report
        .samples
        .iter()
        .map(|s| vec![num(s.w), num(s.sigma), num(s.modulus_sq), num(s.error_band)])
        .collect();
    run.out.table("monotone.csv", &["w", "sigma", "modulus_sq", "error_band"], &rows)?;
    for (i, w) in a.w.iter().enumerate() {
        let points: Vec<(f64, f64)> =
            report.samples.iter().filter(|s| s.w == *w).map(|s| (s.sigma, s.modulus_sq)).collect();
        run.out.series(&format!("series_modulus_sq_{i}.csv"), ["sigma", "modulus_sq"], &points)?;
    }
    for v in &report.violations {
        run.finding(format!(
            "|F(w - i sigma)|^2 drops by {:e} at w = {} between sigma = {} and {}",
            v.drop, v.w, v.sigma_from, v.sigma_to
        ));
    }
    Ok(json!({ "control": a.control, "sigmas": sigmas, "violations": report.violations }))
}

fn coeffs(run: &mut Run, a: &CoeffsArgs) -> Result<Value> {
    let t = run.transform(&a.kernel)?;
    let ev = t.evaluator(run.settings);
    let ring = RingSettings { radius: a.ring_radius, samples: a.ring_samples };
    let mut rows = Vec::new();
    let mut tables = Vec::new();
    for &w in &a.w {
        let mut table = b_table(&ev, w, a.max_m, ring)?;
        table.index = a.kernel.n;
        for e in &table.entries {
            rows.push(vec![num(w), e.m.to_string(), num(e.value), num(e.error_band), e.conclusive.to_string()]);
        }
        for e in table.negative_entries() {
            run.finding(format!("coefficient m = {} at w = {w} is negative: {:e} ± {:e}", e.m, e.value, e.error_band));
        }
        let mut series = Vec::new();
        for &sigma in &a.sigma {
            let direct = ev.eval(ComplexPoint::new(w, sigma))?.abs().powi(2);
            let summed = match series_reconstruct(&table, sigma) {
                Ok(v) => Some(v),
                Err(Error::TailNotConverged { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            series.push(json!({
                "sigma": sigma,
                "series": summed,
                "series_error_band": series_error_band(&table, sigma),
                "direct": direct,
            }));
        }
        tables.push(json!({ "table": table, "has_conclusive_positive": table.has_conclusive_positive(), "series": series }));
    }
    run.out.table("coeffs.csv", &["w", "m", "value", "error_band", "conclusive"], &rows)?;
    Ok(json!({ "ring": ring, "tables": tables }))
}

fn convolve(run: &mut Run, a: &ConvolveArgs) -> Result<Value> {
    let t = run.transform(&a.window.kernel)?;
    let Transform::Extended { kernel: ext } = &t else { bail!("convolve needs two kernels") };
    let samples = (0..a.points)
        .into_par_iter()
        .map(|i| {
            let x = a.t_max * i as f64 / (a.points - 1) as f64;
            Ok((x, convolve_kernels(ext, x, &run.settings)?))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    run.out.series("series_convolution.csv", ["t", "c"], &samples)?;
    let scale = samples[0].1;
    for p in samples.windows(2) {
        if !(p[1].1 > 0.0 || p[1].1 == 0.0 && p[0].1 == 0.0) || p[1].1 > p[0].1 + 1e-12 * scale {
            run.finding(format!("convolution is not positive and decreasing at t = {}", p[1].0));
            break;
        }
    }

    let report = run.certify(&t, &a.window, None)?;
    run.zero_artifacts(&t, &report)?;
    let r = report.rectangle.half_width;
    let mut components = Vec::new();
    let mut union = Vec::new();
    for k in ext.components() {
        let c = run.certify(&Transform::Basis { kernel: k.clone() }, &a.window, Some(r))?;
        if !c.certified {
            run.finding(format!("component zeros not certified on [0, {r}]"));
        }
        union.extend_from_slice(&c.real_zeros);
        components.push(c);
    }
    union.sort_by(f64::total_cmp);
    let distance = match_zero_sets(&report.real_zeros, &union);
    if !distance.is_some_and(|d| d <= a.match_tol) {
        run.finding(format!("product zeros differ from the union of component zeros (distance {distance:?})"));
    }
    Ok(json!({
        "convolution_at_zero": scale,
        "zero_report": report,
        "components": components,
        "union_distance": distance,
    }))
}

fn order(run: &mut Run, a: &OrderArgs) -> Result<Value> {
    let t = run.transform(&a.kernel)?;
    let rho = estimate_order(&t.evaluator(run.settings), &a.radii)?;
    if !(rho < 2.0) {
        run.finding(format!("estimated order {rho} is not below 2"));
    }
    Ok(json!({ "radii": a.radii, "order": rho }))
}
