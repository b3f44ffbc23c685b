use std::fs;
use std::path::{Path, PathBuf};

use gaborlike::io::{
    export_image, load_bank_config, load_filter_config, mosaic, read_pgm, read_tensor, to_gray,
    write_pgm, write_tensor, Layout, Normalization, Semantic, TensorData, TensorFile,
};
use gaborlike::{
    apply_filters, axis_scale, build_bank, build_weights, convolve, coverage_sum,
    identity_residual, idft_fast, idft_naive, normalize, response_energy, ring_centers,
    spectral_energy, theta_from_chord, BankSpec64, Center, ComplexFilter64, FreqWeights64,
    GaussianSpec64, GridShape, Mode, Signal64,
};
use ndarray::{Array2, ArrayD, Ix2, IxDyn};
use serde_json::{json, Value};

use crate::error::{input, CliError};
use crate::report::{save, Timings};
use crate::{ApplyArgs, BankArgs, CoverageArgs, FilterArgs, ModeArg};

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn center_json(c: &Center<f64>) -> Value {
    json!({ "mu": c.mu, "radius": c.radius, "theta": c.theta })
}

fn filter_file_name(index: usize, c: &Center<f64>) -> String {
    format!("{index:03}_r{}_theta{:.4}.lgfb", c.radius, c.theta)
}

pub fn filter(args: FilterArgs) -> Result<Value, CliError> {
    let base = match &args.config {
        Some(p) => Some(input(p, load_filter_config(p))?),
        None => None,
    };
    let pick = |flag: Option<usize>, cfg: Option<usize>, name: &str| {
        flag.or(cfg)
            .ok_or_else(|| CliError::invalid(format!("missing --{name}")))
    };
    let n = pick(args.n, base.as_ref().map(|c| c.n), "n")?;
    let d = pick(args.d, base.as_ref().map(|c| c.d), "d")?;
    let mu = args
        .mu
        .or_else(|| base.as_ref().map(|c| c.mu.clone()))
        .ok_or_else(|| CliError::invalid("missing --mu"))?;
    let sigma = args
        .sigma
        .or(base.as_ref().map(|c| c.sigma))
        .ok_or_else(|| CliError::invalid("missing --sigma"))?;
    let shape = GridShape::new(d, n)?;
    let spec = GaussianSpec64::new(mu, sigma)?;
    if spec.dims() != d {
        return Err(CliError::invalid(format!(
            "mu has {} components, expected {d}",
            spec.dims()
        )));
    }
    prepare_out(&args.out)?;

    let mut t = Timings::new();
    let weights = build_weights(&spec, shape)?;
    t.lap("weights");
    let raw = idft_fast(&weights);
    t.lap("transform");
    let (sum_re, sum_im) = raw.sums();
    let w0 = weights.at(&vec![0; d]);
    let summary = json!({
        "sum_re": sum_re,
        "sum_im": sum_im,
        "sum_re_im": raw.parts_inner(),
        "energy_re": raw.energy_re(),
        "energy_im": raw.energy_im(),
        "w0": w0,
        "grid_points": shape.len(),
    });
    let filter = if args.normalize { normalize(raw)? } else { raw };

    write_tensor(
        &TensorFile::from_weights(&weights),
        args.out.join("weights.lgfb"),
    )?;
    write_tensor(
        &TensorFile::from_filter(&filter),
        args.out.join("filter.lgfb"),
    )?;
    let mut images = Vec::new();
    if d == 2 {
        export_image(
            weights.values(),
            args.out.join("weights.pgm"),
            Normalization::MinMax,
        )?;
        export_image(
            filter.re(),
            args.out.join("re.pgm"),
            Normalization::Symmetric,
        )?;
        export_image(
            filter.im(),
            args.out.join("im.pgm"),
            Normalization::Symmetric,
        )?;
        images = vec!["weights.pgm", "re.pgm", "im.pgm"];
    }
    t.lap("write");

    let report = json!({
        "command": "filter",
        "parameters": { "n": n, "d": d, "mu": spec.mu(), "sigma": sigma, "normalize": args.normalize },
        "filter": summary,
        "outputs": { "tensors": ["weights.lgfb", "filter.lgfb"], "images": images },
        "timings_ms": t.into_value(),
    });
    save(&report, &args.out)?;
    Ok(report)
}

fn ring_mosaic(spec: &BankSpec64, bank: &gaborlike::FilterBank64) -> Result<Array2<u8>, CliError> {
    let n = spec.shape.size();
    let cols = spec.angles()?.len().max(1);
    let rows = spec.radii.len() + 1;
    let blank = Array2::from_elem((n, n), 255u8);
    let mut tiles = vec![blank; rows * cols];
    for bf in &bank.filters {
        let slot = match bf.center.ring {
            None => 0,
            Some((ring, angle)) => (ring + 1) * cols + angle,
        };
        let re = bf
            .filter
            .re()
            .view()
            .into_dimensionality::<Ix2>()
            .expect("two-dimensional bank");
        tiles[slot] = to_gray(re, Normalization::Symmetric);
    }
    Ok(mosaic(&tiles, cols, 2, 255))
}

pub fn bank(args: BankArgs) -> Result<Value, CliError> {
    let cfg = input(&args.config, load_bank_config(&args.config))?;
    let spec = cfg.to_spec()?;
    let layout = ring_centers(&spec)?;
    let step = spec.resolved_theta_step()?;
    prepare_out(&args.out)?;
    let filters_dir = args.out.join("filters");
    prepare_out(&filters_dir)?;

    let mut t = Timings::new();
    let bank = build_bank(&spec)?;
    t.lap("synthesis");
    let mut entries = Vec::with_capacity(bank.len());
    for (i, bf) in bank.filters.iter().enumerate() {
        let name = filter_file_name(i, &bf.center);
        write_tensor(
            &TensorFile::from_filter(&bf.filter),
            filters_dir.join(&name),
        )?;
        let mut e = center_json(&bf.center);
        e["index"] = json!(i);
        e["file"] = json!(format!("filters/{name}"));
        entries.push(e);
    }
    if spec.shape.dims() == 2 {
        write_pgm(&ring_mosaic(&spec, &bank)?, args.out.join("mosaic.pgm"))?;
    }
    fs::copy(&args.config, args.out.join("bank.json"))?;
    t.lap("write");

    let report = json!({
        "command": "bank",
        "parameters": serde_json::to_value(&cfg).expect("config serializes"),
        "theta_step": step,
        "angles_per_ring": spec.angles()?.len(),
        "prune_limit": spec.prune_limit(),
        "counts": { "filters": bank.len(), "pruned": layout.pruned.len() },
        "pruned": layout.pruned.iter().map(center_json).collect::<Vec<_>>(),
        "filters": entries,
        "timings_ms": t.into_value(),
    });
    save(&report, &args.out)?;
    Ok(report)
}

pub fn coverage(args: CoverageArgs) -> Result<Value, CliError> {
    let cfg = input(&args.config, load_bank_config(&args.config))?;
    let spec = cfg.to_spec()?;
    let full = args.full_circle || cfg.full_circle;
    let layout_spec = if full {
        spec.full_circle()?
    } else {
        spec.clone()
    };
    let layout = ring_centers(&layout_spec)?;
    prepare_out(&args.out)?;

    let mut t = Timings::new();
    let cov = coverage_sum(&spec, full)?;
    t.lap("coverage");
    let residual = identity_residual(&cov);
    t.lap("identity");
    write_tensor(
        &TensorFile::from_weights(&cov),
        args.out.join("coverage.lgfb"),
    )?;
    let mut images = Vec::new();
    if spec.shape.dims() == 2 {
        let identity = idft_fast(&cov);
        export_image(
            cov.values(),
            args.out.join("coverage.pgm"),
            Normalization::MinMax,
        )?;
        export_image(
            identity.re(),
            args.out.join("identity.pgm"),
            Normalization::Symmetric,
        )?;
        images = vec!["coverage.pgm", "identity.pgm"];
    }
    t.lap("write");

    let report = json!({
        "command": "coverage",
        "parameters": serde_json::to_value(&cfg).expect("config serializes"),
        "full_circle": full,
        "radii": layout_spec.radii,
        "angles_per_ring": layout_spec.angles()?.len(),
        "counts": { "centers": layout.kept.len(), "pruned": layout.pruned.len() },
        "identity_residual": residual,
        "outputs": { "tensors": ["coverage.lgfb"], "images": images },
        "timings_ms": t.into_value(),
    });
    save(&report, &args.out)?;
    Ok(report)
}

fn load_signal(path: &Path) -> Result<Signal64, CliError> {
    let is_pgm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        let img = input(path, read_pgm(path))?;
        Ok(Signal64::new(img.into_dyn())?)
    } else {
        let t = input(path, read_tensor(path))?;
        input(path, t.into_signal())
    }
}

fn bank_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let filters = dir.join("filters");
    let entries = fs::read_dir(&filters)
        .map_err(|e| CliError::invalid(format!("{}: {e}", filters.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "lgfb") {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::invalid(format!(
            "no filters in {}",
            filters.display()
        )));
    }
    Ok(files)
}

pub fn apply(args: ApplyArgs) -> Result<Value, CliError> {
    let signal = load_signal(&args.signal)?;
    let files = bank_files(&args.bank)?;
    let mut filters = Vec::with_capacity(files.len());
    for p in &files {
        let t = input(p, read_tensor(p))?;
        filters.push(input(p, t.into_filter())?);
    }
    let mode = match args.mode {
        ModeArg::Circular => Mode::Circular,
        ModeArg::Padded => Mode::Padded,
    };
    for (p, f) in files.iter().zip(&filters) {
        if f.shape().dims() != signal.extent().len() {
            return Err(CliError::invalid(format!(
                "{} is {}-dimensional but the signal has {} axes",
                p.display(),
                f.shape().dims(),
                signal.extent().len()
            )));
        }
        if matches!(mode, Mode::Circular) && signal.extent().iter().any(|&l| l < f.shape().size()) {
            return Err(CliError::invalid(format!(
                "circular mode needs the signal ({:?}) to be at least the filter size {}",
                signal.extent(),
                f.shape().size()
            )));
        }
    }
    prepare_out(&args.out)?;
    let responses_dir = args.out.join("responses");
    prepare_out(&responses_dir)?;

    let mut t = Timings::new();
    let refs: Vec<&ComplexFilter64> = filters.iter().collect();
    let set = apply_filters(&signal, &refs, mode)?;
    t.lap("apply");
    let mut table = Vec::with_capacity(files.len());
    let mut csv = String::from("index,filter,energy\n");
    for (i, (p, (r, e))) in files
        .iter()
        .zip(set.responses.iter().zip(&set.energies))
        .enumerate()
    {
        let name = p
            .file_name()
            .expect("file name")
            .to_string_lossy()
            .into_owned();
        write_tensor(&TensorFile::from_response(r), responses_dir.join(&name))?;
        csv.push_str(&format!("{i},{name},{e:e}\n"));
        table.push(json!({ "index": i, "filter": name, "energy": e }));
    }
    fs::write(args.out.join("energies.csv"), csv)?;
    t.lap("write");

    let report = json!({
        "command": "apply",
        "parameters": {
            "bank": args.bank.display().to_string(),
            "signal": args.signal.display().to_string(),
            "signal_extent": signal.extent(),
            "mode": format!("{:?}", args.mode).to_lowercase(),
        },
        "counts": { "filters": files.len() },
        "energies": table,
        "timings_ms": t.into_value(),
    });
    save(&report, &args.out)?;
    Ok(report)
}

struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
}

impl Check {
    fn ok(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

fn max_abs<'a>(it: impl Iterator<Item = &'a f64>) -> f64 {
    it.fold(0.0, |m, v| m.max(v.abs()))
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn run_checks() -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for n in [3usize, 9, 101, 1001] {
        let s: f64 = axis_scale(n)?;
        worst = worst.max(relative(
            s * ((n as f64 + 1.0) / 2.0).ln(),
            (n as f64 - 1.0) / 2.0,
        ));
    }
    out.push(Check {
        name: "axis_scale_identity",
        value: worst,
        tolerance: 1e-12,
    });

    let mut worst: f64 = 0.0;
    let mut hermitian: f64 = 0.0;
    for (d, n, mu) in [
        (1, 101, vec![20.0]),
        (2, 9, vec![2.0, -1.5]),
        (2, 25, vec![6.0, 3.0]),
        (3, 9, vec![1.0, 0.0, -2.0]),
    ] {
        let shape = GridShape::new(d, n)?;
        let w = build_weights(&GaussianSpec64::new(mu, 2.0 * shape.half() as f64)?, shape)?;
        let (fast, slow) = (idft_fast(&w), idft_naive(&w));
        let scale = max_abs(slow.re().iter().chain(slow.im().iter()));
        let diff =
            max_abs((fast.re() - slow.re()).iter()).max(max_abs((fast.im() - slow.im()).iter()));
        worst = worst.max(diff / scale);
        for k in shape.points() {
            let m: Vec<i64> = k.iter().map(|c| -c).collect();
            let (p, q) = (fast.at(&k), fast.at(&m));
            hermitian = hermitian.max((p.re - q.re).abs()).max((p.im + q.im).abs());
        }
    }
    out.push(Check {
        name: "fast_matches_naive",
        value: worst,
        tolerance: 1e-9,
    });
    out.push(Check {
        name: "hermitian_symmetry",
        value: hermitian,
        tolerance: 1e-10,
    });

    let shape = GridShape::new(2, 101)?;
    let w = build_weights(&GaussianSpec64::new(vec![20.0, 20.0], 100.0)?, shape)?;
    let f = idft_fast(&w);
    let (sre, sim) = f.sums();
    let l1: f64 = f.im().iter().map(|v| v.abs()).sum();
    out.push(Check {
        name: "sum_im_vanishes",
        value: sim.abs() / l1,
        tolerance: 1e-9,
    });
    out.push(Check {
        name: "re_im_orthogonal",
        value: f.parts_inner().abs() / (f.energy_re() * f.energy_im()).sqrt(),
        tolerance: 1e-9,
    });
    out.push(Check {
        name: "sum_re_matches_dc_weight",
        value: relative(sre, shape.len() as f64 * w.at(&[0, 0])),
        tolerance: 1e-9,
    });

    let t = theta_from_chord(42.0f64, 6.0)?;
    out.push(Check {
        name: "chord_closed_form",
        value: relative(t, 2.0 * (1.0f64 / 14.0).asin()),
        tolerance: 1e-15,
    });

    let spec = BankSpec64::reference();
    let bank = build_bank(&spec)?;
    out.push(Check {
        name: "reference_bank_size",
        value: (bank.len() as f64 - 85.0).abs(),
        tolerance: 0.0,
    });
    let mut energy: f64 = 0.0;
    for bf in &bank.filters {
        let want_im = if bf.center.is_lowpass() { 0.0 } else { 1.0 };
        energy = energy
            .max((bf.filter.energy_re() - 1.0).abs())
            .max((bf.filter.energy_im() - want_im).abs());
    }
    out.push(Check {
        name: "unit_energy",
        value: energy,
        tolerance: 1e-12,
    });

    let residual = identity_residual(&coverage_sum(&spec, true)?);
    out.push(Check {
        name: "identity_residual",
        value: residual,
        tolerance: 0.1,
    });

    let small = GridShape::new(2, 15)?;
    let g = normalize(idft_fast(&build_weights(
        &GaussianSpec64::new(vec![4.0, -3.0], 8.0)?,
        small,
    )?))?;
    let mut impulse: f64 = 0.0;
    for mode in [Mode::Circular, Mode::Padded] {
        let r = convolve(&Signal64::impulse(&[15, 15], &[7, 7])?, &g, mode)?;
        impulse = r
            .iter()
            .zip(&g.to_complex())
            .map(|(a, b)| (a - b).norm())
            .fold(impulse, f64::max);
    }
    out.push(Check {
        name: "impulse_reproduces_filter",
        value: impulse,
        tolerance: 1e-9,
    });
    let vals: Vec<f64> = (0..40 * 33)
        .map(|i| ((i * 7919 % 211) as f64 / 105.0) - 1.0)
        .collect();
    let s = Signal64::new(ArrayD::from_shape_vec(IxDyn(&[40, 33]), vals).expect("extent"))?;
    let spatial = response_energy(&convolve(&s, &g, Mode::Circular)?);
    out.push(Check {
        name: "parseval",
        value: relative(spatial, spectral_energy(&s, &g)?),
        tolerance: 1e-9,
    });

    let mut mismatched = 0.0;
    for file in [
        TensorFile::from_weights(&w),
        TensorFile::from_filter(&g),
        TensorFile::from_signal(&s),
        TensorFile::new(
            Semantic::Response,
            Layout::RowMajor,
            TensorData::Real(
                ArrayD::from_shape_vec(
                    IxDyn(&[2, 3]),
                    vec![-0.0, 1e-310, f64::MAX, -1.5, 0.1, 3.0],
                )
                .expect("extent"),
            ),
            None,
        )?,
    ] {
        let bytes = file.to_bytes();
        let back = TensorFile::from_bytes(&bytes)?;
        if back.to_bytes() != bytes {
            mismatched += 1.0;
        }
    }
    let coverage_round_trip = FreqWeights64::from_values(shape, w.values().clone())?;
    if TensorFile::from_bytes(&TensorFile::from_weights(&coverage_round_trip).to_bytes())?
        .into_weights()?
        .values()
        != w.values()
    {
        mismatched += 1.0;
    }
    out.push(Check {
        name: "tensor_round_trip",
        value: mismatched,
        tolerance: 0.0,
    });

    Ok(out)
}

pub fn check() -> Result<(Value, bool), CliError> {
    let mut t = Timings::new();
    let checks = run_checks()?;
    t.lap("checks");
    let ok = checks.iter().all(Check::ok);
    let list: Vec<Value> = checks
        .iter()
        .map(
            |c| json!({ "name": c.name, "value": c.value, "tolerance": c.tolerance, "ok": c.ok() }),
        )
        .collect();
    let report = json!({
        "command": "check",
        "ok": ok,
        "passed": checks.iter().filter(|c| c.ok()).count(),
        "total": checks.len(),
        "checks": list,
        "timings_ms": t.into_value(),
    });
    Ok((report, ok))
}
