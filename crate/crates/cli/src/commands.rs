use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use mact::exact::RgbU8;
use mact::fast::MactConfig;
use mact::harness::{
    call_probabilities, measure_error, measure_gain, synthetic_corpus, Backend, Destination, ErrorStats, Image,
    Population, Table,
};
use mact::lut::{build_cache, build_lut, Lut3D, Method, Variant};
use mact::poly::Form;
use mact::registry::{self, TargetFn};
use mact::remez::{remez as run_remez, RemezProblem};
use mact::Space;

use crate::error::{bad, CliError, CliResult};
use crate::ppm::{read_ppm, write_ppm};
use crate::{
    BackendArgs, BackendSpec, BenchArgs, ConvertArgs, ErrorsArgs, Format, LutBuildArgs, LutErrorsArgs, PopulationArg,
    PopulationArgs, ProbabilitiesArgs, RemezArgs,
};

const DEFAULT_SUBSAMPLE: usize = 1_000_000;

fn config_for(space: Space, degrees: Option<&[usize]>) -> CliResult<MactConfig> {
    let Some(d) = degrees else {
        return Ok(MactConfig::default());
    };
    let cfg = match (space, d) {
        (Space::Lab, &[n, m]) => MactConfig::new((n, m), 5, (5, 5, 5)),
        (Space::Hsi, &[n]) => MactConfig::new((4, 4), n, (5, 5, 5)),
        (Space::Sct, &[n, m, r]) => MactConfig::new((4, 4), 5, (n, m, r)),
        (Space::Lab, _) => return Err(bad("cielab takes --degrees n,m")),
        (Space::Hsi, _) => return Err(bad("hsi takes --degrees n")),
        (Space::Sct, _) => return Err(bad("sct takes --degrees n,m,r")),
    };
    Ok(cfg?)
}

fn load_lut(path: &Path) -> CliResult<Lut3D> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(Lut3D::read_from(BufReader::new(f))?)
}

fn lut_backend(lut: Lut3D, method: Method, variant: Variant) -> Backend {
    let lut = if variant == Variant::Caching { build_cache(lut) } else { lut };
    Backend::Lut { lut: Box::new(lut), method, variant }
}

fn make_backend(
    spec: BackendSpec,
    space: Space,
    degrees: Option<&[usize]>,
    lut_file: Option<&Path>,
    variant: Variant,
) -> CliResult<Backend> {
    if lut_file.is_some() && !matches!(spec, BackendSpec::Lut { .. }) {
        return Err(bad("--lut needs a lut:<method>:<grid> backend"));
    }
    if degrees.is_some() && spec != BackendSpec::Mact {
        return Err(bad("--degrees applies to the mact backend only"));
    }
    let backend = match spec {
        BackendSpec::Exact => Backend::Exact,
        BackendSpec::Mact => Backend::Mact(Box::new(config_for(space, degrees)?)),
        BackendSpec::Lut { method, grid } => {
            let lut = match lut_file {
                Some(path) => {
                    let lut = load_lut(path)?;
                    if lut.grid_n() != grid {
                        return Err(bad(format!(
                            "{} holds a {}-point grid, backend asks for {grid}",
                            path.display(),
                            lut.grid_n()
                        )));
                    }
                    lut
                }
                None => build_lut(space, grid)?,
            };
            lut_backend(lut, method, variant)
        }
    };
    backend.validate(space)?;
    Ok(backend)
}

fn backend_from(args: &BackendArgs) -> CliResult<(Space, Backend)> {
    let space = args.space.into();
    let backend = make_backend(
        args.backend,
        space,
        args.degrees.as_ref().map(|d| d.0.as_slice()),
        args.lut.as_deref(),
        args.variant.into(),
    )?;
    Ok((space, backend))
}

fn backend_label(spec: BackendSpec) -> String {
    match spec {
        BackendSpec::Exact => "exact".into(),
        BackendSpec::Mact => "mact".into(),
        BackendSpec::Lut { method, grid } => format!("lut:{}:{grid}", method.name()),
    }
}

fn population_from(args: &PopulationArgs) -> CliResult<Population> {
    match (args.population, args.subsample) {
        (Some(PopulationArg::Cube), Some(_)) => Err(bad("--subsample conflicts with --population cube")),
        (_, Some(0)) => Err(bad("--subsample needs a positive count")),
        (_, Some(n)) => Ok(Population::subsample(n, args.seed)),
        (Some(PopulationArg::Subsample), None) => Ok(Population::subsample(DEFAULT_SUBSAMPLE, args.seed)),
        (Some(PopulationArg::Cube) | None, None) => Ok(Population::Cube),
    }
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_bytes(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let label = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    let mut w = open_output(path)?;
    w.write_all(bytes).and_then(|_| w.flush()).map_err(|e| CliError::io(label, e))
}

fn emit_table(table: &Table, format: Format, path: Option<&Path>) -> CliResult<()> {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Markdown => table.to_markdown(),
        f => return Err(bad(format!("{f:?} output is not available for tables; use csv or markdown"))),
    };
    emit_bytes(path, text.as_bytes())
}

fn component_names(space: Space) -> [&'static str; 3] {
    match space {
        Space::Lab => ["l", "a", "b"],
        Space::Hsi => ["h", "s", "i"],
        Space::Sct => ["l", "angle_a", "angle_b"],
    }
}

/// Destination triple with undefined angles as `None`.
fn components(d: &Destination) -> [Option<f64>; 3] {
    match d {
        Destination::Lab(p) => [Some(p.l), Some(p.a), Some(p.b)],
        Destination::Hsi(p) => [p.h, Some(p.s), Some(p.i)],
        Destination::Sct(p) => [Some(p.l), Some(p.angle_a), p.angle_b],
    }
}

pub fn convert(a: ConvertArgs) -> CliResult<()> {
    let (space, backend) = backend_from(&a.backend)?;
    let file = File::open(&a.input).map_err(|e| CliError::io(&a.input, e))?;
    let image = read_ppm(BufReader::new(file), &a.input.display().to_string())
        .map_err(|source| CliError::Ppm { path: a.input.clone(), source })?;
    let values: Vec<[Option<f64>; 3]> = image.pixels.iter().map(|&p| components(&backend.apply(space, p))).collect();
    let format = if a.visualize { Format::Ppm } else { a.format };
    let bytes = match format {
        Format::Csv => {
            let [c0, c1, c2] = component_names(space);
            let mut out = format!("x,y,{c0},{c1},{c2}\n");
            let cell = |v: Option<f64>| v.map(|v| format!("{v:.17e}")).unwrap_or_default();
            for (k, v) in values.iter().enumerate() {
                let (x, y) = (k % image.width, k / image.width);
                out.push_str(&format!("{x},{y},{},{},{}\n", cell(v[0]), cell(v[1]), cell(v[2])));
            }
            out.into_bytes()
        }
        Format::BinaryF64 => {
            let mut out = Vec::with_capacity(values.len() * 24);
            for v in &values {
                for c in v {
                    out.extend_from_slice(&c.unwrap_or(f64::NAN).to_le_bytes());
                }
            }
            out
        }
        Format::Ppm => {
            let mut out = Vec::new();
            write_ppm(&mut out, image.width, image.height, &visualize(&values)).expect("writing to memory");
            out
        }
        Format::Markdown => return Err(bad("convert writes csv, binary-f64 or ppm")),
    };
    emit_bytes(a.output.as_deref(), &bytes)
}

/// Linear per-channel rescale of the defined values onto 0..255.
fn visualize(values: &[[Option<f64>; 3]]) -> Vec<RgbU8> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for v in values {
        for c in 0..3 {
            if let Some(x) = v[c] {
                lo[c] = lo[c].min(x);
                hi[c] = hi[c].max(x);
            }
        }
    }
    let byte = |c: usize, x: Option<f64>| match x {
        Some(x) if hi[c] > lo[c] => ((x - lo[c]) / (hi[c] - lo[c]) * 255.0).round() as u8,
        _ => 0,
    };
    values.iter().map(|v| RgbU8::new(byte(0, v[0]), byte(1, v[1]), byte(2, v[2]))).collect()
}

fn stats_row(space: Space, label: &str, population: &Population, st: &ErrorStats) -> Vec<String> {
    let pop = match population {
        Population::Cube => "cube".to_string(),
        Population::Pixels(_) => "subsample".to_string(),
    };
    vec![
        space.name().to_string(),
        label.to_string(),
        pop,
        st.count.to_string(),
        st.certifying.to_string(),
        format!("{:.9}", st.avg),
        format!("{:.9}", st.max),
        format!("{} {} {}", st.argmax.r, st.argmax.g, st.argmax.b),
    ]
}

const STATS_HEADERS: [&str; 8] = ["space", "backend", "population", "pixels", "certifying", "avg", "max", "argmax_rgb"];

pub fn errors(a: ErrorsArgs) -> CliResult<()> {
    let (space, backend) = backend_from(&a.backend)?;
    let population = population_from(&a.population)?;
    let st = measure_error(space, &backend, &Backend::Exact, &population)?;
    let mut label = backend_label(a.backend.backend);
    if a.backend.backend == BackendSpec::Mact {
        let cfg = config_for(space, a.backend.degrees.as_ref().map(|d| d.0.as_slice()))?;
        label = match space {
            Space::Lab => format!("mact:{}:{}", cfg.cielab_degrees().0, cfg.cielab_degrees().1),
            Space::Hsi => format!("mact:{}", cfg.hsi_degree()),
            Space::Sct => {
                let (n, m, r) = cfg.sct_degrees();
                format!("mact:{n}:{m}:{r}")
            }
        };
    }
    if !st.certifying {
        eprintln!("mact: subsampled population; results are not certifying");
    }
    let mut t = Table::new(STATS_HEADERS);
    t.push(stats_row(space, &label, &population, &st));
    emit_table(&t, a.format, a.output.as_deref())
}

pub fn probabilities(a: ProbabilitiesArgs) -> CliResult<()> {
    let population = population_from(&a.population)?;
    let p = call_probabilities(&population)?;
    let mut t = Table::new(["event", "probability"]);
    for (name, v) in p.named() {
        t.push([name.to_string(), format!("{v:.9}")]);
    }
    if !population.is_certifying() {
        eprintln!("mact: subsampled population; results are not certifying");
    }
    emit_table(&t, a.format, a.output.as_deref())
}

fn default_interval(target: TargetFn, m: usize) -> (f64, f64) {
    match target {
        TargetFn::Cbrt if m > 0 => registry::CBRT_RATIONAL_INTERVAL,
        TargetFn::Cbrt => registry::CBRT_POLY_INTERVAL,
        TargetFn::AtanSqrt3 => registry::ATAN_SQRT3_INTERVAL,
        TargetFn::AsinHalf => registry::ASIN_HALF_INTERVAL,
        TargetFn::AcosHalf => registry::ACOS_HALF_INTERVAL,
        TargetFn::AtanF => registry::ATAN_F_INTERVAL,
        TargetFn::AtanG => registry::ATAN_G_INTERVAL,
    }
}

fn join_coeffs(c: &[f64]) -> String {
    c.iter().map(|v| format!("{v:.12e}")).collect::<Vec<_>>().join(" ")
}

pub fn remez(a: RemezArgs) -> CliResult<()> {
    let target = TargetFn::from_name(&a.target).ok_or_else(|| {
        let names: Vec<&str> = TargetFn::ALL.iter().map(|t| t.name()).collect();
        bad(format!("unknown function {:?}; use one of {}", a.target, names.join(", ")))
    })?;
    let interval = match a.interval.as_deref() {
        Some(&[lo, hi]) => (lo, hi),
        Some(_) => return Err(bad("--interval takes two values")),
        None => default_interval(target, a.m),
    };
    let problem = RemezProblem::new(move |x: f64| target.exact(x), interval, a.n, a.m)
        .with_max_iterations(a.max_iterations)
        .with_tolerance(a.tolerance);
    let r = run_remez(&problem)?;
    let (num, den) = match &r.form {
        Form::Polynomial(p) => (join_coeffs(p.coeffs()), String::from("1")),
        Form::Rational(q) => (join_coeffs(q.numerator.coeffs()), join_coeffs(q.denominator.coeffs())),
    };
    let mut t = Table::new(["fn", "n", "m", "lo", "hi", "eps", "iterations", "converged", "numerator", "denominator"]);
    t.push([
        target.name().to_string(),
        a.n.to_string(),
        a.m.to_string(),
        format!("{}", interval.0),
        format!("{}", interval.1),
        format!("{:.6e}", r.eps),
        r.iterations.to_string(),
        r.converged.to_string(),
        num,
        den,
    ]);
    emit_table(&t, a.format, a.output.as_deref())
}

pub fn lut_build(a: LutBuildArgs) -> CliResult<()> {
    let lut = build_lut(a.space.into(), a.grid)?;
    let f = File::create(&a.output).map_err(|e| CliError::io(&a.output, e))?;
    let mut w = BufWriter::new(f);
    lut.write_to(&mut w)?;
    w.flush().map_err(|e| CliError::io(&a.output, e))
}

pub fn lut_errors(a: LutErrorsArgs) -> CliResult<()> {
    let methods = a
        .methods
        .iter()
        .map(|m| Method::from_name(m).ok_or_else(|| bad(format!("unknown method {m:?}"))))
        .collect::<CliResult<Vec<_>>>()?;
    let population = population_from(&a.population)?;
    let variant: Variant = a.variant.into();
    let tables = match &a.lut {
        Some(path) => vec![load_lut(path)?],
        None => {
            for &g in &a.grids {
                if !mact::lut::SUPPORTED_GRIDS.contains(&g) {
                    return Err(bad(format!("grid size {g} is not one of 9, 17, 33")));
                }
            }
            a.grids.iter().map(|&g| build_lut(a.space.into(), g)).collect::<mact::Result<Vec<_>>>()?
        }
    };
    let mut t = Table::new(["space", "method", "grid", "variant", "population", "certifying", "avg", "max"]);
    for lut in tables {
        let space = lut.space();
        let grid = lut.grid_n();
        let lut = if variant == Variant::Caching { build_cache(lut) } else { lut };
        let mut shared = Some(lut);
        for (k, &method) in methods.iter().enumerate() {
            let table = if k + 1 == methods.len() {
                shared.take().expect("table is moved once")
            } else {
                shared.clone().expect("table is present until the last method")
            };
            let backend = Backend::Lut { lut: Box::new(table), method, variant };
            let st = measure_error(space, &backend, &Backend::Exact, &population)?;
            t.push([
                space.name().to_string(),
                method.name().to_string(),
                grid.to_string(),
                format!("{variant:?}").to_lowercase(),
                if matches!(population, Population::Cube) { "cube" } else { "subsample" }.to_string(),
                st.certifying.to_string(),
                format!("{:.9}", st.avg),
                format!("{:.9}", st.max),
            ]);
        }
    }
    emit_table(&t, a.format, a.output.as_deref())
}

pub fn bench(a: BenchArgs) -> CliResult<()> {
    if a.repeats < 3 {
        return Err(bad("--repeats must be at least 3"));
    }
    let corpus: Vec<Image> = if a.images.is_empty() {
        if a.sizes.contains(&0) {
            return Err(bad("image sizes must be positive"));
        }
        synthetic_corpus(&a.sizes, a.seed)
    } else {
        a.images
            .iter()
            .map(|p| {
                let f = File::open(p).map_err(|e| CliError::io(p, e))?;
                read_ppm(BufReader::new(f), &p.display().to_string())
                    .map_err(|source| CliError::Ppm { path: p.clone(), source })
            })
            .collect::<CliResult<_>>()?
    };
    let mut t = Table::new(["space", "backend", "images", "min", "max", "mean", "stdev", "median"]);
    for &s in &a.spaces {
        let space: Space = s.into();
        let backend =
            make_backend(a.backend, space, a.degrees.as_ref().map(|d| d.0.as_slice()), None, a.variant.into())?;
        let g = measure_gain(space, &backend, &Backend::Exact, &corpus, a.repeats, a.repeats)?;
        t.push([
            space.name().to_string(),
            backend_label(a.backend),
            corpus.len().to_string(),
            format!("{:.6}", g.min),
            format!("{:.6}", g.max),
            format!("{:.6}", g.mean),
            format!("{:.6}", g.stdev),
            format!("{:.6}", g.median),
        ]);
    }
    emit_table(&t, a.format, a.output.as_deref())
}
