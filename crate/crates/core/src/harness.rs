//! Error sweeps over the RGB cube, call-probability counts, and speedup
//! measurements on a synthetic corpus.

use std::hint::black_box;
use std::thread;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::exact::{
    hsi_distance, inverse_gamma, lab_distance, rgb_to_hsi_exact, rgb_to_lab_exact, rgb_to_sct_exact, rgb_to_xyz,
    sct_distance_indirect, HsiPixel, LabPixel, RgbU8, SctPixel, LAB_KNEE, WHITE_D65,
};
use crate::fast::{rgb_to_hsi_fast, rgb_to_lab_fast, rgb_to_sct_fast, MactConfig};
use crate::lut::{to_hsi, to_lab, to_sct, Lut3D, Method, Variant};
use crate::space::Space;

/// Number of colors in the 24-bit cube.
pub const CUBE_SIZE: usize = 1 << 24;

/// Pixels per reduction chunk. Fixed so results do not depend on the thread
/// count.
pub const CHUNK: usize = 1 << 16;

/// Every 24-bit color once, blue fastest.
pub fn rgb16million() -> impl ExactSizeIterator<Item = RgbU8> + DoubleEndedIterator {
    (0..CUBE_SIZE as u32).map(RgbU8::from_index)
}

/// A pixel population addressable by position.
#[derive(Debug, Clone, PartialEq)]
pub enum Population {
    Cube,
    Pixels(Vec<RgbU8>),
}

impl Population {
    pub fn len(&self) -> usize {
        match self {
            Population::Cube => CUBE_SIZE,
            Population::Pixels(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> RgbU8 {
        match self {
            Population::Cube => RgbU8::from_index(i as u32),
            Population::Pixels(p) => p[i],
        }
    }

    /// `count` distinct cube colors drawn with a fixed seed, in cube order.
    pub fn subsample(count: usize, seed: u64) -> Population {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut idx = sample(&mut rng, CUBE_SIZE, count.min(CUBE_SIZE)).into_vec();
        idx.sort_unstable();
        Population::Pixels(idx.into_iter().map(|i| RgbU8::from_index(i as u32)).collect())
    }

    /// Only the complete cube certifies a table value.
    pub fn is_certifying(&self) -> bool {
        matches!(self, Population::Cube)
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub avg: f64,
    pub max: f64,
    pub count: usize,
    pub argmax: RgbU8,
    /// False when measured on anything but the full cube.
    pub certifying: bool,
}

#[derive(Clone, Copy)]
struct Partial {
    sum: CompensatedSum,
    max: f64,
    argmax: usize,
}

/// Worker threads for sweeps: `MACT_THREADS` if set, else the available
/// parallelism.
pub fn thread_count() -> usize {
    std::env::var("MACT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn sweep_chunk<F: Fn(RgbU8) -> f64>(population: &Population, lo: usize, hi: usize, score: &F) -> Partial {
    let mut p = Partial { sum: CompensatedSum::default(), max: f64::NEG_INFINITY, argmax: lo };
    for i in lo..hi {
        let d = score(population.get(i));
        p.sum.add(d);
        if d > p.max {
            p.max = d;
            p.argmax = i;
        }
    }
    p
}

/// Average and maximum of `score` over `population`.
pub fn measure_with<F>(population: &Population, score: F) -> Result<ErrorStats>
where
    F: Fn(RgbU8) -> f64 + Sync,
{
    let n = population.len();
    if n == 0 {
        return Err(Error::InvalidProblem("empty population".into()));
    }
    let chunks = n.div_ceil(CHUNK);
    let workers = thread_count().min(chunks).max(1);
    let mut partials: Vec<Option<Partial>> = vec![None; chunks];
    if workers == 1 {
        for (c, slot) in partials.iter_mut().enumerate() {
            *slot = Some(sweep_chunk(population, c * CHUNK, ((c + 1) * CHUNK).min(n), &score));
        }
    } else {
        let per = chunks.div_ceil(workers);
        thread::scope(|s| {
            for (w, group) in partials.chunks_mut(per).enumerate() {
                let score = &score;
                s.spawn(move || {
                    for (k, slot) in group.iter_mut().enumerate() {
                        let c = w * per + k;
                        *slot = Some(sweep_chunk(population, c * CHUNK, ((c + 1) * CHUNK).min(n), score));
                    }
                });
            }
        });
    }
    let mut total = CompensatedSum::default();
    let mut max = f64::NEG_INFINITY;
    let mut argmax = 0;
    for p in partials.into_iter().flatten() {
        total.add(p.sum.sum);
        total.add(p.sum.comp);
        if p.max > max {
            max = p.max;
            argmax = p.argmax;
        }
    }
    Ok(ErrorStats {
        avg: total.value() / n as f64,
        max,
        count: n,
        argmax: population.get(argmax),
        certifying: population.is_certifying(),
    })
}

/// A transform producing destination pixels.
#[derive(Debug, Clone)]
pub enum Backend {
    Exact,
    Mact(Box<MactConfig>),
    Lut { lut: Box<Lut3D>, method: Method, variant: Variant },
}

/// A destination pixel of any supported space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Destination {
    Lab(LabPixel),
    Hsi(HsiPixel),
    Sct(SctPixel),
}

impl Destination {
    pub fn space(&self) -> Space {
        match self {
            Destination::Lab(_) => Space::Lab,
            Destination::Hsi(_) => Space::Hsi,
            Destination::Sct(_) => Space::Sct,
        }
    }

    pub fn to_array(&self) -> [f64; 3] {
        match self {
            Destination::Lab(p) => p.to_array(),
            Destination::Hsi(p) => p.to_array(),
            Destination::Sct(p) => p.to_array(),
        }
    }

    /// Distance in the space's own metric; `None` across spaces.
    pub fn distance(&self, other: &Destination) -> Option<f64> {
        match (self, other) {
            (Destination::Lab(a), Destination::Lab(b)) => Some(lab_distance(a, b)),
            (Destination::Hsi(a), Destination::Hsi(b)) => Some(hsi_distance(a, b)),
            (Destination::Sct(a), Destination::Sct(b)) => Some(sct_distance_indirect(a, b)),
            _ => None,
        }
    }
}

impl Backend {
    pub fn validate(&self, space: Space) -> Result<()> {
        match self {
            Backend::Lut { lut, variant, .. } => {
                if lut.space() != space {
                    return Err(Error::InvalidProblem(format!(
                        "lookup table holds {} values, not {space}",
                        lut.space()
                    )));
                }
                if *variant == Variant::Caching && !lut.has_cache() {
                    return Err(Error::CacheMissing);
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Transforms one pixel. Call [`Backend::validate`] first; an unchecked
    /// table in the wrong space panics.
    #[inline]
    pub fn apply(&self, space: Space, p: RgbU8) -> Destination {
        match (self, space) {
            (Backend::Exact, Space::Lab) => Destination::Lab(rgb_to_lab_exact(p)),
            (Backend::Exact, Space::Hsi) => Destination::Hsi(rgb_to_hsi_exact(p)),
            (Backend::Exact, Space::Sct) => Destination::Sct(rgb_to_sct_exact(p)),
            (Backend::Mact(c), Space::Lab) => Destination::Lab(rgb_to_lab_fast(p, c)),
            (Backend::Mact(c), Space::Hsi) => Destination::Hsi(rgb_to_hsi_fast(p, c)),
            (Backend::Mact(c), Space::Sct) => Destination::Sct(rgb_to_sct_fast(p, c)),
            (Backend::Lut { lut, method, variant }, _) => {
                assert_eq!(lut.space(), space, "lookup table space mismatch");
                let v = lut.interpolate(p, *method, *variant).expect("validated lookup table");
                match space {
                    Space::Lab => Destination::Lab(to_lab(v)),
                    Space::Hsi => Destination::Hsi(to_hsi(v)),
                    Space::Sct => Destination::Sct(to_sct(v)),
                }
            }
        }
    }
}

/// Error of `candidate` against `reference` in the metric of `space`.
pub fn measure_error(
    space: Space,
    candidate: &Backend,
    reference: &Backend,
    population: &Population,
) -> Result<ErrorStats> {
    candidate.validate(space)?;
    reference.validate(space)?;
    measure_with(population, |p| {
        let a = candidate.apply(space, p);
        let b = reference.apply(space, p);
        a.distance(&b).expect("same space")
    })
}

/// Relative call frequencies of the approximated functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CallProbabilities {
    /// `X/X0 > 0.008856`.
    pub cbrt_x: f64,
    pub cbrt_y: f64,
    pub cbrt_z: f64,
    /// `B/L >= 0.5`, the arcsin branch of the SCT arccos.
    pub arcsin: f64,
    pub arccos: f64,
    /// Red or green nonzero.
    pub arctan: f64,
}

impl CallProbabilities {
    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("P(X/X0 > 0.008856)", self.cbrt_x),
            ("P(Y/Y0 > 0.008856)", self.cbrt_y),
            ("P(Z/Z0 > 0.008856)", self.cbrt_z),
            ("P(arcsin)", self.arcsin),
            ("P(arccos)", self.arccos),
            ("P(arctan)", self.arctan),
        ]
    }
}

pub fn call_probabilities(population: &Population) -> Result<CallProbabilities> {
    let n = population.len();
    if n == 0 {
        return Err(Error::InvalidProblem("empty population".into()));
    }
    let gamma: Vec<f64> = (0..256).map(|c| inverse_gamma(c as f64 / 255.0)).collect();
    let mut counts = [0usize; 5];
    for i in 0..n {
        let p = population.get(i);
        let xyz = rgb_to_xyz(gamma[p.r as usize], gamma[p.g as usize], gamma[p.b as usize]);
        for k in 0..3 {
            counts[k] += (xyz[k] / WHITE_D65[k] > LAB_KNEE) as usize;
        }
        let [r, g, b] = p.to_f64();
        let l = (r * r + g * g + b * b).sqrt();
        counts[3] += (l > 0.0 && b / l >= 0.5) as usize;
        counts[4] += (p.r != 0 || p.g != 0) as usize;
    }
    let f = |c: usize| c as f64 / n as f64;
    Ok(CallProbabilities {
        cbrt_x: f(counts[0]),
        cbrt_y: f(counts[1]),
        cbrt_z: f(counts[2]),
        arcsin: f(counts[3]),
        arccos: 1.0 - f(counts[3]),
        arctan: f(counts[4]),
    })
}

/// An 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<RgbU8>,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    Gradient,
    Noise,
    PinkNoise,
    Flat,
}

impl Pattern {
    pub const ALL: [Pattern; 4] = [Pattern::Gradient, Pattern::Noise, Pattern::PinkNoise, Pattern::Flat];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::Gradient => "gradient",
            Pattern::Noise => "noise",
            Pattern::PinkNoise => "pink",
            Pattern::Flat => "flat",
        }
    }
}

/// Sizes of the default synthetic corpus.
pub const CORPUS_SIZES: [usize; 3] = [512, 1024, 2048];

/// A square synthetic image.
pub fn synthetic_image(pattern: Pattern, size: usize, seed: u64) -> Image {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = size * size;
    let pixels = match pattern {
        Pattern::Gradient => {
            let span = (size.max(2) - 1) as f64;
            (0..n)
                .map(|k| {
                    let (x, y) = ((k % size) as f64 / span, (k / size) as f64 / span);
                    let to8 = |v: f64| (v * 255.0).round() as u8;
                    RgbU8::new(to8(x), to8(y), to8(1.0 - 0.5 * (x + y)))
                })
                .collect()
        }
        Pattern::Noise => (0..n).map(|_| RgbU8::new(rng.gen(), rng.gen(), rng.gen())).collect(),
        Pattern::PinkNoise => pink_noise(size, &mut rng),
        Pattern::Flat => {
            let c = RgbU8::new(rng.gen(), rng.gen(), rng.gen());
            vec![c; n]
        }
    };
    Image { width: size, height: size, pixels, label: format!("{}-{size}", pattern.name()) }
}

/// Sum of bilinearly upsampled random octaves with amplitude proportional to
/// the octave's wavelength, giving an approximately `1/f` spectrum.
fn pink_noise(size: usize, rng: &mut StdRng) -> Vec<RgbU8> {
    let mut acc = vec![[0.0f64; 3]; size * size];
    let mut cells = 2usize;
    let mut amp = 1.0;
    let mut total = 0.0;
    while cells <= size {
        let g = cells + 1;
        let grid: Vec<[f64; 3]> = (0..g * g).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
        let scale = cells as f64 / size as f64;
        for y in 0..size {
            let fy = y as f64 * scale;
            let (y0, ty) = ((fy as usize).min(cells - 1), fy - (fy as usize).min(cells - 1) as f64);
            for x in 0..size {
                let fx = x as f64 * scale;
                let (x0, tx) = ((fx as usize).min(cells - 1), fx - (fx as usize).min(cells - 1) as f64);
                let at = |i: usize, j: usize| grid[j * g + i];
                let (a, b, c, d) = (at(x0, y0), at(x0 + 1, y0), at(x0, y0 + 1), at(x0 + 1, y0 + 1));
                let px = &mut acc[y * size + x];
                for k in 0..3 {
                    let top = a[k] + (b[k] - a[k]) * tx;
                    let bot = c[k] + (d[k] - c[k]) * tx;
                    px[k] += amp * (top + (bot - top) * ty);
                }
            }
        }
        total += amp;
        amp *= 0.5;
        cells *= 2;
    }
    acc.into_iter()
        .map(|v| {
            let to8 = |c: f64| (c / total * 255.0).round().clamp(0.0, 255.0) as u8;
            RgbU8::new(to8(v[0]), to8(v[1]), to8(v[2]))
        })
        .collect()
}

/// One image per pattern and size.
pub fn synthetic_corpus(sizes: &[usize], seed: u64) -> Vec<Image> {
    let mut out = Vec::new();
    for (s, &size) in sizes.iter().enumerate() {
        for (p, pattern) in Pattern::ALL.into_iter().enumerate() {
            out.push(synthetic_image(pattern, size, seed ^ ((s as u64) << 8 | p as u64)));
        }
    }
    out
}

/// Summary of per-image speedup ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stdev: f64,
    pub median: f64,
}

impl GainStats {
    pub fn from_samples(samples: &[f64]) -> Result<GainStats> {
        if samples.is_empty() {
            return Err(Error::CorpusEmpty);
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let var = sorted.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / n as f64;
        let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
        Ok(GainStats { min: sorted[0], max: sorted[n - 1], mean, stdev: var.sqrt(), median })
    }
}

/// Mean wall time in seconds of `repeats` passes of `backend` over `image`,
/// after one untimed warm-up pass.
pub fn time_backend(space: Space, backend: &Backend, image: &Image, repeats: usize) -> Result<f64> {
    backend.validate(space)?;
    match (backend, space) {
        (Backend::Exact, Space::Lab) => Ok(time_pixels(image, repeats, |p| rgb_to_lab_exact(p).to_array())),
        (Backend::Exact, Space::Hsi) => Ok(time_pixels(image, repeats, |p| rgb_to_hsi_exact(p).to_array())),
        (Backend::Exact, Space::Sct) => Ok(time_pixels(image, repeats, |p| rgb_to_sct_exact(p).to_array())),
        (Backend::Mact(c), Space::Lab) => Ok(time_pixels(image, repeats, |p| rgb_to_lab_fast(p, c).to_array())),
        (Backend::Mact(c), Space::Hsi) => Ok(time_pixels(image, repeats, |p| rgb_to_hsi_fast(p, c).to_array())),
        (Backend::Mact(c), Space::Sct) => Ok(time_pixels(image, repeats, |p| rgb_to_sct_fast(p, c).to_array())),
        (Backend::Lut { .. }, _) => Ok(time_pixels(image, repeats, |p| backend.apply(space, p).to_array())),
    }
}

/// Times conversion of `image` into a buffer of destination triples.
fn time_pixels<F: Fn(RgbU8) -> [f64; 3]>(image: &Image, repeats: usize, f: F) -> f64 {
    let mut out = vec![[0.0; 3]; image.pixels.len()];
    let pass = |out: &mut [[f64; 3]]| {
        for (o, &p) in out.iter_mut().zip(&image.pixels) {
            *o = f(black_box(p));
        }
        black_box(&*out);
    };
    pass(&mut out);
    let start = Instant::now();
    for _ in 0..repeats.max(1) {
        pass(&mut out);
    }
    start.elapsed().as_secs_f64() / repeats.max(1) as f64
}

/// Per-image ratio of exact to fast mean run time.
pub fn measure_gain(
    space: Space,
    fast: &Backend,
    exact: &Backend,
    corpus: &[Image],
    repeats_exact: usize,
    repeats_fast: usize,
) -> Result<GainStats> {
    if corpus.is_empty() {
        return Err(Error::CorpusEmpty);
    }
    if repeats_exact < 3 || repeats_fast < 3 {
        return Err(Error::InvalidProblem("timing needs at least 3 repeats".into()));
    }
    let mut gains = Vec::with_capacity(corpus.len());
    for image in corpus {
        let te = time_backend(space, exact, image, repeats_exact)?;
        let tf = time_backend(space, fast, image, repeats_fast)?;
        gains.push(te / tf.max(f64::MIN_POSITIVE));
    }
    GainStats::from_samples(&gains)
}

/// A text table rendered as CSV or markdown.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Table {
        Table { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }

    pub fn to_csv(&self) -> String {
        let esc = |s: &String| {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        };
        let mut out = String::new();
        for line in std::iter::once(&self.headers).chain(&self.rows) {
            out.push_str(&line.iter().map(esc).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("| {} |\n", self.headers.join(" | "));
        out.push_str(&format!("|{}\n", "---|".repeat(self.headers.len())));
        for r in &self.rows {
            out.push_str(&format!("| {} |\n", r.join(" | ")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lut::{build_cache, build_lut};
    use rand::seq::SliceRandom;

    #[test]
    fn cube_enumeration() {
        let mut it = rgb16million();
        assert_eq!(it.len(), 16_777_216);
        assert_eq!(it.next(), Some(RgbU8::new(0, 0, 0)));
        assert_eq!(it.next_back(), Some(RgbU8::new(255, 255, 255)));
        let mut seen = vec![false; CUBE_SIZE];
        for p in rgb16million() {
            let i = p.index() as usize;
            assert!(!seen[i]);
            seen[i] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-13)).abs() < 1e-16);
    }

    #[test]
    fn self_comparison_is_zero() {
        let pop = Population::subsample(20_000, 1);
        for space in Space::ALL {
            let s = measure_error(space, &Backend::Exact, &Backend::Exact, &pop).unwrap();
            assert_eq!((s.avg, s.max), (0.0, 0.0));
            assert!(!s.certifying);
        }
    }

    fn lab_fast_stats(pop: &Population) -> ErrorStats {
        let fast = Backend::Mact(Box::default());
        measure_error(Space::Lab, &fast, &Backend::Exact, pop).unwrap()
    }

    #[test]
    fn order_independent_and_deterministic() {
        let base = Population::subsample(200_000, 9);
        let Population::Pixels(mut px) = base.clone() else { unreachable!() };
        px.shuffle(&mut StdRng::seed_from_u64(2));
        let a = lab_fast_stats(&base);
        let b = lab_fast_stats(&Population::Pixels(px));
        assert!(((a.avg - b.avg) / a.avg).abs() < 1e-9);
        assert_eq!(a.max, b.max);
        assert_eq!(a, lab_fast_stats(&base));
    }

    #[test]
    fn argmax_rescores_to_max() {
        let pop = Population::subsample(100_000, 4);
        let s = lab_fast_stats(&pop);
        let cfg = MactConfig::default();
        let d = lab_distance(&rgb_to_lab_fast(s.argmax, &cfg), &rgb_to_lab_exact(s.argmax));
        assert_eq!(d, s.max);
        assert!(s.avg <= s.max && s.avg >= 0.0 && s.count == 100_000);
    }

    #[test]
    fn subsample_is_sorted_and_distinct() {
        let Population::Pixels(px) = Population::subsample(5000, 3) else { unreachable!() };
        assert_eq!(px.len(), 5000);
        assert!(px.windows(2).all(|w| w[0].index() < w[1].index()));
        assert_eq!(Population::subsample(5000, 3), Population::Pixels(px));
    }

    #[test]
    fn lut_backend_checks() {
        let lut = build_lut(Space::Lab, 9).unwrap();
        let plain = Backend::Lut { lut: Box::new(lut.clone()), method: Method::Prism, variant: Variant::Caching };
        assert!(matches!(plain.validate(Space::Lab), Err(Error::CacheMissing)));
        let cached = Backend::Lut { lut: Box::new(build_cache(lut)), method: Method::Prism, variant: Variant::Caching };
        assert!(cached.validate(Space::Lab).is_ok());
        assert!(cached.validate(Space::Hsi).is_err());
    }

    #[test]
    fn probabilities_on_small_population() {
        let pop = Population::Pixels(vec![RgbU8::new(0, 0, 0), RgbU8::new(0, 0, 255), RgbU8::new(255, 255, 255)]);
        let p = call_probabilities(&pop).unwrap();
        assert!((p.arctan - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.arcsin - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.cbrt_x - 2.0 / 3.0).abs() < 1e-15);
        assert!(call_probabilities(&Population::Pixels(Vec::new())).is_err());
    }

    #[test]
    fn gain_stats_shape() {
        let g = GainStats::from_samples(&[3.0, 1.0, 2.0, 10.0]).unwrap();
        assert_eq!((g.min, g.max, g.median, g.mean), (1.0, 10.0, 2.5, 4.0));
        assert!(matches!(GainStats::from_samples(&[]), Err(Error::CorpusEmpty)));
        assert!(matches!(
            measure_gain(Space::Lab, &Backend::Exact, &Backend::Exact, &[], 3, 3),
            Err(Error::CorpusEmpty)
        ));
    }

    #[test]
    fn self_gain_near_one() {
        let corpus = synthetic_corpus(&[256], 5);
        let g = measure_gain(Space::Hsi, &Backend::Exact, &Backend::Exact, &corpus, 5, 5).unwrap();
        assert!((0.8..=1.25).contains(&g.median), "{g:?}");
        assert!(g.min > 0.4 && g.max < 2.5, "{g:?}");
    }

    #[test]
    fn synthetic_images() {
        for pattern in Pattern::ALL {
            let a = synthetic_image(pattern, 32, 1);
            assert_eq!(a.pixels.len(), 32 * 32);
            assert_eq!(a, synthetic_image(pattern, 32, 1));
        }
        let flat = synthetic_image(Pattern::Flat, 8, 2);
        assert!(flat.pixels.iter().all(|&p| p == flat.pixels[0]));
        assert_eq!(synthetic_corpus(&[16, 32], 0).len(), 8);
    }

    #[test]
    fn table_rendering() {
        let mut t = Table::new(["n", "eps"]);
        t.push(["2", "1e-3"]);
        t.push(["a,b", "x"]);
        assert_eq!(t.to_csv(), "n,eps\n2,1e-3\n\"a,b\",x\n");
        assert_eq!(t.to_markdown(), "| n | eps |\n|---|---|\n| 2 | 1e-3 |\n| a,b | x |\n");
    }
}
