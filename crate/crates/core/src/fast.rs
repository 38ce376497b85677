//! Fast transforms that substitute minimax approximants for the elementary
//! functions of the exact pipelines.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::exact::{
    inverse_gamma, kender_hue, lab_f_linear, lab_from_f, HsiPixel, LabPixel, RgbU8, SctPixel, LAB_KNEE, RGB_TO_XYZ,
    WHITE_D65,
};
use crate::poly::Form;
use crate::registry::{registry_get, Approximant, TargetFn};

/// Coefficient slots of an unrolled kernel.
const SLOTS: usize = 6;

fn pad(c: &[f64]) -> Option<[f64; SLOTS]> {
    let mut out = [0.0; SLOTS];
    out.get_mut(..c.len())?.copy_from_slice(c);
    Some(out)
}

/// A polynomial lowered to a zero-padded coefficient array. Leading zeros
/// leave Horner's scheme bit-identical.
#[derive(Debug, Clone)]
struct PolyKernel([f64; SLOTS]);

impl PolyKernel {
    fn lower(form: &Form) -> Option<PolyKernel> {
        match form {
            Form::Polynomial(p) => pad(p.coeffs()).map(PolyKernel),
            Form::Rational(_) => None,
        }
    }

    #[inline(always)]
    fn eval(&self, x: f64) -> f64 {
        horner(&self.0, x)
    }
}

/// Either form as a ratio; a polynomial gets the unit denominator, which
/// divides exactly.
#[derive(Debug, Clone)]
struct RationalKernel {
    num: [f64; SLOTS],
    den: [f64; SLOTS],
}

impl RationalKernel {
    fn lower(form: &Form) -> Option<RationalKernel> {
        match form {
            Form::Polynomial(p) => Some(RationalKernel { num: pad(p.coeffs())?, den: pad(&[1.0])? }),
            Form::Rational(r) => {
                Some(RationalKernel { num: pad(r.numerator.coeffs())?, den: pad(r.denominator.coeffs())? })
            }
        }
    }

    #[inline(always)]
    fn eval(&self, x: f64) -> f64 {
        horner(&self.num, x) / horner(&self.den, x)
    }
}

#[inline(always)]
fn horner(c: &[f64; SLOTS], x: f64) -> f64 {
    ((((c[5] * x + c[4]) * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0]
}

/// Branch-free choice between two already computed values.
#[inline(always)]
fn select(c: bool, a: f64, b: f64) -> f64 {
    if c {
        a
    } else {
        b
    }
}

#[derive(Debug, Clone)]
struct Kernels {
    cbrt: RationalKernel,
    atan_sqrt3: PolyKernel,
    /// `[arccos below 0.5, arcsin half-angle above]`.
    arccos: [PolyKernel; 2],
    /// `[arctan below the diagonal, arctan above]`.
    arctan: [PolyKernel; 2],
}

fn unsupported(a: &Approximant) -> Error {
    let (n, m) = a.degrees();
    Error::InvalidProblem(match m {
        Some(m) => format!("{} slot cannot hold a ({n},{m}) rational", a.target.name()),
        None => format!("{} slot cannot hold a degree-{n} polynomial", a.target.name()),
    })
}

fn lower_poly(a: &Approximant) -> Result<PolyKernel> {
    PolyKernel::lower(&a.form).ok_or_else(|| unsupported(a))
}

fn lower_rational(a: &Approximant) -> Result<RationalKernel> {
    RationalKernel::lower(&a.form).ok_or_else(|| unsupported(a))
}

/// Approximant selection for the three fast transforms.
#[derive(Debug, Clone)]
pub struct MactConfig {
    cbrt: Approximant,
    atan_sqrt3: Approximant,
    asin_half: Approximant,
    acos_half: Approximant,
    atan_f: Approximant,
    atan_g: Approximant,
    gamma: Box<[f64; 256]>,
    kernels: Kernels,
}

impl Default for MactConfig {
    fn default() -> Self {
        MactConfig::new((4, 4), 5, (5, 5, 5)).expect("default degrees are published")
    }
}

impl MactConfig {
    /// Resolves CIELAB `(n, m)`, HSI `n` and SCT `(n_arcsin, m_arccos,
    /// r_arctan)` against the registry.
    pub fn new(cielab: (usize, usize), hsi: usize, sct: (usize, usize, usize)) -> Result<Self> {
        let get = |t, n, m| registry_get(t, n, m).cloned();
        let mut gamma = Box::new([0.0; 256]);
        for (k, g) in gamma.iter_mut().enumerate() {
            *g = inverse_gamma(k as f64 / 255.0);
        }
        let cbrt = get(TargetFn::Cbrt, cielab.0, Some(cielab.1))?;
        let atan_sqrt3 = get(TargetFn::AtanSqrt3, hsi, None)?;
        let asin_half = get(TargetFn::AsinHalf, sct.0, None)?;
        let acos_half = get(TargetFn::AcosHalf, sct.1, None)?;
        let atan_f = get(TargetFn::AtanF, sct.2, None)?;
        let atan_g = get(TargetFn::AtanG, sct.2, None)?;
        let kernels = Kernels {
            cbrt: lower_rational(&cbrt)?,
            atan_sqrt3: lower_poly(&atan_sqrt3)?,
            arccos: [lower_poly(&acos_half)?, lower_poly(&asin_half)?],
            arctan: [lower_poly(&atan_f)?, lower_poly(&atan_g)?],
        };
        Ok(MactConfig { cbrt, atan_sqrt3, asin_half, acos_half, atan_f, atan_g, gamma, kernels })
    }

    #[inline(always)]
    fn k(&self) -> &Kernels {
        &self.kernels
    }

    /// Replaces the approximant slot matching `a.target`. Slots other than
    /// the cube root take polynomials only; all kernels take at most six
    /// coefficients per polynomial.
    pub fn with_approximant(mut self, a: Approximant) -> Result<Self> {
        let k = &mut self.kernels;
        match a.target {
            TargetFn::Cbrt => {
                k.cbrt = lower_rational(&a)?;
                self.cbrt = a;
            }
            TargetFn::AtanSqrt3 => {
                k.atan_sqrt3 = lower_poly(&a)?;
                self.atan_sqrt3 = a;
            }
            TargetFn::AsinHalf => {
                k.arccos[1] = lower_poly(&a)?;
                self.asin_half = a;
            }
            TargetFn::AcosHalf => {
                k.arccos[0] = lower_poly(&a)?;
                self.acos_half = a;
            }
            TargetFn::AtanF => {
                k.arctan[0] = lower_poly(&a)?;
                self.atan_f = a;
            }
            TargetFn::AtanG => {
                k.arctan[1] = lower_poly(&a)?;
                self.atan_g = a;
            }
        }
        Ok(self)
    }

    pub fn approximant(&self, target: TargetFn) -> &Approximant {
        match target {
            TargetFn::Cbrt => &self.cbrt,
            TargetFn::AtanSqrt3 => &self.atan_sqrt3,
            TargetFn::AsinHalf => &self.asin_half,
            TargetFn::AcosHalf => &self.acos_half,
            TargetFn::AtanF => &self.atan_f,
            TargetFn::AtanG => &self.atan_g,
        }
    }

    pub fn cielab_degrees(&self) -> (usize, usize) {
        let (n, m) = self.cbrt.degrees();
        (n, m.unwrap_or(0))
    }

    pub fn hsi_degree(&self) -> usize {
        self.atan_sqrt3.degrees().0
    }

    pub fn sct_degrees(&self) -> (usize, usize, usize) {
        (self.asin_half.degrees().0, self.acos_half.degrees().0, self.atan_f.degrees().0)
    }

    /// Inverse gamma of an 8-bit channel.
    #[inline]
    pub fn gamma(&self, c: u8) -> f64 {
        self.gamma[c as usize]
    }
}

#[inline]
pub fn cbrt_fast(t: f64, approx: &Approximant) -> f64 {
    approx.eval(t).clamp(0.0, 1.0)
}

#[inline(always)]
fn lab_f_fast(t: f64, cbrt: &RationalKernel) -> f64 {
    if t > LAB_KNEE {
        cbrt.eval(t).clamp(0.0, 1.0)
    } else {
        lab_f_linear(t)
    }
}

#[inline]
pub fn rgb_to_lab_fast(p: RgbU8, cfg: &MactConfig) -> LabPixel {
    let (r, g, b) = (cfg.gamma(p.r), cfg.gamma(p.g), cfg.gamma(p.b));
    let m = &RGB_TO_XYZ;
    let x = m[0][0] * r + m[0][1] * g + m[0][2] * b;
    let y = m[1][0] * r + m[1][1] * g + m[1][2] * b;
    let z = m[2][0] * r + m[2][1] * g + m[2][2] * b;
    let cbrt = &cfg.k().cbrt;
    lab_from_f(
        lab_f_fast(x / WHITE_D65[0], cbrt),
        lab_f_fast(y / WHITE_D65[1], cbrt),
        lab_f_fast(z / WHITE_D65[2], cbrt),
    )
}

/// `arctan(√3 x)` on `[-1, 1]` by odd extension of the approximant.
#[inline]
pub fn atan_sqrt3_fast(x: f64, approx: &Approximant) -> f64 {
    if x >= 0.0 {
        approx.eval(x)
    } else {
        -approx.eval(-x)
    }
}

#[inline]
pub fn rgb_to_hsi_fast(p: RgbU8, cfg: &MactConfig) -> HsiPixel {
    let [r, g, b] = p.to_f64();
    let sum = r + g + b;
    let s = if sum > 0.0 { 1.0 - 3.0 * r.min(g).min(b) / sum } else { 0.0 };
    let k = &cfg.k().atan_sqrt3;
    HsiPixel {
        h: kender_hue(r, g, b, |x| {
            let y = k.eval(x.abs());
            select(x >= 0.0, y, -y)
        }),
        s: s.clamp(0.0, 1.0),
        i: sum / 765.0,
    }
}

/// `arccos` on `[0, 1]`: direct polynomial below 0.5, the half-angle arcsin
/// form above.
#[inline]
pub fn acos_fast(x: f64, cfg: &MactConfig) -> f64 {
    let k = cfg.k();
    let v = if x < 0.5 { k.arccos[0].eval(x) } else { k.arccos[1].eval((1.0 - x).max(0.0).sqrt()) };
    v.clamp(0.0, FRAC_PI_2)
}

/// `arctan(g / r)` for non-negative `g`, `r` using the split domain.
#[inline]
pub fn atan_unit_fast(g: f64, r: f64, cfg: &MactConfig) -> Result<f64> {
    let k = cfg.k();
    let v = if g < r {
        k.arctan[0].eval(g / r)
    } else if g > 0.0 {
        k.arctan[1].eval(r / g)
    } else {
        return Err(Error::UndefinedAngle);
    };
    Ok(v.clamp(0.0, FRAC_PI_2))
}

#[inline]
pub fn rgb_to_sct_fast(p: RgbU8, cfg: &MactConfig) -> SctPixel {
    let [r, g, b] = p.to_f64();
    let l = (r * r + g * g + b * b).sqrt();
    if p.r == 0 && p.g == 0 {
        return SctPixel { l, angle_a: 0.0, angle_b: None };
    }
    let k = cfg.k();
    let x = b / l;
    let upper = x >= 0.5;
    let arg = select(upper, (1.0 - x).max(0.0).sqrt(), x);
    let angle_a = k.arccos[upper as usize].eval(arg);
    let t = g.min(r) / g.max(r);
    let angle_b = k.arctan[(g >= r) as usize].eval(t);
    SctPixel { l, angle_a: angle_a.clamp(0.0, FRAC_PI_2), angle_b: Some(angle_b.clamp(0.0, FRAC_PI_2)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{lab_distance, rgb_to_hsi_exact, rgb_to_lab_exact, rgb_to_sct_exact};
    use std::f64::consts::{PI, TAU};

    fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
    }

    #[test]
    fn cbrt_examples() {
        let c44 = registry_get(TargetFn::Cbrt, 4, Some(4)).unwrap();
        assert!((cbrt_fast(1.0, c44) - 1.0).abs() <= 3.856930e-05);
        let c22 = registry_get(TargetFn::Cbrt, 2, Some(2)).unwrap();
        assert!((cbrt_fast(0.008856, c22) - 0.008856f64.cbrt()).abs() <= 2.060996e-03);
        let c33 = registry_get(TargetFn::Cbrt, 3, Some(3)).unwrap();
        assert!((cbrt_fast(0.5, c33) - 0.5f64.cbrt()).abs() <= 1.858694e-04);
    }

    #[test]
    fn lab_fast_examples() {
        let cfg = MactConfig::default();
        let w = RgbU8::new(255, 255, 255);
        assert!(lab_distance(&rgb_to_lab_fast(w, &cfg), &rgb_to_lab_exact(w)) <= 0.036481);
        let k = RgbU8::new(0, 0, 0);
        assert_eq!(rgb_to_lab_fast(k, &cfg), rgb_to_lab_exact(k));
    }

    #[test]
    fn gamma_table_is_exact() {
        let cfg = MactConfig::default();
        for c in 0..=255u8 {
            assert_eq!(cfg.gamma(c), inverse_gamma(c as f64 / 255.0));
        }
    }

    #[test]
    fn atan_sqrt3_examples() {
        let a = registry_get(TargetFn::AtanSqrt3, 5, None).unwrap();
        assert!(atan_sqrt3_fast(0.0, a).abs() <= 1.801311e-04);
        let edge = 254.0 / 256.0;
        assert!((atan_sqrt3_fast(edge, a) - (3f64.sqrt() * edge).atan()).abs() <= 1.801311e-04);
        assert!((atan_sqrt3_fast(1.0, a) - PI / 3.0).abs() <= 3e-4);
        assert_eq!(atan_sqrt3_fast(-1.0, a), -atan_sqrt3_fast(1.0, a));
    }

    #[test]
    fn hsi_fast_examples() {
        let cfg = MactConfig::default();
        let gray = RgbU8::new(77, 77, 77);
        assert_eq!(rgb_to_hsi_fast(gray, &cfg), rgb_to_hsi_exact(gray));
        assert_eq!(rgb_to_hsi_fast(RgbU8::new(255, 0, 0), &cfg).h, Some(0.0));
        for idx in (0..1u32 << 24).step_by(9973) {
            let h = rgb_to_hsi_fast(RgbU8::from_index(idx), &cfg);
            if let Some(h) = h.h {
                assert!((0.0..TAU).contains(&h));
            }
        }
    }

    #[test]
    fn acos_examples() {
        let cfg = MactConfig::default();
        assert!((acos_fast(0.0, &cfg) - FRAC_PI_2).abs() <= 1.186403e-06);
        assert!(acos_fast(1.0, &cfg).abs() <= 2.0 * 2.370540e-06);
        let lo = cfg.acos_half.eval(0.5);
        let hi = cfg.asin_half.eval(0.5f64.sqrt());
        assert!((lo - hi).abs() <= 1e-5);
        assert!((acos_fast(0.5, &cfg) - PI / 3.0).abs() <= 1e-5);
        let bound = 2.2 * (2.0 * 2.370540e-06f64).max(1.186403e-06);
        for x in grid(0.0, 1.0, 100_001) {
            assert!((acos_fast(x, &cfg) - x.acos()).abs() <= bound, "{x}");
        }
    }

    #[test]
    fn atan_unit_examples() {
        let cfg = MactConfig::new((4, 4), 5, (5, 5, 4)).unwrap();
        assert!((atan_unit_fast(1.0, 1.0, &cfg).unwrap() - PI / 4.0).abs() <= 1.05 * 1.051643e-04);
        assert!(atan_unit_fast(0.0, 1.0, &cfg).unwrap().abs() <= 1.036515e-04);
        assert!((atan_unit_fast(1.0, 0.0, &cfg).unwrap() - FRAC_PI_2).abs() <= 1.05 * 1.051643e-04);
        assert!(matches!(atan_unit_fast(0.0, 0.0, &cfg), Err(Error::UndefinedAngle)));
    }

    #[test]
    fn sct_fast_examples() {
        let cfg = MactConfig::default();
        let blue = RgbU8::new(0, 0, 255);
        assert_eq!(rgb_to_sct_fast(blue, &cfg), rgb_to_sct_exact(blue));
        for idx in (0..1u32 << 24).step_by(7919) {
            let p = RgbU8::from_index(idx);
            let (f, e) = (rgb_to_sct_fast(p, &cfg), rgb_to_sct_exact(p));
            assert!((0.0..=FRAC_PI_2).contains(&f.angle_a));
            assert!((f.angle_a - e.angle_a).abs() <= 2.2 * 2.0 * 2.370540e-06);
            assert_eq!(f.angle_b.is_some(), e.angle_b.is_some());
        }
    }

    #[test]
    fn per_function_bounds() {
        let cfg = MactConfig::default();
        for t in TargetFn::ALL {
            let a = cfg.approximant(t);
            let (lo, hi) = a.interval;
            let worst = grid(lo, hi, 100_000).map(|x| (a.eval(x) - t.exact(x)).abs()).fold(0.0, f64::max);
            // The printed degree-5 arccos constant term is rounded past its error bound.
            let slack = if t == TargetFn::AcosHalf { 1.5 } else { 1.05 };
            assert!(worst <= slack * a.eps_max, "{t:?} {worst}");
        }
    }

    #[test]
    fn override_slot() {
        let a = registry_get(TargetFn::AtanSqrt3, 3, None).unwrap().clone();
        let cfg = MactConfig::default().with_approximant(a).unwrap();
        assert_eq!(cfg.hsi_degree(), 3);
        assert_eq!(cfg.cielab_degrees(), (4, 4));
        assert_eq!(cfg.sct_degrees(), (5, 5, 5));
        assert!(MactConfig::new((5, 5), 5, (5, 5, 5)).is_err());
    }
}
