//! Reference transforms from 8-bit RGB to CIELAB, HSI and SCT, the SCT
//! inverse, and the distance functions used to score approximations.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

/// Branch point of the CIELAB companding function.
pub const LAB_KNEE: f64 = 0.008856;

/// Linear RGB to CIEXYZ, row-major.
pub const RGB_TO_XYZ: [[f64; 3]; 3] =
    [[0.412391, 0.357584, 0.180481], [0.212639, 0.715169, 0.072192], [0.019331, 0.119195, 0.950532]];

/// D65 reference white `(X_0, Y_0, Z_0)`.
pub const WHITE_D65: [f64; 3] = [0.950456, 1.0, 1.089058];

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RgbU8 {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl RgbU8 {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        RgbU8 { r, g, b }
    }

    /// Pixel at position `index` of the cube enumeration (blue fastest).
    pub const fn from_index(index: u32) -> Self {
        RgbU8 { r: (index >> 16) as u8, g: (index >> 8) as u8, b: index as u8 }
    }

    pub const fn index(self) -> u32 {
        (self.r as u32) << 16 | (self.g as u32) << 8 | self.b as u32
    }

    pub fn to_f64(self) -> [f64; 3] {
        [self.r as f64, self.g as f64, self.b as f64]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LabPixel {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

/// Hue in `[0, 2π)`, `None` on the gray axis. Saturation and intensity are
/// in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HsiPixel {
    pub h: Option<f64>,
    pub s: f64,
    pub i: f64,
}

/// Magnitude in `[0, 255√3]` and two angles in `[0, π/2]`. `angle_b` is
/// `None` when red and green are both zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SctPixel {
    pub l: f64,
    pub angle_a: f64,
    pub angle_b: Option<f64>,
}

impl HsiPixel {
    pub fn to_array(self) -> [f64; 3] {
        [self.h.unwrap_or(0.0), self.s, self.i]
    }
}

impl SctPixel {
    pub fn to_array(self) -> [f64; 3] {
        [self.l, self.angle_a, self.angle_b.unwrap_or(0.0)]
    }
}

impl LabPixel {
    pub fn to_array(self) -> [f64; 3] {
        [self.l, self.a, self.b]
    }
}

/// BT.709 inverse gamma on a unit-range channel.
pub fn inverse_gamma(k: f64) -> f64 {
    if k < 0.081 {
        k / 4.5
    } else {
        ((k + 0.099) / 1.099).powf(1.0 / 0.45)
    }
}

pub fn rgb_to_xyz(r: f64, g: f64, b: f64) -> [f64; 3] {
    let m = &RGB_TO_XYZ;
    [
        m[0][0] * r + m[0][1] * g + m[0][2] * b,
        m[1][0] * r + m[1][1] * g + m[1][2] * b,
        m[2][0] * r + m[2][1] * g + m[2][2] * b,
    ]
}

/// Linear branch of the companding function.
#[inline]
pub fn lab_f_linear(t: f64) -> f64 {
    7.787 * t + 16.0 / 116.0
}

#[inline]
pub fn lab_f(t: f64) -> f64 {
    if t > LAB_KNEE {
        t.cbrt()
    } else {
        lab_f_linear(t)
    }
}

/// Assembles `L*a*b*` from the companded white-relative tristimulus values.
#[inline]
pub fn lab_from_f(fx: f64, fy: f64, fz: f64) -> LabPixel {
    LabPixel { l: 116.0 * fy - 16.0, a: 500.0 * (fx - fy), b: 200.0 * (fy - fz) }
}

pub fn xyz_to_lab(xyz: [f64; 3]) -> LabPixel {
    lab_from_f(lab_f(xyz[0] / WHITE_D65[0]), lab_f(xyz[1] / WHITE_D65[1]), lab_f(xyz[2] / WHITE_D65[2]))
}

/// CIELAB of a real-valued RGB triple on the 0..255 scale.
pub fn rgb_to_lab_real(rgb: [f64; 3]) -> LabPixel {
    let lin = rgb.map(|c| inverse_gamma(c / 255.0));
    xyz_to_lab(rgb_to_xyz(lin[0], lin[1], lin[2]))
}

#[inline]
pub fn rgb_to_lab_exact(p: RgbU8) -> LabPixel {
    rgb_to_lab_real(p.to_f64())
}

fn saturation_intensity(r: f64, g: f64, b: f64) -> (f64, f64) {
    let sum = r + g + b;
    let s = if sum > 0.0 { 1.0 - 3.0 * r.min(g).min(b) / sum } else { 0.0 };
    (s.clamp(0.0, 1.0), sum / 3.0)
}

/// HSI by the arccos form. The hue is evaluated on the integer channels,
/// where it is exact on the `G = B` boundary.
pub fn rgb_to_hsi_arccos(p: RgbU8) -> HsiPixel {
    let [r, g, b] = p.to_f64();
    let (s, i) = saturation_intensity(r / 255.0, g / 255.0, b / 255.0);
    let den = ((r - g) * (r - g) + (r - b) * (g - b)).sqrt();
    let h = if den > 0.0 {
        let c = (0.5 * (r - g + r - b) / den).clamp(-1.0, 1.0);
        let h = c.acos();
        let h = if b > g { TAU - h } else { h };
        Some(if h >= TAU { h - TAU } else { h })
    } else {
        None
    };
    HsiPixel { h, s, i }
}

/// Kender's case analysis on unit-range channels, with a pluggable
/// `arctan(√3 x)`.
#[inline]
pub fn kender_hue<F: Fn(f64) -> f64>(r: f64, g: f64, b: f64, atan_sqrt3: F) -> Option<f64> {
    let h = if r > b && g > b {
        FRAC_PI_3 + atan_sqrt3((g - r) / (g - b + r - b))
    } else if g > r {
        PI + atan_sqrt3((b - g) / (b - r + g - r))
    } else if b > g {
        5.0 * FRAC_PI_3 + atan_sqrt3((r - b) / (r - g + b - g))
    } else if r > b {
        0.0
    } else {
        return None;
    };
    Some(if h < 0.0 {
        h + TAU
    } else if h >= TAU {
        h - TAU
    } else {
        h
    })
}

/// HSI of a real-valued RGB triple on the 0..255 scale.
#[inline]
pub fn rgb_to_hsi_real(rgb: [f64; 3]) -> HsiPixel {
    let [r, g, b] = rgb.map(|c| c / 255.0);
    let (s, i) = saturation_intensity(r, g, b);
    HsiPixel { h: kender_hue(r, g, b, |x| (SQRT_3 * x).atan()), s, i }
}

/// HSI by Kender's arctan form.
#[inline]
pub fn rgb_to_hsi_exact(p: RgbU8) -> HsiPixel {
    rgb_to_hsi_real(p.to_f64())
}

/// SCT of a real-valued RGB triple on the 0..255 scale.
#[inline]
pub fn rgb_to_sct_real(rgb: [f64; 3]) -> SctPixel {
    let [r, g, b] = rgb;
    let l = (r * r + g * g + b * b).sqrt();
    let angle_a = if l > 0.0 { (b / l).clamp(0.0, 1.0).acos() } else { 0.0 };
    let angle_b = if r > 0.0 {
        Some((g / r).atan())
    } else if g > 0.0 {
        Some(FRAC_PI_2)
    } else {
        None
    };
    SctPixel { l, angle_a, angle_b }
}

#[inline]
pub fn rgb_to_sct_exact(p: RgbU8) -> SctPixel {
    rgb_to_sct_real(p.to_f64())
}

/// Spherical to Cartesian on the 0..255 scale.
pub fn sct_to_rgb(p: &SctPixel) -> [f64; 3] {
    let b_angle = p.angle_b.unwrap_or(0.0);
    let (sa, ca) = p.angle_a.sin_cos();
    let (sb, cb) = b_angle.sin_cos();
    [p.l * sa * cb, p.l * sa * sb, p.l * ca]
}

pub fn lab_distance(x: &LabPixel, y: &LabPixel) -> f64 {
    let dl = x.l - y.l;
    let da = x.a - y.a;
    let db = x.b - y.b;
    (dl * dl + da * da + db * db).sqrt()
}

/// Hue difference folded into `[0, π]`.
#[inline]
pub fn hue_gap(hx: f64, hy: f64) -> f64 {
    let d = (hx - hy).abs();
    if d <= PI {
        d
    } else {
        TAU - d
    }
}

pub fn hsi_distance(x: &HsiPixel, y: &HsiPixel) -> f64 {
    let theta = hue_gap(x.h.unwrap_or(0.0), y.h.unwrap_or(0.0));
    let di = x.i - y.i;
    let sq = x.s * x.s + y.s * y.s - 2.0 * x.s * y.s * theta.cos() + di * di;
    sq.max(0.0).sqrt()
}

/// Maps both pixels back to RGB, clamps to the cube and measures the CIELAB
/// distance of the results.
pub fn sct_distance_indirect(x: &SctPixel, y: &SctPixel) -> f64 {
    let lx = rgb_to_lab_real(sct_to_rgb(x).map(|c| c.clamp(0.0, 255.0)));
    let ly = rgb_to_lab_real(sct_to_rgb(y).map(|c| c.clamp(0.0, 255.0)));
    lab_distance(&lx, &ly)
}
