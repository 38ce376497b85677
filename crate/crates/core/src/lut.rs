//! 3D lookup tables over the RGB cube with trilinear, prism, pyramidal and
//! tetrahedral interpolation, plain or with cached neighbor differences.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::exact::{rgb_to_hsi_real, rgb_to_lab_real, rgb_to_sct_real, HsiPixel, LabPixel, RgbU8, SctPixel};
use crate::space::Space;

pub const SUPPORTED_GRIDS: [usize; 3] = [9, 17, 33];

const MAGIC: &[u8; 4] = b"MLUT";
const FORMAT_VERSION: u32 = 1;

/// Weighted vectors shorter than this have no defined direction.
const DEGENERATE_NORM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Trilinear,
    Prism,
    Pyramidal,
    Tetrahedral,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Trilinear, Method::Prism, Method::Pyramidal, Method::Tetrahedral];

    /// Lattice nodes read per interpolation.
    pub fn neighbor_count(self) -> usize {
        match self {
            Method::Trilinear => 8,
            Method::Prism => 6,
            Method::Pyramidal => 5,
            Method::Tetrahedral => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Trilinear => "trilinear",
            Method::Prism => "prism",
            Method::Pyramidal => "pyramidal",
            Method::Tetrahedral => "tetrahedral",
        }
    }

    pub fn from_name(name: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == name.to_ascii_lowercase())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Standard,
    Caching,
}

/// Enclosing cell of an input and the offsets inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellLocation {
    pub base: [usize; 3],
    pub offset: [f64; 3],
}

/// Cell corners as bit masks: red 4, green 2, blue 1.
const R: u8 = 4;
const G: u8 = 2;
const B: u8 = 1;

/// Corner weights of one interpolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    corners: [u8; 8],
    weights: [f64; 8],
    len: usize,
}

impl Stencil {
    fn new() -> Self {
        Stencil { corners: [0; 8], weights: [0.0; 8], len: 0 }
    }

    #[inline]
    fn push(&mut self, corner: u8, w: f64) {
        self.corners[self.len] = corner;
        self.weights[self.len] = w;
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (u8, f64)> + '_ {
        self.corners[..self.len].iter().copied().zip(self.weights[..self.len].iter().copied())
    }

    /// Coefficients of the seven cached difference terms
    /// `[Dr, Dg, Db, Drg, Drb, Dgb, Drgb]`.
    fn difference_coefficients(&self) -> [f64; 7] {
        let mut c = [0.0; 7];
        for (corner, w) in self.iter() {
            let (r, g, b) = (corner & R != 0, corner & G != 0, corner & B != 0);
            let terms = [r, g, b, r && g, r && b, g && b, r && g && b];
            for (ck, on) in c.iter_mut().zip(terms) {
                if on {
                    *ck += w;
                }
            }
        }
        c
    }
}

/// Corner weights of `method` at offsets `d = (dr, dg, db)`.
pub fn stencil(method: Method, d: [f64; 3]) -> Stencil {
    let [dr, dg, db] = d;
    let mut s = Stencil::new();
    match method {
        Method::Trilinear => {
            for corner in 0..8u8 {
                let wr = if corner & R != 0 { dr } else { 1.0 - dr };
                let wg = if corner & G != 0 { dg } else { 1.0 - dg };
                let wb = if corner & B != 0 { db } else { 1.0 - db };
                s.push(corner, wr * wg * wb);
            }
        }
        Method::Prism => {
            let tri = if dg >= db {
                [(0, 1.0 - dg), (G, dg - db), (G | B, db)]
            } else {
                [(0, 1.0 - db), (B, db - dg), (G | B, dg)]
            };
            for (corner, w) in tri {
                s.push(corner, (1.0 - dr) * w);
                s.push(corner | R, dr * w);
            }
        }
        Method::Pyramidal => {
            if dr > db && dg >= db {
                s.push(0, (1.0 - dr) * (1.0 - dg));
                s.push(R, dr * (1.0 - dg));
                s.push(G, dg * (1.0 - dr));
                s.push(R | G, dr * dg - db);
                s.push(R | G | B, db);
            } else if dr >= dg && db > dg {
                s.push(0, (1.0 - db) * (1.0 - dr));
                s.push(B, db * (1.0 - dr));
                s.push(R, dr * (1.0 - db));
                s.push(R | B, db * dr - dg);
                s.push(R | G | B, dg);
            } else {
                s.push(0, (1.0 - dg) * (1.0 - db));
                s.push(B, db * (1.0 - dg));
                s.push(G, dg * (1.0 - db));
                s.push(G | B, dg * db - dr);
                s.push(R | G | B, dr);
            }
        }
        Method::Tetrahedral => {
            let mut axes = [(dr, R), (dg, G), (db, B)];
            axes.sort_by(|a, b| b.0.total_cmp(&a.0));
            let (a0, a1, a2) = (axes[0], axes[1], axes[2]);
            s.push(0, 1.0 - a0.0);
            s.push(a0.1, a0.0 - a1.0);
            s.push(a0.1 | a1.1, a1.0 - a2.0);
            s.push(R | G | B, a2.0);
        }
    }
    s
}

/// Precomputed per-cell differences.
#[derive(Debug, Clone)]
struct Cache {
    /// Per node, per channel: the channel value.
    base: Vec<f64>,
    /// Per cell, per channel: `[Dr, Dg, Db, Drg, Drb, Dgb, Drgb]`.
    diffs: Vec<[f64; 7]>,
}

/// A cubic lattice of destination triples over `[0, 255]^3`.
#[derive(Debug, Clone)]
pub struct Lut3D {
    grid_n: usize,
    spacing: f64,
    space: Space,
    angular_mask: [bool; 3],
    values: Vec<[f64; 3]>,
    cache: Option<Cache>,
}

impl PartialEq for Lut3D {
    fn eq(&self, other: &Self) -> bool {
        self.grid_n == other.grid_n
            && self.space == other.space
            && self.angular_mask == other.angular_mask
            && self.values == other.values
    }
}

fn check_grid(grid_n: usize) -> Result<()> {
    if SUPPORTED_GRIDS.contains(&grid_n) {
        Ok(())
    } else {
        Err(Error::UnsupportedGrid(grid_n))
    }
}

/// Exact destination triple of a real-valued RGB point, undefined angles
/// stored as 0.
pub fn exact_triple(space: Space, rgb: [f64; 3]) -> [f64; 3] {
    match space {
        Space::Lab => rgb_to_lab_real(rgb).to_array(),
        Space::Hsi => rgb_to_hsi_real(rgb).to_array(),
        Space::Sct => rgb_to_sct_real(rgb).to_array(),
    }
}

pub fn build_lut(space: Space, grid_n: usize) -> Result<Lut3D> {
    Lut3D::from_fn(space, grid_n, |rgb| exact_triple(space, rgb))
}

/// Adds the difference cache to `lut`.
pub fn build_cache(mut lut: Lut3D) -> Lut3D {
    lut.build_cache();
    lut
}

impl Lut3D {
    /// Populates a lattice by evaluating `f` at every node's RGB point.
    pub fn from_fn<F: Fn([f64; 3]) -> [f64; 3]>(space: Space, grid_n: usize, f: F) -> Result<Lut3D> {
        check_grid(grid_n)?;
        let spacing = 255.0 / (grid_n - 1) as f64;
        let mut values = Vec::with_capacity(grid_n * grid_n * grid_n);
        for i in 0..grid_n {
            for j in 0..grid_n {
                for k in 0..grid_n {
                    values.push(f([i as f64 * spacing, j as f64 * spacing, k as f64 * spacing]));
                }
            }
        }
        Ok(Lut3D { grid_n, spacing, space, angular_mask: space.angular_mask(), values, cache: None })
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn angular_mask(&self) -> [bool; 3] {
        self.angular_mask
    }

    pub fn values(&self) -> &[[f64; 3]] {
        &self.values
    }

    pub fn has_cache(&self) -> bool {
        self.cache.is_some()
    }

    #[inline]
    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.grid_n + j) * self.grid_n + k
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        self.values[self.node_index(i, j, k)]
    }

    #[inline]
    fn cell_index(&self, base: [usize; 3]) -> usize {
        let c = self.grid_n - 1;
        (base[0] * c + base[1]) * c + base[2]
    }

    /// Locates the cell holding `rgb`. Coordinates on the upper face map to the
    /// last cell with offset 1.
    #[inline]
    pub fn locate(&self, rgb: [f64; 3]) -> CellLocation {
        let top = self.grid_n - 2;
        let mut base = [0; 3];
        let mut offset = [0.0; 3];
        for a in 0..3 {
            let x = (rgb[a] / self.spacing).clamp(0.0, (self.grid_n - 1) as f64);
            let i = (x as usize).min(top);
            base[a] = i;
            offset[a] = x - i as f64;
        }
        CellLocation { base, offset }
    }

    #[inline]
    fn corner_node(&self, base: [usize; 3], corner: u8) -> usize {
        self.node_index(
            base[0] + (corner & R != 0) as usize,
            base[1] + (corner & G != 0) as usize,
            base[2] + (corner & B != 0) as usize,
        )
    }

    /// Whether the angle in component `c` of `v` is defined. An angle is
    /// undefined where its paired magnitude vanishes.
    #[inline]
    fn angle_defined(&self, v: &[f64; 3], c: usize) -> bool {
        match (self.space, c) {
            (Space::Hsi, 0) => v[1] > 0.0,
            (Space::Sct, 1) => v[0] > 0.0,
            (Space::Sct, 2) => v[1] > 0.0,
            _ => true,
        }
    }

    /// Channel layout: one channel per linear component, two (cos, sin) per
    /// angular component.
    fn channel_count(&self) -> usize {
        3 + self.angular_mask.iter().filter(|&&a| a).count()
    }

    fn channels(&self, v: &[f64; 3], out: &mut [f64]) {
        let mut k = 0;
        for c in 0..3 {
            if self.angular_mask[c] {
                let (s, co) = if self.angle_defined(v, c) { v[c].sin_cos() } else { (0.0, 0.0) };
                out[k] = co;
                out[k + 1] = s;
                k += 2;
            } else {
                out[k] = v[c];
                k += 1;
            }
        }
    }

    pub fn build_cache(&mut self) {
        let ch = self.channel_count();
        let mut base = vec![0.0; self.values.len() * ch];
        for (n, v) in self.values.iter().enumerate() {
            self.channels(v, &mut base[n * ch..(n + 1) * ch]);
        }
        let cells = self.grid_n - 1;
        let mut diffs = vec![[0.0; 7]; cells * cells * cells * ch];
        for i in 0..cells {
            for j in 0..cells {
                for k in 0..cells {
                    let b = [i, j, k];
                    let cell = self.cell_index(b);
                    let p: Vec<usize> = (0..8u8).map(|c| self.corner_node(b, c) * ch).collect();
                    for q in 0..ch {
                        let v = |c: u8| base[p[c as usize] + q];
                        let (p000, p100, p010, p001) = (v(0), v(R), v(G), v(B));
                        let (p110, p101, p011, p111) = (v(R | G), v(R | B), v(G | B), v(R | G | B));
                        diffs[cell * ch + q] = [
                            p100 - p000,
                            p010 - p000,
                            p001 - p000,
                            p110 - p100 - p010 + p000,
                            p101 - p100 - p001 + p000,
                            p011 - p010 - p001 + p000,
                            p111 - p110 - p101 - p011 + p100 + p010 + p001 - p000,
                        ];
                    }
                }
            }
        }
        self.cache = Some(Cache { base, diffs });
    }

    /// Cached difference terms of the cell at `base` for channel `q`.
    pub fn cached_differences(&self, base: [usize; 3], q: usize) -> Option<[f64; 7]> {
        let ch = self.channel_count();
        self.cache.as_ref().map(|c| c.diffs[self.cell_index(base) * ch + q])
    }

    pub fn interpolate(&self, p: RgbU8, method: Method, variant: Variant) -> Result<[f64; 3]> {
        self.interpolate_at(p.to_f64(), method, variant)
    }

    /// Interpolates at a real-valued RGB point on the 0..255 scale.
    pub fn interpolate_at(&self, rgb: [f64; 3], method: Method, variant: Variant) -> Result<[f64; 3]> {
        let loc = self.locate(rgb);
        let st = stencil(method, loc.offset);
        match variant {
            Variant::Standard => Ok(self.combine_standard(loc.base, &st)),
            Variant::Caching => self.combine_cached(loc.base, &st),
        }
    }

    fn combine_standard(&self, base: [usize; 3], st: &Stencil) -> [f64; 3] {
        let mut out = [0.0; 3];
        let mut vec = [(0.0, 0.0); 3];
        for (corner, w) in st.iter() {
            let v = &self.values[self.corner_node(base, corner)];
            for c in 0..3 {
                if self.angular_mask[c] {
                    if self.angle_defined(v, c) {
                        let (s, co) = v[c].sin_cos();
                        vec[c].0 += w * co;
                        vec[c].1 += w * s;
                    }
                } else {
                    out[c] += w * v[c];
                }
            }
        }
        let origin = &self.values[self.corner_node(base, 0)];
        for c in 0..3 {
            if self.angular_mask[c] {
                out[c] = self.finish_angle(vec[c], origin[c]);
            }
        }
        out
    }

    fn combine_cached(&self, base: [usize; 3], st: &Stencil) -> Result<[f64; 3]> {
        let cache = self.cache.as_ref().ok_or(Error::CacheMissing)?;
        let ch = self.channel_count();
        let coef = st.difference_coefficients();
        let node = self.corner_node(base, 0);
        let cell = self.cell_index(base);
        let mut acc = [0.0; 5];
        for (q, a) in acc.iter_mut().enumerate().take(ch) {
            let d = &cache.diffs[cell * ch + q];
            let mut v = cache.base[node * ch + q];
            for t in 0..7 {
                v += coef[t] * d[t];
            }
            *a = v;
        }
        let origin = &self.values[node];
        let mut out = [0.0; 3];
        let mut k = 0;
        for c in 0..3 {
            if self.angular_mask[c] {
                out[c] = self.finish_angle((acc[k], acc[k + 1]), origin[c]);
                k += 2;
            } else {
                out[c] = acc[k];
                k += 1;
            }
        }
        Ok(out)
    }

    #[inline]
    fn finish_angle(&self, (x, y): (f64, f64), fallback: f64) -> f64 {
        if x.hypot(y) < DEGENERATE_NORM {
            return fallback;
        }
        let t = y.atan2(x);
        match self.space {
            Space::Sct => t.clamp(0.0, FRAC_PI_2),
            _ => wrap_angle(t),
        }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        for v in [FORMAT_VERSION, self.grid_n as u32, self.space.code(), self.space.mask_bits()] {
            w.write_all(&v.to_le_bytes())?;
        }
        for t in &self.values {
            for c in t {
                w.write_all(&c.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a lattice written by [`Lut3D::write_to`]. The cache is not
    /// stored and must be rebuilt.
    pub fn read_from<Rd: Read>(mut r: Rd) -> Result<Lut3D> {
        let mut magic = [0u8; 4];
        read_exact(&mut r, &mut magic, "header")?;
        if &magic != MAGIC {
            return Err(Error::MalformedLut("bad magic".into()));
        }
        let mut word = || -> Result<u32> {
            let mut b = [0u8; 4];
            read_exact(&mut r, &mut b, "header")?;
            Ok(u32::from_le_bytes(b))
        };
        let version = word()?;
        let grid = word()?;
        let code = word()?;
        let mask = word()?;
        if version != FORMAT_VERSION {
            return Err(Error::MalformedLut(format!("unsupported version {version}")));
        }
        let grid_n = grid as usize;
        check_grid(grid_n)?;
        let space = Space::from_code(code).ok_or_else(|| Error::MalformedLut(format!("unknown space {code}")))?;
        if mask != space.mask_bits() {
            return Err(Error::MalformedLut(format!("angular mask {mask:#b} does not match {space}")));
        }
        let count = grid_n * grid_n * grid_n;
        let mut bytes = vec![0u8; count * 24];
        read_exact(&mut r, &mut bytes, "lattice")?;
        let values = bytes
            .chunks_exact(24)
            .map(|t| {
                let f = |k: usize| f64::from_le_bytes(t[k * 8..k * 8 + 8].try_into().unwrap());
                [f(0), f(1), f(2)]
            })
            .collect();
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(Error::MalformedLut("trailing bytes".into()));
        }
        Ok(Lut3D {
            grid_n,
            spacing: 255.0 / (grid_n - 1) as f64,
            space,
            angular_mask: space.angular_mask(),
            values,
            cache: None,
        })
    }
}

fn read_exact<Rd: Read>(r: &mut Rd, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::MalformedLut(format!("truncated {what}")),
        _ => Error::Io(e),
    })
}

#[inline]
fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Circular interpolation between two angles, wrapped to `[0, 2π)`.
/// Antipodal inputs at the midpoint have no mean direction and yield
/// `theta0`.
pub fn angular_lerp(theta0: f64, theta1: f64, alpha: f64) -> f64 {
    let (s0, c0) = theta0.sin_cos();
    let (s1, c1) = theta1.sin_cos();
    let y = (1.0 - alpha) * s0 + alpha * s1;
    let x = (1.0 - alpha) * c0 + alpha * c1;
    if x.hypot(y) < DEGENERATE_NORM {
        return theta0;
    }
    wrap_angle(y.atan2(x))
}

/// Interpolated triple as a typed pixel.
pub fn to_lab(v: [f64; 3]) -> LabPixel {
    LabPixel { l: v[0], a: v[1], b: v[2] }
}

pub fn to_hsi(v: [f64; 3]) -> HsiPixel {
    HsiPixel { h: Some(v[0]), s: v[1], i: v[2] }
}

pub fn to_sct(v: [f64; 3]) -> SctPixel {
    SctPixel { l: v[0], angle_a: v[1], angle_b: Some(v[2]) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    const VARIANTS: [Variant; 2] = [Variant::Standard, Variant::Caching];

    fn cached(space: Space, n: usize) -> Lut3D {
        build_cache(build_lut(space, n).unwrap())
    }

    fn linear(rgb: [f64; 3]) -> [f64; 3] {
        [0.3 * rgb[0] - 0.2 * rgb[1] + 0.1 * rgb[2] + 4.0, -1.5 * rgb[2] + 0.25 * rgb[0], 2.0 * rgb[1] - 7.0]
    }

    #[test]
    fn build_examples() {
        let lab9 = build_lut(Space::Lab, 9).unwrap();
        assert_eq!(lab9.values().len(), 729);
        assert_eq!(lab9.node(0, 0, 0), [0.0; 3]);
        let lab33 = build_lut(Space::Lab, 33).unwrap();
        let w = lab33.node(32, 32, 32);
        assert!((w[0] - 100.0).abs() <= 1e-9 && w[1].abs() <= 1e-4 && w[2].abs() <= 1e-4);
        let hsi = build_lut(Space::Hsi, 17).unwrap();
        for k in 0..17 {
            let v = hsi.node(k, k, k);
            assert_eq!((v[0], v[1]), (0.0, 0.0));
        }
        assert!(matches!(build_lut(Space::Lab, 10), Err(Error::UnsupportedGrid(10))));
    }

    #[test]
    fn lattice_values_are_exact() {
        for space in Space::ALL {
            let lut = build_lut(space, 9).unwrap();
            let s = lut.spacing();
            for (i, j, k) in [(0, 0, 0), (3, 5, 7), (8, 8, 8), (8, 0, 4)] {
                let want = exact_triple(space, [i as f64 * s, j as f64 * s, k as f64 * s]);
                assert_eq!(lut.node(i, j, k), want);
            }
        }
    }

    #[test]
    fn locate_upper_face() {
        let lut = build_lut(Space::Lab, 17).unwrap();
        let loc = lut.locate([255.0, 0.0, 127.5]);
        assert_eq!(loc.base, [15, 0, 8]);
        assert_eq!(loc.offset, [1.0, 0.0, 0.0]);
        let inner = lut.locate([200.0, 16.0, 1.0]);
        assert_eq!(inner.base, [12, 1, 0]);
        assert!(inner.offset.iter().all(|o| (0.0..1.0).contains(o)));
    }

    #[test]
    fn lattice_reproduction() {
        for space in Space::ALL {
            let lut = cached(space, 9);
            let s = lut.spacing();
            for i in 0..9 {
                for j in (0..9).step_by(2) {
                    for k in (0..9).step_by(3) {
                        let want = lut.node(i, j, k);
                        let at = [i as f64 * s, j as f64 * s, k as f64 * s];
                        for m in Method::ALL {
                            for v in VARIANTS {
                                let got = lut.interpolate_at(at, m, v).unwrap();
                                for c in 0..3 {
                                    let d = (got[c] - want[c]).abs();
                                    let d = if lut.angular_mask()[c] { d.min(TAU - d) } else { d };
                                    let defined = lut.angle_defined(&want, c) || !lut.angular_mask()[c];
                                    assert!(!defined || d <= 1e-12, "{space:?} {m:?} {v:?} {i} {j} {k} {c}");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn linear_destination_is_reproduced() {
        let lut = build_cache(Lut3D::from_fn(Space::Lab, 9, linear).unwrap());
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..2000 {
            let p = [rng.gen_range(0.0..=255.0), rng.gen_range(0.0..=255.0), rng.gen_range(0.0..=255.0)];
            let want = linear(p);
            for m in Method::ALL {
                for v in VARIANTS {
                    let got = lut.interpolate_at(p, m, v).unwrap();
                    for c in 0..3 {
                        assert!((got[c] - want[c]).abs() <= 1e-9, "{m:?} {v:?} {p:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn cache_matches_standard() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for space in Space::ALL {
            let lut = cached(space, 17);
            for _ in 0..20_000 {
                let p = RgbU8::new(rng.gen(), rng.gen(), rng.gen());
                for m in Method::ALL {
                    let a = lut.interpolate(p, m, Variant::Standard).unwrap();
                    let b = lut.interpolate(p, m, Variant::Caching).unwrap();
                    for c in 0..3 {
                        let d = (a[c] - b[c]).abs();
                        let d = if lut.angular_mask()[c] { d.min(TAU - d) } else { d };
                        assert!(d <= 1e-12, "{space:?} {m:?} {p:?} {a:?} {b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn cache_differences_consistent() {
        let lut = cached(Space::Lab, 9);
        for b in [[0, 0, 0], [3, 4, 5], [7, 7, 7]] {
            let v = |c: u8| lut.values[lut.corner_node(b, c)];
            for q in 0..3 {
                let d = lut.cached_differences(b, q).unwrap();
                assert!((d[0] - (v(R)[q] - v(0)[q])).abs() <= 1e-12);
                assert!((d[1] - (v(G)[q] - v(0)[q])).abs() <= 1e-12);
                assert!((d[2] - (v(B)[q] - v(0)[q])).abs() <= 1e-12);
                let rg = v(R | G)[q] - v(R)[q] - v(G)[q] + v(0)[q];
                assert!((d[3] - rg).abs() <= 1e-12);
            }
        }
        let flat = build_cache(Lut3D::from_fn(Space::Lab, 9, |_| [1.0, 2.0, 3.0]).unwrap());
        assert!(flat.cache.as_ref().unwrap().diffs.iter().all(|d| d.iter().all(|&x| x == 0.0)));
        let ramp = build_cache(Lut3D::from_fn(Space::Lab, 9, linear).unwrap());
        let first = ramp.cached_differences([0, 0, 0], 0).unwrap();
        for b in [[1, 2, 3], [7, 0, 7]] {
            let d = ramp.cached_differences(b, 0).unwrap();
            for t in 0..7 {
                assert!((d[t] - first[t]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn caching_requires_cache() {
        let lut = build_lut(Space::Lab, 9).unwrap();
        let p = RgbU8::new(1, 2, 3);
        assert!(matches!(lut.interpolate(p, Method::Prism, Variant::Caching), Err(Error::CacheMissing)));
    }

    #[test]
    fn neighbor_counts() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..10_000 {
            let d = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            for m in Method::ALL {
                let s = stencil(m, d);
                let mut corners: Vec<u8> = s.iter().map(|c| c.0).collect();
                corners.sort();
                corners.dedup();
                assert!(corners.len() <= m.neighbor_count());
                let total: f64 = s.iter().map(|c| c.1).sum();
                assert!((total - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn angular_lerp_examples() {
        assert!((angular_lerp(1.0, 1.0, 0.3) - 1.0).abs() <= 1e-15);
        let mid = angular_lerp(0.1, TAU - 0.1, 0.5);
        assert!(mid.min(TAU - mid) <= 1e-12);
        assert!((angular_lerp(0.4, 2.0, 0.0) - 0.4).abs() <= 1e-12);
        assert!((angular_lerp(0.4, 2.0, 1.0) - 2.0).abs() <= 1e-12);
        assert_eq!(angular_lerp(0.0, PI, 0.5), 0.0);
    }

    #[test]
    fn persistence_round_trip() {
        let lut = build_lut(Space::Sct, 9).unwrap();
        let mut buf = Vec::new();
        lut.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 20 + 729 * 24);
        assert_eq!(&buf[..4], b"MLUT");
        let back = Lut3D::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, lut);
        assert!(!back.has_cache());

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(Lut3D::read_from(bad.as_slice()), Err(Error::MalformedLut(_))));
        let short = &buf[..buf.len() - 1];
        assert!(matches!(Lut3D::read_from(short), Err(Error::MalformedLut(_))));
        let mut grid = buf.clone();
        grid[8..12].copy_from_slice(&10u32.to_le_bytes());
        assert!(matches!(Lut3D::read_from(grid.as_slice()), Err(Error::UnsupportedGrid(10))));
    }

    #[test]
    fn interpolated_hue_in_range() {
        let lut = cached(Space::Hsi, 9);
        for idx in (0..1u32 << 24).step_by(65_537) {
            let h = lut.interpolate(RgbU8::from_index(idx), Method::Trilinear, Variant::Caching).unwrap()[0];
            assert!((0.0..TAU).contains(&h));
        }
    }

    proptest! {
        #[test]
        fn angular_lerp_endpoints(t0 in 0.0..TAU, t1 in 0.0..TAU) {
            let a = angular_lerp(t0, t1, 0.0);
            let b = angular_lerp(t0, t1, 1.0);
            prop_assert!((a - t0).abs().min(TAU - (a - t0).abs()) <= 1e-12);
            prop_assert!((b - t1).abs().min(TAU - (b - t1).abs()) <= 1e-12);
        }

        #[test]
        fn angular_lerp_range(t0 in 0.0..TAU, t1 in 0.0..TAU, a in 0.0..=1.0f64) {
            let t = angular_lerp(t0, t1, a);
            prop_assert!((0.0..TAU).contains(&t));
        }
    }
}
