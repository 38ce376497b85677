//! Published minimax coefficient sets.
//!
//! Every row is stored with its coefficients exactly as printed (seven
//! significant digits) together with the interval the approximant was fitted
//! on and its printed maximum absolute error.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::poly::{Form, Polynomial, Rational};

/// Elementary function an approximant stands in for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetFn {
    /// `x^(1/3)`.
    Cbrt,
    /// `arctan(sqrt(3) x)`, the Kender hue kernel.
    AtanSqrt3,
    /// `2 arcsin(y / sqrt(2))`, i.e. `arccos(1 - y^2)`, on `[0, 1/sqrt(2)]`.
    AsinHalf,
    /// `arccos(x)` on `[0, 1/2]`.
    AcosHalf,
    /// `arctan(x)` for `x = G/R < 1`.
    AtanF,
    /// `pi/2 - arctan(t)` for `t = R/G <= 1`.
    AtanG,
}

impl TargetFn {
    pub const ALL: [TargetFn; 6] =
        [TargetFn::Cbrt, TargetFn::AtanSqrt3, TargetFn::AsinHalf, TargetFn::AcosHalf, TargetFn::AtanF, TargetFn::AtanG];

    /// Reference (libm) value of the target function.
    pub fn exact(self, x: f64) -> f64 {
        match self {
            TargetFn::Cbrt => x.cbrt(),
            TargetFn::AtanSqrt3 => (3f64.sqrt() * x).atan(),
            TargetFn::AsinHalf => 2.0 * (x * FRAC_1_SQRT_2).asin(),
            TargetFn::AcosHalf => x.acos(),
            TargetFn::AtanF => x.atan(),
            TargetFn::AtanG => FRAC_PI_2 - x.atan(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TargetFn::Cbrt => "cbrt",
            TargetFn::AtanSqrt3 => "atan-sqrt3",
            TargetFn::AsinHalf => "asin-half",
            TargetFn::AcosHalf => "acos-half",
            TargetFn::AtanF => "atan-f",
            TargetFn::AtanG => "atan-g",
        }
    }

    pub fn from_name(s: &str) -> Option<TargetFn> {
        TargetFn::ALL.into_iter().find(|t| t.name() == s)
    }
}

/// A minimax approximant with its certified domain and error.
#[derive(Debug, Clone, PartialEq)]
pub struct Approximant {
    pub form: Form,
    pub interval: (f64, f64),
    pub eps_max: f64,
    pub target: TargetFn,
}

impl Approximant {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.form.eval(x)
    }

    pub fn degrees(&self) -> (usize, Option<usize>) {
        self.form.degrees()
    }

    /// Maximum absolute error against the target on a uniform grid of
    /// `points` abscissae spanning the interval.
    pub fn measured_max_error(&self, points: usize) -> f64 {
        let (lo, hi) = self.interval;
        let last = (points.max(2) - 1) as f64;
        (0..points.max(2))
            .map(|k| {
                let x = lo + (hi - lo) * (k as f64 / last);
                (self.eval(x) - self.target.exact(x)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Interval of the published cube-root polynomials (Table 1 style rows).
pub const CBRT_POLY_INTERVAL: (f64, f64) = (0.0, 1.0);
/// Interval of the published cube-root rationals: the cube-root branch of the
/// CIELAB companding function.
pub const CBRT_RATIONAL_INTERVAL: (f64, f64) = (0.008856, 1.0);
/// Largest Kender argument magnitude produced by a hue-bearing 8-bit pixel in
/// the first case of the case analysis.
pub const ATAN_SQRT3_INTERVAL: (f64, f64) = (0.0, 254.0 / 256.0);
pub const ASIN_HALF_INTERVAL: (f64, f64) = (0.0, FRAC_1_SQRT_2);
pub const ACOS_HALF_INTERVAL: (f64, f64) = (0.0, 0.5);
pub const ATAN_F_INTERVAL: (f64, f64) = (0.0, 254.0 / 255.0);
pub const ATAN_G_INTERVAL: (f64, f64) = (1.0 / 255.0, 1.0);

struct Row {
    target: TargetFn,
    eps: f64,
    num: &'static [f64],
    den: Option<&'static [f64]>,
}

const fn poly(target: TargetFn, eps: f64, num: &'static [f64]) -> Row {
    Row { target, eps, num, den: None }
}

const fn rat(eps: f64, num: &'static [f64], den: &'static [f64]) -> Row {
    Row { target: TargetFn::Cbrt, eps, num, den: Some(den) }
}

use TargetFn::*;

#[rustfmt::skip]
const ROWS: &[Row] = &[
    // Cube root, polynomials on [0, 1].
    poly(Cbrt, 1.271154e-01, &[1.268979e-01, 2.393873, -1.647669]),
    poly(Cbrt, 9.787829e-02, &[9.787826e-02, 4.057495, -7.388864, 4.331370]),
    poly(Cbrt, 8.111150e-02, &[8.111133e-02, 5.926004, -2.017165e+01, 2.833070e+01, -1.324728e+01]),
    poly(Cbrt, 7.002956e-02, &[7.002910e-02, 7.961214, -4.329352e+01, 1.063182e+02, -1.135685e+02, 4.358268e+01]),
    // Cube root, rationals on [0.008856, 1].
    rat(2.060996e-03, &[6.309655e-03, 5.785782e-01, 1.591005],
                      &[4.482646e-02, 1.175862, 9.596879e-01]),
    rat(7.210231e-04, &[2.500705e-03, 3.447113e-01, 1.942708],
                      &[1.978701e-02, 8.542797e-01, 1.664540, -2.503267e-01]),
    rat(5.931593e-04, &[1.776519e-03, 2.632323e-01, 1.751297, 3.836709e-01],
                      &[1.432256e-02, 6.779998e-01, 1.706260]),
    rat(3.107735e-04, &[1.317899e-03, 2.390113e-01, 2.099395],
                      &[1.124254e-02, 6.726679e-01, 2.184656, -7.511150e-01, 2.229717e-01]),
    rat(1.858694e-04, &[4.370889e-04, 9.526952e-02, 1.252009, 1.302733],
                      &[3.912364e-03, 2.954084e-01, 1.717143, 6.343408e-01]),
    rat(2.334688e-04, &[7.589302e-04, 1.519784e-01, 1.663584, 8.368075e-01, -1.657269e-01],
                      &[6.644723e-03, 4.506424e-01, 2.030622]),
    rat(8.539863e-05, &[1.683667e-04, 4.667675e-02, 9.106812e-01, 1.810577],
                      &[1.610864e-03, 1.617974e-01, 1.494070, 1.218468, -1.079451e-01]),
    rat(8.052920e-05, &[1.349673e-04, 3.832079e-02, 7.870174e-01, 1.799062, 2.071170e-01],
                      &[1.299250e-03, 1.345420e-01, 1.330358, 1.365369]),
    rat(3.856930e-05, &[3.927283e-05, 1.392318e-02, 4.114739e-01, 1.734853, 8.679223e-01],
                      &[4.022100e-04, 5.414536e-02, 8.221526e-01, 1.800167, 3.513617e-01]),
    // arctan(sqrt(3) x). The printed quadratic term of the n = 2 row has its
    // sign dropped; the fitted value is negative.
    poly(AtanSqrt3, 6.907910e-03, &[5.959793e-03, 1.782975, -7.497879e-01]),
    poly(AtanSqrt3, 3.654156e-03, &[-3.654076e-03, 1.884080, -9.805583e-01, 1.430580e-01]),
    poly(AtanSqrt3, 1.286371e-03, &[-1.286369e-03, 1.796716, -4.958969e-01, -6.927404e-01, 4.421541e-01]),
    poly(AtanSqrt3, 1.801311e-04, &[-1.801283e-04, 1.739333, -2.039848e-02, -2.065512, 2.052837, -6.591729e-01]),
    // 2 asin(y / sqrt 2).
    poly(AsinHalf, 2.097814e-05, &[2.097797e-05, 1.412840, 1.429881e-02, 6.704361e-02, 6.909677e-02]),
    poly(AsinHalf, 2.370540e-06, &[-2.370048e-06, 1.414434, -3.300037e-03, 1.354670e-01, -3.994259e-02, 6.099502e-02]),
    // arccos on [0, 0.5].
    poly(AcosHalf, 1.048949e-05, &[1.570786, -9.990285e-01, -1.429899e-02, -9.481335e-02, -1.381942e-01]),
    poly(AcosHalf, 1.186403e-06, &[1.570798, -1.000156, 3.299810e-03, -1.915780e-01, 7.988231e-02, -1.725177e-01]),
    // arctan on [0, 254/255].
    poly(AtanF, 1.036515e-04, &[-1.036508e-04, 1.003740, -1.773538e-02, -3.390563e-01, 1.386796e-01]),
    poly(AtanF, 2.073939e-05, &[2.073866e-05, 9.982666e-01, 2.352573e-02, -4.506862e-01, 2.635050e-01, -4.920822e-02]),
    // pi/2 - arctan on [1/255, 1].
    poly(AtanG, 1.051643e-04, &[1.570917, -1.004004, 1.885694e-02, 3.373159e-01, -1.377930e-01]),
    poly(AtanG, 2.012104e-05, &[1.570769, -9.981253e-01, -2.440212e-02, 4.528921e-01, -2.659181e-01, 5.016228e-02]),
];

fn interval_of(target: TargetFn, rational: bool) -> (f64, f64) {
    match target {
        Cbrt if rational => CBRT_RATIONAL_INTERVAL,
        Cbrt => CBRT_POLY_INTERVAL,
        AtanSqrt3 => ATAN_SQRT3_INTERVAL,
        AsinHalf => ASIN_HALF_INTERVAL,
        AcosHalf => ACOS_HALF_INTERVAL,
        AtanF => ATAN_F_INTERVAL,
        AtanG => ATAN_G_INTERVAL,
    }
}

fn build(row: &Row) -> Approximant {
    let num = Polynomial::new(row.num.to_vec());
    let form = match row.den {
        Some(den) => Form::Rational(Rational::new(num, Polynomial::new(den.to_vec()))),
        None => Form::Polynomial(num),
    };
    Approximant { form, interval: interval_of(row.target, row.den.is_some()), eps_max: row.eps, target: row.target }
}

/// All published approximants, in table order.
pub fn entries() -> &'static [Approximant] {
    static ENTRIES: OnceLock<Vec<Approximant>> = OnceLock::new();
    ENTRIES.get_or_init(|| ROWS.iter().map(build).collect())
}

/// Looks up the published approximant for `target` with numerator degree `n`
/// and, for rationals, denominator degree `m`.
pub fn registry_get(target: TargetFn, n: usize, m: Option<usize>) -> Result<&'static Approximant> {
    entries()
        .iter()
        .find(|a| a.target == target && a.degrees() == (n, m))
        .ok_or(Error::UnknownApproximant { target, degrees: (n, m) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn lookup_examples() {
        let a = registry_get(Cbrt, 3, Some(3)).unwrap();
        assert!(matches!(a.form, Form::Rational(_)));
        assert_eq!(a.eps_max, 1.858694e-04);

        let a = registry_get(AsinHalf, 5, None).unwrap();
        assert!(matches!(a.form, Form::Polynomial(_)));
        assert_eq!(a.eps_max, 2.370540e-06);

        let a = registry_get(AtanG, 4, None).unwrap();
        match &a.form {
            Form::Polynomial(p) => assert_eq!(p.coeffs()[0], 1.570917),
            _ => panic!("expected polynomial"),
        }
    }

    #[test]
    fn unknown_rows_rejected() {
        assert!(matches!(registry_get(Cbrt, 5, Some(5)), Err(Error::UnknownApproximant { .. })));
        assert!(registry_get(AtanF, 3, None).is_err());
        assert!(registry_get(AtanSqrt3, 5, Some(1)).is_err());
    }

    #[test]
    fn atan_sqrt3_at_one() {
        let a = registry_get(AtanSqrt3, 5, None).unwrap();
        assert!((a.eval(1.0) - PI / 3.0).abs() <= 1.801311e-04 * 1.7);
        // Inside the fitted interval the printed bound holds.
        let x = ATAN_SQRT3_INTERVAL.1;
        assert!((a.eval(x) - AtanSqrt3.exact(x)).abs() <= 1.05 * 1.801311e-04);
    }

    #[test]
    fn rational_examples() {
        let a = registry_get(Cbrt, 2, Some(2)).unwrap();
        let expected = (6.309655e-03 + 5.785782e-01 + 1.591005) / (4.482646e-02 + 1.175862 + 9.596879e-01);
        assert!((a.eval(1.0) - expected).abs() < 1e-15);
        assert!((a.eval(1.0) - 1.0).abs() <= 2.060996e-03);

        let a = registry_get(Cbrt, 4, Some(4)).unwrap();
        let x: f64 = 0.008856;
        assert!((a.eval(x) - x.cbrt()).abs() <= 3.856930e-05 * 1.0001);
    }

    #[test]
    fn denominators_have_no_roots_on_interval() {
        for a in entries() {
            if let Form::Rational(r) = &a.form {
                let (lo, hi) = a.interval;
                for k in 0..=10_000 {
                    let x = lo + (hi - lo) * k as f64 / 10_000.0;
                    assert!(r.denominator.eval(x) > 0.0);
                }
            }
        }
    }

    #[test]
    fn intervals_are_proper() {
        assert_eq!(entries().len(), 25);
        for a in entries() {
            assert!(a.interval.0 < a.interval.1);
            assert!(a.eps_max > 0.0);
        }
    }

    #[test]
    fn target_names_round_trip() {
        for t in TargetFn::ALL {
            assert_eq!(TargetFn::from_name(t.name()), Some(t));
        }
    }
}
