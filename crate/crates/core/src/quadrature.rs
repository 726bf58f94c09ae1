//! Adaptive Gauss–Kronrod quadrature on finite intervals.
//!
//! Uses the 10-point Gauss / 21-point Kronrod pair with the QUADPACK error
//! rescaling, and bisects the interval with the largest error estimate until
//! the global estimate meets `max(abs_tol, rel_tol * |I|)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
}

impl Integral {
    pub const ZERO: Integral = Integral { value: 0.0, abs_error: 0.0 };
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(self, rhs: Integral) -> Integral {
        Integral { value: self.value + rhs.value, abs_error: self.abs_error + rhs.abs_error }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 0.0, rel: 1e-12, max_subdivisions: 2000 }
    }
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self { rel, ..Self::default() }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One application of the 21-point Kronrod rule on `[a, b]`.
pub fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Integral {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_k = f_center * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let abs_half = half.abs();
    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut err = ((res_k - res_g) * half).abs();

    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }

    Integral { value, abs_error: err }
}

struct Segment {
    a: f64,
    b: f64,
    part: Integral,
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral::ZERO);
    }

    let first = gauss_kronrod_21(&f, a, b);
    let mut segments = vec![Segment { a, b, part: first }];
    let mut total = first;

    loop {
        if !total.value.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        let target = tol.abs.max(tol.rel * total.value.abs());
        if total.abs_error <= target {
            return Ok(total);
        }
        if segments.len() >= tol.max_subdivisions {
            // Rounding floor: the remaining error is at machine level for this integrand.
            if total.abs_error <= 1e3 * f64::EPSILON * segments_abs(&segments) {
                return Ok(total);
            }
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] after {} subdivisions (error {:e}, target {:e})",
                segments.len(),
                total.abs_error,
                target
            )));
        }

        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.part.abs_error.total_cmp(&y.1.part.abs_error))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval cannot be split further in floating point.
            return Ok(total);
        }
        let left = gauss_kronrod_21(&f, seg.a, mid);
        let right = gauss_kronrod_21(&f, mid, seg.b);

        total.value += left.value + right.value - seg.part.value;
        total.abs_error += left.abs_error + right.abs_error - seg.part.abs_error;
        segments.push(Segment { a: seg.a, b: mid, part: left });
        segments.push(Segment { a: mid, b: seg.b, part: right });

        // Resum periodically so the running totals do not drift.
        if segments.len() % 64 == 0 {
            total = segments.iter().fold(Integral::ZERO, |acc, s| acc + s.part);
        }
    }
}

fn segments_abs(segments: &[Segment]) -> f64 {
    segments.iter().map(|s| s.part.value.abs()).sum()
}

/// Integrates over consecutive pieces `[p0, p1], [p1, p2], ...`, splitting at every
/// breakpoint. Breakpoints must be ascending.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> Result<Integral> {
    let mut total = Integral::ZERO;
    for w in points.windows(2) {
        if w[1] > w[0] {
            total = total + integrate(&f, w[0], w[1], tol)?;
        }
    }
    Ok(total)
}
