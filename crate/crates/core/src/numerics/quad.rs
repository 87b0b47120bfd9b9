//! Quadrature: globally adaptive 10/21-point Gauss–Kronrod over finite or
//! infinite intervals with user breakpoints, plus fixed Gauss–Hermite and
//! Gauss–Legendre rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::num::NonZeroUsize;

use gauss_quad::{GaussHermite, GaussLegendre};

use crate::error::{Error, Result};

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
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_175_231_265,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-10, rel: 1e-12, max_intervals: 2000 }
    }
}

impl Tolerance {
    pub fn abs(abs: f64) -> Self {
        Tolerance { abs, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Coordinate change mapping a reference segment t ∈ [t0, t1] onto x.
#[derive(Clone, Copy, Debug)]
enum Segment {
    Finite,
    /// x = a + t/(1−t), t ∈ [0, 1)
    Upper(f64),
    /// x = b − t/(1−t), t ∈ [0, 1)
    Lower(f64),
}

impl Segment {
    #[inline]
    fn map(self, t: f64) -> (f64, f64) {
        match self {
            Segment::Finite => (t, 1.0),
            Segment::Upper(a) => {
                let u = 1.0 - t;
                (a + t / u, 1.0 / (u * u))
            }
            Segment::Lower(b) => {
                let u = 1.0 - t;
                (b - t / u, 1.0 / (u * u))
            }
        }
    }
}

struct Piece {
    seg: Segment,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    splittable: bool,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        // Pieces that can no longer be split sort last.
        (self.splittable, self.error).partial_cmp(&(other.splittable, other.error)).unwrap_or(Ordering::Equal)
    }
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, seg: Segment, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let eval = |f: &mut F, t: f64| {
        let (x, jac) = seg.map(t);
        f(x) * jac
    };
    let fc = eval(f, c);
    let mut kron = fc * WGK[10];
    let mut gauss = 0.0;
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = eval(f, c - dx) + eval(f, c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// ∫_a^b f(x) dx with optional interior breakpoints. Either end may be
/// infinite. Breakpoints outside (a, b) are ignored.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Integral> {
    if !(a < b) {
        if a == b {
            return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
        }
        return Err(Error::Domain(format!("integration bounds out of order: [{a}, {b}]")));
    }
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b && x.is_finite()).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    if a.is_infinite() && b.is_infinite() && pts.is_empty() {
        pts.push(0.0);
    }
    let mut knots = vec![a];
    knots.extend(pts);
    knots.push(b);

    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (seg, t0, t1) = if lo.is_infinite() {
            (Segment::Lower(hi), 0.0, 1.0)
        } else if hi.is_infinite() {
            (Segment::Upper(lo), 0.0, 1.0)
        } else {
            (Segment::Finite, lo, hi)
        };
        let (value, error) = gk21(&mut f, seg, t0, t1);
        evals += 21;
        heap.push(Piece { seg, a: t0, b: t1, value, error, splittable: true });
    }

    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        let target = tol.abs.max(tol.rel * total.abs());
        if !total.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integral on [{a}, {b}]")));
        }
        if err <= target {
            return Ok(Integral { value: total, error: err, evaluations: evals });
        }
        let worst = heap.pop().expect("at least one piece");
        if !worst.splittable || heap.len() + 1 >= tol.max_intervals {
            return Err(Error::Quadrature(format!(
                "adaptive quadrature on [{a}, {b}] stalled at error {err:.3e} > {target:.3e} after {evals} evaluations"
            )));
        }
        let mid = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk21(&mut f, worst.seg, lo, hi);
            evals += 21;
            let width_ok = (hi - lo) > 64.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1e-300);
            heap.push(Piece { seg: worst.seg, a: lo, b: hi, value, error, splittable: width_ok });
        }
    }
}

/// Gauss–Hermite rule normalized for the standard normal: Σ wᵢ g(zᵢ) ≈ E g(Z).
#[derive(Clone, Debug)]
pub struct Hermite {
    nodes: Vec<(f64, f64)>,
}

impl Hermite {
    pub fn new(order: usize) -> Result<Self> {
        let n = NonZeroUsize::new(order).filter(|n| n.get() >= 3).ok_or_else(|| {
            Error::Domain(format!("Gauss-Hermite order must be at least 3, got {order}"))
        })?;
        let rule = GaussHermite::new(n);
        let scale = std::f64::consts::PI.sqrt();
        let nodes = rule.iter().map(|(x, w)| (std::f64::consts::SQRT_2 * x, w / scale)).collect();
        Ok(Hermite { nodes })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// E g(mean + √var·Z).
    pub fn expect<F: FnMut(f64) -> f64>(&self, mean: f64, var: f64, mut g: F) -> f64 {
        if var <= 0.0 {
            return g(mean);
        }
        let sd = var.sqrt();
        self.nodes.iter().map(|&(z, w)| w * g(mean + sd * z)).sum()
    }
}

/// Gauss–Legendre nodes and weights mapped onto [a, b].
pub fn legendre(order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order.max(1)).unwrap());
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    rule.iter().map(|(x, w)| (c + h * x, h * w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_rule_integrates_polynomials() {
        let mut f = |x: f64| x.powi(30) - 3.0 * x.powi(7) + 1.0;
        let (v, _) = gk21(&mut f, Segment::Finite, -1.0, 1.0);
        assert_relative_eq!(v, 2.0 / 31.0 + 2.0, max_relative = 1e-14);
        let mut g = |x: f64| x.powi(19);
        let (v, e) = gk21(&mut g, Segment::Finite, 0.0, 1.0);
        assert_relative_eq!(v, 0.05, max_relative = 1e-14);
        assert!(e < 1e-12);
    }

    #[test]
    fn infinite_ranges() {
        let r = integrate(|x| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, &[], Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, std::f64::consts::PI.sqrt(), max_relative = 1e-11);
        let r = integrate(|x| (-x).exp(), 2.0, f64::INFINITY, &[], Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, (-2.0f64).exp(), max_relative = 1e-11);
        let r = integrate(|x| 1.0 / (1.0 + x * x), f64::NEG_INFINITY, -1.0, &[], Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, std::f64::consts::FRAC_PI_4, max_relative = 1e-10);
    }

    #[test]
    fn breakpoints_handle_jumps_and_kinks() {
        let step = |x: f64| if x > 0.3 { 1.0 } else { 0.0 };
        let r = integrate(step, 0.0, 1.0, &[0.3], Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, 0.7, max_relative = 1e-13);
        let r = integrate(|x: f64| (x - 0.123).abs(), -1.0, 1.0, &[], Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, 0.5 * (1.123f64.powi(2) + 0.877f64.powi(2)), max_relative = 1e-9);
    }

    #[test]
    fn narrow_gaussian_far_from_origin() {
        let s = 1e-3;
        let dens = |x: f64| crate::numerics::gauss::normal_pdf(x, 2.5, s * s);
        let bp = [2.5 - 8.0 * s, 2.5, 2.5 + 8.0 * s];
        let r = integrate(dens, f64::NEG_INFINITY, f64::INFINITY, &bp, Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn hermite_moments() {
        let h = Hermite::new(61).unwrap();
        assert_relative_eq!(h.expect(0.0, 1.0, |_| 1.0), 1.0, max_relative = 1e-13);
        assert_relative_eq!(h.expect(0.0, 1.0, |z| z.powi(4)), 3.0, max_relative = 1e-12);
        assert_relative_eq!(h.expect(1.0, 4.0, |z| z * z), 5.0, max_relative = 1e-12);
        assert_relative_eq!(h.expect(0.0, 1.0, |z| z.cos()), (-0.5f64).exp(), max_relative = 1e-12);
        assert!(Hermite::new(2).is_err());
    }

    #[test]
    fn legendre_panel() {
        let s: f64 = legendre(8, 1.0, 3.0).iter().map(|(x, w)| w * x.powi(5)).sum();
        assert_relative_eq!(s, (3f64.powi(6) - 1.0) / 6.0, max_relative = 1e-13);
    }
}
