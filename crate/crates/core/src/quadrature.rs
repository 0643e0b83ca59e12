//! Gauss–Legendre rules and globally adaptive Gauss–Kronrod (7/15) integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

/// Tolerances and limits for the shot-noise integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePolicy {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub radial_truncation: RadialTruncation,
    pub max_subdivisions: usize,
}

/// How the radial integrals handle `[R*, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialTruncation {
    /// Map the tail onto a finite interval and integrate it.
    Adaptive,
    /// Integrate to the given radius and add the leading-order tail analytically.
    Fixed(f64),
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            radial_truncation: RadialTruncation::Adaptive,
            max_subdivisions: 4000,
        }
    }
}

impl QuadraturePolicy {
    pub fn is_valid(&self) -> bool {
        self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.max_subdivisions >= 1
            && match self.radial_truncation {
                RadialTruncation::Adaptive => true,
                RadialTruncation::Fixed(r) => r > 0.0,
            }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Abscissae in `[-1, 1]` and weights of an `n`-point Gauss–Legendre rule.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

pub(crate) const GL_MIN_LEVEL: usize = 4; // 16 points
pub(crate) const GL_MAX_LEVEL: usize = 12; // 4096 points

/// Cached rule with `2^level` points.
pub(crate) fn gauss_legendre(level: usize) -> &'static GaussLegendre {
    static RULES: [OnceLock<GaussLegendre>; GL_MAX_LEVEL + 1] =
        [const { OnceLock::new() }; GL_MAX_LEVEL + 1];
    RULES[level].get_or_init(|| GaussLegendre::new(1 << level))
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod panel with the QUADPACK error heuristic.
pub(crate) fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
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
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let eps = 50.0 * f64::EPSILON;
    if res_abs > f64::MIN_POSITIVE / eps {
        err = err.max(eps * res_abs);
    }
    Estimate {
        value: result,
        error: err,
    }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.est.error.total_cmp(&o.est.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.est.error.total_cmp(&o.est.error)
    }
}

/// Globally adaptive integration over the consecutive intervals defined by
/// `breaks` (at least two strictly increasing points). On failure the partial
/// estimate is returned in `Err`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Estimate, Estimate> {
    debug_assert!(breaks.len() >= 2);
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(Panel {
                a: w[0],
                b: w[1],
                est: gk15(&mut f, w[0], w[1]),
            });
        }
    }
    let totals = |heap: &BinaryHeap<Panel>| {
        let mut v = crate::montecarlo::NeumaierSum::default();
        let mut e = 0.0;
        for p in heap.iter() {
            v.add(p.est.value);
            e += p.est.error;
        }
        Estimate {
            value: v.total(),
            error: e,
        }
    };
    let mut subdivisions = heap.len();
    loop {
        let t = totals(&heap);
        if t.error <= abs_tol.max(rel_tol * t.value.abs()) {
            return Ok(t);
        }
        if subdivisions >= max_subdivisions {
            return Err(t);
        }
        let Some(worst) = heap.pop() else {
            return Ok(t);
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval below floating-point resolution; accept what we have.
            heap.push(worst);
            return Err(totals(&heap));
        }
        heap.push(Panel {
            a: worst.a,
            b: mid,
            est: gk15(&mut f, worst.a, mid),
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            est: gk15(&mut f, mid, worst.b),
        });
        subdivisions += 1;
    }
}
