//! Numerical quadrature helpers: globally adaptive Gauss–Kronrod (7/15)
//! and a fixed composite Gauss–Legendre rule for smooth integrands.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive G7/K15 integration of `f` over the union of the
/// consecutive intervals defined by `breakpoints` (sorted, at least two).
pub fn adaptive_gk<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult {
    let mut intervals: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let (v, e) = kronrod15(&f, w[0], w[1]);
            intervals.push((w[0], w[1], v, e));
        }
    }
    loop {
        let total: f64 = intervals.iter().map(|iv| iv.2).sum();
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        let target = abs_tol.max(rel_tol * total.abs());
        if err <= target {
            return QuadResult { value: total, error: err, converged: true };
        }
        if intervals.len() >= max_intervals {
            return QuadResult { value: total, error: err, converged: false };
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .expect("non-empty interval list");
        let (a, b, _, _) = intervals.swap_remove(idx);
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            return QuadResult { value: total, error: err, converged: false };
        }
        let (v1, e1) = kronrod15(&f, a, m);
        let (v2, e2) = kronrod15(&f, m, b);
        intervals.push((a, m, v1, e1));
        intervals.push((m, b, v2, e2));
    }
}

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss–Legendre rule with `panels` equal panels.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        let r = 0.5 * h;
        let mut s = 0.0;
        for j in 0..4 {
            s += GL8_W[j] * (f(c - r * GL8_X[j]) + f(c + r * GL8_X[j]));
        }
        total += s * r;
    }
    total
}
