//! Gauss–Kronrod quadrature and a safeguarded monotone root finder.

use crate::scalar::Real;

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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 4000;

/// One 15-point Kronrod panel; returns (estimate, error estimate).
///
/// The error estimate uses the QUADPACK scaling of |K15 − G7|.
fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let c = half * (a + b);
    let r = half * (b - a);
    let mut vals = [T::zero(); 15];
    vals[14] = f(c);
    let mut kron = vals[14] * T::lit(WGK[7]);
    let mut gauss = vals[14] * T::lit(WG[3]);
    for j in 0..7 {
        let dx = r * T::lit(XGK[j]);
        vals[2 * j] = f(c - dx);
        vals[2 * j + 1] = f(c + dx);
        let s = vals[2 * j] + vals[2 * j + 1];
        kron += T::lit(WGK[j]) * s;
        if j % 2 == 1 {
            gauss += T::lit(WG[j / 2]) * s;
        }
    }
    let mean = kron * half;
    let mut asc = T::lit(WGK[7]) * (vals[14] - mean).abs();
    for j in 0..7 {
        asc += T::lit(WGK[j]) * ((vals[2 * j] - mean).abs() + (vals[2 * j + 1] - mean).abs());
    }
    let asc = asc * r.abs();
    let mut err = ((kron - gauss) * r).abs();
    if asc > T::zero() && err > T::zero() {
        let ratio = T::lit(200.0) * err / asc;
        err = asc * ratio.powf(T::lit(1.5)).min(T::one());
    }
    (kron * r, err)
}

/// Globally adaptive Gauss–Kronrod integral of `f` over `[a, b]`.
///
/// Refines the panel with the largest error estimate until the total estimate
/// drops below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, abs_tol: T, rel_tol: T) -> T {
    if a == b {
        return T::zero();
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut panels: Vec<(T, T, T, T)> = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) && panels.len() < MAX_INTERVALS {
        let (k, _) = panels
            .iter()
            .enumerate()
            .fold((0, -T::one()), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (pa, pb, pv, pe) = panels.swap_remove(k);
        let mid = T::lit(0.5) * (pa + pb);
        if mid <= pa || mid >= pb {
            panels.push((pa, pb, pv, T::zero()));
            err -= pe;
            continue;
        }
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
    // re-sum to shed the drift of the running update
    panels.iter().map(|p| p.2).sum()
}

/// Adaptive integral with the crate's default tolerances.
pub fn integrate_default<T: Real, F: FnMut(T) -> T>(f: F, a: T, b: T) -> T {
    integrate(f, a, b, T::min_positive_value(), T::quad_rel_tol())
}

/// Adaptive integral over `[a, b]` split at the given interior breakpoints.
pub fn integrate_with_breaks<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, breaks: &[T]) -> T {
    let mut acc = T::zero();
    let mut lo = a;
    for &bp in breaks.iter().filter(|&&bp| bp > a && bp < b) {
        acc += integrate_default(&mut f, lo, bp);
        lo = bp;
    }
    acc + integrate_default(&mut f, lo, b)
}

/// Fixed 7-point Gauss–Legendre rule on `[a, b]` split into `panels` pieces.
pub fn gauss7<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, panels: usize) -> T {
    let n = panels.max(1);
    let w = (b - a) / T::from_count(n);
    let half = T::lit(0.5) * w;
    let mut acc = T::zero();
    for k in 0..n {
        let c = a + w * (T::from_count(k) + T::lit(0.5));
        let mut s = T::lit(WG[3]) * f(c);
        for j in 0..3 {
            let dx = half * T::lit(XGK[2 * j + 1]);
            s += T::lit(WG[j]) * (f(c - dx) + f(c + dx));
        }
        acc += s * half;
    }
    acc
}

/// Root of an increasing function on `[lo, hi]` by Newton steps guarded by bisection.
///
/// `f` returns `(value, derivative)`; the bracket must satisfy `f(lo) ≤ 0 ≤ f(hi)`.
pub fn newton_bisect<T: Real, F: FnMut(T) -> (T, T)>(mut f: F, mut lo: T, mut hi: T, x0: T, tol: T) -> T {
    let two = T::lit(2.0);
    let mut x = if x0 > lo && x0 < hi { x0 } else { (lo + hi) / two };
    for _ in 0..200 {
        let (v, d) = f(x);
        if v == T::zero() {
            return x;
        }
        if v < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - v / d;
        if !(next > lo && next < hi) || !d.is_finite() || d <= T::zero() {
            next = (lo + hi) / two;
        }
        let step = (next - x).abs();
        x = next;
        if step <= tol.max(T::epsilon() * x.abs()) || hi - lo <= T::epsilon() * hi.abs().max(T::one()) {
            break;
        }
    }
    x
}
