//! Post-solve checks of the qualitative theory on a computed minimizer.
//!
//! Every verdict carries the raw quantity it was derived from, so thresholds can
//! be re-audited from the serialized report.

use std::fmt;

use serde::Serialize;

use crate::energy::{euler_substitution, GridFunction, ShapeFunction};
use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::solver::{default_coincidence_threshold, Obstacle};

/// Relative tolerance for plateau detection in the slope function `m`.
pub const PLATEAU_TOLERANCE: f64 = 1e-2;

/// Residual bound for the natural boundary conditions.
pub const BC_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, Serialize)]
pub struct Concavity<T> {
    pub concave: bool,
    /// `max_i u″_i` over interior nodes; positive values are violations.
    pub max_second_quotient: T,
    pub tolerance: T,
}

/// Interior second quotients `≤ 10⁻¹⁰·N²`.
pub fn check_concavity<T: Real>(u: &GridFunction<T>) -> Concavity<T> {
    let nn = T::from_count(u.n());
    check_concavity_with(u, T::lit(1e-10) * nn * nn)
}

pub fn check_concavity_with<T: Real>(u: &GridFunction<T>, tolerance: T) -> Concavity<T> {
    let q = u.second_quotients();
    let max_second_quotient = q.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
    Concavity { concave: max_second_quotient <= tolerance, max_second_quotient, tolerance }
}

#[derive(Debug, Clone, Serialize)]
pub struct Nondegeneracy<T> {
    pub nondegenerate: bool,
    /// `min_i (−u″_i)` over interior nodes.
    pub min_curvature: T,
    pub zero_tolerance: T,
    /// Runs `[first, last]` of at least two consecutive interior nodes with `|u″| ≤ zero_tolerance`.
    pub flat_cores: Vec<(usize, usize)>,
}

/// `−u″ > 0` at every interior node, with near-zero runs reported as flat cores.
///
/// "Zero" means below `max(10⁻⁹·max|u″|, 8ε_mach‖u‖_∞/h²)`.
pub fn check_nondegeneracy<T: Real>(u: &GridFunction<T>) -> Nondegeneracy<T> {
    let q = u.second_quotients();
    let h = u.h();
    let peak = q.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let zero_tolerance = (T::lit(1e-9) * peak).max(T::lit(8.0) * T::epsilon() * u.sup_norm() / (h * h));
    let min_curvature = q.iter().fold(T::infinity(), |m, &v| m.min(-v));
    let mut flat_cores = Vec::new();
    let mut start = None;
    for (k, &v) in q.iter().enumerate() {
        let node = k + 1;
        if v.abs() <= zero_tolerance {
            start.get_or_insert(node);
        } else if let Some(s) = start.take() {
            if node - s >= 2 {
                flat_cores.push((s, node - 1));
            }
        }
    }
    if let Some(s) = start {
        if u.n() - s >= 2 {
            flat_cores.push((s, u.n() - 1));
        }
    }
    Nondegeneracy { nondegenerate: min_curvature > zero_tolerance && flat_cores.is_empty(), min_curvature, zero_tolerance, flat_cores }
}

#[derive(Debug, Clone, Serialize)]
pub struct NaturalBc<T> {
    /// `u″` at the endpoints, from the extrapolated `w` through `w = −pĠ(u′)^{p−1}|u″|^{p−2}u″`.
    pub u2_left: T,
    pub u2_right: T,
    pub w_left: T,
    pub w_right: T,
    /// `u″` at the endpoints fitted directly to the second quotients; accurate on
    /// sampled smooth functions, but it inherits the boundary layer of discrete minimizers.
    pub u2_quotient_left: T,
    pub u2_quotient_right: T,
}

impl<T: Real> NaturalBc<T> {
    pub fn max_abs(&self) -> T {
        self.u2_left.abs().max(self.u2_right.abs()).max(self.w_left.abs()).max(self.w_right.abs())
    }

    pub fn passes(&self) -> bool {
        self.max_abs() < T::lit(BC_TOLERANCE)
    }
}

/// Second difference at node `k` of `x^{γ+2}/((γ+1)(γ+2))`, whose second derivative is `x^γ`.
fn power_quotient<T: Real>(gamma: T, k: usize, h: T) -> T {
    let e = gamma + T::lit(2.0);
    let kk = T::from_count(k);
    let s = (kk + T::one()).powf(e) - T::lit(2.0) * kk.powf(e) + (kk - T::one()).powf(e);
    h.powf(gamma) * s / ((gamma + T::one()) * e)
}

/// First coefficient of the square system `Σ_j rows[r][j]·c_j = rhs[r]`.
fn leading_coefficient<T: Real, const K: usize>(mut rows: [[T; K]; K], mut rhs: [T; K]) -> T {
    for c in 0..K {
        let piv = (c..K)
            .max_by(|&i, &j| rows[i][c].abs().partial_cmp(&rows[j][c].abs()).unwrap_or(core::cmp::Ordering::Equal))
            .unwrap_or(c);
        rows.swap(c, piv);
        rhs.swap(c, piv);
        for r in 0..K {
            if r != c && rows[c][c] != T::zero() {
                let f = rows[r][c] / rows[c][c];
                for k in c..K {
                    let v = rows[c][k];
                    rows[r][k] -= f * v;
                }
                let v = rhs[c];
                rhs[r] -= f * v;
            }
        }
    }
    rhs[0] / rows[0][0]
}

/// `A` in `u″ ≈ A + Bx^β + Cx^{β+1}` matched to the second quotients at the first
/// three nodes, using exact second differences of each term.
fn singular_extrapolate<T: Real>(q: [T; 3], beta: T, h: T) -> T {
    let mut rows = [[T::zero(); 3]; 3];
    for (r, row) in rows.iter_mut().enumerate() {
        *row = [T::one(), power_quotient(beta, r + 1, h), power_quotient(beta + T::one(), r + 1, h)];
    }
    leading_coefficient(rows, q)
}

/// `A` in `w ≈ A + ax + bx² + cx^{2+β}` through the first four nodes; the last term
/// enters through `Ġ(u′)` since `u′ − u′(0) ~ x^{1+β}`.
fn w_extrapolate<T: Real>(w: [T; 4], beta: T) -> T {
    let mut rows = [[T::zero(); 4]; 4];
    for (r, row) in rows.iter_mut().enumerate() {
        // work in units of h so the columns stay comparable
        let k = T::from_count(r + 1);
        *row = [T::one(), k, k * k, k.powf(T::lit(2.0) + beta)];
    }
    leading_coefficient(rows, w)
}

/// Endpoint values of `u″` and of Euler's substitution `w`.
///
/// With `β = 1/(p−1)`, `w` is extrapolated from the first four interior nodes in
/// the basis `1, x, x², x^{2+β}` and `u″` follows from it with `Ġ` at the
/// extrapolated slope. The direct fit of the quotients uses `A + Bx^β + Cx^{β+1}`
/// since `u″ ~ x^β`.
pub fn check_natural_bc<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, p: T, u: &GridFunction<T>) -> Result<NaturalBc<T>> {
    let n = u.n();
    if n < 8 {
        return domain("natural boundary checks need at least 8 cells");
    }
    let q = u.second_quotients();
    let w = euler_substitution(g, p, u);
    let d = u.slopes();
    let beta = (p - T::one()).recip();
    let h = u.h();
    let m = q.len();
    let w_left = w_extrapolate([w[1], w[2], w[3], w[4]], beta);
    let w_right = w_extrapolate([w[n - 1], w[n - 2], w[n - 3], w[n - 4]], beta);
    let half = T::lit(0.5);
    let from_w = |wv: T, slope: T| {
        let a = p * g.g_dot(slope).powf(p - T::one());
        -wv.signum() * (wv.abs() / a).powf(beta)
    };
    let u2_left = from_w(w_left, half * (T::lit(3.0) * d[0] - d[1]));
    let u2_right = from_w(w_right, half * (T::lit(3.0) * d[n - 1] - d[n - 2]));
    Ok(NaturalBc {
        u2_left,
        u2_right,
        w_left,
        w_right,
        u2_quotient_left: singular_extrapolate([q[0], q[1], q[2]], beta, h),
        u2_quotient_right: singular_extrapolate([q[m - 1], q[m - 2], q[m - 3]], beta, h),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Plateaus<T> {
    /// Node where `m` drops.
    pub jump_node: usize,
    pub left: T,
    pub right: T,
    /// Largest deviation from the plateau values, relative to `|left − right|`,
    /// ignoring two midpoints on each side of the jump.
    pub spread: T,
    pub two_plateau: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeFunction<T> {
    /// `m_{j+1/2} = Ġ(u′_{j+1/2})(w_{j+1} − w_j)/h`, `j = 0..N−1`.
    pub m: Vec<T>,
    /// Largest increase `m_{j+1/2} − m_{j−1/2}`.
    pub max_increase: T,
    pub nonincreasing: bool,
    pub plateaus: Option<Plateaus<T>>,
    pub tolerance: T,
}

/// The slope function `m = aw′` at the midpoints.
///
/// With `w_0 = w_N = 0` the discrete gradient is exactly `m_{k−1/2} − m_{k+1/2}`,
/// so `m` is constant across free nodes and drops by the multiplier at contacts.
pub fn slope_function_m<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, p: T, u: &GridFunction<T>) -> SlopeFunction<T> {
    let n = u.n();
    let h = u.h();
    let d = u.slopes();
    let w = euler_substitution(g, p, u);
    let m: Vec<T> = (0..n).map(|j| g.g_dot(d[j]) * (w[j + 1] - w[j]) / h).collect();
    let tolerance = T::lit(PLATEAU_TOLERANCE);
    let scale = m.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let max_increase = m.windows(2).fold(T::zero(), |a, v| a.max(v[1] - v[0]));
    let nonincreasing = max_increase <= tolerance * scale;
    let plateaus = plateaus(&m, tolerance);
    SlopeFunction { m, max_increase, nonincreasing, plateaus, tolerance }
}

fn plateaus<T: Real>(m: &[T], tolerance: T) -> Option<Plateaus<T>> {
    let (j, drop) = m.windows(2).enumerate().fold((0, T::zero()), |(bj, bd), (j, v)| {
        let dd = v[0] - v[1];
        if dd > bd { (j, dd) } else { (bj, bd) }
    });
    if !(drop > T::zero()) {
        return None;
    }
    let margin = 2;
    let left_part = &m[..(j + 1).saturating_sub(margin)];
    let right_part = &m[(j + 1 + margin).min(m.len())..];
    if left_part.is_empty() || right_part.is_empty() {
        return None;
    }
    let mean = |s: &[T]| s.iter().copied().sum::<T>() / T::from_count(s.len());
    let (left, right) = (mean(left_part), mean(right_part));
    let jump = (left - right).abs();
    let dev = |s: &[T], c: T| s.iter().fold(T::zero(), |a, &v| a.max((v - c).abs()));
    let spread = dev(left_part, left).max(dev(right_part, right)) / jump;
    Some(Plateaus { jump_node: j + 1, left, right, spread, two_plateau: spread <= tolerance })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit<T> {
    /// Least-squares slope of `log|u‴|` against `log x`.
    pub slope: T,
    /// `(2 − p)/(p − 1)` for `p > 2`, `0` otherwise.
    pub expected: T,
    pub r_squared: T,
    pub points: usize,
    /// `max|u‴|` over the fit window.
    pub max_third: T,
    /// `min w/x` and `max w/x` over the fit window.
    pub w_pinch: (T, T),
}

/// Third differences `(u_{j+2} − 3u_{j+1} + 3u_j − u_{j−1})/h³` at `x_{j+1/2}`.
pub fn third_differences<T: Real>(u: &GridFunction<T>) -> Vec<(T, T)> {
    let v = u.values();
    let h = u.h();
    let h3 = h * h * h;
    let three = T::lit(3.0);
    (1..u.n() - 1)
        .map(|j| {
            let x = (T::from_count(j) + T::lit(0.5)) * h;
            (x, (v[j + 2] - three * v[j + 1] + three * v[j] - v[j - 1]) / h3)
        })
        .collect()
}

/// Fits the growth of `|u‴|` near `x = 0` over `x ∈ [2.5h, 0.05]`.
pub fn boundary_exponent_fit<T: Real, G: ShapeFunction<T> + ?Sized>(g: &G, p: T, u: &GridFunction<T>) -> Result<ExponentFit<T>> {
    let h = u.h();
    let upper = T::lit(0.05);
    let lower = T::lit(2.5) * h;
    let pts: Vec<(T, T)> = third_differences(u)
        .into_iter()
        .filter(|&(x, t)| x >= lower - h * T::lit(1e-9) && x <= upper && t != T::zero())
        .map(|(x, t)| (x.ln(), t.abs()))
        .collect();
    if pts.len() < 5 {
        return domain(format!("the fit window holds {} points; refine the grid", pts.len()));
    }
    let k = T::from_count(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / k;
    let my = pts.iter().map(|p| p.1.ln()).sum::<T>() / k;
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum::<T>();
    let slope = sxy / sxx;
    let ss_tot = pts.iter().map(|p| (p.1.ln() - my) * (p.1.ln() - my)).sum::<T>();
    let ss_res = pts.iter().map(|p| { let r = p.1.ln() - my - slope * (p.0 - mx); r * r }).sum::<T>();
    let r_squared = if ss_tot > T::zero() { T::one() - ss_res / ss_tot } else { T::one() };
    let max_third = pts.iter().fold(T::zero(), |a, p| a.max(p.1));
    let expected = if p > T::lit(2.0) { (T::lit(2.0) - p) / (p - T::one()) } else { T::zero() };
    let w = euler_substitution(g, p, u);
    let mut pinch = (T::infinity(), T::zero());
    for i in 2..u.n() {
        let x = u.x(i);
        if x > upper {
            break;
        }
        let r = w[i] / x;
        pinch = (pinch.0.min(r), pinch.1.max(r));
    }
    Ok(ExponentFit { slope, expected, r_squared, points: pts.len(), max_third, w_pinch: pinch })
}

/// Jump of `u‴` across a tip node against its variation nearby.
#[derive(Debug, Clone, Serialize)]
pub struct TipJump<T> {
    pub jump: T,
    pub off_tip_variation: T,
    /// `jump > 10·off_tip_variation`.
    pub not_c3: bool,
}

/// Compares third differences whose stencils avoid the tip on either side.
pub fn tip_third_derivative_jump<T: Real>(u: &GridFunction<T>, tip: usize) -> Result<TipJump<T>> {
    let t = third_differences(u);
    // entry j uses nodes j..j+3 (midpoint x_{j+3/2})
    let span = 10;
    if tip < span + 4 || tip + span + 5 > u.n() {
        return domain("the tip is too close to the boundary for a jump estimate");
    }
    let left = tip - 4;
    let right = tip + 1;
    let jump = (t[right].1 - t[left].1).abs();
    let var = |r: std::ops::Range<usize>| r.map(|j| (t[j + 1].1 - t[j].1).abs()).fold(T::zero(), T::max);
    let off_tip_variation = var(left - span..left).max(var(right..right + span));
    Ok(TipJump { jump, off_tip_variation, not_c3: jump > T::lit(10.0) * off_tip_variation })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport<T> {
    pub concavity: Concavity<T>,
    pub nondegeneracy: Nondegeneracy<T>,
    pub natural_bc: NaturalBc<T>,
    pub natural_bc_ok: bool,
    pub slope_function: SlopeFunction<T>,
    pub coincidence_set: Vec<usize>,
    /// For cones: every coincidence node within two nodes of the tip, and at least one.
    pub coincidence_at_tip: Option<bool>,
    /// Coincidence nodes where the obstacle's second quotient is positive.
    pub convex_coincidences: Vec<usize>,
    pub boundary_exponent_fit: Option<ExponentFit<T>>,
    pub tip_jump: Option<TipJump<T>>,
    pub notes: Vec<String>,
}

impl<T: Real> DiagnosticsReport<T> {
    /// Concavity, nondegeneracy and natural boundary conditions.
    pub fn passes_core(&self) -> bool {
        self.concavity.concave && self.nondegeneracy.nondegenerate && self.natural_bc_ok
    }
}

/// Runs every check on `u`; obstacle-dependent entries need `psi`.
pub fn diagnose<T: Real, G: ShapeFunction<T> + ?Sized>(
    g: &G,
    p: T,
    u: &GridFunction<T>,
    psi: Option<&Obstacle<T>>,
) -> Result<DiagnosticsReport<T>> {
    let n = u.n();
    let natural_bc = check_natural_bc(g, p, u)?;
    let mut notes = vec![format!(
        "plateau tolerance {PLATEAU_TOLERANCE} relative to the jump of m is a tooling choice"
    )];
    let (coincidence_set, coincidence_at_tip, convex_coincidences, tip_jump) = match psi {
        Some(psi) => {
            let nodal = psi.nodal(n);
            let delta = default_coincidence_threshold(u);
            let v = u.values();
            let set: Vec<usize> = (1..n).filter(|&i| v[i] - nodal[i] < delta).collect();
            let h2 = u.h() * u.h();
            let convex = set
                .iter()
                .copied()
                .filter(|&i| (nodal[i + 1] - T::lit(2.0) * nodal[i] + nodal[i - 1]) / h2 > T::lit(1e-8))
                .collect();
            let (at_tip, jump) = match psi.tip() {
                Some(theta) => {
                    let k = (theta * T::from_count(n)).round().to_usize().unwrap_or(0);
                    let ok = !set.is_empty() && set.iter().all(|&i| i.abs_diff(k) <= 2);
                    let jump = match tip_third_derivative_jump(u, k) {
                        Ok(j) => Some(j),
                        Err(e) => {
                            notes.push(e.to_string());
                            None
                        }
                    };
                    (Some(ok), jump)
                }
                None => (None, None),
            };
            (set, at_tip, convex, jump)
        }
        None => (Vec::new(), None, Vec::new(), None),
    };
    let boundary_exponent_fit = match boundary_exponent_fit(g, p, u) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };
    Ok(DiagnosticsReport {
        concavity: check_concavity(u),
        nondegeneracy: check_nondegeneracy(u),
        natural_bc_ok: natural_bc.passes(),
        natural_bc,
        slope_function: slope_function_m(g, p, u),
        coincidence_set,
        coincidence_at_tip,
        convex_coincidences,
        boundary_exponent_fit,
        tip_jump,
        notes,
    })
}

fn yes(b: bool) -> &'static str {
    if b { "pass" } else { "FAIL" }
}

impl<T: Real> fmt::Display for DiagnosticsReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<26} {:<6} {}", "check", "result", "value")?;
        writeln!(f, "{:<26} {:<6} max u'' = {:.3e}", "concavity", yes(self.concavity.concave), self.concavity.max_second_quotient.as_f64())?;
        writeln!(
            f,
            "{:<26} {:<6} min -u'' = {:.3e}, flat cores {}",
            "nondegeneracy",
            yes(self.nondegeneracy.nondegenerate),
            self.nondegeneracy.min_curvature.as_f64(),
            self.nondegeneracy.flat_cores.len()
        )?;
        let bc = &self.natural_bc;
        writeln!(
            f,
            "{:<26} {:<6} u''(0) {:.2e}, u''(1) {:.2e}, w(0) {:.2e}, w(1) {:.2e}",
            "natural boundary",
            yes(self.natural_bc_ok),
            bc.u2_left.as_f64(),
            bc.u2_right.as_f64(),
            bc.w_left.as_f64(),
            bc.w_right.as_f64()
        )?;
        let sf = &self.slope_function;
        match &sf.plateaus {
            Some(pl) => writeln!(
                f,
                "{:<26} {:<6} jump at node {}, plateaus {:.6e} / {:.6e}, spread {:.2e}",
                "slope function m",
                yes(sf.nonincreasing && pl.two_plateau),
                pl.jump_node,
                pl.left.as_f64(),
                pl.right.as_f64(),
                pl.spread.as_f64()
            )?,
            None => writeln!(f, "{:<26} {:<6} no jump", "slope function m", yes(sf.nonincreasing))?,
        }
        let coin = match self.coincidence_at_tip {
            Some(ok) => yes(ok),
            None => "-",
        };
        writeln!(f, "{:<26} {:<6} nodes {:?}", "coincidence set", coin, self.coincidence_set)?;
        if let Some(fit) = &self.boundary_exponent_fit {
            writeln!(
                f,
                "{:<26} {:<6} slope {:.4}, expected {:.4}, R^2 {:.4}",
                "boundary exponent",
                "-",
                fit.slope.as_f64(),
                fit.expected.as_f64(),
                fit.r_squared.as_f64()
            )?;
        }
        if let Some(tj) = &self.tip_jump {
            writeln!(
                f,
                "{:<26} {:<6} jump {:.3e}, nearby variation {:.3e}",
                "u''' jump at tip",
                yes(tj.not_c3),
                tj.jump.as_f64(),
                tj.off_tip_variation.as_f64()
            )?;
        }
        Ok(())
    }
}
