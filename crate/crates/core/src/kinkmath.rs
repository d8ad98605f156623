//! Model parameters and the classical kink profile.
//!
//! The kink centred at `r` has polar angles with `cos θ_x = tanh(η(x−r))` and
//! `sin θ_x = sech(η(x−r))`. Everything else in the crate (the one-particle
//! Jacobi matrix, the rotated spin frames, the boson Hamiltonians) is built
//! from the per-site quantities collected in [`KinkProfile`].

use crate::error::{Error, Result};

/// Inclusive integer interval `[a, b]` of lattice sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Window {
    pub a: i64,
    pub b: i64,
}

impl Window {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a > b {
            return Err(Error::EmptyWindow { a, b });
        }
        Ok(Window { a, b })
    }

    /// The symmetric window `[−half_width, half_width]`.
    pub fn symmetric(half_width: i64) -> Result<Self> {
        Window::new(-half_width, half_width)
    }

    pub fn len(&self) -> usize {
        (self.b - self.a + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: i64) -> bool {
        self.a <= x && x <= self.b
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> + Clone {
        self.a..=self.b
    }

    /// Position of site `x` inside the window.
    pub fn index(&self, x: i64) -> Result<usize> {
        if !self.contains(x) {
            return Err(Error::SiteOutOfRange { site: x, a: self.a, b: self.b });
        }
        Ok((x - self.a) as usize)
    }

    pub fn site(&self, index: usize) -> i64 {
        self.a + index as i64
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.a, self.b)
    }
}

/// Anisotropy, spin, kink position and lattice window.
///
/// `two_j` is the doubled spin so half-integer spins stay exact. `q` and `eta`
/// are derived from `delta` through `2Δ = q + 1/q`, `η = −ln q`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ModelParams {
    pub two_j: u32,
    pub delta: f64,
    pub q: f64,
    pub eta: f64,
    pub r: f64,
    pub window: Window,
}

/// Validates `delta > 1` and derives `q ∈ (0,1)` and `η`.
pub fn make_params(two_j: u32, delta: f64, r: f64, window: Window) -> Result<ModelParams> {
    if !(delta > 1.0) || !delta.is_finite() {
        return Err(Error::DeltaNotAboveOne(delta));
    }
    if !r.is_finite() {
        return Err(Error::InvalidParameter(format!("kink position must be finite (got {r})")));
    }
    if window.a > window.b {
        return Err(Error::EmptyWindow { a: window.a, b: window.b });
    }
    // smaller root of q² − 2Δq + 1, written without cancellation
    let root = (delta * delta - 1.0).sqrt();
    let q = 1.0 / (delta + root);
    let eta = (delta + root).ln();
    Ok(ModelParams { two_j, delta, q, eta, r, window })
}

impl ModelParams {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn delta_inv(&self) -> f64 {
        1.0 / self.delta
    }

    /// `√(1 − Δ⁻²)`, the coefficient of the boundary field.
    pub fn field(&self) -> f64 {
        (1.0 - 1.0 / (self.delta * self.delta)).sqrt()
    }

    pub fn with_window(&self, window: Window) -> ModelParams {
        ModelParams { window, ..*self }
    }

    pub fn with_r(&self, r: f64) -> ModelParams {
        ModelParams { r, ..*self }
    }

    pub fn with_two_j(&self, two_j: u32) -> ModelParams {
        ModelParams { two_j, ..*self }
    }

    /// Kink position reduced to `[0, 1)`; the spectrum of the infinite chain is
    /// periodic in `r` with period 1.
    pub fn reduced_r(&self) -> f64 {
        let f = self.r - self.r.floor();
        if f >= 1.0 { 0.0 } else { f }
    }

    fn arg(&self, x: f64) -> f64 {
        self.eta * (x - self.r)
    }

    pub fn cos_theta(&self, x: f64) -> f64 {
        self.arg(x).tanh()
    }

    pub fn sin_theta(&self, x: f64) -> f64 {
        1.0 / self.arg(x).cosh()
    }

    pub fn theta(&self, x: f64) -> f64 {
        self.sin_theta(x).atan2(self.cos_theta(x))
    }

    /// `ε⁺_x = cosh(η(x−r)) / (Δ cosh(η(x+1−r)))`.
    pub fn eps_plus(&self, x: f64) -> f64 {
        cosh_ratio(self.arg(x), self.eta) / self.delta
    }

    /// `ε⁻_x = cosh(η(x−r)) / (Δ cosh(η(x−1−r)))`.
    pub fn eps_minus(&self, x: f64) -> f64 {
        cosh_ratio(self.arg(x), -self.eta) / self.delta
    }

    /// Two-sided well `ε_x = ε⁺_x + ε⁻_x`, evaluated as `2 / (1 + sinh²η sech²(η(x−r)))`.
    pub fn eps(&self, x: f64) -> f64 {
        let s = self.sin_theta(x);
        2.0 / (1.0 + (self.delta * self.delta - 1.0) * s * s)
    }

    /// Bond coupling `γ_{x,x+1} = ε⁺_x + √(1−Δ⁻²) cos θ_x`.
    pub fn gamma_bond(&self, x: f64) -> f64 {
        self.eps_plus(x) + self.field() * self.cos_theta(x)
    }

    /// `Σ_{x∈ℤ} sech(η(x−r))`, the l¹ norm of the zero mode, summed until the
    /// terms drop below 1e-15.
    pub fn zero_mode_l1(&self) -> f64 {
        let centre = self.r.round() as i64;
        let mut sum = self.sin_theta(centre as f64);
        for k in 1.. {
            let t = self.sin_theta((centre + k) as f64) + self.sin_theta((centre - k) as f64);
            sum += t;
            if t < 1e-15 {
                break;
            }
        }
        sum
    }

    /// `Σ_{x∈ℤ} sech²(η(x−r))`.
    pub fn zero_mode_l2_sq(&self) -> f64 {
        let centre = self.r.round() as i64;
        let mut sum = self.sin_theta(centre as f64).powi(2);
        for k in 1.. {
            let t = self.sin_theta((centre + k) as f64).powi(2)
                + self.sin_theta((centre - k) as f64).powi(2);
            sum += t;
            if t < 1e-15 {
                break;
            }
        }
        sum
    }

    /// Classical magnetisation `μ = Σ_{x∈ℤ} [cos θ_x − sgn(x − ½)]`.
    pub fn mu(&self) -> f64 {
        let centre = self.r.round() as i64;
        let term = |x: i64| self.cos_theta(x as f64) - if x >= 1 { 1.0 } else { -1.0 };
        let mut sum = term(centre);
        for k in 1.. {
            let t = term(centre + k) + term(centre - k);
            sum += t;
            if term(centre + k).abs() < 1e-16 && term(centre - k).abs() < 1e-16 {
                break;
            }
        }
        sum
    }
}

/// `cosh(u) / cosh(u + h)` without overflow for large `|u|`.
fn cosh_ratio(u: f64, h: f64) -> f64 {
    if u.abs() + h.abs() < 300.0 {
        return u.cosh() / (u + h).cosh();
    }
    (ln_cosh(u) - ln_cosh(u + h)).exp()
}

fn ln_cosh(u: f64) -> f64 {
    let a = u.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Per-site classical data over the window.
///
/// `eps` holds the diagonal of the finite-volume one-particle operator: the
/// two-sided well in the bulk and the one-sided values `ε⁺_a`, `ε⁻_b` at the
/// ends. `gamma_bond[i]` belongs to the bond `(a+i, a+i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KinkProfile {
    pub window: Window,
    pub theta: Vec<f64>,
    pub cos_theta: Vec<f64>,
    pub sin_theta: Vec<f64>,
    pub eps_plus: Vec<f64>,
    pub eps_minus: Vec<f64>,
    pub eps: Vec<f64>,
    pub gamma_bond: Vec<f64>,
}

pub fn kink_profile(params: &ModelParams) -> KinkProfile {
    let w = params.window;
    let xs: Vec<f64> = w.sites().map(|x| x as f64).collect();
    let map = |f: &dyn Fn(f64) -> f64| xs.iter().map(|&x| f(x)).collect::<Vec<_>>();
    let eps_plus = map(&|x| params.eps_plus(x));
    let eps_minus = map(&|x| params.eps_minus(x));
    let n = xs.len();
    let mut eps = map(&|x| params.eps(x));
    if n >= 2 {
        eps[0] = eps_plus[0];
        eps[n - 1] = eps_minus[n - 1];
    }
    KinkProfile {
        window: w,
        theta: map(&|x| params.theta(x)),
        cos_theta: map(&|x| params.cos_theta(x)),
        sin_theta: map(&|x| params.sin_theta(x)),
        gamma_bond: xs[..n.saturating_sub(1)].iter().map(|&x| params.gamma_bond(x)).collect(),
        eps_plus,
        eps_minus,
        eps,
    }
}

/// Residuals of the five angle identities at a site.
///
/// The `±` identities carry one entry per sign, `[+, −]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleResiduals {
    pub neighbour_cos_sum: f64,
    pub neighbour_sin_sum: f64,
    pub bond_overlap: [f64; 2],
    pub bond_cross: [f64; 2],
    pub one_sided_well: [f64; 2],
}

impl AngleResiduals {
    /// The five residuals, maximised over the sign where one applies.
    pub fn as_array(&self) -> [f64; 5] {
        [
            self.neighbour_cos_sum,
            self.neighbour_sin_sum,
            self.bond_overlap[0].max(self.bond_overlap[1]),
            self.bond_cross[0].max(self.bond_cross[1]),
            self.one_sided_well[0].max(self.one_sided_well[1]),
        ]
    }

    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }
}

/// Checks the trigonometric identities linking neighbouring kink angles to the
/// well `ε_x`, `ε^±_x` and the field `√(1−Δ⁻²)`. Requires `x ± 1` in the window.
pub fn check_angle_identities(params: &ModelParams, x: i64) -> Result<AngleResiduals> {
    let w = params.window;
    for s in [x - 1, x, x + 1] {
        if !w.contains(s) {
            return Err(Error::SiteOutOfRange { site: s, a: w.a, b: w.b });
        }
    }
    let xf = x as f64;
    let (c, s) = (params.cos_theta(xf), params.sin_theta(xf));
    let (cm, sm) = (params.cos_theta(xf - 1.0), params.sin_theta(xf - 1.0));
    let (cp, sp) = (params.cos_theta(xf + 1.0), params.sin_theta(xf + 1.0));
    let di = params.delta_inv();
    let f = params.field();
    let eps = params.eps(xf);

    let overlap = |cn: f64, sn: f64| (s * sn + di * c * cn - di).abs();
    // sign = +1 for the right neighbour, −1 for the left one
    let cross = |cn: f64, sn: f64, sign: f64| (di * c * sn - s * cn + sign * f * s).abs();
    let well = |cn: f64, sn: f64, sign: f64, target: f64| {
        (di * sn * s + cn * c - sign * f * c - target).abs()
    };

    Ok(AngleResiduals {
        neighbour_cos_sum: (cm + cp - eps * c).abs(),
        neighbour_sin_sum: (di * (sm + sp) - eps * s).abs(),
        bond_overlap: [overlap(cp, sp), overlap(cm, sm)],
        bond_cross: [cross(cp, sp, 1.0), cross(cm, sm, -1.0)],
        one_sided_well: [
            well(cp, sp, 1.0, params.eps_plus(xf)),
            well(cm, sm, -1.0, params.eps_minus(xf)),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(two_j: u32, delta: f64, r: f64, a: i64, b: i64) -> ModelParams {
        make_params(two_j, delta, r, Window::new(a, b).unwrap()).unwrap()
    }

    #[test]
    fn q_and_eta_for_delta_five_quarters() {
        // 2·1.25 = q + 1/q  =>  q = 1/2
        let m = p(1, 1.25, 0.0, -4, 4);
        assert!((m.q - 0.5).abs() < 1e-15);
        assert!((m.eta - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn eta_one_from_cosh() {
        let m = p(2, 1f64.cosh(), 0.5, 0, 5);
        assert!((m.eta - 1.0).abs() < 1e-14);
        assert!((m.q - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn rejects_isotropic_and_easy_plane() {
        let w = Window::new(-4, 4).unwrap();
        assert_eq!(make_params(1, 1.0, 0.0, w), Err(Error::DeltaNotAboveOne(1.0)));
        assert!(make_params(1, 0.9, 0.0, w).is_err());
        assert!(make_params(1, f64::NAN, 0.0, w).is_err());
        assert!(Window::new(3, 2).is_err());
    }

    #[test]
    fn profile_values_at_delta_five_quarters() {
        let m = p(1, 1.25, 0.0, -3, 3);
        let k = kink_profile(&m);
        let i1 = m.window.index(1).unwrap();
        assert!((k.cos_theta[i1] - 0.6).abs() < 1e-15);
        assert!((k.sin_theta[i1] - 0.8).abs() < 1e-15);
        let i0 = m.window.index(0).unwrap();
        // ε₀ = 2/cosh²(ln 2)·cosh²(0) = 2·(0.8)² = 1.28
        assert!((k.eps[i0] - 1.28).abs() < 1e-14);
        assert!((k.cos_theta[i0]).abs() < 1e-15);
        assert!((k.sin_theta[i0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_sites_store_one_sided_wells() {
        let m = p(1, 1.5, 0.3, -5, 5);
        let k = kink_profile(&m);
        assert_eq!(k.eps[0], m.eps_plus(-5.0));
        assert_eq!(*k.eps.last().unwrap(), m.eps_minus(5.0));
        assert_eq!(k.gamma_bond.len(), 10);
    }

    #[test]
    fn hand_checked_bond_identity() {
        let m = p(1, 1.25, 0.0, -3, 3);
        // sinθ₁ sinθ₂ + Δ⁻¹ cosθ₁ cosθ₂ = 0.8·0.470588 + 0.8·0.6·0.882353 = 0.8
        let res = check_angle_identities(&m, 1).unwrap();
        assert!(res.bond_overlap[0] < 1e-15);
        assert!((m.cos_theta(2.0) - 15.0 / 17.0).abs() < 1e-15);
        assert!((m.sin_theta(2.0) - 8.0 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn reflection_symmetry_at_kink_centre() {
        let m = p(1, 1.7, 0.0, -3, 3);
        let res = check_angle_identities(&m, 0).unwrap();
        assert!((res.bond_cross[0] - res.bond_cross[1]).abs() < 1e-15);
        assert!(check_angle_identities(&m, 3).is_err());
    }

    #[test]
    fn large_distance_does_not_overflow() {
        let m = p(1, 3.0, 0.0, -2000, 2000);
        let e = m.eps_plus(1500.0);
        assert!((e - (-m.eta).exp() / m.delta).abs() < 1e-12);
        assert!((m.eps(-1999.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sums_over_the_lattice() {
        let m = p(1, 1.25, 0.0, -1, 1);
        // μ vanishes at r = ½ by symmetry; it is odd around that point
        let half = m.with_r(0.5);
        assert!(half.mu().abs() < 1e-13);
        assert!((m.mu() + m.with_r(1.0).mu()).abs() < 1e-13);
        let l1: f64 = (-200..=200).map(|x| m.sin_theta(x as f64)).sum();
        assert!((m.zero_mode_l1() - l1).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn parameter_relations_hold(delta in 1.0001f64..50.0) {
            let m = p(1, delta, 0.0, 0, 1);
            prop_assert!(((m.q + 1.0 / m.q) / (2.0 * delta) - 1.0).abs() < 1e-14);
            prop_assert!((m.eta.cosh() / delta - 1.0).abs() < 1e-14);
            prop_assert!((-m.q.ln() / m.eta - 1.0).abs() < 1e-14);
        }

        #[test]
        fn angle_identities_sweep(delta in 1.001f64..10.0, r in 0.0f64..1.0, x in -12i64..12) {
            let m = p(1, delta, r, -14, 14);
            prop_assert!(check_angle_identities(&m, x).unwrap().max() <= 1e-12);
        }

        #[test]
        fn profile_invariants(delta in 1.001f64..10.0, r in -3.0f64..3.0) {
            let m = p(1, delta, r, -20, 20);
            let k = kink_profile(&m);
            for (i, x) in m.window.sites().enumerate() {
                let u = m.eta * (x as f64 - r);
                prop_assert!((k.cos_theta[i] - u.tanh()).abs() < 1e-13);
                prop_assert!((k.sin_theta[i] - 1.0 / u.cosh()).abs() < 1e-13);
                prop_assert!(k.sin_theta[i] > 0.0);
                if i > 0 {
                    prop_assert!(k.cos_theta[i] >= k.cos_theta[i - 1]);
                }
                // two-sided closed form 2cosh²u / (cosh(u−η) cosh(u+η))
                let closed = 2.0 * u.cosh().powi(2) / ((u - m.eta).cosh() * (u + m.eta).cosh());
                prop_assert!((m.eps(x as f64) - closed).abs() < 1e-13);
                if i > 0 && i + 1 < k.eps.len() {
                    prop_assert!((k.eps[i] - k.eps_plus[i] - k.eps_minus[i]).abs() < 1e-13);
                }
                let dist = (x as f64 - r).abs();
                if dist >= 1.0 {
                    prop_assert!((m.eps(x as f64) - 2.0).abs() <= 4.0 * (-2.0 * m.eta * (dist - 1.0)).exp());
                }
            }
            for i in 0..k.gamma_bond.len() {
                let x = m.window.site(i) as f64;
                let other = m.eps_minus(x + 1.0) - m.field() * m.cos_theta(x + 1.0);
                prop_assert!((k.gamma_bond[i] - other).abs() < 1e-13);
            }
        }
    }
}
