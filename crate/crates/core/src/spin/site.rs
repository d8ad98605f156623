use nalgebra::{Complex, DMatrix};

/// Spin-J matrices on one site in the basis `m = J, J−1, …, −J`.
///
/// Index `k` of the basis corresponds to `m = J − k`. `S²` is purely imaginary
/// in this basis; it is stored through the real matrix `i S² = (S⁺ − S⁻)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSite {
    pub two_j: u32,
    pub s1: DMatrix<f64>,
    pub i_s2: DMatrix<f64>,
    pub s3: DMatrix<f64>,
    pub sp: DMatrix<f64>,
    pub sm: DMatrix<f64>,
}

impl SpinSite {
    pub fn new(two_j: u32) -> Self {
        let d = two_j as usize + 1;
        let tj = two_j as f64;
        let mut sp = DMatrix::zeros(d, d);
        let mut sm = DMatrix::zeros(d, d);
        for k in 0..d - 1 {
            // S⁻ |k⟩ = √((k+1)(2J−k)) |k+1⟩
            let a = (((k + 1) as f64) * (tj - k as f64)).sqrt();
            sm[(k + 1, k)] = a;
            sp[(k, k + 1)] = a;
        }
        let s3 = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |k, _| tj / 2.0 - k as f64));
        let s1 = (&sp + &sm) * 0.5;
        let i_s2 = (&sp - &sm) * 0.5;
        SpinSite { two_j, s1, i_s2, s3, sp, sm }
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// `S²` as a complex matrix.
    pub fn s2(&self) -> DMatrix<Complex<f64>> {
        self.i_s2.map(|v| Complex::new(0.0, -v))
    }

    /// `e^{−iθS²}`, a real orthogonal matrix.
    pub fn rotation(&self, theta: f64) -> DMatrix<f64> {
        (&self.i_s2 * (-theta)).exp()
    }

    /// Spin operators conjugated by `e^{−iθS²}`.
    pub fn rotated(&self, theta: f64) -> RotatedSpin {
        let r = self.rotation(theta);
        let rt = r.transpose();
        RotatedSpin {
            s1: &r * &self.s1 * &rt,
            s3: &r * &self.s3 * &rt,
            sp: &r * &self.sp * &rt,
            sm: &r * &self.sm * &rt,
            rotation: r,
        }
    }
}

/// `S̃ = e^{−iθS²} S e^{iθS²}` for the real components (`S̃² = S²`).
#[derive(Debug, Clone, PartialEq)]
pub struct RotatedSpin {
    pub rotation: DMatrix<f64>,
    pub s1: DMatrix<f64>,
    pub s3: DMatrix<f64>,
    pub sp: DMatrix<f64>,
    pub sm: DMatrix<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(m: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
        m.map(|v| Complex::new(v, 0.0))
    }

    #[test]
    fn algebra_for_small_spins() {
        for two_j in 1..=8 {
            let s = SpinSite::new(two_j);
            let (s1, s2, s3) = (c(&s.s1), s.s2(), c(&s.s3));
            let i = Complex::new(0.0, 1.0);
            let comm = |a: &DMatrix<Complex<f64>>, b: &DMatrix<Complex<f64>>| a * b - b * a;
            assert!((comm(&s1, &s2) - &s3 * i).camax() < 1e-12);
            assert!((comm(&s2, &s3) - &s1 * i).camax() < 1e-12);
            assert!((comm(&s3, &s1) - &s2 * i).camax() < 1e-12);
            let j = s.j();
            let casimir = &s1 * &s1 + &s2 * &s2 + &s3 * &s3;
            let target = DMatrix::<Complex<f64>>::identity(s.dim(), s.dim()) * Complex::new(j * (j + 1.0), 0.0);
            assert!((casimir - target).camax() < 1e-12);
        }
    }

    #[test]
    fn spin_half_rotation_by_hand() {
        let s = SpinSite::new(1);
        let th: f64 = 0.7;
        let r = s.rotation(th);
        let (ch, sh) = ((th / 2.0).cos(), (th / 2.0).sin());
        let expected = DMatrix::from_row_slice(2, 2, &[ch, -sh, sh, ch]);
        assert!((r - expected).amax() < 1e-15);
    }

    #[test]
    fn identity_rotation() {
        let s = SpinSite::new(3);
        let rs = s.rotated(0.0);
        assert_eq!(rs.rotation, DMatrix::identity(4, 4));
        assert!((rs.s1 - &s.s1).amax() == 0.0);
    }

    proptest! {
        #[test]
        fn rotated_components(two_j in 1u32..9, theta in 0.0f64..std::f64::consts::PI) {
            let s = SpinSite::new(two_j);
            let rs = s.rotated(theta);
            let (c, sn) = (theta.cos(), theta.sin());
            prop_assert!((&rs.s1 - (&s.s1 * c - &s.s3 * sn)).camax() < 1e-12);
            prop_assert!((&rs.s3 - (&s.s1 * sn + &s.s3 * c)).camax() < 1e-12);
            let half = theta / 2.0;
            let sm_expected = &s.s3 * (-sn) - &s.sp * half.sin().powi(2) + &s.sm * half.cos().powi(2);
            prop_assert!((&rs.sm - sm_expected).camax() < 1e-12);
            let orth = &rs.rotation * rs.rotation.transpose() - DMatrix::identity(s.dim(), s.dim());
            prop_assert!(orth.amax() < 1e-12);
            // the rotated top state is the top of S̃³
            let top = rs.rotation.column(0).into_owned();
            prop_assert!((&rs.s3 * &top - &top * s.j()).camax() < 1e-12);
        }
    }
}
