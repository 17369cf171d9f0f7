//! SU(2) elements as unit quaternions.
//!
//! `Su2 { w, v }` stands for `w·𝟙 + i v·σ`; with `w² + |v|² = 1` this is
//! exactly special-unitary, and `½ tr = w`.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2 {
    pub w: f64,
    pub v: [f64; 3],
}

impl Su2 {
    pub const IDENTITY: Self = Self { w: 1.0, v: [0.0; 3] };

    /// `exp(i θ·σ/2) = cos(|θ|/2)𝟙 + i sin(|θ|/2) θ̂·σ`.
    pub fn exp_half(theta: [f64; 3]) -> Self {
        let norm = (theta[0] * theta[0] + theta[1] * theta[1] + theta[2] * theta[2]).sqrt();
        if norm == 0.0 {
            return Self::IDENTITY;
        }
        let (s, c) = (0.5 * norm).sin_cos();
        let k = s / norm;
        Self { w: c, v: [k * theta[0], k * theta[1], k * theta[2]] }
    }

    pub fn adjoint(self) -> Self {
        Self { w: self.w, v: self.v.map(|x| -x) }
    }

    pub fn half_trace(self) -> f64 {
        self.w
    }

    pub fn det(self) -> f64 {
        self.w * self.w + self.v.iter().map(|x| x * x).sum::<f64>()
    }

    /// Explicit 2×2 complex matrix, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let [x, y, z] = self.v;
        [[Complex64::new(self.w, z), Complex64::new(y, x)], [Complex64::new(-y, x), Complex64::new(self.w, -z)]]
    }
}

impl std::ops::Mul for Su2 {
    type Output = Self;

    /// Matrix product `self · rhs`.
    fn mul(self, rhs: Self) -> Self {
        let (a0, a) = (self.w, self.v);
        let (b0, b) = (rhs.w, rhs.v);
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        // (a0 + i a·σ)(b0 + i b·σ) = a0b0 − a·b + i(a0 b + b0 a − a×b)·σ
        Self { w: a0 * b0 - dot, v: [0, 1, 2].map(|k| a0 * b[k] + b0 * a[k] - cross[k]) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    fn pauli() -> [Matrix2<Complex64>; 3] {
        let (o, l, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
        [Matrix2::new(o, l, l, o), Matrix2::new(o, -i, i, o), Matrix2::new(l, o, o, -l)]
    }

    fn to_na(u: Su2) -> Matrix2<Complex64> {
        let m = u.matrix();
        Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }

    #[test]
    fn exponential_matches_matrix_exponential() {
        let s = pauli();
        for theta in [[0.3, -1.2, 2.0], [0.0, 0.0, 4.0], [7.0, 0.1, -0.5]] {
            let gen = (s[0] * Complex64::new(theta[0], 0.0) + s[1] * Complex64::new(theta[1], 0.0) + s[2] * Complex64::new(theta[2], 0.0))
                * Complex64::new(0.0, 0.5);
            let expected = gen.exp();
            let got = to_na(Su2::exp_half(theta));
            assert!((expected - got).norm() < 1e-12, "{theta:?}");
        }
    }

    #[test]
    fn single_axis_trace() {
        // A³ = c along a straight segment of length L: tr = 2cos(gcL/2)
        let (g, c, l) = (3.5, 0.4, 1.7);
        let u = Su2::exp_half([0.0, 0.0, g * c * l]);
        assert!((2.0 * u.half_trace() - 2.0 * (g * c * l / 2.0).cos()).abs() < 1e-14);
    }

    #[test]
    fn product_matches_matrices_and_stays_unitary() {
        let a = Su2::exp_half([0.5, 1.0, -0.3]);
        let b = Su2::exp_half([-2.0, 0.2, 0.9]);
        let ab = a * b;
        assert!((to_na(a) * to_na(b) - to_na(ab)).norm() < 1e-14);
        assert!((ab.det() - 1.0).abs() < 1e-14);
        let m = to_na(ab);
        assert!((m * m.adjoint() - Matrix2::identity()).norm() < 1e-14);
        assert!((m.determinant() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert_eq!((a * a.adjoint()).w, a.det());
    }
}
