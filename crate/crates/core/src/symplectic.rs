//! Dense linear algebra on Sp(2n, R).
//!
//! Convention: J = [[0, -I], [I, 0]] and ω(u, v) = ⟨Ju, v⟩.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance for the scalar tests on b² + cd.
pub const SEMISIMPLE_RTOL: f64 = 1e-12;

/// The standard complex structure on R^{2n}.
pub fn standard_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// Operator ∞-norm (maximum absolute row sum).
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn half_dim(dim: usize) -> Result<usize> {
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} is not a positive even number"
        )));
    }
    Ok(dim / 2)
}

fn check_square_even(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    half_dim(m.nrows())
}

pub fn omega_product(u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    let n = half_dim(u.len())?;
    Ok((standard_j(n) * u).dot(v))
}

/// ‖MᵀJM − J‖∞.
pub fn symplectic_defect(m: &DMatrix<f64>) -> Result<f64> {
    let n = check_square_even(m)?;
    let j = standard_j(n);
    Ok(inf_norm(&(m.transpose() * &j * m - j)))
}

pub fn is_symplectic(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    Ok(symplectic_defect(m)? <= tol)
}

/// Block interleaving of two symplectic-sized matrices:
/// [[A1,B1],[C1,D1]] ⋄ [[A2,B2],[C2,D2]] = [[A1,0,B1,0],[0,A2,0,B2],[C1,0,D1,0],[0,C2,0,D2]].
pub fn diamond_product(m1: &DMatrix<f64>, m2: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = check_square_even(m1)?;
    let q = check_square_even(m2)?;
    let k = p + q;
    let mut out = DMatrix::zeros(2 * k, 2 * k);
    for bi in 0..2 {
        for bj in 0..2 {
            let b1 = m1.view((bi * p, bj * p), (p, p));
            out.view_mut((bi * k, bj * k), (p, p)).copy_from(&b1);
            let b2 = m2.view((bi * q, bj * q), (q, q));
            out.view_mut((bi * k + p, bj * k + p), (q, q)).copy_from(&b2);
        }
    }
    Ok(out)
}

/// e^{At}, via nalgebra's scaling-and-squaring Padé evaluation.
pub fn matrix_exponential(a: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidArgument("exponential of a non-square matrix".into()));
    }
    if !t.is_finite() || a.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite entries in exponential".into()));
    }
    Ok((a * t).exp())
}

/// A matrix certified symplectic at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    m: DMatrix<f64>,
    tol: f64,
}

impl SymplecticMatrix {
    pub fn new(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        let defect = symplectic_defect(&m)?;
        if defect > tol {
            return Err(Error::InvalidArgument(format!(
                "matrix is not symplectic: defect {defect:e} > {tol:e}"
            )));
        }
        Ok(Self { m, tol })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn half_dim(&self) -> usize {
        self.m.nrows() / 2
    }
}

/// The model generator A(a,b,c,d) of the linearized circular-orbit system.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    mat: DMatrix<f64>,
}

impl GeneratorMatrix {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite generator coefficient".into()));
        }
        if a <= 0.0 {
            return Err(Error::InvalidArgument(format!("a must be positive, got {a}")));
        }
        #[rustfmt::skip]
        let mat = DMatrix::from_row_slice(4, 4, &[
            0.0, b,   d,   0.0,
            0.0, 0.0, 0.0, 0.0,
            a,   0.0, 0.0, 0.0,
            0.0, c,   -b,  0.0,
        ]);
        Ok(Self { a, b, c, d, mat })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// The symmetric matrix B = −J·A, written entrywise.
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            a,   0.0, 0.0, 0.0,
            0.0, c,   -b,  0.0,
            0.0, -b,  -d,  0.0,
            0.0, 0.0, 0.0, 0.0,
        ]);
        m
    }

    /// b² + cd.
    pub fn cdb2(&self) -> f64 {
        self.b * self.b + self.c * self.d
    }

    /// D⁻¹AD for D = diag(s₁, s₂, 1/s₁, 1/s₂), chosen so that |a| = |d| and
    /// max(|b|, |c|) matches them. Stays in the family: a·d and the sign of
    /// b² + cd are unchanged, and so is every conjugation-invariant index.
    pub fn balanced(&self) -> Self {
        let s1sq = if self.d != 0.0 { (self.d.abs() / self.a).sqrt() } else { 1.0 };
        let s1 = s1sq.sqrt();
        let m = self.a * s1sq;
        let mut s2 = f64::INFINITY;
        if self.b != 0.0 {
            s2 = s2.min(m * s1 / self.b.abs());
        }
        if self.c != 0.0 {
            s2 = s2.min((m / self.c.abs()).sqrt());
        }
        if !s2.is_finite() {
            s2 = 1.0;
        }
        Self::new(m, self.b * s2 / s1, self.c * s2 * s2, self.d / s1sq).expect("a stays positive")
    }

    /// Scale used by the relative zero test on b² + cd.
    pub fn cdb2_scale(&self) -> f64 {
        1.0f64.max(self.b * self.b).max((self.c * self.d).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NonzeroPair {
    /// ±i·ω with ω = √(−ad).
    Imaginary(f64),
    /// ±λ with λ = √(ad).
    Real(f64),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenStructure {
    pub zero_multiplicity: usize,
    pub zero_semisimple: bool,
    pub nonzero_pair: NonzeroPair,
}

/// Spectrum of A from det(A − λI) = λ²(λ² − ad).
///
/// `rtol` scales the zero test on b² + cd by max(1, b², |cd|). When d = 0 the
/// generator is nilpotent and nonzero, so 0 is never semisimple there.
pub fn eigen_structure(g: &GeneratorMatrix, rtol: f64) -> EigenStructure {
    let ad = g.a * g.d;
    let nonzero_pair = if g.d < 0.0 {
        NonzeroPair::Imaginary((-ad).sqrt())
    } else if g.d > 0.0 {
        NonzeroPair::Real(ad.sqrt())
    } else {
        NonzeroPair::None
    };
    let zero_multiplicity = if g.d == 0.0 { 4 } else { 2 };
    let zero_semisimple = g.d != 0.0 && g.cdb2().abs() <= rtol * g.cdb2_scale();
    EigenStructure {
        zero_multiplicity,
        zero_semisimple,
        nonzero_pair,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(4);
        v[i] = 1.0;
        v
    }

    #[test]
    fn j_squares_to_minus_identity() {
        for n in 1..4 {
            let j = standard_j(n);
            assert_eq!(&j * &j, -DMatrix::identity(2 * n, 2 * n));
            assert_eq!(j.transpose(), -&j);
        }
    }

    #[test]
    fn omega_examples() {
        let u = DVector::from_vec(vec![0.3, -1.2, 2.0, 0.7]);
        assert_eq!(omega_product(&u, &u).unwrap(), 0.0);
        assert_eq!(omega_product(&e(0), &(e(0) + e(2))).unwrap(), 1.0);
        for &(b, d, x4) in &[(1.0, 2.0, 0.0), (-3.0, 0.5, 7.0), (2.2, -1.1, -4.0)] {
            let v = DVector::from_vec(vec![0.0, -1.0, b / d, x4]);
            assert_eq!(omega_product(&e(3), &v).unwrap(), 1.0);
        }
        assert!(omega_product(&e(0), &DVector::zeros(2)).is_err());
        assert!(omega_product(&DVector::zeros(3), &DVector::zeros(3)).is_err());
    }

    #[test]
    fn symplectic_membership() {
        assert!(is_symplectic(&DMatrix::identity(4, 4), 1e-12).unwrap());
        let eta1 = DMatrix::from_row_slice(2, 2, &[1.0, 5.0, 0.0, 1.0]);
        assert!(is_symplectic(&eta1, 1e-12).unwrap());
        let not = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(!is_symplectic(&not, 1e-6).unwrap());
        assert!(is_symplectic(&DMatrix::identity(3, 3), 1e-6).is_err());
    }

    #[test]
    fn hamiltonian_flow_is_symplectic() {
        #[rustfmt::skip]
        let s = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.2, -0.4, 0.3,
            0.2, -2.0, 0.5, 0.1,
            -0.4, 0.5, 0.7, -1.1,
            0.3, 0.1, -1.1, 0.9,
        ]);
        let m = matrix_exponential(&(standard_j(2) * s), 0.7).unwrap();
        assert!(is_symplectic(&m, 1e-9).unwrap());
    }

    #[test]
    fn diamond_examples() {
        let i2 = DMatrix::<f64>::identity(2, 2);
        assert_eq!(diamond_product(&i2, &i2).unwrap(), DMatrix::identity(4, 4));
        let m1 = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let m2 = DMatrix::from_row_slice(2, 2, &[5.0, 6.0, 7.0, 8.0]);
        #[rustfmt::skip]
        let want = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.0, 2.0, 0.0,
            0.0, 5.0, 0.0, 6.0,
            3.0, 0.0, 4.0, 0.0,
            0.0, 7.0, 0.0, 8.0,
        ]);
        assert_eq!(diamond_product(&m1, &m2).unwrap(), want);
        assert!(diamond_product(&DMatrix::identity(3, 3), &i2).is_err());
    }

    #[test]
    fn exponential_examples() {
        let z = DMatrix::zeros(4, 4);
        assert_eq!(matrix_exponential(&z, 3.0).unwrap(), DMatrix::identity(4, 4));

        let w = 1.7;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -w, w, 0.0]);
        let t = 0.9;
        let r = matrix_exponential(&a, t).unwrap();
        let want = DMatrix::from_row_slice(
            2,
            2,
            &[(w * t).cos(), -(w * t).sin(), (w * t).sin(), (w * t).cos()],
        );
        assert!((r - want).amax() < 1e-13);

        let b = 2.0 * 2f64.sqrt();
        let g = GeneratorMatrix::new(1.0, b, 1.0, 0.0).unwrap();
        let m = matrix_exponential(g.matrix(), 1.0).unwrap();
        #[rustfmt::skip]
        let want = DMatrix::from_row_slice(4, 4, &[
            1.0, b, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            1.0, 2f64.sqrt(), 1.0, 0.0,
            -(2f64.sqrt()), 1.0 - 4.0 / 3.0, -b, 1.0,
        ]);
        assert!((m - want).amax() < 1e-12);

        let bad = DMatrix::from_row_slice(2, 2, &[f64::NAN, 0.0, 0.0, 0.0]);
        assert!(matrix_exponential(&bad, 1.0).is_err());
    }

    #[test]
    fn generator_layout() {
        let g = GeneratorMatrix::new(1.3, -0.4, 2.1, -0.8).unwrap();
        let b = -standard_j(2) * g.matrix();
        assert_eq!(b, b.transpose());
        assert_eq!(b, g.hamiltonian());
        assert!(GeneratorMatrix::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(GeneratorMatrix::new(1.0, f64::INFINITY, 1.0, 1.0).is_err());
    }

    #[test]
    fn balancing_is_a_symplectic_conjugation() {
        for (a, b, c, d) in [(0.5, 5.2e6, 184.0, 1.3e11), (1.0, 0.0, -2.0, 0.0), (2.0, -0.3, 0.0, -7.0), (3.0, 0.0, 0.0, 0.0)] {
            let g = GeneratorMatrix::new(a, b, c, d).unwrap();
            let h = g.balanced();
            assert!((h.a * h.d - a * d).abs() <= 1e-12 * (a * d).abs());
            assert_eq!(h.cdb2().signum(), g.cdb2().signum());
            assert_eq!(h.b == 0.0, b == 0.0);
            if d != 0.0 {
                assert!((h.a - h.d.abs()).abs() <= 1e-9 * h.a);
            }
            // Recover D from the entry ratios and check it conjugates A onto the result.
            let s1 = (h.a / a).sqrt();
            let s2 = if c != 0.0 { (h.c / c).sqrt() } else if b != 0.0 { h.b / b * s1 } else { 1.0 };
            let diag = [s1, s2, 1.0 / s1, 1.0 / s2];
            let s = DMatrix::from_diagonal(&DVector::from_row_slice(&diag));
            let inv = DMatrix::from_diagonal(&DVector::from_iterator(4, diag.iter().map(|x| 1.0 / x)));
            let conj = &inv * g.matrix() * &s;
            assert!((conj - h.matrix()).amax() <= 1e-9 * h.matrix().amax());
            assert!(is_symplectic(&s, 1e-12).unwrap());
        }
    }

    #[test]
    fn eigen_structure_examples() {
        let s = eigen_structure(&GeneratorMatrix::new(1.0, 0.0, 1.0, -1.0).unwrap(), 1e-12);
        assert_eq!(s.zero_multiplicity, 2);
        assert!(!s.zero_semisimple);
        assert_eq!(s.nonzero_pair, NonzeroPair::Imaginary(1.0));

        let s = eigen_structure(&GeneratorMatrix::new(1.0, 2.0, 1.0, -4.0).unwrap(), 1e-12);
        assert!(s.zero_semisimple);
        assert_eq!(s.nonzero_pair, NonzeroPair::Imaginary(2.0));

        let s = eigen_structure(&GeneratorMatrix::new(1.0, 0.0, 1.0, 1.0).unwrap(), 1e-12);
        assert_eq!(s.nonzero_pair, NonzeroPair::Real(1.0));

        let s = eigen_structure(&GeneratorMatrix::new(1.0, 0.0, 0.0, 0.0).unwrap(), 1e-12);
        assert_eq!(s.zero_multiplicity, 4);
        assert!(!s.zero_semisimple);
        assert_eq!(s.nonzero_pair, NonzeroPair::None);
    }

    #[test]
    fn eigen_structure_matches_numeric_spectrum() {
        let g = GeneratorMatrix::new(2.0, 0.5, -1.0, -3.0).unwrap();
        let eig = g.matrix().complex_eigenvalues();
        let w = (6.0f64).sqrt();
        let mut imag: Vec<f64> = eig.iter().map(|z| z.im).collect();
        imag.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((imag[0] + w).abs() < 1e-6 && (imag[3] - w).abs() < 1e-6);
    }
}
