use nalgebra::{DMatrix, SymmetricEigen};

use super::path::SymplecticPath;
use crate::error::{Error, Result};

const BLOCK_TOL: f64 = 1e-10;
const KERNEL_RTOL: f64 = 1e-9;

/// Orthonormal basis of ker(m) from an SVD.
fn kernel_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let k = m.ncols();
    let scale = m.amax().max(1.0);
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let mut cols = Vec::new();
    for i in 0..k {
        let s = if i < svd.singular_values.len() { svd.singular_values[i] } else { 0.0 };
        if s <= KERNEL_RTOL * scale {
            cols.push(vt.row(i).transpose());
        }
    }
    if cols.is_empty() {
        DMatrix::zeros(k, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// (dim S, m⁺ of sym(M₁₁ᵀM₂₁) on S) with S = ker(M₁₁ − I).
fn endpoint_terms(m: &DMatrix<f64>, n: usize) -> (usize, usize) {
    let m11 = m.view((0, 0), (n, n)).clone_owned();
    let m21 = m.view((n, 0), (n, n)).clone_owned();
    let s = kernel_basis(&(&m11 - DMatrix::identity(n, n)));
    if s.ncols() == 0 {
        return (0, 0);
    }
    let p = m11.transpose() * m21;
    let sym = (&p + p.transpose()) * 0.5;
    let r = s.transpose() * sym * &s;
    let scale = r.amax().max(1.0);
    let plus = SymmetricEigen::new(r)
        .eigenvalues
        .iter()
        .filter(|&&x| x > 1e-9 * scale)
        .count();
    (s.ncols(), plus)
}

/// μ^CLM for a lower-block-triangular path [[M₁₁, 0], [M₂₁, M₂₂]], from the
/// endpoint data only:
/// m⁺(M₁₁ᵀM₂₁|S(T)) − m⁺(M₁₁ᵀM₂₁|S(0)) + dim S(0) − dim S(T).
pub fn zhu_index(path: &SymplecticPath) -> Result<i64> {
    if !path.is_lower_block_triangular(BLOCK_TOL) {
        return Err(Error::InvalidArgument(
            "path is not lower block triangular".into(),
        ));
    }
    let n = path.n();
    let samples = path.samples();
    let (dim0, plus0) = endpoint_terms(&samples[0].1, n);
    let (dim_t, plus_t) = endpoint_terms(&samples[samples.len() - 1].1, n);
    Ok(plus_t as i64 - plus0 as i64 + dim0 as i64 - dim_t as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::GeneratorMatrix;

    fn path(b: f64, c: f64) -> SymplecticPath {
        let g = GeneratorMatrix::new(1.0, b, c, 0.0).unwrap();
        SymplecticPath::fundamental_solution(g, 1.5, 64).unwrap()
    }

    #[test]
    fn nilpotent_cases() {
        assert_eq!(zhu_index(&path(0.0, -1.0)).unwrap(), 1);
        assert_eq!(zhu_index(&path(0.0, 0.0)).unwrap(), 1);
        assert_eq!(zhu_index(&path(0.0, 2.0)).unwrap(), 2);
        assert_eq!(zhu_index(&path(0.7, -3.0)).unwrap(), 2);
    }

    #[test]
    fn rejects_full_paths() {
        let g = GeneratorMatrix::new(1.0, 1.0, 1.0, -1.0).unwrap();
        let p = SymplecticPath::fundamental_solution(g, 1.0, 64).unwrap();
        assert!(zhu_index(&p).is_err());
    }
}
