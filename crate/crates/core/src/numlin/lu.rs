use super::matrix::{ComplexMatrix, C64};

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(a: &ComplexMatrix) -> C64 {
    assert!(a.is_square(), "determinant of a non-square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm()))
            .unwrap_or(col);
        let p = m[(pivot, col)];
        if p.norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = tmp;
            }
            det = -det;
        }
        det *= p;
        for i in col + 1..n {
            let f = m[(i, col)] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for j in col + 1..n {
                let v = m[(col, j)];
                m[(i, j)] -= f * v;
            }
        }
    }
    det
}
