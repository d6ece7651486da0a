//! Small dense linear algebra over the scalar types used by the engine.
//!
//! Everything here is fixed-size (dimension at most `DIM`) and allocation
//! free, so it stays generic over jet scalars without fuss.

use crate::real::{Real, DIM};

/// Euclidean dot product over the full component array.
pub fn dot<T: Real>(a: &[T; DIM], b: &[T; DIM]) -> T {
    let mut acc = T::zero();
    for i in 0..DIM {
        acc = acc + a[i] * b[i];
    }
    acc
}

/// Quadratic form `a^T m b`.
pub fn quadratic_form<T: Real>(m: &[[T; DIM]; DIM], a: &[T; DIM], b: &[T; DIM]) -> T {
    let mut acc = T::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            acc = acc + a[i] * m[i][j] * b[j];
        }
    }
    acc
}

/// Matrix-vector product with a full `DIM x DIM` matrix.
pub fn matvec<T: Real>(m: &[[T; DIM]; DIM], v: &[T; DIM]) -> [T; DIM] {
    std::array::from_fn(|i| {
        let mut acc = T::zero();
        for j in 0..DIM {
            acc = acc + m[i][j] * v[j];
        }
        acc
    })
}

/// Cross product of the first three components; the fourth slot stays zero.
pub fn cross3<T: Real>(a: &[T; DIM], b: &[T; DIM]) -> [T; DIM] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
        T::zero(),
    ]
}

pub fn det3<T: Real>(m: &[[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Solves the 3x3 system `a x = b` by Cramer's rule.
///
/// Returns `None` when the determinant's numeric value falls below `floor`,
/// so callers can attach point context to the failure.
pub fn solve3<T: Real>(a: &[[T; 3]; 3], b: &[T; 3], floor: f64) -> Option<[T; 3]> {
    let d = det3(a);
    // A NaN determinant must fail the test, so the negation stays outside.
    let invertible = d.value().abs() > floor;
    if !invertible {
        return None;
    }
    let mut x = [T::zero(); 3];
    for k in 0..3 {
        let mut ak = *a;
        for r in 0..3 {
            ak[r][k] = b[r];
        }
        x[k] = det3(&ak) / d;
    }
    Some(x)
}

/// Cholesky factorization of the leading `dim x dim` block of a symmetric
/// matrix. Returns the lower factor, or the offending pivot value when a
/// pivot drops below `floor` (the matrix is then not safely positive).
pub fn cholesky(
    m: &[[f64; DIM]; DIM],
    dim: usize,
    floor: f64,
) -> std::result::Result<[[f64; DIM]; DIM], f64> {
    let mut l = [[0.0; DIM]; DIM];
    for i in 0..dim {
        for j in 0..=i {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s < floor {
                    return Err(s);
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Eigenvalues of a symmetric 3x3 matrix via cyclic Jacobi sweeps,
/// returned in ascending order.
pub fn sym_eigen_3(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let mut a = *m;
    // Symmetry is an input contract; enforce it so rotations stay exact.
    for i in 0..3 {
        for j in (i + 1)..3 {
            let avg = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = avg;
            a[j][i] = avg;
        }
    }
    for _sweep in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off < 1e-15 {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..3 {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let mut rot = [[0.0; 3]; 3];
                for i in 0..3 {
                    rot[i][i] = 1.0;
                }
                rot[p][p] = c;
                rot[q][q] = c;
                rot[p][q] = s;
                rot[q][p] = -s;
                // a <- rot^T a rot
                let mut tmp = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        let mut acc = 0.0;
                        for k in 0..3 {
                            acc += a[i][k] * rot[k][j];
                        }
                        tmp[i][j] = acc;
                    }
                }
                let mut next = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        let mut acc = 0.0;
                        for k in 0..3 {
                            acc += rot[k][i] * tmp[k][j];
                        }
                        next[i][j] = acc;
                    }
                }
                a = next;
            }
        }
    }
    let mut ev = [a[0][0], a[1][1], a[2][2]];
    ev.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    ev
}
