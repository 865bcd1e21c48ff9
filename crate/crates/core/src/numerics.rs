//! Dense kernels for matrices of dimension at most four.
//!
//! Everything here works on fixed-size arrays. The Hermitian eigensolver runs
//! cyclic Jacobi rotations on the real `2n x 2n` embedding
//! `[[Re, -Im], [Im, Re]]`, whose spectrum is the Hermitian spectrum with
//! every eigenvalue doubled. Singular values of the `3 x 4` real matrices come
//! from the eigenvalues of `m m^T`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

/// Numerical tolerances shared by production code and tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max `|m[i][j] - conj(m[j][i])|` accepted as Hermitian.
    pub hermiticity: f64,
    /// Max `|tr(rho) - 1|`.
    pub trace: f64,
    /// Smallest eigenvalue accepted as positive semidefinite is `-psd`.
    pub psd: f64,
    /// Jacobi sweeps stop once the off-diagonal Frobenius norm falls below this.
    pub jacobi_off_diagonal: f64,
    /// Negative eigenvalues of `m m^T` down to `-svd_clamp` are rounded to zero.
    pub svd_clamp: f64,
    /// Default magnitude below which off-X entries count as zero.
    pub x_structure: f64,
    /// Max `||sum K^dag K - I||` for a Kraus set.
    pub kraus_completeness: f64,
    /// Slack on the `[-1, 1]` bound of Bloch components.
    pub bloch_bound: f64,
    /// Slack used by both freezing conditions.
    pub freeze: f64,
    /// Two candidate maxima closer than this are treated as tied.
    pub max_tie: f64,
}

pub const TOL: Tolerances = Tolerances {
    hermiticity: 1e-12,
    trace: 1e-12,
    psd: 1e-12,
    jacobi_off_diagonal: 1e-14,
    svd_clamp: 1e-13,
    x_structure: 1e-9,
    kraus_completeness: 1e-12,
    bloch_bound: 1e-12,
    freeze: 1e-9,
    max_tie: 1e-14,
};

const MAX_SWEEPS: usize = 64;

/// Complex Hermitian matrix of dimension 2, 3 or 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallHermitian {
    dim: usize,
    entries: Mat4,
}

impl SmallHermitian {
    /// Builds a Hermitian matrix from the leading `dim x dim` block of `entries`.
    pub fn new(dim: usize, entries: Mat4) -> Result<Self> {
        if !(2..=4).contains(&dim) {
            return Err(Error::Dimension(dim));
        }
        let defect = hermiticity_defect(dim, &entries);
        if defect > TOL.hermiticity {
            return Err(Error::NonHermitian { defect });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if !(2..=4).contains(&dim) || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension(dim));
        }
        let mut entries = [[C64::new(0.0, 0.0); 4]; 4];
        for (i, row) in rows.iter().enumerate() {
            entries[i][..dim].copy_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn from_mat4(m: &Mat4) -> Result<Self> {
        Self::new(4, *m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i][j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entries[i][i].re).sum()
    }
}

/// Largest `|m[i][j] - conj(m[j][i])|` over the leading `dim x dim` block.
pub fn hermiticity_defect(dim: usize, m: &Mat4) -> f64 {
    let mut defect: f64 = 0.0;
    for i in 0..dim {
        for j in i..dim {
            defect = defect.max((m[i][j] - m[j][i].conj()).norm());
        }
    }
    defect
}

/// Real `3 x 4` matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SmallRect {
    pub entries: [[f64; 4]; 3],
}

impl SmallRect {
    pub fn new(entries: [[f64; 4]; 3]) -> Self {
        Self { entries }
    }

    pub fn zeros() -> Self {
        Self::default()
    }

    /// `m m^T`, a symmetric `3 x 3` matrix.
    pub fn gram(&self) -> [[f64; 3]; 3] {
        let mut g = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = (0..4).map(|k| self.entries[i][k] * self.entries[j][k]).sum();
            }
        }
        g
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().flatten().map(|v| v * v).sum()
    }
}

/// Eigenvalues of a Hermitian matrix, sorted in descending order.
pub fn herm_eigenvalues(m: &SmallHermitian) -> Vec<f64> {
    let n = m.dim;
    let mut a = [[0.0; 8]; 8];
    for i in 0..n {
        for j in 0..n {
            let z = m.entries[i][j];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    let mut doubled = jacobi_eigenvalues(&mut a, 2 * n);
    doubled.sort_by(|x, y| y.total_cmp(x));
    // Each eigenvalue appears twice in the embedding; average the pair.
    doubled
        .chunks(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect()
}

/// Eigenvalues of a real symmetric `3 x 3` matrix, descending.
pub fn sym3_eigenvalues(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let mut a = [[0.0; 8]; 8];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = 0.5 * (m[i][j] + m[j][i]);
        }
    }
    let mut vals = jacobi_eigenvalues(&mut a, 3);
    vals.sort_by(|x, y| y.total_cmp(x));
    [vals[0], vals[1], vals[2]]
}

/// Singular values of a `3 x 4` real matrix, descending.
pub fn singular_values(m: &SmallRect) -> [f64; 3] {
    let eig = sym3_eigenvalues(&m.gram());
    eig.map(|v| {
        debug_assert!(v >= -TOL.svd_clamp * 1e3, "m m^T eigenvalue {v} far below zero");
        if v < 0.0 {
            0.0
        } else {
            v.sqrt()
        }
    })
}

fn off_diagonal_norm(a: &[[f64; 8]; 8], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i][j] * a[i][j];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi on the leading `n x n` block of a symmetric matrix.
fn jacobi_eigenvalues(a: &mut [[f64; 8]; 8], n: usize) -> Vec<f64> {
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a, n) < TOL.jacobi_off_diagonal {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                if s == 0.0 {
                    continue;
                }
                rotated = true;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
            }
        }
        if !rotated {
            break;
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zero4() -> Mat4 {
    [[C64::new(0.0, 0.0); 4]; 4]
}

pub fn identity2() -> Mat2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}

/// Pauli matrices, `index` 0 = identity, 1 = X, 2 = Y, 3 = Z.
pub fn pauli(index: usize) -> Mat2 {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match index {
        0 => identity2(),
        1 => [[o, one], [one, o]],
        2 => [[o, -i], [i, o]],
        3 => [[one, o], [o, -one]],
        _ => panic!("Pauli index {index} out of range"),
    }
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = zero4();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul4(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = zero4();
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn dagger4(a: &Mat4) -> Mat4 {
    let mut out = zero4();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

pub fn dagger2(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `tr(a b)`.
pub fn trace_product4(a: &Mat4, b: &Mat4) -> C64 {
    let mut s = c(0.0, 0.0);
    for i in 0..4 {
        for k in 0..4 {
            s += a[i][k] * b[k][i];
        }
    }
    s
}

/// Squared Hilbert-Schmidt norm `sum |m_ij|^2`.
pub fn hs_norm_sq4(m: &Mat4) -> f64 {
    m.iter().flatten().map(|z| z.norm_sqr()).sum()
}

pub fn max_abs_diff4(a: &Mat4, b: &Mat4) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}
