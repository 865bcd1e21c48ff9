//! Two-qubit state representations and conversions between them.
//!
//! Basis order is `|00>, |01>, |10>, |11>` with qubit A the left factor.
//! Pauli convention: `sigma_1 = X`, `sigma_2 = Y`, `sigma_3 = Z`. The signs of
//! the X-state correlation matrix depend on this choice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    c, hermiticity_defect, herm_eigenvalues, kron, pauli, trace_product4, zero4, Mat4,
    SmallHermitian, SmallRect, C64, TOL,
};

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    entries: Mat4,
}

impl DensityMatrix {
    pub fn new(entries: Mat4) -> Result<Self> {
        let report = validate_density(&entries);
        if report.hermiticity_defect > TOL.hermiticity {
            return Err(Error::NonHermitian { defect: report.hermiticity_defect });
        }
        if report.trace_defect > TOL.trace {
            return Err(Error::Normalization { trace: trace(&entries) });
        }
        if report.min_eigenvalue < -TOL.psd {
            return Err(Error::Unphysical(format!(
                "minimum eigenvalue {:e} is negative",
                report.min_eigenvalue
            )));
        }
        Ok(Self { entries })
    }

    /// Projector onto a (not necessarily normalized) pure state.
    pub fn pure(psi: [C64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let mut m = zero4();
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = psi[i] * psi[j].conj() / (norm * norm);
            }
        }
        Self::new(m)
    }

    pub fn maximally_mixed() -> Self {
        let mut m = zero4();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = c(0.25, 0.0);
        }
        Self { entries: m }
    }

    pub fn entries(&self) -> &Mat4 {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i][j]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eigenvalues(&SmallHermitian::new(4, self.entries).expect("validated Hermitian"))
    }
}

fn trace(m: &Mat4) -> f64 {
    (0..4).map(|i| m[i][i].re).sum()
}

/// Outcome of checking an arbitrary `4 x 4` matrix against the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    pub passes: bool,
}

pub fn validate_density(m: &Mat4) -> ValidationReport {
    let hermiticity_defect = hermiticity_defect(4, m);
    let tr: C64 = (0..4).map(|i| m[i][i]).sum();
    let trace_defect = (tr - c(1.0, 0.0)).norm();
    let mut h = zero4();
    for i in 0..4 {
        for j in 0..4 {
            h[i][j] = 0.5 * (m[i][j] + m[j][i].conj());
        }
    }
    let min_eigenvalue = if h.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite()) {
        herm_eigenvalues(&SmallHermitian::new(4, h).expect("Hermitian part"))[3]
    } else {
        f64::NAN
    };
    let passes = hermiticity_defect <= TOL.hermiticity
        && trace_defect <= TOL.trace
        && min_eigenvalue >= -TOL.psd;
    ValidationReport { hermiticity_defect, trace_defect, min_eigenvalue, passes }
}

/// X-structured state: populations on the diagonal, coherences `rho14` and
/// `rho23` on the anti-diagonal. `rho41` and `rho32` are their conjugates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    rho11: f64,
    rho22: f64,
    rho33: f64,
    rho44: f64,
    rho14: C64,
    rho23: C64,
}

impl XState {
    pub fn rho11(&self) -> f64 {
        self.rho11
    }
    pub fn rho22(&self) -> f64 {
        self.rho22
    }
    pub fn rho33(&self) -> f64 {
        self.rho33
    }
    pub fn rho44(&self) -> f64 {
        self.rho44
    }
    pub fn rho14(&self) -> C64 {
        self.rho14
    }
    pub fn rho23(&self) -> C64 {
        self.rho23
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [self.rho11, self.rho22, self.rho33, self.rho44]
    }

    /// Same populations, coherences replaced. Used by channels, which keep
    /// both coherences inside their physical disks.
    pub(crate) fn with_coherences(&self, rho14: C64, rho23: C64) -> Self {
        Self { rho14, rho23, ..*self }
    }
}

pub fn make_x_state(
    rho11: f64,
    rho22: f64,
    rho33: f64,
    rho44: f64,
    rho14: C64,
    rho23: C64,
) -> Result<XState> {
    let values = [rho11, rho22, rho33, rho44, rho14.re, rho14.im, rho23.re, rho23.im];
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("X-state entries must be finite".into()));
    }
    let sum = rho11 + rho22 + rho33 + rho44;
    if (sum - 1.0).abs() > TOL.trace {
        return Err(Error::Normalization { trace: sum });
    }
    for (k, p) in [rho11, rho22, rho33, rho44].iter().enumerate() {
        if *p < -TOL.psd {
            return Err(Error::Unphysical(format!("population rho{0}{0} = {p} is negative", k + 1)));
        }
    }
    let outer = rho11 * rho44;
    if outer < rho14.norm_sqr() - TOL.psd {
        return Err(Error::Unphysical(format!(
            "block {{11,44}} violates rho11*rho44 >= |rho14|^2: {outer} < {}",
            rho14.norm_sqr()
        )));
    }
    let inner = rho22 * rho33;
    if inner < rho23.norm_sqr() - TOL.psd {
        return Err(Error::Unphysical(format!(
            "block {{22,33}} violates rho22*rho33 >= |rho23|^2: {inner} < {}",
            rho23.norm_sqr()
        )));
    }
    Ok(XState { rho11, rho22, rho33, rho44, rho14, rho23 })
}

pub fn x_to_density(s: &XState) -> DensityMatrix {
    let mut m = zero4();
    m[0][0] = c(s.rho11, 0.0);
    m[1][1] = c(s.rho22, 0.0);
    m[2][2] = c(s.rho33, 0.0);
    m[3][3] = c(s.rho44, 0.0);
    m[0][3] = s.rho14;
    m[3][0] = s.rho14.conj();
    m[1][2] = s.rho23;
    m[2][1] = s.rho23.conj();
    DensityMatrix { entries: m }
}

fn on_x_pattern(i: usize, j: usize) -> bool {
    i == j || i + j == 3
}

pub fn density_to_x(d: &DensityMatrix, tol: f64) -> Result<XState> {
    let offending: Vec<(usize, usize, f64)> = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .filter(|&(i, j)| !on_x_pattern(i, j))
        .map(|(i, j)| (i, j, d.entries[i][j].norm()))
        .filter(|&(_, _, m)| m >= tol)
        .collect();
    if !offending.is_empty() {
        return Err(Error::Structure { offending });
    }
    let e = &d.entries;
    make_x_state(e[0][0].re, e[1][1].re, e[2][2].re, e[3][3].re, e[0][3], e[1][2])
}

/// Local Bloch vectors `x`, `y` and correlation matrix `R` of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochForm {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub r: [[f64; 3]; 3],
}

impl BlochForm {
    pub fn within_bounds(&self) -> bool {
        let lim = 1.0 + TOL.bloch_bound;
        self.x.iter().chain(&self.y).chain(self.r.iter().flatten()).all(|v| v.abs() <= lim)
    }

    /// `||x||^2 + ||R||^2`.
    pub fn weight(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>() + self.r.iter().flatten().map(|v| v * v).sum::<f64>()
    }
}

pub fn bloch_decompose(d: &DensityMatrix) -> BlochForm {
    let id = pauli(0);
    let mut b = BlochForm::default();
    for i in 1..=3 {
        b.x[i - 1] = trace_product4(&d.entries, &kron(&pauli(i), &id)).re;
        b.y[i - 1] = trace_product4(&d.entries, &kron(&id, &pauli(i))).re;
        for j in 1..=3 {
            b.r[i - 1][j - 1] = trace_product4(&d.entries, &kron(&pauli(i), &pauli(j))).re;
        }
    }
    b
}

fn bloch_matrix(b: &BlochForm) -> Mat4 {
    let id = pauli(0);
    let mut m = kron(&id, &id);
    let mut add = |coef: f64, term: Mat4| {
        if coef != 0.0 {
            for (row, trow) in m.iter_mut().zip(term.iter()) {
                for (v, t) in row.iter_mut().zip(trow) {
                    *v += t * coef;
                }
            }
        }
    };
    for i in 1..=3 {
        add(b.x[i - 1], kron(&pauli(i), &id));
        add(b.y[i - 1], kron(&id, &pauli(i)));
        for j in 1..=3 {
            add(b.r[i - 1][j - 1], kron(&pauli(i), &pauli(j)));
        }
    }
    for v in m.iter_mut().flatten() {
        *v *= 0.25;
    }
    m
}

pub fn bloch_compose(b: &BlochForm) -> Result<DensityMatrix> {
    let m = bloch_matrix(b);
    let report = validate_density(&m);
    if report.min_eigenvalue < -TOL.psd || report.min_eigenvalue.is_nan() {
        return Err(Error::UnphysicalBloch { min_eigenvalue: report.min_eigenvalue });
    }
    DensityMatrix::new(m)
}

/// Correlation matrix of an X state evaluated entry by entry from the
/// closed form, before discarding imaginary parts.
pub fn x_state_correlation(s: &XState) -> [[C64; 3]; 3] {
    let (p14, p23) = (s.rho14, s.rho23);
    let (p41, p32) = (p14.conj(), p23.conj());
    let i = c(0.0, 1.0);
    let z = c(0.0, 0.0);
    [
        [p14 + p23 + p32 + p41, i * (p14 - p23 + p32 - p41), z],
        [i * (p14 + p23 - p32 - p41), -p14 + p23 + p32 - p41, z],
        [z, z, c(s.rho11 - s.rho22 - s.rho33 + s.rho44, 0.0)],
    ]
}

/// Largest imaginary part left in the closed-form correlation matrix.
/// Zero for any Hermitian X state.
pub fn x_state_correlation_residue(s: &XState) -> f64 {
    x_state_correlation(s).iter().flatten().map(|z| z.im.abs()).fold(0.0, f64::max)
}

pub fn x_state_bloch(s: &XState) -> BlochForm {
    let rc = x_state_correlation(s);
    debug_assert!(x_state_correlation_residue(s) < 1e-14);
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = rc[i][j].re;
        }
    }
    BlochForm {
        x: [0.0, 0.0, s.rho11 + s.rho22 - s.rho33 - s.rho44],
        y: [0.0, 0.0, s.rho11 - s.rho22 + s.rho33 - s.rho44],
        r,
    }
}

/// `[x | R]`: the `3 x 4` matrix whose singular values determine the discord.
pub fn build_r_prime(b: &BlochForm) -> SmallRect {
    let mut e = [[0.0; 4]; 3];
    for i in 0..3 {
        e[i][0] = b.x[i];
        e[i][1..].copy_from_slice(&b.r[i]);
    }
    SmallRect::new(e)
}

/// Parameters of `1/4 [I + r Z(x)I + s I(x)Z + sum_i c_i sigma_i (x) sigma_i]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalParams {
    pub r: f64,
    pub s: f64,
    pub c: [f64; 3],
}

impl BellDiagonalParams {
    pub fn new(r: f64, s: f64, c: [f64; 3]) -> Self {
        Self { r, s, c }
    }

    pub fn bell(c: [f64; 3]) -> Self {
        Self { r: 0.0, s: 0.0, c }
    }

    fn check_range(&self) -> Result<()> {
        let all = [self.r, self.s, self.c[0], self.c[1], self.c[2]];
        if all.iter().any(|v| !v.is_finite() || v.abs() > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "r, s and c_i must lie in [-1, 1], got r={}, s={}, c={:?}",
                self.r, self.s, self.c
            )));
        }
        Ok(())
    }
}

pub fn bell_diagonal_state(p: &BellDiagonalParams) -> Result<XState> {
    p.check_range()?;
    let (r, s, [c1, c2, c3]) = (p.r, p.s, p.c);
    let rho11 = (1.0 + r + s + c3) / 4.0;
    let rho22 = (1.0 + r - s - c3) / 4.0;
    let rho33 = (1.0 - r + s - c3) / 4.0;
    let rho44 = (1.0 - r - s + c3) / 4.0;
    let rho14 = c((c1 - c2) / 4.0, 0.0);
    let rho23 = c((c1 + c2) / 4.0, 0.0);
    let candidate = XState { rho11, rho22, rho33, rho44, rho14, rho23 };
    let min_eigenvalue = x_to_density(&candidate).eigenvalues()[3];
    if min_eigenvalue < -TOL.psd {
        return Err(Error::Unphysical(format!(
            "Bell-diagonal parameters r={r}, s={s}, c=({c1}, {c2}, {c3}) give minimum eigenvalue {min_eigenvalue:e}"
        )));
    }
    make_x_state(rho11, rho22, rho33, rho44, rho14, rho23)
}

/// Inverse of [`bell_diagonal_state`] for states with real coherences.
pub fn bell_params_of(s: &XState) -> BellDiagonalParams {
    let b = x_state_bloch(s);
    BellDiagonalParams { r: b.x[2], s: b.y[2], c: [b.r[0][0], b.r[1][1], b.r[2][2]] }
}

/// JSON state description. Exactly one variant key must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateInput {
    XState(XStateJson),
    BellDiagonal(BellDiagonalParams),
    Dense([[[f64; 2]; 4]; 4]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XStateJson {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho44: f64,
    pub rho14: [f64; 2],
    pub rho23: [f64; 2],
}

/// A parsed and validated state together with its most specific form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolvedState {
    X(XState),
    BellDiagonal(BellDiagonalParams, XState),
    Dense(DensityMatrix),
}

impl ResolvedState {
    pub fn density(&self) -> DensityMatrix {
        match self {
            ResolvedState::X(s) | ResolvedState::BellDiagonal(_, s) => x_to_density(s),
            ResolvedState::Dense(d) => *d,
        }
    }

    /// The X-state view, if the state has X structure (dense input is
    /// converted with the default structure tolerance).
    pub fn x_state(&self) -> Result<XState> {
        match self {
            ResolvedState::X(s) | ResolvedState::BellDiagonal(_, s) => Ok(*s),
            ResolvedState::Dense(d) => density_to_x(d, TOL.x_structure),
        }
    }
}

impl StateInput {
    pub fn resolve(&self) -> Result<ResolvedState> {
        match self {
            StateInput::XState(x) => Ok(ResolvedState::X(make_x_state(
                x.rho11,
                x.rho22,
                x.rho33,
                x.rho44,
                c(x.rho14[0], x.rho14[1]),
                c(x.rho23[0], x.rho23[1]),
            )?)),
            StateInput::BellDiagonal(p) => Ok(ResolvedState::BellDiagonal(*p, bell_diagonal_state(p)?)),
            StateInput::Dense(rows) => {
                let mut m = zero4();
                for i in 0..4 {
                    for j in 0..4 {
                        m[i][j] = c(rows[i][j][0], rows[i][j][1]);
                    }
                }
                Ok(ResolvedState::Dense(DensityMatrix::new(m)?))
            }
        }
    }

    pub fn from_x_state(s: &XState) -> Self {
        StateInput::XState(XStateJson {
            rho11: s.rho11,
            rho22: s.rho22,
            rho33: s.rho33,
            rho44: s.rho44,
            rho14: [s.rho14.re, s.rho14.im],
            rho23: [s.rho23.re, s.rho23.im],
        })
    }
}
