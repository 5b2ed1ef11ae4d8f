//! Dense operator algebra on the truncated Fock basis {|0⟩ … |N⟩}.
//!
//! Single-mode operators act on the relative-motion mode (ladder â, tagged
//! `Mode::A`) or the orbit-center mode (b̂, tagged `Mode::B`); two-mode
//! operators live on the tensor-product basis |m, n⟩ = |m⟩_B ⊗ |n⟩_A with
//! flattened index m·(N+1) + n.
//!
//! Truncation artifacts are confined to the matrix boundary: a product of
//! k ladder factors is exact on the "trust band" of indices 0 ‥ N−k, and
//! every identity test in this crate states its band explicitly. The
//! canonical example is [â, â†], whose truncated diagonal is
//! (1, 1, …, 1, −N).

use crate::error::{CoreError, Result};
use crate::params::{DerivedParams, CRITICAL_EPS};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Which tensor factor(s) an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Relative-motion mode (â, r̂_±, Ĵ, Ĥ).
    A,
    /// Orbit-center mode (b̂, r̂_{0±}, x̂₀).
    B,
    /// Two-mode tensor product.
    AB,
}

/// Dense complex matrix on the truncated basis, carrying its truncation
/// level, mode tag and total ladder order (for the trust-band contract).
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    mat: DMatrix<Complex64>,
    n_max: usize,
    mode: Mode,
    ladder_order: usize,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl TruncatedOperator {
    pub fn new(mat: DMatrix<Complex64>, n_max: usize, mode: Mode, ladder_order: usize) -> Self {
        let dim = match mode {
            Mode::AB => (n_max + 1) * (n_max + 1),
            _ => n_max + 1,
        };
        assert_eq!(mat.nrows(), dim, "matrix does not match truncation level");
        assert_eq!(mat.ncols(), dim);
        Self {
            mat,
            n_max,
            mode,
            ladder_order,
        }
    }

    pub fn zeros(n_max: usize, mode: Mode) -> Self {
        let dim = match mode {
            Mode::AB => (n_max + 1) * (n_max + 1),
            _ => n_max + 1,
        };
        Self::new(DMatrix::zeros(dim, dim), n_max, mode, 0)
    }

    pub fn identity(n_max: usize, mode: Mode) -> Self {
        let dim = match mode {
            Mode::AB => (n_max + 1) * (n_max + 1),
            _ => n_max + 1,
        };
        Self::new(DMatrix::identity(dim, dim), n_max, mode, 0)
    }

    pub fn from_diagonal(diag: &[f64], mode: Mode) -> Self {
        let n_max = diag.len() - 1;
        let mut m = DMatrix::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = c(v);
        }
        Self::new(m, n_max, mode, 0)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn ladder_order(&self) -> usize {
        self.ladder_order
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Highest basis index on which expressions of this ladder order are
    /// unaffected by the cutoff.
    pub fn trust_band(&self) -> usize {
        self.n_max.saturating_sub(self.ladder_order)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            n_max: self.n_max,
            mode: self.mode,
            ladder_order: self.ladder_order,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            mat: &self.mat * s,
            n_max: self.n_max,
            mode: self.mode,
            ladder_order: self.ladder_order,
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s))
    }

    fn check_compat(&self, other: &Self) {
        assert_eq!(self.n_max, other.n_max, "truncation levels differ");
        assert_eq!(self.mode, other.mode, "modes differ");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compat(other);
        Self {
            mat: &self.mat + &other.mat,
            n_max: self.n_max,
            mode: self.mode,
            ladder_order: self.ladder_order.max(other.ladder_order),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_compat(other);
        Self {
            mat: &self.mat - &other.mat,
            n_max: self.n_max,
            mode: self.mode,
            ladder_order: self.ladder_order.max(other.ladder_order),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compat(other);
        Self {
            mat: &self.mat * &other.mat,
            n_max: self.n_max,
            mode: self.mode,
            ladder_order: self.ladder_order + other.ladder_order,
        }
    }

    /// [self, other] = self·other − other·self.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Lift a single-mode operator to the two-mode space. A-mode operators
    /// become I ⊗ M, B-mode operators M ⊗ I.
    pub fn to_two_mode(&self) -> Self {
        let id = DMatrix::<Complex64>::identity(self.n_max + 1, self.n_max + 1);
        let mat = match self.mode {
            Mode::A => id.kronecker(&self.mat),
            Mode::B => self.mat.kronecker(&id),
            Mode::AB => return self.clone(),
        };
        Self::new(mat, self.n_max, Mode::AB, self.ladder_order)
    }

    /// Max |entry| deviation from Hermitian.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.mat.adjoint();
        self.mat
            .iter()
            .zip(adj.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() < tol
    }

    /// Is the flattened two-mode (or plain single-mode) index inside the
    /// band 0..=band on every mode?
    fn index_in_band(&self, idx: usize, band: usize) -> bool {
        match self.mode {
            Mode::AB => {
                let w = self.n_max + 1;
                idx / w <= band && idx % w <= band
            }
            _ => idx <= band,
        }
    }

    /// Max |entry| over rows and columns within the band.
    pub fn max_abs_on_band(&self, band: usize) -> f64 {
        let mut out = 0.0_f64;
        for i in 0..self.dim() {
            if !self.index_in_band(i, band) {
                continue;
            }
            for j in 0..self.dim() {
                if !self.index_in_band(j, band) {
                    continue;
                }
                out = out.max(self.mat[(i, j)].norm());
            }
        }
        out
    }

    /// Max |self − other| over the band.
    pub fn band_distance(&self, other: &Self, band: usize) -> f64 {
        self.check_compat(other);
        self.sub(other).max_abs_on_band(band)
    }

    /// Apply to a state vector.
    pub fn apply(&self, v: &FockStateVector) -> FockStateVector {
        assert_eq!(v.coeffs.len(), self.dim());
        FockStateVector {
            coeffs: &self.mat * &v.coeffs,
        }
    }

    /// Expectation ⟨v|M|v⟩ / ⟨v|v⟩.
    pub fn expectation(&self, v: &FockStateVector) -> Complex64 {
        let mv = &self.mat * &v.coeffs;
        v.coeffs.dotc(&mv) / v.coeffs.dotc(&v.coeffs)
    }

    /// Plain-text triplet dump `row col re im`, one nonzero entry per line,
    /// row-major, 17 significant digits.
    pub fn dump_triplets<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.mat.nrows() {
            for j in 0..self.mat.ncols() {
                let z = self.mat[(i, j)];
                if z != Complex64::new(0.0, 0.0) {
                    writeln!(w, "{} {} {:.16e} {:.16e}", i, j, z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}

/// Complex coefficient vector c_0 ‥ c_N (or the flattened two-mode tensor).
#[derive(Debug, Clone)]
pub struct FockStateVector {
    pub coeffs: DVector<Complex64>,
}

impl FockStateVector {
    pub fn new(coeffs: DVector<Complex64>) -> Self {
        assert!(coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self { coeffs }
    }

    pub fn from_slice(coeffs: &[Complex64]) -> Self {
        Self::new(DVector::from_column_slice(coeffs))
    }

    pub fn basis_state(n: usize, n_max: usize) -> Self {
        let mut v = DVector::zeros(n_max + 1);
        v[n] = Complex64::new(1.0, 0.0);
        Self { coeffs: v }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = DVector::zeros(self.coeffs.len() * other.coeffs.len());
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i * other.coeffs.len() + j] = a * b;
            }
        }
        Self { coeffs: out }
    }
}

/// Annihilation and creation operators: a|n⟩ = √n|n−1⟩, a† = aᵀ*.
pub fn ladder(n_max: usize, mode: Mode) -> (TruncatedOperator, TruncatedOperator) {
    assert!(n_max >= 1, "need at least a two-level truncation");
    assert!(mode != Mode::AB, "ladder operators are single-mode");
    let dim = n_max + 1;
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = c((n as f64).sqrt());
    }
    let a = TruncatedOperator::new(a, n_max, mode, 1);
    let a_dag = a.adjoint();
    (a, a_dag)
}

/// N̂ = a†a = diag(0, 1, …, N). Exact on the whole truncated space.
pub fn number_operator(n_max: usize, mode: Mode) -> TruncatedOperator {
    let diag: Vec<f64> = (0..=n_max).map(|n| n as f64).collect();
    TruncatedOperator::from_diagonal(&diag, mode)
}

/// Symmetric-gauge Hamiltonian ħω̃(N̂ + ½) on the relative mode, with
/// spectrum E_n = ħω̃(n + ½).
pub fn hamiltonian_symmetric(d: &DerivedParams, n_max: usize) -> Result<TruncatedOperator> {
    if d.mu_s.abs() < CRITICAL_EPS {
        return Err(CoreError::CriticalRegime {
            context: "symmetric-gauge Hamiltonian",
            parameter: "mu_s",
            value: d.mu_s,
        });
    }
    let diag: Vec<f64> = (0..=n_max)
        .map(|n| d.params.hbar * d.omega_tilde * (n as f64 + 0.5))
        .collect();
    Ok(TruncatedOperator::from_diagonal(&diag, Mode::A))
}

/// Landau-gauge Hamiltonian ħω(â†â + ½): the spectrum is θ-independent
/// in this gauge.
pub fn hamiltonian_landau(d: &DerivedParams, n_max: usize) -> TruncatedOperator {
    let diag: Vec<f64> = (0..=n_max)
        .map(|n| d.params.hbar * d.omega * (n as f64 + 0.5))
        .collect();
    TruncatedOperator::from_diagonal(&diag, Mode::A)
}

/// Angular momentum Ĵ = diag((2n+1)ħ) on the relative mode; equals
/// (2/ω̃)Ĥ_θ entrywise and generates rotations: [Ĵ, r̂_±] = ±2ħ r̂_±.
pub fn angular_momentum(hbar: f64, n_max: usize) -> TruncatedOperator {
    let diag: Vec<f64> = (0..=n_max).map(|n| hbar * (2.0 * n as f64 + 1.0)).collect();
    TruncatedOperator::from_diagonal(&diag, Mode::A)
}

/// Squeezed lowering operator
/// Ẑ_λ = ℓ Σ_{n≥1} e^{λn/2} √n |n−1⟩⟨n| (ℓ = 1 in CS units).
/// λ = 0 reduces to ℓ·â; λ = 2 is the circular-CS operator Ẑ.
pub fn z_lambda(lambda: f64, n_max: usize, scale: f64) -> TruncatedOperator {
    assert!(lambda >= 0.0, "lambda must be nonnegative");
    let dim = n_max + 1;
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = c(scale * (0.5 * lambda * n as f64).exp() * (n as f64).sqrt());
    }
    TruncatedOperator::new(m, n_max, Mode::A, 1)
}

/// Center and relative-motion operators in the symmetric gauge.
///
/// With s = √(2ħ/m̃ω̃):
/// r̂_{0+} = s b̂ (lowers m), r̂_{0−} = s b̂† (raises m),
/// r̂_{+} = s â† (raises n), r̂_{−} = s â (lowers n),
/// x̂₀ⁱ from r̂_{0±}, relative coordinates r̂ⁱ from r̂_±, and the kinematic
/// momenta P̂₁ = −m̃ω̃ r̂², P̂₂ = m̃ω̃ r̂¹.
pub struct CenterRelativeOps {
    pub r0_plus: TruncatedOperator,
    pub r0_minus: TruncatedOperator,
    pub r_plus: TruncatedOperator,
    pub r_minus: TruncatedOperator,
    /// Center coordinates x̂₀¹, x̂₀² (mode B).
    pub x0: [TruncatedOperator; 2],
    /// Relative coordinates r̂¹, r̂² (mode A).
    pub r: [TruncatedOperator; 2],
    /// Kinematic momenta P̂₁, P̂₂ (mode A).
    pub p_kin: [TruncatedOperator; 2],
}

pub fn center_and_relative(d: &DerivedParams, n_max: usize) -> Result<CenterRelativeOps> {
    let mw = d.scale_mw()?;
    let s = (2.0 * d.params.hbar / mw).sqrt();
    let (a, a_dag) = ladder(n_max, Mode::A);
    let (b, b_dag) = ladder(n_max, Mode::B);

    let r0_plus = b.scale_re(s);
    let r0_minus = b_dag.scale_re(s);
    let r_plus = a_dag.scale_re(s);
    let r_minus = a.scale_re(s);

    let half = c(0.5);
    let half_i = Complex64::new(0.0, -0.5); // 1/(2i)
    let x0 = [
        r0_plus.add(&r0_minus).scale(half),
        r0_plus.sub(&r0_minus).scale(half_i),
    ];
    let r = [
        r_plus.add(&r_minus).scale(half),
        r_plus.sub(&r_minus).scale(half_i),
    ];
    let p_kin = [r[1].scale_re(-mw), r[0].scale_re(mw)];

    Ok(CenterRelativeOps {
        r0_plus,
        r0_minus,
        r_plus,
        r_minus,
        x0,
        r,
        p_kin,
    })
}

/// Two-mode position and canonical momentum operators assembled from the
/// ladder pairs (the coherent-state quantization of the classical phase
/// space, with the ½ factors required by [x̂ⁱ, p̂_j] = iħδ):
///
/// x̂¹ = (Sₓ/2)(â+â†+b̂+b̂†),  x̂² = (iSₓ/2)(â−â†−b̂+b̂†),
/// p̂₁ = (iS_p/2)(â†−â+b̂†−b̂), p̂₂ = (S_p/2)(â+â†−b̂−b̂†),
///
/// with Sₓ = √(2ħ/m̃ω̃) and S_p = √(m̃ω̃ħ/2).
pub fn position_momentum_two_mode(
    d: &DerivedParams,
    n_max: usize,
) -> Result<([TruncatedOperator; 2], [TruncatedOperator; 2])> {
    let mw = d.scale_mw()?;
    let sx = (2.0 * d.params.hbar / mw).sqrt();
    let sp = (mw * d.params.hbar / 2.0).sqrt();
    let (a, a_dag) = ladder(n_max, Mode::A);
    let (a, a_dag) = (a.to_two_mode(), a_dag.to_two_mode());
    let (b, b_dag) = ladder(n_max, Mode::B);
    let (b, b_dag) = (b.to_two_mode(), b_dag.to_two_mode());

    let i = Complex64::new(0.0, 1.0);
    let x1 = a.add(&a_dag).add(&b).add(&b_dag).scale(c(0.5 * sx));
    let x2 = a.sub(&a_dag).sub(&b).add(&b_dag).scale(i * c(0.5 * sx));
    let p1 = a_dag.sub(&a).add(&b_dag).sub(&b).scale(i * c(0.5 * sp));
    let p2 = a.add(&a_dag).sub(&b).sub(&b_dag).scale(c(0.5 * sp));
    Ok(([x1, x2], [p1, p2]))
}

/// Result of rebuilding the noncommuting positions from the two-mode
/// commuting pair: q̂ᵏ = x̂ᵏ − (θ/2ħ) ε^{kj} p̂_j.
pub struct PositionReconstruction {
    pub q: [TruncatedOperator; 2],
    pub x: [TruncatedOperator; 2],
    pub p: [TruncatedOperator; 2],
    /// ‖[q̂¹, q̂²] − iθ·I‖_max over the trust band.
    pub commutator_defect: f64,
}

pub fn reconstruct_noncommuting_positions(
    d: &DerivedParams,
    n_max: usize,
) -> Result<PositionReconstruction> {
    let (x, p) = position_momentum_two_mode(d, n_max)?;
    let half = d.params.theta / (2.0 * d.params.hbar);
    let q1 = x[0].sub(&p[1].scale_re(half));
    let q2 = x[1].add(&p[0].scale_re(half));

    let comm = q1.commutator(&q2);
    let target =
        TruncatedOperator::identity(n_max, Mode::AB).scale(Complex64::new(0.0, d.params.theta));
    let band = n_max.saturating_sub(2);
    let commutator_defect = comm.band_distance(&target, band);

    Ok(PositionReconstruction {
        q: [q1, q2],
        x,
        p,
        commutator_defect,
    })
}

/// The θ = θ_c^S Hamiltonian (eB/2c)²(x̂¹² + x̂²²)/2m, which depends on
/// positions only. Expressed on the ladder basis of the supplied
/// (necessarily non-critical) parameter point.
pub fn hamiltonian_critical_sym(d: &DerivedParams, n_max: usize) -> Result<TruncatedOperator> {
    let (x, _) = position_momentum_two_mode(d, n_max)?;
    let p = &d.params;
    let k = p.charge * p.b_field / (2.0 * p.c);
    let pref = k * k / (2.0 * p.mass);
    Ok(x[0].mul(&x[0]).add(&x[1].mul(&x[1])).scale_re(pref))
}
