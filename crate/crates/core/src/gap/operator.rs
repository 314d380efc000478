use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, sym_generalized_eigvals, SymMatrix};

/// Symmetric operator written in blocks under a splitting `H = H₊ ⊕ H₋`,
/// together with the Gram matrices of the trial bases on each side.
///
/// The lower block `amm` is the matrix of the form `a` on the lower space,
/// i.e. minus the matrix of `b`. Its largest generalized eigenvalue against
/// `sm` is `λ₀`, computed once at construction.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    app: SymMatrix,
    apm: DMatrix<f64>,
    amm: SymMatrix,
    sp: SymMatrix,
    sm: SymMatrix,
    lambda0: f64,
}

impl BlockOperator {
    pub fn new(
        app: SymMatrix,
        apm: DMatrix<f64>,
        amm: SymMatrix,
        sp: SymMatrix,
        sm: SymMatrix,
    ) -> Result<Self> {
        let (np, nm) = (app.dim(), amm.dim());
        let mismatch = |expected, found| Error::DimensionMismatch { expected, found };
        if apm.nrows() != np {
            return Err(mismatch(np, apm.nrows()));
        }
        if apm.ncols() != nm {
            return Err(mismatch(nm, apm.ncols()));
        }
        if sp.dim() != np {
            return Err(mismatch(np, sp.dim()));
        }
        if sm.dim() != nm {
            return Err(mismatch(nm, sm.dim()));
        }
        if apm.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        cholesky(&sp)?;
        let lambda0 = *sym_generalized_eigvals(&amm, &sm)?
            .last()
            .expect("lower block is nonempty");
        Ok(Self {
            app,
            apm,
            amm,
            sp,
            sm,
            lambda0,
        })
    }

    /// Operator given directly in orthonormal coordinates.
    pub fn orthonormal(app: SymMatrix, apm: DMatrix<f64>, amm: SymMatrix) -> Result<Self> {
        let (np, nm) = (app.dim(), amm.dim());
        Self::new(app, apm, amm, SymMatrix::identity(np), SymMatrix::identity(nm))
    }

    pub fn n_plus(&self) -> usize {
        self.app.dim()
    }

    pub fn n_minus(&self) -> usize {
        self.amm.dim()
    }

    pub fn app(&self) -> &SymMatrix {
        &self.app
    }

    pub fn apm(&self) -> &DMatrix<f64> {
        &self.apm
    }

    pub fn amm(&self) -> &SymMatrix {
        &self.amm
    }

    pub fn sp(&self) -> &SymMatrix {
        &self.sp
    }

    pub fn sm(&self) -> &SymMatrix {
        &self.sm
    }

    /// Supremum of the form `a` on the lower space: the largest generalized
    /// eigenvalue of `(amm, sm)`.
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// Reference magnitude used to make tolerances relative.
    pub fn scale(&self) -> f64 {
        self.app
            .max_abs()
            .max(self.amm.max_abs())
            .max(self.apm.amax())
            .max(1.0)
    }

    pub fn is_orthonormal(&self) -> bool {
        self.sp.is_identity() && self.sm.is_identity()
    }

    /// The assembled matrix `[[App, Apm], [Apmᵀ, Amm]]`.
    pub fn full_matrix(&self) -> SymMatrix {
        let (np, nm) = (self.n_plus(), self.n_minus());
        let mut m = DMatrix::zeros(np + nm, np + nm);
        m.view_mut((0, 0), (np, np)).copy_from(self.app.matrix());
        m.view_mut((0, np), (np, nm)).copy_from(&self.apm);
        m.view_mut((np, 0), (nm, np)).copy_from(&self.apm.transpose());
        m.view_mut((np, np), (nm, nm)).copy_from(self.amm.matrix());
        SymMatrix::from_lower(m)
    }

    /// The block-diagonal Gram matrix `diag(Sp, Sm)`.
    pub fn full_overlap(&self) -> SymMatrix {
        let (np, nm) = (self.n_plus(), self.n_minus());
        let mut m = DMatrix::zeros(np + nm, np + nm);
        m.view_mut((0, 0), (np, np)).copy_from(self.sp.matrix());
        m.view_mut((np, np), (nm, nm)).copy_from(self.sm.matrix());
        SymMatrix::from_lower(m)
    }

    /// All eigenvalues of the full pencil, ascending.
    pub fn full_spectrum(&self) -> Result<Vec<f64>> {
        sym_generalized_eigvals(&self.full_matrix(), &self.full_overlap())
    }
}

pub fn lambda0(op: &BlockOperator) -> f64 {
    op.lambda0()
}

/// Rewrites the operator in coordinates where both Gram matrices are the
/// identity, by congruence with the inverse Cholesky factors. Every
/// generalized eigenvalue derived from the operator is unchanged.
pub fn orthonormalize(op: &BlockOperator) -> Result<BlockOperator> {
    if op.is_orthonormal() {
        return Ok(op.clone());
    }
    let fp = cholesky(op.sp())?;
    let fm = cholesky(op.sm())?;
    let congruent = |f: &crate::linalg::SpdFactor, m: &DMatrix<f64>| -> Result<SymMatrix> {
        let y = f.solve_lower(m)?;
        Ok(SymMatrix::symmetrized(&f.solve_lower(&y.transpose())?))
    };
    let app = congruent(&fp, op.app().matrix())?;
    let amm = congruent(&fm, op.amm().matrix())?;
    // Lp⁻¹ · Apm · Lm⁻ᵀ
    let left = fp.solve_lower(op.apm())?;
    let apm = fm.solve_lower(&left.transpose())?.transpose();
    BlockOperator::orthonormal(app, apm, amm)
}

/// Second-difference discretization of `diag(-Δ, Δ)` on `(0, length)` with
/// Dirichlet conditions and `n` interior points.
pub fn toy_laplacian_block(n: usize, length: f64) -> Result<BlockOperator> {
    if n == 0 {
        return Err(Error::InvalidConfig("toy block needs n >= 1".into()));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "toy block length must be positive, got {length}"
        )));
    }
    let h = length / (n + 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let lap = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0 * inv_h2,
        1 => -inv_h2,
        _ => 0.0,
    });
    let app = SymMatrix::from_lower(lap.clone());
    let amm = SymMatrix::from_lower(-lap);
    BlockOperator::orthonormal(app, DMatrix::zeros(n, n), amm)
}
