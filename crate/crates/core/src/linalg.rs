//! Dense symmetric linear algebra: Cholesky factorization, SPD solves and
//! the symmetric-definite generalized eigenproblem.
//!
//! Generalized problems `A v = λ S v` are reduced by congruence with the
//! Cholesky factor of `S` to a standard symmetric problem, which is handed to
//! nalgebra's symmetric QR eigensolver. `S` is never inverted explicitly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative pivot tolerance for [`cholesky`], measured against the largest
/// diagonal entry.
pub const PIVOT_TOL: f64 = 1e-14;

/// Symmetric matrix stored densely. The lower triangle is authoritative; the
/// upper triangle is kept as its mirror image.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Accepts a square, finite matrix whose two triangles agree to within
    /// `1e-8` relative to its largest entry, and mirrors the lower triangle.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let asymmetry = (&m - m.transpose()).amax();
        if asymmetry > 1e-8 * m.amax().max(1.0) {
            return Err(Error::NotSymmetric { asymmetry });
        }
        Ok(Self::from_lower(m))
    }

    /// Builds from the lower triangle of `m`, ignoring the upper triangle.
    pub fn from_lower(mut m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        for j in 0..n {
            for i in (j + 1)..n {
                m[(j, i)] = m[(i, j)];
            }
        }
        Self(m)
    }

    /// Symmetrizes by averaging with the transpose. Used for matrices that
    /// are symmetric in exact arithmetic but were formed by products.
    pub fn symmetrized(m: &DMatrix<f64>) -> Self {
        Self((m + m.transpose()) * 0.5)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Row-major constructor, mostly for tests and small literals.
    pub fn from_rows(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn is_identity(&self) -> bool {
        self.0 == DMatrix::identity(self.dim(), self.dim())
    }

    /// Quadratic form `vᵀ·M·v`.
    pub fn quad_form(&self, v: &DVector<f64>) -> f64 {
        v.dot(&(&self.0 * v))
    }
}

impl std::ops::Index<(usize, usize)> for SymMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Lower-triangular Cholesky factor `L` with `S = L·Lᵀ`.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    lower: DMatrix<f64>,
}

impl SpdFactor {
    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    pub fn lower(&self) -> &DMatrix<f64> {
        &self.lower
    }

    /// Solves `L·X = B` in place.
    fn forward_in_place(&self, b: &mut DMatrix<f64>) {
        let n = self.dim();
        let l = &self.lower;
        for c in 0..b.ncols() {
            for i in 0..n {
                let mut acc = b[(i, c)];
                for k in 0..i {
                    acc -= l[(i, k)] * b[(k, c)];
                }
                b[(i, c)] = acc / l[(i, i)];
            }
        }
    }

    /// Solves `Lᵀ·X = B` in place.
    fn backward_in_place(&self, b: &mut DMatrix<f64>) {
        let n = self.dim();
        let l = &self.lower;
        for c in 0..b.ncols() {
            for i in (0..n).rev() {
                let mut acc = b[(i, c)];
                for k in (i + 1)..n {
                    acc -= l[(k, i)] * b[(k, c)];
                }
                b[(i, c)] = acc / l[(i, i)];
            }
        }
    }

    /// `L⁻¹·B`.
    pub fn solve_lower(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_rows(rhs)?;
        let mut x = rhs.clone();
        self.forward_in_place(&mut x);
        Ok(x)
    }

    /// `L⁻ᵀ·B`.
    pub fn solve_upper(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_rows(rhs)?;
        let mut x = rhs.clone();
        self.backward_in_place(&mut x);
        Ok(x)
    }

    fn check_rows(&self, rhs: &DMatrix<f64>) -> Result<()> {
        if rhs.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.nrows(),
            });
        }
        Ok(())
    }
}

/// Eigenpairs of a symmetric-definite pencil, ascending. Column `j` of
/// `vectors` belongs to `values[j]`; the columns are orthonormal in the
/// metric of the pencil's right-hand matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomp {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Cholesky factorization with a relative pivot tolerance of [`PIVOT_TOL`].
pub fn cholesky(s: &SymMatrix) -> Result<SpdFactor> {
    let n = s.dim();
    let a = s.matrix();
    let max_diag = a.diagonal().max();
    let tol = PIVOT_TOL * max_diag.max(0.0);
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > tol) {
            return Err(Error::NotPositiveDefinite {
                row: j,
                pivot: d,
                tol,
            });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = acc / djj;
        }
    }
    Ok(SpdFactor { lower: l })
}

/// Solves `(L·Lᵀ)·X = rhs`.
pub fn solve_spd(f: &SpdFactor, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    f.check_rows(rhs)?;
    let mut x = rhs.clone();
    f.forward_in_place(&mut x);
    f.backward_in_place(&mut x);
    Ok(x)
}

/// `L⁻¹·A·L⁻ᵀ` for the Cholesky factor `L` of the metric.
fn congruence(a: &SymMatrix, f: &SpdFactor) -> Result<SymMatrix> {
    if a.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: a.dim(),
        });
    }
    let y = f.solve_lower(a.matrix())?;
    let c = f.solve_lower(&y.transpose())?;
    Ok(SymMatrix::symmetrized(&c))
}

/// Full eigendecomposition of the pencil `(A, S)` with `S` positive definite.
pub fn sym_generalized_eig(a: &SymMatrix, s: &SymMatrix) -> Result<EigenDecomp> {
    let f = cholesky(s)?;
    let c = congruence(a, &f)?;
    let eig = c.into_inner().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let sorted = DMatrix::from_fn(f.dim(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    let vectors = f.solve_upper(&sorted)?;
    Ok(EigenDecomp { values, vectors })
}

/// Eigenvalues only of the pencil `(A, S)`, ascending.
pub fn sym_generalized_eigvals(a: &SymMatrix, s: &SymMatrix) -> Result<Vec<f64>> {
    let f = cholesky(s)?;
    let c = congruence(a, &f)?;
    let mut values: Vec<f64> = c.into_inner().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Rayleigh quotient `(vᵀ·A·v) / (vᵀ·S·v)`.
pub fn rayleigh_quotient(a: &SymMatrix, s: &SymMatrix, v: &DVector<f64>) -> Result<f64> {
    if v.len() != a.dim() || v.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: v.len(),
        });
    }
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(a.quad_form(v) / s.quad_form(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym(n: usize, rows: &[f64]) -> SymMatrix {
        SymMatrix::from_rows(n, rows).unwrap()
    }

    #[test]
    fn cholesky_small_cases() {
        let f = cholesky(&sym(2, &[4.0, 2.0, 2.0, 5.0])).unwrap();
        assert_eq!(f.lower(), &DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 1.0, 2.0]));

        let f = cholesky(&SymMatrix::identity(3)).unwrap();
        assert_eq!(f.lower(), &DMatrix::identity(3, 3));

        match cholesky(&sym(2, &[1.0, 2.0, 2.0, 1.0])) {
            Err(Error::NotPositiveDefinite { row, pivot, .. }) => {
                assert_eq!(row, 1);
                assert_eq!(pivot, -3.0);
            }
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_rejects_roundoff_sized_pivot() {
        // Rank-one matrix: the second pivot is zero up to roundoff.
        let s = sym(2, &[1.0, 1.0, 1.0, 1.0 + 1e-16]);
        assert!(matches!(cholesky(&s), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn solve_spd_small_cases() {
        let f = cholesky(&SymMatrix::identity(2)).unwrap();
        let x = solve_spd(&f, &DMatrix::from_column_slice(2, 1, &[3.0, 7.0])).unwrap();
        assert_eq!(x.as_slice(), &[3.0, 7.0]);

        let f = cholesky(&SymMatrix::from_diagonal(&[4.0, 4.0])).unwrap();
        let x = solve_spd(&f, &DMatrix::from_column_slice(2, 1, &[8.0, 8.0])).unwrap();
        assert_eq!(x.as_slice(), &[2.0, 2.0]);

        let f = cholesky(&sym(2, &[4.0, 2.0, 2.0, 5.0])).unwrap();
        let x = solve_spd(&f, &DMatrix::from_column_slice(2, 1, &[6.0, 7.0])).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);

        let bad = DMatrix::zeros(3, 1);
        assert!(matches!(solve_spd(&f, &bad), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn generalized_eig_small_cases() {
        let a = SymMatrix::from_diagonal(&[2.0, 5.0]);
        let e = sym_generalized_eig(&a, &SymMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![2.0, 5.0]);

        let e = sym_generalized_eig(&a, &SymMatrix::from_diagonal(&[1.0, 4.0])).unwrap();
        assert!((e.values[0] - 1.25).abs() < 1e-15);
        assert!((e.values[1] - 2.0).abs() < 1e-15);

        let e = sym_generalized_eig(&sym(2, &[0.0, 1.0, 1.0, 0.0]), &SymMatrix::identity(2)).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generalized_eig_propagates_indefinite_metric() {
        let a = SymMatrix::identity(2);
        let s = sym(2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            sym_generalized_eig(&a, &s),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn rayleigh_quotient_cases() {
        let a = SymMatrix::from_diagonal(&[2.0, 5.0]);
        let i2 = SymMatrix::identity(2);
        let rq = |a: &SymMatrix, s: &SymMatrix, v: &[f64]| {
            rayleigh_quotient(a, s, &DVector::from_column_slice(v))
        };
        assert_eq!(rq(&a, &i2, &[1.0, 0.0]).unwrap(), 2.0);
        assert_eq!(rq(&a, &i2, &[1.0, 1.0]).unwrap(), 3.5);
        assert_eq!(
            rq(&i2, &SymMatrix::from_diagonal(&[1.0, 4.0]), &[0.0, 1.0]).unwrap(),
            0.25
        );
        assert!(matches!(rq(&a, &i2, &[0.0, 0.0]), Err(Error::ZeroVector)));
    }

    #[test]
    fn sym_matrix_validation() {
        assert!(matches!(
            SymMatrix::new(DMatrix::zeros(0, 0)),
            Err(Error::Empty)
        ));
        assert!(matches!(
            SymMatrix::from_rows(2, &[1.0, 2.0, 3.0, 1.0]),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            SymMatrix::from_rows(1, &[f64::NAN]),
            Err(Error::NonFinite)
        ));
        let m = SymMatrix::from_lower(DMatrix::from_row_slice(2, 2, &[1.0, 9.0, 3.0, 1.0]));
        assert_eq!(m[(0, 1)], 3.0);
    }

    fn random_spd(n: usize, entries: &[f64]) -> SymMatrix {
        let g = DMatrix::from_fn(n, n, |i, j| entries[(i * n + j) % entries.len()]);
        SymMatrix::symmetrized(&(g.transpose() * &g + DMatrix::identity(n, n) * n as f64))
    }

    fn random_sym(n: usize, entries: &[f64]) -> SymMatrix {
        let g = DMatrix::from_fn(n, n, |i, j| entries[(i * 7 + j * 3) % entries.len()]);
        SymMatrix::symmetrized(&g)
    }

    /// Brute-force min-max: with diagonal `A` and `S` the optimal subspaces
    /// are coordinate subspaces, and the max Rayleigh quotient over a
    /// coordinate subspace is the largest ratio it contains.
    fn brute_force_minmax(a: &[f64], s: &[f64], k: usize) -> f64 {
        let n = a.len();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let worst = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| a[i] / s[i])
                .fold(f64::NEG_INFINITY, f64::max);
            best = best.min(worst);
        }
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cholesky_round_trip(
            n in 1usize..24,
            entries in proptest::collection::vec(-1.0f64..1.0, 1..64),
        ) {
            let s = random_spd(n, &entries);
            let f = cholesky(&s).unwrap();
            let err = (f.lower() * f.lower().transpose() - s.matrix()).amax();
            prop_assert!(err <= 1e-12 * s.max_abs());
            prop_assert!(f.lower().diagonal().iter().all(|&d| d > 0.0));
        }

        #[test]
        fn solve_spd_residual(
            n in 1usize..24,
            entries in proptest::collection::vec(-1.0f64..1.0, 1..64),
            rhs in proptest::collection::vec(-10.0f64..10.0, 24),
        ) {
            let s = random_spd(n, &entries);
            let b = DMatrix::from_column_slice(n, 1, &rhs[..n]);
            let x = solve_spd(&cholesky(&s).unwrap(), &b).unwrap();
            let res = (s.matrix() * &x - &b).amax();
            prop_assert!(res <= 1e-10 * b.amax().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn generalized_eig_residual_and_orthonormality(
            n in 1usize..40,
            a_entries in proptest::collection::vec(-5.0f64..5.0, 1..97),
            s_entries in proptest::collection::vec(-1.0f64..1.0, 1..97),
        ) {
            let a = random_sym(n, &a_entries);
            let s = random_spd(n, &s_entries);
            check_generalized_eig(&a, &s);
        }

        #[test]
        fn minmax_matches_brute_force(
            pairs in proptest::collection::vec((-10.0f64..10.0, 0.1f64..5.0), 1..=6),
        ) {
            let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let s: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let values = sym_generalized_eigvals(
                &SymMatrix::from_diagonal(&a),
                &SymMatrix::from_diagonal(&s),
            ).unwrap();
            for k in 1..=a.len() {
                let bf = brute_force_minmax(&a, &s, k);
                prop_assert!((values[k - 1] - bf).abs() <= 1e-12 * bf.abs().max(1.0));
            }
        }
    }

    fn check_generalized_eig(a: &SymMatrix, s: &SymMatrix) {
        let e = sym_generalized_eig(a, s).unwrap();
        let n = a.dim();
        let a_norm = a.max_abs() * n as f64;
        let s_norm = s.max_abs() * n as f64;
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        for (j, &lam) in e.values.iter().enumerate() {
            let v = e.vectors.column(j);
            let res = (a.matrix() * v - s.matrix() * v * lam).norm();
            assert!(res <= 1e-9 * (a_norm + lam.abs() * s_norm), "residual {res}");
        }
        let gram = e.vectors.transpose() * s.matrix() * &e.vectors;
        assert!((gram - DMatrix::identity(n, n)).amax() <= 1e-10);
    }

    #[test]
    fn generalized_eig_residual_at_n_200() {
        let n = 200;
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let a_entries: Vec<f64> = (0..997).map(|_| next()).collect();
        let s_entries: Vec<f64> = (0..991).map(|_| next()).collect();
        check_generalized_eig(&random_sym(n, &a_entries), &random_spd(n, &s_entries));
    }
}
