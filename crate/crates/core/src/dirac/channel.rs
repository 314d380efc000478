use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::bspline::{BSplineBasis, BasisConfig};
use super::quadrature::quadrature_points;
use super::SPLIT_TOL;
use crate::error::{Error, Result};
use crate::gap::{schur_pair, BlockOperator};
use crate::linalg::{sym_generalized_eig, sym_generalized_eigvals, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    /// `strength / r`
    Coulomb,
    /// `strength · e^(−mu·r) / r`
    Yukawa,
    /// `strength`
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialTerm {
    pub kind: PotentialKind,
    pub strength: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl PotentialTerm {
    /// Attractive point charge `−nu/r`.
    pub fn coulomb(strength: f64) -> Self {
        Self {
            kind: PotentialKind::Coulomb,
            strength,
            mu: None,
        }
    }

    pub fn yukawa(strength: f64, mu: f64) -> Self {
        Self {
            kind: PotentialKind::Yukawa,
            strength,
            mu: Some(mu),
        }
    }

    pub fn constant(strength: f64) -> Self {
        Self {
            kind: PotentialKind::Constant,
            strength,
            mu: None,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self.kind {
            PotentialKind::Coulomb => self.strength / r,
            PotentialKind::Yukawa => self.strength * (-self.mu.unwrap_or(0.0) * r).exp() / r,
            PotentialKind::Constant => self.strength,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.strength.is_finite() {
            return Err(Error::InvalidConfig("potential strength must be finite".into()));
        }
        if self.kind == PotentialKind::Yukawa && !self.mu.is_some_and(|mu| mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidConfig("yukawa term needs mu > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Splitting {
    /// Upper/lower spinor components.
    #[default]
    Talman,
    /// Positive/negative spectral subspaces of the discretized free operator.
    FreeProjector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kappa: i32,
    #[serde(default)]
    pub potential: Vec<PotentialTerm>,
    pub basis: BasisConfig,
    #[serde(default)]
    pub splitting: Splitting,
}

impl ChannelSpec {
    /// Pure Coulomb channel `V = −nu/r`.
    pub fn coulomb(nu: f64, kappa: i32, basis: BasisConfig) -> Self {
        Self {
            kappa,
            potential: vec![PotentialTerm::coulomb(-nu)],
            basis,
            splitting: Splitting::Talman,
        }
    }

    pub fn with_splitting(mut self, splitting: Splitting) -> Self {
        self.splitting = splitting;
        self
    }

    pub fn with_intervals(mut self, n_intervals: usize) -> Self {
        self.basis.n_intervals = n_intervals;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappa == 0 {
            return Err(Error::InvalidConfig("kappa must be nonzero".into()));
        }
        self.potential.iter().try_for_each(PotentialTerm::validate)
    }

    pub fn potential_at(&self, r: f64) -> f64 {
        self.potential.iter().map(|t| t.eval(r)).sum()
    }

    /// Coupling `ν` when the potential is a single attractive Coulomb term.
    pub fn coulomb_coupling(&self) -> Option<f64> {
        match self.potential.as_slice() {
            [t] if t.kind == PotentialKind::Coulomb && t.strength < 0.0 => Some(-t.strength),
            _ => None,
        }
    }

    /// Human-readable warnings about the configuration. Currently flags total
    /// attractive Coulomb charge above 1, where the operator is no longer
    /// covered by the Hardy-Dirac bound.
    pub fn warnings(&self) -> Vec<String> {
        let attractive: f64 = self
            .potential
            .iter()
            .filter(|t| t.kind == PotentialKind::Coulomb && t.strength < 0.0)
            .map(|t| -t.strength)
            .sum();
        if attractive > 1.0 {
            vec![format!(
                "total attractive coulomb strength {attractive} exceeds 1; results are outside the supported coupling range"
            )]
        } else {
            Vec::new()
        }
    }
}

/// Radial Galerkin matrices of one channel.
///
/// `s` is the overlap, `v` the potential, and `d(i, j) = ∫ bᵢ·(−bⱼ′ + κ/r·bⱼ)`
/// the off-diagonal kinetic block.
#[derive(Debug, Clone)]
pub struct ChannelMatrices {
    pub s: SymMatrix,
    pub v: SymMatrix,
    pub d: DMatrix<f64>,
}

impl ChannelMatrices {
    pub fn build(spec: &ChannelSpec) -> Result<Self> {
        spec.validate()?;
        let basis = BSplineBasis::new(&spec.basis)?;
        let n = basis.nfun();
        let kappa = f64::from(spec.kappa);
        let mut s = DMatrix::zeros(n, n);
        let mut v = DMatrix::zeros(n, n);
        let mut d = DMatrix::zeros(n, n);
        let last_full = basis.n_full() - 1;
        for p in quadrature_points(&basis) {
            let loc = basis.local(p.interval, p.r);
            let pot = spec.potential_at(p.r);
            // retained index of each slot, skipping the two boundary splines
            let idx = |slot: usize| {
                let full = loc.first + slot;
                (full >= 1 && full < last_full).then(|| full - 1)
            };
            for a in 0..basis.order() {
                let Some(i) = idx(a) else { continue };
                let wa = p.weight * loc.values[a];
                for b in 0..basis.order() {
                    let Some(j) = idx(b) else { continue };
                    s[(i, j)] += wa * loc.values[b];
                    v[(i, j)] += wa * pot * loc.values[b];
                    d[(i, j)] += wa * (-loc.derivs[b] + kappa / p.r * loc.values[b]);
                }
            }
        }
        let finite = |m: &DMatrix<f64>| m.iter().all(|x| x.is_finite());
        if !(finite(&s) && finite(&v) && finite(&d)) {
            return Err(Error::QuadratureFailure("non-finite matrix element".into()));
        }
        Ok(Self {
            s: SymMatrix::symmetrized(&s),
            v: SymMatrix::symmetrized(&v),
            d,
        })
    }

    pub fn nfun(&self) -> usize {
        self.s.dim()
    }

    fn block(tl: &DMatrix<f64>, tr: &DMatrix<f64>, br: &DMatrix<f64>) -> DMatrix<f64> {
        let n = tl.nrows();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(tl);
        m.view_mut((0, n), (n, n)).copy_from(tr);
        m.view_mut((n, 0), (n, n)).copy_from(&tr.transpose());
        m.view_mut((n, n), (n, n)).copy_from(br);
        m
    }

    /// `[[S, D], [Dᵀ, −S]]`.
    pub fn free_full(&self) -> SymMatrix {
        let s = self.s.matrix();
        SymMatrix::from_lower(Self::block(s, &self.d, &-s))
    }

    /// `[[S + V, D], [Dᵀ, −S + V]]`.
    pub fn full(&self) -> SymMatrix {
        let (s, v) = (self.s.matrix(), self.v.matrix());
        SymMatrix::from_lower(Self::block(&(s + v), &self.d, &(v - s)))
    }

    /// `diag(S, S)`.
    pub fn full_overlap(&self) -> SymMatrix {
        let n = self.nfun();
        SymMatrix::from_lower(Self::block(self.s.matrix(), &DMatrix::zeros(n, n), self.s.matrix()))
    }

    pub fn talman(&self) -> Result<BlockOperator> {
        let (s, v) = (self.s.matrix(), self.v.matrix());
        BlockOperator::new(
            SymMatrix::from_lower(s + v),
            self.d.clone(),
            SymMatrix::from_lower(v - s),
            self.s.clone(),
            self.s.clone(),
        )
    }

    pub fn free_projector(&self) -> Result<BlockOperator> {
        let overlap = self.full_overlap();
        let eig = sym_generalized_eig(&self.free_full(), &overlap)?;
        if let Some(&bad) = eig.values.iter().find(|e| e.abs() < 1.0 - SPLIT_TOL) {
            return Err(Error::DegenerateSplit { value: bad });
        }
        let neg: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] < 0.0).collect();
        let pos: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] > 0.0).collect();
        let u_plus = eig.vectors.select_columns(&pos);
        let u_minus = eig.vectors.select_columns(&neg);
        let a = self.full();
        let a = a.matrix();
        let app = u_plus.transpose() * a * &u_plus;
        let apm = u_plus.transpose() * a * &u_minus;
        let amm = u_minus.transpose() * a * &u_minus;
        BlockOperator::orthonormal(
            SymMatrix::symmetrized(&app),
            apm,
            SymMatrix::symmetrized(&amm),
        )
    }
}

/// Assembles `spec` under whichever splitting it names.
pub fn assemble(spec: &ChannelSpec) -> Result<BlockOperator> {
    let mats = ChannelMatrices::build(spec)?;
    match spec.splitting {
        Splitting::Talman => mats.talman(),
        Splitting::FreeProjector => mats.free_projector(),
    }
}

/// Talman (upper/lower component) splitting.
pub fn assemble_channel(spec: &ChannelSpec) -> Result<BlockOperator> {
    if spec.splitting != Splitting::Talman {
        return Err(Error::InvalidConfig("assemble_channel expects talman splitting".into()));
    }
    ChannelMatrices::build(spec)?.talman()
}

/// Splitting by the positive and negative eigenvectors of the discretized free
/// operator. The result is in orthonormal coordinates.
pub fn assemble_free_projector(spec: &ChannelSpec) -> Result<BlockOperator> {
    if spec.splitting != Splitting::FreeProjector {
        return Err(Error::InvalidConfig(
            "assemble_free_projector expects free_projector splitting".into(),
        ));
    }
    ChannelMatrices::build(spec)?.free_projector()
}

pub fn lambda0_channel(spec: &ChannelSpec) -> Result<f64> {
    Ok(assemble(spec)?.lambda0())
}

/// Smallest eigenvalue of the Schur pair at `E = 0` for `V = −nu/r` under the
/// Talman splitting. Nonnegative whenever the Hardy-Dirac form is.
pub fn hardy_dirac_min(nu: f64, kappa: i32, basis: &BasisConfig) -> Result<f64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidConfig(format!("hardy_dirac_min needs 0 < nu <= 1, got {nu}")));
    }
    let op = assemble_channel(&ChannelSpec::coulomb(nu, kappa, *basis))?;
    let pair = schur_pair(&op, 0.0)?;
    Ok(sym_generalized_eigvals(&pair.m, &pair.n)?[0])
}
