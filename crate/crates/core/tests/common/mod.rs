#![allow(dead_code)]

use gapsolve::gap::BlockOperator;
use gapsolve::linalg::SymMatrix;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn uniform(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0))
}

fn sym(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = uniform(rng, n, n);
    (&a + a.transpose()) * 0.5
}

fn spd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = uniform(rng, n, n);
    DMatrix::identity(n, n) + &g * g.transpose() * (0.3 / n as f64)
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut(a.shape(), b.shape()).copy_from(b);
    m
}

/// Random block operator with a spectral gap around zero. Every fifth
/// instance is a direct sum of a smaller instance with itself, so all its
/// eigenvalues are double.
pub fn random_block(rng: &mut ChaCha8Rng, index: usize, max_dim: usize) -> BlockOperator {
    let doubled = index % 5 == 4;
    let cap = if doubled { max_dim / 2 } else { max_dim };
    let np = rng.gen_range(1..=cap);
    let nm = rng.gen_range(1..=cap);
    let gap = rng.gen_range(0.5..2.0);
    let coupling = rng.gen_range(0.0..1.5);
    let app = sym(rng, np) + DMatrix::identity(np, np) * gap;
    let amm = sym(rng, nm) - DMatrix::identity(nm, nm) * gap;
    let apm = uniform(rng, np, nm) * coupling;
    let sp = spd(rng, np);
    let sm = spd(rng, nm);
    let parts = if doubled {
        [app, apm, amm, sp, sm].map(|m| block_diag(&m, &m))
    } else {
        [app, apm, amm, sp, sm]
    };
    let [app, apm, amm, sp, sm] = parts;
    BlockOperator::new(
        SymMatrix::from_lower(app),
        apm,
        SymMatrix::from_lower(amm),
        SymMatrix::from_lower(sp),
        SymMatrix::from_lower(sm),
    )
    .expect("random instance is valid")
}

/// `λ_k` for `k = 1..=n₊` from the full pencil: the eigenvalues above `λ₀`
/// are the last levels, and the first `n₊ − count` levels lie at or below
/// `λ₀` (`None`).
pub fn direct_levels(op: &BlockOperator) -> Vec<Option<f64>> {
    let above: Vec<f64> = op
        .full_spectrum()
        .unwrap()
        .into_iter()
        .filter(|&e| e > op.lambda0())
        .collect();
    let dived = op.n_plus() - above.len();
    (0..op.n_plus())
        .map(|k| k.checked_sub(dived).map(|i| above[i]))
        .collect()
}
