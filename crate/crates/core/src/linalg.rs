//! Dense complex linear-algebra helpers on top of `nalgebra`.
//!
//! Matrices are column-major `DMatrix<C64>`, so column `k` of an `M x K`
//! matrix is the contiguous slice returned by [`col`].

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
pub use nalgebra::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);

/// Column `k` of a column-major matrix as a slice.
pub fn col(m: &CMatrix, k: usize) -> &[C64] {
    let rows = m.nrows();
    &m.as_slice()[k * rows..(k + 1) * rows]
}

/// `a^H b`
pub fn dot_h(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Real part of `v^H A v` for a Hermitian `A`.
pub fn quad_form(a: &CMatrix, v: &[C64]) -> f64 {
    let n = v.len();
    debug_assert_eq!(a.nrows(), n);
    let data = a.as_slice();
    let mut acc = ZERO;
    for (j, vj) in v.iter().enumerate() {
        if *vj == ZERO {
            continue;
        }
        let column = &data[j * n..(j + 1) * n];
        acc += dot_h(v, column) * vj;
    }
    acc.re
}

/// Below this many multiply-adds the plain complex product is cheaper.
const SPLIT_GEMM_MIN: usize = 1 << 15;

fn parts(a: &CMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

fn join(re: &DMatrix<f64>, im: &DMatrix<f64>) -> CMatrix {
    CMatrix::from_fn(re.nrows(), re.ncols(), |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

/// `A B`, computed on real and imaginary parts so large products run
/// through the real GEMM kernel.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    if a.nrows() * a.ncols() * b.ncols() < SPLIT_GEMM_MIN {
        return a * b;
    }
    let (ar, ai) = parts(a);
    let (br, bi) = parts(b);
    join(&(&ar * &br - &ai * &bi), &(&ar * &bi + &ai * &br))
}

/// `A^H B`
pub fn adjoint_matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    if a.nrows() * a.ncols() * b.ncols() < SPLIT_GEMM_MIN {
        return a.adjoint() * b;
    }
    let (ar, ai) = parts(a);
    let (br, bi) = parts(b);
    join(
        &(ar.tr_mul(&br) + ai.tr_mul(&bi)),
        &(ar.tr_mul(&bi) - ai.tr_mul(&br)),
    )
}

/// Standard circularly-symmetric complex Gaussian draw, `CN(0, 1)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_normal_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

pub fn trace_re(a: &CMatrix) -> f64 {
    a.diagonal().iter().map(|x| x.re).sum()
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `||A - A^H||_F`
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    frobenius(&(a - a.adjoint()))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Principal square root of a Hermitian PSD matrix.
///
/// Eigenvalues within `-1e-12 * trace` of zero are clamped to zero; anything
/// more negative means the input is indefinite.
pub fn hermitian_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension(format!("square root of {}x{} matrix", n, a.ncols())));
    }
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let trace = trace_re(a);
    if n == 1 {
        let v = a[(0, 0)].re;
        if v < -1e-12 * trace.abs() {
            return Err(Error::Numeric(format!("negative variance {v}")));
        }
        return Ok(CMatrix::from_element(1, 1, C64::new(v.max(0.0).sqrt(), 0.0)));
    }
    if trace == 0.0 {
        return Ok(CMatrix::zeros(n, n));
    }
    let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let floor = 1e-12 * trace.abs();
    let mut roots = Vec::with_capacity(n);
    for &lambda in eig.eigenvalues.iter() {
        if lambda < -floor {
            return Err(Error::Numeric(format!(
                "indefinite covariance: eigenvalue {lambda:e} with trace {trace:e}"
            )));
        }
        roots.push(lambda.max(0.0).sqrt());
    }
    let u = &eig.eigenvectors;
    let mut scaled = u.clone();
    for (j, r) in roots.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*r);
    }
    Ok(scaled * u.adjoint())
}

/// `n x r` factor `F` with `F F^H = A` for a Hermitian PSD `A`, by
/// diagonally pivoted Cholesky. Stops once every remaining pivot is below
/// `1e-12` of the largest diagonal entry, so `r` is the numerical rank and
/// every entry of `A - F F^H` is below that floor.
pub fn psd_factor(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension(format!("factor of {}x{} matrix", n, a.ncols())));
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let scale = d.iter().copied().fold(0.0, f64::max);
    let floor = 1e-12 * scale;
    let mut order: Vec<usize> = (0..n).collect();
    let mut f = CMatrix::zeros(n, n);
    let mut rank = 0;
    while rank < n {
        let (pos, &q) = order[rank..]
            .iter()
            .enumerate()
            .max_by(|x, y| d[*x.1].total_cmp(&d[*y.1]))
            .expect("nonempty");
        if d[q] <= floor {
            break;
        }
        order.swap(rank, rank + pos);
        let root = d[q].sqrt();
        f[(q, rank)] = C64::new(root, 0.0);
        for &i in &order[rank + 1..] {
            let mut v = a[(i, q)];
            for t in 0..rank {
                v -= f[(i, t)] * f[(q, t)].conj();
            }
            let x = v / root;
            f[(i, rank)] = x;
            d[i] -= x.norm_sqr();
        }
        rank += 1;
    }
    if let Some(&bad) = order[rank..].iter().map(|&i| &d[i]).find(|&&v| v < -1e-9 * scale) {
        return Err(Error::Numeric(format!("indefinite covariance: residual pivot {bad:e}")));
    }
    Ok(f.columns(0, rank).into_owned())
}

/// Cholesky factor of a Hermitian positive-definite matrix.
pub struct HermitianSolver {
    chol: Cholesky<C64, Dyn>,
}

impl HermitianSolver {
    /// Fails when the factorization breaks down or a squared pivot falls
    /// below `1e-12` of the largest one (condition number beyond `1e12`).
    pub fn new(a: CMatrix) -> Result<Self> {
        let n = a.nrows();
        let singular = || Error::Numeric(format!("{n}x{n} matrix is not positive definite"));
        let chol = Cholesky::new(a).ok_or_else(singular)?;
        let pivots = chol.l_dirty().diagonal().map(|d| d.re * d.re);
        let (lo, hi) = pivots.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &p| (lo.min(p), hi.max(p)));
        if n > 0 && !(lo > 1e-12 * hi) {
            return Err(singular());
        }
        Ok(HermitianSolver { chol })
    }

    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        self.chol.solve(b)
    }

    pub fn solve_vec(&self, b: &CVector) -> CVector {
        self.chol.solve(b)
    }

    pub fn inverse(&self) -> CMatrix {
        self.chol.inverse()
    }
}

/// 2-norm condition number of a Hermitian PSD matrix (`inf` when singular).
pub fn hermitian_condition(a: &CMatrix) -> f64 {
    let ev = hermitian_eigenvalues(a);
    match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Block-diagonal Hermitian matrix acting on a stacked vector.
#[derive(Clone, Debug)]
pub struct BlockDiag {
    blocks: Vec<CMatrix>,
    offsets: Vec<usize>,
    dim: usize,
}

impl BlockDiag {
    pub fn new(blocks: Vec<CMatrix>) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut dim = 0;
        for b in &blocks {
            offsets.push(dim);
            dim += b.nrows();
        }
        BlockDiag {
            blocks,
            offsets,
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    /// `v^H A v`
    pub fn quad_form(&self, v: &[C64]) -> f64 {
        self.blocks
            .iter()
            .zip(&self.offsets)
            .map(|(b, &off)| quad_form(b, &v[off..off + b.nrows()]))
            .sum()
    }

    /// `d_k^H A d_k` for every column `d_k` of `d`.
    pub fn quad_forms(&self, d: &CMatrix) -> Vec<f64> {
        let mut out = vec![0.0; d.ncols()];
        for (b, &off) in self.blocks.iter().zip(&self.offsets) {
            let part = d.rows(off, b.nrows()).clone_owned();
            let y = matmul(b, &part);
            for (k, slot) in out.iter_mut().enumerate() {
                *slot += dot_h(col(&part, k), col(&y, k)).re;
            }
        }
        out
    }

    /// In-place `self += scale * other`; both must share the block structure.
    pub fn add_scaled(&mut self, other: &BlockDiag, scale: f64) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            for (x, y) in a.as_mut_slice().iter_mut().zip(b.as_slice()) {
                *x += y * scale;
            }
        }
    }

    pub fn add_identity(&mut self, value: f64) {
        for b in &mut self.blocks {
            for i in 0..b.nrows() {
                b[(i, i)].re += value;
            }
        }
    }

    pub fn zeros_like(&self) -> BlockDiag {
        BlockDiag::new(
            self.blocks
                .iter()
                .map(|b| CMatrix::zeros(b.nrows(), b.ncols()))
                .collect(),
        )
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (b, &off) in self.blocks.iter().zip(&self.offsets) {
            out.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        }
        out
    }

    /// Factor every block; fails if any block is not positive definite.
    pub fn factor(&self) -> Result<BlockDiagSolver> {
        let solvers = self
            .blocks
            .iter()
            .map(|b| HermitianSolver::new(b.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockDiagSolver {
            solvers,
            offsets: self.offsets.clone(),
            sizes: self.blocks.iter().map(|b| b.nrows()).collect(),
        })
    }
}

pub struct BlockDiagSolver {
    solvers: Vec<HermitianSolver>,
    offsets: Vec<usize>,
    sizes: Vec<usize>,
}

impl BlockDiagSolver {
    /// Solves `A X = B` for a stacked right-hand side `B`.
    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(b.nrows(), b.ncols());
        for ((solver, &off), &n) in self.solvers.iter().zip(&self.offsets).zip(&self.sizes) {
            let rhs = b.rows(off, n).clone_owned();
            out.rows_mut(off, n).copy_from(&solver.solve(&rhs));
        }
        out
    }
}
