//! Sparse assembly and direct solves.
//!
//! The electric-boundary-condition systems use the unknown ordering
//! `[u^x interior, u^y interior, u^x boundary, u^y boundary]` and the row
//! ordering `[x-equation interior, y-equation interior, divergence boundary,
//! tangential boundary]`. Interior rows hold `shift - nu * Laplacian`, so the
//! steady problem reads `-Laplacian u = f`.

use std::io::Write;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};
use crate::stencil::Discretization;
use crate::Vec2;

/// Row-compressed sparse matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` entries; duplicates are summed
    /// and entries that sum to exactly zero are dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut k = 0;
        while k < entries.len() {
            let (r, c, mut v) = entries[k];
            assert!(r < nrows && c < ncols, "entry ({r}, {c}) outside {nrows}x{ncols}");
            k += 1;
            while k < entries.len() && entries[k].0 == r && entries[k].1 == c {
                v += entries[k].2;
                k += 1;
            }
            if v != 0.0 {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn from_dense(rows: &[&[f64]]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let entries = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v)))
            .collect();
        Self::from_triplets(rows.len(), ncols, entries)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.nrows).map(|i| self.row(i).1.iter().sum()).collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Coordinate text dump, one `row col value` line per entry.
    pub fn write_coordinate(&self, mut out: impl Write) -> Result<()> {
        for (i, j, v) in self.triplets() {
            writeln!(out, "{i} {j} {v:.16e}")?;
        }
        Ok(())
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let trips: Vec<Triplet<usize, usize, f64>> =
            self.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &trips)
            .map_err(|e| Error::SingularMatrix(format!("matrix construction failed: {e:?}")))
    }
}

fn amax(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Sparse LU factorization (fill-reducing column ordering, partial pivoting)
/// that keeps the matrix for iterative refinement.
pub struct SparseLu {
    matrix: CsrMatrix,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    norm: f64,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu").field("n", &self.matrix.nrows).field("nnz", &self.matrix.nnz()).finish()
    }
}

impl SparseLu {
    pub fn factor(matrix: &CsrMatrix) -> Result<Self> {
        if matrix.nrows != matrix.ncols {
            return Err(Error::SizeMismatch { expected: matrix.nrows, found: matrix.ncols });
        }
        if let Some(i) = (0..matrix.nrows).find(|&i| matrix.row(i).0.is_empty()) {
            return Err(Error::SingularMatrix(format!("row {i} is empty")));
        }
        let lu = matrix
            .to_faer()?
            .sp_lu()
            .map_err(|e| Error::SingularMatrix(format!("factorization failed: {e:?}")))?;
        let this = SparseLu { norm: matrix.norm_inf(), matrix: matrix.clone(), lu };
        let probe = this.raw_solve(&vec![1.0; matrix.nrows]);
        if probe.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularMatrix("zero pivot".into()));
        }
        Ok(this)
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    fn raw_solve(&self, b: &[f64]) -> Vec<f64> {
        let mut rhs = faer::Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
        self.lu.solve_in_place(rhs.as_mut());
        (0..b.len()).map(|i| rhs[(i, 0)]).collect()
    }

    /// Solves `A x = b` with one refinement pass and checks
    /// `|A x - b| <= 1e-8 (|A| |x| + |b|)` in the max norm.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.matrix.nrows {
            return Err(Error::SizeMismatch { expected: self.matrix.nrows, found: b.len() });
        }
        let mut x = self.raw_solve(b);
        let ax = self.matrix.matvec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = self.raw_solve(&r);
        for (x, d) in x.iter_mut().zip(&dx) {
            *x += d;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularMatrix("non-finite solution".into()));
        }
        let ax = self.matrix.matvec(&x);
        let resid = b.iter().zip(&ax).fold(0.0f64, |m, (b, a)| m.max((b - a).abs()));
        let bound = 1e-8 * (self.norm * amax(&x) + amax(b));
        if resid > bound {
            return Err(Error::SingularMatrix(format!("residual {resid:e} exceeds {bound:e}")));
        }
        Ok(x)
    }
}

/// Row blocks of the electric-boundary-condition system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowBlock {
    InteriorX,
    InteriorY,
    BoundaryDivergence,
    BoundaryTangential,
}

/// Column blocks of the electric-boundary-condition system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColBlock {
    InteriorX,
    InteriorY,
    BoundaryX,
    BoundaryY,
}

/// Index map of the `2N x 2N` block system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EbcLayout {
    pub n_interior: usize,
    pub n_boundary: usize,
}

impl EbcLayout {
    pub fn size(&self) -> usize {
        2 * (self.n_interior + self.n_boundary)
    }

    /// Column of `u^x` at cloud point `i`.
    pub fn ux(&self, i: usize) -> usize {
        if i < self.n_interior {
            i
        } else {
            2 * self.n_interior + (i - self.n_interior)
        }
    }

    /// Column of `u^y` at cloud point `i`.
    pub fn uy(&self, i: usize) -> usize {
        if i < self.n_interior {
            self.n_interior + i
        } else {
            2 * self.n_interior + self.n_boundary + (i - self.n_interior)
        }
    }

    pub fn row_block(&self, row: usize) -> RowBlock {
        let (ni, nb) = (self.n_interior, self.n_boundary);
        if row < ni {
            RowBlock::InteriorX
        } else if row < 2 * ni {
            RowBlock::InteriorY
        } else if row < 2 * ni + nb {
            RowBlock::BoundaryDivergence
        } else {
            RowBlock::BoundaryTangential
        }
    }

    pub fn col_block(&self, col: usize) -> ColBlock {
        let (ni, nb) = (self.n_interior, self.n_boundary);
        if col < ni {
            ColBlock::InteriorX
        } else if col < 2 * ni {
            ColBlock::InteriorY
        } else if col < 2 * ni + nb {
            ColBlock::BoundaryX
        } else {
            ColBlock::BoundaryY
        }
    }

    /// Packs a per-point vector field into the unknown ordering.
    pub fn pack(&self, u: &[Vec2]) -> Vec<f64> {
        let mut x = vec![0.0; self.size()];
        for (i, v) in u.iter().enumerate() {
            x[self.ux(i)] = v.x;
            x[self.uy(i)] = v.y;
        }
        x
    }

    /// Inverse of [`EbcLayout::pack`].
    pub fn unpack(&self, x: &[f64]) -> Vec<Vec2> {
        (0..self.n_interior + self.n_boundary)
            .map(|i| Vec2::new(x[self.ux(i)], x[self.uy(i)]))
            .collect()
    }
}

/// Assembled matrix with right-hand side.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub layout: EbcLayout,
}

impl SparseSystem {
    pub fn solve(&self) -> Result<Vec<f64>> {
        solve(&self.matrix, &self.rhs)
    }
}

/// Direct sparse solve of `A x = b`.
pub fn solve(matrix: &CsrMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    SparseLu::factor(matrix)?.solve(rhs)
}

pub fn layout_of(disc: &Discretization) -> EbcLayout {
    EbcLayout { n_interior: disc.cloud().n_interior(), n_boundary: disc.cloud().n_boundary() }
}

/// The `2N x 2N` matrix: `shift - nu * Laplacian` in the interior, the
/// divergence and `n^x u^y - n^y u^x` at boundary points.
pub fn ebc_matrix(disc: &Discretization, nu: f64, shift: Option<f64>) -> CsrMatrix {
    let layout = layout_of(disc);
    let shift = shift.unwrap_or(0.0);
    let mut t = Vec::new();
    for (k, row) in disc.laplacian().rows().iter().enumerate() {
        debug_assert_eq!(row.center, k);
        let rx = k;
        let ry = layout.n_interior + k;
        t.push((rx, layout.ux(k), -nu * row.diag + shift));
        t.push((ry, layout.uy(k), -nu * row.diag + shift));
        for (&j, &a) in row.neighbors.iter().zip(&row.weights) {
            t.push((rx, layout.ux(j), -nu * a));
            t.push((ry, layout.uy(j), -nu * a));
        }
    }
    push_boundary_rows(disc, &layout, 2 * layout.n_interior, |i| layout.ux(i), |i| layout.uy(i), &mut t);
    CsrMatrix::from_triplets(layout.size(), layout.size(), t)
}

/// Divergence and tangential rows for every boundary point, starting at
/// `row0`, with caller-chosen column maps.
fn push_boundary_rows(
    disc: &Discretization,
    layout: &EbcLayout,
    row0: usize,
    col_x: impl Fn(usize) -> usize,
    col_y: impl Fn(usize) -> usize,
    t: &mut Vec<(usize, usize, f64)>,
) {
    let cloud = disc.cloud();
    for (b, i) in cloud.boundary_indices().enumerate() {
        let rd = row0 + b;
        let rt = row0 + layout.n_boundary + b;
        let dx = disc.dx().row(i);
        let dy = disc.dy().row(i);
        t.push((rd, col_x(i), dx.diag));
        t.push((rd, col_y(i), dy.diag));
        for (&j, &a) in dx.neighbors.iter().zip(&dx.weights) {
            t.push((rd, col_x(j), a));
        }
        for (&j, &a) in dy.neighbors.iter().zip(&dy.weights) {
            t.push((rd, col_y(j), a));
        }
        let n = cloud.normal(i);
        t.push((rt, col_y(i), n.x));
        t.push((rt, col_x(i), -n.y));
    }
}

/// Assembles the vector Poisson system (`nu_scale = 1`, no shift) or the
/// implicit heat step (`shift = 1/dt`). `f` holds the interior right-hand
/// side, `g_tangential` the values `n x g` at boundary points.
pub fn assemble_vpe(
    disc: &Discretization,
    nu_scale: f64,
    dt_shift: Option<f64>,
    f: &[Vec2],
    g_tangential: &[f64],
) -> Result<SparseSystem> {
    let layout = layout_of(disc);
    let matrix = ebc_matrix(disc, nu_scale, dt_shift);
    let rhs = ebc_rhs(&layout, f, g_tangential)?;
    Ok(SparseSystem { matrix, rhs, layout })
}

/// Right-hand side in the row ordering of [`ebc_matrix`].
pub fn ebc_rhs(layout: &EbcLayout, f: &[Vec2], g_tangential: &[f64]) -> Result<Vec<f64>> {
    if f.len() != layout.n_interior {
        return Err(Error::SizeMismatch { expected: layout.n_interior, found: f.len() });
    }
    if g_tangential.len() != layout.n_boundary {
        return Err(Error::SizeMismatch { expected: layout.n_boundary, found: g_tangential.len() });
    }
    let mut rhs = vec![0.0; layout.size()];
    for (k, v) in f.iter().enumerate() {
        rhs[k] = v.x;
        rhs[layout.n_interior + k] = v.y;
    }
    let off = 2 * layout.n_interior + layout.n_boundary;
    rhs[off..].copy_from_slice(g_tangential);
    Ok(rhs)
}

/// `n x g = n^x g^y - n^y g^x` at every boundary point.
pub fn tangential_data(disc: &Discretization, g: impl Fn(Vec2) -> Vec2) -> Vec<f64> {
    let cloud = disc.cloud();
    cloud
        .boundary_indices()
        .map(|i| {
            let n = cloud.normal(i);
            let gv = g(cloud.point(i));
            n.x * gv.y - n.y * gv.x
        })
        .collect()
}

/// The two bottom block rows restricted to boundary unknowns
/// `[u^x boundary, u^y boundary]`, with interior columns moved to the
/// right-hand side using known interior values.
pub fn assemble_boundary_system(
    disc: &Discretization,
    interior_values: &[Vec2],
    g_tangential: &[f64],
) -> Result<SparseSystem> {
    let layout = layout_of(disc);
    let matrix = boundary_matrix(disc);
    let rhs = boundary_rhs(disc, interior_values, g_tangential)?;
    Ok(SparseSystem { matrix, rhs, layout })
}

fn boundary_matrix(disc: &Discretization) -> CsrMatrix {
    let layout = layout_of(disc);
    let (ni, nb) = (layout.n_interior, layout.n_boundary);
    // interior columns are parked past the end and filtered out below
    let park = 2 * nb;
    let mut t = Vec::new();
    push_boundary_rows(
        disc,
        &layout,
        0,
        |i| if i < ni { park } else { i - ni },
        |i| if i < ni { park } else { nb + i - ni },
        &mut t,
    );
    t.retain(|&(_, c, _)| c != park);
    CsrMatrix::from_triplets(2 * nb, 2 * nb, t)
}

fn boundary_rhs(disc: &Discretization, interior: &[Vec2], g_tangential: &[f64]) -> Result<Vec<f64>> {
    let cloud = disc.cloud();
    let (ni, nb) = (cloud.n_interior(), cloud.n_boundary());
    if interior.len() != ni {
        return Err(Error::SizeMismatch { expected: ni, found: interior.len() });
    }
    if g_tangential.len() != nb {
        return Err(Error::SizeMismatch { expected: nb, found: g_tangential.len() });
    }
    let mut rhs = vec![0.0; 2 * nb];
    for (b, i) in cloud.boundary_indices().enumerate() {
        let dx = disc.dx().row(i);
        let dy = disc.dy().row(i);
        let mut s = 0.0;
        for (&j, &a) in dx.neighbors.iter().zip(&dx.weights) {
            if j < ni {
                s += a * interior[j].x;
            }
        }
        for (&j, &a) in dy.neighbors.iter().zip(&dy.weights) {
            if j < ni {
                s += a * interior[j].y;
            }
        }
        rhs[b] = -s;
        rhs[nb + b] = g_tangential[b];
    }
    Ok(rhs)
}

/// Prefactored boundary system for explicit interior updates.
#[derive(Debug)]
pub struct BoundarySolver {
    lu: SparseLu,
}

impl BoundarySolver {
    pub fn new(disc: &Discretization) -> Result<Self> {
        Ok(BoundarySolver { lu: SparseLu::factor(&boundary_matrix(disc))? })
    }

    /// Boundary velocities (boundary-point order) given interior velocities.
    pub fn solve(&self, disc: &Discretization, interior: &[Vec2], g_tangential: &[f64]) -> Result<Vec<Vec2>> {
        let rhs = boundary_rhs(disc, interior, g_tangential)?;
        let x = self.lu.solve(&rhs)?;
        let nb = disc.cloud().n_boundary();
        Ok((0..nb).map(|b| Vec2::new(x[b], x[nb + b])).collect())
    }
}

/// Factor applied to the Neumann rows of the pressure system (matrix and
/// right-hand side) so they carry the `h^-2` magnitude of the Laplacian rows.
///
/// The bordered projection moves `alpha` into every row. Its weight in the
/// compatibility balance is `e^T w` for the left null vector `w` of `A`,
/// which approximates `|Omega| - |dOmega| / s` for Neumann rows scaled by `s`.
/// With `s = 1` this is negative on the unit-size domains used here, and the
/// projection then amplifies the mean divergence at a rate proportional to
/// lambda; with `s = 1/h` it damps it.
pub fn neumann_row_scale(cloud: &crate::pointcloud::PointCloud) -> f64 {
    1.0 / cloud.h()
}

/// The pressure matrix: interior Laplacian rows and `n . grad` rows at
/// boundary points, the latter multiplied by [`neumann_row_scale`]. Every
/// row sums to zero.
pub fn pressure_matrix(disc: &Discretization) -> CsrMatrix {
    let cloud = disc.cloud();
    let n = cloud.len();
    let scale = neumann_row_scale(cloud);
    let mut t = Vec::new();
    for row in disc.laplacian().rows() {
        t.push((row.center, row.center, row.diag));
        for (&j, &a) in row.neighbors.iter().zip(&row.weights) {
            t.push((row.center, j, a));
        }
    }
    for i in cloud.boundary_indices() {
        let nrm = scale * cloud.normal(i);
        for (row, c) in [(disc.dx().row(i), nrm.x), (disc.dy().row(i), nrm.y)] {
            t.push((i, i, c * row.diag));
            for (&j, &a) in row.neighbors.iter().zip(&row.weights) {
                t.push((i, j, c * a));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, t)
}

/// Solution `(p, alpha)` of the bordered system `[[A, e], [e^T, 0]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BorderedSolution {
    pub p: Vec<f64>,
    pub alpha: f64,
    /// `|e^T p|`.
    pub gauge: f64,
    /// `|A p - (r - alpha e)|_inf`.
    pub residual: f64,
    /// `|r|_inf`.
    pub rhs_norm: f64,
}

impl BorderedSolution {
    /// Whether the gauge and residual bounds of the bordered solve hold.
    pub fn satisfies_contract(&self) -> bool {
        let n = self.p.len() as f64;
        self.gauge <= 1e-10 * amax(&self.p) * n + f64::MIN_POSITIVE
            && self.residual <= 1e-8 * self.rhs_norm + f64::MIN_POSITIVE
    }
}

/// Prefactored bordered system for a corank-one Neumann matrix.
///
/// The border row and column are dense, so the system is solved by block
/// elimination against `M = A + e_j e_j^T`, which keeps the factorization as
/// sparse as `A` itself.
pub struct BorderedSolver {
    a: CsrMatrix,
    lu: SparseLu,
    pin: usize,
    z: Vec<f64>,
    q: Vec<f64>,
}

impl std::fmt::Debug for BorderedSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BorderedSolver").field("n", &self.a.nrows()).field("pin", &self.pin).finish()
    }
}

const PIN_CANDIDATES: usize = 8;

impl BorderedSolver {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::SizeMismatch { expected: n, found: a.ncols() });
        }
        if n == 0 {
            return Err(Error::InvalidInput("empty pressure matrix".into()));
        }
        let mut last = Error::SingularMatrix("no admissible pin".into());
        for k in 0..PIN_CANDIDATES.min(n) {
            let pin = k * n / PIN_CANDIDATES.min(n);
            match Self::with_pin(a, pin) {
                Ok(s) => return Ok(s),
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    fn with_pin(a: &CsrMatrix, pin: usize) -> Result<Self> {
        let n = a.nrows();
        let mut t: Vec<(usize, usize, f64)> = a.triplets().collect();
        t.push((pin, pin, 1.0));
        let lu = SparseLu::factor(&CsrMatrix::from_triplets(n, n, t))?;
        let z = lu.solve(&vec![1.0; n])?;
        let mut ej = vec![0.0; n];
        ej[pin] = 1.0;
        let q = lu.solve(&ej)?;
        let this = BorderedSolver { a: a.clone(), lu, pin, z, q };
        let [[a11, a12], [a21, a22]] = this.reduced();
        let det = a11 * a22 - a12 * a21;
        let scale = (a11.abs() + a12.abs()) * (a21.abs() + a22.abs());
        if !(det.abs() > 1e-12 * scale) {
            return Err(Error::SingularMatrix(format!("bordered system singular with pin {pin}")));
        }
        Ok(this)
    }

    /// Coefficients of `(alpha, p_pin)` in the reduced 2x2 system.
    fn reduced(&self) -> [[f64; 2]; 2] {
        let j = self.pin;
        [[self.z[j], 1.0 - self.q[j]], [self.z.iter().sum(), -self.q.iter().sum::<f64>()]]
    }

    /// Solves `A p + alpha e = r`, `e^T p = s`.
    fn solve_general(&self, r: &[f64], s: f64) -> Result<(Vec<f64>, f64)> {
        let y = self.lu.solve(r)?;
        let j = self.pin;
        let [[a11, a12], [a21, a22]] = self.reduced();
        let (b1, b2) = (y[j], y.iter().sum::<f64>() - s);
        let det = a11 * a22 - a12 * a21;
        let alpha = (b1 * a22 - a12 * b2) / det;
        let pj = (a11 * b2 - a21 * b1) / det;
        let p = y.iter().zip(&self.z).zip(&self.q).map(|((y, z), q)| y - alpha * z + pj * q).collect();
        Ok((p, alpha))
    }

    pub fn solve(&self, r: &[f64]) -> Result<BorderedSolution> {
        let n = self.a.nrows();
        if r.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: r.len() });
        }
        let (mut p, mut alpha) = self.solve_general(r, 0.0)?;
        let ap = self.a.matvec(&p);
        let res: Vec<f64> = ap.iter().zip(r).map(|(ap, r)| r - alpha - ap).collect();
        let (dp, da) = self.solve_general(&res, -p.iter().sum::<f64>())?;
        for (p, d) in p.iter_mut().zip(&dp) {
            *p += d;
        }
        alpha += da;
        let ap = self.a.matvec(&p);
        let residual = ap
            .iter()
            .zip(r)
            .fold(0.0f64, |m, (ap, r)| m.max((ap - (r - alpha)).abs()));
        let gauge = p.iter().sum::<f64>().abs();
        Ok(BorderedSolution { p, alpha, gauge, residual, rhs_norm: amax(r) })
    }
}

/// One-shot bordered solve.
pub fn solve_bordered(a: &CsrMatrix, r: &[f64]) -> Result<BorderedSolution> {
    BorderedSolver::new(a)?.solve(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let b = vec![1.0, -2.0, 3.5];
        assert_eq!(solve(&CsrMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn two_by_two() {
        let a = CsrMatrix::from_dense(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let x = solve(&a, &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_detected() {
        let a = CsrMatrix::from_dense(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(solve(&a, &[1.0, 2.0]), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn bordered_two_by_two() {
        // Oracle: dense elimination of [[1,-1,1],[-1,1,1],[1,1,0]] (p1,p2,alpha) = (1,0,0):
        // p1 + p2 = 0 and 2 p1 + alpha = 1, -2 p1 + alpha = 0 give p1 = 1/4, alpha = 1/2.
        let a = CsrMatrix::from_dense(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        let s = solve_bordered(&a, &[1.0, 0.0]).unwrap();
        assert!((s.p[0] - 0.25).abs() < 1e-14);
        assert!((s.p[1] + 0.25).abs() < 1e-14);
        assert!((s.alpha - 0.5).abs() < 1e-14);
        assert!(s.satisfies_contract());
    }

    #[test]
    fn bordered_constant_and_compatible_rhs() {
        let a = CsrMatrix::from_dense(&[&[2.0, -1.0, -1.0], &[-1.0, 2.0, -1.0], &[-1.0, -1.0, 2.0]]);
        let s = solve_bordered(&a, &[1.0, 1.0, 1.0]).unwrap();
        assert!(s.p.iter().all(|p| p.abs() < 1e-14));
        assert!((s.alpha - 1.0).abs() < 1e-14);
        let s = solve_bordered(&a, &[1.0, -3.0, 2.0]).unwrap();
        assert!(s.alpha.abs() < 1e-10 * 3.0);
        assert!(s.satisfies_contract());
    }

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (0, 1, 2.0), (1, 0, 1.0), (1, 0, -1.0)]);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.nnz(), 1);
        let mut out = Vec::new();
        m.write_coordinate(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 1 3.0000000000000000e0\n");
    }

    #[test]
    fn layout_round_trip() {
        let layout = EbcLayout { n_interior: 3, n_boundary: 2 };
        let u: Vec<Vec2> = (0..5).map(|i| Vec2::new(i as f64, -(i as f64))).collect();
        assert_eq!(layout.unpack(&layout.pack(&u)), u);
        assert_eq!(layout.ux(3), 6);
        assert_eq!(layout.uy(4), 9);
        assert_eq!(layout.row_block(7), RowBlock::BoundaryDivergence);
        assert_eq!(layout.col_block(8), ColBlock::BoundaryY);
    }
}
