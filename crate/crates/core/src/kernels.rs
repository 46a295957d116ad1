//! Inner-loop primitives for the layer math.
//!
//! Convolutions and the LSTM gate precomputation are phrased as
//! matrix-matrix products and go through `matmul_acc`, whose 6x8
//! register-blocked microkernel keeps six independent accumulator rows in
//! flight; the loop order over the shared dimension is fixed, so results
//! are bit-reproducible across runs. `axpy`, `dot` and `gemv_rows_acc`
//! cover the remaining vector-sized work.

/// `out[i] += a * row[i]`
#[inline]
pub fn axpy(a: f64, row: &[f64], out: &mut [f64]) {
    debug_assert_eq!(row.len(), out.len());
    for (o, &w) in out.iter_mut().zip(row) {
        *o += a * w;
    }
}

/// Dot product with a fixed four-lane reduction.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let j = i * 4;
        acc[0] += a[j] * b[j];
        acc[1] += a[j + 1] * b[j + 1];
        acc[2] += a[j + 2] * b[j + 2];
        acc[3] += a[j + 3] * b[j + 3];
    }
    let mut tail = 0.0;
    for j in chunks * 4..a.len() {
        tail += a[j] * b[j];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `out += Σ_r coefs[r] * mat[r, :]` over the first `coefs.len()` rows of a
/// row-major matrix with row stride `ld`. Rows are folded four at a time so
/// the accumulator is traversed once per group instead of once per row.
pub fn gemv_rows_acc(coefs: &[f64], mat: &[f64], ld: usize, out: &mut [f64]) {
    let n = out.len();
    let mut r = 0;
    while r + 4 <= coefs.len() {
        let (c0, c1, c2, c3) = (coefs[r], coefs[r + 1], coefs[r + 2], coefs[r + 3]);
        let m0 = &mat[r * ld..r * ld + n];
        let m1 = &mat[(r + 1) * ld..(r + 1) * ld + n];
        let m2 = &mat[(r + 2) * ld..(r + 2) * ld + n];
        let m3 = &mat[(r + 3) * ld..(r + 3) * ld + n];
        for i in 0..n {
            out[i] += (c0 * m0[i] + c1 * m1[i]) + (c2 * m2[i] + c3 * m3[i]);
        }
        r += 4;
    }
    while r < coefs.len() {
        axpy(coefs[r], &mat[r * ld..r * ld + n], out);
        r += 1;
    }
}

/// Hyperbolic tangent through `1 - 2 / (e^{2x} + 1)`. The system `tanh`
/// is several times slower than `exp` in this libm, and the gate math
/// calls it tens of thousands of times per window. The identity form is
/// exact, saturates to exactly +/-1 at both extremes without branches,
/// and stays within a few ulp of the system implementation.
#[inline]
pub fn tanh(x: f64) -> f64 {
    1.0 - 2.0 / ((2.0 * x).exp() + 1.0)
}

/// `dst[c, r] = src[r, c]` for a row-major `rows x cols` matrix.
pub fn transpose(src: &[f64], rows: usize, cols: usize, dst: &mut [f64]) {
    debug_assert_eq!(src.len(), rows * cols);
    debug_assert_eq!(dst.len(), rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

const MR: usize = 6;
const NR: usize = 8;

/// `C[m, n] += A[m, k] * B[k, n]` with explicit row strides (in elements)
/// for each operand. For every output element the shared dimension is
/// accumulated in ascending order regardless of which internal path handles
/// it, so the result is independent of the tiling.
#[allow(clippy::too_many_arguments)]
pub fn matmul_acc(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    lda: usize,
    b: &[f64],
    ldb: usize,
    c: &mut [f64],
    ldc: usize,
) {
    if m == 0 || n == 0 || k == 0 {
        return;
    }
    debug_assert!(a.len() >= (m - 1) * lda + k);
    debug_assert!(b.len() >= (k - 1) * ldb + n);
    debug_assert!(c.len() >= (m - 1) * ldc + n);

    let mut i = 0;
    while i + MR <= m {
        let a_block = &a[i * lda..];
        let mut j = 0;
        while j + NR <= n {
            kernel_6x8(k, a_block, lda, &b[j..], ldb, &mut c[i * ldc + j..], ldc);
            j += NR;
        }
        if j < n {
            for r in 0..MR {
                row_tail(k, n - j, &a[(i + r) * lda..], &b[j..], ldb, &mut c[(i + r) * ldc + j..]);
            }
        }
        i += MR;
    }
    while i < m {
        row_tail(k, n, &a[i * lda..], b, ldb, &mut c[i * ldc..]);
        i += 1;
    }
}

/// One 6x8 output tile held in registers across the whole k loop. The A
/// rows are pre-bounded to length `k` so the index `l` needs no bounds
/// checks inside the loop.
fn kernel_6x8(k: usize, a: &[f64], lda: usize, b: &[f64], ldb: usize, c: &mut [f64], ldc: usize) {
    let a0 = &a[..k];
    let a1 = &a[lda..lda + k];
    let a2 = &a[2 * lda..2 * lda + k];
    let a3 = &a[3 * lda..3 * lda + k];
    let a4 = &a[4 * lda..4 * lda + k];
    let a5 = &a[5 * lda..5 * lda + k];

    let mut acc0: [f64; NR] = c[..NR].try_into().unwrap();
    let mut acc1: [f64; NR] = c[ldc..ldc + NR].try_into().unwrap();
    let mut acc2: [f64; NR] = c[2 * ldc..2 * ldc + NR].try_into().unwrap();
    let mut acc3: [f64; NR] = c[3 * ldc..3 * ldc + NR].try_into().unwrap();
    let mut acc4: [f64; NR] = c[4 * ldc..4 * ldc + NR].try_into().unwrap();
    let mut acc5: [f64; NR] = c[5 * ldc..5 * ldc + NR].try_into().unwrap();

    for l in 0..k {
        let bv: [f64; NR] = b[l * ldb..l * ldb + NR].try_into().unwrap();
        let (x0, x1, x2) = (a0[l], a1[l], a2[l]);
        let (x3, x4, x5) = (a3[l], a4[l], a5[l]);
        for j in 0..NR {
            acc0[j] += x0 * bv[j];
            acc1[j] += x1 * bv[j];
            acc2[j] += x2 * bv[j];
            acc3[j] += x3 * bv[j];
            acc4[j] += x4 * bv[j];
            acc5[j] += x5 * bv[j];
        }
    }

    c[..NR].copy_from_slice(&acc0);
    c[ldc..ldc + NR].copy_from_slice(&acc1);
    c[2 * ldc..2 * ldc + NR].copy_from_slice(&acc2);
    c[3 * ldc..3 * ldc + NR].copy_from_slice(&acc3);
    c[4 * ldc..4 * ldc + NR].copy_from_slice(&acc4);
    c[5 * ldc..5 * ldc + NR].copy_from_slice(&acc5);
}

/// One output row, any width: plain accumulation in ascending k order.
fn row_tail(k: usize, n: usize, a: &[f64], b: &[f64], ldb: usize, c: &mut [f64]) {
    for l in 0..k {
        let av = a[l];
        let b_row = &b[l * ldb..l * ldb + n];
        for j in 0..n {
            c[j] += av * b_row[j];
        }
    }
}
