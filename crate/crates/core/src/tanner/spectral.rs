//! Leading eigenvalues of the Tanner graph adjacency matrix and the
//! eigenvalue bound on the minimum pseudoweight of regular codes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::TannerGraph;
use crate::error::{Error, Result};
use crate::matrix::ParityCheckMatrix;

const RESIDUAL_TOL: f64 = 1e-9;
const MAX_QL_SWEEPS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralBoundResult {
    /// Largest eigenvalue of `A = [[0, H], [H^T, 0]]`.
    pub mu1: f64,
    /// Second largest (distinct) eigenvalue of `A`.
    pub mu2: f64,
    /// Column weight, when uniform.
    pub column_weight: Option<usize>,
    /// Row weight, when uniform.
    pub row_weight: Option<usize>,
    /// `n (2j - mu2^2) / (mu1^2 - mu2^2)`, using the eigenvalues `mu^2` of
    /// `H^T H`. Present only when applicable.
    pub bound: Option<f64>,
    /// Regular, connected, and `mu1 > mu2`.
    pub applicable: bool,
    pub lanczos_steps: usize,
}

/// Two largest eigenvalues of the symmetric adjacency matrix of `h`.
///
/// Lanczos with full reorthogonalization; stops when both Ritz residuals
/// are below `1e-9` or the Krylov space becomes invariant. Eigenvalues of
/// multiplicity > 1 appear once.
pub fn leading_eigenvalues(h: &ParityCheckMatrix) -> Result<(f64, f64, usize)> {
    let size = h.r() + h.n();
    if size == 0 || h.num_nonzeros() == 0 {
        return Err(Error::param("spectral analysis needs a non-empty matrix"));
    }
    let apply = |x: &[f64], y: &mut [f64]| {
        let r = h.r();
        for (c, cols) in h.rows().iter().enumerate() {
            y[c] = cols.iter().map(|&v| x[r + v]).sum();
        }
        for (v, rows) in h.cols().iter().enumerate() {
            y[r + v] = rows.iter().map(|&c| x[c]).sum();
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a2c);
    let mut q: Vec<f64> = (0..size).map(|_| rng.gen::<f64>() - 0.5).collect();
    normalize(&mut q);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; size];
    let max_steps = size.min(100_000);

    for k in 0..max_steps {
        apply(&basis[k], &mut w);
        let a = dot(&basis[k], &w);
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= proj * bi);
            }
        }
        let b = norm(&w);
        let scale = alpha.iter().map(|x| x.abs()).fold(1.0, f64::max);
        let invariant = b <= 1e-12 * scale;

        if k >= 1 || invariant {
            let (vals, last) = tridiagonal_eigen(&alpha, &beta)?;
            let mut order: Vec<usize> = (0..vals.len()).collect();
            order.sort_by(|&x, &y| vals[y].total_cmp(&vals[x]));
            let top = &order[..order.len().min(2)];
            let done = invariant
                || top
                    .iter()
                    .all(|&i| (b * last[i]).abs() <= RESIDUAL_TOL * vals[i].abs().max(1.0));
            if done {
                let mu1 = vals[order[0]];
                let mu2 = order.get(1).map_or(mu1, |&i| vals[i]);
                return Ok((mu1, mu2, k + 1));
            }
        }
        if k + 1 == max_steps {
            break;
        }
        beta.push(b);
        let next: Vec<f64> = w.iter().map(|x| x / b).collect();
        basis.push(next);
    }
    Err(Error::Numerical(format!(
        "Lanczos did not converge within {max_steps} steps"
    )))
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off`, plus the last component of each unit eigenvector.
/// Implicit QL with Wilkinson shifts.
fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);
    // only the last row of the eigenvector matrix is needed
    let mut z = vec![0.0; n];
    z[n - 1] = 1.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::Numerical("tridiagonal QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) {
    let n = norm(a);
    a.iter_mut().for_each(|x| *x /= n);
}

/// Eigenvalues and the pseudoweight bound for `h`.
///
/// The eigenvalues of `H^T H` are the squares of the nonnegative
/// eigenvalues of `A`, so the bound is evaluated as
/// `n (2j - mu2^2) / (mu1^2 - mu2^2)`; for a connected `(j, k)`-regular
/// code `mu1^2 = jk`. A nonpositive value is vacuous but still reported.
pub fn spectral_bound(h: &ParityCheckMatrix) -> Result<SpectralBoundResult> {
    let (mu1, mu2, steps) = leading_eigenvalues(h)?;
    let j = h.uniform_column_weight();
    let k = h.uniform_row_weight();
    let connected = TannerGraph::new(h).is_connected();
    let applicable = j.is_some() && k.is_some() && connected && mu1 - mu2 > 1e-9;
    let bound = match (applicable, j) {
        (true, Some(j)) => {
            let (l1, l2) = (mu1 * mu1, mu2 * mu2);
            Some(h.n() as f64 * (2.0 * j as f64 - l2) / (l1 - l2))
        }
        _ => None,
    };
    Ok(SpectralBoundResult {
        mu1,
        mu2,
        column_weight: j,
        row_weight: k,
        bound,
        applicable,
        lanczos_steps: steps,
    })
}
