//! Certified guessing probability.
//!
//! Primal: maximize `Σ_x tr(A_x E_x)` over POVMs `{E_x}`.
//! Dual: minimize `tr σ` subject to `σ ⪰ A_x` for every `x`.
//! A primal-dual interior-point method with Nesterov-Todd scaling drives both
//! sides together; whatever it returns is then repaired into an exactly
//! feasible POVM and an exactly feasible σ, and the bracket is read off those.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ensemble::{CqEnsemble, Povm};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::quantum::{c, re, ComplexMatrix, DensityOperator, C64, ZERO};

pub const DEFAULT_GAP: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;
pub const MAX_GUESS_DIM: usize = 64;
pub const MIN_GAP: f64 = 1e-8;

/// Tolerance used when re-verifying the dual certificate.
const DUAL_TOL: f64 = 1e-9;
const SUPPORT_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub gap: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { gap: DEFAULT_GAP, max_iterations: DEFAULT_MAX_ITERATIONS }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GuessBracket {
    pub lower: f64,
    pub upper: f64,
    pub witness_povm: Povm,
    pub witness_dual: ComplexMatrix,
    pub converged: bool,
    pub iterations: usize,
}

impl GuessBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// Re-checks both certificates against `ops` from scratch.
    /// Returns `(povm_sum_deviation, povm_min_eig, dual_min_eig)`.
    pub fn verify(&self, ops: &[(BitString, ComplexMatrix)]) -> (f64, f64, f64) {
        let (dev, min_e) = self.witness_povm.feasibility();
        let dual = ops
            .iter()
            .map(|(_, a)| (&self.witness_dual - a).hermitian_part().min_eigenvalue())
            .fold(f64::INFINITY, f64::min);
        (dev, min_e, dual)
    }
}

/// Sum of per-block brackets for an operator that is block diagonal across a
/// classical register.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockGuessBracket {
    pub lower: f64,
    pub upper: f64,
    pub converged: bool,
    pub blocks: Vec<GuessBracket>,
}

impl BlockGuessBracket {
    pub fn entropy(&self) -> EntropyBracket {
        EntropyBracket::from_guess(self.lower, self.upper)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyBracket {
    pub lower: f64,
    pub upper: f64,
}

impl EntropyBracket {
    pub fn from_guess(lower: f64, upper: f64) -> Self {
        Self { lower: -upper.log2(), upper: -lower.log2() }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lower - tol && v <= self.upper + tol
    }
}

pub fn pguess(ens: &CqEnsemble, gap: f64) -> Result<GuessBracket> {
    pguess_with(ens, &SolverOptions { gap, ..SolverOptions::default() })
}

pub fn pguess_with(ens: &CqEnsemble, opts: &SolverOptions) -> Result<GuessBracket> {
    guess_weighted(&ens.weighted_operators(), opts)
}

pub fn hmin(ens: &CqEnsemble, gap: f64) -> Result<EntropyBracket> {
    let b = pguess(ens, gap)?;
    Ok(EntropyBracket::from_guess(b.lower, b.upper))
}

/// `½(1 + ‖p0 ρ0 − p1 ρ1‖₁)`
pub fn helstrom_binary(p0: f64, rho0: &DensityOperator, p1: f64, rho1: &DensityOperator) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch { left: rho0.dim(), right: rho1.dim() });
    }
    if (p0 + p1 - 1.0).abs() > 1e-10 || p0 < 0.0 || p1 < 0.0 {
        return Err(Error::InvalidParameter(format!("priors {p0}, {p1} do not sum to 1")));
    }
    let diff = &rho0.matrix().scale(p0) - &rho1.matrix().scale(p1);
    Ok(0.5 * (1.0 + diff.trace_norm_hermitian()))
}

/// `E_x = S^{-1/2} A_x S^{-1/2}` with `S = Σ_x A_x`; the kernel of `S` goes to
/// the first label.
pub fn pretty_good_measurement(ops: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let d = ops[0].rows();
    let mut s = ComplexMatrix::zeros(d, d);
    for a in ops {
        s = &s + a;
    }
    let tol = SUPPORT_TOL * s.max_eigenvalue().max(1e-300);
    let inv = s.inv_sqrt_psd(tol);
    let kernel = s.spectral_map(|x| if x > tol { 0.0 } else { 1.0 });
    let mut out: Vec<ComplexMatrix> = ops.iter().map(|a| (&(&inv * a) * &inv).hermitian_part()).collect();
    out[0] = &out[0] + &kernel;
    repair_povm(&out)
}

/// Guessing probability from the unnormalized operators `A_x = p_x ρ_x`.
pub fn guess_weighted(ops: &[(BitString, ComplexMatrix)], opts: &SolverOptions) -> Result<GuessBracket> {
    if !(opts.gap >= MIN_GAP) {
        return Err(Error::InvalidParameter(format!("gap {} below {MIN_GAP}", opts.gap)));
    }
    let live: Vec<(BitString, ComplexMatrix)> =
        ops.iter().filter(|(_, a)| a.trace().re > 0.0).map(|(l, a)| (*l, a.hermitian_part())).collect();
    let d = live
        .first()
        .ok_or_else(|| Error::InvalidEnsemble("no label with positive weight".into()))?
        .1
        .rows();
    if live.iter().any(|(_, a)| a.rows() != d || !a.is_square()) {
        return Err(Error::InvalidEnsemble("conditional dimensions differ".into()));
    }
    if d > MAX_GUESS_DIM {
        return Err(Error::SizeCap(format!("conditional dimension {d} exceeds {MAX_GUESS_DIM}")));
    }
    let mats: Vec<ComplexMatrix> = live.iter().map(|(_, a)| a.clone()).collect();

    let (povm, sigma, converged, iterations) = if mats.len() == 1 {
        (vec![ComplexMatrix::identity(d)], mats[0].clone(), true, 0)
    } else {
        solve_by_blocks(&mats, opts)
    };
    let cert = certify(&mats, &povm, &sigma);
    let labels: Vec<BitString> = live.iter().map(|(l, _)| *l).collect();
    Ok(GuessBracket {
        lower: cert.lower,
        upper: cert.upper.max(cert.lower),
        witness_povm: Povm { elements: labels.into_iter().zip(cert.povm).collect() },
        witness_dual: cert.sigma,
        converged: converged && cert.upper - cert.lower <= opts.gap,
        iterations,
    })
}

/// Guessing probability of an operator family that is block diagonal over a
/// classical register: solves each block and sums the brackets.
pub fn pguess_block_diagonal(
    blocks: &[Vec<(BitString, ComplexMatrix)>],
    opts: &SolverOptions,
) -> Result<BlockGuessBracket> {
    let nonempty: Vec<&Vec<(BitString, ComplexMatrix)>> =
        blocks.iter().filter(|b| b.iter().any(|(_, a)| a.trace().re > 0.0)).collect();
    let per_block = SolverOptions { gap: (opts.gap / nonempty.len().max(1) as f64).max(MIN_GAP), ..*opts };
    let mut out = BlockGuessBracket { lower: 0.0, upper: 0.0, converged: true, blocks: Vec::new() };
    for b in nonempty {
        let g = guess_weighted(b, &per_block)?;
        out.lower += g.lower;
        out.upper += g.upper;
        out.converged &= g.converged;
        out.blocks.push(g);
    }
    out.converged &= out.upper - out.lower <= opts.gap;
    Ok(out)
}

/// Connected components of the union of supports of all operators.
fn components(ops: &[ComplexMatrix]) -> Vec<Vec<usize>> {
    let d = ops[0].rows();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for a in ops {
        for i in 0..d {
            for j in i + 1..d {
                if a.get(i, j) != ZERO {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; d];
    for i in 0..d {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }
    groups
}

fn submatrix(a: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(idx.len(), idx.len(), |i, j| a.get(idx[i], idx[j]))
}

fn solve_by_blocks(mats: &[ComplexMatrix], opts: &SolverOptions) -> (Vec<ComplexMatrix>, ComplexMatrix, bool, usize) {
    let d = mats[0].rows();
    let groups = components(mats);
    let mut povm = vec![ComplexMatrix::zeros(d, d); mats.len()];
    let mut sigma = ComplexMatrix::zeros(d, d);
    let mut converged = true;
    let mut iterations = 0;
    let block_gap = opts.gap / groups.len() as f64;
    for idx in &groups {
        let subs: Vec<ComplexMatrix> = mats.iter().map(|a| submatrix(a, idx)).collect();
        let (e, s, ok, it) = solve_reduced(&subs, block_gap, opts.max_iterations);
        converged &= ok;
        iterations = iterations.max(it);
        for (x, ex) in e.iter().enumerate() {
            for (i, &gi) in idx.iter().enumerate() {
                for (j, &gj) in idx.iter().enumerate() {
                    povm[x].set(gi, gj, ex.get(i, j));
                }
            }
        }
        for (i, &gi) in idx.iter().enumerate() {
            for (j, &gj) in idx.iter().enumerate() {
                sigma.set(gi, gj, s.get(i, j));
            }
        }
    }
    (povm, sigma, converged, iterations)
}

/// Restricts to the support of `Σ A_x`, solves there and lifts back.
fn solve_reduced(mats: &[ComplexMatrix], gap: f64, max_iter: usize) -> (Vec<ComplexMatrix>, ComplexMatrix, bool, usize) {
    let d = mats[0].rows();
    let mut s = ComplexMatrix::zeros(d, d);
    for a in mats {
        s = &s + a;
    }
    let eig = s.eigh();
    let top = eig.values.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..d).filter(|&k| eig.values[k] > SUPPORT_TOL * top.max(1e-300)).collect();
    let live: Vec<usize> = (0..mats.len()).filter(|&x| mats[x].trace().re > 0.0).collect();
    if keep.is_empty() || live.is_empty() {
        let mut e = vec![ComplexMatrix::zeros(d, d); mats.len()];
        e[0] = ComplexMatrix::identity(d);
        return (e, ComplexMatrix::zeros(d, d), true, 0);
    }
    let v = ComplexMatrix::from_fn(d, keep.len(), |i, j| eig.vectors.get(i, keep[j]));
    let compressed: Vec<ComplexMatrix> = live.iter().map(|&x| mats[x].compress(&v).hermitian_part()).collect();
    let (e_red, s_red, ok, it) = if compressed.len() == 1 {
        (vec![ComplexMatrix::identity(keep.len())], compressed[0].clone(), true, 0)
    } else {
        interior_point(&compressed, gap, max_iter)
    };
    let complement = &ComplexMatrix::identity(d) - &(&v * &v.adjoint());
    let mut e = vec![ComplexMatrix::zeros(d, d); mats.len()];
    for (k, &x) in live.iter().enumerate() {
        e[x] = e_red[k].expand(&v);
    }
    e[live[0]] = &e[live[0]] + &complement;
    (e, s_red.expand(&v).hermitian_part(), ok, it)
}

struct Certified {
    lower: f64,
    upper: f64,
    povm: Vec<ComplexMatrix>,
    sigma: ComplexMatrix,
}

fn value(mats: &[ComplexMatrix], povm: &[ComplexMatrix]) -> f64 {
    mats.iter().zip(povm).map(|(a, e)| a.trace_product(e).re).sum()
}

/// Clips each element to PSD and renormalizes by `T^{-1/2}`, `T = Σ E_x⁺`.
fn repair_povm(es: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let d = es[0].rows();
    let pos: Vec<ComplexMatrix> = es.iter().map(|e| e.hermitian_part().positive_part()).collect();
    let mut t = ComplexMatrix::zeros(d, d);
    for p in &pos {
        t = &t + p;
    }
    let tol = 1e-14;
    let inv = t.inv_sqrt_psd(tol);
    let kernel = t.spectral_map(|x| if x > tol { 0.0 } else { 1.0 });
    let mut out: Vec<ComplexMatrix> = pos.iter().map(|p| (&(&inv * p) * &inv).hermitian_part()).collect();
    out[0] = &out[0] + &kernel;
    out
}

/// Shifts a Hermitian candidate up until `σ ⪰ A_x` for every `x`.
fn repair_dual(mats: &[ComplexMatrix], sigma: &ComplexMatrix) -> ComplexMatrix {
    let s = sigma.hermitian_part();
    let d = s.rows();
    let mut shift: f64 = 0.0;
    for a in mats {
        shift = shift.max(-(&s - a).min_eigenvalue());
    }
    if shift <= 0.0 {
        return s;
    }
    // Slight overshoot so the independent eigenvalue re-check passes.
    
    &s + &ComplexMatrix::identity(d).scale(shift * (1.0 + 1e-9) + 1e-15)
}

fn certify(mats: &[ComplexMatrix], povm: &[ComplexMatrix], sigma: &ComplexMatrix) -> Certified {
    let d = mats[0].rows();
    let mut best_povm = repair_povm(povm);
    let mut lower = value(mats, &best_povm);
    if mats.len() > 1 {
        let pgm = pretty_good_measurement(mats);
        let v = value(mats, &pgm);
        if v > lower {
            lower = v;
            best_povm = pgm;
        }
    }
    let (argmax, pmax) = mats
        .iter()
        .map(|a| a.trace().re)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p > acc.1 { (i, p) } else { acc });
    if pmax > lower {
        lower = pmax;
        best_povm = vec![ComplexMatrix::zeros(d, d); mats.len()];
        best_povm[argmax] = ComplexMatrix::identity(d);
    }

    let mut candidates = vec![repair_dual(mats, sigma)];
    let mut y = ComplexMatrix::zeros(d, d);
    for (a, e) in mats.iter().zip(&best_povm) {
        y = &y + &(a * e);
    }
    candidates.push(repair_dual(mats, &y));
    let mut s_sum = ComplexMatrix::zeros(d, d);
    for a in mats {
        s_sum = &s_sum + a;
    }
    candidates.push(s_sum);
    let (sigma, upper) = candidates
        .into_iter()
        .filter(|s| mats.iter().all(|a| (s - a).min_eigenvalue() >= -DUAL_TOL))
        .map(|s| {
            let t = s.trace().re;
            (s, t)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("Σ_x A_x is always dual feasible");
    Certified { lower, upper, povm: best_povm, sigma }
}

/// Real orthonormal basis of the Hermitian matrices: diagonal units, then
/// symmetric and antisymmetric off-diagonal pairs.
struct HermitianBasis {
    d: usize,
    pairs: Vec<(usize, usize)>,
}

impl HermitianBasis {
    fn new(d: usize) -> Self {
        let mut pairs = Vec::with_capacity(d * (d - 1) / 2);
        for i in 0..d {
            for j in i + 1..d {
                pairs.push((i, j));
            }
        }
        Self { d, pairs }
    }

    fn len(&self) -> usize {
        self.d * self.d
    }

    fn svec(&self, h: &ComplexMatrix) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.d {
            out.push(h.get(i, i).re);
        }
        for &(i, j) in &self.pairs {
            let v = h.get(i, j);
            out.push(SQRT_2 * v.re);
            out.push(SQRT_2 * v.im);
        }
        out
    }

    fn smat(&self, v: &[f64]) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(self.d, self.d);
        for i in 0..self.d {
            h.set(i, i, re(v[i]));
        }
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            let z = c(v[self.d + 2 * k], v[self.d + 2 * k + 1]) / SQRT_2;
            h.set(i, j, z);
            h.set(j, i, z.conj());
        }
        h
    }

    /// Matrix of `Δ ↦ Σ_x W_x Δ W_x` in this basis.
    fn schur(&self, ws: &[ComplexMatrix]) -> DMatrix<f64> {
        let d = self.d;
        let n = self.len();
        let mut m = DMatrix::<f64>::zeros(n, n);
        let cols: Vec<Vec<Vec<C64>>> = ws.iter().map(|w| (0..d).map(|j| w.column(j)).collect()).collect();
        let mut y = vec![ZERO; d * d];
        let write_column = |m: &mut DMatrix<f64>, l: usize, y: &[C64]| {
            for i in 0..d {
                m[(i, l)] = y[i * d + i].re;
            }
            for (k, &(i, j)) in self.pairs.iter().enumerate() {
                let v = y[i * d + j];
                m[(d + 2 * k, l)] = SQRT_2 * v.re;
                m[(d + 2 * k + 1, l)] = SQRT_2 * v.im;
            }
        };
        for i in 0..d {
            y.iter_mut().for_each(|v| *v = ZERO);
            for wc in &cols {
                let wi = &wc[i];
                for a in 0..d {
                    for b in 0..d {
                        y[a * d + b] += wi[a] * wi[b].conj();
                    }
                }
            }
            write_column(&mut m, i, &y);
        }
        let inv = 1.0 / SQRT_2;
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            // W (e_i e_j† + e_j e_i†) W / √2 and i W (e_i e_j† − e_j e_i†) W / √2.
            let mut ys = vec![ZERO; d * d];
            let mut ya = vec![ZERO; d * d];
            for wc in &cols {
                let (wi, wj) = (&wc[i], &wc[j]);
                for a in 0..d {
                    for b in 0..d {
                        let p = wi[a] * wj[b].conj();
                        let q = wj[a] * wi[b].conj();
                        ys[a * d + b] += (p + q) * inv;
                        ya[a * d + b] += (p - q) * c(0.0, inv);
                    }
                }
            }
            write_column(&mut m, d + 2 * k, &ys);
            write_column(&mut m, d + 2 * k + 1, &ya);
        }
        m
    }
}

/// Largest step `α ≤ 1` keeping `X + α D ⪰ 0`, for `X ≻ 0`.
fn max_step(x_inv_sqrt: &ComplexMatrix, d: &ComplexMatrix) -> f64 {
    let m = (&(x_inv_sqrt * d) * x_inv_sqrt).hermitian_part();
    let lo = m.min_eigenvalue();
    if lo >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lo
    }
}

fn solve_spd(m: DMatrix<f64>, rhs: Vec<f64>) -> Vec<f64> {
    use faer::linalg::solvers::Solve;
    let n = rhs.len();
    let fm = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let b = faer::Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
    if let Ok(ch) = fm.llt(faer::Side::Lower) {
        let x = ch.solve(&b);
        return (0..n).map(|i| x[(i, 0)]).collect();
    }
    let x = fm.partial_piv_lu().solve(&b);
    (0..n).map(|i| if x[(i, 0)].is_finite() { x[(i, 0)] } else { 0.0 }).collect()
}

/// Feasible primal-dual path following on the reduced problem.
fn interior_point(mats: &[ComplexMatrix], gap: f64, max_iter: usize) -> (Vec<ComplexMatrix>, ComplexMatrix, bool, usize) {
    let labels = mats.len();
    let d = mats[0].rows();
    let basis = HermitianBasis::new(d);
    let id = ComplexMatrix::identity(d);

    let mut e: Vec<ComplexMatrix> = vec![id.scale(1.0 / labels as f64); labels];
    let mut s_sum = ComplexMatrix::zeros(d, d);
    for a in mats {
        s_sum = &s_sum + a;
    }
    // Σ A_x is dual feasible; push it into the interior.
    let scale = s_sum.max_eigenvalue().max(1e-300);
    let mut sigma = &s_sum + &id.scale(scale);

    let mut best: Option<(f64, Vec<ComplexMatrix>, ComplexMatrix)> = None;
    let target = 0.5 * gap;
    let mut stall = 0;
    for it in 0..max_iter {
        let cert = certify(mats, &e, &sigma);
        let width = cert.upper - cert.lower;
        let improved = best.as_ref().is_none_or(|(w, _, _)| width < *w * 0.999);
        if improved {
            stall = 0;
            best = Some((width, cert.povm.clone(), cert.sigma.clone()));
        } else {
            stall += 1;
        }
        if width <= target {
            return (cert.povm, cert.sigma, true, it);
        }
        if stall >= 25 {
            break;
        }

        let z: Vec<ComplexMatrix> = mats.iter().map(|a| (&sigma - a).hermitian_part()).collect();
        let mu: f64 = e.iter().zip(&z).map(|(ex, zx)| ex.trace_product(zx).re).sum::<f64>() / (labels * d) as f64;
        let tau = 0.1 * mu;

        let mut ws = Vec::with_capacity(labels);
        let mut z_inv = Vec::with_capacity(labels);
        let mut z_inv_sqrt = Vec::with_capacity(labels);
        let mut e_inv_sqrt = Vec::with_capacity(labels);
        for (ex, zx) in e.iter().zip(&z) {
            let zh = zx.sqrt_psd();
            let zhi = zx.inv_sqrt_psd(0.0);
            let g = (&(&zh * ex) * &zh).hermitian_part();
            let w = (&(&zhi * &g.sqrt_psd()) * &zhi).hermitian_part();
            ws.push(w);
            z_inv.push(zx.spectral_map(|v| if v > 0.0 { 1.0 / v } else { 0.0 }));
            z_inv_sqrt.push(zhi);
            e_inv_sqrt.push(ex.inv_sqrt_psd(0.0));
        }
        let mut rhs = ComplexMatrix::zeros(d, d);
        for (zi, ex) in z_inv.iter().zip(&e) {
            rhs = &rhs + &(&zi.scale(tau) - ex);
        }
        let schur = basis.schur(&ws);
        let delta = basis.smat(&solve_spd(schur, basis.svec(&rhs.hermitian_part())));

        let mut alpha_p = f64::INFINITY;
        let mut alpha_d = f64::INFINITY;
        let mut de = Vec::with_capacity(labels);
        for x in 0..labels {
            let dex = (&(&z_inv[x].scale(tau) - &e[x]) - &(&(&ws[x] * &delta) * &ws[x])).hermitian_part();
            alpha_p = alpha_p.min(max_step(&e_inv_sqrt[x], &dex));
            alpha_d = alpha_d.min(max_step(&z_inv_sqrt[x], &delta));
            de.push(dex);
        }
        let ap = (0.95 * alpha_p).min(1.0);
        let ad = (0.95 * alpha_d).min(1.0);
        for (ex, dex) in e.iter_mut().zip(&de) {
            ex.add_scaled(dex, ap);
        }
        sigma.add_scaled(&delta, ad);
        // Keep the equality constraint exact against rounding drift.
        let mut t = ComplexMatrix::zeros(d, d);
        for ex in &e {
            t = &t + ex;
        }
        let drift = &(&t - &id).scale(1.0 / labels as f64);
        for ex in e.iter_mut() {
            *ex = &*ex - drift;
        }
        if ap == 0.0 && ad == 0.0 {
            break;
        }
    }
    let (_, povm, sigma) = best.expect("at least one iteration ran");
    (povm, sigma, false, max_iter)
}
