//! Infeasible-start primal-dual interior-point method for [`StandardForm`]
//! problems: HKM search direction with a Mehrotra predictor-corrector.

use nalgebra::DVector;

use super::standard::{Blk, Cone, Entry, StandardForm};
use super::{BackendSolution, ConicBackend};
use crate::linalg::RMatrix;

/// Default backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct InteriorPoint;

impl ConicBackend for InteriorPoint {
    fn name(&self) -> &'static str {
        "interior-point"
    }

    fn solve(&self, sf: &StandardForm, tol: f64, max_iter: usize) -> BackendSolution {
        Ipm::new(sf).run(tol, max_iter)
    }
}

struct Ipm<'a> {
    sf: &'a StandardForm,
    c: Vec<Blk>,
    /// Constraint rows touching each block.
    by_block: Vec<Vec<(usize, Vec<Entry>)>>,
    n_total: f64,
}

struct Dir {
    dx: Vec<Blk>,
    dz: Vec<Blk>,
    dy: Vec<f64>,
    du: Vec<f64>,
}

enum Kkt {
    Chol(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl Kkt {
    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        match self {
            Kkt::Chol(c) => Some(c.solve(rhs)),
            Kkt::Lu(lu) => lu.solve(rhs),
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn blocks_norm(b: &[Blk]) -> f64 {
    b.iter().map(Blk::norm_sq).sum::<f64>().sqrt()
}

fn blocks_inner(a: &[Blk], b: &[Blk]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.inner(y)).sum()
}

fn sym(m: RMatrix) -> RMatrix {
    (&m + m.transpose()) * 0.5
}

/// Largest `α` with `X + α dX ⪰ 0` (infinite when unbounded).
fn max_step(x: &Blk, dx: &Blk) -> f64 {
    match (x, dx) {
        (Blk::Dense(x), Blk::Dense(dx)) => {
            let Some(ch) = x.clone().cholesky() else {
                return 0.0;
            };
            let l = ch.l();
            let Some(t) = l.solve_lower_triangular(dx) else {
                return 0.0;
            };
            let Some(w) = l.solve_lower_triangular(&t.transpose()) else {
                return 0.0;
            };
            let lmin = sym(w).symmetric_eigenvalues().min();
            if lmin >= 0.0 {
                f64::INFINITY
            } else {
                -1.0 / lmin
            }
        }
        (Blk::Diag(x), Blk::Diag(dx)) => x
            .iter()
            .zip(dx.iter())
            .filter(|(_, &d)| d < 0.0)
            .map(|(&v, &d)| -v / d)
            .fold(f64::INFINITY, f64::min),
        _ => unreachable!(),
    }
}

fn inverse(z: &Blk) -> Option<Blk> {
    match z {
        Blk::Dense(z) => z.clone().cholesky().map(|c| Blk::Dense(c.inverse())),
        Blk::Diag(z) => Some(Blk::Diag(z.map(|v| 1.0 / v))),
    }
}

impl<'a> Ipm<'a> {
    fn new(sf: &'a StandardForm) -> Self {
        let mut by_block: Vec<Vec<(usize, Vec<Entry>)>> = vec![Vec::new(); sf.cones.len()];
        for (i, row) in sf.a.iter().enumerate() {
            let mut per: Vec<Vec<Entry>> = vec![Vec::new(); sf.cones.len()];
            for e in row {
                per[e.block].push(*e);
            }
            for (b, es) in per.into_iter().enumerate() {
                if !es.is_empty() {
                    by_block[b].push((i, es));
                }
            }
        }
        let n_total = sf.cones.iter().map(Cone::size).sum::<usize>().max(1) as f64;
        Self { sf, c: sf.c_blocks(), by_block, n_total }
    }

    fn initial_point(&self) -> (Vec<Blk>, Vec<Blk>) {
        let sf = self.sf;
        let mut row_norm = vec![vec![0.0f64; sf.cones.len()]; sf.n_rows()];
        for (i, row) in sf.a.iter().enumerate() {
            for e in row {
                let w = if e.r == e.c { 1.0 } else { 2.0 };
                row_norm[i][e.block] += w * e.v * e.v;
            }
        }
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        for (b, &cone) in sf.cones.iter().enumerate() {
            let n = cone.size() as f64;
            let mut xi = 10.0f64.max(n.sqrt());
            let mut eta = xi.max(self.c[b].norm_sq().sqrt());
            for (i, rn) in row_norm.iter().enumerate() {
                let an = rn[b].sqrt();
                if an > 0.0 {
                    xi = xi.max(n * (1.0 + sf.b[i].abs()) / (1.0 + an));
                    eta = eta.max(an);
                }
            }
            xs.push(Blk::scaled_identity(cone, xi));
            zs.push(Blk::scaled_identity(cone, eta));
        }
        (xs, zs)
    }

    /// Schur complement `M_ij = <A_i, X A_j Z^{-1}>`.
    fn schur(&self, x: &[Blk], zinv: &[Blk]) -> RMatrix {
        let p = self.sf.n_rows();
        let mut m = RMatrix::zeros(p, p);
        for (b, rows) in self.by_block.iter().enumerate() {
            match (&x[b], &zinv[b]) {
                (Blk::Dense(xb), Blk::Dense(zb)) => {
                    let n = xb.nrows();
                    let mut g = RMatrix::zeros(n, n);
                    for (j, ej) in rows {
                        g.fill(0.0);
                        for e in ej {
                            g.ger(e.v, &xb.column(e.r), &zb.row(e.c).transpose(), 1.0);
                            if e.r != e.c {
                                g.ger(e.v, &xb.column(e.c), &zb.row(e.r).transpose(), 1.0);
                            }
                        }
                        let gb = Blk::Dense(g);
                        for (i, ei) in rows {
                            m[(*i, *j)] += ei.iter().map(|e| gb.entry_dot(e)).sum::<f64>();
                        }
                        let Blk::Dense(back) = gb else { unreachable!() };
                        g = back;
                    }
                }
                (Blk::Diag(xb), Blk::Diag(zb)) => {
                    for (j, ej) in rows {
                        for (i, ei) in rows {
                            let mut s = 0.0;
                            for a in ei {
                                for c in ej.iter().filter(|c| c.r == a.r) {
                                    s += a.v * c.v * xb[a.r] * zb[a.r];
                                }
                            }
                            m[(*i, *j)] += s;
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        sym(m)
    }

    fn factor(&self, m: RMatrix) -> Option<Kkt> {
        let sf = self.sf;
        let p = sf.n_rows();
        let nf = sf.free.len();
        if nf == 0 {
            if let Some(c) = m.clone().cholesky() {
                return Some(Kkt::Chol(c));
            }
        }
        let mut k = RMatrix::zeros(p + nf, p + nf);
        k.view_mut((0, 0), (p, p)).copy_from(&m);
        let scale = m.diagonal().amax().max(1.0);
        for (col, entries) in sf.free.iter().enumerate() {
            for &(i, v) in entries {
                k[(i, p + col)] += v;
                k[(p + col, i)] += v;
            }
        }
        let lu = k.clone().lu();
        if lu.is_invertible() {
            return Some(Kkt::Lu(lu));
        }
        for i in 0..p {
            k[(i, i)] += 1e-12 * scale;
        }
        let lu = k.lu();
        lu.is_invertible().then_some(Kkt::Lu(lu))
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        kkt: &Kkt,
        x: &[Blk],
        zinv: &[Blk],
        rp: &[f64],
        rd: &[Blk],
        rf: &[f64],
        smu: f64,
        corr: Option<&[Blk]>,
    ) -> Option<Dir> {
        let sf = self.sf;
        let p = sf.n_rows();
        // Q = σμ Z⁻¹ - X - X Rd Z⁻¹ - corr Z⁻¹
        let q: Vec<Blk> = (0..x.len())
            .map(|b| match (&x[b], &zinv[b], &rd[b]) {
                (Blk::Dense(xb), Blk::Dense(zi), Blk::Dense(r)) => {
                    let mut q = zi * smu - xb - xb * r * zi;
                    if let Some(Blk::Dense(c)) = corr.map(|c| &c[b]) {
                        q -= c * zi;
                    }
                    Blk::Dense(q)
                }
                (Blk::Diag(xb), Blk::Diag(zi), Blk::Diag(r)) => {
                    let mut q = zi * smu - xb - xb.component_mul(r).component_mul(zi);
                    if let Some(Blk::Diag(c)) = corr.map(|c| &c[b]) {
                        q -= c.component_mul(zi);
                    }
                    Blk::Diag(q)
                }
                _ => unreachable!(),
            })
            .collect();
        let aq = sf.apply_a(&q);
        let mut rhs = DVector::zeros(p + sf.free.len());
        for i in 0..p {
            rhs[i] = rp[i] - aq[i];
        }
        for (k, &v) in rf.iter().enumerate() {
            rhs[p + k] = v;
        }
        let sol = kkt.solve(&rhs)?;
        if sol.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let dy: Vec<f64> = sol.rows(0, p).iter().copied().collect();
        let du: Vec<f64> = sol.rows(p, sf.free.len()).iter().copied().collect();
        let aty = sf.apply_at(&dy);
        let dz: Vec<Blk> = rd
            .iter()
            .zip(&aty)
            .map(|(r, a)| {
                let mut d = r.clone();
                d.axpy(-1.0, a);
                d
            })
            .collect();
        let dx: Vec<Blk> = (0..x.len())
            .map(|b| match (&x[b], &zinv[b], &dz[b]) {
                (Blk::Dense(xb), Blk::Dense(zi), Blk::Dense(d)) => {
                    let mut t = zi * smu - xb - xb * d * zi;
                    if let Some(Blk::Dense(c)) = corr.map(|c| &c[b]) {
                        t -= c * zi;
                    }
                    Blk::Dense(sym(t))
                }
                (Blk::Diag(xb), Blk::Diag(zi), Blk::Diag(d)) => {
                    let mut t = zi * smu - xb - xb.component_mul(d).component_mul(zi);
                    if let Some(Blk::Diag(c)) = corr.map(|c| &c[b]) {
                        t -= c.component_mul(zi);
                    }
                    Blk::Diag(t)
                }
                _ => unreachable!(),
            })
            .collect();
        Some(Dir { dx, dz, dy, du })
    }

    fn run(&self, tol: f64, max_iter: usize) -> BackendSolution {
        let sf = self.sf;
        let p = sf.n_rows();
        let (mut x, mut z) = self.initial_point();
        let mut y = vec![0.0; p];
        let mut u = vec![0.0; sf.free.len()];
        let b_norm = norm(&sf.b);
        let c_norm = blocks_norm(&self.c) + norm(&sf.c_free);

        let mut best: Option<(f64, BackendSolution)> = None;
        let mut message = String::from("iteration limit");
        let mut iterations = 0;
        let mut stall = 0;

        for iter in 0..=max_iter {
            iterations = iter;
            let ax = sf.apply_a(&x);
            let bu = sf.apply_b(&u);
            let rp: Vec<f64> = (0..p).map(|i| sf.b[i] - ax[i] - bu[i]).collect();
            let aty = sf.apply_at(&y);
            let rd: Vec<Blk> = (0..x.len())
                .map(|b| {
                    let mut r = self.c[b].clone();
                    r.axpy(-1.0, &aty[b]);
                    r.axpy(-1.0, &z[b]);
                    r
                })
                .collect();
            let bty = sf.apply_bt(&y);
            let rf: Vec<f64> = sf.c_free.iter().zip(&bty).map(|(c, v)| c - v).collect();

            let xz = blocks_inner(&x, &z);
            let mu = xz / self.n_total;
            let pobj = blocks_inner(&self.c, &x)
                + sf.c_free.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
            let dobj = sf.b.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
            let pinf = norm(&rp) / (1.0 + b_norm);
            let dinf = (blocks_norm(&rd).powi(2) + norm(&rf).powi(2)).sqrt() / (1.0 + c_norm);
            let denom = 1.0 + pobj.abs() + dobj.abs();
            let gap = xz.max((pobj - dobj).abs()) / denom;
            let merit = pinf.max(dinf).max(gap);

            let snapshot = |msg: &str, converged: bool| BackendSolution {
                x: x.clone(),
                z: z.clone(),
                y: y.clone(),
                u: u.clone(),
                converged,
                merit,
                iterations: iter,
                primal_objective: pobj,
                dual_objective: dobj,
                message: msg.to_string(),
            };
            if merit.is_finite() && best.as_ref().is_none_or(|(m, _)| merit < *m) {
                best = Some((merit, snapshot("best iterate", false)));
                stall = 0;
            } else {
                stall += 1;
            }
            if pinf < tol && dinf < tol && gap < tol {
                return snapshot("converged", true);
            }
            if !merit.is_finite() {
                message = "numerical breakdown".into();
                break;
            }
            // Unbounded dual ray: primal infeasibility is likely.
            if dinf < tol && dobj > 1e8 * (1.0 + c_norm) && pinf > tol {
                message = "dual objective diverging".into();
                break;
            }
            // Unbounded primal ray.
            if pinf < tol && -pobj > 1e8 * (1.0 + b_norm) && dinf > tol {
                message = "primal objective diverging".into();
                break;
            }
            if blocks_norm(&x) > 1e12 || blocks_norm(&z) > 1e12 {
                message = "iterates diverging".into();
                break;
            }
            if stall > 30 {
                message = "stalled".into();
                break;
            }
            if iter == max_iter {
                break;
            }

            let Some(zinv) = z.iter().map(inverse).collect::<Option<Vec<_>>>() else {
                message = "lost positive definiteness".into();
                break;
            };
            let m = self.schur(&x, &zinv);
            let Some(kkt) = self.factor(m) else {
                message = "singular Schur complement".into();
                break;
            };
            let Some(pred) = self.direction(&kkt, &x, &zinv, &rp, &rd, &rf, 0.0, None) else {
                message = "failed direction solve".into();
                break;
            };
            let ap = pred.dx.iter().zip(&x).map(|(d, v)| max_step(v, d)).fold(1.0, f64::min);
            let ad = pred.dz.iter().zip(&z).map(|(d, v)| max_step(v, d)).fold(1.0, f64::min);
            let mut xa = x.clone();
            let mut za = z.clone();
            for b in 0..x.len() {
                xa[b].axpy(ap, &pred.dx[b]);
                za[b].axpy(ad, &pred.dz[b]);
            }
            let mu_aff = blocks_inner(&xa, &za) / self.n_total;
            let expon = 1f64.max(3.0 * ap.min(ad).powi(2));
            let sigma = (mu_aff.max(0.0) / mu).powf(expon).clamp(0.0, 1.0);
            let corr: Vec<Blk> = pred
                .dx
                .iter()
                .zip(&pred.dz)
                .map(|(dx, dz)| match (dx, dz) {
                    (Blk::Dense(a), Blk::Dense(b)) => Blk::Dense(a * b),
                    (Blk::Diag(a), Blk::Diag(b)) => Blk::Diag(a.component_mul(b)),
                    _ => unreachable!(),
                })
                .collect();
            let Some(dir) =
                self.direction(&kkt, &x, &zinv, &rp, &rd, &rf, sigma * mu, Some(&corr))
            else {
                message = "failed direction solve".into();
                break;
            };
            let gamma = 0.9 + 0.09 * ap.min(ad);
            let ap = dir.dx.iter().zip(&x).map(|(d, v)| gamma * max_step(v, d)).fold(1.0, f64::min);
            let ad = dir.dz.iter().zip(&z).map(|(d, v)| gamma * max_step(v, d)).fold(1.0, f64::min);
            if ap.min(ad) < 1e-12 {
                message = "step length collapsed".into();
                break;
            }
            for b in 0..x.len() {
                x[b].axpy(ap, &dir.dx[b]);
                z[b].axpy(ad, &dir.dz[b]);
            }
            for (a, d) in u.iter_mut().zip(&dir.du) {
                *a += ap * d;
            }
            for (a, d) in y.iter_mut().zip(&dir.dy) {
                *a += ad * d;
            }
        }

        let mut out = match best {
            Some((_, s)) => s,
            None => BackendSolution {
                x,
                z,
                y,
                u,
                converged: false,
                merit: f64::INFINITY,
                iterations,
                primal_objective: f64::NAN,
                dual_objective: f64::NAN,
                message: String::new(),
            },
        };
        out.iterations = iterations;
        out.message = message;
        out
    }
}
