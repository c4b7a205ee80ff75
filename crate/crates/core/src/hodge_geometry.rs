//! Curvature of the Hodge metric `h = 2g + e^{2K} F F̄ g⁻¹ g⁻¹`.
//!
//! The closed form below is valid in Weil-Petersson normal gauge (see
//! [`crate::wp_geometry::normal_gauge`]), where `g = I`, `dg = 0`, `K = 0`,
//! `∂K = 0` at the base point and therefore `h = 2δ + F F̄`. The
//! finite-difference path differentiates `h` directly in whatever
//! coordinates the prepotential is written in.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fd::{self, Stencil};
use crate::fixtures;
use crate::jets::C64;
use crate::linalg::{self, c, CMat, CVec};
use crate::prepotential::{period_vector, PeriodJet, Prepotential};
use crate::wp_geometry::{
    hodge_metric, kahler_potential, normal_gauge, wp_metric, yukawa, CubicForm, CurvatureTensor, HermitianTensor,
    NormalGauge,
};

/// Tolerance used to decide whether period data is already in normal gauge.
pub const NORMAL_GAUGE_TOL: f64 = 1e-8;

/// `F_{irs,k}`, stored at `[((i n + r) n + s) n + k]`.
#[derive(Clone, Debug)]
pub struct CovariantCubic {
    pub point: Vec<C64>,
    n: usize,
    data: Vec<C64>,
}

impl CovariantCubic {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, r: usize, s: usize, k: usize) -> C64 {
        let n = self.n;
        self.data[((i * n + r) * n + s) * n + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Largest violation of symmetry in the first three slots.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut r = 0.0f64;
        for i in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for k in 0..n {
                        let v = self.get(i, a, b, k);
                        r = r.max((v - self.get(a, i, b, k)).norm()).max((v - self.get(i, b, a, k)).norm());
                    }
                }
            }
        }
        r
    }
}

/// Largest deviation from `K = 0`, `∂K = 0`, `g = I`, `∂g = 0` at the base point.
pub fn normal_gauge_residual(p: &PeriodJet) -> Result<f64> {
    let n = p.n();
    let k = kahler_potential(p)?;
    let mut r = k.value().abs();
    for v in k.grad()? {
        r = r.max(v.norm());
    }
    r = r.max(linalg::max_abs(&(k.hessian()? - CMat::identity(n, n))));
    if p.order() >= 3 {
        for a in 0..n {
            for i in 0..n {
                for kk in 0..n {
                    r = r.max(k.mixed(&[i, kk], &[a])?.norm());
                }
            }
        }
    }
    Ok(r)
}

fn require_normal_gauge(p: &PeriodJet) -> Result<()> {
    let r = normal_gauge_residual(p)?;
    if r > NORMAL_GAUGE_TOL {
        return Err(Error::NotNormalGauge(r));
    }
    Ok(())
}

/// `F_{irs,k} = ∂ₖF_{irs} + 2KₖF_{irs}` for period data in normal gauge.
pub fn covariant_cubic(p: &PeriodJet) -> Result<CovariantCubic> {
    p.require_order(4)?;
    require_normal_gauge(p)?;
    let n = p.n();
    let omega = p.value();
    let kgrad = kahler_potential(p)?.grad()?;
    let f = yukawa(p)?;
    let tangents: Vec<CVec> = (0..n).map(|k| p.deriv(&[k])).collect::<Result<_>>()?;
    let mut data = vec![c(0.0, 0.0); n * n * n * n];
    for i in 0..n {
        for r in i..n {
            for s in r..n {
                let third = p.deriv(&[i, r, s])?;
                for k in 0..n {
                    let fourth = p.deriv(&[i, r, s, k])?;
                    let v = p.q.pair(&tangents[k], &third) + p.q.pair(&omega, &fourth) + kgrad[k] * f.get(i, r, s) * 2.0;
                    for (a, b, cc) in [(i, r, s), (i, s, r), (r, i, s), (r, s, i), (s, i, r), (s, r, i)] {
                        data[((a * n + b) * n + cc) * n + k] = v;
                    }
                }
            }
        }
    }
    Ok(CovariantCubic { point: p.base_point.clone(), n, data })
}

/// The two pieces of `R̃ = A + B` and the contraction `A_{ik m̄} = Σ F_{irs,k} F̄_{mrs}`.
#[derive(Clone, Debug)]
pub struct ABSplit {
    pub a: CurvatureTensor,
    pub b: CurvatureTensor,
    am: Vec<C64>,
    n: usize,
}

impl ABSplit {
    pub fn am(&self, i: usize, k: usize, m: usize) -> C64 {
        self.am[(i * self.n + k) * self.n + m]
    }

    pub fn sum(&self) -> CurvatureTensor {
        let a = &self.a;
        let b = &self.b;
        CurvatureTensor::from_fn(a.point.clone(), self.n, |i, j, k, l| a.get(i, j, k, l) + b.get(i, j, k, l))
    }
}

/// Everything the bound checks need at one point, in normal gauge.
#[derive(Clone, Debug)]
pub struct HodgeCurvature {
    pub point: Vec<C64>,
    pub h: HermitianTensor,
    pub cubic: CubicForm,
    pub covariant: CovariantCubic,
    /// Weil-Petersson curvature `δδ + δδ − F F̄`.
    pub wp: CurvatureTensor,
    pub tensor: CurvatureTensor,
    pub split: ABSplit,
}

impl HodgeCurvature {
    pub fn n(&self) -> usize {
        self.h.n()
    }

    /// Ricci form `−h^{kl̄} R̃_{ij̄kl̄}` of the Hodge metric.
    pub fn ricci(&self) -> Result<CMat> {
        self.tensor.ricci(&self.h.mat)
    }

    /// Eigenvalues of `−Ric` relative to `h`, ascending.
    pub fn neg_ricci_eigenvalues(&self) -> Result<Vec<f64>> {
        let neg = -self.ricci()?;
        linalg::relative_eigenvalues(&neg, &self.h.mat)
    }

    /// Tightest `C_p` with `Ric ≥ −C_p h`.
    pub fn ricci_lower_constant(&self) -> Result<f64> {
        let ev = self.neg_ricci_eigenvalues()?;
        Ok(ev.last().copied().unwrap_or(0.0))
    }

    /// `R̃(a, ā, a, ā) / h(a, ā)²`
    pub fn holomorphic_ratio(&self, a: &[C64]) -> f64 {
        let ha = self.h.form(a, a).re;
        self.tensor.contract(a, a, a, a).re / (ha * ha)
    }
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Closed-form `R̃` at a normal-gauge point plus its A/B decomposition.
pub fn hodge_curvature_analytic(p: &PeriodJet) -> Result<HodgeCurvature> {
    let fk = covariant_cubic(p)?;
    let n = p.n();
    let point = p.base_point.clone();
    let f = yukawa(p)?;
    let g = wp_metric(p)?;
    let k = kahler_potential(p)?;
    let h = hodge_metric(&g, &f, &k)?;
    let hup = linalg::raise(&h.mat, "Hodge metric")?;

    // S_{ij} = Σ_rs F_irs F̄_jrs
    let s = CMat::from_fn(n, n, |i, j| {
        let mut acc = c(0.0, 0.0);
        for r in 0..n {
            for ss in 0..n {
                acc += f.get(i, r, ss) * f.get(j, r, ss).conj();
            }
        }
        acc
    });
    let wp = CurvatureTensor::from_fn(point.clone(), n, |i, j, kk, l| {
        let mut ff = c(0.0, 0.0);
        for m in 0..n {
            ff += f.get(i, kk, m) * f.get(j, l, m).conj();
        }
        c(delta(i, j) * delta(kk, l) + delta(i, l) * delta(kk, j), 0.0) - ff
    });
    let mut am = vec![c(0.0, 0.0); n * n * n];
    for i in 0..n {
        for kk in 0..n {
            for m in 0..n {
                let mut acc = c(0.0, 0.0);
                for r in 0..n {
                    for ss in 0..n {
                        acc += fk.get(i, r, ss, kk) * f.get(m, r, ss).conj();
                    }
                }
                am[(i * n + kk) * n + m] = acc;
            }
        }
    }
    let amf = |i: usize, kk: usize, m: usize| am[(i * n + kk) * n + m];

    let tensor = CurvatureTensor::from_fn(point.clone(), n, |i, j, kk, l| {
        let mut v = wp.get(i, j, kk, l) * 2.0 + s[(i, j)] * (2.0 * delta(kk, l));
        for q in 0..n {
            for ss in 0..n {
                let rq = wp.get(q, ss, kk, l);
                for r in 0..n {
                    v -= rq * f.get(i, r, ss) * f.get(j, r, q).conj() * 2.0;
                }
            }
        }
        for r in 0..n {
            for ss in 0..n {
                v += fk.get(i, r, ss, kk) * fk.get(j, r, ss, l).conj();
            }
        }
        for nn in 0..n {
            for m in 0..n {
                v -= amf(i, kk, m) * amf(j, l, nn).conj() * hup[(nn, m)];
            }
        }
        v
    });

    let a = CurvatureTensor::from_fn(point.clone(), n, |i, j, kk, l| {
        let mut v = c(2.0 * delta(i, j) * delta(kk, l) + 2.0 * delta(i, l) * delta(kk, j), 0.0);
        for ss in 0..n {
            v -= f.get(i, kk, ss) * f.get(j, l, ss).conj() * 4.0;
        }
        for m in 0..n {
            for nn in 0..n {
                for pp in 0..n {
                    for q in 0..n {
                        v += f.get(q, kk, m) * f.get(pp, l, m).conj() * f.get(i, nn, pp) * f.get(j, nn, q).conj() * 2.0;
                    }
                }
            }
        }
        v
    });
    // v_a(i,k) = Σ_m h^{a m̄} A_{ik m̄}
    let vvec = |i: usize, kk: usize| -> Vec<C64> {
        (0..n).map(|aa| (0..n).map(|m| hup[(aa, m)] * amf(i, kk, m)).sum()).collect()
    };
    let b = CurvatureTensor::from_fn(point.clone(), n, |i, j, kk, l| {
        let vik = vvec(i, kk);
        let vjl = vvec(j, l);
        let mut acc = c(0.0, 0.0);
        for r in 0..n {
            for ss in 0..n {
                let mut x = fk.get(i, r, ss, kk);
                let mut y = fk.get(j, r, ss, l);
                for nn in 0..n {
                    x -= vik[nn] * f.get(nn, r, ss);
                    y -= vjl[nn] * f.get(nn, r, ss);
                }
                acc += x * y.conj();
            }
        }
        for aa in 0..n {
            acc += vik[aa] * vjl[aa].conj() * 2.0;
        }
        acc
    });

    Ok(HodgeCurvature {
        point,
        h,
        cubic: f,
        covariant: fk,
        wp,
        tensor,
        split: ABSplit { a, b, am, n },
    })
}

/// Normal gauge at `z` followed by [`hodge_curvature_analytic`].
pub fn hodge_curvature_at(u: &Prepotential, z: &[C64]) -> Result<(NormalGauge, HodgeCurvature)> {
    let p = period_vector(u, z, 4)?;
    let ng = normal_gauge(&p)?;
    let hc = hodge_curvature_analytic(&ng.period)?;
    Ok((ng, hc))
}

/// Hodge metric at `z` in the coordinates of `u`.
pub fn hodge_metric_at(u: &Prepotential, z: &[C64]) -> Result<CMat> {
    let p = period_vector(u, z, 3)?;
    let g = wp_metric(&p)?;
    let f = yukawa(&p)?;
    let k = kahler_potential(&p)?;
    Ok(hodge_metric(&g, &f, &k)?.mat)
}

/// `R̃_{ij̄kl̄} = ∂ₖ∂̄ₗ h_{ij̄} − h^{nm̄} ∂ₖh_{im̄} ∂̄ₗh_{nj̄}` by central differences of a metric field.
pub fn curvature_from_metric_fd<F>(metric: &F, z: &[C64], stencil: &Stencil) -> Result<CurvatureTensor>
where
    F: Fn(&[C64]) -> Result<CMat>,
{
    let n = z.len();
    let center = metric(z)?;
    let up = linalg::raise(&center, "metric in finite differences")?;
    let dk: Vec<CMat> = (0..n).map(|k| fd::d_holo(metric, z, k, stencil)).collect::<Result<_>>()?;
    let dl: Vec<CMat> = (0..n).map(|l| fd::d_anti(metric, z, l, stencil)).collect::<Result<_>>()?;
    let mut mixed = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            mixed.push(fd::d_mixed(metric, z, k, l, &center, stencil)?);
        }
    }
    Ok(CurvatureTensor::from_fn(z.to_vec(), n, |i, j, k, l| {
        let mut v = mixed[k * n + l][(i, j)];
        for nn in 0..n {
            for m in 0..n {
                v -= up[(nn, m)] * dk[k][(i, m)] * dl[l][(nn, j)];
            }
        }
        v
    }))
}

/// Finite-difference `R̃` at `z` in the coordinates of `u`.
pub fn hodge_curvature_fd(u: &Prepotential, z: &[C64], stencil: &Stencil) -> Result<CurvatureTensor> {
    curvature_from_metric_fd(&|w: &[C64]| hodge_metric_at(u, w), z, stencil)
}

/// `R̃₁₁̄₁₁̄(0)` of `h = (1 − |w|²)⁻²`; the exact value is 2.
pub fn poincare_calibration(stencil: &Stencil) -> Result<f64> {
    let metric = |w: &[C64]| -> Result<CMat> {
        let d = 1.0 - w[0].norm_sqr();
        Ok(CMat::from_element(1, 1, c(1.0 / (d * d), 0.0)))
    };
    Ok(curvature_from_metric_fd(&metric, &[c(0.0, 0.0)], stencil)?.get(0, 0, 0, 0).re)
}

/// Largest `|∂h/∂w'ᵏ − Σ F_{irs,k} F̄_{mrs}|` at the base point, differentiating `h` in normal coordinates.
pub fn dh_identity_check(u: &Prepotential, z: &[C64], stencil: &Stencil) -> Result<f64> {
    let (ng, hc) = hodge_curvature_at(u, z)?;
    let n = z.len();
    let metric = |w: &[C64]| -> Result<CMat> {
        let jac = ng.jacobian(w);
        let hz = hodge_metric_at(u, &ng.coordinate_map(w))?;
        Ok(jac.transpose() * hz * jac.map(|x| x.conj()))
    };
    let origin = vec![c(0.0, 0.0); n];
    let mut r = 0.0f64;
    for k in 0..n {
        let d = fd::d_holo(&metric, &origin, k, stencil)?;
        for i in 0..n {
            for m in 0..n {
                r = r.max((d[(i, m)] - hc.split.am(i, k, m)).norm());
            }
        }
    }
    Ok(r)
}

/// Projected gradient descent of a function that is invariant under rescaling each block.
fn descend<V, G>(mut blocks: Vec<CVec>, value: V, grad: G, steps: usize) -> (Vec<CVec>, f64, usize)
where
    V: Fn(&[CVec]) -> f64,
    G: Fn(&[CVec]) -> Vec<CVec>,
{
    for b in blocks.iter_mut() {
        let nrm = b.norm();
        *b /= c(nrm, 0.0);
    }
    let mut cur = value(&blocks);
    let mut eta = 0.5;
    let mut evals = 1;
    for _ in 0..steps {
        let gr = grad(&blocks);
        let gnorm: f64 = gr.iter().map(|g| g.norm_squared()).sum::<f64>().sqrt();
        if gnorm < 1e-14 {
            break;
        }
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<CVec> = blocks
                .iter()
                .zip(&gr)
                .map(|(b, g)| {
                    let t = b - g * c(eta / gnorm, 0.0);
                    let nrm = t.norm();
                    t / c(nrm, 0.0)
                })
                .collect();
            let v = value(&trial);
            evals += 1;
            if v < cur {
                blocks = trial;
                cur = v;
                improved = true;
                eta = (eta * 1.5).min(1.0);
                break;
            }
            eta *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (blocks, cur, evals)
}

fn hol_value(hc: &HodgeCurvature, a: &CVec) -> f64 {
    hc.holomorphic_ratio(a.as_slice())
}

fn hol_grad(hc: &HodgeCurvature, a: &CVec) -> CVec {
    let n = hc.n();
    let t = &hc.tensor;
    let av = a.as_slice();
    let nn = t.contract(av, av, av, av).re;
    let d = hc.h.form(av, av).re;
    CVec::from_fn(n, |j, _| {
        let mut dn = c(0.0, 0.0);
        for p in 0..n {
            for r in 0..n {
                for s in 0..n {
                    dn += t.get(p, j, r, s) * av[p] * av[r] * av[s].conj();
                    dn += t.get(p, s, r, j) * av[p] * av[s].conj() * av[r];
                }
            }
        }
        let dd: C64 = (0..n).map(|p| hc.h.mat[(p, j)] * av[p]).sum();
        dn / (d * d) - dd * (2.0 * nn / (d * d * d))
    })
}

fn bis_value(hc: &HodgeCurvature, x: &CVec, y: &CVec) -> f64 {
    let (xs, ys) = (x.as_slice(), y.as_slice());
    let hx = hc.h.form(xs, xs).re;
    let hy = hc.h.form(ys, ys).re;
    hc.tensor.contract(xs, xs, ys, ys).re / (hx * hy)
}

fn bis_grad(hc: &HodgeCurvature, x: &CVec, y: &CVec) -> Vec<CVec> {
    let n = hc.n();
    let t = &hc.tensor;
    let (xs, ys) = (x.as_slice(), y.as_slice());
    let hx = hc.h.form(xs, xs).re;
    let hy = hc.h.form(ys, ys).re;
    let nv = t.contract(xs, xs, ys, ys).re;
    let gx = CVec::from_fn(n, |j, _| {
        let mut dn = c(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                for l in 0..n {
                    dn += t.get(i, j, k, l) * xs[i] * ys[k] * ys[l].conj();
                }
            }
        }
        let dh: C64 = (0..n).map(|p| hc.h.mat[(p, j)] * xs[p]).sum();
        dn / (hx * hy) - dh * (nv / (hx * hx * hy))
    });
    let gy = CVec::from_fn(n, |l, _| {
        let mut dn = c(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    dn += t.get(i, j, k, l) * xs[i] * xs[j].conj() * ys[k];
                }
            }
        }
        let dh: C64 = (0..n).map(|p| hc.h.mat[(p, l)] * ys[p]).sum();
        dn / (hx * hy) - dh * (nv / (hx * hy * hy))
    });
    vec![gx, gy]
}

fn unit(n: usize, i: usize) -> CVec {
    CVec::from_fn(n, |k, _| c(delta(k, i), 0.0))
}

/// Outcome of the holomorphic-sectional, bisectional and Ricci checks at one point.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub point: Vec<C64>,
    pub n: usize,
    pub c_n: f64,
    /// Smallest `R̃(a,ā,a,ā)/h(a,ā)²` found.
    pub min_holomorphic_ratio: f64,
    /// `min_holomorphic_ratio · c(n) − 1`.
    pub hol_sectional_margin: f64,
    pub extremal_direction: Vec<C64>,
    /// Smallest `R̃(ξ,ξ̄,η,η̄)/(h(ξ,ξ̄)h(η,η̄))` found.
    pub bisectional_min: f64,
    /// `λ_min(−Ric, h) · c(n) − 1`.
    pub ricci_margin: f64,
    /// Smallest `(−Ric(ξ,ξ̄) − R̃(ξ,ξ̄,ξ,ξ̄)/h(ξ,ξ̄)) / h(ξ,ξ̄)` over tested directions.
    pub ricci_trace_min: f64,
    pub sectional_bound_cp: f64,
    pub directions_tested: usize,
    pub pairs_tested: usize,
    pub holomorphic_pass: bool,
    pub bisectional_pass: bool,
    pub ricci_pass: bool,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.holomorphic_pass && self.bisectional_pass && self.ricci_pass
    }
}

/// Relative slack allowed in the curvature inequalities.
pub const BOUND_TOL: f64 = 1e-9;

/// Searches for the worst direction for each curvature inequality.
pub fn verify_bounds<R: Rng>(hc: &HodgeCurvature, n_directions: usize, rng: &mut R) -> Result<BoundReport> {
    let n = hc.n();
    let cn = crate::c_n(n);
    let ric = hc.ricci()?;
    let scale = hc.tensor.max_abs().max(1.0);

    let mut starts: Vec<CVec> = (0..n).map(|i| unit(n, i)).collect();
    starts.extend((0..n_directions).map(|_| fixtures::random_unit_vector(n, rng)));
    let mut directions_tested = starts.len();
    let mut ricci_trace_min = f64::INFINITY;
    let trace_gap = |a: &CVec| {
        let av = a.as_slice();
        let ha = hc.h.form(av, av).re;
        let neg_ric: C64 = -(0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| ric[(i, j)] * av[i] * av[j].conj())
            .sum::<C64>();
        (neg_ric.re - hc.tensor.contract(av, av, av, av).re / ha) / ha
    };
    let mut scored: Vec<(f64, CVec)> = starts
        .into_iter()
        .map(|a| {
            ricci_trace_min = ricci_trace_min.min(trace_gap(&a));
            (hol_value(hc, &a), a)
        })
        .collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut best = scored[0].clone();
    for (_, a) in scored.iter().take(4) {
        let (blocks, v, evals) = descend(vec![a.clone()], |b| hol_value(hc, &b[0]), |b| vec![hol_grad(hc, &b[0])], 100);
        directions_tested += evals;
        ricci_trace_min = ricci_trace_min.min(trace_gap(&blocks[0]));
        if v < best.0 {
            best = (v, blocks[0].clone());
        }
    }

    let mut pairs: Vec<(f64, CVec, CVec)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (unit(n, i), unit(n, j));
            pairs.push((bis_value(hc, &x, &y), x, y));
        }
    }
    for _ in 0..n_directions {
        let x = fixtures::random_unit_vector(n, rng);
        let y = fixtures::random_unit_vector(n, rng);
        pairs.push((bis_value(hc, &x, &y), x, y));
    }
    let mut pairs_tested = pairs.len();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut bis_min = pairs[0].0;
    for (_, x, y) in pairs.iter().take(4) {
        let (_, v, evals) = descend(
            vec![x.clone(), y.clone()],
            |b| bis_value(hc, &b[0], &b[1]),
            |b| bis_grad(hc, &b[0], &b[1]),
            100,
        );
        pairs_tested += evals;
        bis_min = bis_min.min(v);
    }

    let neg_ric_ev = hc.neg_ricci_eigenvalues()?;
    let ricci_margin = neg_ric_ev[0] * cn - 1.0;
    let cp = neg_ric_ev[n - 1];
    Ok(BoundReport {
        point: hc.point.clone(),
        n,
        c_n: cn,
        min_holomorphic_ratio: best.0,
        hol_sectional_margin: best.0 * cn - 1.0,
        extremal_direction: best.1.iter().copied().collect(),
        bisectional_min: bis_min,
        ricci_margin,
        ricci_trace_min,
        sectional_bound_cp: cp,
        directions_tested,
        pairs_tested,
        holomorphic_pass: best.0 * cn >= 1.0 - BOUND_TOL,
        bisectional_pass: bis_min >= -BOUND_TOL * scale,
        ricci_pass: ricci_margin >= -BOUND_TOL && ricci_trace_min >= -BOUND_TOL * scale,
    })
}

/// Outcome of the Riemannian sectional-curvature sweep.
#[derive(Clone, Debug)]
pub struct SectionalReport {
    pub point: Vec<C64>,
    pub c_p: f64,
    pub pairs: usize,
    /// Largest `|R̃(X,Y,X,Y)| / ((3 + C_p)‖X‖²‖Y‖²)`.
    pub max_sectional_ratio: f64,
    /// Largest `|R̃(ξ,η̄,ξ,η̄)| / ((6 + C_p)‖ξ‖²‖η‖²)`.
    pub max_lemma_ratio: f64,
    pub violations: usize,
    pub lemma_violations: usize,
}

impl SectionalReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.lemma_violations == 0
    }
}

/// `R̃(X,Y,X,Y)` for real tangent vectors with holomorphic parts `ξ = X − iJX`, `η = Y − iJY`.
pub fn riemannian_sectional(t: &CurvatureTensor, xi: &[C64], eta: &[C64]) -> f64 {
    (t.contract(xi, eta, xi, eta).re - t.contract(xi, xi, eta, eta).re) / 8.0
}

/// Checks `|R̃(X,Y,X,Y)| ≤ (3 + C_p)‖X‖²‖Y‖²` on random orthogonal pairs.
pub fn sectional_bound_check<R: Rng>(hc: &HodgeCurvature, n_pairs: usize, rng: &mut R) -> Result<SectionalReport> {
    let n = hc.n();
    let cp = hc.ricci_lower_constant()?;
    let mut report = SectionalReport {
        point: hc.point.clone(),
        c_p: cp,
        pairs: 0,
        max_sectional_ratio: 0.0,
        max_lemma_ratio: 0.0,
        violations: 0,
        lemma_violations: 0,
    };
    for t in 0..n_pairs {
        let xi = fixtures::random_unit_vector(n, rng);
        let eta = if t % 8 == 0 {
            // the J-invariant plane spanned by X and JX
            &xi * c(0.0, 1.0)
        } else {
            let y = fixtures::random_unit_vector(n, rng);
            let proj = hc.h.form(y.as_slice(), xi.as_slice()).re / hc.h.form(xi.as_slice(), xi.as_slice()).re;
            y - &xi * c(proj, 0.0)
        };
        let (xs, es) = (xi.as_slice(), eta.as_slice());
        let hx = hc.h.form(xs, xs).re;
        let he = hc.h.form(es, es).re;
        if he < 1e-12 * hx {
            continue;
        }
        report.pairs += 1;
        // ‖X‖² = ½ h(ξ, ξ̄)
        let sect = riemannian_sectional(&hc.tensor, xs, es).abs() / ((3.0 + cp) * 0.25 * hx * he);
        let lemma = hc.tensor.contract(xs, es, xs, es).norm() / ((6.0 + cp) * hx * he);
        report.max_sectional_ratio = report.max_sectional_ratio.max(sect);
        report.max_lemma_ratio = report.max_lemma_ratio.max(lemma);
        if sect > 1.0 + BOUND_TOL {
            report.violations += 1;
        }
        if lemma > 1.0 + BOUND_TOL {
            report.lemma_violations += 1;
        }
    }
    Ok(report)
}

/// One-parameter family `u_t = −i + (i/2)z² + t z³/6 + q(t) z⁴/24` with `q(t)`
/// chosen so that the covariant derivative of the cubic form vanishes at the origin.
pub fn optimality_family(t: f64) -> Result<Prepotential> {
    let base = |q: C64| {
        Prepotential::normalized_quadratic(1)
            .with_derivative_term(&[0, 0, 0], c(t, 0.0))
            .with_derivative_term(&[0, 0, 0, 0], q)
    };
    // F_{111,1} is affine in q
    let fk = |q: C64| -> Result<C64> {
        let p = period_vector(&base(q), &[c(0.0, 0.0)], 4)?;
        let ng = normal_gauge(&p)?;
        Ok(covariant_cubic(&ng.period)?.get(0, 0, 0, 0))
    };
    let f0 = fk(c(0.0, 0.0))?;
    let f1 = fk(c(1.0, 0.0))?;
    let q = -f0 / (f1 - f0);
    Ok(base(q))
}

/// Cubic coefficient at which the family reaches the extremal configuration `|F|² = 4/3`.
pub fn optimality_extremal_t() -> f64 {
    (8.0f64 / 3.0).sqrt()
}

/// `min_a R̃(a,ā,a,ā)/h(a,ā)²` along the family at each `t`.
pub fn optimality_probe(ts: &[f64]) -> Result<Vec<f64>> {
    ts.iter()
        .map(|&t| {
            let u = optimality_family(t)?;
            let (_, hc) = hodge_curvature_at(&u, &[c(0.0, 0.0)])?;
            Ok(hc.holomorphic_ratio(&[c(1.0, 0.0)]))
        })
        .collect()
}
