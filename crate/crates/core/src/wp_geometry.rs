//! Weil-Petersson geometry of a horizontal slice.
//!
//! The Kähler potential is `K = −log(s · i Q(Ω, Ω̄))` with the sign `s = ±1`
//! picked per base point so that the pairing is positive. Mixed `(w, w̄)`
//! expansions of `K` live in a jet over `2n` variables: the first `n` are
//! `w`, the last `n` are `w̄`. Conjugation only happens when assembling that
//! jet from the holomorphic jets of `Ω`.
//!
//! Tensors are stored as coefficient arrays: `g[(i, j)] = g_{i j̄}`,
//! `R[(i, j, k, l)] = R_{i j̄ k l̄}`. Contravariant indices follow
//! [`crate::linalg::raise`].

use crate::error::{Error, Result};
use crate::jets::{Jet, MultiIndex, C64};
use crate::linalg::{self, c, CMat};
use crate::prepotential::PeriodJet;

#[derive(Clone, Debug)]
pub struct HermitianTensor {
    pub point: Vec<C64>,
    pub mat: CMat,
}

impl HermitianTensor {
    pub fn n(&self) -> usize {
        self.mat.nrows()
    }

    pub fn hermitian_residual(&self) -> f64 {
        linalg::hermitian_residual(&self.mat)
    }

    pub fn is_positive_definite(&self) -> bool {
        linalg::is_positive_definite(&self.mat)
    }

    /// `Σ m_{i j̄} aⁱ b̄ʲ`
    pub fn form(&self, a: &[C64], b: &[C64]) -> C64 {
        let n = self.n();
        let mut s = c(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += self.mat[(i, j)] * a[i] * b[j].conj();
            }
        }
        s
    }

    /// Pulls back along `∂z/∂w' = jac`: `m' = jacᵗ m jac̄`.
    pub fn transform(&self, jac: &CMat) -> HermitianTensor {
        HermitianTensor {
            point: self.point.clone(),
            mat: jac.transpose() * &self.mat * jac.map(|x| x.conj()),
        }
    }
}

/// Totally symmetric `F_{ijk}`.
#[derive(Clone, Debug)]
pub struct CubicForm {
    pub point: Vec<C64>,
    n: usize,
    data: Vec<C64>,
}

impl CubicForm {
    pub fn zeros(point: Vec<C64>, n: usize) -> Self {
        CubicForm { point, n, data: vec![c(0.0, 0.0); n * n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: C64) {
        self.data[(i * self.n + j) * self.n + k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut r = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    r = r.max((v - self.get(j, i, k)).norm()).max((v - self.get(i, k, j)).norm());
                }
            }
        }
        r
    }

    /// `F'_{ijk} = scale · F_{abc} J^a_i J^b_j J^c_k`
    pub fn transform(&self, jac: &CMat, scale: C64) -> CubicForm {
        let n = self.n;
        let mut out = CubicForm::zeros(self.point.clone(), n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = c(0.0, 0.0);
                    for a in 0..n {
                        for b in 0..n {
                            for cc in 0..n {
                                s += self.get(a, b, cc) * jac[(a, i)] * jac[(b, j)] * jac[(cc, k)];
                            }
                        }
                    }
                    out.set(i, j, k, s * scale);
                }
            }
        }
        out
    }
}

/// Four-index tensor `R_{i j̄ k l̄}`.
#[derive(Clone, Debug)]
pub struct CurvatureTensor {
    pub point: Vec<C64>,
    n: usize,
    data: Vec<C64>,
}

impl CurvatureTensor {
    pub fn zeros(point: Vec<C64>, n: usize) -> Self {
        CurvatureTensor { point, n, data: vec![c(0.0, 0.0); n * n * n * n] }
    }

    pub fn from_fn<F: FnMut(usize, usize, usize, usize) -> C64>(point: Vec<C64>, n: usize, mut f: F) -> Self {
        let mut t = CurvatureTensor::zeros(point, n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        t.set(i, j, k, l, f(i, j, k, l));
                    }
                }
            }
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.data[self.idx(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: C64) {
        let id = self.idx(i, j, k, l);
        self.data[id] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CurvatureTensor) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `Σ R_{i j̄ k l̄} aⁱ b̄ʲ cᵏ d̄ˡ`; barred slots are conjugated here.
    pub fn contract(&self, a: &[C64], b: &[C64], cv: &[C64], d: &[C64]) -> C64 {
        let n = self.n;
        let mut s = c(0.0, 0.0);
        for i in 0..n {
            if a[i] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let aij = a[i] * b[j].conj();
                for k in 0..n {
                    let aijk = aij * cv[k];
                    for l in 0..n {
                        s += self.get(i, j, k, l) * aijk * d[l].conj();
                    }
                }
            }
        }
        s
    }

    /// Largest violation of `R_{ij̄kl̄} = R_{kj̄il̄} = R_{il̄kj̄}` and `R_{ij̄kl̄} = conj(R_{jīlk̄})`.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut r = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        r = r
                            .max((v - self.get(k, j, i, l)).norm())
                            .max((v - self.get(i, l, k, j)).norm())
                            .max((v - self.get(j, i, l, k).conj()).norm());
                    }
                }
            }
        }
        r
    }

    /// Components in coordinates with `∂z/∂w' = jac`.
    pub fn transform(&self, jac: &CMat) -> CurvatureTensor {
        let n = self.n;
        let jbar = jac.map(|x| x.conj());
        // contract one slot at a time
        let mut cur = self.data.clone();
        for slot in 0..4 {
            let m = if slot % 2 == 0 { jac } else { &jbar };
            let mut next = vec![c(0.0, 0.0); cur.len()];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let mut idx = [i, j, k, l];
                            let target = idx[slot];
                            let mut s = c(0.0, 0.0);
                            for a in 0..n {
                                idx[slot] = a;
                                s += cur[((idx[0] * n + idx[1]) * n + idx[2]) * n + idx[3]] * m[(a, target)];
                            }
                            next[((i * n + j) * n + k) * n + l] = s;
                        }
                    }
                }
            }
            cur = next;
        }
        CurvatureTensor { point: self.point.clone(), n, data: cur }
    }

    /// `−h^{k l̄} R_{i j̄ k l̄}`: the Ricci form of the metric whose curvature this is.
    pub fn ricci(&self, metric: &CMat) -> Result<CMat> {
        let up = linalg::raise(metric, "Ricci trace")?;
        let n = self.n;
        Ok(CMat::from_fn(n, n, |i, j| {
            let mut s = c(0.0, 0.0);
            for k in 0..n {
                for l in 0..n {
                    s += up[(k, l)] * self.get(i, j, k, l);
                }
            }
            -s
        }))
    }
}

/// `K` as a mixed jet in `(w, w̄)` plus the sign that made the pairing positive.
#[derive(Clone, Debug)]
pub struct KahlerPotential {
    pub sign: f64,
    pub jet: Jet,
    n: usize,
}

impl KahlerPotential {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.jet.constant_term().re
    }

    /// `e^{2K}` at the base point.
    pub fn e2k(&self) -> f64 {
        (2.0 * self.value()).exp()
    }

    /// `∂^{hol} ∂̄^{anti} K` at the base point.
    pub fn mixed(&self, hol: &[usize], anti: &[usize]) -> Result<C64> {
        let mut e = vec![0u32; 2 * self.n];
        for &i in hol {
            e[i] += 1;
        }
        for &j in anti {
            e[self.n + j] += 1;
        }
        Ok(self.jet.eval_deriv(&MultiIndex::new(e))?)
    }

    pub fn grad(&self) -> Result<Vec<C64>> {
        (0..self.n).map(|i| self.mixed(&[i], &[])).collect()
    }

    /// `∂ᵢ∂̄ⱼ K`
    pub fn hessian(&self) -> Result<CMat> {
        let n = self.n;
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.mixed(&[i], &[j])?;
            }
        }
        Ok(m)
    }
}

/// Antiholomorphic companion of a holomorphic jet, placed on the `w̄` variables.
fn conjugate_embedding(j: &Jet, n: usize) -> Result<Jet> {
    Ok(j.map_coeffs(|x| x.conj()).embed(2 * n, n)?)
}

/// Mixed expansion of `K = −log(s · i Q(Ω, Ω̄))` through the period jet's order.
pub fn kahler_potential(p: &PeriodJet) -> Result<KahlerPotential> {
    let n = p.n();
    let hol: Vec<Jet> = p.omega.iter().map(|j| j.embed(2 * n, 0)).collect::<std::result::Result<_, _>>()?;
    let anti: Vec<Jet> = p.omega.iter().map(|j| conjugate_embedding(j, n)).collect::<Result<_>>()?;
    let pairing = p.q.pair_jets(&hol, &anti).scale(c(0.0, 1.0));
    let p0 = pairing.constant_term();
    let scale = p.value().norm_squared().max(1e-300);
    if p0.re.abs() <= 1e-14 * scale {
        return Err(Error::NotPolarized);
    }
    let sign = p0.re.signum();
    let positive = pairing.scale(c(sign, 0.0));
    let jet = -&positive.log()?;
    Ok(KahlerPotential { sign, jet, n })
}

fn pairing_formula(p: &PeriodJet) -> Result<CMat> {
    let n = p.n();
    let omega = p.value();
    let omega_bar = omega.map(|x| x.conj());
    let pw = p.q.pair(&omega, &omega_bar);
    if pw.norm() <= 1e-14 * omega.norm_squared() {
        return Err(Error::NotPolarized);
    }
    let tangents: Vec<_> = (0..n).map(|i| p.deriv(&[i])).collect::<Result<_>>()?;
    // Kᵢ = −Q(∂ᵢΩ, Ω̄) / Q(Ω, Ω̄)
    let covariant: Vec<_> = tangents
        .iter()
        .map(|t| {
            let ki = -p.q.pair(t, &omega_bar) / pw;
            t + &omega * ki
        })
        .collect();
    Ok(CMat::from_fn(n, n, |i, j| {
        -p.q.pair(&covariant[i], &covariant[j].map(|x| x.conj())) / pw
    }))
}

/// `g_{i j̄} = −Q(DᵢΩ, conj(DⱼΩ)) / Q(Ω, Ω̄)` with `DᵢΩ = ∂ᵢΩ + KᵢΩ`.
pub fn wp_metric(p: &PeriodJet) -> Result<HermitianTensor> {
    let mat = pairing_formula(p)?;
    let g = HermitianTensor { point: p.base_point.clone(), mat };
    if !g.is_positive_definite() {
        return Err(Error::NotNormal);
    }
    Ok(g)
}

/// The same metric through `∂ᵢ∂̄ⱼ K`, for cross-checking.
pub fn wp_metric_from_potential(k: &KahlerPotential, point: &[C64]) -> Result<HermitianTensor> {
    Ok(HermitianTensor { point: point.to_vec(), mat: k.hessian()? })
}

/// `F_{ijk} = Q(Ω, ∂ᵢ∂ⱼ∂ₖΩ)`
pub fn yukawa(p: &PeriodJet) -> Result<CubicForm> {
    p.require_order(3)?;
    let n = p.n();
    let omega = p.value();
    let mut f = CubicForm::zeros(p.base_point.clone(), n);
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let v = p.q.pair(&omega, &p.deriv(&[i, j, k])?);
                for (a, b, cc) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                    f.set(a, b, cc, v);
                }
            }
        }
    }
    Ok(f)
}

/// `e^{2K} F_{ipq} F̄_{jmn} g^{p m̄} g^{q n̄}`
fn yukawa_square(g_up: &CMat, f: &CubicForm, e2k: f64) -> CMat {
    let n = f.n();
    CMat::from_fn(n, n, |i, j| {
        let mut s = c(0.0, 0.0);
        for p in 0..n {
            for q in 0..n {
                let fipq = f.get(i, p, q);
                if fipq == c(0.0, 0.0) {
                    continue;
                }
                for m in 0..n {
                    for nn in 0..n {
                        s += fipq * f.get(j, m, nn).conj() * g_up[(p, m)] * g_up[(q, nn)];
                    }
                }
            }
        }
        s * e2k
    })
}

fn require_metric(g: &HermitianTensor) -> Result<CMat> {
    linalg::raise(&g.mat, "Weil-Petersson metric")
}

/// `R_{i j̄} = −(n+1) g_{i j̄} + e^{2K} F_{ipq} F̄_{jmn} g^{p m̄} g^{q n̄}`
pub fn wp_ricci(g: &HermitianTensor, f: &CubicForm, k: &KahlerPotential) -> Result<HermitianTensor> {
    let up = require_metric(g)?;
    let n = g.n() as f64;
    let mat = yukawa_square(&up, f, k.e2k()) - &g.mat * c(n + 1.0, 0.0);
    Ok(HermitianTensor { point: g.point.clone(), mat })
}

/// `R_{i j̄ k l̄} = g_{i j̄} g_{k l̄} + g_{i l̄} g_{k j̄} − e^{2K} F_{ikp} F̄_{jlq} g^{p q̄}`
pub fn wp_curvature(g: &HermitianTensor, f: &CubicForm, k: &KahlerPotential) -> Result<CurvatureTensor> {
    let up = require_metric(g)?;
    let n = g.n();
    let e2k = k.e2k();
    Ok(CurvatureTensor::from_fn(g.point.clone(), n, |i, j, kk, l| {
        let mut ff = c(0.0, 0.0);
        for p in 0..n {
            for q in 0..n {
                ff += f.get(i, kk, p) * f.get(j, l, q).conj() * up[(p, q)];
            }
        }
        g.mat[(i, j)] * g.mat[(kk, l)] + g.mat[(i, l)] * g.mat[(kk, j)] - ff * e2k
    }))
}

/// `h_{i j̄} = 2 g_{i j̄} + e^{2K} F_{ipq} F̄_{jmn} g^{p m̄} g^{q n̄}`
pub fn hodge_metric(g: &HermitianTensor, f: &CubicForm, k: &KahlerPotential) -> Result<HermitianTensor> {
    let up = require_metric(g)?;
    let mat = &g.mat * c(2.0, 0.0) + yukawa_square(&up, f, k.e2k());
    let h = HermitianTensor { point: g.point.clone(), mat };
    if !h.is_positive_definite() {
        return Err(Error::NotNormal);
    }
    Ok(h)
}

/// Period data in coordinates where `g = I`, `dg = 0`, `K = 0`, `∂K = 0` at the base point.
///
/// The coordinate change is `z = z_base + A (w' − ½ Γ(w', w'))` and the
/// section is rescaled to `e^{f} Ω` with `f` affine in `w'`.
#[derive(Clone, Debug)]
pub struct NormalGauge {
    pub period: PeriodJet,
    pub linear: CMat,
    /// `Γ^a_{ik}` stored at `[(a * n + i) * n + k]`.
    pub christoffel: Vec<C64>,
    pub rescale_constant: C64,
    pub rescale_gradient: Vec<C64>,
}

impl NormalGauge {
    pub fn n(&self) -> usize {
        self.period.n()
    }

    fn gamma(&self, a: usize, i: usize, k: usize) -> C64 {
        let n = self.n();
        self.christoffel[(a * n + i) * n + k]
    }

    /// Original coordinates of the point with normal coordinates `w'`.
    pub fn coordinate_map(&self, w: &[C64]) -> Vec<C64> {
        let n = self.n();
        let inner: Vec<C64> = (0..n)
            .map(|a| {
                let mut s = w[a];
                for i in 0..n {
                    for k in 0..n {
                        s -= self.gamma(a, i, k) * w[i] * w[k] * 0.5;
                    }
                }
                s
            })
            .collect();
        (0..n)
            .map(|r| self.period.base_point[r] + (0..n).map(|a| self.linear[(r, a)] * inner[a]).sum::<C64>())
            .collect()
    }

    /// `∂z/∂w'` at `w'`.
    pub fn jacobian(&self, w: &[C64]) -> CMat {
        let n = self.n();
        let inner = CMat::from_fn(n, n, |a, i| {
            let mut s = if a == i { c(1.0, 0.0) } else { c(0.0, 0.0) };
            for k in 0..n {
                s -= self.gamma(a, i, k) * w[k];
            }
            s
        });
        &self.linear * inner
    }
}

fn compose_period(p: &PeriodJet, subs: &[Jet]) -> Result<PeriodJet> {
    let omega = p.omega.iter().map(|j| j.compose(subs)).collect::<std::result::Result<Vec<_>, _>>()?;
    PeriodJet::new(p.base_point.clone(), omega)
}

/// Transforms period data into Weil-Petersson normal gauge at its base point.
pub fn normal_gauge(p: &PeriodJet) -> Result<NormalGauge> {
    let n = p.n();
    let d = p.order();
    p.require_order(3)?;
    let g = wp_metric(p)?;
    let l = g.mat.clone().cholesky().ok_or(Error::NotNormal)?.unpack();
    let linear = l.try_inverse().ok_or(Error::Singular("Cholesky factor"))?.transpose();

    let vars: Vec<Jet> = (0..n).map(|i| Jet::variable(n, d, i)).collect::<std::result::Result<_, _>>()?;
    let linear_subs: Vec<Jet> = (0..n)
        .map(|a| {
            let mut s = Jet::zero(n, d)?;
            for i in 0..n {
                s = &s + &vars[i].scale(linear[(a, i)]);
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let p1 = compose_period(p, &linear_subs)?;

    let k1 = kahler_potential(&p1)?;
    let mut christoffel = vec![c(0.0, 0.0); n * n * n];
    for a in 0..n {
        for i in 0..n {
            for k in 0..n {
                christoffel[(a * n + i) * n + k] = k1.mixed(&[i, k], &[a])?;
            }
        }
    }
    let quad_subs: Vec<Jet> = (0..n)
        .map(|a| {
            let mut s = vars[a].clone();
            for i in 0..n {
                for k in 0..n {
                    let gam = christoffel[(a * n + i) * n + k];
                    if gam != c(0.0, 0.0) {
                        s = &s - &(&vars[i] * &vars[k]).scale(gam * 0.5);
                    }
                }
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let p2 = compose_period(&p1, &quad_subs)?;

    let k2 = kahler_potential(&p2)?;
    let rescale_constant = c(0.5 * k2.value(), 0.0);
    let rescale_gradient = k2.grad()?;
    let mut f = Jet::constant(n, d, rescale_constant)?;
    for i in 0..n {
        f = &f + &vars[i].scale(rescale_gradient[i]);
    }
    let ef = f.exp();
    let omega = p2.omega.iter().map(|j| j * &ef).collect();
    let period = PeriodJet::new(p.base_point.clone(), omega)?;
    Ok(NormalGauge { period, linear, christoffel, rescale_constant, rescale_gradient })
}
