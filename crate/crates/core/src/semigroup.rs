//! Mollifier semigroups `G_t u = t^(-d/2) G(./sqrt(t)) * u` and the decay
//! experiments that make the caloric smallness statements checkable.
//!
//! Two kernels are built in: the heat Gaussian `(4 pi)^(-d/2) exp(-|x|^2/4)`
//! (evolved exactly by the multiplier `exp(-t |xi|^2)`), and the low-pass
//! kernel whose Fourier transform is the radial cutoff [`crate::frequency::chi`]
//! (so `G_t` is the dilated low-pass `D_{< J}` with `2^{-J} = sqrt(t)`),
//! which is the kernel behind the spatial-to-frequency comparison.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::frequency::{chi, DyadicDecomposition};
use crate::grid::{Exponent, Grid};
use crate::registry::KernelEntry;
use crate::sparseness::{self, superlevel_mask, SparsenessCertificate, SparsenessParams};
use num_complex::Complex64;
use once_cell::sync::Lazy;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

/// Which mollifier family `G_t` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Heat,
    LowPass,
}

impl KernelKind {
    pub fn key(&self) -> &'static str {
        match self {
            KernelKind::Heat => "heat",
            KernelKind::LowPass => "lowpass",
        }
    }
}

/// A kernel with its norms and a tabulated radial tail
/// `r -> ||G||_{L^1(B_r^c)}`. Values refer to the unit-scale kernel.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub d: usize,
    /// `int |G|`.
    pub l1_norm: f64,
    /// `sup |G|`.
    pub sup_norm: f64,
    tail_radii: Vec<f64>,
    tail_values: Vec<f64>,
}

static KERNEL_CACHE: Lazy<Mutex<BTreeMap<(&'static str, usize), Arc<KernelSpec>>>> =
    Lazy::new(|| Mutex::new(BTreeMap::new()));

impl KernelSpec {
    pub fn get(kind: KernelKind, d: usize) -> Result<Arc<KernelSpec>> {
        if !(1..=3).contains(&d) {
            return Err(Error::Grid(format!("kernel dimension {d} out of range")));
        }
        let key = (kind.key(), d);
        if let Some(k) = KERNEL_CACHE.lock().unwrap().get(&key) {
            return Ok(k.clone());
        }
        let spec = Arc::new(match kind {
            KernelKind::Heat => KernelSpec::build_heat(d),
            KernelKind::LowPass => KernelSpec::build_low_pass(d)?,
        });
        KERNEL_CACHE.lock().unwrap().insert(key, spec.clone());
        Ok(spec)
    }

    fn build_heat(d: usize) -> KernelSpec {
        let sup = (4.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0);
        let radii: Vec<f64> = (0..=600).map(|i| i as f64 * 0.05).collect();
        let tails: Vec<f64> = radii.iter().map(|&r| heat_tail(d, r)).collect();
        KernelSpec {
            kind: KernelKind::Heat,
            d,
            l1_norm: 1.0,
            sup_norm: sup,
            tail_radii: radii,
            tail_values: tails,
        }
    }

    fn build_low_pass(d: usize) -> Result<KernelSpec> {
        // Reference boxes large enough that the Schwartz tail has decayed
        // to rounding noise well inside L/2.
        let (n, l) = match d {
            1 => (4096, 128.0),
            2 => (512, 64.0),
            _ => (128, 32.0),
        };
        let grid = Grid::new(d, n, l)?;
        let kernel = sample_kernel_from_symbol(&grid, |xi| chi(xi));
        let hd = grid.cell_volume();
        let mut l1 = 0.0;
        let mut sup = 0.0f64;
        // Histogram |K| by periodic radius, then suffix sums give the tail.
        let bin = grid.spacing();
        let half = l / 2.0;
        let nbins = (half / bin).ceil() as usize + 1;
        let mut mass_by_radius = vec![0.0f64; nbins];
        let npts = grid.points();
        let half_n = (n / 2) as i64;
        for idx in 0..npts {
            let v = kernel.component(0)[idx].abs() * hd;
            l1 += v;
            sup = sup.max(kernel.component(0)[idx].abs());
            let ix = grid.unravel(idx);
            let mut off = [0i64; 3];
            for axis in 0..d {
                off[axis] = ix[axis] as i64 - half_n;
            }
            let r = grid.periodic_distance(&off[..d]);
            let b = ((r / bin) as usize).min(nbins - 1);
            mass_by_radius[b] += v;
        }
        let mut radii = Vec::with_capacity(nbins);
        let mut tails = Vec::with_capacity(nbins);
        let mut acc = l1;
        for (b, &m) in mass_by_radius.iter().enumerate() {
            radii.push(b as f64 * bin);
            tails.push(acc.max(0.0));
            acc -= m;
        }
        Ok(KernelSpec {
            kind: KernelKind::LowPass,
            d,
            l1_norm: l1,
            sup_norm: sup,
            tail_radii: radii,
            tail_values: tails,
        })
    }

    /// Tail mass outside radius `r` (conservative: rounds `r` down to the
    /// tabulated grid).
    pub fn tail(&self, r: f64) -> f64 {
        if r <= self.tail_radii[0] {
            return self.tail_values[0];
        }
        let k = self.tail_radii.partition_point(|&x| x <= r);
        self.tail_values[k - 1]
    }

    /// Smallest tabulated radius whose tail is at most `bound`. This is the
    /// kernel's `f(gamma)` when called with `bound = gamma / 3`.
    pub fn min_radius_for_tail(&self, bound: f64) -> Result<f64> {
        for (r, t) in self.tail_radii.iter().zip(&self.tail_values) {
            if *t <= bound {
                return Ok(*r);
            }
        }
        Err(Error::Calibration(format!(
            "kernel tail never reaches {bound} within the tabulated range"
        )))
    }
}

/// Closed-form heat Gaussian tail `int_{|x|>r} (4 pi)^{-d/2} e^{-|x|^2/4}`.
pub fn heat_tail(d: usize, r: f64) -> f64 {
    match d {
        1 => libm::erfc(r / 2.0),
        2 => (-r * r / 4.0).exp(),
        3 => libm::erfc(r / 2.0) + r / std::f64::consts::PI.sqrt() * (-r * r / 4.0).exp(),
        _ => unreachable!("dimension checked at construction"),
    }
}

/// Sample a kernel from its Fourier symbol on a grid: coefficients
/// `symbol(|xi_k|) / L^d` inverse-transform to the periodized kernel.
pub fn sample_kernel_from_symbol(grid: &Grid, symbol: impl Fn(f64) -> f64) -> Field {
    let mut s = crate::field::SpectralField::zeros(*grid, 1);
    let ld = grid.length().powi(grid.dim() as i32);
    let two_pi_over_l = 2.0 * std::f64::consts::PI / grid.length();
    let pts = grid.points();
    for idx in 0..pts {
        let ix = grid.unravel(idx);
        let mut norm2 = 0.0;
        for axis in 0..grid.dim() {
            let k = grid.wavenumber(ix[axis]) as f64;
            norm2 += k * k;
        }
        let xi = two_pi_over_l * norm2.sqrt();
        s.component_mut(0)[idx] = Complex64::new(symbol(xi) / ld, 0.0);
    }
    s.inverse().expect("symbol sampling is finite")
}

/// Sample the physical kernel of `G_t` on `grid`, renormalized to unit
/// discrete mass. Fails when the box truncates the kernel materially.
pub fn sampled_kernel(grid: &Grid, t: f64, kind: KernelKind) -> Result<Field> {
    check_time(grid, t)?;
    match kind {
        KernelKind::Heat => {
            let d = grid.dim();
            let norm = (4.0 * std::f64::consts::PI * t).powf(-(d as f64) / 2.0);
            let n = grid.samples_per_axis();
            let mut k = Field::zeros(*grid, 1);
            let pts = grid.points();
            for idx in 0..pts {
                let ix = grid.unravel(idx);
                let mut off = [0i64; 3];
                for axis in 0..d {
                    off[axis] = ix[axis] as i64 - (n / 2) as i64;
                }
                let r = grid.periodic_distance(&off[..d]);
                k.values_mut()[idx] = norm * (-r * r / (4.0 * t)).exp();
            }
            let mass = k.values().iter().sum::<f64>() * grid.cell_volume();
            if (mass - 1.0).abs() > 1e-3 {
                return Err(Error::DomainTooSmall(format!(
                    "sampled heat kernel mass {mass} deviates from 1; box truncates the kernel"
                )));
            }
            Ok(k.scale(1.0 / mass))
        }
        KernelKind::LowPass => {
            let rt = t.sqrt();
            Ok(sample_kernel_from_symbol(grid, |xi| chi(rt * xi)))
        }
    }
}

fn check_time(grid: &Grid, t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::Contract {
            name: "t > 0".into(),
            lhs: t,
            rhs: 0.0,
        });
    }
    if t.sqrt() > grid.length() / 8.0 {
        return Err(Error::DomainTooSmall(format!(
            "sqrt(t) = {} exceeds L/8 = {}; kernel does not fit the box",
            t.sqrt(),
            grid.length() / 8.0
        )));
    }
    Ok(())
}

/// Evolve by the exact Fourier multiplier of `G_t`.
pub fn evolve(u: &Field, t: f64, kind: KernelKind) -> Result<Field> {
    check_time(u.grid(), t)?;
    let mut s = u.transform()?;
    match kind {
        KernelKind::Heat => s.apply_radial_multiplier(|xi| (-t * xi * xi).exp()),
        KernelKind::LowPass => {
            let rt = t.sqrt();
            s.apply_radial_multiplier(|xi| chi(rt * xi));
        }
    }
    s.inverse()
}

/// Physical-measure convolution `(a * b)(x) = int a(x - y) b(y) dy` of a
/// scalar kernel with each component of `b`.
pub fn convolve(kernel: &Field, b: &Field) -> Result<Field> {
    if kernel.grid() != b.grid() || kernel.components() != 1 {
        return Err(Error::Shape("convolution kernel must be scalar on the same grid".into()));
    }
    let grid = *b.grid();
    let ld = grid.length().powi(grid.dim() as i32);
    let ks = kernel.transform()?;
    let mut bs = b.transform()?;
    let kc = ks.component(0).to_vec();
    for c in 0..b.components() {
        for (v, &k) in bs.component_mut(c).iter_mut().zip(&kc) {
            *v *= k * ld;
        }
    }
    bs.inverse()
}

/// One requirement inequality with both sides, for reports.
#[derive(Debug, Clone, Serialize)]
pub struct IneqCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

impl IneqCheck {
    fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        IneqCheck {
            name: name.to_string(),
            lhs,
            rhs,
            ok: lhs <= rhs,
        }
    }

    fn ge(name: &str, lhs: f64, rhs: f64) -> Self {
        IneqCheck {
            name: name.to_string(),
            lhs,
            rhs,
            ok: lhs >= rhs,
        }
    }
}

/// Dimensionless requirements under which `||G_t u||_p <= gamma ||u||_p`
/// holds for `(epsilon, beta, ell_bar sqrt(t))`-sparse data.
///
/// The displayed requirements pair `epsilon` with the `L^1` tail factor and
/// `beta^(1-1/p)` with the ball-fraction factor; the proof consumes them in
/// the opposite roles. Both readings are enforced (the requirement set is
/// symmetric in `epsilon` and `beta`), which keeps the conclusion
/// guaranteed regardless of labeling.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayRequirements {
    pub gamma: f64,
    pub ell_bar: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub p: Exponent,
    pub c0: f64,
    /// Minimal `ell_bar` from the kernel tail: smallest radius with
    /// `||G||_{L^1(B_r^c)} <= gamma / 3`.
    pub f_of_gamma: f64,
}

impl DecayRequirements {
    /// Boundary parameters for a target decay `gamma`: the largest
    /// `(epsilon, beta)` and smallest `ell_bar` passing every requirement.
    pub fn for_gamma(
        kernel: &KernelSpec,
        entry: &KernelEntry,
        gamma: f64,
        p: Exponent,
    ) -> Result<DecayRequirements> {
        if !(0.0 < gamma && gamma < 1.0) {
            return Err(Error::Contract {
                name: "gamma in (0,1)".into(),
                lhs: gamma,
                rhs: 1.0,
            });
        }
        if p.value() <= 1.0 {
            return Err(Error::Exponent(
                "decay requirements need p > 1: the heat flow preserves the L^1 norm of \
                 nonnegative data, so no sparseness hypothesis can force L^1 decay"
                    .into(),
            ));
        }
        let c0 = entry.c0;
        let f_of_gamma = kernel.min_radius_for_tail(gamma / 3.0)?;
        let mut ell_bar = f_of_gamma;
        if kernel.kind == KernelKind::Heat {
            ell_bar = ell_bar.max((c0 * (c0 / gamma).ln()).sqrt());
        }
        let d = kernel.d as f64;
        let tail_side = gamma / (3.0 * kernel.l1_norm);
        let ball_side_raw = gamma / (c0 * kernel.sup_norm * ell_bar.powf(d));
        let pprime_exp = 1.0 / (1.0 - p.recip());
        let ball_side = ball_side_raw.min(1.0).powf(pprime_exp);
        let bound = tail_side.min(ball_side);
        Ok(DecayRequirements {
            gamma,
            ell_bar,
            epsilon: bound,
            beta: bound,
            p,
            c0,
            f_of_gamma,
        })
    }

    /// Evaluate every requirement inequality on the stored parameters.
    pub fn checks(&self, kernel: &KernelSpec) -> Vec<IneqCheck> {
        let d = kernel.d as f64;
        let one_minus = 1.0 - self.p.recip();
        let ball_rhs = self.gamma / (self.c0 * kernel.sup_norm * self.ell_bar.powf(d));
        let tail_rhs = self.gamma / (3.0 * kernel.l1_norm);
        let mut checks = vec![
            IneqCheck::ge("ell_bar >= f(gamma)", self.ell_bar, self.f_of_gamma),
            IneqCheck::le("epsilon <= gamma/(3 |G|_1)", self.epsilon, tail_rhs),
            IneqCheck::le(
                "beta^(1-1/p) <= gamma/(C0 |G|_inf ell_bar^d)",
                self.beta.powf(one_minus),
                ball_rhs,
            ),
            IneqCheck::le("beta <= gamma/(3 |G|_1)", self.beta, tail_rhs),
            IneqCheck::le(
                "epsilon^(1-1/p) <= gamma/(C0 |G|_inf ell_bar^d)",
                self.epsilon.powf(one_minus),
                ball_rhs,
            ),
        ];
        if kernel.kind == KernelKind::Heat {
            checks.push(IneqCheck::ge(
                "ell_bar^2 >= C0 ln(C0/gamma)",
                self.ell_bar * self.ell_bar,
                self.c0 * (self.c0 / self.gamma).ln(),
            ));
        }
        checks
    }
}

/// One term of the proof decomposition with its target bound.
#[derive(Debug, Clone, Serialize)]
pub struct TermCheck {
    pub name: String,
    pub norm: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Full record of a caloric decay experiment.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub kernel: KernelKind,
    pub gamma: f64,
    pub p: Exponent,
    pub ell: f64,
    pub ell_bar: f64,
    pub t: f64,
    pub requirement_checks: Vec<IneqCheck>,
    pub certificate: CertificateSummary,
    pub terms: Vec<TermCheck>,
    /// `max |I_far + II_S + II_Sc - G_t u|` over the grid (sampled route).
    pub split_identity_error: f64,
    /// Ratio from the sampled-kernel convolution (the route the terms use).
    pub sampled_ratio: f64,
    /// Ratio from the exact Fourier multiplier.
    pub multiplier_ratio: f64,
    pub decay_ok: bool,
}

/// Witness-free view of a certificate for serialization.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateSummary {
    pub params: SparsenessParams,
    pub lambda: f64,
    pub measured_beta: f64,
    pub measured_epsilon: f64,
    pub verdict: bool,
}

impl From<&SparsenessCertificate> for CertificateSummary {
    fn from(c: &SparsenessCertificate) -> Self {
        CertificateSummary {
            params: c.params,
            lambda: c.lambda,
            measured_beta: c.measured_beta,
            measured_epsilon: c.measured_epsilon,
            verdict: c.verdict,
        }
    }
}

/// Quadrature slack allowed on the per-term bounds.
pub const TERM_TOL: f64 = 1e-6;

/// Run the decay experiment at scale `ell` (so `t = (ell / ell_bar)^2`):
/// certify sparseness at the requirement parameters, evolve, split the
/// operator into far-field, near-field-on-S and near-field-off-S parts,
/// and check each against `gamma/3` plus the final ratio against `gamma`.
pub fn decay_experiment(
    u: &Field,
    kind: KernelKind,
    reqs: &DecayRequirements,
    ell: f64,
) -> Result<DecayReport> {
    if reqs.p.value() <= 1.0 {
        return Err(Error::Exponent(
            "the case p = 1 fails: the heat flow preserves the L^1 norm of nonnegative data"
                .into(),
        ));
    }
    let grid = *u.grid();
    let kernel = KernelSpec::get(kind, grid.dim())?;
    for check in reqs.checks(&kernel) {
        if !check.ok {
            return Err(Error::Contract {
                name: check.name,
                lhs: check.lhs,
                rhs: check.rhs,
            });
        }
    }
    let t = (ell / reqs.ell_bar).powi(2);
    check_time(&grid, t)?;
    let params = SparsenessParams::new(reqs.epsilon, reqs.beta, ell, reqs.p)?;
    let cert = sparseness::certify(u, &params)?;
    if !cert.verdict {
        return Err(Error::Contract {
            name: format!(
                "sparseness certificate failed: measured_epsilon = {} (<= {}), measured_beta = {} (<= {})",
                cert.measured_epsilon, reqs.epsilon, cert.measured_beta, reqs.beta
            ),
            lhs: cert.measured_epsilon.max(cert.measured_beta),
            rhs: reqs.epsilon.max(reqs.beta),
        });
    }

    let norm_u = u.lp_norm(reqs.p);
    let kt = sampled_kernel(&grid, t, kind)?;
    // Cut the kernel at the near/far radius ell (periodic distance).
    let ball = sparseness::ball_indicator(&grid, ell);
    let mut k_near = kt.clone();
    let mut k_far = kt.clone();
    for (idx, &inside) in ball.bits().iter().enumerate() {
        if inside {
            k_far.values_mut()[idx] = 0.0;
        } else {
            k_near.values_mut()[idx] = 0.0;
        }
    }
    let mask_field = cert.witness.to_field();
    let mut u_on_s = u.clone();
    let mut u_off_s = u.clone();
    let pts = grid.points();
    for c in 0..u.components() {
        for idx in 0..pts {
            let m = mask_field.component(0)[idx];
            u_on_s.component_mut(c)[idx] *= m;
            u_off_s.component_mut(c)[idx] *= 1.0 - m;
        }
    }
    let far = convolve(&k_far, u)?;
    let near_s = convolve(&k_near, &u_on_s)?;
    let near_sc = convolve(&k_near, &u_off_s)?;
    let total_sampled = convolve(&kt, u)?;
    let split_sum = far.add(&near_s)?.add(&near_sc)?;
    let split_identity_error = split_sum.sub(&total_sampled)?.lp_norm(Exponent::INF);

    let third = reqs.gamma / 3.0 * norm_u;
    let terms = vec![
        term("I_far", &far, reqs.p, third),
        term("II_near_S", &near_s, reqs.p, third),
        term("II_near_Sc", &near_sc, reqs.p, third),
    ];
    let sampled_ratio = total_sampled.lp_norm(reqs.p) / norm_u;
    let multiplier_ratio = evolve(u, t, kind)?.lp_norm(reqs.p) / norm_u;
    let decay_ok = sampled_ratio <= reqs.gamma
        && multiplier_ratio <= reqs.gamma
        && terms.iter().all(|t| t.ok);
    Ok(DecayReport {
        kernel: kind,
        gamma: reqs.gamma,
        p: reqs.p,
        ell,
        ell_bar: reqs.ell_bar,
        t,
        requirement_checks: reqs.checks(&kernel),
        certificate: CertificateSummary::from(&cert),
        terms,
        split_identity_error,
        sampled_ratio,
        multiplier_ratio,
        decay_ok,
    })
}

fn term(name: &str, f: &Field, p: Exponent, bound: f64) -> TermCheck {
    let norm = f.lp_norm(p);
    TermCheck {
        name: name.to_string(),
        norm,
        bound,
        ok: norm <= bound + TERM_TOL,
    }
}

/// The naive half-maximum drop: data whose half-max superlevel set fills at
/// most a fraction `epsilon <= 0.1` of every radius-`ell` ball loses a
/// quarter of its sup norm by time `T = drop_c * ell^2`.
#[derive(Debug, Clone, Serialize)]
pub struct HeatDropReport {
    pub ell: f64,
    pub t: f64,
    pub naive_epsilon: f64,
    pub ratio: f64,
    pub within_calibrated_domain: bool,
    pub drop_ok: bool,
}

/// Largest naive level-set fraction for which the drop constant was
/// calibrated.
pub const DROP_EPSILON_DOMAIN: f64 = 0.1;

pub fn heat_drop(u: &Field, ell: f64, drop_c: f64) -> Result<HeatDropReport> {
    let sup = u.lp_norm(Exponent::INF);
    if sup == 0.0 {
        return Err(Error::Degenerate("heat drop of the zero field".into()));
    }
    let mask = superlevel_mask(u, 0.5 * sup)?;
    let naive_epsilon = sparseness::max_local_fraction(&mask, ell)?;
    let t = drop_c * ell * ell;
    let evolved = evolve(u, t, KernelKind::Heat)?;
    let ratio = evolved.lp_norm(Exponent::INF) / sup;
    Ok(HeatDropReport {
        ell,
        t,
        naive_epsilon,
        ratio,
        within_calibrated_domain: naive_epsilon <= DROP_EPSILON_DOMAIN,
        drop_ok: ratio <= 0.75,
    })
}

/// Frequency-side decay experiment: data that is `(gamma/2, J)`-sparse in
/// frequency with `2^J = k_cal / (gamma sqrt(t))` decays to `gamma` under
/// the heat flow, with per-block decay `C e^{-c t 2^{2j}}` and the summed
/// high-pass tail controlled by `(4C / 3c) (t 2^{2J})^{-1}`.
#[derive(Debug, Clone, Serialize)]
pub struct FrequencyDecayReport {
    pub gamma: f64,
    pub p: Exponent,
    pub t: f64,
    pub j_cut: f64,
    pub low_pass_ratio: f64,
    pub evolved_ratio: f64,
    pub block_checks: Vec<TermCheck>,
    pub high_tail_norm: f64,
    pub high_tail_bound: f64,
    pub decay_ok: bool,
}

pub fn frequency_decay_experiment(
    u: &Field,
    gamma: f64,
    t: f64,
    p: Exponent,
    entry: &KernelEntry,
) -> Result<FrequencyDecayReport> {
    check_time(u.grid(), t)?;
    let decomp = DyadicDecomposition::new(*u.grid());
    let j_cut = (entry.k_cal / (gamma * t.sqrt())).log2();
    if j_cut < decomp.j_min as f64 || j_cut > decomp.j_max as f64 {
        return Err(Error::LevelRange {
            j: j_cut.round() as i32,
            j_min: decomp.j_min,
            j_max: decomp.j_max,
        });
    }
    let beta = gamma / 2.0;
    let params = crate::frequency::FrequencySparsenessParams::new(beta, j_cut)?;
    let cert = crate::frequency::certify_frequency(u, &params, p)?;
    if !cert.verdict {
        return Err(Error::Contract {
            name: "frequency sparseness: ||D_<J u||_p <= (gamma/2) ||u||_p".into(),
            lhs: cert.low_pass_ratio,
            rhs: beta,
        });
    }
    let norm_u = u.lp_norm(p);
    let evolved_ratio = evolve(u, t, KernelKind::Heat)?.lp_norm(p) / norm_u;

    let mut block_checks = Vec::new();
    let j_from = (j_cut.floor() as i32).max(decomp.j_min);
    for j in j_from..=decomp.j_max {
        let b = decomp.block(u, j)?;
        let eb = evolve(&b, t, KernelKind::Heat)?;
        let bound = entry.block_big_c * (-entry.block_c * t * 4f64.powi(j)).exp() * norm_u;
        block_checks.push(TermCheck {
            name: format!("block j = {j}"),
            norm: eb.lp_norm(p),
            bound,
            ok: eb.lp_norm(p) <= bound + TERM_TOL,
        });
    }
    let high = decomp.high_pass(u, j_cut)?;
    let high_tail_norm = evolve(&high, t, KernelKind::Heat)?.lp_norm(p);
    let high_tail_bound =
        (4.0 * entry.block_big_c / (3.0 * entry.block_c)) * norm_u / (t * 4f64.powf(j_cut));
    let decay_ok = evolved_ratio <= gamma
        && block_checks.iter().all(|c| c.ok)
        && high_tail_norm <= high_tail_bound + TERM_TOL;
    Ok(FrequencyDecayReport {
        gamma,
        p,
        t,
        j_cut,
        low_pass_ratio: cert.low_pass_ratio,
        evolved_ratio,
        block_checks,
        high_tail_norm,
        high_tail_bound,
        decay_ok,
    })
}
