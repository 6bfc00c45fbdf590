//! Predicted AUC of the true-distance predictor on the geometric model.
//!
//! For a pair at distance `r` with expected degrees `κ, κ'`, an edge is
//! present with probability `ρ(r, κκ')` (see [`crate::model`]). The
//! conditional distance densities are
//!
//! ```text
//! p3(r | e=1) ∝ p2(r) ∬ p(κ) p(κ') ρ(r, κκ') dκ dκ'
//! p3(r | e=0) ∝ p2(r) ∬ p(κ) p(κ') (1 - ρ(r, κκ')) dκ dκ'
//! ```
//!
//! and the AUC of scoring pairs by `-r` is
//! `∫ p3(r₁|1) ∫_{r₂ ≥ r₁} p3(r₂|0) dr₂ dr₁`.
//!
//! `ρ` depends on the degrees only through the product `κκ'`. For Pareto
//! degrees, `ln(κ/k0)` is exponential with rate `γ-1` (or `γ-2` for the
//! degree-weighted density `p'(κ) ∝ κ p(κ)`), so `x = ln(κκ'/k0²)` is
//! Gamma(2, λ) distributed and the double integral collapses to a single
//! integral in `x`, evaluated with composite Gauss–Legendre on `[0, X]`
//! where the Gamma tail beyond `X` is below [`TheoryParams::tail_mass`].

use alloc::vec::Vec;

use crate::math::{acos, asin, cos, exp, ln, sin};
use crate::model::{connection_probability, ModelParams, MuMode};
use crate::quad::GaussLegendre;
use crate::{Error, Result};

const SQRT2: f64 = core::f64::consts::SQRT_2;

/// Density of the absolute difference of two uniform `[0, 1]` variables.
pub fn p1(l: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&l) {
        return Err(Error::OutOfDomain { what: "p1 argument", value: l });
    }
    Ok(2.0 * (1.0 - l))
}

/// Which form of the planar distance density to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum P2Mode {
    /// `∫ p1(l) p1(√(r²-l²)) dl`, without the polar Jacobian; not a
    /// normalised density.
    AsWritten,
    /// `∫ p1(l) p1(√(r²-l²)) r/√(r²-l²) dl`, the distance density of two
    /// uniform points in the unit square.
    Corrected,
}

/// Distance density in the unit square, integrated in `θ` with
/// `l = r sin θ` to remove the endpoint singularity.
pub fn p2(r: f64, mode: P2Mode) -> Result<f64> {
    if !(0.0..=SQRT2 + 1e-15).contains(&r) {
        return Err(Error::OutOfDomain { what: "p2 argument", value: r });
    }
    Ok(p2_unchecked(r, mode, &GaussLegendre::new(24)))
}

fn p2_unchecked(r: f64, mode: P2Mode, gl: &GaussLegendre) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let c = (1.0 / r).min(1.0);
    let (lo, hi) = (acos(c), asin(c));
    if hi <= lo {
        return 0.0;
    }
    gl.integrate(lo, hi, |t| {
        let (s, co) = (sin(t), cos(t));
        let base = 4.0 * r * (1.0 - r * s) * (1.0 - r * co);
        match mode {
            P2Mode::Corrected => base,
            P2Mode::AsWritten => base * co,
        }
    })
}

/// How the endpoint degrees of a pair are weighted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointWeighting {
    /// `p'(κ) = κ p(κ) / ⟨κ⟩`: an endpoint reached by following a link.
    SizeBiased,
    /// `p(κ)`: endpoints of a uniformly chosen pair.
    Plain,
}

impl EndpointWeighting {
    /// Rate of the exponential law of `ln(κ/k0)`.
    fn rate(self, gamma: f64) -> f64 {
        match self {
            EndpointWeighting::SizeBiased => gamma - 2.0,
            EndpointWeighting::Plain => gamma - 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoryParams {
    pub gamma: f64,
    pub k0: f64,
    pub beta: f64,
    pub mean_degree: f64,
    /// Network size, used only to calibrate `μ`.
    pub n: usize,
    pub mu: MuMode,
    pub p2_mode: P2Mode,
    pub weighting: EndpointWeighting,
    /// Composite Gauss–Legendre panels across `[0, √2]`.
    pub panels: usize,
    /// Panels for the degree integral.
    pub degree_panels: usize,
    /// Mass of the degree-product distribution left beyond the cutoff.
    pub tail_mass: f64,
}

impl Default for TheoryParams {
    fn default() -> Self {
        TheoryParams {
            gamma: 2.5,
            k0: 1.0,
            beta: 2.0,
            mean_degree: 4.0,
            n: 700,
            mu: MuMode::Calibrated,
            p2_mode: P2Mode::Corrected,
            weighting: EndpointWeighting::SizeBiased,
            panels: 512,
            degree_panels: 64,
            tail_mass: 1e-9,
        }
    }
}

impl TheoryParams {
    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            n: self.n,
            gamma: self.gamma,
            k0: self.k0,
            beta: self.beta,
            mean_degree: self.mean_degree,
            dim: 2,
            mu: self.mu,
            ..ModelParams::default()
        }
    }

    fn validate(&self) -> Result<()> {
        self.model_params().validate()?;
        if self.panels == 0 || self.degree_panels == 0 {
            return Err(Error::InvalidConfig("quadrature needs at least one panel".into()));
        }
        if !(self.tail_mass > 0.0 && self.tail_mass < 1.0) {
            return Err(Error::InvalidConfig("tail_mass must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

const ORDER: usize = 8;

/// Quadrature for `E[g(x)]` with `x ~ Gamma(2, rate)` truncated to the
/// region holding all but `tail` of the mass.
#[derive(Clone, Debug)]
pub(crate) struct GammaRule {
    /// `k0² eˣ` at every node.
    pub products: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GammaRule {
    pub fn new(rate: f64, k0: f64, tail: f64, panels: usize) -> Self {
        // P(X > t) = (1 + λt) e^{-λt}
        let mut t = -ln(tail) / rate;
        while (1.0 + rate * t) * exp(-rate * t) > tail {
            t *= 1.1;
        }
        let gl = GaussLegendre::new(ORDER);
        let (xs, ws) = gl.composite_points(0.0, t, panels);
        let products = xs.iter().map(|&x| k0 * k0 * exp(x)).collect();
        let weights = xs
            .iter()
            .zip(&ws)
            .map(|(&x, &w)| w * rate * rate * x * exp(-rate * x))
            .collect();
        GammaRule { products, weights }
    }

    /// `E[ρ(r, κκ')]`.
    pub fn mean_kernel(&self, r: f64, mu: f64, beta: f64) -> f64 {
        self.products
            .iter()
            .zip(&self.weights)
            .map(|(&kk, &w)| w * connection_probability(r, kk, mu, beta))
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Panel boundaries on `[0, √2]`: `panels` uniform panels, a break at 1,
/// and dyadic refinement towards 0 where the kernel varies on the scale
/// `μ κκ'`.
pub(crate) fn distance_breaks(panels: usize) -> Vec<f64> {
    let mut b: Vec<f64> = (0..=panels).map(|i| SQRT2 * i as f64 / panels as f64).collect();
    b.push(1.0);
    let first = SQRT2 / panels as f64;
    let mut h = first / 2.0;
    while h > first * 1e-7 {
        b.push(h);
        h /= 2.0;
    }
    b.sort_by(|x, y| x.total_cmp(y));
    b.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    *b.last_mut().expect("non-empty") = SQRT2;
    b
}

/// `∫ f1(r₁) ∫_{r₂ ≥ r₁} f0(r₂) dr₂ dr₁` for densities on `[0, √2]`
/// given up to normalisation. `breaks` are the panel boundaries; both
/// densities are normalised numerically first.
pub fn auc_from_densities<F1, F0>(mut f1: F1, mut f0: F0, breaks: &[f64]) -> Result<f64>
where
    F1: FnMut(f64) -> f64,
    F0: FnMut(f64) -> f64,
{
    if breaks.len() < 2 {
        return Err(Error::Quadrature("need at least one panel".into()));
    }
    let gl = GaussLegendre::new(ORDER);
    let np = breaks.len() - 1;
    // panel masses of f0 and f1
    let mut m0 = Vec::with_capacity(np);
    let mut z1 = 0.0;
    for w in breaks.windows(2) {
        m0.push(gl.integrate(w[0], w[1], &mut f0));
        z1 += gl.integrate(w[0], w[1], &mut f1);
    }
    let z0: f64 = m0.iter().sum();
    if !(z0 > 0.0 && z1 > 0.0 && z0.is_finite() && z1.is_finite()) {
        return Err(Error::Quadrature(alloc::format!(
            "densities do not normalise (masses {z1}, {z0})"
        )));
    }
    // tail[i] = mass of f0 in panels i+1..
    let mut tail = alloc::vec![0.0; np];
    for i in (0..np.saturating_sub(1)).rev() {
        tail[i] = tail[i + 1] + m0[i + 1];
    }
    let mut total = 0.0;
    for (i, w) in breaks.windows(2).enumerate() {
        let b = w[1];
        total += gl.integrate(w[0], b, |r1| {
            let inner = gl.integrate(r1, b, &mut f0) + tail[i];
            f1(r1) * inner
        });
    }
    let auc = total / (z1 * z0);
    if !auc.is_finite() || !(-1e-9..=1.0 + 1e-9).contains(&auc) {
        return Err(Error::Quadrature(alloc::format!("AUC {auc} outside [0, 1]")));
    }
    Ok(auc.clamp(0.0, 1.0))
}

/// Conditional distance densities for a fixed parameter set.
#[derive(Clone, Debug)]
pub struct TheoryModel {
    params: TheoryParams,
    mu: f64,
    rule: GammaRule,
    gl: GaussLegendre,
    z1: f64,
    z0: f64,
}

impl TheoryModel {
    pub fn new(params: &TheoryParams) -> Result<Self> {
        params.validate()?;
        let mu = params.model_params().resolve_mu()?;
        let rule = GammaRule::new(
            params.weighting.rate(params.gamma),
            params.k0,
            params.tail_mass,
            params.degree_panels,
        );
        let mut m = TheoryModel {
            params: params.clone(),
            mu,
            rule,
            gl: GaussLegendre::new(24),
            z1: 1.0,
            z0: 1.0,
        };
        let breaks = distance_breaks(params.panels);
        let gl = GaussLegendre::new(ORDER);
        let (mut z1, mut z0) = (0.0, 0.0);
        for w in breaks.windows(2) {
            z1 += gl.integrate(w[0], w[1], |r| m.raw(r, true));
            z0 += gl.integrate(w[0], w[1], |r| m.raw(r, false));
        }
        if !(z1 > 0.0 && z0 > 0.0 && z1.is_finite() && z0.is_finite()) {
            return Err(Error::Quadrature(alloc::format!(
                "conditional densities do not normalise (masses {z1}, {z0})"
            )));
        }
        m.z1 = z1;
        m.z0 = z0;
        Ok(m)
    }

    pub fn params(&self) -> &TheoryParams {
        &self.params
    }

    /// The kernel scale actually used.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    fn raw(&self, r: f64, edge: bool) -> f64 {
        let d = p2_unchecked(r, self.params.p2_mode, &self.gl);
        if d == 0.0 {
            return 0.0;
        }
        let k = self.rule.mean_kernel(r, self.mu, self.params.beta);
        if edge {
            d * k
        } else {
            d * (self.rule.mass() - k)
        }
    }

    /// Normalised `p3(r | e)`.
    pub fn p3(&self, r: f64, edge_present: bool) -> Result<f64> {
        if !(0.0..=SQRT2 + 1e-15).contains(&r) {
            return Err(Error::OutOfDomain { what: "distance", value: r });
        }
        let z = if edge_present { self.z1 } else { self.z0 };
        Ok(self.raw(r, edge_present) / z)
    }

    /// `E[r | e]` under the normalised density.
    pub fn mean_distance(&self, edge_present: bool) -> f64 {
        let gl = GaussLegendre::new(ORDER);
        let z = if edge_present { self.z1 } else { self.z0 };
        distance_breaks(self.params.panels)
            .windows(2)
            .map(|w| gl.integrate(w[0], w[1], |r| r * self.raw(r, edge_present)))
            .sum::<f64>()
            / z
    }

    pub fn auc(&self) -> Result<f64> {
        auc_from_densities(
            |r| self.raw(r, true),
            |r| self.raw(r, false),
            &distance_breaks(self.params.panels),
        )
    }
}

/// Normalised conditional distance density.
pub fn p3(r: f64, edge_present: bool, params: &TheoryParams) -> Result<f64> {
    TheoryModel::new(params)?.p3(r, edge_present)
}

pub fn theoretical_auc(params: &TheoryParams) -> Result<f64> {
    TheoryModel::new(params)?.auc()
}

/// AUC and the change observed when both quadrature resolutions are
/// doubled, as an error estimate.
pub fn theoretical_auc_with_error(params: &TheoryParams) -> Result<(f64, f64)> {
    let coarse = theoretical_auc(params)?;
    let fine = theoretical_auc(&TheoryParams {
        panels: params.panels * 2,
        degree_panels: params.degree_panels * 2,
        ..params.clone()
    })?;
    Ok((fine, (fine - coarse).abs()))
}

/// `E[ρ]` over a uniformly chosen pair of nodes: uniform positions in the
/// unit square (or segment), Pareto degrees. Used to calibrate `μ`.
pub(crate) fn mean_connection_probability(mu: f64, gamma: f64, k0: f64, beta: f64, dim: usize) -> Result<f64> {
    let rule = GammaRule::new(gamma - 1.0, k0, 1e-9, 32);
    let gl = GaussLegendre::new(ORDER);
    let p2gl = GaussLegendre::new(24);
    let density = |r: f64| match dim {
        1 => 2.0 * (1.0 - r),
        _ => p2_unchecked(r, P2Mode::Corrected, &p2gl),
    };
    let breaks: Vec<f64> = match dim {
        1 => distance_breaks(96).into_iter().map(|b| b / SQRT2).collect(),
        2 => distance_breaks(96),
        _ => {
            return Err(Error::InvalidConfig(
                "calibrated kernel scale supports dimensions 1 and 2".into(),
            ))
        }
    };
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += gl.integrate(w[0], w[1], |r| density(r) * rule.mean_kernel(r, mu, beta));
    }
    Ok(total / rule.mass())
}

/// The exact 1D square-distance density, for reference.
#[cfg(test)]
pub(crate) fn square_line_picking(r: f64) -> f64 {
    let pi = core::f64::consts::PI;
    if r <= 1.0 {
        2.0 * r * (pi - 4.0 * r + r * r)
    } else {
        2.0 * r * (4.0 * crate::math::sqrt(r * r - 1.0) - (r * r + 2.0 - pi) - 4.0 * acos(1.0 / r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_values() {
        assert_eq!(p1(0.0).unwrap(), 2.0);
        assert_eq!(p1(1.0).unwrap(), 0.0);
        assert!(p1(1.5).is_err());
        let mass = GaussLegendre::new(8).integrate(0.0, 1.0, |l| p1(l).unwrap());
        assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn corrected_p2_is_the_square_density() {
        for i in 0..=140 {
            let r = i as f64 * 0.01;
            let a = p2(r, P2Mode::Corrected).unwrap();
            assert!((a - square_line_picking(r)).abs() < 1e-9, "r={r}: {a}");
        }
        assert_eq!(p2(0.0, P2Mode::Corrected).unwrap(), 0.0);
        assert!(p2(1.5, P2Mode::Corrected).is_err());
    }

    #[test]
    fn corrected_p2_integrates_to_one() {
        let gl = GaussLegendre::new(ORDER);
        let mass: f64 = distance_breaks(64)
            .windows(2)
            .map(|w| gl.integrate(w[0], w[1], |r| p2(r, P2Mode::Corrected).unwrap()))
            .sum();
        assert!((mass - 1.0).abs() < 1e-6, "{mass}");
    }

    #[test]
    fn as_written_differs_by_cosine() {
        let r = 0.5;
        let w = p2(r, P2Mode::AsWritten).unwrap();
        let direct = GaussLegendre::new(16).composite(0.0, r, 2000, |l: f64| {
            2.0 * (1.0 - l) * 2.0 * (1.0 - (r * r - l * l).sqrt())
        });
        assert!((w - direct).abs() < 1e-6, "{w} vs {direct}");
    }

    #[test]
    fn identical_densities_give_half() {
        let f = |r: f64| square_line_picking(r);
        let a = auc_from_densities(f, f, &distance_breaks(32)).unwrap();
        assert!((a - 0.5).abs() < 1e-9, "{a}");
    }

    #[test]
    fn separated_densities() {
        // f1 on [0, 0.5), f0 on [0.5, √2]
        let f1 = |r: f64| if r < 0.5 { 1.0 } else { 0.0 };
        let f0 = |r: f64| if r >= 0.5 { 1.0 } else { 0.0 };
        let mut breaks = distance_breaks(8);
        breaks.push(0.5);
        breaks.sort_by(|a, b| a.total_cmp(b));
        let a = auc_from_densities(f1, f0, &breaks).unwrap();
        assert!((a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_densities() {
        let m = TheoryModel::new(&TheoryParams {
            panels: 128,
            ..TheoryParams::default()
        })
        .unwrap();
        let gl = GaussLegendre::new(ORDER);
        for e in [true, false] {
            let mass: f64 = distance_breaks(128)
                .windows(2)
                .map(|w| gl.integrate(w[0], w[1], |r| m.p3(r, e).unwrap()))
                .sum();
            assert!((mass - 1.0).abs() < 1e-4);
        }
        assert!(m.mean_distance(true) < m.mean_distance(false));
    }

    #[test]
    fn gamma_rule_mass() {
        let rule = GammaRule::new(0.5, 1.0, 1e-9, 64);
        assert!((rule.mass() - 1.0).abs() < 1e-8);
    }
}
