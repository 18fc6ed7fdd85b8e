//! Per-channel T1/T2 and the combined coherence budget.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::displacement::{gamma_displacement, KernelMode};
use crate::error::{Error, Result};
use crate::modulation::gamma_modulation;
use crate::numerics::{Estimate, NestedSpec};
use crate::photon::{gamma_purcell, gamma_vacuum, CavityParams, DISPERSIVE_RATIO_LIMIT};
use crate::surface::{derive_model, SurfaceStateModel, Trap};
use crate::units::{thermal_occupation, Material, PhysicalConstants};

/// Lifetime quoted elsewhere for the Purcell-limited qubit at
/// `g/2pi = 5 MHz`, `kappa/2pi = 0.5 MHz`, `Delta/2pi = 500 MHz`. The
/// dispersive formula gives about 3.2 ms there; the mismatch is reported,
/// not fitted.
pub const PURCELL_REFERENCE_T1: f64 = 32e-3;

pub const DEPHASING_NOTE: &str = "one-phonon pure dephasing vanishes; two-phonon dephasing is not evaluated";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Vacuum,
    Purcell,
    Displacement,
    Modulation,
}

impl Channel {
    pub const ALL: [Channel; 4] = [
        Channel::Vacuum,
        Channel::Purcell,
        Channel::Displacement,
        Channel::Modulation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Channel::Vacuum => "vacuum",
            Channel::Purcell => "purcell",
            Channel::Displacement => "displacement",
            Channel::Modulation => "modulation",
        }
    }

    /// Column suffix used in tabular output.
    pub fn short(&self) -> &'static str {
        match self {
            Channel::Vacuum => "vac",
            Channel::Purcell => "purcell",
            Channel::Displacement => "dis",
            Channel::Modulation => "mod",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRate {
    pub channel: Channel,
    /// 1/s
    pub gamma: f64,
    /// 1/s
    pub gamma_phi: f64,
    /// s
    pub t1: f64,
    /// s
    pub t2: f64,
    pub metadata: BTreeMap<String, String>,
}

impl ChannelRate {
    pub fn new(channel: Channel, gamma: f64, gamma_phi: f64, metadata: BTreeMap<String, String>) -> Self {
        ChannelRate {
            channel,
            gamma,
            gamma_phi,
            t1: 1.0 / gamma,
            t2: 1.0 / (gamma / 2.0 + gamma_phi),
            metadata,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFailure {
    pub channel: Channel,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub f0_ghz: f64,
    /// K
    pub temperature: f64,
    pub material: Material,
    pub trap: Trap,
    pub cavity: Option<CavityParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub operating_point: OperatingPoint,
    pub channels: Vec<ChannelRate>,
    pub failures: Vec<ChannelFailure>,
    /// Sum of channel rates in channel order, 1/s.
    pub gamma_total: f64,
    /// Combined T2; `None` when no channel was evaluated.
    pub t2_total: Option<f64>,
    pub metadata: BTreeMap<String, String>,
}

impl CoherenceReport {
    pub fn channel(&self, channel: Channel) -> Option<&ChannelRate> {
        self.channels.iter().find(|c| c.channel == channel)
    }

    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Which channels to evaluate and how.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    /// Purcell is skipped when no cavity is given.
    pub channels: Vec<Channel>,
    pub kernel: KernelMode,
    pub spec: NestedSpec,
    pub constants: PhysicalConstants,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            channels: Channel::ALL.to_vec(),
            kernel: KernelMode::default(),
            spec: NestedSpec::default(),
            constants: PhysicalConstants::CODATA_2018,
        }
    }
}

/// Pure dephasing from one-phonon processes.
///
/// Energy conservation pins the phonon wavevector to `q = 0`, where the
/// diagonal form factors vanish, so the rate is exactly zero.
pub fn gamma_phi_one_phonon(_model: &SurfaceStateModel, _trap: &Trap) -> f64 {
    0.0
}

fn estimate_metadata(est: &Estimate, spec: &NestedSpec) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("quadrature_error".into(), format!("{:e}", est.error));
    m.insert("evaluations".into(), est.evaluations.to_string());
    m.insert("rel_tol".into(), format!("{:e}", spec.outer.rel_tol));
    m
}

fn purcell_metadata(trap: &Trap, cavity: &CavityParams, gamma: f64) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let ratio = cavity.dispersive_ratio(trap);
    m.insert("dispersive_ratio".into(), format!("{ratio:e}"));
    if ratio > DISPERSIVE_RATIO_LIMIT {
        m.insert(
            "warning".into(),
            format!("g/|Delta| = {ratio:.3} exceeds {DISPERSIVE_RATIO_LIMIT}; dispersive formula unreliable"),
        );
    }
    m.insert(
        "discrepancy".into(),
        format!(
            "g^2 kappa/Delta^2 gives T1 = {:.4} ms; the quoted reference lifetime of {} ms for g/2pi = 5 MHz, \
             kappa/2pi = 0.5 MHz, Delta/2pi = 500 MHz is not reproduced by this formula",
            1e3 / gamma,
            PURCELL_REFERENCE_T1 * 1e3
        ),
    );
    m
}

fn evaluate(
    channel: Channel,
    model: &Result<SurfaceStateModel>,
    trap: &Trap,
    cavity: Option<&CavityParams>,
    options: &ReportOptions,
) -> Option<Result<ChannelRate>> {
    let phonon_model = || model.as_ref().map_err(Clone::clone);
    let result = match channel {
        Channel::Vacuum => Ok(ChannelRate::new(
            channel,
            gamma_vacuum(trap, &options.constants),
            0.0,
            BTreeMap::new(),
        )),
        Channel::Purcell => {
            let cavity = cavity?;
            gamma_purcell(trap, cavity).map(|g| ChannelRate::new(channel, g, 0.0, purcell_metadata(trap, cavity, g)))
        }
        Channel::Displacement => phonon_model().and_then(|m| {
            let est = gamma_displacement(m, trap, options.kernel, &options.spec)?;
            let mut meta = estimate_metadata(&est, &options.spec);
            meta.insert("kernel".into(), options.kernel.as_str().into());
            meta.insert("dephasing".into(), DEPHASING_NOTE.into());
            Ok(ChannelRate::new(
                channel,
                est.value,
                gamma_phi_one_phonon(m, trap),
                meta,
            ))
        }),
        Channel::Modulation => phonon_model().and_then(|m| {
            let est = gamma_modulation(m, trap, &options.spec)?;
            let mut meta = estimate_metadata(&est, &options.spec);
            meta.insert("dephasing".into(), DEPHASING_NOTE.into());
            Ok(ChannelRate::new(
                channel,
                est.value,
                gamma_phi_one_phonon(m, trap),
                meta,
            ))
        }),
    };
    Some(result)
}

/// Evaluate the requested channels at one operating point.
///
/// Fails only on an invalid operating point; channel failures are collected
/// in [`CoherenceReport::failures`].
pub fn build_report(
    f0_ghz: f64,
    temperature: f64,
    material: &Material,
    trap: &Trap,
    cavity: Option<&CavityParams>,
    options: &ReportOptions,
) -> Result<CoherenceReport> {
    options.spec.validate()?;
    options.constants.validate()?;
    material.validate()?;
    if let Some(c) = cavity {
        c.validate()?;
    }
    if f0_ghz != trap.f_x {
        return Err(Error::domain(
            "build_report",
            format!("f0 = {f0_ghz} GHz but the trap is at {} GHz", trap.f_x),
        ));
    }
    let n_q = thermal_occupation(trap.omega_x(), temperature, &options.constants)?;
    let model = derive_model(material, &options.constants);

    let mut channels = Vec::new();
    let mut failures = Vec::new();
    for &channel in &options.channels {
        match evaluate(channel, &model, trap, cavity, options) {
            Some(Ok(rate)) => channels.push(rate),
            Some(Err(e)) => failures.push(ChannelFailure {
                channel,
                error: e.to_string(),
            }),
            None => {}
        }
    }

    let mut gamma_total = 0.0;
    let mut gamma_phi_total = 0.0;
    for c in &channels {
        gamma_total += c.gamma;
        gamma_phi_total += c.gamma_phi;
    }
    let t2_total = if channels.is_empty() {
        None
    } else {
        Some(1.0 / (gamma_total / 2.0 + gamma_phi_total))
    };

    let mut metadata = BTreeMap::new();
    metadata.insert("thermal_occupation".into(), format!("{n_q:e}"));
    if channels.is_empty() {
        metadata.insert("t2_total".into(), "undefined: no channel evaluated".into());
    }

    Ok(CoherenceReport {
        operating_point: OperatingPoint {
            f0_ghz,
            temperature,
            material: material.clone(),
            trap: *trap,
            cavity: cavity.copied(),
        },
        channels,
        failures,
        gamma_total,
        t2_total,
        metadata,
    })
}

/// Resonator position, either fixed or locked to the qubit by a detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tuning {
    /// `omega_x - omega_r`, rad/s.
    Detuning(f64),
    /// GHz
    Resonator(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    /// rad/s
    pub g: f64,
    /// rad/s
    pub kappa: f64,
    pub tuning: Tuning,
}

impl CavitySpec {
    pub fn resolve(&self, f0_ghz: f64) -> Result<CavityParams> {
        let f_r = match self.tuning {
            Tuning::Resonator(f) => f,
            Tuning::Detuning(d) => f0_ghz - d / (2.0 * std::f64::consts::PI * 1e9),
        };
        CavityParams::new(self.g, self.kappa, f_r)
    }
}

/// Everything except the frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepContext {
    /// K
    pub temperature: f64,
    pub material: Material,
    /// statV/cm
    pub pressing_field: f64,
    pub cavity: Option<CavitySpec>,
}

impl SweepContext {
    pub fn neon(temperature: f64) -> Self {
        SweepContext {
            temperature,
            material: Material::neon(),
            pressing_field: 0.0,
            cavity: None,
        }
    }

    pub fn report_at(&self, f0_ghz: f64, options: &ReportOptions) -> Result<CoherenceReport> {
        let trap = Trap::new(f0_ghz, f0_ghz, self.pressing_field, &options.constants)?;
        let cavity = self.cavity.map(|c| c.resolve(f0_ghz)).transpose()?;
        build_report(
            f0_ghz,
            self.temperature,
            &self.material,
            &trap,
            cavity.as_ref(),
            options,
        )
    }
}

/// One report per frequency, in input order. Points are evaluated in parallel.
pub fn sweep(f0_list: &[f64], context: &SweepContext, options: &ReportOptions) -> Result<Vec<Result<CoherenceReport>>> {
    if f0_list.is_empty() {
        return Err(Error::domain("sweep", "empty frequency list"));
    }
    if let Some(bad) = f0_list.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
        return Err(Error::domain("sweep", format!("frequency must be positive, got {bad}")));
    }
    Ok(f0_list.par_iter().map(|&f| context.report_at(f, options)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::angular_from_mhz;

    const K: PhysicalConstants = PhysicalConstants::CODATA_2018;

    fn at(f: f64, options: &ReportOptions) -> CoherenceReport {
        SweepContext::neon(0.010).report_at(f, options).unwrap()
    }

    #[test]
    fn operating_point_budget() {
        let r = at(6.4, &ReportOptions::default());
        assert!(r.is_complete());
        let names: Vec<_> = r.channels.iter().map(|c| c.channel).collect();
        assert_eq!(names, [Channel::Vacuum, Channel::Displacement, Channel::Modulation]);
        let t1 = |c| r.channel(c).unwrap().t1;
        assert!((t1(Channel::Vacuum) / 99.0 - 1.0).abs() < 0.02);
        assert!((t1(Channel::Displacement) / 20.2e-3 - 1.0).abs() < 0.03);
        assert!((t1(Channel::Modulation) / 1.1e-3 - 1.0).abs() < 0.03);
        let n_q: f64 = r.metadata["thermal_occupation"].parse().unwrap();
        assert!(n_q < 1e-10, "{n_q}");
    }

    #[test]
    fn t2_is_twice_t1_bitwise() {
        let r = at(3.0, &ReportOptions::default());
        for c in &r.channels {
            assert_eq!(c.gamma_phi, 0.0);
            assert_eq!(c.t2, 2.0 * c.t1, "{}", c.channel);
        }
        assert_eq!(r.t2_total.unwrap(), 2.0 / r.gamma_total);
        let m = derive_model(&Material::neon(), &K).unwrap();
        let t = Trap::isotropic(3.0, &K).unwrap();
        assert_eq!(gamma_phi_one_phonon(&m, &t), 0.0);
        assert_eq!(crate::surface::dephasing_form_factor(&t, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn totals_and_bounds() {
        let r = at(5.0, &ReportOptions::default());
        let sum = r.channels.iter().fold(0.0, |acc, c| acc + c.gamma);
        assert_eq!(r.gamma_total, sum);
        let t2 = r.t2_total.unwrap();
        assert!(r.channels.iter().all(|c| t2 <= c.t2));
    }

    #[test]
    fn purcell_channel_carries_annotation() {
        let mut ctx = SweepContext::neon(0.010);
        ctx.cavity = Some(CavitySpec {
            g: angular_from_mhz(5.0),
            kappa: angular_from_mhz(0.5),
            tuning: Tuning::Detuning(angular_from_mhz(500.0)),
        });
        let options = ReportOptions {
            channels: vec![Channel::Purcell],
            ..ReportOptions::default()
        };
        let r = ctx.report_at(6.4, &options).unwrap();
        let p = r.channel(Channel::Purcell).unwrap();
        let hand = 2.0 * std::f64::consts::PI * 50.0;
        assert!((p.gamma / hand - 1.0).abs() < 1e-12);
        assert!(p.metadata["discrepancy"].contains("32 ms"));
        assert!(!p.metadata.contains_key("warning"));
    }

    #[test]
    fn strong_coupling_is_flagged() {
        let trap = Trap::isotropic(6.4, &K).unwrap();
        let cav = CavityParams::new(angular_from_mhz(100.0), angular_from_mhz(0.5), 6.0).unwrap();
        let options = ReportOptions {
            channels: vec![Channel::Purcell],
            ..ReportOptions::default()
        };
        let r = build_report(6.4, 0.01, &Material::neon(), &trap, Some(&cav), &options).unwrap();
        assert!(r.channels[0].metadata.contains_key("warning"));
    }

    #[test]
    fn empty_channel_list() {
        let options = ReportOptions {
            channels: vec![],
            ..ReportOptions::default()
        };
        let r = at(6.4, &options);
        assert!(r.channels.is_empty());
        assert_eq!(r.t2_total, None);
        assert!(r.metadata.contains_key("t2_total"));
    }

    #[test]
    fn failures_do_not_abort_other_channels() {
        let trap = Trap::new(6.4, 7.0, 0.0, &K).unwrap();
        let r = build_report(6.4, 0.01, &Material::neon(), &trap, None, &ReportOptions::default()).unwrap();
        assert_eq!(r.channels.len(), 1);
        assert_eq!(r.channels[0].channel, Channel::Vacuum);
        assert_eq!(r.failures.len(), 2);
        assert!(build_report(5.0, 0.01, &Material::neon(), &trap, None, &ReportOptions::default()).is_err());
        assert!(build_report(6.4, -1.0, &Material::neon(), &trap, None, &ReportOptions::default()).is_err());
    }

    #[test]
    fn sweep_preserves_order_and_matches_single_point() {
        let options = ReportOptions {
            channels: vec![Channel::Vacuum, Channel::Displacement],
            ..ReportOptions::default()
        };
        let ctx = SweepContext::neon(0.010);
        let fs = [4.0, 1.0, 9.0, 2.5];
        let out = sweep(&fs, &ctx, &options).unwrap();
        for (f, r) in fs.iter().zip(&out) {
            assert_eq!(r.as_ref().unwrap().operating_point.f0_ghz, *f);
        }
        let single = sweep(&[4.0], &ctx, &options).unwrap().remove(0).unwrap();
        assert_eq!(single, ctx.report_at(4.0, &options).unwrap());
        assert!(sweep(&[], &ctx, &options).is_err());
        assert!(sweep(&[1.0, 0.0], &ctx, &options).is_err());
    }
}
