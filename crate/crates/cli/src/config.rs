//! Run configurations, one record per subcommand. Unknown keys are rejected;
//! complex numbers are written `[re, im]`.

use coulomb_edge::finitekernel::Constraint;
use coulomb_edge::limitkernels::Regime;
use coulomb_edge::potential::{PotentialSpec, RadialProfile};
use coulomb_edge::trialkernel::TrialOptions;
use coulomb_edge::Complex64;
use serde::{Deserialize, Serialize};

pub type Pt = [f64; 2];

pub fn cplx(p: Pt) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn ginibre_spec() -> PotentialSpec {
    PotentialSpec::Radial { profile: RadialProfile::Power, exponent: 2.0, coefficient: 1.0 }
}

fn origin() -> Pt {
    [0.0, 0.0]
}

fn half() -> f64 {
    0.5
}

/// Kernel names as written in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelName {
    G,
    H,
    B,
    #[serde(rename = "H_L")]
    HL,
}

impl KernelName {
    pub fn regime(self) -> Regime {
        match self {
            KernelName::G => Regime::BulkGinibre,
            KernelName::H => Regime::Soft,
            KernelName::B => Regime::Hard,
            KernelName::HL => Regime::SoftHard,
        }
    }
}

/// Square lattice `[min, max]²` with `points` nodes per side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl SquareGrid {
    pub fn nodes(&self) -> Vec<Complex64> {
        let last = self.points.saturating_sub(1).max(1) as f64;
        let xs: Vec<f64> = (0..self.points).map(|i| self.min + (self.max - self.min) * (i as f64 / last)).collect();
        xs.iter().flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Slice {
    /// `K(ζ, ζ)`.
    Diagonal,
    /// `K(ζ, η)` at fixed `η`.
    Section { eta: Pt },
    /// `K(ζ, η)` followed by `K(ζ + i·shift, η + i·shift)`.
    TangentialShift { eta: Pt, shift: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsConfig {
    pub kernel: KernelName,
    pub grid: SquareGrid,
    pub slice: Slice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Radial,
    Gram,
}

/// Lattice of spacing `spacing` inside the closed disc of radius `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairGrid {
    pub radius: f64,
    pub spacing: f64,
}

impl Default for PairGrid {
    fn default() -> Self {
        PairGrid { radius: 2.0, spacing: 0.5 }
    }
}

/// The droplet and edge point shared by `converge` and `trial`.
#[derive(Debug, Clone)]
pub struct EdgeSetup {
    pub regime: Regime,
    pub potential: PotentialSpec,
    pub hole_radius: f64,
    pub edge_angle: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub regime: Regime,
    #[serde(default = "ginibre_spec")]
    pub potential: PotentialSpec,
    /// Hard hole radius `r₀` (hard regime only).
    #[serde(default = "half")]
    pub hole_radius: f64,
    /// Argument of the edge point `z₀`.
    #[serde(default)]
    pub edge_angle: f64,
    pub n: Vec<usize>,
    #[serde(default)]
    pub grid: PairGrid,
    /// Final-error tolerance; defaults to 0.05 (soft, hard) or 0.08 (soft/hard).
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default = "radial")]
    pub basis: BasisKind,
    /// Radius of the polar quadrature for `basis = gram`.
    #[serde(default)]
    pub quadrature_radius: Option<f64>,
    #[serde(default)]
    pub precision_digits: Option<u32>,
    /// Compare `c_n K_n` with the limit as complex numbers instead of moduli.
    #[serde(default)]
    pub cocycle: bool,
}

fn radial() -> BasisKind {
    BasisKind::Radial
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialTolerances {
    /// Bound on `|local_compare|` at the last `n`; 0.1 (hard, soft) or 0.15
    /// (soft/hard) by default.
    #[serde(default)]
    pub local: Option<f64>,
    #[serde(default = "lower_tol")]
    pub lower_bound: f64,
}

fn lower_tol() -> f64 {
    0.15
}

impl Default for TrialTolerances {
    fn default() -> Self {
        TrialTolerances { local: None, lower_bound: lower_tol() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialConfig {
    pub regime: Regime,
    #[serde(default = "ginibre_spec")]
    pub potential: PotentialSpec,
    /// Hard hole radius `r₀` (hard regime only).
    #[serde(default = "half")]
    pub hole_radius: f64,
    /// Argument of the edge point `z₀`.
    #[serde(default)]
    pub edge_angle: f64,
    pub n: Vec<usize>,
    /// Point of the local comparison; defaults to 0 (hard, soft) or 1 (soft/hard).
    #[serde(default)]
    pub zeta: Option<Pt>,
    /// Point of the mass and lower-bound diagnostics.
    #[serde(default = "origin")]
    pub mass_zeta: Pt,
    #[serde(default)]
    pub options: TrialOptions,
    #[serde(default = "yes")]
    pub masses: bool,
    #[serde(default)]
    pub lower_bound: bool,
    #[serde(default)]
    pub tolerance: TrialTolerances,
    /// Points of the diagonal profile along the normal, spanning `±profile_width`
    /// in rescaled units.
    #[serde(default = "profile_points")]
    pub profile_points: usize,
    #[serde(default = "profile_width")]
    pub profile_width: f64,
}

fn yes() -> bool {
    true
}

fn profile_points() -> usize {
    81
}

fn profile_width() -> f64 {
    4.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    Annuli { radii: Vec<f64> },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    #[serde(default = "ginibre_spec")]
    pub potential: PotentialSpec,
    pub n: usize,
    #[serde(default)]
    pub constraint: Constraint,
    pub seed: u64,
    #[serde(default = "one")]
    pub runs: usize,
    /// Write every run's point cloud, not only the first.
    #[serde(default)]
    pub all_points: bool,
    #[serde(default)]
    pub density: Option<GridSpec>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalflineProfile {
    /// `1` on `[−1, 0]`.
    Indicator,
    /// `e^t`.
    Exp,
    /// `t e^t`.
    TExp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpacesTolerances {
    pub laplace: f64,
    pub bargmann: f64,
    pub a_hard: f64,
    pub h_c: f64,
    pub h_l: f64,
    pub psi: f64,
}

impl Default for SpacesTolerances {
    fn default() -> Self {
        SpacesTolerances { laplace: 1e-6, bargmann: 1e-5, a_hard: 1e-6, h_c: 1e-5, h_l: 1e-5, psi: 1e-8 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacesConfig {
    #[serde(default = "powers")]
    pub laplace_powers: Vec<i32>,
    #[serde(default = "halfline_profiles")]
    pub bargmann_profiles: Vec<HalflineProfile>,
    /// `(ζ, ξ)` pairs for the reproducing identities of all three spaces.
    #[serde(default = "pairs")]
    pub pairs: Vec<[Pt; 2]>,
    /// `(ζ, η)` pairs for the `H_L` kernel cross-check of `Ψ`.
    #[serde(default = "pairs")]
    pub psi_pairs: Vec<[Pt; 2]>,
    #[serde(default)]
    pub tolerance: SpacesTolerances,
}

fn powers() -> Vec<i32> {
    vec![1, 2, 3]
}

fn halfline_profiles() -> Vec<HalflineProfile> {
    vec![HalflineProfile::Indicator, HalflineProfile::Exp, HalflineProfile::TExp]
}

fn pairs() -> Vec<[Pt; 2]> {
    vec![[[0.0, 0.0], [0.0, 0.0]], [[0.5, 1.0], [1.5, -2.0]], [[1.0, 0.5], [0.3, -1.0]]]
}

impl ConvergeConfig {
    pub fn setup(&self) -> EdgeSetup {
        EdgeSetup { regime: self.regime, potential: self.potential.clone(), hole_radius: self.hole_radius, edge_angle: self.edge_angle }
    }
}

impl TrialConfig {
    pub fn setup(&self) -> EdgeSetup {
        EdgeSetup { regime: self.regime, potential: self.potential.clone(), hole_radius: self.hole_radius, edge_angle: self.edge_angle }
    }
}
