//! Frozen statistical thresholds shared by the analytics reports and the
//! acceptance suite. Changing a value here changes what "pass" means, so
//! values are fixed once and reruns stay comparable.

/// Minimum number of tail samples for the power-law MLE.
pub const MIN_TAIL_SAMPLES: u64 = 1000;

/// Default `dmin` for the power-law MLE.
pub const DEFAULT_DMIN: u64 = 10;

/// Prefix sums: the 1st percentile of `S_i(t)/(t^γ i^{1-γ})` must exceed
/// this fraction of the mean.
pub const PREFIX_LOWER_TAIL_FRACTION: f64 = 0.3;

/// Band for the mean of `S_i(t)/(t^γ i^{1-γ})`.
pub const PREFIX_MEAN_BAND: (f64, f64) = (0.5, 8.0);

/// Allowed drift of the normalised prefix mean between two horizons.
pub const PREFIX_MEAN_STABILITY: f64 = 1.25;

/// Longest cycle enumerated by the structure census.
pub const MAX_CENSUS_CYCLE: usize = 8;

/// Largest graph accepted by the joint-edge Monte-Carlo.
pub const JOINT_EDGE_MAX_T: usize = 500;

/// Below this many samples a zero estimate is flagged inconclusive.
pub const JOINT_EDGE_CONCLUSIVE_SAMPLES: u64 = 100_000;

/// Allowed spread of the implied joint-edge constant across `j`.
pub const JOINT_EDGE_M_SPREAD: f64 = 2.0;

/// Weight-function bound: tail ratio may not exceed this multiple of the
/// head ratio.
pub const BOUND_RATIO_FACTOR: f64 = 2.0;

/// Coupling check: bins need this many samples to be compared.
pub const COUPLING_MIN_BIN_SAMPLES: u64 = 500;

/// Coupling check: largest admissible per-bin TV distance.
pub const COUPLING_MAX_TV: f64 = 0.02;

/// Construction equivalence: largest admissible TV distance.
pub const CONSTRUCTION_MAX_TV: f64 = 0.01;

/// Urn pmf against the brute-force oracle.
pub const URN_EXACT_TOL: f64 = 1e-9;

/// Degree scaling slope tolerance around γ.
pub const SCALING_SLOPE_TOL: f64 = 0.05;

/// Power-law exponent tolerance around `3 + δ/m`.
pub const EXPONENT_TOL: f64 = 0.15;

/// Weight-function log-log slope tolerance.
pub const WEIGHT_SLOPE_TOL: f64 = 0.1;

/// Quadrature against the closed form for `k = 0`.
pub const INTEGRAL_CLOSED_FORM_TOL: f64 = 1e-8;

/// Supercritical: minimum full-infection fraction.
pub const SUPERCRITICAL_FULL_FRACTION: f64 = 0.9;

/// Subcritical (ii): median growth ratio cap and round-compliance fraction.
pub const SUBCRITICAL_II_MEDIAN_RATIO: f64 = 1.05;
pub const SUBCRITICAL_II_ROUND_FRACTION: f64 = 0.9;

/// Subcritical (iii): median growth ratio cap and round-compliance fraction.
pub const SUBCRITICAL_III_MEDIAN_RATIO: f64 = 1.10;
pub const SUBCRITICAL_III_ROUND_FRACTION: f64 = 0.85;

/// λ-grid: minimum rise of the full fraction from the smallest to the
/// largest λ, and the largest allowed drop between neighbours.
pub const LAMBDA_MIN_RISE: f64 = 0.5;
pub const LAMBDA_MAX_DROP: f64 = 0.15;

/// Critical case: "no growth" outcome means ratio at most this.
pub const CRITICAL_STALL_RATIO: f64 = 1.1;

/// Core round-1 check: fraction of seeds with the whole core infected.
pub const CORE_ROUND1_FRACTION: f64 = 0.9;

/// Census: fraction of seeds with no late multi-loop vertex.
pub const CENSUS_CLEAN_FRACTION: f64 = 0.95;
