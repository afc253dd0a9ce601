//! Closed-form efficiency expressions and bounds for both directions.
//!
//! Downlink: the exact forwarding efficiency, its upper bound, and the
//! network-coding lower bound, all driven by the per-relay erasure
//! vector. Uplink: the forwarding backhaul approximation (clamped and
//! raw), and the network-coding backhaul lower bound built from the
//! series over required backhaul transmissions. The series needs the
//! singularity bound `phi_ub = log_q(lbar + 1)`, where `lbar` is the
//! expected number of linear dependencies among the rows of a random
//! matrix whose entries are 0 with probability p and uniform nonzero
//! otherwise. An empirical singularity estimator (`phi_oracle`) and an
//! exact enumerator for tiny fields (`phi_enumerate`) sit alongside the
//! analytic bound so the chain can be validated end to end.

use crate::gf::{FieldContext, FieldElement};
use crate::rlnc::matrix_rank;
use num_bigint::BigUint;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("erasure probability {0} is outside the supported range")]
    BadErasure(f64),
    #[error("a link with erasure probability 1 admits no finite transmission count")]
    ErasureAtOne,
    #[error("all links erased with certainty: expected attempts diverge")]
    NoUsableLink,
    #[error("scenario must have at least one relay and one packet")]
    DegenerateScenario,
    #[error("the network-coding backhaul bound requires symmetric erasure probabilities")]
    AsymmetricErasures,
    #[error("series argument phi={0} must lie in [0, 1)")]
    InfeasiblePhi(f64),
}

// ============================================================================
// Scenario descriptions
// ============================================================================

/// One device served by N relays with per-relay erasure probabilities.
#[derive(Debug, Clone)]
pub struct DownlinkScenario {
    pub packets_per_span: u64,
    pub erasures: Vec<f64>,
}

impl DownlinkScenario {
    pub fn new(packets_per_span: u64, erasures: Vec<f64>) -> Result<Self, BoundsError> {
        if packets_per_span == 0 || erasures.is_empty() {
            return Err(BoundsError::DegenerateScenario);
        }
        for &p in &erasures {
            if !(0.0..=1.0).contains(&p) {
                return Err(BoundsError::BadErasure(p));
            }
        }
        Ok(DownlinkScenario {
            packets_per_span,
            erasures,
        })
    }

    pub fn relay_count(&self) -> usize {
        self.erasures.len()
    }

    fn sum_success(&self) -> f64 {
        self.erasures.iter().map(|p| 1.0 - p).sum()
    }
}

/// Per-link erasures for z devices and N relays.
#[derive(Debug, Clone)]
pub enum ErasureSpec {
    /// Every device-relay link has the same erasure probability.
    Symmetric(f64),
    /// Explicit matrix, rows = devices, columns = relays.
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone)]
pub struct UplinkScenario {
    pub devices: usize,
    pub relays: usize,
    pub erasures: ErasureSpec,
}

impl UplinkScenario {
    pub fn symmetric(devices: usize, relays: usize, p: f64) -> Result<Self, BoundsError> {
        if devices == 0 || relays == 0 {
            return Err(BoundsError::DegenerateScenario);
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(BoundsError::BadErasure(p));
        }
        Ok(UplinkScenario {
            devices,
            relays,
            erasures: ErasureSpec::Symmetric(p),
        })
    }

    pub fn with_matrix(matrix: Vec<Vec<f64>>) -> Result<Self, BoundsError> {
        let devices = matrix.len();
        let relays = matrix.first().map_or(0, |r| r.len());
        if devices == 0 || relays == 0 {
            return Err(BoundsError::DegenerateScenario);
        }
        for row in &matrix {
            if row.len() != relays {
                return Err(BoundsError::DegenerateScenario);
            }
            for &p in row {
                if !(0.0..=1.0).contains(&p) {
                    return Err(BoundsError::BadErasure(p));
                }
            }
        }
        Ok(UplinkScenario {
            devices,
            relays,
            erasures: ErasureSpec::Matrix(matrix),
        })
    }

    fn erasure_row(&self, device: usize) -> Vec<f64> {
        match &self.erasures {
            ErasureSpec::Symmetric(p) => vec![*p; self.relays],
            ErasureSpec::Matrix(m) => m[device].clone(),
        }
    }
}

// ============================================================================
// Downlink efficiencies
// ============================================================================

/// Exact forwarding efficiency:
/// k / (ceil(k/N) * sum over relays of 1/(1-p_i)).
pub fn eff_forwarding(s: &DownlinkScenario) -> Result<f64, BoundsError> {
    let k = s.packets_per_span;
    let n = s.relay_count() as u64;
    let mut inv_sum = 0.0;
    for &p in &s.erasures {
        if p >= 1.0 {
            return Err(BoundsError::ErasureAtOne);
        }
        inv_sum += 1.0 / (1.0 - p);
    }
    Ok(k as f64 / (k.div_ceil(n) as f64 * inv_sum))
}

/// Forwarding upper bound: the harmonic mean of the link success
/// probabilities, N / sum of 1/(1-p_i). Dominates `eff_forwarding` for
/// every k.
pub fn eff_forwarding_ub(s: &DownlinkScenario) -> Result<f64, BoundsError> {
    let mut inv_sum = 0.0;
    for &p in &s.erasures {
        if p >= 1.0 {
            return Err(BoundsError::ErasureAtOne);
        }
        inv_sum += 1.0 / (1.0 - p);
    }
    Ok(s.relay_count() as f64 / inv_sum)
}

/// Network-coding lower bound: the arithmetic mean of (1-p_i).
pub fn eff_nc_lb(s: &DownlinkScenario) -> f64 {
    s.sum_success() / s.relay_count() as f64
}

/// Expected network-coding efficiency for a given total transmission
/// count L: ceil(L/N) * sum(1-p_i) / L.
pub fn eff_nc_expected(s: &DownlinkScenario, total_transmissions: u64) -> f64 {
    let n = s.relay_count() as u64;
    let rounds = total_transmissions.div_ceil(n);
    rounds as f64 * s.sum_success() / total_transmissions as f64
}

/// Smallest transmission count delivering k packets in expectation.
///
/// Transmissions are spread uniformly over the relays, so L advances in
/// whole rounds of N; the smallest such L has
/// ceil(L/N) * sum(1-p_i) >= k.
pub fn required_transmissions(s: &DownlinkScenario) -> u64 {
    let n = s.relay_count() as u64;
    let per_round = s.sum_success();
    let rounds = (s.packets_per_span as f64 / per_round).ceil() as u64;
    rounds.max(1) * n
}

// ============================================================================
// Uplink forwarding backhaul
// ============================================================================

/// Expected air transmissions until at least one relay holds the packet:
/// 1 / (1 - prod of p_ij over the row).
pub fn expected_device_attempts(erasure_row: &[f64]) -> Result<f64, BoundsError> {
    let product: f64 = erasure_row.iter().product();
    if product >= 1.0 {
        return Err(BoundsError::NoUsableLink);
    }
    Ok(1.0 / (1.0 - product))
}

/// Forwarding backhaul efficiency approximation, both the raw value and
/// the per-device clamped one (a packet is forwarded at least once, so
/// each device contributes at least one backhaul transmission).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardingBackhaul {
    /// Per-device sums clamped below at 1.
    pub clamped: f64,
    /// Raw approximation; can exceed 1 near p = 1 with few relays.
    pub unclamped: f64,
}

pub fn bkeff_forwarding(s: &UplinkScenario) -> Result<ForwardingBackhaul, BoundsError> {
    let z = s.devices as f64;
    let mut sum_clamped = 0.0;
    let mut sum_raw = 0.0;
    for device in 0..s.devices {
        let row = s.erasure_row(device);
        let attempts = expected_device_attempts(&row)?;
        let copies: f64 = row.iter().map(|&p| 1.0 - p.powf(attempts)).sum();
        sum_raw += copies;
        sum_clamped += copies.max(1.0);
    }
    Ok(ForwardingBackhaul {
        clamped: z / sum_clamped,
        unclamped: z / sum_raw,
    })
}

/// Closed form of the clamped approximation when every link has the
/// same erasure probability: min[1, 1/(N(1 - p^(1/(1-p^N))))].
pub fn bkeff_forwarding_symmetric(relays: usize, p: f64) -> Result<f64, BoundsError> {
    let s = UplinkScenario::symmetric(1, relays, p)?;
    Ok(bkeff_forwarding(&s)?.clamped)
}

// ============================================================================
// Network-coding backhaul bound
// ============================================================================

/// Number of z-row subsets available after z+l arrivals: C(z+l, z),
/// with the l = -1 convention of 0.
pub fn zeta(z: u64, l: i64) -> BigUint {
    if l < 0 {
        return BigUint::ZERO;
    }
    binomial(z + l as u64, z)
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k.min(n));
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Expected number of linear dependencies among the rows of a z-by-z
/// matrix with entries drawn 0 w.p. p, uniform nonzero otherwise:
///
///   sum over k=1..z of C(z,k) q^(k-z) (1-1/q)^k [1 + (q-1) u^k]^z,
///   u = 1 - q(1-p)/(q-1).
pub fn lbar(z: u64, q: u64, p: f64) -> f64 {
    debug_assert!(q >= 2);
    debug_assert!((0.0..=1.0).contains(&p));
    let qf = q as f64;
    let u = 1.0 - qf * (1.0 - p) / (qf - 1.0);
    let mut total = 0.0;
    for k in 1..=z {
        let choose = biguint_to_f64(&binomial(z, k));
        let weight = choose * qf.powi(k as i32 - z as i32) * (1.0 - 1.0 / qf).powi(k as i32);
        let column = 1.0 + (qf - 1.0) * u.powi(k as i32);
        total += weight * column.powi(z as i32);
    }
    total
}

/// Upper bound on the singularity probability of the random matrix:
/// log_q(lbar + 1). The backhaul bound is usable only where this is
/// below 1.
pub fn phi_ub(z: u64, q: u64, p: f64) -> f64 {
    (lbar(z, q, p) + 1.0).ln() / (q as f64).ln()
}

/// Truncation controls for the backhaul transmission series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesControl {
    /// Stop once the certified tail bound falls below this fraction of
    /// the running sum.
    pub relative_tolerance: f64,
    pub max_terms: u64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            relative_tolerance: 1e-12,
            max_terms: 1_000_000,
        }
    }
}

/// A truncated series evaluation together with its certified tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Upper bound on the dropped tail.
    pub tail_bound: f64,
    pub terms_used: u64,
}

/// phi^zeta with the exponent held as a big integer: evaluated in log
/// space so huge exponents underflow to zero instead of misbehaving.
fn phi_pow(phi: f64, exponent: &BigUint) -> f64 {
    if exponent == &BigUint::ZERO {
        return 1.0;
    }
    if phi == 0.0 {
        return 0.0;
    }
    let e = biguint_to_f64(exponent);
    (e * phi.ln()).exp()
}

fn biguint_to_f64(x: &BigUint) -> f64 {
    // Saturates to infinity beyond f64 range, which is what the
    // log-space exponentiation wants.
    let s = x.to_string();
    s.parse::<f64>().unwrap_or(f64::INFINITY)
}

/// Expected backhaul transmissions until the network can decode all z
/// uplink packets, as the series
///
///   sum over l >= 0 of (z+l) [1 - phi^(zeta(l)-zeta(l-1))] phi^zeta(l-1)
///
/// evaluated term by term until the certified tail bound drops below
/// the requested tolerance. The tail after stopping at term L is
/// bounded by (z+L+1) phi^zeta(L) + phi^zeta(L+1) / (1-phi).
pub fn beta_nc(z: u64, phi: f64, control: SeriesControl) -> Result<SeriesValue, BoundsError> {
    if !(0.0..1.0).contains(&phi) {
        return Err(BoundsError::InfeasiblePhi(phi));
    }
    let mut sum = 0.0;
    let mut pow_prev = 1.0; // phi^zeta(-1) = phi^0
    for l in 0..control.max_terms {
        let pow_cur = phi_pow(phi, &zeta(z, l as i64));
        // (z+l) [1 - phi^(zeta(l)-zeta(l-1))] phi^zeta(l-1)
        //   = (z+l) (phi^zeta(l-1) - phi^zeta(l))
        let term = (z + l) as f64 * (pow_prev - pow_cur);
        sum += term;
        let pow_next = phi_pow(phi, &zeta(z, l as i64 + 1));
        let tail = (z + l + 1) as f64 * pow_cur + pow_next / (1.0 - phi);
        if tail <= control.relative_tolerance * sum {
            return Ok(SeriesValue {
                value: sum,
                tail_bound: tail,
                terms_used: l + 1,
            });
        }
        pow_prev = pow_cur;
    }
    let tail = (z + control.max_terms) as f64 * pow_prev / (1.0 - phi);
    Ok(SeriesValue {
        value: sum,
        tail_bound: tail,
        terms_used: control.max_terms,
    })
}

/// The network-coding backhaul efficiency bound, or the reason it does
/// not exist at these parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackhaulBound {
    Defined {
        efficiency: f64,
        phi_ub: f64,
        /// Series value the bound divides by (after the N > z clamp).
        expected_transmissions: f64,
        tail_bound: f64,
    },
    /// phi_ub >= 1: the bound is undefined at this erasure probability.
    Undefined { phi_ub: f64 },
}

impl BackhaulBound {
    pub fn efficiency(&self) -> Option<f64> {
        match self {
            BackhaulBound::Defined { efficiency, .. } => Some(*efficiency),
            BackhaulBound::Undefined { .. } => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, BackhaulBound::Defined { .. })
    }
}

/// Lower bound on the uplink network-coding backhaul efficiency for
/// symmetric link erasures: z / beta_nc(phi_ub), with the denominator
/// clamped below at N when more relays than devices all fire in a round.
/// Asymmetric erasures are rejected; no bound is derived for them.
pub fn bkeff_nc_lb(
    s: &UplinkScenario,
    q: u64,
    control: SeriesControl,
) -> Result<BackhaulBound, BoundsError> {
    let p = match &s.erasures {
        ErasureSpec::Symmetric(p) => *p,
        ErasureSpec::Matrix(m) => {
            let first = m[0][0];
            if m.iter().flatten().any(|&x| x != first) {
                return Err(BoundsError::AsymmetricErasures);
            }
            first
        }
    };
    let z = s.devices as u64;
    let bound = phi_ub(z, q, p);
    if bound >= 1.0 {
        return Ok(BackhaulBound::Undefined { phi_ub: bound });
    }
    let series = beta_nc(z, bound, control)?;
    let denom = if s.relays as u64 > z {
        (s.relays as f64).max(series.value)
    } else {
        series.value
    };
    Ok(BackhaulBound::Defined {
        efficiency: z as f64 / denom,
        phi_ub: bound,
        expected_transmissions: denom,
        tail_bound: series.tail_bound,
    })
}

// ============================================================================
// Empirical singularity probability
// ============================================================================

/// Monte-Carlo estimate of the probability that a z-by-z matrix with
/// i.i.d. entries (0 w.p. p, uniform nonzero otherwise) is singular.
pub fn phi_oracle<R: Rng + ?Sized>(
    field: &FieldContext,
    z: usize,
    p: f64,
    trials: u64,
    rng: &mut R,
) -> f64 {
    let mut singular = 0u64;
    let mut rows: Vec<Vec<FieldElement>> = vec![vec![FieldElement::ZERO; z]; z];
    for _ in 0..trials {
        for row in rows.iter_mut() {
            for x in row.iter_mut() {
                *x = field.sample_omega(p, rng);
            }
        }
        if matrix_rank(field, &rows) < z {
            singular += 1;
        }
    }
    singular as f64 / trials as f64
}

/// Exact singularity probability by enumerating all q^(z^2) matrices,
/// weighting each by its probability under the entry distribution.
/// Only sensible for tiny z and q.
pub fn phi_enumerate(field: &FieldContext, z: usize, p: f64) -> f64 {
    let q = field.size() as u64;
    let cells = z * z;
    let total: u64 = q.pow(cells as u32);
    let nonzero_weight = if q > 1 {
        (1.0 - p) / (q - 1) as f64
    } else {
        0.0
    };
    let mut singular_mass = 0.0;
    let mut rows: Vec<Vec<FieldElement>> = vec![vec![FieldElement::ZERO; z]; z];
    for code in 0..total {
        let mut c = code;
        let mut weight = 1.0;
        for i in 0..cells {
            let v = (c % q) as u16;
            c /= q;
            rows[i / z][i % z] = FieldElement(v);
            weight *= if v == 0 { p } else { nonzero_weight };
        }
        if matrix_rank(field, &rows) < z {
            singular_mass += weight;
        }
    }
    singular_mass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldContext;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dl(k: u64, p: &[f64]) -> DownlinkScenario {
        DownlinkScenario::new(k, p.to_vec()).unwrap()
    }

    #[test]
    fn forwarding_efficiency_hand_values() {
        let s = dl(4, &[0.1, 0.1]);
        assert!((eff_forwarding(&s).unwrap() - 0.9).abs() < 1e-12);
        // Ceiling bites: k=3, N=2, p=0 gives 3/4.
        let s = dl(3, &[0.0, 0.0]);
        assert!((eff_forwarding(&s).unwrap() - 0.75).abs() < 1e-12);
        // k = N error-free is one transmission per packet.
        let s = dl(2, &[0.0, 0.0]);
        assert!((eff_forwarding(&s).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            eff_forwarding(&dl(1, &[1.0])).unwrap_err(),
            BoundsError::ErasureAtOne
        );
    }

    #[test]
    fn forwarding_upper_bound_values() {
        let s = dl(1, &[0.1, 0.6]);
        let ub = eff_forwarding_ub(&s).unwrap();
        assert!((ub - 2.0 / (1.0 / 0.9 + 1.0 / 0.4)).abs() < 1e-12);
        assert!((ub - 0.553846153846).abs() < 1e-9);
        // Symmetric erasures collapse to 1 - p.
        let s = dl(5, &[0.3, 0.3, 0.3]);
        assert!((eff_forwarding_ub(&s).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_dominates_exact_for_all_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.95)).collect();
            for k in 1..=20 {
                let s = dl(k, &p);
                assert!(eff_forwarding(&s).unwrap() <= eff_forwarding_ub(&s).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn nc_lower_bound_values() {
        let s = dl(1, &[0.1, 0.6]);
        assert!((eff_nc_lb(&s) - 0.65).abs() < 1e-12);
        assert!((eff_nc_lb(&dl(1, &[0.0, 0.0])) - 1.0).abs() < 1e-12);
        // Symmetric p: equals the forwarding upper bound exactly.
        let s = dl(1, &[0.25, 0.25, 0.25, 0.25]);
        assert_eq!(eff_nc_lb(&s), eff_forwarding_ub(&s).unwrap());
    }

    #[test]
    fn nc_expected_and_transmission_solver() {
        // L a multiple of N meets the lower bound with equality.
        let s = dl(13, &[0.1, 0.6]);
        assert!((eff_nc_expected(&s, 20) - 0.65).abs() < 1e-12);
        assert_eq!(required_transmissions(&s), 20);
        // k below the per-round delivery: a single round suffices.
        let s = dl(1, &[0.1, 0.6]);
        assert_eq!(required_transmissions(&s), 2);
    }

    #[test]
    fn device_attempts_values() {
        assert!((expected_device_attempts(&[0.0, 0.9]).unwrap() - 1.0).abs() < 1e-12);
        assert!((expected_device_attempts(&[0.5, 0.5]).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!((expected_device_attempts(&[0.9]).unwrap() - 10.0).abs() < 1e-9);
        assert_eq!(
            expected_device_attempts(&[1.0, 1.0]).unwrap_err(),
            BoundsError::NoUsableLink
        );
    }

    #[test]
    fn forwarding_backhaul_error_free_and_single_relay() {
        // p = 0 everywhere: every relay holds every packet, so z*N
        // backhaul transmissions give efficiency 1/N.
        let s = UplinkScenario::symmetric(4, 5, 0.0).unwrap();
        let b = bkeff_forwarding(&s).unwrap();
        assert!((b.clamped - 0.2).abs() < 1e-12);
        assert!((b.unclamped - 0.2).abs() < 1e-12);
        // Single relay: exactly one copy per packet, clamp active.
        let s = UplinkScenario::symmetric(3, 1, 0.7).unwrap();
        assert!((bkeff_forwarding(&s).unwrap().clamped - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forwarding_backhaul_matches_symmetric_closed_form() {
        for &n in &[2usize, 4, 8] {
            for &p in &[0.1, 0.4, 0.7, 0.95] {
                let s = UplinkScenario::symmetric(6, n, p).unwrap();
                let general = bkeff_forwarding(&s).unwrap().clamped;
                let attempts = 1.0 / (1.0 - p.powi(n as i32));
                let closed = (1.0 / (n as f64 * (1.0 - p.powf(attempts)))).min(1.0);
                assert!((general - closed).abs() < 1e-12, "n={n} p={p}");
                assert!((bkeff_forwarding_symmetric(n, p).unwrap() - closed).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unclamped_exceeds_one_near_total_erasure() {
        // Small N, p near 1: raw approximation crosses 1, clamp restores it.
        let s = UplinkScenario::symmetric(2, 2, 0.99).unwrap();
        let b = bkeff_forwarding(&s).unwrap();
        assert!(b.unclamped > 1.0, "unclamped={}", b.unclamped);
        assert!(b.clamped <= 1.0);
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta(4, -1), BigUint::ZERO);
        assert_eq!(zeta(4, 0), BigUint::from(1u32));
        assert_eq!(zeta(4, 1), BigUint::from(5u32));
        assert_eq!(zeta(4, 2), BigUint::from(15u32));
        assert_eq!(zeta(12, 5), binomial(17, 12));
    }

    #[test]
    fn lbar_degenerate_matrix() {
        // p = 1: the all-zero matrix, every nonzero vector is a
        // dependency, q^z - 1 of them. Exact in f64 for small fields.
        assert_eq!(lbar(2, 2, 1.0), 3.0);
        assert_eq!(lbar(3, 4, 1.0), 63.0);
        assert_eq!(lbar(4, 16, 1.0), 65535.0);
        let big = lbar(4, 1024, 1.0);
        let expect = 1024f64.powi(4) - 1.0;
        assert!((big - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn lbar_uniform_case_matches_hand_enumeration() {
        // q=2, p=0.5 makes every matrix equally likely; averaging the
        // dependency counts over all 16 two-by-two matrices gives 0.75.
        assert!((lbar(2, 2, 0.5) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn lbar_monotone_above_one_over_q() {
        // Increasing in p once p >= 1/q (below that the character term
        // is negative and tiny oscillations are possible).
        for &(z, q) in &[(2u64, 2u64), (4, 2), (4, 16), (4, 1024), (12, 1024)] {
            let start = 1.0 / q as f64;
            let mut prev = lbar(z, q, start);
            for i in 1..=40 {
                let p = start + (1.0 - start) * i as f64 / 40.0;
                let cur = lbar(z, q, p);
                assert!(cur + 1e-9 >= prev, "z={z} q={q} p={p}");
                prev = cur;
            }
        }
    }

    #[test]
    fn lbar_nonnegative_everywhere() {
        for &(z, q) in &[(2u64, 2u64), (3, 4), (4, 16), (4, 1024)] {
            for i in 0..=20 {
                let p = i as f64 / 20.0;
                assert!(lbar(z, q, p) >= -1e-12, "z={z} q={q} p={p}");
            }
        }
    }

    #[test]
    fn phi_ub_edges() {
        // p=1: log_q(q^z) = z, far beyond the feasibility frontier.
        assert!((phi_ub(3, 4, 1.0) - 3.0).abs() < 1e-9);
        // At p ~ 0 the full-support dependency vectors keep lbar near
        // (1-1/q)^z, so phi_ub levels off at about log_q(2).
        let floor = 2f64.ln() / 1024f64.ln();
        assert!((phi_ub(4, 1024, 0.001) - floor).abs() < 0.01);
        // Known hand value: lbar(2,2,0.5) = 0.75.
        assert!((phi_ub(2, 2, 0.5) - 1.75f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn feasible_range_widens_with_code_length() {
        let frontier = |z: u64| {
            let mut last = 0.0;
            for i in 0..1000 {
                let p = i as f64 / 1000.0;
                if phi_ub(z, 1024, p) < 1.0 {
                    last = p;
                } else {
                    break;
                }
            }
            last
        };
        let f4 = frontier(4);
        let f12 = frontier(12);
        assert!(f4 > 0.1, "z=4 frontier {f4}");
        assert!(f12 > f4 + 0.05, "z=12 frontier {f12} vs z=4 {f4}");
    }

    #[test]
    fn beta_nc_at_zero_is_z() {
        for z in [1u64, 4, 12] {
            let v = beta_nc(z, 0.0, SeriesControl::default()).unwrap();
            assert_eq!(v.value, z as f64);
            assert_eq!(v.tail_bound, 0.0);
        }
    }

    #[test]
    fn beta_nc_rejects_phi_out_of_range() {
        assert!(matches!(
            beta_nc(4, 1.0, SeriesControl::default()).unwrap_err(),
            BoundsError::InfeasiblePhi(_)
        ));
        assert!(beta_nc(4, -0.1, SeriesControl::default()).is_err());
    }

    #[test]
    fn beta_nc_monotone_in_phi() {
        for z in [2u64, 4, 12] {
            let mut prev = 0.0;
            for i in 0..100 {
                let phi = i as f64 / 100.0;
                let v = beta_nc(z, phi, SeriesControl::default()).unwrap().value;
                assert!(v + 1e-9 >= prev, "z={z} phi={phi}");
                prev = v;
            }
        }
    }

    #[test]
    fn beta_nc_tail_certificate() {
        for &phi in &[0.1, 0.5, 0.9, 0.99] {
            let v = beta_nc(4, phi, SeriesControl::default()).unwrap();
            assert!(v.tail_bound >= 0.0);
            assert!(v.tail_bound <= 1e-12 * v.value.max(1.0));
        }
    }

    #[test]
    fn backhaul_bound_edges() {
        // Tiny p: bound close to 1 (phi_ub floors at ~log_q(2), so the
        // bound tops out near z / (z + 2 phi_ub) rather than at 1).
        let s = UplinkScenario::symmetric(4, 4, 0.001).unwrap();
        let b = bkeff_nc_lb(&s, 1024, SeriesControl::default()).unwrap();
        assert!(b.efficiency().unwrap() > 0.95);
        // Beyond the frontier: undefined.
        let s = UplinkScenario::symmetric(4, 4, 0.9).unwrap();
        let b = bkeff_nc_lb(&s, 1024, SeriesControl::default()).unwrap();
        assert!(!b.is_defined());
        // N > z with small p: clamped to z/N.
        let s = UplinkScenario::symmetric(4, 8, 0.001).unwrap();
        let b = bkeff_nc_lb(&s, 1024, SeriesControl::default()).unwrap();
        assert!((b.efficiency().unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn backhaul_bound_rejects_asymmetric() {
        let s = UplinkScenario::with_matrix(vec![vec![0.1, 0.2], vec![0.1, 0.1]]).unwrap();
        assert_eq!(
            bkeff_nc_lb(&s, 1024, SeriesControl::default()).unwrap_err(),
            BoundsError::AsymmetricErasures
        );
        // A constant matrix is accepted as symmetric.
        let s = UplinkScenario::with_matrix(vec![vec![0.1, 0.1], vec![0.1, 0.1]]).unwrap();
        assert!(bkeff_nc_lb(&s, 1024, SeriesControl::default()).is_ok());
    }

    #[test]
    fn phi_enumerate_uniform_gf2() {
        // Entries uniform on GF(2): 6 of 16 matrices invertible.
        let gf = FieldContext::new(2).unwrap();
        assert!((phi_enumerate(&gf, 2, 0.5) - 0.625).abs() < 1e-12);
    }

    #[test]
    fn phi_enumerate_degenerate() {
        let gf = FieldContext::new(4).unwrap();
        assert!((phi_enumerate(&gf, 2, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi_oracle_tracks_enumeration() {
        let gf = FieldContext::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let trials = 100_000;
        let hat = phi_oracle(&gf, 2, 0.5, trials, &mut rng);
        let exact = 0.625;
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((hat - exact).abs() < 3.0 * sigma, "hat={hat}");
    }

    #[test]
    fn phi_oracle_below_phi_ub_on_feasible_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for &(z, q) in &[(2usize, 2u32), (2, 16), (3, 4)] {
            let gf = FieldContext::new(q).unwrap();
            for &p in &[0.1, 0.3, 0.5] {
                let ub = phi_ub(z as u64, q as u64, p);
                if ub >= 1.0 {
                    continue;
                }
                let trials = 30_000;
                let hat = phi_oracle(&gf, z, p, trials, &mut rng);
                let sigma = (hat.max(1e-4) * (1.0 - hat.max(1e-4)) / trials as f64).sqrt();
                assert!(hat <= ub + 3.0 * sigma, "z={z} q={q} p={p}: {hat} > {ub}");
            }
        }
    }

    /// Independent route for lbar: enumerate every matrix, count its
    /// dependencies directly from the definition, and average.
    fn lbar_by_enumeration(q: u32, z: usize, p: f64) -> f64 {
        let gf = FieldContext::new(q).unwrap();
        let cells = z * z;
        let total = (q as u64).pow(cells as u32);
        let nonzero_weight = (1.0 - p) / (q as f64 - 1.0);
        let mut acc = 0.0;
        for code in 0..total {
            let mut c = code;
            let mut weight = 1.0;
            let mut rows = vec![vec![FieldElement::ZERO; z]; z];
            for i in 0..cells {
                let v = (c % q as u64) as u16;
                c /= q as u64;
                rows[i / z][i % z] = FieldElement(v);
                weight *= if v == 0 { p } else { nonzero_weight };
            }
            // Count nonzero coefficient vectors annihilating the rows.
            let mut deps = 0u64;
            for combo in 1..(q as u64).pow(z as u32) {
                let mut cc = combo;
                let mut sum = vec![FieldElement::ZERO; z];
                for row in rows.iter() {
                    let coeff = FieldElement((cc % q as u64) as u16);
                    cc /= q as u64;
                    for (s, &r) in sum.iter_mut().zip(row) {
                        *s = gf.add(*s, gf.mul(coeff, r));
                    }
                }
                if sum.iter().all(|x| x.is_zero()) {
                    deps += 1;
                }
            }
            acc += weight * deps as f64;
        }
        acc
    }

    #[test]
    fn lbar_matches_dependency_enumeration() {
        for &(q, z, p) in &[
            (2u32, 2usize, 0.5),
            (2, 2, 0.3),
            (2, 3, 0.6),
            (4, 2, 0.25),
            (4, 2, 0.8),
        ] {
            let direct = lbar(z as u64, q as u64, p);
            let enumerated = lbar_by_enumeration(q, z, p);
            assert!(
                (direct - enumerated).abs() < 1e-10,
                "q={q} z={z} p={p}: {direct} vs {enumerated}"
            );
        }
    }
}
