//! Street-canyon topology: staggered relays on both street edges,
//! devices dropped uniformly on the sidewalks.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DeploymentError {
    #[error("at least one relay is required")]
    NoRelays,
    #[error("inter-relay distance must be positive")]
    BadSpacing,
    #[error("street layout has zero length; need at least two relays")]
    ZeroLength,
    #[error("sidewalk inset {inset} does not fit a street of width {width}")]
    BadSidewalk { inset: f64, width: f64 },
}

/// A point in the 2-D street plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    /// Euclidean distance.
    pub fn distance(&self, other: Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Street geometry: relays evenly spaced on both sides, side B shifted
/// by half the spacing, sidewalks inset from each edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreetScenario {
    pub relay_count: u32,
    pub relay_spacing_m: f64,
    pub street_width_m: f64,
    pub sidewalk_inset_m: f64,
    pub device_count: u32,
}

impl StreetScenario {
    pub fn validate(&self) -> Result<(), DeploymentError> {
        if self.relay_count == 0 {
            return Err(DeploymentError::NoRelays);
        }
        if self.relay_spacing_m <= 0.0 {
            return Err(DeploymentError::BadSpacing);
        }
        if self.sidewalk_inset_m < 0.0 || 2.0 * self.sidewalk_inset_m > self.street_width_m {
            return Err(DeploymentError::BadSidewalk {
                inset: self.sidewalk_inset_m,
                width: self.street_width_m,
            });
        }
        Ok(())
    }

    /// Relay counts per side; side A takes the extra relay when the
    /// total is odd.
    fn side_counts(&self) -> (u32, u32) {
        let a = self.relay_count.div_ceil(2);
        (a, self.relay_count - a)
    }

    /// Extent of the staggered relay grid along the street; devices are
    /// dropped over [0, length].
    pub fn street_length_m(&self) -> f64 {
        let (a, b) = self.side_counts();
        let side_a = (a.saturating_sub(1)) as f64 * self.relay_spacing_m;
        let side_b = if b == 0 {
            0.0
        } else {
            self.relay_spacing_m / 2.0 + (b - 1) as f64 * self.relay_spacing_m
        };
        side_a.max(side_b)
    }
}

/// Deterministic relay placement: side A at y = 0 on multiples of the
/// spacing, side B at y = street width shifted by half the spacing.
pub fn place_relays(scenario: &StreetScenario) -> Result<Vec<Position>, DeploymentError> {
    scenario.validate()?;
    let (a, b) = scenario.side_counts();
    let d = scenario.relay_spacing_m;
    let mut relays = Vec::with_capacity(scenario.relay_count as usize);
    for i in 0..a {
        relays.push(Position::new(i as f64 * d, 0.0));
    }
    for i in 0..b {
        relays.push(Position::new(
            d / 2.0 + i as f64 * d,
            scenario.street_width_m,
        ));
    }
    Ok(relays)
}

/// Drop devices uniformly along the sidewalks: side chosen uniformly,
/// x uniform over the street length, y on one of the two sidewalk lines.
pub fn drop_devices<R: Rng + ?Sized>(
    scenario: &StreetScenario,
    rng: &mut R,
) -> Result<Vec<Position>, DeploymentError> {
    scenario.validate()?;
    let length = scenario.street_length_m();
    if length <= 0.0 {
        return Err(DeploymentError::ZeroLength);
    }
    let near = scenario.sidewalk_inset_m;
    let far = scenario.street_width_m - scenario.sidewalk_inset_m;
    Ok((0..scenario.device_count)
        .map(|_| {
            let y = if rng.gen_bool(0.5) { near } else { far };
            Position::new(rng.gen_range(0.0..=length), y)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scenario(relays: u32, spacing: f64) -> StreetScenario {
        StreetScenario {
            relay_count: relays,
            relay_spacing_m: spacing,
            street_width_m: 20.0,
            sidewalk_inset_m: 2.0,
            device_count: 100,
        }
    }

    #[test]
    fn distance_basics() {
        let a = Position::new(0.0, 0.0);
        assert_eq!(a.distance(a), 0.0);
        let b = Position::new(3.0, 4.0);
        assert_eq!(a.distance(b), 5.0);
        assert_eq!(a.distance(b), b.distance(a));
    }

    #[test]
    fn ten_relay_reference_layout() {
        let s = scenario(10, 30.0);
        let relays = place_relays(&s).unwrap();
        assert_eq!(relays.len(), 10);
        let side_a: Vec<f64> = relays.iter().filter(|r| r.y == 0.0).map(|r| r.x).collect();
        let side_b: Vec<f64> = relays.iter().filter(|r| r.y == 20.0).map(|r| r.x).collect();
        assert_eq!(side_a, vec![0.0, 30.0, 60.0, 90.0, 120.0]);
        assert_eq!(side_b, vec![15.0, 45.0, 75.0, 105.0, 135.0]);
        assert_eq!(s.street_length_m(), 135.0);
    }

    #[test]
    fn two_relay_layout() {
        let s = scenario(2, 30.0);
        let relays = place_relays(&s).unwrap();
        assert_eq!(
            relays,
            vec![Position::new(0.0, 0.0), Position::new(15.0, 20.0)]
        );
        assert_eq!(s.street_length_m(), 15.0);
    }

    #[test]
    fn odd_relay_count_favors_side_a() {
        let s = scenario(5, 40.0);
        let relays = place_relays(&s).unwrap();
        let a = relays.iter().filter(|r| r.y == 0.0).count();
        let b = relays.iter().filter(|r| r.y == 20.0).count();
        assert_eq!((a, b), (3, 2));
    }

    #[test]
    fn placement_is_deterministic() {
        let s = scenario(8, 60.0);
        assert_eq!(place_relays(&s).unwrap(), place_relays(&s).unwrap());
    }

    #[test]
    fn devices_sit_on_sidewalk_lines_within_bounds() {
        let s = scenario(10, 30.0);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let devices = drop_devices(&s, &mut rng).unwrap();
        assert_eq!(devices.len(), 100);
        for d in &devices {
            assert!(d.y == 2.0 || d.y == 18.0);
            assert!((0.0..=135.0).contains(&d.x));
        }
    }

    #[test]
    fn zero_devices_is_empty() {
        let mut s = scenario(4, 30.0);
        s.device_count = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        assert!(drop_devices(&s, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn device_x_is_uniform_ks_test() {
        let s = scenario(10, 30.0);
        let mut s = s;
        s.device_count = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut xs: Vec<f64> = drop_devices(&s, &mut rng)
            .unwrap()
            .iter()
            .map(|d| d.x / 135.0)
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = xs.len() as f64;
        let d_stat = xs
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                let hi = ((i + 1) as f64 / n - u).abs();
                let lo = (u - i as f64 / n).abs();
                hi.max(lo)
            })
            .fold(0.0, f64::max);
        // 1% critical value for the KS statistic: 1.63 / sqrt(n).
        assert!(d_stat < 1.63 / n.sqrt(), "KS statistic {d_stat}");
    }

    #[test]
    fn validation_errors() {
        let mut s = scenario(0, 30.0);
        assert_eq!(place_relays(&s).unwrap_err(), DeploymentError::NoRelays);
        s = scenario(4, 0.0);
        assert_eq!(place_relays(&s).unwrap_err(), DeploymentError::BadSpacing);
        s = scenario(4, 30.0);
        s.sidewalk_inset_m = 11.0;
        assert!(matches!(
            place_relays(&s).unwrap_err(),
            DeploymentError::BadSidewalk { .. }
        ));
        // Single relay: zero street length, nowhere to drop devices.
        s = scenario(1, 30.0);
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        assert_eq!(
            drop_devices(&s, &mut rng).unwrap_err(),
            DeploymentError::ZeroLength
        );
    }
}
