//! Shared fixtures for the criterion benchmarks.

use hybridlink_core::swap::{Link, ProtocolParams};

/// 250 km of 0.2 dB/km fibre, alpha 0.5, eta_d 0.95.
pub fn operating_point() -> ProtocolParams {
    ProtocolParams::new(
        0.5,
        Link::Distance {
            total_km: 250.0,
            loss_db_per_km: 0.2,
        },
    )
    .with_eta_d(0.95)
}

/// Symmetric 10 % links at alpha 0.5, the usual oracle test point.
pub fn oracle_point() -> ProtocolParams {
    ProtocolParams::new(0.5, Link::Symmetric { transmittance: 0.1 })
}
