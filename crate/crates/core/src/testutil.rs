//! Fixed parameter sets for unit tests.

use crate::onsager::ModelParams;
use crate::qkernel::{QPoint, C64};

/// A generic parameter point with the given spins.
pub fn params(spins2: &[u32]) -> ModelParams {
    let evals = (0..spins2.len()).map(|k| C64::from_polar(0.9 + 0.17 * k as f64, 0.3 - 0.45 * k as f64)).collect();
    ModelParams::new(
        QPoint::new(C64::from_polar(0.8, 0.35)).unwrap(),
        C64::new(0.3, -0.2),
        C64::new(-0.4, 0.1),
        C64::new(1.1, 0.5),
        C64::new(0.7, -0.6),
        evals,
        spins2.to_vec(),
    )
    .unwrap()
}
