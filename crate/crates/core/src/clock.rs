//! Time source injected into the driver, since `core` has no clock.

pub trait Clock {
    /// Seconds elapsed since an arbitrary fixed origin.
    fn now(&self) -> f64;
}

/// A clock that never advances. Timings read as zero and time limits never fire.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}
