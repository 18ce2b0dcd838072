//! Benchmark fixtures shared by the criterion targets.

use braidlab::actions::RadialWell;
use braidlab::model1d::degennes_constants;
use braidlab::strip2d::{smoothed_triangle, ClosedCurve, FiberConstants};
use braidlab::wells2d::WellConfig;

/// The bump well of depth 1 and radius 0.625.
pub fn default_well() -> RadialWell {
    RadialWell::bump(1.0, 0.625).expect("valid well")
}

/// `n` default wells at separation 2.5 in a unit field.
pub fn wells(n: usize) -> WellConfig {
    WellConfig::new(n, 2.5, 1.0, default_well()).expect("valid configuration")
}

/// The smoothed triangle of half-perimeter π with its Neumann fibre.
pub fn triangle() -> (ClosedCurve, FiberConstants) {
    let curve = smoothed_triangle(std::f64::consts::PI, 0.4, 3).expect("valid curve");
    let fiber = FiberConstants::Neumann(degennes_constants(1e-8).expect("de Gennes constants"));
    (curve, fiber)
}
