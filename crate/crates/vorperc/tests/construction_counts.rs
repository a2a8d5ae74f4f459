//! Coupled colorings reuse the tessellation of each replica.

use vorperc::estimators::{estimate_coupled, estimate_quenched_second_moment, Resample};
use vorperc::events::{EventSpec, Sector};
use vorperc::geometry::{tessellations_built, Window};

#[test]
fn recoloring_never_rebuilds_geometry() {
    let roi = Window::square([0.0, 0.0], 4.0);
    let specs = [EventSpec::arm(1.0, 4.0, 1, Sector::FullPlane), EventSpec::arm(1.0, 4.0, 4, Sector::FullPlane)];
    let before = tessellations_built();
    estimate_coupled(&specs, Resample::All, roi, 40, 1).unwrap();
    assert_eq!(tessellations_built() - before, 40);
    let before = tessellations_built();
    estimate_quenched_second_moment(&specs[1], 25, 2).unwrap();
    assert_eq!(tessellations_built() - before, 25);
}
