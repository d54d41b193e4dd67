//! Component calculus against finite differences on every chart.

mod common;

use common::geo;
use tensorkernel_core::geometry::builtin_chart;

#[test]
fn operators_agree_with_finite_differences() {
    let n = geo::check_all(0x6e0).unwrap_or_else(|e| panic!("{}", e));
    assert_eq!(n, geo::POINTS * geo::cases().len());
}

#[test]
fn metric_compatibility_holds_on_every_chart() {
    for case in geo::cases() {
        assert!(geo::metric_compatible(&case.chart), "{}", case.chart.name);
    }
}

#[test]
fn default_residuals_match_reference_forms() {
    geo::check_golden_residuals().unwrap_or_else(|e| panic!("{}", e));
}

#[test]
fn plane_wave_residuals() {
    geo::plane_wave_residuals_vanish().unwrap_or_else(|e| panic!("{}", e));
}

#[test]
fn spherical_volume_element() {
    let c = builtin_chart("spherical").unwrap();
    assert_eq!(c.sqrt_det.to_plain(), "r^2*abs(sin(theta))");
}
