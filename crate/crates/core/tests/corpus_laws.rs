//! Corpus-wide laws for cylinders over random structured data: the
//! degenerate-shape identities, the universal property against random
//! test objects, and the fundamental-group comparison.

use cylab_core::caps::Caps;
use cylab_core::corpus::{
    finpos_data, finset_data, lax_finpos, lax_finset, random_finpos_data, random_finset_data,
    wedge_datum,
};
use cylab_core::cylinder::{
    comparison_to_colimit, cylinder, cylinder_of_points, cylinder_of_single, verify_lax_colimit,
};
use cylab_core::homotopy::{van_kampen_check, HomotopyError};
use cylab_core::kernel::KernelError;
use cylab_core::rng::Rng;

#[test]
fn point_fibers_over_the_shape_reproduce_the_data() {
    for f in finset_data(23, 40) {
        let back = cylinder_of_points(&f).expect("point fibers always glue");
        assert_eq!(back, f, "point-fiber cylinder must reproduce the data");
    }
    for f in finpos_data(23, 25) {
        let back = cylinder_of_points(&f).expect("point fibers always glue");
        assert_eq!(back, f, "point-fiber cylinder must reproduce the data");
    }
}

#[test]
fn single_fiber_over_a_point_reproduces_the_data() {
    for f in finset_data(24, 40) {
        let back = cylinder_of_single("*", &f).expect("one fiber always glues");
        assert_eq!(back, f, "one-fiber cylinder must reproduce the data");
    }
    for f in finpos_data(24, 25) {
        let back = cylinder_of_single("*", &f).expect("one fiber always glues");
        assert_eq!(back, f, "one-fiber cylinder must reproduce the data");
    }
}

#[test]
fn cylinder_satisfies_the_colimit_property_on_finset_corpus() {
    let caps = Caps::default();
    let mut rng = Rng::new(25);
    let mut verified = 0usize;
    let mut skipped = 0usize;
    for x in lax_finset(29, 30) {
        let y = random_finset_data(&mut rng, 2, 2);
        match verify_lax_colimit(&x, &y, &caps) {
            Ok(report) => {
                assert!(
                    report.iso_found,
                    "restriction must be an order isomorphism: {:?}",
                    report.failure
                );
                assert_eq!(report.hom_count, report.transformation_count);
                verified += 1;
            }
            Err(KernelError::SizeCapExceeded { .. }) => skipped += 1,
            Err(e) => panic!("unexpected verification error: {e}"),
        }
    }
    assert!(verified >= 15, "only {verified} instances fit the budget ({skipped} skipped)");
}

#[test]
fn cylinder_satisfies_the_colimit_property_on_finpos_corpus() {
    let caps = Caps::default();
    let mut rng = Rng::new(26);
    let mut verified = 0usize;
    let mut skipped = 0usize;
    for x in lax_finpos(31, 15) {
        let y = random_finpos_data(&mut rng, 2, 2);
        match verify_lax_colimit(&x, &y, &caps) {
            Ok(report) => {
                assert!(
                    report.iso_found,
                    "restriction must be an order isomorphism: {:?}",
                    report.failure
                );
                verified += 1;
            }
            Err(KernelError::SizeCapExceeded { .. }) => skipped += 1,
            Err(e) => panic!("unexpected verification error: {e}"),
        }
    }
    assert!(verified >= 7, "only {verified} instances fit the budget ({skipped} skipped)");
}

#[test]
fn comparison_to_the_shape_colimit_is_a_surjective_cocone_map() {
    for x in lax_finset(37, 30) {
        let cyl = cylinder(&x).expect("corpus families glue");
        let (cmp, col) = comparison_to_colimit(&x, &cyl)
            .expect("comparison must be a surjective cocone morphism");
        assert_eq!(cmp.map().len(), cyl.data.len());
        assert!(col.poset.len() <= cyl.data.len());
    }
}

#[test]
fn fundamental_group_comparison_agrees_on_corpus() {
    let caps = Caps::default();
    let mut agreed = 0usize;
    let mut skipped = 0usize;
    for x in lax_finset(41, 30) {
        match van_kampen_check(&x, &caps) {
            Ok(report) => {
                assert!(
                    report.verdict,
                    "counterexample: amalgam {:?} vs direct {:?} ({:?})",
                    report.amalgam_h1, report.direct_h1, report.details
                );
                agreed += 1;
            }
            Err(HomotopyError::NotConnected(_)) | Err(HomotopyError::DisconnectedFiber(_)) => {
                skipped += 1;
            }
            Err(HomotopyError::Kernel(KernelError::SizeCapExceeded { .. })) => skipped += 1,
            Err(e) => panic!("unexpected comparison error: {e}"),
        }
    }
    for x in lax_finpos(42, 12) {
        match van_kampen_check(&x, &caps) {
            Ok(report) => {
                assert!(
                    report.verdict,
                    "counterexample: amalgam {:?} vs direct {:?} ({:?})",
                    report.amalgam_h1, report.direct_h1, report.details
                );
                agreed += 1;
            }
            Err(HomotopyError::NotConnected(_)) | Err(HomotopyError::DisconnectedFiber(_)) => {
                skipped += 1;
            }
            Err(HomotopyError::Kernel(KernelError::SizeCapExceeded { .. })) => skipped += 1,
            Err(e) => panic!("unexpected comparison error: {e}"),
        }
    }
    assert!(agreed >= 12, "only {agreed} comparisons ran ({skipped} skipped)");
}

#[test]
fn wedge_of_circles_has_free_rank_two() {
    let caps = Caps::default();
    let report = van_kampen_check(&wedge_datum(), &caps).expect("wedge is connected");
    assert!(report.verdict);
    assert_eq!(report.amalgam_h1, vec![0, 0]);
    assert_eq!(report.direct_h1, vec![0, 0]);
}
