//! Laws for the ringed corpus: flatness of restrictions, the section
//! comparison, the gluing theorems, descent of spectrum points, and
//! quasi-coherent families.

use cylab_core::caps::Caps;
use cylab_core::cdata::CDataMorphism;
use cylab_core::corpus::{
    ringed_covers, ringed_lax_data, ringed_lax_morphisms, ringed_spaces, z6_chain, z6_cover,
    z6_point, z6_vee,
};
use cylab_core::descent::{
    check_external_descent, check_geometric, check_internal_descent, is_quasi_coherent,
    QcohFamily, SpecPts,
};
use cylab_core::kernel::{lim_induce, KernelError, KernelLimits, Limit, RingKernel};
use cylab_core::ring::{is_epi, is_faithfully_flat, is_flat, FinRing, RingHom};
use cylab_core::schematic::{
    check_cylinder_morphism_theorem, check_cylinder_theorem, check_nerve_corollary,
    is_flat_immersion, is_schematic, RingedPoset, SchematicError,
};

fn roomy() -> Caps {
    Caps::roomy()
}

fn corpus_spaces(seed: u64, count: usize) -> Vec<RingedPoset> {
    let caps = roomy();
    let mut all = ringed_spaces(seed, count, &caps);
    all.push(z6_point());
    all.push(z6_chain());
    all.push(z6_vee());
    all
}

fn is_cap_error(e: &SchematicError) -> bool {
    matches!(
        e,
        SchematicError::Kernel(KernelError::SizeCapExceeded { .. })
            | SchematicError::Kernel(KernelError::Ring(
                cylab_core::ring::RingError::SizeCapExceeded { .. }
            ))
    )
}

#[test]
fn schematic_spaces_restrict_along_flat_epimorphisms() {
    let caps = roomy();
    let mut schematic_seen = 0usize;
    for x in corpus_spaces(31, 30) {
        let verdict = match is_schematic(&x, &caps) {
            Ok(report) => report.verdict,
            Err(e) if is_cap_error(&e) => continue,
            Err(e) => panic!("schematic check failed structurally: {e}"),
        };
        if !verdict {
            continue;
        }
        schematic_seen += 1;
        for (p, q) in x.shape().related_pairs() {
            if p == q {
                continue;
            }
            let r = x.res(p, q);
            assert!(is_flat(r, &caps).expect("flatness probe fits"), "restriction not flat");
            assert!(is_epi(r, &caps).expect("epi probe fits"), "restriction not epi");
        }
    }
    assert!(schematic_seen >= 3, "only {schematic_seen} schematic spaces in the corpus");
}

#[test]
fn sections_map_faithfully_flatly_into_the_stalk_product() {
    let caps = roomy();
    let mut ran = 0usize;
    let mut skipped = 0usize;
    for x in corpus_spaces(32, 30) {
        match is_schematic(&x, &caps) {
            Ok(report) if report.verdict => {}
            Ok(_) => continue,
            Err(e) if is_cap_error(&e) => continue,
            Err(e) => panic!("schematic check failed structurally: {e}"),
        }
        let stalks: Vec<FinRing> = (0..x.len()).map(|p| x.stalk(p).clone()).collect();
        let mut arrows: Vec<(usize, usize, RingHom)> = Vec::new();
        for (p, q) in x.shape().related_pairs() {
            if p != q {
                arrows.push((p, q, x.res(p, q).clone()));
            }
        }
        let sections: Limit<RingKernel> = match RingKernel::limit(&stalks, &arrows, &caps) {
            Ok(l) => l,
            Err(KernelError::SizeCapExceeded { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => panic!("section ring construction failed: {e}"),
        };
        let product = match RingKernel::limit(&stalks, &[], &caps) {
            Ok(l) => l,
            Err(KernelError::SizeCapExceeded { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => panic!("stalk product construction failed: {e}"),
        };
        let cmp = lim_induce::<RingKernel>(&product, &sections.obj, &sections.legs)
            .expect("section legs form a cone over the product");
        match is_faithfully_flat(&cmp, &caps) {
            Ok(ff) => {
                assert!(ff, "sections of a schematic space embed faithfully flatly");
                ran += 1;
            }
            Err(cylab_core::ring::RingError::SizeCapExceeded { .. }) => skipped += 1,
            Err(e) => panic!("flatness probe failed structurally: {e}"),
        }
    }
    assert!(ran >= 2, "only {ran} section comparisons fit the caps ({skipped} skipped)");
}

#[test]
fn cover_legs_are_flat_immersions() {
    let caps = roomy();
    let mut covers = ringed_covers(43, 8, &caps);
    covers.push(z6_cover());
    for (k, (_, legs)) in covers.iter().enumerate() {
        for (j, leg) in legs.iter().enumerate() {
            let report = is_flat_immersion(leg, &caps).expect("immersion probe fits");
            assert!(report.verdict, "cover {k} leg {j} is not a flat immersion");
        }
    }
}

#[test]
fn gluing_theorem_has_no_implication_violations_on_corpus() {
    let caps = roomy();
    let mut hypothesis_true = 0usize;
    let mut hypothesis_false = 0usize;
    let mut skipped = 0usize;
    for x in ringed_lax_data(37, 50, &caps) {
        match check_cylinder_theorem(&x, &caps) {
            Ok(report) => {
                assert!(
                    report.implication_ok,
                    "hypothesis held but the cylinder failed to be schematic: {:?}",
                    report.details
                );
                if report.hypothesis {
                    assert_eq!(report.conclusion, Some(true));
                    hypothesis_true += 1;
                } else {
                    hypothesis_false += 1;
                }
            }
            Err(e) if is_cap_error(&e) => skipped += 1,
            Err(e) => panic!("theorem check failed structurally: {e}"),
        }
    }
    assert!(hypothesis_true >= 5, "only {hypothesis_true} instances satisfied the hypothesis");
    assert!(hypothesis_false >= 5, "only {hypothesis_false} instances violated the hypothesis");
    assert!(skipped <= 20, "{skipped} instances exceeded the caps");
}

#[test]
fn morphism_gluing_theorem_has_no_implication_violations_on_corpus() {
    let caps = roomy();
    let mut ran = 0usize;
    let mut skipped = 0usize;
    for f in ringed_lax_morphisms(41, 16, &caps) {
        match check_cylinder_morphism_theorem(&f, &caps) {
            Ok(report) => {
                assert!(
                    report.implication_ok,
                    "hypothesis held but the glued morphism failed: {:?}",
                    report.details
                );
                ran += 1;
            }
            Err(e) if is_cap_error(&e) => skipped += 1,
            Err(e) => panic!("morphism theorem check failed structurally: {e}"),
        }
    }
    assert!(ran >= 8, "only {ran} morphism instances fit the caps ({skipped} skipped)");
}

#[test]
fn spectrum_points_descend_along_stalk_charts() {
    let caps = roomy();
    let mut verified = 0usize;
    let mut vacuous = 0usize;
    for x in corpus_spaces(47, 25) {
        match check_internal_descent(&SpecPts, &x, &caps) {
            Ok(report) => {
                if report.left_legs_qc_iso {
                    assert!(
                        report.verdict,
                        "descent failed with qc-iso collapses: {:?}",
                        report.details
                    );
                    verified += 1;
                } else {
                    vacuous += 1;
                }
            }
            Err(e) if is_cap_error(&e) => vacuous += 1,
            Err(e) => panic!("internal descent check failed structurally: {e}"),
        }
    }
    assert!(verified >= 10, "only {verified} spaces had qc-iso collapses ({vacuous} vacuous)");
}

#[test]
fn spectrum_points_descend_along_covers() {
    let caps = roomy();
    let mut covers = ringed_covers(43, 8, &caps);
    covers.push(z6_cover());
    let mut verified = 0usize;
    for (space, legs) in &covers {
        let nerve_report = match check_nerve_corollary(space, legs, &caps) {
            Ok(r) => r,
            Err(e) if is_cap_error(&e) => continue,
            Err(e) => panic!("nerve check failed structurally: {e}"),
        };
        if !(nerve_report.augmentation_qc_iso && nerve_report.jointly_surjective) {
            continue;
        }
        let report = check_external_descent(&SpecPts, space, legs, &caps)
            .expect("external descent fits once the nerve does");
        assert!(report.verdict, "covered descent failed: {:?}", report.details);
        verified += 1;
    }
    assert!(verified >= 4, "only {verified} covers admitted the descent comparison");

    let (space, legs) = z6_cover();
    let report =
        check_external_descent(&SpecPts, &space, &legs, &caps).expect("the residue cover fits");
    assert!(report.verdict);
    assert_eq!(report.colimit_size, 2, "two residue charts give the two spectrum classes");
    assert_eq!(report.value_size, 2);
}

#[test]
fn nerve_corollary_equates_spectrum_surjectivity_with_qc_iso() {
    let caps = roomy();
    let mut covers = ringed_covers(44, 8, &caps);
    covers.push(z6_cover());
    let mut decided = 0usize;
    for (space, legs) in &covers {
        let report = match check_nerve_corollary(space, legs, &caps) {
            Ok(r) => r,
            Err(e) if is_cap_error(&e) => continue,
            Err(e) => panic!("nerve check failed structurally: {e}"),
        };
        if report.cylinder_schematic && report.augmentation_flat_immersion {
            assert!(
                report.equivalence_ok,
                "qc-iso and joint surjectivity disagree: {:?}",
                report.details
            );
            decided += 1;
        }
    }
    assert!(decided >= 4, "only {decided} covers reached the equivalence check");
}

#[test]
fn structure_and_zero_families_are_quasi_coherent_and_restrict() {
    let caps = roomy();
    let mut spaces = ringed_spaces(48, 10, &caps);
    spaces.push(z6_chain());
    spaces.push(z6_vee());
    for x in &spaces {
        for fam in [
            QcohFamily::structure(x).expect("structure family exists"),
            QcohFamily::zero(x).expect("zero family exists"),
        ] {
            let report = is_quasi_coherent(&fam, &caps).expect("comparison probes fit");
            assert!(report.verdict, "family not quasi-coherent: {:?}", report.failures);
            for p in 0..x.len() {
                let sub = fam
                    .restrict_to_up_set(x.shape().up_set(p))
                    .expect("up-set restriction exists");
                let sub_report = is_quasi_coherent(&sub, &caps).expect("restriction probes fit");
                assert!(
                    sub_report.verdict,
                    "restricted family lost quasi-coherence: {:?}",
                    sub_report.failures
                );
            }
        }
    }
}

#[test]
fn spectrum_points_send_qc_isomorphisms_to_bijections() {
    let caps = roomy();
    let mut samples = Vec::new();
    for x in corpus_spaces(53, 15) {
        if let Ok(f) = CDataMorphism::collapse_to_minimum(&x) {
            samples.push(f);
        }
    }
    let report = check_geometric(&SpecPts, &samples, &caps).expect("geometric probes fit");
    assert!(report.verdict, "{:?}", report.failures);
    assert!(report.checked >= 3, "only {} samples were qc-isomorphisms", report.checked);
}
