use potent_core::verify;

#[test]
fn full_suite_passes_for_several_seeds() {
    for seed in [1, 2, 3] {
        for (group, checks) in verify::full_suite(seed).unwrap() {
            for c in checks {
                println!("{group:>18} {:<80} {:.3e} (tol {:.1e})", c.name, c.measured, c.tolerance);
                assert!(c.passed, "seed {seed}: {group}: {c:?}");
            }
        }
    }
}
