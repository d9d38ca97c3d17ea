#[path = "suites/properties.rs"]
mod suites;

macro_rules! suite_tests {
    ($($name:ident),*) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = suites::$name() {
                    panic!("{e}");
                }
            }
        )*
    };
}

suite_tests!(
    coupling_nonnegativity,
    d1_branch_consistency,
    gamma_nonnegative_for_members,
    biconjugate_below_f,
    weak_duality,
    vip_gap_midpoint_convex,
    epvip_gap_nonpositive,
    pseudo_monotone_implies_null
);

