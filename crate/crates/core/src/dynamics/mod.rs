//! Condition (L), singletons of the set algebra, the OTW compactification and
//! prefix-code conjugacies.

pub mod condition_l;
pub mod conjugacy;
pub mod otw;

pub use condition_l::{
    follower_intersection, is_singleton_at, satisfies_condition_l, singleton_detector, verify_l_witness,
    ConditionLWitness, DetectorReport, LVerdict, Singleton,
};
pub use conjugacy::{
    check_cylinder_images, extend_to_otw, verify_isometric_conjugacy, ConjugacyReport, CylinderReport, DepthCheck,
    PrefixCode,
};
pub use otw::{generalized_cylinder_contains, otw_membership_fin, otw_sample, otw_shift, OTWPoint};
