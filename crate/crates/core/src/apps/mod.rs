//! Consumers of an estimated disc distribution: the multiset-frequency
//! acceptance rule with user-supplied disc families, concrete property
//! testers for connectivity and cycle-freeness, and the greedy
//! maximal-matching size estimator.

pub mod family;
pub mod matching;
pub mod testers;

pub use family::{
    empirical_frequency, family_test, true_frequency, DiscFamily, FamilyMember, TesterVerdict,
};
pub use matching::{match_prob, matching_estimate, MatchMode, MatchingEstimate};
pub use testers::{connectivity_test, connectivity_verdict, cyclefree_test, cyclefree_verdict};
