pub mod family;
pub mod rng;
pub mod rotation;
pub mod tail;

pub use family::{interior_anchor, sample_grain, triangle_legs, FamilyKind, GrainFamily, MomentFlags};
pub use rng::{hash64, mix64, SeededRng};
pub use rotation::sample_rotation;
pub use tail::{sample_tail, TailLaw};
