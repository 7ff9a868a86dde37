//! Binary quadratic forms, class groups, Hurwitz class numbers, the
//! coefficient height bound, and polycyclic presentations.

mod enumerate;
mod form;
mod height;
mod hurwitz;
mod presentation;

pub use enumerate::{class_number, for_each_reduced_form, reduced_forms};
pub use form::{compose, compose_unchecked, power, prime_form, reduce_form, square, QuadForm};
pub use height::{height_bound, height_bound_from_norms, HeightBound};
pub use hurwitz::{hurwitz_number, unit_count, HurwitzData};
pub use presentation::{
    default_generator_norms, polycyclic_presentation, polycyclic_presentation_bounded,
    PolycyclicPresentation, PresentationStats,
};
