//! Exact computation of fundamental-group data for plane-curve complements:
//! singularity resolution by Newton polygons and blow-ups, divisor
//! bookkeeping on ruled surfaces, braid monodromy, and certification of the
//! resulting presentations through abelianization and finite quotients.

pub mod exactpoly;
pub mod newton;
pub mod resolve;
pub mod surface;
pub mod braid;
pub mod groups;
pub mod pipeline;
