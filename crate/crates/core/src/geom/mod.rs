//! Integer-coordinate geometric structures: a persistent k-ary interval
//! tree, sweep-based point location on top of it, range emptiness and
//! vertical ray shooting.

mod ktree;
mod locator;
mod range;
mod ray;

pub use ktree::PersistentKTree;
pub use locator::{HalfOpenRect, PointLocator};
pub use range::RangeEmptiness;
pub use ray::{HSegment, RayShooter};
