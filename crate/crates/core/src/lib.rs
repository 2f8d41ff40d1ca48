//! Spectral invariants of solvable model operators: eta functions and their
//! isotypic refinements, graded heat traces, heat-trace expansion fits, and
//! closed-form equivariant invariants of lens spaces, spheres, tori and
//! complex projective spaces.

pub mod exact;
pub mod specfun;
pub mod spectral;
pub mod heat;
pub mod eta;
pub mod invariants;
