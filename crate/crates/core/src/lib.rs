//! Exact verification of nef cones, cones of curves and Fano-type properties for blowups
//! of products along a pair of subvarieties.

pub mod blowup;
pub mod delpezzo;
pub mod nefcert;
pub mod ratcone;
pub mod scenario;
