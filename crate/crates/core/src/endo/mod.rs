//! Commuting `*`-endomorphisms induced by the dilated isometries, and the
//! recovery of index spaces and flip from the induced maps.

mod lift;
mod roundtrip;

pub use lift::{lift_endomorphisms, verify_endomorphic_dilation, EndoCheck, EndoPair, Lift, EXACT};
pub use roundtrip::{roundtrip_metric_spaces, IndexDrop, RoundtripReport};
