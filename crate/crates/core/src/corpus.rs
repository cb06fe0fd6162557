//! The bundled vehicle specification.

use crate::lang::{elaborate, parse, Elaborated};

/// Source text of `corpus/av.prccsl`.
pub const AV_SPEC: &str = include_str!("../corpus/av.prccsl");

/// Path of the bundled file relative to the crate root.
pub const AV_SPEC_PATH: &str = "corpus/av.prccsl";

pub fn av_spec() -> Elaborated {
    let spec = parse(AV_SPEC).expect("bundled spec parses");
    elaborate(&spec).expect("bundled spec elaborates")
}
