//! Library side of the molscope command line tool: the embedded expected
//! values and the census runner, shared between the binary and the
//! acceptance test suite.

pub mod golden;
pub mod runner;
