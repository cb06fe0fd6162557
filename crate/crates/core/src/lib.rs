//! Probabilistic clock-constraint checking: clock traces, expression evaluation,
//! relation monitors, a specification language and a vehicle trace simulator.

pub mod clock;
pub mod corpus;
pub mod expr;
pub mod lang;
pub mod monitor;
pub mod report;
pub mod sim;
pub mod trace_io;
pub mod verify;
