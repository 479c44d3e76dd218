//! Library half of the `moldable` command: file formats, charts and the
//! benchmark harness.

pub mod bench;
pub mod formats;
pub mod gantt;

/// Exit codes shared by the subcommands.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INFEASIBLE: i32 = 1;
    pub const BAD_INPUT: i32 = 2;
    pub const INVARIANT: i32 = 3;
    pub const IO: i32 = 4;
}
