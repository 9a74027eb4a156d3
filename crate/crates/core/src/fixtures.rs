//! The reference loops shipped with the crate.
//!
//! | name | loop |
//! |------|------|
//! | L1 | `x ≥ −z`; `x' = x + y, y' = y + z, z' = z − 1` |
//! | L2 | `x ≥ 0, y ≤ 10, 0 ≤ z ≤ 1`; `x' = x + y + z − 10, y' = y − z, z' = 1 − z` |
//! | L3 | `x2 ≤ x1, x1 + x2 ≥ 1`; `x2' = x2 − 2x1 + 1, x1' = x1` |
//! | L4 | L3 plus `x3 ≥ 0`, `x3' = x3 + 10x2 + 9` |
//! | L5(B) | `x ≥ 1, y ≥ 1, x ≥ y, 2^B·y ≥ x`; `x' = 2x, y' = 3y` |
//! | L6 | `x ≥ 0`; `x' = x + y, y' = y − 1` |

use crate::loopmodel::{parse_loop, SLCLoop};

pub const L1: &str = include_str!("../fixtures/L1.loop");
pub const L2: &str = include_str!("../fixtures/L2.loop");
pub const L3: &str = include_str!("../fixtures/L3.loop");
pub const L4: &str = include_str!("../fixtures/L4.loop");
pub const L5_B1: &str = include_str!("../fixtures/L5_B1.loop");
pub const L5_B2: &str = include_str!("../fixtures/L5_B2.loop");
pub const L5_B3: &str = include_str!("../fixtures/L5_B3.loop");
pub const L6: &str = include_str!("../fixtures/L6.loop");

fn load(src: &str) -> SLCLoop {
    parse_loop(src).expect("fixture parses")
}

pub fn l1() -> SLCLoop {
    load(L1)
}

pub fn l2() -> SLCLoop {
    load(L2)
}

pub fn l3() -> SLCLoop {
    load(L3)
}

pub fn l4() -> SLCLoop {
    load(L4)
}

/// L5 for any `b ≥ 1`; it needs `b + 1` phases.
pub fn l5(b: u32) -> SLCLoop {
    assert!((1..63).contains(&b));
    match b {
        1 => load(L5_B1),
        2 => load(L5_B2),
        3 => load(L5_B3),
        _ => load(&format!(
            "vars x y\nguard x >= 1, y >= 1, x >= y, {}y >= x\nupdate x' = 2x, y' = 3y\n",
            1u64 << b
        )),
    }
}

pub fn l6() -> SLCLoop {
    load(L6)
}

/// Every shipped fixture with its name.
pub fn named() -> Vec<(&'static str, SLCLoop)> {
    vec![
        ("L1", l1()),
        ("L2", l2()),
        ("L3", l3()),
        ("L4", l4()),
        ("L5_B1", l5(1)),
        ("L5_B2", l5(2)),
        ("L5_B3", l5(3)),
        ("L6", l6()),
    ]
}

pub fn all() -> Vec<SLCLoop> {
    named().into_iter().map(|(_, l)| l).collect()
}
