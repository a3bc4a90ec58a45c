//! Small deterministic networks shared by the module tests.

use crate::grid::{Branch, Bus, Network};

pub fn bus(id: usize, p_d: f64, p_g_min: f64, p_g_max: f64, c_g: f64) -> Bus {
    Bus {
        id,
        p_d,
        p_g_min,
        p_g_max,
        c_g,
        theta_min: -3.0,
        theta_max: 3.0,
        r_up: 0.0,
        r_down: 0.0,
    }
}

pub fn load_bus(id: usize, p_d: f64) -> Bus {
    bus(id, p_d, 0.0, 0.0, 0.0)
}

pub fn branch(id: usize, from: usize, to: usize, switchable: bool) -> Branch {
    Branch { id, from, to, b: 100.0, p_b_max: 150.0, switchable, c_b: 0.0 }
}

/// One generator feeding one load over a single line.
pub fn two_bus() -> Network {
    let buses = vec![bus(1, 0.0, 0.0, 5.0, 1.0), load_bus(2, 1.0)];
    let mut br = branch(1, 1, 2, false);
    br.p_b_max = 2.0;
    Network::new("two-bus", buses, vec![br]).unwrap()
}

/// Two self-sufficient triangle areas joined by a costed 2-line cutset:
/// opening both cutset lines is strictly cheapest, so any model without an
/// exact connectedness block islands.
pub fn two_area() -> Network {
    let buses = vec![
        bus(1, 0.0, 0.0, 200.0, 1.0),
        load_bus(2, 30.0),
        load_bus(3, 30.0),
        bus(4, 0.0, 0.0, 200.0, 1.0),
        load_bus(5, 40.0),
        load_bus(6, 40.0),
    ];
    let mut branches = vec![
        branch(1, 1, 2, false),
        branch(2, 2, 3, false),
        branch(3, 1, 3, false),
        branch(4, 4, 5, false),
        branch(5, 5, 6, false),
        branch(6, 4, 6, false),
        branch(7, 1, 4, true),
        branch(8, 2, 5, true),
    ];
    branches[6].c_b = 5.0;
    branches[7].c_b = 5.0;
    Network::new("two-area", buses, branches).unwrap()
}

/// Three-bus cycle with tight capacities and zero ramp: a cheap dispatch
/// that is fine pre-contingency overloads the ring once a line is lost.
pub fn tight_cycle() -> Network {
    let buses = vec![
        bus(1, 0.0, 0.0, 100.0, 1.0),
        load_bus(2, 60.0),
        bus(3, 0.0, 0.0, 100.0, 3.0),
    ];
    let mut branches = vec![branch(1, 1, 2, false), branch(2, 2, 3, false), branch(3, 1, 3, false)];
    branches[0].p_b_max = 62.0;
    branches[1].p_b_max = 62.0;
    branches[2].p_b_max = 45.0;
    Network::new("tight-cycle", buses, branches).unwrap()
}

/// A gen-rich core feeding a pure-load pocket {5,6,7,8} through the single
/// boundary bus 5: the pocket is a certified unbalanced NIS, and the core's
/// unswitchable spine splits into two always-on components.
pub fn pocket_network() -> Network {
    let buses = vec![
        bus(1, 0.0, 0.0, 200.0, 1.0),
        bus(2, 0.0, 0.0, 150.0, 1.5),
        load_bus(3, 30.0),
        bus(4, 0.0, 0.0, 100.0, 2.0),
        load_bus(5, 10.0),
        load_bus(6, 20.0),
        load_bus(7, 20.0),
        load_bus(8, 20.0),
    ];
    let branches = vec![
        branch(1, 1, 2, false),
        branch(2, 2, 3, false),
        branch(3, 3, 4, true),
        branch(4, 4, 5, false),
        branch(5, 1, 4, true),
        branch(6, 2, 5, true),
        branch(7, 5, 6, true),
        branch(8, 6, 7, true),
        branch(9, 7, 8, true),
        branch(10, 6, 8, true),
    ];
    Network::new("pocket", buses, branches).unwrap()
}
