//! Bundled deterministic test cases, each engineered to exhibit one failure
//! mode of switching models without exact connectedness handling.

use std::path::Path;

use ots_core::{to_canonical_json, Branch, Bus, Network};

use crate::HarnessError;

pub const FIXTURE_NAMES: [&str; 4] = ["fig1", "cycle3", "bridge2", "nis-demo"];

fn bus(id: usize, p_d: f64, p_g_min: f64, p_g_max: f64, c_g: f64, theta: f64) -> Bus {
    Bus {
        id,
        p_d,
        p_g_min,
        p_g_max,
        c_g,
        theta_min: -theta,
        theta_max: theta,
        r_up: 0.0,
        r_down: 0.0,
    }
}

fn load_bus(id: usize, p_d: f64, theta: f64) -> Bus {
    bus(id, p_d, 0.0, 0.0, 0.0, theta)
}

fn branch(id: usize, from: usize, to: usize, p_b_max: f64, switchable: bool, c_b: f64) -> Branch {
    Branch { id, from, to, b: 100.0, p_b_max, switchable, c_b }
}

/// Two self-sufficient triangle areas joined by a costed switchable 2-line
/// cutset. Opening both cutset lines saves their switching cost while every
/// bus keeps two on-branches, so both the plain model and the degree
/// condition island; the exact block forces one cutset line on at a
/// strictly higher objective.
fn fig1() -> Network {
    let buses = vec![
        bus(1, 0.0, 0.0, 200.0, 1.0, 1.0),
        load_bus(2, 30.0, 1.0),
        load_bus(3, 30.0, 1.0),
        bus(4, 0.0, 0.0, 200.0, 1.0, 1.0),
        load_bus(5, 40.0, 1.0),
        load_bus(6, 40.0, 1.0),
    ];
    let branches = vec![
        branch(1, 1, 2, 100.0, false, 0.0),
        branch(2, 2, 3, 100.0, false, 0.0),
        branch(3, 1, 3, 100.0, false, 0.0),
        branch(4, 4, 5, 100.0, false, 0.0),
        branch(5, 5, 6, 100.0, false, 0.0),
        branch(6, 4, 6, 100.0, false, 0.0),
        branch(7, 1, 4, 100.0, true, 5.0),
        branch(8, 2, 5, 100.0, true, 5.0),
    ];
    Network::new("fig1", buses, branches).expect("fixture is valid")
}

/// Three-bus ring with tight line limits and zero ramping: the cheap
/// single-generator dispatch survives the base case but overloads the ring
/// under a line outage, so the security-constrained optimum must split
/// generation at a higher cost.
fn cycle3() -> Network {
    let buses = vec![
        bus(1, 0.0, 0.0, 100.0, 1.0, 1.0),
        load_bus(2, 60.0, 1.0),
        bus(3, 0.0, 0.0, 100.0, 3.0, 1.0),
    ];
    let branches = vec![
        branch(1, 1, 2, 62.0, false, 0.0),
        branch(2, 2, 3, 62.0, false, 0.0),
        branch(3, 1, 3, 45.0, false, 0.0),
    ];
    Network::new("cycle3", buses, branches).expect("fixture is valid")
}

/// Parallel line pairs around a single unswitchable bridge: the bridge is
/// the only branch whose outage islands the system, so the default
/// contingency set is everything but it.
fn bridge2() -> Network {
    let buses = vec![
        bus(1, 0.0, 0.0, 50.0, 1.0, 1.0),
        load_bus(2, 0.0, 1.0),
        load_bus(3, 0.0, 1.0),
        load_bus(4, 10.0, 1.0),
    ];
    let branches = vec![
        branch(1, 1, 2, 50.0, true, 0.0),
        branch(2, 1, 2, 50.0, true, 0.0),
        branch(3, 2, 3, 50.0, false, 0.0),
        branch(4, 3, 4, 50.0, true, 0.0),
        branch(5, 3, 4, 50.0, true, 0.0),
    ];
    Network::new("bridge2", buses, branches).expect("fixture is valid")
}

/// A generation-rich core feeding a pure-load pocket through one boundary
/// bus, with an unswitchable spine split in two: both contraction stages
/// fire, shrinking the connectedness block strictly.
fn nis_demo() -> Network {
    let buses = vec![
        bus(1, 0.0, 0.0, 200.0, 1.0, 3.0),
        bus(2, 0.0, 0.0, 150.0, 1.5, 3.0),
        load_bus(3, 30.0, 3.0),
        bus(4, 0.0, 0.0, 100.0, 2.0, 3.0),
        load_bus(5, 10.0, 3.0),
        load_bus(6, 20.0, 3.0),
        load_bus(7, 20.0, 3.0),
        load_bus(8, 20.0, 3.0),
    ];
    let branches = vec![
        branch(1, 1, 2, 150.0, false, 0.0),
        branch(2, 2, 3, 150.0, false, 0.0),
        branch(3, 3, 4, 150.0, true, 0.0),
        branch(4, 4, 5, 150.0, false, 0.0),
        branch(5, 1, 4, 150.0, true, 0.0),
        branch(6, 2, 5, 150.0, true, 0.0),
        branch(7, 5, 6, 150.0, true, 0.0),
        branch(8, 6, 7, 150.0, true, 0.0),
        branch(9, 7, 8, 150.0, true, 0.0),
        branch(10, 6, 8, 150.0, true, 0.0),
    ];
    Network::new("nis-demo", buses, branches).expect("fixture is valid")
}

/// Builds a bundled case by name.
pub fn make_fixture(name: &str) -> Result<Network, HarnessError> {
    match name {
        "fig1" => Ok(fig1()),
        "cycle3" => Ok(cycle3()),
        "bridge2" => Ok(bridge2()),
        "nis-demo" => Ok(nis_demo()),
        other => Err(HarnessError::UnknownFixture(other.to_string())),
    }
}

/// Writes a bundled case to disk in canonical JSON.
pub fn write_fixture(name: &str, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let network = make_fixture(name)?;
    std::fs::write(path, to_canonical_json(&network))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ots_core::{default_contingencies, parse_case};
    use std::collections::BTreeSet;

    #[test]
    fn fixtures_round_trip_canonically() {
        for name in FIXTURE_NAMES {
            let net = make_fixture(name).unwrap();
            let text = to_canonical_json(&net);
            let reloaded = parse_case(&text).unwrap();
            assert_eq!(reloaded, net, "{name}");
            assert_eq!(to_canonical_json(&reloaded), text, "{name}");
        }
    }

    #[test]
    fn fig1_shape() {
        let net = make_fixture("fig1").unwrap();
        assert_eq!(net.bus_count(), 6);
        assert_eq!(net.branch_count(), 8);
        // Every branch survives a single outage: two triangles and a
        // doubled cutset.
        let c = default_contingencies(&net);
        assert_eq!(c.branch_ids, (1..=8).collect::<BTreeSet<_>>());
    }

    #[test]
    fn bridge2_contingencies_exclude_the_bridge() {
        let net = make_fixture("bridge2").unwrap();
        let c = default_contingencies(&net);
        assert_eq!(c.branch_ids, BTreeSet::from([1, 2, 4, 5]));
    }

    #[test]
    fn unknown_fixture_is_an_error() {
        assert!(matches!(make_fixture("fig9"), Err(HarnessError::UnknownFixture(_))));
    }
}
