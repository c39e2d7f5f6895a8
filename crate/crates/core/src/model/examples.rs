//! Small reference nets used by tests, benchmarks and the CLI self-check.

use super::net::{validate_workflow_net, PetriNet, WorkflowNet};

/// Builds a net from `(transition id, label)` pairs and `(from, to)` flow.
/// Places are declared in order; the first is `i`, the last is `o`.
pub fn build_net(
    places: &[&str],
    transitions: &[(&str, Option<&str>)],
    flow: &[(&str, &str)],
) -> PetriNet {
    let mut net = PetriNet::new();
    for p in places {
        net.add_place(*p).expect("unique place ids");
    }
    for (id, label) in transitions {
        net.add_transition(*id, *label).expect("unique transition ids");
    }
    for (a, b) in flow {
        net.add_flow(a, b).expect("valid flow");
    }
    net
}

fn validated(net: PetriNet) -> WorkflowNet {
    let o = net.places().len() - 1;
    validate_workflow_net(net, 0, o).expect("reference net is a valid workflow net")
}

/// The loan-application loop model: `A` then `B`, then either `C` to finish,
/// or `D` followed by a silent exit or the loop `E, F` back to `B`.
pub fn running_example() -> WorkflowNet {
    validated(build_net(
        &["i", "p1", "p2", "p3", "p4", "o"],
        &[
            ("tA", Some("A")),
            ("tB", Some("B")),
            ("tC", Some("C")),
            ("tD", Some("D")),
            ("tE", Some("E")),
            ("tF", Some("F")),
            ("tau", None),
        ],
        &[
            ("i", "tA"),
            ("tA", "p1"),
            ("p1", "tB"),
            ("tB", "p2"),
            ("p2", "tC"),
            ("tC", "o"),
            ("p2", "tD"),
            ("tD", "p3"),
            ("p3", "tE"),
            ("tE", "p4"),
            ("p4", "tF"),
            ("tF", "p1"),
            ("p3", "tau"),
            ("tau", "o"),
        ],
    ))
}

/// A loop over `A, B, C` entered and left through silent transitions, so any
/// `(A B C)^k` with `k ≥ 1` fits perfectly.
pub fn abc_loop() -> WorkflowNet {
    validated(build_net(
        &["i", "p0", "p1", "p2", "p3", "o"],
        &[
            ("tA", Some("A")),
            ("tB", Some("B")),
            ("tC", Some("C")),
            ("t_enter", None),
            ("t_exit", None),
            ("t_loop", None),
        ],
        &[
            ("i", "t_enter"),
            ("t_enter", "p0"),
            ("p0", "tA"),
            ("tA", "p1"),
            ("p1", "tB"),
            ("tB", "p2"),
            ("p2", "tC"),
            ("tC", "p3"),
            ("p3", "t_loop"),
            ("t_loop", "p0"),
            ("p3", "t_exit"),
            ("t_exit", "o"),
        ],
    ))
}

/// Two consecutive self-loops in the order `R+` then `C+`, framed by `S` and
/// `T`. Traces that repeat `C, R` in the reversed order exercise the
/// crosswise-match case of alignment extension.
pub fn reversed_loops() -> WorkflowNet {
    validated(build_net(
        &["i", "p1", "p2", "p3", "p4", "o"],
        &[
            ("tS", Some("S")),
            ("tR", Some("R")),
            ("tC", Some("C")),
            ("tT", Some("T")),
            ("t_r_again", None),
            ("t_to_c", None),
            ("t_c_again", None),
        ],
        &[
            ("i", "tS"),
            ("tS", "p1"),
            ("p1", "tR"),
            ("tR", "p2"),
            ("p2", "t_r_again"),
            ("t_r_again", "p1"),
            ("p2", "t_to_c"),
            ("t_to_c", "p3"),
            ("p3", "tC"),
            ("tC", "p4"),
            ("p4", "t_c_again"),
            ("t_c_again", "p3"),
            ("p4", "tT"),
            ("tT", "o"),
        ],
    ))
}
