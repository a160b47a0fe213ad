mod common;

use common::*;
use dynamic_resistance::{stream_from_seed, DeleteRule, DynamicSc, DynamicScParams, TerminalSet};
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum Op {
    Insert(usize, usize),
    Delete(usize),
    AddTerminal(usize),
}

fn op(n: usize) -> impl Strategy<Value = Op> {
    prop_oneof![
        4 => (0..n, 1..n).prop_map(move |(a, d)| Op::Insert(a, (a + d) % n)),
        4 => any::<usize>().prop_map(Op::Delete),
        1 => (0..n).prop_map(Op::AddTerminal),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_operations_keep_every_invariant(
        seed in any::<u64>(),
        first_visit in any::<bool>(),
        ops in prop::collection::vec(op(10), 1..60),
    ) {
        let n = 10;
        let mut rng = stream_from_seed(seed);
        let g = random_connected(n, 5, &mut rng);
        let params = DynamicScParams {
            beta: 0.3,
            rho: 3,
            step_cap: 12,
            insert_terminal_prob: Some(0.1),
            delete_rule: if first_visit { DeleteRule::FirstVisit } else { DeleteRule::FirstTraversal },
        };
        let mut sc = DynamicSc::initialize(g, TerminalSet::from_vertices(n, [v(0)]), params, rng);
        for op in ops {
            match op {
                Op::Insert(a, b) => { sc.insert(v(a), v(b)).unwrap(); }
                Op::Delete(i) => {
                    let live: Vec<_> = sc.graph().edges().map(|(e, _, _)| e).collect();
                    if !live.is_empty() {
                        sc.delete(live[i % live.len()]).unwrap();
                    }
                }
                Op::AddTerminal(x) => { sc.add_terminal(v(x)).unwrap(); }
            }
            prop_assert_eq!(sc.audit(), Ok(()));
            prop_assert!(sc.store().truncated_steps() <= sc.store().generated_steps());
        }
    }
}
