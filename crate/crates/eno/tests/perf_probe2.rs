use std::time::Instant;

use eno::diffengine::{Scalar, Tape};
use eno::energetics::{gradient_flow, DiffOperator, LearnedEnergy};
use eno::networks::{EnergyNet, OperatorNet};
use eno::training::operator_jets_at;

#[test]
#[ignore]
fn probe_phases() {
    let mut op = OperatorNet::new(10, 2, &[32, 32], 1);
    op.init_weights(1);
    let mut en = EnergyNet::new(1, 1, &[16, 16]);
    en.init_weights(2);
    let a_bar: Vec<f64> = (0..10).map(|i| (i as f64 * 0.3).sin()).collect();
    let y = [0.2_f64, 4.0];

    let tape = Tape::with_capacity(1 << 22);
    let theta = tape.leaves(op.core().params());
    let phi = tape.leaves(en.core().params());
    let stem = op.stem(&theta, &a_bar).unwrap();
    let mark = tape.mark();

    let n0 = tape.len();
    let seeds = (tape.leaf(y[0]), tape.leaf(y[1]));
    let (_ud, u_jets) = operator_jets_at(&op, &theta, &stem, &y, 3, seeds);
    let n1 = tape.len();
    let density = LearnedEnergy::new(&en, &phi[..]);
    let flow = gradient_flow(DiffOperator::SkewFirstDeriv, &density, &u_jets).unwrap();
    let n2 = tape.len();
    println!("operator jets: {} nodes, flow: {} nodes", n1 - n0, n2 - n1);
    let _ = flow;
    tape.rewind(mark);

    // bare tape push speed
    let reps = 3_000_000;
    let a = tape.leaf(1.1);
    let b = tape.leaf(0.9);
    let m2 = tape.mark();
    let t0 = Instant::now();
    let mut acc = a;
    for _ in 0..reps {
        acc = acc.add(b.mul(a));
        if tape.len() > (1 << 22) - 8 {
            tape.rewind(m2);
            acc = a;
        }
    }
    let per = t0.elapsed().as_secs_f64() / (2 * reps) as f64;
    println!("bare push: {:.2} ns/node", per * 1e9);

    // operator-jet phase timing
    let t0 = Instant::now();
    let reps2 = 1000;
    for _ in 0..reps2 {
        tape.rewind(m2);
        let seeds = (tape.leaf(y[0]), tape.leaf(y[1]));
        let _ = operator_jets_at(&op, &theta, &stem, &y, 3, seeds);
    }
    let op_time = t0.elapsed().as_secs_f64() / reps2 as f64;
    println!("operator jets: {:.1} us ({} nodes -> {:.1} ns/node)", op_time * 1e6, n1 - n0, op_time * 1e9 / (n1 - n0) as f64);
}
