//! Outward-rounded interval arithmetic and double-double balls.
//!
//! ```text
//! cargo run --example interval_arithmetic
//! ```

use cusp::interval::{iv_arith, ArithOp, DdBall, Interval};

fn main() {
    let a = Interval::new(1.0, 2.0);
    let b = Interval::new(-0.5, 0.25);
    for op in [ArithOp::Add, ArithOp::Sub, ArithOp::Mul] {
        println!("{a} {op:?} {b} = {}", iv_arith(a, b, op).unwrap());
    }
    // division by an interval containing zero is an error, not [-inf, inf]
    println!("{a} / {b} -> {:?}", iv_arith(a, b, ArithOp::Div));
    println!("{a} / [2, 4] = {}", iv_arith(a, Interval::new(2.0, 4.0), ArithOp::Div).unwrap());

    // 0.1 is not a binary float; its enclosure has positive width
    let tenth = Interval::from_ratio(1, 10);
    let sum = (0..10).fold(Interval::ZERO, |s, _| s + tenth);
    println!("sum of ten 1/10 = {sum}, contains 1: {}", sum.contains(1.0));

    // cancellation: (1 + 1e-17) - 1 is lost in f64 but kept by a
    // double-double ball, whose radius bounds the rounding error
    let (one, tiny) = (std::hint::black_box(1.0), std::hint::black_box(1e-17));
    let x = DdBall::point(one) + DdBall::point(tiny);
    let d = x - DdBall::point(one);
    println!("f64: {}", (one + tiny) - one);
    println!("double-double: {:?}", d.to_interval().unwrap());
}
