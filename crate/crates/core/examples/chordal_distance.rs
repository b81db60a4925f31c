//! Distances between subspaces of C^3.
//!
//! `cargo run --example chordal_distance`

use ifbc::linalg::{chordal_distance, gso, real_matrix};

fn main() -> ifbc::Result<()> {
    let e1 = gso(&real_matrix(3, 1, &[1.0, 0.0, 0.0])?)?;
    let e2 = gso(&real_matrix(3, 1, &[0.0, 1.0, 0.0])?)?;
    let tilted = gso(&real_matrix(3, 1, &[1.0, 1.0, 0.0])?)?;
    let plane = gso(&real_matrix(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0])?)?;

    println!("e1 vs e1          {:.4}", chordal_distance(&e1, &e1)?);
    println!("e1 vs e2          {:.4}", chordal_distance(&e1, &e2)?);
    println!("e1 vs (e1+e2)/√2  {:.4}", chordal_distance(&e1, &tilted)?);
    println!("e1 vs span(e1,e2) {:.4}", chordal_distance(&e1, &plane)?);
    Ok(())
}
