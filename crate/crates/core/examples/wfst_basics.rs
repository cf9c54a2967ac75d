//! Builds two small transducers by hand, composes them and reads off the
//! best path.

use disfluent_align::wfst::{compose, shortest_path, trim, Arc, FstBuilder, TokenSpace, Weight, EPSILON};

fn main() -> disfluent_align::Result<()> {
    let letters = TokenSpace::new("letters");

    // a:b / 1.0, a:c / 0.5, then eps:d / 0.25
    let mut a = FstBuilder::new(letters.clone(), letters.clone());
    let (s0, s1, s2) = (a.add_state(), a.add_state(), a.add_state());
    a.set_start(s0);
    a.add_arc(s0, Arc::new(1, 2, Weight::new(1.0), s1));
    a.add_arc(s0, Arc::new(1, 3, Weight::new(0.5), s1));
    a.add_arc(s1, Arc::new(EPSILON, 4, Weight::new(0.25), s2));
    a.set_final(s2, Weight::ONE);
    let a = a.freeze()?;

    // accepts "b d" cheaply and "c d" expensively
    let mut b = FstBuilder::acceptor(letters.clone());
    let (t0, t1, t2) = (b.add_state(), b.add_state(), b.add_state());
    b.set_start(t0);
    b.add_arc(t0, Arc::new(2, 2, Weight::new(0.1), t1));
    b.add_arc(t0, Arc::new(3, 3, Weight::new(2.0), t1));
    b.add_arc(t1, Arc::new(4, 4, Weight::ONE, t2));
    b.set_final(t2, Weight::new(0.5));
    let b = b.freeze()?;

    let c = trim(&compose(&a, &b)?);
    println!("composed: {} states, {} arcs", c.num_states(), c.num_arcs());
    print!("{}", c.to_att());

    let best = shortest_path(&c)?;
    println!("best: in {:?} out {:?} cost {:.2}", best.ilabels(), best.olabels(), best.total_cost.cost());
    Ok(())
}
