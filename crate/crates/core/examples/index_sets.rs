//! Total-degree and hyperbolic truncation sets.

use fracpce::polybasis::{hyperbolic_set, total_degree_set};

fn main() -> fracpce::Result<()> {
    println!(" M  p  total  q=0.75  q=0.5");
    for m in [2, 3, 5, 8] {
        for p in [2, 3, 5] {
            let full = total_degree_set(m, p)?.len();
            let h75 = hyperbolic_set(m, p, 0.75)?.len();
            let h50 = hyperbolic_set(m, p, 0.5)?.len();
            println!("{m:2} {p:2} {full:6} {h75:7} {h50:6}");
        }
    }
    let set = hyperbolic_set(2, 4, 0.5)?;
    let idx: Vec<_> = set.indices().iter().map(|a| a.degrees().to_vec()).collect();
    println!("M=2, p=4, q=0.5: {idx:?}");
    Ok(())
}
