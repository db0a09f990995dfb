//! Orthonormal Hermite/Legendre polynomials and Gauss rules.

use fracpce::polybasis::{eval_orthonormal_1d, gauss_rule, GermFamily};

fn main() -> fracpce::Result<()> {
    for family in [GermFamily::Hermite, GermFamily::Legendre] {
        let rule = gauss_rule(family, 8)?;
        println!("{family:?}: 8-point rule, weights sum to {:.15}", rule.weights.iter().sum::<f64>());
        // Gram matrix of degrees 0..4, exact with 8 points
        for i in 0..5 {
            let row: Vec<String> = (0..5)
                .map(|j| {
                    let g: f64 = rule
                        .nodes
                        .iter()
                        .zip(&rule.weights)
                        .map(|(&x, &w)| w * eval_orthonormal_1d(family, i, x) * eval_orthonormal_1d(family, j, x))
                        .sum();
                    format!("{g:6.3}")
                })
                .collect();
            println!("  {}", row.join(" "));
        }
    }
    Ok(())
}
