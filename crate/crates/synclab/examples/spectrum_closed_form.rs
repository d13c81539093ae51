// Compare the eigenvalues of the two-clock synchronism against the
// closed form: 1/n once, j/n^2 twice for j = 1..n-1, and (n-1)^2 zeros.
// The state is block diagonal in total energy with block sizes
// 1, 2, ..., n, ..., 2, 1, which is why everything is computable fast.

use synclab::protocol::verify_spectrum;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 2..=8 {
        let rep = verify_spectrum(n)?;
        println!("n = {n}");

        let nonzero = 2 * n - 1;
        print!("  analytic:");
        for v in rep.analytic.iter().take(nonzero) {
            print!(" {v:.6}");
        }
        println!("  (+ {} zeros)", (n - 1) * (n - 1));

        print!("  numeric: ");
        for v in rep.numeric.iter().take(nonzero) {
            print!(" {v:.6}");
        }
        println!();

        let dims: Vec<String> = rep.block_dims.iter().map(|d| d.to_string()).collect();
        println!("  energy blocks: {}", dims.join(" "));
        println!("  max deviation: {:.3e}", rep.max_abs_dev);
        assert!(rep.max_abs_dev < 1e-9);
    }
    println!("all spectra match the closed form to 1e-9");
    Ok(())
}
