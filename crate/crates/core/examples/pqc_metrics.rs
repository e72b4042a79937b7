//! Expressibility and entangling capability of several circuit templates.
//!
//! ```bash
//! cargo run --release --example pqc_metrics
//! ```

use qbench::circuit::{
    bell_template, euler_template, expressibility, identity_template, mw_of_template, qcnn_ansatz,
    strongly_entangling_layer, MwForm,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let templates = [
        ("identity (1q)", identity_template(1)?),
        ("euler (1q)", euler_template()),
        ("bell (2q)", bell_template()),
        ("strongly entangling (4q, 1 layer)", strongly_entangling_layer(4, 0)?),
        ("qcnn (4q, 2 layers)", qcnn_ansatz(4, 2)?),
    ];
    println!("{:<36} {:>8} {:>8} {:>8}", "template", "gates", "Expr", "MW");
    for (name, c) in &templates {
        let expr = expressibility(c, 2000, 75, 1)?;
        let mw = if c.n_qubits() > 1 { mw_of_template(c, 500, 2, MwForm::Linear)? } else { 0.0 };
        println!("{name:<36} {:>8} {expr:>8.4} {mw:>8.4}", c.len());
    }
    Ok(())
}
