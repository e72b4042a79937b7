use super::{Circuit, CircuitError, Result};

/// One strongly entangling layer: `RZ·RY·RZ` on every qubit with fresh
/// symbols `w{layer}_{q}_{k}`, then CNOTs `q → (q + r) mod n` with
/// `r = layer mod (n−1) + 1`.
pub fn strongly_entangling_layer(n_qubits: usize, layer: usize) -> Result<Circuit> {
    if n_qubits < 2 {
        return Err(CircuitError::InvalidArgument("entangling layers need at least 2 qubits".into()));
    }
    let mut c = Circuit::new(n_qubits)?;
    for q in 0..n_qubits {
        c.rz(q, format!("w{layer}_{q}_0")).ry(q, format!("w{layer}_{q}_1")).rz(q, format!("w{layer}_{q}_2"));
    }
    let r = layer % (n_qubits - 1) + 1;
    for q in 0..n_qubits {
        c.cnot(q, (q + r) % n_qubits);
    }
    Ok(c)
}

/// A Hadamard on every qubit followed by `layers` entangling layers.
pub fn qcnn_ansatz(n_qubits: usize, layers: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n_qubits)?;
    for q in 0..n_qubits {
        c.h(q);
    }
    for l in 0..layers {
        c.append(&strongly_entangling_layer(n_qubits, l)?)?;
    }
    Ok(c)
}

/// Single-qubit `RZ(a)·RY(b)·RZ(c)`.
pub fn euler_template() -> Circuit {
    let mut c = Circuit::new(1).expect("one qubit");
    c.rz(0, "a").ry(0, "b").rz(0, "c");
    c
}

/// No gates at all.
pub fn identity_template(n_qubits: usize) -> Result<Circuit> {
    Circuit::new(n_qubits)
}

/// `H(0)` followed by `CNOT(0, 1)`.
pub fn bell_template() -> Circuit {
    let mut c = Circuit::new(2).expect("two qubits");
    c.h(0).cnot(0, 1);
    c
}
