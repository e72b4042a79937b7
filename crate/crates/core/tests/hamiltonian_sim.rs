use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use qbench::circuit::{haar_state, Circuit, Params, Pauli, Statevector};
use qbench::hamiltonian::*;
use qbench::rng::rng_from_seed;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn pauli_matrix(p: Pauli) -> DMatrix<C> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Kronecker product with qubit 0 as the rightmost (least significant) factor.
fn kron_string(p: &PauliString, n: usize) -> DMatrix<C> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in (0..n).rev() {
        m = m.kronecker(&pauli_matrix(p.get(q)));
    }
    m
}

fn kron_hamiltonian(h: &HamiltonianSpec) -> DMatrix<C> {
    let dim = 1 << h.n_qubits;
    let mut m = DMatrix::zeros(dim, dim);
    for t in &h.terms {
        m += kron_string(&t.pauli, h.n_qubits) * c(t.coeff, 0.0);
    }
    m
}

/// Fermionic annihilator on mode j: `c_j|b⟩ = (−1)^{#occupied below j} |b − e_j⟩`.
fn annihilator(j: usize, n_modes: usize) -> DMatrix<C> {
    let dim = 1 << n_modes;
    let mut m = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        if b >> j & 1 == 1 {
            let sign = if (b & ((1 << j) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(b ^ (1 << j), b)] = c(sign, 0.0);
        }
    }
    m
}

fn fermionic_hubbard(lattice: &Lattice, t: f64, v: f64, spinful: bool) -> DMatrix<C> {
    let n = lattice.n_sites;
    let modes = if spinful { 2 * n } else { n };
    let dim = 1 << modes;
    let ops: Vec<DMatrix<C>> = (0..modes).map(|j| annihilator(j, modes)).collect();
    let mut h = DMatrix::zeros(dim, dim);
    let spins = if spinful { 2 } else { 1 };
    for s in 0..spins {
        for &(i, j) in &lattice.edges {
            let (a, b) = (&ops[s * n + i], &ops[s * n + j]);
            h -= (a.adjoint() * b + b.adjoint() * a) * c(t, 0.0);
        }
    }
    if spinful {
        let id = DMatrix::<C>::identity(dim, dim);
        for i in 0..n {
            let nu = ops[i].adjoint() * &ops[i];
            let nd = ops[n + i].adjoint() * &ops[n + i];
            h += (nu * nd - id.clone() * c(0.25, 0.0)) * c(v, 0.0);
        }
    }
    h
}

fn max_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn exact_evolution(h: &DMatrix<C>, psi: &[C], t: f64) -> Vec<C> {
    let eig = h.clone().symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C::from_polar(1.0, -e * t)));
    let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    (u * DVector::from_column_slice(psi)).iter().copied().collect()
}

fn distance(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn run_circuit(c: &Circuit, psi: &Statevector) -> Statevector {
    let mut out = psi.clone();
    out.run(c, &Params::new()).unwrap();
    out
}

fn total_number(psi: &Statevector) -> f64 {
    (0..psi.n_qubits()).map(|q| (1.0 - psi.expect_z(q)) / 2.0).sum()
}

fn sublattice_imbalance(lattice: &Lattice, n: &[f64]) -> f64 {
    let (mut o, mut u) = (0.0, 0.0);
    for (i, x) in n.iter().enumerate() {
        if lattice.cdw_occupied(i) {
            o += x;
        } else {
            u += x;
        }
    }
    (o - u) / (o + u)
}

#[test]
fn hubbard_matches_fermionic_matrix() {
    let chain = Lattice::chain(2).unwrap();
    let h = build_hubbard(&chain, 1.0, 0.0, false).unwrap();
    let mut expected = DMatrix::<C>::zeros(4, 4);
    expected[(1, 2)] = c(-1.0, 0.0);
    expected[(2, 1)] = c(-1.0, 0.0);
    assert!(max_diff(&dense_matrix(&h).unwrap(), &expected) < 1e-15);

    for (lattice, t, v, spinful) in [
        (Lattice::square(2, 2).unwrap(), 0.7, 0.0, false),
        (Lattice::chain(3).unwrap(), 1.0, 2.5, true),
        (Lattice::square(2, 2).unwrap(), 1.3, -0.8, true),
    ] {
        let h = build_hubbard(&lattice, t, v, spinful).unwrap();
        let oracle = fermionic_hubbard(&lattice, t, v, spinful);
        assert!(max_diff(&dense_matrix(&h).unwrap(), &oracle) < 1e-12);
        assert!(max_diff(&kron_hamiltonian(&h), &oracle) < 1e-12);
    }
}

#[test]
fn two_site_heisenberg_spectrum() {
    let h = build_heisenberg(&Lattice::chain(2).unwrap()).unwrap();
    // XX + YY + ZZ = 2·SWAP − 1: triplet at −1 (threefold), singlet at +3.
    let eig = dense_matrix(&h).unwrap().symmetric_eigen();
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    for (a, b) in ev.iter().zip([-1.0, -1.0, -1.0, 3.0]) {
        assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(ground_energy_dense(&h).unwrap(), -1.0, epsilon = 1e-12);

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = Statevector::from_amplitudes(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
    assert_abs_diff_eq!(energy_expectation(&bell, &h).unwrap(), -1.0, epsilon = 1e-12);
    let singlet = dimer_singlet_state(2, &[(0, 1)]).unwrap();
    assert_abs_diff_eq!(energy_expectation(&singlet, &h).unwrap(), 3.0, epsilon = 1e-12);
}

#[test]
fn energy_expectation_basics() {
    let zs = HamiltonianSpec::from_terms(
        Model::Heisenberg { coupling: 1.0 },
        Lattice::chain(3).unwrap(),
        3,
        vec![
            PauliTerm { coeff: 0.5, pauli: "Z0".parse().unwrap() },
            PauliTerm { coeff: -1.25, pauli: "Z1 Z2".parse().unwrap() },
            PauliTerm { coeff: 2.0, pauli: "Z2".parse().unwrap() },
        ],
    )
    .unwrap();
    assert_abs_diff_eq!(energy_expectation(&Statevector::zero(3).unwrap(), &zs).unwrap(), 1.25, epsilon = 1e-15);

    let h = build_hubbard(&Lattice::square(2, 2).unwrap(), 1.0, 1.5, true).unwrap();
    let m = kron_hamiltonian(&h);
    let mut rng = rng_from_seed(5);
    for _ in 0..5 {
        let psi = haar_state(8, &mut rng).unwrap();
        let v = DVector::from_column_slice(psi.amplitudes());
        let oracle = (v.adjoint() * &m * &v)[(0, 0)];
        assert!(oracle.im.abs() < 1e-10);
        assert_abs_diff_eq!(energy_expectation(&psi, &h).unwrap(), oracle.re, epsilon = 1e-10);
    }
    assert!(matches!(
        energy_expectation(&Statevector::zero(3).unwrap(), &h),
        Err(HamiltonianError::DimensionMismatch { state: 3, hamiltonian: 8 })
    ));
}

#[test]
fn sector_blocks_reproduce_spectrum() {
    let h = build_hubbard(&Lattice::chain(3).unwrap(), 1.0, 2.0, true).unwrap();
    let full = dense_matrix(&h).unwrap().symmetric_eigen();
    let mut all: Vec<f64> = full.eigenvalues.iter().copied().collect();
    let mut blocks = Vec::new();
    for k in 0..=h.n_qubits {
        let (basis, m) = sector_matrix(&h, k).unwrap();
        assert_eq!(basis.len(), m.nrows());
        blocks.extend(m.symmetric_eigen().eigenvalues.iter().copied());
    }
    all.sort_by(f64::total_cmp);
    blocks.sort_by(f64::total_cmp);
    for (a, b) in all.iter().zip(&blocks) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
    }
    // A transverse field breaks number conservation.
    let tf = HamiltonianSpec::from_terms(
        Model::Heisenberg { coupling: 1.0 },
        Lattice::chain(2).unwrap(),
        2,
        vec![PauliTerm { coeff: 1.0, pauli: "X0".parse().unwrap() }],
    )
    .unwrap();
    assert!(sector_matrix(&tf, 1).is_err());
}

#[test]
fn kagome_lanczos_matches_dense() {
    let lattice = Lattice::kagome_patch(2, 2).unwrap();
    assert_eq!(lattice.n_sites, 12);
    for coupling in [-1.0, 1.0] {
        let h = build_heisenberg_with(&lattice, coupling).unwrap();
        let dense = ground_energy_dense(&h).unwrap();
        let lanczos = ground_energy_lanczos(&h, 300, 1e-12, 42).unwrap();
        assert!((dense - lanczos).abs() < 1e-8, "J={coupling}: dense {dense} lanczos {lanczos}");
    }
    // The ferromagnet's ground state is fully polarized: −|edges|.
    let h = build_heisenberg(&lattice).unwrap();
    assert_abs_diff_eq!(ground_energy_dense(&h).unwrap(), -(lattice.edges.len() as f64), epsilon = 1e-9);
}

#[test]
fn single_term_circuit_is_exact() {
    let dt = 0.37;
    let mut rng = rng_from_seed(9);
    for (label, coeff) in [("Z2", 0.9), ("X0", -1.1), ("Y3", 0.4), ("X0 Y2", 0.7), ("Z1 Z3", 1.3), ("X0 Z1 Y2", -0.6), ("Y0 X1 Z2 X3", 0.8)] {
        let p: PauliString = label.parse().unwrap();
        let h = HamiltonianSpec::from_terms(
            Model::Heisenberg { coupling: 1.0 },
            Lattice::chain(4).unwrap(),
            4,
            vec![PauliTerm { coeff, pauli: p }],
        )
        .unwrap();
        let circuit = trotter_step_circuit(&h, dt).unwrap();
        let pm = kron_string(&p, 4);
        let theta = coeff * dt;
        let u = DMatrix::<C>::identity(16, 16) * c(theta.cos(), 0.0) - pm * c(0.0, theta.sin());
        for _ in 0..3 {
            let psi = haar_state(4, &mut rng).unwrap();
            let expected = u.clone() * DVector::from_column_slice(psi.amplitudes());
            let got = run_circuit(&circuit, &psi);
            assert!(distance(got.amplitudes(), expected.as_slice()) < 1e-12, "{label}");
        }
    }
}

#[test]
fn zero_time_step_is_identity() {
    let h = build_hubbard(&Lattice::square(2, 2).unwrap(), 1.0, 2.0, true).unwrap();
    let circuit = trotter_step_circuit(&h, 0.0).unwrap();
    assert!(!circuit.is_empty());
    let psi = haar_state(8, &mut rng_from_seed(1)).unwrap();
    assert!(distance(run_circuit(&circuit, &psi).amplitudes(), psi.amplitudes()) < 1e-12);
    assert!(trotter_step_circuit(&h, f64::NAN).is_err());
}

#[test]
fn trotter_error_is_first_order() {
    let h = build_hubbard(&Lattice::chain(2).unwrap(), 1.0, 2.0, true).unwrap();
    let total = 1.0;
    let psi = haar_state(4, &mut rng_from_seed(3)).unwrap();
    let exact = exact_evolution(&kron_hamiltonian(&h), psi.amplitudes(), total);
    let scaled: Vec<f64> = [4usize, 8, 16, 32]
        .iter()
        .map(|&k| {
            let step = trotter_step_circuit(&h, total / k as f64).unwrap();
            let mut state = psi.clone();
            for _ in 0..k {
                state.run(&step, &Params::new()).unwrap();
            }
            distance(state.amplitudes(), &exact) * k as f64
        })
        .collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    assert!(lo > 1e-6, "no Trotter error observed: {scaled:?}");
    assert!(hi / lo <= 2.0, "k·err not constant within 2×: {scaled:?}");
}

#[test]
fn krylov_evolution_matches_eigendecomposition() {
    let h = build_hubbard(&Lattice::square(2, 2).unwrap(), 1.0, 1.7, true).unwrap();
    let m = kron_hamiltonian(&h);
    let psi = haar_state(8, &mut rng_from_seed(21)).unwrap();
    for t in [0.0, 0.3, 2.5, -1.0] {
        let got = evolve_exact(&h, &psi, t).unwrap();
        let want = exact_evolution(&m, psi.amplitudes(), t);
        assert!(distance(got.amplitudes(), &want) < 1e-10, "t={t}");
    }
}

#[test]
fn free_fermion_oracle_closed_forms() {
    let chain = Lattice::chain(2).unwrap();
    for t in [0.0f64, 0.4, 1.0, 2.7] {
        let n = free_fermion_oracle(&chain, 1.0, &[true, false], t).unwrap();
        assert_abs_diff_eq!(n[0], t.cos().powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(n[1], t.sin().powi(2), epsilon = 1e-12);
    }
    let isolated = Lattice::from_edges(4, vec![]).unwrap();
    let n = free_fermion_oracle(&isolated, 1.0, &[true, false, true, false], 3.0).unwrap();
    assert_eq!(n, vec![1.0, 0.0, 1.0, 0.0]);
    assert!(free_fermion_oracle(&chain, 1.0, &[true], 1.0).is_err());
}

#[test]
fn free_fermions_on_4x4_match_full_statevector() {
    let lattice = Lattice::square(4, 4).unwrap();
    let h = build_hubbard(&lattice, 1.0, 0.0, false).unwrap();
    assert_eq!(h.n_qubits, 16);
    let psi = evolve_exact(&h, &cdw_state(&h).unwrap(), 1.0).unwrap();
    let occupied: Vec<bool> = (0..16).map(|i| lattice.cdw_occupied(i)).collect();
    let oracle = free_fermion_oracle(&lattice, 1.0, &occupied, 1.0).unwrap();
    for (i, want) in oracle.iter().enumerate() {
        let got = (1.0 - psi.expect_z(i)) / 2.0;
        assert!((got - want).abs() < 1e-8, "site {i}: {got} vs {want}");
    }
}

#[test]
fn frozen_occupations_without_hopping() {
    let h = build_hubbard(&Lattice::square(2, 2).unwrap(), 0.0, 1.0, true).unwrap();
    let tr = evolve_dynamics(&h, &DynamicsConfig::noiseless(3.0, 10)).unwrap();
    assert_eq!(tr.points.len(), 11);
    for p in &tr.points {
        assert_abs_diff_eq!(p.observable, 1.0, epsilon = 1e-12);
    }
}

#[test]
fn two_site_imbalance_follows_cos_2t() {
    let h = build_hubbard(&Lattice::chain(2).unwrap(), 1.0, 0.0, false).unwrap();
    let psi0 = cdw_state(&h).unwrap();
    assert_eq!(psi0.probabilities()[1], 1.0);
    for t in [0.5f64, 1.0, 2.0] {
        let exact = (2.0 * t).cos();
        let fine = evolve_dynamics(&h, &DynamicsConfig::noiseless(t, 256)).unwrap();
        assert!((fine.last() - exact).abs() < 1e-3, "T={t}: {}", fine.last());
        // The two hopping strings commute, so every step count is exact.
        let coarse = evolve_dynamics(&h, &DynamicsConfig::noiseless(t, 8)).unwrap();
        for p in &coarse.points {
            assert_abs_diff_eq!(p.observable, (2.0 * t * p.steps as f64 / 8.0).cos(), epsilon = 1e-10);
        }
        let continuous = imbalance(&evolve_exact(&h, &psi0, t).unwrap(), &h).unwrap();
        assert_abs_diff_eq!(continuous, exact, epsilon = 1e-10);
    }
}

#[test]
fn square_trace_tracks_free_fermion_oracle() {
    let lattice = Lattice::square(2, 2).unwrap();
    let occupied: Vec<bool> = (0..4).map(|i| lattice.cdw_occupied(i)).collect();
    for spinful in [false, true] {
        let h = build_hubbard(&lattice, 1.0, 0.0, spinful).unwrap();
        let tr = evolve_dynamics(&h, &DynamicsConfig::noiseless(2.0, 64)).unwrap();
        for p in &tr.points {
            let n = free_fermion_oracle(&lattice, 1.0, &occupied, 2.0 * p.steps as f64 / 64.0).unwrap();
            let want = sublattice_imbalance(&lattice, &n);
            assert!((p.observable - want).abs() < 0.02, "step {}: {} vs {want}", p.steps, p.observable);
        }
    }
}

#[test]
fn full_depolarization_erases_imbalance() {
    let h = build_hubbard(&Lattice::chain(2).unwrap(), 1.0, 0.0, false).unwrap();
    let cfg = DynamicsConfig { total_time: 1.0, steps: 4, noise: NoiseModel::new(1.0).unwrap(), shots: 2000, seed: 4 };
    let tr = evolve_dynamics(&h, &cfg).unwrap();
    let last = tr.points.last().unwrap();
    assert!(last.stderr > 0.0);
    assert!(last.observable.abs() < 4.0 * last.stderr + 1e-3, "{last:?}");
}

#[test]
fn noiseless_trajectories_are_bit_exact() {
    let h = build_hubbard(&Lattice::square(2, 2).unwrap(), 1.0, 0.0, false).unwrap();
    let plain = evolve_dynamics(&h, &DynamicsConfig::noiseless(2.0, 16)).unwrap();
    let traj = evolve_dynamics(
        &h,
        &DynamicsConfig { total_time: 2.0, steps: 16, noise: NoiseModel::noiseless(), shots: 50, seed: 99 },
    )
    .unwrap();
    assert_eq!(plain.values(), traj.values());

    let step = trotter_step_circuit(&h, 0.125).unwrap();
    let mut a = cdw_state(&h).unwrap();
    a.run(&step, &Params::new()).unwrap();
    let mut b = cdw_state(&h).unwrap();
    let errors = run_noisy(&mut b, &step, &NoiseModel::noiseless(), &mut rng_from_seed(1)).unwrap();
    assert_eq!(errors, 0);
    assert_eq!(a, b);
}

#[test]
fn noisy_traces_are_deterministic() {
    let h = build_hubbard(&Lattice::square(2, 2).unwrap(), 1.0, 0.0, false).unwrap();
    let cfg = DynamicsConfig { total_time: 2.0, steps: 8, noise: NoiseModel::new(0.02).unwrap(), shots: 64, seed: 5 };
    let a = evolve_dynamics(&h, &cfg).unwrap();
    assert_eq!(a, evolve_dynamics(&h, &cfg).unwrap());
    assert_ne!(a, evolve_dynamics(&h, &DynamicsConfig { seed: 6, ..cfg }).unwrap());
    let csv = a.to_csv();
    assert!(csv.starts_with("steps,observable,stderr,p,shots,seed\n"));
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn dynamics_argument_errors() {
    let h = build_hubbard(&Lattice::chain(2).unwrap(), 1.0, 0.0, false).unwrap();
    let noisy = DynamicsConfig { total_time: 1.0, steps: 4, noise: NoiseModel { p: 0.1 }, shots: 0, seed: 0 };
    assert!(evolve_dynamics(&h, &noisy).is_err());
    assert!(evolve_dynamics(&h, &DynamicsConfig::noiseless(1.0, 0)).is_err());
    assert!(evolve_dynamics(&h, &DynamicsConfig { noise: NoiseModel { p: 1.5 }, shots: 4, ..noisy }).is_err());
    assert!(NoiseModel::new(-0.1).is_err());
    let heis = build_heisenberg(&Lattice::chain(2).unwrap()).unwrap();
    assert!(evolve_dynamics(&heis, &DynamicsConfig::noiseless(1.0, 4)).is_err());
}

#[test]
fn dimer_singlets_minimize_each_dimer() {
    let lattice = Lattice::square(2, 2).unwrap();
    let pairs = lattice.perfect_matching().unwrap();
    let psi = dimer_singlet_state(4, &pairs).unwrap();
    assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-14);
    let dimers = Lattice::from_edges(4, pairs.clone()).unwrap();
    let h = build_heisenberg_with(&dimers, 1.0).unwrap();
    assert_abs_diff_eq!(energy_expectation(&psi, &h).unwrap(), -3.0 * pairs.len() as f64, epsilon = 1e-12);
    assert!(dimer_singlet_state(4, &[(0, 1), (1, 2)]).is_err());
}

#[test]
fn adiabatic_chain_reaches_ground_energy() {
    let chain = Lattice::chain(4).unwrap();
    let h = build_heisenberg_with(&chain, 1.0).unwrap();
    let exact = ground_energy_dense(&h).unwrap() / 4.0;
    let tr = adiabatic_prepare(&h, &DynamicsConfig::noiseless(16.0, 64)).unwrap();
    assert_eq!(tr.points.len(), 65);
    assert_abs_diff_eq!(tr.points[0].observable, -1.5, epsilon = 1e-12);
    assert!(tr.last() >= exact - 1e-12);
    assert!((tr.last() - exact) / exact.abs() < 0.02, "{} vs {exact}", tr.last());
}

#[test]
fn adiabatic_energy_improves_with_total_time() {
    let h = build_heisenberg_with(&Lattice::chain(4).unwrap(), 1.0).unwrap();
    let finals: Vec<f64> = [4.0, 8.0, 16.0]
        .iter()
        .map(|&t| adiabatic_prepare(&h, &DynamicsConfig::noiseless(t, 256)).unwrap().last())
        .collect();
    assert!(finals[0] >= finals[1] && finals[1] >= finals[2], "{finals:?}");
}

#[test]
fn trivial_adiabatic_path_is_stationary() {
    let dimers = Lattice::from_edges(6, vec![(0, 1), (2, 3), (4, 5)]).unwrap();
    let h = build_heisenberg_with(&dimers, 1.0).unwrap();
    for steps in [1, 7, 32] {
        let tr = adiabatic_prepare(&h, &DynamicsConfig::noiseless(5.0, steps)).unwrap();
        for p in &tr.points {
            assert_abs_diff_eq!(p.observable, -1.5, epsilon = 1e-12);
        }
    }
}

#[test]
fn adiabatic_requires_dimer_cover() {
    let h = build_heisenberg(&Lattice::chain(3).unwrap()).unwrap();
    assert_eq!(adiabatic_prepare(&h, &DynamicsConfig::noiseless(1.0, 4)), Err(HamiltonianError::NoPerfectMatching));
}

#[test]
fn noisier_adiabatic_runs_reach_higher_minima() {
    let h = build_heisenberg_with(&Lattice::square(2, 4).unwrap(), 1.0).unwrap();
    let minima: Vec<f64> = [0.0, 0.0005, 0.001, 0.002]
        .iter()
        .map(|&p| {
            let cfg = DynamicsConfig { total_time: 4.0, steps: 16, noise: NoiseModel::new(p).unwrap(), shots: 200, seed: 17 };
            adiabatic_prepare(&h, &cfg).unwrap().min_observable()
        })
        .collect();
    assert!(minima.windows(2).all(|w| w[1] >= w[0]), "{minima:?}");
    assert!(minima[0] < -2.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trotter_steps_conserve_particle_number(t in -2.0f64..2.0, v in -3.0f64..3.0, dt in 0.01f64..0.5, seed in 0u64..1000) {
        let h = build_hubbard(&Lattice::square(2, 2).unwrap(), t, v, true).unwrap();
        let step = trotter_step_circuit(&h, dt).unwrap();
        let mut psi = cdw_state(&h).unwrap();
        let n0 = total_number(&psi);
        for _ in 0..3 {
            psi.run(&step, &Params::new()).unwrap();
            prop_assert!((total_number(&psi) - n0).abs() < 1e-9);
        }
        let noisy = DynamicsConfig { total_time: 1.0, steps: 3, noise: NoiseModel::new(0.0).unwrap(), shots: 3, seed };
        prop_assert_eq!(evolve_dynamics(&h, &noisy).unwrap(), evolve_dynamics(&h, &noisy).unwrap());
    }

    #[test]
    fn energy_expectation_is_real(seed in 0u64..10_000) {
        let h = build_heisenberg_with(&Lattice::kagome_patch(1, 1).unwrap(), 0.7).unwrap();
        let psi = haar_state(3, &mut rng_from_seed(seed)).unwrap();
        prop_assert!(expectation_complex(&h.terms, psi.amplitudes()).im.abs() < 1e-10);
        prop_assert!(energy_expectation(&psi, &h).is_ok());
    }
}
