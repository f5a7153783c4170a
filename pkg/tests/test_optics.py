import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from topophase.invariants import purities, three_tangle
from topophase.optics import (
    ElementKind, InvalidRecipe, PreparationRecipe, calibrate_offset, diagonal_phase,
    element_gate, gates_equal_up_to_phase, pipeline, prepare, run_pipeline, spin_orbit_cnot,
    target_state, wave_pair,
)
from topophase.state import (
    CIRCULAR, CIRCULAR3, LINEAR, LINEAR3, ThreeQubitState, apply_two_qubit, change_basis,
    phase_distance,
)

H = np.array([1, 0], complex)
V = np.array([0, 1], complex)
PLUS = (H + 1j * V) / np.sqrt(2)
MINUS = (H - 1j * V) / np.sqrt(2)
KINDS = ("HWP", "QWP", "DovePrism", "ModeConverter")


def test_hwp_zero():
    m = element_gate("HWP", 0).matrix
    assert np.allclose(m @ V, -V) and np.allclose(m @ H, H)


def test_dove_prism_45_swaps_modes():
    m = element_gate(ElementKind.DOVE_PRISM, np.pi / 4).matrix
    assert np.allclose(m @ H, V, atol=1e-12)


def test_qwp_zero_is_diag_1_i():
    assert np.allclose(element_gate("QWP", 0).matrix, np.diag([1, 1j]))


@pytest.mark.parametrize("theta", np.linspace(-np.pi, np.pi, 9))
def test_hwp_circular_action(theta):
    m = element_gate("HWP", theta).matrix
    assert np.allclose(m @ PLUS, np.exp(2j * theta) * MINUS, atol=1e-12)


def test_mode_converter_maps_lg_to_hg():
    # at 0 the LG+ mode leaves as h up to phase
    out = element_gate("ModeConverter", 0).matrix @ PLUS
    assert abs(abs(out[0]) - 1) < 1e-12


def test_element_rejects_non_finite_and_two_slot():
    with pytest.raises(ValueError):
        element_gate("HWP", np.nan)
    with pytest.raises(ValueError):
        element_gate("SpinOrbitCNOT", 0)
    with pytest.raises(ValueError):
        element_gate("Prism", 0)


def test_diagonal_phase_examples():
    assert np.allclose(diagonal_phase(0).matrix, np.eye(2))
    assert np.allclose(diagonal_phase(2 * np.pi).matrix, -np.eye(2))
    assert np.allclose(diagonal_phase(-np.pi).matrix, np.diag([-1j, 1j]))
    assert diagonal_phase(1.0).basis == CIRCULAR


@pytest.mark.parametrize("kind", ["DHWP", "DDP"])
@pytest.mark.parametrize("theta", [0.0, 0.3, -1.2, 2.5])
def test_wave_pair_examples(kind, theta):
    assert gates_equal_up_to_phase(wave_pair(kind, theta, 0.0), diagonal_phase(0)) < 1e-12
    assert gates_equal_up_to_phase(wave_pair(kind, theta, np.pi / 2),
                                   diagonal_phase(2 * np.pi)) < 1e-12


def test_wave_pair_kind_checked():
    with pytest.raises(ValueError):
        wave_pair("DQWP", 0, 0)


def test_calibrate_offset_examples():
    assert calibrate_offset(0) == 0
    assert abs(calibrate_offset(-np.pi) - np.pi / 4) < 1e-15
    assert abs(calibrate_offset(2 * np.pi) + np.pi / 2) < 1e-15
    with pytest.raises(ValueError):
        calibrate_offset(np.inf)


def test_wave_pair_calibration_random(rng):
    for _ in range(100):
        theta, phi = rng.uniform(-np.pi, np.pi), rng.uniform(-4 * np.pi, 4 * np.pi)
        kind = rng.choice(["DHWP", "DDP"])
        pair = wave_pair(kind, theta, calibrate_offset(phi))
        assert gates_equal_up_to_phase(pair, diagonal_phase(phi)) < 1e-9


def test_wave_pair_eigenphases():
    # composite is diagonal in +/- with eigenphases exp(-+2i delta)
    delta = 0.37
    m = wave_pair("DHWP", 1.1, delta).in_basis(CIRCULAR).matrix
    assert np.allclose(m, np.diag([np.exp(-2j * delta), np.exp(2j * delta)]), atol=1e-12)


def test_cnot_examples():
    g = spin_orbit_cnot()
    for pol, mode, want in ((H, H, (H, H)), (V, H, (V, V)), (V, V, (V, H)), (H, V, (H, V))):
        for idler in (H, V):
            psi = ThreeQubitState.product(pol, mode, idler, LINEAR3)
            out = apply_two_qubit(g, psi)
            assert np.allclose(out.amps, ThreeQubitState.product(*want, idler, LINEAR3).amps)


def test_cnot_maps_source_of_x_state():
    # (|H+H> - i|V+V>)/sqrt2 after the mode converter, then CNOT, gives the X state
    src, steps = pipeline(PreparationRecipe("x"))
    assert phase_distance(target_state(PreparationRecipe("x")), run_pipeline(src, steps)) < 1e-12
    assert any(s.slots == (0, 1) for s in steps)


def test_gates_unitary_for_random_angles(rng):
    for angle in rng.uniform(-10, 10, size=1000):
        for kind in KINDS:
            m = element_gate(kind, angle).matrix
            assert np.max(np.abs(m.conj().T @ m - np.eye(2))) < 1e-12


def test_wave_pair_commutes_with_diagonal_phase(rng):
    for _ in range(200):
        pair = wave_pair(rng.choice(["DHWP", "DDP"]), rng.uniform(-5, 5), rng.uniform(-5, 5))
        u = diagonal_phase(rng.uniform(-10, 10)).in_basis(LINEAR)
        comm = (pair @ u).matrix - (u @ pair).matrix
        assert np.max(np.abs(comm)) < 1e-12


def test_prepare_x_amplitudes():
    psi = prepare("x")
    want = np.zeros(8)
    want[[0, 3, 5, 6]] = 0.5
    assert psi.basis == CIRCULAR3
    assert np.allclose(psi.amps, want, atol=1e-12)


def test_prepare_bghz_amplitudes():
    psi = prepare("bghz", alpha=0.5, beta=np.sqrt(3) / 2)
    want = np.zeros(8, complex)
    want[0], want[7] = 0.5, np.sqrt(3) / 2
    assert np.allclose(psi.amps, want, atol=1e-12)


def test_prepare_ghz():
    psi = prepare("ghz")
    assert np.allclose(np.abs(psi.amps[[0, 7]]), 1 / np.sqrt(2), atol=1e-12)


def test_prepare_prod_x():
    q = (np.exp(-1j * np.pi / 4) * np.array([1, 0]) + np.exp(1j * np.pi / 4) * np.array([0, 1]))
    want = ThreeQubitState.product(q, q, q, normalize=True)
    assert phase_distance(want, prepare("prod_x")) < 1e-12


def test_prepare_prod_bghz_is_product():
    psi = prepare("prod-bghz")
    assert three_tangle(psi) < 1e-12
    assert np.allclose(purities(psi), 1, atol=1e-12)


def test_prod_x_single_qubit_distributions_match_x():
    x, p = prepare("x"), prepare("prod_x")
    for basis in (CIRCULAR3, LINEAR3):
        tx = np.abs(change_basis(x, basis).tensor()) ** 2
        tp = np.abs(change_basis(p, basis).tensor()) ** 2
        for k in range(3):
            axes = tuple(a for a in range(3) if a != k)
            assert np.max(np.abs(tx.sum(axis=axes) - tp.sum(axis=axes))) < 1e-12


@given(st.floats(0.05, np.pi / 2 - 0.05), st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi),
       st.sampled_from(["bghz", "prod_bghz"]))
def test_pipelines_reach_targets(u, pa, pb, target):
    alpha, beta = np.cos(u) * np.exp(1j * pa), np.sin(u) * np.exp(1j * pb)
    if target == "bghz" and abs(abs(alpha) - abs(beta)) <= 1e-6:
        return
    recipe = PreparationRecipe(target, alpha, beta)
    built = run_pipeline(*pipeline(recipe))
    assert phase_distance(target_state(recipe), built) < 1e-9


@pytest.mark.parametrize("target", ["x", "ghz", "bghz", "prod_x", "prod_bghz"])
def test_pipeline_fidelity_default(target):
    recipe = PreparationRecipe(target)
    assert phase_distance(target_state(recipe), run_pipeline(*pipeline(recipe))) < 1e-9


def test_recipe_validation():
    with pytest.raises(InvalidRecipe, match="normalization violated"):
        PreparationRecipe("bghz", 1, 1)
    with pytest.raises(InvalidRecipe):
        PreparationRecipe("bghz", 1 / np.sqrt(2), 1 / np.sqrt(2))
    with pytest.raises(InvalidRecipe):
        PreparationRecipe("cluster")
    with pytest.raises(InvalidRecipe):
        PreparationRecipe("bghz", np.nan, 1)
