"""Batched engine must agree exactly with the single-state reference path."""

import numpy as np
import pytest

from pqcbench import descriptors as desc
from pqcbench import engine, sim
from pqcbench import templates as tpl


@pytest.fixture(scope="module")
def catalog():
    return tpl.catalog()


def test_run_circuit_matches_single_state_bind(catalog):
    g = np.random.default_rng(42)
    for template in catalog:
        if template.sampler == "haar":
            continue
        n = template.exact_qubits or 4
        circuit = tpl.instantiate(template, n, 2)
        thetas = g.uniform(0, 2 * np.pi, size=(3, circuit.param_count))
        batch = engine.run_circuit(circuit.gates, n, thetas)
        for b in range(thetas.shape[0]):
            ref = tpl.bind(circuit, thetas[b])
            assert np.allclose(batch[b], ref.amps, atol=1e-12), template.id


def test_batch_fidelity_matches_single(catalog):
    g = np.random.default_rng(3)
    a = g.standard_normal((5, 8)) + 1j * g.standard_normal((5, 8))
    b = g.standard_normal((5, 8)) + 1j * g.standard_normal((5, 8))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    got = engine.batch_fidelity(a, b)
    for i in range(5):
        want = sim.fidelity(sim.StateVector(3, a[i]), sim.StateVector(3, b[i]))
        assert got[i] == pytest.approx(want, abs=1e-12)


def test_batch_mw_q_matches_both_single_paths():
    g = np.random.default_rng(5)
    amps = g.standard_normal((8, 16)) + 1j * g.standard_normal((8, 16))
    amps /= np.linalg.norm(amps, axis=1, keepdims=True)
    got = engine.batch_mw_q(amps, 4)
    for i in range(8):
        state = sim.StateVector(4, amps[i])
        assert got[i] == pytest.approx(desc.mw_q(state), abs=1e-12)
        assert got[i] == pytest.approx(desc.mw_q(state, "distance"), abs=1e-9)


def test_norm_preserved_across_batch(catalog):
    g = np.random.default_rng(11)
    template = next(t for t in catalog if t.id == "c06")
    circuit = tpl.instantiate(template, 4, 1)
    thetas = g.uniform(0, 2 * np.pi, size=(64, circuit.param_count))
    amps = engine.run_circuit(circuit.gates, 4, thetas)
    norms = np.linalg.norm(amps, axis=1)
    assert np.allclose(norms, 1.0, atol=1e-10)


def test_rejects_bad_theta_shape():
    with pytest.raises(ValueError, match="batch, params"):
        engine.run_circuit((), 2, np.zeros(3))
