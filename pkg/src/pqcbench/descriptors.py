"""Monte Carlo circuit descriptors.

Expressibility (KL divergence between the sampled pair-fidelity distribution
and the Haar fidelity law), entangling capability (mean Meyer-Wallach Q),
frame potentials with their Welch-bound references, finite-sampling bias
baselines, and sample-size planning.

All estimators funnel their randomness through an ``RngStream``; the pair
index space is partitioned into fixed-size chunks, each drawing from a child
stream, so results are bit-identical for a given master seed regardless of
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import engine, sim
from .sim import RngStream, StateVector
from .templates import BoundCircuit, CircuitTemplate, CostMetrics, cost_metrics, instantiate

#: Pairs per sampling chunk.  Fixed (not derived from the worker count) so
#: that chunk RNG streams, and therefore results, never depend on it.
CHUNK_PAIRS = 500


@dataclass(frozen=True)
class EstimatorConfig:
    """Sampling configuration shared by the descriptor estimators."""

    pair_count: int = 5000
    n_bin: int = 75
    t_max: int = 4
    workers: int = 1

    def validate(self) -> None:
        if self.pair_count < 1:
            raise ValueError("pair_count must be >= 1")
        if self.n_bin < 1:
            raise ValueError("n_bin must be >= 1")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class FidelitySampleSet:
    """Sampled pair fidelities F = |<psi_theta|psi_phi>|^2 plus provenance.

    ``q_values`` retains the Meyer-Wallach Q of every sampled state (both
    members of each pair), so entangling capability reuses the states drawn
    for the expressibility estimate.
    """

    dim: int
    fidelities: np.ndarray
    pair_count: int
    seed: str
    source: str
    q_values: np.ndarray | None = None


@dataclass
class Histogram:
    """Fixed-bin empirical distribution on [0, 1] with Haar reference masses.

    ``haar_log_mass`` carries exact per-bin log masses; the plain masses can
    underflow float64 in far-tail bins once the Hilbert dimension is large,
    so KL evaluation always goes through the log form.
    """

    n_bin: int
    edges: np.ndarray
    empirical_mass: np.ndarray
    haar_mass: np.ndarray
    haar_log_mass: np.ndarray


@dataclass
class DescriptorReport:
    """Every descriptor for one (template, n, L, seed) circuit instance."""

    template_id: str
    n: int
    layers: int
    expr: float
    ent: float
    frame_potentials: tuple[float, ...]
    welch_bounds: tuple[float, ...]
    costs: CostMetrics
    connectivity: str
    pair_count: int
    n_bin: int
    seed: str
    expr_std: float | None = None
    ent_std: float | None = None


# -- histogram / KL machinery --------------------------------------------------

def haar_bin_masses(N: int, n_bin: int) -> np.ndarray:
    """Analytic Haar mass per bin: (1-a)^(N-1) - (1-b)^(N-1) for bin [a, b)."""
    edges = _bin_edges(N, n_bin)
    lo, hi = 1.0 - edges[:-1], 1.0 - edges[1:]
    return lo ** (N - 1) - hi ** (N - 1)


def haar_log_bin_masses(N: int, n_bin: int) -> np.ndarray:
    """log of the Haar bin masses, stable even where the mass underflows."""
    edges = _bin_edges(N, n_bin)
    lo, hi = 1.0 - edges[:-1], 1.0 - edges[1:]
    ratio = (hi / lo) ** (N - 1)
    return (N - 1) * np.log(lo) + np.log1p(-ratio)


def _bin_edges(N: int, n_bin: int) -> np.ndarray:
    if not (isinstance(N, (int, np.integer)) and N >= 2):
        raise ValueError(f"Hilbert dimension must be an integer >= 2, got {N}")
    if n_bin < 1:
        raise ValueError(f"bin count must be >= 1, got {n_bin}")
    return np.linspace(0.0, 1.0, n_bin + 1)


def build_histogram(fidelities: np.ndarray, N: int, n_bin: int = 75) -> Histogram:
    """Histogram fidelities on [0, 1]; F = 1 lands in the last bin."""
    edges = _bin_edges(N, n_bin)
    counts, _ = np.histogram(np.clip(fidelities, 0.0, 1.0), bins=edges)
    empirical = counts / counts.sum()
    return Histogram(
        n_bin=n_bin,
        edges=edges,
        empirical_mass=empirical,
        haar_mass=haar_bin_masses(N, n_bin),
        haar_log_mass=haar_log_bin_masses(N, n_bin),
    )


def kl_divergence(empirical_mass: np.ndarray, reference_mass: np.ndarray) -> float:
    """D_KL(p || q) in nats with the plug-in convention 0 * ln(0/q) = 0."""
    p = np.asarray(empirical_mass, dtype=float)
    q = np.asarray(reference_mass, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    if np.any(q <= 0.0):
        raise ValueError("reference mass must be strictly positive in every bin")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"empirical mass must sum to 1, got {p.sum()}")
    mask = p > 0.0
    return float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))


def _kl_vs_log_reference(p: np.ndarray, log_q: np.ndarray) -> float:
    mask = p > 0.0
    return float(np.sum(p[mask] * (np.log(p[mask]) - log_q[mask])))


def histogram_kl(hist: Histogram) -> float:
    return _kl_vs_log_reference(hist.empirical_mass, hist.haar_log_mass)


# -- analytic references --------------------------------------------------------

def welch_bound(N: int, t: int) -> float:
    """Haar frame potential t!(N-1)!/(t+N-1)!, the Welch-bound minimum.

    Evaluated as an exact product of rationals, so it never overflows for
    desk-scale N.
    """
    if not (isinstance(N, (int, np.integer)) and N >= 2):
        raise ValueError(f"Hilbert dimension must be an integer >= 2, got {N}")
    if not (isinstance(t, (int, np.integer)) and t >= 1):
        raise ValueError(f"moment order must be an integer >= 1, got {t}")
    # t!(N-1)!/(t+N-1)! = prod_{k=1}^{t} k / (N-1+k)
    value = 1.0
    for k in range(1, t + 1):
        value *= k / (N - 1 + k)
    return value


def haar_mean_q(N: int) -> float:
    """Mean Meyer-Wallach Q of Haar-random pure states: (N-2)/(N+1)."""
    if not (isinstance(N, (int, np.integer)) and N >= 2):
        raise ValueError(f"Hilbert dimension must be an integer >= 2, got {N}")
    return (N - 2) / (N + 1)


def chebyshev_sample_size(k: float, confidence: float) -> int:
    """Smallest sample count m with 1/(m k^2) <= 1 - confidence.

    Chebyshev's inequality bounds the chance that a sample mean misses the
    population mean by more than k population standard deviations.
    """
    if not (k > 0.0):
        raise ValueError(f"precision must be > 0, got {k}")
    if not (0.0 < confidence < 1.0):
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    alpha = 1.0 - confidence
    m = max(1, math.ceil(1.0 / (alpha * k * k)))
    while m > 1 and 1.0 / ((m - 1) * k * k) <= alpha:
        m -= 1
    while 1.0 / (m * k * k) > alpha:
        m += 1
    return m


# -- Meyer-Wallach measure ------------------------------------------------------

def mw_q(state: StateVector, method: str = "purity") -> float:
    """Meyer-Wallach entanglement measure Q of a pure state.

    The default path uses the purity identity Q = 2 (1 - mean_j tr rho_j^2).
    ``method="distance"`` evaluates the defining form instead,
    Q = (4/n) sum_j D(iota_j(0)|psi>, iota_j(1)|psi>) with
    D(u, v) = (1/2) sum_{i,j} |u_i v_j - u_j v_i|^2, as a slow
    cross-validation route.
    """
    if method == "purity":
        total = sum(sim.single_qubit_purity(state, j) for j in range(state.n))
        return float(min(1.0, max(0.0, 2.0 * (1.0 - total / state.n))))
    if method != "distance":
        raise ValueError(f"unknown method {method!r}")

    n = state.n
    total = 0.0
    for j in range(n):
        # iota_j(b) keeps amplitudes whose j-th qubit equals b and deletes
        # that qubit; rows of `view` below enumerate the j-th qubit.
        view = np.swapaxes(state.amps.reshape(1 << j, 2, -1), 0, 1).reshape(2, -1)
        u, v = view[0], view[1]
        outer = np.outer(u, v)
        d = 0.5 * np.sum(np.abs(outer - outer.T) ** 2)
        total += d
    return float(4.0 / n * total)


# -- sampling -------------------------------------------------------------------

def _chunk_sizes(pair_count: int) -> list[int]:
    full, rest = divmod(pair_count, CHUNK_PAIRS)
    return [CHUNK_PAIRS] * full + ([rest] if rest else [])


def _sample_chunk(args) -> tuple[np.ndarray, np.ndarray]:
    """One chunk of pair sampling; top-level so worker pools can pickle it."""
    circuit, pairs, master_seed, stream_id = args
    rng = RngStream(master_seed, stream_id)
    g = rng.generator
    n, dim = circuit.n, 1 << circuit.n
    if circuit.sampler == "haar":
        re = g.standard_normal((2 * pairs, dim))
        im = g.standard_normal((2 * pairs, dim))
        amps = re + 1j * im
        amps /= np.linalg.norm(amps, axis=1, keepdims=True)
    else:
        thetas = g.uniform(0.0, 2.0 * np.pi, size=(2 * pairs, circuit.param_count))
        amps = engine.run_circuit(circuit.gates, n, thetas)
    fid = engine.batch_fidelity(amps[:pairs], amps[pairs:])
    q = engine.batch_mw_q(amps, n)
    return fid, q


def _run_chunks(circuit: BoundCircuit, pair_count: int, rng: RngStream, workers: int):
    tasks = [
        (circuit, pairs, rng.master_seed, rng.child(idx).stream_id)
        for idx, pairs in enumerate(_chunk_sizes(pair_count))
    ]
    if workers <= 1 or len(tasks) == 1:
        results = [_sample_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sample_chunk, tasks))
    fid = np.concatenate([r[0] for r in results])
    q = np.concatenate([r[1] for r in results])
    return fid, q


def sample_fidelities(
    template: CircuitTemplate,
    n: int,
    layers: int,
    pair_count: int,
    rng: RngStream,
    workers: int = 1,
) -> FidelitySampleSet:
    """Sample ``pair_count`` state pairs and record fidelities and Q values.

    For parameterized templates, both parameter vectors of each pair are
    drawn i.i.d. uniform on [0, 2*pi) per slot.  Templates flagged with the
    Haar sampler draw states from the Haar measure directly.
    """
    if pair_count < 1:
        raise ValueError("pair_count must be >= 1")
    circuit = instantiate(template, n, layers)
    fid, q = _run_chunks(circuit, pair_count, rng, workers)
    return FidelitySampleSet(
        dim=1 << n,
        fidelities=fid,
        pair_count=pair_count,
        seed=repr(rng),
        source=f"{template.id}(n={n}, L={layers})",
        q_values=q,
    )


def sample_haar_set(
    n: int, pair_count: int, rng: RngStream, workers: int = 1
) -> FidelitySampleSet:
    """Haar-random state pairs at width ``n`` (the reference ensemble)."""
    circuit = BoundCircuit(
        template_id="haar",
        n=n,
        layers=1,
        gates=(),
        param_count=0,
        connectivity="none",
        sampler="haar",
        prologue_len=0,
        unit_layer_len=0,
    )
    fid, q = _run_chunks(circuit, pair_count, rng, workers)
    return FidelitySampleSet(
        dim=1 << n,
        fidelities=fid,
        pair_count=pair_count,
        seed=repr(rng),
        source=f"haar(n={n})",
        q_values=q,
    )


# -- descriptor estimators ------------------------------------------------------

def frame_potential_estimates(samples: FidelitySampleSet, t_max: int) -> np.ndarray:
    """Sample means of F^t for t = 1..t_max (unbiased moment estimates)."""
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    f = samples.fidelities
    if f.size == 0:
        raise ValueError("empty sample set")
    return np.array([float(np.mean(f**t)) for t in range(1, t_max + 1)])


def expressibility(
    template: CircuitTemplate,
    n: int,
    layers: int,
    config: EstimatorConfig = EstimatorConfig(),
    rng: RngStream | None = None,
) -> float:
    """KL divergence of the sampled fidelity histogram from the Haar law.

    Lower is more expressible; the idle circuit attains the upper bound
    (N-1) ln(n_bin).
    """
    config.validate()
    rng = rng if rng is not None else RngStream(0)
    samples = sample_fidelities(
        template, n, layers, config.pair_count, rng, config.workers
    )
    hist = build_histogram(samples.fidelities, samples.dim, config.n_bin)
    return histogram_kl(hist)


def entangling_capability(
    template: CircuitTemplate,
    n: int,
    layers: int,
    config: EstimatorConfig = EstimatorConfig(),
    rng: RngStream | None = None,
) -> float:
    """Mean Meyer-Wallach Q over all sampled states (both pair members)."""
    config.validate()
    rng = rng if rng is not None else RngStream(0)
    samples = sample_fidelities(
        template, n, layers, config.pair_count, rng, config.workers
    )
    return float(np.mean(samples.q_values))


def compute_report(
    template: CircuitTemplate,
    n: int,
    layers: int,
    config: EstimatorConfig = EstimatorConfig(),
    rng: RngStream | None = None,
) -> DescriptorReport:
    """One sampling pass filling every descriptor field; deterministic per seed."""
    config.validate()
    rng = rng if rng is not None else RngStream(0)
    samples = sample_fidelities(
        template, n, layers, config.pair_count, rng, config.workers
    )
    hist = build_histogram(samples.fidelities, samples.dim, config.n_bin)
    fps = frame_potential_estimates(samples, config.t_max)
    return DescriptorReport(
        template_id=template.id,
        n=n,
        layers=layers,
        expr=histogram_kl(hist),
        ent=float(np.mean(samples.q_values)),
        frame_potentials=tuple(float(x) for x in fps),
        welch_bounds=tuple(welch_bound(samples.dim, t) for t in range(1, config.t_max + 1)),
        costs=cost_metrics(template, n, layers),
        connectivity=template.connectivity,
        pair_count=config.pair_count,
        n_bin=config.n_bin,
        seed=samples.seed,
    )


def run_stream(
    master_seed: int, template_id: str, n: int, layers: int, repeat: int
) -> RngStream:
    """Stable per-run stream: depends only on the run coordinates, not on
    which other runs happen in the same invocation."""
    import zlib

    return RngStream(
        master_seed, (zlib.crc32(template_id.encode()), n, layers, repeat)
    )


def repeat_reports(
    template: CircuitTemplate,
    n: int,
    layers: int,
    config: EstimatorConfig,
    master_seed: int,
    repeats: int,
) -> list[DescriptorReport]:
    """Independent seeded runs of ``compute_report`` for repeat statistics."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    return [
        compute_report(
            template, n, layers, config, run_stream(master_seed, template.id, n, layers, r)
        )
        for r in range(repeats)
    ]


@dataclass
class RepeatSummary:
    expr_mean: float
    expr_std: float | None
    ent_mean: float
    ent_std: float | None


def summarize_repeats(reports: Sequence[DescriptorReport]) -> RepeatSummary:
    expr = np.array([r.expr for r in reports])
    ent = np.array([r.ent for r in reports])
    std = (
        (float(np.std(expr, ddof=1)), float(np.std(ent, ddof=1)))
        if len(reports) > 1
        else (None, None)
    )
    return RepeatSummary(float(expr.mean()), std[0], float(ent.mean()), std[1])


# -- bias baseline and convergence ---------------------------------------------

def kl_bias_baseline(
    N: int,
    n_bin: int,
    pair_count: int,
    repeats: int,
    rng: RngStream,
) -> tuple[float, float | None]:
    """Finite-sampling KL floor: score of Haar draws against the Haar law.

    Each repeat draws ``pair_count`` fidelities straight from the analytic
    law (inverse CDF), histograms them, and evaluates the KL divergence.
    Circuit expressibility values below this floor are unresolvable at the
    given sample size.  Returns (mean, sample std); std is None for a single
    repeat.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if pair_count < 1:
        raise ValueError("pair_count must be >= 1")
    log_q = haar_log_bin_masses(N, n_bin)
    values = []
    for r in range(repeats):
        f = sim.sample_haar_fidelity(N, rng.child(r), size=pair_count)
        hist = build_histogram(np.asarray(f), N, n_bin)
        values.append(_kl_vs_log_reference(hist.empirical_mass, log_q))
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1)) if repeats > 1 else None
    return mean, std


@dataclass
class ConvergencePoint:
    sample_size: int
    expr_mean: float
    expr_std: float
    ent_mean: float
    ent_std: float


def convergence_scan(
    template: CircuitTemplate,
    n: int,
    layers: int,
    sample_sizes: Sequence[int],
    repeats: int,
    rng: RngStream,
    n_bin: int = 75,
) -> list[ConvergencePoint]:
    """Descriptor estimates across sample sizes with repeat statistics.

    Exposes the finite-sample KL bias: expressibility estimates shrink
    toward the truth as the pair count grows, while the entangling
    capability estimate is flat in expectation.
    """
    if repeats < 2:
        raise ValueError("repeats must be >= 2 for repeat statistics")
    points = []
    for size_idx, size in enumerate(sample_sizes):
        exprs, ents = [], []
        for r in range(repeats):
            samples = sample_fidelities(
                template, n, layers, size, rng.child(size_idx, r)
            )
            hist = build_histogram(samples.fidelities, samples.dim, n_bin)
            exprs.append(histogram_kl(hist))
            ents.append(float(np.mean(samples.q_values)))
        points.append(
            ConvergencePoint(
                sample_size=size,
                expr_mean=float(np.mean(exprs)),
                expr_std=float(np.std(exprs, ddof=1)),
                ent_mean=float(np.mean(ents)),
                ent_std=float(np.std(ents, ddof=1)),
            )
        )
    return points
