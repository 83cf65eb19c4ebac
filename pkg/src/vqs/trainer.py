"""Batch gradient descent on the Rayleigh quotient of the projected network.

Each iteration evaluates the network on the full quadrature grid, projects
the samples onto the box basis, forms <H> = c^T H c / c^T c and
back-propagates through the whole chain.  No sampling is involved, so a
fixed seed gives a bit-for-bit reproducible run.
"""
from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from vqs import autodiff as ad
from vqs.basis import BoxSystem, SpectralBasis
from vqs.errors import ConfigError, DegenerateStateError, DivergenceError
from vqs.hamiltonian import MIN_NORM, build_hamiltonian, energy_expectation, energy_node
from vqs.model import MlpParams, forward, forward_graph, init_params, resolve_dims, save_checkpoint
from vqs.oracle import jacobi_eigen
from vqs.projection import Projector, QuadratureGrid

log = logging.getLogger(__name__)

OPTIMIZERS = ("adaptive-moments", "plain-gd")


@dataclass
class TrainConfig:
    system: BoxSystem = field(default_factory=BoxSystem)
    architecture: object = "box"
    N: int = 100
    G: int = 2048
    optimizer: str = "adaptive-moments"
    eta: float = 1e-3
    # step size decays geometrically to eta * eta_decay at max_iters
    eta_decay: float = 1.0
    max_iters: int = 20_000
    window: int = 200
    tol: float = 1e-9
    seed: int = 0
    checkpoint_every: int = 1000

    def validate(self) -> "TrainConfig":
        if self.N < 1:
            raise ConfigError(f"N must be >= 1, got {self.N}")
        if self.G < self.N:
            raise ConfigError(f"G must be >= N (got G={self.G}, N={self.N})")
        if not self.eta > 0:
            raise ConfigError(f"eta must be positive, got {self.eta}")
        if not 0 < self.eta_decay <= 1:
            raise ConfigError(f"eta_decay must lie in (0, 1], got {self.eta_decay}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.max_iters < 0 or self.window < 1:
            raise ConfigError("max_iters must be >= 0 and window >= 1")
        resolve_dims(self.architecture)
        return self


@dataclass(eq=False)
class TrainReport:
    config: TrainConfig
    energy_trace: np.ndarray
    grad_norms: np.ndarray
    final_energy: float
    final_coefficients: np.ndarray
    oracle_energy: float
    oracle_coefficients: np.ndarray
    oracle_overlap: float
    params: MlpParams
    iterations: int
    converged: bool
    wall_time: float

    def running_minimum(self) -> np.ndarray:
        return np.minimum.accumulate(self.energy_trace)


def sign_fix(c) -> np.ndarray:
    """Unit-normalize ``c`` and make its largest-magnitude entry positive."""
    c = np.asarray(c, dtype=float)
    norm = np.linalg.norm(c)
    if not norm > 0:
        raise DegenerateStateError("cannot normalize a zero coefficient vector")
    c = c / norm
    if c[np.argmax(np.abs(c))] < 0:
        c = -c
    return c


class Adam:
    """Per-parameter first/second moment estimates with bias correction."""

    def __init__(self, params, beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads, eta):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1**self.t
        c2 = 1.0 - b2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * (g * g)
            p -= eta * (m / c1) / (np.sqrt(v / c2) + self.eps)


class GradientDescent:
    def __init__(self, params):
        pass

    def step(self, params, grads, eta):
        for p, g in zip(params, grads):
            p -= eta * g


class Problem:
    """Everything about a run that stays fixed while the network trains."""

    def __init__(self, system: BoxSystem, N: int, G: int):
        self.system = system
        self.basis = SpectralBasis.build(system, N)
        self.grid = QuadratureGrid(system.a, G)
        self.projector = Projector(self.basis, self.grid)
        self.hamiltonian = build_hamiltonian(self.basis, system)
        self._oracle = None

    @property
    def oracle(self):
        if self._oracle is None:
            self._oracle = jacobi_eigen(self.hamiltonian)
        return self._oracle

    def network_inputs(self, xs):
        """Positions are fed to the network in units of the well width."""
        return np.asarray(xs, dtype=float) / self.system.a

    def loss_graph(self, params: MlpParams):
        tape = ad.Tape()
        psi, leaves = forward_graph(params, self.network_inputs(self.grid.points), tape)
        c = self.projector.project_node(psi)
        return energy_node(c, self.hamiltonian), leaves

    def coefficients(self, params: MlpParams) -> np.ndarray:
        return self.projector.project(forward(params, self.network_inputs(self.grid.points)))

    def energy(self, params: MlpParams) -> float:
        return energy_expectation(self.coefficients(params), self.hamiltonian)


def _converged(trace, window, tol):
    if len(trace) < 2 * window:
        return False
    recent = math.fsum(trace[-window:]) / window
    previous = math.fsum(trace[-2 * window:-window]) / window
    return abs(recent - previous) <= tol * abs(recent)


def normalize_output(problem: Problem, params: MlpParams) -> MlpParams:
    """Rescale the output layer so the projected state has unit norm.

    The energy is unchanged, but its curvature scales like 1/|c|^2, so this
    gives a plain gradient step the same meaning for every seed.  A collapsed
    state is returned as is and reported by the training loop.
    """
    try:
        norm = float(np.linalg.norm(problem.coefficients(params)))
    except DegenerateStateError:
        return params
    if not norm >= MIN_NORM or not math.isfinite(norm):
        return params
    return params.scale_output(1.0 / norm)


def train(config: TrainConfig, checkpoint_path=None, progress=None) -> TrainReport:
    """Minimize <H> over the network parameters.

    ``progress``, when given, is called as ``progress(iteration, energy)``
    after every step.  A checkpoint is written every
    ``config.checkpoint_every`` iterations and at exit when
    ``checkpoint_path`` is set.
    """
    config.validate()
    start = time.perf_counter()
    problem = Problem(config.system, config.N, config.G)
    params = init_params(resolve_dims(config.architecture), config.seed)
    if config.optimizer == "plain-gd":
        # Adam steps ignore the gradient scale; plain steps do not
        params = normalize_output(problem, params)
    arrays = params.arrays()
    opt_cls = Adam if config.optimizer == "adaptive-moments" else GradientDescent
    optimizer = opt_cls(arrays)

    trace, grad_norms = [], []
    converged = False
    for it in range(config.max_iters):
        try:
            # overflow shows up as a non-finite energy, reported below
            with np.errstate(over="ignore", invalid="ignore"):
                loss, leaves = problem.loss_graph(params)
        except DegenerateStateError as exc:
            raise DegenerateStateError(
                f"iteration {it}: {exc}; restart with a different seed"
            ) from None
        energy = float(loss.value)
        if not math.isfinite(energy):
            raise DivergenceError(it, energy)
        grads = ad.backward(loss)
        g = [grads[leaf] for leaf in leaves]
        loss.tape.release()
        del loss, leaves, grads
        gnorm = math.sqrt(math.fsum(float(np.vdot(x, x)) for x in g))
        trace.append(energy)
        grad_norms.append(gnorm)
        if progress is not None:
            progress(it, energy)
        if _converged(trace, config.window, config.tol):
            converged = True
            break
        eta = config.eta * config.eta_decay ** (it / max(config.max_iters, 1))
        optimizer.step(arrays, g, eta)
        if checkpoint_path is not None and (it + 1) % config.checkpoint_every == 0:
            save_checkpoint(checkpoint_path, params)
        if (it + 1) % 1000 == 0:
            log.info("iteration %d  energy %.8f  |grad| %.3e", it + 1, energy, gnorm)

    c = problem.coefficients(params)
    final_energy = energy_expectation(c, problem.hamiltonian)
    if not math.isfinite(final_energy):
        raise DivergenceError(len(trace), final_energy)
    if checkpoint_path is not None:
        save_checkpoint(checkpoint_path, params)
    final = sign_fix(c)
    oracle = problem.oracle
    reference = sign_fix(oracle.ground_vector)
    return TrainReport(
        config=config,
        energy_trace=np.array(trace),
        grad_norms=np.array(grad_norms),
        final_energy=final_energy,
        final_coefficients=final,
        oracle_energy=oracle.ground_energy,
        oracle_coefficients=reference,
        oracle_overlap=float(abs(final @ reference)),
        params=params,
        iterations=len(trace),
        converged=converged,
        wall_time=time.perf_counter() - start,
    )


def write_trace_csv(path, report: TrainReport) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "energy", "grad_norm"])
        for i, (e, g) in enumerate(zip(report.energy_trace, report.grad_norms)):
            writer.writerow([i, repr(float(e)), repr(float(g))])
