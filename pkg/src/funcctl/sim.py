"""Fixed-step RK4 simulation of autonomous LTI closed loops."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .criteria import SystemTriple
from .errors import DimensionMismatch, SignalUnderflow, StepBudgetExceeded
from .numlin import as_matrix
from .synthesis import ControllerDesign, ObserverDesign, assemble_separation, check_compatible, output_feedback_gain

MAX_STEPS = 10**7
UNDERFLOW = 1e-14


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    t_final: float = 10.0

    def __post_init__(self):
        if not (self.dt > 0 and self.t_final >= self.dt):
            raise ValueError(f"need 0 < dt <= t_final, got dt={self.dt}, t_final={self.t_final}")
        if self.steps > MAX_STEPS:
            raise StepBudgetExceeded(f"{self.steps} steps exceed the budget of {MAX_STEPS}")

    @property
    def steps(self) -> int:
        # guard against t_final/dt landing a hair above an integer
        return math.ceil(self.t_final / self.dt - 1e-9)


@dataclass
class Trace:
    times: np.ndarray
    states: np.ndarray
    channels: dict[str, np.ndarray] = field(default_factory=dict)

    def channel(self, name: str) -> np.ndarray:
        if name in ("x", "state"):
            return self.states
        return self.channels[name]

    def at(self, t: float) -> int:
        """Index of the sample nearest to time ``t``."""
        return int(np.argmin(np.abs(self.times - t)))


def rk4_step_matrix(Acl: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 step for x' = Acl x, written as a matrix."""
    n = Acl.shape[0]
    hA = dt * Acl
    P = np.eye(n)
    term = np.eye(n)
    for k in range(1, 5):
        term = term @ hA / k
        P = P + term
    return P


def _integrate(Acl: np.ndarray, x0: np.ndarray, cfg: SimConfig) -> tuple[np.ndarray, np.ndarray]:
    steps = cfg.steps
    P = rk4_step_matrix(Acl, cfg.dt)
    X = np.empty((steps + 1, x0.size))
    X[0] = x0
    for k in range(steps):
        X[k + 1] = P @ X[k]
    return cfg.dt * np.arange(steps + 1), X


def simulate_lti(Acl, x0, cfg: SimConfig | None = None) -> Trace:
    cfg = cfg or SimConfig()
    Acl = as_matrix(Acl, "Acl")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if Acl.shape != (x0.size, x0.size):
        raise DimensionMismatch(f"Acl {Acl.shape} does not match x0 of length {x0.size}")
    t, X = _integrate(Acl, x0, cfg)
    return Trace(t, X)


def simulate_observer_closed_loop(
    sys: SystemTriple,
    ctrl: ControllerDesign,
    obs: ObserverDesign,
    x0,
    w0=None,
    cfg: SimConfig | None = None,
) -> Trace:
    """Plant plus functional observer under ``u = -Z [I 0] (w + E y)``.

    Channels: ``z`` (F x), ``zhat`` (first r estimates), ``err``
    (Fbar x - w - E C x, all q components), ``u``, and ``w``.
    """
    cfg = cfg or SimConfig()
    check_compatible(ctrl, obs)
    n, q = sys.n, obs.order_q
    x0 = np.asarray(x0, dtype=float).ravel()
    w0 = np.zeros(q) if w0 is None else np.asarray(w0, dtype=float).ravel()
    if x0.size != n or w0.size != q:
        raise DimensionMismatch(f"x0 must have {n} entries and w0 {q}")
    loop = assemble_separation(sys, ctrl, obs)
    t, S = _integrate(loop.A_full, np.concatenate([x0, w0]), cfg)
    X, W = S[:, :n], S[:, n:]
    r = ctrl.Fbar.shape[0] - ctrl.R1.shape[0]
    estimate = W + X @ (obs.E @ sys.C).T
    channels = {
        "w": W,
        "z": X @ ctrl.Fbar[:r].T,
        "zhat": estimate[:, :r],
        "err": X @ obs.Fbar.T - estimate,
        "u": -estimate @ output_feedback_gain(ctrl, obs).T,
    }
    return Trace(t, X, channels)


def decay_rate(trace: Trace, channel: str, window: tuple[float, float]) -> float:
    """Least-squares slope of log ||channel(t)|| over ``window``."""
    t0, t1 = window
    mask = (trace.times >= t0 - 1e-12) & (trace.times <= t1 + 1e-12)
    values = np.asarray(trace.channel(channel))[mask]
    if values.ndim == 1:
        values = values[:, None]
    norms = np.linalg.norm(values, axis=1)
    if norms.size < 2:
        raise ValueError("window contains fewer than two samples")
    if np.any(norms < UNDERFLOW):
        raise SignalUnderflow(f"channel {channel!r} falls below {UNDERFLOW:g} in {window}")
    slope, _ = np.polyfit(trace.times[mask], np.log(norms), 1)
    return float(slope)


def trace_columns(trace: Trace, n: int) -> tuple[list[str], np.ndarray]:
    """Header and data matrix in the CSV column order t, x, w, z, zhat, e, u."""
    names = ["t"] + [f"x{i + 1}" for i in range(n)]
    blocks = [trace.times[:, None], trace.states]
    for key, prefix in (("w", "w"), ("z", "z"), ("zhat", "zhat"), ("err", "e"), ("u", "u")):
        if key in trace.channels:
            block = trace.channels[key]
            names += [f"{prefix}{i + 1}" for i in range(block.shape[1])]
            blocks.append(block)
    return names, np.hstack(blocks)
