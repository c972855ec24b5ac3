"""Multi-process Arrhenius model of zero-field magnetization lifetimes.

Each decay channel is thermally activated, tau_i(T) = tau0_i * exp(delta_i/T),
and channels act in parallel, so rates add:

    1 / tau(T) = sum_i (1/tau0_i) * exp(-delta_i / T)

A single channel dominates wherever its rate is largest, which reproduces
the straight regime-local lines of an Arrhenius plot while giving one
smooth model over the full temperature range.  Fitting minimizes weighted
least squares on ln(tau), matching the roughly relative errors of lifetime
measurements, with a damped Gauss-Newton iteration.
"""

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .serialize import fmt

MAX_PROCESSES = 4
MAX_ITERATIONS = 500
OBJECTIVE_RTOL = 1e-12
STEP_TOL = 1e-10
DAMPING_FACTOR = 10.0
CONDITION_LIMIT = 1e12

DATASET_COLUMNS = ("T_K", "tau_s", "sigma_ln_tau", "mode")


class DegenerateParametersError(RuntimeError):
    """Normal matrix is singular; carries the most degenerate parameter pair."""

    def __init__(self, message, parameter_pair):
        super().__init__(message)
        self.parameter_pair = parameter_pair


@dataclass(frozen=True)
class ArrheniusProcess:
    """One activated decay channel: lifetime tau0 * exp(delta / T).

    tau0 in seconds (> 0), barrier delta = Delta_eff/k_B in kelvin (>= 0).
    """

    tau0: float
    delta: float

    def __post_init__(self):
        if not (np.isfinite(self.tau0) and self.tau0 > 0):
            raise ValueError(f"prefactor tau0 must be positive and finite, got {self.tau0}")
        if not (np.isfinite(self.delta) and self.delta >= 0):
            raise ValueError(f"barrier delta must be >= 0 and finite, got {self.delta}")


@dataclass(frozen=True)
class RelaxationModel:
    """Parallel combination of 1 to 4 Arrhenius channels, sorted by barrier."""

    processes: tuple

    def __post_init__(self):
        procs = tuple(self.processes)
        if not 1 <= len(procs) <= MAX_PROCESSES:
            raise ValueError(f"need 1..{MAX_PROCESSES} processes, got {len(procs)}")
        if any(not isinstance(p, ArrheniusProcess) for p in procs):
            raise TypeError("processes must be ArrheniusProcess instances")
        object.__setattr__(
            self, "processes", tuple(sorted(procs, key=lambda p: (p.delta, p.tau0)))
        )


@dataclass(frozen=True)
class LifetimePoint:
    """One (temperature, lifetime) observation.

    ``sigma_ln_tau`` is the optional one-sigma uncertainty of ln(tau);
    ``mode`` is a free measurement tag such as 'DC' or 'AC', carried as
    metadata only.
    """

    t_kelvin: float
    tau_s: float
    sigma_ln_tau: float | None = None
    mode: str = ""

    def __post_init__(self):
        if not (np.isfinite(self.t_kelvin) and self.t_kelvin > 0):
            raise ValueError(f"temperature must be positive, got {self.t_kelvin}")
        if not (np.isfinite(self.tau_s) and self.tau_s > 0):
            raise ValueError(f"lifetime must be positive, got {self.tau_s}")
        if self.sigma_ln_tau is not None and not (
            np.isfinite(self.sigma_ln_tau) and self.sigma_ln_tau > 0
        ):
            raise ValueError(f"sigma_ln_tau must be positive when given, got {self.sigma_ln_tau}")


@dataclass(frozen=True)
class RelaxationDataset:
    """Collection of lifetime observations with a source label."""

    points: tuple
    source: str = ""

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise ValueError("dataset must contain at least one point")
        if any(not isinstance(p, LifetimePoint) for p in pts):
            raise TypeError("points must be LifetimePoint instances")
        object.__setattr__(self, "points", pts)

    def temperatures(self):
        return np.array([p.t_kelvin for p in self.points])

    def lifetimes(self):
        return np.array([p.tau_s for p in self.points])

    def to_csv(self):
        """Dataset as CSV text; sigma/mode columns appear only when used."""
        with_sigma = any(p.sigma_ln_tau is not None for p in self.points)
        with_mode = any(p.mode for p in self.points)
        header = ["T_K", "tau_s"]
        if with_sigma:
            header.append("sigma_ln_tau")
        if with_mode:
            header.append("mode")
        lines = [",".join(header)]
        for p in self.points:
            cells = [fmt(p.t_kelvin), fmt(p.tau_s)]
            if with_sigma:
                cells.append("" if p.sigma_ln_tau is None else fmt(p.sigma_ln_tau))
            if with_mode:
                cells.append(p.mode)
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def parse_dataset_csv(text, source=""):
    """Parse dataset CSV with header ``T_K,tau_s[,sigma_ln_tau][,mode]``."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("empty dataset file") from None
    header = [h.strip() for h in header]
    if (
        header[:2] != ["T_K", "tau_s"]
        or any(h not in DATASET_COLUMNS for h in header)
        or len(set(header)) != len(header)
    ):
        raise ValueError(
            f"dataset header must be T_K,tau_s[,sigma_ln_tau][,mode], got {','.join(header)}"
        )
    points = []
    for number, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) > len(header):
            raise ValueError(f"line {number}: {len(row)} cells for {len(header)} columns")
        record = dict(zip(header, (cell.strip() for cell in row)))
        if "T_K" not in record or "tau_s" not in record:
            raise ValueError(f"line {number}: missing T_K/tau_s cells")
        sigma = record.get("sigma_ln_tau", "")
        points.append(
            LifetimePoint(
                t_kelvin=float(record["T_K"]),
                tau_s=float(record["tau_s"]),
                sigma_ln_tau=float(sigma) if sigma else None,
                mode=record.get("mode", ""),
            )
        )
    return RelaxationDataset(points=tuple(points), source=source)


def load_dataset(path):
    """Read a dataset CSV file."""
    with open(path, encoding="utf-8") as handle:
        return parse_dataset_csv(handle.read(), source=str(path))


@dataclass(frozen=True)
class FitResult:
    """Fitted model plus uncertainty information.

    ``std_errors`` and ``covariance`` refer to the fit parameters in the
    order (ln tau0_1, delta_1, ln tau0_2, delta_2, ...) with processes
    sorted by ascending barrier, the same order as ``model.processes``.
    ``objective_trace`` records the weighted objective after each
    accepted step (diagnostics; not serialized).
    """

    model: RelaxationModel
    std_errors: np.ndarray
    residual_rms: float
    covariance: np.ndarray
    converged: bool
    iterations: int
    objective_trace: tuple = field(default=(), repr=False)

    def parameter_names(self):
        names = []
        for i in range(len(self.model.processes)):
            names += [f"ln_tau0_{i + 1}", f"delta_{i + 1}"]
        return names

    def to_json(self):
        data = {
            "model": {
                "processes": [
                    {"tau0_s": p.tau0, "delta_K": p.delta} for p in self.model.processes
                ]
            },
            "std_errors": self.std_errors.tolist(),
            "covariance": self.covariance.tolist(),
            "residual_rms": self.residual_rms,
            "converged": self.converged,
        }
        return json.dumps(data, indent=2) + "\n"


# ------------------------------------------------------------------ model

def _theta_of(model):
    theta = []
    for p in model.processes:
        theta += [np.log(p.tau0), p.delta]
    return np.array(theta)


def _ln_lifetime(theta, t):
    """ln tau of the parallel-channel model; theta = (ln tau0_i, delta_i)."""
    rate = np.zeros_like(t)
    with np.errstate(over="ignore"):
        for i in range(len(theta) // 2):
            rate += np.exp(-theta[2 * i] - theta[2 * i + 1] / t)
    with np.errstate(divide="ignore"):
        return -np.log(rate)


def _jacobian(theta, t):
    """d ln(tau_model) / d theta; rows are data points."""
    n = len(theta) // 2
    with np.errstate(over="ignore"):
        channel = np.stack(
            [np.exp(-theta[2 * i] - theta[2 * i + 1] / t) for i in range(n)], axis=1
        )
    rate = channel.sum(axis=1)
    jac = np.empty((len(t), 2 * n))
    jac[:, 0::2] = channel / rate[:, None]
    jac[:, 1::2] = channel / (rate * t)[:, None]
    return jac


def model_lifetime(model, t_kelvin):
    """Lifetime of the parallel-channel model at temperature(s) ``t_kelvin``.

    Accepts a scalar or an array; temperatures must be positive.
    """
    t = np.asarray(t_kelvin, dtype=float)
    if not np.all(np.isfinite(t)) or np.any(t <= 0.0):
        raise ValueError(f"temperatures must be positive and finite, got {t_kelvin}")
    tau = np.exp(_ln_lifetime(_theta_of(model), np.atleast_1d(t)))
    return float(tau[0]) if t.ndim == 0 else tau


def synthesize(model, temperatures, noise_sigma=0.0, seed=0):
    """Generate a synthetic dataset with lognormal lifetime scatter.

    Each lifetime is the model value times exp(eps) with eps drawn from a
    Gaussian of width ``noise_sigma`` by a seeded generator; the same seed
    always yields the same dataset.
    """
    temps = np.asarray(temperatures, dtype=float)
    if temps.size == 0:
        raise ValueError("temperature list must not be empty")
    if not (np.isfinite(noise_sigma) and noise_sigma >= 0):
        raise ValueError(f"noise_sigma must be >= 0, got {noise_sigma}")
    eps = np.random.default_rng(seed).standard_normal(temps.size) * noise_sigma
    taus = model_lifetime(model, temps) * np.exp(eps)
    points = tuple(
        LifetimePoint(t_kelvin=float(t), tau_s=float(tau)) for t, tau in zip(temps, taus)
    )
    return RelaxationDataset(
        points=points, source=f"synthetic(seed={seed}, noise_sigma={noise_sigma})"
    )


# -------------------------------------------------------------------- fit

def _segmented_init(t, ln_tau, n_processes):
    """Initial parameters from contiguous equal-count segments of the
    Arrhenius plot (ln tau versus 1/T), one straight line per segment."""
    inv_t = 1.0 / t
    order = np.argsort(inv_t)
    x, y = inv_t[order], ln_tau[order]
    n = len(x)
    theta = np.empty(2 * n_processes)
    for k in range(n_processes):
        segment = slice(round(k * n / n_processes), round((k + 1) * n / n_processes))
        slope, intercept = np.polyfit(x[segment], y[segment], 1)
        theta[2 * k] = intercept            # ln tau0
        theta[2 * k + 1] = max(slope, 0.0)  # barrier cannot be negative
    return theta


def _sorted_pairs(theta):
    pairs = sorted((theta[2 * i + 1], theta[2 * i]) for i in range(len(theta) // 2))
    out = np.empty_like(theta)
    for i, (delta, ln_tau0) in enumerate(pairs):
        out[2 * i], out[2 * i + 1] = ln_tau0, delta
    return out


def fit(data, n_processes, init=None):
    """Fit ``n_processes`` parallel Arrhenius channels to a dataset.

    Minimizes sum_k w_k (ln tau_k - ln tau_model(T_k))^2 over the
    parameters (ln tau0_i, delta_i) by Gauss-Newton with multiplicative
    damping (x10 on uphill trials, /10 after accepted steps).  Weights
    are 1/sigma^2 where a point carries an uncertainty, else 1.

    Parameters
    ----------
    data : RelaxationDataset
        Needs at least ``2 * 2 * n_processes`` points.
    n_processes : int
        Number of channels, 1 to 4.
    init : RelaxationModel, optional
        Starting model; default is a straight-line fit to each of
        ``n_processes`` equal-count segments of the Arrhenius plot.

    Returns
    -------
    FitResult
        ``converged`` is False if the iteration cap was reached or no
        downhill step could be found.

    Raises
    ------
    DegenerateParametersError
        If the Gauss-Newton normal matrix is numerically singular, e.g.
        when two channels collapse onto each other.
    """
    if not 1 <= n_processes <= MAX_PROCESSES:
        raise ValueError(f"n_processes must be in 1..{MAX_PROCESSES}, got {n_processes}")
    n_params = 2 * n_processes
    if len(data.points) < 2 * n_params:
        raise ValueError(
            f"need at least {2 * n_params} points to fit {n_processes} processes, "
            f"got {len(data.points)}"
        )
    t = data.temperatures()
    y = np.log(data.lifetimes())
    weights = np.array(
        [1.0 if p.sigma_ln_tau is None else p.sigma_ln_tau**-2 for p in data.points]
    )

    if init is not None:
        if len(init.processes) != n_processes:
            raise ValueError(
                f"init model has {len(init.processes)} processes, expected {n_processes}"
            )
        theta = _theta_of(init)
    else:
        theta = _segmented_init(t, y, n_processes)

    def objective(th):
        return float(np.sum(weights * (y - _ln_lifetime(th, t)) ** 2))

    obj = objective(theta)
    trace = [obj]
    damping = 1e-3
    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        residual = y - _ln_lifetime(theta, t)
        jac = _jacobian(theta, t)
        jtw = jac.T * weights
        normal = jtw @ jac
        gradient = jtw @ residual
        scale = np.maximum(np.diag(normal), np.finfo(float).tiny)

        accepted = False
        for _ in range(60):
            try:
                step = np.linalg.solve(normal + damping * np.diag(scale), gradient)
            except np.linalg.LinAlgError:
                damping *= DAMPING_FACTOR
                continue
            candidate = theta + step
            cand_obj = objective(candidate)
            if np.isfinite(cand_obj) and cand_obj <= obj:
                change = obj - cand_obj
                theta, obj = candidate, cand_obj
                trace.append(obj)
                damping = max(damping / DAMPING_FACTOR, 1e-15)
                accepted = True
                break
            damping *= DAMPING_FACTOR
        if not accepted:
            break
        if change <= OBJECTIVE_RTOL * max(obj, np.finfo(float).tiny) or (
            np.linalg.norm(step) < STEP_TOL
        ):
            converged = True
            break

    theta = _sorted_pairs(theta)
    residual = y - _ln_lifetime(theta, t)
    jac = _jacobian(theta, t)
    jtw = jac.T * weights
    normal = jtw @ jac
    covariance, std_errors = _covariance(normal, residual, weights, n_params)

    model = RelaxationModel(
        processes=tuple(
            ArrheniusProcess(tau0=float(np.exp(theta[2 * i])), delta=float(theta[2 * i + 1]))
            for i in range(n_processes)
        )
    )
    return FitResult(
        model=model,
        std_errors=std_errors,
        residual_rms=float(np.sqrt(np.mean(residual**2))),
        covariance=covariance,
        converged=converged,
        iterations=iterations,
        objective_trace=tuple(trace),
    )


def _covariance(normal, residual, weights, n_params):
    """Invert the normal matrix, scaled by the residual variance."""
    if np.linalg.cond(normal) > CONDITION_LIMIT:
        pair = _degenerate_pair(normal, n_params)
        raise DegenerateParametersError(
            f"normal matrix is numerically singular: parameters {pair[0]} and {pair[1]} "
            "are degenerate (channels may have collapsed onto each other)",
            parameter_pair=pair,
        )
    dof = len(residual) - n_params
    s2 = float(np.sum(weights * residual**2)) / dof
    covariance = s2 * np.linalg.inv(normal)
    covariance = (covariance + covariance.T) / 2.0
    return covariance, np.sqrt(np.maximum(np.diag(covariance), 0.0))


def _degenerate_pair(normal, n_params):
    """Names of the two parameters dominating the near-null direction."""
    d = np.sqrt(np.maximum(np.diag(normal), np.finfo(float).tiny))
    corr = normal / np.outer(d, d)
    _, vecs = np.linalg.eigh(corr)
    null = np.abs(vecs[:, 0])
    first, second = np.argsort(null)[-2:][::-1]
    names = []
    for i in range(n_params // 2):
        names += [f"ln_tau0_{i + 1}", f"delta_{i + 1}"]
    return (names[first], names[second])
