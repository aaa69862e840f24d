"""Batch experiment driver and the named verification suite.

Every inequality the package implements has one named check here; each
check draws its own seed from the run seed by hashing the check name, so
checks are independent and the whole suite is reproducible byte for byte.
Budgets are sized to keep a full run around a couple of minutes; the
acceptance tests rerun the heavy protocols at full scale.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bodies, manifolds, stochastic, systems, widths
from .bodies import LpBall, PolarBody, euclidean_ball, induced_ball, linear_image
from .errors import ConfigError
from .linalg import as_generator, min_singular_value, random_subspace
from .stochastic import (expectation_norm, expected_norm_bound, greedy_net,
                         mc_volume_ratio, section_radius)
from .systems import sphere_harmonics_system, trig_prefix_system, trig_system


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one named check: a pass flag plus the worst slack seen."""

    name: str
    statement: str
    trials: int
    violations: int
    worst_margin: float
    passed: bool
    details: dict = field(default_factory=dict, compare=False)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "statement": self.statement,
            "trials": self.trials,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "passed": self.passed,
            "details": self.details,
        }


def _report(name: str, statement: str, margins, details=None) -> VerificationReport:
    margins = [float(m) for m in margins]
    violations = sum(1 for m in margins if m < 0)
    return VerificationReport(
        name=name,
        statement=statement,
        trials=len(margins),
        violations=violations,
        worst_margin=min(margins) if margins else float("inf"),
        passed=violations == 0,
        details=details or {},
    )


def check_seed(seed: int, name: str) -> int:
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:4], "big") % (2**31)


# --------------------------------------------------------------------------
# the named checks
# --------------------------------------------------------------------------


def check_volume_identity(seed: int, samples: int = 200_000) -> VerificationReport:
    s = check_seed(seed, "volume-identity")
    cases = [
        (LpBall(2, np.inf), 4.0 / math.pi),
        (linear_image(euclidean_ball(2), np.diag([2.0, 1.0])), 2.0),
    ]
    margins, details = [], {}
    for i, (body, target) in enumerate(cases):
        est = mc_volume_ratio(body, euclidean_ball(2), samples=samples, seed=s + i)
        rel = abs(est.value / target - 1.0)
        margins.append(0.05 - rel)
        details[body.label] = {"estimate": est.value, "target": target}
    return _report("volume-identity",
                   "sphere average of gauge^(-n) reproduces known area ratios within 5%",
                   margins, details)


def check_expectation_bound(seed: int, samples: int = 30_000) -> VerificationReport:
    s = check_seed(seed, "expectation-bound")
    margins, details = [], {}
    for n in (3, 5, 9):
        system = trig_system((n - 1) // 2)
        for p in (2.0, 4.0, 8.0):
            est = expectation_norm(induced_ball(system, p), samples=samples, seed=s)
            bound = expected_norm_bound(p)
            margins.append(bound + est.half_width + 1e-6 - est.value)
            details[f"n={n},p={p}"] = {"estimate": est.value, "bound": bound}
    return _report("expectation-bound",
                   "sphere expectation of the induced p-gauge stays below the "
                   "Gaussian-moment bound sqrt(2)*pi^(-1/2p)*Gamma((p+1)/2)^(1/p)",
                   margins, details)


def check_santalo(seed: int, mc_seeds: int = 3, samples: int = 3000) -> VerificationReport:
    s = check_seed(seed, "santalo")
    margins = [math.pi**2 - 8.0]  # exact planar case: cube times cross-polytope
    details = {"exact-2d": margins[0]}
    system = trig_system(1)
    for p in (1.5, 2.0, 4.0):
        body = induced_ball(system, p)
        for k in range(mc_seeds):
            polar = PolarBody(body, restarts=3, iters=150, seed=s + 17 * k)
            v = mc_volume_ratio(body, euclidean_ball(3), samples=samples,
                                seed=s + k, check_blowup=False)
            vp = mc_volume_ratio(polar, euclidean_ball(3), samples=samples,
                                 seed=s + 1000 + k, check_blowup=False)
            product = v.value * vp.value
            slack = 2.0 * (v.half_width * vp.value + vp.half_width * v.value) + 1e-6
            margins.append(1.0 + slack - product)
            details[f"p={p},rep={k}"] = {"product": product, "slack": slack}
    return _report("santalo",
                   "volume product Vol(V)*Vol(polar V) <= Vol(B2)^2 for "
                   "origin-symmetric convex bodies",
                   margins, details)


def check_urysohn(seed: int, samples: int = 30_000) -> VerificationReport:
    s = check_seed(seed, "urysohn-volume")
    margins, details = [], {}
    for n in (3, 5, 9):
        system = trig_system((n - 1) // 2)
        for p in (1.0, 2.0, 4.0, 8.0):
            body = induced_ball(system, p)
            vol = mc_volume_ratio(body, euclidean_ball(n), samples=samples,
                                  seed=s, check_blowup=False)
            exp = expectation_norm(body, samples=samples, seed=s)
            # same sample stream on both sides: the bound is Jensen on the
            # empirical measure, so the margin is nonnegative up to roundoff
            lower = exp.value ** float(-n)
            slack = vol.half_width + n * lower / max(exp.value, 1e-12) * exp.half_width
            margins.append(vol.value + slack + 1e-9 - lower)
            details[f"n={n},p={p}"] = {"volume_ratio": vol.value, "jensen_lower": lower}
    return _report("urysohn-volume",
                   "Vol(V)/Vol(B2) >= E[gauge]^(-n) (convexity of t -> t^(-n))",
                   margins, details)


def check_net_chain(seed: int, seeds: int = 5) -> VerificationReport:
    s = check_seed(seed, "net-chain")
    ref = euclidean_ball(2)
    margins, details = [], {}
    for body, tag in ((euclidean_ball(2), "ball"), (LpBall(2, np.inf), "cube")):
        for delta in (0.25, 0.5, 1.0):
            for k in range(seeds):
                fine = greedy_net(body, ref, delta, seed=s + k)
                coarse = greedy_net(body, ref, 2.0 * delta, seed=s + k)
                margins.append(float(fine.net_size - coarse.packing_size))
                margins.append(float(fine.packing_size - fine.net_size))
                margins.append(1.0 if fine.certified else -1.0)
                details[f"{tag},delta={delta},rep={k}"] = {
                    "m_2delta": coarse.packing_size,
                    "n_delta": fine.net_size,
                    "coverage": fine.coverage,
                }
    return _report("net-chain",
                   "greedy packings satisfy m(2*delta) <= n(delta) <= m(delta) "
                   "with certified coverage",
                   margins, details)


def check_brunn_sections(seed: int, samples: int = 12_000) -> VerificationReport:
    s = check_seed(seed, "brunn-sections")
    margins, details = [], {}
    cases = [
        ("disk", euclidean_ball(2), np.array([[1.0, 0.0]]),
         [np.array([0.0, 0.5]), np.array([0.0, 0.9])]),
        ("cube", LpBall(2, np.inf), np.array([[1.0, 0.0]]),
         [np.array([0.0, 0.4]), np.array([0.0, 0.8])]),
        ("trig3", induced_ball(trig_system(1), 4.0), np.array([[1.0, 0.0, 0.0]]),
         [np.array([0.0, 0.3, 0.0]), np.array([0.0, 0.0, 0.4])]),
    ]
    from .linalg import orthonormalize

    for tag, body, frame_rows, offsets in cases:
        sub = orthonormalize(frame_rows)
        rng = as_generator(s)
        central = stochastic._offset_section_volume(body, sub, np.zeros(body.dim),
                                                    samples, rng)
        worst = math.inf
        for z in offsets:
            off = stochastic._offset_section_volume(body, sub, z, samples, rng)
            slack = 2.0 * (central.half_width + off.half_width)
            worst = min(worst, central.value - off.value + slack)
        margins.append(worst)
        details[tag] = {"central": central.value, "worst_margin": worst}
    return _report("brunn-sections",
                   "the central slice of a symmetric convex body has maximal volume "
                   "among parallel slices",
                   margins, details)


def check_projection_ellipsoid(seed: int, trials: int = 2,
                               subspaces: int = 3) -> VerificationReport:
    s = check_seed(seed, "projection-ellipsoid")
    margins, details = [], {}
    for n in (3, 4, 5):
        for t in range(trials):
            rng = as_generator([s, n, t])
            a = np.diag(np.exp(rng.uniform(-1.0, 1.0, n)))
            rho = min_singular_value(a)
            det = float(np.linalg.det(a))
            sdim = math.ceil(n / 2)
            bound = 3.0**n * rho ** (sdim - n) * det
            for j in range(subspaces):
                sub = random_subspace(n, sdim, rng)
                # projection of an ellipsoid: exact volume from singular values
                ratio = float(np.prod(np.linalg.svd(sub.frame @ a, compute_uv=False)))
                margins.append(bound / ratio - 1.0)
            details[f"n={n},trial={t}"] = {"bound": bound}
    return _report("projection-ellipsoid",
                   "Vol_s(P(L) A B2)/Vol_s(B2^s) <= 3^n rho^(s-n) det A for every "
                   "subspace L",
                   margins, details)


def check_projection_l1(seed: int, samples: int = 400) -> VerificationReport:
    s = check_seed(seed, "projection-l1-ball")
    margins, details = [], {}
    for n in (3, 5, 7, 9):
        system = trig_system((n - 1) // 2)
        sub = random_subspace(n, math.ceil(n / 2), s + n)
        est = stochastic.projection_volume_ratio(induced_ball(system, 1.0), sub,
                                                 samples=samples, seed=s + n)
        root = est.value ** (1.0 / n)
        margins.append(8.0 - root)
        details[f"n={n}"] = {"ratio_nth_root": root}
    return _report("projection-l1-ball",
                   "projections of the induced 1-ball have volume at most C^n times "
                   "the unit ball's (bounded n-th roots)",
                   margins, details)


def check_projection_dual(seed: int, samples: int = 400,
                          e_samples: int = 30_000) -> VerificationReport:
    s = check_seed(seed, "projection-dual-expectation")
    margins, details = [], {}
    for n in (3, 5):
        system = trig_system((n - 1) // 2)
        for p in (1.5, 2.0):
            p_dual = p / (p - 1.0) if p > 1 else np.inf
            e_dual = expectation_norm(induced_ball(system, p_dual),
                                      samples=e_samples, seed=s)
            sub = random_subspace(n, math.ceil(n / 2), s + n)
            est = stochastic.projection_volume_ratio(induced_ball(system, p), sub,
                                                     samples=samples, seed=s + n)
            root = est.value ** (1.0 / n)
            rhs = 2.5 * (e_dual.value + e_dual.half_width) + 0.05
            margins.append(rhs - root)
            details[f"n={n},p={p}"] = {"ratio_nth_root": root, "rhs": rhs}
    return _report("projection-dual-expectation",
                   "n-th roots of projection volumes of the induced p-ball are "
                   "dominated by (5/2) times the dual-exponent expectation",
                   margins, details)


def _radius_check(kind: str, seed: int, constant_scale: float,
                  calibration_seeds, validation_seeds, grid) -> VerificationReport:
    const = widths.calibrate_radius_constant(kind, calibration_seeds, **grid)
    scaled = widths.CalibrationConstant(const.context,
                                        const.value * constant_scale, const.trials)
    trials, violations, worst = widths.radius_bound_violations(
        kind, scaled, validation_seeds, **grid)
    name = f"radius-{kind}"
    statement = ("sampled sections of dimension >= 2n/3 keep induced-1-norm radius "
                 "above const * rho * E_p^(-3/2)" if kind == "l1" else
                 "sampled proportional sections keep induced-q-norm radius above "
                 "const * rho * (E_q' E_p)^(-n/s)")
    return VerificationReport(
        name=name, statement=statement, trials=trials, violations=violations,
        worst_margin=float(worst), passed=violations == 0,
        details={"constant": scaled.value, "training_trials": const.trials},
    )


def check_radius_l1(seed: int, constant_scale: float = 1.0) -> VerificationReport:
    grid = dict(dims=(3, 4, 5, 6), ps=(2.0, 4.0), subspaces=2, restarts=16)
    return _radius_check("l1", seed, constant_scale, range(0, 10), range(10, 22), grid)


def check_radius_lq(seed: int, constant_scale: float = 1.0) -> VerificationReport:
    grid = dict(dims=(3, 4, 5, 6), ps=(2.0, 4.0), qs=(1.25, 1.5, 2.0),
                subspaces=2, restarts=16)
    return _radius_check("lq", seed, constant_scale, range(0, 10), range(10, 22), grid)


def check_width_duality(seed: int, trials: int = 2, restarts: int = 48) -> VerificationReport:
    s = check_seed(seed, "width-duality")
    margins, details = [], {}
    for n in (3, 4):
        for t in range(trials):
            rng = as_generator([s, n, t])
            axes = np.sort(np.exp(rng.uniform(-1.0, 1.0, n)))[::-1]
            a = np.diag(axes)
            for m in (1, 2):
                exact = widths.ellipsoid_kolmogorov_exact(axes, m)
                kol = widths.brute_force_kolmogorov(
                    linear_image(euclidean_ball(n), a), LpBall(n, 2.0), m,
                    restarts=restarts, seed=s + t)
                gel = widths.brute_force_gelfand(
                    linear_image(euclidean_ball(n), a), LpBall(n, 2.0), m,
                    restarts=restarts, seed=s + t)
                margins.append(1e-3 - abs(kol.value - exact))
                margins.append(1e-3 - abs(gel.value - exact))
                margins.append(1e-2 - abs(kol.value - gel.value))
                details[f"n={n},t={t},m={m}"] = {
                    "exact": exact, "kolmogorov": kol.value, "gelfand": gel.value}
    return _report("width-duality",
                   "brute-force Gelfand and Kolmogorov widths agree with the exact "
                   "ellipsoid oracle and with each other in Euclidean norms",
                   margins, details)


def check_fourier_tail(seed: int) -> VerificationReport:
    margins, details = [], {}
    seq = 1.0 / np.arange(1, 13)
    for m in (0, 1, 2, 5):
        margins.append(0.0 if widths.fourier_tail_sup(seq, m) == seq[m] else -1.0)
    # numeric cross-check: the worst truncation error over the unit ball is the
    # spectral norm of the tail block
    lam = np.array([1.0, 0.5, 0.25, 0.2])
    for m in (0, 1, 2, 3):
        tail = np.diag(np.concatenate([np.zeros(m), lam[m:]]))
        numeric = float(np.linalg.norm(tail, 2))
        margins.append(1e-9 - abs(numeric - widths.fourier_tail_sup(lam, m)))
        details[f"m={m}"] = {"numeric": numeric}
    return _report("fourier-tail",
                   "keeping m coefficients of a nonincreasing multiplier leaves "
                   "worst L2 error exactly |lambda_(m+1)|",
                   margins, details)


def check_weyl_ratio(seed: int) -> VerificationReport:
    margins, details = [], {}
    for space in manifolds.all_families():
        ratios = np.array([space.weyl_ratio(N) for N in range(20, 61)])
        drift = float(np.max(np.abs(ratios[1:] / ratios[:-1] - 1.0)))
        margins.append(0.2 - drift)
        worst_theta = max(
            abs(space.eigenvalue(N + 1) / space.eigenvalue(N) - 1.0) - 3.0 / N
            for N in range(10, 80))
        margins.append(-worst_theta)
        details[space.name] = {
            "step_drift": drift,
            "window_spread": float(ratios.max() / ratios.min() - 1.0),
        }
    return _report("weyl-ratio",
                   "tau_N / theta_N^(d/2) stabilizes (consecutive drift < 20%) and "
                   "theta_(N+1)/theta_N -> 1 at rate 3/N",
                   margins, details)


def check_sobolev_slope(seed: int) -> VerificationReport:
    margins, details = [], {}
    space = manifolds.sphere(2)
    levels = range(4, 13)
    for gamma in (1.0, 2.0):
        target = -gamma / space.d
        s_bound = widths.sobolev_width_order(space, gamma, levels, method="bound")
        s_exact = widths.sobolev_width_order(space, gamma, levels, method="exact")
        margins.append(0.05 - abs(s_bound - target))
        margins.append(0.05 - abs(s_exact - target))
        margins.append(0.05 - abs(s_bound - s_exact))
        details[f"gamma={gamma}"] = {"bound": s_bound, "exact": s_exact, "target": target}
    return _report("sobolev-slope",
                   "lower-bound curve and exact ellipsoid widths on the 2-sphere both "
                   "decay like n^(-gamma/d)",
                   margins, details)


CHECKS = {
    "volume-identity": check_volume_identity,
    "expectation-bound": check_expectation_bound,
    "santalo": check_santalo,
    "urysohn-volume": check_urysohn,
    "net-chain": check_net_chain,
    "brunn-sections": check_brunn_sections,
    "projection-ellipsoid": check_projection_ellipsoid,
    "projection-l1-ball": check_projection_l1,
    "projection-dual-expectation": check_projection_dual,
    "radius-l1": check_radius_l1,
    "radius-lq": check_radius_lq,
    "width-duality": check_width_duality,
    "fourier-tail": check_fourier_tail,
    "weyl-ratio": check_weyl_ratio,
    "sobolev-slope": check_sobolev_slope,
}


def _worker_cap() -> int:
    env = os.environ.get("WIDTHLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"WIDTHLAB_THREADS must be an integer, got {env!r}")
    return 4


def verify_all(seed: int = 0, names=None, threads: int | None = None) -> list[VerificationReport]:
    """Run the named checks concurrently; results come back in registry order."""
    if names is None:
        names = list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks: {', '.join(unknown)}")
    workers = threads if threads is not None else _worker_cap()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = {name: pool.submit(CHECKS[name], seed) for name in names}
        return [futures[name].result() for name in names]


# --------------------------------------------------------------------------
# experiment configuration and the task runner
# --------------------------------------------------------------------------

_TASKS = ("expect", "volume", "radius", "widths", "verify", "scaling")

_ALLOWED_FIELDS = {
    "expect": {"system", "p", "samples"},
    "volume": {"body", "reference", "samples"},
    "radius": {"system", "p", "q", "diagonal", "subspace_dim", "subspaces", "restarts"},
    "widths": {"semiaxes", "orders", "restarts"},
    "verify": {"checks"},
    "scaling": {"family", "d", "gamma", "levels"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    seed: int
    params: dict

    @staticmethod
    def from_dict(raw: dict, seed_override=None) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        data = dict(raw)
        task = data.pop("task", None)
        if task not in _TASKS:
            raise ConfigError(f"field 'task': expected one of {_TASKS}, got {task!r}")
        seed = data.pop("seed", None)
        if seed_override is not None:
            seed = seed_override
        if seed is None:
            raise ConfigError("field 'seed': a seed is mandatory for reproducibility")
        if not isinstance(seed, int):
            raise ConfigError(f"field 'seed': expected an integer, got {seed!r}")
        extra = set(data) - _ALLOWED_FIELDS[task]
        if extra:
            raise ConfigError(
                f"task {task!r}: unknown fields {sorted(extra)}; "
                f"allowed: {sorted(_ALLOWED_FIELDS[task])}")
        return ExperimentConfig(task=task, seed=seed, params=data)


def _build_system(spec) -> systems.OrthonormalSystem:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("field 'system': expected {kind: trig|trig_prefix|sphere, ...}")
    kind = spec["kind"]
    if kind == "trig":
        return trig_system(int(spec.get("max_degree", 1)))
    if kind == "trig_prefix":
        return trig_prefix_system(int(spec.get("n", 3)))
    if kind == "sphere":
        return sphere_harmonics_system(int(spec.get("max_degree", 2)))
    raise ConfigError(f"field 'system.kind': unknown kind {kind!r}")


def _build_body(spec) -> bodies.Body:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("field 'body': expected a descriptor with a 'kind'")
    kind = spec["kind"]
    if kind == "lp":
        p = spec.get("p", 2)
        return LpBall(int(spec["dim"]), float("inf") if p == "inf" else float(p))
    if kind == "induced":
        return induced_ball(_build_system(spec["system"]), float(spec["p"]))
    if kind == "linear_image":
        base = _build_body(spec["base"])
        mat = spec.get("matrix", {})
        if "diagonal" in mat:
            a = np.diag(np.asarray(mat["diagonal"], dtype=float))
        elif "dense" in mat:
            a = np.asarray(mat["dense"], dtype=float)
        else:
            raise ConfigError("field 'body.matrix': need 'diagonal' or 'dense'")
        return linear_image(base, a)
    raise ConfigError(f"field 'body.kind': unknown kind {kind!r}")


def _task_expect(config: ExperimentConfig):
    p = float(config.params.get("p", 2.0))
    samples = int(config.params.get("samples", 200_000))
    system = _build_system(config.params.get("system", {"kind": "trig", "max_degree": 1}))
    est = expectation_norm(induced_ball(system, p), samples=samples, seed=config.seed)
    bound = expected_norm_bound(p) if p >= 2 else None
    row = {"system": system.name, "n": system.n, "p": p, "value": est.value,
           "half_width": est.half_width,
           "bound": "" if bound is None else bound}
    ok = bound is None or est.value <= bound + est.half_width + 1e-6
    return [row], ok


def _task_volume(config: ExperimentConfig):
    samples = int(config.params.get("samples", 500_000))
    body = _build_body(config.params["body"])
    ref_spec = config.params.get("reference", {"kind": "lp", "dim": body.dim, "p": 2})
    reference = _build_body(ref_spec)
    est = mc_volume_ratio(body, reference, samples=samples, seed=config.seed)
    row = {"body": body.label, "reference": reference.label,
           "value": est.value, "half_width": est.half_width, "samples": est.samples}
    return [row], True


def _task_radius(config: ExperimentConfig):
    system = _build_system(config.params.get("system", {"kind": "trig", "max_degree": 1}))
    n = system.n
    p = float(config.params.get("p", 2.0))
    q = float(config.params.get("q", 1.0))
    diag = np.asarray(config.params.get("diagonal", [1.0] * n), dtype=float)
    if len(diag) != n:
        raise ConfigError("field 'diagonal': length must match the system size")
    a = np.diag(diag)
    sdim = int(config.params.get("subspace_dim", math.ceil(2 * n / 3)))
    count = int(config.params.get("subspaces", 5))
    restarts = int(config.params.get("restarts", 24))
    body = linear_image(induced_ball(system, p), a)
    gauge = induced_ball(system, q)
    rows = []
    for j in range(count):
        sub = random_subspace(n, sdim, [config.seed, j])
        rad = section_radius(body, gauge, sub, restarts=restarts,
                             seed=[config.seed, j, 1], polish=False)
        rows.append({"subspace": j, "dim": sdim, "radius": rad})
    return rows, True


def _task_widths(config: ExperimentConfig):
    axes = np.sort(np.asarray(config.params["semiaxes"], dtype=float))[::-1]
    n = len(axes)
    orders = config.params.get("orders", list(range(n + 1)))
    restarts = int(config.params.get("restarts", 128))
    a = np.diag(axes)
    body = linear_image(euclidean_ball(n), a)
    target = LpBall(n, 2.0)
    rows = []
    ok = True
    for m in orders:
        exact = widths.ellipsoid_kolmogorov_exact(axes, int(m))
        kol = widths.brute_force_kolmogorov(body, target, int(m),
                                            restarts=restarts, seed=config.seed)
        gel = widths.brute_force_gelfand(body, target, int(m),
                                         restarts=restarts, seed=config.seed)
        agree = abs(kol.value - exact) <= 1e-3 and abs(gel.value - exact) <= 1e-3
        ok = ok and agree
        rows.append({"m": int(m), "exact": exact, "kolmogorov": kol.value,
                     "gelfand": gel.value, "agree": agree})
    return rows, ok


def _task_scaling(config: ExperimentConfig):
    family = config.params.get("family", "sphere")
    d = int(config.params.get("d", 2))
    gamma = float(config.params.get("gamma", 2.0))
    lo, hi = config.params.get("levels", [4, 12])
    builders = {
        "sphere": manifolds.sphere,
        "real_projective": manifolds.real_projective,
        "complex_projective": manifolds.complex_projective,
        "quaternionic_projective": manifolds.quaternionic_projective,
        "cayley_plane": lambda _d: manifolds.cayley_plane(),
    }
    if family not in builders:
        raise ConfigError(f"field 'family': unknown family {family!r}")
    space = builders[family](d)
    levels = range(int(lo), int(hi) + 1)
    s_bound = widths.sobolev_width_order(space, gamma, levels, method="bound")
    s_exact = widths.sobolev_width_order(space, gamma, levels, method="exact")
    target = -gamma / space.d
    rows = [{"space": space.name, "gamma": gamma, "slope_bound": s_bound,
             "slope_exact": s_exact, "target": target}]
    ok = abs(s_bound - target) <= 0.05 and abs(s_exact - target) <= 0.05
    return rows, ok


def _write_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        if not rows:
            fh.write("")
            return
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v)
                             for k, v in row.items()})


def run(config: ExperimentConfig, out_dir=None) -> tuple[int, dict]:
    """Execute a configured task; returns (exit_code, outputs).

    Writes <task>.csv and <task>_summary.json under ``out_dir`` when given.
    Exit code 0 means every checked property passed.
    """
    if config.task == "verify":
        checks = config.params.get("checks", "all")
        names = None if checks == "all" else list(checks)
        reports = verify_all(config.seed, names=names)
        rows = [{"check": r.name, "trials": r.trials, "violations": r.violations,
                 "worst_margin": r.worst_margin, "passed": r.passed}
                for r in reports]
        ok = all(r.passed for r in reports)
        summary = {"task": "verify", "seed": config.seed, "all_pass": ok,
                   "reports": [r.to_json_dict() for r in reports]}
    else:
        runner = {"expect": _task_expect, "volume": _task_volume,
                  "radius": _task_radius, "widths": _task_widths,
                  "scaling": _task_scaling}[config.task]
        rows, ok = runner(config)
        summary = {"task": config.task, "seed": config.seed, "all_pass": ok,
                   "rows": rows}
    outputs = {"rows": rows, "summary": summary}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / f"{config.task}.csv", rows)
        with open(out / f"{config.task}_summary.json", "w") as fh:
            json.dump(summary, fh, sort_keys=True, indent=2)
            fh.write("\n")
        outputs["csv"] = str(out / f"{config.task}.csv")
        outputs["json"] = str(out / f"{config.task}_summary.json")
    return (0 if ok else 1), outputs
