"""Named experiments and their invariant checks.

Each experiment maps an :class:`ExperimentConfig` to a list of
:class:`TimeSeries` on a shared grid plus a summary dict.  ``verify`` runs
the invariant suite for an experiment and returns a list of :class:`Check`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np

from . import grover as gr
from .amplitudes import amplitude_profile
from .basis import ProgramLineSpec, initial_state, superposition
from .hamiltonian import build, full_spin_oracle, MAX_ORACLE_SITES
from .observables import (PROB_TOL, TimeSeries, bound_eq13, bound_eq14, completion_probability,
                          control_resolved_probability)
from .propagator import evolve_const, evolve_schedule, make_pi_pulse_schedule

EXPERIMENTS = ("cursor", "telomere", "pipulse", "double_trap", "grover", "bounds")
DEFAULT_DT = 0.05
NORM_TOL = 1e-10
ORACLE_TOL = 1e-8
TRAP_TOL = 1e-9


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    s: int | None = None
    delta: int | None = None
    mu: int | None = None
    t0: float | None = None
    t_max: float | None = None
    dt: float = DEFAULT_DT
    output_path: str | None = None
    format: str = "csv"
    seed: int | None = None  # reserved; every experiment is deterministic
    s_list: tuple[int, ...] = (10, 20, 50)
    target: tuple[int, ...] | None = None

    def resolved(self) -> "ExperimentConfig":
        """Fill paper-figure defaults and validate parameter combinations."""
        e = self.experiment
        if e not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {e!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.dt <= 0:
            raise ConfigError("--dt must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError("--format must be csv or json")
        cfg = replace(self)
        if e == "grover":
            cfg.mu = 5 if cfg.mu is None else cfg.mu
            if cfg.mu < 1:
                raise ConfigError("--mu must be >= 1")
            if cfg.s is None:
                cfg.s = 2 ** (cfg.mu + 1) + 1
            if cfg.s % 2 == 0:
                raise ConfigError("grover needs an odd --s")
            if cfg.delta:
                raise ConfigError("--delta does not apply to grover")
            cfg.t_max = 10.0 * cfg.s if cfg.t_max is None else cfg.t_max
        elif e == "bounds":
            if any(s < 1 for s in cfg.s_list):
                raise ConfigError("--s-list entries must be >= 1")
        else:
            if cfg.mu is not None:
                raise ConfigError(f"--mu does not apply to {e}")
            cfg.s = 20 if cfg.s is None else cfg.s
            if cfg.s < 1:
                raise ConfigError("--s must be >= 1")
            if e == "cursor":
                if cfg.delta:
                    raise ConfigError("cursor has no telomere; drop --delta")
                cfg.delta = 0
            else:
                cfg.delta = 10 if cfg.delta is None else cfg.delta
                if cfg.delta < 1:
                    raise ConfigError(f"{e} needs --delta >= 1")
            if e in ("pipulse", "double_trap"):
                cfg.t0 = float(cfg.s + 2 * cfg.delta) if cfg.t0 is None else cfg.t0
                if cfg.t0 < 0.5:
                    raise ConfigError("--t0 must be >= 0.5")
            elif cfg.t0 is not None:
                raise ConfigError(f"--t0 does not apply to {e}")
            if cfg.t_max is None:
                cfg.t_max = 2.0 * (cfg.s + 2 * cfg.delta)
                if e in ("pipulse", "double_trap"):
                    cfg.t_max = max(cfg.t_max, cfg.t0 + 40.0)
            if e in ("pipulse", "double_trap") and cfg.t_max <= cfg.t0 + 0.5:
                raise ConfigError("--t-max must lie after the pulse window")
        if cfg.t_max is not None and cfg.t_max <= 0:
            raise ConfigError("--t-max must be positive")
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)


def time_grid(t_max: float, dt: float, t_min: float = 0.0) -> np.ndarray:
    n = int(round((t_max - t_min) / dt))
    return np.linspace(t_min, t_min + n * dt, n + 1)


def cursor_line(s: int) -> ProgramLineSpec:
    return ProgramLineSpec(s=s, topology="sequential")


def telomere_line(s: int, delta: int) -> ProgramLineSpec:
    return ProgramLineSpec(s=s, delta=delta, topology="telomeric")


def double_trap_line(s: int, delta: int) -> ProgramLineSpec:
    return ProgramLineSpec(s=s, delta=delta, topology="double_trap")


def run_cursor(s: int, times):
    spec = cursor_line(s)
    return spec, evolve_const(build(spec), initial_state(spec, [1]), times)


def run_telomere(s: int, delta: int, times, control="plus"):
    spec = telomere_line(s, delta)
    return spec, evolve_const(build(spec), initial_state(spec, [1], control), times)


def run_pipulse(s: int, delta: int, t0: float, times):
    spec = telomere_line(s, delta)
    schedule = make_pi_pulse_schedule(build(spec), t0, float(times[-1]))
    return spec, evolve_schedule(schedule, initial_state(spec, [1], "plus"), times)


def run_double_trap(s: int, delta: int, t0: float, times):
    spec = double_trap_line(s, delta)
    psi0 = initial_state(spec, [1], superposition(2 ** -0.5, 2 ** -0.5))
    schedule = make_pi_pulse_schedule(build(spec), t0, float(times[-1]))
    return spec, evolve_schedule(schedule, psi0, times)


@dataclass
class Outcome:
    series: list[TimeSeries]
    summary: dict
    index_name: str = "t"


def _peak_summary(ts: TimeSeries) -> dict:
    t, v = ts.argmax()
    return {"series": ts.label, "max": v, "t_of_max": t}


def experiment_cursor(cfg: ExperimentConfig) -> Outcome:
    spec, res = run_cursor(cfg.s, time_grid(cfg.t_max, cfg.dt))
    p = completion_probability(res, spec)
    return Outcome([p], {**_peak_summary(p), "bound_eq13": bound_eq13(cfg.s)})


def experiment_telomere(cfg: ExperimentConfig) -> Outcome:
    s, d = cfg.s, cfg.delta
    spec, res = run_telomere(s, d, time_grid(cfg.t_max, cfg.dt))
    p = completion_probability(res, spec)
    tel = TimeSeries("p_telomere", res.times, res.probability(spec.basis.mask(sites=(s + 1, s + d))))
    return Outcome([p, tel], {**_peak_summary(p), "bound_eq14": bound_eq14(s, d),
                              "max_p_telomere": tel.max()})


def experiment_pipulse(cfg: ExperimentConfig) -> Outcome:
    s, d, t0 = cfg.s, cfg.delta, cfg.t0
    times = time_grid(cfg.t_max, cfg.dt)
    spec, res = run_pipulse(s, d, t0, times)
    telomere = (s + 1, s + d)
    trapped = TimeSeries("p_trapped", times, res.probability(spec.basis.mask(sites=telomere)))
    trapped_plus = control_resolved_probability(res, spec, "plus", telomere, label="p_trapped_plus")
    _, ref1 = run_telomere(s, d, times, control="minus")
    _, ref2 = run_telomere(s, d, times, control="plus")
    no_telo = completion_probability(ref1, spec, label="p_completion_no_telomere")
    no_pulse = completion_probability(ref2, spec, label="p_completion_no_pulse")
    after = trapped_plus.window(t0 + 0.5)
    return Outcome([trapped, trapped_plus, no_telo, no_pulse], {
        "series": "p_trapped", "t0": t0,
        "trapped_mass_final": float(trapped_plus.values[-1]),
        "trapped_variation_after_pulse": float(np.ptp(after.values)) if len(after.t) else 0.0,
        "bound_eq14": bound_eq14(s, d),
    })


def experiment_double_trap(cfg: ExperimentConfig) -> Outcome:
    s, d, t0 = cfg.s, cfg.delta, cfg.t0
    times = time_grid(cfg.t_max, cfg.dt)
    spec, res = run_double_trap(s, d, t0, times)
    b1, b2 = (s + 1, s + d), (s + d + 1, s + 2 * d)
    br1 = TimeSeries("p_branch1", times, res.probability(spec.basis.mask(sites=b1)))
    br2 = TimeSeries("p_branch2", times, res.probability(spec.basis.mask(sites=b2)))
    tp1 = control_resolved_probability(res, spec, "plus", b1, label="p_trapped_plus_branch1")
    tm2 = control_resolved_probability(res, spec, "minus", b2, label="p_trapped_minus_branch2")
    a1, a2 = tp1.window(t0 + 0.5), tm2.window(t0 + 0.5)
    return Outcome([br1, br2, tp1, tm2], {
        "series": "p_trapped_plus_branch1+p_trapped_minus_branch2", "t0": t0,
        "trapped_mass_final": float(tp1.values[-1] + tm2.values[-1]),
        "trapped_variation_after_pulse": float(max(np.ptp(a1.values), np.ptp(a2.values))),
    })


def experiment_grover(cfg: ExperimentConfig) -> Outcome:
    spec = gr.GroverSpec(cfg.mu, cfg.target, cfg.s)
    times = time_grid(cfg.t_max, cfg.dt)
    p = TimeSeries("p_target", times, gr.damped_overlap(spec, times))
    return Outcome([p], {**_peak_summary(p), "undamped_peak": gr.peak_overlap(spec),
                         "theta": spec.theta, "n_optimal": spec.n_optimal})


def experiment_bounds(cfg: ExperimentConfig) -> Outcome:
    """Observed maxima against both bounds for each s, with delta = s // 2."""
    rows = {k: [] for k in ("max_p_no_telomere", "bound_eq13", "delta",
                            "max_p_telomere", "bound_eq14")}
    s_values = sorted(set(cfg.s_list))
    for s in s_values:
        d = max(1, s // 2)
        _, res = run_cursor(s, time_grid(20.0 * s, cfg.dt))
        rows["max_p_no_telomere"].append(res.probabilities()[:, s - 1].max())
        rows["bound_eq13"].append(bound_eq13(s))
        spec, res = run_telomere(s, d, time_grid(2.0 * (s + 2 * d), cfg.dt))
        rows["delta"].append(d)
        rows["max_p_telomere"].append(completion_probability(res, spec).max())
        rows["bound_eq14"].append(bound_eq14(s, d))
    idx = np.asarray(s_values, dtype=float)
    series = [TimeSeries(k, idx, np.asarray(v, dtype=float), probability=False)
              for k, v in rows.items()]
    violations = [s for s, m, b in zip(s_values, rows["max_p_no_telomere"], rows["bound_eq13"])
                  if m > b]
    return Outcome(series, {"s": s_values, "eq13_violations": violations,
                            "eq14_excess": [float(m - b) for m, b in
                                            zip(rows["max_p_telomere"], rows["bound_eq14"])]},
                   index_name="s")


RUNNERS = {
    "cursor": experiment_cursor,
    "telomere": experiment_telomere,
    "pipulse": experiment_pipulse,
    "double_trap": experiment_double_trap,
    "grover": experiment_grover,
    "bounds": experiment_bounds,
}


def run_experiment(cfg: ExperimentConfig) -> Outcome:
    cfg = cfg.resolved()
    return RUNNERS[cfg.experiment](cfg)


# ---------------------------------------------------------------------------
# invariant checks


@dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    tolerance: float | None = None
    enforced: bool = True
    note: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)
        if self.value is not None:
            self.value = float(self.value)
        if self.tolerance is not None:
            self.tolerance = float(self.tolerance)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v not in (None, "")}


def _norm_check(res, name="norm") -> Check:
    drift = float(np.abs(np.linalg.norm(res.amplitudes, axis=1) - 1).max())
    return Check(name, drift <= NORM_TOL, drift, NORM_TOL)


def _range_check(series: list[TimeSeries], name="probability_range") -> Check:
    lo = min(float(s.values.min()) for s in series)
    hi = max(float(s.values.max()) for s in series)
    excess = max(-lo, hi - 1.0, 0.0)
    return Check(name, excess <= PROB_TOL, excess, PROB_TOL)


def _hermitian_check(H, name="hermiticity") -> Check:
    r = H.hermiticity_residual()
    return Check(name, r == 0.0, r, 0.0)


def _oracle_check(spec: ProgramLineSpec, name="sector_oracle") -> Check:
    oracle = full_spin_oracle(spec)
    comm = oracle.commutator_norm()
    diff = float(np.abs(oracle.restricted() - build(spec).to_dense()).max())
    return Check(name, comm == 0.0 and diff == 0.0, max(comm, diff), 0.0)


def _closed_form_check(result, amps_fn, name) -> Check:
    err = float(np.abs(result - amps_fn).max())
    return Check(name, err <= ORACLE_TOL, err, ORACLE_TOL)


def verify_cursor(cfg: ExperimentConfig) -> list[Check]:
    s = cfg.s
    times = time_grid(20.0 * s, cfg.dt)
    spec, res = run_cursor(s, times)
    p = completion_probability(res, spec)
    checks = [_norm_check(res), _hermitian_check(build(spec)), _range_check([p])]
    sample = np.array([0.1, 1.0, 10.0, 100.0])
    _, res_s = run_cursor(s, sample)
    checks.append(_closed_form_check(res_s.amplitudes, amplitude_profile(sample, s),
                                     "closed_form_vs_propagator"))
    checks.append(Check("bound_eq13", p.max() <= bound_eq13(s), p.max(), bound_eq13(s)))
    if spec.n_sites <= MAX_ORACLE_SITES:
        checks.append(_oracle_check(spec))
    return checks


def verify_telomere(cfg: ExperimentConfig) -> list[Check]:
    s, d = cfg.s, cfg.delta
    times = time_grid(2.0 * (s + 2 * d), cfg.dt)
    spec, res_plus = run_telomere(s, d, times, "plus")
    _, res_minus = run_telomere(s, d, times, "minus")
    H = build(spec)
    p = completion_probability(res_plus, spec)
    q = completion_probability(res_minus, spec)
    sample = np.array([0.1, 1.0, 10.0, 100.0])
    _, rp = run_telomere(s, d, sample, "plus")
    _, rm = run_telomere(s, d, sample, "minus")
    # plus and minus components have disjoint site support
    plus_amps = (rp.amplitudes[:, spec.basis.mask(control="plus")]
                 + rp.amplitudes[:, spec.basis.mask(control="minus")])
    minus_amps = rm.amplitudes[:, spec.basis.mask(control="minus")][:, :s]
    checks = [
        _norm_check(res_plus, "norm_plus"), _norm_check(res_minus, "norm_minus"),
        _hermitian_check(H), _range_check([p, q]),
        _closed_form_check(plus_amps, amplitude_profile(sample, s + d), "plus_matches_c(t,k;s+delta)"),
        _closed_form_check(minus_amps, amplitude_profile(sample, s), "minus_matches_c(t,k;s)"),
        Check("minus_confined_to_active", float(res_minus.probability(
            spec.basis.mask(sites=(s + 1, s + d))).max()) <= PROB_TOL,
            float(res_minus.probability(spec.basis.mask(sites=(s + 1, s + d))).max()), PROB_TOL),
        Check("bound_eq13_minus", q.max() <= bound_eq13(s), q.max(), bound_eq13(s)),
        Check("bound_eq14", p.max() <= bound_eq14(s, d), p.max(), bound_eq14(s, d),
              enforced=False, note="asymptotic bound; finite chains can exceed it"),
    ]
    if spec.n_sites <= MAX_ORACLE_SITES:
        checks.append(_oracle_check(spec))
    return checks


def _trap_checks(series_after: list[TimeSeries]) -> list[Check]:
    out = []
    for ts in series_after:
        v = float(np.ptp(ts.values)) if len(ts.t) else 0.0
        out.append(Check(f"{ts.label}_constant_after_pulse", v <= TRAP_TOL, v, TRAP_TOL))
    return out


def verify_pipulse(cfg: ExperimentConfig) -> list[Check]:
    s, d, t0 = cfg.s, cfg.delta, cfg.t0
    times = time_grid(cfg.t_max, cfg.dt)
    spec, res = run_pipulse(s, d, t0, times)
    schedule = make_pi_pulse_schedule(build(spec), t0, cfg.t_max)
    tp = control_resolved_probability(res, spec, "plus", (s + 1, s + d), label="p_trapped_plus")
    checks = [_norm_check(res), _range_check([tp, completion_probability(res, spec)])]
    checks += [_hermitian_check(seg.hamiltonian, f"hermiticity_segment{i}")
               for i, seg in enumerate(schedule)]
    checks += _trap_checks([tp.window(t0 + 0.5)])
    return checks


def verify_double_trap(cfg: ExperimentConfig) -> list[Check]:
    s, d, t0 = cfg.s, cfg.delta, cfg.t0
    times = time_grid(cfg.t_max, cfg.dt)
    spec, res = run_double_trap(s, d, t0, times)
    tp1 = control_resolved_probability(res, spec, "plus", (s + 1, s + d),
                                       label="p_trapped_plus_branch1")
    tm2 = control_resolved_probability(res, spec, "minus", (s + d + 1, s + 2 * d),
                                       label="p_trapped_minus_branch2")
    checks = [_norm_check(res), _range_check([tp1, tm2]), _hermitian_check(build(spec))]
    checks += _trap_checks([tp1.window(t0 + 0.5), tm2.window(t0 + 0.5)])
    if spec.n_sites <= MAX_ORACLE_SITES:
        checks.append(_oracle_check(spec))
    return checks


def verify_grover(cfg: ExperimentConfig) -> list[Check]:
    spec = gr.GroverSpec(cfg.mu, cfg.target, cfg.s)
    checks = []
    if spec.mu <= gr.MAX_DENSE_MU:
        a, b = gr.grover_operators(spec)
        err = 0.0
        v = spec.uniform_state()
        for n in range(7):
            err = max(err, abs(abs(v[spec.target_index]) ** 2 - gr.machine_time_overlap(spec, n)))
            v = b @ (a @ v)
        checks.append(Check("machine_time_identity", err <= 1e-12, err, 1e-12))
        refl = max(float(np.abs(m @ m - np.eye(spec.dim)).max()) for m in (a, b))
        checks.append(Check("reflections_square_to_identity", refl <= 1e-12, refl, 1e-12))
    if spec.mu <= 3:
        times = time_grid(3.0 * spec.s, 0.1)
        line, res = gr.simulate(spec, times)
        sim = res.probability(line.basis.mask(register_index=spec.target_index))
        err = float(np.abs(sim - gr.damped_overlap(spec, times)).max())
        checks.append(_norm_check(res))
        checks.append(Check("damping_identity", err <= ORACLE_TOL, err, ORACLE_TOL))
    trace = gr.damped_overlap(spec, time_grid(10.0 * spec.s, cfg.dt))
    checks.append(Check("overlap_below_undamped_peak",
                        float(trace.max()) <= gr.peak_overlap(spec) + PROB_TOL,
                        float(trace.max()), gr.peak_overlap(spec)))
    return checks


def verify_bounds(cfg: ExperimentConfig) -> list[Check]:
    checks = []
    for s in sorted(set(cfg.s_list)):
        checks += [replace(c, name=f"{c.name}[s={s}]") for c in
                   verify_cursor(replace(cfg, experiment="cursor", s=s, delta=0))]
    return checks


VERIFIERS = {
    "cursor": verify_cursor,
    "telomere": verify_telomere,
    "pipulse": verify_pipulse,
    "double_trap": verify_double_trap,
    "grover": verify_grover,
    "bounds": verify_bounds,
}


def verify(cfg: ExperimentConfig) -> list[Check]:
    cfg = cfg.resolved()
    return VERIFIERS[cfg.experiment](cfg)
