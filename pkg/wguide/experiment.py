"""
Experiment orchestration for the waveguide threshold tools.

This module turns a `Settings` object (plus command-line overrides) into an
`ExperimentConfig`, runs single predictions, solves and oracle runs, h-sweeps
and the per-regime verification suites, and writes the results.

Features:
- **Sweeps** over h: moments, conditions, prediction, threshold solve and an
  optional oracle run per row; per-row failures are recorded in `status`.
- **Verification** suites per regime tag (see `catalog.FIXTURES`), one
  pass/fail `Check` per acceptance property with the measured value.
- **Outputs**: CSV (`# schema=1`, fixed columns, `%.17g`), JSON lines (sorted
  keys, complex numbers split in re/im), HTML via Jinja2, oracle profile CSV.

Classes:
- `ExperimentConfig`: validated experiment inputs.
- `SweepRow`: one row of a sweep.
- `SweepReport`: writes a finished sweep in the requested formats.
- `Check`: one verification result.

Dependencies:
- numpy, pandas, jinja2
"""

# pylint: disable=R0902,R0913,R0914

import json
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from jinja2 import Environment, FileSystemLoader

from .asymptotics import (
    CRITICAL_ALPHA_NEG,
    STRIP_CRITICAL,
    check_conditions,
    predict_critical,
    predict_de,
    predict_main,
    predict_strip_critical,
    strip_bvp,
)
from .catalog import build_potential, fixture
from .cross_section import CrossSection
from .errors import ConfigError, NotApplicableError, WaveguideError
from .oracle_galerkin import TruncatedProblem, lowest_eigenvalue, refine
from .potential import beta, compute_moments, epsilon, expansion_remainder, lemma_probe
from .threshold_solver import EXISTS, ABSENT, DiscretizationConfig, ThresholdProblem

SCHEMA_VERSION = 1
FLOAT_FORMAT = "%.17g"
FORMATS = ("csv", "json", "html")

COLUMNS = [
    "h", "eps", "beta", "regime",
    "k_asym_re", "k_asym_im", "k_bs_re", "k_bs_im",
    "e_asym_re", "e_asym_im", "e_bs_re", "e_bs_im",
    "e_oracle_re", "e_oracle_im",
    "verdict_asym", "verdict_bs", "verdict_oracle",
    "residual", "ratio_re", "ratio_im", "status",
]

SOLVER_TYPES = {
    "mode": str,
    "series_order": int,
    "j_max": int,
    "nodes_per_panel": int,
    "fine_nodes": int,
    "longitudinal_rule": str,
    "tol_k": float,
    "max_iter": int,
}


def _pair(value):
    if value is None:
        return None, None
    value = complex(value)
    return value.real, value.imag


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(record):
    """One JSON line with sorted keys."""
    return json.dumps(record, sort_keys=True, default=_json_default)


def parse_cross_section(section):
    """CrossSection from the `cross_section` config section."""
    n = section.get("n", 2)
    if n == 2:
        key, build, shape = "interval", CrossSection.interval, "[lo, hi]"
    elif n == 3:
        key, build, shape = "rectangle", CrossSection.rectangle, "[[a1, b1], [a2, b2]]"
    else:
        raise ConfigError(f"cross_section.n must be 2 or 3, got {n}")
    bounds = section.get(key)
    if bounds is None or len(bounds) != 2:
        raise ConfigError(f"cross_section.{key} must be {shape} for n = {n}")
    try:
        return build(*bounds)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid cross_section.{key} {bounds}: {e}") from e


def solver_config(section):
    """DiscretizationConfig from the `solver` config section."""
    try:
        return DiscretizationConfig(
            **{k: None if v is None else SOLVER_TYPES[k](v) for k, v in section.items()}
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid solver section: {e}") from e


def parse_h_values(section):
    if "h" in section and "h_range" in section:
        raise ConfigError("give either experiment.h or experiment.h_range, not both")
    if "h_range" in section:
        spec = section["h_range"]
        unknown = set(spec) - {"start", "stop", "num"}
        if unknown:
            raise ConfigError(f"unknown keys in experiment.h_range: {sorted(unknown)}")
        try:
            values = np.geomspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
        except KeyError as e:
            raise ConfigError(f"experiment.h_range needs {e}") from e
        return tuple(float(h) for h in values)
    values = section.get("h", ())
    if isinstance(values, (int, float)):
        values = [values]
    return tuple(float(h) for h in values)


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Validated inputs of an experiment.

    Invariants: every h in (0, 1), alpha < 1, at least one h.
    """

    cross_section: CrossSection
    potential_name: str
    potential_params: dict
    alpha: float
    h_values: tuple
    solver: DiscretizationConfig = field(default_factory=DiscretizationConfig)
    regime: Optional[str] = None
    quadrature_order: int = 32
    oracle_enabled: bool = False
    oracle: dict = field(default_factory=dict)
    output_folder: str = "./outputs"
    formats: tuple = ("csv", "json")
    profile_csv: bool = False

    def __post_init__(self):
        if not self.h_values:
            raise ConfigError("experiment needs at least one h")
        for h in self.h_values:
            if not 0.0 < h < 1.0:
                raise ConfigError(f"every h must lie in (0, 1), got {h}")
        if not self.alpha < 1.0:
            raise ConfigError(f"alpha must be below 1, got {self.alpha}")
        unknown = set(self.formats) - set(FORMATS)
        if unknown:
            raise ConfigError(f"unknown output formats: {sorted(unknown)}")
        build_potential(self.potential_name, self.cross_section.n, self.potential_params)

    @property
    def potential(self):
        return build_potential(self.potential_name, self.cross_section.n, self.potential_params)

    def inputs(self, h):
        """Inputs of one run at scale h, carried into every record."""
        return {
            "h": h,
            "alpha": self.alpha,
            "cross_section": self.cross_section.describe(),
            "potential": self.potential_name,
            "potential_params": dict(self.potential_params),
            "solver": asdict(self.solver),
        }

    @classmethod
    def from_settings(cls, settings, overrides=None):
        """
        Build the config from a `Settings` object; `overrides` maps flat keys
        (alpha, h, mode, j_max, potential, params, output, emit) to values.
        """
        overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        experiment = settings.section("experiment")
        potential = settings.section("potential")
        solver = settings.section("solver")
        output = settings.section("output")

        if "h" in overrides:
            experiment.pop("h_range", None)
            experiment["h"] = overrides["h"]
        alpha = overrides.get("alpha", experiment.get("alpha", 0.0))
        for key in ("mode", "j_max"):
            if key in overrides:
                solver[key] = overrides[key]
        params = dict(potential.get("params") or {})
        params.update(overrides.get("params", {}))
        name = overrides.get("potential", potential.get("name", "box"))
        if "potential" in overrides and "params" not in overrides:
            params = {}
        formats = tuple(output.get("formats", ("csv", "json")))
        if "emit" in overrides:
            formats = {"json": ("json",), "csv": ("csv",), "both": ("csv", "json")}[
                overrides["emit"]
            ]
        oracle = settings.section("oracle")
        solver_cfg = solver_config(solver)
        return cls(
            cross_section=parse_cross_section(settings.section("cross_section")),
            potential_name=name,
            potential_params=params,
            alpha=float(alpha),
            h_values=parse_h_values(experiment),
            solver=solver_cfg,
            regime=experiment.get("regime"),
            quadrature_order=int(settings.get("quadrature.nodes_per_panel", 32)),
            oracle_enabled=bool(oracle.pop("enabled", False)),
            oracle=oracle,
            output_folder=overrides.get("output", output.get("folder", "./outputs")),
            formats=formats,
            profile_csv=bool(output.get("profile_csv", False)),
        )


def mode_table(cs, count):
    """Rows (j, tensor index, mu_j, phi_j(0), grad phi_j(0), K_j(0))."""
    rows = []
    for mode in cs.modes(count):
        rate = cs.kj(mode.index, 0.0) if mode.index else 0.0
        rows.append(
            {
                "j": mode.index,
                "tensor_index": list(mode.tensor_index),
                "mu": mode.mu,
                "phi_origin": float(mode.value(np.zeros((1, cs.n - 1)))[0]),
                "gradient_origin": [float(g) for g in mode.gradient_at_origin()],
                "k_rate_at_zero": complex(rate).real,
            }
        )
    return rows


def predict(config, h, moments=None):
    """
    The prediction of the regime that decides the configured potential.

    Strip-critical and alpha < 0 critical cases use their own laws when their
    gates hold; every other case uses the two-term main prediction.
    """
    cs, potential, alpha = config.cross_section, config.potential, config.alpha
    moments = moments or compute_moments(potential, cs, config.quadrature_order)
    report = check_conditions(moments)
    if report.regime == STRIP_CRITICAL and 0 <= alpha < 0.5:
        return predict_strip_critical(h, alpha, potential, cs, moments)
    if report.regime == CRITICAL_ALPHA_NEG and alpha < 0:
        try:
            return predict_critical(h, alpha, cs, moments)
        except NotApplicableError:
            pass
    return predict_main(h, alpha, cs, moments)


def _optional_float(value):
    return None if value is None else float(value)


def oracle_problem(config, h, prediction=None, modes=None):
    options = config.oracle
    return TruncatedProblem.sized(
        config.cross_section,
        config.potential,
        h,
        config.alpha,
        k_estimate=None if prediction is None else prediction.k,
        modes=modes or int(options.get("modes", 8)),
        half_length=_optional_float(options.get("half_length")),
        spacing=_optional_float(options.get("spacing")),
    )


def run_oracle(config, h, prediction=None, refined=False):
    """Oracle eigenvalue for one h (optionally refined)."""
    options = config.oracle
    problem = oracle_problem(config, h, prediction)
    kwargs = {
        "margin_floor": float(options.get("margin_floor", 0.0)),
        "max_iter": int(options.get("max_iter", 500)),
    }
    base = lowest_eigenvalue(problem, prediction=prediction, **kwargs)
    if refined:
        return refine(problem, base=base, **kwargs)
    return base


@dataclass
class SweepRow:
    """One h of a sweep; complex values kept whole, split at CSV time."""

    h: float
    eps: Optional[float] = None
    beta: Optional[float] = None
    regime: Optional[str] = None
    k_asym: Optional[complex] = None
    k_bs: Optional[complex] = None
    e_asym: Optional[complex] = None
    e_bs: Optional[complex] = None
    e_oracle: Optional[complex] = None
    verdict_asym: Optional[str] = None
    verdict_bs: Optional[str] = None
    verdict_oracle: Optional[str] = None
    residual: Optional[float] = None
    status: str = "ok"
    record: dict = field(default_factory=dict, repr=False)
    oracle_profile: list = field(default_factory=list, repr=False)

    @property
    def ratio(self):
        if self.k_asym is None or self.k_bs is None or self.k_asym == 0:
            return None
        return self.k_bs / self.k_asym

    def to_csv_row(self):
        row = {
            "h": self.h,
            "eps": self.eps,
            "beta": self.beta,
            "regime": self.regime,
            "verdict_asym": self.verdict_asym,
            "verdict_bs": self.verdict_bs,
            "verdict_oracle": self.verdict_oracle,
            "residual": self.residual,
            "status": self.status,
        }
        for name in ("k_asym", "k_bs", "e_asym", "e_bs", "e_oracle", "ratio"):
            row[f"{name}_re"], row[f"{name}_im"] = _pair(getattr(self, name))
        return row


def evaluate_row(config, h):
    """Moments, prediction, threshold solve and optional oracle for one h."""
    cs, potential, alpha = config.cross_section, config.potential, config.alpha
    row = SweepRow(h=h, record=config.inputs(h))
    try:
        row.eps = epsilon(cs.n, h, alpha)
        row.beta = beta(cs.n, h)
        moments = compute_moments(potential, cs, config.quadrature_order)
        conditions = check_conditions(moments)
        prediction = predict(config, h, moments)
        row.regime = prediction.regime
        row.k_asym, row.e_asym, row.verdict_asym = prediction.k, prediction.e, prediction.verdict
        solution = ThresholdProblem(cs, potential, h, alpha, config.solver).solve()
        row.k_bs, row.e_bs, row.verdict_bs = solution.k, solution.e, solution.verdict
        row.residual = solution.residual
        row.record.update({
            "moments": moments.to_record(),
            "conditions": conditions.to_record(),
            "prediction": prediction.to_record(),
            "solution": solution.to_record(),
        })
        if config.oracle_enabled:
            result = run_oracle(config, h, prediction)
            row.e_oracle = result.e
            row.verdict_oracle = EXISTS if result.e is not None else ABSENT
            row.record["oracle"] = result.to_record(options=dict(config.oracle))
            row.oracle_profile = result.profile_rows()
    except WaveguideError as e:
        row.status = f"{type(e).__name__}: {e}"
    row.record["status"] = row.status
    return row


def run_sweep(config):
    """One `SweepRow` per h, in the configured h order."""
    return [evaluate_row(config, h) for h in config.h_values]


class SweepReport:
    """
    Writes a finished sweep.

    `generate(output_format)` mirrors the report classes of the package: each
    call writes one format and returns a one-line message.
    """

    def __init__(self, config, rows, template_folder="templates", prefix="sweep"):
        self.config = config
        self.rows = rows
        self.template_folder = template_folder
        self.prefix = prefix
        self._path = config.output_folder

    def export_path(self, path):
        """Set the internal path prefix for the file exports."""
        self._path = path

    def _target(self, extension, suffix=""):
        os.makedirs(self._path, exist_ok=True)
        return os.path.join(self._path, f"{self.prefix}{suffix}.{extension}")

    def frame(self):
        return pd.DataFrame([row.to_csv_row() for row in self.rows], columns=COLUMNS)

    def generate(self, output_format):
        """Generate the output to a specified format."""
        if output_format == "csv":
            write_csv(self.frame(), self._target("csv"))
            if self.config.profile_csv:
                for row in self.rows:
                    if row.oracle_profile:
                        write_csv(
                            pd.DataFrame(row.oracle_profile, columns=["x_n", "c0_re", "c0_im"]),
                            self._target("csv", f"_profile_h{row.h:.6g}"),
                        )
            return "CSV file generated."

        if output_format == "json":
            write_jsonl([row.record for row in self.rows], self._target("jsonl"))
            return "JSON file generated."

        if output_format == "html":
            env = Environment(loader=FileSystemLoader(self.template_folder))
            template = env.get_template("sweep.html")
            html_content = template.render(
                cross_section=self.config.cross_section.describe(),
                potential=self.config.potential_name,
                alpha=self.config.alpha,
                columns=COLUMNS,
                rows=[row.to_csv_row() for row in self.rows],
            )
            with open(self._target("html"), "w", encoding="utf-8") as f:
                f.write(html_content)
            return "HTML file generated."

        return "Unsupported format!"


def write_csv(frame, path):
    """CSV with a `# schema=1` first line and 17-digit floats."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# schema={SCHEMA_VERSION}\n")
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_jsonl(records, path):
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(dumps(record) + "\n")


@dataclass(frozen=True)
class Check:
    """One verification property: pass/fail with the measured value."""

    name: str
    passed: bool
    measured: str
    bound: str

    def to_record(self):
        return {"name": self.name, "passed": self.passed,
                "measured": self.measured, "bound": self.bound}


def _monotone_decreasing(values):
    return all(b < a for a, b in zip(values[:-1], values[1:]))


def _solve(cs, potential, h, alpha, cfg=None):
    return ThresholdProblem(cs, potential, h, alpha, cfg).solve()


def _verify_main(fx, cfg):
    cs, potential, alpha = fx.cross_section, fx.build(), fx.alpha
    moments = compute_moments(potential, cs)
    leading = -0.5 * moments.phi0_origin**2 * moments.m0
    checks = []

    errors, identity_ok, solutions = [], True, {}
    for h in fx.h_values:
        solution = _solve(cs, potential, h, alpha, cfg)
        solutions[h] = solution
        ratio = solution.k / (leading * h ** (cs.n - alpha))
        errors.append(abs(ratio - 1.0))
        if solution.verdict == EXISTS:
            identity_ok &= solution.e == cs.mu0 - solution.k * solution.k
    bounds = [3.0 * (h + beta(cs.n, h)) for h in fx.h_values]
    checks.append(Check(
        "leading_order_law",
        all(e <= b for e, b in zip(errors, bounds)) and _monotone_decreasing(errors),
        ", ".join(f"|r-1|={e:.3e}" for e in errors),
        "|r-1| <= 3 (h + beta_2(h)), decreasing",
    ))
    checks.append(Check("eigenvalue_identity", bool(identity_ok),
                        "e == mu0 - k^2" if identity_ok else "mismatch", "exact"))

    series_cfg = (cfg or DiscretizationConfig()).replace(mode="series", series_order=4)
    problem = ThresholdProblem(cs, potential, 0.1, alpha, series_cfg)
    series = problem.f_eps(0.003, mode="series")
    direct = problem.f_eps(0.003, mode="direct")
    relative = abs(series.value - direct.value) / abs(direct.value)
    checks.append(Check("series_direct_agreement", relative <= 1e-6,
                        f"{relative:.3e}", "<= 1e-6"))
    ratios = []
    for h in fx.h_values[:3]:
        terms = ThresholdProblem(cs, potential, h, alpha, series_cfg).f_eps(
            solutions[h].k, mode="series").terms
        ratios.append(terms[1] / terms[0])
    checks.append(Check("series_term_decay", _monotone_decreasing(ratios),
                        ", ".join(f"{r:.3e}" for r in ratios), "a_1/a_0 shrinks with h"))

    hs = [0.2, 0.1, 0.05, 0.025]
    remainders = [expansion_remainder(potential, h, cs, moments=moments) for h in hs]
    slope = float(np.polyfit(np.log(hs), np.log(remainders), 1)[0])
    checks.append(Check("moment_expansion_order", cs.n + 1.5 <= slope <= cs.n + 2.5,
                        f"{slope:.3f}", f"[{cs.n + 1.5}, {cs.n + 2.5}]"))

    checks.append(_resolvent_closed_form_check(cs, cfg))
    return checks


def _resolvent_closed_form_check(cs, cfg, h=0.1, k=0.05, modes=5):
    potential = build_potential("strip_box", 2, {"amplitude": 1.0})
    problem = ThresholdProblem(cs, potential, h, 0.0, cfg)
    grid = problem.grid
    g = potential(grid.reference_points) * problem.operator.phi0
    components = problem.operator.components(g, k)
    field_ = g.reshape(grid.shape)
    x2 = grid.longitudinal_nodes
    worst = 0.0
    for j in range(min(modes, problem.j_max) + 1):
        phi_j = problem.operator.phi[j]
        pairing = np.einsum("p,p,pq->q", phi_j, grid.transverse_weights, field_)[0]
        if j == 0:
            shape = (1.0 / k) * ((1.0 - np.exp(-k * h) * np.cosh(k * x2)) / k - h)
        else:
            rate = cs.kj(j, k)
            shape = (1.0 - np.exp(-rate * h) * np.cosh(rate * x2)) / rate**2
        expected = phi_j[:, None] * shape[None, :] * pairing
        worst = max(worst, float(np.max(np.abs(components[j] - expected))))
    return Check("resolvent_closed_form", worst <= 1e-10, f"{worst:.3e}", "<= 1e-10")


def _verify_de(fx, cfg):
    cs, potential = fx.cross_section, fx.build()
    gaps, errors = [], []
    for c in fx.h_values:
        prediction = predict_de(c, potential, cs)
        solution = ThresholdProblem.weak_coupling(cs, potential, c, cfg).solve()
        gap_de = cs.mu0 - prediction.e
        gaps.append(gap_de)
        errors.append(abs((solution.k * solution.k) / gap_de - 1.0))
    quadruple = all(
        abs(gaps[i] / gaps[i + 1] - (fx.h_values[i] / fx.h_values[i + 1]) ** 2) < 1e-9
        for i in range(len(gaps) - 1)
    )
    return [
        Check("h_squared_law", quadruple, ", ".join(f"{abs(g):.4e}" for g in gaps),
              "gap ratio = (h ratio)^2"),
        Check("baseline_agreement",
              all(e <= 3.0 * c for e, c in zip(errors, fx.h_values))
              and _monotone_decreasing(errors),
              ", ".join(f"{e:.3e}" for e in errors), "|gap_bs/gap_de - 1| <= 3h, decreasing"),
    ]


def _verify_critical(fx, cfg):
    cs, alpha = fx.cross_section, fx.alpha
    checks = []
    for sign in (1.0, -1.0):
        potential = fx.build(amplitude=sign * fx.params.get("amplitude", -1.0))
        moments = compute_moments(potential, cs)
        verdicts, errors = [], []
        for h in fx.h_values:
            prediction = predict_critical(h, alpha, cs, moments)
            solution = _solve(cs, potential, h, alpha, cfg)
            verdicts.append(solution.verdict == prediction.verdict)
            errors.append(abs(solution.k / prediction.k - 1.0))
        label = "negative" if sign * fx.params.get("amplitude", -1.0) < 0 else "positive"
        checks.append(Check(f"verdict_{label}_amplitude", all(verdicts),
                            ", ".join(str(v) for v in verdicts), "matches phi_0(0) <Phi_0 V> sign"))
        if prediction.verdict == EXISTS:
            checks.append(Check("ratio_improves", _monotone_decreasing(errors),
                                ", ".join(f"{e:.3e}" for e in errors), "decreasing in h"))
    return checks


def _verify_strip(fx, cfg):
    cs, alpha = fx.cross_section, fx.alpha
    h = fx.h_values[0]
    verdicts, checks = {}, []
    for sign in (1.0, -1.0):
        potential = fx.build(amplitude=sign)
        prediction = predict_strip_critical(h, alpha, potential, cs)
        solution = _solve(cs, potential, h, alpha, cfg)
        verdicts[sign] = solution.verdict
        error = abs(solution.k / prediction.k - 1.0)
        checks.append(Check(
            f"ratio_{'psi' if sign > 0 else 'minus_psi'}",
            np.sign(solution.k.real) == np.sign(prediction.k.real) and error <= 3.0 * h**0.25,
            f"k_bs={solution.k.real:.4e}, k_asym={prediction.k.real:.4e}, |r-1|={error:.3e}",
            "same sign, |r-1| <= 3 h^(1/4)",
        ))
    checks.insert(0, Check("opposite_verdicts", verdicts[1.0] != verdicts[-1.0]
                           and {verdicts[1.0], verdicts[-1.0]} == {EXISTS, ABSENT},
                           f"psi: {verdicts[1.0]}, -psi: {verdicts[-1.0]}", "exists/absent"))
    bvp = strip_bvp(fx.build(), h, cs)
    relative = abs(bvp.norm_u - bvp.modal_values) / bvp.norm_u
    checks.append(Check("modal_identity", relative <= 1e-6, f"{relative:.3e}", "<= 1e-6"))
    return checks


def _verify_cross_validation(fx, cfg):
    cs, potential, alpha = fx.cross_section, fx.build(), fx.alpha
    h = fx.h_values[0]
    solution = _solve(cs, potential, h, alpha, cfg)
    moments = compute_moments(potential, cs)
    prediction = predict_main(h, alpha, cs, moments)
    problem = TruncatedProblem.sized(cs, potential, h, alpha, k_estimate=prediction.k,
                                     modes=fx.extra["oracle_modes"])
    result = refine(problem, base=lowest_eigenvalue(problem, prediction=prediction))
    checks = []
    if result.e is None or solution.e is None:
        return [Check("oracle_agreement", False,
                      f"oracle={result.e}, solver={solution.e}", "both exist")]
    gap = (cs.mu0 - solution.e).real
    relative = abs(result.e - solution.e) / gap
    checks.append(Check("oracle_agreement", relative <= 1e-3, f"{relative:.3e}", "<= 1e-3"))
    if result.decay_rate is not None:
        decay = abs(result.decay_rate / solution.k.real - 1.0)
        checks.append(Check("decay_rate", decay <= 0.05, f"{decay:.3e}", "<= 5%"))
    checks.append(Check("domain_sizing", bool(result.sizing_ok), str(result.sizing_ok),
                        "L >= 15 / Re k"))
    return checks


def _verify_dichotomy(fx, cfg):
    cs, alpha = fx.cross_section, fx.alpha
    checks = []
    for amplitude in fx.extra["amplitudes"]:
        amplitude = complex(amplitude)
        potential = fx.build(amplitude={"re": amplitude.real, "im": amplitude.imag})
        expected = EXISTS if amplitude.real < 0 else ABSENT
        verdicts = [_solve(cs, potential, h, alpha, cfg).verdict for h in fx.h_values]
        checks.append(Check(f"amplitude_{amplitude.real:+g}{amplitude.imag:+g}j",
                            all(v == expected for v in verdicts),
                            ", ".join(verdicts), expected))
    return checks


def _verify_lemma_probe(fx, _cfg):
    checks = []
    exponents = range(2, 9)
    for cs in (fixture("main").cross_section, fx.cross_section):
        ratios = [r for _, r in lemma_probe(cs, exponents=exponents)]
        bounded = max(ratios) <= 2.0 * ratios[0]
        checks.append(Check(f"bounded_n{cs.n}", bounded,
                            ", ".join(f"{r:.4e}" for r in ratios), "max <= 2 * first"))
    return checks


VERIFIERS = {
    "main": _verify_main,
    "de_baseline": _verify_de,
    "critical_alpha_neg": _verify_critical,
    "strip_critical": _verify_strip,
    "cross_validation": _verify_cross_validation,
    "dichotomy": _verify_dichotomy,
    "lemma_probe": _verify_lemma_probe,
}


def verify(tag, cfg=None):
    """
    Run the acceptance checks of regime `tag`.

    Raises:
        ConfigError: unknown tag.
    """
    if tag not in VERIFIERS:
        raise ConfigError(f"unknown regime tag {tag!r}; choose one of {sorted(VERIFIERS)}")
    return VERIFIERS[tag](fixture(tag), cfg)


__all__ = [
    "ExperimentConfig", "SweepRow", "SweepReport", "Check", "run_sweep", "verify",
    "evaluate_row", "predict", "run_oracle", "mode_table",
]
