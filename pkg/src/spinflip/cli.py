"""Command-line front end.

Subcommands: verify, scatter, bound, converge, radial, classify. Values come
from built-in defaults, then the command's section of an optional config file
(``key = value``, one ``[command]`` section per subcommand), then flags.
Complex numbers are written ``re,im``.

Exit codes: 0 all checks pass, 1 a check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .extension_algebra import (
    FAMILIES,
    LAMBDA_TO_M,
    MixingParams,
    generator_residual,
    h_family,
    j4_residual,
    lambda_family,
    m_family,
    m_from_h,
    m_from_lambda,
    m_from_params,
)
from .radial3d import RadialExtension, hyperfine_split, radial_bound_states, radial_phase_shifts
from .regularization import (
    Profile,
    RegularizedCoupling,
    converge_study,
    kinetic_study,
    rectangle_transfer_closed_form,
    transfer_matrix_eps,
)
from .scattering1d import MatchingError, bound_states, flux_residual, scatter
from .spin_physics import (
    SIGMA_Y,
    Rejection,
    pauli_current_jump,
    rashba_bc,
    spin_filter,
    substituted_rashba_bc,
)

COMMANDS = ("verify", "scatter", "bound", "converge", "radial", "classify")
DEFAULT_SEED = 20191107

HEADERS = {
    "verify": "family,max_j4_residual,max_nilpotency,max_generator_residual,"
              "max_hm_residual,max_lambda_residual,lambda_target_family,lambda_sign",
    "scatter": "k,side,in_spin,re_r_up,im_r_up,re_r_dn,im_r_dn,"
               "re_t_up,im_t_up,re_t_dn,im_t_dn,flux_residual",
    "bound": "kappa,energy,re_left_up,im_left_up,re_left_dn,im_left_dn,"
             "re_right_up,im_right_up,re_right_dn,im_right_dn,boundary_residual",
    "converge": "epsilon,residual,fitted_order",
    "radial": "kind,k,energy,kappa,delta_plus,delta_minus,"
              "re_spinor_up,im_spinor_up,re_spinor_dn,im_spinor_dn",
    "classify": "variant,j4_residual,flux_residual_k1,max_abs_d_jy,max_abs_d_jz",
}


class ScenarioError(ValueError):
    """Malformed input; maps to exit code 2."""


def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    parts = str(text).replace(" ", "").split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) != 2:
        raise ValueError(f"expected 're,im', got {text!r}")
    return complex(float(parts[0]), float(parts[1]))


def parse_floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(" ", "").split(",") if v]


def _family(text) -> int:
    fam = int(text)
    if fam not in FAMILIES:
        raise ValueError("family out of range")
    return fam


def _choice(*options):
    def conv(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return conv


def _positive(text) -> float:
    value = float(text)
    if not value > 0:
        raise ValueError("must be positive")
    return value


def _optional(conv):
    def wrapped(text):
        if text is None or (isinstance(text, str) and text.lower() in ("", "none")):
            return None
        return conv(text)
    return wrapped


# command -> key -> (converter, default, help)
OPTIONS = {
    "verify": {
        "samples": (int, 200, "z samples per family"),
        "seed": (int, DEFAULT_SEED, "RNG seed for the z samples"),
        "radius": (_positive, 2.0, "samples drawn uniformly from |z| <= radius"),
        "tol": (_positive, 1e-12, "residual tolerance"),
    },
    "scatter": {
        "family": (_optional(_family), 3, "mixing family 1..4"),
        "z": (parse_complex, 2 + 0j, "coupling 're,im'"),
        "rashba": (_optional(_choice("x1", "x4")), None, "use a published Rashba matrix instead"),
        "value": (float, 0.0, "Rashba strength"),
        "kmin": (_positive, 0.1, "smallest wavenumber"),
        "kmax": (_positive, 10.0, "largest wavenumber"),
        "steps": (int, 50, "number of wavenumbers"),
        "side": (_choice("left", "right", "both"), "both", "incidence side"),
        "tol": (_positive, 1e-10, "flux tolerance"),
    },
    "bound": {
        "family": (_optional(_family), 3, "mixing family 1..4"),
        "z": (parse_complex, 2 + 0j, "coupling 're,im'"),
        "rashba": (_optional(_choice("x1", "x4")), None, "use a published Rashba matrix instead"),
        "value": (float, 0.0, "Rashba strength"),
        "kappa_max": (_positive, 10.0, "upper end of the kappa scan"),
        "tol": (_positive, 1e-8, "boundary residual tolerance"),
    },
    "converge": {
        "shape": (_choice("rectangle", "bump"), "rectangle", "profile shape"),
        "strength": (float, 1.0, "potential coupling: a_pot = strength * sigma_y"),
        "x4": (float, 0.0, "kinetic coupling (exploratory when nonzero)"),
        "k": (_positive, 1.0, "wavenumber"),
        "eps": (parse_floats, [0.4, 0.2, 0.1, 0.05], "comma-separated decreasing widths"),
        "min_order": (float, 0.9, "required fitted convergence order"),
        "max_amplitude": (_positive, 0.5, "cap on |x4| * max V in the kinetic study"),
    },
    "radial": {
        "omega": (float, -2.0, "scalar strength"),
        "w": (parse_floats, [0.0, 0.0, 1.0], "spin strengths 'wx,wy,wz'"),
        "k": (parse_floats, [1.0], "wavenumbers for phase shifts"),
        "tol": (_positive, 1e-12, "consistency tolerance"),
    },
    "classify": {
        "z1": (parse_complex, 0.5j, "coupling z1 're,im'"),
        "z2": (parse_complex, 0j, "coupling z2"),
        "z3": (parse_complex, 0j, "coupling z3"),
        "z4": (parse_complex, 1 + 0j, "coupling z4"),
        "x1": (float, 0.7, "strength for the published x1-type matrix"),
        "x4": (float, 0.5, "strength for the published x4-type matrix"),
        "tol": (_positive, 1e-12, "filter and unitarity tolerance"),
    },
}


@dataclass
class Scenario:
    command: str
    params: dict
    output_path: str = "-"
    fmt: str = "csv"
    tolerances: dict = field(default_factory=dict)


@dataclass
class Report:
    command: str
    inputs: dict
    columns: list[str]
    rows: list[list]
    summary: dict
    passed: bool
    version: str = __version__

    def to_dict(self) -> dict:
        out = {"command": self.command, "version": self.version,
               "input": _jsonable(self.inputs)}
        out.update(_jsonable(self.summary))
        out["columns"] = list(self.columns)
        out["rows"] = _jsonable(self.rows)
        out["pass"] = bool(self.passed)
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [_jsonable(float(obj.real)), _jsonable(float(obj.imag))]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinflip", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        p.add_argument("--config", help="config file with a [%s] section" % cmd)
        p.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        for key, (_, default, help_text) in OPTIONS[cmd].items():
            # raw strings here; conversion happens after merging with the config file
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None,
                           help=f"{help_text} (default: {default})")
    return parser


def _convert(cmd: str, key: str, raw):
    conv = OPTIONS[cmd][key][0]
    try:
        value = conv(raw)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{key}: {exc}") from None
    for v in value if isinstance(value, list) else [value]:
        if isinstance(v, (int, float, complex)) and not np.isfinite(v):
            raise ScenarioError(f"{key}: value must be finite")
    return value


def parse_scenario(argv, config_text: str | None = None) -> Scenario:
    """Build a Scenario from argv (list of strings) and optional config text.

    Raises ScenarioError naming the offending key on malformed input.
    """
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            raise
        raise ScenarioError("invalid command line") from exc
    cmd = ns.command
    if config_text is None and ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                config_text = fh.read()
        except OSError as exc:
            raise ScenarioError(f"config: cannot read {ns.config}: {exc}") from None

    merged = {key: opt[1] for key, opt in OPTIONS[cmd].items()}
    if config_text:
        cfg = configparser.ConfigParser(interpolation=None)
        try:
            cfg.read_string(config_text)
        except configparser.Error as exc:
            raise ScenarioError(f"config: {exc}") from None
        if cfg.has_section(cmd):
            for key, raw in cfg.items(cmd):
                norm = key.replace("-", "_")
                if norm not in OPTIONS[cmd]:
                    raise ScenarioError(f"{key}: unknown key for '{cmd}'")
                merged[norm] = _convert(cmd, norm, raw.strip().strip('"').strip("'"))
    for key in OPTIONS[cmd]:
        raw = getattr(ns, key)
        if raw is not None:
            merged[key] = _convert(cmd, key, raw)
    _validate(cmd, merged)
    tolerances = {k: v for k, v in merged.items() if k == "tol"}
    return Scenario(cmd, merged, ns.output, ns.format, tolerances)


def _validate(cmd: str, params: dict) -> None:
    if cmd in ("scatter", "bound") and params["family"] is None and params["rashba"] is None:
        raise ScenarioError("family: give --family or --rashba")
    if cmd == "scatter":
        if params["steps"] < 1:
            raise ScenarioError("steps: must be at least 1")
        if params["kmax"] < params["kmin"]:
            raise ScenarioError("kmax: must not be smaller than kmin")
    if cmd == "verify" and params["samples"] < 1:
        raise ScenarioError("samples: must be at least 1")
    if cmd == "converge":
        eps = params["eps"]
        if len(eps) < 3 or any(b >= a for a, b in zip(eps, eps[1:])) or eps[-1] <= 0:
            raise ScenarioError("eps: need at least 3 strictly decreasing positive values")
    if cmd == "radial":
        if len(params["w"]) != 3:
            raise ScenarioError("w: need three components")
        if any(k <= 0 for k in params["k"]):
            raise ScenarioError("k: wavenumbers must be positive")


def _boundary_matrix(params: dict) -> np.ndarray:
    if params.get("rashba"):
        return rashba_bc(params["rashba"], params["value"])
    return m_family(params["family"], params["z"])


def _sample_disc(rng, n: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(n))
    phi = 2.0 * np.pi * rng.random(n)
    return r * np.exp(1j * phi)


def _run_verify(p: dict) -> Report:
    rng = np.random.default_rng(p["seed"])
    rows = []
    worst = dict(j4=0.0, nil=0.0, gen=0.0, hm=0.0, lam=0.0)
    for fam in FAMILIES:
        zs = _sample_disc(rng, p["samples"], p["radius"])
        target, sign = LAMBDA_TO_M[fam]
        acc = dict(j4=0.0, nil=0.0, gen=0.0, hm=0.0, lam=0.0)
        for z in zs:
            m = m_family(fam, z)
            n = m - np.eye(4)
            acc["j4"] = max(acc["j4"], j4_residual(m))
            acc["nil"] = max(acc["nil"], float(np.max(np.abs(n @ n))))
            acc["gen"] = max(acc["gen"], generator_residual(n))
            acc["hm"] = max(acc["hm"], float(np.max(np.abs(m_from_h(h_family(fam, z)) - m))))
            lam_m = m_from_lambda(lambda_family(fam, z))
            acc["lam"] = max(acc["lam"], float(np.max(np.abs(lam_m - m_family(target, sign * z)))))
        rows.append([fam, acc["j4"], acc["nil"], acc["gen"], acc["hm"], acc["lam"], target, sign])
        for key in worst:
            worst[key] = max(worst[key], acc[key])
    passed = all(v <= p["tol"] for v in worst.values())
    summary = {
        "samples": p["samples"],
        "seed": p["seed"],
        "max_j4_residual": worst["j4"],
        "max_nilpotency": worst["nil"],
        "max_generator_residual": worst["gen"],
        "max_hm_residual": worst["hm"],
        "max_lambda_residual": worst["lam"],
        "family_permutation": {str(f): {"family": t, "sign": s}
                               for f, (t, s) in LAMBDA_TO_M.items()},
    }
    return Report("verify", p, HEADERS["verify"].split(","), rows, summary, passed)


def _run_scatter(p: dict) -> Report:
    m = _boundary_matrix(p)
    unitary = j4_residual(m) <= p["tol"]
    sides = ("left", "right") if p["side"] == "both" else (p["side"],)
    rows, worst, failure = [], 0.0, None
    for k in np.linspace(p["kmin"], p["kmax"], p["steps"]):
        for side in sides:
            try:
                amps = scatter(m, float(k), side)
            except MatchingError as exc:
                failure = f"k={k!r} side={side}: {exc}"
                continue
            flux = amps.flux()
            for s, spin in enumerate(("up", "dn")):
                r, t = amps.r[:, s], amps.t[:, s]
                res = abs(1.0 - flux[s])
                worst = max(worst, res)
                rows.append([float(k), side, spin,
                             r[0].real, r[0].imag, r[1].real, r[1].imag,
                             t[0].real, t[0].imag, t[1].real, t[1].imag, res])
    passed = failure is None and (not unitary or worst <= p["tol"])
    summary = {"j4_residual": j4_residual(m), "max_flux_residual": worst,
               "flux_checked": unitary, "failure": failure}
    return Report("scatter", p, HEADERS["scatter"].split(","), rows, summary, passed)


def _run_bound(p: dict) -> Report:
    m = _boundary_matrix(p)
    states = bound_states(m, p["kappa_max"])
    rows = []
    for st in states:
        lu, ld = st.left_spinor
        ru, rd = st.right_spinor
        rows.append([st.kappa, st.energy, lu.real, lu.imag, ld.real, ld.imag,
                     ru.real, ru.imag, rd.real, rd.imag, st.residual])
    passed = all(st.residual <= p["tol"] for st in states)
    summary = {"count": len(states), "energies": [st.energy for st in states]}
    return Report("bound", p, HEADERS["bound"].split(","), rows, summary, passed)


def _run_converge(p: dict) -> Report:
    eps = p["eps"]
    if p["x4"]:
        rep = kinetic_study(p["x4"], p["k"], eps, p["shape"], p["max_amplitude"])
        passed = True
        oracle = None
    else:
        base = RegularizedCoupling(Profile(p["shape"], eps[0]), p["strength"] * SIGMA_Y)
        rep = converge_study(base, p["k"], eps)
        if p["strength"] == 0:
            passed = all(r <= 1e-10 for r in rep.residuals)
        else:
            decreasing = all(b < a for a, b in zip(rep.residuals, rep.residuals[1:]))
            passed = decreasing and rep.order is not None and rep.order >= p["min_order"]
        oracle = None
        if p["shape"] == "rectangle":
            oracle = max(
                float(np.max(np.abs(
                    transfer_matrix_eps(base.with_epsilon(e), p["k"]).t
                    - rectangle_transfer_closed_form(base.with_epsilon(e), p["k"]).t)))
                for e in eps)
            passed = passed and oracle <= 1e-9
    rows = [[e, r, rep.order] for e, r in zip(rep.epsilons, rep.residuals)]
    summary = {
        "fitted_order": rep.order,
        "exploratory": bool(p["x4"]),
        "oracle_max_deviation": oracle,
        "effective_x4": rep.strengths or None,
        "matched_families": [
            {"family": mt.family, "z": mt.z, "residual": mt.residual} for mt in rep.matches
        ],
    }
    return Report("converge", p, HEADERS["converge"].split(","), rows, summary, passed)


def _run_radial(p: dict) -> Report:
    ext = RadialExtension(p["omega"], tuple(p["w"]))
    rows = []
    states = radial_bound_states(ext)
    for st in states:
        up, dn = st.channel_spinor
        rows.append(["bound", None, st.energy, st.kappa, None, None,
                     up.real, up.imag, dn.real, dn.imag])
    for k in p["k"]:
        ps = radial_phase_shifts(ext, k)
        rows.append(["phase", k, None, None, ps.delta_plus, ps.delta_minus,
                     None, None, None, None])
    passed = True
    hyper = None
    wx, wy, wz = p["w"]
    if wx == 0 and wy == 0 and p["omega"] < 0 and abs(p["omega"]) > abs(wz):
        hyper = hyperfine_split(p["omega"], wz)
        energies = sorted(st.energy for st in states)
        passed = len(energies) == 2 and all(
            abs(a - b) <= p["tol"] * max(1.0, abs(b)) for a, b in zip(energies, sorted(hyper)))
    summary = {"energies": [st.energy for st in states], "hyperfine": hyper}
    return Report("radial", p, HEADERS["radial"].split(","), rows, summary, passed)


def probe_states(m) -> list[np.ndarray]:
    """Boundary vectors on the 0- side used to probe current jumps."""
    probes = [np.eye(4, dtype=complex)[i] for i in range(4)]
    probes.append(np.array([1, 1j, 1, -1j], dtype=complex) / 2)
    try:
        amps = scatter(m, 1.0, "left")
    except MatchingError:
        return probes
    for s in range(2):
        inc = np.zeros(2, dtype=complex)
        inc[s] = 1.0
        psi = inc + amps.r[:, s]
        dpsi = 1j * (inc - amps.r[:, s])
        probes.append(np.array([psi[0], dpsi[0], psi[1], dpsi[1]]))
    return probes


def classify_variant(m) -> dict:
    jumps = [pauli_current_jump(m, g) for g in probe_states(m)]
    try:
        flux = flux_residual(m, 1.0)
    except MatchingError:
        flux = float("nan")
    return {
        "j4_residual": j4_residual(m),
        "flux_residual_k1": flux,
        "max_abs_d_jy": max(abs(j.d_jy) for j in jumps),
        "max_abs_d_jz": max(abs(j.d_jz) for j in jumps),
    }


def _run_classify(p: dict) -> Report:
    params = MixingParams(p["z1"], p["z2"], p["z3"], p["z4"])
    verdict = spin_filter(params, p["tol"])
    variants = {
        "params": m_from_params(params),
        "mr_matrix1": rashba_bc("x1", p["x1"]),
        "mr_matrix4": rashba_bc("x4", p["x4"]),
        "substituted_x1": substituted_rashba_bc("x1", p["x1"]),
        "substituted_x4": substituted_rashba_bc("x4", p["x4"]),
    }
    rows, diag = [], {}
    for name, m in variants.items():
        d = classify_variant(m)
        diag[name] = d
        rows.append([name, d["j4_residual"], d["flux_residual_k1"],
                     d["max_abs_d_jy"], d["max_abs_d_jz"]])
    accepted = not isinstance(verdict, Rejection)
    summary = {
        "params": {"z1": params.z1, "z2": params.z2, "z3": params.z3, "z4": params.z4},
        "accepted": accepted,
        "violated": None if accepted else verdict.violated,
        "rashba": {"x1": verdict.x1, "x4": verdict.x4} if accepted else None,
        "diagnostics": diag,
    }
    passed = diag["params"]["j4_residual"] <= max(p["tol"], 1e-12)
    return Report("classify", p, HEADERS["classify"].split(","), rows, summary, passed)


RUNNERS = {
    "verify": _run_verify,
    "scatter": _run_scatter,
    "bound": _run_bound,
    "converge": _run_converge,
    "radial": _run_radial,
    "classify": _run_classify,
}


def run_scenario(s: Scenario) -> Report:
    return RUNNERS[s.command](s.params)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def emit(report: Report, fmt: str = "csv") -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2) + "\n").encode("utf-8")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        scenario = parse_scenario(argv)
    except ScenarioError as exc:
        if exc.__cause__ is None:
            print(f"spinflip: error: {exc}", file=sys.stderr)
        return 2
    report = run_scenario(scenario)
    if report.summary.get("failure"):
        print(f"spinflip: check failed: {report.summary['failure']}", file=sys.stderr)
    payload = emit(report, scenario.fmt)
    if scenario.output_path == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    else:
        try:
            with open(scenario.output_path, "wb") as fh:
                fh.write(payload)
        except OSError as exc:
            print(f"spinflip: error: output: {exc}", file=sys.stderr)
            return 2
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
