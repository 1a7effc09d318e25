"""Command-line frontend: parameter maps, coefficients, trajectories, profiles.

Subcommands
-----------
map        dimension-change maps with the full identity report (JSON)
coeffs     unified coefficients of one parameter set (JSON)
integrate  unified-plane trajectory as CSV (columns r1,psi,phi)
profile    reconstructed radial profile as CSV (columns eta,f,fprime)
explicit   closed-form profile samples as CSV plus a JSON residual footer
verify     the whole invariant suite on the default grid (JSON summary)

Exit codes: 0 success, 1 usage or parameter error, 2 verification failure.
CSV is UTF-8 with LF endings and 17 significant digits, so reparsing
reproduces the in-memory doubles bit for bit.  ``SSFLOW_TOL`` overrides the
identity tolerance used by ``verify`` and ``map``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import solutions
from .equivalence import Branch, ple_to_pme, pme_to_ple, verify_equivalence
from .errors import SsflowError
from .integrator import IntegrationSettings, integrate
from .params import (
    PLEParams,
    PMEParams,
    SimilarityType,
    alpha_from,
    unified_coefficients,
)
from .phase_plane import (
    ProfileSample,
    reconstruct_profile,
    straight_line,
    unified_system,
    unified_to_ple,
    unified_to_pme,
)
from .verify import run_default_verification

_SIM_TYPES = {1: SimilarityType.TYPE_I, 2: SimilarityType.TYPE_II, 3: SimilarityType.TYPE_III}

# Named trajectories with frozen parameters, used for golden-file regression.
PRESETS = {
    "barenblatt-line": {
        "eq": "pme",
        "m": 2.0,
        "n": 1.0,
        "beta": 1.0 / 3.0,
        "sim_type": 1,
        "start": "line",
        "psi0": 0.01,
        "span": (0.0, 5.0),
    },
    "yamabe-vertex": {
        "eq": "pme",
        "m": 1.0 / 3.0,
        "n": 4.0,
        "beta": 0.0,
        "sim_type": 2,
        "psi0": 2.0,
        "phi0": 0.0,
        "span": (0.0, 6.0),
    },
}


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit code 1 with JSON."""

    def error(self, message):
        _emit_error("usage", message, stream=sys.stderr)
        raise SystemExit(1)


def _emit_error(kind: str, message: str, stream=None) -> None:
    payload = {"status": "error", "error": {"type": kind, "message": message}}
    json.dump(payload, stream or sys.stdout, indent=2)
    (stream or sys.stdout).write("\n")


def _json_out(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_out(header: tuple[str, ...], rows, out: str | None) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(f"{v:.17g}" for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default_tol() -> float:
    raw = os.environ.get("SSFLOW_TOL", "")
    if raw:
        try:
            return float(raw)
        except ValueError:
            raise SsflowError(f"SSFLOW_TOL is not a number: {raw!r}")
    return 1e-10


def _params_from_args(args) -> PMEParams | PLEParams:
    st = _SIM_TYPES[args.sim_type]
    if args.eq == "pme":
        if args.m is None:
            raise SsflowError("--m is required for --eq pme")
        return PMEParams(args.m, args.n, args.beta, st)
    if args.p is None:
        raise SsflowError("--p is required for --eq ple")
    return PLEParams(args.p, args.n, args.beta, st)


def _params_dict(params) -> dict:
    d = {"n": params.n, "beta": params.beta, "sim_type": params.sim_type.value,
         "alpha": alpha_from(params)}
    if isinstance(params, PMEParams):
        d["eq"] = "pme"
        d["m"] = params.m
    else:
        d["eq"] = "ple"
        d["p"] = params.p
    return d


def _report_checks(rep) -> list[dict]:
    return [
        {"name": "coeff_match", "pass": rep.c_match, "max_dev": rep.c_max_rel_dev, "tol": rep.tol},
        {"name": "beta_identity", "pass": rep.beta_identity, "max_dev": None, "tol": rep.tol},
        {"name": "b_ratio", "pass": rep.b_ratio, "max_dev": None, "tol": rep.tol},
        {"name": "sign_match", "pass": rep.sign_match, "max_dev": None, "tol": rep.tol},
    ]


def cmd_map(args) -> int:
    params = _params_from_args(args)
    tol = _default_tol()
    branches = {"1": [Branch.BRANCH1], "2": [Branch.BRANCH2],
                "both": [Branch.BRANCH1, Branch.BRANCH2]}[args.branch]
    targets = []
    checks = []
    errors = []
    for branch in branches:
        if isinstance(params, PMEParams):
            try:
                image = pme_to_ple(params, branch)
            except SsflowError as exc:
                errors.append({"branch": branch.value, "type": type(exc).__name__, "message": str(exc)})
                continue
            rep = verify_equivalence(params, image, tol)
        else:
            try:
                image = ple_to_pme(params, branch)
            except SsflowError as exc:
                errors.append({"branch": branch.value, "type": type(exc).__name__, "message": str(exc)})
                continue
            rep = verify_equivalence(image, params, tol)
        entry = _params_dict(image)
        entry["branch"] = branch.value
        entry["orientation_flipped"] = rep.flipped
        targets.append(entry)
        for c in _report_checks(rep):
            c["name"] = f"branch{branch.value}_{c['name']}"
            checks.append(c)
    if not targets:
        _emit_error(errors[0]["type"] if errors else "map", json.dumps(errors))
        return 1
    all_pass = all(c["pass"] for c in checks)
    payload = {
        "status": "ok" if all_pass else "fail",
        "params": _params_dict(params),
        "targets": targets,
        "checks": checks,
    }
    if errors:
        payload["branch_errors"] = errors
    _json_out(payload, args.out)
    return 0 if all_pass else 2


def cmd_coeffs(args) -> int:
    params = _params_from_args(args)
    c = unified_coefficients(params, critical_tol=args.critical_tol)
    payload = {
        "status": "ok",
        "params": _params_dict(params),
        "checks": [],
        "coefficients": {
            "c1": c.c1,
            "c2": c.c2,
            "c3": c.c3,
            "sqrt_abs_b": c.sqrt_abs_b,
            "b": c.b,
            "const_term": c.const_term,
            "psi_coeff": c.psi_coeff,
            "critical": c.critical,
        },
    }
    _json_out(payload, args.out)
    return 0


def _resolve_initial_state(args, params):
    coeffs = unified_coefficients(params)
    if getattr(args, "preset", None):
        preset = PRESETS[args.preset]
        if preset.get("start") == "line":
            a1, a2 = straight_line(coeffs)
            psi0 = preset["psi0"]
            return (psi0, a1 * psi0 + a2), preset["span"], coeffs
        return (preset["psi0"], preset["phi0"]), preset["span"], coeffs
    if args.psi0 is None or args.phi0 is None:
        raise SsflowError("--psi0 and --phi0 are required without --preset")
    return (args.psi0, args.phi0), tuple(args.span), coeffs


def _apply_preset_params(args):
    if getattr(args, "preset", None):
        preset = PRESETS[args.preset]
        args.eq = preset["eq"]
        args.m = preset["m"]
        args.n = preset["n"]
        args.beta = preset["beta"]
        args.sim_type = preset["sim_type"]


def cmd_integrate(args) -> int:
    _apply_preset_params(args)
    params = _params_from_args(args)
    y0, span, coeffs = _resolve_initial_state(args, params)
    settings = IntegrationSettings(
        rel_tol=args.rel_tol, abs_tol=args.abs_tol, max_step=args.max_step, max_steps=args.max_steps
    )
    traj = integrate(unified_system(coeffs), y0, span, settings)
    _csv_out(("r1", "psi", "phi"), zip(traj.r1, traj.states[:, 0], traj.states[:, 1]), args.out)
    return 0


def cmd_profile(args) -> int:
    _apply_preset_params(args)
    params = _params_from_args(args)
    y0, span, coeffs = _resolve_initial_state(args, params)
    settings = IntegrationSettings(
        rel_tol=args.rel_tol, abs_tol=args.abs_tol, max_step=args.max_step, max_steps=args.max_steps
    )
    traj = integrate(unified_system(coeffs), y0, span, settings)
    if isinstance(params, PMEParams):
        native = unified_to_pme(traj.states[0], params, coeffs)
        eta0 = args.anchor_eta
        f0 = (native.y / (eta0 * eta0)) ** (1.0 / (1.0 - params.m))
        anchor = ProfileSample(eta0, f0, native.x * f0 / eta0)
    else:
        native = unified_to_ple(traj.states[0], params, coeffs)
        eta0 = args.anchor_eta
        fp0 = -((native.x / (eta0 * eta0)) ** (1.0 / (2.0 - params.p)))
        f0 = native.z * eta0 ** (-params.gamma)
        anchor = ProfileSample(eta0, f0, fp0)
    samples = reconstruct_profile(traj, params, anchor)
    _csv_out(("eta", "f", "fprime"), ((s.eta, s.f, s.fprime) for s in samples), args.out)
    return 0


_EXPLICIT_BUILDERS = {
    "barenblatt-pme": (solutions.barenblatt_pme, "m", "C"),
    "barenblatt-ple": (solutions.barenblatt_ple, "p", "C"),
    "dipole-pme": (solutions.dipole_pme, "m", "K"),
    "dipole-derivative-ple": (solutions.dipole_derivative_ple, "p", "c"),
    "loewner-nirenberg-pme": (solutions.loewner_nirenberg_pme, None, "k1"),
    "yamabe-ple": (solutions.yamabe_ple, None, "k2"),
}


def cmd_explicit(args) -> int:
    builder, exponent_flag, const_flag = _EXPLICIT_BUILDERS[args.kind]
    const = getattr(args, const_flag)
    if exponent_flag is None:
        profile = builder(args.n, const)
    else:
        exponent = getattr(args, exponent_flag)
        if exponent is None:
            raise SsflowError(f"--{exponent_flag} is required for kind {args.kind}")
        profile = builder(exponent, args.n, const)
    etas = profile.interior_points(args.points)
    rows = [(s.eta, s.f, s.fprime) for s in profile.sample(etas)]
    _csv_out(("eta", "f", "fprime"), rows, args.out)
    footer = {
        "status": "ok",
        "params": _params_dict(profile.params),
        "checks": [
            {
                "name": "max_residual",
                "pass": bool(solutions.max_residual(profile, args.points) < 1e-8),
                "max_dev": solutions.max_residual(profile, args.points),
                "tol": 1e-8,
            }
        ],
        "kind": args.kind,
        "constants": profile.constants,
        "support": [profile.support[0], None if math.isinf(profile.support[1]) else profile.support[1]],
    }
    if args.out:
        with open(args.out + ".footer.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(footer, fh, indent=2)
            fh.write("\n")
    else:
        json.dump(footer, sys.stderr, indent=2)
        sys.stderr.write("\n")
    return 0


def cmd_verify(args) -> int:
    if args.grid != "default":
        raise SsflowError(f"unknown grid {args.grid!r}; only 'default' is available")
    report = run_default_verification(tol_identities=_default_tol())
    _json_out(report, args.out)
    return 0 if report["status"] == "ok" else 2


def _add_param_flags(sub, with_beta=True):
    sub.add_argument("--eq", choices=("pme", "ple"), default="pme")
    sub.add_argument("--m", type=float, default=None, help="porous-medium exponent (pme)")
    sub.add_argument("--p", type=float, default=None, help="p-Laplacian exponent (ple)")
    sub.add_argument("--n", type=float, default=None, help="space dimension (any positive real)")
    if with_beta:
        sub.add_argument("--beta", type=float, default=None, help="similarity exponent beta")
    sub.add_argument("--sim-type", type=int, choices=(1, 2, 3), default=1, dest="sim_type")


def _add_integration_flags(sub):
    sub.add_argument("--psi0", type=float, default=None)
    sub.add_argument("--phi0", type=float, default=None)
    sub.add_argument("--span", type=float, nargs=2, default=(0.0, 5.0), metavar=("R0", "R1"))
    sub.add_argument("--rel-tol", type=float, default=1e-10, dest="rel_tol")
    sub.add_argument("--abs-tol", type=float, default=1e-13, dest="abs_tol")
    sub.add_argument("--max-step", type=float, default=math.inf, dest="max_step")
    sub.add_argument("--max-steps", type=int, default=100_000, dest="max_steps")
    sub.add_argument("--preset", choices=sorted(PRESETS), default=None,
                     help="named trajectory; overrides parameters and initial state")


def build_parser() -> _Parser:
    parser = _Parser(prog="ssflow", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("map", help="dimension-change maps with identity checks")
    _add_param_flags(s)
    s.add_argument("--branch", choices=("1", "2", "both"), default="both")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_map)

    s = subs.add_parser("coeffs", help="unified phase-plane coefficients")
    _add_param_flags(s)
    s.add_argument("--critical-tol", type=float, default=1e-9, dest="critical_tol")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_coeffs)

    s = subs.add_parser("integrate", help="integrate the unified system; CSV r1,psi,phi")
    _add_param_flags(s)
    s.add_argument("--unified", action="store_true", help="accepted for clarity; always unified")
    _add_integration_flags(s)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_integrate)

    s = subs.add_parser("profile", help="reconstruct a radial profile; CSV eta,f,fprime")
    _add_param_flags(s)
    _add_integration_flags(s)
    s.add_argument("--anchor-eta", type=float, default=1.0, dest="anchor_eta")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_profile)

    s = subs.add_parser("explicit", help="closed-form profile samples; CSV plus residual footer")
    s.add_argument("--kind", choices=sorted(_EXPLICIT_BUILDERS), required=True)
    s.add_argument("--m", type=float, default=None)
    s.add_argument("--p", type=float, default=None)
    s.add_argument("--n", type=float, required=True)
    s.add_argument("--C", type=float, default=1.0)
    s.add_argument("--K", type=float, default=1.0)
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--k1", type=float, default=1.0)
    s.add_argument("--k2", type=float, default=1.0)
    s.add_argument("--points", type=int, default=50)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_explicit)

    s = subs.add_parser("verify", help="run the full invariant suite")
    s.add_argument("--grid", default="default")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    # map/coeffs/integrate/profile need --n whenever params are built from flags
    try:
        if getattr(args, "n", None) is None and args.func in (cmd_map, cmd_coeffs):
            raise SsflowError("--n is required")
        if getattr(args, "beta", None) is None and args.func in (cmd_map, cmd_coeffs):
            raise SsflowError("--beta is required")
        if args.func in (cmd_integrate, cmd_profile) and not getattr(args, "preset", None):
            if args.n is None or args.beta is None:
                raise SsflowError("--n and --beta are required without --preset")
        return args.func(args)
    except SsflowError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 1
    except OSError as exc:
        _emit_error("io", str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
