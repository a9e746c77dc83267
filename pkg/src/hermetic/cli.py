"""Command-line front end.

Scenario files are JSON documents with a top-level ``kind``. They are
validated against ``schemas/scenario.schema.json`` before anything runs, and
every JSON result is validated against ``schemas/result.schema.json`` before
it is written. Complex numbers are ``[re, im]`` pairs (plain numbers are
accepted on input), matrices are row-major nested arrays and kets are
``{"layout": [{"label", "dim"}], "vector": [...]}``.

Exit status: 0 success, 1 verification failure, 2 input or schema error,
3 numerical-domain error.
"""

import argparse
import json
import sys
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, linalg
from .errors import HermeticError
from .mixing import GramSpec, mix_with_environment, mix_general
from .scenarios import (
    Screen,
    SlitScenario,
    build_slit_scenario,
    coherence_term,
    condition_on,
    detection_probability,
    double_slit_env_mixture,
    frequency_check,
    screen_intensity,
    simulate_preparation_run,
    visibility,
)
from .states import DescriptorSet, Ket, SystemLayout, purity
from .tolerances import DEFAULT
from .verifier import SuiteConfig, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3

KINDS = ("mix", "slits", "condition", "double_slit_env", "estimate", "verify")


class InputError(Exception):
    """Unreadable, malformed or schema-violating input."""


@lru_cache(maxsize=None)
def load_schema(name):
    """Parsed schema document, ``name`` in {"scenario", "result"}."""
    text = resources.files("hermetic").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def _validator(name):
    schema = load_schema(name)
    return jsonschema.Draft202012Validator(schema)


def validate_scenario(doc):
    errors = sorted(_validator("scenario").iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise InputError(f"scenario does not match the schema at {where}: {e.message}")


def validate_result(doc):
    _validator("result").validate(doc)


# -- decoding ----------------------------------------------------------------

def _complex(x):
    return complex(x[0], x[1]) if isinstance(x, list) else complex(x)


def _cvector(xs):
    return np.array([_complex(x) for x in xs], dtype=np.complex128)


def _cmatrix(rows):
    if len({len(r) for r in rows}) != 1:
        raise InputError("matrix rows have different lengths")
    return np.array([[_complex(x) for x in r] for r in rows], dtype=np.complex128)


def _ket(obj):
    layout = SystemLayout.from_json(obj["layout"])
    vec = _cvector(obj["vector"])
    if vec.size != layout.total:
        raise InputError(f"ket has {vec.size} entries but its layout has dimension {layout.total}")
    return Ket(vec, layout)


def _tolerances(doc):
    return DEFAULT.with_(**doc.get("tolerances", {}))


def _screen(doc):
    s = dict(doc.get("screen", {}))
    if "angle_range" in s:
        s["angle_range"] = tuple(s["angle_range"])
    return Screen(**s)


def _exterior(doc):
    if "gram" in doc:
        return {"gram": GramSpec(_cmatrix(doc["gram"]))}
    return {"env_vectors": tuple(_ket(k) for k in doc["env_vectors"])}


# -- encoding ----------------------------------------------------------------

def _enc_c(z):
    return [float(np.real(z)), float(np.imag(z))]


def _enc_density(rho):
    return {"layout": rho.layout.to_json(), "matrix": [[_enc_c(z) for z in row] for row in rho.mat]}


def _csv_path(args, source, suffix=".csv"):
    if getattr(args, "csv", None):
        return Path(args.csv)
    if source is None:
        return None
    return Path(source).with_suffix(suffix)


def _write_csv(path, text):
    if path is None:
        return None
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return str(path)


# -- commands ----------------------------------------------------------------

def cmd_mix(doc, args, source=None):
    tol = _tolerances(doc)
    descs = [_ket(k) for k in doc["descriptors"]]
    mu = _cvector(doc["amplitudes"])
    nrm = np.linalg.norm(mu)
    if nrm == 0:
        raise InputError("amplitudes are all zero")
    d = DescriptorSet(descs, amplitudes=mu / nrm)
    env_label = doc.get("env_label", "E")
    ext = _exterior(doc)
    if "gram" in ext:
        res = mix_general(d, ext["gram"], env_label=env_label, tol=tol)
    else:
        res = mix_with_environment(d, ext["env_vectors"], tol=tol)
    dims = (res.form.system_layout.total, res.form.env_layout.total)
    coeffs, _, _ = linalg.schmidt(res.joint.vec, dims, tol)
    return {
        "kind": "mix_result",
        "reduced": _enc_density(res.reduced),
        "purity": purity(res.reduced),
        "classification": res.classification.to_json(),
        "schmidt_coefficients": [float(c) for c in coeffs],
        "amplitudes": [_enc_c(z) for z in res.amplitudes],
    }


def _slit_scenario(doc):
    mu = _cvector(doc["amplitudes"])
    return SlitScenario(mu.size, mu, screen=_screen(doc), **_exterior(doc))


def cmd_slits(doc, args, source=None):
    tol = _tolerances(doc)
    s = _slit_scenario(doc)
    res = build_slit_scenario(s, tol)
    pattern = screen_intensity(res.reduced, s.screen, tol=tol)
    path = _write_csv(_csv_path(args, source), pattern.to_csv())
    return {
        "kind": "slits_result",
        "n_slits": s.n_slits,
        "visibility": visibility(pattern, tol),
        "purity": purity(res.reduced),
        "classification": res.classification.to_json(),
        "samples": int(pattern.angles.size),
        "csv": path,
    }


def cmd_condition(doc, args, source=None):
    tol = _tolerances(doc)
    s = _slit_scenario(doc)
    res = build_slit_scenario(s, tol)
    detector = _ket(doc["detector"])
    rho = condition_on(res.joint, detector, tol)
    slits = doc.get("slits")
    pattern = screen_intensity(rho, s.screen, slits=slits, tol=tol)
    path = _write_csv(_csv_path(args, source), pattern.to_csv())
    return {
        "kind": "condition_result",
        "probability": min(1.0, max(0.0, detection_probability(res.joint, detector))),
        "reduced": _enc_density(rho),
        "purity": purity(rho),
        "visibility": visibility(pattern, tol),
        "slits": list(range(s.n_slits)) if slits is None else sorted(set(slits)),
        "csv": path,
    }


def cmd_double_slit_env(doc, args, source=None):
    tol = _tolerances(doc)
    w = doc["weights"]
    psi1, psi2 = _ket(doc["psi1"]), _ket(doc["psi2"])
    m = doc.get("m_labels", ["M"])
    rho_sm, rho_s = double_slit_env_mixture(w, psi1, psi2, m_label=m, tol=tol)
    rho_m = rho_sm.reduce(list(rho_sm.layout.labels[1:]))
    product = linalg.tensor_product(np.diag(np.asarray(w, dtype=float)), rho_m.mat)
    coh = coherence_term(w, psi1, psi2, m_label=m)
    return {
        "kind": "double_slit_env_result",
        "rho_s": _enc_density(rho_s),
        "rho_sm": _enc_density(rho_sm),
        "purity_s": purity(rho_s),
        "coherence_norm": float(np.linalg.norm(coh, 2)),
        "product_residual": float(np.max(np.abs(rho_sm.mat - product))),
    }


def cmd_estimate(doc, args, source=None):
    tol = _tolerances(doc)
    cands = [_ket(k) for k in doc["candidates"]]
    design = [[_ket(k) for k in basis] for basis in doc["design"]]
    w = np.asarray(doc["weights"], dtype=float)
    traj = simulate_preparation_run(
        doc["mode"], cands, w, doc["shots"], design, doc["seed"], doc.get("true_index"), tol
    )
    rows = []
    if doc["mode"] == "A":
        rows = frequency_check(traj, cands, w, design, doc.get("n_sigma", 3.0))
    path = _write_csv(_csv_path(args, source), traj.to_csv())
    final = traj.posteriors[-1]
    return {
        "kind": "estimate_result",
        "mode": doc["mode"],
        "seed": doc["seed"],
        "shots": doc["shots"],
        "final_posterior": [min(1.0, max(0.0, float(p))) for p in final],
        "max_posterior": min(1.0, float(final.max())),
        "inconsistent_shots": int(traj.inconsistent.sum()),
        "frequency_check": rows,
        "csv": path,
    }


def _suite_config(seed=0, trials=200, dims=(2, 3, 4), tolerances=DEFAULT):
    return SuiteConfig(seed=seed, trials=trials, dims=tuple(dims), tolerances=tolerances)


def cmd_verify_doc(doc, args, source=None):
    cfg = _suite_config(doc.get("seed", 0), doc.get("trials", 200), doc.get("dims", (2, 3, 4)), _tolerances(doc))
    return run_suite(cfg).to_json()


COMMANDS = {
    "mix": cmd_mix,
    "slits": cmd_slits,
    "condition": cmd_condition,
    "double_slit_env": cmd_double_slit_env,
    "estimate": cmd_estimate,
    "verify": cmd_verify_doc,
}


# -- driver ------------------------------------------------------------------

def read_scenario(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"{path} is not valid UTF-8 JSON: {exc}") from None
    validate_scenario(doc)
    return doc


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def emit(doc, out=None):
    """Validate a result document and write it to ``out`` or stdout."""
    validate_result(doc)
    text = dumps(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return text


def run_document(doc, args, source=None, expect=None):
    kind = doc["kind"]
    if expect is not None and kind != expect:
        raise InputError(f"scenario kind is {kind!r}, expected {expect!r}")
    result = COMMANDS[kind](doc, args, source)
    emit(result, getattr(args, "out", None))
    if result["kind"] == "verify_report" and not result["passed"]:
        return EXIT_VERIFY
    return EXIT_OK


def _dims(text):
    try:
        dims = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid dimension list {text!r}") from None
    if not dims or min(dims) < 2:
        raise argparse.ArgumentTypeError("dimensions must be integers >= 2")
    return dims


def build_parser():
    p = argparse.ArgumentParser(
        prog="hermetic",
        description="Mixing, which-path and verification computations on finite-dimensional states.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run any scenario file, dispatching on its kind")
    run.add_argument("file")
    run.add_argument("--out", help="write the JSON result here instead of stdout")
    run.add_argument("--csv", help="CSV path for pattern/trajectory output (default: FILE with .csv suffix)")

    for kind in KINDS[:-1]:
        name = kind.replace("_", "-")
        sp = sub.add_parser(name, help=f"run a {kind!r} scenario file")
        sp.add_argument("file")
        sp.add_argument("--out", help="write the JSON result here instead of stdout")
        if kind in ("slits", "condition", "estimate"):
            sp.add_argument("--csv", help="CSV output path (default: FILE with .csv suffix)")
        sp.set_defaults(expect=kind)

    v = sub.add_parser("verify", help="run the randomized property suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=200, help="trials per property and dimension")
    v.add_argument("--dims", type=_dims, default=[2, 3, 4], help="comma-separated dimensions, e.g. 2,3,4")
    v.add_argument("--tolerance", type=float, default=None, help="classification tolerance")
    v.add_argument("--out", help="write the report here instead of stdout")

    sc = sub.add_parser("schema", help="print a bundled JSON schema")
    sc.add_argument("name", choices=("scenario", "result"))
    return p


def _main(args):
    if args.command == "schema":
        sys.stdout.write(json.dumps(load_schema(args.name), indent=2) + "\n")
        return EXIT_OK
    if args.command == "verify":
        if args.trials < 1:
            raise InputError("--trials must be at least 1")
        tol = DEFAULT if args.tolerance is None else DEFAULT.with_(classify=args.tolerance)
        report = run_suite(_suite_config(args.seed, args.trials, args.dims, tol))
        emit(report.to_json(), args.out)
        return EXIT_OK if report.passed else EXIT_VERIFY
    doc = read_scenario(args.file)
    return run_document(doc, args, args.file, getattr(args, "expect", None))


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _main(args)
    except InputError as exc:
        print(f"hermetic: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HermeticError as exc:
        print(f"hermetic: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
