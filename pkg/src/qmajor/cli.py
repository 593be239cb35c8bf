"""Batch command-line front end.

Each invocation runs one job: parse JSON inputs, dispatch to the library,
write one machine-readable JSON report.  Exit codes separate the three
failure classes: 0 success, 1 domain rejection (a precondition such as
majorization fails), 2 malformed or invalid input.

Reports are deterministic: identical inputs, options and seed produce
byte-identical bytes.  Complex numbers are two-element [re, im] arrays and
every embedded domain value is a "kind"-tagged fragment that parses back to
the identical value.
"""

from __future__ import annotations

import hashlib
import json
import sys

import click
import numpy as np

from . import __version__
from .numkernel import (
    DensityMatrix,
    DomainError,
    ValidationError,
    validate_density,
)
from .majorize import (
    MajorizationError,
    as_prob_vector,
    check_schur_inequalities,
    horn_orthogonal,
    majorization_violation,
    t_transform_chain,
)
from .ensembles import (
    Ensemble,
    entropy_report,
    synthesize_ensemble,
    verify_ensemble,
)
from .bipartite import BipartiteState, corollary4_decompose, schmidt
from .protocol import enumerate_protocol, run_protocol

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_INPUT = 2


class InputError(Exception):
    """Malformed or invalid input file; maps to exit code 2."""


# ---------------------------------------------------------------- encoding

def _c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def encode_vector(v) -> list[list[float]]:
    return [_c(z) for z in np.asarray(v, dtype=np.complex128)]


def encode_entries(m) -> list[list[list[float]]]:
    return [encode_vector(row) for row in np.asarray(m, dtype=np.complex128)]


def encode_probvec(w) -> dict:
    return {"kind": "probvec", "weights": [float(x) for x in np.asarray(w, dtype=np.float64)]}


def encode_density(rho: DensityMatrix) -> dict:
    return {"kind": "density", "dim": rho.dim, "entries": encode_entries(rho.matrix)}


def encode_matrix(m) -> dict:
    return {"kind": "matrix", "entries": encode_entries(m)}


def encode_statevec(v) -> dict:
    return {"kind": "statevec", "amplitudes": encode_vector(v)}


def encode_bipartite(psi: BipartiteState) -> dict:
    return {
        "kind": "bipartite",
        "dimA": psi.dim_a,
        "dimB": psi.dim_b,
        "amplitudes": encode_entries(psi.amplitudes),
    }


def encode_ensemble(e: Ensemble) -> dict:
    return {
        "kind": "ensemble",
        "weights": [float(x) for x in e.weights],
        "states": encode_entries(e.states),
        "synthetic": [bool(b) for b in e.synthetic],
    }


def _decode_complex(item, where: str) -> complex:
    if not (isinstance(item, list) and len(item) == 2):
        raise InputError(f"{where}: complex entries must be [re, im] pairs")
    try:
        return complex(float(item[0]), float(item[1]))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from exc


def _decode_matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise InputError(f"{where}: expected a non-empty list of rows")
    data = [[_decode_complex(z, where) for z in row] for row in rows]
    widths = {len(row) for row in data}
    if len(widths) != 1:
        raise InputError(f"{where}: ragged rows {sorted(widths)}")
    return np.array(data, dtype=np.complex128)


# ---------------------------------------------------------------- parsing

def parse_document(doc, path: str, tols: dict):
    """Decode one kind-tagged JSON document into a validated domain value."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InputError(f"{path}: missing top-level 'kind' tag")
    kind = doc["kind"]
    try:
        if kind == "probvec":
            return as_prob_vector(doc["weights"], tol=tols["prob"], name=f"{path} weights")
        if kind == "density":
            entries = _decode_matrix(doc["entries"], f"{path} entries")
            if "dim" in doc and int(doc["dim"]) != entries.shape[0]:
                raise InputError(
                    f"{path}: declared dim {doc['dim']} but {entries.shape[0]} rows"
                )
            return validate_density(entries, tol=tols["herm"])
        if kind == "matrix":
            return _decode_matrix(doc["entries"], f"{path} entries")
        if kind == "statevec":
            v = np.array([_decode_complex(z, f"{path} amplitudes") for z in doc["amplitudes"]])
            return v
        if kind == "bipartite":
            amps = _decode_matrix(doc["amplitudes"], f"{path} amplitudes")
            if "dimA" in doc and int(doc["dimA"]) != amps.shape[0]:
                raise InputError(f"{path}: declared dimA {doc['dimA']} but {amps.shape[0]} rows")
            if "dimB" in doc and int(doc["dimB"]) != amps.shape[1]:
                raise InputError(f"{path}: declared dimB {doc['dimB']} but {amps.shape[1]} columns")
            psi = BipartiteState(amplitudes=amps)
            norm = psi.norm()
            if abs(norm - 1.0) > tols["norm"]:
                raise ValidationError(
                    f"{path}: state norm {norm!r} deviates from 1 by more than {tols['norm']}"
                )
            return psi
        if kind == "ensemble":
            weights = np.asarray(doc["weights"], dtype=np.float64)
            states = _decode_matrix(doc["states"], f"{path} states")
            synthetic = np.asarray(doc.get("synthetic", [False] * weights.size), dtype=bool)
            return Ensemble(weights=weights, states=states, synthetic=synthetic)
    except KeyError as exc:
        raise InputError(f"{path}: missing field {exc}") from exc
    raise InputError(f"{path}: unknown kind {kind!r}")


def parse_input(path: str, tols: dict | None = None):
    """Read and decode one input file; raises InputError/ValidationError on bad input."""
    tols = tols or dict(_DEFAULT_TOLS)
    try:
        raw = open(path, "rb").read()
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: parse error: {exc}") from exc
    return parse_document(doc, path, tols)


def _digest(path: str) -> dict:
    with open(path, "rb") as fh:
        return {"path": path, "sha256": hashlib.sha256(fh.read()).hexdigest()}


_DEFAULT_TOLS = {"herm": 1e-9, "major": 1e-9, "norm": 1e-9, "recon": 1e-8, "prob": 1e-9}


# ---------------------------------------------------------------- reporting

def _emit(report: dict, output: str | None) -> None:
    payload = json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"
    data = payload.encode("utf-8")
    if output:
        with open(output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)


def _schur_fragment(report) -> dict:
    return {
        "passed": report.passed,
        "entries": [
            {"name": e.name, "value_x": e.value_x, "value_y": e.value_y} for e in report.entries
        ],
    }


def _transcript_fragment(tr) -> dict:
    return {
        "outcome": {"d": tr.outcome.d, "s": tr.outcome.s, "t": tr.outcome.t},
        "outcome_probability": tr.outcome_probability,
        "bits_sent": tr.bits_sent,
        "correction": tr.correction,
        "final_state": encode_bipartite(tr.final_state),
        "fidelity": tr.fidelity,
        "seed": tr.seed,
    }


def _run(command: str, inputs: tuple[str, ...], output: str | None, tols: dict,
         seed: int | None, job) -> None:
    """Shared job wrapper: parse, execute, report, map exceptions to exit codes."""
    base = {
        "command": command,
        "version": __version__,
        "tolerances": {k: tols[k] for k in sorted(tols)},
        "inputs": [],
    }
    if seed is not None:
        base["seed"] = seed
    try:
        base["inputs"] = [_digest(p) for p in inputs]
        values = [parse_input(p, tols) for p in inputs]
    except (InputError, ValidationError) as exc:
        base["status"] = "error"
        base["reason"] = {"class": "input", "detail": str(exc)}
        _emit(base, output)
        raise SystemExit(EXIT_INPUT)
    try:
        base["result"] = job(values)
    except DomainError as exc:
        base["status"] = "rejected"
        reason = {"class": "domain", "detail": str(exc)}
        for attr in ("k", "lhs", "rhs"):
            if hasattr(exc, attr):
                reason[attr] = getattr(exc, attr)
        base["reason"] = reason
        _emit(base, output)
        raise SystemExit(EXIT_REJECTED)
    base["status"] = "ok"
    _emit(base, output)
    raise SystemExit(EXIT_OK)


def _tol_options(fn):
    fn = click.option("--tol-herm", type=float, default=1e-9, show_default=True,
                      help="Hermiticity/trace/positivity tolerance for density matrices.")(fn)
    fn = click.option("--tol-major", type=float, default=1e-9, show_default=True,
                      help="Majorization partial-sum tolerance.")(fn)
    fn = click.option("--tol-norm", type=float, default=1e-9, show_default=True,
                      help="Unit-norm tolerance for states.")(fn)
    fn = click.option("--tol-recon", type=float, default=1e-8, show_default=True,
                      help="Reconstruction tolerance for verification reports.")(fn)
    return fn


def _collect_tols(tol_herm, tol_major, tol_norm, tol_recon) -> dict:
    return {
        "herm": tol_herm,
        "major": tol_major,
        "norm": tol_norm,
        "recon": tol_recon,
        "prob": max(tol_major, 1e-9),
    }


def _io_options(fn):
    fn = click.option("--input", "-i", "inputs", multiple=True, required=True,
                      help="Input JSON file; repeat in the documented order.")(fn)
    fn = click.option("--output", "-o", default=None, help="Report path (default: stdout).")(fn)
    return fn


@click.group()
@click.version_option(version=__version__, prog_name="qmajor")
def main():
    """Decide, construct and simulate pure-state ensemble decompositions."""


@main.command("majorize-check")
@_io_options
@_tol_options
def majorize_check(inputs, output, tol_herm, tol_major, tol_norm, tol_recon):
    """Check x majorized by y.  Inputs: x probvec, y probvec."""
    tols = _collect_tols(tol_herm, tol_major, tol_norm, tol_recon)

    def job(values):
        x, y = values
        violation = majorization_violation(x, y, tol=tols["major"])
        if violation is not None:
            raise MajorizationError(*violation)
        return {
            "holds": True,
            "x": encode_probvec(x),
            "y": encode_probvec(y),
        }

    _run("majorize-check", inputs, output, tols, None, job)


@main.command("majorize-decompose")
@_io_options
@_tol_options
def majorize_decompose(inputs, output, tol_herm, tol_major, tol_norm, tol_recon):
    """T-transform chain and ortho-stochastic witness.  Inputs: x probvec, y probvec."""
    tols = _collect_tols(tol_herm, tol_major, tol_norm, tol_recon)

    def job(values):
        x, y = values
        chain = t_transform_chain(x, y, tol=tols["major"])
        witness = horn_orthogonal(x, y, tol=tols["major"])
        return {
            "chain": {
                "transforms": [{"i": t.i, "k": t.k, "t": t.t} for t in chain.transforms],
                "source_permutation": [int(j) for j in chain.source_permutation],
                "target_permutation": [int(j) for j in chain.target_permutation],
            },
            "witness": {
                "orthogonal": encode_matrix(witness.orthogonal),
                "doubly_stochastic": encode_matrix(witness.doubly_stochastic),
            },
        }

    _run("majorize-decompose", inputs, output, tols, None, job)


@main.command("ensemble-synth")
@_io_options
@_tol_options
def ensemble_synth(inputs, output, tol_herm, tol_major, tol_norm, tol_recon):
    """Construct an ensemble for rho with weights p.  Inputs: density, probvec."""
    tols = _collect_tols(tol_herm, tol_major, tol_norm, tol_recon)

    def job(values):
        rho, p = values
        ens = synthesize_ensemble(rho, p)
        audit = verify_ensemble(ens, rho, tol=tols["recon"])
        entropy = entropy_report(ens)
        return {
            "ensemble": encode_ensemble(ens),
            "reconstruction_error": audit.frobenius_error,
            "entropy": {
                "shannon": entropy.shannon,
                "von_neumann": entropy.von_neumann,
                "schur": _schur_fragment(entropy.schur),
            },
        }

    _run("ensemble-synth", inputs, output, tols, None, job)


@main.command("ensemble-verify")
@_io_options
@_tol_options
def ensemble_verify(inputs, output, tol_herm, tol_major, tol_norm, tol_recon):
    """Audit an ensemble against a density matrix.  Inputs: ensemble, density."""
    tols = _collect_tols(tol_herm, tol_major, tol_norm, tol_recon)

    def job(values):
        ens, rho = values
        audit = verify_ensemble(ens, rho, tol=tols["recon"])
        return {
            "passed": audit.passed,
            "frobenius_error": audit.frobenius_error,
            "majorization_ok": audit.majorization_ok,
            "norm_deviations": [float(x) for x in audit.norm_deviations],
        }

    _run("ensemble-verify", inputs, output, tols, None, job)


@main.command("schmidt")
@_io_options
@_tol_options
def schmidt_cmd(inputs, output, tol_herm, tol_major, tol_norm, tol_recon):
    """Schmidt decomposition.  Inputs: bipartite state."""
    tols = _collect_tols(tol_herm, tol_major, tol_norm, tol_recon)

    def job(values):
        (psi,) = values
        dec = schmidt(psi)
        return {
            "coefficients": encode_probvec(dec.coefficients),
            "basis_a": [encode_statevec(dec.basis_a[:, j]) for j in range(dec.rank)],
            "basis_b": [encode_statevec(dec.basis_b[:, j]) for j in range(dec.rank)],
        }

    _run("schmidt", inputs, output, tols, None, job)


@main.command("corollary4")
@_io_options
@_tol_options
def corollary4(inputs, output, tol_herm, tol_major, tol_norm, tol_recon):
    """Rewrite a bipartite state with prescribed weights.  Inputs: bipartite, probvec."""
    tols = _collect_tols(tol_herm, tol_major, tol_norm, tol_recon)

    def job(values):
        psi, q = values
        dec = corollary4_decompose(psi, q)
        recon = dec.reconstruct()
        return {
            "weights": encode_probvec(dec.weights),
            "basis_a": [encode_statevec(dec.basis_a[:, j]) for j in range(dec.weights.size)],
            "states_b": [encode_statevec(s) for s in dec.states_b],
            "reconstruction": encode_matrix(recon),
        }

    _run("corollary4", inputs, output, tols, None, job)


@main.command("protocol-run")
@_io_options
@_tol_options
@click.option("--d", "dim", type=int, required=True,
              help="Schmidt rank of the maximally entangled source.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="PRNG seed for outcome sampling.")
@click.option("--exhaustive", is_flag=True,
              help="Enumerate all d^2 outcome branches instead of sampling one.")
def protocol_run(inputs, output, tol_herm, tol_major, tol_norm, tol_recon, dim, seed, exhaustive):
    """Simulate the conversion protocol.  Inputs: bipartite target state."""
    tols = _collect_tols(tol_herm, tol_major, tol_norm, tol_recon)

    def job(values):
        (target,) = values
        if exhaustive:
            transcripts = enumerate_protocol(target, dim)
            return {
                "d": dim,
                "exhaustive": True,
                "transcripts": [_transcript_fragment(t) for t in transcripts],
            }
        tr = run_protocol(target, dim, seed)
        return {"d": dim, "exhaustive": False, "transcript": _transcript_fragment(tr)}

    _run("protocol-run", inputs, output, tols, None if exhaustive else seed, job)


@main.command("schur-report")
@_io_options
@_tol_options
def schur_report(inputs, output, tol_herm, tol_major, tol_norm, tol_recon):
    """Schur-convex comparisons for x majorized by y.  Inputs: x probvec, y probvec."""
    tols = _collect_tols(tol_herm, tol_major, tol_norm, tol_recon)

    def job(values):
        x, y = values
        report = check_schur_inequalities(x, y, tol=tols["major"])
        return _schur_fragment(report)

    _run("schur-report", inputs, output, tols, None, job)


if __name__ == "__main__":
    main()
