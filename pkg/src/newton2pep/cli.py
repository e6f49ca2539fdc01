"""Command-line interface: construct / verify / delta / spectrum.

Reports are written to stdout and are byte-deterministic for a fixed
(input files, flags, seed) combination; wall-clock timing goes to stderr so
it never perturbs the report. Exit codes: 0 pass, 1 fail, 2 usage or parse
error, 3 inconclusive (degenerate input).
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from .errors import (
    AdmissibilityError,
    DegenerateProblemError,
    Newton2PepError,
    NodeMismatchError,
    SharedFactorError,
)
from .fileio import (
    FileFormatError,
    load_params,
    load_pencil,
    load_problem,
    params_from_dict,
    params_to_dict,
    save_pencil,
    _matrix_to_flat,
    _flat_to_matrix,
)
from .linearize import (
    E1FreeParams,
    companion_pencil,
    construct_general_ansatz,
    newton_companion,
    unimodular_witnesses,
    verify_linearization,
)
from .matpoly import MONOMIAL, NEWTON, MatrixPoly2, NewtonNodes
from .spaces import (
    DEFAULT_SAMPLES,
    DEFAULT_TOL,
    MonomialPencil,
    NewtonPencil,
    membership_newton,
)
from .twoparam import (
    QtepPair,
    certify_singular,
    delta_operators,
    pair_linearize,
    spectrum_pair_oracle,
    verify_spectrum_match,
)

ENV_SEED = "NEWTON2PEP_SEED"

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


def _fmt_f(x: float) -> str:
    return f"{float(x):.17g}"


def _fmt_c(z: complex) -> str:
    z = complex(z)
    return f"({z.real:.17g}, {z.imag:.17g})"


def _fmt_cvec(v) -> str:
    return ", ".join(_fmt_c(z) for z in np.asarray(v).ravel())


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(ENV_SEED)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise FileFormatError(f"environment variable {ENV_SEED} must be an "
                                  f"integer, got {env!r}")
    return 0


def _parse_ansatz(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise FileFormatError(f"--ansatz expects three comma-separated complex "
                              f"numbers, got {text!r}")
    try:
        return np.array([complex(p.strip()) for p in parts])
    except ValueError:
        raise FileFormatError(f"--ansatz could not parse {text!r} as complex "
                              "numbers (use Python syntax, e.g. 1, 0.5+2j)")


def _params_for(n: int, source: str | None, fallback_seed: int) -> E1FreeParams:
    """Free parameters from an integer seed, a JSON file, or the run seed."""
    if source is None:
        return E1FreeParams.random(n, np.random.default_rng(fallback_seed))
    if source.isdigit() or (source.startswith("-") and source[1:].isdigit()):
        return E1FreeParams.random(n, np.random.default_rng(int(source)))
    return load_params(source, n)


def _as_newton(q: MatrixPoly2) -> MatrixPoly2:
    """Zero-node Newton view of a monomial polynomial (same coefficients)."""
    return q if q.basis == NEWTON else q.newton_partner(NewtonNodes())


def _pencil_as_newton(pencil, nodes: NewtonNodes) -> NewtonPencil:
    if isinstance(pencil, NewtonPencil):
        return pencil
    return NewtonPencil.from_blocks(nodes, pencil.L1, pencil.L2, pencil.L0)


class Report:
    def __init__(self):
        self.lines: list[str] = []

    def add(self, line: str = ""):
        self.lines.append(line)

    def emit(self):
        sys.stdout.write("\n".join(self.lines) + "\n")


# ---------------------------------------------------------------- construct

def _cmd_construct(args) -> int:
    seed = _resolve_seed(args)
    q = load_problem(args.problem)
    report = Report()
    report.add(f"command: construct {'--companion' if args.companion else '--ansatz ' + args.ansatz}")
    report.add(f"input: {args.problem}")
    report.add(f"seed: {seed}")
    report.add(f"tolerance: {_fmt_f(args.tol)}")
    report.add(f"problem: basis={q.basis} n={q.n}")

    eye3 = np.eye(3, dtype=complex)
    if args.companion:
        m_used = eye3
        params = E1FreeParams.companion(q)
        if q.basis == MONOMIAL:
            pencil = companion_pencil(q)
        else:
            pencil = newton_companion(q)
        ansatz_note = "e1 (companion)"
    else:
        v = _parse_ansatz(args.ansatz)
        if np.abs(v).max() <= args.tol:
            raise FileFormatError("--ansatz must be a nonzero vector")
        params_raw = None
        if args.params is not None:
            params_raw = _params_for(q.n, args.params, seed)
        qn = _as_newton(q)
        built = construct_general_ansatz(qn, v, params_raw, tol=args.tol, seed=seed)
        m_used = built.M
        params = built.params_hat
        pencil_v = built.pencil_v
        if q.basis == MONOMIAL:
            # Zero nodes: the Newton pencil evaluates as lam A1 + mu A2 + A3.
            pencil = MonomialPencil.from_blocks(*pencil_v.blocks())
        else:
            pencil = pencil_v
        ansatz_note = _fmt_cvec(v)
        report.add("M:")
        for row in m_used:
            report.add("  " + _fmt_cvec(row))

    report.add(f"ansatz requested: {ansatz_note}")

    qn = _as_newton(q)
    pn = _pencil_as_newton(pencil, qn.nodes)
    membership = membership_newton(pn, qn, samples=args.samples, tol=args.tol,
                                   seed=seed)
    report.add(f"membership: {'member' if membership.member else 'not-member'}")
    report.add(f"ansatz recovered: {_fmt_cvec(membership.ansatz.vector)}")
    report.add(f"membership residual: {_fmt_f(membership.residual)}")

    provenance = {
        "command": "construct",
        "seed": seed,
        "M": _matrix_to_flat(m_used),
        "params": params_to_dict(params),
    }
    save_pencil(args.out, pencil, provenance)
    report.add(f"output: {args.out}")
    report.emit()
    return EXIT_PASS if membership.member else EXIT_FAIL


# ------------------------------------------------------------------- verify

def _cmd_verify(args) -> int:
    if args.samples < 6:
        raise FileFormatError(f"--samples must be at least 6, got {args.samples}")
    seed = _resolve_seed(args)
    q = load_problem(args.problem)
    pencil, provenance = load_pencil(args.pencil)

    q_is_newton = q.basis == NEWTON
    p_is_newton = isinstance(pencil, NewtonPencil)
    if q_is_newton != p_is_newton:
        raise FileFormatError(
            f"basis mismatch: problem is {q.basis}, pencil is "
            f"{'newton' if p_is_newton else 'monomial'}"
        )
    if q_is_newton and pencil.nodes.as_tuple() != q.nodes.as_tuple():
        raise NodeMismatchError("problem and pencil carry different nodes")

    qn = _as_newton(q)
    pn = _pencil_as_newton(pencil, qn.nodes)

    report = Report()
    report.add("command: verify")
    report.add(f"inputs: {args.problem} {args.pencil}")
    report.add(f"seed: {seed}")
    report.add(f"tolerance: {_fmt_f(args.tol)}")
    report.add(f"samples: {args.samples}")

    membership = membership_newton(pn, qn, samples=args.samples, tol=args.tol,
                                   seed=seed)
    report.add(f"membership: {'member' if membership.member else 'not-member'}")
    report.add(f"ansatz recovered: {_fmt_cvec(membership.ansatz.vector)}")
    report.add(f"membership residual: {_fmt_f(membership.residual)}")

    lin = verify_linearization(pn, qn, samples=args.samples, tol=args.tol, seed=seed)
    report.add(f"gamma estimate: {_fmt_c(lin.gamma_estimate)}")
    report.add(f"max relative deviation: {_fmt_f(lin.max_relative_deviation)}")
    report.add("determinant samples:")
    for lam, mu, det_l, det_q, dev in lin.samples:
        report.add(f"  lambda={_fmt_c(lam)} mu={_fmt_c(mu)} "
                   f"detL={_fmt_c(det_l)} detQ={_fmt_c(det_q)} "
                   f"deviation={_fmt_f(dev)}")

    witness_ok = True
    if "params" in provenance and "M" in provenance:
        params = params_from_dict(provenance["params"], qn.n, where="provenance.params")
        m_used = _flat_to_matrix(provenance["M"], 3, 3, "provenance.M")
        t = np.kron(m_used, np.eye(qn.n))
        e1_pencil = NewtonPencil.from_blocks(qn.nodes, t @ pn.A1, t @ pn.A2, t @ pn.A3)
        witnesses = unimodular_witnesses(qn, e1_pencil, params,
                                         samples=args.samples, tol=args.tol,
                                         seed=seed)
        predicted = witnesses.predicted_gamma() / np.linalg.det(m_used) ** qn.n
        report.add(f"witness reduction residual: {_fmt_f(witnesses.max_reduction_residual)}")
        report.add(f"witness gamma prediction: {_fmt_c(predicted)}")
        rel = (abs(lin.gamma_estimate - predicted) / abs(predicted)
               if predicted != 0 else np.inf)
        report.add(f"witness gamma agreement: {_fmt_f(rel)}")
        witness_ok = (witnesses.max_reduction_residual <= args.tol and rel <= 1e-6)
        report.add(f"witness check: {'pass' if witness_ok else 'fail'}")

    overall = membership.member and lin.passed and witness_ok
    report.add(f"verdict: {'PASS' if overall else 'FAIL'}")
    report.emit()
    return EXIT_PASS if overall else EXIT_FAIL


# -------------------------------------------------------------------- delta

def _cmd_delta(args) -> int:
    seed = _resolve_seed(args)
    q1 = load_problem(args.problem1)
    q2 = load_problem(args.problem2)
    pair = QtepPair(_as_newton(q1), _as_newton(q2))

    if args.params is not None and not (args.params.isdigit()
                                        or (args.params.startswith("-")
                                            and args.params[1:].isdigit())):
        from .fileio import _load_json
        doc = _load_json(args.params)
        if "params1" not in doc or "params2" not in doc:
            raise FileFormatError(f"{args.params}: expected 'params1' and 'params2'")
        params1 = params_from_dict(doc["params1"], pair.p1, "params1")
        params2 = params_from_dict(doc["params2"], pair.p2, "params2")
        params_note = f"file {args.params}"
    else:
        draw_seed = int(args.params) if args.params is not None else seed
        rng = np.random.default_rng(draw_seed)
        params1 = E1FreeParams.random(pair.p1, rng)
        params2 = E1FreeParams.random(pair.p2, rng)
        params_note = f"random(seed={draw_seed})"

    ln1, ln2 = pair_linearize(pair, params1, params2)
    delta = delta_operators(ln1, ln2)
    cert = certify_singular(delta, tol=args.tol, pencils=(ln1, ln2))

    report = Report()
    report.add("command: delta")
    report.add(f"inputs: {args.problem1} {args.problem2}")
    report.add(f"seed: {seed}")
    report.add(f"singularity tolerance: {_fmt_f(args.tol)}")
    report.add(f"pair: p1={pair.p1} p2={pair.p2}")
    report.add(f"params: {params_note}")
    size = delta.k1 * delta.k2
    report.add(f"delta operators: three {size}x{size} matrices (k1={delta.k1}, k2={delta.k2})")
    report.add(f"sigma_min(Delta0): {_fmt_f(cert.sigma_min)}")
    report.add(f"frobenius(Delta0): {_fmt_f(cert.frobenius)}")
    report.add(f"threshold: {_fmt_f(cert.threshold)}")
    report.add(f"structural zero pattern: "
               f"{'yes' if cert.evidence.get('structural_zero_pattern') else 'no'}")
    report.add(f"singular: {'yes' if cert.is_singular else 'no'}")
    report.emit()
    if args.check_singular and not cert.is_singular:
        return EXIT_FAIL
    return EXIT_PASS


# ----------------------------------------------------------------- spectrum

def _write_csv(path, rows) -> None:
    lines = ["re_lambda,im_lambda,re_mu,im_mu,residual"]
    for lam, mu, resid in rows:
        lam, mu = complex(lam), complex(mu)
        lines.append(f"{lam.real:.17g},{lam.imag:.17g},"
                     f"{mu.real:.17g},{mu.imag:.17g},{float(resid):.17g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_spectrum(args) -> int:
    seed = _resolve_seed(args)
    q = load_problem(args.problem)
    report = Report()
    report.add("command: spectrum")

    if args.pair is not None:
        if args.pencil is not None:
            raise FileFormatError("pair mode does not take a pencil file")
        q2 = load_problem(args.pair)
        pair = QtepPair(_as_newton(q), _as_newton(q2))
        report.add("mode: pair")
        report.add(f"inputs: {args.problem} {args.pair}")
        report.add(f"seed: {seed}")
        sample = spectrum_pair_oracle(pair)
        report.add(f"bezout bound: {sample.bezout_bound}")
        report.add(f"count (multiplicity-aware): {sample.total_count}")
        report.add(f"within bound: {'yes' if sample.total_count <= sample.bezout_bound else 'no'}")
        report.add("points:")
        rows = []
        for pt in sample.points:
            report.add(f"  lambda={_fmt_c(pt.lam)} mu={_fmt_c(pt.mu)} "
                       f"multiplicity={pt.multiplicity} residual={_fmt_f(pt.residual)}")
            rows.append((pt.lam, pt.mu, pt.residual))
        if args.out:
            _write_csv(args.out, rows)
            report.add(f"csv: {args.out}")
        report.emit()
        return EXIT_PASS

    if args.pencil is None:
        raise FileFormatError("slice mode requires a pencil file "
                              "(or use --pair for the joint-spectrum oracle)")
    if args.slices < 1:
        raise FileFormatError(f"--slices must be at least 1, got {args.slices}")

    pencil, _ = load_pencil(args.pencil)
    if (q.basis == NEWTON) != isinstance(pencil, NewtonPencil):
        raise FileFormatError("basis mismatch between problem and pencil files")
    if isinstance(pencil, NewtonPencil) and q.basis == NEWTON:
        if pencil.nodes.as_tuple() != q.nodes.as_tuple():
            raise NodeMismatchError("problem and pencil carry different nodes")
    qn = _as_newton(q)
    pn = _pencil_as_newton(pencil, qn.nodes)

    report.add("mode: slice")
    report.add(f"inputs: {args.problem} {args.pencil}")
    report.add(f"seed: {seed}")
    report.add(f"slices: {args.slices}")
    report.add(f"match tolerance: {_fmt_f(args.match_tol)}")
    result = verify_spectrum_match(qn, pn, slices=args.slices, seed=seed,
                                   match_tol=args.match_tol)
    rows = []
    for idx, rec in enumerate(result.records, start=1):
        status = "contained" if rec.contained else "MISMATCH"
        if rec.pencil_singular:
            status = "PENCIL-SINGULAR (determinant vanishes identically)"
        worst = max(rec.distances) if rec.distances else 0.0
        report.add(f"slice {idx}: mu0={_fmt_c(rec.mu0)} "
                   f"eigenvalues={len(rec.q_eigenvalues)} {status} "
                   f"max distance={_fmt_f(worst)}")
        for lam, dist in zip(rec.q_eigenvalues, rec.distances):
            report.add(f"  lambda={_fmt_c(lam)} distance={_fmt_f(dist)}")
            rows.append((lam, rec.mu0, dist))
    report.add(f"containment: {'PASS' if result.all_contained else 'FAIL'}")
    if args.out:
        _write_csv(args.out, rows)
        report.add(f"csv: {args.out}")
    report.emit()
    return EXIT_PASS if result.all_contained else EXIT_FAIL


# --------------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newton2pep",
        description="Construct and certify linearizations of quadratic "
                    "two-parameter matrix polynomials in Newton bases.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None,
                       help=f"run seed (default: ${ENV_SEED} or 0)")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                       help="relative tolerance for identity checks")

    p = sub.add_parser("construct", help="build a pencil from a problem file")
    p.add_argument("problem")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--companion", action="store_true",
                      help="emit the companion pencil")
    mode.add_argument("--ansatz", metavar="a,b,c",
                      help="target ansatz vector (three complex numbers)")
    p.add_argument("--params", metavar="SEED|FILE", default=None,
                   help="free parameters: integer seed for a random draw or "
                        "a JSON file with Y11/Z1/Z2")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--out", required=True, help="output pencil file")
    common(p)
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("verify", help="certify a pencil against a problem file")
    p.add_argument("problem")
    p.add_argument("pencil")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("delta", help="build and certify the operator determinants of a pair")
    p.add_argument("problem1")
    p.add_argument("problem2")
    p.add_argument("--params", metavar="SEED|FILE", default=None,
                   help="free parameters for both pencils")
    p.add_argument("--check-singular", action="store_true",
                   help="exit nonzero unless Delta0 is certified singular")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-7,
                   help="singularity threshold relative to ||Delta0||_F")
    p.set_defaults(func=_cmd_delta)

    p = sub.add_parser("spectrum", help="slice containment table or joint-spectrum oracle")
    p.add_argument("problem")
    p.add_argument("pencil", nargs="?", default=None)
    p.add_argument("--slices", type=int, default=5)
    p.add_argument("--pair", metavar="Q2FILE", default=None,
                   help="second problem file: run the joint-spectrum oracle")
    p.add_argument("--match-tol", type=float, default=1e-6)
    p.add_argument("--out", default=None, help="CSV output path")
    common(p)
    p.set_defaults(func=_cmd_spectrum)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except (FileFormatError, NodeMismatchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SharedFactorError as exc:
        print(f"degenerate pair: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except DegenerateProblemError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except AdmissibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Newton2PepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    finally:
        print(f"timing: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
