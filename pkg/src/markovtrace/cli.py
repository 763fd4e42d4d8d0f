"""Command-line interface: ``markovtrace <command> ...``.

Exit codes: 0 success or "holds", 1 violation or invalid input, 2 usage error.
Errors are printed to stderr as ``error: <Kind>: <message>``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import combs, stoch
from .contraction import TracePartition, contract, is_nonsignalling
from .dsl import Program, format_program, parse
from .errors import MarkovTraceError
from .interp import Model, check_contraction_identity, check_trace_soundness, interpret
from .render import to_dot

OK, VIOLATION, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _json(obj) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=False))


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _program(path: str) -> Program:
    return parse(_read(path))


def _pick(prog: Program, name: str | None):
    if name is None:
        if len(prog.diagrams) != 1:
            raise UsageError(f"--diag is required; choose one of {sorted(prog.diagrams)}")
        name = next(iter(prog.diagrams))
    if name not in prog.diagrams:
        raise UsageError(f"no diagram named {name!r}; available: {sorted(prog.diagrams)}")
    return name, prog.diagrams[name]


def _kernel(path: str, stochastic: bool = True):
    try:
        return stoch.loads(_read(path), stochastic)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}") from None


def _model(path: str, prog: Program) -> Model:
    try:
        return Model.from_json(json.loads(_read(path)), prog.signature)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}") from None


def _partition(d, k: int) -> TracePartition:
    if k < 0:
        raise UsageError("--feedback must be non-negative")
    return TracePartition(d, k)


# -- commands ------------------------------------------------------------------

def cmd_validate(a) -> int:
    prog = _program(a.file)
    for name, d in prog.diagrams.items():
        dom = " * ".join(d.dom) or "I"
        cod = " * ".join(d.cod) or "I"
        _emit(f"{name}: {dom} -> {cod} ({d.graph.n_boxes} boxes, {d.graph.n_wires} wires) valid")
    return OK


def cmd_normalize(a) -> int:
    prog = _program(a.file)
    name, d = _pick(prog, a.diag)
    _emit(format_program(prog.signature, {name: d.canonical}))
    return OK


def cmd_contract(a) -> int:
    prog = _program(a.file)
    name, d = _pick(prog, a.diag)
    out = contract(_partition(d, a.feedback))
    _emit(format_program(prog.signature, {a.name or f"{name}_contracted": out}))
    return OK


def cmd_nonsignalling(a) -> int:
    prog = _program(a.file)
    _, d = _pick(prog, a.diag)
    ok = is_nonsignalling(_partition(d, a.feedback))
    _emit("true" if ok else "false")
    return OK if ok else VIOLATION


def cmd_eval(a) -> int:
    prog = _program(a.file)
    _, d = _pick(prog, a.diag)
    _emit(stoch.dumps(interpret(d, _model(a.model, prog))))
    return OK


def cmd_trace_check(a) -> int:
    prog = _program(a.file)
    _, d = _pick(prog, a.diag)
    v = check_trace_soundness(_partition(d, a.feedback), _model(a.model, prog))
    _json(v.to_json())
    return OK if v.holds else VIOLATION


def cmd_identity_check(a) -> int:
    prog = _program(a.file)
    _, d1 = _pick(prog, a.lhs)
    _, d2 = _pick(prog, a.rhs)
    model = _model(a.model, prog)
    v = check_contraction_identity(_partition(d1, a.feedback), _partition(d2, a.feedback), model)
    report = {"status": v.status, "premise_residual": v.premise_residual, "conclusion_residual": v.conclusion_residual}
    if v.witnesses:
        report["witnesses"] = [stoch.to_json(k) for k in v.witnesses]
    _json(report)
    return VIOLATION if v.status == "violation" else OK


def _comb(path: str) -> combs.Comb:
    try:
        return combs.Comb.from_json(json.loads(_read(path)))
    except (json.JSONDecodeError, KeyError) as e:
        raise UsageError(f"{path} is not a comb JSON object: {e}") from None


def cmd_comb(a) -> int:
    if a.comb_cmd == "extend":
        _emit(stoch.dumps(combs.extension(_comb(a.comb))))
        return OK
    if a.comb_cmd == "insert":
        _emit(stoch.dumps(combs.insert(_comb(a.comb), _kernel(a.context))))
        return OK
    c1, c2 = _comb(a.first), _comb(a.second)
    tol = stoch.Tolerances(eq=a.tol)
    if a.mode == "ext":
        verdict = combs.ext_equiv(c1, c2, tol)
    elif a.mode == "optic":
        verdict = combs.optic_equiv(c1, c2, tol)
    else:
        verdict = combs.ctx_equiv(c1, c2, budget=a.budget, rng=np.random.default_rng(a.seed), tol=tol)
    res = stoch.max_abs_diff(combs.extension(c1), combs.extension(c2))
    _json({"mode": a.mode, "equivalent": verdict, "extension_residual": res})
    return OK if verdict else VIOLATION


def cmd_laws(a) -> int:
    from .laws import SUITES, run_laws

    if a.cases < 1:
        raise UsageError("--cases must be positive")
    suites = a.suite or None
    for s in suites or ():
        if s not in SUITES:
            raise UsageError(f"unknown suite {s!r}; choose from {sorted(SUITES)}")
    report = run_laws(a.seed, a.cases, suites, a.jobs)
    _json(report)
    return OK if report["violations"] == 0 else VIOLATION


def cmd_render(a) -> int:
    prog = _program(a.file)
    name, d = _pick(prog, a.diag)
    _emit(to_dot(d, name))
    return OK


# -- argument parsing -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="markovtrace", description="Free Markov category diagrams, contraction and causal traces.")
    sub = p.add_subparsers(dest="command", required=True)

    def diag_cmd(name, fn, help_, feedback=False, model=False):
        s = sub.add_parser(name, help=help_)
        s.add_argument("file", help="diagram source file")
        s.add_argument("--diag", help="diagram name (optional when the file defines one)")
        if feedback:
            s.add_argument("--feedback", "-k", type=int, required=True, help="number of trailing ports traced out")
        if model:
            s.add_argument("--model", required=True, help="model JSON file")
        s.set_defaults(fn=fn)
        return s

    s = sub.add_parser("validate", help="parse and validate every diagram in a file")
    s.add_argument("file")
    s.set_defaults(fn=cmd_validate)
    diag_cmd("normalize", cmd_normalize, "print a diagram in normal form")
    s = diag_cmd("contract", cmd_contract, "contract the trailing feedback wires", feedback=True)
    s.add_argument("--name", help="name of the resulting diagram")
    diag_cmd("nonsignalling", cmd_nonsignalling, "structural non-signalling check", feedback=True)
    diag_cmd("eval", cmd_eval, "interpret a diagram as a kernel", model=True)
    diag_cmd("trace-check", cmd_trace_check, "compare contraction against the causal trace", feedback=True, model=True)

    s = sub.add_parser("identity-check", help="test one contraction identity under a model")
    s.add_argument("file")
    s.add_argument("--lhs", required=True)
    s.add_argument("--rhs", required=True)
    s.add_argument("--feedback", "-k", type=int, required=True)
    s.add_argument("--model", required=True)
    s.set_defaults(fn=cmd_identity_check)

    s = sub.add_parser("comb", help="comb operations on kernel JSON")
    csub = s.add_subparsers(dest="comb_cmd", required=True)
    e = csub.add_parser("extend", help="insert the swap into the hole")
    e.add_argument("comb")
    i = csub.add_parser("insert", help="insert a context kernel into the hole")
    i.add_argument("comb")
    i.add_argument("--context", required=True, help="kernel JSON for h : B ⊗ K -> B' ⊗ K'")
    q = csub.add_parser("equiv", help="compare two combs")
    q.add_argument("first")
    q.add_argument("second")
    q.add_argument("--mode", choices=("ext", "ctx", "optic"), default="ext")
    q.add_argument("--budget", type=int, default=20, help="random contexts audited in ctx mode")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--tol", type=float, default=stoch.DEFAULT_TOL.eq)
    s.set_defaults(fn=cmd_comb)

    s = sub.add_parser("laws", help="run the randomized law suite")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cases", type=int, default=100)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--suite", action="append", help="restrict to a suite (repeatable)")
    s.set_defaults(fn=cmd_laws)

    s = diag_cmd("render", cmd_render, "emit a Graphviz rendering")
    s.add_argument("--dot", action="store_true", default=True, help="DOT output (the only format)")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.fn(args)
    except UsageError as e:
        print(f"error: usage: {e}", file=sys.stderr)
        return USAGE
    except MarkovTraceError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return VIOLATION


if __name__ == "__main__":
    sys.exit(main())
