"""Regenerate tests/golden/ from the CLI. Review the diff before committing."""
import contextlib
import io
from pathlib import Path

from markovtrace.cli import main

ROOT = Path(__file__).resolve().parent.parent
DATA, GOLDEN = ROOT / "data", ROOT / "tests" / "golden"

FIG, IDENT = DATA / "feedback_context.diag", DATA / "contraction_identity.diag"
FIG_MODEL, IDENT_MODEL = DATA / "feedback_context_model.json", DATA / "contraction_identity_model.json"

TARGETS = {
    "feedback_context_ctx.dot": ["render", FIG, "--diag", "ctx"],
    "feedback_context_expected.dot": ["render", FIG, "--diag", "expected"],
    "feedback_context_expected_eval.json": ["eval", FIG, "--diag", "expected", "--model", FIG_MODEL],
    "feedback_context_ctx_contract.diag": ["contract", FIG, "--diag", "ctx", "-k", "1"],
    "feedback_context_trace_check.json": ["trace-check", FIG, "--diag", "ctx", "-k", "1", "--model", FIG_MODEL],
    "normalization_raw.diag": ["normalize", DATA / "normalization.diag", "--diag", "raw"],
    "contraction_identity_c1.dot": ["render", IDENT, "--diag", "c1"],
    "contraction_identity_c1_contract.diag": ["contract", IDENT, "--diag", "c1", "-k", "1", "--name", "c1_contracted"],
    "contraction_identity_c1_eval.json": ["eval", IDENT, "--diag", "c1", "--model", IDENT_MODEL],
}


def run() -> None:
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in TARGETS.items():
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = main([str(a) for a in argv])
        if code != 0:
            raise SystemExit(f"{name}: exit {code}")
        (GOLDEN / name).write_text(buf.getvalue(), encoding="utf-8")
        print("wrote", name)


if __name__ == "__main__":
    run()
