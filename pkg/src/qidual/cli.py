"""Command-line entry point: ``qidual --command NAME --params JSON``.

Exit codes: 0 success, 2 a re-checked postcondition failed, 3 bad
parameters, 4 a search or integration budget ran out.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import plotting, report
from .errors import BudgetExhausted, ParameterError

EXIT_OK, EXIT_POSTCONDITION, EXIT_PARAMS, EXIT_BUDGET = 0, 2, 3, 4


def _load_params(text: str | None) -> dict:
    if text is None:
        return {}
    path = Path(text)
    if not text.lstrip().startswith("{") and path.is_file():
        text = path.read_text()
    try:
        params = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"--params is neither a JSON object nor a readable file: {exc}") from exc
    if not isinstance(params, dict):
        raise ParameterError("--params must be a JSON object")
    return params


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qidual", description=__doc__.splitlines()[0])
    ap.add_argument("--command", required=True, choices=report.COMMANDS)
    ap.add_argument("--params", help="inline JSON object or path to a JSON file")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--seed", type=int, default=0, help="seed for sampled checks (recorded in the report)")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--figures", metavar="DIR", help="render the command's figure into DIR")
    ap.add_argument("--figure-format", choices=("png", "svg", "pdf"), default="png")
    ap.add_argument("--timing", action="store_true", help="add wall-clock timing (breaks byte-identity)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed < 0:
        print("error: --seed must be nonnegative", file=sys.stderr)
        return EXIT_PARAMS
    t0 = time.perf_counter()
    try:
        params = _load_params(args.params)
        rep = report.run(args.command, params, args.seed)
        if args.figures:
            rep.figures = plotting.render(rep, Path(args.figures), args.figure_format)
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.timing:
        rep.timing = {"seconds": round(time.perf_counter() - t0, 6)}

    text = rep.to_csv() if args.format == "csv" else rep.to_json() + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if not rep.passed:
        failed = [c["check"] for c in rep.verification if not c["passed"]]
        print(f"postcondition failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_POSTCONDITION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
