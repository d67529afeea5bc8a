"""
The ``lnif`` command.

Exit codes: 0 success, 1 input error, 2 proof search failure, 3 no
countermodel within the bounds, 4 check failure.

.. autosummary::
   ~main
   ~cmd_prove
   ~cmd_check
   ~cmd_cutelim
   ~cmd_countermodel
   ~cmd_latex
   ~cmd_transform
   ~cmd_oracle
   ~cmd_hilbert
"""

# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

from argparse import ArgumentParser
import json
import logging
import sys

from . import __version__
from .calculus import (
    MODES, check_derivation, dump_derivation, load_derivation,
    derivation_table
)
from .config import ProverConfig, load_config
from .exceptions import (
    LNIFError, FormulaSyntaxError, ArityError, UnboundVariable,
    ProofSearchFailure, NotPropositional, ConfigError, ModelError
)
from .latex import latex_derivation, latex_document
from .prover import prove_formula, prove_batch, hilbert_proof
from .semantics import find_countermodel, format_model, goedel_valid
from .sequent import parse_sequent
from .syntax import parse_formula, print_formula, Param
from . import transform

logger = logging.getLogger(__name__)

OK, INPUT_ERROR, SEARCH_FAILURE, NO_COUNTERMODEL, CHECK_FAILURE = range(5)

_INPUT_ERRORS = (FormulaSyntaxError, ArityError, UnboundVariable,
                 ConfigError, OSError)


def _emit(args, record, text):
    """Print ``record`` as JSON or ``text`` for people."""
    if args.format == "json":
        print(json.dumps(record, default=str))
    elif text:
        print(text)


def _fail(args, code, err, **extra):
    record = {"status": "error", "error": type(err).__name__,
              "message": str(err), **extra}
    path = getattr(err, "path", None)
    if path is not None:
        record["path"] = list(path)
    _emit(args, record, None)
    if args.format != "json":
        print(f"FAIL {type(err).__name__}: {err}", file=sys.stderr)
    return code


def _config(args):
    config = ProverConfig()
    if getattr(args, "config", None):
        config = load_config(args.config, base=config)
    return config.update(
        depth=getattr(args, "depth", None),
        witness_cap=getattr(args, "witness_cap", None),
        parallel=True if getattr(args, "parallel", False) else None,
    )


def _write(d):
    sys.stdout.write(dump_derivation(d))


def cmd_prove(args):
    """Prove ``formula`` (or every line of ``--batch``)."""
    try:
        config = _config(args)
    except _INPUT_ERRORS as err:
        return _fail(args, INPUT_ERROR, err)
    transform.set_check_rewrites(config.check_rewrites)
    if args.batch:
        try:
            with open(args.batch, encoding="utf-8") as f:
                texts = [line.strip() for line in f
                         if line.strip() and not line.startswith("#")]
        except OSError as err:
            return _fail(args, INPUT_ERROR, err)
        table = prove_batch(texts, config=config, jobs=args.jobs)
        if args.format == "json":
            print(table.to_json(orient="records"))
        else:
            print(table.to_string(index=False))
        return OK if (table.status == "proved").all() else SEARCH_FAILURE
    if args.formula is None:
        return _fail(args, INPUT_ERROR, LNIFError("no formula given"))
    try:
        formula = parse_formula(args.formula)
    except _INPUT_ERRORS as err:
        return _fail(args, INPUT_ERROR, err)
    try:
        d = prove_formula(formula, config=config)
    except ProofSearchFailure as err:
        return _fail(args, SEARCH_FAILURE, err, reason=err.reason)
    if args.output:
        dump_derivation(d, args.output)
    record = {"status": "proved", "formula": print_formula(formula),
              "height": d.height, "size": d.size, "output": args.output}
    _emit(args, record,
          f"PROVED {print_formula(formula)}  height {d.height}, "
          f"{d.size} nodes")
    return OK


def cmd_check(args):
    """Check a derivation file in ``--mode``."""
    try:
        d = load_derivation(args.file)
    except OSError as err:
        return _fail(args, INPUT_ERROR, err)
    except LNIFError as err:
        return _fail(args, CHECK_FAILURE, err)
    try:
        check_derivation(d, args.mode)
    except LNIFError as err:
        return _fail(args, CHECK_FAILURE, err)
    record = {"status": "valid", "mode": args.mode,
              "conclusion": str(d.conclusion), "height": d.height,
              "size": d.size}
    _emit(args, record, f"VALID ({args.mode}) {d.conclusion}")
    if args.format != "json" and args.verbose:
        derivation_table(d)
    return OK


def cmd_cutelim(args):
    """Eliminate every cut of a with-cut derivation file."""
    try:
        d = load_derivation(args.input)
    except OSError as err:
        return _fail(args, INPUT_ERROR, err)
    except LNIFError as err:
        return _fail(args, CHECK_FAILURE, err)
    try:
        result = transform.eliminate_cut(d)
    except (LNIFError, AssertionError) as err:
        return _fail(args, CHECK_FAILURE, err)
    dump_derivation(result, args.output)
    record = {"status": "cut-free", "output": args.output,
              "height": result.height, "size": result.size}
    _emit(args, record, f"CUT-FREE {result.conclusion}  height "
                        f"{result.height}, {result.size} nodes")
    return OK


def cmd_countermodel(args):
    """Search the smallest linear model refuting ``formula``."""
    try:
        formula = parse_formula(args.formula)
    except _INPUT_ERRORS as err:
        return _fail(args, INPUT_ERROR, err)
    try:
        found = find_countermodel(formula, args.worlds, args.domain)
    except ModelError as err:
        return _fail(args, INPUT_ERROR, err)
    if found is None:
        _emit(args, {"status": "none", "worlds": args.worlds,
                     "domain": args.domain},
              f"none within {args.worlds} worlds and domain size "
              f"{args.domain}")
        return NO_COUNTERMODEL
    model, world = found
    _emit(args, {"status": "countermodel", "model": format_model(model),
                 "world": world},
          f"{format_model(model)}\nrefuted at world {world}")
    return OK


def cmd_latex(args):
    """Render a derivation file with ``bussproofs``."""
    try:
        d = load_derivation(args.file)
    except OSError as err:
        return _fail(args, INPUT_ERROR, err)
    except LNIFError as err:
        return _fail(args, CHECK_FAILURE, err)
    text = latex_document(d) if args.standalone else latex_derivation(d)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    if args.format == "json":
        _emit(args, {"status": "ok", "output": args.output, "latex": text},
              None)
    elif not args.output:
        sys.stdout.write(text)
    return OK


def _param(text):
    return Param(text.lstrip("#"))


def _formulas(text):
    return [parse_formula(t) for t in text.split(";") if t.strip()]


def _counts(text):
    return [int(k) for k in text.split(",")]


# name: (function, converters of the positional arguments)
_TRANSFORMS = {
    "rename_param": (transform.rename_param, [_param, _param]),
    "admit_iw": (transform.admit_iw, [int, _formulas, _formulas]),
    "admit_ew": (transform.admit_ew, [int]),
    "admit_lwr": (transform.admit_lwr, [int, parse_formula]),
    "admit_bot_r": (transform.admit_bot_r, [int]),
    "drop_formula": (transform.drop_formula, [int, parse_formula]),
    "strip_retained": (transform.strip_retained, []),
    "invert_right": (transform.invert_right,
                     [str, int, parse_formula, _param]),
    "invert_left": (transform.invert_left,
                    [parse_formula, _counts, _param]),
    "admit_contraction_left": (transform.admit_contraction_left,
                               [int, parse_formula]),
    "admit_contraction_right": (transform.admit_contraction_right,
                                [int, parse_formula]),
    "admit_merge": (transform.admit_merge, [int]),
    "weaken_to": (transform.weaken_to, [parse_sequent]),
    "eliminate_cut": (transform.eliminate_cut, []),
}


def cmd_transform(args):
    """
    Apply one transformation to a derivation file.

    Results that are several derivations go to ``OUTPUT.1.json``,
    ``OUTPUT.2.json``, ... .
    """
    function, converters = _TRANSFORMS[args.operation]
    if len(args.arguments) > len(converters):
        return _fail(args, INPUT_ERROR, LNIFError(
            f"{args.operation} takes at most {len(converters)} arguments"))
    try:
        d = load_derivation(args.file)
        values = [convert(text) for convert, text
                  in zip(converters, args.arguments)]
    except _INPUT_ERRORS as err:
        return _fail(args, INPUT_ERROR, err)
    except LNIFError as err:
        return _fail(args, CHECK_FAILURE, err)
    except ValueError as err:
        return _fail(args, INPUT_ERROR, err)
    try:
        result = function(d, *values)
    except TypeError as err:
        return _fail(args, INPUT_ERROR, err)
    except LNIFError as err:
        return _fail(args, CHECK_FAILURE, err)
    results = list(result) if isinstance(result, (list, tuple)) \
        else [result]
    outputs = []
    for number, item in enumerate(results, start=1):
        path = args.output
        if path and len(results) > 1:
            stem = path[:-5] if path.endswith(".json") else path
            path = f"{stem}.{number}.json"
        if path:
            dump_derivation(item, path)
        elif args.format != "json":
            _write(item)
        outputs.append({"output": path, "conclusion": str(item.conclusion),
                        "height": item.height})
    _emit(args, {"status": "ok", "operation": args.operation,
                 "results": outputs},
          "\n".join(f"{args.operation}: {o['conclusion']}  height "
                    f"{o['height']}" for o in outputs) if args.output
          else None)
    return OK


def cmd_oracle(args):
    """Decide a propositional formula on the Goedel chain."""
    try:
        formula = parse_formula(args.formula)
        valid, witness = goedel_valid(formula)
    except _INPUT_ERRORS + (NotPropositional,) as err:
        return _fail(args, INPUT_ERROR, err)
    shown = None if witness is None else \
        {k: str(v) for k, v in witness.items()}
    text = "valid" if valid else "not valid: " + ", ".join(
        f"{k} = {v}" for k, v in shown.items())
    _emit(args, {"status": "valid" if valid else "invalid",
                 "witness": shown}, text)
    return OK


def cmd_hilbert(args):
    """Replay a JSON list of Hilbert steps; write the last derivation."""
    try:
        with open(args.file, encoding="utf-8") as f:
            steps = json.load(f)
        derivations = hilbert_proof(steps)
    except (json.JSONDecodeError,) + _INPUT_ERRORS as err:
        return _fail(args, INPUT_ERROR, err)
    except LNIFError as err:
        return _fail(args, CHECK_FAILURE, err)
    last = derivations[-1]
    if args.output:
        dump_derivation(last, args.output)
    _emit(args, {"status": "ok", "steps": len(derivations),
                 "conclusion": str(last.conclusion), "output": args.output},
          f"{len(derivations)} steps: {last.conclusion}")
    if not args.output and args.format != "json":
        _write(last)
    return OK


def _parser():
    common = ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for INFO, -vv for DEBUG logging")
    common.add_argument("--format", choices=["text", "json"],
                        default="text")
    common.add_argument("--config", help="key = value configuration file")

    parser = ArgumentParser(
        prog="lnif",
        description="Linear nested sequents for first-order Goedel logic.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("prove", parents=[common],
                            help="search a derivation of |- FORMULA")
    p.add_argument("formula", nargs="?")
    p.add_argument("--depth", type=int)
    p.add_argument("--witness-cap", type=int, dest="witness_cap")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--batch", help="file with one formula per line")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_prove)

    p = commands.add_parser("check", parents=[common],
                            help="check a derivation file")
    p.add_argument("file")
    p.add_argument("--mode", choices=sorted(MODES), default="official")
    p.set_defaults(run=cmd_check)

    p = commands.add_parser("cutelim", parents=[common],
                            help="eliminate cuts")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(run=cmd_cutelim)

    p = commands.add_parser("countermodel", parents=[common],
                            help="smallest refuting linear model")
    p.add_argument("formula")
    p.add_argument("--worlds", type=int, default=3)
    p.add_argument("--domain", type=int, default=2)
    p.set_defaults(run=cmd_countermodel)

    p = commands.add_parser("latex", parents=[common],
                            help="bussproofs rendering")
    p.add_argument("file")
    p.add_argument("--standalone", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_latex)

    p = commands.add_parser("transform", parents=[common],
                            help="apply one derivation transformation")
    p.add_argument("operation", choices=sorted(_TRANSFORMS))
    p.add_argument("file")
    p.add_argument("arguments", nargs="*",
                   help="positions, formulas (';' separated lists), "
                        "parameters, rule tags")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_transform)

    p = commands.add_parser("oracle", parents=[common],
                            help="Goedel chain validity (propositional)")
    p.add_argument("formula")
    p.set_defaults(run=cmd_oracle)

    p = commands.add_parser("hilbert", parents=[common],
                            help="replay Hilbert steps from a JSON file")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_hilbert)
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][
        min(args.verbose, 2)]
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")
    code = args.run(args)
    logger.debug("%s finished with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
