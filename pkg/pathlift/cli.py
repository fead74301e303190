"""
pathlift command line.

    pathlift solve --epsilon 1e-6 --coeffs "[-1, 0, 1]"
    pathlift solve --input phi.json --verify --oracle-compare --stats
    pathlift serve --port 8000

Exit codes: 0 success, 2 input error, 3 tau below the precision floor,
4 precision failure inside the solver or the oracle.
"""
import argparse
import json
import logging
import math
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from . import __version__
from .complexpoly import Polynomial, factor_to_root_precision, residual_norm
from .config import SolveConfig, log_level
from .errors import InputError, PathLiftError, TauUnderflow, TheoremViolation
from .lifter import Factorization, solve
from .oracle import match_multisets, oracle_roots

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECISION_FLOOR = 3
EXIT_SOLVER = 4

# one digit before the point and 16 after: 17 significant digits, 1.0 prints as 1.0000000000000000e+00
FLOAT_FORMAT = '.16e'
FLOAT_TAG = '@float:'
_TAGGED_FLOAT = re.compile('"' + re.escape(FLOAT_TAG) + r'([^"]+)"')


class InputSpec(BaseModel):
    """Ascending coefficients as [re, im] pairs or plain reals, plus an optional epsilon"""

    coeffs: List[Tuple[float, float]] = Field(min_length=1)
    epsilon: Optional[float] = Field(None, gt=0)

    @field_validator('coeffs', mode='before')
    @classmethod
    def _pairs(cls, value: Any) -> Any:
        if not isinstance(value, (list, tuple)):
            return value
        out = []
        for entry in value:
            if isinstance(entry, (int, float)) and not isinstance(entry, bool):
                out.append((float(entry), 0.0))
            elif isinstance(entry, dict):
                out.append((entry.get('re', 0.0), entry.get('im', 0.0)))
            else:
                out.append(entry)
        return out

    def polynomial(self) -> Polynomial:
        return Polynomial(np.array([complex(re, im) for re, im in self.coeffs]))


def _tag_floats(value: Any) -> Any:
    if isinstance(value, float) and math.isfinite(value):
        return f"{FLOAT_TAG}{format(float(value), FLOAT_FORMAT)}"
    if isinstance(value, dict):
        return {k: _tag_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_tag_floats(v) for v in value]
    return value


def render_document(doc: Dict[str, Any]) -> str:
    """JSON text with every finite float written to 17 significant digits"""
    text = json.dumps(_tag_floats(doc), indent=2)
    return _TAGGED_FLOAT.sub(lambda m: m.group(1), text)


def _complex_doc(value: complex) -> Dict[str, float]:
    return {'re': float(value.real), 'im': float(value.imag)}


def monicize(p: Polynomial) -> Tuple[Polynomial, complex]:
    if p.degree < 1:
        raise InputError("polynomial must have degree >= 1")
    lead = p.leading
    return Polynomial(p.coeffs / lead), lead


def resolve_epsilon(
    degree: int,
    epsilon: Optional[float],
    root_precision: Optional[float],
    cfg: SolveConfig,
) -> float:
    if root_precision is not None:
        return factor_to_root_precision(root_precision, degree, cfg.tau_floor)
    if epsilon is not None:
        return epsilon
    raise InputError("epsilon is required (flag, input file or --root-precision)")


def factor_document(
    request: InputSpec,
    *,
    epsilon: Optional[float] = None,
    root_precision: Optional[float] = None,
    verify: bool = False,
    oracle_compare: bool = False,
    include_stats: bool = False,
    assume_pd1: bool = False,
    cfg: Optional[SolveConfig] = None,
) -> Dict[str, Any]:
    """Monicize, solve and build the result document shared by the CLI and the service"""
    cfg = cfg or SolveConfig.from_env()
    phi, lead = monicize(request.polynomial())
    eps = resolve_epsilon(
        phi.degree,
        epsilon if epsilon is not None else request.epsilon,
        root_precision,
        cfg,
    )
    result: Factorization = solve(phi, eps, cfg, assume_pd1=assume_pd1)

    doc: Dict[str, Any] = {
        'degree': phi.degree,
        'epsilon': eps,
        'leading_coefficient': _complex_doc(lead),
        'K': result.K,
        'tau': result.tau,
        'roots': [_complex_doc(r) for r in result.roots],
        'residual': result.residual,
        'evaluations': result.evaluations,
        'stages': [
            {
                'degree': s.degree,
                'N': s.plm_iterations,
                'M': s.polish_iterations,
                'quadrants_tried': s.quadrants_tried,
                'evaluations': s.evaluations,
            }
            for s in result.per_stage
        ],
    }
    if include_stats:
        doc['stage_stats'] = [s.as_dict() for s in result.per_stage]
    if verify:
        doc['verified_residual'] = residual_norm(phi, result.roots)
    if oracle_compare:
        reference = oracle_roots(phi, strategy=cfg.evaluator)
        doc['oracle_distance'] = match_multisets(result.roots, reference.roots)
        doc['oracle_backward_error'] = reference.max_backward_error
    return doc


def load_input(args: argparse.Namespace) -> InputSpec:
    try:
        if args.coeffs is not None:
            return InputSpec(coeffs=json.loads(args.coeffs))
        return InputSpec.model_validate_json(Path(args.input).read_text())
    except json.JSONDecodeError as e:
        raise InputError(f"coefficients are not valid JSON: {e}") from e
    except ValidationError as e:
        raise InputError(f"invalid input: {e.errors()[0]['msg']}") from e
    except OSError as e:
        raise InputError(f"cannot read {args.input}: {e}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='pathlift', description="Certified epsilon-factorization of complex polynomials")
    parser.add_argument('--version', action='version', version=f"pathlift {__version__}")
    commands = parser.add_subparsers(dest='command', required=True)

    solve_cmd = commands.add_parser('solve', help="factor one polynomial and print a JSON document")
    source = solve_cmd.add_mutually_exclusive_group(required=True)
    source.add_argument('--input', help="JSON file with {\"coeffs\": [[re, im], ...], \"epsilon\": ...}")
    source.add_argument('--coeffs', help="inline JSON list of ascending coefficients")
    solve_cmd.add_argument('--epsilon', type=float)
    solve_cmd.add_argument('--root-precision', type=float, help="derive epsilon so roots are within this distance")
    solve_cmd.add_argument('--verify', action='store_true', help="recompute the residual from the output roots")
    solve_cmd.add_argument('--oracle-compare', action='store_true', help="report distance to reference roots")
    solve_cmd.add_argument('--stats', action='store_true', help="include every per-stage counter")
    solve_cmd.add_argument('--assume-pd1', action='store_true', help="input is in P_d(1); use K = 4")
    solve_cmd.add_argument('--weed-before-polish', action='store_true')
    solve_cmd.add_argument('--w0-mode', choices=['modulus', 'projection'])

    serve_cmd = commands.add_parser('serve', help="run the HTTP service")
    serve_cmd.add_argument('--host', default='127.0.0.1')
    serve_cmd.add_argument('--port', type=int, default=8000)
    return parser


def _solve_command(args: argparse.Namespace) -> int:
    if args.epsilon is not None and not args.epsilon > 0:
        raise InputError(f"epsilon must be positive, got {args.epsilon}")
    cfg = SolveConfig.from_env(
        weed_before_polish=args.weed_before_polish or None,
        w0_mode=args.w0_mode,
    )
    doc = factor_document(
        load_input(args),
        epsilon=args.epsilon,
        root_precision=args.root_precision,
        verify=args.verify,
        oracle_compare=args.oracle_compare,
        include_stats=args.stats,
        assume_pd1=args.assume_pd1,
        cfg=cfg,
    )
    sys.stdout.write(render_document(doc) + '\n')
    return EXIT_OK


def _serve_command(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run('pathlift.api:app', host=args.host, port=args.port, log_level=log_level().lower())
    return EXIT_OK


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT

    logging.basicConfig(
        level=log_level(),
        stream=sys.stderr,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )
    try:
        if args.command == 'serve':
            return _serve_command(args)
        return _solve_command(args)
    except (InputError, ValidationError) as e:
        return _fail(EXIT_INPUT, f"input error: {e}")
    except TauUnderflow as e:
        return _fail(EXIT_PRECISION_FLOOR, str(e))
    except PathLiftError as e:
        if isinstance(e, TheoremViolation):
            log.debug("per-quadrant diagnostics: %s", e.stats)
        return _fail(EXIT_SOLVER, f"solver failure ({type(e).__name__}): {e}")


def _fail(code: int, message: str) -> int:
    sys.stderr.write(f"pathlift: {message}\n")
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
