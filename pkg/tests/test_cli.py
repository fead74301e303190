import json
import re

import pytest

from pathlift.cli import EXIT_INPUT, EXIT_OK, EXIT_PRECISION_FLOOR, EXIT_SOLVER, InputSpec, render_document, run
from pathlift.errors import TheoremViolation
from pathlift.oracle import match_multisets


def _solve(capsys, *argv):
    code = run(['solve', *argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if code == EXIT_OK else out)


def test_solve_inline_quadratic(capsys):
    code, doc = _solve(capsys, '--epsilon', '1e-6', '--coeffs', '[-1, 0, 1]')
    assert code == EXIT_OK
    roots = [complex(r['re'], r['im']) for r in doc['roots']]
    assert match_multisets(roots, [1, -1]) < 1e-6
    assert doc['residual'] < 1e-6
    assert doc['degree'] == 2
    assert {'K', 'tau', 'stages', 'evaluations'} <= doc.keys()
    assert {'N', 'M', 'quadrants_tried', 'evaluations'} <= doc['stages'][0].keys()


def test_solve_from_file_with_verify(tmp_path, capsys):
    phi = tmp_path / 'phi.json'
    phi.write_text(json.dumps({'coeffs': [[0.5, 0.1], [0, -0.3], [0.2, 0], [1, 0]], 'epsilon': 1e-4}))
    code, doc = _solve(capsys, '--input', str(phi), '--verify', '--stats')
    assert code == EXIT_OK
    assert doc['verified_residual'] < 1e-4
    assert doc['verified_residual'] == doc['residual']
    assert 'remainder_norm' in doc['stage_stats'][0]


def test_leading_coefficient_is_divided_out(capsys):
    code, doc = _solve(capsys, '--epsilon', '1e-6', '--coeffs', '[[-2, 0], [0, 0], [2, 0]]', '--oracle-compare')
    assert code == EXIT_OK
    assert doc['leading_coefficient'] == {'re': 2.0, 'im': 0.0}
    assert doc['oracle_distance'] < 1e-6


def test_root_precision(capsys):
    code, doc = _solve(capsys, '--root-precision', '0.32', '--coeffs', '[0.1, 0.2, -0.3, 0.1, 1]')
    assert code == EXIT_OK
    assert doc['epsilon'] == pytest.approx(1e-8)


def test_output_is_deterministic(capsys):
    argv = ['solve', '--epsilon', '1e-4', '--coeffs', '[0.3, -0.2, 0.5, 1]']
    run(argv)
    first = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == first


def test_tau_underflow_exit(capsys):
    coeffs = json.dumps([-1] + [0] * 19 + [1])
    code = run(['solve', '--epsilon', '1e-300', '--coeffs', coeffs])
    assert code == EXIT_PRECISION_FLOOR
    assert 'd <= 24' in capsys.readouterr().err


@pytest.mark.parametrize('argv', [
    ['solve', '--coeffs', '[-1, 0, 1]'],
    ['solve', '--epsilon', '1e-4', '--coeffs', '[1, 2'],
    ['solve', '--epsilon', '1e-4', '--coeffs', '[3]'],
    ['solve', '--epsilon', '-1', '--coeffs', '[-1, 1]'],
    ['solve', '--epsilon', '1e-4', '--input', '/nonexistent/phi.json'],
    ['solve', '--epsilon', '1e-4'],
    ['frobnicate'],
])
def test_input_errors(argv):
    assert run(argv) == EXIT_INPUT


def test_solver_failure_exit(monkeypatch):
    def fail(*args, **kwargs):
        raise TheoremViolation("no quadrant succeeded")

    monkeypatch.setattr('pathlift.cli.solve', fail)
    assert run(['solve', '--epsilon', '1e-4', '--coeffs', '[-1, 0, 1]']) == EXIT_SOLVER


def test_input_spec_accepts_reals_and_pairs():
    parsed = InputSpec(coeffs=[1, [2, 3], {'re': 4, 'im': -1}])
    assert parsed.polynomial().coeffs.tolist() == [1, 2 + 3j, 4 - 1j]


def test_render_document_digits():
    text = render_document({'a': 0.1, 'n': 3, 'z': [1.0, -2.5e-300], 'ok': True})
    assert text == (
        '{\n'
        '  "a": 1.0000000000000001e-01,\n'
        '  "n": 3,\n'
        '  "z": [\n'
        '    1.0000000000000000e+00,\n'
        '    -2.5000000000000000e-300\n'
        '  ],\n'
        '  "ok": true\n'
        '}'
    )


def test_numbers_written_to_17_digits(capsys):
    assert run(['solve', '--epsilon', '1e-6', '--coeffs', '[0.3, -0.7, 1]']) == EXIT_OK
    out = capsys.readouterr().out
    doc = json.loads(out)
    tokens = re.findall(r'"re": (\S+),', out)
    assert len(tokens) == 3  # leading coefficient and two roots
    for token in tokens:
        assert re.fullmatch(r'-?\d\.\d{16}e[+-]\d{2,3}', token)
    assert [float(t) for t in tokens[1:]] == [r['re'] for r in doc['roots']]
