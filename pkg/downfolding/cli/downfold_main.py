# coding=utf-8
# Copyright 2024 The Downfolding Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
r"""Command-line entry point: `downfold <command> [flags]`.

Commands:
  run        Downfolds an FCIDUMP file and writes the energy trace.
  factorize  Writes the Cholesky and CP factors of an FCIDUMP file.
  verify     Runs a randomized property suite (oracle, blockenc,
             factorization).
  estimate   Prints qubit and depth estimates of the circuits.

Settings come from --config_file, then from flags given on the command
line. Reports and errors are printed to stdout as JSON. The exit code is 0
on success, 1 on a numerical failure and 2 on a usage or input error.

Example usage:

downfold run --fcidump=h2.fcidump --tol=1e-10 --out=/tmp/h2
downfold verify --suite=blockenc --seed=1 --size=4
downfold estimate --dims_from=/tmp/h2 --eps=1e-3 --model=diophantine
"""

import os
import sys
from typing import Any, Callable, Dict, Optional, Sequence

from absl import app
from absl import flags
from absl import logging
import gin

from downfolding.cli import config as config_lib
from downfolding.cli import estimate_lib
from downfolding.cli import report
from downfolding.cli import run_lib
from downfolding.cli import verify_lib
from downfolding.fock_oracle import fock_space
from downfolding.integrals import fcidump
from downfolding.rhd import solver
from downfolding.tensorfactor import cholesky
from downfolding.tensorfactor import cp_als
from downfolding.tensorfactor import factor_io

_CONFIG_FILE = flags.DEFINE_string(
    'config_file', None, 'Optional key = value file with run settings.')
_GIN_FILE = flags.DEFINE_multi_string('gin_file', None,
                                      'Paths to gin configuration files.')
_GIN_BINDINGS = flags.DEFINE_multi_string('gin_bindings', None,
                                          'Gin bindings.')
_FCIDUMP = flags.DEFINE_string('fcidump', None, 'Input FCIDUMP file.')
_OUT = flags.DEFINE_string('out', None, 'Output directory.')
_TOL = flags.DEFINE_float('tol', None, 'Amplitude convergence threshold.')
_MAX_ITERATIONS = flags.DEFINE_integer('max_iterations', None,
                                       'Solver iteration cap per step.')
_RANK_MULT = flags.DEFINE_float('rank_mult', None,
                                'N_htf as a multiple of N_aux.')
_TTF_RANK = flags.DEFINE_integer(
    'ttf_rank', None, 'N_ttf; 0 selects max(N_v, 2 N_o).')
_DELTA = flags.DEFINE_float('delta', None, 'Cholesky tolerance.')
_SEED = flags.DEFINE_integer('seed', None, 'Random seed.')
_STOP_AT = flags.DEFINE_integer('stop_at', None,
                                'Orbitals left when the recursion stops.')
_DENSE_ONLY = flags.DEFINE_bool('dense_only', None,
                                'Use the dense residuals.')
_FACTORIZED = flags.DEFINE_bool('factorized', None,
                                'Use the tensor-factorized residuals.')
_SUITE = flags.DEFINE_string('suite', 'oracle', 'Property suite to run.')
_SIZE = flags.DEFINE_integer(
    'size', 4, 'Operand size of blockenc and factorization, orbitals of '
    'oracle.')
flags.DEFINE_alias('norb', 'size')
_EPS = flags.DEFINE_float('eps', None, 'Rotation synthesis precision.')
_MODEL = flags.DEFINE_enum('model', None, ['diophantine', 'solovay_kitaev'],
                           'Rotation synthesis cost model.')
_AGGREGATION = flags.DEFINE_enum('aggregation', None, ['sum', 'max'],
                                 'How expression depths combine.')
_DIMS_FROM = flags.DEFINE_string(
    'dims_from', None, 'Run directory whose summary holds the dimensions.')
_PUBLISHED_ROW = flags.DEFINE_string(
    'published_row', None, 'Published row to compare against, for example '
    'retinol.')
_N_O = flags.DEFINE_integer('n_o', None, 'Occupied orbitals.')
_N_V = flags.DEFINE_integer('n_v', None, 'Virtual orbitals.')
_N_AUX = flags.DEFINE_integer('n_aux', None, 'Cholesky vectors.')
_N_HTF = flags.DEFINE_integer('n_htf', None, 'Hamiltonian CP rank.')
_N_TTF = flags.DEFINE_integer('n_ttf', None, 'Amplitude CP rank.')

# RunConfig field of every flag that overrides a config file value.
_OVERRIDES = (
    (_FCIDUMP, 'fcidump'),
    (_OUT, 'out'),
    (_TOL, 'tol'),
    (_MAX_ITERATIONS, 'max_iterations'),
    (_RANK_MULT, 'htf_mult'),
    (_TTF_RANK, 'ttf_rank'),
    (_DELTA, 'delta'),
    (_SEED, 'seed'),
    (_STOP_AT, 'stop_at'),
    (_EPS, 'epsilon'),
    (_MODEL, 'cost_model'),
    (_AGGREGATION, 'aggregation'),
)

_USAGE_ERRORS = (
    config_lib.ConfigError,
    estimate_lib.MissingDimensionsError,
    factor_io.FactorFileError,
    fcidump.FcidumpFormatError,
    fock_space.OracleSizeError,
    run_lib.InputNotFoundError,
    verify_lib.UnknownSuiteError,
    OSError,
    KeyError,
)
_NUMERICAL_ERRORS = (
    cholesky.NotPositiveSemidefiniteError,
    cp_als.RankOrderingError,
    solver.SolverConvergenceError,
    solver.SolverDivergenceError,
    verify_lib.PropertyViolationError,
)


def _present(holder: flags.FlagHolder) -> bool:
  return not flags.FLAGS[holder.name].using_default_value


def build_run_config() -> config_lib.RunConfig:
  """Config file values, overridden by flags given on the command line."""
  file_values = {}
  if _CONFIG_FILE.value:
    file_values = config_lib.read_config_file(_CONFIG_FILE.value)
  overrides = {
      field: holder.value
      for holder, field in _OVERRIDES
      if _present(holder)
  }
  if _present(_DENSE_ONLY) and _present(_FACTORIZED) and (
      _DENSE_ONLY.value == _FACTORIZED.value):
    raise app.UsageError(
        '--dense_only and --factorized contradict each other.')
  if _present(_FACTORIZED):
    overrides['mode'] = 'factorized' if _FACTORIZED.value else 'dense'
  elif _present(_DENSE_ONLY):
    overrides['mode'] = 'dense' if _DENSE_ONLY.value else 'factorized'
  return config_lib.build_config(file_values, overrides)


def configure() -> config_lib.RunConfig:
  """Applies gin settings and builds the run config.

  Raises:
    config_lib.ConfigError: A gin binding or a derived config value is
      rejected.
  """
  try:
    gin.parse_config_files_and_bindings(_GIN_FILE.value,
                                        _GIN_BINDINGS.value)
    run_config = build_run_config()
    run_config.downfold_config()
  except (config_lib.ConfigError, app.UsageError, OSError):
    raise
  except (ValueError, SyntaxError) as e:
    raise config_lib.ConfigError(str(e)) from e
  return run_config


def _cmd_verify(run_config: config_lib.RunConfig) -> Dict[str, Any]:
  result = verify_lib.cmd_verify(_SUITE.value, run_config.seed, _SIZE.value)
  if _present(_OUT):
    report.write_json(
        os.path.join(run_config.out, f'verify_{result["suite"]}.json'),
        result)
  return result


def _cmd_estimate(run_config: config_lib.RunConfig) -> Dict[str, Any]:
  values = {h.name: h.value for h in (_N_O, _N_V, _N_AUX, _N_HTF, _N_TTF)}
  dims = None
  if _DIMS_FROM.value:
    dims = estimate_lib.dims_from_run(_DIMS_FROM.value)
  elif any(v is not None for v in values.values()):
    dims = estimate_lib.dims_from_values(values)
  result = estimate_lib.cmd_estimate(dims, run_config.estimator_config(),
                                     _PUBLISHED_ROW.value)
  if _present(_OUT):
    report.write_json(os.path.join(run_config.out, 'estimate.json'), result)
  return result


COMMANDS: Dict[str, Callable[[config_lib.RunConfig], Dict[str, Any]]] = {
    'run': run_lib.cmd_run,
    'factorize': run_lib.cmd_factorize,
    'verify': _cmd_verify,
    'estimate': _cmd_estimate,
}


def _error_details(error: BaseException) -> Dict[str, Any]:
  if isinstance(error, verify_lib.PropertyViolationError):
    return {'counterexample': error.counterexample}
  diagnostics = getattr(error, 'diagnostics', None)
  if diagnostics is not None:
    return {
        'orbital': diagnostics.orbital,
        'iterations': diagnostics.iterations,
        'residual_norm': diagnostics.residual_norm,
    }
  return {}


def exit_code(error: BaseException) -> Optional[report.ExitCode]:
  """Exit code of an expected failure, None for anything else."""
  if isinstance(error, _NUMERICAL_ERRORS):
    return report.ExitCode.NUMERICAL_FAILURE
  if isinstance(error, (app.UsageError,) + _USAGE_ERRORS):
    return report.ExitCode.USAGE_ERROR
  return None


def execute(command: str) -> int:
  """Runs `command` with the parsed flags, printing the report or error."""
  try:
    if command not in COMMANDS:
      raise app.UsageError(
          f'Unknown command {command!r}; expected one of '
          f'{", ".join(COMMANDS)}.')
    result = COMMANDS[command](configure())
  except Exception as e:  # pylint: disable=broad-except
    code = exit_code(e)
    if code is None:
      raise
    logging.error('%s failed: %s', command, e)
    sys.stdout.write(report.dumps(report.error_object(e, **_error_details(e))))
    return int(code)
  sys.stdout.write(report.dumps(result))
  return int(report.ExitCode.OK)


def main(argv: Sequence[str]) -> int:
  if len(argv) != 2:
    error = app.UsageError(
        'Expected exactly one command: ' + ', '.join(COMMANDS) + '.')
    sys.stdout.write(report.dumps(report.error_object(error)))
    return int(report.ExitCode.USAGE_ERROR)
  return execute(argv[1])


def run_main():
  app.run(main)


if __name__ == '__main__':
  run_main()
