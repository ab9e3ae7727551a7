import numpy as np


class UsageError(ValueError):
  pass


class NumericError(ArithmeticError):
  pass


class EnumerationBudgetError(NumericError):
  pass


class FlowOverflowError(NumericError):
  pass


class FalsifiedError(RuntimeError):
  pass


EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_FALSIFIED = 4


def exit_code(error):
  if isinstance(error, FalsifiedError):
    return EXIT_FALSIFIED
  if isinstance(error, (
      ArithmeticError, np.linalg.LinAlgError)):
    return EXIT_NUMERIC
  if isinstance(error, (ValueError, TypeError, KeyError)):
    return EXIT_USAGE
  return None
