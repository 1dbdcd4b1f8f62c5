"""Dense-matrix simulations of cloning, telegraphing and reconstruction of quantum states."""

from .errors import NogolabError
from .qcore import DensityMatrix, OperatorMatrix, PureState, Pvm
from .report import ExperimentReport

__version__ = "0.1.0"

__all__ = ["DensityMatrix", "ExperimentReport", "NogolabError", "OperatorMatrix", "PureState", "Pvm", "__version__"]
