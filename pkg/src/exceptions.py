class DiagnosisError(Exception):
    """Base class for every error raised by the toolkit"""


class DataValidationError(DiagnosisError, ValueError):
    """Input data, arguments or preconditions are invalid"""


class SchemaMismatchError(DataValidationError):
    """Data does not match the schema a model was learned on"""


class ScoreError(DataValidationError):
    """A scoring primitive was called with inconsistent arguments"""


class CacheMissError(DiagnosisError, KeyError):
    """A score needed by BIC* was never computed"""


class StructureError(DiagnosisError):
    """Graph assembly failed"""


class CycleError(StructureError):
    """A directed cycle was found where a DAG is required"""


class RootCauseError(DataValidationError):
    """Root cause extraction cannot run for the given label"""


class InferenceError(DataValidationError):
    """Query or evidence is inconsistent with the network"""


class GeneratorSpecError(DataValidationError):
    """A synthetic data generator spec is invalid"""
