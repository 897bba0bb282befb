"""edulearn: tabular regression/classification toolkit with hand-built
least-squares and logistic-regression machinery, plus two reference
pipelines (learning-style classification and academic-risk prediction)."""

__version__ = "0.1.0"

from .errors import EdulearnError

__all__ = ["EdulearnError", "__version__"]
