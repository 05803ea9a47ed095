"""medtextkit: evaluation, extractive summarization, clinical-corpus search
and clinician-review tooling for medical text generation."""

__version__ = "0.1.0"
