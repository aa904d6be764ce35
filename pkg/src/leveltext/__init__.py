"""leveltext: a workbench for rewriting texts to target readability levels.

Scoring, corpus management, prompt construction, provider benchmarking,
sentence alignment and merging, plus an HTTP service for the curator UI.
"""

__version__ = "0.1.0"
