"""Grammar-agnostic automatic visualization pipeline.

The package turns a tabular dataset into charts in four stages: profile the
data into a compact summary, explore visualization goals, fill a code
scaffold for a target chart grammar, and run post-generation operations
(refine, explain, evaluate, repair, recommend, stylize). Every model call
goes through a provider port so recorded cassettes can replay whole
pipelines deterministically and offline.
"""

__version__ = "0.1.0"
