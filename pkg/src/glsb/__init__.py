"""glsb: snowballing-based gray-literature review over Q&A site data.

Builds a keyword start set over a parsed data dump, expands it with
link-based and similarity-based backward/forward snowballing, runs a
two-reviewer screening workflow with majority-vote conflict resolution,
and reports precision/recall-gain/overlap metrics.
"""

__version__ = "0.1.0"
