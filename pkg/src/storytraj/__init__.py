"""Semantic trajectories of story openings.

Embeds the first n paragraphs of each story in a corpus (log-entropy LSA,
or vectors imported through the interchange format), averages them into a
mean narrative path, and checks how well minimum-spanning-tree and
open-path TSP solutions recover the true paragraph order, against
shuffled-paragraph controls.
"""

__version__ = "0.1.0"
