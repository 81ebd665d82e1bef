"""Paragraph-level doc2vec exporter.

Reads a corpus manifest, re-segments the listed stories with the same
blank-line rule the ingester used, trains PV-DBOW paragraph vectors, and
writes them in the v1 embedding interchange format.
"""

__version__ = "0.1.0"
