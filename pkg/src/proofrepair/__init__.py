"""proofrepair: repair terms and proofs across setoid-style type changes."""

__version__ = "0.1.0"
