"""Heat kernel estimates for Lévy processes with unimodal-comparable jumps."""

__version__ = "0.1.0"
