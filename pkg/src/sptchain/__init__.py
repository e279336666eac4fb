"""Classical simulation toolkit for a periodically driven SPT time-crystal
spin chain: disorder sampling, dense and MPS Floquet engines, gate-level
circuits, variational compilation, and subharmonic-response analyses."""

__version__ = "0.1.0"
