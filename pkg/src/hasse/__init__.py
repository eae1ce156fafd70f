"""Higher derivations, torsion and modules of quotients over Q[x], exactly."""

__version__ = "0.1.0"
