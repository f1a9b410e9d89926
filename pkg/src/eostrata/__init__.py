"""Ekedahl-Oort strata of signature (q-2, 2): closure order, Dieudonne modules and Siegel comparison."""

__version__ = "0.1.0"
