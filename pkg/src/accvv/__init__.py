"""Conformance-testing harness for OpenACC compilers."""

__version__ = "0.1.0"

LANGUAGES = ("C", "C++", "Fortran")
