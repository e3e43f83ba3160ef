"""Exact free resolutions of the ideals H(n) = I_1(uX) + I_1(Xv) + I_1(vu - Adj X).

Modules: ``exact_arith`` (polynomials), ``multilinear`` (exterior algebra),
``generic_data`` (data, specializations, PRNG), ``big_complex`` (F and its
isomorphisms), ``minimal_complex`` (M), ``verify``, ``groebner``,
``tor_algebra`` and ``cli``.
"""

__version__ = "0.1.0"
