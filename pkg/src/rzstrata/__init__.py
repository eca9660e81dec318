"""Lattice models of the GU(2,2) Rapoport-Zink space at p = 3 and their Bruhat-Tits strata.

Modules: gf (finite fields, Galois rings), hermitian (the hermitian quotient
spaces and their Deligne-Lusztig strata), padlat (window lattices, vertex
lattices, split operators), weyl (affine Weyl group and Coxeter tables),
verify (point-level checks) and cli.
"""

__version__ = "0.1.0"
