"""qlwb: an exact workbench for Quillen-Lichtenbaum dimension computations.

The package computes, over the integers and with no floating point anywhere:

- finitely generated abelian groups and their tensor/torsion functors
  (:mod:`qlwb.groups`),
- short-exact-sequence middles with honest extension-ambiguity tracking
  (:mod:`qlwb.extensions`),
- Bloch-Ogus and K/tau spectral sequence pages, Atiyah-Hirzebruch
  assembly of topological K-theory, and Gysin sequences of etale
  P^1-bundles (:mod:`qlwb.pages`),
- interval decisions for the Quillen-Lichtenbaum dimension of surfaces,
  3-folds, 4-folds, and semiorthogonal components (:mod:`qlwb.decision`),
- integral algebraic K-groups of varieties and Kuznetsov components
  (:mod:`qlwb.ktheory`),
- Schubert calculus, Hirzebruch-Riemann-Roch, and Hodge numbers of
  Grassmannian linear sections (:mod:`qlwb.schubert`),
- a catalog of varieties with a consistency checker and CLI
  (:mod:`qlwb.workbench`, ``qlwb``).
"""

__version__ = "0.1.0"
