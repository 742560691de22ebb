"""kappamap: deformation map for generalized kappa-Poincare and kappa-Weyl algebras."""
__version__ = "0.1.0"
