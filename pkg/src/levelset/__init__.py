"""Moments of homogeneous-polynomial sublevel sets and recovery of the polynomial from them."""
from .errors import (DegenerateSampling, LevelSetError, MissingMoment, NotCompact, ParseError,
                     SingularMatrix, UnderdeterminedFamily)
from .kernels import BACKEND
from .momentgen import (CompactnessCertificate, EuclideanNorm, MomentVector, PositivelyHomogeneous,
                        QuadratureConfig, lemma1_check, min_on_sphere, moment_radial, moments_mc,
                        moments_radial_upto)
from .polycore import (GradedOrder, HomogeneousPolynomial, enumerate_degree, evaluate,
                       homogeneity_check, num_monomials)

__version__ = "0.1.0"
