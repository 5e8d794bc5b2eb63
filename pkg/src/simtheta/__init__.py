"""Exact verification of metaplectic cocycle identities for unitary similitude dual pairs."""

from .cocycle import (LERAY_CONVENTION, CharacterChi, ChiUnavailable, beta_V_chi, big_cocycle_C,
                      commutator_value, leray_invariant, mu, rao_cocycle, rv_space)
from .doubling import DoubledSpace, GSpElement, Lagrangian, build_doubled
from .exact import Matrix, QQ, QuadExt, QuadExtField, conj, norm_EF, restrict_scalars, trace_EF
from .hermitian import (HermitianSpace, SimilitudeElement, SplitSkewHermitianSpace, bruhat_decompose,
                        similitude_factor)
from .local import (LocalContext, Mu8, QuadSpaceF, epsilon_EF, gamma_eta, hilbert_symbol, legendre,
                    weil_index_gauss_oracle, weil_index_quadspace, weil_index_scalar)

__version__ = "0.1.0"
