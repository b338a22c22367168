"""Schottky groups on complex projective space.

Projective primitives, PSL(n+1, C) dynamics and limit sets, the Jordan
asymptotics behind them, Schottky data with the Nori construction and an
axiom verifier, and the bridge-set obstruction on even-dimensional P^n.
"""

from .asymptotics import (KIndexReport, binom, jordan_block, jordan_power, k_index, k_uniqueness,
                          normalized_orbit, verify_decay)
from .errors import *  # noqa: F401,F403
from .group import (SchottkyData, VerificationReport, accumulation_estimate, fundamental_domain_membership,
                    nested_region, nori_build, verify_schottky, word_image_region)
from .obstruction import (BridgeSet, ObstructionReport, build_bridge, contradiction_harness, pivot_index,
                          subspace_exclusion_check)
from .projective import ProjPoint, ProjSubspace, canonicalize, fs_distance, intersect, span
from .psl import (ModulusDecomposition, ProjMap, apply, eigenvector_span, level_set, limit_set,
                  modulus_decomposition)
from .regions import Certificate, CounterexamplePoint, QuadricRegion, Unknown, region_disjoint, region_image
from .words import ReducedWord, enumerate_reduced_words

__version__ = "0.1.0"
