"""Train track maps, graph towers, and shift-invariant measures.

The pipeline: a substitution or a train track self-map of a graph yields a
stationary graph tower; non-negative eigenvectors of its transition matrix
with eigenvalue above one yield weight towers (edge weights plus turn
weights subject to switch and compatibility conditions); a weight tower
evaluates to a Kolmogorov function, the cylinder-value form of a shift- and
flip-invariant measure.  Everything numerical is certified interval
arithmetic over exact characteristic-polynomial roots.
"""

from .errors import (
    GraphError, IncompleteTableError, MapError, ParseError, PathError,
    PreconditionError, SpectralError, TTMError,
)
from .graphs import (
    Graph, Language, inverse, is_reduced, make_turn, reduce_path,
    reverse_path, rose, turns_of,
)
from .maps import (
    DirectionAnalysis, GraphMap, compose, identity_map, infinitely_legal_language,
    is_expanding, is_homotopy_equivalence, is_train_track, power, used_language,
)
from .measures import (
    KolmogorovFunction, MeasureTable, frequency_oracle, image_measure,
    recover_weights, verify_eigen_measure, verify_kolmogorov,
)
from .spectra import (
    BlockForm, Eigenpair, block_form, distinguished_eigenvectors, is_primitive,
    nonneg_eigenvectors_for, pf_eigenpair,
)
from .substitutions import Substitution, ergodic_measures, to_train_track
from .towers import (
    StationaryTower, VectorTower, WeightTower, image_vector_tower,
    repetition_bound, tower_self_morphism, weight_tower_from_vector,
)

__version__ = "0.1.0"
