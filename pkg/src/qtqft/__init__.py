"""Exact quantum-group lattice gauge theory on surfaces and 3-manifold invariants."""
from .blocks import (
    MorseWord,
    MorseWordError,
    block_tensor,
    evaluate_closed,
    glue,
    heat_kernel_z,
    link_invariant,
    parse_morse_word,
    surface_z,
)
from .cyclo import CycNum
from .fusion import FusionData, IdentityFailure, build_fusion_data
from .threemfld import (
    FramedSurgeryLink,
    HeegaardDiagram,
    SimplicialComplex3,
    SingerMove,
    canonical_thickening,
    heegaard_invariant,
    singer_move_check,
    surgery_invariant,
    triangulation_invariant,
)

__version__ = "0.1.0"
