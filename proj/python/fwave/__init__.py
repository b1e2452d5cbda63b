from ._fwave import (
    FwaveError,
    __version__,
    airy_ai,
    airy_ai_complex,
    airy_ai_prime,
    airy_zeros,
    detect_caustics,
    eigenfunction,
    eigenvalue,
    mode_overlap,
    overlap_count,
    phase_correction_B,
    propagate,
    reflection_window,
)
