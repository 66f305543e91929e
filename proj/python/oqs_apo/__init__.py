from ._oqs_apo import (
    ConfigError,
    NumericalError,
    __version__,
    coherence,
    criterion,
    damped_asymptote,
    entanglement_entropy,
    figure_names,
    run_point,
)
